//! Preimage solvers.
//!
//! A certified witness `j_1..j_K` reduces `V` to an operator `Ṽ` on `K`
//! coordinates that fixes every vertex and preserves orthogonality. For such
//! an operator `(Ṽ x)_k = x_k 𝒜_k(x)`, the preimage of `y` lives on the face
//! `supp(y)`, and the multiplicative update `x_k ← y_k / 𝒜_k(x)` (damped,
//! renormalized) converges there. Newton on the face serves as fallback and
//! as a final polish. The solution is embedded back at the witness positions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CertifyConfig, Pso, SurjectivityCertificate};
use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::scalar::Real;
use crate::simplex::{Face, SimplexVector};
use crate::tolerance::{MASS_TOL, SOLVE_TOL, ZERO_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub solve_tol: f64,
    pub max_iters: usize,
    /// Damping `λ` of the multiplicative update.
    pub damping: f64,
    /// Floor `ε` applied to `𝒜_k` before dividing.
    pub floor: f64,
    /// Iterations without improvement before switching to Newton.
    pub stall_window: usize,
    pub newton_iters: usize,
    pub certify: CertifyConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            solve_tol: SOLVE_TOL,
            max_iters: 10_000,
            damping: 0.5,
            floor: 1e-14,
            stall_window: 200,
            newton_iters: 100,
            certify: CertifyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreimageMethod {
    /// Zero target, zero preimage.
    Trivial,
    Multiplicative,
    Newton,
    /// Solved against the un-merged base operator.
    Lift,
    /// No certificate; Newton over the whole truncation.
    BestEffort,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct Preimage<T> {
    pub x: SimplexVector<T>,
    /// `‖V x - y‖₁`.
    pub residual: f64,
    pub iterations: usize,
    pub method: PreimageMethod,
    /// False when the operator had no surjectivity certificate; the result
    /// is then best effort.
    pub certified: bool,
}

fn l1<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + (*x - *y).abs())
}

impl<T: Real> Pso<T> {
    /// Solves `V x = y` for `y` on the unit sphere.
    pub fn preimage_on_sphere(&self, y: &SimplexVector<T>, cfg: &SolverConfig) -> Result<Preimage<T>> {
        self.check_sphere_target(y)?;
        let cert = self.surjectivity_certificate_with(&cfg.certify);
        self.preimage_with_certificate(y, &cert, cfg)
    }

    fn check_sphere_target(&self, y: &SimplexVector<T>) -> Result<()> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: y.dim() });
        }
        if !y.is_on_sphere(T::one(), T::lit(MASS_TOL)) {
            return Err(Error::WrongMass { expected: 1.0, found: y.mass().approx() });
        }
        Ok(())
    }

    /// Sphere solve reusing a precomputed certificate.
    pub fn preimage_with_certificate(
        &self,
        y: &SimplexVector<T>,
        cert: &SurjectivityCertificate,
        cfg: &SolverConfig,
    ) -> Result<Preimage<T>> {
        self.check_sphere_target(y)?;
        let Some(seq) = cert.sequence().filter(|_| cert.is_surjective()) else {
            return self.best_effort(y, cfg);
        };
        let target = seq.len();
        let zero = T::lit(ZERO_TOL);
        if let Some(k) = (target + 1..=self.dim()).find(|&k| y.coord(k) > zero) {
            return Err(Error::Precondition(format!(
                "target has mass at output {k}, outside the certified outputs 1..={target}"
            )));
        }
        let identity = target == self.dim() && seq.iter().enumerate().all(|(n, &j)| j == n + 1);
        let reduced_y: Vec<T> = y.coords()[..target].to_vec();
        let (xr, iterations, method) = if identity {
            self.solve_identity_op(&reduced_y, cfg)?
        } else {
            self.reindexed(seq)?.solve_identity_op(&reduced_y, cfg)?
        };
        let mut coords = vec![T::zero(); self.dim()];
        for (n, &j) in seq.iter().enumerate() {
            coords[j - 1] = xr[n];
        }
        let x = SimplexVector::new(coords)?;
        let residual = l1(self.apply(&x)?.coords(), y.coords()).approx();
        if residual > cfg.solve_tol {
            return Err(Error::NonConvergence { iterations, residual });
        }
        Ok(Preimage { x, residual, iterations, method, certified: true })
    }

    /// Solves `V x = y` for `y` in the ball by radial reduction: with
    /// `s = mass(y)` and `r = s^{1/m}`, solve on the sphere for `y / s` and
    /// return `r x`.
    pub fn preimage_on_ball(&self, y: &SimplexVector<T>, cfg: &SolverConfig) -> Result<Preimage<T>> {
        let cert = self.surjectivity_certificate_with(&cfg.certify);
        self.ball_preimage_with_certificate(y, &cert, cfg)
    }

    pub fn ball_preimage_with_certificate(
        &self,
        y: &SimplexVector<T>,
        cert: &SurjectivityCertificate,
        cfg: &SolverConfig,
    ) -> Result<Preimage<T>> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: y.dim() });
        }
        let s = y.mass();
        if s == T::zero() {
            return Ok(Preimage {
                x: SimplexVector::zero(self.dim()),
                residual: 0.0,
                iterations: 0,
                method: PreimageMethod::Trivial,
                certified: cert.is_surjective(),
            });
        }
        if s > T::one() + T::lit(MASS_TOL) {
            return Err(Error::MassExceedsOne { mass: s.approx() });
        }
        let unit = SimplexVector::from_raw(y.coords().iter().map(|&c| c / s).collect());
        let sphere = self.preimage_with_certificate(&unit, cert, cfg)?;
        let m = T::from_usize(self.order()).expect("order");
        let r = s.powf(T::one() / m);
        let x = SimplexVector::new(sphere.x.coords().iter().map(|&c| c * r).collect())?;
        let residual = l1(self.apply(&x)?.coords(), y.coords()).approx();
        if residual > cfg.solve_tol {
            return Err(Error::NonConvergence { iterations: sphere.iterations, residual });
        }
        Ok(Preimage { x, residual, ..sphere })
    }

    /// Damped multiplicative iteration on `supp(y)` for an operator with
    /// `(V x)_k = x_k 𝒜_k(x)`, then Newton polish.
    fn solve_identity_op(&self, y: &[T], cfg: &SolverConfig) -> Result<(Vec<T>, usize, PreimageMethod)> {
        let zero = T::lit(ZERO_TOL);
        let face: Vec<usize> = (1..=y.len()).filter(|&k| y[k - 1] > zero).collect();
        let tol = T::lit(cfg.solve_tol);
        let lambda = T::lit(cfg.damping);
        let floor = T::lit(cfg.floor);

        let total: T = face.iter().map(|&k| y[k - 1]).sum();
        let mut x = vec![T::zero(); y.len()];
        for &k in &face {
            x[k - 1] = y[k - 1] / total;
        }
        let mut best = T::infinity();
        let mut stalled = 0;
        let mut iterations = 0;
        let mut method = PreimageMethod::Multiplicative;
        loop {
            let res = l1(&self.apply_raw(&x), y);
            if res <= tol || iterations >= cfg.max_iters {
                break;
            }
            if res < best * (T::one() - T::lit(1e-9)) {
                best = res;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= cfg.stall_window {
                    method = PreimageMethod::Newton;
                    break;
                }
            }
            let factors: Vec<T> = face.iter().map(|&k| self.a_k_raw(&x, k)).collect();
            for (&k, a) in face.iter().zip(factors) {
                let target = y[k - 1] / a.max(floor);
                x[k - 1] = (T::one() - lambda) * x[k - 1] + lambda * target;
            }
            let mass: T = face.iter().map(|&k| x[k - 1]).sum();
            for &k in &face {
                x[k - 1] = x[k - 1] / mass;
            }
            iterations += 1;
        }
        let (polished, steps) = self.newton_on_face(x, &face, y, cfg.newton_iters, tol);
        let res = l1(&self.apply_raw(&polished), y);
        if res > tol {
            return Err(Error::NonConvergence { iterations: iterations + steps, residual: res.approx() });
        }
        Ok((polished, iterations + steps, method))
    }

    /// Newton on the coordinates in `face` for `(V x)_face = y_face`, with a
    /// backtracking line search that keeps the face coordinates positive.
    /// Returns the best iterate and the number of steps taken.
    pub(crate) fn newton_on_face(
        &self,
        mut x: Vec<T>,
        face: &[usize],
        y: &[T],
        max_steps: usize,
        tol: T,
    ) -> (Vec<T>, usize) {
        let mut res = l1(&self.apply_raw(&x), y);
        let target = tol * T::lit(1e-4);
        let mut steps = 0;
        while steps < max_steps && res > target {
            let vx = self.apply_raw(&x);
            let jac = self.jacobian_raw(&x);
            let a: Vec<Vec<T>> =
                face.iter().map(|&k| face.iter().map(|&i| jac[k - 1][i - 1]).collect()).collect();
            let rhs: Vec<T> = face.iter().map(|&k| y[k - 1] - vx[k - 1]).collect();
            let Some(delta) = solve_dense(a, rhs) else { break };
            let mut t = T::one();
            let mut accepted = false;
            for _ in 0..40 {
                let mut cand = x.clone();
                for (pos, &i) in face.iter().enumerate() {
                    cand[i - 1] = cand[i - 1] + t * delta[pos];
                }
                if face.iter().all(|&i| cand[i - 1] > T::zero()) {
                    let r = l1(&self.apply_raw(&cand), y);
                    if r < res {
                        x = cand;
                        res = r;
                        accepted = true;
                        break;
                    }
                }
                t = t * T::lit(0.5);
            }
            steps += 1;
            if !accepted {
                break;
            }
        }
        (x, steps)
    }

    /// Uncertified operator: Newton over all coordinates from a handful of
    /// starts.
    fn best_effort(&self, y: &SimplexVector<T>, cfg: &SolverConfig) -> Result<Preimage<T>> {
        let dim = self.dim();
        let face: Vec<usize> = (1..=dim).collect();
        let tol = T::lit(cfg.solve_tol);
        let mut starts: Vec<Vec<T>> = vec![
            y.coords().iter().map(|&c| c.max(T::lit(1e-3))).collect(),
            vec![T::one() / T::from_usize(dim).expect("dim"); dim],
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..8 {
            let p = SimplexVector::<f64>::random_on_face(&mut rng, &Face::full(dim), dim, 1.0);
            starts.push(p.coords().iter().map(|&c| T::lit(c)).collect());
        }
        let mut best_res = T::infinity();
        let mut total_steps = 0;
        for start in starts {
            let (x, steps) = self.newton_on_face(start, &face, y.coords(), cfg.newton_iters, tol);
            total_steps += steps;
            let res = l1(&self.apply_raw(&x), y.coords());
            if res <= tol {
                if let Ok(x) = SimplexVector::new(x) {
                    return Ok(Preimage {
                        x,
                        residual: res.approx(),
                        iterations: total_steps,
                        method: PreimageMethod::BestEffort,
                        certified: false,
                    });
                }
            }
            best_res = best_res.min(res);
        }
        Err(Error::NonConvergence { iterations: total_steps, residual: best_res.approx() })
    }
}
