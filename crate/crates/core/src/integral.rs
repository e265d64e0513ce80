//! Separable integral kernels
//! `K(u_1..u_m, t) = Σ a_{i_1}(u_1) ⋯ a_{i_m}(u_m) f_{i_1..i_m}(t)`
//! and the integral operator `(A x)(t) = ∫ K(u, t) x(u_1) ⋯ x(u_m) du`.
//!
//! With the moment map `Ɍ(x)_k = ∫ a_k x`, the entries
//! `P_{idx,k} = ∫ a_k f_idx` define a PSO `V` and `Ɍ ∘ A = V ∘ Ɍ`. A surjectivity
//! witness `j_k` for `V` gives the slices `D_r = r · conv{f_{j_k..j_k}}` on
//! which `Ɍ` is a bijection onto the sphere `S_r`, so `A x = φ` is solved
//! by pulling `Ɍ(φ)` back through `V`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypermatrix::{multiplicity, sorted_multi_indices, AuditReport, StochasticHypermatrix};
use crate::piecewise::examples::{build_example_one, ex1_a, ex3_a, ex3_component};
use crate::piecewise::PiecewisePolynomial;
use crate::pso::{FixedPointConfig, Preimage, Pso, SolverConfig, SurjectivityCertificate};
use crate::scalar::{pow2_signed, Real, Scalar};
use crate::simplex::SimplexVector;
use crate::tolerance::{MASS_TOL, ZERO_TOL};

/// Samples per piece for the sup-norm check.
const SUP_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "lowercase")]
pub enum Builtin {
    Ex1 { normalize: bool },
    Ex3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSeries<T> {
    m: usize,
    a: Vec<PiecewisePolynomial<T>>,
    f: BTreeMap<Vec<usize>, PiecewisePolynomial<T>>,
    sup_bound: f64,
    tail_allowance: f64,
    builtin: Option<Builtin>,
}

impl<T: Scalar> KernelSeries<T> {
    /// Missing `f` components are zero. Keys are sorted on entry.
    /// `sup_bound` defaults to the observed grid maximum.
    pub fn new(
        m: usize,
        a: Vec<PiecewisePolynomial<T>>,
        f: impl IntoIterator<Item = (Vec<usize>, PiecewisePolynomial<T>)>,
        sup_bound: Option<f64>,
    ) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("kernel order must be at least 2, got {m}")));
        }
        let n = a.len();
        if n == 0 {
            return Err(Error::InvalidArgument("kernel needs at least one a-function".into()));
        }
        let mut map = BTreeMap::new();
        for (mut idx, fun) in f {
            if idx.len() != m {
                return Err(Error::OrderMismatch { expected: m, found: idx.len() });
            }
            if let Some(&i) = idx.iter().find(|&&i| i == 0 || i > n) {
                return Err(Error::IndexOutOfRange { index: i, dim: n });
            }
            idx.sort_unstable();
            if let Some(old) = map.get(&idx) {
                if *old != fun {
                    return Err(Error::Format(format!("conflicting definitions of f{idx:?}")));
                }
            }
            map.insert(idx, fun);
        }
        let observed = map.values().map(|f| f.sup_on_grid(SUP_SAMPLES)).fold(0.0, f64::max);
        let sup_bound = sup_bound.unwrap_or(observed);
        if observed > sup_bound * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "component sup {observed} exceeds the bound {sup_bound}"
            )));
        }
        Ok(Self { m, a, f: map, sup_bound, tail_allowance: 0.0, builtin: None })
    }

    /// Step-function kernel whose hypermatrix sends each row wholly to its
    /// largest index.
    pub fn ex3(m: usize, truncation: usize) -> Result<Self> {
        let a = (1..=truncation).map(ex3_a).collect::<Result<Vec<_>>>()?;
        let f = sorted_multi_indices(m, truncation)
            .into_iter()
            .map(|idx| ex3_component(&idx).map(|f| (idx, f)))
            .collect::<Result<Vec<_>>>()?;
        let mut k = Self::new(m, a, f, Some(1.0))?;
        k.builtin = Some(Builtin::Ex3);
        Ok(k)
    }

    /// Monomial/tent kernel. Truncating `Σ_n Ɍ(x)_n` drops a nonnegative
    /// tail, so membership is tightened to `Σ ≤ 1 - 2^{-N}`.
    pub fn ex1(m: usize, truncation: usize, normalize: bool) -> Result<Self> {
        let a = (1..=truncation).map(ex1_a).collect::<Result<Vec<_>>>()?;
        let f = sorted_multi_indices(m, truncation)
            .into_iter()
            .map(|idx| build_example_one(m, &idx, normalize).map(|f| (idx, f)))
            .collect::<Result<Vec<_>>>()?;
        let mut k = Self::new(m, a, f, Some(2.0))?;
        k.builtin = Some(Builtin::Ex1 { normalize });
        k.tail_allowance = -pow2_signed::<f64>(-(truncation as i32));
        Ok(k)
    }

    pub fn with_tail_allowance(mut self, allowance: f64) -> Self {
        self.tail_allowance = allowance;
        self
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn truncation(&self) -> usize {
        self.a.len()
    }

    pub fn a_functions(&self) -> &[PiecewisePolynomial<T>] {
        &self.a
    }

    pub fn f_functions(&self) -> &BTreeMap<Vec<usize>, PiecewisePolynomial<T>> {
        &self.f
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn tail_allowance(&self) -> f64 {
        self.tail_allowance
    }

    pub fn builtin(&self) -> Option<Builtin> {
        self.builtin
    }

    /// `f_idx` in any index order; zero when absent.
    pub fn component(&self, idx: &[usize]) -> PiecewisePolynomial<T> {
        let mut key = idx.to_vec();
        key.sort_unstable();
        self.f.get(&key).cloned().unwrap_or_else(PiecewisePolynomial::zero)
    }

    /// Converts every coefficient to `f64`.
    pub fn to_f64(&self) -> KernelSeries<f64> {
        KernelSeries {
            m: self.m,
            a: self.a.iter().map(PiecewisePolynomial::to_f64).collect(),
            f: self.f.iter().map(|(k, v)| (k.clone(), v.to_f64())).collect(),
            sup_bound: self.sup_bound,
            tail_allowance: self.tail_allowance,
            builtin: self.builtin,
        }
    }

    /// `P_{idx,k} = ∫ a_k f_idx` by exact piecewise integration, with the
    /// stochasticity audit of the result.
    pub fn compute_hypermatrix(&self) -> Result<(StochasticHypermatrix<T>, AuditReport<T>)> {
        self.compute_hypermatrix_with(crate::tolerance::ROW_TOL)
    }

    pub fn compute_hypermatrix_with(&self, row_tol: f64) -> Result<(StochasticHypermatrix<T>, AuditReport<T>)> {
        let mut p = StochasticHypermatrix::new(self.m, self.truncation())?;
        for (idx, f) in &self.f {
            for (k, a) in self.a.iter().enumerate() {
                let v = a.integrate_product(f)?;
                p.set(idx, k + 1, v)?;
            }
        }
        let audit = p.validate_stochastic_with(row_tol);
        Ok((p, audit))
    }

    /// `Ɍ(x)_k = ∫ a_k x` for `k = 1..=N`.
    pub fn moment_map(&self, x: &PiecewisePolynomial<T>) -> Result<Vec<T>> {
        self.a.iter().map(|a| a.integrate_product(x)).collect()
    }

    #[allow(non_snake_case)]
    pub fn membership_in_D(&self, x: &PiecewisePolynomial<T>) -> Result<Membership> {
        let moments: Vec<f64> = self.moment_map(x)?.iter().map(Scalar::approx).collect();
        Ok(Membership::from_moments(moments, 1.0 + self.tail_allowance))
    }

    /// `A x = Σ_idx mult(idx) ∏ Ɍ(x)_{i} f_idx`, as an exact finite sum.
    #[allow(non_snake_case)]
    pub fn apply_A(&self, x: &PiecewisePolynomial<T>) -> Result<PiecewisePolynomial<T>> {
        let membership = self.membership_in_D(x)?;
        if !membership.member {
            return Err(Error::NotInDomain(membership.reason()));
        }
        let moments = self.moment_map(x)?;
        Ok(self.combine(&moments))
    }

    /// `Σ_idx mult(idx) ∏ c_i f_idx` for arbitrary coefficients `c`.
    pub fn combine(&self, c: &[T]) -> PiecewisePolynomial<T> {
        let terms: Vec<(T, &PiecewisePolynomial<T>)> = self
            .f
            .iter()
            .filter_map(|(idx, f)| {
                let w = idx.iter().fold(T::from_u64(multiplicity(idx)).unwrap(), |acc, &i| {
                    acc * c[i - 1].clone()
                });
                (!w.is_zero()).then_some((w, f))
            })
            .collect();
        PiecewisePolynomial::linear_combination(terms)
    }
}

/// Truncated moment constraints `Ɍ(x)_k ≥ 0` and `Σ_k Ɍ(x)_k ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub moments: Vec<f64>,
    pub total: f64,
    pub bound: f64,
    /// Outputs with a negative moment.
    pub negative: Vec<usize>,
}

impl Membership {
    fn from_moments(moments: Vec<f64>, bound: f64) -> Self {
        let negative: Vec<usize> =
            (1..=moments.len()).filter(|&k| moments[k - 1] < -ZERO_TOL).collect();
        let total: f64 = moments.iter().sum();
        let member = negative.is_empty() && total <= bound + MASS_TOL;
        Self { member, moments, total, bound, negative }
    }

    pub fn reason(&self) -> String {
        if let Some(&k) = self.negative.first() {
            format!("moment {k} is {}", self.moments[k - 1])
        } else if !self.member {
            format!("moment sum {} exceeds {}", self.total, self.bound)
        } else {
            "member".into()
        }
    }
}

/// An element of `D′`: `r Σ_k w_k f_{j_k..j_k}`, or a raw function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub enum MomentFunction<T> {
    Basis { r: T, weights: Vec<T>, witness: Vec<usize> },
    Raw { raw: PiecewisePolynomial<T> },
}

impl<T: Scalar> MomentFunction<T> {
    pub fn validate(&self) -> Result<()> {
        let MomentFunction::Basis { r, weights, witness } = self else { return Ok(()) };
        let tol = T::lit(MASS_TOL);
        if *r < T::zero() - tol.clone() || *r > T::one() + tol.clone() {
            return Err(Error::InvalidArgument(format!("scale r = {} outside [0, 1]", r.approx())));
        }
        if weights.len() != witness.len() {
            return Err(Error::DimensionMismatch { expected: witness.len(), found: weights.len() });
        }
        if weights.iter().any(|w| *w < T::zero() - T::lit(ZERO_TOL)) {
            return Err(Error::InvalidArgument("negative weight".into()));
        }
        let total = weights.iter().fold(T::zero(), |acc, w| acc + w.clone());
        if (total.clone() - T::one()).magnitude() > tol {
            return Err(Error::InvalidArgument(format!("weights sum to {}", total.approx())));
        }
        Ok(())
    }
}

/// The basis `f_{j_k..j_k}` of `D′` for a witness sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct DPrimeBasis<T> {
    pub witness: Vec<usize>,
    pub functions: Vec<PiecewisePolynomial<T>>,
    /// `max_k ‖Ɍ(f_{j_k..j_k}) - e_k‖₁`; zero when `Ɍ` maps the basis onto
    /// the vertices.
    pub frame_defect: f64,
}

#[allow(non_snake_case)]
pub fn build_D_prime<T: Scalar>(
    kernel: &KernelSeries<T>,
    cert: &SurjectivityCertificate,
) -> Result<DPrimeBasis<T>> {
    let Some(witness) = cert.sequence().filter(|_| cert.is_surjective()) else {
        return Err(Error::Certificate(format!("verdict is {:?}, no witness", cert.verdict)));
    };
    let n = kernel.truncation();
    if let Some(&j) = witness.iter().find(|&&j| j == 0 || j > n) {
        return Err(Error::IndexOutOfRange { index: j, dim: n });
    }
    let functions: Vec<_> = witness.iter().map(|&j| kernel.component(&vec![j; kernel.order()])).collect();
    let mut frame_defect = 0.0f64;
    for (k, f) in functions.iter().enumerate() {
        let moments = kernel.moment_map(f)?;
        let d: f64 = moments
            .iter()
            .enumerate()
            .map(|(n, v)| (v.approx() - if n == k { 1.0 } else { 0.0 }).abs())
            .sum();
        frame_defect = frame_defect.max(d);
    }
    Ok(DPrimeBasis { witness: witness.to_vec(), functions, frame_defect })
}

impl<T: Scalar> DPrimeBasis<T> {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn is_moment_frame(&self) -> bool {
        self.frame_defect <= MASS_TOL
    }

    /// `Σ_k c_k f_{j_k..j_k}`.
    pub fn function(&self, c: &[T]) -> PiecewisePolynomial<T> {
        PiecewisePolynomial::linear_combination(c.iter().cloned().zip(&self.functions))
    }

    /// `(r, w)` from coordinates `c = r w`; the zero vector gets uniform
    /// weights.
    pub fn split(&self, c: &[T]) -> (T, Vec<T>) {
        let r = c.iter().fold(T::zero(), |acc, v| acc + v.clone());
        let weights = if r.is_zero() {
            let n = T::from_usize(c.len()).unwrap();
            vec![T::one() / n; c.len()]
        } else {
            c.iter().map(|v| v.clone() / r.clone()).collect()
        };
        (r, weights)
    }

    pub fn moment_function(&self, c: &[T]) -> MomentFunction<T> {
        let (r, weights) = self.split(c);
        MomentFunction::Basis { r, weights, witness: self.witness.clone() }
    }

    pub fn realize(&self, phi: &MomentFunction<T>) -> Result<PiecewisePolynomial<T>> {
        phi.validate()?;
        match phi {
            MomentFunction::Raw { raw } => Ok(raw.clone()),
            MomentFunction::Basis { r, weights, witness } => {
                if *witness != self.witness {
                    return Err(Error::Certificate(format!(
                        "function uses witness {witness:?}, the kernel certifies {:?}",
                        self.witness
                    )));
                }
                let c: Vec<T> = weights.iter().map(|w| w.clone() * r.clone()).collect();
                Ok(self.function(&c))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct IntegralSolution<T> {
    pub x: MomentFunction<T>,
    pub function: PiecewisePolynomial<T>,
    /// `Ɍ(φ)`.
    pub target: Vec<T>,
    /// `‖Ɍ(A x) - Ɍ(φ)‖₁`.
    pub residual: f64,
    pub preimage: Preimage<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct LiftedFixedPoint<T> {
    pub point: SimplexVector<T>,
    pub function: MomentFunction<T>,
    /// `‖Ɍ(A x) - Ɍ(x)‖₁`.
    pub residual: f64,
    pub verified: bool,
}

/// A kernel together with its hypermatrix, PSO, certificate and `D′` basis.
#[derive(Debug, Clone)]
pub struct IntegralSystem<T> {
    kernel: KernelSeries<T>,
    pso: Pso<T>,
    certificate: SurjectivityCertificate,
    basis: DPrimeBasis<T>,
}

impl<T: Real> IntegralSystem<T> {
    pub fn new(kernel: KernelSeries<T>) -> Result<Self> {
        let (matrix, audit) = kernel.compute_hypermatrix()?;
        if !audit.is_clean() {
            return Err(audit.into_error());
        }
        let pso = Pso::new(matrix)?;
        let certificate = pso.surjectivity_certificate();
        let basis = build_D_prime(&kernel, &certificate)?;
        if !basis.is_moment_frame() {
            return Err(Error::Certificate(format!(
                "moment map does not send the basis to the vertices (defect {:e})",
                basis.frame_defect
            )));
        }
        Ok(Self { kernel, pso, certificate, basis })
    }

    pub fn kernel(&self) -> &KernelSeries<T> {
        &self.kernel
    }

    pub fn pso(&self) -> &Pso<T> {
        &self.pso
    }

    pub fn certificate(&self) -> &SurjectivityCertificate {
        &self.certificate
    }

    pub fn basis(&self) -> &DPrimeBasis<T> {
        &self.basis
    }

    /// Basis coordinates of a ball point, which must vanish past the basis.
    fn coordinates(&self, x: &SimplexVector<T>) -> Result<Vec<T>> {
        let k = self.basis.len();
        if let Some(n) = (k + 1..=x.dim()).find(|&n| x.coord(n) > T::lit(ZERO_TOL)) {
            return Err(Error::Certificate(format!(
                "coordinate {n} lies outside the span of the {k} basis functions"
            )));
        }
        Ok(x.coords()[..k].to_vec())
    }

    fn moment_residual(&self, f: &PiecewisePolynomial<T>, target: &[T]) -> Result<f64> {
        let image = self.kernel.apply_A(f)?;
        let moments = self.kernel.moment_map(&image)?;
        Ok(moments.iter().zip(target).map(|(a, b)| (*a - *b).abs().approx()).sum())
    }

    /// Solves `A x = φ` for `φ ∈ D′`.
    pub fn solve_integral_equation(&self, phi: &MomentFunction<T>, cfg: &SolverConfig) -> Result<IntegralSolution<T>> {
        let target_fn = self.basis.realize(phi)?;
        let target = self.kernel.moment_map(&target_fn)?;
        if let MomentFunction::Raw { raw } = phi {
            let membership = self.kernel.membership_in_D(raw)?;
            if !membership.member {
                return Err(Error::NotInDomain(membership.reason()));
            }
            let span = self.basis.function(&target[..self.basis.len()]);
            let gap = raw.add(&span.scale(&-T::one())).sup_on_grid(SUP_SAMPLES);
            if gap > MASS_TOL {
                return Err(Error::NotInDomain(format!(
                    "function differs from its basis projection by {gap:e}"
                )));
            }
        }
        let y = SimplexVector::new(target.clone())?;
        let preimage = self.pso.ball_preimage_with_certificate(&y, &self.certificate, cfg)?;
        let c = self.coordinates(&preimage.x)?;
        let function = self.basis.function(&c);
        let residual = self.moment_residual(&function, &target)?;
        if residual > cfg.solve_tol {
            return Err(Error::NonConvergence { iterations: preimage.iterations, residual });
        }
        Ok(IntegralSolution { x: self.basis.moment_function(&c), function, target, residual, preimage })
    }

    /// Carries every fixed point of `V` to a fixed function of `A`.
    pub fn lift_fixed_points(&self, cfg: &FixedPointConfig) -> Result<Vec<LiftedFixedPoint<T>>> {
        self.pso
            .fixed_points(cfg)
            .into_iter()
            .map(|point| {
                let c = self.coordinates(&point)?;
                let f = self.basis.function(&c);
                let own = self.kernel.moment_map(&f)?;
                let residual = self.moment_residual(&f, &own)?;
                Ok(LiftedFixedPoint {
                    function: self.basis.moment_function(&c),
                    verified: residual <= cfg.fix_tol,
                    residual,
                    point,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pso::Verdict;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn ex3_entries_exact() {
        let k = KernelSeries::<Q>::ex3(3, 4).unwrap();
        let (p, audit) = k.compute_hypermatrix().unwrap();
        assert!(audit.is_clean());
        assert_eq!(p.get(&[1, 2, 3], 3).unwrap(), ratio(1, 1));
        assert_eq!(p.get(&[1, 2, 3], 4).unwrap(), ratio(0, 1));
        assert_eq!(p.get(&[1, 1, 1], 1).unwrap(), ratio(1, 1));
        assert_eq!(p.nnz(), sorted_multi_indices(3, 4).len());
    }

    #[test]
    fn moments_and_membership() {
        let k = KernelSeries::<Q>::ex3(3, 4).unwrap();
        let f111 = k.component(&[1, 1, 1]);
        let e = |i: usize| (1..=4).map(|n| ratio((n == i) as i64, 1)).collect::<Vec<_>>();
        assert_eq!(k.moment_map(&f111).unwrap(), e(1));
        assert_eq!(k.moment_map(&k.component(&[2, 2, 2])).unwrap(), e(2));
        assert_eq!(k.moment_map(&PiecewisePolynomial::zero()).unwrap(), vec![ratio(0, 1); 4]);
        assert!(k.membership_in_D(&f111).unwrap().member);
        assert!(k.membership_in_D(&PiecewisePolynomial::constant(ratio(5, 1))).unwrap().member);
        let neg = k.membership_in_D(&f111.scale(&ratio(-1, 1))).unwrap();
        assert!(!neg.member);
        assert_eq!(neg.negative, vec![1]);
    }

    #[test]
    fn apply_a_examples() {
        let k = KernelSeries::<Q>::ex3(3, 4).unwrap();
        let f111 = k.component(&[1, 1, 1]);
        assert_eq!(k.apply_A(&f111).unwrap(), f111);
        assert!(k.apply_A(&PiecewisePolynomial::constant(ratio(1, 3))).unwrap().is_zero());
        let half = k.component(&[1, 1, 1]).add(&k.component(&[2, 2, 2])).scale(&ratio(1, 2));
        let image = k.apply_A(&half).unwrap();
        assert_eq!(
            k.moment_map(&image).unwrap(),
            vec![ratio(1, 8), ratio(7, 8), ratio(0, 1), ratio(0, 1)]
        );
        assert!(matches!(k.apply_A(&f111.scale(&ratio(-1, 1))), Err(Error::NotInDomain(_))));
    }

    #[test]
    fn d_prime_basis() {
        let k = KernelSeries::<f64>::ex3(3, 4).unwrap();
        let sys = IntegralSystem::new(k.clone()).unwrap();
        assert_eq!(sys.basis().witness, vec![1, 2, 3, 4]);
        assert_eq!(sys.basis().functions[2], k.component(&[3, 3, 3]));
        assert_eq!(sys.basis().frame_defect, 0.0);

        let mut cert = sys.certificate().clone();
        cert.witness.sequence = Some(vec![2, 3, 4]);
        let shifted = build_D_prime(&k, &cert).unwrap();
        assert_eq!(shifted.functions[0], k.component(&[2, 2, 2]));
        assert!(!shifted.is_moment_frame());

        cert.verdict = Verdict::Inconclusive;
        assert!(matches!(build_D_prime(&k, &cert), Err(Error::Certificate(_))));
    }

    #[test]
    fn solve_examples() {
        let sys = IntegralSystem::new(KernelSeries::<f64>::ex3(3, 4).unwrap()).unwrap();
        let cfg = SolverConfig::default();
        let f111 = sys.kernel().component(&[1, 1, 1]);
        let s = sys.solve_integral_equation(&MomentFunction::Raw { raw: f111.clone() }, &cfg).unwrap();
        assert_eq!(s.function, f111);

        let phi = MomentFunction::Basis { r: 1.0, weights: vec![0.125, 0.875, 0.0, 0.0], witness: vec![1, 2, 3, 4] };
        let s = sys.solve_integral_equation(&phi, &cfg).unwrap();
        let MomentFunction::Basis { r, weights, .. } = &s.x else { panic!() };
        assert!((r - 1.0).abs() < 1e-10);
        assert!((weights[0] - 0.5).abs() < 1e-10 && (weights[1] - 0.5).abs() < 1e-10);
        assert!(s.residual <= 1e-8);

        let zero = MomentFunction::Raw { raw: PiecewisePolynomial::zero() };
        assert!(sys.solve_integral_equation(&zero, &cfg).unwrap().function.is_zero());

        // constant functions have zero moments but lie outside D′
        let c = MomentFunction::Raw { raw: PiecewisePolynomial::constant(1.0) };
        assert!(matches!(sys.solve_integral_equation(&c, &cfg), Err(Error::NotInDomain(_))));
    }

    #[test]
    fn fixed_point_lift() {
        let sys = IntegralSystem::new(KernelSeries::<f64>::ex3(3, 4).unwrap()).unwrap();
        let lifted = sys.lift_fixed_points(&FixedPointConfig::default()).unwrap();
        assert_eq!(lifted.len(), 5);
        assert!(lifted.iter().all(|l| l.verified));
        assert_eq!(lifted[0].function, MomentFunction::Basis { r: 0.0, weights: vec![0.25; 4], witness: vec![1, 2, 3, 4] });
    }

    #[test]
    fn ex1_rows_fall_short() {
        let k = KernelSeries::<Q>::ex1(2, 3, false).unwrap();
        let (_, audit) = k.compute_hypermatrix().unwrap();
        assert_eq!(audit.violations.len(), 6);
        assert!(audit.violations.iter().all(|v| v.sum < ratio(1, 2)));
        assert!(IntegralSystem::new(k.to_f64()).is_err());
    }
}
