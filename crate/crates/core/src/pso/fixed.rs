//! Fixed points of a PSO in the ball.
//!
//! Since `mass(V x) = mass(x)^m`, a fixed point has mass 0 or 1, so apart
//! from the origin the search runs on the unit simplex: vertex scan, Newton
//! on every small face, then multistart damped iteration with Newton polish.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Pso;
use crate::linalg::solve_dense;
use crate::scalar::Real;
use crate::simplex::{Face, SimplexVector};
use crate::tolerance::{FIX_TOL, ONE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointConfig {
    pub fix_tol: f64,
    pub dedup_tol: f64,
    /// Faces up to this size are searched systematically.
    pub max_face_dim: usize,
    /// Random interior starts per face, in addition to the barycenter.
    pub starts_per_face: usize,
    /// Random starts on the whole simplex.
    pub multistarts: usize,
    pub damping: f64,
    pub iterate_steps: usize,
    pub newton_iters: usize,
    pub seed: u64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        Self {
            fix_tol: FIX_TOL,
            dedup_tol: 1e-7,
            max_face_dim: 3,
            starts_per_face: 2,
            multistarts: 16,
            damping: 0.5,
            iterate_steps: 2000,
            newton_iters: 50,
            seed: 42,
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=k).collect();
    if k == 0 || k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut pos = k;
        while pos > 0 && cur[pos - 1] == n - k + pos {
            pos -= 1;
        }
        if pos == 0 {
            return out;
        }
        cur[pos - 1] += 1;
        for i in pos..k {
            cur[i] = cur[i - 1] + 1;
        }
    }
}

impl<T: Real> Pso<T> {
    fn fixed_residual(&self, x: &[T]) -> T {
        self.apply_raw(x)
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (a, b)| acc + (*a - *b).abs())
    }

    /// Newton for `(V x - x)_face = 0` on the face coordinates.
    fn newton_fixed_on_face(&self, mut x: Vec<T>, face: &[usize], max_steps: usize) -> Vec<T> {
        let mut res = self.fixed_residual(&x);
        for _ in 0..max_steps {
            if res <= T::lit(1e-15) {
                break;
            }
            let vx = self.apply_raw(&x);
            let jac = self.jacobian_raw(&x);
            let a: Vec<Vec<T>> = face
                .iter()
                .map(|&k| {
                    face.iter()
                        .map(|&i| if i == k { jac[k - 1][i - 1] - T::one() } else { jac[k - 1][i - 1] })
                        .collect()
                })
                .collect();
            let rhs: Vec<T> = face.iter().map(|&k| x[k - 1] - vx[k - 1]).collect();
            let Some(delta) = solve_dense(a, rhs) else { break };
            let mut t = T::one();
            let mut improved = false;
            for _ in 0..30 {
                let mut cand = x.clone();
                for (pos, &i) in face.iter().enumerate() {
                    cand[i - 1] = cand[i - 1] + t * delta[pos];
                }
                let r = self.fixed_residual(&cand);
                if r < res {
                    x = cand;
                    res = r;
                    improved = true;
                    break;
                }
                t = t * T::lit(0.5);
            }
            if !improved {
                break;
            }
        }
        x
    }

    /// Distinct fixed points in the ball: the origin, every fixed vertex,
    /// and whatever the face and multistart searches confirm.
    pub fn fixed_points(&self, cfg: &FixedPointConfig) -> Vec<SimplexVector<T>> {
        let dim = self.dim();
        let tol = T::lit(cfg.fix_tol);
        let dedup = T::lit(cfg.dedup_tol);
        let mut found: Vec<SimplexVector<T>> = vec![SimplexVector::zero(dim)];
        let admit = |found: &mut Vec<SimplexVector<T>>, x: Vec<T>| {
            if self.fixed_residual(&x) > tol {
                return;
            }
            let Ok(x) = SimplexVector::new(x) else { return };
            if found.iter().all(|f| f.l1_distance(&x).expect("same dim") > dedup) {
                found.push(x);
            }
        };

        let one = T::lit(ONE_TOL);
        for i in 1..=dim {
            let p = self.matrix().diagonal(i, i).expect("in range");
            if (p - T::one()).abs() <= one {
                admit(&mut found, SimplexVector::basis(i, dim).expect("in range").into_coords());
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for size in 2..=cfg.max_face_dim.min(dim) {
            for face in combinations(dim, size) {
                let f = Face::new(face.iter().copied(), dim).expect("valid face");
                let mut starts = vec![f.barycenter::<T>(dim).expect("nonempty").into_coords()];
                for _ in 0..cfg.starts_per_face {
                    let p = SimplexVector::<f64>::random_on_face(&mut rng, &f, dim, 1.0);
                    starts.push(p.coords().iter().map(|&c| T::lit(c)).collect());
                }
                for start in starts {
                    let x = self.newton_fixed_on_face(start, &face, cfg.newton_iters);
                    admit(&mut found, x);
                }
            }
        }

        let lambda = T::lit(cfg.damping);
        for _ in 0..cfg.multistarts {
            let p = SimplexVector::<f64>::random_on_sphere(&mut rng, dim, 1.0);
            let mut x: Vec<T> = p.coords().iter().map(|&c| T::lit(c)).collect();
            for _ in 0..cfg.iterate_steps {
                let vx = self.apply_raw(&x);
                let step = vx.iter().zip(&x).fold(T::zero(), |acc, (a, b)| acc + (*a - *b).abs());
                x = x.iter().zip(&vx).map(|(a, b)| (T::one() - lambda) * *a + lambda * *b).collect();
                if step <= tol * T::lit(1e-3) {
                    break;
                }
            }
            let support: Vec<usize> = (1..=dim).filter(|&i| x[i - 1] > T::lit(1e-9)).collect();
            for i in 1..=dim {
                if !support.contains(&i) {
                    x[i - 1] = T::zero();
                }
            }
            let x = self.newton_fixed_on_face(x, &support, cfg.newton_iters);
            admit(&mut found, x);
        }
        found
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::max_pattern;
    use super::*;

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![1, 2, 3]]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn max_pattern_fixes_only_origin_and_vertices() {
        for (m, dim) in [(2, 2), (2, 4), (3, 5)] {
            let op = max_pattern(m, dim);
            let fixed = op.fixed_points(&FixedPointConfig::default());
            assert_eq!(fixed.len(), dim + 1, "m={m} dim={dim}: {fixed:?}");
            assert_eq!(fixed[0], SimplexVector::zero(dim));
            for (i, p) in fixed.iter().enumerate().skip(1) {
                assert_eq!(*p, SimplexVector::basis(i, dim).unwrap());
            }
        }
    }

    #[test]
    fn finds_interior_fixed_point() {
        // Uniform mixing V(x)_k = mass² / 2 has the fixed point (1/2, 1/2).
        use crate::hypermatrix::StochasticHypermatrix;
        let mut p = StochasticHypermatrix::new(2, 2).unwrap();
        for idx in [[1, 1], [1, 2], [2, 2]] {
            p.insert(&idx, 1, 0.5).unwrap();
            p.insert(&idx, 2, 0.5).unwrap();
        }
        let op = Pso::new(p).unwrap();
        let fixed = op.fixed_points(&FixedPointConfig::default());
        assert_eq!(fixed.len(), 2);
        assert!((fixed[1].coord(1) - 0.5_f64).abs() < 1e-12);
    }
}
