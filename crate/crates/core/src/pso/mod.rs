//! Polynomial stochastic operators
//! `(V x)_k = Σ_{i_1..i_m} P_{i_1..i_m,k} x_{i_1} ⋯ x_{i_m}`.
//!
//! The ordered-tuple sum is evaluated over sorted rows weighted by their
//! multinomial multiplicity.

mod certificate;
mod fixed;
mod merge;
mod op;
mod solve;

pub use certificate::{
    CertificateScope, CertifyConfig, SurjectivityCertificate, Theorem, Verdict, Witness,
    WitnessFailure,
};
pub use fixed::FixedPointConfig;
pub use merge::MergedPso;
pub use op::{OpReport, OpViolation, VertexPreimageReport};
pub use solve::{Preimage, PreimageMethod, SolverConfig};

use crate::error::{Error, Result};
use crate::hypermatrix::{multiplicity, AuditReport, StochasticHypermatrix};
use crate::scalar::{powi, Real};
use crate::simplex::SimplexVector;
use crate::tolerance::ROW_TOL;

/// A PSO backed by a validated stochastic hypermatrix. Immutable after
/// construction.
#[derive(Debug, Clone)]
pub struct Pso<T> {
    matrix: StochasticHypermatrix<T>,
    // (sorted row, multiplicity as T)
    weights: Vec<(Vec<usize>, T)>,
}

impl<T: Real> Pso<T> {
    /// Validates stochasticity at the default row tolerance.
    pub fn new(matrix: StochasticHypermatrix<T>) -> Result<Self> {
        Self::with_row_tol(matrix, ROW_TOL)
    }

    pub fn with_row_tol(matrix: StochasticHypermatrix<T>, row_tol: f64) -> Result<Self> {
        let report = matrix.validate_stochastic_with(row_tol);
        if !report.is_clean() {
            return Err(report.into_error());
        }
        Ok(Self::from_validated(matrix))
    }

    /// Like [`new`](Self::new) but hands back the audit on failure.
    pub fn try_new(
        matrix: StochasticHypermatrix<T>,
        row_tol: f64,
    ) -> std::result::Result<Self, AuditReport<T>> {
        let report = matrix.validate_stochastic_with(row_tol);
        if report.is_clean() {
            Ok(Self::from_validated(matrix))
        } else {
            Err(report)
        }
    }

    fn from_validated(matrix: StochasticHypermatrix<T>) -> Self {
        let weights = matrix
            .rows()
            .map(|(idx, _)| (idx.clone(), T::from_u64(multiplicity(idx)).expect("multiplicity")))
            .collect();
        Self { matrix, weights }
    }

    pub fn matrix(&self) -> &StochasticHypermatrix<T> {
        &self.matrix
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    fn check_dim(&self, x: &SimplexVector<T>) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        Ok(())
    }

    /// Product `x_{i_1} ⋯ x_{i_m}` times the row multiplicity.
    fn row_weight(x: &[T], idx: &[usize], mult: T) -> T {
        idx.iter().fold(mult, |acc, &i| acc * x[i - 1])
    }

    /// `V(x)`. The result has mass `mass(x)^m`.
    pub fn apply(&self, x: &SimplexVector<T>) -> Result<SimplexVector<T>> {
        self.check_dim(x)?;
        Ok(SimplexVector::from_raw(self.apply_raw(x.coords())))
    }

    /// `V` on an arbitrary coordinate slice, without ball checks. Used by
    /// Newton iterates that may step slightly outside the simplex.
    pub(crate) fn apply_raw(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        for (idx, mult) in &self.weights {
            let w = Self::row_weight(x, idx, *mult);
            if w == T::zero() {
                continue;
            }
            for (k, p) in self.matrix.row(idx) {
                out[k - 1] = out[k - 1] + w * *p;
            }
        }
        out
    }

    /// Trajectory `x, V x, V² x, …` with `steps + 1` points.
    pub fn iterate(&self, x: &SimplexVector<T>, steps: usize) -> Result<Vec<SimplexVector<T>>> {
        self.check_dim(x)?;
        let mut out = Vec::with_capacity(steps + 1);
        out.push(x.clone());
        for _ in 0..steps {
            let next = self.apply(out.last().expect("nonempty"))?;
            out.push(next);
        }
        Ok(out)
    }

    /// The factor `𝒜_k(x)` with `(V x)_k = x_k 𝒜_k(x)` for an orthogonality
    /// preserving `V` fixing every vertex:
    ///
    /// `𝒜_k(x) = x_k^{m-1} + Σ_{j=1}^{m-1} C(m,j) x_k^{m-1-j} Σ_{i's ≠ k} P_{k..k i..,k} x_i ⋯`
    ///
    /// The inner ordered sum over the `j` indices different from `k` is
    /// evaluated as sorted rows times `C(m,j) · (orderings of the others)`,
    /// which is the row multiplicity.
    pub fn a_k_factor(&self, x: &SimplexVector<T>, k: usize) -> Result<T> {
        self.check_dim(x)?;
        if k == 0 || k > self.dim() {
            return Err(Error::IndexOutOfRange { index: k, dim: self.dim() });
        }
        Ok(self.a_k_raw(x.coords(), k))
    }

    pub(crate) fn a_k_raw(&self, x: &[T], k: usize) -> T {
        let m = self.order();
        let xk = x[k - 1];
        let mut total = powi(&xk, m - 1);
        for idx in self.matrix.rows_into(k) {
            let copies = idx.iter().filter(|&&i| i == k).count();
            if copies == 0 || copies == m {
                continue;
            }
            let p = *self.matrix.row(idx).find(|(kk, _)| *kk == k).expect("indexed").1;
            let mult = T::from_u64(multiplicity(idx)).expect("multiplicity");
            let others = idx
                .iter()
                .filter(|&&i| i != k)
                .fold(T::one(), |acc, &i| acc * x[i - 1]);
            total = total + mult * p * powi(&xk, copies - 1) * others;
        }
        total
    }

    /// Dense Jacobian `∂(V x)_k / ∂x_i`, row `k-1`, column `i-1`.
    pub fn jacobian(&self, x: &SimplexVector<T>) -> Result<Vec<Vec<T>>> {
        self.check_dim(x)?;
        Ok(self.jacobian_raw(x.coords()))
    }

    pub(crate) fn jacobian_raw(&self, x: &[T]) -> Vec<Vec<T>> {
        let n = self.dim();
        let mut jac = vec![vec![T::zero(); n]; n];
        for (idx, mult) in &self.weights {
            // d/dx_i of mult·∏x over the positions holding i.
            let mut distinct = idx.clone();
            distinct.dedup();
            for &i in &distinct {
                let copies = idx.iter().filter(|&&v| v == i).count();
                let mut d = *mult * T::from_usize(copies).expect("count");
                for &v in idx {
                    if v != i {
                        d = d * x[v - 1];
                    }
                }
                d = d * powi(&x[i - 1], copies - 1);
                if d == T::zero() {
                    continue;
                }
                for (k, p) in self.matrix.row(idx) {
                    jac[k - 1][i - 1] = jac[k - 1][i - 1] + d * *p;
                }
            }
        }
        jac
    }

    /// `I_k = { j : |P_{j..j,k} - 1| ≤ one_tol }`.
    pub fn diagonal_candidates(&self, k: usize, one_tol: f64) -> Vec<usize> {
        let tol = T::lit(one_tol);
        (1..=self.dim())
            .filter(|&j| {
                self.matrix
                    .diagonal(j, k)
                    .map(|p| (p - T::one()).abs() <= tol)
                    .unwrap_or(false)
            })
            .collect()
    }

    /// Reindexed operator `P̃_{i_1..i_m,k} = P_{α(i_1)..α(i_m),k}` with
    /// `α(n) = witness[n-1]`, restricted to outputs `1..=witness.len()`.
    pub(crate) fn reindexed(&self, witness: &[usize]) -> Result<Pso<T>> {
        let target = witness.len();
        let mut matrix = StochasticHypermatrix::new(self.order(), target)?;
        for idx in crate::hypermatrix::sorted_multi_indices(self.order(), target) {
            let mapped: Vec<usize> = idx.iter().map(|&i| witness[i - 1]).collect();
            for (k, p) in self.matrix.row(&mapped) {
                if k <= target {
                    matrix.set(&idx, k, *p)?;
                }
            }
        }
        Pso::new(matrix)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::hypermatrix::sorted_multi_indices;

    /// `P_{idx, max(idx)} = 1`: the row structure of the dyadic step kernel.
    pub(crate) fn max_pattern(m: usize, dim: usize) -> Pso<f64> {
        let mut p = StochasticHypermatrix::new(m, dim).unwrap();
        for idx in sorted_multi_indices(m, dim) {
            let k = *idx.last().unwrap();
            p.insert(&idx, k, 1.0).unwrap();
        }
        Pso::new(p).unwrap()
    }

    fn v(c: &[f64]) -> SimplexVector<f64> {
        SimplexVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn applies_to_vertices_and_zero() {
        let op = max_pattern(3, 6);
        let e1 = SimplexVector::basis(1, 6).unwrap();
        assert_eq!(op.apply(&e1).unwrap(), e1);
        let z = SimplexVector::zero(6);
        assert_eq!(op.apply(&z).unwrap(), z);
    }

    #[test]
    fn half_half_maps_to_eighth() {
        let op = max_pattern(3, 6);
        let y = op.apply(&v(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0])).unwrap();
        assert!((y.coords()[0] - 0.125).abs() < 1e-15);
        assert!((y.coords()[1] - 0.875).abs() < 1e-15);
        assert!(y.coords()[2..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let op = max_pattern(2, 3);
        assert!(op.apply(&v(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn iterate_follows_mass_law() {
        let op = max_pattern(2, 3);
        let traj = op.iterate(&v(&[0.25, 0.25, 0.0]), 3).unwrap();
        let masses: Vec<f64> = traj.iter().map(|x| x.mass()).collect();
        for (got, want) in masses.iter().zip([0.5, 0.25, 0.0625, 0.00390625]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(op.iterate(&v(&[0.25, 0.25, 0.0]), 0).unwrap().len(), 1);
        let e1 = SimplexVector::basis(1, 3).unwrap();
        assert!(op.iterate(&e1, 5).unwrap().iter().all(|x| *x == e1));
    }

    #[test]
    fn a_k_factorization() {
        let op = max_pattern(3, 6);
        let x = v(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        let a2 = op.a_k_factor(&x, 2).unwrap();
        assert!((a2 - 1.75).abs() < 1e-15);
        let e3 = SimplexVector::basis(3, 6).unwrap();
        assert_eq!(op.a_k_factor(&e3, 3).unwrap(), 1.0);
        assert!(op.a_k_factor(&x, 7).is_err());
        let y = op.apply(&x).unwrap();
        for k in 1..=6 {
            let fk = x.coord(k) * op.a_k_factor(&x, k).unwrap();
            assert!((fk - y.coord(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let op = max_pattern(3, 4);
        let x = [0.1, 0.2, 0.3, 0.4];
        let jac = op.jacobian_raw(&x);
        let h = 1e-6;
        for i in 0..4 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fp = op.apply_raw(&xp);
            let fm = op.apply_raw(&xm);
            for k in 0..4 {
                let fd = (fp[k] - fm[k]) / (2.0 * h);
                assert!((fd - jac[k][i]).abs() < 1e-8, "k={k} i={i}");
            }
        }
    }
}
