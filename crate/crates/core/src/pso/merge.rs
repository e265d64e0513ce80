//! Surjective operators that merge two vertices.
//!
//! Starting from a base operator `V̄` that fixes every vertex and preserves
//! orthogonality, the merged operator reads
//! `(V x)_1 = (V̄ x)_1 + (V̄ x)_2` and `(V x)_k = (V̄ x)_{k+1}` for `k > 1`.
//! It sends both `e_1` and `e_2` to `e_1`, so it does not preserve
//! orthogonality, yet it is onto: a target `y` lifts to
//! `y' = (0, y_1, y_2, ..)`, whose `V̄`-preimage has a zero first coordinate
//! and maps to `y` under `V`.
//!
//! On a truncation of size `N` the top output receives nothing, so the
//! merged operator covers the outputs `1..N-1`.

use std::collections::BTreeMap;

use super::{CertifyConfig, Preimage, PreimageMethod, Pso, SolverConfig, SurjectivityCertificate};
use crate::error::{Error, Result};
use crate::hypermatrix::StochasticHypermatrix;
use crate::scalar::Real;
use crate::simplex::SimplexVector;
use crate::tolerance::{MASS_TOL, ZERO_TOL};

#[derive(Debug, Clone)]
pub struct MergedPso<T> {
    base: Pso<T>,
    merged: Pso<T>,
}

impl<T: Real> MergedPso<T> {
    pub fn from_base(base: Pso<T>) -> Result<Self> {
        if base.dim() < 3 {
            return Err(Error::InvalidArgument("merge needs a truncation of at least 3".into()));
        }
        let report = base.check_op();
        if !report.is_op {
            return Err(Error::Precondition(
                "base operator must fix every vertex and preserve orthogonality".into(),
            ));
        }
        let mut matrix = StochasticHypermatrix::new(base.order(), base.dim())?;
        for (idx, row) in base.matrix().rows() {
            let mut merged: BTreeMap<usize, T> = BTreeMap::new();
            for (&k, &p) in row {
                let target = if k <= 2 { 1 } else { k - 1 };
                let e = merged.entry(target).or_insert_with(T::zero);
                *e = *e + p;
            }
            for (k, p) in merged {
                matrix.set(idx, k, p)?;
            }
        }
        let merged = Pso::new(matrix)?;
        Ok(Self { base, merged })
    }

    pub fn base(&self) -> &Pso<T> {
        &self.base
    }

    pub fn merged(&self) -> &Pso<T> {
        &self.merged
    }

    /// Outputs `1..=target_dim` are reachable on this truncation.
    pub fn target_dim(&self) -> usize {
        self.merged.dim() - 1
    }

    pub fn certify_config(&self) -> CertifyConfig {
        CertifyConfig { target_dim: Some(self.target_dim()), ..CertifyConfig::default() }
    }

    pub fn certificate(&self) -> SurjectivityCertificate {
        self.merged.surjectivity_certificate_with(&self.certify_config())
    }

    /// Preimage under the merged operator through the base operator.
    pub fn preimage_lift(&self, y: &SimplexVector<T>, cfg: &SolverConfig) -> Result<Preimage<T>> {
        let dim = self.merged.dim();
        if y.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: y.dim() });
        }
        if !y.is_on_sphere(T::one(), T::lit(MASS_TOL)) {
            return Err(Error::WrongMass { expected: 1.0, found: y.mass().approx() });
        }
        if y.coord(dim) > T::lit(ZERO_TOL) {
            return Err(Error::Precondition(format!(
                "target has mass at output {dim}, unreachable on this truncation"
            )));
        }
        let mut lifted = vec![T::zero(); dim];
        lifted[1..].copy_from_slice(&y.coords()[..dim - 1]);
        let lifted = SimplexVector::new(lifted)?;
        let inner = self.base.preimage_on_sphere(&lifted, cfg)?;
        if inner.x.coord(1) > T::lit(ZERO_TOL) {
            return Err(Error::Precondition("lifted preimage has a nonzero first coordinate".into()));
        }
        let residual = self
            .merged
            .apply(&inner.x)?
            .l1_distance(y)?
            .approx();
        if residual > cfg.solve_tol {
            return Err(Error::NonConvergence { iterations: inner.iterations, residual });
        }
        Ok(Preimage { residual, method: PreimageMethod::Lift, ..inner })
    }
}
