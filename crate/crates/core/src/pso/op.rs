//! Orthogonality preservation, face images and vertex preimages.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Pso;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::simplex::{Face, SimplexVector};
use crate::tolerance::{MASS_TOL, ZERO_TOL};

/// Stored entry `P_{idx,k}` with `k ∉ idx`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpViolation {
    pub idx: Vec<usize>,
    pub k: usize,
    pub value: f64,
}

/// Structural orthogonality-preservation verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpReport {
    /// `V(e_i) = e_i` for every `i` in the truncation.
    pub fixes_vertices: bool,
    /// Vertices with `V(e_i) ≠ e_i`.
    pub moved_vertices: Vec<usize>,
    /// `fixes_vertices` and no entry leaks to an output outside its inputs.
    pub is_op: bool,
    pub violations: Vec<OpViolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexPreimageReport {
    pub k: usize,
    pub support: Vec<usize>,
    /// Rows drawn from the support whose `k`-entry is not 1.
    pub row_violations: Vec<OpViolation>,
    /// Sampled `y` in the face with `V(y) ≠ e_k`.
    pub sample_failures: usize,
    pub samples: usize,
    pub consistent: bool,
}

impl<T: Real> Pso<T> {
    pub fn check_op(&self) -> OpReport {
        self.check_op_with(ZERO_TOL)
    }

    pub fn check_op_with(&self, tol: f64) -> OpReport {
        let t = T::lit(tol);
        let moved_vertices: Vec<usize> = (1..=self.dim())
            .filter(|&i| {
                let e = SimplexVector::basis(i, self.dim()).expect("in range");
                let img = self.apply(&e).expect("same dim");
                img.l1_distance(&e).expect("same dim") > t
            })
            .collect();
        let violations: Vec<OpViolation> = self
            .matrix()
            .entries()
            .filter(|(idx, k, v)| !idx.contains(k) && **v > t)
            .map(|(idx, k, v)| OpViolation { idx: idx.clone(), k, value: v.approx() })
            .collect();
        let fixes_vertices = moved_vertices.is_empty();
        OpReport { fixes_vertices, moved_vertices, is_op: fixes_vertices && violations.is_empty(), violations }
    }

    /// Whether `V x ⊥ V y` for an orthogonal pair of simplex points, tested
    /// as `V x ∘ V y ≤ ZERO_TOL`.
    pub fn check_op_pair(&self, x: &SimplexVector<T>, y: &SimplexVector<T>) -> Result<bool> {
        let tol = T::lit(MASS_TOL);
        for v in [x, y] {
            if !v.is_on_sphere(T::one(), tol) {
                return Err(Error::WrongMass { expected: 1.0, found: v.mass().approx() });
            }
        }
        if !x.are_orthogonal(y)? {
            return Err(Error::Precondition("inputs are not orthogonal".into()));
        }
        let vx = self.apply(x)?;
        let vy = self.apply(y)?;
        Ok(vx.dot(&vy)? <= T::lit(ZERO_TOL))
    }

    /// Largest `|(V x)_k - x_k 𝒜_k(x)|` over `k`.
    pub fn factorization_defect(&self, x: &SimplexVector<T>) -> Result<T> {
        let vx = self.apply(x)?;
        let mut worst = T::zero();
        for k in 1..=self.dim() {
            let f = x.coord(k) * self.a_k_factor(x, k)?;
            worst = worst.max((vx.coord(k) - f).abs());
        }
        Ok(worst)
    }

    /// Support of `V` at the barycenter of `Γ_A`. If `V` maps one interior
    /// point of `Γ_A` into `int Γ_B` it maps all of them there, so this is
    /// the face containing `V(int Γ_A)`.
    pub fn face_image(&self, face: &Face) -> Result<Face> {
        let center = face.barycenter::<T>(self.dim())?;
        Ok(self.apply(&center)?.support())
    }

    /// Cross-checks a known preimage `x` of `e_k`: every row drawn from
    /// `supp(x)` must send all of its mass to `k`, and every point of
    /// `Γ_{supp(x)}` must map to `e_k`.
    pub fn vertex_preimage_analysis(
        &self,
        x: &SimplexVector<T>,
        k: usize,
    ) -> Result<VertexPreimageReport> {
        let ek = SimplexVector::basis(k, self.dim())?;
        let tol = T::lit(MASS_TOL);
        let image = self.apply(x)?;
        let dist = image.l1_distance(&ek)?;
        if dist > tol {
            return Err(Error::Precondition(format!(
                "V(x) is not e_{k} (L1 distance {:e})",
                dist.approx()
            )));
        }
        let support = x.support();
        let indices = support.to_vec();
        let mut row_violations = Vec::new();
        for idx in crate::hypermatrix::sorted_multi_indices(self.order(), indices.len()) {
            let mapped: Vec<usize> = idx.iter().map(|&i| indices[i - 1]).collect();
            let p = self.matrix().get(&mapped, k)?;
            if (p - T::one()).abs() > tol {
                row_violations.push(OpViolation { idx: mapped, k, value: p.approx() });
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut points: Vec<SimplexVector<T>> = indices
            .iter()
            .map(|&i| SimplexVector::basis(i, self.dim()).expect("in range"))
            .collect();
        points.push(support.barycenter(self.dim())?);
        for _ in 0..16 {
            let p = SimplexVector::<f64>::random_on_face(&mut rng, &support, self.dim(), 1.0);
            points.push(SimplexVector::from_raw(
                p.coords().iter().map(|&c| T::lit(c)).collect(),
            ));
        }
        let sample_failures = points
            .iter()
            .filter(|y| {
                let img = self.apply(y).expect("same dim");
                img.l1_distance(&ek).expect("same dim") > tol
            })
            .count();
        Ok(VertexPreimageReport {
            k,
            support: indices,
            consistent: row_violations.is_empty() && sample_failures == 0,
            row_violations,
            sample_failures,
            samples: points.len(),
        })
    }
}
