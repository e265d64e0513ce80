//! Truncated simplex, sphere and ball vectors.
//!
//! A [`SimplexVector`] of dimension `N` stands for an infinite nonnegative
//! sequence whose coordinates beyond `N` are exactly zero. Indices in the
//! public API are 1-based, matching the index sets the operators act on.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tolerance::{MASS_TOL, ZERO_TOL};

/// Nonnegative, finitely supported sequence with mass at most one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct SimplexVector<T> {
    dim: usize,
    coords: Vec<T>,
}

impl<T: Scalar> SimplexVector<T> {
    /// Validates nonnegativity and ball membership. Coordinates in
    /// `[-ZERO_TOL, 0)` are rounding noise and are clamped to zero.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("vector dimension must be positive".into()));
        }
        let zero_tol = T::lit(ZERO_TOL);
        let mut coords = coords;
        for (i, c) in coords.iter_mut().enumerate() {
            if *c < T::zero() {
                if c.magnitude() > zero_tol {
                    return Err(Error::NegativeCoordinate { index: i + 1, value: c.approx() });
                }
                *c = T::zero();
            }
        }
        let v = Self { dim: coords.len(), coords };
        let mass = v.mass();
        if mass > T::one() + T::lit(MASS_TOL) {
            return Err(Error::MassExceedsOne { mass: mass.approx() });
        }
        Ok(v)
    }

    /// The zero vector, the unique element of `S_0`.
    pub fn zero(dim: usize) -> Self {
        Self { dim, coords: vec![T::zero(); dim] }
    }

    /// The vertex `e_i`.
    pub fn basis(i: usize, dim: usize) -> Result<Self> {
        if i == 0 || i > dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        let mut coords = vec![T::zero(); dim];
        coords[i - 1] = T::one();
        Ok(Self { dim, coords })
    }

    pub(crate) fn from_raw(coords: Vec<T>) -> Self {
        Self { dim: coords.len(), coords }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    /// Coordinate `x_i`, 1-based. Indices past the truncation read as zero.
    pub fn coord(&self, i: usize) -> T {
        if i == 0 || i > self.dim {
            T::zero()
        } else {
            self.coords[i - 1].clone()
        }
    }

    pub fn mass(&self) -> T {
        self.coords.iter().fold(T::zero(), |acc, c| acc + c.clone())
    }

    /// True when the mass is within `tol` of `r`.
    pub fn is_on_sphere(&self, r: T, tol: T) -> bool {
        (self.mass() - r).magnitude() <= tol
    }

    pub fn support(&self) -> Face {
        self.support_with(T::lit(ZERO_TOL))
    }

    pub fn support_with(&self, zero_tol: T) -> Face {
        Face {
            indices: self
                .coords
                .iter()
                .enumerate()
                .filter(|(_, c)| c.magnitude() > zero_tol)
                .map(|(i, _)| i + 1)
                .collect(),
        }
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        self.check_dim(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    /// Disjoint supports.
    pub fn are_orthogonal(&self, other: &Self) -> Result<bool> {
        self.check_dim(other)?;
        let a = self.support();
        let b = other.support();
        Ok(a.indices.intersection(&b.indices).next().is_none())
    }

    /// `supp(x) = A` exactly, i.e. `x` lies in the relative interior of `Γ_A`.
    pub fn in_face_interior(&self, face: &Face) -> bool {
        self.support() == *face
    }

    /// Multiplies every coordinate by `factor`; fails if the result leaves the ball.
    pub fn radial_scale(&self, factor: T) -> Result<Self> {
        if factor <= T::zero() {
            return Err(Error::InvalidArgument("scale factor must be positive".into()));
        }
        let coords = self.coords.iter().map(|c| c.clone() * factor.clone()).collect();
        Self::new(coords)
    }

    pub fn l1_distance(&self, other: &Self) -> Result<T> {
        self.check_dim(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .fold(T::zero(), |acc, (a, b)| acc + (a.clone() - b.clone()).magnitude()))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }
}

impl SimplexVector<f64> {
    /// Uniform sample from the face `Γ_A` scaled to mass `r`.
    pub fn random_on_face<R: Rng + ?Sized>(rng: &mut R, face: &Face, dim: usize, r: f64) -> Self {
        let mut coords = vec![0.0; dim];
        let mut total = 0.0;
        for &i in face.indices() {
            // Exp(1) draws normalise to a flat Dirichlet sample.
            let u: f64 = rng.random::<f64>();
            let e = -(1.0 - u).ln();
            coords[i - 1] = e;
            total += e;
        }
        if total > 0.0 {
            for c in &mut coords {
                *c *= r / total;
            }
        }
        Self::from_raw(coords)
    }

    /// Uniform sample from the full truncated sphere `S_r`.
    pub fn random_on_sphere<R: Rng + ?Sized>(rng: &mut R, dim: usize, r: f64) -> Self {
        Self::random_on_face(rng, &Face::full(dim), dim, r)
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for SimplexVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Index set `A` of a face `Γ_A = conv{e_i : i ∈ A}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Face {
    indices: BTreeSet<usize>,
}

impl Face {
    /// A nonempty face of the `dim`-truncated simplex.
    pub fn new(indices: impl IntoIterator<Item = usize>, dim: usize) -> Result<Self> {
        let indices: BTreeSet<usize> = indices.into_iter().collect();
        if indices.is_empty() {
            return Err(Error::InvalidArgument("face index set must be nonempty".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > dim) {
            return Err(Error::IndexOutOfRange { index: bad, dim });
        }
        Ok(Self { indices })
    }

    pub fn full(dim: usize) -> Self {
        Self { indices: (1..=dim).collect() }
    }

    pub fn indices(&self) -> impl Iterator<Item = &usize> + '_ {
        self.indices.iter()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.indices.iter().copied().collect()
    }

    /// Uniform point of `Γ_A`.
    pub fn barycenter<T: Scalar>(&self, dim: usize) -> Result<SimplexVector<T>> {
        if self.is_empty() {
            return Err(Error::InvalidArgument("empty face has no barycenter".into()));
        }
        let w = T::one() / T::from_usize(self.len()).expect("face size");
        let mut coords = vec![T::zero(); dim];
        for &i in &self.indices {
            if i > dim {
                return Err(Error::IndexOutOfRange { index: i, dim });
            }
            coords[i - 1] = w.clone();
        }
        Ok(SimplexVector::from_raw(coords))
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.indices.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
