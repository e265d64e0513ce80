//! Piecewise polynomials on `[0, 1]` with dyadic breakpoints.
//!
//! Coefficients are stored in ascending powers of the global variable `t`.
//! Products and integrals are exact in the scalar type, so with
//! `BigRational` coefficients the whole quadrature pipeline is exact and
//! with `f64` it carries only rounding error.

mod dyadic;
pub mod examples;

pub use dyadic::Dyadic;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Degree guard for repeated products.
pub const MAX_DEGREE: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Repr<T>", into = "Repr<T>", bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct PiecewisePolynomial<T> {
    breaks: Vec<Dyadic>,
    pieces: Vec<Vec<T>>,
}

#[derive(Serialize, Deserialize)]
struct Repr<T> {
    breakpoints: Vec<Dyadic>,
    pieces: Vec<Vec<T>>,
}

impl<T: Scalar> TryFrom<Repr<T>> for PiecewisePolynomial<T> {
    type Error = Error;

    fn try_from(r: Repr<T>) -> Result<Self> {
        Self::from_pieces(r.breakpoints, r.pieces)
    }
}

impl<T: Scalar> From<PiecewisePolynomial<T>> for Repr<T> {
    fn from(p: PiecewisePolynomial<T>) -> Self {
        Repr { breakpoints: p.breaks, pieces: p.pieces }
    }
}

fn trim<T: Scalar>(mut c: Vec<T>) -> Vec<T> {
    while c.last().is_some_and(|v| v.is_zero()) {
        c.pop();
    }
    c
}

fn horner<T: Scalar>(c: &[T], t: &T) -> T {
    c.iter().rev().fold(T::zero(), |acc, v| acc * t.clone() + v.clone())
}

/// Coefficient product whose result is bitwise independent of operand
/// order: each `c_k` sums the symmetric pairs `a_i b_{k-i} + a_{k-i} b_i`.
fn poly_mul<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len().max(b.len());
    let at = |v: &[T], i: usize| v.get(i).cloned().unwrap_or_else(T::zero);
    let mut out = Vec::with_capacity(a.len() + b.len() - 1);
    for k in 0..a.len() + b.len() - 1 {
        let mut acc = T::zero();
        let lo = k.saturating_sub(len - 1);
        let mut i = lo;
        while 2 * i <= k {
            let j = k - i;
            let term = if i == j {
                at(a, i) * at(b, i)
            } else {
                at(a, i) * at(b, j) + at(a, j) * at(b, i)
            };
            acc = acc + term;
            i += 1;
        }
        out.push(acc);
    }
    trim(out)
}

fn poly_add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let len = a.len().max(b.len());
    let at = |v: &[T], i: usize| v.get(i).cloned().unwrap_or_else(T::zero);
    trim((0..len).map(|i| at(a, i) + at(b, i)).collect())
}

/// `∫_a^b Σ c_j t^j dt`.
fn poly_integral<T: Scalar>(c: &[T], a: &T, b: &T) -> T {
    let mut pa = a.clone();
    let mut pb = b.clone();
    let mut acc = T::zero();
    for (j, cj) in c.iter().enumerate() {
        let denom = T::from_usize(j + 1).expect("small integer");
        acc = acc + cj.clone() * (pb.clone() - pa.clone()) / denom;
        pa = pa * a.clone();
        pb = pb * b.clone();
    }
    acc
}

impl<T: Scalar> PiecewisePolynomial<T> {
    pub fn from_pieces(breaks: Vec<Dyadic>, pieces: Vec<Vec<T>>) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(Error::Breakpoints("need at least two breakpoints".into()));
        }
        if breaks[0] != Dyadic::ZERO || *breaks.last().unwrap() != Dyadic::ONE {
            return Err(Error::Breakpoints("breakpoints must run from 0 to 1".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Breakpoints("breakpoints must be strictly increasing".into()));
        }
        if pieces.len() + 1 != breaks.len() {
            return Err(Error::Breakpoints(format!(
                "{} breakpoints need {} pieces, got {}",
                breaks.len(),
                breaks.len() - 1,
                pieces.len()
            )));
        }
        let pieces: Vec<Vec<T>> = pieces.into_iter().map(trim).collect();
        if let Some(p) = pieces.iter().find(|p| p.len() > MAX_DEGREE + 1) {
            return Err(Error::DegreeOverflow { degree: p.len() - 1, max: MAX_DEGREE });
        }
        Ok(Self { breaks, pieces })
    }

    pub fn polynomial(coeffs: Vec<T>) -> Result<Self> {
        Self::from_pieces(vec![Dyadic::ZERO, Dyadic::ONE], vec![coeffs])
    }

    pub fn constant(c: T) -> Self {
        Self::polynomial(vec![c]).expect("degree 0")
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// Piecewise constant function taking `values[i]` on piece `i`.
    pub fn step(breaks: Vec<Dyadic>, values: Vec<T>) -> Result<Self> {
        Self::from_pieces(breaks, values.into_iter().map(|v| vec![v]).collect())
    }

    pub fn breakpoints(&self) -> &[Dyadic] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Vec<T>] {
        &self.pieces
    }

    /// Degree of the highest piece; the zero function has degree 0.
    pub fn degree(&self) -> usize {
        self.pieces.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.is_empty())
    }

    fn piece_index(&self, t: &T) -> usize {
        // Right-piece convention: breakpoint values come from the piece
        // starting there; t = 1 belongs to the last piece.
        let n = self.pieces.len();
        (1..n).take_while(|&i| self.breaks[i].to_scalar::<T>() <= *t).last().unwrap_or(0)
    }

    pub fn evaluate(&self, t: &T) -> Result<T> {
        if *t < T::zero() || *t > T::one() {
            return Err(Error::OutsideDomain(t.approx()));
        }
        Ok(horner(&self.pieces[self.piece_index(t)], t))
    }

    /// Lossy conversion of the coefficients.
    pub fn to_f64(&self) -> PiecewisePolynomial<f64> {
        self.map_coeffs(|c| c.approx())
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PiecewisePolynomial<U> {
        PiecewisePolynomial {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(|p| trim(p.iter().map(&f).collect())).collect(),
        }
    }

    /// Coefficients on a finer partition containing every own breakpoint.
    fn refined(&self, breaks: &[Dyadic]) -> Vec<&[T]> {
        let mut j = 0;
        breaks[..breaks.len() - 1]
            .iter()
            .map(|b| {
                while self.breaks[j + 1] <= *b {
                    j += 1;
                }
                self.pieces[j].as_slice()
            })
            .collect()
    }

    fn merged_breaks(&self, other: &Self) -> Vec<Dyadic> {
        let mut b: Vec<Dyadic> = self.breaks.iter().chain(&other.breaks).copied().collect();
        b.sort();
        b.dedup();
        b
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let breaks = self.merged_breaks(other);
        let pieces: Vec<Vec<T>> = self
            .refined(&breaks)
            .into_iter()
            .zip(other.refined(&breaks))
            .map(|(a, b)| {
                let degree = (a.len() + b.len()).saturating_sub(2);
                if !a.is_empty() && !b.is_empty() && degree > MAX_DEGREE {
                    return Err(Error::DegreeOverflow { degree, max: MAX_DEGREE });
                }
                Ok(poly_mul(a, b))
            })
            .collect::<Result<_>>()?;
        Ok(Self { breaks, pieces }.compact())
    }

    pub fn add(&self, other: &Self) -> Self {
        let breaks = self.merged_breaks(other);
        let pieces = self
            .refined(&breaks)
            .into_iter()
            .zip(other.refined(&breaks))
            .map(|(a, b)| poly_add(a, b))
            .collect();
        Self { breaks, pieces }.compact()
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map_coeffs(|v| v.clone() * c.clone()).compact()
    }

    /// `Σ c_i f_i`, summed left to right.
    pub fn linear_combination<'a>(terms: impl IntoIterator<Item = (T, &'a Self)>) -> Self {
        terms.into_iter().fold(Self::zero(), |acc, (c, f)| acc.add(&f.scale(&c)))
    }

    /// Merges neighbouring pieces carrying the same polynomial.
    fn compact(self) -> Self {
        let mut breaks = vec![self.breaks[0]];
        let mut pieces: Vec<Vec<T>> = Vec::with_capacity(self.pieces.len());
        for (i, p) in self.pieces.into_iter().enumerate() {
            if pieces.last() == Some(&p) {
                *breaks.last_mut().unwrap() = self.breaks[i + 1];
            } else {
                pieces.push(p);
                breaks.push(self.breaks[i + 1]);
            }
        }
        Self { breaks, pieces }
    }

    /// Exact integral over `[0, 1]`.
    pub fn integrate(&self) -> T {
        self.pieces
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, p)| {
                let a = self.breaks[i].to_scalar::<T>();
                let b = self.breaks[i + 1].to_scalar::<T>();
                acc + poly_integral(p, &a, &b)
            })
    }

    /// `∫ f g`.
    pub fn integrate_product(&self, other: &Self) -> Result<T> {
        Ok(self.multiply(other)?.integrate())
    }

    /// Largest `|f|` over `samples + 1` equispaced points of every piece,
    /// endpoints taken as one-sided limits.
    pub fn sup_on_grid(&self, samples: usize) -> f64 {
        let samples = samples.max(1);
        let mut worst = 0.0f64;
        for (i, p) in self.pieces.iter().enumerate() {
            let a = self.breaks[i].to_f64();
            let b = self.breaks[i + 1].to_f64();
            let c: Vec<f64> = p.iter().map(|v| v.approx()).collect();
            for s in 0..=samples {
                let t = a + (b - a) * s as f64 / samples as f64;
                worst = worst.max(horner(&c, &t).abs());
            }
        }
        worst
    }
}

impl PiecewisePolynomial<f64> {
    pub fn at(&self, t: f64) -> Result<f64> {
        self.evaluate(&t)
    }
}
