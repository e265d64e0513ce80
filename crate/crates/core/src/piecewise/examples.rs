//! Component functions of the two example kernels.
//!
//! `ex3`: dyadic Haar-like steps `a_k = 2^k` on `(0, 2^{-k-1})`, `-2^k` on
//! `(2^{-k-1}, 2^{-k})`, zero elsewhere, with `f_idx` the product of
//! `2^{-d} a_d` over the distinct values `d` of `idx`. For three indices this
//! is the three-case formula (all distinct, one repeat, all equal).
//!
//! `ex1`: monomials `a_n = 2^{1-n} t^{n-1}` and
//! `f_idx = (2 - t)/(2m) Σ_{j ∈ idx} b_j` with symmetric unit tents `b_n` of
//! height 1 on each dyadic interval of length `2^{1-n}`, so `∫ b_n = 1/2`.
//! With `normalize` every tent is doubled to unit integral.

use super::{Dyadic, PiecewisePolynomial};
use crate::error::{Error, Result};
use crate::scalar::{pow2, pow2_signed, Scalar};

/// Finest tent level; `b_n` has `2^n` pieces.
pub const MAX_TENT_LEVEL: usize = 20;

fn check_index(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        return Err(Error::InvalidArgument(format!("component index {k} outside 1..={max}")));
    }
    Ok(())
}

pub fn ex3_a<T: Scalar>(k: usize) -> Result<PiecewisePolynomial<T>> {
    check_index(k, super::dyadic::MAX_EXP as usize - 1)?;
    let k32 = k as u32;
    let h: T = pow2(k32);
    PiecewisePolynomial::step(
        vec![Dyadic::ZERO, Dyadic::new(1, k32 + 1), Dyadic::new(1, k32), Dyadic::ONE],
        vec![h.clone(), T::zero() - h, T::zero()],
    )
}

/// `f_idx` for any number of indices; order is irrelevant.
pub fn ex3_component<T: Scalar>(idx: &[usize]) -> Result<PiecewisePolynomial<T>> {
    if idx.is_empty() {
        return Err(Error::InvalidArgument("empty multi-index".into()));
    }
    let mut distinct = idx.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mut f = PiecewisePolynomial::constant(T::one());
    for &d in &distinct {
        let a = ex3_a::<T>(d)?.scale(&pow2_signed(-(d as i32)));
        f = f.multiply(&a)?;
    }
    Ok(f)
}

pub fn build_example_ex3<T: Scalar>(i1: usize, i2: usize, i3: usize) -> Result<PiecewisePolynomial<T>> {
    ex3_component(&[i1, i2, i3])
}

pub fn ex1_a<T: Scalar>(n: usize) -> Result<PiecewisePolynomial<T>> {
    check_index(n, super::MAX_DEGREE + 1)?;
    let mut c = vec![T::zero(); n];
    c[n - 1] = pow2_signed(1 - n as i32);
    PiecewisePolynomial::polynomial(c)
}

/// Tent `b_n`: rises with slope `2^n` from each `k/2^{n-1}` to height 1 at
/// `(2k+1)/2^n`, then falls back to 0 at `(k+1)/2^{n-1}`.
pub fn ex1_tent<T: Scalar>(n: usize, normalize: bool) -> Result<PiecewisePolynomial<T>> {
    check_index(n, MAX_TENT_LEVEL)?;
    let n32 = n as u32;
    let slope: T = pow2(n32);
    let height = if normalize { T::one() + T::one() } else { T::one() };
    let breaks: Vec<Dyadic> = (0..=(1i64 << n)).map(|k| Dyadic::new(k, n32)).collect();
    let pieces = (0..(1i64 << n))
        .map(|p| {
            // rise on even p: 2^n t - p; fall on odd p: (p + 1) - 2^n t
            let (c0, c1) = if p % 2 == 0 {
                (T::zero() - T::from_i64(p).unwrap(), slope.clone())
            } else {
                (T::from_i64(p + 1).unwrap(), T::zero() - slope.clone())
            };
            vec![c0 * height.clone(), c1 * height.clone()]
        })
        .collect();
    PiecewisePolynomial::from_pieces(breaks, pieces)
}

/// `(2 - t)/(2m) Σ_{j ∈ indices} b_j`, repeated indices counted with
/// multiplicity.
pub fn build_example_one<T: Scalar>(m: usize, indices: &[usize], normalize: bool) -> Result<PiecewisePolynomial<T>> {
    if m < 2 || indices.len() != m {
        return Err(Error::InvalidArgument(format!(
            "need m >= 2 and exactly m indices, got m = {m} and {} indices",
            indices.len()
        )));
    }
    let mut sum = PiecewisePolynomial::zero();
    for &j in indices {
        sum = sum.add(&ex1_tent(j, normalize)?);
    }
    let two_m = T::from_usize(2 * m).unwrap();
    let weight = PiecewisePolynomial::polynomial(vec![
        (T::one() + T::one()) / two_m.clone(),
        T::zero() - T::one() / two_m,
    ])?;
    weight.multiply(&sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn ex3_a_values() {
        let a1 = ex3_a::<f64>(1).unwrap();
        assert_eq!(a1.at(0.1).unwrap(), 2.0);
        assert_eq!(a1.at(0.3).unwrap(), -2.0);
        assert_eq!(a1.at(0.7).unwrap(), 0.0);
        assert!(ex3_a::<f64>(0).is_err());
    }

    #[test]
    fn ex3_products() {
        let a1 = ex3_a::<Q>(1).unwrap();
        let a2 = ex3_a::<Q>(2).unwrap();
        let sq = a1.multiply(&a1).unwrap();
        assert_eq!(sq, PiecewisePolynomial::step(vec![Dyadic::ZERO, Dyadic::new(1, 1), Dyadic::ONE], vec![ratio(4, 1), ratio(0, 1)]).unwrap());
        let p = a1.multiply(&a2).unwrap();
        assert_eq!(p.evaluate(&ratio(1, 16)).unwrap(), ratio(8, 1));
        assert_eq!(p.evaluate(&ratio(3, 16)).unwrap(), ratio(-8, 1));
        assert_eq!(p.evaluate(&ratio(3, 4)).unwrap(), ratio(0, 1));
        let one = PiecewisePolynomial::constant(ratio(1, 1));
        assert_eq!(a1.multiply(&one).unwrap(), a1);
    }

    #[test]
    fn ex3_integrals() {
        let a1 = ex3_a::<Q>(1).unwrap();
        assert_eq!(a1.integrate(), ratio(0, 1));
        assert_eq!(a1.integrate_product(&a1).unwrap(), ratio(2, 1));
    }

    #[test]
    fn ex3_components() {
        let f111 = build_example_ex3::<f64>(1, 1, 1).unwrap();
        assert_eq!(f111.at(0.1).unwrap(), 1.0);
        let a = |k| ex3_a::<Q>(k).unwrap();
        let f122 = build_example_ex3::<Q>(2, 1, 2).unwrap();
        assert_eq!(f122, a(1).multiply(&a(2)).unwrap().scale(&ratio(1, 8)));
        let f123 = build_example_ex3::<Q>(3, 1, 2).unwrap();
        assert_eq!(f123, a(1).multiply(&a(2)).unwrap().multiply(&a(3)).unwrap().scale(&ratio(1, 64)));
        assert_eq!(ex3_component::<Q>(&[2, 2]).unwrap(), a(2).scale(&ratio(1, 4)));
    }

    #[test]
    fn ex1_monomials() {
        for n in 1..=8 {
            let a = ex1_a::<Q>(n).unwrap();
            assert_eq!(a.integrate(), ratio(1, (n as i64) << (n - 1)));
        }
    }

    #[test]
    fn ex1_tents() {
        let b1 = ex1_tent::<Q>(1, false).unwrap();
        assert_eq!(b1.evaluate(&ratio(1, 2)).unwrap(), ratio(1, 1));
        assert_eq!(b1.evaluate(&ratio(0, 1)).unwrap(), ratio(0, 1));
        assert_eq!(b1.integrate(), ratio(1, 2));
        assert_eq!(ex1_tent::<Q>(1, true).unwrap().integrate(), ratio(1, 1));
        let b3 = ex1_tent::<Q>(3, false).unwrap();
        for k in 0..4 {
            assert_eq!(b3.evaluate(&ratio(2 * k + 1, 8)).unwrap(), ratio(1, 1));
            assert_eq!(b3.evaluate(&ratio(2 * k, 8)).unwrap(), ratio(0, 1));
        }
        assert_eq!(b3.integrate(), ratio(1, 2));
    }

    #[test]
    fn ex1_components() {
        let f = build_example_one::<Q>(2, &[1, 1], false).unwrap();
        // (2 - 1/2)/4 * 2 * b_1(1/2)
        assert_eq!(f.evaluate(&ratio(1, 2)).unwrap(), ratio(3, 4));
        assert!(build_example_one::<f64>(2, &[1], false).is_err());
        assert!(build_example_one::<f64>(1, &[1], false).is_err());
        assert!(f.to_f64().sup_on_grid(64) <= 2.0);
    }
}
