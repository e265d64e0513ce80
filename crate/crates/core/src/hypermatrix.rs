//! Sparse symmetric stochastic hypermatrices.
//!
//! Entries `P_{i_1..i_m,k}` are keyed by the sorted input multi-index, so
//! symmetry under permutations of the inputs holds by construction. Sums over
//! ordered tuples are recovered with [`multiplicity`].
//!
//! Worst-case storage is `O(N^m · N)` for a dense truncation; every row of a
//! stochastic matrix has at least one nonzero, so at least `C(N+m-1, m)`
//! entries are stored.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tolerance::{ROW_TOL, ZERO_TOL};

type Row<T> = BTreeMap<usize, T>;

/// (m+1)-order hypermatrix with sorted-key sparse storage.
#[derive(Debug, Clone)]
pub struct StochasticHypermatrix<T> {
    m: usize,
    dim: usize,
    rows: BTreeMap<Vec<usize>, Row<T>>,
    // k -> rows with a stored entry for output k; built on first use.
    incoming: OnceLock<BTreeMap<usize, Vec<Vec<usize>>>>,
}

impl<T: PartialEq> PartialEq for StochasticHypermatrix<T> {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.dim == other.dim && self.rows == other.rows
    }
}

/// One row whose sum misses 1 by more than the audit tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowViolation<T> {
    pub idx: Vec<usize>,
    pub sum: T,
    pub deviation: T,
}

/// Entry below `-tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeEntry<T> {
    pub idx: Vec<usize>,
    pub k: usize,
    pub value: T,
}

/// Result of [`StochasticHypermatrix::validate_stochastic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport<T> {
    pub row_tol: f64,
    pub rows_checked: usize,
    pub violations: Vec<RowViolation<T>>,
    pub negative_entries: Vec<NegativeEntry<T>>,
}

impl<T> AuditReport<T> {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.negative_entries.is_empty()
    }
}

impl<T: Scalar> AuditReport<T> {
    pub fn worst_deviation(&self) -> f64 {
        self.violations
            .iter()
            .map(|v| v.deviation.approx())
            .fold(0.0, f64::max)
    }

    pub fn into_error(&self) -> Error {
        Error::NotStochastic {
            violations: self.violations.len() + self.negative_entries.len(),
            worst: self.worst_deviation(),
        }
    }
}

/// Multinomial coefficient `m! / ∏ c_v!` of a sorted multi-index: the number
/// of ordered tuples that sort to it.
pub fn multiplicity(idx: &[usize]) -> u64 {
    let m = idx.len() as u64;
    let mut result = 1u64;
    let mut placed = 0u64;
    for run in runs(idx) {
        // Multiply by C(placed + run, run) incrementally to stay exact.
        for r in 1..=run as u64 {
            result = result * (placed + r) / r;
        }
        placed += run as u64;
    }
    debug_assert_eq!(placed, m);
    result
}

/// Lengths of runs of equal values in a sorted slice.
fn runs(idx: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && idx[j] == idx[i] {
            j += 1;
        }
        out.push(j - i);
        i = j;
    }
    out
}

/// All sorted m-tuples over `1..=dim` (multisets of size m), in lexicographic order.
pub fn sorted_multi_indices(m: usize, dim: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    let mut cur = vec![1usize; m];
    loop {
        out.push(cur.clone());
        // Advance the rightmost position that can still grow.
        let mut pos = m;
        while pos > 0 && cur[pos - 1] == dim {
            pos -= 1;
        }
        if pos == 0 {
            return out;
        }
        let next = cur[pos - 1] + 1;
        for c in &mut cur[pos - 1..] {
            *c = next;
        }
    }
}

fn sorted(idx: &[usize]) -> Vec<usize> {
    let mut key = idx.to_vec();
    key.sort_unstable();
    key
}

impl<T: Scalar> StochasticHypermatrix<T> {
    /// Empty matrix; rows are filled with [`insert`](Self::insert).
    pub fn new(m: usize, dim: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("operator order must be >= 2, got {m}")));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("truncation must be positive".into()));
        }
        Ok(Self { m, dim, rows: BTreeMap::new(), incoming: OnceLock::new() })
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_index(&self, idx: &[usize], k: usize) -> Result<()> {
        if idx.len() != self.m {
            return Err(Error::OrderMismatch { expected: self.m, found: idx.len() });
        }
        for &i in idx.iter().chain(std::iter::once(&k)) {
            if i == 0 || i > self.dim {
                return Err(Error::IndexOutOfRange { index: i, dim: self.dim });
            }
        }
        Ok(())
    }

    /// Adds an entry. Repeating an entry with the same value is a no-op;
    /// a different value is an error. Zero values are not stored.
    pub fn insert(&mut self, idx: &[usize], k: usize, value: T) -> Result<()> {
        self.check_index(idx, k)?;
        let key = sorted(idx);
        let row = self.rows.entry(key.clone()).or_default();
        match row.get(&k) {
            Some(old) if *old != value => {
                return Err(Error::ConflictingEntry {
                    idx: key,
                    k,
                    a: old.approx(),
                    b: value.approx(),
                })
            }
            Some(_) => {}
            None => {
                if value != T::zero() {
                    row.insert(k, value);
                }
            }
        }
        if row.is_empty() {
            self.rows.remove(&key);
        }
        self.incoming = OnceLock::new();
        Ok(())
    }

    /// Overwrites an entry; setting zero removes it.
    pub fn set(&mut self, idx: &[usize], k: usize, value: T) -> Result<()> {
        self.check_index(idx, k)?;
        let key = sorted(idx);
        let row = self.rows.entry(key.clone()).or_default();
        if value == T::zero() {
            row.remove(&k);
        } else {
            row.insert(k, value);
        }
        if row.is_empty() {
            self.rows.remove(&key);
        }
        self.incoming = OnceLock::new();
        Ok(())
    }

    /// `P_{idx,k}` for any ordering of `idx`; absent entries are zero.
    pub fn get(&self, idx: &[usize], k: usize) -> Result<T> {
        self.check_index(idx, k)?;
        Ok(self
            .rows
            .get(&sorted(idx))
            .and_then(|row| row.get(&k))
            .cloned()
            .unwrap_or_else(T::zero))
    }

    /// Nonzero outputs `(k, P_{idx,k})` of a row, ascending in `k`.
    pub fn row(&self, idx: &[usize]) -> impl Iterator<Item = (usize, &T)> + '_ {
        self.rows
            .get(&sorted(idx))
            .into_iter()
            .flat_map(|row| row.iter().map(|(k, v)| (*k, v)))
    }

    /// Stored rows keyed by sorted multi-index.
    pub fn rows(&self) -> impl Iterator<Item = (&Vec<usize>, &BTreeMap<usize, T>)> + '_ {
        self.rows.iter()
    }

    /// Every stored `(idx, k, value)` triple.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, usize, &T)> + '_ {
        self.rows
            .iter()
            .flat_map(|(idx, row)| row.iter().map(move |(k, v)| (idx, *k, v)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.values().map(BTreeMap::len).sum()
    }

    /// Rows with a stored entry for output `k`.
    pub fn rows_into(&self, k: usize) -> &[Vec<usize>] {
        let index = self.incoming.get_or_init(|| {
            let mut index: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
            for (idx, row) in &self.rows {
                for &k in row.keys() {
                    index.entry(k).or_default().push(idx.clone());
                }
            }
            index
        });
        index.get(&k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Diagonal entry `P_{j..j,k}`.
    pub fn diagonal(&self, j: usize, k: usize) -> Result<T> {
        self.get(&vec![j; self.m], k)
    }

    pub fn row_sum(&self, idx: &[usize]) -> T {
        self.row(idx).fold(T::zero(), |acc, (_, v)| acc + v.clone())
    }

    pub fn validate_stochastic(&self) -> AuditReport<T> {
        self.validate_stochastic_with(ROW_TOL)
    }

    /// Checks every sorted multi-index over `1..=dim`, including rows with no
    /// stored entries.
    pub fn validate_stochastic_with(&self, row_tol: f64) -> AuditReport<T> {
        let tol = T::lit(row_tol);
        let all = sorted_multi_indices(self.m, self.dim);
        let violations = all
            .iter()
            .filter_map(|idx| {
                let sum = self.row_sum(idx);
                let deviation = (sum.clone() - T::one()).magnitude();
                (deviation > tol).then(|| RowViolation { idx: idx.clone(), sum, deviation })
            })
            .collect();
        let negative_entries = self
            .entries()
            .filter(|(_, _, v)| **v < T::zero() && v.magnitude() > tol)
            .map(|(idx, k, v)| NegativeEntry { idx: idx.clone(), k, value: v.clone() })
            .collect();
        AuditReport { row_tol, rows_checked: all.len(), violations, negative_entries }
    }

    /// Builds from a dense row-major array over axes `(i_1, .., i_m, k)`.
    /// Values must be symmetric in the first `m` axes within `sym_tol`.
    pub fn from_dense(m: usize, dim: usize, values: &[T], sym_tol: f64) -> Result<Self> {
        let expected = dim.checked_pow(m as u32 + 1).ok_or_else(|| {
            Error::InvalidArgument("dense tensor too large".into())
        })?;
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: values.len() });
        }
        let mut out = Self::new(m, dim)?;
        let tol = T::lit(sym_tol);
        let offset = |idx: &[usize], k: usize| {
            idx.iter().fold(0usize, |acc, &i| acc * dim + (i - 1)) * dim + (k - 1)
        };
        // Walk every ordered tuple, compare against its sorted representative.
        let mut ordered = vec![1usize; m];
        loop {
            let key = sorted(&ordered);
            for k in 1..=dim {
                let v = values[offset(&ordered, k)].clone();
                if v < T::zero() && v.magnitude() > tol {
                    return Err(Error::NegativeEntry { idx: ordered.clone(), k, value: v.approx() });
                }
                let canon = values[offset(&key, k)].clone();
                if (v.clone() - canon.clone()).magnitude() > tol {
                    return Err(Error::Asymmetric {
                        first: key.clone(),
                        second: ordered.clone(),
                        k,
                        a: canon.approx(),
                        b: v.approx(),
                    });
                }
                if ordered == key && v != T::zero() {
                    out.set(&key, k, v)?;
                }
            }
            let mut pos = m;
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                if ordered[pos] < dim {
                    ordered[pos] += 1;
                    break;
                }
                ordered[pos] = 1;
            }
        }
    }

    /// Dense row-major array over axes `(i_1, .., i_m, k)`.
    pub fn to_dense(&self) -> Vec<T> {
        let total = self.dim.pow(self.m as u32 + 1);
        let mut out = vec![T::zero(); total];
        let mut ordered = vec![1usize; self.m];
        let mut base = 0usize;
        loop {
            for (k, v) in self.row(&ordered) {
                out[base * self.dim + k - 1] = v.clone();
            }
            base += 1;
            let mut pos = self.m;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                if ordered[pos] < self.dim {
                    ordered[pos] += 1;
                    break;
                }
                ordered[pos] = 1;
            }
        }
    }

    /// Converts every value, e.g. exact rationals to `f64`.
    pub fn map_values<U: Scalar>(&self, f: impl Fn(&T) -> U) -> StochasticHypermatrix<U> {
        let rows = self
            .rows
            .iter()
            .map(|(idx, row)| {
                let row: Row<U> = row
                    .iter()
                    .map(|(k, v)| (*k, f(v)))
                    .filter(|(_, v)| *v != U::zero())
                    .collect();
                (idx.clone(), row)
            })
            .filter(|(_, row)| !row.is_empty())
            .collect();
        StochasticHypermatrix { m: self.m, dim: self.dim, rows, incoming: OnceLock::new() }
    }

    /// Entries with magnitude at or below `ZERO_TOL` removed.
    pub fn pruned(&self) -> Self {
        let tol = T::lit(ZERO_TOL);
        let mut out = self.clone();
        out.rows.retain(|_, row| {
            row.retain(|_, v| v.magnitude() > tol);
            !row.is_empty()
        });
        out.incoming = OnceLock::new();
        out
    }

    /// Distinct input indices appearing in a multi-index.
    pub fn index_set(idx: &[usize]) -> BTreeSet<usize> {
        idx.iter().copied().collect()
    }
}

/// Random row on the outputs `support`: flat Dirichlet weights, each output
/// dropped with probability `sparsity` (at least one is kept).
fn random_row<R: Rng + ?Sized>(rng: &mut R, support: &[usize], sparsity: f64) -> Row<f64> {
    let mut w: Vec<(usize, f64)> = Vec::new();
    for &k in support {
        if !rng.random_bool(sparsity) {
            w.push((k, -(1.0 - rng.random::<f64>()).ln()));
        }
    }
    if w.is_empty() {
        let k = support[rng.random_range(0..support.len())];
        w.push((k, 1.0));
    }
    let total: f64 = w.iter().map(|(_, v)| v).sum();
    w.into_iter().map(|(k, v)| (k, v / total)).collect()
}

impl StochasticHypermatrix<f64> {
    /// Random stochastic hypermatrix with arbitrary output support.
    pub fn random_stochastic<R: Rng + ?Sized>(rng: &mut R, m: usize, dim: usize, sparsity: f64) -> Result<Self> {
        let mut p = Self::new(m, dim)?;
        let all: Vec<usize> = (1..=dim).collect();
        for idx in sorted_multi_indices(m, dim) {
            let row = random_row(rng, &all, sparsity);
            p.rows.insert(idx, row);
        }
        Ok(p)
    }

    /// Random orthogonality-preserving hypermatrix: every row sends its
    /// mass only to outputs among its own inputs, so each vertex is fixed.
    pub fn random_op<R: Rng + ?Sized>(rng: &mut R, m: usize, dim: usize, sparsity: f64) -> Result<Self> {
        let mut p = Self::new(m, dim)?;
        for idx in sorted_multi_indices(m, dim) {
            let support: Vec<usize> = Self::index_set(&idx).into_iter().collect();
            let row = random_row(rng, &support, sparsity);
            p.rows.insert(idx, row);
        }
        Ok(p)
    }
}
