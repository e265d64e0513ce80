//! JSON (and CSV for vectors) file formats.
//!
//! Output is pretty-printed with a trailing newline; map-like data is kept
//! in sorted order so files are byte-for-byte reproducible.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypermatrix::StochasticHypermatrix;
use crate::integral::{Builtin, KernelSeries};
use crate::piecewise::PiecewisePolynomial;
use crate::simplex::SimplexVector;

pub fn to_json<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<D: DeserializeOwned>(path: &Path) -> Result<D> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_json<S: Serialize + ?Sized>(path: &Path, value: &S) -> Result<()> {
    Ok(fs::write(path, to_json(value)?)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFile {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl VectorFile {
    pub fn new(v: &SimplexVector<f64>) -> Self {
        Self { dim: v.dim(), coords: v.coords().to_vec() }
    }

    pub fn into_vector(self) -> Result<SimplexVector<f64>> {
        if self.coords.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: self.coords.len() });
        }
        SimplexVector::new(self.coords)
    }
}

/// Parses `{"dim", "coords"}` JSON or a comma/whitespace separated list.
pub fn parse_vector(text: &str) -> Result<SimplexVector<f64>> {
    let text = text.trim();
    if text.starts_with('{') {
        return serde_json::from_str::<VectorFile>(text)?.into_vector();
    }
    let coords = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Error::Format(format!("not a number: {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if coords.is_empty() {
        return Err(Error::Format("empty vector".into()));
    }
    SimplexVector::new(coords)
}

pub fn read_vector(path: &Path) -> Result<SimplexVector<f64>> {
    parse_vector(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryFile {
    pub idx: Vec<usize>,
    pub k: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypermatrixFile {
    pub m: usize,
    pub dim: usize,
    pub entries: Vec<EntryFile>,
}

impl HypermatrixFile {
    pub fn new(p: &StochasticHypermatrix<f64>) -> Self {
        Self {
            m: p.order(),
            dim: p.dim(),
            entries: p.entries().map(|(idx, k, v)| EntryFile { idx: idx.clone(), k, p: *v }).collect(),
        }
    }

    /// Entries may list any permutation of a row; repeats must agree.
    pub fn into_matrix(self) -> Result<StochasticHypermatrix<f64>> {
        let mut p = StochasticHypermatrix::new(self.m, self.dim)?;
        for e in self.entries {
            p.insert(&e.idx, e.k, e.p)?;
        }
        Ok(p)
    }
}

pub fn read_hypermatrix(path: &Path) -> Result<StochasticHypermatrix<f64>> {
    read_json::<HypermatrixFile>(path)?.into_matrix()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentFile {
    pub idx: Vec<usize>,
    #[serde(rename = "fn")]
    pub function: PiecewisePolynomial<f64>,
}

/// Either `{"m", "truncation", "builtin"}` or an explicit component list.
/// Explicit files may keep the `builtin` tag as a label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelFile {
    pub m: usize,
    pub truncation: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalize: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_allowance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<PiecewisePolynomial<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<ComponentFile>>,
}

impl KernelFile {
    pub fn explicit(k: &KernelSeries<f64>) -> Self {
        let (builtin, normalize) = match k.builtin() {
            Some(Builtin::Ex3) => (Some("ex3".to_string()), None),
            Some(Builtin::Ex1 { normalize }) => (Some("ex1".to_string()), Some(normalize)),
            None => (None, None),
        };
        Self {
            m: k.order(),
            truncation: k.truncation(),
            builtin,
            normalize,
            sup_bound: Some(k.sup_bound()),
            tail_allowance: Some(k.tail_allowance()),
            a: Some(k.a_functions().to_vec()),
            f: Some(
                k.f_functions()
                    .iter()
                    .map(|(idx, f)| ComponentFile { idx: idx.clone(), function: f.clone() })
                    .collect(),
            ),
        }
    }

    pub fn into_kernel(self) -> Result<KernelSeries<f64>> {
        let Some(a) = self.a else {
            let normalize = self.normalize.unwrap_or(false);
            return match self.builtin.as_deref() {
                Some("ex3") => KernelSeries::ex3(self.m, self.truncation),
                Some("ex1") => KernelSeries::ex1(self.m, self.truncation, normalize),
                Some(other) => Err(Error::Format(format!("unknown builtin kernel {other:?}"))),
                None => Err(Error::Format("kernel needs either \"builtin\" or \"a\"".into())),
            };
        };
        if a.len() != self.truncation {
            return Err(Error::DimensionMismatch { expected: self.truncation, found: a.len() });
        }
        let f = self.f.unwrap_or_default().into_iter().map(|c| (c.idx, c.function));
        let k = KernelSeries::new(self.m, a, f, self.sup_bound)?;
        Ok(match self.tail_allowance {
            Some(t) => k.with_tail_allowance(t),
            None => k,
        })
    }
}

pub fn read_kernel(path: &Path) -> Result<KernelSeries<f64>> {
    read_json::<KernelFile>(path)?.into_kernel()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_formats() {
        let v = parse_vector("0.5, 0.5,0").unwrap();
        assert_eq!(v.coords(), &[0.5, 0.5, 0.0]);
        let j = to_json(&VectorFile::new(&v)).unwrap();
        assert_eq!(parse_vector(&j).unwrap(), v);
        assert!(parse_vector(r#"{"dim": 2, "coords": [1.0]}"#).is_err());
        assert!(parse_vector("0.5, x").is_err());
        assert!(parse_vector("0.9, 0.9").is_err());
    }

    #[test]
    fn hypermatrix_loader_sorts_and_merges() {
        let text = r#"{"m": 2, "dim": 2, "entries": [
            {"idx": [1, 1], "k": 1, "p": 1.0},
            {"idx": [2, 1], "k": 2, "p": 1.0},
            {"idx": [1, 2], "k": 2, "p": 1.0},
            {"idx": [2, 2], "k": 2, "p": 1.0}]}"#;
        let p = serde_json::from_str::<HypermatrixFile>(text).unwrap().into_matrix().unwrap();
        assert_eq!(p.nnz(), 3);
        assert_eq!(HypermatrixFile::new(&p).into_matrix().unwrap(), p);
        let conflict = text.replace(r#"{"idx": [1, 2], "k": 2, "p": 1.0}"#, r#"{"idx": [1, 2], "k": 2, "p": 0.5}"#);
        let err = serde_json::from_str::<HypermatrixFile>(&conflict).unwrap().into_matrix();
        assert!(matches!(err, Err(Error::ConflictingEntry { .. })));
    }

    #[test]
    fn kernel_round_trip() {
        let k = KernelSeries::<f64>::ex3(3, 3).unwrap();
        let file = KernelFile::explicit(&k);
        assert_eq!(file.a.as_ref().unwrap().len(), 3);
        let text = to_json(&file).unwrap();
        let back = serde_json::from_str::<KernelFile>(&text).unwrap().into_kernel().unwrap();
        assert_eq!(back.f_functions(), k.f_functions());
        assert_eq!(back.a_functions(), k.a_functions());

        let builtin: KernelFile = serde_json::from_str(r#"{"m": 2, "truncation": 3, "builtin": "ex1", "normalize": true}"#).unwrap();
        let k1 = builtin.into_kernel().unwrap();
        assert_eq!(k1.builtin(), Some(Builtin::Ex1 { normalize: true }));
        assert_eq!(k1.tail_allowance(), -0.125);
        let unknown: KernelFile = serde_json::from_str(r#"{"m": 2, "truncation": 3, "builtin": "foo"}"#).unwrap();
        assert!(unknown.into_kernel().is_err());
    }
}
