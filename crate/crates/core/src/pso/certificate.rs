//! Truncation-scoped surjectivity certificates.
//!
//! Necessary condition: every output `k` needs some `j` with `P_{j..j,k} = 1`
//! (the candidate set `I_k`). Sufficient condition: a witness sequence
//! `j_1, j_2, ..` with `P_{j_k..j_k,k} = 1` such that, on inputs drawn from
//! the witness set, output `k` only receives mass from rows containing `j_k`.
//! When the witness is a permutation of the whole truncation it is also
//! checked against the permutation zero pattern `P_{idx,k} = 0` whenever
//! `π(k) ∉ idx`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Pso;
use crate::scalar::Real;
use crate::tolerance::{ONE_TOL, ZERO_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedSurjective,
    CertifiedNotSurjective,
    Inconclusive,
}

/// Which criterion produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// Some output has no diagonal row sending all mass to it.
    NecessaryDiagonal,
    /// A witness sequence with the factorized zero pattern exists.
    SufficientWitness,
    /// Neither criterion settled the question.
    None,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// `j_k` for `k = 1..=target_dim`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<Vec<usize>>,
    /// `π(k) = j_k` when the witness exhausts the truncation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    /// Whether every entry obeys `P_{idx,k} = 0` for `π(k) ∉ idx`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation_pattern_holds: Option<bool>,
    /// An output `k` with empty `I_k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empty_output: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateScope {
    pub dim: usize,
    /// Outputs `1..=target_dim` are covered by the verdict.
    pub target_dim: usize,
    pub tol: f64,
    pub zero_tol: f64,
    pub statement: String,
}

/// Reason a candidate witness fails the sufficient condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessFailure {
    Length { expected: usize, found: usize },
    OutOfRange { j: usize },
    Repeated { j: usize },
    DiagonalNotOne { k: usize, j: usize, value: f64 },
    /// Output `k` receives mass from a witness row that misses `j_k`.
    Leak { idx: Vec<usize>, k: usize, value: f64 },
    /// A witness row sends mass past the target range.
    OutOfScope { idx: Vec<usize>, k: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurjectivityCertificate {
    pub verdict: Verdict,
    pub witness: Witness,
    pub theorem: Theorem,
    pub scope: CertificateScope,
    /// `I_k` for each `k` in scope.
    pub candidates: Vec<Vec<usize>>,
    /// Failures of the minimal witness, kept when the verdict is not surjective.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failures: Vec<WitnessFailure>,
    /// Number of witness sequences examined.
    pub witnesses_tried: usize,
}

impl SurjectivityCertificate {
    pub fn is_surjective(&self) -> bool {
        self.verdict == Verdict::CertifiedSurjective
    }

    pub fn sequence(&self) -> Option<&[usize]> {
        self.witness.sequence.as_deref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub one_tol: f64,
    pub zero_tol: f64,
    /// Outputs considered; defaults to the full truncation.
    pub target_dim: Option<usize>,
    /// Exhaustive witness search runs only up to this truncation.
    pub exhaustive_max_dim: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self { one_tol: ONE_TOL, zero_tol: ZERO_TOL, target_dim: None, exhaustive_max_dim: 8 }
    }
}

impl<T: Real> Pso<T> {
    pub fn surjectivity_certificate(&self) -> SurjectivityCertificate {
        self.surjectivity_certificate_with(&CertifyConfig::default())
    }

    pub fn surjectivity_certificate_with(&self, cfg: &CertifyConfig) -> SurjectivityCertificate {
        let dim = self.dim();
        let target = cfg.target_dim.unwrap_or(dim).min(dim);
        let scope = CertificateScope {
            dim,
            target_dim: target,
            tol: cfg.one_tol,
            zero_tol: cfg.zero_tol,
            statement: if target == dim {
                format!("on truncation {dim}")
            } else {
                format!("on truncation {dim}, onto outputs 1..={target}")
            },
        };
        let candidates: Vec<Vec<usize>> =
            (1..=target).map(|k| self.diagonal_candidates(k, cfg.one_tol)).collect();

        if let Some(pos) = candidates.iter().position(Vec::is_empty) {
            return SurjectivityCertificate {
                verdict: Verdict::CertifiedNotSurjective,
                witness: Witness { empty_output: Some(pos + 1), ..Witness::default() },
                theorem: Theorem::NecessaryDiagonal,
                scope,
                candidates,
                failures: Vec::new(),
                witnesses_tried: 0,
            };
        }

        let minimal: Vec<usize> = candidates.iter().map(|c| c[0]).collect();
        let failures = self.check_witness(&minimal, cfg);
        let mut tried = 1;
        let found = if failures.is_empty() {
            Some(minimal)
        } else if dim <= cfg.exhaustive_max_dim {
            let mut chosen = Vec::with_capacity(target);
            let mut used = BTreeSet::new();
            self.search_witness(&candidates, cfg, &mut chosen, &mut used, &mut tried)
        } else {
            None
        };

        match found {
            Some(seq) => {
                let mut witness = Witness { sequence: Some(seq.clone()), ..Witness::default() };
                let covers_all =
                    target == dim && seq.iter().copied().collect::<BTreeSet<_>>().len() == dim;
                if covers_all {
                    witness.permutation_pattern_holds = Some(self.permutation_pattern_holds(&seq, cfg));
                    witness.permutation = Some(seq);
                }
                SurjectivityCertificate {
                    verdict: Verdict::CertifiedSurjective,
                    witness,
                    theorem: Theorem::SufficientWitness,
                    scope,
                    candidates,
                    failures: Vec::new(),
                    witnesses_tried: tried,
                }
            }
            None => SurjectivityCertificate {
                verdict: Verdict::Inconclusive,
                witness: Witness::default(),
                theorem: Theorem::None,
                scope,
                candidates,
                failures,
                witnesses_tried: tried,
            },
        }
    }

    fn search_witness(
        &self,
        candidates: &[Vec<usize>],
        cfg: &CertifyConfig,
        chosen: &mut Vec<usize>,
        used: &mut BTreeSet<usize>,
        tried: &mut usize,
    ) -> Option<Vec<usize>> {
        if chosen.len() == candidates.len() {
            *tried += 1;
            return self.check_witness(chosen, cfg).is_empty().then(|| chosen.clone());
        }
        for &j in &candidates[chosen.len()] {
            if used.insert(j) {
                chosen.push(j);
                if let Some(found) = self.search_witness(candidates, cfg, chosen, used, tried) {
                    return Some(found);
                }
                chosen.pop();
                used.remove(&j);
            }
        }
        None
    }

    /// Checks a witness sequence `j_1..j_K` against the sufficient condition.
    /// An empty result means the sequence certifies surjectivity onto
    /// outputs `1..=K`.
    pub fn check_witness(&self, witness: &[usize], cfg: &CertifyConfig) -> Vec<WitnessFailure> {
        let dim = self.dim();
        let target = cfg.target_dim.unwrap_or(dim).min(dim);
        let mut out = Vec::new();
        if witness.len() != target {
            out.push(WitnessFailure::Length { expected: target, found: witness.len() });
            return out;
        }
        let mut seen = BTreeSet::new();
        for &j in witness {
            if j == 0 || j > dim {
                out.push(WitnessFailure::OutOfRange { j });
            } else if !seen.insert(j) {
                out.push(WitnessFailure::Repeated { j });
            }
        }
        if !out.is_empty() {
            return out;
        }
        let one = T::lit(cfg.one_tol);
        for (pos, &j) in witness.iter().enumerate() {
            let k = pos + 1;
            let p = self.matrix().diagonal(j, k).expect("in range");
            if (p - T::one()).abs() > one {
                out.push(WitnessFailure::DiagonalNotOne { k, j, value: p.approx() });
            }
        }
        let zero = T::lit(cfg.zero_tol);
        for (idx, k, v) in self.matrix().entries() {
            if *v <= zero || !idx.iter().all(|i| seen.contains(i)) {
                continue;
            }
            if k > target {
                out.push(WitnessFailure::OutOfScope { idx: idx.clone(), k, value: v.approx() });
            } else if !idx.contains(&witness[k - 1]) {
                out.push(WitnessFailure::Leak { idx: idx.clone(), k, value: v.approx() });
            }
        }
        out
    }

    fn permutation_pattern_holds(&self, perm: &[usize], cfg: &CertifyConfig) -> bool {
        let zero = T::lit(cfg.zero_tol);
        self.matrix()
            .entries()
            .all(|(idx, k, v)| *v <= zero || idx.contains(&perm[k - 1]))
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::max_pattern;
    use super::*;
    use crate::hypermatrix::StochasticHypermatrix;

    #[test]
    fn identity_witness_for_max_pattern() {
        let c = max_pattern(3, 6).surjectivity_certificate();
        assert_eq!(c.verdict, Verdict::CertifiedSurjective);
        assert_eq!(c.sequence().unwrap(), &[1, 2, 3, 4, 5, 6]);
        assert_eq!(c.witness.permutation.as_deref(), Some(&[1, 2, 3, 4, 5, 6][..]));
        assert_eq!(c.witness.permutation_pattern_holds, Some(true));
        assert_eq!(c.theorem, Theorem::SufficientWitness);
        assert_eq!(c.scope.statement, "on truncation 6");
    }

    #[test]
    fn no_unit_diagonal_means_not_surjective() {
        let mut p = StochasticHypermatrix::new(2, 2).unwrap();
        for idx in [[1, 1], [1, 2], [2, 2]] {
            p.insert(&idx, 1, 0.5).unwrap();
            p.insert(&idx, 2, 0.5).unwrap();
        }
        let c = Pso::new(p).unwrap().surjectivity_certificate();
        assert_eq!(c.verdict, Verdict::CertifiedNotSurjective);
        assert_eq!(c.witness.empty_output, Some(1));
        assert_eq!(c.theorem, Theorem::NecessaryDiagonal);
    }

    #[test]
    fn permuted_vertices_give_permutation_witness() {
        // V(e_1) = e_2, V(e_2) = e_1 and the mixed row splits evenly.
        let mut p = StochasticHypermatrix::new(2, 2).unwrap();
        p.insert(&[1, 1], 2, 1.0).unwrap();
        p.insert(&[2, 2], 1, 1.0).unwrap();
        p.insert(&[1, 2], 1, 0.5).unwrap();
        p.insert(&[1, 2], 2, 0.5).unwrap();
        let c = Pso::new(p).unwrap().surjectivity_certificate();
        assert_eq!(c.verdict, Verdict::CertifiedSurjective);
        assert_eq!(c.witness.permutation.as_deref(), Some(&[2, 1][..]));
    }

    #[test]
    fn leak_defeats_witness() {
        // Diagonals are fixed but row (1,2) leaks into output 3.
        let mut p = StochasticHypermatrix::new(2, 3).unwrap();
        for i in 1..=3 {
            p.insert(&[i, i], i, 1.0).unwrap();
        }
        p.insert(&[1, 2], 3, 1.0).unwrap();
        p.insert(&[1, 3], 3, 1.0).unwrap();
        p.insert(&[2, 3], 3, 1.0).unwrap();
        let op = Pso::new(p).unwrap();
        let c = op.surjectivity_certificate();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!(c.failures.iter().any(|f| matches!(f, WitnessFailure::Leak { k: 3, .. })));
        assert_eq!(c.witnesses_tried, 2);
    }

    #[test]
    fn witness_validation() {
        let op = max_pattern(2, 3);
        let cfg = CertifyConfig::default();
        assert!(op.check_witness(&[1, 2, 3], &cfg).is_empty());
        assert!(matches!(op.check_witness(&[1, 2], &cfg)[0], WitnessFailure::Length { .. }));
        assert!(matches!(op.check_witness(&[1, 1, 3], &cfg)[0], WitnessFailure::Repeated { j: 1 }));
        assert!(op
            .check_witness(&[2, 1, 3], &cfg)
            .iter()
            .any(|f| matches!(f, WitnessFailure::DiagonalNotOne { .. })));
    }
}
