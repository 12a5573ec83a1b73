//! Seeded verification corpus and the harness that checks the signed count
//! against the linking number across it: torus braids, their Markov
//! conjugates and stabilizations, and random two-component words.

use crate::braid::{linking_number, BraidLetter, BraidWord};
use crate::solver::{compute_h, HResult, SolverConfig, SolverError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Corpus parameters. Braid generation is fully determined by the seed.
#[derive(Clone, Debug, Serialize)]
pub struct CorpusSpec {
    pub seed: u64,
    /// Minimum number of cases; the fixed families come first and random
    /// two-component braids fill the remainder.
    pub cases: usize,
    /// Multistart budget per strand for each case.
    pub starts_per_strand: usize,
    pub max_strands: usize,
    pub max_length: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed: 7,
            cases: 40,
            starts_per_strand: 200,
            max_strands: 5,
            max_length: 12,
        }
    }
}

/// One corpus entry: braid plus the solver configuration to run it with.
#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub id: usize,
    pub braid: BraidWord,
    pub config: SolverConfig,
}

fn case_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add((index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_braid(rng: &mut ChaCha8Rng, n: usize, len: usize) -> BraidWord {
    let letters = (0..len)
        .map(|_| BraidLetter {
            index: rng.gen_range(1..n),
            sign: if rng.gen_bool(0.5) { 1 } else { -1 },
        })
        .collect();
    BraidWord::new(n, letters)
}

fn two_components(b: &BraidWord) -> bool {
    b.permutation().cycles().len() == 2
}

/// Build the corpus: the torus family, single and double stabilizations
/// conjugated by random words, then random two-component braids up to the
/// requested count.
pub fn corpus_braids(spec: &CorpusSpec) -> Vec<CorpusCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut braids: Vec<BraidWord> = Vec::new();

    // torus two-bridge family sigma_1^{2k}
    for k in 1..=5usize {
        braids.push(BraidWord::parse(&"1 ".repeat(2 * k), None).unwrap());
    }
    // stabilized torus braids conjugated inside B3
    for k in 1..=5usize {
        let sign = if k % 2 == 0 { -1 } else { 1 };
        let stab = braids[k - 1].markov_stabilize(sign);
        let len = rng.gen_range(1..=4);
        let xi = random_braid(&mut rng, 3, len);
        braids.push(stab.markov_conjugate(&xi).unwrap());
    }
    // double stabilizations conjugated inside B4
    for k in 1..=5usize {
        let stab = braids[k - 1].markov_stabilize(1).markov_stabilize(-1);
        let len = rng.gen_range(1..=4);
        let xi = random_braid(&mut rng, 4, len);
        braids.push(stab.markov_conjugate(&xi).unwrap());
    }
    // random two-component fill
    while braids.len() < spec.cases {
        let n = rng.gen_range(2..=spec.max_strands);
        let len = rng.gen_range(4..=spec.max_length);
        let b = random_braid(&mut rng, n, len);
        if two_components(&b) {
            braids.push(b);
        }
    }

    braids
        .into_iter()
        .enumerate()
        .map(|(id, braid)| {
            let n = braid.strand_count();
            let config = SolverConfig {
                seed: case_seed(spec.seed, id),
                starts: Some(spec.starts_per_strand * n),
                ..SolverConfig::default()
            };
            CorpusCase { id, braid, config }
        })
        .collect()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseStatus {
    Ok,
    Indeterminate,
    Mismatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub id: usize,
    pub braid: String,
    pub n: usize,
    pub h: Option<i64>,
    pub lk: i64,
    /// h / lk for cases with matching magnitudes and lk != 0.
    pub sign_ratio: Option<i8>,
    pub status: CaseStatus,
    pub classes: usize,
    pub rejected_near_reducible: usize,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub cases: Vec<CaseReport>,
    /// The one sign constant relating h and lk, read off the first case with
    /// nonzero linking number.
    pub global_sign: Option<i8>,
    pub indeterminate_rate: f64,
    pub mismatches: usize,
    pub failures: Vec<String>,
    pub total_ms: u64,
}

/// Run one corpus case.
pub fn run_case(case: &CorpusCase) -> Result<(CaseReport, HResult), SolverError> {
    let start = std::time::Instant::now();
    let result = compute_h(&case.braid, None, &case.config)?;
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let lk = result.lk;
    let (status, sign_ratio) = match result.h {
        None => (CaseStatus::Indeterminate, None),
        Some(h) => {
            if h.abs() != lk.abs() {
                (CaseStatus::Mismatch, None)
            } else if lk != 0 {
                (CaseStatus::Ok, Some((h / lk) as i8))
            } else {
                (CaseStatus::Ok, None)
            }
        }
    };
    Ok((
        CaseReport {
            id: case.id,
            braid: case.braid.to_string(),
            n: case.braid.strand_count(),
            h: result.h,
            lk,
            sign_ratio,
            status,
            classes: result.classes.len(),
            rejected_near_reducible: result.rejected_near_reducible,
            elapsed_ms,
        },
        result,
    ))
}

/// Run the whole corpus and check that |h| = |lk| everywhere and that h/lk
/// is one global constant.
pub fn run_verification(spec: &CorpusSpec) -> VerificationReport {
    let started = std::time::Instant::now();
    let corpus = corpus_braids(spec);
    let mut cases = Vec::with_capacity(corpus.len());
    let mut failures = Vec::new();

    for case in &corpus {
        match run_case(case) {
            Ok((report, _)) => cases.push(report),
            Err(e) => {
                failures.push(format!("case {} [{}]: {}", case.id, case.braid, e));
                // sanity: the braid itself should still have a linking number
                let lk = linking_number(&case.braid).unwrap_or(0);
                cases.push(CaseReport {
                    id: case.id,
                    braid: case.braid.to_string(),
                    n: case.braid.strand_count(),
                    h: None,
                    lk,
                    sign_ratio: None,
                    status: CaseStatus::Mismatch,
                    classes: 0,
                    rejected_near_reducible: 0,
                    elapsed_ms: 0,
                });
            }
        }
    }

    let global_sign = cases.iter().find_map(|c| c.sign_ratio);
    let mut mismatches = 0usize;
    for c in cases.iter_mut() {
        if c.status == CaseStatus::Ok {
            if let (Some(r), Some(g)) = (c.sign_ratio, global_sign) {
                if r != g {
                    c.status = CaseStatus::Mismatch;
                }
            }
        }
        if c.status == CaseStatus::Mismatch {
            mismatches += 1;
            failures.push(format!(
                "case {} [{}]: h = {:?} vs lk = {} (global sign {:?})",
                c.id, c.braid, c.h, c.lk, global_sign
            ));
        }
    }
    let indeterminate = cases
        .iter()
        .filter(|c| c.status == CaseStatus::Indeterminate)
        .count();
    let indeterminate_rate = indeterminate as f64 / cases.len().max(1) as f64;

    VerificationReport {
        seed: spec.seed,
        cases,
        global_sign,
        indeterminate_rate,
        mismatches,
        failures,
        total_ms: started.elapsed().as_millis() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_two_component() {
        let spec = CorpusSpec {
            cases: 25,
            ..CorpusSpec::default()
        };
        let a = corpus_braids(&spec);
        let b = corpus_braids(&spec);
        assert_eq!(a.len(), b.len());
        assert!(a.len() >= 25);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.braid, y.braid);
            assert_eq!(x.config.seed, y.config.seed);
            assert!(two_components(&x.braid), "case {} [{}]", x.id, x.braid);
            assert!(x.braid.strand_count() <= spec.max_strands);
        }
    }

    #[test]
    fn small_verification_run_has_no_mismatches() {
        let spec = CorpusSpec {
            seed: 11,
            cases: 8,
            starts_per_strand: 150,
            ..CorpusSpec::default()
        };
        let report = run_verification(&spec);
        assert_eq!(report.mismatches, 0, "failures: {:?}", report.failures);
        assert_eq!(report.global_sign, Some(1));
        for c in &report.cases {
            assert_ne!(c.status, CaseStatus::Mismatch);
        }
    }
}
