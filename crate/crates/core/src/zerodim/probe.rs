//! Randomized rank probes of `M` over a prime field or the rationals.
//!
//! Trial `t` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `t`, so
//! reports do not depend on scheduling. Even trials are dense uniform
//! assignments; odd trials have a random support of one to four variables,
//! which reaches the low-rank strata far more often.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{IvhsError, Result};
use crate::fermat_ivhs::build_m;
use crate::field::{FieldCtx, PrimeField, Rational, RationalField, RingTag};
use crate::linalg;
use crate::multiindex::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "field", rename_all = "snake_case")]
pub enum ProbeField {
    Prime {
        p: u64,
    },
    /// Integers in `[-range, range]`.
    Rationals {
        range: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankProbeReport {
    pub m: u32,
    pub d: u32,
    pub trials: u64,
    pub seed: u64,
    pub field: RingTag,
    pub max_rank: usize,
    pub min_rank: usize,
    /// rank -> number of trials.
    pub histogram: BTreeMap<usize, u64>,
    /// rank -> first assignment (by trial number) attaining it, as integers
    /// (residues for a prime field).
    pub witnesses: BTreeMap<usize, Vec<i64>>,
}

fn draw(
    rng: &mut ChaCha8Rng,
    trial: u64,
    nvars: usize,
    sample: &dyn Fn(&mut ChaCha8Rng) -> i64,
) -> Vec<i64> {
    loop {
        let x: Vec<i64> = if trial.is_multiple_of(2) {
            (0..nvars).map(|_| sample(rng)).collect()
        } else {
            let support = rng.gen_range(1..=4.min(nvars));
            let mut x = vec![0i64; nvars];
            for _ in 0..support {
                let v = rng.gen_range(0..nvars);
                x[v] = sample(rng);
            }
            x
        };
        if x.iter().any(|&v| v != 0) {
            return x;
        }
    }
}

fn rank_at<F: FieldCtx>(f: &F, m: u32, d: u32, x: &[i64]) -> Result<usize> {
    let mat = build_m(m, d)?;
    let point: Vec<F::E> = x.iter().map(|&v| f.from_i64(v)).collect();
    Ok(linalg::rank(f, &mat.evaluate(f, &point)))
}

fn run<F: FieldCtx>(
    f: &F,
    m: u32,
    d: u32,
    trials: u64,
    seed: u64,
    sample: &(dyn Fn(&mut ChaCha8Rng) -> i64 + Sync),
) -> Result<Vec<(usize, Vec<i64>)>> {
    let mat = build_m(m, d)?;
    let nvars = Params::new(m, d)?.vars().len();
    Ok((0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let x = draw(&mut rng, t, nvars, sample);
            let point: Vec<F::E> = x.iter().map(|&v| f.from_i64(v)).collect();
            (linalg::rank(f, &mat.evaluate(f, &point)), x)
        })
        .collect())
}

/// Rank distribution of `M` at random nonzero assignments. The maximum is a
/// lower bound for the generic rank at the Fermat point.
pub fn random_rank_probe(
    m: u32,
    d: u32,
    trials: u64,
    field: ProbeField,
    seed: u64,
) -> Result<RankProbeReport> {
    Params::with_hypothesis(m, d)?;
    if trials == 0 {
        return Err(IvhsError::Param("probe needs at least one trial".into()));
    }
    let (results, tag) = match field {
        ProbeField::Prime { p } => {
            let f = PrimeField::new(p)
                .ok_or_else(|| IvhsError::Param(format!("{p} is not a prime below 2^32")))?;
            let floor = 2 * d as u64 * (m as u64 + 2);
            if p <= floor {
                return Err(IvhsError::Param(format!(
                    "probe prime {p} must exceed 2 d (m + 2) = {floor}"
                )));
            }
            let sample = move |rng: &mut ChaCha8Rng| rng.gen_range(1..p) as i64;
            (run(&f, m, d, trials, seed, &sample)?, f.tag())
        }
        ProbeField::Rationals { range } => {
            if range < 1 {
                return Err(IvhsError::Param(
                    "rational probe range must be positive".into(),
                ));
            }
            let sample = move |rng: &mut ChaCha8Rng| rng.gen_range(-range..=range);
            (
                run(&RationalField, m, d, trials, seed, &sample)?,
                RingTag::Rationals,
            )
        }
    };
    let mut histogram = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    for (rank, x) in results {
        *histogram.entry(rank).or_insert(0) += 1;
        witnesses.entry(rank).or_insert(x);
    }
    Ok(RankProbeReport {
        m,
        d,
        trials,
        seed,
        field: tag,
        max_rank: *histogram.keys().max().expect("at least one trial"),
        min_rank: *histogram.keys().min().expect("at least one trial"),
        histogram,
        witnesses,
    })
}

impl RankProbeReport {
    /// Re-evaluates every recorded witness.
    pub fn verify(&self) -> Result<bool> {
        for (&rank, x) in &self.witnesses {
            let got = match self.field {
                RingTag::PrimeField(p) => {
                    let f = PrimeField::new(p)
                        .ok_or_else(|| IvhsError::Param(format!("bad prime {p}")))?;
                    rank_at(&f, self.m, self.d, x)?
                }
                RingTag::Rationals => rank_at(&RationalField, self.m, self.d, x)?,
                other => {
                    return Err(IvhsError::Param(format!(
                        "probe reports never use {other:?}"
                    )))
                }
            };
            if got != rank || x.iter().all(|&v| v == 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Rank of `M` at an exact rational point.
pub fn rational_rank(m: u32, d: u32, x: &[Rational]) -> Result<usize> {
    let mat = build_m(m, d)?;
    Ok(linalg::rank(
        &RationalField,
        &mat.evaluate(&RationalField, x),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DEFAULT_PRIME;

    const FP: ProbeField = ProbeField::Prime { p: DEFAULT_PRIME };

    #[test]
    fn quartic_rank_is_one() {
        let rep = random_rank_probe(2, 4, 200, FP, 1).unwrap();
        assert_eq!(rep.histogram.keys().copied().collect::<Vec<_>>(), vec![1]);
        assert!(rep.verify().unwrap());
    }

    #[test]
    fn quintic_generic_rank_is_a() {
        let rep = random_rank_probe(2, 5, 400, FP, 7).unwrap();
        assert_eq!(rep.max_rank, 4);
        assert!(rep.min_rank >= 2);
        assert!(rep.verify().unwrap());
    }

    #[test]
    fn same_seed_same_report() {
        let a = random_rank_probe(2, 5, 300, FP, 42).unwrap();
        let b = random_rank_probe(2, 5, 300, FP, 42).unwrap();
        assert_eq!(a, b);
        let c = random_rank_probe(2, 5, 300, FP, 43).unwrap();
        assert_ne!(a.witnesses, c.witnesses);
    }

    #[test]
    fn rational_probe_agrees_on_the_floor() {
        let rep = random_rank_probe(4, 3, 100, ProbeField::Rationals { range: 5 }, 3).unwrap();
        assert!(rep.min_rank >= 1);
        assert!(rep.verify().unwrap());
    }

    #[test]
    fn bad_fields_are_rejected() {
        assert!(random_rank_probe(2, 5, 10, ProbeField::Prime { p: 7 }, 0).is_err());
        assert!(random_rank_probe(2, 5, 10, ProbeField::Prime { p: 1_000_000 }, 0).is_err());
        assert!(random_rank_probe(2, 5, 0, FP, 0).is_err());
    }

    #[test]
    fn tampered_witness_fails_verification() {
        let mut rep = random_rank_probe(2, 5, 50, FP, 9).unwrap();
        let (&rank, x) = rep.witnesses.iter().next().unwrap();
        let x = x.clone();
        rep.witnesses.insert(rank + 1, x);
        assert!(!rep.verify().unwrap());
    }
}
