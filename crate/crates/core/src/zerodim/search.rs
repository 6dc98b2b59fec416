//! Sandwiching `s_max` for `I_s^0` or `I_s^1` by ascending `s`.
//!
//! Evidence for `Zero(I_s) = {0}`: the elimination certificate (for
//! `s < bound`, and for `I^1` through `I_s^0 ⊆ I_s^1`) or a Gröbner verdict.
//! Evidence against: an exact nonzero common zero, either the cyclotomic
//! witness or a Gröbner witness.
//!
//! For `I^1`, a point with `rank M(x) < s` kills every summed generator of
//! size `s+1`, since each block keeps `s` columns of `M` and those are
//! dependent. At `rank M(x) = s` the generators are evaluated: first mod a
//! prime `p = 1 mod 2d` through a ring map `Z[w] -> F_p` (a nonzero value
//! there is a nonzero value in `Q(w)`), and only if all of them vanish mod
//! `p` again exactly in `Q(w)`.
//!
//! Both loci are monotone in `s` (rank `<= s` implies rank `<= s+1`, and the
//! summed generators of size `s+2` vanish at rank `<= s`), so the search stops
//! at the first nontrivial zero.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{binomial, counting_bound};
use crate::cyclotomic::CycloElem;
use crate::detideal::{minors_ideal_0, minors_ideal_1, selectors, MinorSelector, Variant};
use crate::error::{IvhsError, Result};
use crate::fermat_ivhs::{build_m, build_m_check};
use crate::field::FieldCtx;
use crate::linalg::{self, Matrix};
use crate::multiindex::{MultiIndex, Params};
use crate::witness::{solve_witness, witness_field, ModularEmbedding, WitnessVector};
use crate::zerodim::certificate::{elimination_certificate, verify_certificate};
use crate::zerodim::groebner::{
    groebner_zero_dim_test, GbStats, InconclusiveReason, ZeroDimVerdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub time_cap: Duration,
    /// `None` means `2(s+1)`.
    pub degree_cap: Option<u32>,
    /// Ideals with more generators than this are not handed to Buchberger.
    pub max_generators: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            time_cap: Duration::from_secs(60),
            degree_cap: None,
            max_generators: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "evidence", rename_all = "snake_case")]
pub enum Evidence {
    /// The verified certificate forces `x = 0` once all `bound`-minors vanish.
    Certificate {
        bound: usize,
    },
    /// `I_s^0 ⊆ I_s^1` and the certificate settles `I_s^0`.
    ContainsCertifiedI0 {
        bound: usize,
    },
    Groebner {
        stats: GbStats,
    },
    /// Settled by a larger `s` with only the trivial zero.
    Monotone {
        from_s: u32,
    },
    /// `s + 1 > min(a, r)`: there are no minors at all.
    EmptyIdeal,
    /// The cyclotomic witness has rank at most `s` (strictly less for `I^1`).
    WitnessRank {
        rank: usize,
    },
    /// Rank equals `s` and `Y M̌_alpha Z = 0` exactly for all `alphas`
    /// check matrices, so every summed generator vanishes.
    WitnessGeneratorsVanish {
        rank: usize,
        alphas: usize,
    },
    GroebnerWitness {
        assignment: Vec<i64>,
        stats: GbStats,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchStatus {
    ZeroOnly {
        evidence: Evidence,
    },
    Nontrivial {
        evidence: Evidence,
    },
    Inconclusive {
        reason: InconclusiveReason,
        /// Why the cyclotomic witness does not settle this `s`, if tried.
        witness_note: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchEntry {
    pub s: u32,
    pub status: SearchStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmaxSearchReport {
    pub m: u32,
    pub d: u32,
    pub variant: Variant,
    /// Largest `s` proven to have only the trivial zero.
    pub certified_lower: Option<u32>,
    /// `s_max <= certified_upper`, from the first nontrivial zero.
    pub certified_upper: Option<u32>,
    pub entries: Vec<SearchEntry>,
    pub notes: Vec<String>,
}

impl SmaxSearchReport {
    pub fn has_inconclusive(&self) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e.status, SearchStatus::Inconclusive { .. }))
    }

    /// The exact value when both sides meet.
    pub fn exact(&self) -> Option<u32> {
        match (self.certified_lower, self.certified_upper) {
            (Some(l), Some(u)) if l == u => Some(l),
            _ => None,
        }
    }
}

fn total_generators(a: usize, r: usize, s: u32, variant: Variant) -> u128 {
    let k = s as u64 + 1;
    let blocks = binomial(a as u64, k) as u128 * binomial(r as u64, k) as u128;
    match variant {
        Variant::I0 => blocks,
        Variant::I1 => blocks * (1 + r as u128),
    }
}

/// Value of the summed generator at a point, from the evaluated `M` and
/// `M̌_alpha`.
pub fn summed_generator_value<F: FieldCtx>(
    f: &F,
    m_x: &Matrix<F::E>,
    check_x: &Matrix<F::E>,
    sel: &MinorSelector,
) -> F::E {
    let r = m_x.first().map_or(0, |row| row.len()) as i64;
    let block: Matrix<F::E> = sel
        .rows
        .iter()
        .map(|&i| {
            sel.cols
                .iter()
                .map(|&j| m_x[i as usize][j as usize].clone())
                .collect()
        })
        .collect();
    let mut acc = f.mul(
        &f.from_i64(r - sel.size() as i64),
        &linalg::determinant(f, &block),
    );
    for (t, &c) in sel.cols.iter().enumerate() {
        let mut replaced = block.clone();
        let mut all_zero = true;
        for (row, &i) in replaced.iter_mut().zip(&sel.rows) {
            row[t] = check_x[i as usize][c as usize].clone();
            all_zero &= f.is_zero(&row[t]);
        }
        if !all_zero {
            acc = f.add(&acc, &linalg::determinant(f, &replaced));
        }
    }
    acc
}

/// First `(alpha, block)` positions whose summed generator is nonzero at `x`,
/// by direct evaluation of every block.
pub fn first_nonvanishing_summed<F: FieldCtx>(
    f: &F,
    params: Params,
    s: u32,
    x: &[F::E],
) -> Result<Option<(usize, usize)>>
where
    F::E: Send + Sync,
{
    let m_x = build_m(params.m, params.d)?.evaluate(f, x);
    let (a, r) = (m_x.len(), m_x.first().map_or(0, |row| row.len()));
    let sels = selectors(a, r, s as usize + 1);
    let cols = params.cols();
    for (alpha_pos, alpha) in cols.iter().enumerate() {
        let check_x = build_m_check(params.m, params.d, alpha)?.evaluate(f, x);
        if check_x.iter().flatten().all(|e| f.is_zero(e)) {
            continue;
        }
        let hit = sels
            .par_iter()
            .position_first(|sel| !f.is_zero(&summed_generator_value(f, &m_x, &check_x, sel)));
        if let Some(b) = hit {
            return Ok(Some((alpha_pos, b)));
        }
    }
    Ok(None)
}

/// The witness reduced modulo a prime `p = 1 mod 2d` not dividing any
/// denominator.
pub fn witness_mod_p(w: &WitnessVector) -> Result<(ModularEmbedding, Vec<u64>)> {
    let mut start = 1u64 << 31;
    for _ in 0..64 {
        let emb = ModularEmbedding::new(w.field_order, start)?;
        let vals: Option<Vec<u64>> = w.assignment.iter().map(|e| emb.map(&e.value)).collect();
        if let Some(vals) = vals {
            return Ok((emb, vals));
        }
        start = emb.p + 1;
    }
    Err(IvhsError::Param(
        "no prime avoids the witness denominators".into(),
    ))
}

/// Outcome of testing the witness against the summed generators at rank `s`.
enum WitnessTest {
    AllVanish { alphas: usize },
    Nonvanishing { alpha: MultiIndex },
}

/// At a point where `M(x)` has rank exactly `s`, the summed generator of a
/// block is the first-order change of that `(s+1)`-minor along `M̌_alpha`
/// (the `(r - s - 1) det` term is zero). The differentials of the
/// `(s+1)`-minors at a rank-`s` matrix span `{y z^T}` with `y M = 0` and
/// `M z = 0`, so all summed generators vanish iff `Y M̌_alpha Z = 0` for
/// every `alpha`.
fn test_witness_i1(params: Params, s: u32, w: &WitnessVector) -> Result<WitnessTest> {
    let field = witness_field(params.d);
    let x: Vec<CycloElem> = w.values();
    let m_x = build_m(params.m, params.d)?.evaluate(&field, &x);
    let (a, r) = (m_x.len(), params.cols().len());
    if linalg::rank(&field, &m_x) != s as usize {
        return Err(IvhsError::Soundness(format!(
            "witness rank differs from {s}"
        )));
    }
    let right = linalg::nullspace(&field, &m_x, r);
    let transpose: Matrix<CycloElem> = (0..r)
        .map(|c| (0..a).map(|i| m_x[i][c].clone()).collect())
        .collect();
    let left = linalg::nullspace(&field, &transpose, a);
    for alpha in params.cols().iter() {
        let check_x = build_m_check(params.m, params.d, alpha)?.evaluate(&field, &x);
        for z in &right {
            let ez = linalg::mat_vec(&field, &check_x, z);
            for y in &left {
                let v = y.iter().zip(&ez).fold(field.zero(), |acc, (p, q)| {
                    field.add(&acc, &field.mul(p, q))
                });
                if !field.is_zero(&v) {
                    return Ok(WitnessTest::Nonvanishing {
                        alpha: alpha.clone(),
                    });
                }
            }
        }
    }
    Ok(WitnessTest::AllVanish { alphas: r })
}

fn run_groebner(
    params: Params,
    variant: Variant,
    s: u32,
    budget: &Budget,
    deadline: Instant,
) -> Result<SearchStatus> {
    let (a, r) = (params.rows().len(), params.cols().len());
    let total = total_generators(a, r, s, variant);
    if total > budget.max_generators as u128 {
        return Ok(SearchStatus::Inconclusive {
            reason: InconclusiveReason::GeneratorCap {
                generators: total.min(usize::MAX as u128) as usize,
                max_generators: budget.max_generators,
            },
            witness_note: None,
        });
    }
    let remaining = deadline.saturating_duration_since(Instant::now());
    if remaining.is_zero() {
        return Ok(SearchStatus::Inconclusive {
            reason: InconclusiveReason::TimeCap {
                seconds: budget.time_cap.as_secs(),
            },
            witness_note: None,
        });
    }
    let spec = match variant {
        Variant::I0 => minors_ideal_0(params.m, params.d, s)?,
        Variant::I1 => minors_ideal_1(params.m, params.d, s)?,
    };
    let degree_cap = budget.degree_cap.unwrap_or(2 * (s + 1));
    let out = groebner_zero_dim_test(&spec, degree_cap, remaining)?;
    Ok(match out.verdict {
        ZeroDimVerdict::ZeroAtOriginOnly => SearchStatus::ZeroOnly {
            evidence: Evidence::Groebner { stats: out.stats },
        },
        ZeroDimVerdict::NontrivialZeroFound { assignment } => SearchStatus::Nontrivial {
            evidence: Evidence::GroebnerWitness {
                assignment,
                stats: out.stats,
            },
        },
        ZeroDimVerdict::Inconclusive { reason } => SearchStatus::Inconclusive {
            reason,
            witness_note: None,
        },
    })
}

/// Ascending search for `s_max` of the chosen variant within `budget`; the
/// time cap bounds the whole search.
pub fn smax_search(m: u32, d: u32, variant: Variant, budget: &Budget) -> Result<SmaxSearchReport> {
    let params = Params::with_hypothesis(m, d)?;
    let deadline = Instant::now() + budget.time_cap;
    let bound = counting_bound(m, d)? as usize;
    let cert = elimination_certificate(m, d)?;
    let report = verify_certificate(&cert);
    if !report.verified {
        let v = report.violation.map(|v| v.to_string()).unwrap_or_default();
        return Err(IvhsError::Soundness(format!(
            "elimination certificate failed: {v}"
        )));
    }
    let witness = solve_witness(m, d)?;
    if witness.rank < bound {
        return Err(IvhsError::Soundness(format!(
            "nonzero witness of rank {} below the certified floor {bound}",
            witness.rank
        )));
    }
    let (a, r) = (params.rows().len(), params.cols().len());
    let mut notes = Vec::new();
    if variant == Variant::I1 {
        let all_zero = params
            .cols()
            .iter()
            .map(|alpha| build_m_check(m, d, alpha).map(|c| c.is_zero()))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|z| z);
        if all_zero {
            notes.push(
                "M̌_alpha vanishes identically for every alpha, so each summed generator is (r - s - 1) times a minor and I_s^1 has the zeros of I_s^0"
                    .to_string(),
            );
        }
    }
    notes.push(format!(
        "witness from the linear cycle has exact rank {}",
        witness.rank
    ));

    let mut entries: Vec<SearchEntry> = Vec::new();
    let mut s = 0u32;
    loop {
        let status = if s as usize + 1 > a.min(r) {
            SearchStatus::Nontrivial {
                evidence: Evidence::EmptyIdeal,
            }
        } else if (s as usize) < bound {
            match variant {
                Variant::I0 => SearchStatus::ZeroOnly {
                    evidence: Evidence::Certificate { bound },
                },
                Variant::I1 => SearchStatus::ZeroOnly {
                    evidence: Evidence::ContainsCertifiedI0 { bound },
                },
            }
        } else if (variant == Variant::I0 && witness.rank <= s as usize)
            || witness.rank < s as usize
        {
            SearchStatus::Nontrivial {
                evidence: Evidence::WitnessRank { rank: witness.rank },
            }
        } else if variant == Variant::I1 && witness.rank == s as usize {
            match test_witness_i1(params, s, &witness)? {
                WitnessTest::AllVanish { alphas } => SearchStatus::Nontrivial {
                    evidence: Evidence::WitnessGeneratorsVanish {
                        rank: witness.rank,
                        alphas,
                    },
                },
                WitnessTest::Nonvanishing { alpha } => {
                    let note = format!(
                        "witness of rank {s} is not a zero: Y M̌_alpha Z is nonzero for alpha {alpha}, so some summed generator is nonzero there"
                    );
                    match run_groebner(params, variant, s, budget, deadline)? {
                        SearchStatus::Inconclusive { reason, .. } => SearchStatus::Inconclusive {
                            reason,
                            witness_note: Some(note),
                        },
                        other => other,
                    }
                }
            }
        } else {
            run_groebner(params, variant, s, budget, deadline)?
        };
        let stop = matches!(status, SearchStatus::Nontrivial { .. });
        entries.push(SearchEntry { s, status });
        if stop {
            break;
        }
        s += 1;
    }

    let certified_upper = entries
        .iter()
        .find(|e| matches!(e.status, SearchStatus::Nontrivial { .. }))
        .map(|e| e.s - 1);
    let certified_lower = entries
        .iter()
        .rev()
        .find(|e| matches!(e.status, SearchStatus::ZeroOnly { .. }))
        .map(|e| e.s);
    if let (Some(l), Some(u)) = (certified_lower, certified_upper) {
        if l > u {
            return Err(IvhsError::Soundness(format!(
                "trivial-zero verdict at s = {l} above a nontrivial zero at s = {}",
                u + 1
            )));
        }
    }
    if let Some(l) = certified_lower {
        for e in entries.iter_mut().filter(|e| e.s < l) {
            if matches!(e.status, SearchStatus::Inconclusive { .. }) {
                e.status = SearchStatus::ZeroOnly {
                    evidence: Evidence::Monotone { from_s: l },
                };
            }
        }
    }
    Ok(SmaxSearchReport {
        m,
        d,
        variant,
        certified_lower,
        certified_upper,
        entries,
        notes,
    })
}
