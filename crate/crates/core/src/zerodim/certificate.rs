//! Elimination certificates: for every variable `x_k`, taken in decreasing
//! order, a `bound x bound` block of `M` whose determinant is `x_k^bound`
//! once all higher variables vanish.

use serde::{Deserialize, Serialize};

use crate::bounds::{a_k_pairs, counting_bound};
use crate::error::{IvhsError, Result};
use crate::multiindex::{add, IndexOrZero, MultiIndex, Params};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateStep {
    pub k: MultiIndex,
    /// `#A_k`.
    pub f: usize,
    pub rows: Vec<MultiIndex>,
    pub cols: Vec<MultiIndex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationCertificate {
    pub m: u32,
    pub d: u32,
    pub bound: usize,
    pub steps: Vec<CertificateStep>,
}

impl EliminationCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| IvhsError::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }
}

/// Builds the certificate; fails with the offending `k` if some `A_k` is
/// smaller than the bound.
pub fn elimination_certificate(m: u32, d: u32) -> Result<EliminationCertificate> {
    let params = Params::with_hypothesis(m, d)?;
    let bound = counting_bound(m, d)? as usize;
    let vars = params.vars();
    let mut steps = Vec::with_capacity(vars.len());
    for k in vars.iter().rev() {
        let pairs = a_k_pairs(&params, k);
        if pairs.len() < bound {
            return Err(IvhsError::CountingLemma {
                k: k.clone(),
                found: pairs.len(),
                bound,
            });
        }
        let f = pairs.len();
        let (rows, cols) = pairs.into_iter().take(bound).unzip();
        steps.push(CertificateStep {
            k: k.clone(),
            f,
            rows,
            cols,
        });
    }
    Ok(EliminationCertificate { m, d, bound, steps })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    Header,
    Coverage,
    Membership,
    Size,
    /// `rows[e] + cols[e] != k`.
    Diagonal,
    /// Rows not strictly decreasing.
    RowOrder,
    /// For `e < e'`, `rows[e] + cols[e']` is a variable not above `k`.
    Triangularity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub k: Option<MultiIndex>,
    pub e: Option<usize>,
    pub e2: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if let Some(k) = &self.k {
            write!(f, " at k={k}")?;
        }
        if let Some(e) = self.e {
            write!(f, " e={e}")?;
        }
        if let Some(e2) = self.e2 {
            write!(f, " e'={e2}")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub verified: bool,
    /// One line per induction step, highest `k` first.
    pub chain: Vec<String>,
    pub violation: Option<Violation>,
}

fn fail(chain: Vec<String>, v: Violation) -> CertificateReport {
    CertificateReport {
        verified: false,
        chain,
        violation: Some(v),
    }
}

fn violation(
    kind: ViolationKind,
    k: Option<&MultiIndex>,
    e: Option<usize>,
    e2: Option<usize>,
    msg: String,
) -> Violation {
    Violation {
        kind,
        k: k.cloned(),
        e,
        e2,
        message: msg,
    }
}

/// Re-checks a certificate from its own data.
///
/// Within a step the rows decrease, so for `e < e'` the entry at
/// `(rows[e], cols[e'])` is `x_{k + rows[e] - rows[e']}`, a variable above
/// `k`, or zero. With every higher variable already zero the block is
/// triangular with `x_k` on the diagonal, its determinant is `x_k^bound`,
/// and vanishing of the `bound`-minors forces `x_k = 0`.
pub fn verify_certificate(cert: &EliminationCertificate) -> CertificateReport {
    let mut chain = Vec::new();
    let params = match Params::with_hypothesis(cert.m, cert.d) {
        Ok(p) => p,
        Err(e) => {
            return fail(
                chain,
                violation(ViolationKind::Header, None, None, None, e.to_string()),
            )
        }
    };
    let expected_bound = counting_bound(cert.m, cert.d).expect("valid params") as usize;
    if cert.bound != expected_bound {
        let msg = format!(
            "bound {} differs from C(m/2+d,d) - (m/2+1)^2 = {expected_bound}",
            cert.bound
        );
        return fail(
            chain,
            violation(ViolationKind::Header, None, None, None, msg),
        );
    }
    let (rows, cols, vars) = (params.rows(), params.cols(), params.vars());
    let expected: Vec<&MultiIndex> = vars.iter().rev().collect();
    let listed: Vec<&MultiIndex> = cert.steps.iter().map(|s| &s.k).collect();
    if listed != expected {
        let at = listed
            .iter()
            .zip(&expected)
            .position(|(a, b)| a != b)
            .unwrap_or(listed.len().min(expected.len()));
        let msg = format!(
            "steps must list all {} variables in decreasing order; mismatch at step {at}",
            expected.len()
        );
        return fail(
            chain,
            violation(
                ViolationKind::Coverage,
                cert.steps.get(at).map(|s| &s.k),
                None,
                None,
                msg,
            ),
        );
    }
    let d = cert.d;
    for step in &cert.steps {
        let k = &step.k;
        let n = cert.bound;
        if step.rows.len() != n || step.cols.len() != n || step.f < n {
            let msg = format!(
                "{} rows, {} cols, f = {}, bound {n}",
                step.rows.len(),
                step.cols.len(),
                step.f
            );
            return fail(
                chain,
                violation(ViolationKind::Size, Some(k), None, None, msg),
            );
        }
        for e in 0..n {
            if !rows.contains(&step.rows[e]) || !cols.contains(&step.cols[e]) {
                let msg = format!(
                    "pair ({}, {}) is not in I_rows x I_d",
                    step.rows[e], step.cols[e]
                );
                return fail(
                    chain,
                    violation(ViolationKind::Membership, Some(k), Some(e), None, msg),
                );
            }
            if step.rows[e].raw_add(&step.cols[e]).ok().as_ref() != Some(k) {
                let msg = format!(
                    "rows[{e}] + cols[{e}] = {} + {} is not k",
                    step.rows[e], step.cols[e]
                );
                return fail(
                    chain,
                    violation(ViolationKind::Diagonal, Some(k), Some(e), Some(e), msg),
                );
            }
        }
        for e in 0..n {
            for e2 in e + 1..n {
                match add(&step.rows[e], &step.cols[e2], d).expect("equal widths") {
                    IndexOrZero::Zero => {}
                    IndexOrZero::Index(t) if t > *k => {}
                    IndexOrZero::Index(t) => {
                        let msg = format!("entry (rows[{e}], cols[{e2}]) is x{t}, not above x{k}");
                        return fail(
                            chain,
                            violation(
                                ViolationKind::Triangularity,
                                Some(k),
                                Some(e),
                                Some(e2),
                                msg,
                            ),
                        );
                    }
                }
            }
        }
        for e in 1..n {
            if step.rows[e - 1] <= step.rows[e] {
                let msg = format!(
                    "rows[{}] = {} is not above rows[{e}] = {}",
                    e - 1,
                    step.rows[e - 1],
                    step.rows[e]
                );
                return fail(
                    chain,
                    violation(ViolationKind::RowOrder, Some(k), Some(e - 1), Some(e), msg),
                );
            }
        }
        chain.push(format!("x{k}: block of size {n} (from #A_k = {}) is triangular mod higher variables, det = x{k}^{n}, so x{k} = 0", step.f));
    }
    chain.push(format!(
        "all {} variables vanish whenever every {}-minor of M vanishes",
        vars.len(),
        cert.bound
    ));
    CertificateReport {
        verified: true,
        chain,
        violation: None,
    }
}
