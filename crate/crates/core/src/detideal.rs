//! Determinantal ideals of the Fermat IVHS matrices.
//!
//! `I_s^0` is generated by the `(s+1)`-minors of `M`. `I_s^1` adds, for every
//! `alpha in I_d` and every block `B`, the sum over all `j in I_d` of the
//! `B`-minor of `N_{j,alpha}`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{IvhsError, Result};
use crate::fermat_ivhs::{build_m, build_m_check, IvhsMatrix, ScaledVar};
use crate::multiindex::{IndexOrZero, IndexSet, MultiIndex, Params};
use crate::poly::{format_integer_coeff, Monomial, SparsePoly};

pub type IntPoly = SparsePoly<i64>;

fn entry_poly(v: &ScaledVar, vars: &IndexSet) -> IntPoly {
    match &v.index {
        IndexOrZero::Zero => IntPoly::zero(),
        IndexOrZero::Index(k) => {
            let pos = vars.position(k).expect("entry index is a variable") as u32;
            IntPoly::term(v.coefficient, Monomial::var(pos))
        }
    }
}

/// Exact determinant of a square grid of scaled variables, by Laplace
/// expansion along rows with a memo on the set of used columns.
pub fn det_expand(slice: &[Vec<ScaledVar>], vars: &IndexSet) -> IntPoly {
    let n = slice.len();
    assert!(
        slice.iter().all(|r| r.len() == n),
        "det_expand needs a square slice"
    );
    assert!(n < 64, "slice too large");
    if n == 0 {
        return IntPoly::constant(1);
    }
    let cells: Vec<Vec<IntPoly>> = slice
        .iter()
        .map(|r| r.iter().map(|v| entry_poly(v, vars)).collect())
        .collect();
    let mut memo: HashMap<u64, IntPoly> = HashMap::new();
    laplace(&cells, 0, 0, &mut memo)
}

/// Minor on rows `row..n` and the columns not in `used`.
fn laplace(
    cells: &[Vec<IntPoly>],
    row: usize,
    used: u64,
    memo: &mut HashMap<u64, IntPoly>,
) -> IntPoly {
    let n = cells.len();
    if row == n {
        return IntPoly::constant(1);
    }
    if let Some(p) = memo.get(&used) {
        return p.clone();
    }
    let mut acc = IntPoly::zero();
    let mut sign = 1i64;
    for col in 0..n {
        if used & (1 << col) != 0 {
            continue;
        }
        let cell = &cells[row][col];
        if !cell.is_zero() {
            let sub = laplace(cells, row + 1, used | (1 << col), memo);
            if !sub.is_zero() {
                let term = cell.mul(&sub);
                acc = if sign > 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
        }
        sign = -sign;
    }
    memo.insert(used, acc.clone());
    acc
}

/// A block of `M`: row and column positions, each strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinorSelector {
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
}

impl MinorSelector {
    pub fn new(rows: Vec<u32>, cols: Vec<u32>) -> Result<Self> {
        let increasing = |v: &[u32]| v.windows(2).all(|w| w[0] < w[1]);
        if rows.len() != cols.len() || !increasing(&rows) || !increasing(&cols) {
            return Err(IvhsError::Param(
                "minor selector needs equal-size increasing subsets".into(),
            ));
        }
        Ok(MinorSelector { rows, cols })
    }

    /// Selector from explicit row and column indices.
    pub fn from_indices(params: &Params, rows: &[MultiIndex], cols: &[MultiIndex]) -> Result<Self> {
        let locate = |set: &IndexSet, list: &[MultiIndex]| -> Result<Vec<u32>> {
            let mut pos = list
                .iter()
                .map(|i| {
                    set.position(i)
                        .map(|p| p as u32)
                        .ok_or_else(|| IvhsError::NotInIndexSet {
                            index: i.clone(),
                            degree: set.degree(),
                        })
                })
                .collect::<Result<Vec<u32>>>()?;
            pos.sort_unstable();
            Ok(pos)
        };
        Self::new(locate(&params.rows(), rows)?, locate(&params.cols(), cols)?)
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn row_indices(&self, params: &Params) -> Vec<MultiIndex> {
        let rows = params.rows();
        self.rows
            .iter()
            .map(|&r| rows.get(r as usize).clone())
            .collect()
    }

    pub fn col_indices(&self, params: &Params) -> Vec<MultiIndex> {
        let cols = params.cols();
        self.cols
            .iter()
            .map(|&c| cols.get(c as usize).clone())
            .collect()
    }

    pub fn slice(&self, mat: &IvhsMatrix) -> Vec<Vec<ScaledVar>> {
        self.rows
            .iter()
            .map(|&r| {
                self.cols
                    .iter()
                    .map(|&c| mat.entry(r as usize, c as usize).clone())
                    .collect()
            })
            .collect()
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<u32> = (0..k as u32).collect();
    loop {
        out.push(cur.clone());
        let Some(t) = (0..k).rev().find(|&t| (cur[t] as usize) < n - k + t) else {
            return out;
        };
        cur[t] += 1;
        for u in t + 1..k {
            cur[u] = cur[u - 1] + 1;
        }
    }
}

/// Blocks of size `s+1`, row subsets outer and column subsets inner.
pub fn selectors(a: usize, r: usize, size: usize) -> Vec<MinorSelector> {
    let row_sets = combinations(a, size);
    let col_sets = combinations(r, size);
    row_sets
        .iter()
        .flat_map(|rows| {
            col_sets.iter().map(move |cols| MinorSelector {
                rows: rows.clone(),
                cols: cols.clone(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    I0,
    I1,
}

impl std::str::FromStr for Variant {
    type Err = IvhsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I0" | "i0" => Ok(Variant::I0),
            "I1" | "i1" => Ok(Variant::I1),
            other => Err(IvhsError::Param(format!(
                "unknown variant {other:?}, expected I0 or I1"
            ))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::I0 => "I0",
            Variant::I1 => "I1",
        })
    }
}

/// Where a generator came from. `alpha` is the position of `alpha` in
/// `I_d` for the summed first-order generators and `None` for plain minors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub selector: Arc<MinorSelector>,
    pub alpha: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct Generator {
    pub poly: Arc<IntPoly>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub struct IdealSpec {
    pub params: Params,
    pub variant: Variant,
    pub s: u32,
    pub generators: Vec<Generator>,
    /// Set when `s+1` exceeds `min(a, r)` and the ideal is empty.
    pub note: Option<String>,
}

impl IdealSpec {
    /// Distinct nonzero generators in order of first appearance.
    pub fn distinct_generators(&self) -> Vec<Arc<IntPoly>> {
        let mut seen: std::collections::HashSet<&IntPoly> = std::collections::HashSet::new();
        let mut out = Vec::new();
        for g in &self.generators {
            if !g.poly.is_zero() && seen.insert(&g.poly) {
                out.push(g.poly.clone());
            }
        }
        out
    }

    pub fn is_homogeneous_of_degree(&self, degree: u32) -> bool {
        self.generators.iter().all(|g| {
            g.poly.is_zero() || (g.poly.is_homogeneous() && g.poly.total_degree() == Some(degree))
        })
    }

    pub fn num_variables(&self) -> usize {
        self.params.vars().len()
    }
}

fn empty_note(params: &Params, s: u32) -> Option<String> {
    let (a, r) = (params.rows().len(), params.cols().len());
    (s as usize + 1 > a.min(r)).then(|| {
        format!(
            "rank cannot exceed min(a, r) = {}, so no {}-minors exist",
            a.min(r),
            s + 1
        )
    })
}

/// Interns equal polynomials so duplicates share storage.
#[derive(Default)]
struct Interner {
    table: HashMap<IntPoly, Arc<IntPoly>>,
}

impl Interner {
    fn intern(&mut self, p: IntPoly) -> Arc<IntPoly> {
        if let Some(a) = self.table.get(&p) {
            return a.clone();
        }
        let a = Arc::new(p.clone());
        self.table.insert(p, a.clone());
        a
    }
}

fn minors_of_m(
    params: &Params,
    s: u32,
) -> Result<(IvhsMatrix, Vec<Arc<MinorSelector>>, Vec<IntPoly>)> {
    let m = build_m(params.m, params.d)?;
    let (a, r) = m.shape();
    let sels: Vec<Arc<MinorSelector>> = selectors(a, r, s as usize + 1)
        .into_iter()
        .map(Arc::new)
        .collect();
    let vars = params.vars();
    let dets: Vec<IntPoly> = sels
        .par_iter()
        .map(|b| det_expand(&b.slice(&m), &vars))
        .collect();
    Ok((m, sels, dets))
}

/// `I_s^0`: one generator per block of size `s+1`.
pub fn minors_ideal_0(m: u32, d: u32, s: u32) -> Result<IdealSpec> {
    let params = Params::with_hypothesis(m, d)?;
    if let Some(note) = empty_note(&params, s) {
        return Ok(IdealSpec {
            params,
            variant: Variant::I0,
            s,
            generators: Vec::new(),
            note: Some(note),
        });
    }
    let (_, sels, dets) = minors_of_m(&params, s)?;
    let mut interner = Interner::default();
    let generators = sels
        .into_iter()
        .zip(dets)
        .map(|(sel, p)| Generator {
            poly: interner.intern(p),
            provenance: Provenance {
                selector: sel,
                alpha: None,
            },
        })
        .collect();
    Ok(IdealSpec {
        params,
        variant: Variant::I0,
        s,
        generators,
        note: None,
    })
}

/// `sum_{j in I_d} det(N_{j,alpha}|_B)`. Columns outside `B` leave the block
/// equal to `M|_B`, contributing `(r - |B|) det(M|_B)`; each column `c` of
/// `B` contributes the block with column `c` taken from `M̌_alpha`.
pub fn summed_first_order_minor(
    m_mat: &IvhsMatrix,
    m_check: &IvhsMatrix,
    sel: &MinorSelector,
    det_m: &IntPoly,
    vars: &IndexSet,
) -> IntPoly {
    let r = m_mat.shape().1 as i64;
    let mut acc = det_m.scale(&(r - sel.size() as i64));
    let base = sel.slice(m_mat);
    for (t, &c) in sel.cols.iter().enumerate() {
        let column: Vec<ScaledVar> = sel
            .rows
            .iter()
            .map(|&row| m_check.entry(row as usize, c as usize).clone())
            .collect();
        if column.iter().all(ScaledVar::is_zero) {
            continue;
        }
        let mut block = base.clone();
        for (row, v) in block.iter_mut().zip(column) {
            row[t] = v;
        }
        acc = acc.add(&det_expand(&block, vars));
    }
    acc
}

/// `I_s^1`: the generators of `I_s^0` followed by the summed generators,
/// `alpha` outer and blocks inner.
pub fn minors_ideal_1(m: u32, d: u32, s: u32) -> Result<IdealSpec> {
    let params = Params::with_hypothesis(m, d)?;
    if let Some(note) = empty_note(&params, s) {
        return Ok(IdealSpec {
            params,
            variant: Variant::I1,
            s,
            generators: Vec::new(),
            note: Some(note),
        });
    }
    let (m_mat, sels, dets) = minors_of_m(&params, s)?;
    let vars = params.vars();
    let cols = params.cols();
    let checks: Vec<IvhsMatrix> = cols
        .iter()
        .map(|alpha| build_m_check(m, d, alpha))
        .collect::<Result<Vec<IvhsMatrix>>>()?;

    // per block, the summed polynomial for each alpha, deduplicated locally
    let per_block: Vec<(Vec<IntPoly>, Vec<u32>)> = sels
        .par_iter()
        .zip(dets.par_iter())
        .map(|(sel, det_m)| {
            let mut local: Vec<IntPoly> = Vec::new();
            let mut ids = Vec::with_capacity(checks.len());
            for check in &checks {
                let p = summed_first_order_minor(&m_mat, check, sel, det_m, &vars);
                let id = match local.iter().position(|q| *q == p) {
                    Some(id) => id,
                    None => {
                        local.push(p);
                        local.len() - 1
                    }
                };
                ids.push(id as u32);
            }
            (local, ids)
        })
        .collect();

    let mut interner = Interner::default();
    let mut generators = Vec::with_capacity(sels.len() * (1 + checks.len()));
    for (sel, p) in sels.iter().zip(dets) {
        generators.push(Generator {
            poly: interner.intern(p),
            provenance: Provenance {
                selector: sel.clone(),
                alpha: None,
            },
        });
    }
    let interned: Vec<(Vec<Arc<IntPoly>>, Vec<u32>)> = per_block
        .into_iter()
        .map(|(local, ids)| (local.into_iter().map(|p| interner.intern(p)).collect(), ids))
        .collect();
    for alpha in 0..checks.len() {
        for (sel, (polys, ids)) in sels.iter().zip(&interned) {
            generators.push(Generator {
                poly: polys[ids[alpha] as usize].clone(),
                provenance: Provenance {
                    selector: sel.clone(),
                    alpha: Some(alpha as u32),
                },
            });
        }
    }
    Ok(IdealSpec {
        params,
        variant: Variant::I1,
        s,
        generators,
        note: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Text,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = IvhsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "txt" | "text" => Ok(ExportFormat::Text),
            "json" => Ok(ExportFormat::Json),
            other => Err(IvhsError::UnsupportedFormat(other.to_string())),
        }
    }
}

fn var_name(vars: &IndexSet, v: u32) -> String {
    format!("x{}", vars.get(v as usize))
}

pub fn format_poly(p: &IntPoly, vars: &IndexSet) -> String {
    p.format_with(&|v| var_name(vars, v), &format_integer_coeff)
}

#[derive(Serialize)]
struct IdealJson<'a> {
    m: u32,
    d: u32,
    s: u32,
    variant: Variant,
    variables: Vec<String>,
    generators: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

/// Writes the distinct nonzero generators, one per line, after a header
/// naming the variables in additive order.
pub fn export_ideal(spec: &IdealSpec, format: ExportFormat) -> String {
    let vars = spec.params.vars();
    let gens: Vec<String> = spec
        .distinct_generators()
        .iter()
        .map(|p| format_poly(p, &vars))
        .collect();
    match format {
        ExportFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "# ideal m={} d={} s={} variant={} generators={}",
                spec.params.m,
                spec.params.d,
                spec.s,
                spec.variant,
                gens.len()
            );
            if let Some(note) = &spec.note {
                let _ = writeln!(out, "# note: {note}");
            }
            let names: Vec<String> = (0..vars.len() as u32).map(|v| var_name(&vars, v)).collect();
            let _ = writeln!(out, "# variables {}", names.join(" "));
            for g in gens {
                let _ = writeln!(out, "{g}");
            }
            out
        }
        ExportFormat::Json => {
            let doc = IdealJson {
                m: spec.params.m,
                d: spec.params.d,
                s: spec.s,
                variant: spec.variant,
                variables: (0..vars.len() as u32).map(|v| var_name(&vars, v)).collect(),
                generators: gens,
                note: spec.note.as_deref(),
            };
            serde_json::to_string_pretty(&doc).expect("ideal serializes")
        }
    }
}

/// An ideal read back from its text export.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedIdeal {
    pub params: Params,
    pub s: u32,
    pub variant: Variant,
    pub generators: Vec<IntPoly>,
}

fn header_field<'a>(line: &'a str, key: &str, lineno: usize) -> Result<&'a str> {
    line.split_whitespace()
        .find_map(|tok| tok.strip_prefix(key).and_then(|t| t.strip_prefix('=')))
        .ok_or_else(|| IvhsError::Parse {
            line: lineno,
            msg: format!("missing {key}= in header"),
        })
}

fn parse_num<T: std::str::FromStr>(text: &str, lineno: usize) -> Result<T> {
    text.parse().map_err(|_| IvhsError::Parse {
        line: lineno,
        msg: format!("bad number {text:?}"),
    })
}

fn parse_term(text: &str, vars: &IndexSet, lineno: usize) -> Result<(Monomial, i64)> {
    let mut coeff = 1i64;
    let mut pairs = Vec::new();
    for factor in text.split('*') {
        if let Some(rest) = factor.strip_prefix('x') {
            let (index, exp) = match rest.split_once('^') {
                Some((i, e)) => (i, parse_num::<u32>(e, lineno)?),
                None => (rest, 1),
            };
            let entries: Vec<u32> = serde_json::from_str(index).map_err(|_| IvhsError::Parse {
                line: lineno,
                msg: format!("bad variable {factor:?}"),
            })?;
            let k = MultiIndex::new(entries);
            let pos = vars.position(&k).ok_or_else(|| IvhsError::Parse {
                line: lineno,
                msg: format!("unknown variable {factor:?}"),
            })?;
            pairs.push((pos as u32, exp));
        } else {
            coeff = coeff
                .checked_mul(parse_num::<i64>(factor, lineno)?)
                .ok_or_else(|| IvhsError::Parse {
                    line: lineno,
                    msg: "coefficient overflow".into(),
                })?;
        }
    }
    Ok((Monomial::from_pairs(pairs), coeff))
}

pub fn parse_poly(line: &str, vars: &IndexSet, lineno: usize) -> Result<IntPoly> {
    let mut poly = IntPoly::zero();
    let mut sign = 1i64;
    let mut expect_term = true;
    for tok in line.split_whitespace() {
        if expect_term {
            let (neg, body) = match tok.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, tok),
            };
            let (mono, c) = parse_term(body, vars, lineno)?;
            let c = if neg { -c } else { c } * sign;
            poly.add_term(mono, &c);
            expect_term = false;
        } else {
            sign = match tok {
                "+" => 1,
                "-" => -1,
                _ => {
                    return Err(IvhsError::Parse {
                        line: lineno,
                        msg: format!("expected + or -, found {tok:?}"),
                    })
                }
            };
            expect_term = true;
        }
    }
    if expect_term {
        return Err(IvhsError::Parse {
            line: lineno,
            msg: "dangling operator or empty line".into(),
        });
    }
    Ok(poly)
}

/// Inverse of [`export_ideal`] in text format.
pub fn parse_ideal(text: &str) -> Result<ParsedIdeal> {
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l));
    let (lineno, head) = lines.next().ok_or(IvhsError::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    if !head.starts_with("# ideal ") {
        return Err(IvhsError::Parse {
            line: lineno,
            msg: "missing '# ideal' header".into(),
        });
    }
    let m = parse_num(header_field(head, "m", lineno)?, lineno)?;
    let d = parse_num(header_field(head, "d", lineno)?, lineno)?;
    let s = parse_num(header_field(head, "s", lineno)?, lineno)?;
    let variant: Variant = header_field(head, "variant", lineno)?.parse()?;
    let count: usize = parse_num(header_field(head, "generators", lineno)?, lineno)?;
    let params = Params::with_hypothesis(m, d)?;
    let vars = params.vars();
    let mut generators = Vec::new();
    let mut saw_vars = false;
    for (lineno, line) in lines {
        if let Some(rest) = line.strip_prefix("# variables") {
            let names: Vec<String> = (0..vars.len() as u32).map(|v| var_name(&vars, v)).collect();
            if rest.split_whitespace().ne(names.iter().map(String::as_str)) {
                return Err(IvhsError::Parse {
                    line: lineno,
                    msg: "variable list does not match (m, d)".into(),
                });
            }
            saw_vars = true;
        } else if line.starts_with('#') || line.trim().is_empty() {
            continue;
        } else {
            generators.push(parse_poly(line, &vars, lineno)?);
        }
    }
    if !saw_vars {
        return Err(IvhsError::Parse {
            line: 1,
            msg: "missing '# variables' line".into(),
        });
    }
    if generators.len() != count {
        return Err(IvhsError::Parse {
            line: 1,
            msg: format!(
                "header announces {count} generators, found {}",
                generators.len()
            ),
        });
    }
    Ok(ParsedIdeal {
        params,
        s,
        variant,
        generators,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealManifest {
    pub m: u32,
    pub d: u32,
    pub s: u32,
    pub variant: Variant,
    pub generator_count: usize,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Manifest for the text export of `spec`.
pub fn ideal_manifest(spec: &IdealSpec) -> IdealManifest {
    let text = export_ideal(spec, ExportFormat::Text);
    IdealManifest {
        m: spec.params.m,
        d: spec.params.d,
        s: spec.s,
        variant: spec.variant,
        generator_count: spec.distinct_generators().len(),
        sha256: sha256_hex(text.as_bytes()),
    }
}
