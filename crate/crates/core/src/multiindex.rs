//! Box-bounded exponent vectors and the index sets `I_N`.
//!
//! `I_N` is the set of `(m+2)`-tuples with entries in `[0, d-2]` summing to
//! `N`. These tuples index the monomial basis of the Fermat Jacobian ring
//! and therefore every row, column and variable of the IVHS matrices.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{IvhsError, Result};

/// Hypersurface parameters: dimension `m` (even) and degree `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub m: u32,
    pub d: u32,
}

impl Params {
    pub fn new(m: u32, d: u32) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(IvhsError::Param(format!(
                "m must be even and >= 2, got {m}"
            )));
        }
        if d < 2 {
            return Err(IvhsError::Param(format!("d must be >= 2, got {d}")));
        }
        Ok(Params { m, d })
    }

    /// Parameters that also satisfy `d >= 2 + 4/m`, i.e. the row degree
    /// `(m/2)d - m - 2` is nonnegative.
    pub fn with_hypothesis(m: u32, d: u32) -> Result<Self> {
        let p = Self::new(m, d)?;
        p.check_hypothesis()?;
        Ok(p)
    }

    pub fn check_hypothesis(&self) -> Result<()> {
        let lhs = self.m * self.d;
        let rhs = 2 * self.m + 4;
        if lhs < rhs {
            return Err(IvhsError::Hypothesis {
                m: self.m,
                d: self.d,
                lhs,
                rhs,
            });
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.m as usize + 2
    }

    pub fn max_entry(&self) -> u32 {
        self.d - 2
    }

    pub fn half(&self) -> u32 {
        self.m / 2
    }

    /// Degree of the row index set, `(m/2)d - m - 2`. Negative when the
    /// hypothesis fails.
    pub fn row_degree(&self) -> i64 {
        (self.half() * self.d) as i64 - self.m as i64 - 2
    }

    /// Degree of the column index set, `d`.
    pub fn col_degree(&self) -> u32 {
        self.d
    }

    /// Degree of the variable index set, `(m/2 + 1)d - m - 2`.
    pub fn var_degree(&self) -> i64 {
        ((self.half() + 1) * self.d) as i64 - self.m as i64 - 2
    }

    /// Largest degree with a nonempty `I_N`.
    pub fn top_degree(&self) -> u32 {
        (self.d - 2) * (self.m + 2)
    }

    pub fn rows(&self) -> Arc<IndexSet> {
        IndexSet::cached(*self, self.row_degree().max(0) as u32)
    }

    pub fn cols(&self) -> Arc<IndexSet> {
        IndexSet::cached(*self, self.d)
    }

    pub fn vars(&self) -> Arc<IndexSet> {
        IndexSet::cached(*self, self.var_degree().max(0) as u32)
    }
}

/// An exponent vector. Ordering is lexicographic with the leftmost entry
/// most significant, which is an additive order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct MultiIndex {
    entries: Vec<u32>,
    degree: u32,
}

impl TryFrom<Vec<u32>> for MultiIndex {
    type Error = IvhsError;

    fn try_from(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(IvhsError::Param("empty multi-index".into()));
        }
        Ok(MultiIndex::new(entries))
    }
}

impl From<MultiIndex> for Vec<u32> {
    fn from(i: MultiIndex) -> Self {
        i.entries
    }
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        let degree = entries.iter().sum();
        MultiIndex { entries, degree }
    }

    pub fn zero(width: usize) -> Self {
        MultiIndex {
            entries: vec![0; width],
            degree: 0,
        }
    }

    pub fn unit(width: usize, e: usize) -> Self {
        let mut entries = vec![0; width];
        entries[e] = 1;
        MultiIndex { entries, degree: 1 }
    }

    /// Builds an index from signed entries, rejecting negatives.
    pub fn from_signed(entries: &[i64]) -> Result<Self> {
        let mut out = Vec::with_capacity(entries.len());
        for &v in entries {
            if v < 0 {
                return Err(IvhsError::Param(format!(
                    "negative entry {v} in multi-index"
                )));
            }
            out.push(v as u32);
        }
        Ok(MultiIndex::new(out))
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, e: usize) -> u32 {
        self.entries[e]
    }

    pub fn in_box(&self, max_entry: u32) -> bool {
        self.entries.iter().all(|&v| v <= max_entry)
    }

    /// Plain componentwise sum with no box check.
    pub fn raw_add(&self, other: &MultiIndex) -> Result<MultiIndex> {
        check_len(self, other)?;
        Ok(MultiIndex {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
            degree: self.degree + other.degree,
        })
    }

    /// Componentwise difference, `None` if some entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if self.len() != other.len() {
            return None;
        }
        let mut entries = Vec::with_capacity(self.len());
        for (a, b) in self.entries.iter().zip(&other.entries) {
            entries.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex {
            entries,
            degree: self.degree - other.degree,
        })
    }

    /// `true` if `other - self` is nonnegative.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.len() == other.len() && self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }

    /// Entrywise complement `(d-2) - i`.
    pub fn complement(&self, max_entry: u32) -> MultiIndex {
        MultiIndex::new(self.entries.iter().map(|&v| max_entry - v).collect())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.entries.cmp(&other.entries)
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (n, v) in self.entries.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Either a valid variable index or the distinguished zero entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexOrZero {
    Index(MultiIndex),
    Zero,
}

impl IndexOrZero {
    pub fn is_zero(&self) -> bool {
        matches!(self, IndexOrZero::Zero)
    }

    pub fn index(&self) -> Option<&MultiIndex> {
        match self {
            IndexOrZero::Index(i) => Some(i),
            IndexOrZero::Zero => None,
        }
    }
}

fn check_len(i: &MultiIndex, j: &MultiIndex) -> Result<()> {
    if i.len() != j.len() {
        return Err(IvhsError::LengthMismatch {
            left: i.len(),
            right: j.len(),
        });
    }
    Ok(())
}

/// The members of `I_N` in increasing lexicographic order.
#[derive(Debug, Clone)]
pub struct IndexSet {
    params: Params,
    degree: u32,
    members: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

type IndexCache = HashMap<(Params, u32), Arc<IndexSet>>;

static INDEX_CACHE: Lazy<Mutex<IndexCache>> = Lazy::new(|| Mutex::new(HashMap::new()));

impl IndexSet {
    fn build(params: Params, degree: u32) -> IndexSet {
        let width = params.width();
        let max = params.max_entry();
        let mut members = Vec::new();
        if degree <= params.top_degree() {
            let mut current = vec![0u32; width];
            fill(&mut current, 0, degree, max, &mut members);
        }
        let position = members
            .iter()
            .enumerate()
            .map(|(n, i)| (i.clone(), n))
            .collect();
        IndexSet {
            params,
            degree,
            members,
            position,
        }
    }

    /// Shared, lazily built copy of `I_N`.
    pub fn cached(params: Params, degree: u32) -> Arc<IndexSet> {
        let mut cache = INDEX_CACHE.lock().expect("index cache poisoned");
        cache
            .entry((params, degree))
            .or_insert_with(|| Arc::new(IndexSet::build(params, degree)))
            .clone()
    }

    /// Rebuilds a set from serialized members, checking every invariant.
    pub fn from_members(params: Params, degree: u32, members: Vec<MultiIndex>) -> Result<IndexSet> {
        let expected = IndexSet::cached(params, degree);
        if members != expected.members {
            return Err(IvhsError::Param(format!(
                "member list does not match I_{degree} for m={}, d={}",
                params.m, params.d
            )));
        }
        Ok((*expected).clone())
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, n: usize) -> &MultiIndex {
        &self.members[n]
    }

    pub fn position(&self, i: &MultiIndex) -> Option<usize> {
        self.position.get(i).copied()
    }

    pub fn contains(&self, i: &MultiIndex) -> bool {
        self.position.contains_key(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.members.iter()
    }

    /// JSON array of integer arrays, in additive order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.members).expect("index set serializes")
    }

    pub fn from_json(params: Params, degree: u32, text: &str) -> Result<IndexSet> {
        let members: Vec<MultiIndex> =
            serde_json::from_str(text).map_err(|e| IvhsError::Parse {
                line: e.line(),
                msg: e.to_string(),
            })?;
        Self::from_members(params, degree, members)
    }
}

fn fill(current: &mut [u32], pos: usize, remaining: u32, max: u32, out: &mut Vec<MultiIndex>) {
    let width = current.len();
    if pos + 1 == width {
        if remaining <= max {
            current[pos] = remaining;
            out.push(MultiIndex::new(current.to_vec()));
        }
        return;
    }
    let slots_after = (width - pos - 1) as u32;
    let lo = remaining.saturating_sub(slots_after * max);
    let hi = remaining.min(max);
    for v in lo..=hi {
        current[pos] = v;
        fill(current, pos + 1, remaining - v, max, out);
    }
}

/// All members of `I_N` for the given parameters.
pub fn enumerate_index_set(m: u32, d: u32, n: u32) -> Result<Arc<IndexSet>> {
    let params = Params::new(m, d)?;
    Ok(IndexSet::cached(params, n))
}

/// `|I_N|` as the coefficient of `z^N` in `(1 + z + ... + z^{d-2})^{m+2}`.
pub fn count(m: u32, d: u32, n: u32) -> Result<u64> {
    let params = Params::new(m, d)?;
    Ok(generating_coefficient(params, n))
}

fn generating_coefficient(params: Params, n: u32) -> u64 {
    let top = params.top_degree() as usize;
    if n as usize > top {
        return 0;
    }
    let max = params.max_entry() as usize;
    let mut poly = vec![1u64];
    for _ in 0..params.width() {
        let mut next = vec![0u64; poly.len() + max];
        for (deg, &c) in poly.iter().enumerate() {
            for e in 0..=max {
                next[deg + e] += c;
            }
        }
        poly = next;
    }
    poly[n as usize]
}

/// `i + j` when every entry stays at most `d - 2`, the zero entry otherwise.
pub fn add(i: &MultiIndex, j: &MultiIndex, d: u32) -> Result<IndexOrZero> {
    let sum = i.raw_add(j)?;
    Ok(if d >= 2 && sum.in_box(d - 2) {
        IndexOrZero::Index(sum)
    } else {
        IndexOrZero::Zero
    })
}

/// Result of the first-order sum `i +_alpha j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaSum {
    pub index: IndexOrZero,
    pub coefficient: u32,
    /// The unique overflowing coordinate, when there is exactly one.
    pub overflow: Option<usize>,
}

impl AlphaSum {
    fn zero(overflow: Option<usize>) -> Self {
        AlphaSum {
            index: IndexOrZero::Zero,
            coefficient: 0,
            overflow,
        }
    }
}

/// Coordinates `e` with `i_e + j_e >= d - 1`.
pub fn overflow_coordinates(i: &MultiIndex, j: &MultiIndex, d: u32) -> Result<Vec<usize>> {
    check_len(i, j)?;
    Ok((0..i.len())
        .filter(|&e| i.get(e) + j.get(e) + 1 >= d)
        .collect())
}

/// `i +_alpha j = i + j + alpha - d e_ě` with coefficient `alpha_ě`, defined
/// when exactly one coordinate `ě` overflows. The result is the zero entry
/// when no coordinate or several overflow, when `alpha_ě = 0`, or when the
/// corrected tuple leaves the box `[0, d-2]^{m+2}`.
pub fn add_alpha(i: &MultiIndex, j: &MultiIndex, alpha: &MultiIndex, d: u32) -> Result<AlphaSum> {
    check_len(i, alpha)?;
    let over = overflow_coordinates(i, j, d)?;
    if over.len() != 1 {
        return Ok(AlphaSum::zero(None));
    }
    let e_check = over[0];
    let coefficient = alpha.get(e_check);
    if coefficient == 0 {
        return Ok(AlphaSum::zero(Some(e_check)));
    }
    let max = d as i64 - 2;
    let mut entries = Vec::with_capacity(i.len());
    for e in 0..i.len() {
        let mut v = i.get(e) as i64 + j.get(e) as i64 + alpha.get(e) as i64;
        if e == e_check {
            v -= d as i64;
        }
        if v < 0 || v > max {
            return Ok(AlphaSum::zero(Some(e_check)));
        }
        entries.push(v as u32);
    }
    Ok(AlphaSum {
        index: IndexOrZero::Index(MultiIndex::new(entries)),
        coefficient,
        overflow: Some(e_check),
    })
}

/// The fixed additive order (lexicographic, leftmost entry most significant).
pub fn compare_additive(i: &MultiIndex, j: &MultiIndex) -> Result<Ordering> {
    check_len(i, j)?;
    Ok(i.cmp(j))
}
