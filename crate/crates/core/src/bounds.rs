//! Closed-form dimension counts, the `s_max` bounds and the counting lemma.
//!
//! Every ceiling of a square root is decided by integer or rational
//! comparisons; floating point only appears in the display-only `y0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{IvhsError, Result};
use crate::field::Rational;
use crate::multiindex::{count, MultiIndex, Params};

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        0
    } else {
        num_integer::binomial(n, k)
    }
}

/// `C(m/2 + d, d) - (m/2 + 1)^2`, the minimum of `#A_k`.
pub fn counting_bound(m: u32, d: u32) -> Result<i64> {
    let p = Params::new(m, d)?;
    let h = p.half() as u64;
    Ok(binomial(h + d as u64, d as u64) as i64 - ((h + 1) * (h + 1)) as i64)
}

/// `(a, b, r) = (#I_{(m/2)d-m-2}, #I_{(m/2+1)(d-2)}, #I_d)`.
pub fn hodge_dims(m: u32, d: u32) -> Result<(u64, u64, u64)> {
    let p = Params::new(m, d)?;
    let a = match u32::try_from(p.row_degree()) {
        Ok(n) => count(m, d, n)?,
        Err(_) => 0,
    };
    let b = count(m, d, (p.half() + 1) * (d.saturating_sub(2)))?;
    let r = count(m, d, d)?;
    Ok((a, b, r))
}

pub fn smax0_formula(m: u32, d: u32) -> Result<i64> {
    Params::with_hypothesis(m, d)?;
    Ok(counting_bound(m, d)? - 1)
}

/// `a - ceil(sqrt(((r-a)/2)^2 + b) - (r-a)/2)`.
///
/// With `D = r - a`, an integer `n >= 0` satisfies `n >= sqrt(D^2/4 + b) - D/2`
/// iff `2n + D >= 0` and `n (n + D) >= b`; the ceiling is the least such `n`.
/// A perfect square lands on the `<=` side, matching `ceil(x) - 1 < x <= ceil(x)`.
pub fn smax_check_formula(m: u32, d: u32) -> Result<i64> {
    let (a, b, r) = hodge_dims(m, d)?;
    let (a, b, r) = (a as i128, b as i128, r as i128);
    let big_d = r - a;
    let mut n: i128 = 0;
    while 2 * n + big_d < 0 || n * (n + big_d) < b {
        n += 1;
    }
    Ok((a - n) as i64)
}

/// `d^4 + (2/3)d^3 - 16d^2 + (7/3)d + 48` as an exact rational.
pub fn nl_radicand(d: u32) -> Rational {
    let q = |v: i64| Rational::from_integer(v.into());
    let d = q(d as i64);
    let d2 = &d * &d;
    let d3 = &d2 * &d;
    let d4 = &d3 * &d;
    d4 + Rational::new(2.into(), 3.into()) * d3 - q(16) * d2
        + Rational::new(7.into(), 3.into()) * d
        + q(48)
}

/// `(d-1)(d-2)(d-3)/6 - ceil(sqrt(radicand) - (d^2 - 7))` for surfaces.
pub fn nl_corollary(d: u32) -> Result<i64> {
    if d < 4 {
        return Err(IvhsError::Param(format!(
            "the surface corollary needs d >= 4, got {d}"
        )));
    }
    let radicand = nl_radicand(d);
    let c = (d as i64) * (d as i64) - 7;
    // least q >= 0 with q^2 >= radicand; then ceil(sqrt(radicand) - c) = q - c
    let mut q: i64 = 0;
    while Rational::from_integer((q * q).into()) < radicand {
        q += 1;
    }
    let d = d as i64;
    Ok((d - 1) * (d - 2) * (d - 3) / 6 - (q - c))
}

/// Display-only asymptotic `d/3 - 19/18`; never used in decisions.
pub fn y0_estimate(d: u32) -> f64 {
    d as f64 / 3.0 - 19.0 / 18.0
}

/// `b <= (a - s)(r - s)`; false once `s` exceeds `min(a, r)`.
pub fn transversality_inequality(m: u32, d: u32, s: u32) -> Result<bool> {
    let (a, b, r) = hodge_dims(m, d)?;
    let s = s as u64;
    if s > a.min(r) {
        return Ok(false);
    }
    Ok(b <= (a - s) * (r - s))
}

/// Largest `s <= min(a, r)` satisfying the transversality inequality.
pub fn largest_transversal_s(m: u32, d: u32) -> Result<Option<u32>> {
    let (a, _, r) = hodge_dims(m, d)?;
    let mut best = None;
    for s in 0..=a.min(r) as u32 {
        if transversality_inequality(m, d, s)? {
            best = Some(s);
        }
    }
    Ok(best)
}

/// `#A_k = #{(i, j) in I_rows x I_d : i + j = k}`. Since `k` lies in the box,
/// every `i <= k` in `I_rows` has `k - i` in `I_d`.
pub fn a_k_size(params: &Params, k: &MultiIndex) -> usize {
    params.rows().iter().filter(|i| i.divides(k)).count()
}

/// `(i, j)` pairs with `i + j = k`, ordered by decreasing `i`.
pub fn a_k_pairs(params: &Params, k: &MultiIndex) -> Vec<(MultiIndex, MultiIndex)> {
    params
        .rows()
        .iter()
        .rev()
        .filter_map(|i| k.checked_sub(i).map(|j| (i.clone(), j)))
        .collect()
}

/// Indices with `m/2 + 1` zero entries and the others equal to `d - 2`.
pub fn half_zero_indices(params: &Params) -> Vec<MultiIndex> {
    let top = params.max_entry();
    let zeros = params.half() as usize + 1;
    params
        .vars()
        .iter()
        .filter(|k| {
            k.entries().iter().filter(|&&e| e == 0).count() == zeros
                && k.entries().iter().all(|&e| e == 0 || e == top)
        })
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MadaramReport {
    pub m: u32,
    pub d: u32,
    pub bound: i64,
    pub min: usize,
    pub argmin: Vec<MultiIndex>,
    /// `min == bound` and every half-zero index attains it.
    pub equality_flag: bool,
    /// The argmin is exactly the set of half-zero indices.
    pub argmin_is_half_zero: bool,
}

/// Exhaustive minimum of `#A_k` over `k in I_{(m/2+1)d-m-2}`.
pub fn madaram_min(m: u32, d: u32) -> Result<MadaramReport> {
    let params = Params::with_hypothesis(m, d)?;
    let bound = counting_bound(m, d)?;
    let vars = params.vars();
    let sizes: Vec<usize> = vars
        .members()
        .par_iter()
        .map(|k| a_k_size(&params, k))
        .collect();
    let min = *sizes
        .iter()
        .min()
        .expect("I_vars is nonempty under the hypothesis");
    if (min as i64) < bound {
        let k = vars
            .get(sizes.iter().position(|&s| s == min).expect("min exists"))
            .clone();
        return Err(IvhsError::CountingLemma {
            k,
            found: min,
            bound: bound as usize,
        });
    }
    let argmin: Vec<MultiIndex> = vars
        .iter()
        .zip(&sizes)
        .filter(|(_, &s)| s == min)
        .map(|(k, _)| k.clone())
        .collect();
    let half = half_zero_indices(&params);
    let equality_flag = min as i64 == bound && half.iter().all(|k| a_k_size(&params, k) == min);
    let argmin_is_half_zero = {
        let mut h = half.clone();
        h.sort();
        h == argmin
    };
    Ok(MadaramReport {
        m,
        d,
        bound,
        min,
        argmin,
        equality_flag,
        argmin_is_half_zero,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectionReport {
    pub source: MultiIndex,
    pub target: MultiIndex,
    pub source_size: usize,
    pub target_size: usize,
    pub images_valid: bool,
    pub injective: bool,
}

impl InjectionReport {
    pub fn holds(&self) -> bool {
        self.images_valid && self.injective && self.source_size <= self.target_size
    }
}

/// Checks the map `A_{(k0-1, k1+1, ...)} -> A_{(k0, k1, ...)}` sending
/// `(i, j)` to `(i + e0 - e1, j)` when `i1 != 0` and to
/// `((0, i0, i2, ...), (k0, k1 - i0, j2, ...))` otherwise.
/// Requires `0 < k0 <= k1 < d - 2`.
pub fn yekeshab_injection_check(m: u32, d: u32, k: &MultiIndex) -> Result<InjectionReport> {
    let params = Params::with_hypothesis(m, d)?;
    let vars = params.vars();
    if !vars.contains(k) {
        return Err(IvhsError::NotInIndexSet {
            index: k.clone(),
            degree: vars.degree(),
        });
    }
    let (k0, k1) = (k.get(0), k.get(1));
    if !(0 < k0 && k0 <= k1 && k1 < params.max_entry()) {
        return Err(IvhsError::Param(format!(
            "injection needs 0 < k0 <= k1 < d - 2, got k = {k}"
        )));
    }
    let mut src = k.entries().to_vec();
    src[0] -= 1;
    src[1] += 1;
    let source = MultiIndex::new(src);
    let rows = params.rows();
    let cols = params.cols();
    let pairs = a_k_pairs(&params, &source);
    let mut images = Vec::with_capacity(pairs.len());
    let mut images_valid = true;
    for (i, j) in &pairs {
        let image = if i.get(1) != 0 {
            let mut ni = i.entries().to_vec();
            ni[0] += 1;
            ni[1] -= 1;
            Some((MultiIndex::new(ni), j.clone()))
        } else {
            let i0 = i.get(0);
            (k1 >= i0).then(|| {
                let mut ni = i.entries().to_vec();
                ni[0] = 0;
                ni[1] = i0;
                let mut nj = j.entries().to_vec();
                nj[0] = k0;
                nj[1] = k1 - i0;
                (MultiIndex::new(ni), MultiIndex::new(nj))
            })
        };
        match image {
            Some((ni, nj))
                if rows.contains(&ni) && cols.contains(&nj) && ni.raw_add(&nj)? == *k =>
            {
                images.push((ni, nj));
            }
            _ => images_valid = false,
        }
    }
    let mut sorted = images.clone();
    sorted.sort();
    sorted.dedup();
    let injective = sorted.len() == images.len();
    Ok(InjectionReport {
        source,
        target: k.clone(),
        source_size: pairs.len(),
        target_size: a_k_size(&params, k),
        images_valid,
        injective,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CProvenance {
    Probe,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CEstimate {
    pub value: u64,
    pub provenance: CProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub m: u32,
    pub d: u32,
    pub a: u64,
    pub b: u64,
    pub r: u64,
    pub smax0: i64,
    pub smax_check: i64,
    pub corollary_value: Option<i64>,
    /// `s -> [b <= (a-s)(r-s)]` for `0 <= s <= min(a, r)`.
    pub transversality_table: Vec<(u32, bool)>,
    pub madaram: MadaramReport,
    pub c_estimate: Option<CEstimate>,
    /// Display only.
    pub y0: Option<f64>,
}

pub fn bounds_report(m: u32, d: u32) -> Result<BoundsReport> {
    Params::with_hypothesis(m, d)?;
    let (a, b, r) = hodge_dims(m, d)?;
    let transversality_table = (0..=a.min(r) as u32)
        .map(|s| Ok((s, transversality_inequality(m, d, s)?)))
        .collect::<Result<Vec<_>>>()?;
    let surface = m == 2 && d >= 4;
    Ok(BoundsReport {
        m,
        d,
        a,
        b,
        r,
        smax0: smax0_formula(m, d)?,
        smax_check: smax_check_formula(m, d)?,
        corollary_value: if surface {
            Some(nl_corollary(d)?)
        } else {
            None
        },
        transversality_table,
        madaram: madaram_min(m, d)?,
        c_estimate: None,
        y0: surface.then(|| y0_estimate(d)),
    })
}

impl BoundsReport {
    /// Records a generic-rank estimate, which can never exceed `min(a, r)`.
    pub fn with_c_estimate(mut self, value: u64, provenance: CProvenance) -> Result<Self> {
        if value > self.a.min(self.r) {
            return Err(IvhsError::Param(format!(
                "c estimate {value} exceeds min(a, r)"
            )));
        }
        self.c_estimate = Some(CEstimate { value, provenance });
        Ok(self)
    }

    pub fn csv_header() -> &'static str {
        "m,d,a,b,r,smax0,smax_check,corollary,largest_transversal_s,madaram_min,madaram_equality,c_estimate,c_provenance,y0"
    }

    pub fn csv_row(&self) -> String {
        let largest = self
            .transversality_table
            .iter()
            .filter(|(_, ok)| *ok)
            .map(|(s, _)| *s)
            .max();
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.m,
            self.d,
            self.a,
            self.b,
            self.r,
            self.smax0,
            self.smax_check,
            opt(self.corollary_value.map(|v| v.to_string())),
            opt(largest.map(|v| v.to_string())),
            self.madaram.min,
            self.madaram.equality_flag,
            opt(self.c_estimate.as_ref().map(|c| c.value.to_string())),
            opt(self
                .c_estimate
                .as_ref()
                .map(|c| format!("{:?}", c.provenance).to_lowercase())),
            opt(self.y0.map(|v| format!("{v:.6}"))),
        )
    }
}
