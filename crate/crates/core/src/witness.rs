//! Exact witnesses attaining the minimal rank, built from the linear cycle
//! `X_0 - z X_1 = X_2 - z X_3 = ... = X_m - z X_{m+1} = 0` with `z^d = -1`.
//!
//! Instead of integrating over the cycle, the witness is any nonzero `x` with
//! `sum_j v_j x_{i+j} = 0` for every row index `i` and every `v` in the
//! degree-`d` part of the cycle's ideal inside the Jacobian ring, that is
//! `M(x) v = 0` on the whole tangent space.
//!
//! Jacobian reduction at the Fermat point: `X_e^{d-1}` spans the Jacobian
//! ideal, so a monomial with some exponent `>= d-1` is zero in the quotient.
//!
//! All arithmetic is in `Q(w)` with `w = exp(pi i / d)`, and `z = w^u` for an
//! odd `u` (the default cycle uses `u = 1`).

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds::counting_bound;
use crate::cyclotomic::{CycloElem, CyclotomicField};
use crate::error::{IvhsError, Result};
use crate::fermat_ivhs::build_m;
use crate::field::{is_prime, mul_mod, pow_mod, FieldCtx, Rational};
use crate::linalg::{self, Matrix};
use crate::multiindex::{add, IndexOrZero, IndexSet, MultiIndex, Params};

/// Relative singular-value threshold for the floating-point rank.
pub const FLOAT_RANK_THRESHOLD: f64 = 1e-9;

/// The field holding `z`: `Q(w)` with `w` of order `2d`.
pub fn witness_field(d: u32) -> CyclotomicField {
    CyclotomicField::new(2 * d)
}

/// Drops every monomial with an exponent `>= d - 1`.
pub fn jacobian_reduce(exponents: &[u32], d: u32) -> Option<&[u32]> {
    exponents.iter().all(|&e| e + 1 < d).then_some(exponents)
}

/// The products `(X_{2u'} - z X_{2u'+1}) X^e`, `deg e = d - 1`, after
/// Jacobian reduction, indexed by `I_d` positions; zero vectors are skipped.
pub fn cycle_generators_with(m: u32, d: u32, u: u32) -> Result<Vec<Vec<CycloElem>>> {
    let params = Params::with_hypothesis(m, d)?;
    if u.is_multiple_of(2) || u.gcd(&(2 * d)) != 1 {
        return Err(IvhsError::Param(format!(
            "z = w^{u} is not a primitive {}-th root",
            2 * d
        )));
    }
    let field = witness_field(d);
    let zeta = field.root_power(u as i64);
    let minus_zeta = field.neg(&zeta);
    let cols = params.cols();
    let shifts = IndexSet::cached(params, d - 1);
    let width = params.width();
    let mut gens = Vec::new();
    for pair in 0..=(m as usize / 2) {
        for e in shifts.iter() {
            let mut v = vec![field.zero(); cols.len()];
            for (var, coeff) in [(2 * pair, field.one()), (2 * pair + 1, minus_zeta.clone())] {
                let mut exps = e.entries().to_vec();
                exps[var] += 1;
                if jacobian_reduce(&exps, d).is_some() {
                    let pos = cols
                        .position(&MultiIndex::new(exps))
                        .expect("reduced monomial lies in I_d");
                    v[pos] = field.add(&v[pos], &coeff);
                }
            }
            debug_assert_eq!(width, e.len());
            if v.iter().any(|c| !field.is_zero(c)) {
                gens.push(v);
            }
        }
    }
    Ok(gens)
}

/// Tangent space of the cycle with `z = w^u` as independent vectors indexed by
/// `I_d` positions.
pub fn cycle_tangent_space_with(m: u32, d: u32, u: u32) -> Result<Vec<Vec<CycloElem>>> {
    let field = witness_field(d);
    let gens = cycle_generators_with(m, d, u)?;
    let keep = linalg::independent_subset(&field, &gens);
    Ok(keep.into_iter().map(|n| gens[n].clone()).collect())
}

/// Tangent space of the standard cycle (`z = w`).
pub fn cycle_tangent_space(m: u32, d: u32) -> Result<Vec<Vec<CycloElem>>> {
    cycle_tangent_space_with(m, d, 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub k: MultiIndex,
    /// Rational coefficients on `1, w, w^2, ...`.
    pub value: CycloElem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessChecks {
    pub nonzero: bool,
    pub annihilates_tangent_space: bool,
    pub float_rank: usize,
    pub tangent_dimension: usize,
    pub solution_dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessVector {
    pub m: u32,
    pub d: u32,
    /// Order of `w`; always `2d`.
    pub field_order: u32,
    /// The cycle uses `z = w^zeta_power`.
    pub zeta_power: u32,
    pub rank: usize,
    /// One entry per variable, in additive order.
    pub assignment: Vec<WitnessEntry>,
    pub checks: WitnessChecks,
}

/// Rows of the linear system `M(x) v = 0` in the unknowns `x`.
fn annihilation_system(
    params: Params,
    field: &CyclotomicField,
    tangent: &[Vec<CycloElem>],
) -> Result<Matrix<CycloElem>> {
    let rows = params.rows();
    let cols = params.cols();
    let vars = params.vars();
    let d = params.d;
    let mut system = Vec::with_capacity(rows.len() * tangent.len());
    for i in rows.iter() {
        let targets: Vec<Option<usize>> = cols
            .iter()
            .map(|j| match add(i, j, d) {
                Ok(IndexOrZero::Index(k)) => Ok(vars.position(&k)),
                Ok(IndexOrZero::Zero) => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        for v in tangent {
            let mut eq = vec![field.zero(); vars.len()];
            for (c, t) in targets.iter().enumerate() {
                if let Some(k) = t {
                    if !field.is_zero(&v[c]) {
                        eq[*k] = field.add(&eq[*k], &v[c]);
                    }
                }
            }
            if eq.iter().any(|x| !field.is_zero(x)) {
                system.push(eq);
            }
        }
    }
    Ok(system)
}

fn evaluate_m(
    m: u32,
    d: u32,
    field: &CyclotomicField,
    x: &[CycloElem],
) -> Result<Matrix<CycloElem>> {
    Ok(build_m(m, d)?.evaluate(field, x))
}

/// Rank of a complex matrix counting singular values above
/// `FLOAT_RANK_THRESHOLD` times the largest.
pub fn float_rank(mat: &[Vec<Complex64>]) -> usize {
    let nrows = mat.len();
    let ncols = mat.first().map_or(0, |r| r.len());
    if nrows == 0 || ncols == 0 {
        return 0;
    }
    let dm = DMatrix::from_fn(nrows, ncols, |r, c| mat[r][c]);
    let sv = dm.singular_values();
    let top = sv.iter().cloned().fold(0.0f64, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter()
        .filter(|&&s| s > FLOAT_RANK_THRESHOLD * top)
        .count()
}

fn float_rank_at(m: u32, d: u32, field: &CyclotomicField, x: &[CycloElem]) -> Result<usize> {
    let mat = evaluate_m(m, d, field, x)?;
    let cmat: Vec<Vec<Complex64>> = mat
        .iter()
        .map(|r| r.iter().map(|e| field.to_complex(e)).collect())
        .collect();
    Ok(float_rank(&cmat))
}

fn assemble(
    m: u32,
    d: u32,
    u: u32,
    x: Vec<CycloElem>,
    tangent_dimension: usize,
    solution_dimension: usize,
) -> Result<WitnessVector> {
    let params = Params::new(m, d)?;
    let field = witness_field(d);
    let rank = linalg::rank(&field, &evaluate_m(m, d, &field, &x)?);
    let float_rank = float_rank_at(m, d, &field, &x)?;
    let vars = params.vars();
    let assignment: Vec<WitnessEntry> = vars
        .iter()
        .zip(x.iter())
        .map(|(k, v)| WitnessEntry {
            k: k.clone(),
            value: v.clone(),
        })
        .collect();
    let mut w = WitnessVector {
        m,
        d,
        field_order: 2 * d,
        zeta_power: u,
        rank,
        assignment,
        checks: WitnessChecks {
            nonzero: x.iter().any(|v| !field.is_zero(v)),
            annihilates_tangent_space: false,
            float_rank,
            tangent_dimension,
            solution_dimension,
        },
    };
    w.checks.annihilates_tangent_space = annihilates(&w)?;
    Ok(w)
}

fn annihilates(w: &WitnessVector) -> Result<bool> {
    let field = witness_field(w.d);
    let tangent = cycle_tangent_space_with(w.m, w.d, w.zeta_power)?;
    let mat = evaluate_m(w.m, w.d, &field, &w.values())?;
    Ok(tangent.iter().all(|v| {
        linalg::mat_vec(&field, &mat, v)
            .iter()
            .all(|e| field.is_zero(e))
    }))
}

/// Solves the annihilation system for the cycle `z = w^u`; the returned
/// solution is the null vector of the first free column.
pub fn solve_witness_with(m: u32, d: u32, u: u32) -> Result<WitnessVector> {
    let params = Params::with_hypothesis(m, d)?;
    let field = witness_field(d);
    let tangent = cycle_tangent_space_with(m, d, u)?;
    let system = annihilation_system(params, &field, &tangent)?;
    let nvars = params.vars().len();
    let mut null = linalg::nullspace(&field, &system, nvars);
    if null.is_empty() {
        return Err(IvhsError::WitnessOverdetermined { m, d });
    }
    let solution_dimension = null.len();
    let x = null.swap_remove(0);
    assemble(m, d, u, x, tangent.len(), solution_dimension)
}

pub fn solve_witness(m: u32, d: u32) -> Result<WitnessVector> {
    solve_witness_with(m, d, 1)
}

/// Exact rank of `M` at the witness, recomputed from the assignment.
pub fn witness_rank(m: u32, d: u32, w: &WitnessVector) -> Result<usize> {
    if w.m != m || w.d != d {
        return Err(IvhsError::InvalidWitness(format!(
            "witness is for ({}, {}), not ({m}, {d})",
            w.m, w.d
        )));
    }
    w.check_shape()?;
    let field = witness_field(d);
    Ok(linalg::rank(
        &field,
        &evaluate_m(m, d, &field, &w.values())?,
    ))
}

/// Outcome of re-checking a witness file from scratch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessVerification {
    pub nonzero: bool,
    pub annihilates_tangent_space: bool,
    pub exact_rank: usize,
    pub claimed_rank: usize,
    pub float_rank: usize,
    /// `C(m/2+d, d) - (m/2+1)^2`, the least rank of a nonzero point.
    pub rank_floor: usize,
}

impl WitnessVerification {
    pub fn ok(&self) -> bool {
        self.nonzero
            && self.annihilates_tangent_space
            && self.exact_rank == self.claimed_rank
            && self.float_rank == self.exact_rank
            && self.exact_rank >= self.rank_floor
    }

    /// The witness attains the floor, i.e. rank `s_max0 + 1`.
    pub fn attains_floor(&self) -> bool {
        self.ok() && self.exact_rank == self.rank_floor
    }
}

impl WitnessVector {
    pub fn values(&self) -> Vec<CycloElem> {
        self.assignment.iter().map(|e| e.value.clone()).collect()
    }

    fn check_shape(&self) -> Result<()> {
        let params = Params::with_hypothesis(self.m, self.d)?;
        if self.field_order != 2 * self.d {
            return Err(IvhsError::InvalidWitness(format!(
                "field order {} is not 2d",
                self.field_order
            )));
        }
        let vars = params.vars();
        if self.assignment.len() != vars.len() {
            return Err(IvhsError::InvalidWitness(format!(
                "{} entries for {} variables",
                self.assignment.len(),
                vars.len()
            )));
        }
        let degree = witness_field(self.d).degree();
        for (entry, k) in self.assignment.iter().zip(vars.iter()) {
            if &entry.k != k {
                return Err(IvhsError::InvalidWitness(format!(
                    "entry {} where {} was expected",
                    entry.k, k
                )));
            }
            if entry.value.coeffs().len() != degree {
                return Err(IvhsError::InvalidWitness(format!(
                    "value of {k} has the wrong length"
                )));
            }
        }
        Ok(())
    }

    /// Independent re-verification: rebuilds the tangent space and `M`.
    pub fn verify(&self) -> Result<WitnessVerification> {
        self.check_shape()?;
        let field = witness_field(self.d);
        let x = self.values();
        Ok(WitnessVerification {
            nonzero: x.iter().any(|v| !field.is_zero(v)),
            annihilates_tangent_space: annihilates(self)?,
            exact_rank: witness_rank(self.m, self.d, self)?,
            claimed_rank: self.rank,
            float_rank: float_rank_at(self.m, self.d, &field, &x)?,
            rank_floor: counting_bound(self.m, self.d)? as usize,
        })
    }

    /// Image under `w -> w^u`: the witness of the cycle with `z^u`.
    pub fn conjugate(&self, u: u32) -> Result<WitnessVector> {
        let field = witness_field(self.d);
        if u.gcd(&(2 * self.d)) != 1 {
            return Err(IvhsError::Param(format!(
                "{u} is not a unit modulo {}",
                2 * self.d
            )));
        }
        let x: Vec<CycloElem> = self.values().iter().map(|v| field.galois(v, u)).collect();
        let zeta_power = (self.zeta_power * u) % (2 * self.d);
        assemble(
            self.m,
            self.d,
            zeta_power,
            x,
            self.checks.tangent_dimension,
            self.checks.solution_dimension,
        )
    }

    /// Multiplies every coordinate by a nonzero scalar.
    pub fn scale(&self, lambda: &CycloElem) -> Result<WitnessVector> {
        let field = witness_field(self.d);
        if field.is_zero(lambda) {
            return Err(IvhsError::Param("scaling by zero".into()));
        }
        let x: Vec<CycloElem> = self.values().iter().map(|v| field.mul(v, lambda)).collect();
        assemble(
            self.m,
            self.d,
            self.zeta_power,
            x,
            self.checks.tangent_dimension,
            self.checks.solution_dimension,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn from_json(text: &str) -> Result<WitnessVector> {
        serde_json::from_str(text).map_err(|e| IvhsError::InvalidWitness(e.to_string()))
    }
}

/// Reduction `Z[w] -> F_p` sending `w` to a primitive root of order `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModularEmbedding {
    pub p: u64,
    pub root: u64,
    pub order: u32,
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl ModularEmbedding {
    /// The least prime `p >= start` with `p = 1 mod order`, with the root
    /// found by powering small bases.
    pub fn new(order: u32, start: u64) -> Result<ModularEmbedding> {
        let n = order as u64;
        let mut p = start.max(n + 1);
        p += (n + 1 - p % n) % n;
        let qs = prime_factors(n);
        while p < (1 << 32) {
            if is_prime(p) {
                for a in 2..p.min(1000) {
                    let g = pow_mod(a, (p - 1) / n, p);
                    if qs.iter().all(|q| pow_mod(g, n / q, p) != 1) {
                        return Ok(ModularEmbedding { p, root: g, order });
                    }
                }
            }
            p += n;
        }
        Err(IvhsError::Param(format!(
            "no prime below 2^32 is 1 modulo {order}"
        )))
    }

    fn rational(&self, q: &Rational) -> Option<u64> {
        let p = num_bigint::BigInt::from(self.p);
        let num = q.numer().mod_floor(&p).to_u64()?;
        let den = q.denom().mod_floor(&p).to_u64()?;
        if den == 0 {
            return None;
        }
        Some(mul_mod(num, pow_mod(den, self.p - 2, self.p), self.p))
    }

    /// Image of an element; `None` when a denominator vanishes mod `p`.
    pub fn map(&self, x: &CycloElem) -> Option<u64> {
        let mut acc = 0u64;
        let mut power = 1u64;
        for c in x.coeffs() {
            if !c.is_zero() {
                acc = (acc + mul_mod(self.rational(c)?, power, self.p)) % self.p;
            }
            power = mul_mod(power, self.root, self.p);
        }
        Some(acc)
    }
}

/// Smallest absolute denominator-free scale making all coordinates integral
/// over `Z[w]`; used to keep JSON compact.
pub fn clear_denominators(w: &WitnessVector) -> Result<WitnessVector> {
    let mut lcm = num_bigint::BigInt::one();
    for e in &w.assignment {
        for c in e.value.coeffs() {
            lcm = lcm.lcm(c.denom());
        }
    }
    let field = witness_field(w.d);
    let lambda = field.from_rational(Rational::from_integer(lcm.abs()));
    w.scale(&lambda)
}
