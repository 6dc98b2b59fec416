//! Capped Buchberger algorithm over `F_p` for homogeneous ideals.
//!
//! The order is graded lex with variable 0 most significant, the same order
//! as [`crate::poly::Monomial`]. Pairs are taken by increasing lcm degree,
//! ties by creation order, and pruned with the product criterion and the
//! Gebauer-Moller chain criterion.
//!
//! Working modulo `p` is sound for the `ZeroAtOriginOnly` verdict: pure
//! powers of every variable in the ideal mod `p` mean that the degree-`D`
//! Macaulay matrix of the integer generators has full rank mod `p` for some
//! `D`, hence full rank over `Q`. The opposite verdict is only ever issued
//! with an exact integer witness.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::detideal::{IdealSpec, IntPoly};
use crate::error::{IvhsError, Result};
use crate::field::{mul_mod, pow_mod, FieldCtx, RationalField, DEFAULT_PRIME};

const P: u64 = DEFAULT_PRIME;

/// Dense exponent vector; derived `Ord` is graded lex with variable 0 most
/// significant because `deg` is compared first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Mono {
    deg: u32,
    exps: Box<[u8]>,
}

impl Mono {
    fn from_sparse(m: &crate::poly::Monomial, nvars: usize) -> Mono {
        let mut exps = vec![0u8; nvars];
        for &(v, e) in m.factors() {
            exps[v as usize] = u8::try_from(e).expect("exponent fits in u8");
        }
        Mono {
            deg: m.degree(),
            exps: exps.into_boxed_slice(),
        }
    }

    fn divides(&self, other: &Mono) -> bool {
        self.deg <= other.deg && self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono {
            deg: self.deg + other.deg,
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn div(&self, other: &Mono) -> Mono {
        Mono {
            deg: self.deg - other.deg,
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    fn lcm(&self, other: &Mono) -> Mono {
        let exps: Box<[u8]> = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| *a.max(b))
            .collect();
        Mono {
            deg: exps.iter().map(|&e| e as u32).sum(),
            exps,
        }
    }

    fn coprime(&self, other: &Mono) -> bool {
        self.exps
            .iter()
            .zip(other.exps.iter())
            .all(|(a, b)| *a == 0 || *b == 0)
    }

    fn pure_power_var(&self) -> Option<usize> {
        let mut support = self.exps.iter().enumerate().filter(|(_, &e)| e > 0);
        let (v, _) = support.next()?;
        support.next().is_none().then_some(v)
    }

    /// All divisors of positive degree.
    fn divisors(&self) -> Vec<Mono> {
        let support: Vec<(usize, u8)> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(v, &e)| (v, e))
            .collect();
        let mut out = vec![Mono {
            deg: 0,
            exps: vec![0u8; self.exps.len()].into_boxed_slice(),
        }];
        for (v, e) in support {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for m in &out {
                for k in 0..=e {
                    let mut exps = m.exps.clone();
                    exps[v] = k;
                    next.push(Mono {
                        deg: m.deg + k as u32,
                        exps,
                    });
                }
            }
            out = next;
        }
        out.retain(|m| m.deg > 0);
        out
    }
}

/// Terms in decreasing order, leading coefficient 1.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Poly {
    terms: Vec<(Mono, u64)>,
}

impl Poly {
    fn lm(&self) -> &Mono {
        &self.terms[0].0
    }

    fn from_map(map: BTreeMap<Mono, u64>) -> Option<Poly> {
        let mut terms: Vec<(Mono, u64)> = map.into_iter().rev().filter(|(_, c)| *c != 0).collect();
        if terms.is_empty() {
            return None;
        }
        let inv = pow_mod(terms[0].1, P - 2, P);
        for t in &mut terms {
            t.1 = mul_mod(t.1, inv, P);
        }
        Some(Poly { terms })
    }
}

fn to_fp(p: &IntPoly, nvars: usize) -> Option<Poly> {
    let map: BTreeMap<Mono, u64> = p
        .terms()
        .map(|(m, c)| (Mono::from_sparse(m, nvars), c.rem_euclid(P as i64) as u64))
        .collect();
    Poly::from_map(map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "cap", rename_all = "snake_case")]
pub enum InconclusiveReason {
    DegreeCap {
        degree_cap: u32,
    },
    TimeCap {
        seconds: u64,
    },
    GeneratorCap {
        generators: usize,
        max_generators: usize,
    },
    PositiveDimensionalWithoutWitness,
}

impl std::fmt::Display for InconclusiveReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InconclusiveReason::DegreeCap { degree_cap } => {
                write!(f, "degree cap {degree_cap} reached")
            }
            InconclusiveReason::TimeCap { seconds } => write!(f, "time cap {seconds}s reached"),
            InconclusiveReason::GeneratorCap {
                generators,
                max_generators,
            } => {
                write!(f, "{generators} generators exceed the cap {max_generators}")
            }
            InconclusiveReason::PositiveDimensionalWithoutWitness => {
                write!(
                    f,
                    "basis mod p is positive dimensional but no exact witness was found"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ZeroDimVerdict {
    ZeroAtOriginOnly,
    /// Nonzero integer point on which every generator vanishes exactly.
    NontrivialZeroFound {
        assignment: Vec<i64>,
    },
    Inconclusive {
        reason: InconclusiveReason,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GbStats {
    pub prime: u64,
    pub input_generators: usize,
    pub basis_size: usize,
    pub pairs_reduced: usize,
    pub max_degree: u32,
    /// Not serialized, so artifacts stay byte-reproducible.
    #[serde(skip)]
    pub elapsed_ms: u64,
    /// Variables without a pure-power leading monomial at exit.
    pub uncovered_variables: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroDimOutcome {
    pub verdict: ZeroDimVerdict,
    pub stats: GbStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GbConfig {
    pub degree_cap: u32,
    pub time_cap: Duration,
    pub max_generators: usize,
}

impl GbConfig {
    /// Defaults: degree cap `2(s+1)`, 60 s, at most 20000 distinct generators.
    pub fn for_s(s: u32) -> Self {
        GbConfig {
            degree_cap: 2 * (s + 1),
            time_cap: Duration::from_secs(60),
            max_generators: 20_000,
        }
    }
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
    alive: bool,
}

struct Engine {
    basis: Vec<Poly>,
    lead: HashMap<Mono, usize>,
    covered: Vec<bool>,
    uncovered: usize,
}

impl Engine {
    fn new(nvars: usize) -> Self {
        Engine {
            basis: Vec::new(),
            lead: HashMap::new(),
            covered: vec![false; nvars],
            uncovered: nvars,
        }
    }

    fn reducer(&self, t: &Mono) -> Option<usize> {
        if let Some(&g) = self.lead.get(t) {
            return Some(g);
        }
        t.divisors()
            .iter()
            .filter_map(|m| self.lead.get(m).copied())
            .min()
    }

    /// Full normal form; `None` when the result is zero.
    fn normal_form(&self, map: BTreeMap<Mono, u64>) -> Option<Poly> {
        let mut work = map;
        let mut done: BTreeMap<Mono, u64> = BTreeMap::new();
        while let Some((t, c)) = work.pop_last() {
            if c == 0 {
                continue;
            }
            match self.reducer(&t) {
                None => {
                    done.insert(t, c);
                }
                Some(g) => {
                    let g = &self.basis[g];
                    let q = t.div(g.lm());
                    for (m, gc) in g.terms.iter().skip(1) {
                        let key = m.mul(&q);
                        let sub = mul_mod(c, *gc, P);
                        let slot = work.entry(key).or_insert(0);
                        *slot = (*slot + P - sub) % P;
                    }
                }
            }
        }
        Poly::from_map(done)
    }

    fn s_poly(&self, i: usize, j: usize, lcm: &Mono) -> BTreeMap<Mono, u64> {
        let mut map: BTreeMap<Mono, u64> = BTreeMap::new();
        let (f, g) = (&self.basis[i], &self.basis[j]);
        let (qf, qg) = (lcm.div(f.lm()), lcm.div(g.lm()));
        for (m, c) in f.terms.iter().skip(1) {
            let slot = map.entry(m.mul(&qf)).or_insert(0);
            *slot = (*slot + c) % P;
        }
        for (m, c) in g.terms.iter().skip(1) {
            let slot = map.entry(m.mul(&qg)).or_insert(0);
            *slot = (*slot + P - c) % P;
        }
        map
    }

    fn insert(&mut self, p: Poly) -> usize {
        let n = self.basis.len();
        if let Some(v) = p.lm().pure_power_var() {
            if !self.covered[v] {
                self.covered[v] = true;
                self.uncovered -= 1;
            }
        }
        self.lead.entry(p.lm().clone()).or_insert(n);
        self.basis.push(p);
        n
    }
}

fn poly_map(p: &Poly) -> BTreeMap<Mono, u64> {
    p.terms.iter().cloned().collect()
}

fn exact_witness(polys: &[IntPoly], nvars: usize) -> Option<Vec<i64>> {
    let f = RationalField;
    (0..nvars).find_map(|v| {
        let mut x = vec![f.zero(); nvars];
        x[v] = f.one();
        polys.iter().all(|p| f.is_zero(&p.eval(&f, &x))).then(|| {
            let mut a = vec![0i64; nvars];
            a[v] = 1;
            a
        })
    })
}

/// Runs the capped zero-dimensionality test on explicit generators in
/// `nvars` variables.
pub fn groebner_zero_dim_polys(
    nvars: usize,
    generators: &[IntPoly],
    cfg: &GbConfig,
) -> Result<ZeroDimOutcome> {
    let start = Instant::now();
    for (n, g) in generators.iter().enumerate() {
        if !g.is_zero() && !g.is_homogeneous() {
            return Err(IvhsError::NonHomogeneous { index: n });
        }
    }
    let mut distinct: Vec<&IntPoly> = Vec::new();
    {
        let mut seen = std::collections::HashSet::new();
        for g in generators.iter().filter(|g| !g.is_zero()) {
            if seen.insert(g) {
                distinct.push(g);
            }
        }
    }
    let mut stats = GbStats {
        prime: P,
        input_generators: distinct.len(),
        basis_size: 0,
        pairs_reduced: 0,
        max_degree: 0,
        elapsed_ms: 0,
        uncovered_variables: nvars,
    };
    let finish = |verdict: ZeroDimVerdict, mut stats: GbStats| {
        stats.elapsed_ms = start.elapsed().as_millis() as u64;
        Ok(ZeroDimOutcome { verdict, stats })
    };
    if distinct.is_empty() {
        let mut a = vec![0i64; nvars];
        if nvars > 0 {
            a[0] = 1;
        }
        return finish(ZeroDimVerdict::NontrivialZeroFound { assignment: a }, stats);
    }
    if distinct.len() > cfg.max_generators {
        let reason = InconclusiveReason::GeneratorCap {
            generators: distinct.len(),
            max_generators: cfg.max_generators,
        };
        return finish(ZeroDimVerdict::Inconclusive { reason }, stats);
    }

    let mut inputs: Vec<Poly> = distinct.iter().filter_map(|g| to_fp(g, nvars)).collect();
    inputs.sort_by(|a, b| a.lm().deg.cmp(&b.lm().deg).then_with(|| b.lm().cmp(a.lm())));

    let mut engine = Engine::new(nvars);
    let mut pairs: Vec<Pair> = Vec::new();
    let mut queue: BinaryHeap<Reverse<(u32, usize)>> = BinaryHeap::new();
    let mut skipped_by_degree = false;
    let mut timed_out = false;

    // Inputs enter degree by degree, interleaved with pairs of that degree,
    // so every addition goes through the same criteria.
    let mut pending = inputs.into_iter().peekable();
    loop {
        if engine.uncovered == 0 {
            break;
        }
        if start.elapsed() > cfg.time_cap {
            timed_out = true;
            break;
        }
        let next_pair_deg = queue.peek().map(|Reverse((deg, _))| *deg);
        let next_input_deg = pending.peek().map(|p| p.lm().deg);
        let candidate = match (next_input_deg, next_pair_deg) {
            (None, None) => break,
            (Some(di), Some(dp)) if di <= dp => {
                let p = pending.next().expect("peeked");
                engine.normal_form(poly_map(&p))
            }
            (Some(_), None) => {
                let p = pending.next().expect("peeked");
                engine.normal_form(poly_map(&p))
            }
            _ => {
                let Reverse((_, idx)) = queue.pop().expect("peeked");
                if !pairs[idx].alive {
                    continue;
                }
                pairs[idx].alive = false;
                let (i, j) = (pairs[idx].i, pairs[idx].j);
                let lcm = pairs[idx].lcm.clone();
                stats.pairs_reduced += 1;
                let s = engine.s_poly(i, j, &lcm);
                engine.normal_form(s)
            }
        };
        let Some(h) = candidate else { continue };
        stats.max_degree = stats.max_degree.max(h.lm().deg);
        let lm_h = h.lm().clone();
        let n = engine.insert(h);

        // chain criterion on existing pairs
        for pr in pairs.iter_mut().filter(|p| p.alive) {
            if lm_h.divides(&pr.lcm) {
                let li = engine.basis[pr.i].lm().lcm(&lm_h);
                let lj = engine.basis[pr.j].lm().lcm(&lm_h);
                if li != pr.lcm && lj != pr.lcm {
                    pr.alive = false;
                }
            }
        }
        // new pairs: drop lcms properly divisible by another new lcm, keep
        // one per lcm, then drop coprime leading monomials
        let mut fresh: Vec<(usize, Mono, bool)> = (0..n)
            .map(|i| {
                let lm_i = engine.basis[i].lm();
                (i, lm_i.lcm(&lm_h), lm_i.coprime(&lm_h))
            })
            .collect();
        fresh.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut kept: Vec<(usize, Mono)> = Vec::new();
        let mut t = 0;
        while t < fresh.len() {
            let mut u = t;
            let mut any_coprime = false;
            while u < fresh.len() && fresh[u].1 == fresh[t].1 {
                any_coprime |= fresh[u].2;
                u += 1;
            }
            let lcm = &fresh[t].1;
            let dominated = fresh
                .iter()
                .any(|(_, l, _)| l.deg < lcm.deg && l.divides(lcm));
            if !any_coprime && !dominated {
                kept.push((fresh[t].0, lcm.clone()));
            }
            t = u;
        }
        for (i, lcm) in kept {
            if lcm.deg > cfg.degree_cap {
                skipped_by_degree = true;
                continue;
            }
            let idx = pairs.len();
            queue.push(Reverse((lcm.deg, idx)));
            pairs.push(Pair {
                i,
                j: n,
                lcm,
                alive: true,
            });
        }
    }

    stats.basis_size = engine.basis.len();
    stats.uncovered_variables = engine.uncovered;
    if engine.uncovered == 0 {
        return finish(ZeroDimVerdict::ZeroAtOriginOnly, stats);
    }
    if timed_out {
        let reason = InconclusiveReason::TimeCap {
            seconds: cfg.time_cap.as_secs(),
        };
        return finish(ZeroDimVerdict::Inconclusive { reason }, stats);
    }
    let owned: Vec<IntPoly> = distinct.iter().map(|p| (*p).clone()).collect();
    if let Some(a) = exact_witness(&owned, nvars) {
        return finish(ZeroDimVerdict::NontrivialZeroFound { assignment: a }, stats);
    }
    let reason = if skipped_by_degree {
        InconclusiveReason::DegreeCap {
            degree_cap: cfg.degree_cap,
        }
    } else {
        InconclusiveReason::PositiveDimensionalWithoutWitness
    };
    finish(ZeroDimVerdict::Inconclusive { reason }, stats)
}

/// Zero-dimensionality test for a generated ideal.
pub fn groebner_zero_dim_test(
    spec: &IdealSpec,
    degree_cap: u32,
    time_cap: Duration,
) -> Result<ZeroDimOutcome> {
    let cfg = GbConfig {
        degree_cap,
        time_cap,
        ..GbConfig::for_s(spec.s)
    };
    let gens: Vec<IntPoly> = spec
        .distinct_generators()
        .iter()
        .map(|p| (**p).clone())
        .collect();
    groebner_zero_dim_polys(spec.num_variables(), &gens, &cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detideal::{minors_ideal_0, IntPoly};
    use crate::field::{PrimeField, RationalField};
    use crate::linalg;
    use crate::poly::Monomial;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn x(v: u32) -> IntPoly {
        IntPoly::var(v)
    }

    fn cfg(cap: u32) -> GbConfig {
        GbConfig {
            degree_cap: cap,
            time_cap: Duration::from_secs(30),
            max_generators: 100_000,
        }
    }

    #[test]
    fn maximal_ideal_is_zero_dimensional() {
        let spec = minors_ideal_0(2, 4, 0).unwrap();
        let out = groebner_zero_dim_test(&spec, 2, Duration::from_secs(60)).unwrap();
        assert_eq!(out.verdict, ZeroDimVerdict::ZeroAtOriginOnly);
        assert_eq!(out.stats.basis_size, 19);
    }

    #[test]
    fn zero_ideal_has_a_nonzero_point() {
        let out = groebner_zero_dim_polys(3, &[IntPoly::zero()], &cfg(4)).unwrap();
        assert_eq!(
            out.verdict,
            ZeroDimVerdict::NontrivialZeroFound {
                assignment: vec![1, 0, 0]
            }
        );
    }

    #[test]
    fn rejects_inhomogeneous_input() {
        let g = x(0).mul(&x(0)).add(&x(1));
        assert_eq!(
            groebner_zero_dim_polys(2, &[x(0), g], &cfg(4)).unwrap_err(),
            IvhsError::NonHomogeneous { index: 1 }
        );
    }

    #[test]
    fn needs_an_s_pair() {
        // (x0^2 - x1^2, x0 x1) contains x0^3 and x1^3 only through an S-polynomial
        let gens = [x(0).mul(&x(0)).sub(&x(1).mul(&x(1))), x(0).mul(&x(1))];
        let out = groebner_zero_dim_polys(2, &gens, &cfg(4)).unwrap();
        assert_eq!(out.verdict, ZeroDimVerdict::ZeroAtOriginOnly);
        assert!(out.stats.pairs_reduced >= 1);
        let out = groebner_zero_dim_polys(2, &gens, &cfg(2)).unwrap();
        assert_eq!(
            out.verdict,
            ZeroDimVerdict::Inconclusive {
                reason: InconclusiveReason::DegreeCap { degree_cap: 2 }
            }
        );
    }

    #[test]
    fn positive_dimensional_ideal_gets_a_checked_witness() {
        let out = groebner_zero_dim_polys(3, &[x(0).mul(&x(1)), x(2).mul(&x(2))], &cfg(6)).unwrap();
        assert_eq!(
            out.verdict,
            ZeroDimVerdict::NontrivialZeroFound {
                assignment: vec![1, 0, 0]
            }
        );
        // the cone over a smooth conic has no coordinate points
        let conic = x(0).mul(&x(0)).add(&x(1).mul(&x(1))).sub(&x(2).mul(&x(2)));
        let out = groebner_zero_dim_polys(3, &[conic], &cfg(6)).unwrap();
        assert_eq!(
            out.verdict,
            ZeroDimVerdict::Inconclusive {
                reason: InconclusiveReason::PositiveDimensionalWithoutWitness
            }
        );
    }

    #[test]
    fn caps_fire() {
        let spec = minors_ideal_0(2, 5, 1).unwrap();
        let gens: Vec<IntPoly> = spec
            .distinct_generators()
            .iter()
            .map(|p| (**p).clone())
            .collect();
        let tight = GbConfig {
            max_generators: 10,
            ..cfg(4)
        };
        assert!(matches!(
            groebner_zero_dim_polys(44, &gens, &tight).unwrap().verdict,
            ZeroDimVerdict::Inconclusive {
                reason: InconclusiveReason::GeneratorCap { .. }
            }
        ));
        let instant = GbConfig {
            time_cap: Duration::ZERO,
            ..cfg(4)
        };
        assert!(matches!(
            groebner_zero_dim_polys(44, &gens, &instant)
                .unwrap()
                .verdict,
            ZeroDimVerdict::Inconclusive {
                reason: InconclusiveReason::TimeCap { .. }
            }
        ));
    }

    /// Rank of the degree-`deg` Macaulay matrix over `F_p`.
    fn macaulay_full_rank(nvars: usize, gens: &[IntPoly], deg: u32) -> bool {
        fn monomials(nvars: u32, deg: u32) -> Vec<Monomial> {
            if nvars == 0 {
                return if deg == 0 {
                    vec![Monomial::one()]
                } else {
                    Vec::new()
                };
            }
            (0..=deg)
                .flat_map(|e| {
                    monomials(nvars - 1, deg - e)
                        .into_iter()
                        .map(move |m| m.mul(&Monomial::from_pairs(vec![(nvars - 1, e)])))
                })
                .collect()
        }
        let f = PrimeField::new(P).unwrap();
        let cols = monomials(nvars as u32, deg);
        let index: HashMap<Monomial, usize> = cols
            .iter()
            .cloned()
            .enumerate()
            .map(|(n, m)| (m, n))
            .collect();
        let mut rows = Vec::new();
        for g in gens {
            let Some(gd) = g.total_degree() else { continue };
            if gd > deg {
                continue;
            }
            for mult in monomials(nvars as u32, deg - gd) {
                let mut row = vec![0u64; cols.len()];
                for (m, c) in g.terms() {
                    row[index[&m.mul(&mult)]] = f.from_i64(*c);
                }
                rows.push(row);
            }
        }
        linalg::rank(&f, &rows) == cols.len()
    }

    #[test]
    fn agrees_with_macaulay_oracle_on_random_ideals() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut seen_zero_dim = 0;
        for trial in 0..40 {
            let nvars = 3;
            let ngens = 2 + trial % 3;
            let gens: Vec<IntPoly> = (0..ngens)
                .map(|_| {
                    let mut p = IntPoly::zero();
                    for a in 0..nvars as u32 {
                        for b in a..nvars as u32 {
                            if rng.gen_bool(0.5) {
                                p = p.add(&x(a).mul(&x(b)).scale(&rng.gen_range(-3..=3)));
                            }
                        }
                    }
                    p
                })
                .collect();
            let out = groebner_zero_dim_polys(nvars, &gens, &cfg(8)).unwrap();
            let oracle = macaulay_full_rank(nvars, &gens, 6);
            match out.verdict {
                ZeroDimVerdict::ZeroAtOriginOnly => {
                    seen_zero_dim += 1;
                    assert!(oracle, "trial {trial}");
                }
                ZeroDimVerdict::NontrivialZeroFound { assignment } => {
                    assert!(!oracle, "trial {trial}");
                    let f = RationalField;
                    let pt: Vec<_> = assignment.iter().map(|&v| f.from_i64(v)).collect();
                    assert!(gens.iter().all(|g| f.is_zero(&g.eval(&f, &pt))));
                }
                ZeroDimVerdict::Inconclusive { reason } => {
                    assert_eq!(
                        reason,
                        InconclusiveReason::PositiveDimensionalWithoutWitness,
                        "trial {trial}"
                    );
                    assert!(!oracle, "trial {trial}");
                }
            }
        }
        assert!(seen_zero_dim > 5);
    }

    fn basis_engine(gens: &[IntPoly], nvars: usize) -> Engine {
        let mut engine = Engine::new(nvars);
        for g in gens.iter().filter_map(|g| to_fp(g, nvars)) {
            if let Some(h) = engine.normal_form(poly_map(&g)) {
                engine.insert(h);
            }
        }
        engine
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn normal_form_is_idempotent(terms in proptest::collection::vec((0u32..44, 0u32..44, -5i64..=5), 1..12)) {
            let spec = minors_ideal_0(2, 5, 1).unwrap();
            let gens: Vec<IntPoly> = spec.distinct_generators().iter().take(200).map(|p| (**p).clone()).collect();
            let engine = basis_engine(&gens, 44);
            let p = IntPoly::from_terms(terms.into_iter().map(|(a, b, c)| (Monomial::from_pairs(vec![(a, 1), (b, 1)]), c)));
            let map: BTreeMap<Mono, u64> =
                p.terms().map(|(m, c)| (Mono::from_sparse(m, 44), c.rem_euclid(P as i64) as u64)).collect();
            let once = engine.normal_form(map);
            let twice = once.as_ref().and_then(|r| engine.normal_form(poly_map(r)));
            prop_assert_eq!(once, twice);
        }
    }
}
