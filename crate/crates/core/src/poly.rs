//! Sparse multivariate polynomials with a fixed graded-lex term order.
//!
//! Variables are positions `0..n` in the additive order of their indices
//! (position 0 is the lexicographically smallest index). Monomials compare
//! by total degree first, then lexicographically on the dense exponent
//! vector, with variable 0 most significant.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::field::{Coeff, FieldCtx};

/// Sorted `(variable, exponent)` pairs with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    factors: Vec<(u32, u32)>,
    degree: u32,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: u32) -> Self {
        Monomial {
            factors: vec![(v, 1)],
            degree: 1,
        }
    }

    pub fn from_pairs(mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable();
        let mut factors: Vec<(u32, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match factors.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => factors.push((v, e)),
            }
        }
        let degree = factors.iter().map(|f| f.1).sum();
        Monomial { factors, degree }
    }

    pub fn factors(&self) -> &[(u32, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self, v: u32) -> u32 {
        self.factors
            .binary_search_by_key(&v, |f| f.0)
            .map(|n| self.factors[n].1)
            .unwrap_or(0)
    }

    /// `Some(v)` if this is `x_v^e` for some `e > 0`.
    pub fn pure_power_var(&self) -> Option<u32> {
        match self.factors.as_slice() {
            [(v, _)] => Some(*v),
            _ => None,
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut a, mut b) = (
            self.factors.iter().peekable(),
            other.factors.iter().peekable(),
        );
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => {
                        out.push((va, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((vb, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        out.push((va, ea + eb));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&f), None) => {
                    out.push(f);
                    a.next();
                }
                (None, Some(&&f)) => {
                    out.push(f);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial {
            factors: out,
            degree: self.degree + other.degree,
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        if self.degree > other.degree {
            return false;
        }
        let mut it = other.factors.iter();
        'outer: for &(v, e) in &self.factors {
            for &(w, f) in it.by_ref() {
                if w == v {
                    if f < e {
                        return false;
                    }
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let pairs = other
            .factors
            .iter()
            .map(|&(v, e)| (v, e - self.exponent(v)))
            .collect();
        Monomial::from_pairs(pairs)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut pairs: BTreeMap<u32, u32> = self.factors.iter().copied().collect();
        for &(v, e) in &other.factors {
            let slot = pairs.entry(v).or_insert(0);
            *slot = (*slot).max(e);
        }
        Monomial::from_pairs(pairs.into_iter().collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        let (mut a, mut b) = (0, 0);
        while a < self.factors.len() && b < other.factors.len() {
            match self.factors[a].0.cmp(&other.factors[b].0) {
                Ordering::Less => a += 1,
                Ordering::Greater => b += 1,
                Ordering::Equal => return false,
            }
        }
        true
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (&(va, ea), &(vb, eb)) in self.factors.iter().zip(&other.factors) {
                if va != vb {
                    // the one carrying the smaller variable is larger
                    return vb.cmp(&va);
                }
                if ea != eb {
                    return ea.cmp(&eb);
                }
            }
            self.factors.len().cmp(&other.factors.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SparsePoly<C: Coeff> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Default for SparsePoly<C> {
    fn default() -> Self {
        SparsePoly {
            terms: BTreeMap::new(),
        }
    }
}

impl<C: Coeff> SparsePoly<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn term(c: C, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SparsePoly { terms }
    }

    pub fn var(v: u32) -> Self {
        Self::term(C::one(), Monomial::var(v))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms from the leading one down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.last_key_value()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.last_key_value().map(|(m, _)| m)
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get().add(c);
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        SparsePoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        SparsePoly {
            terms: self
                .terms
                .iter()
                .filter_map(|(m, c)| {
                    let v = c.mul(k);
                    (!v.is_zero()).then(|| (m.clone(), v))
                })
                .collect(),
        }
    }

    pub fn mul_term(&self, k: &C, mono: &Monomial) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        SparsePoly {
            terms: self
                .terms
                .iter()
                .filter_map(|(m, c)| {
                    let v = c.mul(k);
                    (!v.is_zero()).then(|| (m.mul(mono), v))
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &ca.mul(cb));
            }
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Homogeneous of some degree; the zero polynomial counts as homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        match degrees.next() {
            None => true,
            Some(first) => degrees.all(|g| g == first),
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> SparsePoly<D> {
        SparsePoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Variable positions that occur, ascending.
    pub fn variables(&self) -> Vec<u32> {
        let mut vars: Vec<u32> = self
            .terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|f| f.0))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Renders the polynomial, leading term first, using `name` for
    /// variables. Factors inside a monomial are printed largest variable
    /// position first.
    pub fn format_with(
        &self,
        name: &dyn Fn(u32) -> String,
        coeff: &dyn Fn(&C) -> (bool, String),
    ) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (n, (m, c)) in self.terms().enumerate() {
            let (negative, magnitude) = coeff(c);
            if n == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut parts: Vec<String> = Vec::new();
            if magnitude != "1" || m.is_one() {
                parts.push(magnitude);
            }
            for &(v, e) in m.factors().iter().rev() {
                if e == 1 {
                    parts.push(name(v));
                } else {
                    parts.push(format!("{}^{e}", name(v)));
                }
            }
            let _ = write!(out, "{}", parts.join("*"));
        }
        out
    }
}

impl SparsePoly<i64> {
    /// Evaluates at `values[v]` for variable `v`.
    pub fn eval<F: FieldCtx>(&self, f: &F, values: &[F::E]) -> F::E {
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = f.from_i64(*c);
            for &(v, e) in m.factors() {
                for _ in 0..e {
                    t = f.mul(&t, &values[v as usize]);
                }
            }
            acc = f.add(&acc, &t);
        }
        acc
    }

    /// Divides by the gcd of the coefficients and makes the leading
    /// coefficient positive; used to compare generators up to scalars.
    pub fn primitive_part(&self) -> Self {
        let g = self
            .terms
            .values()
            .fold(0i64, |g, &c| num_integer::gcd(g, c));
        if g == 0 {
            return Self::zero();
        }
        let sign = if self.leading_term().map_or(1, |(_, c)| *c) < 0 {
            -1
        } else {
            1
        };
        SparsePoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), sign * c / g))
                .collect(),
        }
    }
}

pub fn format_integer_coeff(c: &i64) -> (bool, String) {
    (*c < 0, c.unsigned_abs().to_string())
}
