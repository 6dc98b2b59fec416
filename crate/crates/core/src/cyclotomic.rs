//! Exact arithmetic in `Q(w)`, `w` a primitive `n`-th root of unity.
//!
//! Elements are dense rational coefficient vectors on `1, w, ..., w^{phi(n)-1}`
//! reduced modulo the `n`-th cyclotomic polynomial.

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::field::{
    format_rational, parse_rational, rational_to_f64, FieldCtx, Rational, RationalField, RingTag,
};
use crate::linalg;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycloElem {
    #[serde(with = "rational_vec")]
    coeffs: Vec<Rational>,
}

impl CycloElem {
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }
}

impl std::fmt::Debug for CycloElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| format!("{}*w^{t}", format_rational(c)))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

mod rational_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<String> = v.iter().map(format_rational).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let text: Vec<String> = Vec::deserialize(d)?;
        text.iter()
            .map(|t| {
                parse_rational(t)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad rational {t:?}")))
            })
            .collect()
    }
}

/// The field `Q(w)` with `w = exp(2 pi i / n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicField {
    order: u32,
    /// Monic `Phi_n`, lowest degree first.
    modulus: Vec<i64>,
}

/// Integer coefficients of `Phi_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n >= 1);
    // x^n - 1
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for k in 1..n {
        if n.is_multiple_of(k) {
            num = exact_div(&num, &cyclotomic_polynomial(k));
        }
    }
    num
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = *den.last().expect("nonzero divisor");
    assert_eq!(lead, 1, "cyclotomic divisors are monic");
    let qlen = num.len() - dd;
    let mut quot = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (t, &dv) in den.iter().enumerate() {
            rem[k + t] -= c * dv;
        }
    }
    debug_assert!(rem.iter().all(|&v| v == 0));
    quot
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl CyclotomicField {
    pub fn new(order: u32) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        CyclotomicField {
            order,
            modulus: cyclotomic_polynomial(order),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `phi(n)`, the dimension over `Q`.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn from_rational(&self, q: Rational) -> CycloElem {
        let mut coeffs = vec![Rational::zero(); self.degree()];
        coeffs[0] = q;
        CycloElem { coeffs }
    }

    pub fn from_coeffs(&self, coeffs: Vec<Rational>) -> Option<CycloElem> {
        (coeffs.len() == self.degree()).then_some(CycloElem { coeffs })
    }

    /// Reduces an arbitrary-length polynomial in `w` modulo `Phi_n`.
    fn reduce(&self, mut poly: Vec<Rational>) -> CycloElem {
        let deg = self.degree();
        for k in (deg..poly.len()).rev() {
            let c = std::mem::take(&mut poly[k]);
            if c.is_zero() {
                continue;
            }
            // w^k = w^{k-deg} * w^deg and w^deg = -sum_{t<deg} Phi_t w^t
            for t in 0..deg {
                let m = self.modulus[t];
                if m != 0 {
                    poly[k - deg + t] -= &c * Rational::from_integer(m.into());
                }
            }
        }
        poly.truncate(deg);
        poly.resize(deg, Rational::zero());
        CycloElem { coeffs: poly }
    }

    /// `w^t` for any integer `t`.
    pub fn root_power(&self, t: i64) -> CycloElem {
        let e = t.rem_euclid(self.order as i64) as usize;
        let mut poly = vec![Rational::zero(); e.max(self.degree() - 1) + 1];
        poly[e] = Rational::one();
        self.reduce(poly)
    }

    pub fn generator(&self) -> CycloElem {
        self.root_power(1)
    }

    /// The automorphism `w -> w^u`; `u` must be a unit modulo `n`.
    pub fn galois(&self, x: &CycloElem, u: u32) -> CycloElem {
        assert_eq!(
            gcd(u as u64, self.order as u64),
            1,
            "galois exponent must be a unit"
        );
        let n = self.order as usize;
        let mut poly = vec![Rational::zero(); n.max(self.degree())];
        for (t, c) in x.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let e = (t * u as usize) % n;
                poly[e] += c;
            }
        }
        self.reduce(poly)
    }

    /// Units modulo `n` in increasing order.
    pub fn galois_exponents(&self) -> Vec<u32> {
        (1..=self.order)
            .filter(|&u| gcd(u as u64, self.order as u64) == 1)
            .collect()
    }

    /// Complex embedding sending `w` to `exp(2 pi i / n)`.
    pub fn to_complex(&self, x: &CycloElem) -> Complex64 {
        let theta = 2.0 * std::f64::consts::PI / self.order as f64;
        x.coeffs
            .iter()
            .enumerate()
            .map(|(t, c)| Complex64::from_polar(rational_to_f64(c), theta * t as f64))
            .sum()
    }

    /// Matrix of multiplication by `x` on the power basis (columns are images
    /// of basis vectors).
    fn multiplication_matrix(&self, x: &CycloElem) -> Vec<Vec<Rational>> {
        let deg = self.degree();
        let mut cols = Vec::with_capacity(deg);
        for t in 0..deg {
            cols.push(self.mul(x, &self.root_power(t as i64)).coeffs);
        }
        (0..deg)
            .map(|r| (0..deg).map(|c| cols[c][r].clone()).collect())
            .collect()
    }
}

impl FieldCtx for CyclotomicField {
    type E = CycloElem;

    fn zero(&self) -> CycloElem {
        CycloElem {
            coeffs: vec![Rational::zero(); self.degree()],
        }
    }

    fn one(&self) -> CycloElem {
        self.from_rational(Rational::one())
    }

    fn is_zero(&self, a: &CycloElem) -> bool {
        a.coeffs.iter().all(Zero::is_zero)
    }

    fn add(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        CycloElem {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }

    fn sub(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        CycloElem {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }

    fn mul(&self, a: &CycloElem, b: &CycloElem) -> CycloElem {
        let deg = self.degree();
        let mut prod = vec![Rational::zero(); 2 * deg - 1];
        for (s, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (t, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[s + t] += x * y;
                }
            }
        }
        self.reduce(prod)
    }

    fn neg(&self, a: &CycloElem) -> CycloElem {
        CycloElem {
            coeffs: a.coeffs.iter().map(|x| -x).collect(),
        }
    }

    fn inv(&self, a: &CycloElem) -> CycloElem {
        assert!(!self.is_zero(a), "inverse of zero");
        let mat = self.multiplication_matrix(a);
        let mut rhs = vec![Rational::zero(); self.degree()];
        rhs[0] = Rational::one();
        let coeffs =
            linalg::solve(&RationalField, &mat, &rhs).expect("nonzero field element is invertible");
        CycloElem { coeffs }
    }

    fn from_i64(&self, v: i64) -> CycloElem {
        self.from_rational(Rational::from_integer(v.into()))
    }

    fn tag(&self) -> RingTag {
        RingTag::Cyclotomic(self.order)
    }
}
