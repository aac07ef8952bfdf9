//! Integer-coefficient multivariate polynomials with packed exponents.
//!
//! This is the expansion engine behind [`super::Frac`]: up to
//! [`MAX_VARS`] variables, each exponent in 12 bits of a `u128`, so that
//! lexicographic order is plain integer order and monomial products are
//! integer additions.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;

pub const MAX_VARS: usize = 10;
const BITS: u32 = 12;
const MASK: u128 = (1 << BITS) - 1;
/// Largest exponent representable per variable.
pub const MAX_EXP: u32 = (1 << BITS) - 1;

#[inline]
fn shift(i: usize) -> u32 {
    128 - BITS * (i as u32 + 1)
}

/// Packs an exponent vector (length ≤ [`MAX_VARS`]).
pub fn pack(exps: &[u32]) -> u128 {
    assert!(exps.len() <= MAX_VARS, "too many variables");
    exps.iter().enumerate().fold(0u128, |acc, (i, &e)| {
        assert!(e <= MAX_EXP, "exponent overflow");
        acc | ((e as u128) << shift(i))
    })
}

#[inline]
pub fn exp_of(key: u128, i: usize) -> u32 {
    ((key >> shift(i)) & MASK) as u32
}

pub fn unpack(key: u128, n: usize) -> Vec<u32> {
    (0..n).map(|i| exp_of(key, i)).collect()
}

#[inline]
pub fn unit(i: usize) -> u128 {
    1u128 << shift(i)
}

/// Sparse polynomial; terms sorted by strictly decreasing key, no zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ZPoly {
    terms: Vec<(u128, BigInt)>,
}

impl ZPoly {
    pub fn zero() -> Self {
        ZPoly { terms: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            ZPoly { terms: vec![(0, c)] }
        }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn monomial(key: u128, c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            ZPoly { terms: vec![(key, c)] }
        }
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(unit(i), BigInt::one())
    }

    /// Builds from arbitrary (key, coefficient) pairs, combining duplicates.
    pub fn from_terms(terms: impl IntoIterator<Item = (u128, BigInt)>) -> Self {
        let mut map: HashMap<u128, BigInt> = HashMap::new();
        for (k, c) in terms {
            *map.entry(k).or_insert_with(BigInt::zero) += c;
        }
        Self::from_map(map)
    }

    fn from_map(map: HashMap<u128, BigInt>) -> Self {
        let mut terms: Vec<(u128, BigInt)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        ZPoly { terms }
    }

    pub fn terms(&self) -> &[(u128, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == 0)
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(u128, BigInt)> {
        self.terms.first()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.iter().map(|(k, _)| exp_of(*k, i)).max().unwrap_or(0)
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.iter().any(|(k, _)| exp_of(*k, i) > 0)
    }

    pub fn neg(&self) -> Self {
        ZPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ZPoly {
            terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect(),
        }
    }

    /// Exact division of every coefficient by `c` (caller guarantees divisibility).
    pub fn div_exact_scalar(&self, c: &BigInt) -> Self {
        ZPoly {
            terms: self.terms.iter().map(|(k, x)| (*k, x / c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 > b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 > a[i].0 {
                let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                out.push((b[j].0, c));
                j += 1;
            } else {
                let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        ZPoly { terms: out }
    }

    fn check_degrees(&self, other: &Self, nvars: usize) {
        for v in 0..nvars {
            let d = self.degree_in(v) + other.degree_in(v);
            assert!(d <= MAX_EXP, "exponent overflow in variable {v}");
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        self.check_degrees(other, MAX_VARS);
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        if small.len() == 1 {
            let (k, c) = &small.terms[0];
            return ZPoly {
                terms: large.terms.iter().map(|(kk, cc)| (kk + k, cc * c)).collect(),
            };
        }
        let mut map: HashMap<u128, BigInt> = HashMap::with_capacity(large.len() * 2);
        for (ka, ca) in &small.terms {
            for (kb, cb) in &large.terms {
                let prod = ca * cb;
                match map.entry(ka + kb) {
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += prod;
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                }
            }
        }
        Self::from_map(map)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiplies by the monomial with packed key `key`.
    pub fn shift_by(&self, key: u128) -> Self {
        ZPoly {
            terms: self.terms.iter().map(|(k, c)| (k + key, c.clone())).collect(),
        }
    }

    /// Divides by a monomial that divides every term.
    pub fn unshift_by(&self, key: u128) -> Self {
        ZPoly {
            terms: self.terms.iter().map(|(k, c)| (k - key, c.clone())).collect(),
        }
    }

    /// Gcd of the coefficients, signed like the leading coefficient.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        if let Some((_, lc)) = self.terms.first() {
            if lc.is_negative() {
                g = -g;
            }
        }
        g
    }

    /// Per-variable minimum exponent over all terms.
    pub fn monomial_content(&self, nvars: usize) -> Vec<u32> {
        let mut m: Vec<u32> = vec![u32::MAX; nvars];
        for (k, _) in &self.terms {
            for (v, slot) in m.iter_mut().enumerate() {
                *slot = (*slot).min(exp_of(*k, v));
            }
        }
        if self.terms.is_empty() {
            m.iter_mut().for_each(|x| *x = 0);
        }
        m
    }

    pub fn derivative(&self, i: usize) -> Self {
        let u = unit(i);
        let terms: Vec<(u128, BigInt)> = self
            .terms
            .iter()
            .filter_map(|(k, c)| {
                let e = exp_of(*k, i);
                (e > 0).then(|| (k - u, c * BigInt::from(e)))
            })
            .collect();
        Self::from_terms(terms)
    }

    /// Splits into coefficients of powers of variable `i`: result[j] is the
    /// coefficient of `x_i^j` (a polynomial free of `x_i`).
    pub fn coefficients_in(&self, i: usize) -> Vec<ZPoly> {
        let d = self.degree_in(i) as usize;
        let mut parts: Vec<Vec<(u128, BigInt)>> = vec![Vec::new(); d + 1];
        for (k, c) in &self.terms {
            let e = exp_of(*k, i);
            parts[e as usize].push((k - (e as u128) * unit(i), c.clone()));
        }
        parts
            .into_iter()
            .map(|mut t| {
                t.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                ZPoly { terms: t }
            })
            .collect()
    }

    /// Exact value at a rational point (`point.len()` variables).
    pub fn eval(&self, point: &[Rational]) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        let n = point.len();
        // Common-denominator evaluation: everything stays in integers.
        let degs: Vec<u32> = (0..n).map(|v| self.degree_in(v)).collect();
        let nums: Vec<Vec<BigInt>> = (0..n)
            .map(|v| powers(point[v].numer(), degs[v]))
            .collect();
        let dens: Vec<Vec<BigInt>> = (0..n)
            .map(|v| powers(point[v].denom(), degs[v]))
            .collect();
        let mut total = BigInt::zero();
        for (k, c) in &self.terms {
            let mut t = c.clone();
            for v in 0..n {
                let e = exp_of(*k, v);
                let d = degs[v];
                if d == 0 {
                    continue;
                }
                if e > 0 {
                    t *= &nums[v][e as usize];
                }
                if d > e {
                    t *= &dens[v][(d - e) as usize];
                }
            }
            total += t;
        }
        let mut denom = BigInt::one();
        for v in 0..n {
            if degs[v] > 0 {
                denom *= &dens[v][degs[v] as usize];
            }
        }
        Rational::new(total, denom)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let n = point.len();
        let mut total = 0.0;
        for (k, c) in &self.terms {
            let mut t = super::big_to_f64(c);
            for (v, x) in point.iter().enumerate().take(n) {
                let e = exp_of(*k, v);
                if e > 0 {
                    t *= x.powi(e as i32);
                }
            }
            total += t;
        }
        total
    }

    /// Total number of digits across coefficients (a size measure for reports).
    pub fn size_bits(&self) -> u64 {
        self.terms.iter().map(|(_, c)| c.bits()).sum()
    }
}

impl PartialOrd for ZPoly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Arbitrary but total order (size first), used to keep factor lists canonical.
impl Ord for ZPoly {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.terms
            .len()
            .cmp(&other.terms.len())
            .then_with(|| self.terms.cmp(&other.terms))
    }
}

fn powers(x: &BigInt, d: u32) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(d as usize + 1);
    out.push(BigInt::one());
    for i in 0..d as usize {
        let next = &out[i] * x;
        out.push(next);
    }
    out
}
