//! Polynomials in "outer" variables (degrees of freedom) whose coefficients
//! are [`Frac`] values in "inner" variables (shape parameters).
//!
//! Quadratic forms such as the local element energies live here: every
//! Hessian entry with respect to the outer variables is a single coefficient,
//! so identities between forms reduce to identities between coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::frac::Frac;
use super::rational::Rational;
use super::vars::Vars;
use crate::error::{Error, Result};

pub const MAX_OUTER: usize = 16;
const BITS: u32 = 8;
const MASK: u128 = (1 << BITS) - 1;

#[inline]
fn shift(i: usize) -> u32 {
    128 - BITS * (i as u32 + 1)
}

#[inline]
fn outer_exp(key: u128, i: usize) -> u32 {
    ((key >> shift(i)) & MASK) as u32
}

#[inline]
fn outer_unit(i: usize) -> u128 {
    1u128 << shift(i)
}

fn outer_degree(key: u128) -> u32 {
    (0..MAX_OUTER).map(|i| outer_exp(key, i)).sum()
}

#[derive(Clone, Debug)]
pub struct FormPoly {
    outer: Vars,
    terms: BTreeMap<u128, Frac>,
}

impl FormPoly {
    pub fn zero() -> Self {
        FormPoly {
            outer: Vars::empty(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_frac(f: Frac) -> Self {
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(0, f);
        }
        FormPoly {
            outer: Vars::empty(),
            terms,
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_frac(Frac::constant(c))
    }

    /// The outer variable `name` as a form.
    pub fn outer_var(outer: &Vars, name: &str) -> Result<Self> {
        assert!(outer.len() <= MAX_OUTER, "too many outer variables");
        let i = outer.index_of(name)?;
        let mut terms = BTreeMap::new();
        terms.insert(outer_unit(i), Frac::one());
        Ok(FormPoly {
            outer: outer.clone(),
            terms,
        })
    }

    pub fn outer(&self) -> &Vars {
        &self.outer
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient when the form has no outer-variable dependence.
    pub fn as_frac(&self) -> Option<Frac> {
        match self.terms.len() {
            0 => Some(Frac::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| outer_degree(*k)).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, &Frac)> {
        let n = self.outer.len();
        self.terms
            .iter()
            .map(move |(k, c)| ((0..n).map(|i| outer_exp(*k, i)).collect(), c))
    }

    fn insert_add(terms: &mut BTreeMap<u128, Frac>, key: u128, c: Frac) {
        if c.is_zero() {
            return;
        }
        match terms.remove(&key) {
            Some(old) => {
                let s = old.add(&c);
                if !s.is_zero() {
                    terms.insert(key, s);
                }
            }
            None => {
                terms.insert(key, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let outer = self.outer.join(&other.outer);
        let (big, small) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut terms = big.terms.clone();
        for (k, c) in &small.terms {
            Self::insert_add(&mut terms, *k, c.clone());
        }
        FormPoly { outer, terms }
    }

    pub fn neg(&self) -> Self {
        FormPoly {
            outer: self.outer.clone(),
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let outer = self.outer.join(&other.outer);
        let mut terms = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                for i in 0..MAX_OUTER {
                    assert!(
                        outer_exp(*ka, i) + outer_exp(*kb, i) <= MASK as u32,
                        "outer exponent overflow"
                    );
                }
                Self::insert_add(&mut terms, ka + kb, ca.mul(cb));
            }
        }
        FormPoly { outer, terms }
    }

    pub fn scale(&self, f: &Frac) -> Self {
        if f.is_zero() {
            return FormPoly {
                outer: self.outer.clone(),
                terms: BTreeMap::new(),
            };
        }
        FormPoly {
            outer: self.outer.clone(),
            terms: self.terms.iter().map(|(k, c)| (*k, c.mul(f))).collect(),
        }
    }

    /// Division; the divisor must be free of outer variables.
    pub fn try_div(&self, other: &Self) -> Result<Self> {
        let d = other
            .as_frac()
            .ok_or_else(|| Error::InvalidArgument("division by a form in the outer variables".into()))?;
        Ok(self.scale(&d.recip()?))
    }

    pub fn try_pow(&self, k: i32) -> Result<Self> {
        if k < 0 {
            let f = self
                .as_frac()
                .ok_or_else(|| Error::InvalidArgument("negative power of a form".into()))?;
            return Ok(FormPoly::from_frac(f.try_pow(k)?).with_outer(&self.outer));
        }
        let mut result = FormPoly::constant(Rational::one()).with_outer(&self.outer);
        for _ in 0..k {
            result = result.mul(self);
        }
        Ok(result)
    }

    /// Adopts `outer` as the outer variable list (must be compatible).
    pub fn with_outer(mut self, outer: &Vars) -> Self {
        self.outer = self.outer.join(outer);
        self
    }

    /// Partial derivative with respect to an outer or inner variable.
    pub fn diff(&self, name: &str) -> Result<Self> {
        if let Ok(i) = self.outer.index_of(name) {
            let u = outer_unit(i);
            let mut terms = BTreeMap::new();
            for (k, c) in &self.terms {
                let e = outer_exp(*k, i);
                if e > 0 {
                    Self::insert_add(&mut terms, k - u, c.scale(&Rational::from_integer(e.into())));
                }
            }
            return Ok(FormPoly {
                outer: self.outer.clone(),
                terms,
            });
        }
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let d = match c.vars().index_of(name) {
                Ok(_) => c.diff(name)?,
                Err(_) if c.vars().is_empty() => Frac::zero(),
                Err(e) => return Err(e),
            };
            Self::insert_add(&mut terms, *k, d);
        }
        Ok(FormPoly {
            outer: self.outer.clone(),
            terms,
        })
    }

    /// Antiderivative in an outer variable (zero constant of integration).
    pub fn antiderivative(&self, name: &str) -> Result<Self> {
        let i = self.outer.index_of(name)?;
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let e = outer_exp(*k, i);
            assert!(e < MASK as u32, "outer exponent overflow");
            let inv = Rational::new(1.into(), (e + 1).into());
            Self::insert_add(&mut terms, k + outer_unit(i), c.scale(&inv));
        }
        Ok(FormPoly {
            outer: self.outer.clone(),
            terms,
        })
    }

    /// Definite integral over an outer variable between two forms.
    pub fn integrate(&self, name: &str, lo: &FormPoly, hi: &FormPoly) -> Result<Self> {
        let f = self.antiderivative(name)?;
        Ok(f.subs_outer(name, hi)?.sub(&f.subs_outer(name, lo)?))
    }

    /// Substitutes an inner variable by an outer-free value.
    pub fn subs_inner(&self, name: &str, value: &Frac) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let s = if c.vars().is_empty() { c.clone() } else { c.subs(name, value)? };
            Self::insert_add(&mut terms, *k, s);
        }
        Ok(FormPoly {
            outer: self.outer.clone(),
            terms,
        })
    }

    /// Substitutes an outer variable by another form.
    pub fn subs_outer(&self, name: &str, value: &FormPoly) -> Result<Self> {
        let i = self.outer.index_of(name)?;
        let mut out = FormPoly::zero().with_outer(&self.outer).with_outer(&value.outer);
        let max_e = self.terms.keys().map(|k| outer_exp(*k, i)).max().unwrap_or(0);
        let mut pows = vec![FormPoly::constant(Rational::one())];
        for j in 0..max_e as usize {
            let next = pows[j].mul(value);
            pows.push(next);
        }
        for (k, c) in &self.terms {
            let e = outer_exp(*k, i);
            let rest = FormPoly {
                outer: self.outer.clone(),
                terms: [(k - (e as u128) * outer_unit(i), c.clone())].into_iter().collect(),
            };
            out = out.add(&rest.mul(&pows[e as usize]));
        }
        Ok(out)
    }

    /// Coefficient of the monomial with the given outer exponents.
    pub fn coefficient(&self, exps: &[(usize, u32)]) -> Frac {
        let key = exps.iter().fold(0u128, |acc, (i, e)| acc + (*e as u128) * outer_unit(*i));
        self.terms.get(&key).cloned().unwrap_or_else(Frac::zero)
    }

    /// Exact evaluation: inner point then outer point.
    pub fn eval(&self, inner: &[Rational], outer: &[Rational]) -> Result<Rational> {
        let mut total = Rational::zero();
        for (k, c) in &self.terms {
            let mut v = c.eval(inner)?;
            for (i, x) in outer.iter().enumerate().take(self.outer.len()) {
                let e = outer_exp(*k, i);
                if e > 0 {
                    v *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += v;
        }
        Ok(total)
    }

    pub fn eval_f64(&self, inner: &[f64], outer: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let mut v = c.eval_f64(inner);
                for (i, x) in outer.iter().enumerate().take(self.outer.len()) {
                    let e = outer_exp(*k, i);
                    if e > 0 {
                        v *= x.powi(e as i32);
                    }
                }
                v
            })
            .sum()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::rational::{int, rat};

    #[test]
    fn quadratic_form_coefficients() {
        let inner = Vars::new(&["a"]);
        let outer = Vars::new(&["x", "y"]);
        let a = FormPoly::from_frac(Frac::var(&inner, "a").unwrap());
        let x = FormPoly::outer_var(&outer, "x").unwrap();
        let y = FormPoly::outer_var(&outer, "y").unwrap();
        // (a x + y)^2 = a² x² + 2a xy + y²
        let f = a.mul(&x).add(&y).try_pow(2).unwrap();
        let hxy = f.diff("x").unwrap().diff("y").unwrap();
        let two_a = Frac::var(&inner, "a").unwrap().scale(&int(2));
        assert!(hxy.as_frac().unwrap().sub(&two_a).is_zero());
        assert_eq!(f.eval(&[rat(1, 2)], &[int(2), int(3)]).unwrap(), int(16));
        let g = f.subs_outer("y", &x).unwrap();
        assert_eq!(g.eval(&[rat(1, 2)], &[int(2), int(0)]).unwrap(), int(9));
        let da = f.diff("a").unwrap();
        assert_eq!(da.eval(&[rat(1, 2)], &[int(1), int(1)]).unwrap(), int(3));
    }

    #[test]
    fn definite_integrals() {
        let outer = Vars::new(&["t", "s"]);
        let t = FormPoly::outer_var(&outer, "t").unwrap();
        let s = FormPoly::outer_var(&outer, "s").unwrap();
        // ∫_0^{1-s} t dt = (1-s)²/2, then ∫_0^1 ds = 1/6.
        let one = FormPoly::constant(int(1));
        let zero = FormPoly::constant(int(0));
        let inner = t.integrate("t", &zero, &one.sub(&s)).unwrap();
        let total = inner.integrate("s", &zero, &one).unwrap();
        assert_eq!(total.eval(&[], &[int(0), int(0)]).unwrap(), rat(1, 6));
    }

    #[test]
    fn division_only_by_pure_values() {
        let outer = Vars::new(&["x"]);
        let x = FormPoly::outer_var(&outer, "x").unwrap();
        assert!(x.try_div(&x).is_err());
        let half = x.try_div(&FormPoly::constant(int(2))).unwrap();
        assert_eq!(half.eval(&[], &[int(1)]).unwrap(), rat(1, 2));
    }
}
