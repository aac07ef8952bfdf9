//! Quotients of polynomials, compared by cross-multiplication.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::poly::MultiPoly;
use super::rational::Rational;
use super::vars::Vars;
use crate::error::{Error, Result};

/// `num / den` with `den` not the zero polynomial. No gcd normalization is
/// performed.
#[derive(Clone, Debug)]
pub struct RatFn {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl RatFn {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero("zero denominator polynomial".into()));
        }
        Ok(RatFn { num, den })
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let den = MultiPoly::constant(p.vars(), Rational::one());
        RatFn { num: p, den }
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        Self::from_poly(MultiPoly::constant(vars, c))
    }

    pub fn add(&self, o: &Self) -> Self {
        RatFn {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RatFn {
            num: self.num.mul(&o.den).sub(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        RatFn {
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        RatFn::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    /// Quotient rule, applied `order` times.
    pub fn diff(&self, var: &str, order: u32) -> Result<Self> {
        let mut f = self.clone();
        for _ in 0..order {
            let n = f.num.diff(var, 1)?.mul(&f.den).sub(&f.num.mul(&f.den.diff(var, 1)?));
            f = RatFn {
                num: n,
                den: f.den.mul(&f.den),
            };
        }
        Ok(f)
    }

    pub fn eval(&self, assignment: &HashMap<String, Rational>) -> Result<Rational> {
        let d = self.den.eval(assignment)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero("denominator vanishes at the point".into()));
        }
        Ok(self.num.eval(assignment)? / d)
    }

    /// Equality as rational functions: `p₁q₂ − p₂q₁` expands to zero.
    pub fn equal(&self, o: &Self) -> bool {
        self.num.mul(&o.den).sub(&o.num.mul(&self.den)).is_zero()
    }
}

/// Free-function form of [`RatFn::equal`].
pub fn ratfn_equal(f: &RatFn, g: &RatFn) -> bool {
    f.equal(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::rational::{int, rat};

    #[test]
    fn phi_derivative_matches_closed_form() {
        let v = Vars::new(&["a", "b"]);
        let a = MultiPoly::var(&v, "a").unwrap();
        let b = MultiPoly::var(&v, "b").unwrap();
        let den = a.mul(&a).add(&b.mul(&b));
        let phi = RatFn::new(b.mul(&b), den.clone()).unwrap();
        let mut pt = HashMap::new();
        pt.insert("a".to_string(), int(1));
        pt.insert("b".to_string(), int(1));
        assert_eq!(phi.eval(&pt).unwrap(), rat(1, 2));
        let phi_a = phi.diff("a", 1).unwrap();
        let closed = RatFn::new(a.mul(&b).mul(&b).scale(&int(-2)), den.mul(&den)).unwrap();
        assert!(ratfn_equal(&phi_a, &closed));
        assert!(phi.equal(&phi));
        let one = MultiPoly::constant(&v, int(1));
        let f = RatFn::new(one.clone(), one.add(&a)).unwrap();
        let g = RatFn::new(one.clone(), one.sub(&a)).unwrap();
        assert!(!f.equal(&g));
    }

    #[test]
    fn pole_is_reported() {
        let v = Vars::new(&["a"]);
        let a = MultiPoly::var(&v, "a").unwrap();
        let f = RatFn::new(MultiPoly::constant(&v, int(1)), a).unwrap();
        let mut pt = HashMap::new();
        pt.insert("a".to_string(), int(0));
        assert!(matches!(f.eval(&pt), Err(Error::DivisionByZero(_))));
    }
}
