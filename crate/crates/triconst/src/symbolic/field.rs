//! A minimal arithmetic interface so that formulas (element energies, the
//! closed-form constants) are written once and evaluated over exact
//! rationals, floats, rational functions or forms alike.

use num_traits::{One, Zero};

use super::form::FormPoly;
use super::frac::Frac;
use super::rational::{to_f64, Rational};

pub trait Field: Clone {
    fn from_rational(q: &Rational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Division; panics on an exact zero divisor (formulas here never divide
    /// by zero on valid triangles).
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;

    fn int(k: i64) -> Self {
        Self::from_rational(&Rational::from_integer(k.into()))
    }
    fn zero() -> Self {
        Self::int(0)
    }
    fn one() -> Self {
        Self::int(1)
    }
    fn sq(&self) -> Self {
        self.mul(self)
    }
    fn scale_int(&self, k: i64) -> Self {
        self.mul(&Self::int(k))
    }
    fn div_int(&self, k: i64) -> Self {
        self.div(&Self::int(k))
    }
}

impl Field for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        assert!(!o.is_zero(), "exact division by zero");
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as One>::one()
    }
}

impl Field for f64 {
    fn from_rational(q: &Rational) -> Self {
        to_f64(q)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn int(k: i64) -> Self {
        k as f64
    }
}

impl Field for Frac {
    fn from_rational(q: &Rational) -> Self {
        Frac::constant(q.clone())
    }
    fn add(&self, o: &Self) -> Self {
        Frac::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Frac::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Frac::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        Frac::try_div(self, o).expect("division by the zero rational function")
    }
    fn neg(&self) -> Self {
        Frac::neg(self)
    }
}

impl Field for FormPoly {
    fn from_rational(q: &Rational) -> Self {
        FormPoly::constant(q.clone())
    }
    fn add(&self, o: &Self) -> Self {
        FormPoly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        FormPoly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        FormPoly::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        FormPoly::try_div(self, o).expect("division by a non-constant form or zero")
    }
    fn neg(&self) -> Self {
        FormPoly::neg(self)
    }
}
