//! Exact arithmetic: rationals, multivariate polynomials, rational functions,
//! and the factored engine used for the large identity checks.

pub mod field;
pub mod form;
pub mod frac;
pub mod integrate;
pub mod poly;
pub mod ratfn;
pub mod rational;
pub mod sz;
pub mod vars;
pub mod zpoly;

pub use field::Field;
pub use form::FormPoly;
pub use frac::Frac;
pub use integrate::{integrate_poly_over_triangle, monomial_integral_unit_triangle, segment_mean, RatTriangle};
pub use poly::{MultiPoly, PolyOp};
pub use ratfn::{ratfn_equal, RatFn};
pub use rational::{format_rational, parse_rational, rat, int, to_f64, Rational};
pub use vars::Vars;
pub use zpoly::ZPoly;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

pub(crate) fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `poly_arith` in functional form.
pub fn poly_arith(p: &MultiPoly, q: &MultiPoly, kind: PolyOp) -> MultiPoly {
    p.arith(q, kind)
}

/// `poly_diff` in functional form.
pub fn poly_diff(p: &MultiPoly, var: &str, order: u32) -> crate::Result<MultiPoly> {
    p.diff(var, order)
}
