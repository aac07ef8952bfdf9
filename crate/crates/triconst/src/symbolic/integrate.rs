//! Exact integration of polynomials over triangles and segments.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::MultiPoly;
use super::rational::Rational;
use super::vars::Vars;
use crate::error::{Error, Result};

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `∫∫ x^p y^q` over the triangle (0,0), (1,0), (0,1): `p! q! / (p+q+2)!`.
pub fn monomial_integral_unit_triangle(p: u32, q: u32) -> Rational {
    Rational::new(factorial(p) * factorial(q), factorial(p + q + 2))
}

/// A triangle with exact vertices.
pub type RatTriangle = [(Rational, Rational); 3];

/// Twice the signed area.
pub fn twice_signed_area(t: &RatTriangle) -> Rational {
    let (x1, y1) = &t[0];
    let (x2, y2) = &t[1];
    let (x3, y3) = &t[2];
    (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)
}

/// Affine pullback of a polynomial in `x`, `y` to reference coordinates
/// `s`, `t` with `p = p₁ + s(p₂−p₁) + t(p₃−p₁)`.
fn pullback(u: &MultiPoly, tri: &RatTriangle) -> Result<MultiPoly> {
    let st = Vars::new(&["s", "t"]);
    let s = MultiPoly::var(&st, "s")?;
    let t = MultiPoly::var(&st, "t")?;
    let affine = |c0: &Rational, c1: Rational, c2: Rational| {
        MultiPoly::constant(&st, c0.clone())
            .add(&s.scale(&c1))
            .add(&t.scale(&c2))
    };
    let (x1, y1) = &tri[0];
    let xs = affine(x1, &tri[1].0 - x1, &tri[2].0 - x1);
    let ys = affine(y1, &tri[1].1 - y1, &tri[2].1 - y1);
    let mut subs: Vec<(&str, &MultiPoly)> = Vec::new();
    for name in u.vars().names() {
        match name.as_str() {
            "x" => subs.push(("x", &xs)),
            "y" => subs.push(("y", &ys)),
            other => return Err(Error::UnknownVariable(other.to_string())),
        }
    }
    let r = u.compose(&subs)?;
    // Drop the (now absent) x, y from the universe.
    let mut out = MultiPoly::zero(&st);
    for (e, c) in r.terms() {
        let names = r.vars().names();
        let mut ee = vec![0u32; 2];
        for (n, &k) in names.iter().zip(e) {
            match n.as_str() {
                "s" => ee[0] = k,
                "t" => ee[1] = k,
                _ => debug_assert_eq!(k, 0),
            }
        }
        out = out.add(&MultiPoly::monomial(&st, ee, c.clone()));
    }
    Ok(out)
}

/// Exact `∫∫_tri u dx dy` for a polynomial in `x`, `y`.
pub fn integrate_poly_over_triangle(u: &MultiPoly, tri: &RatTriangle) -> Result<Rational> {
    let j = twice_signed_area(tri);
    if j.is_zero() {
        return Err(Error::Degenerate("zero-area triangle".into()));
    }
    let p = pullback(u, tri)?;
    let mut total = Rational::zero();
    for (e, c) in p.terms() {
        total += c * monomial_integral_unit_triangle(e[0], e[1]);
    }
    Ok(total * j.abs())
}

/// Exact `∫₀¹ u(p + τ(q − p)) dτ`, the mean of `u` over the segment `pq`.
pub fn segment_mean(u: &MultiPoly, p: &(Rational, Rational), q: &(Rational, Rational)) -> Result<Rational> {
    // Reuse the triangle pullback with a degenerate third vertex equal to p:
    // the t-direction then carries no displacement.
    let tri = [p.clone(), q.clone(), p.clone()];
    let poly = pullback(u, &tri)?;
    let mut total = Rational::zero();
    for (e, c) in poly.terms() {
        if e[1] == 0 {
            total += c / Rational::from_integer(BigInt::from(e[0] + 1));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::rational::{int, rat};

    fn unit() -> RatTriangle {
        [(int(0), int(0)), (int(1), int(0)), (int(0), int(1))]
    }

    #[test]
    fn monomial_integrals() {
        assert_eq!(monomial_integral_unit_triangle(0, 0), rat(1, 2));
        assert_eq!(monomial_integral_unit_triangle(1, 0), rat(1, 6));
        assert_eq!(monomial_integral_unit_triangle(1, 1), rat(1, 24));
        for p in 0..6 {
            for q in 0..6 {
                assert_eq!(monomial_integral_unit_triangle(p, q), monomial_integral_unit_triangle(q, p));
            }
        }
    }

    #[test]
    fn triangle_integrals() {
        let v = Vars::new(&["x", "y"]);
        let x = MultiPoly::var(&v, "x").unwrap();
        let y = MultiPoly::var(&v, "y").unwrap();
        let one = MultiPoly::constant(&v, int(1));
        assert_eq!(integrate_poly_over_triangle(&one, &unit()).unwrap(), rat(1, 2));
        assert_eq!(integrate_poly_over_triangle(&x, &unit()).unwrap(), rat(1, 6));
        assert_eq!(integrate_poly_over_triangle(&x.add(&y), &unit()).unwrap(), rat(1, 3));
        // Orientation does not matter; scaling by 2 multiplies the area by 4.
        let rev = [unit()[0].clone(), unit()[2].clone(), unit()[1].clone()];
        assert_eq!(integrate_poly_over_triangle(&x, &rev).unwrap(), rat(1, 6));
        let big = [(int(0), int(0)), (int(2), int(0)), (int(0), int(2))];
        assert_eq!(integrate_poly_over_triangle(&one, &big).unwrap(), int(2));
        let flat = [(int(0), int(0)), (int(1), int(1)), (int(2), int(2))];
        assert!(integrate_poly_over_triangle(&one, &flat).is_err());
    }

    #[test]
    fn segment_means() {
        let v = Vars::new(&["x", "y"]);
        let x = MultiPoly::var(&v, "x").unwrap();
        // mean of x on the hypotenuse (1,0)-(0,1) is 1/2; of x² on [0,1]×{0} is 1/3
        assert_eq!(segment_mean(&x, &(int(1), int(0)), &(int(0), int(1))).unwrap(), rat(1, 2));
        assert_eq!(segment_mean(&x.mul(&x), &(int(0), int(0)), &(int(1), int(0))).unwrap(), rat(1, 3));
    }
}
