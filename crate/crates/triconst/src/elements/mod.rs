//! Local quadratic forms of the two quadratic interpolations, their
//! coefficient matrices, and the interpolants themselves.
//!
//! Edge `k` of an element is the edge opposite vertex `k`:
//! γ₁ = p₂p₃, γ₂ = p₃p₁, γ₃ = p₁p₂. Normal fluxes use the outward normal.

pub mod forms;

pub use forms::FormKind;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Triangle, TriangleShape};
use crate::linalg::{solve_exact, SymRatMatrix};
use crate::symbolic::rational::{int, Rational};
use crate::symbolic::sz::PointSampler;
use crate::symbolic::{integrate_poly_over_triangle, segment_mean, MultiPoly, RatTriangle, Vars};

/// Element area `s` and shape numbers `c_k = |γ_k|² / s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementGeometry {
    #[serde(with = "crate::symbolic::rational::serde_rational")]
    pub s: Rational,
    #[serde(with = "serde_c")]
    pub c: [Rational; 3],
}

mod serde_c {
    use super::Rational;
    use crate::symbolic::rational::{format_rational, parse_rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &[Rational; 3], s: S) -> Result<S::Ok, S::Error> {
        c.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Rational; 3], D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let parsed = v
            .iter()
            .map(|x| parse_rational(x))
            .collect::<crate::Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        parsed
            .try_into()
            .map_err(|_| serde::de::Error::custom("expected three shape numbers"))
    }
}

impl ElementGeometry {
    /// Validates `s > 0`, `c_k > 0` and that the `c_k` come from a real
    /// triangle of area `s`: Heron's formula in these variables reads
    /// `2(c₁c₂ + c₂c₃ + c₃c₁) − (c₁² + c₂² + c₃²) = 16`.
    pub fn new(s: Rational, c: [Rational; 3]) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::Degenerate("element area must be positive".into()));
        }
        if c.iter().any(|x| !x.is_positive()) {
            return Err(Error::Degenerate("shape numbers must be positive".into()));
        }
        let [c1, c2, c3] = &c;
        let heron = int(2) * (c1 * c2 + c2 * c3 + c3 * c1) - (c1 * c1 + c2 * c2 + c3 * c3);
        if heron != int(16) {
            return Err(Error::Degenerate(format!(
                "shape numbers are not those of a triangle (Heron form {heron} ≠ 16)"
            )));
        }
        Ok(ElementGeometry { s, c })
    }

    pub fn from_triangle(tri: &Triangle) -> Result<Self> {
        let e = tri.squared_edge_data()?;
        let s = tri.twice_signed_area().abs() / int(2);
        let c = [&e.a2 / &s, &e.b2 / &s, &e.c2 / &s];
        Self::new(s, c)
    }

    /// Geometry of a triangle similar to `T_{a,b}` with area `s`.
    pub fn from_shape(shape: &TriangleShape, s: Rational) -> Result<Self> {
        let (a, b) = (&shape.a, &shape.b);
        if !b.is_positive() {
            return Err(Error::Degenerate("shape needs b > 0".into()));
        }
        let one = int(1);
        let c = [
            int(2) * ((&one - a) * (&one - a) + b * b) / b,
            int(2) * (a * a + b * b) / b,
            int(2) / b,
        ];
        Self::new(s, c)
    }

    fn c_refs(&self) -> [&Rational; 3] {
        [&self.c[0], &self.c[1], &self.c[2]]
    }
}

/// Edge means `w` and element mean `u0` of the α-interpolant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDofsAlpha {
    pub w: [Rational; 3],
    pub u0: Rational,
}

impl LocalDofsAlpha {
    /// `(w1, w2, w3, u0)`.
    pub fn to_vec(&self) -> Vec<Rational> {
        let mut v = self.w.to_vec();
        v.push(self.u0.clone());
        v
    }
}

/// Vertex values `u` and outward normal-flux integrals `w` of the
/// β-interpolant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDofsBeta {
    pub u: [Rational; 3],
    pub w: [Rational; 3],
}

impl LocalDofsBeta {
    /// `(u1, u2, u3, w1, w2, w3)`.
    pub fn to_vec(&self) -> Vec<Rational> {
        self.u.iter().chain(self.w.iter()).cloned().collect()
    }
}

/// `F^(α)_kind`, kind 0 (L² norm²) or 1 (H¹ seminorm²).
pub fn f_alpha(kind: usize, geom: &ElementGeometry, dofs: &LocalDofsAlpha) -> Result<Rational> {
    let form = match kind {
        0 => FormKind::Alpha0,
        1 => FormKind::Alpha1,
        _ => return Err(Error::InvalidArgument(format!("α form kind must be 0 or 1, got {kind}"))),
    };
    Ok(form.eval(&geom.s, geom.c_refs(), &dofs.to_vec()))
}

/// `F^(β)_kind`, kind 0 (L²), 1 (H¹ seminorm) or 2 (H² seminorm), squared.
pub fn f_beta(kind: usize, geom: &ElementGeometry, dofs: &LocalDofsBeta) -> Result<Rational> {
    let form = match kind {
        0 => FormKind::Beta0,
        1 => FormKind::Beta1,
        2 => FormKind::Beta2,
        _ => return Err(Error::InvalidArgument(format!("β form kind must be 0, 1 or 2, got {kind}"))),
    };
    Ok(form.eval(&geom.s, geom.c_refs(), &dofs.to_vec()))
}

/// Half-Hessian `M` of the form, so that `dofᵀ M dof` is the form value.
///
/// The forms are exact quadratic forms, so polarization on unit vectors
/// recovers `M` exactly: `M_ii = F(e_i)`,
/// `M_ij = (F(e_i + e_j) − F(e_i) − F(e_j)) / 2`.
pub fn local_matrix(form: FormKind, geom: &ElementGeometry) -> SymRatMatrix {
    let n = form.dofs();
    let eval = |v: &[Rational]| form.eval(&geom.s, geom.c_refs(), v);
    let unit = |i: usize| {
        let mut v = vec![Rational::zero(); n];
        v[i] = int(1);
        v
    };
    let diag: Vec<Rational> = (0..n).map(|i| eval(&unit(i))).collect();
    let mut m = SymRatMatrix::zeros(n);
    for i in 0..n {
        m.set(i, i, diag[i].clone());
        for j in 0..i {
            let mut v = unit(i);
            v[j] = int(1);
            m.set(i, j, (eval(&v) - &diag[i] - &diag[j]) / int(2));
        }
    }
    m
}

fn xy() -> Vars {
    Vars::new(&["x", "y"])
}

fn rat_triangle(tri: &Triangle) -> RatTriangle {
    let p = |i: usize| (tri.p[i][0].clone(), tri.p[i][1].clone());
    [p(0), p(1), p(2)]
}

/// Endpoints of γ_k (0-based `k`), traversed p₂→p₃, p₃→p₁, p₁→p₂.
fn edge(tri: &RatTriangle, k: usize) -> (&(Rational, Rational), &(Rational, Rational)) {
    (&tri[(k + 1) % 3], &tri[(k + 2) % 3])
}

fn nondegenerate(tri: &Triangle) -> Result<RatTriangle> {
    if tri.twice_signed_area().is_zero() {
        return Err(Error::Degenerate("zero-area triangle".into()));
    }
    Ok(rat_triangle(tri))
}

/// Lifts a polynomial onto the `x, y` universe.
fn on_xy(u: &MultiPoly) -> Result<MultiPoly> {
    u.lift(&xy())
}

/// `∫_γ ∇u·n ds` with the outward normal, for every edge of `tri`.
fn normal_fluxes(u: &MultiPoly, tri: &RatTriangle) -> Result<[Rational; 3]> {
    let ux = u.diff("x", 1)?;
    let uy = u.diff("y", 1)?;
    let orient = if crate::symbolic::integrate::twice_signed_area(tri).is_positive() {
        int(1)
    } else {
        int(-1)
    };
    let flux = |k: usize| -> Result<Rational> {
        let (p, q) = edge(tri, k);
        let mx = segment_mean(&ux, p, q)?;
        let my = segment_mean(&uy, p, q)?;
        Ok(&orient * (mx * (&q.1 - &p.1) - my * (&q.0 - &p.0)))
    };
    Ok([flux(0)?, flux(1)?, flux(2)?])
}

/// Degrees of freedom of the α-interpolant of `u` (equal to those of `u`).
pub fn dofs_alpha(tri: &Triangle, u: &MultiPoly) -> Result<LocalDofsAlpha> {
    let t = nondegenerate(tri)?;
    let u = on_xy(u)?;
    let mean = |k: usize| {
        let (p, q) = edge(&t, k);
        segment_mean(&u, p, q)
    };
    let area = crate::symbolic::integrate::twice_signed_area(&t).abs() / int(2);
    Ok(LocalDofsAlpha {
        w: [mean(0)?, mean(1)?, mean(2)?],
        u0: integrate_poly_over_triangle(&u, &t)? / area,
    })
}

/// Degrees of freedom of the β-interpolant of `u` (equal to those of `u`).
pub fn dofs_beta(tri: &Triangle, u: &MultiPoly) -> Result<LocalDofsBeta> {
    let t = nondegenerate(tri)?;
    let u = on_xy(u)?;
    let val = |i: usize| u.eval_point(&[t[i].0.clone(), t[i].1.clone()]);
    Ok(LocalDofsBeta {
        u: [val(0), val(1), val(2)],
        w: normal_fluxes(&u, &t)?,
    })
}

fn combine(basis: &[MultiPoly], coeffs: &[Rational]) -> MultiPoly {
    basis
        .iter()
        .zip(coeffs)
        .fold(MultiPoly::zero(&xy()), |acc, (p, c)| acc.add(&p.scale(c)))
}

fn alpha_basis() -> Vec<MultiPoly> {
    let v = xy();
    let m = |ex: u32, ey: u32| MultiPoly::monomial(&v, vec![ex, ey], int(1));
    vec![m(2, 0).add(&m(0, 2)), m(1, 0), m(0, 1), m(0, 0)]
}

fn beta_basis() -> Vec<MultiPoly> {
    let v = xy();
    let m = |ex: u32, ey: u32| MultiPoly::monomial(&v, vec![ex, ey], int(1));
    vec![m(2, 0), m(1, 1), m(0, 2), m(1, 0), m(0, 1), m(0, 0)]
}

/// The α-interpolant: the element of `span{x²+y², x, y, 1}` with the same
/// edge means and element mean as `u`, by an exact 4×4 solve.
pub fn alpha_interpolant(tri: &Triangle, u: &MultiPoly) -> Result<MultiPoly> {
    let basis = alpha_basis();
    let rows = basis
        .iter()
        .map(|p| dofs_alpha(tri, p).map(|d| d.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let target = dofs_alpha(tri, u)?.to_vec();
    let system = transpose(&rows);
    let coeffs = solve_exact(&system, &target)?;
    Ok(combine(&basis, &coeffs))
}

/// The β-interpolant: the quadratic with the same vertex values and outward
/// normal-flux integrals as `u`, by an exact 6×6 solve.
pub fn beta_interpolant(tri: &Triangle, u: &MultiPoly) -> Result<MultiPoly> {
    let basis = beta_basis();
    let rows = basis
        .iter()
        .map(|p| dofs_beta(tri, p).map(|d| d.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let target = dofs_beta(tri, u)?.to_vec();
    let system = transpose(&rows);
    let coeffs = solve_exact(&system, &target)?;
    Ok(combine(&basis, &coeffs))
}

fn transpose(rows: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = rows.len();
    (0..n).map(|i| (0..n).map(|j| rows[j][i].clone()).collect()).collect()
}

/// `∫∫ u²`.
pub fn l2_norm2(u: &MultiPoly, tri: &Triangle) -> Result<Rational> {
    let u = on_xy(u)?;
    integrate_poly_over_triangle(&u.mul(&u), &rat_triangle(tri))
}

/// `∫∫ |∇u|²`.
pub fn h1_seminorm2(u: &MultiPoly, tri: &Triangle) -> Result<Rational> {
    let u = on_xy(u)?;
    let ux = u.diff("x", 1)?;
    let uy = u.diff("y", 1)?;
    integrate_poly_over_triangle(&ux.mul(&ux).add(&uy.mul(&uy)), &rat_triangle(tri))
}

/// `∫∫ u_xx² + 2u_xy² + u_yy²`.
pub fn h2_seminorm2(u: &MultiPoly, tri: &Triangle) -> Result<Rational> {
    let u = on_xy(u)?;
    let uxx = u.diff("x", 2)?;
    let uxy = u.diff("x", 1)?.diff("y", 1)?;
    let uyy = u.diff("y", 2)?;
    let e = uxx.mul(&uxx).add(&uxy.mul(&uxy).scale(&int(2))).add(&uyy.mul(&uyy));
    integrate_poly_over_triangle(&e, &rat_triangle(tri))
}

/// Random polynomial in `x, y` of total degree ≤ `degree`; every coefficient
/// is drawn (so the top degree is present with probability one).
pub fn random_polynomial(sampler: &mut PointSampler, degree: u32) -> MultiPoly {
    let v = xy();
    let mut terms = Vec::new();
    for d in 0..=degree {
        for ex in 0..=d {
            terms.push((vec![ex, d - ex], sampler.rational()));
        }
    }
    MultiPoly::from_terms(&v, terms)
}

/// Random non-degenerate triangle with rational vertices.
pub fn random_triangle(sampler: &mut PointSampler) -> Triangle {
    loop {
        let p = sampler.point(6);
        let t = Triangle::new(
            [p[0].clone(), p[1].clone()],
            [p[2].clone(), p[3].clone()],
            [p[4].clone(), p[5].clone()],
        );
        if !t.twice_signed_area().is_zero() {
            return t;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::rational::rat;

    fn unit() -> Triangle {
        Triangle::new([int(0), int(0)], [int(1), int(0)], [int(0), int(1)])
    }

    fn poly(terms: &[((u32, u32), Rational)]) -> MultiPoly {
        MultiPoly::from_terms(&xy(), terms.iter().map(|((a, b), c)| (vec![*a, *b], c.clone())))
    }

    /// Interpolants written out in closed form for p₁=(0,0), p₂=(h,0),
    /// p₃=(ah,bh); used only as an independent cross-check of the solves.
    fn alpha_closed(a: &Rational, b: &Rational, h: &Rational, d: &LocalDofsAlpha) -> MultiPoly {
        let v = xy();
        let x = MultiPoly::var(&v, "x").unwrap();
        let y = MultiPoly::var(&v, "y").unwrap();
        let k = |q: Rational| MultiPoly::constant(&v, q);
        let one = int(1);
        let [w1, w2, w3] = &d.w;
        let two_x_h = x.scale(&int(2)).sub(&k(h.clone()));
        let lin = two_x_h
            .scale(b)
            .add(&y.scale(&(int(2) * (&one - a))))
            .scale(w1)
            .sub(&two_x_h.scale(b).sub(&y.scale(&(int(2) * a))).scale(w2))
            .sub(&y.scale(&int(2)).sub(&k(b * h)).scale(w3))
            .scale(&(b * h).recip());
        let quad = x
            .mul(&x)
            .add(&y.mul(&y))
            .scale(&int(3))
            .sub(&x.scale(&(int(2) * (&one + a) * h)))
            .sub(&y.scale(&(int(2) * b * h)))
            .add(&k(a * h * h));
        let m = w1 + w2 + w3 - int(3) * &d.u0;
        let denom = (&one - a + a * a + b * b) * h * h;
        lin.add(&quad.scale(&(int(2) * m / denom)))
    }

    fn beta_closed(a: &Rational, b: &Rational, h: &Rational, d: &LocalDofsBeta) -> MultiPoly {
        let v = xy();
        let x = MultiPoly::var(&v, "x").unwrap();
        let y = MultiPoly::var(&v, "y").unwrap();
        let k = |q: Rational| MultiPoly::constant(&v, q);
        let one = int(1);
        let d1 = &one - a;
        let [u1, u2, u3] = &d.u;
        let [w1, w2, w3] = &d.w;
        let xh = x.sub(&k(h.clone()));
        let l1 = xh.scale(b).add(&y.scale(&d1));
        let lin = l1
            .neg()
            .scale(u1)
            .add(&x.scale(b).sub(&y.scale(a)).scale(u2))
            .add(&y.scale(u3))
            .scale(&(b * h).recip());
        let bb = b * b;
        let hh = h * h;
        let q1 = l1.mul(&x.scale(b).add(&y.scale(&d1))).scale(
            &((b * w1 + (&d1 * &d1 + &bb) * u1 + (a * &d1 - &bb) * u2 - &d1 * u3) / ((&d1 * &d1 + &bb) * &bb * &hh)),
        );
        let q2 = xh.scale(b).sub(&y.scale(a)).mul(&x.scale(b).sub(&y.scale(a))).scale(
            &((b * w2 + (a * &d1 - &bb) * u1 + (a * a + &bb) * u2 - a * u3) / ((a * a + &bb) * &bb * &hh)),
        );
        let q3 = y
            .sub(&k(b * h))
            .mul(&y)
            .scale(&((b * w3 - &d1 * u1 - a * u2 + u3) / (&hh * &bb)));
        lin.add(&q1).add(&q2).add(&q3)
    }

    #[test]
    fn trivial_form_values() {
        let g = ElementGeometry::from_triangle(&unit()).unwrap();
        let c = rat(3, 7);
        let consts = LocalDofsAlpha { w: [c.clone(), c.clone(), c.clone()], u0: c.clone() };
        assert_eq!(f_alpha(1, &g, &consts).unwrap(), int(0));
        let zero_a = LocalDofsAlpha { w: [int(0), int(0), int(0)], u0: int(0) };
        assert_eq!(f_alpha(0, &g, &zero_a).unwrap(), int(0));
        let zero_b = LocalDofsBeta { u: [int(0), int(0), int(0)], w: [int(0), int(0), int(0)] };
        for k in 0..3 {
            assert_eq!(f_beta(k, &g, &zero_b).unwrap(), int(0));
        }
        assert!(f_alpha(2, &g, &zero_a).is_err());
        assert!(f_beta(3, &g, &zero_b).is_err());
    }

    #[test]
    fn reference_element_x_squared_integral() {
        let t = unit();
        let g = ElementGeometry::from_triangle(&t).unwrap();
        let x = poly(&[((1, 0), int(1))]);
        let da = dofs_alpha(&t, &x).unwrap();
        assert_eq!(da.w, [rat(1, 2), int(0), rat(1, 2)]);
        assert_eq!(da.u0, rat(1, 3));
        assert_eq!(f_alpha(0, &g, &da).unwrap(), rat(1, 12));
        let db = dofs_beta(&t, &x).unwrap();
        assert_eq!(db.u, [int(0), int(1), int(0)]);
        assert_eq!(f_beta(0, &g, &db).unwrap(), rat(1, 12));
        assert_eq!(f_beta(2, &g, &db).unwrap(), int(0));
    }

    #[test]
    fn geometry_validation_and_scaling() {
        let shape = TriangleShape::new(rat(1, 3), rat(2, 5));
        let g = ElementGeometry::from_shape(&shape, rat(1, 5)).unwrap();
        let tri = shape.triangle();
        let gt = ElementGeometry::from_triangle(&tri).unwrap();
        assert_eq!(g.c, gt.c);
        assert!(ElementGeometry::new(int(1), [int(1), int(1), int(1)]).is_err());
        assert!(ElementGeometry::new(int(0), g.c.clone()).is_err());
        // Similarity: c_k fixed, s ↦ κ² s.
        let k2 = int(9);
        let big = ElementGeometry::new(&g.s * &k2, g.c.clone()).unwrap();
        assert_eq!(local_matrix(FormKind::Alpha0, &big), local_matrix(FormKind::Alpha0, &g).scale(&k2));
        assert_eq!(local_matrix(FormKind::Alpha1, &big), local_matrix(FormKind::Alpha1, &g));
        assert_eq!(local_matrix(FormKind::Beta0, &big), local_matrix(FormKind::Beta0, &g).scale(&k2));
        assert_eq!(local_matrix(FormKind::Beta1, &big), local_matrix(FormKind::Beta1, &g));
        assert_eq!(local_matrix(FormKind::Beta2, &big), local_matrix(FormKind::Beta2, &g).scale(&k2.recip()));
    }

    #[test]
    fn local_matrices_reproduce_forms() {
        let mut rng = PointSampler::new(7);
        let g = ElementGeometry::from_shape(&TriangleShape::new(rat(2, 7), rat(3, 11)), rat(5, 3)).unwrap();
        let a1 = local_matrix(FormKind::Alpha1, &g);
        assert_eq!(a1.quad_form(&[int(1), int(1), int(1), int(1)]).unwrap(), int(0));
        for form in [FormKind::Alpha0, FormKind::Alpha1, FormKind::Beta0, FormKind::Beta1, FormKind::Beta2] {
            let m = local_matrix(form, &g);
            for _ in 0..100 {
                let x = rng.point(form.dofs());
                assert_eq!(m.quad_form(&x).unwrap(), form.eval(&g.s, g.c_refs(), &x));
            }
        }
    }

    #[test]
    fn beta2_annihilates_linear_functions() {
        let shape = TriangleShape::new(rat(1, 4), rat(3, 5));
        let tri = shape.triangle();
        let g = ElementGeometry::from_triangle(&tri).unwrap();
        let m = local_matrix(FormKind::Beta2, &g);
        for p in [poly(&[((0, 0), int(1))]), poly(&[((1, 0), int(1))]), poly(&[((0, 1), int(1))])] {
            let d = dofs_beta(&tri, &p).unwrap().to_vec();
            assert!(m.mul_vec(&d).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn interpolants_are_projections() {
        let mut rng = PointSampler::new(11);
        let tri = random_triangle(&mut rng);
        let c = poly(&[((0, 0), rat(5, 2))]);
        assert_eq!(alpha_interpolant(&tri, &c).unwrap(), c);
        let qa = poly(&[((2, 0), rat(3, 2)), ((0, 2), rat(3, 2)), ((1, 0), int(-1)), ((0, 0), int(4))]);
        assert_eq!(alpha_interpolant(&tri, &qa).unwrap(), qa);
        let lin = poly(&[((1, 0), int(2)), ((0, 1), int(-3)), ((0, 0), int(1))]);
        assert_eq!(beta_interpolant(&tri, &lin).unwrap(), lin);
        let qb = random_polynomial(&mut rng, 2);
        assert_eq!(beta_interpolant(&tri, &qb).unwrap(), qb);
        let degen = Triangle::new([int(0), int(0)], [int(1), int(1)], [int(2), int(2)]);
        assert!(matches!(alpha_interpolant(&degen, &c), Err(Error::Degenerate(_))));
        assert!(matches!(beta_interpolant(&degen, &c), Err(Error::Degenerate(_))));
    }

    #[test]
    fn interpolants_match_closed_forms() {
        let mut rng = PointSampler::new(13);
        for _ in 0..5 {
            let (a, b, h) = (rng.rational(), rng.rational().abs() + rat(1, 7), rng.rational().abs() + rat(1, 3));
            let tri = Triangle::new([int(0), int(0)], [h.clone(), int(0)], [&a * &h, &b * &h]);
            for u in [poly(&[((2, 0), int(1))]), poly(&[((3, 0), int(1))]), random_polynomial(&mut rng, 4)] {
                let pa = alpha_interpolant(&tri, &u).unwrap();
                let da = dofs_alpha(&tri, &u).unwrap();
                assert_eq!(pa, alpha_closed(&a, &b, &h, &da));
                assert_eq!(dofs_alpha(&tri, &pa).unwrap(), da);
                let pb = beta_interpolant(&tri, &u).unwrap();
                let db = dofs_beta(&tri, &u).unwrap();
                assert_eq!(pb, beta_closed(&a, &b, &h, &db));
                assert_eq!(dofs_beta(&tri, &pb).unwrap(), db);
            }
        }
    }

    #[test]
    fn forms_equal_exact_integrals_of_interpolants() {
        let mut rng = PointSampler::new(17);
        for _ in 0..50 {
            let tri = random_triangle(&mut rng);
            let g = ElementGeometry::from_triangle(&tri).unwrap();
            let deg = 1 + (rng.gen_range_i64(0, 3) as u32);
            let u = random_polynomial(&mut rng, deg);
            let pa = alpha_interpolant(&tri, &u).unwrap();
            let da = dofs_alpha(&tri, &u).unwrap();
            assert_eq!(f_alpha(0, &g, &da).unwrap(), l2_norm2(&pa, &tri).unwrap());
            assert_eq!(f_alpha(1, &g, &da).unwrap(), h1_seminorm2(&pa, &tri).unwrap());
            let pb = beta_interpolant(&tri, &u).unwrap();
            let db = dofs_beta(&tri, &u).unwrap();
            assert_eq!(f_beta(0, &g, &db).unwrap(), l2_norm2(&pb, &tri).unwrap());
            assert_eq!(f_beta(1, &g, &db).unwrap(), h1_seminorm2(&pb, &tri).unwrap());
            assert_eq!(f_beta(2, &g, &db).unwrap(), h2_seminorm2(&pb, &tri).unwrap());
        }
    }
}
