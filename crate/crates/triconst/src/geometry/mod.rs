//! Triangles, the closed-form bounds K_j / L_j, their b → 0 limits,
//! continuation factors and the circumradius.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::rational::{format_rational, from_f64_exact, int, rat, to_f64, Rational};
use crate::symbolic::{Field, Frac, Vars};

/// A planar triangle with exact rational vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangle {
    pub p: [[Rational; 2]; 3],
    /// True when the vertices came from floating inputs (converted exactly).
    pub from_float: bool,
}

impl Triangle {
    pub fn new(p1: [Rational; 2], p2: [Rational; 2], p3: [Rational; 2]) -> Self {
        Triangle {
            p: [p1, p2, p3],
            from_float: false,
        }
    }

    /// Vertices from floats; each coordinate is converted to the exactly equal rational.
    pub fn from_f64(p: [[f64; 2]; 3]) -> Result<Self> {
        let c = |x: f64| from_f64_exact(x);
        Ok(Triangle {
            p: [
                [c(p[0][0])?, c(p[0][1])?],
                [c(p[1][0])?, c(p[1][1])?],
                [c(p[2][0])?, c(p[2][1])?],
            ],
            from_float: true,
        })
    }

    /// The reference triangle T_{a,b} with vertices (0,0), (1,0), (a,b).
    pub fn t_ab(a: &Rational, b: &Rational) -> Self {
        Triangle::new([int(0), int(0)], [int(1), int(0)], [a.clone(), b.clone()])
    }

    /// Twice the signed area.
    pub fn twice_signed_area(&self) -> Rational {
        let [p1, p2, p3] = &self.p;
        (&p2[0] - &p1[0]) * (&p3[1] - &p1[1]) - (&p3[0] - &p1[0]) * (&p2[1] - &p1[1])
    }

    fn dist2(&self, i: usize, j: usize) -> Rational {
        let dx = &self.p[i][0] - &self.p[j][0];
        let dy = &self.p[i][1] - &self.p[j][1];
        &dx * &dx + &dy * &dy
    }

    /// Squared edge lengths and squared area: (A², B², C², S²) with
    /// A = |p2p3|, B = |p3p1|, C = |p1p2|.
    pub fn squared_edge_data(&self) -> Result<EdgeData> {
        let two_s = self.twice_signed_area();
        if two_s.is_zero() {
            return Err(Error::Degenerate("zero area".into()));
        }
        Ok(EdgeData {
            a2: self.dist2(1, 2),
            b2: self.dist2(2, 0),
            c2: self.dist2(0, 1),
            s2: &two_s * &two_s / int(4),
        })
    }
}

/// Exact squared edge lengths and squared area.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeData {
    pub a2: Rational,
    pub b2: Rational,
    pub c2: Rational,
    pub s2: Rational,
}

/// `(A, B, C, S)` in floating point.
pub fn edge_data(tri: &Triangle) -> Result<(f64, f64, f64, f64)> {
    let e = tri.squared_edge_data()?;
    Ok((
        to_f64(&e.a2).sqrt(),
        to_f64(&e.b2).sqrt(),
        to_f64(&e.c2).sqrt(),
        to_f64(&e.s2).sqrt(),
    ))
}

/// Shape parameters of T_{a,b}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleShape {
    #[serde(with = "crate::symbolic::rational::serde_rational")]
    pub a: Rational,
    #[serde(with = "crate::symbolic::rational::serde_rational")]
    pub b: Rational,
}

impl TriangleShape {
    pub fn new(a: Rational, b: Rational) -> Self {
        TriangleShape { a, b }
    }

    /// Checks the canonical region 0 ≤ a ≤ 1/2, 0 < b ≤ 1.
    pub fn in_canonical_region(&self) -> bool {
        !self.a.is_negative() && self.a <= rat(1, 2) && self.b.is_positive() && self.b <= int(1)
    }

    pub fn triangle(&self) -> Triangle {
        Triangle::t_ab(&self.a, &self.b)
    }
}

impl std::fmt::Display for TriangleShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "T[{}, {}]", format_rational(&self.a), format_rational(&self.b))
    }
}

/// The radicand of K_j from squared edges `aa, bb, cc` and squared area `ss`.
pub fn l_from_edges<T: Field>(j: usize, aa: &T, bb: &T, cc: &T, ss: &T) -> T {
    let sum = aa.add(bb).add(cc);
    let prod = aa.mul(bb).mul(cc);
    match j {
        1 => sum.div_int(28).sub(&ss.sq().div(&prod)),
        2 => sum.div_int(54).sub(&ss.sq().div_int(2).div(&prod)),
        3 => aa
            .mul(bb)
            .add(&bb.mul(cc))
            .add(&cc.mul(aa))
            .div_int(83)
            .sub(&prod.div(&sum).add(ss).div_int(24)),
        4 => prod
            .div_int(16)
            .div(ss)
            .sub(&sum.div_int(30))
            .sub(&ss.div_int(5).mul(&T::one().div(aa).add(&T::one().div(bb)).add(&T::one().div(cc)))),
        _ => panic!("constant index {j} out of range 1..4"),
    }
}

/// L_j(a, b) = K_j(T_{a,b})² over any field.
pub fn l_ab<T: Field>(j: usize, a: &T, b: &T) -> T {
    let one = T::one();
    let aa = one.sub(a).sq().add(&b.sq());
    let bb = a.sq().add(&b.sq());
    let ss = b.sq().div_int(4);
    l_from_edges(j, &aa, &bb, &one, &ss)
}

fn check_j(j: usize, max: usize) -> Result<()> {
    if (1..=max).contains(&j) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("constant index {j} not in 1..{max}")))
    }
}

/// Exact value of K_j(T)² for a rational triangle.
pub fn k_squared(j: usize, tri: &Triangle) -> Result<Rational> {
    check_j(j, 4)?;
    let e = tri.squared_edge_data()?;
    let v = l_from_edges(j, &e.a2, &e.b2, &e.c2, &e.s2);
    if v.is_negative() {
        return Err(Error::Internal(format!("negative radicand for K{j}")));
    }
    Ok(v)
}

/// K_j(T): one square root of the exact radicand.
pub fn k_constant(j: usize, tri: &Triangle) -> Result<f64> {
    Ok(to_f64(&k_squared(j, tri)?).sqrt())
}

/// L_j(a, b) exactly.
pub fn l_constant(j: usize, shape: &TriangleShape) -> Result<Rational> {
    check_j(j, 4)?;
    if !shape.b.is_positive() {
        return Err(Error::InvalidArgument("b must be positive".into()));
    }
    Ok(l_ab(j, &shape.a, &shape.b))
}

/// lim_{b↓0} L_j(a, b) for j = 1, 2, 3.
pub fn l_limit(j: usize, a: &Rational) -> Result<Rational> {
    if j == 4 {
        return Err(Error::InvalidArgument("L4 has no finite limit as b -> 0".into()));
    }
    check_j(j, 3)?;
    if a.is_negative() || a > &int(1) {
        return Err(Error::InvalidArgument("a must lie in [0, 1]".into()));
    }
    let d1 = int(1) - a;
    let aa = &d1 * &d1;
    let bb = a * a;
    let sum = &aa + &bb + int(1);
    // The S² terms vanish; for j = 3 the product term A²B²C²/(A²+B²+C²) stays.
    Ok(match j {
        1 => sum / int(28),
        2 => sum / int(54),
        _ => (&aa * &bb + &bb + &aa) / int(83) - &aa * &bb / &sum / int(24),
    })
}

/// R(T) = ABC / (4S).
pub fn circumradius(tri: &Triangle) -> Result<f64> {
    let e = tri.squared_edge_data()?;
    let r2 = &e.a2 * &e.b2 * &e.c2 / (int(16) * &e.s2);
    Ok(to_f64(&r2).sqrt())
}

/// Direction of a continuation step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    A,
    B,
}

/// Derivative-bound constants (α_{j1}, α_{j2}, β_{j1}, β_{j2}).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContinuationConstants {
    pub alpha1: i64,
    pub alpha2: i64,
    pub beta1: i64,
    pub beta2: i64,
}

impl ContinuationConstants {
    pub fn for_index(j: usize) -> Result<Self> {
        check_j(j, 4)?;
        let (alpha1, alpha2, beta1, beta2) = match j {
            1 | 2 => (2, 5, 2, 4),
            3 => (2, 4, 3, 8),
            _ => (3, 9, 3, 9),
        };
        Ok(ContinuationConstants {
            alpha1,
            alpha2,
            beta1,
            beta2,
        })
    }
}

/// The factor 1 + c_j h² by which the ratio C_j²/L_j may grow between grid
/// neighbours at spacing h.
pub fn continuation_factor(j: usize, axis: Axis, h: &Rational) -> Result<Rational> {
    check_j(j, 4)?;
    if !h.is_positive() || h > &rat(1, 50) {
        return Err(Error::InvalidArgument(format!(
            "step {} outside (0, 1/50]",
            format_rational(h)
        )));
    }
    let c = match axis {
        Axis::A => [5, 5, 6, 9][j - 1],
        Axis::B => [3, 3, 8, 9][j - 1],
    };
    Ok(int(1) + int(c) * h * h)
}

/// How a triangle maps onto its canonical T_{a,b}.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalization {
    pub shape: TriangleShape,
    /// Vertex relabelling: new vertex k is old vertex `perm[k]`.
    pub perm: [usize; 3],
    /// Squared similarity ratio |p1p2|² (the longest edge).
    pub scale2: Rational,
    /// Whether a reflection was needed.
    pub reflected: bool,
}

impl Normalization {
    pub fn scale(&self) -> f64 {
        to_f64(&self.scale2).sqrt()
    }
}

/// Relabels the vertices so that |p1p2| ≥ |p2p3| ≥ |p3p1| and maps p1 → (0,0),
/// p2 → (1,0); p3 lands at (a, b) with 0 ≤ a ≤ 1/2, 0 < b ≤ 1.
///
/// A triangle that already is some T_{a,b} in the canonical region is
/// returned as is, even when its longest edge is not p1p2 (as for T_{0,1}).
///
/// Ties are broken by taking the first admissible permutation in
/// lexicographic order.
pub fn normalize_shape(tri: &Triangle) -> Result<Normalization> {
    if tri.twice_signed_area().is_zero() {
        return Err(Error::Degenerate("zero area".into()));
    }
    let [p1, p2, p3] = &tri.p;
    if p1[0].is_zero() && p1[1].is_zero() && p2[0].is_one() && p2[1].is_zero() {
        let shape = TriangleShape::new(p3[0].clone(), p3[1].clone());
        if shape.in_canonical_region() {
            return Ok(Normalization {
                shape,
                perm: [0, 1, 2],
                scale2: int(1),
                reflected: false,
            });
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for perm in PERMS {
        let [i, j, k] = perm;
        let (l12, l23, l31) = (tri.dist2(i, j), tri.dist2(j, k), tri.dist2(k, i));
        if l12 >= l23 && l23 >= l31 {
            let p = |v: usize| &tri.p[v];
            let (ex, ey) = (&p(j)[0] - &p(i)[0], &p(j)[1] - &p(i)[1]);
            let (fx, fy) = (&p(k)[0] - &p(i)[0], &p(k)[1] - &p(i)[1]);
            let a = (&ex * &fx + &ey * &fy) / &l12;
            let cross = (&ex * &fy - &ey * &fx) / &l12;
            let reflected = cross.is_negative();
            return Ok(Normalization {
                shape: TriangleShape::new(a, cross.abs()),
                perm,
                scale2: l12,
                reflected,
            });
        }
    }
    Err(Error::Internal("no edge ordering found".into()))
}

/// Margins of the four derivative bounds at one shape; every entry must be
/// positive.
#[derive(Clone, Debug)]
pub struct DerivativeBoundPoint {
    pub shape: TriangleShape,
    /// α1 L/b − |∂L/∂a|, α2 L/b² − max ∂²L/∂a²(ã), β1 L/b − |∂L/∂b|,
    /// β2 L/b² − max ∂²L/∂b²(b̃).
    pub margins: [Rational; 4],
}

impl DerivativeBoundPoint {
    pub fn holds(&self) -> bool {
        self.margins.iter().all(|m| m.is_positive())
    }
}

#[derive(Clone, Debug)]
pub struct DerivativeBoundReport {
    pub j: usize,
    pub points: Vec<DerivativeBoundPoint>,
}

impl DerivativeBoundReport {
    pub fn all_hold(&self) -> bool {
        self.points.iter().all(DerivativeBoundPoint::holds)
    }

    pub fn min_margin(&self) -> Option<Rational> {
        self.points.iter().flat_map(|p| p.margins.iter().cloned()).min()
    }
}

/// Symbolic partial derivatives of L_j in (a, b), built once.
pub struct LDerivatives {
    vars: Vars,
    pub l: Frac,
    pub la: Frac,
    pub laa: Frac,
    pub lb: Frac,
    pub lbb: Frac,
}

impl LDerivatives {
    pub fn new(j: usize) -> Result<Self> {
        check_j(j, 4)?;
        let vars = Vars::new(&["a", "b"]);
        let a = Frac::var(&vars, "a")?;
        let b = Frac::var(&vars, "b")?;
        let l = l_ab(j, &a, &b);
        let la = l.diff("a")?;
        let laa = la.diff("a")?;
        let lb = l.diff("b")?;
        let lbb = lb.diff("b")?;
        Ok(LDerivatives {
            vars,
            l,
            la,
            laa,
            lb,
            lbb,
        })
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }
}

/// Checks the derivative bounds exactly at each shape. The second-derivative
/// bounds are sampled at the perturbed points ã ∈ {a − b/50, a, a + b/50}
/// and b̃ ∈ {49b/50, b, 51b/50}.
pub fn derivative_bound_check(j: usize, shapes: &[TriangleShape]) -> Result<DerivativeBoundReport> {
    let d = LDerivatives::new(j)?;
    let k = ContinuationConstants::for_index(j)?;
    let mut points = Vec::with_capacity(shapes.len());
    for s in shapes {
        if !s.in_canonical_region() {
            return Err(Error::InvalidArgument(format!("{s} outside the canonical region")));
        }
        let (a, b) = (&s.a, &s.b);
        let at = |x: &Rational, y: &Rational, f: &Frac| f.eval(&[x.clone(), y.clone()]);
        let l = at(a, b, &d.l)?;
        let b2 = b * b;
        let la = at(a, b, &d.la)?.abs();
        let lb = at(a, b, &d.lb)?.abs();
        let step = b / int(50);
        let mut laa = at(a, b, &d.laa)?;
        for x in [a - &step, a + &step] {
            laa = laa.max(at(&x, b, &d.laa)?);
        }
        let mut lbb = at(a, b, &d.lbb)?;
        for y in [b * rat(49, 50), b * rat(51, 50)] {
            lbb = lbb.max(at(a, &y, &d.lbb)?);
        }
        points.push(DerivativeBoundPoint {
            shape: s.clone(),
            margins: [
                int(k.alpha1) * &l / b - la,
                int(k.alpha2) * &l / &b2 - laa,
                int(k.beta1) * &l / b - lb,
                int(k.beta2) * &l / &b2 - lbb,
            ],
        });
    }
    Ok(DerivativeBoundReport { j, points })
}

/// An n×n grid over the canonical region: a = i/(2(n−1)), b = k/n.
pub fn canonical_grid(n: usize) -> Vec<TriangleShape> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 1..=n {
            let a = rat(i as i64, 2 * (n as i64 - 1).max(1));
            let b = rat(k as i64, n as i64);
            out.push(TriangleShape::new(a, b));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt3_half() -> Rational {
        from_f64_exact(3f64.sqrt() / 2.0).unwrap()
    }

    #[test]
    fn edge_data_examples() {
        let (a, b, c, s) = edge_data(&Triangle::t_ab(&int(0), &int(1))).unwrap();
        assert!((a - 2f64.sqrt()).abs() < 1e-15 && b == 1.0 && c == 1.0 && s == 0.5);
        let (a, b, c, s) = edge_data(&Triangle::t_ab(&rat(1, 2), &sqrt3_half())).unwrap();
        for e in [a, b, c] {
            assert!((e - 1.0).abs() < 1e-15);
        }
        assert!((s - 3f64.sqrt() / 4.0).abs() < 1e-15);
        let big = Triangle::new([int(0), int(0)], [int(2), int(0)], [int(0), int(2)]);
        let (a, _, _, s) = edge_data(&big).unwrap();
        assert!((a - 2.0 * 2f64.sqrt()).abs() < 1e-15 && s == 2.0);
        let flat = Triangle::new([int(0), int(0)], [int(1), int(1)], [int(2), int(2)]);
        assert!(matches!(edge_data(&flat), Err(Error::Degenerate(_))));
    }

    #[test]
    fn k_constant_examples() {
        let t01 = Triangle::t_ab(&int(0), &int(1));
        assert!((k_constant(1, &t01).unwrap() - 0.3340766).abs() < 1e-7);
        assert!((k_constant(4, &t01).unwrap() - 0.4915960).abs() < 1e-7);
        let eq = Triangle::t_ab(&rat(1, 2), &sqrt3_half());
        assert!((k_constant(1, &eq).unwrap() - 0.2683032).abs() < 1e-7);
        assert!(k_constant(5, &t01).is_err());
    }

    #[test]
    fn l_constant_examples() {
        let s = TriangleShape::new(int(0), int(1));
        assert_eq!(l_constant(1, &s).unwrap(), rat(25, 224));
        assert_eq!(l_constant(4, &s).unwrap(), rat(29, 120));
        assert_eq!(l_constant(2, &s).unwrap(), l_constant(2, &s).unwrap());
        assert!(l_constant(1, &TriangleShape::new(int(0), int(0))).is_err());
    }

    #[test]
    fn l_limit_examples() {
        assert_eq!(l_limit(1, &int(0)).unwrap(), rat(1, 14));
        // L3(0, y) for tiny y approaches the limit.
        let lim = l_limit(3, &int(0)).unwrap();
        let near = l_ab(3, &int(0), &rat(1, 1_000_000));
        assert!((to_f64(&near) - to_f64(&lim)).abs() < 1e-9);
        assert!(l_limit(1, &rat(1, 4)).unwrap() < l_ab(1, &rat(1, 4), &rat(1, 10)));
        assert!(l_limit(4, &int(0)).is_err());
    }

    #[test]
    fn circumradius_examples() {
        let r = circumradius(&Triangle::t_ab(&int(0), &int(1))).unwrap();
        assert!((r - 2f64.sqrt() / 2.0).abs() < 1e-15);
        let r = circumradius(&Triangle::t_ab(&rat(1, 2), &sqrt3_half())).unwrap();
        assert!((r - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let t = Triangle::t_ab(&rat(1, 2), &rat(1, 10));
        let k4 = k_constant(4, &t).unwrap();
        assert!((k4 - 1.2786662).abs() < 1e-7);
        assert!(k4 < circumradius(&t).unwrap());
    }

    #[test]
    fn continuation_factor_examples() {
        assert_eq!(continuation_factor(1, Axis::A, &rat(1, 50)).unwrap(), rat(501, 500));
        assert_eq!(continuation_factor(3, Axis::B, &rat(1, 50)).unwrap(), int(1) + rat(8, 2500));
        assert_eq!(continuation_factor(4, Axis::A, &rat(1, 100)).unwrap(), int(1) + rat(9, 10000));
        assert!(continuation_factor(1, Axis::A, &rat(1, 49)).is_err());
        assert!(continuation_factor(1, Axis::A, &int(0)).is_err());
        assert_eq!(
            ContinuationConstants::for_index(3).unwrap(),
            ContinuationConstants { alpha1: 2, alpha2: 4, beta1: 3, beta2: 8 }
        );
    }

    #[test]
    fn normalize_examples() {
        let n = normalize_shape(&Triangle::t_ab(&int(0), &int(1))).unwrap();
        assert_eq!(n.shape, TriangleShape::new(int(0), int(1)));
        let t = Triangle::new([int(0), int(0)], [int(2), int(0)], [int(1), int(1)]);
        let n = normalize_shape(&t).unwrap();
        assert_eq!(n.shape, TriangleShape::new(rat(1, 2), rat(1, 2)));
        assert_eq!(n.scale2, int(4));
        let eq = Triangle::from_f64([[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]).unwrap();
        let n = normalize_shape(&eq).unwrap();
        assert!((to_f64(&n.shape.a) - 0.5).abs() < 1e-15);
        assert!((to_f64(&n.shape.b) - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(n.shape.in_canonical_region());
    }

    #[test]
    fn derivative_bound_examples() {
        let cases = [
            (1, rat(1, 4), rat(1, 2)),
            (4, int(0), rat(1, 10)),
            (3, rat(1, 2), int(1)),
        ];
        for (j, a, b) in cases {
            let r = derivative_bound_check(j, &[TriangleShape::new(a, b)]).unwrap();
            assert!(r.all_hold(), "j={j}: {:?}", r.points[0].margins);
        }
    }
}
