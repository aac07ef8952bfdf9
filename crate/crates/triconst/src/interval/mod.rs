//! Outward-rounded interval arithmetic and verified positive-definiteness
//! tests (midpoint-shifted and interval Cholesky factorizations).
//!
//! Every operation is evaluated in round-to-nearest and then widened by one
//! ulp on each side with `next_down` / `next_up`. Round-to-nearest is off by
//! at most half an ulp (also in the subnormal range), so the widened bounds
//! enclose the exact result. No global floating-point state is touched, so
//! everything here is safe under arbitrary parallelism.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymRatMatrix;
use crate::mesh::AssembledPencil;
use crate::symbolic::rational::{to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
}

#[inline]
fn down(x: f64) -> f64 {
    x.next_down()
}

#[inline]
fn up(x: f64) -> f64 {
    x.next_up()
}

impl Interval {
    /// `[lo, hi]`; fails on NaN or `lo > hi`.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidArgument(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN point interval");
        Interval { lo: x, hi: x }
    }

    /// `[m − r, m + r]` rounded outward.
    pub fn with_radius(m: f64, r: f64) -> Self {
        let r = r.abs();
        Interval {
            lo: down(m - r),
            hi: up(m + r),
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Exact membership test for a rational.
    pub fn contains_rational(&self, q: &Rational) -> bool {
        let ge_lo = self.lo == f64::NEG_INFINITY || cmp_f64(self.lo, q) != Ordering::Greater;
        let le_hi = self.hi == f64::INFINITY || cmp_f64(self.hi, q) != Ordering::Less;
        ge_lo && le_hi
    }

    pub fn add(self, o: Interval) -> Interval {
        Interval {
            lo: down(self.lo + o.lo),
            hi: up(self.hi + o.hi),
        }
    }

    pub fn sub(self, o: Interval) -> Interval {
        Interval {
            lo: down(self.lo - o.hi),
            hi: up(self.hi - o.lo),
        }
    }

    pub fn mul(self, o: Interval) -> Interval {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        if p.iter().any(|x| x.is_nan()) {
            // 0·∞: fall back to the whole line.
            return Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            };
        }
        Interval {
            lo: down(p[0].min(p[1]).min(p[2]).min(p[3])),
            hi: up(p[0].max(p[1]).max(p[2]).max(p[3])),
        }
    }

    /// Fails when `0 ∈ o`.
    pub fn div(self, o: Interval) -> Result<Interval> {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return Err(Error::DivisionByZero(format!("divisor [{}, {}] contains zero", o.lo, o.hi)));
        }
        let q = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        if q.iter().any(|x| x.is_nan()) {
            return Ok(Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            });
        }
        Ok(Interval {
            lo: down(q[0].min(q[1]).min(q[2]).min(q[3])),
            hi: up(q[0].max(q[1]).max(q[2]).max(q[3])),
        })
    }

    /// Fails when the interval reaches below zero.
    pub fn sqrt(self) -> Result<Interval> {
        if self.lo < 0.0 {
            return Err(Error::InvalidArgument(format!("sqrt of [{}, {}]", self.lo, self.hi)));
        }
        Ok(Interval {
            lo: down(self.lo.sqrt()).max(0.0),
            hi: up(self.hi.sqrt()),
        })
    }
}

/// Dispatches one binary operation; `y` is ignored for `Sqrt`.
pub fn interval_op(x: Interval, y: Interval, kind: OpKind) -> Result<Interval> {
    match kind {
        OpKind::Add => Ok(x.add(y)),
        OpKind::Sub => Ok(x.sub(y)),
        OpKind::Mul => Ok(x.mul(y)),
        OpKind::Div => x.div(y),
        OpKind::Sqrt => x.sqrt(),
    }
}

/// Exact comparison of a finite double with a rational.
fn cmp_f64(x: f64, q: &Rational) -> Ordering {
    let r = Rational::from_float(x).expect("finite double");
    r.cmp(q)
}

/// Tightest enclosure of `q` by doubles: a point when `q` is representable,
/// otherwise two adjacent doubles. Magnitudes beyond the double range give
/// an infinite bound (check [`Interval::is_finite`]).
pub fn rational_to_interval(q: &Rational) -> Interval {
    if q.is_zero() {
        return Interval::point(0.0);
    }
    let f = to_f64(q);
    if f.is_infinite() {
        let big = if f > 0.0 { f64::MAX } else { f64::MIN };
        return match cmp_f64(big, q) {
            Ordering::Less => Interval { lo: f64::MAX, hi: f64::INFINITY },
            Ordering::Greater => Interval { lo: f64::NEG_INFINITY, hi: f64::MIN },
            Ordering::Equal => Interval::point(big),
        };
    }
    let (mut lo, mut hi) = (f, f);
    match cmp_f64(f, q) {
        Ordering::Equal => return Interval::point(f),
        Ordering::Less => hi = up(f),
        Ordering::Greater => lo = down(f),
    }
    // Guard against a conversion that is off by more than one ulp.
    while lo.is_finite() && cmp_f64(lo, q) == Ordering::Greater {
        lo = down(lo);
    }
    while hi.is_finite() && cmp_f64(hi, q) == Ordering::Less {
        hi = up(hi);
    }
    Interval { lo, hi }
}

/// Symmetric interval matrix (upper triangle stored row by row).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSymMatrix {
    n: usize,
    upper: Vec<Interval>,
}

impl IntervalSymMatrix {
    fn offset(n: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * n - i * (i + 1) / 2 + j
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Interval) -> Self {
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(f(i, j));
            }
        }
        IntervalSymMatrix { n, upper }
    }

    /// Point intervals of the exact rational entries, rounded outward.
    pub fn from_rational(m: &SymRatMatrix) -> Self {
        Self::from_fn(m.dim(), |i, j| rational_to_interval(m.entry(i, j)))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.upper[Self::offset(self.n, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Interval) {
        let k = Self::offset(self.n, i, j);
        self.upper[k] = v;
    }

    /// Adds the point shift `δ` to the diagonal.
    pub fn shift_diagonal(&self, delta: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            let v = m.get(i, i).add(Interval::point(delta));
            m.set(i, i, v);
        }
        m
    }
}

/// `true` only if every symmetric member matrix is positive definite.
///
/// Tries [`shifted_midpoint_spd`] first and falls back to
/// [`interval_cholesky_spd`]; either success is a proof.
pub fn verified_spd(m: &IntervalSymMatrix) -> bool {
    if m.n == 0 || m.upper.iter().any(|v| !v.is_finite()) {
        return false;
    }
    shifted_midpoint_spd(m) || interval_cholesky_spd(m)
}

/// First column with a non-zero member in each row (the row profile).
fn row_profile(m: &IntervalSymMatrix) -> Vec<usize> {
    (0..m.n)
        .map(|i| {
            (0..=i)
                .find(|&j| {
                    let v = m.get(i, j);
                    v.lo != 0.0 || v.hi != 0.0
                })
                .unwrap_or(i)
        })
        .collect()
}

/// Midpoint-shift certificate. With `M` the midpoint matrix, `r ≥ ‖A − M‖₂`
/// for every member `A`, and `γ = (n+1)u/(1−(n+1)u)`, a floating-point
/// Cholesky factorization of `M − cI` that runs to completion has backward
/// error `‖Δ‖₂ ≤ γ/(1−γ)·Σ ãᵢᵢ`. Choosing `c` strictly above that bound plus
/// `r` (plus an underflow allowance) makes every member positive definite.
pub fn shifted_midpoint_spd(m: &IntervalSymMatrix) -> bool {
    let n = m.n;
    if n == 0 || m.upper.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let u = f64::EPSILON / 2.0;
    let eta = f64::from_bits(1);
    let nf = n as f64;
    if (nf + 1.0) * u >= 0.01 {
        return false;
    }
    let mut mid = vec![0.0f64; n * n];
    let mut row_rad = vec![0.0f64; n];
    for i in 0..n {
        for j in i..n {
            let v = m.get(i, j);
            let c = v.lo + (v.hi - v.lo) / 2.0;
            let r = up((v.hi - c).max(c - v.lo));
            mid[i * n + j] = c;
            mid[j * n + i] = c;
            row_rad[i] = up(row_rad[i] + r);
            if i != j {
                row_rad[j] = up(row_rad[j] + r);
            }
        }
    }
    // A symmetric non-negative R has ‖R‖₂ ≤ ‖R‖∞.
    let radius = row_rad.iter().cloned().fold(0.0, f64::max);
    let mut trace = 0.0f64;
    let mut max_diag = 0.0f64;
    for i in 0..n {
        let d = mid[i * n + i];
        if !(d > 0.0) {
            return false;
        }
        trace = up(trace + d);
        max_diag = max_diag.max(d);
    }
    let gamma = up(up((nf + 1.0) * u) / down(1.0 - up((nf + 1.0) * u)));
    let alpha = up(gamma / down(1.0 - gamma));
    let underflow = up(up(4.0 * nf) * up(up(2.0 * (nf + 1.0)) + max_diag)) * eta;
    let c = up(up(up(alpha * trace) + radius) + up(underflow));
    for i in 0..n {
        let d = down(mid[i * n + i] - c);
        if !(d > 0.0) {
            return false;
        }
        mid[i * n + i] = d;
    }
    let first = row_profile(m);
    // Plain floating-point Cholesky in place (lower triangle, row by row).
    for i in 0..n {
        for j in first[i]..=i {
            let start = first[i].max(first[j]);
            let mut s = mid[i * n + j];
            for k in start..j {
                s -= mid[i * n + k] * mid[j * n + k];
            }
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return false;
                }
                mid[i * n + i] = s.sqrt();
            } else {
                let q = s / mid[j * n + j];
                if !q.is_finite() {
                    return false;
                }
                mid[i * n + j] = q;
            }
        }
    }
    true
}

/// Interval Cholesky certificate: each pivot `A_jj − Σ L_jk²` must have a strictly
/// positive lower bound. If every member had a non-positive eigenvalue, the
/// member's real Cholesky factorization would hit a non-positive pivot that
/// lies inside the computed interval pivot, so success is a proof. Entries
/// left of the first non-zero of a row stay exactly zero and are skipped.
/// Sound for any order, but widths can grow quickly on dense trailing rows.
pub fn interval_cholesky_spd(m: &IntervalSymMatrix) -> bool {
    let n = m.n;
    if n == 0 || m.upper.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let first = row_profile(m);
    let mut llo = vec![0.0f64; n * n];
    let mut lhi = vec![0.0f64; n * n];
    for i in 0..n {
        for j in first[i]..=i {
            let a = m.get(i, j);
            let (mut slo, mut shi) = (a.lo, a.hi);
            let start = first[i].max(first[j]);
            let (ri, rj) = (i * n, j * n);
            for k in start..j {
                let (xl, xh) = (llo[ri + k], lhi[ri + k]);
                let (yl, yh) = (llo[rj + k], lhi[rj + k]);
                let p1 = xl * yl;
                let p2 = xl * yh;
                let p3 = xh * yl;
                let p4 = xh * yh;
                let plo = down(p1.min(p2).min(p3.min(p4)));
                let phi = up(p1.max(p2).max(p3.max(p4)));
                slo = down(slo - phi);
                shi = up(shi - plo);
            }
            if i == j {
                if !(slo > 0.0) || !shi.is_finite() {
                    return false;
                }
                llo[ri + i] = down(slo.sqrt());
                lhi[ri + i] = up(shi.sqrt());
                if !(llo[ri + i] > 0.0) {
                    return false;
                }
            } else {
                let (dl, dh) = (llo[rj + j], lhi[rj + j]);
                let q1 = slo / dl;
                let q2 = slo / dh;
                let q3 = shi / dl;
                let q4 = shi / dh;
                let lo = down(q1.min(q2).min(q3.min(q4)));
                let hi = up(q1.max(q2).max(q3.max(q4)));
                if !lo.is_finite() || !hi.is_finite() {
                    return false;
                }
                llo[ri + j] = lo;
                lhi[ri + j] = hi;
            }
        }
    }
    true
}

/// Exact rational matrix → point intervals → [`verified_spd`].
pub fn certify_spd(m: &SymRatMatrix) -> bool {
    verified_spd(&IntervalSymMatrix::from_rational(m))
}

/// `true` ⟹ `sup xᵀAx / xᵀBx < λ`: `λB − A` is formed exactly and certified
/// positive definite.
pub fn certify_eigen_bound(pencil: &AssembledPencil, lambda: &Rational) -> bool {
    certify_spd(&pencil.b.scale(lambda).sub(&pencil.a))
}

/// Exact `λ_min` lower witness used by tests: `true` if the rational matrix is
/// positive definite, decided by exact Cholesky (`LDLᵀ`) pivots.
pub fn exact_is_spd(m: &SymRatMatrix) -> bool {
    let n = m.dim();
    let mut a: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
    for k in 0..n {
        if !a[k][k].is_positive() {
            return false;
        }
        let piv = a[k][k].clone();
        let row: Vec<Rational> = a[k].clone();
        for i in k + 1..n {
            if row[i].is_zero() {
                continue;
            }
            let f = &row[i] / &piv;
            for j in k + 1..n {
                if !row[j].is_zero() {
                    let t = &f * &row[j];
                    a[i][j] -= t;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::max_gen_eig;
    use crate::geometry::TriangleShape;
    use crate::mesh::{assemble, Space};
    use crate::symbolic::rational::{from_f64_exact, int, rat};
    use crate::symbolic::sz::PointSampler;

    fn pm(rows: &[&[f64]]) -> IntervalSymMatrix {
        IntervalSymMatrix::from_fn(rows.len(), |i, j| Interval::point(rows[i][j]))
    }

    #[test]
    fn basic_operations() {
        let s = Interval::point(1.0).add(Interval::point(2.0));
        assert!(s.contains(3.0) && s.hi() - s.lo() <= 2.0 * f64::EPSILON * 4.0);
        let u = Interval::new(-1.0, 1.0).unwrap();
        let p = u.mul(u);
        assert!(p.lo() <= -1.0 && p.hi() >= 1.0);
        let third = Interval::point(1.0).div(Interval::point(3.0)).unwrap();
        assert!(third.contains_rational(&rat(1, 3)) && third.lo() < third.hi());
        assert!(Interval::point(1.0).div(u).is_err());
        assert!(u.sqrt().is_err());
        assert!(Interval::point(2.0).sqrt().unwrap().contains(std::f64::consts::SQRT_2));
        assert!(Interval::new(2.0, 1.0).is_err());
    }

    #[test]
    fn enclosure_soundness_on_random_rationals() {
        let mut s = PointSampler::new(42);
        for _ in 0..2000 {
            let (p, q) = (s.rational(), s.rational());
            let (x, y) = (rational_to_interval(&p), rational_to_interval(&q));
            assert!(x.contains_rational(&p));
            assert!(x.add(y).contains_rational(&(&p + &q)));
            assert!(x.sub(y).contains_rational(&(&p - &q)));
            assert!(x.mul(y).contains_rational(&(&p * &q)));
            if let Ok(d) = x.div(y) {
                assert!(d.contains_rational(&(&p / &q)));
            }
        }
    }

    #[test]
    fn tight_rational_conversion() {
        assert_eq!(rational_to_interval(&rat(1, 2)), Interval::point(0.5));
        let t = rational_to_interval(&rat(1, 3));
        assert!(t.lo() <= 1.0 / 3.0 && t.hi() >= 1.0 / 3.0 && t.hi() == t.lo().next_up());
        assert!(t.contains_rational(&rat(1, 3)));
        let q = rat(25, 224);
        let e = rational_to_interval(&q);
        assert!(e.contains_rational(&q) && e.hi() == e.lo().next_up());
        // 25/224 = 0.11160714285714285714…
        let decimal = crate::symbolic::rational::parse_rational("0.1116071428571428571428571").unwrap();
        assert!(e.contains_rational(&decimal));
        let huge = Rational::from_integer(num_bigint::BigInt::from(10).pow(400));
        assert!(!rational_to_interval(&huge).is_finite());
        assert!(rational_to_interval(&huge).contains_rational(&huge));
    }

    #[test]
    fn spd_examples() {
        assert!(verified_spd(&pm(&[&[1.0, 0.0], &[0.0, 1.0]])));
        assert!(!verified_spd(&pm(&[&[1.0, 2.0], &[2.0, 1.0]])));
        let wide = IntervalSymMatrix::from_fn(2, |i, j| Interval::with_radius(if i == j { 2.0 } else { 1.0 }, 0.5));
        assert!(!verified_spd(&wide));
        let narrow = IntervalSymMatrix::from_fn(2, |i, j| Interval::with_radius(if i == j { 2.0 } else { 1.0 }, 0.1));
        assert!(verified_spd(&narrow));
        assert!(!verified_spd(&pm(&[&[0.0]])));
    }

    #[test]
    fn each_certificate_alone() {
        // λ_min of [[2,1],[1,2]] is 1: entry radius r widens the member set
        // by at most 2r in the 2-norm.
        for (r, ok) in [(0.1, true), (0.4, true), (0.6, false)] {
            let m = IntervalSymMatrix::from_fn(2, |i, j| Interval::with_radius(if i == j { 2.0 } else { 1.0 }, r));
            assert_eq!(shifted_midpoint_spd(&m), ok, "midpoint r={r}");
            if !ok {
                assert!(!interval_cholesky_spd(&m), "cholesky r={r}");
            }
        }
        let tiny = pm(&[&[1.0, 1.0], &[1.0, 1.0 + 1e-9]]);
        assert!(shifted_midpoint_spd(&tiny) && interval_cholesky_spd(&tiny));
        let singular = pm(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(!shifted_midpoint_spd(&singular) && !interval_cholesky_spd(&singular));
        let p = assemble(Space::V2, 4, 4, &TriangleShape::new(rat(1, 4), rat(1, 2))).unwrap();
        let lam = max_gen_eig(&p.a, &p.b).unwrap().value;
        for (f, ok) in [(1.001, true), (0.999, false)] {
            let m = IntervalSymMatrix::from_rational(&p.b.scale(&from_f64_exact(lam * f).unwrap()).sub(&p.a));
            assert_eq!(shifted_midpoint_spd(&m), ok);
            assert_eq!(interval_cholesky_spd(&m), ok);
        }
    }

    #[test]
    fn certify_eigen_bound_examples() {
        let p = assemble(Space::V11, 1, 2, &TriangleShape::new(int(0), int(1))).unwrap();
        let lam = max_gen_eig(&p.a, &p.b).unwrap().value;
        let above = from_f64_exact(lam * 1.01).unwrap();
        let below = from_f64_exact(lam * 0.99).unwrap();
        assert!(certify_eigen_bound(&p, &above));
        assert!(!certify_eigen_bound(&p, &below));
        assert!(certify_eigen_bound(&p, &int(1_000_000)));
        let mut lambdas: Vec<f64> = (0..20).map(|k| lam * (0.95 + 0.01 * k as f64)).collect();
        lambdas.sort_by(f64::total_cmp);
        let verdicts: Vec<bool> = lambdas.iter().map(|l| certify_eigen_bound(&p, &from_f64_exact(*l).unwrap())).collect();
        for w in verdicts.windows(2) {
            assert!(!w[0] || w[1], "certificate not monotone in λ: {verdicts:?}");
        }
    }

    #[test]
    fn exact_spd_reference() {
        let m = SymRatMatrix::from_rows(&[vec![int(2), int(1)], vec![int(1), int(2)]]).unwrap();
        assert!(exact_is_spd(&m));
        let s = SymRatMatrix::from_rows(&[vec![int(1), int(1)], vec![int(1), int(1)]]).unwrap();
        assert!(!exact_is_spd(&s));
        assert!(certify_spd(&m) && !certify_spd(&s));
    }
}
