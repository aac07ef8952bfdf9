//! Lower estimates `C̃_j` over `V ∩ P_d`.
//!
//! Polynomials are expanded in the Dubiner basis of the reference triangle
//! `(0,0),(1,0),(0,1)`, which is L²-orthogonal there and keeps the Gram
//! matrices well conditioned at degree 10. Its coefficients over monomials
//! are integers, so reference Gram matrices of all derivative pairs are
//! exact. `T_{a,b}` is the image of the reference triangle under
//! `x = ξ + aη, y = bη`; the physical forms are exact rational combinations
//! of the reference ones, and the side conditions (mean, edge means, vertex
//! values) are affine invariants, so their null space is shape independent.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TriangleShape;
use crate::linalg::solve_exact;
use crate::mesh::Space;
use crate::symbolic::rational::{int, to_f64, Rational};

use super::max_gen_eig_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialSubspaceSpec {
    pub degree: u32,
    pub space: Space,
}

impl PolynomialSubspaceSpec {
    /// Degree 10 on the space carrying `C_j`.
    pub fn for_constant(j: usize) -> Result<Self> {
        Ok(PolynomialSubspaceSpec {
            degree: 10,
            space: Space::for_constant(j)?,
        })
    }
}

/// Derivative orders `(∂ξ, ∂η)`.
type Order = (u32, u32);

fn binom(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Dense integer polynomial in `ξ, η`: `c[i][j]` multiplies `ξ^i η^j`.
#[derive(Clone)]
struct IntPoly {
    c: Vec<Vec<BigInt>>,
}

impl IntPoly {
    fn zero(d: usize) -> Self {
        IntPoly {
            c: vec![vec![BigInt::zero(); d + 1]; d + 1],
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let d = self.c.len() - 1;
        let mut r = Self::zero(d);
        for (i, row) in self.c.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (k, orow) in o.c.iter().enumerate() {
                    for (l, y) in orow.iter().enumerate() {
                        if !y.is_zero() {
                            assert!(i + k <= d && j + l <= d, "degree overflow");
                            r.c[i + k][j + l] += x * y;
                        }
                    }
                }
            }
        }
        r
    }

    fn diff(&self, ord: Order) -> Self {
        let d = self.c.len() - 1;
        let mut r = Self::zero(d);
        for (i, row) in self.c.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let (i, j) = (i as u32, j as u32);
                if x.is_zero() || i < ord.0 || j < ord.1 {
                    continue;
                }
                let f = (0..ord.0).fold(BigInt::one(), |a, t| a * BigInt::from(i - t))
                    * (0..ord.1).fold(BigInt::one(), |a, t| a * BigInt::from(j - t));
                r.c[(i - ord.0) as usize][(j - ord.1) as usize] += x * f;
            }
        }
        r
    }
}

/// Dubiner function `ψ_{pq}(ξ, η) = P_p(2ξ/(1−η) − 1)(1−η)^p · P_q^{(2p+1,0)}(2η−1)`.
fn dubiner(p: u32, q: u32, d: usize) -> IntPoly {
    let mut first = IntPoly::zero(d);
    for k in 0..=p {
        let ck = binom(p, k) * binom(p + k, k) * if (p + k) % 2 == 0 { 1 } else { -1 };
        for t in 0..=p - k {
            let ct = binom(p - k, t) * if t % 2 == 0 { 1 } else { -1 };
            first.c[k as usize][t as usize] += &ck * ct;
        }
    }
    let mut second = IntPoly::zero(d);
    for s in 0..=q {
        let cs = binom(q + 2 * p + 1, q - s) * binom(q, s);
        for t in 0..=s {
            let ct = binom(s, t) * if (s - t) % 2 == 0 { 1 } else { -1 };
            second.c[0][(q - s + t) as usize] += &cs * ct;
        }
    }
    first.mul(&second)
}

/// Reference data of one degree: basis labels and exact Gram matrices of
/// derivative pairs, `R[(α, β)]_{ab} = ∫ ∂^α ψ_a ∂^β ψ_b`.
struct Reference {
    labels: Vec<(u32, u32)>,
    basis: Vec<IntPoly>,
    gram: HashMap<(Order, Order), Vec<Vec<Rational>>>,
}

const ORDERS: [Order; 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

impl Reference {
    fn build(degree: u32) -> Reference {
        let d = degree as usize;
        let mut labels = Vec::new();
        for total in 0..=degree {
            for q in 0..=total {
                labels.push((total - q, q));
            }
        }
        let basis: Vec<IntPoly> = labels.iter().map(|&(p, q)| dubiner(p, q, d)).collect();
        // ∫ ξ^i η^j = i! j! / (i+j+2)!, scaled by (2d+2)! to stay integral.
        let top = 2 * degree + 2;
        let scale = factorial(top);
        let fact: Vec<BigInt> = (0..=top).map(factorial).collect();
        let moment = |i: usize, j: usize| &scale * &fact[i] * &fact[j] / &fact[i + j + 2];
        let moments: Vec<Vec<BigInt>> = (0..=2 * d).map(|i| (0..=2 * d - i).map(|j| moment(i, j)).collect()).collect();
        let derivs: HashMap<Order, Vec<IntPoly>> =
            ORDERS.iter().map(|&o| (o, basis.iter().map(|b| b.diff(o)).collect())).collect();
        let scale_r = Rational::from_integer(scale);
        let mut gram = HashMap::new();
        let pairs = [
            ((0, 0), (0, 0)),
            ((1, 0), (1, 0)),
            ((1, 0), (0, 1)),
            ((0, 1), (0, 1)),
            ((2, 0), (2, 0)),
            ((2, 0), (1, 1)),
            ((2, 0), (0, 2)),
            ((1, 1), (1, 1)),
            ((1, 1), (0, 2)),
            ((0, 2), (0, 2)),
        ];
        for (alpha, beta) in pairs {
            let da = &derivs[&alpha];
            let db = &derivs[&beta];
            // Project each ∂^β ψ_b against the moments once: m_b[i][j] = ∫ ξ^i η^j ∂^β ψ_b.
            let proj: Vec<Vec<Vec<BigInt>>> = db
                .iter()
                .map(|pb| {
                    (0..=d)
                        .map(|i| {
                            (0..=d - i)
                                .map(|j| {
                                    let mut acc = BigInt::zero();
                                    for (k, row) in pb.c.iter().enumerate() {
                                        for (l, y) in row.iter().enumerate() {
                                            if !y.is_zero() {
                                                acc += y * &moments[i + k][j + l];
                                            }
                                        }
                                    }
                                    acc
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect();
            let m: Vec<Vec<Rational>> = da
                .iter()
                .map(|pa| {
                    proj.iter()
                        .map(|pb| {
                            let mut acc = BigInt::zero();
                            for (i, row) in pa.c.iter().enumerate() {
                                for (j, x) in row.iter().enumerate() {
                                    if !x.is_zero() && i + j <= d {
                                        acc += x * &pb[i][j];
                                    }
                                }
                            }
                            Rational::new(acc, scale_r.numer().clone())
                        })
                        .collect()
                })
                .collect();
            let mt: Vec<Vec<Rational>> = (0..m.len()).map(|b| (0..m.len()).map(|a| m[a][b].clone()).collect()).collect();
            gram.insert((beta, alpha), mt);
            gram.insert((alpha, beta), m);
        }
        Reference { labels, basis, gram }
    }

    fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Linear side conditions of `space` on basis coefficients.
    fn constraints(&self, space: Space) -> Vec<Vec<Rational>> {
        let value = |f: &dyn Fn(usize, usize) -> Rational| -> Vec<Rational> {
            self.basis
                .iter()
                .map(|b| {
                    let mut acc = Rational::zero();
                    for (i, row) in b.c.iter().enumerate() {
                        for (j, x) in row.iter().enumerate() {
                            if !x.is_zero() {
                                acc += Rational::from_integer(x.clone()) * f(i, j);
                            }
                        }
                    }
                    acc
                })
                .collect()
        };
        let fact = |n: usize| Rational::from_integer(factorial(n as u32));
        let indicator = |c: bool| if c { int(1) } else { Rational::zero() };
        match space {
            Space::V11 => vec![value(&|i, j| fact(i) * fact(j) / fact(i + j + 2))],
            Space::V12 => vec![
                // Means over (1,0)→(0,1), (0,1)→(0,0) and (0,0)→(1,0).
                value(&|i, j| fact(i) * fact(j) / fact(i + j + 1)),
                value(&|i, j| indicator(i == 0) / int(j as i64 + 1)),
                value(&|i, j| indicator(j == 0) / int(i as i64 + 1)),
            ],
            Space::V2 => vec![
                value(&|i, j| indicator(i == 0 && j == 0)),
                value(&|_, j| indicator(j == 0)),
                value(&|i, _| indicator(i == 0)),
            ],
        }
    }
}

/// Null-space reduction of the reference Gram matrices for one space.
struct Reduced {
    gram: HashMap<(Order, Order), Vec<Vec<Rational>>>,
}

fn reduce(reference: &Reference, space: Space) -> Result<Reduced> {
    let k = reference.constraints(space);
    let n = reference.dim();
    // Pivots on the lowest-degree functions: constant for the mean, the
    // three affine functions otherwise.
    let pivots: Vec<usize> = (0..k.len()).collect();
    let free: Vec<usize> = (k.len()..n).collect();
    let kp: Vec<Vec<Rational>> = k.iter().map(|row| pivots.iter().map(|&p| row[p].clone()).collect()).collect();
    // r[p][f]: coefficient of pivot p in the null-space vector of free f.
    let mut r = vec![vec![Rational::zero(); free.len()]; pivots.len()];
    for (fi, &f) in free.iter().enumerate() {
        let rhs: Vec<Rational> = k.iter().map(|row| -row[f].clone()).collect();
        let x = solve_exact(&kp, &rhs).map_err(|_| Error::Degenerate("constraint rank deficiency".into()))?;
        for (pi, v) in x.into_iter().enumerate() {
            r[pi][fi] = v;
        }
    }
    let mut gram = HashMap::new();
    for (key, g) in &reference.gram {
        let m: Vec<Vec<Rational>> = free
            .iter()
            .enumerate()
            .map(|(fa, &a)| {
                free.iter()
                    .enumerate()
                    .map(|(fb, &b)| {
                        let mut v = g[a][b].clone();
                        for (pi, &p) in pivots.iter().enumerate() {
                            if !r[pi][fa].is_zero() {
                                v += &r[pi][fa] * &g[p][b];
                            }
                            if !r[pi][fb].is_zero() {
                                v += &r[pi][fb] * &g[a][p];
                            }
                            for (qi, &q) in pivots.iter().enumerate() {
                                if !r[pi][fa].is_zero() && !r[qi][fb].is_zero() {
                                    v += &r[pi][fa] * &r[qi][fb] * &g[p][q];
                                }
                            }
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        gram.insert(*key, m);
    }
    Ok(Reduced { gram })
}

type Cache = Mutex<HashMap<(u32, Space), Arc<Reduced>>>;

fn reduced(degree: u32, space: Space) -> Result<Arc<Reduced>> {
    static REFS: OnceLock<Mutex<HashMap<u32, Arc<Reference>>>> = OnceLock::new();
    static RED: OnceLock<Cache> = OnceLock::new();
    let red = RED.get_or_init(Default::default);
    if let Some(r) = red.lock().expect("cache").get(&(degree, space)) {
        return Ok(r.clone());
    }
    let refs = REFS.get_or_init(Default::default);
    let reference = {
        let cached = refs.lock().expect("cache").get(&degree).cloned();
        match cached {
            Some(r) => r,
            None => {
                let r = Arc::new(Reference::build(degree));
                refs.lock().expect("cache").insert(degree, r.clone());
                r
            }
        }
    };
    let r = Arc::new(reduce(&reference, space)?);
    red.lock().expect("cache").insert((degree, space), r.clone());
    Ok(r)
}

/// Physical form as a combination of reference derivative pairs:
/// `∫_T ∂^μ u ∂^ν v = b Σ coef · R[(α, β)]` for first (`order = 1`) or
/// second (`order = 2`) derivatives summed over `μ = ν`.
fn seminorm_terms(order: u32, a: &Rational, b: &Rational) -> Vec<((Order, Order), Rational)> {
    // ∂u/∂x_k = Σ_r G_rk ∂u/∂ξ_r with G = J⁻¹ = [[1, −a/b], [0, 1/b]].
    let g = [[int(1), -a / b], [Rational::zero(), int(1) / b]];
    let unit = |r: usize| if r == 0 { (1, 0) } else { (0, 1) };
    let mut acc: HashMap<(Order, Order), Rational> = HashMap::new();
    match order {
        0 => {
            acc.insert(((0, 0), (0, 0)), int(1));
        }
        1 => {
            for k in 0..2 {
                for r in 0..2 {
                    for s in 0..2 {
                        *acc.entry((unit(r), unit(s))).or_insert_with(Rational::zero) += &g[r][k] * &g[s][k];
                    }
                }
            }
        }
        _ => {
            let second = |r: usize, s: usize| {
                let (x, y) = (unit(r), unit(s));
                (x.0 + y.0, x.1 + y.1)
            };
            for k in 0..2 {
                for l in 0..2 {
                    for r in 0..2 {
                        for s in 0..2 {
                            for r2 in 0..2 {
                                for s2 in 0..2 {
                                    let c = &g[r][k] * &g[s][l] * &g[r2][k] * &g[s2][l];
                                    *acc.entry((second(r, s), second(r2, s2))).or_insert_with(Rational::zero) += c;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    acc.into_iter().map(|(k, v)| (k, v * b)).collect()
}

fn physical_gram(red: &Reduced, order: u32, shape: &TriangleShape) -> DMatrix<f64> {
    let terms = seminorm_terms(order, &shape.a, &shape.b);
    let n = red.gram[&((0, 0), (0, 0))].len();
    DMatrix::from_fn(n, n, |i, j| {
        let mut v = Rational::zero();
        for (key, c) in &terms {
            if !c.is_zero() {
                v += c * &red.gram[key][i][j];
            }
        }
        to_f64(&v)
    })
}

/// `C̃_j(T_{a,b})`: the largest ratio of the pencil for `C_j` over `V ∩ P_d`.
pub fn poly_subspace_constant(j: usize, shape: &TriangleShape, spec: PolynomialSubspaceSpec) -> Result<f64> {
    if spec.degree < 2 {
        return Err(Error::InvalidArgument(format!("polynomial degree {} must be at least 2", spec.degree)));
    }
    if !spec.space.compatible(j) {
        return Err(Error::InvalidArgument(format!("space {:?} does not carry C{j}", spec.space)));
    }
    if !num_traits::Signed::is_positive(&shape.b) {
        return Err(Error::Degenerate("shape needs b > 0".into()));
    }
    let red = reduced(spec.degree, spec.space)?;
    let (num, den) = match j {
        1 | 2 => (0, 1),
        3 => (0, 2),
        _ => (1, 2),
    };
    let a = physical_gram(&red, num, shape);
    let b = physical_gram(&red, den, shape);
    Ok(max_gen_eig_f64(&a, &b)?.value.max(0.0).sqrt())
}
