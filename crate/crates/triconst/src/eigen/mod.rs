//! Floating-point maximum generalized eigenvalues, the discrete constants
//! `C_j⁽ⁿ⁾`, their transfer to upper bounds `C̄_j⁽ⁿ⁾`, and polynomial-subspace
//! lower estimates `C̃_j`.

pub mod polyspace;

pub use polyspace::{poly_subspace_constant, PolynomialSubspaceSpec};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TriangleShape;
use crate::linalg::SymRatMatrix;
use crate::mesh::{assemble_f64, Space};

/// Largest eigenvalue of a pencil with its eigenvector and relative residual
/// `‖Ax − λBx‖ / (‖A‖‖x‖)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenEstimate {
    pub value: f64,
    pub residual: f64,
    /// Sweeps of the iterative solver; 1 for the direct dense path.
    pub iterations: usize,
    #[serde(skip)]
    pub vector: Vec<f64>,
}

/// Residual accepted by [`max_gen_eig_f64`].
pub const RESIDUAL_TOL: f64 = 1e-8;

fn check_square(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() || a.shape() != b.shape() || a.nrows() == 0 {
        return Err(Error::InvalidArgument(format!(
            "pencil shapes {:?} and {:?} are not matching square matrices",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

/// `L⁻¹ A L⁻ᵀ` for the Cholesky factor `L` of `B`, symmetrized.
fn reduce(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_square(a, b)?;
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorization of B failed".into()))?;
    let l = chol.l();
    let half = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::NotPositiveDefinite("singular Cholesky factor".into()))?;
    let c = l
        .solve_lower_triangular(&half.transpose())
        .ok_or_else(|| Error::NotPositiveDefinite("singular Cholesky factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    Ok((c, l))
}

fn residual(a: &DMatrix<f64>, b: &DMatrix<f64>, lambda: f64, x: &DVector<f64>) -> f64 {
    let r = a * x - b * x * lambda;
    let scale = a.norm().max(lambda.abs() * b.norm()).max(f64::MIN_POSITIVE);
    r.norm() / (scale * x.norm())
}

/// `λ_max(A, B)` by B-Cholesky reduction and a dense symmetric
/// (tridiagonalization + implicit QR) eigensolver.
pub fn max_gen_eig_f64(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<EigenEstimate> {
    let (c, l) = reduce(a, b)?;
    let eig = SymmetricEigen::new(c);
    let k = eig.eigenvalues.imax();
    let value = eig.eigenvalues[k];
    let y = eig.eigenvectors.column(k).into_owned();
    let x = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::NotPositiveDefinite("singular Cholesky factor".into()))?;
    let res = residual(a, b, value, &x);
    if res.is_nan() || res > RESIDUAL_TOL {
        return Err(Error::Internal(format!("eigen residual {res:e} above tolerance")));
    }
    Ok(EigenEstimate {
        value,
        residual: res,
        iterations: 1,
        vector: x.iter().copied().collect(),
    })
}

/// Exact pencil, rounded to doubles, then [`max_gen_eig_f64`].
pub fn max_gen_eig(a: &SymRatMatrix, b: &SymRatMatrix) -> Result<EigenEstimate> {
    max_gen_eig_f64(&a.to_f64(), &b.to_f64())
}

/// Second, independent path: the same reduction followed by cyclic Jacobi
/// rotations on the reduced matrix. Intended for dimensions up to a few
/// hundred.
pub fn max_gen_eig_jacobi(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<EigenEstimate> {
    let (mut c, _) = reduce(a, b)?;
    let n = c.nrows();
    let mut sweeps = 0;
    loop {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| c[(i, j)].powi(2)).sum();
        let diag: f64 = (0..n).map(|i| c[(i, i)].powi(2)).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) || sweeps >= 100 {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = c[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (c[(q, q)] - c[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (ckp, ckq) = (c[(k, p)], c[(k, q)]);
                    c[(k, p)] = cs * ckp - sn * ckq;
                    c[(k, q)] = sn * ckp + cs * ckq;
                }
                for k in 0..n {
                    let (cpk, cqk) = (c[(p, k)], c[(q, k)]);
                    c[(p, k)] = cs * cpk - sn * cqk;
                    c[(q, k)] = sn * cpk + cs * cqk;
                }
            }
        }
    }
    let value = (0..n).map(|i| c[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
    Ok(EigenEstimate {
        value,
        residual: 0.0,
        iterations: sweeps,
        vector: Vec::new(),
    })
}

/// `C_j⁽ⁿ⁾(T_{a,b}) = sqrt(λ_max)` of the level-`n` pencil.
pub fn discrete_constant(j: usize, n: usize, shape: &TriangleShape) -> Result<f64> {
    let space = Space::for_constant(j)?;
    let p = assemble_f64(space, j, n, shape)?;
    Ok(max_gen_eig_f64(&p.a, &p.b)?.value.max(0.0).sqrt())
}

/// Upper bound `C̄_j⁽ⁿ⁾` from the discrete value `C = C_j⁽ⁿ⁾`:
/// `sqrt(n²/(n²−1))·C` for j = 1, 2; `sqrt(n⁴/(n⁴−1))·C` for j = 3;
/// `sqrt(C² + C̄₂²/n²)` for j = 4, which needs `c2_bound = C̄₂⁽ⁿ⁾`.
pub fn bound_from_discrete(j: usize, n: usize, value: f64, c2_bound: Option<f64>) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("mesh level n = {n} must be at least 2")));
    }
    let nf = n as f64;
    let n2 = nf * nf;
    match j {
        1 | 2 => Ok((n2 / (n2 - 1.0)).sqrt() * value),
        3 => Ok((n2 * n2 / (n2 * n2 - 1.0)).sqrt() * value),
        4 => {
            let c2 = c2_bound.ok_or_else(|| Error::InvalidArgument("j = 4 needs the C̄₂ bound".into()))?;
            Ok((value * value + c2 * c2 / n2).sqrt())
        }
        _ => Err(Error::InvalidArgument(format!("constant index {j} not in 1..=4"))),
    }
}

/// `C̄_j⁽ⁿ⁾(T_{a,b})`, computing `C̄₂⁽ⁿ⁾` as well when `j = 4`.
pub fn discrete_upper_bound(j: usize, n: usize, shape: &TriangleShape) -> Result<f64> {
    let value = discrete_constant(j, n, shape)?;
    let c2 = if j == 4 {
        Some(bound_from_discrete(2, n, discrete_constant(2, n, shape)?, None)?)
    } else {
        None
    };
    bound_from_discrete(j, n, value, c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::assemble;
    use crate::symbolic::rational::{int, rat};

    fn shape(a: (i64, i64), b: (i64, i64)) -> TriangleShape {
        TriangleShape::new(rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn trivial_pencils() {
        let b = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        assert!((max_gen_eig_f64(&b, &b).unwrap().value - 1.0).abs() < 1e-12);
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0]));
        let i = DMatrix::identity(2, 2);
        assert!((max_gen_eig_f64(&a, &i).unwrap().value - 2.0).abs() < 1e-12);
        assert!((max_gen_eig_jacobi(&a, &i).unwrap().value - 2.0).abs() < 1e-12);
        let not_pd = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(max_gen_eig_f64(&a, &not_pd), Err(Error::NotPositiveDefinite(_))));
        let ra = SymRatMatrix::identity(3).scale(&int(5));
        assert!((max_gen_eig(&ra, &SymRatMatrix::identity(3)).unwrap().value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn independent_solvers_agree_on_small_pencils() {
        for n in [2, 3, 4, 5] {
            for j in 1..=4 {
                let sh = shape((1, 3), (3, 5));
                let p = assemble_f64(Space::for_constant(j).unwrap(), j, n, &sh).unwrap();
                if p.a.nrows() > 200 {
                    continue;
                }
                let x = max_gen_eig_f64(&p.a, &p.b).unwrap();
                let y = max_gen_eig_jacobi(&p.a, &p.b).unwrap();
                assert!(((x.value - y.value) / x.value).abs() < 1e-9, "j={j} n={n}: {} vs {}", x.value, y.value);
                assert!(x.residual < RESIDUAL_TOL);
            }
        }
    }

    #[test]
    fn n2_v11_oracle_and_rayleigh_bound() {
        use crate::mesh::rayleigh_quotient;
        use crate::symbolic::sz::PointSampler;
        let p = assemble(Space::V11, 1, 2, &shape((0, 1), (1, 1))).unwrap();
        let f = p.to_f64();
        let x = max_gen_eig_f64(&f.a, &f.b).unwrap();
        let y = max_gen_eig_jacobi(&f.a, &f.b).unwrap();
        assert!((x.value - y.value).abs() < 1e-10 * x.value);
        let mut sampler = PointSampler::new(8);
        for _ in 0..100 {
            let v: Vec<_> = (0..p.dim).map(|_| sampler.rational()).collect();
            if v.iter().all(num_traits::Zero::is_zero) {
                continue;
            }
            let q = crate::symbolic::rational::to_f64(&rayleigh_quotient(&p, &v).unwrap());
            assert!(q <= x.value * (1.0 + 1e-12));
        }
    }

    #[test]
    fn orientation_corruption_changes_the_top_eigenvalue() {
        use crate::elements::{local_matrix, FormKind};
        use crate::mesh::{assemble_local, build_indexing, constraint_groups, element_geometry, Orientation};
        let sh = shape((1, 2), (1, 10));
        let n = 3;
        let mut idx = build_indexing(n).unwrap();
        let geom = element_geometry(&sh, n).unwrap();
        let lam = |idx: &crate::mesh::MeshIndexing| {
            let groups = constraint_groups(Space::V2, idx);
            let m = |form| {
                let loc = local_matrix(form, &geom);
                let rows: Vec<Vec<f64>> = (0..6)
                    .map(|i| (0..6).map(|k| crate::symbolic::rational::to_f64(loc.entry(i, k))).collect())
                    .collect();
                let d = assemble_local(idx, Space::V2, &rows).eliminate(&groups);
                DMatrix::from_row_slice(d.n, d.n, &d.data)
            };
            max_gen_eig_f64(&m(FormKind::Beta1), &m(FormKind::Beta2)).unwrap().value
        };
        let good = lam(&idx);
        for e in idx.elements.iter_mut() {
            e.1 = Orientation::Up;
        }
        let bad = lam(&idx);
        assert!((good - bad).abs() > 1e-6 * good, "{good} vs {bad}");
    }

    #[test]
    fn table_values_at_level_ten() {
        // Tables print values rounded up to seven decimals.
        let c1 = discrete_upper_bound(1, 10, &shape((0, 1), (1, 1))).unwrap();
        assert!(c1 <= 0.3212289 + 1e-7 && 0.3212289 - c1 <= 1e-5, "{c1}");
        let c4 = discrete_upper_bound(4, 10, &shape((0, 1), (1, 1))).unwrap();
        assert!(c4 <= 0.4894003 + 1e-7 && 0.4894003 - c4 <= 1e-5, "{c4}");
    }

    #[test]
    fn bound_transfer_formulas() {
        let c = 0.3;
        assert!((bound_from_discrete(1, 10, c, None).unwrap() - c * (100.0f64 / 99.0).sqrt()).abs() < 1e-15);
        assert!((bound_from_discrete(3, 20, c, None).unwrap() - c * (160000.0f64 / 159999.0).sqrt()).abs() < 1e-15);
        assert!(bound_from_discrete(4, 10, c, None).is_err());
        assert!((bound_from_discrete(4, 10, 0.3, Some(0.4)).unwrap() - (0.09f64 + 0.0016).sqrt()).abs() < 1e-15);
        assert!(bound_from_discrete(5, 10, c, None).is_err());
    }

    #[test]
    fn discrete_constant_is_scale_free_in_similar_shapes() {
        // T_{a,b} and its mirror image T_{1−a,b} are congruent.
        let x = discrete_constant(3, 4, &shape((1, 5), (1, 2))).unwrap();
        let y = discrete_constant(3, 4, &shape((4, 5), (1, 2))).unwrap();
        assert!((x - y).abs() < 1e-10 * x, "{x} vs {y}");
    }
}
