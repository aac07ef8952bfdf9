//! The twelve reference shapes of the reference tables and the computed
//! columns for them.

use serde::Serialize;

use crate::eigen::{discrete_upper_bound, poly_subspace_constant, PolynomialSubspaceSpec};
use crate::error::{Error, Result};
use crate::geometry::{k_constant, TriangleShape};
use crate::symbolic::rational::{format_rational, rat, rationalize, Rational};

/// `√3/2` to within `1e-15`; the only irrational table coordinate.
pub fn sqrt3_half() -> Rational {
    rationalize(3f64.sqrt() / 2.0, 1e-15).expect("finite")
}

/// `(label, shape)` in table order.
pub fn table_shapes() -> Vec<(String, TriangleShape)> {
    let mut out = Vec::new();
    let bs = [rat(1, 1), rat(1, 2), rat(1, 5), rat(1, 10)];
    for a in [rat(0, 1), rat(1, 4)] {
        for b in &bs {
            out.push((a.clone(), b.clone(), format_rational(b)));
        }
    }
    out.push((rat(1, 2), sqrt3_half(), "sqrt3/2".to_string()));
    for b in &bs[1..] {
        out.push((rat(1, 2), b.clone(), format_rational(b)));
    }
    out.into_iter()
        .map(|(a, b, bl)| (format!("T[{}, {}]", format_rational(&a), bl), TriangleShape::new(a, b)))
        .collect()
}

/// One computed table row for `C_j`.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub label: String,
    #[serde(with = "crate::symbolic::rational::serde_rational")]
    pub a: Rational,
    #[serde(with = "crate::symbolic::rational::serde_rational")]
    pub b: Rational,
    pub k: f64,
    /// `(n, C̄_j⁽ⁿ⁾)` for each requested level.
    pub upper: Vec<(usize, f64)>,
    pub lower: Option<f64>,
}

/// Computes `K_j`, `C̄_j⁽ⁿ⁾` for every `n` in `levels`, and `C̃_j` at `degree`
/// (skipped when `degree` is `None`).
pub fn table_row(j: usize, label: &str, shape: &TriangleShape, levels: &[usize], degree: Option<u32>) -> Result<TableRow> {
    if !(1..=4).contains(&j) {
        return Err(Error::InvalidArgument(format!("table {j} not in 1..=4")));
    }
    let k = k_constant(j, &shape.triangle())?;
    let upper = levels
        .iter()
        .map(|&n| Ok((n, discrete_upper_bound(j, n, shape)?)))
        .collect::<Result<Vec<_>>>()?;
    let lower = match degree {
        Some(d) => Some(poly_subspace_constant(
            j,
            shape,
            PolynomialSubspaceSpec {
                degree: d,
                space: crate::mesh::Space::for_constant(j)?,
            },
        )?),
        None => None,
    };
    Ok(TableRow {
        label: label.to_string(),
        a: shape.a.clone(),
        b: shape.b.clone(),
        k,
        upper,
        lower,
    })
}

/// All twelve rows of table `j`.
pub fn table(j: usize, levels: &[usize], degree: Option<u32>) -> Result<Vec<TableRow>> {
    table_shapes()
        .iter()
        .map(|(label, shape)| table_row(j, label, shape, levels, degree))
        .collect()
}
