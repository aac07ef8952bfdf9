//! Uniform mesh of `T_{a,b}` into `n²` similar triangles, global numbering of
//! vertices, edges and faces, and exact assembly of the global pencils with
//! the side constraints eliminated.
//!
//! Positions use oblique coordinates: vertex `(p, q)` sits at
//! `p·(1,0)/n + q·(a,b)/n`. Keys are 1-based sums of the oblique
//! coordinates of the vertices involved, so edges are keyed by twice their
//! midpoint and faces by three times their centroid (plus one). Ids start at
//! 1 in the order produced by the reference procedures: rows `q = 0..n-1`,
//! up triangle `(p,q),(p+1,q),(p,q+1)` first, then the down triangle
//! `(p+1,q+1),(p,q+1),(p+1,q)` when `p + q < n − 1`.

use std::collections::HashMap;
use std::ops::{AddAssign, Neg, SubAssign};

use nalgebra::DMatrix;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::elements::{local_matrix, ElementGeometry, FormKind};
use crate::error::{Error, Result};
use crate::geometry::TriangleShape;
use crate::linalg::SymRatMatrix;
use crate::symbolic::rational::{int, to_f64, Rational};

/// Discrete spaces: α-interpolation with mean-zero (`V11`) or
/// side-mean-zero (`V12`) constraints, β-interpolation vanishing at the
/// corners (`V2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    V11,
    V12,
    V2,
}

impl Space {
    /// The space used for constant `C_j`.
    pub fn for_constant(j: usize) -> Result<Space> {
        match j {
            1 => Ok(Space::V11),
            2 => Ok(Space::V12),
            3 | 4 => Ok(Space::V2),
            _ => Err(Error::InvalidArgument(format!("constant index {j} not in 1..=4"))),
        }
    }

    /// Whether the pencil for `C_j` lives on this space.
    pub fn compatible(self, j: usize) -> bool {
        Space::for_constant(j).map(|s| s == self).unwrap_or(false)
    }

    /// Dimension after constraint elimination.
    pub fn dim(self, n: usize) -> usize {
        match self {
            Space::V11 => (n + 1) * (5 * n - 2) / 2,
            Space::V12 => (5 * n * n + 3 * n - 6) / 2,
            Space::V2 => (n + 2) * (2 * n - 1),
        }
    }
}

/// `(A, B)` local forms of the pencil for `C_j`: `C_j² ≈ max A/B`.
pub fn forms_for(j: usize) -> Result<(FormKind, FormKind)> {
    match j {
        1 | 2 => Ok((FormKind::Alpha0, FormKind::Alpha1)),
        3 => Ok((FormKind::Beta0, FormKind::Beta2)),
        4 => Ok((FormKind::Beta1, FormKind::Beta2)),
        _ => Err(Error::InvalidArgument(format!("constant index {j} not in 1..=4"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Up,
    Down,
}

/// Global numbering of a level-`n` mesh. Ids are 1-based per entity kind.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshIndexing {
    pub n: usize,
    vertex: HashMap<(usize, usize), usize>,
    edge: HashMap<(usize, usize), usize>,
    face: HashMap<(usize, usize), usize>,
    /// Per element: oblique vertex coordinates `(p, q)` and orientation.
    pub elements: Vec<([(usize, usize); 3], Orientation)>,
}

fn up_vertices(p: usize, q: usize) -> [(usize, usize); 3] {
    [(p, q), (p + 1, q), (p, q + 1)]
}

fn down_vertices(p: usize, q: usize) -> [(usize, usize); 3] {
    [(p + 1, q + 1), (p, q + 1), (p + 1, q)]
}

fn edge_key(v: &[(usize, usize); 3], k: usize) -> (usize, usize) {
    let (a, b) = (v[(k + 1) % 3], v[(k + 2) % 3]);
    (a.0 + b.0 + 1, a.1 + b.1 + 1)
}

fn face_key(v: &[(usize, usize); 3]) -> (usize, usize) {
    (v[0].0 + v[1].0 + v[2].0 + 1, v[0].1 + v[1].1 + v[2].1 + 1)
}

/// Builds the numbering; requires `n ≥ 2`.
pub fn build_indexing(n: usize) -> Result<MeshIndexing> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("mesh level n = {n} must be at least 2")));
    }
    let mut vertex = HashMap::new();
    for q in 0..=n {
        for p in 0..=n - q {
            let id = vertex.len() + 1;
            vertex.insert((p + 1, q + 1), id);
        }
    }
    let mut edge = HashMap::new();
    let mut face = HashMap::new();
    let mut elements = Vec::with_capacity(n * n);
    for q in 0..n {
        for p in 0..n - q {
            let up = up_vertices(p, q);
            for k in 0..3 {
                let id = edge.len() + 1;
                edge.insert(edge_key(&up, k), id);
            }
            let id = face.len() + 1;
            face.insert(face_key(&up), id);
            elements.push((up, Orientation::Up));
            if p + q < n - 1 {
                let down = down_vertices(p, q);
                let id = face.len() + 1;
                face.insert(face_key(&down), id);
                elements.push((down, Orientation::Down));
            }
        }
    }
    Ok(MeshIndexing {
        n,
        vertex,
        edge,
        face,
        elements,
    })
}

impl MeshIndexing {
    pub fn vertex_count(&self) -> usize {
        self.vertex.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge.len()
    }

    pub fn face_count(&self) -> usize {
        self.face.len()
    }

    /// Vertex id at 1-based key `(p+1, q+1)`.
    pub fn vertex_id(&self, key: (usize, usize)) -> Option<usize> {
        self.vertex.get(&key).copied()
    }

    pub fn edge_id(&self, key: (usize, usize)) -> Option<usize> {
        self.edge.get(&key).copied()
    }

    pub fn face_id(&self, key: (usize, usize)) -> Option<usize> {
        self.face.get(&key).copied()
    }

    /// Global dofs size before constraints.
    pub fn raw_dim(&self, space: Space) -> usize {
        match space {
            Space::V11 | Space::V12 => self.edge_count() + self.face_count(),
            Space::V2 => self.vertex_count() + self.edge_count(),
        }
    }

    /// 0-based α dofs `[edge1, edge2, edge3, face]` of every element: edges
    /// first, faces numbered after them.
    pub fn alpha_dofs(&self) -> Vec<[usize; 4]> {
        let ne = self.edge_count();
        self.elements
            .iter()
            .map(|(v, _)| {
                let e = |k| self.edge[&edge_key(v, k)] - 1;
                [e(0), e(1), e(2), ne + self.face[&face_key(v)] - 1]
            })
            .collect()
    }

    /// 0-based β dofs `[v1, v2, v3, e1, e2, e3]`: vertices first, then edges.
    pub fn beta_dofs(&self) -> Vec<[usize; 6]> {
        let nv = self.vertex_count();
        self.elements
            .iter()
            .map(|(v, _)| {
                let x = |i: usize| self.vertex[&(v[i].0 + 1, v[i].1 + 1)] - 1;
                let e = |k| nv + self.edge[&edge_key(v, k)] - 1;
                [x(0), x(1), x(2), e(0), e(1), e(2)]
            })
            .collect()
    }

    pub fn orientations(&self) -> Vec<Orientation> {
        self.elements.iter().map(|(_, o)| *o).collect()
    }

    fn sorted(map: &HashMap<(usize, usize), usize>) -> Vec<((usize, usize), usize)> {
        let mut v: Vec<_> = map.iter().map(|(k, i)| (*k, *i)).collect();
        v.sort_by_key(|&(_, i)| i);
        v
    }
}

/// One linear side condition on the global dofs (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintGroup {
    /// The sum of the listed dofs vanishes; the first is eliminated.
    SumZero(Vec<usize>),
    /// The dof vanishes.
    Fixed(usize),
}

impl ConstraintGroup {
    pub fn eliminated(&self) -> usize {
        match self {
            ConstraintGroup::SumZero(v) => v[0],
            ConstraintGroup::Fixed(i) => *i,
        }
    }
}

/// Side conditions of `space`, in the reference order.
pub fn constraint_groups(space: Space, idx: &MeshIndexing) -> Vec<ConstraintGroup> {
    let n = idx.n;
    let ne = idx.edge_count();
    match space {
        Space::V11 => {
            // Column-major order of the face table.
            let mut keys: Vec<(usize, usize)> = idx.face.keys().copied().collect();
            keys.sort_by_key(|&(p, q)| (q, p));
            vec![ConstraintGroup::SumZero(keys.iter().map(|k| ne + idx.face[k] - 1).collect())]
        }
        Space::V12 => {
            let edges = |keys: Vec<(usize, usize)>| {
                ConstraintGroup::SumZero(keys.iter().filter_map(|k| idx.edge_id(*k)).map(|i| i - 1).collect())
            };
            vec![
                edges((2..=2 * n).map(|i| (i, 2 * (n + 1) - i)).collect()),
                edges((1..=2 * n).map(|j| (1, j)).collect()),
                edges((1..=2 * n).map(|i| (i, 1)).collect()),
            ]
        }
        Space::V2 => [(1, 1), (n + 1, 1), (1, n + 1)]
            .iter()
            .map(|k| ConstraintGroup::Fixed(idx.vertex[k] - 1))
            .collect(),
    }
}

/// Entry type for the generic assembler.
pub trait Scalar:
    Clone + Zero + Neg<Output = Self> + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self>
{
}

impl<T> Scalar for T where
    T: Clone + Zero + Neg<Output = Self> + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self>
{
}

/// Dense row-major square matrix over a [`Scalar`].
#[derive(Clone, Debug, PartialEq)]
pub struct Dense<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn zeros(n: usize) -> Self {
        Dense {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.n + j]
    }

    /// Applies the substitution `x_s = −Σ_{t} x_t` as a congruence:
    /// `M(:,t) −= M(:,s)`, `M(t,:) −= M(s,:)`, `M(t,t) += M(s,s)`.
    fn substitute_sum(&mut self, s: usize, t: &[usize]) {
        let p: Vec<T> = (0..self.n).map(|i| self.at(i, s).clone()).collect();
        let r = self.at(s, s).clone();
        for (i, pi) in p.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            for &j in t {
                *self.at_mut(i, j) -= pi;
            }
        }
        for &i in t {
            for (j, qj) in p.iter().enumerate() {
                if !qj.is_zero() {
                    *self.at_mut(i, j) -= qj;
                }
            }
        }
        if !r.is_zero() {
            for &i in t {
                for &j in t {
                    *self.at_mut(i, j) += &r;
                }
            }
        }
    }

    fn delete(self, removed: &[usize]) -> Self {
        let keep: Vec<usize> = (0..self.n).filter(|i| !removed.contains(i)).collect();
        let k = keep.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in &keep {
            for &j in &keep {
                data.push(self.data[i * self.n + j].clone());
            }
        }
        Dense { n: k, data }
    }

    /// Eliminates the groups in order, then deletes the eliminated dofs.
    pub fn eliminate(mut self, groups: &[ConstraintGroup]) -> Self {
        for g in groups {
            if let ConstraintGroup::SumZero(v) = g {
                self.substitute_sum(v[0], &v[1..]);
            }
        }
        let removed: Vec<usize> = groups.iter().map(ConstraintGroup::eliminated).collect();
        self.delete(&removed)
    }
}

/// Adds one local matrix per element. For β, down elements use the
/// sign-flipped `u`–`w` blocks because the global flux dofs are taken with
/// respect to the up element's outward normal.
pub fn assemble_local<T: Scalar>(idx: &MeshIndexing, space: Space, local: &[Vec<T>]) -> Dense<T> {
    let mut m = Dense::zeros(idx.raw_dim(space));
    let mut add = |dofs: &[usize], flip: bool| {
        let split = dofs.len() / 2;
        for (a, &ga) in dofs.iter().enumerate() {
            for (b, &gb) in dofs.iter().enumerate() {
                let v = &local[a][b];
                if flip && ((a < split) != (b < split)) {
                    *m.at_mut(ga, gb) -= v;
                } else {
                    *m.at_mut(ga, gb) += v;
                }
            }
        }
    };
    match space {
        Space::V11 | Space::V12 => {
            for d in idx.alpha_dofs() {
                add(&d, false);
            }
        }
        Space::V2 => {
            for (d, o) in idx.beta_dofs().iter().zip(idx.orientations()) {
                add(d, o == Orientation::Down);
            }
        }
    }
    m
}

/// Geometry shared by all elements of the level-`n` mesh of `shape`.
pub fn element_geometry(shape: &TriangleShape, n: usize) -> Result<ElementGeometry> {
    let s = &shape.b / int(2) / int((n * n) as i64);
    ElementGeometry::from_shape(shape, s)
}

fn check_space(space: Space, j: usize) -> Result<()> {
    if !space.compatible(j) {
        return Err(Error::InvalidArgument(format!("space {space:?} does not carry the pencil for C{j}")));
    }
    Ok(())
}

fn rows(m: &SymRatMatrix) -> Vec<Vec<Rational>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect()).collect()
}

fn assemble_exact(idx: &MeshIndexing, space: Space, local: &SymRatMatrix) -> SymRatMatrix {
    let groups = constraint_groups(space, idx);
    let m = assemble_local(idx, space, &rows(local)).eliminate(&groups);
    SymRatMatrix::from_flat(m.n, m.data)
}

/// The exact global pencil `(A, B)` for `C_j` on `space`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssembledPencil {
    pub space: Space,
    pub j: usize,
    pub n: usize,
    pub shape: TriangleShape,
    pub dim: usize,
    pub a: SymRatMatrix,
    pub b: SymRatMatrix,
}

/// Exact assembly of the pencil for `C_j` on the level-`n` mesh of `shape`.
pub fn assemble(space: Space, j: usize, n: usize, shape: &TriangleShape) -> Result<AssembledPencil> {
    check_space(space, j)?;
    let idx = build_indexing(n)?;
    let geom = element_geometry(shape, n)?;
    let (fa, fb) = forms_for(j)?;
    let a = assemble_exact(&idx, space, &local_matrix(fa, &geom));
    let b = assemble_exact(&idx, space, &local_matrix(fb, &geom));
    Ok(AssembledPencil {
        space,
        j,
        n,
        shape: shape.clone(),
        dim: a.dim(),
        a,
        b,
    })
}

/// Exact `λB − A`, formed on the element level and assembled once. Assembly
/// and elimination are linear, so this equals `λ·B − A` of [`assemble`].
pub fn assemble_shifted(space: Space, j: usize, n: usize, shape: &TriangleShape, lambda: &Rational) -> Result<SymRatMatrix> {
    check_space(space, j)?;
    let idx = build_indexing(n)?;
    let geom = element_geometry(shape, n)?;
    let (fa, fb) = forms_for(j)?;
    let local = local_matrix(fb, &geom).scale(lambda).sub(&local_matrix(fa, &geom));
    Ok(assemble_exact(&idx, space, &local))
}

/// Double-precision pencil, assembled from the correctly rounded local
/// matrices. Used for eigenvalue estimates, never for certificates.
#[derive(Clone, Debug)]
pub struct FloatPencil {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

pub fn assemble_f64(space: Space, j: usize, n: usize, shape: &TriangleShape) -> Result<FloatPencil> {
    check_space(space, j)?;
    let idx = build_indexing(n)?;
    let geom = element_geometry(shape, n)?;
    let (fa, fb) = forms_for(j)?;
    let groups = constraint_groups(space, &idx);
    let build = |form: FormKind| {
        let loc = local_matrix(form, &geom);
        let local: Vec<Vec<f64>> = rows(&loc).iter().map(|r| r.iter().map(to_f64).collect()).collect();
        let m = assemble_local(&idx, space, &local).eliminate(&groups);
        DMatrix::from_row_slice(m.n, m.n, &m.data)
    };
    Ok(FloatPencil {
        a: build(fa),
        b: build(fb),
    })
}

impl AssembledPencil {
    pub fn to_f64(&self) -> FloatPencil {
        FloatPencil {
            a: self.a.to_f64(),
            b: self.b.to_f64(),
        }
    }

    /// Debug dump: numbering, constraints and both matrices as exact strings.
    pub fn debug_json(&self) -> Result<serde_json::Value> {
        let idx = build_indexing(self.n)?;
        let table = |m: &HashMap<(usize, usize), usize>| {
            MeshIndexing::sorted(m)
                .into_iter()
                .map(|((p, q), i)| serde_json::json!({"key": [p, q], "id": i}))
                .collect::<Vec<_>>()
        };
        Ok(serde_json::json!({
            "space": self.space,
            "j": self.j,
            "n": self.n,
            "shape": self.shape,
            "dim": self.dim,
            "vertices": table(&idx.vertex),
            "edges": table(&idx.edge),
            "faces": table(&idx.face),
            "orientation": idx.orientations(),
            "constraints": constraint_groups(self.space, &idx),
            "A": self.a,
            "B": self.b,
        }))
    }
}

/// Exact `xᵀAx / xᵀBx`.
pub fn rayleigh_quotient(pencil: &AssembledPencil, x: &[Rational]) -> Result<Rational> {
    if x.iter().all(Zero::is_zero) {
        return Err(Error::InvalidArgument("Rayleigh quotient of the zero vector".into()));
    }
    let den = pencil.b.quad_form(x)?;
    if den.is_zero() {
        return Err(Error::DivisionByZero("xᵀBx = 0".into()));
    }
    Ok(pencil.a.quad_form(x)? / den)
}
