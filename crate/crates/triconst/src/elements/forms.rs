//! The five local energy forms, written once over any [`Field`].
//!
//! Arguments follow the reference procedures: element area `s`, the shape
//! numbers `c1, c2, c3` (squared edge length over area), and the local
//! degrees of freedom.

use crate::symbolic::Field;

/// L² norm² of the α-interpolant from edge means `w` and element mean `u0`.
pub fn f_alpha_0<T: Field>(s: &T, c: [&T; 3], w: [&T; 3], u0: &T) -> T {
    let [c1, c2, c3] = c;
    let [w1, w2, w3] = w;
    let three = T::int(3);
    let v0 = three
        .mul(c2)
        .add(&three.mul(c3))
        .sub(c1)
        .mul(w1)
        .add(&three.mul(c3).add(&three.mul(c1)).sub(c2).mul(w2))
        .add(&three.mul(c1).add(&three.mul(c2)).sub(c3).mul(w3));
    let csum = c1.add(c2).add(c3);
    let m = w1.add(w2).add(w3).sub(&three.mul(u0));
    let sq_sum = c1.sq().add(&c2.sq()).add(&c3.sq());
    let t1 = T::int(8).mul(&sq_sum).mul(&m.sq()).div(&csum.sq());
    let t2 = T::int(2).mul(&m).mul(&v0).div(&csum);
    let t3 = T::int(5).mul(&w1.sq().add(&w2.sq()).add(&w3.sq()));
    s.div_int(15).mul(&t1.sub(&t2).add(&t3))
}

/// H¹ seminorm² of the α-interpolant.
pub fn f_alpha_1<T: Field>(_s: &T, c: [&T; 3], w: [&T; 3], u0: &T) -> T {
    let [c1, c2, c3] = c;
    let [w1, w2, w3] = w;
    let m = w1.add(w2).add(w3).sub(&T::int(3).mul(u0));
    let csum = c1.add(c2).add(c3);
    T::int(32)
        .mul(&m.sq())
        .div(&csum)
        .add(&c1.add(c2).sub(c3).mul(&w1.sub(w2).sq()))
        .add(&c2.add(c3).sub(c1).mul(&w2.sub(w3).sq()))
        .add(&c3.add(c1).sub(c2).mul(&w3.sub(w1).sq()))
        .div_int(2)
}

/// The rotated auxiliaries `(4w_k − (c_{k+1} − c_{k+2})(u_{k+1} − u_{k+2})) / c_k`.
fn flux_terms<T: Field>(c: [&T; 3], u: [&T; 3], w: [&T; 3]) -> [T; 3] {
    let g = |k: usize| {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        T::int(4)
            .mul(w[k])
            .sub(&c[i].sub(c[j]).mul(&u[i].sub(u[j])))
            .div(c[k])
    };
    [g(0), g(1), g(2)]
}

/// L² norm² of the β-interpolant from vertex values `u` and edge fluxes `w`.
pub fn f_beta_0<T: Field>(s: &T, c: [&T; 3], u: [&T; 3], w: [&T; 3]) -> T {
    let g = flux_terms(c, u, w);
    let v: Vec<T> = (0..3)
        .map(|k| {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            T::int(13).mul(u[k]).add(u[i]).add(u[j]).div_int(4).sub(&g[k])
        })
        .collect();
    let [u1, u2, u3] = u;
    let body = T::int(21)
        .mul(&u1.sq().add(&u2.sq()).add(&u3.sq()))
        .sub(&T::int(6).mul(&u1.mul(u2).add(&u2.mul(u3)).add(&u3.mul(u1))))
        .add(&T::int(6).mul(&v[0].sq().add(&v[1].sq()).add(&v[2].sq())))
        .add(&T::int(10).mul(&v[0].mul(&v[1]).add(&v[1].mul(&v[2])).add(&v[2].mul(&v[0]))));
    s.div_int(720).mul(&body)
}

/// H¹ seminorm² of the β-interpolant.
pub fn f_beta_1<T: Field>(_s: &T, c: [&T; 3], u: [&T; 3], w: [&T; 3]) -> T {
    let [c1, c2, c3] = c;
    let [u1, u2, u3] = u;
    let [w1, w2, w3] = w;
    u2.sub(u3)
        .sq()
        .add(&w1.sq())
        .div(c1)
        .add(&u3.sub(u1).sq().add(&w2.sq()).div(c2))
        .add(&u1.sub(u2).sq().add(&w3.sq()).div(c3))
        .div_int(3)
}

/// H² seminorm² of the β-interpolant.
pub fn f_beta_2<T: Field>(s: &T, c: [&T; 3], u: [&T; 3], w: [&T; 3]) -> T {
    let g = flux_terms(c, u, w);
    let v: Vec<T> = (0..3)
        .map(|k| {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            T::int(2).mul(u[k]).sub(u[i]).sub(u[j]).add(&g[k])
        })
        .collect();
    let lin = c[0].mul(&v[0]).add(&c[1].mul(&v[1])).add(&c[2].mul(&v[2]));
    let cross = v[0].mul(&v[1]).add(&v[1].mul(&v[2])).add(&v[2].mul(&v[0]));
    lin.sq().sub(&T::int(8).mul(&cross)).div(s).div_int(16)
}

/// Which local form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum FormKind {
    Alpha0,
    Alpha1,
    Beta0,
    Beta1,
    Beta2,
}

impl FormKind {
    pub fn dofs(self) -> usize {
        match self {
            FormKind::Alpha0 | FormKind::Alpha1 => 4,
            _ => 6,
        }
    }

    /// Evaluates the form; `dofs` is `(w1,w2,w3,u0)` for α and
    /// `(u1,u2,u3,w1,w2,w3)` for β.
    pub fn eval<T: Field>(self, s: &T, c: [&T; 3], dofs: &[T]) -> T {
        assert_eq!(dofs.len(), self.dofs(), "dof count");
        let d = |i: usize| &dofs[i];
        match self {
            FormKind::Alpha0 => f_alpha_0(s, c, [d(0), d(1), d(2)], d(3)),
            FormKind::Alpha1 => f_alpha_1(s, c, [d(0), d(1), d(2)], d(3)),
            FormKind::Beta0 => f_beta_0(s, c, [d(0), d(1), d(2)], [d(3), d(4), d(5)]),
            FormKind::Beta1 => f_beta_1(s, c, [d(0), d(1), d(2)], [d(3), d(4), d(5)]),
            FormKind::Beta2 => f_beta_2(s, c, [d(0), d(1), d(2)], [d(3), d(4), d(5)]),
        }
    }
}
