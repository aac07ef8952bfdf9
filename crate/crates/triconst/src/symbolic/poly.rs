//! Multivariate polynomials with rational coefficients over named variables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use super::rational::Rational;
use super::vars::Vars;
use crate::error::{Error, Result};

/// Sparse polynomial; the exponent vector of every term has one entry per
/// variable of `vars`, and no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vars,
    terms: BTreeMap<Vec<u32>, Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

impl MultiPoly {
    pub fn zero(vars: &Vars) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn var(vars: &Vars, name: &str) -> Result<Self> {
        let i = vars.index_of(name)?;
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Ok(Self::monomial(vars, e, Rational::one()))
    }

    pub fn monomial(vars: &Vars, exps: Vec<u32>, c: Rational) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                *old += c;
                if old.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Re-expresses the polynomial over a larger variable list containing
    /// all of its variables.
    pub fn lift(&self, target: &Vars) -> Result<Self> {
        if self.vars.same(target) {
            return Ok(self.clone());
        }
        let map: Vec<usize> = self
            .vars
            .names()
            .iter()
            .map(|n| target.index_of(n))
            .collect::<Result<_>>()?;
        let mut p = Self::zero(target);
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (i, &x) in e.iter().enumerate() {
                ne[map[i]] = x;
            }
            p.add_term(ne, c.clone());
        }
        Ok(p)
    }

    /// The variable list covering both operands (names of `self` first).
    pub fn unify(&self, other: &Self) -> Vars {
        if self.vars.same(&other.vars) {
            return self.vars.clone();
        }
        let mut names: Vec<String> = self.vars.names().to_vec();
        for n in other.vars.names() {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
        Vars::new(&names)
    }

    /// Exact sum, difference or product; operands over different variable
    /// lists are unified by name.
    pub fn arith(&self, other: &Self, op: PolyOp) -> Self {
        let vars = self.unify(other);
        let p = self.lift(&vars).expect("unified universe covers operand");
        let q = other.lift(&vars).expect("unified universe covers operand");
        match op {
            PolyOp::Add => {
                let mut r = p;
                for (e, c) in q.terms {
                    r.add_term(e, c);
                }
                r
            }
            PolyOp::Sub => {
                let mut r = p;
                for (e, c) in q.terms {
                    r.add_term(e, -c);
                }
                r
            }
            PolyOp::Mul => {
                let mut acc: HashMap<Vec<u32>, Rational> = HashMap::new();
                for (ea, ca) in &p.terms {
                    for (eb, cb) in &q.terms {
                        let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                        *acc.entry(e).or_insert_with(Rational::zero) += ca * cb;
                    }
                }
                Self::from_terms(&vars, acc)
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.arith(o, PolyOp::Add)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.arith(o, PolyOp::Sub)
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.arith(o, PolyOp::Mul)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-Rational::one()))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::constant(&self.vars, Rational::one());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// `order`-th partial derivative in `var`.
    pub fn diff(&self, var: &str, order: u32) -> Result<Self> {
        let i = self.vars.index_of(var)?;
        let mut p = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] < order {
                continue;
            }
            let falling: u64 = (0..order).map(|k| (e[i] - k) as u64).product();
            let mut ne = e.clone();
            ne[i] -= order;
            p.add_term(ne, c * Rational::from_integer(falling.into()));
        }
        Ok(p)
    }

    /// Exact value; every variable must be assigned.
    pub fn eval(&self, assignment: &HashMap<String, Rational>) -> Result<Rational> {
        let point: Vec<Rational> = self
            .vars
            .names()
            .iter()
            .map(|n| {
                assignment
                    .get(n)
                    .cloned()
                    .ok_or_else(|| Error::UnknownVariable(n.clone()))
            })
            .collect::<Result<_>>()?;
        Ok(self.eval_point(&point))
    }

    /// Exact value at a point given in variable order.
    pub fn eval_point(&self, point: &[Rational]) -> Rational {
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += t;
        }
        total
    }

    /// Substitutes each listed variable by a polynomial (simultaneously).
    pub fn compose(&self, subs: &[(&str, &MultiPoly)]) -> Result<Self> {
        let mut target = self.vars.clone();
        for (_, q) in subs {
            let probe = MultiPoly::zero(&target);
            target = probe.unify(q);
        }
        let idx: Vec<Option<&MultiPoly>> = self
            .vars
            .names()
            .iter()
            .map(|n| subs.iter().find(|(m, _)| *m == n.as_str()).map(|(_, q)| *q))
            .collect();
        for (m, _) in subs {
            self.vars.index_of(m)?;
        }
        let mut cache: HashMap<(usize, u32), MultiPoly> = HashMap::new();
        let mut out = MultiPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let factor = match idx[i] {
                    Some(q) => cache
                        .entry((i, k))
                        .or_insert_with(|| q.lift(&target).expect("covered").pow(k))
                        .clone(),
                    None => {
                        let mut ee = vec![0; target.len()];
                        ee[target.index_of(&self.vars.names()[i])?] = k;
                        MultiPoly::monomial(&target, ee, Rational::one())
                    }
                };
                t = t.mul(&factor);
            }
            out = out.add(&t);
        }
        Ok(out)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (n, &k) in self.vars.names().iter().zip(e) {
                match k {
                    0 => {}
                    1 => write!(f, "*{n}")?,
                    _ => write!(f, "*{n}^{k}")?,
                }
            }
        }
        Ok(())
    }
}
