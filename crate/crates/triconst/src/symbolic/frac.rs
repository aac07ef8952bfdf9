//! Factored rational functions.
//!
//! A [`Frac`] is `scalar · x^mono · Π fᵢ^eᵢ` with integer polynomials `fᵢ`
//! (primitive, positive leading coefficient, free of monomial content) and
//! signed exponents. Products and quotients only merge exponent lists, so
//! shared factors cancel syntactically; only sums expand, and then only the
//! parts that the two operands do not share.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;
use super::vars::Vars;
use super::zpoly::{self, ZPoly, MAX_VARS};
use crate::error::{Error, Result};

type Factor = (Arc<ZPoly>, i32);

#[derive(Clone, Debug)]
pub struct Frac {
    vars: Vars,
    scalar: Rational,
    mono: [i32; MAX_VARS],
    factors: Vec<Factor>,
}

impl Frac {
    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Frac {
            vars: Vars::empty(),
            scalar: c,
            mono: [0; MAX_VARS],
            factors: Vec::new(),
        }
    }

    pub fn var(vars: &Vars, name: &str) -> Result<Self> {
        let i = vars.index_of(name)?;
        let mut mono = [0; MAX_VARS];
        mono[i] = 1;
        Ok(Frac {
            vars: vars.clone(),
            scalar: Rational::one(),
            mono,
            factors: Vec::new(),
        })
    }

    /// Wraps an integer polynomial scaled by a rational.
    pub fn from_zpoly(vars: &Vars, scalar: Rational, p: ZPoly) -> Self {
        assert!(vars.len() <= MAX_VARS, "too many variables");
        let mut f = Frac {
            vars: vars.clone(),
            scalar,
            mono: [0; MAX_VARS],
            factors: Vec::new(),
        };
        f.absorb(p, 1);
        f
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    /// The value when it is a constant (no variable dependence after
    /// syntactic cancellation).
    pub fn as_constant(&self) -> Option<&Rational> {
        (self.is_zero() || (self.mono.iter().all(|&e| e == 0) && self.factors.is_empty()))
            .then_some(&self.scalar)
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    /// Total number of terms across stored factors (a size measure).
    pub fn size(&self) -> usize {
        self.factors.iter().map(|(f, _)| f.len()).sum()
    }

    /// Multiplies by `p^e`, normalizing `p` into content, monomial and a
    /// primitive factor.
    fn absorb(&mut self, p: ZPoly, e: i32) {
        if e == 0 {
            return;
        }
        if p.is_zero() {
            assert!(e > 0, "division by the zero polynomial");
            *self = Frac::zero();
            return;
        }
        let n = self.vars.len();
        let c = p.content();
        let mut p = if c.is_one() { p } else { p.div_exact_scalar(&c) };
        self.scalar *= pow_rational(&Rational::from_integer(c), e);
        let m = p.monomial_content(n);
        if m.iter().any(|&x| x > 0) {
            p = p.unshift_by(zpoly::pack(&m));
            for (slot, x) in self.mono.iter_mut().zip(&m) {
                *slot += *x as i32 * e;
            }
        }
        if p.is_constant() {
            // Primitive with positive leading coefficient: the constant is 1.
            return;
        }
        self.push_factor(Arc::new(p), e);
    }

    fn push_factor(&mut self, p: Arc<ZPoly>, e: i32) {
        match self.factors.binary_search_by(|(f, _)| f.as_ref().cmp(&p)) {
            Ok(i) => {
                self.factors[i].1 += e;
                if self.factors[i].1 == 0 {
                    self.factors.remove(i);
                }
            }
            Err(i) => self.factors.insert(i, (p, e)),
        }
    }

    fn with_vars(mut self, vars: &Vars) -> Self {
        self.vars = vars.clone();
        self
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        r.scalar = -r.scalar;
        r
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Frac::zero().with_vars(&self.vars);
        }
        let mut r = self.clone();
        r.scalar *= c;
        r
    }

    pub fn mul(&self, other: &Self) -> Self {
        let vars = self.vars.join(&other.vars);
        if self.is_zero() || other.is_zero() {
            return Frac::zero().with_vars(&vars);
        }
        let (big, small) = if self.factors.len() >= other.factors.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut r = big.clone();
        r.vars = vars;
        r.scalar *= &small.scalar;
        for (a, b) in r.mono.iter_mut().zip(small.mono.iter()) {
            *a += b;
        }
        for (f, e) in &small.factors {
            r.push_factor(f.clone(), *e);
        }
        r
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("reciprocal of zero".into()));
        }
        let mut r = self.clone();
        r.scalar = r.scalar.recip();
        r.mono.iter_mut().for_each(|e| *e = -*e);
        r.factors.iter_mut().for_each(|(_, e)| *e = -*e);
        Ok(r)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn try_pow(&self, k: i32) -> Result<Self> {
        if k < 0 {
            return self.recip()?.try_pow(-k);
        }
        if self.is_zero() {
            return Ok(if k == 0 { Frac::one().with_vars(&self.vars) } else { self.clone() });
        }
        let mut r = self.clone();
        r.scalar = pow_rational(&self.scalar, k);
        r.mono.iter_mut().for_each(|e| *e *= k);
        if k == 0 {
            r.factors.clear();
        } else {
            r.factors.iter_mut().for_each(|(_, e)| *e *= k);
        }
        Ok(r)
    }

    pub fn add(&self, other: &Self) -> Self {
        let vars = self.vars.join(&other.vars);
        if self.is_zero() {
            return other.clone().with_vars(&vars);
        }
        if other.is_zero() {
            return self.clone().with_vars(&vars);
        }
        // Common part G: minimum exponent of every monomial variable and factor.
        let mut g = Frac {
            vars: vars.clone(),
            scalar: rational_gcd(&self.scalar, &other.scalar),
            mono: [0; MAX_VARS],
            factors: Vec::new(),
        };
        let mut mx = [0u32; MAX_VARS];
        let mut my = [0u32; MAX_VARS];
        for i in 0..MAX_VARS {
            let m = self.mono[i].min(other.mono[i]);
            g.mono[i] = m;
            mx[i] = (self.mono[i] - m) as u32;
            my[i] = (other.mono[i] - m) as u32;
        }
        let mut rest_x: Vec<(&ZPoly, u32)> = Vec::new();
        let mut rest_y: Vec<(&ZPoly, u32)> = Vec::new();
        let (xs, ys) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        while i < xs.len() || j < ys.len() {
            let ord = if i == xs.len() {
                std::cmp::Ordering::Greater
            } else if j == ys.len() {
                std::cmp::Ordering::Less
            } else {
                xs[i].0.as_ref().cmp(ys[j].0.as_ref())
            };
            match ord {
                std::cmp::Ordering::Less => {
                    let (f, e) = &xs[i];
                    let m = (*e).min(0);
                    if m != 0 {
                        g.factors.push((f.clone(), m));
                    }
                    if e - m > 0 {
                        rest_x.push((f, (e - m) as u32));
                    }
                    if m < 0 {
                        rest_y.push((f, (-m) as u32));
                    }
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    let (f, e) = &ys[j];
                    let m = (*e).min(0);
                    if m != 0 {
                        g.factors.push((f.clone(), m));
                    }
                    if e - m > 0 {
                        rest_y.push((f, (e - m) as u32));
                    }
                    if m < 0 {
                        rest_x.push((f, (-m) as u32));
                    }
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let (f, ex) = &xs[i];
                    let ey = ys[j].1;
                    let m = (*ex).min(ey);
                    g.factors.push((f.clone(), m));
                    if ex - m > 0 {
                        rest_x.push((f, (ex - m) as u32));
                    }
                    if ey - m > 0 {
                        rest_y.push((f, (ey - m) as u32));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        let sx = (&self.scalar / &g.scalar).to_integer();
        let sy = (&other.scalar / &g.scalar).to_integer();
        let px = expand_product(&mx, &rest_x).scale(&sx);
        let py = expand_product(&my, &rest_y).scale(&sy);
        let sum = px.add(&py);
        if sum.is_zero() {
            return Frac::zero().with_vars(&vars);
        }
        g.absorb(sum, 1);
        g
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Numerator and denominator as expanded integer polynomials with a
    /// rational scale: `self = scale · num / den`.
    pub fn expand(&self) -> (Rational, ZPoly, ZPoly) {
        let mut mn = [0u32; MAX_VARS];
        let mut md = [0u32; MAX_VARS];
        for i in 0..MAX_VARS {
            if self.mono[i] >= 0 {
                mn[i] = self.mono[i] as u32;
            } else {
                md[i] = (-self.mono[i]) as u32;
            }
        }
        let num: Vec<(&ZPoly, u32)> = self
            .factors
            .iter()
            .filter(|(_, e)| *e > 0)
            .map(|(f, e)| (f.as_ref(), *e as u32))
            .collect();
        let den: Vec<(&ZPoly, u32)> = self
            .factors
            .iter()
            .filter(|(_, e)| *e < 0)
            .map(|(f, e)| (f.as_ref(), (-e) as u32))
            .collect();
        if self.is_zero() {
            return (Rational::zero(), ZPoly::zero(), ZPoly::one());
        }
        (self.scalar.clone(), expand_product(&mn, &num), expand_product(&md, &den))
    }

    /// True when no factor or monomial variable carries a negative exponent.
    pub fn is_polynomial(&self) -> bool {
        self.mono.iter().all(|&e| e >= 0) && self.factors.iter().all(|(_, e)| *e > 0)
    }

    pub fn depends_on(&self, i: usize) -> bool {
        !self.is_zero() && (self.mono[i] != 0 || self.factors.iter().any(|(f, _)| f.depends_on(i)))
    }

    /// Partial derivative with respect to variable `name`.
    pub fn diff(&self, name: &str) -> Result<Self> {
        let i = self.vars.index_of(name)?;
        Ok(self.diff_index(i))
    }

    pub fn diff_index(&self, i: usize) -> Self {
        if !self.depends_on(i) {
            return Frac::zero().with_vars(&self.vars);
        }
        // f = s·x^m·Π fₖ^eₖ  ⇒  f' = s·x^(m−e_i)·Π_{dep} fₖ^(eₖ−1)·Π_{indep} fₖ^eₖ · N
        // with N = mᵢ·Π_{dep} fₖ + xᵢ·Σ eₖ fₖ' Π_{j≠k} fⱼ.
        let dep: Vec<&Factor> = self.factors.iter().filter(|(f, _)| f.depends_on(i)).collect();
        let n_dep = dep.len();
        // Prefix/suffix products avoid quadratic re-expansion.
        let mut prefix = vec![ZPoly::one()];
        for (f, _) in &dep {
            let next = prefix.last().unwrap().mul(f);
            prefix.push(next);
        }
        let mut suffix = vec![ZPoly::one(); n_dep + 1];
        for k in (0..n_dep).rev() {
            suffix[k] = suffix[k + 1].mul(&dep[k].0);
        }
        let mut n = prefix[n_dep].scale(&BigInt::from(self.mono[i]));
        let mut tail = ZPoly::zero();
        for (k, (f, e)) in dep.iter().enumerate() {
            let term = f.derivative(i).mul(&prefix[k]).mul(&suffix[k + 1]).scale(&BigInt::from(*e));
            tail = tail.add(&term);
        }
        n = n.add(&tail.shift_by(zpoly::unit(i)));
        let mut r = self.clone();
        r.mono[i] -= 1;
        for (f, e) in &dep {
            r.push_factor((*f).clone(), -1);
            let _ = e;
        }
        if n.is_zero() {
            return Frac::zero().with_vars(&self.vars);
        }
        r.absorb(n, 1);
        r
    }

    /// Substitutes variable `name` by `value` (a Frac over the same universe
    /// or a constant).
    pub fn subs(&self, name: &str, value: &Frac) -> Result<Self> {
        let i = self.vars.index_of(name)?;
        let vars = self.vars.join(&value.vars);
        if !self.depends_on(i) {
            return Ok(self.clone());
        }
        // value = s · N / Dn, written with integers: (p·N) / (q·Dn).
        let (s, vn, vd) = value.expand();
        let pn = vn.scale(s.numer());
        let qd = vd.scale(s.denom());
        let mut r = Frac {
            vars: vars.clone(),
            scalar: self.scalar.clone(),
            mono: self.mono,
            factors: Vec::new(),
        };
        r.mono[i] = 0;
        let v_frac = value.clone().with_vars(&vars);
        r = r.mul(&v_frac.try_pow(self.mono[i])?);
        for (f, e) in &self.factors {
            if !f.depends_on(i) {
                r.push_factor(f.clone(), *e);
                continue;
            }
            let coeffs = f.coefficients_in(i);
            let d = coeffs.len() - 1;
            // Σ cⱼ (pN)^j (qD)^(d−j), times (qD)^(−d).
            let mut acc = ZPoly::zero();
            let mut pn_pow = ZPoly::one();
            let qd_pows = powers_of(&qd, d);
            for (j, c) in coeffs.iter().enumerate() {
                if !c.is_zero() {
                    acc = acc.add(&c.mul(&pn_pow).mul(&qd_pows[d - j]));
                }
                if j < d {
                    pn_pow = pn_pow.mul(&pn);
                }
            }
            if acc.is_zero() {
                if *e < 0 {
                    return Err(Error::DivisionByZero(format!("substituting {name}")));
                }
                return Ok(Frac::zero().with_vars(&vars));
            }
            let mut part = Frac::from_zpoly(&vars, Rational::one(), acc);
            let den = Frac::from_zpoly(&vars, Rational::one(), qd.clone());
            part = part.try_div(&den.try_pow(d as i32)?)?;
            r = r.mul(&part.try_pow(*e)?);
        }
        Ok(r)
    }

    /// Exact value at a point given in universe order.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if self.is_zero() {
            return Ok(Rational::zero());
        }
        let mut v = self.scalar.clone();
        for (i, &e) in self.mono.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let x = point
                .get(i)
                .ok_or_else(|| Error::InvalidArgument("evaluation point too short".into()))?;
            if x.is_zero() && e < 0 {
                return Err(Error::DivisionByZero(format!("variable {} is zero", i)));
            }
            v *= pow_rational(x, e);
        }
        for (f, e) in &self.factors {
            let fv = f.eval(point);
            if fv.is_zero() {
                if *e < 0 {
                    return Err(Error::DivisionByZero("denominator vanishes".into()));
                }
                return Ok(Rational::zero());
            }
            v *= pow_rational(&fv, *e);
        }
        Ok(v)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut v = super::rational::to_f64(&self.scalar);
        for (i, &e) in self.mono.iter().enumerate() {
            if e != 0 {
                v *= point[i].powi(e);
            }
        }
        for (f, e) in &self.factors {
            v *= f.eval_f64(point).powi(*e);
        }
        v
    }

    /// Stored factors with their exponents.
    pub fn factors(&self) -> impl Iterator<Item = (&ZPoly, i32)> {
        self.factors.iter().map(|(f, e)| (f.as_ref(), *e))
    }

    pub fn scalar(&self) -> &Rational {
        &self.scalar
    }

    pub fn monomial_exponents(&self) -> &[i32] {
        &self.mono[..self.vars.len().max(1).min(MAX_VARS)]
    }
}

fn powers_of(p: &ZPoly, d: usize) -> Vec<ZPoly> {
    let mut out = vec![ZPoly::one()];
    for k in 0..d {
        let next = out[k].mul(p);
        out.push(next);
    }
    out
}

/// Expands `x^mono · Π fᵢ^eᵢ`, multiplying small pieces first.
fn expand_product(mono: &[u32; MAX_VARS], parts: &[(&ZPoly, u32)]) -> ZPoly {
    let mut pieces: Vec<ZPoly> = parts.iter().map(|(f, e)| f.pow(*e)).collect();
    let key = zpoly::pack(mono);
    if pieces.is_empty() {
        return ZPoly::monomial(key, BigInt::one());
    }
    while pieces.len() > 1 {
        pieces.sort_by_key(|p| std::cmp::Reverse(p.len()));
        let a = pieces.pop().unwrap();
        let b = pieces.pop().unwrap();
        pieces.push(a.mul(&b));
    }
    pieces.pop().unwrap().shift_by(key)
}

fn pow_rational(x: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// gcd of two nonzero rationals: gcd(numerators) / lcm(denominators).
fn rational_gcd(x: &Rational, y: &Rational) -> Rational {
    let n = x.numer().gcd(y.numer());
    let d = x.denom().lcm(y.denom());
    let g = Rational::new(n, d);
    if g.is_negative() {
        -g
    } else {
        g
    }
}

impl PartialEq for Frac {
    /// Structural-free equality: the difference is zero.
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}
