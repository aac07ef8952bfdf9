//! Two independent evaluators for manifest expressions: a symbolic one over
//! [`FormPoly`] (exact rational functions / quadratic forms) and a pointwise
//! one over exact rationals that re-expands `let` bindings at every use.

use std::collections::HashMap;

use num_traits::Zero;

use super::dsl::Expr;
use crate::elements::forms::FormKind;
use crate::error::{Error, Result};
use crate::geometry::l_ab;
use crate::symbolic::rational::Rational;
use crate::symbolic::{Field, FormPoly, Frac, Vars};

fn form_kind(name: &str) -> Option<FormKind> {
    Some(match name {
        "F_alpha_0" => FormKind::Alpha0,
        "F_alpha_1" => FormKind::Alpha1,
        "F_beta_0" => FormKind::Beta0,
        "F_beta_1" => FormKind::Beta1,
        "F_beta_2" => FormKind::Beta2,
        _ => return None,
    })
}

fn l_index(name: &str) -> Option<usize> {
    match name {
        "L1" => Some(1),
        "L2" => Some(2),
        "L3" => Some(3),
        "L4" => Some(4),
        _ => None,
    }
}

fn arity(name: &str, args: &[Expr], allowed: &[usize]) -> Result<()> {
    if allowed.contains(&args.len()) {
        Ok(())
    } else {
        Err(Error::Parse(format!("{name} takes {allowed:?} arguments, got {}", args.len())))
    }
}

fn ident_arg<'a>(e: &'a Expr, what: &str) -> Result<&'a str> {
    match e {
        Expr::Ident(s) => Ok(s),
        _ => Err(Error::Parse(format!("{what} must be a variable name"))),
    }
}

fn usize_arg(e: &Expr) -> Result<usize> {
    match e {
        Expr::Num(n) => usize::try_from(n).map_err(|_| Error::Parse("order too large".into())),
        _ => Err(Error::Parse("derivative order must be an integer literal".into())),
    }
}

/// `subs` arguments as (variable, value expression) pairs.
fn subs_pairs<'a>(vars: &'a Expr, vals: &'a Expr) -> Result<Vec<(&'a str, &'a Expr)>> {
    match (vars, vals) {
        (Expr::List(vs), Expr::List(xs)) => {
            if vs.len() != xs.len() {
                return Err(Error::Parse("subs lists differ in length".into()));
            }
            vs.iter()
                .zip(xs)
                .map(|(v, x)| Ok((ident_arg(v, "subs variable")?, x)))
                .collect()
        }
        (v, x) => Ok(vec![(ident_arg(v, "subs variable")?, x)]),
    }
}

/// Symbolic evaluation environment.
pub struct SymEnv {
    pub inner: Vars,
    pub outer: Vars,
    values: HashMap<String, FormPoly>,
}

impl SymEnv {
    pub fn new(inner: Vars, outer: Vars) -> Self {
        SymEnv {
            inner,
            outer,
            values: HashMap::new(),
        }
    }

    pub fn bind(&mut self, name: &str, value: FormPoly) {
        self.values.insert(name.to_string(), value);
    }

    fn is_var(&self, name: &str) -> bool {
        self.inner.index_of(name).is_ok() || self.outer.index_of(name).is_ok()
    }

    pub fn eval(&self, e: &Expr) -> Result<FormPoly> {
        Ok(match e {
            Expr::Num(n) => FormPoly::constant(Rational::from_integer(n.clone())),
            Expr::Ident(name) => {
                if let Some(v) = self.values.get(name) {
                    v.clone()
                } else if self.inner.index_of(name).is_ok() {
                    FormPoly::from_frac(Frac::var(&self.inner, name)?)
                } else if self.outer.index_of(name).is_ok() {
                    FormPoly::outer_var(&self.outer, name)?
                } else {
                    return Err(Error::UnknownVariable(name.clone()));
                }
            }
            Expr::Neg(x) => self.eval(x)?.neg(),
            Expr::Add(x, y) => self.eval(x)?.add(&self.eval(y)?),
            Expr::Sub(x, y) => self.eval(x)?.sub(&self.eval(y)?),
            Expr::Mul(x, y) => self.eval(x)?.mul(&self.eval(y)?),
            Expr::Div(x, y) => self.eval(x)?.try_div(&self.eval(y)?)?,
            Expr::Pow(x, k) => self.eval(x)?.try_pow(*k)?,
            Expr::Call(name, args) => self.call(name, args)?,
            Expr::List(_) => return Err(Error::Parse("list outside subs".into())),
        })
    }

    fn call(&self, name: &str, args: &[Expr]) -> Result<FormPoly> {
        match name {
            "diff" => {
                arity(name, args, &[2, 3])?;
                let v = ident_arg(&args[1], "diff variable")?;
                if !self.is_var(v) {
                    return Err(Error::UnknownVariable(v.to_string()));
                }
                let k = if args.len() == 3 { usize_arg(&args[2])? } else { 1 };
                let mut f = self.eval(&args[0])?;
                for _ in 0..k {
                    f = f.diff(v)?;
                }
                Ok(f)
            }
            "subs" => {
                arity(name, args, &[3])?;
                let mut f = self.eval(&args[0])?.with_outer(&self.outer);
                for (v, x) in subs_pairs(&args[1], &args[2])? {
                    let val = self.eval(x)?;
                    f = if self.outer.index_of(v).is_ok() {
                        f.subs_outer(v, &val)?
                    } else if self.inner.index_of(v).is_ok() {
                        let inner = val.as_frac().ok_or_else(|| {
                            Error::InvalidArgument(format!("value for inner `{v}` depends on outer variables"))
                        })?;
                        f.subs_inner(v, &inner)?
                    } else {
                        return Err(Error::UnknownVariable(v.to_string()));
                    };
                }
                Ok(f)
            }
            "int" => {
                arity(name, args, &[4])?;
                let v = ident_arg(&args[1], "integration variable")?;
                let f = self.eval(&args[0])?.with_outer(&self.outer);
                f.integrate(v, &self.eval(&args[2])?, &self.eval(&args[3])?)
            }
            _ => {
                if let Some(j) = l_index(name) {
                    arity(name, args, &[2])?;
                    let (a, b) = (self.eval(&args[0])?, self.eval(&args[1])?);
                    return checked_form(|| l_ab(j, &a, &b));
                }
                if let Some(kind) = form_kind(name) {
                    arity(name, args, &[4 + kind.dofs()])?;
                    let vals = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>>>()?;
                    return checked_form(|| kind.eval(&vals[0], [&vals[1], &vals[2], &vals[3]], &vals[4..]));
                }
                Err(Error::Parse(format!("unknown function `{name}`")))
            }
        }
    }
}

/// Runs a builtin whose generic arithmetic panics on exact division by zero.
fn checked_form(f: impl FnOnce() -> FormPoly) -> Result<FormPoly> {
    std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .map_err(|_| Error::DivisionByZero("inside a builtin form".into()))
}

/// A rational that may have hit a division by zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Pt(pub Option<Rational>);

impl Field for Pt {
    fn from_rational(q: &Rational) -> Self {
        Pt(Some(q.clone()))
    }
    fn add(&self, o: &Self) -> Self {
        Pt(self.0.as_ref().zip(o.0.as_ref()).map(|(x, y)| x + y))
    }
    fn sub(&self, o: &Self) -> Self {
        Pt(self.0.as_ref().zip(o.0.as_ref()).map(|(x, y)| x - y))
    }
    fn mul(&self, o: &Self) -> Self {
        Pt(self.0.as_ref().zip(o.0.as_ref()).map(|(x, y)| x * y))
    }
    fn div(&self, o: &Self) -> Self {
        Pt(self
            .0
            .as_ref()
            .zip(o.0.as_ref())
            .and_then(|(x, y)| (!y.is_zero()).then(|| x / y)))
    }
    fn neg(&self) -> Self {
        Pt(self.0.as_ref().map(|x| -x))
    }
}

/// Pointwise evaluation: variables are bound to rationals and `let`
/// bindings are expanded from their syntax at every use, so `subs` is
/// re-evaluation under a modified binding.
pub struct PointEnv<'a> {
    pub lets: &'a HashMap<String, Expr>,
}

impl PointEnv<'_> {
    pub fn eval(&self, e: &Expr, point: &HashMap<String, Rational>) -> Result<Pt> {
        Ok(match e {
            Expr::Num(n) => Pt(Some(Rational::from_integer(n.clone()))),
            Expr::Ident(name) => {
                if let Some(v) = point.get(name) {
                    Pt(Some(v.clone()))
                } else if let Some(body) = self.lets.get(name) {
                    self.eval(body, point)?
                } else {
                    return Err(Error::UnknownVariable(name.clone()));
                }
            }
            Expr::Neg(x) => self.eval(x, point)?.neg(),
            Expr::Add(x, y) => self.eval(x, point)?.add(&self.eval(y, point)?),
            Expr::Sub(x, y) => self.eval(x, point)?.sub(&self.eval(y, point)?),
            Expr::Mul(x, y) => self.eval(x, point)?.mul(&self.eval(y, point)?),
            Expr::Div(x, y) => self.eval(x, point)?.div(&self.eval(y, point)?),
            Expr::Pow(x, k) => {
                let b = self.eval(x, point)?;
                match b.0 {
                    None => Pt(None),
                    Some(v) if *k < 0 && v.is_zero() => Pt(None),
                    Some(v) => {
                        let p = num_traits::pow(v, k.unsigned_abs() as usize);
                        Pt(Some(if *k < 0 { p.recip() } else { p }))
                    }
                }
            }
            Expr::Call(name, args) => self.call(name, args, point)?,
            Expr::List(_) => return Err(Error::Parse("list outside subs".into())),
        })
    }

    fn call(&self, name: &str, args: &[Expr], point: &HashMap<String, Rational>) -> Result<Pt> {
        match name {
            "subs" => {
                arity(name, args, &[3])?;
                let mut inner = point.clone();
                for (v, x) in subs_pairs(&args[1], &args[2])? {
                    match self.eval(x, &inner)?.0 {
                        Some(val) => {
                            inner.insert(v.to_string(), val);
                        }
                        None => return Ok(Pt(None)),
                    }
                }
                self.eval(&args[0], &inner)
            }
            "diff" | "int" => Err(Error::InvalidArgument(format!("`{name}` has no pointwise evaluation"))),
            _ => {
                let vals = args.iter().map(|a| self.eval(a, point)).collect::<Result<Vec<_>>>()?;
                if let Some(j) = l_index(name) {
                    arity(name, args, &[2])?;
                    return Ok(l_ab(j, &vals[0], &vals[1]));
                }
                if let Some(kind) = form_kind(name) {
                    arity(name, args, &[4 + kind.dofs()])?;
                    return Ok(kind.eval(&vals[0], [&vals[1], &vals[2], &vals[3]], &vals[4..]));
                }
                Err(Error::Parse(format!("unknown function `{name}`")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::dsl::parse_expr;
    use crate::symbolic::rational::{int, rat};

    #[test]
    fn symbolic_and_pointwise_agree() {
        let env = SymEnv::new(Vars::new(&["a", "b"]), Vars::empty());
        let e = parse_expr("diff(b^2/(a^2 + b^2), a) + 2*a*b^2/(a^2 + b^2)^2").unwrap();
        assert!(env.eval(&e).unwrap().is_zero());
        let lets = HashMap::new();
        let p = PointEnv { lets: &lets };
        let e = parse_expr("subs(L1(a, b), b, 1)").unwrap();
        let mut pt = HashMap::new();
        pt.insert("a".to_string(), int(0));
        assert_eq!(p.eval(&e, &pt).unwrap(), Pt(Some(rat(25, 224))));
        let sym = env.eval(&parse_expr("subs(L1(a, b), {a, b}, {0, 1})").unwrap()).unwrap();
        assert_eq!(sym.eval(&[int(5), int(5)], &[]).unwrap(), rat(25, 224));
        assert_eq!(p.eval(&parse_expr("1/(a - a)").unwrap(), &pt).unwrap(), Pt(None));
    }

    #[test]
    fn integrals_over_outer_variables() {
        let env = SymEnv::new(Vars::new(&["h"]), Vars::new(&["t1", "t2"]));
        // 2∫∫ over the unit triangle of 1 = 1.
        let e = parse_expr("2*int(int(h/h, t1, 0, 1 - t2), t2, 0, 1)").unwrap();
        let v = env.eval(&e).unwrap();
        assert_eq!(v.eval(&[int(3)], &[int(0), int(0)]).unwrap(), int(1));
    }
}
