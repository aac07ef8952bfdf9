//! Structural sign certificates for "≥ 0 on the region" claims.
//!
//! A claim passes only if its syntax tree is a positive combination of
//! factors that are each provably nonnegative on the region: nonnegative
//! constants, variables with nonnegative ranges, even powers, and
//! subexpressions whose exact rational interval enclosure over the region box
//! is nonnegative (this is what certifies atoms such as `1 - a`, `1 - b^2` or
//! `1 - 100*b^2`). No floating point is involved.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use super::dsl::{Bound, Expr};
use crate::symbolic::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Unknown,
    NonNeg,
    Pos,
}

impl Sign {
    pub fn at_least_nonneg(self) -> bool {
        self >= Sign::NonNeg
    }
}

/// Closed interval with exact rational ends.
#[derive(Clone, Debug, PartialEq)]
pub struct RatInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RatInterval {
    fn point(q: Rational) -> Self {
        RatInterval { lo: q.clone(), hi: q }
    }

    fn add(&self, o: &Self) -> Self {
        RatInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn neg(&self) -> Self {
        RatInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        RatInterval {
            lo: c.iter().min().expect("four products").clone(),
            hi: c.iter().max().expect("four products").clone(),
        }
    }

    fn recip(&self) -> Option<Self> {
        if self.lo.is_positive() || self.hi.is_negative() {
            Some(RatInterval {
                lo: self.hi.recip(),
                hi: self.lo.recip(),
            })
        } else {
            None
        }
    }

    fn powi(&self, k: u32) -> Self {
        if k % 2 == 1 || !self.lo.is_negative() {
            return RatInterval {
                lo: num_traits::pow(self.lo.clone(), k as usize),
                hi: num_traits::pow(self.hi.clone(), k as usize),
            };
        }
        if !self.hi.is_positive() {
            return RatInterval {
                lo: num_traits::pow(self.hi.clone(), k as usize),
                hi: num_traits::pow(self.lo.clone(), k as usize),
            };
        }
        let m = self.lo.abs().max(self.hi.clone());
        RatInterval {
            lo: Rational::zero(),
            hi: num_traits::pow(m, k as usize),
        }
    }
}

/// Variable ranges and `let` bodies for sign analysis.
pub struct SignContext<'a> {
    pub ranges: &'a HashMap<String, (Bound, Bound)>,
    pub lets: &'a HashMap<String, Expr>,
}

impl SignContext<'_> {
    /// Exact interval enclosure over the closed region box, if every
    /// operation is defined there.
    pub fn enclose(&self, e: &Expr) -> Option<RatInterval> {
        Some(match e {
            Expr::Num(n) => RatInterval::point(Rational::from_integer(n.clone())),
            Expr::Ident(name) => {
                if let Some((lo, hi)) = self.ranges.get(name) {
                    RatInterval {
                        lo: lo.value.clone(),
                        hi: hi.value.clone(),
                    }
                } else {
                    self.enclose(self.lets.get(name)?)?
                }
            }
            Expr::Neg(x) => self.enclose(x)?.neg(),
            Expr::Add(x, y) => self.enclose(x)?.add(&self.enclose(y)?),
            Expr::Sub(x, y) => self.enclose(x)?.add(&self.enclose(y)?.neg()),
            Expr::Mul(x, y) => self.enclose(x)?.mul(&self.enclose(y)?),
            Expr::Div(x, y) => self.enclose(x)?.mul(&self.enclose(y)?.recip()?),
            Expr::Pow(x, k) => {
                let b = self.enclose(x)?;
                if *k >= 0 {
                    b.powi(*k as u32)
                } else {
                    b.recip()?.powi(k.unsigned_abs())
                }
            }
            Expr::Call(..) | Expr::List(_) => return None,
        })
    }

    fn var_sign(&self, name: &str) -> Option<Sign> {
        let (lo, _) = self.ranges.get(name)?;
        Some(if lo.value.is_positive() || (lo.value.is_zero() && lo.open) {
            Sign::Pos
        } else if lo.value.is_zero() {
            Sign::NonNeg
        } else {
            Sign::Unknown
        })
    }

    fn fallback(&self, e: &Expr) -> Sign {
        match self.enclose(e) {
            Some(iv) if iv.lo.is_positive() => Sign::Pos,
            Some(iv) if iv.lo.is_zero() => Sign::NonNeg,
            _ => Sign::Unknown,
        }
    }

    /// Certified sign of `e` on the region.
    pub fn sign(&self, e: &Expr) -> Sign {
        let s = match e {
            Expr::Num(n) => {
                if n.is_positive() {
                    Sign::Pos
                } else if n.is_zero() {
                    Sign::NonNeg
                } else {
                    Sign::Unknown
                }
            }
            Expr::Ident(name) => match self.var_sign(name) {
                Some(s) => s,
                None => match self.lets.get(name) {
                    Some(body) => self.sign(body),
                    None => Sign::Unknown,
                },
            },
            Expr::Add(x, y) => {
                let (sx, sy) = (self.sign(x), self.sign(y));
                if sx.at_least_nonneg() && sy.at_least_nonneg() {
                    sx.max(sy)
                } else {
                    Sign::Unknown
                }
            }
            Expr::Mul(x, y) => self.sign(x).min(self.sign(y)),
            Expr::Div(x, y) => {
                if self.sign(y) == Sign::Pos {
                    self.sign(x)
                } else {
                    Sign::Unknown
                }
            }
            Expr::Pow(x, k) => {
                let sb = self.sign(x);
                if *k == 0 {
                    Sign::Pos
                } else if *k < 0 {
                    if sb == Sign::Pos {
                        Sign::Pos
                    } else {
                        Sign::Unknown
                    }
                } else if k % 2 == 0 {
                    if sb == Sign::Pos {
                        Sign::Pos
                    } else {
                        Sign::NonNeg
                    }
                } else {
                    sb
                }
            }
            Expr::Neg(_) | Expr::Sub(..) | Expr::Call(..) | Expr::List(_) => Sign::Unknown,
        };
        if s == Sign::Pos {
            s
        } else {
            s.max(self.fallback(e))
        }
    }
}
