//! Executes manifest blocks: exact expansion of every `check`, coefficient
//! comparison for `hessian`, structural sign certificates plus a float scan
//! for positivity claims, and independent exact random-point evaluation.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_traits::Zero;
use serde::Serialize;

use super::dsl::{Bound, Expr, LemmaBlock, StmtKind};
use super::eval::{PointEnv, SymEnv};
use super::positivity::{Sign, SignContext};
use crate::error::{Error, Result};
use crate::symbolic::rational::{format_rational, to_f64, Rational};
use crate::symbolic::sz::PointSampler;
use crate::symbolic::{FormPoly, Vars};

/// Grid resolution of the float positivity scan (per axis).
pub const SCAN_GRID: usize = 200;

/// Outcome of one manifest statement.
#[derive(Clone, Debug, Serialize)]
pub struct StmtOutcome {
    pub line: usize,
    pub kind: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of one manifest block.
#[derive(Clone, Debug, Serialize)]
pub struct BlockOutcome {
    pub id: String,
    pub identities: usize,
    pub hessian_entries: usize,
    pub positivity_claims: usize,
    pub random_point_checks: usize,
    pub outcomes: Vec<StmtOutcome>,
    pub seconds: f64,
}

impl BlockOutcome {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn uses_hessian(&self) -> bool {
        self.hessian_entries > 0
    }
}

struct Runner {
    sym: SymEnv,
    lets: HashMap<String, Expr>,
    ranges: HashMap<String, (Bound, Bound)>,
    sampler: PointSampler,
}

impl Runner {
    fn var_names(&self) -> Vec<String> {
        self.sym
            .inner
            .names()
            .iter()
            .chain(self.sym.outer.names().iter())
            .cloned()
            .collect()
    }

    /// Exact evaluation of `lhs − rhs` at a random rational point through the
    /// let-expanding evaluator. `None` when the expressions need symbolic
    /// operations or every sampled point hit a pole.
    fn random_point_residual(&mut self, lhs: &Expr, rhs: &Expr) -> Result<Option<(Vec<(String, Rational)>, Rational)>> {
        let names = self.var_names();
        let env = PointEnv { lets: &self.lets };
        for _ in 0..8 {
            let point: HashMap<String, Rational> =
                names.iter().map(|n| (n.clone(), self.sampler.rational())).collect();
            let l = match env.eval(lhs, &point) {
                Ok(v) => v,
                Err(Error::InvalidArgument(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let r = env.eval(rhs, &point)?;
            if let (Some(l), Some(r)) = (l.0, r.0) {
                let mut pt: Vec<_> = point.into_iter().collect();
                pt.sort();
                return Ok(Some((pt, l - r)));
            }
        }
        Ok(None)
    }

    fn describe_point(pt: &[(String, Rational)]) -> String {
        pt.iter()
            .map(|(n, v)| format!("{n}={}", format_rational(v)))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Nonzero residual at some point, for failure reports.
    fn witness(&mut self, diff: &FormPoly) -> String {
        let ni = self.sym.inner.len();
        let no = self.sym.outer.len();
        for _ in 0..8 {
            let inner = self.sampler.point(ni);
            let outer = self.sampler.point(no);
            if let Ok(v) = diff.eval(&inner, &outer) {
                if !v.is_zero() {
                    let names = self.var_names();
                    let pt: Vec<_> = names.into_iter().zip(inner.into_iter().chain(outer)).collect();
                    return format!("residual {} at ({})", format_rational(&v), Self::describe_point(&pt));
                }
            }
        }
        format!("residual has {} nonzero coefficients", diff.term_count())
    }

    fn check(&mut self, lhs: &Expr, rhs: &Expr, out: &mut BlockOutcome) -> Result<StmtOutcome> {
        let d = self.sym.eval(lhs)?.sub(&self.sym.eval(rhs)?);
        let exact = d.is_zero();
        let mut detail = if exact {
            "difference expands to zero".to_string()
        } else {
            self.witness(&d)
        };
        let mut passed = exact;
        if let Some((pt, r)) = self.random_point_residual(lhs, rhs)? {
            out.random_point_checks += 1;
            if !r.is_zero() {
                passed = false;
                detail = format!(
                    "{detail}; random-point residual {} at ({})",
                    format_rational(&r),
                    Self::describe_point(&pt)
                );
            }
        }
        out.identities += 1;
        Ok(StmtOutcome {
            line: 0,
            kind: "check",
            passed,
            detail,
        })
    }

    fn hessian(&mut self, lhs: &Expr, rhs: &Expr, out: &mut BlockOutcome) -> Result<StmtOutcome> {
        let h = self.sym.eval(lhs)?;
        let h2 = self.sym.eval(rhs)?;
        let n = self.sym.outer.len();
        let coeffs = |f: &FormPoly| -> BTreeMap<Vec<u32>, crate::symbolic::Frac> {
            f.terms().map(|(k, c)| (k, c.clone())).collect()
        };
        let (ch, ch2) = (coeffs(&h), coeffs(&h2));
        let mut failures = Vec::new();
        // Homogeneity: no constant, linear or higher-than-quadratic parts.
        for (k, _) in ch.iter().chain(ch2.iter()) {
            let deg: u32 = k.iter().sum();
            if deg != 2 {
                failures.push(format!("term of degree {deg} present"));
                break;
            }
        }
        let mut entries = 0;
        let mut max_terms = 0;
        for p in 0..n {
            for q in p..n {
                let mut key = vec![0u32; n];
                key[p] += 1;
                key[q] += 1;
                let zero = crate::symbolic::Frac::zero();
                let a = ch.get(&key).unwrap_or(&zero);
                let b = ch2.get(&key).unwrap_or(&zero);
                let d = a.sub(b);
                max_terms = max_terms.max(a.size()).max(b.size());
                entries += 1;
                if !d.is_zero() {
                    let names = self.sym.outer.names();
                    failures.push(format!("entry ({}, {}) differs", names[p], names[q]));
                }
            }
        }
        out.hessian_entries += entries;
        let mut passed = failures.is_empty();
        let mut detail = if passed {
            format!("{entries} second-derivative identities expand to zero (largest coefficient size {max_terms})")
        } else {
            failures.join("; ")
        };
        if let Some((_, r)) = self.random_point_residual(lhs, rhs)? {
            out.random_point_checks += 1;
            if !r.is_zero() {
                passed = false;
                detail = format!("{detail}; random-point residual {}", format_rational(&r));
            }
        }
        Ok(StmtOutcome {
            line: 0,
            kind: "hessian",
            passed,
            detail,
        })
    }

    /// Float scan over an a×b grid (other ranged variables at their midpoints).
    fn scan(&self, value: &FormPoly, strict: bool) -> std::result::Result<usize, String> {
        let frac = value
            .as_frac()
            .ok_or_else(|| "positivity claim depends on outer variables".to_string())?;
        let names = self.sym.inner.names();
        let mid = |n: &str| -> f64 {
            self.ranges
                .get(n)
                .map_or(0.5, |(lo, hi)| (to_f64(&lo.value) + to_f64(&hi.value)) / 2.0)
        };
        let axis = |n: &str, i: usize| -> f64 {
            let (lo, hi) = self.ranges.get(n).map_or((0.0, 1.0), |(lo, hi)| (to_f64(&lo.value), to_f64(&hi.value)));
            let is_open = self.ranges.get(n).is_some_and(|(l, _)| l.open);
            let t = if is_open {
                (i + 1) as f64 / SCAN_GRID as f64
            } else {
                i as f64 / (SCAN_GRID - 1) as f64
            };
            lo + (hi - lo) * t
        };
        let mut count = 0;
        for i in 0..SCAN_GRID {
            for k in 0..SCAN_GRID {
                let point: Vec<f64> = names
                    .iter()
                    .map(|n| match n.as_str() {
                        "a" => axis("a", i),
                        "b" => axis("b", k),
                        other => mid(other),
                    })
                    .collect();
                let v = frac.eval_f64(&point);
                let bad = v.is_nan() || if strict { v <= 0.0 } else { v < -1e-9 * (1.0 + v.abs()) };
                if bad {
                    return Err(format!("float scan found value {v:e} at {point:?}"));
                }
                count += 1;
            }
        }
        Ok(count)
    }

    fn positivity(&mut self, e: &Expr, strict: bool, out: &mut BlockOutcome) -> Result<StmtOutcome> {
        let ctx = SignContext {
            ranges: &self.ranges,
            lets: &self.lets,
        };
        let sign = ctx.sign(e);
        let need = if strict { Sign::Pos } else { Sign::NonNeg };
        let value = self.sym.eval(e)?;
        let scan = self.scan(&value, strict);
        out.positivity_claims += 1;
        let structural = sign >= need;
        let detail = match (&scan, structural) {
            (Ok(n), true) => format!("structurally {sign:?}; float scan of {n} points clean"),
            (Ok(_), false) => format!("no structural certificate (got {sign:?})"),
            (Err(msg), _) => msg.clone(),
        };
        Ok(StmtOutcome {
            line: 0,
            kind: if strict { "positive" } else { "nonneg" },
            passed: structural && scan.is_ok(),
            detail,
        })
    }
}

/// Replaces references to earlier bindings by their bodies, so that later
/// rebinding of a name does not change what an earlier `let` meant.
fn inline_lets(e: &Expr, lets: &HashMap<String, Expr>) -> Expr {
    let rec = |x: &Expr| Box::new(inline_lets(x, lets));
    match e {
        Expr::Num(_) => e.clone(),
        Expr::Ident(n) => lets.get(n).cloned().unwrap_or_else(|| e.clone()),
        Expr::Neg(x) => Expr::Neg(rec(x)),
        Expr::Add(x, y) => Expr::Add(rec(x), rec(y)),
        Expr::Sub(x, y) => Expr::Sub(rec(x), rec(y)),
        Expr::Mul(x, y) => Expr::Mul(rec(x), rec(y)),
        Expr::Div(x, y) => Expr::Div(rec(x), rec(y)),
        Expr::Pow(x, k) => Expr::Pow(rec(x), *k),
        Expr::Call(f, args) => Expr::Call(f.clone(), args.iter().map(|a| inline_lets(a, lets)).collect()),
        Expr::List(items) => Expr::List(items.iter().map(|a| inline_lets(a, lets)).collect()),
    }
}

/// The `let` bindings in force just before statement `upto` of `block`,
/// each fully inlined (so it can be evaluated with [`PointEnv`]).
pub fn bindings_before(block: &LemmaBlock, upto: usize) -> HashMap<String, Expr> {
    let mut lets = HashMap::new();
    for s in block.stmts.iter().take(upto) {
        if let StmtKind::Let(name, e) = &s.kind {
            let body = inline_lets(e, &lets);
            lets.insert(name.clone(), body);
        }
    }
    lets
}

/// Runs one block with the given seed for random points.
pub fn run_block(block: &LemmaBlock, seed: u64) -> Result<BlockOutcome> {
    let start = Instant::now();
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for s in &block.stmts {
        match &s.kind {
            StmtKind::Inner(v) => inner.extend(v.iter().map(String::as_str)),
            StmtKind::Outer(v) => outer.extend(v.iter().map(String::as_str)),
            _ => {}
        }
    }
    let mut runner = Runner {
        sym: SymEnv::new(Vars::new(&inner), Vars::new(&outer)),
        lets: HashMap::new(),
        ranges: HashMap::new(),
        sampler: PointSampler::new(seed),
    };
    let mut out = BlockOutcome {
        id: block.id.clone(),
        identities: 0,
        hessian_entries: 0,
        positivity_claims: 0,
        random_point_checks: 0,
        outcomes: Vec::new(),
        seconds: 0.0,
    };
    for s in &block.stmts {
        let at = |e: Error| Error::Parse(format!("lemma {} line {}: {e}", block.id, s.line));
        let outcome = match &s.kind {
            StmtKind::Inner(_) | StmtKind::Outer(_) => None,
            StmtKind::Range { var, lo, hi } => {
                runner.ranges.insert(var.clone(), (lo.clone(), hi.clone()));
                None
            }
            StmtKind::Let(name, e) => {
                if runner.sym.inner.index_of(name).is_ok() || runner.sym.outer.index_of(name).is_ok() {
                    return Err(at(Error::Parse(format!("`{name}` shadows a variable"))));
                }
                let v = runner.sym.eval(e).map_err(at)?;
                runner.sym.bind(name, v);
                let body = inline_lets(e, &runner.lets);
                runner.lets.insert(name.clone(), body);
                None
            }
            StmtKind::Check(l, r) => Some(runner.check(l, r, &mut out).map_err(at)?),
            StmtKind::Hessian(l, r) => Some(runner.hessian(l, r, &mut out).map_err(at)?),
            StmtKind::NonNeg(e) => Some(runner.positivity(e, false, &mut out).map_err(at)?),
            StmtKind::Positive(e) => Some(runner.positivity(e, true, &mut out).map_err(at)?),
        };
        if let Some(mut o) = outcome {
            o.line = s.line;
            out.outcomes.push(o);
        }
    }
    out.seconds = start.elapsed().as_secs_f64();
    Ok(out)
}
