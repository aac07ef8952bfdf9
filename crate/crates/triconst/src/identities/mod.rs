//! Machine checks of the manifest identities and positivity rewrites, the
//! element-form consistency checks, the orthogonality (Pythagoras) relations
//! of the two interpolations, and the 3×3 positive-semidefiniteness
//! criterion.
//!
//! The displayed identities live in `data/identities.manifest`, whose
//! SHA-256 is pinned in [`MANIFEST_SHA256`]; every run refuses a manifest
//! that does not match.

pub mod dsl;
pub mod eval;
pub mod positivity;
pub mod runner;

use std::collections::HashMap;
use std::time::Instant;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::elements::{
    alpha_interpolant, beta_interpolant, h1_seminorm2, h2_seminorm2, random_polynomial, random_triangle,
};
use crate::error::{Error, Result};
use crate::symbolic::rational::{format_rational, int, rat, Rational};
use crate::symbolic::sz::{PointSampler, DEFAULT_SEED};
use dsl::{Expr, LemmaBlock, StmtKind};
use eval::PointEnv;
use runner::{bindings_before, run_block, StmtOutcome};

/// The identity manifest, embedded at build time.
pub const MANIFEST: &str = include_str!("../../data/identities.manifest");

/// Pinned SHA-256 of [`MANIFEST`].
pub const MANIFEST_SHA256: &str = "fb0fb9a356f782e09c47da85a1a7cf41eeae41bdb6a58e8e3afc0838d314281f";

/// Every supported lemma id, in report order.
pub const LEMMA_IDS: [&str; 15] = [
    "3.2", "3.3", "5.1", "5.2", "14.1", "14.2", "14.3", "14.4", "14.5", "14.6", "14.7", "14.8", "14.9", "14.10", "14.11",
];

/// Random polynomials per Pythagoras check.
pub const PYTHAGORAS_SAMPLES: usize = 50;
/// Accepted random inputs for the criterion soundness property.
pub const PSD3_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Expand,
    HessianReduceExpand,
    ExactRandomPoints,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Passed,
    Failed,
    Skipped,
}

/// Result of checking one lemma.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCase {
    pub lemma_id: String,
    pub method: Method,
    pub status: Status,
    /// Human-readable summary; on failure it names the residual or point.
    pub detail: String,
    /// `"zero"` when every residual vanished, otherwise the first offending
    /// residual or evaluation point.
    pub residual: String,
    pub identities: usize,
    pub hessian_entries: usize,
    pub positivity_claims: usize,
    pub random_point_checks: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub statements: Vec<StmtOutcome>,
    pub seconds: f64,
}

impl IdentityCase {
    pub fn passed(&self) -> bool {
        self.status == Status::Passed
    }

    fn new(lemma_id: &str, method: Method) -> Self {
        IdentityCase {
            lemma_id: lemma_id.to_string(),
            method,
            status: Status::Passed,
            detail: String::new(),
            residual: "zero".into(),
            identities: 0,
            hessian_entries: 0,
            positivity_claims: 0,
            random_point_checks: 0,
            statements: Vec::new(),
            seconds: 0.0,
        }
    }

    /// Records a side check; the first failure fixes `residual`.
    fn record(&mut self, kind: &'static str, passed: bool, detail: String) {
        if !passed && self.status == Status::Passed {
            self.status = Status::Failed;
            self.residual = detail.clone();
        }
        self.statements.push(StmtOutcome {
            line: 0,
            kind,
            passed,
            detail,
        });
    }
}

/// Whole-suite report, as emitted in JSON.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub manifest_sha256: String,
    pub seed: u64,
    pub all_passed: bool,
    pub seconds: f64,
    pub cases: Vec<IdentityCase>,
}

/// SHA-256 of a manifest text, as lowercase hex.
pub fn manifest_checksum(src: &str) -> String {
    hex::encode(Sha256::digest(src.as_bytes()))
}

/// Parses the embedded manifest after checking its pinned checksum.
pub fn load_manifest() -> Result<Vec<LemmaBlock>> {
    let sum = manifest_checksum(MANIFEST);
    if sum != MANIFEST_SHA256 {
        return Err(Error::Internal(format!(
            "identity manifest checksum {sum} does not match the pinned {MANIFEST_SHA256}"
        )));
    }
    dsl::parse_manifest(MANIFEST)
}

fn manifest_block(id: &str) -> Result<LemmaBlock> {
    load_manifest()?
        .into_iter()
        .find(|b| b.id == id)
        .ok_or_else(|| Error::Internal(format!("lemma {id} missing from the manifest")))
}

/// Runs one manifest block and folds it into a case.
pub fn check_block(block: &LemmaBlock, seed: u64) -> Result<IdentityCase> {
    let out = run_block(block, seed)?;
    let method = if out.uses_hessian() {
        Method::HessianReduceExpand
    } else {
        Method::Expand
    };
    let mut case = IdentityCase::new(&block.id, method);
    case.identities = out.identities;
    case.hessian_entries = out.hessian_entries;
    case.positivity_claims = out.positivity_claims;
    case.random_point_checks = out.random_point_checks;
    case.seconds = out.seconds;
    if let Some(bad) = out.outcomes.iter().find(|o| !o.passed) {
        case.status = Status::Failed;
        case.residual = format!("line {}: {}", bad.line, bad.detail);
    }
    let failed = out.outcomes.iter().filter(|o| !o.passed).count();
    case.detail = format!(
        "{} identities, {} second-derivative identities, {} positivity claims, {} random-point cross-checks; {} failed",
        out.identities, out.hessian_entries, out.positivity_claims, out.random_point_checks, failed
    );
    case.statements = out.outcomes;
    Ok(case)
}

/// Checks one lemma with the default seed. Unknown ids are an error.
pub fn check_lemma(lemma_id: &str) -> Result<IdentityCase> {
    check_lemma_seeded(lemma_id, DEFAULT_SEED)
}

pub fn check_lemma_seeded(lemma_id: &str, seed: u64) -> Result<IdentityCase> {
    match lemma_id {
        "3.2" => Ok(check_pythagoras(false, seed)),
        "3.3" => Ok(check_pythagoras(true, seed)),
        "14.10" => Ok(check_psd3(seed)),
        "14.11" => check_lemma_14_11_seeded(seed),
        id if LEMMA_IDS.contains(&id) => check_block(&manifest_block(id)?, seed),
        other => Err(Error::InvalidArgument(format!(
            "unsupported lemma id `{other}` (supported: {})",
            LEMMA_IDS.join(", ")
        ))),
    }
}

/// The fourteen-variable quadratic-form identity via Hessian reduction, plus
/// the positivity rewrites of `E` and its consequences.
pub fn check_lemma_14_9() -> Result<IdentityCase> {
    check_lemma("14.9")
}

/// The four displayed identities, with exact evaluations at fixed points.
pub fn check_lemma_14_11() -> Result<IdentityCase> {
    check_lemma("14.11")
}

/// Both element lemmas: matching conditions of the explicit interpolants and
/// their norms against the five forms, for symbolic `(a, b, h)`.
pub fn check_element_consistency() -> Result<Vec<IdentityCase>> {
    ["5.1", "5.2"].iter().map(|id| check_lemma(id)).collect()
}

/// Runs the listed lemmas in parallel (all of them when `ids` is empty).
pub fn run_suite(ids: &[&str], seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let ids: Vec<&str> = if ids.is_empty() { LEMMA_IDS.to_vec() } else { ids.to_vec() };
    load_manifest()?;
    let cases = ids
        .par_iter()
        .map(|id| check_lemma_seeded(id, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport {
        manifest_sha256: manifest_checksum(MANIFEST),
        seed,
        all_passed: cases.iter().all(IdentityCase::passed),
        seconds: start.elapsed().as_secs_f64(),
        cases,
    })
}

fn check_lemma_14_11_seeded(seed: u64) -> Result<IdentityCase> {
    let block = manifest_block("14.11")?;
    let mut case = check_block(&block, seed)?;
    let start = Instant::now();
    // Displayed identities are the `check f == g` statements.
    let displayed: Vec<(usize, &Expr, &Expr)> = block
        .stmts
        .iter()
        .enumerate()
        .filter_map(|(i, s)| match &s.kind {
            StmtKind::Check(l, r) if *l == Expr::Ident("f".into()) => Some((i, l, r)),
            _ => None,
        })
        .collect();
    if displayed.len() != 4 {
        return Err(Error::Internal(format!("expected four displayed identities, found {}", displayed.len())));
    }
    let point = |a: Rational, b: Rational| HashMap::from([("a".to_string(), a), ("b".to_string(), b)]);
    let (gi, gl, gr) = displayed[3];
    let lets = bindings_before(&block, gi);
    let env = PointEnv { lets: &lets };
    let p = point(rat(1, 4), rat(1, 20));
    let (lv, rv) = (env.eval(gl, &p)?.0, env.eval(gr, &p)?.0);
    let same = lv.is_some() && lv == rv;
    case.record(
        "exact_point",
        same,
        format!(
            "last identity at (a,b)=(1/4,1/20): lhs {} rhs {}",
            lv.as_ref().map_or("undefined".into(), format_rational),
            rv.as_ref().map_or("undefined".into(), format_rational)
        ),
    );
    for &(i, _, r) in &displayed[1..] {
        let lets = bindings_before(&block, i);
        let env = PointEnv { lets: &lets };
        let v = env.eval(r, &point(int(0), rat(1, 10)))?.0;
        let ok = v.as_ref().is_some_and(Signed::is_positive);
        case.record(
            "exact_point",
            ok,
            format!(
                "right-hand side of line {} at (a,b)=(0,1/10): {}",
                block.stmts[i].line,
                v.as_ref().map_or("undefined".into(), format_rational)
            ),
        );
    }
    case.seconds += start.elapsed().as_secs_f64();
    Ok(case)
}

/// `‖∇Πu‖² + ‖∇(u − Πu)‖² = ‖∇u‖²` for the α-interpolation, or the
/// H²-seminorm analogue for the β-interpolation, exactly, on random
/// polynomials of degree ≤ 4 over random rational triangles.
fn check_pythagoras(beta: bool, seed: u64) -> IdentityCase {
    let start = Instant::now();
    let id = if beta { "3.3" } else { "3.2" };
    let mut case = IdentityCase::new(id, Method::ExactRandomPoints);
    let mut rng = PointSampler::new(seed ^ if beta { 0x33 } else { 0x32 });
    for k in 0..PYTHAGORAS_SAMPLES {
        let tri = random_triangle(&mut rng);
        let degree = 2 + (k % 3) as u32;
        let u = random_polynomial(&mut rng, degree);
        let outcome = (|| -> Result<Rational> {
            type Norm = fn(&crate::symbolic::MultiPoly, &crate::geometry::Triangle) -> Result<Rational>;
            let (pi, norm): (_, Norm) = if beta {
                (beta_interpolant(&tri, &u)?, h2_seminorm2)
            } else {
                (alpha_interpolant(&tri, &u)?, h1_seminorm2)
            };
            Ok(norm(&pi, &tri)? + norm(&u.sub(&pi), &tri)? - norm(&u, &tri)?)
        })();
        match outcome {
            Ok(r) if r.is_zero() => {}
            Ok(r) => {
                case.record("pythagoras", false, format!("residual {} for u = {u} on {:?}", format_rational(&r), tri.p));
            }
            Err(e) => case.record("pythagoras", false, format!("evaluation failed for u = {u}: {e}")),
        }
        case.random_point_checks += 1;
    }
    case.identities = PYTHAGORAS_SAMPLES;
    case.detail = format!(
        "{} random polynomials of degree 2–4 on random rational triangles; {}",
        PYTHAGORAS_SAMPLES,
        if case.passed() { "all residuals exactly zero" } else { "residual found" }
    );
    case.seconds = start.elapsed().as_secs_f64();
    case
}

/// Sufficient condition for `A₁v₁² + A₂v₂² + A₃v₃² + 2B₁v₂v₃ + 2B₂v₃v₁ +
/// 2B₃v₁v₂ ≥ 0`: `B₁B₂B₃ ≥ 0`, `A₃ > 0`, `A₁B₁² + A₂B₂² − 2B₁B₂B₃ > 0` and
/// `det > 0`, checked exactly.
pub fn psd3_criterion(a1: &Rational, a2: &Rational, a3: &Rational, b1: &Rational, b2: &Rational, b3: &Rational) -> bool {
    let bbb = b1 * b2 * b3;
    let third = a1 * b1 * b1 + a2 * b2 * b2 - int(2) * &bbb;
    let det = a1 * a2 * a3 - a1 * b1 * b1 - a2 * b2 * b2 - a3 * b3 * b3 + int(2) * &bbb;
    !bbb.is_negative() && a3.is_positive() && third.is_positive() && det.is_positive()
}

/// Leading principal minors of `[[A₁,B₃,B₂],[B₃,A₂,B₁],[B₂,B₁,A₃]]`.
pub fn leading_minors(a: [&Rational; 3], b: [&Rational; 3]) -> [Rational; 3] {
    let [a1, a2, a3] = a;
    let [b1, b2, b3] = b;
    [
        a1.clone(),
        a1 * a2 - b3 * b3,
        a1 * a2 * a3 + int(2) * b1 * b2 * b3 - a1 * b1 * b1 - a2 * b2 * b2 - a3 * b3 * b3,
    ]
}

/// Outcome of the criterion soundness property.
#[derive(Clone, Debug, Serialize)]
pub struct Psd3Soundness {
    pub accepted: usize,
    pub attempts: usize,
    pub violations: usize,
}

/// Draws random small rationals until `samples` inputs pass the criterion
/// and counts those whose matrix fails to have positive leading minors.
pub fn psd3_soundness(samples: usize, seed: u64) -> Psd3Soundness {
    let mut rng = PointSampler::new(seed);
    let mut r = Psd3Soundness { accepted: 0, attempts: 0, violations: 0 };
    while r.accepted < samples {
        r.attempts += 1;
        // Passing inputs always have A₁, A₂, A₃ > 0, so drawing the A_k from
        // positive values leaves the distribution of accepted inputs as is.
        let mut draw = |lo: i64| rat(rng.gen_range_i64(lo, 40), rng.gen_range_i64(1, 6));
        let v: Vec<Rational> = (0..6).map(|k| draw(if k < 3 { 1 } else { -40 })).collect();
        if !psd3_criterion(&v[0], &v[1], &v[2], &v[3], &v[4], &v[5]) {
            continue;
        }
        r.accepted += 1;
        let m = leading_minors([&v[0], &v[1], &v[2]], [&v[3], &v[4], &v[5]]);
        if m.iter().any(|x| !x.is_positive()) {
            r.violations += 1;
        }
    }
    r
}

fn check_psd3(seed: u64) -> IdentityCase {
    let start = Instant::now();
    let mut case = IdentityCase::new("14.10", Method::ExactRandomPoints);
    let q = |v: [i64; 6]| v.map(int);
    let examples: [([Rational; 6], bool); 2] = [(q([1, 1, 1, 0, 0, 0]), false), (q([2, 2, 2, 1, 1, 1]), true)];
    for (v, want) in &examples {
        let got = psd3_criterion(&v[0], &v[1], &v[2], &v[3], &v[4], &v[5]);
        case.record(
            "criterion",
            got == *want,
            format!("criterion on {:?} = {got}", v.iter().map(format_rational).collect::<Vec<_>>()),
        );
    }
    match region_coefficients(rat(1, 4), rat(1, 20)) {
        Ok(v) => {
            let got = psd3_criterion(&v[0], &v[1], &v[2], &v[3], &v[4], &v[5]);
            case.record("criterion", got, format!("criterion on the A_k, B_k at (a,b)=(1/4,1/20) = {got}"));
        }
        Err(e) => case.record("criterion", false, format!("could not evaluate A_k, B_k: {e}")),
    }
    let s = psd3_soundness(PSD3_SAMPLES, seed ^ 0x1410);
    case.record(
        "soundness",
        s.violations == 0,
        format!(
            "{} of {} random inputs passed the criterion; {} had a non-positive leading minor",
            s.accepted, s.attempts, s.violations
        ),
    );
    case.random_point_checks = s.accepted;
    case.detail = format!(
        "criterion examples and {} accepted random inputs checked against exact leading minors",
        s.accepted
    );
    case.seconds = start.elapsed().as_secs_f64();
    case
}

/// `(A₁, A₂, A₃, B₁, B₂, B₃)` of the positivity lemma at the shape `(a, b)`,
/// evaluated exactly from the manifest definitions.
pub fn region_coefficients(a: Rational, b: Rational) -> Result<[Rational; 6]> {
    let block = manifest_block("14.11")?;
    let lets = bindings_before(&block, block.stmts.len());
    let env = PointEnv { lets: &lets };
    let point = HashMap::from([("a".to_string(), a), ("b".to_string(), b)]);
    let mut out = Vec::with_capacity(6);
    for name in ["A1", "A2", "A3", "B1", "B2", "B3"] {
        let v = env
            .eval(&Expr::Ident(name.into()), &point)?
            .0
            .ok_or_else(|| Error::DivisionByZero(format!("{name} undefined at this point")))?;
        out.push(v);
    }
    Ok(out.try_into().expect("six coefficients"))
}
