//! Acceptance criteria 1–8: one PASS/FAIL line each, nonzero exit on any
//! failure. Reference values live in `tests/data/tables.csv`.

use std::collections::HashMap;
use std::time::Instant;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use triconst::eigen::{
    bound_from_discrete, discrete_constant, max_gen_eig_f64, poly_subspace_constant, PolynomialSubspaceSpec,
};
use triconst::geometry::{circumradius, k_constant, Triangle, TriangleShape};
use triconst::identities::run_suite;
use triconst::interval::{interval_op, rational_to_interval, verified_spd, IntervalSymMatrix, Interval, OpKind};
use triconst::linalg::SymRatMatrix;
use triconst::mesh::{assemble_f64, Space};
use triconst::symbolic::rational::{from_f64_exact, int, parse_rational, rat, Rational};
use triconst::symbolic::sz::PointSampler;
use triconst::tables::sqrt3_half;
use triconst::verify::{certify_at, grid_step, run_sweep, theorem61_grid, Mode, SweepConfig, Verdict};

// Tolerances.
const K_TOL: f64 = 1e-6;
const CBAR_TOL: f64 = 1e-5;
const ONE_SIDED_SLACK: f64 = 1e-7;
const CTILDE_TOL: f64 = 1e-4;
const INV_PI_TOL: f64 = 5e-7;
const SANDWICH_SLACK: f64 = 1e-9;
const INTERVAL_OPS: usize = 100_000;
const RANDOM_TRIANGLES: usize = 10_000;

struct Row {
    j: usize,
    shape: TriangleShape,
    k: f64,
    c10: f64,
    c20: f64,
    ctilde: f64,
}

fn load_rows() -> Vec<Row> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/tables.csv");
    let mut rdr = csv::Reader::from_path(path).expect("tables.csv");
    rdr.records()
        .map(|r| {
            let r = r.expect("csv row");
            let num = |i: usize| r[i].parse::<f64>().expect("number");
            let b = if &r[2] == "sqrt3/2" { sqrt3_half() } else { parse_rational(&r[2]).unwrap() };
            Row {
                j: r[0].parse().unwrap(),
                shape: TriangleShape::new(parse_rational(&r[1]).unwrap(), b),
                k: num(3),
                c10: num(4),
                c20: num(5),
                ctilde: num(6),
            }
        })
        .collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, start: Instant, o: &Outcome, all: &mut bool) {
    *all &= o.pass;
    println!(
        "criterion {id}: {} {name} — {} [{:.1} s]",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        start.elapsed().as_secs_f64()
    );
}

fn shape_key(s: &TriangleShape) -> (Rational, Rational) {
    (s.a.clone(), s.b.clone())
}

fn criterion1(rows: &[Row]) -> Outcome {
    let mut worst = 0.0f64;
    for r in rows {
        let k = k_constant(r.j, &r.shape.triangle()).unwrap();
        worst = worst.max((k - r.k).abs());
    }
    Outcome {
        pass: worst <= K_TOL,
        detail: format!("48 K_j entries, max |Δ| = {worst:.2e} (tol {K_TOL:.0e})"),
    }
}

/// C̄_j⁽ⁿ⁾ for every table shape and j, with C̄₂ reused for j = 4.
fn upper_bounds(rows: &[Row], n: usize) -> HashMap<(usize, (Rational, Rational)), f64> {
    let mut out = HashMap::new();
    let mut shapes: Vec<&TriangleShape> = Vec::new();
    for r in rows {
        if !shapes.iter().any(|s| **s == r.shape) {
            shapes.push(&r.shape);
        }
    }
    for s in shapes {
        let mut c2 = None;
        for j in [1, 2, 3, 4] {
            let c = discrete_constant(j, n, s).unwrap();
            let bound = bound_from_discrete(j, n, c, c2).unwrap();
            if j == 2 {
                c2 = Some(bound);
            }
            out.insert((j, shape_key(s)), bound);
        }
    }
    out
}

fn criterion2(rows: &[Row], u10: &HashMap<(usize, (Rational, Rational)), f64>, u20: &HashMap<(usize, (Rational, Rational)), f64>) -> Outcome {
    let (mut worst, mut worst_over) = (0.0f64, f64::NEG_INFINITY);
    for r in rows {
        for (map, printed) in [(u10, r.c10), (u20, r.c20)] {
            let c = map[&(r.j, shape_key(&r.shape))];
            worst = worst.max((c - printed).abs());
            worst_over = worst_over.max(c - printed);
        }
    }
    Outcome {
        pass: worst <= CBAR_TOL && worst_over <= ONE_SIDED_SLACK,
        detail: format!(
            "96 C̄ entries (n = 10, 20), max |Δ| = {worst:.2e} (tol {CBAR_TOL:.0e}), max computed − printed = {worst_over:.1e} (≤ {ONE_SIDED_SLACK:.0e})"
        ),
    }
}

fn lower_bounds(rows: &[Row]) -> HashMap<(usize, (Rational, Rational)), f64> {
    rows.iter()
        .map(|r| {
            let spec = PolynomialSubspaceSpec::for_constant(r.j).unwrap();
            ((r.j, shape_key(&r.shape)), poly_subspace_constant(r.j, &r.shape, spec).unwrap())
        })
        .collect()
}

fn criterion3(rows: &[Row], low: &HashMap<(usize, (Rational, Rational)), f64>) -> Outcome {
    let mut worst = 0.0f64;
    for r in rows {
        worst = worst.max((low[&(r.j, shape_key(&r.shape))] - r.ctilde).abs());
    }
    let c1 = low[&(1, (int(0), int(1)))];
    let pi_err = (c1 - std::f64::consts::FRAC_1_PI).abs();
    Outcome {
        pass: worst <= CTILDE_TOL && pi_err <= INV_PI_TOL,
        detail: format!(
            "48 C̃ entries at degree 10, max |Δ| = {worst:.2e} (tol {CTILDE_TOL:.0e}); |C̃₁(T_0,1) − 1/π| = {pi_err:.1e} (tol {INV_PI_TOL:.0e})"
        ),
    }
}

fn criterion4() -> Outcome {
    let mut c61 = SweepConfig::new(Mode::Thm61, vec![1, 2, 3, 4], 20);
    c61.ks = Some(vec![1]);
    c61.ls = Some((0..=25).collect());
    let r61 = run_sweep(&c61).unwrap();
    let mut c62 = SweepConfig::new(Mode::Thm62, vec![1, 2, 3], 20);
    c62.ls = Some(vec![0, 125, 250]);
    let r62 = run_sweep(&c62).unwrap();
    let (v61, t61) = (r61.summary.verified, r61.summary.total);
    let (v62, t62) = (r62.summary.verified, r62.summary.total);
    Outcome {
        pass: (v61, t61, v62, t62) == (104, 104, 9, 9),
        detail: format!("regular grid k=1, l=0..25, j=1..4: {v61}/{t61}; small-b l ∈ {{0,125,250}}, j=1..3: {v62}/{t62} (n = 20)"),
    }
}

fn criterion5() -> Outcome {
    let rep = run_suite(&[], 20240601).unwrap();
    let failed: Vec<&str> = rep.cases.iter().filter(|c| !c.passed()).map(|c| c.lemma_id.as_str()).collect();
    let nonzero = rep.cases.iter().filter(|c| c.residual != "zero").count();
    Outcome {
        pass: rep.all_passed && nonzero == 0,
        detail: format!(
            "{} lemma cases, {} failed {:?}, {} nonzero residuals",
            rep.cases.len(),
            failed.len(),
            failed,
            nonzero
        ),
    }
}

fn criterion6() -> Outcome {
    let g = theorem61_grid();
    let (ha, hb) = g.spacing();
    let b119 = g.b(119).unwrap();
    let ok = g.levels.len() == 119
        && g.total_triangles() == 12_168
        && b119 == rat(1000, 10133)
        && ha <= grid_step()
        && hb <= grid_step();
    Outcome {
        pass: ok,
        detail: format!(
            "{} levels, {} regular + 251 small-b = {} triangles, b₁₁₉ = {}, max h_a = {}, max h_b = {} (≤ 1/50)",
            g.levels.len(),
            g.point_count(),
            g.total_triangles(),
            b119,
            ha,
            hb
        ),
    }
}

/// Householder reflector `I − 2vvᵀ/(vᵀv)`: exactly orthogonal and rational.
fn householder(v: &[Rational]) -> Vec<Vec<Rational>> {
    let vv: Rational = v.iter().map(|x| x * x).sum();
    (0..v.len())
        .map(|i| {
            (0..v.len())
                .map(|j| {
                    let delta = if i == j { int(1) } else { int(0) };
                    delta - int(2) * &v[i] * &v[j] / &vv
                })
                .collect()
        })
        .collect()
}

/// `H diag(λ) H` with exact entries.
fn synthesize(h: &[Vec<Rational>], lambda: &[Rational]) -> SymRatMatrix {
    let n = lambda.len();
    let rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| &h[i][k] * &lambda[k] * &h[j][k]).sum()).collect())
        .collect();
    SymRatMatrix::from_rows(&rows).unwrap()
}

/// Outward enclosure of `m` with every entry widened by `r`.
fn widened(m: &SymRatMatrix, r: &Rational) -> IntervalSymMatrix {
    IntervalSymMatrix::from_fn(m.dim(), |i, j| {
        let lo = rational_to_interval(&(m.get(i, j) - r));
        let hi = rational_to_interval(&(m.get(i, j) + r));
        Interval::new(lo.lo(), hi.hi()).unwrap()
    })
}

fn hilbert(n: usize) -> Vec<Vec<Rational>> {
    (0..n).map(|i| (0..n).map(|j| rat(1, (i + j + 1) as i64)).collect()).collect()
}

/// Replaces `H₀₀` by its Schur-complement value so the matrix is exactly
/// singular (positive semidefinite, λ_min = 0).
fn singular_hilbert(n: usize) -> SymRatMatrix {
    let mut h = hilbert(n);
    let sub: Vec<Vec<Rational>> = (1..n).map(|i| h[i][1..].to_vec()).collect();
    let c: Vec<Rational> = (1..n).map(|i| h[i][0].clone()).collect();
    let x = triconst::linalg::solve_exact(&sub, &c).unwrap();
    h[0][0] = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    SymRatMatrix::from_rows(&h).unwrap()
}

fn criterion7(rows: &[Row], u10: &HashMap<(usize, (Rational, Rational)), f64>, u20: &HashMap<(usize, (Rational, Rational)), f64>, low: &HashMap<(usize, (Rational, Rational)), f64>) -> Outcome {
    // (a) Interval enclosures.
    let mut s = PointSampler::new(7);
    let kinds = [OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Div, OpKind::Sqrt];
    let mut violations = 0usize;
    for i in 0..INTERVAL_OPS {
        let (p, q) = (s.rational(), s.rational());
        let (x, y) = (rational_to_interval(&p), rational_to_interval(&q));
        let kind = kinds[i % kinds.len()];
        let ok = match kind {
            OpKind::Add => interval_op(x, y, kind).unwrap().contains_rational(&(&p + &q)),
            OpKind::Sub => interval_op(x, y, kind).unwrap().contains_rational(&(&p - &q)),
            OpKind::Mul => interval_op(x, y, kind).unwrap().contains_rational(&(&p * &q)),
            OpKind::Div => match interval_op(x, y, kind) {
                Ok(d) => d.contains_rational(&(&p / &q)),
                Err(_) => q.is_zero(),
            },
            OpKind::Sqrt => {
                let pa = p.abs();
                let r = interval_op(rational_to_interval(&pa), y, kind).unwrap();
                // lo² ≤ |p| ≤ hi², exactly.
                let lo = from_f64_exact(r.lo()).unwrap();
                let hi = from_f64_exact(r.hi()).unwrap();
                !lo.is_negative() && &lo * &lo <= pa && pa <= &hi * &hi
            }
        };
        violations += usize::from(!ok);
    }

    // (b) Adversarial SPD set: every matrix here has a member that is not
    // positive definite, so each must be rejected.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut adversarial = 0usize;
    let mut wrongly_certified = 0usize;
    let mut controls = (0usize, 0usize);
    for trial in 0..300 {
        let n = 2 + trial % 7;
        let v: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        let h = householder(&v);
        let mut lambda: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(1..=100), rng.gen_range(1..=10))).collect();
        let tiny = rat(1, 10i64.pow(rng.gen_range(3..=12)));
        match trial % 3 {
            // Exactly singular.
            0 => lambda[0] = int(0),
            // Slightly indefinite.
            1 => lambda[0] = -tiny.clone(),
            // Positive definite, but the widening reaches λ_min.
            _ => lambda[0] = tiny.clone(),
        }
        let m = synthesize(&h, &lambda);
        // A diagonal shift by −r stays inside the widened set, so r ≥ λ_min
        // guarantees a member with λ_min ≤ 0.
        let r = if trial % 3 == 2 { tiny.clone() } else { int(0) };
        adversarial += 1;
        wrongly_certified += usize::from(verified_spd(&widened(&m, &r)));
        // Positive control: the same spectrum shifted well into the SPD cone.
        let shifted: Vec<Rational> = lambda.iter().map(|l| l + int(1)).collect();
        controls.1 += 1;
        controls.0 += usize::from(verified_spd(&widened(&synthesize(&h, &shifted), &int(0))));
    }
    for n in 2..=8 {
        let m = singular_hilbert(n);
        adversarial += 1;
        wrongly_certified += usize::from(verified_spd(&IntervalSymMatrix::from_rational(&m)));
        let h = SymRatMatrix::from_rows(&hilbert(n)).unwrap();
        controls.1 += 1;
        controls.0 += usize::from(verified_spd(&IntervalSymMatrix::from_rational(&h)));
    }

    // (c) Sandwich C̃ ≤ C̄⁽ⁿ⁾.
    let mut sandwich_bad = 0usize;
    for r in rows {
        let key = (r.j, shape_key(&r.shape));
        for u in [u10[&key], u20[&key]] {
            sandwich_bad += usize::from(low[&key] > u + SANDWICH_SLACK);
        }
    }

    // (d) K₄ < R on random triangles.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut circ_bad = 0usize;
    let mut tested = 0usize;
    while tested < RANDOM_TRIANGLES {
        let p: [[f64; 2]; 3] = std::array::from_fn(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
        let Ok(tri) = Triangle::from_f64(p) else { continue };
        let (Ok(k4), Ok(r)) = (k_constant(4, &tri), circumradius(&tri)) else { continue };
        tested += 1;
        circ_bad += usize::from(k4.is_nan() || r.is_nan() || k4 >= r);
    }

    Outcome {
        pass: violations == 0 && wrongly_certified == 0 && sandwich_bad == 0 && circ_bad == 0,
        detail: format!(
            "{INTERVAL_OPS} interval ops, {violations} violations; {wrongly_certified}/{adversarial} adversarial matrices certified (controls certified {}/{}); {sandwich_bad} sandwich violations of 96; K4 ≥ R on {circ_bad}/{tested} random triangles",
            controls.0, controls.1
        ),
    }
}

fn criterion8() -> Outcome {
    let points = [
        (1, TriangleShape::new(int(0), int(1))),
        (2, TriangleShape::new(rat(1, 4), rat(1, 2))),
        (3, TriangleShape::new(rat(1, 2), rat(1, 10))),
        (4, TriangleShape::new(int(0), int(1))),
        (4, TriangleShape::new(rat(1, 2), rat(1, 5))),
    ];
    let n = 20;
    let mut flipped = 0;
    let mut above_ok = 0;
    for (j, shape) in &points {
        let p = assemble_f64(Space::for_constant(*j).unwrap(), *j, n, shape).unwrap();
        let lam = max_gen_eig_f64(&p.a, &p.b).unwrap().value;
        let below = from_f64_exact(lam * (1.0 - 1e-4)).unwrap();
        let above = from_f64_exact(lam * (1.0 + 1e-3)).unwrap();
        flipped += usize::from(certify_at(*j, n, shape, &below).unwrap() == Verdict::NotCertified);
        above_ok += usize::from(certify_at(*j, n, shape, &above).unwrap() == Verdict::Verified);
    }
    Outcome {
        pass: flipped == points.len() && above_ok == points.len(),
        detail: format!(
            "n = 20: λ = (1 − 1e-4)·λ_max not certified at {flipped}/{} points; (1 + 1e-3)·λ_max certified at {above_ok}/{}",
            points.len(),
            points.len()
        ),
    }
}

fn main() {
    // `cargo test` passes harness flags; a name filter that excludes this
    // target skips it.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let rows = load_rows();
    assert_eq!(rows.len(), 48, "tables.csv rows");
    let mut all = true;

    let t = Instant::now();
    report(1, "closed-form constants", t, &criterion1(&rows), &mut all);

    let t = Instant::now();
    let u10 = upper_bounds(&rows, 10);
    let u20 = upper_bounds(&rows, 20);
    report(2, "upper-bound pipeline", t, &criterion2(&rows, &u10, &u20), &mut all);

    let t = Instant::now();
    let low = lower_bounds(&rows);
    report(3, "polynomial-subspace estimates", t, &criterion3(&rows, &low), &mut all);

    let t = Instant::now();
    report(4, "verified sweep slices", t, &criterion4(), &mut all);

    let t = Instant::now();
    report(5, "identity suite", t, &criterion5(), &mut all);

    let t = Instant::now();
    report(6, "grid invariants", t, &criterion6(), &mut all);

    let t = Instant::now();
    report(7, "property suites", t, &criterion7(&rows, &u10, &u20, &low), &mut all);

    let t = Instant::now();
    report(8, "falsification sensitivity", t, &criterion8(), &mut all);

    println!("acceptance: {}", if all { "ALL PASS" } else { "FAILURES" });
    if !all {
        std::process::exit(1);
    }
}
