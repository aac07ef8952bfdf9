//! Command-line surface: constants, tables, verified sweeps, the identity
//! suite, grid export and proof-chain status.
//!
//! Exit codes: 0 success, 1 not certified / failed check, 2 usage or input
//! error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::{circumradius, k_constant, normalize_shape, Triangle, TriangleShape};
use crate::identities::{run_suite, LEMMA_IDS};
use crate::symbolic::rational::{format_rational, parse_rational, Rational};
use crate::tables::table;
use crate::verify::{
    proof_chain_status, run_sweep, theorem61_grid, thm62_shape, ChainEvidence, Mode, SweepConfig,
    VerificationReport, GRID_LEVELS, THM62_POINTS,
};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "TRICONST_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "triconst", version, about = "Interpolation error constants on triangles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// K1..K4, circumradius and normalized shape of one triangle.
    Constants(ConstantsArgs),
    /// Recompute one of the four reference tables.
    Table(TableArgs),
    /// Certify a slice of a verification grid.
    Verify(VerifyArgs),
    /// Run the exact identity suite.
    Identities(IdentitiesArgs),
    /// Emit a verification grid as CSV.
    Grid(GridArgs),
    /// Which proof ingredients are re-verified, given sweep reports.
    Status(StatusArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    /// Shape parameters `a b` of T_{a,b} (p/q or decimals).
    #[arg(long, num_args = 2, value_names = ["A", "B"], conflicts_with = "vertices", required_unless_present = "vertices")]
    shape: Option<Vec<String>>,
    /// Three vertices `x,y x,y x,y`.
    #[arg(long, num_args = 3, value_names = ["P1", "P2", "P3"])]
    vertices: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Table id 1..4 (the constant index).
    #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
    id: u8,
    /// Mesh levels for the upper-bound columns.
    #[arg(long, value_delimiter = ',', default_value = "10,20")]
    n: Vec<usize>,
    /// Polynomial degree of the lower-bound column (0 skips it).
    #[arg(long, default_value_t = 10)]
    degree: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_parser = ["thm61", "thm62"])]
    mode: String,
    /// Level selector for thm61: `all`, `3`, `1..5` (inclusive) or `1,4,7`.
    #[arg(long)]
    k: Option<String>,
    /// Column selector, same syntax.
    #[arg(long)]
    l: Option<String>,
    /// Constants to certify: `all` or a list.
    #[arg(long, default_value = "all")]
    j: String,
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Worker threads (default from the environment, else all cores).
    #[arg(long, env = THREADS_ENV)]
    threads: Option<usize>,
    /// JSON report path.
    #[arg(long)]
    output: Option<PathBuf>,
    /// CSV per-point table path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON-lines checkpoint, resumed when present.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Leave points not started after this many seconds pending.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Also compare the floating-point bound with K_j per point.
    #[arg(long)]
    float_check: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct IdentitiesArgs {
    /// `all` or a comma-separated list of lemma ids.
    #[arg(long, default_value = "all")]
    lemma: String,
    #[arg(long, default_value_t = 20240601)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, value_parser = ["thm61", "thm62"], default_value = "thm61")]
    mode: String,
}

#[derive(Args, Debug)]
struct StatusArgs {
    /// Sweep reports (JSON) to count.
    #[arg(long, num_args = 0..)]
    reports: Vec<PathBuf>,
    /// Run the identity suite as part of the status.
    #[arg(long)]
    identities: bool,
}

/// Parses a selector: `all` (→ `None`), `a..b` / `a..=b` (inclusive), or a
/// comma-separated list.
pub fn parse_selector(s: &str) -> Result<Option<Vec<usize>>> {
    let s = s.trim();
    if s == "all" {
        return Ok(None);
    }
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad index {t:?} in selector {s:?}")))
    };
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo > hi {
                return Err(Error::Parse(format!("empty range {part:?}")));
            }
            out.extend(lo..=hi);
        } else {
            out.push(num(part)?);
        }
    }
    Ok(Some(out))
}

fn parse_point(s: &str) -> Result<[Rational; 2]> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("vertex {s:?} is not `x,y`")))?;
    Ok([parse_rational(x)?, parse_rational(y)?])
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Degenerate(_) | Error::InvalidArgument(_) | Error::UnknownVariable(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

/// Runs the CLI on `args` (including the program name), writing normal output
/// to `out` and diagnostics to `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Constants(a) => cmd_constants(a, out),
        Command::Table(a) => cmd_table(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Identities(a) => cmd_identities(a, out),
        Command::Grid(a) => cmd_grid(a, out),
        Command::Status(a) => cmd_status(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

#[derive(Serialize)]
struct ConstantsReport {
    k: [f64; 4],
    circumradius: f64,
    #[serde(with = "crate::symbolic::rational::serde_rational")]
    a: Rational,
    #[serde(with = "crate::symbolic::rational::serde_rational")]
    b: Rational,
    scale: f64,
    perm: [usize; 3],
    reflected: bool,
}

fn cmd_constants(args: ConstantsArgs, out: &mut dyn Write) -> Result<i32> {
    let tri = match (&args.shape, &args.vertices) {
        (Some(s), _) => Triangle::t_ab(&parse_rational(&s[0])?, &parse_rational(&s[1])?),
        (None, Some(v)) => Triangle::new(parse_point(&v[0])?, parse_point(&v[1])?, parse_point(&v[2])?),
        (None, None) => return Err(Error::InvalidArgument("need --shape or --vertices".into())),
    };
    let norm = normalize_shape(&tri)?;
    let mut k = [0.0; 4];
    for (j, slot) in k.iter_mut().enumerate() {
        *slot = k_constant(j + 1, &tri)?;
    }
    let rep = ConstantsReport {
        k,
        circumradius: circumradius(&tri)?,
        a: norm.shape.a.clone(),
        b: norm.shape.b.clone(),
        scale: norm.scale(),
        perm: norm.perm,
        reflected: norm.reflected,
    };
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rep)?).map_err(io)?,
        Format::Csv => {
            writeln!(out, "K1,K2,K3,K4,R,a,b,scale").map_err(io)?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                k[0],
                k[1],
                k[2],
                k[3],
                rep.circumradius,
                format_rational(&rep.a),
                format_rational(&rep.b),
                rep.scale
            )
            .map_err(io)?;
        }
        Format::Text => {
            for (j, v) in k.iter().enumerate() {
                writeln!(out, "K{} = {v:.7}", j + 1).map_err(io)?;
            }
            writeln!(out, "R  = {:.7}", rep.circumradius).map_err(io)?;
            writeln!(
                out,
                "normalized: T[{}, {}] scaled by {:.7}{}",
                format_rational(&rep.a),
                format_rational(&rep.b),
                rep.scale,
                if rep.reflected { " (reflected)" } else { "" }
            )
            .map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_table(args: TableArgs, out: &mut dyn Write) -> Result<i32> {
    let j = args.id as usize;
    for &n in &args.n {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("mesh level n = {n} must be at least 2")));
        }
    }
    let degree = (args.degree > 0).then_some(args.degree);
    let rows = table(j, &args.n, degree)?;
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&json!({ "j": j, "rows": rows }))?).map_err(io)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["j".to_string(), "label".into(), "a".into(), "b".into(), "K".into()];
            header.extend(args.n.iter().map(|n| format!("Cbar_{n}")));
            header.push("Ctilde".into());
            w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
            for r in &rows {
                let mut rec = vec![j.to_string(), r.label.clone(), format_rational(&r.a), format_rational(&r.b)];
                rec.push(format!("{:.7}", r.k));
                rec.extend(r.upper.iter().map(|(_, v)| format!("{v:.7}")));
                rec.push(r.lower.map(|v| format!("{v:.7}")).unwrap_or_default());
                w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            out.write_all(&bytes).map_err(io)?;
        }
        Format::Text => {
            write!(out, "{:<16} {:>10}", "T", format!("K{j}")).map_err(io)?;
            for n in &args.n {
                write!(out, " {:>10}", format!("Cbar({n})")).map_err(io)?;
            }
            writeln!(out, " {:>10}", "Ctilde").map_err(io)?;
            for r in &rows {
                write!(out, "{:<16} {:>10.7}", r.label, r.k).map_err(io)?;
                for (_, v) in &r.upper {
                    write!(out, " {v:>10.7}").map_err(io)?;
                }
                match r.lower {
                    Some(v) => writeln!(out, " {v:>10.7}").map_err(io)?,
                    None => writeln!(out, " {:>10}", "-").map_err(io)?,
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn parse_js(s: &str) -> Result<Vec<usize>> {
    Ok(parse_selector(s)?.unwrap_or_else(|| vec![1, 2, 3, 4]))
}

fn cmd_verify(args: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let mode: Mode = args.mode.parse()?;
    let mut js = parse_js(&args.j)?;
    if mode == Mode::Thm62 && args.j.trim() == "all" {
        js = vec![1, 2, 3];
    }
    let ks = match &args.k {
        Some(k) => parse_selector(k)?,
        None => None,
    };
    if let Some(ks) = &ks {
        if let Some(bad) = ks.iter().find(|&&k| k == 0 || k > GRID_LEVELS) {
            return Err(Error::InvalidArgument(format!("k = {bad} outside 1..={GRID_LEVELS}")));
        }
    }
    let mut config = SweepConfig::new(mode, js, args.n);
    config.ks = ks;
    config.ls = match &args.l {
        Some(l) => parse_selector(l)?,
        None => None,
    };
    config.threads = args.threads.filter(|&t| t > 0);
    config.checkpoint = args.checkpoint.clone();
    config.time_budget_secs = args.time_budget;
    config.float_check = args.float_check;
    let report = run_sweep(&config)?;
    if let Some(p) = &args.output {
        std::fs::write(p, report.to_json()?)?;
    }
    if let Some(p) = &args.csv {
        std::fs::write(p, report.to_csv()?)?;
    }
    match args.format {
        Format::Json => writeln!(out, "{}", report.to_json()?).map_err(io)?,
        Format::Csv => write!(out, "{}", report.to_csv()?).map_err(io)?,
        Format::Text => {
            let s = &report.summary;
            writeln!(
                out,
                "{:?}: {}/{} verified, {} not certified, {} pending ({:.1} s){}",
                mode,
                s.verified,
                s.total,
                s.not_certified,
                s.pending,
                s.seconds,
                if s.reference_setup { "" } else { " [n differs from the reference setup]" }
            )
            .map_err(io)?;
            for p in report.points.iter().filter(|p| p.verdict != crate::verify::Verdict::Verified) {
                writeln!(out, "not certified: k={:?} l={} j={} a={} b={}", p.k, p.l, p.j, p.a, p.b).map_err(io)?;
            }
        }
    }
    Ok(if report.summary.all_verified { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_identities(args: IdentitiesArgs, out: &mut dyn Write) -> Result<i32> {
    let ids: Vec<&str> = if args.lemma.trim() == "all" {
        Vec::new()
    } else {
        let ids: Vec<&str> = args.lemma.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        if let Some(bad) = ids.iter().find(|id| !LEMMA_IDS.contains(id)) {
            return Err(Error::InvalidArgument(format!(
                "unknown lemma id {bad:?}; known: {}",
                LEMMA_IDS.join(", ")
            )));
        }
        ids
    };
    let report = run_suite(&ids, args.seed)?;
    let js = serde_json::to_string_pretty(&report)?;
    if let Some(p) = &args.output {
        std::fs::write(p, &js)?;
    }
    match args.format {
        Format::Json => writeln!(out, "{js}").map_err(io)?,
        Format::Csv => {
            writeln!(out, "lemma,method,status,identities,hessian_entries,positivity_claims,random_points,seconds")
                .map_err(io)?;
            for c in &report.cases {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{:.3}",
                    c.lemma_id,
                    serde_json::to_value(c.method)?.as_str().unwrap_or(""),
                    serde_json::to_value(c.status)?.as_str().unwrap_or(""),
                    c.identities,
                    c.hessian_entries,
                    c.positivity_claims,
                    c.random_point_checks,
                    c.seconds
                )
                .map_err(io)?;
            }
        }
        Format::Text => {
            for c in &report.cases {
                writeln!(
                    out,
                    "{:<6} {:<7} {} ({:.1} s)",
                    c.lemma_id,
                    if c.passed() { "PASS" } else { "FAIL" },
                    c.detail,
                    c.seconds
                )
                .map_err(io)?;
            }
            writeln!(
                out,
                "{} (manifest sha256 {})",
                if report.all_passed { "all passed" } else { "FAILURES" },
                report.manifest_sha256
            )
            .map_err(io)?;
        }
    }
    Ok(if report.all_passed { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_grid(args: GridArgs, out: &mut dyn Write) -> Result<i32> {
    let mode: Mode = args.mode.parse()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let e = |e: csv::Error| Error::Io(e.to_string());
    match mode {
        Mode::Thm61 => {
            w.write_record(["k", "y", "x", "l", "a", "b"]).map_err(e)?;
            for p in theorem61_grid().points() {
                w.write_record([
                    p.k.to_string(),
                    p.y.to_string(),
                    p.x.to_string(),
                    p.l.to_string(),
                    format_rational(&p.a),
                    format_rational(&p.b),
                ])
                .map_err(e)?;
            }
        }
        Mode::Thm62 => {
            w.write_record(["l", "a", "b"]).map_err(e)?;
            for l in 0..THM62_POINTS {
                let s: TriangleShape = thm62_shape(l)?;
                w.write_record([l.to_string(), format_rational(&s.a), format_rational(&s.b)]).map_err(e)?;
            }
        }
    }
    out.write_all(&w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_status(args: StatusArgs, out: &mut dyn Write) -> Result<i32> {
    let grid = theorem61_grid();
    let (ha, hb) = grid.spacing();
    let step = crate::verify::grid_step();
    let mut ev = ChainEvidence {
        grid_invariants: grid.levels.len() == GRID_LEVELS
            && grid.total_triangles() == 12168
            && ha <= step
            && hb <= step,
        ..Default::default()
    };
    for p in &args.reports {
        let rep: VerificationReport = serde_json::from_str(&std::fs::read_to_string(p)?)?;
        let tally = match rep.config.mode {
            Mode::Thm61 => &mut ev.thm61,
            Mode::Thm62 => &mut ev.thm62,
        };
        if rep.config.n == crate::verify::REFERENCE_N {
            tally.0 += rep.summary.verified;
            tally.1 += rep.summary.total;
        }
    }
    if args.identities {
        ev.identity_suite = Some(run_suite(&[], 20240601)?.all_passed);
    }
    let status = proof_chain_status(&ev);
    writeln!(out, "{}", serde_json::to_string_pretty(&status)?).map_err(io)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["triconst"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn selectors() {
        assert_eq!(parse_selector("all").unwrap(), None);
        assert_eq!(parse_selector("0..3").unwrap(), Some(vec![0, 1, 2, 3]));
        assert_eq!(parse_selector("2..=3,7").unwrap(), Some(vec![2, 3, 7]));
        assert_eq!(parse_selector("").unwrap(), Some(vec![]));
        assert!(parse_selector("3..1").is_err() && parse_selector("x").is_err());
    }

    #[test]
    fn constants_text_json_and_degenerate() {
        let (code, out, _) = call(&["constants", "--shape", "0", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("K1 = 0.33407") && out.contains("K4 = 0.49159"), "{out}");
        let (code, js, _) = call(&["constants", "--vertices", "0,0", "1,0", "0,1", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&js).unwrap();
        assert_eq!(v["a"], "0");
        assert_eq!(v["b"], "1");
        assert!((v["k"][3].as_f64().unwrap() - 0.4915960).abs() < 1e-6);
        assert_eq!(call(&["constants", "--shape", "0", "0"]).0, 2);
        assert_eq!(call(&["constants", "--shape", "0.5", "x"]).0, 2);
        assert_eq!(call(&["constants"]).0, 2);
        // Decimals are exact: 0.1 is 1/10, not the nearest double.
        let (_, js, _) = call(&["constants", "--shape", "0.25", "0.1", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&js).unwrap();
        assert_eq!(v["b"], "1/10");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["verify", "--mode", "thm61", "--k", "0"]).0, 2);
        assert_eq!(call(&["verify", "--mode", "thm61", "--k", "200"]).0, 2);
        assert_eq!(call(&["verify", "--mode", "thm62", "--j", "4", "--l", "0"]).0, 2);
        assert_eq!(call(&["identities", "--lemma", "99"]).0, 2);
        assert_eq!(call(&["table", "5"]).0, 2);
        assert_eq!(call(&["bogus"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn small_verify_and_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let json_path = dir.path().join("r.json");
        let csv_path = dir.path().join("r.csv");
        let (code, out, err) = call(&[
            "verify",
            "--mode",
            "thm62",
            "--l",
            "0",
            "--j",
            "1",
            "--n",
            "6",
            "--threads",
            "1",
            "--output",
            json_path.to_str().unwrap(),
            "--csv",
            csv_path.to_str().unwrap(),
        ]);
        assert!(code == 0 || code == 1, "{err}");
        assert!(out.contains("n differs"), "{out}");
        let rep: VerificationReport = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
        assert_eq!(rep.points.len(), 1);
        assert_eq!(code == 0, rep.summary.all_verified);
        assert!(std::fs::read_to_string(&csv_path).unwrap().starts_with("mode,k,l"));
        let (code, _, _) = call(&["verify", "--mode", "thm61", "--k", "1", "--l", "", "--n", "6"]);
        assert_eq!(code, 0);
        let (code, out, _) = call(&["status", "--reports", json_path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.contains("partially re-verified"), "{out}");
    }

    #[test]
    fn grid_export() {
        let (code, out, _) = call(&["grid"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 1 + 11917);
        assert!(out.lines().nth(1).unwrap().starts_with("1,1000,25,0,0,1"));
        let (_, out, _) = call(&["grid", "--mode", "thm62"]);
        assert_eq!(out.lines().count(), 252);
    }

    #[test]
    fn table_without_heavy_columns() {
        let (code, out, _) = call(&["table", "3", "--n", "2", "--degree", "0", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 13);
        assert!(out.starts_with("j,label,a,b,K,Cbar_2,Ctilde"));
        assert!(out.contains("0.1201798"), "{out}");
    }
}
