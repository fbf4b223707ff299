//! Command-line front end.
//!
//! Exit codes: 0 success or certified, 2 invalid input, 3 inconclusive certificate,
//! 4 numerical failure. Everything a command prints is buffered and written in one go
//! at the end, either to `--output` (via a temporary file and rename) or to stdout.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::certify::{self, CertificateReport, Outcome};
use crate::error::{Error, ErrorKind, Result};
use crate::io::{self, complex_text};
use crate::linalg::{CMat, RMat, C64};
use crate::measure::DEFAULT_MERGE_TOL;
use crate::simulate::{self, InputSignal, SineTerm};
use crate::spectral::{self, DEFAULT_GRID_SIZE};
use crate::system::{self, HyperbolicSystem};
use crate::transfer;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Largest `|s|` accepted by `transfer`; beyond it the spatial ODE is too oscillatory to trust.
pub const MAX_ABS_S: f64 = 1e3;

#[derive(Debug, Parser)]
#[command(name = "hbcs", version, about = "BIBO stability analysis of 1-D hyperbolic boundary control systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// System definition (JSON).
    pub system: PathBuf,
    /// Write the result here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the standing assumptions and the contraction form.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = certify::VALIDATION_TOL)]
        tol: f64,
    },
    /// Print J, L and, when J is invertible, K and M.
    Decompose {
        #[command(flatten)]
        common: Common,
        /// Decompose the diagonalized input matrix instead of the original one.
        #[arg(long)]
        diagonal: bool,
    },
    /// Diagonalize into Riemann invariants and print the diagonal system.
    Diagonalize {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid: usize,
    },
    /// Evaluate G(s) as CSV: re_s, im_s, then Re/Im of each entry row-major.
    Transfer {
        #[command(flatten)]
        common: Common,
        /// Sample point such as `1`, `2-3i`, `0.5i` or `1,2`; repeatable.
        #[arg(long = "s", required = true, allow_hyphen_values = true)]
        s: Vec<String>,
    },
    /// Look for a Neumann-series BIBO certificate.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = certify::DEFAULT_K_MAX)]
        kmax: usize,
    },
    /// Truncated impulse-response measure as CSV, followed by the tail bound.
    Impulse {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        order: usize,
        /// Fail unless a certified tail bound is available.
        #[arg(long)]
        require_bound: bool,
    },
    /// Zero-state response as CSV: t, y_1..y_n, sup_y.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Empirical lower bound on the L-infinity gain.
    Gain {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 8)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Final time.
    #[arg(long = "T", default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Constant input, comma separated.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["sine", "input_csv"])]
    pub constant: Option<String>,
    /// `channel:amplitude:frequency:phase`, meaning amplitude·cos(2π·frequency·t + phase); repeatable.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "input_csv")]
    pub sine: Vec<String>,
    /// CSV of samples: t, u_1..u_n per line, linearly interpolated.
    #[arg(long)]
    pub input_csv: Option<PathBuf>,
}

/// Command output, kept in memory until the command has finished.
struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: EXIT_OK }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err.kind() {
        ErrorKind::InvalidInput => EXIT_INVALID,
        ErrorKind::Numerical => EXIT_NUMERICAL,
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let (result, output_path) = match &cli.command {
        Command::Validate { common, tol } => (with_system(common, |s| validate(s, *tol)), &common.output),
        Command::Decompose { common, diagonal } => (with_system(common, |s| decompose(s, *diagonal)), &common.output),
        Command::Diagonalize { common, grid } => (with_system(common, |s| diagonalize(s, *grid)), &common.output),
        Command::Transfer { common, s } => (with_system(common, |sys| transfer_csv(sys, s)), &common.output),
        Command::Certify { common, kmax } => (with_system(common, |s| certify_report(s, *kmax)), &common.output),
        Command::Impulse { common, order, require_bound } => {
            (with_system(common, |s| impulse_csv(s, *order, *require_bound)), &common.output)
        }
        Command::Simulate { common, run, input } => (with_system(common, |s| simulate_csv(s, run, input)), &common.output),
        Command::Gain { common, run, trials, seed } => {
            (with_system(common, |s| gain(s, run, *trials, *seed)), &common.output)
        }
    };
    match result {
        Ok(out) => match emit(&out.text, output_path.as_deref()) {
            Ok(()) => out.code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INVALID
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn with_system(common: &Common, f: impl FnOnce(&HyperbolicSystem) -> Result<Output>) -> Result<Output> {
    let sys = io::load_system(&common.system)?;
    f(&sys)
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    let Some(path) = path else {
        print!("{text}");
        return Ok(());
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Parameter(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, text).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", tmp.display()))))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn cnum(z: C64) -> String {
    if z.im == 0.0 {
        num(z.re)
    } else {
        complex_text(z)
    }
}

fn matrix_text(name: &str, m: &CMat) -> String {
    let mut s = format!("{name} =\n");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| cnum(m[(i, j)])).collect();
        let _ = writeln!(s, "  [{}]", row.join(", "));
    }
    s
}

fn real_matrix_text(name: &str, m: &RMat) -> String {
    let mut s = format!("{name} =\n");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| num(m[(i, j)])).collect();
        let _ = writeln!(s, "  [{}]", row.join(", "));
    }
    s
}

fn matrix_json(m: &CMat) -> serde_json::Value {
    let real = m.iter().all(|z| z.im == 0.0);
    let rows: Vec<serde_json::Value> = (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    if real {
                        json!(z.re)
                    } else {
                        json!([z.re, z.im])
                    }
                })
                .collect()
        })
        .collect();
    json!(rows)
}

fn real_matrix_json(m: &RMat) -> serde_json::Value {
    json!((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn structured(value: &serde_json::Value) -> String {
    format!("--- structured ---\n{}\n", serde_json::to_string_pretty(value).expect("json values serialize"))
}

fn validate(sys: &HyperbolicSystem, tol: f64) -> Result<Output> {
    let rep = system::validate_system(sys, tol)?;
    let mut s = String::new();
    let _ = writeln!(s, "validation: {}", if rep.ok { "ok" } else { "failed" });
    for c in &rep.checks {
        let _ = writeln!(s, "  [{}] {} (residual {})", if c.passed { "pass" } else { "FAIL" }, c.name, num(c.residual));
    }
    let _ = writeln!(s, "H eigenvalues in [{}, {}]", num(rep.h_min_eigenvalue), num(rep.h_max_eigenvalue));
    let _ = writeln!(s, "contraction class: {} (margin {})", rep.contraction_class.as_str(), num(rep.contraction_margin));
    let _ = writeln!(s, "diagonal semigroup rank: {}", rep.semigroup_rank_ok.as_str());
    s += &matrix_text("contraction matrix", &rep.contraction_matrix);
    s += &structured(&json!({
        "ok": rep.ok,
        "checks": rep.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "residual": c.residual})).collect::<Vec<_>>(),
        "contraction_class": rep.contraction_class.as_str(),
        "contraction_margin": rep.contraction_margin,
        "contraction_matrix": matrix_json(&rep.contraction_matrix),
        "semigroup_rank_ok": rep.semigroup_rank_ok.as_str(),
    }));
    Ok(Output { text: s, code: if rep.ok { EXIT_OK } else { EXIT_INVALID } })
}

fn decompose(sys: &HyperbolicSystem, diagonal: bool) -> Result<Output> {
    sys.check_structure()?;
    let dec = if diagonal {
        spectral::diagonalize(sys, DEFAULT_GRID_SIZE)?.decompose()?
    } else {
        let sig = spectral::signature_projections(&sys.p1)?;
        spectral::decompose_boundary(&sys.wb, &sig, &sys.p1)?
    };
    let mut s = format!("coordinates: {}\n", if diagonal { "diagonal" } else { "original" });
    s += &matrix_text("J", &dec.j);
    s += &matrix_text("L", &dec.l);
    let _ = writeln!(s, "cond(J) = {}", num(dec.j_condition));
    let _ = writeln!(s, "exists_KM = {}", dec.exists_km);
    if let (Some(k), Some(m)) = (&dec.k, &dec.m) {
        s += &matrix_text("K", k);
        s += &matrix_text("M", m);
    }
    s += &structured(&json!({
        "coordinates": if diagonal { "diagonal" } else { "original" },
        "J": matrix_json(&dec.j),
        "L": matrix_json(&dec.l),
        "j_condition": dec.j_condition,
        "exists_KM": dec.exists_km,
        "K": dec.k.as_ref().map(matrix_json),
        "M": dec.m.as_ref().map(matrix_json),
    }));
    Ok(Output::ok(s))
}

fn diagonalize(sys: &HyperbolicSystem, grid: usize) -> Result<Output> {
    sys.check_structure()?;
    let d = spectral::diagonalize(sys, grid)?;
    let mut s = String::new();
    let _ = writeln!(s, "m = {}", d.m);
    let _ = writeln!(s, "tau = [{}]", d.tau.iter().map(|t| num(*t)).collect::<Vec<_>>().join(", "));
    let _ = writeln!(s, "P0D max norm = {} (zero: {})", num(d.p0d_residual), d.p0d_is_zero);
    let _ = writeln!(s, "relation residual = {}", num(d.relation_residual));
    s += &matrix_text("WBD", &d.wbd);
    s += &matrix_text("WCD", &d.wcd);
    s += "--- diagonal system ---\n";
    s += &io::serialize_system(&d.to_system());
    Ok(Output::ok(s))
}

/// Parse `a`, `a+bi`, `a-bi`, `bi` or `a,b`.
pub fn parse_complex(text: &str) -> Result<C64> {
    let bad = || Error::Parameter(format!("cannot parse {text:?} as a complex number"));
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some((re, im)) = t.split_once(',') {
        return Ok(C64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(C64::new(t.parse().map_err(|_| bad())?, 0.0));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let coef = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok(C64::new(body[..k].parse().map_err(|_| bad())?, coef(&body[k..])?)),
        None => Ok(C64::new(0.0, coef(body)?)),
    }
}

fn transfer_csv(sys: &HyperbolicSystem, points: &[String]) -> Result<Output> {
    sys.check_structure()?;
    let points: Vec<C64> = points.iter().map(|p| parse_complex(p)).collect::<Result<_>>()?;
    if let Some(p) = points.iter().find(|p| !(p.norm() <= MAX_ABS_S)) {
        return Err(Error::Parameter(format!("|s| = {} exceeds {MAX_ABS_S}", p.norm())));
    }
    let n = sys.n;
    let mut s = String::from("re_s,im_s");
    for i in 1..=n {
        for j in 1..=n {
            let _ = write!(s, ",re_g{i}{j},im_g{i}{j}");
        }
    }
    s.push('\n');
    for sample in transfer::transfer_grid(sys, &points) {
        let sample = sample?;
        let mut row = vec![num(sample.s.re), num(sample.s.im)];
        for i in 0..n {
            for j in 0..n {
                let z = sample.g[(i, j)];
                row.push(num(z.re));
                row.push(num(z.im));
            }
        }
        s += &row.join(",");
        s.push('\n');
    }
    Ok(Output::ok(s))
}

pub fn certificate_text(rep: &CertificateReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "outcome: {}", rep.outcome.as_str());
    let _ = writeln!(s, "condition: {}", rep.triggered_condition.as_str());
    if !rep.tau.is_empty() {
        let _ = writeln!(s, "tau = [{}]", rep.tau.iter().map(|t| num(*t)).collect::<Vec<_>>().join(", "));
    }
    if let Some(m) = &rep.m {
        s += &matrix_text("M", m);
    }
    if let Some(k) = rep.k_condition {
        let _ = writeln!(s, "cond(K) = {}", num(k));
    }
    if let Some(c) = &rep.cond1 {
        let _ = writeln!(s, "cond1_inf_norm: ||M||_inf = {} ({})", num(c.m_inf), if c.pass { "pass" } else { "fail" });
    }
    if let Some(c) = &rep.cond2 {
        let _ = writeln!(s, "cond2_abs_series: rho(|M|) = {} ({})", num(c.rho_abs), if c.pass { "pass" } else { "fail" });
    }
    if let Some(c) = &rep.cond3 {
        let _ = writeln!(
            s,
            "cond3_k0: {}",
            c.k0.map_or("no k0 found".to_string(), |k| format!("k0 = {k}"))
        );
        for row in &c.table {
            let sums: Vec<String> = row.row_sums.iter().map(|x| num(*x)).collect();
            let _ = writeln!(s, "  k = {:2}: row sums [{}]", row.k, sums.join(", "));
        }
        if let Some(k0) = c.k0 {
            s += &real_matrix_text(&format!("TV((MU)^{k0})"), &c.table[k0 - 1].tv);
        }
    }
    if let Some(margin) = rep.contraction_margin {
        let _ = writeln!(s, "contraction margin: {}", num(margin));
    }
    for w in &rep.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

pub fn certificate_json(rep: &CertificateReport) -> serde_json::Value {
    json!({
        "outcome": rep.outcome.as_str(),
        "triggered_condition": rep.triggered_condition.as_str(),
        "tau": rep.tau,
        "M": rep.m.as_ref().map(matrix_json),
        "k_condition": rep.k_condition,
        "cond1": rep.cond1.as_ref().map(|c| json!({"pass": c.pass, "m_inf": c.m_inf})),
        "cond2": rep.cond2.as_ref().map(|c| json!({"pass": c.pass, "rho_abs": c.rho_abs})),
        "cond3": rep.cond3.as_ref().map(|c| json!({
            "pass": c.pass,
            "k0": c.k0,
            "table": c.table.iter().map(|r| json!({
                "k": r.k,
                "tv": real_matrix_json(&r.tv),
                "row_sums": r.row_sums,
                "max_row_sum": r.max_row_sum,
            })).collect::<Vec<_>>(),
        })),
        "contraction_margin": rep.contraction_margin,
        "warnings": rep.warnings,
    })
}

fn certify_report(sys: &HyperbolicSystem, k_max: usize) -> Result<Output> {
    sys.check_structure()?;
    let rep = certify::certify(sys, k_max)?;
    let code = match rep.outcome {
        Outcome::CertifiedBibo => EXIT_OK,
        Outcome::Inconclusive => EXIT_INCONCLUSIVE,
        Outcome::InvalidInput => EXIT_INVALID,
    };
    let text = certificate_text(&rep) + &structured(&certificate_json(&rep));
    Ok(Output { text, code })
}

fn impulse_csv(sys: &HyperbolicSystem, order: usize, require_bound: bool) -> Result<Output> {
    sys.check_structure()?;
    let diag = spectral::diagonalize(sys, DEFAULT_GRID_SIZE)?;
    let dec = diag.decompose()?;
    let imp = certify::impulse_response(&diag, &dec, order)?;
    if require_bound {
        imp.require_bound()?;
    }
    let n = diag.n;
    let atoms = imp.measure.merged_atoms(DEFAULT_MERGE_TOL);
    let complex = atoms.iter().any(|(_, w)| w.iter().any(|z| z.im != 0.0));
    let mut s = String::from("location");
    for i in 1..=n {
        for j in 1..=n {
            if complex {
                let _ = write!(s, ",re_w{i}{j},im_w{i}{j}");
            } else {
                let _ = write!(s, ",w{i}{j}");
            }
        }
    }
    s.push('\n');
    for (loc, w) in &atoms {
        let mut row = vec![num(*loc)];
        for i in 0..n {
            for j in 0..n {
                row.push(num(w[(i, j)].re));
                if complex {
                    row.push(num(w[(i, j)].im));
                }
            }
        }
        s += &row.join(",");
        s.push('\n');
    }
    let _ = writeln!(s, "# order = {order}, exact up to t < {}", num(imp.coverage()));
    match &imp.tail {
        Some(t) => {
            let _ = writeln!(
                s,
                "# tail bound via {} (ratio {}, k0 = {}): row bounds [{}]",
                t.condition.as_str(),
                num(t.decay_ratio),
                t.k0,
                t.row_bound.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", ")
            );
            let _ = writeln!(s, "# gain upper bound = {}", num(certify::gain_upper_bound(&imp)?));
        }
        None => s += "# no certified tail bound\n",
    }
    Ok(Output::ok(s))
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parameter(format!("cannot parse {x:?} as a number"))))
        .collect()
}

fn read_input_csv(path: &Path, n: usize) -> Result<InputSignal> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(|c: char| c.is_ascii_alphabetic()) {
            continue;
        }
        let row = parse_list(line).map_err(|e| Error::Parameter(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        if row.len() != n + 1 {
            return Err(Error::Parameter(format!(
                "{}:{}: expected {} columns, found {}",
                path.display(),
                lineno + 1,
                n + 1,
                row.len()
            )));
        }
        times.push(row[0]);
        values.push(row[1..].to_vec());
    }
    Ok(InputSignal::Sampled { times, values })
}

fn input_signal(args: &InputArgs, n: usize) -> Result<InputSignal> {
    if let Some(c) = &args.constant {
        return Ok(InputSignal::Constant(parse_list(c)?));
    }
    if let Some(p) = &args.input_csv {
        return read_input_csv(p, n);
    }
    if args.sine.is_empty() {
        return Ok(InputSignal::zero(n));
    }
    let terms = args
        .sine
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.split(':').collect();
            let bad = || Error::Parameter(format!("sine term {t:?} must be channel:amplitude:frequency:phase"));
            if parts.len() != 4 {
                return Err(bad());
            }
            Ok(SineTerm {
                channel: parts[0].parse().map_err(|_| bad())?,
                amplitude: parts[1].parse().map_err(|_| bad())?,
                frequency: parts[2].parse().map_err(|_| bad())?,
                phase: parts[3].parse().map_err(|_| bad())?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(InputSignal::Sines(terms))
}

fn simulate_csv(sys: &HyperbolicSystem, run: &RunArgs, input: &InputArgs) -> Result<Output> {
    sys.check_structure()?;
    let diag = spectral::diagonalize(sys, DEFAULT_GRID_SIZE)?;
    let dec = diag.decompose()?;
    let u = input_signal(input, sys.n)?;
    let trace = simulate::simulate(&diag, &dec, &u, run.t_end, run.dt)?;
    let complex = trace.y.iter().flatten().any(|z| z.im != 0.0);
    let mut s = String::from("t");
    for i in 1..=sys.n {
        if complex {
            let _ = write!(s, ",re_y{i},im_y{i}");
        } else {
            let _ = write!(s, ",y{i}");
        }
    }
    s += ",sup_y\n";
    for ((t, y), sup) in trace.times.iter().zip(&trace.y).zip(&trace.sup_y) {
        let mut row = vec![num(*t)];
        for z in y {
            row.push(num(z.re));
            if complex {
                row.push(num(z.im));
            }
        }
        row.push(num(*sup));
        s += &row.join(",");
        s.push('\n');
    }
    Ok(Output::ok(s))
}

fn gain(sys: &HyperbolicSystem, run: &RunArgs, trials: usize, seed: u64) -> Result<Output> {
    sys.check_structure()?;
    let diag = spectral::diagonalize(sys, DEFAULT_GRID_SIZE)?;
    let dec = diag.decompose()?;
    let probe = simulate::linf_gain_probe(&diag, &dec, run.t_end, run.dt, trials, seed)?;
    Ok(Output::ok(format!("lower_bound = {}\ninput = {}\n", num(probe.lower_bound), probe.descriptor)))
}
