//! Command-line front end for `bconv-core`.
//!
//! Every command prints a JSON envelope
//! `{command, precision_bits, tolerance, result}` on stdout, or CSV for
//! tabular commands under `--csv`. Exit codes: 0 success, 1 invalid input,
//! 2 computational failure (with `{error, message}` JSON on stderr).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use bconv_core::criterion::{
    bernoulli_criterion, f_graph, f_graph_csv, gauss2d_check, q_family_check, THRESHOLD_TOL,
};
use bconv_core::hp::working_bits;
use bconv_core::ifs::{bernoulli_ifs, certify, k_step_support, IfsSpec};
use bconv_core::polyalg::{
    count_roots_in_disk, find_factor, find_roots, is_irreducible, mahler_measure, AlgebraicParameter,
    DEFAULT_ROOT_TOL,
};
use bconv_core::search::{results_csv, run_search_with, verify_family, SearchConfig};
use bconv_core::smooth::{detail_profile, entropy_gauss, entropy_slope, DetailOptions, DiscreteMeasure};
use bconv_core::verify::{run_suite, Profile, DEFAULT_SEED};
use bconv_core::{Error, IntPolynomial, UniformIFS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_COMPUTATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bconv", version, about = "Certify absolute continuity of Bernoulli convolutions")]
pub struct Cli {
    /// Emit CSV instead of JSON for tabular commands.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Worker threads for search and quadrature.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON file of default flag values; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mahler measure of an integer polynomial.
    Mahler(PolyArg),
    /// Complex roots with multiplicities.
    Roots {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
        tol: f64,
    },
    /// Exact irreducibility over the rationals.
    Irreducible(PolyArg),
    /// Number of roots inside a disk.
    SchurCohn {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Run the Mahler-measure criterion for a root of a minimal polynomial.
    CheckLambda {
        #[arg(long)]
        minpoly: String,
        /// Pick the real root nearest this value.
        #[arg(long)]
        near: Option<f64>,
    },
    /// Exhaustive search over monic polynomials with constant term ±1.
    Search {
        #[arg(long)]
        max_degree: usize,
        #[arg(long)]
        max_height: i64,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Report block progress on stderr.
        #[arg(long)]
        progress: bool,
    },
    /// Check the family X^n - 2X^(n-1) - X + 1.
    Family {
        #[arg(long, default_value_t = 5)]
        n_lo: usize,
        #[arg(long, default_value_t = 64)]
        n_hi: usize,
    },
    /// Criterion for the q-map system with contraction (q-1)/q.
    Qfamily {
        #[arg(long)]
        q: u64,
    },
    /// Criterion for the Gaussian-integer system in the plane.
    Gauss2d {
        #[arg(long)]
        p: u64,
        /// Number of maps; defaults to p^2 - 1.
        #[arg(long)]
        m: Option<u64>,
    },
    /// Exact support analysis and criterion for a system.
    Certify {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value_t = 12)]
        kmax: usize,
    },
    /// Detail s_r of a depth-k support measure over a range of scales.
    DetailProfile {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[command(flatten)]
        grid: GridArg,
        /// Envelope exponent for the decay report.
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
    },
    /// Smoothed entropy and its slope for a depth-k support measure.
    EntropyProfile {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[command(flatten)]
        grid: GridArg,
    },
    /// Graph of the threshold F(lambda).
    FGraph {
        #[arg(long, default_value_t = 0.51)]
        lo: f64,
        #[arg(long, default_value_t = 0.9999)]
        hi: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Randomized checks of the smoothing inequalities.
    VerifyInequalities {
        #[arg(long, value_enum, default_value_t = ProfileArg::Small)]
        profile: ProfileArg,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct PolyArg {
    /// `X^2+X-1` or ascending coefficients `-1,1,1`.
    #[arg(long)]
    pub poly: String,
}

#[derive(Debug, Args)]
pub struct SystemArg {
    /// JSON system description.
    #[arg(long, conflicts_with = "minpoly")]
    pub spec: Option<PathBuf>,
    /// Bernoulli system with lambda a root of this polynomial.
    #[arg(long)]
    pub minpoly: Option<String>,
    #[arg(long, requires = "minpoly")]
    pub near: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArg {
    #[arg(long, default_value_t = 1e-3)]
    pub r_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 13)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProfileArg {
    Small,
    Full,
}

/// Failure of a command, carrying the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub body: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_validation() { EXIT_VALIDATION } else { EXIT_COMPUTATION };
        let mut body = json!({"error": e.kind(), "message": e.to_string()});
        if let Error::NotCertifiable { report, .. } = &e {
            body["report"] = serde_json::to_value(report).unwrap_or(Value::Null);
        }
        Failure { code, body }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Error::invalid(msg).into()
}

/// Result of a command before rendering.
pub struct Output {
    pub tolerance: Value,
    pub result: Value,
    pub csv: Option<String>,
    /// Exit code for a completed computation whose verdict is negative.
    pub code: i32,
}

impl Output {
    fn new(tolerance: Value, result: impl Serialize) -> Result<Self, Failure> {
        Ok(Output {
            tolerance,
            result: to_value(result)?,
            csv: None,
            code: EXIT_OK,
        })
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

fn to_value(v: impl Serialize) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Error::from(e).into())
}

/// Insert `--key value` for every config key not given on the command line.
pub fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let Some(pos) = argv.iter().position(|a| a == "--config") else {
        if let Some(a) = argv.iter().find_map(|a| a.to_str()?.strip_prefix("--config=").map(String::from)) {
            return merge_from(argv, Path::new(&a));
        }
        return Ok(argv);
    };
    let path = argv
        .get(pos + 1)
        .ok_or_else(|| invalid("--config needs a file"))?
        .clone();
    merge_from(argv, Path::new(&path))
}

fn merge_from(mut argv: Vec<OsString>, path: &Path) -> Result<Vec<OsString>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    let cfg: serde_json::Map<String, Value> =
        serde_json::from_str(&text).map_err(|e| Failure::from(Error::Parse(format!("config: {e}"))))?;
    let given: Vec<String> = argv
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    for (key, val) in cfg {
        let flag = key.replace('_', "-");
        if given.contains(&flag) {
            continue;
        }
        match val {
            Value::Bool(true) => argv.push(format!("--{flag}").into()),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => {
                argv.push(format!("--{flag}").into());
                argv.push(s.into());
            }
            Value::Number(n) => {
                argv.push(format!("--{flag}").into());
                argv.push(n.to_string().into());
            }
            other => return Err(invalid(format!("config key {key}: unsupported value {other}"))),
        }
    }
    Ok(argv)
}

fn parse_poly(s: &str) -> Result<IntPolynomial, Failure> {
    Ok(s.parse::<IntPolynomial>()?)
}

fn load_system(sys: &SystemArg) -> Result<UniformIFS, Failure> {
    match (&sys.spec, &sys.minpoly) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
            Ok(IfsSpec::from_json(&text)?.build()?)
        }
        (None, Some(p)) => {
            let lam = pick_root(&parse_poly(p)?, sys.near)?;
            Ok(bernoulli_ifs(lam, 0.5)?)
        }
        (None, None) => Err(invalid("give --spec or --minpoly")),
    }
}

fn pick_root(p: &IntPolynomial, near: Option<f64>) -> Result<AlgebraicParameter, Failure> {
    if let Some(x) = near {
        return Ok(AlgebraicParameter::nearest(p, x)?);
    }
    let mut found = AlgebraicParameter::real_roots_in(p, 0.5, 1.0)?;
    match found.len() {
        1 => Ok(found.remove(0)),
        0 => Err(invalid(format!("{p} has no real root in (1/2, 1)"))),
        n => Err(invalid(format!("{p} has {n} roots in (1/2, 1); choose one with --near"))),
    }
}

fn support_measure(sys: &SystemArg, depth: usize) -> Result<DiscreteMeasure, Failure> {
    let f = load_system(sys)?;
    let level = k_step_support(&f, depth)?;
    Ok(DiscreteMeasure::from_support(&level, f.dim() as u32)?)
}

fn geometric_grid(g: &GridArg) -> Result<Vec<f64>, Failure> {
    if !(g.r_min > 0.0 && g.r_max >= g.r_min && g.r_max.is_finite()) {
        return Err(invalid("need 0 < r-min <= r-max"));
    }
    if g.points < 1 || (g.points == 1 && g.r_max != g.r_min) {
        return Err(invalid("need at least two grid points for a range"));
    }
    let n = g.points;
    Ok((0..n)
        .map(|i| {
            if n == 1 {
                g.r_min
            } else {
                g.r_min * (g.r_max / g.r_min).powf(i as f64 / (n - 1) as f64)
            }
        })
        .collect())
}

fn csv_of<T>(header: &str, rows: &[T], line: impl Fn(&T) -> String) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&line(r));
        s.push('\n');
    }
    s
}

pub fn run_command(cli: &Cli) -> Result<Output, Failure> {
    let bits = working_bits();
    match &cli.command {
        Command::Mahler(a) => {
            let p = parse_poly(&a.poly)?;
            let m = mahler_measure(&p)?;
            Output::new(json!({"root_tol": DEFAULT_ROOT_TOL}), json!({"poly": p.to_string(), "mahler": m}))
        }
        Command::Roots { poly, tol } => {
            if !(*tol > 0.0) {
                return Err(invalid("--tol must be positive"));
            }
            let p = parse_poly(&poly.poly)?;
            let recs = find_roots(&p, *tol)?.records();
            let csv = csv_of("re,im,modulus,multiplicity", &recs, |r| {
                format!("{:.15e},{:.15e},{:.15e},{}", r.re, r.im, r.modulus, r.multiplicity)
            });
            Ok(Output::new(json!({"root_tol": tol}), json!({"poly": p.to_string(), "roots": recs}))?.with_csv(csv))
        }
        Command::Irreducible(a) => {
            let p = parse_poly(&a.poly)?;
            let irr = is_irreducible(&p)?;
            let factor = if irr { None } else { find_factor(&p)?.map(|f| f.to_string()) };
            Output::new(Value::Null, json!({"poly": p.to_string(), "irreducible": irr, "factor": factor}))
        }
        Command::SchurCohn { poly, radius } => {
            let p = parse_poly(&poly.poly)?;
            let c = count_roots_in_disk(&p, *radius)?;
            Output::new(json!({"root_tol": DEFAULT_ROOT_TOL}), json!({"poly": p.to_string(), "radius": radius, "count": c}))
        }
        Command::CheckLambda { minpoly, near } => {
            let p = parse_poly(minpoly)?;
            let lam = pick_root(&p, *near)?;
            let irreducible = is_irreducible(&p)?;
            let s = lam.summary();
            let report = bernoulli_criterion(s.mahler, s.lambda)?;
            let above_two = lam.has_conjugate_above_two();
            let passes = report.passes && irreducible && above_two;
            Output::new(
                json!({"root_tol": DEFAULT_ROOT_TOL, "precision_bits": bits}),
                json!({
                    "parameter": s,
                    "irreducible": irreducible,
                    "conjugate_above_two": above_two,
                    "criterion": report,
                    "passes": passes,
                }),
            )
        }
        Command::Search {
            max_degree,
            max_height,
            checkpoint,
            progress,
        } => {
            let mut cfg = SearchConfig::new(*max_degree, *max_height)?;
            if let Some(path) = checkpoint {
                cfg = cfg.with_checkpoint(path);
            }
            let report = |done: usize, total: usize| eprintln!("block {done}/{total}");
            let silent = |_: usize, _: usize| {};
            let rows = if *progress {
                run_search_with(&cfg, cli.jobs, &report)?
            } else {
                run_search_with(&cfg, cli.jobs, &silent)?
            };
            let csv = results_csv(&rows);
            Ok(Output::new(json!({"root_tol": DEFAULT_ROOT_TOL}), json!({"config_hash": cfg.hash(), "rows": rows}))?
                .with_csv(csv))
        }
        Command::Family { n_lo, n_hi } => {
            let rows = verify_family(*n_lo, *n_hi)?;
            let csv = csv_of(
                "n,lambda,mahler,large_root,interior_others,irreducible,family_passes,direct_passes",
                &rows,
                |r| {
                    format!(
                        "{},{:.12},{:.12},{:.12},{},{},{},{}",
                        r.n,
                        r.lambda,
                        r.mahler,
                        r.large_root,
                        r.interior_others,
                        r.irreducible,
                        r.family_passes,
                        r.direct_passes
                    )
                },
            );
            let all = rows.iter().all(|r| r.roots_ok() && r.family_passes);
            let mut out = Output::new(json!({"root_tol": DEFAULT_ROOT_TOL}), json!({"rows": rows, "all_pass": all}))?;
            out.csv = Some(csv);
            Ok(out)
        }
        Command::Qfamily { q } => Output::new(Value::Null, q_family_check(*q)?),
        Command::Gauss2d { p, m } => {
            let m = m.unwrap_or_else(|| p.saturating_mul(*p).saturating_sub(1));
            Output::new(Value::Null, gauss2d_check(*p, m)?)
        }
        Command::Certify { system, kmax } => {
            if *kmax == 0 {
                return Err(invalid("--kmax must be at least 1"));
            }
            let f = load_system(system)?;
            Output::new(json!({"precision_bits": bits}), certify(&f, *kmax)?)
        }
        Command::DetailProfile {
            system,
            depth,
            grid,
            beta,
        } => {
            let rs = geometric_grid(grid)?;
            let mu = support_measure(system, *depth)?;
            let prof = detail_profile(&mu, &rs, *beta)?;
            let csv = prof.to_csv();
            let decay = prof.decay_report();
            Ok(Output::new(
                json!({"quadrature_tol": DetailOptions::default().tol}),
                json!({"depth": depth, "atoms": mu.len(), "profile": prof, "decay": decay}),
            )?
            .with_csv(csv))
        }
        Command::EntropyProfile { system, depth, grid } => {
            let rs = geometric_grid(grid)?;
            let mu = support_measure(system, *depth)?;
            let mut rows = Vec::new();
            for r in rs {
                let y = r * r;
                let h = entropy_gauss(&mu, y)?;
                let s = entropy_slope(&mu, y)?;
                rows.push(json!({"r": r, "y": y, "entropy": h, "slope_fd": s.finite_difference, "slope_fisher": s.fisher}));
            }
            let csv = csv_of("r,y,entropy,slope_fd,slope_fisher", &rows, |v| {
                ["r", "y", "entropy", "slope_fd", "slope_fisher"]
                    .iter()
                    .map(|k| format!("{:.12e}", v[*k].as_f64().unwrap_or(f64::NAN)))
                    .collect::<Vec<_>>()
                    .join(",")
            });
            Ok(Output::new(
                json!({"abs_tol": 1e-12, "rel_tol": 1e-14}),
                json!({"depth": depth, "atoms": mu.len(), "rows": rows}),
            )?
            .with_csv(csv))
        }
        Command::FGraph { lo, hi, steps } => {
            let rows = f_graph(*lo, *hi, *steps)?;
            let csv = f_graph_csv(&rows);
            let pts: Vec<Value> = rows.iter().map(|(l, f)| json!({"lambda": l, "f": f})).collect();
            Ok(Output::new(json!({"threshold_tol": THRESHOLD_TOL}), pts)?.with_csv(csv))
        }
        Command::VerifyInequalities { profile, seed } => {
            let p = match profile {
                ProfileArg::Small => Profile::Small,
                ProfileArg::Full => Profile::Full,
            };
            let s = run_suite(p, *seed)?;
            let code = if s.passed() { EXIT_OK } else { EXIT_COMPUTATION };
            let csv = csv_of("check,trials,violations", &s.checks, |c| {
                format!("{},{},{}", c.name, c.trials, c.violations)
            });
            let mut out = Output::new(Value::Null, &s)?.with_csv(csv);
            out.code = code;
            Ok(out)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Mahler(_) => "mahler",
        Command::Roots { .. } => "roots",
        Command::Irreducible(_) => "irreducible",
        Command::SchurCohn { .. } => "schur-cohn",
        Command::CheckLambda { .. } => "check-lambda",
        Command::Search { .. } => "search",
        Command::Family { .. } => "family",
        Command::Qfamily { .. } => "qfamily",
        Command::Gauss2d { .. } => "gauss2d",
        Command::Certify { .. } => "certify",
        Command::DetailProfile { .. } => "detail-profile",
        Command::EntropyProfile { .. } => "entropy-profile",
        Command::FGraph { .. } => "f-graph",
        Command::VerifyInequalities { .. } => "verify-inequalities",
    }
}

/// Parse, run and render. Returns the exit code.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(f) => return fail(f, stderr),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            return fail(invalid("--jobs must be at least 1"), stderr);
        }
        // a pool may already exist when dispatch is called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let out = match run_command(&cli) {
        Ok(o) => o,
        Err(f) => return fail(f, stderr),
    };
    let text = match (&out.csv, cli.csv) {
        (Some(csv), true) => csv.clone(),
        _ => {
            let env = json!({
                "command": command_name(&cli.command),
                "precision_bits": working_bits(),
                "tolerance": out.tolerance,
                "result": out.result,
            });
            let mut s = serde_json::to_string_pretty(&env).expect("json values serialize");
            s.push('\n');
            s
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(Error::from),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    };
    if let Err(e) = written {
        return fail(e.into(), stderr);
    }
    if out.code != EXIT_OK {
        let _ = writeln!(stderr, "{}", json!({"error": "Violations", "message": "property checks reported violations"}));
    }
    out.code
}

fn fail(f: Failure, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "{}", f.body);
    f.code
}
