//! The `derham` command: verification jobs, single computations and the
//! self-test, with human-readable summaries and JSON reports.

pub mod config;
pub mod parse;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use derham_core::harness::{default_block_polynomials, random_polynomial, support_dim, WindowRecord};
use derham_core::poly::default_var_names;
use derham_core::{
    cech_derham_total, check_theorem3_bound, property_corpus, stabilized_derham, verify_building_blocks,
    verify_theorem1, verify_theorem2, weyl, CechSpec, DeRhamResult, Error, HarnessConfig, Ideal, ModuleKind,
    Polynomial, PropertyCheck, Verdict, VerificationReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{parse_config_file, resolve, ConfigError, Overrides};
use crate::parse::{parse_polynomial, parse_vars, ParseError};

pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "derham", version, about = "De Rham cohomology of local cohomology modules, computed exactly")]
struct Cli {
    /// Cap schedule: a list `4,6,8` or a top cap `N` for `4,6,..,N`.
    #[arg(long, global = true)]
    k_cap: Option<String>,
    /// Initial strand half-width.
    #[arg(long, global = true)]
    degree_span: Option<String>,
    /// Number of consecutive caps that must agree.
    #[arg(long, global = true)]
    stab_window: Option<String>,
    /// Maximum strand widenings per cap.
    #[arg(long, global = true)]
    widen_budget: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Attempts allowed for random changes of variables.
    #[arg(long, global = true)]
    retries: Option<String>,
    /// `key = value` settings file (also `DERHAM_CONFIG`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[arg(long, global = true)]
    quiet: bool,
    /// Record wall time in reports.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a theorem on an input.
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Stabilized De Rham dims of one module.
    Compute(ComputeArgs),
    /// Run the property corpus.
    Selftest(SelftestArgs),
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Zero-dimensional ideals: H^n counts the points.
    Theorem1(IdealArgs),
    /// Homogeneous ideals of height n - 1.
    Theorem2(IdealArgs),
    /// Closed forms of the building-block modules.
    Blocks(BlocksArgs),
}

#[derive(Debug, Args)]
struct IdealArgs {
    /// Comma-separated variable names.
    #[arg(long)]
    vars: String,
    /// One generator; repeat for more.
    #[arg(long = "ideal", required = true)]
    ideal: Vec<String>,
}

#[derive(Debug, Args)]
struct BlocksArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    vars: Option<String>,
    /// Squarefree polynomial for the localization checks; repeat for more.
    #[arg(long = "f")]
    f: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModuleArg {
    #[value(name = "R")]
    R,
    #[value(name = "E")]
    E,
    #[value(name = "Rf")]
    Rf,
    #[value(name = "HP")]
    Hp,
    #[value(name = "cech")]
    Cech,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    #[arg(long)]
    module: ModuleArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    vars: Option<String>,
    /// The localized polynomial for `Rf`.
    #[arg(long)]
    f: Option<String>,
    /// Čech generators for `cech`; repeat for more.
    #[arg(long = "ideal")]
    ideal: Vec<String>,
    /// The single nonzero local cohomology degree for `cech`.
    #[arg(long)]
    c: Option<usize>,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Random samples per algebraic identity.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Random coordinate changes per module class.
    #[arg(long, default_value_t = 3)]
    changes: usize,
    /// Parse/print round trips.
    #[arg(long, default_value_t = 50)]
    roundtrips: usize,
}

/// Anything that stops a command before it produces a verdict.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Config(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) => core_exit_code(e),
            CliError::Io { .. } => 1,
        }
    }
}

/// Input that fails a theorem's hypotheses is a usage error; an exhausted
/// random search or cap budget is inconclusive; anything else is a failure.
pub fn core_exit_code(e: &Error) -> i32 {
    match e {
        Error::NotZeroDimensional
        | Error::UnitIdeal
        | Error::EmptyIdeal
        | Error::NotHomogeneous
        | Error::WrongHeight { .. }
        | Error::InvalidConfig(_)
        | Error::AmbientMismatch { .. }
        | Error::ZeroInput
        | Error::ZeroDivisor
        | Error::UnknownClass(_) => EXIT_USAGE,
        Error::NoStabilization { .. } | Error::NoGoodChangeFound { .. } => Verdict::Inconclusive.exit_code(),
        _ => Verdict::Fail.exit_code(),
    }
}

#[derive(Debug, Clone, Serialize)]
struct ComputeInput {
    module: String,
    variables: Vec<String>,
    generators: Vec<String>,
    c: Option<usize>,
}

/// Report of `compute`.
#[derive(Debug, Clone, Serialize)]
struct ComputeReport {
    input: ComputeInput,
    homological: Option<Vec<usize>>,
    cohomological: Option<Vec<usize>>,
    strategy: Option<derham_core::Strategy>,
    vanishing_bound: Option<bool>,
    windows: Vec<WindowRecord>,
    seed: u64,
    verdict: Verdict,
    wall_time_ms: Option<u64>,
}

/// Report of `selftest`.
#[derive(Debug, Clone, Serialize)]
struct SelftestReport {
    checks: Vec<PropertyCheck>,
    seed: u64,
    verdict: Verdict,
    wall_time_ms: Option<u64>,
}

struct Output<'a> {
    json: Option<PathBuf>,
    quiet: bool,
    out: &'a mut dyn Write,
}

impl Output<'_> {
    fn say(&mut self, line: &str) {
        if !self.quiet {
            let _ = writeln!(self.out, "{line}");
        }
    }

    fn emit<T: Serialize>(&mut self, report: &T) -> Result<(), CliError> {
        let Some(path) = &self.json else { return Ok(()) };
        let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
        text.push('\n');
        if path.as_os_str() == "-" {
            let _ = self.out.write_all(text.as_bytes());
            return Ok(());
        }
        std::fs::write(path, text)
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
    }
}

/// Runs the command line with the real environment, standard output and
/// standard error; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env: BTreeMap<String, String> = std::env::vars().filter(|(k, _)| k.starts_with("DERHAM_")).collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &env, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with an explicit environment and output streams.
pub fn run_with<I, T>(argv: I, env: &BTreeMap<String, String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match execute(cli, env, out) {
        Ok(v) => v.exit_code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(cli: &Cli, env: &BTreeMap<String, String>) -> Result<HarnessConfig, CliError> {
    let flags = Overrides {
        k_cap: cli.k_cap.clone(),
        degree_span: cli.degree_span.clone(),
        stab_window: cli.stab_window.clone(),
        widen_budget: cli.widen_budget.clone(),
        seed: cli.seed.clone(),
        retries: cli.retries.clone(),
    };
    let path = cli.config.clone().or_else(|| env.get("DERHAM_CONFIG").map(PathBuf::from));
    let file = match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| ConfigError::Unreadable { path: p.display().to_string(), message: e.to_string() })?;
            parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    Ok(resolve(&flags, env, &file)?)
}

fn execute(cli: Cli, env: &BTreeMap<String, String>, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let config = load_config(&cli, env)?;
    let timings = cli.timings;
    // JSON on standard output replaces the summary.
    let quiet = cli.quiet || cli.json.as_ref().is_some_and(|p| p.as_os_str() == "-");
    let mut output = Output { json: cli.json.clone(), quiet, out };
    let started = Instant::now();
    let elapsed = || timings.then(|| started.elapsed().as_millis() as u64);
    match cli.command {
        Command::Verify { what } => {
            let mut report = match what {
                VerifyCommand::Theorem1(args) => {
                    let (vars, ideal) = ideal_from(&args)?;
                    verify_theorem1(&ideal, Some(&vars), &config)?
                }
                VerifyCommand::Theorem2(args) => {
                    let (vars, ideal) = ideal_from(&args)?;
                    verify_theorem2(&ideal, Some(&vars), &config)?
                }
                VerifyCommand::Blocks(args) => {
                    let vars = match &args.vars {
                        Some(v) => parse_vars(v)?,
                        None => default_var_names(args.n),
                    };
                    if vars.len() != args.n {
                        return Err(CliError::Usage(format!("--vars lists {} names but --n is {}", vars.len(), args.n)));
                    }
                    let fs = if args.f.is_empty() {
                        default_block_polynomials(args.n)
                    } else {
                        args.f.iter().map(|s| parse_polynomial(s, &vars)).collect::<Result<_, _>>()?
                    };
                    verify_building_blocks(args.n, &fs, Some(&vars), &config)?
                }
            };
            report.wall_time_ms = elapsed();
            summarize(&mut output, &report);
            output.emit(&report)?;
            Ok(report.verdict)
        }
        Command::Compute(args) => {
            let mut report = compute(&args, &config)?;
            report.wall_time_ms = elapsed();
            let dims = |d: &Option<Vec<usize>>| d.as_ref().map_or("-".to_string(), |v| format!("{v:?}"));
            output.say(&format!("module {}", report.input.module));
            output.say(&format!("  homological   h_0..h_n: {}", dims(&report.homological)));
            output.say(&format!("  cohomological H^0..H^n: {}", dims(&report.cohomological)));
            output.say(&format!("verdict: {}", verdict_text(report.verdict)));
            output.emit(&report)?;
            Ok(report.verdict)
        }
        Command::Selftest(args) => {
            let mut checks = property_corpus(&config, args.samples, args.changes)?;
            checks.push(roundtrip_check(config.seed, args.roundtrips));
            let verdict = if checks.iter().all(PropertyCheck::passed) { Verdict::Pass } else { Verdict::Fail };
            for c in &checks {
                let mark = if c.passed() { "pass" } else { "FAIL" };
                output.say(&format!("{mark} {:<22} {} samples, {} failures", c.name, c.samples, c.failures));
                for d in &c.detail {
                    output.say(&format!("     {d}"));
                }
            }
            output.say(&format!("verdict: {}", verdict_text(verdict)));
            let report = SelftestReport { checks, seed: config.seed, verdict, wall_time_ms: elapsed() };
            output.emit(&report)?;
            Ok(verdict)
        }
    }
}

fn ideal_from(args: &IdealArgs) -> Result<(Vec<String>, Ideal), CliError> {
    let vars = parse_vars(&args.vars)?;
    let gens = args.ideal.iter().map(|s| parse_polynomial(s, &vars)).collect::<Result<Vec<_>, _>>()?;
    Ok((vars.clone(), Ideal::new(vars.len(), gens)?))
}

fn compute(args: &ComputeArgs, config: &HarnessConfig) -> Result<ComputeReport, CliError> {
    let vars = match (&args.vars, args.n) {
        (Some(v), n) => {
            let vars = parse_vars(v)?;
            if n.is_some_and(|n| n != vars.len()) {
                return Err(CliError::Usage(format!("--vars lists {} names but --n is {}", vars.len(), n.unwrap_or(0))));
            }
            vars
        }
        (None, Some(n)) => default_var_names(n),
        (None, None) => return Err(CliError::Usage("give --n or --vars".into())),
    };
    let n = vars.len();
    if n == 0 {
        return Err(CliError::Usage("need at least one variable".into()));
    }
    let ops = weyl::standard_partials(n);
    let stab = &config.stabilization;
    let mut generators = Vec::new();
    let (result, support, c) = match args.module {
        ModuleArg::Cech => {
            if args.ideal.is_empty() {
                return Err(CliError::Usage("--module cech needs at least one --ideal".into()));
            }
            let c = args.c.ok_or_else(|| CliError::Usage("--module cech needs --c".into()))?;
            let gens = args.ideal.iter().map(|s| parse_polynomial(s, &vars)).collect::<Result<Vec<_>, _>>()?;
            generators = gens.iter().map(|g| g.to_string_with(&vars)).collect();
            let spec = CechSpec::new(gens)?;
            (cech_derham_total(&spec, c, &ops, stab), None, Some(c))
        }
        other => {
            let kind = match other {
                ModuleArg::R => ModuleKind::Polynomial,
                ModuleArg::E => ModuleKind::InjectiveHull,
                ModuleArg::Hp if n < 2 => return Err(CliError::Usage("--module HP needs n >= 2".into())),
                ModuleArg::Hp => ModuleKind::ExtendedHull,
                _ => {
                    let src = args.f.as_ref().ok_or_else(|| CliError::Usage("--module Rf needs --f".into()))?;
                    let f: Polynomial = parse_polynomial(src, &vars)?;
                    generators.push(f.to_string_with(&vars));
                    ModuleKind::Localized(f)
                }
            };
            let support = support_dim(&kind, n);
            (stabilized_derham(&kind, n, &ops, stab), Some(support), None)
        }
    };
    let module = match args.module {
        ModuleArg::R => "R",
        ModuleArg::E => "E",
        ModuleArg::Rf => "Rf",
        ModuleArg::Hp => "HP",
        ModuleArg::Cech => "cech",
    };
    let input = ComputeInput { module: module.into(), variables: vars, generators, c };
    let record = |t: &[derham_core::WindowTrace]| -> Vec<WindowRecord> {
        t.iter()
            .map(|w| WindowRecord {
                path: module.to_string(),
                k_cap: w.k_cap,
                span: w.span,
                settled: w.span_settled,
                total_dims: w.dims.clone(),
            })
            .collect()
    };
    let report = match result {
        Ok(r) => {
            let bound = support.map(|s| check_theorem3_bound(&r, s));
            let verdict = if bound == Some(false) { Verdict::Fail } else { Verdict::Pass };
            let DeRhamResult { homological_dims, cohomological_dims, window_trace, strategy, .. } = r;
            ComputeReport {
                input,
                homological: Some(homological_dims),
                cohomological: Some(cohomological_dims),
                strategy: Some(strategy),
                vanishing_bound: bound,
                windows: record(&window_trace),
                seed: config.seed,
                verdict,
                wall_time_ms: None,
            }
        }
        Err(Error::NoStabilization { trace }) => ComputeReport {
            input,
            homological: None,
            cohomological: None,
            strategy: None,
            vanishing_bound: None,
            windows: record(&trace),
            seed: config.seed,
            verdict: Verdict::Inconclusive,
            wall_time_ms: None,
        },
        Err(e) => return Err(e.into()),
    };
    Ok(report)
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive (no stabilization)",
    }
}

fn summarize(output: &mut Output<'_>, report: &VerificationReport) {
    output.say(&format!("{} over ({})", report.theorem, report.input.variables.join(", ")));
    output.say(&format!("  ideal: ({})", report.input.generators.join(", ")));
    for (name, e) in &report.expected {
        let dims: Vec<String> = e.cohomological.iter().map(|d| d.map_or("?".into(), |d| d.to_string())).collect();
        output.say(&format!("  expected {name}: H^0..H^n = [{}]  ({})", dims.join(", "), e.formula));
    }
    for (name, c) in &report.computed {
        match &c.cohomological {
            Some(d) => output.say(&format!("  {name}: H^0..H^n = {d:?}")),
            None => output.say(&format!("  {name}: {}", c.note.as_deref().unwrap_or("-"))),
        }
    }
    output.say(&format!("verdict: {}", verdict_text(report.verdict)));
}

/// Random expression text over `vars`, with parentheses, powers, unary minus
/// and rational literals.
pub fn random_expression(rng: &mut ChaCha8Rng, vars: &[String], depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..3) {
            0 => rng.gen_range(0..20).to_string(),
            1 => format!("{}/{}", rng.gen_range(0..20), rng.gen_range(1..9)),
            _ => vars[rng.gen_range(0..vars.len())].clone(),
        };
    }
    let a = random_expression(rng, vars, depth - 1);
    match rng.gen_range(0..5) {
        0 => format!("{a} + {}", random_expression(rng, vars, depth - 1)),
        1 => format!("{a} - {}", random_expression(rng, vars, depth - 1)),
        2 => format!("({a})*({})", random_expression(rng, vars, depth - 1)),
        3 => format!("({a})^{}", rng.gen_range(0..4)),
        _ => format!("-({a})"),
    }
}

/// Parse, print and parse again: the printed form must be a fixed point.
pub fn roundtrip_check(seed: u64, samples: usize) -> PropertyCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut check = PropertyCheck { name: "parse-roundtrip".into(), samples: 0, failures: 0, detail: Vec::new() };
    for i in 0..samples {
        let n = rng.gen_range(1..=4);
        let vars = default_var_names(n);
        let src = if i % 2 == 0 {
            random_expression(&mut rng, &vars, 4)
        } else {
            random_polynomial(&mut rng, n, 5, 5).to_string_with(&vars)
        };
        let ok = match parse_polynomial(&src, &vars) {
            Ok(p) => {
                let printed = p.to_string_with(&vars);
                parse_polynomial(&printed, &vars).is_ok_and(|q| q == p && q.to_string_with(&vars) == printed)
            }
            Err(_) => false,
        };
        check.samples += 1;
        if !ok {
            check.failures += 1;
            if check.detail.len() < 5 {
                check.detail.push(src);
            }
        }
    }
    check
}
