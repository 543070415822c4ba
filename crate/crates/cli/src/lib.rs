//! `satscale` command-line front end.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use satscale::cnf::{encode_instance, parse_dimacs_with, write_dimacs, CnfFormula, DimacsOptions};
use satscale::exact::{
    brute_force_count, brute_force_solutions, dpll_count_upto2, gf2_solve, CountClass, DpllOutcome, Gf2System, SolveOutcome,
    DEFAULT_DPLL_NODE_BUDGET,
};
use satscale::gen::{check_usa, generate, GenConfig, UsaCheck, DEFAULT_REJECTION_CAP};
use satscale::harness::{
    fit_window, instance_id, measure_usa_probability, optimize_noise, read_scaling_csv, run_scaling_study, write_study_outputs,
    write_usa_curve, FitWindow, NoiseMode, StudyConfig, StudyError, UsaSampling,
};
use satscale::model::{read_native_all, write_native, Family, Instance, ModelSpec, EXACT_COVER_TABLE};
use satscale::rng::{derive_seed, stream, tag};
use satscale::walksat::{walksat_run, WalkSatParams, DEFAULT_MAX_FLIPS, DEFAULT_MAX_TRIES, DEFAULT_NOISE};
use satscale::Execution;

/// Environment variable naming the default output directory of `study` and
/// `usa-curve`.
pub const OUT_DIR_ENV: &str = "SATSCALE_OUT";

pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const BUDGET: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Budget(_) => exit::BUDGET,
            CliError::Io { .. } => exit::IO,
            CliError::Failure(_) => exit::FAILURE,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Budget(_) => "budget",
            CliError::Io { .. } => "io",
            CliError::Failure(_) => "failure",
        }
    }
}

impl From<StudyError> for CliError {
    fn from(e: StudyError) -> Self {
        match e {
            StudyError::Io { path, source } => CliError::Io { path: path.display().to_string(), source },
            StudyError::Csv { ref path, .. } => CliError::Failure(format!("{}: {e}", path.display())),
            StudyError::Config(_) | StudyError::Model(_) | StudyError::WalkSat(_) => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "satscale", version, about = "Unique-solution CSP ensembles, WalkSAT and scaling studies")]
pub struct Cli {
    /// Report errors as a JSON object on stderr.
    #[arg(long, global = true)]
    pub json_errors: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate random instances in the native format.
    Gen(GenArgs),
    /// Keep the instances that have exactly one solution, recording it.
    Filter(FilterArgs),
    /// Convert a native instance to DIMACS CNF.
    Encode(EncodeArgs),
    /// Classify the solution count as zero, one or two-or-more.
    Solve(SolveArgs),
    /// Run WalkSAT and print one JSON record per run.
    Walksat(WalkSatArgs),
    /// Median WalkSAT cost over a size ladder, with an exponential fit.
    Study(StudyArgs),
    /// Fraction of instances with a unique solution over a size ladder.
    UsaCurve(UsaCurveArgs),
    /// Fit exponential growth to a scaling table written by `study`.
    Fit(FitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Native,
    Dimacs,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Dpll,
    Gf2,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Default,
    Optimized,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input file; stdin when absent or `-`.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Input format; detected from the header line when absent.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_parser = family_parser())]
    pub family: Family,
    /// Number of variables.
    #[arg(long)]
    pub n: usize,
    /// Clause count; the family's threshold value when absent.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw XORSAT parities at random instead of all zero.
    #[arg(long)]
    pub raw_parity: bool,
    #[arg(long, default_value_t = DEFAULT_REJECTION_CAP)]
    pub rejection_cap: u64,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_DPLL_NODE_BUDGET)]
    pub dpll_budget: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Which instance of a multi-instance file to encode.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = Method::Dpll)]
    pub method: Method,
    /// DPLL node budget.
    #[arg(long, default_value_t = DEFAULT_DPLL_NODE_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub index: usize,
}

#[derive(Debug, Args)]
pub struct WalkSatArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_NOISE)]
    pub noise: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_FLIPS)]
    pub max_flips: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_TRIES)]
    pub max_tries: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent runs; run `r > 0` is seeded from `(seed, r)`.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Instance id written into the records.
    #[arg(long)]
    pub id: Option<String>,
    /// Tune the noise instead and print the best probe.
    #[arg(long)]
    pub tune: bool,
    #[arg(long, default_value_t = satscale::harness::DEFAULT_RUNS_PER_PROBE)]
    pub runs_per_probe: usize,
    #[arg(long, default_value_t = 0)]
    pub index: usize,
}

#[derive(Debug, Args)]
pub struct LadderArgs {
    #[arg(long, value_parser = family_parser())]
    pub family: Family,
    /// `start:stop:step` (inclusive), a comma list, or `table1` for the
    /// tabulated exact-cover sizes.
    #[arg(long)]
    pub sizes: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Run on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
    /// Output directory; defaults to $SATSCALE_OUT, then the current directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[arg(long, default_value_t = 100)]
    pub per_size: usize,
    #[arg(long, value_enum, default_value_t = Mode::Default)]
    pub mode: Mode,
    #[arg(long, default_value_t = DEFAULT_NOISE)]
    pub noise: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_FLIPS)]
    pub max_flips: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_TRIES)]
    pub max_tries: u64,
    #[arg(long, default_value_t = 1)]
    pub runs_per_instance: usize,
    #[arg(long, default_value_t = satscale::harness::DEFAULT_RUNS_PER_PROBE)]
    pub runs_per_probe: usize,
    /// Generation attempts per size; 1000 per requested instance when absent.
    #[arg(long)]
    pub max_candidates: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_DPLL_NODE_BUDGET)]
    pub dpll_budget: u64,
    /// Fit sizes >= this N instead of the largest half of the ladder.
    #[arg(long)]
    pub fit_from: Option<usize>,
}

#[derive(Debug, Args)]
pub struct UsaCurveArgs {
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_DPLL_NODE_BUDGET)]
    pub dpll_budget: u64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Scaling table (CSV) written by `study`.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Fit sizes >= this N instead of the largest half.
    #[arg(long, conflicts_with = "all")]
    pub fit_from: Option<usize>,
    /// Fit every size.
    #[arg(long)]
    pub all: bool,
}

fn family_parser() -> impl clap::builder::TypedValueParser<Value = Family> {
    use clap::builder::TypedValueParser;
    clap::builder::PossibleValuesParser::new(Family::ALL.map(Family::name))
        .map(|s| s.parse::<Family>().expect("listed family name"))
}

pub fn command() -> clap::Command {
    Cli::command()
}

/// Parses a size ladder: `start:stop:step`, `a,b,c` or `table1`.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("bad size ladder '{spec}'"));
    let sizes: Vec<usize> = if spec == "table1" {
        EXACT_COVER_TABLE.iter().map(|&(n, _)| n).collect()
    } else if spec.contains(':') {
        let parts: Vec<usize> = spec.split(':').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else { return Err(bad()) };
        if step == 0 || start > stop {
            return Err(bad());
        }
        (start..=stop).step_by(step).collect()
    } else {
        spec.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad());
    }
    Ok(sizes)
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
            Ok(s)
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => io::stdout().write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn detect_format(text: &str) -> Format {
    let header = text.lines().map(str::trim).find(|l| l.starts_with("p "));
    match header {
        Some(h) if h.split_whitespace().nth(1) == Some("cnf") => Format::Dimacs,
        _ => Format::Native,
    }
}

enum Problem {
    Native(Instance),
    Cnf(CnfFormula),
}

impl Problem {
    fn formula(&self) -> CnfFormula {
        match self {
            Problem::Native(i) => encode_instance(i),
            Problem::Cnf(f) => f.clone(),
        }
    }

    fn default_id(&self) -> String {
        match self {
            Problem::Native(i) => format!("{}-n{}", i.family, i.n_vars),
            Problem::Cnf(f) => format!("cnf-n{}", f.n_vars()),
        }
    }
}

fn read_instances(input: &InputArgs) -> Result<Vec<Instance>, CliError> {
    let text = read_input(input.input.as_deref())?;
    match input.format.unwrap_or_else(|| detect_format(&text)) {
        Format::Native => read_native_all(&text).map_err(|e| CliError::Usage(e.to_string())),
        f => Err(CliError::Usage(format!("expected native instances, got {f:?} input"))),
    }
}

fn read_problem(input: &InputArgs, index: usize) -> Result<Problem, CliError> {
    let text = read_input(input.input.as_deref())?;
    match input.format.unwrap_or_else(|| detect_format(&text)) {
        Format::Native => {
            let mut all = read_native_all(&text).map_err(|e| CliError::Usage(e.to_string()))?;
            if index >= all.len() {
                return Err(CliError::Usage(format!("instance {index} requested but the file holds {}", all.len())));
            }
            Ok(Problem::Native(all.swap_remove(index)))
        }
        Format::Dimacs => parse_dimacs_with(&text, DimacsOptions { keep_comments: true })
            .map(Problem::Cnf)
            .map_err(|e| CliError::Usage(e.to_string())),
        f => Err(CliError::Usage(format!("{f:?} is not an instance format"))),
    }
}

fn out_dir(arg: &Option<PathBuf>) -> PathBuf {
    arg.clone().or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."))
}

fn execution(ladder: &LadderArgs) -> Execution {
    if ladder.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn outcome_json(method: &str, o: &SolveOutcome) -> serde_json::Value {
    json!({
        "method": method,
        "count_class": o.count_class,
        "witness": o.witness.as_ref().map(|w| w.to_bitstring()),
        "second_witness": o.second_witness.as_ref().map(|w| w.to_bitstring()),
    })
}

fn cmd_gen(a: &GenArgs) -> Result<(), CliError> {
    let spec = match a.m {
        Some(m) => ModelSpec::custom(a.family, a.n, m),
        None => ModelSpec::at_threshold(a.family, a.n),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = GenConfig { rejection_cap: a.rejection_cap, raw_parity: a.raw_parity };
    let mut text = String::new();
    for i in 0..a.count {
        let mut rng = stream(a.seed, &[tag::GENERATE, a.family.stream_label(), a.n as u64, i as u64]);
        let inst = generate(&spec, &mut rng, &cfg).map_err(|e| CliError::Budget(e.to_string()))?;
        text += &format!("# {}\n", instance_id(a.family, a.n, i as u64));
        text += &write_native(&inst);
    }
    write_output(a.output.as_deref(), &text)
}

fn cmd_filter(a: &FilterArgs) -> Result<(), CliError> {
    let all = read_instances(&a.input)?;
    let total = all.len();
    let mut text = String::new();
    let mut kept = 0;
    let mut undecided = 0;
    for mut inst in all {
        match check_usa(&inst, a.dpll_budget) {
            UsaCheck::Unique(s) => {
                inst.known_solution = Some(s);
                text += &write_native(&inst);
                kept += 1;
            }
            UsaCheck::NotUnique(_) => {}
            UsaCheck::BudgetExceeded => undecided += 1,
        }
    }
    write_output(a.output.as_deref(), &text)?;
    eprintln!("kept {kept} of {total} instances ({undecided} undecided)");
    Ok(())
}

fn cmd_encode(a: &EncodeArgs) -> Result<(), CliError> {
    let formula = read_problem(&a.input, a.index)?.formula();
    write_output(a.output.as_deref(), &write_dimacs(&formula))
}

fn cmd_solve(a: &SolveArgs) -> Result<(), CliError> {
    let problem = read_problem(&a.input, a.index)?;
    let value = match a.method {
        Method::Dpll => match dpll_count_upto2(&problem.formula(), a.budget) {
            DpllOutcome::Complete(o) => outcome_json("dpll", &o),
            DpllOutcome::BudgetExceeded { nodes } => {
                return Err(CliError::Budget(format!("DPLL node budget exhausted after {nodes} nodes")))
            }
        },
        Method::Gf2 => match &problem {
            Problem::Native(inst) if inst.family.is_xorsat() => {
                let sol = gf2_solve(&Gf2System::from_instance(inst));
                let mut v = outcome_json("gf2", &sol.to_outcome());
                v["rank"] = json!(sol.rank);
                v
            }
            _ => return Err(CliError::Usage("gf2 needs a native XORSAT instance".into())),
        },
        Method::Brute => {
            let f = problem.formula();
            let count = brute_force_count(&f, 2).map_err(|e| CliError::Usage(e.to_string()))?;
            let sols = brute_force_solutions(&f, 2).map_err(|e| CliError::Usage(e.to_string()))?;
            let o = SolveOutcome {
                count_class: CountClass::from_count(count),
                witness: sols.first().cloned(),
                second_witness: sols.get(1).cloned(),
            };
            outcome_json("brute", &o)
        }
    };
    println!("{value}");
    Ok(())
}

fn cmd_walksat(a: &WalkSatArgs) -> Result<(), CliError> {
    let problem = read_problem(&a.input, a.index)?;
    let formula = problem.formula();
    let id = a.id.clone().unwrap_or_else(|| problem.default_id());
    let base = WalkSatParams { noise: a.noise, max_flips: a.max_flips, max_tries: a.max_tries, seed: a.seed };
    base.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if a.tune {
        let opt = optimize_noise(&formula, &base, a.runs_per_probe).map_err(|e| CliError::Budget(e.to_string()))?;
        println!("{}", json!({ "instance_id": id, "noise": opt.noise, "flips": opt.flips, "probes": opt.probes }));
        return Ok(());
    }
    if a.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    let mut unsolved = 0;
    for r in 0..a.runs {
        let seed = if r == 0 { a.seed } else { derive_seed(a.seed, &[r as u64]) };
        let rec = walksat_run(&formula, &WalkSatParams { seed, ..base }, &id).map_err(|e| CliError::Usage(e.to_string()))?;
        unsolved += usize::from(!rec.solved);
        println!("{}", rec.to_json_line());
    }
    if unsolved > 0 {
        return Err(CliError::Budget(format!("{unsolved} of {} runs exhausted the flip budget", a.runs)));
    }
    Ok(())
}

fn cmd_study(a: &StudyArgs) -> Result<(), CliError> {
    let sizes = parse_sizes(&a.ladder.sizes)?;
    let mut c = StudyConfig::new(a.ladder.family, sizes, a.per_size);
    c.walksat = WalkSatParams { noise: a.noise, max_flips: a.max_flips, max_tries: a.max_tries, seed: 0 };
    c.noise_mode = match a.mode {
        Mode::Default => NoiseMode::Default,
        Mode::Optimized => NoiseMode::Optimized,
    };
    c.runs_per_instance = a.runs_per_instance;
    c.runs_per_probe = a.runs_per_probe;
    c.master_seed = a.ladder.seed;
    if let Some(m) = a.max_candidates {
        c.max_candidates = m;
    }
    c.dpll_budget = a.dpll_budget;
    c.fit_window = a.fit_from.map_or(FitWindow::LargestHalf, FitWindow::From);
    c.exec = execution(&a.ladder);
    c.workers = a.ladder.workers;
    let report = run_scaling_study(&c)?;
    let files = write_study_outputs(&report, &out_dir(&a.ladder.out_dir))?;
    for s in report.sizes.iter().filter(|s| s.short) {
        eprintln!("N={}: only {} of {} unique-solution instances found", s.n, s.instances, s.requested);
    }
    let fit = match &report.fit {
        Ok(f) => json!({ "A": f.prefactor, "mu": f.mu, "stderr": f.stderr, "window": f.window }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let files: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    println!("{}", json!({ "study": report.stem, "fit": fit, "files": files }));
    Ok(())
}

fn cmd_usa_curve(a: &UsaCurveArgs) -> Result<(), CliError> {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let sizes = parse_sizes(&a.ladder.sizes)?;
    let sampling = UsaSampling { dpll_budget: a.dpll_budget, exec: execution(&a.ladder), ..UsaSampling::default() };
    let points = execution(&a.ladder).with_workers(a.ladder.workers, || {
        sizes
            .iter()
            .map(|&n| measure_usa_probability(a.ladder.family, n, a.trials, a.ladder.seed, &sampling))
            .collect::<Result<Vec<_>, _>>()
    });
    let points = points.map_err(|e| CliError::Usage(e.to_string()))?;
    let dir = out_dir(&a.ladder.out_dir);
    fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    let path = dir.join(format!("{}_usa.csv", a.ladder.family));
    write_usa_curve(&points, &path)?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_fit(a: &FitArgs) -> Result<(), CliError> {
    let rows = read_scaling_csv(&a.input)?;
    let points: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, r.median)).collect();
    let window = match (a.all, a.fit_from) {
        (true, _) => FitWindow::All,
        (false, Some(n)) => FitWindow::From(n),
        (false, None) => FitWindow::LargestHalf,
    };
    let fit = fit_window(&points, &window).map_err(|e| CliError::Failure(e.to_string()))?;
    println!("{}", serde_json::to_string(&fit).expect("fit serializes"));
    Ok(())
}

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Filter(a) => cmd_filter(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Walksat(a) => cmd_walksat(a),
        Command::Study(a) => cmd_study(a),
        Command::UsaCurve(a) => cmd_usa_curve(a),
        Command::Fit(a) => cmd_fit(a),
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let json_errors = args.iter().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return exit::OK;
        }
        Err(e) => {
            if json_errors {
                let msg = e.to_string();
                let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ");
                eprintln!("{}", json!({ "error": "usage", "message": first, "exit_code": exit::USAGE }));
            } else {
                let _ = e.print();
            }
            return exit::USAGE;
        }
    };
    match dispatch(&cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            if cli.json_errors {
                eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() }));
            } else {
                eprintln!("satscale: {e}");
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ladders() {
        assert_eq!(parse_sizes("24:96:8").unwrap(), vec![24, 32, 40, 48, 56, 64, 72, 80, 88, 96]);
        assert_eq!(parse_sizes("10:15:10").unwrap(), vec![10]);
        assert_eq!(parse_sizes("table1").unwrap(), vec![16, 32, 64, 128, 192, 256]);
        assert_eq!(parse_sizes("8, 16,32").unwrap(), vec![8, 16, 32]);
        for bad in ["", "1:2", "5:1:1", "1:9:0", "16,8", "a,b", "8,8"] {
            assert!(matches!(parse_sizes(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn format_detection() {
        assert_eq!(detect_format("c hi\np cnf 3 1\n1 2 0\n"), Format::Dimacs);
        assert_eq!(detect_format("# x\np native locked-1in3 4 1\n"), Format::Native);
    }

    #[test]
    fn parser_is_consistent() {
        command().debug_assert();
    }
}
