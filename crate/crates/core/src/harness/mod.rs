//! Scaling studies: build USA ensembles over a size ladder, run WalkSAT at
//! the default or a per-instance tuned noise, summarize each size and fit
//! the exponential growth of the median.
//!
//! Every random draw derives from `(master seed, stage, family, N, index)`
//! and per-instance work is mapped in input order, so reports and output
//! files are identical for any worker count.

pub mod fit;
pub mod noise;
pub mod usa;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::encode_instance;
use crate::exact::DEFAULT_DPLL_NODE_BUDGET;
use crate::exec::Execution;
use crate::gen::{check_usa, generate, GenConfig, UsaCheck};
use crate::model::{Family, Instance, ModelError, ModelSpec};
use crate::rng::{derive_seed, stream, tag};
use crate::walksat::{FlipStats, RunRecord, WalkSat, WalkSatError, WalkSatParams};

pub use fit::{fit_exponential, fit_window, FitError, FitWindow, ScalingFit};
pub use noise::{optimize_noise, optimize_noise_with, NoiseError, NoiseObjective, NoiseOptimum, NoiseSearch};
pub use usa::{measure_usa_probability, UsaCurvePoint, UsaSampling};

pub const DEFAULT_RUNS_PER_PROBE: usize = 11;
/// Candidates generated per unit of `per_size` before a size is given up.
pub const DEFAULT_CANDIDATES_PER_INSTANCE: usize = 1000;
const GENERATION_BATCH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Every run uses `walksat.noise`.
    #[default]
    Default,
    /// Noise tuned per instance; the instance cost is the median at the
    /// tuned noise.
    Optimized,
}

impl NoiseMode {
    pub fn name(self) -> &'static str {
        match self {
            NoiseMode::Default => "default",
            NoiseMode::Optimized => "optimized",
        }
    }
}

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("invalid study: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    WalkSat(#[from] WalkSatError),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("reading {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub family: Family,
    /// Strictly increasing.
    pub sizes: Vec<usize>,
    pub per_size: usize,
    /// Noise (default mode), flip budget, restarts. The seed is ignored:
    /// run seeds derive from `master_seed`.
    pub walksat: WalkSatParams,
    pub noise_mode: NoiseMode,
    pub runs_per_instance: usize,
    pub runs_per_probe: usize,
    pub master_seed: u64,
    /// Generation attempts per size before reporting a shortfall.
    pub max_candidates: usize,
    pub dpll_budget: u64,
    pub gen: GenConfig,
    pub fit_window: FitWindow,
    pub exec: Execution,
    /// Worker threads; 0 means the global pool.
    pub workers: usize,
}

impl StudyConfig {
    pub fn new(family: Family, sizes: Vec<usize>, per_size: usize) -> Self {
        StudyConfig {
            family,
            sizes,
            per_size,
            walksat: WalkSatParams::default(),
            noise_mode: NoiseMode::Default,
            runs_per_instance: 1,
            runs_per_probe: DEFAULT_RUNS_PER_PROBE,
            master_seed: 0,
            max_candidates: per_size.saturating_mul(DEFAULT_CANDIDATES_PER_INSTANCE),
            dpll_budget: DEFAULT_DPLL_NODE_BUDGET,
            gen: GenConfig::default(),
            fit_window: FitWindow::default(),
            exec: Execution::default(),
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<(), StudyError> {
        let bad = |m: &str| Err(StudyError::Config(m.to_string()));
        if self.sizes.is_empty() {
            return bad("empty size ladder");
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad("size ladder must be strictly increasing");
        }
        if self.per_size == 0 {
            return bad("instances per size must be at least 1");
        }
        if self.runs_per_instance == 0 || self.runs_per_probe == 0 {
            return bad("run counts must be at least 1");
        }
        self.walksat.validate()?;
        for &n in &self.sizes {
            ModelSpec::at_threshold(self.family, n)?;
        }
        Ok(())
    }

    /// File-name stem for this study's outputs.
    pub fn stem(&self) -> String {
        format!("{}_{}", self.family, self.noise_mode.name())
    }
}

/// One USA instance kept for a study, with its candidate index.
#[derive(Debug, Clone)]
pub struct KeptInstance {
    pub index: u64,
    pub id: String,
    pub instance: Instance,
}

/// Generation bookkeeping for one size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ensemble {
    pub n: usize,
    /// Candidates generated, up to and including the last one kept.
    pub candidates: usize,
    /// Candidates whose generation or count ran out of budget.
    pub undecided: usize,
}

pub fn instance_id(family: Family, n: usize, index: u64) -> String {
    format!("{family}-n{n}-i{index}")
}

/// Generates candidates `0, 1, 2, …` at size `n` and keeps the first
/// `config.per_size` with a unique solution, solution stored. Empty
/// instances (everything pruned) are skipped.
pub fn collect_usa_instances(config: &StudyConfig, n: usize) -> Result<(Vec<KeptInstance>, Ensemble), StudyError> {
    let spec = ModelSpec::at_threshold(config.family, n)?;
    let label = config.family.stream_label();
    let mut kept = Vec::with_capacity(config.per_size);
    let mut candidates = 0;
    let mut undecided = 0;
    let mut start = 0;
    while kept.len() < config.per_size && start < config.max_candidates {
        let end = (start + GENERATION_BATCH).min(config.max_candidates);
        let batch = config.exec.map_range(start..end, |i| {
            let mut rng = stream(config.master_seed, &[tag::GENERATE, label, n as u64, i as u64]);
            let mut inst = generate(&spec, &mut rng, &config.gen).ok()?;
            if inst.n_vars == 0 {
                return Some(None);
            }
            match check_usa(&inst, config.dpll_budget) {
                UsaCheck::Unique(s) => {
                    inst.known_solution = Some(s);
                    Some(Some(inst))
                }
                UsaCheck::NotUnique(_) => Some(None),
                UsaCheck::BudgetExceeded => None,
            }
        });
        for (offset, outcome) in batch.into_iter().enumerate() {
            if kept.len() == config.per_size {
                break;
            }
            candidates += 1;
            match outcome {
                Some(Some(instance)) => {
                    let index = (start + offset) as u64;
                    kept.push(KeptInstance { index, id: instance_id(config.family, n, index), instance });
                }
                Some(None) => {}
                None => undecided += 1,
            }
        }
        start = end;
    }
    Ok((kept, Ensemble { n, candidates, undecided }))
}

/// Result of tuning one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TunedRecord {
    pub instance_id: String,
    pub noise: Option<f64>,
    /// Median flips at the tuned noise; `None` if every probe ran out.
    pub flips: Option<f64>,
    pub probes: usize,
    pub seed: u64,
}

impl TunedRecord {
    pub fn cost(&self) -> f64 {
        self.flips.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub n: usize,
    pub stats: FlipStats,
    pub instances: usize,
    pub requested: usize,
    pub candidates: usize,
    pub undecided: usize,
    /// Fewer USA instances than requested were found.
    pub short: bool,
    /// The clause count is interpolated rather than tabulated.
    pub non_canonical: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub family: Family,
    pub noise_mode: NoiseMode,
    pub stem: String,
    pub sizes: Vec<SizeSummary>,
    pub fit: Result<ScalingFit, FitError>,
    /// Default mode: every WalkSAT run, size by size.
    pub runs: Vec<RunRecord>,
    /// Optimized mode: one record per instance.
    pub tuned: Vec<TunedRecord>,
}

impl StudyReport {
    pub fn medians(&self) -> Vec<(usize, f64)> {
        self.sizes.iter().map(|s| (s.n, s.stats.median)).collect()
    }
}

fn run_default(config: &StudyConfig, n: usize, kept: &[KeptInstance]) -> Vec<RunRecord> {
    let units: Vec<(usize, usize)> =
        (0..kept.len()).flat_map(|k| (0..config.runs_per_instance).map(move |r| (k, r))).collect();
    let label = config.family.stream_label();
    config.exec.map(units, |(k, r)| {
        let inst = &kept[k];
        let params = WalkSatParams {
            seed: derive_seed(config.master_seed, &[tag::WALKSAT, label, n as u64, inst.index, r as u64]),
            ..config.walksat
        };
        WalkSat::new(&encode_instance(&inst.instance)).run(&params, &inst.id)
    })
}

fn run_optimized(config: &StudyConfig, n: usize, kept: &[KeptInstance]) -> Vec<TunedRecord> {
    let label = config.family.stream_label();
    config.exec.map_range(0..kept.len(), |k| {
        let inst = &kept[k];
        let seed = derive_seed(config.master_seed, &[tag::NOISE, label, n as u64, inst.index]);
        let base = WalkSatParams { seed, ..config.walksat };
        match optimize_noise(&encode_instance(&inst.instance), &base, config.runs_per_probe) {
            Ok(opt) => TunedRecord {
                instance_id: inst.id.clone(),
                noise: Some(opt.noise),
                flips: Some(opt.flips),
                probes: opt.probes.len(),
                seed,
            },
            Err(NoiseError::AllNotFound { probes }) => {
                TunedRecord { instance_id: inst.id.clone(), noise: None, flips: None, probes, seed }
            }
            Err(NoiseError::NoRuns) => unreachable!("validated runs_per_probe"),
        }
    })
}

/// Runs the whole study. A size that yields fewer USA instances than
/// requested is kept and flagged `short`; one that yields none is an error.
pub fn run_scaling_study(config: &StudyConfig) -> Result<StudyReport, StudyError> {
    config.validate()?;
    config.exec.with_workers(config.workers, || study_body(config))
}

fn study_body(config: &StudyConfig) -> Result<StudyReport, StudyError> {
    let mut sizes = Vec::new();
    let mut runs = Vec::new();
    let mut tuned = Vec::new();
    for &n in &config.sizes {
        let (kept, ensemble) = collect_usa_instances(config, n)?;
        if kept.is_empty() {
            return Err(StudyError::Config(format!(
                "no unique-solution instance at N={n} within {} candidates",
                config.max_candidates
            )));
        }
        let stats = match config.noise_mode {
            NoiseMode::Default => {
                let recs = run_default(config, n, &kept);
                let stats = crate::walksat::median_flips(&recs)?;
                runs.extend(recs);
                stats
            }
            NoiseMode::Optimized => {
                let recs = run_optimized(config, n, &kept);
                let costs: Vec<f64> = recs.iter().map(TunedRecord::cost).collect();
                tuned.extend(recs);
                FlipStats::from_costs(&costs)?
            }
        };
        sizes.push(SizeSummary {
            n,
            stats,
            instances: kept.len(),
            requested: config.per_size,
            candidates: ensemble.candidates,
            undecided: ensemble.undecided,
            short: kept.len() < config.per_size,
            non_canonical: ModelSpec::at_threshold(config.family, n)?.non_canonical,
        });
    }
    let points: Vec<(usize, f64)> = sizes.iter().map(|s| (s.n, s.stats.median)).collect();
    let fit = fit_window(&points, &config.fit_window);
    Ok(StudyReport { family: config.family, noise_mode: config.noise_mode, stem: config.stem(), sizes, fit, runs, tuned })
}

// ---------------------------------------------------------------------------
// Output files

/// One line of the scaling table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub solved_fraction: f64,
    pub censored: bool,
    pub instances: usize,
    pub short: bool,
}

impl From<&SizeSummary> for ScalingRow {
    fn from(s: &SizeSummary) -> Self {
        ScalingRow {
            n: s.n,
            median: s.stats.median,
            q25: s.stats.q25,
            q75: s.stats.q75,
            solved_fraction: s.stats.solved_fraction,
            censored: s.stats.censored,
            instances: s.instances,
            short: s.short,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum FitDocument<'a> {
    Fit(&'a ScalingFit),
    Refused { error: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StudyError + '_ {
    move |source| StudyError::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> StudyError + '_ {
    move |source| StudyError::Csv { path: path.to_path_buf(), source }
}

pub fn write_scaling_csv(rows: &[ScalingRow], path: &Path) -> Result<(), StudyError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_scaling_csv(path: &Path) -> Result<Vec<ScalingRow>, StudyError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err(path))
}

pub fn fit_json(fit: &Result<ScalingFit, FitError>) -> String {
    let doc = match fit {
        Ok(f) => FitDocument::Fit(f),
        Err(e) => FitDocument::Refused { error: e.to_string() },
    };
    serde_json::to_string_pretty(&doc).expect("fit serializes") + "\n"
}

/// `N ln(median)` pairs; censored sizes are omitted.
pub fn plot_data(rows: &[ScalingRow]) -> String {
    let mut s = String::from("# N ln_median\n");
    for r in rows.iter().filter(|r| r.median.is_finite() && r.median > 0.0) {
        s += &format!("{} {}\n", r.n, r.median.ln());
    }
    s
}

/// Writes `<stem>_scaling.csv`, `<stem>_fit.json`, `<stem>_plot.dat` and
/// `<stem>_runs.jsonl` into `dir`, returning their paths.
pub fn write_study_outputs(report: &StudyReport, dir: &Path) -> Result<Vec<PathBuf>, StudyError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let rows: Vec<ScalingRow> = report.sizes.iter().map(ScalingRow::from).collect();
    let path = |suffix: &str| dir.join(format!("{}_{suffix}", report.stem));

    let csv_path = path("scaling.csv");
    write_scaling_csv(&rows, &csv_path)?;
    let fit_path = path("fit.json");
    fs::write(&fit_path, fit_json(&report.fit)).map_err(io_err(&fit_path))?;
    let plot_path = path("plot.dat");
    fs::write(&plot_path, plot_data(&rows)).map_err(io_err(&plot_path))?;

    let runs_path = path("runs.jsonl");
    let mut out = io::BufWriter::new(fs::File::create(&runs_path).map_err(io_err(&runs_path))?);
    for r in &report.runs {
        writeln!(out, "{}", r.to_json_line()).map_err(io_err(&runs_path))?;
    }
    for t in &report.tuned {
        writeln!(out, "{}", serde_json::to_string(t).expect("record serializes")).map_err(io_err(&runs_path))?;
    }
    out.flush().map_err(io_err(&runs_path))?;
    Ok(vec![csv_path, fit_path, plot_path, runs_path])
}

#[derive(Debug, Serialize)]
struct UsaRow {
    n: usize,
    inv_n: f64,
    trials: usize,
    usa_count: usize,
    p_usa: f64,
    err: f64,
    degenerate: bool,
    undecided: usize,
}

pub fn write_usa_curve(points: &[UsaCurvePoint], path: &Path) -> Result<(), StudyError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for p in points {
        w.serialize(UsaRow {
            n: p.n,
            inv_n: p.inv_n(),
            trials: p.trials,
            usa_count: p.usa_count,
            p_usa: p.p_usa,
            err: p.stderr,
            degenerate: p.degenerate,
            undecided: p.undecided,
        })
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(family: Family, mode: NoiseMode) -> StudyConfig {
        let mut c = StudyConfig::new(family, vec![12, 16, 20], 6);
        c.noise_mode = mode;
        c.runs_per_probe = 3;
        c.master_seed = 99;
        c
    }

    #[test]
    fn config_validation() {
        let mut c = small(Family::Locked1in3, NoiseMode::Default);
        assert!(c.validate().is_ok());
        c.sizes = vec![16, 16];
        assert!(matches!(c.validate(), Err(StudyError::Config(_))));
        c.sizes = vec![];
        assert!(c.validate().is_err());
        let mut c = small(Family::Locked1in3, NoiseMode::Default);
        c.per_size = 0;
        assert!(c.validate().is_err());
        let mut c = small(Family::Locked1in3, NoiseMode::Default);
        c.walksat.noise = -0.1;
        assert!(matches!(c.validate(), Err(StudyError::WalkSat(_))));
    }

    #[test]
    fn kept_instances_are_unique_and_in_index_order() {
        let c = small(Family::XorsatPoisson, NoiseMode::Default);
        let (kept, ens) = collect_usa_instances(&c, 20).unwrap();
        assert_eq!(kept.len(), 6);
        assert!(kept.windows(2).all(|w| w[0].index < w[1].index));
        assert_eq!(ens.candidates as u64, kept.last().unwrap().index + 1);
        for k in &kept {
            assert!(matches!(check_usa(&k.instance, DEFAULT_DPLL_NODE_BUDGET), UsaCheck::Unique(_)));
            assert_eq!(k.id, format!("xorsat-poisson-n20-i{}", k.index));
        }
        // a smaller request keeps a prefix
        let mut c3 = c.clone();
        c3.per_size = 3;
        let (kept3, _) = collect_usa_instances(&c3, 20).unwrap();
        assert_eq!(kept3.iter().map(|k| k.index).collect::<Vec<_>>(), kept[..3].iter().map(|k| k.index).collect::<Vec<_>>());
    }

    #[test]
    fn shortfall_is_flagged() {
        let mut c = small(Family::Locked1in3, NoiseMode::Default);
        c.max_candidates = 2;
        c.per_size = 50;
        let rep = run_scaling_study(&c);
        match rep {
            Ok(r) => assert!(r.sizes.iter().all(|s| s.short && s.instances < 50)),
            Err(StudyError::Config(m)) => assert!(m.contains("no unique-solution instance")),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn default_study_end_to_end() {
        let c = small(Family::Locked1in3, NoiseMode::Default);
        let rep = run_scaling_study(&c).unwrap();
        assert_eq!(rep.sizes.len(), 3);
        assert_eq!(rep.runs.len(), 18);
        assert!(rep.runs.iter().all(|r| r.solved && r.noise == 0.5));
        let fit = rep.fit.as_ref().unwrap();
        assert_eq!(fit.window, vec![12, 16, 20]);
        let dir = tempfile::tempdir().unwrap();
        let files = write_study_outputs(&rep, dir.path()).unwrap();
        let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
        assert_eq!(
            names,
            ["locked-1in3_default_scaling.csv", "locked-1in3_default_fit.json", "locked-1in3_default_plot.dat", "locked-1in3_default_runs.jsonl"]
        );
        let rows = read_scaling_csv(&files[0]).unwrap();
        assert_eq!(rows, rep.sizes.iter().map(ScalingRow::from).collect::<Vec<_>>());
        let header = fs::read_to_string(&files[0]).unwrap();
        assert!(header.starts_with("N,median,q25,q75,solved_fraction,censored,instances,short\n"));
        let fit_doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&files[1]).unwrap()).unwrap();
        for key in ["A", "mu", "stderr", "window"] {
            assert!(fit_doc.get(key).is_some(), "{key}");
        }
        assert_eq!(fs::read_to_string(&files[3]).unwrap().lines().count(), 18);
    }

    #[test]
    fn optimized_study_records_tuned_noise() {
        let c = small(Family::Locked2in4, NoiseMode::Optimized);
        let rep = run_scaling_study(&c).unwrap();
        assert!(rep.runs.is_empty());
        assert_eq!(rep.tuned.len(), 18);
        assert!(rep.tuned.iter().all(|t| t.noise.is_some_and(|p| (0.0..=1.0).contains(&p)) && t.probes > 9));
        assert_eq!(rep.stem, "locked-2in4_optimized");
    }

    #[test]
    fn single_size_refuses_fit() {
        let mut c = small(Family::Xorsat3Reg, NoiseMode::Default);
        c.sizes = vec![16];
        let rep = run_scaling_study(&c).unwrap();
        assert_eq!(rep.fit, Err(FitError::TooFewPoints(1)));
        assert!(fit_json(&rep.fit).contains("fit window < 3 points"));
    }

    #[test]
    fn censored_table_round_trips() {
        let rows = vec![ScalingRow { n: 8, median: f64::INFINITY, q25: 3.5, q75: f64::INFINITY, solved_fraction: 0.25, censored: true, instances: 4, short: false }];
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_scaling_csv(&rows, &p).unwrap();
        assert!(fs::read_to_string(&p).unwrap().contains("8,inf,3.5,inf,0.25,true,4,false"));
        assert_eq!(read_scaling_csv(&p).unwrap(), rows);
        assert_eq!(plot_data(&rows), "# N ln_median\n");
    }
}
