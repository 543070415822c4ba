//! Per-instance noise tuning: a coarse grid followed by golden-section
//! refinement around the best grid point.

use serde::Serialize;
use thiserror::Error;

use crate::cnf::CnfFormula;
use crate::rng::derive_seed;
use crate::walksat::{lockstep_median, ClauseDb, WalkSatParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("every one of {probes} noise probes exhausted its flip budget")]
    AllNotFound { probes: usize },
    #[error("runs per probe must be at least 1")]
    NoRuns,
}

/// Cost of running at a given noise, as a median flip count.
pub trait NoiseObjective {
    /// Median flips at `noise` for the `probe`-th evaluation, or
    /// `f64::INFINITY` if it exceeds `cap` flips.
    fn evaluate(&mut self, noise: f64, probe: usize, cap: u64) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSearch {
    pub grid: Vec<f64>,
    /// Golden-section stops once the bracket is narrower than this.
    pub tolerance: f64,
    /// Half-width of the refinement bracket around the grid minimum.
    pub bracket: f64,
    /// Probes are abandoned once their median would exceed this multiple of
    /// the best median seen so far.
    pub cap_factor: f64,
    /// Hard cap on flips per run.
    pub budget: u64,
}

impl NoiseSearch {
    pub fn with_budget(budget: u64) -> Self {
        NoiseSearch {
            grid: (1..=9).map(|i| i as f64 / 10.0).collect(),
            tolerance: 0.02,
            bracket: 0.1,
            cap_factor: 2.0,
            budget,
        }
    }

    fn cap(&self, best: f64) -> u64 {
        if best.is_finite() {
            ((self.cap_factor * best).ceil() as u64).min(self.budget)
        } else {
            self.budget
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseProbe {
    pub noise: f64,
    /// Median flips; infinite when the probe was cut off.
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseOptimum {
    pub noise: f64,
    pub flips: f64,
    pub probes: Vec<NoiseProbe>,
}

struct Tracker<'a, O> {
    objective: &'a mut O,
    search: &'a NoiseSearch,
    probes: Vec<NoiseProbe>,
    best: f64,
}

impl<O: NoiseObjective> Tracker<'_, O> {
    fn eval(&mut self, noise: f64) -> f64 {
        let cap = self.search.cap(self.best);
        let median = self.objective.evaluate(noise, self.probes.len(), cap);
        self.probes.push(NoiseProbe { noise, median });
        if median < self.best {
            self.best = median;
        }
        median
    }
}

/// Grid search, visiting grid points nearest 0.5 first, then golden-section
/// search on `[g - bracket, g + bracket] ∩ [0, 1]` around the grid argmin
/// `g`. Returns the best probe overall; ties go to the earliest probe.
pub fn optimize_noise_with<O: NoiseObjective>(objective: &mut O, search: &NoiseSearch) -> Result<NoiseOptimum, NoiseError> {
    let mut t = Tracker { objective, search, probes: Vec::new(), best: f64::INFINITY };
    let mut order = search.grid.clone();
    order.sort_by_key(|&p| (((p - 0.5).abs() * 1e9).round() as i64, (p * 1e9).round() as i64));
    for &p in &order {
        t.eval(p);
    }
    if t.best.is_infinite() {
        return Err(NoiseError::AllNotFound { probes: t.probes.len() });
    }
    let grid_best = t.probes.iter().find(|p| p.median == t.best).expect("finite best").noise;

    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = ((grid_best - search.bracket).max(0.0), (grid_best + search.bracket).min(1.0));
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = t.eval(x1);
    let mut f2 = t.eval(x2);
    while hi - lo >= search.tolerance {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = t.eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = t.eval(x2);
        }
    }

    let best = *t.probes.iter().find(|p| p.median == t.best).expect("finite best");
    Ok(NoiseOptimum { noise: best.noise, flips: best.median, probes: t.probes })
}

/// WalkSAT objective: the median of `runs` single-try runs, seeded from
/// `(seed, probe, run)`, each capped at the probe's flip cap.
pub struct WalkSatObjective {
    db: ClauseDb,
    seed: u64,
    runs: usize,
}

impl WalkSatObjective {
    pub fn new(formula: &CnfFormula, seed: u64, runs: usize) -> Self {
        WalkSatObjective { db: ClauseDb::new(formula), seed, runs }
    }
}

impl NoiseObjective for WalkSatObjective {
    fn evaluate(&mut self, noise: f64, probe: usize, cap: u64) -> f64 {
        let seeds: Vec<u64> = (0..self.runs).map(|r| derive_seed(self.seed, &[probe as u64, r as u64])).collect();
        lockstep_median(&self.db, noise, &seeds, cap)
    }
}

/// Tunes WalkSAT's noise on `formula`. `base.max_flips` caps each run and
/// `base.seed` roots the probe seeds.
pub fn optimize_noise(formula: &CnfFormula, base: &WalkSatParams, runs_per_probe: usize) -> Result<NoiseOptimum, NoiseError> {
    if runs_per_probe == 0 {
        return Err(NoiseError::NoRuns);
    }
    let mut objective = WalkSatObjective::new(formula, base.seed, runs_per_probe);
    optimize_noise_with(&mut objective, &NoiseSearch::with_budget(base.max_flips))
}
