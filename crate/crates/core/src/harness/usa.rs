use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::gen::{check_usa, generate, GenConfig, UsaCheck};
use crate::model::{Family, ModelError, ModelSpec};
use crate::rng::{stream, tag};

/// Fraction of generated instances with a unique solution at one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsaCurvePoint {
    pub n: usize,
    pub trials: usize,
    pub usa_count: usize,
    pub p_usa: f64,
    /// Binomial standard error `sqrt(p(1-p)/trials)`.
    pub stderr: f64,
    /// The error estimate is meaningless (one trial, or p at 0 or 1).
    pub degenerate: bool,
    /// Trials whose generation failed or whose count ran out of DPLL budget;
    /// they count as non-unique.
    pub undecided: usize,
}

impl UsaCurvePoint {
    pub fn from_counts(n: usize, trials: usize, usa_count: usize, undecided: usize) -> Self {
        assert!(trials >= 1 && usa_count <= trials);
        let p = usa_count as f64 / trials as f64;
        UsaCurvePoint {
            n,
            trials,
            usa_count,
            p_usa: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            degenerate: trials == 1 || usa_count == 0 || usa_count == trials,
            undecided,
        }
    }

    pub fn inv_n(&self) -> f64 {
        1.0 / self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsaSampling {
    pub gen: GenConfig,
    pub dpll_budget: u64,
    pub exec: Execution,
}

impl Default for UsaSampling {
    fn default() -> Self {
        UsaSampling { gen: GenConfig::default(), dpll_budget: crate::exact::DEFAULT_DPLL_NODE_BUDGET, exec: Execution::default() }
    }
}

/// Generates `trials` instances of `family` at `n` variables and counts how
/// many have a unique solution. Trial `t` draws from the stream
/// `(seed, USA_CURVE, family, n, t)`. Pruned-away (empty) instances count as
/// non-unique.
pub fn measure_usa_probability(
    family: Family,
    n: usize,
    trials: usize,
    seed: u64,
    sampling: &UsaSampling,
) -> Result<UsaCurvePoint, ModelError> {
    assert!(trials >= 1, "need at least one trial");
    let spec = ModelSpec::at_threshold(family, n)?;
    let outcomes = sampling.exec.map_range(0..trials, |t| {
        let mut rng = stream(seed, &[tag::USA_CURVE, family.stream_label(), n as u64, t as u64]);
        match generate(&spec, &mut rng, &sampling.gen) {
            Ok(inst) if inst.n_vars == 0 => Some(false),
            Ok(inst) => match check_usa(&inst, sampling.dpll_budget) {
                UsaCheck::Unique(_) => Some(true),
                UsaCheck::NotUnique(_) => Some(false),
                UsaCheck::BudgetExceeded => None,
            },
            Err(_) => None,
        }
    });
    let usa = outcomes.iter().filter(|o| **o == Some(true)).count();
    let undecided = outcomes.iter().filter(|o| o.is_none()).count();
    Ok(UsaCurvePoint::from_counts(n, trials, usa, undecided))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_trial_is_degenerate() {
        let p = measure_usa_probability(Family::Xorsat3Reg, 12, 1, 3, &UsaSampling::default()).unwrap();
        assert!(p.p_usa == 0.0 || p.p_usa == 1.0);
        assert!(p.degenerate);
        assert_eq!(p.stderr, 0.0);
    }

    #[test]
    fn binomial_error() {
        let p = UsaCurvePoint::from_counts(64, 400, 100, 0);
        assert_eq!(p.p_usa, 0.25);
        assert!((p.stderr - (0.25f64 * 0.75 / 400.0).sqrt()).abs() < 1e-15);
        assert!(!p.degenerate);
        assert_eq!(p.inv_n(), 1.0 / 64.0);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let seq = UsaSampling { exec: Execution::Sequential, ..Default::default() };
        let par = UsaSampling { exec: Execution::Parallel, ..Default::default() };
        for fam in [Family::Locked1in3, Family::XorsatPoisson] {
            let a = measure_usa_probability(fam, 20, 40, 8, &seq).unwrap();
            let b = measure_usa_probability(fam, 20, 40, 8, &par).unwrap();
            assert_eq!(a, b);
        }
    }
}
