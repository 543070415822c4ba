//! Random ensembles at the satisfiability threshold.
//!
//! Locked and XORSAT instances are built with the configuration model:
//! a degree sequence fixes how many clause slots each variable fills, the
//! stubs are shuffled into clauses, and the whole matching is redrawn if any
//! clause would contain the same variable twice. Exact Cover instances are
//! uniform random 3-subsets followed by pruning.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::cnf::{encode_instance, Literal};
use crate::exact::{dpll_count_upto2, gf2_solve, CountClass, DpllOutcome, Gf2System, DEFAULT_DPLL_NODE_BUDGET};
use crate::model::{Assignment, ClauseKind, Family, Instance, ModelSpec, NativeClause};

pub const DEFAULT_REJECTION_CAP: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("no degree sequence with minimum degree 2 sums to {target_sum} over {n_vars} variables")]
    Infeasible { n_vars: usize, target_sum: usize },
    #[error("{what}: rejection budget of {attempts} attempts exhausted")]
    RejectionBudget { what: &'static str, attempts: u64 },
    #[error("generator for {expected} called with a {found} spec")]
    WrongFamily { expected: &'static str, found: Family },
    #[error("requested {n_clauses} distinct clauses but only {available} exist")]
    TooManyClauses { n_clauses: usize, available: usize },
    #[error("gauge transform needs an XORSAT instance, got {0}")]
    NotXorsat(Family),
    #[error("gauge solution does not satisfy the instance")]
    NotASolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    /// Cap on whole-sequence and whole-matching redraws.
    pub rejection_cap: u64,
    /// Draw XORSAT parities uniformly instead of all zero.
    pub raw_parity: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { rejection_cap: DEFAULT_REJECTION_CAP, raw_parity: false }
    }
}

/// Per-variable clause counts drawn for a configuration-model build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<usize>,
    pub target_sum: usize,
}

// ---------------------------------------------------------------------------
// Truncated Poisson

/// Unnormalised weights of Poisson(λ) conditioned on k ≥ 2, scaled so that
/// the weight of k = 2 is one. Entry i is the weight of k = i + 2.
fn truncated_weights(lambda: f64) -> Vec<f64> {
    let mut w = vec![1.0];
    let mut k = 2.0;
    loop {
        k += 1.0;
        let next = w[w.len() - 1] * lambda / k;
        let total: f64 = w.iter().sum();
        if next < total * 1e-18 || w.len() > 400 {
            break;
        }
        w.push(next);
    }
    w
}

/// Mean of Poisson(λ) conditioned on k ≥ 2.
pub fn truncated_poisson_mean(lambda: f64) -> f64 {
    let w = truncated_weights(lambda);
    let total: f64 = w.iter().sum();
    w.iter().enumerate().map(|(i, x)| (i + 2) as f64 * x).sum::<f64>() / total
}

/// The rate λ whose ≥2-truncated Poisson law has the given mean (> 2).
pub fn truncated_poisson_rate(mean: f64) -> f64 {
    assert!(mean > 2.0, "truncated mean must exceed 2");
    let mut hi = 1.0;
    while truncated_poisson_mean(hi) < mean {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if truncated_poisson_mean(mid) < mean {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Inverse-CDF sampler for the truncated law.
struct TruncatedPoisson {
    cdf: Vec<f64>,
}

impl TruncatedPoisson {
    fn new(lambda: f64) -> Self {
        let w = truncated_weights(lambda);
        let total: f64 = w.iter().sum();
        let mut acc = 0.0;
        let cdf = w
            .iter()
            .map(|x| {
                acc += x / total;
                acc
            })
            .collect();
        TruncatedPoisson { cdf }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        self.cdf.iter().position(|&c| u < c).unwrap_or(self.cdf.len() - 1) + 2
    }
}

/// i.i.d. degrees from Poisson(λ*) conditioned on ≥ 2, with λ* chosen so
/// the conditioned mean is `target_sum / n_vars`; the whole sequence is
/// redrawn until it sums to `target_sum` exactly.
pub fn sample_truncated_poisson_degrees(
    n_vars: usize,
    target_sum: usize,
    rng: &mut impl Rng,
    rejection_cap: u64,
) -> Result<DegreeSequence, GenError> {
    if target_sum < 2 * n_vars || (n_vars == 0 && target_sum > 0) {
        return Err(GenError::Infeasible { n_vars, target_sum });
    }
    if target_sum == 2 * n_vars {
        return Ok(DegreeSequence { degrees: vec![2; n_vars], target_sum });
    }
    let lambda = truncated_poisson_rate(target_sum as f64 / n_vars as f64);
    let law = TruncatedPoisson::new(lambda);
    let mut degrees = vec![0; n_vars];
    for _ in 0..rejection_cap {
        let mut sum = 0;
        let mut ok = true;
        for (i, d) in degrees.iter_mut().enumerate() {
            *d = law.sample(rng);
            sum += *d;
            // remaining variables contribute at least 2 each
            if sum + 2 * (n_vars - i - 1) > target_sum {
                ok = false;
                break;
            }
        }
        if ok && sum == target_sum {
            return Ok(DegreeSequence { degrees, target_sum });
        }
    }
    Err(GenError::RejectionBudget { what: "degree sequence", attempts: rejection_cap })
}

// ---------------------------------------------------------------------------
// Configuration model

/// Shuffles `degrees[v]` stubs per variable into clauses of `arity` slots,
/// redrawing the whole matching whenever a clause repeats a variable.
pub fn configuration_model(
    degrees: &[usize],
    arity: usize,
    rng: &mut impl Rng,
    rejection_cap: u64,
) -> Result<Vec<Vec<u32>>, GenError> {
    let mut stubs: Vec<u32> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v as u32, d))
        .collect();
    assert_eq!(stubs.len() % arity, 0, "stub count must be a multiple of the arity");
    for _ in 0..rejection_cap {
        stubs.shuffle(rng);
        let clean = stubs.chunks(arity).all(|c| (1..c.len()).all(|i| !c[..i].contains(&c[i])));
        if clean {
            return Ok(stubs.chunks(arity).map(<[u32]>::to_vec).collect());
        }
    }
    Err(GenError::RejectionBudget { what: "configuration matching", attempts: rejection_cap })
}

/// Truncated-Poisson degrees and a matching drawn together: a matching that
/// repeats a variable in a clause rejects the degree sequence as well.
pub fn poisson_configuration(
    n_vars: usize,
    arity: usize,
    n_clauses: usize,
    rng: &mut impl Rng,
    rejection_cap: u64,
) -> Result<Vec<Vec<u32>>, GenError> {
    for _ in 0..rejection_cap {
        let degrees = sample_truncated_poisson_degrees(n_vars, arity * n_clauses, rng, rejection_cap)?;
        if let Ok(groups) = configuration_model(&degrees.degrees, arity, rng, 1) {
            return Ok(groups);
        }
    }
    Err(GenError::RejectionBudget { what: "simple configuration", attempts: rejection_cap })
}

// ---------------------------------------------------------------------------
// Generators

pub fn generate(spec: &ModelSpec, rng: &mut impl Rng, cfg: &GenConfig) -> Result<Instance, GenError> {
    match spec.family {
        Family::Unlocked1in3 => generate_unlocked_1in3(spec, rng, cfg),
        Family::Locked1in3 | Family::Locked2in4 => generate_locked(spec, rng, cfg),
        Family::Xorsat3Reg | Family::XorsatPoisson => generate_xorsat(spec, rng, cfg),
    }
}

/// Exact Cover: `M` distinct uniform 3-subsets, then [`prune_exact_cover`].
pub fn generate_unlocked_1in3(spec: &ModelSpec, rng: &mut impl Rng, cfg: &GenConfig) -> Result<Instance, GenError> {
    if spec.family != Family::Unlocked1in3 {
        return Err(GenError::WrongFamily { expected: "unlocked 1-in-3", found: spec.family });
    }
    let n = spec.n_vars;
    let available = if n >= 3 { n * (n - 1) * (n - 2) / 6 } else { 0 };
    if spec.n_clauses > available {
        return Err(GenError::TooManyClauses { n_clauses: spec.n_clauses, available });
    }
    let mut seen = HashSet::with_capacity(spec.n_clauses);
    let mut clauses = Vec::with_capacity(spec.n_clauses);
    let mut redraws = 0u64;
    while clauses.len() < spec.n_clauses {
        let a = rng.random_range(0..n as u32);
        let b = rng.random_range(0..n as u32);
        let c = rng.random_range(0..n as u32);
        if a == b || b == c || a == c {
            continue;
        }
        let mut key = [a, b, c];
        key.sort_unstable();
        if seen.insert(key) {
            clauses.push(key);
        } else {
            redraws += 1;
            if redraws > cfg.rejection_cap {
                return Err(GenError::RejectionBudget { what: "distinct clauses", attempts: cfg.rejection_cap });
            }
        }
    }
    Ok(prune_exact_cover(n, &clauses))
}

/// Repeatedly drops clauses that share at most one variable with the rest
/// of the instance, then drops variables left in no clause and renumbers
/// the survivors in their original order.
///
/// Removing a clause only lowers degrees, so the fixed point does not depend
/// on removal order.
pub fn prune_exact_cover(n_vars: usize, clauses: &[[u32; 3]]) -> Instance {
    let mut alive = vec![true; clauses.len()];
    let mut degree = vec![0usize; n_vars];
    for c in clauses {
        c.iter().for_each(|&v| degree[v as usize] += 1);
    }
    loop {
        let mut changed = false;
        for (i, c) in clauses.iter().enumerate() {
            if alive[i] && c.iter().filter(|&&v| degree[v as usize] >= 2).count() <= 1 {
                alive[i] = false;
                c.iter().for_each(|&v| degree[v as usize] -= 1);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut new_index = vec![u32::MAX; n_vars];
    let mut next = 0u32;
    for v in 0..n_vars {
        if degree[v] > 0 {
            new_index[v] = next;
            next += 1;
        }
    }
    let kept = clauses
        .iter()
        .zip(&alive)
        .filter(|(_, &a)| a)
        .map(|(c, _)| NativeClause::one_of_three(c.map(|v| new_index[v as usize])))
        .collect();
    Instance { family: Family::Unlocked1in3, n_vars: next as usize, clauses: kept, known_solution: None }
}

/// Locked 1-in-3 / 2-in-4 over a truncated-Poisson configuration model.
pub fn generate_locked(spec: &ModelSpec, rng: &mut impl Rng, cfg: &GenConfig) -> Result<Instance, GenError> {
    let kind = match spec.family {
        Family::Locked1in3 => ClauseKind::OneOfThree,
        Family::Locked2in4 => ClauseKind::TwoOfFour,
        f => return Err(GenError::WrongFamily { expected: "locked", found: f }),
    };
    let groups = poisson_configuration(spec.n_vars, kind.arity(), spec.n_clauses, rng, cfg.rejection_cap)?;
    let clauses = groups
        .into_iter()
        .map(|vars| NativeClause { vars, kind, parity: false })
        .collect();
    Ok(Instance { family: spec.family, n_vars: spec.n_vars, clauses, known_solution: None })
}

/// 3-XORSAT, either 3-regular or with truncated-Poisson degrees. Parities
/// are all zero (all-zeros is a solution) unless `cfg.raw_parity` is set.
pub fn generate_xorsat(spec: &ModelSpec, rng: &mut impl Rng, cfg: &GenConfig) -> Result<Instance, GenError> {
    let groups = match spec.family {
        Family::Xorsat3Reg => {
            if 3 * spec.n_vars != 3 * spec.n_clauses {
                return Err(GenError::Infeasible { n_vars: spec.n_vars, target_sum: 3 * spec.n_clauses });
            }
            configuration_model(&vec![3; spec.n_vars], 3, rng, cfg.rejection_cap)?
        }
        Family::XorsatPoisson => poisson_configuration(spec.n_vars, 3, spec.n_clauses, rng, cfg.rejection_cap)?,
        f => return Err(GenError::WrongFamily { expected: "XORSAT", found: f }),
    };
    let clauses = groups
        .into_iter()
        .map(|vars| {
            let parity = cfg.raw_parity && rng.random::<bool>();
            NativeClause { vars, kind: ClauseKind::Xor, parity }
        })
        .collect();
    Ok(Instance { family: spec.family, n_vars: spec.n_vars, clauses, known_solution: None })
}

// ---------------------------------------------------------------------------
// Gauge transform

/// Relabels `x → x ⊕ shift`: each parity absorbs the parity of `shift` on
/// its clause. The solution set is mapped by XOR with `shift`, and applying
/// the same shift twice is the identity.
pub fn apply_gauge(instance: &Instance, shift: &Assignment) -> Result<Instance, GenError> {
    if !instance.family.is_xorsat() {
        return Err(GenError::NotXorsat(instance.family));
    }
    let clauses = instance
        .clauses
        .iter()
        .map(|c| NativeClause { parity: c.parity ^ (c.weight(shift) % 2 == 1), ..c.clone() })
        .collect();
    Ok(Instance {
        clauses,
        known_solution: instance.known_solution.as_ref().map(|s| s.xor(shift)),
        ..instance.clone()
    })
}

/// Maps an XORSAT instance to its gauged form, in which all parities are
/// zero and all-zeros is a solution.
pub fn gauge_transform(instance: &Instance, solution: &Assignment) -> Result<Instance, GenError> {
    if !instance.family.is_xorsat() {
        return Err(GenError::NotXorsat(instance.family));
    }
    if solution.len() != instance.n_vars || !instance.is_satisfied_by(solution) {
        return Err(GenError::NotASolution);
    }
    apply_gauge(instance, solution)
}

// ---------------------------------------------------------------------------
// Unique-solution filter

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UsaCheck {
    Unique(Assignment),
    NotUnique(CountClass),
    BudgetExceeded,
}

/// Solution-count class of `instance`: GF(2) rank for XORSAT, DPLL on the
/// CNF encoding otherwise.
///
/// For families invariant under flipping every bit (2-in-4), solutions
/// come in complementary pairs and are counted modulo that flip: variable 0
/// is pinned to 0 and the pair's representative is returned.
pub fn check_usa(instance: &Instance, dpll_budget: u64) -> UsaCheck {
    if instance.family.is_xorsat() {
        let sol = gf2_solve(&Gf2System::from_instance(instance));
        return match sol.count_class() {
            CountClass::One => UsaCheck::Unique(sol.witness.expect("consistent system has a witness")),
            cc => UsaCheck::NotUnique(cc),
        };
    }
    let mut formula = encode_instance(instance);
    if instance.family.has_global_flip_symmetry() && instance.n_vars > 0 {
        // count one representative per complementary pair
        formula.push_clause(vec![Literal::neg(0)]).expect("variable 0 exists");
    }
    match dpll_count_upto2(&formula, dpll_budget) {
        DpllOutcome::Complete(o) if o.count_class == CountClass::One => {
            UsaCheck::Unique(o.witness.expect("unique outcome has a witness"))
        }
        DpllOutcome::Complete(o) => UsaCheck::NotUnique(o.count_class),
        DpllOutcome::BudgetExceeded { .. } => UsaCheck::BudgetExceeded,
    }
}

/// True iff `instance` has exactly one satisfying assignment (one
/// complementary pair for 2-in-4), which is then stored in
/// `known_solution`. An exhausted DPLL budget counts as false.
pub fn filter_usa(instance: &mut Instance) -> bool {
    match check_usa(instance, DEFAULT_DPLL_NODE_BUDGET) {
        UsaCheck::Unique(s) => {
            instance.known_solution = Some(s);
            true
        }
        _ => false,
    }
}
