//! Complete solvers: DPLL counting up to two models, GF(2) elimination
//! for parity systems, and a bit-sliced brute-force enumerator.

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{CnfFormula, Literal};
use crate::model::{Assignment, ClauseKind, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountClass {
    Zero,
    One,
    TwoOrMore,
}

impl CountClass {
    pub fn from_count(count: u64) -> Self {
        match count {
            0 => CountClass::Zero,
            1 => CountClass::One,
            _ => CountClass::TwoOrMore,
        }
    }
}

/// Solution count class with witnesses.
///
/// `One` carries a witness, `TwoOrMore` carries two distinct witnesses,
/// `Zero` carries none.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveOutcome {
    pub count_class: CountClass,
    pub witness: Option<Assignment>,
    pub second_witness: Option<Assignment>,
}

impl SolveOutcome {
    fn zero() -> Self {
        SolveOutcome { count_class: CountClass::Zero, witness: None, second_witness: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DpllOutcome {
    Complete(SolveOutcome),
    /// The decision budget ran out before the count class was settled.
    BudgetExceeded { nodes: u64 },
}

impl DpllOutcome {
    pub fn outcome(&self) -> Option<&SolveOutcome> {
        match self {
            DpllOutcome::Complete(o) => Some(o),
            DpllOutcome::BudgetExceeded { .. } => None,
        }
    }

    pub fn count_class(&self) -> Option<CountClass> {
        self.outcome().map(|o| o.count_class)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("brute force limited to {max} variables, formula has {n_vars}")]
    TooLarge { n_vars: usize, max: usize },
}

pub const DEFAULT_DPLL_NODE_BUDGET: u64 = 1_000_000_000;

// ---------------------------------------------------------------------------
// DPLL

const UNASSIGNED: u8 = 2;

struct Dpll {
    n_vars: usize,
    starts: Vec<u32>,
    lits: Vec<Literal>,
    occ: Vec<Vec<u32>>,
    value: Vec<u8>,
    n_true: Vec<u16>,
    n_false: Vec<u16>,
    n_satisfied: usize,
    trail: Vec<Literal>,
    units: Vec<u32>,
    conflict: bool,
    score: Vec<u32>,
}

struct Decision {
    trail_pos: usize,
    lit: Literal,
    flipped: bool,
}

impl Dpll {
    fn new(formula: &CnfFormula) -> Self {
        let n_vars = formula.n_vars();
        let mut starts = Vec::with_capacity(formula.n_clauses() + 1);
        let mut lits = Vec::new();
        let mut occ = vec![Vec::new(); 2 * n_vars];
        starts.push(0);
        for (ci, c) in formula.clauses().iter().enumerate() {
            for &l in c {
                occ[l.code()].push(ci as u32);
                lits.push(l);
            }
            starts.push(lits.len() as u32);
        }
        let m = formula.n_clauses();
        Dpll {
            n_vars,
            starts,
            lits,
            occ,
            value: vec![UNASSIGNED; n_vars],
            n_true: vec![0; m],
            n_false: vec![0; m],
            n_satisfied: 0,
            trail: Vec::with_capacity(n_vars),
            units: Vec::new(),
            conflict: false,
            score: vec![0; n_vars],
        }
    }

    #[inline]
    fn clause(&self, c: usize) -> &[Literal] {
        &self.lits[self.starts[c] as usize..self.starts[c + 1] as usize]
    }

    #[inline]
    fn lit_value(&self, l: Literal) -> u8 {
        match self.value[l.var() as usize] {
            UNASSIGNED => UNASSIGNED,
            v => v ^ l.is_negated() as u8,
        }
    }

    /// Makes `lit` true and updates the clause counters.
    fn assign(&mut self, lit: Literal) {
        self.value[lit.var() as usize] = !lit.is_negated() as u8;
        self.trail.push(lit);
        for &c in &self.occ[lit.code()] {
            let c = c as usize;
            if self.n_true[c] == 0 {
                self.n_satisfied += 1;
            }
            self.n_true[c] += 1;
        }
        for &c in &self.occ[(!lit).code()] {
            let c = c as usize;
            self.n_false[c] += 1;
            if self.n_true[c] == 0 {
                let len = self.starts[c + 1] - self.starts[c];
                let nf = self.n_false[c] as u32;
                if nf == len {
                    self.conflict = true;
                } else if nf + 1 == len {
                    self.units.push(c as u32);
                }
            }
        }
    }

    fn undo_to(&mut self, trail_pos: usize) {
        while self.trail.len() > trail_pos {
            let lit = self.trail.pop().unwrap();
            for &c in &self.occ[lit.code()] {
                let c = c as usize;
                self.n_true[c] -= 1;
                if self.n_true[c] == 0 {
                    self.n_satisfied -= 1;
                }
            }
            for &c in &self.occ[(!lit).code()] {
                self.n_false[c as usize] -= 1;
            }
            self.value[lit.var() as usize] = UNASSIGNED;
        }
        self.conflict = false;
        self.units.clear();
    }

    /// Unit propagation; false on conflict.
    fn propagate(&mut self) -> bool {
        while !self.conflict {
            let Some(c) = self.units.pop() else { return true };
            let c = c as usize;
            if self.n_true[c] > 0 {
                continue;
            }
            match self.clause(c).iter().copied().find(|&l| self.lit_value(l) == UNASSIGNED) {
                Some(l) => self.assign(l),
                None => self.conflict = true,
            }
        }
        self.units.clear();
        false
    }

    /// Most occurrences in the shortest open clauses; ties to the lowest
    /// variable index. `None` when every clause is satisfied.
    fn pick_branch(&mut self) -> Option<u32> {
        let mut shortest = u32::MAX;
        for c in 0..self.n_true.len() {
            if self.n_true[c] == 0 {
                let open = self.starts[c + 1] - self.starts[c] - self.n_false[c] as u32;
                shortest = shortest.min(open);
            }
        }
        if shortest == u32::MAX {
            return None;
        }
        self.score.iter_mut().for_each(|s| *s = 0);
        for c in 0..self.n_true.len() {
            if self.n_true[c] == 0 {
                let open = self.starts[c + 1] - self.starts[c] - self.n_false[c] as u32;
                if open == shortest {
                    for i in self.starts[c]..self.starts[c + 1] {
                        let l = self.lits[i as usize];
                        if self.value[l.var() as usize] == UNASSIGNED {
                            self.score[l.var() as usize] += 1;
                        }
                    }
                }
            }
        }
        let mut best = None;
        let mut best_score = 0;
        for v in 0..self.n_vars {
            if self.score[v] > best_score {
                best_score = self.score[v];
                best = Some(v as u32);
            }
        }
        best
    }

    fn current_model(&self) -> Assignment {
        Assignment(self.value.iter().map(|&v| v == 1).collect())
    }

    fn run(mut self, budget: u64) -> DpllOutcome {
        for c in 0..self.n_true.len() {
            if self.starts[c + 1] - self.starts[c] == 1 {
                self.units.push(c as u32);
            }
        }
        let mut decisions: Vec<Decision> = Vec::new();
        let mut first: Option<Assignment> = None;
        let mut nodes = 0u64;

        loop {
            if self.propagate() {
                if self.n_satisfied == self.n_true.len() {
                    let model = self.current_model();
                    if let Some(free) = self.value.iter().position(|&v| v == UNASSIGNED) {
                        let mut other = model.clone();
                        other.0[free] = true;
                        let (a, b) = match first {
                            Some(f) => (f, model),
                            None => (model, other),
                        };
                        return two_or_more(a, b);
                    }
                    match first.take() {
                        Some(f) => return two_or_more(f, model),
                        None => first = Some(model),
                    }
                } else {
                    nodes += 1;
                    if nodes > budget {
                        return DpllOutcome::BudgetExceeded { nodes: nodes - 1 };
                    }
                    let var = self.pick_branch().expect("open clause has an unassigned variable");
                    let lit = Literal::neg(var);
                    decisions.push(Decision { trail_pos: self.trail.len(), lit, flipped: false });
                    self.assign(lit);
                    continue;
                }
            }
            // conflict, or a model that needs the search to continue
            loop {
                let Some(d) = decisions.pop() else {
                    return DpllOutcome::Complete(match first {
                        Some(w) => SolveOutcome { count_class: CountClass::One, witness: Some(w), second_witness: None },
                        None => SolveOutcome::zero(),
                    });
                };
                self.undo_to(d.trail_pos);
                if !d.flipped {
                    let lit = !d.lit;
                    decisions.push(Decision { trail_pos: d.trail_pos, lit, flipped: true });
                    self.assign(lit);
                    break;
                }
            }
        }
    }
}

fn two_or_more(a: Assignment, b: Assignment) -> DpllOutcome {
    debug_assert_ne!(a, b);
    DpllOutcome::Complete(SolveOutcome { count_class: CountClass::TwoOrMore, witness: Some(a), second_witness: Some(b) })
}

/// Complete DPLL search (unit propagation, MOMS branching, no pure-literal
/// rule) that stops as soon as two distinct models are known.
///
/// `node_budget` bounds the number of branching decisions.
pub fn dpll_count_upto2(formula: &CnfFormula, node_budget: u64) -> DpllOutcome {
    Dpll::new(formula).run(node_budget)
}

// ---------------------------------------------------------------------------
// GF(2)

/// A linear system over GF(2): one packed row per parity clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2System {
    n_vars: usize,
    rows: Vec<Vec<u64>>,
    rhs: Vec<bool>,
}

impl Gf2System {
    pub fn new(n_vars: usize) -> Self {
        Gf2System { n_vars, rows: Vec::new(), rhs: Vec::new() }
    }

    fn words(&self) -> usize {
        self.n_vars.div_ceil(64)
    }

    /// Adds the equation `Σ vars = rhs (mod 2)`. Repeated variables cancel.
    pub fn push_row(&mut self, vars: &[u32], rhs: bool) {
        let mut row = vec![0u64; self.words()];
        for &v in vars {
            assert!((v as usize) < self.n_vars, "variable out of range");
            row[v as usize / 64] ^= 1 << (v % 64);
        }
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    /// The parity system of an XORSAT instance.
    pub fn from_instance(inst: &Instance) -> Self {
        let mut sys = Gf2System::new(inst.n_vars);
        for c in &inst.clauses {
            assert_eq!(c.kind, ClauseKind::Xor, "GF(2) system needs parity clauses");
            sys.push_row(&c.vars, c.parity);
        }
        sys
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row_weight(&self, r: usize) -> u32 {
        self.rows[r].iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_satisfied_by(&self, x: &Assignment) -> bool {
        self.rows.iter().zip(&self.rhs).all(|(row, &b)| {
            let mut acc = 0u32;
            for (wi, &w) in row.iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let v = wi * 64 + bits.trailing_zeros() as usize;
                    acc ^= x.get(v) as u32;
                    bits &= bits - 1;
                }
            }
            (acc == 1) == b
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Solution {
    pub rank: usize,
    pub consistent: bool,
    /// Particular solution with every free variable at 0.
    pub witness: Option<Assignment>,
    /// A second solution (witness plus a kernel vector) when one exists.
    pub second_witness: Option<Assignment>,
    n_vars: usize,
}

impl Gf2Solution {
    pub fn nullity(&self) -> usize {
        self.n_vars - self.rank
    }

    pub fn count_class(&self) -> CountClass {
        match (self.consistent, self.nullity()) {
            (false, _) => CountClass::Zero,
            (true, 0) => CountClass::One,
            _ => CountClass::TwoOrMore,
        }
    }

    /// Exact solution count 2^(N − rank), or 0; `None` if it overflows u128.
    pub fn solution_count(&self) -> Option<u128> {
        if !self.consistent {
            return Some(0);
        }
        1u128.checked_shl(self.nullity() as u32).filter(|_| self.nullity() < 128)
    }

    pub fn to_outcome(&self) -> SolveOutcome {
        SolveOutcome {
            count_class: self.count_class(),
            witness: self.witness.clone(),
            second_witness: self.second_witness.clone(),
        }
    }
}

/// Gauss–Jordan elimination, columns left to right.
pub fn gf2_solve(system: &Gf2System) -> Gf2Solution {
    let n = system.n_vars;
    let words = system.words();
    let mut rows = system.rows.clone();
    let mut rhs = system.rhs.clone();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;

    for col in 0..n {
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        rhs.swap(rank, p);
        let pivot_row = rows[rank].clone();
        let pivot_rhs = rhs[rank];
        for r in 0..rows.len() {
            if r != rank && rows[r][w] & bit != 0 {
                for k in w..words {
                    rows[r][k] ^= pivot_row[k];
                }
                rhs[r] ^= pivot_rhs;
            }
        }
        pivots.push(col);
        rank += 1;
    }

    let consistent = rhs[rank..].iter().all(|&b| !b);
    if !consistent {
        return Gf2Solution { rank, consistent, witness: None, second_witness: None, n_vars: n };
    }
    let mut x = Assignment::zeros(n);
    for (i, &col) in pivots.iter().enumerate() {
        x.0[col] = rhs[i];
    }
    let mut is_pivot = vec![false; n];
    pivots.iter().for_each(|&c| is_pivot[c] = true);
    let second = is_pivot.iter().position(|&p| !p).map(|free| {
        // kernel vector: free = 1, pivots take the free column's entries
        let (w, bit) = (free / 64, 1u64 << (free % 64));
        let mut y = x.clone();
        y.0[free] ^= true;
        for (i, &col) in pivots.iter().enumerate() {
            if rows[i][w] & bit != 0 {
                y.0[col] ^= true;
            }
        }
        y
    });
    Gf2Solution { rank, consistent, witness: Some(x), second_witness: second, n_vars: n }
}

// ---------------------------------------------------------------------------
// Brute force

pub const BRUTE_FORCE_MAX_VARS: usize = 26;

const LOW_PATTERNS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

/// Calls `visit(block, mask)` for every 64-assignment block, where bit `j`
/// of `mask` marks assignment `block * 64 + j` as a model. Stops when
/// `visit` returns false.
fn enumerate_blocks(formula: &CnfFormula, mut visit: impl FnMut(u64, u64) -> bool) -> Result<(), ExactError> {
    let n = formula.n_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(ExactError::TooLarge { n_vars: n, max: BRUTE_FORCE_MAX_VARS });
    }
    let valid = if n >= 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
    let blocks = 1u64 << n.saturating_sub(6);
    for block in 0..blocks {
        let mut sat = valid;
        for clause in formula.clauses() {
            let mut w = 0u64;
            for l in clause {
                let v = l.var() as usize;
                let x = if v < 6 {
                    LOW_PATTERNS[v]
                } else if (block >> (v - 6)) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                };
                w |= if l.is_negated() { !x } else { x };
            }
            sat &= w;
            if sat == 0 {
                break;
            }
        }
        if sat != 0 && !visit(block, sat) {
            break;
        }
    }
    Ok(())
}

/// Exhaustive model count, saturating at `cap`.
pub fn brute_force_count(formula: &CnfFormula, cap: u64) -> Result<u64, ExactError> {
    let mut count = 0u64;
    enumerate_blocks(formula, |_, sat| {
        count += sat.count_ones() as u64;
        count < cap
    })?;
    Ok(count.min(cap))
}

/// The first `limit` models in increasing binary order (bit v = variable v).
pub fn brute_force_solutions(formula: &CnfFormula, limit: usize) -> Result<Vec<Assignment>, ExactError> {
    let n = formula.n_vars();
    let mut out = Vec::new();
    enumerate_blocks(formula, |block, mut sat| {
        while sat != 0 && out.len() < limit {
            let j = sat.trailing_zeros() as u64;
            out.push(Assignment::from_bits(block << 6 | j, n));
            sat &= sat - 1;
        }
        out.len() < limit
    })?;
    Ok(out)
}
