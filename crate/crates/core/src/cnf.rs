//! CNF formulas, the per-constraint encoders and DIMACS I/O.
//!
//! Variables are 0-based internally; DIMACS is 1-based and the conversion
//! happens only in [`write_dimacs`] / [`parse_dimacs`].

use std::fmt;

use thiserror::Error;

use crate::model::{Assignment, ClauseKind, Instance, NativeClause};

/// A literal packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(u32);

impl Literal {
    #[inline]
    pub fn new(var: u32, negated: bool) -> Self {
        Literal(var << 1 | negated as u32)
    }

    #[inline]
    pub fn pos(var: u32) -> Self {
        Self::new(var, false)
    }

    #[inline]
    pub fn neg(var: u32) -> Self {
        Self::new(var, true)
    }

    #[inline]
    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// Packed code, usable as an index into per-literal tables.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_true_under(self, assignment: &Assignment) -> bool {
        assignment.get(self.var() as usize) != self.is_negated()
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;

    #[inline]
    fn not(self) -> Literal {
        Literal(self.0 ^ 1)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A conjunction of clauses over `n_vars` variables.
///
/// Clauses are kept in canonical form: literals sorted by variable, no
/// repeats, no complementary pairs, never empty.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfFormula {
    n_vars: usize,
    clauses: Vec<Vec<Literal>>,
    /// Free-form comment lines (without the leading `c `).
    pub comments: Vec<String>,
}

impl CnfFormula {
    pub fn new(n_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, CnfError> {
        let mut f = CnfFormula { n_vars, clauses: Vec::with_capacity(clauses.len()), comments: Vec::new() };
        for c in clauses {
            f.push_clause(c)?;
        }
        Ok(f)
    }

    pub fn push_clause(&mut self, mut clause: Vec<Literal>) -> Result<(), CnfError> {
        let idx = self.clauses.len();
        if clause.is_empty() {
            return Err(CnfError::EmptyClause { clause: idx });
        }
        if let Some(l) = clause.iter().find(|l| l.var() as usize >= self.n_vars) {
            return Err(CnfError::VarOutOfRange { clause: idx, literal: l.to_dimacs(), n_vars: self.n_vars });
        }
        clause.sort_unstable();
        clause.dedup();
        if clause.windows(2).any(|w| w[0].var() == w[1].var()) {
            return Err(CnfError::Tautology { clause: idx });
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn n_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.is_true_under(assignment)))
    }

    /// Same formula with variable `v` renamed to `perm[v]`.
    pub fn permuted(&self, perm: &[u32]) -> CnfFormula {
        let clauses = self
            .clauses
            .iter()
            .map(|c| c.iter().map(|l| Literal::new(perm[l.var() as usize], l.is_negated())).collect())
            .collect();
        CnfFormula::new(self.n_vars, clauses).expect("permutation preserves validity")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("expected a {expected:?} clause, got {found:?}")]
    WrongClauseKind { expected: ClauseKind, found: ClauseKind },
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("clause {clause}: literal {literal} out of range (n_vars = {n_vars})")]
    VarOutOfRange { clause: usize, literal: i64, n_vars: usize },
    #[error("clause {clause} contains a literal and its negation")]
    Tautology { clause: usize },
    #[error("line {line}: malformed header: {msg}")]
    MalformedHeader { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("unterminated clause at end of input")]
    UnterminatedClause,
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
}

fn check_kind(clause: &NativeClause, expected: ClauseKind) -> Result<(), CnfError> {
    if clause.kind != expected || clause.vars.len() != expected.arity() {
        return Err(CnfError::WrongClauseKind { expected, found: clause.kind });
    }
    Ok(())
}

/// Exactly-one-of-three in four clauses: the all-positive clause, the
/// binary clause (¬x₁ ∨ ¬x₂) that excludes both 110 and 111, and the two
/// clauses excluding 011 and 101.
pub fn encode_1in3(clause: &NativeClause) -> Result<Vec<Vec<Literal>>, CnfError> {
    check_kind(clause, ClauseKind::OneOfThree)?;
    let [a, b, c] = [clause.vars[0], clause.vars[1], clause.vars[2]];
    use Literal as L;
    Ok(vec![
        vec![L::pos(a), L::pos(b), L::pos(c)],
        vec![L::neg(a), L::neg(b)],
        vec![L::pos(a), L::neg(b), L::neg(c)],
        vec![L::neg(a), L::pos(b), L::neg(c)],
    ])
}

/// Exactly-two-of-four: for every triple, one all-positive and one
/// all-negative clause (8 clauses). Weight ≤ 1 leaves some triple all
/// zero; weight ≥ 3 leaves some triple all one.
pub fn encode_2in4(clause: &NativeClause) -> Result<Vec<Vec<Literal>>, CnfError> {
    check_kind(clause, ClauseKind::TwoOfFour)?;
    let v = &clause.vars;
    let mut out = Vec::with_capacity(8);
    for skip in 0..4 {
        let triple: Vec<u32> = (0..4).filter(|&i| i != skip).map(|i| v[i]).collect();
        out.push(triple.iter().map(|&x| Literal::pos(x)).collect());
        out.push(triple.iter().map(|&x| Literal::neg(x)).collect());
    }
    Ok(out)
}

/// Parity constraint as the four clauses forbidding each wrong-parity row.
pub fn encode_xor3(clause: &NativeClause) -> Result<Vec<Vec<Literal>>, CnfError> {
    check_kind(clause, ClauseKind::Xor)?;
    let v = &clause.vars;
    let mut out = Vec::with_capacity(4);
    for row in 0u32..8 {
        if (row.count_ones() % 2 == 1) == clause.parity {
            continue;
        }
        // the clause is false exactly on `row`
        out.push((0..3).map(|i| Literal::new(v[i], (row >> i) & 1 == 1)).collect());
    }
    Ok(out)
}

pub fn encode_clause(clause: &NativeClause) -> Result<Vec<Vec<Literal>>, CnfError> {
    match clause.kind {
        ClauseKind::OneOfThree => encode_1in3(clause),
        ClauseKind::TwoOfFour => encode_2in4(clause),
        ClauseKind::Xor => encode_xor3(clause),
    }
}

/// CNF with the same solution set as `instance`.
pub fn encode_instance(instance: &Instance) -> CnfFormula {
    let mut f = CnfFormula {
        n_vars: instance.n_vars,
        clauses: Vec::with_capacity(instance.clauses.len() * 8),
        comments: vec![format!(
            "origin {} n_vars={} n_clauses={}",
            instance.family,
            instance.n_vars,
            instance.clauses.len()
        )],
    };
    for c in &instance.clauses {
        for cl in encode_clause(c).expect("instance clause kinds are validated") {
            f.push_clause(cl).expect("native clauses have distinct in-range variables");
        }
    }
    f
}

/// Writes `formula` in DIMACS CNF. Comment lines are emitted first.
pub fn write_dimacs(formula: &CnfFormula) -> String {
    let mut out = String::with_capacity(16 * formula.clauses.len() + 32);
    for c in &formula.comments {
        out.push_str("c ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&format!("p cnf {} {}\n", formula.n_vars, formula.clauses.len()));
    for clause in &formula.clauses {
        for l in clause {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DimacsOptions {
    /// Keep `c` lines in [`CnfFormula::comments`].
    pub keep_comments: bool,
}

/// Parses DIMACS CNF, discarding comments.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
    parse_dimacs_with(text, DimacsOptions::default())
}

pub fn parse_dimacs_with(text: &str, opts: DimacsOptions) -> Result<CnfFormula, CnfError> {
    let mut comments = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    let mut formula = CnfFormula::default();
    let mut pending: Vec<Literal> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "c" || line.starts_with("c ") || line.starts_with("c\t") {
            if opts.keep_comments {
                comments.push(line.get(2..).unwrap_or("").to_string());
            }
            continue;
        }
        if line.starts_with('%') {
            // SATLIB end marker
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(CnfError::MalformedHeader { line: line_no, msg: "duplicate header".into() });
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| CnfError::MalformedHeader { line: line_no, msg: msg.into() };
            if tok.len() != 4 || tok[0] != "p" || tok[1] != "cnf" {
                return Err(bad("expected `p cnf <vars> <clauses>`"));
            }
            let n_vars = tok[2].parse().map_err(|_| bad("bad variable count"))?;
            let n_clauses = tok[3].parse().map_err(|_| bad("bad clause count"))?;
            formula.n_vars = n_vars;
            formula.clauses.reserve(n_clauses);
            header = Some((n_vars, n_clauses));
            continue;
        }
        let Some((n_vars, _)) = header else {
            return Err(CnfError::MalformedHeader { line: line_no, msg: "clause before header".into() });
        };
        for tok in line.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| CnfError::Malformed { line: line_no, msg: format!("bad literal `{tok}`") })?;
            if x == 0 {
                formula.push_clause(std::mem::take(&mut pending))?;
                continue;
            }
            let var = x.unsigned_abs();
            if var > n_vars as u64 {
                return Err(CnfError::VarOutOfRange {
                    clause: formula.clauses.len(),
                    literal: x,
                    n_vars,
                });
            }
            pending.push(Literal::new(var as u32 - 1, x < 0));
        }
    }
    let Some((_, declared)) = header else {
        return Err(CnfError::MalformedHeader { line: 0, msg: "missing header".into() });
    };
    if !pending.is_empty() {
        return Err(CnfError::UnterminatedClause);
    }
    if formula.clauses.len() != declared {
        return Err(CnfError::ClauseCount { declared, found: formula.clauses.len() });
    }
    formula.comments = comments;
    Ok(formula)
}
