//! Model families, native constraint instances and the native text format.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The five ensembles the toolkit knows how to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Exact Cover: random 1-in-3 clauses, pruned.
    Unlocked1in3,
    Locked1in3,
    Locked2in4,
    /// 3-XORSAT where every variable sits in exactly three clauses.
    Xorsat3Reg,
    /// 3-XORSAT with truncated-Poisson variable degrees of mean three.
    XorsatPoisson,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Unlocked1in3,
        Family::Locked1in3,
        Family::Locked2in4,
        Family::XorsatPoisson,
        Family::Xorsat3Reg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Unlocked1in3 => "unlocked-1in3",
            Family::Locked1in3 => "locked-1in3",
            Family::Locked2in4 => "locked-2in4",
            Family::Xorsat3Reg => "xorsat-3reg",
            Family::XorsatPoisson => "xorsat-poisson",
        }
    }

    pub fn clause_kind(self) -> ClauseKind {
        match self {
            Family::Unlocked1in3 | Family::Locked1in3 => ClauseKind::OneOfThree,
            Family::Locked2in4 => ClauseKind::TwoOfFour,
            Family::Xorsat3Reg | Family::XorsatPoisson => ClauseKind::Xor,
        }
    }

    pub fn arity(self) -> usize {
        self.clause_kind().arity()
    }

    pub fn is_xorsat(self) -> bool {
        self.clause_kind() == ClauseKind::Xor
    }

    /// Whether complementing every bit maps solutions to solutions.
    pub fn has_global_flip_symmetry(self) -> bool {
        self == Family::Locked2in4
    }

    pub fn is_locked(self) -> bool {
        matches!(self, Family::Locked1in3 | Family::Locked2in4)
    }

    /// Stable numeric label used when deriving random streams.
    pub fn stream_label(self) -> u64 {
        match self {
            Family::Unlocked1in3 => 11,
            Family::Locked1in3 => 12,
            Family::Locked2in4 => 13,
            Family::Xorsat3Reg => 14,
            Family::XorsatPoisson => 15,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| ModelError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClauseKind {
    OneOfThree,
    TwoOfFour,
    Xor,
}

impl ClauseKind {
    pub fn arity(self) -> usize {
        match self {
            ClauseKind::OneOfThree | ClauseKind::Xor => 3,
            ClauseKind::TwoOfFour => 4,
        }
    }

    fn token(self) -> &'static str {
        match self {
            ClauseKind::OneOfThree => "1in3",
            ClauseKind::TwoOfFour => "2in4",
            ClauseKind::Xor => "xor",
        }
    }

    fn from_token(s: &str) -> Option<Self> {
        match s {
            "1in3" => Some(ClauseKind::OneOfThree),
            "2in4" => Some(ClauseKind::TwoOfFour),
            "xor" => Some(ClauseKind::Xor),
            _ => None,
        }
    }
}

/// Published (N, M) pairs for the Exact Cover ensemble.
pub const EXACT_COVER_TABLE: [(usize, usize); 6] =
    [(16, 12), (32, 23), (64, 44), (128, 86), (192, 126), (256, 166)];

/// Threshold clause densities in thousandths, so that the nearest-integer
/// rule can be evaluated exactly.
const LOCKED_1IN3_ALPHA_MILLI: usize = 789;
const LOCKED_2IN4_ALPHA_MILLI: usize = 707;

/// Which ensemble to draw from, at which size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub n_vars: usize,
    pub n_clauses: usize,
    /// True when (N, M) does not follow the family's threshold rule.
    pub non_canonical: bool,
}

impl ModelSpec {
    /// The threshold ensemble at size `n_vars`.
    ///
    /// For the Exact Cover family, sizes outside the published table get a
    /// clause density interpolated linearly in ln N between the table
    /// entries (clamped at the ends) and are flagged non-canonical.
    pub fn at_threshold(family: Family, n_vars: usize) -> Result<Self, ModelError> {
        if n_vars == 0 {
            return Err(ModelError::EmptySize);
        }
        let (n_clauses, non_canonical) = match family {
            Family::Unlocked1in3 => match EXACT_COVER_TABLE.iter().find(|(n, _)| *n == n_vars) {
                Some(&(_, m)) => (m, false),
                None => (round_half_up(exact_cover_density(n_vars) * n_vars as f64), true),
            },
            Family::Locked1in3 => ((LOCKED_1IN3_ALPHA_MILLI * n_vars + 500) / 1000, false),
            Family::Locked2in4 => ((LOCKED_2IN4_ALPHA_MILLI * n_vars + 500) / 1000, false),
            Family::Xorsat3Reg | Family::XorsatPoisson => (n_vars, false),
        };
        Ok(ModelSpec { family, n_vars, n_clauses, non_canonical })
    }

    /// An explicit (N, M) pair; flagged non-canonical unless it coincides
    /// with the threshold rule.
    pub fn custom(family: Family, n_vars: usize, n_clauses: usize) -> Result<Self, ModelError> {
        let canonical = Self::at_threshold(family, n_vars)?;
        Ok(ModelSpec {
            n_clauses,
            non_canonical: canonical.non_canonical || canonical.n_clauses != n_clauses,
            ..canonical
        })
    }

    pub fn arity(&self) -> usize {
        self.family.arity()
    }
}

fn exact_cover_density(n_vars: usize) -> f64 {
    let table = EXACT_COVER_TABLE.map(|(n, m)| ((n as f64).ln(), m as f64 / n as f64));
    let x = (n_vars as f64).ln();
    if x <= table[0].0 {
        return table[0].1;
    }
    for w in table.windows(2) {
        let ((x0, a0), (x1, a1)) = (w[0], w[1]);
        if x <= x1 {
            return a0 + (a1 - a0) * (x - x0) / (x1 - x0);
        }
    }
    table[table.len() - 1].1
}

/// Nearest integer, halves rounded up.
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor().max(0.0) as usize
}

/// A truth assignment, indexed by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, var: usize) -> bool {
        self.0[var]
    }

    pub fn is_all_zero(&self) -> bool {
        self.0.iter().all(|&b| !b)
    }

    /// Elementwise XOR; both assignments must have the same length.
    pub fn xor(&self, other: &Assignment) -> Assignment {
        assert_eq!(self.len(), other.len(), "assignment length mismatch");
        Assignment(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }

    /// Assignment whose bit `v` is bit `v` of `bits` (for n ≤ 64).
    pub fn from_bits(bits: u64, n: usize) -> Self {
        Assignment((0..n).map(|v| (bits >> v) & 1 == 1).collect())
    }

    pub fn to_bitstring(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn from_bitstring(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Assignment)
    }
}

/// One native constraint: an occupation constraint or a parity check.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NativeClause {
    pub vars: Vec<u32>,
    pub kind: ClauseKind,
    /// Required sum mod 2; only meaningful for [`ClauseKind::Xor`].
    pub parity: bool,
}

impl NativeClause {
    pub fn one_of_three(vars: [u32; 3]) -> Self {
        NativeClause { vars: vars.to_vec(), kind: ClauseKind::OneOfThree, parity: false }
    }

    pub fn two_of_four(vars: [u32; 4]) -> Self {
        NativeClause { vars: vars.to_vec(), kind: ClauseKind::TwoOfFour, parity: false }
    }

    pub fn xor(vars: [u32; 3], parity: bool) -> Self {
        NativeClause { vars: vars.to_vec(), kind: ClauseKind::Xor, parity }
    }

    /// Number of variables of the clause set to one under `assignment`.
    pub fn weight(&self, assignment: &Assignment) -> usize {
        self.vars.iter().filter(|&&v| assignment.get(v as usize)).count()
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        let w = self.weight(assignment);
        match self.kind {
            ClauseKind::OneOfThree => w == 1,
            ClauseKind::TwoOfFour => w == 2,
            ClauseKind::Xor => (w % 2 == 1) == self.parity,
        }
    }
}

/// A native (pre-CNF) instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub family: Family,
    pub n_vars: usize,
    pub clauses: Vec<NativeClause>,
    pub known_solution: Option<Assignment>,
}

impl Instance {
    /// Builds an instance after checking the clause invariants.
    pub fn new(family: Family, n_vars: usize, clauses: Vec<NativeClause>) -> Result<Self, ModelError> {
        let inst = Instance { family, n_vars, clauses, known_solution: None };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let kind = self.family.clause_kind();
        for (i, c) in self.clauses.iter().enumerate() {
            if c.kind != kind {
                return Err(ModelError::KindMismatch { clause: i, family: self.family });
            }
            if c.vars.len() != kind.arity() {
                return Err(ModelError::BadArity { clause: i, expected: kind.arity(), found: c.vars.len() });
            }
            if let Some(&v) = c.vars.iter().find(|&&v| v as usize >= self.n_vars) {
                return Err(ModelError::VarOutOfRange { clause: i, var: v, n_vars: self.n_vars });
            }
            for (a, &x) in c.vars.iter().enumerate() {
                if c.vars[a + 1..].contains(&x) {
                    return Err(ModelError::RepeatedVar { clause: i, var: x });
                }
            }
            if c.parity && kind != ClauseKind::Xor {
                return Err(ModelError::ParityOnOccupation { clause: i });
            }
        }
        if let Some(s) = &self.known_solution {
            if s.len() != self.n_vars {
                return Err(ModelError::SolutionLength { expected: self.n_vars, found: s.len() });
            }
            if !self.is_satisfied_by(s) {
                return Err(ModelError::SolutionDoesNotSatisfy);
            }
        }
        Ok(())
    }

    pub fn n_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.is_satisfied_by(assignment))
    }

    /// Number of clauses each variable appears in.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vars];
        for c in &self.clauses {
            for &v in &c.vars {
                deg[v as usize] += 1;
            }
        }
        deg
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown model family `{0}`")]
    UnknownFamily(String),
    #[error("model size must be positive")]
    EmptySize,
    #[error("clause {clause}: kind does not match family {family}")]
    KindMismatch { clause: usize, family: Family },
    #[error("clause {clause}: expected {expected} variables, found {found}")]
    BadArity { clause: usize, expected: usize, found: usize },
    #[error("clause {clause}: variable {var} out of range (n_vars = {n_vars})")]
    VarOutOfRange { clause: usize, var: u32, n_vars: usize },
    #[error("clause {clause}: variable {var} repeated")]
    RepeatedVar { clause: usize, var: u32 },
    #[error("clause {clause}: parity bit set on an occupation clause")]
    ParityOnOccupation { clause: usize },
    #[error("known solution has length {found}, expected {expected}")]
    SolutionLength { expected: usize, found: usize },
    #[error("known solution does not satisfy the instance")]
    SolutionDoesNotSatisfy,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

// ---------------------------------------------------------------------------
// Native text format:
//
//   p native <family> <n_vars> <n_clauses>
//   c <kind> <var...> [parity]        one per clause, 0-based variables
//   s <bitstring>                     optional known solution
//
// A file may hold several instances back to back. Blank lines and lines
// starting with `#` are ignored.

/// Serialises one instance in the native format.
pub fn write_native(inst: &Instance) -> String {
    let mut out = format!("p native {} {} {}\n", inst.family, inst.n_vars, inst.clauses.len());
    for c in &inst.clauses {
        out.push_str("c ");
        out.push_str(c.kind.token());
        for v in &c.vars {
            out.push(' ');
            out.push_str(&v.to_string());
        }
        if c.kind == ClauseKind::Xor {
            out.push_str(if c.parity { " 1" } else { " 0" });
        }
        out.push('\n');
    }
    if let Some(s) = &inst.known_solution {
        out.push_str("s ");
        out.push_str(&s.to_bitstring());
        out.push('\n');
    }
    out
}

/// Parses every instance in `text`.
pub fn read_native_all(text: &str) -> Result<Vec<Instance>, ModelError> {
    let err = |line: usize, msg: &str| ModelError::Parse { line, msg: msg.to_string() };
    let mut out = Vec::new();
    let mut current: Option<(Instance, usize, usize)> = None;

    let finish = |cur: Option<(Instance, usize, usize)>, out: &mut Vec<Instance>| -> Result<(), ModelError> {
        if let Some((inst, declared, header_line)) = cur {
            if inst.clauses.len() != declared {
                return Err(ModelError::Parse {
                    line: header_line,
                    msg: format!("header declares {declared} clauses, found {}", inst.clauses.len()),
                });
            }
            inst.validate()?;
            out.push(inst);
        }
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("p") => {
                finish(current.take(), &mut out)?;
                if tok.next() != Some("native") {
                    return Err(err(line_no, "expected `p native` header"));
                }
                let family: Family = tok
                    .next()
                    .ok_or_else(|| err(line_no, "missing family"))?
                    .parse()
                    .map_err(|_| err(line_no, "unknown family"))?;
                let n_vars = parse_num(tok.next(), line_no, "n_vars")?;
                let n_clauses = parse_num(tok.next(), line_no, "n_clauses")?;
                if tok.next().is_some() {
                    return Err(err(line_no, "trailing tokens in header"));
                }
                let inst = Instance { family, n_vars, clauses: Vec::with_capacity(n_clauses), known_solution: None };
                current = Some((inst, n_clauses, line_no));
            }
            Some("c") => {
                let (inst, _, _) = current.as_mut().ok_or_else(|| err(line_no, "clause before header"))?;
                let kind = tok
                    .next()
                    .and_then(ClauseKind::from_token)
                    .ok_or_else(|| err(line_no, "unknown clause kind"))?;
                let mut vars = Vec::with_capacity(kind.arity());
                for _ in 0..kind.arity() {
                    vars.push(parse_num(tok.next(), line_no, "variable")? as u32);
                }
                let parity = if kind == ClauseKind::Xor {
                    match tok.next() {
                        Some("0") => false,
                        Some("1") => true,
                        _ => return Err(err(line_no, "xor clause needs parity 0 or 1")),
                    }
                } else {
                    false
                };
                if tok.next().is_some() {
                    return Err(err(line_no, "trailing tokens in clause"));
                }
                inst.clauses.push(NativeClause { vars, kind, parity });
            }
            Some("s") => {
                let (inst, _, _) = current.as_mut().ok_or_else(|| err(line_no, "solution before header"))?;
                let bits = tok.next().unwrap_or("");
                let s = Assignment::from_bitstring(bits).ok_or_else(|| err(line_no, "bad solution bitstring"))?;
                if tok.next().is_some() {
                    return Err(err(line_no, "trailing tokens in solution"));
                }
                inst.known_solution = Some(s);
            }
            _ => return Err(err(line_no, "unrecognised line")),
        }
    }
    finish(current.take(), &mut out)?;
    Ok(out)
}

/// Parses a text holding exactly one instance.
pub fn read_native(text: &str) -> Result<Instance, ModelError> {
    let mut all = read_native_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        n => Err(ModelError::Parse { line: 0, msg: format!("expected one instance, found {n}") }),
    }
}

fn parse_num(tok: Option<&str>, line: usize, what: &str) -> Result<usize, ModelError> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| ModelError::Parse { line, msg: format!("bad or missing {what}") })
}
