//! Random constraint-satisfaction ensembles with unique solutions, a
//! WalkSAT engine, complete solution counting, and the tooling to measure
//! how WalkSAT's median cost grows with problem size.

pub mod cnf;
pub mod exact;
pub mod exec;
pub mod gen;
pub mod harness;
pub mod model;
pub mod rng;
pub mod walksat;

pub use cnf::{CnfFormula, Literal};
pub use exec::Execution;
pub use model::{Assignment, Family, Instance, ModelSpec, NativeClause};
