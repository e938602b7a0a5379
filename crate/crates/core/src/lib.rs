//! Model-counting evidence, typical models and typical kernels for CNF
//! knowledge bases.
//!
//! Evidence of a formula is the fraction of a system's models that satisfy
//! it. Everything here is computed exactly, with big integers for model
//! counts and big rationals for evidence, from a DPLL-style counter that
//! records per-literal tallies along every terminated search path.

pub mod approximation;
pub mod counter;
pub mod error;
pub mod evidence;
pub mod experiments;
pub mod formula;
pub mod kernel;
pub mod numeric;
pub mod session;
pub mod typicality;

pub use error::{Error, Result};
pub use formula::{parse_dimacs, parse_formula, Clause, CnfSystem, Lit, Model, PropFormula, Var};
pub use numeric::{Count, Ratio};
