//! Literals, clauses, CNF systems, query formulas and their syntax.

mod attach;
mod cnf;
mod dimacs;
mod metrics;
mod prop;

pub use attach::{attach_all, attach_formula, DIRECT_EXPANSION_LIMIT};
pub use cnf::{Clause, CnfSystem, Lit, Model, Var};
pub use dimacs::{parse_dimacs, render_dimacs, ParseWarning, Parsed, WarningKind};
pub use metrics::{impurity_f64, metrics, SyntacticMetrics};
pub use prop::{parse_formula, FormulaDisplay, PropFormula};
