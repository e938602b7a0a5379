//! Conjoining a formula to a CNF system.

use super::cnf::{Clause, CnfSystem, Lit, Var};
use super::prop::PropFormula;

/// Formulas over at most this many variables are expanded directly.
pub const DIRECT_EXPANSION_LIMIT: usize = 12;

/// Returns `S ∪ {F}` in CNF.
///
/// Small formulas get one blocking clause per falsifying assignment of their
/// variables, so no variables are added. Larger ones get a definitional
/// translation: each connective gets a fresh auxiliary variable defined by
/// equivalence clauses. Every auxiliary is a function of the base variables,
/// so the model count is unchanged by the extension.
pub fn attach_formula(system: &CnfSystem, formula: &PropFormula) -> CnfSystem {
    let vars = formula.vars();
    assert!(
        vars.iter().all(|v| v.index() <= system.base_vars()),
        "formula must range over base variables"
    );
    let mut out = system.clone();
    if vars.len() <= DIRECT_EXPANSION_LIMIT {
        for clause in expand_direct(formula, &vars) {
            out.add_clause(clause);
        }
    } else {
        let root = define(&mut out, formula);
        out.add_clause(unit(root));
    }
    out
}

/// Conjoins several formulas in order.
pub fn attach_all<'a>(system: &CnfSystem, formulas: impl IntoIterator<Item = &'a PropFormula>) -> CnfSystem {
    formulas.into_iter().fold(system.clone(), |s, f| attach_formula(&s, f))
}

fn unit(l: Lit) -> Clause {
    Clause::normalize(vec![l]).expect("unit clause")
}

fn expand_direct(formula: &PropFormula, vars: &[Var]) -> Vec<Clause> {
    let k = vars.len();
    let mut clauses = Vec::new();
    let mut values = vec![false; vars.iter().map(|v| v.index()).max().unwrap_or(0)];
    for bits in 0u32..(1u32 << k) {
        for (j, v) in vars.iter().enumerate() {
            values[v.offset()] = bits >> j & 1 == 1;
        }
        if !formula.eval_with(&|v| values[v.offset()]) {
            // block this assignment
            let lits = vars.iter().map(|&v| Lit::new(v, !values[v.offset()])).collect();
            clauses.push(Clause::normalize(lits).expect("blocking clause has distinct variables"));
        }
    }
    clauses
}

fn clause(lits: &[Lit]) -> Option<Clause> {
    Clause::normalize(lits.to_vec())
}

fn push(sys: &mut CnfSystem, lits: &[Lit]) {
    if let Some(c) = clause(lits) {
        sys.add_clause(c);
    }
}

/// Returns a literal equivalent to `f` under the added definitions.
fn define(sys: &mut CnfSystem, f: &PropFormula) -> Lit {
    match f {
        PropFormula::Atom(v) => v.pos(),
        PropFormula::Not(inner) => !define(sys, inner),
        PropFormula::And(a, b) => {
            let (x, y) = (define(sys, a), define(sys, b));
            let t = sys.new_aux().pos();
            push(sys, &[!t, x]);
            push(sys, &[!t, y]);
            push(sys, &[t, !x, !y]);
            t
        }
        PropFormula::Or(a, b) => {
            let (x, y) = (define(sys, a), define(sys, b));
            let t = sys.new_aux().pos();
            push(sys, &[!t, x, y]);
            push(sys, &[t, !x]);
            push(sys, &[t, !y]);
            t
        }
        PropFormula::Implies(a, b) => {
            let (x, y) = (define(sys, a), define(sys, b));
            let t = sys.new_aux().pos();
            push(sys, &[!t, !x, y]);
            push(sys, &[t, x]);
            push(sys, &[t, !y]);
            t
        }
        PropFormula::Iff(a, b) => {
            let (x, y) = (define(sys, a), define(sys, b));
            let t = sys.new_aux().pos();
            push(sys, &[!t, !x, y]);
            push(sys, &[!t, x, !y]);
            push(sys, &[t, x, y]);
            push(sys, &[t, !x, !y]);
            t
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    #[test]
    fn small_formulas_add_no_variables() {
        let s = CnfSystem::with_names(["a", "b", "c"]);
        let f = parse_formula("a | b | c", &s).unwrap();
        let t = attach_formula(&s, &f);
        assert_eq!(t.num_vars(), 3);
        assert_eq!(t.num_clauses(), 1);
    }

    #[test]
    fn contradiction_blocks_everything() {
        let s = CnfSystem::with_names(["a"]);
        let f = parse_formula("a & !a", &s).unwrap();
        let t = attach_formula(&s, &f);
        assert_eq!(t.num_clauses(), 2);
    }

    #[test]
    fn large_formulas_use_auxiliaries() {
        let names: Vec<String> = (0..13).map(|i| format!("x{i}")).collect();
        let s = CnfSystem::with_names(names.clone());
        let f = parse_formula(&names.join(" | "), &s).unwrap();
        let t = attach_formula(&s, &f);
        assert!(t.has_aux());
        assert_eq!(t.base_vars(), 13);
        assert_eq!(t.num_vars(), 13 + 12);
    }
}
