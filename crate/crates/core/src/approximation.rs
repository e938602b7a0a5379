//! Cheaper evidence: local surroundings of a literal, and typical values
//! decided before a counting run ends.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::counter::{anytime_run, BoundsSnapshot};
use crate::error::{Error, Result};
use crate::formula::{Clause, CnfSystem, Lit, Var};
use crate::numeric::{half, pow2, ratio, Count, Ratio};

/// Clauses reachable from a literal's variable in `order` steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Surrounding {
    pub center: Lit,
    pub order: usize,
    /// Clause indices into the original system, ascending.
    pub clauses: Vec<usize>,
    /// No further step would add a clause.
    pub saturated: bool,
}

impl Surrounding {
    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Variables mentioned by the surrounding plus the centre's variable.
    pub fn vars(&self, system: &CnfSystem) -> Vec<Var> {
        let mut vars: BTreeSet<Var> = self.clauses.iter().flat_map(|&i| system.clauses()[i].lits().iter().map(|l| l.var())).collect();
        vars.insert(self.center.var());
        vars.into_iter().collect()
    }

    /// The surrounding as a system over its own variables.
    pub fn subsystem(&self, system: &CnfSystem) -> CnfSystem {
        let clauses: Vec<Clause> = self.clauses.iter().map(|&i| system.clauses()[i].clone()).collect();
        system.project(&self.vars(system), clauses)
    }
}

pub fn surrounding(system: &CnfSystem, center: Lit, order: usize) -> Surrounding {
    assert!(order >= 1, "surroundings start at order 1");
    let clauses = system.clauses();
    let mut by_var: Vec<Vec<usize>> = vec![Vec::new(); system.num_vars()];
    for (i, c) in clauses.iter().enumerate() {
        for l in c.lits() {
            by_var[l.var().offset()].push(i);
        }
    }
    let mut taken = vec![false; clauses.len()];
    let mut seen_var = vec![false; system.num_vars()];
    let mut frontier = vec![center.var()];
    seen_var[center.var().offset()] = true;
    let mut level = 0;
    let mut saturated = false;
    while level < order {
        let mut added = Vec::new();
        for v in &frontier {
            for &i in &by_var[v.offset()] {
                if !taken[i] {
                    taken[i] = true;
                    added.push(i);
                }
            }
        }
        if added.is_empty() {
            saturated = true;
            break;
        }
        level += 1;
        frontier = added
            .iter()
            .flat_map(|&i| clauses[i].lits().iter().map(|l| l.var()))
            .filter(|v| !std::mem::replace(&mut seen_var[v.offset()], true))
            .collect();
    }
    if !saturated {
        saturated = frontier.iter().all(|v| by_var[v.offset()].iter().all(|&i| taken[i]));
    }
    let clauses = (0..clauses.len()).filter(|&i| taken[i]).collect();
    Surrounding { center, order, clauses, saturated }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurroundingEvidence {
    pub approx: Ratio,
    /// `approx − exact`
    pub epsilon: Option<Ratio>,
    /// Approximate and exact evidence fall on the same side of one half.
    pub credible: Option<bool>,
    pub saturated: bool,
}

fn side(e: &Ratio) -> bool {
    *e >= half()
}

pub fn surrounding_evidence(system: &CnfSystem, center: Lit, order: usize, exact: Option<&Ratio>) -> Result<SurroundingEvidence> {
    let s = surrounding(system, center, order);
    let approx = if s.is_empty() {
        half()
    } else {
        let sub = s.subsystem(system);
        let ledger = crate::counter::count_ledger(&sub);
        if ledger.total_models.is_zero() {
            return Err(Error::InconsistentSubsystem);
        }
        let vars = s.vars(system);
        let pos = vars.binary_search(&center.var()).expect("centre variable is kept");
        let local = Lit::new(Var::from_offset(pos), center.is_positive());
        ratio(ledger.models_with(local), &ledger.total_models)
    };
    Ok(SurroundingEvidence {
        epsilon: exact.map(|e| &approx - e),
        credible: exact.map(|e| side(e) == side(&approx)),
        approx,
        saturated: s.saturated,
    })
}

/// The first moment the anytime bounds settle a variable's typical value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EarlyDecision {
    pub var: Var,
    pub atom: Lit,
    /// paths processed when the decision fired
    pub tau0: u64,
    pub lower: Ratio,
    pub upper: Ratio,
    /// total paths over `tau0`
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EarlyReport {
    pub decisions: Vec<EarlyDecision>,
    /// paths in the complete run
    pub tau_f: u64,
}

/// `m / (m + rest)`. When both vanish the other side has no models, so for
/// a satisfiable system the share is 1.
fn share(m: &Count, rest: &Count) -> Ratio {
    let d = m + rest;
    if d.is_zero() {
        Ratio::one()
    } else {
        ratio(m, &d)
    }
}

fn early_atom(snap: &BoundsSnapshot<'_>, v: Var, cap: &Count) -> Option<Lit> {
    if snap.models_found(v.pos()) >= cap - snap.nonmodels_found(v.neg()) {
        Some(v.pos())
    } else if snap.models_found(v.neg()) > cap - snap.nonmodels_found(v.pos()) {
        Some(v.neg())
    } else {
        None
    }
}

fn brackets(snap: &BoundsSnapshot<'_>, v: Var, cap: &Count) -> (Ratio, Ratio) {
    let lower = share(&snap.models_found(v.pos()), &(cap - snap.nonmodels_found(v.neg())));
    let upper = Ratio::one() - share(&snap.models_found(v.neg()), &(cap - snap.nonmodels_found(v.pos())));
    (lower, upper)
}

/// Lower and upper bounds on `E(S, v)` from a partial run. They hold for a
/// satisfiable system.
pub fn evidence_brackets(snap: &BoundsSnapshot<'_>, v: Var) -> (Ratio, Ratio) {
    brackets(snap, v, &pow2(snap.n - 1))
}

/// The typical atom of `v` if a partial run already settles it.
pub fn early_typical_atom(snap: &BoundsSnapshot<'_>, v: Var) -> Option<Lit> {
    early_atom(snap, v, &pow2(snap.n - 1))
}

pub fn early_typical(system: &CnfSystem) -> Result<EarlyReport> {
    let b = system.base_vars();
    let cap = pow2(system.num_vars() - 1);
    let mut pending: Vec<Option<(Lit, u64, Ratio, Ratio)>> = vec![None; b];
    let mut open = b;
    let ledger = anytime_run(system, |snap| {
        if open == 0 {
            return;
        }
        for (i, slot) in pending.iter_mut().enumerate() {
            if slot.is_some() {
                continue;
            }
            let v = Var::from_offset(i);
            let Some(atom) = early_atom(snap, v, &cap) else { continue };
            let (lower, upper) = brackets(snap, v, &cap);
            *slot = Some((atom, snap.time, lower, upper));
            open -= 1;
        }
    });
    if ledger.total_models.is_zero() {
        return Err(Error::InconsistentSystem);
    }
    let tau_f = ledger.paths_processed();
    let decisions = pending
        .into_iter()
        .enumerate()
        .map(|(i, slot)| {
            let (atom, tau0, lower, upper) = slot.expect("every variable is decided by the end of the run");
            EarlyDecision { var: Var::from_offset(i), atom, tau0, lower, upper, gain: tau_f as f64 / tau0 as f64 }
        })
        .collect();
    Ok(EarlyReport { decisions, tau_f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::evidence_all;
    use crate::numeric::ratio_from_ints;

    fn chain() -> CnfSystem {
        CnfSystem::from_clauses(4, &[&[1, 2], &[-2, 3], &[3, 4]])
    }

    #[test]
    fn first_and_saturated_surroundings() {
        let s = chain();
        let a = Var::new(1).pos();
        let one = surrounding(&s, a, 1);
        assert_eq!((one.clauses.clone(), one.saturated), (vec![0], false));
        let two = surrounding(&s, a, 2);
        assert_eq!(two.clauses, vec![0, 1]);
        let many = surrounding(&s, a, 10);
        assert_eq!((many.clauses.clone(), many.saturated), (vec![0, 1, 2], true));
        assert!(surrounding(&s, a, 3).saturated);
    }

    #[test]
    fn chain_evidence() {
        let s = chain();
        let a = Var::new(1).pos();
        let exact = evidence_all(&s).unwrap().evidence(a);
        assert_eq!(exact, ratio_from_ints(5, 7));
        let e = surrounding_evidence(&s, a, 1, Some(&exact)).unwrap();
        assert_eq!(e.approx, ratio_from_ints(2, 3));
        assert_eq!(e.epsilon, Some(ratio_from_ints(-1, 21)));
        assert_eq!(e.credible, Some(true));
        let full = surrounding_evidence(&s, a, 5, Some(&exact)).unwrap();
        assert_eq!(full.epsilon, Some(Ratio::zero()));
    }

    #[test]
    fn isolated_variable() {
        let s = CnfSystem::from_clauses(3, &[&[1, 2]]);
        let v = Var::new(3).neg();
        let sur = surrounding(&s, v, 1);
        assert!(sur.is_empty() && sur.saturated);
        assert_eq!(surrounding_evidence(&s, v, 1, None).unwrap().approx, half());
    }

    #[test]
    fn unsatisfiable_surrounding() {
        let s = CnfSystem::from_clauses(3, &[&[1], &[-1], &[2, 3]]);
        assert_eq!(surrounding_evidence(&s, Var::new(1).pos(), 1, None), Err(Error::InconsistentSubsystem));
    }

    #[test]
    fn unit_system_decides_at_once() {
        let s = CnfSystem::from_clauses(1, &[&[1]]);
        let r = early_typical(&s).unwrap();
        let d = &r.decisions[0];
        assert_eq!(d.atom, Var::new(1).pos());
        assert_eq!((d.lower.clone(), d.upper.clone()), (Ratio::one(), Ratio::one()));
        assert!(d.tau0 <= r.tau_f);
    }

    #[test]
    fn free_variable_waits_for_the_end() {
        let s = CnfSystem::from_clauses(2, &[&[1]]);
        let r = early_typical(&s).unwrap();
        let d = &r.decisions[1];
        assert_eq!((d.tau0, d.atom), (r.tau_f, Var::new(2).pos()));
        assert_eq!((d.lower.clone(), d.upper.clone()), (half(), half()));
    }

    #[test]
    fn neutral_variables_resolve_positive() {
        // a <-> b: two models, each variable has evidence 1/2
        let s = CnfSystem::from_clauses(2, &[&[-1, 2], &[1, -2]]);
        let r = early_typical(&s).unwrap();
        for d in &r.decisions {
            assert!(d.atom.is_positive() && d.tau0 <= r.tau_f);
            assert!(d.lower <= half() && half() <= d.upper);
        }
    }

    #[test]
    fn brackets_contain_exact_evidence() {
        let s = crate::formula::parse_dimacs("p cnf 5 5\n1 2 0\n-1 3 0\n-3 -4 0\n4 5 2 0\n-2 -5 0\n").unwrap().system;
        let exact = evidence_all(&s).unwrap();
        for d in early_typical(&s).unwrap().decisions {
            let e = exact.evidence(d.var.pos());
            assert!(d.lower <= e && e <= d.upper);
            assert_eq!(d.atom.is_positive(), e >= half());
        }
    }
}
