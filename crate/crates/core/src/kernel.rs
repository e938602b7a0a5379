//! Kernel atoms: typical atoms whose every counter-model has a neighbour
//! satisfying the atom.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::counter::{count_models, is_satisfiable};
use crate::error::{Error, Result};
use crate::evidence::{evidence_all, EvidenceTable};
use crate::formula::{attach_formula, Clause, CnfSystem, Lit, PropFormula, Var};
use crate::numeric::Count;
use crate::typicality::typical_atoms;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelVerdict {
    pub atom: Lit,
    /// `|MOD(S ∪ {¬â})|`
    pub n1: Count,
    /// models of `S ∪ {¬â}` whose flip on `a` is also a model
    pub n2: Count,
    pub is_kernel: bool,
}

fn reject_aux(system: &CnfSystem) -> Result<()> {
    if system.has_aux() {
        Err(Error::AuxiliaryVariables("the typical kernel"))
    } else {
        Ok(())
    }
}

/// Counts `|MOD(S1 ∪ S2)|` over the variables other than the atom's.
fn neighbour_count(system: &CnfSystem, atom: Lit) -> Count {
    let s1 = system.clauses().iter().filter(|c| !c.contains(atom)).map(|c| c.without(!atom));
    let s2 = system.clauses().iter().filter(|c| !c.contains(!atom)).map(|c| c.without(atom));
    let merged: Vec<Clause> = s1.chain(s2).collect();
    if merged.iter().any(Clause::is_empty) {
        return Count::zero();
    }
    let keep: Vec<Var> = system.vars().filter(|&v| v != atom.var()).collect();
    if keep.is_empty() {
        return Count::from(1u8);
    }
    count_models(&system.project(&keep, merged))
}

fn verdict(system: &CnfSystem, atom: Lit, n1: Count) -> KernelVerdict {
    let n2 = neighbour_count(system, atom);
    debug_assert!(n2 <= n1);
    KernelVerdict { is_kernel: n1 == n2, atom, n1, n2 }
}

/// Decides whether the typical atom `atom` is a kernel atom of `system`.
pub fn is_kernel_atom(system: &CnfSystem, atom: Lit) -> Result<KernelVerdict> {
    reject_aux(system)?;
    let with = count_models(&system.with_unit(atom));
    let n1 = count_models(&system.with_unit(!atom));
    if with.is_zero() && n1.is_zero() {
        return Err(Error::InconsistentSystem);
    }
    let typical = if atom.is_positive() { with >= n1 } else { with > n1 };
    if !typical {
        return Err(Error::NotTypical(system.lit_label(atom)));
    }
    Ok(verdict(system, atom, n1))
}

/// Per-variable kernel verdicts for every typical atom.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Kernel {
    pub verdicts: Vec<KernelVerdict>,
}

impl Kernel {
    pub fn atoms(&self) -> Vec<Lit> {
        self.verdicts.iter().filter(|v| v.is_kernel).map(|v| v.atom).collect()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.verdicts.iter().any(|v| v.is_kernel && v.atom == lit)
    }

    pub fn verdict(&self, var: Var) -> &KernelVerdict {
        &self.verdicts[var.offset()]
    }
}

/// Kernel verdicts reusing the counts of an evidence table.
pub fn typical_kernel_with(system: &CnfSystem, table: &EvidenceTable) -> Result<Kernel> {
    reject_aux(system)?;
    let verdicts: Vec<KernelVerdict> = typical_atoms(table)
        .into_par_iter()
        .map(|a| verdict(system, a.lit, table.models_with(!a.lit)))
        .collect();
    let kernel = Kernel { verdicts };
    assert!(is_satisfiable(&system.with_units(&kernel.atoms())), "typical kernel inconsistent with its system");
    Ok(kernel)
}

pub fn typical_kernel(system: &CnfSystem) -> Result<Kernel> {
    reject_aux(system)?;
    typical_kernel_with(system, &evidence_all(system)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    /// The formula does not mention the atom's variable.
    GuaranteedStable,
    /// The formula mentions the variable but the atom stayed in the kernel.
    IncidentallyStable,
    Lost,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityEntry {
    pub atom: Lit,
    pub status: Stability,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub entries: Vec<StabilityEntry>,
    pub kernel_after: Vec<Lit>,
}

/// A negative literal at evidence exactly 1/2 that still has the kernel
/// property. The tie rule names the positive literal as typical, so it is
/// missing from the kernel list, but nothing about it has changed.
fn tied_kernel_atom(system: &CnfSystem, atom: Lit) -> bool {
    let n1 = count_models(&system.with_unit(!atom));
    !atom.is_positive() && n1 == count_models(&system.with_unit(atom)) && verdict(system, atom, n1).is_kernel
}

/// Compares the kernel of `S` with the kernel of `S ∪ {phi}`. An atom whose
/// evidence drops to a tie counts as kept when it keeps the kernel property.
pub fn check_stability(system: &CnfSystem, phi: &PropFormula) -> Result<StabilityReport> {
    let before = typical_kernel(system)?;
    let extended = attach_formula(system, phi);
    let after = match typical_kernel(&extended) {
        Err(Error::InconsistentSystem) => return Err(Error::InconsistentFormula),
        other => other?,
    };
    let mentioned = phi.vars();
    let entries = before
        .atoms()
        .into_iter()
        .map(|atom| {
            let kept = after.contains(atom) || tied_kernel_atom(&extended, atom);
            let status = if !mentioned.contains(&atom.var()) {
                assert!(kept, "kernel atom lost under a formula not mentioning it");
                Stability::GuaranteedStable
            } else if kept {
                Stability::IncidentallyStable
            } else {
                Stability::Lost
            };
            StabilityEntry { atom, status }
        })
        .collect();
    Ok(StabilityReport { entries, kernel_after: after.atoms() })
}
