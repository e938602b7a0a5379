//! Evidence of literals and formulas: the fraction of models that agree.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::counter::{count_ledger, count_models, CountLedger};
use crate::error::{Error, Result};
use crate::formula::{attach_formula, CnfSystem, Lit, Model, PropFormula, Var};
use crate::numeric::{pow2, ratio, ratio_from_ints, Count, Ratio};

/// Exact `E(S, v)` for every base variable, from a single counter run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvidenceTable {
    /// Variables the counts range over (base plus auxiliaries).
    pub counted_vars: usize,
    pub total_models: Count,
    positive_models: Vec<Count>,
    positive: Vec<Ratio>,
}

impl EvidenceTable {
    pub fn from_ledger(ledger: &CountLedger, base_vars: usize) -> Result<EvidenceTable> {
        if ledger.total_models.is_zero() {
            return Err(Error::InconsistentSystem);
        }
        let positive_models: Vec<Count> =
            (1..=base_vars).map(|i| ledger.models_with(Var::new(i).pos()).clone()).collect();
        let positive = positive_models.iter().map(|c| ratio(c, &ledger.total_models)).collect();
        Ok(EvidenceTable { counted_vars: ledger.n, total_models: ledger.total_models.clone(), positive_models, positive })
    }

    /// Builds a table directly from per-variable evidence values, for
    /// synthetic evidence vectors. The total is set to 1.
    pub fn from_values(values: Vec<Ratio>) -> EvidenceTable {
        EvidenceTable {
            counted_vars: values.len(),
            total_models: Count::one(),
            positive_models: vec![Count::zero(); values.len()],
            positive: values,
        }
    }

    /// Number of base variables.
    pub fn vars(&self) -> usize {
        self.positive.len()
    }

    pub fn evidence(&self, lit: Lit) -> Ratio {
        let e = &self.positive[lit.var().offset()];
        if lit.is_positive() {
            e.clone()
        } else {
            Ratio::one() - e
        }
    }

    /// `|MOD(S ∪ {lit})|`
    pub fn models_with(&self, lit: Lit) -> Count {
        let pos = &self.positive_models[lit.var().offset()];
        if lit.is_positive() {
            pos.clone()
        } else {
            &self.total_models - pos
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &Ratio)> {
        self.positive.iter().enumerate().map(|(i, e)| (Var::from_offset(i), e))
    }
}

pub fn evidence_all(system: &CnfSystem) -> Result<EvidenceTable> {
    EvidenceTable::from_ledger(&count_ledger(system), system.base_vars())
}

fn satisfiable_count(system: &CnfSystem) -> Result<Count> {
    let m = count_models(system);
    if m.is_zero() {
        Err(Error::InconsistentSystem)
    } else {
        Ok(m)
    }
}

/// `|MOD(S ∪ {F})| / |MOD(S)|`
pub fn evidence_of(system: &CnfSystem, formula: &PropFormula) -> Result<Ratio> {
    let m = satisfiable_count(system)?;
    let with = count_models(&attach_formula(system, formula));
    Ok(ratio(&with, &m))
}

/// Evidence of the conjunction of `lits`.
pub fn evidence_of_conjunction(system: &CnfSystem, lits: &[Lit]) -> Result<Ratio> {
    let m = satisfiable_count(system)?;
    Ok(ratio(&count_models(&system.with_units(lits)), &m))
}

/// Models of `S` with known prior probabilities.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PinnedDistribution {
    pub entries: Vec<(Model, Ratio)>,
}

impl PinnedDistribution {
    pub fn new(entries: Vec<(Model, Ratio)>) -> Self {
        PinnedDistribution { entries }
    }

    pub fn total(&self) -> Ratio {
        self.entries.iter().map(|(_, p)| p.clone()).sum()
    }
}

fn is_model_of(system: &CnfSystem, m: &Model) -> bool {
    if system.has_aux() {
        let units: Vec<Lit> = system.base().map(|v| m.lit(v)).collect();
        crate::counter::is_satisfiable(&system.with_units(&units))
    } else {
        system.satisfied_by(m)
    }
}

/// Evidence when some models carry known probabilities and the remaining
/// models share the rest of the mass equally.
pub fn pinned_evidence(system: &CnfSystem, formula: &PropFormula, pinned: &PinnedDistribution) -> Result<Ratio> {
    let b = system.base_vars();
    let mut seen = std::collections::HashSet::new();
    for (m, p) in &pinned.entries {
        if m.num_vars() != b {
            return Err(Error::InvalidDistribution(format!("model over {} variables, expected {b}", m.num_vars())));
        }
        if !seen.insert(m.clone()) {
            return Err(Error::InvalidDistribution("a model is pinned twice".into()));
        }
        if *p <= Ratio::zero() || *p > Ratio::one() {
            return Err(Error::InvalidDistribution("probabilities must lie in (0, 1]".into()));
        }
        if !is_model_of(system, m) {
            return Err(Error::InvalidDistribution("pinned assignment is not a model of the system".into()));
        }
    }
    let p_total = pinned.total();
    if p_total > Ratio::one() {
        return Err(Error::InvalidDistribution("pinned probabilities sum above 1".into()));
    }
    let m_total = satisfiable_count(system)?;
    let with = count_models(&attach_formula(system, formula));
    let pinned_sat: Vec<&(Model, Ratio)> = pinned.entries.iter().filter(|(m, _)| formula.eval(m)).collect();
    let rest_total = &m_total - Count::from(pinned.entries.len());
    let rest_with = &with - Count::from(pinned_sat.len());
    let known: Ratio = pinned_sat.iter().map(|(_, p)| p.clone()).sum();
    let free_mass = Ratio::one() - p_total;
    if free_mass.is_zero() {
        return Ok(known);
    }
    if rest_total.is_zero() {
        return Err(Error::DegenerateDistribution);
    }
    Ok(free_mass * ratio(&rest_with, &rest_total) + known)
}

/// Lower and upper bounds on the evidence of a conjunction of literals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjunctionBounds {
    pub alpha: Ratio,
    pub beta: Ratio,
    pub gamma: Ratio,
    pub lower: Ratio,
    pub upper: Ratio,
}

impl ConjunctionBounds {
    pub fn contains(&self, e: &Ratio) -> bool {
        &self.lower <= e && e <= &self.upper
    }
}

/// `alpha = Σ E(S,l) − k + 1`, `beta = 1 − 2^(B−k)(2^k − 1)/M`,
/// `gamma = 2^(B−k)/M`; bounds are `[max(0, α, β), min(1, γ)]`.
pub fn conjunction_bounds(table: &EvidenceTable, lits: &[Lit], b: usize, m: &Count) -> ConjunctionBounds {
    let k = lits.len();
    assert!(k >= 1 && k <= b, "need 1 <= k <= B literals");
    let sum: Ratio = lits.iter().map(|&l| table.evidence(l)).sum();
    let alpha = sum - ratio_from_ints(k as i64 - 1, 1);
    let free = pow2(b - k);
    let beta = Ratio::one() - ratio(&(&free * (pow2(k) - Count::one())), m);
    let gamma = ratio(&free, m);
    let lower = [Ratio::zero(), alpha.clone(), beta.clone()].into_iter().max().expect("non-empty");
    let upper = if gamma < Ratio::one() { gamma.clone() } else { Ratio::one() };
    ConjunctionBounds { alpha, beta, gamma, lower, upper }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn ex31() -> CnfSystem {
        let mut s = CnfSystem::with_names(["a", "b", "c"]);
        for c in [&[1i64, 2][..], &[2, 3], &[3, 1], &[-1, -2, -3]] {
            s.add_clause(crate::formula::Clause::from_dimacs(c).unwrap());
        }
        s
    }

    fn r(n: i64, d: i64) -> Ratio {
        ratio_from_ints(n, d)
    }

    #[test]
    fn example_three_one_evidence() {
        let t = evidence_all(&ex31()).unwrap();
        for i in 1..=3 {
            assert_eq!(t.evidence(Var::new(i).pos()), r(2, 3));
            assert_eq!(t.evidence(Var::new(i).neg()), r(1, 3));
        }
    }

    #[test]
    fn empty_system_is_symmetric() {
        let t = evidence_all(&CnfSystem::new(4)).unwrap();
        assert!(t.iter().all(|(_, e)| *e == r(1, 2)));
    }

    #[test]
    fn inconsistent_system() {
        let s = CnfSystem::from_clauses(1, &[&[1], &[-1]]);
        assert_eq!(evidence_all(&s), Err(Error::InconsistentSystem));
        let f = PropFormula::atom(Var::new(1));
        assert_eq!(evidence_of(&s, &f), Err(Error::InconsistentSystem));
    }

    #[test]
    fn formula_evidence() {
        let s = ex31();
        assert_eq!(evidence_of(&s, &parse_formula("a & b", &s).unwrap()).unwrap(), r(1, 3));
        assert_eq!(evidence_of(&s, &parse_formula("b | c", &s).unwrap()).unwrap(), r(1, 1));
        assert_eq!(evidence_of(&s, &parse_formula("a & !a", &s).unwrap()).unwrap(), r(0, 1));
    }

    #[test]
    fn pinned_cases() {
        let s = ex31();
        let a = parse_formula("a", &s).unwrap();
        let m1 = Model::new(vec![true, true, false]);
        let m2 = Model::new(vec![true, false, true]);
        let m3 = Model::new(vec![false, true, true]);
        let half = PinnedDistribution::new(vec![(m1.clone(), r(1, 2))]);
        assert_eq!(pinned_evidence(&s, &a, &half).unwrap(), r(3, 4));
        assert_eq!(pinned_evidence(&s, &a, &PinnedDistribution::default()).unwrap(), r(2, 3));
        let full = PinnedDistribution::new(vec![(m1.clone(), r(1, 5)), (m2.clone(), r(3, 10)), (m3.clone(), r(1, 2))]);
        assert_eq!(pinned_evidence(&s, &a, &full).unwrap(), r(1, 2));
        let degenerate = PinnedDistribution::new(vec![(m1.clone(), r(1, 5)), (m2, r(1, 5)), (m3, r(1, 5))]);
        assert_eq!(pinned_evidence(&s, &a, &degenerate), Err(Error::DegenerateDistribution));
        let bad = PinnedDistribution::new(vec![(Model::new(vec![true, true, true]), r(1, 2))]);
        assert!(matches!(pinned_evidence(&s, &a, &bad), Err(Error::InvalidDistribution(_))));
        let twice = PinnedDistribution::new(vec![(m1.clone(), r(1, 4)), (m1, r(1, 4))]);
        assert!(matches!(pinned_evidence(&s, &a, &twice), Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn conjunction_bounds_example() {
        let s = ex31();
        let t = evidence_all(&s).unwrap();
        let lits = [Var::new(1).pos(), Var::new(2).pos()];
        let b = conjunction_bounds(&t, &lits, 3, &t.total_models);
        assert_eq!(b.alpha, r(1, 3));
        assert_eq!(b.beta, r(-1, 1));
        assert_eq!(b.gamma, r(2, 3));
        assert_eq!((b.lower.clone(), b.upper.clone()), (r(1, 3), r(2, 3)));
        assert!(b.contains(&evidence_of_conjunction(&s, &lits).unwrap()));
    }

    #[test]
    fn single_literal_bounds() {
        let s = ex31();
        let t = evidence_all(&s).unwrap();
        let l = Var::new(3).neg();
        let b = conjunction_bounds(&t, &[l], 3, &t.total_models);
        assert_eq!(b.alpha, t.evidence(l));
        assert!(b.contains(&t.evidence(l)));
    }
}
