//! Typical atoms, typical models and erratum.

use num_traits::{Float, One, Zero};
use serde::Serialize;

use crate::counter::{count_models, enumerate_models, find_model};
use crate::error::{Error, Result};
use crate::evidence::EvidenceTable;
use crate::formula::{CnfSystem, Lit, Model, Var};
use crate::numeric::{half, one_minus_pow_complement, ratio_from_ints, Count, Ratio};

/// The literal of a variable with evidence at least one half.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalAtom {
    pub lit: Lit,
    pub evidence: Ratio,
    /// Evidence is exactly one half; the positive literal was taken.
    pub neutral: bool,
}

pub fn typical_atom(table: &EvidenceTable, var: Var) -> TypicalAtom {
    let e = table.evidence(var.pos());
    let h = half();
    let lit = if e >= h { var.pos() } else { var.neg() };
    TypicalAtom { lit, evidence: table.evidence(lit), neutral: e == h }
}

/// `T(S)`: one typical atom per base variable, in variable order.
pub fn typical_atoms(table: &EvidenceTable) -> Vec<TypicalAtom> {
    (0..table.vars()).map(|i| typical_atom(table, Var::from_offset(i))).collect()
}

pub fn typical_value(table: &EvidenceTable, var: Var) -> bool {
    typical_atom(table, var).lit.is_positive()
}

fn typical_lits(table: &EvidenceTable) -> Vec<Lit> {
    typical_atoms(table).into_iter().map(|a| a.lit).collect()
}

/// `T(m)`: the typical atoms that hold in `m`.
pub fn typical_in_model(table: &EvidenceTable, model: &Model) -> Vec<Lit> {
    typical_lits(table).into_iter().filter(|&l| model.satisfies(l)).collect()
}

/// The model satisfying every typical atom, if there is one.
pub fn most_typical_model(system: &CnfSystem, table: &EvidenceTable) -> Option<Model> {
    find_model(&system.with_units(&typical_lits(table))).map(|m| m.truncate(system.base_vars()))
}

/// A model whose set of typical atoms is not strictly contained in another's.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalModel {
    pub model: Model,
    pub typical: Vec<Lit>,
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn of(flags: impl Iterator<Item = bool>, n: usize) -> Bits {
        let mut w = vec![0u64; n.div_ceil(64)];
        for (i, f) in flags.enumerate() {
            if f {
                w[i / 64] |= 1 << (i % 64);
            }
        }
        Bits(w)
    }

    fn strict_subset_of(&self, other: &Bits) -> bool {
        self != other && self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

/// All typical models, in enumeration order.
///
/// Fails with [`Error::CapExceeded`] when `S` has more than `cap` models.
pub fn typical_models(system: &CnfSystem, table: &EvidenceTable, cap: usize) -> Result<Vec<TypicalModel>> {
    if count_models(system) > Count::from(cap) {
        return Err(Error::CapExceeded { cap });
    }
    let b = system.base_vars();
    let typ = typical_lits(table);
    let models: Vec<Model> = enumerate_models(system, cap).models.into_iter().map(|m| m.truncate(b)).collect();
    let sets: Vec<Bits> = models.iter().map(|m| Bits::of(typ.iter().map(|&l| m.satisfies(l)), b)).collect();
    let out = models
        .iter()
        .zip(&sets)
        .filter(|(_, s)| !sets.iter().any(|o| s.strict_subset_of(o)))
        .map(|(m, _)| TypicalModel { model: m.clone(), typical: typical_in_model(table, m) })
        .collect();
    Ok(out)
}

/// `ER(A) = 1 − (1/B) Σ_v E(S, A(v))`
pub fn erratum(table: &EvidenceTable, model: &Model) -> Ratio {
    let b = table.vars();
    let sum: Ratio = (0..b).map(|i| table.evidence(model.lit(Var::from_offset(i)))).sum();
    Ratio::one() - sum / ratio_from_ints(b as i64, 1)
}

/// Summary erratum figures for a system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErratumStats {
    /// mean typical evidence `E(S)`
    pub mean_typical: Ratio,
    pub most_typical: Ratio,
    pub random: Ratio,
    pub worst: Ratio,
}

pub fn erratum_stats(table: &EvidenceTable) -> ErratumStats {
    let b = ratio_from_ints(table.vars() as i64, 1);
    let hats: Vec<Ratio> = typical_atoms(table).into_iter().map(|a| a.evidence).collect();
    let mean: Ratio = hats.iter().cloned().sum::<Ratio>() / &b;
    let spread: Ratio = hats.iter().map(|e| e * (Ratio::one() - e)).sum();
    ErratumStats {
        most_typical: Ratio::one() - &mean,
        random: ratio_from_ints(2, 1) * spread / b,
        worst: mean.clone(),
        mean_typical: mean,
    }
}

/// Estimated probability that a system has a most typical model, treating
/// models as independent draws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PmtmEstimate<T> {
    pub estimate: T,
    pub lower: T,
    pub upper: T,
}

/// `1 − (1 − Π Ê)^M`, with bounds from `Π Ê ≥ 2^−B` and the mean typical
/// evidence. `hats` are the typical-atom evidences, `models` is `M`.
pub fn pmtm_estimate<T: Float>(hats: &[T], models: T) -> PmtmEstimate<T> {
    let b = T::from(hats.len()).expect("length fits");
    let two = T::one() + T::one();
    let product = hats.iter().fold(T::one(), |acc, &e| acc * e);
    let mean = hats.iter().fold(T::zero(), |acc, &e| acc + e) / b;
    PmtmEstimate {
        estimate: one_minus_pow_complement(product, models),
        lower: one_minus_pow_complement(two.powf(-b), models),
        upper: one_minus_pow_complement(mean.powf(b), models),
    }
}

/// Evidence, typicality and most typical model of a system in one record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalityReport {
    pub typical: Vec<TypicalAtom>,
    pub most_typical_model: Option<Model>,
    pub stats: ErratumStats,
}

pub fn typicality_report(system: &CnfSystem, table: &EvidenceTable) -> TypicalityReport {
    TypicalityReport {
        typical: typical_atoms(table),
        most_typical_model: most_typical_model(system, table),
        stats: erratum_stats(table),
    }
}

impl TypicalityReport {
    pub fn neutral_count(&self) -> usize {
        self.typical.iter().filter(|a| a.neutral).count()
    }

    pub fn is_certain(&self) -> bool {
        self.typical.iter().all(|a| a.evidence.is_one() || a.evidence.is_zero())
    }
}
