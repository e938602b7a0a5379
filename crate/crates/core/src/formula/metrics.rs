use serde::Serialize;

use super::cnf::{CnfSystem, Var};
use crate::numeric::{ratio_from_ints, Ratio};

/// Occurrence-based syntactic measures of a system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SyntacticMetrics {
    pub vars: usize,
    pub clauses: usize,
    /// clauses-to-variables ratio `C / B`
    pub ratio: Ratio,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
    /// `min(pos, neg) / max(pos, neg)`, 0 for a variable that never occurs
    pub impurity: Vec<Ratio>,
    pub system_impurity: Ratio,
}

impl SyntacticMetrics {
    pub fn imp(&self, v: Var) -> &Ratio {
        &self.impurity[v.offset()]
    }

    pub fn is_pure(&self, v: Var) -> bool {
        self.pos[v.offset()] == 0 || self.neg[v.offset()] == 0
    }
}

/// Metrics over the base variables.
pub fn metrics(system: &CnfSystem) -> SyntacticMetrics {
    let b = system.base_vars();
    let mut pos = vec![0usize; b];
    let mut neg = vec![0usize; b];
    for c in system.clauses() {
        for l in c.lits() {
            let i = l.var().offset();
            if i >= b {
                continue;
            }
            if l.is_positive() {
                pos[i] += 1;
            } else {
                neg[i] += 1;
            }
        }
    }
    let impurity: Vec<Ratio> = pos
        .iter()
        .zip(&neg)
        .map(|(&p, &n)| {
            let hi = p.max(n);
            if hi == 0 {
                ratio_from_ints(0, 1)
            } else {
                ratio_from_ints(p.min(n) as i64, hi as i64)
            }
        })
        .collect();
    let sum: Ratio = impurity.iter().cloned().sum();
    SyntacticMetrics {
        vars: b,
        clauses: system.num_clauses(),
        ratio: ratio_from_ints(system.num_clauses() as i64, b as i64),
        pos,
        neg,
        system_impurity: sum / ratio_from_ints(b as i64, 1),
        impurity,
    }
}

/// `imp(S)` as a float, without building the full report.
pub fn impurity_f64(system: &CnfSystem) -> f64 {
    let b = system.base_vars();
    let mut pos = vec![0u32; b];
    let mut neg = vec![0u32; b];
    for c in system.clauses() {
        for l in c.lits() {
            if l.var().offset() < b {
                if l.is_positive() {
                    pos[l.var().offset()] += 1;
                } else {
                    neg[l.var().offset()] += 1;
                }
            }
        }
    }
    let total: f64 = pos
        .iter()
        .zip(&neg)
        .map(|(&p, &n)| if p.max(n) == 0 { 0.0 } else { p.min(n) as f64 / p.max(n) as f64 })
        .sum();
    total / b as f64
}
