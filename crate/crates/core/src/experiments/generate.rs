use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{impurity_f64, Clause, CnfSystem, Lit, Var};

/// Accepted distance between the generated and the requested impurity.
pub const IMPURITY_TOLERANCE: f64 = 0.02;

const IMPURITY_RETRIES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenConfig {
    pub vars: usize,
    pub clauses: usize,
    pub width: usize,
    /// Requested `imp(S)`; `None` flips a fair coin per literal.
    pub target_impurity: Option<f64>,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(vars: usize, clauses: usize, seed: u64) -> Self {
        GenConfig { vars, clauses, width: 3, target_impurity: None, seed }
    }

    /// `C = round(r · B)` clauses.
    pub fn with_ratio(vars: usize, r: f64, seed: u64) -> Self {
        GenConfig::new(vars, (r * vars as f64).round() as usize, seed)
    }

    pub fn impurity(mut self, target: f64) -> Self {
        self.target_impurity = Some(target);
        self
    }
}

/// Derives the seed of instance `j` at grid point `point` from a master seed.
pub fn instance_seed(master: u64, point: usize, j: usize) -> u64 {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master.to_le_bytes());
    key[8..16].copy_from_slice(&(point as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(j as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key).next_u64()
}

fn draw_vars(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<Var>> {
    (0..cfg.clauses)
        .map(|_| sample(rng, cfg.vars, cfg.width).into_iter().map(Var::from_offset).collect())
        .collect()
}

fn build(cfg: &GenConfig, vars: &[Vec<Var>], positive: &[Vec<bool>]) -> CnfSystem {
    let mut sys = CnfSystem::new(cfg.vars);
    for (vs, ps) in vars.iter().zip(positive) {
        let lits: Vec<Lit> = vs.iter().zip(ps).map(|(&v, &p)| Lit::new(v, p)).collect();
        sys.add_clause(Clause::normalize(lits).expect("distinct variables"));
    }
    sys
}

/// Minority-occurrence count for a variable with `occ` occurrences, rounded
/// stochastically between the two achievable ratios around `target`.
fn minority_count(occ: usize, target: f64, rng: &mut ChaCha8Rng) -> usize {
    let ratio = |m: usize| m as f64 / (occ - m) as f64;
    let top = occ / 2;
    if occ == 0 || target <= 0.0 {
        return 0;
    }
    if target >= ratio(top) {
        return top;
    }
    let m = (0..top).find(|&m| ratio(m + 1) > target).expect("target below the top ratio");
    let frac = (target - ratio(m)) / (ratio(m + 1) - ratio(m));
    if rng.gen::<f64>() < frac {
        m + 1
    } else {
        m
    }
}

fn polarities_for_impurity(cfg: &GenConfig, vars: &[Vec<Var>], target: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<bool>> {
    let mut occurrences: Vec<Vec<(usize, usize)>> = vec![Vec::new(); cfg.vars];
    for (ci, vs) in vars.iter().enumerate() {
        for (k, v) in vs.iter().enumerate() {
            occurrences[v.offset()].push((ci, k));
        }
    }
    let mut positive: Vec<Vec<bool>> = vars.iter().map(|vs| vec![true; vs.len()]).collect();
    for occ in &occurrences {
        let m = minority_count(occ.len(), target, rng);
        let majority: bool = rng.gen();
        for &(ci, k) in occ {
            positive[ci][k] = majority;
        }
        for i in sample(rng, occ.len(), m) {
            let (ci, k) = occ[i];
            positive[ci][k] = !majority;
        }
    }
    positive
}

/// A random CNF with `C` clauses of `width` distinct variables each.
///
/// With a target impurity, each variable's polarity split is chosen to hit
/// the target on average and whole instances are redrawn until `imp(S)` is
/// within [`IMPURITY_TOLERANCE`] of it.
pub fn gen_random_cnf(cfg: &GenConfig) -> Result<CnfSystem> {
    if cfg.vars == 0 || cfg.width == 0 || cfg.width > cfg.vars {
        return Err(Error::Generation(format!("clause width {} needs 1..={} variables", cfg.width, cfg.vars)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let Some(target) = cfg.target_impurity else {
        let vars = draw_vars(cfg, &mut rng);
        let positive: Vec<Vec<bool>> = vars.iter().map(|vs| vs.iter().map(|_| rng.gen()).collect()).collect();
        return Ok(build(cfg, &vars, &positive));
    };
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::Generation(format!("impurity {target} outside [0, 1]")));
    }
    let mut closest = f64::INFINITY;
    for _ in 0..IMPURITY_RETRIES {
        let vars = draw_vars(cfg, &mut rng);
        let positive = polarities_for_impurity(cfg, &vars, target, &mut rng);
        let sys = build(cfg, &vars, &positive);
        let got = impurity_f64(&sys);
        if (got - target).abs() <= IMPURITY_TOLERANCE {
            return Ok(sys);
        }
        closest = closest.min((got - target).abs());
    }
    Err(Error::Generation(format!(
        "impurity {target} not reached with B={} C={} after {IMPURITY_RETRIES} tries (closest miss {closest:.3})",
        cfg.vars, cfg.clauses
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        let s = gen_random_cnf(&GenConfig::new(30, 128, 1)).unwrap();
        assert_eq!((s.num_vars(), s.num_clauses()), (30, 128));
        assert!(s.clauses().iter().all(|c| c.len() == 3));
        assert_eq!(GenConfig::with_ratio(30, 4.26, 0).clauses, 128);
    }

    #[test]
    fn deterministic() {
        let cfg = GenConfig::new(20, 60, 99).impurity(0.5);
        assert_eq!(gen_random_cnf(&cfg).unwrap(), gen_random_cnf(&cfg).unwrap());
        assert_ne!(instance_seed(1, 0, 0), instance_seed(1, 0, 1));
        assert_ne!(instance_seed(1, 0, 0), instance_seed(1, 1, 0));
    }

    #[test]
    fn impurity_targets() {
        let pure = gen_random_cnf(&GenConfig::with_ratio(30, 4.26, 3).impurity(0.0)).unwrap();
        assert_eq!(impurity_f64(&pure), 0.0);
        for t in [0.3, 0.5, 0.9] {
            let s = gen_random_cnf(&GenConfig::with_ratio(30, 4.26, 5).impurity(t)).unwrap();
            assert!((impurity_f64(&s) - t).abs() <= IMPURITY_TOLERANCE, "target {t}");
        }
    }

    #[test]
    fn unreachable_impurity() {
        // imp(v) = 1 needs an even occurrence count for every variable
        let cfg = GenConfig::with_ratio(30, 4.26, 0).impurity(1.0);
        assert!(matches!(gen_random_cnf(&cfg), Err(Error::Generation(_))));
    }

    #[test]
    fn bad_width() {
        let mut cfg = GenConfig::new(2, 3, 0);
        cfg.width = 3;
        assert!(matches!(gen_random_cnf(&cfg), Err(Error::Generation(_))));
    }
}
