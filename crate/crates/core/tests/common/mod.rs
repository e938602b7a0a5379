//! Brute-force reference implementations over all 2^n assignments, plus a
//! small random CNF source. Assignments are bitmasks: bit i is variable i+1.

#![allow(dead_code)]

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use typmod::{CnfSystem, Lit, Model, Var};

pub fn holds(lit: Lit, mask: u32) -> bool {
    (mask >> lit.var().offset() & 1 == 1) == lit.is_positive()
}

pub fn satisfies(system: &CnfSystem, mask: u32) -> bool {
    system.clauses().iter().all(|c| c.lits().iter().any(|&l| holds(l, mask)))
}

pub fn models(system: &CnfSystem) -> Vec<u32> {
    let n = system.num_vars();
    assert!(n <= 20, "brute force is for small systems");
    (0..1u32 << n).filter(|&m| satisfies(system, m)).collect()
}

pub fn to_model(n: usize, mask: u32) -> Model {
    Model::new((0..n).map(|i| mask >> i & 1 == 1).collect())
}

pub fn to_mask(m: &Model) -> u32 {
    m.values().iter().enumerate().fold(0, |acc, (i, &b)| acc | (b as u32) << i)
}

pub fn frac(num: usize, den: usize) -> BigRational {
    BigRational::new(BigUint::from(num).into(), BigUint::from(den).into())
}

pub fn evidence(ms: &[u32], lits: &[Lit]) -> BigRational {
    let hit = ms.iter().filter(|&&m| lits.iter().all(|&l| holds(l, m))).count();
    frac(hit, ms.len())
}

/// Typical literal per variable, positive on ties.
pub fn typical(n: usize, ms: &[u32]) -> Vec<Lit> {
    (0..n)
        .map(|i| {
            let v = Var::from_offset(i);
            let pos = ms.iter().filter(|&&m| m >> i & 1 == 1).count();
            if 2 * pos >= ms.len() {
                v.pos()
            } else {
                v.neg()
            }
        })
        .collect()
}

fn typical_mask(typ: &[Lit], m: u32) -> u32 {
    typ.iter().enumerate().fold(0, |acc, (i, &l)| acc | (holds(l, m) as u32) << i)
}

/// Models whose set of typical atoms is not strictly contained in another's.
pub fn typical_models(n: usize, ms: &[u32]) -> Vec<u32> {
    let typ = typical(n, ms);
    let t: Vec<u32> = ms.iter().map(|&m| typical_mask(&typ, m)).collect();
    ms.iter()
        .zip(&t)
        .filter(|&(_, &a)| !t.iter().any(|&b| b != a && a & b == a))
        .map(|(&m, _)| m)
        .collect()
}

/// Models of S with the atom false, and how many of them flip into models.
pub fn neighbour_counts(system: &CnfSystem, ms: &[u32], atom: Lit) -> (usize, usize) {
    let bit = 1u32 << atom.var().offset();
    let counter: Vec<u32> = ms.iter().copied().filter(|&m| !holds(atom, m)).collect();
    let flips = counter.iter().filter(|&&m| satisfies(system, m ^ bit)).count();
    (counter.len(), flips)
}

pub fn kernel(system: &CnfSystem, ms: &[u32]) -> Vec<Lit> {
    typical(system.num_vars(), ms)
        .into_iter()
        .filter(|&a| {
            let (n1, n2) = neighbour_counts(system, ms, a);
            n1 == n2
        })
        .collect()
}

pub fn erratum(n: usize, ms: &[u32], m: u32) -> BigRational {
    let sum: BigRational = (0..n).map(|i| evidence(ms, &[Var::from_offset(i).lit_in(m)])).sum();
    BigRational::from_integer(1.into()) - sum / BigRational::from_integer((n as i64).into())
}

pub trait LitIn {
    fn lit_in(self, mask: u32) -> Lit;
}

impl LitIn for Var {
    fn lit_in(self, mask: u32) -> Lit {
        if mask >> self.offset() & 1 == 1 {
            self.pos()
        } else {
            self.neg()
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random CNF over `n` variables with clause widths 1 to 3, tilted toward
/// short systems so that many are satisfiable.
pub fn random_system(rng: &mut impl Rng, n: usize) -> CnfSystem {
    let clauses = rng.gen_range(0..=2 * n);
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for _ in 0..clauses {
        let width = if rng.gen_bool(0.15) { 1 } else { rng.gen_range(2..=3) }.min(n);
        let mut vars: Vec<i64> = (1..=n as i64).collect();
        for i in 0..width {
            let j = rng.gen_range(i..vars.len());
            vars.swap(i, j);
        }
        rows.push(vars[..width].iter().map(|&v| if rng.gen_bool(0.5) { v } else { -v }).collect());
    }
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    CnfSystem::from_clauses(n, &refs)
}

/// A satisfiable random system with between 1 and `max_n` variables.
pub fn random_satisfiable(rng: &mut impl Rng, max_n: usize) -> CnfSystem {
    loop {
        let n = rng.gen_range(1..=max_n);
        let s = random_system(rng, n);
        if (0..1u32 << n).any(|m| satisfies(&s, m)) {
            return s;
        }
    }
}

/// Compares every exact routine of the library against brute force on one
/// system. Returns a description of the first mismatch.
pub fn oracle_check(system: &CnfSystem) -> Result<(), String> {
    use typmod::counter::{count_ledger, count_models};
    use typmod::evidence::evidence_all;
    use typmod::kernel::typical_kernel_with;
    use typmod::typicality;

    let n = system.num_vars();
    let ms = models(system);
    let count = count_models(system);
    if count != BigUint::from(ms.len()) {
        return Err(format!("count {count} vs {}", ms.len()));
    }
    let ledger = count_ledger(system);
    for i in 0..n {
        for lit in [Var::from_offset(i).pos(), Var::from_offset(i).neg()] {
            let want = ms.iter().filter(|&&m| holds(lit, m)).count();
            if *ledger.models_with(lit) != BigUint::from(want) {
                return Err(format!("ledger models_with({lit:?})"));
            }
            let non = (0..1u32 << n).filter(|&m| holds(lit, m) && !satisfies(system, m)).count();
            if *ledger.nonmodels_with(lit) != BigUint::from(non) {
                return Err(format!("ledger nonmodels_with({lit:?})"));
            }
        }
    }
    if ms.is_empty() {
        return match evidence_all(system) {
            Err(typmod::Error::InconsistentSystem) => Ok(()),
            other => Err(format!("unsatisfiable system gave {other:?}")),
        };
    }
    let table = evidence_all(system).map_err(|e| e.to_string())?;
    for i in 0..n {
        let v = Var::from_offset(i);
        if table.evidence(v.pos()) != evidence(&ms, &[v.pos()]) {
            return Err(format!("evidence of {v:?}"));
        }
    }
    let typ: Vec<Lit> = typicality::typical_atoms(&table).into_iter().map(|a| a.lit).collect();
    if typ != typical(n, &ms) {
        return Err("typical atoms".into());
    }
    let mut got: Vec<u32> =
        typicality::typical_models(system, &table, usize::MAX).map_err(|e| e.to_string())?.iter().map(|t| to_mask(&t.model)).collect();
    got.sort_unstable();
    let mut want = typical_models(n, &ms);
    want.sort_unstable();
    if got != want {
        return Err(format!("typical models {got:?} vs {want:?}"));
    }
    let k = typical_kernel_with(system, &table).map_err(|e| e.to_string())?;
    for v in &k.verdicts {
        let (n1, n2) = neighbour_counts(system, &ms, v.atom);
        if v.n1 != BigUint::from(n1) || v.n2 != BigUint::from(n2) || v.is_kernel != (n1 == n2) {
            return Err(format!("kernel verdict for {:?}: ({}, {}) vs ({n1}, {n2})", v.atom, v.n1, v.n2));
        }
    }
    Ok(())
}

/// Domination by typical models, and by the most typical model when there
/// is one.
pub fn check_domination(system: &CnfSystem) -> Result<(), String> {
    use typmod::evidence::evidence_all;
    use typmod::typicality::{erratum, most_typical_model, typical_in_model, typical_models};

    let n = system.num_vars();
    let table = evidence_all(system).map_err(|e| e.to_string())?;
    let tms = typical_models(system, &table, usize::MAX).map_err(|e| e.to_string())?;
    let mtm = most_typical_model(system, &table);
    for m in models(system) {
        let model = to_model(n, m);
        let er = erratum(&table, &model);
        let t = typical_in_model(&table, &model);
        if !tms.iter().any(|mu| t.iter().all(|l| mu.typical.contains(l)) && erratum(&table, &mu.model) <= er) {
            return Err(format!("model {m:#b} not dominated by a typical model"));
        }
        if mtm.as_ref().is_some_and(|best| erratum(&table, best) > er) {
            return Err(format!("model {m:#b} beats the most typical model"));
        }
    }
    Ok(())
}

/// The kernel is consistent with the system and lies inside every typical
/// model.
pub fn check_kernel(system: &CnfSystem) -> Result<(), String> {
    let ms = models(system);
    let k = typmod::kernel::typical_kernel(system).map_err(|e| e.to_string())?.atoms();
    if k != kernel(system, &ms) {
        return Err("kernel differs from brute force".into());
    }
    if !ms.iter().any(|&m| k.iter().all(|&a| holds(a, m))) {
        return Err("kernel inconsistent with the system".into());
    }
    for m in typical_models(system.num_vars(), &ms) {
        if !k.iter().all(|&a| holds(a, m)) {
            return Err(format!("typical model {m:#b} misses a kernel atom"));
        }
    }
    Ok(())
}

/// Adds a random formula consistent with the system and checks that every
/// kernel atom whose variable it avoids keeps the kernel property at
/// evidence at least 1/2. Returns false when the formula was inconsistent.
pub fn check_stability_case(system: &CnfSystem, phi: &typmod::PropFormula) -> Result<bool, String> {
    let n = system.num_vars();
    if !models(system).iter().any(|&m| phi.eval(&to_model(n, m))) {
        return Ok(false);
    }
    let before = typmod::kernel::typical_kernel(system).map_err(|e| e.to_string())?.atoms();
    let extended = typmod::formula::attach_formula(system, phi);
    let ms = models(&extended);
    let after = kernel(&extended, &ms);
    let mentioned = phi.vars();
    for a in before.iter().filter(|a| !mentioned.contains(&a.var())) {
        let tied = 2 * ms.iter().filter(|&&m| holds(*a, m)).count() == ms.len();
        let (n1, n2) = neighbour_counts(&extended, &ms, *a);
        if n1 != n2 || !(after.contains(a) || tied) {
            return Err(format!("kernel atom {a:?} lost"));
        }
    }
    typmod::kernel::check_stability(system, phi).map_err(|e| e.to_string())?;
    Ok(true)
}

/// A small random formula over the given variables.
pub fn random_formula(r: &mut ChaCha8Rng, vars: &[Var]) -> typmod::PropFormula {
    use typmod::PropFormula;
    let leaf = |r: &mut ChaCha8Rng| {
        let v = vars[r.gen_range(0..vars.len())];
        PropFormula::lit(if r.gen_bool(0.5) { v.pos() } else { v.neg() })
    };
    let a = leaf(r);
    let b = leaf(r);
    let c = leaf(r);
    match r.gen_range(0..4) {
        0 => a.or(b),
        1 => a.and(b).or(c),
        2 => a.implies(b.and(c)),
        _ => a.iff(b),
    }
}

/// A formula over a random nonempty subset of the system's variables.
pub fn random_side_formula(r: &mut ChaCha8Rng, system: &CnfSystem) -> typmod::PropFormula {
    use rand::seq::SliceRandom;
    let all: Vec<Var> = system.vars().collect();
    let k = r.gen_range(1..=all.len());
    let chosen: Vec<Var> = all.choose_multiple(r, k).copied().collect();
    random_formula(r, &chosen)
}
