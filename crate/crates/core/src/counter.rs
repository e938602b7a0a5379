//! Exact model counting by DPLL path accounting.
//!
//! The search tree is explored depth first. A path ends as soon as its last
//! assignment satisfies every clause (a satisfying path) or falsifies some
//! clause (a falsifying path). A terminated path of length `k` over `n`
//! variables stands for `2^(n-k)` full assignments, which are models or
//! non-models respectively; every full assignment extends exactly one
//! terminated path.
//!
//! Unit propagation is applied. A propagated literal `x` is treated as a
//! branch whose other side `¬x` falsifies the unit clause at once, so the
//! refuted side is reported as a falsifying path and the partition of the
//! assignment space stays complete.

use std::io::Write;
use std::ops::ControlFlow;

use num_bigint::BigUint;
use serde::Serialize;

use crate::formula::{CnfSystem, Lit, Model, Var};
use crate::numeric::{pow2, Count, CountScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Satisfying,
    Falsifying,
}

/// Branching variable selection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Branching {
    /// Lowest-index unassigned variable that occurs in an open clause.
    #[default]
    Static,
    /// Variable with most occurrences in open clauses; ties to lowest index.
    MostFrequent,
}

/// Receives every terminated path in search order.
pub trait PathVisitor {
    fn visit(&mut self, path: &[Lit], kind: PathKind) -> ControlFlow<()>;

    /// Falsifying paths are skipped when this returns false.
    fn wants_falsifying(&self) -> bool {
        true
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Open,
    AllSatisfied,
    Conflict,
}

struct Search<'a, V: PathVisitor> {
    clause_lits: Vec<&'a [Lit]>,
    occurs: Vec<Vec<u32>>,
    value: Vec<i8>,
    sat: Vec<u32>,
    falses: Vec<u32>,
    open_clauses: usize,
    trail: Vec<Lit>,
    units: Vec<u32>,
    branching: Branching,
    visitor: &'a mut V,
    emit_falsifying: bool,
}

impl<'a, V: PathVisitor> Search<'a, V> {
    fn new(system: &'a CnfSystem, branching: Branching, visitor: &'a mut V) -> Self {
        let n = system.num_vars();
        let mut occurs = vec![Vec::new(); 2 * n];
        let clause_lits: Vec<&[Lit]> = system.clauses().iter().map(|c| c.lits()).collect();
        for (i, lits) in clause_lits.iter().enumerate() {
            for l in lits.iter() {
                occurs[l.code()].push(i as u32);
            }
        }
        let emit_falsifying = visitor.wants_falsifying();
        Search {
            sat: vec![0; clause_lits.len()],
            falses: vec![0; clause_lits.len()],
            open_clauses: clause_lits.len(),
            clause_lits,
            occurs,
            value: vec![0; n],
            trail: Vec::with_capacity(n + 1),
            units: Vec::new(),
            branching,
            visitor,
            emit_falsifying,
        }
    }

    fn run(&mut self) -> ControlFlow<()> {
        if self.clause_lits.iter().any(|c| c.is_empty()) {
            return self.emit(PathKind::Falsifying);
        }
        if self.open_clauses == 0 {
            return self.emit(PathKind::Satisfying);
        }
        for (i, c) in self.clause_lits.iter().enumerate() {
            if c.len() == 1 {
                self.units.push(i as u32);
            }
        }
        self.explore()
    }

    fn emit(&mut self, kind: PathKind) -> ControlFlow<()> {
        if kind == PathKind::Falsifying && !self.emit_falsifying {
            return ControlFlow::Continue(());
        }
        self.visitor.visit(&self.trail, kind)
    }

    fn assign(&mut self, lit: Lit) -> Status {
        self.value[lit.var().offset()] = if lit.is_positive() { 1 } else { -1 };
        self.trail.push(lit);
        for &c in &self.occurs[lit.code()] {
            let c = c as usize;
            self.sat[c] += 1;
            if self.sat[c] == 1 {
                self.open_clauses -= 1;
            }
        }
        let mut conflict = false;
        for &c in &self.occurs[(!lit).code()] {
            let ci = c as usize;
            self.falses[ci] += 1;
            if self.sat[ci] == 0 {
                let free = self.clause_lits[ci].len() as u32 - self.falses[ci];
                if free == 0 {
                    conflict = true;
                } else if free == 1 {
                    self.units.push(c);
                }
            }
        }
        if conflict {
            Status::Conflict
        } else if self.open_clauses == 0 {
            Status::AllSatisfied
        } else {
            Status::Open
        }
    }

    fn unassign(&mut self) {
        let lit = self.trail.pop().expect("non-empty trail");
        for &c in &self.occurs[lit.code()] {
            let c = c as usize;
            self.sat[c] -= 1;
            if self.sat[c] == 0 {
                self.open_clauses += 1;
            }
        }
        for &c in &self.occurs[(!lit).code()] {
            self.falses[c as usize] -= 1;
        }
        self.value[lit.var().offset()] = 0;
    }

    fn is_free(&self, lit: Lit) -> bool {
        self.value[lit.var().offset()] == 0
    }

    fn next_unit(&mut self) -> Option<Lit> {
        while let Some(c) = self.units.pop() {
            let ci = c as usize;
            if self.sat[ci] == 0 && self.clause_lits[ci].len() as u32 - self.falses[ci] == 1 {
                let lits = self.clause_lits[ci];
                return lits.iter().copied().find(|&l| self.is_free(l));
            }
        }
        None
    }

    fn clause_open(&self, c: u32) -> bool {
        self.sat[c as usize] == 0
    }

    fn pick_branch(&self) -> Var {
        let n = self.value.len();
        match self.branching {
            Branching::Static => (0..n)
                .filter(|&i| self.value[i] == 0)
                .map(Var::from_offset)
                .find(|v| {
                    self.occurs[v.pos().code()].iter().chain(&self.occurs[v.neg().code()]).any(|&c| self.clause_open(c))
                })
                .expect("an open clause has a free variable"),
            Branching::MostFrequent => {
                let mut best: Option<(usize, Var)> = None;
                for i in (0..n).filter(|&i| self.value[i] == 0) {
                    let v = Var::from_offset(i);
                    let freq = self.occurs[v.pos().code()]
                        .iter()
                        .chain(&self.occurs[v.neg().code()])
                        .filter(|&&c| self.clause_open(c))
                        .count();
                    if freq > 0 && best.is_none_or(|(f, _)| freq > f) {
                        best = Some((freq, v));
                    }
                }
                best.expect("an open clause has a free variable").1
            }
        }
    }

    /// Explores below `lit`, then retracts it.
    fn descend(&mut self, lit: Lit) -> ControlFlow<()> {
        let mark = self.units.len();
        let flow = match self.assign(lit) {
            Status::Conflict => self.emit(PathKind::Falsifying),
            Status::AllSatisfied => self.emit(PathKind::Satisfying),
            Status::Open => self.explore(),
        };
        self.unassign();
        self.units.truncate(mark);
        flow
    }

    /// Current node is open and consistent.
    fn explore(&mut self) -> ControlFlow<()> {
        if let Some(x) = self.next_unit() {
            // the refuted side: ¬x empties the unit clause
            self.trail.push(!x);
            let flow = self.emit(PathKind::Falsifying);
            self.trail.pop();
            flow?;
            return self.descend(x);
        }
        let v = self.pick_branch();
        self.descend(v.pos())?;
        self.descend(v.neg())
    }
}

/// Walks the terminated paths of `system` in deterministic order.
pub fn walk_paths<V: PathVisitor>(system: &CnfSystem, branching: Branching, visitor: &mut V) -> ControlFlow<()> {
    Search::new(system, branching, visitor).run()
}

fn fits_u128(n: usize) -> bool {
    n as u32 <= <u128 as CountScalar>::MAX_EXP.unwrap_or(u32::MAX)
}

/// Running per-literal totals over the paths seen so far.
///
/// Only on-path contributions are stored; a variable left free by a path of
/// length `k` receives `2^(n-k-1)` per polarity, which is recovered as half
/// of the path weight not assigned to that variable.
#[derive(Clone, Debug)]
struct Accumulator<N: CountScalar> {
    n: usize,
    total: N,
    on: Vec<N>,
    non_total: N,
    off: Vec<N>,
    satisfying: u64,
    falsifying: u64,
}

impl<N: CountScalar> Accumulator<N> {
    fn new(n: usize) -> Self {
        Accumulator {
            n,
            total: N::zero(),
            on: vec![N::zero(); 2 * n],
            non_total: N::zero(),
            off: vec![N::zero(); 2 * n],
            satisfying: 0,
            falsifying: 0,
        }
    }

    fn add(&mut self, path: &[Lit], kind: PathKind) {
        let w = N::pow2((self.n - path.len()) as u32);
        let (total, per) = match kind {
            PathKind::Satisfying => {
                self.satisfying += 1;
                (&mut self.total, &mut self.on)
            }
            PathKind::Falsifying => {
                self.falsifying += 1;
                (&mut self.non_total, &mut self.off)
            }
        };
        *total += &w;
        for l in path {
            per[l.code()] += &w;
        }
    }

    fn with(total: &N, per: &[N], lit: Lit) -> N {
        let mine = &per[lit.code()];
        let other = &per[(!lit).code()];
        let mut assigned = mine.clone();
        assigned += other;
        let mut out = total.sub(&assigned).half();
        out += mine;
        out
    }

    fn models_with(&self, lit: Lit) -> N {
        Self::with(&self.total, &self.on, lit)
    }

    fn nonmodels_with(&self, lit: Lit) -> N {
        Self::with(&self.non_total, &self.off, lit)
    }

    fn ledger(&self) -> CountLedger {
        let lits = (0..2 * self.n).map(Lit::from_code);
        CountLedger {
            n: self.n,
            total_models: self.total.to_count(),
            total_nonmodels: self.non_total.to_count(),
            models_with: lits.clone().map(|l| self.models_with(l).to_count()).collect(),
            nonmodels_with: lits.map(|l| self.nonmodels_with(l).to_count()).collect(),
            satisfying_paths: self.satisfying,
            falsifying_paths: self.falsifying,
        }
    }
}

/// Total and per-literal model and non-model counts of one complete run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountLedger {
    pub n: usize,
    pub total_models: Count,
    pub total_nonmodels: Count,
    models_with: Vec<Count>,
    nonmodels_with: Vec<Count>,
    pub satisfying_paths: u64,
    pub falsifying_paths: u64,
}

impl CountLedger {
    /// `|MOD(S ∪ {lit})|`
    pub fn models_with(&self, lit: Lit) -> &Count {
        &self.models_with[lit.code()]
    }

    pub fn nonmodels_with(&self, lit: Lit) -> &Count {
        &self.nonmodels_with[lit.code()]
    }

    pub fn paths_processed(&self) -> u64 {
        self.satisfying_paths + self.falsifying_paths
    }

    pub fn is_complete(&self) -> bool {
        &self.total_models + &self.total_nonmodels == pow2(self.n)
    }
}

/// Per-literal bounds on `|MOD(S ∪ {l})|` after `time` terminated paths.
pub struct BoundsSnapshot<'a> {
    pub time: u64,
    pub n: usize,
    view: &'a dyn LedgerView,
}

trait LedgerView {
    fn models_with(&self, lit: Lit) -> Count;
    fn nonmodels_with(&self, lit: Lit) -> Count;
}

impl<N: CountScalar> LedgerView for Accumulator<N> {
    fn models_with(&self, lit: Lit) -> Count {
        Accumulator::models_with(self, lit).to_count()
    }
    fn nonmodels_with(&self, lit: Lit) -> Count {
        Accumulator::nonmodels_with(self, lit).to_count()
    }
}

impl BoundsSnapshot<'_> {
    /// Models containing `lit` found so far.
    pub fn models_found(&self, lit: Lit) -> Count {
        self.view.models_with(lit)
    }

    /// Non-models containing `lit` found so far.
    pub fn nonmodels_found(&self, lit: Lit) -> Count {
        self.view.nonmodels_with(lit)
    }

    pub fn lower(&self, lit: Lit) -> Count {
        self.models_found(lit)
    }

    pub fn upper(&self, lit: Lit) -> Count {
        pow2(self.n - 1) - self.nonmodels_found(lit)
    }
}

/// Configurable entry point; the free functions use the defaults.
pub struct Counter<'a> {
    system: &'a CnfSystem,
    branching: Branching,
    trace: Option<&'a mut dyn Write>,
}

struct Traced<'a, 'w, V> {
    inner: &'a mut V,
    out: Option<&'a mut (dyn Write + 'w)>,
}

impl<V: PathVisitor> PathVisitor for Traced<'_, '_, V> {
    fn visit(&mut self, path: &[Lit], kind: PathKind) -> ControlFlow<()> {
        if let Some(out) = self.out.as_mut() {
            let lits: Vec<String> = path.iter().map(|l| l.to_dimacs().to_string()).collect();
            let tag = match kind {
                PathKind::Satisfying => "sat",
                PathKind::Falsifying => "unsat",
            };
            // tracing is best-effort
            let _ = writeln!(out, "{} {} {}", path.len(), tag, lits.join(" "));
        }
        self.inner.visit(path, kind)
    }

    fn wants_falsifying(&self) -> bool {
        self.out.is_some() || self.inner.wants_falsifying()
    }
}

struct TotalOnly<N> {
    n: usize,
    total: N,
}

impl<N: CountScalar> PathVisitor for TotalOnly<N> {
    fn visit(&mut self, path: &[Lit], kind: PathKind) -> ControlFlow<()> {
        if kind == PathKind::Satisfying {
            self.total += N::pow2((self.n - path.len()) as u32);
        }
        ControlFlow::Continue(())
    }

    fn wants_falsifying(&self) -> bool {
        false
    }
}

struct Snapshots<'f, N: CountScalar> {
    acc: Accumulator<N>,
    observer: &'f mut dyn FnMut(&BoundsSnapshot<'_>),
}

impl<N: CountScalar> PathVisitor for Snapshots<'_, N> {
    fn visit(&mut self, path: &[Lit], kind: PathKind) -> ControlFlow<()> {
        self.acc.add(path, kind);
        let time = self.acc.satisfying + self.acc.falsifying;
        (self.observer)(&BoundsSnapshot { time, n: self.acc.n, view: &self.acc });
        ControlFlow::Continue(())
    }
}

impl<N: CountScalar> PathVisitor for Accumulator<N> {
    fn visit(&mut self, path: &[Lit], kind: PathKind) -> ControlFlow<()> {
        self.add(path, kind);
        ControlFlow::Continue(())
    }
}

struct FirstModel {
    n: usize,
    found: Option<Model>,
}

impl PathVisitor for FirstModel {
    fn visit(&mut self, path: &[Lit], kind: PathKind) -> ControlFlow<()> {
        if kind == PathKind::Satisfying {
            self.found = Some(Model::from_lits(self.n, path));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    }

    fn wants_falsifying(&self) -> bool {
        false
    }
}

/// Models listed by [`enumerate_models`]; `truncated` when more exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub models: Vec<Model>,
    pub truncated: bool,
}

struct Enumerator {
    n: usize,
    cap: usize,
    models: Vec<Model>,
    truncated: bool,
}

impl PathVisitor for Enumerator {
    fn visit(&mut self, path: &[Lit], kind: PathKind) -> ControlFlow<()> {
        if kind == PathKind::Falsifying {
            return ControlFlow::Continue(());
        }
        if self.models.len() >= self.cap {
            self.truncated = true;
            return ControlFlow::Break(());
        }
        let base = Model::from_lits(self.n, path);
        let mut assigned = vec![false; self.n];
        for l in path {
            assigned[l.var().offset()] = true;
        }
        let free: Vec<usize> = (0..self.n).filter(|&i| !assigned[i]).collect();
        // free variables counted in binary, lowest index as least significant bit
        let combos: u128 = if free.len() >= 127 { u128::MAX } else { 1u128 << free.len() };
        let mut bits: u128 = 0;
        while bits < combos {
            if self.models.len() >= self.cap {
                self.truncated = true;
                return ControlFlow::Break(());
            }
            let mut values = base.values().to_vec();
            for (j, &i) in free.iter().enumerate() {
                values[i] = bits >> j & 1 == 1;
            }
            self.models.push(Model::new(values));
            bits += 1;
        }
        ControlFlow::Continue(())
    }

    fn wants_falsifying(&self) -> bool {
        false
    }
}

impl<'a> Counter<'a> {
    pub fn new(system: &'a CnfSystem) -> Self {
        Counter { system, branching: Branching::default(), trace: None }
    }

    pub fn branching(mut self, branching: Branching) -> Self {
        self.branching = branching;
        self
    }

    /// One line per terminated path: `k kind literals...`.
    pub fn trace(mut self, out: &'a mut dyn Write) -> Self {
        self.trace = Some(out);
        self
    }

    fn walk<V: PathVisitor>(self, visitor: &mut V) {
        let mut traced = Traced { inner: visitor, out: self.trace };
        let _ = walk_paths(self.system, self.branching, &mut traced);
    }

    pub fn count(self) -> Count {
        let n = self.system.num_vars();
        if fits_u128(n) {
            let mut v = TotalOnly { n, total: 0u128 };
            self.walk(&mut v);
            v.total.to_count()
        } else {
            let mut v = TotalOnly { n, total: BigUint::from(0u32) };
            self.walk(&mut v);
            v.total
        }
    }

    pub fn ledger(self) -> CountLedger {
        let n = self.system.num_vars();
        if fits_u128(n) {
            let mut acc = Accumulator::<u128>::new(n);
            self.walk(&mut acc);
            acc.ledger()
        } else {
            let mut acc = Accumulator::<BigUint>::new(n);
            self.walk(&mut acc);
            acc.ledger()
        }
    }

    pub fn anytime(self, observer: &mut dyn FnMut(&BoundsSnapshot<'_>)) -> CountLedger {
        let n = self.system.num_vars();
        if fits_u128(n) {
            let mut v = Snapshots { acc: Accumulator::<u128>::new(n), observer };
            self.walk(&mut v);
            v.acc.ledger()
        } else {
            let mut v = Snapshots { acc: Accumulator::<BigUint>::new(n), observer };
            self.walk(&mut v);
            v.acc.ledger()
        }
    }

    pub fn enumerate(self, cap: usize) -> Enumeration {
        let mut v = Enumerator { n: self.system.num_vars(), cap, models: Vec::new(), truncated: false };
        self.walk(&mut v);
        Enumeration { models: v.models, truncated: v.truncated }
    }

    /// First model found; free variables are set false.
    pub fn find_model(self) -> Option<Model> {
        let mut v = FirstModel { n: self.system.num_vars(), found: None };
        self.walk(&mut v);
        v.found
    }
}

/// `|MOD(S)|` over all declared variables.
pub fn count_models(system: &CnfSystem) -> Count {
    Counter::new(system).count()
}

pub fn count_ledger(system: &CnfSystem) -> CountLedger {
    Counter::new(system).ledger()
}

/// Runs the counter, handing a bounds snapshot to `observer` after every
/// terminated path. Time is measured in terminated paths.
pub fn anytime_run(system: &CnfSystem, mut observer: impl FnMut(&BoundsSnapshot<'_>)) -> CountLedger {
    Counter::new(system).anytime(&mut observer)
}

pub fn enumerate_models(system: &CnfSystem, cap: usize) -> Enumeration {
    Counter::new(system).enumerate(cap)
}

pub fn find_model(system: &CnfSystem) -> Option<Model> {
    Counter::new(system).find_model()
}

pub fn is_satisfiable(system: &CnfSystem) -> bool {
    find_model(system).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn ex31() -> CnfSystem {
        CnfSystem::from_clauses(3, &[&[1, 2], &[2, 3], &[3, 1], &[-1, -2, -3]])
    }

    #[test]
    fn example_three_one_counts() {
        let s = ex31();
        assert_eq!(count_models(&s), BigUint::from(3u32));
        let l = count_ledger(&s);
        assert_eq!(l.models_with(Var::new(1).pos()), &BigUint::from(2u32));
        assert_eq!(l.models_with(Var::new(1).neg()), &BigUint::from(1u32));
        assert!(l.is_complete());
    }

    #[test]
    fn empty_system_counts_full_cube() {
        let s = CnfSystem::new(5);
        assert_eq!(count_models(&s), BigUint::from(32u32));
        let l = count_ledger(&s);
        assert_eq!(l.paths_processed(), 1);
        assert_eq!(l.models_with(Var::new(3).neg()), &BigUint::from(16u32));
    }

    #[test]
    fn empty_clause_is_unsatisfiable() {
        let mut s = CnfSystem::new(2);
        s.add_clause(crate::formula::Clause::normalize(vec![]).unwrap());
        assert_eq!(count_models(&s), BigUint::from(0u32));
        assert!(count_ledger(&s).is_complete());
        assert!(find_model(&s).is_none());
    }

    #[test]
    fn big_systems_use_big_integers() {
        let mut s = CnfSystem::new(200);
        s.add_clause(crate::formula::Clause::from_dimacs(&[1, 2]).unwrap());
        let expected = pow2(200) - pow2(198);
        assert_eq!(count_models(&s), expected);
        let l = count_ledger(&s);
        assert!(l.is_complete());
        assert_eq!(l.models_with(Var::new(1).pos()), &pow2(199));
    }

    #[test]
    fn enumeration_is_capped() {
        let s = CnfSystem::new(2);
        let e = enumerate_models(&s, 4);
        assert_eq!(e.models.len(), 4);
        assert!(!e.truncated);
        let e = enumerate_models(&s, 3);
        assert_eq!(e.models.len(), 3);
        assert!(e.truncated);
        let e = enumerate_models(&ex31(), 10);
        assert_eq!(e.models.len(), 3);
        for m in &e.models {
            assert!(ex31().satisfied_by(m));
        }
    }

    #[test]
    fn unit_system_bounds_exact_after_first_path() {
        // S = {a} over {a, b}
        let s = CnfSystem::from_clauses(2, &[&[1]]);
        let a = Var::new(1);
        let mut seen = Vec::new();
        anytime_run(&s, |snap| {
            seen.push((snap.time, snap.lower(a.pos()), snap.upper(a.pos()), snap.lower(a.neg()), snap.upper(a.neg())));
        });
        // the refuted side ¬a comes first, then the satisfying path [a]
        let last = seen.last().unwrap();
        assert_eq!(last.1.to_u32(), Some(2));
        assert_eq!(last.2.to_u32(), Some(2));
        assert_eq!(last.3.to_u32(), Some(0));
        assert_eq!(last.4.to_u32(), Some(0));
        let (_, lo, hi, _, _) = &seen[seen.len() - 1];
        assert_eq!(lo, hi);
    }

    #[test]
    fn trace_lines() {
        let s = CnfSystem::from_clauses(2, &[&[1]]);
        let mut out = Vec::new();
        Counter::new(&s).trace(&mut out).count();
        assert_eq!(String::from_utf8(out).unwrap(), "1 unsat -1\n1 sat 1\n");
    }

    #[test]
    fn branching_policies_agree() {
        let s = CnfSystem::from_clauses(5, &[&[1, -2, 3], &[2, 4], &[-3, -4, 5], &[-1, -5], &[2, 3, -5]]);
        let a = Counter::new(&s).ledger();
        let b = Counter::new(&s).branching(Branching::MostFrequent).ledger();
        assert_eq!(a.total_models, b.total_models);
        for code in 0..10 {
            let l = Lit::from_code(code);
            assert_eq!(a.models_with(l), b.models_with(l));
        }
    }
}
