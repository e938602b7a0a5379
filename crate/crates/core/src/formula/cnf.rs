use std::collections::HashSet;
use std::fmt;
use std::ops::Not;

use serde::{Serialize, Serializer};

/// Propositional variable, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Var(u32);

impl Var {
    pub fn new(index: usize) -> Var {
        assert!(index >= 1, "variables are 1-based");
        Var(index as u32)
    }

    pub fn from_offset(offset: usize) -> Var {
        Var(offset as u32 + 1)
    }

    /// 1-based index.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// 0-based position.
    pub fn offset(self) -> usize {
        self.0 as usize - 1
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

/// A literal packed as `2 * offset + negated`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(((var.0 - 1) << 1) | (!positive) as u32)
    }

    pub fn from_dimacs(x: i64) -> Lit {
        assert!(x != 0);
        Lit::new(Var::new(x.unsigned_abs() as usize), x > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().index() as i64;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn var(self) -> Var {
        Var((self.0 >> 1) + 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index in `0..2n`.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl Serialize for Lit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.to_dimacs())
    }
}

/// Serialized as the list of its literals in DIMACS form.
impl Serialize for Model {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.lits().into_iter().map(Lit::to_dimacs))
    }
}

/// A non-tautological clause with sorted, distinct literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Sorts and deduplicates; `None` for a tautology.
    pub fn normalize(mut lits: Vec<Lit>) -> Option<Clause> {
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return None;
        }
        Some(Clause { lits })
    }

    pub fn from_dimacs(lits: &[i64]) -> Option<Clause> {
        Clause::normalize(lits.iter().map(|&x| Lit::from_dimacs(x)).collect())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    pub fn mentions(&self, var: Var) -> bool {
        self.contains(var.pos()) || self.contains(var.neg())
    }

    pub fn satisfied_by(&self, model: &Model) -> bool {
        self.lits.iter().any(|&l| model.satisfies(l))
    }

    /// The clause with `lit` removed.
    pub fn without(&self, lit: Lit) -> Clause {
        Clause { lits: self.lits.iter().copied().filter(|&l| l != lit).collect() }
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Clause {
        Clause::normalize(self.lits.iter().map(|&l| Lit::new(f(l.var()), l.is_positive())).collect())
            .expect("variable renaming keeps clauses non-tautological")
    }
}

/// A total assignment over a system's variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn new(values: Vec<bool>) -> Model {
        Model { values }
    }

    pub fn from_lits(n: usize, lits: &[Lit]) -> Model {
        let mut values = vec![false; n];
        for l in lits {
            values[l.var().offset()] = l.is_positive();
        }
        Model { values }
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, var: Var) -> bool {
        self.values[var.offset()]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn satisfies(&self, lit: Lit) -> bool {
        self.values[lit.var().offset()] == lit.is_positive()
    }

    pub fn lit(&self, var: Var) -> Lit {
        Lit::new(var, self.value(var))
    }

    /// The set-of-literals view.
    pub fn lits(&self) -> Vec<Lit> {
        (0..self.values.len()).map(|i| self.lit(Var::from_offset(i))).collect()
    }

    pub fn truncate(&self, n: usize) -> Model {
        Model { values: self.values[..n].to_vec() }
    }
}

/// A clause set over declared variables `1..=num_vars`.
///
/// Variables past `base_vars` are definitional auxiliaries introduced by
/// [`super::attach_formula`]; they are functionally determined by the base
/// variables and never appear in evidence reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfSystem {
    num_vars: usize,
    base_vars: usize,
    names: Vec<Option<String>>,
    clauses: Vec<Clause>,
}

impl CnfSystem {
    pub fn new(num_vars: usize) -> CnfSystem {
        assert!(num_vars >= 1, "a system declares at least one variable");
        CnfSystem { num_vars, base_vars: num_vars, names: vec![None; num_vars], clauses: Vec::new() }
    }

    /// Builds a system over named variables, in the given order.
    pub fn with_names<S: Into<String>>(names: impl IntoIterator<Item = S>) -> CnfSystem {
        let names: Vec<Option<String>> = names.into_iter().map(|s| Some(s.into())).collect();
        let mut sys = CnfSystem::new(names.len());
        let mut seen = HashSet::new();
        for n in names.iter().flatten() {
            assert!(seen.insert(n.clone()), "duplicate variable name {n}");
        }
        sys.names = names;
        sys
    }

    /// Clauses given as DIMACS integer lists; tautologies are dropped.
    pub fn from_clauses(num_vars: usize, clauses: &[&[i64]]) -> CnfSystem {
        let mut sys = CnfSystem::new(num_vars);
        for c in clauses {
            if let Some(c) = Clause::from_dimacs(c) {
                sys.add_clause(c);
            }
        }
        sys
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Number of user variables (the base), excluding auxiliaries.
    pub fn base_vars(&self) -> usize {
        self.base_vars
    }

    pub fn has_aux(&self) -> bool {
        self.num_vars > self.base_vars
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (1..=self.num_vars).map(Var::new)
    }

    pub fn base(&self) -> impl Iterator<Item = Var> {
        (1..=self.base_vars).map(Var::new)
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn add_clause(&mut self, clause: Clause) {
        assert!(
            clause.lits().iter().all(|l| l.var().index() <= self.num_vars),
            "clause references an undeclared variable"
        );
        self.clauses.push(clause);
    }

    pub fn with_clause(&self, clause: Clause) -> CnfSystem {
        let mut s = self.clone();
        s.add_clause(clause);
        s
    }

    /// Adds the unit clause `lit`.
    pub fn with_unit(&self, lit: Lit) -> CnfSystem {
        self.with_clause(Clause::normalize(vec![lit]).expect("unit clause"))
    }

    pub fn with_units(&self, lits: &[Lit]) -> CnfSystem {
        let mut s = self.clone();
        for &l in lits {
            s.add_clause(Clause::normalize(vec![l]).expect("unit clause"));
        }
        s
    }

    /// Appends a fresh auxiliary variable.
    pub fn new_aux(&mut self) -> Var {
        self.num_vars += 1;
        self.names.push(None);
        Var::new(self.num_vars)
    }

    /// Appends a fresh base variable. Panics if auxiliaries already exist.
    pub fn add_var(&mut self, name: Option<String>) -> Var {
        assert!(!self.has_aux(), "base variables cannot follow auxiliaries");
        if let Some(n) = &name {
            assert!(self.var_by_name(n).is_none(), "duplicate variable name {n}");
        }
        self.num_vars += 1;
        self.base_vars += 1;
        self.names.push(name);
        Var::new(self.num_vars)
    }

    pub fn set_name(&mut self, var: Var, name: impl Into<String>) {
        let name = name.into();
        if let Some(other) = self.var_by_name(&name) {
            assert_eq!(other, var, "duplicate variable name {name}");
        }
        self.names[var.offset()] = Some(name);
    }

    pub fn name(&self, var: Var) -> Option<&str> {
        self.names.get(var.offset()).and_then(|n| n.as_deref())
    }

    /// Declared name, or `vK` for an unnamed variable.
    pub fn var_label(&self, var: Var) -> String {
        match self.name(var) {
            Some(n) => n.to_string(),
            None => format!("v{}", var.index()),
        }
    }

    pub fn lit_label(&self, lit: Lit) -> String {
        if lit.is_positive() {
            self.var_label(lit.var())
        } else {
            format!("!{}", self.var_label(lit.var()))
        }
    }

    pub fn var_by_name(&self, name: &str) -> Option<Var> {
        self.names.iter().position(|n| n.as_deref() == Some(name)).map(Var::from_offset)
    }

    pub fn has_names(&self) -> bool {
        self.names.iter().any(Option::is_some)
    }

    pub fn satisfied_by(&self, model: &Model) -> bool {
        self.clauses.iter().all(|c| c.satisfied_by(model))
    }

    /// Variables that occur in at least one clause.
    pub fn occurring_vars(&self) -> Vec<Var> {
        let mut seen = vec![false; self.num_vars];
        for c in &self.clauses {
            for l in c.lits() {
                seen[l.var().offset()] = true;
            }
        }
        (0..self.num_vars).filter(|&i| seen[i]).map(Var::from_offset).collect()
    }

    /// Indices of clauses that duplicate an earlier clause.
    pub fn duplicate_clauses(&self) -> Vec<usize> {
        let mut seen = HashSet::new();
        (0..self.clauses.len()).filter(|&i| !seen.insert(&self.clauses[i])).collect()
    }

    /// Restricts the system to `keep` (in that order), renumbering variables.
    /// Clauses must mention kept variables only.
    pub fn project(&self, keep: &[Var], clauses: impl IntoIterator<Item = Clause>) -> CnfSystem {
        let mut map = vec![None; self.num_vars];
        for (i, v) in keep.iter().enumerate() {
            map[v.offset()] = Some(Var::from_offset(i));
        }
        let mut sys = CnfSystem::new(keep.len().max(1));
        for (i, v) in keep.iter().enumerate() {
            sys.names[i] = self.names[v.offset()].clone();
        }
        for c in clauses {
            sys.add_clause(c.map_vars(|v| map[v.offset()].expect("clause variable must be kept")));
        }
        sys
    }

    /// Clause-set equality, ignoring order and duplicates.
    pub fn same_clause_set(&self, other: &CnfSystem) -> bool {
        let a: HashSet<&Clause> = self.clauses.iter().collect();
        let b: HashSet<&Clause> = other.clauses.iter().collect();
        self.num_vars == other.num_vars && a == b
    }
}

impl fmt::Display for CnfSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| c.lits().iter().map(|&l| self.lit_label(l)).collect::<Vec<_>>().join(" | "))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
