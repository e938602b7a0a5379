//! DIMACS CNF reading and writing.
//!
//! Variable names ride along in comment lines of the form `c var <K> <name>`,
//! which other DIMACS tools ignore.

use std::fmt;

use super::cnf::{Clause, CnfSystem, Var};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WarningKind {
    Tautology,
    DuplicateClause,
    ClauseCount,
}

impl WarningKind {
    fn as_str(self) -> &'static str {
        match self {
            WarningKind::Tautology => "tautology",
            WarningKind::DuplicateClause => "duplicate-clause",
            WarningKind::ClauseCount => "clause-count",
        }
    }
}

/// A non-fatal parse finding, one structured line each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub kind: WarningKind,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "warning kind={} line={} msg=\"{}\"", self.kind.as_str(), self.line, self.message)
    }
}

#[derive(Clone, Debug)]
pub struct Parsed {
    pub system: CnfSystem,
    pub warnings: Vec<ParseWarning>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Dimacs { line, message: message.into() }
}

pub fn parse_dimacs(text: &str) -> Result<Parsed> {
    let mut header: Option<(usize, usize)> = None;
    let mut names: Vec<(usize, Var, String)> = Vec::new();
    let mut system: Option<CnfSystem> = None;
    let mut warnings = Vec::new();
    let mut pending: Vec<i64> = Vec::new();
    let mut pending_line = 0;
    let mut raw_clauses = 0usize;
    let mut clause_lines: Vec<usize> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "c" || line.starts_with("c ") || line.starts_with("c\t") {
            let mut parts = line.split_whitespace().skip(1);
            if parts.next() == Some("var") {
                let idx = parts.next().and_then(|t| t.parse::<usize>().ok());
                let name = parts.next();
                if let (Some(idx), Some(name), None) = (idx, name, parts.next()) {
                    if idx == 0 {
                        return Err(err(lineno, "variable index 0 in name annotation"));
                    }
                    names.push((lineno, Var::new(idx), name.to_string()));
                }
            }
            continue;
        }
        if line.starts_with('%') {
            // SATLIB-style trailer
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(lineno, "duplicate problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(err(lineno, "malformed header, expected `p cnf <vars> <clauses>`"));
            }
            let b: usize = parts[2].parse().map_err(|_| err(lineno, "malformed variable count"))?;
            let c: usize = parts[3].parse().map_err(|_| err(lineno, "malformed clause count"))?;
            if b == 0 {
                return Err(err(lineno, "a system must declare at least one variable"));
            }
            header = Some((b, c));
            system = Some(CnfSystem::new(b));
            continue;
        }
        let Some(sys) = system.as_mut() else {
            return Err(err(lineno, "clause before `p cnf` header"));
        };
        let nvars = sys.num_vars() as i64;
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| err(lineno, format!("invalid literal `{tok}`")))?;
            if x == 0 {
                raw_clauses += 1;
                let clause_line = if pending.is_empty() { lineno } else { pending_line };
                match Clause::from_dimacs(&pending) {
                    Some(c) => {
                        sys.add_clause(c);
                        clause_lines.push(clause_line);
                    }
                    None => warnings.push(ParseWarning {
                        line: clause_line,
                        kind: WarningKind::Tautology,
                        message: "tautological clause dropped".into(),
                    }),
                }
                pending.clear();
                continue;
            }
            if x.abs() > nvars {
                return Err(err(lineno, format!("variable index {} out of range 1..={nvars}", x.abs())));
            }
            if pending.is_empty() {
                pending_line = lineno;
            }
            pending.push(x);
        }
    }

    let Some((_, declared_clauses)) = header else {
        return Err(err(text.lines().count().max(1), "missing `p cnf` header"));
    };
    if !pending.is_empty() {
        return Err(err(pending_line, "clause is missing its `0` terminator"));
    }
    let mut system = system.expect("header parsed");
    for (lineno, var, name) in names {
        if var.index() > system.num_vars() {
            return Err(err(lineno, format!("name annotation for undeclared variable {}", var.index())));
        }
        if system.var_by_name(&name).is_some_and(|v| v != var) {
            return Err(err(lineno, format!("duplicate variable name `{name}`")));
        }
        system.set_name(var, name);
    }
    for i in system.duplicate_clauses() {
        warnings.push(ParseWarning {
            line: clause_lines[i],
            kind: WarningKind::DuplicateClause,
            message: "clause repeats an earlier clause".into(),
        });
    }
    if raw_clauses != declared_clauses {
        warnings.push(ParseWarning {
            line: 0,
            kind: WarningKind::ClauseCount,
            message: format!("header declares {declared_clauses} clauses, found {raw_clauses}"),
        });
    }
    warnings.sort_by_key(|w| w.line);
    Ok(Parsed { system, warnings })
}

/// Writes name annotations (if any), the header, then one clause per line.
/// Auxiliary variables are written like any other variable.
pub fn render_dimacs(system: &CnfSystem) -> String {
    let mut out = String::new();
    for v in system.vars() {
        if let Some(n) = system.name(v) {
            out.push_str(&format!("c var {} {}\n", v.index(), n));
        }
    }
    out.push_str(&format!("p cnf {} {}\n", system.num_vars(), system.num_clauses()));
    for c in system.clauses() {
        for l in c.lits() {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_three_one() {
        let p = parse_dimacs("p cnf 3 4\n1 2 0\n2 3 0\n3 1 0\n-1 -2 -3 0\n").unwrap();
        assert_eq!(p.system.num_vars(), 3);
        assert_eq!(p.system.num_clauses(), 4);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn empty_system() {
        let p = parse_dimacs("p cnf 1 0\n").unwrap();
        assert_eq!(p.system.num_vars(), 1);
        assert_eq!(p.system.num_clauses(), 0);
    }

    #[test]
    fn tautology_dropped_with_warning() {
        let p = parse_dimacs("p cnf 2 1\n1 -1 0\n").unwrap();
        assert_eq!(p.system.num_clauses(), 0);
        assert_eq!(p.warnings.len(), 1);
        assert_eq!(p.warnings[0].kind, WarningKind::Tautology);
        assert_eq!(p.warnings[0].line, 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_dimacs("c hi\np cnf x 2\n") {
            Err(Error::Dimacs { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_dimacs("p cnf 2 1\n1 3 0\n") {
            Err(Error::Dimacs { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("out of range"));
            }
            other => panic!("{other:?}"),
        }
        match parse_dimacs("p cnf 2 2\n1 2 0\n-1\n-2\n") {
            Err(Error::Dimacs { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("terminator"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 3\n").is_err());
    }

    #[test]
    fn clauses_may_span_lines() {
        let p = parse_dimacs("p cnf 3 2\n1 2\n3 0 -1\n0\n").unwrap();
        assert_eq!(p.system.num_clauses(), 2);
    }

    #[test]
    fn duplicate_clauses_are_flagged() {
        let p = parse_dimacs("p cnf 2 2\n1 2 0\n2 1 0\n").unwrap();
        assert_eq!(p.system.num_clauses(), 2);
        assert_eq!(p.warnings[0].kind, WarningKind::DuplicateClause);
        assert_eq!(p.warnings[0].line, 3);
    }

    #[test]
    fn names_round_trip() {
        let text = "c var 1 p\nc var 2 q\np cnf 2 1\n1 -2 0\n";
        let p = parse_dimacs(text).unwrap();
        assert_eq!(p.system.name(Var::new(2)), Some("q"));
        assert_eq!(render_dimacs(&p.system), text);
    }
}
