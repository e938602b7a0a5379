//! Infix propositional formulas over a system's variables.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! iff     := implies ( "<->" implies )*
//! implies := or ( "->" implies )?          right-associative
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := "!" unary | "(" iff ")" | atom
//! ```
//!
//! Atoms are declared variable names (which may carry a ground argument
//! list such as `Helpful(Alex)`) or `vK` for variable index `K`.

use std::fmt;

use super::cnf::{CnfSystem, Lit, Model, Var};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PropFormula {
    Atom(Var),
    Not(Box<PropFormula>),
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
    Iff(Box<PropFormula>, Box<PropFormula>),
}

impl PropFormula {
    pub fn atom(v: Var) -> PropFormula {
        PropFormula::Atom(v)
    }

    pub fn lit(l: Lit) -> PropFormula {
        if l.is_positive() {
            PropFormula::Atom(l.var())
        } else {
            PropFormula::Atom(l.var()).negate()
        }
    }

    pub fn negate(self) -> PropFormula {
        PropFormula::Not(Box::new(self))
    }

    pub fn and(self, other: PropFormula) -> PropFormula {
        PropFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: PropFormula) -> PropFormula {
        PropFormula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: PropFormula) -> PropFormula {
        PropFormula::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: PropFormula) -> PropFormula {
        PropFormula::Iff(Box::new(self), Box::new(other))
    }

    /// Conjunction of `lits`; `None` when empty.
    pub fn conjunction(lits: &[Lit]) -> Option<PropFormula> {
        lits.iter().map(|&l| PropFormula::lit(l)).reduce(PropFormula::and)
    }

    pub fn eval(&self, model: &Model) -> bool {
        self.eval_with(&|v| model.value(v))
    }

    pub fn eval_with(&self, value: &dyn Fn(Var) -> bool) -> bool {
        match self {
            PropFormula::Atom(v) => value(*v),
            PropFormula::Not(f) => !f.eval_with(value),
            PropFormula::And(a, b) => a.eval_with(value) && b.eval_with(value),
            PropFormula::Or(a, b) => a.eval_with(value) || b.eval_with(value),
            PropFormula::Implies(a, b) => !a.eval_with(value) || b.eval_with(value),
            PropFormula::Iff(a, b) => a.eval_with(value) == b.eval_with(value),
        }
    }

    /// Distinct variables, ascending.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            PropFormula::Atom(v) => out.push(*v),
            PropFormula::Not(f) => f.collect_vars(out),
            PropFormula::And(a, b)
            | PropFormula::Or(a, b)
            | PropFormula::Implies(a, b)
            | PropFormula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn display<'a>(&'a self, system: &'a CnfSystem) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, system }
    }

    fn precedence(&self) -> u8 {
        match self {
            PropFormula::Atom(_) | PropFormula::Not(_) => 5,
            PropFormula::And(..) => 4,
            PropFormula::Or(..) => 3,
            PropFormula::Implies(..) => 2,
            PropFormula::Iff(..) => 1,
        }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a PropFormula,
    system: &'a CnfSystem,
}

impl FormulaDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, node: &PropFormula, min_prec: u8) -> fmt::Result {
        let prec = node.precedence();
        let paren = prec < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match node {
            PropFormula::Atom(v) => f.write_str(&self.system.var_label(*v))?,
            PropFormula::Not(inner) => {
                f.write_str("!")?;
                self.write(f, inner, 5)?;
            }
            PropFormula::And(a, b) => {
                self.write(f, a, 4)?;
                f.write_str(" & ")?;
                self.write(f, b, 5)?;
            }
            PropFormula::Or(a, b) => {
                self.write(f, a, 3)?;
                f.write_str(" | ")?;
                self.write(f, b, 4)?;
            }
            PropFormula::Implies(a, b) => {
                self.write(f, a, 3)?;
                f.write_str(" -> ")?;
                self.write(f, b, 2)?;
            }
            PropFormula::Iff(a, b) => {
                self.write(f, a, 1)?;
                f.write_str(" <-> ")?;
                self.write(f, b, 2)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Name(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::FormulaSyntax { position, message: message.into() }
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.' || c == '\''
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            _ if c.is_whitespace() => i += 1,
            '!' | '~' => {
                out.push((start, Token::Not));
                i += 1;
            }
            '&' => {
                out.push((start, Token::And));
                i += 1;
            }
            '|' => {
                out.push((start, Token::Or));
                i += 1;
            }
            '(' => {
                out.push((start, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((start, Token::RParen));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((start, Token::Implies));
                i += 2;
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                out.push((start, Token::Iff));
                i += 3;
            }
            _ if is_name_start(c) => {
                let mut name = String::new();
                while i < chars.len() && is_name_char(chars[i]) {
                    name.push(chars[i]);
                    i += 1;
                }
                // ground argument list glued to the predicate name
                if chars.get(i) == Some(&'(') {
                    let mut depth = 0;
                    let mut j = i;
                    let mut args = String::new();
                    while j < chars.len() {
                        let d = chars[j];
                        if d == '(' {
                            depth += 1;
                        } else if d == ')' {
                            depth -= 1;
                        } else if !(is_name_char(d) || d == ',' || d.is_whitespace()) {
                            break;
                        }
                        if !d.is_whitespace() {
                            args.push(d);
                        }
                        j += 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    // only an argument list if it closed and held plain terms
                    if depth == 0 && args.len() > 2 && !args[1..args.len() - 1].contains(['(', ')']) {
                        name.push_str(&args);
                        i = j;
                    }
                }
                out.push((start, Token::Name(name)));
            }
            _ => return Err(syntax(start, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    system: &'a CnfSystem,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn eat(&mut self, t: &Token) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<PropFormula> {
        let mut lhs = self.implies()?;
        while self.eat(&Token::Iff) {
            let rhs = self.implies()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<PropFormula> {
        let lhs = self.or()?;
        if self.eat(&Token::Implies) {
            let rhs = self.implies()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<PropFormula> {
        let mut lhs = self.and()?;
        while self.eat(&Token::Or) {
            let rhs = self.and()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<PropFormula> {
        let mut lhs = self.unary()?;
        while self.eat(&Token::And) {
            let rhs = self.unary()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<PropFormula> {
        let at = self.position();
        match self.tokens.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Token::Not) => {
                self.pos += 1;
                Ok(self.unary()?.negate())
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.iff()?;
                if !self.eat(&Token::RParen) {
                    return Err(syntax(self.position(), "expected `)`"));
                }
                Ok(inner)
            }
            Some(Token::Name(name)) => {
                self.pos += 1;
                resolve_atom(self.system, &name).map(PropFormula::Atom)
            }
            Some(t) => Err(syntax(at, format!("unexpected token {t:?}"))),
            None => Err(syntax(at, "unexpected end of formula")),
        }
    }
}

fn resolve_atom(system: &CnfSystem, name: &str) -> Result<Var> {
    if let Some(v) = system.var_by_name(name) {
        if v.index() <= system.base_vars() {
            return Ok(v);
        }
    }
    if let Some(digits) = name.strip_prefix('v') {
        if let Ok(k) = digits.parse::<usize>() {
            if k >= 1 && k <= system.base_vars() && !digits.starts_with('+') {
                return Ok(Var::new(k));
            }
        }
    }
    Err(Error::UnknownAtom(name.to_string()))
}

pub fn parse_formula(text: &str, system: &CnfSystem) -> Result<PropFormula> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, end: text.chars().count(), system };
    let f = p.iff()?;
    if p.pos != p.tokens.len() {
        return Err(syntax(p.position(), "trailing input"));
    }
    Ok(f)
}
