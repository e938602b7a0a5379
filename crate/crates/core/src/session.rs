//! Answering a sequence of queries, with or without remembering earlier
//! answers.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::counter::{count_models, is_satisfiable};
use crate::error::{Error, Result};
use crate::evidence::evidence_of;
use crate::formula::{attach_all, attach_formula, CnfSystem, PropFormula};
use crate::numeric::{half, Ratio};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every query is answered from the base system.
    Oblivious,
    /// Each answer is added to the system before the next query.
    Nonoblivious,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Belief {
    #[serde(skip)]
    pub query: PropFormula,
    /// The query as typed or rendered.
    pub text: String,
    pub verdict: bool,
    pub evidence: Ratio,
    pub mode: Mode,
    /// 1-based position in the trail.
    pub index: usize,
    /// Evidence fell inside the credibility floor; the belief is not used.
    pub abstained: bool,
}

impl Belief {
    /// The formula the reasoner commits to: the query or its negation.
    pub fn formula(&self) -> PropFormula {
        if self.verdict {
            self.query.clone()
        } else {
            self.query.clone().negate()
        }
    }
}

fn decide(query: PropFormula, text: String, evidence: Ratio, mode: Mode, index: usize, floor: &Ratio) -> Belief {
    let abstained = (&evidence - half()).abs() < *floor;
    Belief { verdict: evidence >= half(), query, text, evidence, mode, index, abstained }
}

/// True iff `S` together with every non-abstained verdict formula is
/// satisfiable.
pub fn check_consistency(system: &CnfSystem, beliefs: &[Belief]) -> bool {
    let formulas: Vec<PropFormula> = beliefs.iter().filter(|b| !b.abstained).map(Belief::formula).collect();
    is_satisfiable(&attach_all(system, &formulas))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObliviousAnswers {
    pub beliefs: Vec<Belief>,
    pub jointly_consistent: bool,
}

pub fn answer_oblivious(system: &CnfSystem, queries: &[PropFormula]) -> Result<ObliviousAnswers> {
    if count_models(system).is_zero() {
        return Err(Error::InconsistentSystem);
    }
    let zero = Ratio::zero();
    let beliefs = queries
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let e = evidence_of(system, q)?;
            Ok(decide(q.clone(), q.display(system).to_string(), e, Mode::Oblivious, i + 1, &zero))
        })
        .collect::<Result<Vec<_>>>()?;
    let jointly_consistent = check_consistency(system, &beliefs);
    Ok(ObliviousAnswers { beliefs, jointly_consistent })
}

/// A running query session over a fixed base system.
#[derive(Clone, Debug)]
pub struct SessionState {
    base: CnfSystem,
    current: CnfSystem,
    trail: Vec<Belief>,
    mode: Mode,
    floor: Ratio,
}

impl SessionState {
    pub fn new(base: CnfSystem, mode: Mode) -> Result<SessionState> {
        if !is_satisfiable(&base) {
            return Err(Error::InconsistentSystem);
        }
        Ok(SessionState { current: base.clone(), base, trail: Vec::new(), mode, floor: Ratio::zero() })
    }

    pub fn base(&self) -> &CnfSystem {
        &self.base
    }

    /// `S_i`: the base plus every accepted non-oblivious verdict.
    pub fn current(&self) -> &CnfSystem {
        &self.current
    }

    pub fn trail(&self) -> &[Belief] {
        &self.trail
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
    }

    pub fn floor(&self) -> &Ratio {
        &self.floor
    }

    /// Answers with `|E − 1/2| < floor` abstain.
    pub fn set_floor(&mut self, floor: Ratio) -> Result<()> {
        if floor.is_negative() || floor > half() {
            return Err(Error::Domain("floor must lie in [0, 1/2]".into()));
        }
        self.floor = floor;
        Ok(())
    }

    /// Drops the trail and returns to the base system.
    pub fn reset(&mut self) {
        self.current = self.base.clone();
        self.trail.clear();
    }

    pub fn ask(&mut self, query: PropFormula) -> Result<Belief> {
        let text = query.display(&self.base).to_string();
        self.ask_as(query, text)
    }

    /// Like [`SessionState::ask`] but keeps the caller's spelling of the
    /// query in the trail.
    pub fn ask_as(&mut self, query: PropFormula, text: String) -> Result<Belief> {
        let index = self.trail.len() + 1;
        let belief = match self.mode {
            Mode::Oblivious => {
                let e = evidence_of(&self.base, &query)?;
                decide(query, text, e, Mode::Oblivious, index, &self.floor)
            }
            Mode::Nonoblivious => {
                let e = evidence_of(&self.current, &query)?;
                let b = decide(query, text, e, Mode::Nonoblivious, index, &self.floor);
                if !b.abstained {
                    self.current = attach_formula(&self.current, &b.formula());
                    debug_assert!(is_satisfiable(&self.current));
                }
                b
            }
        };
        self.trail.push(belief.clone());
        Ok(belief)
    }

    /// Joint consistency of the whole trail with the base system.
    pub fn check(&self) -> bool {
        check_consistency(&self.base, &self.trail)
    }
}

pub fn answer_nonoblivious(state: &mut SessionState, query: PropFormula) -> Result<Belief> {
    let mode = state.mode();
    state.set_mode(Mode::Nonoblivious);
    let b = state.ask(query);
    state.set_mode(mode);
    b
}
