use std::io::{self, BufRead, IsTerminal, Write};
use std::path::Path;

use serde_json::json;
use typmod::session::{Belief, Mode, SessionState};
use typmod::{parse_formula, CnfSystem};

use crate::commands::{read_input, Failure, Outcome};
use crate::render::{dec, parse_ratio, ratio_json};

const HELP: &str = "\
queries are formulas, e.g. `a & !b`, `p -> q`
:mode oblivious|nonoblivious   switch mode
:floor <x>                     abstain when |E - 1/2| < x
:trail                         list beliefs so far
:check                         test the beliefs for joint consistency
:reset                         forget all beliefs
:quit                          leave
";

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Oblivious => "oblivious",
        Mode::Nonoblivious => "nonoblivious",
    }
}

fn describe(b: &Belief) -> String {
    let verdict = match (b.abstained, b.verdict) {
        (true, _) => "abstain",
        (false, true) => "yes",
        (false, false) => "no",
    };
    format!("{verdict}  E={} ({})  mode={}  step={}", b.evidence, dec(&b.evidence), mode_name(b.mode), b.index)
}

/// Handles one input line; `None` means quit.
fn step(state: &mut SessionState, line: &str) -> Option<String> {
    let line = line.trim();
    if line.is_empty() {
        return Some(String::new());
    }
    let Some(cmd) = line.strip_prefix(':') else {
        return Some(match parse_formula(line, state.base()).and_then(|q| state.ask_as(q, line.to_string())) {
            Ok(b) => describe(&b) + "\n",
            Err(e) => format!("error: {e}\n"),
        });
    };
    let (name, arg) = cmd.split_once(' ').map_or((cmd, ""), |(n, a)| (n, a.trim()));
    Some(match name {
        "quit" | "q" => return None,
        "help" | "h" => HELP.to_string(),
        "mode" => match arg {
            "oblivious" => {
                state.set_mode(Mode::Oblivious);
                "mode=oblivious\n".into()
            }
            "nonoblivious" => {
                state.set_mode(Mode::Nonoblivious);
                "mode=nonoblivious\n".into()
            }
            "" => format!("mode={}\n", mode_name(state.mode())),
            _ => "error: mode is oblivious or nonoblivious\n".into(),
        },
        "floor" => match parse_ratio(arg) {
            None if arg.is_empty() => format!("floor={}\n", state.floor()),
            None => "error: floor must be a number\n".into(),
            Some(f) => match state.set_floor(f) {
                Ok(()) => format!("floor={}\n", state.floor()),
                Err(e) => format!("error: {e}\n"),
            },
        },
        "trail" => state.trail().iter().map(|b| format!("{}  {}\n", b.text, describe(b))).collect(),
        "check" => format!("consistent={}\n", if state.check() { "yes" } else { "no" }),
        "reset" => {
            state.reset();
            "trail cleared\n".into()
        }
        _ => format!("error: unknown command :{name} (try :help)\n"),
    })
}

pub fn new_state(system: CnfSystem, mode: Mode, floor: &str) -> Result<SessionState, Failure> {
    let mut state = SessionState::new(system, mode)?;
    let floor = parse_ratio(floor).ok_or_else(|| Failure::Usage(format!("floor `{floor}` is not a number")))?;
    state.set_floor(floor)?;
    Ok(state)
}

pub fn interactive(mut state: SessionState) -> Outcome {
    let stdin = io::stdin();
    let prompt = stdin.is_terminal();
    let mut out = io::stdout().lock();
    let mut lines = stdin.lock().lines();
    loop {
        if prompt {
            write!(out, "> ")?;
            out.flush()?;
        }
        let Some(line) = lines.next() else { break };
        match step(&mut state, &line?) {
            Some(reply) => {
                out.write_all(reply.as_bytes())?;
                out.flush()?;
            }
            None => break,
        }
    }
    Ok(String::new())
}

/// Runs each non-empty, non-comment line of `path` and returns the trail.
pub fn batch(mut state: SessionState, path: &Path) -> Outcome {
    let text = read_input(path)?;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with(':') {
            if step(&mut state, line).is_none() {
                break;
            }
            continue;
        }
        let q = parse_formula(line, state.base()).map_err(|e| Failure::Usage(format!("line {}: {e}", i + 1)))?;
        state.ask_as(q, line.to_string())?;
    }
    let beliefs: Vec<_> = state
        .trail()
        .iter()
        .map(|b| {
            json!({
                "query": b.text,
                "verdict": b.verdict,
                "abstained": b.abstained,
                "evidence": ratio_json(&b.evidence),
                "mode": mode_name(b.mode),
                "step": b.index,
            })
        })
        .collect();
    Ok(json!({ "beliefs": beliefs, "consistent": state.check() }).to_string() + "\n")
}
