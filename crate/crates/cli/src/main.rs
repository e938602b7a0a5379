mod args;
mod commands;
mod render;
mod repl;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use typmod::session::Mode;

use args::{Cli, Command, ModeArg};
use commands::{Failure, GenArgs, Outcome, SweepArgs};

fn run(cli: Cli) -> Outcome {
    let g = &cli.global;
    if g.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(g.jobs)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let f = g.format;
    match cli.command {
        Command::Count { input, trace, branching } => commands::count(&commands::load(&input)?, trace, branching, f),
        Command::Evidence { input, formulas, pins } => commands::evidence(&commands::load(&input)?, &formulas, &pins, f),
        Command::Typical { input } => commands::typical(&commands::load(&input)?, f),
        Command::Kernel { input, stability } => commands::kernel(&commands::load(&input)?, stability.as_deref(), f),
        Command::TypicalModels { input, cap, force } => {
            commands::list_typical_models(&commands::load(&input)?, cap, force, f)
        }
        Command::Session { input, mode, floor, batch } => {
            let mode = match mode {
                ModeArg::Oblivious => Mode::Oblivious,
                ModeArg::Nonoblivious => Mode::Nonoblivious,
            };
            let state = repl::new_state(commands::load(&input)?, mode, &floor)?;
            match batch {
                Some(path) => repl::batch(state, &path),
                None => repl::interactive(state),
            }
        }
        Command::Approx { input, order, early } => commands::approx(&commands::load(&input)?, order, early, f),
        Command::Gen { vars, clauses, ratio, width, impurity, out } => {
            let text = commands::gen(&GenArgs { vars, clauses, ratio, width, impurity, seed: g.seed })?;
            write_or_return(out.as_deref(), text)
        }
        Command::Sweep { axis, grid, vars, samples, ratio, width, max_attempts, timed, force, out, dat } => {
            let a = SweepArgs { axis, grid, vars, samples, ratio, width, max_attempts, timed, force, seed: g.seed, dat };
            let text = commands::run_sweep(&a, f)?;
            write_or_return(out.as_deref(), text)
        }
        Command::SolveM0 { vars } => commands::m0(vars, f),
    }
}

fn write_or_return(path: Option<&std::path::Path>, text: String) -> Outcome {
    match path {
        Some(p) => {
            fs::write(p, text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
