use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use serde_json::{json, Value};
use typmod::approximation::{early_typical, surrounding_evidence};
use typmod::counter::{Branching, Counter};
use typmod::evidence::{evidence_all, evidence_of, pinned_evidence, PinnedDistribution};
use typmod::experiments::{
    gen_random_cnf, locate_empirical_minimum, solve_m0, sweep, write_csv, write_dat, Axis, GenConfig, SweepConfig,
};
use typmod::formula::render_dimacs;
use typmod::kernel::{check_stability, typical_kernel_with, Stability};
use typmod::numeric::{count_to_float, ratio_to_float, sig_digits};
use typmod::typicality::{erratum, pmtm_estimate, typical_models, typicality_report};
use typmod::{parse_dimacs, parse_formula, CnfSystem, Error, Lit, Model, Ratio};

use crate::args::{AxisArg, BranchingArg, Format};
use crate::render::{dec, frac_dec, key_values, lits_label, model_label, parse_ratio, ratio_json, yes_no, Table};

/// Counting gets slow beyond this many variables.
const LARGE_SYSTEM: usize = 60;

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Usage(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(Error::InconsistentSystem | Error::InconsistentSubsystem) => 2,
            Failure::Core(Error::CapExceeded { .. } | Error::ResourceGuard(_)) => 3,
            _ => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Usage(m) => m.clone(),
            Failure::Io(e) => e.to_string(),
        }
    }
}

pub type Outcome = Result<String, Failure>;

pub fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

/// Reads a DIMACS system, reporting parse warnings on standard error.
pub fn load(path: &Path) -> Result<CnfSystem, Failure> {
    let parsed = parse_dimacs(&read_input(path)?)?;
    let mut err = io::stderr().lock();
    for w in &parsed.warnings {
        let _ = writeln!(err, "{w}");
    }
    let b = parsed.system.num_vars();
    if b > LARGE_SYSTEM {
        let _ = writeln!(err, "warning kind=large-system line=0 msg=\"{b} variables; exact counting may take long\"");
    }
    Ok(parsed.system)
}

fn formula(system: &CnfSystem, text: &str) -> Result<typmod::PropFormula, Failure> {
    Ok(parse_formula(text, system)?)
}

pub fn count(system: &CnfSystem, trace: bool, branching: BranchingArg, format: Format) -> Outcome {
    let branching = match branching {
        BranchingArg::Static => Branching::Static,
        BranchingArg::MostFrequent => Branching::MostFrequent,
    };
    let mut stderr = io::stderr();
    let mut counter = Counter::new(system).branching(branching);
    if trace {
        counter = counter.trace(&mut stderr);
    }
    let n = counter.count();
    Ok(match format {
        Format::Table => format!("{n}\n"),
        Format::Csv => format!("models\n{n}\n"),
        Format::Json => json!({ "models": n.to_string() }).to_string() + "\n",
    })
}

fn parse_pin(system: &CnfSystem, text: &str) -> Result<(Model, Ratio), Failure> {
    let bad = |m: &str| Failure::Usage(format!("pin `{text}`: {m}"));
    let (lits, p) = text.rsplit_once('=').ok_or_else(|| bad("expected `lits=p`"))?;
    let p = parse_ratio(p).ok_or_else(|| bad("probability is not a number"))?;
    let mut values: Vec<Option<bool>> = vec![None; system.base_vars()];
    for tok in lits.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (positive, name) = match tok.strip_prefix(['!', '~', '-']) {
            Some(rest) => (false, rest),
            None => (true, tok),
        };
        let f = parse_formula(name, system)?;
        let Some(&v) = f.vars().first().filter(|_| f.vars().len() == 1) else {
            return Err(bad("each entry must be a single atom"));
        };
        values[v.offset()] = Some(positive);
    }
    let values: Option<Vec<bool>> = values.into_iter().collect();
    let values = values.ok_or_else(|| bad("every variable needs a value"))?;
    Ok((Model::new(values), p))
}

pub fn evidence(system: &CnfSystem, formulas: &[String], pins: &[String], format: Format) -> Outcome {
    if formulas.is_empty() {
        if !pins.is_empty() {
            return Err(Failure::Usage("--pin needs at least one --formula".into()));
        }
        let table = evidence_all(system)?;
        let rows: Vec<(String, Ratio)> = table.iter().map(|(v, e)| (system.var_label(v), e.clone())).collect();
        return Ok(match format {
            Format::Table => {
                let mut t = Table::new(&["variable", "E", "decimal"]);
                for (v, e) in &rows {
                    t.push(vec![v.clone(), e.to_string(), dec(e)]);
                }
                t.to_table()
            }
            Format::Csv => {
                let mut t = Table::new(&["variable", "E_num", "E_den", "E_decimal"]);
                for (v, e) in &rows {
                    t.push(vec![v.clone(), e.numer().to_string(), e.denom().to_string(), dec(e)]);
                }
                t.to_csv()
            }
            Format::Json => {
                let vals: Vec<Value> = rows.iter().map(|(v, e)| json!({ "variable": v, "evidence": ratio_json(e) })).collect();
                json!({ "models": table.total_models.to_string(), "variables": vals }).to_string() + "\n"
            }
        });
    }
    let pinned = PinnedDistribution::new(pins.iter().map(|p| parse_pin(system, p)).collect::<Result<_, _>>()?);
    let mut rows = Vec::new();
    for text in formulas {
        let f = formula(system, text)?;
        let e = if pinned.entries.is_empty() { evidence_of(system, &f)? } else { pinned_evidence(system, &f, &pinned)? };
        rows.push((text.clone(), e));
    }
    Ok(match format {
        Format::Table | Format::Csv => {
            let mut t = Table::new(&["formula", "E_num", "E_den", "E_decimal"]);
            for (f, e) in &rows {
                t.push(vec![f.clone(), e.numer().to_string(), e.denom().to_string(), dec(e)]);
            }
            if format == Format::Csv {
                t.to_csv()
            } else {
                t.to_table()
            }
        }
        Format::Json => {
            let vals: Vec<Value> = rows.iter().map(|(f, e)| json!({ "formula": f, "evidence": ratio_json(e) })).collect();
            Value::Array(vals).to_string() + "\n"
        }
    })
}

pub fn typical(system: &CnfSystem, format: Format) -> Outcome {
    let table = evidence_all(system)?;
    let report = typicality_report(system, &table);
    let kernel = typical_kernel_with(system, &table)?;
    let hats: Vec<f64> = report.typical.iter().map(|a| ratio_to_float(&a.evidence)).collect();
    let pmtm = pmtm_estimate(&hats, count_to_float(&table.total_models));
    let mtm = report.most_typical_model.as_ref();
    let s = &report.stats;
    Ok(match format {
        Format::Table | Format::Csv => {
            let mut t = Table::new(&["variable", "atom", "E", "decimal", "neutral", "kernel", "N1", "N2"]);
            for (a, k) in report.typical.iter().zip(&kernel.verdicts) {
                t.push(vec![
                    system.var_label(a.lit.var()),
                    system.lit_label(a.lit),
                    a.evidence.to_string(),
                    dec(&a.evidence),
                    yes_no(a.neutral),
                    yes_no(k.is_kernel),
                    k.n1.to_string(),
                    k.n2.to_string(),
                ]);
            }
            if format == Format::Csv {
                return Ok(t.to_csv());
            }
            let summary = [
                ("models", table.total_models.to_string()),
                ("kernel", nonempty(lits_label(system, &kernel.atoms()))),
                ("most typical model", mtm.map_or("none".to_string(), |m| model_label(system, m))),
                ("E(S)", frac_dec(&s.mean_typical)),
                ("ER(mtm)", frac_dec(&s.most_typical)),
                ("ER(rand)", frac_dec(&s.random)),
                ("ER(worst)", frac_dec(&s.worst)),
                (
                    "p(mtm) estimate",
                    format!("{} [{}, {}]", sig_digits(pmtm.estimate, 6), sig_digits(pmtm.lower, 6), sig_digits(pmtm.upper, 6)),
                ),
            ];
            format!("{}\n{}", t.to_table(), key_values(&summary))
        }
        Format::Json => {
            let vars: Vec<Value> = report
                .typical
                .iter()
                .zip(&kernel.verdicts)
                .map(|(a, k)| {
                    json!({
                        "variable": system.var_label(a.lit.var()),
                        "atom": system.lit_label(a.lit),
                        "evidence": ratio_json(&a.evidence),
                        "neutral": a.neutral,
                        "kernel": k.is_kernel,
                        "n1": k.n1.to_string(),
                        "n2": k.n2.to_string(),
                    })
                })
                .collect();
            let labels = |ls: &[Lit]| ls.iter().map(|&l| system.lit_label(l)).collect::<Vec<_>>();
            json!({
                "models": table.total_models.to_string(),
                "variables": vars,
                "kernel": labels(&kernel.atoms()),
                "most_typical_model": mtm.map(|m| labels(&m.lits())),
                "mean_typical_evidence": ratio_json(&s.mean_typical),
                "erratum": {
                    "most_typical": ratio_json(&s.most_typical),
                    "random": ratio_json(&s.random),
                    "worst": ratio_json(&s.worst),
                },
                "pmtm": { "estimate": pmtm.estimate, "lower": pmtm.lower, "upper": pmtm.upper },
            })
            .to_string()
                + "\n"
        }
    })
}

pub fn kernel(system: &CnfSystem, stability: Option<&str>, format: Format) -> Outcome {
    if let Some(text) = stability {
        let phi = formula(system, text)?;
        let report = check_stability(system, &phi)?;
        let label = |s: Stability| match s {
            Stability::GuaranteedStable => "guaranteed",
            Stability::IncidentallyStable => "incidental",
            Stability::Lost => "lost",
        };
        let mut t = Table::new(&["atom", "stability"]);
        for e in &report.entries {
            t.push(vec![system.lit_label(e.atom), label(e.status).to_string()]);
        }
        return Ok(match format {
            Format::Table => format!("{}\n{}", t.to_table(), key_values(&[("kernel after", nonempty(lits_label(system, &report.kernel_after)))])),
            Format::Csv => t.to_csv(),
            Format::Json => {
                let entries: Vec<Value> = report
                    .entries
                    .iter()
                    .map(|e| json!({ "atom": system.lit_label(e.atom), "stability": label(e.status) }))
                    .collect();
                let after: Vec<String> = report.kernel_after.iter().map(|&l| system.lit_label(l)).collect();
                json!({ "entries": entries, "kernel_after": after }).to_string() + "\n"
            }
        });
    }
    let table = evidence_all(system)?;
    let k = typical_kernel_with(system, &table)?;
    let mut t = Table::new(&["variable", "atom", "N1", "N2", "kernel"]);
    for v in &k.verdicts {
        t.push(vec![
            system.var_label(v.atom.var()),
            system.lit_label(v.atom),
            v.n1.to_string(),
            v.n2.to_string(),
            yes_no(v.is_kernel),
        ]);
    }
    Ok(match format {
        Format::Table => t.to_table(),
        Format::Csv => t.to_csv(),
        Format::Json => {
            let vals: Vec<Value> = k
                .verdicts
                .iter()
                .map(|v| {
                    json!({
                        "atom": system.lit_label(v.atom),
                        "n1": v.n1.to_string(),
                        "n2": v.n2.to_string(),
                        "kernel": v.is_kernel,
                    })
                })
                .collect();
            Value::Array(vals).to_string() + "\n"
        }
    })
}

pub fn list_typical_models(system: &CnfSystem, cap: usize, force: bool, format: Format) -> Outcome {
    let table = evidence_all(system)?;
    let cap = if force { usize::try_from(&table.total_models).unwrap_or(usize::MAX) } else { cap };
    let models = typical_models(system, &table, cap)?;
    let mut t = Table::new(&["model", "typical_atoms", "ER"]);
    for m in &models {
        let er = erratum(&table, &m.model);
        t.push(vec![model_label(system, &m.model), m.typical.len().to_string(), frac_dec(&er)]);
    }
    Ok(match format {
        Format::Table => t.to_table(),
        Format::Csv => t.to_csv(),
        Format::Json => {
            let vals: Vec<Value> = models
                .iter()
                .map(|m| {
                    json!({
                        "model": m.model.lits().iter().map(|&l| system.lit_label(l)).collect::<Vec<_>>(),
                        "typical": m.typical.iter().map(|&l| system.lit_label(l)).collect::<Vec<_>>(),
                        "erratum": ratio_json(&erratum(&table, &m.model)),
                    })
                })
                .collect();
            Value::Array(vals).to_string() + "\n"
        }
    })
}

pub fn approx(system: &CnfSystem, order: usize, early: bool, format: Format) -> Outcome {
    if order == 0 {
        return Err(Failure::Usage("--order starts at 1".into()));
    }
    if early {
        let r = early_typical(system)?;
        let mut t = Table::new(&["variable", "atom", "tau0", "lower", "upper", "gain"]);
        for d in &r.decisions {
            t.push(vec![
                system.var_label(d.var),
                system.lit_label(d.atom),
                d.tau0.to_string(),
                dec(&d.lower),
                dec(&d.upper),
                sig_digits(d.gain, 4),
            ]);
        }
        return Ok(match format {
            Format::Table => format!("{}\n{}", t.to_table(), key_values(&[("paths", r.tau_f.to_string())])),
            Format::Csv => t.to_csv(),
            Format::Json => {
                let vals: Vec<Value> = r
                    .decisions
                    .iter()
                    .map(|d| {
                        json!({
                            "variable": system.var_label(d.var),
                            "atom": system.lit_label(d.atom),
                            "tau0": d.tau0,
                            "lower": ratio_json(&d.lower),
                            "upper": ratio_json(&d.upper),
                            "gain": d.gain,
                        })
                    })
                    .collect();
                json!({ "paths": r.tau_f, "decisions": vals }).to_string() + "\n"
            }
        });
    }
    let exact = evidence_all(system)?;
    let mut rows = Vec::new();
    for v in system.base() {
        let e = exact.evidence(v.pos());
        rows.push((v, surrounding_evidence(system, v.pos(), order, Some(&e))?, e));
    }
    let credible = rows.iter().filter(|(_, s, _)| s.credible == Some(true)).count();
    let mean_abs: f64 = rows
        .iter()
        .map(|(_, s, _)| ratio_to_float::<f64>(s.epsilon.as_ref().expect("exact supplied")).abs())
        .sum::<f64>()
        / rows.len() as f64;
    let mut t = Table::new(&["variable", "approx", "exact", "epsilon", "credible", "saturated"]);
    for (v, s, e) in &rows {
        let eps = s.epsilon.as_ref().expect("exact supplied");
        t.push(vec![
            system.var_label(*v),
            dec(&s.approx),
            dec(e),
            dec(eps),
            yes_no(s.credible == Some(true)),
            yes_no(s.saturated),
        ]);
    }
    let rate = credible as f64 / rows.len() as f64;
    Ok(match format {
        Format::Table => format!(
            "{}\n{}",
            t.to_table(),
            key_values(&[("credible", sig_digits(rate, 4)), ("mean |epsilon|", sig_digits(mean_abs, 4))])
        ),
        Format::Csv => t.to_csv(),
        Format::Json => {
            let vals: Vec<Value> = rows
                .iter()
                .map(|(v, s, e)| {
                    json!({
                        "variable": system.var_label(*v),
                        "approx": ratio_json(&s.approx),
                        "exact": ratio_json(e),
                        "epsilon": ratio_json(s.epsilon.as_ref().expect("exact supplied")),
                        "credible": s.credible,
                        "saturated": s.saturated,
                    })
                })
                .collect();
            json!({ "order": order, "credible_rate": rate, "mean_abs_epsilon": mean_abs, "variables": vals }).to_string()
                + "\n"
        }
    })
}

pub struct GenArgs {
    pub vars: usize,
    pub clauses: Option<usize>,
    pub ratio: Option<f64>,
    pub width: usize,
    pub impurity: Option<f64>,
    pub seed: u64,
}

pub fn gen(a: &GenArgs) -> Outcome {
    let mut cfg = match (a.clauses, a.ratio) {
        (Some(c), _) => GenConfig::new(a.vars, c, a.seed),
        (None, Some(r)) => GenConfig::with_ratio(a.vars, r, a.seed),
        (None, None) => return Err(Failure::Usage("give --clauses or --ratio".into())),
    };
    cfg.width = a.width;
    cfg.target_impurity = a.impurity;
    Ok(render_dimacs(&gen_random_cnf(&cfg)?))
}

pub struct SweepArgs {
    pub axis: AxisArg,
    pub grid: Vec<f64>,
    pub vars: usize,
    pub samples: usize,
    pub ratio: f64,
    pub width: usize,
    pub max_attempts: Option<usize>,
    pub timed: bool,
    pub force: bool,
    pub seed: u64,
    pub dat: Option<std::path::PathBuf>,
}

pub fn run_sweep(a: &SweepArgs, format: Format) -> Outcome {
    let axis = match a.axis {
        AxisArg::Ratio => Axis::Ratio,
        AxisArg::Impurity => Axis::Impurity,
    };
    let mut cfg = SweepConfig::new(axis, a.grid.clone(), a.vars, a.samples, a.seed);
    cfg.ratio = a.ratio;
    cfg.width = a.width;
    cfg.timed = a.timed;
    cfg.force = a.force;
    if let Some(m) = a.max_attempts {
        cfg.max_attempts = m;
    }
    let rows = sweep(&cfg)?;
    if let Some(path) = &a.dat {
        let mut f = fs::File::create(path)?;
        write_dat(&rows, &mut f)?;
    }
    if let Ok(min) = locate_empirical_minimum(&rows) {
        let m0 = u32::try_from(a.vars).ok().and_then(|b| solve_m0::<f64>(b).ok());
        let m0 = m0.map_or("none".to_string(), |s| sig_digits(s.m0, 4));
        eprintln!(
            "minimum p(mtm)={} at {}={} (mean models {}); M0={m0}",
            sig_digits(min.p_mtm, 4),
            axis,
            min.value,
            min.mean_model_count.map_or("NA".to_string(), |c| sig_digits(c, 4))
        );
    }
    Ok(match format {
        Format::Json => serde_json::to_string(&rows).map_err(|e| Failure::Usage(e.to_string()))? + "\n",
        _ => {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
    })
}

pub fn m0(vars: u32, format: Format) -> Outcome {
    let s = solve_m0::<f64>(vars)?;
    Ok(match format {
        Format::Table => key_values(&[
            ("B", s.vars.to_string()),
            ("phi*", format!("{:.12}", s.phi_star)),
            ("M0", sig_digits(s.m0, 8)),
            ("residual", format!("{:.3e}", s.residual)),
        ]),
        Format::Csv => format!("B,phi_star,m0,residual\n{},{:.12},{},{:e}\n", s.vars, s.phi_star, s.m0, s.residual),
        Format::Json => serde_json::to_string(&s).map_err(|e| Failure::Usage(e.to_string()))? + "\n",
    })
}

fn nonempty(s: String) -> String {
    if s.is_empty() {
        "none".to_string()
    } else {
        s
    }
}
