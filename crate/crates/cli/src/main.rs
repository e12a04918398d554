//! Command-line front end: model checking, updates, translation, bounded
//! validity, bisimulation, DOT export and the consecutive numbers riddle.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use mendax::action;
use mendax::bisim::bisimilar;
use mendax::normalform::{check_validity, SpeakerAxioms, Translator};
use mendax::plausibility::{execute_pl, PlausibilityModel, PointedPlausibilityModel};
use mendax::riddle::{run_scenario, Mode, Pair, Scenario};
use mendax::syntax::parse_announcement;
use mendax::{parse, Agent, Atom, Formula, KripkeModel, ModelClass, PointedModel, Signature};

#[derive(Parser)]
#[command(name = "mendax", version, about = "Dynamic epistemic logics of lying and bluffing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula at the designated state of a model.
    Check {
        model: PathBuf,
        formula: String,
        /// Evaluate at this state instead of the model's `point`.
        #[arg(long)]
        state: Option<String>,
    },
    /// Apply an announcement such as `lie{a} p` and print the new model.
    Update {
        model: PathBuf,
        announcement: String,
        #[arg(long)]
        state: Option<String>,
    },
    /// Rewrite a formula into an equivalent one without announcements.
    Translate {
        formula: String,
        /// Print each rewrite step.
        #[arg(long)]
        trace: bool,
        /// Use the compact speaker axioms, sound on transitive models only.
        #[arg(long)]
        transitive: bool,
    },
    /// Search all models up to a size for a countermodel.
    Valid {
        formula: String,
        #[arg(long, default_value = "k")]
        class: ModelClass,
        #[arg(long, default_value_t = 3)]
        states: usize,
        /// Number of agents; the formula's agents come first, then a, b, c, ...
        #[arg(long)]
        agents: Option<usize>,
        /// Number of atoms; the formula's atoms come first, then p, q, r, ...
        #[arg(long)]
        atoms: Option<usize>,
    },
    /// Are the designated states of two models bisimilar?
    Bisim { first: PathBuf, second: PathBuf },
    /// Graphviz rendering of a model.
    Dot { model: PathBuf },
    /// Run a consecutive numbers dialogue and print each step.
    Riddle {
        #[arg(long)]
        bound: Option<u32>,
        /// Actual pair as `m,n`.
        #[arg(long, value_parser = parse_pair)]
        actual: Option<Pair>,
        /// Scenario file. Without one, the four truthful lines are used.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, default_value = "direct")]
        mode: Mode,
    },
}

fn parse_pair(s: &str) -> std::result::Result<Pair, String> {
    let (m, n) = s.split_once(',').ok_or("expected `m,n`")?;
    let num = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("`{x}`: {e}"));
    Ok((num(m)?, num(n)?))
}

/// A model file holds either a Kripke model or a plausibility model.
enum Loaded {
    Kripke(PointedModel),
    Plausibility(PointedPlausibilityModel),
}

impl Loaded {
    fn signature(&self) -> Signature {
        match self {
            Loaded::Kripke(pm) => pm.model.signature(),
            Loaded::Plausibility(pm) => pm.model.signature(),
        }
    }

    fn eval(&self, f: &Formula) -> Result<bool> {
        Ok(match self {
            Loaded::Kripke(pm) => pm.eval(f)?,
            Loaded::Plausibility(pm) => pm.eval(f)?,
        })
    }
}

fn load(path: &Path, state: Option<&str>) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{} is not JSON", path.display()))?;
    let plausible = value.get("epi").is_some() || value.get("rank").is_some();
    let missing = || anyhow!("{} has no `point`; pass --state", path.display());
    Ok(if plausible {
        let (model, point) = PlausibilityModel::from_json(&text)?;
        let point = match state {
            Some(s) => model.state_index(s)?,
            None => point.ok_or_else(missing)?,
        };
        Loaded::Plausibility(PointedPlausibilityModel { model, point })
    } else {
        let (model, point) = KripkeModel::from_json(&text)?;
        let point = match state {
            Some(s) => model.state_index(s)?,
            None => point.ok_or_else(missing)?,
        };
        Loaded::Kripke(PointedModel::new(model, point)?)
    })
}

/// Names for an enumeration: those in use first, then fresh ones.
fn pad<T: Ord + Clone>(used: Vec<T>, want: Option<usize>, fresh: impl Fn(usize) -> T, what: &str) -> Result<Vec<T>> {
    let Some(want) = want else { return Ok(used) };
    if used.len() > want {
        bail!("the formula uses {} {what}s, more than {want}", used.len());
    }
    let mut out = used;
    let mut i = 0;
    while out.len() < want {
        let candidate = fresh(i);
        if !out.contains(&candidate) {
            out.push(candidate);
        }
        i += 1;
    }
    Ok(out)
}

fn fresh_agent(i: usize) -> Agent {
    let letters = "abcdefghijklmnopqrstuvwxyz".as_bytes();
    Agent::new(if i < 26 { (letters[i] as char).to_string() } else { format!("a{i}") })
}

fn fresh_atom(i: usize) -> Atom {
    let letters = "pqrstuvw".as_bytes();
    Atom::new(if i < letters.len() { (letters[i] as char).to_string() } else { format!("p{i}") })
}

/// Outcome of a command: success, or a negative answer (exit code 1).
type Answer = Result<bool>;

fn run(cli: Cli) -> Answer {
    match cli.command {
        Command::Check { model, formula, state } => {
            let m = load(&model, state.as_deref())?;
            let f = parse(&formula, &m.signature())?;
            let value = m.eval(&f)?;
            emit(format!("{value}"));
            Ok(value)
        }
        Command::Update { model, announcement, state } => {
            let m = load(&model, state.as_deref())?;
            let ann = parse_announcement(&announcement, &m.signature())?;
            let next = match &m {
                Loaded::Kripke(pm) => action::execute(pm, &ann)?.map(|x| x.to_json()),
                Loaded::Plausibility(pm) => execute_pl(pm, &ann)?.map(|x| x.to_json()),
            };
            match next {
                Some(json) => {
                    emit(json.to_string());
                    Ok(true)
                }
                None => {
                    emit("vacuous: precondition failed".into());
                    Ok(false)
                }
            }
        }
        Command::Translate { formula, trace, transitive } => {
            let f = Formula::parse_unchecked(&formula)?;
            let speaker_axioms = if transitive { SpeakerAxioms::Transitive } else { SpeakerAxioms::General };
            let (out, steps) = Translator { speaker_axioms, agents: None }.translate(&f)?;
            if trace {
                for (i, step) in steps.iter().enumerate() {
                    emit(format!("{:>3}. {}: {}", i + 1, step.axiom, step.after));
                }
            }
            emit(format!("{out}"));
            Ok(true)
        }
        Command::Valid { formula, class, states, agents, atoms } => {
            let f = Formula::parse_unchecked(&formula)?;
            let sig = f.signature();
            let agents = pad(sig.agents.into_iter().collect(), agents, fresh_agent, "agent")?;
            let atoms = pad(sig.atoms.into_iter().collect(), atoms, fresh_atom, "atom")?;
            match check_validity(&f, class, states, &agents, &atoms)? {
                None => {
                    emit("valid at bound".into());
                    Ok(true)
                }
                Some(counter) => {
                    emit(counter.to_json().to_string());
                    Ok(false)
                }
            }
        }
        Command::Bisim { first, second } => {
            let kripke = |p: &Path| -> Result<PointedModel> {
                match load(p, None)? {
                    Loaded::Kripke(pm) => Ok(pm),
                    Loaded::Plausibility(_) => bail!("{}: bisimulation needs Kripke models", p.display()),
                }
            };
            let same = bisimilar(&kripke(&first)?, &kripke(&second)?)?;
            emit(format!("{same}"));
            Ok(same)
        }
        Command::Dot { model } => {
            let text = std::fs::read_to_string(&model).with_context(|| format!("reading {}", model.display()))?;
            let dot = match load(&model, None) {
                Ok(Loaded::Kripke(pm)) => pm.to_dot(),
                Ok(Loaded::Plausibility(pm)) => pm.belief_model().to_dot(),
                // Models without a designated state are drawn too.
                Err(_) => match KripkeModel::from_json(&text) {
                    Ok((m, point)) => m.to_dot(point),
                    Err(_) => PlausibilityModel::from_json(&text)?.0.belief_model().to_dot(None),
                },
            };
            emit(dot.trim_end().to_string());
            Ok(true)
        }
        Command::Riddle { bound, actual, script, mode } => {
            let mut sc = match &script {
                Some(path) => Scenario::from_json(
                    &std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
                )?,
                None => Scenario::truthful_dialogue(bound.unwrap_or(10), actual.unwrap_or((2, 3))),
            };
            if let Some(b) = bound {
                sc.bound = b;
            }
            if let Some(a) = actual {
                sc.actual = a;
            }
            let run = run_scenario(&sc, mode)?;
            emit(serde_json::to_string_pretty(&run.to_json())?.to_string());
            Ok(run.completed())
        }
    }
}

/// Print a line, treating a closed pipe as a normal end of output.
fn emit(line: String) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{line}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
