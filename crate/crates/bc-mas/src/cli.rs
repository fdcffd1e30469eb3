//! Command-line front end wiring the pipeline: parse, ground, translate,
//! solve, extract transitions, compose, list conflicts, check coverage,
//! resolve conflicts, and run the verification suites.
//!
//! Exit codes: 0 on success, 1 on a domain error (parse error, failed
//! check, resource cap), 2 on a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::compose::{
    auto_resolve, check_conflict_preservation, check_covered_law_sufficiency, compose_stage,
    covered_laws, potential_conflicts, AbKeying, CheckOptions,
};
use crate::grounder::GroundingStats;
use crate::manifest::{load_description, load_manifest, load_mas, Stage};
use crate::model::{ActionDescription, FluentClass, FluentKind};
use crate::parser::{parse_ground_atoms, parse_ground_literals};
use crate::randomgen::{random_description, DescConfig};
use crate::solver::{enumerate, SolveOptions};
use crate::transition::{
    export_dot, export_json, state_from_positives, CompoundAction, DotOptions, State,
    TransitionOracle,
};
use crate::translate::{emit_json, emit_text, translate};

const CAP_ENV: &str = "BCMAS_CAP";

#[derive(Parser)]
#[command(
    name = "bcmas",
    about = "Action language BC: logic-program translation, transition systems, and two-stage multi-agent composition",
    version
)]
struct Cli {
    /// Key every abnormality fluent by its law's group id instead of the
    /// law head (contradiction pairs always key by group).
    #[arg(long, global = true)]
    ab_per_law: bool,
    /// Candidate cap for the enumerator (default 2^26, or $BCMAS_CAP).
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct InputArgs {
    /// A `.bc` description file.
    file: Option<PathBuf>,
    /// A multi-agent manifest; builds the composed description instead.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Composition stage when using a manifest (overrides the manifest).
    #[arg(long, value_parser = ["union", "global"])]
    stage: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a description, printing diagnostics.
    Check { file: PathBuf },
    /// Ground a description and print it with grounding statistics.
    Ground {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Emit the logic program for a horizon.
    Translate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        horizon: i64,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate the stable models of the program for a horizon.
    Solve {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        horizon: i64,
        #[arg(long)]
        json: bool,
        /// Enumerate all subsets of the signature instead (tiny programs).
        #[arg(long)]
        naive: bool,
    },
    /// Extract the transition system.
    Ts {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        show_negative: bool,
        #[arg(long)]
        show_ab: bool,
        #[arg(long)]
        show_self_loops: bool,
    },
    /// Build the composed description from a manifest and print it.
    Compose {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_parser = ["union", "global"])]
        stage: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// List potential conflicts: compound actions with no successor.
    Conflicts {
        #[command(flatten)]
        input: InputArgs,
        /// Only consider compound actions up to this size.
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// List the dynamic laws covered by a compound action at a state.
    Cover {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated actions, e.g. "goRight(a),goLeft(b)".
        #[arg(long)]
        action_set: String,
        /// Positive literals of the state, e.g. "at(a,2),at(b,4)".
        #[arg(long)]
        state: String,
    },
    /// Build and verify resolution laws for a potential conflict.
    Resolve {
        #[command(flatten)]
        input: InputArgs,
        /// The conflicting compound action.
        #[arg(long)]
        conflict: String,
        /// Positive literals of the conflict state.
        #[arg(long)]
        state: String,
        /// Positive literals of the desired successor state.
        #[arg(long)]
        target: String,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite: 1 = conflicts preserved under defeasible
    /// dynamics, 2 = only covered laws matter for a transition.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        lemma: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also check this many seeded random small descriptions.
        #[arg(long, default_value_t = 0)]
        random: u64,
        /// Cap on (state, action) pairs sampled per description.
        #[arg(long)]
        max_pairs: Option<usize>,
    },
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = std::io::stdout();
    run_impl(args, &mut stdout)
}

/// Like [`run`], collecting standard output into a string (for tests).
pub fn run_captured<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut buf = Vec::new();
    let code = run_impl(args, &mut buf);
    (code, String::from_utf8_lossy(&buf).into_owned())
}

fn run_impl<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.exit_code() == 0 { 0 } else { 2 };
        }
    };
    let keying = if cli.ab_per_law {
        AbKeying::PerLaw
    } else {
        AbKeying::HeadWithGroupPairs
    };
    let cap = cli
        .cap
        .or_else(|| std::env::var(CAP_ENV).ok().and_then(|v| v.parse().ok()))
        .unwrap_or(SolveOptions::default().candidate_cap);
    match dispatch(cli.cmd, keying, cap, out) {
        Ok(()) => 0,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {}", msg);
            1
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {}", msg);
            2
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {}", e);
            1
        }
    }
}

enum CliError {
    Domain(String),
    Usage(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

macro_rules! domain_from {
    ($($ty:ty),*) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Domain(e.to_string())
            }
        })*
    };
}
domain_from!(
    crate::manifest::LoadError,
    crate::compose::ComposeError,
    crate::solver::EngineError,
    crate::translate::TranslateError,
    crate::diag::Diagnostic
);

type CliResult = Result<(), CliError>;

impl InputArgs {
    fn load(&self, keying: AbKeying) -> Result<ActionDescription, CliError> {
        match (&self.file, &self.manifest) {
            (Some(path), None) => Ok(load_description(path)?.0),
            (None, Some(path)) => {
                let manifest = load_manifest(path)?;
                let global = match self.stage.as_deref() {
                    Some("union") => false,
                    Some("global") => true,
                    Some(other) => {
                        return Err(CliError::Usage(format!("unknown stage `{}`", other)))
                    }
                    None => manifest.stage == Stage::Global,
                };
                let mas = load_mas(&manifest)?;
                Ok(compose_stage(&mas, global, keying)?)
            }
            (Some(_), Some(_)) => Err(CliError::Usage(
                "pass either a file or --manifest, not both".into(),
            )),
            (None, None) => Err(CliError::Usage(
                "an input is required: a .bc file or --manifest".into(),
            )),
        }
    }
}

fn parse_state_arg(desc: &ActionDescription, text: &str) -> Result<State, CliError> {
    let lits = parse_ground_literals(text)?;
    state_from_positives(&desc.signature, &lits).map_err(CliError::Domain)
}

fn parse_action_arg(text: &str) -> Result<CompoundAction, CliError> {
    if text.trim().is_empty() {
        return Ok(CompoundAction::empty());
    }
    Ok(CompoundAction::from_atoms(parse_ground_atoms(text)?))
}

fn dispatch(cmd: Cmd, keying: AbKeying, cap: u64, out: &mut dyn Write) -> CliResult {
    match cmd {
        Cmd::Check { file } => {
            let (desc, stats) = load_description(&file)?;
            let diags = desc.validate();
            for d in &diags {
                writeln!(out, "{}", d)?;
            }
            let errors = diags.iter().filter(|d| d.is_error()).count();
            writeln!(
                out,
                "{}: {} fluent(s), {} action(s), {} static law(s), {} dynamic law(s) from {} ground law(s); {} error(s), {} warning(s)",
                file.display(),
                desc.signature.fluents.len(),
                desc.signature.actions.len(),
                desc.statics.len(),
                desc.dynamics.len(),
                stats.ground_laws,
                errors,
                diags.len() - errors
            )?;
            if errors > 0 {
                return Err(CliError::Domain(format!("{} validation error(s)", errors)));
            }
            Ok(())
        }
        Cmd::Ground { file, json } => {
            let (desc, stats) = load_description(&file)?;
            if json {
                writeln!(out, "{}", description_json(&desc, Some(&stats)))?;
            } else {
                write!(out, "{}", render_description(&desc, Some(&stats)))?;
            }
            Ok(())
        }
        Cmd::Translate {
            input,
            horizon,
            json,
        } => {
            let desc = input.load(keying)?;
            let p = translate(&desc, horizon)?;
            if json {
                writeln!(out, "{}", emit_json(&p))?;
            } else {
                write!(out, "{}", emit_text(&p))?;
            }
            Ok(())
        }
        Cmd::Solve {
            input,
            horizon,
            json,
            naive,
        } => {
            let desc = input.load(keying)?;
            let p = translate(&desc, horizon)?;
            let models = enumerate(
                &p,
                &SolveOptions {
                    naive,
                    candidate_cap: cap,
                    ..SolveOptions::default()
                },
            )?;
            if json {
                writeln!(out, "{}", models.to_json(&p))?;
            } else {
                for (i, m) in models.iter().enumerate() {
                    let atoms: Vec<String> =
                        m.0.iter().map(|&id| p.atom(id).to_string()).collect();
                    writeln!(out, "model {}: {}", i + 1, atoms.join(" "))?;
                }
                writeln!(out, "{} model(s)", models.len())?;
            }
            Ok(())
        }
        Cmd::Ts {
            input,
            dot,
            json,
            show_negative,
            show_ab,
            show_self_loops,
        } => {
            let desc = input.load(keying)?;
            let oracle = TransitionOracle::with_cap(&desc, cap);
            let ts = oracle.transitions()?;
            if dot {
                let opts = DotOptions {
                    show_negative,
                    show_ab,
                    show_self_loops,
                };
                write!(out, "{}", export_dot(&ts, &desc.signature, &opts))?;
            } else if json {
                writeln!(out, "{}", export_json(&ts))?;
            } else {
                writeln!(
                    out,
                    "{} state(s), {} transition(s)",
                    ts.states.len(),
                    ts.transitions.len()
                )?;
                let states: Vec<&State> = ts.states.iter().collect();
                for (i, s) in states.iter().enumerate() {
                    writeln!(out, "state {}: {}", i, s)?;
                }
                for t in &ts.transitions {
                    let from = states.iter().position(|s| **s == t.from).unwrap();
                    let to = states.iter().position(|s| **s == t.to).unwrap();
                    writeln!(out, "state {} --{}--> state {}", from, t.action, to)?;
                }
            }
            Ok(())
        }
        Cmd::Compose {
            manifest,
            stage,
            json,
        } => {
            let input = InputArgs {
                file: None,
                manifest: Some(manifest),
                stage,
            };
            let desc = input.load(keying)?;
            if json {
                writeln!(out, "{}", description_json(&desc, None))?;
            } else {
                write!(out, "{}", render_description(&desc, None))?;
            }
            Ok(())
        }
        Cmd::Conflicts {
            input,
            max_size,
            json,
        } => {
            let desc = input.load(keying)?;
            let report = potential_conflicts(&desc, max_size)?;
            if json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                writeln!(
                    out,
                    "{} state(s), {} potential conflict(s)",
                    report.per_state.len(),
                    report.total()
                )?;
                for (state, conflicts) in &report.per_state {
                    writeln!(out, "state {}:", state)?;
                    for c in conflicts {
                        writeln!(out, "  conflict {}", c)?;
                    }
                }
            }
            Ok(())
        }
        Cmd::Cover {
            input,
            action_set,
            state,
        } => {
            let desc = input.load(keying)?;
            let action = parse_action_arg(&action_set)?;
            let s = parse_state_arg(&desc, &state)?;
            let oracle = TransitionOracle::with_cap(&desc, cap);
            if !oracle.contains_state(&s)? {
                return Err(CliError::Domain(format!("{} is not a state", s)));
            }
            let laws = covered_laws(&desc, &action, &s);
            writeln!(
                out,
                "{} covered dynamic law(s) for {} at {}",
                laws.len(),
                action,
                s
            )?;
            for law in laws {
                writeln!(out, "  {}   % group {}", law, law.id.group)?;
            }
            Ok(())
        }
        Cmd::Resolve {
            input,
            conflict,
            state,
            target,
            json,
        } => {
            let desc = input.load(keying)?;
            let action = parse_action_arg(&conflict)?;
            let s = parse_state_arg(&desc, &state)?;
            let t = parse_state_arg(&desc, &target)?;
            let opts = CheckOptions {
                keying,
                candidate_cap: cap,
                ..CheckOptions::default()
            };
            let res = auto_resolve(&desc, &action, &s, &t, &opts)?;
            if json {
                writeln!(out, "{}", res.to_json())?;
            } else {
                write!(out, "{}", res.render_bc())?;
                let d: Vec<String> = res.d.iter().map(|l| l.to_string()).collect();
                writeln!(out, "% d = {{{}}}", d.join(", "))?;
                writeln!(
                    out,
                    "% verified transition: {} --{}--> {}",
                    res.verified.from, res.verified.action, res.verified.to
                )?;
            }
            Ok(())
        }
        Cmd::Verify {
            input,
            lemma,
            seed,
            random,
            max_pairs,
        } => {
            let desc = input.load(keying)?;
            let opts = CheckOptions {
                keying,
                seed,
                max_pairs,
                candidate_cap: cap,
                ..CheckOptions::default()
            };
            let check = match lemma.as_str() {
                "1" | "conflict-preservation" => check_conflict_preservation,
                "2" | "covered-laws" => check_covered_law_sufficiency,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown suite `{}`; use 1|conflict-preservation or 2|covered-laws",
                        other
                    )))
                }
            };
            let mut failed = false;
            let report = check(&desc, &opts)?;
            write!(out, "{}", report)?;
            failed |= !report.holds();
            for i in 0..random {
                let rdesc = random_description(seed.wrapping_add(i), &DescConfig::default());
                let r = check(&rdesc, &opts)?;
                writeln!(
                    out,
                    "random #{} (seed {}): {} case(s), {} counterexample(s)",
                    i,
                    seed.wrapping_add(i),
                    r.cases,
                    r.counterexamples.len()
                )?;
                for ce in &r.counterexamples {
                    writeln!(out, "  counterexample: {}", ce)?;
                }
                failed |= !r.holds();
            }
            if failed {
                return Err(CliError::Domain(
                    "verification found counterexamples".into(),
                ));
            }
            Ok(())
        }
    }
}

fn class_name(class: FluentClass) -> &'static str {
    match class {
        FluentClass::User => "user",
        FluentClass::Fresh => "generated",
        FluentClass::AbStatic => "ab",
        FluentClass::AbDynamic => "ab'",
    }
}

fn render_description(desc: &ActionDescription, stats: Option<&GroundingStats>) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "% ground description: {} fluent(s), {} action(s), {} static(s), {} dynamic(s)",
        desc.signature.fluents.len(),
        desc.signature.actions.len(),
        desc.statics.len(),
        desc.dynamics.len()
    );
    if let Some(stats) = stats {
        let _ = writeln!(
            out,
            "% grounding: {} schematic law(s) in, {} ground law(s) out, {} instance(s) eliminated by side conditions",
            stats.schematic_laws, stats.ground_laws, stats.eliminated
        );
    }
    for (atom, info) in &desc.signature.fluents {
        let kind = match info.kind {
            FluentKind::Regular => "regular",
            FluentKind::Defined => "defined",
        };
        let _ = writeln!(
            out,
            "fluent {} : {}.   % {}",
            atom,
            kind,
            class_name(info.class)
        );
    }
    for (atom, info) in &desc.signature.actions {
        match &info.agent {
            Some(agent) => {
                let _ = writeln!(out, "action {} agent {}.", atom, agent);
            }
            None => {
                let _ = writeln!(out, "action {}.", atom);
            }
        }
    }
    for law in &desc.statics {
        let _ = writeln!(out, "{}   % group {}", law, law.id.group);
    }
    for law in &desc.dynamics {
        let _ = writeln!(out, "{}   % group {}", law, law.id.group);
    }
    out
}

fn description_json(desc: &ActionDescription, stats: Option<&GroundingStats>) -> String {
    use serde::Serialize;
    #[derive(Serialize)]
    struct FluentDto {
        atom: String,
        kind: String,
        class: String,
    }
    #[derive(Serialize)]
    struct ActionDto {
        atom: String,
        agent: Option<String>,
    }
    #[derive(Serialize)]
    struct StatsDto {
        schematic_laws: usize,
        ground_laws: usize,
        eliminated: usize,
    }
    #[derive(Serialize)]
    struct Dto {
        fluents: Vec<FluentDto>,
        actions: Vec<ActionDto>,
        statics: Vec<String>,
        dynamics: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        grounding: Option<StatsDto>,
    }
    let dto = Dto {
        fluents: desc
            .signature
            .fluents
            .iter()
            .map(|(atom, info)| FluentDto {
                atom: atom.to_string(),
                kind: match info.kind {
                    FluentKind::Regular => "regular".into(),
                    FluentKind::Defined => "defined".into(),
                },
                class: class_name(info.class).into(),
            })
            .collect(),
        actions: desc
            .signature
            .actions
            .iter()
            .map(|(atom, info)| ActionDto {
                atom: atom.to_string(),
                agent: info.agent.clone(),
            })
            .collect(),
        statics: desc.statics.iter().map(|l| l.to_string()).collect(),
        dynamics: desc.dynamics.iter().map(|l| l.to_string()).collect(),
        grounding: stats.map(|s| StatsDto {
            schematic_laws: s.schematic_laws,
            ground_laws: s.ground_laws,
            eliminated: s.eliminated,
        }),
    };
    serde_json::to_string_pretty(&dto).expect("description serialization cannot fail")
}
