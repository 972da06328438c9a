//! Command-line front end: unfold models into complete finite prefixes,
//! verify the box abstraction against brute force, list reachable states,
//! and print model dimensions.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource
//! limit.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use prnet::constraints::{ConstraintSet, MinmaxSkip};
use prnet::io::{emit_dot, parse_model, ModelFile, Report};
use prnet::model::Prn;
use prnet::oracle::{
    self, ConstraintSpec, InstanceSpec, OracleError, Verdict, DEFAULT_ENUMERATION_LIMIT,
};
use prnet::prefix::{build_cfp, reachable_states, Outcome, Prefix, PrefixOptions};

#[derive(Parser)]
#[command(name = "prnet", version, about = "Parametric regulatory network analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the complete finite prefix of a model's unfolding.
    Unfold {
        model: PathBuf,
        /// Write the prefix as a DOT graph.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        /// Write the run report as JSON.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
        /// Stop after inserting this many events.
        #[arg(long, value_name = "N")]
        max_events: Option<usize>,
        /// Ignore the model's influence constraints.
        #[arg(long)]
        no_constraints: bool,
        /// Include wall-clock runtime in reports. Off by default so that
        /// repeated runs produce byte-identical output.
        #[arg(long)]
        timing: bool,
    },
    /// Check the abstraction against brute-force enumeration.
    Verify {
        /// Model file to verify (omit with --random).
        #[arg(required_unless_present = "random")]
        model: Option<PathBuf>,
        /// Verify randomized instances derived from this seed instead.
        #[arg(long, value_name = "SEED", conflicts_with = "model")]
        random: Option<u64>,
        /// Number of randomized trials.
        #[arg(long, value_name = "K", default_value_t = 100, requires = "random")]
        trials: usize,
    },
    /// Print every state reachable under some admissible parametrisation.
    Reach { model: PathBuf },
    /// Print model dimensions.
    Info { model: PathBuf },
}

/// A failed run: message for stderr plus process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<OracleError> for Failure {
    fn from(err: OracleError) -> Self {
        Failure { code: 3, message: err.to_string() }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Unfold { model, dot, json, max_events, no_constraints, timing } => {
            cmd_unfold(&model, dot, json, max_events, no_constraints, timing)
        }
        Command::Verify { model: Some(path), .. } => cmd_verify_model(&path),
        Command::Verify { random: Some(seed), trials, .. } => cmd_verify_random(seed, trials),
        Command::Verify { .. } => unreachable!("clap enforces model xor --random"),
        Command::Reach { model } => cmd_reach(&model),
        Command::Info { model } => cmd_info(&model),
    }
}

fn load_model(path: &Path) -> Result<ModelFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let model =
        parse_model(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    warn_about(&model);
    Ok(model)
}

/// Prints model-quality warnings to stderr.
fn warn_about(model: &ModelFile) {
    let prn = &model.prn;
    for v in prn.oversized_domains() {
        eprintln!(
            "warning: node `{}` has maximum level {} but only {} outgoing influences; \
             the extra levels are indistinguishable",
            prn.graph().name(v),
            prn.max_of(v),
            prn.graph().targets(v).len()
        );
    }
    for skip in model.constraints.minmax_skipped(prn) {
        match skip {
            MinmaxSkip::NoRegulators(v) => eprintln!(
                "warning: min-max rule skips node `{}`: it has no regulators",
                prn.graph().name(v)
            ),
            MinmaxSkip::UnsignedRegulator { node, regulator } => eprintln!(
                "warning: min-max rule skips node `{}`: regulator `{}` carries no sign",
                prn.graph().name(node),
                prn.graph().name(regulator)
            ),
        }
    }
}

fn model_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn write_output(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn cmd_unfold(
    path: &Path,
    dot: Option<PathBuf>,
    json: Option<PathBuf>,
    max_events: Option<usize>,
    no_constraints: bool,
    timing: bool,
) -> Result<ExitCode, Failure> {
    let mut model = load_model(path)?;
    if no_constraints {
        model.constraints = ConstraintSet::empty(&model.prn);
    }
    let options = PrefixOptions { max_events };
    let started = Instant::now();
    let prefix = build_cfp(&model.prn, &model.constraints, &model.init, &options);
    let elapsed = started.elapsed();

    let mut report = Report::new(model_name(path), &model.prn, &prefix.stats());
    if timing {
        report.runtime_ms = Some(elapsed.as_millis() as u64);
    }
    if let Some(target) = dot {
        write_output(&target, &emit_dot(&prefix, &model.prn))?;
    }
    if let Some(target) = json {
        write_output(&target, &format!("{}\n", report.to_json()))?;
    }
    print!("{}", report.to_text());

    if prefix.outcome == Outcome::EventLimit {
        eprintln!("warning: event limit reached, the prefix is truncated");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reach(path: &Path) -> Result<ExitCode, Failure> {
    let model = load_model(path)?;
    let prefix = build_cfp(
        &model.prn,
        &model.constraints,
        &model.init,
        &PrefixOptions::default(),
    );
    for state in reachable_states(&prefix, &model.prn, &model.constraints) {
        println!("{state}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_info(path: &Path) -> Result<ExitCode, Failure> {
    let model = load_model(path)?;
    let prn = &model.prn;
    println!("nodes             {}", prn.node_count());
    println!("coordinates       {}", prn.param_count());
    println!("states            {}", prn.state_count());
    println!("parametrisations  {}", prn.parametrisation_count());
    println!("constraints       {}", model.constraints.iter().count());
    println!(
        "minmax            {}",
        if model.constraints.minmax_enabled() { "on" } else { "off" }
    );
    Ok(ExitCode::SUCCESS)
}

/// One named pass/fail check within `verify`.
struct Check {
    name: &'static str,
    verdict: Verdict,
}

fn report_checks(checks: &[Check]) -> ExitCode {
    let mut failed = 0usize;
    for check in checks {
        match &check.verdict {
            Verdict::Holds => println!("ok   {}", check.name),
            Verdict::Fails(reason) => {
                failed += 1;
                println!("FAIL {}: {reason}", check.name);
            }
        }
    }
    println!("{} checks passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

/// Checks that each single transition's unconstrained enabling box is exact,
/// across every state of the model.
fn verdict_single_transitions(prn: &Prn, limit: u128) -> Result<Verdict, OracleError> {
    for state in prn.states() {
        for t in prn.all_transitions(&state) {
            if let v @ Verdict::Fails(_) = oracle::check_exact_enabling(prn, &[t], limit)? {
                return Ok(v);
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Checks the prefix-derived reachable set against the brute-force union:
/// equality without Min-Max, coverage (prefix ⊇ brute force) with it.
fn verdict_prefix_reachability(
    prn: &Prn,
    rset: &ConstraintSet,
    prefix: &Prefix,
    limit: u128,
) -> Result<Verdict, OracleError> {
    let exact = oracle::reachable_union(prn, rset, &prefix.x0, limit)?;
    let from_prefix = reachable_states(prefix, prn, rset);
    let agrees = if rset.minmax_enabled() {
        from_prefix.is_superset(&exact)
    } else {
        from_prefix == exact
    };
    if agrees {
        Ok(Verdict::Holds)
    } else {
        Ok(Verdict::Fails(format!(
            "prefix reaches {} states, brute force {}",
            from_prefix.len(),
            exact.len()
        )))
    }
}

fn cmd_verify_model(path: &Path) -> Result<ExitCode, Failure> {
    let model = load_model(path)?;
    let prn = &model.prn;
    let rset = &model.constraints;
    let limit = DEFAULT_ENUMERATION_LIMIT;

    let box_check = if rset.minmax_enabled() {
        Check {
            name: "constraint box contains every admissible parametrisation",
            verdict: oracle::check_sound_enabling(prn, rset, &[], limit)?,
        }
    } else {
        Check {
            name: "constraint box is the tightest convex sublattice",
            verdict: oracle::check_tightest_enabling(prn, rset, &[], limit)?,
        }
    };
    let prefix = build_cfp(prn, rset, &model.init, &PrefixOptions::default());
    let checks = [
        box_check,
        Check {
            name: "enabling boxes are exact on all single transitions",
            verdict: verdict_single_transitions(prn, limit)?,
        },
        Check {
            name: "prefix reachability matches brute force",
            verdict: verdict_prefix_reachability(prn, rset, &prefix, limit)?,
        },
    ];
    Ok(report_checks(&checks))
}

fn cmd_verify_random(seed: u64, trials: usize) -> Result<ExitCode, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ispec = InstanceSpec::default();
    let cspec = ConstraintSpec::default();
    let limit = DEFAULT_ENUMERATION_LIMIT;
    let mut failed = 0usize;

    for trial in 0..trials {
        let prn = oracle::random_prn(&mut rng, &ispec);
        let rset = oracle::random_constraints(&mut rng, &prn, &cspec);
        let ts = oracle::random_transitions(&mut rng, &prn, 3);
        let x0 = oracle::random_state(&mut rng, &prn);
        let prefix = build_cfp(&prn, &rset, &x0, &PrefixOptions::default());

        let verdicts = [
            oracle::check_exact_enabling(&prn, &ts, limit)?,
            oracle::check_tightest_enabling(&prn, &rset, &ts, limit)?,
            verdict_prefix_reachability(&prn, &rset, &prefix, limit)?,
        ];
        match verdicts.iter().find_map(|v| match v {
            Verdict::Fails(reason) => Some(reason.clone()),
            Verdict::Holds => None,
        }) {
            None => println!("trial {trial:4}: ok"),
            Some(reason) => {
                failed += 1;
                println!("trial {trial:4}: FAIL {reason}");
            }
        }
    }
    println!("{} trials passed, {failed} failed", trials - failed);
    if failed > 0 {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}
