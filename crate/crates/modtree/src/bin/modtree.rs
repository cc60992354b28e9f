//! Command-line front end: parse tree-spec documents, dispatch the library
//! computations, and emit either aligned tables or schema-versioned JSON
//! reports.
//!
//! Exit codes: 0 on success, 2 when a classification is inconclusive, 1 on
//! input or computation errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use modtree::analytic::{
    mod_p_infinite, mod_p_truncated, Classification, ModulusOutcome,
};
use modtree::critical::{
    classify_walk, construct_tree_with_pc, estimate_pc, pc_walk_rule, skip_to_spec, SkipSequence,
};
use modtree::dual::{lower_bound, uniform_flow};
use modtree::error::ModtreeError;
use modtree::report::Report;
use modtree::schema::{parse_tree_file, TreeDocument, TreeFile};
use modtree::solver::{solve_finite_modulus, SolveOptions};
use modtree::tree::{FiniteTree, RadialTreeSpec, DEFAULT_EDGE_CAP};
use modtree::walk::{predicted_escape, simulate_escape, WalkConfig};

#[derive(Parser)]
#[command(name = "modtree", version, about = "p-modulus of descending-path families on rooted trees")]
struct Cli {
    /// Emit the report as JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Modulus of a radially symmetric tree (infinite, or truncated at depth n).
    Modulus {
        file: PathBuf,
        #[arg(short, long)]
        p: f64,
        /// Depth of the truncation; omit for the infinite family.
        #[arg(long)]
        truncate: Option<usize>,
    },
    /// Truncated modulus for every depth n = 1..n_max.
    Sweep {
        file: PathBuf,
        #[arg(short, long)]
        p: f64,
        #[arg(long)]
        n_max: usize,
    },
    /// Critical exponent of a skip-sequence (1-2) tree.
    Critical {
        /// Skip-sequence document (kind "skip"), or a radial document whose
        /// children rule is a skip sequence.
        file: Option<PathBuf>,
        /// Instead of a file, use the construction with critical exponent r.
        #[arg(long, conflicts_with = "file")]
        construct_r: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        resolution: f64,
    },
    /// Certified lower bound from the uniform unit flow on a truncation.
    DualBound {
        file: PathBuf,
        #[arg(short, long)]
        p: f64,
        #[arg(short)]
        n: usize,
    },
    /// Numeric modulus of an explicit finite tree.
    Solve {
        file: PathBuf,
        #[arg(short, long)]
        p: f64,
    },
    /// Monte-Carlo escape probability versus the conductance prediction.
    Walk {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        walks: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Validate a tree-spec document.
    Validate { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let name = command_name(&cli.command);
    let (inputs, result) = dispatch(&cli.command);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(outcome) => {
            let inconclusive = outcome
                .get("classification")
                .and_then(|c| c.get("kind"))
                .is_some_and(|k| k == "inconclusive");
            let report = Report::new(name, inputs, outcome, elapsed);
            print_report(&report, cli.json);
            if inconclusive {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            let report = Report::failure(name, inputs, err.to_string(), elapsed);
            print_report(&report, cli.json);
            ExitCode::FAILURE
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Modulus { .. } => "modulus",
        Command::Sweep { .. } => "sweep",
        Command::Critical { .. } => "critical",
        Command::DualBound { .. } => "dual-bound",
        Command::Solve { .. } => "solve",
        Command::Walk { .. } => "walk",
        Command::Validate { .. } => "validate",
    }
}

fn edge_cap() -> u64 {
    std::env::var("MODTREE_MAX_EDGES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_EDGE_CAP)
}

fn load_spec(path: &PathBuf) -> Result<RadialTreeSpec, ModtreeError> {
    read_file(path)?.to_spec()
}

fn load_finite(path: &PathBuf) -> Result<FiniteTree, ModtreeError> {
    read_file(path)?.to_finite()
}

fn read_file(path: &PathBuf) -> Result<TreeFile, ModtreeError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ModtreeError::Schema(format!("{}: {e}", path.display())))?;
    parse_tree_file(&text)
}

fn truncate(spec: &RadialTreeSpec, n: usize) -> Result<FiniteTree, ModtreeError> {
    spec.truncate_capped(n, edge_cap())
}

fn dispatch(cmd: &Command) -> (Value, Result<Value, ModtreeError>) {
    match cmd {
        Command::Modulus { file, p, truncate: n } => {
            let inputs = json!({ "file": file.display().to_string(), "p": p, "truncate": n });
            let result = (|| {
                let spec = load_spec(file)?;
                match n {
                    Some(n) => {
                        let (value, density) = mod_p_truncated(&spec, *p, *n)?;
                        Ok(json!({
                            "classification": { "kind": "positive", "value": value },
                            "value": value,
                            "density": density.0,
                        }))
                    }
                    None => Ok(outcome_json(&mod_p_infinite(&spec, *p)?)),
                }
            })();
            (inputs, result)
        }
        Command::Sweep { file, p, n_max } => {
            let inputs = json!({ "file": file.display().to_string(), "p": p, "n_max": n_max });
            let result = (|| {
                let spec = load_spec(file)?;
                let mut values = Vec::with_capacity(*n_max);
                for n in 1..=*n_max {
                    values.push(mod_p_truncated(&spec, *p, n)?.0);
                }
                Ok(json!({ "values": values }))
            })();
            (inputs, result)
        }
        Command::Critical { file, construct_r, resolution } => {
            let inputs = json!({
                "file": file.as_ref().map(|f| f.display().to_string()),
                "construct_r": construct_r,
                "resolution": resolution,
            });
            let result = (|| {
                let skip: SkipSequence = match (file, construct_r) {
                    (Some(path), None) => {
                        let doc = read_file(path)?;
                        match &doc.document {
                            TreeDocument::Skip { skip } => skip.clone(),
                            TreeDocument::Radial { .. } => match doc.to_spec()?.children {
                                modtree::tree::ChildrenRule::Skip { skip } => skip,
                                _ => {
                                    return Err(ModtreeError::Schema(
                                        "critical requires a skip-sequence tree".into(),
                                    ))
                                }
                            },
                            TreeDocument::Finite { .. } => {
                                return Err(ModtreeError::Schema(
                                    "critical requires a skip-sequence tree".into(),
                                ))
                            }
                        }
                    }
                    (None, Some(r)) => construct_tree_with_pc(*r)?,
                    _ => {
                        return Err(ModtreeError::Schema(
                            "critical needs exactly one of a file or --construct-r".into(),
                        ))
                    }
                };
                let estimate = estimate_pc(&skip, *resolution)?;
                let walk = pc_walk_rule(&estimate);
                Ok(json!({
                    "p_lo": estimate.p_lo,
                    "p_hi": estimate.p_hi,
                    "estimate": estimate.estimate,
                    "pc_is_one": estimate.pc_is_one,
                    "pc_is_infinite": estimate.pc_is_infinite,
                    "trace": estimate.trace,
                    "walk": walk,
                }))
            })();
            (inputs, result)
        }
        Command::DualBound { file, p, n } => {
            let inputs = json!({ "file": file.display().to_string(), "p": p, "n": n });
            let result = (|| {
                let spec = load_spec(file)?;
                let tree = truncate(&spec, *n)?;
                let flow = uniform_flow(&tree);
                let bound = lower_bound(&tree, &flow, *p)?;
                let (truncated, _) = mod_p_truncated(&spec, *p, *n)?;
                Ok(json!({ "lower_bound": bound, "truncated_modulus": truncated }))
            })();
            (inputs, result)
        }
        Command::Solve { file, p } => {
            let inputs = json!({ "file": file.display().to_string(), "p": p });
            let result = (|| {
                let tree = load_finite(file)?;
                let report = solve_finite_modulus(&tree, &SolveOptions::new(*p))?;
                Ok(json!({
                    "value": report.value,
                    "iterations": report.iterations,
                    "max_violation": report.max_violation,
                    "lower_bound": report.lower_bound,
                    "converged": report.converged,
                    "canonical_density": report.canonical_density,
                    "density": report.density.0,
                }))
            })();
            (inputs, result)
        }
        Command::Walk { file, depth, walks, seed } => {
            let inputs = json!({
                "file": file.display().to_string(),
                "depth": depth, "walks": walks, "seed": seed,
            });
            let result = (|| {
                let spec = load_spec(file)?;
                let stats = simulate_escape(&WalkConfig {
                    spec: spec.clone(),
                    depth: *depth,
                    walks: *walks,
                    seed: *seed,
                })?;
                let predicted = predicted_escape(&spec, Some(*depth))?;
                Ok(json!({
                    "escape": stats.escape,
                    "half_width": stats.half_width,
                    "predicted": predicted,
                    "walks": stats.walks,
                    "depth": stats.depth,
                    "seed": stats.seed,
                }))
            })();
            (inputs, result)
        }
        Command::Validate { file } => {
            let inputs = json!({ "file": file.display().to_string() });
            let result = (|| {
                let doc = read_file(file)?;
                match &doc.document {
                    TreeDocument::Radial { .. } => {
                        let spec = doc.to_spec()?;
                        let transience = classify_walk(&spec).ok();
                        Ok(json!({
                            "valid": true, "kind": "radial",
                            "transience": transience,
                        }))
                    }
                    TreeDocument::Finite { .. } => {
                        let tree = doc.to_finite()?;
                        Ok(json!({
                            "valid": true, "kind": "finite",
                            "edges": tree.edge_count(), "depth": tree.depth(),
                            "leaves": tree.leaves().len(),
                        }))
                    }
                    TreeDocument::Skip { .. } => {
                        let skip = doc.to_skip()?;
                        let spec = skip_to_spec(&skip);
                        let transience = classify_walk(&spec).ok();
                        Ok(json!({
                            "valid": true, "kind": "skip",
                            "transience": transience,
                        }))
                    }
                }
            })();
            (inputs, result)
        }
    }
}

fn outcome_json(outcome: &ModulusOutcome) -> Value {
    let mut doc = json!({
        "classification": outcome.classification,
        "diagnostics": {
            "terms_summed": outcome.diagnostics.terms_summed,
            "tail_bound": outcome.diagnostics.tail_bound,
            "trace": outcome.diagnostics.trace,
        },
    });
    if let Classification::Positive { value } = outcome.classification {
        doc["value"] = json!(value);
    }
    if let Some(density) = &outcome.optimal_density {
        doc["density"] = json!(density.0);
    }
    doc
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

fn print_report(report: &Report, as_json: bool) {
    if as_json {
        println!("{}", report.to_json());
        return;
    }
    println!("{:<18} {}", "command", report.command);
    if let Some(err) = &report.error {
        println!("{:<18} {err}", "error");
    } else {
        print_value("", &report.outcome);
    }
    println!("{:<18} {:.3} ms", "wall time", report.wall_time_ms);
}

/// Flatten the outcome into aligned `key value` rows; numbers rounded to 6
/// significant digits, long arrays elided.
fn print_value(prefix: &str, value: &Value) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                print_value(&key, v);
            }
        }
        Value::Array(items) => {
            let shown: Vec<String> = items.iter().take(64).map(render_scalar).collect();
            let suffix = if items.len() > 64 {
                format!(" … ({} entries)", items.len())
            } else {
                String::new()
            };
            println!("{prefix:<18} [{}]{suffix}", shown.join(", "));
        }
        other => println!("{prefix:<18} {}", render_scalar(other)),
    }
}

fn render_scalar(value: &Value) -> String {
    match value {
        Value::Number(n) => match n.as_f64() {
            Some(f) if f.fract() != 0.0 || f.abs() >= 1e15 => sig6(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Six significant digits, falling back to scientific notation when the
/// magnitude would make fixed-point unreadable.
fn sig6(f: f64) -> String {
    if f == 0.0 || !f.is_finite() {
        return format!("{f}");
    }
    let mag = f.abs().log10().floor() as i32;
    if (-4..=8).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{f:.decimals$}")
    } else {
        format!("{f:.5e}")
    }
}
