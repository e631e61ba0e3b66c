//! The `fdetect` command line.
//!
//! Every subcommand writes one report: a JSON object
//!
//! ```text
//! {tool_version, command, inputs: {group, chars, set, k, seed, tolerances},
//!  results, summary, timestamp}
//! ```
//!
//! or, with `--format csv`, a header row followed by one row per trial, step
//! or result. Exit status is 0 on success, 1 on invalid input and 2 when a
//! numerical guarantee was not reached.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::experiments::{self, McConfig, SampleMode, SweepInstance, TOOL_VERSION};
use crate::group::{fourier_basis, load_flat_basis, FlatBasis, Group, FLATNESS_TOL, UNITARITY_TOL};
use crate::rng;
use crate::sparsifier::{
    binomial, brute_force_best_with_cap, build_frame, evaluate_twosided, select_onesided_with, Objective, SelectOptions,
    DEFAULT_ENUMERATION_CAP, DEFAULT_FEASIBILITY_TOL,
};
use crate::subspaces::{
    check_uncertainty_with, comb_example, exchange_complement, overlap_norm, single_vector_detection, stacked_sigma_min,
    FourierSubspace, StandardSubspace, DEFAULT_INTERSECTION_THRESHOLD,
};

#[derive(Parser, Debug)]
#[command(name = "fdetect", version, about = "Detect Fourier subspaces with standard subspaces on finite abelian groups")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Largest number of subsets an exhaustive search may visit.
    #[arg(long, global = true, env = "FDETECT_ENUM_CAP", default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub enum_cap: u64,

    /// Overlap norms above 1 - threshold count as intersections.
    #[arg(long, global = true, default_value_t = DEFAULT_INTERSECTION_THRESHOLD)]
    pub threshold: f64,

    /// Barrier condition values up to 1 + tol are admissible.
    #[arg(long, global = true, default_value_t = DEFAULT_FEASIBILITY_TOL)]
    pub feasibility_tol: f64,

    /// Use a flat basis loaded from this file instead of a group's characters.
    #[arg(long, global = true)]
    pub basis: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Unitarity and flatness of a group's Fourier basis or a loaded basis.
    BasisCheck {
        #[arg(long)]
        group: Option<String>,
    },
    /// Uncertainty-principle verdicts for one pair or a scan.
    Uncertainty(UncertaintyArgs),
    /// The comb on Z/n²: n-dimensional standard and Fourier subspaces that meet.
    Comb {
        #[arg(long)]
        n: usize,
    },
    /// Standard complement of a Fourier subspace.
    Exchange {
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        chars: String,
    },
    /// Detection of a single basis vector, or overlap with a Fourier subspace.
    Detect {
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        set: String,
        #[arg(long = "char")]
        character: Option<usize>,
        #[arg(long)]
        chars: Option<String>,
    },
    /// Barrier-potential selection of k standard vectors.
    Select {
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        chars: String,
        #[arg(long)]
        k: usize,
    },
    /// Both-sided evaluation, exact when the enumeration fits under the cap.
    Twosided {
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        chars: String,
        #[arg(long)]
        k: usize,
        /// Evaluate the greedy one-sided selection even when enumeration fits.
        #[arg(long)]
        heuristic: bool,
    },
    /// Monte Carlo intersection frequency on Z/n² × Z/N.
    McIntersect {
        #[arg(long)]
        n: usize,
        #[arg(long = "N", visible_alias = "big-n")]
        big_n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Dimension of the random standard subspaces (default |G|/n).
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Excess of the barrier selection over k/n across a family of groups.
    SweepEps {
        /// Comma-separated groups, e.g. "16,32,4x16".
        #[arg(long)]
        groups: String,
        /// Fourier dimension per group (one value applies to all).
        #[arg(long)]
        dims: String,
        #[arg(long, default_value_t = 0.5)]
        k_fraction: f64,
    },
    /// Split into halves and compare both norms with 1/√2.
    HalfSplit {
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        chars: String,
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Args, Debug)]
pub struct UncertaintyArgs {
    #[arg(long)]
    group: Option<String>,
    /// Standard set for a single check.
    #[arg(long)]
    set: Option<String>,
    /// Fourier set for a single check.
    #[arg(long)]
    chars: Option<String>,
    /// Scan every pair with |S| + |T| ≤ max-sum.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    max_sum: Option<usize>,
    /// Sample random pairs obeying the given hypothesis.
    #[arg(long, value_enum)]
    sample: Option<SampleArg>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum SampleArg {
    Additive,
    Multiplicative,
}

/// Parses a set literal: `"0,3,12"`, `"random:k:seed"`, or `""`/`"none"` for
/// the empty set. Indices must lie below `bound`.
pub fn parse_set(literal: &str, bound: usize) -> Result<Vec<usize>> {
    let lit = literal.trim();
    if lit.is_empty() || lit.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    if let Some(rest) = lit.strip_prefix("random:") {
        let (k, seed) = rest
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("expected random:k:seed, got {lit:?}")))?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad size in {lit:?}")))?;
        let seed: u64 = seed
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad seed in {lit:?}")))?;
        if k > bound {
            return Err(Error::InvalidArgument(format!("random set size {k} exceeds {bound}")));
        }
        return Ok(rng::random_subset(&mut rng::seeded(seed), bound, k));
    }
    let mut out = lit
        .split(',')
        .map(|t| {
            let i: usize = t
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse index {t:?} in {lit:?}")))?;
            if i >= bound {
                return Err(Error::IndexOutOfRange {
                    what: "set",
                    index: i,
                    bound,
                });
            }
            Ok(i)
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_unstable();
    if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(format!("duplicate index {} in {lit:?}", w[0])));
    }
    Ok(out)
}

#[derive(Debug, Default, Serialize)]
struct Inputs {
    group: Option<String>,
    chars: Option<Vec<usize>>,
    set: Option<Vec<usize>>,
    k: Option<usize>,
    seed: u64,
    tolerances: Value,
}

/// What a subcommand produces before it is written out.
struct Outcome {
    inputs: Inputs,
    results: Value,
    summary: Value,
    /// CSV rows.
    rows: Vec<Value>,
}

impl Outcome {
    fn single(inputs: Inputs, results: Value, summary: Value) -> Self {
        let rows = vec![results.clone()];
        Self {
            inputs,
            results,
            summary,
            rows,
        }
    }
}

fn resolve_basis(group: Option<&str>, basis: Option<&Path>) -> Result<(Arc<FlatBasis>, String)> {
    match (group, basis) {
        (Some(_), Some(_)) => Err(Error::InvalidArgument("give either --group or --basis, not both".into())),
        (Some(g), None) => {
            let g = Group::parse(g)?;
            let label = g.to_string();
            Ok((Arc::new(fourier_basis(&g)), label))
        }
        (None, Some(p)) => Ok((Arc::new(load_flat_basis(p)?), p.display().to_string())),
        (None, None) => Err(Error::InvalidArgument("one of --group or --basis is required".into())),
    }
}

fn tolerances(g: &GlobalOpts) -> Value {
    json!({
        "threshold": g.threshold,
        "feasibility_tol": g.feasibility_tol,
        "enum_cap": g.enum_cap,
        "unitarity": UNITARITY_TOL,
        "flatness": FLATNESS_TOL,
    })
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn inputs(g: &GlobalOpts, group: Option<String>) -> Inputs {
    Inputs {
        group,
        seed: g.seed,
        tolerances: tolerances(g),
        ..Inputs::default()
    }
}

fn experiment_outcome(mut inputs: Inputs, report: experiments::ExperimentReport) -> Outcome {
    inputs.group = inputs.group.or_else(|| report.config.get("group").and_then(|g| g.as_str().map(String::from)));
    Outcome {
        inputs,
        results: json!({
            "experiment": report.experiment,
            "config": report.config,
            "environment": report.environment,
            "trials": report.trials,
        }),
        summary: to_value(&report.summary),
        rows: report.trials,
    }
}

fn execute(cmd: &Command, g: &GlobalOpts) -> Result<Outcome> {
    let opts = SelectOptions {
        feasibility_tol: g.feasibility_tol,
    };
    let basis_path = g.basis.as_deref();
    match cmd {
        Command::BasisCheck { group } => {
            let (basis, label) = resolve_basis(group.as_deref(), basis_path)?;
            let u = basis.unitarity_deviation();
            let f = basis.flatness_deviation();
            let results = json!({
                "dim": basis.dim(),
                "source": basis.source(),
                "unitarity_deviation": u.deviation,
                "unitarity_entry": [u.row, u.col],
                "flatness_deviation": f.deviation,
                "flatness_entry": [f.row, f.col],
                "unitary": u.deviation <= UNITARITY_TOL,
                "flat": f.deviation <= FLATNESS_TOL,
            });
            if u.deviation > UNITARITY_TOL || f.deviation > FLATNESS_TOL {
                return Err(Error::GuaranteeBreach(format!(
                    "basis deviations exceed tolerance (unitarity {:e}, flatness {:e})",
                    u.deviation, f.deviation
                )));
            }
            let summary = json!({"ok": true});
            Ok(Outcome::single(inputs(g, Some(label)), results, summary))
        }
        Command::Uncertainty(a) => uncertainty(a, g),
        Command::Comb { n } => {
            let c = comb_example(*n)?;
            let basis = c.basis();
            let e = StandardSubspace::new(c.group.order(), c.support.iter().copied())?;
            let f = FourierSubspace::new(basis, c.chars.iter().copied())?;
            let norm = overlap_norm(&e, &f)?;
            let support_values: Vec<f64> = c.support.iter().map(|&a| c.function[a].re).collect();
            let off_support = (0..c.group.order())
                .filter(|a| a % n != 0)
                .map(|a| c.function[a].norm())
                .fold(0.0, f64::max);
            let mut inp = inputs(g, Some(c.group.to_string()));
            inp.chars = Some(c.chars.clone());
            inp.set = Some(c.support.clone());
            let results = json!({
                "n": n,
                "support": c.support,
                "chars": c.chars,
                "support_values": support_values,
                "max_off_support": off_support,
                "overlap_norm": norm,
                "intersects": norm > 1.0 - g.threshold,
            });
            Ok(Outcome::single(inp, results, json!({"overlap_norm": norm})))
        }
        Command::Exchange { group, chars } => {
            let (basis, label) = resolve_basis(group.as_deref(), basis_path)?;
            let t = parse_set(chars, basis.dim())?;
            let f = FourierSubspace::new(basis, t.iter().copied())?;
            let e = exchange_complement(&f)?;
            let sigma = stacked_sigma_min(&f, &e)?;
            let mut inp = inputs(g, Some(label));
            inp.chars = Some(t);
            let results = json!({
                "set": e.indices(),
                "size": e.dim(),
                "sigma_min": sigma,
                "overlap_norm": overlap_norm(&e, &f)?,
            });
            Ok(Outcome::single(inp, results, json!({"size": e.dim(), "sigma_min": sigma})))
        }
        Command::Detect {
            group,
            set,
            character,
            chars,
        } => {
            let (basis, label) = resolve_basis(group.as_deref(), basis_path)?;
            let s = parse_set(set, basis.dim())?;
            let e = StandardSubspace::new(basis.dim(), s.iter().copied())?;
            if character.is_none() && chars.is_none() {
                return Err(Error::InvalidArgument("detect needs --char or --chars".into()));
            }
            let mut inp = inputs(g, Some(label));
            inp.set = Some(s);
            let mut results = Map::new();
            if let Some(phi) = character {
                let d = single_vector_detection(&e, &basis, *phi)?;
                results.insert("char".into(), json!(phi));
                results.insert("detection".into(), json!(d));
                results.insert("expected".into(), json!(e.dim() as f64 / basis.dim() as f64));
            }
            if let Some(c) = chars {
                let t = parse_set(c, basis.dim())?;
                let f = FourierSubspace::new(basis.clone(), t.iter().copied())?;
                let norm = overlap_norm(&e, &f)?;
                results.insert("overlap_norm".into(), json!(norm));
                results.insert("intersects".into(), json!(norm > 1.0 - g.threshold));
                inp.chars = Some(t);
            }
            let results = Value::Object(results);
            Ok(Outcome::single(inp, results.clone(), results))
        }
        Command::Select { group, chars, k } => {
            let (basis, label) = resolve_basis(group.as_deref(), basis_path)?;
            let t = parse_set(chars, basis.dim())?;
            let frame = build_frame(&FourierSubspace::new(basis, t.iter().copied())?)?;
            let r = select_onesided_with(&frame, *k, &opts)?;
            let mut inp = inputs(g, Some(label));
            inp.chars = Some(t);
            inp.k = Some(*k);
            let rows = r
                .steps
                .iter()
                .zip(r.potential_trace.iter().skip(1))
                .map(|(s, p)| {
                    json!({
                        "step": s.step,
                        "chosen": s.chosen,
                        "min_condition": s.min_condition,
                        "domination_margin": s.domination_margin,
                        "retried": s.retried,
                        "shift": p.shift,
                        "potential": p.potential,
                    })
                })
                .collect();
            let summary = json!({
                "achieved": r.achieved_one_sided,
                "bound": r.bound_one_sided,
                "within_bound": r.achieved_one_sided < r.bound_one_sided,
                "monotone": r.monotone,
                "excess": r.excess_one_sided(),
            });
            let results = json!({
                "set": r.set,
                "order": r.order,
                "achieved": r.achieved_one_sided,
                "bounds": {"one_sided": r.bound_one_sided, "complement_reference": r.bound_complement},
                "norms": {"qpq": r.achieved_one_sided, "q_complement_q": r.achieved_complement},
                "epsilon": r.epsilon,
                "m": r.m,
                "n": r.n,
                "potential_trace": r.potential_trace,
                "margins": {"feasibility": r.feasibility_margins, "domination": r.steps.iter().map(|s| s.domination_margin).collect::<Vec<_>>()},
                "steps": r.steps,
            });
            Ok(Outcome {
                inputs: inp,
                results,
                summary,
                rows,
            })
        }
        Command::Twosided {
            group,
            chars,
            k,
            heuristic,
        } => {
            let (basis, label) = resolve_basis(group.as_deref(), basis_path)?;
            let t = parse_set(chars, basis.dim())?;
            let frame = build_frame(&FourierSubspace::new(basis, t.iter().copied())?)?;
            let n = frame.len();
            if *k > n {
                return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
            }
            let fits = binomial(n, *k).is_some_and(|c| c <= g.enum_cap as u128);
            let (set, method) = if fits && !heuristic {
                (
                    brute_force_best_with_cap(&frame, *k, Objective::TwoSidedMaxExcess, g.enum_cap)?.set,
                    "oracle",
                )
            } else {
                (select_onesided_with(&frame, *k, &opts)?.set, "greedy-one-sided-heuristic")
            };
            let e = evaluate_twosided(&frame, &set)?;
            let sqrt_eps = frame.epsilon().sqrt();
            let c = e.max_excess.max(0.0) / sqrt_eps;
            let mut inp = inputs(g, Some(label));
            inp.chars = Some(t);
            inp.k = Some(*k);
            let results = json!({
                "method": method,
                "set": set,
                "norms": {"qpq": e.qpq_norm, "q_complement_q": e.complement_norm},
                "excess_one_sided": e.excess_one_sided,
                "excess_complement": e.excess_complement,
                "max_excess": e.max_excess,
                "identity_residual": e.identity_residual,
                "epsilon": frame.epsilon(),
                "measured_constant": c,
            });
            let summary = json!({"method": method, "max_excess": e.max_excess, "measured_constant": c});
            Ok(Outcome::single(inp, results, summary))
        }
        Command::McIntersect { n, big_n, trials, dim } => {
            let mut cfg = McConfig::new(*n, *big_n, *trials, g.seed);
            cfg.dim = *dim;
            cfg.threshold = g.threshold;
            let report = experiments::mc_intersection_with(&cfg)?;
            let mut inp = inputs(g, None);
            inp.chars = report.config["chars"].as_array().map(|a| a.iter().filter_map(|v| v.as_u64().map(|x| x as usize)).collect());
            Ok(experiment_outcome(inp, report))
        }
        Command::SweepEps { groups, dims, k_fraction } => {
            let groups = groups.split(',').map(|s| Group::parse(s.trim())).collect::<Result<Vec<_>>>()?;
            let dims = dims
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidArgument(format!("cannot parse dimension {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if dims.len() != 1 && dims.len() != groups.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} dimensions given for {} groups",
                    dims.len(),
                    groups.len()
                )));
            }
            let instances: Vec<SweepInstance> = groups
                .into_iter()
                .enumerate()
                .map(|(i, group)| SweepInstance {
                    group,
                    dim: dims[if dims.len() == 1 { 0 } else { i }],
                    chars: None,
                })
                .collect();
            let report = experiments::sweep_eps_constant(&instances, *k_fraction, g.seed, &opts)?;
            Ok(experiment_outcome(inputs(g, None), report))
        }
        Command::HalfSplit { group, chars, oracle } => {
            let (basis, label) = resolve_basis(group.as_deref(), basis_path)?;
            let t = parse_set(chars, basis.dim())?;
            let report = experiments::half_split(basis, &t, *oracle, g.seed, g.enum_cap, &opts)?;
            let mut inp = inputs(g, Some(label));
            inp.k = report.trials[0]["k"].as_u64().map(|k| k as usize);
            inp.chars = Some(t);
            Ok(experiment_outcome(inp, report))
        }
    }
}

fn uncertainty(a: &UncertaintyArgs, g: &GlobalOpts) -> Result<Outcome> {
    let (basis, label) = resolve_basis(a.group.as_deref(), g.basis.as_deref())?;
    let n = basis.dim();
    let inp = inputs(g, Some(label));
    let modes = usize::from(a.exhaustive) + usize::from(a.sample.is_some()) + usize::from(a.set.is_some() || a.chars.is_some());
    if modes != 1 {
        return Err(Error::InvalidArgument(
            "choose exactly one of --set/--chars, --exhaustive or --sample".into(),
        ));
    }
    if a.exhaustive {
        let report = experiments::uncertainty_exhaustive(basis, a.max_sum.unwrap_or(n), g.threshold, g.enum_cap)?;
        return Ok(experiment_outcome(inp, report));
    }
    if let Some(mode) = a.sample {
        let mode = match mode {
            SampleArg::Additive => SampleMode::Additive,
            SampleArg::Multiplicative => SampleMode::Multiplicative,
        };
        let report = experiments::uncertainty_sampled(basis, mode, a.trials, g.seed, g.threshold)?;
        return Ok(experiment_outcome(inp, report));
    }
    let (Some(set), Some(chars)) = (&a.set, &a.chars) else {
        return Err(Error::InvalidArgument("a single check needs both --set and --chars".into()));
    };
    let s = parse_set(set, n)?;
    let t = parse_set(chars, n)?;
    let e = StandardSubspace::new(n, s.iter().copied())?;
    let f = FourierSubspace::new(basis, t.iter().copied())?;
    let v = check_uncertainty_with(&e, &f, g.threshold)?;
    let mut inp = inp;
    inp.set = Some(s);
    inp.chars = Some(t);
    let mut results = to_value(v);
    results["violation"] = json!(v.is_violation());
    Ok(Outcome::single(inp, results.clone(), results))
}

fn report_json(command: &str, outcome: &Outcome, timestamp: &str) -> Value {
    json!({
        "tool_version": TOOL_VERSION,
        "command": command,
        "inputs": to_value(&outcome.inputs),
        "results": outcome.results,
        "summary": outcome.summary,
        "timestamp": timestamp,
    })
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(x) => match (x.as_i64(), x.as_u64()) {
            (Some(i), _) => i.to_string(),
            (None, Some(u)) => u.to_string(),
            _ => format!("{:.16e}", x.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => v.to_string(),
    }
}

/// Header from the first row's keys (sorted), one line per row.
pub fn render_csv(rows: &[Value]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = rows
        .first()
        .and_then(Value::as_object)
        .map(|o| o.keys().cloned().collect())
        .unwrap_or_default();
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        let cells: Vec<String> = header.iter().map(|k| csv_cell(row.get(k).unwrap_or(&Value::Null))).collect();
        w.write_record(&cells).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::BasisCheck { .. } => "basis-check",
        Command::Uncertainty(_) => "uncertainty",
        Command::Comb { .. } => "comb",
        Command::Exchange { .. } => "exchange",
        Command::Detect { .. } => "detect",
        Command::Select { .. } => "select",
        Command::Twosided { .. } => "twosided",
        Command::McIntersect { .. } => "mc-intersect",
        Command::SweepEps { .. } => "sweep-eps",
        Command::HalfSplit { .. } => "half-split",
    }
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn validate(g: &GlobalOpts) -> Result<()> {
    if !(g.feasibility_tol >= 0.0 && g.feasibility_tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "feasibility tolerance must be a non-negative number, got {}",
            g.feasibility_tol
        )));
    }
    if !(g.threshold > 0.0 && g.threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "intersection threshold must lie in (0, 1), got {}",
            g.threshold
        )));
    }
    if g.threads == Some(0) {
        return Err(Error::InvalidArgument("--threads must be at least 1".into()));
    }
    Ok(())
}

fn run_command(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let g = &cli.global;
    validate(g)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker threads: {e}")))?;
    let outcome = pool.install(|| execute(&cli.command, g))?;
    let text = match g.format {
        Format::Json => {
            let report = report_json(command_name(&cli.command), &outcome, &timestamp());
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.into()))?;
            s.push('\n');
            s
        }
        Format::Csv => render_csv(&outcome.rows)?,
    };
    emit(&text, g.output.as_deref(), out)
}

/// Parses `args` (including the program name) and runs the command, writing
/// the report to `out` and diagnostics to `err`. Returns the exit status.
pub fn run_to<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let text = e.render().to_string();
            if informational {
                let _ = out.write_all(text.as_bytes());
                return 0;
            }
            let _ = err.write_all(text.as_bytes());
            return 1;
        }
    };
    match run_command(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let Some(path) = &cli.global.output {
                let report = json!({
                    "tool_version": TOOL_VERSION,
                    "command": command_name(&cli.command),
                    "error": {"kind": e.kind(), "message": e.to_string()},
                    "timestamp": timestamp(),
                });
                let _ = std::fs::write(path, format!("{}\n", serde_json::to_string_pretty(&report).unwrap_or_default()));
            }
            exit_code(&e)
        }
    }
}

/// 2 for numerical-guarantee breaches, 1 for everything else.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_to(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
