//! Seeded experiment drivers producing [`ExperimentReport`]s.
//!
//! Every randomized trial `t` of a run seeded with `s` uses its own stream
//! seeded with `derive_seed(s, t)`, so trials can be replayed one at a time
//! and may run in parallel without changing the report.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{fourier_basis, FlatBasis, Group};
use crate::rng::{self, derive_seed};
use crate::sparsifier::{
    binomial, brute_force_best_with_cap, build_frame, evaluate_twosided, select_onesided_with, Objective, SelectOptions,
    DEFAULT_ENUMERATION_CAP,
};
use crate::subspaces::{
    check_uncertainty_with, overlap_norm, random_standard, FourierSubspace, StandardSubspace,
    DEFAULT_INTERSECTION_THRESHOLD,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Environment {
    pub tool_version: String,
    pub seed: Option<u64>,
}

/// Per-trial records plus a summary computed from them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: Value,
    pub trials: Vec<Value>,
    pub summary: BTreeMap<String, Value>,
    pub environment: Environment,
}

impl ExperimentReport {
    fn new(experiment: &str, config: Value, trials: Vec<Value>, seed: Option<u64>) -> Self {
        Self {
            experiment: experiment.to_string(),
            config,
            trials,
            summary: BTreeMap::new(),
            environment: Environment {
                tool_version: TOOL_VERSION.to_string(),
                seed,
            },
        }
    }

    fn put(&mut self, key: &str, value: impl Serialize) {
        self.summary
            .insert(key.to_string(), serde_json::to_value(value).expect("summary values serialize"));
    }

    /// Numeric column `key` across all trials, skipping missing entries.
    pub fn column(&self, key: &str) -> Vec<f64> {
        self.trials.iter().filter_map(|t| t.get(key)?.as_f64()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stats {
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub mean: f64,
}

/// Order statistics of a non-empty sample; the median of an even sample is
/// the mean of the two middle values.
pub fn stats(values: &[f64]) -> Option<Stats> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
    Some(Stats {
        min: v[0],
        median,
        max: v[n - 1],
        mean: v.iter().sum::<f64>() / n as f64,
    })
}

fn group_basis(group: &Group) -> Arc<FlatBasis> {
    Arc::new(fourier_basis(group))
}

/// Character indices `{(n b, c) : 0 ≤ b < n, 0 ≤ c < N}` of `Z/n² × Z/N`,
/// the span of `F ⊗ l²(Z/N)` with `F` the comb subspace of `Z/n²`.
pub fn tensor_comb_chars(n: usize, big_n: usize) -> Vec<usize> {
    (0..n)
        .flat_map(|b| (0..big_n).map(move |c| n * b * big_n + c))
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct McConfig {
    pub n: usize,
    pub big_n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Dimension of the random standard subspaces; `|G'|/n` when `None`.
    pub dim: Option<usize>,
    pub threshold: f64,
}

impl McConfig {
    pub fn new(n: usize, big_n: usize, trials: usize, seed: u64) -> Self {
        Self {
            n,
            big_n,
            trials,
            seed,
            dim: None,
            threshold: DEFAULT_INTERSECTION_THRESHOLD,
        }
    }
}

pub fn mc_intersection(n: usize, big_n: usize, trials: usize, seed: u64) -> Result<ExperimentReport> {
    mc_intersection_with(&McConfig::new(n, big_n, trials, seed))
}

/// Monte Carlo frequency of `E ∩ (F ⊗ l²(Z/N)) ≠ {0}` for random standard
/// subspaces `E` of `l²(Z/n² × Z/N)`.
pub fn mc_intersection_with(cfg: &McConfig) -> Result<ExperimentReport> {
    let (n, big_n) = (cfg.n, cfg.big_n);
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trial count must be at least 1".into()));
    }
    let n_sq = n
        .checked_mul(n)
        .ok_or_else(|| Error::InvalidArgument(format!("n = {n} is too large")))?;
    let group = Group::new(&[n_sq, big_n])?;
    let order = group.order();
    let dim = match cfg.dim {
        Some(d) if d > order => {
            return Err(Error::InvalidArgument(format!("dimension {d} exceeds |G'| = {order}")));
        }
        Some(d) => d,
        None => {
            if order % n != 0 {
                return Err(Error::InvalidArgument(format!("|G'| = {order} is not divisible by n = {n}")));
            }
            order / n
        }
    };
    let chars = tensor_comb_chars(n, big_n);
    let f = FourierSubspace::new(group_basis(&group), chars)?;
    let trials: Vec<Value> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.seed, t as u64);
            let e = random_standard(dim, seed, order)?;
            let norm = overlap_norm(&e, &f)?;
            Ok(json!({
                "trial": t,
                "seed": seed,
                "set": e.indices(),
                "overlap_norm": norm,
                "intersects": norm > 1.0 - cfg.threshold,
            }))
        })
        .collect::<Result<_>>()?;
    let hits = trials.iter().filter(|t| t["intersects"] == Value::Bool(true)).count();
    let freq = hits as f64 / cfg.trials as f64;
    let mut report = ExperimentReport::new(
        "mc-intersect",
        json!({
            "n": n,
            "N": big_n,
            "group": group.to_string(),
            "chars": f.indices(),
            "dim_e": dim,
            "dim_f": f.dim(),
            "trials": cfg.trials,
            "threshold": cfg.threshold,
        }),
        trials,
        Some(cfg.seed),
    );
    report.put("intersections", hits);
    report.put("frequency", freq);
    report.put("sigma", (freq * (1.0 - freq) / cfg.trials as f64).sqrt());
    report.put("overlap_norm", stats(&report.column("overlap_norm")));
    Ok(report)
}

/// One member of a `sweep_eps_constant` family.
#[derive(Clone, Debug)]
pub struct SweepInstance {
    pub group: Group,
    pub dim: usize,
    /// Explicit Fourier indices; drawn at random with the run seed when `None`.
    pub chars: Option<Vec<usize>>,
}

/// Runs the barrier selection on each instance with `k = ⌊k_fraction · n⌋`
/// and measures `‖QPQ‖ - k/n` against `√ε`.
pub fn sweep_eps_constant(
    instances: &[SweepInstance],
    k_fraction: f64,
    seed: u64,
    opts: &SelectOptions,
) -> Result<ExperimentReport> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument("empty instance family".into()));
    }
    if !(0.0..=1.0).contains(&k_fraction) {
        return Err(Error::InvalidArgument(format!("k fraction {k_fraction} is outside [0, 1]")));
    }
    let trials: Vec<Value> = instances
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            let n = inst.group.order();
            let trial_seed = derive_seed(seed, i as u64);
            let chars = match &inst.chars {
                Some(c) => c.clone(),
                None => {
                    if inst.dim > n {
                        return Err(Error::InvalidArgument(format!(
                            "dimension {} exceeds |G| = {n}",
                            inst.dim
                        )));
                    }
                    rng::random_subset(&mut rng::seeded(trial_seed), n, inst.dim)
                }
            };
            let f = FourierSubspace::new(group_basis(&inst.group), chars)?;
            let frame = build_frame(&f)?;
            let k = (k_fraction * n as f64).floor() as usize;
            let r = select_onesided_with(&frame, k, opts)?;
            let kn = k as f64 / n as f64;
            let excess = r.achieved_one_sided - kn;
            let sqrt_eps = r.epsilon.sqrt();
            Ok(json!({
                "trial": i,
                "seed": trial_seed,
                "group": inst.group.to_string(),
                "chars": f.indices(),
                "m": r.m,
                "n": n,
                "k": k,
                "epsilon": r.epsilon,
                "achieved": r.achieved_one_sided,
                "bound": r.bound_one_sided,
                "excess": excess,
                "bound_excess": r.bound_one_sided - kn,
                "ratio": excess / sqrt_eps,
                "within_bound": r.achieved_one_sided < r.bound_one_sided,
                "set": r.set,
            }))
        })
        .collect::<Result<_>>()?;
    let mut report = ExperimentReport::new(
        "sweep-eps",
        json!({
            "instances": instances.iter().map(|i| json!({"group": i.group.to_string(), "dim": i.dim})).collect::<Vec<_>>(),
            "k_fraction": k_fraction,
            "feasibility_tol": opts.feasibility_tol,
        }),
        trials,
        Some(seed),
    );
    let ratios = report.column("ratio");
    report.put("measured_constant", ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    report.put("excess", stats(&report.column("excess")));
    report.put("ratio", stats(&ratios));
    report.put(
        "all_within_bound",
        report.trials.iter().all(|t| t["within_bound"] == Value::Bool(true)),
    );
    Ok(report)
}

/// Splits the group into `S` and `G \ S` with `|S| = ⌊n/2⌋` and compares
/// `‖PQ‖`, `‖(I-P)Q‖` with `1/√2`.
///
/// With `use_oracle` the split minimizes the larger excess exactly;
/// otherwise it comes from the one-sided barrier selection.
pub fn half_split(
    basis: Arc<FlatBasis>,
    chars: &[usize],
    use_oracle: bool,
    seed: u64,
    cap: u64,
    opts: &SelectOptions,
) -> Result<ExperimentReport> {
    let f = FourierSubspace::new(basis.clone(), chars.iter().copied())?;
    let frame = build_frame(&f)?;
    let n = frame.len();
    let k = n / 2;
    let (set, method) = if use_oracle {
        let count = binomial(n, k).unwrap_or(u128::MAX);
        if count > cap as u128 {
            return Err(Error::EnumerationCapExceeded { count, cap });
        }
        (
            brute_force_best_with_cap(&frame, k, Objective::TwoSidedMaxExcess, cap)?.set,
            "oracle",
        )
    } else {
        (select_onesided_with(&frame, k, opts)?.set, "greedy")
    };
    let eval = evaluate_twosided(&frame, &set)?;
    let sqrt_eps = frame.epsilon().sqrt();
    let half = 0.5f64.sqrt();
    let pq = eval.qpq_norm.sqrt();
    let iq = eval.complement_norm.sqrt();
    let dev_pq = (pq - half).abs();
    let dev_iq = (iq - half).abs();
    let trial = json!({
        "trial": 0,
        "method": method,
        "k": k,
        "n": n,
        "m": frame.dim(),
        "epsilon": frame.epsilon(),
        "set": set,
        "pq_norm": pq,
        "complement_norm": iq,
        "qpq_norm": eval.qpq_norm,
        "q_complement_q_norm": eval.complement_norm,
        "deviation_pq": dev_pq,
        "deviation_complement": dev_iq,
        "rounding_term": 0.5 - k as f64 / n as f64,
    });
    let mut report = ExperimentReport::new(
        "half-split",
        json!({
            "basis": basis.source(),
            "chars": f.indices(),
            "use_oracle": use_oracle,
            "enum_cap": cap,
        }),
        vec![trial],
        Some(seed),
    );
    report.put("pq_norm", pq);
    report.put("complement_norm", iq);
    report.put("max_deviation", dev_pq.max(dev_iq));
    report.put("measured_constant", dev_pq.max(dev_iq) / sqrt_eps);
    report.put("sqrt_eps", sqrt_eps);
    Ok(report)
}

pub fn half_split_default(basis: Arc<FlatBasis>, chars: &[usize], use_oracle: bool, seed: u64) -> Result<ExperimentReport> {
    half_split(basis, chars, use_oracle, seed, DEFAULT_ENUMERATION_CAP, &SelectOptions::default())
}

/// All subsets of `0..n` with `size` elements, as bitmasks in increasing order.
fn masks_of_size(n: usize, size: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == size).collect()
}

fn mask_indices(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

/// Every pair `(S, T)` of non-empty sets with `|S| + |T| ≤ max_sum`, grouped
/// into one record per size class `(|S|, |T|)`.
pub fn uncertainty_exhaustive(
    basis: Arc<FlatBasis>,
    max_sum: usize,
    threshold: f64,
    cap: u64,
) -> Result<ExperimentReport> {
    let n = basis.dim();
    if n > 20 {
        return Err(Error::InvalidArgument(format!(
            "exhaustive scan supports |G| ≤ 20, got {n}"
        )));
    }
    let max_sum = max_sum.min(2 * n);
    let mut classes = Vec::new();
    let mut total: u128 = 0;
    for s in 1..=n {
        for t in 1..=n {
            if s + t <= max_sum {
                classes.push((s, t));
                total += binomial(n, s).unwrap_or(u128::MAX) * binomial(n, t).unwrap_or(u128::MAX);
            }
        }
    }
    if total > cap as u128 {
        return Err(Error::EnumerationCapExceeded { count: total, cap });
    }
    let by_size: Vec<Vec<u32>> = (0..=n).map(|k| masks_of_size(n, k)).collect();
    let trials: Vec<Value> = classes
        .iter()
        .map(|&(s, t)| {
            let results: Vec<(bool, bool, f64, bool)> = by_size[s]
                .par_iter()
                .map(|&sm| {
                    let e = StandardSubspace::new(n, mask_indices(sm))?;
                    by_size[t]
                        .iter()
                        .map(|&tm| {
                            let f = FourierSubspace::new(basis.clone(), mask_indices(tm))?;
                            let v = check_uncertainty_with(&e, &f, threshold)?;
                            Ok((v.intersects, v.is_violation(), v.overlap_norm, v.additive_applies || v.multiplicative_applies))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            let max_overlap = results.iter().map(|r| r.2).fold(0.0, f64::max);
            Ok(json!({
                "s": s,
                "t": t,
                "pairs": results.len(),
                "intersections": results.iter().filter(|r| r.0).count(),
                "violations": results.iter().filter(|r| r.1).count(),
                "hypothesis_applies": results.first().is_some_and(|r| r.3),
                "max_overlap": max_overlap,
            }))
        })
        .collect::<Result<_>>()?;
    let mut report = ExperimentReport::new(
        "uncertainty-exhaustive",
        json!({"basis": basis.source(), "max_sum": max_sum, "threshold": threshold}),
        trials,
        None,
    );
    summarize_uncertainty(&mut report);
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    /// `|S| + |T| ≤ |G|`.
    Additive,
    /// `|S| · |T| < |G|`.
    Multiplicative,
}

/// Random pairs `(S, T)` whose sizes satisfy the chosen hypothesis; sizes are
/// drawn first (`|S|` uniform, then `|T|` uniform among admissible values),
/// then the sets.
pub fn uncertainty_sampled(
    basis: Arc<FlatBasis>,
    mode: SampleMode,
    trials: usize,
    seed: u64,
    threshold: f64,
) -> Result<ExperimentReport> {
    let n = basis.dim();
    if n < 2 {
        return Err(Error::InvalidArgument("sampling needs |G| ≥ 2".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trial count must be at least 1".into()));
    }
    let records: Vec<Value> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let trial_seed = derive_seed(seed, i as u64);
            let mut r = rng::seeded(trial_seed);
            let s = 1 + rng::uniform_below(&mut r, (n - 1) as u64) as usize;
            let t_max = match mode {
                SampleMode::Additive => n - s,
                SampleMode::Multiplicative => (n - 1) / s,
            };
            let t = 1 + rng::uniform_below(&mut r, t_max as u64) as usize;
            let set = rng::random_subset(&mut r, n, s);
            let chars = rng::random_subset(&mut r, n, t);
            let e = StandardSubspace::new(n, set)?;
            let f = FourierSubspace::new(basis.clone(), chars)?;
            let v = check_uncertainty_with(&e, &f, threshold)?;
            Ok(json!({
                "trial": i,
                "seed": trial_seed,
                "set": e.indices(),
                "chars": f.indices(),
                "overlap_norm": v.overlap_norm,
                "intersects": v.intersects,
                "violation": v.is_violation(),
                "pairs": 1,
                "intersections": usize::from(v.intersects),
                "violations": usize::from(v.is_violation()),
                "max_overlap": v.overlap_norm,
            }))
        })
        .collect::<Result<_>>()?;
    let mut report = ExperimentReport::new(
        "uncertainty-sampled",
        json!({"basis": basis.source(), "mode": mode, "trials": trials, "threshold": threshold}),
        records,
        Some(seed),
    );
    summarize_uncertainty(&mut report);
    Ok(report)
}

fn summarize_uncertainty(report: &mut ExperimentReport) {
    let count = |key: &str| report.trials.iter().filter_map(|t| t[key].as_u64()).sum::<u64>();
    let (pairs, hits, violations) = (count("pairs"), count("intersections"), count("violations"));
    let max_overlap = report.column("max_overlap").into_iter().fold(0.0, f64::max);
    report.put("pairs", pairs);
    report.put("intersections", hits);
    report.put("violations", violations);
    report.put("max_overlap", max_overlap);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_of_small_samples() {
        let s = stats(&[3.0, 1.0, 2.0, 10.0]).unwrap();
        assert_eq!((s.min, s.median, s.max, s.mean), (1.0, 2.5, 10.0, 4.0));
        assert!(stats(&[]).is_none());
    }

    #[test]
    fn tensor_comb_chars_layout() {
        // Z/4 × Z/3: (0, c) and (2, c).
        assert_eq!(tensor_comb_chars(2, 3), vec![0, 1, 2, 6, 7, 8]);
    }

    #[test]
    fn mc_is_deterministic_and_bounded() {
        let a = mc_intersection(2, 4, 20, 7).unwrap();
        let b = mc_intersection(2, 4, 20, 7).unwrap();
        assert_eq!(a, b);
        let f = a.summary["frequency"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&f));
        assert_eq!(a.trials.len(), 20);
    }

    #[test]
    fn mc_full_dimension_always_intersects() {
        let mut cfg = McConfig::new(2, 4, 5, 1);
        cfg.dim = Some(16);
        let r = mc_intersection_with(&cfg).unwrap();
        assert_eq!(r.summary["frequency"].as_f64(), Some(1.0));
    }

    #[test]
    fn mc_rejects_bad_inputs() {
        assert!(mc_intersection(1, 4, 5, 0).is_err());
        assert!(mc_intersection(2, 4, 0, 0).is_err());
        let mut cfg = McConfig::new(2, 4, 5, 0);
        cfg.dim = Some(17);
        assert!(mc_intersection_with(&cfg).is_err());
    }

    #[test]
    fn sweep_rank_one_has_zero_excess() {
        let inst: Vec<SweepInstance> = [8usize, 16]
            .iter()
            .map(|&n| SweepInstance {
                group: Group::new(&[n]).unwrap(),
                dim: 1,
                chars: None,
            })
            .collect();
        let r = sweep_eps_constant(&inst, 0.5, 3, &SelectOptions::default()).unwrap();
        for e in r.column("excess") {
            assert!(e.abs() < 1e-12);
        }
    }

    #[test]
    fn half_split_rank_one_is_exactly_half() {
        let b = group_basis(&Group::new(&[8]).unwrap());
        for oracle in [false, true] {
            let r = half_split_default(b.clone(), &[3], oracle, 0).unwrap();
            let h = 0.5f64.sqrt();
            assert!((r.summary["pq_norm"].as_f64().unwrap() - h).abs() < 1e-12);
            assert!((r.summary["complement_norm"].as_f64().unwrap() - h).abs() < 1e-12);
        }
    }

    #[test]
    fn half_split_odd_order_reports_rounding() {
        let b = group_basis(&Group::new(&[9]).unwrap());
        let r = half_split_default(b, &[0], true, 0).unwrap();
        let t = &r.trials[0];
        assert_eq!(t["k"], 4);
        assert!((t["rounding_term"].as_f64().unwrap() - 1.0 / 18.0).abs() < 1e-15);
        assert!((t["qpq_norm"].as_f64().unwrap() - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn exhaustive_prime_five() {
        let b = group_basis(&Group::new(&[5]).unwrap());
        let r = uncertainty_exhaustive(b, 5, DEFAULT_INTERSECTION_THRESHOLD, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(r.summary["intersections"], 0);
        // Σ_{s+t≤5} C(5,s) C(5,t).
        let mut expected = 0;
        for s in 1..=5u128 {
            for t in 1..=5u128 {
                if s + t <= 5 {
                    expected += binomial(5, s as usize).unwrap() * binomial(5, t as usize).unwrap();
                }
            }
        }
        assert_eq!(r.summary["pairs"].as_u64().unwrap() as u128, expected);
    }

    #[test]
    fn exhaustive_finds_comb_on_z4() {
        // {0, 2} and characters {0, 2} intersect on Z/4.
        let b = group_basis(&Group::new(&[4]).unwrap());
        let r = uncertainty_exhaustive(b, 4, DEFAULT_INTERSECTION_THRESHOLD, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(r.summary["intersections"].as_u64().unwrap() > 0);
        assert_eq!(r.summary["violations"], 0);
    }

    #[test]
    fn sampled_sizes_respect_mode() {
        let b = group_basis(&Group::new(&[12]).unwrap());
        let r = uncertainty_sampled(b, SampleMode::Multiplicative, 200, 5, DEFAULT_INTERSECTION_THRESHOLD).unwrap();
        for t in &r.trials {
            let s = t["set"].as_array().unwrap().len();
            let c = t["chars"].as_array().unwrap().len();
            assert!(s * c < 12);
        }
        assert_eq!(r.summary["intersections"], 0);
    }
}
