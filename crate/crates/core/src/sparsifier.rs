//! Barrier-potential greedy selection over an equal-norm Parseval frame.
//!
//! A frame here is `u_1, …, u_n ∈ C^m` with `‖u_i‖² = ε` and
//! `Σ u_i u_i* = I`. For a Fourier subspace `F` the frame is `u_g = Q e_g`
//! written in the orthonormal coordinates `{ê_φ : φ ∈ T}`, and for
//! `S ⊆ G` the operator `Σ_{g∈S} u_g u_g*` is `QPQ` restricted to `F`.
//!
//! [`select_onesided`] picks indices one at a time while keeping every
//! eigenvalue of `A_j = Σ_{d≤j} u_{i_d} u_{i_d}*` below the shift
//! `a_j = √ε + j / (n (1 - √ε))`. A candidate `v` is admissible when
//!
//! ```text
//! <((a+δ)I - A)^{-2} v, v> / (Φ^a(A) - Φ^{a+δ}(A)) + <((a+δ)I - A)^{-1} v, v>  ≤  1
//! ```
//!
//! with `Φ^a(A) = Tr((aI - A)^{-1})`; an admissible candidate always exists,
//! and adding it keeps `‖A + vv*‖ < a + δ` without raising the potential.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::operator::{eigen, eigenvalues, potential_from_values, HermitianOperator, Spectrum, SHIFT_MARGIN};
use crate::subspaces::FourierSubspace;

/// Tolerance on `‖u_i‖² = ε` and on `Σ u_i u_i* = I`.
pub const FRAME_TOL: f64 = 1e-8;

/// A barrier condition value up to `1 + DEFAULT_FEASIBILITY_TOL` is admissible.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Condition values within this relative distance of the minimum count as
/// ties; the smallest index among them wins.
const TIE_TOL: f64 = 1e-12;

/// Equal-norm Parseval frame `u_1, …, u_n` in `C^m`.
#[derive(Clone, Debug)]
pub struct FrameSystem {
    m: usize,
    n: usize,
    epsilon: f64,
    vectors: Vec<Vec<C64>>,
}

impl FrameSystem {
    /// Validates `‖u_i‖² = ε`, `Σ u_i u_i* = I` and `nε = m`.
    pub fn from_vectors(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let n = vectors.len();
        let m = vectors.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(Error::DegenerateFrame("empty frame".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: v.len(),
            });
        }
        let epsilon = m as f64 / n as f64;
        for (i, v) in vectors.iter().enumerate() {
            let sq = crate::linalg::norm_sqr(v);
            if (sq - epsilon).abs() > FRAME_TOL {
                return Err(Error::InvalidFrame(format!(
                    "‖u_{i}‖² = {sq} differs from ε = {epsilon}"
                )));
            }
        }
        let frame = Self {
            m,
            n,
            epsilon,
            vectors,
        };
        let dev = frame
            .partial_sum(0..n)
            .matrix()
            .max_abs_diff(&CMatrix::identity(m));
        if dev > FRAME_TOL {
            return Err(Error::InvalidFrame(format!(
                "Σ u_i u_i* deviates from the identity by {dev:e}"
            )));
        }
        if (n as f64 * epsilon - m as f64).abs() > 1e-9 {
            return Err(Error::InvalidFrame("nε ≠ m".into()));
        }
        Ok(frame)
    }

    /// Dimension `m` of the space the vectors live in.
    pub fn dim(&self) -> usize {
        self.m
    }

    /// Number `n` of frame vectors.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn vector(&self, i: usize) -> &[C64] {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    /// `Σ_{i∈S} u_i u_i*`, summed in the order given.
    pub fn partial_sum(&self, indices: impl IntoIterator<Item = usize>) -> HermitianOperator {
        let m = self.m;
        let mut acc = CMatrix::zeros(m, m);
        for i in indices {
            let u = &self.vectors[i];
            for r in 0..m {
                for c in 0..m {
                    acc[(r, c)] += u[r] * u[c].conj();
                }
            }
        }
        HermitianOperator::symmetrized(acc)
    }

    fn check_indices(&self, set: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.n];
        for &i in set {
            if i >= self.n {
                return Err(Error::IndexOutOfRange {
                    what: "frame",
                    index: i,
                    bound: self.n,
                });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!("duplicate frame index {i}")));
            }
        }
        Ok(())
    }
}

/// The frame `u_g = Q e_g` of a Fourier subspace in the coordinates
/// `(u_g)_φ = ⟨e_g, ê_φ⟩ = conj(ê_φ(g))`, `φ ∈ T`.
pub fn build_frame(f: &FourierSubspace) -> Result<FrameSystem> {
    let (m, n) = (f.dim(), f.ambient_dim());
    if m == 0 {
        return Err(Error::DegenerateFrame(
            "the Fourier subspace is {0}; there is nothing to detect".into(),
        ));
    }
    if m == n {
        return Err(Error::DegenerateFrame(
            "the Fourier subspace is the whole space (ε = 1): ‖PQ‖ = 1 for every non-empty S".into(),
        ));
    }
    let basis = f.basis();
    let vectors = (0..n)
        .map(|g| f.indices().iter().map(|&p| basis.entry(p, g).conj()).collect())
        .collect();
    FrameSystem::from_vectors(vectors)
}

/// Resolvent quantities of `A` at shift `b = a + δ`, from a spectrum with vectors.
struct Resolvent<'a> {
    spectrum: &'a Spectrum,
    shift: f64,
}

impl Resolvent<'_> {
    /// `(<(bI - A)^{-2} v, v>, <(bI - A)^{-1} v, v>)`.
    fn forms(&self, v: &[C64]) -> (f64, f64) {
        let w = self.spectrum.coordinates(v).expect("spectrum keeps vectors");
        let mut q2 = 0.0;
        let mut q1 = 0.0;
        for (wt, &l) in w.iter().zip(&self.spectrum.values) {
            let r = 1.0 / (self.shift - l);
            let mass = wt.norm_sqr();
            q1 += mass * r;
            q2 += mass * r * r;
        }
        (q2, q1)
    }

    fn condition(&self, v: &[C64], phi_gap: f64) -> f64 {
        let (q2, q1) = self.forms(v);
        q2 / phi_gap + q1
    }
}

/// `Φ^a(A) - Φ^{a+δ}(A) = δ Σ 1/((a - λ_i)(a + δ - λ_i))`, evaluated without
/// cancellation.
fn potential_gap(values: &[f64], a: f64, delta: f64) -> f64 {
    delta * values.iter().map(|l| 1.0 / ((a - l) * (a + delta - l))).sum::<f64>()
}

/// Left-hand side of the barrier condition for adding `v` to `A` while the
/// shift moves from `a` to `a + δ`. Values `≤ 1` (up to the feasibility
/// tolerance) guarantee `‖A + vv*‖ < a + δ` and `Φ^{a+δ}(A + vv*) ≤ Φ^a(A)`.
pub fn barrier_condition(a_op: &HermitianOperator, a: f64, delta: f64, v: &[C64], phi_gap: f64) -> Result<f64> {
    if v.len() != a_op.dim() {
        return Err(Error::DimensionMismatch {
            expected: a_op.dim(),
            found: v.len(),
        });
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("δ must be positive, got {delta}")));
    }
    if !(phi_gap > 0.0) {
        return Err(Error::InvalidArgument(format!("potential gap must be positive, got {phi_gap}")));
    }
    let spectrum = eigen(a_op)?;
    if a <= spectrum.max() + SHIFT_MARGIN {
        return Err(Error::ShiftNotAboveSpectrum {
            shift: a,
            norm: spectrum.max(),
        });
    }
    let r = Resolvent {
        spectrum: &spectrum,
        shift: a + delta,
    };
    Ok(r.condition(v, phi_gap))
}

#[derive(Clone, Copy, Debug)]
pub struct SelectOptions {
    pub feasibility_tol: f64,
}

impl Default for SelectOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: DEFAULT_FEASIBILITY_TOL,
        }
    }
}

/// Shift schedule `a_j = √ε + j / (n (1 - √ε))`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShiftSchedule {
    pub sqrt_eps: f64,
    pub n: usize,
}

impl ShiftSchedule {
    pub fn new(epsilon: f64, n: usize) -> Self {
        Self {
            sqrt_eps: epsilon.sqrt(),
            n,
        }
    }

    pub fn step(&self) -> f64 {
        1.0 / ((1.0 - self.sqrt_eps) * self.n as f64)
    }

    pub fn shift(&self, j: usize) -> f64 {
        self.sqrt_eps + j as f64 * self.step()
    }
}

/// Running state of the greedy loop after `j` selections.
#[derive(Clone, Debug)]
pub struct BarrierState {
    pub j: usize,
    pub selected: Vec<usize>,
    /// `A_j = Σ_{d≤j} u_{i_d} u_{i_d}*`.
    pub operator: HermitianOperator,
    pub shift: f64,
    pub potential: f64,
    used: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PotentialPoint {
    pub shift: f64,
    pub potential: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    /// Step `j` (0-based): the selection that produces `A_{j+1}`.
    pub step: usize,
    pub chosen: usize,
    /// Minimum barrier condition over unused indices.
    pub min_condition: f64,
    /// `a_j - ‖A_j‖` before the selection.
    pub domination_margin: f64,
    /// Whether the step needed the refactorized retry.
    pub retried: bool,
}

impl BarrierState {
    pub fn new(frame: &FrameSystem, schedule: &ShiftSchedule) -> Self {
        let shift = schedule.shift(0);
        Self {
            j: 0,
            selected: Vec::new(),
            operator: HermitianOperator::zeros(frame.dim()),
            shift,
            potential: frame.dim() as f64 / shift,
            used: vec![false; frame.len()],
        }
    }

    /// Evaluates every unused index against the current state and returns
    /// `(argmin index, min value)` plus the domination margin.
    fn scan(&self, frame: &FrameSystem, schedule: &ShiftSchedule) -> Result<(usize, f64, f64)> {
        let spectrum = eigen(&self.operator)?;
        let a = schedule.shift(self.j);
        let delta = schedule.step();
        let margin = a - spectrum.max();
        if margin <= 0.0 {
            return Err(Error::GuaranteeBreach(format!(
                "‖A_{}‖ = {} is not below a_{} = {a}",
                self.j,
                spectrum.max(),
                self.j
            )));
        }
        let gap = potential_gap(&spectrum.values, a, delta);
        let r = Resolvent {
            spectrum: &spectrum,
            shift: a + delta,
        };
        let values: Vec<Option<f64>> = (0..frame.len())
            .into_par_iter()
            .map(|i| (!self.used[i]).then(|| r.condition(frame.vector(i), gap)))
            .collect();
        let min = values
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let cut = min + TIE_TOL * min.abs().max(1.0);
        let chosen = values
            .iter()
            .position(|v| v.is_some_and(|v| v <= cut))
            .ok_or(Error::NoFeasibleCandidate {
                step: self.j,
                min_value: min,
                margin,
            })?;
        Ok((chosen, min, margin))
    }

    /// Adds one admissible index, moving from `A_j` to `A_{j+1}`.
    pub fn advance(&mut self, frame: &FrameSystem, schedule: &ShiftSchedule, opts: &SelectOptions) -> Result<StepRecord> {
        let (mut chosen, mut min, mut margin) = self.scan(frame, schedule)?;
        let mut retried = false;
        if min > 1.0 + opts.feasibility_tol {
            // Rebuild A_j from scratch before giving up.
            self.operator = frame.partial_sum(self.selected.iter().copied());
            (chosen, min, margin) = self.scan(frame, schedule)?;
            retried = true;
            if min > 1.0 + opts.feasibility_tol {
                return Err(Error::NoFeasibleCandidate {
                    step: self.j,
                    min_value: min,
                    margin,
                });
            }
        }
        self.operator = crate::operator::rank_one_update(&self.operator, frame.vector(chosen))?;
        self.used[chosen] = true;
        self.selected.push(chosen);
        self.j += 1;
        self.shift = schedule.shift(self.j);
        let values = eigenvalues(&self.operator)?;
        let top = values.last().copied().unwrap_or(0.0);
        if top >= self.shift {
            return Err(Error::GuaranteeBreach(format!(
                "‖A_{}‖ = {top} reached a_{} = {}",
                self.j, self.j, self.shift
            )));
        }
        self.potential = potential_from_values(&values, self.shift);
        Ok(StepRecord {
            step: self.j - 1,
            chosen,
            min_condition: min,
            domination_margin: margin,
            retried,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelectionResult {
    /// Selected indices, sorted.
    pub set: Vec<usize>,
    /// Selected indices in the order they were chosen.
    pub order: Vec<usize>,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    /// `‖Σ_{i∈S} u_i u_i*‖ = ‖QPQ‖`.
    pub achieved_one_sided: f64,
    /// `√ε + k / (n (1 - √ε))`; the achieved value is strictly below it.
    pub bound_one_sided: f64,
    /// `‖I - Σ_{i∈S} u_i u_i*‖ = ‖Q(I-P)Q‖`.
    pub achieved_complement: f64,
    /// Reference level `(n - k)/n` for the complement; not a guarantee.
    pub bound_complement: f64,
    /// `(a_j, Φ^{a_j}(A_j))` for `j = 0..=k`.
    pub potential_trace: Vec<PotentialPoint>,
    /// Minimum barrier condition value at each step.
    pub feasibility_margins: Vec<f64>,
    pub steps: Vec<StepRecord>,
    /// Potential trace is non-increasing and starts at `m/√ε`.
    pub monotone: bool,
}

impl SelectionResult {
    pub fn excess_one_sided(&self) -> f64 {
        self.achieved_one_sided - self.k as f64 / self.n as f64
    }
}

pub fn select_onesided(frame: &FrameSystem, k: usize) -> Result<SelectionResult> {
    select_onesided_with(frame, k, &SelectOptions::default())
}

/// Runs the greedy barrier selection for `k` steps.
///
/// Each step takes the unused index with the smallest barrier condition
/// value (ties to the smallest index), which is admissible whenever any
/// index is.
pub fn select_onesided_with(frame: &FrameSystem, k: usize, opts: &SelectOptions) -> Result<SelectionResult> {
    let (n, m) = (frame.len(), frame.dim());
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    if frame.epsilon() >= 1.0 {
        return Err(Error::DegenerateFrame("ε = 1: the shift schedule is singular".into()));
    }
    let schedule = ShiftSchedule::new(frame.epsilon(), n);
    let mut state = BarrierState::new(frame, &schedule);
    let initial = state.potential;
    let mut trace = vec![PotentialPoint {
        shift: state.shift,
        potential: state.potential,
    }];
    let mut steps = Vec::with_capacity(k);
    for _ in 0..k {
        let rec = state.advance(frame, &schedule, opts)?;
        steps.push(rec);
        trace.push(PotentialPoint {
            shift: state.shift,
            potential: state.potential,
        });
    }

    let mut set = state.selected.clone();
    set.sort_unstable();
    let a_final = frame.partial_sum(set.iter().copied());
    let values = eigenvalues(&a_final)?;
    let achieved = values.last().copied().unwrap_or(0.0);
    let complement = 1.0 - values.first().copied().unwrap_or(0.0);
    let bound = schedule.shift(k);
    if achieved >= bound {
        return Err(Error::GuaranteeBreach(format!(
            "achieved norm {achieved} is not below the bound {bound}"
        )));
    }
    let slack = 1e-9 * initial;
    let monotone = (trace[0].potential - m as f64 / schedule.sqrt_eps).abs() <= slack
        && trace.windows(2).all(|w| w[1].potential <= w[0].potential + slack);
    Ok(SelectionResult {
        order: state.selected,
        set,
        k,
        n,
        m,
        epsilon: frame.epsilon(),
        achieved_one_sided: achieved,
        bound_one_sided: bound,
        achieved_complement: if k == 0 { 1.0 } else { complement },
        bound_complement: (n - k) as f64 / n as f64,
        feasibility_margins: steps.iter().map(|s| s.min_condition).collect(),
        potential_trace: trace,
        steps,
        monotone,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoSidedEvaluation {
    pub k: usize,
    pub n: usize,
    /// `‖QPQ‖ = ‖PQ‖²`.
    pub qpq_norm: f64,
    /// `‖Q(I-P)Q‖ = ‖(I-P)Q‖²`.
    pub complement_norm: f64,
    pub excess_one_sided: f64,
    pub excess_complement: f64,
    pub max_excess: f64,
    /// Largest entry of `Σ_S + Σ_{S^c} - I`.
    pub identity_residual: f64,
}

/// Both `‖Σ_{i∈S} u_i u_i*‖` and `‖I - Σ_{i∈S} u_i u_i*‖`, with their excesses
/// over `k/n` and `(n-k)/n`.
pub fn evaluate_twosided(frame: &FrameSystem, set: &[usize]) -> Result<TwoSidedEvaluation> {
    frame.check_indices(set)?;
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    let inside = frame.partial_sum(sorted.iter().copied());
    let mut in_set = vec![false; frame.len()];
    for &i in &sorted {
        in_set[i] = true;
    }
    let outside = frame.partial_sum((0..frame.len()).filter(|&i| !in_set[i]));
    let identity_residual = inside
        .add(&outside)?
        .matrix()
        .max_abs_diff(&CMatrix::identity(frame.dim()));
    let complement = inside.complement();
    let qpq_norm = top_eigenvalue(&inside)?.max(0.0);
    let complement_norm = top_eigenvalue(&complement)?.max(0.0);
    let (k, n) = (sorted.len(), frame.len());
    let excess_one_sided = qpq_norm - k as f64 / n as f64;
    let excess_complement = complement_norm - (n - k) as f64 / n as f64;
    Ok(TwoSidedEvaluation {
        k,
        n,
        qpq_norm,
        complement_norm,
        excess_one_sided,
        excess_complement,
        max_excess: excess_one_sided.max(excess_complement),
        identity_residual,
    })
}

fn top_eigenvalue(a: &HermitianOperator) -> Result<f64> {
    Ok(eigenvalues(a)?.last().copied().unwrap_or(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// `‖Σ_{i∈S} u_i u_i*‖`.
    OneSided,
    /// `max(‖QPQ‖ - k/n, ‖Q(I-P)Q‖ - (n-k)/n)`.
    TwoSidedMaxExcess,
}

#[derive(Clone, Debug, Serialize)]
pub struct BruteForceResult {
    /// Lexicographically first subset whose value is within the tie tolerance
    /// of the minimum.
    pub set: Vec<usize>,
    /// Objective value of `set`.
    pub value: f64,
    /// Smallest objective value over all subsets.
    pub minimum: f64,
    pub evaluated: u64,
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
fn unrank_combination(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let mut x = next;
        loop {
            let count = binomial(n - x - 1, k - slot - 1).unwrap_or(u128::MAX);
            if rank < count {
                break;
            }
            rank -= count;
            x += 1;
        }
        out.push(x);
        next = x + 1;
    }
    out
}

/// Advances to the lexicographic successor; false after the last subset.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn objective_value(frame: &FrameSystem, set: &[usize], objective: Objective) -> Result<f64> {
    match objective {
        Objective::OneSided => top_eigenvalue(&frame.partial_sum(set.iter().copied())),
        Objective::TwoSidedMaxExcess => Ok(evaluate_twosided(frame, set)?.max_excess),
    }
}

pub fn brute_force_best(frame: &FrameSystem, k: usize, objective: Objective) -> Result<BruteForceResult> {
    brute_force_best_with_cap(frame, k, objective, DEFAULT_ENUMERATION_CAP)
}

/// Exact minimizer over all `k`-subsets; among values within a relative
/// `1e-12` of the minimum the lexicographically first subset is returned.
pub fn brute_force_best_with_cap(frame: &FrameSystem, k: usize, objective: Objective, cap: u64) -> Result<BruteForceResult> {
    let n = frame.len();
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    let total = binomial(n, k).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(Error::EnumerationCapExceeded { count: total, cap });
    }
    const CHUNK: u128 = 4096;
    let chunks = total.div_ceil(CHUNK) as u64;
    let scan_chunk = |c: u64, cut: Option<f64>| -> Result<Option<(f64, Vec<usize>)>> {
        let start = c as u128 * CHUNK;
        let end = (start + CHUNK).min(total);
        let mut comb = unrank_combination(n, k, start);
        let mut best: Option<(f64, Vec<usize>)> = None;
        for r in start..end {
            let v = objective_value(frame, &comb, objective)?;
            match cut {
                Some(cut) if v <= cut => return Ok(Some((v, comb))),
                Some(_) => {}
                None => {
                    if best.as_ref().is_none_or(|(b, _)| v < *b) {
                        best = Some((v, comb.clone()));
                    }
                }
            }
            if r + 1 < end {
                next_combination(&mut comb, n);
            }
        }
        Ok(best)
    };

    // Pass 1: global minimum value.
    let min = (0..chunks)
        .into_par_iter()
        .map(|c| scan_chunk(c, None))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .map(|(v, _)| v)
        .fold(f64::INFINITY, f64::min);
    // Pass 2: lexicographically first subset within tolerance of it.
    let cut = min + 1e-12 * min.abs().max(1.0);
    let found = (0..chunks)
        .into_par_iter()
        .map(|c| scan_chunk(c, Some(cut)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    let (value, set) = found.ok_or_else(|| Error::GuaranteeBreach("enumeration found no subset".into()))?;
    Ok(BruteForceResult {
        set,
        value,
        minimum: min,
        evaluated: total as u64,
    })
}

/// Resizes `set` to exactly `k` elements, one greedy move at a time.
///
/// Growing adds the unused index whose addition raises `‖QPQ‖` least;
/// shrinking removes the member whose removal lowers `‖QPQ‖` least. Ties go to
/// the smallest index.
pub fn adjust_cardinality(set: &[usize], k: usize, frame: &FrameSystem) -> Result<Vec<usize>> {
    frame.check_indices(set)?;
    let n = frame.len();
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    let mut current: Vec<usize> = set.to_vec();
    current.sort_unstable();
    while current.len() != k {
        let base = objective_value(frame, &current, Objective::OneSided)?;
        let growing = current.len() < k;
        let candidates: Vec<usize> = if growing {
            (0..n).filter(|i| current.binary_search(i).is_err()).collect()
        } else {
            current.clone()
        };
        let mut best: Option<(f64, usize)> = None;
        for &c in &candidates {
            let trial: Vec<usize> = if growing {
                let mut t = current.clone();
                t.push(c);
                t.sort_unstable();
                t
            } else {
                current.iter().copied().filter(|&x| x != c).collect()
            };
            let change = (objective_value(frame, &trial, Objective::OneSided)? - base).abs();
            if best.is_none_or(|(b, _)| change < b - TIE_TOL) {
                best = Some((change, c));
            }
        }
        let (_, pick) = best.expect("non-empty candidate set");
        if growing {
            current.push(pick);
            current.sort_unstable();
        } else {
            current.retain(|&x| x != pick);
        }
    }
    Ok(current)
}
