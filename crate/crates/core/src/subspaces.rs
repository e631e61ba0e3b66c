//! Standard subspaces (spans of point masses `e_g`) and Fourier subspaces
//! (spans of flat basis vectors `ê_φ`): projections, overlap norm, the
//! uncertainty-principle tests and the explicit constructions.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{fourier_basis, make_group, Group, DEFAULT_ORDER_CAP};
use crate::linalg::{inner, CMatrix, C64};
use crate::operator::{eigenvalues, HermitianOperator};
use crate::rng;

/// `‖PQ‖` above `1 - threshold` counts as a nonzero intersection.
pub const DEFAULT_INTERSECTION_THRESHOLD: f64 = 1e-6;

/// A chosen standard vector with residual norm below this is treated as
/// dependent on the running set in [`exchange_complement`].
const INDEPENDENCE_TOL: f64 = 1e-7;

/// Smallest acceptable singular value of the stacked system.
pub const SIGMA_MIN_TOL: f64 = 1e-8;

fn sorted_distinct(indices: Vec<usize>, bound: usize, what: &'static str) -> Result<Vec<usize>> {
    let mut idx = indices;
    idx.sort_unstable();
    if let Some(&bad) = idx.iter().find(|&&i| i >= bound) {
        return Err(Error::IndexOutOfRange { what, index: bad, bound });
    }
    if let Some(w) = idx.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(format!("duplicate {what} index {}", w[0])));
    }
    Ok(idx)
}

/// `span{e_g : g ∈ S}` inside an ambient space of dimension `|G|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StandardSubspace {
    ambient_dim: usize,
    indices: Vec<usize>,
}

impl StandardSubspace {
    pub fn new(ambient_dim: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let indices = sorted_distinct(indices.into_iter().collect(), ambient_dim, "element")?;
        Ok(Self { ambient_dim, indices })
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            indices: (0..ambient_dim).collect(),
        }
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            indices: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// The 0/1 diagonal projection `P`.
    pub fn projection(&self) -> HermitianOperator {
        let mut diag = vec![0.0; self.ambient_dim];
        for &g in &self.indices {
            diag[g] = 1.0;
        }
        HermitianOperator::diagonal(&diag)
    }
}

/// `span{ê_φ : φ ∈ T}` for a flat basis.
#[derive(Clone, Debug)]
pub struct FourierSubspace {
    basis: Arc<crate::group::FlatBasis>,
    indices: Vec<usize>,
}

impl FourierSubspace {
    pub fn new(basis: Arc<crate::group::FlatBasis>, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let indices = sorted_distinct(indices.into_iter().collect(), basis.dim(), "character")?;
        Ok(Self { basis, indices })
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn basis(&self) -> &Arc<crate::group::FlatBasis> {
        &self.basis
    }

    /// `Q = Σ_{φ∈T} ê_φ ê_φ*`.
    pub fn projection(&self) -> HermitianOperator {
        let n = self.ambient_dim();
        let rows: Vec<&[C64]> = self.indices.iter().map(|&p| self.basis.vector(p)).collect();
        HermitianOperator::symmetrized(CMatrix::from_fn(n, n, |g, h| {
            rows.iter().map(|r| r[g] * r[h].conj()).sum()
        }))
    }
}

fn check_ambient(e: &StandardSubspace, f: &FourierSubspace) -> Result<()> {
    if e.ambient_dim() != f.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: f.ambient_dim(),
            found: e.ambient_dim(),
        });
    }
    Ok(())
}

/// Which compressed Gram matrix [`overlap_norm_via`] diagonalizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramSide {
    /// `|S|×|S|` block `Q[S, S]` (the operator `PQP` restricted to `E`).
    Standard,
    /// `|T|×|T|` matrix `⟨P ê_ψ, ê_φ⟩` (the operator `QPQ` restricted to `F`).
    Fourier,
}

/// `‖PQ‖ = ‖QP‖`, the cosine of the smallest principal angle between `E` and `F`.
///
/// Uses the smaller of the two compressed Gram matrices.
pub fn overlap_norm(e: &StandardSubspace, f: &FourierSubspace) -> Result<f64> {
    let side = if e.dim() <= f.dim() {
        GramSide::Standard
    } else {
        GramSide::Fourier
    };
    overlap_norm_via(e, f, side)
}

pub fn overlap_norm_via(e: &StandardSubspace, f: &FourierSubspace, side: GramSide) -> Result<f64> {
    check_ambient(e, f)?;
    if e.dim() == 0 || f.dim() == 0 {
        return Ok(0.0);
    }
    let basis = f.basis();
    let gram = match side {
        GramSide::Standard => {
            let s = e.indices();
            CMatrix::from_fn(s.len(), s.len(), |a, b| {
                f.indices()
                    .iter()
                    .map(|&p| basis.entry(p, s[a]) * basis.entry(p, s[b]).conj())
                    .sum()
            })
        }
        GramSide::Fourier => {
            let t = f.indices();
            let restricted: Vec<Vec<C64>> = t
                .iter()
                .map(|&p| e.indices().iter().map(|&g| basis.entry(p, g)).collect())
                .collect();
            CMatrix::from_fn(t.len(), t.len(), |a, b| inner(&restricted[a], &restricted[b]))
        }
    };
    let top = eigenvalues(&HermitianOperator::symmetrized(gram))?
        .last()
        .copied()
        .unwrap_or(0.0);
    Ok(top.clamp(0.0, 1.0).sqrt())
}

/// `‖P ê_φ‖²`, which equals `|S|/|G|` for every flat basis.
pub fn single_vector_detection(e: &StandardSubspace, basis: &crate::group::FlatBasis, phi: usize) -> Result<f64> {
    if e.ambient_dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: e.ambient_dim(),
        });
    }
    if phi >= basis.dim() {
        return Err(Error::IndexOutOfRange {
            what: "character",
            index: phi,
            bound: basis.dim(),
        });
    }
    Ok(e.indices().iter().map(|&g| basis.entry(phi, g).norm_sqr()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UncertaintyVerdict {
    /// `dim E · dim F < |G|`.
    pub multiplicative_applies: bool,
    /// `|G|` prime (group Fourier basis only) and `dim E + dim F ≤ |G|`.
    pub additive_applies: bool,
    pub overlap_norm: f64,
    pub intersects: bool,
}

impl UncertaintyVerdict {
    /// An intersection where one of the hypotheses forbids it.
    pub fn is_violation(&self) -> bool {
        self.intersects && (self.multiplicative_applies || self.additive_applies)
    }
}

pub fn check_uncertainty(e: &StandardSubspace, f: &FourierSubspace) -> Result<UncertaintyVerdict> {
    check_uncertainty_with(e, f, DEFAULT_INTERSECTION_THRESHOLD)
}

/// Evaluates both uncertainty hypotheses and measures the actual overlap.
///
/// The multiplicative bound holds for any flat basis (mutual coherence
/// `|G|^{-1/2}`); the additive bound is only claimed for the Fourier basis of
/// a group of prime order.
pub fn check_uncertainty_with(e: &StandardSubspace, f: &FourierSubspace, threshold: f64) -> Result<UncertaintyVerdict> {
    let n = f.ambient_dim();
    let (s, t) = (e.dim(), f.dim());
    let prime = f.basis().group().is_some_and(Group::is_prime_order);
    let norm = overlap_norm(e, f)?;
    Ok(UncertaintyVerdict {
        multiplicative_applies: s * t < n,
        additive_applies: prime && s + t <= n,
        overlap_norm: norm,
        intersects: norm > 1.0 - threshold,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CombExample {
    pub group: Group,
    /// Support of `f`: the multiples of `n`.
    pub support: Vec<usize>,
    /// Character indices `{n b : 0 ≤ b < n}`.
    pub chars: Vec<usize>,
    /// `f = Σ_b φ_{nb}` (unnormalized characters), as values on `Z/n²`.
    #[serde(skip)]
    pub function: Vec<C64>,
}

impl CombExample {
    pub fn basis(&self) -> Arc<crate::group::FlatBasis> {
        Arc::new(fourier_basis(&self.group))
    }
}

/// The comb on `Z/n²`: an `n`-dimensional Fourier subspace meeting an
/// `n`-dimensional standard subspace.
pub fn comb_example(n: usize) -> Result<CombExample> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("comb needs n >= 2, got {n}")));
    }
    let order = n.checked_mul(n).ok_or(Error::OrderCapExceeded {
        order: usize::MAX,
        cap: DEFAULT_ORDER_CAP,
    })?;
    let group = make_group(&[order])?;
    let chars: Vec<usize> = (0..n).map(|b| n * b).collect();
    let mut function = vec![C64::new(0.0, 0.0); order];
    for (a, fa) in function.iter_mut().enumerate() {
        for &c in &chars {
            *fa += crate::group::character_value(&group, c, a)?;
        }
    }
    let support: Vec<usize> = (0..order).step_by(n).collect();
    Ok(CombExample {
        group,
        support,
        chars,
        function,
    })
}

/// A standard subspace of dimension `|G| - dim F` meeting `F` only in 0.
///
/// The running set starts as the orthonormal `ê_φ`; each step adds the
/// standard vector `e_g` with the largest residual against it (ties to the
/// smallest `g`), which keeps the stacked system well conditioned.
pub fn exchange_complement(f: &FourierSubspace) -> Result<StandardSubspace> {
    let n = f.ambient_dim();
    let target = n - f.dim();
    let mut frame: Vec<Vec<C64>> = f.indices().iter().map(|&p| f.basis().vector(p).to_vec()).collect();
    // Squared residual of every e_g against span(frame), downdated as the frame grows.
    let mut residual: Vec<f64> = (0..n)
        .map(|g| 1.0 - frame.iter().map(|q| q[g].norm_sqr()).sum::<f64>())
        .collect();
    let mut used = vec![false; n];
    let mut chosen = Vec::with_capacity(target);
    // Lower-triangular factor of the stacked rows in the order they join the frame.
    let mut l = CMatrix::identity(n.max(1));
    while chosen.len() < target {
        let best = (0..n)
            .filter(|&g| !used[g])
            .map(|g| residual[g])
            .fold(f64::NEG_INFINITY, f64::max);
        let g = (0..n)
            .find(|&g| !used[g] && residual[g] >= best - 1e-12)
            .expect("fewer chosen vectors than the target");
        let row = frame.len();
        let mut r = vec![C64::new(0.0, 0.0); n];
        r[g] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for (j, q) in frame.iter().enumerate() {
                let c = inner(&r, q);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= c * qi;
                }
                l[(row, j)] += c;
            }
        }
        let norm = crate::linalg::norm_sqr(&r).sqrt();
        if norm <= INDEPENDENCE_TOL {
            return Err(Error::RankDeficient { sigma_min: norm });
        }
        l[(row, row)] = C64::new(norm, 0.0);
        r.iter_mut().for_each(|x| *x /= norm);
        for (res, x) in residual.iter_mut().zip(&r) {
            *res -= x.norm_sqr();
        }
        used[g] = true;
        frame.push(r);
        chosen.push(g);
    }
    let e = StandardSubspace::new(n, chosen)?;
    if n == 0 {
        return Ok(e);
    }
    let sigma = triangular_sigma_min(&l)?;
    if sigma <= SIGMA_MIN_TOL {
        return Err(Error::RankDeficient { sigma_min: sigma });
    }
    Ok(e)
}

/// Smallest singular value of the matrix `M` whose rows are `ê_φ (φ ∈ T)`
/// followed by `e_g (g ∈ S)`.
///
/// `M = L·W` is factored by Gram-Schmidt with reorthogonalization (`W` with
/// orthonormal rows, `L` lower triangular), and `σ_min(M) = 1/‖L^{-1}‖`.
/// Unlike the Gram matrix route this keeps full relative accuracy for small
/// singular values.
pub fn stacked_sigma_min(f: &FourierSubspace, e: &StandardSubspace) -> Result<f64> {
    check_ambient(e, f)?;
    let n = f.ambient_dim();
    let mut rows: Vec<Vec<C64>> = f.indices().iter().map(|&p| f.basis().vector(p).to_vec()).collect();
    for &g in e.indices() {
        let mut r = vec![C64::new(0.0, 0.0); n];
        r[g] = C64::new(1.0, 0.0);
        rows.push(r);
    }
    let count = rows.len();
    if count == 0 || count > n {
        return Ok(0.0);
    }
    let mut l = CMatrix::zeros(count, count);
    let mut w: Vec<Vec<C64>> = Vec::with_capacity(count);
    for (i, mut v) in rows.into_iter().enumerate() {
        for _ in 0..2 {
            for (j, q) in w.iter().enumerate() {
                let c = inner(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
                l[(i, j)] += c;
            }
        }
        let norm = crate::linalg::norm_sqr(&v).sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        l[(i, i)] = C64::new(norm, 0.0);
        v.iter_mut().for_each(|x| *x /= norm);
        w.push(v);
    }
    triangular_sigma_min(&l)
}

/// `σ_min(L) = 1/‖L^{-1}‖` for an invertible lower-triangular `L`.
fn triangular_sigma_min(l: &CMatrix) -> Result<f64> {
    let count = l.rows();
    // Forward substitution for the columns of L^{-1}, stored transposed so
    // the inner loop walks contiguous memory.
    let mut inv_t = CMatrix::zeros(count, count);
    for col in 0..count {
        for i in col..count {
            let mut acc = if i == col { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            let (lrow, irow) = (l.row(i), inv_t.row(col));
            for j in col..i {
                acc -= lrow[j] * irow[j];
            }
            inv_t[(col, i)] = acc / lrow[i];
        }
    }
    // ‖L^{-1}‖² is the top eigenvalue of (L^{-1})* L^{-1} = conj(inv_t inv_t*).
    let top = eigenvalues(&HermitianOperator::symmetrized(inv_t.mul_adjoint(&inv_t)?))?
        .last()
        .copied()
        .unwrap_or(0.0);
    if !top.is_finite() || top <= 0.0 {
        return Ok(0.0);
    }
    Ok(top.sqrt().recip())
}

/// Uniformly random `k`-subset of `0..ambient_dim` (see [`crate::rng`]).
pub fn random_standard(k: usize, seed: u64, ambient_dim: usize) -> Result<StandardSubspace> {
    if k > ambient_dim {
        return Err(Error::InvalidArgument(format!(
            "subset size {k} exceeds ambient dimension {ambient_dim}"
        )));
    }
    let idx = rng::random_subset(&mut rng::seeded(seed), ambient_dim, k);
    StandardSubspace::new(ambient_dim, idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_group, parse_flat_basis};
    use proptest::prelude::*;

    fn basis(factors: &[usize]) -> Arc<crate::group::FlatBasis> {
        Arc::new(fourier_basis(&make_group(factors).unwrap()))
    }

    fn hadamard4() -> Arc<crate::group::FlatBasis> {
        // Sylvester Hadamard matrix / 2, written by hand rather than via a group.
        let text = "4\n0.5 0.5 0.5 0.5\n0.5 -0.5 0.5 -0.5\n0.5 0.5 -0.5 -0.5\n0.5 -0.5 -0.5 0.5\n";
        Arc::new(parse_flat_basis(text, "sylvester4").unwrap())
    }

    #[test]
    fn projection_examples() {
        let n = 6;
        assert_eq!(StandardSubspace::full(n).projection(), HermitianOperator::identity(n));
        assert_eq!(StandardSubspace::empty(n).projection(), HermitianOperator::zeros(n));
        let f = FourierSubspace::new(basis(&[4]), [0]).unwrap();
        let q = f.projection();
        for g in 0..4 {
            for h in 0..4 {
                assert!((q.get(g, h) - C64::new(0.25, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn projections_are_idempotent_with_correct_trace() {
        let b = basis(&[3, 4]);
        let f = FourierSubspace::new(b, [0, 1, 5, 7, 11]).unwrap();
        let q = f.projection();
        let q2 = q.matrix().matmul(q.matrix()).unwrap();
        assert!(q2.max_abs_diff(q.matrix()) <= 1e-10);
        assert!((q.trace() - 5.0).abs() <= 1e-9);
        let p = StandardSubspace::new(12, [1, 4, 9]).unwrap().projection();
        assert!((p.trace() - 3.0).abs() <= 1e-9);
    }

    #[test]
    fn subspace_constructors_validate() {
        assert!(StandardSubspace::new(4, [4]).is_err());
        assert!(StandardSubspace::new(4, [1, 1]).is_err());
        assert!(FourierSubspace::new(basis(&[4]), [9]).is_err());
        assert_eq!(StandardSubspace::new(4, [3, 0]).unwrap().indices(), &[0, 3]);
    }

    #[test]
    fn overlap_norm_examples() {
        let b = basis(&[4]);
        let f = FourierSubspace::new(b.clone(), [1, 3]).unwrap();
        assert!((overlap_norm(&StandardSubspace::full(4), &f).unwrap() - 1.0).abs() < 1e-12);

        let e = StandardSubspace::new(4, [0]).unwrap();
        let f = FourierSubspace::new(b.clone(), [1]).unwrap();
        assert!((overlap_norm(&e, &f).unwrap() - 0.5).abs() < 1e-12);

        let e = StandardSubspace::new(4, [0, 2]).unwrap();
        let f = FourierSubspace::new(b.clone(), [0, 2]).unwrap();
        assert!((overlap_norm(&e, &f).unwrap() - 1.0).abs() < 1e-12);

        assert!(overlap_norm(&StandardSubspace::full(5), &f).is_err());
        assert_eq!(overlap_norm(&StandardSubspace::empty(4), &f).unwrap(), 0.0);
    }

    #[test]
    fn overlap_norm_matches_dense_qpq() {
        let b = basis(&[2, 6]);
        let e = StandardSubspace::new(12, [0, 3, 4, 10]).unwrap();
        let f = FourierSubspace::new(b, [1, 2, 5, 6, 9, 11]).unwrap();
        let (p, q) = (e.projection(), f.projection());
        let qpq = q.matrix().matmul(p.matrix()).unwrap().matmul(q.matrix()).unwrap();
        let top = eigenvalues(&HermitianOperator::symmetrized(qpq)).unwrap().last().copied().unwrap();
        assert!((overlap_norm(&e, &f).unwrap() - top.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn single_vector_detection_examples() {
        let b = basis(&[8]);
        let e = StandardSubspace::new(8, [2, 5]).unwrap();
        for phi in 0..8 {
            assert!((single_vector_detection(&e, &b, phi).unwrap() - 0.25).abs() < 1e-12);
        }
        assert_eq!(single_vector_detection(&StandardSubspace::empty(8), &b, 3).unwrap(), 0.0);
        assert!((single_vector_detection(&StandardSubspace::full(8), &b, 3).unwrap() - 1.0).abs() < 1e-12);
        assert!(single_vector_detection(&e, &b, 8).is_err());
    }

    #[test]
    fn single_vector_detection_on_loaded_hadamard() {
        let b = hadamard4();
        for k in 0..=4 {
            let e = StandardSubspace::new(4, 0..k).unwrap();
            for phi in 0..4 {
                let d = single_vector_detection(&e, &b, phi).unwrap();
                assert!((d - k as f64 / 4.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn uncertainty_examples() {
        let b = basis(&[4]);
        let v = check_uncertainty(
            &StandardSubspace::new(4, [0]).unwrap(),
            &FourierSubspace::new(b.clone(), [0, 2]).unwrap(),
        )
        .unwrap();
        assert!(v.multiplicative_applies && !v.additive_applies && !v.intersects);
        assert!((v.overlap_norm - 0.5f64.sqrt()).abs() < 1e-12);

        let v = check_uncertainty(
            &StandardSubspace::new(4, [0, 2]).unwrap(),
            &FourierSubspace::new(b, [0, 2]).unwrap(),
        )
        .unwrap();
        assert!(!v.multiplicative_applies && v.intersects && !v.is_violation());
    }

    #[test]
    fn prime_five_exhaustive_has_no_intersections() {
        let b = basis(&[5]);
        for smask in 0u32..32 {
            for tmask in 0u32..32 {
                if smask.count_ones() + tmask.count_ones() > 5 {
                    continue;
                }
                let e = StandardSubspace::new(5, (0..5).filter(|i| smask >> i & 1 == 1)).unwrap();
                let f = FourierSubspace::new(b.clone(), (0..5).filter(|i| tmask >> i & 1 == 1)).unwrap();
                let v = check_uncertainty(&e, &f).unwrap();
                assert!(v.additive_applies);
                assert!(!v.intersects, "S={smask:b} T={tmask:b} norm={}", v.overlap_norm);
            }
        }
    }

    #[test]
    fn loaded_bases_never_claim_additive_bound() {
        let b = hadamard4();
        let v = check_uncertainty(&StandardSubspace::new(4, [0]).unwrap(), &FourierSubspace::new(b, [1]).unwrap()).unwrap();
        assert!(!v.additive_applies);
        assert!(v.multiplicative_applies);
    }

    #[test]
    fn comb_examples() {
        let c = comb_example(2).unwrap();
        let expected = [2.0, 0.0, 2.0, 0.0];
        for (z, e) in c.function.iter().zip(expected) {
            assert!((z - C64::new(e, 0.0)).norm() < 1e-9);
        }
        let c = comb_example(3).unwrap();
        assert_eq!(c.support, vec![0, 3, 6]);
        for (a, z) in c.function.iter().enumerate() {
            let e = if a % 3 == 0 { 3.0 } else { 0.0 };
            assert!((z - C64::new(e, 0.0)).norm() < 1e-9);
        }
        for n in 2..=8 {
            let c = comb_example(n).unwrap();
            assert_eq!(c.support.len() * c.chars.len(), c.group.order());
            let e = StandardSubspace::new(c.group.order(), c.support.clone()).unwrap();
            let f = FourierSubspace::new(c.basis(), c.chars.clone()).unwrap();
            assert!(overlap_norm(&e, &f).unwrap() >= 1.0 - 1e-9);
        }
        assert!(comb_example(1).is_err());
        assert!(matches!(comb_example(65), Err(Error::OrderCapExceeded { .. })));
    }

    #[test]
    fn exchange_examples() {
        let b = basis(&[4]);
        let e = exchange_complement(&FourierSubspace::new(b.clone(), []).unwrap()).unwrap();
        assert_eq!(e, StandardSubspace::full(4));

        let f = FourierSubspace::new(b.clone(), [0]).unwrap();
        let e = exchange_complement(&f).unwrap();
        assert_eq!(e.indices(), &[0, 1, 2]);
        assert!(stacked_sigma_min(&f, &e).unwrap() > 1e-8);

        let f = FourierSubspace::new(b, 0..4).unwrap();
        assert_eq!(exchange_complement(&f).unwrap().dim(), 0);
    }

    #[test]
    fn stacked_sigma_min_matches_overlap_identity() {
        // The stacked Gram is I + [[0, C], [C*, 0]] with ‖C‖ = ‖PQ‖, so
        // σ_min² = 1 - ‖PQ‖ whenever both sets are non-empty.
        let b = basis(&[12]);
        let f = FourierSubspace::new(b, [1, 4, 6]).unwrap();
        let e = exchange_complement(&f).unwrap();
        let s = stacked_sigma_min(&f, &e).unwrap();
        let norm = overlap_norm(&e, &f).unwrap();
        assert!((s * s - (1.0 - norm)).abs() < 1e-10);
    }

    #[test]
    fn random_standard_contract() {
        assert_eq!(random_standard(0, 1, 10).unwrap().dim(), 0);
        assert_eq!(random_standard(10, 1, 10).unwrap(), StandardSubspace::full(10));
        assert_eq!(random_standard(4, 99, 10).unwrap(), random_standard(4, 99, 10).unwrap());
        assert!(random_standard(11, 1, 10).is_err());
    }

    proptest! {
        #[test]
        fn overlap_norm_is_symmetric_in_gram_side(
            factors in prop::collection::vec(2usize..6, 1..3),
            seed in any::<u64>(),
            sk in 0usize..100,
            tk in 0usize..100,
        ) {
            let b = basis(&factors);
            let n = b.dim();
            let e = random_standard(sk % (n + 1), seed, n).unwrap();
            let t = rng::random_subset(&mut rng::seeded(seed ^ 0x5555), n, tk % (n + 1));
            let f = FourierSubspace::new(b, t).unwrap();
            let a = overlap_norm_via(&e, &f, GramSide::Standard).unwrap();
            let c = overlap_norm_via(&e, &f, GramSide::Fourier).unwrap();
            prop_assert!((a - c).abs() <= 1e-10);
            prop_assert!((0.0..=1.0).contains(&a));
        }

        #[test]
        fn exchange_complement_is_independent(
            factors in prop::collection::vec(2usize..6, 1..3),
            seed in any::<u64>(),
            tk in 0usize..100,
        ) {
            let b = basis(&factors);
            let n = b.dim();
            let t = rng::random_subset(&mut rng::seeded(seed), n, tk % (n + 1));
            let f = FourierSubspace::new(b, t).unwrap();
            let e = exchange_complement(&f).unwrap();
            prop_assert_eq!(e.dim(), n - f.dim());
            prop_assert!(stacked_sigma_min(&f, &e).unwrap() > SIGMA_MIN_TOL);
        }
    }
}
