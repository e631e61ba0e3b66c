//! Hermitian operator arithmetic: spectra, upper barrier potentials,
//! rank-one updates and the Sherman-Morrison inverse update.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, inner, CMatrix, C64};

/// Entrywise tolerance for accepting a matrix as Hermitian, relative to its
/// largest entry (floored at 1).
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Margin by which a shift must exceed the top eigenvalue.
pub const SHIFT_MARGIN: f64 = 1e-12;

/// A square complex matrix kept exactly Hermitian by symmetrization.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates the Hermitian property, then symmetrizes.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL * matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Replaces `m` by `(m + m*) / 2` without checking how far off it was.
    pub fn symmetrized(matrix: CMatrix) -> Self {
        let n = matrix.rows();
        let mut out = matrix;
        for i in 0..n {
            out[(i, i)] = C64::new(out[(i, i)].re, 0.0);
            for j in i + 1..n {
                let avg = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        Self { matrix: out }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            matrix: CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(values[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    /// `<A v, v>`, real for Hermitian `A`.
    pub fn quadratic_form(&self, v: &[C64]) -> Result<f64> {
        let av = self.matrix.mul_vec(v)?;
        Ok(inner(&av, v).re)
    }

    /// `I - A`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        Self::symmetrized(CMatrix::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            C64::new(id, 0.0) - self.matrix[(i, j)]
        }))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self::symmetrized(self.matrix.add(&other.matrix)?))
    }
}

/// Largest entrywise modulus of `A - A*`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.rows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Ascending eigenvalues with optional orthonormal eigenvectors (as columns).
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    #[serde(skip)]
    pub vectors: Option<CMatrix>,
}

impl Spectrum {
    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `V Λ V*`, if vectors were kept.
    pub fn reconstruct(&self) -> Option<CMatrix> {
        let v = self.vectors.as_ref()?;
        let n = v.rows();
        Some(CMatrix::from_fn(n, n, |i, j| {
            self.values
                .iter()
                .enumerate()
                .map(|(t, &l)| v[(i, t)] * l * v[(j, t)].conj())
                .sum()
        }))
    }

    /// Coordinates `V* x` of `x` in the eigenbasis.
    pub fn coordinates(&self, x: &[C64]) -> Option<Vec<C64>> {
        let v = self.vectors.as_ref()?;
        let n = v.rows();
        Some(
            (0..v.cols())
                .map(|t| (0..n).map(|r| v[(r, t)].conj() * x[r]).sum())
                .collect(),
        )
    }
}

/// Full eigen-decomposition (values and vectors).
pub fn eigen(a: &HermitianOperator) -> Result<Spectrum> {
    let (values, vectors) = hermitian_eigen(a.matrix(), true)?;
    Ok(Spectrum { values, vectors })
}

/// Eigenvalues only; cheaper than [`eigen`].
pub fn eigenvalues(a: &HermitianOperator) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(a.matrix(), false)?.0)
}

/// Spectral norm of a positive semidefinite operator: its top eigenvalue.
pub fn psd_norm(a: &HermitianOperator) -> Result<f64> {
    Ok(eigenvalues(a)?.last().copied().unwrap_or(0.0))
}

/// `Tr((aI - A)^{-1}) = Σ 1/(a - λ_i)` from precomputed eigenvalues.
pub fn potential_from_values(values: &[f64], shift: f64) -> f64 {
    values.iter().map(|l| 1.0 / (shift - l)).sum()
}

/// Upper barrier potential `Tr((aI - A)^{-1})`; requires `a > ‖A‖`.
pub fn upper_potential(a: &HermitianOperator, shift: f64) -> Result<f64> {
    let values = eigenvalues(a)?;
    let top = values.last().copied().unwrap_or(f64::NEG_INFINITY);
    if shift <= top + SHIFT_MARGIN {
        return Err(Error::ShiftNotAboveSpectrum { shift, norm: top });
    }
    Ok(potential_from_values(&values, shift))
}

/// `A + v v*`.
pub fn rank_one_update(a: &HermitianOperator, v: &[C64]) -> Result<HermitianOperator> {
    let n = a.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let m = a.matrix();
    Ok(HermitianOperator::symmetrized(CMatrix::from_fn(n, n, |i, j| {
        m[(i, j)] + v[i] * v[j].conj()
    })))
}

/// Given `A^{-1}`, returns `(A + v v*)^{-1} = A^{-1} - A^{-1} v v* A^{-1} / (1 + <A^{-1} v, v>)`.
///
/// The caller guarantees that `ainv` is the inverse of a positive invertible
/// operator.
pub fn sherman_morrison_inverse(ainv: &HermitianOperator, v: &[C64]) -> Result<HermitianOperator> {
    let n = ainv.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let w = ainv.matrix().mul_vec(v)?;
    let denominator = 1.0 + inner(&w, v).re;
    if denominator.abs() <= 1e-12 {
        return Err(Error::SingularUpdate { denominator });
    }
    let m = ainv.matrix();
    // A^{-1} v v* A^{-1} = w w* since A^{-1} is Hermitian.
    Ok(HermitianOperator::symmetrized(CMatrix::from_fn(n, n, |i, j| {
        m[(i, j)] - w[i] * w[j].conj() / denominator
    })))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SumInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `Σ a_i b_i ≤ (1/m) Σ a_i Σ b_i` for positive `a` ascending and `b`
/// descending.
pub fn check_sum_inequality(a: &[f64], b: &[f64]) -> Result<SumInequality> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::InvalidSequence(format!(
            "sequences must be non-empty and of equal length (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    if let Some(x) = a.iter().chain(b).find(|x| !(**x > 0.0)) {
        return Err(Error::InvalidSequence(format!("non-positive entry {x}")));
    }
    if a.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidSequence("first sequence is not ascending".into()));
    }
    if b.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidSequence("second sequence is not descending".into()));
    }
    let m = a.len() as f64;
    let lhs: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let rhs = a.iter().sum::<f64>() * b.iter().sum::<f64>() / m;
    Ok(SumInequality {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}
