//! Finite abelian groups `Z/n_1 × … × Z/n_r`, their characters and flat
//! orthonormal bases.
//!
//! Elements and characters share one mixed-radix indexing: index `i` maps to
//! the tuple `(a_1, …, a_r)` with the first factor most significant, so for
//! `[4, 9]` the element 13 is `(1, 4)`. Characters are indexed through the
//! duality `Ĝ ≅ G`: the tuple `(b_1, …, b_r)` names the character
//! `g ↦ Π exp(2πi a_t b_t / n_t)`.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{kronecker, CMatrix, C64};

pub const DEFAULT_ORDER_CAP: usize = 4096;

/// Maximum entry deviation of `B·B*` from the identity.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Maximum deviation of an entry's modulus from `n^{-1/2}`.
pub const FLATNESS_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Group {
    factors: Vec<usize>,
    order: usize,
}

impl Group {
    pub fn new(factors: &[usize]) -> Result<Self> {
        Self::with_cap(factors, DEFAULT_ORDER_CAP)
    }

    pub fn with_cap(factors: &[usize], cap: usize) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("empty factor list".into()));
        }
        if let Some(f) = factors.iter().find(|&&f| f < 2) {
            return Err(Error::InvalidGroup(format!("factor {f} is smaller than 2")));
        }
        let mut order: usize = 1;
        for &f in factors {
            order = order.checked_mul(f).filter(|&o| o <= cap).ok_or_else(|| {
                Error::OrderCapExceeded {
                    order: factors.iter().fold(1usize, |acc, &x| acc.saturating_mul(x)),
                    cap,
                }
            })?;
        }
        Ok(Self {
            factors: factors.to_vec(),
            order,
        })
    }

    /// Parses `"n1xn2x…"`, e.g. `"4x9"` or `"16"`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_cap(text, DEFAULT_ORDER_CAP)
    }

    pub fn parse_with_cap(text: &str, cap: usize) -> Result<Self> {
        let factors = text
            .split(['x', 'X', '*'])
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidGroup(format!("cannot parse factor {t:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_cap(&factors, cap)
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_prime_order(&self) -> bool {
        is_prime(self.order)
    }

    pub fn tuple_of(&self, index: usize) -> Result<Vec<usize>> {
        self.check_index("element", index)?;
        let mut rest = index;
        let mut tuple = vec![0; self.factors.len()];
        for (slot, &n) in tuple.iter_mut().zip(&self.factors).rev() {
            *slot = rest % n;
            rest /= n;
        }
        Ok(tuple)
    }

    pub fn index_of(&self, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != self.factors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.factors.len(),
                found: tuple.len(),
            });
        }
        let mut index = 0;
        for (&a, &n) in tuple.iter().zip(&self.factors) {
            if a >= n {
                return Err(Error::IndexOutOfRange {
                    what: "tuple component",
                    index: a,
                    bound: n,
                });
            }
            index = index * n + a;
        }
        Ok(index)
    }

    /// Group operation on element indices.
    pub fn add(&self, g: usize, h: usize) -> Result<usize> {
        let (a, b) = (self.tuple_of(g)?, self.tuple_of(h)?);
        let sum: Vec<usize> = a
            .iter()
            .zip(&b)
            .zip(&self.factors)
            .map(|((x, y), n)| (x + y) % n)
            .collect();
        self.index_of(&sum)
    }

    /// The pairing `⟨χ, g⟩` as an integer phase `r` in `[0, |G|)`, meaning the
    /// character value `exp(2πi r / |G|)`.
    fn phase(&self, chi: &[usize], g: &[usize]) -> usize {
        let mut r = 0usize;
        for ((&b, &a), &n) in chi.iter().zip(g).zip(&self.factors) {
            r = (r + (a * b % n) * (self.order / n)) % self.order;
        }
        r
    }

    fn check_index(&self, what: &'static str, index: usize) -> Result<()> {
        if index >= self.order {
            return Err(Error::IndexOutOfRange {
                what,
                index,
                bound: self.order,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("x"))
    }
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn make_group(factors: &[usize]) -> Result<Group> {
    Group::new(factors)
}

/// `exp(2πi r / n)` evaluated from the angle; quarter turns are exact.
fn root_of_unity(r: usize, n: usize) -> C64 {
    let r = r % n;
    if (4 * r).is_multiple_of(n) {
        return match 4 * r / n {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    let (s, c) = (2.0 * PI * r as f64 / n as f64).sin_cos();
    C64::new(c, s)
}

/// Value of character `chi` at element `g`; both are mixed-radix indices.
pub fn character_value(group: &Group, chi: usize, g: usize) -> Result<C64> {
    group.check_index("character", chi)?;
    let (b, a) = (group.tuple_of(chi)?, group.tuple_of(g)?);
    Ok(root_of_unity(group.phase(&b, &a), group.order))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BasisSource {
    FourierOfGroup { group: Group },
    LoadedFile { path: PathBuf },
}

/// Square unitary matrix with every entry of modulus `n^{-1/2}`; row `φ`
/// is the basis vector `ê_φ` written in standard coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatBasis {
    matrix: CMatrix,
    source: BasisSource,
}

impl FlatBasis {
    /// Accepts `matrix` after checking squareness, unitarity and flatness.
    pub fn from_matrix(matrix: CMatrix, source: BasisSource) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let basis = Self { matrix, source };
        let flat = basis.flatness_deviation();
        if flat.deviation > FLATNESS_TOL {
            let z = basis.matrix[(flat.row, flat.col)];
            return Err(Error::NotFlat {
                row: flat.row,
                col: flat.col,
                modulus: z.norm(),
                expected: basis.expected_modulus(),
                deviation: flat.deviation,
            });
        }
        let unit = basis.unitarity_deviation();
        if unit.deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary {
                deviation: unit.deviation,
                row: unit.row,
                col: unit.col,
            });
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn source(&self) -> &BasisSource {
        &self.source
    }

    /// The underlying group when this is a Fourier basis.
    pub fn group(&self) -> Option<&Group> {
        match &self.source {
            BasisSource::FourierOfGroup { group } => Some(group),
            BasisSource::LoadedFile { .. } => None,
        }
    }

    /// `ê_φ` as a vector of standard coordinates.
    pub fn vector(&self, phi: usize) -> &[C64] {
        self.matrix.row(phi)
    }

    /// `ê_φ(g) = ⟨ê_φ, e_g⟩`.
    pub fn entry(&self, phi: usize, g: usize) -> C64 {
        self.matrix[(phi, g)]
    }

    pub fn expected_modulus(&self) -> f64 {
        (self.dim() as f64).sqrt().recip()
    }

    /// Largest `| |b_ij| - n^{-1/2} |` and where it occurs.
    pub fn flatness_deviation(&self) -> Deviation {
        let expected = self.expected_modulus();
        let n = self.dim();
        let mut worst = Deviation::default();
        for i in 0..n {
            for (j, z) in self.matrix.row(i).iter().enumerate() {
                let d = (z.norm() - expected).abs();
                if d > worst.deviation || d.is_nan() {
                    worst = Deviation {
                        deviation: d,
                        row: i,
                        col: j,
                    };
                }
            }
        }
        worst
    }

    /// Largest entry of `|B·B* - I|` and where it occurs.
    pub fn unitarity_deviation(&self) -> Deviation {
        let n = self.dim();
        // Split storage keeps the inner loop on contiguous f64 slices.
        let re: Vec<f64> = self.matrix.as_slice().iter().map(|z| z.re).collect();
        let im: Vec<f64> = self.matrix.as_slice().iter().map(|z| z.im).collect();
        let mut worst = Deviation::default();
        for i in 0..n {
            let (ri, ii) = (&re[i * n..(i + 1) * n], &im[i * n..(i + 1) * n]);
            for j in i..n {
                let (rj, ij) = (&re[j * n..(j + 1) * n], &im[j * n..(j + 1) * n]);
                // Four independent partial sums let the loop vectorize.
                let mut sr = [0.0f64; 4];
                let mut si = [0.0f64; 4];
                let chunks = n / 4 * 4;
                for t in (0..chunks).step_by(4) {
                    for u in 0..4 {
                        sr[u] += ri[t + u] * rj[t + u] + ii[t + u] * ij[t + u];
                        si[u] += ii[t + u] * rj[t + u] - ri[t + u] * ij[t + u];
                    }
                }
                for t in chunks..n {
                    sr[0] += ri[t] * rj[t] + ii[t] * ij[t];
                    si[0] += ii[t] * rj[t] - ri[t] * ij[t];
                }
                let sr = (sr[0] + sr[1]) + (sr[2] + sr[3]);
                let si = (si[0] + si[1]) + (si[2] + si[3]);
                let target = if i == j { 1.0 } else { 0.0 };
                let d = C64::new(sr - target, si).norm();
                if d > worst.deviation || d.is_nan() {
                    worst = Deviation {
                        deviation: d,
                        row: i,
                        col: j,
                    };
                }
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Deviation {
    pub deviation: f64,
    pub row: usize,
    pub col: usize,
}

/// Normalized characters `|G|^{-1/2} φ` as the rows of a flat basis.
pub fn fourier_basis(group: &Group) -> FlatBasis {
    let n = group.order();
    let scale = (n as f64).sqrt().recip();
    let roots: Vec<C64> = (0..n).map(|r| root_of_unity(r, n) * scale).collect();
    let tuples: Vec<Vec<usize>> = (0..n)
        .map(|i| group.tuple_of(i).expect("index in range"))
        .collect();
    let matrix = CMatrix::from_fn(n, n, |phi, g| roots[group.phase(&tuples[phi], &tuples[g])]);
    FlatBasis {
        matrix,
        source: BasisSource::FourierOfGroup {
            group: group.clone(),
        },
    }
}

/// `G1 × G2` with concatenated factors.
pub fn tensor_group(g1: &Group, g2: &Group) -> Result<Group> {
    tensor_group_with_cap(g1, g2, DEFAULT_ORDER_CAP)
}

pub fn tensor_group_with_cap(g1: &Group, g2: &Group, cap: usize) -> Result<Group> {
    let factors: Vec<usize> = g1.factors.iter().chain(&g2.factors).copied().collect();
    Group::with_cap(&factors, cap)
}

/// Largest entry deviation between the Fourier basis of `g1 × g2` and the
/// Kronecker product of the factors' bases. With first-factor-most-significant
/// indexing the index maps coincide, so this is an entrywise comparison.
pub fn tensor_factorization_deviation(g1: &Group, g2: &Group) -> Result<f64> {
    let product = tensor_group_with_cap(g1, g2, usize::MAX)?;
    let direct = fourier_basis(&product);
    let kron = kronecker(fourier_basis(g1).matrix(), fourier_basis(g2).matrix());
    Ok(direct.matrix().max_abs_diff(&kron))
}

/// Reads a flat basis from a text file; see [`parse_flat_basis`] for the format.
pub fn load_flat_basis(path: impl AsRef<Path>) -> Result<FlatBasis> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let matrix = parse_basis_matrix(&text)?;
    FlatBasis::from_matrix(
        matrix,
        BasisSource::LoadedFile {
            path: path.to_path_buf(),
        },
    )
}

/// Parses the flat-basis text format:
///
/// ```text
/// file    := line* ; blank lines and text after '#' are ignored
/// header  := n                       ; first content line, a positive integer
/// row     := entry (WS entry)*       ; exactly n rows of n entries
/// entry   := '(' entry ')'
///          | real                    ; purely real
///          | real 'j'                ; purely imaginary
///          | real ('+'|'-') real 'j' ; e.g. 0.5-0.5j, 1e-3+2E-1j
///          | real ',' real           ; "re,im" pair, no spaces
/// ```
///
/// `J` is accepted for `j`. Row `φ` is the basis vector `ê_φ`.
pub fn parse_flat_basis(text: &str, origin: impl Into<PathBuf>) -> Result<FlatBasis> {
    let matrix = parse_basis_matrix(text)?;
    FlatBasis::from_matrix(matrix, BasisSource::LoadedFile { path: origin.into() })
}

fn parse_basis_matrix(text: &str) -> Result<CMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        message: "empty file".into(),
    })?;
    let n: usize = header.parse().map_err(|_| Error::Parse {
        line: hline,
        message: format!("expected dimension, found {header:?}"),
    })?;
    if n == 0 {
        return Err(Error::Parse {
            line: hline,
            message: "dimension must be positive".into(),
        });
    }
    let mut rows = Vec::with_capacity(n);
    for (line, content) in lines {
        let row = content
            .split_whitespace()
            .map(|tok| {
                parse_complex(tok).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("cannot parse complex entry {tok:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(Error::NotSquare {
                rows: n,
                cols: row.len(),
            });
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::NotSquare {
            rows: rows.len(),
            cols: n,
        });
    }
    CMatrix::from_rows(rows)
}

fn parse_complex(tok: &str) -> Option<C64> {
    let tok = tok.trim();
    if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        return parse_complex(inner);
    }
    if let Some((re, im)) = tok.split_once(',') {
        return Some(C64::new(re.parse().ok()?, im.parse().ok()?));
    }
    let Some(body) = tok.strip_suffix(['j', 'J']) else {
        return Some(C64::new(tok.parse().ok()?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => Some(C64::new(body[..i].parse().ok()?, body[i..].parse().ok()?)),
        None => Some(C64::new(0.0, body.parse().ok()?)),
    }
}
