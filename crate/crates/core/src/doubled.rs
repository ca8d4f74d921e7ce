//! Doubled-up matrices `Δ(E−, E+) = [[E−, E+], [E+#, E−#]]`.

use alloc::format;

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, conj, max_abs, max_abs_diff, real, CMatrix};

/// A doubled-up matrix stored by its two generating blocks.
///
/// The flat (embedded) matrix is `2r × 2k` when both blocks are `r × k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledMatrix {
    minus: CMatrix,
    plus: CMatrix,
}

impl DoubledMatrix {
    pub fn new(minus: CMatrix, plus: CMatrix) -> Result<Self> {
        if minus.shape() != plus.shape() {
            return Err(Error::Dimension(format!(
                "minus block is {:?} but plus block is {:?}",
                minus.shape(),
                plus.shape()
            )));
        }
        Ok(Self { minus, plus })
    }

    /// Builds `Δ(E−, E+)` from blocks already known to agree in shape.
    ///
    /// # Panics
    /// If the shapes differ.
    pub fn from_blocks(minus: CMatrix, plus: CMatrix) -> Self {
        assert_eq!(minus.shape(), plus.shape(), "doubled blocks must agree in shape");
        Self { minus, plus }
    }

    /// Passive embedding `Δ(E, 0)`.
    pub fn passive(minus: CMatrix) -> Self {
        let plus = CMatrix::zeros(minus.nrows(), minus.ncols());
        Self { minus, plus }
    }

    /// `Δ(a, b)` for scalars.
    pub fn scalar(minus: Complex64, plus: Complex64) -> Self {
        Self::from_blocks(linalg::scalar(minus), linalg::scalar(plus))
    }

    pub fn real_scalar(minus: f64, plus: f64) -> Self {
        Self::scalar(real(minus), real(plus))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_blocks(CMatrix::zeros(rows, cols), CMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self::passive(linalg::identity(n))
    }

    pub fn minus(&self) -> &CMatrix {
        &self.minus
    }

    pub fn plus(&self) -> &CMatrix {
        &self.plus
    }

    pub fn into_blocks(self) -> (CMatrix, CMatrix) {
        (self.minus, self.plus)
    }

    /// Block row count `r` (the flat matrix has `2r` rows).
    pub fn rows(&self) -> usize {
        self.minus.nrows()
    }

    pub fn cols(&self) -> usize {
        self.minus.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// The full `2r × 2k` matrix.
    pub fn embed(&self) -> CMatrix {
        let (r, k) = self.minus.shape();
        let mut out = CMatrix::zeros(2 * r, 2 * k);
        out.view_mut((0, 0), (r, k)).copy_from(&self.minus);
        out.view_mut((0, k), (r, k)).copy_from(&self.plus);
        out.view_mut((r, 0), (r, k)).copy_from(&conj(&self.plus));
        out.view_mut((r, k), (r, k)).copy_from(&conj(&self.minus));
        out
    }

    /// Reads the blocks off a `2r × 2k` matrix, checking the doubled-up
    /// pattern to `tol`.
    pub fn extract(m: &CMatrix, tol: f64) -> Result<Self> {
        let deviation = structure_deviation(m)?;
        if deviation > tol {
            return Err(Error::Structure { deviation });
        }
        let (r, k) = (m.nrows() / 2, m.ncols() / 2);
        Ok(Self {
            minus: m.view((0, 0), (r, k)).into_owned(),
            plus: m.view((0, k), (r, k)).into_owned(),
        })
    }

    /// `X♭ = J X† J`, i.e. `Δ(E−†, −E+ᵀ)`.
    pub fn flat(&self) -> Self {
        Self {
            minus: self.minus.adjoint(),
            plus: -self.plus.transpose(),
        }
    }

    /// Doubled product. Fails if the inner block dimensions differ.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{} doubled blocks",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let minus = &self.minus * &rhs.minus + &self.plus * conj(&rhs.plus);
        let plus = &self.minus * &rhs.plus + &self.plus * conj(&rhs.minus);
        Self { minus, plus }
    }

    /// Multiplication by a real scalar (a complex scalar would break the
    /// doubled-up pattern).
    pub fn scale(&self, t: f64) -> Self {
        Self {
            minus: &self.minus * real(t),
            plus: &self.plus * real(t),
        }
    }

    /// Entrywise conjugate of the flat matrix, `Δ(E−#, E+#)`.
    pub fn conj(&self) -> Self {
        Self {
            minus: conj(&self.minus),
            plus: conj(&self.plus),
        }
    }

    /// Blockwise direct sum `Δ(E−⊕F−, E+⊕F+)`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            minus: block_diag(&self.minus, &other.minus),
            plus: block_diag(&self.plus, &other.plus),
        }
    }

    /// Sub-block picking the same row and column indices in both halves.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let pick = |m: &CMatrix| CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]);
        Self {
            minus: pick(&self.minus),
            plus: pick(&self.plus),
        }
    }

    pub fn transpose_blocks(&self) -> Self {
        Self {
            minus: self.minus.transpose(),
            plus: self.plus.transpose(),
        }
    }

    /// Inverse of the flat matrix, which is again doubled-up.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let inv = linalg::inverse(&self.embed())?;
        let n = self.rows();
        Some(Self {
            minus: inv.view((0, 0), (n, n)).into_owned(),
            plus: inv.view((0, n), (n, n)).into_owned(),
        })
    }

    /// Largest entry modulus of the flat matrix.
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.minus).max(max_abs(&self.plus))
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.minus, &other.minus).max(max_abs_diff(&self.plus, &other.plus))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.minus.shape() == other.minus.shape() && self.max_diff(other) <= tol
    }

    pub fn is_finite(&self) -> bool {
        linalg::all_finite(&self.minus) && linalg::all_finite(&self.plus)
    }
}

/// Max deviation of a `2r × 2k` matrix from the doubled-up pattern.
pub fn structure_deviation(m: &CMatrix) -> Result<f64> {
    if m.nrows() % 2 != 0 || m.ncols() % 2 != 0 {
        return Err(Error::Dimension(format!(
            "doubled-up matrices have even dimensions, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let (r, k) = (m.nrows() / 2, m.ncols() / 2);
    let top_left = m.view((0, 0), (r, k)).into_owned();
    let top_right = m.view((0, k), (r, k)).into_owned();
    let bottom_left = m.view((r, 0), (r, k)).into_owned();
    let bottom_right = m.view((r, k), (r, k)).into_owned();
    Ok(max_abs_diff(&bottom_left, &conj(&top_right)).max(max_abs_diff(&bottom_right, &conj(&top_left))))
}

/// `J X† J` for an arbitrary `2r × 2k` matrix (not necessarily doubled-up).
///
/// Transfer-function values off the real axis are full matrices, so the
/// symplectic test on them needs this form.
pub fn flat_full(x: &CMatrix) -> CMatrix {
    let (rr, kk) = x.shape();
    let (r, k) = (rr / 2, kk / 2);
    CMatrix::from_fn(kk, rr, |i, j| {
        let sign = if (i < k) == (j < r) { 1.0 } else { -1.0 };
        x[(j, i)].conj() * sign
    })
}

/// `J = diag(I, −I)` of size `2n`.
pub fn j_matrix(n: usize) -> CMatrix {
    CMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i != j {
            real(0.0)
        } else if i < n {
            real(1.0)
        } else {
            real(-1.0)
        }
    })
}

pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

impl Mul for &DoubledMatrix {
    type Output = DoubledMatrix;

    /// # Panics
    /// On mismatched inner dimensions; use [`DoubledMatrix::try_mul`] to
    /// get an error instead.
    fn mul(self, rhs: &DoubledMatrix) -> DoubledMatrix {
        self.try_mul(rhs).expect("doubled product dimension mismatch")
    }
}

impl Add for &DoubledMatrix {
    type Output = DoubledMatrix;

    fn add(self, rhs: &DoubledMatrix) -> DoubledMatrix {
        DoubledMatrix::from_blocks(&self.minus + &rhs.minus, &self.plus + &rhs.plus)
    }
}

impl Sub for &DoubledMatrix {
    type Output = DoubledMatrix;

    fn sub(self, rhs: &DoubledMatrix) -> DoubledMatrix {
        DoubledMatrix::from_blocks(&self.minus - &rhs.minus, &self.plus - &rhs.plus)
    }
}

impl Neg for &DoubledMatrix {
    type Output = DoubledMatrix;

    fn neg(self) -> DoubledMatrix {
        DoubledMatrix::from_blocks(-&self.minus, -&self.plus)
    }
}

impl Neg for DoubledMatrix {
    type Output = DoubledMatrix;

    fn neg(self) -> DoubledMatrix {
        -&self
    }
}
