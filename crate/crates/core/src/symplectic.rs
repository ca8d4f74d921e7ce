//! The Bogoliubov group `Sp(C^m)` and the Shale decomposition.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::doubled::DoubledMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, conj, real, CMatrix};

/// A doubled-up matrix satisfying `S♭S = SS♭ = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    delta: DoubledMatrix,
    tolerance: f64,
}

/// Max of `‖S♭S − I‖` and `‖SS♭ − I‖`; `∞` for non-square input.
pub fn symplectic_residual(d: &DoubledMatrix) -> f64 {
    if !d.is_square() {
        return f64::INFINITY;
    }
    let id = DoubledMatrix::identity(d.rows());
    let flat = d.flat();
    (&flat * d).max_diff(&id).max((d * &flat).max_diff(&id))
}

/// Returns whether `d` is symplectic within `tol`, together with the residual.
pub fn is_symplectic(d: &DoubledMatrix, tol: f64) -> (bool, f64) {
    let r = symplectic_residual(d);
    (r <= tol, r)
}

impl SymplecticMatrix {
    pub fn new(delta: DoubledMatrix, tolerance: f64) -> Result<Self> {
        let residual = symplectic_residual(&delta);
        if residual > tolerance || residual.is_nan() {
            return Err(Error::NonSymplectic { residual });
        }
        Ok(Self { delta, tolerance })
    }

    /// Wraps a matrix that is symplectic by construction.
    pub(crate) fn new_unchecked(delta: DoubledMatrix) -> Self {
        Self {
            delta,
            tolerance: crate::DEFAULT_TOL,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new_unchecked(DoubledMatrix::identity(n))
    }

    /// `Δ(U, 0)`. Fails unless `U` is unitary within `tol`.
    pub fn passive(u: CMatrix, tol: f64) -> Result<Self> {
        Self::new(DoubledMatrix::passive(u), tol)
    }

    /// One-mode squeezer `Δ(cosh r, sinh r)`.
    pub fn squeezer(r: f64) -> Self {
        Self::new_unchecked(DoubledMatrix::real_scalar(r.cosh(), r.sinh()))
    }

    pub fn as_doubled(&self) -> &DoubledMatrix {
        &self.delta
    }

    pub fn into_doubled(self) -> DoubledMatrix {
        self.delta
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn modes(&self) -> usize {
        self.delta.rows()
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.delta)
    }

    /// The group inverse `S♭`.
    pub fn inverse(&self) -> Self {
        Self {
            delta: self.delta.flat(),
            tolerance: self.tolerance,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        Ok(Self {
            delta: self.delta.try_mul(&rhs.delta)?,
            tolerance: self.tolerance.max(rhs.tolerance),
        })
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            delta: self.delta.direct_sum(&other.delta),
            tolerance: self.tolerance.max(other.tolerance),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            delta: -&self.delta,
            tolerance: self.tolerance,
        }
    }
}

/// `S = Δ(s_out†, 0) · Δ(cosh R, sinh R) · Δ(s_in, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShaleFactors {
    pub s_in: CMatrix,
    pub s_out: CMatrix,
    /// Squeezing parameters, nonnegative and descending.
    pub r_diag: Vec<f64>,
}

impl ShaleFactors {
    pub fn recompose(&self) -> DoubledMatrix {
        let ch = diag(self.r_diag.iter().map(|r| r.cosh()));
        let sh = diag(self.r_diag.iter().map(|r| r.sinh()));
        let out = self.s_out.adjoint();
        DoubledMatrix::from_blocks(&out * ch * &self.s_in, &out * sh * conj(&self.s_in))
    }
}

fn diag(values: impl Iterator<Item = f64>) -> CMatrix {
    let v: Vec<Complex64> = values.map(real).collect();
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(v))
}

// Mixing weight used to split degenerate eigenvalues of Re Q and Im Q.
const MIX: f64 = 0.618_033_988_749_894_9;

/// Shale decomposition via an SVD of the minus block.
///
/// With `S− = W Σ Z†`, the matrix `M = W† S+ Z#` is symmetric and block
/// diagonal over groups of equal singular values. Each block equals
/// `sinh(R)·Q` with `Q` a symmetric unitary, which is split as `P Pᵀ`.
pub fn shale_decompose(s: &SymplecticMatrix) -> Result<ShaleFactors> {
    let residual = s.residual();
    if residual > s.tolerance() {
        return Err(Error::NonSymplectic { residual });
    }
    let m = s.modes();
    let d = s.as_doubled();
    let svd = minus_svd(d.minus())?;
    let (w, z) = (svd.u, svd.v);
    let big_m = w.adjoint() * d.plus() * conj(&z);
    let scale = 1.0 + d.max_norm();

    let mut p = CMatrix::zeros(m, m);
    let mut r_diag = alloc::vec![0.0; m];
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && (svd.sigma[start] - svd.sigma[end]).abs() <= 1e-7 * (1.0 + svd.sigma[start]) {
            end += 1;
        }
        let size = end - start;
        let block = big_m.view((start, start), (size, size)).into_owned();
        let sinh_b = block.norm() / (size as f64).sqrt();
        if sinh_b <= 1e-12 * scale {
            p.view_mut((start, start), (size, size)).copy_from(&linalg::identity(size));
        } else {
            let q = &block / real(sinh_b);
            let pb = symmetric_unitary_sqrt(&q)?;
            p.view_mut((start, start), (size, size)).copy_from(&pb);
            for r in &mut r_diag[start..end] {
                *r = sinh_b.asinh();
            }
        }
        start = end;
    }

    let s_out = p.adjoint() * w.adjoint();
    let s_in = p.adjoint() * z.adjoint();

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| r_diag[j].partial_cmp(&r_diag[i]).unwrap_or(core::cmp::Ordering::Equal));
    let permute_rows = |x: &CMatrix| CMatrix::from_fn(m, m, |i, j| x[(order[i], j)]);
    Ok(ShaleFactors {
        s_in: permute_rows(&s_in),
        s_out: permute_rows(&s_out),
        r_diag: order.iter().map(|&i| r_diag[i]).collect(),
    })
}

/// SVD of a minus block through the eigenvectors of `S−†S−`. Every
/// singular value is at least 1 (`S−S−† = I + S+S+†`), so `W = S− Z Σ⁻¹`
/// is accurate.
fn minus_svd(a: &CMatrix) -> Result<linalg::Svd> {
    let (lambda, z) = linalg::hermitian_eigen(&(a.adjoint() * a))?;
    let sigma: Vec<f64> = lambda.iter().map(|l| l.max(1.0).sqrt()).collect();
    let inv = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        sigma.len(),
        sigma.iter().map(|s| real(1.0 / s)),
    ));
    Ok(linalg::Svd {
        u: a * &z * inv,
        sigma,
        v: z,
    })
}

/// For a symmetric unitary `Q`, returns a unitary `P` with `P Pᵀ = Q`.
fn symmetric_unitary_sqrt(q: &CMatrix) -> Result<CMatrix> {
    let n = q.nrows();
    if n == 1 {
        let phase = q[(0, 0)].arg();
        return Ok(linalg::scalar(Complex64::from_polar(1.0, phase / 2.0)));
    }
    // Q = A + iB with A, B real symmetric and commuting, so one real
    // orthogonal O diagonalizes both.
    let mixed = DMatrix::<f64>::from_fn(n, n, |i, j| {
        let a = 0.5 * (q[(i, j)].re + q[(j, i)].re);
        let b = 0.5 * (q[(i, j)].im + q[(j, i)].im);
        a + MIX * b
    });
    let eig = SymmetricEigen::try_new(mixed, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NumericalFailure("real symmetric eigen did not converge".into()))?;
    let o = eig.eigenvectors.map(real);
    let d = o.transpose() * q * &o;
    let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        (0..n).map(|i| Complex64::from_polar(1.0, d[(i, i)].arg() / 2.0)),
    ));
    Ok(o * phases)
}
