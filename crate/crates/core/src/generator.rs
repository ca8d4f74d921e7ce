//! The Lie algebra `sp(C^m)`: Hamiltonian parameters `(Ω−, Ω+)`, their
//! exponentials and logarithms.
//!
//! A generator is stored by its parameters only. The derived views are
//! `Ω̃ = [[Ω−, Ω+], [−Ω+#, −Ω−#]]` and the doubled-up matrix
//! `−iΩ̃ = −Δ(iΩ−, iΩ+)`, whose exponential is the group element.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::doubled::{block_diag, DoubledMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, c, conj, hermitian_residual, max_abs, symmetric_residual, CMatrix};
use crate::symplectic::SymplecticMatrix;
use crate::DEFAULT_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct SpGenerator {
    omega_minus: CMatrix,
    omega_plus: CMatrix,
}

impl SpGenerator {
    /// Validates that `Ω−` is Hermitian and `Ω+` symmetric within `tol`.
    pub fn new(omega_minus: CMatrix, omega_plus: CMatrix, tol: f64) -> Result<Self> {
        let m = omega_minus.nrows();
        if omega_minus.shape() != (m, m) || omega_plus.shape() != (m, m) {
            return Err(Error::Dimension(format!(
                "generator blocks must be square and equal, got {:?} and {:?}",
                omega_minus.shape(),
                omega_plus.shape()
            )));
        }
        let h = hermitian_residual(&omega_minus);
        if h > tol {
            return Err(Error::InvalidGenerator(format!(
                "omega_minus is not Hermitian (residual {h:e})"
            )));
        }
        let s = symmetric_residual(&omega_plus);
        if s > tol {
            return Err(Error::InvalidGenerator(format!(
                "omega_plus is not symmetric (residual {s:e})"
            )));
        }
        Ok(Self {
            omega_minus,
            omega_plus,
        })
    }

    /// One-mode generator with parameters `ω−` (real) and `ω+`.
    pub fn scalar(omega_minus: f64, omega_plus: Complex64) -> Self {
        Self {
            omega_minus: linalg::scalar(c(omega_minus, 0.0)),
            omega_plus: linalg::scalar(omega_plus),
        }
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            omega_minus: CMatrix::zeros(m, m),
            omega_plus: CMatrix::zeros(m, m),
        }
    }

    pub fn modes(&self) -> usize {
        self.omega_minus.nrows()
    }

    pub fn omega_minus(&self) -> &CMatrix {
        &self.omega_minus
    }

    pub fn omega_plus(&self) -> &CMatrix {
        &self.omega_plus
    }

    /// `−iΩ̃ = Δ(−iΩ−, −iΩ+)`.
    pub fn neg_i_omega(&self) -> DoubledMatrix {
        let mi = c(0.0, -1.0);
        DoubledMatrix::from_blocks(&self.omega_minus * mi, &self.omega_plus * mi)
    }

    /// Recovers the parameters from a doubled-up `K = −iΩ̃`.
    pub fn from_neg_i_omega(k: &DoubledMatrix, tol: f64) -> Result<Self> {
        let i = c(0.0, 1.0);
        Self::new(k.minus() * i, k.plus() * i, tol)
    }

    /// The full `2m × 2m` matrix `Ω̃`.
    pub fn omega_tilde(&self) -> CMatrix {
        let m = self.modes();
        let mut out = CMatrix::zeros(2 * m, 2 * m);
        out.view_mut((0, 0), (m, m)).copy_from(&self.omega_minus);
        out.view_mut((0, m), (m, m)).copy_from(&self.omega_plus);
        out.view_mut((m, 0), (m, m)).copy_from(&-conj(&self.omega_plus));
        out.view_mut((m, m), (m, m)).copy_from(&-conj(&self.omega_minus));
        out
    }

    /// `Im♭X = (X − X♭)/(2i)` read as a generator `Ω̃`.
    pub fn im_flat(x: &DoubledMatrix) -> Self {
        assert!(x.is_square(), "Im-flat needs a square doubled matrix");
        // 1/(2i) = −i/2
        Self {
            omega_minus: (x.minus() - x.minus().adjoint()) * c(0.0, -0.5),
            omega_plus: (x.plus() + x.plus().transpose()) * c(0.0, -0.5),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            omega_minus: &self.omega_minus + &other.omega_minus,
            omega_plus: &self.omega_plus + &other.omega_plus,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            omega_minus: -&self.omega_minus,
            omega_plus: -&self.omega_plus,
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            omega_minus: block_diag(&self.omega_minus, &other.omega_minus),
            omega_plus: block_diag(&self.omega_plus, &other.omega_plus),
        }
    }

    /// Re-indexes onto a larger register: mode `i` goes to `map[i]`.
    pub fn embed_into(&self, map: &[usize], total: usize) -> Self {
        let mut om = CMatrix::zeros(total, total);
        let mut op = CMatrix::zeros(total, total);
        for (i, &a) in map.iter().enumerate() {
            for (j, &b) in map.iter().enumerate() {
                om[(a, b)] = self.omega_minus[(i, j)];
                op[(a, b)] = self.omega_plus[(i, j)];
            }
        }
        Self {
            omega_minus: om,
            omega_plus: op,
        }
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_diff(&self.omega_minus, &other.omega_minus)
            .max(linalg::max_abs_diff(&self.omega_plus, &other.omega_plus))
    }

    pub fn max_norm(&self) -> f64 {
        max_abs(&self.omega_minus).max(max_abs(&self.omega_plus))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_norm() <= tol
    }

    /// `e^{−iΩ̃}`.
    pub fn exp(&self) -> SymplecticMatrix {
        exp_generator(self)
    }
}

/// The matrix exponential of `−iΩ̃`.
pub fn exp_generator(g: &SpGenerator) -> SymplecticMatrix {
    let k = g.neg_i_omega();
    let e = linalg::expm(&k.embed());
    // exp of a doubled-up matrix is doubled-up; re-symmetrize rounding noise
    let m = g.modes();
    let minus = (e.view((0, 0), (m, m)).into_owned() + conj(&e.view((m, m), (m, m)).into_owned())) * c(0.5, 0.0);
    let plus = (e.view((0, m), (m, m)).into_owned() + conj(&e.view((m, 0), (m, m)).into_owned())) * c(0.5, 0.0);
    SymplecticMatrix::new_unchecked(DoubledMatrix::from_blocks(minus, plus))
}

/// Outcome of [`try_log`].
#[derive(Debug, Clone, PartialEq)]
pub enum LogResult {
    /// `S = exp(−iΩ̃)` for the principal logarithm.
    Single(SpGenerator),
    /// `S = exp(g1) · exp(g2)` with `g1 = (π, 0)`, for one-mode elements
    /// such as `−Δ(cosh u, sinh u)` that have no logarithm.
    TwoFactor(SpGenerator, SpGenerator),
    NoLog(String),
}

/// Looks for a generator of `s` via the principal matrix logarithm.
pub fn try_log(s: &SymplecticMatrix) -> LogResult {
    match principal_generator(s.as_doubled()) {
        Ok(g) => return LogResult::Single(g),
        Err(reason) if s.modes() != 1 => return LogResult::NoLog(reason),
        Err(_) => {}
    }
    let negated = -s.as_doubled();
    match principal_generator(&negated) {
        Ok(g2) => LogResult::TwoFactor(SpGenerator::scalar(core::f64::consts::PI, c(0.0, 0.0)), g2),
        Err(reason) => LogResult::NoLog(format!("neither S nor -S has a generator: {reason}")),
    }
}

fn principal_generator(s: &DoubledMatrix) -> core::result::Result<SpGenerator, String> {
    let flat = s.embed();
    let ev = linalg::eigenvalues(&flat).map_err(|e| format!("{e}"))?;
    let scale = 1.0 + max_abs(&flat);
    if let Some(bad) = ev
        .iter()
        .find(|z| z.re <= 0.0 && z.im.abs() <= 1e-8 * scale)
    {
        return Err(format!("eigenvalue {bad} on the closed negative real axis"));
    }
    let l = linalg::logm(&flat).map_err(|e| format!("{e}"))?;
    let k = DoubledMatrix::extract(&l, 1e-7 * scale)
        .map_err(|e| format!("logarithm is not doubled-up: {e}"))?;
    let g = SpGenerator::from_neg_i_omega(&k, 1e-7 * scale).map_err(|e| format!("{e}"))?;
    // symmetrize away rounding noise before returning
    let g = SpGenerator {
        omega_minus: (&g.omega_minus + g.omega_minus.adjoint()) * c(0.5, 0.0),
        omega_plus: (&g.omega_plus + g.omega_plus.transpose()) * c(0.5, 0.0),
    };
    let back = exp_generator(&g);
    let err = back.as_doubled().max_diff(s);
    if err > DEFAULT_TOL * scale {
        return Err(format!("exp(log S) misses S by {err:e}"));
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorAnalysis {
    /// `ζ = |ω+|² − ω−²`, one-mode generators only.
    pub zeta: Option<f64>,
    /// Eigenvalues of `−iΩ̃`, sorted by real then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub passive: bool,
    /// Equivalent one-mode generator with one parameter removed.
    pub normal_form: Option<SpGenerator>,
}

pub fn analyze_generator(g: &SpGenerator, tol: f64) -> Result<GeneratorAnalysis> {
    let eigenvalues = linalg::eigenvalues(&g.neg_i_omega().embed())?;
    // Ω̃ has real spectrum iff −iΩ̃ has purely imaginary spectrum
    let passive = eigenvalues.iter().all(|z| z.re.abs() <= tol);
    let (zeta, normal_form) = if g.modes() == 1 {
        let wm = g.omega_minus[(0, 0)].re;
        let wp = g.omega_plus[(0, 0)];
        let zeta = wp.norm_sqr() - wm * wm;
        let normal = if zeta < -tol {
            let ratio = wp.norm() / wm.abs();
            Some(SpGenerator::scalar(wm * (1.0 - ratio * ratio).sqrt(), c(0.0, 0.0)))
        } else if zeta > tol {
            let ratio = wm.abs() / wp.norm();
            Some(SpGenerator::scalar(0.0, wp * (1.0 - ratio * ratio).sqrt()))
        } else {
            None
        };
        (Some(zeta), normal)
    } else {
        (None, None)
    };
    Ok(GeneratorAnalysis {
        zeta,
        eigenvalues,
        passive,
        normal_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_tilde_is_flat_hermitian() {
        let g = SpGenerator::scalar(0.3, c(0.2, -0.7));
        let w = g.omega_tilde();
        let j = crate::doubled::j_matrix(1);
        assert!(linalg::max_abs_diff(&(&j * w.adjoint() * &j), &w) < 1e-15);
    }

    #[test]
    fn im_flat_of_neg_i_omega_recovers_omega() {
        // Im♭(−iΩ̃) = −Ω̃ since (−iΩ̃)♭ = iΩ̃
        let g = SpGenerator::scalar(0.4, c(1.0, 2.0));
        let back = SpGenerator::im_flat(&g.neg_i_omega());
        assert!(back.max_diff(&g.neg()) < 1e-15);
    }

    #[test]
    fn squeezing_generator_exponentiates_to_cosh_sinh() {
        let u = 0.8f64;
        let s = exp_generator(&SpGenerator::scalar(0.0, c(0.0, u)));
        let expected = DoubledMatrix::real_scalar(u.cosh(), u.sinh());
        assert!(s.as_doubled().approx_eq(&expected, 1e-14));
    }

    #[test]
    fn pi_rotation_is_minus_identity() {
        let s = exp_generator(&SpGenerator::scalar(core::f64::consts::PI, c(0.0, 0.0)));
        assert!(s.as_doubled().approx_eq(&DoubledMatrix::real_scalar(-1.0, 0.0), 1e-14));
    }

    #[test]
    fn non_hermitian_minus_block_rejected() {
        let om = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let r = SpGenerator::new(om, CMatrix::zeros(2, 2), 1e-9);
        assert!(matches!(r, Err(Error::InvalidGenerator(_))));
    }
}
