//! State-space realizations `(Ã, B̃, C̃, D̃)` and Hurwitz stability.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::component::LinearComponent;
use crate::doubled::DoubledMatrix;
use crate::error::{Error, Result};
use crate::generator::SpGenerator;
use crate::linalg::{self, c};
use crate::symplectic::{symplectic_residual, SymplecticMatrix};

/// `dă = Ã ă dt + B̃ dB̆`, `dB̆out = C̃ ă dt + D̃ dB̆`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub a_tilde: DoubledMatrix,
    pub b_tilde: DoubledMatrix,
    pub c_tilde: DoubledMatrix,
    pub d_tilde: DoubledMatrix,
}

impl StateSpace {
    pub fn modes(&self) -> usize {
        self.a_tilde.rows()
    }

    pub fn channels(&self) -> usize {
        self.d_tilde.rows()
    }
}

/// `Ã = −½C̃♭C̃ − iΩ̃`, `B̃ = −C̃♭S̃`, `D̃ = S̃`.
pub fn realize(g: &LinearComponent) -> StateSpace {
    let c_tilde = g.c_tilde().clone();
    let c_flat = c_tilde.flat();
    let a_tilde = &(&c_flat * &c_tilde).scale(-0.5) + &g.omega().neg_i_omega();
    let b_tilde = -(&c_flat * g.s_tilde().as_doubled());
    StateSpace {
        a_tilde,
        b_tilde,
        c_tilde,
        d_tilde: g.s_tilde().as_doubled().clone(),
    }
}

/// Verifies the physical-realizability identities and recovers the
/// component parameters.
pub fn check_physical(ss: &StateSpace, tol: f64) -> Result<LinearComponent> {
    let (n, m) = (ss.channels(), ss.modes());
    let shapes_ok = ss.a_tilde.rows() == m
        && ss.a_tilde.cols() == m
        && ss.b_tilde.rows() == m
        && ss.b_tilde.cols() == n
        && ss.c_tilde.rows() == n
        && ss.c_tilde.cols() == m
        && ss.d_tilde.cols() == n;
    if !shapes_ok {
        return Err(Error::Dimension("inconsistent state-space block shapes".into()));
    }
    let residual = symplectic_residual(&ss.d_tilde);
    if residual > tol {
        return Err(Error::NotRealizable {
            identity: "D symplectic",
            residual,
        });
    }
    let c_flat = ss.c_tilde.flat();
    let residual = ss.b_tilde.max_diff(&-(&c_flat * &ss.d_tilde));
    if residual > tol {
        return Err(Error::NotRealizable {
            identity: "B = -C^flat D",
            residual,
        });
    }
    let cfc = &c_flat * &ss.c_tilde;
    let residual = (&ss.a_tilde + &ss.a_tilde.flat()).max_diff(&-&cfc);
    if residual > tol {
        return Err(Error::NotRealizable {
            identity: "A + A^flat = -C^flat C",
            residual,
        });
    }
    let k = &ss.a_tilde + &cfc.scale(0.5);
    let omega = SpGenerator::from_neg_i_omega(&k, tol).map_err(|_| Error::NotRealizable {
        identity: "Hamiltonian symmetry",
        residual: f64::NAN,
    })?;
    let s = SymplecticMatrix::new(ss.d_tilde.clone(), tol)?;
    LinearComponent::from_parts(s, ss.c_tilde.clone(), omega)
}

/// Closed-form one-mode criteria: eigenvalues `−½(γ−−γ+) ± √ζ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormStability {
    pub zeta: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    /// `ζ ≤ 0` and `γ− > γ+`.
    pub criterion_1: bool,
    /// `ζ > 0` and `√ζ < ½(γ− − γ+)`.
    pub criterion_2: bool,
    pub eigenvalues: [Complex64; 2],
}

impl ClosedFormStability {
    pub fn hurwitz(&self) -> bool {
        self.criterion_1 || self.criterion_2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// Eigenvalues of the embedded `Ã`, sorted by real then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    /// Largest real part, with values within rounding of zero snapped to 0.
    pub spectral_abscissa: f64,
    pub hurwitz: bool,
    pub closed_form: Option<ClosedFormStability>,
}

pub fn stability(ss: &StateSpace) -> Result<StabilityReport> {
    let a = ss.a_tilde.embed();
    let eigenvalues = linalg::eigenvalues(&a)?;
    let raw = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let snap = 1e-12 * (1.0 + linalg::max_abs(&a));
    let spectral_abscissa = if raw.abs() <= snap { 0.0 } else { raw };
    let closed_form = (ss.modes() == 1).then(|| closed_form(ss));
    Ok(StabilityReport {
        hurwitz: spectral_abscissa < 0.0,
        eigenvalues,
        spectral_abscissa,
        closed_form,
    })
}

fn closed_form(ss: &StateSpace) -> ClosedFormStability {
    let cm = ss.c_tilde.minus();
    let cp = ss.c_tilde.plus();
    let gamma_minus: f64 = cm.iter().map(|z| z.norm_sqr()).sum();
    let gamma_plus: f64 = cp.iter().map(|z| z.norm_sqr()).sum();
    // −iΩ̃ = Ã + ½C̃♭C̃ = Δ(−iω−, −iω+)
    let k = &ss.a_tilde + &(&ss.c_tilde.flat() * &ss.c_tilde).scale(0.5);
    let omega_minus = (k.minus()[(0, 0)] * c(0.0, 1.0)).re;
    let omega_plus = k.plus()[(0, 0)] * c(0.0, 1.0);
    let zeta = omega_plus.norm_sqr() - omega_minus * omega_minus;
    let centre = -0.5 * (gamma_minus - gamma_plus);
    let root = Complex64::new(zeta, 0.0).sqrt();
    // same rounding margin as the numeric spectral abscissa
    let margin = 1e-12 * (1.0 + gamma_minus + gamma_plus + omega_minus.abs() + omega_plus.norm());
    ClosedFormStability {
        zeta,
        gamma_minus,
        gamma_plus,
        criterion_1: zeta <= 0.0 && centre < -margin,
        criterion_2: zeta > 0.0 && centre + zeta.sqrt() < -margin,
        eigenvalues: [c(centre, 0.0) - root, c(centre, 0.0) + root],
    }
}
