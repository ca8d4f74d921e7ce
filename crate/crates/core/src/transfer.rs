//! Transfer functions `Ξ(s) = C̃(sI − Ã)⁻¹B̃ + D̃`.
//!
//! Values are full `2n × 2n` matrices
//! `[[Ξ−(s), Ξ+(s)], [Ξ+(s*)#, Ξ−(s*)#]]`. They are doubled-up only for
//! real `s`; use [`crate::doubled::flat_full`] for the `♭` of a value.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::component::{series, LinearComponent};
use crate::doubled::{flat_full, DoubledMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, c, max_abs, max_abs_diff, CMatrix};
use crate::state_space::{realize, StateSpace};

#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    ss: StateSpace,
    a_full: CMatrix,
    b_full: CMatrix,
    c_full: CMatrix,
    d_full: CMatrix,
    poles: Vec<Complex64>,
}

impl TransferFunction {
    pub fn new(ss: StateSpace) -> Result<Self> {
        let a_full = ss.a_tilde.embed();
        let poles = linalg::eigenvalues(&a_full)?;
        Ok(Self {
            b_full: ss.b_tilde.embed(),
            c_full: ss.c_tilde.embed(),
            d_full: ss.d_tilde.embed(),
            a_full,
            poles,
            ss,
        })
    }

    pub fn of(g: &LinearComponent) -> Result<Self> {
        Self::new(realize(g))
    }

    pub fn state_space(&self) -> &StateSpace {
        &self.ss
    }

    pub fn channels(&self) -> usize {
        self.ss.channels()
    }

    /// Eigenvalues of the embedded `Ã`.
    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    fn check_pole(&self, s: Complex64) -> Result<()> {
        let threshold = 1e-12 * (1.0 + s.norm() + max_abs(&self.a_full));
        match self
            .poles
            .iter()
            .min_by(|a, b| (s - **a).norm().total_cmp(&(s - **b).norm()))
        {
            Some(&pole) if (s - pole).norm() <= threshold => Err(Error::PoleHit { s, pole }),
            _ => Ok(()),
        }
    }

    /// Full `2n × 2n` value at `s`.
    pub fn eval(&self, s: Complex64) -> Result<CMatrix> {
        self.check_pole(s)?;
        let k = self.a_full.nrows();
        if k == 0 {
            return Ok(self.d_full.clone());
        }
        let resolvent = linalg::identity(k) * s - &self.a_full;
        let x = linalg::solve(&resolvent, &self.b_full).ok_or(Error::PoleHit { s, pole: s })?;
        Ok(&self.d_full + &self.c_full * x)
    }

    /// Value at real `s`, where it is doubled-up.
    pub fn eval_real(&self, s: f64) -> Result<DoubledMatrix> {
        let v = self.eval(c(s, 0.0))?;
        DoubledMatrix::extract(&v, 1e-9 * (1.0 + max_abs(&v)))
    }

    pub fn sweep(&self, omegas: &[f64]) -> FrequencySweep {
        let points = omegas
            .iter()
            .map(|&omega| match self.eval(c(0.0, omega)) {
                Ok(value) => FreqValue {
                    omega,
                    symplectic_residual: Some(full_symplectic_residual(&value)),
                    value: Some(value),
                    pole: false,
                },
                Err(_) => FreqValue {
                    omega,
                    value: None,
                    symplectic_residual: None,
                    pole: true,
                },
            })
            .collect();
        FrequencySweep { points }
    }

    /// Impulse kernel `σ(t) = −C̃ e^{Ãt} C̃♭ D̃`; the `δ(t) D̃` term is kept
    /// apart as `feedthrough`.
    pub fn impulse(&self, t: f64) -> Result<ImpulseResponse> {
        if !(t >= 0.0) {
            return Err(Error::Parameter("impulse response needs t >= 0".into()));
        }
        let n = self.channels();
        let sigma = if self.a_full.nrows() == 0 {
            DoubledMatrix::zeros(n, n)
        } else {
            let e = linalg::expm(&(&self.a_full * c(t, 0.0)));
            let full = &self.c_full * e * &self.b_full;
            DoubledMatrix::extract(&full, 1e-8 * (1.0 + max_abs(&full)))?
        };
        Ok(ImpulseResponse {
            sigma,
            feedthrough: self.ss.d_tilde.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    pub sigma: DoubledMatrix,
    pub feedthrough: DoubledMatrix,
}

/// `‖Ξ♭Ξ − I‖` for a full value.
pub fn full_symplectic_residual(value: &CMatrix) -> f64 {
    let prod = flat_full(value) * value;
    max_abs_diff(&prod, &linalg::identity(prod.nrows()))
}

pub fn eval_tf(ss: &StateSpace, s: Complex64) -> Result<CMatrix> {
    TransferFunction::new(ss.clone())?.eval(s)
}

pub fn poles(ss: &StateSpace) -> Result<Vec<Complex64>> {
    Ok(TransferFunction::new(ss.clone())?.poles)
}

pub fn sweep(ss: &StateSpace, omegas: &[f64]) -> Result<FrequencySweep> {
    Ok(TransferFunction::new(ss.clone())?.sweep(omegas))
}

pub fn impulse(ss: &StateSpace, t: f64) -> Result<ImpulseResponse> {
    TransferFunction::new(ss.clone())?.impulse(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreqValue {
    pub omega: f64,
    pub value: Option<CMatrix>,
    pub symplectic_residual: Option<f64>,
    pub pole: bool,
}

/// Values along `s = iω`, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySweep {
    pub points: Vec<FreqValue>,
}

impl FrequencySweep {
    pub fn omegas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.omega).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.points
            .iter()
            .filter_map(|p| p.symplectic_residual)
            .fold(0.0, f64::max)
    }
}

/// A value in the quadrature basis `x = ½(b + b#)`, `y = (1/2i)(b − b#)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureResponse {
    pub xi_x: CMatrix,
    pub xi_y: CMatrix,
    /// The full transformed matrix `[[xx, xy], [yx, yy]]`.
    pub full: CMatrix,
}

pub fn quadrature_tf(value: &CMatrix) -> QuadratureResponse {
    let n = value.nrows() / 2;
    let half = c(0.5, 0.0);
    let minus_half_i = c(0.0, -0.5);
    let i = c(0.0, 1.0);
    let q = CMatrix::from_fn(2 * n, 2 * n, |r, k| {
        if r % n != k % n {
            return c(0.0, 0.0);
        }
        match (r < n, k < n) {
            (true, _) => half,
            (false, true) => minus_half_i,
            (false, false) => -minus_half_i,
        }
    });
    let q_inv = CMatrix::from_fn(2 * n, 2 * n, |r, k| {
        if r % n != k % n {
            return c(0.0, 0.0);
        }
        match (r < n, k < n) {
            (_, true) => c(1.0, 0.0),
            (true, false) => i,
            (false, false) => -i,
        }
    });
    let full = q * value * q_inv;
    QuadratureResponse {
        xi_x: full.view((0, 0), (n, n)).into_owned(),
        xi_y: full.view((n, n), (n, n)).into_owned(),
        full,
    }
}

/// `(Ã − B̃D̃⁻¹C̃, B̃D̃⁻¹, −D̃⁻¹C̃, D̃⁻¹)`. Not in general a physical
/// realization.
pub fn inverse_realization(ss: &StateSpace) -> Result<StateSpace> {
    let d_inv = ss
        .d_tilde
        .inverse()
        .ok_or_else(|| Error::NumericalFailure("feedthrough is singular".into()))?;
    let b_dinv = &ss.b_tilde * &d_inv;
    Ok(StateSpace {
        a_tilde: &ss.a_tilde - &(&b_dinv * &ss.c_tilde),
        b_tilde: b_dinv,
        c_tilde: -(&d_inv * &ss.c_tilde),
        d_tilde: d_inv,
    })
}

/// `Ξ(s)⁻¹` through the inverse quadruple; fails at transmission zeros.
pub fn inverse_tf(ss: &StateSpace, s: Complex64) -> Result<CMatrix> {
    let inv = TransferFunction::new(inverse_realization(ss)?)?;
    inv.eval(s).map_err(|e| match e {
        Error::PoleHit { s, pole } => Error::ZeroHit { s, zero: pole },
        other => other,
    })
}

/// `max ‖Ξ_{g2◁g1}(s) − Ξ_{g2}(s) Ξ_{g1}(s)‖` over `samples`, for
/// components on separate modes.
pub fn cascade_check(g2: &LinearComponent, g1: &LinearComponent, samples: &[Complex64]) -> Result<f64> {
    if let Some(l) = g1.mode_labels().iter().find(|l| g2.mode_labels().contains(l)) {
        return Err(Error::SharedModes(l.clone()));
    }
    let joint = TransferFunction::of(&series(g2, g1)?)?;
    let t1 = TransferFunction::of(g1)?;
    let t2 = TransferFunction::of(g2)?;
    let mut worst: f64 = 0.0;
    for &s in samples {
        let lhs = joint.eval(s)?;
        let rhs = t2.eval(s)? * t1.eval(s)?;
        worst = worst.max(max_abs_diff(&lhs, &rhs));
    }
    Ok(worst)
}
