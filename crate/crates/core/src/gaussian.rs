//! Zero-mean Gaussian field states described by `N = ⟨a# aᵀ⟩` and
//! `M = ⟨a aᵀ⟩`, and their dilation onto vacuum modes.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::doubled::DoubledMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, c, conj, hermitian_residual, max_abs, real, symmetric_residual, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum StateKind {
    Vacuum(usize),
    Scalar { n: f64, m: Complex64 },
    General { n: CMatrix, m: CMatrix },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_mat: CMatrix,
    m_mat: CMatrix,
    mean: Vec<Complex64>,
}

impl GaussianState {
    pub fn new(n_mat: CMatrix, m_mat: CMatrix, tol: f64) -> Result<Self> {
        let k = n_mat.nrows();
        if n_mat.shape() != (k, k) || m_mat.shape() != (k, k) {
            return Err(Error::Dimension(alloc::format!(
                "N is {:?} and M is {:?}; both must be square and equal",
                n_mat.shape(),
                m_mat.shape()
            )));
        }
        let state = Self {
            n_mat,
            m_mat,
            mean: alloc::vec![c(0.0, 0.0); k],
        };
        state.validate(tol)?;
        Ok(state)
    }

    pub fn with_mean(mut self, mean: Vec<Complex64>) -> Result<Self> {
        if mean.len() != self.modes() {
            return Err(Error::Dimension(alloc::format!(
                "mean has length {} for {} modes",
                mean.len(),
                self.modes()
            )));
        }
        self.mean = mean;
        Ok(self)
    }

    pub fn modes(&self) -> usize {
        self.n_mat.nrows()
    }

    pub fn n_mat(&self) -> &CMatrix {
        &self.n_mat
    }

    pub fn m_mat(&self) -> &CMatrix {
        &self.m_mat
    }

    pub fn mean(&self) -> &[Complex64] {
        &self.mean
    }

    fn scale(&self) -> f64 {
        1.0 + max_abs(&self.n_mat) + max_abs(&self.m_mat)
    }

    /// Checks Hermiticity of `N`, symmetry of `M` and positivity of `F`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let h = hermitian_residual(&self.n_mat);
        if h > tol {
            return Err(Error::InvalidCovariance(alloc::format!(
                "N is not Hermitian (residual {h:e})"
            )));
        }
        let s = symmetric_residual(&self.m_mat);
        if s > tol {
            return Err(Error::InvalidCovariance(alloc::format!(
                "M is not symmetric (residual {s:e})"
            )));
        }
        let (values, _) = linalg::hermitian_eigen(&self.covariance_f())?;
        if let Some(&lowest) = values.last() {
            if lowest < -tol * self.scale() {
                return Err(Error::InvalidCovariance(alloc::format!(
                    "F has negative eigenvalue {lowest:e}"
                )));
            }
        }
        Ok(())
    }

    /// `F = [[I + Nᵀ, M], [M†, N]]`.
    pub fn covariance_f(&self) -> CMatrix {
        let k = self.modes();
        let mut f = CMatrix::zeros(2 * k, 2 * k);
        f.view_mut((0, 0), (k, k))
            .copy_from(&(linalg::identity(k) + self.n_mat.transpose()));
        f.view_mut((0, k), (k, k)).copy_from(&self.m_mat);
        f.view_mut((k, 0), (k, k)).copy_from(&self.m_mat.adjoint());
        f.view_mut((k, k), (k, k)).copy_from(&self.n_mat);
        f
    }

    pub fn ito_table(&self) -> ItoTable {
        ItoTable {
            db_dbdag: linalg::identity(self.modes()) + self.n_mat.transpose(),
            db_db: self.m_mat.clone(),
            dbdag_dbdag: conj(&self.m_mat),
            dbdag_db: self.n_mat.clone(),
        }
    }
}

pub fn make_state(kind: StateKind, tol: f64) -> Result<GaussianState> {
    match kind {
        StateKind::Vacuum(k) => GaussianState::new(CMatrix::zeros(k, k), CMatrix::zeros(k, k), tol),
        StateKind::Scalar { n, m } => GaussianState::new(linalg::scalar(real(n)), linalg::scalar(m), tol),
        StateKind::General { n, m } => GaussianState::new(n, m, tol),
    }
}

pub fn covariance_f(s: &GaussianState) -> CMatrix {
    s.covariance_f()
}

pub fn ito_table(s: &GaussianState) -> ItoTable {
    s.ito_table()
}

/// Coefficients of the second-order differential products of the noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ItoTable {
    /// `dB dB†` coefficient, `I + Nᵀ`.
    pub db_dbdag: CMatrix,
    /// `dB dBᵀ` coefficient, `M`.
    pub db_db: CMatrix,
    /// `dB# dB†` coefficient, `M#`.
    pub dbdag_dbdag: CMatrix,
    /// `dB# dBᵀ` coefficient, `N`.
    pub dbdag_db: CMatrix,
}

/// Vacuum dilation of a Gaussian state: `a = E0− b + E0+ b#` for `2m`
/// vacuum modes `b = (b1, b2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArakiWoodsFactors {
    /// Unitary with `V† N V` diagonal, eigenvalues descending.
    pub v_diag: CMatrix,
    pub eigenvalues: Vec<f64>,
    pub kept_modes: Vec<usize>,
    pub x_mat: CMatrix,
    pub y_mat: CMatrix,
    pub z_mat: CMatrix,
    /// `m × 2m` blocks of the dilation in the original mode basis.
    pub e0_minus: CMatrix,
    pub e0_plus: CMatrix,
}

impl ArakiWoodsFactors {
    pub fn dilation(&self) -> DoubledMatrix {
        DoubledMatrix::from_blocks(self.e0_minus.clone(), self.e0_plus.clone())
    }

    /// Max of `‖XX† − YY† + ZZ† − I‖` and `‖YZᵀ − ZYᵀ‖`.
    pub fn condition_residual(&self) -> f64 {
        let (x, y, z) = (&self.x_mat, &self.y_mat, &self.z_mat);
        let p = x.nrows();
        let first = x * x.adjoint() - y * y.adjoint() + z * z.adjoint() - linalg::identity(p);
        let second = y * z.transpose() - z * y.transpose();
        max_abs(&first).max(max_abs(&second))
    }

    /// `‖S0 S0♭ − I‖` for the rectangular dilation.
    pub fn dilation_residual(&self) -> f64 {
        let d = self.dilation();
        let prod = &d * &d.flat();
        prod.max_diff(&DoubledMatrix::identity(d.rows()))
    }

    /// `(N, M)` recomputed from the dilation acting on vacuum inputs.
    pub fn moments(&self) -> (CMatrix, CMatrix) {
        moments_of_dilation(&self.dilation())
    }
}

/// For `a = E− b + E+ b#` with vacuum `b`: `N = (E+ E+†)#`, `M = E− E+ᵀ`.
pub fn moments_of_dilation(d: &DoubledMatrix) -> (CMatrix, CMatrix) {
    let n = conj(&(d.plus() * d.plus().adjoint()));
    let m = d.minus() * d.plus().transpose();
    (n, m)
}

pub fn araki_woods(s: &GaussianState, tol: f64) -> Result<ArakiWoodsFactors> {
    if s.mean.iter().any(|z| z.norm() > tol) {
        return Err(Error::NonZeroMean);
    }
    let k = s.modes();
    let (eigenvalues, v) = linalg::hermitian_eigen(&s.n_mat)?;
    // rotated modes a' = Vᵀ a carry N' = V† N V and M' = Vᵀ M V
    let m_rot = v.transpose() * &s.m_mat * &v;
    let cutoff = 1e-10 * (1.0 + max_abs(&s.n_mat));
    let kept_modes: Vec<usize> = (0..k).filter(|&i| eigenvalues[i] >= cutoff).collect();
    let p = kept_modes.len();

    let coupling_tol = tol * s.scale();
    for j in p..k {
        let coupling = (0..k)
            .map(|i| m_rot[(i, j)].norm().max(m_rot[(j, i)].norm()))
            .fold(0.0, f64::max);
        if coupling > coupling_tol {
            return Err(Error::InconsistentZeroMode { mode: j, coupling });
        }
    }

    let y_mat = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        p,
        eigenvalues[..p].iter().map(|&v| real(v.sqrt())),
    ));
    let y_inv = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        p,
        eigenvalues[..p].iter().map(|&v| real(1.0 / v.sqrt())),
    ));
    let n_inv = &y_inv * &y_inv;
    let m_kept = m_rot.view((0, 0), (p, p)).into_owned();
    let inside = linalg::identity(p) + CMatrix::from_diagonal(&y_mat.diagonal().map(|z| z * z))
        - &m_kept * n_inv * m_kept.adjoint();
    let x_mat = linalg::psd_sqrt(&inside, coupling_tol).map_err(|_| {
        Error::InvalidCovariance("I + N - M N^-1 M^dag is not positive semidefinite".into())
    })?;
    let z_mat = &m_kept * &y_inv;

    // rotated-frame dilation; inputs ordered (b1, b2), dropped modes pass b1
    let mut em = CMatrix::zeros(k, 2 * k);
    let mut ep = CMatrix::zeros(k, 2 * k);
    em.view_mut((0, 0), (p, p)).copy_from(&x_mat);
    em.view_mut((0, k), (p, p)).copy_from(&z_mat);
    ep.view_mut((0, k), (p, p)).copy_from(&y_mat);
    for j in p..k {
        em[(j, j)] = c(1.0, 0.0);
    }
    let back = conj(&v);
    Ok(ArakiWoodsFactors {
        e0_minus: &back * em,
        e0_plus: &back * ep,
        v_diag: v,
        eigenvalues,
        kept_modes,
        x_mat,
        y_mat,
        z_mat,
    })
}

/// The state as the output of a static Bogoliubov map driven by `2m`
/// vacuum channels.
pub fn squeezed_field_component(s: &GaussianState, tol: f64) -> Result<DoubledMatrix> {
    let f = araki_woods(s, tol)?;
    let r = f.dilation_residual();
    if r > 1e-6 * s.scale() {
        return Err(Error::NumericalFailure(alloc::format!(
            "dilation misses S0 S0^flat = I by {r:e}"
        )));
    }
    Ok(f.dilation())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_bound() {
        assert!(make_state(StateKind::Scalar { n: 3.0, m: c(2.0, 0.0) }, 1e-9).is_ok());
        assert!(matches!(
            make_state(StateKind::Scalar { n: 1.0, m: c(2.0, 0.0) }, 1e-9),
            Err(Error::InvalidCovariance(_))
        ));
    }

    #[test]
    fn vacuum_covariance() {
        let s = make_state(StateKind::Vacuum(1), 1e-9).unwrap();
        assert_eq!(s.covariance_f(), linalg::from_real_rows(2, 2, &[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn vacuum_dilation_passes_first_input() {
        let s = make_state(StateKind::Vacuum(1), 1e-9).unwrap();
        let f = araki_woods(&s, 1e-9).unwrap();
        assert!(f.kept_modes.is_empty());
        assert_eq!(f.e0_minus, linalg::from_real_rows(1, 2, &[1.0, 0.0]));
        assert_eq!(f.e0_plus, CMatrix::zeros(1, 2));
    }

    #[test]
    fn nonzero_mean_rejected() {
        let s = make_state(StateKind::Vacuum(1), 1e-9)
            .unwrap()
            .with_mean(alloc::vec![c(1.0, 0.0)])
            .unwrap();
        assert_eq!(araki_woods(&s, 1e-9), Err(Error::NonZeroMean));
    }
}
