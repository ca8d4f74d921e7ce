//! Dynamical Bogoliubov components `(S̃, C̃, Ω̃)`.
//!
//! A component with `n` field channels and `m` internal modes carries a
//! symplectic `S̃` over the channels, a coupling `C̃ = Δ(C−, C+)` with
//! `n × m` blocks and a generator `Ω̃` over the modes. Static components
//! are the `m = 0` case.
//!
//! Modes carry labels. The series product merges registers by label:
//! distinct labels give a direct sum of separate systems, shared labels
//! compose over the same mode.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::doubled::DoubledMatrix;
use crate::error::{Error, Result};
use crate::generator::SpGenerator;
use crate::linalg::{self, c, real, CMatrix};
use crate::symplectic::SymplecticMatrix;
use crate::DEFAULT_TOL;

/// Constructor parameters for [`make_component`].
#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKind {
    Static(DoubledMatrix),
    Identity(usize),
    Cavity { gamma: f64, omega: f64 },
    Dpa { kappa: f64, epsilon: f64 },
    Squeezer { r: f64 },
    /// Beamsplitter with `α = √ε`, `β = √(1−ε)`.
    Beamsplitter { epsilon: f64 },
    /// `S_b = [[α, −β], [β, α]]`.
    BeamsplitterAb { alpha: Complex64, beta: Complex64 },
    PhaseShift { theta: f64 },
    Custom {
        s: DoubledMatrix,
        c_minus: CMatrix,
        c_plus: CMatrix,
        omega_minus: CMatrix,
        omega_plus: CMatrix,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearComponent {
    s_tilde: SymplecticMatrix,
    c_tilde: DoubledMatrix,
    omega: SpGenerator,
    mode_labels: Vec<String>,
}

fn default_labels(m: usize) -> Vec<String> {
    match m {
        1 => alloc::vec!["a".to_string()],
        _ => (0..m).map(|i| format!("a{i}")).collect(),
    }
}

impl LinearComponent {
    pub fn new(
        s_tilde: SymplecticMatrix,
        c_tilde: DoubledMatrix,
        omega: SpGenerator,
        mode_labels: Vec<String>,
    ) -> Result<Self> {
        let n = s_tilde.modes();
        let m = omega.modes();
        if c_tilde.rows() != n || c_tilde.cols() != m {
            return Err(Error::Dimension(format!(
                "coupling is {}x{} but the component has {n} channels and {m} modes",
                c_tilde.rows(),
                c_tilde.cols()
            )));
        }
        if mode_labels.len() != m {
            return Err(Error::Dimension(format!(
                "{} mode labels for {m} modes",
                mode_labels.len()
            )));
        }
        for (i, l) in mode_labels.iter().enumerate() {
            if mode_labels[..i].contains(l) {
                return Err(Error::Parameter(format!("duplicate mode label {l}")));
            }
        }
        Ok(Self {
            s_tilde,
            c_tilde,
            omega,
            mode_labels,
        })
    }

    /// Component with default mode labels (`a` for one mode, `a0, a1, …`
    /// otherwise).
    pub fn from_parts(s_tilde: SymplecticMatrix, c_tilde: DoubledMatrix, omega: SpGenerator) -> Result<Self> {
        let labels = default_labels(omega.modes());
        Self::new(s_tilde, c_tilde, omega, labels)
    }

    pub fn static_component(s: SymplecticMatrix) -> Self {
        let n = s.modes();
        Self {
            s_tilde: s,
            c_tilde: DoubledMatrix::zeros(n, 0),
            omega: SpGenerator::zeros(0),
            mode_labels: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::static_component(SymplecticMatrix::identity(n))
    }

    pub fn channels(&self) -> usize {
        self.s_tilde.modes()
    }

    pub fn modes(&self) -> usize {
        self.omega.modes()
    }

    pub fn s_tilde(&self) -> &SymplecticMatrix {
        &self.s_tilde
    }

    pub fn c_tilde(&self) -> &DoubledMatrix {
        &self.c_tilde
    }

    pub fn omega(&self) -> &SpGenerator {
        &self.omega
    }

    pub fn mode_labels(&self) -> &[String] {
        &self.mode_labels
    }

    pub fn is_static(&self) -> bool {
        self.modes() == 0
    }

    pub fn with_labels(self, labels: Vec<String>) -> Result<Self> {
        Self::new(self.s_tilde, self.c_tilde, self.omega, labels)
    }

    /// Prefixes every mode label with `prefix.`.
    pub fn prefixed(self, prefix: &str) -> Self {
        let labels = self.mode_labels.iter().map(|l| format!("{prefix}.{l}")).collect();
        Self {
            mode_labels: labels,
            ..self
        }
    }

    /// Largest parameter difference after matching modes by position.
    pub fn max_param_diff(&self, other: &Self) -> f64 {
        if self.channels() != other.channels() || self.modes() != other.modes() {
            return f64::INFINITY;
        }
        self.s_tilde
            .as_doubled()
            .max_diff(other.s_tilde.as_doubled())
            .max(self.c_tilde.max_diff(&other.c_tilde))
            .max(self.omega.max_diff(&other.omega))
    }

    /// Reorders modes to follow `labels`, which must be a permutation of the
    /// component's labels.
    pub fn reorder_modes(&self, labels: &[String]) -> Result<Self> {
        if labels.len() != self.modes() {
            return Err(Error::Dimension("label list length differs from mode count".into()));
        }
        let mut idx = Vec::with_capacity(labels.len());
        for l in labels {
            let i = self
                .mode_labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::Parameter(format!("unknown mode label {l}")))?;
            idx.push(i);
        }
        let rows: Vec<usize> = (0..self.channels()).collect();
        let c_tilde = self.c_tilde.select(&rows, &idx);
        let om = CMatrix::from_fn(idx.len(), idx.len(), |i, j| self.omega.omega_minus()[(idx[i], idx[j])]);
        let op = CMatrix::from_fn(idx.len(), idx.len(), |i, j| self.omega.omega_plus()[(idx[i], idx[j])]);
        Self::new(
            self.s_tilde.clone(),
            c_tilde,
            SpGenerator::new(om, op, f64::INFINITY)?,
            labels.to_vec(),
        )
    }

    /// Relabels ports: output `i` of the result is output `out_order[i]` of
    /// `self`, input `j` is input `in_order[j]`.
    pub fn reorder_ports(&self, out_order: &[usize], in_order: &[usize]) -> Result<Self> {
        let n = self.channels();
        if !is_permutation(out_order, n) || !is_permutation(in_order, n) {
            return Err(Error::Parameter("port order is not a permutation".into()));
        }
        let s = self.s_tilde.as_doubled().select(out_order, in_order);
        let cols: Vec<usize> = (0..self.modes()).collect();
        let c_tilde = self.c_tilde.select(out_order, &cols);
        Ok(Self {
            s_tilde: SymplecticMatrix::new_unchecked(s),
            c_tilde,
            omega: self.omega.clone(),
            mode_labels: self.mode_labels.clone(),
        })
    }

    /// Same permutation on inputs and outputs.
    pub fn permute_channels(&self, order: &[usize]) -> Result<Self> {
        self.reorder_ports(order, order)
    }

    /// Parallel composition over disjoint channels and mode registers.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let mut labels = self.mode_labels.clone();
        for l in &other.mode_labels {
            if labels.contains(l) {
                return Err(Error::SharedModes(l.clone()));
            }
            labels.push(l.clone());
        }
        Self::new(
            self.s_tilde.direct_sum(&other.s_tilde),
            self.c_tilde.direct_sum(&other.c_tilde),
            self.omega.direct_sum(&other.omega),
            labels,
        )
    }
}

fn is_permutation(order: &[usize], n: usize) -> bool {
    let mut seen = alloc::vec![false; n];
    order.len() == n
        && order.iter().all(|&i| {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
            true
        })
}

pub fn make_component(kind: ComponentKind) -> Result<LinearComponent> {
    match kind {
        ComponentKind::Static(s) => Ok(LinearComponent::static_component(SymplecticMatrix::new(s, DEFAULT_TOL)?)),
        ComponentKind::Identity(n) => Ok(LinearComponent::identity(n)),
        ComponentKind::Cavity { gamma, omega } => cavity(gamma, omega),
        ComponentKind::Dpa { kappa, epsilon } => dpa(kappa, epsilon),
        ComponentKind::Squeezer { r } => squeezer(r),
        ComponentKind::Beamsplitter { epsilon } => beamsplitter(epsilon),
        ComponentKind::BeamsplitterAb { alpha, beta } => beamsplitter_ab(alpha, beta),
        ComponentKind::PhaseShift { theta } => phase_shift(theta),
        ComponentKind::Custom {
            s,
            c_minus,
            c_plus,
            omega_minus,
            omega_plus,
        } => {
            let s = SymplecticMatrix::new(s, DEFAULT_TOL)?;
            let c_tilde = DoubledMatrix::new(c_minus, c_plus)?;
            let omega = SpGenerator::new(omega_minus, omega_plus, DEFAULT_TOL)?;
            LinearComponent::from_parts(s, c_tilde, omega)
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Parameter(msg.to_string()))
    }
}

/// Detuned cavity `(I, √γ a, ω a*a)`.
pub fn cavity(gamma: f64, omega: f64) -> Result<LinearComponent> {
    require(gamma.is_finite() && gamma >= 0.0, "cavity damping must be nonnegative")?;
    require(omega.is_finite(), "cavity detuning must be finite")?;
    LinearComponent::from_parts(
        SymplecticMatrix::identity(1),
        DoubledMatrix::real_scalar(gamma.sqrt(), 0.0),
        SpGenerator::scalar(omega, c(0.0, 0.0)),
    )
}

/// Degenerate parametric amplifier: `C− = √κ`, `ω+ = iε/2`.
pub fn dpa(kappa: f64, epsilon: f64) -> Result<LinearComponent> {
    require(kappa.is_finite() && kappa >= 0.0, "DPA damping must be nonnegative")?;
    require(epsilon.is_finite(), "DPA pump must be finite")?;
    LinearComponent::from_parts(
        SymplecticMatrix::identity(1),
        DoubledMatrix::real_scalar(kappa.sqrt(), 0.0),
        SpGenerator::scalar(0.0, c(0.0, epsilon / 2.0)),
    )
}

/// Static squeezer `Δ(cosh r, sinh r)`.
pub fn squeezer(r: f64) -> Result<LinearComponent> {
    require(r.is_finite(), "squeezing parameter must be finite")?;
    Ok(LinearComponent::static_component(SymplecticMatrix::squeezer(r)))
}

pub fn beamsplitter(epsilon: f64) -> Result<LinearComponent> {
    require((0.0..=1.0).contains(&epsilon), "beamsplitter reflectivity must lie in [0, 1]")?;
    beamsplitter_ab(real(epsilon.sqrt()), real((1.0 - epsilon).sqrt()))
}

pub fn beamsplitter_ab(alpha: Complex64, beta: Complex64) -> Result<LinearComponent> {
    require(
        (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs() <= DEFAULT_TOL,
        "beamsplitter needs |alpha|^2 + |beta|^2 = 1",
    )?;
    require(
        (alpha.conj() * beta - beta.conj() * alpha).norm() <= DEFAULT_TOL,
        "beamsplitter needs conj(alpha) beta = conj(beta) alpha",
    )?;
    let sb = CMatrix::from_row_slice(2, 2, &[alpha, -beta, beta, alpha]);
    Ok(LinearComponent::static_component(SymplecticMatrix::passive(sb, DEFAULT_TOL)?))
}

pub fn phase_shift(theta: f64) -> Result<LinearComponent> {
    require(theta.is_finite(), "phase must be finite")?;
    let u = linalg::scalar(Complex64::from_polar(1.0, theta));
    Ok(LinearComponent::static_component(SymplecticMatrix::passive(u, DEFAULT_TOL)?))
}

/// Wide-band limit of `dpa(kκ0, kε0)` as `k → ∞`: the static component
/// `−Δ(cosh r0, sinh r0)` with `r0 = ln((κ0+ε0)/(κ0−ε0))`.
pub fn dpa_static_limit(kappa0: f64, epsilon0: f64) -> Result<LinearComponent> {
    require(
        kappa0.is_finite() && epsilon0.is_finite() && 0.0 <= epsilon0 && epsilon0 < kappa0,
        "static DPA limit needs 0 <= epsilon0 < kappa0",
    )?;
    let r0 = dpa_r0(kappa0, epsilon0);
    Ok(LinearComponent::static_component(SymplecticMatrix::squeezer(r0).neg()))
}

pub fn dpa_r0(kappa0: f64, epsilon0: f64) -> f64 {
    ((kappa0 + epsilon0) / (kappa0 - epsilon0)).ln()
}

/// Merged register of `first` then the labels of `second` not already
/// present, with index maps for both.
fn merge_registers(first: &[String], second: &[String]) -> (Vec<String>, Vec<usize>, Vec<usize>) {
    let mut labels: Vec<String> = first.to_vec();
    let map1: Vec<usize> = (0..first.len()).collect();
    let mut map2 = Vec::with_capacity(second.len());
    for l in second {
        match labels.iter().position(|x| x == l) {
            Some(i) => map2.push(i),
            None => {
                labels.push(l.clone());
                map2.push(labels.len() - 1);
            }
        }
    }
    (labels, map1, map2)
}

fn expand_cols(d: &DoubledMatrix, map: &[usize], total: usize) -> DoubledMatrix {
    let mut minus = CMatrix::zeros(d.rows(), total);
    let mut plus = CMatrix::zeros(d.rows(), total);
    for (j, &t) in map.iter().enumerate() {
        minus.set_column(t, &d.minus().column(j));
        plus.set_column(t, &d.plus().column(j));
    }
    DoubledMatrix::from_blocks(minus, plus)
}

/// Series product `g2 ◁ g1` (output of `g1` feeds `g2`):
/// `(S2 S1, C2 + S2 C1, Ω1 + Ω2 + Im♭(C2♭ S2 C1))`.
pub fn series(g2: &LinearComponent, g1: &LinearComponent) -> Result<LinearComponent> {
    if g1.channels() != g2.channels() {
        return Err(Error::ChannelMismatch {
            left: g2.channels(),
            right: g1.channels(),
        });
    }
    let (labels, map1, map2) = merge_registers(&g1.mode_labels, &g2.mode_labels);
    let total = labels.len();
    let c1 = expand_cols(&g1.c_tilde, &map1, total);
    let c2 = expand_cols(&g2.c_tilde, &map2, total);
    let s2 = g2.s_tilde.as_doubled();
    let s = g2.s_tilde.mul(&g1.s_tilde)?;
    let s2c1 = s2 * &c1;
    let c_tilde = &c2 + &s2c1;
    let cross = SpGenerator::im_flat(&(&c2.flat() * &s2c1));
    let omega = g1
        .omega
        .embed_into(&map1, total)
        .add(&g2.omega.embed_into(&map2, total))
        .add(&cross);
    LinearComponent::new(s, c_tilde, omega, labels)
}

/// Group inverse `(S♭, −S♭C, −Ω)` over the same modes.
pub fn inverse(g: &LinearComponent) -> LinearComponent {
    let s_flat = g.s_tilde.inverse();
    let c_tilde = -(s_flat.as_doubled() * &g.c_tilde);
    LinearComponent {
        s_tilde: s_flat,
        c_tilde,
        omega: g.omega.neg(),
        mode_labels: g.mode_labels.clone(),
    }
}

/// Physically separate inverse `(S♭, S♭K̃, 0)` with `K̃ = Δ(C+, C−)`, on a
/// fresh register named by `namer(i)`. Only defined for `Ω̃ = 0`.
pub fn separate_inverse(
    g: &LinearComponent,
    mut namer: impl FnMut(usize) -> String,
) -> Result<LinearComponent> {
    let magnitude = g.omega.max_norm();
    if magnitude > 0.0 {
        return Err(Error::NotZeroHamiltonian { magnitude });
    }
    let k_tilde = DoubledMatrix::from_blocks(g.c_tilde.plus().clone(), g.c_tilde.minus().clone());
    let s_flat = g.s_tilde.inverse();
    let c_tilde = s_flat.as_doubled() * &k_tilde;
    let labels = (0..g.modes()).map(&mut namer).collect();
    LinearComponent::new(s_flat, c_tilde, SpGenerator::zeros(g.modes()), labels)
}
