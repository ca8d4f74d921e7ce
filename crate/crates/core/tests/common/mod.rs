#![allow(dead_code)]

use lqfn_core::doubled::DoubledMatrix;
use lqfn_core::generator::SpGenerator;
use lqfn_core::linalg::{c, CMatrix};
use lqfn_core::symplectic::SymplecticMatrix;
use lqfn_core::{Complex64, LinearComponent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(r: &mut impl Rng) -> Complex64 {
    c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// Entries uniform in the unit disc.
pub fn disc_matrix(r: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| loop {
        let z = complex(r);
        if z.norm() <= 1.0 {
            break z;
        }
    })
}

pub fn random_doubled(r: &mut impl Rng, rows: usize, cols: usize) -> DoubledMatrix {
    DoubledMatrix::from_blocks(disc_matrix(r, rows, cols), disc_matrix(r, rows, cols))
}

/// Haar-ish unitary from the QR factor of a Gaussian-like matrix.
pub fn random_unitary(r: &mut impl Rng, n: usize) -> CMatrix {
    let g = disc_matrix(r, n, n) + CMatrix::identity(n, n) * c(0.1, 0.0);
    g.qr().q()
}

pub fn diag_squeezer(rs: &[f64]) -> DoubledMatrix {
    let n = rs.len();
    DoubledMatrix::from_blocks(
        CMatrix::from_fn(n, n, |i, j| if i == j { c(rs[i].cosh(), 0.0) } else { c(0.0, 0.0) }),
        CMatrix::from_fn(n, n, |i, j| if i == j { c(rs[i].sinh(), 0.0) } else { c(0.0, 0.0) }),
    )
}

/// `Δ(U, 0) Δ(cosh R, sinh R) Δ(V, 0)` with random unitaries and
/// squeezing up to `r_max`.
pub fn random_symplectic(r: &mut impl Rng, n: usize, r_max: f64) -> SymplecticMatrix {
    let rs: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..r_max)).collect();
    let u = DoubledMatrix::passive(random_unitary(r, n));
    let v = DoubledMatrix::passive(random_unitary(r, n));
    let d = &(&u * &diag_squeezer(&rs)) * &v;
    SymplecticMatrix::new(d, 1e-9).expect("random symplectic")
}

pub fn random_hermitian(r: &mut impl Rng, m: usize, scale: f64) -> CMatrix {
    let a = disc_matrix(r, m, m) * c(scale, 0.0);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

pub fn random_symmetric(r: &mut impl Rng, m: usize, scale: f64) -> CMatrix {
    let a = disc_matrix(r, m, m) * c(scale, 0.0);
    (&a + a.transpose()) * c(0.5, 0.0)
}

pub fn random_generator(r: &mut impl Rng, m: usize, scale: f64) -> SpGenerator {
    SpGenerator::new(random_hermitian(r, m, scale), random_symmetric(r, m, scale), 1e-12)
        .expect("random generator")
}

pub fn random_component(r: &mut impl Rng, n: usize, m: usize) -> LinearComponent {
    LinearComponent::from_parts(
        random_symplectic(r, n, 0.8),
        random_doubled(r, n, m),
        random_generator(r, m, 1.0),
    )
    .expect("random component")
}

/// Random passive (annihilation) component: `C+ = 0`, `Ω+ = 0`.
pub fn random_passive(r: &mut impl Rng, n: usize, m: usize) -> LinearComponent {
    LinearComponent::from_parts(
        SymplecticMatrix::passive(random_unitary(r, n), 1e-9).unwrap(),
        DoubledMatrix::passive(disc_matrix(r, n, m)),
        SpGenerator::new(random_hermitian(r, m, 1.0), CMatrix::zeros(m, m), 1e-12).unwrap(),
    )
    .expect("random passive component")
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `J = diag(I, −I)`.
pub fn j(n: usize) -> CMatrix {
    CMatrix::from_fn(2 * n, 2 * n, |i, k| match (i == k, i < n) {
        (false, _) => c(0.0, 0.0),
        (true, true) => c(1.0, 0.0),
        (true, false) => c(-1.0, 0.0),
    })
}

/// `J X† J` on full matrices.
pub fn flat_of(x: &CMatrix) -> CMatrix {
    j(x.ncols() / 2) * x.adjoint() * j(x.nrows() / 2)
}

/// `[[E−, E+], [conj E+, conj E−]]` built by hand.
pub fn doubled_full(minus: &CMatrix, plus: &CMatrix) -> CMatrix {
    let (r, k) = minus.shape();
    CMatrix::from_fn(2 * r, 2 * k, |i, j| match (i < r, j < k) {
        (true, true) => minus[(i, j)],
        (true, false) => plus[(i, j - k)],
        (false, true) => plus[(i - r, j)].conj(),
        (false, false) => minus[(i - r, j - k)].conj(),
    })
}

/// Transfer function oracle built from `(S, C, Ω)` on full matrices:
/// `S − C (sI − A)⁻¹ C♭ S` with `A = −½ C♭C − iΩ̃`.
pub fn tf_oracle(g: &LinearComponent, s: Complex64) -> CMatrix {
    let m = g.modes();
    let sf = doubled_full(g.s_tilde().as_doubled().minus(), g.s_tilde().as_doubled().plus());
    if m == 0 {
        return sf;
    }
    let cf = doubled_full(g.c_tilde().minus(), g.c_tilde().plus());
    let om = g.omega();
    let k = doubled_full(&(om.omega_minus() * c(0.0, -1.0)), &(om.omega_plus() * c(0.0, -1.0)));
    let a = &flat_of(&cf) * &cf * c(-0.5, 0.0) + k;
    let b = -flat_of(&cf) * &sf;
    let lhs = CMatrix::identity(2 * m, 2 * m) * s - &a;
    &sf + &cf * lhs.lu().solve(&b).expect("resolvent")
}
