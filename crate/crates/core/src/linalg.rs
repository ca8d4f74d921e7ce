//! Dense complex linear algebra helpers.
//!
//! Thin wrappers over `nalgebra` that tolerate empty (0×k) matrices, which
//! show up naturally for static components with no internal modes, plus a
//! matrix exponential and logarithm (nalgebra's `exp` needs `std`).

use alloc::vec::Vec;

use nalgebra::{DMatrix, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const MAX_ITER: usize = 10_000;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn zeros(r: usize, k: usize) -> CMatrix {
    CMatrix::zeros(r, k)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn scalar(z: Complex64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

pub fn from_real_rows(r: usize, k: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(r, k, data.iter().map(|&x| real(x)))
}

/// Largest entry modulus; zero for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Entrywise complex conjugate, `X#`.
pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn symmetric_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.transpose())
}

/// Solves `a x = b`. Returns `None` if `a` is numerically singular.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    assert_eq!(a.nrows(), a.ncols(), "solve: matrix must be square");
    assert_eq!(a.nrows(), b.nrows(), "solve: row mismatch");
    if a.nrows() == 0 {
        return Some(b.clone());
    }
    let x = a.clone().lu().solve(b)?;
    all_finite(&x).then_some(x)
}

/// Solves `x a = b` (right division).
pub fn solve_right(b: &CMatrix, a: &CMatrix) -> Option<CMatrix> {
    // x a = b  <=>  aᵀ xᵀ = bᵀ
    solve(&a.transpose(), &b.transpose()).map(|x| x.transpose())
}

pub fn inverse(a: &CMatrix) -> Option<CMatrix> {
    solve(a, &identity(a.nrows()))
}

/// Eigenvalues of a general complex matrix from its Schur form, sorted by
/// real part then imaginary part.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    assert_eq!(a.nrows(), a.ncols(), "eigenvalues: matrix must be square");
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(alloc::vec![a[(0, 0)]]);
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let mut ev: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    sort_complex(&mut ev);
    Ok(ev)
}

pub fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(core::cmp::Ordering::Equal))
    });
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order (stable for ties). Columns of the returned matrix are the
/// matching eigenvectors.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), zeros(0, 0)));
    }
    let sym = (a + a.adjoint()) * real(0.5);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_ITER).ok_or_else(|| {
        Error::NumericalFailure("Hermitian eigen iteration did not converge".into())
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    Ok((values, vectors))
}

/// Singular value decomposition `a = u · diag(σ) · v†` with σ descending.
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(a: &CMatrix) -> Result<Svd> {
    let (r, k) = a.shape();
    let p = r.min(k);
    if p == 0 {
        return Ok(Svd {
            u: identity(r).columns(0, p).into_owned(),
            sigma: Vec::new(),
            v: identity(k).columns(0, p).into_owned(),
        });
    }
    let dec = SVD::try_new(a.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalFailure("SVD iteration did not converge".into()))?;
    let u = dec.u.expect("u requested");
    let v_t = dec.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| {
        dec.singular_values[j]
            .partial_cmp(&dec.singular_values[i])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(Svd {
        u: CMatrix::from_fn(r, p, |row, col| u[(row, order[col])]),
        sigma: order.iter().map(|&i| dec.singular_values[i]).collect(),
        v: CMatrix::from_fn(k, p, |row, col| v_t[(order[col], row)].conj()),
    })
}

pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    let (r, k) = a.shape();
    if r.min(k) == 0 {
        return Ok(Vec::new());
    }
    let dec = SVD::try_new(a.clone(), false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalFailure("SVD iteration did not converge".into()))?;
    let mut sv: Vec<f64> = dec.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    Ok(sv)
}

/// Smallest singular value of a square matrix; `+∞` for the empty matrix.
pub fn min_singular_value(a: &CMatrix) -> Result<f64> {
    Ok(singular_values(a)?.last().copied().unwrap_or(f64::INFINITY))
}

/// Square root of a Hermitian positive semidefinite matrix. Eigenvalues in
/// `[-tol, 0)` are clamped to zero; anything more negative is an error.
pub fn psd_sqrt(a: &CMatrix, tol: f64) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(a)?;
    let mut roots = Vec::with_capacity(values.len());
    for &v in &values {
        if v < -tol {
            return Err(Error::InvalidCovariance(alloc::format!(
                "matrix has negative eigenvalue {v:e}"
            )));
        }
        roots.push(real(Float::sqrt(v.max(0.0))));
    }
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots));
    Ok(&vectors * d * vectors.adjoint())
}

// Pade(13) coefficients for exp, with the scaling threshold θ13.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a degree-13 Pade
/// approximant.
pub fn expm(a: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), a.ncols(), "expm: matrix must be square");
    let n = a.nrows();
    if n == 0 {
        return zeros(0, 0);
    }
    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * real(2f64.powi(-squarings));
    let b = &PADE13;
    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * real(b[13]) + &a4 * real(b[11]) + &a2 * real(b[9]))
        + &a6 * real(b[7])
        + &a4 * real(b[5])
        + &a2 * real(b[3])
        + &id * real(b[1]);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * real(b[12]) + &a4 * real(b[10]) + &a2 * real(b[8]))
        + &a6 * real(b[6])
        + &a4 * real(b[4])
        + &a2 * real(b[2])
        + &id * real(b[0]);
    let mut r = solve(&(&v - &u), &(&v + &u)).expect("Pade denominator is nonsingular");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Principal square root by the Denman-Beavers iteration. Requires no
/// eigenvalues on the closed negative real axis.
pub fn sqrtm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = identity(n);
    for _ in 0..100 {
        let y_inv = inverse(&y).ok_or_else(|| Error::NumericalFailure("sqrtm: singular".into()))?;
        let z_inv = inverse(&z).ok_or_else(|| Error::NumericalFailure("sqrtm: singular".into()))?;
        let y_next = (&y + z_inv) * real(0.5);
        let z_next = (&z + y_inv) * real(0.5);
        let delta = max_abs_diff(&y_next, &y);
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * (1.0 + max_abs(&y)) {
            return Ok(y);
        }
    }
    Err(Error::NumericalFailure("sqrtm did not converge".into()))
}

/// Principal matrix logarithm by inverse scaling and squaring.
///
/// Callers must rule out eigenvalues on the closed negative real axis first.
pub fn logm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    if n == 0 {
        return Ok(zeros(0, 0));
    }
    let id = identity(n);
    let mut x = a.clone();
    let mut roots = 0u32;
    while one_norm(&(&x - &id)) > 0.25 {
        if roots >= 64 {
            return Err(Error::NumericalFailure("logm: too many square roots".into()));
        }
        x = sqrtm(&x)?;
        roots += 1;
    }
    // log X = 2 atanh(Z), Z = (X - I)(X + I)^-1
    let z = solve_right(&(&x - &id), &(&x + &id))
        .ok_or_else(|| Error::NumericalFailure("logm: singular Cayley transform".into()))?;
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut sum = z.clone();
    for k in 1..40 {
        term = &term * &z2;
        let contrib = &term * real(1.0 / f64::from(2 * k + 1));
        let size = max_abs(&contrib);
        sum += contrib;
        if size < 1e-18 * (1.0 + max_abs(&sum)) {
            break;
        }
    }
    Ok(sum * real(2f64.powi(roots as i32 + 1)))
}

pub fn is_zero(m: &CMatrix) -> bool {
    m.iter().all(|z| z.is_zero())
}
