mod common;

use common::*;
use lqfn_core::component::{cavity, dpa, dpa_r0, dpa_static_limit, inverse, separate_inverse, series, squeezer};
use lqfn_core::doubled::{flat_full, DoubledMatrix};
use lqfn_core::generator::SpGenerator;
use lqfn_core::linalg::{c, CMatrix};
use lqfn_core::state_space::{realize, stability};
use lqfn_core::transfer::{
    cascade_check, eval_tf, impulse, inverse_tf, poles, quadrature_tf, sweep, TransferFunction,
};
use lqfn_core::{Complex64, Error, LinearComponent};
use proptest::prelude::*;
use rand::Rng;

fn tf(g: &LinearComponent) -> TransferFunction {
    TransferFunction::of(g).unwrap()
}

/// `(s + iω − γ/2) / (s + iω + γ/2)`.
fn cavity_scalar(gamma: f64, omega: f64, s: Complex64) -> Complex64 {
    (s + c(-gamma / 2.0, omega)) / (s + c(gamma / 2.0, omega))
}

fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64) {
    let d = max_diff(a, b);
    assert!(d <= tol, "difference {d:e} exceeds {tol:e}\n{a}\n{b}");
}

#[test]
fn eval_examples() {
    let v = tf(&cavity(2.0, 1.0).unwrap()).eval(c(0.0, 0.0)).unwrap();
    let xi = c(-1.0, 1.0) / c(1.0, 1.0);
    assert!((v[(0, 0)] - xi).norm() < 1e-15);
    assert!((xi.norm() - 1.0).abs() < 1e-15);

    let id = tf(&LinearComponent::identity(2));
    for s in [c(0.0, 0.0), c(3.0, -1.0)] {
        assert_eq!(id.eval(s).unwrap(), CMatrix::identity(4, 4));
    }

    let v = eval_tf(&realize(&dpa(2.0, 1.0).unwrap()), c(0.0, 0.0)).unwrap();
    assert_close(&v, &doubled_full(&CMatrix::from_element(1, 1, c(-5.0 / 3.0, 0.0)), &CMatrix::from_element(1, 1, c(-4.0 / 3.0, 0.0))), 1e-14);
}

#[test]
fn values_match_the_oracle() {
    let mut r = rng(17);
    for _ in 0..50 {
        let n = r.gen_range(1..4);
        let m = r.gen_range(0..4);
        let g = random_component(&mut r, n, m);
        let s = c(r.gen_range(-1.0..3.0), r.gen_range(-3.0..3.0));
        let t = tf(&g);
        if let Ok(v) = t.eval(s) {
            assert_close(&v, &tf_oracle(&g, s), 1e-9 * (1.0 + max_diff(&v, &CMatrix::zeros(2 * n, 2 * n))));
        }
    }
}

#[test]
fn annihilation_systems_have_no_plus_blocks() {
    let mut r = rng(21);
    for _ in 0..20 {
        let g = random_passive(&mut r, 2, 2);
        let v = tf(&g).eval(c(r.gen_range(0.1..1.0), r.gen_range(-2.0..2.0))).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(v[(i, j + 2)].norm() < 1e-14 && v[(i + 2, j)].norm() < 1e-14);
            }
        }
    }
}

#[test]
fn pole_hits() {
    let t = tf(&cavity(2.0, 1.0).unwrap());
    assert!(matches!(t.eval(c(-1.0, -1.0)), Err(Error::PoleHit { .. })));
    assert!(matches!(t.eval(c(-1.0, 1.0)), Err(Error::PoleHit { .. })));
    assert!(t.eval(c(-1.0, -1.0 + 1e-6)).is_ok());
}

#[test]
fn sweep_examples() {
    let sw = tf(&dpa(2.0, 1.0).unwrap()).sweep(&[0.0, 1.0, 10.0]);
    assert_eq!(sw.omegas(), vec![0.0, 1.0, 10.0]);
    assert!(sw.points.iter().all(|p| !p.pole));
    assert!(sw.max_residual() < 1e-10);

    let sw = sweep(&realize(&cavity(2.0, 0.0).unwrap()), &[0.0]).unwrap();
    let p = &sw.points[0];
    assert!(p.symplectic_residual.unwrap() < 1e-15);
    assert_close(p.value.as_ref().unwrap(), &(-CMatrix::identity(2, 2)), 1e-15);

    // the conjugate block puts a second pole at s = +i
    let sw = tf(&cavity(0.0, 1.0).unwrap()).sweep(&[-1.0, 0.0, 1.0]);
    assert!(sw.points[0].pole && sw.points[0].value.is_none() && sw.points[0].symplectic_residual.is_none());
    assert!(!sw.points[1].pole);
    assert!(sw.points[2].pole);
}

#[test]
fn quadrature_examples() {
    let g = dpa_static_limit(3.0, 1.0).unwrap();
    let q = quadrature_tf(&g.s_tilde().as_doubled().embed());
    assert!((q.xi_x[(0, 0)] - c(-2.0, 0.0)).norm() < 1e-15);
    assert!((q.xi_y[(0, 0)] - c(-0.5, 0.0)).norm() < 1e-15);
    assert!((q.xi_x[(0, 0)] + dpa_r0(3.0, 1.0).exp()).norm() < 1e-15);

    let q = quadrature_tf(&DoubledMatrix::real_scalar(-0.7, 0.0).embed());
    assert!((q.xi_x[(0, 0)] - c(-0.7, 0.0)).norm() < 1e-15 && (q.xi_y[(0, 0)] - c(-0.7, 0.0)).norm() < 1e-15);
    // a phase mixes the quadratures: x → Re ξ x − Im ξ y
    let q = quadrature_tf(&DoubledMatrix::scalar(c(0.6, 0.8), c(0.0, 0.0)).embed());
    assert!((q.xi_x[(0, 0)] - c(0.6, 0.0)).norm() < 1e-15);
    assert!((q.full[(0, 1)] - c(-0.8, 0.0)).norm() < 1e-15);

    for (kappa, eps) in [(2.0, 1.0), (1.0, 0.5), (3.0, 2.5)] {
        let t = tf(&dpa(kappa, eps).unwrap());
        for s in [0.0, 0.5, 2.0, 7.0] {
            let q = quadrature_tf(&t.eval(c(s, 0.0)).unwrap());
            let x = (s - (kappa + eps) / 2.0) / (s + (kappa - eps) / 2.0);
            let y = (s - (kappa - eps) / 2.0) / (s + (kappa + eps) / 2.0);
            assert!((q.xi_x[(0, 0)] - c(x, 0.0)).norm() < 1e-13);
            assert!((q.xi_y[(0, 0)] - c(y, 0.0)).norm() < 1e-13);
            if s == 0.0 {
                assert!((x * y - 1.0).abs() < 1e-14);
            }
            assert!(q.full[(0, 1)].norm() < 1e-14 && q.full[(1, 0)].norm() < 1e-14);
        }
    }
}

fn contains(set: &[Complex64], z: Complex64, tol: f64) -> bool {
    set.iter().any(|p| (p - z).norm() < tol)
}

#[test]
fn pole_examples() {
    let p = poles(&realize(&dpa(2.0, 1.0).unwrap())).unwrap();
    assert_eq!(p.len(), 2);
    assert!(contains(&p, c(-0.5, 0.0), 1e-14) && contains(&p, c(-1.5, 0.0), 1e-14));
    let p = poles(&realize(&cavity(2.0, 1.0).unwrap())).unwrap();
    assert!(contains(&p, c(-1.0, -1.0), 1e-14) && contains(&p, c(-1.0, 1.0), 1e-14));
}

#[test]
fn impulse_examples() {
    let ss = realize(&cavity(2.0, 0.0).unwrap());
    let h = impulse(&ss, 0.0).unwrap();
    assert!(h.sigma.approx_eq(&DoubledMatrix::real_scalar(-2.0, 0.0), 1e-15));
    assert_eq!(h.feedthrough, DoubledMatrix::identity(1));
    for t in [0.1, 1.0, 4.0] {
        let (gamma, omega) = (1.5, 0.7);
        let h = tf(&cavity(gamma, omega).unwrap()).impulse(t).unwrap();
        let expected = -gamma * (c(-gamma / 2.0, -omega) * t).exp();
        assert!((h.sigma.minus()[(0, 0)] - expected).norm() < 1e-12);
        assert!(h.sigma.plus()[(0, 0)].norm() < 1e-14);
    }
    assert!(matches!(impulse(&ss, -1.0), Err(Error::Parameter(_))));
}

#[test]
fn inverse_examples() {
    let ss = realize(&cavity(2.0, 1.0).unwrap());
    let xi = cavity_scalar(2.0, 1.0, c(0.0, 0.0));
    let v = inverse_tf(&ss, c(0.0, 0.0)).unwrap();
    assert!((v[(0, 0)] - xi.conj()).norm() < 1e-15);

    let id = realize(&LinearComponent::identity(1));
    assert_eq!(inverse_tf(&id, c(2.0, 1.0)).unwrap(), CMatrix::identity(2, 2));

    // the transmission zero of a resonant cavity mirrors its pole
    let ss = realize(&cavity(2.0, 0.0).unwrap());
    assert!(matches!(inverse_tf(&ss, c(1.0, 0.0)), Err(Error::ZeroHit { .. })));
}

#[test]
fn cavity_and_separate_anti_cavity_cancel() {
    // γ = 1 keeps the anti-cavity pole at s = ½, away from the samples
    let g = cavity(1.0, 0.0).unwrap();
    let h = separate_inverse(&g, |i| format!("b{i}")).unwrap();
    let pair = series(&h, &g).unwrap();
    assert_eq!(pair.modes(), 2);
    let t = tf(&pair);
    for s in [c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)] {
        assert_close(&t.eval(s).unwrap(), &CMatrix::identity(2, 2), 1e-12);
    }
}

#[test]
fn cascade_examples() {
    let r = 2f64.ln();
    let (cav, sq) = (cavity(2.0, 1.0).unwrap(), squeezer(r).unwrap());
    let samples = [c(0.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)];
    assert!(cascade_check(&cav, &sq, &samples).unwrap() < 1e-10);
    let t = tf(&series(&cav, &sq).unwrap());
    for s in samples {
        let (xi, xi_conj) = (cavity_scalar(2.0, 1.0, s), cavity_scalar(2.0, 1.0, s.conj()).conj());
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[xi * r.cosh(), xi * r.sinh(), xi_conj * r.sinh(), xi_conj * r.cosh()],
        );
        assert_close(&t.eval(s).unwrap(), &expected, 1e-14);
    }

    let c1 = cavity(1.0, 0.5).unwrap().prefixed("one");
    let c2 = cavity(2.0, -0.5).unwrap().prefixed("two");
    assert!(cascade_check(&c2, &c1, &samples).unwrap() < 1e-10);

    let shared = cascade_check(&cavity(1.0, 0.0).unwrap(), &cavity(2.0, 0.0).unwrap(), &samples);
    assert_eq!(shared.unwrap_err(), Error::SharedModes("a".into()));
}

#[test]
fn static_limit_scaling() {
    let (k0, e0) = (3.0, 1.0);
    let base = tf(&dpa(k0, e0).unwrap());
    for k in [10.0, 1e3, 1e6] {
        let scaled = tf(&dpa(k * k0, k * e0).unwrap());
        for s in [c(0.0, 1.0), c(2.0, -3.0), c(0.5, 10.0)] {
            assert_close(&scaled.eval(s).unwrap(), &base.eval(s / k).unwrap(), 1e-12);
        }
    }
}

#[test]
fn static_limit_convergence() {
    let (k0, e0) = (3.0, 1.0);
    let limit = dpa_static_limit(k0, e0).unwrap().s_tilde().as_doubled().embed();
    for omega in [0.5, 1.0, 5.0, 10.0] {
        let mut last = f64::INFINITY;
        for k in [1e1, 1e2, 1e3, 1e4, 1e5, 1e6] {
            let v = tf(&dpa(k * k0, k * e0).unwrap()).eval(c(0.0, omega)).unwrap();
            let err = max_diff(&v, &limit);
            assert!(err < last, "ω = {omega}, k = {k}");
            last = err;
        }
        assert!(last < 1e-4);
    }
}

/// Damping-dominated random component, Hurwitz in most draws.
fn random_damped(r: &mut impl Rng, n: usize, m: usize) -> LinearComponent {
    let coupling = DoubledMatrix::from_blocks(
        disc_matrix(r, n, m) * c(2.0, 0.0),
        disc_matrix(r, n, m) * c(0.3, 0.0),
    );
    LinearComponent::from_parts(random_symplectic(r, n, 0.8), coupling, random_generator(r, m, 0.5)).unwrap()
}

fn log_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (points - 1) as f64)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn values_on_the_axis_are_symplectic(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let mut r = rng(seed);
        let g = random_damped(&mut r, n, m);
        let ss = realize(&g);
        prop_assume!(stability(&ss).unwrap().hurwitz);
        let mut omegas = log_grid(101);
        omegas.extend(log_grid(101).iter().map(|w| -w));
        let sw = sweep(&ss, &omegas).unwrap();
        prop_assert!(sw.points.iter().all(|p| !p.pole));
        let scale = sw.points.iter().map(|p| max_diff(p.value.as_ref().unwrap(), &CMatrix::zeros(2 * n, 2 * n))).fold(1.0, f64::max);
        prop_assert!(sw.max_residual() <= 1e-8 * scale * scale, "{}", sw.max_residual());
    }

    #[test]
    fn inverse_transfer_identities(seed in any::<u64>(), n in 1usize..3, m in 0usize..3) {
        let mut r = rng(seed);
        let g = random_component(&mut r, n, m);
        let ss = realize(&g);
        let t = tf(&g);
        let ti = tf(&inverse(&g));
        for _ in 0..100 {
            let s = c(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let (Ok(inv), Ok(mirror)) = (inverse_tf(&ss, s), t.eval(-s.conj())) else { continue };
            let scale = 1.0 + max_diff(&mirror, &CMatrix::zeros(2 * n, 2 * n));
            prop_assert!(max_diff(&inv, &flat_full(&mirror)) <= 1e-10 * scale * scale);
            if let (Ok(a), Ok(b)) = (ti.eval(s), t.eval(s.conj())) {
                prop_assert!(max_diff(&a, &flat_full(&b)) <= 1e-10 * scale * scale);
            }
        }
    }

    #[test]
    fn separate_inverse_undoes_the_component(seed in any::<u64>(), n in 1usize..3, m in 0usize..3) {
        let mut r = rng(seed);
        let g = LinearComponent::from_parts(
            random_symplectic(&mut r, n, 0.8),
            random_doubled(&mut r, n, m),
            SpGenerator::zeros(m),
        ).unwrap();
        let h = separate_inverse(&g, |i| format!("inv{i}")).unwrap();
        let (tg, th) = (tf(&g), tf(&h));
        for _ in 0..50 {
            let s = c(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let (Ok(a), Ok(b)) = (th.eval(s), tg.eval(s)) else { continue };
            let scale = 1.0 + max_diff(&a, &CMatrix::zeros(2 * n, 2 * n)) * max_diff(&b, &CMatrix::zeros(2 * n, 2 * n));
            prop_assert!(max_diff(&(a * b), &CMatrix::identity(2 * n, 2 * n)) <= 1e-9 * scale);
        }
    }
}
