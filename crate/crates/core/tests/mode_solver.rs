use std::f64::consts::PI;

use num_complex::Complex64;
use primeq::linalg::CVec;
use primeq::params::{make_spectral_point, HorizontalMode, PhysicalParams, SobolevIndex};
use primeq::profile::{interior_grid, synthesize_profile, VerticalProfile};
use primeq::random::{seeded, white_forcing, white_profile};
use primeq::solver::*;
use primeq::vertical::{const_expansion, heat_invert};
use primeq::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn defaults() -> PhysicalParams {
    PhysicalParams::default()
}

fn point(tau: f64, xi: i64, eta: i64, p: &PhysicalParams) -> primeq::SpectralPoint {
    make_spectral_point(c(0.0, tau), HorizontalMode::new(xi, eta), p).unwrap()
}

#[test]
fn one_mode_system_matches_hand_elimination() {
    let p = PhysicalParams::new(1.3, 0.2, 0.7, 1.1, 0.9).unwrap();
    let sp = point(2.5, 2, -1, &p);
    let f = ModeRHS::new(
        VerticalProfile::new(vec![c(0.3, -1.0)]).unwrap(),
        VerticalProfile::new(vec![c(-0.4, 0.2)]).unwrap(),
        VerticalProfile::new(vec![c(1.5, 0.5)]).unwrap(),
    )
    .unwrap();
    let (xi, eta) = (2.0, -1.0);
    let z2 = xi * xi + eta * eta;
    let d = sp.omega_sq + p.nu * PI * PI / (p.a * p.a);
    let c1 = 2.0 * (2.0 * p.a).sqrt() / PI;
    let t11 = 4.0 * p.a / (PI * PI);
    let (f1, f2, f3) = (f.f1.coeff(1), f.f2.coeff(1), f.f3.coeff(1));
    let i = Complex64::i();
    let e = (i * xi * f2 - i * eta * f1) / d;
    let theta = f3 / d;
    let p0 = (-(i * xi * f1 + i * eta * f2) - p.alpha * e) / (z2 * c1) - p.beta * t11 * theta / c1;
    let u = i * eta * e / z2;
    let v = -i * xi * e / z2;

    for sol in [
        solve_coupled_direct(&f, &sp, &p).unwrap(),
        solve_coupled_assembled(&f, &sp, &p).unwrap(),
    ] {
        assert!((sol.u.coeff(1) - u).norm() < 1e-12);
        assert!((sol.v.coeff(1) - v).norm() < 1e-12);
        assert!((sol.theta.coeff(1) - theta).norm() < 1e-12);
        assert!((sol.p0 - p0).norm() < 1e-12);
    }
}

#[test]
fn assembled_matrix_matches_matrix_free_operator() {
    let p = defaults();
    let k = 24;
    let sp = point(-3.0, 1, 3, &p);
    let op = ModeOperator::new(sp, &p, k).unwrap();
    let m = op.assemble();
    let mut rng = seeded(11);
    let x = CVec::from_fn(3 * k + 1, |_, _| primeq::random::complex_normal(&mut rng));
    let dense = &m * &x;
    let free = op.apply_vector(&x);
    assert!((dense - &free).norm() < 1e-12 * free.norm());
}

#[test]
fn coupling_off_gives_block_diagonal_matrix() {
    let p = defaults().uncoupled();
    let k = 6;
    let sp = point(1.0, 1, 1, &p);
    let m = assemble_coupled_matrix(&sp, &p, k).unwrap();
    for r in 0..3 * k {
        for col in 0..3 * k {
            if r != col {
                assert_eq!(m[(r, col)], c(0.0, 0.0), "({r},{col})");
            }
        }
    }
    assert_eq!(m[(3 * k, 3 * k)], c(0.0, 0.0));
    assert_ne!(m[(3 * k, 0)], c(0.0, 0.0));
}

#[test]
fn coupling_off_direct_equals_uncoupled() {
    let p = defaults().uncoupled();
    let mut rng = seeded(3);
    let f = white_forcing(&mut rng, 64);
    let sp = point(7.0, 2, 5, &p);
    let a = solve_coupled_direct(&f, &sp, &p).unwrap();
    let b = solve_uncoupled(&f, &sp, &p).unwrap();
    let scale = b.state_vector().norm();
    assert!((a.state_vector() - b.state_vector()).norm() < 1e-10 * scale);
}

#[test]
fn direct_and_assembled_agree() {
    let p = defaults();
    let mut rng = seeded(5);
    for (tau, xi, eta) in [(0.0, 1, 0), (-40.0, 3, -2), (1e4, 0, 7)] {
        let f = white_forcing(&mut rng, 48);
        let sp = point(tau, xi, eta, &p);
        let a = solve_coupled_direct(&f, &sp, &p).unwrap();
        let b = solve_coupled_assembled(&f, &sp, &p).unwrap();
        let scale = b.state_vector().norm();
        assert!((a.state_vector() - b.state_vector()).norm() < 1e-10 * scale);
        assert!(a.residual_norm < 1e-10 * f.l2_norm());
    }
}

#[test]
fn zero_forcing_gives_zero_solution() {
    let p = defaults();
    let f = ModeRHS::zeros(16);
    let sp = point(3.0, 1, 2, &p);
    for sol in [
        solve_uncoupled(&f, &sp, &p).unwrap(),
        solve_coupled_direct(&f, &sp, &p).unwrap(),
        zeta_zero_solve(&f, c(0.0, 3.0), &p).unwrap(),
    ] {
        assert!(sol.state_vector().iter().all(|x| *x == c(0.0, 0.0)));
    }
}

#[test]
fn divergence_free_forcing_has_zero_pressure() {
    let p = defaults();
    let mut rng = seeded(8);
    let h = white_profile(&mut rng, 32);
    let (xi, eta) = (3, -2);
    let f = ModeRHS::new(
        h.scale(c(eta as f64, 0.0)),
        h.scale(c(-xi as f64, 0.0)),
        VerticalProfile::zeros(32),
    )
    .unwrap();
    let sp = point(2.0, xi, eta, &p);
    assert_eq!(pressure_constant_uncoupled(&f, &sp, &p).unwrap(), c(0.0, 0.0));
}

#[test]
fn temperature_only_forcing_uncoupled() {
    let p = defaults();
    let mut rng = seeded(9);
    let f3 = white_profile(&mut rng, 32);
    let f = ModeRHS::new(VerticalProfile::zeros(32), VerticalProfile::zeros(32), f3.clone()).unwrap();
    let sp = point(-1.0, 1, 1, &p);
    let sol = solve_uncoupled(&f, &sp, &p).unwrap();
    assert!(sol.u.is_zero() && sol.v.is_zero() && sol.p0 == c(0.0, 0.0));
    assert_eq!(sol.theta, heat_invert(&f3, &sp, &p).unwrap());
}

#[test]
fn uncoupled_forward_residual_and_constraint() {
    let p = defaults();
    let mut rng = seeded(21);
    for (tau, xi, eta) in [(0.0, 1, 0), (13.0, -4, 4), (-2e3, 9, 1)] {
        let f = white_forcing(&mut rng, 256);
        let sp = point(tau, xi, eta, &p);
        let sol = solve_uncoupled(&f, &sp, &p).unwrap();
        let op = ModeOperator::new(sp, &p, 256).unwrap();
        let (image, div) = op.apply_uncoupled(&sol.u, &sol.v, &sol.theta, sol.p0);
        let r = ModeRHS::new(&image.f1 - &f.f1, &image.f2 - &f.f2, &image.f3 - &f.f3).unwrap();
        assert!(r.l2_norm() < 1e-10 * f.l2_norm());
        assert!(div.norm() < 1e-10);
    }
}

#[test]
fn pressure_routes_agree() {
    let p = defaults();
    let mut rng = seeded(4);
    for (tau, xi, eta) in [(0.0, 1, 0), (5.0, 2, 3), (-300.0, 1, -1), (1e4, 6, 0)] {
        let f = white_forcing(&mut rng, 256);
        let sp = point(tau, xi, eta, &p);
        let closed = pressure_constant_closed_form(&f, &sp, &p).unwrap();
        let series = pressure_constant_series(&f, &sp, &p).unwrap();
        assert!((closed - series).norm() < 1e-8 * closed.norm());
        // The truncated Galerkin constant differs only through the series
        // tail of the inverted constant, bounded by 8 a^3 / (nu pi^4 6 K^3).
        let galerkin = pressure_constant_uncoupled(&f, &sp, &p).unwrap();
        let tail = 8.0 * p.a.powi(3) / (p.nu * PI.powi(4)) / (6.0 * 256f64.powi(3));
        let int_one = primeq::vertical::inverse_integral_one(&sp, &p);
        assert!((galerkin - closed).norm() <= 1.5 * tail / int_one.norm() * closed.norm());
    }
}

#[test]
fn split_reassembles_velocity() {
    let p = defaults();
    let mut rng = seeded(6);
    let f = white_forcing(&mut rng, 64);
    let sp = point(3.0, 2, 1, &p);
    for sol in [
        solve_uncoupled(&f, &sp, &p).unwrap(),
        solve_coupled_direct(&f, &sp, &p).unwrap(),
    ] {
        let u = &sol.y1.u + &sol.y2.u;
        let v = &sol.y1.v + &sol.y2.v;
        let scale = sol.u.l2_norm() + sol.v.l2_norm();
        assert!(u.max_abs_diff(&sol.u) < 1e-13 * scale);
        assert!(v.max_abs_diff(&sol.v) < 1e-13 * scale);
        // Y1 is the pressure-driven part.
        let hc = heat_invert(&const_expansion(64, &p), &sp, &p).unwrap();
        let want = hc.scale(-Complex64::i() * 2.0 * sol.p0);
        assert!(sol.y1.u.max_abs_diff(&want) < 1e-14 * (1.0 + want.l2_norm()));
    }
}

#[test]
fn iterative_uncoupled_converges_immediately() {
    let p = defaults().uncoupled();
    let mut rng = seeded(1);
    let f = white_forcing(&mut rng, 32);
    let sp = point(1.0, 1, 0, &p);
    let sol = solve_coupled_iterative(&f, &sp, &p, 50, 1e-12).unwrap();
    assert_eq!(sol.iterations, Some(1));
}

#[test]
fn iterative_matches_direct_at_high_frequency() {
    let p = defaults();
    let mut rng = seeded(2);
    let f = white_forcing(&mut rng, 128);
    let sp = point(1e4, 2, 1, &p);
    let it = solve_coupled_iterative(&f, &sp, &p, 100, 1e-12).unwrap();
    let d = solve_coupled_direct(&f, &sp, &p).unwrap();
    let scale = d.state_vector().norm();
    assert!((it.state_vector() - d.state_vector()).norm() < 1e-8 * scale);
    assert!((it.state_vector() - d.state_vector()).norm() < 10.0 * 1e-12 * scale * 100.0);
}

#[test]
fn iterative_fails_for_strong_coupling_at_low_frequency() {
    let p = PhysicalParams::new(1.0, 0.1, 1.0, 50.0, 50.0).unwrap();
    let mut rng = seeded(3);
    let f = white_forcing(&mut rng, 32);
    let sp = point(0.0, 1, 0, &p);
    let op = ModeOperator::new(sp, &p, 32).unwrap();
    let rho = op.contraction_factor(60).unwrap();
    assert!(rho > 1.0, "contraction factor {rho}");
    assert!(matches!(
        solve_coupled_iterative(&f, &sp, &p, 200, 1e-10),
        Err(Error::NotConverged { .. })
    ));
    let d = solve_coupled_direct(&f, &sp, &p).unwrap();
    assert!(d.residual_norm < 1e-9 * f.l2_norm());
}

#[test]
fn zero_mode_solve() {
    let p = defaults();
    let mut rng = seeded(12);
    let f = white_forcing(&mut rng, 40);
    let lambda = c(0.0, 2.0);
    let sol = zeta_zero_solve(&f, lambda, &p).unwrap();
    for k in 1..=40 {
        let d = lambda + p.nu * (k * k) as f64 * PI * PI / (p.a * p.a);
        let r1 = d * sol.u.coeff(k) - p.alpha * sol.v.coeff(k) - f.f1.coeff(k);
        let r2 = d * sol.v.coeff(k) + p.alpha * sol.u.coeff(k) - f.f2.coeff(k);
        assert!(r1.norm() < 1e-12 && r2.norm() < 1e-12);
    }
    assert_eq!(sol.p0, c(0.0, 0.0));
    let q = PhysicalParams { alpha: 0.0, ..p };
    let sol = zeta_zero_solve(&f, lambda, &q).unwrap();
    let sp = make_spectral_point(lambda, HorizontalMode::ZERO, &q).unwrap();
    assert!(sol.u.max_abs_diff(&heat_invert(&f.f1, &sp, &q).unwrap()) < 1e-15);
}

#[test]
fn zero_mode_rejected_by_coupled_solvers() {
    let p = defaults();
    let f = ModeRHS::zeros(4);
    let sp = point(1.0, 0, 0, &p);
    assert_eq!(solve_coupled_direct(&f, &sp, &p), Err(Error::ZeroMode));
    assert_eq!(pressure_constant_uncoupled(&f, &sp, &p), Err(Error::ZeroMode));
    assert!(solve_mode(&f, &sp, &p).is_ok());
}

#[test]
fn hydrostatic_relation_pointwise() {
    let p = defaults();
    let k = 256;
    let mut rng = seeded(30);
    let f = primeq::random::unit_forcing(&mut rng, k, SobolevIndex(0.0), HorizontalMode::new(1, 2), &p);
    let sp = point(4.0, 1, 2, &p);
    let sol = solve_coupled_direct(&f, &sp, &p).unwrap();
    let pressure = reconstruct_pressure_profile(&sol, &p);
    let z = interior_grid(4096, &p);
    let h = z[1] - z[0];
    let pz = pressure.evaluate(&z, &p);
    let theta = synthesize_profile(&sol.theta, &z, &p);
    let peak = theta.iter().map(|t| t.norm() * p.beta).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for j in 1..z.len() - 1 {
        let dp = (pz[j + 1] - pz[j - 1]) / (2.0 * h);
        worst = worst.max((dp - p.beta * theta[j]).norm());
    }
    assert!(worst < 1e-3 * peak, "max error {worst}, peak {peak}");
}

#[test]
fn pressure_without_temperature_is_constant() {
    let p = defaults();
    let mut rng = seeded(31);
    let h = white_profile(&mut rng, 16);
    let f = ModeRHS::new(h.clone(), h, VerticalProfile::zeros(16)).unwrap();
    let q = PhysicalParams { gamma: 1e-300, ..p.uncoupled() };
    let q = PhysicalParams { beta: 1.0, ..q };
    let sp = point(1.0, 1, 1, &q);
    let sol = solve_uncoupled(&f, &sp, &q).unwrap();
    assert!(sol.theta.is_zero());
    let pr = reconstruct_pressure_profile(&sol, &q);
    let vals = pr.evaluate(&[0.1, 0.5, 0.9], &q);
    assert!(vals.iter().all(|v| *v == sol.p0));
}
