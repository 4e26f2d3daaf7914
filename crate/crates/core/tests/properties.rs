use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use primeq::output::{CsvTable, Cell};
use primeq::profile::{analyze_profile, interior_grid, sobolev_norm_full, sobolev_norm_zeta, synthesize_profile};
use primeq::solver::{solve_mode, ModeRHS};
use primeq::time::{
    counterexample_multiplier, laplace_forward, laplace_inverse, pressure_split, PressureTrace, Pulse, TimeSignal,
    PLANCHEREL,
};
use primeq::vertical::{antiderivative_matrix, cal_n, const_vector, heat_apply, heat_invert};
use primeq::{make_spectral_point, HorizontalMode, ModalField, PhysicalParams, SobolevIndex, VerticalProfile};

fn params() -> impl Strategy<Value = PhysicalParams> {
    (0.5..3.0f64, 0.01..2.0f64, 0.0..3.0f64, 0.1..3.0f64, 0.1..3.0f64)
        .prop_map(|(a, nu, alpha, beta, gamma)| PhysicalParams::new(a, nu, alpha, beta, gamma).unwrap())
}

fn mode() -> impl Strategy<Value = HorizontalMode> {
    (-20i64..=20, -20i64..=20)
        .prop_filter("nonzero mode", |(x, y)| (*x, *y) != (0, 0))
        .prop_map(|(x, y)| HorizontalMode::new(x, y))
}

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1e2..1e2f64, -1e2..1e2f64), 1..=max_len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

fn profile(max_len: usize) -> impl Strategy<Value = VerticalProfile> {
    coeffs(max_len).prop_map(|c| VerticalProfile::new(c).unwrap())
}

fn forcing(k: usize) -> impl Strategy<Value = ModeRHS> {
    let p = || prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), k).prop_map(|v| {
        VerticalProfile::new(v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).unwrap()
    });
    (p(), p(), p()).prop_map(|(f1, f2, f3)| ModeRHS::new(f1, f2, f3).unwrap())
}

fn frequency() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), (-6.0..6.0f64, any::<bool>()).prop_map(|(e, s)| if s { 10f64.powf(e) } else { -(10f64.powf(e)) })]
}

proptest! {
    #[test]
    fn full_norm_is_the_sum_over_modes(
        p in params(),
        sigma in -2.0..2.0f64,
        entries in prop::collection::btree_map((-5i64..=5, -5i64..=5), prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 12), 1..10),
    ) {
        let mut field = ModalField::new(5, 12);
        let mut direct = 0.0;
        for ((xi, eta), c) in &entries {
            let zeta = HorizontalMode::new(*xi, *eta);
            let prof = VerticalProfile::new(c.iter().map(|(re, im)| Complex64::new(*re, *im)).collect()).unwrap();
            for (i, (re, im)) in c.iter().enumerate() {
                let k = (i + 1) as f64;
                direct += (1.0 + p.nu * k * k + p.nu * zeta.norm_sq()).powf(sigma) * (re * re + im * im);
            }
            field.insert(zeta, prof).unwrap();
        }
        let full = sobolev_norm_full(&field, SobolevIndex(sigma), &p);
        let per_mode: f64 = field.iter().map(|(z, f)| sobolev_norm_zeta(f, SobolevIndex(sigma), *z, &p).powi(2)).sum();
        prop_assert!((full * full - per_mode).abs() <= 1e-12 * per_mode);
        prop_assert!((full * full - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn synthesis_and_analysis_are_inverse(p in params(), f in profile(32), extra in 1usize..40) {
        let k = f.order();
        let grid = interior_grid(2 * k + extra, &p);
        let back = analyze_profile(&synthesize_profile(&f, &grid, &p), k, &p).unwrap();
        let scale = f.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max);
        prop_assert!(back.max_abs_diff(&f) <= 1e-10 * scale);
    }

    #[test]
    fn spectral_point_root_is_principal(p in params(), zeta in mode(), re in -1e3..1e3f64, im in -1e6..1e6f64) {
        let lambda = Complex64::new(re, im);
        prop_assume!((lambda + p.nu * zeta.norm_sq()).norm() > 0.0);
        let sp = make_spectral_point(lambda, zeta, &p).unwrap();
        prop_assert!((sp.omega * sp.omega - sp.omega_sq).norm() <= 1e-12 * sp.omega_sq.norm());
        prop_assert!(sp.omega.re >= 0.0);
        prop_assert_eq!(sp.bracket_omega_sq, lambda.norm() + sp.bracket_zeta.powi(2));
    }

    #[test]
    fn heat_inversion_round_trips(p in params(), zeta in mode(), tau in frequency(), f in profile(64)) {
        let sp = make_spectral_point(Complex64::new(0.0, tau), zeta, &p).unwrap();
        let g = heat_invert(&f, &sp, &p).unwrap();
        let back = heat_apply(&g, &sp, &p);
        let scale = f.coeffs().iter().map(|c| c.norm()).fold(1e-300, f64::max);
        prop_assert!(back.max_abs_diff(&f) <= 1e-12 * scale);
    }

    #[test]
    fn antiderivative_is_skew_up_to_the_constant(p in params(), k in 1usize..64) {
        // int_0^a (Phi psi + phi Psi) = int_0^a phi int_0^a psi
        let t = antiderivative_matrix(k, &p);
        let c = const_vector(k, &p);
        for i in 0..k {
            for j in 0..k {
                prop_assert!((t[(i, j)] + t[(j, i)] - c[i] * c[j]).abs() <= 1e-12 * p.a);
            }
        }
    }

    #[test]
    fn multiplier_on_the_cone_is_finite_and_tends_to_one(re in 1e-2..1e4f64, slope in -1.0..1.0f64) {
        let chi = Complex64::new(re, slope * re);
        let n = cal_n(chi);
        prop_assert!(n.is_finite() && n.norm() > 0.0);
        if chi.norm() > 50.0 {
            prop_assert!((n - 1.0).norm() <= 2.5 / chi.norm());
        }
    }

    #[test]
    fn transform_round_trip_and_plancherel(samples in coeffs(300), dt in 1e-3..1.0f64) {
        let sig = TimeSignal::new(samples.clone(), dt).unwrap();
        let spec = laplace_forward(&sig).unwrap();
        let back = laplace_inverse(&spec);
        let scale = samples.iter().map(|c| c.norm()).fold(1e-300, f64::max);
        for (a, b) in back.samples().iter().zip(&samples) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
        let lhs = sig.l2_norm();
        let rhs = spec.l2_norm() / PLANCHEREL.sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1e-300));
    }

    #[test]
    fn counterexample_multiplier_reflects(tau in 1e-2..1e6f64, alpha in -0.95..-0.05f64) {
        let p = PhysicalParams::default();
        let m = counterexample_multiplier(tau, alpha, &p);
        let r = counterexample_multiplier(-tau, alpha, &p);
        prop_assert!((r + m.conj()).norm() <= 1e-12 * m.norm());
    }

    #[test]
    fn trace_split_is_exact_and_disjoint(
        sigma in prop_oneof![-1.45..-0.55f64, -0.45..0.45f64],
        values in prop::collection::vec(coeffs(1), 16),
        modes in prop::collection::btree_set(mode(), 1..5),
    ) {
        let dt = 0.05;
        let taus = primeq::time::fft_taus(values.len(), dt);
        let mut q = BTreeMap::new();
        for (i, z) in modes.iter().enumerate() {
            q.insert(*z, values.iter().map(|v| v[0] * (i + 1) as f64).collect::<Vec<_>>());
        }
        let trace = PressureTrace { taus, dtau: 2.0 * PI / (values.len() as f64 * dt), q };
        let split = pressure_split(&trace, sigma).unwrap();
        for (z, v) in &trace.q {
            for (i, x) in v.iter().enumerate() {
                let (a, b) = (split.q1[z][i], split.q2[z][i]);
                prop_assert_eq!(a + b, *x);
                prop_assert!(a == Complex64::new(0.0, 0.0) || b == Complex64::new(0.0, 0.0));
            }
        }
        if sigma > -0.5 {
            prop_assert_eq!(split.q1_norm, 0.0);
        }
    }

    #[test]
    fn pulse_samples_are_limit_midpoints(start in 0usize..20, len in 1usize..20, n in 2usize..60, dt in 0.01..1.0f64) {
        let pulse = Pulse::Box { start: start as f64 * dt, end: (start + len) as f64 * dt };
        let (left, right) = pulse.limits(n, dt);
        let s = pulse.sample(n, dt).unwrap();
        prop_assert_eq!(left.len(), n + 1);
        prop_assert_eq!(right[n], 0.0);
        for j in 0..n {
            prop_assert_eq!(s.samples()[j].re, 0.5 * (left[j] + right[j]));
            let t = j as f64;
            if t != start as f64 && t != (start + len) as f64 {
                prop_assert_eq!(left[j], right[j]);
            }
        }
    }

    #[test]
    fn csv_cells_round_trip(xs in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..50)) {
        let mut t = CsvTable::new(&["x"]);
        for x in &xs {
            t.push(vec![Cell::Float(*x)]);
        }
        let back = CsvTable::from_bytes(&t.to_bytes().unwrap()).unwrap().floats("x").unwrap();
        for (a, b) in xs.iter().zip(&back) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coupled_solve_is_accurate_everywhere_on_the_line(p in params(), zeta in mode(), tau in frequency(), f in forcing(12)) {
        let sol = solve_mode(&f, &make_spectral_point(Complex64::new(0.0, tau), zeta, &p).unwrap(), &p).unwrap();
        let fnorm = f.l2_norm();
        prop_assume!(fnorm > 0.0);
        prop_assert!(sol.residual_norm <= 1e-9 * fnorm, "residual {}", sol.residual_norm / fnorm);
        prop_assert!(sol.divergence.norm() <= 1e-9 * fnorm);
    }
}
