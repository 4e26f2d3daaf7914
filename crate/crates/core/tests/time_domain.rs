use std::f64::consts::PI;

use num_complex::Complex64;
use primeq::solver::solve_coupled_direct;
use primeq::time::*;
use primeq::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn scaled(f: &ModeRHS, s: f64) -> ModeRHS {
    let s = c(s, 0.0);
    ModeRHS {
        f1: f.f1.scale(s),
        f2: f.f2.scale(s),
        f3: f.f3.scale(s),
    }
}

fn basis_forcing(k: usize, component: usize, mode: usize) -> ModeRHS {
    let mut f = ModeRHS::zeros(k);
    let b = VerticalProfile::basis(mode, k);
    match component {
        0 => f.f1 = b,
        1 => f.f2 = b,
        _ => f.f3 = b,
    }
    f
}

#[test]
fn transform_of_zero_is_zero() {
    let s = TimeSignal::zeros(64, 0.1).unwrap();
    let f = laplace_forward(&s).unwrap();
    assert!(f.values().iter().all(|v| *v == c(0.0, 0.0)));
}

#[test]
fn decaying_exponential_transform() {
    let (dt, n) = (0.01, 5000);
    let sig = Pulse::Exponential { onset: 0.0, rate: 1.0 }.sample(n, dt).unwrap();
    let spec = laplace_forward(&sig).unwrap();
    let mut worst: f64 = 0.0;
    for (tau, v) in spec.taus().iter().zip(spec.values()) {
        if tau.abs() <= 10.0 {
            worst = worst.max((v - 1.0 / c(1.0, *tau)).norm());
        }
    }
    assert!(worst < 1e-4, "max error {worst:e}");
}

#[test]
fn plancherel_and_round_trip() {
    let (dt, n) = (0.02, 1024);
    let samples: Vec<Complex64> = (0..n)
        .map(|j| {
            let t = j as f64 * dt;
            c((-(t - 8.0).powi(2)).exp() * (3.0 * t).cos(), 0.5 * (-(t - 10.0).powi(2) / 2.0).exp())
        })
        .collect();
    let sig = TimeSignal::new(samples.clone(), dt).unwrap();
    let spec = laplace_forward(&sig).unwrap();
    let lhs = spec.l2_norm().powi(2);
    let rhs = PLANCHEREL * sig.l2_norm().powi(2);
    assert!((lhs - rhs).abs() < 1e-8 * rhs);
    let back = laplace_inverse(&spec);
    let err = back
        .samples()
        .iter()
        .zip(&samples)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-8 * sig.peak());
}

#[test]
fn transform_matches_direct_sum() {
    let dt = 0.05;
    let samples: Vec<Complex64> = (0..40).map(|j| c((j as f64 * 0.3).sin(), (j as f64).cos() * 0.1)).collect();
    let spec = laplace_forward(&TimeSignal::new(samples.clone(), dt).unwrap()).unwrap();
    for (m, tau) in spec.taus().iter().enumerate() {
        let direct: Complex64 = samples
            .iter()
            .enumerate()
            .map(|(j, f)| f * c(0.0, -tau * j as f64 * dt).exp() * dt)
            .sum();
        assert!((direct - spec.values()[m]).norm() < 1e-12);
    }
}

#[test]
fn delayed_signal_is_causal_and_shifted() {
    let s = TimeSignal::with_start(0.5, vec![c(1.0, 0.0); 3], 0.25).unwrap();
    let spec = laplace_forward(&s).unwrap();
    assert_eq!(spec.len(), 5);
    assert!(laplace_inverse(&spec).leak_before(0.5) < 1e-12);
}

fn exp_forcing(k: usize, profile: &ModeRHS, zeta: HorizontalMode, dt: f64, n: usize, pulse: Pulse) -> TimeForcing {
    let mut f = TimeForcing::new(k, dt, n).unwrap();
    f.add_pulse(zeta, profile.clone(), &pulse).unwrap();
    f
}

#[test]
fn oracle_of_zero_forcing_is_zero() {
    let p = PhysicalParams::default();
    let k = 8;
    let run = time_stepping_oracle(&|_| ModeRHS::zeros(k), HorizontalMode::new(1, 1), k, &p, 0.01, 50).unwrap();
    assert!(run.states.iter().all(|x| x.norm() == 0.0));
    assert!(run.pressure.iter().all(|q| q.norm() == 0.0));
}

#[test]
fn oracle_matches_duhamel_without_coupling() {
    let p = PhysicalParams::default().uncoupled();
    let k = 8;
    let zeta = HorizontalMode::new(2, -1);
    // (eta, -xi) e_3 is divergence free, so the pressure stays zero.
    let mut profile = ModeRHS::zeros(k);
    profile.f1 = VerticalProfile::basis(3, k).scale(c(zeta.eta as f64, 0.0));
    profile.f2 = VerticalProfile::basis(3, k).scale(c(-zeta.xi as f64, 0.0));
    let (dt, steps) = (1e-3, 4000);
    let run = time_stepping_oracle(&|t| scaled(&profile, (-t).exp()), zeta, k, &p, dt, steps).unwrap();
    let d = p.heat_gap() * 9.0 + p.nu * zeta.norm_sq();
    let mut worst: f64 = 0.0;
    for (n, x) in run.states.iter().enumerate() {
        let t = n as f64 * dt;
        // int_0^t e^{-d (t-s)} e^{-s} ds
        let u3 = ((-t).exp() - (-d * t).exp()) / (d - 1.0);
        worst = worst.max((x[2] - u3 * zeta.eta as f64).norm());
        worst = worst.max((x[k + 2] + u3 * zeta.xi as f64).norm());
    }
    assert!(worst < 1e-6, "worst {worst:e}");
    assert!(run.pressure.iter().all(|q| q.norm() < 1e-12));
}

#[test]
fn oracle_keeps_the_constraint() {
    let p = PhysicalParams::default();
    let k = 16;
    let f = basis_forcing(k, 0, 1);
    let run = time_stepping_oracle(&|t| scaled(&f, (2.0 * t).sin()), HorizontalMode::new(1, 0), k, &p, 1e-2, 300).unwrap();
    assert!(run.max_constraint < 1e-10, "{}", run.max_constraint);
}

#[test]
fn step_halving_flags_coarse_steps() {
    let p = PhysicalParams::default();
    let k = 16;
    let f = basis_forcing(k, 2, 1);
    let force = |t: f64| scaled(&f, (-t).exp());
    let zeta = HorizontalMode::new(0, 1);
    let err = time_stepping_oracle_checked(&force, zeta, k, &p, 0.5, 20, 1e-3).unwrap_err();
    assert!(matches!(err, Error::StepTooLarge { .. }));
    assert!(time_stepping_oracle_checked(&force, zeta, k, &p, 1e-3, 2000, 1e-3).is_ok());
}

#[test]
fn evolve_matches_oracle() {
    let p = PhysicalParams::default();
    let k = 24;
    let zeta = HorizontalMode::new(1, 2);
    let profile = basis_forcing(k, 0, 1);
    let pulse = Pulse::Exponential { onset: 0.0, rate: 1.0 };
    let (dt, n) = (2e-3, 2500);
    let evo = evolve(&exp_forcing(k, &profile, zeta, dt, n, pulse), 0.0, &p).unwrap();
    let run = time_stepping_oracle(&|t| scaled(&profile, pulse.value(t)), zeta, k, &p, dt, n).unwrap();
    let d = oracle_distance(&evo, &run).unwrap();
    assert!(d < 1e-3, "distance {d:e}");
}

#[test]
fn evolve_matches_oracle_on_zero_mode() {
    let p = PhysicalParams::default();
    let k = 8;
    let profile = basis_forcing(k, 1, 2);
    let pulse = Pulse::Box { start: 0.5, end: 2.0 };
    let (dt, n) = (1e-3, 4000);
    let evo = evolve(&exp_forcing(k, &profile, HorizontalMode::ZERO, dt, n, pulse), 0.0, &p).unwrap();
    let run = time_stepping_oracle(&|t| scaled(&profile, pulse.value(t)), HorizontalMode::ZERO, k, &p, dt, n).unwrap();
    assert!(oracle_distance(&evo, &run).unwrap() < 1e-3);
    assert!(evo.trace.q[&HorizontalMode::ZERO].iter().all(|q| q.norm() == 0.0));
}

#[test]
fn evolve_frequency_samples_are_direct_solves() {
    let p = PhysicalParams::default();
    let k = 12;
    let zeta = HorizontalMode::new(-1, 1);
    let profile = basis_forcing(k, 2, 1);
    let (dt, n) = (0.05, 64);
    let pulse = Pulse::Exponential { onset: 0.0, rate: 2.0 };
    let evo = evolve(&exp_forcing(k, &profile, zeta, dt, n, pulse), 0.0, &p).unwrap();
    let signal = pulse.sample(n, dt).unwrap();
    for m in [0usize, 3, 17, 100] {
        let tau = evo.trace.taus[m];
        // The cut at T = n dt is a jump, sampled at its midpoint.
        let t_end = n as f64 * dt;
        let cut = 0.5 * (-2.0 * t_end).exp() * c(0.0, -tau * t_end).exp() * dt;
        let f_hat: Complex64 = signal
            .samples()
            .iter()
            .enumerate()
            .map(|(j, f)| f * c(0.0, -tau * j as f64 * dt).exp() * dt)
            .sum::<Complex64>()
            + cut;
        let lambda = c(0.0, 2.0 / dt * (tau * dt / 2.0).tan());
        let sp = make_spectral_point(lambda, zeta, &p).unwrap();
        let sol = solve_coupled_direct(&profile, &sp, &p).unwrap();
        let want = sol.p0 * f_hat;
        let got = evo.trace.q[&zeta][m];
        assert!((got - want).norm() < 1e-10 * want.norm().max(1e-300), "m = {m}: {got} vs {want}");
    }
}

#[test]
fn evolve_is_causal() {
    let p = PhysicalParams::default();
    let k = 16;
    let profile = basis_forcing(k, 2, 2);
    let f = exp_forcing(k, &profile, HorizontalMode::new(1, 2), 1e-2, 1000, Pulse::Exponential { onset: 2.0, rate: 1.0 });
    let evo = evolve(&f, -1.0, &p).unwrap();
    assert_eq!(evo.onset, Some(2.0));
    assert!(evo.causality_leak() < 1e-6, "{:e}", evo.causality_leak());
}

#[test]
fn evolve_norm_report_matches_timeseries() {
    let p = PhysicalParams::default();
    let k = 8;
    let f = exp_forcing(k, &basis_forcing(k, 0, 1), HorizontalMode::new(1, 0), 0.01, 400, Pulse::Box { start: 0.0, end: 1.0 });
    let evo = evolve(&f, 0.25, &p).unwrap();
    let l2 = (evo.timeseries.iter().map(|r| r.state * r.state).sum::<f64>() * evo.dt).sqrt();
    assert!((l2 - evo.norms.state).abs() < 1e-12 * l2);
    // Unit box on [0, 1): the one-sided limits make the norm exact.
    let w = primeq::profile::norm_weight(1, 0.25, HorizontalMode::new(1, 0), &p);
    let want_f = w.sqrt();
    assert!((evo.norms.forcing - want_f).abs() < 1e-12 * want_f);
    let [u, v, th] = evo.fields_at(150).unwrap();
    let s = SobolevIndex(2.25);
    let recomputed = (primeq::profile::sobolev_norm_full(&u, s, &p).powi(2)
        + primeq::profile::sobolev_norm_full(&v, s, &p).powi(2)
        + primeq::profile::sobolev_norm_full(&th, s, &p).powi(2))
    .sqrt();
    assert!((recomputed - evo.timeseries[150].state).abs() < 1e-12 * recomputed);
}

#[test]
fn evolve_rejects_critical_exponent() {
    let f = TimeForcing::new(4, 0.1, 8).unwrap();
    assert_eq!(evolve(&f, -0.5, &PhysicalParams::default()).unwrap_err(), Error::CriticalExponent);
}

#[test]
fn pressure_split_partitions_trace() {
    let mut q = std::collections::BTreeMap::new();
    let taus: Vec<f64> = (0..200).map(|m| (m as f64 - 100.0) * 7.3).collect();
    for zeta in [HorizontalMode::new(1, 0), HorizontalMode::new(3, 4), HorizontalMode::new(20, 0)] {
        q.insert(zeta, taus.iter().map(|t| c(1.0 / (1.0 + t.abs()), 0.3)).collect::<Vec<_>>());
    }
    let trace = PressureTrace { taus: taus.clone(), dtau: 7.3, q };
    let split = pressure_split(&trace, -1.0).unwrap();
    let mut saw = (false, false);
    for (zeta, values) in &trace.q {
        let bz = zeta.bracket();
        for (m, v) in values.iter().enumerate() {
            let (a, b) = (split.q1[zeta][m], split.q2[zeta][m]);
            assert_eq!(a + b, *v);
            assert!(a == c(0.0, 0.0) || b == c(0.0, 0.0));
            // kappa = 1/2 at sigma = -1
            let low = bz <= (taus[m].abs() + bz * bz).powf(0.25);
            assert_eq!(low, a != c(0.0, 0.0));
            saw.0 |= low;
            saw.1 |= !low;
        }
    }
    assert!(saw.0 && saw.1);
    let total = (split.q1_norm.powi(2) + split.q2_norm.powi(2)).sqrt();
    assert!(total > 0.0 && split.q_norm >= split.q2_norm);
}

#[test]
fn pressure_split_trivial_cases() {
    let mut q = std::collections::BTreeMap::new();
    q.insert(HorizontalMode::new(1, 1), vec![c(0.0, 0.0); 4]);
    let trace = PressureTrace { taus: vec![0.0, 1.0, -2.0, -1.0], dtau: 1.0, q };
    let s = pressure_split(&trace, -1.2).unwrap();
    assert_eq!((s.q1_norm, s.q2_norm), (0.0, 0.0));
    assert_eq!(pressure_split(&trace, -0.5).unwrap_err(), Error::CriticalExponent);
    let mut q = trace.q.clone();
    q.insert(HorizontalMode::new(1, 1), vec![c(1.0, 0.0); 4]);
    let s = pressure_split(&PressureTrace { q, ..trace }, 0.0).unwrap();
    assert_eq!(s.q1_norm, 0.0);
    assert_eq!(s.q2_norm, s.q_norm);
    for sigma in [-1.49, -1.0, -0.51] {
        let kappa = SobolevIndex(sigma).kappa();
        assert!(kappa > 0.0 && kappa < 2.0 / 3.0);
    }
}

/// Multiplier from a long direct sum with the closed-form multiplier written
/// through `cosh` and `sinh`.
fn multiplier_brute(tau: f64, alpha: f64, p: &PhysicalParams) -> Complex64 {
    let omega_sq = c(p.nu, tau);
    let gap = p.nu * PI * PI / (p.a * p.a);
    let kmax = 2_000_001u64;
    let mut s = c(0.0, 0.0);
    let mut k = kmax;
    while k >= 1 {
        let kf = k as f64;
        s += kf.powf(-alpha) / (kf * (omega_sq + gap * kf * kf));
        if k < 2 {
            break;
        }
        k -= 2;
    }
    let kf = (kmax + 2) as f64;
    s += kf.powf(-alpha - 2.0) / (2.0 * gap * (alpha + 2.0));
    let chi = omega_sq.sqrt() * (p.a / p.nu.sqrt());
    let n = 1.0 + 2.0 * (1.0 - chi.cosh()) / (chi * chi.sinh());
    let c_a = 2.0 * (2.0 * p.a).sqrt() / PI;
    (c_a / p.a) * c(tau, -p.nu) * s / n
}

#[test]
fn multiplier_matches_direct_sum() {
    let p = PhysicalParams::default();
    for tau in [0.0, 0.7, -5.0, 40.0, 900.0] {
        for alpha in [-0.2, -0.8] {
            let got = counterexample_multiplier(tau, alpha, &p);
            let want = multiplier_brute(tau, alpha, &p);
            assert!((got - want).norm() < 1e-8 * want.norm(), "tau {tau}: {got} vs {want}");
        }
    }
}

#[test]
fn multiplier_symmetry_and_origin() {
    let p = PhysicalParams::default();
    let m0 = counterexample_multiplier(0.0, -0.4, &p);
    assert!(m0.norm().is_finite() && m0.norm() > 0.0);
    for tau in [0.3, 12.0, 1e3, 1e5] {
        let a = counterexample_multiplier(tau, -0.4, &p);
        let b = counterexample_multiplier(-tau, -0.4, &p);
        // The prefactor tau - i nu is odd under conjugation.
        assert!((b + a.conj()).norm() <= 1e-12 * a.norm());
        assert!((b.norm() - a.norm()).abs() <= 1e-12 * a.norm());
    }
}

#[test]
fn multiplier_slopes() {
    let p = PhysicalParams::default();
    for alpha in [-0.2, -0.4, -0.8] {
        let s = counterexample_slope(alpha, &p, 1e2, 1e6, 41);
        assert!((s + alpha / 2.0).abs() <= 0.05, "alpha {alpha}: slope {s}");
    }
}

#[test]
fn g_profile_mass() {
    let fast = GProfile {
        decay: 1.0,
        log_power: 1.0,
    };
    let masses = partial_masses(&fast, &|_| 1.0, 12);
    let total = fast.l2_norm_sq().unwrap();
    assert!((masses[12] - total).abs() < 1e-9 * total, "{} vs {}", masses[12], total);

    let g = GProfile::default();
    let total = g.l2_norm_sq().unwrap();
    let masses = partial_masses(&g, &|_| 1.0, 10);
    assert!(masses.windows(2).all(|w| w[1] > w[0]) && masses[10] < total);
    // Remaining mass 2 int_T^inf dtau / ((1 + tau) log^2(e + tau)) ~ 2 / ln T.
    let tail = total - masses[10];
    let approx = 2.0 / (1e10f64).ln();
    assert!((tail / approx - 1.0).abs() < 0.05, "tail {tail} vs {approx}");
    assert!(GProfile { decay: 0.5, log_power: 0.5 }.l2_norm_sq().is_err());
}

#[test]
fn counterexample_growth() {
    let p = PhysicalParams::default();
    let r = counterexample_report(-1.0, -0.4, &GProfile::default(), &p, 10, 6).unwrap();
    assert!(r.diverges(), "{:?}", r.ratios(|x| x.partial_l2));
    assert!(r.contrast_bounded());
    assert!(r.slope_ok(0.05));
    assert!(counterexample_report(-1.0, -0.6, &GProfile::default(), &p, 4, 2).is_err());
    assert!(counterexample_report(0.0, -0.4, &GProfile::default(), &p, 4, 2).is_err());
}

#[test]
fn random_forcings_have_bounded_ratios() {
    let p = PhysicalParams::default();
    let cfg = RandomEvolveConfig {
        n: 400,
        dt: 0.02,
        k: 12,
        ..Default::default()
    };
    let r = random_evolve_sweep(0.0, &p, &cfg).unwrap();
    assert_eq!(r.state.len(), 10);
    assert!(r.passed(), "{:?} {:?}", r.state, r.dt_theta);
}
