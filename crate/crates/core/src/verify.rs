//! Registry of numerical claims checked by `primeq verify`.
//!
//! Each claim measures one number and compares it with a fixed threshold.
//! The report holds one row per registered claim, in registration order.

use num_complex::Complex64;
use rand::Rng;

use crate::config::RunConfig;
use crate::estimates::{
    corollary_products, form_bound_check, heat_maximal_sweep, inverse_integral_constants, m_sigma_ratio_sweep_on,
    omega_lower_bound, omega_zeta_grid, regime, regularity_sweep, spectrum_region_contains, truncated_p_eigenvalues,
    Quantity, Regime, ResolventSet, SweepConfig,
};
use crate::output::CsvTable;
use crate::profile::{interior_grid, synthesize_profile};
use crate::random::{seeded, unit_forcing, white_forcing};
use crate::solver::{reconstruct_pressure_profile, solve_mode, ModeRHS};
use crate::time::{
    counterexample_report, counterexample_slope, evolve, laplace_forward, oracle_distance, time_stepping_oracle,
    Pulse, RandomEvolveConfig, TimeForcing, TimeSignal, CAUSALITY_TOL, DT_THETA_BOUND,
};
use crate::vertical::{inverse_integral_one, inverse_integral_one_converged};
use crate::{make_spectral_point, row, HorizontalMode, PhysicalParams, Result, SobolevIndex};

/// How a measured value is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    Above,
}

impl Bound {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Bound::AtMost => value <= threshold,
            Bound::Above => value > threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Bound::AtMost => "<=",
            Bound::Above => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub name: String,
    pub statement: String,
    pub value: f64,
    pub bound: Bound,
    pub threshold: f64,
    pub passed: bool,
}

impl Claim {
    pub fn new(name: impl Into<String>, statement: impl Into<String>, value: f64, bound: Bound, threshold: f64) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            value,
            bound,
            threshold,
            passed: !value.is_nan() && bound.holds(value, threshold),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {:.6e} {} {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.bound.symbol(),
            self.threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub claims: Vec<Claim>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.claims.iter().filter(|c| !c.passed).count()
    }

    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["claim", "statement", "value", "bound", "threshold", "passed"]);
        for c in &self.claims {
            t.push(row![c.name.as_str(), c.statement.as_str(), c.value, c.bound.symbol(), c.threshold, c.passed]);
        }
        t
    }

    pub fn summary(&self) -> String {
        let mut s: String = self.claims.iter().map(|c| c.line() + "\n").collect();
        s.push_str(&format!(
            "{} of {} claims passed\n",
            self.claims.len() - self.failures(),
            self.claims.len()
        ));
        s
    }
}

type ClaimFn = fn(&RunConfig) -> Result<Vec<Claim>>;

/// A named group of claims and the number of rows it contributes.
pub struct ClaimGroup {
    pub name: &'static str,
    pub count: fn(&RunConfig) -> usize,
    pub run: ClaimFn,
}

const fn group(name: &'static str, count: fn(&RunConfig) -> usize, run: ClaimFn) -> ClaimGroup {
    ClaimGroup { name, count, run }
}

/// Registered claim groups, in report order.
pub const REGISTRY: &[ClaimGroup] = &[
    group("closed_form_series", |_| 1, closed_form_series),
    group("forward_residual", |_| 2, forward_residual),
    group("oracle_equivalence", |_| 2, oracle_equivalence),
    group("msigma_equivalence", |_| MSIGMA_SIGMAS.len(), msigma_equivalence),
    group("spectrum_inclusion", |_| 1, spectrum_inclusion),
    group("form_bound", |_| 1, form_bound),
    group("regularity", |_| 6, regularity),
    group("counterexample", |c| 3 + c.counterexample.slope_alphas.len(), counterexample),
    group("hydrostatic", |_| 1, hydrostatic),
    group("pressure_split", |_| 1, pressure_split_exact),
    group("determinism", |_| 1, determinism),
    group("inverse_integral", |_| 1, inverse_integral),
    group("omega_lower_bound", |_| 1, omega_bound),
    group("corollary_products", |_| 2, corollary),
    group("random_forcing", |_| 2, random_forcing_sweep),
    group("plancherel", |_| 1, transforms),
];

/// Indices of the `M_sigma` equivalence claims.
pub const MSIGMA_SIGMAS: [f64; 5] = [-1.25, -1.0, -0.75, 0.0, 0.25];

/// Number of rows the report of `cfg` holds.
pub fn registered_claims(cfg: &RunConfig) -> usize {
    REGISTRY.iter().map(|g| (g.count)(cfg)).sum::<usize>() + usize::from(cfg.verify.negative_control)
}

/// Run every registered claim, then the negative control when enabled.
pub fn run_verification(cfg: &RunConfig) -> Result<VerifyReport> {
    let mut claims = Vec::new();
    for g in REGISTRY {
        let rows = (g.run)(cfg)?;
        if rows.len() != (g.count)(cfg) {
            return Err(crate::Error::Invalid(format!(
                "claim group {} produced {} rows, registered {}",
                g.name,
                rows.len(),
                (g.count)(cfg)
            )));
        }
        claims.extend(rows);
    }
    if cfg.verify.negative_control {
        claims.push(negative_control(cfg)?);
    }
    Ok(VerifyReport { claims })
}

/// `n` points of the resolvent set: half from the half plane, half from the
/// cone, each paired with a random nonzero mode.
pub fn resolvent_samples(params: &PhysicalParams, n: usize, seed: u64) -> Vec<(Complex64, HorizontalMode)> {
    let set = ResolventSet::for_params(params);
    let mut rng = seeded(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let lambda = if out.len() % 2 == 0 {
            let re = -set.delta2 + 10f64.powf(rng.random_range(-3.0..3.0));
            Complex64::new(re, sign * 10f64.powf(rng.random_range(-2.0..4.0)))
        } else {
            let mu1 = 10f64.powf(rng.random_range(-2.0..3.0));
            let mu2 = mu1 / set.delta1 * (1.0 + rng.random_range(0.0..3.0));
            Complex64::new(-set.delta2 - mu1, sign * mu2)
        };
        let zeta = HorizontalMode::new(rng.random_range(-30..=30), rng.random_range(-30..=30));
        if zeta.is_zero() || !set.contains(lambda) {
            continue;
        }
        out.push((lambda, zeta));
    }
    out
}

fn closed_form_series(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let p = &cfg.params;
    let mut worst: f64 = 0.0;
    for (lambda, zeta) in resolvent_samples(p, cfg.verify.resolvent_points, cfg.seed) {
        let sp = make_spectral_point(lambda, zeta, p)?;
        let closed = inverse_integral_one(&sp, p);
        let series = inverse_integral_one_converged(&sp, p);
        worst = worst.max((closed - series).norm() / series.norm());
    }
    Ok(vec![Claim::new(
        "closed_form_series",
        format!(
            "closed form of the depth integral of (omega^2 - nu d_zz)^-1[1] agrees with its sine series at {} resolvent points (max relative error)",
            cfg.verify.resolvent_points
        ),
        worst,
        Bound::AtMost,
        1e-10,
    )])
}

fn forward_residual(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let p = &cfg.params;
    let k = cfg.verify.residual_k;
    let mut rng = seeded(cfg.seed.wrapping_add(1));
    let (mut res, mut div): (f64, f64) = (0.0, 0.0);
    for _ in 0..cfg.verify.residual_instances {
        let zeta = loop {
            let z = HorizontalMode::new(rng.random_range(-20..=20), rng.random_range(-20..=20));
            if !z.is_zero() {
                break z;
            }
        };
        let tau = if rng.random_bool(0.1) { 0.0 } else { 10f64.powf(rng.random_range(-2.0..6.0)) };
        let tau = if rng.random_bool(0.5) { tau } else { -tau };
        let f = white_forcing(&mut rng, k);
        let sol = solve_mode(&f, &make_spectral_point(Complex64::new(0.0, tau), zeta, p)?, p)?;
        res = res.max(sol.residual_norm / f.l2_norm());
        div = div.max(sol.divergence.norm() / f.l2_norm());
    }
    let n = cfg.verify.residual_instances;
    Ok(vec![
        Claim::new(
            "forward_residual",
            format!("relative forward residual of the coupled mode solve, K = {k}, {n} random instances"),
            res,
            Bound::AtMost,
            1e-9,
        ),
        Claim::new(
            "divergence_constraint",
            format!("relative depth-integrated divergence of the computed velocity, K = {k}, {n} random instances"),
            div,
            Bound::AtMost,
            1e-9,
        ),
    ])
}

fn oracle_equivalence(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let p = &cfg.params;
    let v = &cfg.verify;
    let k = v.oracle_k;
    let n = (v.oracle_t / v.oracle_dt).round() as usize;
    let zeta = HorizontalMode::new(1, 2);
    let profile = unit_forcing(&mut seeded(cfg.seed.wrapping_add(2)), k, SobolevIndex(0.0), zeta, p);
    let pulse = Pulse::Exponential { onset: 0.0, rate: 1.0 };
    let mut forcing = TimeForcing::new(k, v.oracle_dt, n)?;
    forcing.add_pulse(zeta, profile.clone(), &pulse)?;
    let evo = evolve(&forcing, 0.0, p)?;
    let scaled = |t: f64| {
        let s = Complex64::new(pulse.value(t), 0.0);
        ModeRHS {
            f1: profile.f1.scale(s),
            f2: profile.f2.scale(s),
            f3: profile.f3.scale(s),
        }
    };
    let run = time_stepping_oracle(&scaled, zeta, k, p, v.oracle_dt, n)?;

    let mut late = TimeForcing::new(k, v.oracle_dt, n)?;
    late.add_pulse(zeta, profile.clone(), &Pulse::Exponential { onset: 0.25 * v.oracle_t, rate: 1.0 })?;
    let leak = evolve(&late, 0.0, p)?.causality_leak();
    Ok(vec![
        Claim::new(
            "oracle_equivalence",
            format!(
                "relative L2 distance between the transform solution and a Crank-Nicolson run, K = {k}, T = {}, dt = {}",
                v.oracle_t, v.oracle_dt
            ),
            oracle_distance(&evo, &run)?,
            Bound::AtMost,
            1e-3,
        ),
        Claim::new(
            "causality",
            "largest state norm before the forcing onset relative to its peak",
            leak,
            Bound::AtMost,
            CAUSALITY_TOL,
        ),
    ])
}

fn msigma_equivalence(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let grid = omega_zeta_grid(2.0, 1e4, cfg.verify.msigma_n_omega, 64, cfg.verify.msigma_n_zeta);
    MSIGMA_SIGMAS
        .iter()
        .map(|&sigma| {
            let e = m_sigma_ratio_sweep_on(sigma, &grid, &cfg.params)?;
            Ok(Claim::new(
                format!("msigma_equivalence_sigma_{sigma}"),
                format!(
                    "M_sigma is equivalent to its two-regime model at sigma = {sigma} over {} points (constant C)",
                    grid.len()
                ),
                e.constant(),
                Bound::AtMost,
                20.0,
            ))
        })
        .collect()
}

fn spectrum_inclusion(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let r = cfg.verify.spectrum_zeta;
    let k = cfg.verify.spectrum_k;
    let mut outside = 0usize;
    let mut count = 0usize;
    for xi in -r..=r {
        for eta in -r..=r {
            let zeta = HorizontalMode::new(xi, eta);
            if zeta.is_zero() || zeta.norm() > r as f64 {
                continue;
            }
            for l in truncated_p_eigenvalues(zeta, k, &cfg.params)? {
                count += 1;
                if !spectrum_region_contains(l, &cfg.params) {
                    outside += 1;
                }
            }
        }
    }
    Ok(vec![Claim::new(
        "spectrum_inclusion",
        format!("eigenvalues of the truncated operator outside the spectrum region, K = {k}, 0 < |zeta| <= {r}, {count} eigenvalues"),
        outside as f64,
        Bound::AtMost,
        0.0,
    )])
}

fn form_bound(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let r = form_bound_check(&cfg.params, cfg.verify.form_k, cfg.verify.form_trials, cfg.seed.wrapping_add(3))?;
    Ok(vec![Claim::new(
        "form_bound",
        format!(
            "largest |<P X, X'>| / (|X|_V |X'|_V) over {} random pairs and the exact per-mode supremum, relative to the bound",
            r.trials
        ),
        r.max_random.max(r.supremum) / r.bound,
        Bound::AtMost,
        1.0,
    )])
}

fn sweep_config(cfg: &RunConfig) -> SweepConfig {
    SweepConfig {
        k: cfg.verify.sweep_k,
        n_zeta: cfg.verify.sweep_n_zeta,
        n_tau: cfg.verify.sweep_n_tau,
        seed: cfg.seed,
        ..SweepConfig::default()
    }
}

fn regularity(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let sc = sweep_config(cfg);
    let mut out = Vec::new();
    for sigma in [0.0, -1.0] {
        let r = regularity_sweep(sigma, &sc, &cfg.params)?;
        for q in [Quantity::State, Quantity::Maximal] {
            let Some(s) = r.summary(q) else { continue };
            if sigma < -0.5 && q == Quantity::Maximal {
                continue;
            }
            out.push(Claim::new(
                format!("regularity_{}_slope_sigma_{sigma}", q.name()),
                format!(
                    "log-log slope of the {} envelope against <omega> in [1, 1e4] at sigma = {sigma}",
                    q.name()
                ),
                s.slope.abs(),
                Bound::AtMost,
                sc.slope_tol,
            ));
        }
        let worst = r
            .summaries
            .iter()
            .filter(|s| !s.passed)
            .count();
        out.push(Claim::new(
            format!("regularity_all_sigma_{sigma}"),
            format!("quantities of the regularity sweep at sigma = {sigma} failing their expected envelope"),
            worst as f64,
            Bound::AtMost,
            0.0,
        ));
    }
    let h = heat_maximal_sweep(0.0, &sc, &cfg.params)?;
    let slope = h.summary(Quantity::Heat).map(|s| s.slope.abs()).unwrap_or(f64::NAN);
    out.push(Claim::new(
        "heat_maximal_slope",
        "log-log slope of the heat maximal-regularity envelope at sigma = 0",
        slope,
        Bound::AtMost,
        sc.slope_tol,
    ));
    Ok(out)
}

fn counterexample(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let c = &cfg.counterexample;
    let p = &cfg.params;
    let r = counterexample_report(c.sigma, c.alpha, &c.g, p, c.decades, c.asymptotic_from)?;
    let from = c.asymptotic_from as usize;
    let min_ratio = |col: fn(&crate::time::GrowthRow) -> f64| {
        r.ratios(col).get(from..).map(|s| s.iter().cloned().fold(f64::INFINITY, f64::min)).unwrap_or(f64::NAN)
    };
    let mut out = vec![
        Claim::new(
            "counterexample_growth_model",
            format!(
                "smallest per-decade growth of the partial masses of |g|^2 |tau|^-alpha from 1e{from} on, alpha = {}",
                c.alpha
            ),
            min_ratio(|r| r.partial_l2),
            Bound::Above,
            crate::time::GROWTH_RATIO,
        ),
        Claim::new(
            "counterexample_growth_multiplier",
            format!("smallest per-decade growth of the partial masses of |g m|^2 from 1e{from} on"),
            min_ratio(|r| r.multiplier),
            Bound::Above,
            crate::time::GROWTH_RATIO,
        ),
        Claim::new(
            "counterexample_contrast",
            "largest partial mass of |g|^2 relative to its full L2 mass",
            r.rows.iter().map(|x| x.contrast).fold(0.0, f64::max) / r.g_l2_sq,
            Bound::AtMost,
            1.0 + 1e-9,
        ),
    ];
    for &alpha in &c.slope_alphas {
        let slope = counterexample_slope(alpha, p, 1e2, 1e6, 41);
        out.push(Claim::new(
            format!("counterexample_slope_alpha_{alpha}"),
            format!("|slope of log|m| against log tau - (-alpha/2)| on [1e2, 1e6], alpha = {alpha}"),
            (slope + alpha / 2.0).abs(),
            Bound::AtMost,
            0.05,
        ));
    }
    Ok(out)
}

/// Largest central-difference error of `d_z p = beta theta` on a fine
/// interior grid, relative to the peak of `beta theta`.
pub fn hydrostatic_error(f: &ModeRHS, tau: f64, zeta: HorizontalMode, params: &PhysicalParams, points: usize) -> Result<f64> {
    let sol = solve_mode(f, &make_spectral_point(Complex64::new(0.0, tau), zeta, params)?, params)?;
    let pressure = reconstruct_pressure_profile(&sol, params);
    let z = interior_grid(points, params);
    let h = z[1] - z[0];
    let pz = pressure.evaluate(&z, params);
    let theta = synthesize_profile(&sol.theta, &z, params);
    let peak = theta.iter().map(|t| t.norm() * params.beta).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for j in 1..z.len() - 1 {
        let dp = (pz[j + 1] - pz[j - 1]) / (2.0 * h);
        worst = worst.max((dp - params.beta * theta[j]).norm());
    }
    Ok(worst / peak)
}

fn hydrostatic(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let k = cfg.verify.residual_k;
    let zeta = HorizontalMode::new(1, 2);
    let f = unit_forcing(&mut seeded(cfg.seed.wrapping_add(4)), k, SobolevIndex(0.0), zeta, &cfg.params);
    Ok(vec![Claim::new(
        "hydrostatic_fd",
        format!("central-difference error of d_z p = beta theta on 4096 interior points, K = {k}, relative to the peak"),
        hydrostatic_error(&f, 4.0, zeta, &cfg.params, 4096)?,
        Bound::AtMost,
        1e-3,
    )])
}

fn pressure_split_exact(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let forcing = crate::time::random_forcing(
        -1.0,
        &cfg.params,
        &RandomEvolveConfig {
            k: 8,
            n: 500,
            ..RandomEvolveConfig::default()
        },
        cfg.seed.wrapping_add(5),
    )?;
    let evo = evolve(&forcing, -1.0, &cfg.params)?;
    let mut worst: f64 = 0.0;
    for (zeta, q) in &evo.trace.q {
        for (i, v) in q.iter().enumerate() {
            worst = worst.max((evo.split.q1[zeta][i] + evo.split.q2[zeta][i] - v).norm());
        }
    }
    Ok(vec![Claim::new(
        "pressure_split_exact",
        "largest |q1 + q2 - q| over the trace of a random run at sigma = -1",
        worst,
        Bound::AtMost,
        0.0,
    )])
}

fn determinism(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let small = RunConfig {
        z_max: 1,
        k: 16,
        ..cfg.clone()
    };
    let render = || -> Result<Vec<u8>> {
        let t = crate::cli::solve_tables(&small).map_err(|e| crate::Error::Invalid(e.to_string()))?;
        let mut bytes = t.modes.to_bytes().map_err(|e| crate::Error::Invalid(e.to_string()))?;
        bytes.extend(t.pressure.to_bytes().map_err(|e| crate::Error::Invalid(e.to_string()))?);
        Ok(bytes)
    };
    let a = render()?;
    let b = render()?;
    let differing = a.len().abs_diff(b.len()) + a.iter().zip(&b).filter(|(x, y)| x != y).count();
    Ok(vec![Claim::new(
        "determinism",
        "bytes differing between two solve runs with the same seed",
        differing as f64,
        Bound::AtMost,
        0.0,
    )])
}

fn inverse_integral(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let e = inverse_integral_constants(&cfg.params)?;
    Ok(vec![Claim::new(
        "inverse_integral_equivalence",
        "<omega>^2 |int (omega^2 - nu d_zz)^-1[1] dz| stays within [1/C, C] on the omega-zeta grid (constant C)",
        e.constant(),
        Bound::AtMost,
        100.0,
    )])
}

fn omega_bound(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let set = ResolventSet::for_params(&cfg.params);
    Ok(vec![Claim::new(
        "omega_lower_bound",
        "min |omega^2| / <omega>^2 on the boundary of the resolvent set",
        omega_lower_bound(&set, &cfg.params),
        Bound::Above,
        0.01,
    )])
}

fn corollary(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let p = &cfg.params;
    let (mut lo, mut hi, mut minus_one, mut low): (f64, f64, f64, f64) = (f64::INFINITY, 0.0, 0.0, 0.0);
    for (tau, z) in omega_zeta_grid(2.0, 1e4, 40, 64, 13) {
        let sp = make_spectral_point(Complex64::new(0.0, tau), z, p)?;
        let w = sp.bracket_omega();
        let (p1, _) = corollary_products(0.0, &sp)?;
        lo = lo.min(p1 * w * w);
        hi = hi.max(p1 * w * w);
        let (p1, p2) = corollary_products(-1.0, &sp)?;
        minus_one = minus_one.max(p1 * w);
        if regime(-1.0, &sp) == Some(Regime::LowZeta) {
            low = low.max(p2 * w);
        }
    }
    Ok(vec![
        Claim::new(
            "corollary_products_sigma_0",
            "<omega>^2 times the product <omega>^2 M_0 M_0 stays within [1/C, C] on the omega-zeta grid (constant C)",
            hi.max(1.0 / lo),
            Bound::AtMost,
            5.0,
        ),
        Claim::new(
            "corollary_products_sigma_-1",
            "largest <omega> times <omega>^2 M_-1 M_1, and times <omega>^2 M_-1 M_-1 in the low-zeta regime, on the omega-zeta grid",
            minus_one.max(low),
            Bound::AtMost,
            5.0,
        ),
    ])
}

fn random_forcing_sweep(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let rc = RandomEvolveConfig {
        draws: cfg.verify.random_draws,
        seed: cfg.seed.wrapping_add(6),
        ..RandomEvolveConfig::default()
    };
    let r = crate::time::random_evolve_sweep(cfg.sigma, &cfg.params, &rc)?;
    Ok(vec![
        Claim::new(
            "random_forcing_state",
            format!(
                "largest |X|_(L2 H^(sigma+2)) / |F|_(L2 H^sigma) over {} random forcings relative to the median, sigma = {}",
                rc.draws, cfg.sigma
            ),
            r.max_state() / r.median_state(),
            Bound::AtMost,
            2.0,
        ),
        Claim::new(
            "random_forcing_dt_theta",
            format!("largest |d_t theta|_(L2 H^sigma) / |F|_(L2 H^sigma) over {} random forcings", rc.draws),
            r.max_dt_theta(),
            Bound::AtMost,
            DT_THETA_BOUND,
        ),
    ])
}

fn transforms(cfg: &RunConfig) -> Result<Vec<Claim>> {
    let mut rng = seeded(cfg.seed.wrapping_add(7));
    let dt = 0.01;
    let samples: Vec<Complex64> = (0..4096).map(|_| crate::random::complex_normal(&mut rng)).collect();
    let sig = TimeSignal::new(samples, dt)?;
    let spec = laplace_forward(&sig)?;
    let lhs = sig.l2_norm();
    let rhs = spec.l2_norm() / crate::time::PLANCHEREL.sqrt();
    Ok(vec![Claim::new(
        "plancherel",
        "relative mismatch of |f|_L2 and |f^|_L2 / sqrt(2 pi) for a random signal",
        (lhs - rhs).abs() / lhs,
        Bound::AtMost,
        1e-12,
    )])
}

/// Asserts a slope of -1 for the state envelope at `sigma`, where the
/// estimate predicts 0. It must fail.
fn negative_control(cfg: &RunConfig) -> Result<Claim> {
    let sc = SweepConfig {
        n_zeta: 5,
        n_tau: 5,
        ..sweep_config(cfg)
    };
    let r = regularity_sweep(cfg.sigma, &sc, &cfg.params)?;
    let slope = r.summary(Quantity::State).map(|s| s.slope).unwrap_or(f64::NAN);
    Ok(Claim::new(
        "negative_control_state_slope",
        "control: |state envelope slope - (-1)|, which should fail",
        (slope + 1.0).abs(),
        Bound::AtMost,
        sc.slope_tol,
    ))
}
