//! Numerical counterparts of the a priori estimates.
//!
//! Asymptotic equivalences `A ~ B` have no explicit constants, so they are
//! checked as two-sided ratio bounds over a finite grid, with the observed
//! constants reported. Boundedness claims in the frequency variable are
//! checked through the log-log slope of the upper envelope of the per-point
//! ratios.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{null_basis, CMat, CVec};
use crate::params::{make_spectral_point, HorizontalMode, PhysicalParams, SpectralPoint};
use crate::profile::norm_weight;
use crate::quad::{euler_maclaurin_tail, PowerTail};
use crate::random::{complex_normal, seeded};
use crate::solver::ModeOperator;
use crate::vertical::inverse_integral_one;

/// Which side of the cutoff `<zeta> = <omega>^kappa` a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    HighZeta,
    LowZeta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsigmaValue {
    pub sigma: f64,
    pub value: f64,
    /// Only defined below the critical exponent.
    pub regime: Option<Regime>,
}

/// Regime of a point for `sigma < -1/2`; the cutoff itself counts as low.
pub fn regime(sigma: f64, sp: &SpectralPoint) -> Option<Regime> {
    regime_for_brackets(sigma, sp.bracket_zeta, sp.bracket_omega())
}

/// [`regime`] from the brackets `<zeta>` and `<omega>` directly.
pub fn regime_for_brackets(sigma: f64, bracket_zeta: f64, bracket_omega: f64) -> Option<Regime> {
    if sigma >= -0.5 {
        return None;
    }
    let kappa = (2.0 * sigma + 1.0) / (2.0 * sigma);
    if bracket_zeta <= bracket_omega.powf(kappa) {
        Some(Regime::LowZeta)
    } else {
        Some(Regime::HighZeta)
    }
}

const M_SIGMA_HEAD: usize = 64;

/// `M_sigma = (sum_k 1 / (k^2 (k^4 + <omega>^4) (k^2 + <zeta>^2)^sigma))^{1/2}`.
///
/// The first 64 terms are summed directly and the rest by Euler-Maclaurin;
/// the summand is smooth in `k`, so the remainder of the corrected tail is
/// far below the requested `1e-10` relative accuracy.
pub fn m_sigma(sigma: f64, sp: &SpectralPoint) -> Result<f64> {
    if sigma.is_nan() || sigma <= -2.5 {
        return Err(Error::MsigmaDomain(sigma));
    }
    let w4 = sp.bracket_omega_sq * sp.bracket_omega_sq;
    let z2 = sp.bracket_zeta * sp.bracket_zeta;
    let term = |k: f64| 1.0 / (k * k * (k.powi(4) + w4) * (k * k + z2).powf(sigma));
    let head: f64 = (1..=M_SIGMA_HEAD).map(|k| term(k as f64)).sum();
    let tail = euler_maclaurin_tail(
        (M_SIGMA_HEAD + 1) as f64,
        1.0,
        |x| Complex64::new(term(x), 0.0),
        |x| {
            let x2 = x * x;
            (x2 * (x2 * x2 + Complex64::new(w4, 0.0)) * (x2 + Complex64::new(z2, 0.0)).powf(sigma)).recip()
        },
        PowerTail {
            exponent: -6.0 - 2.0 * sigma,
            coeff: Complex64::new(1.0, 0.0),
        },
    );
    Ok((head + tail.re).sqrt())
}

pub fn m_sigma_value(sigma: f64, sp: &SpectralPoint) -> Result<MsigmaValue> {
    Ok(MsigmaValue {
        sigma,
        value: m_sigma(sigma, sp)?,
        regime: regime(sigma, sp),
    })
}

/// The two-regime model of `M_sigma`.
pub fn m_sigma_asymptotic(sigma: f64, sp: &SpectralPoint) -> Result<f64> {
    if sigma == -0.5 {
        return Err(Error::CriticalExponent);
    }
    if !(sigma > -2.5 && sigma < 1.5) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    let om = sp.bracket_omega();
    let high = sp.bracket_zeta.powf(-sigma) / (om * om);
    Ok(match regime(sigma, sp) {
        None | Some(Regime::HighZeta) => high,
        Some(Regime::LowZeta) => om.powf(-sigma) / om.powf(2.5),
    })
}

/// `(<omega>^2 M_sigma M_{-sigma}, <omega>^2 M_sigma M_{-sigma-2})`.
pub fn corollary_products(sigma: f64, sp: &SpectralPoint) -> Result<(f64, f64)> {
    let m = m_sigma(sigma, sp)?;
    let w2 = sp.bracket_omega_sq;
    Ok((w2 * m * m_sigma(-sigma, sp)?, w2 * m * m_sigma(-sigma - 2.0, sp)?))
}

/// Sample of a two-sided ratio over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSample {
    pub tau: f64,
    pub zeta: HorizontalMode,
    pub bracket_omega: f64,
    pub ratio: f64,
}

/// Observed constants of an equivalence `A ~ B`: `ratio` in `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equivalence {
    pub sigma: f64,
    pub lower: f64,
    pub upper: f64,
    pub samples: Vec<RatioSample>,
}

impl Equivalence {
    /// Smallest `C` with all ratios in `[1/C, C]`.
    pub fn constant(&self) -> f64 {
        self.upper.max(1.0 / self.lower)
    }

    fn from_samples(sigma: f64, samples: Vec<RatioSample>) -> Self {
        let lower = samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
        let upper = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
        Self { sigma, lower, upper, samples }
    }
}

/// Grid of `(tau, zeta)` with `<omega>` log-spaced in `[omega_min, omega_max]`
/// and `zeta = (n, 0)`, `n` log-spaced in `[1, zeta_max]`.
pub fn omega_zeta_grid(
    omega_min: f64,
    omega_max: f64,
    n_omega: usize,
    zeta_max: i64,
    n_zeta: usize,
) -> Vec<(f64, HorizontalMode)> {
    let mut out = Vec::new();
    for n in log_integers(1.0, zeta_max as f64, n_zeta) {
        let bz = 1.0 + n as f64;
        for om in logspace(omega_min, omega_max, n_omega) {
            let tau = om * om - bz * bz;
            if tau >= 0.0 {
                out.push((tau, HorizontalMode::new(n, 0)));
            }
        }
    }
    out
}

/// `m_sigma / m_sigma_asymptotic` over `omega_zeta_grid(2, 1e4, 40, 64, 13)`.
pub fn m_sigma_ratio_sweep(sigma: f64, params: &PhysicalParams) -> Result<Equivalence> {
    m_sigma_ratio_sweep_on(sigma, &omega_zeta_grid(2.0, 1e4, 40, 64, 13), params)
}

/// `m_sigma / m_sigma_asymptotic` over the given `(tau, zeta)` points.
pub fn m_sigma_ratio_sweep_on(sigma: f64, grid: &[(f64, HorizontalMode)], params: &PhysicalParams) -> Result<Equivalence> {
    let samples = grid
        .iter()
        .copied()
        .map(|(tau, zeta)| {
            let sp = make_spectral_point(Complex64::new(0.0, tau), zeta, params)?;
            Ok(RatioSample {
                tau,
                zeta,
                bracket_omega: sp.bracket_omega(),
                ratio: m_sigma(sigma, &sp)? / m_sigma_asymptotic(sigma, &sp)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Equivalence::from_samples(sigma, samples))
}

/// Range of `<omega>^2 |int_0^a (omega^2 - nu d_zz)^{-1}[1] dz|` over
/// `omega_zeta_grid(2, 1e4, 40, 64, 13)`.
pub fn inverse_integral_constants(params: &PhysicalParams) -> Result<Equivalence> {
    let samples = omega_zeta_grid(2.0, 1e4, 40, 64, 13)
        .into_iter()
        .map(|(tau, zeta)| {
            let sp = make_spectral_point(Complex64::new(0.0, tau), zeta, params)?;
            Ok(RatioSample {
                tau,
                zeta,
                bracket_omega: sp.bracket_omega(),
                ratio: sp.bracket_omega_sq * inverse_integral_one(&sp, params).norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Equivalence::from_samples(0.0, samples))
}

/// Whether `lambda` lies in the region known to contain the spectrum:
/// `Re lambda <= -nu pi^2 / a^2` and
/// `|Im lambda| <= 2 alpha + 2 a sqrt(beta gamma) sqrt(-Re lambda / nu)`.
pub fn spectrum_region_contains(lambda: Complex64, params: &PhysicalParams) -> bool {
    if lambda.re > -params.heat_gap() {
        return false;
    }
    let bound = 2.0 * params.alpha
        + 2.0 * params.a * (params.beta * params.gamma).sqrt() * (-lambda.re / params.nu).sqrt();
    lambda.im.abs() <= bound
}

/// The resolvent set used by the estimates: the half plane
/// `Re lambda >= -delta2` together with the cone
/// `{-delta2 - mu1 + i mu2 : |mu2| >= mu1 / delta1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventSet {
    pub delta1: f64,
    pub delta2: f64,
}

impl ResolventSet {
    /// `delta2 = 0.9 min(nu pi^2 / 2a^2, nu / 2)`; `delta1` is 90% of the
    /// largest opening keeping the cone off the spectrum region.
    pub fn for_params(params: &PhysicalParams) -> Self {
        let delta2 = 0.9 * (params.heat_gap() / 2.0).min(params.nu / 2.0);
        // The cone misses the region iff (x - delta2) / delta1 exceeds its
        // imaginary half-width at every depth x >= nu pi^2 / a^2; that ratio
        // increases with x, so the first depth is the binding one.
        let x0 = params.heat_gap();
        let width = 2.0 * params.alpha + 2.0 * params.a * (params.beta * params.gamma).sqrt() * (x0 / params.nu).sqrt();
        Self {
            delta1: 0.9 * (x0 - delta2) / width,
            delta2,
        }
    }

    pub fn contains(&self, lambda: Complex64) -> bool {
        let mu1 = -self.delta2 - lambda.re;
        mu1 <= 0.0 || lambda.im.abs() >= mu1 / self.delta1
    }
}

/// `min |omega^2| / <omega>^2` over `zeta != 0` and `lambda` on the boundary
/// of the resolvent set: the line `Re lambda = -delta2` and both cone edges.
pub fn omega_lower_bound(set: &ResolventSet, params: &PhysicalParams) -> f64 {
    let mut lambdas = vec![Complex64::new(-set.delta2, 0.0)];
    for s in logspace(1e-3, 1e8, 45) {
        lambdas.push(Complex64::new(-set.delta2, s));
        lambdas.push(Complex64::new(-set.delta2, -s));
        lambdas.push(Complex64::new(-set.delta2 - s, s / set.delta1));
        lambdas.push(Complex64::new(-set.delta2 - s, -s / set.delta1));
    }
    let mut zetas = Vec::new();
    for n in log_integers(1.0, 1e3, 16) {
        zetas.push(HorizontalMode::new(n, 0));
        zetas.push(HorizontalMode::new(n, n));
    }
    let mut worst = f64::INFINITY;
    for z in &zetas {
        let bz = z.bracket();
        for l in &lambdas {
            let om2 = l + params.nu * z.norm_sq();
            worst = worst.min(om2.norm() / (l.norm() + bz * bz));
        }
    }
    worst
}

/// Inner-product weights of the state `(u, v, theta)`: `1, 1, beta/gamma`.
pub fn state_weights(k: usize, params: &PhysicalParams) -> Vec<f64> {
    let t = if params.gamma == 0.0 && params.beta == 0.0 {
        1.0
    } else {
        params.beta / params.gamma
    };
    let mut w = vec![1.0; 2 * k];
    w.extend(std::iter::repeat(t).take(k));
    w
}

/// Coefficient matrix of the operator `P` on `(u, v, theta)` at one mode,
/// and the divergence row `b` with `b^T X = int_0^a (i xi u + i eta v)`.
pub fn p_matrix(zeta: HorizontalMode, k: usize, params: &PhysicalParams) -> Result<(CMat, CVec)> {
    if zeta.is_zero() {
        return Err(Error::ZeroMode);
    }
    let sp = make_spectral_point(Complex64::new(0.0, 0.0), zeta, params)?;
    let full = ModeOperator::new(sp, params, k)?.assemble();
    let n = 3 * k;
    let p = full.view((0, 0), (n, n)).into_owned();
    let b = CVec::from_iterator(n, full.row(n).iter().take(n).cloned());
    Ok((p, b))
}

/// `<P X, X'> = X'^H G P X` with `G` the state weights.
pub fn form_matrix(zeta: HorizontalMode, k: usize, params: &PhysicalParams) -> Result<(CMat, CVec)> {
    let (mut p, b) = p_matrix(zeta, k, params)?;
    for (r, w) in state_weights(k, params).into_iter().enumerate() {
        p.row_mut(r).scale_mut(w);
    }
    Ok((p, b))
}

/// Eigenvalues of the Galerkin truncation of `-P` on the divergence-free
/// subspace, sorted by decreasing real part.
pub fn truncated_p_eigenvalues(zeta: HorizontalMode, k: usize, params: &PhysicalParams) -> Result<Vec<Complex64>> {
    let (form, b) = form_matrix(zeta, k, params)?;
    let q = null_basis(&b);
    let g = CMat::from_diagonal(&CVec::from_iterator(
        3 * k,
        state_weights(k, params).into_iter().map(|w| Complex64::new(w, 0.0)),
    ));
    let a = -(q.adjoint() * form * &q);
    let gram = q.adjoint() * g * &q;
    let reduced = congruence(&gram, a)?;
    let mut eig: Vec<Complex64> = reduced
        .schur()
        .eigenvalues()
        .ok_or(Error::Invalid("Schur form did not converge".into()))?
        .iter()
        .cloned()
        .collect();
    eig.sort_by(|x, y| y.re.total_cmp(&x.re).then(x.im.total_cmp(&y.im)));
    Ok(eig)
}

/// `L^{-1} A L^{-H}` for the Cholesky factor `L` of `gram`.
fn congruence(gram: &CMat, a: CMat) -> Result<CMat> {
    let l = Cholesky::new(gram.clone()).ok_or(Error::Singular)?.unpack();
    let left = l.solve_lower_triangular(&a).ok_or(Error::Singular)?;
    let right = l
        .solve_lower_triangular(&left.adjoint())
        .ok_or(Error::Singular)?;
    Ok(right.adjoint())
}

/// Continuity constant `nu + 2 (a^2/pi) sqrt(beta gamma) + 2 alpha a^2 / pi^2`.
pub fn form_bound_constant(params: &PhysicalParams) -> f64 {
    let a2 = params.a * params.a;
    params.nu + 2.0 * a2 / PI * (params.beta * params.gamma).sqrt() + 2.0 * params.alpha * a2 / (PI * PI)
}

/// Squared gradient weights `k^2 pi^2 / a^2 + |zeta|^2` times the state
/// weights.
pub fn v_weights(zeta: HorizontalMode, k: usize, params: &PhysicalParams) -> Vec<f64> {
    let s = state_weights(k, params);
    (0..3 * k)
        .map(|i| {
            let kk = (i % k + 1) as f64;
            s[i] * (kk * kk * PI * PI / (params.a * params.a) + zeta.norm_sq())
        })
        .collect()
}

pub fn v_norm(x: &CVec, weights: &[f64]) -> f64 {
    x.iter().zip(weights).map(|(x, w)| w * x.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormBoundReport {
    pub bound: f64,
    /// Largest ratio over the random pairs.
    pub max_random: f64,
    /// Exact supremum over the truncated spaces of the sampled modes.
    pub supremum: f64,
    pub trials: usize,
}

impl FormBoundReport {
    pub fn holds(&self) -> bool {
        self.max_random <= self.bound && self.supremum <= self.bound
    }
}

struct FormMode {
    zeta: HorizontalMode,
    form: CMat,
    q: CMat,
    vw: Vec<f64>,
}

/// `|<P X, X'>| / (||X||_V ||X'||_V)` over random divergence-free pairs on the
/// modes `0 < max(|xi|, |eta|) <= 4`, plus the exact supremum on each mode.
pub fn form_bound_check(params: &PhysicalParams, k: usize, trials: usize, seed: u64) -> Result<FormBoundReport> {
    let mut modes = Vec::new();
    for xi in -4..=4 {
        for eta in -4..=4 {
            let zeta = HorizontalMode::new(xi, eta);
            if zeta.is_zero() {
                continue;
            }
            let (form, b) = form_matrix(zeta, k, params)?;
            modes.push(FormMode {
                zeta,
                form,
                q: null_basis(&b),
                vw: v_weights(zeta, k, params),
            });
        }
    }
    let supremum = modes
        .par_iter()
        .map(|m| {
            let vdiag = CVec::from_iterator(m.vw.len(), m.vw.iter().map(|w| Complex64::new(*w, 0.0)));
            let gram = m.q.adjoint() * CMat::from_diagonal(&vdiag) * &m.q;
            let reduced = congruence(&gram, m.q.adjoint() * &m.form * &m.q)?;
            Ok(reduced.singular_values().max())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mut rng = seeded(seed);
    let mut max_random: f64 = 0.0;
    let dim = 3 * k - 1;
    for _ in 0..trials {
        let m = &modes[rng.random_range(0..modes.len())];
        let y = CVec::from_fn(dim, |_, _| complex_normal(&mut rng));
        let y2 = CVec::from_fn(dim, |_, _| complex_normal(&mut rng));
        let x = &m.q * y;
        let x2 = &m.q * y2;
        let value = x2.dotc(&(&m.form * &x));
        max_random = max_random.max(value.norm() / (v_norm(&x, &m.vw) * v_norm(&x2, &m.vw)));
        debug_assert!(!m.zeta.is_zero());
    }
    Ok(FormBoundReport {
        bound: form_bound_constant(params),
        max_random,
        supremum,
        trials,
    })
}

/// `||Phi||_{s, zeta} / ||phi||_{s, zeta}` maximised over profiles of order
/// `K`, `Phi` the sine expansion of the primitive of `phi`.
pub fn antiderivative_norm(s: f64, zeta: HorizontalMode, k: usize, params: &PhysicalParams) -> f64 {
    let t = crate::vertical::antiderivative_matrix(k, params);
    let w = DVector::from_fn(k, |i, _| norm_weight(i + 1, s / 2.0, zeta, params));
    let scaled = DMatrix::from_fn(k, k, |i, j| w[i] * t[(i, j)] / w[j]);
    scaled.singular_values().max()
}

/// What a sweep asserts about a quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    /// Envelope slope within the tolerance of 0.
    Flat,
    /// Envelope slope at most the tolerance.
    NoGrowth,
    /// Reported only.
    Reported,
}

/// Left-hand sides measured by the regularity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    /// `||X||_{sigma+2}`.
    State,
    /// `(||X||_{sigma+2}^2 + |tau|^2 ||X||_sigma^2)^{1/2}`.
    Maximal,
    /// `|tau| ||theta||_sigma`.
    DtTheta,
    /// `(<omega>^4 ||theta||_sigma^2 + ||theta||_{sigma+2}^2)^{1/2}`.
    Theta,
    /// Pressure-driven velocity, against `<omega>^2 M_sigma M_{-sigma-2}`.
    Y1,
    /// Forcing-driven velocity, same form as `Theta`.
    Y2,
    /// `|zeta p0|` against `<omega>^2 M_sigma`.
    P0,
    /// `(1 + |zeta|^2)^{(sigma+1)/2} |p0|`, above the critical exponent.
    Q,
    /// Low-zeta part `(1 + tau^2)^{sigma/4 + 1/8} (1 + |zeta|^2)^{1/2} |p0|`.
    Q1,
    /// High-zeta part, weighted as `Q`.
    Q2,
    /// Heat maximal functional `(<omega>^4 ||g||_sigma^2 + ||g||_{sigma+2}^2)^{1/2}`.
    Heat,
}

impl Quantity {
    pub const ALL: [Quantity; 11] = [
        Quantity::State,
        Quantity::Maximal,
        Quantity::DtTheta,
        Quantity::Theta,
        Quantity::Y1,
        Quantity::Y2,
        Quantity::P0,
        Quantity::Q,
        Quantity::Q1,
        Quantity::Q2,
        Quantity::Heat,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::State => "state",
            Quantity::Maximal => "maximal",
            Quantity::DtTheta => "dt_theta",
            Quantity::Theta => "theta",
            Quantity::Y1 => "y1",
            Quantity::Y2 => "y2",
            Quantity::P0 => "p0",
            Quantity::Q => "q",
            Quantity::Q1 => "q1",
            Quantity::Q2 => "q2",
            Quantity::Heat => "heat",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.name() == s)
    }

    pub fn expectation(&self, sigma: f64) -> Expectation {
        match self {
            Quantity::State | Quantity::Heat => Expectation::Flat,
            Quantity::Maximal if sigma > -0.5 => Expectation::Flat,
            Quantity::Maximal => Expectation::Reported,
            _ => Expectation::NoGrowth,
        }
    }

    fn applies(&self, sigma: f64) -> bool {
        match self {
            Quantity::Q => sigma > -0.5,
            Quantity::Q1 | Quantity::Q2 => sigma < -0.5,
            _ => true,
        }
    }
}

/// Grid and sampling of a regularity sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Vertical truncation.
    pub k: usize,
    /// Number of log-spaced `n` in `[1, zeta_max]`; modes `(n, 0)` and `(n, n)`.
    pub n_zeta: usize,
    pub zeta_max: f64,
    /// `tau` in `{0} U +-logspace(tau_min, tau_max, n_tau)`.
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
    /// Points with `<omega>` above this are dropped.
    pub omega_max: f64,
    /// Log bins of `<omega>` over `[2, omega_max]` for the envelope.
    pub bins: usize,
    /// Random unit forcings per point, besides the worst-case direction.
    pub draws: usize,
    pub seed: u64,
    /// Slope tolerance.
    pub slope_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            k: 32,
            n_zeta: 13,
            zeta_max: 1e4,
            tau_min: 0.1,
            tau_max: 1e8,
            n_tau: 10,
            omega_max: 1e4,
            bins: 8,
            draws: 4,
            seed: 1,
            slope_tol: 0.05,
        }
    }
}

impl SweepConfig {
    pub fn points(&self) -> Vec<(f64, HorizontalMode)> {
        let mut taus = vec![0.0];
        for t in logspace(self.tau_min, self.tau_max, self.n_tau) {
            taus.push(t);
            taus.push(-t);
        }
        let mut out = Vec::new();
        for n in log_integers(1.0, self.zeta_max, self.n_zeta) {
            for zeta in [HorizontalMode::new(n, 0), HorizontalMode::new(n, n)] {
                let bz = zeta.bracket();
                for &tau in &taus {
                    if (tau.abs() + bz * bz).sqrt() <= self.omega_max {
                        out.push((tau, zeta));
                    }
                }
            }
        }
        out
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        logspace(2.0, self.omega_max, self.bins + 1)
    }
}

/// One line of a sweep report.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub xi: i64,
    pub eta: i64,
    pub sigma: f64,
    pub quantity: Quantity,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantitySummary {
    pub quantity: Quantity,
    pub expectation: Expectation,
    pub max_ratio: f64,
    /// `(bin centre, envelope)` for the bins with nonzero data.
    pub envelope: Vec<(f64, f64)>,
    pub slope: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub sigma: f64,
    pub rows: Vec<SweepRow>,
    pub summaries: Vec<QuantitySummary>,
}

impl SweepReport {
    pub fn summary(&self, q: Quantity) -> Option<&QuantitySummary> {
        self.summaries.iter().find(|s| s.quantity == q)
    }

    pub fn passed(&self) -> bool {
        self.summaries.iter().all(|s| s.passed)
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Upper envelope of `(<omega>, ratio)` samples per log bin, at the bin's
/// geometric centre; empty and all-zero bins are skipped.
pub fn envelope(samples: &[(f64, f64)], edges: &[f64]) -> Vec<(f64, f64)> {
    edges
        .windows(2)
        .filter_map(|w| {
            let top = samples
                .iter()
                .filter(|(om, _)| *om >= w[0] && *om < w[1])
                .map(|s| s.1)
                .fold(0.0, f64::max);
            (top > 0.0).then(|| ((w[0] * w[1]).sqrt(), top))
        })
        .collect()
}

/// Per-point worst case and random draws of every left-hand side in
/// `H^sigma_zeta`-unit forcing coordinates.
fn point_rows(
    sigma: f64,
    tau: f64,
    zeta: HorizontalMode,
    cfg: &SweepConfig,
    params: &PhysicalParams,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let k = cfg.k;
    let n = 3 * k;
    let sp = make_spectral_point(Complex64::new(0.0, tau), zeta, params)?;
    let op = ModeOperator::new(sp, params, k)?;
    let lu = op.assemble().lu();
    let mut rhs = CMat::zeros(n + 1, n);
    // Forcing in unit coordinates: F = W_sigma^{-1/2} y.
    for j in 0..n {
        rhs[(j, j)] = Complex64::new(norm_weight(j % k + 1, -sigma / 2.0, zeta, params), 0.0);
    }
    let sol = lu.solve(&rhs).ok_or(Error::Singular)?;

    let wgt = |s: f64| -> Vec<f64> { (1..=k).map(|j| norm_weight(j, s / 2.0, zeta, params)).collect() };
    let w_s = wgt(sigma);
    let w_s2 = wgt(sigma + 2.0);
    let om2 = sp.bracket_omega_sq;
    let block = |rows: std::ops::Range<usize>, w: &[f64], scale: f64| -> CMat {
        let mut m = sol.rows(rows.start, rows.len()).into_owned();
        for (r, mut row) in m.row_iter_mut().enumerate() {
            row *= Complex64::new(scale * w[r % k], 0.0);
        }
        m
    };
    let stack = |parts: Vec<CMat>| -> CMat {
        let rows: usize = parts.iter().map(|p| p.nrows()).sum();
        let mut out = CMat::zeros(rows, n);
        let mut at = 0;
        for p in parts {
            out.rows_mut(at, p.nrows()).copy_from(&p);
            at += p.nrows();
        }
        out
    };

    // Y1 = -i (xi, eta) p0 D^{-1} c.
    let c = op.const_vec();
    let d = op.heat_denominators();
    let p_row = sol.row(n).into_owned();
    let mut y1 = CMat::zeros(2 * k, n);
    for j in 0..k {
        let hc = Complex64::new(c[j], 0.0) / d[j];
        let fu = -Complex64::i() * zeta.xi as f64 * hc;
        let fv = -Complex64::i() * zeta.eta as f64 * hc;
        y1.row_mut(j).copy_from(&(&p_row * fu));
        y1.row_mut(k + j).copy_from(&(&p_row * fv));
    }
    let y2 = sol.rows(0, 2 * k) - &y1;
    let weigh = |m: &CMat, w: &[f64], scale: f64| -> CMat {
        let mut m = m.clone();
        for (r, mut row) in m.row_iter_mut().enumerate() {
            row *= Complex64::new(scale * w[r % k], 0.0);
        }
        m
    };

    let m_s = m_sigma(sigma, &sp)?;
    let m_neg = m_sigma(-sigma, &sp)?;
    let m_neg2 = m_sigma(-sigma - 2.0, &sp)?;
    let zeta_w = |s: f64| (1.0 + zeta.norm_sq()).powf(s / 2.0);
    let reg = regime(sigma, &sp);

    let mut out = Vec::new();
    for q in Quantity::ALL {
        if q == Quantity::Heat || !q.applies(sigma) {
            continue;
        }
        let (op_matrix, rhs_value) = match q {
            Quantity::State => (block(0..n, &w_s2, 1.0), 1.0),
            Quantity::Maximal => (
                stack(vec![block(0..n, &w_s2, 1.0), block(0..n, &w_s, tau.abs())]),
                1.0,
            ),
            Quantity::DtTheta => (block(2 * k..n, &w_s, tau.abs()), 1.0),
            Quantity::Theta => (
                stack(vec![block(2 * k..n, &w_s, om2), block(2 * k..n, &w_s2, 1.0)]),
                1.0,
            ),
            Quantity::Y1 => (
                stack(vec![weigh(&y1, &w_s, m_neg2 / m_neg), weigh(&y1, &w_s2, 1.0)]),
                om2 * m_s * m_neg2,
            ),
            Quantity::Y2 => (stack(vec![weigh(&y2, &w_s, om2), weigh(&y2, &w_s2, 1.0)]), 1.0),
            Quantity::P0 => (block(n..n + 1, &[1.0], zeta.norm()), om2 * m_s),
            Quantity::Q => (block(n..n + 1, &[1.0], zeta_w(sigma + 1.0)), 1.0),
            Quantity::Q1 => {
                let on = reg == Some(Regime::LowZeta);
                let s = if on {
                    (1.0 + tau * tau).powf(sigma / 4.0 + 0.125) * zeta_w(1.0)
                } else {
                    0.0
                };
                (block(n..n + 1, &[1.0], s), 1.0)
            }
            Quantity::Q2 => {
                let on = reg == Some(Regime::HighZeta);
                (block(n..n + 1, &[1.0], if on { zeta_w(sigma + 1.0) } else { 0.0 }), 1.0)
            }
            Quantity::Heat => unreachable!(),
        };
        let worst = if op_matrix.nrows() == 1 {
            op_matrix.norm()
        } else {
            op_matrix.clone().singular_values().max()
        };
        let mut rng = seeded(seed ^ (q as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut lhs = worst;
        for _ in 0..cfg.draws {
            let y = CVec::from_fn(n, |_, _| complex_normal(&mut rng));
            let y = &y / Complex64::new(y.norm(), 0.0);
            lhs = lhs.max((&op_matrix * y).norm());
        }
        out.push(SweepRow {
            tau,
            xi: zeta.xi,
            eta: zeta.eta,
            sigma,
            quantity: q,
            lhs,
            rhs: rhs_value,
            ratio: lhs / rhs_value,
        });
    }
    Ok(out)
}

fn summarize(sigma: f64, rows: &[SweepRow], cfg: &SweepConfig) -> Vec<QuantitySummary> {
    let edges = cfg.bin_edges();
    let mut out = Vec::new();
    for q in Quantity::ALL {
        let samples: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.quantity == q)
            .map(|r| {
                let z = HorizontalMode::new(r.xi, r.eta);
                let om = (r.tau.abs() + z.bracket() * z.bracket()).sqrt();
                (om, r.ratio)
            })
            .collect();
        if samples.is_empty() {
            continue;
        }
        let env = envelope(&samples, &edges);
        let slope = if env.len() >= 2 { log_log_slope(&env) } else { 0.0 };
        let max_ratio = samples.iter().map(|s| s.1).fold(0.0, f64::max);
        let expectation = q.expectation(sigma);
        let passed = max_ratio.is_finite()
            && match expectation {
                Expectation::Flat => slope.abs() <= cfg.slope_tol,
                Expectation::NoGrowth => slope <= cfg.slope_tol,
                Expectation::Reported => true,
            };
        out.push(QuantitySummary {
            quantity: q,
            expectation,
            max_ratio,
            envelope: env,
            slope,
            passed,
        });
    }
    out
}

/// Worst-case and randomised ratios of every estimated quantity to
/// `||F||_{sigma, zeta}` over the sweep grid, with envelope slopes.
pub fn regularity_sweep(sigma: f64, cfg: &SweepConfig, params: &PhysicalParams) -> Result<SweepReport> {
    if sigma == -0.5 {
        return Err(Error::CriticalExponent);
    }
    if !(sigma > -1.5 && sigma < 0.5) {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    let points = cfg.points();
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(i, (tau, zeta))| point_rows(sigma, *tau, *zeta, cfg, params, cfg.seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    let summaries = summarize(sigma, &rows, cfg);
    Ok(SweepReport { sigma, rows, summaries })
}

/// The heat maximal functional `(<omega>^4 ||g||_sigma^2 + ||g||_{sigma+2}^2)^{1/2}`
/// for `g = (omega^2 - nu d_zz)^{-1} f`, over the same grid. The operator is
/// diagonal, so the worst case is attained on a single vertical mode.
pub fn heat_maximal_sweep(sigma: f64, cfg: &SweepConfig, params: &PhysicalParams) -> Result<SweepReport> {
    let mut rows = Vec::new();
    let mut rng = seeded(cfg.seed);
    for (tau, zeta) in cfg.points() {
        let sp = make_spectral_point(Complex64::new(0.0, tau), zeta, params)?;
        let om4 = sp.bracket_omega_sq * sp.bracket_omega_sq;
        let gain = |j: usize| -> f64 {
            let w = norm_weight(j, 1.0, zeta, params);
            (om4 + w * w).sqrt() / sp.heat_denominator(j, params).norm()
        };
        let mut lhs = (1..=cfg.k).map(gain).fold(0.0, f64::max);
        for _ in 0..cfg.draws {
            let y: Vec<Complex64> = (0..cfg.k).map(|_| complex_normal(&mut rng)).collect();
            let norm = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let value = y
                .iter()
                .enumerate()
                .map(|(i, c)| (c.norm() / norm * gain(i + 1)).powi(2))
                .sum::<f64>()
                .sqrt();
            lhs = lhs.max(value);
        }
        rows.push(SweepRow {
            tau,
            xi: zeta.xi,
            eta: zeta.eta,
            sigma,
            quantity: Quantity::Heat,
            lhs,
            rhs: 1.0,
            ratio: lhs,
        });
    }
    let summaries = summarize(sigma, &rows, cfg);
    Ok(SweepReport { sigma, rows, summaries })
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Distinct rounded values of `logspace(lo, hi, n)`.
pub fn log_integers(lo: f64, hi: f64, n: usize) -> Vec<i64> {
    let mut v: Vec<i64> = logspace(lo, hi, n).into_iter().map(|x| x.round() as i64).collect();
    v.dedup();
    v
}
