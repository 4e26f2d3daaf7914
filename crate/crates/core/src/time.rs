//! Time-domain layer.
//!
//! Signals live on the uniform grid `t_j = j dt`. The Fourier-Laplace
//! transform is the trapezoid rule `f^(tau_m) = dt sum_j f_j e^{-i t_j tau_m}`
//! on the FFT-dual frequencies; a jump of a forcing at a grid point is
//! sampled with the midpoint of its one-sided limits so the rule stays second
//! order.
//!
//! [`evolve`] solves one bordered system per frequency and horizontal mode
//! and transforms back. The shift it uses is the bilinear image
//! `s = (2 i / dt) tan(tau dt / 2)` of `i tau`, which makes the synthesised
//! series exactly the periodic Crank-Nicolson solution: causal up to the
//! wrap-around of the decayed tail, and second-order accurate. The forcing
//! window is zero-padded to twice its length to leave room for that decay.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::estimates::{log_log_slope, logspace, p_matrix, regime_for_brackets, Regime};
use crate::linalg::{CMat, CVec, DenseLu, ShiftedBorderedSolver};
use crate::params::{HorizontalMode, PhysicalParams, SobolevIndex};
use crate::profile::{norm_weight, ModalField, VerticalProfile};
use crate::quad::{euler_maclaurin_tail, gauss_legendre, PowerTail};
use crate::random::{seeded, unit_forcing};
use crate::solver::{zeta_zero_solve, ModeRHS};
use crate::vertical::{cal_n, const_coefficient};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Constant of the discrete Plancherel identity
/// `sum_m |f^_m|^2 dtau = 2 pi sum_j |f_j|^2 dt`.
pub const PLANCHEREL: f64 = 2.0 * PI;

/// Relative level below which samples before `t = 0` count as zero.
pub const CAUSALITY_TOL: f64 = 1e-6;

/// Samples `f(t_0 + j dt)` of a scalar signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    start: f64,
    dt: f64,
    samples: Vec<Complex64>,
}

impl TimeSignal {
    /// Signal starting at `t = 0`.
    pub fn new(samples: Vec<Complex64>, dt: f64) -> Result<Self> {
        Self::with_start(0.0, samples, dt)
    }

    /// Signal starting at `start`, which must be a multiple of `dt`.
    pub fn with_start(start: f64, samples: Vec<Complex64>, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Invalid(format!("time step must be positive, got {dt}")));
        }
        let steps = start / dt;
        if !start.is_finite() || (steps - steps.round()).abs() > 1e-9 * steps.abs().max(1.0) {
            return Err(Error::Invalid(format!("start {start} is not on the grid of step {dt}")));
        }
        Ok(Self {
            start: steps.round() * dt,
            dt,
            samples,
        })
    }

    pub fn zeros(n: usize, dt: f64) -> Result<Self> {
        Self::new(vec![ZERO; n], dt)
    }

    pub fn from_real(values: &[f64], dt: f64) -> Result<Self> {
        Self::new(values.iter().map(|v| Complex64::new(*v, 0.0)).collect(), dt)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn time(&self, j: usize) -> f64 {
        self.start + j as f64 * self.dt
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// `(sum_j |f_j|^2 dt)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.dt).sqrt()
    }

    /// Largest `|f(t)|` with `t < onset`, relative to the peak.
    pub fn leak_before(&self, onset: f64) -> f64 {
        let peak = self.peak();
        if peak == 0.0 {
            return 0.0;
        }
        let cut = onset - 1e-9 * self.dt;
        (0..self.len())
            .filter(|j| self.time(*j) < cut)
            .map(|j| self.samples[j].norm())
            .fold(0.0, f64::max)
            / peak
    }

    /// Samples on `t >= 0`, zero-filled or truncated to `n`.
    fn causal_samples(&self, n: usize) -> Result<Vec<Complex64>> {
        let leak = self.leak_before(0.0);
        if leak > CAUSALITY_TOL {
            return Err(Error::NonCausal(format!(
                "|f(t)| reaches {leak:.3e} of its peak before t = 0"
            )));
        }
        let offset = (self.start / self.dt).round() as i64;
        let mut out = vec![ZERO; n];
        for (j, s) in self.samples.iter().enumerate() {
            let idx = offset + j as i64;
            if idx >= 0 && (idx as usize) < n {
                out[idx as usize] = *s;
            }
        }
        Ok(out)
    }
}

/// Values `f^(tau_m)` on the FFT-dual grid `tau_m = 2 pi m / (n dt)`, stored in
/// FFT order (non-negative frequencies first).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    dt: f64,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(values: Vec<Complex64>, dt: f64) -> Self {
        Self { dt, values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dtau(&self) -> f64 {
        2.0 * PI / (self.len() as f64 * self.dt)
    }

    pub fn taus(&self) -> Vec<f64> {
        fft_taus(self.len(), self.dt)
    }

    /// `(sum_m |f^_m|^2 dtau)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dtau()).sqrt()
    }
}

/// FFT-dual frequencies of an `n`-point grid with step `dt`, in FFT order.
pub fn fft_taus(n: usize, dt: f64) -> Vec<f64> {
    let scale = 2.0 * PI / (n as f64 * dt);
    (0..n)
        .map(|m| {
            let signed = if m < n.div_ceil(2) { m as i64 } else { m as i64 - n as i64 };
            signed as f64 * scale
        })
        .collect()
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    plan.process(buf);
}

/// Trapezoid-rule transform of the samples on `t >= 0`.
pub fn laplace_forward(sig: &TimeSignal) -> Result<Spectrum> {
    let n = (sig.len() as i64 + (sig.start / sig.dt).round() as i64).max(0) as usize;
    laplace_forward_padded(sig, n)
}

/// Like [`laplace_forward`] on a window of `n` samples.
pub fn laplace_forward_padded(sig: &TimeSignal, n: usize) -> Result<Spectrum> {
    let mut buf = sig.causal_samples(n)?;
    fft_in_place(&mut buf, false);
    for v in buf.iter_mut() {
        *v *= sig.dt;
    }
    Ok(Spectrum::new(buf, sig.dt))
}

/// Exact inverse of [`laplace_forward`] on the same grid.
pub fn laplace_inverse(spec: &Spectrum) -> TimeSignal {
    let mut buf = spec.values.clone();
    fft_in_place(&mut buf, true);
    let scale = 1.0 / (spec.len() as f64 * spec.dt);
    for v in buf.iter_mut() {
        *v *= scale;
    }
    TimeSignal {
        start: 0.0,
        dt: spec.dt,
        samples: buf,
    }
}

/// Scalar time profiles of separable forcings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pulse {
    /// `e^{-rate (t - onset)}` for `t >= onset`.
    Exponential { onset: f64, rate: f64 },
    /// `1` on `[start, end)`.
    Box { start: f64, end: f64 },
    /// `sin(2 pi frequency (t - start))` on `[start, end)`.
    Sine { start: f64, end: f64, frequency: f64 },
}

impl Pulse {
    pub fn onset(&self) -> f64 {
        match *self {
            Pulse::Exponential { onset, .. } => onset,
            Pulse::Box { start, .. } | Pulse::Sine { start, .. } => start,
        }
    }

    fn jumps(&self) -> Vec<f64> {
        match *self {
            Pulse::Exponential { onset, .. } => vec![onset],
            Pulse::Box { start, end } | Pulse::Sine { start, end, .. } => vec![start, end],
        }
    }

    /// One-sided value at `t`: the right limit if `right`, else the left one.
    fn limit(&self, t: f64, right: bool) -> f64 {
        let inside = |a: f64, b: f64| (t > a && t < b) || (right && t == a) || (!right && t == b);
        match *self {
            Pulse::Exponential { onset, rate } => {
                if inside(onset, f64::INFINITY) {
                    (-rate * (t - onset)).exp()
                } else {
                    0.0
                }
            }
            Pulse::Box { start, end } => f64::from(inside(start, end)),
            Pulse::Sine { start, end, frequency } => {
                if inside(start, end) {
                    (2.0 * PI * frequency * (t - start)).sin()
                } else {
                    0.0
                }
            }
        }
    }

    /// Right-continuous value.
    pub fn value(&self, t: f64) -> f64 {
        self.limit(t, true)
    }

    /// `n` samples on `t_j = j dt`, with the midpoint value at jumps that fall
    /// on the grid.
    pub fn sample(&self, n: usize, dt: f64) -> Result<TimeSignal> {
        let (left, right) = self.limits(n, dt);
        let values: Vec<f64> = (0..n).map(|j| 0.5 * (left[j] + right[j])).collect();
        TimeSignal::from_real(&values, dt)
    }

    /// Left and right limits at `t_j`, `j = 0..=n`, of the pulse cut off at
    /// `t_n`; they differ only at jumps on the grid.
    pub fn limits(&self, n: usize, dt: f64) -> (Vec<f64>, Vec<f64>) {
        let jumps = self.jumps();
        let mut left = Vec::with_capacity(n + 1);
        let mut right = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let t = j as f64 * dt;
            let (l, r) = match jumps.iter().find(|s| (t - **s).abs() <= 1e-9 * dt) {
                Some(s) => (self.limit(*s, false), self.limit(*s, true)),
                None => (self.value(t), self.value(t)),
            };
            left.push(l);
            right.push(if j == n { 0.0 } else { r });
        }
        (left, right)
    }
}

/// `profile(z) * signal(t)` on one horizontal mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingTerm {
    pub zeta: HorizontalMode,
    pub profile: ModeRHS,
    /// Samples at `t_j`, `j < n`.
    pub signal: TimeSignal,
    /// One-sided limits at `t_j`, `j = 0..=n`; equal to the samples where
    /// the signal is continuous and zero past the window.
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
}

impl ForcingTerm {
    /// Sample at `t_j` for `j <= n`: the midpoint of the limits at `t_n`.
    fn padded_sample(&self, j: usize) -> Complex64 {
        match j.cmp(&self.signal.len()) {
            std::cmp::Ordering::Less => self.signal.samples[j],
            std::cmp::Ordering::Equal => 0.5 * (self.left[j] + self.right[j]),
            std::cmp::Ordering::Greater => ZERO,
        }
    }
}

/// Time-dependent forcing as a sum of separable terms on `[0, n dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeForcing {
    k: usize,
    dt: f64,
    n: usize,
    terms: Vec<ForcingTerm>,
}

impl TimeForcing {
    pub fn new(k: usize, dt: f64, n: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyTruncation);
        }
        if !(dt > 0.0 && dt.is_finite()) || n < 2 {
            return Err(Error::Invalid(format!("time grid needs dt > 0 and n >= 2, got dt = {dt}, n = {n}")));
        }
        Ok(Self {
            k,
            dt,
            n,
            terms: Vec::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.n as f64 * self.dt
    }

    pub fn terms(&self) -> &[ForcingTerm] {
        &self.terms
    }

    pub fn add_term(&mut self, zeta: HorizontalMode, profile: ModeRHS, signal: TimeSignal) -> Result<()> {
        if profile.order() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                got: profile.order(),
            });
        }
        if (signal.dt - self.dt).abs() > 1e-12 * self.dt {
            return Err(Error::Invalid(format!("signal step {} differs from grid step {}", signal.dt, self.dt)));
        }
        let samples = signal.causal_samples(self.n)?;
        let mut edge = samples.clone();
        edge.push(ZERO);
        self.terms.push(ForcingTerm {
            zeta,
            profile,
            signal: TimeSignal::new(samples, self.dt)?,
            left: edge.clone(),
            right: edge,
        });
        Ok(())
    }

    /// Add `profile * pulse(t)`, keeping the one-sided limits of the pulse so
    /// that norms of the forcing are exact at jumps on the grid.
    pub fn add_pulse(&mut self, zeta: HorizontalMode, profile: ModeRHS, pulse: &Pulse) -> Result<()> {
        let signal = pulse.sample(self.n, self.dt)?;
        let (left, right) = pulse.limits(self.n, self.dt);
        self.add_term(zeta, profile, signal)?;
        let term = self.terms.last_mut().expect("term was just added");
        term.left = left.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        term.right = right.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        Ok(())
    }

    /// First grid time with a nonzero forcing sample.
    pub fn onset(&self) -> Option<f64> {
        self.terms
            .iter()
            .filter(|t| !t.profile.is_zero())
            .filter_map(|t| t.signal.samples.iter().position(|s| *s != ZERO))
            .min()
            .map(|j| j as f64 * self.dt)
    }

    fn grouped(&self) -> BTreeMap<HorizontalMode, Vec<&ForcingTerm>> {
        let mut out: BTreeMap<HorizontalMode, Vec<&ForcingTerm>> = BTreeMap::new();
        for t in &self.terms {
            out.entry(t.zeta).or_default().push(t);
        }
        out
    }

    /// Coefficient vector of the sample `F(t_j)` on `zeta`, length `3 K`;
    /// zero for `j > n`.
    pub fn sample(&self, zeta: HorizontalMode, j: usize) -> CVec {
        let mut out = CVec::zeros(3 * self.k);
        for t in self.terms.iter().filter(|t| t.zeta == zeta) {
            out += t.profile.to_vector() * t.padded_sample(j);
        }
        out
    }

    /// `(F(t_j^-), F(t_j^+))` on `zeta`; zero for `j > n`.
    pub fn limits(&self, zeta: HorizontalMode, j: usize) -> (CVec, CVec) {
        let mut left = CVec::zeros(3 * self.k);
        let mut right = CVec::zeros(3 * self.k);
        if j > self.n {
            return (left, right);
        }
        for t in self.terms.iter().filter(|t| t.zeta == zeta) {
            let p = t.profile.to_vector();
            left += &p * t.left[j];
            right += p * t.right[j];
        }
        (left, right)
    }
}

/// Pressure trace `q(tau, zeta) = p0` on the frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureTrace {
    pub taus: Vec<f64>,
    pub dtau: f64,
    pub q: BTreeMap<HorizontalMode, Vec<Complex64>>,
}

/// `q = q1 + q2` with `q1` on `<zeta> <= <omega>^kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureSplit {
    pub sigma: f64,
    pub q1: BTreeMap<HorizontalMode, Vec<Complex64>>,
    pub q2: BTreeMap<HorizontalMode, Vec<Complex64>>,
    /// `||q||_{L^2 H^{sigma+1}}`.
    pub q_norm: f64,
    /// `||q1||_{H^{sigma/2+1/4} H^1}`.
    pub q1_norm: f64,
    /// `||q2||_{L^2 H^{sigma+1}}`.
    pub q2_norm: f64,
}

/// Split the trace at the critical cutoff, with `<omega>^2 = |tau| + <zeta>^2`.
/// For `sigma > -1/2` everything goes to `q2`. Norms are discrete weighted
/// sums with `dtau / 2 pi`, matching the time-domain `L^2` norm.
pub fn pressure_split(trace: &PressureTrace, sigma: f64) -> Result<PressureSplit> {
    if sigma == -0.5 {
        return Err(Error::CriticalExponent);
    }
    let scale = trace.dtau / (2.0 * PI);
    let mut q1 = BTreeMap::new();
    let mut q2 = BTreeMap::new();
    let (mut nq, mut n1, mut n2) = (0.0, 0.0, 0.0);
    for (zeta, values) in &trace.q {
        let bz = zeta.bracket();
        let zw = 1.0 + zeta.norm_sq();
        let mut low = Vec::with_capacity(values.len());
        let mut high = Vec::with_capacity(values.len());
        for (tau, v) in trace.taus.iter().zip(values) {
            let bw = (tau.abs() + bz * bz).sqrt();
            let is_low = regime_for_brackets(sigma, bz, bw) == Some(Regime::LowZeta);
            let (a, b) = if is_low { (*v, ZERO) } else { (ZERO, *v) };
            nq += scale * zw.powf(sigma + 1.0) * v.norm_sqr();
            n1 += scale * (1.0 + tau * tau).powf(sigma / 2.0 + 0.25) * zw * a.norm_sqr();
            n2 += scale * zw.powf(sigma + 1.0) * b.norm_sqr();
            low.push(a);
            high.push(b);
        }
        q1.insert(*zeta, low);
        q2.insert(*zeta, high);
    }
    Ok(PressureSplit {
        sigma,
        q1,
        q2,
        q_norm: nq.sqrt(),
        q1_norm: n1.sqrt(),
        q2_norm: n2.sqrt(),
    })
}

/// Time history of one horizontal mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeHistory {
    /// Column `j` holds `(u, v, theta)` at `t_j`.
    pub states: CMat,
    pub p0: Vec<Complex64>,
    /// Forward residual `|(s I + P) X^ + b q - F^|` per frequency.
    pub residual: Vec<f64>,
    /// `|b^T X^|` per frequency.
    pub divergence: Vec<f64>,
}

/// `L^2`-in-time norms of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub sigma: f64,
    /// `||X||_{L^2 H^{sigma+2}}`.
    pub state: f64,
    /// `||F||_{L^2 H^sigma}`.
    pub forcing: f64,
    /// `||d_t theta||_{L^2 H^sigma}`.
    pub dt_theta: f64,
    pub q: f64,
    pub q1: f64,
    pub q2: f64,
}

/// Per-time norms written to the time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeseriesRow {
    pub t: f64,
    /// `||X(t)||_{H^{sigma+2}}`.
    pub state: f64,
    /// `||theta(t)||_{H^{sigma+2}}`.
    pub theta: f64,
    /// `||F(t_j)||_{H^sigma}` of the sample, the midpoint at jumps.
    pub forcing: f64,
    /// l2 norm of `p0(t)` over the modes.
    pub trace: f64,
}

/// Output of [`evolve`] on the padded window `[0, 2 n dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub k: usize,
    pub dt: f64,
    pub sigma: f64,
    pub forcing_len: usize,
    pub len: usize,
    pub onset: Option<f64>,
    pub modes: BTreeMap<HorizontalMode, ModeHistory>,
    pub trace: PressureTrace,
    pub split: PressureSplit,
    pub norms: NormReport,
    pub timeseries: Vec<TimeseriesRow>,
}

impl Evolution {
    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn state(&self, zeta: HorizontalMode, j: usize) -> Option<CVec> {
        self.modes.get(&zeta).map(|m| m.states.column(j).into_owned())
    }

    /// `(u, v, theta)` at `t_j` as modal fields.
    pub fn fields_at(&self, j: usize) -> Result<[ModalField; 3]> {
        let z_max = self
            .modes
            .keys()
            .map(|z| z.xi.abs().max(z.eta.abs()))
            .max()
            .unwrap_or(0);
        let mut out = [
            ModalField::new(z_max, self.k),
            ModalField::new(z_max, self.k),
            ModalField::new(z_max, self.k),
        ];
        for (zeta, h) in &self.modes {
            for (b, field) in out.iter_mut().enumerate() {
                let p = VerticalProfile::from_fn(self.k, |i| h.states[(b * self.k + i - 1, j)]);
                field.insert(*zeta, p)?;
            }
        }
        Ok(out)
    }

    /// Largest state norm before the forcing onset, relative to the peak.
    pub fn causality_leak(&self) -> f64 {
        let Some(onset) = self.onset else { return 0.0 };
        let peak = self.timeseries.iter().map(|r| r.state).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let cut = onset - 1e-9 * self.dt;
        self.timeseries
            .iter()
            .filter(|r| r.t < cut)
            .map(|r| r.state)
            .fold(0.0, f64::max)
            / peak
    }
}

fn weights(k: usize, s: f64, zeta: HorizontalMode, params: &PhysicalParams) -> Vec<f64> {
    (0..3 * k).map(|r| norm_weight(r % k + 1, s, zeta, params)).collect()
}

fn weighted_sq(w: &[f64], x: impl Iterator<Item = Complex64>) -> f64 {
    w.iter().zip(x).map(|(w, c)| w * c.norm_sqr()).sum()
}

/// Bilinear image of `i tau`; `None` at the Nyquist frequency, where the
/// Crank-Nicolson response vanishes.
fn bilinear_shift(tau: f64, dt: f64) -> Option<Complex64> {
    let half = 0.5 * tau * dt;
    if (half.abs() - 0.5 * PI).abs() < 1e-12 {
        None
    } else {
        Some(Complex64::new(0.0, 2.0 / dt * half.tan()))
    }
}

struct ShiftSolver {
    p: CMat,
    /// Constraint row and its bordered solver; `None` for the zero mode.
    border: Option<(CVec, ShiftedBorderedSolver)>,
}

/// `(x, p0, |residual|, |b^T x|)` at one frequency.
type ShiftSolve = (CVec, Complex64, f64, f64);

impl ShiftSolver {
    fn new(zeta: HorizontalMode, k: usize, params: &PhysicalParams) -> Result<Self> {
        if zeta.is_zero() {
            Ok(Self { p: zero_mode_matrix(k, params), border: None })
        } else {
            let (p, b) = p_matrix(zeta, k, params)?;
            let s = ShiftedBorderedSolver::new(&p, &b);
            Ok(Self { p, border: Some((b, s)) })
        }
    }

    fn solve(&self, lambda: Complex64, f: &CVec, params: &PhysicalParams) -> Result<ShiftSolve> {
        let (x, p0) = match &self.border {
            Some((_, s)) => s.solve(lambda, f)?,
            None => {
                let sol = zeta_zero_solve(&ModeRHS::from_vector(f)?, lambda, params)?;
                (sol.state_vector().rows(0, f.len()).into_owned(), ZERO)
            }
        };
        let mut r = &self.p * &x + &x * lambda - f;
        let mut div = 0.0;
        if let Some((b, _)) = &self.border {
            r += b * p0;
            div = b.iter().zip(x.iter()).map(|(b, x)| b * x).sum::<Complex64>().norm();
        }
        Ok((x, p0, r.norm(), div))
    }
}

/// Solve the forced problem from rest on the padded window `[0, 2 T)`.
///
/// Each `(tau, zeta)` point is one bordered solve of
/// `(s I + P) X + b p0 = F^`, `b^T X = 0`, with `s` the bilinear shift; the
/// zero mode has no constraint. The pressure gauge `c(t)` is zero.
pub fn evolve(forcing: &TimeForcing, sigma: f64, params: &PhysicalParams) -> Result<Evolution> {
    let sigma = SobolevIndex::admissible(sigma)?.value();
    params.validate()?;
    let (k, dt, n) = (forcing.k, forcing.dt, forcing.n);
    let n2 = 2 * n;
    let taus = fft_taus(n2, dt);
    let shifts: Vec<Option<Complex64>> = taus.iter().map(|t| bilinear_shift(*t, dt)).collect();
    let dtau = 2.0 * PI / (n2 as f64 * dt);

    let mut modes = BTreeMap::new();
    let mut q = BTreeMap::new();
    for (zeta, terms) in forcing.grouped() {
        let spectra: Vec<Vec<Complex64>> = terms
            .iter()
            .map(|t| {
                let padded = TimeSignal::new((0..n2).map(|j| t.padded_sample(j)).collect(), dt)?;
                laplace_forward(&padded).map(|s| s.values)
            })
            .collect::<Result<_>>()?;
        let profiles: Vec<CVec> = terms.iter().map(|t| t.profile.to_vector()).collect();
        let solver = ShiftSolver::new(zeta, k, params)?;
        let cols: Vec<ShiftSolve> = (0..n2)
            .into_par_iter()
            .map(|m| {
                let Some(s) = shifts[m] else {
                    return Ok((CVec::zeros(3 * k), ZERO, 0.0, 0.0));
                };
                let mut rhs = CVec::zeros(3 * k);
                for (p, spec) in profiles.iter().zip(&spectra) {
                    rhs += p * spec[m];
                }
                solver.solve(s, &rhs, params)
            })
            .collect::<Result<_>>()?;

        let inv = 1.0 / (n2 as f64 * dt);
        let mut states = CMat::zeros(3 * k, n2);
        let rows: Vec<Vec<Complex64>> = (0..3 * k)
            .into_par_iter()
            .map(|r| {
                let mut buf: Vec<Complex64> = cols.iter().map(|c| c.0[r]).collect();
                fft_in_place(&mut buf, true);
                buf
            })
            .collect();
        for (r, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                states[(r, j)] = v * inv;
            }
        }
        let q_hat: Vec<Complex64> = cols.iter().map(|c| c.1).collect();
        let mut p0 = q_hat.clone();
        fft_in_place(&mut p0, true);
        for v in p0.iter_mut() {
            *v *= inv;
        }
        modes.insert(
            zeta,
            ModeHistory {
                states,
                p0,
                residual: cols.iter().map(|c| c.2).collect(),
                divergence: cols.iter().map(|c| c.3).collect(),
            },
        );
        q.insert(zeta, q_hat);
    }

    let trace = PressureTrace { taus, dtau, q };
    let split = pressure_split(&trace, sigma)?;

    // Forcing norms use the trapezoid rule on one-sided limits, exact at
    // jumps on the grid. Where the limits differ from the sample, the
    // difference quotients of theta are corrected by half the gap on each
    // side, so they stay second order across jumps.
    let mut forcing_sq = 0.0;
    let mut sample_norms: BTreeMap<HorizontalMode, Vec<f64>> = BTreeMap::new();
    let mut gaps: BTreeMap<HorizontalMode, BTreeMap<usize, (CVec, CVec)>> = BTreeMap::new();
    for zeta in modes.keys() {
        let w = weights(k, sigma, *zeta, params);
        let mut norms = Vec::with_capacity(n + 1);
        let mut at = BTreeMap::new();
        for j in 0..=n {
            let (l, r) = forcing.limits(*zeta, j);
            let s = forcing.sample(*zeta, j);
            if j > 0 {
                forcing_sq += 0.5 * dt * weighted_sq(&w, l.iter().cloned());
            }
            if j < n {
                forcing_sq += 0.5 * dt * weighted_sq(&w, r.iter().cloned());
            }
            norms.push(weighted_sq(&w, s.iter().cloned()));
            if l != s || r != s {
                at.insert(j, (r - &s, l - &s));
            }
        }
        sample_norms.insert(*zeta, norms);
        gaps.insert(*zeta, at);
    }

    let state_w: BTreeMap<HorizontalMode, Vec<f64>> =
        modes.keys().map(|z| (*z, weights(k, sigma + 2.0, *z, params))).collect();
    let sigma_w: BTreeMap<HorizontalMode, Vec<f64>> =
        modes.keys().map(|z| (*z, weights(k, sigma, *z, params))).collect();
    let mut timeseries = Vec::with_capacity(n2);
    let mut dt_theta_sq = 0.0;
    let mut dq = vec![ZERO; k];
    #[allow(clippy::needless_range_loop)]
    for j in 0..n2 {
        let (mut state, mut theta, mut f, mut tr) = (0.0, 0.0, 0.0, 0.0);
        for (zeta, h) in &modes {
            let w = &state_w[zeta];
            let col = h.states.column(j);
            state += weighted_sq(w, col.iter().cloned());
            theta += weighted_sq(&w[2 * k..], col.iter().skip(2 * k).cloned());
            tr += h.p0[j].norm_sqr();
            if j <= n {
                f += sample_norms[zeta][j];
            }
            let next = h.states.column((j + 1) % n2);
            for (i, d) in dq.iter_mut().enumerate() {
                *d = (next[2 * k + i] - col[2 * k + i]) / dt;
            }
            let g = &gaps[zeta];
            if let Some((plus, _)) = g.get(&j) {
                for (i, d) in dq.iter_mut().enumerate() {
                    *d += 0.5 * plus[2 * k + i];
                }
            }
            if let Some((_, minus)) = g.get(&(j + 1)) {
                for (i, d) in dq.iter_mut().enumerate() {
                    *d += 0.5 * minus[2 * k + i];
                }
            }
            dt_theta_sq += dt * weighted_sq(&sigma_w[zeta][2 * k..], dq.iter().cloned());
        }
        timeseries.push(TimeseriesRow {
            t: j as f64 * dt,
            state: state.sqrt(),
            theta: theta.sqrt(),
            forcing: f.sqrt(),
            trace: tr.sqrt(),
        });
    }
    let l2 = |f: fn(&TimeseriesRow) -> f64| (timeseries.iter().map(|r| f(r).powi(2)).sum::<f64>() * dt).sqrt();
    let norms = NormReport {
        sigma,
        state: l2(|r| r.state),
        forcing: forcing_sq.sqrt(),
        dt_theta: dt_theta_sq.sqrt(),
        q: split.q_norm,
        q1: split.q1_norm,
        q2: split.q2_norm,
    };
    Ok(Evolution {
        k,
        dt,
        sigma,
        forcing_len: n,
        len: n2,
        onset: forcing.onset(),
        modes,
        trace,
        split,
        norms,
        timeseries,
    })
}

/// Coefficient matrix of the zero mode: per-`k` Coriolis pairs and heat.
fn zero_mode_matrix(k: usize, params: &PhysicalParams) -> CMat {
    let mut p = CMat::zeros(3 * k, 3 * k);
    for j in 0..k {
        let d = Complex64::new(params.heat_gap() * ((j + 1) * (j + 1)) as f64, 0.0);
        let a = Complex64::new(params.alpha, 0.0);
        p[(j, j)] = d;
        p[(j, k + j)] = -a;
        p[(k + j, k + j)] = d;
        p[(k + j, j)] = a;
        p[(2 * k + j, 2 * k + j)] = d;
    }
    p
}

/// Crank-Nicolson run of one mode from rest.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    pub zeta: HorizontalMode,
    pub dt: f64,
    /// `states[n]` is `(u, v, theta)` at `t = n dt`.
    pub states: Vec<CVec>,
    /// `p0` at the half steps `(n + 1/2) dt`.
    pub pressure: Vec<Complex64>,
    /// Largest `|b^T X_n| / (|b| |X_n|)` over the run.
    pub max_constraint: f64,
}

/// Crank-Nicolson integration of `X' + P X + b p0 = F(t)`, `b^T X = 0`, from
/// `X(0) = 0`; the pressure is an algebraic unknown of each step, so every
/// step is one bordered solve. The forcing is evaluated at the half step.
pub fn time_stepping_oracle(
    forcing: &dyn Fn(f64) -> ModeRHS,
    zeta: HorizontalMode,
    k: usize,
    params: &PhysicalParams,
    dt: f64,
    n_steps: usize,
) -> Result<OracleRun> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Invalid(format!("time step must be positive, got {dt}")));
    }
    let n = 3 * k;
    let (p, b) = if zeta.is_zero() {
        (zero_mode_matrix(k, params), None)
    } else {
        let (p, b) = p_matrix(zeta, k, params)?;
        (p, Some(b))
    };
    let size = if b.is_some() { n + 1 } else { n };
    let mut lhs = CMat::zeros(size, size);
    let mut explicit = CMat::identity(n, n).map(|x| x / dt);
    for i in 0..n {
        for j in 0..n {
            lhs[(i, j)] = p[(i, j)] * 0.5;
            explicit[(i, j)] -= p[(i, j)] * 0.5;
        }
        lhs[(i, i)] += Complex64::new(1.0 / dt, 0.0);
    }
    if let Some(b) = &b {
        for i in 0..n {
            lhs[(i, n)] = b[i];
            lhs[(n, i)] = b[i];
        }
    }
    let lu = DenseLu::new(lhs)?;
    let b_norm = b.as_ref().map(|b| b.norm()).unwrap_or(0.0);

    let mut x = CVec::zeros(n);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut pressure = Vec::with_capacity(n_steps);
    let mut max_constraint: f64 = 0.0;
    states.push(x.clone());
    for step in 0..n_steps {
        let f = forcing((step as f64 + 0.5) * dt);
        if f.order() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                got: f.order(),
            });
        }
        let mut rhs = CVec::zeros(size);
        rhs.rows_mut(0, n).copy_from(&(&explicit * &x + f.to_vector()));
        let sol = lu.solve(&rhs)?;
        x = sol.rows(0, n).into_owned();
        if let Some(b) = &b {
            pressure.push(sol[n]);
            let xn = x.norm();
            if xn > 0.0 {
                let bx: Complex64 = b.iter().zip(x.iter()).map(|(a, c)| a * c).sum();
                max_constraint = max_constraint.max(bx.norm() / (b_norm * xn));
            }
        } else {
            pressure.push(ZERO);
        }
        states.push(x.clone());
    }
    Ok(OracleRun {
        zeta,
        dt,
        states,
        pressure,
        max_constraint,
    })
}

/// [`time_stepping_oracle`] with a step-halving check: the run at `dt / 2`
/// must agree with the run at `dt` to relative `L^2` distance `tol`.
pub fn time_stepping_oracle_checked(
    forcing: &dyn Fn(f64) -> ModeRHS,
    zeta: HorizontalMode,
    k: usize,
    params: &PhysicalParams,
    dt: f64,
    n_steps: usize,
    tol: f64,
) -> Result<OracleRun> {
    let coarse = time_stepping_oracle(forcing, zeta, k, params, dt, n_steps)?;
    let fine = time_stepping_oracle(forcing, zeta, k, params, dt / 2.0, 2 * n_steps)?;
    let (mut diff, mut norm) = (0.0, 0.0);
    for (n, x) in coarse.states.iter().enumerate() {
        let y = &fine.states[2 * n];
        diff += (x - y).norm_squared();
        norm += y.norm_squared();
    }
    let change = if norm > 0.0 { (diff / norm).sqrt() } else { diff.sqrt() };
    if change > tol {
        return Err(Error::StepTooLarge { change, tol });
    }
    Ok(coarse)
}

/// Relative `L^2`-in-time distance between an evolution and an oracle run of
/// the same mode on their common grid times.
pub fn oracle_distance(evo: &Evolution, run: &OracleRun) -> Result<f64> {
    let h = evo
        .modes
        .get(&run.zeta)
        .ok_or_else(|| Error::Invalid(format!("mode ({}, {}) was not evolved", run.zeta.xi, run.zeta.eta)))?;
    let ratio = run.dt / evo.dt;
    let stride = ratio.round() as usize;
    if stride == 0 || (ratio - stride as f64).abs() > 1e-9 {
        return Err(Error::Invalid("oracle step is not a multiple of the evolution step".into()));
    }
    let (mut diff, mut norm) = (0.0, 0.0);
    for (n, x) in run.states.iter().enumerate() {
        let j = n * stride;
        if j >= evo.len {
            break;
        }
        let y = h.states.column(j);
        diff += (x - y).norm_squared();
        norm += x.norm_squared();
    }
    Ok(if norm > 0.0 { (diff / norm).sqrt() } else { diff.sqrt() })
}

/// Settings of the randomized sweep of regularity ratios over forcings.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomEvolveConfig {
    pub draws: usize,
    pub k: usize,
    pub z_max: i64,
    pub terms: usize,
    pub dt: f64,
    pub n: usize,
    pub seed: u64,
}

impl Default for RandomEvolveConfig {
    fn default() -> Self {
        Self {
            draws: 10,
            k: 16,
            z_max: 3,
            terms: 3,
            dt: 0.01,
            n: 1000,
            seed: 7,
        }
    }
}

/// Bound on `||d_t theta|| / ||F||`: the heat part alone has the multiplier
/// `s / (s + d)` of modulus at most one.
pub const DT_THETA_BOUND: f64 = 1.0;

/// Ratios `||X||_{L^2 H^{sigma+2}} / ||F||_{L^2 H^sigma}` and
/// `||d_t theta||_{L^2 H^sigma} / ||F||_{L^2 H^sigma}` per draw.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomEvolveReport {
    pub sigma: f64,
    pub state: Vec<f64>,
    pub dt_theta: Vec<f64>,
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

impl RandomEvolveReport {
    pub fn max_state(&self) -> f64 {
        self.state.iter().cloned().fold(0.0, f64::max)
    }

    pub fn median_state(&self) -> f64 {
        median(&self.state)
    }

    pub fn max_dt_theta(&self) -> f64 {
        self.dt_theta.iter().cloned().fold(0.0, f64::max)
    }

    pub fn median_dt_theta(&self) -> f64 {
        median(&self.dt_theta)
    }

    /// No state ratio exceeds twice the median, and the temperature
    /// derivative ratio stays below [`DT_THETA_BOUND`].
    pub fn passed(&self) -> bool {
        self.max_state() <= 2.0 * self.median_state() && self.max_dt_theta() <= DT_THETA_BOUND
    }
}

/// Random forcing of `cfg.terms` separable terms with random modes, unit
/// `H^sigma` profiles and random pulses.
pub fn random_forcing(sigma: f64, params: &PhysicalParams, cfg: &RandomEvolveConfig, seed: u64) -> Result<TimeForcing> {
    let mut rng = seeded(seed);
    let mut forcing = TimeForcing::new(cfg.k, cfg.dt, cfg.n)?;
    let t_end = cfg.n as f64 * cfg.dt;
    let on_grid = |t: f64| (t / cfg.dt).round() * cfg.dt;
    for _ in 0..cfg.terms {
        let zeta = HorizontalMode::new(rng.random_range(-cfg.z_max..=cfg.z_max), rng.random_range(-cfg.z_max..=cfg.z_max));
        let profile = unit_forcing(&mut rng, cfg.k, SobolevIndex(sigma), zeta, params);
        let start = on_grid(rng.random_range(0.0..0.3) * t_end);
        let pulse = match rng.random_range(0..3) {
            0 => Pulse::Exponential {
                onset: start,
                rate: rng.random_range(0.2..5.0),
            },
            1 => Pulse::Box {
                start,
                end: on_grid(start + rng.random_range(0.1..0.5) * t_end),
            },
            _ => Pulse::Sine {
                start,
                end: on_grid(start + rng.random_range(0.1..0.5) * t_end),
                frequency: rng.random_range(0.1..5.0),
            },
        };
        forcing.add_pulse(zeta, profile, &pulse)?;
    }
    Ok(forcing)
}

pub fn random_evolve_sweep(sigma: f64, params: &PhysicalParams, cfg: &RandomEvolveConfig) -> Result<RandomEvolveReport> {
    let mut state = Vec::with_capacity(cfg.draws);
    let mut dt_theta = Vec::with_capacity(cfg.draws);
    for d in 0..cfg.draws {
        let forcing = random_forcing(sigma, params, cfg, cfg.seed.wrapping_add(d as u64))?;
        let evo = evolve(&forcing, sigma, params)?;
        state.push(evo.norms.state / evo.norms.forcing);
        dt_theta.push(evo.norms.dt_theta / evo.norms.forcing);
    }
    Ok(RandomEvolveReport { sigma, state, dt_theta })
}

/// Horizontal mode of the counter-example.
pub const COUNTEREXAMPLE_MODE: HorizontalMode = HorizontalMode { xi: 1, eta: 0 };

const MULTIPLIER_HEAD: usize = 63;

/// `m(tau) = -i omega^2 (C_a / a) N(omega a / sqrt(nu))^{-1}
/// sum_{k odd} k^{-alpha-1} / (omega^2 + nu k^2 pi^2 / a^2)`
/// with `omega^2 = i tau + nu |zeta|^2` at `zeta = (1, 0)` and
/// `C_a = 2 sqrt(2 a) / pi`, so that `c_k = C_a / k` for odd `k`.
///
/// Odd `k <= 63` are summed directly, the rest by Euler-Maclaurin with step 2.
pub fn counterexample_multiplier(tau: f64, alpha_ce: f64, params: &PhysicalParams) -> Complex64 {
    let omega_sq = Complex64::new(params.nu * COUNTEREXAMPLE_MODE.norm_sq(), tau);
    let gap = params.heat_gap();
    let p = -alpha_ce - 1.0;
    let term = |x: f64| Complex64::new(x.powf(p), 0.0) / (omega_sq + gap * x * x);
    let head: Complex64 = (1..=MULTIPLIER_HEAD).step_by(2).map(|k| term(k as f64)).sum();
    let tail = euler_maclaurin_tail(
        (MULTIPLIER_HEAD + 2) as f64,
        2.0,
        term,
        |x| x.powf(p) * (x * x * Complex64::new(gap, 0.0) + omega_sq).recip(),
        PowerTail {
            exponent: p - 2.0,
            coeff: Complex64::new(1.0 / gap, 0.0),
        },
    );
    let c_a = const_coefficient(1, params);
    let omega = omega_sq.sqrt();
    let chi = omega * (params.a / params.nu.sqrt());
    Complex64::new(0.0, -1.0) * omega_sq * (c_a / params.a) * (head + tail) / cal_n(chi)
}

/// Least-squares slope of `log |m|` against `log tau` on `n` log-spaced points.
pub fn counterexample_slope(alpha_ce: f64, params: &PhysicalParams, tau_lo: f64, tau_hi: f64, n: usize) -> f64 {
    let pts: Vec<(f64, f64)> = logspace(tau_lo, tau_hi, n)
        .into_iter()
        .map(|t| (t, counterexample_multiplier(t, alpha_ce, params).norm()))
        .collect();
    log_log_slope(&pts)
}

/// Frequency profile `g^(tau) = (1 + |tau|)^{-decay} log(e + |tau|)^{-log_power}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GProfile {
    pub decay: f64,
    pub log_power: f64,
}

impl Default for GProfile {
    /// Square-integrable but in no `H^s`, `s > 0`.
    fn default() -> Self {
        Self {
            decay: 0.5,
            log_power: 1.0,
        }
    }
}

impl GProfile {
    pub fn value(&self, tau: f64) -> f64 {
        let t = tau.abs();
        (1.0 + t).powf(-self.decay) * (E + t).ln().powf(-self.log_power)
    }

    pub fn is_square_integrable(&self) -> bool {
        self.decay > 0.5 || (self.decay == 0.5 && self.log_power > 0.5)
    }

    /// `int_R g^2 dtau`, through `tau = e^{1/v} - e` on `v in (0, 1]`, which
    /// maps the logarithmic tail to a bounded interval.
    pub fn l2_norm_sq(&self) -> Result<f64> {
        if !self.is_square_integrable() {
            return Err(Error::Invalid(format!(
                "g profile with decay {} and log power {} is not square integrable",
                self.decay, self.log_power
            )));
        }
        let (d, l) = (self.decay, self.log_power);
        // g^2 dtau/dv = v^{2l-2} e^{(1-2d)/v} (1 - (e-1) e^{-1/v})^{-2d}
        let f = |v: f64| v.powf(2.0 * l - 2.0) * ((1.0 - 2.0 * d) / v).exp() * (1.0 - (E - 1.0) * (-1.0 / v).exp()).powf(-2.0 * d);
        let (x, w) = gauss_legendre(16);
        let mut acc = 0.0;
        let mut hi: f64 = 1.0;
        for _ in 0..60 {
            let lo = 0.5 * hi;
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            acc += x.iter().zip(&w).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half;
            hi = lo;
        }
        if d == 0.5 {
            acc += hi.powf(2.0 * l - 1.0) / (2.0 * l - 1.0);
        }
        Ok(2.0 * acc)
    }
}

/// `2 int_0^{10^j} g(tau)^2 w(tau) dtau` for `j = 0..=decades`.
pub fn partial_masses(g: &GProfile, w: &(dyn Fn(f64) -> f64 + Sync), decades: u32) -> Vec<f64> {
    let (x, wt) = gauss_legendre(16);
    let f = |t: f64| g.value(t).powi(2) * w(t);
    // [0, 1] on dyadic panels for the algebraic behaviour of w at 0.
    let mut head = 0.0;
    let mut hi: f64 = 1.0;
    for _ in 0..50 {
        let lo = 0.5 * hi;
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        head += x.iter().zip(&wt).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half;
        hi = lo;
    }
    let per_decade: Vec<f64> = (0..decades)
        .into_par_iter()
        .map(|j| {
            const PANELS: usize = 8;
            let (a, b) = (j as f64 * 10f64.ln(), (j + 1) as f64 * 10f64.ln());
            let h = (b - a) / PANELS as f64;
            (0..PANELS)
                .map(|p| {
                    let mid = a + (p as f64 + 0.5) * h;
                    x.iter()
                        .zip(&wt)
                        .map(|(x, w)| {
                            let t = (mid + 0.5 * h * x).exp();
                            w * f(t) * t
                        })
                        .sum::<f64>()
                        * 0.5
                        * h
                })
                .sum()
        })
        .collect();
    let mut out = Vec::with_capacity(decades as usize + 1);
    let mut acc = head;
    out.push(2.0 * acc);
    for d in per_decade {
        acc += d;
        out.push(2.0 * acc);
    }
    out
}

/// Partial masses at `|tau| <= 10^decade`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRow {
    pub decade: u32,
    /// `||g |tau|^{-alpha/2}||^2`.
    pub partial_l2: f64,
    /// `||g m||^2` with the computed multiplier.
    pub multiplier: f64,
    /// `||g||^2`, the bounded contrast of the valid regime.
    pub contrast: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub sigma: f64,
    pub alpha_ce: f64,
    pub g: GProfile,
    pub g_l2_sq: f64,
    pub slope: f64,
    pub rows: Vec<GrowthRow>,
    /// First decade from which growth ratios are asserted.
    pub asymptotic_from: u32,
}

/// Minimal growth ratio between consecutive decades for unbounded growth.
pub const GROWTH_RATIO: f64 = 1.5;

impl CounterexampleReport {
    pub fn target_slope(&self) -> f64 {
        -self.alpha_ce / 2.0
    }

    pub fn slope_ok(&self, tol: f64) -> bool {
        (self.slope - self.target_slope()).abs() <= tol
    }

    /// Ratios `mass(10^{j+1}) / mass(10^j)`, indexed by `j`.
    pub fn ratios(&self, column: fn(&GrowthRow) -> f64) -> Vec<f64> {
        self.rows.windows(2).map(|w| column(&w[1]) / column(&w[0])).collect()
    }

    fn grows(&self, column: fn(&GrowthRow) -> f64) -> bool {
        let r = self.ratios(column);
        let from = self.asymptotic_from as usize;
        from < r.len() && r[from..].iter().all(|x| *x > GROWTH_RATIO)
    }

    /// Both the model and the computed multiplier grow by more than
    /// [`GROWTH_RATIO`] per decade from `asymptotic_from` on.
    pub fn diverges(&self) -> bool {
        self.grows(|r| r.partial_l2) && self.grows(|r| r.multiplier)
    }

    /// The contrast masses never exceed the full `L^2` mass of `g`.
    pub fn contrast_bounded(&self) -> bool {
        self.rows.iter().all(|r| r.contrast <= self.g_l2_sq * (1.0 + 1e-9))
    }
}

/// Growth table of the counter-example over `|tau| <= 10^j`, `j = 0..=decades`.
pub fn counterexample_report(
    sigma: f64,
    alpha_ce: f64,
    g: &GProfile,
    params: &PhysicalParams,
    decades: u32,
    asymptotic_from: u32,
) -> Result<CounterexampleReport> {
    if !(sigma > -1.5 && sigma < -0.5) {
        return Err(Error::Invalid(format!(
            "the counter-example needs sigma in (-3/2, -1/2), got {sigma}"
        )));
    }
    if !(alpha_ce > sigma + 0.5 && alpha_ce < 0.0) {
        return Err(Error::Invalid(format!(
            "alpha must lie in (sigma + 1/2, 0) = ({}, 0), got {alpha_ce}",
            sigma + 0.5
        )));
    }
    params.validate()?;
    let g_l2_sq = g.l2_norm_sq()?;
    let p = *params;
    let model = partial_masses(g, &|t: f64| t.powf(-alpha_ce), decades);
    let computed = partial_masses(g, &move |t: f64| counterexample_multiplier(t, alpha_ce, &p).norm_sqr(), decades);
    let contrast = partial_masses(g, &|_| 1.0, decades);
    let rows = (0..=decades)
        .map(|j| GrowthRow {
            decade: j,
            partial_l2: model[j as usize],
            multiplier: computed[j as usize],
            contrast: contrast[j as usize],
        })
        .collect();
    Ok(CounterexampleReport {
        sigma,
        alpha_ce,
        g: *g,
        g_l2_sq,
        slope: counterexample_slope(alpha_ce, params, 1e2, 1e6, 41),
        rows,
        asymptotic_from,
    })
}
