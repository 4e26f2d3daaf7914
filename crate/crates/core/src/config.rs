//! Run configuration.
//!
//! A single TOML file. The physical constants and `sigma` have no defaults;
//! every other key has the documented default below. Errors carry the line
//! and column of the offending value.
//!
//! ```toml
//! sigma = 0.0
//! seed = 1                  # default 1
//!
//! [params]
//! a = 1.0
//! nu = 0.1
//! alpha = 1.0
//! beta = 1.0
//! gamma = 1.0
//!
//! [truncation]
//! k = 32                    # vertical modes
//! z_max = 2                 # |xi|, |eta| <= z_max
//!
//! [time]
//! t = 10.0                  # forcing window; evolve pads it to 2 t
//! dt = 0.01
//!
//! [solve]
//! taus = [0.0, 1.0, 10.0, 100.0]
//! forcing = "forcing.csv"   # optional; random white forcing if absent
//!
//! [evolve]
//! random_terms = 0
//! stride = 0                # state output stride, 0 = about 100 snapshots
//! [[evolve.term]]
//! xi = 1
//! eta = 0
//! component = "u"           # u | v | theta
//! k = 1
//! amplitude = [1.0, 0.0]
//! pulse = "exponential"     # exponential | box | sine
//! start = 0.0
//! end = 1.0                 # box and sine
//! rate = 1.0                # exponential
//! frequency = 1.0           # sine
//!
//! [verify]                  # see VerifyOptions for the defaults
//! [counterexample]          # see CounterexampleOptions
//! ```

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use crate::params::{HorizontalMode, PhysicalParams, SobolevIndex};
use crate::time::{GProfile, Pulse};

/// Configuration error with its position in the source.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: Option<PathBuf>,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.path {
            write!(f, "{}:", p.display())?;
        }
        if let (Some(l), Some(c)) = (self.line, self.column) {
            write!(f, "{l}:{c}:")?;
        }
        write!(f, " {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map(|i| offset - i).unwrap_or(offset + 1);
    (line, col)
}

struct Ctx<'a> {
    src: &'a str,
    path: Option<&'a Path>,
}

impl Ctx<'_> {
    fn err(&self, span: Option<Range<usize>>, message: impl Into<String>) -> ConfigError {
        let (line, column) = match span {
            Some(s) => {
                let (l, c) = line_col(self.src, s.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        ConfigError {
            path: self.path.map(Path::to_path_buf),
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    sigma: Spanned<f64>,
    seed: Option<u64>,
    params: RawParams,
    #[serde(default)]
    truncation: RawTruncation,
    #[serde(default)]
    time: RawTime,
    #[serde(default)]
    solve: RawSolve,
    #[serde(default)]
    evolve: RawEvolve,
    #[serde(default)]
    verify: RawVerify,
    #[serde(default)]
    counterexample: RawCounterexample,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    a: Spanned<f64>,
    nu: Spanned<f64>,
    alpha: Spanned<f64>,
    beta: Spanned<f64>,
    gamma: Spanned<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTruncation {
    k: Option<Spanned<i64>>,
    z_max: Option<Spanned<i64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t: Option<Spanned<f64>>,
    dt: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolve {
    taus: Option<Spanned<Vec<f64>>>,
    forcing: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvolve {
    #[serde(default)]
    term: Vec<Spanned<RawTerm>>,
    random_terms: Option<usize>,
    stride: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    xi: i64,
    eta: i64,
    component: String,
    k: usize,
    #[serde(default = "unit_amplitude")]
    amplitude: [f64; 2],
    pulse: String,
    #[serde(default)]
    start: f64,
    end: Option<f64>,
    rate: Option<f64>,
    frequency: Option<f64>,
}

fn unit_amplitude() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    resolvent_points: Option<usize>,
    residual_k: Option<usize>,
    residual_instances: Option<usize>,
    oracle_k: Option<usize>,
    oracle_t: Option<f64>,
    oracle_dt: Option<f64>,
    spectrum_k: Option<usize>,
    spectrum_zeta: Option<i64>,
    form_trials: Option<usize>,
    form_k: Option<usize>,
    sweep_k: Option<usize>,
    sweep_n_zeta: Option<usize>,
    sweep_n_tau: Option<usize>,
    msigma_n_omega: Option<usize>,
    msigma_n_zeta: Option<usize>,
    random_draws: Option<usize>,
    negative_control: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCounterexample {
    sigma: Option<Spanned<f64>>,
    alpha: Option<Spanned<f64>>,
    slope_alphas: Option<Vec<f64>>,
    decades: Option<u32>,
    asymptotic_from: Option<u32>,
    g_decay: Option<f64>,
    g_log_power: Option<f64>,
    tau_min: Option<f64>,
    tau_max: Option<f64>,
    n_tau: Option<usize>,
}

/// Vertical component of a forcing term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    U,
    V,
    Theta,
}

/// One separable forcing term `amplitude e_k(z) pulse(t)` on a mode.
#[derive(Debug, Clone, PartialEq)]
pub struct TermSpec {
    pub zeta: HorizontalMode,
    pub component: Component,
    pub k: usize,
    pub amplitude: (f64, f64),
    pub pulse: Pulse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub taus: Vec<f64>,
    pub forcing: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub terms: Vec<TermSpec>,
    pub random_terms: usize,
    pub stride: usize,
}

/// Sizes of the verification claims.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub resolvent_points: usize,
    pub residual_k: usize,
    pub residual_instances: usize,
    pub oracle_k: usize,
    pub oracle_t: f64,
    pub oracle_dt: f64,
    pub spectrum_k: usize,
    pub spectrum_zeta: i64,
    pub form_trials: usize,
    pub form_k: usize,
    pub sweep_k: usize,
    pub sweep_n_zeta: usize,
    pub sweep_n_tau: usize,
    pub msigma_n_omega: usize,
    pub msigma_n_zeta: usize,
    pub random_draws: usize,
    /// Adds a deliberately false claim.
    pub negative_control: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            resolvent_points: 100,
            residual_k: 256,
            residual_instances: 200,
            oracle_k: 64,
            oracle_t: 10.0,
            oracle_dt: 1e-3,
            spectrum_k: 64,
            spectrum_zeta: 4,
            form_trials: 10_000,
            form_k: 16,
            sweep_k: 32,
            sweep_n_zeta: 13,
            sweep_n_tau: 10,
            msigma_n_omega: 40,
            msigma_n_zeta: 13,
            random_draws: 10,
            negative_control: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleOptions {
    pub sigma: f64,
    pub alpha: f64,
    pub slope_alphas: Vec<f64>,
    pub decades: u32,
    pub asymptotic_from: u32,
    pub g: GProfile,
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        Self {
            sigma: -1.0,
            alpha: -0.4,
            slope_alphas: vec![-0.2, -0.4, -0.8],
            decades: 10,
            asymptotic_from: 6,
            g: GProfile::default(),
            tau_min: 1e-2,
            tau_max: 1e8,
            n_tau: 101,
        }
    }
}

/// Validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub sigma: f64,
    pub seed: u64,
    pub k: usize,
    pub z_max: i64,
    pub t: f64,
    pub dt: f64,
    pub solve: SolveOptions,
    pub evolve: EvolveOptions,
    pub verify: VerifyOptions,
    pub counterexample: CounterexampleOptions,
}

impl RunConfig {
    /// Number of forcing samples `round(t / dt)`.
    pub fn time_steps(&self) -> usize {
        (self.t / self.dt).round() as usize
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let src = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: Some(path.to_path_buf()),
            line: None,
            column: None,
            message: format!("cannot read config: {e}"),
        })?;
        parse(&src, Some(path))
    }
}

pub fn parse_str(src: &str) -> Result<RunConfig, ConfigError> {
    parse(src, None)
}

fn parse(src: &str, path: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let ctx = Ctx { src, path };
    let raw: RawConfig = toml::from_str(src).map_err(|e| ctx.err(e.span(), e.message().trim().to_string()))?;

    let p = &raw.params;
    let params = PhysicalParams::new(
        *p.a.get_ref(),
        *p.nu.get_ref(),
        *p.alpha.get_ref(),
        *p.beta.get_ref(),
        *p.gamma.get_ref(),
    )
    .map_err(|e| {
        let span = match &e {
            crate::Error::InvalidParam { name, .. } => match *name {
                "a" => p.a.span(),
                "nu" => p.nu.span(),
                "alpha" => p.alpha.span(),
                "beta" => p.beta.span(),
                _ => p.gamma.span(),
            },
            _ => p.a.span(),
        };
        ctx.err(Some(span), e.to_string())
    })?;

    let sigma = *raw.sigma.get_ref();
    SobolevIndex::admissible(sigma).map_err(|e| match e {
        crate::Error::CriticalExponent => ctx.err(
            Some(raw.sigma.span()),
            "sigma = -0.5 is the critical exponent kappa = (2 sigma + 1) / (2 sigma) = 0 and is not admissible",
        ),
        other => ctx.err(Some(raw.sigma.span()), other.to_string()),
    })?;

    let positive_int = |v: &Option<Spanned<i64>>, name: &str, default: i64, min: i64| -> Result<i64, ConfigError> {
        match v {
            None => Ok(default),
            Some(s) if *s.get_ref() >= min => Ok(*s.get_ref()),
            Some(s) => Err(ctx.err(Some(s.span()), format!("{name} must be at least {min}, got {}", s.get_ref()))),
        }
    };
    let k = positive_int(&raw.truncation.k, "k", 32, 1)? as usize;
    let z_max = positive_int(&raw.truncation.z_max, "z_max", 2, 0)?;

    let positive = |v: &Option<Spanned<f64>>, name: &str, default: f64| -> Result<f64, ConfigError> {
        match v {
            None => Ok(default),
            Some(s) if *s.get_ref() > 0.0 && s.get_ref().is_finite() => Ok(*s.get_ref()),
            Some(s) => Err(ctx.err(Some(s.span()), format!("{name} must be positive, got {}", s.get_ref()))),
        }
    };
    let t = positive(&raw.time.t, "t", 10.0)?;
    let dt = positive(&raw.time.dt, "dt", 0.01)?;
    if t / dt < 2.0 {
        return Err(ctx.err(raw.time.dt.as_ref().map(|s| s.span()), "time window must hold at least two steps"));
    }

    let taus = match &raw.solve.taus {
        None => vec![0.0, 1.0, 10.0, 100.0],
        Some(s) => {
            if s.get_ref().iter().any(|t| !t.is_finite()) {
                return Err(ctx.err(Some(s.span()), "taus must be finite"));
            }
            s.get_ref().clone()
        }
    };
    let base = path.and_then(Path::parent).unwrap_or(Path::new(""));
    let solve = SolveOptions {
        taus,
        forcing: raw.solve.forcing.as_ref().map(|f| base.join(f)),
    };

    let mut terms = Vec::new();
    for term in &raw.evolve.term {
        terms.push(term_spec(term.get_ref(), k, z_max).map_err(|m| ctx.err(Some(term.span()), m))?);
    }
    let evolve = EvolveOptions {
        terms,
        random_terms: raw.evolve.random_terms.unwrap_or(0),
        stride: raw.evolve.stride.unwrap_or(0),
    };

    let d = VerifyOptions::default();
    let v = &raw.verify;
    let verify = VerifyOptions {
        resolvent_points: v.resolvent_points.unwrap_or(d.resolvent_points),
        residual_k: v.residual_k.unwrap_or(d.residual_k),
        residual_instances: v.residual_instances.unwrap_or(d.residual_instances),
        oracle_k: v.oracle_k.unwrap_or(d.oracle_k),
        oracle_t: v.oracle_t.unwrap_or(d.oracle_t),
        oracle_dt: v.oracle_dt.unwrap_or(d.oracle_dt),
        spectrum_k: v.spectrum_k.unwrap_or(d.spectrum_k),
        spectrum_zeta: v.spectrum_zeta.unwrap_or(d.spectrum_zeta),
        form_trials: v.form_trials.unwrap_or(d.form_trials),
        form_k: v.form_k.unwrap_or(d.form_k),
        sweep_k: v.sweep_k.unwrap_or(d.sweep_k),
        sweep_n_zeta: v.sweep_n_zeta.unwrap_or(d.sweep_n_zeta),
        sweep_n_tau: v.sweep_n_tau.unwrap_or(d.sweep_n_tau),
        msigma_n_omega: v.msigma_n_omega.unwrap_or(d.msigma_n_omega),
        msigma_n_zeta: v.msigma_n_zeta.unwrap_or(d.msigma_n_zeta),
        random_draws: v.random_draws.unwrap_or(d.random_draws),
        negative_control: v.negative_control.unwrap_or(d.negative_control),
    };

    let d = CounterexampleOptions::default();
    let c = &raw.counterexample;
    let ce_sigma = c.sigma.as_ref().map(|s| *s.get_ref()).unwrap_or(d.sigma);
    if !(ce_sigma > -1.5 && ce_sigma < -0.5) {
        return Err(ctx.err(
            c.sigma.as_ref().map(|s| s.span()),
            format!("counterexample sigma must lie in (-3/2, -1/2), got {ce_sigma}"),
        ));
    }
    let alpha = c.alpha.as_ref().map(|s| *s.get_ref()).unwrap_or(d.alpha);
    if !(alpha > ce_sigma + 0.5 && alpha < 0.0) {
        return Err(ctx.err(
            c.alpha.as_ref().map(|s| s.span()),
            format!("counterexample alpha must lie in (sigma + 1/2, 0) = ({}, 0), got {alpha}", ce_sigma + 0.5),
        ));
    }
    let g = GProfile {
        decay: c.g_decay.unwrap_or(d.g.decay),
        log_power: c.g_log_power.unwrap_or(d.g.log_power),
    };
    if !g.is_square_integrable() {
        return Err(ctx.err(None, "[counterexample] g profile must be square integrable"));
    }
    let counterexample = CounterexampleOptions {
        sigma: ce_sigma,
        alpha,
        slope_alphas: c.slope_alphas.clone().unwrap_or(d.slope_alphas),
        decades: c.decades.unwrap_or(d.decades),
        asymptotic_from: c.asymptotic_from.unwrap_or(d.asymptotic_from),
        g,
        tau_min: c.tau_min.unwrap_or(d.tau_min),
        tau_max: c.tau_max.unwrap_or(d.tau_max),
        n_tau: c.n_tau.unwrap_or(d.n_tau),
    };

    Ok(RunConfig {
        params,
        sigma,
        seed: raw.seed.unwrap_or(1),
        k,
        z_max,
        t,
        dt,
        solve,
        evolve,
        verify,
        counterexample,
    })
}

fn term_spec(t: &RawTerm, k: usize, z_max: i64) -> Result<TermSpec, String> {
    let component = match t.component.as_str() {
        "u" => Component::U,
        "v" => Component::V,
        "theta" => Component::Theta,
        other => return Err(format!("unknown component {other:?}; expected u, v or theta")),
    };
    if t.k == 0 || t.k > k {
        return Err(format!("vertical mode k = {} outside 1..={k}", t.k));
    }
    if t.xi.abs() > z_max || t.eta.abs() > z_max {
        return Err(format!("mode ({}, {}) outside z_max = {z_max}", t.xi, t.eta));
    }
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| format!("pulse {:?} needs {name}", t.pulse));
    let pulse = match t.pulse.as_str() {
        "exponential" => Pulse::Exponential {
            onset: t.start,
            rate: need(t.rate, "rate")?,
        },
        "box" => Pulse::Box {
            start: t.start,
            end: need(t.end, "end")?,
        },
        "sine" => Pulse::Sine {
            start: t.start,
            end: need(t.end, "end")?,
            frequency: need(t.frequency, "frequency")?,
        },
        other => return Err(format!("unknown pulse {other:?}; expected exponential, box or sine")),
    };
    if t.start < 0.0 {
        return Err("pulse start must be non-negative".into());
    }
    Ok(TermSpec {
        zeta: HorizontalMode::new(t.xi, t.eta),
        component,
        k: t.k,
        amplitude: (t.amplitude[0], t.amplitude[1]),
        pulse,
    })
}
