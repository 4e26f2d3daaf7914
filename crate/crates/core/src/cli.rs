//! `primeq` command line: `solve`, `evolve`, `verify` and `counterexample`.
//!
//! Every command reads one TOML run configuration and writes CSV files at
//! full double precision into the output directory. Exit codes: 0 success,
//! 1 runtime or I/O failure, 2 configuration error, 3 a check failed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{Component, ConfigError, RunConfig, TermSpec};
use crate::estimates::logspace;
use crate::output::{write_dat, CsvTable};
use crate::random::{seeded, unit_forcing};
use crate::solver::{solve_mode, zeta_zero_solve, ModeRHS, ModeSolution};
use crate::time::{
    counterexample_multiplier, counterexample_report, counterexample_slope, evolve, random_forcing, Evolution,
    RandomEvolveConfig, TimeForcing, CAUSALITY_TOL,
};
use crate::verify::run_verification;
use crate::{make_spectral_point, row, HorizontalMode, SobolevIndex, VerticalProfile};

type Action = fn(&RunConfig, &Path) -> Result<(), CliError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "primeq", version, about = "Mode solver and estimate checks for the linear primitive equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Run configuration (TOML).
    #[arg(long, short)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, short, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the resolvent problem on each configured mode and frequency.
    Solve(Common),
    /// Evolve a forcing from rest and split the pressure trace.
    Evolve(Common),
    /// Run the registered numerical claims.
    Verify(Common),
    /// Tabulate the counter-example multiplier and its growth.
    Counterexample(Common),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Solver(#[from] crate::Error),
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Check(_) => EXIT_CHECK,
            CliError::Io(_) | CliError::Solver(_) => EXIT_RUNTIME,
        }
    }
}

/// Parse `args` (program name first), run and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("primeq: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    let (common, action): (&Common, Action) = match command {
        Command::Solve(c) => (c, cmd_solve),
        Command::Evolve(c) => (c, cmd_evolve),
        Command::Verify(c) => (c, cmd_verify),
        Command::Counterexample(c) => (c, cmd_counterexample),
    };
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    fs::create_dir_all(&common.out)?;
    match common.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Io(io::Error::other(e.to_string())))?;
            pool.install(|| action(&cfg, &common.out))
        }
        None => action(&cfg, &common.out),
    }
}

const MODE_HEADERS: [&str; 10] = ["xi", "eta", "tau", "k", "re_u", "im_u", "re_v", "im_v", "re_theta", "im_theta"];
const PRESSURE_HEADERS: [&str; 7] = ["xi", "eta", "tau", "re_p0", "im_p0", "residual", "divergence"];
// `pivot_ratio` is max/min |U_ii| of the LU factors, 0 where no factorisation was needed.
const SOLVE_PRESSURE_HEADERS: [&str; 8] =
    ["xi", "eta", "tau", "re_p0", "im_p0", "residual", "divergence", "pivot_ratio"];

pub struct SolveTables {
    pub modes: CsvTable,
    pub pressure: CsvTable,
}

/// Read a modal forcing file with columns
/// `xi, eta, k, re_f1, im_f1, re_f2, im_f2, re_f3, im_f3`.
pub fn read_forcing(path: &Path, k_max: usize) -> Result<BTreeMap<HorizontalMode, ModeRHS>, CliError> {
    let bytes = fs::read(path)?;
    let located = |line: usize, message: String| ConfigError {
        path: Some(path.to_path_buf()),
        line: Some(line),
        column: None,
        message,
    };
    let mut out: BTreeMap<HorizontalMode, ModeRHS> = BTreeMap::new();
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(out);
    }
    let table = CsvTable::from_bytes(&bytes).map_err(|e| located(1, e.to_string()))?;
    let cols = ["xi", "eta", "k", "re_f1", "im_f1", "re_f2", "im_f2", "re_f3", "im_f3"];
    let idx: Vec<usize> = cols
        .iter()
        .map(|c| table.column_index(c).map_err(|e| located(1, e.to_string())))
        .collect::<Result<_, _>>()?;
    for (r, rec) in table.rows.iter().enumerate() {
        let line = r + 2;
        let int = |i: usize| {
            rec[idx[i]]
                .trim()
                .parse::<i64>()
                .map_err(|e| located(line, format!("{}: {e}", cols[i])))
        };
        let float = |i: usize| {
            rec[idx[i]]
                .trim()
                .parse::<f64>()
                .map_err(|e| located(line, format!("{}: {e}", cols[i])))
        };
        let zeta = HorizontalMode::new(int(0)?, int(1)?);
        let k = int(2)?;
        if k < 1 || k as usize > k_max {
            return Err(located(line, format!("vertical mode k = {k} outside 1..={k_max}")).into());
        }
        let entry = out.entry(zeta).or_insert_with(|| ModeRHS::zeros(k_max));
        let k = k as usize;
        for (c, prof) in [&mut entry.f1, &mut entry.f2, &mut entry.f3].into_iter().enumerate() {
            let v = Complex64::new(float(3 + 2 * c)?, float(4 + 2 * c)?);
            if !v.is_finite() {
                return Err(located(line, "forcing values must be finite".into()).into());
            }
            prof.coeffs_mut()[k - 1] += v;
        }
    }
    Ok(out)
}

/// Seeded forcing with a unit `H^sigma` profile on every mode
/// `|xi|, |eta| <= z_max`.
pub fn random_mode_forcing(cfg: &RunConfig) -> BTreeMap<HorizontalMode, ModeRHS> {
    let mut rng = seeded(cfg.seed);
    let mut out = BTreeMap::new();
    for xi in -cfg.z_max..=cfg.z_max {
        for eta in -cfg.z_max..=cfg.z_max {
            let zeta = HorizontalMode::new(xi, eta);
            out.insert(zeta, unit_forcing(&mut rng, cfg.k, SobolevIndex(cfg.sigma), zeta, &cfg.params));
        }
    }
    out
}

fn solve_one(f: &ModeRHS, tau: f64, zeta: HorizontalMode, cfg: &RunConfig) -> crate::Result<ModeSolution> {
    let lambda = Complex64::new(0.0, tau);
    if zeta.is_zero() {
        zeta_zero_solve(f, lambda, &cfg.params)
    } else {
        solve_mode(f, &make_spectral_point(lambda, zeta, &cfg.params)?, &cfg.params)
    }
}

/// Tables written by `solve`: one row per `(zeta, tau, k)` and one per
/// `(zeta, tau)`.
pub fn solve_tables(cfg: &RunConfig) -> Result<SolveTables, CliError> {
    let forcing = match &cfg.solve.forcing {
        Some(path) => read_forcing(path, cfg.k)?,
        None => random_mode_forcing(cfg),
    };
    let jobs: Vec<(HorizontalMode, &ModeRHS, f64)> = forcing
        .iter()
        .flat_map(|(z, f)| cfg.solve.taus.iter().map(move |t| (*z, f, *t)))
        .collect();
    let sols: Vec<ModeSolution> = jobs
        .par_iter()
        .map(|(z, f, t)| solve_one(f, *t, *z, cfg))
        .collect::<crate::Result<_>>()?;
    let mut modes = CsvTable::new(&MODE_HEADERS);
    let mut pressure = CsvTable::new(&SOLVE_PRESSURE_HEADERS);
    for ((zeta, _, tau), sol) in jobs.iter().zip(&sols) {
        for j in 1..=sol.order() {
            let (u, v, th) = (sol.u.coeff(j), sol.v.coeff(j), sol.theta.coeff(j));
            modes.push(row![zeta.xi, zeta.eta, *tau, j, u.re, u.im, v.re, v.im, th.re, th.im]);
        }
        pressure.push(row![
            zeta.xi,
            zeta.eta,
            *tau,
            sol.p0.re,
            sol.p0.im,
            sol.residual_norm,
            sol.divergence.norm(),
            sol.pivot_ratio.unwrap_or(0.0)
        ]);
    }
    Ok(SolveTables { modes, pressure })
}

fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let t = solve_tables(cfg)?;
    t.modes.write(&out.join("mode_solution.csv"))?;
    t.pressure.write(&out.join("pressure.csv"))?;
    println!("solve: {} rows, {} mode solves", t.modes.len(), t.pressure.len());
    Ok(())
}

fn term_profile(term: &TermSpec, k: usize) -> ModeRHS {
    let a = Complex64::new(term.amplitude.0, term.amplitude.1);
    let mut f = ModeRHS::zeros(k);
    let target = match term.component {
        Component::U => &mut f.f1,
        Component::V => &mut f.f2,
        Component::Theta => &mut f.f3,
    };
    *target = VerticalProfile::basis(term.k, k).scale(a);
    f
}

/// Forcing of `evolve`: the configured terms plus `random_terms` seeded ones.
pub fn evolve_forcing(cfg: &RunConfig) -> Result<TimeForcing, CliError> {
    let n = cfg.time_steps();
    let mut forcing = if cfg.evolve.random_terms > 0 {
        let rc = RandomEvolveConfig {
            draws: 1,
            k: cfg.k,
            z_max: cfg.z_max,
            terms: cfg.evolve.random_terms,
            dt: cfg.dt,
            n,
            seed: cfg.seed,
        };
        random_forcing(cfg.sigma, &cfg.params, &rc, cfg.seed)?
    } else {
        TimeForcing::new(cfg.k, cfg.dt, n)?
    };
    for term in &cfg.evolve.terms {
        forcing.add_pulse(term.zeta, term_profile(term, cfg.k), &term.pulse)?;
    }
    Ok(forcing)
}

pub struct EvolveTables {
    pub evolution: Evolution,
    pub timeseries: CsvTable,
    pub norms: CsvTable,
    pub states: CsvTable,
    pub pressure: CsvTable,
    pub split: CsvTable,
}

/// Stride of the state snapshots; 0 in the configuration picks about 100.
pub fn state_stride(cfg: &RunConfig, len: usize) -> usize {
    match cfg.evolve.stride {
        0 => len.div_ceil(100).max(1),
        s => s,
    }
}

pub fn evolve_tables(cfg: &RunConfig) -> Result<EvolveTables, CliError> {
    let forcing = evolve_forcing(cfg)?;
    let evo = evolve(&forcing, cfg.sigma, &cfg.params)?;
    let onset = evo.onset.unwrap_or(f64::INFINITY);
    let cut = onset - 1e-9 * evo.dt;

    let mut timeseries = CsvTable::new(&["t", "state", "theta", "forcing", "trace", "pre_onset"]);
    for r in &evo.timeseries {
        timeseries.push(row![r.t, r.state, r.theta, r.forcing, r.trace, r.t < cut]);
    }

    let nr = &evo.norms;
    let mut norms = CsvTable::new(&["quantity", "value"]);
    for (name, v) in [
        ("sigma", nr.sigma),
        ("dt", evo.dt),
        ("state", nr.state),
        ("forcing", nr.forcing),
        ("dt_theta", nr.dt_theta),
        ("q", nr.q),
        ("q1", nr.q1),
        ("q2", nr.q2),
        ("causality_leak", evo.causality_leak()),
    ] {
        norms.push(row![name, v]);
    }

    let k = evo.k;
    let mut states = CsvTable::new(&MODE_HEADERS);
    states.headers[2] = "t".into();
    for j in (0..evo.len).step_by(state_stride(cfg, evo.len)) {
        for (zeta, h) in &evo.modes {
            for i in 0..k {
                let (u, v, th) = (h.states[(i, j)], h.states[(k + i, j)], h.states[(2 * k + i, j)]);
                states.push(row![zeta.xi, zeta.eta, evo.time(j), i + 1, u.re, u.im, v.re, v.im, th.re, th.im]);
            }
        }
    }

    let mut pressure = CsvTable::new(&PRESSURE_HEADERS);
    let mut split = CsvTable::new(&["tau", "xi", "eta", "part", "re", "im"]);
    let order = sorted_frequencies(&evo.trace.taus);
    for (zeta, q) in &evo.trace.q {
        let h = &evo.modes[zeta];
        for &m in &order {
            let tau = evo.trace.taus[m];
            pressure.push(row![zeta.xi, zeta.eta, tau, q[m].re, q[m].im, h.residual[m], h.divergence[m]]);
            for (part, values) in [("q1", &evo.split.q1), ("q2", &evo.split.q2)] {
                let v = values[zeta][m];
                split.push(row![tau, zeta.xi, zeta.eta, part, v.re, v.im]);
            }
        }
    }
    Ok(EvolveTables {
        evolution: evo,
        timeseries,
        norms,
        states,
        pressure,
        split,
    })
}

/// Indices of FFT-ordered frequencies in increasing order.
fn sorted_frequencies(taus: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..taus.len()).collect();
    idx.sort_by(|a, b| taus[*a].total_cmp(&taus[*b]));
    idx
}

fn cmd_evolve(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let t = evolve_tables(cfg)?;
    t.timeseries.write(&out.join("timeseries.csv"))?;
    t.norms.write(&out.join("evolve_norms.csv"))?;
    t.states.write(&out.join("evolve_state.csv"))?;
    t.pressure.write(&out.join("pressure.csv"))?;
    t.split.write(&out.join("pressure_split.csv"))?;
    let evo = &t.evolution;
    let pts: Vec<(f64, f64)> = evo.timeseries.iter().map(|r| (r.t, r.state)).collect();
    write_dat(&out.join("timeseries.dat"), "t state", &pts)?;
    let nr = &evo.norms;
    println!(
        "evolve: |X| = {:.6e}, |F| = {:.6e}, |d_t theta| = {:.6e}, q = {:.6e}, q1 = {:.6e}, q2 = {:.6e}",
        nr.state, nr.forcing, nr.dt_theta, nr.q, nr.q1, nr.q2
    );
    let leak = evo.causality_leak();
    if leak > CAUSALITY_TOL {
        return Err(CliError::Check(format!(
            "state before the forcing onset reaches {leak:.3e} of its peak (tolerance {CAUSALITY_TOL:.0e})"
        )));
    }
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let report = run_verification(cfg)?;
    report.to_table().write(&out.join("verify_report.csv"))?;
    let summary = report.summary();
    fs::write(out.join("verify_summary.txt"), &summary)?;
    print!("{summary}");
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Check(format!("{} claim(s) failed", report.failures())))
    }
}

pub struct CounterexampleTables {
    pub multiplier: CsvTable,
    pub growth: CsvTable,
    pub slopes: CsvTable,
    pub passed: bool,
}

pub fn counterexample_tables(cfg: &RunConfig) -> Result<CounterexampleTables, CliError> {
    let c = &cfg.counterexample;
    let p = &cfg.params;
    let mut multiplier = CsvTable::new(&["tau", "re_m", "im_m", "abs_m"]);
    for tau in logspace(c.tau_min, c.tau_max, c.n_tau) {
        let m = counterexample_multiplier(tau, c.alpha, p);
        multiplier.push(row![tau, m.re, m.im, m.norm()]);
    }

    let r = counterexample_report(c.sigma, c.alpha, &c.g, p, c.decades, c.asymptotic_from)?;
    let mut growth = CsvTable::new(&[
        "decade",
        "partial_l2",
        "multiplier_l2",
        "contrast_l2",
        "partial_ratio",
        "multiplier_ratio",
    ]);
    for (i, row) in r.rows.iter().enumerate() {
        let ratio = |f: fn(&crate::time::GrowthRow) -> f64| if i == 0 { f64::NAN } else { f(row) / f(&r.rows[i - 1]) };
        growth.push(row![
            row.decade,
            row.partial_l2,
            row.multiplier,
            row.contrast,
            ratio(|x| x.partial_l2),
            ratio(|x| x.multiplier)
        ]);
    }

    let mut slopes = CsvTable::new(&["alpha", "slope", "target", "deviation", "passed"]);
    let mut slopes_ok = true;
    for &alpha in &c.slope_alphas {
        let s = counterexample_slope(alpha, p, 1e2, 1e6, 41);
        let dev = (s + alpha / 2.0).abs();
        slopes_ok &= dev <= 0.05;
        slopes.push(row![alpha, s, -alpha / 2.0, dev, dev <= 0.05]);
    }
    Ok(CounterexampleTables {
        multiplier,
        growth,
        slopes,
        passed: slopes_ok && r.diverges() && r.contrast_bounded(),
    })
}

fn cmd_counterexample(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let t = counterexample_tables(cfg)?;
    t.multiplier.write(&out.join("multiplier.csv"))?;
    t.growth.write(&out.join("growth.csv"))?;
    t.slopes.write(&out.join("slopes.csv"))?;
    let pts = |tab: &CsvTable, x: &str, y: &str| -> io::Result<Vec<(f64, f64)>> {
        Ok(tab.floats(x)?.into_iter().zip(tab.floats(y)?).collect())
    };
    write_dat(&out.join("multiplier.dat"), "tau abs_m", &pts(&t.multiplier, "tau", "abs_m")?)?;
    write_dat(&out.join("growth.dat"), "decade partial_l2", &pts(&t.growth, "decade", "partial_l2")?)?;
    for line in t.slopes.rows.iter() {
        println!("slope alpha = {}: {} (target {})", line[0], line[1], line[2]);
    }
    if t.passed {
        Ok(())
    } else {
        Err(CliError::Check("counter-example growth or slope check failed".into()))
    }
}
