//! Physical constants, horizontal modes, spectral points and Sobolev indices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Constants of the linear model: depth `a`, viscosity `nu`, Coriolis
/// parameter `alpha`, buoyancy `beta` and temperature coupling `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub a: f64,
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl PhysicalParams {
    pub fn new(a: f64, nu: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = Self {
            a,
            nu,
            alpha,
            beta,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("a", self.a), ("nu", self.nu), ("beta", self.beta), ("gamma", self.gamma)];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParam {
                    name,
                    value,
                    reason: "must be finite and > 0",
                });
            }
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidParam {
                name: "alpha",
                value: self.alpha,
                reason: "must be finite and >= 0",
            });
        }
        Ok(())
    }

    /// Same constants with the couplings switched off.
    pub fn uncoupled(&self) -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
            ..*self
        }
    }

    /// Lowest Dirichlet eigenvalue of `-nu d_zz` on `(0, a)`.
    pub fn heat_gap(&self) -> f64 {
        self.nu * std::f64::consts::PI.powi(2) / (self.a * self.a)
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            nu: 0.1,
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
        }
    }
}

/// Horizontal wave vector `zeta = (xi, eta)` on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HorizontalMode {
    pub xi: i64,
    pub eta: i64,
}

impl HorizontalMode {
    pub const ZERO: Self = Self { xi: 0, eta: 0 };

    pub fn new(xi: i64, eta: i64) -> Self {
        Self { xi, eta }
    }

    pub fn norm_sq(&self) -> f64 {
        (self.xi * self.xi + self.eta * self.eta) as f64
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.xi == 0 && self.eta == 0
    }

    /// `<zeta> = 1 + |zeta|`.
    pub fn bracket(&self) -> f64 {
        1.0 + self.norm()
    }
}

/// A frequency `lambda` paired with a horizontal mode, with the derived
/// quantities every solver needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    pub zeta: HorizontalMode,
    pub omega_sq: Complex64,
    /// Principal root of `omega_sq`, `Re omega > 0`.
    pub omega: Complex64,
    pub bracket_zeta: f64,
    /// `<omega>^2 = |lambda| + <zeta>^2`.
    pub bracket_omega_sq: f64,
}

impl SpectralPoint {
    pub fn bracket_omega(&self) -> f64 {
        self.bracket_omega_sq.sqrt()
    }

    /// `chi = omega a / sqrt(nu)`, the argument of the closed-form multiplier.
    pub fn chi(&self, params: &PhysicalParams) -> Complex64 {
        self.omega * (params.a / params.nu.sqrt())
    }

    /// Denominator `omega^2 + nu k^2 pi^2 / a^2` of the heat inversion.
    pub fn heat_denominator(&self, k: usize, params: &PhysicalParams) -> Complex64 {
        let kk = k as f64;
        self.omega_sq + params.heat_gap() * kk * kk
    }
}

/// Build the spectral point for `(lambda, zeta)`.
pub fn make_spectral_point(
    lambda: Complex64,
    zeta: HorizontalMode,
    params: &PhysicalParams,
) -> Result<SpectralPoint> {
    let omega_sq = lambda + params.nu * zeta.norm_sq();
    if omega_sq == Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateFrequency);
    }
    let mut omega = omega_sq.sqrt();
    if omega.re < 0.0 {
        omega = -omega;
    }
    let bracket_zeta = zeta.bracket();
    Ok(SpectralPoint {
        lambda,
        zeta,
        omega_sq,
        omega,
        bracket_zeta,
        bracket_omega_sq: lambda.norm() + bracket_zeta * bracket_zeta,
    })
}

/// Sobolev regularity index.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SobolevIndex(pub f64);

impl SobolevIndex {
    /// Any real index; used for norms.
    pub fn new(sigma: f64) -> Self {
        Self(sigma)
    }

    /// Index admissible for the solver entry points: `sigma` in `(-3/2, 1/2)`,
    /// `sigma != -1/2`.
    pub fn admissible(sigma: f64) -> Result<Self> {
        if sigma == -0.5 {
            return Err(Error::CriticalExponent);
        }
        if !(sigma > -1.5 && sigma < 0.5) {
            return Err(Error::SigmaOutOfRange(sigma));
        }
        Ok(Self(sigma))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Critical exponent `kappa = (2 sigma + 1) / (2 sigma)`.
    pub fn kappa(&self) -> f64 {
        (2.0 * self.0 + 1.0) / (2.0 * self.0)
    }
}
