//! Sine-basis vertical profiles, horizontal modal fields and their weighted
//! Sobolev norms.
//!
//! A profile holds coefficients against `e_k(z) = sqrt(2/a) sin(k pi z / a)`,
//! `k = 1..=K`, stored at index `k - 1`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{HorizontalMode, PhysicalParams, SobolevIndex};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct VerticalProfile {
    coeffs: Vec<Complex64>,
}

impl VerticalProfile {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyTruncation);
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Invalid("profile coefficients must be finite".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(k: usize) -> Self {
        assert!(k >= 1, "truncation order must be at least 1");
        Self { coeffs: vec![ZERO; k] }
    }

    /// The basis function `e_mode` truncated at order `k`.
    pub fn basis(mode: usize, k: usize) -> Self {
        assert!((1..=k).contains(&mode), "mode {mode} outside 1..={k}");
        let mut p = Self::zeros(k);
        p.coeffs[mode - 1] = Complex64::new(1.0, 0.0);
        p
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Build from `f(k)` for `k = 1..=K`.
    pub fn from_fn(k: usize, mut f: impl FnMut(usize) -> Complex64) -> Self {
        assert!(k >= 1, "truncation order must be at least 1");
        Self {
            coeffs: (1..=k).map(&mut f).collect(),
        }
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `e_k`, `k` one-based.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs[k - 1]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Unweighted l2 norm of the coefficients (the L2(0,a) norm).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.order(), other.order());
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Copy truncated or zero-padded to order `k`.
    pub fn resized(&self, k: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(k, ZERO);
        Self { coeffs }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.order(), rhs.order(), "profile orders differ");
        Self {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

impl Add for &VerticalProfile {
    type Output = VerticalProfile;
    fn add(self, rhs: Self) -> VerticalProfile {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &VerticalProfile {
    type Output = VerticalProfile;
    fn sub(self, rhs: Self) -> VerticalProfile {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &VerticalProfile {
    type Output = VerticalProfile;
    fn neg(self) -> VerticalProfile {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &VerticalProfile {
    type Output = VerticalProfile;
    fn mul(self, rhs: Complex64) -> VerticalProfile {
        self.scale(rhs)
    }
}

/// Norm weight `(1 + nu k^2 + nu |zeta|^2)^s`.
pub fn norm_weight(k: usize, s: f64, zeta: HorizontalMode, params: &PhysicalParams) -> f64 {
    let kk = k as f64;
    (1.0 + params.nu * kk * kk + params.nu * zeta.norm_sq()).powf(s)
}

/// `||f||_{sigma, zeta}`.
pub fn sobolev_norm_zeta(
    p: &VerticalProfile,
    sigma: SobolevIndex,
    zeta: HorizontalMode,
    params: &PhysicalParams,
) -> f64 {
    sobolev_norm_zeta_sq(p, sigma, zeta, params).sqrt()
}

/// `||f||_{sigma, zeta}^2`.
pub fn sobolev_norm_zeta_sq(
    p: &VerticalProfile,
    sigma: SobolevIndex,
    zeta: HorizontalMode,
    params: &PhysicalParams,
) -> f64 {
    p.coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| norm_weight(i + 1, sigma.value(), zeta, params) * c.norm_sqr())
        .sum()
}

/// Map from horizontal modes to vertical profiles sharing one truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalField {
    z_max: i64,
    k: usize,
    entries: BTreeMap<HorizontalMode, VerticalProfile>,
}

impl ModalField {
    pub fn new(z_max: i64, k: usize) -> Self {
        assert!(k >= 1, "truncation order must be at least 1");
        assert!(z_max >= 0, "horizontal truncation must be non-negative");
        Self {
            z_max,
            k,
            entries: BTreeMap::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn z_max(&self) -> i64 {
        self.z_max
    }

    pub fn insert(&mut self, zeta: HorizontalMode, profile: VerticalProfile) -> Result<()> {
        if profile.order() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                got: profile.order(),
            });
        }
        if zeta.xi.abs() > self.z_max || zeta.eta.abs() > self.z_max {
            return Err(Error::Invalid(format!(
                "mode ({}, {}) outside horizontal truncation {}",
                zeta.xi, zeta.eta, self.z_max
            )));
        }
        self.entries.insert(zeta, profile);
        Ok(())
    }

    pub fn get(&self, zeta: &HorizontalMode) -> Option<&VerticalProfile> {
        self.entries.get(zeta)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HorizontalMode, &VerticalProfile)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `||f||_{H^sigma}`, the l2 sum of the per-mode norms.
pub fn sobolev_norm_full(f: &ModalField, sigma: SobolevIndex, params: &PhysicalParams) -> f64 {
    f.iter()
        .map(|(zeta, p)| sobolev_norm_zeta_sq(p, sigma, *zeta, params))
        .sum::<f64>()
        .sqrt()
}

/// Interior points `z_j = j a / (n + 1)`, `j = 1..=n`.
pub fn interior_grid(n: usize, params: &PhysicalParams) -> Vec<f64> {
    let h = params.a / (n as f64 + 1.0);
    (1..=n).map(|j| j as f64 * h).collect()
}

/// Evaluate `sum_k p_k e_k(z)` at each `z`.
pub fn synthesize_profile(p: &VerticalProfile, zgrid: &[f64], params: &PhysicalParams) -> Vec<Complex64> {
    let norm = (2.0 / params.a).sqrt();
    zgrid
        .iter()
        .map(|&z| {
            let theta = PI * z / params.a;
            let two_cos = 2.0 * theta.cos();
            // sin(k theta) by the three-term recurrence.
            let (mut s_prev, mut s) = (0.0, theta.sin());
            let mut acc = ZERO;
            for c in p.coeffs() {
                acc += c * s;
                let next = two_cos * s - s_prev;
                s_prev = s;
                s = next;
            }
            acc * norm
        })
        .collect()
}

/// Sine coefficients of samples taken on [`interior_grid`]; the discrete sine
/// quadrature is exact for modes below the grid size.
pub fn analyze_profile(samples: &[Complex64], k: usize, params: &PhysicalParams) -> Result<VerticalProfile> {
    if k == 0 {
        return Err(Error::EmptyTruncation);
    }
    let n = samples.len();
    let needed = 2 * k + 1;
    if n < needed {
        return Err(Error::GridTooCoarse { points: n, k, needed });
    }
    let h = params.a / (n as f64 + 1.0);
    let scale = h * (2.0 / params.a).sqrt();
    let mut coeffs = vec![ZERO; k];
    for (j, f) in samples.iter().enumerate() {
        let theta = PI * (j + 1) as f64 / (n as f64 + 1.0);
        let two_cos = 2.0 * theta.cos();
        let (mut s_prev, mut s) = (0.0, theta.sin());
        for c in coeffs.iter_mut() {
            *c += f * s;
            let next = two_cos * s - s_prev;
            s_prev = s;
            s = next;
        }
    }
    for c in coeffs.iter_mut() {
        *c *= scale;
    }
    VerticalProfile::new(coeffs)
}
