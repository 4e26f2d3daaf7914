//! One-dimensional operations in the sine basis: heat inversion, the
//! expansion of the constant function, the antiderivative operator, depth
//! integrals and the closed-form multiplier `N`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{PhysicalParams, SpectralPoint};
use crate::profile::VerticalProfile;
use crate::quad::{euler_maclaurin_tail, PowerTail};

/// `c_k = int_0^a e_k dz`; zero for even `k`.
pub fn const_coefficient(k: usize, params: &PhysicalParams) -> f64 {
    if k % 2 == 0 {
        0.0
    } else {
        (2.0 / params.a).sqrt() * 2.0 * params.a / (k as f64 * PI)
    }
}

/// Sine expansion of the constant function 1, truncated at `k`.
pub fn const_expansion(k: usize, params: &PhysicalParams) -> VerticalProfile {
    VerticalProfile::from_fn(k, |j| Complex64::new(const_coefficient(j, params), 0.0))
}

/// Real vector of the constant-expansion coefficients.
pub fn const_vector(k: usize, params: &PhysicalParams) -> Vec<f64> {
    (1..=k).map(|j| const_coefficient(j, params)).collect()
}

/// `g_k = f_k / (omega^2 + nu k^2 pi^2 / a^2)`.
pub fn heat_invert(f: &VerticalProfile, sp: &SpectralPoint, params: &PhysicalParams) -> Result<VerticalProfile> {
    let mut out = Vec::with_capacity(f.order());
    for (i, fk) in f.coeffs().iter().enumerate() {
        let d = sp.heat_denominator(i + 1, params);
        if d == Complex64::new(0.0, 0.0) {
            return Err(Error::DegenerateDenominator { k: i + 1 });
        }
        out.push(fk / d);
    }
    VerticalProfile::new(out)
}

/// Forward diagonal map `g -> (omega^2 - nu d_zz) g`.
pub fn heat_apply(g: &VerticalProfile, sp: &SpectralPoint, params: &PhysicalParams) -> VerticalProfile {
    VerticalProfile::from_fn(g.order(), |k| g.coeff(k) * sp.heat_denominator(k, params))
}

/// `int_0^a phi dz = sum_k c_k phi_k`.
pub fn integral_over_depth(phi: &VerticalProfile, params: &PhysicalParams) -> Complex64 {
    phi.coeffs()
        .iter()
        .enumerate()
        .map(|(i, p)| p * const_coefficient(i + 1, params))
        .sum()
}

/// Matrix `T` with `(T phi)_k` the sine coefficients of `z -> int_0^z phi`.
///
/// `T_kl = 2a/(l pi^2) [ (1-(-1)^k)/k - (1-(-1)^(k+l)) k/(k^2-l^2) ]`, where
/// the second bracket term is absent on the diagonal. `T + T^t = c c^t`.
pub fn antiderivative_matrix(k_max: usize, params: &PhysicalParams) -> DMatrix<f64> {
    let a = params.a;
    DMatrix::from_fn(k_max, k_max, |row, col| {
        let k = (row + 1) as i64;
        let l = (col + 1) as i64;
        let kf = k as f64;
        let lf = l as f64;
        let mut t = if k % 2 == 1 { 2.0 / kf } else { 0.0 };
        if l != k && (k + l) % 2 == 1 {
            t -= 2.0 * kf / (kf * kf - lf * lf);
        }
        2.0 * a / (lf * PI * PI) * t
    })
}

/// Sine coefficients of the primitive `int_0^z phi`.
pub fn antiderivative_modal(phi: &VerticalProfile, params: &PhysicalParams) -> VerticalProfile {
    let t = antiderivative_matrix(phi.order(), params);
    apply_real(&t, phi)
}

pub(crate) fn apply_real(m: &DMatrix<f64>, x: &VerticalProfile) -> VerticalProfile {
    let n = x.order();
    let mut out = vec![Complex64::new(0.0, 0.0); m.nrows()];
    for (col, xc) in x.coeffs().iter().enumerate().take(n) {
        if *xc == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (row, o) in out.iter_mut().enumerate() {
            *o += xc * m[(row, col)];
        }
    }
    VerticalProfile::new(out).expect("finite product")
}

/// Pointwise values of the exact primitive `int_0^z phi` of a band-limited
/// profile. Unlike the sine series of the primitive this has no Gibbs
/// oscillation at `z = a`.
pub fn primitive_values(phi: &VerticalProfile, zgrid: &[f64], params: &PhysicalParams) -> Vec<Complex64> {
    let a = params.a;
    let norm = (2.0 / a).sqrt();
    zgrid
        .iter()
        .map(|&z| {
            phi.coeffs()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let l = (i + 1) as f64;
                    p * (norm * a / (l * PI) * (1.0 - (l * PI * z / a).cos()))
                })
                .sum()
        })
        .collect()
}

/// Sector `B = {Re chi >= 0, |Im chi| <= (1 + delta5) Re chi, |chi| >= delta4}`
/// on which the multiplier `N` is analysed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeB {
    pub delta4: f64,
    pub delta5: f64,
}

impl Default for ConeB {
    fn default() -> Self {
        Self {
            delta4: 1e-8,
            delta5: 0.1,
        }
    }
}

impl ConeB {
    pub fn contains(&self, chi: Complex64) -> bool {
        chi.re >= 0.0 && chi.im.abs() <= (1.0 + self.delta5) * chi.re && chi.norm() >= self.delta4
    }
}

/// Value of `N` at `chi` together with the sector membership flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NMultiplier {
    pub chi: Complex64,
    pub value: Complex64,
    pub in_cone: bool,
}

impl NMultiplier {
    pub fn new(chi: Complex64, cone: &ConeB) -> Self {
        Self {
            chi,
            value: cal_n(chi),
            in_cone: cone.contains(chi),
        }
    }

    /// Like [`NMultiplier::new`], rejecting arguments outside the sector.
    pub fn checked(chi: Complex64, cone: &ConeB) -> Result<Self> {
        let n = Self::new(chi, cone);
        if n.in_cone {
            Ok(n)
        } else {
            Err(Error::Invalid(format!("chi = {chi} lies outside the sector B")))
        }
    }
}

fn tanh_stable(x: Complex64) -> Complex64 {
    if x.re < 0.0 {
        return -tanh_stable(-x);
    }
    let e = (-2.0 * x).exp();
    (1.0 - e) / (1.0 + e)
}

/// `N(chi) = 1 + 2 (1 - cosh chi) / (chi sinh chi) = 1 - 2 tanh(chi/2) / chi`.
pub fn cal_n(chi: Complex64) -> Complex64 {
    let x = chi * 0.5;
    if chi.norm() < 0.1 {
        // 1 - tanh(x)/x
        let x2 = x * x;
        let c = [
            1.0 / 3.0,
            -2.0 / 15.0,
            17.0 / 315.0,
            -62.0 / 2835.0,
            1382.0 / 155925.0,
            -21844.0 / 6081075.0,
        ];
        let mut acc = Complex64::new(0.0, 0.0);
        for coef in c.iter().rev() {
            acc = acc * x2 + coef;
        }
        return acc * x2;
    }
    1.0 - 2.0 * tanh_stable(x) / chi
}

/// `int_0^a (omega^2 - nu d_zz)^{-1}[1] dz = (a / omega^2) N(omega a / sqrt(nu))`.
pub fn inverse_integral_one(sp: &SpectralPoint, params: &PhysicalParams) -> Complex64 {
    params.a / sp.omega_sq * cal_n(sp.chi(params))
}

/// Truncated series `sum_{k<=K} c_k^2 / (omega^2 + nu k^2 pi^2 / a^2)` of the
/// same depth integral.
pub fn inverse_integral_one_series(sp: &SpectralPoint, k_max: usize, params: &PhysicalParams) -> Complex64 {
    (1..=k_max)
        .step_by(2)
        .map(|k| {
            let c = const_coefficient(k, params);
            c * c / sp.heat_denominator(k, params)
        })
        .sum()
}

/// The same series summed to convergence: odd `k <= 63` directly, the rest by
/// an Euler-Maclaurin tail.
pub fn inverse_integral_one_converged(sp: &SpectralPoint, params: &PhysicalParams) -> Complex64 {
    let head = inverse_integral_one_series(sp, 63, params);
    let scale = 8.0 * params.a / (PI * PI);
    let gap = params.heat_gap();
    let om2 = sp.omega_sq;
    let tail = euler_maclaurin_tail(
        65.0,
        2.0,
        |x| scale / (x * x * (om2 + gap * x * x)),
        |x| ((x * x) * ((x * x) * Complex64::new(gap, 0.0) + om2)).recip() * Complex64::new(scale, 0.0),
        PowerTail {
            exponent: -4.0,
            coeff: Complex64::new(scale / gap, 0.0),
        },
    );
    head + tail
}
