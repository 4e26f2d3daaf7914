//! Seeded random forcings.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::params::{HorizontalMode, PhysicalParams, SobolevIndex};
use crate::profile::{norm_weight, VerticalProfile};
use crate::solver::ModeRHS;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Profile with independent complex normal coefficients.
pub fn white_profile<R: Rng + ?Sized>(rng: &mut R, k: usize) -> VerticalProfile {
    VerticalProfile::from_fn(k, |_| complex_normal(rng))
}

/// Forcing that is white in `H^sigma_zeta` coordinates, scaled to unit
/// `||F||_{sigma, zeta}`.
pub fn unit_forcing<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    sigma: SobolevIndex,
    zeta: HorizontalMode,
    params: &PhysicalParams,
) -> ModeRHS {
    let mut draw = || VerticalProfile::from_fn(k, |j| complex_normal(rng) * norm_weight(j, -sigma.value() / 2.0, zeta, params));
    let f = ModeRHS {
        f1: draw(),
        f2: draw(),
        f3: draw(),
    };
    let n = f.sobolev_norm(sigma, zeta, params);
    let s = Complex64::new(1.0 / n, 0.0);
    ModeRHS {
        f1: f.f1.scale(s),
        f2: f.f2.scale(s),
        f3: f.f3.scale(s),
    }
}

/// Forcing with l2-unit white coefficients.
pub fn white_forcing<R: Rng + ?Sized>(rng: &mut R, k: usize) -> ModeRHS {
    ModeRHS {
        f1: white_profile(rng, k),
        f2: white_profile(rng, k),
        f3: white_profile(rng, k),
    }
}
