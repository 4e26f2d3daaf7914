//! Per-mode stationary solves of the frequency-domain system
//!
//! ```text
//! (omega^2 - nu d_zz) u - alpha v + i xi p  = f1
//! (omega^2 - nu d_zz) v + alpha u + i eta p = f2
//! d_z p = beta theta
//! (omega^2 - nu d_zz) theta + gamma w       = f3,   w = -int_0^z (i xi u + i eta v)
//! int_0^a (i xi u + i eta v) dz = 0
//! ```
//!
//! with `p = p0 + beta int_0^z theta`. Unknowns are ordered
//! `(u_1..u_K, v_1..v_K, theta_1..theta_K, p0)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, DenseLu};
use crate::params::{HorizontalMode, PhysicalParams, SobolevIndex, SpectralPoint};
use crate::profile::{sobolev_norm_zeta_sq, VerticalProfile};
use crate::vertical::{antiderivative_matrix, apply_real, const_vector, primitive_values};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Right-hand side `(f1, f2, f3)` of one horizontal mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeRHS {
    pub f1: VerticalProfile,
    pub f2: VerticalProfile,
    pub f3: VerticalProfile,
}

impl ModeRHS {
    pub fn new(f1: VerticalProfile, f2: VerticalProfile, f3: VerticalProfile) -> Result<Self> {
        let k = f1.order();
        for p in [&f2, &f3] {
            if p.order() != k {
                return Err(Error::LengthMismatch {
                    expected: k,
                    got: p.order(),
                });
            }
        }
        Ok(Self { f1, f2, f3 })
    }

    pub fn zeros(k: usize) -> Self {
        Self {
            f1: VerticalProfile::zeros(k),
            f2: VerticalProfile::zeros(k),
            f3: VerticalProfile::zeros(k),
        }
    }

    pub fn order(&self) -> usize {
        self.f1.order()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.f1.l2_norm().powi(2) + self.f2.l2_norm().powi(2) + self.f3.l2_norm().powi(2)).sqrt()
    }

    /// `||F||_{sigma, zeta}` over the three components.
    pub fn sobolev_norm(&self, sigma: SobolevIndex, zeta: HorizontalMode, params: &PhysicalParams) -> f64 {
        [&self.f1, &self.f2, &self.f3]
            .iter()
            .map(|p| sobolev_norm_zeta_sq(p, sigma, zeta, params))
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.f1.is_zero() && self.f2.is_zero() && self.f3.is_zero()
    }

    fn sub(&self, other: &Self) -> Self {
        Self {
            f1: &self.f1 - &other.f1,
            f2: &self.f2 - &other.f2,
            f3: &self.f3 - &other.f3,
        }
    }

    pub fn to_vector(&self) -> CVec {
        let k = self.order();
        let mut x = CVec::zeros(3 * k);
        for (block, p) in [&self.f1, &self.f2, &self.f3].iter().enumerate() {
            for (i, c) in p.coeffs().iter().enumerate() {
                x[block * k + i] = *c;
            }
        }
        x
    }

    /// Inverse of [`ModeRHS::to_vector`]; `x` must have length `3 K`.
    pub fn from_vector(x: &CVec) -> Result<Self> {
        if x.len() % 3 != 0 || x.is_empty() {
            return Err(Error::Invalid(format!("state vector length {} is not 3 K", x.len())));
        }
        let k = x.len() / 3;
        let block = |b: usize| VerticalProfile::from_fn(k, |j| x[b * k + j - 1]);
        Ok(Self {
            f1: block(0),
            f2: block(1),
            f3: block(2),
        })
    }
}

/// Horizontal velocity `(u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityPair {
    pub u: VerticalProfile,
    pub v: VerticalProfile,
}

/// Solution of one `(lambda, zeta)` problem with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub zeta: HorizontalMode,
    pub lambda: Complex64,
    pub u: VerticalProfile,
    pub v: VerticalProfile,
    pub theta: VerticalProfile,
    /// Trace constant of the pressure.
    pub p0: Complex64,
    /// Pressure-driven part of the velocity, `-i (xi, eta) p0 (omega^2 - nu d_zz)^{-1}[1]`.
    pub y1: VelocityPair,
    /// Forcing-driven part of the velocity.
    pub y2: VelocityPair,
    /// l2 norm of the forward residual including the constraint row.
    pub residual_norm: f64,
    /// `int_0^a (i xi u + i eta v) dz`.
    pub divergence: Complex64,
    /// Pivot growth of the dense factorisation, when one was used.
    pub pivot_ratio: Option<f64>,
    /// Fixed-point iterations, for the iterative solver.
    pub iterations: Option<usize>,
}

impl ModeSolution {
    pub fn order(&self) -> usize {
        self.u.order()
    }

    pub fn state_vector(&self) -> CVec {
        let k = self.order();
        let mut x = CVec::zeros(3 * k + 1);
        for (block, p) in [&self.u, &self.v, &self.theta].iter().enumerate() {
            for (i, c) in p.coeffs().iter().enumerate() {
                x[block * k + i] = *c;
            }
        }
        x[3 * k] = self.p0;
        x
    }

    /// `||(u, v, theta)||_{s, zeta}`.
    pub fn sobolev_norm(&self, s: f64, params: &PhysicalParams) -> f64 {
        [&self.u, &self.v, &self.theta]
            .iter()
            .map(|p| sobolev_norm_zeta_sq(p, SobolevIndex(s), self.zeta, params))
            .sum::<f64>()
            .sqrt()
    }
}

/// The operator of one spectral point at truncation `K`, holding the
/// constant expansion and antiderivative matrix.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    pub sp: SpectralPoint,
    pub params: PhysicalParams,
    k: usize,
    c: Vec<f64>,
    t: DMatrix<f64>,
    d: Vec<Complex64>,
}

impl ModeOperator {
    pub fn new(sp: SpectralPoint, params: &PhysicalParams, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyTruncation);
        }
        let d: Vec<Complex64> = (1..=k).map(|j| sp.heat_denominator(j, params)).collect();
        Ok(Self {
            sp,
            params: *params,
            k,
            c: const_vector(k, params),
            t: antiderivative_matrix(k, params),
            d,
        })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn const_vec(&self) -> &[f64] {
        &self.c
    }

    pub fn heat_denominators(&self) -> &[Complex64] {
        &self.d
    }

    pub fn antiderivative(&self) -> &DMatrix<f64> {
        &self.t
    }

    fn xi_eta(&self) -> (Complex64, Complex64) {
        (
            I * self.sp.zeta.xi as f64,
            I * self.sp.zeta.eta as f64,
        )
    }

    fn check_degenerate(&self) -> Result<()> {
        match self.d.iter().position(|d| *d == ZERO) {
            Some(i) => Err(Error::DegenerateDenominator { k: i + 1 }),
            None => Ok(()),
        }
    }

    fn diag(&self, x: &VerticalProfile) -> VerticalProfile {
        VerticalProfile::from_fn(self.k, |j| x.coeff(j) * self.d[j - 1])
    }

    fn diag_inv(&self, x: &VerticalProfile) -> VerticalProfile {
        VerticalProfile::from_fn(self.k, |j| x.coeff(j) / self.d[j - 1])
    }

    fn divergence_profile(&self, u: &VerticalProfile, v: &VerticalProfile) -> VerticalProfile {
        let (ixi, ieta) = self.xi_eta();
        VerticalProfile::from_fn(self.k, |j| ixi * u.coeff(j) + ieta * v.coeff(j))
    }

    fn depth_integral(&self, x: &VerticalProfile) -> Complex64 {
        x.coeffs().iter().zip(&self.c).map(|(x, c)| x * c).sum()
    }

    /// Uncoupled part `L0`: heat operator, pressure constant, constraint.
    pub fn apply_uncoupled(
        &self,
        u: &VerticalProfile,
        v: &VerticalProfile,
        theta: &VerticalProfile,
        p0: Complex64,
    ) -> (ModeRHS, Complex64) {
        let (ixi, ieta) = self.xi_eta();
        let f1 = VerticalProfile::from_fn(self.k, |j| self.d[j - 1] * u.coeff(j) + ixi * p0 * self.c[j - 1]);
        let f2 = VerticalProfile::from_fn(self.k, |j| self.d[j - 1] * v.coeff(j) + ieta * p0 * self.c[j - 1]);
        let f3 = self.diag(theta);
        let div = self.depth_integral(&self.divergence_profile(u, v));
        (ModeRHS { f1, f2, f3 }, div)
    }

    /// Coupling part `L1`: Coriolis, buoyancy pressure and vertical velocity.
    pub fn apply_perturbation(&self, u: &VerticalProfile, v: &VerticalProfile, theta: &VerticalProfile) -> ModeRHS {
        let (ixi, ieta) = self.xi_eta();
        let PhysicalParams { alpha, beta, gamma, .. } = self.params;
        let t_theta = apply_real(&self.t, theta);
        let t_div = apply_real(&self.t, &self.divergence_profile(u, v));
        let f1 = VerticalProfile::from_fn(self.k, |j| -alpha * v.coeff(j) + ixi * beta * t_theta.coeff(j));
        let f2 = VerticalProfile::from_fn(self.k, |j| alpha * u.coeff(j) + ieta * beta * t_theta.coeff(j));
        let f3 = VerticalProfile::from_fn(self.k, |j| -gamma * t_div.coeff(j));
        ModeRHS { f1, f2, f3 }
    }

    /// Full forward map `L0 + L1`, returning the momentum/temperature rows and
    /// the constraint value.
    pub fn apply(
        &self,
        u: &VerticalProfile,
        v: &VerticalProfile,
        theta: &VerticalProfile,
        p0: Complex64,
    ) -> (ModeRHS, Complex64) {
        let (l0, div) = self.apply_uncoupled(u, v, theta, p0);
        let l1 = self.apply_perturbation(u, v, theta);
        (
            ModeRHS {
                f1: &l0.f1 + &l1.f1,
                f2: &l0.f2 + &l1.f2,
                f3: &l0.f3 + &l1.f3,
            },
            div,
        )
    }

    /// Forward map applied to a stacked state vector of length `3K + 1`.
    pub fn apply_vector(&self, x: &CVec) -> CVec {
        let k = self.k;
        let block = |b: usize| VerticalProfile::new(x.rows(b * k, k).iter().cloned().collect()).expect("finite state");
        let (rhs, div) = self.apply(&block(0), &block(1), &block(2), x[3 * k]);
        let mut out = CVec::zeros(3 * k + 1);
        out.rows_mut(0, 3 * k).copy_from(&rhs.to_vector());
        out[3 * k] = div;
        out
    }

    fn finish(
        &self,
        f: &ModeRHS,
        u: VerticalProfile,
        v: VerticalProfile,
        theta: VerticalProfile,
        p0: Complex64,
        include_coupling: bool,
    ) -> ModeSolution {
        let (ixi, ieta) = self.xi_eta();
        let (image, divergence) = self.apply(&u, &v, &theta, p0);
        let r = image.sub(f);
        let residual_norm = (r.l2_norm().powi(2) + divergence.norm_sqr()).sqrt();
        // Split of the velocity from the uncoupled formulas applied to the
        // effective right-hand side F - L1 X.
        let effective = if include_coupling {
            f.sub(&self.apply_perturbation(&u, &v, &theta))
        } else {
            f.clone()
        };
        let heat_c = VerticalProfile::from_fn(self.k, |j| Complex64::new(self.c[j - 1], 0.0) / self.d[j - 1]);
        let y1 = VelocityPair {
            u: heat_c.scale(-ixi * p0),
            v: heat_c.scale(-ieta * p0),
        };
        let y2 = VelocityPair {
            u: self.diag_inv(&effective.f1),
            v: self.diag_inv(&effective.f2),
        };
        ModeSolution {
            zeta: self.sp.zeta,
            lambda: self.sp.lambda,
            u,
            v,
            theta,
            p0,
            y1,
            y2,
            residual_norm,
            divergence,
            pivot_ratio: None,
            iterations: None,
        }
    }

    /// Pressure constant of the uncoupled problem, chosen so the truncated
    /// depth-integrated divergence vanishes.
    pub fn pressure_constant_uncoupled(&self, f: &ModeRHS) -> Result<Complex64> {
        if self.sp.zeta.is_zero() {
            return Err(Error::ZeroMode);
        }
        self.check_degenerate()?;
        let (ixi, ieta) = self.xi_eta();
        let mut num = ZERO;
        let mut den = ZERO;
        for j in 0..self.k {
            let g = ixi * f.f1.coeffs()[j] + ieta * f.f2.coeffs()[j];
            num += self.c[j] * g / self.d[j];
            den += self.c[j] * self.c[j] / self.d[j];
        }
        Ok(-num / (den * self.sp.zeta.norm_sq()))
    }

    pub fn solve_uncoupled(&self, f: &ModeRHS) -> Result<ModeSolution> {
        self.check_order(f)?;
        let p0 = self.pressure_constant_uncoupled(f)?;
        let (ixi, ieta) = self.xi_eta();
        let u = VerticalProfile::from_fn(self.k, |j| (f.f1.coeff(j) - ixi * p0 * self.c[j - 1]) / self.d[j - 1]);
        let v = VerticalProfile::from_fn(self.k, |j| (f.f2.coeff(j) - ieta * p0 * self.c[j - 1]) / self.d[j - 1]);
        let theta = self.diag_inv(&f.f3);
        Ok(self.finish(f, u, v, theta, p0, false))
    }

    fn check_order(&self, f: &ModeRHS) -> Result<()> {
        if f.order() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                got: f.order(),
            });
        }
        Ok(())
    }

    /// Dense matrix of the full system, size `3K + 1`.
    pub fn assemble(&self) -> CMat {
        let k = self.k;
        let n = 3 * k + 1;
        let (ixi, ieta) = self.xi_eta();
        let PhysicalParams { alpha, beta, gamma, .. } = self.params;
        let mut m = CMat::zeros(n, n);
        for r in 0..k {
            m[(r, r)] = self.d[r];
            m[(k + r, k + r)] = self.d[r];
            m[(2 * k + r, 2 * k + r)] = self.d[r];
            m[(r, k + r)] = Complex64::new(-alpha, 0.0);
            m[(k + r, r)] = Complex64::new(alpha, 0.0);
            m[(r, 3 * k)] = ixi * self.c[r];
            m[(k + r, 3 * k)] = ieta * self.c[r];
            m[(3 * k, r)] = ixi * self.c[r];
            m[(3 * k, k + r)] = ieta * self.c[r];
            for l in 0..k {
                let t = self.t[(r, l)];
                m[(r, 2 * k + l)] = ixi * beta * t;
                m[(k + r, 2 * k + l)] = ieta * beta * t;
                m[(2 * k + r, l)] = -gamma * ixi * t;
                m[(2 * k + r, k + l)] = -gamma * ieta * t;
            }
        }
        m
    }

    fn split_state(&self, x: &CVec) -> (VerticalProfile, VerticalProfile, VerticalProfile, Complex64) {
        let k = self.k;
        let block = |b: usize| VerticalProfile::new(x.rows(b * k, k).iter().cloned().collect());
        (
            block(0).expect("finite solution"),
            block(1).expect("finite solution"),
            block(2).expect("finite solution"),
            x[3 * k],
        )
    }

    /// LU solve of the assembled `3K + 1` system.
    pub fn solve_assembled(&self, f: &ModeRHS) -> Result<ModeSolution> {
        self.check_order(f)?;
        if self.sp.zeta.is_zero() {
            return Err(Error::ZeroMode);
        }
        let mut rhs = CVec::zeros(3 * self.k + 1);
        rhs.rows_mut(0, 3 * self.k).copy_from(&f.to_vector());
        let lu = DenseLu::new(self.assemble())?;
        let x = lu.solve(&rhs)?;
        let (u, v, theta, p0) = self.split_state(&x);
        let mut sol = self.finish(f, u, v, theta, p0, true);
        sol.pivot_ratio = Some(lu.pivot_ratio);
        Ok(sol)
    }

    /// Direct solve by exact block elimination.
    ///
    /// With `delta = i xi u + i eta v` and `eps = i xi v - i eta u` the
    /// temperature and `eps` blocks are diagonal, leaving the bordered system
    /// `[D + alpha^2 D^-1 - |zeta|^2 beta gamma T D^-1 T] delta - |zeta|^2 c p0 = r`,
    /// `c^T delta = 0` of size `K + 1`, factorised by LU with partial pivoting.
    pub fn solve_direct(&self, f: &ModeRHS) -> Result<ModeSolution> {
        self.check_order(f)?;
        if self.sp.zeta.is_zero() {
            return Err(Error::ZeroMode);
        }
        self.check_degenerate()?;
        let k = self.k;
        let (ixi, ieta) = self.xi_eta();
        let z2 = self.sp.zeta.norm_sq();
        let PhysicalParams { alpha, beta, gamma, .. } = self.params;
        let dinv: Vec<Complex64> = self.d.iter().map(|d| 1.0 / d).collect();

        // T diag(1/d) T as real and imaginary parts.
        let scaled = |part: fn(&Complex64) -> f64| {
            let mut m = self.t.clone();
            for (col, di) in dinv.iter().enumerate() {
                let s = part(di);
                m.column_mut(col).scale_mut(s);
            }
            &m * &self.t
        };
        let tdt_re = scaled(|z| z.re);
        let tdt_im = scaled(|z| z.im);

        let n = k + 1;
        let mut m = CMat::zeros(n, n);
        let coupling = z2 * beta * gamma;
        for r in 0..k {
            for l in 0..k {
                m[(r, l)] = -coupling * Complex64::new(tdt_re[(r, l)], tdt_im[(r, l)]);
            }
            m[(r, r)] += self.d[r] + alpha * alpha * dinv[r];
            m[(r, k)] = Complex64::new(-z2 * self.c[r], 0.0);
            m[(k, r)] = Complex64::new(self.c[r], 0.0);
        }

        let g1 = VerticalProfile::from_fn(k, |j| ixi * f.f1.coeff(j) + ieta * f.f2.coeff(j));
        let g2 = VerticalProfile::from_fn(k, |j| ixi * f.f2.coeff(j) - ieta * f.f1.coeff(j));
        let t_f3 = apply_real(&self.t, &self.diag_inv(&f.f3));
        let mut rhs = CVec::zeros(n);
        for r in 0..k {
            rhs[r] = g1.coeffs()[r] + alpha * dinv[r] * g2.coeffs()[r] + z2 * beta * t_f3.coeffs()[r];
        }

        let lu = DenseLu::new(m)?;
        let x = lu.solve(&rhs)?;
        let delta = VerticalProfile::new(x.rows(0, k).iter().cloned().collect())?;
        let p0 = x[k];

        let t_delta = apply_real(&self.t, &delta);
        let theta = VerticalProfile::from_fn(k, |j| (f.f3.coeff(j) + gamma * t_delta.coeff(j)) * dinv[j - 1]);
        let eps = VerticalProfile::from_fn(k, |j| (g2.coeff(j) - alpha * delta.coeff(j)) * dinv[j - 1]);
        let (xi, eta) = (self.sp.zeta.xi as f64, self.sp.zeta.eta as f64);
        let u = VerticalProfile::from_fn(k, |j| -I * (xi * delta.coeff(j) - eta * eps.coeff(j)) / z2);
        let v = VerticalProfile::from_fn(k, |j| -I * (eta * delta.coeff(j) + xi * eps.coeff(j)) / z2);

        let mut sol = self.finish(f, u, v, theta, p0, true);
        sol.pivot_ratio = Some(lu.pivot_ratio);
        Ok(sol)
    }

    /// Fixed-point iteration `X <- L0^{-1}(F - L1 X)` from `X = 0`.
    pub fn solve_iterative(&self, f: &ModeRHS, max_iter: usize, tol: f64) -> Result<ModeSolution> {
        self.check_order(f)?;
        let mut current = self.solve_uncoupled(f)?;
        let mut update = f64::INFINITY;
        for it in 1..=max_iter {
            let l1 = self.apply_perturbation(&current.u, &current.v, &current.theta);
            let next = self.solve_uncoupled(&f.sub(&l1))?;
            let diff = (&next.state_vector() - &current.state_vector()).norm();
            let size = next.state_vector().norm();
            update = if size > 0.0 { diff / size } else { 0.0 };
            current = next;
            if !update.is_finite() {
                break;
            }
            if update < tol {
                let mut sol = self.finish(f, current.u, current.v, current.theta, current.p0, true);
                sol.iterations = Some(it);
                return Ok(sol);
            }
        }
        Err(Error::NotConverged {
            iterations: max_iter,
            update,
        })
    }

    /// Power-iteration estimate of the spectral radius of `L0^{-1} L1`, the
    /// contraction factor of [`ModeOperator::solve_iterative`].
    pub fn contraction_factor(&self, iterations: usize) -> Result<f64> {
        let k = self.k;
        let mut x = ModeRHS {
            f1: VerticalProfile::from_fn(k, |j| Complex64::new(1.0 / j as f64, 0.3)),
            f2: VerticalProfile::from_fn(k, |j| Complex64::new(0.5, 1.0 / j as f64)),
            f3: VerticalProfile::from_fn(k, |j| Complex64::new(1.0 / (j * j) as f64, -0.2)),
        };
        let mut rho = 0.0;
        for _ in 0..iterations {
            let before = x.l2_norm();
            let l1 = self.apply_perturbation(&x.f1, &x.f2, &x.f3);
            let y = self.solve_uncoupled(&l1)?;
            let next = ModeRHS {
                f1: y.u,
                f2: y.v,
                f3: y.theta,
            };
            let after = next.l2_norm();
            if after == 0.0 {
                return Ok(0.0);
            }
            rho = after / before;
            let s = Complex64::new(1.0 / after, 0.0);
            x = ModeRHS {
                f1: next.f1.scale(s),
                f2: next.f2.scale(s),
                f3: next.f3.scale(s),
            };
        }
        Ok(rho)
    }
}

/// Galerkin pressure constant of the uncoupled problem.
pub fn pressure_constant_uncoupled(f: &ModeRHS, sp: &SpectralPoint, params: &PhysicalParams) -> Result<Complex64> {
    ModeOperator::new(*sp, params, f.order())?.pressure_constant_uncoupled(f)
}

/// Pressure constant through the closed-form multiplier,
/// `-(1/a)(omega^2/|zeta|^2) N(chi)^{-1} int_0^a (omega^2 - nu d_zz)^{-1}[i xi f1 + i eta f2] dz`.
pub fn pressure_constant_closed_form(f: &ModeRHS, sp: &SpectralPoint, params: &PhysicalParams) -> Result<Complex64> {
    if sp.zeta.is_zero() {
        return Err(Error::ZeroMode);
    }
    let int_one = crate::vertical::inverse_integral_one(sp, params);
    Ok(-forced_depth_integral(f, sp, params)? / (sp.zeta.norm_sq() * int_one))
}

/// Pressure constant with the depth integral of the inverted constant taken
/// from its converged series instead of the closed form.
pub fn pressure_constant_series(f: &ModeRHS, sp: &SpectralPoint, params: &PhysicalParams) -> Result<Complex64> {
    if sp.zeta.is_zero() {
        return Err(Error::ZeroMode);
    }
    let int_one = crate::vertical::inverse_integral_one_converged(sp, params);
    Ok(-forced_depth_integral(f, sp, params)? / (sp.zeta.norm_sq() * int_one))
}

fn forced_depth_integral(f: &ModeRHS, sp: &SpectralPoint, params: &PhysicalParams) -> Result<Complex64> {
    let (ixi, ieta) = (I * sp.zeta.xi as f64, I * sp.zeta.eta as f64);
    let g = VerticalProfile::from_fn(f.order(), |j| ixi * f.f1.coeff(j) + ieta * f.f2.coeff(j));
    let h = crate::vertical::heat_invert(&g, sp, params)?;
    Ok(crate::vertical::integral_over_depth(&h, params))
}

pub fn solve_uncoupled(f: &ModeRHS, sp: &SpectralPoint, params: &PhysicalParams) -> Result<ModeSolution> {
    ModeOperator::new(*sp, params, f.order())?.solve_uncoupled(f)
}

pub fn assemble_coupled_matrix(sp: &SpectralPoint, params: &PhysicalParams, k: usize) -> Result<CMat> {
    if sp.zeta.is_zero() {
        return Err(Error::ZeroMode);
    }
    Ok(ModeOperator::new(*sp, params, k)?.assemble())
}

pub fn solve_coupled_direct(f: &ModeRHS, sp: &SpectralPoint, params: &PhysicalParams) -> Result<ModeSolution> {
    ModeOperator::new(*sp, params, f.order())?.solve_direct(f)
}

pub fn solve_coupled_assembled(f: &ModeRHS, sp: &SpectralPoint, params: &PhysicalParams) -> Result<ModeSolution> {
    ModeOperator::new(*sp, params, f.order())?.solve_assembled(f)
}

pub fn solve_coupled_iterative(
    f: &ModeRHS,
    sp: &SpectralPoint,
    params: &PhysicalParams,
    max_iter: usize,
    tol: f64,
) -> Result<ModeSolution> {
    ModeOperator::new(*sp, params, f.order())?.solve_iterative(f, max_iter, tol)
}

/// Zero horizontal mode: per-`k` Coriolis-coupled heat solves, no pressure
/// constant and no vertical velocity.
pub fn zeta_zero_solve(f: &ModeRHS, lambda: Complex64, params: &PhysicalParams) -> Result<ModeSolution> {
    let k = f.order();
    let alpha = params.alpha;
    let mut u = Vec::with_capacity(k);
    let mut v = Vec::with_capacity(k);
    let mut theta = Vec::with_capacity(k);
    for j in 1..=k {
        let d = lambda + params.heat_gap() * (j * j) as f64;
        let det = d * d + alpha * alpha;
        if det == ZERO || d == ZERO {
            return Err(Error::DegenerateDenominator { k: j });
        }
        let (f1, f2) = (f.f1.coeff(j), f.f2.coeff(j));
        u.push((d * f1 + alpha * f2) / det);
        v.push((d * f2 - alpha * f1) / det);
        theta.push(f.f3.coeff(j) / d);
    }
    let (u, v, theta) = (VerticalProfile::new(u)?, VerticalProfile::new(v)?, VerticalProfile::new(theta)?);
    let mut residual = 0.0;
    for j in 1..=k {
        let d = lambda + params.heat_gap() * (j * j) as f64;
        residual += (d * u.coeff(j) - alpha * v.coeff(j) - f.f1.coeff(j)).norm_sqr();
        residual += (d * v.coeff(j) + alpha * u.coeff(j) - f.f2.coeff(j)).norm_sqr();
        residual += (d * theta.coeff(j) - f.f3.coeff(j)).norm_sqr();
    }
    Ok(ModeSolution {
        zeta: HorizontalMode::ZERO,
        lambda,
        y1: VelocityPair {
            u: VerticalProfile::zeros(k),
            v: VerticalProfile::zeros(k),
        },
        y2: VelocityPair { u: u.clone(), v: v.clone() },
        u,
        v,
        theta,
        p0: ZERO,
        residual_norm: residual.sqrt(),
        divergence: ZERO,
        pivot_ratio: None,
        iterations: None,
    })
}

/// Direct solve of any mode: the zero mode by [`zeta_zero_solve`], others by
/// [`solve_coupled_direct`].
pub fn solve_mode(f: &ModeRHS, sp: &SpectralPoint, params: &PhysicalParams) -> Result<ModeSolution> {
    if sp.zeta.is_zero() {
        zeta_zero_solve(f, sp.lambda, params)
    } else {
        solve_coupled_direct(f, sp, params)
    }
}

/// Pressure `p(z) = p0 + beta int_0^z theta` of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureProfile {
    pub p0: Complex64,
    pub beta: f64,
    /// Temperature profile the hydrostatic part integrates.
    pub theta: VerticalProfile,
    /// Sine coefficients of `beta int_0^z theta`.
    pub hydrostatic: VerticalProfile,
}

impl PressureProfile {
    /// Pointwise pressure, using the exact primitive of the band-limited
    /// temperature.
    pub fn evaluate(&self, zgrid: &[f64], params: &PhysicalParams) -> Vec<Complex64> {
        primitive_values(&self.theta, zgrid, params)
            .into_iter()
            .map(|p| self.p0 + self.beta * p)
            .collect()
    }
}

pub fn reconstruct_pressure_profile(sol: &ModeSolution, params: &PhysicalParams) -> PressureProfile {
    let t = antiderivative_matrix(sol.order(), params);
    PressureProfile {
        p0: sol.p0,
        beta: params.beta,
        theta: sol.theta.clone(),
        hydrostatic: apply_real(&t, &sol.theta).scale(Complex64::new(params.beta, 0.0)),
    }
}
