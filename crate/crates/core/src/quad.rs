//! Quadrature and series-tail helpers: Gauss-Legendre rules, truncated Taylor
//! jets for derivatives, and Euler-Maclaurin tails of slowly decaying sums.

use std::ops::{Add, Mul};
use std::sync::OnceLock;

use num_complex::Complex64;

const ORDER: usize = 7;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Truncated Taylor expansion `sum_n c_n h^n` around a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [Complex64; ORDER]);

impl Jet {
    pub fn constant(c: Complex64) -> Self {
        let mut j = [Complex64::new(0.0, 0.0); ORDER];
        j[0] = c;
        Jet(j)
    }

    pub fn var(x: f64) -> Self {
        let mut j = Self::constant(Complex64::new(x, 0.0));
        j.0[1] = Complex64::new(1.0, 0.0);
        j
    }

    pub fn recip(&self) -> Self {
        let a = &self.0;
        let mut b = [Complex64::new(0.0, 0.0); ORDER];
        b[0] = 1.0 / a[0];
        for n in 1..ORDER {
            let s: Complex64 = (1..=n).map(|j| a[j] * b[n - j]).sum();
            b[n] = -s * b[0];
        }
        Jet(b)
    }

    /// `self^p` for a series with nonzero constant term.
    pub fn powf(&self, p: f64) -> Self {
        let a = &self.0;
        let mut b = [Complex64::new(0.0, 0.0); ORDER];
        b[0] = a[0].powf(p);
        for n in 1..ORDER {
            let s: Complex64 = (1..=n)
                .map(|j| a[j] * b[n - j] * ((p + 1.0) * j as f64 - n as f64))
                .sum();
            b[n] = s / (a[0] * n as f64);
        }
        Jet(b)
    }

    /// `n`-th derivative at the expansion point.
    pub fn derivative(&self, n: usize) -> Complex64 {
        let fact: f64 = (1..=n).map(|i| i as f64).product();
        self.0[n] * fact
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Jet(out)
    }
}

impl Add<Complex64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Complex64) -> Jet {
        self.0[0] += rhs;
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = [Complex64::new(0.0, 0.0); ORDER];
        for (n, o) in out.iter_mut().enumerate() {
            *o = (0..=n).map(|j| self.0[j] * rhs.0[n - j]).sum();
        }
        Jet(out)
    }
}

impl Mul<Complex64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: Complex64) -> Jet {
        for o in self.0.iter_mut() {
            *o *= rhs;
        }
        self
    }
}

/// Power-law behaviour `coeff x^exponent` of a summand for large `x`;
/// requires `exponent < -1`.
#[derive(Debug, Clone, Copy)]
pub struct PowerTail {
    pub exponent: f64,
    pub coeff: Complex64,
}

/// `int_a^inf f(x) dx` for a smooth `f` decaying like the given power law.
///
/// Gauss-Legendre on unit panels of `u = ln(x/a)` up to `x = a e^40`, then
/// the power law in closed form.
pub fn integral_to_infinity(a: f64, f: impl Fn(f64) -> Complex64, tail: PowerTail) -> Complex64 {
    const PANELS: usize = 40;
    let (nodes, weights) = gl16();
    let mut acc = Complex64::new(0.0, 0.0);
    for panel in 0..PANELS {
        let mid = panel as f64 + 0.5;
        for (t, w) in nodes.iter().zip(weights) {
            let x = a * (mid + 0.5 * t).exp();
            acc += f(x) * (x * 0.5 * w);
        }
    }
    let x_end = a * (PANELS as f64).exp();
    acc + tail.coeff * x_end.powf(tail.exponent + 1.0) / (-(tail.exponent + 1.0))
}

/// `sum_{j >= 0} f(a + j h)` by Euler-Maclaurin with derivative corrections
/// up to the fifth order; `fj` evaluates the same summand on jets.
pub fn euler_maclaurin_tail(
    a: f64,
    h: f64,
    f: impl Fn(f64) -> Complex64,
    fj: impl Fn(Jet) -> Jet,
    tail: PowerTail,
) -> Complex64 {
    let jet = fj(Jet::var(a));
    let integral = integral_to_infinity(a, &f, tail);
    integral / h + jet.derivative(0) * 0.5 - jet.derivative(1) * (h / 12.0)
        + jet.derivative(3) * (h.powi(3) / 720.0)
        - jet.derivative(5) * (h.powi(5) / 30240.0)
}
