//! Dense complex linear algebra used by the mode solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Orthonormal basis (as columns) of the orthogonal complement of `b`,
/// taken from a Householder reflector mapping `b` to a multiple of `e_1`.
pub fn null_basis(b: &CVec) -> CMat {
    let n = b.len();
    let nb = b.norm();
    assert!(nb > 0.0, "null basis of the zero vector");
    let phase = if b[0].norm() > 0.0 { b[0] / b[0].norm() } else { Complex64::new(1.0, 0.0) };
    let mut v = b.clone();
    v[0] += phase * nb;
    let vv = v.norm_squared();
    // Columns 1..n of I - 2 v v^H / (v^H v).
    CMat::from_fn(n, n - 1, |i, j| {
        let col = j + 1;
        let id = if i == col { Complex64::new(1.0, 0.0) } else { ZERO };
        id - v[i] * v[col].conj() * (2.0 / vv)
    })
}

/// LU factorisation with partial pivoting and a pivot-growth diagnostic.
pub struct DenseLu {
    lu: nalgebra::linalg::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    /// `max |U_ii| / min |U_ii|`, a cheap conditioning indicator.
    pub pivot_ratio: f64,
}

impl DenseLu {
    pub fn new(m: CMat) -> Result<Self> {
        let lu = m.lu();
        let u = lu.u();
        let diag: Vec<f64> = u.diagonal().iter().map(|d| d.norm()).collect();
        let max = diag.iter().cloned().fold(0.0, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if min.is_nan() || min <= 0.0 || !min.is_finite() || min <= max * 1e-300 {
            return Err(Error::Singular);
        }
        Ok(Self {
            lu,
            pivot_ratio: max / min,
        })
    }

    pub fn solve(&self, rhs: &CVec) -> Result<CVec> {
        self.lu.solve(rhs).ok_or(Error::Singular)
    }
}

/// Solve `(shift I + H) z = r` for upper Hessenberg `H` by Gaussian
/// elimination with adjacent-row pivoting.
pub fn hessenberg_shift_solve(h: &CMat, shift: Complex64, r: &CVec) -> Result<CVec> {
    let n = h.nrows();
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] += shift;
    }
    let mut z = r.clone();
    for j in 0..n.saturating_sub(1) {
        if a[(j + 1, j)].norm() > a[(j, j)].norm() {
            a.swap_rows(j, j + 1);
            z.swap_rows(j, j + 1);
        }
        let piv = a[(j, j)];
        if piv == ZERO {
            return Err(Error::Singular);
        }
        let l = a[(j + 1, j)] / piv;
        if l != ZERO {
            for c in j..n {
                let t = a[(j, c)];
                a[(j + 1, c)] -= l * t;
            }
            let t = z[j];
            z[j + 1] -= l * t;
        }
    }
    for i in (0..n).rev() {
        let mut s = z[i];
        for c in i + 1..n {
            s -= a[(i, c)] * z[c];
        }
        let d = a[(i, i)];
        if d == ZERO {
            return Err(Error::Singular);
        }
        z[i] = s / d;
    }
    Ok(z)
}

/// Repeated solves of the bordered system
/// `(lambda I + B) x + b p = f`, `b^T x = 0` for many shifts `lambda`,
/// assuming `conj(b)` is parallel to `b`.
///
/// The constraint is eliminated with an orthonormal basis `Q` of `b^perp`
/// and `Q^H B Q` is reduced to Hessenberg form once, so each shift costs
/// `O(n^2)`.
pub struct ShiftedBorderedSolver {
    /// `Q U`, mapping Hessenberg coordinates to the full space.
    w: CMat,
    h: CMat,
    b: CVec,
    b_norm_sq: f64,
    /// `b^H B W / |b|^2`.
    g: CVec,
}

impl ShiftedBorderedSolver {
    pub fn new(big_b: &CMat, b: &CVec) -> Self {
        let q = null_basis(b);
        let reduced = q.adjoint() * big_b * &q;
        let hess = nalgebra::linalg::Hessenberg::new(reduced);
        let (u, h) = hess.unpack();
        let w = q * u;
        let b_norm_sq = b.norm_squared();
        let g = (b.adjoint() * big_b * &w).transpose().map(|x| x / b_norm_sq);
        Self { w, h, b: b.clone(), b_norm_sq, g }
    }

    /// Returns `(x, p)`.
    pub fn solve(&self, lambda: Complex64, f: &CVec) -> Result<(CVec, Complex64)> {
        let r = self.w.adjoint() * f;
        let z = hessenberg_shift_solve(&self.h, lambda, &r)?;
        let x = &self.w * &z;
        let p = self.b.dotc(f) / self.b_norm_sq - self.g.dot(&z);
        Ok((x, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn null_basis_is_orthonormal_complement() {
        let b = CVec::from_vec(vec![c(0.0, 1.0), c(0.0, -2.0), c(0.0, 0.5), c(0.0, 0.0)]);
        let q = null_basis(&b);
        let gram = q.adjoint() * &q;
        assert!((gram - CMat::identity(3, 3)).norm() < 1e-14);
        assert!((q.adjoint() * &b).norm() < 1e-14);
    }

    #[test]
    fn hessenberg_solve_matches_lu() {
        let n = 6;
        let h = CMat::from_fn(n, n, |i, j| {
            if i > j + 1 {
                c(0.0, 0.0)
            } else {
                c((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0 - 1.0)
            }
        });
        let r = CVec::from_fn(n, |i, _| c(i as f64, 1.0));
        let shift = c(0.3, 2.0);
        let z = hessenberg_shift_solve(&h, shift, &r).unwrap();
        let mut a = h.clone();
        for i in 0..n {
            a[(i, i)] += shift;
        }
        assert!((a * z - r).norm() < 1e-12);
    }

    #[test]
    fn shifted_bordered_matches_dense_saddle_point() {
        let n = 7;
        let big_b = CMat::from_fn(n, n, |i, j| {
            c(((i * 5 + j * 11) % 7) as f64 - 3.0, ((i * 3 + j) % 4) as f64 - 1.5)
        });
        // Purely imaginary border, as produced by the divergence row.
        let b = CVec::from_fn(n, |i, _| c(0.0, 1.0 + i as f64 * 0.37 - (i % 2) as f64));
        let f = CVec::from_fn(n, |i, _| c((i as f64).sin(), (2.0 * i as f64).cos()));
        let solver = ShiftedBorderedSolver::new(&big_b, &b);
        for lambda in [c(0.0, 0.0), c(0.0, 3.5), c(1.0, -20.0)] {
            let (x, p) = solver.solve(lambda, &f).unwrap();
            let mut m = CMat::zeros(n + 1, n + 1);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = big_b[(i, j)];
                }
                m[(i, i)] += lambda;
                m[(i, n)] = b[i];
                m[(n, i)] = b[i];
            }
            let mut rhs = CVec::zeros(n + 1);
            rhs.rows_mut(0, n).copy_from(&f);
            let want = DenseLu::new(m).unwrap().solve(&rhs).unwrap();
            assert!((x - want.rows(0, n)).norm() < 1e-11, "lambda {lambda}");
            assert!((p - want[n]).norm() < 1e-11, "lambda {lambda}");
        }
    }
}
