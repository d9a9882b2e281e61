//! Complex linear least squares by Householder QR with column pivoting.
//!
//! `constrained_poly_ls` solves `min_c ‖d + M·c‖₂`, the unconstrained form of
//! `min_{q(0)=1} ‖W·q(Λ)·e‖₂` after writing `q(λ) = 1 + Σ c_m λ^m`.

use crate::linalg::dense::DenseMatrix;
use crate::linalg::vector::norm2;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresResult {
    pub coefficients: Vec<C64>,
    pub min_value: f64,
}

/// Householder reflector stored as `(v, beta)` acting on rows `k..`.
struct Reflector {
    k: usize,
    v: Vec<C64>,
    beta: f64,
}

impl Reflector {
    /// Reflector mapping `x` to a multiple of `e₁`; `None` if `x = 0`.
    fn new(k: usize, x: &[C64]) -> Option<(Self, C64)> {
        let nx = norm2(x);
        if nx == 0.0 {
            return None;
        }
        let phase = if x[0].norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * nx;
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            return None;
        }
        Some((Self { k, v, beta: 2.0 / vv }, alpha))
    }

    fn apply(&self, y: &mut [C64]) {
        let tail = &mut y[self.k..self.k + self.v.len()];
        let s: C64 = self.v.iter().zip(tail.iter()).map(|(a, b)| a.conj() * b).sum();
        let f = s * self.beta;
        for (t, v) in tail.iter_mut().zip(&self.v) {
            *t -= v * f;
        }
    }
}

/// QR with column pivoting of `a` (consumed). Returns the reflectors, the
/// column permutation and the numerical rank.
struct PivotedQr {
    r: DenseMatrix,
    reflectors: Vec<Reflector>,
    perm: Vec<usize>,
    rank: usize,
}

impl PivotedQr {
    fn new(mut a: DenseMatrix, pivot: bool) -> Self {
        let (m, n) = (a.nrows(), a.ncols());
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::new();
        let steps = m.min(n);
        let mut col_norms: Vec<f64> = (0..n).map(|j| norm2(a.col(j))).collect();
        for k in 0..steps {
            if pivot {
                // recompute trailing norms exactly; sizes here are small
                for (j, cn) in col_norms.iter_mut().enumerate().skip(k) {
                    *cn = norm2(&a.col(j)[k..]);
                }
                let mut p = k;
                for j in k + 1..n {
                    if col_norms[j] > col_norms[p] {
                        p = j;
                    }
                }
                if p != k {
                    perm.swap(p, k);
                    col_norms.swap(p, k);
                    for i in 0..m {
                        let t = a[(i, k)];
                        a[(i, k)] = a[(i, p)];
                        a[(i, p)] = t;
                    }
                }
            }
            let x = a.col(k)[k..].to_vec();
            if let Some((h, alpha)) = Reflector::new(k, &x) {
                for j in k + 1..n {
                    h.apply(a.col_mut(j));
                }
                let col = a.col_mut(k);
                col[k] = alpha;
                for v in col[k + 1..].iter_mut() {
                    *v = C64::new(0.0, 0.0);
                }
                reflectors.push(h);
            }
        }
        let r00 = if steps > 0 { a[(0, 0)].norm() } else { 0.0 };
        let tol = (m.max(n) as f64) * f64::EPSILON * r00;
        let mut rank = 0;
        while rank < steps && a[(rank, rank)].norm() > tol {
            rank += 1;
        }
        Self {
            r: a,
            reflectors,
            perm,
            rank,
        }
    }

    fn apply_qh(&self, y: &mut [C64]) {
        for h in &self.reflectors {
            h.apply(y);
        }
    }
}

/// Solve the upper-triangular system `R[0..k,0..k]·x = b`.
fn back_substitute(r: &DenseMatrix, b: &[C64]) -> Vec<C64> {
    let k = b.len();
    let mut x = b.to_vec();
    for j in (0..k).rev() {
        x[j] /= r[(j, j)];
        let xj = x[j];
        for i in 0..j {
            x[i] -= r[(i, j)] * xj;
        }
    }
    x
}

/// `min_c ‖d + M·c‖₂` with a minimum-norm `c` when `M` is rank deficient.
pub fn constrained_poly_ls(d: &[C64], m: &DenseMatrix) -> Result<LeastSquaresResult> {
    let big_n = d.len();
    if big_n == 0 {
        return Err(Error::InvalidArgument("least squares with N = 0".into()));
    }
    if m.nrows() != big_n {
        return Err(Error::Dimension(format!(
            "d has length {} but M has {} rows",
            big_n,
            m.nrows()
        )));
    }
    let k = m.ncols();
    if k == 0 {
        return Ok(LeastSquaresResult {
            coefficients: Vec::new(),
            min_value: norm2(d),
        });
    }
    let qr = PivotedQr::new(m.clone(), true);
    let mut b: Vec<C64> = d.iter().map(|v| -v).collect();
    qr.apply_qh(&mut b);
    let r = qr.rank;
    let min_value = norm2(&b[r..]);

    // Solve [R11 R12]·z = b[..r] in the minimum-norm sense.
    let z = if r == k {
        back_substitute(&qr.r, &b[..k])
    } else if r == 0 {
        vec![C64::new(0.0, 0.0); k]
    } else {
        // QR of [R11 R12]ᴴ (k×r) = Q₂R₂ ⇒ z = Q₂·R₂⁻ᴴ·b
        let top = DenseMatrix::from_fn(k, r, |i, j| qr.r[(j, i)].conj());
        let qr2 = PivotedQr::new(top, false);
        // forward substitution with R₂ᴴ
        let mut t = vec![C64::new(0.0, 0.0); k];
        for j in 0..r {
            let s: C64 = (0..j).map(|i| qr2.r[(i, j)].conj() * t[i]).sum();
            t[j] = (b[j] - s) / qr2.r[(j, j)].conj();
        }
        // apply Q₂ = H₁H₂…: reflectors in reverse order
        for h in qr2.reflectors.iter().rev() {
            h.apply(&mut t);
        }
        t
    };
    let mut coefficients = vec![C64::new(0.0, 0.0); k];
    for (pos, &col) in qr.perm.iter().enumerate() {
        coefficients[col] = z[pos];
    }
    Ok(LeastSquaresResult {
        coefficients,
        min_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn residual(d: &[C64], m: &DenseMatrix, coeffs: &[C64]) -> f64 {
        let mc = m.matvec(coeffs);
        norm2(&d.iter().zip(&mc).map(|(a, b)| a + b).collect::<Vec<_>>())
    }

    #[test]
    fn exact_cancellation() {
        let m = DenseMatrix::from_columns(2, &[vec![c(1.0), c(0.0)]]).unwrap();
        let res = constrained_poly_ls(&[c(1.0), c(0.0)], &m).unwrap();
        assert!((res.coefficients[0] - c(-1.0)).norm() < 1e-15);
        assert!(res.min_value < 1e-15);
    }

    #[test]
    fn empty_minimization_returns_norm() {
        let d = [c(3.0), C64::new(0.0, 4.0)];
        let res = constrained_poly_ls(&d, &DenseMatrix::zeros(2, 0)).unwrap();
        assert_eq!(res.min_value, 5.0);
        assert!(res.coefficients.is_empty());
    }

    #[test]
    fn one_dimensional_calculus_oracle() {
        // q(λ) = 1 + cλ at λ = (1, 2) with weights 1/√2: minimiser c = −0.6
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let d = [c(s), c(s)];
        let m = DenseMatrix::from_columns(2, &[vec![c(s), c(2.0 * s)]]).unwrap();
        let res = constrained_poly_ls(&d, &m).unwrap();
        assert!((res.coefficients[0] - c(-0.6)).norm() < 1e-14);
        assert!((res.min_value - 0.1f64.sqrt()).abs() < 1e-14);
        assert!((res.min_value - 0.31623).abs() < 1e-5);
    }

    #[test]
    fn min_value_matches_recomputed_residual() {
        let d: Vec<C64> = (0..6).map(|i| C64::new(1.0 + i as f64, -0.5 * i as f64)).collect();
        let m = DenseMatrix::from_fn(6, 3, |i, j| C64::new(((i + 2 * j) % 5) as f64, (i * j) as f64 * 0.1));
        let res = constrained_poly_ls(&d, &m).unwrap();
        let direct = residual(&d, &m, &res.coefficients);
        assert!((direct - res.min_value).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn rank_deficient_gives_minimum_norm_solution() {
        // two identical columns: minimiser splits the weight equally
        let col = vec![c(1.0), c(1.0), c(0.0)];
        let m = DenseMatrix::from_columns(3, &[col.clone(), col]).unwrap();
        let d = [c(-2.0), c(-2.0), c(1.0)];
        let res = constrained_poly_ls(&d, &m).unwrap();
        assert!((res.min_value - 1.0).abs() < 1e-12);
        assert!((res.coefficients[0] - c(1.0)).norm() < 1e-12);
        assert!((res.coefficients[1] - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let m = DenseMatrix::zeros(3, 1);
        assert!(matches!(
            constrained_poly_ls(&[c(1.0)], &m),
            Err(Error::Dimension(_))
        ));
    }
}
