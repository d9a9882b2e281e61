//! 2-norm estimation by Lanczos on `ZᴴZ`.

use rand::{Rng, SeedableRng};

use crate::linalg::dense::{DenseMatrix, LuFactors};
use crate::linalg::vector::{axpy, dot, norm2};
use crate::C64;

pub const LANCZOS_MAX_ITERS: usize = 5000;
/// Stop once the largest Ritz value of `ZᴴZ` moves less than this (relative)
/// on two consecutive steps.
pub const LANCZOS_TOL: f64 = 1e-14;
const SEED: u64 = 0x2b_0c0de;

/// Largest singular value estimate; `converged == false` flags that the
/// iteration cap was hit and `value` is the best estimate so far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Largest eigenvalue of the real symmetric tridiagonal matrix with diagonal
/// `a` and off-diagonal `b`, by Sturm-sequence bisection.
fn tridiag_max_eig(a: &[f64], b: &[f64]) -> f64 {
    let k = a.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = if i > 0 { b[i - 1].abs() } else { 0.0 } + if i + 1 < k { b[i].abs() } else { 0.0 };
        lo = lo.min(a[i] - r);
        hi = hi.max(a[i] + r);
    }
    // number of eigenvalues strictly below x
    let below = |x: f64| -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..k {
            let off = if i > 0 { b[i - 1] * b[i - 1] } else { 0.0 };
            d = a[i] - x - if i > 0 { off / d } else { 0.0 };
            if d == 0.0 {
                d = -f64::EPSILON * (x.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `σ_max` of an operator given its forward and adjoint actions, from
/// Lanczos with full reorthogonalization on `ZᴴZ`. The start vector is
/// pseudo-random with a fixed seed, so results are reproducible.
pub fn lanczos_norm2(
    n: usize,
    apply: impl Fn(&[C64]) -> Vec<C64>,
    apply_adjoint: impl Fn(&[C64]) -> Vec<C64>,
) -> NormEstimate {
    if n == 0 {
        return NormEstimate {
            value: 0.0,
            converged: true,
            iterations: 0,
        };
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SEED);
    let mut q: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), 0.0)).collect();
    let nq = norm2(&q);
    for x in q.iter_mut() {
        *x /= nq;
    }
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut theta = 0.0;
    let mut quiet = 0;
    for it in 1..=LANCZOS_MAX_ITERS.min(n) {
        let zq = apply(&q);
        let mut w = apply_adjoint(&zq);
        let a = dot(&q, &w).re;
        basis.push(q);
        for _ in 0..2 {
            for v in &basis {
                let h = dot(v, &w);
                axpy(-h, v, &mut w);
            }
        }
        alpha.push(a);
        let new = tridiag_max_eig(&alpha, &beta).max(norm2(&zq).powi(2)).max(theta);
        let bn = norm2(&w);
        quiet = if new - theta <= LANCZOS_TOL * new { quiet + 1 } else { 0 };
        theta = new;
        if bn <= LANCZOS_TOL * theta.max(f64::MIN_POSITIVE) || it == n || quiet >= 2 || theta == 0.0 {
            return NormEstimate {
                value: theta.sqrt(),
                converged: true,
                iterations: it,
            };
        }
        beta.push(bn);
        q = w.into_iter().map(|x| x / bn).collect();
    }
    NormEstimate {
        value: theta.sqrt(),
        converged: false,
        iterations: LANCZOS_MAX_ITERS,
    }
}

/// `‖Z‖₂`.
pub fn spectral_norm2(z: &DenseMatrix) -> NormEstimate {
    assert!(z.nrows() > 0 && z.ncols() > 0, "spectral_norm2 of an empty matrix");
    lanczos_norm2(z.ncols(), |x| z.matvec(x), |x| z.matvec_adjoint(x))
}

/// `‖Z⁻¹‖₂` from an LU factorization of `Z`.
pub fn inverse_norm2(lu: &LuFactors) -> NormEstimate {
    lanczos_norm2(lu.dim(), |x| lu.solve(x), |x| lu.solve_adjoint(x))
}
