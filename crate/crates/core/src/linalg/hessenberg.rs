//! Eigenvalues of small dense matrices by the shifted QR algorithm.
//!
//! Used only at diagnostics scale (Arnoldi Hessenberg matrices, block
//! Rayleigh–Ritz projections). Complex single-shift QR with Wilkinson shifts
//! and Givens rotations.

use crate::linalg::dense::DenseMatrix;
use crate::{Error, Result, C64};

const MAX_SWEEPS_PER_EIG: usize = 60;

/// Complex Givens rotation `(c, s)` with `[c s; −s̄ c]·[a; b] = [r; 0]`.
#[inline]
pub(crate) fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// Eigenvalues of an upper Hessenberg matrix (entries below the first
/// subdiagonal are ignored).
pub fn hessenberg_eigenvalues(h: &DenseMatrix) -> Result<Vec<C64>> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::Dimension("Hessenberg matrix must be square".into()));
    }
    let mut h = h.clone();
    let mut eigs = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eigs);
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let scale = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let scale = if scale == 0.0 { 1.0 } else { scale };
            if sub <= f64::EPSILON * scale {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs.push(h[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > MAX_SWEEPS_PER_EIG {
            return Err(Error::NoConvergence(total));
        }

        // Wilkinson shift from the trailing 2×2 block.
        let a = h[(hi - 1, hi - 1)];
        let b = h[(hi - 1, hi)];
        let c = h[(hi, hi - 1)];
        let d = h[(hi, hi)];
        let mu = if iter % 11 == 0 {
            // exceptional shift
            d + C64::new(h[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            let tr_half = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
            let l1 = tr_half + disc;
            let l2 = tr_half - disc;
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * cs + sn * y;
                h[(k + 1, j)] = -sn.conj() * x + y * cs;
            }
            rots.push((cs, sn));
        }
        for (idx, &(cs, sn)) in rots.iter().enumerate() {
            let k = lo + idx;
            let top = (k + 2).min(hi);
            for i in lo..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * cs + sn.conj() * y;
                h[(i, k + 1)] = -sn * x + y * cs;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    eigs.reverse();
    Ok(eigs)
}

/// Householder reduction to upper Hessenberg form (similarity transform).
pub fn to_hessenberg(a: &DenseMatrix) -> DenseMatrix {
    let n = a.nrows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha_norm = x.iter().fold(0.0, |acc, v| acc + v.norm_sqr()).sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let mut v = x;
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H ← (I − 2vvᴴ/vᴴv) H
        for j in 0..n {
            let s: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt.conj() * h[(k + 1 + t, j)])
                .sum();
            let f = s * (2.0 / vnorm2);
            for (t, vt) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vt * f;
            }
        }
        // H ← H (I − 2vvᴴ/vᴴv)
        for i in 0..n {
            let s: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| h[(i, k + 1 + t)] * vt)
                .sum();
            let f = s * (2.0 / vnorm2);
            for (t, vt) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= f * vt.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    h
}

/// Eigenvalues of a small general square matrix.
pub fn dense_eigenvalues(a: &DenseMatrix) -> Result<Vec<C64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension("eigenvalues of a non-square matrix".into()));
    }
    hessenberg_eigenvalues(&to_hessenberg(a))
}
