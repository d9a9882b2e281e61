//! Small helpers on complex slices.

use crate::C64;

/// `xᴴy`
#[inline]
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

#[inline]
pub fn norm2(x: &[C64]) -> f64 {
    x.iter().fold(0.0, |acc, v| acc + v.norm_sqr()).sqrt()
}

/// `y ← y + alpha·x`
#[inline]
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn scale(alpha: C64, x: &mut [C64]) {
    for v in x.iter_mut() {
        *v *= alpha;
    }
}

pub fn sub(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn real(x: &[f64]) -> Vec<C64> {
    x.iter().map(|&v| C64::new(v, 0.0)).collect()
}

pub fn zeros(n: usize) -> Vec<C64> {
    vec![C64::new(0.0, 0.0); n]
}

/// Normalize to unit 2-norm and rotate the phase so the largest-magnitude
/// component (first one on ties) is real and positive. Returns the original norm.
pub fn normalize_phase(x: &mut [C64]) -> f64 {
    let nrm = norm2(x);
    if nrm == 0.0 {
        return 0.0;
    }
    let mut idx = 0;
    let mut best = -1.0;
    for (i, v) in x.iter().enumerate() {
        let m = v.norm();
        if m > best {
            best = m;
            idx = i;
        }
    }
    let phase = x[idx] / x[idx].norm();
    let factor = phase.conj() / nrm;
    for v in x.iter_mut() {
        *v *= factor;
    }
    nrm
}

/// Index of the first maximum-magnitude entry.
pub fn argmax_abs(x: &[C64]) -> usize {
    let mut idx = 0;
    let mut best = -1.0;
    for (i, v) in x.iter().enumerate() {
        if v.norm() > best {
            best = v.norm();
            idx = i;
        }
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_phase_makes_peak_real_positive() {
        let mut x = vec![C64::new(0.0, -3.0), C64::new(0.0, 4.0)];
        let n = normalize_phase(&mut x);
        assert_eq!(n, 5.0);
        assert!((x[1] - C64::new(0.8, 0.0)).norm() < 1e-15);
        assert!((norm2(&x) - 1.0).abs() < 1e-15);
    }
}
