use crate::linalg::eigbasis::EigenBasis;
use crate::{Error, Result, C64};

/// Disk `|λ − c| ≤ r` enclosing `λ₂..λₙ`. When it excludes the origin the
/// polynomial `(1 − λ/c)^{k−1}` certifies the envelope `S·(1/C)^{k−1}` with
/// `C = |c|/r`, `S = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskEnvelope {
    pub center: C64,
    pub radius: f64,
    pub c: f64,
    pub s: f64,
    pub valid: bool,
}

impl DiskEnvelope {
    /// `S·(1/C)^{k−1}` for `k ≥ 1` (1 when the disk is invalid).
    pub fn factor(&self, k: usize) -> f64 {
        if !self.valid || k == 0 {
            return 1.0;
        }
        if k == 1 {
            return self.s;
        }
        if self.c.is_infinite() {
            return 0.0;
        }
        self.s * self.c.powi(-(k as i32 - 1))
    }
}

pub fn disk_envelope(eigenvalues: &[C64]) -> DiskEnvelope {
    if eigenvalues.is_empty() {
        return DiskEnvelope {
            center: C64::new(0.0, 0.0),
            radius: 0.0,
            c: 1.0,
            s: 1.0,
            valid: false,
        };
    }
    let fold = |f: fn(f64, f64) -> f64, init: f64, g: fn(&C64) -> f64| {
        eigenvalues.iter().map(g).fold(init, f)
    };
    let (re0, re1) = (fold(f64::min, f64::INFINITY, |z| z.re), fold(f64::max, f64::NEG_INFINITY, |z| z.re));
    let (im0, im1) = (fold(f64::min, f64::INFINITY, |z| z.im), fold(f64::max, f64::NEG_INFINITY, |z| z.im));
    let center = C64::new(0.5 * (re0 + re1), 0.5 * (im0 + im1));
    let radius = eigenvalues.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    if radius < center.norm() {
        DiskEnvelope {
            center,
            radius,
            c: if radius == 0.0 { f64::INFINITY } else { center.norm() / radius },
            s: 1.0,
            valid: true,
        }
    } else {
        DiskEnvelope {
            center,
            radius,
            c: 1.0,
            s: 1.0,
            valid: false,
        }
    }
}

/// `1 + (log S + log(‖Z‖₂‖w̃‖₂/τ))/log C`.
pub fn iter_lower_bound(c: f64, s: f64, z_norm: f64, wt_norm: f64, tau: f64) -> Result<f64> {
    if !(c > 1.0) {
        return Err(Error::InvalidEnvelope(c));
    }
    if !(tau > 0.0) || !(wt_norm > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "iteration bound needs tau > 0 and wt_norm > 0 (tau = {tau}, wt_norm = {wt_norm})"
        )));
    }
    if c.is_infinite() {
        return Ok(1.0);
    }
    Ok(1.0 + (s.ln() + (z_norm * wt_norm / tau).ln()) / c.ln())
}

/// `C1 = max_{j≥2}|γ₁ − γⱼ|/|γ₁ − σ|` and `C2 = ‖Z‖₂·C1`.
pub fn initial_decrease_constants(basis: &EigenBasis, sigma: C64) -> Result<(f64, f64)> {
    let g = basis.eigenvalues();
    let denom = (g[0] - sigma).norm();
    if denom == 0.0 {
        return Err(Error::ShiftIsEigenvalue);
    }
    let c1 = g[1..].iter().map(|gj| (g[0] - gj).norm()).fold(0.0, f64::max) / denom;
    Ok((c1, basis.z_norm2() * c1))
}
