//! Weighted polynomial minima `min_{q(0)=1} ‖D·q(Λ)·e‖₂` and the bounds
//! built from them.
//!
//! The minimum is the distance from `d` to `span{Λd, …, Λᵏd}`. An
//! orthonormal basis of that space is built by Arnoldi on `diag(Λ)`, which
//! stays accurate for large `k` where monomial columns lose all rank.

use crate::linalg::dense::DenseMatrix;
use crate::linalg::eigbasis::EigenBasis;
use crate::linalg::lsq::constrained_poly_ls;
use crate::linalg::vector::{axpy, dot, norm2};
use crate::{Error, Result, C64};

use super::envelope::{disk_envelope, iter_lower_bound, DiskEnvelope};
use super::weights::WeightRecord;

/// A new Krylov direction is considered dependent below this relative size.
const DEPENDENCE_TOL: f64 = 1e-12;

/// Incremental orthonormal basis of `span{Λd, Λ²d, …}`.
struct NodeKrylov<'a> {
    nodes: Vec<C64>,
    d: &'a [C64],
    basis: Vec<Vec<C64>>,
    next: Vec<C64>,
    exhausted: bool,
}

impl<'a> NodeKrylov<'a> {
    fn new(d: &'a [C64], nodes: &[C64]) -> Self {
        let scale = nodes.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let nodes: Vec<C64> = if scale > 0.0 {
            nodes.iter().map(|z| z / scale).collect()
        } else {
            nodes.to_vec()
        };
        let next = d.iter().zip(&nodes).map(|(a, b)| a * b).collect();
        Self {
            nodes,
            d,
            basis: Vec::new(),
            next,
            exhausted: false,
        }
    }

    /// Add one direction; returns it, or `None` once the space is invariant.
    fn step(&mut self) -> Option<&[C64]> {
        if self.exhausted {
            return None;
        }
        let mut w = std::mem::take(&mut self.next);
        let before = norm2(&w);
        for _ in 0..2 {
            for q in &self.basis {
                let h = dot(q, &w);
                axpy(-h, q, &mut w);
            }
        }
        let beta = norm2(&w);
        if before == 0.0 || beta <= DEPENDENCE_TOL * before || self.basis.len() == self.d.len() {
            self.exhausted = true;
            return None;
        }
        for x in w.iter_mut() {
            *x /= beta;
        }
        self.next = w.iter().zip(&self.nodes).map(|(a, b)| a * b).collect();
        self.basis.push(w);
        self.basis.last().map(|v| v.as_slice())
    }
}

/// `min_{q∈Π_k, q(0)=1} (Σⱼ |dⱼ q(λⱼ)|²)^{1/2}`.
pub fn weighted_poly_min(d: &[C64], nodes: &[C64], k: usize) -> Result<f64> {
    if d.len() != nodes.len() {
        return Err(Error::Dimension(format!(
            "{} weights but {} nodes",
            d.len(),
            nodes.len()
        )));
    }
    if d.is_empty() {
        return Ok(0.0);
    }
    let mut kr = NodeKrylov::new(d, nodes);
    for _ in 0..k {
        if kr.step().is_none() {
            break;
        }
    }
    let cols = DenseMatrix::from_columns(d.len(), &kr.basis)?;
    Ok(constrained_poly_ls(d, &cols)?.min_value)
}

/// `weighted_poly_min` for every `k = 0..=k_max`.
pub fn weighted_poly_min_history(d: &[C64], nodes: &[C64], k_max: usize) -> Result<Vec<f64>> {
    if d.len() != nodes.len() {
        return Err(Error::Dimension(format!(
            "{} weights but {} nodes",
            d.len(),
            nodes.len()
        )));
    }
    let mut r = d.to_vec();
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(norm2(&r));
    let mut kr = NodeKrylov::new(d, nodes);
    for _ in 0..k_max {
        if let Some(q) = kr.step() {
            for _ in 0..2 {
                let h = dot(q, &r);
                axpy(-h, q, &mut r);
            }
        }
        out.push(norm2(&r));
    }
    Ok(out)
}

/// `‖Z‖₂·min_{q(0)=1} ‖W·q(Λ)·e‖₂` with `λ` the eigenvalues of `B`.
pub fn bound_25(basis: &EigenBasis, w: &WeightRecord, k: usize) -> Result<f64> {
    let lambda = basis.shifted_eigenvalues();
    Ok(basis.z_norm2() * weighted_poly_min(w.driving(), &lambda, k)?)
}

fn tilted(d: &[C64], nodes: &[C64]) -> Result<Vec<C64>> {
    let l1 = nodes[0];
    if l1.norm() == 0.0 {
        return Err(Error::ShiftIsEigenvalue);
    }
    Ok(d.iter()
        .zip(nodes)
        .skip(1)
        .map(|(w, l)| w * (C64::new(1.0, 0.0) - l / l1))
        .collect())
}

/// `‖Z‖₂·min_{q∈Π_{k−1}, q(0)=1} (Σ_{j≥2} |w̃ⱼ q(λⱼ)|²)^{1/2}` for `k ≥ 1`.
pub fn bound_26a(basis: &EigenBasis, w: &WeightRecord, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("bound_26a needs k >= 1".into()));
    }
    let lambda = basis.shifted_eigenvalues();
    let wt = tilted(w.driving(), &lambda)?;
    Ok(basis.z_norm2() * weighted_poly_min(&wt, &lambda[1..], k - 1)?)
}

/// Bounds for `k = 0..=k_max`; `bound_26a[0]` is NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundHistory {
    pub bound_25: Vec<f64>,
    pub bound_26a: Vec<f64>,
}

/// Bound histories for weights `d` on the eigenvalues `nodes` of the
/// (possibly polynomially preconditioned) operator.
pub fn bound_history(z_norm: f64, d: &[C64], nodes: &[C64], k_max: usize) -> Result<BoundHistory> {
    let b25 = weighted_poly_min_history(d, nodes, k_max)?;
    let wt = tilted(d, nodes)?;
    let b26 = if k_max == 0 {
        Vec::new()
    } else {
        weighted_poly_min_history(&wt, &nodes[1..], k_max - 1)?
    };
    let mut bound_26a = vec![f64::NAN];
    bound_26a.extend(b26.iter().map(|v| z_norm * v));
    Ok(BoundHistory {
        bound_25: b25.iter().map(|v| z_norm * v).collect(),
        bound_26a,
    })
}

/// Stacked bound for block GMRES: all `u` columns of `W` share one
/// polynomial.
pub fn block_bound(basis: &EigenBasis, w: &DenseMatrix, k: usize) -> Result<f64> {
    let (d, nodes) = stack(basis, w)?;
    Ok(basis.z_norm2() * weighted_poly_min(&d, &nodes, k)?)
}

/// `block_bound` for every `k = 0..=k_max`, with `nodes` the eigenvalues of
/// the (possibly polynomially preconditioned) operator.
pub fn block_bound_history(z_norm: f64, w: &DenseMatrix, nodes: &[C64], k_max: usize) -> Result<Vec<f64>> {
    if w.nrows() != nodes.len() {
        return Err(Error::Dimension(format!(
            "weight block has {} rows but there are {} nodes",
            w.nrows(),
            nodes.len()
        )));
    }
    let stacked: Vec<C64> = (0..w.ncols()).flat_map(|_| nodes.iter().copied()).collect();
    Ok(weighted_poly_min_history(w.as_slice(), &stacked, k_max)?
        .into_iter()
        .map(|v| z_norm * v)
        .collect())
}

fn stack(basis: &EigenBasis, w: &DenseMatrix) -> Result<(Vec<C64>, Vec<C64>)> {
    if w.nrows() != basis.dim() {
        return Err(Error::Dimension(format!(
            "weight block has {} rows but the basis has dimension {}",
            w.nrows(),
            basis.dim()
        )));
    }
    let lambda = basis.shifted_eigenvalues();
    let d = w.as_slice().to_vec();
    let nodes = (0..w.ncols()).flat_map(|_| lambda.iter().copied()).collect();
    Ok((d, nodes))
}

/// Per-step summary of every bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub k: usize,
    pub bound_25: f64,
    pub bound_26a: f64,
    pub bound_26k1: f64,
    pub disk_c: f64,
    pub disk_s: f64,
    pub disk_valid: bool,
    pub bound_26b_disk: f64,
    pub iter_lower: f64,
}

/// Reports for `k = 0..=k_max` given weights `d` on `nodes`, the inner
/// tolerance `tau` and `‖Z‖₂`.
pub fn bound_reports(z_norm: f64, d: &[C64], nodes: &[C64], k_max: usize, tau: f64) -> Result<Vec<BoundReport>> {
    let hist = bound_history(z_norm, d, nodes, k_max)?;
    let wt = tilted(d, nodes)?;
    let wt_norm = norm2(&wt);
    let disk: DiskEnvelope = disk_envelope(&nodes[1..]);
    let iter_lower = if disk.valid && wt_norm > 0.0 {
        iter_lower_bound(disk.c, disk.s, z_norm, wt_norm, tau)?
    } else {
        f64::NAN
    };
    Ok((0..=k_max)
        .map(|k| BoundReport {
            k,
            bound_25: hist.bound_25[k],
            bound_26a: hist.bound_26a[k],
            bound_26k1: z_norm * wt_norm,
            disk_c: disk.c,
            disk_s: disk.s,
            disk_valid: disk.valid,
            bound_26b_disk: if k == 0 { f64::NAN } else { z_norm * wt_norm * disk.factor(k) },
            iter_lower,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::SparseMatrix;
    use crate::linalg::vector::real;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn one_step_oracle() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = weighted_poly_min(&[c(s), c(s)], &[c(1.0), c(2.0)], 1).unwrap();
        assert!((v - 0.1f64.sqrt()).abs() < 1e-14);
        let h = weighted_poly_min_history(&[c(s), c(s)], &[c(1.0), c(2.0)], 3).unwrap();
        assert!((h[0] - 1.0).abs() < 1e-15);
        assert!((h[1] - 0.1f64.sqrt()).abs() < 1e-14);
        assert!(h[2] < 1e-15 && h[3] < 1e-15);
    }

    #[test]
    fn bound_26a_small_case() {
        // λ = (1,2,4), w = (1,1,1)/√3: w̃ = (−1, −3)/√3 at λ = (2, 4);
        // min over c of |w̃₂(1+2c)|² + |w̃₃(1+4c)|²  →  c = −(2·1 + 4·9)/(4·1 + 16·9)
        let l = [1.0, 2.0, 4.0];
        let a = SparseMatrix::from_diagonal(&real(&l));
        let basis = EigenBasis::new(&a, real(&l), DenseMatrix::identity(3)).unwrap();
        let y = real(&[1.0, 1.0, 1.0]);
        let w = crate::diagnostics::compute_weights(&basis, &y, None).unwrap();
        let cc: f64 = -(2.0 + 36.0) / (4.0 + 144.0);
        let want = (((1.0 + 2.0 * cc).powi(2) + 9.0 * (1.0 + 4.0 * cc).powi(2)) / 3.0).sqrt();
        let got = bound_26a(&basis, &w, 2).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!((bound_26a(&basis, &w, 1).unwrap() - w.wt_norm).abs() < 1e-12);
    }
}
