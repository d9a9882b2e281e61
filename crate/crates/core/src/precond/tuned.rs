use crate::linalg::dense::{DenseMatrix, LuFactors};
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::vector::dot;
use crate::{Error, Result, C64};

use super::Preconditioner;

/// `|Yᴴ·P⁻¹T|` below this is a singular tuning update.
pub const TUNING_TOL: f64 = 1e-14;

/// Which image `Pᵢyᵢ = t` the update enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuningTarget {
    /// `t = M·y` (`t = y` for standard problems).
    Identity,
    /// `t = A·y`
    A,
    /// `t = (A − σM)·y`
    B,
    /// `t = λ⁽ⁱ⁾·y` with `λ⁽ⁱ⁾ = γ⁽ⁱ⁾ − σ`
    Lambda,
}

/// Operators needed to form the tuning target.
#[derive(Debug, Clone, Copy)]
pub struct TuningContext<'a> {
    pub a: &'a SparseMatrix,
    pub mass: Option<&'a SparseMatrix>,
    pub sigma: C64,
    /// Current eigenvalue approximation `γ⁽ⁱ⁾`.
    pub gamma: C64,
}

/// `Pᵢ = P + (T − P·Y)(YᴴY)⁻¹Yᴴ`, so that `Pᵢ·Y = T`, applied through
/// `Pᵢ⁻¹v = P⁻¹v − (P⁻¹T − Y)(Yᴴ·P⁻¹T)⁻¹·Yᴴ·P⁻¹v`.
pub struct TunedPrecond<'a> {
    base: &'a (dyn Preconditioner + 'a),
    y: Vec<Vec<C64>>,
    /// `P⁻¹T − Y`, one column per tuned direction.
    correction: Vec<Vec<C64>>,
    /// `Yᴴ·P⁻¹T`
    small: LuFactors,
    denominator: C64,
}

impl<'a> TunedPrecond<'a> {
    /// Rank-one tuning `Pᵢy = t`.
    pub fn new(base: &'a (dyn Preconditioner + 'a), y: &[C64], t: &[C64]) -> Result<Self> {
        Self::block(base, &[y.to_vec()], &[t.to_vec()])
    }

    /// Rank-`u` tuning `Pᵢ·Y = T` (columns given separately).
    pub fn block(base: &'a (dyn Preconditioner + 'a), y: &[Vec<C64>], t: &[Vec<C64>]) -> Result<Self> {
        let u = y.len();
        if u == 0 || t.len() != u {
            return Err(Error::Dimension(format!(
                "tuning needs matching nonempty Y and T blocks (got {} and {})",
                u,
                t.len()
            )));
        }
        let n = y[0].len();
        if y.iter().chain(t).any(|c| c.len() != n) {
            return Err(Error::Dimension("tuning vectors differ in length".into()));
        }
        let pt: Vec<Vec<C64>> = t.iter().map(|c| base.apply_inverse(c)).collect();
        let small = DenseMatrix::from_fn(u, u, |i, j| dot(&y[i], &pt[j]));
        let denominator = if u == 1 {
            small[(0, 0)]
        } else {
            C64::new(f64::NAN, 0.0)
        };
        let lu = small.lu().map_err(|_| Error::TuningSingular(0.0))?;
        if u == 1 {
            if denominator.norm() < TUNING_TOL {
                return Err(Error::TuningSingular(denominator.norm()));
            }
        } else {
            let min_pivot = (0..u).map(|i| lu.pivot(i).norm()).fold(f64::INFINITY, f64::min);
            if min_pivot < TUNING_TOL * small.max_abs() {
                return Err(Error::TuningSingular(min_pivot));
            }
        }
        let correction = pt
            .iter()
            .zip(y)
            .map(|(p, yy)| p.iter().zip(yy).map(|(a, b)| a - b).collect())
            .collect();
        Ok(Self {
            base,
            y: y.to_vec(),
            correction,
            small: lu,
            denominator,
        })
    }

    pub fn width(&self) -> usize {
        self.y.len()
    }

    /// `yᴴ·P⁻¹t` for rank-one tuning.
    pub fn denominator(&self) -> C64 {
        self.denominator
    }
}

impl Preconditioner for TunedPrecond<'_> {
    fn apply_inverse(&self, v: &[C64]) -> Vec<C64> {
        let mut x = self.base.apply_inverse(v);
        let proj: Vec<C64> = self.y.iter().map(|y| dot(y, &x)).collect();
        let coef = self.small.solve(&proj);
        for (c, corr) in coef.iter().zip(&self.correction) {
            for (xi, ci) in x.iter_mut().zip(corr) {
                *xi -= c * ci;
            }
        }
        x
    }
}

fn target_image(y: &[C64], target: TuningTarget, ctx: &TuningContext) -> Result<Vec<C64>> {
    let spmv = |m: &SparseMatrix, x: &[C64]| {
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        m.spmv_into(x, &mut out);
        out
    };
    Ok(match target {
        TuningTarget::Identity => match ctx.mass {
            Some(m) => spmv(m, y),
            None => y.to_vec(),
        },
        TuningTarget::A => spmv(ctx.a, y),
        TuningTarget::B => {
            let mut t = spmv(ctx.a, y);
            let my = match ctx.mass {
                Some(m) => spmv(m, y),
                None => y.to_vec(),
            };
            for (ti, mi) in t.iter_mut().zip(&my) {
                *ti -= ctx.sigma * mi;
            }
            t
        }
        TuningTarget::Lambda => {
            let lambda = ctx.gamma - ctx.sigma;
            if lambda.norm() == 0.0 {
                return Err(Error::ShiftIsEigenvalue);
            }
            y.iter().map(|v| lambda * v).collect()
        }
    })
}

/// Build the tuned preconditioner for the current iterate(s) `Y`.
pub fn tuned_make<'a>(
    base: &'a (dyn Preconditioner + 'a),
    y: &[Vec<C64>],
    target: TuningTarget,
    ctx: &TuningContext,
) -> Result<TunedPrecond<'a>> {
    if y.iter().any(|c| c.len() != ctx.a.nrows()) {
        return Err(Error::Dimension("tuning vector length differs from A".into()));
    }
    let t = y
        .iter()
        .map(|c| target_image(c, target, ctx))
        .collect::<Result<Vec<_>>>()?;
    TunedPrecond::block(base, y, &t)
}
