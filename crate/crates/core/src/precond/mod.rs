//! Right preconditioners: identity, ILUT, tuned rank-`u` updates and residual
//! polynomials.

mod ilu;
mod poly;
mod tuned;

pub use ilu::{ilu_factor, IluFactors, PIVOT_TOL};
pub use poly::{
    cheb_nu, contour_ls_mu, interval_guard, nu_to_mu, poly_apply_inverse, ritz_contour,
    BoundPoly, PolyPrecond, PolyScheme, RITZ_STEPS,
};
pub use tuned::{tuned_make, TunedPrecond, TuningContext, TuningTarget, TUNING_TOL};

use crate::linalg::dense::LuFactors;
use crate::C64;

/// Action of `P⁻¹`.
pub trait Preconditioner {
    fn apply_inverse(&self, v: &[C64]) -> Vec<C64>;
}

/// `P = I`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Preconditioner for Identity {
    fn apply_inverse(&self, v: &[C64]) -> Vec<C64> {
        v.to_vec()
    }
}

impl<T: Preconditioner + ?Sized> Preconditioner for &T {
    fn apply_inverse(&self, v: &[C64]) -> Vec<C64> {
        (**self).apply_inverse(v)
    }
}

impl<T: Preconditioner + ?Sized> Preconditioner for Box<T> {
    fn apply_inverse(&self, v: &[C64]) -> Vec<C64> {
        (**self).apply_inverse(v)
    }
}

/// Exact dense inverse, handy at test scale.
impl Preconditioner for LuFactors {
    fn apply_inverse(&self, v: &[C64]) -> Vec<C64> {
        self.solve(v)
    }
}
