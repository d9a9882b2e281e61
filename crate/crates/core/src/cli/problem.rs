use rand::{Rng, SeedableRng};

use crate::eig::ProblemSpec;
use crate::linalg::dense::DenseMatrix;
use crate::linalg::eigbasis::EigenBasis;
use crate::linalg::generators::{gen_convdiff, gen_tridiag};
use crate::linalg::mm::mm_read;
use crate::linalg::sparse::SparseMatrix;
use crate::C64;

use super::config::{MassSource, ProblemSource, RunConfig};
use super::CliError;

pub struct Problem {
    pub spec: ProblemSpec,
    /// Eigenvectors of `A − σM` (with `λⱼ = γⱼ − σ` available), when known.
    pub basis: Option<EigenBasis>,
}

impl Problem {
    /// Initial block: `(1/n)(1,…,1)` followed by seeded pseudo-random columns.
    pub fn initial_block(&self, u: usize) -> DenseMatrix {
        let n = self.spec.dim();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut y = DenseMatrix::zeros(n, u);
        for j in 0..u {
            for i in 0..n {
                y[(i, j)] = if j == 0 {
                    self.spec.y0[i]
                } else {
                    C64::new(rng.random_range(-1.0..1.0), 0.0)
                };
            }
        }
        y
    }
}

pub fn build_problem(cfg: &RunConfig) -> Result<Problem, CliError> {
    let (a, gen_basis) = match &cfg.source {
        ProblemSource::Generator { m, x, y } => {
            let (a, b) = gen_convdiff(*m, *x, *y)?;
            (a, Some(b))
        }
        ProblemSource::File(p) => (mm_read(p)?, None),
    };
    let n = a.nrows();
    let mass: Option<SparseMatrix> = match &cfg.mass {
        None => None,
        Some(MassSource::File(p)) => Some(mm_read(p)?),
        Some(MassSource::Tridiag(l, d, u)) => Some(gen_tridiag(n, *l, *d, *u)?),
    };
    let mut spec = ProblemSpec::new(a, cfg.sigma);
    spec.mass = mass;
    spec.delta = cfg.delta;
    spec.max_outer = cfg.max_outer;
    spec.outer_tol = cfg.outer_tol;
    spec.precond = cfg.precond;

    let basis = match (&cfg.eig, &spec.mass) {
        // a sidecar for a generalized problem holds the eigenpairs of A − σM
        (Some(p), Some(_)) => {
            let (eigs, z) = EigenBasis::read_eigb1(p)?;
            let b = spec.shifted_matrix()?;
            Some(EigenBasis::new(&b, eigs, z)?.with_shift(C64::new(0.0, 0.0)))
        }
        (Some(p), None) => {
            let (eigs, z) = EigenBasis::read_eigb1(p)?;
            Some(EigenBasis::new(&spec.a, eigs, z)?.with_shift(cfg.sigma))
        }
        (None, None) => gen_basis.map(|b| b.with_shift(cfg.sigma)),
        (None, Some(_)) => None,
    };
    Ok(Problem { spec, basis })
}
