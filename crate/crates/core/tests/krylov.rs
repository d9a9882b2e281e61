mod common;

use approx::assert_relative_eq;
use common::*;
use invit_core::krylov::*;
use invit_core::linalg::vector::norm2;
use invit_core::linalg::*;
use invit_core::precond::{ilu_factor, Identity};
use invit_core::C64;
use proptest::prelude::*;

#[test]
fn gmres_identity_one_step() {
    let b = SparseMatrix::identity(5);
    let rhs = unit(cv(&[1.0, 2.0, 0.0, -1.0, 3.0]));
    let t = gmres(&b, &Identity, &rhs, GmresOptions::new(1e-12)).unwrap();
    assert_eq!(t.iterations, 1);
    assert!(t.converged);
    assert!(t.residual_norms[1] < 1e-15);
    assert_eq!(t.residual_norms.len(), t.iterations + 1);
}

#[test]
fn gmres_diag_two_steps() {
    let b = diag(&[1.0, 2.0]);
    let s = 1.0 / 2f64.sqrt();
    let t = gmres(&b, &Identity, &cv(&[s, s]), GmresOptions::new(1e-14)).unwrap();
    // brute force over c·B·r0
    let oracle = krylov_ls_oracle(&b.to_dense(), &DenseMatrix::from_columns(2, &[cv(&[s, s])]).unwrap(), 2);
    assert_relative_eq!(t.residual_norms[1], oracle[1], max_relative = 1e-12);
    assert_relative_eq!(t.residual_norms[1], (0.1f64).sqrt(), max_relative = 1e-12);
    assert!(t.residual_norms[2] < 1e-15);
    assert_eq!(t.iterations, 2);
    assert!(max_diff(&t.solution, &cv(&[s, s / 2.0])) < 1e-14);
}

#[test]
fn gmres_eigenvector_rhs() {
    let (a, basis) = gen_convdiff(4, Stencil::convection(0.2), Stencil::laplacian()).unwrap();
    let z = unit(basis.z().col(3).to_vec());
    let t = gmres(&a, &Identity, &z, GmresOptions::new(1e-13)).unwrap();
    assert_eq!(t.iterations, 1);
    assert!(t.residual_norms[1] < 1e-13);
}

#[test]
fn gmres_max_it_and_true_residual() {
    let (a, _) = gen_convdiff(6, Stencil::convection(0.1), Stencil::laplacian()).unwrap();
    let rhs = unit(vec![c(1.0); 36]);
    let t = gmres(&a, &Identity, &rhs, GmresOptions::new(1e-14).max_it(3)).unwrap();
    assert!(!t.converged);
    assert_eq!(t.iterations, 3);
    let r = norm2(&vector::sub(&rhs, &a.to_dense().matvec(&t.solution)));
    assert_relative_eq!(r, t.true_residual, max_relative = 1e-12);
    assert_relative_eq!(r, t.residual_norms[3], max_relative = 1e-8);
}

#[test]
fn gmres_relative_mode() {
    let b = diag(&[1.0, 2.0, 3.0]);
    let rhs = cv(&[10.0, 10.0, 10.0]);
    let t = gmres(&b, &Identity, &rhs, GmresOptions::new(1e-3).relative()).unwrap();
    assert!(t.converged);
    assert!(t.residual_norms.last().unwrap() <= &(1e-3 * norm2(&rhs)));
    assert_relative_eq!(t.final_tol, 1e-3 * norm2(&rhs));
}

#[test]
fn gmres_exact_preconditioner_one_step() {
    let (a, _) = gen_convdiff(5, Stencil::convection(0.3), Stencil::convection(-0.2)).unwrap();
    let lu = a.to_dense().lu().unwrap();
    let rhs = unit(vec![c(1.0); 25]);
    let t = gmres(&a, &lu, &rhs, GmresOptions::new(1e-12)).unwrap();
    assert_eq!(t.iterations, 1);
    assert!(t.true_residual < 1e-12);
}

#[test]
fn block_gmres_examples() {
    let b = diag(&[1.0, 2.0]);
    let t = block_gmres(&b, &Identity, &DenseMatrix::identity(2), GmresOptions::new(1e-14)).unwrap();
    assert_eq!(t.iterations, 1);
    assert!(t.residual_fro_norms[1] < 1e-15);
    let want = dense(&[&[1.0, 0.0], &[0.0, 0.5]]);
    assert!(dense_minus(&t.solution_block, &want) < 1e-15);

    let mut r = rng(1);
    let y = random_dense(&mut r, 6, 3, true);
    let t = block_gmres(&SparseMatrix::identity(6), &Identity, &y, GmresOptions::new(1e-12)).unwrap();
    assert_eq!(t.iterations, 1);
    assert!(dense_minus(&t.solution_block, &y) < 1e-12);
}

#[test]
fn block_gmres_u1_matches_gmres_bitwise() {
    let (a, _) = gen_convdiff(6, Stencil::convection(0.2), Stencil::convection(0.1)).unwrap();
    let f = ilu_factor(&a, 1e-1).unwrap();
    let rhs = unit(random_vec(&mut rng(3), 36, true));
    let opts = GmresOptions::new(1e-10);
    let s = gmres(&a, &f, &rhs, opts).unwrap();
    let b = block_gmres(&a, &f, &DenseMatrix::from_columns(36, &[rhs]).unwrap(), opts).unwrap();
    assert_eq!(s.residual_norms, b.residual_fro_norms);
    assert_eq!(s.solution, b.solution_block.col(0));
}

#[test]
fn block_gmres_dependent_columns_deflate() {
    let b = diag(&[1.0, 2.0, 3.0, 4.0]);
    let y0 = cv(&[1.0, 1.0, 1.0, 1.0]);
    let y1: Vec<C64> = y0.iter().map(|v| v * 2.0).collect();
    let t = block_gmres(&b, &Identity, &DenseMatrix::from_columns(4, &[y0, y1]).unwrap(), GmresOptions::new(1e-12))
        .unwrap();
    assert!(t.converged);
    assert!(t.deflated >= 1);
    assert!(t.true_residual_fro < 1e-10);
}

#[test]
fn ritz_examples() {
    let b = diag(&[1.0, 2.0, 3.0]);
    let mut r = arnoldi_ritz(&b, 3, &cv(&[1.0, 1.0, 1.0])).unwrap();
    r.sort_by(|x, y| x.re.total_cmp(&y.re));
    for (x, want) in r.iter().zip([1.0, 2.0, 3.0]) {
        assert!((x - c(want)).norm() < 1e-8);
    }

    let v = cv(&[1.0, 2.0, 2.0]);
    let r = arnoldi_ritz(&b, 1, &v).unwrap();
    let rq = (1.0 * 1.0 + 2.0 * 4.0 + 3.0 * 4.0) / 9.0;
    assert!((r[0] - c(rq)).norm() < 1e-14);

    let t = gen_tridiag(10, -1.0, 2.0, -1.0).unwrap();
    let lo = 2.0 - 2.0 * (std::f64::consts::PI / 11.0).cos();
    let hi = 2.0 + 2.0 * (std::f64::consts::PI / 11.0).cos();
    let r = arnoldi_ritz(&t, 4, &random_vec(&mut rng(9), 10, false)).unwrap();
    assert_eq!(r.len(), 4);
    for z in r {
        assert!(z.im.abs() < 1e-10);
        assert!(z.re > lo - 1e-12 && z.re < hi + 1e-12);
    }
}

#[test]
fn ritz_breakdown_returns_smaller_set() {
    let b = diag(&[1.0, 2.0, 3.0, 4.0]);
    let r = arnoldi_ritz(&b, 4, &cv(&[1.0, 1.0, 0.0, 0.0])).unwrap();
    assert_eq!(r.len(), 2);
}

/// Absolute slack for steps where both residuals sit at roundoff level
/// (`‖r₀‖ = 1`).
const ORACLE_FLOOR: f64 = 1e-14;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gmres_matches_krylov_oracle(seed in 0u64..10_000, n in 4usize..40, kind in 0u8..3) {
        let b = random_problem(seed, n, kind);
        let rhs = unit(random_vec(&mut rng(seed + 1), n, kind == 2));
        let t = gmres(&b, &Identity, &rhs, GmresOptions::new(1e-10)).unwrap();
        let r0 = DenseMatrix::from_columns(n, &[rhs]).unwrap();
        let oracle = krylov_ls_oracle(&b.to_dense(), &r0, t.iterations);
        for (k, (g, o)) in t.residual_norms.iter().zip(&oracle).enumerate() {
            prop_assert!((g - o).abs() <= 1e-8 * o + ORACLE_FLOOR, "k={} gmres={} oracle={}", k, g, o);
        }
        prop_assert!(t.residual_norms.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn arnoldi_relation(seed in 0u64..10_000, n in 4usize..30, m in 1usize..12) {
        let b = random_problem(seed, n, 2);
        let m = m.min(n);
        let f = arnoldi(&b, m, &random_vec(&mut rng(seed), n, true)).unwrap();
        let v = DenseMatrix::from_columns(n, &f.basis).unwrap();
        let v = &v;
        let h = &f.hessenberg;
        let k = f.steps;
        let bd = b.to_dense();
        let bv = DenseMatrix::from_fn(n, k, |i, j| bd.matvec(v.col(j))[i]);
        let vh = DenseMatrix::from_fn(n, k, |i, j| (0..h.nrows().min(v.ncols())).map(|l| v[(i, l)] * h[(l, j)]).sum());
        prop_assert!(dense_minus(&bv, &vh) <= 1e-10 * h.frobenius_norm());
        let g = v.adjoint().matmul(v);
        let eye = DenseMatrix::identity(g.nrows());
        prop_assert!(g.sub_matrix(&eye).max_abs() <= 1e-10);
    }

    #[test]
    fn block_residual_dominated_by_single(seed in 0u64..10_000, n in 4usize..32, u in 2usize..4) {
        let b = random_problem(seed, n, 1);
        let y = random_dense(&mut rng(seed + 7), n, u, false);
        let bd = b.to_dense();
        let k_max = n / u;
        let opts = GmresOptions::new(1e-12).max_it(k_max);
        let bt = block_gmres(&b, &Identity, &y, opts).unwrap();
        let block = krylov_column_residuals(&bd, &y, k_max);
        let fro = krylov_ls_oracle(&bd, &y, k_max);
        let scale = y.frobenius_norm();
        for (k, r) in bt.residual_fro_norms.iter().enumerate() {
            prop_assert!((r - fro[k]).abs() <= 1e-8 * scale, "k={} block={} oracle={}", k, r, fro[k]);
        }
        for l in 0..u {
            let col = y.col(l).to_vec();
            let s = gmres(&b, &Identity, &col, opts).unwrap();
            for k in 0..=s.iterations {
                prop_assert!(block[k][l] <= s.residual_norms[k] + 1e-10 * scale,
                    "col {} k={} block={} single={}", l, k, block[k][l], s.residual_norms[k]);
            }
        }
    }
}
