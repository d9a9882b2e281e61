mod common;

use approx::assert_relative_eq;
use common::*;
use invit_core::krylov::LinearOperator;
use invit_core::linalg::vector::{dot, norm2, sub};
use invit_core::linalg::*;
use invit_core::precond::*;
use invit_core::{Error, C64};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn sparse_dense_mul(a: &SparseMatrix, b: &SparseMatrix) -> DenseMatrix {
    a.to_dense().matmul(&b.to_dense())
}

#[test]
fn ilu_exact_on_tridiagonal() {
    let a = gen_tridiag(4, -1.0, 2.0, -1.0).unwrap();
    let f = ilu_factor(&a, 0.0).unwrap();
    let lu = sparse_dense_mul(f.l(), f.u());
    assert!(dense_minus(&a.to_dense(), &lu) <= 1e-12);
    for i in 0..4 {
        assert_eq!(f.l().get(i, i), c(1.0));
    }
}

#[test]
fn ilu_large_droptol_keeps_only_diagonal() {
    let a = SparseMatrix::from_dense(&dense(&[&[10.0, 1.0, 0.5], &[1.0, 8.0, 2.0], &[0.3, 1.0, 9.0]]));
    let f = ilu_factor(&a, 10.0).unwrap();
    assert_eq!(f.l().to_dense(), DenseMatrix::identity(3));
    assert_eq!(f.u().to_dense(), DenseMatrix::diag(&cv(&[10.0, 8.0, 9.0])));
}

#[test]
fn ilu_beats_jacobi_on_convdiff() {
    let (a, _) = gen_convdiff(8, Stencil::convection(0.1), Stencil::convection(0.05)).unwrap();
    let f = ilu_factor(&a, 1e-2).unwrap();
    let mut r = rng(11);
    for _ in 0..20 {
        let v = random_vec(&mut r, 64, false);
        let av = a.apply_vec(&v);
        let ilu = norm2(&sub(&v, &f.solve(&av))) / norm2(&v);
        let jac: Vec<C64> = av.iter().enumerate().map(|(i, x)| x / a.get(i, i)).collect();
        let jacobi = norm2(&sub(&v, &jac)) / norm2(&v);
        assert!(ilu < jacobi, "ilu {ilu} jacobi {jacobi}");
    }
}

#[test]
fn ilu_drop_rule_threshold() {
    let (a, _) = gen_convdiff(6, Stencil::convection(0.2), Stencil::laplacian()).unwrap();
    let theta = 1e-2;
    let f = ilu_factor(&a, theta).unwrap();
    for i in 0..a.nrows() {
        let row_norm = norm2(a.row(i).1);
        let (cols, vals) = f.u().row(i);
        for (j, v) in cols.iter().zip(vals) {
            if *j != i {
                assert!(v.norm() >= theta * row_norm);
            }
        }
    }
}

#[test]
fn ilu_errors() {
    let missing = SparseMatrix::from_dense(&dense(&[&[0.0, 1.0], &[1.0, 0.0]]));
    assert!(matches!(ilu_factor(&missing, 0.0), Err(Error::PivotBreakdown(0))));
    // exact elimination produces a zero pivot in row 1
    let sing = SparseMatrix::from_dense(&dense(&[&[1.0, 2.0], &[2.0, 4.0]]));
    assert!(matches!(ilu_factor(&sing, 0.0), Err(Error::PivotBreakdown(1))));
}

#[test]
fn ilu_apply_examples() {
    let f = ilu_factor(&SparseMatrix::identity(3), 0.0).unwrap();
    let v = cv(&[1.0, 2.0, 3.0]);
    assert_eq!(f.solve(&v), v);

    let a = gen_tridiag(6, -1.0, 3.0, -1.5).unwrap();
    let f = ilu_factor(&a, 0.0).unwrap();
    let w = cv(&[1.0, -1.0, 2.0, 0.5, 0.0, 3.0]);
    assert!(max_diff(&f.solve(&a.apply_vec(&w)), &w) <= 1e-12);

    let mut r = rng(2);
    let mut d = random_dense(&mut r, 5, 5, true);
    for i in 0..5 {
        d[(i, i)] += c(3.0);
    }
    let f = ilu_factor(&SparseMatrix::from_dense(&d), 0.0).unwrap();
    let lu = sparse_dense_mul(f.l(), f.u());
    let v = random_vec(&mut r, 5, true);
    assert!(norm2(&sub(&lu.matvec(&f.solve(&v)), &v)) <= 1e-12);
}

#[test]
fn tuned_examples() {
    let y = unit(cv(&[1.0, 2.0, -1.0]));
    let p = TunedPrecond::new(&Identity, &y, &y).unwrap();
    let v = cv(&[0.3, -2.0, 5.0]);
    assert!(max_diff(&p.apply_inverse(&v), &v) < 1e-15);

    let e1 = cv(&[1.0, 0.0]);
    let a = diag(&[2.0, 5.0]);
    let ctx = TuningContext { a: &a, mass: None, sigma: c(0.0), gamma: c(2.0) };
    let p = tuned_make(&Identity, &[e1.clone()], TuningTarget::Lambda, &ctx).unwrap();
    assert!(max_diff(&p.apply_inverse(&e1), &cv(&[0.5, 0.0])) < 1e-15);

    let (a, _) = gen_convdiff(4, Stencil::convection(0.2), Stencil::laplacian()).unwrap();
    let sigma = c(0.7);
    let b = a.shifted(sigma).unwrap();
    let lu = b.to_dense().lu().unwrap();
    let y = unit(random_vec(&mut rng(4), 16, false));
    let ctx = TuningContext { a: &a, mass: None, sigma, gamma: c(1.0) };
    let p = tuned_make(&lu, &[y.clone()], TuningTarget::B, &ctx).unwrap();
    assert!(max_diff(&p.apply_inverse(&b.apply_vec(&y)), &y) <= 1e-12);
}

#[test]
fn tuned_apply_maps_target_to_y() {
    let (a, _) = gen_convdiff(5, Stencil::convection(0.1), Stencil::laplacian()).unwrap();
    let f = ilu_factor(&a, 1e-1).unwrap();
    let y = unit(random_vec(&mut rng(8), 25, true));
    for target in [TuningTarget::Identity, TuningTarget::A, TuningTarget::B, TuningTarget::Lambda] {
        let ctx = TuningContext { a: &a, mass: None, sigma: c(0.3), gamma: c(0.9) };
        let p = tuned_make(&f, &[y.clone()], target, &ctx).unwrap();
        let t = match target {
            TuningTarget::Identity => y.clone(),
            TuningTarget::A => a.apply_vec(&y),
            TuningTarget::B => a.shifted(c(0.3)).unwrap().apply_vec(&y),
            TuningTarget::Lambda => y.iter().map(|v| v * 0.6).collect(),
        };
        let back = p.apply_inverse(&t);
        assert!(norm2(&sub(&back, &y)) <= 1e-12 * norm2(&y), "{target:?}");
    }
}

#[test]
fn tuned_singular_denominator() {
    let y = cv(&[1.0, 0.0]);
    assert!(matches!(TunedPrecond::new(&Identity, &y, &cv(&[0.0, 1.0])), Err(Error::TuningSingular(_))));
}

#[test]
fn cheb_nu_examples() {
    let nu = cheb_nu(1.0, 3.0, 0).unwrap();
    assert_relative_eq!(nu[0].re, 0.5, epsilon = 1e-15);

    let nu = cheb_nu(1.0, 3.0, 1).unwrap();
    let s2 = 2f64.sqrt();
    assert_relative_eq!(nu[0].re, 2.0 / (4.0 - s2), max_relative = 1e-14);
    assert_relative_eq!(nu[1].re, 2.0 / (4.0 + s2), max_relative = 1e-14);
    assert_relative_eq!(nu[0].re, 0.773460, epsilon = 1e-6);
    assert_relative_eq!(nu[1].re, 0.369398, epsilon = 1e-6);

    for d in [0, 3, 7] {
        assert!(cheb_nu(2.5, 2.5, d).unwrap().iter().all(|v| (v.re - 0.4).abs() < 1e-15));
    }
    assert!(matches!(cheb_nu(-1.0, 3.0, 2), Err(Error::IntervalNotGuarded { .. })));
    assert!(matches!(cheb_nu(0.0, 3.0, 2), Err(Error::IntervalNotGuarded { .. })));
}

#[test]
fn nu_to_mu_examples() {
    assert_eq!(nu_to_mu(&cv(&[0.5])), cv(&[0.5]));
    let nu = cheb_nu(1.0, 3.0, 1).unwrap();
    let mu = nu_to_mu(&nu);
    assert_relative_eq!(mu[0].re, 8.0 / 7.0, max_relative = 1e-14);
    assert_relative_eq!(mu[1].re, -2.0 / 7.0, max_relative = 1e-14);
    let mu = nu_to_mu(&cv(&[1.0, 1.0]));
    assert_eq!(mu, cv(&[2.0, -1.0]));
    let p = PolyPrecond::from_mu(mu).unwrap();
    assert!(p.residual(c(1.0)).norm() < 1e-15);
}

#[test]
fn interval_guard_examples() {
    assert_eq!(interval_guard(1.0, 3.0).unwrap(), (1.0, 3.0));
    let (a, b) = interval_guard(-0.1, 3.0).unwrap();
    assert_relative_eq!(a, 0.1);
    assert_relative_eq!(b, 3.2);
    assert!(matches!(interval_guard(-3.0, 3.0), Err(Error::StraddlesOrigin { .. })));
    let (a, b) = interval_guard(-3.0, 0.2).unwrap();
    assert_relative_eq!(a, -3.4);
    assert_relative_eq!(b, -0.2);
    assert_eq!(interval_guard(-3.0, -1.0).unwrap(), (-3.0, -1.0));
}

#[test]
fn contour_examples() {
    let p = c(2.0);
    let mu = contour_ls_mu(&[(p, p)], 0, false).unwrap();
    assert_relative_eq!(mu[0].re, 0.5, epsilon = 1e-14);
    assert!((c(1.0) - mu[0] * p).norm() < 1e-14);

    let mu = contour_ls_mu(&[(c(1.0), c(3.0))], 0, false).unwrap();
    // ∫₁³ z dz / ∫₁³ z² dz
    let oracle = (9.0 - 1.0) / 2.0 / ((27.0 - 1.0) / 3.0);
    assert_relative_eq!(mu[0].re, oracle, max_relative = 1e-13);
    assert_relative_eq!(mu[0].re, 6.0 / 13.0, max_relative = 1e-13);
}

#[test]
fn contour_degree_too_high() {
    let r = contour_ls_mu(&[(c(1.0), c(1.001))], 30, false);
    assert!(matches!(r, Err(Error::DegreeTooHigh(_))));
}

#[test]
fn poly_apply_examples() {
    let b = diag(&[2.0, 3.0]);
    let v = cv(&[1.0, 1.0]);
    assert_eq!(poly_apply_inverse(&b, &cv(&[1.0]), &v), v);
    assert_eq!(poly_apply_inverse(&b, &cv(&[0.0, 1.0]), &v), cv(&[2.0, 3.0]));

    let mu = cv(&[8.0 / 7.0, -2.0 / 7.0]);
    let b = diag(&[1.0, 3.0]);
    let pv = poly_apply_inverse(&b, &mu, &v);
    let p = |l: f64| 8.0 / 7.0 - 2.0 / 7.0 * l;
    assert!(max_diff(&pv, &cv(&[p(1.0), p(3.0)])) < 1e-15);
    // g(λ) = 1 − λp(λ) equioscillates at the interval ends
    let bp = b.apply_vec(&pv);
    assert!(max_diff(&bp, &cv(&[6.0 / 7.0, 6.0 / 7.0])) < 1e-14);
}

/// Gauss–Legendre rule on [−1, 1] by the Golub–Welsch eigenvalue method.
fn golub_welsch(n: usize) -> Vec<(f64, f64)> {
    let j = DMatrix::from_fn(n, n, |i, k| {
        let m = i.max(k) as f64;
        if i.abs_diff(k) == 1 {
            m / (4.0 * m * m - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let e = SymmetricEigen::new(j);
    (0..n).map(|i| (e.eigenvalues[i], 2.0 * e.eigenvectors[(0, i)].powi(2))).collect()
}

fn contour_objective(segments: &[(C64, C64)], mu: &[C64]) -> f64 {
    let rule = golub_welsch(48);
    let mut acc = 0.0;
    for &(p, q) in segments {
        let len = (q - p).norm();
        for &(x, w) in &rule {
            let z = p + (q - p) * ((x + 1.0) / 2.0);
            let pz = mu.iter().rev().fold(c(0.0), |s, m| s * z + m);
            acc += w * len / 2.0 * (c(1.0) - z * pz).norm_sqr();
        }
    }
    acc
}

fn perturbation_check(segments: &[(C64, C64)], d: usize, real: bool) {
    let mu = contour_ls_mu(segments, d, real).unwrap();
    let full: Vec<(C64, C64)> = if real {
        segments.iter().flat_map(|&(p, q)| [(p, q), (p.conj(), q.conj())]).collect()
    } else {
        segments.to_vec()
    };
    let j0 = contour_objective(&full, &mu);
    for h in 0..=d {
        for delta in [c(1e-6), c(-1e-6), C64::new(0.0, 1e-6), C64::new(0.0, -1e-6)] {
            let mut m = mu.clone();
            m[h] += delta;
            let j = contour_objective(&full, &m);
            assert!(j >= j0 * (1.0 - 1e-12), "h={h} δ={delta} j0={j0:e} j={j:e}");
        }
    }
}

#[test]
fn contour_ls_is_optimal() {
    perturbation_check(&[(c(1.0), c(3.0))], 4, false);
    let tri = [
        (C64::new(1.0, 0.0), C64::new(2.0, 1.5)),
        (C64::new(2.0, 1.5), C64::new(4.0, -0.5)),
        (C64::new(4.0, -0.5), C64::new(1.0, 0.0)),
    ];
    perturbation_check(&tri, 5, false);
    let upper = [
        (C64::new(1.0, 0.0), C64::new(2.0, 1.0)),
        (C64::new(2.0, 1.0), C64::new(5.0, 0.5)),
        (C64::new(5.0, 0.5), C64::new(5.0, 0.0)),
    ];
    perturbation_check(&upper, 6, true);
}

#[test]
fn ritz_contour_shapes() {
    let real = cv(&[1.0, 2.0, 4.0]);
    let segs = ritz_contour(&real, true).unwrap();
    assert_eq!(segs.len(), 1);
    let hull = ritz_contour(&[C64::new(1.0, 1.0), C64::new(1.0, -1.0), c(3.0)], true).unwrap();
    assert!(hull.iter().all(|(p, q)| p.im >= 0.0 && q.im >= 0.0));
    let straddle = ritz_contour(&[C64::new(-1.0, 1.0), C64::new(-1.0, -1.0), c(3.0)], true);
    assert!(matches!(straddle, Err(Error::StraddlesOrigin { .. })));
}

#[test]
fn chebyshev_damping_decreases_with_degree() {
    let (a, b) = (0.5, 6.0);
    let mut prev = f64::INFINITY;
    for d in [5, 10, 15] {
        let p = PolyPrecond::chebyshev(a, b, d).unwrap();
        let worst = (0..1000)
            .map(|i| a + (b - a) * i as f64 / 999.0)
            .map(|l| p.residual(c(l)).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1.0);
        assert!(worst < prev);
        prev = worst;
    }
}

#[test]
fn poly_from_ritz_preserves_eigenvectors() {
    let (a, basis) = gen_convdiff(8, Stencil::convection(0.1), Stencil::convection(0.05)).unwrap();
    let sigma = c(0.2);
    let b = a.shifted(sigma).unwrap();
    let basis = basis.with_shift(sigma);
    for scheme in [PolyScheme::Cheb, PolyScheme::Contour] {
        let p = PolyPrecond::from_ritz(&b, 10, scheme, true).unwrap();
        let bound = p.bind(&b);
        let lam = basis.shifted_eigenvalues();
        for j in (0..64).step_by(7) {
            let z = basis.z().col(j).to_vec();
            let lhs = b.apply_vec(&bound.apply_inverse(&z));
            let scale = lam[j] * p.eval(lam[j]);
            let rhs: Vec<C64> = z.iter().map(|v| v * scale).collect();
            let err = norm2(&sub(&lhs, &rhs));
            assert!(err <= 1e-10 * norm2(&z), "{scheme:?} j={j}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn root_expansion_identity(a in 0.1f64..5.0, w in 0.0f64..10.0, d in 0usize..16, seed in 0u64..1000) {
        let p = PolyPrecond::chebyshev(a, a + w, d).unwrap();
        let nu = p.nu().unwrap().to_vec();
        let mut r = rng(seed);
        for z in random_vec(&mut r, 20, true) {
            let z = z * (a + w);
            let prod = nu.iter().fold(c(1.0), |acc, v| acc * (c(1.0) - v * z));
            prop_assert!((prod - p.residual(z)).norm() <= 1e-12 * prod.norm().max(1.0));
            // expanded coefficients, up to the conditioning of evaluating them
            let expanded = p.mu().iter().enumerate().fold(c(1.0), |acc, (h, m)| acc - m * z.powi(h as i32 + 1));
            let cond = p.mu().iter().enumerate().fold(1.0, |acc, (h, m)| acc + m.norm() * z.norm().powi(h as i32 + 1));
            prop_assert!((prod - expanded).norm() <= 1e-13 * cond);
        }
    }

    #[test]
    fn sherman_morrison_dense(seed in 0u64..1000, n in 2usize..=20, target in 0u8..4) {
        let mut r = rng(seed);
        let g = random_dense(&mut r, n, n, false);
        // SPD base matrix
        let mut s = g.adjoint().matmul(&g);
        for i in 0..n {
            s[(i, i)] += c(n as f64);
        }
        let lu = s.lu().unwrap();
        let a = SparseMatrix::from_dense(&random_dense(&mut r, n, n, false));
        let y = unit(random_vec(&mut r, n, false));
        let target = [TuningTarget::Identity, TuningTarget::A, TuningTarget::B, TuningTarget::Lambda][target as usize];
        let ctx = TuningContext { a: &a, mass: None, sigma: c(0.25), gamma: c(1.5) };
        let p = match tuned_make(&lu, &[y.clone()], target, &ctx) {
            Ok(p) => p,
            Err(Error::TuningSingular(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let t = match target {
            TuningTarget::Identity => y.clone(),
            TuningTarget::A => a.apply_vec(&y),
            TuningTarget::B => a.shifted(c(0.25)).unwrap().apply_vec(&y),
            TuningTarget::Lambda => y.iter().map(|v| v * 1.25).collect(),
        };
        // Pᵢ = S + (t − S·y)yᴴ formed densely
        let sy = s.matvec(&y);
        let corr: Vec<C64> = t.iter().zip(&sy).map(|(a, b)| a - b).collect();
        let pi = DenseMatrix::from_fn(n, n, |i, j| s[(i, j)] + corr[i] * y[j].conj());
        let v = random_vec(&mut r, n, true);
        let back = pi.matvec(&p.apply_inverse(&v));
        let cond = pi.frobenius_norm() * norm2(&p.apply_inverse(&v)) / norm2(&v);
        prop_assert!(norm2(&sub(&back, &v)) <= 1e-10 * norm2(&v) * cond.max(1.0));
    }

    #[test]
    fn tuned_lambda_eigenrelation(seed in 0u64..1000, sigma in 0.05f64..0.5) {
        let (a, _) = gen_convdiff(6, Stencil::convection(0.1), Stencil::convection(0.05)).unwrap();
        let f = ilu_factor(&a, 1e-2).unwrap();
        let y = unit(random_vec(&mut rng(seed), 36, false));
        let gamma = dot(&y, &a.apply_vec(&y));
        let ctx = TuningContext { a: &a, mass: None, sigma: c(sigma), gamma };
        let p = tuned_make(&f, &[y.clone()], TuningTarget::Lambda, &ctx).unwrap();
        let b = a.shifted(c(sigma)).unwrap();
        let lhs = b.apply_vec(&p.apply_inverse(&y));
        let ay = a.apply_vec(&y);
        let lambda = gamma - sigma;
        let rhs: Vec<C64> = y.iter().zip(&ay).map(|(yi, ai)| yi + (ai - gamma * yi) / lambda).collect();
        prop_assert!(norm2(&sub(&lhs, &rhs)) <= 1e-12);
    }

    #[test]
    fn eigenvector_preservation(seed in 0u64..1000, d in 1usize..12) {
        let (a, basis) = gen_convdiff(6, Stencil::convection(0.1), Stencil::convection(0.2)).unwrap();
        let mut r = rng(seed);
        let mu = random_vec(&mut r, d + 1, true);
        let p = PolyPrecond::from_mu(mu).unwrap();
        let bound = p.bind(&a);
        for j in (0..36).step_by(5) {
            let z = basis.z().col(j).to_vec();
            let lam = basis.eigenvalues()[j];
            let lhs = a.apply_vec(&bound.apply_inverse(&z));
            let s = lam * p.eval(lam);
            let rhs: Vec<C64> = z.iter().map(|v| v * s).collect();
            let scale = p.mu().iter().map(|m| m.norm()).sum::<f64>() * 8f64.powi(d as i32 + 1);
            prop_assert!(norm2(&sub(&lhs, &rhs)) <= 1e-14 * scale.max(1.0));
        }
    }
}
