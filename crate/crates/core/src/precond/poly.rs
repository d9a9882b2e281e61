//! Residual-polynomial preconditioners `P⁻¹ = p(B)` with
//! `g(z) = 1 − z·p(z) = Π(1 − ν_h z)`.

use std::f64::consts::PI;

use crate::krylov::{arnoldi_ritz, LinearOperator};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::hessenberg::dense_eigenvalues;
use crate::{Error, Result, C64};

use super::Preconditioner;

/// Arnoldi steps used to estimate the spectrum of `B`.
pub const RITZ_STEPS: usize = 20;
const QUAD_NODES: usize = 32;
/// A Ritz value counts as complex when `|Im| > COMPLEX_TOL·|Re|`.
const COMPLEX_TOL: f64 = 1e-8;
/// Smallest admissible Cholesky pivot of the equilibrated Gram matrix,
/// in units of machine epsilon.
const GRAM_PIVOT_EPS: f64 = 4.0;
/// Accepted coefficient mismatch when recovering roots from `μ`.
const ROOT_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolyScheme {
    /// Chebyshev for (numerically) real spectra, contour otherwise.
    #[default]
    Auto,
    Cheb,
    Contour,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyPrecond {
    degree: usize,
    mu: Vec<C64>,
    nu: Option<Vec<C64>>,
    scheme: PolyScheme,
    interval: Option<(f64, f64)>,
    contour: Vec<(C64, C64)>,
    /// Roots `ν` in Leja order, used for application when available.
    leja: Vec<C64>,
}

impl PolyPrecond {
    /// From explicit coefficients `μ₀..μ_d`.
    pub fn from_mu(mu: Vec<C64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidArgument("polynomial needs at least one coefficient".into()));
        }
        Ok(Self {
            degree: mu.len() - 1,
            mu,
            nu: None,
            scheme: PolyScheme::Auto,
            interval: None,
            contour: Vec::new(),
            leja: Vec::new(),
        })
    }

    /// Reciprocal Chebyshev nodes on `[a, b]` (guarded first).
    pub fn chebyshev(a: f64, b: f64, d: usize) -> Result<Self> {
        let (a, b) = interval_guard(a, b)?;
        let nu = cheb_nu(a, b, d)?;
        Ok(Self {
            degree: d,
            mu: nu_to_mu(&nu),
            leja: leja_order(&nu),
            nu: Some(nu),
            scheme: PolyScheme::Cheb,
            interval: Some((a, b)),
            contour: Vec::new(),
        })
    }

    /// Least-squares residual polynomial on a piecewise linear contour.
    pub fn contour(segments: Vec<(C64, C64)>, d: usize, conjugate_symmetric: bool) -> Result<Self> {
        let mu = contour_ls_mu(&segments, d, conjugate_symmetric)?;
        let scale = segments
            .iter()
            .flat_map(|(p, q)| [p.norm(), q.norm()])
            .fold(0.0, f64::max);
        let leja = roots_from_mu(&mu, scale).map(|nu| leja_order(&nu)).unwrap_or_default();
        Ok(Self {
            degree: d,
            mu,
            nu: None,
            scheme: PolyScheme::Contour,
            interval: None,
            contour: segments,
            leja,
        })
    }

    /// Estimate the spectrum of `op` from `min(20, n)` Arnoldi steps started
    /// at `(1,…,1)/√n` and build the polynomial with `scheme`.
    pub fn from_ritz<O: LinearOperator + ?Sized>(
        op: &O,
        d: usize,
        scheme: PolyScheme,
        real_matrix: bool,
    ) -> Result<Self> {
        let n = op.dim();
        let seed = vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n];
        let ritz = arnoldi_ritz(op, RITZ_STEPS.min(n), &seed)?;
        Self::from_spectrum_estimate(&ritz, d, scheme, real_matrix)
    }

    /// Build from eigenvalue estimates.
    pub fn from_spectrum_estimate(
        ritz: &[C64],
        d: usize,
        scheme: PolyScheme,
        real_matrix: bool,
    ) -> Result<Self> {
        if ritz.is_empty() {
            return Err(Error::InvalidArgument("no spectrum estimates".into()));
        }
        let complex = ritz.iter().any(|z| z.im.abs() > COMPLEX_TOL * z.re.abs());
        let scheme = match scheme {
            PolyScheme::Auto if complex => PolyScheme::Contour,
            PolyScheme::Auto => PolyScheme::Cheb,
            s => s,
        };
        match scheme {
            PolyScheme::Contour => {
                let segs = ritz_contour(ritz, real_matrix)?;
                Self::contour(segs, d, real_matrix && complex)
            }
            _ => {
                let a = ritz.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
                let b = ritz.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
                Self::chebyshev(a, b, d)
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn mu(&self) -> &[C64] {
        &self.mu
    }

    pub fn nu(&self) -> Option<&[C64]> {
        self.nu.as_deref()
    }

    /// Scheme that produced the coefficients (`Auto` for explicit ones).
    pub fn scheme(&self) -> PolyScheme {
        self.scheme
    }

    /// Guarded Chebyshev interval.
    pub fn interval(&self) -> Option<(f64, f64)> {
        self.interval
    }

    pub fn contour_segments(&self) -> &[(C64, C64)] {
        &self.contour
    }

    /// `(p(z), g(z))`, through the roots when they are known.
    fn eval_pair(&self, z: C64) -> (C64, C64) {
        if self.leja.is_empty() {
            let p = self.mu.iter().rev().fold(C64::new(0.0, 0.0), |acc, m| acc * z + m);
            return (p, C64::new(1.0, 0.0) - z * p);
        }
        let mut x = C64::new(0.0, 0.0);
        let mut r = C64::new(1.0, 0.0);
        for nu in &self.leja {
            x += nu * r;
            r -= nu * z * r;
        }
        (x, r)
    }

    /// `p(z)`
    pub fn eval(&self, z: C64) -> C64 {
        self.eval_pair(z).0
    }

    /// `g(z) = 1 − z·p(z)`
    pub fn residual(&self, z: C64) -> C64 {
        self.eval_pair(z).1
    }

    /// `p(B)·v`. Uses the factored form `x ← x + ν_h r, r ← r − ν_h B r`
    /// over Leja-ordered roots when they are known (still `d` products with
    /// `B`), and Horner on `μ` otherwise.
    pub fn apply<O: LinearOperator + ?Sized>(&self, op: &O, v: &[C64]) -> Vec<C64> {
        if self.leja.is_empty() {
            return poly_apply_inverse(op, &self.mu, v);
        }
        let mut x = vec![C64::new(0.0, 0.0); v.len()];
        let mut r = v.to_vec();
        let mut br = vec![C64::new(0.0, 0.0); v.len()];
        let last = self.leja.len() - 1;
        for (h, nu) in self.leja.iter().enumerate() {
            for (xi, ri) in x.iter_mut().zip(&r) {
                *xi += nu * ri;
            }
            if h < last {
                op.apply(&r, &mut br);
                for (ri, bi) in r.iter_mut().zip(&br) {
                    *ri -= nu * bi;
                }
            }
        }
        x
    }

    /// Pair the coefficients with the operator `B` they are applied to.
    pub fn bind<'a>(&'a self, op: &'a (dyn LinearOperator + 'a)) -> BoundPoly<'a> {
        BoundPoly { poly: self, op }
    }
}

/// `p(B)` as a preconditioner.
pub struct BoundPoly<'a> {
    pub poly: &'a PolyPrecond,
    pub op: &'a (dyn LinearOperator + 'a),
}

impl Preconditioner for BoundPoly<'_> {
    fn apply_inverse(&self, v: &[C64]) -> Vec<C64> {
        self.poly.apply(self.op, v)
    }
}

/// Order roots `ν` so the zeros `1/ν` of `g` form a Leja sequence: start at
/// the zero of largest modulus, then repeatedly take the one maximizing the
/// product of distances to those already chosen. Keeps the partial products
/// of the factored form bounded.
fn leja_order(nu: &[C64]) -> Vec<C64> {
    let mut rest: Vec<C64> = nu.to_vec();
    let mut out = Vec::with_capacity(nu.len());
    let mut chosen: Vec<C64> = Vec::with_capacity(nu.len());
    while !rest.is_empty() {
        let score = |v: &C64| -> f64 {
            let x = v.inv();
            if chosen.is_empty() {
                x.norm()
            } else {
                chosen.iter().map(|c| (x - c).norm().max(f64::MIN_POSITIVE).ln()).sum()
            }
        };
        let mut best = 0;
        for i in 1..rest.len() {
            if score(&rest[i]) > score(&rest[best]) {
                best = i;
            }
        }
        let v = rest.swap_remove(best);
        chosen.push(v.inv());
        out.push(v);
    }
    out
}

/// Roots `ν` of `g(z) = 1 − Σ μ_h z^{h+1}` from the monic companion matrix of
/// `t^{d+1} g(1/t)` in the variable scaled by `scale`. `None` if any root is
/// zero or the roots do not reproduce `μ`.
fn roots_from_mu(mu: &[C64], scale: f64) -> Option<Vec<C64>> {
    let k = mu.len();
    if !(scale > 0.0) {
        return None;
    }
    // t^{k} − Σ_h c_h t^{k−1−h}, c_h = μ_h·scale^{h+1}
    let c: Vec<C64> = mu.iter().enumerate().map(|(h, m)| m * scale.powi(h as i32 + 1)).collect();
    let mut comp = DenseMatrix::zeros(k, k);
    for i in 1..k {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for (h, ch) in c.iter().enumerate() {
        // coefficient of t^{k−1−h}
        comp[(k - 1 - h, k - 1)] = *ch;
    }
    let roots = dense_eigenvalues(&comp).ok()?;
    if roots.iter().any(|r| r.norm() == 0.0) {
        return None;
    }
    let nu_scaled: Vec<C64> = roots;
    let back = nu_to_mu(&nu_scaled);
    let cmax = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let err = back.iter().zip(&c).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if err > ROOT_CHECK_TOL * cmax.max(1.0) {
        return None;
    }
    Some(nu_scaled.iter().map(|v| v / scale).collect())
}

/// Horner evaluation of `p(B)·v` with exactly `d` applications of `B`.
pub fn poly_apply_inverse<O: LinearOperator + ?Sized>(op: &O, mu: &[C64], v: &[C64]) -> Vec<C64> {
    assert!(!mu.is_empty(), "polynomial needs at least one coefficient");
    let d = mu.len() - 1;
    let mut r: Vec<C64> = v.iter().map(|x| mu[d] * x).collect();
    let mut tmp = vec![C64::new(0.0, 0.0); v.len()];
    for h in (0..d).rev() {
        op.apply(&r, &mut tmp);
        for ((ri, ti), vi) in r.iter_mut().zip(&tmp).zip(v) {
            *ri = ti + mu[h] * vi;
        }
    }
    r
}

/// `ν_h = 2/(b + a − (b − a)cos(π(2h−1)/(2(d+1))))`, `h = 1..d+1`.
pub fn cheb_nu(a: f64, b: f64, d: usize) -> Result<Vec<C64>> {
    if !(a <= b) || (a <= 0.0 && b >= 0.0) {
        return Err(Error::IntervalNotGuarded { a, b });
    }
    Ok((1..=d + 1)
        .map(|h| {
            let phi = (2 * h - 1) as f64 / (2 * (d + 1)) as f64;
            C64::new(2.0 / (b + a - (b - a) * (PI * phi).cos()), 0.0)
        })
        .collect())
}

/// Expand `g(z) = Π(1 − ν_h z) = 1 − Σ μ_{h−1} z^h` and return `μ`.
pub fn nu_to_mu(nu: &[C64]) -> Vec<C64> {
    let mut g = vec![C64::new(1.0, 0.0)];
    for &v in nu {
        g.push(C64::new(0.0, 0.0));
        for h in (1..g.len()).rev() {
            let prev = g[h - 1];
            g[h] -= v * prev;
        }
    }
    g[1..].iter().map(|c| -c).collect()
}

/// Move an interval with a slightly misplaced endpoint onto one side of the
/// origin; `b ← b − 2a, a ← −a` when `a < 0 < b` and `|a| ≤ 0.1·b`, and the
/// mirrored rule for mostly negative intervals.
pub fn interval_guard(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a <= b) || (a == 0.0 && b == 0.0) {
        return Err(Error::InvalidArgument(format!("invalid interval [{a}, {b}]")));
    }
    if (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0) {
        return Ok((a, b));
    }
    if b > 0.0 && a.abs() <= 0.1 * b {
        Ok((-a, b - 2.0 * a))
    } else if a < 0.0 && b.abs() <= 0.1 * a.abs() {
        Ok((a - 2.0 * b, -b))
    } else {
        Err(Error::StraddlesOrigin { a, b })
    }
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Quadrature nodes and weights on the contour, normalized so the weights
/// sum to one. A contour of zero length becomes equally weighted points.
fn contour_quadrature(segments: &[(C64, C64)]) -> (Vec<C64>, Vec<f64>) {
    let total: f64 = segments.iter().map(|(p, q)| (q - p).norm()).sum();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    if total == 0.0 {
        let mut pts: Vec<C64> = Vec::new();
        for &(p, _) in segments {
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let w = 1.0 / pts.len() as f64;
        return (pts.clone(), vec![w; pts.len()]);
    }
    let (x, w) = gauss_legendre(QUAD_NODES);
    for &(p, q) in segments {
        let len = (q - p).norm();
        if len == 0.0 {
            continue;
        }
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(p + (q - p) * ((xi + 1.0) * 0.5));
            weights.push(wi * 0.5 * len / total);
        }
    }
    (nodes, weights)
}

/// Minimize `‖1 − z·p(z)‖²` in the contour inner product
/// `⟨f,g⟩ = (1/L)∫ f ḡ |dz|`. With `conjugate_symmetric` the segments are the
/// upper half of a contour symmetric about the real axis, and only the real
/// part of the Gram system is kept.
pub fn contour_ls_mu(segments: &[(C64, C64)], d: usize, conjugate_symmetric: bool) -> Result<Vec<C64>> {
    if segments.is_empty() {
        return Err(Error::InvalidArgument("contour has no segments".into()));
    }
    let (nodes, weights) = contour_quadrature(segments);
    if nodes.iter().any(|z| z.norm() == 0.0) && segments.iter().all(|(p, q)| p == q) {
        return Err(Error::InvalidArgument("contour point at the origin".into()));
    }
    let scale = nodes.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let k = d + 1;
    // powers ζ^h, h = 1..d+1, of the rescaled nodes ζ = z/scale
    let mut pw = vec![vec![C64::new(0.0, 0.0); nodes.len()]; k];
    for (q, z) in nodes.iter().enumerate() {
        let zeta = z / scale;
        let mut p = zeta;
        for row in pw.iter_mut() {
            row[q] = p;
            p *= zeta;
        }
    }
    let mut gram = DenseMatrix::zeros(k, k);
    let mut rhs = vec![C64::new(0.0, 0.0); k];
    for h in 0..k {
        for j in 0..k {
            gram[(h, j)] = (0..nodes.len())
                .map(|q| pw[j][q] * pw[h][q].conj() * weights[q])
                .sum();
        }
        rhs[h] = (0..nodes.len()).map(|q| pw[h][q].conj() * weights[q]).sum();
    }
    if conjugate_symmetric {
        for v in gram.as_mut_slice().iter_mut().chain(rhs.iter_mut()) {
            *v = C64::new(v.re, 0.0);
        }
    }
    let c = hermitian_solve(&gram, &rhs).ok_or(Error::DegreeTooHigh(d))?;
    Ok(c.iter()
        .enumerate()
        .map(|(h, ch)| ch / scale.powi(h as i32 + 1))
        .collect())
}

/// Cholesky solve of the diagonally equilibrated system; `None` when it is
/// numerically singular.
fn hermitian_solve(g: &DenseMatrix, b: &[C64]) -> Option<Vec<C64>> {
    let k = b.len();
    let dscale: Vec<f64> = (0..k).map(|i| g[(i, i)].re.sqrt()).collect();
    if dscale.iter().any(|d| !(*d > 0.0)) {
        return None;
    }
    let mut l = DenseMatrix::from_fn(k, k, |i, j| g[(i, j)] / (dscale[i] * dscale[j]));
    for j in 0..k {
        let mut djj = l[(j, j)].re;
        for p in 0..j {
            djj -= l[(j, p)].norm_sqr();
        }
        if !(djj > GRAM_PIVOT_EPS * f64::EPSILON * k as f64) {
            return None;
        }
        let djj = djj.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..k {
            let mut s = l[(i, j)];
            for p in 0..j {
                s -= l[(i, p)] * l[(j, p)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    let mut y: Vec<C64> = (0..k).map(|i| b[i] / dscale[i]).collect();
    for i in 0..k {
        for p in 0..i {
            let t = l[(i, p)] * y[p];
            y[i] -= t;
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..k).rev() {
        for p in i + 1..k {
            let t = l[(p, i)].conj() * y[p];
            y[i] -= t;
        }
        y[i] /= l[(i, i)];
    }
    Some(y.iter().zip(&dscale).map(|(v, d)| v / d).collect())
}

fn cross(o: C64, a: C64, b: C64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Counter-clockwise convex hull (monotone chain).
fn convex_hull(points: &[C64]) -> Vec<C64> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<C64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &C64>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Piecewise linear contour around eigenvalue estimates: the real interval
/// they span when all are real, otherwise their convex hull. For real
/// matrices only the part of the hull with `Im ≥ 0` is returned.
pub fn ritz_contour(ritz: &[C64], real_matrix: bool) -> Result<Vec<(C64, C64)>> {
    let complex = ritz.iter().any(|z| z.im.abs() > COMPLEX_TOL * z.re.abs());
    if !complex {
        let a = ritz.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let b = ritz.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let (a, b) = interval_guard(a, b)?;
        return Ok(vec![(C64::new(a, 0.0), C64::new(b, 0.0))]);
    }
    let mut pts = ritz.to_vec();
    if real_matrix {
        pts.extend(ritz.iter().map(|z| z.conj()));
    }
    let hull = convex_hull(&pts);
    let m = hull.len();
    let zero = C64::new(0.0, 0.0);
    if m >= 3 && (0..m).all(|i| cross(hull[i], hull[(i + 1) % m], zero) >= 0.0) {
        let a = pts.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let b = pts.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::StraddlesOrigin { a, b });
    }
    let mut segs = Vec::with_capacity(m);
    for i in 0..m {
        let (p, q) = (hull[i], hull[(i + 1) % m]);
        if !real_matrix {
            segs.push((p, q));
            continue;
        }
        match (p.im >= 0.0, q.im >= 0.0) {
            (true, true) => segs.push((p, q)),
            (false, false) => {}
            (pin, _) => {
                let t = p.im / (p.im - q.im);
                let x = p + (q - p) * t;
                let x = C64::new(x.re, 0.0);
                segs.push(if pin { (p, x) } else { (x, q) });
            }
        }
    }
    segs.retain(|(p, q)| p != q);
    Ok(segs)
}
