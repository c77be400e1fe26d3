//! The radial Gelfand problem `-Δu = λ f(u)` in the unit ball with `u = 0`
//! on the boundary: shooting from the centre value `M = u(0)`, the branch
//! `M ↦ λ(M)` with its turning point `λ*`, the linearized spectrum along the
//! branch, the singular solution `-2 log r`, and stability test functions.

use std::fmt::Write as _;

use num_rational::Ratio;

use crate::error::{domain, Error, Result};
use crate::numerics::{
    gauss3, lit, radial_operator, rk_integrate_until, smallest_eigenvalue, sphere_area, EigenOptions, InnerBoundary,
    Mesh1D, Outcome, Real, StepControl,
};

/// Positive, nondecreasing, superlinear nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity<T> {
    /// `e^u`
    Exponential,
    /// `(1 + u)^p` with `p > 1`.
    Power(T),
}

impl<T: Real> Nonlinearity<T> {
    pub fn power(p: T) -> Result<Self> {
        if !(p > T::one()) {
            return Err(domain("power nonlinearity needs p > 1"));
        }
        Ok(Nonlinearity::Power(p))
    }

    pub fn f(&self, u: T) -> T {
        match *self {
            Nonlinearity::Exponential => u.exp(),
            Nonlinearity::Power(p) => (T::one() + u).max(T::zero()).powf(p),
        }
    }

    pub fn df(&self, u: T) -> T {
        match *self {
            Nonlinearity::Exponential => u.exp(),
            Nonlinearity::Power(p) => p * (T::one() + u).max(T::zero()).powf(p - T::one()),
        }
    }

    /// Primitive vanishing at 0.
    pub fn primitive(&self, u: T) -> T {
        match *self {
            Nonlinearity::Exponential => u.exp_m1(),
            Nonlinearity::Power(p) => {
                let q = p + T::one();
                ((T::one() + u).max(T::zero()).powf(q) - T::one()) / q
            }
        }
    }
}

/// How a shot ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShotEnd<T> {
    /// Reached `r = 1` with `u > 0` before.
    Boundary,
    /// `u` vanished at this radius before `r = 1`.
    Crossed(T),
    /// The state stopped being finite at this radius.
    BlowUp(T),
}

/// A radial solution candidate `u(r)` from a single shot.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile<T> {
    pub n: usize,
    pub lambda: T,
    pub nonlinearity: Nonlinearity<T>,
    /// Radii, starting at 0. Between nodes the profile is the cubic Hermite
    /// interpolant of `(u, u_r)`.
    pub nodes: Vec<T>,
    pub u: Vec<T>,
    pub ur: Vec<T>,
    pub end: ShotEnd<T>,
    /// Largest per-step defect of `(r^{n-1} u')' + λ r^{n-1} f(u) = 0` in
    /// integrated form, in units of `u'` relative to `1 + |u'|`.
    pub residual: T,
}

impl<T: Real> RadialProfile<T> {
    pub fn center(&self) -> T {
        self.u[0]
    }

    pub fn last_radius(&self) -> T {
        self.nodes[self.nodes.len() - 1]
    }

    /// `u` at the last node; `u(1)` when the shot reached the boundary.
    pub fn u_end(&self) -> T {
        self.u[self.u.len() - 1]
    }

    /// The shot reached `r = 1` without crossing zero first.
    pub fn reached_boundary(&self) -> bool {
        matches!(self.end, ShotEnd::Boundary)
    }

    /// `λ` too large for this centre value: `u` vanished or blew up inside.
    pub fn supercritical(&self) -> bool {
        !self.reached_boundary() || self.u_end() <= T::zero()
    }

    fn cell(&self, r: T) -> usize {
        let n = self.nodes.len();
        match self.nodes.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// `(u, u_r)` at `r` inside the shot range.
    pub fn eval(&self, r: T) -> (T, T) {
        let k = self.cell(r);
        hermite(self.nodes[k], self.nodes[k + 1], (self.u[k], self.ur[k]), (self.u[k + 1], self.ur[k + 1]), r)
    }

    /// `u_rr` from the equation itself.
    pub fn urr(&self, r: T, u: T, ur: T) -> T {
        let lf = self.lambda * self.nonlinearity.f(u);
        if r > T::zero() {
            -lit::<T>(self.n as f64 - 1.0) * ur / r - lf
        } else {
            -lf / lit(self.n as f64)
        }
    }

    /// `max |u(r) + 2 log r|` on `samples` equally spaced points of `[a, b]`.
    pub fn distance_to_singular(&self, a: T, b: T, samples: usize) -> T {
        let samples = samples.max(2);
        (0..samples)
            .map(|k| {
                let r = a + (b - a) * lit(k as f64 / (samples - 1) as f64);
                (self.eval(r).0 + lit::<T>(2.0) * r.ln()).abs()
            })
            .fold(T::zero(), |m, d| m.max(d))
    }
}

fn hermite<T: Real>(a: T, b: T, (ua, va): (T, T), (ub, vb): (T, T), r: T) -> (T, T) {
    let h = b - a;
    let s = (r - a) / h;
    let (one, two, three) = (T::one(), lit::<T>(2.0), lit::<T>(3.0));
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = two * s3 - three * s2 + one;
    let h10 = s3 - two * s2 + s;
    let h01 = three * s2 - two * s3;
    let h11 = s3 - s2;
    let u = h00 * ua + h10 * h * va + h01 * ub + h11 * h * vb;
    let six = lit::<T>(6.0);
    let d00 = (six * s2 - six * s) / h;
    let d10 = three * s2 - lit::<T>(4.0) * s + one;
    let d01 = -d00;
    let d11 = three * s2 - two * s;
    let v = d00 * ua + d10 * va + d01 * ub + d11 * vb;
    (u, v)
}

/// Integrator settings for [`shoot_radial_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotOptions<T> {
    pub tol: T,
    /// Launch radius cap; the actual launch is also kept below 1% of the
    /// core length `(λ f(M))^{-1/2}`.
    pub r0: T,
    pub h_max: T,
}

impl<T: Real> Default for ShotOptions<T> {
    fn default() -> Self {
        Self { tol: lit(1e-10), r0: lit(1e-6), h_max: lit(5e-3) }
    }
}

/// Shoots `u'' + (n-1)u'/r + λ f(u) = 0`, `u(0) = M`, `u'(0) = 0` to `r = 1`.
pub fn shoot_radial<T: Real>(n: usize, f: Nonlinearity<T>, lambda: T, m: T) -> Result<RadialProfile<T>> {
    shoot_radial_with(n, f, lambda, m, ShotOptions::default())
}

pub fn shoot_radial_with<T: Real>(
    n: usize,
    f: Nonlinearity<T>,
    lambda: T,
    m: T,
    opts: ShotOptions<T>,
) -> Result<RadialProfile<T>> {
    if n < 1 {
        return Err(domain("dimension must be positive"));
    }
    if !(m >= T::zero()) || !m.is_finite() {
        return Err(domain("centre value must be finite and nonnegative"));
    }
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(domain("λ must be finite and nonnegative"));
    }
    let nd = lit::<T>(n as f64);
    let nm1 = lit::<T>(n as f64 - 1.0);
    let force = lambda * f.f(m);
    let core = if force > T::zero() { force.sqrt().recip() } else { T::one() };
    let r0 = opts.r0.min(core * lit(1e-2));
    // u = M - λf(M) r²/(2n) + O(r⁴)
    let u0 = m - force * r0 * r0 / (lit::<T>(2.0) * nd);
    let v0 = -force * r0 / nd;
    let rhs = |r: T, y: &[T], dy: &mut [T]| {
        dy[0] = y[1];
        dy[1] = -nm1 * y[1] / r - lambda * f.f(y[0]);
    };
    let control = StepControl::Adaptive {
        tol: opts.tol,
        h_init: r0,
        h_min: r0 * lit(1e-8),
        h_max: opts.h_max,
        max_steps: 2_000_000,
    };
    let traj = rk_integrate_until(rhs, &[u0, v0], (r0, T::one()), control, |_, y| y[0] < T::zero())?;
    let mut nodes = vec![T::zero()];
    let mut u = vec![m];
    let mut ur = vec![T::zero()];
    for (r, y) in traj.ts.iter().zip(&traj.ys) {
        nodes.push(*r);
        u.push(y[0]);
        ur.push(y[1]);
    }
    let end = match traj.outcome {
        Outcome::Completed => ShotEnd::Boundary,
        Outcome::Stopped => {
            // Locate the zero inside the last step by the Hermite interpolant.
            let k = nodes.len() - 2;
            let (mut lo, mut hi) = (nodes[k], nodes[k + 1]);
            for _ in 0..60 {
                let mid = lit::<T>(0.5) * (lo + hi);
                let (val, _) = hermite(nodes[k], nodes[k + 1], (u[k], ur[k]), (u[k + 1], ur[k + 1]), mid);
                if val > T::zero() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            ShotEnd::Crossed(lit::<T>(0.5) * (lo + hi))
        }
        Outcome::StepUnderflow => ShotEnd::BlowUp(traj.last_t()),
        Outcome::StepLimit => {
            return Err(Error::Integration {
                t: traj.last_t().to_f64().unwrap_or(f64::NAN),
                state: traj.last_y().iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
                reason: "step limit reached".into(),
            })
        }
    };
    let mut profile = RadialProfile { n, lambda, nonlinearity: f, nodes, u, ur, end, residual: T::zero() };
    profile.residual = ode_defect(&profile);
    Ok(profile)
}

fn ode_defect<T: Real>(p: &RadialProfile<T>) -> T {
    let (gx, gw) = gauss3::<T>();
    let half = lit::<T>(0.5);
    let k = p.n as i32 - 1;
    let mut worst = T::zero();
    // The first cell is the series launch, not an integration step.
    for c in 1..p.nodes.len() - 1 {
        let (a, b) = (p.nodes[c], p.nodes[c + 1]);
        // r^{n-1} is far from a low-degree polynomial on the first cells.
        let sub = 8;
        let w = (b - a) / lit(sub as f64);
        let mut source = T::zero();
        for j in 0..sub {
            let mid = a + w * (lit::<T>(j as f64) + half);
            for q in 0..3 {
                let r = mid + gx[q] * half * w;
                let (u, _) = p.eval(r);
                source += gw[q] * half * w * r.powi(k) * p.nonlinearity.f(u);
            }
        }
        let flux = b.powi(k) * p.ur[c + 1] - a.powi(k) * p.ur[c];
        let d = ((flux + p.lambda * source) / (b.powi(k) * (T::one() + p.ur[c + 1].abs()))).abs();
        if d.is_finite() {
            worst = worst.max(d);
        }
    }
    worst
}

/// `λ(M)` by bracket expansion and bisection on the sign of `u(1)`.
///
/// Returns the largest bracketed `λ` with `u(1) >= 0` together with its
/// profile; `None` if no sign change was found below `lambda_cap`.
pub fn solve_lambda<T: Real>(
    n: usize,
    f: Nonlinearity<T>,
    m: T,
    root_tol: T,
    lambda_cap: T,
) -> Result<Option<RadialProfile<T>>> {
    let mut lo = T::zero();
    let mut lo_shot = shoot_radial(n, f, lo, m)?;
    if m == T::zero() {
        return Ok(Some(lo_shot));
    }
    let mut hi = T::one();
    loop {
        let shot = shoot_radial(n, f, hi, m)?;
        if shot.supercritical() {
            break;
        }
        lo = hi;
        lo_shot = shot;
        hi *= lit(2.0);
        if hi > lambda_cap {
            return Ok(None);
        }
    }
    while hi - lo > root_tol * hi.max(T::one()) {
        let mid = lit::<T>(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let shot = shoot_radial(n, f, mid, m)?;
        if shot.supercritical() {
            hi = mid;
        } else {
            lo = mid;
            lo_shot = shot;
        }
    }
    Ok(Some(lo_shot))
}

/// Graded mesh on `[0, 1]` resolving a profile with core length `core`.
pub fn profile_mesh<T: Real>(core: T, h_max: T, growth: T) -> Result<Mesh1D<T>> {
    let core = core.min(T::one());
    let h0 = (core / lit(20.0)).min(h_max);
    let mut nodes = vec![T::zero()];
    let mut r = T::zero();
    let mut h = h0;
    while r + h < T::one() {
        r += h;
        nodes.push(r);
        if r > core {
            h = (h * growth).min(h_max);
        }
    }
    if T::one() - r < lit::<T>(0.5) * h {
        nodes.pop();
    }
    nodes.push(T::one());
    Mesh1D::new(nodes)
}

fn core_length<T: Real>(p: &RadialProfile<T>) -> T {
    let force = p.lambda * p.nonlinearity.df(p.center());
    if force > T::zero() {
        force.sqrt().recip()
    } else {
        T::one()
    }
}

/// Smallest Dirichlet eigenvalue of `-Δ - λ f'(u)` on radial functions in
/// the unit ball.
pub fn linearized_first_eigenvalue<T: Real>(profile: &RadialProfile<T>) -> Result<T> {
    if !profile.reached_boundary() {
        return Err(domain("profile does not reach r = 1"));
    }
    // Near-critical potentials ~ c/r² need a fine log-scale grading.
    let mesh = profile_mesh(core_length(profile), lit(1e-3), lit(1.004))?;
    let pot: Vec<T> =
        mesh.nodes().iter().map(|&r| -profile.lambda * profile.nonlinearity.df(profile.eval(r).0)).collect();
    let op = radial_operator(&mesh, profile.n, &pot, InnerBoundary::Regular)?;
    let a = &op.matrix;
    let pair = smallest_eigenvalue(a, EigenOptions::new(op.natural_tolerance(lit(1e-12)), 2000))?;
    // The residual bounds the distance to the spectrum; the inertia count
    // then pins the smallest eigenvalue inside that window.
    let w = pair.residual.max(lit(1e-12)) * lit(2.0);
    let (mut lo, mut hi) = (pair.value - w, pair.value + w);
    if a.count_below(lo) != 0 || a.count_below(hi) == 0 {
        return Ok(pair.value);
    }
    for _ in 0..200 {
        let mid = lit::<T>(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if a.count_below(mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lit::<T>(0.5) * (lo + hi))
}

/// One point of the branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchRecord<T> {
    pub m: T,
    pub lambda: T,
    pub sup_norm: T,
    pub mu1: T,
    pub u_at_one: T,
    pub residual: T,
    /// `M` at or below the maximizer of `λ`.
    pub minimal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T> {
    pub n: usize,
    pub nonlinearity: Nonlinearity<T>,
    pub records: Vec<BranchRecord<T>>,
    pub skipped: Vec<(T, String)>,
    /// Maximum of `λ(M)` after the refinement pass.
    pub lambda_star: T,
    pub m_star: T,
    /// Maximum over the input grid only.
    pub lambda_star_grid: T,
    /// `(4 P_{h/2} - P_h)/3`, where `P_h` is the peak of the parabola through
    /// the grid maximizer and its neighbours and `P_{h/2}` the same with the
    /// neighbours moved halfway in.
    pub lambda_star_richardson: T,
    /// The maximum sits at the last grid point, so `λ*` is a lower bound.
    pub maximizer_at_end: bool,
}

/// Settings for [`branch_continuation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchOptions<T> {
    pub root_tol: T,
    pub lambda_cap: T,
    /// Stopping width in `M` of the golden-section refinement.
    pub refine_tol: T,
}

impl<T: Real> BranchOptions<T> {
    pub fn new(root_tol: T) -> Self {
        Self { root_tol, lambda_cap: lit(1e6), refine_tol: lit(1e-6) }
    }
}

/// Computes `λ(M)` on an increasing grid of centre values.
pub fn branch_continuation<T: Real>(
    n: usize,
    f: Nonlinearity<T>,
    grid: &[T],
    opts: BranchOptions<T>,
) -> Result<Branch<T>> {
    if grid.is_empty() {
        return Err(domain("empty M grid"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("M grid must be strictly increasing"));
    }
    let lam =
        |m: T| -> Result<Option<T>> { Ok(solve_lambda(n, f, m, opts.root_tol, opts.lambda_cap)?.map(|p| p.lambda)) };
    let mut solved = Vec::new();
    let mut skipped = Vec::new();
    for &m in grid {
        match solve_lambda(n, f, m, opts.root_tol, opts.lambda_cap)? {
            Some(p) => solved.push((m, p)),
            None => skipped.push((m, format!("no sign change of u(1) for λ up to {}", opts.lambda_cap))),
        }
    }
    if solved.is_empty() {
        return Err(domain("no grid point produced a solution"));
    }
    let lambda_grid = solved.iter().fold(-T::one(), |m, (_, p)| m.max(p.lambda));
    // On a plateau (λ(M) saturating within the root tolerance) take the
    // largest M, so the maximizer is reported at the grid end.
    let plateau = lambda_grid - lit::<T>(10.0) * opts.root_tol * lambda_grid.max(T::one());
    let k = solved.iter().rposition(|(_, p)| p.lambda >= plateau).unwrap_or(0);
    let at_end = k + 1 == solved.len();
    let (mut lambda_star, mut m_star) = (lambda_grid, solved[k].0);
    let mut richardson = lambda_grid;
    if k > 0 && !at_end {
        let (a, mk, b) = (solved[k - 1].0, solved[k].0, solved[k + 1].0);
        let lk = solved[k].1.lambda;
        let coarse = parabola_peak([(a, solved[k - 1].1.lambda), (mk, lk), (b, solved[k + 1].1.lambda)]);
        let (fa, fb) = (lit::<T>(0.5) * (a + mk), lit::<T>(0.5) * (mk + b));
        if let (Some(la), Some(lb)) = (lam(fa)?, lam(fb)?) {
            let fine = parabola_peak([(fa, la), (mk, lk), (fb, lb)]);
            if let (Some(c), Some(f)) = (coarse, fine) {
                richardson = (lit::<T>(4.0) * f - c) / lit(3.0);
            }
        }
        let (ms, ls) = golden_max(&lam, a, b, opts.refine_tol)?;
        if ls > lambda_star {
            lambda_star = ls;
            m_star = ms;
        }
    }
    let mut records = Vec::with_capacity(solved.len());
    for (m, p) in &solved {
        let mu1 = if p.reached_boundary() { linearized_first_eigenvalue(p)? } else { T::nan() };
        records.push(BranchRecord {
            m: *m,
            lambda: p.lambda,
            sup_norm: p.u.iter().fold(T::zero(), |a, &b| a.max(b.abs())),
            mu1,
            u_at_one: p.u_end(),
            residual: p.residual,
            minimal: *m <= m_star,
        });
    }
    Ok(Branch {
        n,
        nonlinearity: f,
        records,
        skipped,
        lambda_star,
        m_star,
        lambda_star_grid: lambda_grid,
        lambda_star_richardson: richardson,
        maximizer_at_end: at_end,
    })
}

fn parabola_peak<T: Real>(p: [(T, T); 3]) -> Option<T> {
    let [(x0, y0), (x1, y1), (x2, y2)] = p;
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = ((y2 - y1) / (x2 - x1) - d1) / (x2 - x0);
    if !(d2 < T::zero()) {
        return None;
    }
    let half = lit::<T>(0.5);
    let x = half * (x0 + x1) - d1 / (lit::<T>(2.0) * d2);
    Some(y0 + d1 * (x - x0) + d2 * (x - x0) * (x - x1))
}

fn golden_max<T: Real, F>(g: &F, mut a: T, mut b: T, tol: T) -> Result<(T, T)>
where
    F: Fn(T) -> Result<Option<T>>,
{
    let eval = |m: T| -> Result<T> { Ok(g(m)?.unwrap_or(-T::infinity())) };
    let ratio = (lit::<T>(5.0).sqrt() - T::one()) / lit(2.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (eval(x1)?, eval(x2)?);
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = eval(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

impl<T: Real> Branch<T> {
    /// `M,lambda,sup_norm,mu1` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("M,lambda,sup_norm,mu1\n");
        for r in &self.records {
            let [m, l, u, mu] = [r.m, r.lambda, r.sup_norm, r.mu1].map(crate::numerics::to_f64);
            let _ = writeln!(s, "{m:.16e},{l:.16e},{u:.16e},{mu:.16e}");
        }
        s
    }
}

/// The singular solution `-2 log r` of `-Δu = 2(n-2) e^u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularCheck {
    pub n: usize,
    /// Coefficient of `r^{-2}` in `-Δ(-2 log r) - 2(n-2) r^{-2}`, exactly.
    pub symbolic_residual: Ratio<i64>,
    /// `(r, residual)` by fourth-order differences, scaled by `r²`.
    pub fd_residuals: Vec<(f64, f64)>,
    /// `(n-2)²/4 - 2(n-2)`: the Hardy constant minus the potential
    /// coefficient of the linearized operator.
    pub margin: Ratio<i64>,
}

impl SingularCheck {
    pub fn stable(&self) -> bool {
        self.margin >= Ratio::from_integer(0)
    }
}

pub fn singular_solution_check(n: usize) -> Result<SingularCheck> {
    if n < 3 {
        return Err(domain("singular solution check needs n >= 3"));
    }
    let k = n as i64 - 2;
    // -Δ(-2 log r) = 2(n-2)/r² and 2(n-2)e^{-2 log r} = 2(n-2)/r².
    let laplacian_coeff = Ratio::from_integer(2 * k);
    let source_coeff = Ratio::from_integer(2 * k);
    let symbolic_residual = laplacian_coeff - source_coeff;
    let margin = Ratio::new(k * k, 4) - Ratio::from_integer(2 * k);
    let nm1 = (n - 1) as f64;
    let c = 2.0 * k as f64;
    let fd_residuals = [0.1, 0.5, 0.9]
        .iter()
        .map(|&r: &f64| {
            // Fourth-order stencils; h balances truncation against rounding.
            let h = 2e-3 * r;
            let u = |x: f64| -2.0 * x.ln();
            let (um2, um1, u0, up1, up2) = (u(r - 2.0 * h), u(r - h), u(r), u(r + h), u(r + 2.0 * h));
            let d2 = (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) / (12.0 * h * h);
            let d1 = (um2 - 8.0 * um1 + 8.0 * up1 - up2) / (12.0 * h);
            let res = -(d2 + nm1 * d1 / r) - c * u0.exp();
            (r, res * r * r)
        })
        .collect();
    Ok(SingularCheck { n, symbolic_residual, fd_residuals, margin })
}

/// Both sides of `λ ∫ f'(u) ξ² ≤ ∫ |∇ξ|²` over the unit ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilitySides<T> {
    pub lhs: T,
    pub rhs: T,
}

impl<T: Real> StabilitySides<T> {
    pub fn slack(&self) -> T {
        self.rhs - self.lhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunctionReport<T> {
    pub lambda: T,
    pub alpha_exp: T,
    pub alpha_radial: T,
    /// `ξ = e^{αu} - 1`
    pub exponential: StabilitySides<T>,
    /// `ξ = u_r r (max(r, ε)^{-α} - 2^α)₊`
    pub radial: StabilitySides<T>,
}

/// Evaluates the stability inequality for `ξ` given as `r ↦ (ξ, ξ')` from
/// `(r, u, u_r, u_rr)`; `breaks` are extra radii where `ξ` has kinks.
pub fn stability_sides<T: Real, X>(profile: &RadialProfile<T>, breaks: &[T], xi: X) -> Result<StabilitySides<T>>
where
    X: Fn(T, T, T, T) -> (T, T),
{
    if !profile.reached_boundary() {
        return Err(domain("profile does not reach r = 1"));
    }
    let mut nodes = profile.nodes.clone();
    for &b in breaks {
        if b > T::zero() && b < T::one() {
            nodes.push(b);
        }
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup_by(|a, b| (*a - *b).abs() <= lit::<T>(1e-14) * b.abs().max(T::one()));
    let (gx, gw) = gauss3::<T>();
    let half = lit::<T>(0.5);
    let k = profile.n as i32 - 1;
    let (mut lhs, mut rhs) = (T::zero(), T::zero());
    for c in nodes.windows(2) {
        let mid = half * (c[0] + c[1]);
        let rad = half * (c[1] - c[0]);
        for q in 0..3 {
            let r = mid + gx[q] * rad;
            let (u, ur) = profile.eval(r);
            let urr = profile.urr(r, u, ur);
            let (x, dx) = xi(r, u, ur, urr);
            let w = gw[q] * rad * r.powi(k);
            lhs += w * profile.lambda * profile.nonlinearity.df(u) * x * x;
            rhs += w * dx * dx;
        }
    }
    let area = sphere_area::<T>(profile.n);
    Ok(StabilitySides { lhs: area * lhs, rhs: area * rhs })
}

/// `ξ = e^{αu} - 1`, admissible for `0 < α < 2`.
pub fn exponential_test_sides<T: Real>(profile: &RadialProfile<T>, alpha: T) -> Result<StabilitySides<T>> {
    if !(alpha > T::zero() && alpha < lit(2.0)) {
        return Err(domain("exponential test function needs 0 < α < 2"));
    }
    stability_sides(profile, &[], |_, u, ur, _| {
        let e = (alpha * u).exp();
        (e - T::one(), alpha * e * ur)
    })
}

/// `ξ = u_r r (max(r, ε)^{-α} - 2^α)₊`, supported in `r < 1/2`.
pub fn radial_test_sides<T: Real>(profile: &RadialProfile<T>, alpha: T, eps: T) -> Result<StabilitySides<T>> {
    if !(alpha > T::zero()) {
        return Err(domain("radial test function needs α > 0"));
    }
    if !(eps > T::zero() && eps < lit(0.5)) {
        return Err(domain("truncation radius must lie in (0, 1/2)"));
    }
    let cap = lit::<T>(2.0).powf(alpha);
    let half = lit::<T>(0.5);
    stability_sides(profile, &[eps, half], move |r, _, ur, urr| {
        if r >= half {
            return (T::zero(), T::zero());
        }
        let (g, dg) = if r > eps {
            (r.powf(-alpha) - cap, -alpha * r.powf(-alpha - T::one()))
        } else {
            (eps.powf(-alpha) - cap, T::zero())
        };
        (ur * r * g, (urr * r + ur) * g + ur * r * dg)
    })
}

/// Both test functions on one profile.
pub fn stability_testfunction_checks<T: Real>(
    profile: &RadialProfile<T>,
    alpha_exp: T,
    alpha_radial: T,
    eps: T,
) -> Result<TestFunctionReport<T>> {
    Ok(TestFunctionReport {
        lambda: profile.lambda,
        alpha_exp,
        alpha_radial,
        exponential: exponential_test_sides(profile, alpha_exp)?,
        radial: radial_test_sides(profile, alpha_radial, eps)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_lambda_shot_is_constant() {
        let p = shoot_radial(3, Nonlinearity::Exponential, 0.0f64, 1.5).unwrap();
        assert!(p.reached_boundary());
        assert!(p.u.iter().all(|&u| u == 1.5));
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let c = |x: f64| x * x * x - 2.0 * x + 1.0;
        let dc = |x: f64| 3.0 * x * x - 2.0;
        let (u, v) = hermite(0.5, 1.25, (c(0.5), dc(0.5)), (c(1.25), dc(1.25)), 0.8);
        assert!((u - c(0.8)).abs() < 1e-14 && (v - dc(0.8)).abs() < 1e-13);
    }

    #[test]
    fn power_nonlinearity_primitive() {
        let f = Nonlinearity::power(2.0f64).unwrap();
        assert!((f.primitive(1.0) - 7.0 / 3.0).abs() < 1e-14);
        assert!(Nonlinearity::power(1.0f64).is_err());
    }
}
