use crate::error::{domain, Error, Result};
use crate::numerics::{lit, BandedMatrix, Grid2D, Real};

/// Relaxation settings for [`solve_saddle_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleOptions<T> {
    /// Target for the max-norm PDE residual on the finest grid.
    pub tol: T,
    pub max_cycles: usize,
    pub pre_sweeps: usize,
    pub post_sweeps: usize,
    /// Multiplier on each Newton-Gauss-Seidel update.
    pub damping: T,
    /// Coarsening stops once the next grid spacing would exceed this.
    pub coarsest_spacing: T,
}

impl<T: Real> SaddleOptions<T> {
    pub fn new(tol: T, max_cycles: usize) -> Self {
        Self { tol, max_cycles, pre_sweeps: 2, post_sweeps: 2, damping: T::one(), coarsest_spacing: T::one() }
    }
}

/// Saddle solution of `u_ss + u_tt + (m-1)(u_s/s + u_t/t) + u - u³ = 0` on
/// the triangle `{0 <= t <= s <= L}`.
///
/// Nodal values live on the triangle; every other quadrant point is read
/// through `u(t, s) = -u(s, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleField<T> {
    m: usize,
    grid: Grid2D<T>,
    values: Vec<T>,
    pub residual: T,
    pub iterations: usize,
    pub history: Vec<T>,
    pub converged: bool,
}

/// Far-field data: the layer composed with the distance `(s-t)/√2` to the cone.
pub fn far_field<T: Real>(s: T, t: T) -> T {
    // tanh(x/2) = 1 - 2/(e^x + 1) keeps 1 - u to full relative precision.
    let x = (s - t).abs();
    let v = T::one() - lit::<T>(2.0) / (x.exp() + T::one());
    if s >= t {
        v
    } else {
        -v
    }
}

struct Level<T> {
    m: usize,
    n: usize,
    h2: T,
    u: Vec<T>,
    rhs: Vec<T>,
    ws_p: Vec<T>,
    ws_m: Vec<T>,
    wt_p: Vec<T>,
    wt_m: Vec<T>,
}

impl<T: Real> Level<T> {
    fn new(m: usize, n: usize, length: T) -> Self {
        let h = length / lit(n as f64);
        let mut ws_p = vec![T::zero(); n + 1];
        let mut ws_m = vec![T::zero(); n + 1];
        let e = (m - 1) as i32;
        for i in 1..=n {
            let fi = lit::<T>(i as f64);
            ws_p[i] = ((fi + lit(0.5)) / fi).powi(e);
            ws_m[i] = ((fi - lit(0.5)) / fi).powi(e);
        }
        let mut u = vec![T::zero(); (n + 1) * (n + 1)];
        for i in 0..=n {
            for j in 0..=i {
                let (s, t) = (h * lit(i as f64), h * lit(j as f64));
                u[i * (n + 1) + j] = if i == j { T::zero() } else { far_field(s, t) };
            }
        }
        Self {
            m,
            n,
            h2: h * h,
            u,
            rhs: vec![T::zero(); (n + 1) * (n + 1)],
            wt_p: ws_p.clone(),
            wt_m: ws_m.clone(),
            ws_p,
            ws_m,
        }
    }

    #[inline]
    fn k(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    /// Negated discrete Laplacian divided out by nothing: returns
    /// `(lap·h², diagonal coefficient·h²)`.
    #[inline]
    fn stencil(&self, u: &[T], i: usize, j: usize) -> (T, T) {
        let k = self.k(i, j);
        let np = self.n + 1;
        let c = u[k];
        let mut lap = self.ws_p[i] * (u[k + np] - c) - self.ws_m[i] * (c - u[k - np]);
        let mut d = self.ws_p[i] + self.ws_m[i];
        if j == 0 {
            let a = lit::<T>(2.0 * self.m as f64);
            lap += a * (u[k + 1] - c);
            d += a;
        } else {
            lap += self.wt_p[j] * (u[k + 1] - c) - self.wt_m[j] * (c - u[k - 1]);
            d += self.wt_p[j] + self.wt_m[j];
        }
        (lap, d)
    }

    /// `-Δu - (u - u³)` at an interior node.
    #[inline]
    fn apply(&self, u: &[T], i: usize, j: usize) -> T {
        let (lap, _) = self.stencil(u, i, j);
        let c = u[self.k(i, j)];
        -lap / self.h2 - (c - c * c * c)
    }

    fn smooth(&mut self, sweeps: usize, damping: T) {
        let cap = lit::<T>(0.5);
        for _ in 0..sweeps {
            for i in 1..self.n {
                for j in 0..i {
                    let k = self.k(i, j);
                    let (lap, d) = self.stencil(&self.u, i, j);
                    let c = self.u[k];
                    let f = -lap / self.h2 - (c - c * c * c) - self.rhs[k];
                    let jac = d / self.h2 - (T::one() - lit::<T>(3.0) * c * c);
                    if jac > T::zero() {
                        let du = (f / jac).max(-cap).min(cap);
                        self.u[k] = c - damping * du;
                    }
                }
            }
        }
    }

    fn residual(&self) -> Vec<T> {
        let mut r = vec![T::zero(); self.u.len()];
        for i in 1..self.n {
            for j in 0..i {
                let k = self.k(i, j);
                r[k] = self.rhs[k] - self.apply(&self.u, i, j);
            }
        }
        r
    }

    fn max_defect(&self) -> T {
        self.residual().iter().fold(T::zero(), |a, r| a.max(r.abs()))
    }

    fn unknown(i: usize, j: usize) -> usize {
        i * (i - 1) / 2 + j
    }

    /// Newton iteration with a banded direct solve and step halving.
    fn direct_solve(&mut self) -> Result<()> {
        let n = self.n;
        let count = n * (n - 1) / 2;
        let scale = self.rhs.iter().fold(T::one(), |a, r| a.max(r.abs()));
        let target = lit::<T>(1e-13) * scale;
        let mut res = self.max_defect();
        for _ in 0..50 {
            if res <= target {
                break;
            }
            let mut jac = BandedMatrix::zeros(count, n, n);
            let mut f = vec![T::zero(); count];
            for i in 1..n {
                for j in 0..i {
                    let row = Self::unknown(i, j);
                    let k = self.k(i, j);
                    let (_, d) = self.stencil(&self.u, i, j);
                    let c = self.u[k];
                    f[row] = self.apply(&self.u, i, j) - self.rhs[k];
                    jac.add(row, row, d / self.h2 - (T::one() - lit::<T>(3.0) * c * c))?;
                    if i + 1 < n {
                        jac.add(row, Self::unknown(i + 1, j), -self.ws_p[i] / self.h2)?;
                    }
                    if j + 2 <= i && i >= 2 {
                        jac.add(row, Self::unknown(i - 1, j), -self.ws_m[i] / self.h2)?;
                    }
                    if j + 1 < i {
                        let w = if j == 0 { lit(2.0 * self.m as f64) } else { self.wt_p[j] };
                        jac.add(row, Self::unknown(i, j + 1), -w / self.h2)?;
                    }
                    if j >= 1 {
                        jac.add(row, Self::unknown(i, j - 1), -self.wt_m[j] / self.h2)?;
                    }
                }
            }
            let delta = jac.solve(&f)?;
            let base = self.u.clone();
            let mut step = T::one();
            loop {
                for i in 1..n {
                    for j in 0..i {
                        let k = self.k(i, j);
                        self.u[k] = base[k] - step * delta[Self::unknown(i, j)];
                    }
                }
                let next = self.max_defect();
                if next < res || step < lit(1.0 / 64.0) {
                    let stalled = next > lit::<T>(0.5) * res;
                    res = next;
                    if stalled && res < lit::<T>(1e-9) * scale {
                        return Ok(());
                    }
                    break;
                }
                step /= lit(2.0);
            }
        }
        if !res.is_finite() {
            return Err(Error::NonFinite { point: vec![] });
        }
        Ok(())
    }
}

fn restrict_at<T: Real>(r: &[T], nf: usize, ci: usize, cj: usize) -> T {
    let np = nf + 1;
    let (fi, fj) = (2 * ci as isize, 2 * cj as isize);
    let mut acc = T::zero();
    for a in -1isize..=1 {
        for b in -1isize..=1 {
            let w = ((2 - a.abs()) * (2 - b.abs())) as f64 / 16.0;
            let i = (fi + a) as usize;
            let j = (fj + b).unsigned_abs();
            acc += lit::<T>(w) * r[i * np + j];
        }
    }
    acc
}

fn vcycle<T: Real>(levels: &mut [Level<T>], opts: &SaddleOptions<T>) -> Result<()> {
    let (fine, rest) = levels.split_first_mut().expect("at least one level");
    if rest.is_empty() {
        return fine.direct_solve();
    }
    fine.smooth(opts.pre_sweeps, opts.damping);
    let r = fine.residual();
    let coarse = &mut rest[0];
    let (nf, nc) = (fine.n, coarse.n);
    for ci in 0..=nc {
        for cj in 0..=ci {
            coarse.u[ci * (nc + 1) + cj] = fine.u[2 * ci * (nf + 1) + 2 * cj];
        }
    }
    let start = coarse.u.clone();
    for ci in 1..nc {
        for cj in 0..ci {
            let k = ci * (nc + 1) + cj;
            coarse.rhs[k] = coarse.apply(&coarse.u, ci, cj) + restrict_at(&r, nf, ci, cj);
        }
    }
    vcycle(rest, opts)?;
    let coarse = &rest[0];
    let e: Vec<T> = coarse.u.iter().zip(&start).map(|(a, b)| *a - *b).collect();
    let ec = |i: usize, j: usize| e[i * (nc + 1) + j];
    let half = lit::<T>(0.5);
    let quarter = lit::<T>(0.25);
    for i in 1..nf {
        for j in 0..i {
            let corr = match (i % 2, j % 2) {
                (0, 0) => ec(i / 2, j / 2),
                (1, 0) => half * (ec(i / 2, j / 2) + ec(i / 2 + 1, j / 2)),
                (0, 1) => half * (ec(i / 2, j / 2) + ec(i / 2, j / 2 + 1)),
                _ => {
                    quarter
                        * (ec(i / 2, j / 2) + ec(i / 2 + 1, j / 2) + ec(i / 2, j / 2 + 1) + ec(i / 2 + 1, j / 2 + 1))
                }
            };
            fine.u[i * (nf + 1) + j] += corr;
        }
    }
    fine.smooth(opts.post_sweeps, opts.damping);
    Ok(())
}

/// [`solve_saddle_with`] with default sweep counts.
pub fn solve_saddle<T: Real>(m: usize, length: T, h: T, tol: T, max_iter: usize) -> Result<SaddleField<T>> {
    solve_saddle_with(m, length, h, SaddleOptions::new(tol, max_iter))
}

/// FAS multigrid V-cycles with Newton-Gauss-Seidel smoothing.
///
/// Boundary data: `u = 0` on `s = t`, `u = tanh((L - t)/2)` on `s = L`, and
/// on the axis `t = 0` the term `(m-1)u_t/t` is replaced by `(m-1)u_tt`.
/// Returns the last iterate with `converged = false` if the cycle budget
/// runs out.
pub fn solve_saddle_with<T: Real>(m: usize, length: T, h: T, opts: SaddleOptions<T>) -> Result<SaddleField<T>> {
    if m < 1 {
        return Err(domain("m must be at least 1"));
    }
    if !(length > T::zero() && h > T::zero()) {
        return Err(domain("length and spacing must be positive"));
    }
    let nf = (length / h).round();
    let n = nf.to_usize().ok_or_else(|| domain("grid too large"))?;
    if n < 4 || ((nf * h - length).abs() > lit::<T>(1e-9) * length) {
        return Err(domain("L/h must be an integer of at least 4"));
    }
    let mut levels = vec![Level::new(m, n, length)];
    loop {
        let last = levels.last().unwrap().n;
        let hc = length / lit((last / 2) as f64);
        if last % 2 != 0 || last / 2 < 4 || hc > opts.coarsest_spacing {
            break;
        }
        levels.push(Level::new(m, last / 2, length));
    }
    let mut history = Vec::new();
    let mut residual = levels[0].max_defect();
    let mut iterations = 0;
    while residual > opts.tol && iterations < opts.max_cycles {
        vcycle(&mut levels, &opts)?;
        iterations += 1;
        residual = levels[0].max_defect();
        if !residual.is_finite() {
            return Err(Error::NoConvergence { iterations, last: f64::NAN });
        }
        history.push(residual);
    }
    let fine = levels.swap_remove(0);
    let grid = Grid2D::triangle(length, n)?;
    Ok(SaddleField { m, grid, values: fine.u, residual, iterations, history, converged: residual <= opts.tol })
}

impl<T: Real> SaddleField<T> {
    /// Rebuilds a field from nodal values on the triangle (row-major,
    /// `(n+1)²` entries; entries with `j > i` are ignored).
    pub fn from_values(m: usize, length: T, n: usize, values: Vec<T>, residual: T) -> Result<Self> {
        if values.len() != (n + 1) * (n + 1) {
            return Err(domain("value count does not match the grid"));
        }
        let grid = Grid2D::triangle(length, n)?;
        let mut values = values;
        for i in 0..=n {
            for j in i + 1..=n {
                values[i * (n + 1) + j] = T::zero();
            }
        }
        Ok(Self { m, grid, values, residual, iterations: 0, history: vec![], converged: true })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    /// Number of cells per side.
    pub fn cells(&self) -> usize {
        self.grid.extents().0 - 1
    }

    pub fn spacing(&self) -> T {
        self.grid.spacing().0
    }

    pub fn length(&self) -> T {
        self.spacing() * lit(self.cells() as f64)
    }

    /// Nodal value anywhere in the `(n+1)²` square, through antisymmetry.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> T {
        let np = self.cells() + 1;
        if j > i {
            -self.values[j * np + i]
        } else {
            self.values[i * np + j]
        }
    }

    /// Bilinear interpolant on `[0, L]²`.
    pub fn value_at(&self, s: T, t: T) -> Result<T> {
        if t > s {
            return self.value_at(t, s).map(|v| -v);
        }
        let (i, j, a, b) = self.locate(s, t)?;
        let one = T::one();
        Ok((one - a) * (one - b) * self.node(i, j)
            + a * (one - b) * self.node(i + 1, j)
            + (one - a) * b * self.node(i, j + 1)
            + a * b * self.node(i + 1, j + 1))
    }

    pub(crate) fn locate(&self, s: T, t: T) -> Result<(usize, usize, T, T)> {
        let h = self.spacing();
        let l = self.length();
        let eps = lit::<T>(1e-12) * l;
        if !(s >= T::zero() && t >= T::zero() && s <= l + eps && t <= l + eps) {
            return Err(domain("query point outside the computed quadrant"));
        }
        let n = self.cells();
        let fi = (s / h).floor().to_usize().unwrap_or(0).min(n - 1);
        let fj = (t / h).floor().to_usize().unwrap_or(0).min(n - 1);
        let a = s / h - lit(fi as f64);
        let b = t / h - lit(fj as f64);
        Ok((fi, fj, a, b))
    }

    /// Central-difference `(u_s, u_t, u_st)` at node `(i, j)`, `1 <= i, j <= n-1`.
    pub fn derivatives(&self, i: usize, j: usize) -> (T, T, T) {
        let h = self.spacing();
        let two_h = h + h;
        let us = (self.node(i + 1, j) - self.node(i - 1, j)) / two_h;
        let ut = (self.node(i, j + 1) - self.node(i, j - 1)) / two_h;
        let ust = (self.node(i + 1, j + 1) - self.node(i + 1, j - 1) - self.node(i - 1, j + 1)
            + self.node(i - 1, j - 1))
            / (two_h * two_h);
        (us, ut, ust)
    }

    /// Recomputes the max-norm PDE residual over interior nodes.
    pub fn pde_residual(&self) -> T {
        let n = self.cells();
        let level = Level::<T> { u: self.values.clone(), ..Level::new(self.m, n, self.length()) };
        level.max_defect()
    }

    /// Number of steps `(i, j) -> (i+1, j-1)` along which `u` decreases by
    /// more than `tol`.
    pub fn direction_monotonicity_violations(&self, tol: T) -> usize {
        let n = self.cells();
        let mut bad = 0;
        for i in 0..n {
            for j in 1..=i {
                if self.node(i + 1, j - 1) < self.node(i, j) - tol {
                    bad += 1;
                }
            }
        }
        bad
    }

    /// Interior nodes with `s > t` where `u` leaves `(0, 1)`.
    pub fn range_violations(&self) -> usize {
        let n = self.cells();
        let mut bad = 0;
        for i in 1..n {
            for j in 0..i {
                let v = self.node(i, j);
                if !(v > T::zero() && v < T::one()) {
                    bad += 1;
                }
            }
        }
        bad
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(solve_saddle(2, 10.0f64, 0.3, 1e-8, 5).is_err());
        assert!(solve_saddle(0, 10.0f64, 0.5, 1e-8, 5).is_err());
    }

    #[test]
    fn small_problem_converges() {
        let f = solve_saddle(2, 8.0f64, 0.25, 1e-10, 50).unwrap();
        assert!(f.converged, "{:?}", f.history);
        assert!(f.pde_residual() < 1e-10);
        assert_eq!(f.node(3, 3), 0.0);
        assert_eq!(f.node(2, 5), -f.node(5, 2));
    }
}
