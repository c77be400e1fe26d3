//! Isoperimetric calibration in the plane: the Neumann problem
//! `Δu = |∂Ω|/|Ω|` in `Ω` with `∂u/∂ν = 1` on `∂Ω`, the gradient image of its
//! lower contact set, and the ratio `|∂Ω| / |Ω|^{1/2}`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checkpoint::GridCheckpoint;
use crate::error::{domain, Error, Result};
use crate::numerics::{adaptive_simpson, lit, BandedMatrix, Real};

/// Bounded convex planar domain centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanarDomain<T> {
    Disk {
        radius: T,
    },
    Rectangle {
        width: T,
        height: T,
    },
    /// Semi-axes `a` along x and `b` along y.
    Ellipse {
        a: T,
        b: T,
    },
}

/// Closest boundary point of a node with the outward normal there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Foot<T> {
    pub point: (T, T),
    pub normal: (T, T),
    /// Distance to the boundary, positive outside.
    pub distance: T,
}

impl<T: Real> PlanarDomain<T> {
    pub fn disk(radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(domain("radius must be positive"));
        }
        Ok(Self::Disk { radius })
    }

    pub fn rectangle(width: T, height: T) -> Result<Self> {
        if !(width > T::zero() && height > T::zero()) {
            return Err(domain("rectangle sides must be positive"));
        }
        Ok(Self::Rectangle { width, height })
    }

    pub fn ellipse(a: T, b: T) -> Result<Self> {
        if !(a > T::zero() && b > T::zero()) {
            return Err(domain("semi-axes must be positive"));
        }
        Ok(Self::Ellipse { a, b })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Disk { .. } => "disk",
            Self::Rectangle { .. } => "rectangle",
            Self::Ellipse { .. } => "ellipse",
        }
    }

    pub fn scaled(&self, s: T) -> Result<Self> {
        match *self {
            Self::Disk { radius } => Self::disk(radius * s),
            Self::Rectangle { width, height } => Self::rectangle(width * s, height * s),
            Self::Ellipse { a, b } => Self::ellipse(a * s, b * s),
        }
    }

    pub fn area(&self) -> T {
        match *self {
            Self::Disk { radius } => T::PI() * radius * radius,
            Self::Rectangle { width, height } => width * height,
            Self::Ellipse { a, b } => T::PI() * a * b,
        }
    }

    /// Closed form for the disk and rectangle, adaptive Simpson for the
    /// ellipse.
    pub fn perimeter(&self) -> T {
        match *self {
            Self::Disk { radius } => lit::<T>(2.0) * T::PI() * radius,
            Self::Rectangle { width, height } => lit::<T>(2.0) * (width + height),
            Self::Ellipse { a, b } => {
                let speed = |t: T| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt();
                let tol = lit::<T>(1e-14) * (a + b);
                lit::<T>(4.0) * adaptive_simpson(speed, T::zero(), T::FRAC_PI_2(), tol, 40)
            }
        }
    }

    /// Half extents of the bounding box.
    pub fn half_extents(&self) -> (T, T) {
        let half = lit::<T>(0.5);
        match *self {
            Self::Disk { radius } => (radius, radius),
            Self::Rectangle { width, height } => (half * width, half * height),
            Self::Ellipse { a, b } => (a, b),
        }
    }

    /// Smallest radius of curvature of the smooth part of the boundary.
    pub fn min_curvature_radius(&self) -> T {
        match *self {
            Self::Disk { radius } => radius,
            Self::Rectangle { width, height } => width.min(height),
            Self::Ellipse { a, b } => {
                let (big, small) = (a.max(b), a.min(b));
                small * small / big
            }
        }
    }

    pub fn contains(&self, x: T, y: T) -> bool {
        match *self {
            Self::Disk { radius } => x * x + y * y < radius * radius,
            Self::Rectangle { width, height } => {
                let half = lit::<T>(0.5);
                x.abs() < half * width && y.abs() < half * height
            }
            Self::Ellipse { a, b } => (x / a).powi(2) + (y / b).powi(2) < T::one(),
        }
    }

    /// Counter-clockwise boundary polygon with segments no longer than
    /// `frac` times the smallest curvature radius.
    pub fn boundary_polygon(&self, frac: T) -> Vec<(T, T)> {
        let seg = frac * self.min_curvature_radius();
        match *self {
            Self::Disk { .. } | Self::Ellipse { .. } => {
                let (a, b) = self.half_extents();
                let dt = seg / a.max(b);
                let n = (lit::<T>(2.0) * T::PI() / dt).ceil().to_usize().unwrap_or(64).max(16);
                (0..n)
                    .map(|k| {
                        let t = lit::<T>(2.0) * T::PI() * lit(k as f64 / n as f64);
                        (a * t.cos(), b * t.sin())
                    })
                    .collect()
            }
            Self::Rectangle { .. } => {
                let (hx, hy) = self.half_extents();
                let corners = [(hx, -hy), (hx, hy), (-hx, hy), (-hx, -hy)];
                let mut pts = Vec::new();
                for k in 0..4 {
                    let (p, q) = (corners[k], corners[(k + 1) % 4]);
                    let len = ((q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)).sqrt();
                    let m = (len / seg).ceil().to_usize().unwrap_or(1).max(1);
                    for j in 0..m {
                        let s = lit::<T>(j as f64 / m as f64);
                        pts.push((p.0 + s * (q.0 - p.0), p.1 + s * (q.1 - p.1)));
                    }
                }
                pts
            }
        }
    }

    /// Closest boundary point to `(x, y)`.
    pub fn foot(&self, x: T, y: T) -> Foot<T> {
        let sign = if self.contains(x, y) { -T::one() } else { T::one() };
        match *self {
            Self::Disk { radius } => {
                let r = (x * x + y * y).sqrt();
                let normal = if r > T::zero() { (x / r, y / r) } else { (T::one(), T::zero()) };
                Foot { point: (radius * normal.0, radius * normal.1), normal, distance: r - radius }
            }
            Self::Rectangle { .. } => {
                let (hx, hy) = self.half_extents();
                let (ox, oy) = (x.abs() - hx, y.abs() - hy);
                let (sx, sy) = (x.signum(), y.signum());
                if ox > T::zero() && oy > T::zero() {
                    let d = (ox * ox + oy * oy).sqrt();
                    return Foot { point: (sx * hx, sy * hy), normal: (sx * ox / d, sy * oy / d), distance: d };
                }
                if ox >= oy {
                    Foot { point: (sx * hx, y), normal: (sx, T::zero()), distance: ox }
                } else {
                    Foot { point: (x, sy * hy), normal: (T::zero(), sy), distance: oy }
                }
            }
            Self::Ellipse { a, b } => {
                // Newton on the parameter from the angle of the scaled point.
                let mut t = (y / b).atan2(x / a);
                for _ in 0..50 {
                    let (s, c) = t.sin_cos();
                    let g = (b * b - a * a) * s * c + a * x * s - b * y * c;
                    let dg = (b * b - a * a) * (c * c - s * s) + a * x * c + b * y * s;
                    if dg.abs() < T::epsilon() {
                        break;
                    }
                    let step = g / dg;
                    t -= step.max(-lit::<T>(0.5)).min(lit(0.5));
                    if step.abs() < lit::<T>(1e-15) {
                        break;
                    }
                }
                let (s, c) = t.sin_cos();
                let p = (a * c, b * s);
                let (nx, ny) = (c / a, s / b);
                let nn = (nx * nx + ny * ny).sqrt();
                let d = ((x - p.0).powi(2) + (y - p.1).powi(2)).sqrt();
                Foot { point: p, normal: (nx / nn, ny / nn), distance: sign * d }
            }
        }
    }
}

/// `|∂Ω| / |Ω|^{1/2}`; equals `2√π` exactly for disks.
pub fn isoperimetric_ratio<T: Real>(d: &PlanarDomain<T>) -> T {
    d.perimeter() / d.area().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Outside,
    Interior,
    /// Outside (or on) the boundary; carries a normal-derivative condition.
    Ghost,
}

/// Discrete solution of the calibration Neumann problem.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannSolution<T> {
    pub domain: PlanarDomain<T>,
    pub h: T,
    pub origin: (T, T),
    pub nx: usize,
    pub ny: usize,
    pub kinds: Vec<NodeKind>,
    /// NaN at outside nodes.
    pub values: Vec<T>,
    /// `|∂Ω|/|Ω|`.
    pub c: T,
    /// Scalar absorbed by the boundary rows to make the discrete system
    /// consistent; tends to 0 under refinement.
    pub compatibility: T,
    pub interior_residual: T,
    pub boundary_residual: T,
}

impl<T: Real> NeumannSolution<T> {
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, i: usize, j: usize) -> (T, T) {
        (self.origin.0 + self.h * lit(i as f64), self.origin.1 + self.h * lit(j as f64))
    }

    pub fn kind(&self, i: usize, j: usize) -> NodeKind {
        self.kinds[self.index(i, j)]
    }

    pub fn value(&self, i: usize, j: usize) -> T {
        self.values[self.index(i, j)]
    }

    /// Central-difference gradient; `None` next to outside nodes.
    pub fn gradient(&self, i: usize, j: usize) -> Option<(T, T)> {
        if i == 0 || j == 0 || i + 1 >= self.nx || j + 1 >= self.ny {
            return None;
        }
        let two_h = lit::<T>(2.0) * self.h;
        let gx = (self.value(i + 1, j) - self.value(i - 1, j)) / two_h;
        let gy = (self.value(i, j + 1) - self.value(i, j - 1)) / two_h;
        (gx.is_finite() && gy.is_finite()).then_some((gx, gy))
    }

    /// Spectral norm of the difference Hessian; `None` next to outside nodes.
    pub fn hessian_norm(&self, i: usize, j: usize) -> Option<T> {
        if i == 0 || j == 0 || i + 1 >= self.nx || j + 1 >= self.ny {
            return None;
        }
        let h2 = self.h * self.h;
        let v = |a: usize, b: usize| self.value(a, b);
        let two = lit::<T>(2.0);
        let uxx = (v(i + 1, j) - two * v(i, j) + v(i - 1, j)) / h2;
        let uyy = (v(i, j + 1) - two * v(i, j) + v(i, j - 1)) / h2;
        let uxy = (v(i + 1, j + 1) - v(i + 1, j - 1) - v(i - 1, j + 1) + v(i - 1, j - 1)) / (lit::<T>(4.0) * h2);
        let half = lit::<T>(0.5);
        let mean = half * (uxx + uyy);
        let rad = (half * (uxx - uyy)).hypot(uxy);
        let n = mean.abs() + rad;
        n.is_finite().then_some(n)
    }

    /// `h²`-weighted mean over interior nodes.
    pub fn mean(&self) -> T {
        let (mut s, mut k) = (T::zero(), 0usize);
        for (v, kind) in self.values.iter().zip(&self.kinds) {
            if *kind == NodeKind::Interior {
                s += *v;
                k += 1;
            }
        }
        s / lit(k as f64)
    }

    /// Interior values on the full lattice, NaN elsewhere.
    pub fn to_checkpoint(&self) -> GridCheckpoint<T> {
        let values = self
            .values
            .iter()
            .zip(&self.kinds)
            .map(|(&v, &k)| if k == NodeKind::Interior { v } else { T::nan() })
            .collect();
        GridCheckpoint {
            m: 2,
            length: self.h * lit((self.nx - 1) as f64),
            h: self.h,
            residual: self.interior_residual,
            rows: self.ny,
            cols: self.nx,
            values,
        }
    }
}

/// Biquadratic interpolation weights at `p` on the 3×3 block around the
/// nearest node.
fn biquadratic<T: Real>(origin: (T, T), h: T, p: (T, T)) -> Option<[((isize, isize), T); 9]> {
    let fx = (p.0 - origin.0) / h;
    let fy = (p.1 - origin.1) / h;
    let (ic, jc) = (fx.round(), fy.round());
    let (xi, eta) = (fx - ic, fy - jc);
    let (ic, jc) = (ic.to_isize()?, jc.to_isize()?);
    let half = lit::<T>(0.5);
    let w1 = |s: T| [half * s * (s - T::one()), T::one() - s * s, half * s * (s + T::one())];
    let (wx, wy) = (w1(xi), w1(eta));
    let mut out = [((0isize, 0isize), T::zero()); 9];
    for b in 0..3 {
        for a in 0..3 {
            out[b * 3 + a] = ((ic + a as isize - 1, jc + b as isize - 1), wx[a] * wy[b]);
        }
    }
    Some(out)
}

/// Solves `Δu = |∂Ω|/|Ω|`, `∂u/∂ν = 1` on a lattice of spacing `h`,
/// normalized to zero interior mean.
pub fn solve_neumann_calibration<T: Real>(dom: &PlanarDomain<T>, h: T) -> Result<NeumannSolution<T>> {
    let (ex, ey) = dom.half_extents();
    if !(h > T::zero()) || lit::<T>(2.0) * ex.min(ey) / h < lit(30.0) {
        return Err(domain("grid too coarse: need at least 30 nodes across the domain"));
    }
    let margin = 6usize;
    let cells = |e: T| (lit::<T>(2.0) * e / h).ceil().to_usize().unwrap_or(0) + 1 + 2 * margin;
    let (nx, ny) = (cells(ex), cells(ey));
    let origin = (-h * lit(((nx - 1) as f64) / 2.0), -h * lit(((ny - 1) as f64) / 2.0));
    let at = |i: usize, j: usize| (origin.0 + h * lit(i as f64), origin.1 + h * lit(j as f64));
    let idx = |i: usize, j: usize| j * nx + i;
    let mut kinds = vec![NodeKind::Outside; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let (x, y) = at(i, j);
            if dom.contains(x, y) {
                kinds[idx(i, j)] = NodeKind::Interior;
            }
        }
    }
    // Ghost layer: outside neighbours of interior nodes, closed under the
    // interpolation stencils of the ghost conditions.
    let mut pending: Vec<(usize, usize)> = Vec::new();
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            if kinds[idx(i, j)] != NodeKind::Interior {
                continue;
            }
            for (a, b) in [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)] {
                if kinds[idx(a, b)] == NodeKind::Outside {
                    kinds[idx(a, b)] = NodeKind::Ghost;
                    pending.push((a, b));
                }
            }
        }
    }
    let depths = [h, lit::<T>(2.0) * h];
    let mut stencils: HashMap<usize, (T, Vec<(usize, T)>)> = HashMap::new();
    while let Some((i, j)) = pending.pop() {
        let (x, y) = at(i, j);
        let foot = dom.foot(x, y);
        if foot.distance > lit::<T>(4.0) * h {
            return Err(Error::Consistency("ghost layer grew beyond 4h from the boundary".into()));
        }
        let d = foot.distance.max(T::zero());
        // Quadratic through s = d (the node), -h, -2h along the normal;
        // derivative at s = 0.
        let s = [d, -depths[0], -depths[1]];
        let dl = |k: usize| {
            let (p, q) = ((k + 1) % 3, (k + 2) % 3);
            (-s[p] - s[q]) / ((s[k] - s[p]) * (s[k] - s[q]))
        };
        let mut row = vec![(idx(i, j), dl(0))];
        for (k, &depth) in depths.iter().enumerate() {
            let p = (foot.point.0 - depth * foot.normal.0, foot.point.1 - depth * foot.normal.1);
            let w = biquadratic(origin, h, p).ok_or_else(|| domain("interpolation point off the lattice"))?;
            let coef = dl(k + 1);
            for ((a, b), wt) in w {
                if a < 0 || b < 0 || a as usize >= nx || b as usize >= ny {
                    return Err(Error::Consistency("interpolation stencil leaves the lattice".into()));
                }
                let (a, b) = (a as usize, b as usize);
                if kinds[idx(a, b)] == NodeKind::Outside {
                    kinds[idx(a, b)] = NodeKind::Ghost;
                    pending.push((a, b));
                }
                row.push((idx(a, b), coef * wt));
            }
        }
        stencils.insert(idx(i, j), (d, row));
    }
    // Compressed unknown numbering.
    let mut number = vec![usize::MAX; nx * ny];
    let mut nodes = Vec::new();
    for (g, k) in kinds.iter().enumerate() {
        if *k != NodeKind::Outside {
            number[g] = nodes.len();
            nodes.push(g);
        }
    }
    let n = nodes.len();
    let mut rows: Vec<Vec<(usize, T)>> = Vec::with_capacity(n);
    let c = dom.perimeter() / dom.area();
    let mut rhs = vec![T::zero(); n];
    let mut ghost_col = vec![T::zero(); n];
    let inv_h2 = (h * h).recip();
    for (r, &g) in nodes.iter().enumerate() {
        let (i, j) = (g % nx, g / nx);
        match kinds[g] {
            NodeKind::Interior => {
                let mut row = vec![(r, -lit::<T>(4.0) * inv_h2)];
                for nb in [idx(i + 1, j), idx(i - 1, j), idx(i, j + 1), idx(i, j - 1)] {
                    row.push((number[nb], inv_h2));
                }
                rhs[r] = c;
                rows.push(row);
            }
            NodeKind::Ghost => {
                let (_, st) = &stencils[&g];
                rows.push(st.iter().map(|&(col, v)| (number[col], v)).collect());
                rhs[r] = T::one();
                ghost_col[r] = T::one();
            }
            NodeKind::Outside => unreachable!(),
        }
    }
    let band = rows
        .iter()
        .enumerate()
        .flat_map(|(r, row)| row.iter().map(move |&(col, _)| r.abs_diff(col)))
        .max()
        .unwrap_or(1);
    let mut a = BandedMatrix::zeros(n, band, band);
    for (r, row) in rows.iter().enumerate() {
        for &(col, v) in row {
            a.add(r, col, v)?;
        }
    }
    // The constants span the kernel. Pin one interior node through a
    // rank-one update, then recover the bordered solution
    //   A u + μ e_ghost = b,  Σ_interior u = 0.
    let pin = nodes
        .iter()
        .enumerate()
        .filter(|(_, &g)| kinds[g] == NodeKind::Interior)
        .min_by(|(_, &p), (_, &q)| {
            let d = |g: usize| {
                let (x, y) = at(g % nx, g / nx);
                x * x + y * y
            };
            d(p).partial_cmp(&d(q)).unwrap()
        })
        .map(|(r, _)| r)
        .ok_or_else(|| domain("no interior nodes"))?;
    let shift = inv_h2;
    let mut b_mat = a.clone();
    b_mat.add(pin, pin, shift)?;
    let mut e_pin = vec![T::zero(); n];
    e_pin[pin] = T::one();
    let sol = b_mat.solve_many(&[rhs.clone(), e_pin, ghost_col.clone()])?;
    let (x0, xk, xe) = (&sol[0], &sol[1], &sol[2]);
    let interior: Vec<usize> = (0..n).filter(|&r| kinds[nodes[r]] == NodeKind::Interior).collect();
    let wsum = |v: &[T]| interior.iter().map(|&r| v[r]).fold(T::zero(), |s, x| s + x);
    // β (xk_pin - 1/shift) - μ xe_pin = -x0_pin;  β Σxk - μ Σxe = -Σx0.
    let (a11, a12, b1) = (xk[pin] - shift.recip(), -xe[pin], -x0[pin]);
    let (a21, a22, b2) = (wsum(xk), -wsum(xe), -wsum(x0));
    let det = a11 * a22 - a12 * a21;
    if !(det.abs() > T::zero()) {
        return Err(Error::Singular("bordered Neumann system".into()));
    }
    let beta = (b1 * a22 - a12 * b2) / det;
    let mu = (a11 * b2 - b1 * a21) / det;
    let u: Vec<T> = (0..n).map(|r| x0[r] + beta * xk[r] - mu * xe[r]).collect();
    let mut values = vec![T::nan(); nx * ny];
    for (r, &g) in nodes.iter().enumerate() {
        values[g] = u[r];
    }
    let mut au = vec![T::zero(); n];
    a.mul_vec(&u, &mut au);
    let (mut res_i, mut res_b) = (T::zero(), T::zero());
    for r in 0..n {
        let d = (au[r] - rhs[r]).abs();
        if kinds[nodes[r]] == NodeKind::Interior {
            res_i = res_i.max(d);
        } else {
            res_b = res_b.max(d);
        }
    }
    Ok(NeumannSolution {
        domain: *dom,
        h,
        origin,
        nx,
        ny,
        kinds,
        values,
        c,
        compatibility: mu,
        interior_residual: res_i,
        boundary_residual: res_b,
    })
}

/// Result of testing `B₁(0) ⊂ ∇u(Γ_u)` on sampled slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport<T> {
    pub samples: usize,
    pub covered: usize,
    pub fraction: T,
    /// Allowed gradient mismatch, `1.5 h max|D²u|`.
    pub tolerance: T,
    /// Largest mismatch `|∇u(y) - p|` among the samples.
    pub worst_mismatch: T,
    pub uncovered: Vec<(T, T)>,
    /// Slopes with `|p| = 1.5`, outside the claimed inclusion.
    pub control_samples: usize,
    pub control_covered: usize,
}

/// Stratified slopes in the open unit disk: equal-area cells in `(|p|², θ)`
/// with one ChaCha-seeded point each.
pub fn stratified_disk<T: Real>(k: usize, seed: u64) -> Vec<(T, T)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = ((k as f64).sqrt().floor() as usize).max(1);
    let cols = k.div_ceil(rows);
    let mut out = Vec::with_capacity(k);
    'outer: for a in 0..rows {
        for b in 0..cols {
            if out.len() == k {
                break 'outer;
            }
            let r2 = (a as f64 + rng.gen::<f64>()) / rows as f64;
            let th = 2.0 * std::f64::consts::PI * (b as f64 + rng.gen::<f64>()) / cols as f64;
            let r = r2.sqrt();
            out.push((lit(r * th.cos()), lit(r * th.sin())));
        }
    }
    out
}

/// Lattice minimizer of `u(y) - p·y` over interior nodes, with the mismatch
/// `|∇u(y) - p|` there.
pub fn contact_point<T: Real>(sol: &NeumannSolution<T>, p: (T, T)) -> Option<((usize, usize), T)> {
    let mut best: Option<((usize, usize), T)> = None;
    for j in 0..sol.ny {
        for i in 0..sol.nx {
            if sol.kind(i, j) != NodeKind::Interior {
                continue;
            }
            let (x, y) = sol.coords(i, j);
            let v = sol.value(i, j) - p.0 * x - p.1 * y;
            if best.is_none_or(|(_, b)| v < b) {
                best = Some(((i, j), v));
            }
        }
    }
    let ((i, j), _) = best?;
    let (gx, gy) = sol.gradient(i, j)?;
    Some(((i, j), (gx - p.0).hypot(gy - p.1)))
}

pub fn contact_set_coverage<T: Real>(sol: &NeumannSolution<T>, k: usize, seed: u64) -> CoverageReport<T> {
    let mut hmax = T::zero();
    for j in 0..sol.ny {
        for i in 0..sol.nx {
            if sol.kind(i, j) == NodeKind::Interior {
                if let Some(hn) = sol.hessian_norm(i, j) {
                    hmax = hmax.max(hn);
                }
            }
        }
    }
    let tol = lit::<T>(1.5) * sol.h * hmax;
    let slopes = stratified_disk::<T>(k, seed);
    let mut covered = 0;
    let mut worst = T::zero();
    let mut uncovered = Vec::new();
    for &p in &slopes {
        match contact_point(sol, p) {
            Some((_, miss)) if miss <= tol => {
                covered += 1;
                worst = worst.max(miss);
            }
            Some((_, miss)) => {
                worst = worst.max(miss);
                uncovered.push(p);
            }
            None => uncovered.push(p),
        }
    }
    let control: Vec<(T, T)> = (0..16)
        .map(|q| {
            let th = lit::<T>(2.0) * T::PI() * lit(q as f64 / 16.0);
            (lit::<T>(1.5) * th.cos(), lit::<T>(1.5) * th.sin())
        })
        .collect();
    let control_covered =
        control.iter().filter(|&&p| matches!(contact_point(sol, p), Some((_, miss)) if miss <= tol)).count();
    CoverageReport {
        samples: slopes.len(),
        covered,
        fraction: lit::<T>(covered as f64) / lit(slopes.len().max(1) as f64),
        tolerance: tol,
        worst_mismatch: worst,
        uncovered,
        control_samples: control.len(),
        control_covered,
    }
}
