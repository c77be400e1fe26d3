//! Level-set geometry, the quartic calibration of the Simons cone, the
//! second variation of cones against radial cutoff probes, and the Simons
//! inequality gap.

use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::numerics::{fd_gradient, fd_hessian, gauss_cells, lit, point_f64, to_f64, Mesh1D, Real};

type ScalarFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
type VectorFn<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;
type MatrixFn<T> = Arc<dyn Fn(&[T]) -> Vec<Vec<T>> + Send + Sync>;

/// A scalar field on `R^n` whose level sets are the surfaces of interest.
///
/// Derivatives come from the exact evaluators when supplied and from central
/// differences otherwise.
#[derive(Clone)]
pub struct LevelSetField<T> {
    dim: usize,
    value: ScalarFn<T>,
    gradient: Option<VectorFn<T>>,
    hessian: Option<MatrixFn<T>>,
    /// Queries with `|∇u|` at or below this are rejected.
    pub grad_threshold: T,
    /// Queries closer than this to the origin are rejected (cone vertices).
    pub vertex_exclusion: Option<T>,
    /// Relative difference step; scaled by `max(1, |x|)`.
    pub fd_step: T,
}

impl<T: Real> std::fmt::Debug for LevelSetField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LevelSetField")
            .field("dim", &self.dim)
            .field("exact_gradient", &self.gradient.is_some())
            .field("exact_hessian", &self.hessian.is_some())
            .field("grad_threshold", &self.grad_threshold)
            .field("vertex_exclusion", &self.vertex_exclusion)
            .finish()
    }
}

/// Local geometry of a level set at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetGeometry<T> {
    pub normal: Vec<T>,
    pub grad_norm: T,
    pub mean_curvature: T,
    pub second_form_norm_sq: T,
}

impl<T: Real> LevelSetField<T> {
    pub fn new<F>(dim: usize, value: F) -> Result<Self>
    where
        F: Fn(&[T]) -> T + Send + Sync + 'static,
    {
        if dim < 2 {
            return Err(domain(format!("level-set fields need n >= 2, got {dim}")));
        }
        Ok(Self {
            dim,
            value: Arc::new(value),
            gradient: None,
            hessian: None,
            grad_threshold: lit(1e-8),
            vertex_exclusion: None,
            fd_step: lit(1e-4),
        })
    }

    pub fn with_gradient<G>(mut self, g: G) -> Self
    where
        G: Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn with_hessian<H>(mut self, h: H) -> Self
    where
        H: Fn(&[T]) -> Vec<Vec<T>> + Send + Sync + 'static,
    {
        self.hessian = Some(Arc::new(h));
        self
    }

    /// Marks the field as a cone field: queries within `radius` of the
    /// origin are rejected.
    pub fn with_vertex_exclusion(mut self, radius: T) -> Self {
        self.vertex_exclusion = Some(radius);
        self
    }

    /// Drops the exact derivative evaluators, forcing finite differences.
    pub fn without_exact_derivatives(mut self) -> Self {
        self.gradient = None;
        self.hessian = None;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &[T]) -> T {
        (self.value)(x)
    }

    fn step_at(&self, x: &[T]) -> T {
        let r = x.iter().map(|&v| v * v).fold(T::zero(), |a, b| a + b).sqrt();
        self.fd_step * r.max(T::one())
    }

    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        match &self.gradient {
            Some(g) => Ok(g(x)),
            None => fd_gradient(&*self.value, x, self.step_at(x)),
        }
    }

    pub fn hessian(&self, x: &[T]) -> Result<Vec<Vec<T>>> {
        match &self.hessian {
            Some(h) => Ok(h(x)),
            None => fd_hessian(&*self.value, x, self.step_at(x)),
        }
    }

    /// `|x|² - 1`.
    pub fn sphere(dim: usize) -> Result<Self> {
        Ok(Self::new(dim, |x: &[T]| x.iter().map(|&v| v * v).fold(T::zero(), |a, b| a + b) - T::one())?
            .with_gradient(|x: &[T]| x.iter().map(|&v| v + v).collect())
            .with_hessian(move |x: &[T]| diag(x.len(), |_| lit(2.0))))
    }

    /// `x_n`.
    pub fn hyperplane(dim: usize) -> Result<Self> {
        Ok(Self::new(dim, |x: &[T]| x[x.len() - 1])?
            .with_gradient(|x: &[T]| {
                let mut g = vec![T::zero(); x.len()];
                g[x.len() - 1] = T::one();
                g
            })
            .with_hessian(|x: &[T]| diag(x.len(), |_| T::zero())))
    }

    /// `|x'|² - |x''|²` on `R^{2m}`, zero set the Simons cone.
    pub fn simons(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(domain("m must be positive"));
        }
        Ok(Self::new(2 * m, move |x: &[T]| {
            let (s2, t2) = split_norms_sq(x, m);
            s2 - t2
        })?
        .with_gradient(move |x: &[T]| {
            x.iter().enumerate().map(|(i, &v)| if i < m { v + v } else { -(v + v) }).collect()
        })
        .with_hessian(move |x: &[T]| diag(x.len(), |i| if i < m { lit(2.0) } else { lit(-2.0) }))
        .with_vertex_exclusion(lit(1e-3)))
    }

    /// `|x'|⁴ - |x''|⁴` on `R^{2m}`, the calibrating potential.
    pub fn simons_quartic(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(domain("m must be positive"));
        }
        let four = lit::<T>(4.0);
        Ok(Self::new(2 * m, move |x: &[T]| {
            let (s2, t2) = split_norms_sq(x, m);
            s2 * s2 - t2 * t2
        })?
        .with_gradient(move |x: &[T]| {
            let (s2, t2) = split_norms_sq(x, m);
            x.iter().enumerate().map(|(i, &v)| if i < m { four * s2 * v } else { -four * t2 * v }).collect()
        })
        .with_vertex_exclusion(lit(1e-3)))
    }

    /// The field `x -> u(Q x + b)` for an orthogonal `Q`; exact derivatives
    /// are transported along.
    pub fn rigid_motion(&self, q: Vec<Vec<T>>, shift: Vec<T>) -> Result<Self> {
        let n = self.dim;
        if q.len() != n || q.iter().any(|row| row.len() != n) || shift.len() != n {
            return Err(domain("rigid motion dimensions do not match the field"));
        }
        let q = Arc::new(q);
        let shift = Arc::new(shift);
        let map = {
            let (q, shift) = (q.clone(), shift.clone());
            move |x: &[T]| -> Vec<T> {
                (0..n).map(|i| (0..n).map(|j| q[i][j] * x[j]).fold(T::zero(), |a, b| a + b) + shift[i]).collect()
            }
        };
        let map = Arc::new(map);
        let inner = self.value.clone();
        let m1 = map.clone();
        let mut out = Self::new(n, move |x: &[T]| inner(&m1(x)))?;
        out.grad_threshold = self.grad_threshold;
        out.fd_step = self.fd_step;
        if let Some(g) = self.gradient.clone() {
            let (q, m2) = (q.clone(), map.clone());
            out.gradient = Some(Arc::new(move |x: &[T]| {
                let gy = g(&m2(x));
                (0..n).map(|j| (0..n).map(|i| q[i][j] * gy[i]).fold(T::zero(), |a, b| a + b)).collect()
            }));
        }
        if let Some(h) = self.hessian.clone() {
            let (q, m3) = (q.clone(), map.clone());
            out.hessian = Some(Arc::new(move |x: &[T]| {
                let hy = h(&m3(x));
                let mut r = vec![vec![T::zero(); n]; n];
                for a in 0..n {
                    for b in 0..n {
                        let mut acc = T::zero();
                        for i in 0..n {
                            for j in 0..n {
                                acc += q[i][a] * hy[i][j] * q[j][b];
                            }
                        }
                        r[a][b] = acc;
                    }
                }
                r
            }));
        }
        Ok(out)
    }

    /// Mean curvature and `c²` of the level set through `x`, with normal
    /// `∇u/|∇u|` pointing out of `{u < 0}`.
    pub fn geometry(&self, x: &[T]) -> Result<LevelSetGeometry<T>> {
        if x.len() != self.dim {
            return Err(domain(format!("point has dimension {}, field has {}", x.len(), self.dim)));
        }
        if let Some(rad) = self.vertex_exclusion {
            let r = x.iter().map(|&v| v * v).fold(T::zero(), |a, b| a + b).sqrt();
            if r < rad {
                return Err(domain(format!(
                    "point at distance {:e} from the cone vertex (exclusion radius {:e})",
                    to_f64(r),
                    to_f64(rad)
                )));
            }
        }
        let g = self.gradient(x)?;
        let gn = g.iter().map(|&v| v * v).fold(T::zero(), |a, b| a + b).sqrt();
        if !(gn > self.grad_threshold) {
            return Err(Error::DegenerateGradient { point: point_f64(x), grad_norm: to_f64(gn) });
        }
        let hess = self.hessian(x)?;
        let n = self.dim;
        let nu: Vec<T> = g.iter().map(|&v| v / gn).collect();
        // P D²u P with P = I - ν νᵀ.
        let hnu: Vec<T> = (0..n).map(|i| (0..n).map(|j| hess[i][j] * nu[j]).fold(T::zero(), |a, b| a + b)).collect();
        let nhn: T = (0..n).map(|i| nu[i] * hnu[i]).fold(T::zero(), |a, b| a + b);
        let trace: T = (0..n).map(|i| hess[i][i]).fold(T::zero(), |a, b| a + b);
        let mut frob = T::zero();
        for i in 0..n {
            for j in 0..n {
                let v = hess[i][j] - nu[i] * hnu[j] - hnu[i] * nu[j] + nu[i] * nu[j] * nhn;
                frob += v * v;
            }
        }
        Ok(LevelSetGeometry {
            normal: nu,
            grad_norm: gn,
            mean_curvature: (trace - nhn) / gn,
            second_form_norm_sq: frob / (gn * gn),
        })
    }
}

fn diag<T: Real>(n: usize, f: impl Fn(usize) -> T) -> Vec<Vec<T>> {
    let mut m = vec![vec![T::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = f(i);
    }
    m
}

fn split_norms_sq<T: Real>(x: &[T], m: usize) -> (T, T) {
    let s2 = x[..m].iter().map(|&v| v * v).fold(T::zero(), |a, b| a + b);
    let t2 = x[m..].iter().map(|&v| v * v).fold(T::zero(), |a, b| a + b);
    (s2, t2)
}

/// `div(∇u/|∇u|)` at `x`.
pub fn mean_curvature<T: Real>(field: &LevelSetField<T>, x: &[T]) -> Result<T> {
    field.geometry(x).map(|g| g.mean_curvature)
}

/// Squared norm of the second fundamental form of the level set through `x`.
pub fn second_form_norm_sq<T: Real>(field: &LevelSetField<T>, x: &[T]) -> Result<T> {
    field.geometry(x).map(|g| g.second_form_norm_sq)
}

/// Point of the Simons cone in `R^{2m}` at distance `r` from the vertex,
/// along unit directions `a` (first factor) and `b` (second factor).
pub fn simons_cone_point<T: Real>(a: &[T], b: &[T], r: T) -> Vec<T> {
    let na = a.iter().map(|&v| v * v).fold(T::zero(), |a, b| a + b).sqrt();
    let nb = b.iter().map(|&v| v * v).fold(T::zero(), |a, b| a + b).sqrt();
    let s = r / lit::<T>(2.0).sqrt();
    a.iter().map(|&v| s * v / na).chain(b.iter().map(|&v| s * v / nb)).collect()
}

/// Divergence of the unit calibrating field `∇ũ/|∇ũ|`, `ũ = s⁴ - t⁴`, in
/// `R^{2m}` written in `s = |x'|`, `t = |x''|`:
///
/// `(s² - t²)(s² + t²)[(m-1)(s² - t²)² + (m-4)s²t²] / (s⁶ + t⁶)^{3/2}`.
pub fn calibration_divergence<T: Real>(m: usize, s: T, t: T) -> Result<T> {
    if m < 2 {
        return Err(domain("calibration needs m >= 2"));
    }
    if !(s >= T::zero() && t >= T::zero()) || (s == T::zero() && t == T::zero()) {
        return Err(domain("calibration divergence needs s, t >= 0, not both zero"));
    }
    let (a, b) = (s * s, t * t);
    let mm = lit::<T>(m as f64);
    let bracket = (mm - T::one()) * (a - b) * (a - b) + (mm - lit(4.0)) * a * b;
    let den = (a * a * a + b * b * b).powf(lit(1.5));
    Ok((a - b) * (a + b) * bracket / den)
}

fn sign<T: Real>(x: T) -> i8 {
    if x > T::zero() {
        1
    } else if x < T::zero() {
        -1
    } else {
        0
    }
}

/// Outcome of scanning the sign of the calibration divergence on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationScan {
    pub m: usize,
    pub nodes: usize,
    pub violations: usize,
    /// First violating node `(s, t)`, if any.
    pub first_violation: Option<(f64, f64)>,
}

/// Compares `sign(div X)` with `sign(s⁴ - t⁴)` on the `k × k` grid
/// `{(i, j) * side / k : 1 <= i, j <= k}`.
pub fn calibration_sign_scan<T: Real>(m: usize, side: T, k: usize) -> Result<CalibrationScan> {
    let h = side / lit(k as f64);
    let mut violations = 0;
    let mut first = None;
    for i in 1..=k {
        for j in 1..=k {
            let s = h * lit(i as f64);
            let t = h * lit(j as f64);
            let dv = calibration_divergence(m, s, t)?;
            let u = s.powi(4) - t.powi(4);
            if sign(dv) != sign(u) {
                violations += 1;
                first.get_or_insert((to_f64(s), to_f64(t)));
            }
        }
    }
    Ok(CalibrationScan { m, nodes: k * k, violations, first_violation: first })
}

/// A cone whose squared second fundamental form is `d / r²`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialConeProfile<T> {
    /// Ambient dimension.
    pub n: usize,
    pub d: T,
    pub label: String,
}

impl<T: Real> RadialConeProfile<T> {
    pub fn new(n: usize, d: T, label: impl Into<String>) -> Result<Self> {
        if n < 2 {
            return Err(domain("ambient dimension must be at least 2"));
        }
        if !(d >= T::zero()) || !d.is_finite() {
            return Err(domain("curvature coefficient d must be finite and nonnegative"));
        }
        Ok(Self { n, d, label: label.into() })
    }

    /// The Simons cone in `R^{2m}`, with `d = r² c²` measured from the level
    /// set at a point of the cone.
    pub fn simons(m: usize) -> Result<Self> {
        let d = measure_simons_d::<T>(m)?;
        Self::new(2 * m, d, format!("simons-cone-m{m}"))
    }
}

/// `r² c²` on the Simons cone of `R^{2m}`, measured at a fixed cone point.
pub fn measure_simons_d<T: Real>(m: usize) -> Result<T> {
    let field = LevelSetField::<T>::simons(m)?;
    let a: Vec<T> = (0..m).map(|i| lit(1.0 + 0.3 * i as f64)).collect();
    let b: Vec<T> = (0..m).map(|i| lit(0.5 - 0.2 * i as f64)).collect();
    let r = T::one();
    let x = simons_cone_point(&a, &b, r);
    Ok(r * r * second_form_norm_sq(&field, &x)?)
}

/// Radial test function `r^{-α}` (r ≤ 1), `r^{-β}` (r ≥ 1), cut off linearly
/// on `[ρ_in, 2ρ_in]` and `[ρ_out/2, ρ_out]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffProbe<T> {
    pub alpha: T,
    pub beta: T,
    pub rho_in: T,
    pub rho_out: T,
}

impl<T: Real> CutoffProbe<T> {
    pub fn new(alpha: T, beta: T, rho_in: T, rho_out: T) -> Result<Self> {
        let two = lit::<T>(2.0);
        if !(rho_in > T::zero() && two * rho_in < T::one() && rho_out > two) {
            return Err(domain("probe radii need 0 < 2ρ_in < 1 < ρ_out/2"));
        }
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(domain("probe exponents must be finite"));
        }
        Ok(Self { alpha, beta, rho_in, rho_out })
    }

    /// Same exponents, radii multiplied by `lambda` about the pivot radius.
    pub fn with_radii(&self, rho_in: T, rho_out: T) -> Result<Self> {
        Self::new(self.alpha, self.beta, rho_in, rho_out)
    }

    /// `(η(r), η'(r))` away from the kinks, with the pivot at `pivot`.
    pub fn eval(&self, r: T, pivot: T) -> (T, T) {
        let two = lit::<T>(2.0);
        let x = r / pivot;
        let (base, dbase) = if x <= T::one() {
            let v = x.powf(-self.alpha);
            (v, -self.alpha * v / r)
        } else {
            let v = x.powf(-self.beta);
            (v, -self.beta * v / r)
        };
        let (ri, ro) = (self.rho_in * pivot, self.rho_out * pivot);
        let (cin, dcin) = if r <= ri {
            (T::zero(), T::zero())
        } else if r < two * ri {
            ((r - ri) / ri, T::one() / ri)
        } else {
            (T::one(), T::zero())
        };
        let half_out = ro / two;
        let (cout, dcout) = if r >= ro {
            (T::zero(), T::zero())
        } else if r > half_out {
            ((ro - r) / half_out, -T::one() / half_out)
        } else {
            (T::one(), T::zero())
        };
        let c = cin * cout;
        let dc = dcin * cout + cin * dcout;
        (base * c, dbase * c + base * dc)
    }

    /// Geometric mesh with the kinks of the probe as nodes.
    pub fn mesh(&self, pivot: T, per_efold: usize) -> Result<Mesh1D<T>> {
        let two = lit::<T>(2.0);
        let breaks =
            [self.rho_in * pivot, two * self.rho_in * pivot, pivot, self.rho_out * pivot / two, self.rho_out * pivot];
        Mesh1D::graded_with_breaks(&breaks, per_efold)
    }
}

/// Second-variation value of one probe on a cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOutcome<T> {
    /// `∫ (η'² - d η²/r²) r^{n-2} dr`.
    pub q: T,
    /// `∫ d η²/r² r^{n-2} dr`, the scale used for normalized comparisons.
    pub potential: T,
    /// `α < (n-5)/2 < β`.
    pub in_window: bool,
    /// Extending both truncation radii by a factor 4 more than doubles the
    /// potential term.
    pub tail_divergent: bool,
    /// `α² < d` and `β² < d`: both pure-power pieces have negative integrands.
    pub pointwise_negative: bool,
    pub admissible: bool,
}

fn probe_integrals<T: Real>(
    profile: &RadialConeProfile<T>,
    probe: &CutoffProbe<T>,
    mesh: &Mesh1D<T>,
    pivot: T,
) -> (T, T) {
    let n = profile.n as i32;
    let d = profile.d;
    let grad = gauss_cells(
        |r| {
            let (_, de) = probe.eval(r, pivot);
            de * de * r.powi(n - 2)
        },
        mesh,
    );
    let pot = gauss_cells(
        |r| {
            let (e, _) = probe.eval(r, pivot);
            d * e * e * r.powi(n - 4)
        },
        mesh,
    );
    (grad, pot)
}

/// Evaluates the cone second variation on a cutoff probe. `mesh` must cover
/// `[ρ_in, ρ_out]` and should contain the kinks of the probe as nodes.
pub fn cone_stability_probe<T: Real>(
    profile: &RadialConeProfile<T>,
    probe: &CutoffProbe<T>,
    mesh: &Mesh1D<T>,
) -> Result<ProbeOutcome<T>> {
    cone_stability_probe_pivot(profile, probe, mesh, T::one())
}

/// As [`cone_stability_probe`] with the pivot radius (and all radii) scaled
/// by `pivot`.
pub fn cone_stability_probe_pivot<T: Real>(
    profile: &RadialConeProfile<T>,
    probe: &CutoffProbe<T>,
    mesh: &Mesh1D<T>,
    pivot: T,
) -> Result<ProbeOutcome<T>> {
    let eps = lit::<T>(1e-12);
    if mesh.first() > probe.rho_in * pivot * (T::one() + eps) || mesh.last() < probe.rho_out * pivot * (T::one() - eps)
    {
        return Err(domain("mesh does not cover [ρ_in, ρ_out]"));
    }
    let (grad, pot) = probe_integrals(profile, probe, mesh, pivot);
    let wide = CutoffProbe { rho_in: probe.rho_in / lit(4.0), rho_out: probe.rho_out * lit(4.0), ..*probe };
    let per_efold =
        (lit::<T>(mesh.len() as f64) / (probe.rho_out / probe.rho_in).ln()).ceil().to_usize().unwrap_or(40).max(20);
    let wide_mesh = wide.mesh(pivot, per_efold)?;
    let (grad_w, pot_w) = probe_integrals(profile, &wide, &wide_mesh, pivot);
    let two = lit::<T>(2.0);
    let tail_divergent = if profile.d > T::zero() { pot_w > two * pot } else { grad_w > two * grad };
    let nn = lit::<T>(profile.n as f64);
    let edge = (nn - lit(5.0)) / two;
    let in_window = probe.alpha < edge && edge < probe.beta;
    let d = profile.d;
    Ok(ProbeOutcome {
        q: grad - pot,
        potential: pot,
        in_window,
        tail_divergent,
        pointwise_negative: probe.alpha * probe.alpha < d && probe.beta * probe.beta < d,
        admissible: in_window && !tail_divergent,
    })
}

/// One entry of a probe scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRecord<T> {
    pub alpha: T,
    pub beta: T,
    pub rho_in: T,
    pub rho_out: T,
    pub outcome: ProbeOutcome<T>,
}

/// Evaluates every `(α, β, ρ_out)` combination with `ρ_in` fixed.
pub fn stability_scan<T: Real>(
    profile: &RadialConeProfile<T>,
    alphas: &[T],
    betas: &[T],
    rho_in: T,
    rho_outs: &[T],
    per_efold: usize,
) -> Result<Vec<ProbeRecord<T>>> {
    let mut out = Vec::new();
    for &rho_out in rho_outs {
        for &alpha in alphas {
            for &beta in betas {
                let probe = CutoffProbe::new(alpha, beta, rho_in, rho_out)?;
                let mesh = probe.mesh(T::one(), per_efold)?;
                let outcome = cone_stability_probe(profile, &probe, &mesh)?;
                out.push(ProbeRecord { alpha, beta, rho_in, rho_out, outcome });
            }
        }
    }
    Ok(out)
}

/// Closed-form Simons gap `½Δc² - |δc|² + c⁴ - 2c²/r²` for `c² = d/r²`
/// constant on cross-sections: `d (d - (n-2)) / r⁴`.
pub fn simons_inequality_gap<T: Real>(profile: &RadialConeProfile<T>, rs: &[T]) -> Result<Vec<T>> {
    if !(profile.d > T::zero()) {
        return Err(domain("the Simons gap needs d > 0"));
    }
    let d = profile.d;
    let k = d * (d - lit((profile.n - 2) as f64));
    rs.iter().map(|&r| if r > T::zero() { Ok(k / r.powi(4)) } else { Err(domain("radius must be positive")) }).collect()
}

/// Closed form and difference evaluation of the Simons gap at one point of
/// the embedded Simons cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapCrossCheck<T> {
    pub r: T,
    pub closed_form: T,
    pub finite_difference: T,
    /// `|closed - fd| / (c⁴ + 2c²/r²)`.
    pub relative_mismatch: T,
}

/// Evaluates the Simons gap on the cone `{|x'| = |x''|} ⊂ R^{2m}` at radius
/// `r` by differencing `c²` of the level sets of `|x'|² - |x''|²` along the
/// surface, and compares with the closed form. A mismatch above `1e-4`
/// (relative to the size of the curvature terms) is a consistency error.
pub fn simons_gap_cross_check<T: Real>(m: usize, r: T) -> Result<GapCrossCheck<T>> {
    let field = LevelSetField::<T>::simons(m)?;
    let profile = RadialConeProfile::simons(m)?;
    let closed = simons_inequality_gap(&profile, &[r])?[0];
    let n = 2 * m;
    let a: Vec<T> = (0..m).map(|i| lit(0.8 - 0.25 * i as f64)).collect();
    let b: Vec<T> = (0..m).map(|i| lit(0.3 + 0.4 * i as f64)).collect();
    let x = simons_cone_point(&a, &b, r);

    let g = |y: &[T]| second_form_norm_sq(&field, y).unwrap_or(T::nan());
    let h1 = r * lit(1e-4);
    let h2 = r * lit(1e-3);
    // Tangential gradient of c², extended off the surface along the level sets.
    let tangential = |y: &[T]| -> Result<Vec<T>> {
        let grad = fd_gradient(&g, y, h1)?;
        let nu = field.geometry(y)?.normal;
        let dn: T = grad.iter().zip(&nu).map(|(&p, &q)| p * q).fold(T::zero(), |a, b| a + b);
        Ok(grad.iter().zip(&nu).map(|(&p, &q)| p - q * dn).collect())
    };
    let nu = field.geometry(&x)?.normal;
    let v0 = tangential(&x)?;
    // Jacobian of the tangential field by central differences.
    let mut dv = vec![vec![T::zero(); n]; n];
    let mut y = x.clone();
    let two = lit::<T>(2.0);
    for k in 0..n {
        let xk = y[k];
        y[k] = xk + h2;
        let vp = tangential(&y)?;
        y[k] = xk - h2;
        let vm = tangential(&y)?;
        y[k] = xk;
        for i in 0..n {
            dv[i][k] = (vp[i] - vm[i]) / (two * h2);
        }
    }
    let div: T = (0..n).map(|i| dv[i][i]).fold(T::zero(), |a, b| a + b);
    let nn: T = (0..n)
        .map(|i| (0..n).map(|k| nu[i] * dv[i][k] * nu[k]).fold(T::zero(), |a, b| a + b))
        .fold(T::zero(), |a, b| a + b);
    let lap = div - nn;
    let c2 = g(&x);
    let dc_sq = v0.iter().map(|&v| v * v).fold(T::zero(), |a, b| a + b) / (lit::<T>(4.0) * c2);
    let r2 = r * r;
    let fd = lap / two - dc_sq + c2 * c2 - two * c2 / r2;
    let scale = c2 * c2 + two * c2 / r2;
    let mismatch = (closed - fd).abs() / scale;
    if !(mismatch <= lit(1e-4)) {
        return Err(Error::Consistency(format!(
            "Simons gap at r = {}: closed form {:e} vs difference {:e}",
            to_f64(r),
            to_f64(closed),
            to_f64(fd)
        )));
    }
    Ok(GapCrossCheck { r, closed_form: closed, finite_difference: fd, relative_mismatch: mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_curvatures() {
        let f = LevelSetField::<f64>::sphere(3).unwrap();
        let x = [0.6, 0.0, 0.8];
        let g = f.geometry(&x).unwrap();
        assert!((g.mean_curvature - 2.0).abs() < 1e-12);
        assert!((g.second_form_norm_sq - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hyperplane_flat() {
        let f = LevelSetField::<f64>::hyperplane(4).unwrap();
        let g = f.geometry(&[0.3, -1.0, 2.0, 0.0]).unwrap();
        assert_eq!(g.mean_curvature, 0.0);
        assert_eq!(g.second_form_norm_sq, 0.0);
    }

    #[test]
    fn degenerate_gradient_rejected() {
        let f = LevelSetField::<f64>::sphere(3).unwrap();
        match f.geometry(&[0.0, 0.0, 0.0]) {
            Err(Error::DegenerateGradient { grad_norm, .. }) => assert_eq!(grad_norm, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vertex_rejected() {
        let f = LevelSetField::<f64>::simons(2).unwrap();
        assert!(f.geometry(&[1e-4, 0.0, 1e-4, 0.0]).is_err());
    }

    #[test]
    fn calibration_diagonal_zero() {
        for m in 2..7 {
            assert!(calibration_divergence(m, 1.3f64, 1.3).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn gap_closed_form_values() {
        let p = RadialConeProfile::<f64>::new(8, 7.0, "sphere-like").unwrap();
        let g = simons_inequality_gap(&p, &[1.0, 2.0]).unwrap();
        assert!((g[0] - 7.0).abs() < 1e-12);
        assert!((g[1] * 16.0 - g[0]).abs() < 1e-12);
    }

    #[test]
    fn probe_zero_curvature_positive() {
        let p = RadialConeProfile::new(6, 0.0, "flat").unwrap();
        let probe = CutoffProbe::new(0.3, 2.0, 0.01, 10.0).unwrap();
        let mesh = probe.mesh(1.0, 40).unwrap();
        assert!(cone_stability_probe(&p, &probe, &mesh).unwrap().q > 0.0);
    }
}
