//! Rotationally symmetric minimal hypersurfaces of `R^{2m}` as curves in the
//! `(s, t)` quarter plane, `s = |x'|`, `t = |x''|`.
//!
//! The parametric leaves start vertically from `(s0, 0)`. They are written in
//! arc length with the tangent angle `φ` as unknown:
//!
//! `s' = cos φ`, `t' = sin φ`, `φ' = (m-1)(cos φ / t - sin φ / s)`,
//!
//! which keeps `s'² + t'² = 1` exactly.

use crate::error::{domain, Result};
use crate::numerics::{lit, rk4_single, rk_integrate_until, Outcome, Real, StepControl, Trajectory};

/// Why a leaf integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    TauMax,
    /// `s` or `t` exceeded the configured bound.
    Bound,
    /// The curve reached an axis.
    Axis,
    StepUnderflow,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::TauMax => "tau-max",
            Termination::Bound => "bound",
            Termination::Axis => "axis",
            Termination::StepUnderflow => "step-underflow",
        }
    }
}

/// One sample `(τ, s, t, s', t')` of a leaf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafSample<T> {
    pub tau: T,
    pub s: T,
    pub t: T,
    pub ds: T,
    pub dt: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafTrajectory<T> {
    pub m: usize,
    pub s0: T,
    pub samples: Vec<LeafSample<T>>,
    pub termination: Termination,
    /// Parameter values where `s - t` changes sign, refined by bisection.
    pub crossings: Vec<T>,
    angles: Vec<T>,
}

/// Integration settings for a leaf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafOptions<T> {
    pub tau_max: T,
    pub tol: T,
    /// Stop once `s` or `t` exceeds this.
    pub bound: T,
    /// Crossing bisection tolerance in `τ`.
    pub crossing_tol: T,
}

impl<T: Real> LeafOptions<T> {
    pub fn new(tau_max: T, tol: T) -> Self {
        Self { tau_max, tol, bound: lit(1e6), crossing_tol: lit(1e-9) }
    }
}

fn angle_rhs<T: Real>(m: usize) -> impl Fn(T, &[T], &mut [T]) {
    let k = lit::<T>(m as f64 - 1.0);
    move |_, y: &[T], dy: &mut [T]| {
        let (s, t, phi) = (y[0], y[1], y[2]);
        let (sn, cs) = phi.sin_cos();
        dy[0] = cs;
        dy[1] = sn;
        dy[2] = k * (cs / t - sn / s);
    }
}

/// Two-term series of the leaf through `(s0, 0)` at parameter `τ`.
pub fn leaf_series<T: Real>(m: usize, s0: T, tau: T) -> (T, T, T) {
    let k = lit::<T>(m as f64 - 1.0) / (lit::<T>(m as f64) * s0);
    let phi = T::FRAC_PI_2() - k * tau;
    let s = s0 + k * tau * tau / lit(2.0);
    let t = tau - k * k * tau.powi(3) / lit(6.0);
    (s, t, phi)
}

impl<T: Real> LeafTrajectory<T> {
    /// State `(s, t, φ)` at parameter `tau` by one RK4 step from the nearest
    /// sample at or below `tau`.
    pub fn state_at(&self, tau: T) -> Option<[T; 3]> {
        let first = self.samples.first()?;
        let last = self.samples.last()?;
        if tau < first.tau || tau > last.tau {
            return None;
        }
        let k = match self.samples.binary_search_by(|p| p.tau.partial_cmp(&tau).unwrap()) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        let p = self.samples[k];
        let y = [p.s, p.t, self.angles[k]];
        if tau == p.tau {
            return Some(y);
        }
        let out = rk4_single(&angle_rhs::<T>(self.m), p.tau, &y, tau - p.tau);
        Some([out[0], out[1], out[2]])
    }

    pub fn point_at(&self, tau: T) -> Option<(T, T)> {
        self.state_at(tau).map(|y| (y[0], y[1]))
    }

    /// Fraction of samples with `s > t`.
    pub fn side_occupancy(&self) -> T {
        let above = self.samples.iter().filter(|p| p.s > p.t).count();
        lit::<T>(above as f64) / lit(self.samples.len() as f64)
    }
}

/// Integrates the leaf that leaves `(s0, 0)` vertically.
pub fn integrate_leaf_parametric<T: Real>(m: usize, s0: T, opts: LeafOptions<T>) -> Result<LeafTrajectory<T>> {
    if m < 2 {
        return Err(domain("leaves need m >= 2"));
    }
    if !(s0 > T::zero()) || !(opts.tau_max > T::zero()) || !(opts.tol > T::zero()) {
        return Err(domain("need s0 > 0, tau_max > 0 and tol > 0"));
    }
    let tau0 = lit::<T>(1e-4) * s0;
    if !(opts.tau_max > tau0) {
        return Err(domain("tau_max must exceed the series launch point"));
    }
    let (s, t, phi) = leaf_series(m, s0, tau0);
    let rhs = angle_rhs::<T>(m);
    let span = opts.tau_max - tau0;
    let control = StepControl::Adaptive {
        tol: opts.tol,
        h_init: tau0,
        h_min: s0 * lit(1e-14),
        h_max: s0 * lit(0.05),
        max_steps: 10_000_000,
    };
    let bound = opts.bound;
    let mut hit = None;
    let traj: Trajectory<T> = rk_integrate_until(&rhs, &[s, t, phi], (tau0, tau0 + span), control, |_, y| {
        if y[0] <= T::zero() || y[1] <= T::zero() {
            hit = Some(Termination::Axis);
            true
        } else if y[0] > bound || y[1] > bound {
            hit = Some(Termination::Bound);
            true
        } else {
            false
        }
    })?;
    let termination = match traj.outcome {
        Outcome::Completed => Termination::TauMax,
        Outcome::Stopped => hit.unwrap_or(Termination::Bound),
        Outcome::StepUnderflow | Outcome::StepLimit => Termination::StepUnderflow,
    };
    let mut samples = Vec::with_capacity(traj.len());
    let mut angles = Vec::with_capacity(traj.len());
    for (tau, y) in traj.ts.iter().zip(&traj.ys) {
        // Samples past an axis crossing are dropped so s, t stay nonnegative.
        if y[0] < T::zero() || y[1] < T::zero() {
            break;
        }
        let (sn, cs) = y[2].sin_cos();
        samples.push(LeafSample { tau: *tau, s: y[0], t: y[1], ds: cs, dt: sn });
        angles.push(y[2]);
    }
    let mut leaf = LeafTrajectory { m, s0, samples, termination, crossings: Vec::new(), angles };
    leaf.crossings = find_crossings(&leaf, opts.crossing_tol);
    Ok(leaf)
}

fn find_crossings<T: Real>(leaf: &LeafTrajectory<T>, tol: T) -> Vec<T> {
    let mut out = Vec::new();
    let diff = |tau: T| leaf.point_at(tau).map(|(s, t)| s - t).unwrap_or(T::nan());
    for w in leaf.samples.windows(2) {
        let (da, db) = (w[0].s - w[0].t, w[1].s - w[1].t);
        if da == T::zero() {
            out.push(w[0].tau);
            continue;
        }
        if da * db < T::zero() {
            let (mut lo, mut hi) = (w[0].tau, w[1].tau);
            let sign_lo = da > T::zero();
            while hi - lo > tol {
                let mid = (lo + hi) / lit(2.0);
                if (diff(mid) > T::zero()) == sign_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push((lo + hi) / lit(2.0));
        }
    }
    out
}

/// Why an angular integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularTermination {
    Completed,
    /// `|z'|` exceeded the blow-up threshold.
    BlowUp,
}

/// A leaf written as `r = e^{z(θ)}` in polar coordinates of the quarter plane.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularLeaf<T> {
    pub m: usize,
    pub theta: Vec<T>,
    pub z: Vec<T>,
    pub dz: Vec<T>,
    pub termination: AngularTermination,
}

impl<T: Real> AngularLeaf<T> {
    /// `(s, t) = e^z (cos θ, sin θ)` at every sample.
    pub fn points(&self) -> Vec<(T, T)> {
        self.theta.iter().zip(&self.z).map(|(&th, &z)| (z.exp() * th.cos(), z.exp() * th.sin())).collect()
    }

    pub fn last(&self) -> (T, T, T) {
        let k = self.theta.len() - 1;
        (self.theta[k], self.z[k], self.dz[k])
    }
}

/// Right-hand side of `z'' = (1 + z'²)((2m-1) - 2(m-1) cot(2θ) z')`.
fn angular_rhs<T: Real>(m: usize) -> impl Fn(T, &[T], &mut [T]) {
    let a = lit::<T>(2.0 * m as f64 - 1.0);
    let b = lit::<T>(2.0 * (m as f64 - 1.0));
    move |th: T, y: &[T], dy: &mut [T]| {
        let p = y[1];
        let cot = (th + th).cos() / (th + th).sin();
        dy[0] = p;
        dy[1] = (T::one() + p * p) * (a - b * cot * p);
    }
}

/// Integrates the angular form from `theta.0` to `theta.1` with
/// `z(theta.0) = z0`, `z'(theta.0) = dz0`.
pub fn integrate_leaf_angular<T: Real>(
    m: usize,
    z0: T,
    dz0: T,
    theta: (T, T),
    tol: T,
    margin: T,
) -> Result<AngularLeaf<T>> {
    if m < 2 {
        return Err(domain("leaves need m >= 2"));
    }
    let (a, b) = theta;
    let hi = T::FRAC_PI_2() - margin;
    if !(a < b) || a < margin || b > hi {
        return Err(domain("theta range must be increasing and inside (margin, pi/2 - margin)"));
    }
    let blow = lit::<T>(1e6);
    let control = StepControl::Adaptive {
        tol,
        h_init: (b - a) * lit(1e-3),
        h_min: (b - a) * lit(1e-14),
        h_max: (b - a) * lit(0.01),
        max_steps: 10_000_000,
    };
    let traj = rk_integrate_until(angular_rhs::<T>(m), &[z0, dz0], (a, b), control, |_, y| y[1].abs() > blow)?;
    let termination = match traj.outcome {
        Outcome::Completed => AngularTermination::Completed,
        _ => AngularTermination::BlowUp,
    };
    Ok(AngularLeaf { m, theta: traj.ts.clone(), z: traj.component(0), dz: traj.component(1), termination })
}

/// Polar data `(θ, z, z')` of a parametric leaf at parameter `tau`.
pub fn polar_data<T: Real>(leaf: &LeafTrajectory<T>, tau: T) -> Option<(T, T, T)> {
    let y = leaf.state_at(tau)?;
    let (s, t, phi) = (y[0], y[1], y[2]);
    let (dt, ds) = phi.sin_cos();
    let r2 = s * s + t * t;
    let dr_over_r = (s * ds + t * dt) / r2;
    let dtheta = (s * dt - t * ds) / r2;
    Some((t.atan2(s), lit::<T>(0.5) * r2.ln(), dr_over_r / dtheta))
}

/// Per-leaf summary in a [`FoliationReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct LeafSummary<T> {
    pub s0: T,
    pub crossings: usize,
    pub termination: Termination,
    pub side_occupancy: T,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDistance<T> {
    pub first: usize,
    pub second: usize,
    /// Minimum distance between the sampled curves on the annulus; `None`
    /// when one curve has no samples there.
    pub min_distance: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoliationReport<T> {
    pub m: usize,
    pub leaves: Vec<LeafSummary<T>>,
    pub pairs: Vec<PairDistance<T>>,
}

fn segment_distance<T: Real>(p: (T, T), a: (T, T), b: (T, T)) -> T {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let u = if len2 > T::zero() {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let (qx, qy) = (a.0 + u * dx, a.1 + u * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

fn annulus_points<T: Real>(leaf: &LeafTrajectory<T>, annulus: (T, T)) -> Vec<(T, T)> {
    leaf.samples
        .iter()
        .filter(|p| {
            let r = (p.s * p.s + p.t * p.t).sqrt();
            r >= annulus.0 && r <= annulus.1
        })
        .map(|p| (p.s, p.t))
        .collect()
}

/// Minimum distance between two polylines.
pub fn polyline_distance<T: Real>(a: &[(T, T)], b: &[(T, T)]) -> Option<T> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let mut best = T::infinity();
    for (x, y) in [(a, b), (b, a)] {
        for &p in x {
            if y.len() == 1 {
                best = best.min(segment_distance(p, y[0], y[0]));
            }
            for w in y.windows(2) {
                best = best.min(segment_distance(p, w[0], w[1]));
            }
        }
    }
    Some(best)
}

/// Integrates one leaf per `s0` and reports crossings and pairwise
/// separation on the annulus `r ∈ [annulus.0, annulus.1]`.
pub fn foliation_report<T: Real>(
    m: usize,
    s0s: &[T],
    opts: LeafOptions<T>,
    annulus: (T, T),
) -> Result<(FoliationReport<T>, Vec<LeafTrajectory<T>>)> {
    if s0s.is_empty() || s0s.windows(2).any(|w| !(w[1] > w[0])) || !(s0s[0] > T::zero()) {
        return Err(domain("s0 list must be positive and strictly increasing"));
    }
    let leaves: Vec<LeafTrajectory<T>> =
        s0s.iter().map(|&s0| integrate_leaf_parametric(m, s0, opts)).collect::<Result<_>>()?;
    let summaries = leaves
        .iter()
        .map(|l| LeafSummary {
            s0: l.s0,
            crossings: l.crossings.len(),
            termination: l.termination,
            side_occupancy: l.side_occupancy(),
            samples: l.samples.len(),
        })
        .collect();
    let pts: Vec<Vec<(T, T)>> = leaves.iter().map(|l| annulus_points(l, annulus)).collect();
    let mut pairs = Vec::new();
    for i in 0..leaves.len() {
        for j in i + 1..leaves.len() {
            pairs.push(PairDistance { first: i, second: j, min_distance: polyline_distance(&pts[i], &pts[j]) });
        }
    }
    Ok((FoliationReport { m, leaves: summaries, pairs }, leaves))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_matches_arc_length() {
        let (s, t, phi) = leaf_series(3, 1.0f64, 1e-4);
        assert!(s > 1.0 && t > 0.0);
        assert!((phi - std::f64::consts::FRAC_PI_2).abs() < 1e-4);
    }

    #[test]
    fn normalization_exact() {
        let leaf = integrate_leaf_parametric(3, 1.0f64, LeafOptions::new(5.0, 1e-10)).unwrap();
        for p in &leaf.samples {
            assert!((p.ds * p.ds + p.dt * p.dt - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(integrate_leaf_parametric(1, 1.0f64, LeafOptions::new(5.0, 1e-10)).is_err());
        assert!(integrate_leaf_parametric(2, -1.0f64, LeafOptions::new(5.0, 1e-10)).is_err());
    }
}
