use super::{lit, point_f64, to_f64, Real};
use crate::error::{domain, Error, Result};

/// Step-size policy for [`rk_integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl<T> {
    /// Classical RK4 with a constant step (the last step is shortened to hit
    /// the end of the span).
    Fixed { h: T },
    /// RK4 with step-doubling error control. The local error per step is kept
    /// below `tol * (1 + |y|)` componentwise.
    Adaptive { tol: T, h_init: T, h_min: T, h_max: T, max_steps: usize },
}

impl<T: Real> StepControl<T> {
    /// Adaptive control with step bounds derived from the span length.
    pub fn adaptive(tol: T, span_len: T) -> Self {
        let len = span_len.abs();
        StepControl::Adaptive {
            tol,
            h_init: len * lit(1e-3),
            h_min: len * lit(1e-14),
            h_max: len,
            max_steps: 2_000_000,
        }
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    /// The caller's stop predicate fired.
    Stopped,
    /// The adaptive controller needed a step below `h_min`, or the right-hand
    /// side became non-finite.
    StepUnderflow,
    StepLimit,
}

/// Accepted steps of an integration, including the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub ts: Vec<T>,
    pub ys: Vec<Vec<T>>,
    pub outcome: Outcome,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn last_t(&self) -> T {
        self.ts[self.ts.len() - 1]
    }

    pub fn last_y(&self) -> &[T] {
        &self.ys[self.ys.len() - 1]
    }

    /// Component `k` of every sample.
    pub fn component(&self, k: usize) -> Vec<T> {
        self.ys.iter().map(|y| y[k]).collect()
    }
}

fn rk4_step<T, F>(rhs: &F, t: T, y: &[T], h: T, out: &mut [T], work: &mut [Vec<T>; 5])
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
{
    let half = lit::<T>(0.5);
    let n = y.len();
    let [k1, k2, k3, k4, tmp] = work;
    rhs(t, y, k1);
    for i in 0..n {
        tmp[i] = y[i] + half * h * k1[i];
    }
    rhs(t + half * h, tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + half * h * k2[i];
    }
    rhs(t + half * h, tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    rhs(t + h, tmp, k4);
    let sixth = h / lit(6.0);
    for i in 0..n {
        out[i] = y[i] + sixth * (k1[i] + lit::<T>(2.0) * (k2[i] + k3[i]) + k4[i]);
    }
}

/// Integrates `y' = rhs(t, y)` over `span`; step underflow is an error.
pub fn rk_integrate<T, F>(rhs: F, y0: &[T], span: (T, T), control: StepControl<T>) -> Result<Trajectory<T>>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
{
    let traj = rk_integrate_until(rhs, y0, span, control, |_, _| false)?;
    match traj.outcome {
        Outcome::StepUnderflow | Outcome::StepLimit => Err(Error::Integration {
            t: to_f64(traj.last_t()),
            state: point_f64(traj.last_y()),
            reason: format!("{:?}", traj.outcome),
        }),
        _ => Ok(traj),
    }
}

/// Like [`rk_integrate`], but returns the partial trajectory on failure and
/// stops early once `stop(t, y)` holds at an accepted step.
pub fn rk_integrate_until<T, F, S>(
    rhs: F,
    y0: &[T],
    span: (T, T),
    control: StepControl<T>,
    mut stop: S,
) -> Result<Trajectory<T>>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
    S: FnMut(T, &[T]) -> bool,
{
    let (t0, t1) = span;
    if !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
        return Err(domain("integration span must be finite and nondegenerate"));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(domain("initial state must be finite"));
    }
    let dir = if t1 > t0 { T::one() } else { -T::one() };
    let n = y0.len();
    let mut work: [Vec<T>; 5] = std::array::from_fn(|_| vec![T::zero(); n]);
    let mut ts = vec![t0];
    let mut ys = vec![y0.to_vec()];
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut next = vec![T::zero(); n];
    let remaining = |t: T| (t1 - t) * dir;

    match control {
        StepControl::Fixed { h } => {
            if !(h > T::zero()) {
                return Err(domain("fixed step must be positive"));
            }
            let eps = h * lit(1e-9);
            while remaining(t) > eps {
                let step = h.min(remaining(t)) * dir;
                rk4_step(&rhs, t, &y, step, &mut next, &mut work);
                if next.iter().any(|v| !v.is_finite()) {
                    return Ok(Trajectory { ts, ys, outcome: Outcome::StepUnderflow });
                }
                t = if remaining(t) <= h { t1 } else { t + step };
                std::mem::swap(&mut y, &mut next);
                ts.push(t);
                ys.push(y.clone());
                if stop(t, &y) {
                    return Ok(Trajectory { ts, ys, outcome: Outcome::Stopped });
                }
            }
            Ok(Trajectory { ts, ys, outcome: Outcome::Completed })
        }
        StepControl::Adaptive { tol, h_init, h_min, h_max, max_steps } => {
            if !(tol > T::zero() && h_min > T::zero() && h_max >= h_min) {
                return Err(domain("adaptive control needs tol > 0 and 0 < h_min <= h_max"));
            }
            let mut h = h_init.max(h_min).min(h_max);
            let mut half = vec![T::zero(); n];
            let mut full = vec![T::zero(); n];
            let mut steps = 0usize;
            let fifteen = lit::<T>(15.0);
            let half_t = lit::<T>(0.5);
            loop {
                let rem = remaining(t);
                if rem <= h_min * lit(1e-3) {
                    return Ok(Trajectory { ts, ys, outcome: Outcome::Completed });
                }
                if steps >= max_steps {
                    return Ok(Trajectory { ts, ys, outcome: Outcome::StepLimit });
                }
                let last = h >= rem;
                let hs = if last { rem } else { h };
                let step = hs * dir;
                rk4_step(&rhs, t, &y, step, &mut full, &mut work);
                rk4_step(&rhs, t, &y, half_t * step, &mut half, &mut work);
                rk4_step(&rhs, t + half_t * step, &half, half_t * step, &mut next, &mut work);
                let mut err = T::zero();
                let mut finite = true;
                for i in 0..n {
                    if !(next[i].is_finite() && full[i].is_finite()) {
                        finite = false;
                        break;
                    }
                    let scale = tol * (T::one() + y[i].abs().max(next[i].abs()));
                    err = err.max((next[i] - full[i]).abs() / fifteen / scale);
                }
                if !finite {
                    if hs <= h_min {
                        return Ok(Trajectory { ts, ys, outcome: Outcome::StepUnderflow });
                    }
                    h = (hs * lit(0.25)).max(h_min);
                    continue;
                }
                if err <= T::one() {
                    for i in 0..n {
                        let corr = (next[i] - full[i]) / fifteen;
                        next[i] += corr;
                    }
                    t = if last { t1 } else { t + step };
                    std::mem::swap(&mut y, &mut next);
                    ts.push(t);
                    ys.push(y.clone());
                    steps += 1;
                    if stop(t, &y) {
                        return Ok(Trajectory { ts, ys, outcome: Outcome::Stopped });
                    }
                    if last {
                        return Ok(Trajectory { ts, ys, outcome: Outcome::Completed });
                    }
                    let grow =
                        if err > T::zero() { (lit::<T>(0.9) * err.powf(lit(-0.2))).min(lit(5.0)) } else { lit(5.0) };
                    h = (hs * grow.max(lit(0.2))).min(h_max).max(h_min);
                } else {
                    if hs <= h_min {
                        return Ok(Trajectory { ts, ys, outcome: Outcome::StepUnderflow });
                    }
                    let shrink = (lit::<T>(0.9) * err.powf(lit(-0.2))).max(lit(0.2));
                    h = (hs * shrink).max(h_min);
                }
            }
        }
    }
}

/// One RK4 step of size `dt` from `(t, y)`; used for dense output between
/// accepted samples.
pub(crate) fn rk4_single<T, F>(rhs: &F, t: T, y: &[T], dt: T) -> Vec<T>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
{
    let n = y.len();
    let mut work: [Vec<T>; 5] = std::array::from_fn(|_| vec![T::zero(); n]);
    let mut out = vec![T::zero(); n];
    rk4_step(rhs, t, y, dt, &mut out, &mut work);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_rhs(_: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[0];
    }

    #[test]
    fn exponential_adaptive() {
        let tr = rk_integrate(exp_rhs, &[1.0], (0.0, 1.0), StepControl::adaptive(1e-10, 1.0)).unwrap();
        assert!((tr.last_y()[0] - std::f64::consts::E).abs() < 1e-8);
        assert_eq!(tr.last_t(), 1.0);
    }

    #[test]
    fn zero_rhs_is_constant() {
        let tr =
            rk_integrate(|_, _: &[f64], dy: &mut [f64]| dy[0] = 0.0, &[2.5], (0.0, 3.0), StepControl::Fixed { h: 0.1 })
                .unwrap();
        assert!(tr.ys.iter().all(|y| y[0] == 2.5));
    }

    #[test]
    fn oscillator_period() {
        let tp = 2.0 * std::f64::consts::PI;
        let tr = rk_integrate(
            |_, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            &[1.0, 0.0],
            (0.0, tp),
            StepControl::adaptive(1e-10, tp),
        )
        .unwrap();
        let y = tr.last_y();
        assert!((y[0] - 1.0).abs() < 1e-6 && y[1].abs() < 1e-6);
    }

    #[test]
    fn backward_integration() {
        let tr = rk_integrate(exp_rhs, &[1.0], (1.0, 0.0), StepControl::Fixed { h: 0.01 }).unwrap();
        assert!((tr.last_y()[0] - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn blow_up_reports_failure() {
        // y' = y², y(0) = 1 blows up at t = 1.
        let err = rk_integrate(
            |_, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0],
            &[1.0],
            (0.0, 2.0),
            StepControl::adaptive(1e-8, 2.0),
        )
        .unwrap_err();
        match err {
            Error::Integration { t, .. } => assert!((t - 1.0).abs() < 1e-6, "{t}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stop_predicate() {
        let tr = rk_integrate_until(exp_rhs, &[1.0], (0.0, 10.0), StepControl::Fixed { h: 0.01 }, |_, y| y[0] > 2.0)
            .unwrap();
        assert_eq!(tr.outcome, Outcome::Stopped);
        assert!(tr.last_t() > 0.69 && tr.last_t() < 0.71);
    }
}
