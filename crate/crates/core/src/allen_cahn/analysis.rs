use super::saddle::SaddleField;
use crate::error::{domain, Result};
use crate::numerics::{fit_slope, gauss3, lit, sphere_area, Real};

/// Energies `E(R)` of the saddle solution in `B_R ⊂ R^{2m}` and the
/// least-squares slope of `log E` against `log R`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyFit<T> {
    pub radii: Vec<T>,
    pub energies: Vec<T>,
    pub exponent: T,
}

/// `κ_m ∫∫ s^{m-1} t^{m-1} (½|∇u|² + ¼(1-u²)²)` over the quadrant part of
/// each disk `s² + t² <= R²`, with `κ_m = |S^{m-1}|²`.
///
/// Cells carry the bilinear interpolant and a 3×3 Gauss rule; points outside
/// the disk are dropped.
pub fn saddle_energies<T: Real>(field: &SaddleField<T>, radii: &[T]) -> Result<Vec<T>> {
    let l = field.length();
    if radii.iter().any(|&r| !(r > T::zero() && r <= l)) {
        return Err(domain("radii must lie in (0, L]"));
    }
    let m = field.m();
    let h = field.spacing();
    let n = field.cells();
    let (g, w) = gauss3::<T>();
    let half = lit::<T>(0.5);
    let quarter = lit::<T>(0.25);
    let r_max = radii.iter().fold(T::zero(), |a, &r| a.max(r));
    let e = (m - 1) as i32;
    let mut out = vec![T::zero(); radii.len()];
    for i in 0..n {
        let s0 = h * lit(i as f64);
        if s0 > r_max {
            break;
        }
        for j in 0..=i {
            let t0 = h * lit(j as f64);
            if s0 * s0 + t0 * t0 > r_max * r_max {
                break;
            }
            // Off-diagonal cells count twice for the mirror image.
            let mult = if j == i { T::one() } else { lit(2.0) };
            let (c00, c10, c01, c11) =
                (field.node(i, j), field.node(i + 1, j), field.node(i, j + 1), field.node(i + 1, j + 1));
            for (ga, wa) in g.iter().zip(&w) {
                let a = half * (T::one() + *ga);
                for (gb, wb) in g.iter().zip(&w) {
                    let b = half * (T::one() + *gb);
                    let (s, t) = (s0 + a * h, t0 + b * h);
                    let rr = s * s + t * t;
                    let u = (T::one() - a) * (T::one() - b) * c00
                        + a * (T::one() - b) * c10
                        + (T::one() - a) * b * c01
                        + a * b * c11;
                    let us = ((T::one() - b) * (c10 - c00) + b * (c11 - c01)) / h;
                    let ut = ((T::one() - a) * (c01 - c00) + a * (c11 - c10)) / h;
                    let dens = half * (us * us + ut * ut) + quarter * (T::one() - u * u).powi(2);
                    let val = mult * *wa * *wb * quarter * h * h * s.powi(e) * t.powi(e) * dens;
                    for (k, &r) in radii.iter().enumerate() {
                        if rr <= r * r {
                            out[k] += val;
                        }
                    }
                }
            }
        }
    }
    let kappa = sphere_area::<T>(m).powi(2);
    Ok(out.into_iter().map(|v| v * kappa).collect())
}

/// Energies at the given radii and the fitted growth exponent.
pub fn energy_growth_fit<T: Real>(field: &SaddleField<T>, radii: &[T]) -> Result<EnergyFit<T>> {
    if radii.len() < 3 {
        return Err(domain("energy fit needs at least 3 radii"));
    }
    let energies = saddle_energies(field, radii)?;
    if energies.iter().any(|&e| !(e > T::zero())) {
        return Err(domain("energy vanished at some radius"));
    }
    let lx: Vec<T> = radii.iter().map(|r| r.ln()).collect();
    let ly: Vec<T> = energies.iter().map(|e| e.ln()).collect();
    Ok(EnergyFit { radii: radii.to_vec(), energies, exponent: fit_slope(&lx, &ly) })
}

/// `φ = t^{-b} u_s - s^{-b} u_t` sampled on the nodes of a field.
#[derive(Debug, Clone, PartialEq)]
pub struct SupersolutionProbe<T> {
    pub b: T,
    /// `(i, j, φ, (Δ + f'(u))φ)` on nodes with `t > 0`.
    pub samples: Vec<(usize, usize, T, T)>,
}

/// Nodes on which the supersolution test is evaluated: `1 <= j <= i`,
/// `t >= t_min` and `s² + t² <= r_max²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRegion<T> {
    pub t_min: T,
    pub r_max: T,
}

/// `(Δ + f'(u))φ` in `R^{2m}` written through derivatives of `u` up to second
/// order, using that `u` solves the equation:
///
/// `t^{-b}[(m-1)u_s/s² + b(b+2-m)u_s/t² - 2b u_st/t]
///  - s^{-b}[(m-1)u_t/t² + b(b+2-m)u_t/s² - 2b u_st/s]`.
pub fn linearized_phi<T: Real>(m: usize, b: T, s: T, t: T, us: T, ut: T, ust: T) -> T {
    let mm = lit::<T>(m as f64 - 1.0);
    let two_b = b + b;
    let c = b * (b + lit(2.0) - lit(m as f64));
    let tb = t.powf(-b);
    let sb = s.powf(-b);
    tb * (mm * us / (s * s) + c * us / (t * t) - two_b * ust / t)
        - sb * (mm * ut / (t * t) + c * ut / (s * s) - two_b * ust / s)
}

pub fn supersolution_probe<T: Real>(
    field: &SaddleField<T>,
    b: T,
    region: SampleRegion<T>,
) -> Result<SupersolutionProbe<T>> {
    if !(b > T::zero()) {
        return Err(domain("exponent b must be positive"));
    }
    if !(region.t_min > T::zero()) {
        return Err(domain("the sample set must avoid the axes"));
    }
    let n = field.cells();
    let h = field.spacing();
    let mut samples = Vec::new();
    for i in 1..n {
        for j in 1..=i {
            let (s, t) = (h * lit(i as f64), h * lit(j as f64));
            if t < region.t_min || s * s + t * t > region.r_max * region.r_max {
                continue;
            }
            let (us, ut, ust) = field.derivatives(i, j);
            let phi = t.powf(-b) * us - s.powf(-b) * ut;
            let lphi = linearized_phi(field.m(), b, s, t, us, ut, ust);
            samples.push((i, j, phi, lphi));
        }
    }
    if samples.is_empty() {
        return Err(domain("sample region contains no nodes"));
    }
    Ok(SupersolutionProbe { b, samples })
}

impl<T: Real> SupersolutionProbe<T> {
    pub fn min_phi(&self) -> T {
        self.samples.iter().fold(T::infinity(), |a, s| a.min(s.2))
    }

    pub fn max_defect(&self) -> T {
        self.samples.iter().fold(T::neg_infinity(), |a, s| a.max(s.3))
    }
}

/// Radial bump in `r = |(s, t)|` times an angular factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityProbe<T> {
    pub center: T,
    pub half_width: T,
    pub angular: AngularMode,
    pub amplitude: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularMode {
    Uniform,
    /// `sin²(2θ)`, vanishing on both axes.
    VanishOnAxes,
    /// `cos(2θ)`, odd across the cone.
    OddAcrossCone,
}

impl<T: Real> StabilityProbe<T> {
    pub fn new(center: T, half_width: T, angular: AngularMode) -> Result<Self> {
        if !(half_width > T::zero() && center >= half_width) {
            return Err(domain("probe support must lie in r >= 0"));
        }
        Ok(Self { center, half_width, angular, amplitude: T::one() })
    }

    pub fn scaled(self, amplitude: T) -> Self {
        Self { amplitude, ..self }
    }

    /// `(η, η')` of the radial factor `A(1 - q²)²`, `q = (r - c)/w`.
    fn radial(&self, r: T) -> (T, T) {
        let q = (r - self.center) / self.half_width;
        if q.abs() >= T::one() {
            return (T::zero(), T::zero());
        }
        let p = T::one() - q * q;
        (self.amplitude * p * p, -self.amplitude * lit::<T>(4.0) * p * q / self.half_width)
    }

    fn angle(&self, th: T) -> (T, T) {
        let two = lit::<T>(2.0);
        match self.angular {
            AngularMode::Uniform => (T::one(), T::zero()),
            AngularMode::VanishOnAxes => {
                let s2 = (two * th).sin();
                (s2 * s2, lit::<T>(4.0) * s2 * (two * th).cos())
            }
            AngularMode::OddAcrossCone => ((two * th).cos(), -two * (two * th).sin()),
        }
    }
}

/// `∫(|∇ξ|² - f'(u)ξ²) / ∫ξ²` with the measure `s^{m-1}t^{m-1} ds dt`,
/// `f'(u) = 1 - 3u²`, computed in polar coordinates on the quadrant.
pub fn rayleigh_quotient<T: Real>(field: &SaddleField<T>, probe: &StabilityProbe<T>) -> Result<T> {
    let l = field.length();
    if probe.center + probe.half_width > l {
        return Err(domain("probe support leaves the computed region"));
    }
    let m = field.m();
    let e = (m - 1) as i32;
    let (g, w) = gauss3::<T>();
    let half = lit::<T>(0.5);
    let (r0, r1) = (probe.center - probe.half_width, probe.center + probe.half_width);
    let nr = 48usize;
    let nth = 384usize;
    let dr = (r1 - r0) / lit(nr as f64);
    let dth = T::FRAC_PI_2() / lit(nth as f64);
    let (mut num, mut den) = (T::zero(), T::zero());
    for a in 0..nr {
        let ra = r0 + dr * lit(a as f64);
        for (ga, wa) in g.iter().zip(&w) {
            let r = ra + half * dr * (T::one() + *ga);
            let (eta, deta) = probe.radial(r);
            if eta == T::zero() && deta == T::zero() {
                continue;
            }
            for b in 0..nth {
                let tb = dth * lit(b as f64);
                for (gb, wb) in g.iter().zip(&w) {
                    let th = tb + half * dth * (T::one() + *gb);
                    let (s, t) = (r * th.cos(), r * th.sin());
                    let (chi, dchi) = probe.angle(th);
                    let u = field.value_at(s, t)?;
                    let fp = T::one() - lit::<T>(3.0) * u * u;
                    let xi2 = eta * eta * chi * chi;
                    let grad2 = deta * deta * chi * chi + eta * eta * dchi * dchi / (r * r);
                    let wt = *wa * *wb * s.powi(e) * t.powi(e) * r;
                    num += wt * (grad2 - fp * xi2);
                    den += wt * xi2;
                }
            }
        }
    }
    if !(den > T::zero()) {
        return Err(domain("probe has zero weighted norm"));
    }
    Ok(num / den)
}

/// Outcome of the supersolution test at one exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BRecord<T> {
    pub b: T,
    pub min_phi: T,
    pub max_defect: T,
    pub witness: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupersolutionReport<T> {
    pub records: Vec<BRecord<T>>,
    /// Passing exponent (`min φ > 0`, defect `<= defect_tol`) with the most
    /// negative defect.
    pub witness: Option<T>,
    pub quotients: Vec<(StabilityProbe<T>, T)>,
}

/// Scans `b`, refines by bisection between neighbours whose outcome
/// differs, and evaluates the probe quotients.
pub fn supersolution_check<T: Real>(
    field: &SaddleField<T>,
    bs: &[T],
    region: SampleRegion<T>,
    defect_tol: T,
    probes: &[StabilityProbe<T>],
) -> Result<SupersolutionReport<T>> {
    let eval = |b: T| -> Result<BRecord<T>> {
        let p = supersolution_probe(field, b, region)?;
        let (min_phi, max_defect) = (p.min_phi(), p.max_defect());
        Ok(BRecord { b, min_phi, max_defect, witness: min_phi > T::zero() && max_defect <= defect_tol })
    };
    // Positive exactly when the record fails.
    let score = |r: &BRecord<T>| (-r.min_phi).max(r.max_defect - defect_tol);
    let mut records: Vec<BRecord<T>> = bs.iter().map(|&b| eval(b)).collect::<Result<_>>()?;
    let base = records.clone();
    for pair in base.windows(2) {
        let (mut lo, mut hi) = (pair[0], pair[1]);
        if (score(&lo) > T::zero()) == (score(&hi) > T::zero()) {
            continue;
        }
        for _ in 0..20 {
            let mid = eval(lit::<T>(0.5) * (lo.b + hi.b))?;
            records.push(mid);
            if (score(&mid) > T::zero()) == (score(&lo) > T::zero()) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    records.sort_by(|a, b| a.b.partial_cmp(&b.b).unwrap());
    let witness = records
        .iter()
        .filter(|r| r.witness)
        .min_by(|a, b| a.max_defect.partial_cmp(&b.max_defect).unwrap())
        .map(|r| r.b);
    let quotients = probes.iter().map(|p| rayleigh_quotient(field, p).map(|q| (*p, q))).collect::<Result<_>>()?;
    Ok(SupersolutionReport { records, witness, quotients })
}
