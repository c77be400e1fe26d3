//! Allen-Cahn equation `-Δu = u - u³`: the one-dimensional layer, the
//! saddle solution in `R^{2m}` computed in the `(s, t)` variables, its energy
//! growth, and a supersolution test for its stability.

mod analysis;
mod saddle;

pub use analysis::{
    energy_growth_fit, linearized_phi, rayleigh_quotient, saddle_energies, supersolution_check, supersolution_probe,
    AngularMode, BRecord, EnergyFit, SampleRegion, StabilityProbe, SupersolutionProbe, SupersolutionReport,
};
pub use saddle::{far_field, solve_saddle, solve_saddle_with, SaddleField, SaddleOptions};

use crate::error::{domain, Result};
use crate::numerics::{gauss3, gauss_cells, lit, sphere_area, Mesh1D, Real};

/// The increasing layer `tanh(y/√2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LayerProfile;

impl LayerProfile {
    pub fn value<T: Real>(y: T) -> T {
        (y / T::SQRT_2()).tanh()
    }

    pub fn derivative<T: Real>(y: T) -> T {
        let u = Self::value(y);
        (T::one() - u * u) / T::SQRT_2()
    }

    pub fn second_derivative<T: Real>(y: T) -> T {
        let u = Self::value(y);
        -u * (T::one() - u * u)
    }
}

/// Double-well potential `¼(1 - u²)²`.
pub fn double_well<T: Real>(u: T) -> T {
    let a = T::one() - u * u;
    lit::<T>(0.25) * a * a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerCheck<T> {
    pub max_residual: T,
    pub energy: T,
}

/// Residual of `-u'' - (u - u³)` on 4001 uniform nodes of `[-20, 20]` and the
/// one-dimensional energy `∫ ½u'² + ¼(1-u²)²` by Gauss cells.
pub fn layer_check<T: Real>() -> Result<LayerCheck<T>> {
    let mesh = Mesh1D::uniform(lit(-20.0), lit(20.0), 4001)?;
    let max_residual = mesh.nodes().iter().fold(T::zero(), |a: T, &y: &T| {
        let u = LayerProfile::value(y);
        let r = -LayerProfile::second_derivative(y) - (u - u * u * u);
        a.max(r.abs())
    });
    let energy = gauss_cells(
        |y| {
            let d = LayerProfile::derivative(y);
            lit::<T>(0.5) * d * d + double_well(LayerProfile::value(y))
        },
        &mesh,
    );
    Ok(LayerCheck { max_residual, energy })
}

/// Energies of the layer `u(x) = u*(x_n)` and of the competitor
/// `v_R = (1 - φ_R)u + φ_R` in the ball `B_R ⊂ R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalityComparison<T> {
    pub n: usize,
    pub radius: T,
    pub layer_energy: T,
    pub competitor_energy: T,
    /// Competitor energy inside `B_{R-1}`, where it is identically 1.
    pub competitor_inner_energy: T,
}

/// `φ_R`: 1 on `B_{R-1}`, 0 outside `B_R`, a cubic smoothstep between with
/// slope at most 1.5. Returns `(φ, dφ/dρ)`.
pub fn cutoff_ramp<T: Real>(rho: T, radius: T) -> (T, T) {
    let tau = radius - rho;
    if tau >= T::one() {
        (T::one(), T::zero())
    } else if tau <= T::zero() {
        (T::zero(), T::zero())
    } else {
        let (two, three, six) = (lit::<T>(2.0), lit::<T>(3.0), lit::<T>(6.0));
        (three * tau * tau - two * tau * tau * tau, -(six * tau - six * tau * tau))
    }
}

/// Integrates `f(y, q)` against `|S^{n-2}| q^{n-2} dq dy` over the half disk
/// `y² + q² <= R²`, `q >= 0`, returning the parts inside and outside `B_{R-1}`.
fn half_disk_integral<T: Real, F: Fn(T, T) -> T>(n: usize, radius: T, f: F) -> (T, T) {
    let (g, w) = gauss3::<T>();
    let half = lit::<T>(0.5);
    let inner = radius - T::one();
    let mut breaks = vec![-radius, -inner, T::zero(), inner, radius];
    breaks.dedup();
    let panel = lit::<T>(0.1);
    let e = (n - 2) as i32;
    let q_panels = 8usize;
    let segment = |a: T, b: T, y: T| -> T {
        if !(b > a) {
            return T::zero();
        }
        let dq = (b - a) / lit(q_panels as f64);
        let mut acc = T::zero();
        for k in 0..q_panels {
            let q0 = a + dq * lit(k as f64);
            for (gq, wq) in g.iter().zip(&w) {
                let q = q0 + half * dq * (T::one() + *gq);
                acc += *wq * half * dq * q.powi(e) * f(y, q);
            }
        }
        acc
    };
    let (mut ins, mut out) = (T::zero(), T::zero());
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let count = ((b - a) / panel).ceil().to_usize().unwrap_or(1).max(1);
        let dy = (b - a) / lit(count as f64);
        for k in 0..count {
            let y0 = a + dy * lit(k as f64);
            for (gy, wy) in g.iter().zip(&w) {
                let y = y0 + half * dy * (T::one() + *gy);
                let qa = (inner * inner - y * y).max(T::zero()).sqrt();
                let qb = (radius * radius - y * y).max(T::zero()).sqrt();
                let scale = *wy * half * dy;
                ins += scale * segment(T::zero(), qa, y);
                out += scale * segment(qa, qb, y);
            }
        }
    }
    let area = sphere_area::<T>(n - 1);
    (ins * area, out * area)
}

/// Energy comparison between the lifted layer and `v_R` in `B_R ⊂ R^n`,
/// evaluated in the coordinates `(y, q) = (x_n, |x'|)`.
pub fn minimality_comparison<T: Real>(n: usize, radius: T) -> Result<MinimalityComparison<T>> {
    if n < 2 {
        return Err(domain("dimension must be at least 2"));
    }
    if !(radius >= lit(2.0)) {
        return Err(domain("radius must be at least 2"));
    }
    let half = lit::<T>(0.5);
    let layer = |y: T, _q: T| {
        let d = LayerProfile::derivative(y);
        half * d * d + double_well(LayerProfile::value(y))
    };
    let competitor = |y: T, q: T| {
        let rho = (y * y + q * q).sqrt();
        let (phi, dphi) = cutoff_ramp(rho, radius);
        let u = LayerProfile::value(y);
        let du = LayerProfile::derivative(y);
        let v = (T::one() - phi) * u + phi;
        let (gy, gq) = if rho > T::zero() {
            ((T::one() - phi) * du + (T::one() - u) * dphi * y / rho, (T::one() - u) * dphi * q / rho)
        } else {
            ((T::one() - phi) * du, T::zero())
        };
        half * (gy * gy + gq * gq) + double_well(v)
    };
    let (li, lo) = half_disk_integral(n, radius, layer);
    let (ci, co) = half_disk_integral(n, radius, competitor);
    Ok(MinimalityComparison {
        n,
        radius,
        layer_energy: li + lo,
        competitor_energy: ci + co,
        competitor_inner_energy: ci,
    })
}
