//! Shared numerical kernels: difference stencils, Runge-Kutta stepping,
//! quadrature, smallest-eigenvalue iteration and a couple of direct solvers.
//!
//! Every kernel is a pure function of its inputs and is generic over the
//! scalar type through [`Real`].

mod banded;
mod eigen;
mod fd;
mod mesh;
mod quadrature;
mod radial;
mod rk;

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};

pub use banded::BandedMatrix;
pub use eigen::{smallest_eigenvalue, EigenOptions, EigenPair, MaskedFivePoint, SymmetricOperator};
pub use fd::{fd_derivative, fd_gradient, fd_hessian, Derivative, DerivativeOrder};
pub use mesh::{Grid2D, Mesh1D, SymmetricTridiagonal};
pub(crate) use quadrature::gauss3;
pub use quadrature::{adaptive_simpson, gauss_cells, quadrature_1d, quadrature_2d, trapezoid_samples};
pub use radial::{radial_operator, InnerBoundary, RadialOperator};
pub(crate) use rk::rk4_single;
pub use rk::{rk_integrate, rk_integrate_until, Outcome, StepControl, Trajectory};

/// Scalar types the kernels accept: `f32`, `f64`, or any float-like type with
/// the same arithmetic surface.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssignOps + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssignOps + Debug + Display + Default + Send + Sync + 'static
{
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    // NumCast rather than FromPrimitive: some extended-precision types only
    // implement the integer conversions of the latter.
    <T as num_traits::NumCast>::from(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn point_f64<T: Real>(p: &[T]) -> Vec<f64> {
    p.iter().map(|&x| to_f64(x)).collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = lit::<T>(xs.len() as f64);
    let mx = xs.iter().copied().fold(T::zero(), |a, b| a + b) / n;
    let my = ys.iter().copied().fold(T::zero(), |a, b| a + b) / n;
    let mut num = T::zero();
    let mut den = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Observed order of accuracy from errors measured at step sizes `hs`.
pub fn convergence_slope<T: Real>(hs: &[T], errors: &[T]) -> T {
    let lx: Vec<T> = hs.iter().map(|h| h.ln()).collect();
    let ly: Vec<T> = errors.iter().map(|e| e.ln()).collect();
    fit_slope(&lx, &ly)
}

/// Surface area of the unit sphere `S^{n-1}` in `R^n`, `n >= 1`.
pub fn sphere_area<T: Real>(n: usize) -> T {
    // |S^0| = 2, |S^1| = 2π, |S^{k+1}| = 2π |S^{k-1}| / k.
    let two_pi = lit::<T>(2.0) * T::PI();
    let mut a = [lit::<T>(2.0), two_pi];
    if n <= 2 {
        return a[n.max(1) - 1];
    }
    for k in 2..n {
        let next = two_pi * a[0] / lit(k as f64 - 1.0);
        a = [a[1], next];
    }
    a[1]
}
