use super::{lit, point_f64, Real};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Output of [`fd_derivative`]: a gradient vector or a symmetric Hessian.
#[derive(Debug, Clone, PartialEq)]
pub enum Derivative<T> {
    Gradient(Vec<T>),
    Hessian(Vec<Vec<T>>),
}

impl<T> Derivative<T> {
    pub fn into_gradient(self) -> Option<Vec<T>> {
        match self {
            Derivative::Gradient(g) => Some(g),
            Derivative::Hessian(_) => None,
        }
    }

    pub fn into_hessian(self) -> Option<Vec<Vec<T>>> {
        match self {
            Derivative::Hessian(m) => Some(m),
            Derivative::Gradient(_) => None,
        }
    }
}

fn eval<T: Real, F: Fn(&[T]) -> T + ?Sized>(f: &F, x: &[T]) -> Result<T> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { point: point_f64(x) })
    }
}

/// Central-difference derivative of a scalar field with O(h²) truncation error.
pub fn fd_derivative<T, F>(field: F, point: &[T], order: DerivativeOrder, h: T) -> Result<Derivative<T>>
where
    T: Real,
    F: Fn(&[T]) -> T,
{
    match order {
        DerivativeOrder::First => fd_gradient(&field, point, h).map(Derivative::Gradient),
        DerivativeOrder::Second => fd_hessian(&field, point, h).map(Derivative::Hessian),
    }
}

pub fn fd_gradient<T, F>(field: &F, point: &[T], h: T) -> Result<Vec<T>>
where
    T: Real,
    F: Fn(&[T]) -> T + ?Sized,
{
    if !(h > T::zero()) {
        return Err(domain("difference step must be positive"));
    }
    let mut x = point.to_vec();
    let two_h = h + h;
    let mut g = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        let xi = x[i];
        x[i] = xi + h;
        let fp = eval(field, &x)?;
        x[i] = xi - h;
        let fm = eval(field, &x)?;
        x[i] = xi;
        g.push((fp - fm) / two_h);
    }
    Ok(g)
}

pub fn fd_hessian<T, F>(field: &F, point: &[T], h: T) -> Result<Vec<Vec<T>>>
where
    T: Real,
    F: Fn(&[T]) -> T + ?Sized,
{
    if !(h > T::zero()) {
        return Err(domain("difference step must be positive"));
    }
    let n = point.len();
    let mut x = point.to_vec();
    let f0 = eval(field, &x)?;
    let h2 = h * h;
    let four_h2 = lit::<T>(4.0) * h2;
    let mut m = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        let xi = x[i];
        x[i] = xi + h;
        let fp = eval(field, &x)?;
        x[i] = xi - h;
        let fm = eval(field, &x)?;
        x[i] = xi;
        m[i][i] = (fp - f0 - f0 + fm) / h2;
        for j in 0..i {
            let xj = x[j];
            let mut corner = |si: T, sj: T| -> Result<T> {
                x[i] = xi + si * h;
                x[j] = xj + sj * h;
                let v = eval(field, &x);
                x[i] = xi;
                x[j] = xj;
                v
            };
            let one = T::one();
            let pp = corner(one, one)?;
            let pm = corner(one, -one)?;
            let mp = corner(-one, one)?;
            let mm = corner(-one, -one)?;
            // The 4-point stencil is symmetric in (i, j), so averaging with the
            // transpose leaves it unchanged.
            let v = (pp - pm - mp + mm) / four_h2;
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_first_derivative() {
        let g = fd_derivative(|x: &[f64]| x[0] * x[0], &[1.0], DerivativeOrder::First, 1e-4)
            .unwrap()
            .into_gradient()
            .unwrap();
        assert!((g[0] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn constant_hessian_is_zero() {
        let m = fd_hessian(&|_: &[f64]| 3.5, &[0.3, -1.0], 1e-3).unwrap();
        for row in m {
            for v in row {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn bilinear_hessian() {
        let m = fd_hessian(&|x: &[f64]| x[0] * x[1], &[0.7, 0.2], 1e-3).unwrap();
        assert!((m[0][1] - 1.0).abs() < 1e-8);
        assert!((m[1][0] - 1.0).abs() < 1e-8);
        assert!(m[0][0].abs() < 1e-8 && m[1][1].abs() < 1e-8);
    }

    #[test]
    fn non_finite_reports_point() {
        let err = fd_gradient(&|x: &[f64]| 1.0 / x[0], &[1e-5], 1e-5).unwrap_err();
        match err {
            Error::NonFinite { point } => assert_eq!(point.len(), 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn works_in_f32() {
        let g = fd_gradient(&|x: &[f32]| x[0] * x[0] * x[0], &[1.0f32], 1e-2).unwrap();
        assert!((g[0] - 3.0).abs() < 1e-3);
    }
}
