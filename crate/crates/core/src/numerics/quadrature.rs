use super::{lit, Grid2D, Mesh1D, Real};
use crate::error::{domain, Result};

/// Composite trapezoid rule for `f * weight` over the mesh.
pub fn quadrature_1d<T, F, W>(f: F, mesh: &Mesh1D<T>, weight: Option<W>) -> T
where
    T: Real,
    F: Fn(T) -> T,
    W: Fn(T) -> T,
{
    let nodes = mesh.nodes();
    let vals: Vec<T> = match &weight {
        Some(w) => nodes.iter().map(|&x| f(x) * w(x)).collect(),
        None => nodes.iter().map(|&x| f(x)).collect(),
    };
    trapezoid_samples(nodes, &vals)
}

/// Trapezoid rule over precomputed samples `ys` at abscissae `xs`.
pub fn trapezoid_samples<T: Real>(xs: &[T], ys: &[T]) -> T {
    let half = lit::<T>(0.5);
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| half * (x[1] - x[0]) * (y[0] + y[1])).fold(T::zero(), |a, b| a + b)
}

/// Three-point Gauss-Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss3<T: Real>() -> ([T; 3], [T; 3]) {
    let g = lit::<T>((0.6f64).sqrt());
    let (wo, wm) = (lit::<T>(5.0 / 9.0), lit::<T>(8.0 / 9.0));
    ([-g, T::zero(), g], [wo, wm, wo])
}

/// Three-point Gauss-Legendre rule on every mesh cell.
///
/// Nodes never coincide with mesh nodes, so integrands with kinks at mesh
/// nodes are handled without one-sided evaluation.
pub fn gauss_cells<T, F>(f: F, mesh: &Mesh1D<T>) -> T
where
    T: Real,
    F: Fn(T) -> T,
{
    let g = lit::<T>((0.6f64).sqrt());
    let w_outer = lit::<T>(5.0 / 9.0);
    let w_mid = lit::<T>(8.0 / 9.0);
    let half = lit::<T>(0.5);
    mesh.nodes()
        .windows(2)
        .map(|c| {
            let mid = half * (c[0] + c[1]);
            let rad = half * (c[1] - c[0]);
            rad * (w_outer * (f(mid - g * rad) + f(mid + g * rad)) + w_mid * f(mid))
        })
        .fold(T::zero(), |a, b| a + b)
}

/// Bilinear cell rule for `f * weight` over every cell whose four corners are
/// active in the grid mask.
pub fn quadrature_2d<T, F, W>(f: F, grid: &Grid2D<T>, weight: Option<W>) -> Result<T>
where
    T: Real,
    F: Fn(T, T) -> T,
    W: Fn(T, T) -> T,
{
    let (ns, nt) = grid.extents();
    let (hs, ht) = grid.spacing();
    let mut vals = vec![T::zero(); ns * nt];
    for i in 0..ns {
        for j in 0..nt {
            if grid.is_active(i, j) {
                let (s, t) = grid.coords(i, j);
                let w = weight.as_ref().map_or(T::one(), |w| w(s, t));
                vals[grid.index(i, j)] = f(s, t) * w;
            }
        }
    }
    let quarter = lit::<T>(0.25) * hs * ht;
    let mut total = T::zero();
    let mut cells = 0usize;
    for i in 0..ns - 1 {
        for j in 0..nt - 1 {
            if grid.is_active(i, j)
                && grid.is_active(i + 1, j)
                && grid.is_active(i, j + 1)
                && grid.is_active(i + 1, j + 1)
            {
                cells += 1;
                total += quarter
                    * (vals[grid.index(i, j)]
                        + vals[grid.index(i + 1, j)]
                        + vals[grid.index(i, j + 1)]
                        + vals[grid.index(i + 1, j + 1)]);
            }
        }
    }
    if cells == 0 {
        return Err(domain("grid has no fully active cell"));
    }
    Ok(total)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute error `tol`.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, tol: T, max_depth: usize) -> T
where
    T: Real,
    F: Fn(T) -> T,
{
    fn step<T: Real, F: Fn(T) -> T>(
        f: &F,
        (a, fa): (T, T),
        fm: T,
        (b, fb): (T, T),
        whole: T,
        tol: T,
        depth: usize,
    ) -> T {
        let half = lit::<T>(0.5);
        let m = half * (a + b);
        let (lm, rm) = (half * (a + m), half * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let sixth = lit::<T>(6.0);
        let left = (m - a) / sixth * (fa + lit::<T>(4.0) * flm + fm);
        let right = (b - m) / sixth * (fm + lit::<T>(4.0) * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= lit::<T>(15.0) * tol {
            return left + right + delta / lit(15.0);
        }
        step(f, (a, fa), flm, (m, fm), left, half * tol, depth - 1)
            + step(f, (m, fm), frm, (b, fb), right, half * tol, depth - 1)
    }
    let m = lit::<T>(0.5) * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / lit(6.0) * (fa + lit::<T>(4.0) * fm + fb);
    step(&f, (a, fa), fm, (b, fb), whole, tol, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    type NoWeight = fn(f64) -> f64;

    #[test]
    fn linear_exact() {
        let m = Mesh1D::uniform(0.0, 1.0, 7).unwrap();
        assert_eq!(quadrature_1d(|x| x, &m, None::<NoWeight>), 0.5);
    }

    #[test]
    fn square_second_order() {
        let m = Mesh1D::uniform(0.0, 1.0, 101).unwrap();
        let v = quadrature_1d(|x| x * x, &m, None::<NoWeight>);
        assert!((v - 1.0 / 3.0).abs() < 2e-5);
    }

    #[test]
    fn weight_multiplies() {
        let m = Mesh1D::uniform(0.0, 1.0, 11).unwrap();
        let v = quadrature_1d(|_| 1.0, &m, Some(|x: f64| x));
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gauss_cells_quintic_exact() {
        let m = Mesh1D::uniform(0.0, 1.0, 4).unwrap();
        let v = gauss_cells(|x: f64| x.powi(5), &m);
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn unit_square_area() {
        let g = Grid2D::rectangle((0.0, 0.0), (0.1, 0.1), (11, 11)).unwrap();
        let v = quadrature_2d(|_, _| 1.0, &g, None::<fn(f64, f64) -> f64>).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn grid_without_cells_is_error() {
        // A single row of active nodes has no complete cell.
        let mut mask = vec![false; 9];
        mask[0] = true;
        mask[1] = true;
        mask[2] = true;
        let g = Grid2D::new((0.0, 0.0), (1.0, 1.0), (3, 3), mask).unwrap();
        assert!(quadrature_2d(|_, _| 1.0, &g, None::<fn(f64, f64) -> f64>).is_err());
    }
}
