use super::{lit, to_f64, Grid2D, Real, SymmetricTridiagonal};
use crate::error::{domain, Error, Result};

/// A real symmetric operator that can be applied and shifted-inverted.
pub trait SymmetricOperator<T: Real> {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[T], y: &mut [T]);

    /// A lower bound on the spectrum.
    fn gershgorin_lower(&self) -> T;

    /// Solves `(A - sigma I) x = rhs`.
    fn solve_shifted(&self, sigma: T, rhs: &[T], out: &mut [T]) -> Result<()>;

    /// Number of eigenvalues below `sigma`, when cheaply available. Used to
    /// certify that a tighter shift keeps `A - sigma I` positive definite.
    fn count_below(&self, _sigma: T) -> Option<usize> {
        None
    }
}

impl<T: Real> SymmetricOperator<T> for SymmetricTridiagonal<T> {
    fn dim(&self) -> usize {
        SymmetricTridiagonal::dim(self)
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        SymmetricTridiagonal::apply(self, x, y)
    }

    fn gershgorin_lower(&self) -> T {
        SymmetricTridiagonal::gershgorin_lower(self)
    }

    fn solve_shifted(&self, sigma: T, rhs: &[T], out: &mut [T]) -> Result<()> {
        SymmetricTridiagonal::solve_shifted(self, sigma, rhs, out)
    }

    fn count_below(&self, sigma: T) -> Option<usize> {
        Some(SymmetricTridiagonal::count_below(self, sigma))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions<T> {
    /// Convergence threshold on `||A v - mu v||` for unit `v`.
    pub tol: T,
    pub max_iter: usize,
    /// Initial shift; defaults to the Gershgorin lower bound minus one.
    pub shift: Option<T>,
}

impl<T: Real> EigenOptions<T> {
    pub fn new(tol: T, max_iter: usize) -> Self {
        Self { tol, max_iter, shift: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub value: T,
    /// Unit Euclidean norm.
    pub vector: Vec<T>,
    pub residual: T,
    pub iterations: usize,
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).fold(T::zero(), |a, b| a + b).sqrt()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).fold(T::zero(), |a, b| a + b)
}

/// Smallest eigenvalue of `op` by shifted inverse power iteration.
///
/// When the operator exposes an inertia count the shift is moved toward the
/// current Rayleigh quotient, but only to values the count certifies as still
/// below the spectrum.
pub fn smallest_eigenvalue<T, A>(op: &A, opts: EigenOptions<T>) -> Result<EigenPair<T>>
where
    T: Real,
    A: SymmetricOperator<T> + ?Sized,
{
    let n = op.dim();
    if n == 0 {
        return Err(domain("operator has dimension zero"));
    }
    if !(opts.tol > T::zero()) {
        return Err(domain("eigen tolerance must be positive"));
    }
    let mut sigma = opts.shift.unwrap_or_else(|| op.gershgorin_lower() - T::one());
    // Positive start vector with a small deterministic ripple so it is not
    // orthogonal to the ground state of common operators.
    let mut v: Vec<T> = (0..n).map(|i| T::one() + lit::<T>(0.05) * lit::<T>((i as f64 * 0.7).sin())).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut w = vec![T::zero(); n];
    let mut av = vec![T::zero(); n];
    let mut mu = T::nan();
    for it in 1..=opts.max_iter {
        op.solve_shifted(sigma, &v, &mut w)?;
        let nw = norm(&w);
        if !(nw.is_finite() && nw > T::zero()) {
            return Err(Error::NoConvergence { iterations: it, last: to_f64(mu) });
        }
        for (x, &y) in v.iter_mut().zip(&w) {
            *x = y / nw;
        }
        op.apply(&v, &mut av);
        mu = dot(&v, &av);
        let res = av.iter().zip(&v).map(|(&a, &x)| (a - mu * x) * (a - mu * x)).fold(T::zero(), |a, b| a + b).sqrt();
        if res <= opts.tol {
            return Ok(EigenPair { value: mu, vector: v, residual: res, iterations: it });
        }
        if op.count_below(sigma).is_some() {
            for frac in [0.999, 0.99, 0.9, 0.5] {
                let cand = sigma + lit::<T>(frac) * (mu - sigma);
                if cand > sigma && op.count_below(cand) == Some(0) {
                    sigma = cand;
                    break;
                }
            }
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, last: to_f64(mu) })
}

/// `-Δ_h + V` on the active nodes of a grid, with zero Dirichlet data on
/// inactive or off-grid neighbors.
#[derive(Debug, Clone)]
pub struct MaskedFivePoint<T> {
    grid: Grid2D<T>,
    potential: Vec<T>,
    /// Active node index -> unknown index.
    unknown: Vec<Option<usize>>,
    nodes: Vec<(usize, usize)>,
}

impl<T: Real> MaskedFivePoint<T> {
    /// `potential` is indexed like the grid (row-major over all nodes).
    pub fn new(grid: Grid2D<T>, potential: Vec<T>) -> Result<Self> {
        let (ns, nt) = grid.extents();
        if potential.len() != ns * nt {
            return Err(domain("potential length does not match the grid"));
        }
        let mut unknown = vec![None; ns * nt];
        let mut nodes = Vec::new();
        for i in 0..ns {
            for j in 0..nt {
                if grid.is_active(i, j) {
                    unknown[grid.index(i, j)] = Some(nodes.len());
                    nodes.push((i, j));
                }
            }
        }
        Ok(Self { grid, potential, unknown, nodes })
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    /// Grid coordinates of each unknown.
    pub fn nodes(&self) -> &[(usize, usize)] {
        &self.nodes
    }

    fn neighbor(&self, i: usize, j: usize, di: isize, dj: isize) -> Option<usize> {
        let (ns, nt) = self.grid.extents();
        let ii = i as isize + di;
        let jj = j as isize + dj;
        if ii < 0 || jj < 0 || ii >= ns as isize || jj >= nt as isize {
            return None;
        }
        self.unknown[self.grid.index(ii as usize, jj as usize)]
    }

    fn apply_shifted(&self, sigma: T, x: &[T], y: &mut [T]) {
        let (hs, ht) = self.grid.spacing();
        let (cs, ct) = (T::one() / (hs * hs), T::one() / (ht * ht));
        let two = lit::<T>(2.0);
        for (k, &(i, j)) in self.nodes.iter().enumerate() {
            let mut acc = (two * (cs + ct) + self.potential[self.grid.index(i, j)] - sigma) * x[k];
            for (di, dj, c) in [(-1, 0, cs), (1, 0, cs), (0, -1, ct), (0, 1, ct)] {
                if let Some(m) = self.neighbor(i, j, di, dj) {
                    acc -= c * x[m];
                }
            }
            y[k] = acc;
        }
    }
}

impl<T: Real> SymmetricOperator<T> for MaskedFivePoint<T> {
    fn dim(&self) -> usize {
        self.nodes.len()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.apply_shifted(T::zero(), x, y)
    }

    fn gershgorin_lower(&self) -> T {
        // Diagonal 2(cs+ct)+V minus the sum of present neighbor couplings.
        let (hs, ht) = self.grid.spacing();
        let (cs, ct) = (T::one() / (hs * hs), T::one() / (ht * ht));
        let two = lit::<T>(2.0);
        self.nodes
            .iter()
            .map(|&(i, j)| {
                let mut off = T::zero();
                for (di, dj, c) in [(-1, 0, cs), (1, 0, cs), (0, -1, ct), (0, 1, ct)] {
                    if self.neighbor(i, j, di, dj).is_some() {
                        off += c;
                    }
                }
                two * (cs + ct) + self.potential[self.grid.index(i, j)] - off
            })
            .fold(T::infinity(), T::min)
    }

    /// Conjugate gradients; the caller guarantees `A - sigma I` is positive
    /// definite (the default shift does).
    fn solve_shifted(&self, sigma: T, rhs: &[T], out: &mut [T]) -> Result<()> {
        let n = self.nodes.len();
        out.iter_mut().for_each(|x| *x = T::zero());
        let mut r = rhs.to_vec();
        let mut p = r.clone();
        let mut ap = vec![T::zero(); n];
        let mut rr = dot(&r, &r);
        let stop = rr * lit::<T>(1e-28);
        for _ in 0..(10 * n + 100) {
            if rr <= stop {
                return Ok(());
            }
            self.apply_shifted(sigma, &p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > T::zero()) {
                return Err(Error::Singular("shifted operator is not positive definite".into()));
            }
            let alpha = rr / pap;
            for k in 0..n {
                out[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            rr = rr_new;
            for k in 0..n {
                p[k] = r[k] + beta * p[k];
            }
        }
        if rr <= stop * lit(1e6) {
            Ok(())
        } else {
            Err(Error::NoConvergence { iterations: 10 * n + 100, last: to_f64(rr.sqrt()) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_operator() {
        let t = SymmetricTridiagonal::<f64>::new(vec![3.0, 1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let p = smallest_eigenvalue(&t, EigenOptions::new(1e-12, 200)).unwrap();
        assert!((p.value - 1.0).abs() < 1e-12);
        assert!(p.vector[1].abs() > 0.999_999);
    }

    #[test]
    fn identity_operator() {
        let t = SymmetricTridiagonal::<f64>::new(vec![1.0; 5], vec![0.0; 4]).unwrap();
        let p = smallest_eigenvalue(&t, EigenOptions::new(1e-12, 50)).unwrap();
        assert!((p.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_laplacian_1d() {
        let n = 199;
        let h = 1.0 / 200.0;
        let t = SymmetricTridiagonal::new(vec![2.0 / (h * h); n], vec![-1.0 / (h * h); n - 1]).unwrap();
        let p = smallest_eigenvalue(&t, EigenOptions::new(1e-8, 500)).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((p.value - pi2).abs() / pi2 < 0.01);
    }

    #[test]
    fn unit_square_laplacian() {
        let n = 39;
        let h = 1.0 / 40.0;
        let grid = Grid2D::rectangle((h, h), (h, h), (n, n)).unwrap();
        let op = MaskedFivePoint::new(grid, vec![0.0; n * n]).unwrap();
        let p = smallest_eigenvalue(&op, EigenOptions::new(1e-8, 500)).unwrap();
        let exact = 2.0 * std::f64::consts::PI.powi(2);
        assert!((p.value - exact).abs() / exact < 0.01);
    }

    #[test]
    fn non_convergence_carries_estimate() {
        let t = SymmetricTridiagonal::new(vec![1.0, 1.0 + 1e-9], vec![0.0]).unwrap();
        let err = smallest_eigenvalue(&t, EigenOptions { tol: 1e-300, max_iter: 3, shift: Some(-1e6) }).unwrap_err();
        match err {
            Error::NoConvergence { last, .. } => assert!(last.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }
}
