use std::collections::VecDeque;

use super::{lit, Real};
use crate::error::{domain, Result};

/// Strictly increasing 1D node set, possibly graded.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D<T> {
    nodes: Vec<T>,
}

impl<T: Real> Mesh1D<T> {
    pub fn new(nodes: Vec<T>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(domain(format!("mesh needs at least 3 nodes, got {}", nodes.len())));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(domain("mesh nodes must be finite"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("mesh nodes must be strictly increasing"));
        }
        Ok(Self { nodes })
    }

    /// `n` equally spaced nodes on `[a, b]`.
    pub fn uniform(a: T, b: T, n: usize) -> Result<Self> {
        if n < 3 || !(b > a) {
            return Err(domain("uniform mesh needs n >= 3 and b > a"));
        }
        let h = (b - a) / lit(n as f64 - 1.0);
        let mut nodes: Vec<T> = (0..n).map(|i| a + h * lit(i as f64)).collect();
        nodes[n - 1] = b;
        Self::new(nodes)
    }

    /// `n` nodes on `[a, b]` (with `a > 0`) evenly spaced in `log r`.
    pub fn geometric(a: T, b: T, n: usize) -> Result<Self> {
        if !(a > T::zero()) || !(b > a) || n < 3 {
            return Err(domain("geometric mesh needs 0 < a < b and n >= 3"));
        }
        let (la, lb) = (a.ln(), b.ln());
        let step = (lb - la) / lit(n as f64 - 1.0);
        let mut nodes: Vec<T> = (0..n).map(|i| (la + step * lit(i as f64)).exp()).collect();
        nodes[0] = a;
        nodes[n - 1] = b;
        Self::new(nodes)
    }

    /// Geometric mesh that contains every breakpoint in `breaks` as a node.
    ///
    /// Each interval between consecutive breakpoints gets at least
    /// `per_efold` nodes per unit of `log r`, and at least 4 nodes.
    pub fn graded_with_breaks(breaks: &[T], per_efold: usize) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(domain("need at least two breakpoints"));
        }
        let mut nodes = vec![breaks[0]];
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(a > T::zero()) || !(b > a) {
                return Err(domain("breakpoints must be positive and increasing"));
            }
            let efolds = (b / a).ln();
            let k = ((efolds * lit(per_efold as f64)).ceil()).to_usize().unwrap_or(4).max(4);
            let ratio = (efolds / lit(k as f64)).exp();
            let mut r = a;
            for i in 1..k {
                r = a * ratio.powi(i as i32);
                nodes.push(r);
            }
            let _ = r;
            nodes.push(b);
        }
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> T {
        self.nodes[0]
    }

    pub fn last(&self) -> T {
        self.nodes[self.nodes.len() - 1]
    }

    /// Scales every node by `factor > 0`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        Self::new(self.nodes.iter().map(|&x| x * factor).collect())
    }
}

/// Axis-aligned node lattice with an activity mask.
///
/// Node `(i, j)` sits at `origin + (i * hs, j * ht)`; storage is row-major
/// with `i` the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D<T> {
    origin: (T, T),
    spacing: (T, T),
    extents: (usize, usize),
    mask: Vec<bool>,
}

impl<T: Real> Grid2D<T> {
    pub fn new(origin: (T, T), spacing: (T, T), extents: (usize, usize), mask: Vec<bool>) -> Result<Self> {
        if !(spacing.0 > T::zero() && spacing.1 > T::zero()) {
            return Err(domain("grid spacing must be positive"));
        }
        if extents.0 < 2 || extents.1 < 2 {
            return Err(domain("grid needs at least 2 nodes per axis"));
        }
        if mask.len() != extents.0 * extents.1 {
            return Err(domain("mask length does not match grid extents"));
        }
        let grid = Self { origin, spacing, extents, mask };
        grid.check_connected()?;
        Ok(grid)
    }

    /// Fully active rectangular grid.
    pub fn rectangle(origin: (T, T), spacing: (T, T), extents: (usize, usize)) -> Result<Self> {
        Self::new(origin, spacing, extents, vec![true; extents.0 * extents.1])
    }

    /// The lower triangle `{0 <= t <= s <= L}` sampled with `n + 1` nodes per axis.
    pub fn triangle(length: T, n: usize) -> Result<Self> {
        let h = length / lit(n as f64);
        let ext = (n + 1, n + 1);
        let mut mask = vec![false; ext.0 * ext.1];
        for i in 0..=n {
            for j in 0..=i {
                mask[i * ext.1 + j] = true;
            }
        }
        Self::new((T::zero(), T::zero()), (h, h), ext, mask)
    }

    fn check_connected(&self) -> Result<()> {
        let (ns, nt) = self.extents;
        let Some(start) = self.mask.iter().position(|&a| a) else {
            return Err(domain("grid mask selects no nodes"));
        };
        let mut seen = vec![false; self.mask.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut count = 1;
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k / nt, k % nt);
            let mut visit = |ii: usize, jj: usize| {
                let kk = ii * nt + jj;
                if self.mask[kk] && !seen[kk] {
                    seen[kk] = true;
                    count += 1;
                    queue.push_back(kk);
                }
            };
            if i > 0 {
                visit(i - 1, j);
            }
            if i + 1 < ns {
                visit(i + 1, j);
            }
            if j > 0 {
                visit(i, j - 1);
            }
            if j + 1 < nt {
                visit(i, j + 1);
            }
        }
        let active = self.mask.iter().filter(|&&a| a).count();
        if count != active {
            return Err(domain("grid mask is not 4-connected"));
        }
        Ok(())
    }

    pub fn extents(&self) -> (usize, usize) {
        self.extents
    }

    pub fn spacing(&self) -> (T, T) {
        self.spacing
    }

    pub fn origin(&self) -> (T, T) {
        self.origin
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.extents.1 + j
    }

    pub fn is_active(&self, i: usize, j: usize) -> bool {
        i < self.extents.0 && j < self.extents.1 && self.mask[self.index(i, j)]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn coords(&self, i: usize, j: usize) -> (T, T) {
        (self.origin.0 + self.spacing.0 * lit(i as f64), self.origin.1 + self.spacing.1 * lit(j as f64))
    }

    pub fn active_count(&self) -> usize {
        self.mask.iter().filter(|&&a| a).count()
    }
}

/// Symmetric tridiagonal matrix stored by its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal<T> {
    diag: Vec<T>,
    off: Vec<T>,
}

impl<T: Real> SymmetricTridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(domain(format!(
                "tridiagonal needs len(off) = len(diag) - 1, got {} and {}",
                diag.len(),
                off.len()
            )));
        }
        if diag.iter().chain(off.iter()).any(|x| !x.is_finite()) {
            return Err(domain("tridiagonal entries must be finite"));
        }
        Ok(Self { diag, off })
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn off(&self) -> &[T] {
        &self.off
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `sigma`, from the signs of the
    /// LDL^T pivots of `A - sigma I`. A zero pivot counts as nonpositive.
    pub fn count_below(&self, sigma: T) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - sigma;
        if q <= T::zero() {
            count += 1;
        }
        let tiny = T::min_positive_value().sqrt();
        for i in 1..self.diag.len() {
            let qs = if q.abs() < tiny {
                if q < T::zero() {
                    -tiny
                } else {
                    tiny
                }
            } else {
                q
            };
            q = self.diag[i] - sigma - self.off[i - 1] * self.off[i - 1] / qs;
            if q <= T::zero() {
                count += 1;
            }
        }
        count
    }

    /// Solves `(A - sigma I) x = rhs` by the Thomas algorithm.
    pub fn solve_shifted(&self, sigma: T, rhs: &[T], out: &mut [T]) -> Result<()> {
        let n = self.diag.len();
        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        let mut b = self.diag[0] - sigma;
        if b == T::zero() {
            return Err(crate::Error::Singular("zero pivot in tridiagonal solve".into()));
        }
        if n > 1 {
            c[0] = self.off[0] / b;
        }
        d[0] = rhs[0] / b;
        for i in 1..n {
            b = self.diag[i] - sigma - self.off[i - 1] * c[i - 1];
            if b == T::zero() {
                return Err(crate::Error::Singular("zero pivot in tridiagonal solve".into()));
            }
            if i + 1 < n {
                c[i] = self.off[i] / b;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / b;
        }
        out[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            out[i] = d[i] - c[i] * out[i + 1];
        }
        Ok(())
    }

    pub fn apply(&self, x: &[T], y: &mut [T]) {
        let n = self.diag.len();
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    pub fn gershgorin_lower(&self) -> T {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { T::zero() };
                let right = if i + 1 < n { self.off[i].abs() } else { T::zero() };
                self.diag[i] - left - right
            })
            .fold(T::infinity(), T::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_rejects_bad_input() {
        assert!(Mesh1D::new(vec![0.0, 1.0]).is_err());
        assert!(Mesh1D::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(Mesh1D::new(vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(Mesh1D::uniform(0.0, 1.0, 11).is_ok());
    }

    #[test]
    fn graded_mesh_contains_breaks() {
        let m = Mesh1D::graded_with_breaks(&[1e-3, 2e-3, 1.0], 20).unwrap();
        assert!(m.nodes().contains(&2e-3));
        assert_eq!(m.first(), 1e-3);
        assert_eq!(m.last(), 1.0);
    }

    #[test]
    fn triangle_grid_is_connected() {
        let g = Grid2D::<f64>::triangle(1.0, 10).unwrap();
        assert_eq!(g.active_count(), 66);
        assert!(g.is_active(5, 5));
        assert!(!g.is_active(4, 5));
    }

    #[test]
    fn disconnected_mask_rejected() {
        let mask = vec![true, false, false, true];
        assert!(Grid2D::new((0.0, 0.0), (1.0, 1.0), (2, 2), mask).is_err());
        assert!(Grid2D::new((0.0, 0.0), (1.0, 1.0), (2, 2), vec![false; 4]).is_err());
    }

    #[test]
    fn sturm_count_matches_known_spectrum() {
        // diag(3,1,2)
        let t = SymmetricTridiagonal::new(vec![3.0, 1.0, 2.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(t.count_below(0.5), 0);
        assert_eq!(t.count_below(1.5), 1);
        assert_eq!(t.count_below(2.5), 2);
        assert_eq!(t.count_below(3.5), 3);
    }

    #[test]
    fn thomas_solve_roundtrip() {
        let t = SymmetricTridiagonal::<f64>::new(vec![4.0, 4.0, 4.0, 4.0], vec![1.0, -1.0, 0.5]).unwrap();
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut b = [0.0; 4];
        t.apply(&x, &mut b);
        let mut y = [0.0; 4];
        t.solve_shifted(0.0, &b, &mut y).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
