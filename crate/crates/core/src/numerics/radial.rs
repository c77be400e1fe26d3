use super::{lit, smallest_eigenvalue, EigenOptions, Mesh1D, Real, SymmetricTridiagonal};
use crate::error::{domain, Result};

/// Condition at the first mesh node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerBoundary {
    /// `u = 0` at the first node (the mesh starts at some `r_min > 0`).
    Dirichlet,
    /// The mesh starts at `r = 0` and the first node is an unknown with no
    /// inner flux (regularity at the origin).
    Regular,
}

/// Finite-volume discretization of `-(r^{n-1} u')' + V r^{n-1} u` in the
/// measure `r^{n-1} dr`, symmetrized by the square root of the cell volumes.
/// The outer end always carries `u = 0`.
#[derive(Debug, Clone)]
pub struct RadialOperator<T> {
    pub matrix: SymmetricTridiagonal<T>,
    sqrt_mass: Vec<T>,
    first_unknown: usize,
    nodes: Vec<T>,
}

/// Builds the symmetrized radial operator for dimension `dim` with the
/// potential sampled at the mesh nodes.
pub fn radial_operator<T: Real>(
    mesh: &Mesh1D<T>,
    dim: usize,
    potential: &[T],
    inner: InnerBoundary,
) -> Result<RadialOperator<T>> {
    let r = mesh.nodes();
    let n_nodes = r.len();
    if potential.len() != n_nodes {
        return Err(domain("potential must be sampled at every mesh node"));
    }
    if dim == 0 {
        return Err(domain("dimension must be positive"));
    }
    match inner {
        InnerBoundary::Dirichlet if !(r[0] > T::zero()) => {
            return Err(domain("Dirichlet inner boundary needs r_min > 0"))
        }
        InnerBoundary::Regular if r[0] != T::zero() => {
            return Err(domain("regular inner boundary needs the mesh to start at 0"))
        }
        _ => {}
    }
    let nd = lit::<T>(dim as f64);
    let half = lit::<T>(0.5);
    let pow = |x: T| x.powi(dim as i32 - 1);
    let face_weight = |k: usize| pow(half * (r[k] + r[k + 1])) / (r[k + 1] - r[k]);
    let first = match inner {
        InnerBoundary::Dirichlet => 1,
        InnerBoundary::Regular => 0,
    };
    let last = n_nodes - 2;
    let mut diag = Vec::with_capacity(last + 1 - first);
    let mut off = Vec::new();
    let mut sqrt_mass = Vec::with_capacity(last + 1 - first);
    for i in first..=last {
        let a = if i == 0 { T::zero() } else { half * (r[i - 1] + r[i]) };
        let b = half * (r[i] + r[i + 1]);
        let vol = (b.powi(dim as i32) - a.powi(dim as i32)) / nd;
        let wl = if i == 0 { T::zero() } else { face_weight(i - 1) };
        let wr = face_weight(i);
        diag.push(wl + wr + potential[i] * vol);
        sqrt_mass.push(vol.sqrt());
        if i < last {
            off.push(-wr);
        }
    }
    for (k, d) in diag.iter_mut().enumerate() {
        *d /= sqrt_mass[k] * sqrt_mass[k];
    }
    for (k, o) in off.iter_mut().enumerate() {
        *o /= sqrt_mass[k] * sqrt_mass[k + 1];
    }
    Ok(RadialOperator {
        matrix: SymmetricTridiagonal::new(diag, off)?,
        sqrt_mass,
        first_unknown: first,
        nodes: r.to_vec(),
    })
}

impl<T: Real> RadialOperator<T> {
    /// Smallest eigenvalue and the matching nodal eigenfunction (zero at the
    /// Dirichlet nodes, positive, unit `L²(r^{n-1} dr)` norm).
    pub fn ground_state(&self, opts: EigenOptions<T>) -> Result<(T, Vec<T>)> {
        let pair = smallest_eigenvalue(&self.matrix, opts)?;
        let mut u = vec![T::zero(); self.nodes.len()];
        let sign =
            if pair.vector.iter().copied().fold(T::zero(), |a, b| a + b) < T::zero() { -T::one() } else { T::one() };
        for (k, &v) in pair.vector.iter().enumerate() {
            u[self.first_unknown + k] = sign * v / self.sqrt_mass[k];
        }
        Ok((pair.value, u))
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// A tolerance for the eigen residual proportional to the operator scale.
    pub fn natural_tolerance(&self, rel: T) -> T {
        let scale = self.matrix.diag().iter().fold(T::zero(), |m, &d| m.max(d.abs()));
        rel * scale.max(T::one())
    }
}
