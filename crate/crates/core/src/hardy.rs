//! Hardy's inequality in the unit ball: radial quotients, the sharpness
//! probe for the constant `(n-2)²/4`, and the ground state of
//! `-Δ - a/|x|²` truncated to `[r_min, 1]`.

use crate::error::{domain, Result};
use crate::numerics::{gauss_cells, lit, radial_operator, EigenOptions, InnerBoundary, Mesh1D, Real};

/// A radial function on `(0, 1]` queried through its weighted values.
pub trait RadialFunction<T: Real> {
    /// `(ξ(r) r^k, ξ'(r) r^k)` for the weight exponent `k`. Implementations
    /// combine the powers so that tiny radii do not overflow.
    fn weighted(&self, r: T, k: T) -> (T, T);

    /// Radii where `ξ` has kinks; quadrature meshes should contain them.
    fn kinks(&self) -> Vec<T>;
}

/// `r^{-α} - 1` on `[ρ, 1]`, linear from zero on `[ρ/2, ρ]`, zero below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialTestFunction<T> {
    pub alpha: T,
    pub rho: T,
}

impl<T: Real> RadialTestFunction<T> {
    pub fn new(alpha: T, rho: T) -> Result<Self> {
        if !(rho > T::zero() && rho < T::one()) {
            return Err(domain("cutoff radius must lie in (0, 1)"));
        }
        if !(alpha > T::zero()) {
            return Err(domain("exponent must be positive"));
        }
        Ok(Self { alpha, rho })
    }
}

impl<T: Real> RadialFunction<T> for RadialTestFunction<T> {
    fn weighted(&self, r: T, k: T) -> (T, T) {
        let half_rho = self.rho / lit(2.0);
        if r <= half_rho || r > T::one() {
            (T::zero(), T::zero())
        } else if r < self.rho {
            // peak·r^k = (1 - ρ^α)(r/ρ)^α r^{k-α}, finite whenever the value is.
            let scale =
                (T::one() - self.rho.powf(self.alpha)) * (r / self.rho).powf(self.alpha) * r.powf(k - self.alpha);
            let slope = scale / half_rho;
            (slope * (r - half_rho), slope)
        } else {
            (r.powf(k - self.alpha) - r.powf(k), -self.alpha * r.powf(k - self.alpha - T::one()))
        }
    }

    fn kinks(&self) -> Vec<T> {
        vec![self.rho / lit(2.0), self.rho, T::one()]
    }
}

/// Piecewise-linear radial function through sampled values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledRadial<T> {
    pub nodes: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> SampledRadial<T> {
    pub fn new(nodes: Vec<T>, values: Vec<T>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return Err(domain("sampled profile needs matching nodes and values"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || !(nodes[0] >= T::zero()) {
            return Err(domain("sample nodes must be nonnegative and increasing"));
        }
        Ok(Self { nodes, values })
    }
}

impl<T: Real> RadialFunction<T> for SampledRadial<T> {
    fn weighted(&self, r: T, k: T) -> (T, T) {
        let n = self.nodes.len();
        if r < self.nodes[0] || r > self.nodes[n - 1] {
            return (T::zero(), T::zero());
        }
        let i = match self.nodes.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        let slope = (self.values[i + 1] - self.values[i]) / (b - a);
        let v = self.values[i] + slope * (r - a);
        let rk = r.powf(k);
        (v * rk, slope * rk)
    }

    fn kinks(&self) -> Vec<T> {
        self.nodes.clone()
    }
}

/// Mesh for the quotient integrals: geometric between the kinks of `xi`.
pub fn quotient_mesh<T: Real, F: RadialFunction<T> + ?Sized>(xi: &F, per_efold: usize) -> Result<Mesh1D<T>> {
    let mut k: Vec<T> = xi.kinks().into_iter().filter(|&r| r > T::zero()).collect();
    k.dedup();
    if k.len() > 64 {
        // Already sampled densely enough.
        return Mesh1D::new(k);
    }
    Mesh1D::graded_with_breaks(&k, per_efold)
}

/// The three integrals `∫ ξ'² r^{n-1}`, `∫ ξ²/r² r^{n-1}`, `∫ ξ² r^{n-1}`.
pub fn hardy_integrals<T: Real, F: RadialFunction<T> + ?Sized>(n: usize, xi: &F, mesh: &Mesh1D<T>) -> (T, T, T) {
    let half = lit::<T>(0.5);
    let k_main = lit::<T>(n as f64 - 1.0) * half;
    let k_hardy = lit::<T>(n as f64 - 3.0) * half;
    let grad = gauss_cells(
        |r| {
            let (_, d) = xi.weighted(r, k_main);
            d * d
        },
        mesh,
    );
    let pot = gauss_cells(
        |r| {
            let (v, _) = xi.weighted(r, k_hardy);
            v * v
        },
        mesh,
    );
    let mass = gauss_cells(
        |r| {
            let (v, _) = xi.weighted(r, k_main);
            v * v
        },
        mesh,
    );
    (grad, pot, mass)
}

/// `(∫(ξ'² - a ξ²/r²) r^{n-1}) / ∫ ξ² r^{n-1}`; the angular factor cancels.
pub fn hardy_quotient<T: Real, F: RadialFunction<T> + ?Sized>(n: usize, a: T, xi: &F, mesh: &Mesh1D<T>) -> Result<T> {
    if n < 3 {
        return Err(domain("Hardy quotient needs n >= 3"));
    }
    let (grad, pot, mass) = hardy_integrals(n, xi, mesh);
    if !(mass > T::zero()) {
        return Err(domain("test function has zero L2 norm on the mesh"));
    }
    Ok((grad - a * pot) / mass)
}

/// `∫ ξ'² r^{n-1} / ∫ ξ²/r² r^{n-1}`.
pub fn hardy_ratio<T: Real, F: RadialFunction<T> + ?Sized>(n: usize, xi: &F, mesh: &Mesh1D<T>) -> Result<T> {
    let (grad, pot, _) = hardy_integrals(n, xi, mesh);
    if !grad.is_finite() || !pot.is_finite() {
        return Err(domain("weighted integrals overflow; the cutoff radius is too small for this exponent"));
    }
    if !(pot > T::zero()) {
        return Err(domain("test function has zero weighted norm on the mesh"));
    }
    Ok(grad / pot)
}

/// Witness of the sharpness search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessWitness<T> {
    pub alpha: T,
    pub rho: T,
    pub ratio: T,
    pub target: T,
    pub evaluations: usize,
    /// `|ratio - target| <= eps` was reached within the budget.
    pub reached: bool,
}

/// Drives `α ↓ (n-2)/2` and `ρ ↓ 0` until the Hardy ratio is within `eps`
/// of `(n-2)²/4`. Returns the best probe found if the budget runs out.
pub fn hardy_sharpness_probe<T: Real>(n: usize, eps: T, budget: usize) -> Result<SharpnessWitness<T>> {
    if n < 3 {
        return Err(domain("sharpness probe needs n >= 3"));
    }
    if !(eps > T::zero()) {
        return Err(domain("target error must be positive"));
    }
    let k = lit::<T>(n as f64 - 2.0) / lit(2.0);
    let target = k * k;
    let mut alphas: Vec<T> = (0..8).map(|j| k + lit::<T>(0.5 * 0.5f64.powi(j))).collect();
    alphas.push(k);
    let mut best: Option<SharpnessWitness<T>> = None;
    let mut evaluations = 0;
    for &alpha in &alphas {
        for e in 1..=9 {
            if evaluations >= budget {
                break;
            }
            // ρ = 10^{-2^{e-1}}, down to 1e-256.
            let rho = lit::<T>(10f64.powi(-(1 << (e - 1))));
            if !(rho > T::zero()) {
                break;
            }
            let xi = RadialTestFunction::new(alpha, rho)?;
            let mesh = quotient_mesh(&xi, 12)?;
            let ratio = match hardy_ratio(n, &xi, &mesh) {
                Ok(q) => q,
                // Smaller ρ only overflows further.
                Err(_) => break,
            };
            evaluations += 1;
            let cand =
                SharpnessWitness { alpha, rho, ratio, target, evaluations, reached: (ratio - target).abs() <= eps };
            if best.is_none_or(|b| (ratio - target).abs() < (b.ratio - target).abs()) {
                best = Some(cand);
            }
            if cand.reached {
                return Ok(cand);
            }
        }
    }
    let mut b = best.ok_or_else(|| domain("empty search budget"))?;
    b.evaluations = evaluations;
    Ok(b)
}

/// Geometric mesh on `[r_min, 1]` with `per_efold` cells per unit of `log r`.
pub fn ground_state_mesh<T: Real>(r_min: T, per_efold: usize) -> Result<Mesh1D<T>> {
    if !(r_min > T::zero() && r_min < T::one()) {
        return Err(domain("r_min must lie in (0, 1)"));
    }
    let cells = ((-r_min.ln()) * lit(per_efold as f64)).ceil().to_usize().unwrap_or(100).max(200);
    Mesh1D::geometric(r_min, T::one(), cells + 1)
}

/// Smallest Dirichlet eigenvalue of `-u'' - (n-1)u'/r - a u/r²` on the
/// mesh interval `[r_min, 1]`.
pub fn schrodinger_ground_state<T: Real>(n: usize, a: T, mesh: &Mesh1D<T>) -> Result<T> {
    if n < 1 {
        return Err(domain("dimension must be positive"));
    }
    if !(mesh.first() > T::zero()) {
        return Err(domain("the operator is truncated away from the origin: r_min must be positive"));
    }
    let pot: Vec<T> = mesh.nodes().iter().map(|&r| -a / (r * r)).collect();
    let op = radial_operator(mesh, n, &pot, InnerBoundary::Dirichlet)?;
    let tol = op.natural_tolerance(lit(1e-11));
    let (mu, _) = op.ground_state(EigenOptions::new(tol, 5000))?;
    Ok(mu)
}
