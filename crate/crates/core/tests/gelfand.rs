use num_rational::Ratio;
use stablab_core::gelfand::*;

const EXP: Nonlinearity<f64> = Nonlinearity::Exponential;

/// Two-dimensional branch in closed form: `u = 2 log((1+μ)/(1+μr²))` solves
/// `-Δu = λe^u` in the unit disk with `λ = 8μ/(1+μ)²` and `u(0) = 2 log(1+μ)`.
fn disk_lambda(m: f64) -> f64 {
    let mu = (0.5 * m).exp() - 1.0;
    8.0 * mu / ((1.0 + mu) * (1.0 + mu))
}

fn disk_profile(m: f64, r: f64) -> f64 {
    let mu = (0.5 * m).exp() - 1.0;
    2.0 * ((1.0 + mu) / (1.0 + mu * r * r)).ln()
}

fn grid(step: f64, last: f64) -> Vec<f64> {
    let k = (last / step).round() as usize;
    (0..=k).map(|i| i as f64 * step).collect()
}

fn branch(n: usize, step: f64, last: f64) -> Branch<f64> {
    branch_continuation(n, EXP, &grid(step, last), BranchOptions::new(1e-12)).unwrap()
}

fn minimal(n: usize, m: f64) -> RadialProfile<f64> {
    solve_lambda(n, EXP, m, 1e-12, 1e6).unwrap().unwrap()
}

#[test]
fn zero_centre_gives_zero_lambda() {
    let p = minimal(3, 0.0);
    assert_eq!(p.lambda, 0.0);
    assert!(p.u.iter().all(|&u| u == 0.0));
}

#[test]
fn disk_branch_matches_closed_form() {
    let b = branch(2, 0.25, 4.0);
    for r in &b.records {
        assert!((r.lambda - disk_lambda(r.m)).abs() < 1e-8, "M={}: {} vs {}", r.m, r.lambda, disk_lambda(r.m));
        assert!(r.u_at_one.abs() < 1e-9);
    }
    assert!((b.lambda_star - 2.0).abs() < 1e-8);
    assert!((b.m_star - 2f64.ln() * 2.0).abs() < 1e-4);
    assert!((b.lambda_star_richardson - 2.0).abs() < 1e-3);
    let p = minimal(2, 1.0);
    for r in [0.0, 0.3, 0.7, 0.95] {
        assert!((p.eval(r).0 - disk_profile(1.0, r)).abs() < 1e-8);
    }
}

#[test]
fn disk_lambda_star_stable_under_refinement() {
    let stars: Vec<f64> = [0.5, 0.25, 0.125].iter().map(|&h| branch(2, h, 6.0).lambda_star).collect();
    for w in stars.windows(2) {
        assert!((w[1] - w[0]).abs() < 0.01 * w[1], "{stars:?}");
    }
}

#[test]
fn shot_residual_within_integrator_contract() {
    for (n, m) in [(2, 1.0), (3, 1.5), (10, 8.0), (10, 20.0)] {
        let p = minimal(n, m);
        assert!(p.residual < 1e-8, "n={n} M={m}: {}", p.residual);
    }
}

#[test]
fn shots_are_deterministic() {
    let a = shoot_radial(3, EXP, 2.9, 1.2).unwrap();
    let b = shoot_radial(3, EXP, 2.9, 1.2).unwrap();
    assert_eq!(a, b);
}

#[test]
fn ball_branch_stability_along_the_fold() {
    let b = branch(3, 0.25, 6.0);
    assert!(!b.maximizer_at_end);
    assert!(b.lambda_star > 3.0 && b.lambda_star < 3.6);
    let (min, past): (Vec<&BranchRecord<f64>>, Vec<_>) = b.records.iter().partition(|r| r.minimal);
    assert!(min.iter().all(|r| r.mu1 >= -1e-6), "{min:?}");
    // μ₁ decreases toward 0 along the minimal branch.
    assert!(min.windows(2).all(|w| w[1].mu1 < w[0].mu1));
    let fold = minimal(3, b.m_star);
    assert!(linearized_first_eigenvalue(&fold).unwrap().abs() < 1e-2);
    // Past the turning point the solutions are unstable.
    assert!(past.iter().all(|r| r.mu1 < 0.0));
}

#[test]
fn small_lambda_spectrum_near_dirichlet_laplacian() {
    // First Dirichlet eigenvalues of the unit ball: π² in 3D, j_{0,1}² in 2D.
    let j01 = 2.404_825_557_695_773f64;
    for (n, mu0) in [(3usize, std::f64::consts::PI.powi(2)), (2, j01 * j01)] {
        let p = minimal(n, 0.0);
        let mu = linearized_first_eigenvalue(&p).unwrap();
        assert!((mu - mu0).abs() < 1e-4 * mu0, "n={n}: {mu}");
        let q = minimal(n, 0.05);
        let mq = linearized_first_eigenvalue(&q).unwrap();
        assert!(mq > 0.0 && mq < mu);
    }
}

#[test]
fn high_dimension_branch_approaches_singular_solution() {
    let b = branch(10, 1.0, 22.0);
    assert!(b.maximizer_at_end);
    assert!(b.records.iter().all(|r| r.minimal && r.mu1 >= -1e-6));
    let last = b.records.last().unwrap();
    assert!((last.lambda - 16.0).abs() < 0.5);
    assert!(b.records.windows(2).all(|w| w[1].sup_norm > w[0].sup_norm));
    for m in [20.0, 22.0] {
        let p = minimal(10, m);
        assert!(p.distance_to_singular(0.1, 0.9, 200) < 0.1);
    }
}

#[test]
fn minimal_profiles_increase_with_lambda() {
    let ps: Vec<_> = [0.5, 1.0, 1.5].iter().map(|&m| minimal(3, m)).collect();
    for w in ps.windows(2) {
        assert!(w[1].lambda > w[0].lambda);
        for k in 0..=100 {
            let r = k as f64 / 100.0;
            assert!(w[1].eval(r).0 >= w[0].eval(r).0 - 1e-9, "r={r}");
        }
    }
}

#[test]
fn singular_solution_threshold() {
    for n in 3..=14 {
        let c = singular_solution_check(n).unwrap();
        assert_eq!(c.symbolic_residual, Ratio::from_integer(0));
        assert!(c.fd_residuals.iter().all(|&(_, r)| r.abs() < 1e-9), "{:?}", c.fd_residuals);
        assert_eq!(c.stable(), n >= 10, "n={n}");
    }
    assert_eq!(singular_solution_check(10).unwrap().margin, Ratio::from_integer(0));
    assert_eq!(singular_solution_check(9).unwrap().margin, Ratio::new(-7, 4));
    assert!(singular_solution_check(2).is_err());
}

#[test]
fn test_functions_on_stable_profiles() {
    for m in [0.5, 1.0, 1.5] {
        let p = minimal(3, m);
        let rep = stability_testfunction_checks(&p, 1.9, 1.0, 1e-4).unwrap();
        assert!(rep.exponential.slack() >= -1e-8, "M={m}: {:?}", rep.exponential);
        assert!(rep.radial.slack() >= -1e-8, "M={m}: {:?}", rep.radial);
        assert!(rep.exponential.lhs > 0.0 && rep.radial.lhs > 0.0);
    }
    assert!(exponential_test_sides(&minimal(3, 1.0), 2.0).is_err());
}

#[test]
fn test_function_sides_are_quadratic() {
    let p = minimal(3, 1.0);
    let base = stability_sides(&p, &[], |_, u, ur, _| (u.exp() - 1.0, u.exp() * ur)).unwrap();
    let tripled = stability_sides(&p, &[], |_, u, ur, _| (3.0 * (u.exp() - 1.0), 3.0 * u.exp() * ur)).unwrap();
    assert!((tripled.lhs - 9.0 * base.lhs).abs() < 1e-12 * tripled.lhs);
    assert!((tripled.rhs - 9.0 * base.rhs).abs() < 1e-12 * tripled.rhs);
    assert_eq!(tripled.slack() > 0.0, base.slack() > 0.0);
}

#[test]
fn vanishing_lambda_has_positive_slack() {
    let p = minimal(3, 1e-3);
    let s = exponential_test_sides(&p, 1.0).unwrap();
    assert!(s.slack() > 0.9 * s.rhs);
}

#[test]
fn power_nonlinearity_branch() {
    let f = Nonlinearity::power(2.0).unwrap();
    let b = branch_continuation(3, f, &grid(0.5, 8.0), BranchOptions::new(1e-12)).unwrap();
    assert_eq!(b.records[0].lambda, 0.0);
    assert!(b.records.iter().filter(|r| r.minimal).all(|r| r.mu1 >= -1e-6));
    assert!(b.lambda_star > 0.0);
}

#[test]
fn csv_export() {
    let b = branch(3, 0.5, 2.0);
    let csv = b.to_csv();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "M,lambda,sup_norm,mu1");
    assert_eq!(lines.len(), b.records.len() + 1);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 4));
}
