use proptest::prelude::*;
use stablab_core::checkpoint::GridCheckpoint;
use stablab_core::isoperimetric::*;

/// Ellipse perimeter by the arithmetic-geometric mean:
/// `P = 2π/M(a, b) · (a² - Σ_{n≥0} 2^{n-1} c_n²)`, `c_0² = a² - b²`.
fn agm_perimeter(a: f64, b: f64) -> f64 {
    let (mut x, mut y) = (a.max(b), a.min(b));
    let mut sum = 0.5 * (x * x - y * y);
    let mut pow = 1.0;
    while (x - y).abs() > 1e-15 * x {
        let c = 0.5 * (x - y);
        (x, y) = (0.5 * (x + y), (x * y).sqrt());
        sum += pow * c * c;
        pow *= 2.0;
    }
    2.0 * std::f64::consts::PI / x * (a.max(b).powi(2) - sum)
}

fn interior_nodes(s: &NeumannSolution<f64>) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for j in 0..s.ny {
        for i in 0..s.nx {
            if s.kind(i, j) == NodeKind::Interior {
                v.push((i, j));
            }
        }
    }
    v
}

#[test]
fn disk_solution_is_the_quadratic() {
    let r = 1.3;
    let d = PlanarDomain::disk(r).unwrap();
    let s = solve_neumann_calibration(&d, r / 20.0).unwrap();
    let nodes = interior_nodes(&s);
    let q = |i, j| {
        let (x, y): (f64, f64) = s.coords(i, j);
        (x * x + y * y) / (2.0 * r)
    };
    let mean = nodes.iter().map(|&(i, j)| q(i, j)).sum::<f64>() / nodes.len() as f64;
    for &(i, j) in &nodes {
        assert!((s.value(i, j) - (q(i, j) - mean)).abs() < 1e-6);
    }
    assert!(s.mean().abs() < 1e-12);
    assert!((s.c - 2.0 / r).abs() < 1e-12);
}

#[test]
fn interior_residual_after_solve() {
    let domains = [
        PlanarDomain::disk(1.0).unwrap(),
        PlanarDomain::ellipse(1.0, 0.5).unwrap(),
        PlanarDomain::rectangle(1.0, 1.0).unwrap(),
    ];
    for d in domains {
        let s = solve_neumann_calibration(&d, 1.0 / 40.0).unwrap();
        assert!(s.interior_residual < 1e-6, "{}: {}", d.name(), s.interior_residual);
        assert!(s.boundary_residual < 1e-4, "{}: {}", d.name(), s.boundary_residual);
    }
}

#[test]
fn ellipse_constant_matches_agm_perimeter() {
    let (a, b) = (2.0, 1.0);
    let d = PlanarDomain::ellipse(a, b).unwrap();
    let oracle = agm_perimeter(a, b);
    assert!((d.perimeter() - oracle).abs() < 1e-10, "{} vs {oracle}", d.perimeter());
    let s = solve_neumann_calibration(&d, 1.0 / 20.0).unwrap();
    assert!((s.c - oracle / (std::f64::consts::PI * a * b)).abs() < 1e-4);
}

#[test]
fn compatibility_defect_shrinks_under_refinement() {
    let d = PlanarDomain::<f64>::ellipse(1.0, 0.5).unwrap();
    let mus: Vec<f64> = [30.0, 45.0, 60.0]
        .iter()
        .map(|&k| solve_neumann_calibration(&d, 1.0 / k).unwrap().compatibility.abs())
        .collect();
    assert!(mus.windows(2).all(|w| w[1] < w[0]), "{mus:?}");
}

#[test]
fn disk_and_ellipse_gradient_images_cover_the_unit_disk() {
    for d in [PlanarDomain::disk(1.0).unwrap(), PlanarDomain::ellipse(1.0, 0.5).unwrap()] {
        let s = solve_neumann_calibration(&d, 1.0 / 40.0).unwrap();
        let cov = contact_set_coverage(&s, 500, 11);
        assert_eq!(cov.samples, 500);
        assert_eq!(cov.fraction, 1.0, "{}: {:?}", d.name(), cov.uncovered);
        assert_eq!(cov.control_covered, 0, "{}", d.name());
    }
}

#[test]
fn ellipse_coverage_nondecreasing_under_refinement() {
    let d = PlanarDomain::ellipse(1.0, 0.5).unwrap();
    let f: Vec<f64> = [30.0, 40.0, 50.0]
        .iter()
        .map(|&k| contact_set_coverage(&solve_neumann_calibration(&d, 1.0 / k).unwrap(), 500, 3).fraction)
        .collect();
    assert!(f.windows(2).all(|w| w[1] >= w[0]), "{f:?}");
}

#[test]
fn disk_contact_points_sit_at_p_times_radius() {
    let r: f64 = 1.5;
    let s = solve_neumann_calibration(&PlanarDomain::disk(r).unwrap(), r / 30.0).unwrap();
    for p in [(0.3, -0.2), (0.0, 0.0), (-0.6, 0.5)] {
        let ((i, j), _) = contact_point(&s, p).unwrap();
        let (x, y): (f64, f64) = s.coords(i, j);
        assert!((x - r * p.0).hypot(y - r * p.1) <= s.h * 0.75);
    }
}

#[test]
fn stratified_slopes_are_inside_and_reproducible() {
    let a = stratified_disk::<f64>(500, 9);
    assert_eq!(a.len(), 500);
    assert!(a.iter().all(|&(x, y)| x * x + y * y < 1.0));
    assert_eq!(a, stratified_disk::<f64>(500, 9));
    assert_ne!(a, stratified_disk::<f64>(500, 10));
}

#[test]
fn isoperimetric_ratios() {
    let disk = isoperimetric_ratio(&PlanarDomain::disk(0.7).unwrap());
    assert!((disk - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-6);
    let square = isoperimetric_ratio(&PlanarDomain::<f64>::rectangle(1.0, 1.0).unwrap());
    assert!((square - 4.0).abs() < 1e-12);
    let ellipse = isoperimetric_ratio(&PlanarDomain::ellipse(2.0, 1.0).unwrap());
    let oracle = agm_perimeter(2.0, 1.0) / (2.0 * std::f64::consts::PI).sqrt();
    assert!((ellipse - oracle).abs() < 1e-10);
    assert!(disk < square && disk < ellipse);
}

#[test]
fn solution_checkpoint_round_trip() {
    let s = solve_neumann_calibration(&PlanarDomain::<f64>::ellipse(1.0, 0.5).unwrap(), 1.0 / 30.0).unwrap();
    let cp = s.to_checkpoint();
    let mut buf = Vec::new();
    cp.write_to(&mut buf).unwrap();
    let back = GridCheckpoint::<f64>::read_from(&buf[..]).unwrap();
    assert_eq!((back.rows, back.cols), (s.ny, s.nx));
    for (a, b) in cp.values.iter().zip(&back.values) {
        assert!((a.is_nan() && b.is_nan()) || a == b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ratio_is_scale_invariant(a in 0.2f64..3.0, b in 0.2f64..3.0, s in 0.05f64..20.0) {
        for d in [
            PlanarDomain::ellipse(a, b).unwrap(),
            PlanarDomain::rectangle(a, b).unwrap(),
            PlanarDomain::disk(a).unwrap(),
        ] {
            let r = isoperimetric_ratio(&d);
            let rs = isoperimetric_ratio(&d.scaled(s).unwrap());
            prop_assert!((r - rs).abs() < 1e-8);
            prop_assert!(r >= 2.0 * std::f64::consts::PI.sqrt() - 1e-9);
        }
    }
}
