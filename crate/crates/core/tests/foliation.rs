use stablab_core::foliation::*;

fn opts(tau_max: f64) -> LeafOptions<f64> {
    LeafOptions::new(tau_max, 1e-10)
}

#[test]
fn leaf_scaling_law() {
    let base = integrate_leaf_parametric(3, 1.0, opts(20.0)).unwrap();
    let lam = 2.5;
    let scaled = integrate_leaf_parametric(3, lam, opts(20.0 * lam)).unwrap();
    for tau in [0.5, 3.0, 10.0, 19.0] {
        let (s, t) = base.point_at(tau).unwrap();
        let (ss, ts) = scaled.point_at(lam * tau).unwrap();
        assert!((ss - lam * s).abs() < 1e-6 && (ts - lam * t).abs() < 1e-6, "tau={tau}");
    }
}

#[test]
fn dimension_eight_leaf_stays_on_one_side() {
    let leaf = integrate_leaf_parametric(4, 1.0, opts(100.0)).unwrap();
    assert_eq!(leaf.termination, Termination::TauMax);
    assert!(leaf.samples.iter().all(|p| p.s > p.t));
    assert!(leaf.crossings.is_empty());
}

#[test]
fn low_dimensions_cross_the_cone() {
    // Consecutive crossings are a factor ~e^{2π/√7} ≈ 10.7 apart in r, so
    // two of them fall inside τ ≤ 100 from s0 = 1.
    let leaf = integrate_leaf_parametric(2, 1.0, opts(100.0)).unwrap();
    assert!(leaf.crossings.len() >= 2, "{:?}", leaf.crossings);
    let leaf = integrate_leaf_parametric(3, 1.0, opts(200.0)).unwrap();
    assert!(leaf.crossings.len() >= 2, "{:?}", leaf.crossings);
}

#[test]
fn crossing_counts_stable_under_tolerance_halving() {
    for m in [2, 3, 4] {
        let a = integrate_leaf_parametric(m, 1.0f64, LeafOptions::new(200.0, 1e-10)).unwrap();
        let b = integrate_leaf_parametric(m, 1.0f64, LeafOptions::new(200.0, 5e-11)).unwrap();
        assert_eq!(a.crossings.len(), b.crossings.len());
        let mut worst: f64 = 0.0;
        for p in a.samples.iter().step_by(17) {
            let (s, t) = b.point_at(p.tau).unwrap();
            worst = worst.max((s - p.s).abs()).max((t - p.t).abs());
        }
        assert!(worst < 1e-6, "m={m}: {worst}");
    }
}

#[test]
fn leaves_stay_in_quarter_plane() {
    for m in [2, 3, 4, 5] {
        let leaf = integrate_leaf_parametric(m, 0.7, opts(50.0)).unwrap();
        assert!(leaf.samples.iter().all(|p| p.s >= 0.0 && p.t >= 0.0));
    }
}

#[test]
fn angular_form_matches_parametric() {
    for m in [2, 3, 4] {
        let leaf = integrate_leaf_parametric(m, 1.0, opts(30.0)).unwrap();
        let (th0, z0, dz0) = polar_data(&leaf, 1.0).unwrap();
        let th1 = th0 + 0.05;
        let ang = integrate_leaf_angular(m, z0, dz0, (th0, th1), 1e-11, 1e-3).unwrap();
        assert_eq!(ang.termination, AngularTermination::Completed);
        // Near τ = 1 the leaf is far from radial, so z' is moderate.
        // Locate the parametric point at polar angle th1 by bisection.
        let (mut lo, mut hi) = (1.0, 1.0);
        while polar_data(&leaf, hi).unwrap().0 < th1 {
            hi += 0.05;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if polar_data(&leaf, mid).unwrap().0 < th1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (s, t) = leaf.point_at(0.5 * (lo + hi)).unwrap();
        let &(sa, ta) = ang.points().last().unwrap();
        assert!((s - sa).abs() < 1e-5 && (t - ta).abs() < 1e-5, "m={m}: ({s},{t}) vs ({sa},{ta})");
    }
}

#[test]
fn angular_reflection_symmetry() {
    let (a, b) = (0.3, 0.6);
    let fwd = integrate_leaf_angular(3, 0.1, 0.4, (a, b), 1e-11, 1e-3).unwrap();
    let (_, zb, dzb) = fwd.last();
    let half_pi = std::f64::consts::FRAC_PI_2;
    // w(θ) = z(π/2 - θ) starts at π/2 - b with slope -z'(b).
    let refl = integrate_leaf_angular(3, zb, -dzb, (half_pi - b, half_pi - a), 1e-11, 1e-3).unwrap();
    let (_, zr, dzr) = refl.last();
    assert!((zr - 0.1).abs() < 1e-6 && (dzr + 0.4).abs() < 1e-6);
}

#[test]
fn angular_shift_is_rescaling() {
    let c: f64 = 0.7;
    let a = integrate_leaf_angular(2, 0.0, 0.3, (0.4, 0.7), 1e-11, 1e-3).unwrap();
    let b = integrate_leaf_angular(2, c, 0.3, (0.4, 0.7), 1e-11, 1e-3).unwrap();
    let (pa, pb) = (a.points(), b.points());
    let (sa, ta) = *pa.last().unwrap();
    let (sb, tb) = *pb.last().unwrap();
    let lam = c.exp();
    assert!((sb - lam * sa).abs() < 1e-8 && (tb - lam * ta).abs() < 1e-8);
}

#[test]
fn foliation_report_dimension_eight() {
    let (rep, _) = foliation_report(4, &[0.5, 1.0, 2.0], opts(100.0), (0.1, 10.0)).unwrap();
    assert!(rep.leaves.iter().all(|l| l.crossings == 0));
    assert_eq!(rep.pairs.len(), 3);
    assert!(rep.pairs.iter().all(|p| p.min_distance.unwrap() > 0.0));
}

#[test]
fn foliation_report_single_leaf() {
    let (rep, _) = foliation_report(3, &[1.0], opts(200.0), (0.1, 10.0)).unwrap();
    assert!(rep.pairs.is_empty());
    assert!(rep.leaves[0].crossings >= 2);
}
