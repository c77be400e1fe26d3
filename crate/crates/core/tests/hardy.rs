use stablab_core::hardy::*;

#[test]
fn sharpness_n3_and_n10() {
    for (n, eps) in [(3usize, 0.05 * 0.25), (10, 0.05 * 16.0)] {
        let w = hardy_sharpness_probe::<f64>(n, eps, 200).unwrap();
        println!("n={n}: {w:?}");
        assert!(w.reached, "n={n}: {w:?}");
        assert!(w.ratio >= w.target - 1e-9);
    }
    let w = hardy_sharpness_probe::<f64>(3, 0.05, 200).unwrap();
    assert!(w.reached);
    let w = hardy_sharpness_probe::<f64>(10, 0.5, 200).unwrap();
    assert!(w.reached);
}

#[test]
fn shrinking_rho_never_worsens_ratio() {
    for n in [3usize, 5, 10] {
        let alpha = (n as f64 - 2.0) / 2.0;
        let mut prev = f64::INFINITY;
        for e in [1, 2, 4, 8, 16, 32] {
            let xi = RadialTestFunction::new(alpha, 10f64.powi(-e)).unwrap();
            let mesh = quotient_mesh(&xi, 12).unwrap();
            let r = hardy_ratio(n, &xi, &mesh).unwrap();
            assert!(r <= prev * (1.0 + 1e-9), "n={n} e={e}: {r} > {prev}");
            prev = r;
        }
    }
}

#[test]
fn critical_quotient_nonnegative() {
    for n in [3usize, 4, 7, 10] {
        let a = ((n as f64 - 2.0) / 2.0).powi(2);
        for alpha in [0.1, 0.5, 1.0, 3.0, 4.5] {
            for rho in [1e-1, 1e-3, 1e-8] {
                let xi = RadialTestFunction::new(alpha, rho).unwrap();
                let mesh = quotient_mesh(&xi, 24).unwrap();
                let q = hardy_quotient(n, a, &xi, &mesh).unwrap();
                assert!(q >= -1e-8, "n={n} alpha={alpha} rho={rho}: {q}");
            }
        }
    }
}

#[test]
fn quotient_invariant_under_scaling() {
    let nodes: Vec<f64> = (0..=50).map(|i| 0.02 * i as f64).collect();
    let vals: Vec<f64> = nodes.iter().map(|r| (1.0 - r) * r.sqrt()).collect();
    let a = SampledRadial::new(nodes.clone(), vals.clone()).unwrap();
    let b = SampledRadial::new(nodes.clone(), vals.iter().map(|v| -3.5 * v).collect()).unwrap();
    let mesh = stablab_core::numerics::Mesh1D::new(nodes[1..].to_vec()).unwrap();
    let qa = hardy_quotient(5, 2.0, &a, &mesh).unwrap();
    let qb = hardy_quotient(5, 2.0, &b, &mesh).unwrap();
    assert!((qa - qb).abs() < 1e-12 * qa.abs());
}

#[test]
fn subcritical_scan_bounded_below() {
    let mut worst = f64::INFINITY;
    for alpha in [0.5, 1.0, 2.0, 3.0, 3.9, 4.0, 4.5] {
        for rho in [1e-1, 1e-2, 1e-4, 1e-8] {
            let xi = RadialTestFunction::new(alpha, rho).unwrap();
            let mesh = quotient_mesh(&xi, 24).unwrap();
            worst = worst.min(hardy_quotient(10, 15.5, &xi, &mesh).unwrap());
        }
    }
    assert!(worst > -1e3, "{worst}");
}

#[test]
fn outer_support_quotient_finite() {
    // Supported in [1/2, 1]: 1/r² <= 4 there, so the quotient is at least -4a.
    let nodes: Vec<f64> = (0..=100).map(|i| 0.5 + 0.005 * i as f64).collect();
    let vals: Vec<f64> = nodes.iter().map(|r| ((r - 0.5) * (1.0 - r)).max(0.0)).collect();
    let xi = SampledRadial::new(nodes.clone(), vals).unwrap();
    let mesh = stablab_core::numerics::Mesh1D::new(nodes).unwrap();
    for a in [1.0, 100.0, 1e6] {
        assert!(hardy_quotient(4, a, &xi, &mesh).unwrap() >= -4.0 * a);
    }
}

#[test]
fn ground_state_string_limit() {
    let mesh = ground_state_mesh(1e-4, 60).unwrap();
    let mu = schrodinger_ground_state(3, 0.0, &mesh).unwrap();
    let pi2 = std::f64::consts::PI.powi(2);
    assert!((mu - pi2).abs() / pi2 < 0.01, "{mu}");
}

#[test]
fn sub_and_supercritical_ground_states() {
    let mut sub = Vec::new();
    let mut sup = Vec::new();
    for r_min in [1e-2, 1e-3, 1e-4] {
        let mesh = ground_state_mesh(r_min, 60).unwrap();
        sub.push(schrodinger_ground_state(10, 15.0, &mesh).unwrap());
        sup.push(schrodinger_ground_state(10, 17.0, &mesh).unwrap());
    }
    println!("sub {sub:?} sup {sup:?}");
    let (lo, hi) = sub.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    assert!((hi - lo) / hi.abs() < 0.1);
    assert!(sup[2] < -1e3);
    assert!(sup[0] > sup[1] && sup[1] > sup[2]);
}

#[test]
fn ground_state_nonincreasing_in_a() {
    let mesh = ground_state_mesh(1e-3, 40).unwrap();
    let mut prev = f64::INFINITY;
    for a in [0.0, 5.0, 10.0, 15.0, 16.0, 17.0, 20.0] {
        let mu = schrodinger_ground_state(10, a, &mesh).unwrap();
        assert!(mu <= prev + 1e-9 * prev.abs().max(1.0));
        prev = mu;
    }
}
