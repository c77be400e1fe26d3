use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stablab_core::cone::{
    calibration_sign_scan, mean_curvature, second_form_norm_sq, simons_cone_point, simons_gap_cross_check,
    simons_inequality_gap, stability_scan, LevelSetField, RadialConeProfile,
};

use super::{max_of, min_of, Produced};
use crate::config::{ConeStability, SimonsCalibration, Tolerances};
use crate::report::Check;
use crate::RunError;

fn random_direction(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-2 {
            return v;
        }
    }
}

pub(crate) fn simons_calibration(p: &SimonsCalibration, tol: &Tolerances, seed: u64) -> Result<Produced, RunError> {
    let mut checks = Vec::new();
    let (lo, hi) = (p.radius_range[0].ln(), p.radius_range[1].ln());
    for &m in &p.curvature_m {
        let field = LevelSetField::<f64>::simons(m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (m as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let (mut worst_h, mut worst_ray) = (0.0f64, 0.0f64);
        let mut d_range = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..p.points {
            let a = random_direction(&mut rng, m);
            let b = random_direction(&mut rng, m);
            let r = if hi > lo { rng.gen_range(lo..hi).exp() } else { lo.exp() };
            let x = simons_cone_point(&a, &b, r);
            worst_h = worst_h.max(mean_curvature(&field, &x)?.abs());
            let d = r * r * second_form_norm_sq(&field, &x)?;
            d_range = (d_range.0.min(d), d_range.1.max(d));
            for &lam in &p.ray_scales {
                let y: Vec<f64> = x.iter().map(|v| v * lam).collect();
                let dy = (lam * r).powi(2) * second_form_norm_sq(&field, &y)?;
                worst_ray = worst_ray.max((dy - d).abs());
            }
        }
        checks.push(
            Check::new(format!("mean-curvature-m{m}"), "simons-cone:minimal")
                .count("points", p.points)
                .value("max_abs_mean_curvature", worst_h)
                .tol("abs", tol.curvature)
                .holds(worst_h <= tol.curvature),
        );
        checks.push(
            Check::new(format!("ray-homogeneity-m{m}"), "simons-cone:curvature-homogeneity")
                .value("max_ray_variation", worst_ray)
                .value("r2c2_min", d_range.0)
                .value("r2c2_max", d_range.1)
                .tol("abs", tol.curvature)
                .holds(worst_ray <= tol.curvature),
        );
    }
    for &m in &p.calibration_m {
        let scan = calibration_sign_scan::<f64>(m, p.side, p.grid)?;
        // The divergence has the sign of s⁴ - t⁴ exactly when 2m >= 8.
        let expect_clean = m >= 4;
        let mut c = Check::new(format!("calibration-sign-m{m}"), "calibration:sign-threshold")
            .count("nodes", scan.nodes)
            .count("violations", scan.violations)
            .value("expect_zero_violations", if expect_clean { 1.0 } else { 0.0 });
        if let Some((s, t)) = scan.first_violation {
            c = c.value("first_violation_s", s).value("first_violation_t", t);
        }
        checks.push(c.holds((scan.violations == 0) == expect_clean));
    }
    Ok((checks, Vec::new()))
}

pub(crate) fn cone_stability(p: &ConeStability, tol: &Tolerances) -> Result<Produced, RunError> {
    let mut checks = Vec::new();
    for &m in &p.gap_m {
        let profile = RadialConeProfile::<f64>::simons(m)?;
        let gaps = simons_inequality_gap(&profile, &p.gap_radii)?;
        let scaled = max_of(gaps.iter().zip(&p.gap_radii).map(|(g, r)| g.abs() * r.powi(4)));
        checks.push(
            Check::new(format!("simons-gap-n{}", 2 * m), "simons-inequality:equality-on-cone")
                .value("d", profile.d)
                .value("max_abs_gap_r4", scaled)
                .tol("abs_r4", tol.simons_gap)
                .holds(scaled <= tol.simons_gap),
        );
        let mut worst = 0.0f64;
        for &r in &p.gap_radii {
            worst = worst.max(simons_gap_cross_check::<f64>(m, r)?.relative_mismatch);
        }
        checks.push(
            Check::new(format!("simons-gap-cross-check-n{}", 2 * m), "simons-inequality:cross-check")
                .value("max_relative_mismatch", worst)
                .tol("relative", tol.gap_cross_check)
                .holds(worst <= tol.gap_cross_check),
        );
    }
    for w in &p.windows {
        let profile = RadialConeProfile::<f64>::simons(w.m)?;
        let recs = stability_scan(&profile, &w.alphas, &w.betas, p.rho_in, &p.rho_outs, p.per_efold)?;
        let adm: Vec<_> = recs.iter().filter(|r| r.outcome.admissible).collect();
        let min_q = min_of(adm.iter().map(|r| r.outcome.q));
        let n = 2 * w.m;
        let mut c = Check::new(format!("cone-stability-n{n}"), "cone-stability:dimension-threshold")
            .value("d", profile.d)
            .count("probes", recs.len())
            .count("admissible", adm.len())
            .value("min_q", min_q);
        if let Some(best) = adm.iter().min_by(|a, b| a.outcome.q.total_cmp(&b.outcome.q)) {
            c = c
                .value("argmin_alpha", best.alpha)
                .value("argmin_beta", best.beta)
                .value("argmin_rho_out", best.rho_out);
        }
        // Unstable below dimension 8: some admissible probe must go negative.
        let ok = !adm.is_empty() && if n < 8 { min_q < 0.0 } else { min_q >= -tol.cone_quotient };
        if n >= 8 {
            c = c.tol("q_lower", tol.cone_quotient);
        }
        checks.push(c.holds(ok));
    }
    Ok((checks, Vec::new()))
}
