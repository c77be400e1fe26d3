use stablab_core::hardy::{ground_state_mesh, hardy_sharpness_probe, schrodinger_ground_state};

use super::{max_of, min_of, Produced};
use crate::config::{Hardy, Tolerances};
use crate::report::Check;
use crate::RunError;

pub(crate) fn run(p: &Hardy, tol: &Tolerances) -> Result<Produced, RunError> {
    let mut checks = Vec::new();
    for &n in &p.dims {
        let target = ((n as f64 - 2.0) / 2.0).powi(2);
        let w = hardy_sharpness_probe::<f64>(n, tol.hardy_sharpness * target, p.budget)?;
        let rel = (w.ratio - target).abs() / target;
        checks.push(
            Check::new(format!("hardy-sharpness-n{n}"), "hardy:sharp-constant")
                .value("alpha", w.alpha)
                .value("rho", w.rho)
                .value("ratio", w.ratio)
                .value("target", target)
                .count("evaluations", w.evaluations)
                .value("relative_gap", rel)
                .tol("relative", tol.hardy_sharpness)
                .holds(rel <= tol.hardy_sharpness),
        );

        let mut sub = Vec::new();
        let mut sup = Vec::new();
        for &r_min in &p.r_mins {
            let mesh = ground_state_mesh(r_min, p.per_efold)?;
            sub.push(schrodinger_ground_state(n, target - p.offset, &mesh)?);
            sup.push(schrodinger_ground_state(n, target + p.offset, &mesh)?);
        }
        let (lo, hi) = (min_of(sub.iter().copied()), max_of(sub.iter().copied()));
        let spread = (hi - lo) / max_of(sub.iter().map(|v| v.abs()));
        let mut c = Check::new(format!("subcritical-ground-state-n{n}"), "hardy:subcritical-bounded")
            .value("a", target - p.offset)
            .value("relative_spread", spread)
            .tol("relative_spread", tol.hardy_spread);
        for (r, mu) in p.r_mins.iter().zip(&sub) {
            c = c.value(&format!("mu1_rmin_{r:e}"), *mu);
        }
        checks.push(c.holds(spread < tol.hardy_spread));

        let last = *sup.last().expect("validated: at least two radii");
        let mut c = Check::new(format!("supercritical-divergence-n{n}"), "hardy:supercritical-unbounded")
            .value("a", target + p.offset)
            .tol("upper", -tol.hardy_divergence);
        for (r, mu) in p.r_mins.iter().zip(&sup) {
            c = c.value(&format!("mu1_rmin_{r:e}"), *mu);
        }
        checks.push(c.holds(last < -tol.hardy_divergence));
        checks.push(
            Check::new(format!("supercritical-trend-n{n}"), "hardy:supercritical-unbounded")
                .value("growth_per_refinement", last / sup[sup.len() - 2])
                .value("monotone", if sup.windows(2).all(|w| w[1] < w[0]) { 1.0 } else { 0.0 }),
        );
    }
    Ok((checks, Vec::new()))
}
