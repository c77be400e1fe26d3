use std::collections::BTreeMap;

use stablab_core::isoperimetric::{
    contact_set_coverage, isoperimetric_ratio, solve_neumann_calibration, NodeKind, PlanarDomain,
};

use super::Produced;
use crate::config::{DomainSpec, Isoperimetric, Tolerances};
use crate::report::Check;
use crate::{Artifact, RunError};

fn build(domain: &DomainSpec) -> Result<PlanarDomain<f64>, RunError> {
    Ok(match *domain {
        DomainSpec::Disk { radius } => PlanarDomain::disk(radius)?,
        DomainSpec::Rectangle { width, height } => PlanarDomain::rectangle(width, height)?,
        DomainSpec::Ellipse { a, b } => PlanarDomain::ellipse(a, b)?,
    })
}

pub(crate) fn run(p: &Isoperimetric, tol: &Tolerances, seed: u64) -> Result<Produced, RunError> {
    let domains: Vec<PlanarDomain<f64>> = p.domains.iter().map(build).collect::<Result<_, _>>()?;
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for d in &domains {
        *seen.entry(d.name()).or_default() += 1;
    }
    let labels: Vec<String> = domains
        .iter()
        .enumerate()
        .map(|(i, d)| if seen[d.name()] > 1 { format!("{}{i}", d.name()) } else { d.name().to_string() })
        .collect();

    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    let mut ratios = Vec::new();
    for (d, label) in domains.iter().zip(&labels) {
        let sol = solve_neumann_calibration(d, p.h)?;
        let ratio = isoperimetric_ratio(d);
        ratios.push(ratio);
        checks.push(
            Check::new(format!("neumann-solve-{label}"), "isoperimetric:neumann-problem")
                .value("c", sol.c)
                .value("compatibility", sol.compatibility)
                .value("interior_residual", sol.interior_residual)
                .value("boundary_residual", sol.boundary_residual)
                .value("ratio", ratio),
        );
        if let PlanarDomain::Disk { radius } = *d {
            // Up to its mean, the solution on a disk is r²/(2R).
            let q = |x: f64, y: f64| (x * x + y * y) / (2.0 * radius);
            let mut nodes = Vec::new();
            for j in 0..sol.ny {
                for i in 0..sol.nx {
                    if sol.kind(i, j) == NodeKind::Interior {
                        nodes.push((i, j));
                    }
                }
            }
            let mean = nodes
                .iter()
                .map(|&(i, j)| {
                    let (x, y) = sol.coords(i, j);
                    q(x, y)
                })
                .sum::<f64>()
                / nodes.len() as f64;
            let err = nodes
                .iter()
                .map(|&(i, j)| {
                    let (x, y) = sol.coords(i, j);
                    (sol.value(i, j) - (q(x, y) - mean)).abs()
                })
                .fold(0.0, f64::max);
            checks.push(
                Check::new(format!("disk-solution-{label}"), "isoperimetric:disk-quadratic")
                    .value("max_error", err)
                    .tol("abs", tol.neumann_profile)
                    .holds(err <= tol.neumann_profile),
            );
            let exact = 2.0 * std::f64::consts::PI.sqrt();
            checks.push(
                Check::new(format!("disk-ratio-{label}"), "isoperimetric:ball-ratio")
                    .value("ratio", ratio)
                    .value("exact", exact)
                    .tol("abs", tol.isoperimetric_ratio)
                    .holds((ratio - exact).abs() <= tol.isoperimetric_ratio),
            );
        }
        let cov = contact_set_coverage(&sol, p.samples, seed);
        checks.push(
            Check::new(format!("contact-coverage-{label}"), "isoperimetric:gradient-image-covers-ball")
                .count("samples", cov.samples)
                .count("covered", cov.covered)
                .value("fraction", cov.fraction)
                .value("worst_mismatch", cov.worst_mismatch)
                .tol("gradient_match", cov.tolerance)
                .holds(cov.covered == cov.samples),
        );
        checks.push(
            Check::new(format!("contact-control-{label}"), "isoperimetric:outside-ball-control")
                .count("samples", cov.control_samples)
                .count("covered", cov.control_covered),
        );
        if p.export_checkpoints {
            let mut buf = Vec::new();
            sol.to_checkpoint().write_to(&mut buf).expect("in-memory write");
            artifacts.push(Artifact { name: format!("neumann_{label}.checkpoint"), contents: buf });
        }
    }
    let disks: Vec<usize> = (0..domains.len()).filter(|&i| matches!(domains[i], PlanarDomain::Disk { .. })).collect();
    let others: Vec<usize> = (0..domains.len()).filter(|i| !disks.contains(i)).collect();
    if !disks.is_empty() && !others.is_empty() {
        let ok = disks.iter().all(|&i| others.iter().all(|&j| ratios[i] < ratios[j]));
        let mut c = Check::new("ratio-ordering", "isoperimetric:ball-minimizes");
        for (l, r) in labels.iter().zip(&ratios) {
            c = c.value(&format!("ratio_{l}"), *r);
        }
        checks.push(c.holds(ok));
    }
    Ok((checks, artifacts))
}
