use stablab_core::gelfand::{
    branch_continuation, singular_solution_check, solve_lambda, stability_testfunction_checks, BranchOptions,
    Nonlinearity,
};

use super::{max_of, min_of, Produced};
use crate::config::{GelfandBranch, Tolerances};
use crate::report::Check;
use crate::{Artifact, RunError};

const EXP: Nonlinearity<f64> = Nonlinearity::Exponential;

fn ratio_f64(r: num_rational::Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub(crate) fn run(p: &GelfandBranch, tol: &Tolerances) -> Result<Produced, RunError> {
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    let opts = BranchOptions { root_tol: p.root_tol, lambda_cap: p.lambda_cap, ..BranchOptions::new(p.root_tol) };
    for run in &p.branches {
        let n = run.n;
        let origin = solve_lambda(n, EXP, 0.0, p.root_tol, p.lambda_cap)?.map(|q| q.lambda).unwrap_or(f64::NAN);
        checks.push(
            Check::new(format!("branch-origin-n{n}"), "gelfand:trivial-solution")
                .value("lambda_at_zero", origin)
                .holds(origin == 0.0),
        );

        let k = (run.m_max / run.m_step).round() as usize;
        let grid: Vec<f64> = (0..=k).map(|i| i as f64 * run.m_step).collect();
        let b = branch_continuation(n, EXP, &grid, opts)?;
        artifacts.push(Artifact { name: format!("gelfand_branch_n{n}.csv"), contents: b.to_csv().into_bytes() });

        let minimal: Vec<_> = b.records.iter().filter(|r| r.minimal).collect();
        let min_mu = min_of(minimal.iter().map(|r| r.mu1));
        checks.push(
            Check::new(format!("minimal-branch-stability-n{n}"), "gelfand:minimal-branch-stable")
                .count("minimal_records", minimal.len())
                .count("skipped", b.skipped.len())
                .value("min_mu1", min_mu)
                .tol("lower", -tol.gelfand_mu1)
                .holds(!minimal.is_empty() && min_mu >= -tol.gelfand_mu1),
        );
        checks.push(
            Check::new(format!("extremal-parameter-n{n}"), "gelfand:extremal-parameter")
                .value("lambda_star", b.lambda_star)
                .value("m_star", b.m_star)
                .value("lambda_star_grid", b.lambda_star_grid)
                .value("lambda_star_richardson", b.lambda_star_richardson)
                .value("maximizer_at_end", if b.maximizer_at_end { 1.0 } else { 0.0 })
                .value("max_residual", max_of(b.records.iter().map(|r| r.residual))),
        );

        // From dimension 10 on the branch climbs to the singular solution
        // -2 log r at λ = 2(n-2).
        if n >= 10 {
            let last = b.records.last().expect("nonempty grid");
            let limit = 2.0 * (n as f64 - 2.0);
            let profile = solve_lambda(n, EXP, last.m, p.root_tol, p.lambda_cap)?;
            let dist = profile
                .map(|q| q.distance_to_singular(p.singular_window[0], p.singular_window[1], p.singular_samples))
                .unwrap_or(f64::INFINITY);
            checks.push(
                Check::new(format!("singular-limit-n{n}"), "gelfand:extremal-singular")
                    .value("m_max", last.m)
                    .value("lambda_at_m_max", last.lambda)
                    .value("lambda_limit", limit)
                    .value("distance_to_singular", dist)
                    .tol("lambda", tol.extremal_lambda)
                    .tol("distance", tol.singular_distance)
                    .holds(
                        (last.lambda - limit).abs() < tol.extremal_lambda
                            && dist < tol.singular_distance
                            && minimal.len() == b.records.len(),
                    ),
            );
        }
    }

    let mut margins = Vec::new();
    for &n in &p.singular_dims {
        let s = singular_solution_check(n)?;
        let fd = max_of(s.fd_residuals.iter().map(|&(_, r)| r.abs()));
        margins.push((n, s.margin));
        checks.push(
            Check::new(format!("singular-solution-n{n}"), "gelfand:singular-solution")
                .value("symbolic_residual", ratio_f64(s.symbolic_residual))
                .value("max_fd_residual", fd)
                .value("stability_margin", ratio_f64(s.margin))
                .tol("fd", tol.singular_residual)
                .holds(*s.symbolic_residual.numer() == 0 && fd < tol.singular_residual),
        );
    }
    if !margins.is_empty() {
        // Stable exactly from dimension 10 on.
        let ok = margins.iter().all(|(n, m)| (*m >= num_rational::Ratio::from_integer(0)) == (*n >= 10));
        let mut c = Check::new("singular-stability-threshold", "gelfand:singular-threshold");
        for (n, m) in &margins {
            c = c.value(&format!("margin_n{n}"), ratio_f64(*m));
        }
        checks.push(c.holds(ok));
    }

    for &m in &p.test_centres {
        let prof = solve_lambda(p.test_dim, EXP, m, p.root_tol, p.lambda_cap)?
            .ok_or_else(|| RunError::Config(format!("no minimal solution with centre value {m}")))?;
        let rep = stability_testfunction_checks(&prof, p.alpha_exp, p.alpha_radial, p.radial_eps)?;
        for (label, sides) in [("exponential", rep.exponential), ("radial", rep.radial)] {
            checks.push(
                Check::new(format!("test-function-{label}-M{m}"), "gelfand:stability-inequality")
                    .value("lambda", rep.lambda)
                    .value("lhs", sides.lhs)
                    .value("rhs", sides.rhs)
                    .value("slack", sides.slack())
                    .tol("lower", -tol.stability_slack)
                    .holds(sides.slack() >= -tol.stability_slack),
            );
        }
    }
    Ok((checks, artifacts))
}
