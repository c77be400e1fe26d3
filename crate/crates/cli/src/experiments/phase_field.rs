use stablab_core::allen_cahn::{
    energy_growth_fit, layer_check, minimality_comparison, solve_saddle, supersolution_check, AngularMode, SaddleField,
    SampleRegion, StabilityProbe,
};
use twofloat::TwoFloat;

use super::{min_of, Produced};
use crate::config::{AllenCahnLayer, AllenCahnSaddle, Precision, Tolerances};
use crate::report::Check;
use crate::{Artifact, RunError};

pub(crate) fn layer(p: &AllenCahnLayer, tol: &Tolerances) -> Result<Produced, RunError> {
    let c = layer_check::<f64>()?;
    let exact = 2.0 * 2f64.sqrt() / 3.0;
    let mut checks = vec![
        Check::new("layer-residual", "allen-cahn:layer-solution")
            .value("max_residual", c.max_residual)
            .tol("abs", tol.layer_residual)
            .holds(c.max_residual < tol.layer_residual),
        Check::new("layer-energy", "allen-cahn:layer-energy")
            .value("energy", c.energy)
            .value("exact", exact)
            .tol("abs", tol.layer_energy)
            .holds((c.energy - exact).abs() <= tol.layer_energy),
    ];
    for &r in &p.comparison_radii {
        let cmp = minimality_comparison::<f64>(p.comparison_dim, r)?;
        checks.push(
            Check::new(format!("layer-beats-cutoff-R{r}"), "allen-cahn:layer-minimality")
                .value("layer_energy", cmp.layer_energy)
                .value("competitor_energy", cmp.competitor_energy)
                .value("layer_energy_over_r_n_minus_1", cmp.layer_energy / r.powi(p.comparison_dim as i32 - 1))
                .holds(cmp.layer_energy <= cmp.competitor_energy),
        );
    }
    Ok((checks, Vec::new()))
}

/// Solves in the requested precision. Returns the field rounded to f64, the
/// range-violation count measured before rounding, convergence and cycles.
fn solve_in(p: &AllenCahnSaddle) -> Result<(SaddleField<f64>, usize, bool, usize), RunError> {
    match p.precision {
        Precision::F64 => {
            let f = solve_saddle(p.m, p.length, p.h, p.tol, p.max_cycles)?;
            let v = f.range_violations();
            let (conv, its) = (f.converged, f.iterations);
            Ok((f, v, conv, its))
        }
        Precision::DoubleDouble => {
            let d =
                solve_saddle(p.m, TwoFloat::from(p.length), TwoFloat::from(p.h), TwoFloat::from(p.tol), p.max_cycles)?;
            let n = d.cells();
            let values: Vec<f64> =
                (0..=n).flat_map(|i| (0..=n).map(move |j| (i, j))).map(|(i, j)| f64::from(d.node(i, j))).collect();
            let f = SaddleField::from_values(p.m, p.length, n, values, f64::from(d.residual))?;
            Ok((f, d.range_violations(), d.converged, d.iterations))
        }
    }
}

pub(crate) fn saddle(p: &AllenCahnSaddle, tol: &Tolerances) -> Result<Produced, RunError> {
    let (field, range_violations, converged, cycles) = solve_in(p)?;
    let mut checks = vec![
        Check::new(format!("saddle-residual-n{}", 2 * p.m), "saddle:solution")
            .value("residual", field.residual)
            .count("cycles", cycles)
            .tol("abs", tol.saddle_residual)
            .holds(converged && field.residual < tol.saddle_residual),
        Check::new(format!("saddle-range-n{}", 2 * p.m), "saddle:between-zero-and-one")
            .count("violations", range_violations)
            .value("double_double", if p.precision == Precision::DoubleDouble { 1.0 } else { 0.0 })
            .holds(range_violations == 0),
        Check::new(format!("saddle-monotonicity-n{}", 2 * p.m), "saddle:monotone-across-cone")
            .count("violations", field.direction_monotonicity_violations(0.0)),
    ];
    let fit = energy_growth_fit(&field, &p.fit_radii)?;
    let expected = 2.0 * p.m as f64 - 1.0;
    let mut c = Check::new(format!("saddle-energy-growth-n{}", 2 * p.m), "saddle:energy-growth")
        .value("exponent", fit.exponent)
        .value("expected", expected)
        .tol("abs", tol.energy_exponent);
    for (r, e) in fit.radii.iter().zip(&fit.energies) {
        c = c.value(&format!("energy_R{r}"), *e);
    }
    checks.push(c.holds((fit.exponent - expected).abs() <= tol.energy_exponent));

    let mut artifacts = Vec::new();
    if p.export_checkpoint {
        let mut buf = Vec::new();
        field.to_checkpoint().write_to(&mut buf).expect("in-memory write");
        artifacts.push(Artifact { name: format!("saddle_m{}.checkpoint", p.m), contents: buf });
    }

    let s = &p.stability;
    if s.enabled {
        let f = solve_saddle(s.m, s.length, s.h, p.tol, p.max_cycles)?;
        let probes: Vec<StabilityProbe<f64>> = s
            .probe_centers
            .iter()
            .flat_map(|&c| {
                [AngularMode::Uniform, AngularMode::VanishOnAxes, AngularMode::OddAcrossCone]
                    .map(|mode| StabilityProbe::new(c, s.probe_half_width.min(c), mode))
            })
            .collect::<Result<_, _>>()?;
        let region = SampleRegion { t_min: s.t_min, r_max: s.r_max };
        let rep = supersolution_check(&f, &s.bs, region, tol.operator_defect, &probes)?;
        let n = 2 * s.m;
        let mut c = Check::new(format!("supersolution-witness-n{n}"), "saddle:stability-witness")
            .value("residual", f.residual)
            .tol("defect", tol.operator_defect);
        match rep.witness.and_then(|b| rep.records.iter().find(|r| r.b == b)) {
            Some(w) => {
                c = c.value("b", w.b).value("min_phi", w.min_phi).value("max_defect", w.max_defect);
                checks.push(c.holds(f.converged && w.min_phi > 0.0 && w.max_defect <= tol.operator_defect));
            }
            None => checks.push(c.holds(false)),
        }
        let min_q = min_of(rep.quotients.iter().map(|(_, q)| *q));
        checks.push(
            Check::new(format!("rayleigh-quotients-n{n}"), "saddle:stability-quotients")
                .count("probes", rep.quotients.len())
                .value("min_quotient", min_q)
                .tol("lower", -tol.rayleigh)
                .holds(!rep.quotients.is_empty() && min_q >= -tol.rayleigh),
        );
    }
    Ok((checks, artifacts))
}
