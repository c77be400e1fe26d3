//! Experiment configuration. Every table rejects unknown keys and every key
//! has a default, so an empty file is a valid configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    #[default]
    SimonsCalibration,
    ConeStability,
    Foliation,
    Hardy,
    AllenCahnLayer,
    AllenCahnSaddle,
    GelfandBranch,
    Isoperimetric,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 8] = [
        Self::SimonsCalibration,
        Self::ConeStability,
        Self::Foliation,
        Self::Hardy,
        Self::AllenCahnLayer,
        Self::AllenCahnSaddle,
        Self::GelfandBranch,
        Self::Isoperimetric,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::SimonsCalibration => "simons-calibration",
            Self::ConeStability => "cone-stability",
            Self::Foliation => "foliation",
            Self::Hardy => "hardy",
            Self::AllenCahnLayer => "allen-cahn-layer",
            Self::AllenCahnSaddle => "allen-cahn-saddle",
            Self::GelfandBranch => "gelfand-branch",
            Self::Isoperimetric => "isoperimetric",
        }
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(|e| e.as_str()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        Self::ALL
            .iter()
            .copied()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| RunError::Config(format!("unknown experiment `{s}`; valid names: {}", Self::valid_names())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: ExperimentName,
    /// Output directory; never echoed so that reports do not depend on it.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    /// Seed for every stochastic sampler.
    pub seed: u64,
    pub tolerances: Tolerances,
    pub simons_calibration: SimonsCalibration,
    pub cone_stability: ConeStability,
    pub foliation: Foliation,
    pub hardy: Hardy,
    pub allen_cahn_layer: AllenCahnLayer,
    pub allen_cahn_saddle: AllenCahnSaddle,
    pub gelfand_branch: GelfandBranch,
    pub isoperimetric: Isoperimetric,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    /// Range checks that serde cannot express.
    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |msg: &str| Err(RunError::Config(msg.to_string()));
        let t = &self.tolerances;
        let tols = [
            t.curvature,
            t.simons_gap,
            t.gap_cross_check,
            t.cone_quotient,
            t.hardy_sharpness,
            t.hardy_spread,
            t.hardy_divergence,
            t.layer_residual,
            t.layer_energy,
            t.saddle_residual,
            t.energy_exponent,
            t.operator_defect,
            t.rayleigh,
            t.gelfand_mu1,
            t.extremal_lambda,
            t.singular_distance,
            t.singular_residual,
            t.stability_slack,
            t.neumann_profile,
            t.isoperimetric_ratio,
        ];
        if tols.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return bad("tolerances must be finite and nonnegative");
        }
        let s = &self.simons_calibration;
        if s.curvature_m.iter().chain(&s.calibration_m).any(|&m| m < 2) {
            return bad("simons_calibration: m values must be at least 2");
        }
        if !(s.radius_range[0] > 0.0 && s.radius_range[1] >= s.radius_range[0]) {
            return bad("simons_calibration.radius_range must be positive and ordered");
        }
        if s.grid == 0 || !(s.side > 0.0) {
            return bad("simons_calibration: grid and side must be positive");
        }
        let c = &self.cone_stability;
        if c.gap_m.iter().chain(c.windows.iter().map(|w| &w.m)).any(|&m| m < 2) {
            return bad("cone_stability: m values must be at least 2");
        }
        if c.windows.iter().any(|w| w.alphas.is_empty() || w.betas.is_empty()) {
            return bad("cone_stability.windows: alphas and betas must be nonempty");
        }
        let f = &self.foliation;
        if f.m_values.iter().any(|&m| m < 2) || f.s0.is_empty() || !(f.tau_max > 0.0 && f.tol > 0.0) {
            return bad("foliation: need m >= 2, nonempty s0 and positive tau_max, tol");
        }
        let h = &self.hardy;
        if h.dims.iter().any(|&n| n < 3) || h.r_mins.len() < 2 {
            return bad("hardy: dims must be >= 3 and at least two r_mins are needed");
        }
        let a = &self.allen_cahn_saddle;
        if a.fit_radii.len() < 2 || a.stability.bs.is_empty() {
            return bad("allen_cahn_saddle: need at least two fit radii and one exponent b");
        }
        let g = &self.gelfand_branch;
        if g.branches.iter().any(|b| b.n < 1 || !(b.m_step > 0.0 && b.m_max > 0.0)) {
            return bad("gelfand_branch.branches: need n >= 1 and positive m_step, m_max");
        }
        if g.singular_dims.iter().any(|&n| n < 3) {
            return bad("gelfand_branch.singular_dims must be >= 3");
        }
        let i = &self.isoperimetric;
        if i.domains.is_empty() || !(i.h > 0.0) {
            return bad("isoperimetric: need at least one domain and positive h");
        }
        Ok(())
    }
}

/// Tolerances of every asserted inequality; the defaults are the acceptance
/// thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Mean curvature on the cone and `r²c²` variation along rays.
    pub curvature: f64,
    /// `|gap| r⁴` for the Simons identity on the cone.
    pub simons_gap: f64,
    /// Relative mismatch between the closed-form and differenced gap.
    pub gap_cross_check: f64,
    /// Lower bound `-tol` on the second variation in stable dimensions.
    pub cone_quotient: f64,
    /// Relative distance of the Hardy witness to `(n-2)²/4`.
    pub hardy_sharpness: f64,
    /// Relative spread of subcritical ground states across `r_min`.
    pub hardy_spread: f64,
    /// Supercritical ground states must fall below `-hardy_divergence`.
    pub hardy_divergence: f64,
    pub layer_residual: f64,
    pub layer_energy: f64,
    pub saddle_residual: f64,
    /// Allowed distance of the fitted energy exponent from `2m - 1`.
    pub energy_exponent: f64,
    /// Largest `(Δ + f'(u))φ` accepted for a supersolution witness.
    pub operator_defect: f64,
    /// Lower bound `-tol` on sampled Rayleigh quotients.
    pub rayleigh: f64,
    /// Lower bound `-tol` on the linearized eigenvalue of minimal solutions.
    pub gelfand_mu1: f64,
    /// Distance of `λ(M_max)` from `2(n-2)` in high dimensions.
    pub extremal_lambda: f64,
    /// Sup distance to `-2 log r` of the largest-`M` profile.
    pub singular_distance: f64,
    /// Difference residual of the singular solution.
    pub singular_residual: f64,
    /// Lower bound `-tol` on the stability-inequality slack.
    pub stability_slack: f64,
    /// Disk Neumann solution against `r²/(2R)`.
    pub neumann_profile: f64,
    /// Disk isoperimetric ratio against `2√π`.
    pub isoperimetric_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            curvature: 1e-6,
            simons_gap: 1e-6,
            gap_cross_check: 1e-4,
            cone_quotient: 1e-8,
            hardy_sharpness: 0.05,
            hardy_spread: 0.1,
            hardy_divergence: 1e3,
            layer_residual: 1e-10,
            layer_energy: 1e-6,
            saddle_residual: 1e-8,
            energy_exponent: 0.2,
            operator_defect: 1e-6,
            rayleigh: 1e-6,
            gelfand_mu1: 1e-6,
            extremal_lambda: 0.5,
            singular_distance: 0.1,
            singular_residual: 1e-9,
            stability_slack: 1e-8,
            neumann_profile: 1e-6,
            isoperimetric_ratio: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimonsCalibration {
    /// Half-dimensions `m` of the cones sampled for curvature checks.
    pub curvature_m: Vec<usize>,
    /// Random cone points per `m`.
    pub points: usize,
    /// Radii are drawn log-uniformly from this range.
    pub radius_range: [f64; 2],
    /// Dilation factors used for the ray-homogeneity check.
    pub ray_scales: Vec<f64>,
    /// Half-dimensions for the calibration sign scan.
    pub calibration_m: Vec<usize>,
    /// Grid nodes per side of `(0, side]²`.
    pub grid: usize,
    pub side: f64,
}

impl Default for SimonsCalibration {
    fn default() -> Self {
        Self {
            curvature_m: vec![2, 3, 4],
            points: 100,
            radius_range: [0.1, 10.0],
            ray_scales: vec![0.5, 2.0, 10.0],
            calibration_m: vec![2, 3, 4, 5, 6],
            grid: 200,
            side: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeWindow {
    /// Cone in `R^{2m}`.
    pub m: usize,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConeStability {
    pub gap_m: Vec<usize>,
    pub gap_radii: Vec<f64>,
    pub windows: Vec<ProbeWindow>,
    pub rho_in: f64,
    pub rho_outs: Vec<f64>,
    /// Mesh cells per unit of `log r`.
    pub per_efold: usize,
}

impl Default for ConeStability {
    fn default() -> Self {
        Self {
            gap_m: vec![2, 3, 4],
            gap_radii: vec![0.5, 1.0, 3.0],
            windows: vec![
                ProbeWindow { m: 2, alphas: vec![-2.0, -1.0, -0.6], betas: vec![0.0, 0.5, 1.0, 2.0] },
                ProbeWindow { m: 3, alphas: vec![-1.0, 0.0, 0.4], betas: vec![0.6, 1.0, 1.6, 2.5] },
                ProbeWindow { m: 4, alphas: vec![-1.0, 0.0, 0.5, 1.0, 1.4], betas: vec![1.6, 2.0, 2.5, 3.0, 4.0] },
            ],
            rho_in: 1e-3,
            rho_outs: vec![10.0, 100.0],
            per_efold: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Foliation {
    pub m_values: Vec<usize>,
    /// Starting points `(s0, 0)` of the leaves.
    pub s0: Vec<f64>,
    pub tau_max: f64,
    pub tol: f64,
    /// Annulus `r ∈ [inner, outer]` for leaf separation.
    pub annulus: [f64; 2],
    /// Crossings each leaf must show in dimensions below 8.
    pub min_crossings: usize,
}

impl Default for Foliation {
    fn default() -> Self {
        Self {
            m_values: vec![2, 3, 4],
            s0: vec![0.5, 1.0, 2.0],
            tau_max: 200.0,
            tol: 1e-10,
            annulus: [0.1, 10.0],
            min_crossings: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hardy {
    pub dims: Vec<usize>,
    /// Ratio evaluations allowed to the sharpness search.
    pub budget: usize,
    /// Truncation radii, decreasing.
    pub r_mins: Vec<f64>,
    pub per_efold: usize,
    /// Potential strengths `(n-2)²/4 ∓ offset`.
    pub offset: f64,
}

impl Default for Hardy {
    fn default() -> Self {
        Self { dims: vec![3, 10], budget: 200, r_mins: vec![1e-2, 1e-3, 1e-4], per_efold: 60, offset: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AllenCahnLayer {
    /// Dimension of the layer-versus-cutoff energy comparison.
    pub comparison_dim: usize,
    pub comparison_radii: Vec<f64>,
}

impl Default for AllenCahnLayer {
    fn default() -> Self {
        Self { comparison_dim: 3, comparison_radii: vec![2.0, 5.0, 10.0, 20.0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    F64,
    /// Double-double arithmetic; resolves `u < 1` where f64 rounds to 1.
    DoubleDouble,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SaddleStability {
    pub enabled: bool,
    pub m: usize,
    pub length: f64,
    pub h: f64,
    /// Exponents `b` scanned for a supersolution witness.
    pub bs: Vec<f64>,
    pub probe_centers: Vec<f64>,
    pub probe_half_width: f64,
    pub t_min: f64,
    pub r_max: f64,
}

impl Default for SaddleStability {
    fn default() -> Self {
        Self {
            enabled: true,
            m: 7,
            length: 30.0,
            h: 0.1,
            bs: (1..=12).map(|k| 0.5 * k as f64).collect(),
            probe_centers: vec![2.0, 5.0, 9.0],
            probe_half_width: 2.0,
            t_min: 0.1,
            r_max: 15.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AllenCahnSaddle {
    pub m: usize,
    pub length: f64,
    pub h: f64,
    /// Multigrid stopping residual.
    pub tol: f64,
    pub max_cycles: usize,
    pub precision: Precision,
    pub fit_radii: Vec<f64>,
    pub export_checkpoint: bool,
    pub stability: SaddleStability,
}

impl Default for AllenCahnSaddle {
    fn default() -> Self {
        Self {
            m: 2,
            length: 40.0,
            h: 0.05,
            tol: 1e-9,
            max_cycles: 60,
            precision: Precision::DoubleDouble,
            fit_radii: vec![5.0, 10.0, 15.0, 20.0],
            export_checkpoint: true,
            stability: SaddleStability::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchRun {
    pub n: usize,
    /// Spacing of the centre-value grid `0, m_step, ..., m_max`.
    pub m_step: f64,
    pub m_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GelfandBranch {
    pub branches: Vec<BranchRun>,
    pub root_tol: f64,
    pub lambda_cap: f64,
    pub singular_dims: Vec<usize>,
    /// Window `[a, b]` for the distance to `-2 log r`.
    pub singular_window: [f64; 2],
    pub singular_samples: usize,
    /// Dimension and centre values of the profiles given to the test functions.
    pub test_dim: usize,
    pub test_centres: Vec<f64>,
    pub alpha_exp: f64,
    pub alpha_radial: f64,
    pub radial_eps: f64,
}

impl Default for GelfandBranch {
    fn default() -> Self {
        Self {
            branches: vec![BranchRun { n: 3, m_step: 0.25, m_max: 6.0 }, BranchRun { n: 10, m_step: 1.0, m_max: 22.0 }],
            root_tol: 1e-12,
            lambda_cap: 1e6,
            singular_dims: (3..=14).collect(),
            singular_window: [0.1, 0.9],
            singular_samples: 200,
            test_dim: 3,
            test_centres: vec![0.5, 1.0, 1.5],
            alpha_exp: 1.9,
            alpha_radial: 1.0,
            radial_eps: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainSpec {
    Disk { radius: f64 },
    Rectangle { width: f64, height: f64 },
    Ellipse { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Isoperimetric {
    pub domains: Vec<DomainSpec>,
    /// Grid spacing of the Neumann solve.
    pub h: f64,
    /// Slopes sampled for the contact-set coverage.
    pub samples: usize,
    pub export_checkpoints: bool,
}

impl Default for Isoperimetric {
    fn default() -> Self {
        Self {
            domains: vec![
                DomainSpec::Disk { radius: 1.0 },
                DomainSpec::Ellipse { a: 1.0, b: 0.5 },
                DomainSpec::Rectangle { width: 1.0, height: 1.0 },
            ],
            h: 1.0 / 40.0,
            samples: 500,
            export_checkpoints: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        assert_eq!(ExperimentConfig::from_toml("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn unknown_nested_key_named() {
        let e = ExperimentConfig::from_toml("[hardy]\nbogus = 1\n").unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let e = ExperimentConfig::from_toml("[[isoperimetric.domains]]\nkind = \"disk\"\nradius = 1.0\nfoo = 2\n")
            .unwrap_err();
        assert!(e.to_string().contains("foo"), "{e}");
    }

    #[test]
    fn unknown_experiment_lists_names() {
        let e = ExperimentConfig::from_toml("experiment = \"nope\"").unwrap_err();
        assert!(e.to_string().contains("gelfand-branch"), "{e}");
        let e = "nope".parse::<ExperimentName>().unwrap_err();
        assert!(e.to_string().contains("isoperimetric"), "{e}");
    }
}
