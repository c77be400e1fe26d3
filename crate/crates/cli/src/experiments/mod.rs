mod cone;
mod foliation;
mod gelfand;
mod hardy;
mod isoperimetric;
mod phase_field;

use crate::config::{ExperimentConfig, ExperimentName};
use crate::report::Check;
use crate::{Artifact, RunError};

pub(crate) type Produced = (Vec<Check>, Vec<Artifact>);

pub(crate) fn dispatch(cfg: &ExperimentConfig) -> Result<Produced, RunError> {
    let t = &cfg.tolerances;
    match cfg.experiment {
        ExperimentName::SimonsCalibration => cone::simons_calibration(&cfg.simons_calibration, t, cfg.seed),
        ExperimentName::ConeStability => cone::cone_stability(&cfg.cone_stability, t),
        ExperimentName::Foliation => foliation::run(&cfg.foliation),
        ExperimentName::Hardy => hardy::run(&cfg.hardy, t),
        ExperimentName::AllenCahnLayer => phase_field::layer(&cfg.allen_cahn_layer, t),
        ExperimentName::AllenCahnSaddle => phase_field::saddle(&cfg.allen_cahn_saddle, t),
        ExperimentName::GelfandBranch => gelfand::run(&cfg.gelfand_branch, t),
        ExperimentName::Isoperimetric => isoperimetric::run(&cfg.isoperimetric, t, cfg.seed),
    }
}

/// Largest element, `-inf` for an empty slice.
pub(crate) fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn min_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::INFINITY, f64::min)
}
