//! Deterministic-behavior processes: trend and seasonality evaluated in
//! closed form at t = 1..length, plus noise.

use std::f64::consts::PI;

use super::{gaussian_noise, series_from, DgpKind, DgpSpec, SeriesReplicate};
use crate::error::{Error, Result};

/// Noise-free value of a deterministic process at time step `t` (1-based).
pub fn closed_form_value(kind: DgpKind, t: f64) -> f64 {
    match kind {
        DgpKind::T => 10.0 + 0.02 * t,
        DgpKind::SS => 2.0 * (2.0 * PI * t / 5.0).sin(),
        DgpKind::CS => (2.0 * PI * t / 100.0).sin() + 0.5 * (2.0 * PI * t / 5.0).sin(),
        DgpKind::TSS => 10.0 + 0.02 * t + 5.0 * (2.0 * PI * t / 5.0).sin(),
        DgpKind::TCS => {
            10.0 + 0.02 * t + (2.0 * PI * t / 100.0).sin() + 0.5 * (2.0 * PI * t / 5.0).sin()
        }
        other => panic!("{} is not a closed-form process", other.name()),
    }
}

pub fn generate_closed_form(spec: &DgpSpec) -> Result<SeriesReplicate> {
    if !matches!(
        spec.kind,
        DgpKind::T | DgpKind::SS | DgpKind::CS | DgpKind::TSS | DgpKind::TCS
    ) {
        return Err(Error::InvalidKind {
            kind: spec.kind.name().to_string(),
            family: "closed-form",
        });
    }
    spec.validate()?;
    let eps = gaussian_noise(spec.length, &spec.noise);
    let values = (0..spec.length)
        .map(|i| closed_form_value(spec.kind, (i + 1) as f64) + eps[i])
        .collect();
    series_from(spec, values)
}
