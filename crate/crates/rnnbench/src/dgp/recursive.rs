//! Random-walk and nonlinear processes driven by a shared noise stream.
//!
//! The recursion core is separated from noise drawing so tests can inject an
//! explicit epsilon stream and so burn-in trimming stays in one place.

use super::{gaussian_noise, series_from, DgpKind, DgpSpec, SeriesReplicate};
use crate::error::{Error, Result};

/// Pre-sample lag values; `z[k]` holds `z_{-k}`, so `z[0]` is `z_0`.
/// Pre-sample noise terms are always zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct PreSamples {
    pub z: [f64; 5],
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Run one of the nine recursive processes over an explicit noise stream,
/// emitting one value per stream entry (no burn-in handling here).
pub fn recursive_core(kind: DgpKind, eps: &[f64], pre: &PreSamples) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = Vec::with_capacity(eps.len());
    // z_{t-k} while filling index i (t = i+1)
    let z = |out: &Vec<f64>, i: usize, k: usize| -> f64 {
        debug_assert!((1..=5).contains(&k));
        if i >= k {
            out[i - k]
        } else {
            pre.z[k - i - 1]
        }
    };
    // eps_{t-k}; pre-sample noise is zero
    let e = |i: usize, k: usize| -> f64 {
        if i >= k {
            eps[i - k]
        } else {
            0.0
        }
    };

    for i in 0..eps.len() {
        let et = eps[i];
        let value = match kind {
            DgpKind::TRW => z(&out, i, 1) + et,
            DgpKind::SRW => z(&out, i, 4) + et,
            DgpKind::TSRW => z(&out, i, 1) + z(&out, i, 4) - z(&out, i, 5) + et,
            DgpKind::SAR2 => sign(z(&out, i, 1) + z(&out, i, 2)) + et,
            DgpKind::NMA2 => {
                let e1 = e(i, 1);
                let e2 = e(i, 2);
                et - 0.3 * e1 + 0.2 * e2 + 0.4 * e1 * e2 - 0.25 * e2 * e2
            }
            DgpKind::NAR2 => {
                let z1 = z(&out, i, 1).abs();
                let z2 = z(&out, i, 2).abs();
                0.7 * z1 / (z1 + 2.0) + 0.35 * z2 / (z2 + 2.0) + et
            }
            DgpKind::BL2 => {
                let z1 = z(&out, i, 1);
                0.4 * z1 - 0.3 * z(&out, i, 2) + 0.5 * z1 * e(i, 1) + et
            }
            DgpKind::STAR2 => {
                let z1 = z(&out, i, 1);
                let z2 = z(&out, i, 2);
                0.3 * z1 + 0.6 * z2 + (0.1 - 0.9 * z1 + 0.8 * z2) / (1.0 + (-10.0 * z1).exp()) + et
            }
            DgpKind::TAR2 => {
                let z1 = z(&out, i, 1);
                let z2 = z(&out, i, 2);
                if z1.abs() <= 1.0 {
                    0.9 * z1 + 0.05 * z2 + et
                } else {
                    -0.3 * z1 + 0.65 * z2 - et
                }
            }
            other => {
                return Err(Error::InvalidKind {
                    kind: other.name().to_string(),
                    family: "recursive",
                })
            }
        };
        if !value.is_finite() {
            return Err(Error::GenerationDiverged {
                kind: kind.name().to_string(),
                step: i + 1,
            });
        }
        out.push(value);
    }
    Ok(out)
}

pub fn generate_recursive(spec: &DgpSpec) -> Result<SeriesReplicate> {
    spec.validate()?;
    let total = spec.burn_in + spec.length;
    let eps = gaussian_noise(total, &spec.noise);
    let full = recursive_core(spec.kind, &eps, &PreSamples::default())?;
    series_from(spec, full[spec.burn_in..].to_vec())
}
