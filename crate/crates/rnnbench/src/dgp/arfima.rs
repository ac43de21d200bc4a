//! Long-memory processes: ARFIMA(2, d, 2) with fractional integration by a
//! truncated MA(infinity) filter on the noise stream.

use super::{gaussian_noise, series_from, DgpKind, DgpSpec, SeriesReplicate};
use crate::error::{Error, Result};

/// MA(infinity) coefficients of `(1 - B)^{-d}`:
/// `psi_0 = 1`, `psi_k = psi_{k-1} (k - 1 + d) / k`.
pub fn psi_coefficients(d: f64, k_max: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(k_max + 1);
    psi.push(1.0);
    for k in 1..=k_max {
        let prev = psi[k - 1];
        psi.push(prev * (k as f64 - 1.0 + d) / k as f64);
    }
    psi
}

/// ARFIMA(2, d, 2) over an explicit noise stream: the stream is fractionally
/// integrated into `u`, which then drives
/// `z_t = 0.7 z_{t-1} - 0.1 z_{t-2} - 0.5 u_{t-1} + 0.4 u_{t-2} + u_t`
/// from zero initial conditions. At `d = 0` the filter is the identity and
/// the recursion is exactly the plain ARMA(2,2).
pub fn arfima_core(eps: &[f64], d: f64, truncation: usize) -> Vec<f64> {
    let psi = psi_coefficients(d, truncation);
    let n = eps.len();
    let mut u = vec![0.0; n];
    for (i, slot) in u.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, &p) in psi.iter().enumerate().take(i + 1) {
            acc += p * eps[i - k];
        }
        *slot = acc;
    }
    let mut z = vec![0.0; n];
    for i in 0..n {
        let z1 = if i >= 1 { z[i - 1] } else { 0.0 };
        let z2 = if i >= 2 { z[i - 2] } else { 0.0 };
        let u1 = if i >= 1 { u[i - 1] } else { 0.0 };
        let u2 = if i >= 2 { u[i - 2] } else { 0.0 };
        z[i] = 0.7 * z1 - 0.1 * z2 - 0.5 * u1 + 0.4 * u2 + u[i];
    }
    z
}

pub fn generate_arfima(spec: &DgpSpec) -> Result<SeriesReplicate> {
    let frac = spec.fractional.as_ref().ok_or_else(|| Error::InvalidKind {
        kind: spec.kind.name().to_string(),
        family: "ARFIMA",
    })?;
    if !matches!(
        spec.kind,
        DgpKind::ARFIMA_D0 | DgpKind::ARFIMA_D02 | DgpKind::ARFIMA_D04
    ) {
        return Err(Error::InvalidKind {
            kind: spec.kind.name().to_string(),
            family: "ARFIMA",
        });
    }
    spec.validate()?;
    let total = frac.burn_in + spec.length;
    let eps = gaussian_noise(total, &spec.noise);
    let full = arfima_core(&eps, frac.d, frac.truncation);
    series_from(spec, full[frac.burn_in..].to_vec())
}
