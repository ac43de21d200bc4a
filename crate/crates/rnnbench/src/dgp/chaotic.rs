//! Chaotic processes: Mackey-Glass, Henon, Rossler, Lorenz.
//!
//! Lorenz and Rossler integrate with classic RK4; Mackey-Glass with RK4 over
//! a circular delay buffer, linearly interpolating the delayed term at half
//! steps; Henon iterates its map directly. The emitted x-coordinate window is
//! standardized to zero mean and unit variance before noise is added, so the
//! N(0, 0.2^2) noise is comparable across attractors of very different
//! amplitude.

use super::{gaussian_noise, series_from, DgpKind, DgpSpec, SeriesReplicate};
use crate::error::{Error, Result};

pub(super) const MACKEY_TAU: f64 = 17.0;
const MACKEY_A: f64 = 0.2;
const MACKEY_B: f64 = 0.1;
const MACKEY_C: f64 = 10.0;

const HENON_A: f64 = 1.4;
const HENON_B: f64 = 0.3;

const ROSSLER_A: f64 = 0.15;
const ROSSLER_B: f64 = 0.2;
const ROSSLER_C: f64 = 10.0;

const LORENZ_SIGMA: f64 = 16.0;
const LORENZ_R: f64 = 45.92;
const LORENZ_B: f64 = 4.0;

/// Lorenz vector field with sigma=16, r=45.92, b=4.
pub fn lorenz_deriv(v: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = v;
    [
        LORENZ_SIGMA * (y - x),
        -x * z + LORENZ_R * x - y,
        x * y - LORENZ_B * z,
    ]
}

/// Rossler vector field with a=0.15, b=0.2, c=10.
pub fn rossler_deriv(v: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = v;
    [-y - z, x + ROSSLER_A * y, ROSSLER_B + z * (x - ROSSLER_C)]
}

/// One Henon map application with a=1.4, b=0.3.
pub fn henon_map(x: f64, y: f64) -> (f64, f64) {
    (1.0 + y - HENON_A * x * x, HENON_B * x)
}

fn rk4_step(f: impl Fn([f64; 3]) -> [f64; 3], v: [f64; 3], dt: f64) -> [f64; 3] {
    let k1 = f(v);
    let k2 = f(advance(v, k1, dt * 0.5));
    let k3 = f(advance(v, k2, dt * 0.5));
    let k4 = f(advance(v, k3, dt));
    let mut out = v;
    for i in 0..3 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn advance(v: [f64; 3], k: [f64; 3], h: f64) -> [f64; 3] {
    [v[0] + h * k[0], v[1] + h * k[1], v[2] + h * k[2]]
}

fn flow_signal(
    kind: DgpKind,
    f: impl Fn([f64; 3]) -> [f64; 3],
    start: [f64; 3],
    dt: f64,
    stride: usize,
    n_out: usize,
) -> Result<Vec<f64>> {
    let mut v = start;
    let mut out = Vec::with_capacity(n_out);
    for i in 0..n_out {
        for _ in 0..stride {
            v = rk4_step(&f, v, dt);
        }
        if !v.iter().all(|c| c.is_finite()) {
            return Err(Error::GenerationDiverged {
                kind: kind.name().to_string(),
                step: i + 1,
            });
        }
        out.push(v[0]);
    }
    Ok(out)
}

fn mackey_rhs(x: f64, x_delayed: f64) -> f64 {
    MACKEY_A * x_delayed / (1.0 + x_delayed.powf(MACKEY_C)) - MACKEY_B * x
}

/// Mackey-Glass with RK4 over a grid-aligned history buffer. The delayed
/// term at the half step is linearly interpolated between grid neighbours;
/// at the full step it is a grid point already computed.
fn mackey_signal(history: f64, dt: f64, stride: usize, n_out: usize) -> Result<Vec<f64>> {
    let delay = (MACKEY_TAU / dt).round() as usize;
    let n_steps = n_out * stride;
    let mut buf = vec![history; delay + n_steps + 1];
    for n in 0..n_steps {
        let i = delay + n;
        let x = buf[i];
        let xd0 = buf[i - delay];
        let xd1 = buf[i - delay + 1];
        let xdh = 0.5 * (xd0 + xd1);
        let k1 = mackey_rhs(x, xd0);
        let k2 = mackey_rhs(x + 0.5 * dt * k1, xdh);
        let k3 = mackey_rhs(x + 0.5 * dt * k2, xdh);
        let k4 = mackey_rhs(x + dt * k3, xd1);
        let next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !next.is_finite() {
            return Err(Error::GenerationDiverged {
                kind: DgpKind::MACKEY.name().to_string(),
                step: n / stride + 1,
            });
        }
        buf[i + 1] = next;
    }
    Ok(buf[delay..]
        .iter()
        .copied()
        .skip(stride)
        .step_by(stride)
        .take(n_out)
        .collect())
}

fn state3(cfg: &[f64], kind: DgpKind) -> Result<[f64; 3]> {
    if cfg.len() != 3 {
        return Err(Error::Config(format!(
            "{} initial state needs 3 components, got {}",
            kind.name(),
            cfg.len()
        )));
    }
    Ok([cfg[0], cfg[1], cfg[2]])
}

/// Deterministic x-coordinate samples after burn-in, before standardization
/// and noise: `spec.length` points sampled every `stride` integration steps.
pub fn chaotic_signal(spec: &DgpSpec) -> Result<Vec<f64>> {
    let cfg = spec.integrator.as_ref().ok_or_else(|| Error::InvalidKind {
        kind: spec.kind.name().to_string(),
        family: "chaotic",
    })?;
    spec.validate()?;
    let n_out = cfg.burn_in + spec.length;
    let signal = match spec.kind {
        DgpKind::LORENZ => flow_signal(
            spec.kind,
            lorenz_deriv,
            state3(&cfg.initial_state, spec.kind)?,
            cfg.dt,
            cfg.stride,
            n_out,
        )?,
        DgpKind::ROSSLER => flow_signal(
            spec.kind,
            rossler_deriv,
            state3(&cfg.initial_state, spec.kind)?,
            cfg.dt,
            cfg.stride,
            n_out,
        )?,
        DgpKind::MACKEY => {
            let history = match cfg.initial_state.as_slice() {
                [h] => *h,
                other => {
                    return Err(Error::Config(format!(
                        "Mackey-Glass takes a single constant-history value, got {} components",
                        other.len()
                    )))
                }
            };
            mackey_signal(history, cfg.dt, cfg.stride, n_out)?
        }
        DgpKind::HENON => {
            let (mut x, mut y) = match cfg.initial_state.as_slice() {
                [x, y] => (*x, *y),
                other => {
                    return Err(Error::Config(format!(
                        "Henon initial state needs 2 components, got {}",
                        other.len()
                    )))
                }
            };
            let mut out = Vec::with_capacity(n_out);
            for i in 0..n_out {
                for _ in 0..cfg.stride {
                    let (nx, ny) = henon_map(x, y);
                    x = nx;
                    y = ny;
                }
                if !x.is_finite() || !y.is_finite() {
                    return Err(Error::GenerationDiverged {
                        kind: spec.kind.name().to_string(),
                        step: i + 1,
                    });
                }
                out.push(x);
            }
            out
        }
        other => {
            return Err(Error::InvalidKind {
                kind: other.name().to_string(),
                family: "chaotic",
            })
        }
    };
    Ok(signal[cfg.burn_in..].to_vec())
}

/// Shift/scale `values` to zero mean and unit variance in place.
pub fn standardize(values: &mut [f64]) -> Result<()> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var <= 0.0 {
        return Err(Error::DegenerateScale);
    }
    let std = var.sqrt();
    for v in values.iter_mut() {
        *v = (*v - mean) / std;
    }
    Ok(())
}

pub fn generate_chaotic(spec: &DgpSpec) -> Result<SeriesReplicate> {
    let mut signal = chaotic_signal(spec)?;
    standardize(&mut signal)?;
    let eps = gaussian_noise(spec.length, &spec.noise);
    for (v, e) in signal.iter_mut().zip(&eps) {
        *v += e;
    }
    series_from(spec, signal)
}
