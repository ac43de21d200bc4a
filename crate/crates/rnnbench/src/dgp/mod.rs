//! Seeded generators for the 21 synthetic data-generation processes (DGPs),
//! grouped into five behaviors. Every generator is a pure function of its
//! spec, so replicates are reproducible bit for bit.

mod arfima;
mod chaotic;
mod closed_form;
mod io;
mod noise;
mod recursive;

pub use arfima::{arfima_core, generate_arfima, psi_coefficients};
pub use chaotic::{
    chaotic_signal, generate_chaotic, henon_map, lorenz_deriv, rossler_deriv, standardize,
};
pub use closed_form::{closed_form_value, generate_closed_form};
pub use io::{read_series_csv, write_replicates};
pub use noise::gaussian_noise;
pub use recursive::{generate_recursive, recursive_core, PreSamples};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the five series regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Behavior {
    Deterministic,
    RandomWalk,
    Nonlinear,
    LongMemory,
    Chaotic,
}

impl Behavior {
    pub const ALL: [Behavior; 5] = [
        Behavior::Deterministic,
        Behavior::RandomWalk,
        Behavior::Nonlinear,
        Behavior::LongMemory,
        Behavior::Chaotic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Behavior::Deterministic => "Deterministic",
            Behavior::RandomWalk => "Random-walk",
            Behavior::Nonlinear => "Nonlinear",
            Behavior::LongMemory => "Long-memory",
            Behavior::Chaotic => "Chaotic",
        }
    }

    pub fn dgps(self) -> &'static [DgpKind] {
        use DgpKind::*;
        match self {
            Behavior::Deterministic => &[T, SS, CS, TSS, TCS],
            Behavior::RandomWalk => &[TRW, SRW, TSRW],
            Behavior::Nonlinear => &[SAR2, NMA2, NAR2, BL2, STAR2, TAR2],
            Behavior::LongMemory => &[ARFIMA_D0, ARFIMA_D02, ARFIMA_D04],
            Behavior::Chaotic => &[MACKEY, HENON, ROSSLER, LORENZ],
        }
    }
}

/// Identity of one generation process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms, non_camel_case_types)]
pub enum DgpKind {
    T,
    SS,
    CS,
    TSS,
    TCS,
    TRW,
    SRW,
    TSRW,
    SAR2,
    NMA2,
    NAR2,
    BL2,
    STAR2,
    TAR2,
    #[serde(rename = "ARFIMA_d0")]
    ARFIMA_D0,
    #[serde(rename = "ARFIMA_d02")]
    ARFIMA_D02,
    #[serde(rename = "ARFIMA_d04")]
    ARFIMA_D04,
    MACKEY,
    HENON,
    ROSSLER,
    LORENZ,
}

impl DgpKind {
    pub const ALL: [DgpKind; 21] = [
        DgpKind::T,
        DgpKind::SS,
        DgpKind::CS,
        DgpKind::TSS,
        DgpKind::TCS,
        DgpKind::TRW,
        DgpKind::SRW,
        DgpKind::TSRW,
        DgpKind::SAR2,
        DgpKind::NMA2,
        DgpKind::NAR2,
        DgpKind::BL2,
        DgpKind::STAR2,
        DgpKind::TAR2,
        DgpKind::ARFIMA_D0,
        DgpKind::ARFIMA_D02,
        DgpKind::ARFIMA_D04,
        DgpKind::MACKEY,
        DgpKind::HENON,
        DgpKind::ROSSLER,
        DgpKind::LORENZ,
    ];

    /// Canonical name used in files, configs and the CLI.
    pub fn name(self) -> &'static str {
        match self {
            DgpKind::T => "T",
            DgpKind::SS => "SS",
            DgpKind::CS => "CS",
            DgpKind::TSS => "TSS",
            DgpKind::TCS => "TCS",
            DgpKind::TRW => "TRW",
            DgpKind::SRW => "SRW",
            DgpKind::TSRW => "TSRW",
            DgpKind::SAR2 => "SAR2",
            DgpKind::NMA2 => "NMA2",
            DgpKind::NAR2 => "NAR2",
            DgpKind::BL2 => "BL2",
            DgpKind::STAR2 => "STAR2",
            DgpKind::TAR2 => "TAR2",
            DgpKind::ARFIMA_D0 => "ARFIMA_d0",
            DgpKind::ARFIMA_D02 => "ARFIMA_d02",
            DgpKind::ARFIMA_D04 => "ARFIMA_d04",
            DgpKind::MACKEY => "MACKEY",
            DgpKind::HENON => "HENON",
            DgpKind::ROSSLER => "ROSSLER",
            DgpKind::LORENZ => "LORENZ",
        }
    }

    /// Human-facing label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            DgpKind::SAR2 => "SAR(2)",
            DgpKind::NMA2 => "NMA(2)",
            DgpKind::NAR2 => "NAR(2)",
            DgpKind::BL2 => "BL(2)",
            DgpKind::STAR2 => "STAR(2)",
            DgpKind::TAR2 => "TAR(2)",
            DgpKind::ARFIMA_D0 => "ARFIMA(2,0,2)",
            DgpKind::ARFIMA_D02 => "ARFIMA(2,0.2,2)",
            DgpKind::ARFIMA_D04 => "ARFIMA(2,0.4,2)",
            DgpKind::MACKEY => "Mackey-Glass",
            DgpKind::HENON => "Henon",
            DgpKind::ROSSLER => "Rossler",
            DgpKind::LORENZ => "Lorenz",
            other => other.name(),
        }
    }

    pub fn behavior(self) -> Behavior {
        use DgpKind::*;
        match self {
            T | SS | CS | TSS | TCS => Behavior::Deterministic,
            TRW | SRW | TSRW => Behavior::RandomWalk,
            SAR2 | NMA2 | NAR2 | BL2 | STAR2 | TAR2 => Behavior::Nonlinear,
            ARFIMA_D0 | ARFIMA_D02 | ARFIMA_D04 => Behavior::LongMemory,
            MACKEY | HENON | ROSSLER | LORENZ => Behavior::Chaotic,
        }
    }

    pub fn parse(s: &str) -> Option<DgpKind> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        DgpKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().to_ascii_uppercase() == norm)
    }

    fn fractional_order(self) -> Option<f64> {
        match self {
            DgpKind::ARFIMA_D0 => Some(0.0),
            DgpKind::ARFIMA_D02 => Some(0.2),
            DgpKind::ARFIMA_D04 => Some(0.4),
            _ => None,
        }
    }
}

/// White Gaussian noise parameters plus the stream seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub mean: f64,
    pub std: f64,
    pub seed: u64,
}

impl NoiseSpec {
    /// The paper-wide default: N(0, 0.2^2).
    pub fn paper(seed: u64) -> Self {
        NoiseSpec {
            mean: 0.0,
            std: 0.2,
            seed,
        }
    }

    pub fn silent(seed: u64) -> Self {
        NoiseSpec {
            mean: 0.0,
            std: 0.0,
            seed,
        }
    }
}

/// Numerical integration settings for the chaotic kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Integration step.
    pub dt: f64,
    /// Integration steps per emitted sample.
    pub stride: usize,
    /// Emitted samples discarded before the series starts.
    pub burn_in: usize,
    /// Start state; for Mackey-Glass a single value used as constant history.
    pub initial_state: Vec<f64>,
}

/// Fractional-integration settings for the ARFIMA kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalConfig {
    pub d: f64,
    /// MA(infinity) truncation order.
    pub truncation: usize,
    pub burn_in: usize,
}

/// Full description of one generation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub kind: DgpKind,
    pub length: usize,
    pub noise: NoiseSpec,
    /// Transient samples discarded by the recursive kinds.
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fractional: Option<FractionalConfig>,
}

impl DgpSpec {
    /// Spec with per-kind defaults: burn-in 200 for recursive/ARFIMA kinds,
    /// 1000 emitted points for chaotic kinds, integrator settings sized so
    /// halving `dt` moves early samples by well under 1e-3.
    pub fn new(kind: DgpKind, length: usize, noise: NoiseSpec) -> Self {
        let integrator = match kind {
            DgpKind::MACKEY => Some(IntegratorConfig {
                dt: 0.1,
                stride: 10,
                burn_in: 1000,
                initial_state: vec![1.2],
            }),
            DgpKind::HENON => Some(IntegratorConfig {
                dt: 1.0,
                stride: 1,
                burn_in: 1000,
                initial_state: vec![0.0, 0.0],
            }),
            DgpKind::ROSSLER => Some(IntegratorConfig {
                dt: 0.01,
                stride: 25,
                burn_in: 1000,
                initial_state: vec![10.0, 0.0, 0.0],
            }),
            DgpKind::LORENZ => Some(IntegratorConfig {
                dt: 0.0005,
                stride: 100,
                burn_in: 1000,
                initial_state: vec![1.0, 1.0, 1.0],
            }),
            _ => None,
        };
        let fractional = kind.fractional_order().map(|d| FractionalConfig {
            d,
            truncation: 1000,
            burn_in: 200,
        });
        let burn_in = match kind.behavior() {
            Behavior::RandomWalk | Behavior::Nonlinear => 200,
            _ => 0,
        };
        DgpSpec {
            kind,
            length,
            noise,
            burn_in,
            integrator,
            fractional,
        }
    }

    /// Paper-scale spec: length 3000, noise N(0, 0.2^2).
    pub fn paper(kind: DgpKind, seed: u64) -> Self {
        DgpSpec::new(kind, 3000, NoiseSpec::paper(seed))
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 10 {
            return Err(Error::Config(format!(
                "series length must be at least 10, got {}",
                self.length
            )));
        }
        if !(self.noise.std >= 0.0) {
            return Err(Error::Config(format!(
                "noise std must be non-negative, got {}",
                self.noise.std
            )));
        }
        if let Some(f) = &self.fractional {
            if !(0.0..0.5).contains(&f.d) {
                return Err(Error::NonstationaryOrder { d: f.d });
            }
            if f.truncation < 100 {
                return Err(Error::Config(format!(
                    "ARFIMA truncation must be at least 100, got {}",
                    f.truncation
                )));
            }
        }
        if let Some(i) = &self.integrator {
            if !(i.dt > 0.0) {
                return Err(Error::Config(format!("dt must be positive, got {}", i.dt)));
            }
            if i.stride == 0 {
                return Err(Error::Config("stride must be at least 1".into()));
            }
            if self.kind == DgpKind::MACKEY {
                let ratio = chaotic::MACKEY_TAU / i.dt;
                if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 {
                    return Err(Error::Config(format!(
                        "Mackey-Glass delay tau/dt must be a positive integer, got {ratio}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One generated series and the spec that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReplicate {
    pub dgp: DgpSpec,
    pub replicate_index: usize,
    pub seed: u64,
    pub values: Vec<f64>,
}

/// Generate one series for any of the 21 kinds.
pub fn generate(spec: &DgpSpec) -> Result<SeriesReplicate> {
    match spec.kind.behavior() {
        Behavior::Deterministic => generate_closed_form(spec),
        Behavior::RandomWalk | Behavior::Nonlinear => generate_recursive(spec),
        Behavior::LongMemory => generate_arfima(spec),
        Behavior::Chaotic => generate_chaotic(spec),
    }
}

/// Monte Carlo replication: replicate `i` re-seeds the noise stream with
/// `base_seed + i`; everything else in the spec stays fixed.
pub fn replicate(spec: &DgpSpec, reps: usize, base_seed: u64) -> Result<Vec<SeriesReplicate>> {
    assert!(reps >= 1, "reps must be at least 1");
    let mut out = Vec::with_capacity(reps);
    for i in 0..reps {
        let mut s = spec.clone();
        s.noise.seed = base_seed + i as u64;
        let mut rep = generate(&s)?;
        rep.replicate_index = i;
        out.push(rep);
    }
    Ok(out)
}

pub(crate) fn series_from(spec: &DgpSpec, values: Vec<f64>) -> Result<SeriesReplicate> {
    debug_assert_eq!(values.len(), spec.length);
    if let Some(step) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::GenerationDiverged {
            kind: spec.kind.name().to_string(),
            step,
        });
    }
    Ok(SeriesReplicate {
        dgp: spec.clone(),
        replicate_index: 0,
        seed: spec.noise.seed,
        values,
    })
}
