//! Scale presets: the full published protocol and a desk-size variant for
//! minutes-scale verification runs.

use serde::{Deserialize, Serialize};

use crate::dgp::DgpKind;
use crate::train::{GridSpec, SplitSpec, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Paper,
    Desk,
}

impl Scale {
    pub fn name(self) -> &'static str {
        match self {
            Scale::Paper => "paper",
            Scale::Desk => "desk",
        }
    }

    pub fn parse(s: &str) -> Option<Scale> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper" => Some(Scale::Paper),
            "desk" => Some(Scale::Desk),
            _ => None,
        }
    }

    pub fn series_length(self) -> usize {
        match self {
            Scale::Paper => 3000,
            Scale::Desk => 600,
        }
    }

    pub fn split_spec(self) -> SplitSpec {
        match self {
            Scale::Paper => SplitSpec::paper(),
            Scale::Desk => SplitSpec {
                train: 400,
                validation: 100,
                test: 100,
            },
        }
    }

    pub fn replicates(self) -> usize {
        match self {
            Scale::Paper => 30,
            Scale::Desk => 3,
        }
    }

    pub fn max_epochs(self) -> usize {
        match self {
            Scale::Paper => 500,
            Scale::Desk => 100,
        }
    }

    pub fn runs_per_config(self) -> usize {
        match self {
            Scale::Paper => 10,
            Scale::Desk => 3,
        }
    }

    pub fn hidden_range(self) -> Vec<usize> {
        match self {
            Scale::Paper => (1..=10).collect(),
            Scale::Desk => (1..=4).collect(),
        }
    }

    pub fn train_config(self) -> TrainConfig {
        TrainConfig {
            max_epochs: self.max_epochs(),
            ..TrainConfig::default()
        }
    }
}

/// Largest estimation window searched per process (the published per-DGP
/// input ranges; all ranges start at 1 with step 1).
pub fn window_max(kind: DgpKind) -> usize {
    use DgpKind::*;
    match kind {
        T => 10,
        SS | CS | TSS | TCS => 5,
        TRW => 10,
        SRW => 4,
        TSRW => 5,
        SAR2 | NMA2 | NAR2 | BL2 | STAR2 | TAR2 => 5,
        ARFIMA_D0 => 5,
        ARFIMA_D02 => 20,
        ARFIMA_D04 => 40,
        MACKEY => 7,
        HENON => 3,
        ROSSLER => 14,
        LORENZ => 25,
    }
}

/// Grid for one process at one scale; desk truncates windows at 5.
pub fn grid_spec(kind: DgpKind, scale: Scale) -> GridSpec {
    let w_max = match scale {
        Scale::Paper => window_max(kind),
        Scale::Desk => window_max(kind).min(5),
    };
    GridSpec::new(scale.hidden_range(), 1..=w_max, scale.runs_per_config())
}
