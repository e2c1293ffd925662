use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub json: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "iv-a",
        description: "Distributed ITLinQ vs time-sharing on the disk model, beta in {0.5, 1, 2}",
        json: include_str!("../../presets/iv-a.json"),
    },
    Preset {
        name: "iv-b",
        description: "Sum-rate sweep on the 1 km square with the ITU-1411 channel",
        json: include_str!("../../presets/iv-b.json"),
    },
    Preset {
        name: "iv-b-cdf",
        description: "Link-rate and sum-rate CDFs at n = 1024 on the 1 km square",
        json: include_str!("../../presets/iv-b-cdf.json"),
    },
    Preset {
        name: "iii-fraction",
        description: "Greedy ITIS cover fraction with and without Rayleigh fading (P/N = 160 dB)",
        json: include_str!("../../presets/iii-fraction.json"),
    },
    Preset {
        name: "iii-gap",
        description: "Average gap log2(3n)/kappa for beta in {0.5, 1} (P/N = 160 dB)",
        json: include_str!("../../presets/iii-gap.json"),
    },
    Preset {
        name: "theory",
        description: "Guaranteed fraction curves with the normalized constant",
        json: include_str!("../../presets/theory.json"),
    },
];

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let p = PRESETS.iter().find(|p| p.name == name).ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))?;
    ExperimentConfig::from_json(p.json)
}
