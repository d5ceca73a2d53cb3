//! Experiment configuration: a single TOML file describing the grid, the
//! seeded initial data, the flow driver, the monitors, the singular-set
//! detector, and output paths. Parsing is strict (unknown keys rejected) and
//! round-trips bit-exactly.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use spin7_core::flow::{FlowConfig, MonitorConfig};
use spin7_core::lattice::{GeneratorSpec, LatticeGrid};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub active_dims: Vec<usize>,
    pub sizes: Vec<usize>,
    pub lengths: Vec<f64>,
}

impl GridSection {
    pub fn build(&self) -> Result<LatticeGrid> {
        LatticeGrid::new(self.active_dims.clone(), self.sizes.clone(), self.lengths.clone())
            .context("invalid [grid] section")
    }
}

/// Singular-set detector parameters (heuristic diagnostic).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorSection {
    pub enabled: bool,
    pub eps: f64,
    pub rho_bar: f64,
    pub ladder: usize,
}

impl Default for DetectorSection {
    fn default() -> Self {
        DetectorSection { enabled: true, eps: 1e-6, rho_bar: 0.05, ladder: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub series_csv: String,
    pub summary: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { series_csv: "series.csv".into(), summary: "summary.toml".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridSection,
    pub generator: GeneratorSpec,
    pub flow: FlowConfig,
    #[serde(default)]
    pub monitors: MonitorConfig,
    #[serde(default)]
    pub detector: DetectorSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).context("parsing config")?;
        // validate before any allocation happens in the run
        let grid = cfg.grid.build()?;
        cfg.flow.validate(&grid).context("invalid [flow] section")?;
        if cfg.detector.enabled {
            if !(cfg.detector.eps >= 0.0) || !(cfg.detector.rho_bar > 0.0) || cfg.detector.ladder == 0 {
                bail!("invalid [detector] section");
            }
        }
        for spec in &cfg.monitors.theta_samples {
            if spec.center.len() != grid.n_active() {
                bail!(
                    "theta sample center has {} coordinates, grid has {} active dims",
                    spec.center.len(),
                    grid.n_active()
                );
            }
            if !(spec.t0 > 0.0) {
                bail!("theta sample t0 must be positive");
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }
}

/// A ready-to-run reference configuration, also used by `flow --example-config`.
pub fn example_config() -> ExperimentConfig {
    let h: f64 = 1.0 / 64.0;
    ExperimentConfig {
        grid: GridSection {
            active_dims: vec![0, 1],
            sizes: vec![64, 64],
            lengths: vec![1.0, 1.0],
        },
        generator: GeneratorSpec::new(3, 0.05, 2024).with_band(2, 3),
        flow: FlowConfig {
            dt: 0.2 * h * h,
            steps: 2000,
            dt_safety: 0.2,
            monitor_every: 10,
            ..FlowConfig::default()
        },
        monitors: MonitorConfig {
            theta_samples: vec![spin7_core::flow::HeatKernelSpec {
                center: vec![0.5, 0.5],
                t0: 0.03,
                images: 3,
            }],
            entropy_sigma: 0.01,
            ..MonitorConfig::default()
        },
        detector: DetectorSection::default(),
        output: OutputSection::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_round_trips_bit_exactly() {
        let cfg = example_config();
        let text = cfg.to_toml().unwrap();
        let parsed = ExperimentConfig::from_str(&text).unwrap();
        assert_eq!(parsed, cfg);
        let text2 = parsed.to_toml().unwrap();
        assert_eq!(text, text2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = example_config().to_toml().unwrap();
        text.push_str("\n[nonsense]\nfoo = 1\n");
        assert!(ExperimentConfig::from_str(&text).is_err());
    }

    #[test]
    fn parabolic_bound_is_enforced_at_parse_time() {
        let mut cfg = example_config();
        cfg.flow.dt = 1.0;
        let text = cfg.to_toml().unwrap();
        assert!(ExperimentConfig::from_str(&text).is_err());
    }
}
