use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::acquisition::AcquisitionSpec;
use crate::benchmarks::Benchmark;
use crate::error::{Error, Result};

fn default_doe() -> usize {
    10
}

fn default_budget() -> usize {
    200
}

fn default_output() -> PathBuf {
    PathBuf::from("runs")
}

/// The benchmark × acquisition × seed matrix to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub benchmarks: Vec<String>,
    pub afs: Vec<AcquisitionSpec>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_doe")]
    pub doe_size: usize,
    /// Total objective evaluations per run, design points included.
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.benchmarks.is_empty() || self.afs.is_empty() || self.seeds.is_empty() {
            return bad("benchmarks, afs and seeds must all be nonempty".into());
        }
        if self.doe_size == 0 {
            return bad("doe_size must be at least 1".into());
        }
        if self.budget < self.doe_size {
            return bad(format!("budget {} is smaller than doe_size {}", self.budget, self.doe_size));
        }
        for name in &self.benchmarks {
            let b = Benchmark::by_name(name).map_err(|_| Error::InvalidConfig(format!("unknown benchmark {name:?}")))?;
            for spec in &self.afs {
                spec.validate_for_dim(b.dim())?;
            }
        }
        for spec in &self.afs {
            if !(self.budget - self.doe_size).is_multiple_of(spec.q()) {
                return bad(format!("{spec}: budget - doe_size = {} is not a multiple of q = {}", self.budget - self.doe_size, spec.q()));
            }
        }
        Ok(())
    }

    /// Stable hex digest of the configuration.
    pub fn fingerprint(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", crate::rng::label(&text))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
benchmarks = ["branin2"]
seeds = [0, 1]
budget = 30
[[afs]]
kind = "ucb"
beta = 0.1
[[afs]]
kind = "ei"
q = 4
variant = ["trust_region"]
"#;

    #[test]
    fn parses_and_defaults() {
        let c = ExperimentConfig::from_toml(BASE).unwrap();
        assert_eq!(c.doe_size, 10);
        assert_eq!(c.afs.len(), 2);
        assert_eq!(c.afs[1].to_string(), "ei+tr-q4");
        assert_eq!(c.output_dir, PathBuf::from("runs"));
        assert_eq!(c.fingerprint(), ExperimentConfig::from_toml(BASE).unwrap().fingerprint());
    }

    #[test]
    fn rejects_bad_configs() {
        let e = ExperimentConfig::from_toml(&BASE.replace("branin2", "nope7")).unwrap_err();
        assert!(e.to_string().contains("nope7"));
        assert!(ExperimentConfig::from_toml(&BASE.replace("budget = 30", "budget = 31")).is_err());
        assert!(ExperimentConfig::from_toml(&BASE.replace("budget = 30", "budget = 5")).is_err());
        assert!(ExperimentConfig::from_toml(&BASE.replace("beta = 0.1", "")).is_err());
        assert!(ExperimentConfig::from_toml(&format!("extra = 1\n{BASE}")).is_err());
        let kg = "benchmarks = [\"griewank8\"]\nseeds=[0]\n[[afs]]\nkind=\"kg\"\n";
        assert!(ExperimentConfig::from_toml(kg).is_ok());
    }
}
