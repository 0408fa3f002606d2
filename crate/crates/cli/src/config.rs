use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use veriact_core::agent::{AgentConfig, HttpProviderConfig};
use veriact_core::harness::Thresholds;
use veriact_core::testkit::MutationConfig;
use veriact_core::verify::{OpenJmlConfig, PatternTable};

/// Every default a subcommand may use. Command-line flags override these
/// values; the environment only supplies the API key and the verifier path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlobalConfig {
    /// Seeds mutation and the agent.
    pub seed: u64,
    pub verbosity: Verbosity,
    /// Pattern table replacing the built-in one.
    pub patterns: Option<PathBuf>,
    pub verifier: VerifierSection,
    pub harness: HarnessSection,
    pub provider: ProviderSection,
    pub mutation: MutationSection,
    pub thresholds: ThresholdSection,
    pub agent: AgentSection,
    pub batch: BatchSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Verbosity {
    Error,
    Warn,
    #[default]
    Info,
    Debug,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    Builtin,
    Openjml,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifierSection {
    pub backend: BackendKind,
    pub openjml: OpenJmlConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessSection {
    pub backend: BackendKind,
    /// Record per-check wall clock in reports.
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    #[default]
    Scripted,
    Http,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderSection {
    pub kind: ProviderKind,
    /// Response script, or a directory of `<task id>.script.json` files.
    pub script: Option<PathBuf>,
    pub http: HttpProviderConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MutationSection {
    pub mutants_per_output: usize,
}

impl Default for MutationSection {
    fn default() -> Self {
        MutationSection { mutants_per_output: MutationConfig::default().mutants_per_output }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSection {
    pub post_corr: f64,
    pub post_comp: f64,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        let t = Thresholds::default();
        ThresholdSection { post_corr: t.post_corr, post_comp: t.post_comp }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentSection {
    pub max_steps: usize,
    pub planning_interval: usize,
    pub max_refinement_cycles: usize,
    pub max_pairs: usize,
}

impl Default for AgentSection {
    fn default() -> Self {
        let a = AgentConfig::default();
        AgentSection {
            max_steps: a.max_steps,
            planning_interval: a.planning_interval,
            max_refinement_cycles: a.max_refinement_cycles,
            max_pairs: a.max_pairs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchSection {
    pub workers: usize,
    pub normalize: bool,
    pub timings: bool,
}

impl Default for BatchSection {
    fn default() -> Self {
        BatchSection { workers: 1, normalize: true, timings: false }
    }
}

impl Default for GlobalConfig {
    fn default() -> Self {
        GlobalConfig {
            seed: 0,
            verbosity: Verbosity::default(),
            patterns: None,
            verifier: VerifierSection::default(),
            harness: HarnessSection::default(),
            provider: ProviderSection::default(),
            mutation: MutationSection::default(),
            thresholds: ThresholdSection::default(),
            agent: AgentSection::default(),
            batch: BatchSection::default(),
        }
    }
}

impl GlobalConfig {
    pub fn parse(text: &str) -> Result<GlobalConfig, String> {
        let cfg: GlobalConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<GlobalConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        GlobalConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.mutation.mutants_per_output == 0 {
            return Err("mutation.mutants_per_output must be at least 1".into());
        }
        if self.batch.workers == 0 {
            return Err("batch.workers must be at least 1".into());
        }
        if self.verifier.openjml.parallelism == 0 {
            return Err("verifier.openjml.parallelism must be at least 1".into());
        }
        self.agent_config().validate().map_err(|e| e.to_string())
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds { post_corr: self.thresholds.post_corr, post_comp: self.thresholds.post_comp }
    }

    pub fn mutation_config(&self) -> MutationConfig {
        MutationConfig { mutants_per_output: self.mutation.mutants_per_output, seed: self.seed, ..MutationConfig::default() }
    }

    pub fn agent_config(&self) -> AgentConfig {
        AgentConfig {
            max_steps: self.agent.max_steps,
            planning_interval: self.agent.planning_interval,
            max_refinement_cycles: self.agent.max_refinement_cycles,
            max_pairs: self.agent.max_pairs,
            thresholds: self.thresholds(),
            random_seed: self.seed,
        }
    }

    pub fn pattern_table(&self) -> Result<PatternTable, String> {
        match &self.patterns {
            Some(p) => PatternTable::load(p).map_err(|e| format!("{}: {e}", p.display())),
            None => Ok(PatternTable::builtin()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_file_spells_out_the_defaults() {
        let text = include_str!("../../../config/veriact.example.toml");
        assert_eq!(GlobalConfig::parse(text).unwrap(), GlobalConfig::default());
    }

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(GlobalConfig::parse("").unwrap(), GlobalConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(GlobalConfig::parse("sed = 1").unwrap_err().contains("sed"));
        assert!(GlobalConfig::parse("[agent]\nmax_step = 3").unwrap_err().contains("max_step"));
        assert!(GlobalConfig::parse("[verifier.openjml]\ntimeout = 3").is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(GlobalConfig::parse("[thresholds]\npost_comp = 1.5").is_err());
        assert!(GlobalConfig::parse("[mutation]\nmutants_per_output = 0").is_err());
        assert!(GlobalConfig::parse("[agent]\nmax_steps = 0").is_err());
    }

    #[test]
    fn seed_reaches_mutation_and_agent() {
        let cfg = GlobalConfig::parse("seed = 9\n[mutation]\nmutants_per_output = 2").unwrap();
        assert_eq!(cfg.mutation_config().seed, 9);
        assert_eq!(cfg.mutation_config().mutants_per_output, 2);
        assert_eq!(cfg.agent_config().random_seed, 9);
    }
}
