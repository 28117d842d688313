//! Experiment configuration files.
//!
//! Configs are TOML: flat key-value sections, documented in the README.
//! Paths are resolved relative to the config file's directory and must
//! exist at load time; seeds are always explicit. Every hyperparameter
//! section is optional and defaults to the standard operating point.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::artmap::FamParams;
use crate::ensemble::PipelineConfig;
use crate::error::{Error, Result};
use crate::features::HydropathyTable;
use crate::ga::GaConfig;
use crate::sequence::{DatabaseRole, SplitSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub input: InputSection,
    pub split: SplitSection,
    #[serde(default)]
    pub pipeline: PipelineSection,
    #[serde(default)]
    pub ga: GaSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    /// Labeled FASTA corpus.
    pub fasta: PathBuf,
    /// Residue-class table; the built-in grouping applies when absent.
    pub hydropathy: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    pub seed: u64,
    /// `"<name>:<role>"` entries, e.g. `"d1:train"`, `"dv:validation"`.
    pub databases: Vec<String>,
    /// Per-family sequence counts, aligned with `databases`.
    pub counts: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub population: usize,
    pub candidate_pool: usize,
    pub members: usize,
    pub epochs: usize,
    pub rho: f64,
    pub alpha: f64,
    pub eps_mt: f64,
}

impl Default for PipelineSection {
    fn default() -> Self {
        let cfg = PipelineConfig::default();
        PipelineSection {
            population: cfg.population,
            candidate_pool: cfg.candidate_pool,
            members: cfg.members,
            epochs: cfg.epochs,
            rho: cfg.fam.rho_baseline,
            alpha: cfg.fam.alpha,
            eps_mt: cfg.fam.eps_mt,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaSection {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub lambda: f64,
}

impl Default for GaSection {
    fn default() -> Self {
        let cfg = GaConfig::default();
        GaSection {
            population: cfg.population,
            generations: cfg.generations,
            crossover_rate: cfg.crossover_rate,
            mutation_rate: cfg.mutation_rate,
            lambda: cfg.lambda,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    /// Parses a config file, resolves its paths against the file's
    /// directory, and verifies the input paths exist.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;

        let base = path.parent().unwrap_or_else(|| Path::new("."));
        cfg.input.fasta = resolve(base, &cfg.input.fasta);
        cfg.input.hydropathy = cfg.input.hydropathy.map(|p| resolve(base, &p));
        cfg.output.dir = resolve(base, &cfg.output.dir);

        if !cfg.input.fasta.exists() {
            return Err(Error::Config(format!(
                "input fasta {} does not exist",
                cfg.input.fasta.display()
            )));
        }
        if let Some(table) = &cfg.input.hydropathy {
            if !table.exists() {
                return Err(Error::Config(format!(
                    "hydropathy table {} does not exist",
                    table.display()
                )));
            }
        }
        cfg.split_spec()?;
        Ok(cfg)
    }

    /// Materializes the `[split]` section.
    pub fn split_spec(&self) -> Result<SplitSpec> {
        let mut databases = Vec::with_capacity(self.split.databases.len());
        for entry in &self.split.databases {
            let (name, role) = entry.split_once(':').ok_or_else(|| {
                Error::Config(format!(
                    "database entry {entry:?} is not of the form \"name:role\""
                ))
            })?;
            let role: DatabaseRole = role
                .parse()
                .map_err(|_| Error::Config(format!("unknown database role in {entry:?}")))?;
            databases.push((name.to_string(), role));
        }
        SplitSpec::new(databases, self.split.counts.clone(), self.split.seed)
    }

    /// Materializes the pipeline hyperparameters under an explicit seed.
    pub fn pipeline_config(&self, seed: u64) -> PipelineConfig {
        PipelineConfig {
            population: self.pipeline.population,
            candidate_pool: self.pipeline.candidate_pool,
            members: self.pipeline.members,
            epochs: self.pipeline.epochs,
            fam: FamParams {
                rho_baseline: self.pipeline.rho,
                alpha: self.pipeline.alpha,
                eps_mt: self.pipeline.eps_mt,
                ..FamParams::default()
            },
            ga: GaConfig {
                population: self.ga.population,
                generations: self.ga.generations,
                crossover_rate: self.ga.crossover_rate,
                mutation_rate: self.ga.mutation_rate,
                lambda: self.ga.lambda,
                seed,
            },
            seed,
        }
    }

    /// Loads the configured hydropathy table, or the built-in grouping.
    pub fn hydropathy(&self) -> Result<HydropathyTable> {
        match &self.input.hydropathy {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                HydropathyTable::from_text(&text)
            }
            None => Ok(HydropathyTable::default()),
        }
    }
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}
