//! Elite-plus-complement ensembles over permuted training streams.
//!
//! The pipeline trains a population of classifiers on seeded
//! permutations of one training set, ranks them by validation error,
//! keeps the best as the unconditional elite, measures kappa agreement
//! between the elite and the next-ranked candidates, and lets the
//! genetic search pick 4 complements that trade accuracy against
//! diversity. The resulting 5 voters share one normalizer and one label
//! dictionary, fuse predictions by majority vote, and absorb later
//! databases incrementally — each member on its own fresh permutation —
//! without retraining from scratch.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agreement::{build_error_matrix, kappa};
use crate::artmap::{
    from_versioned_json, to_versioned_json, EpochReport, FamParams, FuzzyArtmap, LabelDict,
};
use crate::error::{Error, Result};
use crate::features::{vectorize, FeatureVector, HydropathyTable, Normalizer, FEATURE_COUNT};
use crate::ga::{self, Candidate, GaConfig, GaResult};
use crate::sequence::{DatabaseRole, DatasetPartition, ProteinSequence};

/// Voting classifiers in every ensemble: 1 elite + 4 selected.
pub const ENSEMBLE_SIZE: usize = 5;

/// Hyperparameters of the full build pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Classifiers trained before ranking.
    pub population: usize,
    /// Ranked classifiers kept for agreement analysis, elite included;
    /// ranks 2 and below form the selection pool.
    pub candidate_pool: usize,
    /// Classifiers the genetic search adds to the elite.
    pub members: usize,
    /// Training epoch cap per classifier.
    pub epochs: usize,
    pub fam: FamParams,
    pub ga: GaConfig,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            population: 30,
            candidate_pool: 15,
            members: 4,
            epochs: 100,
            fam: FamParams::default(),
            ga: GaConfig::default(),
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.fam.validate()?;
        self.ga.validate()?;
        if self.members != ga::GENES {
            return Err(Error::Config(format!(
                "ensembles select exactly {} members, not {}",
                ga::GENES,
                self.members
            )));
        }
        if self.candidate_pool <= self.members {
            return Err(Error::Config(format!(
                "candidate pool {} cannot supply {} members plus an elite",
                self.candidate_pool, self.members
            )));
        }
        if self.candidate_pool > self.population {
            return Err(Error::Config(format!(
                "candidate pool {} exceeds population {}",
                self.candidate_pool, self.population
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epoch cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// Labeled, normalized patterns ready for training or evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSet {
    labels: Vec<String>,
    features: Vec<FeatureVector>,
}

impl LabeledSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn features(&self) -> &[FeatureVector] {
        &self.features
    }

    fn training_view(&self, order: &[usize]) -> Vec<(&[f64], &str)> {
        order
            .iter()
            .map(|&i| (self.features[i].as_slice(), self.labels[i].as_str()))
            .collect()
    }
}

fn check_sequence(seq: &ProteinSequence) -> Result<()> {
    if seq.residues.is_empty() {
        return Err(Error::Config(format!("sequence {} is empty", seq.id)));
    }
    if let Some(c) = seq
        .residues
        .chars()
        .find(|&c| !(c.is_ascii() && crate::sequence::residue_index(c as u8).is_some()))
    {
        return Err(Error::Config(format!(
            "sequence {} contains invalid residue {c:?}; run the outlier filter first",
            seq.id
        )));
    }
    Ok(())
}

/// Vectorizes and normalizes labeled sequences.
pub fn prepare(
    seqs: &[ProteinSequence],
    table: &HydropathyTable,
    normalizer: &Normalizer,
) -> Result<LabeledSet> {
    let mut labels = Vec::with_capacity(seqs.len());
    let mut features = Vec::with_capacity(seqs.len());
    for seq in seqs {
        check_sequence(seq)?;
        let family = seq
            .family
            .as_deref()
            .ok_or_else(|| Error::Config(format!("sequence {} has no family label", seq.id)))?;
        labels.push(family.to_string());
        features.push(normalizer.normalize(&vectorize(&seq.residues, table))?);
    }
    Ok(LabeledSet { labels, features })
}

/// One population classifier and the data order it was trained on.
#[derive(Clone, Debug)]
pub struct TrainedMember {
    pub population_index: usize,
    pub permutation: Vec<usize>,
    pub epochs: EpochReport,
    pub model: FuzzyArtmap,
}

/// A population classifier with its validation rank attached.
#[derive(Clone, Debug)]
pub struct RankedMember {
    pub rank: usize,
    pub validation_error: f64,
    pub member: TrainedMember,
}

/// Trains `cfg.population` classifiers, classifier `k` on the
/// permutation drawn from seed `cfg.seed + k`. All share the
/// pre-registered label dictionary so class ids align across members.
pub fn train_population(
    train: &LabeledSet,
    dict: &LabelDict,
    cfg: &PipelineConfig,
) -> Result<Vec<TrainedMember>> {
    if train.is_empty() {
        return Err(Error::EmptyInput("training set"));
    }
    let mut members = Vec::with_capacity(cfg.population);
    for k in 0..cfg.population {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k as u64));
        let mut permutation: Vec<usize> = (0..train.len()).collect();
        permutation.shuffle(&mut rng);
        let mut model = FuzzyArtmap::with_labels(FEATURE_COUNT, cfg.fam, dict.clone())?;
        let epochs = model.train_epochs(&train.training_view(&permutation), cfg.epochs)?;
        members.push(TrainedMember {
            population_index: k,
            permutation,
            epochs,
            model,
        });
    }
    Ok(members)
}

fn error_fraction(model: &FuzzyArtmap, set: &LabeledSet) -> Result<f64> {
    let mut wrong = 0usize;
    for (feature, truth) in set.features.iter().zip(&set.labels) {
        if model.predict(feature.as_slice())? != truth {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / set.len() as f64)
}

/// Sorts the population by validation error, ties broken by population
/// index; rank 1 is the elite.
pub fn rank_by_validation(
    members: Vec<TrainedMember>,
    validation: &LabeledSet,
) -> Result<Vec<RankedMember>> {
    if validation.is_empty() {
        return Err(Error::EmptyInput("validation set"));
    }
    let mut scored: Vec<(f64, TrainedMember)> = members
        .into_iter()
        .map(|m| Ok((error_fraction(&m.model, validation)?, m)))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("error fractions are finite")
            .then(a.1.population_index.cmp(&b.1.population_index))
    });
    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(i, (validation_error, member))| RankedMember {
            rank: i + 1,
            validation_error,
            member,
        })
        .collect())
}

/// Builds the selection pool: validation error and kappa agreement with
/// the elite for ranks 2 through `pool`. `Candidate::index` carries the
/// rank number.
pub fn analyze_agreement(
    ranked: &[RankedMember],
    validation: &LabeledSet,
    pool: usize,
) -> Result<Vec<Candidate>> {
    let elite = ranked
        .first()
        .ok_or(Error::EmptyInput("ranked population"))?;
    let classes = elite.member.model.labels().names().to_vec();
    let elite_preds = predictions(&elite.member.model, validation)?;

    let mut candidates = Vec::new();
    for r in &ranked[1..pool.min(ranked.len())] {
        let preds = predictions(&r.member.model, validation)?;
        let matrix = build_error_matrix(&preds, &elite_preds, &classes)?;
        candidates.push(Candidate {
            index: r.rank,
            eps: r.validation_error,
            kap: kappa(&matrix)?,
        });
    }
    Ok(candidates)
}

fn predictions(model: &FuzzyArtmap, set: &LabeledSet) -> Result<Vec<String>> {
    set.features
        .iter()
        .map(|f| Ok(model.predict(f.as_slice())?.to_string()))
        .collect()
}

/// How one database entered the ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementRecord {
    pub database: String,
    pub patterns: usize,
    pub seed: u64,
}

/// Everything needed to reproduce or audit a bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Pipeline seed the population permutations derive from.
    pub seed: u64,
    pub elite_population_index: usize,
    pub member_population_indices: Vec<usize>,
    /// Training orders of the kept classifiers, elite first.
    pub permutations: Vec<Vec<usize>>,
    pub increments: Vec<IncrementRecord>,
    /// Databases whose patterns every member has absorbed.
    pub trained_databases: Vec<String>,
}

/// The deployable classifier: 5 voters over one feature pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub params: FamParams,
    pub hydropathy: HydropathyTable,
    pub normalizer: Normalizer,
    pub labels: LabelDict,
    pub elite: FuzzyArtmap,
    pub members: Vec<FuzzyArtmap>,
    pub provenance: Provenance,
}

/// A fused prediction plus the raw votes behind it, elite's first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    pub votes: Vec<String>,
}

/// Majority vote over class ids; `votes[0]` is the elite's. Ties go to
/// the elite's vote when it is among the tied labels, otherwise to the
/// lowest class id.
pub fn fuse_votes(votes: &[usize]) -> usize {
    let max_id = *votes.iter().max().expect("at least one vote");
    let mut counts = vec![0usize; max_id + 1];
    for &v in votes {
        counts[v] += 1;
    }
    let top = *counts.iter().max().expect("at least one count");
    let elite = votes[0];
    if counts[elite] == top {
        return elite;
    }
    counts
        .iter()
        .position(|&c| c == top)
        .expect("top count exists")
}

/// Per-model outcome of one incremental update.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelIncrement {
    /// 0 is the elite; 1..=4 the selected members.
    pub voter: usize,
    pub population_index: usize,
    pub new_categories: usize,
    pub epochs: usize,
    pub converged: bool,
}

/// Report of one [`Ensemble::increment`] call.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementReport {
    pub database: String,
    pub patterns: usize,
    pub new_labels: Vec<String>,
    pub models: Vec<ModelIncrement>,
}

/// One evaluation pass over a partition, labelled by pipeline stage.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationColumn {
    pub stage: String,
    pub entries: Vec<EvaluationEntry>,
}

/// `None` renders as a dash: the database is empty or not yet trained.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationEntry {
    pub database: String,
    pub role: DatabaseRole,
    pub error_pct: Option<f64>,
}

impl Ensemble {
    /// All 5 voters, elite first.
    fn voters(&self) -> impl Iterator<Item = &FuzzyArtmap> {
        std::iter::once(&self.elite).chain(self.members.iter())
    }

    fn voters_mut(&mut self) -> Vec<&mut FuzzyArtmap> {
        let mut all = vec![&mut self.elite];
        all.extend(self.members.iter_mut());
        all
    }

    pub fn predict_features(&self, features: &FeatureVector) -> Result<Prediction> {
        let mut ids = Vec::with_capacity(ENSEMBLE_SIZE);
        for voter in self.voters() {
            ids.push(voter.predict_id(features.as_slice())?);
        }
        let label = self.labels.name_of(fuse_votes(&ids)).to_string();
        let votes = ids
            .iter()
            .map(|&id| self.labels.name_of(id).to_string())
            .collect();
        Ok(Prediction { label, votes })
    }

    /// Vectorizes one raw sequence through the stored hydropathy table
    /// and normalizer, then votes.
    pub fn classify(&self, residues: &str) -> Result<Prediction> {
        let probe = ProteinSequence {
            id: "probe".into(),
            family: None,
            residues: residues.to_string(),
        };
        check_sequence(&probe)?;
        let raw = vectorize(residues, &self.hydropathy);
        self.predict_features(&self.normalizer.normalize(&raw)?)
    }

    /// Fused error on a labeled set, as a fraction; `None` for an empty set.
    pub fn error_rate(&self, set: &LabeledSet) -> Result<Option<f64>> {
        if set.is_empty() {
            return Ok(None);
        }
        let mut wrong = 0usize;
        for (feature, truth) in set.features.iter().zip(&set.labels) {
            if self.predict_features(feature)?.label != *truth {
                wrong += 1;
            }
        }
        Ok(Some(wrong as f64 / set.len() as f64))
    }

    /// Error percentage per database. Training databases the ensemble
    /// has not absorbed yet are masked, as are empty databases.
    pub fn evaluate_partition(
        &self,
        partition: &DatasetPartition,
        stage: &str,
    ) -> Result<EvaluationColumn> {
        let mut entries = Vec::new();
        for dataset in partition.all() {
            let masked = dataset.role == DatabaseRole::Train
                && !self.provenance.trained_databases.contains(&dataset.name);
            let error_pct = if masked || dataset.sequences.is_empty() {
                None
            } else {
                let set = prepare(&dataset.sequences, &self.hydropathy, &self.normalizer)?;
                self.error_rate(&set)?.map(|e| e * 100.0)
            };
            entries.push(EvaluationEntry {
                database: dataset.name.clone(),
                role: dataset.role,
                error_pct,
            });
        }
        Ok(EvaluationColumn {
            stage: stage.to_string(),
            entries,
        })
    }

    /// Absorbs a new database: registers unseen families ensemble-wide,
    /// then incrementally trains each voter on its own fresh permutation
    /// drawn from `seed + voter position`.
    pub fn increment(
        &mut self,
        database: &str,
        seqs: &[ProteinSequence],
        seed: u64,
        max_epochs: usize,
    ) -> Result<IncrementReport> {
        if seqs.is_empty() {
            return Ok(IncrementReport {
                database: database.to_string(),
                patterns: 0,
                new_labels: Vec::new(),
                models: Vec::new(),
            });
        }
        let set = prepare(seqs, &self.hydropathy, &self.normalizer)?;

        // New families are registered into every voter before any voter
        // trains; per-voter permutations would otherwise grow divergent
        // label dictionaries.
        let mut new_labels = Vec::new();
        for label in &set.labels {
            if self.labels.id_of(label).is_none() {
                self.labels.register(label);
                new_labels.push(label.clone());
            }
        }
        for voter in self.voters_mut() {
            for label in &new_labels {
                voter.register_label(label);
            }
        }

        let indices = std::iter::once(self.provenance.elite_population_index)
            .chain(self.provenance.member_population_indices.iter().copied())
            .collect::<Vec<_>>();
        let mut models = Vec::with_capacity(ENSEMBLE_SIZE);
        for (position, voter) in self.voters_mut().into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(position as u64));
            let mut permutation: Vec<usize> = (0..set.len()).collect();
            permutation.shuffle(&mut rng);
            let before = voter.category_count();
            let report = voter.incremental_train(&set.training_view(&permutation), max_epochs)?;
            models.push(ModelIncrement {
                voter: position,
                population_index: indices[position],
                new_categories: voter.category_count() - before,
                epochs: report.epochs,
                converged: report.converged,
            });
        }

        self.provenance.increments.push(IncrementRecord {
            database: database.to_string(),
            patterns: set.len(),
            seed,
        });
        if !self
            .provenance
            .trained_databases
            .iter()
            .any(|d| d == database)
        {
            self.provenance.trained_databases.push(database.to_string());
        }

        Ok(IncrementReport {
            database: database.to_string(),
            patterns: set.len(),
            new_labels,
            models,
        })
    }

    pub fn to_json(&self) -> String {
        to_versioned_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ensemble: Ensemble = from_versioned_json(text)?;
        ensemble.validate()?;
        Ok(ensemble)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.normalizer.validate()?;
        if self.normalizer.dim() != FEATURE_COUNT {
            return Err(Error::InvalidModel(format!(
                "normalizer covers {} features, expected {FEATURE_COUNT}",
                self.normalizer.dim()
            )));
        }
        if self.members.len() + 1 != ENSEMBLE_SIZE {
            return Err(Error::InvalidModel(format!(
                "ensemble holds {} voters, expected {ENSEMBLE_SIZE}",
                self.members.len() + 1
            )));
        }
        if self.labels.is_empty() {
            return Err(Error::InvalidModel("empty label dictionary".into()));
        }
        for voter in self.voters() {
            voter.validate()?;
            if voter.labels().names() != self.labels.names() {
                return Err(Error::InvalidModel(
                    "voter label dictionary diverges from the ensemble's".into(),
                ));
            }
        }
        if self.provenance.member_population_indices.len() != self.members.len() {
            return Err(Error::InvalidModel(
                "provenance does not cover every member".into(),
            ));
        }
        if self.provenance.permutations.len() != ENSEMBLE_SIZE {
            return Err(Error::InvalidModel(
                "provenance must record one training order per voter".into(),
            ));
        }
        Ok(())
    }
}

/// Everything a build produces besides the ensemble itself.
#[derive(Clone, Debug)]
pub struct BuildOutcome {
    pub ensemble: Ensemble,
    /// Ranked report rows, elite first; kappa is `None` for the elite.
    pub ranking: Vec<RankingRow>,
    pub candidates: Vec<Candidate>,
    pub ga: GaResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankingRow {
    pub rank: usize,
    pub population_index: usize,
    pub validation_error_pct: f64,
    pub kappa: Option<f64>,
    pub selected: bool,
}

/// Full build: vectorize, fit the normalizer, train the population on
/// permuted orders, rank, analyze agreement, run the genetic selection,
/// and assemble the 5-voter ensemble.
pub fn build_ensemble(
    train: &[ProteinSequence],
    validation: &[ProteinSequence],
    table: &HydropathyTable,
    cfg: &PipelineConfig,
    database: &str,
) -> Result<BuildOutcome> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyInput("training set"));
    }
    if validation.is_empty() {
        return Err(Error::EmptyInput("validation set"));
    }

    let mut raws = Vec::with_capacity(train.len());
    for seq in train {
        check_sequence(seq)?;
        raws.push(vectorize(&seq.residues, table));
    }
    let normalizer = Normalizer::fit(&raws)?;
    let train_set = prepare(train, table, &normalizer)?;
    let val_set = prepare(validation, table, &normalizer)?;

    // Canonical class ids come from unpermuted training order.
    let mut dict = LabelDict::default();
    for label in train_set.labels() {
        dict.register(label);
    }

    let population = train_population(&train_set, &dict, cfg)?;
    let ranked = rank_by_validation(population, &val_set)?;
    let pool = cfg.candidate_pool.min(ranked.len());
    let candidates = analyze_agreement(&ranked, &val_set, pool)?;
    let ga_result = ga::evolve(&candidates, &cfg.ga)?;

    // Genes are positions in the candidate slice; candidate at position
    // g sits at rank g + 2, i.e. ranked[g + 1].
    let selected_ranks: Vec<usize> = ga_result.best.genes().iter().map(|g| g + 2).collect();
    let elite = &ranked[0];
    let members: Vec<&RankedMember> = selected_ranks.iter().map(|&r| &ranked[r - 1]).collect();

    let provenance = Provenance {
        seed: cfg.seed,
        elite_population_index: elite.member.population_index,
        member_population_indices: members.iter().map(|m| m.member.population_index).collect(),
        permutations: std::iter::once(&elite.member.permutation)
            .chain(members.iter().map(|m| &m.member.permutation))
            .map(Clone::clone)
            .collect(),
        increments: Vec::new(),
        trained_databases: vec![database.to_string()],
    };

    let ensemble = Ensemble {
        params: cfg.fam,
        hydropathy: table.clone(),
        normalizer,
        labels: dict,
        elite: elite.member.model.clone(),
        members: members.iter().map(|m| m.member.model.clone()).collect(),
        provenance,
    };
    ensemble.validate()?;

    let ranking = ranked[..pool]
        .iter()
        .map(|r| RankingRow {
            rank: r.rank,
            population_index: r.member.population_index,
            validation_error_pct: r.validation_error * 100.0,
            kappa: candidates.iter().find(|c| c.index == r.rank).map(|c| c.kap),
            selected: r.rank == 1 || selected_ranks.contains(&r.rank),
        })
        .collect();

    Ok(BuildOutcome {
        ensemble,
        ranking,
        candidates,
        ga: ga_result,
    })
}

/// Result of a full train-then-increment experiment.
#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub ensemble: Ensemble,
    pub ranking: Vec<RankingRow>,
    pub candidates: Vec<Candidate>,
    pub ga: GaResult,
    /// One column per stage: initial build, then one per increment.
    pub columns: Vec<EvaluationColumn>,
    pub increments: Vec<IncrementReport>,
}

/// Builds on the first training database, absorbs the remaining ones in
/// declared order, and evaluates every database after each stage.
pub fn run_incremental_experiment(
    partition: &DatasetPartition,
    table: &HydropathyTable,
    cfg: &PipelineConfig,
    increment_epochs: usize,
) -> Result<ExperimentResult> {
    let first = partition
        .train
        .first()
        .ok_or(Error::EmptyInput("training databases"))?;
    let outcome = build_ensemble(
        &first.sequences,
        &partition.validation.sequences,
        table,
        cfg,
        &first.name,
    )?;
    let mut ensemble = outcome.ensemble;

    let mut columns = vec![ensemble.evaluate_partition(partition, "initial")?];
    let mut increments = Vec::new();
    for (i, database) in partition.train.iter().enumerate().skip(1) {
        let seed = cfg.seed.wrapping_add(7919 * i as u64);
        let report =
            ensemble.increment(&database.name, &database.sequences, seed, increment_epochs)?;
        increments.push(report);
        columns.push(ensemble.evaluate_partition(partition, &format!("after {}", database.name))?);
    }

    Ok(ExperimentResult {
        ensemble,
        ranking: outcome.ranking,
        candidates: outcome.candidates,
        ga: outcome.ga,
        columns,
        increments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{NamedDataset, SplitSpec};
    use crate::synth::Synthesizer;
    use std::collections::BTreeMap;

    fn small_cfg(seed: u64) -> PipelineConfig {
        PipelineConfig {
            population: 6,
            candidate_pool: 5,
            epochs: 30,
            seed,
            ga: GaConfig {
                population: 8,
                generations: 10,
                seed,
                ..GaConfig::default()
            },
            ..PipelineConfig::default()
        }
    }

    fn corpus(seed: u64) -> (Vec<ProteinSequence>, Vec<ProteinSequence>) {
        let mut synth = Synthesizer::new(&["fam-a", "fam-b", "fam-c"], 0.9, 30..=60, seed).unwrap();
        let train = synth
            .corpus(&[("fam-a", 12), ("fam-b", 12), ("fam-c", 12)])
            .unwrap();
        let val = synth
            .corpus(&[("fam-a", 6), ("fam-b", 6), ("fam-c", 6)])
            .unwrap();
        (train, val)
    }

    fn build(seed: u64) -> BuildOutcome {
        let (train, val) = corpus(seed);
        build_ensemble(
            &train,
            &val,
            &HydropathyTable::default(),
            &small_cfg(seed),
            "db1",
        )
        .unwrap()
    }

    #[test]
    fn build_satisfies_ensemble_invariants() {
        let outcome = build(5);
        let e = &outcome.ensemble;
        e.validate().unwrap();
        assert_eq!(e.members.len(), 4);
        assert_eq!(outcome.ranking.len(), 5);
        assert_eq!(outcome.ranking[0].rank, 1);
        assert!(outcome.ranking[0].kappa.is_none());
        assert!(outcome.ranking[1..].iter().all(|r| r.kappa.is_some()));
        assert_eq!(outcome.candidates.len(), 4);
        assert_eq!(
            e.provenance.elite_population_index,
            outcome.ranking[0].population_index
        );
        // Ranking is ascending with index tie-breaks.
        for pair in outcome.ranking.windows(2) {
            assert!(
                pair[0].validation_error_pct < pair[1].validation_error_pct
                    || (pair[0].validation_error_pct == pair[1].validation_error_pct
                        && pair[0].population_index < pair[1].population_index)
            );
        }
    }

    #[test]
    fn build_memorizes_its_training_database() {
        let outcome = build(7);
        let (train, _) = corpus(7);
        let set = prepare(
            &train,
            &outcome.ensemble.hydropathy,
            &outcome.ensemble.normalizer,
        )
        .unwrap();
        assert_eq!(outcome.ensemble.error_rate(&set).unwrap(), Some(0.0));
    }

    #[test]
    fn build_is_deterministic_per_seed() {
        let a = build(11).ensemble.to_json();
        let b = build(11).ensemble.to_json();
        assert_eq!(a, b);
        let c = build(12).ensemble.to_json();
        assert_ne!(a, c);
    }

    #[test]
    fn vote_fusion_follows_the_tie_rules() {
        // Strict majority.
        assert_eq!(fuse_votes(&[0, 0, 0, 1, 1]), 0);
        // Elite among the tied labels wins the tie.
        assert_eq!(fuse_votes(&[1, 1, 0, 0, 2]), 1);
        // Elite outside the tie: lowest class id.
        assert_eq!(fuse_votes(&[2, 0, 0, 1, 1]), 0);
        assert_eq!(fuse_votes(&[2, 1, 1, 0, 0]), 0);
        // Unanimity.
        assert_eq!(fuse_votes(&[3, 3, 3, 3, 3]), 3);
        // Five-way split: elite's vote ties with everyone at count 1.
        assert_eq!(fuse_votes(&[4, 0, 1, 2, 3]), 4);
    }

    #[test]
    fn majority_always_wins_when_three_agree() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let votes: Vec<usize> = (0..5).map(|_| rng.gen_range(0..4)).collect();
            let fused = fuse_votes(&votes);
            for label in 0..4 {
                if votes.iter().filter(|&&v| v == label).count() >= 3 {
                    assert_eq!(fused, label, "votes {votes:?}");
                }
            }
        }
    }

    #[test]
    fn increment_absorbs_a_new_family() {
        let mut synth =
            Synthesizer::new(&["fam-a", "fam-b", "fam-c", "fam-d"], 0.9, 30..=60, 31).unwrap();
        let train = synth.corpus(&[("fam-a", 12), ("fam-b", 12)]).unwrap();
        let val = synth.corpus(&[("fam-a", 6), ("fam-b", 6)]).unwrap();
        let table = HydropathyTable::default();
        let mut ensemble = build_ensemble(&train, &val, &table, &small_cfg(31), "db1")
            .unwrap()
            .ensemble;

        let new_block = synth.corpus(&[("fam-c", 10), ("fam-d", 10)]).unwrap();
        let report = ensemble.increment("db2", &new_block, 77, 30).unwrap();
        assert_eq!(report.new_labels, ["fam-c", "fam-d"]);
        assert_eq!(report.models.len(), 5);
        assert!(report.models.iter().all(|m| m.new_categories > 0));
        ensemble.validate().unwrap();

        // New families are classified; the original database still is.
        let new_set = prepare(&new_block, &table, &ensemble.normalizer).unwrap();
        assert_eq!(ensemble.error_rate(&new_set).unwrap(), Some(0.0));
        let old_set = prepare(&train, &table, &ensemble.normalizer).unwrap();
        assert_eq!(ensemble.error_rate(&old_set).unwrap(), Some(0.0));
        assert_eq!(
            ensemble.provenance.trained_databases,
            ["db1".to_string(), "db2".to_string()]
        );
    }

    #[test]
    fn increment_with_memorized_data_grows_nothing() {
        let (train, val) = corpus(41);
        let table = HydropathyTable::default();
        let mut ensemble = build_ensemble(&train, &val, &table, &small_cfg(41), "db1")
            .unwrap()
            .ensemble;
        let before: Vec<String> = ensemble.voters().map(|v| v.to_json()).collect();

        let report = ensemble.increment("db1", &train, 123, 30).unwrap();
        assert!(report.new_labels.is_empty());
        assert!(report.models.iter().all(|m| m.new_categories == 0));
        let after: Vec<String> = ensemble.voters().map(|v| v.to_json()).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn empty_increment_is_identity() {
        let (train, val) = corpus(43);
        let table = HydropathyTable::default();
        let mut ensemble = build_ensemble(&train, &val, &table, &small_cfg(43), "db1")
            .unwrap()
            .ensemble;
        let before = ensemble.to_json();
        let report = ensemble.increment("db9", &[], 1, 30).unwrap();
        assert_eq!(report.patterns, 0);
        assert_eq!(ensemble.to_json(), before);
    }

    #[test]
    fn evaluation_masks_untrained_databases() {
        let mut synth = Synthesizer::new(&["fam-a", "fam-b"], 0.9, 30..=60, 51).unwrap();
        let mut counts = BTreeMap::new();
        counts.insert("fam-a".to_string(), vec![8, 8, 4, 4]);
        counts.insert("fam-b".to_string(), vec![8, 8, 4, 4]);
        let spec = SplitSpec::new(
            vec![
                ("d1".into(), DatabaseRole::Train),
                ("d2".into(), DatabaseRole::Train),
                ("dv".into(), DatabaseRole::Validation),
                ("dt".into(), DatabaseRole::Test),
            ],
            counts,
            3,
        )
        .unwrap();
        let all = synth.corpus(&[("fam-a", 24), ("fam-b", 24)]).unwrap();
        let partition = crate::sequence::split_datasets(&all, &spec).unwrap();

        let table = HydropathyTable::default();
        let mut ensemble = build_ensemble(
            &partition.train[0].sequences,
            &partition.validation.sequences,
            &table,
            &small_cfg(51),
            "d1",
        )
        .unwrap()
        .ensemble;

        let column = ensemble.evaluate_partition(&partition, "initial").unwrap();
        let by_name = |col: &EvaluationColumn, name: &str| {
            col.entries
                .iter()
                .find(|e| e.database == name)
                .unwrap()
                .clone()
        };
        assert_eq!(by_name(&column, "d1").error_pct, Some(0.0));
        assert_eq!(by_name(&column, "d2").error_pct, None);
        assert!(by_name(&column, "dv").error_pct.is_some());
        assert!(by_name(&column, "dt").error_pct.is_some());

        ensemble
            .increment("d2", &partition.train[1].sequences, 9, 30)
            .unwrap();
        let column = ensemble.evaluate_partition(&partition, "after d2").unwrap();
        assert_eq!(by_name(&column, "d2").error_pct, Some(0.0));

        // An empty database renders as a dash regardless of role.
        let mut empty = partition.clone();
        empty.test = NamedDataset {
            name: "dt".into(),
            role: DatabaseRole::Test,
            sequences: Vec::new(),
        };
        let column = ensemble.evaluate_partition(&empty, "after d2").unwrap();
        assert_eq!(by_name(&column, "dt").error_pct, None);
    }

    #[test]
    fn bundles_roundtrip_and_reject_foreign_versions() {
        let ensemble = build(61).ensemble;
        let json = ensemble.to_json();
        let back = Ensemble::from_json(&json).unwrap();
        assert_eq!(ensemble, back);

        let corrupt = json.replace("\"version\": 1", "\"version\": 9");
        assert!(matches!(
            Ensemble::from_json(&corrupt),
            Err(Error::BundleVersion { .. })
        ));
    }

    #[test]
    fn experiment_runs_all_stages() {
        let mut synth = Synthesizer::new(&["fam-a", "fam-b"], 0.9, 30..=60, 71).unwrap();
        let mut counts = BTreeMap::new();
        counts.insert("fam-a".to_string(), vec![8, 6, 6, 4, 4]);
        counts.insert("fam-b".to_string(), vec![8, 6, 6, 4, 4]);
        let spec = SplitSpec::new(
            vec![
                ("d1".into(), DatabaseRole::Train),
                ("d2".into(), DatabaseRole::Train),
                ("d3".into(), DatabaseRole::Train),
                ("dv".into(), DatabaseRole::Validation),
                ("dt".into(), DatabaseRole::Test),
            ],
            counts,
            5,
        )
        .unwrap();
        let all = synth.corpus(&[("fam-a", 28), ("fam-b", 28)]).unwrap();
        let partition = crate::sequence::split_datasets(&all, &spec).unwrap();

        let result =
            run_incremental_experiment(&partition, &HydropathyTable::default(), &small_cfg(71), 30)
                .unwrap();
        assert_eq!(result.columns.len(), 3);
        assert_eq!(result.increments.len(), 2);
        assert_eq!(result.columns[0].stage, "initial");
        assert_eq!(result.columns[2].stage, "after d3");

        // Retention: every trained database reads exactly zero.
        let trained = &result.ensemble.provenance.trained_databases;
        assert_eq!(trained, &["d1".to_string(), "d2".into(), "d3".into()]);
        for entry in &result.columns[2].entries {
            if trained.contains(&entry.database) {
                assert_eq!(entry.error_pct, Some(0.0));
            }
        }
    }

    #[test]
    fn config_validation_rejects_bad_shapes() {
        let base = PipelineConfig::default;
        assert!(PipelineConfig {
            members: 5,
            ..base()
        }
        .validate()
        .is_err());
        assert!(PipelineConfig {
            candidate_pool: 4,
            ..base()
        }
        .validate()
        .is_err());
        assert!(PipelineConfig {
            candidate_pool: 31,
            ..base()
        }
        .validate()
        .is_err());
        assert!(PipelineConfig {
            epochs: 0,
            ..base()
        }
        .validate()
        .is_err());
        base().validate().unwrap();
    }
}
