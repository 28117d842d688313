//! Simplified fuzzy ARTMAP classifier.
//!
//! Inputs are complement-coded, learning is fast (`beta = 1`), and the
//! map field is a direct category-to-label association. Training presents
//! patterns through a vigilance-gated search with match tracking; a label
//! conflict raises the vigilance just past the offending category's match
//! value and the search continues, creating a fresh category if nobody
//! else qualifies. Prediction is plain winner-take-all on the choice
//! function with no vigilance test.
//!
//! Category weights only ever shrink, and every weight component is the
//! minimum of finitely many input components, so training on a fixed
//! conflict-free set reaches zero training error in a finite number of
//! epochs.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version tag written into serialized models and bundles.
pub const MODEL_VERSION: u32 = 1;

/// Hyperparameters of a classifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamParams {
    /// Baseline vigilance in `[0, 1]`; resets to this before every
    /// pattern presentation.
    pub rho_baseline: f64,
    /// Choice parameter, a small positive constant.
    pub alpha: f64,
    /// Learning rate; fixed at 1 (fast learning) in this system.
    pub beta: f64,
    /// Match-tracking increment added to a conflicting category's match
    /// value.
    pub eps_mt: f64,
}

impl Default for FamParams {
    fn default() -> Self {
        FamParams {
            rho_baseline: 0.75,
            alpha: 0.001,
            beta: 1.0,
            eps_mt: 0.001,
        }
    }
}

impl FamParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho_baseline) {
            return Err(Error::InvalidModel(format!(
                "vigilance {} outside [0, 1]",
                self.rho_baseline
            )));
        }
        if self.alpha <= 0.0 || self.alpha.is_nan() {
            return Err(Error::InvalidModel(format!(
                "choice parameter {} must be positive",
                self.alpha
            )));
        }
        if self.beta != 1.0 {
            return Err(Error::InvalidModel(format!(
                "learning rate {} unsupported; this system uses fast learning (beta = 1)",
                self.beta
            )));
        }
        if self.eps_mt <= 0.0 || self.eps_mt.is_nan() {
            return Err(Error::InvalidModel(format!(
                "match-tracking increment {} must be positive",
                self.eps_mt
            )));
        }
        Ok(())
    }
}

/// A committed category: a weight vector over the complement-coded input
/// space and the class it maps to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Category {
    pub weight: Vec<f64>,
    pub label: usize,
}

/// Bidirectional class-id <-> class-name mapping; the id of a name is its
/// position in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelDict {
    names: Vec<String>,
}

impl LabelDict {
    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Returns the existing id or appends the name.
    pub fn register(&mut self, name: &str) -> usize {
        match self.id_of(name) {
            Some(id) => id,
            None => {
                self.names.push(name.to_string());
                self.names.len() - 1
            }
        }
    }

    pub fn name_of(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Appends the complement of each component: `a` becomes `(a, 1 - a)`.
/// Components must lie in `[0, 1]`; the result's city-block norm equals
/// the input dimension.
pub fn complement_code(values: &[f64]) -> Result<Vec<f64>> {
    for (index, &value) in values.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ComponentOutOfRange { index, value });
        }
    }
    let mut coded = Vec::with_capacity(values.len() * 2);
    coded.extend_from_slice(values);
    coded.extend(values.iter().map(|v| 1.0 - v));
    Ok(coded)
}

fn fuzzy_and_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x.min(y)).sum()
}

/// Choice function `|I ^ w| / (alpha + |w|)` of a complement-coded input
/// against a category weight.
pub fn choice(coded: &[f64], weight: &[f64], alpha: f64) -> f64 {
    debug_assert_eq!(coded.len(), weight.len());
    fuzzy_and_norm(coded, weight) / (alpha + weight.iter().sum::<f64>())
}

/// Match function `|I ^ w| / M` where `M` is the original (un-coded)
/// input dimension. Compared against vigilance during training.
pub fn match_degree(coded: &[f64], weight: &[f64], input_dim: usize) -> f64 {
    debug_assert_eq!(coded.len(), weight.len());
    fuzzy_and_norm(coded, weight) / input_dim as f64
}

/// What a single pattern presentation did to the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CategoryUpdate {
    /// A new category was committed at this index.
    Created(usize),
    /// The category at this index resonated and absorbed the pattern.
    Updated(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatternOutcome {
    /// Number of label conflicts that raised vigilance during the search.
    pub match_tracking: usize,
    pub update: CategoryUpdate,
}

/// Outcome of a multi-epoch training run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpochReport {
    /// Epochs actually consumed.
    pub epochs: usize,
    /// Whether a full pass ended with zero training-set errors.
    pub converged: bool,
    /// Training-set errors after the last pass.
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzyArtmap {
    params: FamParams,
    input_dim: usize,
    labels: LabelDict,
    categories: Vec<Category>,
}

impl FuzzyArtmap {
    pub fn new(input_dim: usize, params: FamParams) -> Result<Self> {
        Self::with_labels(input_dim, params, LabelDict::default())
    }

    /// Creates an untrained model with a pre-registered label dictionary,
    /// so that class ids agree across models trained on different
    /// orderings of the same data.
    pub fn with_labels(input_dim: usize, params: FamParams, labels: LabelDict) -> Result<Self> {
        params.validate()?;
        if input_dim == 0 {
            return Err(Error::Config("input dimension must be at least 1".into()));
        }
        Ok(FuzzyArtmap {
            params,
            input_dim,
            labels,
            categories: Vec::new(),
        })
    }

    pub fn params(&self) -> &FamParams {
        &self.params
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category_count(&self) -> usize {
        self.categories.len()
    }

    pub fn labels(&self) -> &LabelDict {
        &self.labels
    }

    /// Adds a class to the dictionary without training on it.
    pub fn register_label(&mut self, name: &str) -> usize {
        self.labels.register(name)
    }

    /// Presents one complement-coded pattern with its label.
    ///
    /// Committed categories are searched in descending choice order (ties
    /// to the lowest index). The first one that passes vigilance and
    /// agrees on the label absorbs the pattern (`w <- I ^ w`); one that
    /// passes vigilance but disagrees triggers match tracking, raising
    /// vigilance to its match value plus `eps_mt` and continuing the
    /// search. If no category qualifies, a new one is committed with
    /// `w = I`. Vigilance always starts from the baseline for the next
    /// pattern.
    pub fn train_pattern(&mut self, coded: &[f64], label: &str) -> Result<PatternOutcome> {
        if coded.len() != 2 * self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.input_dim,
                actual: coded.len(),
            });
        }
        for (index, &value) in coded.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ComponentOutOfRange { index, value });
            }
        }
        let label_id = self.labels.register(label);
        Ok(self.present(coded, label_id))
    }

    fn present(&mut self, coded: &[f64], label_id: usize) -> PatternOutcome {
        let mut rho = self.params.rho_baseline;
        let mut tracked = 0;

        let mut order: Vec<(usize, f64)> = self
            .categories
            .iter()
            .enumerate()
            .map(|(j, cat)| (j, choice(coded, &cat.weight, self.params.alpha)))
            .collect();
        order.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("choice is finite")
                .then(a.0.cmp(&b.0))
        });

        for (j, _) in order {
            let m = match_degree(coded, &self.categories[j].weight, self.input_dim);
            if m < rho {
                continue;
            }
            if self.categories[j].label == label_id {
                for (w, &x) in self.categories[j].weight.iter_mut().zip(coded) {
                    *w = w.min(x);
                }
                return PatternOutcome {
                    match_tracking: tracked,
                    update: CategoryUpdate::Updated(j),
                };
            }
            rho = m + self.params.eps_mt;
            tracked += 1;
        }

        self.categories.push(Category {
            weight: coded.to_vec(),
            label: label_id,
        });
        PatternOutcome {
            match_tracking: tracked,
            update: CategoryUpdate::Created(self.categories.len() - 1),
        }
    }

    /// Trains full passes over `patterns` (in the given order) until a
    /// pass ends with zero training-set errors or `max_epochs` is
    /// reached. Non-convergence is reported, not an error.
    pub fn train_epochs(
        &mut self,
        patterns: &[(&[f64], &str)],
        max_epochs: usize,
    ) -> Result<EpochReport> {
        if patterns.is_empty() {
            return Err(Error::EmptyInput("training patterns"));
        }
        if max_epochs == 0 {
            return Err(Error::Config("max_epochs must be at least 1".into()));
        }
        let mut coded = Vec::with_capacity(patterns.len());
        let mut label_ids = Vec::with_capacity(patterns.len());
        for (features, label) in patterns {
            if features.len() != self.input_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.input_dim,
                    actual: features.len(),
                });
            }
            coded.push(complement_code(features)?);
            label_ids.push(self.labels.register(label));
        }

        let mut errors = patterns.len();
        for epoch in 1..=max_epochs {
            for (c, &id) in coded.iter().zip(&label_ids) {
                self.present(c, id);
            }
            errors = coded
                .iter()
                .zip(&label_ids)
                .filter(|(c, &id)| self.predict_coded(c) != Some(id))
                .count();
            if errors == 0 {
                return Ok(EpochReport {
                    epochs: epoch,
                    converged: true,
                    errors: 0,
                });
            }
        }
        Ok(EpochReport {
            epochs: max_epochs,
            converged: false,
            errors,
        })
    }

    /// Continues training on additional patterns without resetting any
    /// learned state. An empty batch leaves the model untouched.
    pub fn incremental_train(
        &mut self,
        patterns: &[(&[f64], &str)],
        max_epochs: usize,
    ) -> Result<EpochReport> {
        if patterns.is_empty() {
            return Ok(EpochReport {
                epochs: 0,
                converged: true,
                errors: 0,
            });
        }
        self.train_epochs(patterns, max_epochs)
    }

    fn predict_coded(&self, coded: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (j, cat) in self.categories.iter().enumerate() {
            let t = choice(coded, &cat.weight, self.params.alpha);
            match best {
                Some((_, bt)) if t <= bt => {}
                _ => best = Some((j, t)),
            }
        }
        best.map(|(j, _)| self.categories[j].label)
    }

    /// Winner-take-all prediction: the label of the category with the
    /// highest choice value (ties to the lowest index). No vigilance test
    /// is applied.
    pub fn predict(&self, features: &[f64]) -> Result<&str> {
        self.predict_id(features).map(|id| self.labels.name_of(id))
    }

    /// Like [`predict`](Self::predict) but returns the class id.
    pub fn predict_id(&self, features: &[f64]) -> Result<usize> {
        if features.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                actual: features.len(),
            });
        }
        let coded = complement_code(features)?;
        self.predict_coded(&coded).ok_or(Error::UntrainedModel)
    }

    /// Serializes to versioned JSON.
    pub fn to_json(&self) -> String {
        to_versioned_json(self)
    }

    /// Parses versioned JSON, refusing unknown versions and structurally
    /// invalid models.
    pub fn from_json(text: &str) -> Result<Self> {
        let model: FuzzyArtmap = from_versioned_json(text)?;
        model.validate()?;
        Ok(model)
    }

    /// Checks structural invariants; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.input_dim == 0 {
            return Err(Error::InvalidModel("input dimension is 0".into()));
        }
        for (j, cat) in self.categories.iter().enumerate() {
            if cat.weight.len() != 2 * self.input_dim {
                return Err(Error::InvalidModel(format!(
                    "category {j} weight has length {} (expected {})",
                    cat.weight.len(),
                    2 * self.input_dim
                )));
            }
            if cat.weight.iter().any(|w| !(0.0..=1.0).contains(w)) {
                return Err(Error::InvalidModel(format!(
                    "category {j} weight has components outside [0, 1]"
                )));
            }
            if cat.label >= self.labels.len() {
                return Err(Error::InvalidModel(format!(
                    "category {j} refers to unknown class id {}",
                    cat.label
                )));
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct VersionedRef<'a, T: Serialize> {
    version: u32,
    model: &'a T,
}

/// Wraps a model in a `{version, model}` envelope.
pub(crate) fn to_versioned_json<T: Serialize>(model: &T) -> String {
    let mut text = serde_json::to_string_pretty(&VersionedRef {
        version: MODEL_VERSION,
        model,
    })
    .expect("model serialization cannot fail");
    text.push('\n');
    text
}

/// Unwraps a `{version, model}` envelope, refusing foreign versions.
pub(crate) fn from_versioned_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    let version = value
        .get("version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::InvalidModel("missing version field".into()))?;
    if version != u64::from(MODEL_VERSION) {
        return Err(Error::BundleVersion {
            found: version as u32,
            supported: MODEL_VERSION,
        });
    }
    let model = value
        .get_mut("model")
        .map(serde_json::Value::take)
        .ok_or_else(|| Error::InvalidModel("missing model field".into()))?;
    Ok(serde_json::from_value(model)?)
}
