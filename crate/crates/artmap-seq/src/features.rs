//! Sequence-to-vector mapping.
//!
//! Every sequence becomes a fixed 438-dimensional vector laid out as
//! `[composition (20) | hydropathy composition (3) | transmission (3) |
//! distribution (12) | digram frequencies (400)]`. All blocks are
//! length-relative frequencies, so the representation is independent of
//! sequence length. Vectors are min-max normalized against the training
//! set before they reach a classifier.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::{residue_index, AMINO_ACIDS};

pub const FEATURE_COUNT: usize = 438;

/// Index ranges of the five blocks inside a feature vector.
pub const COMPOSITION: Range<usize> = 0..20;
pub const HYDROPATHY_COMPOSITION: Range<usize> = 20..23;
pub const HYDROPATHY_TRANSMISSION: Range<usize> = 23..26;
pub const HYDROPATHY_DISTRIBUTION: Range<usize> = 26..38;
pub const DIGRAMS: Range<usize> = 38..438;

/// Hydropathy class of a residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HydropathyClass {
    Hydrophobic,
    Neutral,
    Polar,
}

impl HydropathyClass {
    pub const ALL: [HydropathyClass; 3] = [
        HydropathyClass::Hydrophobic,
        HydropathyClass::Neutral,
        HydropathyClass::Polar,
    ];

    fn index(self) -> usize {
        match self {
            HydropathyClass::Hydrophobic => 0,
            HydropathyClass::Neutral => 1,
            HydropathyClass::Polar => 2,
        }
    }
}

impl fmt::Display for HydropathyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HydropathyClass::Hydrophobic => "hydrophobic",
            HydropathyClass::Neutral => "neutral",
            HydropathyClass::Polar => "polar",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for HydropathyClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hydrophobic" => Ok(HydropathyClass::Hydrophobic),
            "neutral" => Ok(HydropathyClass::Neutral),
            "polar" => Ok(HydropathyClass::Polar),
            other => Err(Error::Config(format!("unknown hydropathy class {other:?}"))),
        }
    }
}

/// Assignment of each of the 20 residues to a hydropathy class.
///
/// The default table puts C F I L M V W in the hydrophobic class,
/// A G H P S T Y in the neutral class and D E K N Q R in the polar class.
/// An alternative partition can be loaded from a 20-line
/// `<residue> <class>` text file, so the grouping is data, not code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HydropathyTable {
    classes: [HydropathyClass; 20],
}

impl Default for HydropathyTable {
    fn default() -> Self {
        let mut classes = [HydropathyClass::Neutral; 20];
        for &b in b"CFILMVW" {
            classes[residue_index(b).unwrap()] = HydropathyClass::Hydrophobic;
        }
        for &b in b"AGHPSTY" {
            classes[residue_index(b).unwrap()] = HydropathyClass::Neutral;
        }
        for &b in b"DEKNQR" {
            classes[residue_index(b).unwrap()] = HydropathyClass::Polar;
        }
        HydropathyTable { classes }
    }
}

impl HydropathyTable {
    /// Parses a table from text: one `<residue> <class>` pair per line,
    /// blank lines and `#` comments ignored. Every residue must appear
    /// exactly once.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut classes = [None; 20];
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let (residue, class) = match (tokens.next(), tokens.next(), tokens.next()) {
                (Some(r), Some(c), None) => (r, c),
                _ => {
                    return Err(Error::Config(format!(
                        "hydropathy table line {}: expected '<residue> <class>'",
                        idx + 1
                    )))
                }
            };
            let slot = residue
                .bytes()
                .next()
                .filter(|_| residue.len() == 1)
                .and_then(residue_index)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "hydropathy table line {}: {residue:?} is not an amino acid",
                        idx + 1
                    ))
                })?;
            if classes[slot].is_some() {
                return Err(Error::Config(format!(
                    "hydropathy table line {}: duplicate residue {residue}",
                    idx + 1
                )));
            }
            classes[slot] = Some(class.parse::<HydropathyClass>()?);
        }
        let mut table = [HydropathyClass::Neutral; 20];
        for (i, slot) in classes.into_iter().enumerate() {
            table[i] = slot.ok_or_else(|| {
                Error::Config(format!(
                    "hydropathy table is missing residue {}",
                    AMINO_ACIDS[i] as char
                ))
            })?;
        }
        Ok(HydropathyTable { classes: table })
    }

    /// Renders the table back to its text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, class) in self.classes.iter().enumerate() {
            out.push(AMINO_ACIDS[i] as char);
            out.push(' ');
            out.push_str(&class.to_string());
            out.push('\n');
        }
        out
    }

    pub fn class_of(&self, residue: u8) -> HydropathyClass {
        self.classes[residue_index(residue).expect("residue validated by outlier filter")]
    }
}

/// Raw (un-normalized) feature vector.
#[derive(Clone, Debug, PartialEq)]
pub struct RawFeatureVector(Vec<f64>);

impl RawFeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        RawFeatureVector(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn composition(&self) -> &[f64] {
        &self.0[COMPOSITION]
    }

    pub fn hydropathy_composition(&self) -> &[f64] {
        &self.0[HYDROPATHY_COMPOSITION]
    }

    pub fn hydropathy_transmission(&self) -> &[f64] {
        &self.0[HYDROPATHY_TRANSMISSION]
    }

    pub fn hydropathy_distribution(&self) -> &[f64] {
        &self.0[HYDROPATHY_DISTRIBUTION]
    }

    pub fn digrams(&self) -> &[f64] {
        &self.0[DIGRAMS]
    }
}

/// Normalized feature vector; every component lies in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    /// Validates that every component is within `[0, 1]`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ComponentOutOfRange { index, value });
            }
        }
        Ok(FeatureVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Residue frequencies: value `i` is the count of residue `i` divided by
/// the sequence length. Sums to 1.
pub fn composition(residues: &str) -> [f64; 20] {
    let len = residues.len();
    assert!(len >= 1, "composition of an empty sequence");
    let mut counts = [0usize; 20];
    for b in residues.bytes() {
        counts[residue_index(b).expect("residue validated by outlier filter")] += 1;
    }
    let mut out = [0.0; 20];
    for (o, c) in out.iter_mut().zip(counts) {
        *o = c as f64 / len as f64;
    }
    out
}

/// Fraction of residues in each hydropathy class, ordered
/// (hydrophobic, neutral, polar). Sums to 1.
pub fn hydropathy_composition(residues: &str, table: &HydropathyTable) -> [f64; 3] {
    let len = residues.len();
    assert!(len >= 1, "hydropathy composition of an empty sequence");
    let mut counts = [0usize; 3];
    for b in residues.bytes() {
        counts[table.class_of(b).index()] += 1;
    }
    let mut out = [0.0; 3];
    for (o, c) in out.iter_mut().zip(counts) {
        *o = c as f64 / len as f64;
    }
    out
}

/// Frequencies of adjacent class changes, ordered (polar<->neutral,
/// neutral<->hydrophobic, polar<->hydrophobic), each divided by `L - 1`.
/// A single-residue sequence has no adjacent pairs and yields zeros.
pub fn hydropathy_transmission(residues: &str, table: &HydropathyTable) -> [f64; 3] {
    let len = residues.len();
    assert!(len >= 1, "hydropathy transmission of an empty sequence");
    if len == 1 {
        return [0.0; 3];
    }
    let mut counts = [0usize; 3];
    let bytes = residues.as_bytes();
    for pair in bytes.windows(2) {
        let a = table.class_of(pair[0]);
        let b = table.class_of(pair[1]);
        use HydropathyClass::*;
        let slot = match (a, b) {
            (Polar, Neutral) | (Neutral, Polar) => Some(0),
            (Neutral, Hydrophobic) | (Hydrophobic, Neutral) => Some(1),
            (Polar, Hydrophobic) | (Hydrophobic, Polar) => Some(2),
            _ => None,
        };
        if let Some(slot) = slot {
            counts[slot] += 1;
        }
    }
    let div = (len - 1) as f64;
    [
        counts[0] as f64 / div,
        counts[1] as f64 / div,
        counts[2] as f64 / div,
    ]
}

/// Class make-up of four cumulative prefixes covering 25%, 50%, 75% and
/// 100% of the sequence (prefix lengths rounded up). Laid out
/// prefix-major: for each prefix, the fraction of (hydrophobic, neutral,
/// polar) residues within it.
pub fn hydropathy_distribution(residues: &str, table: &HydropathyTable) -> [f64; 12] {
    let len = residues.len();
    assert!(len >= 1, "hydropathy distribution of an empty sequence");
    let boundaries = [len.div_ceil(4), len.div_ceil(2), (3 * len).div_ceil(4), len];
    let bytes = residues.as_bytes();
    let mut counts = [0usize; 3];
    let mut out = [0.0; 12];
    let mut next = 0;
    for (pos, &b) in bytes.iter().enumerate() {
        counts[table.class_of(b).index()] += 1;
        let prefix_len = pos + 1;
        while next < 4 && boundaries[next] == prefix_len {
            for class in 0..3 {
                out[next * 3 + class] = counts[class] as f64 / prefix_len as f64;
            }
            next += 1;
        }
    }
    debug_assert_eq!(next, 4);
    out
}

/// Block-local index of the ordered residue pair `(a, b)` in the digram
/// block, or `None` if either is not an amino acid. Pairs are ordered
/// lexicographically: AA, AC, AD, ... YY.
pub fn digram_index(a: u8, b: u8) -> Option<usize> {
    Some(residue_index(a)? * 20 + residue_index(b)?)
}

/// Frequencies of the 400 ordered residue pairs over adjacent positions,
/// divided by `max(L - 1, 1)`. Single-residue sequences yield zeros.
pub fn digram_frequencies(residues: &str) -> [f64; 400] {
    let len = residues.len();
    assert!(len >= 1, "digram frequencies of an empty sequence");
    let mut counts = [0usize; 400];
    for pair in residues.as_bytes().windows(2) {
        counts[digram_index(pair[0], pair[1]).expect("residue validated by outlier filter")] += 1;
    }
    let div = len.saturating_sub(1).max(1) as f64;
    let mut out = [0.0; 400];
    for (o, c) in out.iter_mut().zip(counts) {
        *o = c as f64 / div;
    }
    out
}

/// Full 438-dimensional raw feature vector of a sequence.
///
/// Panics on an empty sequence or on residues outside the 20-letter
/// alphabet; run sequences through the outlier filter first.
pub fn vectorize(residues: &str, table: &HydropathyTable) -> RawFeatureVector {
    let mut values = Vec::with_capacity(FEATURE_COUNT);
    values.extend_from_slice(&composition(residues));
    values.extend_from_slice(&hydropathy_composition(residues, table));
    values.extend_from_slice(&hydropathy_transmission(residues, table));
    values.extend_from_slice(&hydropathy_distribution(residues, table));
    values.extend_from_slice(&digram_frequencies(residues));
    debug_assert_eq!(values.len(), FEATURE_COUNT);
    RawFeatureVector(values)
}

/// Per-feature min-max bounds learned from a training set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl Normalizer {
    /// Learns per-feature bounds. All vectors must share one length.
    pub fn fit(vectors: &[RawFeatureVector]) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or(Error::EmptyInput("training vectors"))?;
        let dim = first.len();
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: v.len(),
                });
            }
            for ((value, lo), hi) in v.as_slice().iter().zip(&mut min).zip(&mut max) {
                *lo = lo.min(*value);
                *hi = hi.max(*value);
            }
        }
        Ok(Normalizer { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Maps each feature to `(x - min) / (max - min)`, clamped to
    /// `[0, 1]`. A feature that was constant during fitting maps to 0.
    /// Out-of-range features of later (incremental) data are clamped, not
    /// refit, so normalization is stable across increments.
    pub fn normalize(&self, v: &RawFeatureVector) -> Result<FeatureVector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.len(),
            });
        }
        let values = v
            .as_slice()
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&x, (&lo, &hi))| {
                if hi > lo {
                    ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect();
        Ok(FeatureVector(values))
    }

    /// Validates invariants after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.min.len() != self.max.len() {
            return Err(Error::InvalidModel(
                "normalizer min/max lengths differ".into(),
            ));
        }
        for (i, (lo, hi)) in self.min.iter().zip(&self.max).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::InvalidModel(format!(
                    "normalizer bounds for feature {i} are invalid ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }
}
