//! Pairwise classifier agreement: the inter-classifier error matrix and
//! Cohen's kappa computed from it.
//!
//! The error matrix cross-tabulates two classifiers' predictions over the
//! same patterns; kappa measures their agreement beyond chance. Lower
//! kappa between ensemble candidates means more diversity, which is what
//! the member-selection fitness rewards.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Q x Q cross-tabulation of two prediction lists over a fixed class
/// list. `count(i, j)` is the number of patterns the first classifier put
/// in class `i` and the second in class `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorMatrix {
    classes: Vec<String>,
    counts: Vec<Vec<u64>>,
}

impl ErrorMatrix {
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn count(&self, row: usize, col: usize) -> u64 {
        self.counts[row][col]
    }

    pub fn row_total(&self, row: usize) -> u64 {
        self.counts[row].iter().sum()
    }

    pub fn col_total(&self, col: usize) -> u64 {
        self.counts.iter().map(|row| row[col]).sum()
    }

    /// Total number of paired predictions.
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Sum of the diagonal: patterns both classifiers placed in the same
    /// class.
    pub fn agreement_count(&self) -> u64 {
        (0..self.class_count()).map(|i| self.counts[i][i]).sum()
    }
}

/// Cross-tabulates two equally long prediction lists. Every prediction
/// must appear in `classes`; class names must be distinct.
pub fn build_error_matrix<S: AsRef<str>>(
    preds_a: &[S],
    preds_b: &[S],
    classes: &[S],
) -> Result<ErrorMatrix> {
    if preds_a.len() != preds_b.len() {
        return Err(Error::DimensionMismatch {
            expected: preds_a.len(),
            actual: preds_b.len(),
        });
    }
    let mut index: HashMap<&str, usize> = HashMap::with_capacity(classes.len());
    for (i, class) in classes.iter().enumerate() {
        if index.insert(class.as_ref(), i).is_some() {
            return Err(Error::Config(format!(
                "duplicate class {:?} in class list",
                class.as_ref()
            )));
        }
    }
    let q = classes.len();
    let mut counts = vec![vec![0u64; q]; q];
    for (a, b) in preds_a.iter().zip(preds_b) {
        let i = *index
            .get(a.as_ref())
            .ok_or_else(|| Error::UnknownLabel(a.as_ref().to_string()))?;
        let j = *index
            .get(b.as_ref())
            .ok_or_else(|| Error::UnknownLabel(b.as_ref().to_string()))?;
        counts[i][j] += 1;
    }
    Ok(ErrorMatrix {
        classes: classes.iter().map(|c| c.as_ref().to_string()).collect(),
        counts,
    })
}

/// Cohen's kappa of an error matrix.
///
/// With `theta1` the diagonal sum and `theta2` the sum over classes of
/// row total times column total, kappa is
/// `(N * theta1 - theta2) / (N^2 - theta2)`. The degenerate case
/// `N^2 == theta2` (all mass in one row and one column) is defined as 1
/// for full agreement and 0 otherwise. An empty matrix is an error.
pub fn kappa(matrix: &ErrorMatrix) -> Result<f64> {
    let n = matrix.total();
    if n == 0 {
        return Err(Error::EmptyInput("error matrix"));
    }
    let theta1 = u128::from(matrix.agreement_count());
    let theta2: u128 = (0..matrix.class_count())
        .map(|i| u128::from(matrix.row_total(i)) * u128::from(matrix.col_total(i)))
        .sum();
    let n = u128::from(n);
    let n_sq = n * n;
    if n_sq == theta2 {
        return Ok(if theta1 == n { 1.0 } else { 0.0 });
    }
    let numerator = (n * theta1) as i128 - theta2 as i128;
    let denominator = (n_sq - theta2) as f64;
    Ok(numerator as f64 / denominator)
}
