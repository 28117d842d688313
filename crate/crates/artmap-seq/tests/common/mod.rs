//! A deliberately naive fuzzy ARTMAP written straight from the network
//! equations, used to cross-check the production implementation one
//! presentation at a time. Instead of pre-sorting categories by choice
//! value it re-scans the whole category list after every vigilance
//! change, keeping a disqualified set for the current pattern.

// Plain indexed loops are kept on purpose: the reference should read
// like the equations, not like the implementation it checks.
#![allow(clippy::needless_range_loop)]

/// What one pattern presentation did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RefStep {
    /// True when the pattern committed a fresh category.
    pub created: bool,
    /// How many label conflicts raised vigilance during the search.
    pub tracking: usize,
    /// Index of the category that absorbed the pattern.
    pub category: usize,
}

pub struct RefModel {
    dim: usize,
    rho: f64,
    alpha: f64,
    eps: f64,
    pub weights: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl RefModel {
    pub fn new(dim: usize, rho: f64, alpha: f64, eps: f64) -> Self {
        RefModel {
            dim,
            rho,
            alpha,
            eps,
            weights: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn coded(&self, input: &[f64]) -> Vec<f64> {
        assert_eq!(input.len(), self.dim);
        let mut out = Vec::with_capacity(2 * self.dim);
        for &x in input {
            out.push(x);
        }
        for &x in input {
            out.push(1.0 - x);
        }
        out
    }

    fn and_norm(&self, coded: &[f64], j: usize) -> f64 {
        let mut sum = 0.0;
        for (k, &x) in coded.iter().enumerate() {
            sum += x.min(self.weights[j][k]);
        }
        sum
    }

    fn choice_of(&self, coded: &[f64], j: usize) -> f64 {
        let mut norm = 0.0;
        for &w in &self.weights[j] {
            norm += w;
        }
        self.and_norm(coded, j) / (self.alpha + norm)
    }

    /// One presentation: search, match-track on label conflicts, learn.
    pub fn present(&mut self, input: &[f64], label: usize) -> RefStep {
        let coded = self.coded(input);
        let mut rho = self.rho;
        let mut tracking = 0;
        let mut disqualified = vec![false; self.weights.len()];

        loop {
            // Highest choice value among categories still in play; the
            // first seen wins ties, i.e. the lowest index.
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.weights.len() {
                if disqualified[j] {
                    continue;
                }
                let t = self.choice_of(&coded, j);
                if best.is_none_or(|(_, bt)| t > bt) {
                    best = Some((j, t));
                }
            }
            let Some((j, _)) = best else { break };

            let m = self.and_norm(&coded, j) / self.dim as f64;
            if m < rho {
                disqualified[j] = true;
                continue;
            }
            if self.labels[j] == label {
                for (k, &x) in coded.iter().enumerate() {
                    if x < self.weights[j][k] {
                        self.weights[j][k] = x;
                    }
                }
                return RefStep {
                    created: false,
                    tracking,
                    category: j,
                };
            }
            rho = m + self.eps;
            tracking += 1;
            disqualified[j] = true;
        }

        self.weights.push(coded);
        self.labels.push(label);
        RefStep {
            created: true,
            tracking,
            category: self.weights.len() - 1,
        }
    }

    /// Winner-take-all prediction without a vigilance test.
    pub fn predict(&self, input: &[f64]) -> Option<usize> {
        let coded = self.coded(input);
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.weights.len() {
            let t = self.choice_of(&coded, j);
            if best.is_none_or(|(_, bt)| t > bt) {
                best = Some((j, t));
            }
        }
        best.map(|(j, _)| self.labels[j])
    }
}
