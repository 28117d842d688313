//! Genetic search for a 4-member ensemble complement.
//!
//! Each candidate carries its validation error and its kappa agreement
//! with the elite classifier. A chromosome is a set of 4 distinct
//! candidates; its fitness `lambda * sum(kappa) + sum(error)` is
//! minimized, trading accuracy against diversity. A full enumeration
//! (`exhaustive_best`) serves as the reference answer for pools small
//! enough to enumerate.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of genes in every chromosome: the ensemble complement is always
/// 4 classifiers.
pub const GENES: usize = 4;

/// Budget for exhaustive enumeration, in number of 4-subsets.
pub const EXHAUSTIVE_BUDGET: u64 = 1_000_000;

/// One selectable classifier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    /// Position label in the ranked pool (rank number, elite excluded).
    pub index: usize,
    /// Validation error as a fraction in `[0, 1]`.
    pub eps: f64,
    /// Kappa agreement with the elite classifier.
    pub kap: f64,
}

/// A set of 4 distinct pool positions, stored sorted ascending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Chromosome {
    genes: [usize; GENES],
}

impl Chromosome {
    /// Validates distinctness and range, and canonicalizes the order.
    pub fn new(mut genes: [usize; GENES], pool_len: usize) -> Result<Self> {
        genes.sort_unstable();
        if genes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidChromosome(format!(
                "duplicate gene in {genes:?}"
            )));
        }
        if genes[GENES - 1] >= pool_len {
            return Err(Error::InvalidChromosome(format!(
                "gene {} out of range for pool of {pool_len}",
                genes[GENES - 1]
            )));
        }
        Ok(Chromosome { genes })
    }

    pub fn genes(&self) -> [usize; GENES] {
        self.genes
    }

    fn assert_valid(&self, pool_len: usize) {
        assert!(
            self.genes.windows(2).all(|w| w[0] < w[1]) && self.genes[GENES - 1] < pool_len,
            "invariant breach: invalid chromosome {:?}",
            self.genes
        );
    }
}

/// Search hyperparameters. The defaults are the operating point used
/// throughout: population 30, 50 generations, crossover 0.8, mutation
/// 0.4, lambda 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Weight of the kappa (diversity) term in the fitness.
    pub lambda: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 30,
            generations: 50,
            crossover_rate: 0.8,
            mutation_rate: 0.4,
            lambda: 1.0,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::Config("GA population must be at least 2".into()));
        }
        if self.generations == 0 {
            return Err(Error::Config("GA needs at least 1 generation".into()));
        }
        for (name, rate) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!("{name} {rate} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Fitness `lambda * sum(kappa) + sum(eps)` over the chromosome's 4
/// candidates; smaller is better.
pub fn fitness(chromosome: &Chromosome, pool: &[Candidate], lambda: f64) -> Result<f64> {
    let mut kap_sum = 0.0;
    let mut eps_sum = 0.0;
    for gene in chromosome.genes {
        let candidate = pool.get(gene).ok_or_else(|| {
            Error::InvalidChromosome(format!(
                "gene {gene} out of range for pool of {}",
                pool.len()
            ))
        })?;
        kap_sum += candidate.kap;
        eps_sum += candidate.eps;
    }
    Ok(lambda * kap_sum + eps_sum)
}

/// Best chromosome of one generation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub best: Chromosome,
}

/// Outcome of [`evolve`]: the best chromosome ever seen plus the
/// per-generation trace (entry 0 is the initial population).
#[derive(Clone, Debug, PartialEq)]
pub struct GaResult {
    pub best: Chromosome,
    pub best_fitness: f64,
    pub history: Vec<GenerationRecord>,
}

fn random_chromosome(rng: &mut ChaCha8Rng, pool_len: usize) -> Chromosome {
    let sampled = rand::seq::index::sample(rng, pool_len, GENES);
    let mut genes = [0usize; GENES];
    for (slot, value) in genes.iter_mut().zip(sampled.iter()) {
        *slot = value;
    }
    Chromosome::new(genes, pool_len).expect("sampled genes are distinct and in range")
}

/// Uniform draw from the pool positions not currently in `used`; `None`
/// when the chromosome already covers the whole pool.
fn unused_index(rng: &mut ChaCha8Rng, used: &[usize], pool_len: usize) -> Option<usize> {
    let free: Vec<usize> = (0..pool_len).filter(|i| !used.contains(i)).collect();
    if free.is_empty() {
        None
    } else {
        Some(free[rng.gen_range(0..free.len())])
    }
}

fn tournament<'a>(
    rng: &mut ChaCha8Rng,
    population: &'a [Chromosome],
    fitnesses: &[f64],
) -> &'a Chromosome {
    let a = rng.gen_range(0..population.len());
    let b = rng.gen_range(0..population.len());
    if fitnesses[a] <= fitnesses[b] {
        &population[a]
    } else {
        &population[b]
    }
}

/// Single-point crossover followed by a uniqueness repair: duplicate
/// genes are replaced by uniform draws from the unused pool positions.
fn crossover(
    rng: &mut ChaCha8Rng,
    p1: &Chromosome,
    p2: &Chromosome,
    pool_len: usize,
) -> (Chromosome, Chromosome) {
    let point = rng.gen_range(1..GENES);
    let mut children = Vec::with_capacity(2);
    for (head, tail) in [(p1, p2), (p2, p1)] {
        let mut genes: Vec<usize> = Vec::with_capacity(GENES);
        genes.extend_from_slice(&head.genes[..point]);
        genes.extend_from_slice(&tail.genes[point..]);
        let mut repaired: Vec<usize> = Vec::with_capacity(GENES);
        for gene in genes {
            if repaired.contains(&gene) {
                // Fewer than 4 genes are placed, so a free slot exists.
                repaired.push(unused_index(rng, &repaired, pool_len).expect("pool holds >= 4"));
            } else {
                repaired.push(gene);
            }
        }
        let genes: [usize; GENES] = repaired.try_into().expect("exactly 4 genes");
        children.push(Chromosome::new(genes, pool_len).expect("repair keeps genes distinct"));
    }
    (children[0], children[1])
}

/// Each gene is independently replaced by an unused pool position with
/// probability `rate`.
fn mutate(rng: &mut ChaCha8Rng, chromosome: &mut Chromosome, pool_len: usize, rate: f64) {
    for slot in 0..GENES {
        if rng.gen_bool(rate) {
            if let Some(replacement) = unused_index(rng, &chromosome.genes, pool_len) {
                chromosome.genes[slot] = replacement;
            }
        }
    }
    chromosome.genes.sort_unstable();
}

/// Runs the seeded genetic search over the candidate pool.
///
/// Selection is binary tournament, the best chromosome survives each
/// generation unchanged, and the same seed always reproduces the same
/// result. The recorded best fitness never increases across generations.
pub fn evolve(pool: &[Candidate], cfg: &GaConfig) -> Result<GaResult> {
    cfg.validate()?;
    if pool.len() < GENES {
        return Err(Error::PoolTooSmall {
            len: pool.len(),
            min: GENES,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut population: Vec<Chromosome> = (0..cfg.population)
        .map(|_| random_chromosome(&mut rng, pool.len()))
        .collect();
    let mut fitnesses = evaluate(&population, pool, cfg.lambda)?;

    let (mut best, mut best_fitness) = generation_best(&population, &fitnesses);
    let mut history = vec![GenerationRecord {
        generation: 0,
        best_fitness,
        best,
    }];

    for generation in 1..=cfg.generations {
        let mut next = Vec::with_capacity(cfg.population);
        next.push(best);
        while next.len() < cfg.population {
            let p1 = *tournament(&mut rng, &population, &fitnesses);
            let p2 = *tournament(&mut rng, &population, &fitnesses);
            let (mut c1, mut c2) = if rng.gen_bool(cfg.crossover_rate) {
                crossover(&mut rng, &p1, &p2, pool.len())
            } else {
                (p1, p2)
            };
            mutate(&mut rng, &mut c1, pool.len(), cfg.mutation_rate);
            mutate(&mut rng, &mut c2, pool.len(), cfg.mutation_rate);
            next.push(c1);
            if next.len() < cfg.population {
                next.push(c2);
            }
        }
        population = next;
        for chromosome in &population {
            chromosome.assert_valid(pool.len());
        }
        fitnesses = evaluate(&population, pool, cfg.lambda)?;
        let (gen_best, gen_fitness) = generation_best(&population, &fitnesses);
        if gen_fitness < best_fitness {
            best = gen_best;
            best_fitness = gen_fitness;
        }
        history.push(GenerationRecord {
            generation,
            best_fitness,
            best,
        });
    }

    Ok(GaResult {
        best,
        best_fitness,
        history,
    })
}

fn evaluate(population: &[Chromosome], pool: &[Candidate], lambda: f64) -> Result<Vec<f64>> {
    population
        .iter()
        .map(|c| fitness(c, pool, lambda))
        .collect()
}

fn generation_best(population: &[Chromosome], fitnesses: &[f64]) -> (Chromosome, f64) {
    let mut best = 0;
    for i in 1..population.len() {
        if fitnesses[i] < fitnesses[best] {
            best = i;
        }
    }
    (population[best], fitnesses[best])
}

/// Everything within `tie_tolerance` of the optimum, in lexicographic
/// gene order. `best` is the lexicographically smallest gene set among
/// those achieving the exact minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveReport {
    pub best: Chromosome,
    pub best_fitness: f64,
    pub ties: Vec<Chromosome>,
    pub tie_tolerance: f64,
}

/// Number of 4-subsets of a pool of `n`.
pub fn subset_count(n: usize) -> u64 {
    if n < GENES {
        return 0;
    }
    let n = n as u128;
    let combos = n * (n - 1) * (n - 2) * (n - 3) / 24;
    u64::try_from(combos).unwrap_or(u64::MAX)
}

/// Full enumeration of all 4-subsets; the reference answer the genetic
/// search is compared against. Pools whose subset count exceeds
/// [`EXHAUSTIVE_BUDGET`] are refused.
pub fn exhaustive_best(pool: &[Candidate], lambda: f64) -> Result<ExhaustiveReport> {
    if pool.len() < GENES {
        return Err(Error::PoolTooSmall {
            len: pool.len(),
            min: GENES,
        });
    }
    let combinations = subset_count(pool.len());
    if combinations > EXHAUSTIVE_BUDGET {
        return Err(Error::PoolTooLarge {
            combinations,
            budget: EXHAUSTIVE_BUDGET,
        });
    }

    let mut best: Option<(Chromosome, f64)> = None;
    for combo in (0..pool.len()).combinations(GENES) {
        let genes: [usize; GENES] = combo.try_into().expect("combinations of 4");
        let chromosome = Chromosome { genes };
        let f = fitness(&chromosome, pool, lambda)?;
        match best {
            Some((_, current)) if f >= current => {}
            _ => best = Some((chromosome, f)),
        }
    }
    let (best, best_fitness) = best.expect("pool has at least one subset");

    let tie_tolerance = 1e-9;
    let mut ties = Vec::new();
    for combo in (0..pool.len()).combinations(GENES) {
        let genes: [usize; GENES] = combo.try_into().expect("combinations of 4");
        let chromosome = Chromosome { genes };
        let f = fitness(&chromosome, pool, lambda)?;
        if f <= best_fitness + tie_tolerance {
            ties.push(chromosome);
        }
    }

    Ok(ExhaustiveReport {
        best,
        best_fitness,
        ties,
        tie_tolerance,
    })
}
