//! Pick four ensemble members out of a ranked candidate pool with the
//! genetic search, then audit the result against exhaustive enumeration.
//!
//! The pool below is a ranked candidate pool from a 15-classifier
//! validation run: each candidate carries its validation error and its
//! agreement (kappa) with the top-ranked classifier. The search
//! minimizes `lambda * sum(kappa) + sum(error)`, trading accuracy
//! against diversity.
//!
//! Run with `cargo run --example member_selection`.

use artmap_seq::ga::{evolve, exhaustive_best, fitness, Candidate, Chromosome, GaConfig};

fn main() {
    // (validation error, kappa with the top classifier), ranks 2-15.
    let measurements = [
        (0.291667, 0.8940),
        (0.291667, 0.9730),
        (0.291667, 0.8438),
        (0.312500, 0.8929),
        (0.312500, 0.8929),
        (0.312500, 0.8929),
        (0.312500, 0.8455),
        (0.312500, 0.8683),
        (0.312500, 0.8929),
        (0.312500, 0.8929),
        (0.312500, 0.8929),
        (0.312500, 0.8929),
        (0.312500, 0.8430),
        (0.333333, 0.8430),
    ];
    let pool: Vec<Candidate> = measurements
        .iter()
        .enumerate()
        .map(|(i, &(eps, kap))| Candidate {
            index: i + 2,
            eps,
            kap,
        })
        .collect();

    let cfg = GaConfig {
        seed: 3,
        ..GaConfig::default()
    };
    let result = evolve(&pool, &cfg).expect("pool holds at least 4 candidates");
    let picked: Vec<usize> = result.best.genes().iter().map(|&g| pool[g].index).collect();
    println!(
        "evolved pick: ranks {picked:?}  fitness {:.6} after {} generations",
        result.best_fitness,
        result.history.len() - 1
    );

    let improved: Vec<&_> = result
        .history
        .windows(2)
        .filter(|w| w[1].best_fitness < w[0].best_fitness)
        .map(|w| &w[1])
        .collect();
    println!("improving generations: {}", improved.len());
    for record in improved {
        println!(
            "  gen {:>2}: fitness {:.6}",
            record.generation, record.best_fitness
        );
    }

    let report = exhaustive_best(&pool, cfg.lambda).expect("within enumeration budget");
    let optimal: Vec<usize> = report.best.genes().iter().map(|&g| pool[g].index).collect();
    println!(
        "\nexhaustive optimum: ranks {optimal:?}  fitness {:.6}  ({} tie(s) within {:.0e})",
        report.best_fitness,
        report.ties.len(),
        report.tie_tolerance
    );

    // A selection quoted for this pool in earlier work; with these
    // numbers it is close to, but not at, the optimum.
    let quoted = Chromosome::new([0, 1, 2, 10], pool.len()).expect("in range");
    let quoted_ranks: Vec<usize> = quoted.genes().iter().map(|&g| pool[g].index).collect();
    println!(
        "quoted pick:        ranks {quoted_ranks:?}  fitness {:.6}",
        fitness(&quoted, &pool, cfg.lambda).expect("valid chromosome")
    );
}
