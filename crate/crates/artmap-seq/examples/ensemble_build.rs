//! Build a five-voter ensemble from scratch: train a population of
//! classifiers on permuted data, rank them on a validation set, measure
//! pairwise agreement, let the genetic search pick four complements to
//! the elite, and classify with majority voting.
//!
//! Run with `cargo run --example ensemble_build`.

use artmap_seq::ensemble::{build_ensemble, PipelineConfig};
use artmap_seq::features::HydropathyTable;
use artmap_seq::synth::Synthesizer;

fn main() {
    let families = ["rhodopsin", "secretin", "metabotropic", "fungal"];
    let mut synth = Synthesizer::new(&families, 0.3, 50..=120, 404).expect("valid settings");
    let train = synth
        .corpus(&families.iter().map(|&f| (f, 25)).collect::<Vec<_>>())
        .expect("families are rostered");
    let validation = synth
        .corpus(&families.iter().map(|&f| (f, 8)).collect::<Vec<_>>())
        .expect("families are rostered");
    let probes = synth
        .corpus(&families.iter().map(|&f| (f, 2)).collect::<Vec<_>>())
        .expect("families are rostered");

    let cfg = PipelineConfig {
        seed: 7,
        ..PipelineConfig::default()
    };
    let table = HydropathyTable::default();
    let outcome =
        build_ensemble(&train, &validation, &table, &cfg, "d1").expect("training data is clean");

    println!("population ranking (top 8 of {}):", cfg.population);
    println!("  rank  classifier  val_error  kappa     role");
    for row in outcome.ranking.iter().take(8) {
        println!(
            "  {:>4}  {:>10}  {:>8.2}%  {}  {}",
            row.rank,
            row.population_index,
            row.validation_error_pct,
            row.kappa.map_or("   -  ".into(), |k| format!("{k:.4}")),
            if row.rank == 1 {
                "elite"
            } else if row.selected {
                "selected"
            } else {
                ""
            }
        );
    }
    println!(
        "search fitness {:.4} over {} candidate(s)",
        outcome.ga.best_fitness,
        outcome.candidates.len()
    );

    let ensemble = outcome.ensemble;
    println!("\nvoters classify {} probe sequences:", probes.len());
    for seq in &probes {
        let p = ensemble.classify(&seq.residues).expect("alphabet is clean");
        let verdict = if Some(&p.label) == seq.family.as_ref() {
            "ok"
        } else {
            "MISS"
        };
        println!(
            "  {:<16} -> {:<12} votes [{}]  {}",
            seq.id,
            p.label,
            p.votes.join(", "),
            verdict
        );
    }
}
