//! Train an ensemble on one database, then absorb three more without
//! revisiting old data, checking after every stage that nothing already
//! learned was forgotten.
//!
//! Run with `cargo run --example incremental_learning`.

use artmap_seq::ensemble::{run_incremental_experiment, PipelineConfig};
use artmap_seq::features::HydropathyTable;
use artmap_seq::report::render_matrix;
use artmap_seq::sequence::{DatabaseRole, DatasetPartition, NamedDataset};
use artmap_seq::synth::Synthesizer;

fn main() {
    let families: Vec<String> = (1..=8).map(|i| format!("fam-{i:02}")).collect();
    let names: Vec<&str> = families.iter().map(String::as_str).collect();
    let mut synth = Synthesizer::new(&names, 0.9, 40..=100, 2024).expect("valid settings");
    let mut block = |per_family: usize| {
        synth
            .corpus(&names.iter().map(|&f| (f, per_family)).collect::<Vec<_>>())
            .expect("families are rostered")
    };

    let partition = DatasetPartition {
        train: vec![
            NamedDataset {
                name: "d1".into(),
                role: DatabaseRole::Train,
                sequences: block(18),
            },
            NamedDataset {
                name: "d2".into(),
                role: DatabaseRole::Train,
                sequences: block(10),
            },
            NamedDataset {
                name: "d3".into(),
                role: DatabaseRole::Train,
                sequences: block(10),
            },
            NamedDataset {
                name: "d4".into(),
                role: DatabaseRole::Train,
                sequences: block(10),
            },
        ],
        validation: NamedDataset {
            name: "dv".into(),
            role: DatabaseRole::Validation,
            sequences: block(5),
        },
        test: NamedDataset {
            name: "dt".into(),
            role: DatabaseRole::Test,
            sequences: block(8),
        },
    };
    for dataset in partition.all() {
        println!(
            "{:<4} {:>3} sequences ({})",
            dataset.name,
            dataset.sequences.len(),
            dataset.role
        );
    }

    let cfg = PipelineConfig {
        seed: 5,
        ..PipelineConfig::default()
    };
    let result = run_incremental_experiment(&partition, &HydropathyTable::default(), &cfg, 100)
        .expect("experiment runs");

    println!("\nerror matrix, one column per stage (dash = not yet trained):\n");
    let matrix = render_matrix(&result.columns).expect("columns are consistent");
    // Drop the machine-readable schema line for display.
    print!("{}", matrix.lines().skip(1).collect::<Vec<_>>().join("\n"));
    println!();

    println!("\ncategory growth per increment:");
    for report in &result.increments {
        let growth: Vec<usize> = report.models.iter().map(|m| m.new_categories).collect();
        println!(
            "  {}: {} patterns, voter categories grew by {:?}",
            report.database, report.patterns, growth
        );
    }

    let last = result.columns.last().expect("at least one stage");
    let forgotten = last
        .entries
        .iter()
        .filter(|e| e.role == DatabaseRole::Train)
        .any(|e| e.error_pct != Some(0.0));
    println!(
        "\nretention after the final stage: {}",
        if forgotten {
            "DEGRADED"
        } else {
            "every trained database still at 0% error"
        }
    );
}
