//! Train one fuzzy ARTMAP classifier on a toy two-dimensional problem
//! and watch categories form, match tracking fire, and training error
//! reach zero.
//!
//! Run with `cargo run --example single_classifier`.

use artmap_seq::artmap::{complement_code, FamParams, FuzzyArtmap};

fn main() {
    // Four well-separated clusters in the unit square, one per label,
    // plus one "adhesion" outpost close enough to the aminergic box to
    // force a vigilance reset the first time it is seen.
    let data: Vec<(Vec<f64>, &str)> = vec![
        (vec![0.10, 0.10], "aminergic"),
        (vec![0.15, 0.12], "aminergic"),
        (vec![0.12, 0.18], "aminergic"),
        (vec![0.20, 0.20], "adhesion"),
        (vec![0.90, 0.10], "peptide"),
        (vec![0.85, 0.15], "peptide"),
        (vec![0.88, 0.08], "peptide"),
        (vec![0.10, 0.90], "olfactory"),
        (vec![0.18, 0.85], "olfactory"),
        (vec![0.90, 0.90], "secretin"),
        (vec![0.84, 0.92], "secretin"),
    ];

    let mut net = FuzzyArtmap::new(2, FamParams::default()).expect("valid params");
    println!(
        "training {} patterns, vigilance {:.2}",
        data.len(),
        net.params().rho_baseline
    );

    let mut tracking_events = 0;
    for epoch in 1..=50 {
        let mut errors = 0;
        for (point, label) in &data {
            let coded = complement_code(point).expect("components in range");
            let before = net.category_count();
            let outcome = net.train_pattern(&coded, label).expect("training succeeds");
            if outcome.match_tracking > 0 {
                tracking_events += outcome.match_tracking;
            }
            if net.category_count() > before {
                errors += 1; // a fresh category means the pattern was new or misfiled
            }
        }
        println!(
            "epoch {:>2}: {} categories, {} new this pass",
            epoch,
            net.category_count(),
            errors
        );
        if errors == 0 {
            break;
        }
    }
    println!("match tracking raised vigilance {tracking_events} time(s)");

    println!("\nlearned categories (weights are [min_x, min_y, 1-max_x, 1-max_y]):");
    for (i, cat) in net.categories().iter().enumerate() {
        let w: Vec<String> = cat.weight.iter().map(|x| format!("{x:.2}")).collect();
        println!(
            "  #{i}: [{}] -> {}",
            w.join(", "),
            net.labels().name_of(cat.label)
        );
    }

    println!("\npredictions on unseen points:");
    for point in [
        [0.13, 0.14],
        [0.21, 0.19],
        [0.87, 0.12],
        [0.14, 0.88],
        [0.86, 0.91],
    ] {
        println!("  {point:?} -> {}", net.predict(&point).expect("trained"));
    }
}
