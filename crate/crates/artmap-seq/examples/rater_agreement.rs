//! Measure chance-corrected agreement between two classifiers with
//! Cohen's kappa.
//!
//! Run with `cargo run --example rater_agreement`.

use artmap_seq::agreement::{build_error_matrix, kappa};

fn show(name: &str, a: &[&str], b: &[&str], classes: &[&str]) {
    let matrix = build_error_matrix(a, b, classes).expect("labels are rostered");
    let k = kappa(&matrix).expect("at least one pair");
    println!("{name:<22} kappa = {k:+.4}");
}

fn main() {
    let classes = ["A", "B"];

    show(
        "perfect agreement",
        &["A", "A", "B", "B"],
        &["A", "A", "B", "B"],
        &classes,
    );
    show(
        "perfect opposition",
        &["A", "A", "B", "B"],
        &["B", "B", "A", "A"],
        &classes,
    );
    show(
        "chance-level overlap",
        &["A", "A", "B", "B"],
        &["A", "B", "A", "B"],
        &classes,
    );

    // Two ensemble members that disagree on two of twelve holdout calls.
    let families = ["aminergic", "peptide", "olfactory"];
    let first = [
        "aminergic",
        "aminergic",
        "aminergic",
        "peptide",
        "peptide",
        "peptide",
        "olfactory",
        "olfactory",
        "olfactory",
        "aminergic",
        "peptide",
        "olfactory",
    ];
    let second = [
        "aminergic",
        "aminergic",
        "peptide",
        "peptide",
        "peptide",
        "peptide",
        "olfactory",
        "olfactory",
        "olfactory",
        "olfactory",
        "peptide",
        "olfactory",
    ];
    show("two realistic members", &first, &second, &families);

    println!("\nlow kappa between well-performing members marks them as");
    println!("complementary: they fail on different patterns, which is what");
    println!("the member-selection search rewards.");
}
