//! Walk through the 438-dimensional feature vector of a single peptide,
//! block by block, then min-max normalize a small batch.
//!
//! Run with `cargo run --example feature_blocks`.

use artmap_seq::features::{digram_index, vectorize, HydropathyTable, Normalizer};
use artmap_seq::sequence::AMINO_ACIDS;

const PEPTIDE: &str = "SLTKTERTIIIVSM";

fn main() {
    let table = HydropathyTable::default();
    let v = vectorize(PEPTIDE, &table);
    println!(
        "peptide {PEPTIDE} ({} residues) -> {} features",
        PEPTIDE.len(),
        v.len()
    );

    println!("\ncomposition (nonzero):");
    for (i, &freq) in v.composition().iter().enumerate() {
        if freq > 0.0 {
            println!("  {}  {:.6}", AMINO_ACIDS[i] as char, freq);
        }
    }

    let hc = v.hydropathy_composition();
    println!(
        "\nresidue classes: hydrophobic {:.4}  neutral {:.4}  polar {:.4}",
        hc[0], hc[1], hc[2]
    );

    let ht = v.hydropathy_transmission();
    println!(
        "class transitions per position: P<->N {:.4}  N<->H {:.4}  P<->H {:.4}",
        ht[0], ht[1], ht[2]
    );

    println!("\nclass mass by sequence quarter (hydrophobic / neutral / polar):");
    for (q, chunk) in v.hydropathy_distribution().chunks(3).enumerate() {
        println!(
            "  first {:>3}%: {:.4} / {:.4} / {:.4}",
            25 * (q + 1),
            chunk[0],
            chunk[1],
            chunk[2]
        );
    }

    // Adjacent pairs are counted in order of appearance and divided by
    // the number of pairs, here 13.
    println!("\nleading digrams:");
    for pair in ["SL", "LT", "TK", "KT", "II"] {
        let bytes = pair.as_bytes();
        let idx = digram_index(bytes[0], bytes[1]).unwrap();
        println!("  {}  {:.6}", pair, v.digrams()[idx]);
    }

    let batch: Vec<_> = ["SLTKTERTIIIVSM", "ACDEFGHIKLMNP", "WWWYYYVVVTTT"]
        .iter()
        .map(|s| vectorize(s, &table))
        .collect();
    let norm = Normalizer::fit(&batch).expect("batch is non-empty");
    let scaled = norm.normalize(&batch[0]).expect("dimensions agree");
    println!(
        "\nnormalized batch of {}: first vector clamps to [{:.3}, {:.3}]",
        batch.len(),
        scaled
            .as_slice()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min),
        scaled
            .as_slice()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    );
}
