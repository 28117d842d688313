//! Parse a FASTA corpus, drop sequences the feature extractor cannot
//! handle, and summarize what is left.
//!
//! Run with `cargo run --example corpus_stats`.

use artmap_seq::sequence::{length_histogram, parse_fasta, remove_outliers};

const CORPUS: &str = "\
>seq-1 family=rhodopsin
MNGTEGPNFYVPFSNKTGVVRSPFEAPQYYLAEPWQFSMLAAYMFLLIMLGFPINFLTLYVTVQHKKLRTPLNYILLNLAVADLFMVFGGFTTTLYTSLHGYFVFGPTGCNLEGFFATLGGEIALWSLVVLAIERYVVVCKPMSNFRFGENHAIMGVAFTWVMALACAAPPLVGWSRYIPEGMQCSCGIDYYTPHEETNNESFVIYMFVVHFIIPLIVIFFCYGQLVFTVKEAAAQQQESATTQKAEKEVTRMVIIMVIAFLICWLPYAGVAFYIFTHQGSDFGPIFMTIPAFFAKTSAVYNPVIYIMMNKQ
>seq-2 family=rhodopsin
mngtegpnfyvpfsnktgvvrspfeapqyylaepwqf
>seq-3 family=secretin
HSDGTFTSELSRLREGARLQRLLQGLV
>seq-4
GWTLNSAGYLLGPHAVGNHRSFSDKNGLTS
>seq-5 family=fragment
MKTX
>seq-6 family=fragment
";

fn main() {
    let doc = parse_fasta(CORPUS).expect("corpus parses");
    println!(
        "parsed {} records ({} needed case folding)",
        doc.sequences.len(),
        doc.case_folded
    );

    let (kept, rejected) = remove_outliers(doc.sequences);
    println!("kept {} sequences:", kept.len());
    for seq in &kept {
        println!(
            "  {:<8} {:>4} residues  family={}",
            seq.id,
            seq.residues.len(),
            seq.family.as_deref().unwrap_or("(unlabeled)")
        );
    }

    println!("rejected {}:", rejected.len());
    for reject in &rejected {
        println!("  {:<8} {}", reject.id, reject.reason);
    }

    println!("length histogram (bin width 100):");
    for (start, count) in length_histogram(&kept, 100) {
        println!("  {:>4}-{:<4} {}", start, start + 99, "#".repeat(count));
    }
}
