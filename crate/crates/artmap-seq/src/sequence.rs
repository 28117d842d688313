//! Protein sequence I/O: FASTA parsing and writing, residue validation,
//! stratified dataset splitting, and length statistics.
//!
//! Sequences are plain strings over the 20-letter amino acid alphabet.
//! Anything else (ambiguity codes, gaps, digits) is treated as an outlier
//! and filtered out before feature extraction.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The 20 standard amino acids, in alphabetical order. Feature blocks
/// (composition, digrams) index residues by position in this array.
pub const AMINO_ACIDS: [u8; 20] = *b"ACDEFGHIKLMNPQRSTVWY";

/// Position of a residue in [`AMINO_ACIDS`], or `None` for anything that
/// is not one of the 20 standard one-letter codes.
pub fn residue_index(residue: u8) -> Option<usize> {
    AMINO_ACIDS.iter().position(|&a| a == residue)
}

/// A single protein record: identifier, optional family label, residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProteinSequence {
    pub id: String,
    pub family: Option<String>,
    pub residues: String,
}

impl ProteinSequence {
    pub fn new(id: impl Into<String>, family: Option<&str>, residues: impl Into<String>) -> Self {
        ProteinSequence {
            id: id.into(),
            family: family.map(str::to_string),
            residues: residues.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

/// Result of parsing a FASTA document. `case_folded` counts the records
/// whose body contained lowercase letters before normalization.
#[derive(Clone, Debug, Default)]
pub struct FastaDocument {
    pub sequences: Vec<ProteinSequence>,
    pub case_folded: usize,
}

/// Parses FASTA text.
///
/// Header lines start with `>`; the first whitespace-delimited token is the
/// record id and a token of the form `family=<name>` carries the class
/// label. Body lines are concatenated with all whitespace removed and
/// upper-cased. Sequence data before the first header is an error.
pub fn parse_fasta(input: &str) -> Result<FastaDocument> {
    let mut doc = FastaDocument::default();
    let mut current: Option<ProteinSequence> = None;
    let mut folded = false;

    let finish =
        |current: &mut Option<ProteinSequence>, folded: &mut bool, doc: &mut FastaDocument| {
            if let Some(seq) = current.take() {
                doc.sequences.push(seq);
                if *folded {
                    doc.case_folded += 1;
                }
            }
            *folded = false;
        };

    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        if let Some(header) = line.strip_prefix('>') {
            finish(&mut current, &mut folded, &mut doc);
            let mut tokens = header.split_whitespace();
            let id = tokens.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "header has no id".into(),
            })?;
            let family = tokens
                .filter_map(|t| t.strip_prefix("family="))
                .find(|f| !f.is_empty())
                .map(str::to_string);
            current = Some(ProteinSequence {
                id: id.to_string(),
                family,
                residues: String::new(),
            });
        } else {
            let body: String = line.split_whitespace().collect();
            if body.is_empty() {
                continue;
            }
            let seq = current.as_mut().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "sequence data before first header".into(),
            })?;
            if body.chars().any(|c| c.is_ascii_lowercase()) {
                folded = true;
            }
            seq.residues.push_str(&body.to_ascii_uppercase());
        }
    }
    finish(&mut current, &mut folded, &mut doc);
    Ok(doc)
}

/// Writes records as FASTA, wrapping residues at 60 columns. Parsing the
/// output recovers each record's id and residues exactly.
pub fn write_fasta(sequences: &[ProteinSequence]) -> String {
    let mut out = String::new();
    for seq in sequences {
        out.push('>');
        out.push_str(&seq.id);
        if let Some(family) = &seq.family {
            out.push_str(" family=");
            out.push_str(family);
        }
        out.push('\n');
        let bytes = seq.residues.as_bytes();
        for chunk in bytes.chunks(60) {
            out.push_str(std::str::from_utf8(chunk).expect("residues are ASCII"));
            out.push('\n');
        }
    }
    out
}

/// Why a sequence was rejected by [`remove_outliers`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    /// First character outside the 20-letter alphabet.
    InvalidResidue(char),
    /// No residues at all.
    Empty,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::InvalidResidue(c) => write!(f, "invalid residue {c:?}"),
            RejectReason::Empty => write!(f, "empty sequence"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RejectedSequence {
    pub id: String,
    pub reason: RejectReason,
}

/// Splits records into those drawn entirely from the 20-letter alphabet
/// and those carrying any other character (or no residues). Applying the
/// filter to its own kept set changes nothing.
pub fn remove_outliers(
    sequences: Vec<ProteinSequence>,
) -> (Vec<ProteinSequence>, Vec<RejectedSequence>) {
    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for seq in sequences {
        if seq.residues.is_empty() {
            rejected.push(RejectedSequence {
                id: seq.id,
                reason: RejectReason::Empty,
            });
        } else if let Some(bad) = seq
            .residues
            .chars()
            .find(|&c| !(c.is_ascii() && residue_index(c as u8).is_some()))
        {
            rejected.push(RejectedSequence {
                id: seq.id,
                reason: RejectReason::InvalidResidue(bad),
            });
        } else {
            kept.push(seq);
        }
    }
    (kept, rejected)
}

/// Role a database plays in the experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatabaseRole {
    Train,
    Validation,
    Test,
}

impl fmt::Display for DatabaseRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DatabaseRole::Train => "train",
            DatabaseRole::Validation => "validation",
            DatabaseRole::Test => "test",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for DatabaseRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(DatabaseRole::Train),
            "validation" => Ok(DatabaseRole::Validation),
            "test" => Ok(DatabaseRole::Test),
            other => Err(Error::Config(format!("unknown database role {other:?}"))),
        }
    }
}

/// Declarative description of a stratified split: an ordered list of named
/// databases and, per family, how many sequences go to each database.
#[derive(Clone, Debug)]
pub struct SplitSpec {
    databases: Vec<(String, DatabaseRole)>,
    counts: BTreeMap<String, Vec<usize>>,
    seed: u64,
}

impl SplitSpec {
    /// Validates that counts align with the database list and that the
    /// layout has at least one training database and exactly one
    /// validation and one test database.
    pub fn new(
        databases: Vec<(String, DatabaseRole)>,
        counts: BTreeMap<String, Vec<usize>>,
        seed: u64,
    ) -> Result<Self> {
        if databases.is_empty() {
            return Err(Error::Config("split declares no databases".into()));
        }
        let mut names: Vec<&str> = databases.iter().map(|(n, _)| n.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != databases.len() {
            return Err(Error::Config("duplicate database name in split".into()));
        }
        let trains = databases
            .iter()
            .filter(|(_, r)| *r == DatabaseRole::Train)
            .count();
        let vals = databases
            .iter()
            .filter(|(_, r)| *r == DatabaseRole::Validation)
            .count();
        let tests = databases
            .iter()
            .filter(|(_, r)| *r == DatabaseRole::Test)
            .count();
        if trains == 0 || vals != 1 || tests != 1 {
            return Err(Error::Config(format!(
                "split needs >=1 train, 1 validation and 1 test database; got {trains}/{vals}/{tests}"
            )));
        }
        if counts.is_empty() {
            return Err(Error::Config("split declares no family counts".into()));
        }
        for (family, row) in &counts {
            if row.len() != databases.len() {
                return Err(Error::Config(format!(
                    "family {family:?} declares {} counts for {} databases",
                    row.len(),
                    databases.len()
                )));
            }
        }
        Ok(SplitSpec {
            databases,
            counts,
            seed,
        })
    }

    pub fn databases(&self) -> &[(String, DatabaseRole)] {
        &self.databases
    }

    pub fn counts(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.counts
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// One database of a partition.
#[derive(Clone, Debug)]
pub struct NamedDataset {
    pub name: String,
    pub role: DatabaseRole,
    pub sequences: Vec<ProteinSequence>,
}

/// Output of [`split_datasets`]: training databases in declaration order,
/// one validation set, one test set. The sets are pairwise disjoint.
#[derive(Clone, Debug)]
pub struct DatasetPartition {
    pub train: Vec<NamedDataset>,
    pub validation: NamedDataset,
    pub test: NamedDataset,
}

impl DatasetPartition {
    /// Databases in report row order: training databases, then validation,
    /// then test.
    pub fn all(&self) -> Vec<&NamedDataset> {
        let mut out: Vec<&NamedDataset> = self.train.iter().collect();
        out.push(&self.validation);
        out.push(&self.test);
        out
    }
}

/// Stratified split with a seeded shuffle.
///
/// Each family's sequences are shuffled once (families visited in sorted
/// name order, one ChaCha stream for the whole split) and then sliced into
/// the declared databases in declaration order, so a given seed always
/// produces the identical partition. A family with fewer sequences than
/// its declared total is an error.
pub fn split_datasets(sequences: &[ProteinSequence], spec: &SplitSpec) -> Result<DatasetPartition> {
    let mut by_family: BTreeMap<&str, Vec<&ProteinSequence>> = BTreeMap::new();
    for seq in sequences {
        if let Some(family) = &seq.family {
            by_family.entry(family.as_str()).or_default().push(seq);
        }
    }

    let mut buckets: Vec<Vec<ProteinSequence>> = vec![Vec::new(); spec.databases.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for (family, row) in &spec.counts {
        let mut pool: Vec<&ProteinSequence> =
            by_family.get(family.as_str()).cloned().unwrap_or_default();
        let need: usize = row.iter().sum();
        if pool.len() < need {
            return Err(Error::FamilyShort {
                family: family.clone(),
                missing: need - pool.len(),
            });
        }
        pool.shuffle(&mut rng);
        let mut cursor = 0;
        for (db_idx, &count) in row.iter().enumerate() {
            buckets[db_idx].extend(pool[cursor..cursor + count].iter().map(|s| (*s).clone()));
            cursor += count;
        }
    }

    let mut train = Vec::new();
    let mut validation = None;
    let mut test = None;
    for ((name, role), sequences) in spec.databases.iter().zip(buckets) {
        let db = NamedDataset {
            name: name.clone(),
            role: *role,
            sequences,
        };
        match role {
            DatabaseRole::Train => train.push(db),
            DatabaseRole::Validation => validation = Some(db),
            DatabaseRole::Test => test = Some(db),
        }
    }
    Ok(DatasetPartition {
        train,
        validation: validation.expect("spec validated"),
        test: test.expect("spec validated"),
    })
}

/// Length histogram with bins of `bin_width` aligned at the shortest
/// sequence. Returns `(bin lower bound, count)` for every bin between the
/// minimum and maximum length, including empty bins in between; counts sum
/// to the number of sequences.
pub fn length_histogram(sequences: &[ProteinSequence], bin_width: usize) -> Vec<(usize, usize)> {
    assert!(bin_width >= 1, "bin width must be at least 1");
    if sequences.is_empty() {
        return Vec::new();
    }
    let lens: Vec<usize> = sequences.iter().map(ProteinSequence::len).collect();
    let min = *lens.iter().min().expect("non-empty");
    let max = *lens.iter().max().expect("non-empty");
    let mut counts = vec![0usize; (max - min) / bin_width + 1];
    for len in lens {
        counts[(len - min) / bin_width] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (min + i * bin_width, c))
        .collect()
}

/// Minimal EMBL flat-file conversion: keeps only the `ID` line (first
/// token becomes the record id) and the sequence block between `SQ` and
/// `//`. Everything else is ignored. Output is FASTA without family
/// labels.
pub fn embl_to_fasta(input: &str) -> Result<String> {
    let mut records = Vec::new();
    let mut id: Option<String> = None;
    let mut in_sequence = false;
    let mut residues = String::new();

    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        if line.starts_with("//") {
            let id = id.take().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "record terminator without an ID line".into(),
            })?;
            records.push(ProteinSequence {
                id,
                family: None,
                residues: std::mem::take(&mut residues),
            });
            in_sequence = false;
        } else if let Some(rest) = line.strip_prefix("ID") {
            let token = rest.split_whitespace().next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "ID line has no identifier".into(),
            })?;
            id = Some(token.trim_end_matches(';').to_string());
        } else if line.starts_with("SQ") {
            in_sequence = true;
        } else if in_sequence {
            residues.extend(
                line.chars()
                    .filter(char::is_ascii_alphabetic)
                    .map(|c| c.to_ascii_uppercase()),
            );
        }
    }
    if id.is_some() {
        return Err(Error::Parse {
            line: input.lines().count(),
            message: "unterminated record (missing //)".into(),
        });
    }
    Ok(write_fasta(&records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(id: &str, family: Option<&str>, residues: &str) -> ProteinSequence {
        ProteinSequence::new(id, family, residues)
    }

    #[test]
    fn parse_header_with_family_and_wrapped_body() {
        let doc = parse_fasta(">s1 family=TypeA\nACDE\nFGHI\n").unwrap();
        assert_eq!(doc.sequences.len(), 1);
        assert_eq!(doc.sequences[0], seq("s1", Some("TypeA"), "ACDEFGHI"));
        assert_eq!(doc.case_folded, 0);
    }

    #[test]
    fn parse_uppercases_and_counts_folded_records() {
        let doc = parse_fasta(">s1\nacde\n>s2\nACDE\n").unwrap();
        assert_eq!(doc.sequences[0].residues, "ACDE");
        assert_eq!(doc.sequences[1].residues, "ACDE");
        assert_eq!(doc.case_folded, 1);
    }

    #[test]
    fn parse_strips_interior_whitespace() {
        let doc = parse_fasta(">s1\nAC DE\n\tFG\n").unwrap();
        assert_eq!(doc.sequences[0].residues, "ACDEFG");
    }

    #[test]
    fn parse_rejects_body_before_header() {
        let err = parse_fasta("ACDE\n>s1\nACDE\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_empty_header() {
        assert!(parse_fasta(">\nACDE\n").is_err());
        assert!(parse_fasta(">   \nACDE\n").is_err());
    }

    #[test]
    fn parse_without_family_token() {
        let doc = parse_fasta(">s1 some description\nACDE\n").unwrap();
        assert_eq!(doc.sequences[0].family, None);
    }

    #[test]
    fn parse_skips_blank_lines() {
        let doc = parse_fasta("\n>s1\n\nAC\n\nDE\n\n>s2\nFF\n").unwrap();
        assert_eq!(doc.sequences.len(), 2);
        assert_eq!(doc.sequences[0].residues, "ACDE");
    }

    #[test]
    fn write_then_parse_recovers_records() {
        let records = vec![
            seq(
                "a",
                Some("TypeA"),
                "ACDEFGHIKLMNPQRSTVWY".repeat(4).as_str(),
            ),
            seq("b", None, "AC"),
        ];
        let doc = parse_fasta(&write_fasta(&records)).unwrap();
        assert_eq!(doc.sequences, records);
    }

    #[test]
    fn outliers_reject_first_invalid_char() {
        let (kept, rejected) = remove_outliers(vec![
            seq("ok", None, "ACDE"),
            seq("bad", None, "ACXB"),
            seq("gap", None, "AC-D"),
        ]);
        assert_eq!(kept.len(), 1);
        assert_eq!(
            rejected,
            vec![
                RejectedSequence {
                    id: "bad".into(),
                    reason: RejectReason::InvalidResidue('X'),
                },
                RejectedSequence {
                    id: "gap".into(),
                    reason: RejectReason::InvalidResidue('-'),
                },
            ]
        );
    }

    #[test]
    fn outliers_reject_empty_and_are_idempotent() {
        let (kept, rejected) = remove_outliers(vec![seq("e", None, ""), seq("ok", None, "WY")]);
        assert_eq!(rejected[0].reason, RejectReason::Empty);
        let (kept2, rejected2) = remove_outliers(kept.clone());
        assert_eq!(kept2, kept);
        assert!(rejected2.is_empty());
    }

    #[test]
    fn ambiguity_codes_are_outliers() {
        // B, J, O, U, X, Z are not standard residues.
        for code in ['B', 'J', 'O', 'U', 'X', 'Z'] {
            let (kept, rejected) = remove_outliers(vec![seq("s", None, &format!("AC{code}"))]);
            assert!(kept.is_empty(), "{code} should be rejected");
            assert_eq!(rejected[0].reason, RejectReason::InvalidResidue(code));
        }
    }

    #[test]
    fn histogram_bins_align_at_minimum_length() {
        let seqs: Vec<ProteinSequence> = [350, 351, 349]
            .iter()
            .map(|&n| seq("s", None, &"A".repeat(n)))
            .collect();
        assert_eq!(length_histogram(&seqs, 50), vec![(349, 3)]);
    }

    #[test]
    fn histogram_separates_distant_lengths() {
        let seqs: Vec<ProteinSequence> = [10, 60]
            .iter()
            .map(|&n| seq("s", None, &"A".repeat(n)))
            .collect();
        assert_eq!(length_histogram(&seqs, 50), vec![(10, 1), (60, 1)]);
    }

    #[test]
    fn histogram_of_nothing_is_empty() {
        assert!(length_histogram(&[], 50).is_empty());
    }

    fn family_block(family: &str, n: usize) -> Vec<ProteinSequence> {
        (0..n)
            .map(|i| seq(&format!("{family}-{i}"), Some(family), "ACDEFGHIKL"))
            .collect()
    }

    fn three_way_spec(seed: u64, counts: &[(&str, [usize; 3])]) -> SplitSpec {
        let databases = vec![
            ("d1".to_string(), DatabaseRole::Train),
            ("dv".to_string(), DatabaseRole::Validation),
            ("dt".to_string(), DatabaseRole::Test),
        ];
        let counts = counts
            .iter()
            .map(|(f, row)| (f.to_string(), row.to_vec()))
            .collect();
        SplitSpec::new(databases, counts, seed).unwrap()
    }

    #[test]
    fn split_produces_requested_disjoint_sizes() {
        let mut seqs = family_block("fa", 10);
        seqs.extend(family_block("fb", 10));
        let spec = three_way_spec(7, &[("fa", [6, 2, 2]), ("fb", [5, 3, 2])]);
        let part = split_datasets(&seqs, &spec).unwrap();
        assert_eq!(part.train[0].sequences.len(), 11);
        assert_eq!(part.validation.sequences.len(), 5);
        assert_eq!(part.test.sequences.len(), 4);

        let mut ids: Vec<&str> = part
            .all()
            .iter()
            .flat_map(|db| db.sequences.iter().map(|s| s.id.as_str()))
            .collect();
        ids.sort_unstable();
        let before = ids.len();
        ids.dedup();
        assert_eq!(ids.len(), before, "partition sets must be disjoint");
    }

    #[test]
    fn split_is_deterministic_for_a_seed() {
        let seqs = family_block("fa", 20);
        let spec = three_way_spec(42, &[("fa", [10, 5, 5])]);
        let a = split_datasets(&seqs, &spec).unwrap();
        let b = split_datasets(&seqs, &spec).unwrap();
        for (da, db) in a.all().iter().zip(b.all().iter()) {
            assert_eq!(da.sequences, db.sequences);
        }
        let other = three_way_spec(43, &[("fa", [10, 5, 5])]);
        let c = split_datasets(&seqs, &other).unwrap();
        let same = a.train[0].sequences == c.train[0].sequences;
        assert!(!same, "different seeds should reorder the allocation");
    }

    #[test]
    fn split_reports_family_shortfall() {
        let seqs = family_block("fa", 3);
        let spec = three_way_spec(1, &[("fa", [2, 1, 1])]);
        match split_datasets(&seqs, &spec).unwrap_err() {
            Error::FamilyShort { family, missing } => {
                assert_eq!(family, "fa");
                assert_eq!(missing, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn split_spec_validates_layout() {
        let counts: BTreeMap<String, Vec<usize>> = [("fa".to_string(), vec![1, 1])].into();
        let no_test = SplitSpec::new(
            vec![
                ("d1".to_string(), DatabaseRole::Train),
                ("dv".to_string(), DatabaseRole::Validation),
            ],
            counts.clone(),
            0,
        );
        assert!(no_test.is_err());

        let misaligned = SplitSpec::new(
            vec![
                ("d1".to_string(), DatabaseRole::Train),
                ("dv".to_string(), DatabaseRole::Validation),
                ("dt".to_string(), DatabaseRole::Test),
            ],
            counts,
            0,
        );
        assert!(misaligned.is_err());
    }

    #[test]
    fn embl_conversion_keeps_id_and_sequence() {
        let embl = "ID   P12345; SV 1; linear; protein\nAC   P12345;\nDE   Example\nSQ   Sequence 8 AA;\n     ACDEFGHI                                                      8\n//\n";
        let fasta = embl_to_fasta(embl).unwrap();
        let doc = parse_fasta(&fasta).unwrap();
        assert_eq!(doc.sequences, vec![seq("P12345", None, "ACDEFGHI")]);
    }

    #[test]
    fn embl_rejects_unterminated_record() {
        assert!(embl_to_fasta("ID   X;\nSQ   Sequence\n     ACDE\n").is_err());
    }

    proptest! {
        #[test]
        fn roundtrip_preserves_id_and_residues(
            id in "[A-Za-z][A-Za-z0-9_.-]{0,11}",
            family in proptest::option::of("[A-Za-z][A-Za-z0-9_]{0,7}"),
            residues in proptest::collection::vec(0usize..20, 1..200),
        ) {
            let residues: String = residues
                .into_iter()
                .map(|i| AMINO_ACIDS[i] as char)
                .collect();
            let record = ProteinSequence::new(&id, family.as_deref(), residues);
            let doc = parse_fasta(&write_fasta(std::slice::from_ref(&record))).unwrap();
            prop_assert_eq!(&doc.sequences[0], &record);
        }

        #[test]
        fn histogram_counts_sum_to_sequence_count(
            lens in proptest::collection::vec(1usize..500, 0..40),
            width in 1usize..120,
        ) {
            let seqs: Vec<ProteinSequence> = lens
                .iter()
                .map(|&n| ProteinSequence::new("s", None, "A".repeat(n)))
                .collect();
            let hist = length_histogram(&seqs, width);
            let total: usize = hist.iter().map(|(_, c)| c).sum();
            prop_assert_eq!(total, seqs.len());
        }
    }
}
