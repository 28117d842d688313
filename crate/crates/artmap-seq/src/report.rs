//! Rendering of every file artifact: feature CSVs, ranked reports, GA
//! logs, evaluation matrices, classification tables, and corpus stats.
//!
//! Every artifact begins with a `# artmap-seq <kind> v1` schema header
//! line, and every renderer is deterministic: equal inputs produce
//! byte-identical text.

use std::collections::BTreeMap;

use crate::ensemble::{EvaluationColumn, EvaluationEntry, IncrementReport, Prediction, RankingRow};
use crate::error::{Error, Result};
use crate::features::RawFeatureVector;
use crate::ga::{Candidate, GaResult};
use crate::sequence::{length_histogram, DatabaseRole, ProteinSequence, RejectedSequence};

/// First line of every report artifact.
pub fn schema_header(kind: &str) -> String {
    format!("# artmap-seq {kind} v1\n")
}

/// Column names of the feature layout: residue compositions, hydropathy
/// class compositions, class transmissions, class distribution
/// checkpoints, then the 400 digrams.
pub fn feature_names() -> Vec<String> {
    let residues = crate::sequence::AMINO_ACIDS;
    let classes = ["H", "N", "P"];
    let mut names = Vec::with_capacity(crate::features::FEATURE_COUNT);
    for r in residues {
        names.push(format!("c_{}", r as char));
    }
    for c in classes {
        names.push(format!("hc_{c}"));
    }
    for pair in ["PN", "NH", "PH"] {
        names.push(format!("ht_{pair}"));
    }
    for checkpoint in [25, 50, 75, 100] {
        for c in classes {
            names.push(format!("hd{checkpoint}_{c}"));
        }
    }
    for a in residues {
        for b in residues {
            names.push(format!("dg_{}{}", a as char, b as char));
        }
    }
    names
}

/// CSV of raw feature vectors: `id,family,<438 feature columns>`.
pub fn render_vectors(
    sequences: &[ProteinSequence],
    vectors: &[RawFeatureVector],
) -> Result<String> {
    if sequences.len() != vectors.len() {
        return Err(Error::DimensionMismatch {
            expected: sequences.len(),
            actual: vectors.len(),
        });
    }
    let mut out = schema_header("vectors");
    out.push_str("id,family,");
    out.push_str(&feature_names().join(","));
    out.push('\n');
    for (seq, vector) in sequences.iter().zip(vectors) {
        out.push_str(&seq.id);
        out.push(',');
        out.push_str(seq.family.as_deref().unwrap_or(""));
        for value in vector.as_slice() {
            out.push(',');
            out.push_str(&value.to_string());
        }
        out.push('\n');
    }
    Ok(out)
}

/// TSV of sequences the outlier filter removed.
pub fn render_rejects(rejected: &[RejectedSequence]) -> String {
    let mut out = schema_header("rejects");
    out.push_str("id\treason\n");
    for r in rejected {
        out.push_str(&format!("{}\t{}\n", r.id, r.reason));
    }
    out
}

/// TSV of the ranked population cut: rank, population index, validation
/// error, kappa against the elite, and the classifier's ensemble role.
pub fn render_ranking(rows: &[RankingRow]) -> String {
    let mut out = schema_header("ranking");
    out.push_str("rank\tclassifier\tval_error_pct\tkappa\trole\n");
    for row in rows {
        let kappa = row
            .kappa
            .map(|k| format!("{k:.4}"))
            .unwrap_or_else(|| "-".into());
        let role = if row.rank == 1 {
            "elite"
        } else if row.selected {
            "selected"
        } else {
            ""
        };
        out.push_str(&format!(
            "{}\t{}\t{:.4}\t{}\t{}\n",
            row.rank, row.population_index, row.validation_error_pct, kappa, role
        ));
    }
    out
}

/// TSV trace of the genetic search; genes are reported as rank numbers.
pub fn render_ga_log(result: &GaResult, candidates: &[Candidate]) -> String {
    let mut out = schema_header("ga-log");
    out.push_str("generation\tbest_fitness\tselected_ranks\n");
    for record in &result.history {
        let ranks: Vec<String> = record
            .best
            .genes()
            .iter()
            .map(|&g| candidates[g].index.to_string())
            .collect();
        out.push_str(&format!(
            "{}\t{:.6}\t{}\n",
            record.generation,
            record.best_fitness,
            ranks.join(",")
        ));
    }
    out
}

fn render_cell(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.2}"),
        None => "-".into(),
    }
}

/// TSV matrix with one row per database and one column per stage.
/// All columns must describe the same database list.
pub fn render_matrix(columns: &[EvaluationColumn]) -> Result<String> {
    let first = columns
        .first()
        .ok_or(Error::EmptyInput("evaluation columns"))?;
    for column in &columns[1..] {
        let same = column.entries.len() == first.entries.len()
            && column
                .entries
                .iter()
                .zip(&first.entries)
                .all(|(a, b)| a.database == b.database && a.role == b.role);
        if !same {
            return Err(Error::Config(format!(
                "stage {:?} covers a different database list than {:?}",
                column.stage, first.stage
            )));
        }
    }

    let mut out = schema_header("evaluation");
    out.push_str("database\trole");
    for column in columns {
        out.push('\t');
        out.push_str(&column.stage);
    }
    out.push('\n');
    for (i, entry) in first.entries.iter().enumerate() {
        out.push_str(&format!("{}\t{}", entry.database, entry.role));
        for column in columns {
            out.push('\t');
            out.push_str(&render_cell(column.entries[i].error_pct));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parses a matrix previously produced by [`render_matrix`], so a later
/// stage can be appended to an existing report.
pub fn parse_matrix(text: &str) -> Result<Vec<EvaluationColumn>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::EmptyInput("evaluation matrix"))?;
    if header.trim_end() != schema_header("evaluation").trim_end() {
        return Err(Error::Parse {
            line: 1,
            message: "not an evaluation matrix (bad schema header)".into(),
        });
    }
    let (_, columns_line) = lines.next().ok_or(Error::Parse {
        line: 2,
        message: "missing column header".into(),
    })?;
    let fields: Vec<&str> = columns_line.split('\t').collect();
    if fields.len() < 3 || fields[0] != "database" || fields[1] != "role" {
        return Err(Error::Parse {
            line: 2,
            message: "column header must be database, role, stages...".into(),
        });
    }
    let stages: Vec<String> = fields[2..].iter().map(|s| s.to_string()).collect();

    let mut columns: Vec<EvaluationColumn> = stages
        .iter()
        .map(|stage| EvaluationColumn {
            stage: stage.clone(),
            entries: Vec::new(),
        })
        .collect();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != stages.len() + 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} cells, found {}", stages.len() + 2, cells.len()),
            });
        }
        let role: DatabaseRole = cells[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("unknown role {:?}", cells[1]),
        })?;
        for (column, cell) in columns.iter_mut().zip(&cells[2..]) {
            let error_pct = if *cell == "-" {
                None
            } else {
                Some(cell.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad error value {cell:?}"),
                })?)
            };
            column.entries.push(EvaluationEntry {
                database: cells[0].to_string(),
                role,
                error_pct,
            });
        }
    }
    Ok(columns)
}

/// TSV of per-sequence predictions: the fused label plus all 5 votes,
/// elite's first. Rejected sequences are listed as trailing comments.
pub fn render_classifications(
    rows: &[(String, Prediction)],
    rejected: &[RejectedSequence],
) -> String {
    let mut out = schema_header("classifications");
    out.push_str("id\tpredicted\tvote_elite\tvote_1\tvote_2\tvote_3\tvote_4\n");
    for (id, prediction) in rows {
        out.push_str(id);
        out.push('\t');
        out.push_str(&prediction.label);
        for vote in &prediction.votes {
            out.push('\t');
            out.push_str(vote);
        }
        out.push('\n');
    }
    for r in rejected {
        out.push_str(&format!("# rejected\t{}\t{}\n", r.id, r.reason));
    }
    out
}

/// TSV report of one incremental update: per-voter category growth,
/// followed by a retention block when reference databases were supplied.
pub fn render_increment(report: &IncrementReport, retention: Option<&[(String, f64)]>) -> String {
    let mut out = schema_header("increment");
    out.push_str(&format!("database\t{}\n", report.database));
    out.push_str(&format!("patterns\t{}\n", report.patterns));
    let new_labels = if report.new_labels.is_empty() {
        "-".to_string()
    } else {
        report.new_labels.join(",")
    };
    out.push_str(&format!("new_families\t{new_labels}\n"));
    out.push('\n');
    out.push_str("voter\tclassifier\tnew_categories\tepochs\tconverged\n");
    for m in &report.models {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            m.voter, m.population_index, m.new_categories, m.epochs, m.converged
        ));
    }
    out.push('\n');
    match retention {
        Some(rows) => {
            out.push_str("# retention: error on previously trained databases\n");
            out.push_str("database\terror_pct\n");
            for (database, error_pct) in rows {
                out.push_str(&format!("{database}\t{error_pct:.2}\n"));
            }
        }
        None => out.push_str("# retention: skipped (no reference databases supplied)\n"),
    }
    out
}

/// Corpus-level summary the `stats` command prints.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusStats {
    pub sequences: usize,
    pub families: Vec<(String, usize)>,
    pub unlabeled: usize,
    pub rejected: usize,
    pub case_folded: usize,
    pub length_min: usize,
    pub length_max: usize,
    pub length_mean: f64,
    pub histogram: Vec<(usize, usize)>,
}

impl CorpusStats {
    pub fn compute(
        kept: &[ProteinSequence],
        rejected: &[RejectedSequence],
        case_folded: usize,
        bin_width: usize,
    ) -> CorpusStats {
        let mut families: BTreeMap<&str, usize> = BTreeMap::new();
        let mut unlabeled = 0usize;
        for seq in kept {
            match seq.family.as_deref() {
                Some(family) => *families.entry(family).or_default() += 1,
                None => unlabeled += 1,
            }
        }
        let lengths: Vec<usize> = kept.iter().map(|s| s.residues.len()).collect();
        let total: usize = lengths.iter().sum();
        CorpusStats {
            sequences: kept.len(),
            families: families
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            unlabeled,
            rejected: rejected.len(),
            case_folded,
            length_min: lengths.iter().copied().min().unwrap_or(0),
            length_max: lengths.iter().copied().max().unwrap_or(0),
            length_mean: if kept.is_empty() {
                0.0
            } else {
                total as f64 / kept.len() as f64
            },
            histogram: length_histogram(kept, bin_width),
        }
    }
}

/// Renders [`CorpusStats`] as sectioned TSV.
pub fn render_stats(stats: &CorpusStats) -> String {
    let mut out = schema_header("stats");
    out.push_str(&format!("sequences\t{}\n", stats.sequences));
    out.push_str(&format!("families\t{}\n", stats.families.len()));
    out.push_str(&format!("unlabeled\t{}\n", stats.unlabeled));
    out.push_str(&format!("rejected\t{}\n", stats.rejected));
    out.push_str(&format!("case_folded\t{}\n", stats.case_folded));
    out.push_str(&format!("length_min\t{}\n", stats.length_min));
    out.push_str(&format!("length_mean\t{:.1}\n", stats.length_mean));
    out.push_str(&format!("length_max\t{}\n", stats.length_max));
    out.push('\n');
    out.push_str("family\tcount\n");
    for (family, count) in &stats.families {
        out.push_str(&format!("{family}\t{count}\n"));
    }
    out.push('\n');
    out.push_str("length_bin\tcount\n");
    for (start, count) in &stats.histogram {
        out.push_str(&format!("{start}\t{count}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{vectorize, HydropathyTable};
    use crate::sequence::RejectReason;

    fn seq(id: &str, family: Option<&str>, residues: &str) -> ProteinSequence {
        ProteinSequence {
            id: id.into(),
            family: family.map(str::to_string),
            residues: residues.into(),
        }
    }

    #[test]
    fn feature_names_cover_the_layout() {
        let names = feature_names();
        assert_eq!(names.len(), crate::features::FEATURE_COUNT);
        assert_eq!(names[0], "c_A");
        assert_eq!(names[19], "c_Y");
        assert_eq!(names[20], "hc_H");
        assert_eq!(names[23], "ht_PN");
        assert_eq!(names[26], "hd25_H");
        assert_eq!(names[37], "hd100_P");
        assert_eq!(names[38], "dg_AA");
        assert_eq!(names[437], "dg_YY");
    }

    #[test]
    fn vectors_csv_has_schema_header_and_440_columns() {
        let table = HydropathyTable::default();
        let seqs = vec![seq("s1", Some("a"), "ACDEF"), seq("s2", None, "GHIKL")];
        let vectors: Vec<_> = seqs
            .iter()
            .map(|s| vectorize(&s.residues, &table))
            .collect();
        let text = render_vectors(&seqs, &vectors).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# artmap-seq vectors v1");
        let header = lines.next().unwrap();
        assert_eq!(header.split(',').count(), 440);
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), 440);
        assert!(row.starts_with("s1,a,"));
        assert!(lines.next().unwrap().starts_with("s2,,"));

        assert!(render_vectors(&seqs, &vectors[..1]).is_err());
    }

    #[test]
    fn ranking_report_marks_elite_and_selected() {
        let rows = vec![
            RankingRow {
                rank: 1,
                population_index: 7,
                validation_error_pct: 27.0833,
                kappa: None,
                selected: true,
            },
            RankingRow {
                rank: 2,
                population_index: 3,
                validation_error_pct: 29.1667,
                kappa: Some(0.894),
                selected: true,
            },
            RankingRow {
                rank: 3,
                population_index: 12,
                validation_error_pct: 29.1667,
                kappa: Some(0.973),
                selected: false,
            },
        ];
        let text = render_ranking(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# artmap-seq ranking v1");
        assert_eq!(lines[2], "1\t7\t27.0833\t-\telite");
        assert_eq!(lines[3], "2\t3\t29.1667\t0.8940\tselected");
        assert_eq!(lines[4], "3\t12\t29.1667\t0.9730\t");
    }

    #[test]
    fn matrix_roundtrips_through_parse() {
        let columns = vec![
            EvaluationColumn {
                stage: "initial".into(),
                entries: vec![
                    EvaluationEntry {
                        database: "d1".into(),
                        role: DatabaseRole::Train,
                        error_pct: Some(0.0),
                    },
                    EvaluationEntry {
                        database: "d2".into(),
                        role: DatabaseRole::Train,
                        error_pct: None,
                    },
                    EvaluationEntry {
                        database: "dt".into(),
                        role: DatabaseRole::Test,
                        error_pct: Some(22.79),
                    },
                ],
            },
            EvaluationColumn {
                stage: "after d2".into(),
                entries: vec![
                    EvaluationEntry {
                        database: "d1".into(),
                        role: DatabaseRole::Train,
                        error_pct: Some(0.0),
                    },
                    EvaluationEntry {
                        database: "d2".into(),
                        role: DatabaseRole::Train,
                        error_pct: Some(0.0),
                    },
                    EvaluationEntry {
                        database: "dt".into(),
                        role: DatabaseRole::Test,
                        error_pct: Some(18.65),
                    },
                ],
            },
        ];
        let text = render_matrix(&columns).unwrap();
        assert!(text.starts_with("# artmap-seq evaluation v1\n"));
        assert!(text.contains("d2\ttrain\t-\t0.00\n"));

        let parsed = parse_matrix(&text).unwrap();
        assert_eq!(render_matrix(&parsed).unwrap(), text);

        // A column over a different database list is refused.
        let mut bad = columns.clone();
        bad[1].entries[0].database = "dx".into();
        assert!(render_matrix(&bad).is_err());
    }

    #[test]
    fn parse_matrix_rejects_foreign_text() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("# something else\n").is_err());
        assert!(parse_matrix("# artmap-seq evaluation v1\nwrong\theader\n").is_err());
        let bad_cell = "# artmap-seq evaluation v1\ndatabase\trole\ts1\nd1\ttrain\tnope\n";
        assert!(parse_matrix(bad_cell).is_err());
    }

    #[test]
    fn classification_report_lists_rejects_as_comments() {
        let rows = vec![(
            "s1".to_string(),
            Prediction {
                label: "a".into(),
                votes: vec!["a".into(), "a".into(), "b".into(), "a".into(), "a".into()],
            },
        )];
        let rejected = vec![RejectedSequence {
            id: "s2".into(),
            reason: RejectReason::InvalidResidue('Z'),
        }];
        let text = render_classifications(&rows, &rejected);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[2], "s1\ta\ta\ta\tb\ta\ta");
        assert!(lines[3].starts_with("# rejected\ts2\t"));
    }

    #[test]
    fn stats_report_covers_families_and_lengths() {
        let kept = vec![
            seq("a1", Some("a"), "ACDEFGHIKL"),
            seq("a2", Some("a"), "ACDEFGHIKLMN"),
            seq("b1", Some("b"), "MNPQRSTVWY"),
        ];
        let stats = CorpusStats::compute(&kept, &[], 1, 50);
        assert_eq!(stats.sequences, 3);
        assert_eq!(
            stats.families,
            vec![("a".to_string(), 2), ("b".to_string(), 1)]
        );
        assert_eq!(stats.length_min, 10);
        assert_eq!(stats.length_max, 12);
        assert!((stats.length_mean - 32.0 / 3.0).abs() < 1e-9);
        assert_eq!(stats.histogram, vec![(10, 3)]);

        let text = render_stats(&stats);
        assert!(text.starts_with("# artmap-seq stats v1\n"));
        assert!(text.contains("case_folded\t1\n"));
        assert!(text.contains("a\t2\n"));

        let empty = CorpusStats::compute(&[], &[], 0, 50);
        assert_eq!(empty.length_mean, 0.0);
        assert!(empty.histogram.is_empty());
    }
}
