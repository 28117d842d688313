//! Command-line workflows: each subcommand reads files, drives the
//! library, and writes reports. Commands are deterministic under a fixed
//! config and seed, and exit nonzero unless every requested output was
//! written.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::ensemble::{build_ensemble, Ensemble};
use crate::error::{Error, Result};
use crate::features::{vectorize, HydropathyTable};
use crate::report;
use crate::sequence::{
    parse_fasta, remove_outliers, split_datasets, write_fasta, DatabaseRole, DatasetPartition,
    NamedDataset, ProteinSequence, RejectedSequence,
};
use crate::synth::Synthesizer;

#[derive(Parser)]
#[command(
    name = "artmap-seq",
    version,
    about = "Classify protein sequences with incrementally trained ensembles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Convert a FASTA file into raw feature vectors (CSV)
    Vectorize {
        /// FASTA input, optionally carrying family= labels
        #[arg(long)]
        input: PathBuf,
        /// Output CSV; a `.rejects.tsv` report is written alongside
        #[arg(long)]
        output: PathBuf,
        /// Residue-class table (built-in grouping when omitted)
        #[arg(long)]
        hydropathy: Option<PathBuf>,
    },
    /// Build an ensemble bundle from an experiment config
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Seed for population permutations and the genetic search
        #[arg(long)]
        seed: u64,
        /// Override the configured output directory
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Absorb a new database into an existing bundle
    Increment {
        /// Ensemble bundle to update
        #[arg(long)]
        model: PathBuf,
        /// FASTA with the new training data
        #[arg(long)]
        data: PathBuf,
        /// Seed for the per-voter data permutations
        #[arg(long)]
        seed: u64,
        /// Epoch cap for the incremental pass
        #[arg(long, default_value_t = 100)]
        epochs: usize,
        /// Database name recorded in provenance (default: data file stem)
        #[arg(long)]
        database: Option<String>,
        /// Where to write the updated bundle (default: overwrite --model)
        #[arg(long)]
        output: Option<PathBuf>,
        /// Partition manifest enabling retention checks
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Report path (default: `<bundle>.increment.tsv`)
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Classify sequences with a trained bundle
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Output TSV (stdout when omitted)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a bundle over a partition, adding a stage column
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        /// Partition manifest written by `train`
        #[arg(long)]
        partition: PathBuf,
        /// Stage label for the matrix column
        #[arg(long)]
        stage: String,
        /// Matrix file to create or append to (stdout when omitted)
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Summarize a FASTA corpus
    Stats {
        #[arg(long)]
        input: PathBuf,
        /// Length histogram bin width
        #[arg(long, default_value_t = 50)]
        bin_width: usize,
        /// Output path (stdout when omitted)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a synthetic labeled corpus
    Synth {
        /// Number of families (named fam-01, fam-02, ...)
        #[arg(long, default_value_t = 8)]
        families: usize,
        /// Sequences per family
        #[arg(long, default_value_t = 30)]
        count: usize,
        /// Family separation in [0, 1]
        #[arg(long, default_value_t = 0.85)]
        separation: f64,
        #[arg(long, default_value_t = 40)]
        min_len: usize,
        #[arg(long, default_value_t = 120)]
        max_len: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Vectorize {
            input,
            output,
            hydropathy,
        } => cmd_vectorize(&input, &output, hydropathy.as_deref()),
        Command::Train {
            config,
            seed,
            output,
        } => cmd_train(&config, seed, output.as_deref()),
        Command::Increment {
            model,
            data,
            seed,
            epochs,
            database,
            output,
            partition,
            report,
        } => cmd_increment(IncrementArgs {
            model,
            data,
            seed,
            epochs,
            database,
            output,
            partition,
            report,
        }),
        Command::Classify {
            model,
            input,
            output,
        } => cmd_classify(&model, &input, output.as_deref()),
        Command::Evaluate {
            model,
            partition,
            stage,
            matrix,
        } => cmd_evaluate(&model, &partition, &stage, matrix.as_deref()),
        Command::Stats {
            input,
            bin_width,
            output,
        } => cmd_stats(&input, bin_width, output.as_deref()),
        Command::Synth {
            families,
            count,
            separation,
            min_len,
            max_len,
            seed,
            output,
        } => cmd_synth(
            families,
            count,
            separation,
            min_len..=max_len,
            seed,
            &output,
        ),
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn load_table(path: Option<&Path>) -> Result<HydropathyTable> {
    match path {
        Some(path) => HydropathyTable::from_text(&read_file(path)?),
        None => Ok(HydropathyTable::default()),
    }
}

fn load_bundle(path: &Path) -> Result<Ensemble> {
    Ensemble::from_json(&read_file(path)?)
}

/// Parses and filters a FASTA file; returns kept sequences, rejected
/// ones, and the count of case-folded records.
fn load_filtered(path: &Path) -> Result<(Vec<ProteinSequence>, Vec<RejectedSequence>, usize)> {
    let doc = parse_fasta(&read_file(path)?)?;
    let case_folded = doc.case_folded;
    let (kept, rejected) = remove_outliers(doc.sequences);
    Ok((kept, rejected, case_folded))
}

fn rejects_path(output: &Path) -> PathBuf {
    output.with_extension("rejects.tsv")
}

pub fn cmd_vectorize(input: &Path, output: &Path, hydropathy: Option<&Path>) -> Result<()> {
    let table = load_table(hydropathy)?;
    let (kept, rejected, _) = load_filtered(input)?;
    if kept.is_empty() {
        eprintln!("warning: {} contains no usable sequences", input.display());
    }
    let vectors: Vec<_> = kept
        .iter()
        .map(|s| vectorize(&s.residues, &table))
        .collect();
    write_file(output, &report::render_vectors(&kept, &vectors)?)?;
    let rejects = rejects_path(output);
    write_file(&rejects, &report::render_rejects(&rejected))?;
    println!(
        "wrote {} vectors to {} ({} rejected, see {})",
        kept.len(),
        output.display(),
        rejected.len(),
        rejects.display()
    );
    Ok(())
}

const MANIFEST_NAME: &str = "manifest.tsv";

fn write_partition(dir: &Path, partition: &DatasetPartition) -> Result<()> {
    let mut manifest = report::schema_header("partition");
    manifest.push_str("database\trole\tfile\tsequences\n");
    for dataset in partition.all() {
        let file = format!("{}.fasta", dataset.name);
        manifest.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            dataset.name,
            dataset.role,
            file,
            dataset.sequences.len()
        ));
        write_file(&dir.join(&file), &write_fasta(&dataset.sequences))?;
    }
    write_file(&dir.join(MANIFEST_NAME), &manifest)
}

/// Reads back a partition written by [`cmd_train`].
pub fn read_partition(manifest: &Path) -> Result<DatasetPartition> {
    let text = read_file(manifest)?;
    let dir = manifest.parent().unwrap_or_else(|| Path::new("."));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == report::schema_header("partition").trim_end() => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "not a partition manifest (bad schema header)".into(),
            })
        }
    }
    lines.next(); // column header

    let mut train = Vec::new();
    let mut validation = None;
    let mut test = None;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != 4 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 4 cells, found {}", cells.len()),
            });
        }
        let role: DatabaseRole = cells[1].parse()?;
        let doc = parse_fasta(&read_file(&dir.join(cells[2]))?)?;
        let dataset = NamedDataset {
            name: cells[0].to_string(),
            role,
            sequences: doc.sequences,
        };
        match role {
            DatabaseRole::Train => train.push(dataset),
            DatabaseRole::Validation => validation = Some(dataset),
            DatabaseRole::Test => test = Some(dataset),
        }
    }
    match (train.is_empty(), validation, test) {
        (false, Some(validation), Some(test)) => Ok(DatasetPartition {
            train,
            validation,
            test,
        }),
        _ => Err(Error::Config(format!(
            "partition manifest {} lacks a train/validation/test trio",
            manifest.display()
        ))),
    }
}

pub fn cmd_train(config: &Path, seed: u64, output: Option<&Path>) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let out_dir = output.unwrap_or(&cfg.output.dir).to_path_buf();
    let table = cfg.hydropathy()?;

    let (kept, rejected, _) = load_filtered(&cfg.input.fasta)?;
    write_file(
        &out_dir.join("rejects.tsv"),
        &report::render_rejects(&rejected),
    )?;

    let spec = cfg.split_spec()?;
    let partition = split_datasets(&kept, &spec)?;
    write_partition(&out_dir.join("partition"), &partition)?;

    let mut pipeline = cfg.pipeline_config(seed);
    if pipeline.candidate_pool > pipeline.population {
        eprintln!(
            "warning: candidate pool {} exceeds population {}; shrinking to match",
            pipeline.candidate_pool, pipeline.population
        );
        pipeline.candidate_pool = pipeline.population;
    }
    let first = &partition.train[0];
    let outcome = build_ensemble(
        &first.sequences,
        &partition.validation.sequences,
        &table,
        &pipeline,
        &first.name,
    )?;

    write_file(&out_dir.join("bundle.json"), &outcome.ensemble.to_json())?;
    write_file(
        &out_dir.join("ranking.tsv"),
        &report::render_ranking(&outcome.ranking),
    )?;
    write_file(
        &out_dir.join("ga_log.tsv"),
        &report::render_ga_log(&outcome.ga, &outcome.candidates),
    )?;
    let column = outcome.ensemble.evaluate_partition(&partition, "initial")?;
    write_file(
        &out_dir.join("matrix.tsv"),
        &report::render_matrix(&[column])?,
    )?;

    let provenance = &outcome.ensemble.provenance;
    println!(
        "trained on {} ({} patterns): elite classifier {}, members {:?}",
        first.name,
        first.sequences.len(),
        provenance.elite_population_index,
        provenance.member_population_indices
    );
    println!(
        "best fitness {:.6}; bundle and reports in {}",
        outcome.ga.best_fitness,
        out_dir.display()
    );
    Ok(())
}

struct IncrementArgs {
    model: PathBuf,
    data: PathBuf,
    seed: u64,
    epochs: usize,
    database: Option<String>,
    output: Option<PathBuf>,
    partition: Option<PathBuf>,
    report: Option<PathBuf>,
}

fn cmd_increment(args: IncrementArgs) -> Result<()> {
    let mut ensemble = load_bundle(&args.model)?;
    let (kept, rejected, _) = load_filtered(&args.data)?;
    if !rejected.is_empty() {
        eprintln!(
            "warning: {} sequences rejected by the alphabet filter",
            rejected.len()
        );
    }
    let database = match args.database {
        Some(name) => name,
        None => args
            .data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| Error::Config("cannot derive a database name from --data".into()))?,
    };

    let trained_before = ensemble.provenance.trained_databases.clone();
    let increment = ensemble.increment(&database, &kept, args.seed, args.epochs)?;

    // Retention: re-score every database absorbed before this call.
    let retention = match &args.partition {
        Some(manifest) => {
            let partition = read_partition(manifest)?;
            let mut rows = Vec::new();
            for dataset in partition.all() {
                if trained_before.contains(&dataset.name) {
                    let set = crate::ensemble::prepare(
                        &dataset.sequences,
                        &ensemble.hydropathy,
                        &ensemble.normalizer,
                    )?;
                    if let Some(err) = ensemble.error_rate(&set)? {
                        rows.push((dataset.name.clone(), err * 100.0));
                    }
                }
            }
            Some(rows)
        }
        None => None,
    };

    let bundle_path = args.output.as_deref().unwrap_or(&args.model);
    write_file(bundle_path, &ensemble.to_json())?;
    let report_path = args
        .report
        .unwrap_or_else(|| bundle_path.with_extension("increment.tsv"));
    write_file(
        &report_path,
        &report::render_increment(&increment, retention.as_deref()),
    )?;

    let growth: Vec<usize> = increment.models.iter().map(|m| m.new_categories).collect();
    println!(
        "absorbed {} ({} patterns, {} new families); categories grew by {:?}",
        database,
        increment.patterns,
        increment.new_labels.len(),
        growth
    );
    println!(
        "bundle {} updated; report in {}",
        bundle_path.display(),
        report_path.display()
    );
    Ok(())
}

pub fn cmd_classify(model: &Path, input: &Path, output: Option<&Path>) -> Result<()> {
    let ensemble = load_bundle(model)?;
    let (kept, rejected, _) = load_filtered(input)?;
    let mut rows = Vec::with_capacity(kept.len());
    for seq in &kept {
        rows.push((seq.id.clone(), ensemble.classify(&seq.residues)?));
    }
    let text = report::render_classifications(&rows, &rejected);
    match output {
        Some(path) => {
            write_file(path, &text)?;
            println!(
                "classified {} sequences ({} rejected) into {}",
                rows.len(),
                rejected.len(),
                path.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn cmd_evaluate(
    model: &Path,
    partition: &Path,
    stage: &str,
    matrix: Option<&Path>,
) -> Result<()> {
    let ensemble = load_bundle(model)?;
    let partition = read_partition(partition)?;
    let column = ensemble.evaluate_partition(&partition, stage)?;

    match matrix {
        Some(path) => {
            let mut columns = if path.exists() {
                report::parse_matrix(&read_file(path)?)?
            } else {
                Vec::new()
            };
            if columns.iter().any(|c| c.stage == stage) {
                return Err(Error::Config(format!(
                    "stage {stage:?} already present in {}",
                    path.display()
                )));
            }
            columns.push(column);
            write_file(path, &report::render_matrix(&columns)?)?;
            println!("added stage {:?} to {}", stage, path.display());
        }
        None => print!("{}", report::render_matrix(&[column])?),
    }
    Ok(())
}

pub fn cmd_stats(input: &Path, bin_width: usize, output: Option<&Path>) -> Result<()> {
    if bin_width == 0 {
        return Err(Error::Config("bin width must be at least 1".into()));
    }
    let (kept, rejected, case_folded) = load_filtered(input)?;
    let stats = report::CorpusStats::compute(&kept, &rejected, case_folded, bin_width);
    let text = report::render_stats(&stats);
    match output {
        Some(path) => {
            write_file(path, &text)?;
            println!(
                "wrote stats for {} sequences to {}",
                kept.len(),
                path.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn cmd_synth(
    families: usize,
    count: usize,
    separation: f64,
    lengths: std::ops::RangeInclusive<usize>,
    seed: u64,
    output: &Path,
) -> Result<()> {
    if families == 0 {
        return Err(Error::Config("at least one family is required".into()));
    }
    let names: Vec<String> = (1..=families).map(|i| format!("fam-{i:02}")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut synth = Synthesizer::new(&name_refs, separation, lengths, seed)?;
    let counts: Vec<(&str, usize)> = name_refs.iter().map(|&n| (n, count)).collect();
    let corpus = synth.corpus(&counts)?;
    write_file(output, &write_fasta(&corpus))?;
    println!(
        "wrote {} sequences across {} families to {}",
        corpus.len(),
        families,
        output.display()
    );
    Ok(())
}
