//! Command implementations.

mod analyze;
mod explore;
mod replicate;

use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use seqbound::bayes::{max_posterior, posterior_entropy, Classifier};
use seqbound::boundary::{neighbor_profile, sampled_ns};
use seqbound::fasta::{load_sequences, write_fasta, Record};
use seqbound::readsim::{simulate_reads, ReadSimConfig};
use seqbound::seq::Alphabet;
use seqbound::triplet::{bundled, hellinger, null_quantile, simulate_genome, TripletModel};

use crate::args::{Cli, ClassifyArgs, Command, ModelCommand, NsArgs, SimulateCommand};
use crate::output::{
    classifier_from_args, csv_id, resolve_model, write_output, Csv,
};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Model(cmd) => run_model(cli, cmd),
        Command::Classify(args) => run_classify(cli, args),
        Command::Ns(args) => run_ns(cli, args),
        Command::Explore(cmd) => explore::run(cli, cmd),
        Command::Simulate(cmd) => run_simulate(cli, cmd),
        Command::Analyze(cmd) => analyze::run(cli, cmd),
        Command::Replicate(args) => replicate::run(cli, args),
    }
}

pub(crate) fn read_alphabet(no_n: bool) -> Alphabet {
    if no_n {
        Alphabet::dna()
    } else {
        Alphabet::dna_n()
    }
}

/// Load reads and reject N-containing ones when the no-N graph is in use.
pub(crate) fn load_reads(path: &Path, no_n: bool) -> Result<Vec<Record>> {
    let records = load_sequences(path, Alphabet::dna_n())
        .with_context(|| format!("reading {}", path.display()))?;
    if no_n {
        if let Some(r) = records.iter().find(|r| r.seq.has_n()) {
            bail!(
                "read {:?} contains N; the --no-n graph excludes such reads",
                r.id
            );
        }
    }
    Ok(records)
}

fn run_model(cli: &Cli, cmd: &ModelCommand) -> Result<()> {
    match cmd {
        ModelCommand::Distance { a, b } => {
            let ma = resolve_model(a)?;
            let mb = resolve_model(b)?;
            let h = hellinger(ma.p3().probs(), mb.p3().probs())?;
            println!("{h}");
            Ok(())
        }
        ModelCommand::Estimate {
            fasta,
            label,
            pseudocount,
            model_out,
        } => {
            let records = load_sequences(fasta, Alphabet::dna_n())?;
            if records.is_empty() {
                bail!("no sequences in {}", fasta.display());
            }
            // multi-record files are pooled into one model
            let mut counts = [0.0f64; 64];
            let mut total = 0.0;
            for r in &records {
                let d = seqbound::triplet::TripletDistribution::estimate(&r.seq, 0.0)?;
                let windows = (r.seq.len() - 2) as f64;
                for (c, &p) in counts.iter_mut().zip(d.probs()) {
                    *c += p * windows;
                }
                total += windows;
            }
            let n_cells = counts.len() as f64;
            for c in counts.iter_mut() {
                *c = (*c + pseudocount) / (total + n_cells * pseudocount);
            }
            let dist = seqbound::triplet::TripletDistribution::from_probs(counts)?;
            let model = TripletModel::new(label.clone(), dist);
            let path = model_out
                .clone()
                .unwrap_or_else(|| format!("{label}.json").into());
            let full = if path.is_absolute() {
                path
            } else {
                cli.out.join(path)
            };
            std::fs::create_dir_all(full.parent().unwrap_or(Path::new(".")))?;
            model.save(&full)?;
            eprintln!("wrote {}", full.display());
            Ok(())
        }
        ModelCommand::Quantile {
            model,
            length,
            replicates,
            q,
        } => {
            let m = resolve_model(model)?;
            let value = null_quantile(&m, *length, *replicates, *q, cli.seed)?;
            println!("{value}");
            Ok(())
        }
        ModelCommand::Export => {
            std::fs::create_dir_all(&cli.out)?;
            for name in ["adeno", "covid", "sars"] {
                let path = cli.out.join(format!("{name}.json"));
                std::fs::write(&path, bundled::json(name).unwrap())?;
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn run_classify(cli: &Cli, args: &ClassifyArgs) -> Result<()> {
    let classifier =
        classifier_from_args(&args.models, args.bundle.as_deref(), args.prior.as_deref())?;
    let records = load_reads(&args.reads, false)?;
    let k = classifier.num_classes();

    let rows: Vec<Vec<String>> = records
        .par_iter()
        .map(|r| -> Result<Vec<String>> {
            let post = classifier
                .posterior(&r.seq)
                .with_context(|| format!("read {:?}", r.id))?;
            let decision = post.argmax();
            let mut row = vec![csv_id(&r.id), classifier.labels()[decision].name.clone()];
            row.extend(post.probs().iter().map(|p| p.to_string()));
            row.push(max_posterior(&post).to_string());
            row.push(posterior_entropy(&post).to_string());
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let source = match &args.bundle {
        Some(b) => format!("bundle={}", b.display()),
        None => format!("models={}", args.models.join(",")),
    };
    let mut csv = Csv::new(
        "classify",
        &format!("{source} reads={}", args.reads.display()),
        cli.seed,
    );
    csv.comment(format!("classes: {}", label_names(&classifier).join(",")));
    let mut header = vec!["read_id".to_string(), "decision".to_string()];
    header.extend((0..k).map(|i| format!("p_{i}")));
    header.push("max_posterior".to_string());
    header.push("entropy".to_string());
    csv.header(&header.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    for row in rows {
        csv.row(&row);
    }
    write_output(args.csv.as_deref(), &cli.out, &csv.finish())
}

fn run_ns(cli: &Cli, args: &NsArgs) -> Result<()> {
    let classifier = classifier_from_args(&args.models, args.bundle.as_deref(), None)?;
    let records = load_reads(&args.reads, args.no_n)?;
    let alphabet = read_alphabet(args.no_n);
    let k = classifier.num_classes();

    struct NsRow {
        id: String,
        decision: usize,
        counts: Vec<usize>,
        ns: f64,
        status: usize,
        evaluations: usize,
        posterior: Option<(f64, f64)>,
    }

    let rows: Vec<NsRow> = match args.sample {
        None => records
            .iter()
            .map(|r| -> Result<NsRow> {
                let p = neighbor_profile(&classifier, &r.seq, alphabet)
                    .with_context(|| format!("read {:?}", r.id))?;
                Ok(NsRow {
                    id: r.id.clone(),
                    decision: p.decision,
                    counts: p.neighbor_counts,
                    ns: p.ns,
                    status: p.boundary_status,
                    evaluations: p.evaluations,
                    posterior: None,
                })
            })
            .collect::<Result<_>>()?,
        Some(k_sample) => records
            .iter()
            .enumerate()
            .map(|(i, r)| -> Result<NsRow> {
                // read i draws from the derived seed (seed + i)
                let mut rng = ChaCha8Rng::seed_from_u64(cli.seed.wrapping_add(i as u64));
                let s = sampled_ns(&classifier, &r.seq, k_sample, alphabet, &mut rng)
                    .with_context(|| format!("read {:?}", r.id))?;
                let decision = classifier.classify(&r.seq)?;
                let status = s
                    .counts
                    .iter()
                    .enumerate()
                    .filter(|&(c, &n)| c != decision && n > 0)
                    .count();
                Ok(NsRow {
                    id: r.id.clone(),
                    decision,
                    counts: s.counts.clone(),
                    ns: s.ns_estimate,
                    status,
                    evaluations: s.k + 1,
                    posterior: None,
                })
            })
            .collect::<Result<_>>()?,
    };

    let mut rows = rows;
    if args.with_posterior {
        for (row, record) in rows.iter_mut().zip(&records) {
            let post = classifier.posterior(&record.seq)?;
            row.posterior = Some((max_posterior(&post), posterior_entropy(&post)));
        }
    }

    let source = match &args.bundle {
        Some(b) => format!("bundle={}", b.display()),
        None => format!("models={}", args.models.join(",")),
    };
    let mut params = format!("{source} reads={} no_n={}", args.reads.display(), args.no_n);
    if let Some(s) = args.sample {
        params.push_str(&format!(" sample={s}"));
    }
    let mut csv = Csv::new("ns", &params, cli.seed);
    csv.comment(format!("classes: {}", label_names(&classifier).join(",")));
    let mut header = vec!["read_id".to_string(), "decision".to_string()];
    header.extend((0..k).map(|i| format!("n_class_{i}")));
    header.push("ns".to_string());
    header.push("boundary_status".to_string());
    header.push("evaluations".to_string());
    if args.with_posterior {
        header.push("max_posterior".to_string());
        header.push("entropy".to_string());
    }
    csv.header(&header.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    for r in rows {
        let mut row = vec![csv_id(&r.id), classifier.labels()[r.decision].name.clone()];
        row.extend(r.counts.iter().map(|c| c.to_string()));
        row.push(r.ns.to_string());
        row.push(r.status.to_string());
        row.push(r.evaluations.to_string());
        if let Some((mp, pe)) = r.posterior {
            row.push(mp.to_string());
            row.push(pe.to_string());
        }
        csv.row(&row);
    }
    write_output(args.csv.as_deref(), &cli.out, &csv.finish())
}

fn run_simulate(cli: &Cli, cmd: &SimulateCommand) -> Result<()> {
    match cmd {
        SimulateCommand::Genome {
            model,
            length,
            id,
            fasta_out,
        } => {
            let m = resolve_model(model)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let genome = simulate_genome(&m, *length, &mut rng)?;
            let record = Record {
                id: id.clone().unwrap_or_else(|| m.label().to_string()),
                seq: genome,
            };
            let mut out = Vec::new();
            write_fasta(&mut out, std::slice::from_ref(&record))?;
            write_output(
                fasta_out.as_deref(),
                &cli.out,
                std::str::from_utf8(&out).expect("FASTA is UTF-8"),
            )
        }
        SimulateCommand::Reads {
            genome,
            coverage,
            length,
            sub_rate,
            n_rate,
            fasta_out,
        } => {
            let genomes = load_sequences(genome, Alphabet::dna_n())?;
            if genomes.is_empty() {
                bail!("no sequences in {}", genome.display());
            }
            let cfg = ReadSimConfig {
                read_length: *length,
                coverage: *coverage,
                sub_rate: *sub_rate,
                n_rate: *n_rate,
            };
            let mut records = Vec::new();
            for (gi, g) in genomes.iter().enumerate() {
                // genome gi draws read seeds from seed + gi * 2^32
                let base = cli.seed.wrapping_add((gi as u64) << 32);
                for read in simulate_reads(&g.seq, &g.id, &cfg, base)? {
                    records.push(Record {
                        id: read.id,
                        seq: read.seq,
                    });
                }
            }
            let mut out = Vec::new();
            write_fasta(&mut out, &records)?;
            write_output(
                fasta_out.as_deref(),
                &cli.out,
                std::str::from_utf8(&out).expect("FASTA is UTF-8"),
            )
        }
    }
}

pub(crate) fn label_names<C: Classifier>(classifier: &C) -> Vec<String> {
    classifier
        .labels()
        .iter()
        .map(|l| l.name.clone())
        .collect()
}
