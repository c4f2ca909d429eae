//! `explore hamming | walk | crawl` — boundary exploration runs.
//!
//! Emits one CSV row per trace (origin_id, length, evaluations,
//! boundary_points, n_decisions, terminated_early) plus an optional dump
//! of every boundary pair found.

use anyhow::{Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use seqbound::bayes::Classifier;
use seqbound::explore::{
    boundary_crawl, hamming_path_search, random_walk, ExplorationTrace, WalkDetection,
};
use seqbound::{Error, Sequence};

use crate::args::{Cli, ExploreCommand, ExploreCrawlArgs, ExploreHammingArgs, ExploreWalkArgs};
use crate::commands::{label_names, load_reads, read_alphabet};
use crate::output::{build_classifier, csv_id, write_output, Csv};

pub fn run(cli: &Cli, cmd: &ExploreCommand) -> Result<()> {
    match cmd {
        ExploreCommand::Hamming(args) => run_hamming(cli, args),
        ExploreCommand::Walk(args) => run_walk(cli, args),
        ExploreCommand::Crawl(args) => run_crawl(cli, args),
    }
}

fn run_hamming(cli: &Cli, args: &ExploreHammingArgs) -> Result<()> {
    let classifier = build_classifier(&args.models, None)?;
    let origins = load_reads(&args.origins, false)?;
    let targets = match &args.targets {
        Some(path) => load_reads(path, false)?,
        None => origins.clone(),
    };

    let target_decisions: Vec<usize> = targets
        .iter()
        .map(|t| classifier.classify(&t.seq).map_err(anyhow::Error::from))
        .collect::<Result<_>>()?;

    let mut traces: Vec<(String, ExplorationTrace)> = Vec::new();
    for origin in &origins {
        let od = classifier
            .classify(&origin.seq)
            .with_context(|| format!("origin {:?}", origin.id))?;
        let selected: Vec<Sequence> = targets
            .iter()
            .zip(&target_decisions)
            .filter(|(t, &d)| d != od && t.seq != origin.seq)
            .map(|(t, _)| t.seq.clone())
            .collect();
        if selected.is_empty() {
            eprintln!(
                "skipping origin {:?}: no differently-classified targets",
                origin.id
            );
            continue;
        }
        let trace = hamming_path_search(&classifier, &origin.seq, &selected)?;
        traces.push((origin.id.clone(), trace));
    }

    let params = format!(
        "models={} origins={} targets={}",
        args.models.join(","),
        args.origins.display(),
        args.targets
            .as_ref()
            .map_or_else(|| args.origins.display().to_string(), |p| p.display().to_string()),
    );
    emit(cli, args.csv.as_deref(), args.pairs_out.as_deref(), "explore hamming", &params, &classifier, &traces)
}

fn run_walk(cli: &Cli, args: &ExploreWalkArgs) -> Result<()> {
    let classifier = build_classifier(&args.models, None)?;
    let origins = load_reads(&args.origins, args.no_n)?;
    let alphabet = read_alphabet(args.no_n);

    let detection = if args.full_profile {
        WalkDetection::FullProfile
    } else {
        WalkDetection::Predecessor
    };
    let mut traces = Vec::new();
    for (i, origin) in origins.iter().enumerate() {
        // walk i draws from the derived seed (seed + i)
        let walk_seed = cli.seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let trace = random_walk(
            &classifier,
            &origin.seq,
            args.steps,
            alphabet,
            detection,
            &mut rng,
            walk_seed,
        )
        .with_context(|| format!("origin {:?}", origin.id))?;
        traces.push((origin.id.clone(), trace));
    }

    let params = format!(
        "models={} origins={} steps={} no_n={} full_profile={}",
        args.models.join(","),
        args.origins.display(),
        args.steps,
        args.no_n,
        args.full_profile
    );
    emit(cli, args.csv.as_deref(), args.pairs_out.as_deref(), "explore walk", &params, &classifier, &traces)
}

fn run_crawl(cli: &Cli, args: &ExploreCrawlArgs) -> Result<()> {
    let classifier = build_classifier(&args.models, None)?;
    let origins = load_reads(&args.origins, args.no_n)?;
    let alphabet = read_alphabet(args.no_n);

    let mut traces = Vec::new();
    for (i, origin) in origins.iter().enumerate() {
        let crawl_seed = cli.seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(crawl_seed);
        match boundary_crawl(
            &classifier,
            &origin.seq,
            args.max_steps,
            alphabet,
            &mut rng,
            crawl_seed,
        ) {
            Ok(trace) => traces.push((origin.id.clone(), trace)),
            Err(Error::NotBoundaryPoint(_)) => {
                eprintln!("skipping origin {:?}: not a boundary point", origin.id);
            }
            Err(e) => return Err(e).with_context(|| format!("origin {:?}", origin.id)),
        }
    }

    let params = format!(
        "models={} origins={} max_steps={} no_n={}",
        args.models.join(","),
        args.origins.display(),
        args.max_steps,
        args.no_n
    );
    emit(cli, args.csv.as_deref(), args.pairs_out.as_deref(), "explore crawl", &params, &classifier, &traces)
}

fn emit<C: Classifier>(
    cli: &Cli,
    csv_path: Option<&std::path::Path>,
    pairs_path: Option<&std::path::Path>,
    command: &str,
    params: &str,
    classifier: &C,
    traces: &[(String, ExplorationTrace)],
) -> Result<()> {
    let mut csv = Csv::new(command, params, cli.seed);
    csv.comment(format!("classes: {}", label_names(classifier).join(",")));
    csv.header(&[
        "origin_id",
        "length",
        "evaluations",
        "boundary_points",
        "n_decisions",
        "terminated_early",
    ]);
    for (id, t) in traces {
        csv.row(&[
            csv_id(id),
            t.visited.len().to_string(),
            t.classifier_evaluations.to_string(),
            t.distinct_boundary_points().to_string(),
            t.distinct_decisions().to_string(),
            t.terminated_early.to_string(),
        ]);
    }
    write_output(csv_path, &cli.out, &csv.finish())?;

    if let Some(path) = pairs_path {
        let mut pairs = Csv::new(command, params, cli.seed);
        pairs.header(&["origin_id", "seq_a", "seq_b", "decision_a", "decision_b"]);
        let labels = label_names(classifier);
        for (id, t) in traces {
            for p in &t.boundary_pairs {
                pairs.row(&[
                    csv_id(id),
                    p.a.to_string(),
                    p.b.to_string(),
                    labels[p.decision_a].clone(),
                    labels[p.decision_b].clone(),
                ]);
            }
        }
        write_output(Some(path), &cli.out, &pairs.finish())?;
    }
    Ok(())
}
