//! `replicate` — named experiment recipes over freshly generated data.
//!
//! Every recipe builds its dataset from the bundled models (simulated
//! genomes, simulated reads, random sequences), runs the pipeline, and
//! writes CSV files annotated with the corresponding published reference
//! values for side-by-side comparison. Reference values are annotations
//! only; nothing asserts against them at runtime.
//!
//! Task seeds derive from the global seed as `seed + (task << 32)`, with
//! small item indices added inside a task, so schedules and worker counts
//! cannot change any output.

use std::collections::{HashMap, HashSet};

use anyhow::{bail, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use seqbound::analysis::{chi_square_statistic, confusion_matrix, crosstab_boundary, ns_sampling_rrmse};
use seqbound::bayes::{BayesClassifier, Classifier};
use seqbound::boundary::{neighbor_profile, NeighborProfile};
use seqbound::explore::{
    boundary_crawl, hamming_path_search, random_walk, ExplorationTrace, Strategy, WalkDetection,
};
use seqbound::readsim::{simulate_reads, ReadSimConfig};
use seqbound::seq::{neighbor_count, random_sequence, Alphabet, Sequence};
use seqbound::triplet::{bundled, null_quantile, simulate_genome};

use crate::args::{Cli, Recipe, ReplicateArgs};
use crate::commands::read_alphabet;
use crate::output::{write_recipe_file, Csv};

// task numbers for seed derivation
const TASK_GENOME: u64 = 1; // +genome index
const TASK_READS: u64 = 4; // +genome index
const TASK_RANDOM6K: u64 = 7;
const TASK_CONTAMINANT: u64 = 8;
const TASK_WALKS: u64 = 9;
const TASK_CRAWLS: u64 = 10;
const TASK_RRMSE: u64 = 11;
const TASK_QUANTILES: u64 = 12; // +model index

fn task_seed(seed: u64, task: u64) -> u64 {
    seed.wrapping_add(task << 32)
}

pub fn run(cli: &Cli, args: &ReplicateArgs) -> Result<()> {
    if args.scale <= 0.0 || args.scale > 100.0 || args.scale.is_nan() {
        bail!("--scale must lie in (0, 100]");
    }
    match args.recipe {
        Recipe::Table1 => table1(cli, args),
        Recipe::Table2 => table2(cli, args),
        Recipe::Table7 => table7(cli, args),
        Recipe::Table8 => table8(cli, args),
        Recipe::Fig5 => fig5(cli, args),
        Recipe::Quantiles => quantiles(cli, args),
    }
}

struct Synthetic {
    classifier: BayesClassifier,
    labels: Vec<String>,
    reads: Vec<(String, Sequence)>,
    truths: Vec<usize>,
}

/// Simulate one genome per bundled model at its reference length, then
/// reads at the default error rates and `6 * scale` coverage.
fn build_synthetic(seed: u64, scale: f64) -> Result<Synthetic> {
    let classifier = BayesClassifier::bundled();
    let labels: Vec<String> = classifier.labels().iter().map(|l| l.name.clone()).collect();
    let mut reads = Vec::new();
    let mut truths = Vec::new();
    for (i, model) in classifier.models().to_vec().iter().enumerate() {
        let length = bundled::GENOME_LENGTHS[i];
        let mut rng = ChaCha8Rng::seed_from_u64(task_seed(seed, TASK_GENOME + i as u64));
        let genome = simulate_genome(model, length, &mut rng)?;
        let cfg = ReadSimConfig {
            coverage: 6.0 * scale,
            ..ReadSimConfig::default()
        };
        for r in simulate_reads(&genome, model.label(), &cfg, task_seed(seed, TASK_READS + i as u64))? {
            reads.push((r.id, r.seq));
            truths.push(i);
        }
    }
    Ok(Synthetic {
        classifier,
        labels,
        reads,
        truths,
    })
}

fn classify_all(classifier: &BayesClassifier, seqs: &[Sequence]) -> Result<Vec<usize>> {
    let decisions = seqs
        .par_iter()
        .map(|s| classifier.classify(s))
        .collect::<seqbound::Result<Vec<_>>>()?;
    Ok(decisions)
}

fn params_string(args: &ReplicateArgs) -> String {
    format!("recipe={:?} scale={} no_n={}", args.recipe, args.scale, args.no_n)
}

fn table1(cli: &Cli, args: &ReplicateArgs) -> Result<()> {
    let data = build_synthetic(cli.seed, args.scale)?;
    let seqs: Vec<Sequence> = data.reads.iter().map(|(_, s)| s.clone()).collect();
    let decisions = classify_all(&data.classifier, &seqs)?;
    let m = confusion_matrix(&data.truths, &decisions, data.labels.len())?;

    let mut csv = Csv::new("replicate table1", &params_string(args), cli.seed);
    csv.comment(format!("correct_rate: {}", m.correct_rate()));
    csv.comment("reference (original case study): correct rate 81.55%");
    let mut hdr = vec!["source".to_string()];
    hdr.extend(data.labels.iter().cloned());
    hdr.push("sum".to_string());
    csv.header(&hdr.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    for (i, name) in data.labels.iter().enumerate() {
        let mut row = vec![name.clone()];
        row.extend(m.counts()[i].iter().map(|c| c.to_string()));
        row.push(m.row_sums()[i].to_string());
        csv.row(&row);
    }
    write_recipe_file(&cli.out, "table1_confusion.csv", &csv.finish())?;
    println!("reads: {}  correct rate: {:.4}", seqs.len(), m.correct_rate());
    Ok(())
}

fn table2(cli: &Cli, args: &ReplicateArgs) -> Result<()> {
    let data = build_synthetic(cli.seed, args.scale)?;
    let alphabet = read_alphabet(args.no_n);
    let k = data.labels.len();

    let mut decisions = Vec::with_capacity(data.reads.len());
    let mut statuses = Vec::with_capacity(data.reads.len());
    for (_, seq) in &data.reads {
        let p = neighbor_profile(&data.classifier, seq, alphabet)?;
        decisions.push(p.decision);
        statuses.push(p.boundary_status);
    }

    let emit = |name: &str, rows: &[usize], row_names: &[String], reference: &str| -> Result<()> {
        let tab = crosstab_boundary(rows, &statuses, row_names, k)?;
        let mut csv = Csv::new("replicate table2", &params_string(args), cli.seed);
        match chi_square_statistic(&tab.counts) {
            Ok(stat) => {
                csv.comment(format!("chi_square: {stat}"));
            }
            Err(_) => {
                csv.comment("chi_square: undefined (zero marginal)");
            }
        }
        csv.comment(format!("reference (original case study): {reference}"));
        let mut hdr = vec!["category".to_string()];
        hdr.extend((0..k).map(|s| format!("status_{s}")));
        hdr.push("sum".to_string());
        csv.header(&hdr.iter().map(|s| s.as_str()).collect::<Vec<_>>());
        for (i, rn) in tab.row_names.iter().enumerate() {
            let mut row = vec![rn.clone()];
            row.extend(tab.counts[i].iter().map(|c| c.to_string()));
            row.push(tab.row_sums()[i].to_string());
            csv.row(&row);
        }
        write_recipe_file(&cli.out, &format!("table2_{name}.csv"), &csv.finish())?;
        Ok(())
    };

    emit(
        "source",
        &data.truths,
        &data.labels,
        "status sums 4078 / 1601 / 190 over 5869 reads",
    )?;
    emit(
        "decision",
        &decisions,
        &data.labels,
        "row sums match the confusion matrix column sums",
    )?;
    let correct: Vec<usize> = data
        .truths
        .iter()
        .zip(&decisions)
        .map(|(t, d)| usize::from(t == d))
        .collect();
    emit(
        "correctness",
        &correct,
        &["incorrect".to_string(), "correct".to_string()],
        "64.66% of incorrect and 22.81% of correct decisions lie on the boundary",
    )?;

    let on_boundary = statuses.iter().filter(|&&s| s > 0).count();
    println!(
        "reads: {}  boundary fraction: {:.4}",
        data.reads.len(),
        on_boundary as f64 / data.reads.len() as f64
    );
    Ok(())
}

// incremental per-strategy aggregation; traces are dropped as they come
struct StrategyAgg {
    traces: usize,
    evaluations: usize,
    points: HashSet<Sequence>,
}

impl StrategyAgg {
    fn new() -> Self {
        StrategyAgg {
            traces: 0,
            evaluations: 0,
            points: HashSet::new(),
        }
    }

    fn add(&mut self, t: &ExplorationTrace) {
        self.traces += 1;
        self.evaluations += t.classifier_evaluations;
        for p in &t.boundary_pairs {
            self.points.insert(p.a.clone());
            self.points.insert(p.b.clone());
        }
    }

    fn efficiency(&self) -> f64 {
        self.points.len() as f64 / self.evaluations.max(1) as f64
    }
}

fn scaled(base: usize, scale: f64, floor: usize) -> usize {
    ((base as f64 * scale).round() as usize).max(floor)
}

fn table7(cli: &Cli, args: &ReplicateArgs) -> Result<()> {
    let data = build_synthetic(cli.seed, args.scale)?;
    let alphabet = read_alphabet(args.no_n);
    let seqs: Vec<Sequence> = data.reads.iter().map(|(_, s)| s.clone()).collect();
    if seqs.is_empty() {
        bail!("no reads at this scale");
    }
    let decisions = classify_all(&data.classifier, &seqs)?;

    let n_origins = scaled(25, args.scale, 1).min(seqs.len());
    let targets_per_origin = scaled(400, args.scale, 10);
    let n_walks = scaled(300, args.scale, 3);
    let walk_steps = 2000;
    let n_crawls = scaled(100, args.scale, 1);
    let crawl_steps = 250;

    let mut per_trace = Csv::new("replicate table7", &params_string(args), cli.seed);
    per_trace.header(&[
        "strategy",
        "origin_id",
        "length",
        "evaluations",
        "boundary_points",
        "n_decisions",
        "terminated_early",
    ]);
    let trace_row = |strategy: &str, id: &str, t: &ExplorationTrace, csv: &mut Csv| {
        csv.row(&[
            strategy.to_string(),
            id.to_string(),
            t.visited.len().to_string(),
            t.classifier_evaluations.to_string(),
            t.distinct_boundary_points().to_string(),
            t.distinct_decisions().to_string(),
            t.terminated_early.to_string(),
        ]);
    };

    let mut hamming = StrategyAgg::new();
    let mut walks = StrategyAgg::new();
    let mut crawls = StrategyAgg::new();
    // boundary points discovered on the way, reused as crawl starts
    let mut discovered: Vec<Sequence> = Vec::new();
    let mut discovered_set: HashSet<Sequence> = HashSet::new();

    // Hamming paths: evenly spread origins, each against a deterministic
    // slice of differently-classified reads
    let stride = (seqs.len() / n_origins).max(1);
    for oi in 0..n_origins {
        let origin_idx = (oi * stride) % seqs.len();
        let origin = &seqs[origin_idx];
        let od = decisions[origin_idx];
        let targets: Vec<Sequence> = (0..seqs.len())
            .filter(|&j| decisions[j] != od)
            .take(targets_per_origin)
            .map(|j| seqs[j].clone())
            .collect();
        if targets.is_empty() {
            continue;
        }
        let t = hamming_path_search(&data.classifier, origin, &targets)?;
        trace_row("hamming_path", &data.reads[origin_idx].0, &t, &mut per_trace);
        for p in &t.boundary_pairs {
            for s in [&p.a, &p.b] {
                if discovered_set.insert(s.clone()) {
                    discovered.push(s.clone());
                }
            }
        }
        hamming.add(&t);
    }

    // Random walks from evenly spread reads
    let wstride = (seqs.len() / n_walks).max(1);
    for wi in 0..n_walks {
        let idx = (wi * wstride) % seqs.len();
        let walk_seed = task_seed(cli.seed, TASK_WALKS).wrapping_add(wi as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let t = random_walk(
            &data.classifier,
            &seqs[idx],
            walk_steps,
            alphabet,
            WalkDetection::Predecessor,
            &mut rng,
            walk_seed,
        )?;
        trace_row("random_walk", &data.reads[idx].0, &t, &mut per_trace);
        for p in &t.boundary_pairs {
            for s in [&p.a, &p.b] {
                if discovered_set.insert(s.clone()) {
                    discovered.push(s.clone());
                }
            }
        }
        walks.add(&t);
    }

    // Boundary crawls from discovered boundary points
    if discovered.is_empty() {
        bail!("no boundary points found to start crawls from");
    }
    let cstride = (discovered.len() / n_crawls).max(1);
    for ci in 0..n_crawls.min(discovered.len()) {
        let start = &discovered[(ci * cstride) % discovered.len()];
        let crawl_seed = task_seed(cli.seed, TASK_CRAWLS).wrapping_add(ci as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(crawl_seed);
        let t = boundary_crawl(
            &data.classifier,
            start,
            crawl_steps,
            alphabet,
            &mut rng,
            crawl_seed,
        )?;
        trace_row("boundary_crawl", &format!("bp{ci}"), &t, &mut per_trace);
        crawls.add(&t);
    }

    write_recipe_file(&cli.out, "table7_traces.csv", &per_trace.finish())?;

    let mut summary = Csv::new("replicate table7", &params_string(args), cli.seed);
    summary.comment("reference (original case study): 16.73% / 5.82% / 0.25% efficiency");
    summary.header(&["method", "traces", "evaluations", "boundary_points", "efficiency"]);
    for (strategy, agg) in [
        (Strategy::HammingPath, &hamming),
        (Strategy::RandomWalk, &walks),
        (Strategy::BoundaryCrawl, &crawls),
    ] {
        summary.row(&[
            strategy.name().to_string(),
            agg.traces.to_string(),
            agg.evaluations.to_string(),
            agg.points.len().to_string(),
            format!("{:.4}", agg.efficiency()),
        ]);
        println!(
            "{:>15}: {:>9} evaluations, {:>7} boundary points, efficiency {:.2}%",
            strategy.name(),
            agg.evaluations,
            agg.points.len(),
            100.0 * agg.efficiency()
        );
    }
    write_recipe_file(&cli.out, "table7_summary.csv", &summary.finish())?;
    Ok(())
}

fn table8(cli: &Cli, args: &ReplicateArgs) -> Result<()> {
    let data = build_synthetic(cli.seed, args.scale)?;
    let alphabet = read_alphabet(args.no_n);
    let k = data.labels.len();

    let read_seqs: Vec<Sequence> = data.reads.iter().map(|(_, s)| s.clone()).collect();

    let n_random = scaled(6000, args.scale, 10);
    let mut rng = ChaCha8Rng::seed_from_u64(task_seed(cli.seed, TASK_RANDOM6K));
    let random6k: Vec<Sequence> = (0..n_random)
        .map(|_| random_sequence(101, Alphabet::dna(), &mut rng))
        .collect::<seqbound::Result<_>>()?;

    let n_contaminant = scaled(2000, args.scale, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(task_seed(cli.seed, TASK_CONTAMINANT));
    let contaminant: Vec<Sequence> = (0..n_contaminant)
        .map(|_| random_sequence(101, Alphabet::dna(), &mut rng))
        .collect::<seqbound::Result<_>>()?;
    let n_mixed2 = scaled(100, args.scale, 2).min(contaminant.len());

    let mut mixed2 = read_seqs.clone();
    mixed2.extend(contaminant.iter().take(n_mixed2).cloned());
    let mut mixed1 = read_seqs.clone();
    mixed1.extend(contaminant.iter().cloned());

    // one profile per distinct sequence, shared across datasets
    let mut cache: HashMap<Sequence, (usize, bool)> = HashMap::new();
    let mut summarize = |name: &str, seqs: &[Sequence]| -> Result<Vec<String>> {
        let mut dec_counts = vec![0usize; k];
        let mut on_boundary = 0usize;
        for s in seqs {
            let (decision, boundary) = match cache.get(s) {
                Some(&v) => v,
                None => {
                    let p = neighbor_profile(&data.classifier, s, alphabet)?;
                    let v = (p.decision, p.boundary_status > 0);
                    cache.insert(s.clone(), v);
                    v
                }
            };
            dec_counts[decision] += 1;
            if boundary {
                on_boundary += 1;
            }
        }
        let n = seqs.len() as f64;
        let mut row = vec![name.to_string(), seqs.len().to_string()];
        row.extend(dec_counts.iter().map(|&c| format!("{:.4}", 100.0 * c as f64 / n)));
        row.push(format!("{:.4}", 100.0 * (seqs.len() - on_boundary) as f64 / n));
        row.push(format!("{:.4}", 100.0 * on_boundary as f64 / n));
        Ok(row)
    };

    let datasets: Vec<(&str, &[Sequence])> = vec![
        ("reads", &read_seqs),
        ("mixed2", &mixed2),
        ("mixed1", &mixed1),
        ("random6k", &random6k),
    ];

    let mut csv = Csv::new("replicate table8", &params_string(args), cli.seed);
    csv.comment("decision and boundary columns are percentages");
    csv.comment("mixed datasets contaminate the reads with uniform random sequences");
    csv.comment("reference (original case study): ReadsNew 32.43/33.82/33.75 boundary 68.7/31.3");
    csv.comment("reference (original case study): Random6K 90.83/0.38/8.78 boundary 78.75/21.25");
    let mut hdr = vec!["dataset".to_string(), "count".to_string()];
    hdr.extend(data.labels.iter().map(|l| format!("pct_{}", l.to_lowercase())));
    hdr.push("pct_interior".to_string());
    hdr.push("pct_boundary".to_string());
    csv.header(&hdr.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    for (name, seqs) in datasets {
        let row = summarize(name, seqs)?;
        println!("{}", row.join(" "));
        csv.row(&row);
    }
    write_recipe_file(&cli.out, "table8_datasets.csv", &csv.finish())?;
    Ok(())
}

fn fig5(cli: &Cli, args: &ReplicateArgs) -> Result<()> {
    let data = build_synthetic(cli.seed, args.scale)?;
    let alphabet = read_alphabet(args.no_n);
    let n_neighbors = neighbor_count(101, alphabet);

    let profiles: Vec<NeighborProfile> = data
        .reads
        .iter()
        .map(|(_, s)| neighbor_profile(&data.classifier, s, alphabet))
        .collect::<seqbound::Result<_>>()?;

    let mut ks: Vec<usize> = vec![1, 2, 3, 5, 8, 12, 16, 20, 30, 40, 60, 80, 120, 160, 240, 320]
        .into_iter()
        .filter(|&k| k < n_neighbors)
        .collect();
    ks.push(n_neighbors);

    let table = ns_sampling_rrmse(&profiles, &ks, task_seed(cli.seed, TASK_RRMSE))?;

    let mut csv = Csv::new("replicate fig5", &params_string(args), cli.seed);
    csv.comment(format!("reads: {}", profiles.len()));
    csv.comment("reference (original case study): RRMSE of 5% at 20 sampled neighbors");
    csv.header(&["k", "rrmse"]);
    for (k, rrmse) in &table {
        csv.row(&[k.to_string(), rrmse.to_string()]);
        println!("k = {k:>3}: RRMSE = {rrmse:.4}");
    }
    write_recipe_file(&cli.out, "fig5_rrmse.csv", &csv.finish())?;
    Ok(())
}

fn quantiles(cli: &Cli, args: &ReplicateArgs) -> Result<()> {
    let replicates = scaled(1000, args.scale, 100);
    let mut csv = Csv::new("replicate quantiles", &params_string(args), cli.seed);
    csv.comment("reference (original case study): 0.0194 / 0.0209 / 0.0207");
    csv.header(&["model", "genome_length", "replicates", "q", "quantile"]);
    for (i, model) in bundled::all().iter().enumerate() {
        let length = bundled::GENOME_LENGTHS[i];
        let q = null_quantile(
            model,
            length,
            replicates,
            0.999,
            task_seed(cli.seed, TASK_QUANTILES + i as u64),
        )?;
        println!("{}: {:.6}", model.label(), q);
        csv.row(&[
            model.label().to_string(),
            length.to_string(),
            replicates.to_string(),
            "0.999".to_string(),
            q.to_string(),
        ]);
    }
    write_recipe_file(&cli.out, "quantiles.csv", &csv.finish())?;
    Ok(())
}
