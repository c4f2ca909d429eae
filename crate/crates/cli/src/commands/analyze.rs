//! `analyze roc | barycentric | confusion | crosstab` — reductions over
//! classify/ns CSV output.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use seqbound::analysis::{
    barycentric_coords, chi_square_statistic, confusion_matrix, crosstab_boundary, quadratic_fit,
    roc_curve,
};

use crate::args::{AnalyzeCommand, Cli};
use crate::output::{column, parse_csv, write_output, Csv};

pub fn run(cli: &Cli, cmd: &AnalyzeCommand) -> Result<()> {
    match cmd {
        AnalyzeCommand::Roc {
            classify,
            ns,
            truth,
            csv,
        } => run_roc(cli, classify, ns, truth.as_deref(), csv.as_deref()),
        AnalyzeCommand::Barycentric { input, csv } => run_barycentric(cli, input, csv.as_deref()),
        AnalyzeCommand::Confusion { input, truth, csv } => {
            run_confusion(cli, input, truth.as_deref(), csv.as_deref())
        }
        AnalyzeCommand::Crosstab { input, truth, csv } => {
            run_crosstab(cli, input, truth.as_deref(), csv.as_deref())
        }
        AnalyzeCommand::Quadfit { classify, ns, csv } => {
            run_quadfit(cli, classify, ns, csv.as_deref())
        }
    }
}

fn run_quadfit(
    cli: &Cli,
    classify_path: &Path,
    ns_path: &Path,
    csv_path: Option<&Path>,
) -> Result<()> {
    let classify_text = std::fs::read_to_string(classify_path)
        .with_context(|| format!("reading {}", classify_path.display()))?;
    let ns_text =
        std::fs::read_to_string(ns_path).with_context(|| format!("reading {}", ns_path.display()))?;
    let classes = classes_comment(&classify_text)?;

    let (c_header, c_rows) = parse_csv(&classify_text)?;
    let (n_header, n_rows) = parse_csv(&ns_text)?;
    let id_c = column(&c_header, "read_id")?;
    let dec_c = column(&c_header, "decision")?;
    let mp_c = column(&c_header, "max_posterior")?;
    let id_n = column(&n_header, "read_id")?;
    let ns_n = column(&n_header, "ns")?;

    let ns_by_id: HashMap<&str, f64> = n_rows
        .iter()
        .map(|r| -> Result<(&str, f64)> { Ok((r[id_n].as_str(), r[ns_n].parse()?)) })
        .collect::<Result<_>>()?;

    let mut ns_values = Vec::new();
    let mut mp_values = Vec::new();
    let mut decisions = Vec::new();
    for row in &c_rows {
        let id = &row[id_c];
        let Some(&ns_value) = ns_by_id.get(id.as_str()) else {
            bail!("read {id:?} is missing from the ns CSV");
        };
        ns_values.push(ns_value);
        mp_values.push(row[mp_c].parse::<f64>()?);
        decisions.push(
            classes
                .iter()
                .position(|c| c == &row[dec_c])
                .ok_or_else(|| anyhow!("unknown decision {:?}", row[dec_c]))?,
        );
    }

    let fit = quadratic_fit(&ns_values, &mp_values, &decisions, classes.len())?;
    let mut csv = Csv::new(
        "analyze quadfit",
        &format!("classify={} ns={}", classify_path.display(), ns_path.display()),
        cli.seed,
    );
    csv.comment(format!("r_squared: {}", fit.r_squared));
    csv.comment(format!("mse: {}", fit.mse));
    csv.header(&["class", "alpha", "beta", "gamma"]);
    for (i, name) in classes.iter().enumerate() {
        let [a, b, g] = fit.coefficients[i];
        csv.row(&[name.clone(), a.to_string(), b.to_string(), g.to_string()]);
        eprintln!("{name}: alpha {a:.5} beta {b:.5} gamma {g:.5}");
    }
    eprintln!("pooled R^2 = {:.4}, MSE = {:.6}", fit.r_squared, fit.mse);
    write_output(csv_path, &cli.out, &csv.finish())
}

/// Class names recorded by classify/ns in their `# classes:` comment.
fn classes_comment(text: &str) -> Result<Vec<String>> {
    text.lines()
        .find_map(|l| l.strip_prefix("# classes: "))
        .map(|s| s.split(',').map(|c| c.trim().to_string()).collect())
        .ok_or_else(|| anyhow!("input CSV lacks the '# classes:' comment"))
}

/// Ground truth per read: an explicit two-column CSV, or the `src=` tag
/// embedded in simulated read ids.
fn truth_lookup(
    ids: &[String],
    truth_path: Option<&Path>,
) -> Result<HashMap<String, String>> {
    match truth_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let (header, rows) = parse_csv(&text)?;
            let id_col = column(&header, "read_id")?;
            let src_col = column(&header, "source")?;
            Ok(rows
                .into_iter()
                .map(|r| (r[id_col].clone(), r[src_col].clone()))
                .collect())
        }
        None => {
            let mut map = HashMap::new();
            for id in ids {
                let src = seqbound::readsim::source_from_id(id).ok_or_else(|| {
                    anyhow!(
                        "read id {id:?} carries no 'src=' tag; pass --truth with a read_id,source CSV"
                    )
                })?;
                map.insert(id.clone(), src.to_string());
            }
            Ok(map)
        }
    }
}

fn run_roc(
    cli: &Cli,
    classify_path: &Path,
    ns_path: &Path,
    truth_path: Option<&Path>,
    csv_path: Option<&Path>,
) -> Result<()> {
    let classify_text = std::fs::read_to_string(classify_path)
        .with_context(|| format!("reading {}", classify_path.display()))?;
    let ns_text =
        std::fs::read_to_string(ns_path).with_context(|| format!("reading {}", ns_path.display()))?;

    let (c_header, c_rows) = parse_csv(&classify_text)?;
    let (n_header, n_rows) = parse_csv(&ns_text)?;
    let id_c = column(&c_header, "read_id")?;
    let dec_c = column(&c_header, "decision")?;
    let mp_c = column(&c_header, "max_posterior")?;
    let id_n = column(&n_header, "read_id")?;
    let ns_n = column(&n_header, "ns")?;

    let ns_by_id: HashMap<&str, f64> = n_rows
        .iter()
        .map(|r| -> Result<(&str, f64)> { Ok((r[id_n].as_str(), r[ns_n].parse()?)) })
        .collect::<Result<_>>()?;

    let ids: Vec<String> = c_rows.iter().map(|r| r[id_c].clone()).collect();
    let truth = truth_lookup(&ids, truth_path)?;

    let mut mp_scores = Vec::new();
    let mut ns_scores = Vec::new();
    let mut correct = Vec::new();
    for row in &c_rows {
        let id = &row[id_c];
        let Some(&ns_value) = ns_by_id.get(id.as_str()) else {
            bail!("read {id:?} is missing from the ns CSV");
        };
        let truth_src = truth
            .get(id)
            .ok_or_else(|| anyhow!("no ground truth for read {id:?}"))?;
        mp_scores.push(row[mp_c].parse::<f64>()?);
        ns_scores.push(ns_value);
        correct.push(&row[dec_c] == truth_src);
    }

    let roc_mp = roc_curve(&mp_scores, &correct)?;
    let roc_ns = roc_curve(&ns_scores, &correct)?;

    let mut csv = Csv::new(
        "analyze roc",
        &format!("classify={} ns={}", classify_path.display(), ns_path.display()),
        cli.seed,
    );
    csv.comment(format!("auc_mp: {}", roc_mp.auc));
    csv.comment(format!("auc_ns: {}", roc_ns.auc));
    csv.header(&["measure", "fpr", "tpr"]);
    for (name, curve) in [("mp", &roc_mp), ("ns", &roc_ns)] {
        for &(fpr, tpr) in &curve.points {
            csv.row(&[name.to_string(), fpr.to_string(), tpr.to_string()]);
        }
    }
    write_output(csv_path, &cli.out, &csv.finish())?;
    eprintln!("AUC (max posterior) = {:.4}", roc_mp.auc);
    eprintln!("AUC (neighbor similarity) = {:.4}", roc_ns.auc);
    Ok(())
}

fn run_barycentric(cli: &Cli, input: &Path, csv_path: Option<&Path>) -> Result<()> {
    let text =
        std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let classes = classes_comment(&text)?;
    if classes.len() != 3 {
        bail!("barycentric coordinates need exactly 3 classes, found {}", classes.len());
    }
    let (header, rows) = parse_csv(&text)?;
    let id_col = column(&header, "read_id")?;
    let count_cols: Vec<usize> = (0..3)
        .map(|i| column(&header, &format!("n_class_{i}")))
        .collect::<Result<_>>()?;

    let mut csv = Csv::new(
        "analyze barycentric",
        &format!("input={}", input.display()),
        cli.seed,
    );
    csv.comment(format!("classes: {}", classes.join(",")));
    csv.header(&["read_id", "x", "y", "source"]);
    for row in &rows {
        let counts: Vec<f64> = count_cols
            .iter()
            .map(|&c| row[c].parse::<f64>().map_err(anyhow::Error::from))
            .collect::<Result<_>>()?;
        let total: f64 = counts.iter().sum();
        let q: Vec<f64> = counts.iter().map(|&c| c / total).collect();
        let (x, y) = barycentric_coords(&q)?;
        let source = seqbound::readsim::source_from_id(&row[id_col]).unwrap_or("");
        csv.row(&[
            row[id_col].clone(),
            x.to_string(),
            y.to_string(),
            source.to_string(),
        ]);
    }
    write_output(csv_path, &cli.out, &csv.finish())
}

fn run_confusion(
    cli: &Cli,
    input: &Path,
    truth_path: Option<&Path>,
    csv_path: Option<&Path>,
) -> Result<()> {
    let text =
        std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let classes = classes_comment(&text)?;
    let (header, rows) = parse_csv(&text)?;
    let id_col = column(&header, "read_id")?;
    let dec_col = column(&header, "decision")?;

    let ids: Vec<String> = rows.iter().map(|r| r[id_col].clone()).collect();
    let truth = truth_lookup(&ids, truth_path)?;

    let class_index = |name: &str| -> Result<usize> {
        classes
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| anyhow!("label {name:?} is not among the classes {classes:?}"))
    };
    let mut truths = Vec::new();
    let mut decisions = Vec::new();
    for row in &rows {
        truths.push(class_index(&truth[&row[id_col]])?);
        decisions.push(class_index(&row[dec_col])?);
    }
    let m = confusion_matrix(&truths, &decisions, classes.len())?;

    let mut csv = Csv::new(
        "analyze confusion",
        &format!("input={}", input.display()),
        cli.seed,
    );
    csv.comment(format!("correct_rate: {}", m.correct_rate()));
    let mut hdr = vec!["source".to_string()];
    hdr.extend(classes.iter().cloned());
    hdr.push("sum".to_string());
    csv.header(&hdr.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    for (i, name) in classes.iter().enumerate() {
        let mut row = vec![name.clone()];
        row.extend(m.counts()[i].iter().map(|c| c.to_string()));
        row.push(m.row_sums()[i].to_string());
        csv.row(&row);
    }
    write_output(csv_path, &cli.out, &csv.finish())?;
    eprintln!("correct rate: {:.4}", m.correct_rate());
    Ok(())
}

fn run_crosstab(
    cli: &Cli,
    input: &Path,
    truth_path: Option<&Path>,
    csv_path: Option<&Path>,
) -> Result<()> {
    let text =
        std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let classes = classes_comment(&text)?;
    let (header, rows) = parse_csv(&text)?;
    let id_col = column(&header, "read_id")?;
    let status_col = column(&header, "boundary_status")?;

    let ids: Vec<String> = rows.iter().map(|r| r[id_col].clone()).collect();
    let truth = truth_lookup(&ids, truth_path)?;

    let mut sources = Vec::new();
    let mut statuses = Vec::new();
    for row in &rows {
        let src = &truth[&row[id_col]];
        let idx = classes
            .iter()
            .position(|c| c == src)
            .ok_or_else(|| anyhow!("source {src:?} is not among the classes {classes:?}"))?;
        sources.push(idx);
        statuses.push(row[status_col].parse::<usize>()?);
    }
    let tab = crosstab_boundary(&sources, &statuses, &classes, classes.len())?;
    let chi2 = chi_square_statistic(&tab.counts);

    let mut csv = Csv::new(
        "analyze crosstab",
        &format!("input={}", input.display()),
        cli.seed,
    );
    match chi2 {
        Ok(stat) => {
            csv.comment(format!("chi_square: {stat}"));
        }
        Err(_) => {
            csv.comment("chi_square: undefined (zero marginal)");
        }
    }
    let mut hdr = vec!["source".to_string()];
    hdr.extend((0..classes.len()).map(|s| format!("status_{s}")));
    hdr.push("sum".to_string());
    csv.header(&hdr.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    for (i, name) in tab.row_names.iter().enumerate() {
        let mut row = vec![name.clone()];
        row.extend(tab.counts[i].iter().map(|c| c.to_string()));
        row.push(tab.row_sums()[i].to_string());
        csv.row(&row);
    }
    write_output(csv_path, &cli.out, &csv.finish())
}
