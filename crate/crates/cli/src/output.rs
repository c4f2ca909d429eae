//! Output plumbing: CSV assembly with reproducible headers, model
//! resolution, and file/stdout dispatch.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use seqbound::bayes::{BayesClassifier, Prior};
use seqbound::triplet::{bundled, TripletModel};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable naming a default directory for model files.
pub const MODEL_DIR_ENV: &str = "SEQBOUND_MODEL_DIR";

/// CSV document builder. Every file starts with comment lines recording
/// the tool version, the command, its parameters and the seed, so a run
/// can be reproduced from its output alone. Nothing time-dependent is
/// written: identical invocations produce identical bytes.
pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(command: &str, params: &str, seed: u64) -> Self {
        let lines = vec![
            format!("# seqbound {VERSION}"),
            format!("# command: {command}"),
            format!("# params: {params}"),
            format!("# seed: {seed}"),
        ];
        Csv { lines }
    }

    pub fn comment(&mut self, text: impl AsRef<str>) -> &mut Self {
        self.lines.push(format!("# {}", text.as_ref()));
        self
    }

    pub fn header(&mut self, columns: &[&str]) -> &mut Self {
        self.lines.push(columns.join(","));
        self
    }

    pub fn row(&mut self, fields: &[String]) -> &mut Self {
        self.lines.push(fields.join(","));
        self
    }

    pub fn finish(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

/// Commas would break the single-character-delimited layout; ids are the
/// only free-form field, so strip them there.
pub fn csv_id(id: &str) -> String {
    id.replace(',', "_")
}

/// Write `content` to `path` (resolved against `out_dir` when relative),
/// or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, out_dir: &Path, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            let full = resolve_out(p, out_dir);
            if let Some(parent) = full.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            fs::write(&full, content).with_context(|| format!("writing {}", full.display()))?;
            eprintln!("wrote {}", full.display());
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Write a recipe file under the output directory.
pub fn write_recipe_file(out_dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(path)
}

fn resolve_out(path: &Path, out_dir: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        out_dir.join(path)
    }
}

/// Resolve a model argument: an existing file path, a file under
/// `$SEQBOUND_MODEL_DIR`, or a bundled name (adeno, covid, sars).
pub fn resolve_model(name: &str) -> Result<TripletModel> {
    let path = Path::new(name);
    if path.is_file() {
        return TripletModel::load(path).with_context(|| format!("loading model {name}"));
    }
    if let Ok(dir) = std::env::var(MODEL_DIR_ENV) {
        for candidate in [
            Path::new(&dir).join(name),
            Path::new(&dir).join(format!("{name}.json")),
        ] {
            if candidate.is_file() {
                return TripletModel::load(&candidate)
                    .with_context(|| format!("loading model {}", candidate.display()));
            }
        }
    }
    if let Some(json) = bundled::json(name) {
        return Ok(TripletModel::from_json_str(json).expect("bundled model parses"));
    }
    bail!("model {name:?} is neither a file, a {MODEL_DIR_ENV} entry, nor a bundled name")
}

/// Build a classifier from model arguments and an optional prior.
pub fn build_classifier(names: &[String], prior: Option<&[f64]>) -> Result<BayesClassifier> {
    let models = names
        .iter()
        .map(|n| resolve_model(n))
        .collect::<Result<Vec<_>>>()?;
    let classifier = match prior {
        Some(w) => BayesClassifier::new(models, Prior::new(w.to_vec())?)?,
        None => BayesClassifier::with_uniform_prior(models)?,
    };
    Ok(classifier)
}

/// Classifier bundle: a JSON document naming the model files and,
/// optionally, prior weights. Relative model paths resolve against the
/// bundle's own directory; bundled names work too.
#[derive(serde::Deserialize)]
struct Bundle {
    models: Vec<String>,
    #[serde(default)]
    prior: Option<Vec<f64>>,
}

pub fn load_bundle(path: &Path) -> Result<BayesClassifier> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let bundle: Bundle =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let names: Vec<String> = bundle
        .models
        .iter()
        .map(|m| {
            let candidate = base.join(m);
            if candidate.is_file() {
                candidate.display().to_string()
            } else {
                m.clone()
            }
        })
        .collect();
    build_classifier(&names, bundle.prior.as_deref())
}

/// Either explicit model arguments or a bundle file.
pub fn classifier_from_args(
    models: &[String],
    bundle: Option<&Path>,
    prior: Option<&[f64]>,
) -> Result<BayesClassifier> {
    match bundle {
        Some(path) => {
            if !models.is_empty() || prior.is_some() {
                bail!("--bundle conflicts with --models/--prior");
            }
            load_bundle(path)
        }
        None => {
            if models.is_empty() {
                bail!("either --models or --bundle is required");
            }
            build_classifier(models, prior)
        }
    }
}

/// Parse a CSV produced by this tool: comment lines, then a header, then
/// rows. Returns (header, rows).
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|s| s.to_string()).collect();
        match &header {
            None => header = Some(fields),
            Some(h) => {
                if fields.len() != h.len() {
                    bail!("CSV row has {} fields, header has {}", fields.len(), h.len());
                }
                rows.push(fields);
            }
        }
    }
    let header = header.ok_or_else(|| anyhow!("CSV has no header line"))?;
    Ok((header, rows))
}

/// Column index by name.
pub fn column(header: &[String], name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| anyhow!("CSV is missing column {name:?}"))
}
