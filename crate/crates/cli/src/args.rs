//! Command-line argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "seqbound", version, about = "Triplet-model read classifier and boundary exploration toolkit", max_term_width = 100)]
pub struct Cli {
    /// Global random seed; every output records it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (default: one per CPU). Results are identical for
    /// any worker count.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Output directory for commands that write files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Triplet model utilities: estimate, compare, export.
    #[command(subcommand)]
    Model(ModelCommand),

    /// Classify reads; emits one CSV row per read.
    Classify(ClassifyArgs),

    /// Neighbor Similarity and boundary status per read.
    Ns(NsArgs),

    /// Boundary exploration strategies.
    #[command(subcommand)]
    Explore(ExploreCommand),

    /// Simulate genomes from models and reads from genomes.
    #[command(subcommand)]
    Simulate(SimulateCommand),

    /// Statistical reductions over classify/ns output.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),

    /// Named experiment recipes over freshly generated datasets.
    Replicate(ReplicateArgs),
}

#[derive(Subcommand, Debug)]
pub enum ModelCommand {
    /// Print the Hellinger distance between two models.
    Distance {
        /// Model file or bundled name (adeno, covid, sars).
        a: String,
        b: String,
    },
    /// Estimate a triplet model from a FASTA genome.
    Estimate {
        #[arg(long)]
        fasta: PathBuf,
        /// Class label stored in the model.
        #[arg(long)]
        label: String,
        /// Pseudocount added to every triplet cell.
        #[arg(long, default_value_t = 0.0)]
        pseudocount: f64,
        /// Output model path (default: <label>.json in --out).
        #[arg(long)]
        model_out: Option<PathBuf>,
    },
    /// Empirical null quantile of the Hellinger distance between a model
    /// and re-estimates from genomes simulated under it.
    Quantile {
        /// Model file or bundled name.
        model: String,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
        #[arg(long, default_value_t = 0.999)]
        q: f64,
    },
    /// Write the bundled models as JSON files into --out.
    Export,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Comma-separated model files or bundled names.
    #[arg(long, value_delimiter = ',', required_unless_present = "bundle")]
    pub models: Vec<String>,

    /// Classifier bundle JSON (`models` paths plus optional `prior`).
    #[arg(long, conflicts_with = "models")]
    pub bundle: Option<PathBuf>,

    /// Reads file: FASTA, FASTQ, or plain text (one sequence per line).
    #[arg(long)]
    pub reads: PathBuf,

    /// Prior weights, comma separated (default: uniform).
    #[arg(long, value_delimiter = ',')]
    pub prior: Option<Vec<f64>>,

    /// Output CSV (default: stdout).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NsArgs {
    #[arg(long, value_delimiter = ',', required_unless_present = "bundle")]
    pub models: Vec<String>,

    /// Classifier bundle JSON (`models` paths plus optional `prior`).
    #[arg(long, conflicts_with = "models")]
    pub bundle: Option<PathBuf>,

    #[arg(long)]
    pub reads: PathBuf,

    /// Sample this many neighbors instead of all of them.
    #[arg(long)]
    pub sample: Option<usize>,

    /// Use the 303-neighbor graph (no N substitutions).
    #[arg(long)]
    pub no_n: bool,

    /// Append max-posterior and entropy columns.
    #[arg(long)]
    pub with_posterior: bool,

    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ExploreCommand {
    /// Left-to-right Hamming paths from each origin to every
    /// differently-classified target.
    Hamming(ExploreHammingArgs),
    /// Uniform random walks from each origin.
    Walk(ExploreWalkArgs),
    /// Boundary crawls from each origin (origins must be boundary points).
    Crawl(ExploreCrawlArgs),
}

#[derive(Args, Debug)]
pub struct ExploreHammingArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub models: Vec<String>,
    /// Origin sequences (FASTA or plain text).
    #[arg(long)]
    pub origins: PathBuf,
    /// Target sequences; defaults to the origins file.
    #[arg(long)]
    pub targets: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also dump every boundary pair found.
    #[arg(long)]
    pub pairs_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExploreWalkArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub models: Vec<String>,
    #[arg(long)]
    pub origins: PathBuf,
    /// Steps per walk.
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    /// Classify every neighbor of every visited position instead of
    /// comparing to the predecessor only (much costlier, finds more).
    #[arg(long)]
    pub full_profile: bool,
    #[arg(long)]
    pub no_n: bool,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub pairs_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExploreCrawlArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub models: Vec<String>,
    #[arg(long)]
    pub origins: PathBuf,
    /// Maximum crawl length in boundary points.
    #[arg(long, default_value_t = 250)]
    pub max_steps: usize,
    #[arg(long)]
    pub no_n: bool,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub pairs_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum SimulateCommand {
    /// Simulate a genome from a triplet model.
    Genome {
        /// Model file or bundled name.
        #[arg(long)]
        model: String,
        #[arg(long)]
        length: usize,
        /// FASTA record id (default: the model label).
        #[arg(long)]
        id: Option<String>,
        /// Output FASTA (default: stdout).
        #[arg(long)]
        fasta_out: Option<PathBuf>,
    },
    /// Simulate fixed-length reads from a genome FASTA.
    Reads {
        #[arg(long)]
        genome: PathBuf,
        #[arg(long, default_value_t = 6.0)]
        coverage: f64,
        #[arg(long, default_value_t = 101)]
        length: usize,
        /// Per-base substitution probability.
        #[arg(long, default_value_t = 0.004)]
        sub_rate: f64,
        /// Per-base undetermined-base probability.
        #[arg(long, default_value_t = 0.0005)]
        n_rate: f64,
        /// Output FASTA (default: stdout). Headers carry src/off/idx
        /// ground-truth tags.
        #[arg(long)]
        fasta_out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum AnalyzeCommand {
    /// ROC curves for accepting decisions by max-posterior and by
    /// Neighbor Similarity, side by side.
    Roc {
        /// classify CSV (for decisions and max-posterior).
        #[arg(long)]
        classify: PathBuf,
        /// ns CSV (for Neighbor Similarity), joined on read_id.
        #[arg(long)]
        ns: PathBuf,
        /// Truth CSV `read_id,source` (default: parse `src=` tags).
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Per-read barycentric coordinates of the neighbor decision
    /// distribution, for triangle scatterplots.
    Barycentric {
        /// ns CSV.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Confusion matrix of a classify CSV against ground truth.
    Confusion {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Cross-tabulation of read source against boundary status.
    Crosstab {
        /// ns CSV.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Per-class quadratic fit of max-posterior on Neighbor Similarity.
    Quadfit {
        /// classify CSV (for decisions and max-posterior).
        #[arg(long)]
        classify: PathBuf,
        /// ns CSV, joined on read_id.
        #[arg(long)]
        ns: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Recipe {
    /// Confusion matrix for simulated reads from the bundled models.
    Table1,
    /// Boundary-status cross-tabs for the same reads.
    Table2,
    /// Efficiency comparison of the three exploration strategies.
    Table7,
    /// Decision and boundary percentages on alternative datasets.
    Table8,
    /// Neighbor-sampling RRMSE curve.
    Fig5,
    /// Null quantiles of the three bundled models.
    Quantiles,
}

#[derive(Args, Debug)]
pub struct ReplicateArgs {
    #[arg(value_enum)]
    pub recipe: Recipe,

    /// Scale factor on dataset sizes (0.1 = ten times smaller).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,

    /// Use the 303-neighbor graph where profiles are involved.
    #[arg(long)]
    pub no_n: bool,
}
