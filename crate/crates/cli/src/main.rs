use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ipkde::baselines::{dbscan, kmeans, knn_dist_profile, pam, NoiseConvention};
use ipkde::datagen::{gen_s1, gen_s3, gen_s4};
use ipkde::io::{self, CsvOptions, RunReportFile, ScanReportFile, SchemaFile};
use ipkde::pca::pca2;
use ipkde::plot::render_svg_scatter;
use ipkde::validation::accuracy;
use ipkde::{
    pairwise_matrix, scan, sm_cluster, DataMatrix, DistanceMatrix, DistanceMeasure, Error,
    HyperParams, MergePolicy,
};

#[derive(Parser)]
#[command(name = "ipkde", version, about = "Clustering from interpoint distances by kernel density estimation")]
struct Cli {
    /// Log verbosity; repeat for more detail.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster one dataset with fixed hyperparameters.
    Cluster(ClusterArgs),
    /// Cluster over a grid of hyperparameters and keep the best ASW.
    Scan(ScanArgs),
    /// Write a synthetic benchmark dataset.
    Gen(GenArgs),
    /// Run a reference clustering method.
    Baseline(BaselineArgs),
    /// Sorted k-th nearest neighbor distances, for choosing DBSCAN's eps.
    KnnProfile(KnnArgs),
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// JSON file declaring column types.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Column holding ground-truth labels; excluded from the features.
    #[arg(long)]
    labels_col: Option<String>,
    /// The input has no header row.
    #[arg(long)]
    no_header: bool,
    #[arg(long, value_enum, default_value_t = Distance::Euclidean)]
    distance: Distance,
}

#[derive(Clone, Copy, ValueEnum)]
enum Distance {
    Euclidean,
    Gower,
    Geodesic,
    Precomputed,
}

impl From<Distance> for DistanceMeasure {
    fn from(d: Distance) -> Self {
        match d {
            Distance::Euclidean => DistanceMeasure::Euclidean,
            Distance::Gower => DistanceMeasure::Gower,
            Distance::Geodesic => DistanceMeasure::GeodesicSphere,
            Distance::Precomputed => DistanceMeasure::Precomputed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Merge {
    AswGuard,
    Always,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    h: f64,
    #[arg(long)]
    n_prime: usize,
    /// Keep the first normalization for every round.
    #[arg(long)]
    no_renormalize_rounds: bool,
    #[arg(long, value_enum, default_value_t = Merge::AswGuard)]
    merge_policy: Merge,
    #[arg(long)]
    report: PathBuf,
    /// Per-row cluster labels as CSV.
    #[arg(long)]
    assign: Option<PathBuf>,
    /// SVG scatter of the clusters.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Plot the first two principal components instead of the raw columns.
    #[arg(long, requires = "plot")]
    pca: bool,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    h: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    n_prime: Vec<usize>,
    #[arg(long)]
    no_renormalize_rounds: bool,
    #[arg(long, value_enum, default_value_t = Merge::AswGuard)]
    merge_policy: Merge,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dataset {
    S1,
    S3,
    S4,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    dataset: Dataset,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Kmeans,
    Pam,
    Dbscan,
}

#[derive(Clone, Copy, ValueEnum)]
enum Noise {
    AsGroup,
    Exclude,
    Singletons,
}

impl From<Noise> for NoiseConvention {
    fn from(n: Noise) -> Self {
        match n {
            Noise::AsGroup => NoiseConvention::AsGroup,
            Noise::Exclude => NoiseConvention::Exclude,
            Noise::Singletons => NoiseConvention::Singletons,
        }
    }
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[command(flatten)]
    input: InputArgs,
    /// Number of clusters (k-means, PAM).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Neighborhood radius (DBSCAN).
    #[arg(long)]
    eps: Option<f64>,
    /// Minimum neighborhood size, point included (DBSCAN).
    #[arg(long)]
    min_pts: Option<usize>,
    /// How DBSCAN noise enters the silhouette.
    #[arg(long, value_enum, default_value_t = Noise::AsGroup)]
    noise_convention: Noise,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct KnnArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
}

/// Why a command failed, mapped to the process exit code.
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Lib(Error::InvalidParameter(_)) => 1,
            Failure::Lib(Error::Degenerate(_)) => 3,
            Failure::Lib(_) => 2,
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

/// Loaded input: features when available, and the raw distance matrix.
struct Loaded {
    data: Option<DataMatrix>,
    distances: DistanceMatrix,
    measure: DistanceMeasure,
}

fn load_data(args: &InputArgs) -> CliResult<DataMatrix> {
    let schema = args.schema.as_ref().map(SchemaFile::load).transpose()?;
    let opts = CsvOptions {
        has_header: !args.no_header,
        label_column: args.labels_col.clone(),
        schema,
    };
    Ok(io::load_csv(&args.input, &opts)?)
}

fn load(args: &InputArgs) -> CliResult<Loaded> {
    let measure = DistanceMeasure::from(args.distance);
    if let DistanceMeasure::Precomputed = measure {
        if args.schema.is_some() || args.labels_col.is_some() {
            return Err(Failure::Usage(
                "--schema and --labels-col do not apply to precomputed distances".into(),
            ));
        }
        let distances = io::load_distance_csv(&args.input, !args.no_header)?;
        return Ok(Loaded {
            data: None,
            distances,
            measure,
        });
    }
    let data = load_data(args)?;
    let distances = pairwise_matrix(&data, measure)?;
    Ok(Loaded {
        data: Some(data),
        distances,
        measure,
    })
}

fn truth_accuracy(data: Option<&DataMatrix>, labels: &[usize]) -> CliResult<Option<f64>> {
    match data.and_then(DataMatrix::labels) {
        Some(truth) => Ok(Some(accuracy(labels, truth)?)),
        None => Ok(None),
    }
}

fn hyper_params(h: f64, n_prime: usize, no_renorm: bool, merge: Merge) -> CliResult<HyperParams> {
    let policy = match merge {
        Merge::AswGuard => MergePolicy::AswGuard,
        Merge::Always => MergePolicy::Always,
    };
    Ok(HyperParams::new(h, n_prime)?
        .with_renormalize(!no_renorm)
        .with_merge_policy(policy))
}

fn write_assignments(path: &Path, labels: &[usize]) -> CliResult {
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| vec![i as f64, l as f64])
        .collect();
    let table = DataMatrix::from_rows(&rows)?.with_names(vec!["row".into(), "cluster".into()])?;
    io::write_csv(path, &table)?;
    Ok(())
}

fn plot(path: &Path, data: Option<&DataMatrix>, labels: &[usize], use_pca: bool) -> CliResult {
    let data = data.ok_or_else(|| {
        Failure::Usage("plotting needs feature data, not precomputed distances".into())
    })?;
    let points: Vec<[f64; 2]> = if use_pca || data.p() > 2 {
        pca2(data)?.projection
    } else if data.p() == 2 {
        data.rows().map(|r| [r[0], r[1]]).collect()
    } else {
        data.rows().enumerate().map(|(i, r)| [i as f64, r[0]]).collect()
    };
    render_svg_scatter(&points, labels, path)?;
    Ok(())
}

fn cmd_cluster(args: &ClusterArgs) -> CliResult {
    let params = hyper_params(args.h, args.n_prime, args.no_renormalize_rounds, args.merge_policy)?;
    let input = load(&args.input)?;
    let report = sm_cluster(&input.distances, &params)?;
    let labels = report.assignment.labels();
    let file = RunReportFile::from_cluster_report(&report, input.measure)
        .with_accuracy(truth_accuracy(input.data.as_ref(), labels)?);
    io::write_report(&args.report, &file)?;
    if let Some(path) = &args.assign {
        write_assignments(path, labels)?;
    }
    if let Some(path) = &args.plot {
        plot(path, input.data.as_ref(), labels, args.pca)?;
    }
    log::info!("K = {}, ASW = {:?}", report.k(), report.asw);
    Ok(())
}

fn cmd_scan(args: &ScanArgs) -> CliResult {
    let defaults = hyper_params(
        args.h[0],
        args.n_prime[0],
        args.no_renormalize_rounds,
        args.merge_policy,
    )?;
    let input = load(&args.input)?;
    let result = scan(&input.distances, &args.h, &args.n_prime, &defaults)?;
    let mut file = ScanReportFile::from_scan(&result, input.measure);
    file.best_report.accuracy =
        truth_accuracy(input.data.as_ref(), result.best_report.assignment.labels())?;
    io::write_scan_report(&args.report, &file)?;
    let best = result.best_row();
    log::info!("best (h, n') = ({}, {}), K = {}", best.h, best.n_prime, best.k_hat);
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> CliResult {
    let data = match args.dataset {
        Dataset::S1 => gen_s1(args.seed),
        Dataset::S3 => gen_s3(args.seed),
        Dataset::S4 => gen_s4(args.seed),
    };
    io::write_csv(&args.out, &data)?;
    Ok(())
}

fn required<T: Copy>(value: Option<T>, flag: &str, algo: &str) -> CliResult<T> {
    value.ok_or_else(|| Failure::Usage(format!("{algo} needs {flag}")))
}

fn optional_asw(labels: &[usize], d: &DistanceMatrix) -> CliResult<Option<f64>> {
    match ipkde::validation::silhouette_of_labels(labels, d) {
        Ok(p) => Ok(Some(p.asw)),
        Err(Error::AswUndefined) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn cmd_baseline(args: &BaselineArgs) -> CliResult {
    let file = match args.algo {
        Algo::Kmeans => {
            let k = required(args.k, "--k", "kmeans")?;
            if !matches!(args.input.distance, Distance::Euclidean) {
                return Err(Failure::Usage("kmeans works on euclidean data only".into()));
            }
            let data = load_data(&args.input)?;
            let r = kmeans(&data, k, args.seed, args.restarts)?;
            let d = pairwise_matrix(&data, DistanceMeasure::Euclidean)?;
            let asw = optional_asw(r.assignment.labels(), &d)?;
            RunReportFile::from_kmeans(&r, args.restarts, args.seed, asw)
                .with_accuracy(truth_accuracy(Some(&data), r.assignment.labels())?)
        }
        Algo::Pam => {
            let k = required(args.k, "--k", "pam")?;
            let input = load(&args.input)?;
            let r = pam(&input.distances, k)?;
            let asw = optional_asw(r.assignment.labels(), &input.distances)?;
            RunReportFile::from_pam(&r, input.measure, asw)
                .with_accuracy(truth_accuracy(input.data.as_ref(), r.assignment.labels())?)
        }
        Algo::Dbscan => {
            let eps = required(args.eps, "--eps", "dbscan")?;
            let min_pts = required(args.min_pts, "--min-pts", "dbscan")?;
            let input = load(&args.input)?;
            let r = dbscan(&input.distances, eps, min_pts)?;
            let convention = NoiseConvention::from(args.noise_convention);
            let asw = match r.asw(&input.distances, convention) {
                Ok(v) => Some(v),
                Err(Error::AswUndefined) => None,
                Err(e) => return Err(e.into()),
            };
            RunReportFile::from_dbscan(&r, input.measure, convention, asw)
        }
    };
    io::write_report(&args.report, &file)?;
    Ok(())
}

fn cmd_knn(args: &KnnArgs) -> CliResult {
    let input = load(&args.input)?;
    let profile = knn_dist_profile(&input.distances, args.k)?;
    io::write_profile(&args.out, ["rank", "knn_distance"], &profile)?;
    Ok(())
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Cluster(a) => cmd_cluster(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::KnnProfile(a) => cmd_knn(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Lib(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
