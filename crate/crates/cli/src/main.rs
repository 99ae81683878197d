//! Command-line front end. Reports go to stdout as JSON, diagnostics to stderr.
//!
//! Exit codes: 0 success, 2 parse or usage error, 3 domain error,
//! 4 property violation.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use report::{CliError, Input, Report};
use specbound::io::{
    clustered_dataset, isotropic_dataset, parse_dataset, parse_matrix, random_dataset, random_matrix, random_spd,
    rng_from_seed, serialize_dataset, serialize_matrix,
};
use specbound::knn::{brute_force_neighbor, build_cache, nearest_neighbor};
use specbound::linalg::svd;
use specbound::rearrange::{product_spectrum_bounds, rectangular_product_bound, BoundsReport};
use specbound::schatten::schatten_product_bounds;
use specbound::spd_geometry::{ab_logdet_bounds, distance_bounds, AbParams};
use specbound::spectral::{epsilon_decades, loglog_slope, perturbation_check, s_f_of_values};
use specbound::verify::{run_suite, Suite};
use specbound::{Matrix, ScalarFunction, SpdMatrix};

#[derive(Parser)]
#[command(name = "specbound", version, about = "Spectral sums and eigenvalue-only bounds on matrix products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a spectral quantity.
    #[command(subcommand)]
    Compute(ComputeCommand),
    /// Bounds from the individual spectra against the exact value.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Run a seeded property suite; exits 4 on any violation.
    Verify(VerifyArgs),
    /// First-order expansion of S_f(X + eps Y) over decades of eps.
    Perturb(PerturbArgs),
    /// Exact 1-NN search with spectral lower-bound pruning.
    Knn(KnnArgs),
    /// Write seeded random inputs in the text formats.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Subcommand)]
enum ComputeCommand {
    /// S_f(X) = sum_i f(sigma_i(X)).
    Sf {
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        func: FunctionArgs,
    },
}

#[derive(Args, Clone)]
struct FunctionArgs {
    /// power | abs_log_pow | log | ab_general | ab_beta0 | ab_alpha0 | ab_neg
    #[arg(long = "fn", value_name = "NAME")]
    name: String,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
}

impl FunctionArgs {
    fn build(&self) -> Result<ScalarFunction, CliError> {
        Ok(ScalarFunction::by_name(&self.name, self.q, self.alpha, self.beta)?)
    }

    fn to_json(&self) -> Value {
        json!({ "fn": self.name, "q": self.q, "alpha": self.alpha, "beta": self.beta })
    }
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// S_f(AB) for square inputs, S_f(A B^T) for wide rectangular inputs.
    Product {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        func: FunctionArgs,
    },
    /// Schatten-q power sum of the product, any real q.
    Schatten {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
    },
    /// d_q(A, B)^q for SPD inputs, q >= 1.
    Distance {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        q: f64,
    },
    /// Alpha-Beta log-det divergence D(A || B).
    Ablogdet {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// rearrange | schatten | distance | ablogdet | perturb
    #[arg(long)]
    suite: Suite,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[command(flatten)]
    func: FunctionArgs,
    /// Number of step sizes: eps = 1e-2, 1e-3, ..., 1e-(K+1).
    #[arg(long, default_value_t = 5)]
    eps_decades: usize,
}

#[derive(Args)]
struct KnnArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Dataset file whose blocks are the queries.
    #[arg(long)]
    queries: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    /// Also run the unpruned scan and compare answers and timings.
    #[arg(long)]
    brute_force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetKind {
    Random,
    Clustered,
    Isotropic,
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// Gaussian matrix.
    Matrix {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// SPD matrix with a target condition number.
    Spd {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100.0)]
        condition: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// SPD dataset file.
    Dataset {
        #[arg(long, value_enum, default_value_t = DatasetKind::Random)]
        kind: DatasetKind,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Condition target for `random` items.
        #[arg(long, default_value_t = 100.0)]
        condition: f64,
    },
}

fn read(path: &Path) -> Result<(String, Input), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let input = Input::new(path, text.as_bytes());
    Ok((text, input))
}

fn load_matrix(path: &Path) -> Result<(Matrix, Input), CliError> {
    let (text, input) = read(path)?;
    let m = parse_matrix(&text).map_err(|e| CliError::in_file(path, e))?;
    Ok((m, input))
}

fn load_spd(path: &Path) -> Result<(SpdMatrix, Input), CliError> {
    let (m, input) = load_matrix(path)?;
    let p = SpdMatrix::new(m).map_err(|e| CliError::in_file(path, e))?;
    Ok((p, input))
}

fn bounds_json(r: &BoundsReport) -> Value {
    serde_json::to_value(r).expect("serializable")
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut report = match cli.command {
        Command::Compute(ComputeCommand::Sf { matrix, func }) => {
            let (x, input) = load_matrix(&matrix)?;
            let f = func.build()?;
            let sv = svd(&x)?.singular_values;
            let value = s_f_of_values(&sv, &f)?;
            Report::new("compute sf", vec![input], func.to_json(), json!({ "s_f": value, "singular_values": sv }))
        }
        Command::Bounds(cmd) => bounds(cmd)?,
        Command::Verify(args) => {
            let suite = args.suite;
            let r = run_suite(suite, args.trials, args.dim, args.seed)?;
            let violated = !r.passed();
            let params = json!({ "suite": suite, "trials": args.trials, "dim": args.dim, "seed": args.seed });
            let mut rep = Report::new("verify", vec![], params, serde_json::to_value(&r).expect("serializable"));
            rep.violation = violated;
            rep
        }
        Command::Perturb(args) => {
            let (x, ix) = load_matrix(&args.x)?;
            let (y, iy) = load_matrix(&args.y)?;
            let f = args.func.build()?;
            if args.eps_decades == 0 {
                return Err(CliError::Usage("--eps-decades must be at least 1".into()));
            }
            let eps = epsilon_decades(2, args.eps_decades);
            let r = perturbation_check(&x, &y, &f, &eps)?;
            let slope = loglog_slope(&r.epsilons, &r.abs_errors);
            let mut result = serde_json::to_value(&r).expect("serializable");
            result["loglog_slope"] = json!(slope);
            let mut params = args.func.to_json();
            params["eps_decades"] = json!(args.eps_decades);
            let mut rep = Report::new("perturb", vec![ix, iy], params, result);
            rep.violation = !r.superlinear;
            rep
        }
        Command::Knn(args) => knn(args)?,
        Command::Generate(cmd) => {
            let text = generate(cmd)?;
            print!("{text}");
            return Ok(Report::silent());
        }
    };
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn bounds(cmd: BoundsCommand) -> Result<Report, CliError> {
    let (name, inputs, params, r) = match cmd {
        BoundsCommand::Product { pair, func } => {
            let (a, ia) = load_matrix(&pair.a)?;
            let (b, ib) = load_matrix(&pair.b)?;
            let f = func.build()?;
            let r = if a.is_square() && b.is_square() {
                product_spectrum_bounds(&a, &b, &f)?
            } else {
                rectangular_product_bound(&a, &b, &f)?
            };
            ("bounds product", vec![ia, ib], func.to_json(), r)
        }
        BoundsCommand::Schatten { pair, q } => {
            let (a, ia) = load_matrix(&pair.a)?;
            let (b, ib) = load_matrix(&pair.b)?;
            ("bounds schatten", vec![ia, ib], json!({ "q": q }), schatten_product_bounds(&a, &b, q)?)
        }
        BoundsCommand::Distance { pair, q } => {
            let (a, ia) = load_spd(&pair.a)?;
            let (b, ib) = load_spd(&pair.b)?;
            ("bounds distance", vec![ia, ib], json!({ "q": q }), distance_bounds(&a, &b, q)?)
        }
        BoundsCommand::Ablogdet { pair, alpha, beta } => {
            let (a, ia) = load_spd(&pair.a)?;
            let (b, ib) = load_spd(&pair.b)?;
            let p = AbParams::new(alpha, beta)?;
            let params = json!({ "alpha": alpha, "beta": beta, "regime": p.regime() });
            ("bounds ablogdet", vec![ia, ib], params, ab_logdet_bounds(&a, &b, p)?)
        }
    };
    let mut rep = Report::new(name, inputs, params, bounds_json(&r));
    rep.violation = !r.satisfied;
    Ok(rep)
}

fn knn(args: KnnArgs) -> Result<Report, CliError> {
    let (dtext, id) = read(&args.dataset)?;
    let (qtext, iq) = read(&args.queries)?;
    let ds = parse_dataset(&dtext).map_err(|e| CliError::in_file(&args.dataset, e))?;
    let queries = parse_dataset(&qtext).map_err(|e| CliError::in_file(&args.queries, e))?;

    let t0 = Instant::now();
    let cache = build_cache(&ds)?;
    let mut results = Vec::with_capacity(queries.len());
    let mut answers = Vec::with_capacity(queries.len());
    let mut pruned_total = 0usize;
    for (query, qid) in queries.items().iter().zip(queries.ids()) {
        let r = nearest_neighbor(query, &ds, &cache, args.q)?;
        pruned_total += r.stats.pruned;
        results.push(json!({ "query_id": qid, "id": r.id, "distance": r.distance, "stats": r.stats }));
        answers.push(r);
    }
    let pruned_seconds = t0.elapsed().as_secs_f64();
    let fraction = if queries.is_empty() { 0.0 } else { pruned_total as f64 / (queries.len() * ds.len()) as f64 };
    let mut result = json!({
        "results": results,
        "mean_pruning_fraction": fraction,
        "pruned_seconds": pruned_seconds,
    });

    let mut violation = false;
    if args.brute_force {
        let t1 = Instant::now();
        let mut mismatches = Vec::new();
        for ((query, qid), pruned) in queries.items().iter().zip(queries.ids()).zip(&answers) {
            let b = brute_force_neighbor(query, &ds, args.q)?;
            if b.id != pruned.id || b.distance != pruned.distance {
                mismatches.push(json!({ "query_id": qid, "pruned": pruned.id, "brute_force": b.id }));
            }
        }
        violation = !mismatches.is_empty();
        result["brute_force_seconds"] = json!(t1.elapsed().as_secs_f64());
        result["mismatches"] = json!(mismatches);
    }
    let params = json!({ "q": args.q, "brute_force": args.brute_force, "dataset_size": ds.len(), "queries": queries.len() });
    let mut rep = Report::new("knn", vec![id, iq], params, result);
    rep.violation = violation;
    Ok(rep)
}

fn generate(cmd: GenerateCommand) -> Result<String, CliError> {
    Ok(match cmd {
        GenerateCommand::Matrix { rows, cols, seed } => {
            if rows == 0 || cols == 0 {
                return Err(CliError::Usage("rows and cols must be positive".into()));
            }
            serialize_matrix(&random_matrix(rows, cols, &mut rng_from_seed(seed)))
        }
        GenerateCommand::Spd { n, condition, seed } => serialize_matrix(random_spd(n, seed, condition)?.as_matrix()),
        GenerateCommand::Dataset { kind, count, n, seed, condition } => {
            let ds = match kind {
                DatasetKind::Random => random_dataset(count, n, seed, condition)?,
                DatasetKind::Clustered => clustered_dataset(count, n, seed, 0.05, 4.0)?,
                DatasetKind::Isotropic => {
                    let scales: Vec<f64> = (0..count).map(|k| (0.1 * k as f64).exp()).collect();
                    isotropic_dataset(&scales, n)?
                }
            };
            serialize_dataset(&ds)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => report.emit(),
        Err(e) => {
            eprintln!("error ({}): {e}", e.kind());
            ExitCode::from(e.exit_code())
        }
    }
}
