//! Command-line surface for scripted, reproducible runs.
//!
//! Every output file begins with `#` comment lines echoing the fully
//! resolved configuration, so a result can be regenerated from the file
//! alone. Exit code 0 means every requested artifact was written.

mod heatmap;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use ltdahp::ndarray::Array2;

use ltdahp::activation::ActivationKind;
use ltdahp::bench;
use ltdahp::estimator::{self, Scheme, DEFAULT_LAMBDA};
use ltdahp::modelsel::{self, Candidate};
use ltdahp::sphere;
use ltdahp::{Dataset64, Model64};

#[derive(Parser)]
#[command(
    name = "ltdahp",
    version,
    about = "Two-stage regression with deterministic hidden parameters"
)]
struct Cli {
    /// Cap internal (BLAS) parallelism; default uses all available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate equal-area sphere points; prints separation and energy.
    Points(PointsArgs),
    /// Fit a model on a CSV dataset and save it.
    Train(TrainArgs),
    /// Predict with a saved model; writes a predictions CSV.
    Predict(PredictArgs),
    /// Evaluate a saved model against labeled data; prints RMSE.
    Eval(EvalArgs),
    /// Synthetic-experiment protocols.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Render a phase-diagram CSV as a PNG heatmap.
    Heatmap(HeatmapArgs),
}

#[derive(Args)]
struct PointsArgs {
    /// Ambient dimension (points live on the sphere in R^d).
    #[arg(long)]
    d: usize,
    /// Number of points.
    #[arg(long)]
    n: usize,
    /// Riesz exponent for the printed energy (default: d).
    #[arg(long)]
    tau: Option<f64>,
    /// Energy-refinement steps (0 disables refinement).
    #[arg(long, default_value_t = 0)]
    refine_steps: usize,
    /// Relative-decrease stop for refinement.
    #[arg(long, default_value_t = 1e-10)]
    refine_tol: f64,
    #[arg(long, default_value = "points.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Training data CSV (headered; all rows are used for training).
    #[arg(long)]
    data: PathBuf,
    /// Header name of the target column.
    #[arg(long)]
    target: String,
    #[arg(long, default_value = "ltdahp")]
    scheme: String,
    /// Threshold count (deterministic scheme).
    #[arg(long)]
    l: Option<usize>,
    /// Inner-weight count override (ltdahp) or feature count (ltrahp).
    #[arg(long)]
    n: Option<usize>,
    /// Activation scale override.
    #[arg(long = "K")]
    scale: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value = "logistic")]
    activation: String,
    /// Generator seed; required for the random scheme.
    #[arg(long)]
    seed: Option<u64>,
    /// Select hyperparameters by k-fold cross-validation.
    #[arg(long)]
    cv: bool,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Explicit threshold-count grid for --cv (deterministic scheme).
    #[arg(long, value_delimiter = ',')]
    l_list: Option<Vec<usize>>,
    /// Explicit feature-count grid for --cv (random scheme).
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Explicit scale grid for --cv (random scheme).
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<f64>>,
    /// Where to write the per-fold cross-validation table.
    #[arg(long)]
    cv_out: Option<PathBuf>,
    #[arg(long, default_value = "model.txt")]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Target column to exclude from the features (must exist when given).
    #[arg(long)]
    target: Option<String>,
    #[arg(long, default_value = "predictions.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    target: String,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Write a sampled toy dataset as CSV.
    Toy(ToyArgs),
    /// Mean test RMSE over a (samples x features) grid.
    Phase(PhaseArgs),
    /// Error-decay study with cross-validated hyperparameters.
    Rate(RateArgs),
    /// Deterministic vs random assignment at matched feature count.
    Compare(CompareArgs),
}

#[derive(Args)]
struct ToyArgs {
    #[arg(long)]
    m: usize,
    /// Noise standard deviation.
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit exact targets instead of noisy ones.
    #[arg(long)]
    noiseless: bool,
    #[arg(long, default_value = "toy.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    m_list: Vec<usize>,
    /// Feature counts per cell.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value = "ltdahp")]
    scheme: String,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value = "phase.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct RateArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [125usize, 250, 500, 1000, 2000, 4000])]
    m_list: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value = "ltdahp")]
    scheme: String,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value = "rate.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Toy-problem sample sizes (ignored when --data is given).
    #[arg(long, value_delimiter = ',', default_values_t = [2000usize])]
    m_list: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    /// Compare on a real dataset instead of the toy problem.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    target: Option<String>,
    /// Train fraction of the shuffled real dataset.
    #[arg(long, default_value_t = 0.8)]
    split: f64,
    /// Cross-validate the random scheme's scale instead of matching it.
    #[arg(long)]
    tune_k: bool,
    #[arg(long, default_value = "compare.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct HeatmapArgs {
    /// Phase-diagram CSV produced by `bench phase`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "phase.png")]
    out: PathBuf,
    /// Pixel size of one grid cell.
    #[arg(long, default_value_t = 32)]
    cell: u32,
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Read by the BLAS runtime at first use; must precede any solve.
        std::env::set_var("OPENBLAS_NUM_THREADS", threads.to_string());
    }
    let result = match cli.command {
        Command::Points(args) => cmd_points(args, cli.threads),
        Command::Train(args) => cmd_train(args, cli.threads),
        Command::Predict(args) => cmd_predict(args, cli.threads),
        Command::Eval(args) => cmd_eval(args),
        Command::Bench(args) => cmd_bench(args, cli.threads),
        Command::Heatmap(args) => heatmap::cmd_heatmap(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn config_line(cmd: &str, pairs: &[(&str, String)]) -> String {
    let mut line = format!("# config cmd={cmd}");
    for (k, v) in pairs {
        line.push_str(&format!(" {k}={v}"));
    }
    line
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

fn threads_value(threads: Option<usize>) -> String {
    threads.map(|t| t.to_string()).unwrap_or_else(|| "default".into())
}

fn cmd_points(args: PointsArgs, threads: Option<usize>) -> anyhow::Result<()> {
    let tau = args.tau.unwrap_or(args.d as f64);
    let params = sphere::RieszParams::new(tau)?;
    let mut config = sphere::eq_points::<f64>(args.d, args.n)?;
    if args.refine_steps > 0 {
        config = sphere::refine_energy(&config, &params, args.refine_steps, args.refine_tol)?;
    }

    let echo = config_line(
        "points",
        &[
            ("d", args.d.to_string()),
            ("n", args.n.to_string()),
            ("tau", tau.to_string()),
            ("refine-steps", args.refine_steps.to_string()),
            ("refine-tol", args.refine_tol.to_string()),
            ("threads", threads_value(threads)),
            ("out", args.out.display().to_string()),
        ],
    );
    let mut buf = Vec::new();
    use std::io::Write;
    writeln!(buf, "{echo}")?;
    config.write_csv(&mut buf)?;
    std::fs::write(&args.out, buf)?;

    println!("min_pairwise_distance {:.17e}", sphere::min_pairwise_distance(&config));
    if args.n > 1 {
        println!("riesz_energy tau={tau} {:.17e}", sphere::riesz_energy(&config, &params)?);
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn parse_scheme(token: &str) -> anyhow::Result<Scheme> {
    Ok(Scheme::from_token(token)?)
}

fn cmd_train(args: TrainArgs, threads: Option<usize>) -> anyhow::Result<()> {
    let started = std::time::Instant::now();
    let scheme = parse_scheme(&args.scheme)?;
    let activation = ActivationKind::from_token(&args.activation)?;
    if scheme == Scheme::Ltrahp && args.seed.is_none() {
        bail!("--seed is required for the random scheme");
    }
    let data: Dataset64 =
        bench::load_csv(&args.data, &args.target).context("loading training data")?;

    let mut cv_summary = None;
    let model = match scheme {
        Scheme::Ltdahp => {
            let n_thresholds = if args.cv {
                let candidates: Vec<Candidate<f64>> = match &args.l_list {
                    Some(ls) => ls
                        .iter()
                        .map(|&l| Candidate::Ltdahp { n_thresholds: l, lambda: args.lambda })
                        .collect(),
                    None => modelsel::default_grids(data.input_dim(), data.n_samples())
                        .ltdahp_candidates(args.lambda),
                };
                let plan = modelsel::CvPlan {
                    folds: args.folds,
                    seed: args.seed.unwrap_or(0),
                    candidates,
                };
                let report = modelsel::cross_validate(&data, &plan)?;
                if let Some(path) = &args.cv_out {
                    write_cv_csv(path, &report, &args, threads)?;
                }
                let Candidate::Ltdahp { n_thresholds, .. } =
                    report.selected_candidate().candidate
                else {
                    unreachable!()
                };
                cv_summary = Some(report.summary());
                n_thresholds
            } else {
                args.l.context("--l is required without --cv")?
            };
            let mut params = estimator::LtdahpParams::new(n_thresholds);
            params.activation = activation;
            params.lambda = args.lambda;
            params.n_weights_override = args.n;
            params.scale_override = args.scale;
            println!("selected scheme=ltdahp l={n_thresholds} lambda={:e}", args.lambda);
            estimator::fit_ltdahp(&data, &params)?
        }
        Scheme::Ltrahp => {
            let seed = args.seed.expect("checked above");
            let (n_features, scale) = if args.cv {
                let candidates: Vec<Candidate<f64>> = match (&args.n_list, &args.k_list) {
                    (Some(ns), Some(ks)) => ns
                        .iter()
                        .flat_map(|&n| {
                            ks.iter().map(move |&k| Candidate::Ltrahp {
                                n_features: n,
                                scale: k,
                                lambda: args.lambda,
                            })
                        })
                        .collect(),
                    _ => modelsel::default_grids(data.input_dim(), data.n_samples())
                        .ltrahp_candidates(args.lambda),
                };
                let plan = modelsel::CvPlan { folds: args.folds, seed, candidates };
                let report = modelsel::cross_validate(&data, &plan)?;
                if let Some(path) = &args.cv_out {
                    write_cv_csv(path, &report, &args, threads)?;
                }
                let Candidate::Ltrahp { n_features, scale, .. } =
                    report.selected_candidate().candidate
                else {
                    unreachable!()
                };
                cv_summary = Some(report.summary());
                (n_features, scale)
            } else {
                let n = args.n.context("--n is required for ltrahp without --cv")?;
                let k = args.scale.context("--K is required for ltrahp without --cv")?;
                (n, k)
            };
            let mut params = estimator::LtrahpParams::new(n_features, scale, seed);
            params.activation = activation;
            params.lambda = args.lambda;
            println!(
                "selected scheme=ltrahp N={n_features} K={scale} lambda={:e} seed={seed}",
                args.lambda
            );
            estimator::fit_ltrahp(&data, &params)?
        }
    };
    if let Some(summary) = cv_summary {
        print!("{summary}");
    }

    let preds = estimator::predict(&model, data.inputs().view())?;
    let train_rmse = bench::rmse(preds.view(), data.targets().view())?;

    let echo = train_config_line(&args, threads);
    use std::io::Write;
    let mut out = format!("{echo}\n").into_bytes();
    model.write_to(&mut out)?;
    std::fs::write(&args.out, out)?;

    println!("train_rmse {train_rmse:.17e}");
    println!("train_seconds {:.3}", started.elapsed().as_secs_f64());
    println!("wrote {}", args.out.display());
    let _ = Write::flush(&mut std::io::stdout());
    Ok(())
}

fn train_config_line(args: &TrainArgs, threads: Option<usize>) -> String {
    config_line(
        "train",
        &[
            ("data", args.data.display().to_string()),
            ("target", args.target.clone()),
            ("scheme", args.scheme.clone()),
            ("l", opt(&args.l)),
            ("n", opt(&args.n)),
            ("K", opt(&args.scale)),
            ("lambda", format!("{:e}", args.lambda)),
            ("activation", args.activation.clone()),
            ("seed", opt(&args.seed)),
            ("cv", args.cv.to_string()),
            ("folds", args.folds.to_string()),
            ("threads", threads_value(threads)),
            ("out", args.out.display().to_string()),
        ],
    )
}

fn write_cv_csv(
    path: &Path,
    report: &modelsel::CvReport<f64>,
    args: &TrainArgs,
    threads: Option<usize>,
) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    use std::io::Write;
    writeln!(buf, "{}", train_config_line(args, threads))?;
    report.write_csv(&mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

/// Feature matrix for prediction: drop the named target column if given,
/// otherwise read every column as a feature.
fn load_features(path: &Path, target: &Option<String>) -> anyhow::Result<Array2<f64>> {
    if let Some(column) = target {
        let data: Dataset64 = bench::load_csv(path, column)?;
        return Ok(data.inputs().clone());
    }
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut n_cols = None;
    let mut rows: Vec<f64> = Vec::new();
    let mut n_rows = 0usize;
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        match n_cols {
            None => n_cols = Some(fields.len()), // header row
            Some(expected) => {
                if fields.len() != expected {
                    bail!("row {} has {} fields, header has {expected}", n_rows + 1, fields.len());
                }
                for f in fields {
                    rows.push(f.parse::<f64>().with_context(|| format!("bad number {f:?}"))?);
                }
                n_rows += 1;
            }
        }
    }
    let d = n_cols.context("empty file")?;
    if n_rows == 0 {
        bail!("no data rows in {}", path.display());
    }
    Ok(Array2::from_shape_vec((n_rows, d), rows)?)
}

fn cmd_predict(args: PredictArgs, threads: Option<usize>) -> anyhow::Result<()> {
    let model = Model64::load(&args.model).context("loading model")?;
    let features = load_features(&args.data, &args.target)?;
    let preds = estimator::predict(&model, features.view())?;

    let echo = config_line(
        "predict",
        &[
            ("model", args.model.display().to_string()),
            ("data", args.data.display().to_string()),
            ("target", opt(&args.target)),
            ("threads", threads_value(threads)),
            ("out", args.out.display().to_string()),
        ],
    );
    let mut buf = Vec::new();
    use std::io::Write;
    writeln!(buf, "{echo}")?;
    writeln!(buf, "prediction")?;
    for p in preds.iter() {
        writeln!(buf, "{p:.17e}")?;
    }
    std::fs::write(&args.out, buf)?;
    println!("wrote {} ({} predictions)", args.out.display(), preds.len());
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<()> {
    let model = Model64::load(&args.model).context("loading model")?;
    let data: Dataset64 = bench::load_csv(&args.data, &args.target)?;
    let preds = estimator::predict(&model, data.inputs().view())?;
    let err = bench::rmse(preds.view(), data.targets().view())?;
    println!("rmse {err:.17e}");
    Ok(())
}

fn cmd_bench(command: BenchCommand, threads: Option<usize>) -> anyhow::Result<()> {
    use std::io::Write;
    match command {
        BenchCommand::Toy(args) => {
            let data: Dataset64 = bench::gen_toy(args.m, args.sigma, args.seed, !args.noiseless)?;
            let echo = config_line(
                "bench-toy",
                &[
                    ("m", args.m.to_string()),
                    ("sigma", args.sigma.to_string()),
                    ("seed", args.seed.to_string()),
                    ("noiseless", args.noiseless.to_string()),
                    ("threads", threads_value(threads)),
                    ("out", args.out.display().to_string()),
                ],
            );
            let mut buf = Vec::new();
            writeln!(buf, "{echo}")?;
            writeln!(buf, "x1,x2,x3,y")?;
            for (row, y) in data.inputs().rows().into_iter().zip(data.targets().iter()) {
                writeln!(buf, "{:.17e},{:.17e},{:.17e},{:.17e}", row[0], row[1], row[2], y)?;
            }
            std::fs::write(&args.out, buf)?;
            println!("wrote {}", args.out.display());
        }
        BenchCommand::Phase(args) => {
            let scheme = parse_scheme(&args.scheme)?;
            let mut grid = bench::PhaseGrid::<f64>::new(
                args.m_list.clone(),
                args.n_list.clone(),
                args.repeats,
                scheme,
            );
            grid.sigma = args.sigma;
            grid.base_seed = args.seed;
            grid.lambda = args.lambda;
            let cells = bench::run_phase(&grid)?;

            let echo = config_line(
                "bench-phase",
                &[
                    ("m-list", join(&args.m_list)),
                    ("n-list", join(&args.n_list)),
                    ("repeats", args.repeats.to_string()),
                    ("scheme", args.scheme.clone()),
                    ("sigma", args.sigma.to_string()),
                    ("seed", args.seed.to_string()),
                    ("lambda", format!("{:e}", args.lambda)),
                    ("threads", threads_value(threads)),
                    ("out", args.out.display().to_string()),
                ],
            );
            let mut buf = Vec::new();
            writeln!(buf, "{echo}")?;
            writeln!(
                buf,
                "# cell shape: thresholds=round(N^(1/3)), weights=ceil(N/thresholds); skipped when N > min(8m, 4000)"
            )?;
            writeln!(buf, "m,N,mean_rmse,std_rmse,repeats,skipped")?;
            for c in cells {
                writeln!(
                    buf,
                    "{},{},{:.17e},{:.17e},{},{}",
                    c.m, c.n_features, c.mean_rmse, c.std_rmse, c.repeats, c.skipped as u8
                )?;
            }
            std::fs::write(&args.out, buf)?;
            println!("wrote {}", args.out.display());
        }
        BenchCommand::Rate(args) => {
            let scheme = parse_scheme(&args.scheme)?;
            let mut config =
                bench::RateConfig::<f64>::new(args.m_list.clone(), args.repeats, scheme);
            config.folds = args.folds;
            config.sigma = args.sigma;
            config.base_seed = args.seed;
            config.lambda = args.lambda;
            let result = bench::run_rate(&config)?;

            let echo = config_line(
                "bench-rate",
                &[
                    ("m-list", join(&args.m_list)),
                    ("repeats", args.repeats.to_string()),
                    ("folds", args.folds.to_string()),
                    ("scheme", args.scheme.clone()),
                    ("sigma", args.sigma.to_string()),
                    ("seed", args.seed.to_string()),
                    ("lambda", format!("{:e}", args.lambda)),
                    ("threads", threads_value(threads)),
                    ("out", args.out.display().to_string()),
                ],
            );
            let mut buf = Vec::new();
            writeln!(buf, "{echo}")?;
            writeln!(
                buf,
                "# slope={:.6} reference_exponent={:.6}",
                result.slope,
                bench::TOY_RATE_EXPONENT
            )?;
            writeln!(buf, "m,mean_sq_err,std")?;
            for row in &result.rows {
                writeln!(buf, "{},{:.17e},{:.17e}", row.m, row.mean_sq_err, row.std_sq_err)?;
            }
            std::fs::write(&args.out, buf)?;
            println!("slope {:.6}", result.slope);
            println!("reference_exponent {:.6}", bench::TOY_RATE_EXPONENT);
            println!("wrote {}", args.out.display());
        }
        BenchCommand::Compare(args) => {
            let scale_mode =
                if args.tune_k { bench::ScaleMode::Tuned } else { bench::ScaleMode::Matched };
            let mut rows = Vec::new();
            if let Some(data_path) = &args.data {
                let target = args.target.as_deref().context("--target required with --data")?;
                let (train, test) =
                    bench::load_csv_split::<f64>(data_path, target, args.split, args.seed)?;
                rows.extend(bench::run_compare_datasets(
                    &train,
                    &test,
                    args.repeats,
                    args.folds,
                    args.seed,
                    args.lambda,
                    scale_mode,
                )?);
            } else {
                for &m in &args.m_list {
                    let mut config = bench::CompareConfig::<f64>::new(m, args.repeats);
                    config.folds = args.folds;
                    config.sigma = args.sigma;
                    config.base_seed = args.seed;
                    config.lambda = args.lambda;
                    config.scale_mode = scale_mode;
                    rows.extend(bench::run_compare(&config)?);
                }
            }

            let echo = config_line(
                "bench-compare",
                &[
                    ("m-list", join(&args.m_list)),
                    ("repeats", args.repeats.to_string()),
                    ("folds", args.folds.to_string()),
                    ("sigma", args.sigma.to_string()),
                    ("seed", args.seed.to_string()),
                    ("lambda", format!("{:e}", args.lambda)),
                    (
                        "data",
                        args.data
                            .as_ref()
                            .map(|p| p.display().to_string())
                            .unwrap_or_else(|| "-".into()),
                    ),
                    ("target", opt(&args.target)),
                    ("split", args.split.to_string()),
                    ("tune-k", args.tune_k.to_string()),
                    ("threads", threads_value(threads)),
                    ("out", args.out.display().to_string()),
                ],
            );
            let mut buf = Vec::new();
            writeln!(buf, "{echo}")?;
            writeln!(buf, "scheme,m,N,mean_rmse,std,train_seconds")?;
            for r in &rows {
                writeln!(
                    buf,
                    "{},{},{},{:.17e},{:.17e},{:.3}",
                    r.scheme, r.m, r.n_features, r.mean_rmse, r.std_rmse, r.train_seconds
                )?;
            }
            std::fs::write(&args.out, buf)?;
            for r in &rows {
                println!(
                    "{} m={} N={} mean_rmse={:.6e} std={:.6e}",
                    r.scheme, r.m, r.n_features, r.mean_rmse, r.std_rmse
                );
            }
            println!("wrote {}", args.out.display());
        }
    }
    Ok(())
}

fn join(values: &[usize]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}
