//! The `diva` command line.
//!
//! Exit codes: 0 success, 1 gradient check failed, 2 usage or I/O error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use diva_core::derivative::{
    central_difference, finite_difference_gradient, finite_difference_jacobian,
    model_dataset_jacobian, val_loss_gradient,
};
use diva_core::loo::{loo_loss, loo_loss_with_gradient};
use diva_core::ridge::fit_weighted_ridge;
use diva_core::workflows::metrics::{detection_metrics, error_rate};
use diva_core::workflows::{
    default_lambda_grid, detect_detrimental, extend, lambda_grid_search, reweight, ExtendConfig,
    LooScope, ReweightConfig, ValidationMode,
};
use diva_core::{Dataset, SampleWeights, ValidationLoss};

use crate::error::{Error, Result};
use crate::io::{self, load_dataset, Format};
use crate::report::{save_report, Real, Report, Step};
use crate::synthetic::{generate_synthetic, random_instance, SyntheticSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Dataset derivatives for weighted ridge regression: reweight, extend and
/// curate training sets.
#[derive(Debug, Parser)]
#[command(name = "diva", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for commands that generate data.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Ridge penalty. Without this or --lambda-grid the default grid is searched.
    #[arg(long, global = true, conflicts_with = "lambda_grid")]
    pub lambda: Option<f64>,
    /// `default` (2^-20 ... 2^4) or a comma-separated list of penalties.
    #[arg(long, global = true, value_name = "GRID")]
    pub lambda_grid: Option<String>,
    /// Loss to differentiate. Defaults depend on the command.
    #[arg(long, global = true, value_enum)]
    pub loss: Option<LossArg>,
    /// Differentiate the leave-one-out loss or a held-out validation loss.
    #[arg(long, global = true, value_enum, default_value = "loo")]
    pub mode: ModeArg,
    /// Report path (JSON).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Matrix file format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Squared,
    Ce,
    CeMisclassified,
}

impl From<LossArg> for ValidationLoss {
    fn from(l: LossArg) -> Self {
        match l {
            LossArg::Squared => ValidationLoss::SquaredError,
            LossArg::Ce => ValidationLoss::CrossEntropy,
            LossArg::CeMisclassified => ValidationLoss::MisclassifiedCrossEntropy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Loo,
    Heldout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Divm,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Divm => Format::Divm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichArg {
    Val,
    Loo,
    Jacobian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Core,
    Merged,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Training features.
    #[arg(long)]
    pub features: PathBuf,
    /// Training labels: integer class column or label matrix.
    #[arg(long)]
    pub labels: PathBuf,
    /// Validation features (held-out mode).
    #[arg(long, requires = "val_labels")]
    pub val_features: Option<PathBuf>,
    #[arg(long, requires = "val_features")]
    pub val_labels: Option<PathBuf>,
    /// Test features, used only for reported error rates.
    #[arg(long, requires = "test_labels")]
    pub test_features: Option<PathBuf>,
    #[arg(long, requires = "test_features")]
    pub test_labels: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit ridge regression with unit weights.
    Fit {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Gradient descent on the sample weights.
    Reweight {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, default_value_t = 0.15)]
        lr: f64,
        /// Fail instead of clamping weights at zero.
        #[arg(long)]
        no_clamp: bool,
    },
    /// Greedily add pool samples with negative gradient.
    Extend {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        pool_features: PathBuf,
        #[arg(long)]
        pool_labels: PathBuf,
        /// Pool samples added per round.
        #[arg(long, default_value_t = 10)]
        batch: usize,
        /// Round cap (default: enough rounds to exhaust the pool).
        #[arg(long)]
        max_rounds: Option<usize>,
        /// Samples the LOO loss is summed over.
        #[arg(long, value_enum, default_value = "core")]
        loo_scope: ScopeArg,
    },
    /// Flag samples whose gradient is at least epsilon.
    Detect {
        #[command(flatten)]
        data: DataArgs,
        /// Threshold; accepts inf and -inf. The loss defaults to cross-entropy.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        epsilon: f64,
        /// Ground-truth detrimental indices, one per line, for F1 and AUC.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Closed-form leave-one-out predictions and losses.
    Loo {
        #[command(flatten)]
        data: DataArgs,
        /// Include the LOO loss gradient.
        #[arg(long)]
        gradient: bool,
    },
    /// Compare closed-form derivatives with finite differences.
    Gradcheck {
        #[arg(long, value_enum, default_value = "val")]
        which: WhichArg,
        /// Finite-difference step (default 1e-5, 1e-4 for jacobian).
        #[arg(long)]
        fd_step: Option<f64>,
        /// Maximum relative error (default 1e-4 squared, 1e-3 cross-entropy, 1e-5 jacobian).
        #[arg(long)]
        tolerance: Option<f64>,
        /// Training samples of the random instance.
        #[arg(long, default_value_t = 30)]
        n: usize,
        /// Feature dimension of the random instance.
        #[arg(long, default_value_t = 8)]
        m: usize,
        /// Classes of the random instance.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Validation samples of the random instance.
        #[arg(long, default_value_t = 10)]
        q: usize,
    },
    /// Write a noisy Gaussian-blob benchmark.
    Generate {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 200)]
        n_per_class: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        m: usize,
        #[arg(long, default_value_t = 4.0)]
        separation: f64,
        #[arg(long, default_value_t = 0.2)]
        noise: f64,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Caps the global thread pool from `DIVA_THREADS` (0 or unset: default).
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("DIVA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Invalid(format!("DIVA_THREADS: '{v}' is not a thread count")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Invalid(format!("DIVA_THREADS: {e}")))?;
    }
    Ok(())
}

struct Loaded {
    train: Dataset,
    val: Option<Dataset>,
    test: Option<Dataset>,
}

fn load(data: &DataArgs, g: &GlobalArgs) -> Result<Loaded> {
    let format = g.format.into();
    let train = load_dataset(&data.features, &data.labels, format)?;
    let pair = |f: &Option<PathBuf>, l: &Option<PathBuf>| -> Result<Option<Dataset>> {
        match (f, l) {
            (Some(f), Some(l)) => Ok(Some(load_dataset(f, l, format)?)),
            _ => Ok(None),
        }
    };
    let val = pair(&data.val_features, &data.val_labels)?;
    let test = pair(&data.test_features, &data.test_labels)?;
    match (g.mode, &val) {
        (ModeArg::Heldout, None) => {
            return Err(Error::Invalid(
                "--mode heldout requires --val-features and --val-labels".into(),
            ))
        }
        (ModeArg::Loo, Some(_)) => {
            return Err(Error::Invalid(
                "--val-features/--val-labels are only used with --mode heldout".into(),
            ))
        }
        _ => {}
    }
    for (name, d) in [("validation", &val), ("test", &test)] {
        if let Some(d) = d {
            if d.m() != train.m() || d.k() != train.k() {
                return Err(Error::Invalid(format!(
                    "{name} set has {} features and {} label columns, training set has {} and {}",
                    d.m(),
                    d.k(),
                    train.m(),
                    train.k()
                )));
            }
        }
    }
    Ok(Loaded { train, val, test })
}

fn mode(g: &GlobalArgs) -> ValidationMode {
    match g.mode {
        ModeArg::Loo => ValidationMode::Loo,
        ModeArg::Heldout => ValidationMode::HeldOut,
    }
}

/// Loss for reweighting: misclassified-only cross-entropy against
/// the LOO predictions, plain cross-entropy against a held-out set.
fn reweight_loss(g: &GlobalArgs) -> ValidationLoss {
    match (g.loss, g.mode) {
        (Some(l), _) => l.into(),
        (None, ModeArg::Loo) => ValidationLoss::MisclassifiedCrossEntropy,
        (None, ModeArg::Heldout) => ValidationLoss::CrossEntropy,
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    if spec.trim() == "default" {
        return Ok(default_lambda_grid());
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| *v > 0.0 && v.is_finite())
                .ok_or_else(|| {
                    Error::Invalid(format!(
                        "--lambda-grid: '{}' is not a positive number",
                        s.trim()
                    ))
                })
        })
        .collect()
}

/// `--lambda` if given, otherwise the best grid value under the unweighted
/// LOO squared error. The search table goes into the report.
fn resolve_lambda(g: &GlobalArgs, train: &Dataset, report: &mut Report) -> Result<f64> {
    if let Some(l) = g.lambda {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::Invalid(format!(
                "--lambda must be positive and finite, got {l}"
            )));
        }
        return Ok(l);
    }
    let grid = parse_grid(g.lambda_grid.as_deref().unwrap_or("default"))?;
    let search = lambda_grid_search(train, &grid, ValidationLoss::SquaredError)?;
    report.set_lambda_search(&search.per_lambda_loss);
    Ok(search.best_lambda)
}

fn add_test_error(
    report: &mut Report,
    key: &str,
    test: Option<&Dataset>,
    train: &Dataset,
    w: &SampleWeights,
    lambda: f64,
) -> Result<()> {
    if let Some(test) = test {
        let fit = fit_weighted_ridge(train, w, lambda)?;
        report.set_metric(
            key,
            error_rate(&fit.predict(test.features())?, test.labels())?,
        );
    }
    Ok(())
}

fn finish(report: &Report, g: &GlobalArgs) -> Result<()> {
    match &g.out {
        Some(path) => save_report(report, path),
        None => {
            print!("{}", report.to_json()?);
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Fit { data } => cmd_fit(data, g),
        Command::Reweight {
            data,
            steps,
            lr,
            no_clamp,
        } => cmd_reweight(data, g, *steps, *lr, !*no_clamp),
        Command::Extend {
            data,
            pool_features,
            pool_labels,
            batch,
            max_rounds,
            loo_scope,
        } => cmd_extend(
            data,
            g,
            pool_features,
            pool_labels,
            *batch,
            *max_rounds,
            *loo_scope,
        ),
        Command::Detect {
            data,
            epsilon,
            truth,
        } => cmd_detect(data, g, *epsilon, truth.as_deref()),
        Command::Loo { data, gradient } => cmd_loo(data, g, *gradient),
        Command::Gradcheck {
            which,
            fd_step,
            tolerance,
            n,
            m,
            k,
            q,
        } => cmd_gradcheck(g, *which, *fd_step, *tolerance, (*n, *m, *k, *q)),
        Command::Generate {
            out_dir,
            n_per_class,
            k,
            m,
            separation,
            noise,
        } => cmd_generate(
            g,
            out_dir,
            &SyntheticSpec {
                n_per_class: *n_per_class,
                k: *k,
                m: *m,
                class_separation: *separation,
                noise_fraction: *noise,
                seed: g.seed,
            },
        ),
    }
}

fn cmd_fit(data: &DataArgs, g: &GlobalArgs) -> Result<i32> {
    if g.mode == ModeArg::Heldout {
        return Err(Error::Invalid("fit does not use --mode heldout".into()));
    }
    let d = load(data, g)?;
    let mut report = Report::new("fit", 0.0);
    let lambda = resolve_lambda(g, &d.train, &mut report)?;
    report.lambda = Real(lambda);
    let loss: ValidationLoss = g.loss.map_or(ValidationLoss::SquaredError, Into::into);
    let ones = SampleWeights::ones(d.train.n());
    let fit = fit_weighted_ridge(&d.train, &ones, lambda)?;
    let pred = fit.predict(d.train.features())?;
    let train_loss = loss.total(&pred, d.train.labels())?;
    report.weights = ones.as_slice().iter().map(|&v| Real(v)).collect();
    report.trajectory.push(Step {
        step: 0,
        loss: Real(train_loss),
    });
    report.set_metric("train_loss", train_loss);
    report.set_metric("train_error_rate", error_rate(&pred, d.train.labels())?);
    add_test_error(
        &mut report,
        "test_error_rate",
        d.test.as_ref(),
        &d.train,
        &ones,
        lambda,
    )?;
    report.set_predictions(&pred);
    finish(&report, g)?;
    Ok(EXIT_OK)
}

fn cmd_reweight(
    data: &DataArgs,
    g: &GlobalArgs,
    steps: usize,
    lr: f64,
    clamp: bool,
) -> Result<i32> {
    let d = load(data, g)?;
    let mut report = Report::new("reweight", 0.0);
    let lambda = resolve_lambda(g, &d.train, &mut report)?;
    let config = ReweightConfig {
        steps,
        learning_rate: lr,
        loss: reweight_loss(g),
        clamp_nonnegative: clamp,
        validation_mode: mode(g),
    };
    let out = reweight(&d.train, lambda, &config, d.val.as_ref())?;
    let search = report.lambda_search.take();
    report = Report::from_curation("reweight", &out);
    report.lambda_search = search;
    let ones = SampleWeights::ones(d.train.n());
    add_test_error(
        &mut report,
        "baseline_test_error_rate",
        d.test.as_ref(),
        &d.train,
        &ones,
        lambda,
    )?;
    add_test_error(
        &mut report,
        "test_error_rate",
        d.test.as_ref(),
        &d.train,
        &out.final_weights,
        lambda,
    )?;
    finish(&report, g)?;
    Ok(EXIT_OK)
}

fn cmd_extend(
    data: &DataArgs,
    g: &GlobalArgs,
    pool_features: &Path,
    pool_labels: &Path,
    batch: usize,
    max_rounds: Option<usize>,
    scope: ScopeArg,
) -> Result<i32> {
    let d = load(data, g)?;
    let pool = load_dataset(pool_features, pool_labels, g.format.into())?;
    let mut report = Report::new("extend", 0.0);
    let lambda = resolve_lambda(g, &d.train, &mut report)?;
    let config = ExtendConfig {
        batch_size: batch,
        max_rounds,
        loss: g.loss.map_or(ValidationLoss::SquaredError, Into::into),
        validation_mode: mode(g),
        loo_scope: match scope {
            ScopeArg::Core => LooScope::Core,
            ScopeArg::Merged => LooScope::Merged,
        },
    };
    let out = extend(&d.train, &pool, lambda, &config, d.val.as_ref())?;
    let search = report.lambda_search.take();
    report = Report::from_curation("extend", &out);
    report.lambda_search = search;
    if let Some(test) = d.test.as_ref() {
        let merged = d.train.concat(&pool)?;
        let core_only = fit_weighted_ridge(&d.train, &SampleWeights::ones(d.train.n()), lambda)?;
        report.set_metric(
            "baseline_test_error_rate",
            error_rate(&core_only.predict(test.features())?, test.labels())?,
        );
        let fit = fit_weighted_ridge(&merged, &out.final_weights, lambda)?;
        report.set_metric(
            "test_error_rate",
            error_rate(&fit.predict(test.features())?, test.labels())?,
        );
    }
    finish(&report, g)?;
    Ok(EXIT_OK)
}

fn cmd_detect(data: &DataArgs, g: &GlobalArgs, epsilon: f64, truth: Option<&Path>) -> Result<i32> {
    let d = load(data, g)?;
    let mut report = Report::new("detect", 0.0);
    let lambda = resolve_lambda(g, &d.train, &mut report)?;
    let loss = g.loss.map_or(ValidationLoss::CrossEntropy, Into::into);
    let out = detect_detrimental(&d.train, lambda, loss, epsilon, mode(g), d.val.as_ref())?;
    let search = report.lambda_search.take();
    report = Report::from_curation("detect", &out);
    report.lambda_search = search;
    report.set_metric("epsilon", epsilon);
    if let Some(path) = truth {
        let indices = io::read_indices(path)?;
        let mut positives = vec![false; d.train.n()];
        for i in indices {
            if i >= positives.len() {
                return Err(Error::format(
                    path,
                    format!("index {i} out of range for {} samples", positives.len()),
                ));
            }
            positives[i] = true;
        }
        let scores = out.gradient.as_deref().unwrap_or_default();
        for (k, v) in detection_metrics(scores, &positives)? {
            report.set_metric(k, v);
        }
    }
    finish(&report, g)?;
    Ok(EXIT_OK)
}

fn cmd_loo(data: &DataArgs, g: &GlobalArgs, gradient: bool) -> Result<i32> {
    if g.mode == ModeArg::Heldout {
        return Err(Error::Invalid("loo does not use --mode heldout".into()));
    }
    let d = load(data, g)?;
    let mut report = Report::new("loo", 0.0);
    let lambda = resolve_lambda(g, &d.train, &mut report)?;
    report.lambda = Real(lambda);
    let loss: ValidationLoss = g.loss.map_or(ValidationLoss::SquaredError, Into::into);
    let ones = SampleWeights::ones(d.train.n());
    let out = if gradient {
        loo_loss_with_gradient(&d.train, &ones, lambda, loss, None)?
    } else {
        loo_loss(&d.train, &ones, lambda, loss)?
    };
    report.weights = ones.as_slice().iter().map(|&v| Real(v)).collect();
    report.trajectory.push(Step {
        step: 0,
        loss: Real(out.total_loss),
    });
    report.set_metric("loo_loss", out.total_loss);
    report.set_metric(
        "loo_error_rate",
        error_rate(&out.predictions, d.train.labels())?,
    );
    report.set_predictions(&out.predictions);
    report.per_sample_loss = Some(out.per_sample_loss.iter().map(|&v| Real(v)).collect());
    report.gradient = out
        .gradient
        .map(|gr| gr.values.into_iter().map(Real).collect());
    finish(&report, g)?;
    Ok(EXIT_OK)
}

/// `max |a − b| / max(|a|, |b|, 1e-6 · max|b|)`.
pub fn max_relative_error(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = (1e-6 * scale).max(f64::MIN_POSITIVE);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}

fn cmd_gradcheck(
    g: &GlobalArgs,
    which: WhichArg,
    fd_step: Option<f64>,
    tolerance: Option<f64>,
    (n, m, k, q): (usize, usize, usize, usize),
) -> Result<i32> {
    if g.lambda_grid.is_some() {
        return Err(Error::Invalid(
            "gradcheck takes --lambda, not --lambda-grid".into(),
        ));
    }
    if g.mode == ModeArg::Heldout {
        return Err(Error::Invalid("gradcheck uses --which, not --mode".into()));
    }
    let lambda = g.lambda.unwrap_or(0.5);
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Invalid(format!(
            "--lambda must be positive and finite, got {lambda}"
        )));
    }
    let loss: ValidationLoss = g.loss.map_or(ValidationLoss::SquaredError, Into::into);
    let (train, val, alpha) = random_instance(g.seed, n, m, k, q)?;
    let step = fd_step.unwrap_or(match which {
        WhichArg::Jacobian => 1e-4,
        _ => 1e-5,
    });
    let tol = tolerance.unwrap_or(match (which, loss) {
        (WhichArg::Jacobian, _) => 1e-5,
        (_, ValidationLoss::SquaredError) => 1e-4,
        _ => 1e-3,
    });
    let (closed, fd) = match which {
        WhichArg::Val => {
            let fit = fit_weighted_ridge(&train, &alpha, lambda)?;
            let c = val_loss_gradient(&fit, &train, &alpha, &val, loss)?;
            let f = finite_difference_gradient(&train, &alpha, lambda, &val, loss, step)?;
            (c.values, f.gradient.values)
        }
        WhichArg::Loo => {
            let c = loo_loss_with_gradient(&train, &alpha, lambda, loss, None)?
                .gradient
                .expect("gradient requested")
                .values;
            let f = central_difference(&alpha, step, |w| {
                Ok(loo_loss(&train, w, lambda, loss)?.total_loss)
            })?;
            (c, f.gradient.values)
        }
        WhichArg::Jacobian => {
            let fit = fit_weighted_ridge(&train, &alpha, lambda)?;
            let c = model_dataset_jacobian(&fit, &train)?;
            let f = finite_difference_jacobian(&train, &alpha, lambda, step)?;
            (c.as_slice().to_vec(), f.as_slice().to_vec())
        }
    };
    let err = max_relative_error(&closed, &fd);
    let pass = err < tol;
    println!(
        "gradcheck {}: max relative error {err:.3e} (tolerance {tol:.0e}) {}",
        match which {
            WhichArg::Val => "val",
            WhichArg::Loo => "loo",
            WhichArg::Jacobian => "jacobian",
        },
        if pass { "PASS" } else { "FAIL" }
    );
    if let Some(path) = &g.out {
        let mut report = Report::new("gradcheck", lambda);
        report.weights = alpha.as_slice().iter().map(|&v| Real(v)).collect();
        report.set_metric("max_relative_error", err);
        report.set_metric("tolerance", tol);
        report.set_metric("fd_step", step);
        report.set_metric("passed", if pass { 1.0 } else { 0.0 });
        if which != WhichArg::Jacobian {
            report.gradient = Some(closed.iter().map(|&v| Real(v)).collect());
        }
        save_report(&report, path)?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_generate(g: &GlobalArgs, out_dir: &Path, spec: &SyntheticSpec) -> Result<i32> {
    let s = generate_synthetic(spec)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let format: Format = g.format.into();
    let ext = format.extension();
    let path = |name: &str| out_dir.join(format!("{name}.{ext}"));
    io::write_matrix(&path("train_features"), s.train.features(), format)?;
    io::write_classes(&path("train_labels"), &s.train.classes(), format)?;
    io::write_matrix(&path("test_features"), s.test.features(), format)?;
    io::write_classes(&path("test_labels"), &s.test.classes(), format)?;
    io::write_indices(&out_dir.join("flipped.txt"), &s.flipped_indices)?;
    for note in &s.notes {
        eprintln!("note: {note}");
    }
    if let Some(out) = &g.out {
        let mut report = Report::new("generate", f64::NAN);
        report.selected_indices = s.flipped_indices.clone();
        report.notes = s.notes.clone();
        report.set_metric("n_train", s.train.n() as f64);
        report.set_metric("n_test", s.test.n() as f64);
        save_report(&report, out)?;
    }
    Ok(EXIT_OK)
}
