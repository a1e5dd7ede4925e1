//! `solrad` command-line interface.
//!
//! Exit codes: 0 success, 2 usage or configuration, 3 data / I/O / model
//! file, 4 numeric divergence during training.

pub mod artifact;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baselines::{
    build_slot_matrix, ewma_backtest, mean_abs_error, wcma_backtest, SlotForecast,
};
use crate::dataio::{
    format_sig6, histogram, monthly_stats, parse_csv, split_chronological, split_dataset,
    DatasetSplit, FeatureMatrix, Schema, WeatherRecord, DEFAULT_RATIOS, FEATURE_DIM, FEATURE_NAMES,
};
use crate::error::{Error, Result};
use crate::network::{param_count, LossKind, NetworkConfig, DEFAULT_HIDDEN, DEFAULT_LAMBDA};
use crate::optim::AdamHyper;
use crate::train::{evaluate, predictions, train, Evaluation, TrainConfig};
use artifact::{load_model, save_model, ModelArtifact, TrainingFingerprint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_DIVERGED: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_USAGE,
        Error::NumericDivergence { .. } => EXIT_DIVERGED,
        _ => EXIT_DATA,
    }
}

#[derive(Debug, Parser)]
#[command(name = "solrad", version, about = "Hourly solar radiation forecasting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train the network and write model.json, history.csv and summary.txt.
    Train(TrainArgs),
    /// Score a saved model on one partition of a data file.
    Eval(EvalArgs),
    /// Predict radiation for every row of a data file.
    Predict(PredictArgs),
    /// Back-test the EWMA and WCMA slot predictors.
    Baseline(BaselineArgs),
    /// Monthly means and a radiation histogram.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Weather CSV file.
    #[arg(long)]
    pub data: PathBuf,
    /// key=value file mapping fields to CSV column names.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output location (a directory, except for `predict` where it is a file).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Mse,
    Mae,
}

impl From<LossArg> for LossKind {
    fn from(l: LossArg) -> LossKind {
        match l {
            LossArg::Mse => LossKind::Mse,
            LossArg::Mae => LossKind::Mae,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "mse")]
    pub loss: LossArg,
    #[arg(long, default_value_t = 512)]
    pub batch: usize,
    #[arg(long, default_value_t = 152)]
    pub epochs: usize,
    #[arg(long, default_value_t = 10)]
    pub patience: usize,
    #[arg(long, default_value_t = 0.001)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.01)]
    pub decay: f64,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    /// Comma-separated hidden layer widths; a linear output unit is appended.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_HIDDEN)]
    pub layers: Vec<usize>,
    /// Split in file order instead of shuffling.
    #[arg(long)]
    pub chronological: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Partition {
    Train,
    Validation,
    Test,
    All,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value = "test")]
    pub partition: Partition,
    /// Loss to report; defaults to the one the model was trained with.
    #[arg(long, value_enum)]
    pub loss: Option<LossArg>,
    /// Write `timestamp,actual_wpm2,predicted_wpm2` for the partition.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0.7)]
    pub alpha: f64,
    #[arg(long, default_value_t = 4)]
    pub window: usize,
    #[arg(long, default_value_t = 60)]
    pub slot_minutes: u32,
    /// Use only this many prior days for WCMA historical means.
    #[arg(long)]
    pub history_days: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Train(a) => cmd_train(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Baseline(a) => cmd_baseline(&a),
        Command::Stats(a) => cmd_stats(&a),
    }
}

fn load_records(common: &Common) -> Result<Vec<WeatherRecord>> {
    let schema = match &common.schema {
        Some(p) => Schema::parse(&fs::read_to_string(p)?)?,
        None => Schema::default(),
    };
    parse_csv(File::open(&common.data)?, &schema)
}

fn out_dir(common: &Common) -> Result<&Path> {
    let dir = common
        .out
        .as_deref()
        .ok_or_else(|| Error::Config("--out DIR is required".into()))?;
    fs::create_dir_all(dir)?;
    Ok(dir)
}

fn make_split(n: usize, seed: u64, chronological: bool, ratios: [f64; 3]) -> Result<DatasetSplit> {
    if chronological {
        split_chronological(n, ratios)
    } else {
        split_dataset(n, seed, ratios)
    }
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let dir = out_dir(&args.common)?;
    let seed = args.common.seed.unwrap_or(42);
    let net_config = NetworkConfig::from_hidden(FEATURE_DIM, &args.layers, args.lambda);
    net_config.validate()?;
    let cfg = TrainConfig {
        batch_size: args.batch,
        max_epochs: args.epochs,
        patience: args.patience,
        loss_kind: args.loss.into(),
        seed,
        hyper: AdamHyper {
            alpha0: args.lr,
            decay: args.decay,
            ..AdamHyper::default()
        },
    };
    cfg.validate()?;

    let records = load_records(&args.common)?;
    let split = make_split(records.len(), seed, args.chronological, DEFAULT_RATIOS)?;
    let features = FeatureMatrix::fit_records(&records, &split.train)?;
    let (params, history) = train(&features, &split, &net_config, &cfg)?;

    let eval = |idx: &[usize]| -> Result<Option<Evaluation>> {
        if idx.is_empty() {
            return Ok(None);
        }
        evaluate(&net_config, &params, &features, idx, cfg.loss_kind).map(Some)
    };
    let (tr, va, te) = (
        eval(&split.train)?,
        eval(&split.validation)?,
        eval(&split.test)?,
    );

    let artifact = ModelArtifact::new(
        net_config.clone(),
        features.scaler().clone(),
        params.clone(),
        TrainingFingerprint {
            seed,
            loss: cfg.loss_kind,
            best_epoch: history.best_epoch,
            chronological: args.chronological,
            ratios: DEFAULT_RATIOS,
        },
    );
    save_model(&dir.join("model.json"), &artifact)?;
    fs::write(dir.join("history.csv"), history.to_csv())?;

    let mut summary = String::new();
    let _ = writeln!(summary, "loss={}", cfg.loss_kind);
    let _ = writeln!(summary, "seed={seed}");
    let _ = writeln!(summary, "param_count={}", param_count(&net_config));
    let _ = writeln!(summary, "rows={}", records.len());
    let _ = writeln!(summary, "epochs_run={}", history.epochs.len());
    let _ = writeln!(summary, "best_epoch={}", history.best_epoch);
    let _ = writeln!(summary, "stopped_early={}", history.stopped_early);
    for (name, e) in [("train", tr), ("validation", va), ("test", te)] {
        if let Some(e) = e {
            let _ = writeln!(summary, "{name}_loss={}", e.loss);
            let _ = writeln!(summary, "{name}_mae_wpm2={}", e.mae_wpm2);
        }
    }
    fs::write(dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn check_features(artifact: &ModelArtifact) -> Result<()> {
    let ok = artifact.net_config.input_dim == FEATURE_DIM
        && artifact
            .feature_names
            .iter()
            .map(String::as_str)
            .eq(FEATURE_NAMES);
    if ok {
        Ok(())
    } else {
        Err(Error::Schema(format!(
            "model expects features {:?}, this build encodes {:?}",
            artifact.feature_names, FEATURE_NAMES
        )))
    }
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let artifact = load_model(&args.model)?;
    check_features(&artifact)?;
    let records = load_records(&args.common)?;
    let fp = &artifact.training;
    let seed = args.common.seed.unwrap_or(fp.seed);
    let split = make_split(records.len(), seed, fp.chronological, fp.ratios)?;
    let indices: Vec<usize> = match args.partition {
        Partition::Train => split.train,
        Partition::Validation => split.validation,
        Partition::Test => split.test,
        Partition::All => (0..records.len()).collect(),
    };
    let features = FeatureMatrix::with_scaler(&records, artifact.scaler.clone())?;
    let kind = args.loss.map_or(fp.loss, LossKind::from);
    let e = evaluate(
        &artifact.net_config,
        &artifact.params,
        &features,
        &indices,
        kind,
    )?;

    if let Some(path) = &args.predictions {
        let preds = predictions(&artifact.net_config, &artifact.params, &features, &indices)?;
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "timestamp,actual_wpm2,predicted_wpm2")?;
        for (&i, &p) in indices.iter().zip(&preds) {
            writeln!(
                w,
                "{},{},{}",
                features.timestamp(i),
                records[i].radiation,
                features.scaler().unscale_target(p)
            )?;
        }
        w.flush()?;
    }
    let name = match args.partition {
        Partition::Train => "train",
        Partition::Validation => "validation",
        Partition::Test => "test",
        Partition::All => "all",
    };
    println!("rows={}", indices.len());
    println!("{name}_loss={}", e.loss);
    println!("{name}_mae_wpm2={}", e.mae_wpm2);
    Ok(())
}

pub fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let artifact = load_model(&args.model)?;
    check_features(&artifact)?;
    let records = load_records(&args.common)?;
    let features = FeatureMatrix::with_scaler(&records, artifact.scaler.clone())?;
    let all: Vec<usize> = (0..records.len()).collect();
    let preds = predictions(&artifact.net_config, &artifact.params, &features, &all)?;

    let sink: Box<dyn Write> = match &args.common.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    writeln!(w, "timestamp,predicted_wpm2")?;
    for (i, p) in preds.iter().enumerate() {
        writeln!(
            w,
            "{},{}",
            features.timestamp(i),
            features.scaler().unscale_target(*p)
        )?;
    }
    w.flush()?;
    Ok(())
}

fn write_forecasts(path: &Path, forecasts: &[SlotForecast]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "day,slot,observed,predicted,abs_error")?;
    for f in forecasts {
        writeln!(
            w,
            "{},{},{},{},{}",
            f.day,
            f.slot,
            f.observed,
            f.predicted,
            f.abs_error()
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_baseline(args: &BaselineArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.alpha) {
        return Err(Error::Config(format!(
            "--alpha must lie in [0, 1], got {}",
            args.alpha
        )));
    }
    if args.window == 0 {
        return Err(Error::Config("--window must be at least 1".into()));
    }
    let dir = out_dir(&args.common)?;
    let records = load_records(&args.common)?;
    let matrix = build_slot_matrix(&records, args.slot_minutes)?;
    if matrix.days() < 2 {
        return Err(Error::InsufficientHistory(format!(
            "data spans {} calendar day(s); baselines need at least 2",
            matrix.days()
        )));
    }
    if args.window >= matrix.slots() {
        return Err(Error::Config(format!(
            "--window {} leaves no predictable slot in a {}-slot day",
            args.window,
            matrix.slots()
        )));
    }
    let ewma = ewma_backtest(&matrix, args.alpha)?;
    let wcma = wcma_backtest(&matrix, args.alpha, args.window, args.history_days)?;
    write_forecasts(&dir.join("ewma.csv"), &ewma)?;
    write_forecasts(&dir.join("wcma.csv"), &wcma)?;

    let mut summary = String::new();
    let _ = writeln!(summary, "days={}", matrix.days());
    let _ = writeln!(summary, "slots={}", matrix.slots());
    for (name, f) in [("ewma", &ewma), ("wcma", &wcma)] {
        let _ = writeln!(summary, "{name}_forecasts={}", f.len());
        if let Some(mae) = mean_abs_error(f) {
            let _ = writeln!(summary, "{name}_mae_wpm2={mae}");
        }
    }
    fs::write(dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

pub fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let dir = out_dir(&args.common)?;
    let records = load_records(&args.common)?;
    let months = monthly_stats(&records)?;
    let radiation: Vec<f64> = records.iter().map(|r| r.radiation).collect();
    let bins = histogram(&radiation, args.bins)?;

    let mut monthly = String::from("year,month,mean_radiation,mean_temperature,mean_pressure\n");
    for m in &months {
        let _ = writeln!(
            monthly,
            "{},{},{},{},{}",
            m.year,
            m.month,
            format_sig6(m.mean_radiation),
            format_sig6(m.mean_temperature),
            format_sig6(m.mean_pressure)
        );
    }
    fs::write(dir.join("monthly_stats.csv"), &monthly)?;

    let mut hist = String::from("bin_low,bin_high,count\n");
    for b in &bins {
        let _ = writeln!(hist, "{},{},{}", b.low, b.high, b.count);
    }
    fs::write(dir.join("histogram.csv"), hist)?;
    print!("{monthly}");
    Ok(())
}
