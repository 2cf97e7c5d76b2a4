use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

use tweetcast::pipeline::ExperimentSpec;
use tweetcast::Error;

/// Forecast outcomes from tweet attention and sentiment.
#[derive(Debug, Parser)]
#[command(name = "tweetcast", version, about)]
pub struct Cli {
    /// JSON experiment config; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Seed for every random choice.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Comma-separated predictor sets, each a `+`-joined list of
    /// avg-rate, rate-series, thcnt, weeks-since-release, pn-ratio,
    /// series:NAME.
    #[arg(long, global = true, value_name = "LIST")]
    predictors: Option<String>,

    /// Character n-gram order of the sentiment model [default: 8].
    #[arg(long, global = true, value_name = "N")]
    ngram_order: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load corpora, report record counts and per-topic matches.
    Ingest(commands::Inputs),
    /// Write per-topic attention features and author histograms.
    Features(commands::Inputs),
    /// Train the sentiment classifier and cross-validate it.
    SentimentTrain(commands::TrainArgs),
    /// Classify topic tweets with a trained model.
    SentimentApply(commands::ApplyArgs),
    /// Fit least squares on a design CSV.
    Fit(commands::FitArgs),
    /// AMAPE, Score and correlation of predictions against actuals.
    Evaluate(commands::EvaluateArgs),
    /// Generate a synthetic corpus, topics, labels and outcomes.
    Fixture(commands::FixtureArgs),
    /// Run every stage from a config file.
    RunAll,
}

/// Values shared by every subcommand, after merging config and flags.
pub struct Settings {
    pub spec: Option<ExperimentSpec>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub predictors: Option<String>,
    pub ngram_order: usize,
    pub folds: usize,
}

impl Settings {
    fn from_cli(cli: &Cli) -> Result<Self, Error> {
        let spec = cli.config.as_ref().map(ExperimentSpec::load).transpose()?;
        let from_spec = |f: fn(&ExperimentSpec) -> usize, default| spec.as_ref().map_or(default, f);
        Ok(Settings {
            seed: cli.seed.or(spec.as_ref().map(|s| s.seed)).unwrap_or(0),
            out: cli
                .out
                .clone()
                .or_else(|| spec.as_ref().map(|s| s.out.clone())),
            predictors: cli.predictors.clone(),
            ngram_order: cli
                .ngram_order
                .unwrap_or_else(|| from_spec(|s| s.ngram_order, 8)),
            folds: from_spec(|s| s.folds, 5),
            spec,
        })
    }

    pub fn out_dir(&self) -> Result<&PathBuf, Error> {
        self.out
            .as_ref()
            .ok_or_else(|| Error::Config("no output directory (use --out or a config)".into()))
    }
}

fn color_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stderr().is_terminal()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = err
                .chain()
                .find_map(|e| e.downcast_ref::<Error>())
                .map_or(2, Error::exit_code);
            let prefix = if color_enabled() {
                "\x1b[1;31merror\x1b[0m"
            } else {
                "error"
            };
            eprintln!("{prefix}: {err:#}");
            ExitCode::from(code as u8)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let settings = Settings::from_cli(&cli)?;
    let jobs = cli
        .jobs
        .or(settings.spec.as_ref().map(|s| s.jobs))
        .unwrap_or(0);
    if !matches!(cli.command, Command::RunAll) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    }
    match cli.command {
        Command::Ingest(args) => commands::ingest(&settings, &args),
        Command::Features(args) => commands::features(&settings, &args),
        Command::SentimentTrain(args) => commands::sentiment_train(&settings, &args),
        Command::SentimentApply(args) => commands::sentiment_apply(&settings, &args),
        Command::Fit(args) => commands::fit(&settings, &args),
        Command::Evaluate(args) => commands::evaluate(&settings, &args),
        Command::Fixture(args) => commands::fixture(&settings, &args),
        Command::RunAll => commands::run_all(settings, cli.jobs),
    }
}
