use std::fs::{self, File};
use std::io::{BufReader, BufWriter, IsTerminal, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use serde_json::json;

use tweetcast::corpus::{load_topics, TopicSpec, Tweet};
use tweetcast::features::{author_stats, loglog_slope, write_feature_table};
use tweetcast::fixture::{make_fixture, write_fixture, Scale};
use tweetcast::pipeline::{
    classify_topic, feature_rows, load_corpora, match_topics, parse_predictor_list, run_pipeline,
    slug, topic_features, topic_of_tweet, train_sentiment, weekly_polarity,
    write_author_histograms, CorpusStats,
};
use tweetcast::regress::{amape, fit_ols, pearson, score, DesignMatrix};
use tweetcast::sentiment::{load_labels, write_classifications, Classification, SentimentModel};
use tweetcast::Error;

use crate::Settings;

#[derive(Debug, Args)]
pub struct Inputs {
    /// JSONL corpus file; repeat for several.
    #[arg(long = "corpus", value_name = "PATH")]
    corpora: Vec<PathBuf>,
    /// Topics JSON file.
    #[arg(long, value_name = "PATH")]
    topics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled samples, one JSON object per line.
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,
    /// Topics whose keywords are masked during preprocessing.
    #[arg(long, value_name = "PATH")]
    topics: Option<PathBuf>,
    /// Cross-validation folds.
    #[arg(long, value_name = "N")]
    folds: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    /// Model written by sentiment-train.
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    #[command(flatten)]
    inputs: Inputs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with an optional `id` column, predictors and the response.
    #[arg(long, value_name = "PATH")]
    design: PathBuf,
    /// Response column.
    #[arg(long, value_name = "NAME")]
    response: String,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// CSV holding predictions and actual values.
    #[arg(long, value_name = "PATH")]
    predictions: PathBuf,
    #[arg(long, default_value = "predicted", value_name = "NAME")]
    predicted: String,
    #[arg(long, default_value = "actual", value_name = "NAME")]
    actual: String,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    /// small or full.
    #[arg(long, default_value = "full")]
    scale: String,
}

fn config_error(msg: &str) -> anyhow::Error {
    Error::Config(msg.to_string()).into()
}

fn resolve_inputs(settings: &Settings, args: &Inputs) -> anyhow::Result<(Vec<PathBuf>, PathBuf)> {
    let corpora = if args.corpora.is_empty() {
        settings
            .spec
            .as_ref()
            .map(|s| s.corpora.clone())
            .unwrap_or_default()
    } else {
        args.corpora.clone()
    };
    if corpora.is_empty() {
        return Err(config_error("no corpus given (use --corpus or a config)"));
    }
    let topics = args
        .topics
        .clone()
        .or_else(|| settings.spec.as_ref().map(|s| s.topics.clone()))
        .ok_or_else(|| config_error("no topics file given (use --topics or a config)"))?;
    Ok((corpora, topics))
}

struct Loaded {
    tweets: Vec<Tweet>,
    stats: Vec<CorpusStats>,
    topics: Vec<TopicSpec>,
    matches: Vec<Vec<usize>>,
}

impl Loaded {
    fn topic_tweets(&self) -> Vec<Vec<&Tweet>> {
        self.matches
            .iter()
            .map(|idx| idx.iter().map(|&i| &self.tweets[i]).collect())
            .collect()
    }
}

fn load(settings: &Settings, args: &Inputs) -> anyhow::Result<Loaded> {
    let (corpora, topics_path) = resolve_inputs(settings, args)?;
    let topics = load_topics(&topics_path).map_err(|e| e.in_stage("corpus"))?;
    let (tweets, stats) = load_corpora(&corpora).map_err(|e| e.in_stage("corpus"))?;
    let matches = match_topics(&tweets, &topics);
    Ok(Loaded {
        tweets,
        stats,
        topics,
        matches,
    })
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::Io {
            path: parent.to_path_buf(),
            source: e,
        })?;
    }
    let file = File::create(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(BufWriter::new(file))
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("valid JSON")
    );
}

pub fn ingest(settings: &Settings, args: &Inputs) -> anyhow::Result<()> {
    let loaded = load(settings, args)?;
    let topics: Vec<_> = loaded
        .topics
        .iter()
        .zip(&loaded.matches)
        .map(|(t, m)| json!({ "name": t.name, "matched": m.len() }))
        .collect();
    print_json(&json!({
        "corpora": loaded.stats,
        "tweets": loaded.tweets.len(),
        "topics": topics,
    }));
    Ok(())
}

pub fn features(settings: &Settings, args: &Inputs) -> anyhow::Result<()> {
    let loaded = load(settings, args)?;
    let out = settings.out_dir()?;
    let topic_tweets = loaded.topic_tweets();
    let mut rows = Vec::new();
    for (topic, tw) in loaded.topics.iter().zip(&topic_tweets) {
        rows.extend(feature_rows(topic, &topic_features(topic, tw), None));
    }
    let path = out.join("features.csv");
    write_feature_table(create(&path)?, &rows).with_context(|| path.display().to_string())?;

    let topic_of = topic_of_tweet(&loaded.tweets, &loaded.topics, &loaded.matches);
    let authors = author_stats(&loaded.tweets, &topic_of);
    let path = out.join("authors.csv");
    write_author_histograms(create(&path)?, &authors)
        .with_context(|| path.display().to_string())?;
    let slope = loglog_slope(
        authors
            .tweets_per_author
            .iter()
            .map(|(&c, &f)| (c, f as f64)),
    )
    .ok();
    print_json(&json!({
        "features": rows.len(),
        "unique_authors": authors.unique_authors,
        "author_slope": slope,
        "out": out,
    }));
    Ok(())
}

pub fn sentiment_train(settings: &Settings, args: &TrainArgs) -> anyhow::Result<()> {
    let spec = settings.spec.as_ref();
    let labels_path = args
        .labels
        .clone()
        .or_else(|| spec.and_then(|s| s.labels.clone()))
        .ok_or_else(|| config_error("no labels file given (use --labels or a config)"))?;
    let topics = match args
        .topics
        .clone()
        .or_else(|| spec.map(|s| s.topics.clone()))
    {
        Some(p) => load_topics(&p).map_err(|e| e.in_stage("corpus"))?,
        None => Vec::new(),
    };
    let labels = load_labels(&labels_path).map_err(|e| e.in_stage("sentiment"))?;
    let folds = args.folds.unwrap_or(settings.folds);
    let (model, cv) = train_sentiment(&labels, &topics, settings.ngram_order, folds, settings.seed)
        .map_err(|e| e.in_stage("sentiment"))?;
    let out = settings.out_dir()?;
    fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let model_path = out.join("model.json");
    model.save(&model_path)?;
    let cv = match cv {
        Ok(cv) => {
            let path = out.join("cross_validation.json");
            let mut w = create(&path)?;
            serde_json::to_writer_pretty(&mut w, &cv)?;
            writeln!(w)?;
            serde_json::to_value(&cv)?
        }
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    print_json(&json!({ "model": model_path, "order": model.order(), "cross_validation": cv }));
    Ok(())
}

pub fn sentiment_apply(settings: &Settings, args: &ApplyArgs) -> anyhow::Result<()> {
    let model = SentimentModel::load(&args.model).map_err(|e| e.in_stage("sentiment"))?;
    let loaded = load(settings, &args.inputs)?;
    let out = settings.out_dir()?;
    let topic_tweets = loaded.topic_tweets();
    let mut polarity = csv::Writer::from_writer(create(&out.join("polarity.csv"))?);
    polarity.write_record([
        "topic",
        "week",
        "positive",
        "negative",
        "neutral",
        "subjectivity",
        "pn_ratio",
    ])?;
    for (i, (topic, tw)) in loaded.topics.iter().zip(&topic_tweets).enumerate() {
        let labels = classify_topic(&model, topic, tw);
        let rows: Vec<(String, Classification)> = tw
            .iter()
            .map(|t| t.id.clone())
            .zip(labels.iter().cloned())
            .collect();
        let path = out.join(format!("classifications/{i:02}-{}.csv", slug(&topic.name)));
        write_classifications(create(&path)?, &rows).with_context(|| path.display().to_string())?;
        let period = tweetcast::corpus::CriticalPeriod::around(topic.release);
        for (k, p) in weekly_polarity(&period, tw, &labels).iter().enumerate() {
            polarity.write_record([
                topic.name.clone(),
                k.to_string(),
                p.counts.positive.to_string(),
                p.counts.negative.to_string(),
                p.counts.neutral.to_string(),
                p.subjectivity.to_string(),
                p.pn_ratio.to_string(),
            ])?;
        }
    }
    polarity.flush()?;
    print_json(&json!({ "topics": loaded.topics.len(), "out": out }));
    Ok(())
}

pub fn fit(settings: &Settings, args: &FitArgs) -> anyhow::Result<()> {
    let file = File::open(&args.design).map_err(|e| Error::Io {
        path: args.design.clone(),
        source: e,
    })?;
    let design = DesignMatrix::read_csv(BufReader::new(file), &args.response)
        .map_err(|e| e.in_stage("regress"))?;
    let sets = match &settings.predictors {
        Some(list) => parse_predictor_list(list)?
            .into_iter()
            .map(|s| (s.to_string(), s.columns()))
            .collect(),
        None => vec![("all".to_string(), design.predictors().to_vec())],
    };
    for (name, columns) in sets {
        let x = design.select(&columns).map_err(|e| e.in_stage("regress"))?;
        let fit = fit_ols(&x).map_err(|e| e.in_stage("regress"))?;
        println!("# {name}\n{fit}\n");
        if let Some(out) = &settings.out {
            let path = out.join(format!("fit-{}.json", name.replace([':', '+'], "_")));
            let mut w = create(&path)?;
            writeln!(w, "{}", fit.to_json())?;
        }
    }
    Ok(())
}

pub fn evaluate(_settings: &Settings, args: &EvaluateArgs) -> anyhow::Result<()> {
    let file = File::open(&args.predictions).map_err(|e| Error::Io {
        path: args.predictions.clone(),
        source: e,
    })?;
    let mut r = csv::Reader::from_reader(BufReader::new(file));
    let header = r.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let (pc, ac) = (col(&args.predicted)?, col(&args.actual)?);
    let (mut pred, mut actual) = (Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |j: usize| -> Result<f64, Error> {
            let v = rec.get(j).unwrap_or("").trim();
            v.parse()
                .map_err(|_| Error::InvalidInput(format!("row {}: `{v}` is not a number", i + 1)))
        };
        pred.push(num(pc)?);
        actual.push(num(ac)?);
    }
    let tag = |e: Error| e.in_stage("regress");
    print_json(&json!({
        "n": pred.len(),
        "amape": amape(&pred, &actual).map_err(tag)?,
        "score": score(&pred, &actual).map_err(tag)?,
        "pearson": pearson(&pred, &actual).ok(),
    }));
    Ok(())
}

pub fn fixture(settings: &Settings, args: &FixtureArgs) -> anyhow::Result<()> {
    let scale: Scale = args.scale.parse()?;
    let out = settings.out_dir()?;
    let fixture = make_fixture(settings.seed, scale);
    let files = write_fixture(&fixture, out, settings.seed)?;
    print_json(&json!({
        "tweets": fixture.tweets.len(),
        "topics": fixture.topics.len(),
        "labels": fixture.labels.len(),
        "files": files,
    }));
    Ok(())
}

pub fn run_all(settings: Settings, jobs: Option<usize>) -> anyhow::Result<()> {
    let mut spec = settings
        .spec
        .ok_or_else(|| config_error("run-all needs --config"))?;
    spec.seed = settings.seed;
    spec.ngram_order = settings.ngram_order;
    if let Some(out) = settings.out {
        spec.out = out;
    }
    if let Some(jobs) = jobs {
        spec.jobs = jobs;
    }
    if let Some(list) = &settings.predictors {
        spec.override_predictors(parse_predictor_list(list)?);
    }
    let report = run_pipeline(&spec)?;
    let bold = std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty())
        && std::io::stdout().is_terminal();
    for (i, line) in report.summary.lines().enumerate() {
        if bold && i == 0 {
            println!("\x1b[1m{line}\x1b[0m");
        } else {
            println!("{line}");
        }
    }
    println!("\nreports written to {}", report.out_dir.display());
    Ok(())
}
