use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use super::spec::{Experiment, ExperimentSpec};
use super::stages::{
    build_design, classify_topic, feature_rows, load_corpora, match_topics, topic_features,
    topic_of_tweet, train_sentiment, weekly_polarity, CorpusStats, Outcomes, TopicObservations,
};
use crate::corpus::{load_topics, Tweet};
use crate::error::{Error, Result};
use crate::features::{author_stats, loglog_slope, write_feature_table, AuthorStats};
use crate::regress::{amape, fit_ols, pearson, score, RegressionFit};
use crate::sentiment::{load_labels, write_classifications, Classification, CrossValidation};

/// Result of one regression experiment.
#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub experiment: Experiment,
    pub fit: RegressionFit,
    pub amape: f64,
    pub score: f64,
    /// Correlation between the window's average tweet rate and the response.
    pub rate_correlation: Option<f64>,
    pub dropped: Vec<String>,
}

/// What a pipeline run produced.
#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub experiments: Vec<ExperimentResult>,
    pub cross_validation: Option<CrossValidation>,
    pub author_slope: Option<f64>,
    pub warnings: Vec<String>,
    /// Human-readable summary, also written to `summary.txt`.
    pub summary: String,
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn path(&mut self, name: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        self.files.push(path.clone());
        Ok(path)
    }

    fn text(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.path(name)?;
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))
    }

    fn csv(
        &mut self,
        name: &str,
        f: impl FnOnce(BufWriter<File>) -> csv::Result<()>,
    ) -> Result<()> {
        let path = self.path(name)?;
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        f(BufWriter::new(file)).map_err(|e| Error::parse(&path, e))
    }
}

/// File-name-safe form of a topic name.
pub fn slug(name: &str) -> String {
    let mut s = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            s.push(c.to_ascii_lowercase());
        } else if !s.ends_with('-') {
            s.push('-');
        }
    }
    let s = s.trim_matches('-');
    if s.is_empty() {
        "topic".into()
    } else {
        s.to_string()
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report is serializable") + "\n"
}

/// Runs every stage: ingest, features, sentiment, regressions, reports.
/// Output depends only on the config and its input files.
pub fn run_pipeline(spec: &ExperimentSpec) -> Result<PipelineReport> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run(spec))
}

fn run(spec: &ExperimentSpec) -> Result<PipelineReport> {
    let topics = load_topics(&spec.topics).map_err(|e| e.in_stage("corpus"))?;
    let (tweets, corpus_stats) = load_corpora(&spec.corpora).map_err(|e| e.in_stage("corpus"))?;
    let outcomes = spec
        .outcomes
        .as_ref()
        .map(Outcomes::load)
        .transpose()
        .map_err(|e| e.in_stage("regress"))?;
    let labels = spec
        .labels
        .as_ref()
        .map(load_labels)
        .transpose()
        .map_err(|e| e.in_stage("sentiment"))?;

    let mut out = Writer {
        dir: spec.out.clone(),
        files: Vec::new(),
    };
    fs::create_dir_all(&out.dir).map_err(|e| Error::io(&out.dir, e))?;
    let mut warnings = Vec::new();

    // corpus
    let matches = match_topics(&tweets, &topics);
    let topic_tweets: Vec<Vec<&Tweet>> = matches
        .iter()
        .map(|idx| idx.iter().map(|&i| &tweets[i]).collect())
        .collect();
    for (topic, m) in topics.iter().zip(&topic_tweets) {
        if m.is_empty() {
            warnings.push(format!("topic `{}` matched no tweets", topic.name));
        }
    }
    let matched_any = topic_tweets.iter().any(|m| !m.is_empty());
    if !matched_any {
        warnings.push("zero topics have matching tweets; features and fits skipped".into());
    }
    #[derive(Serialize)]
    struct Ingest<'a> {
        corpora: &'a [CorpusStats],
        tweets: usize,
        topics: Vec<(&'a str, usize)>,
    }
    out.text(
        "corpus.json",
        &json(&Ingest {
            corpora: &corpus_stats,
            tweets: tweets.len(),
            topics: topics
                .iter()
                .zip(&topic_tweets)
                .map(|(t, m)| (t.name.as_str(), m.len()))
                .collect(),
        }),
    )?;

    // features
    let features: Vec<_> = topics
        .par_iter()
        .zip(&topic_tweets)
        .map(|(topic, tw)| topic_features(topic, tw))
        .collect();
    let topic_of = topic_of_tweet(&tweets, &topics, &matches);
    let authors = author_stats(&tweets, &topic_of);
    let author_slope = if tweets.is_empty() {
        None
    } else {
        match loglog_slope(
            authors
                .tweets_per_author
                .iter()
                .map(|(&c, &f)| (c, f as f64)),
        ) {
            Ok(s) => Some(s),
            Err(e) => {
                warnings.push(format!("author slope not computed: {e}"));
                None
            }
        }
    };
    out.csv("authors.csv", |w| write_author_histograms(w, &authors))?;

    // sentiment
    let mut cross_validation = None;
    let mut classified: Option<Vec<Vec<Classification>>> = None;
    if let Some(labels) = &labels {
        let (model, cv) = train_sentiment(labels, &topics, spec.ngram_order, spec.folds, spec.seed)
            .map_err(|e| e.in_stage("sentiment"))?;
        let path = out.path("sentiment/model.json")?;
        model.save(&path)?;
        match cv {
            Ok(cv) => {
                out.text("sentiment/cross_validation.json", &json(&cv))?;
                cross_validation = Some(cv);
            }
            Err(e) => warnings.push(format!("cross-validation skipped: {e}")),
        }
        let per_topic: Vec<Vec<Classification>> = topics
            .par_iter()
            .zip(&topic_tweets)
            .map(|(topic, tw)| classify_topic(&model, topic, tw))
            .collect();
        for (i, ((topic, tw), labels)) in
            topics.iter().zip(&topic_tweets).zip(&per_topic).enumerate()
        {
            let rows: Vec<(String, Classification)> = tw
                .iter()
                .map(|t| t.id.clone())
                .zip(labels.iter().cloned())
                .collect();
            out.csv(
                &format!("classifications/{i:02}-{}.csv", slug(&topic.name)),
                |w| write_classifications(w, &rows),
            )?;
        }
        classified = Some(per_topic);
    } else {
        warnings.push("no labels file; sentiment features skipped".into());
    }

    let polarity: Option<Vec<_>> = classified.as_ref().map(|per_topic| {
        features
            .iter()
            .zip(&topic_tweets)
            .zip(per_topic)
            .map(|((f, tw), c)| weekly_polarity(&f.period, tw, c))
            .collect()
    });
    let mut rows = Vec::new();
    for (i, (topic, f)) in topics.iter().zip(&features).enumerate() {
        rows.extend(feature_rows(topic, f, polarity.as_ref().map(|p| &p[i])));
    }
    out.csv("features.csv", |w| write_feature_table(w, &rows))?;

    // regressions
    let observations: Vec<TopicObservations<'_>> = topics
        .iter()
        .zip(&topic_tweets)
        .enumerate()
        .map(|(i, (topic, tw))| TopicObservations {
            topic,
            tweets: tw,
            labels: classified.as_ref().map(|c| c[i].as_slice()),
        })
        .collect();
    let mut experiments = Vec::new();
    if matched_any {
        if let Some(outcomes) = &outcomes {
            for exp in &spec.experiments {
                match run_experiment(exp, &observations, outcomes, &mut out)? {
                    Ok(result) => experiments.push(result),
                    Err(reason) => {
                        warnings.push(format!("experiment `{}` skipped: {reason}", exp.name))
                    }
                }
            }
        } else if !spec.experiments.is_empty() {
            warnings.push("no outcomes file; regressions skipped".into());
        }
    }

    let summary = render_summary(
        &corpus_stats,
        &topic_tweets,
        author_slope,
        cross_validation.as_ref(),
        spec,
        &experiments,
        &warnings,
    );
    out.text("summary.txt", &summary)?;
    #[derive(Serialize)]
    struct SummaryJson<'a> {
        tweets: usize,
        topics: usize,
        author_slope: Option<f64>,
        cross_validation: Option<&'a CrossValidation>,
        experiments: Vec<ExperimentLine<'a>>,
        warnings: &'a [String],
    }
    #[derive(Serialize)]
    struct ExperimentLine<'a> {
        name: &'a str,
        predictors: String,
        response: &'a str,
        window: String,
        n: usize,
        r2: f64,
        adj_r2: f64,
        model_p: crate::regress::PValue,
        amape: f64,
        score: f64,
        rate_correlation: Option<f64>,
    }
    out.text(
        "summary.json",
        &json(&SummaryJson {
            tweets: tweets.len(),
            topics: topics.len(),
            author_slope,
            cross_validation: cross_validation.as_ref(),
            experiments: experiments
                .iter()
                .map(|r| ExperimentLine {
                    name: &r.experiment.name,
                    predictors: r.experiment.predictors.to_string(),
                    response: &r.experiment.response,
                    window: r.experiment.window.to_string(),
                    n: r.fit.n,
                    r2: r.fit.r2,
                    adj_r2: r.fit.adj_r2,
                    model_p: r.fit.model_p,
                    amape: r.amape,
                    score: r.score,
                    rate_correlation: r.rate_correlation,
                })
                .collect(),
            warnings: &warnings,
        }),
    )?;

    Ok(PipelineReport {
        out_dir: out.dir,
        files: out.files,
        experiments,
        cross_validation,
        author_slope,
        warnings,
        summary,
    })
}

/// Outer error aborts the run; inner error skips the experiment.
fn run_experiment(
    exp: &Experiment,
    observations: &[TopicObservations<'_>],
    outcomes: &Outcomes,
    out: &mut Writer,
) -> Result<std::result::Result<ExperimentResult, String>> {
    let tag = |e: Error| e.in_stage("regress");
    let (design, dropped) = build_design(
        observations,
        &exp.predictors,
        exp.window,
        outcomes,
        &exp.response,
    )
    .map_err(tag)?;
    out.csv(&format!("designs/{}.csv", exp.name), |w| {
        design.write_csv(w)
    })?;
    if design.n() <= design.p() + 1 {
        return Ok(Err(format!(
            "{} usable topics for {} predictors{}",
            design.n(),
            design.p(),
            if dropped.is_empty() {
                String::new()
            } else {
                format!(" ({})", dropped.join("; "))
            }
        )));
    }
    let fit = fit_ols(&design).map_err(tag)?;
    let amape_v = amape(&fit.fitted, design.response()).map_err(tag)?;
    let score_v = score(&fit.fitted, design.response()).map_err(tag)?;

    let avg_rate = build_design(
        observations,
        &"avg-rate".parse().expect("valid predictor set"),
        exp.window,
        outcomes,
        &exp.response,
    )
    .ok()
    .map(|(d, _)| d);
    let rate_correlation = avg_rate.and_then(|d| pearson(&d.predictor(0), d.response()).ok());

    #[derive(Serialize)]
    struct FitFile<'a> {
        experiment: &'a str,
        predictors: String,
        window: String,
        dropped: &'a [String],
        amape: f64,
        score: f64,
        rate_correlation: Option<f64>,
        fit: serde_json::Value,
    }
    let fit_json: serde_json::Value =
        serde_json::from_str(&fit.to_json()).expect("fit report is valid JSON");
    out.text(
        &format!("fits/{}.json", exp.name),
        &json(&FitFile {
            experiment: &exp.name,
            predictors: exp.predictors.to_string(),
            window: exp.window.to_string(),
            dropped: &dropped,
            amape: amape_v,
            score: score_v,
            rate_correlation,
            fit: fit_json,
        }),
    )?;
    out.csv(&format!("fits/{}_predictions.csv", exp.name), |w| {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["topic", "actual", "predicted", "residual"])?;
        for i in 0..design.n() {
            w.write_record([
                design.labels()[i].clone(),
                design.response()[i].to_string(),
                fit.fitted[i].to_string(),
                fit.residuals[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;
    Ok(Ok(ExperimentResult {
        experiment: exp.clone(),
        fit,
        amape: amape_v,
        score: score_v,
        rate_correlation,
        dropped,
    }))
}

/// `kind,count,frequency` rows for both author histograms.
pub fn write_author_histograms<W: Write>(out: W, stats: &AuthorStats) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["histogram", "count", "frequency"])?;
    for (kind, hist) in [
        ("tweets_per_author", &stats.tweets_per_author),
        ("topics_per_author", &stats.topics_per_author),
    ] {
        for (c, f) in hist {
            w.write_record([kind, &c.to_string(), &f.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn render_summary(
    corpora: &[CorpusStats],
    topic_tweets: &[Vec<&Tweet>],
    author_slope: Option<f64>,
    cv: Option<&CrossValidation>,
    spec: &ExperimentSpec,
    experiments: &[ExperimentResult],
    warnings: &[String],
) -> String {
    let mut s = String::new();
    let tweets: usize = corpora.iter().map(|c| c.tweets).sum();
    let malformed: usize = corpora.iter().map(|c| c.malformed).sum();
    let matched: usize = topic_tweets.iter().map(Vec::len).sum();
    let _ = writeln!(s, "tweetcast report");
    let _ = writeln!(s, "================");
    let _ = writeln!(
        s,
        "corpus: {tweets} tweets in {} file(s), {malformed} malformed records skipped",
        corpora.len()
    );
    let _ = writeln!(
        s,
        "topics: {} ({matched} topic-tweet matches)",
        topic_tweets.len()
    );
    match author_slope {
        Some(v) => {
            let _ = writeln!(s, "tweets-per-author log-log slope: {v:.4}");
        }
        None => {
            let _ = writeln!(s, "tweets-per-author log-log slope: NA");
        }
    }
    match cv {
        Some(cv) => {
            let _ = writeln!(
                s,
                "sentiment: order-{} character model, {}-fold accuracy {:.4} ({}/{})",
                spec.ngram_order, cv.folds, cv.accuracy, cv.correct, cv.total
            );
        }
        None => {
            let _ = writeln!(s, "sentiment: not cross-validated");
        }
    }
    let _ = writeln!(s);
    if experiments.is_empty() {
        let _ = writeln!(s, "no regressions fitted");
    } else {
        let _ = writeln!(
            s,
            "{:<22} {:<28} {:<7} {:<24} {:>3} {:>8} {:>8} {:>13} {:>8} {:>8} {:>7}",
            "experiment",
            "predictors",
            "window",
            "response",
            "n",
            "R²",
            "adj R²",
            "model p",
            "AMAPE",
            "Score",
            "r(rate)"
        );
        for r in experiments {
            let corr = r
                .rate_correlation
                .map_or_else(|| "NA".to_string(), |c| format!("{c:.3}"));
            let p = format!("{} {}", r.fit.model_p, r.fit.model_p.stars());
            let _ = writeln!(
                s,
                "{:<22} {:<28} {:<7} {:<24} {:>3} {:>8.4} {:>8.4} {:>13} {:>8.3} {:>8.3} {:>7}",
                r.experiment.name,
                r.experiment.predictors.to_string(),
                r.experiment.window.to_string(),
                r.experiment.response,
                r.fit.n,
                r.fit.r2,
                r.fit.adj_r2,
                p.trim_end(),
                r.amape,
                r.score,
                corr
            );
        }
    }
    if !warnings.is_empty() {
        let _ = writeln!(s, "\nwarnings:");
        for w in warnings {
            let _ = writeln!(s, "- {w}");
        }
    }
    s
}
