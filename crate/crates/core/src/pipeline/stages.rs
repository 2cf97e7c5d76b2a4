//! Building blocks shared by `run_pipeline` and the individual CLI
//! subcommands.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, Utc};
use rayon::prelude::*;
use serde::Serialize;

use super::spec::{FeatureWindow, PredictorGroup, PredictorSet};
use crate::corpus::{
    load_corpus, matching::normalize, CorpusFormat, CriticalPeriod, KeywordMatcher, TopicSpec,
    Tweet,
};
use crate::error::{Error, Result};
use crate::features::{
    attention_summary, rate_timeseries, tweet_rate_of_count, AttentionSummary, BucketWidth,
    FeatureRow, RateSeries,
};
use crate::regress::DesignMatrix;
use crate::sentiment::{
    cross_validate, filter_unanimous, polarity_summary, Classification, CrossValidation,
    LabeledSample, PolaritySummary, Preprocessor, SentimentLabel, SentimentModel, StopWords,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusStats {
    pub path: PathBuf,
    pub records: usize,
    pub tweets: usize,
    pub malformed: usize,
}

/// Loads every corpus and returns the tweets ordered by time, then id.
pub fn load_corpora(paths: &[PathBuf]) -> Result<(Vec<Tweet>, Vec<CorpusStats>)> {
    let mut tweets = Vec::new();
    let mut stats = Vec::with_capacity(paths.len());
    for path in paths {
        let loaded = load_corpus(path, CorpusFormat::Jsonl)?;
        stats.push(CorpusStats {
            path: path.clone(),
            records: loaded.records,
            tweets: loaded.tweets.len(),
            malformed: loaded.malformed.len(),
        });
        tweets.extend(loaded.tweets);
    }
    tweets.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.id.cmp(&b.id)));
    Ok((tweets, stats))
}

/// Indices of the tweets matching each topic, in corpus order.
pub fn match_topics(tweets: &[Tweet], topics: &[TopicSpec]) -> Vec<Vec<usize>> {
    let normalized: Vec<String> = tweets.par_iter().map(|t| normalize(&t.text)).collect();
    topics
        .par_iter()
        .map(|topic| {
            let m = KeywordMatcher::for_topic(topic);
            (0..tweets.len())
                .filter(|&i| m.is_match_normalized(&normalized[i]))
                .collect()
        })
        .collect()
}

/// Attention features of one topic over its critical period.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopicFeatures {
    pub topic: String,
    pub period: CriticalPeriod,
    pub weekly_counts: [u64; 3],
    pub attention: AttentionSummary,
    pub daily: RateSeries,
}

pub fn topic_features(topic: &TopicSpec, tweets: &[&Tweet]) -> TopicFeatures {
    let period = CriticalPeriod::around(topic.release);
    let attention = attention_summary(tweets, &period);
    let daily = rate_timeseries(
        &topic.name,
        tweets.iter().copied(),
        period.start,
        21,
        BucketWidth::Day,
    );
    let weekly_counts = [0, 1, 2].map(|k| daily.counts[7 * k..7 * k + 7].iter().sum::<u64>());
    TopicFeatures {
        topic: topic.name.clone(),
        period,
        weekly_counts,
        attention,
        daily,
    }
}

/// Long-format rows for the feature table.
pub fn feature_rows(
    topic: &TopicSpec,
    f: &TopicFeatures,
    polarity: Option<&[PolaritySummary; 3]>,
) -> Vec<FeatureRow> {
    let name = topic.name.as_str();
    let mut rows = vec![FeatureRow::new(
        name,
        "theater_count",
        0,
        topic.theater_count as f64,
    )];
    for k in 0..3 {
        rows.push(FeatureRow::new(
            name,
            "tweets",
            k,
            f.weekly_counts[k] as f64,
        ));
        rows.push(FeatureRow::new(
            name,
            "avg_tweet_rate",
            k,
            f.attention.avg_tweet_rate[k],
        ));
        rows.push(FeatureRow::new(name, "url_pct", k, f.attention.url_pct[k]));
        rows.push(FeatureRow::new(
            name,
            "retweet_pct",
            k,
            f.attention.retweet_pct[k],
        ));
    }
    for (d, rate) in f.daily.rates.iter().enumerate() {
        rows.push(FeatureRow::new(name, "daily_tweet_rate", d, *rate));
    }
    for (d, r) in f.attention.tweets_per_unique_author.iter().enumerate() {
        rows.push(FeatureRow::new(name, "tweets_per_unique_author", d, *r));
    }
    if let Some(weeks) = polarity {
        for (k, p) in weeks.iter().enumerate() {
            rows.push(FeatureRow::new(name, "subjectivity", k, p.subjectivity));
            rows.push(FeatureRow::new(name, "pn_ratio", k, p.pn_ratio));
        }
    }
    rows
}

/// Trains on the unanimously labeled samples, preprocessed with every topic
/// keyword, and cross-validates when each category can fill the folds.
pub fn train_sentiment(
    labels: &[LabeledSample],
    topics: &[TopicSpec],
    order: usize,
    folds: usize,
    seed: u64,
) -> Result<(SentimentModel, Result<CrossValidation>)> {
    let keywords: Vec<&String> = topics.iter().flat_map(|t| &t.keywords).collect();
    let pre = Preprocessor::new(KeywordMatcher::new(&keywords), StopWords::default());
    let data: Vec<(String, SentimentLabel)> = filter_unanimous(labels)
        .into_par_iter()
        .map(|(text, label)| (pre.apply(&text), label))
        .collect();
    let model = SentimentModel::train(&data, order)?;
    let cv = cross_validate(&data, order, folds, seed);
    Ok((model, cv))
}

/// Classifies one topic's tweets after topic-specific preprocessing.
pub fn classify_topic(
    model: &SentimentModel,
    topic: &TopicSpec,
    tweets: &[&Tweet],
) -> Vec<Classification> {
    let pre = Preprocessor::for_topic(topic, StopWords::default());
    tweets
        .par_iter()
        .map(|t| model.classify(&pre.apply(&t.text)))
        .collect()
}

/// Polarity of the classified tweets in each critical-period week.
pub fn weekly_polarity(
    period: &CriticalPeriod,
    tweets: &[&Tweet],
    labels: &[Classification],
) -> [PolaritySummary; 3] {
    [0, 1, 2].map(|k| {
        polarity_summary(
            tweets
                .iter()
                .zip(labels)
                .filter(|(t, _)| period.week_of(t.timestamp) == Some(k))
                .map(|(_, c)| c.label),
        )
    })
}

/// Outcome columns keyed by topic name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcomes {
    pub columns: Vec<String>,
    rows: BTreeMap<String, Vec<Option<f64>>>,
}

impl Outcomes {
    /// Reads a CSV with a `topic` column; other columns are numeric and may
    /// be blank or `NA`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = csv::Reader::from_reader(BufReader::new(file));
        let header: Vec<String> = r
            .headers()
            .map_err(|e| Error::parse(path, e))?
            .iter()
            .map(str::to_string)
            .collect();
        let topic_col = header
            .iter()
            .position(|h| h == "topic")
            .ok_or_else(|| Error::parse(path, "missing `topic` column"))?;
        let columns: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != topic_col)
            .map(|(_, h)| h.clone())
            .collect();
        let mut rows = BTreeMap::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| Error::parse(path, e))?;
            let mut values = Vec::with_capacity(columns.len());
            for (j, field) in rec.iter().enumerate() {
                if j == topic_col {
                    continue;
                }
                let field = field.trim();
                values.push(if field.is_empty() || field == "NA" {
                    None
                } else {
                    Some(field.parse::<f64>().map_err(|_| {
                        Error::parse(path, format!("line {}: `{field}` is not a number", i + 2))
                    })?)
                });
            }
            let topic = rec.get(topic_col).unwrap_or("").to_string();
            if rows.insert(topic.clone(), values).is_some() {
                return Err(Error::parse(path, format!("topic `{topic}` listed twice")));
            }
        }
        Ok(Outcomes { columns, rows })
    }

    pub fn get(&self, topic: &str, column: &str) -> Option<f64> {
        let j = self.columns.iter().position(|c| c == column)?;
        self.rows.get(topic)?.get(j).copied().flatten()
    }

    pub fn has_column(&self, column: &str) -> bool {
        self.columns.iter().any(|c| c == column)
    }
}

/// A topic's tweets and their sentiment labels, ready for windowed
/// predictors.
pub struct TopicObservations<'a> {
    pub topic: &'a TopicSpec,
    pub tweets: &'a [&'a Tweet],
    pub labels: Option<&'a [Classification]>,
}

fn window_bounds(topic: &TopicSpec, window: FeatureWindow) -> (DateTime<Utc>, DateTime<Utc>) {
    match window {
        FeatureWindow::Week(k) => CriticalPeriod::around(topic.release).week_bounds(k),
        FeatureWindow::Before(end) => (end - Duration::days(7), end),
    }
}

fn predictor_values(
    obs: &TopicObservations<'_>,
    group: &PredictorGroup,
    window: FeatureWindow,
) -> std::result::Result<Vec<f64>, String> {
    let (start, end) = window_bounds(obs.topic, window);
    let inside = |t: &Tweet| t.timestamp >= start && t.timestamp < end;
    Ok(match group {
        PredictorGroup::AvgRate => {
            let n = obs.tweets.iter().filter(|t| inside(t)).count() as u64;
            vec![tweet_rate_of_count(n, end - start).expect("window has positive length")]
        }
        PredictorGroup::RateSeries => {
            rate_timeseries("", obs.tweets.iter().copied(), start, 7, BucketWidth::Day).rates
        }
        PredictorGroup::Thcnt => vec![obs.topic.theater_count as f64],
        PredictorGroup::WeeksSinceRelease => {
            vec![((end - obs.topic.release).num_seconds() as f64 / (7.0 * 86_400.0)).floor()]
        }
        PredictorGroup::PnRatio => {
            let labels = obs.labels.ok_or("no sentiment labels")?;
            let summary = polarity_summary(
                obs.tweets
                    .iter()
                    .zip(labels)
                    .filter(|(t, _)| inside(t))
                    .map(|(_, c)| c.label),
            );
            vec![summary
                .pn_ratio
                .value()
                .ok_or("positive/negative ratio undefined (no negative tweets)")?]
        }
        PredictorGroup::Series(name) => {
            let series = obs
                .topic
                .external_series
                .get(name)
                .ok_or_else(|| format!("no external series `{name}`"))?;
            let first = (start - CriticalPeriod::around(obs.topic.release).start).num_days();
            (first..first + 7)
                .map(|d| {
                    usize::try_from(d)
                        .ok()
                        .and_then(|d| series.get(d).copied())
                        .ok_or_else(|| format!("series `{name}` has no value for day {d}"))
                })
                .collect::<std::result::Result<_, _>>()?
        }
    })
}

/// Rows of a regression design; topics lacking a predictor or the response
/// are left out and reported in the second element.
pub fn build_design(
    observations: &[TopicObservations<'_>],
    predictors: &PredictorSet,
    window: FeatureWindow,
    outcomes: &Outcomes,
    response: &str,
) -> Result<(DesignMatrix, Vec<String>)> {
    if !outcomes.has_column(response) {
        return Err(Error::MissingColumn(response.to_string()));
    }
    let mut rows = Vec::new();
    let mut ys = Vec::new();
    let mut labels = Vec::new();
    let mut dropped = Vec::new();
    for obs in observations {
        let name = &obs.topic.name;
        let Some(y) = outcomes.get(name, response) else {
            dropped.push(format!("{name}: no `{response}` outcome"));
            continue;
        };
        let row: std::result::Result<Vec<Vec<f64>>, String> = predictors
            .groups()
            .iter()
            .map(|g| predictor_values(obs, g, window))
            .collect();
        match row {
            Ok(values) => {
                rows.push(values.concat());
                ys.push(y);
                labels.push(name.clone());
            }
            Err(reason) => dropped.push(format!("{name}: {reason}")),
        }
    }
    let design =
        DesignMatrix::new(predictors.columns(), rows, response, ys)?.with_labels(labels)?;
    Ok((design, dropped))
}

/// Maps tweet id to its first matching topic.
pub fn topic_of_tweet(
    tweets: &[Tweet],
    topics: &[TopicSpec],
    matches: &[Vec<usize>],
) -> HashMap<String, String> {
    let mut out = HashMap::new();
    for (topic, idx) in topics.iter().zip(matches) {
        for &i in idx {
            out.entry(tweets[i].id.clone())
                .or_insert_with(|| topic.name.clone());
        }
    }
    out
}
