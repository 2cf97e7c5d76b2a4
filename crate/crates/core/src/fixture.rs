//! Self-consistent synthetic datasets for exercising the whole pipeline.
//!
//! Each topic gets a latent attention rate, a positive/negative ratio and a
//! theater count. Tweets are laid down day by day to realize those rates,
//! each with a ground-truth sentiment drawn from the ratio, and the outcome
//! columns are computed from the realized values with the general linear
//! model plus Gaussian noise.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal, Zipf};
use serde::Serialize;

use crate::corpus::{write_corpus, write_topics, TopicSpec, Tweet};
use crate::error::{Error, Result};
use crate::regress::synth::{daily_profile, sample_sd};
use crate::regress::{ModelBetas, SynthConfig};
use crate::sentiment::{write_labels, LabeledSample, SentimentLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    /// 12 topics and at most 1000 tweets.
    Small,
    /// 24 topics with tens of thousands of tweets.
    Full,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Scale::Small),
            "full" | "paper-like" => Ok(Scale::Full),
            other => Err(Error::Config(format!(
                "unknown fixture scale `{other}` (expected small or full)"
            ))),
        }
    }
}

struct ScaleParams {
    topics: usize,
    attention: SynthConfig,
    tweet_budget: Option<u64>,
    labeled_samples: usize,
}

impl Scale {
    fn params(self) -> ScaleParams {
        match self {
            Scale::Small => ScaleParams {
                topics: 12,
                attention: SynthConfig {
                    attention_median: 0.1,
                    attention_sigma: 0.5,
                    ..SynthConfig::default()
                },
                tweet_budget: Some(1000),
                labeled_samples: 90,
            },
            Scale::Full => ScaleParams {
                topics: 24,
                attention: SynthConfig::default(),
                tweet_budget: None,
                labeled_samples: 600,
            },
        }
    }
}

/// Relative noise on each outcome column.
const OUTCOME_NOISE: f64 = 0.05;
/// Share of subjective (non-neutral) tweets before and after release.
const SUBJECTIVE_SHARE: [f64; 3] = [0.45, 0.6, 0.55];
/// Share of tweets carrying a URL per week.
const URL_SHARE: [f64; 3] = [0.395, 0.255, 0.225];
const RETWEET_SHARE: [f64; 3] = [0.121, 0.121, 0.1166];
const AUTHOR_EXPONENT: f64 = 1.2;

const FIRST_WORDS: [&str; 24] = [
    "Crimson", "Silent", "Iron", "Velvet", "Hollow", "Broken", "Golden", "Frozen", "Savage",
    "Hidden", "Distant", "Electric", "Scarlet", "Midnight", "Wild", "Lonely", "Burning", "Amber",
    "Glass", "Northern", "Copper", "Restless", "Silver", "Painted",
];
const SECOND_WORDS: [&str; 24] = [
    "Harbor",
    "Frontier",
    "Lantern",
    "Orchard",
    "Canyon",
    "Citadel",
    "Meridian",
    "Tundra",
    "Voyage",
    "Empire",
    "Garden",
    "Horizon",
    "Serpent",
    "Kingdom",
    "Outpost",
    "Station",
    "Comet",
    "Island",
    "Monarch",
    "Labyrinth",
    "Prairie",
    "Summit",
    "Engine",
    "Reef",
];

const POSITIVE: [&str; 8] = [
    "loved {t} so much",
    "{t} was amazing",
    "cant wait to see {t}!",
    "{t} is brilliant and fun",
    "best film of the year {t}",
    "{t} totally blew me away!!",
    "highly recommend {t} great cast",
    "wow {t} exceeded expectations",
];
const NEGATIVE: [&str; 8] = [
    "{t} was terrible",
    "hated {t} so boring",
    "{t} is awful and dull",
    "waste of money {t}",
    "worst movie ever {t}",
    "{t} fell flat ugh",
    "skip {t} total disappointment",
    "walked out of {t} horrible plot",
];
const NEUTRAL: [&str; 8] = [
    "watching {t} tonight",
    "{t} opens friday",
    "anyone seen {t}?",
    "tickets for {t} at 7pm",
    "{t} trailer is out",
    "heading to {t} with friends",
    "{t} showtimes posted",
    "is {t} playing downtown?",
];

fn templates(label: SentimentLabel) -> &'static [&'static str; 8] {
    match label {
        SentimentLabel::Positive => &POSITIVE,
        SentimentLabel::Negative => &NEGATIVE,
        SentimentLabel::Neutral => &NEUTRAL,
    }
}

/// Outcome and latent values of one generated topic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopicTruth {
    pub name: String,
    pub theater_count: u64,
    /// Realized tweets per hour in each week.
    pub rates: [f64; 3],
    /// Realized ground-truth positive/negative ratio in each week.
    pub pn_ratio: [f64; 3],
    pub opening_revenue: f64,
    pub second_weekend_revenue: f64,
    pub hsx_price: f64,
}

/// Everything a fixture contains, in memory.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub tweets: Vec<Tweet>,
    pub topics: Vec<TopicSpec>,
    pub labels: Vec<LabeledSample>,
    pub truth: Vec<TopicTruth>,
}

/// Paths written by [`write_fixture`].
#[derive(Clone, Debug, Serialize)]
pub struct FixtureFiles {
    pub corpus: PathBuf,
    pub topics: PathBuf,
    pub labels: PathBuf,
    pub outcomes: PathBuf,
    pub config: PathBuf,
}

fn decorate<R: Rng>(rng: &mut R, body: String, week: usize, authors: usize) -> String {
    let mut text = body;
    if rng.random_bool(RETWEET_SHARE[week]) {
        let who = rng.random_range(0..authors.max(1));
        text = format!("RT @user{who}: {text}");
    }
    if rng.random_bool(URL_SHARE[week]) {
        let code: String = (0..6)
            .map(|_| (b'a' + rng.random_range(0..26u8)) as char)
            .collect();
        text.push_str(&format!(" http://t.co/{code}"));
    }
    text
}

fn render<R: Rng>(rng: &mut R, label: SentimentLabel, title: &str) -> String {
    let template = templates(label)
        .choose(rng)
        .expect("templates are nonempty");
    let shown = if rng.random_bool(0.5) {
        title.to_string()
    } else {
        title.to_lowercase()
    };
    template.replace("{t}", &shown)
}

fn draw_label<R: Rng>(rng: &mut R, pn: f64, subjective: f64) -> SentimentLabel {
    let u: f64 = rng.random();
    let pos = subjective * pn / (pn + 1.0);
    if u < pos {
        SentimentLabel::Positive
    } else if u < subjective {
        SentimentLabel::Negative
    } else {
        SentimentLabel::Neutral
    }
}

struct Plan {
    title: String,
    release: DateTime<Utc>,
    theaters: u64,
    pn: [f64; 3],
    /// Tweets per day over the 21-day period.
    daily: Vec<u64>,
}

fn plan_topics(rng: &mut ChaCha8Rng, params: &ScaleParams) -> Vec<Plan> {
    let base = Utc.with_ymd_and_hms(2009, 11, 13, 0, 0, 0).unwrap();
    let growth = LogNormal::new(1.4f64.ln(), 0.3).unwrap();
    let drift = LogNormal::new(0.0, 0.25).unwrap();
    let mut plans: Vec<(Plan, Vec<f64>)> = (0..params.topics)
        .map(|i| {
            let (a, p, d) = params.attention.draw(rng);
            let title = format!("{} {}", FIRST_WORDS[i % 24], SECOND_WORDS[(i * 7 + 3) % 24]);
            let release = base + Duration::days(7 * (i as i64 / 2));
            let a1 = a * growth.sample(rng);
            let a2 = a1 * 0.5 * drift.sample(rng);
            let mut rates = Vec::with_capacity(21);
            rates.extend(daily_profile(rng, 7).into_iter().map(|w| a * w));
            let decay: Vec<f64> = (0..7).map(|k| 1.3 - 0.1 * k as f64).collect();
            let mean1 = decay.iter().sum::<f64>() / 7.0;
            rates.extend(decay.iter().map(|w| a1 * w / mean1));
            rates.extend(std::iter::repeat_n(a2, 7));
            let p1 = (p * drift.sample(rng)).clamp(0.5, 12.0);
            let p2 = (p1 * drift.sample(rng)).clamp(0.5, 12.0);
            let plan = Plan {
                title,
                release,
                theaters: d as u64,
                pn: [p, p1, p2],
                daily: Vec::new(),
            };
            (plan, rates)
        })
        .collect();

    let expected: f64 = plans.iter().flat_map(|(_, r)| r).map(|r| r * 24.0).sum();
    let shrink = match params.tweet_budget {
        Some(b) if expected > b as f64 => b as f64 / expected,
        _ => 1.0,
    };
    for (plan, rates) in &mut plans {
        plan.daily = rates
            .iter()
            .map(|r| (r * 24.0 * shrink).floor() as u64)
            .collect();
    }
    plans.into_iter().map(|(p, _)| p).collect()
}

/// Builds a fixture in memory. Identical `(seed, scale)` give identical
/// fixtures.
pub fn make_fixture(seed: u64, scale: Scale) -> Fixture {
    let params = scale.params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plans = plan_topics(&mut rng, &params);

    let total: u64 = plans.iter().flat_map(|p| &p.daily).sum();
    let pool = ((total as f64 / 1.5).ceil() as usize).max(10);
    let zipf = Zipf::new(pool as f64, AUTHOR_EXPONENT).expect("valid zipf");

    let mut tweets = Vec::with_capacity(total as usize);
    let mut topics = Vec::with_capacity(plans.len());
    let mut latent = Vec::with_capacity(plans.len());
    for (ti, plan) in plans.iter().enumerate() {
        let start = plan.release - Duration::days(7);
        let mut counts = [[0u64; 3]; 3];
        for (day, &n) in plan.daily.iter().enumerate() {
            let week = day / 7;
            let day_start = start + Duration::days(day as i64);
            let mut offsets: Vec<i64> = (0..n).map(|_| rng.random_range(0..86_400)).collect();
            offsets.sort_unstable();
            for off in offsets {
                let label = draw_label(&mut rng, plan.pn[week], SUBJECTIVE_SHARE[week]);
                counts[week][label.index()] += 1;
                let body = render(&mut rng, label, &plan.title);
                let author = zipf.sample(&mut rng) as u64;
                tweets.push(Tweet {
                    id: format!("{ti:02}-{:06}", tweets.len()),
                    author: format!("user{author}"),
                    timestamp: day_start + Duration::seconds(off),
                    text: decorate(&mut rng, body, week, pool),
                });
            }
        }
        let rates = [0, 1, 2].map(|w| counts[w].iter().sum::<u64>() as f64 / 168.0);
        let pn_ratio = [0, 1, 2].map(|w| {
            let [pos, neg, _] = counts[w];
            if neg > 0 {
                pos as f64 / neg as f64
            } else {
                plan.pn[w]
            }
        });
        latent.push((rates, pn_ratio));
        topics.push(TopicSpec {
            name: plan.title.clone(),
            keywords: vec![plan.title.to_lowercase()],
            release: plan.release,
            theater_count: plan.theaters,
            external_series: BTreeMap::new(),
        });
    }
    tweets.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.id.cmp(&b.id)));

    // outcomes from the realized features
    let betas = ModelBetas::default();
    let opening: Vec<f64> = plans
        .iter()
        .zip(&latent)
        .map(|(p, (r, pn))| betas.response(r[0], pn[0], p.theaters as f64))
        .collect();
    let second: Vec<f64> = plans
        .iter()
        .zip(&latent)
        .map(|(p, (r, pn))| betas.response(r[1], pn[1], 0.9 * p.theaters as f64))
        .collect();
    let opening = with_noise(&mut rng, opening);
    let second = with_noise(&mut rng, second);
    let hsx_noise = Normal::new(0.0, 0.03).unwrap();
    let hsx_day = LogNormal::new(0.0, 0.15).unwrap();
    let mut truth = Vec::with_capacity(plans.len());
    for (i, topic) in topics.iter_mut().enumerate() {
        // play-money price drifting toward the eventual gross
        let series: Vec<f64> = (0..7)
            .map(|d| opening[i] * (0.6 + 0.05 * d as f64) * hsx_day.sample(&mut rng))
            .collect();
        topic.external_series.insert("hsx".into(), series);
        let (rates, pn_ratio) = latent[i];
        truth.push(TopicTruth {
            name: topic.name.clone(),
            theater_count: topic.theater_count,
            rates,
            pn_ratio,
            opening_revenue: opening[i],
            second_weekend_revenue: second[i],
            hsx_price: opening[i] * (1.0 + hsx_noise.sample(&mut rng)),
        });
    }

    let labels = make_labels(&mut rng, &topics, params.labeled_samples);
    Fixture {
        tweets,
        topics,
        labels,
        truth,
    }
}

fn with_noise(rng: &mut ChaCha8Rng, signal: Vec<f64>) -> Vec<f64> {
    let eps = Normal::new(0.0, OUTCOME_NOISE * sample_sd(&signal)).expect("finite sd");
    signal.into_iter().map(|s| s + eps.sample(rng)).collect()
}

/// Annotated samples: about 80% unanimous, the rest with one dissenting vote.
fn make_labels(rng: &mut ChaCha8Rng, topics: &[TopicSpec], n: usize) -> Vec<LabeledSample> {
    (0..n)
        .map(|i| {
            let label = SentimentLabel::ALL[i % 3];
            let topic = &topics[rng.random_range(0..topics.len())];
            let body = render(rng, label, &topic.name);
            let text = decorate(rng, body, 0, 50);
            let mut votes = [label; 3];
            if rng.random_bool(0.2) {
                let other = SentimentLabel::ALL[(label.index() + 1 + rng.random_range(0..2)) % 3];
                votes[rng.random_range(0..3)] = other;
            }
            LabeledSample { text, votes }
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes `outcomes.csv` with one row per topic.
pub fn write_outcomes<W: Write>(out: W, truth: &[TopicTruth]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "topic",
        "opening_revenue",
        "second_weekend_revenue",
        "hsx_price",
    ])?;
    for t in truth {
        w.write_record([
            t.name.clone(),
            t.opening_revenue.to_string(),
            t.second_weekend_revenue.to_string(),
            t.hsx_price.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the fixture files and a ready-to-run experiment config into `dir`.
pub fn write_fixture(fixture: &Fixture, dir: &Path, seed: u64) -> Result<FixtureFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = FixtureFiles {
        corpus: dir.join("corpus.jsonl"),
        topics: dir.join("topics.json"),
        labels: dir.join("labels.jsonl"),
        outcomes: dir.join("outcomes.csv"),
        config: dir.join("config.json"),
    };

    let mut w = create(&files.corpus)?;
    write_corpus(&mut w, &fixture.tweets).map_err(|e| Error::io(&files.corpus, e))?;
    w.flush().map_err(|e| Error::io(&files.corpus, e))?;

    write_topics(&files.topics, &fixture.topics)?;

    let mut w = create(&files.labels)?;
    write_labels(&mut w, &fixture.labels).map_err(|e| Error::io(&files.labels, e))?;
    w.flush().map_err(|e| Error::io(&files.labels, e))?;

    let w = create(&files.outcomes)?;
    write_outcomes(w, &fixture.truth).map_err(|e| Error::parse(&files.outcomes, e))?;

    let config = crate::pipeline::ExperimentSpec::for_fixture(seed, fixture.topics.len());
    let json = serde_json::to_string_pretty(&config).expect("config is serializable");
    fs::write(&files.config, json + "\n").map_err(|e| Error::io(&files.config, e))?;
    Ok(files)
}
