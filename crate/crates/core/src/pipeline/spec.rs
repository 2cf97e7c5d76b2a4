use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::{format_instant, parse_instant};
use crate::error::{Error, Result};

/// One block of regression columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PredictorGroup {
    /// `avg_rate`: tweets per hour over the window.
    AvgRate,
    /// `rate_d1`..`rate_d7`: per-day tweet rates over the window.
    RateSeries,
    /// `thcnt`: theater count.
    Thcnt,
    /// `weeks_since_release`: whole weeks from release to the window end.
    WeeksSinceRelease,
    /// `pn_ratio`: positive/negative ratio of classified tweets in the window.
    PnRatio,
    /// `<name>_d1`..`<name>_d7`: a topic's external series over the window days.
    Series(String),
}

impl PredictorGroup {
    pub fn columns(&self) -> Vec<String> {
        let days = |prefix: &str| (1..=7).map(|d| format!("{prefix}_d{d}")).collect();
        match self {
            PredictorGroup::AvgRate => vec!["avg_rate".into()],
            PredictorGroup::RateSeries => days("rate"),
            PredictorGroup::Thcnt => vec!["thcnt".into()],
            PredictorGroup::WeeksSinceRelease => vec!["weeks_since_release".into()],
            PredictorGroup::PnRatio => vec!["pn_ratio".into()],
            PredictorGroup::Series(name) => days(name),
        }
    }
}

impl fmt::Display for PredictorGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictorGroup::AvgRate => f.write_str("avg-rate"),
            PredictorGroup::RateSeries => f.write_str("rate-series"),
            PredictorGroup::Thcnt => f.write_str("thcnt"),
            PredictorGroup::WeeksSinceRelease => f.write_str("weeks-since-release"),
            PredictorGroup::PnRatio => f.write_str("pn-ratio"),
            PredictorGroup::Series(name) => write!(f, "series:{name}"),
        }
    }
}

impl FromStr for PredictorGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "avg-rate" => PredictorGroup::AvgRate,
            "rate-series" => PredictorGroup::RateSeries,
            "thcnt" => PredictorGroup::Thcnt,
            "weeks-since-release" => PredictorGroup::WeeksSinceRelease,
            "pn-ratio" => PredictorGroup::PnRatio,
            other => match other.strip_prefix("series:") {
                Some(name)
                    if !name.is_empty()
                        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') =>
                {
                    PredictorGroup::Series(name.to_string())
                }
                _ => {
                    return Err(Error::Config(format!(
                        "unknown predictor `{other}` (expected avg-rate, rate-series, thcnt, \
                         weeks-since-release, pn-ratio or series:NAME)"
                    )))
                }
            },
        })
    }
}

/// A nonempty list of distinct predictor groups, written `a+b+c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictorSet(Vec<PredictorGroup>);

impl PredictorSet {
    pub fn new(groups: Vec<PredictorGroup>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::Config("predictor set is empty".into()));
        }
        for (i, g) in groups.iter().enumerate() {
            if groups[..i].contains(g) {
                return Err(Error::Config(format!("predictor `{g}` listed twice")));
            }
        }
        Ok(PredictorSet(groups))
    }

    pub fn groups(&self) -> &[PredictorGroup] {
        &self.0
    }

    pub fn columns(&self) -> Vec<String> {
        self.0.iter().flat_map(PredictorGroup::columns).collect()
    }
}

impl fmt::Display for PredictorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for PredictorSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let groups = s
            .split('+')
            .filter(|g| !g.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        PredictorSet::new(groups)
    }
}

/// Parses a comma-separated list of predictor sets.
pub fn parse_predictor_list(s: &str) -> Result<Vec<PredictorSet>> {
    let sets = s
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<PredictorSet>>>()?;
    if sets.is_empty() {
        return Err(Error::Config("predictor list is empty".into()));
    }
    Ok(sets)
}

/// Seven-day span the predictors are measured over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureWindow {
    /// Week `k` of each topic's critical period: 0 is the week before
    /// release, 1 and 2 the weeks after.
    Week(usize),
    /// The seven days before a fixed instant, for every topic.
    Before(DateTime<Utc>),
}

impl Default for FeatureWindow {
    fn default() -> Self {
        FeatureWindow::Week(0)
    }
}

impl fmt::Display for FeatureWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureWindow::Week(0) => f.write_str("pre"),
            FeatureWindow::Week(k) => write!(f, "week{k}"),
            FeatureWindow::Before(t) => write!(f, "before:{}", format_instant(t)),
        }
    }
}

impl FromStr for FeatureWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pre" => Ok(FeatureWindow::Week(0)),
            "week1" => Ok(FeatureWindow::Week(1)),
            "week2" => Ok(FeatureWindow::Week(2)),
            other => other
                .strip_prefix("before:")
                .and_then(parse_instant)
                .map(FeatureWindow::Before)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "unknown window `{other}` (expected pre, week1, week2 or before:DATE)"
                    ))
                }),
        }
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(PredictorSet);
string_serde!(FeatureWindow);

/// One regression to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub name: String,
    pub predictors: PredictorSet,
    /// Column of the outcomes file used as the response.
    pub response: String,
    #[serde(default)]
    pub window: FeatureWindow,
}

fn default_out() -> PathBuf {
    PathBuf::from("report")
}

fn default_order() -> usize {
    8
}

fn default_folds() -> usize {
    5
}

/// Everything `run-all` needs. Relative paths in a config file are resolved
/// against the file's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub corpora: Vec<PathBuf>,
    pub topics: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<PathBuf>,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub jobs: usize,
    #[serde(default = "default_order")]
    pub ngram_order: usize,
    /// Cross-validation folds for the sentiment classifier.
    #[serde(default = "default_folds")]
    pub folds: usize,
}

impl ExperimentSpec {
    /// Reads a JSON config and resolves its relative paths.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec: ExperimentSpec = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        spec.resolve(base);
        Ok(spec)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.corpora.iter_mut().for_each(fix);
        fix(&mut self.topics);
        self.labels.iter_mut().for_each(fix);
        self.outcomes.iter_mut().for_each(fix);
        fix(&mut self.out);
    }

    pub fn validate(&self) -> Result<()> {
        if self.corpora.is_empty() {
            return Err(Error::Config("no corpus paths given".into()));
        }
        if self.ngram_order == 0 {
            return Err(Error::Config("n-gram order must be at least 1".into()));
        }
        if self.folds < 2 {
            return Err(Error::Config(
                "need at least 2 cross-validation folds".into(),
            ));
        }
        for (i, e) in self.experiments.iter().enumerate() {
            let safe = !e.name.is_empty()
                && e.name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
            if !safe {
                return Err(Error::Config(format!(
                    "experiment name `{}` must be nonempty ASCII letters, digits, - or _",
                    e.name
                )));
            }
            if self.experiments[..i].iter().any(|o| o.name == e.name) {
                return Err(Error::Config(format!(
                    "experiment `{}` defined twice",
                    e.name
                )));
            }
            if e.response.is_empty() {
                return Err(Error::Config(format!(
                    "experiment `{}` has no response",
                    e.name
                )));
            }
            if let FeatureWindow::Week(k) = e.window {
                if k > 2 {
                    return Err(Error::Config(format!("window week{k} is outside 0..=2")));
                }
            }
        }
        if !self.experiments.is_empty() && self.outcomes.is_none() {
            return Err(Error::Config("experiments need an outcomes file".into()));
        }
        Ok(())
    }

    /// Replaces the experiments with one per predictor set, keeping the
    /// response and window of the first configured experiment.
    pub fn override_predictors(&mut self, sets: Vec<PredictorSet>) {
        let (response, window) = self
            .experiments
            .first()
            .map(|e| (e.response.clone(), e.window))
            .unwrap_or_else(|| ("opening_revenue".into(), FeatureWindow::default()));
        self.experiments = sets
            .into_iter()
            .map(|predictors| Experiment {
                name: predictors.to_string().replace([':', '+'], "_"),
                predictors,
                response: response.clone(),
                window,
            })
            .collect();
    }

    /// Config written next to a generated fixture, with experiments shaped
    /// after the rate, theater count, external-series and post-release
    /// regressions.
    pub fn for_fixture(seed: u64, topics: usize) -> Self {
        let exp =
            |name: &str, predictors: &str, response: &str, window: FeatureWindow| Experiment {
                name: name.into(),
                predictors: predictors.parse().expect("valid predictor set"),
                response: response.into(),
                window,
            };
        let mut experiments = vec![
            exp(
                "avg-rate",
                "avg-rate",
                "opening_revenue",
                FeatureWindow::Week(0),
            ),
            exp(
                "rate-thcnt",
                "avg-rate+thcnt",
                "opening_revenue",
                FeatureWindow::Week(0),
            ),
            exp(
                "rate-series-thcnt",
                "rate-series+thcnt",
                "opening_revenue",
                FeatureWindow::Week(0),
            ),
        ];
        if topics >= 20 {
            experiments.push(exp(
                "hsx-series-thcnt",
                "series:hsx+thcnt",
                "opening_revenue",
                FeatureWindow::Week(0),
            ));
        }
        experiments.push(exp(
            "week1-rate-pn-thcnt",
            "avg-rate+pn-ratio+thcnt",
            "second_weekend_revenue",
            FeatureWindow::Week(1),
        ));
        ExperimentSpec {
            corpora: vec!["corpus.jsonl".into()],
            topics: "topics.json".into(),
            labels: Some("labels.jsonl".into()),
            outcomes: Some("outcomes.csv".into()),
            experiments,
            out: default_out(),
            seed,
            jobs: 0,
            ngram_order: default_order(),
            folds: default_folds(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictor_sets_round_trip() {
        for s in [
            "avg-rate",
            "rate-series+thcnt",
            "series:hsx+thcnt+pn-ratio",
            "weeks-since-release",
        ] {
            let set: PredictorSet = s.parse().unwrap();
            assert_eq!(set.to_string(), s);
        }
        let set: PredictorSet = "rate-series+thcnt".parse().unwrap();
        assert_eq!(set.columns().len(), 8);
        assert_eq!(set.columns()[7], "thcnt");
    }

    #[test]
    fn bad_predictor_sets() {
        assert!("".parse::<PredictorSet>().is_err());
        assert!("thcnt+thcnt".parse::<PredictorSet>().is_err());
        assert!("volume".parse::<PredictorSet>().is_err());
        assert!("series:".parse::<PredictorSet>().is_err());
        assert!(parse_predictor_list(" , ").is_err());
        assert_eq!(parse_predictor_list("avg-rate,thcnt").unwrap().len(), 2);
    }

    #[test]
    fn windows_round_trip() {
        for s in ["pre", "week1", "week2", "before:2010-01-15T00:00:00Z"] {
            let w: FeatureWindow = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        assert!("week3".parse::<FeatureWindow>().is_err());
    }

    #[test]
    fn fixture_config_is_valid_and_serializable() {
        let spec = ExperimentSpec::for_fixture(3, 24);
        spec.validate().unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: ExperimentSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn override_keeps_response() {
        let mut spec = ExperimentSpec::for_fixture(3, 24);
        spec.override_predictors(parse_predictor_list("thcnt,series:hsx+thcnt").unwrap());
        assert_eq!(spec.experiments.len(), 2);
        assert_eq!(spec.experiments[1].name, "series_hsx_thcnt");
        assert_eq!(spec.experiments[1].response, "opening_revenue");
        spec.validate().unwrap();
    }

    #[test]
    fn unknown_fields_rejected() {
        let err =
            serde_json::from_str::<ExperimentSpec>(r#"{"corpora":[],"topics":"t","bogus":1}"#);
        assert!(err.is_err());
    }
}
