use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::time::{format_instant, from_epoch, parse_instant};
use crate::error::{Error, Result};

/// A predictable entity: keywords for matching its tweets, its release
/// instant, the theater count, and optional day-indexed comparator series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicSpec {
    pub name: String,
    pub keywords: Vec<String>,
    #[serde(serialize_with = "ser_instant", deserialize_with = "de_instant")]
    pub release: DateTime<Utc>,
    pub theater_count: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub external_series: BTreeMap<String, Vec<f64>>,
}

impl TopicSpec {
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidTopic {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if self.name.trim().is_empty() {
            return Err(invalid("empty name"));
        }
        if self.keywords.is_empty() {
            return Err(invalid("no keywords"));
        }
        if self.keywords.iter().any(|k| k.trim().is_empty()) {
            return Err(invalid("blank keyword"));
        }
        if self
            .external_series
            .values()
            .flatten()
            .any(|v| !v.is_finite())
        {
            return Err(invalid("non-finite external series value"));
        }
        Ok(())
    }
}

fn ser_instant<S: Serializer>(t: &DateTime<Utc>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_instant(t))
}

fn de_instant<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DateTime<Utc>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Epoch(i64),
    }
    let parsed = match Raw::deserialize(d)? {
        Raw::Text(s) => parse_instant(&s),
        Raw::Epoch(n) => from_epoch(n),
    };
    parsed.ok_or_else(|| serde::de::Error::custom("invalid release instant"))
}

/// Reads a JSON array of topic objects and validates each.
pub fn load_topics(path: impl AsRef<Path>) -> Result<Vec<TopicSpec>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let topics: Vec<TopicSpec> =
        serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::parse(path, e))?;
    let mut names = std::collections::HashSet::new();
    for t in &topics {
        t.validate()?;
        if !names.insert(t.name.as_str()) {
            return Err(Error::InvalidTopic {
                name: t.name.clone(),
                reason: "duplicate topic name".into(),
            });
        }
    }
    Ok(topics)
}

pub fn write_topics(path: impl AsRef<Path>, topics: &[TopicSpec]) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string_pretty(topics).map_err(|e| Error::parse(path, e))?;
    std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_topic_objects() {
        let json = r#"[{"name":"Avatar","keywords":["avatar"],"release":"2009-12-18",
            "theater_count":3452,"external_series":{"hsx":[1.0,2.0]}},
            {"name":"Legion","keywords":["legion"],"release":1264118400,"theater_count":0}]"#;
        let topics: Vec<TopicSpec> = serde_json::from_str(json).unwrap();
        assert_eq!(topics.len(), 2);
        assert_eq!(format_instant(&topics[0].release), "2009-12-18T00:00:00Z");
        assert_eq!(topics[0].external_series["hsx"], vec![1.0, 2.0]);
        assert!(topics[1].external_series.is_empty());
        assert!(topics.iter().all(|t| t.validate().is_ok()));
    }

    #[test]
    fn rejects_empty_keywords_and_negative_counts() {
        let json = r#"{"name":"X","keywords":[],"release":"2010-01-01","theater_count":1}"#;
        let t: TopicSpec = serde_json::from_str(json).unwrap();
        assert!(t.validate().is_err());
        let json = r#"{"name":"X","keywords":["x"],"release":"2010-01-01","theater_count":-1}"#;
        assert!(serde_json::from_str::<TopicSpec>(json).is_err());
    }
}
