use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Sentiment category. Declaration order is the tie-break order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SentimentLabel {
    Positive,
    Negative,
    Neutral,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [
        SentimentLabel::Positive,
        SentimentLabel::Negative,
        SentimentLabel::Neutral,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "positive",
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Ok(SentimentLabel::Positive),
            "negative" => Ok(SentimentLabel::Negative),
            "neutral" => Ok(SentimentLabel::Neutral),
            other => Err(Error::InvalidInput(format!(
                "unknown sentiment label `{other}`"
            ))),
        }
    }
}

impl Serialize for SentimentLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SentimentLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A text with exactly three annotator votes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub text: String,
    pub votes: [SentimentLabel; 3],
}

impl LabeledSample {
    pub fn unanimous(&self) -> Option<SentimentLabel> {
        let [a, b, c] = self.votes;
        (a == b && b == c).then_some(a)
    }
}

/// Keeps samples whose three votes agree, in input order.
pub fn filter_unanimous(samples: &[LabeledSample]) -> Vec<(String, SentimentLabel)> {
    samples
        .iter()
        .filter_map(|s| s.unanimous().map(|l| (s.text.clone(), l)))
        .collect()
}

/// Reads JSONL `{"text": ..., "votes": [v1, v2, v3]}`.
pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<LabeledSample>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let sample: LabeledSample = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, format!("line {}: {e}", i + 1)))?;
        out.push(sample);
    }
    Ok(out)
}

pub fn write_labels<W: Write>(mut out: W, samples: &[LabeledSample]) -> std::io::Result<()> {
    for s in samples {
        writeln!(out, "{}", serde_json::to_string(s).expect("serializable"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use SentimentLabel::*;

    fn sample(text: &str, votes: [SentimentLabel; 3]) -> LabeledSample {
        LabeledSample {
            text: text.into(),
            votes,
        }
    }

    #[test]
    fn unanimity_filter() {
        assert_eq!(
            filter_unanimous(&[sample("a", [Positive; 3])]),
            vec![("a".to_string(), Positive)]
        );
        assert!(filter_unanimous(&[sample("b", [Positive, Positive, Negative])]).is_empty());
    }

    #[test]
    fn mixed_list_keeps_order() {
        let votes = [
            [Positive; 3],
            [Positive, Neutral, Neutral],
            [Neutral; 3],
            [Negative, Negative, Positive],
            [Negative; 3],
            [Neutral, Negative, Positive],
            [Positive, Positive, Neutral],
            [Neutral, Neutral, Negative],
            [Positive; 3],
            [Negative, Neutral, Negative],
        ];
        let samples: Vec<_> = votes
            .iter()
            .enumerate()
            .map(|(i, v)| sample(&i.to_string(), *v))
            .collect();
        let kept = filter_unanimous(&samples);
        let ids: Vec<&str> = kept.iter().map(|(t, _)| t.as_str()).collect();
        assert_eq!(ids, ["0", "2", "4", "8"]);
        assert_eq!(kept[1].1, Neutral);
    }

    #[test]
    fn json_requires_three_votes() {
        let ok: LabeledSample =
            serde_json::from_str(r#"{"text":"x","votes":["Positive","positive","POSITIVE"]}"#)
                .unwrap();
        assert_eq!(ok.unanimous(), Some(Positive));
        assert!(
            serde_json::from_str::<LabeledSample>(r#"{"text":"x","votes":["positive"]}"#).is_err()
        );
        assert!(serde_json::from_str::<LabeledSample>(
            r#"{"text":"x","votes":["positive","meh","neutral"]}"#
        )
        .is_err());
    }
}
