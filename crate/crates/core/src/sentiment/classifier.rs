use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::labels::SentimentLabel;
use super::lm::CharLm;
use crate::error::{Error, Result};

pub const MODEL_VERSION: u32 = 1;

/// Per-category character language models plus an add-one category prior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SentimentModel {
    version: u32,
    order: usize,
    prior: [f64; 3],
    samples: [u64; 3],
    /// Every character predicted in training, including the end sentinel.
    vocabulary: BTreeSet<char>,
    models: [CharLm; 3],
}

/// Predicted label and natural-log score per category, indexed as
/// [`SentimentLabel::ALL`].
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub label: SentimentLabel,
    pub scores: [f64; 3],
}

impl SentimentModel {
    pub fn train<S: AsRef<str>>(data: &[(S, SentimentLabel)], order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput(
                "n-gram order must be at least 1".into(),
            ));
        }
        let mut models = [CharLm::new(order), CharLm::new(order), CharLm::new(order)];
        let mut samples = [0u64; 3];
        for (text, label) in data {
            models[label.index()].train(text.as_ref());
            samples[label.index()] += 1;
        }
        if let Some(empty) = SentimentLabel::ALL
            .into_iter()
            .find(|l| samples[l.index()] == 0)
        {
            return Err(Error::EmptyCategory(empty));
        }
        let n = data.len() as f64;
        let prior = samples.map(|c| (c as f64 + 1.0) / (n + 3.0));
        let vocabulary = models.iter().flat_map(|m| m.alphabet()).collect();
        Ok(SentimentModel {
            version: MODEL_VERSION,
            order,
            prior,
            samples,
            vocabulary,
            models,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn prior(&self) -> [f64; 3] {
        self.prior
    }

    pub fn vocabulary(&self) -> &BTreeSet<char> {
        &self.vocabulary
    }

    pub fn language_model(&self, label: SentimentLabel) -> &CharLm {
        &self.models[label.index()]
    }

    /// Uniform base probability, 1 / (|vocabulary| + 1). The extra slot is
    /// shared by all characters never seen in training.
    pub fn floor(&self) -> f64 {
        1.0 / (self.vocabulary.len() as f64 + 1.0)
    }

    /// P(c | history) under one category; `None` is the unseen-character
    /// event.
    pub fn char_prob(&self, label: SentimentLabel, history: &[char], c: Option<char>) -> f64 {
        let c = c.filter(|c| self.vocabulary.contains(c));
        self.models[label.index()].prob(history, c, self.floor())
    }

    pub fn scores(&self, text: &str) -> [f64; 3] {
        let floor = self.floor();
        let known = |c: char| self.vocabulary.contains(&c);
        SentimentLabel::ALL.map(|l| {
            self.prior[l.index()].ln() + self.models[l.index()].log_prob(text, known, floor)
        })
    }

    /// Highest-scoring category; ties go to the earlier of Positive,
    /// Negative, Neutral.
    pub fn classify(&self, text: &str) -> Classification {
        let scores = self.scores(text);
        let mut best = SentimentLabel::Positive;
        for l in SentimentLabel::ALL {
            if scores[l.index()] > scores[best.index()] {
                best = l;
            }
        }
        Classification {
            label: best,
            scores,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer(&mut w, self).map_err(|e| Error::parse(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let model: SentimentModel =
            serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::parse(path, e))?;
        if model.version != MODEL_VERSION {
            return Err(Error::parse(
                path,
                format!(
                    "model version {} unsupported (expected {MODEL_VERSION})",
                    model.version
                ),
            ));
        }
        Ok(model)
    }
}

/// CSV with header `id,label,score_positive,score_negative,score_neutral`.
pub fn write_classifications<W: Write>(
    out: W,
    rows: &[(String, Classification)],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "id",
        "label",
        "score_positive",
        "score_negative",
        "score_neutral",
    ])?;
    for (id, c) in rows {
        w.write_record([
            id.as_str(),
            c.label.as_str(),
            &c.scores[0].to_string(),
            &c.scores[1].to_string(),
            &c.scores[2].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
