use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{Map, Value};

use super::time::{format_instant, from_epoch, parse_instant};
use super::Tweet;
use crate::error::{Error, Result};

/// Longest accepted tweet text, in UTF-8 bytes.
pub const MAX_TEXT_BYTES: usize = 560;

/// Corpora with more than this share of malformed records are rejected.
const MALFORMED_LIMIT_PERCENT: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One JSON object per line: `{"id","author","ts","text"}`.
    #[default]
    Jsonl,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "ndjson" => Ok(CorpusFormat::Jsonl),
            other => Err(Error::Config(format!("unknown corpus format `{other}`"))),
        }
    }
}

/// A record that could not be turned into a [`Tweet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Malformed {
    /// 1-based line number.
    pub line: usize,
    pub reason: String,
}

/// Streaming reader over a corpus. Yields well-formed tweets in file order
/// and keeps a tally of the malformed ones it skipped.
pub struct CorpusReader<R> {
    path: PathBuf,
    lines: std::io::Lines<R>,
    line_no: usize,
    records: usize,
    seen_ids: HashSet<String>,
    malformed: Vec<Malformed>,
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(reader: R, path: impl Into<PathBuf>, format: CorpusFormat) -> Self {
        let CorpusFormat::Jsonl = format;
        CorpusReader {
            path: path.into(),
            lines: reader.lines(),
            line_no: 0,
            records: 0,
            seen_ids: HashSet::new(),
            malformed: Vec::new(),
        }
    }

    pub fn malformed(&self) -> &[Malformed] {
        &self.malformed
    }

    /// Non-blank records consumed so far.
    pub fn records(&self) -> usize {
        self.records
    }

    /// Applies the corpus-quality threshold to everything read so far.
    pub fn finish(self) -> Result<Vec<Malformed>> {
        if self.malformed.len() * 100 > self.records * MALFORMED_LIMIT_PERCENT {
            return Err(Error::CorpusQuality {
                path: self.path,
                malformed: self.malformed.len(),
                total: self.records,
            });
        }
        Ok(self.malformed)
    }

    fn parse_line(&mut self, line: &str) -> std::result::Result<Tweet, String> {
        let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
        let Value::Object(obj) = value else {
            return Err("record is not a JSON object".into());
        };
        let id = id_field(&obj)?;
        let author = string_field(&obj, "author")?;
        let timestamp = match obj.get("ts") {
            None | Some(Value::Null) => return Err("missing field `ts`".into()),
            Some(Value::String(s)) => {
                parse_instant(s).ok_or_else(|| format!("unparseable timestamp `{s}`"))?
            }
            Some(Value::Number(n)) => n
                .as_i64()
                .and_then(from_epoch)
                .ok_or_else(|| format!("timestamp `{n}` is not integer epoch seconds"))?,
            Some(_) => return Err("field `ts` must be a string or integer".into()),
        };
        let text = string_field(&obj, "text")?;
        if text.is_empty() {
            return Err("empty text".into());
        }
        if text.len() > MAX_TEXT_BYTES {
            return Err(format!(
                "text is {} bytes (limit {MAX_TEXT_BYTES})",
                text.len()
            ));
        }
        if !self.seen_ids.insert(id.clone()) {
            return Err(format!("duplicate id `{id}`"));
        }
        Ok(Tweet {
            id,
            author,
            timestamp,
            text,
        })
    }
}

fn string_field(obj: &Map<String, Value>, key: &str) -> std::result::Result<String, String> {
    match obj.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        None | Some(Value::Null) => Err(format!("missing field `{key}`")),
        Some(_) => Err(format!("field `{key}` must be a string")),
    }
}

fn id_field(obj: &Map<String, Value>) -> std::result::Result<String, String> {
    let id = match obj.get("id") {
        Some(Value::Number(n)) if n.is_u64() || n.is_i64() => n.to_string(),
        _ => string_field(obj, "id")?,
    };
    if id.is_empty() {
        return Err("empty id".into());
    }
    Ok(id)
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<Tweet>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(Error::io(&self.path, e))),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            self.records += 1;
            match self.parse_line(&line) {
                Ok(tweet) => return Some(Ok(tweet)),
                Err(reason) => self.malformed.push(Malformed {
                    line: self.line_no,
                    reason,
                }),
            }
        }
    }
}

pub fn open_corpus(
    path: impl AsRef<Path>,
    format: CorpusFormat,
) -> Result<CorpusReader<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(CorpusReader::new(BufReader::new(file), path, format))
}

/// A fully materialized corpus plus its ingestion report.
#[derive(Clone, Debug, Default)]
pub struct LoadedCorpus {
    pub tweets: Vec<Tweet>,
    pub malformed: Vec<Malformed>,
    pub records: usize,
}

pub fn read_corpus<R: BufRead>(
    reader: R,
    path: impl Into<PathBuf>,
    format: CorpusFormat,
) -> Result<LoadedCorpus> {
    let mut reader = CorpusReader::new(reader, path, format);
    let tweets = reader.by_ref().collect::<Result<Vec<_>>>()?;
    let records = reader.records();
    let malformed = reader.finish()?;
    Ok(LoadedCorpus {
        tweets,
        malformed,
        records,
    })
}

pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<LoadedCorpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(BufReader::new(file), path, format)
}

/// Writes tweets as JSONL with ISO-8601 `ts` strings.
pub fn write_corpus<W: Write>(mut out: W, tweets: &[Tweet]) -> std::io::Result<()> {
    for t in tweets {
        let record = serde_json::json!({
            "id": t.id,
            "author": t.author,
            "ts": format_instant(&t.timestamp),
            "text": t.text,
        });
        writeln!(out, "{record}")?;
    }
    Ok(())
}
