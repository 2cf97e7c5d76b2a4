//! Tweet corpora: ingestion, topic specs, keyword matching, critical-period
//! windowing and syntactic URL/retweet flags.

pub(crate) mod flags;
mod load;
pub(crate) mod matching;
mod time;
mod topic;
mod window;

pub use flags::{extract_flags, TweetFlags};
pub use load::{
    load_corpus, open_corpus, read_corpus, write_corpus, CorpusFormat, CorpusReader, LoadedCorpus,
    Malformed, MAX_TEXT_BYTES,
};
pub use matching::{match_topic, KeywordMatcher};
pub use time::{format_instant, parse_instant};
pub use topic::{load_topics, write_topics, TopicSpec};
pub use window::{window, CriticalPeriod, WeekPartition};

use chrono::{DateTime, Utc};

/// One timestamped, authored message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tweet {
    pub id: String,
    pub author: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
}
