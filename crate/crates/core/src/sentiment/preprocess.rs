use std::collections::HashSet;

use crate::corpus::flags::{is_url_token, mention_spans};
use crate::corpus::matching::normalize;
use crate::corpus::{KeywordMatcher, TopicSpec};

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// Lowercase stop-word set.
#[derive(Clone, Debug)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        StopWords(
            words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        )
    }

    pub fn none() -> Self {
        StopWords(HashSet::new())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for StopWords {
    /// The bundled 50-word English list.
    fn default() -> Self {
        StopWords::new(DEFAULT_STOPWORDS.lines())
    }
}

/// Reusable preprocessing for one set of title keywords.
#[derive(Clone, Debug)]
pub struct Preprocessor {
    titles: KeywordMatcher,
    stopwords: StopWords,
}

impl Preprocessor {
    pub fn new(titles: KeywordMatcher, stopwords: StopWords) -> Self {
        Preprocessor { titles, stopwords }
    }

    pub fn for_topic(topic: &TopicSpec, stopwords: StopWords) -> Self {
        Self::new(KeywordMatcher::for_topic(topic), stopwords)
    }

    /// Applies, in order: NFC + lowercase; title → `MOV`; URL and @user
    /// removal; `!` → `EX`, `?` → `QM`; removal of other non-alphanumerics;
    /// stop-word removal; whitespace collapse.
    pub fn apply(&self, text: &str) -> String {
        let lowered = normalize(text);
        let titled = self.titles.replace_normalized(&lowered, "MOV");

        let no_urls = titled
            .split_whitespace()
            .filter(|tok| !is_url_token(tok))
            .collect::<Vec<_>>()
            .join(" ");
        let mut no_mentions = String::with_capacity(no_urls.len());
        let mut last = 0;
        for (start, end) in mention_spans(&no_urls) {
            no_mentions.push_str(&no_urls[last..start]);
            no_mentions.push(' ');
            last = end;
        }
        no_mentions.push_str(&no_urls[last..]);

        let mut marked = String::with_capacity(no_mentions.len() + 8);
        for c in no_mentions.chars() {
            match c {
                '!' => marked.push_str(" EX "),
                '?' => marked.push_str(" QM "),
                c if c.is_alphanumeric() || c.is_whitespace() => marked.push(c),
                _ => {}
            }
        }

        marked
            .split_whitespace()
            .filter(|tok| !self.stopwords.contains(tok))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn preprocess(text: &str, topic: &TopicSpec, stopwords: &StopWords) -> String {
    Preprocessor::for_topic(topic, stopwords.clone()).apply(text)
}
