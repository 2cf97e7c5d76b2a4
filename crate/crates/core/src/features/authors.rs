use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::corpus::Tweet;

/// Author activity histograms. Each maps "number of items" to "number of
/// authors with that many items".
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AuthorStats {
    pub unique_authors: usize,
    pub tweets_per_author: BTreeMap<u64, u64>,
    pub topics_per_author: BTreeMap<u64, u64>,
}

impl AuthorStats {
    /// Σ count × frequency of a histogram.
    pub fn mass(histogram: &BTreeMap<u64, u64>) -> u64 {
        histogram.iter().map(|(c, f)| c * f).sum()
    }
}

fn histogram<I: IntoIterator<Item = u64>>(counts: I) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for c in counts {
        *h.entry(c).or_insert(0) += 1;
    }
    h
}

/// `topic_of` maps tweet ids to topic names; tweets absent from it count
/// toward tweets-per-author only.
pub fn author_stats<'a, I>(tweets: I, topic_of: &HashMap<String, String>) -> AuthorStats
where
    I: IntoIterator<Item = &'a Tweet>,
{
    let mut tweets_by: HashMap<&str, u64> = HashMap::new();
    let mut topics_by: HashMap<&str, HashSet<&str>> = HashMap::new();
    for t in tweets {
        *tweets_by.entry(t.author.as_str()).or_insert(0) += 1;
        if let Some(topic) = topic_of.get(&t.id) {
            topics_by
                .entry(t.author.as_str())
                .or_default()
                .insert(topic.as_str());
        }
    }
    AuthorStats {
        unique_authors: tweets_by.len(),
        tweets_per_author: histogram(tweets_by.into_values()),
        topics_per_author: histogram(topics_by.into_values().map(|s| s.len() as u64)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_instant;

    fn by(author: &str, id: usize) -> Tweet {
        Tweet {
            id: id.to_string(),
            author: author.into(),
            timestamp: parse_instant("2010-01-01").unwrap(),
            text: "x".into(),
        }
    }

    #[test]
    fn one_author_three_tweets() {
        let ts: Vec<Tweet> = (0..3).map(|i| by("a", i)).collect();
        let s = author_stats(&ts, &HashMap::new());
        assert_eq!(s.unique_authors, 1);
        assert_eq!(s.tweets_per_author, BTreeMap::from([(3, 1)]));
        assert!(s.topics_per_author.is_empty());
    }

    #[test]
    fn five_authors_once_each() {
        let ts: Vec<Tweet> = (0..5).map(|i| by(&format!("u{i}"), i)).collect();
        let s = author_stats(&ts, &HashMap::new());
        assert_eq!(s.tweets_per_author, BTreeMap::from([(1, 5)]));
    }

    #[test]
    fn topics_per_author_counts_distinct_topics() {
        let ts = vec![by("a", 0), by("a", 1), by("a", 2), by("b", 3)];
        let topic_of: HashMap<String, String> = [("0", "x"), ("1", "y"), ("2", "x"), ("3", "x")]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let s = author_stats(&ts, &topic_of);
        assert_eq!(s.topics_per_author, BTreeMap::from([(1, 1), (2, 1)]));
        assert_eq!(AuthorStats::mass(&s.tweets_per_author), 4);
        // author-topic pairs: (a,x) (a,y) (b,x)
        assert_eq!(AuthorStats::mass(&s.topics_per_author), 3);
    }
}
