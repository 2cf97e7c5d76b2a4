use std::collections::HashSet;

use chrono::Duration;
use serde::Serialize;

use super::rate::tweet_rate_of_count;
use crate::corpus::{extract_flags, window, CriticalPeriod, Tweet};
use crate::ratio::Ratio;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeeklyPercentages {
    pub url_pct: [Ratio; 3],
    pub retweet_pct: [Ratio; 3],
}

/// Share of tweets per week carrying a URL or marked as a retweet, in
/// percent. Empty weeks are [`Ratio::Undefined`].
pub fn weekly_percentages(weeks: [&[&Tweet]; 3]) -> WeeklyPercentages {
    let mut url_pct = [Ratio::Undefined; 3];
    let mut retweet_pct = [Ratio::Undefined; 3];
    for (k, week) in weeks.iter().enumerate() {
        let (mut urls, mut retweets) = (0usize, 0usize);
        for t in week.iter() {
            let flags = extract_flags(t);
            urls += flags.has_url as usize;
            retweets += flags.is_retweet as usize;
        }
        let n = week.len() as f64;
        url_pct[k] = Ratio::of(100.0 * urls as f64, n);
        retweet_pct[k] = Ratio::of(100.0 * retweets as f64, n);
    }
    WeeklyPercentages {
        url_pct,
        retweet_pct,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttentionSummary {
    pub url_pct: [Ratio; 3],
    pub retweet_pct: [Ratio; 3],
    /// Tweets per hour in each week.
    pub avg_tweet_rate: [f64; 3],
    /// Tweets divided by distinct authors, per day of the critical period.
    pub tweets_per_unique_author: Vec<Ratio>,
}

/// Attention features of one topic's tweets over its critical period.
pub fn attention_summary(tweets: &[&Tweet], period: &CriticalPeriod) -> AttentionSummary {
    let part = window(tweets.iter().copied(), period);
    let pct = weekly_percentages([part.week(0), part.week(1), part.week(2)]);
    let avg_tweet_rate = [0, 1, 2].map(|k| {
        tweet_rate_of_count(part.week(k).len() as u64, Duration::days(7))
            .expect("week has positive length")
    });

    let days = ((period.end - period.start).num_days()) as usize;
    let mut counts = vec![0usize; days];
    let mut authors: Vec<HashSet<&str>> = vec![HashSet::new(); days];
    for t in part.weeks.iter().flatten() {
        let day = ((t.timestamp - period.start).num_seconds() / 86_400) as usize;
        counts[day] += 1;
        authors[day].insert(t.author.as_str());
    }
    let tweets_per_unique_author = counts
        .iter()
        .zip(&authors)
        .map(|(&c, a)| Ratio::of(c as f64, a.len() as f64))
        .collect();

    AttentionSummary {
        url_pct: pct.url_pct,
        retweet_pct: pct.retweet_pct,
        avg_tweet_rate,
        tweets_per_unique_author,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_instant;

    fn tweet(id: usize, author: &str, text: &str, hours: i64) -> Tweet {
        Tweet {
            id: id.to_string(),
            author: author.into(),
            timestamp: parse_instant("2009-11-13").unwrap() + Duration::hours(hours),
            text: text.into(),
        }
    }

    #[test]
    fn url_share_of_a_week() {
        let ts = [
            tweet(0, "a", "see http://x.co", 1),
            tweet(1, "a", "nice", 2),
            tweet(2, "b", "nice", 3),
            tweet(3, "c", "nice", 4),
        ];
        let refs: Vec<&Tweet> = ts.iter().collect();
        let pct = weekly_percentages([&refs, &[], &[]]);
        assert_eq!(pct.url_pct[0], Ratio::Defined(25.0));
        assert_eq!(pct.retweet_pct[0], Ratio::Defined(0.0));
        assert_eq!(pct.url_pct[1], Ratio::Undefined);
    }

    #[test]
    fn all_retweets() {
        let ts = [tweet(0, "a", "RT @b yes", 1), tweet(1, "a", "RT @c no", 2)];
        let refs: Vec<&Tweet> = ts.iter().collect();
        let pct = weekly_percentages([&[], &refs, &[]]);
        assert_eq!(pct.retweet_pct[1], Ratio::Defined(100.0));
    }

    #[test]
    fn summary_rates_and_author_ratio() {
        let release = parse_instant("2009-11-20").unwrap();
        let period = CriticalPeriod::around(release);
        // 3 tweets on day 0 from 2 authors, 1 tweet in week 1
        let ts = [
            tweet(0, "a", "x", 1),
            tweet(1, "a", "x", 2),
            tweet(2, "b", "x", 3),
            tweet(3, "b", "x", 7 * 24 + 1),
            tweet(4, "b", "x", -5),
        ];
        let refs: Vec<&Tweet> = ts.iter().collect();
        let s = attention_summary(&refs, &period);
        assert_eq!(s.avg_tweet_rate, [3.0 / 168.0, 1.0 / 168.0, 0.0]);
        assert_eq!(s.tweets_per_unique_author.len(), 21);
        assert_eq!(s.tweets_per_unique_author[0], Ratio::Defined(1.5));
        assert_eq!(s.tweets_per_unique_author[7], Ratio::Defined(1.0));
        assert_eq!(s.tweets_per_unique_author[1], Ratio::Undefined);
    }
}
