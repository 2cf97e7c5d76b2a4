use chrono::{DateTime, Duration, Utc};
use serde::Serialize;

use crate::corpus::Tweet;
use crate::error::{Error, Result};

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `count` events over `window` as events per hour. The fraction
/// `count * 3600 / seconds` is reduced before the single rounding division.
pub fn tweet_rate_of_count(count: u64, window: Duration) -> Result<f64> {
    let secs = window.num_seconds();
    if secs <= 0 {
        return Err(Error::InvalidInput(format!(
            "tweet-rate window must have positive length, got {secs}s"
        )));
    }
    let num = count as u128 * 3600;
    let den = secs as u128;
    let g = gcd(num, den).max(1);
    Ok((num / g) as f64 / (den / g) as f64)
}

/// Tweets per hour over the half-open window `[start, end)`.
pub fn tweet_rate<'a, I>(tweets: I, start: DateTime<Utc>, end: DateTime<Utc>) -> Result<f64>
where
    I: IntoIterator<Item = &'a Tweet>,
{
    if end <= start {
        return Err(Error::InvalidInput("tweet-rate window is empty".into()));
    }
    let count = tweets
        .into_iter()
        .filter(|t| t.timestamp >= start && t.timestamp < end)
        .count();
    tweet_rate_of_count(count as u64, end - start)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BucketWidth {
    Hour,
    Day,
}

impl BucketWidth {
    pub fn hours(self) -> u32 {
        match self {
            BucketWidth::Hour => 1,
            BucketWidth::Day => 24,
        }
    }

    pub fn duration(self) -> Duration {
        Duration::hours(self.hours() as i64)
    }
}

/// Per-bucket tweet counts and the matching per-hour rates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateSeries {
    pub topic: String,
    pub bucket_width: BucketWidth,
    pub origin: DateTime<Utc>,
    pub counts: Vec<u64>,
    pub rates: Vec<f64>,
}

impl RateSeries {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Buckets tweets falling in `[origin, origin + buckets * width)`; anything
/// else is ignored.
pub fn rate_timeseries<'a, I>(
    topic: &str,
    tweets: I,
    origin: DateTime<Utc>,
    buckets: usize,
    width: BucketWidth,
) -> RateSeries
where
    I: IntoIterator<Item = &'a Tweet>,
{
    let width_secs = width.duration().num_seconds();
    let mut counts = vec![0u64; buckets];
    for t in tweets {
        let offset = (t.timestamp - origin).num_seconds();
        if offset < 0 {
            continue;
        }
        let idx = (offset / width_secs) as usize;
        if let Some(c) = counts.get_mut(idx) {
            *c += 1;
        }
    }
    let hours = width.hours() as f64;
    let rates = counts.iter().map(|&c| c as f64 / hours).collect();
    RateSeries {
        topic: topic.to_string(),
        bucket_width: width,
        origin,
        counts,
        rates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_instant;

    fn tweets_at(times: impl IntoIterator<Item = DateTime<Utc>>) -> Vec<Tweet> {
        times
            .into_iter()
            .enumerate()
            .map(|(i, t)| Tweet {
                id: i.to_string(),
                author: "a".into(),
                timestamp: t,
                text: "x".into(),
            })
            .collect()
    }

    #[test]
    fn empty_window_rate_is_zero() {
        let start = parse_instant("2010-01-01").unwrap();
        let none: Vec<Tweet> = Vec::new();
        assert_eq!(
            tweet_rate(&none, start, start + Duration::hours(24)).unwrap(),
            0.0
        );
    }

    #[test]
    fn zero_length_window_is_rejected() {
        let start = parse_instant("2010-01-01").unwrap();
        let none: Vec<Tweet> = Vec::new();
        assert!(tweet_rate(&none, start, start).is_err());
        assert!(tweet_rate_of_count(5, Duration::zero()).is_err());
    }

    #[test]
    fn rate_counts_exact_fraction() {
        assert_eq!(
            tweet_rate_of_count(462, Duration::hours(168)).unwrap(),
            2.75
        );
        assert_eq!(
            tweet_rate_of_count(1, Duration::seconds(3)).unwrap(),
            1200.0
        );
        assert_eq!(
            tweet_rate_of_count(1, Duration::hours(3)).unwrap(),
            1.0 / 3.0
        );
    }

    #[test]
    fn single_day_bucket() {
        let origin = parse_instant("2009-12-11").unwrap();
        let day3 = origin + Duration::days(3);
        let tweets = tweets_at((0..24).map(|m| day3 + Duration::minutes(m * 59)));
        let s = rate_timeseries("t", &tweets, origin, 7, BucketWidth::Day);
        assert_eq!(s.rates, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let empty = rate_timeseries("t", &[], origin, 7, BucketWidth::Day);
        assert_eq!(empty.counts, vec![0; 7]);
    }

    #[test]
    fn out_of_window_tweets_are_ignored() {
        let origin = parse_instant("2009-12-11").unwrap();
        let tweets = tweets_at([
            origin - Duration::seconds(1),
            origin,
            origin + Duration::days(7) - Duration::seconds(1),
            origin + Duration::days(7),
        ]);
        let s = rate_timeseries("t", &tweets, origin, 7, BucketWidth::Day);
        assert_eq!(s.total(), 2);
        assert_eq!(s.counts[0], 1);
        assert_eq!(s.counts[6], 1);
        let h = rate_timeseries("t", &tweets, origin, 2, BucketWidth::Hour);
        assert_eq!(h.rates, vec![1.0, 0.0]);
    }
}
