use chrono::{DateTime, Duration, Utc};
use serde::Serialize;

use super::Tweet;

/// The week before release through two weeks after, as half-open
/// `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalPeriod {
    pub start: DateTime<Utc>,
    pub release: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl CriticalPeriod {
    pub fn around(release: DateTime<Utc>) -> Self {
        CriticalPeriod {
            start: release - Duration::days(7),
            release,
            end: release + Duration::days(14),
        }
    }

    /// Start and end of week `k` (0 = pre-release, 1 and 2 post-release).
    pub fn week_bounds(&self, k: usize) -> (DateTime<Utc>, DateTime<Utc>) {
        assert!(k < 3, "critical period has weeks 0..=2");
        let start = self.start + Duration::days(7 * k as i64);
        (start, start + Duration::days(7))
    }

    /// Week index of `t`, or `None` outside the period.
    pub fn week_of(&self, t: DateTime<Utc>) -> Option<usize> {
        if t < self.start || t >= self.end {
            return None;
        }
        Some(((t - self.start).num_seconds() / (7 * 86_400)) as usize)
    }
}

#[derive(Clone, Debug)]
pub struct WeekPartition<T> {
    pub weeks: [Vec<T>; 3],
    pub excluded: usize,
}

impl<T> Default for WeekPartition<T> {
    fn default() -> Self {
        WeekPartition {
            weeks: [Vec::new(), Vec::new(), Vec::new()],
            excluded: 0,
        }
    }
}

impl<T> WeekPartition<T> {
    pub fn week(&self, k: usize) -> &[T] {
        &self.weeks[k]
    }

    pub fn in_range(&self) -> usize {
        self.weeks.iter().map(Vec::len).sum()
    }
}

/// Splits tweets into pre-release week, first and second post-release
/// weeks. Tweets outside the period are counted but dropped.
pub fn window<'a, I>(tweets: I, period: &CriticalPeriod) -> WeekPartition<&'a Tweet>
where
    I: IntoIterator<Item = &'a Tweet>,
{
    let mut out = WeekPartition::default();
    for t in tweets {
        match period.week_of(t.timestamp) {
            Some(k) => out.weeks[k].push(t),
            None => out.excluded += 1,
        }
    }
    out
}
