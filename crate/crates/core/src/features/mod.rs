//! Attention features: tweet rates, daily rate series, URL/retweet shares,
//! author activity histograms and their log-log slope.

mod attention;
mod authors;
mod powerlaw;
mod rate;
mod table;

pub use attention::{attention_summary, weekly_percentages, AttentionSummary, WeeklyPercentages};
pub use authors::{author_stats, AuthorStats};
pub use powerlaw::loglog_slope;
pub use rate::{rate_timeseries, tweet_rate, tweet_rate_of_count, BucketWidth, RateSeries};
pub use table::{write_feature_table, FeatureRow};
