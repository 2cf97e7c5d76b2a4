//! Forecasting real-world outcomes from the rate and tone of tweets.
//!
//! The crate is organized as a pipeline:
//!
//! - [`corpus`]: JSONL tweet ingestion, topic keyword matching, windowing
//!   into the week before release and the two weeks after.
//! - [`features`]: tweet rates, daily rate series, URL/retweet shares,
//!   author histograms and their log-log slope.
//! - [`sentiment`]: preprocessing, a character n-gram classifier with
//!   Witten–Bell smoothing, and subjectivity / positive-negative ratios.
//! - [`regress`]: QR least squares with t and F tests, Pearson correlation,
//!   AMAPE/Score, and a synthetic data generator.
//! - [`fixture`] and [`pipeline`]: synthetic end-to-end datasets and the
//!   experiment runner behind the `tweetcast` command.

pub mod corpus;
pub mod error;
pub mod features;
pub mod fixture;
pub mod pipeline;
mod ratio;
pub mod regress;
pub mod sentiment;

pub use error::{Error, Result};
pub use ratio::Ratio;
