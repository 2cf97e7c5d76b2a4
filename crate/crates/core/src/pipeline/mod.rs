//! Experiment configuration and the end-to-end runner.
//!
//! A run loads the corpora and topics, computes attention features per
//! topic, trains and applies the sentiment classifier when labels are
//! given, fits one regression per configured experiment, and writes CSV and
//! JSON reports plus a plain-text summary into the output directory.

mod run;
mod spec;
mod stages;

pub use run::{run_pipeline, slug, write_author_histograms, ExperimentResult, PipelineReport};
pub use spec::{
    parse_predictor_list, Experiment, ExperimentSpec, FeatureWindow, PredictorGroup, PredictorSet,
};
pub use stages::{
    build_design, classify_topic, feature_rows, load_corpora, match_topics, topic_features,
    topic_of_tweet, train_sentiment, weekly_polarity, CorpusStats, Outcomes, TopicFeatures,
    TopicObservations,
};
