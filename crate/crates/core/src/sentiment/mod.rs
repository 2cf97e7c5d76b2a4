//! Three-way sentiment: preprocessing, unanimity filtering of labeled
//! samples, a per-category character language-model classifier, stratified
//! cross-validation, and subjectivity / polarity ratios.

mod classifier;
mod cv;
mod labels;
mod lm;
mod polarity;
mod preprocess;

pub use classifier::{write_classifications, Classification, SentimentModel, MODEL_VERSION};
pub use cv::{cross_validate, CrossValidation};
pub use labels::{filter_unanimous, load_labels, write_labels, LabeledSample, SentimentLabel};
pub use lm::{CharLm, BOS, EOS};
pub use polarity::{polarity_summary, LabelCounts, PolaritySummary};
pub use preprocess::{preprocess, Preprocessor, StopWords};
