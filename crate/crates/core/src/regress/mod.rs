//! Least squares with inference, correlation, forecast accuracy, and a
//! synthetic generator for the general attention/polarity/distribution
//! model.
//!
//! AMAPE is the symmetric absolute percentage error: each term divides the
//! absolute error by the mean of |prediction| and |actual|. Score is defined
//! as `100 − AMAPE`.

mod design;
mod linalg;
mod metrics;
mod ols;
pub mod special;
pub mod synth;

pub use design::{DesignMatrix, INTERCEPT};
pub use metrics::{amape, pearson, score};
pub use ols::{adjusted_r2, fit_ols, PValue, RegressionFit};
pub use synth::{synth_generate, synth_rate_design, ModelBetas, Noise, SynthConfig};
