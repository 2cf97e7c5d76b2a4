//! Synthetic observations from the general attention / polarity /
//! distribution model `y = βa·A + βp·P + βd·D + ε`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use super::design::DesignMatrix;
use crate::error::{Error, Result};

pub const ATTENTION: &str = "attention";
pub const POLARITY: &str = "polarity";
pub const DISTRIBUTION: &str = "distribution";

/// Coefficients of the general model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelBetas {
    pub attention: f64,
    pub polarity: f64,
    pub distribution: f64,
}

impl Default for ModelBetas {
    /// Revenue in millions: 0.6 per tweet/hour, 0.4 per unit of
    /// positive/negative ratio, 0.008 per theater.
    fn default() -> Self {
        ModelBetas {
            attention: 0.6,
            polarity: 0.4,
            distribution: 0.008,
        }
    }
}

impl ModelBetas {
    pub fn response(&self, attention: f64, polarity: f64, distribution: f64) -> f64 {
        self.attention * attention + self.polarity * polarity + self.distribution * distribution
    }
}

/// Predictor ranges. Attention is lognormal (heavy-tailed), polarity is
/// uniform, distribution is a uniform integer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Median of the lognormal attention rate (tweets per hour).
    pub attention_median: f64,
    /// Log-scale spread of the attention rate.
    pub attention_sigma: f64,
    pub polarity_range: (f64, f64),
    pub distribution_range: (u64, u64),
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            attention_median: 6.0,
            attention_sigma: 1.0,
            polarity_range: (0.5, 10.0),
            distribution_range: (500, 4000),
        }
    }
}

impl SynthConfig {
    fn attention_dist(&self) -> LogNormal<f64> {
        LogNormal::new(self.attention_median.ln(), self.attention_sigma)
            .expect("attention sigma is finite and nonnegative")
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> (f64, f64, f64) {
        let a = self.attention_dist().sample(rng);
        let (lo, hi) = self.polarity_range;
        let p = rng.random_range(lo..=hi);
        let (dlo, dhi) = self.distribution_range;
        let d = rng.random_range(dlo..=dhi) as f64;
        (a, p, d)
    }
}

/// How the noise standard deviation is set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Noise {
    Absolute(f64),
    /// Multiple of the sample standard deviation of the noiseless response.
    RelativeToSignal(f64),
}

impl Noise {
    fn sd(self, signal: &[f64]) -> f64 {
        match self {
            Noise::Absolute(sd) => sd,
            Noise::RelativeToSignal(k) => k * sample_sd(signal),
        }
    }

    fn value(self) -> f64 {
        match self {
            Noise::Absolute(v) | Noise::RelativeToSignal(v) => v,
        }
    }
}

pub(crate) fn sample_sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn check(n: usize, noise: Noise) -> Result<()> {
    if n < 4 {
        return Err(Error::InvalidInput(format!(
            "synthetic design needs n ≥ 4, got {n}"
        )));
    }
    if !(noise.value() >= 0.0 && noise.value().is_finite()) {
        return Err(Error::InvalidInput(
            "noise level must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}

fn add_noise(signal: Vec<f64>, noise: Noise, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let sd = noise.sd(&signal);
    let eps = Normal::new(0.0, sd).expect("finite noise sd");
    signal.into_iter().map(|s| s + eps.sample(rng)).collect()
}

/// `n` observations of (A, P, D) with response from the general model plus
/// Gaussian noise. Deterministic per seed.
pub fn synth_generate(
    betas: ModelBetas,
    noise: Noise,
    n: usize,
    seed: u64,
    config: &SynthConfig,
) -> Result<DesignMatrix> {
    check(n, noise)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(f64, f64, f64)> = (0..n).map(|_| config.draw(&mut rng)).collect();
    let signal = draws
        .iter()
        .map(|&(a, p, d)| betas.response(a, p, d))
        .collect();
    let y = add_noise(signal, noise, &mut rng);
    DesignMatrix::new(
        vec![ATTENTION.into(), POLARITY.into(), DISTRIBUTION.into()],
        draws.iter().map(|&(a, p, d)| vec![a, p, d]).collect(),
        "y",
        y,
    )
}

/// Relative weights for the seven pre-release days: a ramp toward release
/// with lognormal day-to-day jitter, normalized to mean 1.
pub fn daily_profile<R: Rng>(rng: &mut R, days: usize) -> Vec<f64> {
    let jitter = LogNormal::new(0.0, 0.35).expect("valid lognormal");
    let raw: Vec<f64> = (0..days)
        .map(|d| (1.0 + 0.15 * d as f64) * jitter.sample(rng))
        .collect();
    let mean = raw.iter().sum::<f64>() / days as f64;
    raw.into_iter().map(|w| w / mean).collect()
}

/// Names of the seven daily tweet-rate columns.
pub fn daily_rate_names() -> Vec<String> {
    (1..=7).map(|d| format!("rate_d{d}")).collect()
}

/// Design with the seven pre-release daily tweet rates and the theater
/// count as predictors. A is the mean of the daily rates and P stays
/// unobserved, as in a pre-release forecast.
pub fn synth_rate_design(
    betas: ModelBetas,
    noise: Noise,
    n: usize,
    seed: u64,
    config: &SynthConfig,
) -> Result<DesignMatrix> {
    check(n, noise)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut signal = Vec::with_capacity(n);
    for _ in 0..n {
        let (a, p, d) = config.draw(&mut rng);
        let mut row: Vec<f64> = daily_profile(&mut rng, 7)
            .into_iter()
            .map(|w| a * w)
            .collect();
        let realized_a = row.iter().sum::<f64>() / 7.0;
        signal.push(betas.response(realized_a, p, d));
        row.push(d);
        rows.push(row);
    }
    let y = add_noise(signal, noise, &mut rng);
    let mut names = daily_rate_names();
    names.push("thcnt".into());
    DesignMatrix::new(names, rows, "y", y)
}
