use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::classifier::SentimentModel;
use super::labels::SentimentLabel;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossValidation {
    pub folds: usize,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

/// Stratified k-fold cross-validation. Each category's samples are shuffled
/// with `seed` and dealt round-robin into the folds.
pub fn cross_validate<S: AsRef<str> + Sync>(
    data: &[(S, SentimentLabel)],
    order: usize,
    folds: usize,
    seed: u64,
) -> Result<CrossValidation> {
    if folds < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 folds, got {folds}"
        )));
    }
    if data.len() < folds {
        return Err(Error::InsufficientData(format!(
            "{} samples cannot fill {folds} folds",
            data.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; data.len()];
    for label in SentimentLabel::ALL {
        let mut members: Vec<usize> = (0..data.len()).filter(|&i| data[i].1 == label).collect();
        if members.len() < folds {
            return Err(Error::InsufficientData(format!(
                "category {label} has {} samples, fewer than {folds} folds",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for (pos, i) in members.into_iter().enumerate() {
            fold_of[i] = pos % folds;
        }
    }

    let per_fold: Vec<usize> = (0..folds)
        .into_par_iter()
        .map(|k| -> Result<usize> {
            let train: Vec<(&str, SentimentLabel)> = data
                .iter()
                .zip(&fold_of)
                .filter(|(_, &f)| f != k)
                .map(|((t, l), _)| (t.as_ref(), *l))
                .collect();
            let model = SentimentModel::train(&train, order)?;
            Ok(data
                .iter()
                .zip(&fold_of)
                .filter(|(_, &f)| f == k)
                .filter(|((t, l), _)| model.classify(t.as_ref()).label == *l)
                .count())
        })
        .collect::<Result<_>>()?;

    let correct = per_fold.iter().sum();
    Ok(CrossValidation {
        folds,
        correct,
        total: data.len(),
        accuracy: correct as f64 / data.len() as f64,
    })
}
