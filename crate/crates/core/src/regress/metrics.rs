use crate::error::{Error, Result};

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    if x.len() < 2 {
        return Err(Error::InsufficientData(
            "correlation needs at least 2 pairs".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("y"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Adjusted (symmetric) mean absolute percentage error, in percent:
/// `(100 / n) Σ |p − a| / ((|p| + |a|) / 2)`.
pub fn amape(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_lengths(pred, actual)?;
    if pred.is_empty() {
        return Err(Error::InsufficientData("AMAPE of an empty series".into()));
    }
    let mut sum = 0.0;
    for (i, (p, a)) in pred.iter().zip(actual).enumerate() {
        let scale = (p.abs() + a.abs()) / 2.0;
        if scale == 0.0 {
            return Err(Error::ZeroPair(i));
        }
        sum += (p - a).abs() / scale;
    }
    Ok(100.0 * sum / pred.len() as f64)
}

/// `100 − AMAPE`.
pub fn score(pred: &[f64], actual: &[f64]) -> Result<f64> {
    Ok(100.0 - amape(pred, actual)?)
}
