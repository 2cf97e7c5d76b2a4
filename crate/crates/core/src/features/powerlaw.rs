use crate::error::{Error, Result};

/// Least-squares slope of log10(frequency) against log10(count).
///
/// Points with zero count or zero frequency are skipped. At least three
/// distinct counts must remain.
pub fn loglog_slope<I>(histogram: I) -> Result<f64>
where
    I: IntoIterator<Item = (u64, f64)>,
{
    let mut points: Vec<(f64, f64)> = histogram
        .into_iter()
        .filter(|&(c, f)| c > 0 && f > 0.0)
        .map(|(c, f)| ((c as f64).log10(), f.log10()))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points.dedup_by(|a, b| a.0 == b.0);
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "log-log slope needs 3 nonzero histogram bins, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        let dx = x - mx;
        (sxy + dx * (y - my), sxx + dx * dx)
    });
    Ok(sxy / sxx)
}
