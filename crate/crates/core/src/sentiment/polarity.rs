use serde::Serialize;

use super::labels::SentimentLabel;
use crate::ratio::Ratio;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LabelCounts {
    pub positive: u64,
    pub negative: u64,
    pub neutral: u64,
}

impl LabelCounts {
    pub fn add(&mut self, label: SentimentLabel) {
        match label {
            SentimentLabel::Positive => self.positive += 1,
            SentimentLabel::Negative => self.negative += 1,
            SentimentLabel::Neutral => self.neutral += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.positive + self.negative + self.neutral
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolaritySummary {
    /// (positive + negative) / neutral
    pub subjectivity: Ratio,
    /// positive / negative
    pub pn_ratio: Ratio,
    pub counts: LabelCounts,
}

impl From<LabelCounts> for PolaritySummary {
    fn from(counts: LabelCounts) -> Self {
        PolaritySummary {
            subjectivity: Ratio::of(
                (counts.positive + counts.negative) as f64,
                counts.neutral as f64,
            ),
            pn_ratio: Ratio::of(counts.positive as f64, counts.negative as f64),
            counts,
        }
    }
}

pub fn polarity_summary<I: IntoIterator<Item = SentimentLabel>>(labels: I) -> PolaritySummary {
    let mut counts = LabelCounts::default();
    for l in labels {
        counts.add(l);
    }
    counts.into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use SentimentLabel::*;

    fn stream(pos: usize, neg: usize, neu: usize) -> Vec<SentimentLabel> {
        [(Positive, pos), (Negative, neg), (Neutral, neu)]
            .into_iter()
            .flat_map(|(l, n)| std::iter::repeat_n(l, n))
            .collect()
    }

    #[test]
    fn ratios_from_counts() {
        let s = polarity_summary(stream(5, 1, 2));
        assert_eq!(s.subjectivity, Ratio::Defined(3.0));
        assert_eq!(s.pn_ratio, Ratio::Defined(5.0));
    }

    #[test]
    fn zero_denominators_are_undefined() {
        let s = polarity_summary(stream(0, 0, 10));
        assert_eq!(s.subjectivity, Ratio::Defined(0.0));
        assert_eq!(s.pn_ratio, Ratio::Undefined);
        let s = polarity_summary(stream(3, 0, 0));
        assert_eq!(s.subjectivity, Ratio::Undefined);
        assert_eq!(s.pn_ratio, Ratio::Undefined);
        let s = polarity_summary(Vec::new());
        assert_eq!(s.counts.total(), 0);
    }

    #[test]
    fn reference_polarity_magnitudes() {
        // label proportions built to hit the reported pre/post ratios
        for (pos, neg, want) in [
            (502, 100, 5.02),
            (965, 100, 9.65),
            (629, 100, 6.29),
            (500, 100, 5.0),
        ] {
            let s = polarity_summary(stream(pos, neg, 37));
            assert!((s.pn_ratio.value().unwrap() - want).abs() < 1e-12);
        }
    }
}
