use std::io::Write;

use serde::Serialize;

use crate::ratio::Ratio;

/// One long-format feature value: `(topic, feature, index, value)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureRow {
    pub topic: String,
    pub feature: String,
    pub index: usize,
    pub value: Ratio,
}

impl FeatureRow {
    pub fn new(topic: &str, feature: &str, index: usize, value: impl Into<Ratio>) -> Self {
        FeatureRow {
            topic: topic.to_string(),
            feature: feature.to_string(),
            index,
            value: value.into(),
        }
    }
}

/// Writes rows as CSV with header `topic,feature,index,value`; undefined
/// values are written as `NA`.
pub fn write_feature_table<W: Write>(out: W, rows: &[FeatureRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["topic", "feature", "index", "value"])?;
    for r in rows {
        w.write_record([
            r.topic.as_str(),
            r.feature.as_str(),
            &r.index.to_string(),
            &r.value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
