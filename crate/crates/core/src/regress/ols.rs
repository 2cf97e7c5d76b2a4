use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::design::DesignMatrix;
use super::linalg::Qr;
use super::special::{f_upper_tail, student_t_two_sided};
use crate::error::{Error, Result};

/// Columns whose QR pivot falls below this fraction of their own norm are
/// treated as linear combinations of the columns before them.
const RANK_TOLERANCE: f64 = 1e-10;

/// Residual sum of squares at or below this fraction of the total sum of
/// squares is an exact fit.
const EXACT_FIT_TOLERANCE: f64 = 1e-20;

/// A p-value, or the marker for a fit with zero residual variance where no
/// finite test statistic exists.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PValue {
    Value(f64),
    ExactFit,
}

impl PValue {
    pub fn value(self) -> Option<f64> {
        match self {
            PValue::Value(p) => Some(p),
            PValue::ExactFit => None,
        }
    }

    /// `***` below 0.001, `**` below 0.01, `*` below 0.05.
    pub fn stars(self) -> &'static str {
        match self {
            PValue::Value(p) if p < 0.001 => "***",
            PValue::Value(p) if p < 0.01 => "**",
            PValue::Value(p) if p < 0.05 => "*",
            _ => "",
        }
    }
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PValue::Value(p) => write!(f, "{p:.4e}"),
            PValue::ExactFit => f.write_str("exact-fit"),
        }
    }
}

impl Serialize for PValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PValue::Value(p) => s.serialize_f64(*p),
            PValue::ExactFit => s.serialize_str("exact-fit"),
        }
    }
}

/// Least-squares coefficients with their inference statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub coef_p: Vec<PValue>,
    pub residual_variance: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub f_statistic: Option<f64>,
    pub model_p: PValue,
    /// Observations.
    pub n: usize,
    /// Predictors, intercept excluded.
    pub p: usize,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub response_name: String,
}

/// 1 − (1 − r²)(n − 1)/(n − p − 1).
pub fn adjusted_r2(r2: f64, n: usize, p: usize) -> Result<f64> {
    if n <= p + 1 {
        return Err(Error::InsufficientData(format!(
            "adjusted R² needs n > p + 1, got n = {n}, p = {p}"
        )));
    }
    Ok(1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n - p - 1) as f64)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Ordinary least squares through a Householder QR factorization.
pub fn fit_ols(x: &DesignMatrix) -> Result<RegressionFit> {
    let n = x.n();
    let p = x.p();
    if n <= p + 1 {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {} columns; need more rows than columns plus one",
            p + 1
        )));
    }
    let names = x.column_names();
    let columns = x.columns();
    let y = x.response();

    let qr = Qr::decompose(&columns, y);
    let singular: Vec<String> = (0..=p)
        .filter(|&j| qr.r[j][j].abs() <= RANK_TOLERANCE * norm(&columns[j]))
        .map(|j| names[j].clone())
        .collect();
    if !singular.is_empty() {
        return Err(Error::SingularDesign { columns: singular });
    }
    let beta = qr.solve_upper(&qr.qty);

    let fitted: Vec<f64> = x
        .rows()
        .iter()
        .map(|row| beta[0] + row.iter().zip(&beta[1..]).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();

    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if tss == 0.0 {
        return Err(Error::ZeroVariance("response"));
    }
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let df = (n - p - 1) as f64;
    let exact = rss <= EXACT_FIT_TOLERANCE * tss;

    let r2 = if exact { 1.0 } else { 1.0 - rss / tss };
    let adj_r2 = adjusted_r2(r2, n, p)?;
    let sigma2 = if exact { 0.0 } else { rss / df };

    let r_inv = qr.r_inverse();
    let std_errors: Vec<f64> = r_inv
        .iter()
        .map(|row| (sigma2 * row.iter().map(|v| v * v).sum::<f64>()).sqrt())
        .collect();
    let coef_p = beta
        .iter()
        .zip(&std_errors)
        .map(|(&b, &se)| {
            if exact {
                PValue::ExactFit
            } else {
                PValue::Value(student_t_two_sided(b / se, df))
            }
        })
        .collect();

    let (f_statistic, model_p) = if p == 0 {
        (None, PValue::Value(1.0))
    } else if exact {
        (None, PValue::ExactFit)
    } else {
        let f = ((tss - rss) / p as f64) / sigma2;
        (Some(f), PValue::Value(f_upper_tail(f, p as f64, df)))
    };

    Ok(RegressionFit {
        names,
        coefficients: beta,
        std_errors,
        coef_p,
        residual_variance: sigma2,
        r2,
        adj_r2,
        f_statistic,
        model_p,
        n,
        p,
        fitted,
        residuals,
        response_name: x.response_name().to_string(),
    })
}

#[derive(Serialize)]
struct CoefficientReport<'a> {
    name: &'a str,
    estimate: f64,
    std_error: f64,
    p_value: PValue,
    stars: &'static str,
}

#[derive(Serialize)]
struct FitReport<'a> {
    response: &'a str,
    n: usize,
    p: usize,
    coefficients: Vec<CoefficientReport<'a>>,
    residual_variance: f64,
    r2: f64,
    adj_r2: f64,
    f_statistic: Option<f64>,
    model_p: PValue,
    model_stars: &'static str,
}

impl RegressionFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.coefficients[i])
    }

    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    /// ŷ = β₀ + Σ βⱼ xⱼ; `x` must supply every fitted predictor.
    pub fn predict(&self, x: &HashMap<String, f64>) -> Result<f64> {
        let mut y = self.intercept();
        for (name, beta) in self.names.iter().zip(&self.coefficients).skip(1) {
            let v = x
                .get(name)
                .ok_or_else(|| Error::MissingColumn(name.clone()))?;
            y += beta * v;
        }
        Ok(y)
    }

    /// Predictions for every row of a design with the same predictors.
    pub fn predict_design(&self, x: &DesignMatrix) -> Result<Vec<f64>> {
        let names = &self.names[1..];
        let x = x.select(names)?;
        Ok(x.rows()
            .iter()
            .map(|row| {
                self.intercept()
                    + row
                        .iter()
                        .zip(&self.coefficients[1..])
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
            })
            .collect())
    }

    /// JSON report with coefficients, inference statistics and significance
    /// stars.
    pub fn to_json(&self) -> String {
        let report = FitReport {
            response: &self.response_name,
            n: self.n,
            p: self.p,
            coefficients: self
                .names
                .iter()
                .enumerate()
                .map(|(i, name)| CoefficientReport {
                    name,
                    estimate: self.coefficients[i],
                    std_error: self.std_errors[i],
                    p_value: self.coef_p[i],
                    stars: self.coef_p[i].stars(),
                })
                .collect(),
            residual_variance: self.residual_variance,
            r2: self.r2,
            adj_r2: self.adj_r2,
            f_statistic: self.f_statistic,
            model_p: self.model_p,
            model_stars: self.model_p.stars(),
        };
        serde_json::to_string_pretty(&report).expect("fit report is serializable")
    }
}

impl fmt::Display for RegressionFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<24} {:>14} {:>12} {:>12}",
            "term", "estimate", "std.err", "p"
        )?;
        for i in 0..self.names.len() {
            writeln!(
                f,
                "{:<24} {:>14.6e} {:>12.4e} {:>12} {}",
                self.names[i],
                self.coefficients[i],
                self.std_errors[i],
                self.coef_p[i].to_string(),
                self.coef_p[i].stars()
            )?;
        }
        write!(
            f,
            "n = {}, R² = {:.4}, adj. R² = {:.4}, model p = {} {}",
            self.n,
            self.r2,
            self.adj_r2,
            self.model_p,
            self.model_p.stars()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple(xs: &[f64], ys: &[f64]) -> DesignMatrix {
        DesignMatrix::new(
            vec!["x".into()],
            xs.iter().map(|&x| vec![x]).collect(),
            "y",
            ys.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn perfect_line() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let fit = fit_ols(&simple(&xs, &ys)).unwrap();
        assert!(fit.intercept().abs() < 1e-12);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-12);
        assert_eq!(fit.r2, 1.0);
        assert_eq!(fit.adj_r2, 1.0);
        assert_eq!(fit.coef_p, vec![PValue::ExactFit; 2]);
        assert_eq!(fit.model_p, PValue::ExactFit);
        let x10 = HashMap::from([("x".to_string(), 10.0)]);
        assert!((fit.predict(&x10).unwrap() - 20.0).abs() < 1e-10);
    }

    #[test]
    fn three_point_normal_equations() {
        // XᵀX = [[3,3],[3,5]], Xᵀy = [8,11] → β = (7/6, 3/2)
        let x = DesignMatrix::new(
            vec!["x".into()],
            vec![vec![0.0], vec![1.0], vec![2.0]],
            "y",
            vec![1.0, 3.0, 4.0],
        )
        .unwrap();
        // n = 3 > p + 1 = 2
        let fit = fit_ols(&x).unwrap();
        assert!((fit.coefficients[0] - 7.0 / 6.0).abs() < 1e-14);
        assert!((fit.coefficients[1] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn duplicated_column_is_singular() {
        let x = DesignMatrix::new(
            vec!["a".into(), "b".into()],
            (0..6).map(|i| vec![i as f64, i as f64]).collect(),
            "y",
            (0..6).map(|i| (i * i) as f64).collect(),
        )
        .unwrap();
        match fit_ols(&x) {
            Err(Error::SingularDesign { columns }) => assert_eq!(columns, vec!["b".to_string()]),
            other => panic!("expected singular design, got {other:?}"),
        }
    }

    #[test]
    fn constant_column_collides_with_intercept() {
        let x = simple(&[3.0; 5], &[1.0, 2.0, 3.0, 4.0, 6.0]);
        assert!(matches!(fit_ols(&x), Err(Error::SingularDesign { .. })));
    }

    #[test]
    fn too_few_rows() {
        let x = simple(&[1.0, 2.0], &[1.0, 3.0]);
        assert!(matches!(fit_ols(&x), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn adjusted_r2_formula() {
        assert_eq!(adjusted_r2(1.0, 10, 3).unwrap(), 1.0);
        assert_eq!(adjusted_r2(0.5, 24, 7).unwrap(), 0.28125);
        assert!(adjusted_r2(0.5, 8, 7).is_err());
    }

    #[test]
    fn zero_coefficient_has_unit_p_value() {
        // y symmetric around x̄ with no linear trend: slope is exactly 0
        let fit = fit_ols(&simple(
            &[-2.0, -1.0, 0.0, 1.0, 2.0],
            &[4.0, 1.0, 0.0, 1.0, 4.0],
        ))
        .unwrap();
        assert_eq!(fit.coefficients[1], 0.0);
        assert_eq!(fit.coef_p[1], PValue::Value(1.0));
    }

    #[test]
    fn textbook_inference() {
        // x = 1..6, y = (1.1, 1.9, 3.2, 3.9, 5.1, 5.8)
        // Sxy = 16.9, Sxx = 17.5 → slope 0.96571428…, intercept 0.12
        let fit = fit_ols(&simple(
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            &[1.1, 1.9, 3.2, 3.9, 5.1, 5.8],
        ))
        .unwrap();
        assert!((fit.coefficients[1] - 16.9 / 17.5).abs() < 1e-12);
        assert!((fit.coefficients[0] - 0.12).abs() < 1e-12);
        // t² = F for a single predictor, so their p-values agree
        let t_p = fit.coef_p[1].value().unwrap();
        let f_p = fit.model_p.value().unwrap();
        assert!((t_p - f_p).abs() < 1e-12);
        assert_eq!(fit.model_p.stars(), "***");
    }

    #[test]
    fn json_report_has_stars() {
        let fit = fit_ols(&simple(
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            &[1.1, 1.9, 3.2, 3.9, 5.1, 5.8],
        ))
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&fit.to_json()).unwrap();
        assert_eq!(v["coefficients"][1]["name"], "x");
        assert_eq!(v["coefficients"][1]["stars"], "***");
        assert_eq!(v["n"], 6);
    }
}
