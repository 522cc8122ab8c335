//! Error quantification between estimate series and oracle truth, including
//! the noise-error-contribution decomposition, plus the report CSV format.

use crate::differentiator::EstimateSeries;
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// Pointwise absolute errors over a scored sub-interval, with their RMSE and
/// maximum.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    abscissae: Vec<f64>,
    abs_errors: Vec<f64>,
    rmse: f64,
    max_abs: f64,
    region: (f64, f64),
}

impl ErrorReport {
    fn from_errors(abscissae: Vec<f64>, abs_errors: Vec<f64>) -> Self {
        debug_assert_eq!(abscissae.len(), abs_errors.len());
        debug_assert!(!abs_errors.is_empty());
        let n = abs_errors.len() as f64;
        let rmse = (abs_errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
        let max_abs = abs_errors.iter().cloned().fold(0.0, f64::max);
        let region = (abscissae[0], abscissae[abscissae.len() - 1]);
        Self {
            abscissae,
            abs_errors,
            rmse,
            max_abs,
            region,
        }
    }

    /// Scored abscissae (after trimming).
    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    /// Pointwise `|estimate - truth|` over the scored region.
    pub fn abs_errors(&self) -> &[f64] {
        &self.abs_errors
    }

    /// Root-mean-square error over the scored region.
    pub fn rmse(&self) -> f64 {
        self.rmse
    }

    /// Largest pointwise error over the scored region.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    /// First and last scored abscissa.
    pub fn region(&self) -> (f64, f64) {
        self.region
    }

    /// Number of scored points.
    pub fn len(&self) -> usize {
        self.abs_errors.len()
    }

    /// True when nothing was scored (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.abs_errors.is_empty()
    }
}

/// Scores `estimates` against `truth` (aligned on the estimate abscissae),
/// trimming `trim_fraction` of the points at each end before computing the
/// pointwise errors, RMSE and maximum.
pub fn error_report(
    estimates: &EstimateSeries,
    truth: &[f64],
    trim_fraction: f64,
) -> Result<ErrorReport> {
    if truth.len() != estimates.len() {
        return Err(Error::InvalidParam(format!(
            "{} truth values for {} estimates",
            truth.len(),
            estimates.len()
        )));
    }
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(Error::InvalidParam(format!(
            "trim fraction must lie in [0, 0.5), got {trim_fraction}"
        )));
    }
    let n = estimates.len();
    let cut = (trim_fraction * n as f64).floor() as usize;
    if n <= 2 * cut {
        return Err(Error::InvalidParam(format!(
            "trimming {cut} points from each end of {n} leaves nothing to score"
        )));
    }
    let abscissae = estimates.abscissae()[cut..n - cut].to_vec();
    let abs_errors = estimates.values()[cut..n - cut]
        .iter()
        .zip(&truth[cut..n - cut])
        .map(|(e, t)| (e - t).abs())
        .collect();
    Ok(ErrorReport::from_errors(abscissae, abs_errors))
}

/// Pointwise `|noisy - clean|` over identical abscissae. By linearity of the
/// estimator this equals the estimate of the noise alone.
pub fn noise_contribution(
    noisy: &EstimateSeries,
    clean: &EstimateSeries,
) -> Result<ErrorReport> {
    if noisy.len() != clean.len()
        || noisy
            .abscissae()
            .iter()
            .zip(clean.abscissae())
            .any(|(a, b)| a != b)
    {
        return Err(Error::InvalidParam(
            "noise contribution needs identical abscissae".into(),
        ));
    }
    let abs_errors = noisy
        .values()
        .iter()
        .zip(clean.values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(ErrorReport::from_errors(
        noisy.abscissae().to_vec(),
        abs_errors,
    ))
}

/// Writes `x,abs_error` rows plus the trailing summary comment line
/// `# rmse=<v> max=<v> region=<lo>,<hi>`.
pub fn write_report_csv(report: &ErrorReport, path: &Path) -> Result<()> {
    let mut out = String::from("x,abs_error\n");
    for (x, e) in report.abscissae().iter().zip(report.abs_errors()) {
        writeln!(out, "{x},{e}").expect("string write");
    }
    writeln!(
        out,
        "# rmse={} max={} region={},{}",
        report.rmse(),
        report.max_abs(),
        report.region().0,
        report.region().1
    )
    .expect("string write");
    std::fs::write(path, out)?;
    Ok(())
}
