//! Digital fractional-order Savitzky-Golay differentiator (the comparison
//! baseline): one global degree-`N` least-squares fit on a theta-subsampled
//! grid in the integer abscissa `v = i + 1`, then termwise fractional
//! differentiation of the fitted polynomial at every sample.
//!
//! Forming the normal equations explicitly is numerically catastrophic at
//! `N = 14, M = 1000` (design entries up to `1001^14`), so the system is
//! solved by an orthogonal factorization of the column-equilibrated design;
//! the solution is mathematically the same least-squares minimizer.

use crate::differentiator::{EstimateSeries, Mode};
use crate::error::{Error, Result};
use crate::kernel::DiffOrder;
use crate::signals::SampledSignal;
use crate::specfun::{gamma_unchecked, recip_gamma, MAX_DEGREE};
use nalgebra::{DMatrix, DVector};

/// Fit degree, subsampling stride and derivative order for the baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfosgdConfig {
    trunc: usize,
    theta: usize,
    order: DiffOrder,
}

impl DfosgdConfig {
    /// Validates `theta >= 1` and the supported fit degree.
    pub fn new(trunc: usize, theta: usize, order: DiffOrder) -> Result<Self> {
        if theta == 0 {
            return Err(Error::InvalidParam("theta must be at least 1".into()));
        }
        if trunc > MAX_DEGREE {
            return Err(Error::InvalidParam(format!(
                "fit degree {trunc} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        Ok(Self {
            trunc,
            theta,
            order,
        })
    }

    /// Fit degree `N`.
    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Subsampling stride.
    pub fn theta(&self) -> usize {
        self.theta
    }

    /// Derivative order.
    pub fn order(&self) -> DiffOrder {
        self.order
    }
}

/// Indices of the subsampled rows: `0, theta, 2 theta, ...` with the final
/// row pinned to sample `M`.
fn subsample_indices(m: usize, theta: usize) -> Vec<usize> {
    let rows = m / theta + 1;
    let mut idx: Vec<usize> = (0..rows).map(|r| r * theta).collect();
    idx[rows - 1] = m;
    idx
}

/// Design matrix with rows `[1, v, v^2, ..., v^N]` at `v = 1 + r theta`
/// (final row at `v = M + 1`).
pub fn build_design(m: usize, theta: usize, trunc: usize) -> Result<DMatrix<f64>> {
    if theta == 0 {
        return Err(Error::InvalidParam("theta must be at least 1".into()));
    }
    let idx = subsample_indices(m, theta);
    if idx.len() < trunc + 1 {
        return Err(Error::InvalidParam(format!(
            "design has {} rows, fewer than the {} coefficients of a degree-{trunc} fit",
            idx.len(),
            trunc + 1
        )));
    }
    Ok(DMatrix::from_fn(idx.len(), trunc + 1, |r, c| {
        ((idx[r] + 1) as f64).powi(c as i32)
    }))
}

fn fit_impl(signal: &SampledSignal, config: &DfosgdConfig, equilibrate: bool) -> Result<Vec<f64>> {
    let m = signal.len() - 1;
    let design = build_design(m, config.theta, config.trunc)?;
    let idx = subsample_indices(m, config.theta);
    let rhs = DVector::from_iterator(idx.len(), idx.iter().map(|&i| signal.values()[i]));

    // Column equilibration: scale every column to unit max-norm, solve, and
    // rescale the solution. This only changes conditioning, not the
    // minimizer.
    let scales: Vec<f64> = (0..design.ncols())
        .map(|c| {
            if equilibrate {
                design.column(c).amax()
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = design;
    for (c, &s) in scales.iter().enumerate() {
        if s == 0.0 {
            return Err(Error::RankDeficient(format!("design column {c} is zero")));
        }
        scaled.column_mut(c).scale_mut(1.0 / s);
    }

    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.amax();
    let smin = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if !(smin > smax * 1e-13) {
        return Err(Error::RankDeficient(format!(
            "equilibrated design has singular values spanning {smax:e} .. {smin:e}"
        )));
    }
    let solution = svd
        .solve(&rhs, smax * 1e-14)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;
    Ok(solution
        .iter()
        .zip(&scales)
        .map(|(b, s)| b / s)
        .collect())
}

/// Least-squares coefficients of the degree-`N` fit in the abscissa
/// `v = i + 1` (subsampled every `theta` rows, last row at `v = M + 1`).
pub fn fit(signal: &SampledSignal, config: &DfosgdConfig) -> Result<Vec<f64>> {
    fit_impl(signal, config, true)
}

/// `Gamma(k+1) / Gamma(k+1-alpha)`, evaluated as the exact falling factorial
/// when `alpha` is an integer (so e.g. alpha = 0 gives exactly 1 and the
/// monomial terms of the fitted polynomial cancel the same way on both sides
/// of the smoothing identity).
fn gamma_ratio(k: usize, order: DiffOrder) -> f64 {
    if order.is_integer() {
        let a = order.alpha() as usize;
        if a > k {
            return 0.0;
        }
        ((k - a + 1)..=k).map(|v| v as f64).product()
    } else {
        gamma_unchecked(k as f64 + 1.0) * recip_gamma(k as f64 + 1.0 - order.alpha())
    }
}

/// The DFOSGD estimate series: for every sample `i = 0..=M`,
///
/// ```text
/// (1/T_s^alpha) sum_k coeff_k Gamma(k+1) / Gamma(k+1-alpha) (i+1)^{k-alpha}
/// ```
pub fn estimate_series_dfosgd(
    signal: &SampledSignal,
    config: &DfosgdConfig,
) -> Result<EstimateSeries> {
    let coeffs = fit(signal, config)?;
    let alpha = config.order.alpha();
    let prefactor = signal.period().powf(-alpha);
    // The Gamma ratios do not depend on i.
    let ratios: Vec<f64> = (0..coeffs.len())
        .map(|k| gamma_ratio(k, config.order))
        .collect();
    let m = signal.len() - 1;
    let mut abscissae = Vec::with_capacity(m + 1);
    let mut values = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let v = (i + 1) as f64;
        let mut s = 0.0;
        for (k, (&c, &g)) in coeffs.iter().zip(&ratios).enumerate() {
            if g != 0.0 {
                s += c * g * v.powf(k as f64 - alpha);
            }
        }
        abscissae.push(signal.x(i));
        values.push(prefactor * s);
    }
    EstimateSeries::new(abscissae, values, config.order, Mode::Global)
}
