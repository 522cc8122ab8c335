//! The comparison experiment: fractional Jacobi differentiator vs DFOSGD on
//! `sin(omega x)`, noise-free and at a calibrated SNR, scored against the
//! dual-oracle ground truth and summarized as median RMSE per cell.
//!
//! Everything here is deterministic given the seed list; file output is the
//! CLI's job.

use crate::dfosgd::{estimate_series_dfosgd, DfosgdConfig};
use crate::differentiator::{estimate_series, EstimateSeries, KernelCache, Mode};
use crate::error::{Error, Result};
use crate::kernel::DiffOrder;
use crate::metrics::{error_report, ErrorReport};
use crate::rl_oracle::{sin_fixture, FixtureRow};
use crate::signals::{calibrate_c, SampledSignal};
use crate::specfun::JacobiParams;

/// How noisy runs pick their noise amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    /// Calibrate `c` per seed to hit this SNR (dB).
    SnrDb(f64),
    /// Use a fixed amplitude.
    Amplitude(f64),
}

/// Full description of a benchmark run; defaults are the reference
/// experiment (`sin(5x)` on `[0, 4]`, `M = 1000`, `N = 14`, `theta = 5`,
/// `mu = kappa = 0`, SNR 10 dB, 20 seeds, 5% trim).
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    /// Derivative orders to evaluate.
    pub alphas: Vec<f64>,
    /// Truncation / fit degree `N` shared by both methods.
    pub trunc: usize,
    /// DFOSGD subsampling stride.
    pub theta: usize,
    /// Jacobi weight exponent `mu`.
    pub mu: f64,
    /// Jacobi weight exponent `kappa`.
    pub kappa: f64,
    /// Number of sample intervals `M`.
    pub m: usize,
    /// Signal interval `[a, b]` (the oracle terminal requires `a = 0`).
    pub interval: (f64, f64),
    /// Test-signal frequency: `y(x) = sin(omega x)`.
    pub omega: f64,
    /// Noise amplitude policy for the noisy cells.
    pub noise: NoiseSpec,
    /// Seeds for the noise draws.
    pub seeds: Vec<u64>,
    /// Fraction trimmed from each end before scoring.
    pub trim: f64,
}

impl BenchmarkSpec {
    /// The reference-experiment settings.
    pub fn reference_defaults() -> Self {
        Self {
            alphas: vec![0.5, 1.5],
            trunc: 14,
            theta: 5,
            mu: 0.0,
            kappa: 0.0,
            m: 1000,
            interval: (0.0, 4.0),
            omega: 5.0,
            noise: NoiseSpec::SnrDb(10.0),
            seeds: (0..20).collect(),
            trim: 0.05,
        }
    }
}

/// Which estimator produced a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// The fractional Jacobi differentiator (global mode).
    FractionalJacobi,
    /// The DFOSGD baseline.
    Dfosgd,
}

impl Method {
    /// Stable lowercase name for reports.
    pub fn name(&self) -> &'static str {
        match self {
            Method::FractionalJacobi => "jacobi",
            Method::Dfosgd => "dfosgd",
        }
    }
}

/// One scored estimator run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    /// Derivative order.
    pub alpha: f64,
    /// Estimator.
    pub method: Method,
    /// Noise seed; `None` marks the noise-free runs.
    pub seed: Option<u64>,
    /// Scored errors against the oracle fixture.
    pub report: ErrorReport,
    /// Measured SNR of the noisy signal, when applicable.
    pub snr_db: Option<f64>,
    /// Noise amplitude used, when applicable.
    pub noise_c: Option<f64>,
}

/// Median RMSE of one `(method, alpha, noisy?)` cell.
#[derive(Debug, Clone, Copy)]
pub struct CellSummary {
    /// Estimator.
    pub method: Method,
    /// Derivative order.
    pub alpha: f64,
    /// True for the noisy cells.
    pub noisy: bool,
    /// Median RMSE over the contributing runs.
    pub median_rmse: f64,
}

/// Everything a benchmark run produces.
#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    /// Ground truth used for scoring.
    pub fixture: Vec<FixtureRow>,
    /// One record per (alpha, method, seed-or-noise-free).
    pub runs: Vec<RunRecord>,
    /// Median RMSE per cell.
    pub cells: Vec<CellSummary>,
}

impl BenchmarkReport {
    /// The summary cell for `(method, alpha, noisy)`, if present.
    pub fn cell(&self, method: Method, alpha: f64, noisy: bool) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.alpha == alpha && c.noisy == noisy)
    }
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Caputo-quadrature panels used when the fixture has to be regenerated.
pub const FIXTURE_PANELS: usize = 1 << 16;
/// Cross-check stride for fixture regeneration.
pub const FIXTURE_CHECK_STRIDE: usize = 25;
/// Maximum tolerated disagreement between the two oracles.
pub const ORACLE_TOL: f64 = 1e-6;

/// Regenerates the ground-truth fixture for `spec` with the dual-oracle
/// cross-check.
pub fn regenerate_fixture(spec: &BenchmarkSpec) -> Result<Vec<FixtureRow>> {
    sin_fixture(
        spec.omega,
        &spec.alphas,
        spec.interval.0,
        spec.interval.1,
        spec.m,
        FIXTURE_CHECK_STRIDE,
        FIXTURE_PANELS,
        ORACLE_TOL,
    )
}

/// Truth values for one alpha on the interior grid `x_1 ..= x_M`.
fn truth_for_alpha(fixture: &[FixtureRow], spec: &BenchmarkSpec, alpha: f64) -> Result<Vec<f64>> {
    let ts = (spec.interval.1 - spec.interval.0) / spec.m as f64;
    let rows: Vec<&FixtureRow> = fixture.iter().filter(|r| r.alpha == alpha).collect();
    if rows.len() != spec.m {
        return Err(Error::InvalidParam(format!(
            "fixture holds {} rows for alpha = {alpha}, benchmark needs {}",
            rows.len(),
            spec.m
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        let expected = ts * (i + 1) as f64;
        if (row.x - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
            return Err(Error::InvalidParam(format!(
                "fixture abscissa {} does not match the benchmark grid point {expected}",
                row.x
            )));
        }
    }
    Ok(rows.iter().map(|r| r.truth).collect())
}

/// Drops the DFOSGD estimate at `x_0` so both methods are scored on the same
/// interior abscissae `x_1 ..= x_M` (the fractional kernel's domain excludes
/// `t = 0`, and the oracle is singular there for `alpha > 1`).
fn interior(series: EstimateSeries) -> Result<EstimateSeries> {
    EstimateSeries::new(
        series.abscissae()[1..].to_vec(),
        series.values()[1..].to_vec(),
        series.order(),
        series.mode(),
    )
}

/// Runs the full benchmark. `fixture` may carry previously frozen truth; when
/// absent it is regenerated (and cross-checked) from the oracles.
pub fn run_benchmark(
    spec: &BenchmarkSpec,
    fixture: Option<Vec<FixtureRow>>,
) -> Result<BenchmarkReport> {
    if spec.seeds.is_empty() {
        return Err(Error::InvalidParam("benchmark needs at least one seed".into()));
    }
    let fixture = match fixture {
        Some(f) => f,
        None => regenerate_fixture(spec)?,
    };
    let params = JacobiParams::new(spec.mu, spec.kappa)?;
    let (a, b) = spec.interval;
    let omega = spec.omega;
    let clean = SampledSignal::sample(|x| (omega * x).sin(), a, b, spec.m)?;
    let cache = KernelCache::new();
    let mut runs = Vec::new();

    for &alpha in &spec.alphas {
        let order = DiffOrder::new(alpha)?;
        let truth = truth_for_alpha(&fixture, spec, alpha)?;
        let dfosgd_cfg = DfosgdConfig::new(spec.trunc, spec.theta, order)?;

        // Noise-free estimates are seed independent; compute once, record per
        // seed so every (alpha, seed) cell appears in the run log.
        let jacobi_free = error_report(
            &estimate_series(&cache, &clean, params, order, spec.trunc, Mode::Global)?,
            &truth,
            spec.trim,
        )?;
        let dfosgd_free = error_report(
            &interior(estimate_series_dfosgd(&clean, &dfosgd_cfg)?)?,
            &truth,
            spec.trim,
        )?;

        for &seed in &spec.seeds {
            let c = match spec.noise {
                NoiseSpec::SnrDb(target) => calibrate_c(&clean, target, seed)?,
                NoiseSpec::Amplitude(c) => c,
            };
            let noisy = clean.add_noise(c, seed);
            let snr = noisy.snr_db()?;

            runs.push(RunRecord {
                alpha,
                method: Method::FractionalJacobi,
                seed: Some(seed),
                report: error_report(
                    &estimate_series(&cache, &noisy, params, order, spec.trunc, Mode::Global)?,
                    &truth,
                    spec.trim,
                )?,
                snr_db: Some(snr),
                noise_c: Some(c),
            });
            runs.push(RunRecord {
                alpha,
                method: Method::Dfosgd,
                seed: Some(seed),
                report: error_report(
                    &interior(estimate_series_dfosgd(&noisy, &dfosgd_cfg)?)?,
                    &truth,
                    spec.trim,
                )?,
                snr_db: Some(snr),
                noise_c: Some(c),
            });
            runs.push(RunRecord {
                alpha,
                method: Method::FractionalJacobi,
                seed: None,
                report: jacobi_free.clone(),
                snr_db: None,
                noise_c: None,
            });
            runs.push(RunRecord {
                alpha,
                method: Method::Dfosgd,
                seed: None,
                report: dfosgd_free.clone(),
                snr_db: None,
                noise_c: None,
            });
        }
    }

    let mut cells = Vec::new();
    for &alpha in &spec.alphas {
        for method in [Method::FractionalJacobi, Method::Dfosgd] {
            for noisy in [false, true] {
                let rmses: Vec<f64> = runs
                    .iter()
                    .filter(|r| {
                        r.alpha == alpha && r.method == method && r.seed.is_some() == noisy
                    })
                    .map(|r| r.report.rmse())
                    .collect();
                cells.push(CellSummary {
                    method,
                    alpha,
                    noisy,
                    median_rmse: median(rmses),
                });
            }
        }
    }

    Ok(BenchmarkReport {
        fixture,
        runs,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // The full-size benchmark is exercised by the acceptance suite; here a
    // scaled-down run checks determinism and the report structure.
    fn small_spec() -> BenchmarkSpec {
        BenchmarkSpec {
            alphas: vec![0.5],
            trunc: 8,
            theta: 5,
            m: 200,
            seeds: vec![1, 2, 3],
            ..BenchmarkSpec::reference_defaults()
        }
    }

    #[test]
    fn report_structure_and_determinism() {
        let spec = small_spec();
        let rep1 = run_benchmark(&spec, None).unwrap();
        // 1 alpha x 3 seeds x 2 methods x {noisy, noise-free}.
        assert_eq!(rep1.runs.len(), 12);
        assert_eq!(rep1.cells.len(), 4);
        let rep2 = run_benchmark(&spec, Some(rep1.fixture.clone())).unwrap();
        for (a, b) in rep1.runs.iter().zip(&rep2.runs) {
            assert_eq!(a.report.rmse().to_bits(), b.report.rmse().to_bits());
        }
        // Noise-free rows are identical across seeds.
        let free: Vec<&RunRecord> = rep1
            .runs
            .iter()
            .filter(|r| r.seed.is_none() && r.method == Method::FractionalJacobi)
            .collect();
        assert_eq!(free.len(), 3);
        assert!(free
            .windows(2)
            .all(|w| w[0].report.rmse() == w[1].report.rmse()));
    }

    #[test]
    fn repeated_seed_gives_identical_rows() {
        let spec = BenchmarkSpec {
            seeds: vec![7, 7],
            ..small_spec()
        };
        let rep = run_benchmark(&spec, None).unwrap();
        let noisy: Vec<&RunRecord> = rep
            .runs
            .iter()
            .filter(|r| r.seed.is_some() && r.method == Method::Dfosgd)
            .collect();
        assert_eq!(noisy.len(), 2);
        assert_eq!(
            noisy[0].report.rmse().to_bits(),
            noisy[1].report.rmse().to_bits()
        );
    }

    #[test]
    fn mismatched_fixture_is_rejected() {
        let spec = small_spec();
        let fixture = regenerate_fixture(&BenchmarkSpec {
            m: 100,
            ..spec.clone()
        })
        .unwrap();
        assert!(run_benchmark(&spec, Some(fixture)).is_err());
    }
}
