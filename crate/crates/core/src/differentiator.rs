//! Applies kernels to sampled signals through trapezoid quadrature, in one
//! global window or a causal sliding window.
//!
//! The estimate at normalized abscissa `t` refers to the physical point
//! `a + h t`; the `1/h^alpha` prefactor carries the window scaling. In global
//! mode the grid index `j` maps to `t = j/M`, skipping `j = 0` (the kernel's
//! domain is `(0, 1]` and the fractional kernel is singular as `t -> 0`). In
//! causal mode every window is evaluated at its right endpoint `t = 1`, so
//! each estimate uses only past samples; nothing is emitted for the first
//! `window_samples - 1` points.
//!
//! Sliding windows move the Riemann-Liouville lower terminal along with the
//! window start, so causal estimates approximate a moving-terminal
//! derivative rather than the fixed-terminal one.

use crate::error::{Error, Result};
use crate::kernel::{build_fractional_kernel, DiffOrder, KernelTable};
use crate::signals::SampledSignal;
use crate::specfun::JacobiParams;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Estimation window geometry plus the derivative order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowConfig {
    params: JacobiParams,
    order: DiffOrder,
    trunc: usize,
    start: f64,
    length: f64,
    t: f64,
}

impl WindowConfig {
    /// Validates `h > 0` and `0 < t <= 1`.
    pub fn new(
        params: JacobiParams,
        order: DiffOrder,
        trunc: usize,
        start: f64,
        length: f64,
        t: f64,
    ) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() || !start.is_finite() {
            return Err(Error::InvalidParam(format!(
                "window needs finite start and length h > 0, got a = {start}, h = {length}"
            )));
        }
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "normalized abscissa t must lie in (0, 1], got {t}"
            )));
        }
        Ok(Self {
            params,
            order,
            trunc,
            start,
            length,
            t,
        })
    }

    /// Jacobi family.
    pub fn params(&self) -> JacobiParams {
        self.params
    }

    /// Derivative order.
    pub fn order(&self) -> DiffOrder {
        self.order
    }

    /// Truncation order `N`.
    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Window start `a`.
    pub fn start(&self) -> f64 {
        self.start
    }

    /// Window length `h`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Normalized evaluation abscissa; the estimate refers to `a + h t`.
    pub fn t(&self) -> f64 {
        self.t
    }
}

/// How a series of estimates sweeps the signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// One window spanning the whole record, `t` varied over the grid.
    Global,
    /// Fixed-size window slid along the record, evaluated at `t = 1`.
    Causal {
        /// Samples per window.
        window_samples: usize,
    },
}

/// Derivative estimates over strictly increasing abscissae.
#[derive(Debug, Clone)]
pub struct EstimateSeries {
    abscissae: Vec<f64>,
    values: Vec<f64>,
    order: DiffOrder,
    mode: Mode,
}

impl EstimateSeries {
    /// Validates matching lengths and strictly increasing abscissae.
    pub fn new(
        abscissae: Vec<f64>,
        values: Vec<f64>,
        order: DiffOrder,
        mode: Mode,
    ) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::InvalidParam(format!(
                "{} abscissae vs {} values",
                abscissae.len(),
                values.len()
            )));
        }
        if abscissae.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParam(
                "abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            abscissae,
            values,
            order,
            mode,
        })
    }

    /// Physical evaluation points.
    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    /// Estimated derivative values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Derivative order of the estimates.
    pub fn order(&self) -> DiffOrder {
        self.order
    }

    /// Sweep mode that produced the series.
    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of estimates.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when no estimates were produced.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(PartialEq, Eq, Hash)]
struct KernelKey {
    mu: u64,
    kappa: u64,
    alpha: u64,
    trunc: usize,
    t: u64,
    m: usize,
}

impl KernelKey {
    fn new(params: JacobiParams, order: DiffOrder, trunc: usize, t: f64, m: usize) -> Self {
        Self {
            mu: params.mu().to_bits(),
            kappa: params.kappa().to_bits(),
            alpha: order.alpha().to_bits(),
            trunc,
            t: t.to_bits(),
            m,
        }
    }
}

/// Insert-or-reuse cache of kernel tables keyed by
/// `(mu, kappa, alpha, N, t, M)`.
///
/// Tables are built outside the lock; when two threads race on the same key
/// the first inserted table wins and the duplicate is dropped, so observable
/// state never depends on the schedule.
#[derive(Default)]
pub struct KernelCache {
    map: Mutex<HashMap<KernelKey, Arc<KernelTable>>>,
}

impl KernelCache {
    /// Empty cache.
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the cached table for the key, building it on first use.
    pub fn get_or_build(
        &self,
        params: JacobiParams,
        order: DiffOrder,
        trunc: usize,
        t: f64,
        m: usize,
    ) -> Result<Arc<KernelTable>> {
        let key = KernelKey::new(params, order, trunc, t, m);
        if let Some(hit) = self.map.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let table = Arc::new(build_fractional_kernel(params, order, trunc, t, m)?);
        let mut map = self.map.lock().expect("cache lock");
        Ok(map.entry(key).or_insert(table).clone())
    }

    /// Number of cached tables.
    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    /// True when nothing has been cached yet.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Locates `config`'s window on the signal grid: returns the first sample
/// index and the number of grid intervals.
fn window_indices(signal: &SampledSignal, start: f64, length: f64) -> Result<(usize, usize)> {
    let ts = signal.period();
    let rel = (start - signal.start()) / ts;
    let i0 = rel.round();
    if (rel - i0).abs() > 1e-6 || i0 < 0.0 {
        return Err(Error::WindowOutOfRange(format!(
            "window start {start} does not lie on the sample grid (offset {rel} periods)"
        )));
    }
    let span = length / ts;
    let m = span.round();
    if (span - m).abs() > 1e-6 || m < 1.0 {
        return Err(Error::WindowOutOfRange(format!(
            "window length {length} is not a whole number of sample periods ({span})"
        )));
    }
    let (i0, m) = (i0 as usize, m as usize);
    if i0 + m >= signal.len() {
        return Err(Error::WindowOutOfRange(format!(
            "window [{start}, {}] runs past the last sample {}",
            start + length,
            signal.x(signal.len() - 1)
        )));
    }
    Ok((i0, m))
}

fn apply_kernel(
    kernel: &KernelTable,
    signal: &SampledSignal,
    first: usize,
    length: f64,
) -> Result<f64> {
    let m = kernel.intervals();
    let window = &signal.values()[first..=first + m];
    let integral = kernel.apply(window)?;
    Ok(integral * length.powf(-kernel.order().alpha()))
}

/// One-off estimate of the `alpha`-order derivative at `a + h t`:
///
/// ```text
/// (1/h^alpha) sum_j quad_weights[j] Q(tau_j, t) y(a + h tau_j)
/// ```
///
/// The window `[a, a+h]` must land on the signal's sample grid.
pub fn estimate_at(signal: &SampledSignal, config: &WindowConfig) -> Result<f64> {
    let (first, m) = window_indices(signal, config.start(), config.length())?;
    let kernel =
        build_fractional_kernel(config.params(), config.order(), config.trunc(), config.t(), m)?;
    apply_kernel(&kernel, signal, first, config.length())
}

/// [`estimate_at`] with kernel reuse through a cache.
pub fn estimate_at_cached(
    cache: &KernelCache,
    signal: &SampledSignal,
    config: &WindowConfig,
) -> Result<f64> {
    let (first, m) = window_indices(signal, config.start(), config.length())?;
    let kernel = cache.get_or_build(config.params(), config.order(), config.trunc(), config.t(), m)?;
    apply_kernel(&kernel, signal, first, config.length())
}

/// Smoothed signal value at `a + h t`: the `alpha = 0` differentiator, i.e.
/// the truncated Jacobi series evaluated at `t`.
pub fn smooth_at(
    signal: &SampledSignal,
    params: JacobiParams,
    trunc: usize,
    start: f64,
    length: f64,
    t: f64,
) -> Result<f64> {
    let order = DiffOrder::new(0.0)?;
    let config = WindowConfig::new(params, order, trunc, start, length, t)?;
    estimate_at(signal, &config)
}

/// Estimates across the signal.
///
/// Global mode spans the whole record with one window and varies
/// `t = j/M` over `j = 1..=M`; causal mode slides a `window_samples`-sample
/// window and emits one endpoint estimate per window, starting at sample
/// `window_samples - 1`.
pub fn estimate_series(
    cache: &KernelCache,
    signal: &SampledSignal,
    params: JacobiParams,
    order: DiffOrder,
    trunc: usize,
    mode: Mode,
) -> Result<EstimateSeries> {
    match mode {
        Mode::Global => {
            let m = signal.len() - 1;
            if m < 1 {
                return Err(Error::WindowOutOfRange(
                    "global mode needs at least two samples".into(),
                ));
            }
            let h = signal.period() * m as f64;
            let inv_h_alpha = h.powf(-order.alpha());
            let mut abscissae = Vec::with_capacity(m);
            let mut values = Vec::with_capacity(m);
            for j in 1..=m {
                let t = j as f64 / m as f64;
                let kernel = cache.get_or_build(params, order, trunc, t, m)?;
                let v = kernel.apply(signal.values())? * inv_h_alpha;
                abscissae.push(signal.x(j));
                values.push(v);
            }
            EstimateSeries::new(abscissae, values, order, mode)
        }
        Mode::Causal { window_samples } => {
            if window_samples > signal.len() {
                return Err(Error::WindowOutOfRange(format!(
                    "window of {window_samples} samples exceeds the {}-sample signal",
                    signal.len()
                )));
            }
            if window_samples < 2 {
                return Err(Error::InvalidParam(
                    "causal windows need at least two samples".into(),
                ));
            }
            let m = window_samples - 1;
            let h = signal.period() * m as f64;
            let inv_h_alpha = h.powf(-order.alpha());
            let kernel = cache.get_or_build(params, order, trunc, 1.0, m)?;
            let mut abscissae = Vec::with_capacity(signal.len() - m);
            let mut values = Vec::with_capacity(signal.len() - m);
            for end in m..signal.len() {
                let window = &signal.values()[end - m..=end];
                values.push(kernel.apply(window)? * inv_h_alpha);
                abscissae.push(signal.x(end));
            }
            EstimateSeries::new(abscissae, values, order, mode)
        }
    }
}
