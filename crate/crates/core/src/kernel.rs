//! Convolution kernels for differentiation by integration.
//!
//! Two constructions are provided:
//!
//! * the fractional kernel `Q_{mu,kappa,alpha,N}(tau, t)`, assembled from the
//!   fractional derivatives `q_{mu,kappa,i}(t)` of the Jacobi basis, and
//! * the integer-order kernel `Q_{mu,kappa,n,N}(tau, t)`, assembled from the
//!   shifted-parameter family `P_i^{(mu+n, kappa+n)}`.
//!
//! A [`KernelTable`] pairs kernel samples on the uniform grid `tau_j = j/M`
//! with trapezoid weights, so applying the differentiator to a window of
//! samples is a single dot product. Tables are immutable after construction.

use crate::error::{Error, Result};
use crate::specfun::{
    gamma_unchecked, gen_binom, jacobi_eval, jacobi_norm_sq, recip_gamma, JacobiParams,
    MAX_DEGREE, POLE_TOL,
};

/// A differentiation order `alpha >= 0` together with the integer `l`
/// satisfying `l - 1 <= alpha < l`.
///
/// Orders within 1e-12 of an integer are snapped to it, so that values like
/// `0.5 + 0.5` arriving through arithmetic are treated as exact integers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffOrder {
    alpha: f64,
    l: u32,
}

impl DiffOrder {
    /// Validates `alpha >= 0` and derives `l`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < -POLE_TOL {
            return Err(Error::InvalidParam(format!(
                "derivative order alpha must be a finite number >= 0, got {alpha}"
            )));
        }
        let snapped = if (alpha - alpha.round()).abs() <= POLE_TOL {
            alpha.round() + 0.0 // normalizes -0.0 so cache keys agree
        } else {
            alpha
        };
        Ok(Self {
            alpha: snapped,
            l: snapped.floor() as u32 + 1,
        })
    }

    /// The order itself.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Smallest integer strictly above `alpha` (with `l - 1 <= alpha`).
    pub fn l(&self) -> u32 {
        self.l
    }

    /// True when the order is an exact integer (after snapping).
    pub fn is_integer(&self) -> bool {
        self.alpha == self.alpha.round()
    }

    /// True for the pure smoothing case `alpha = 0`.
    pub fn is_zero(&self) -> bool {
        self.alpha == 0.0
    }
}

/// Per-family table of the binomial products in the Jacobi sum, hoisted out
/// of the per-grid-point loops. `coeff[i][j] = C(i+mu, j) C(i+kappa, i-j)`.
pub(crate) struct JacobiBasis {
    trunc: usize,
    coeff: Vec<Vec<f64>>,
}

impl JacobiBasis {
    pub(crate) fn new(params: JacobiParams, trunc: usize) -> Self {
        debug_assert!(trunc <= MAX_DEGREE);
        let coeff = (0..=trunc)
            .map(|i| {
                (0..=i)
                    .map(|j| {
                        gen_binom(i as f64 + params.mu(), j)
                            * gen_binom(i as f64 + params.kappa(), i - j)
                    })
                    .collect()
            })
            .collect();
        Self { trunc, coeff }
    }

    /// Evaluates `P_0 .. P_trunc` at `t` into `out`. Runs once per grid
    /// point, so the power tables stay on the stack.
    pub(crate) fn eval_all(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.trunc + 1);
        let mut pow_tm1 = [1.0; MAX_DEGREE + 1];
        let mut pow_t = [1.0; MAX_DEGREE + 1];
        for d in 1..=self.trunc {
            pow_tm1[d] = pow_tm1[d - 1] * (t - 1.0);
            pow_t[d] = pow_t[d - 1] * t;
        }
        for i in 0..=self.trunc {
            let mut s = 0.0;
            for (j, c) in self.coeff[i].iter().enumerate() {
                s += c * pow_tm1[i - j] * pow_t[j];
            }
            out[i] = s;
        }
    }
}

/// Fractional derivative of the Jacobi polynomial `P_n^{(mu,kappa)}` at
/// `t in (0, 1]`:
///
/// ```text
/// sum_{j=0}^{n} sum_{l=0}^{n-j} c_{n,j,l} Gamma(n-l+1) / Gamma(n-l+1-alpha) t^{n-l-alpha}
/// c_{n,j,l} = (-1)^l C(n+mu, j) C(n+kappa, n-j) C(n-j, l)
/// ```
///
/// For `alpha = 0` this reduces to the polynomial itself and is evaluated in
/// the stable factored form instead of the expanded monomial sum (which loses
/// several digits at high degree).
pub fn frac_deriv_jacobi(
    params: JacobiParams,
    n: usize,
    order: DiffOrder,
    t: f64,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParam(format!(
            "fractional derivative target t must be > 0 (t^(n-l-alpha) is singular at 0), got {t}"
        )));
    }
    if order.is_zero() {
        return Ok(jacobi_eval(params, n, t));
    }
    let alpha = order.alpha();
    let nf = n as f64;
    let mut s = 0.0;
    for j in 0..=n {
        let b = gen_binom(nf + params.mu(), j) * gen_binom(nf + params.kappa(), n - j);
        let mut sign = 1.0;
        for l in 0..=(n - j) {
            let deg = (n - l) as f64;
            let rg = recip_gamma(deg + 1.0 - alpha);
            if rg != 0.0 {
                let c = sign * b * gen_binom((n - j) as f64, l);
                s += c * gamma_unchecked(deg + 1.0) * rg * t.powf(deg - alpha);
            }
            sign = -sign;
        }
    }
    Ok(s)
}

/// Discretized kernel on the uniform grid `tau_j = j/M`, paired with its
/// trapezoid quadrature weights (`1/M` interior, `1/(2M)` at the ends).
#[derive(Debug, Clone)]
pub struct KernelTable {
    params: JacobiParams,
    order: DiffOrder,
    trunc: usize,
    t: f64,
    grid: Vec<f64>,
    values: Vec<f64>,
    quad_weights: Vec<f64>,
}

impl KernelTable {
    fn assemble(
        params: JacobiParams,
        order: DiffOrder,
        trunc: usize,
        t: f64,
        values: Vec<f64>,
        m: usize,
    ) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteKernel);
        }
        let grid = (0..=m).map(|j| j as f64 / m as f64).collect();
        let mut quad_weights = vec![1.0 / m as f64; m + 1];
        quad_weights[0] = 0.5 / m as f64;
        quad_weights[m] = 0.5 / m as f64;
        Ok(Self {
            params,
            order,
            trunc,
            t,
            grid,
            values,
            quad_weights,
        })
    }

    /// Quadrature of the kernel against a window of samples (no `1/h^alpha`
    /// prefactor; the differentiator applies it).
    pub fn apply(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.values.len() {
            return Err(Error::SampleMismatch(format!(
                "kernel grid has {} nodes but window has {} samples",
                self.values.len(),
                samples.len()
            )));
        }
        let mut s = 0.0;
        for ((w, v), y) in self.quad_weights.iter().zip(&self.values).zip(samples) {
            s += w * v * y;
        }
        Ok(s)
    }

    /// Jacobi family of the kernel.
    pub fn params(&self) -> JacobiParams {
        self.params
    }

    /// Differentiation order.
    pub fn order(&self) -> DiffOrder {
        self.order
    }

    /// Truncation order `N`.
    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Normalized evaluation abscissa.
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Grid nodes `tau_j = j/M`.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Kernel samples `Q(tau_j, t)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Trapezoid weights.
    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// Number of grid intervals `M`.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }
}

fn check_common(params: JacobiParams, trunc: usize, m: usize) -> Result<()> {
    if params.mu() < 0.0 || params.kappa() < 0.0 {
        return Err(Error::InvalidParam(format!(
            "kernel construction needs mu >= 0 and kappa >= 0 (trapezoid quadrature is invalid \
             for a weight singular at an endpoint), got mu = {}, kappa = {}",
            params.mu(),
            params.kappa()
        )));
    }
    if trunc > MAX_DEGREE {
        return Err(Error::InvalidParam(format!(
            "truncation order {trunc} exceeds the supported maximum {MAX_DEGREE}"
        )));
    }
    if m < trunc.max(1) {
        return Err(Error::InvalidParam(format!(
            "grid needs at least as many intervals as the fitted degree: M = {m} < N = {trunc}"
        )));
    }
    Ok(())
}

/// Builds the fractional kernel
///
/// ```text
/// Q(tau_j, t) = sum_{i=0}^{N} w(tau_j) P_i(tau_j) / ||P_i||^2 * q_i(t)
/// ```
///
/// with `q_i(t)` from [`frac_deriv_jacobi`]. Requires `t in (0, 1]` and a
/// weight bounded on `[0, 1]` (`mu, kappa >= 0`).
pub fn build_fractional_kernel(
    params: JacobiParams,
    order: DiffOrder,
    trunc: usize,
    t: f64,
    m: usize,
) -> Result<KernelTable> {
    check_common(params, trunc, m)?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "evaluation abscissa t must lie in (0, 1], got {t}"
        )));
    }
    let mut q = Vec::with_capacity(trunc + 1);
    for i in 0..=trunc {
        q.push(frac_deriv_jacobi(params, i, order, t)? / jacobi_norm_sq(params, i));
    }
    let basis = JacobiBasis::new(params, trunc);
    let mut p = vec![0.0; trunc + 1];
    let mut values = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let tau = j as f64 / m as f64;
        basis.eval_all(tau, &mut p);
        let mut s = 0.0;
        for i in 0..=trunc {
            s += p[i] * q[i];
        }
        values.push(params.weight(tau) * s);
    }
    KernelTable::assemble(params, order, trunc, t, values, m)
}

/// Builds the integer-order kernel
///
/// ```text
/// Q(tau_j, t) = w(tau_j) sum_{i=0}^{N-n} C_{mu,kappa,n,i} P_i^{(mu+n,kappa+n)}(t) P_{n+i}^{(mu,kappa)}(tau_j)
/// C_{mu,kappa,n,i} = (mu+kappa+2n+2i+1) Gamma(mu+kappa+2n+i+1) Gamma(n+i+1)
///                    / (Gamma(kappa+n+i+1) Gamma(mu+n+i+1))
/// ```
///
/// Here `t` may be any point of `[0, 1]`.
pub fn build_integer_kernel(
    params: JacobiParams,
    n: usize,
    trunc: usize,
    t: f64,
    m: usize,
) -> Result<KernelTable> {
    check_common(params, trunc, m)?;
    if trunc < n {
        return Err(Error::InvalidParam(format!(
            "truncation order N = {trunc} must be at least the derivative order n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParam(format!(
            "evaluation abscissa t must lie in [0, 1], got {t}"
        )));
    }
    let (mu, kappa) = (params.mu(), params.kappa());
    let nf = n as f64;
    let shifted = JacobiParams::new(mu + nf, kappa + nf)?;
    // Per-mode factor C_i * P_i^{(mu+n, kappa+n)}(t).
    let mut factor = Vec::with_capacity(trunc - n + 1);
    for i in 0..=(trunc - n) {
        let fi = i as f64;
        let c = (mu + kappa + 2.0 * nf + 2.0 * fi + 1.0)
            * gamma_unchecked(mu + kappa + 2.0 * nf + fi + 1.0)
            * gamma_unchecked(nf + fi + 1.0)
            * recip_gamma(kappa + nf + fi + 1.0)
            * recip_gamma(mu + nf + fi + 1.0);
        factor.push(c * jacobi_eval(shifted, i, t));
    }
    let basis = JacobiBasis::new(params, trunc);
    let mut p = vec![0.0; trunc + 1];
    let mut values = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let tau = j as f64 / m as f64;
        basis.eval_all(tau, &mut p);
        let mut s = 0.0;
        for i in 0..=(trunc - n) {
            s += factor[i] * p[n + i];
        }
        values.push(params.weight(tau) * s);
    }
    let order = DiffOrder::new(nf)?;
    KernelTable::assemble(params, order, trunc, t, values, m)
}
