//! Independent Riemann-Liouville ground truth (lower terminal 0).
//!
//! Two routes are provided and cross-checked against each other:
//!
//! * closed forms for monomials / polynomials and a termwise Maclaurin series
//!   for `sin(omega x)`, and
//! * a quadrature of the defining integral in Caputo form, with the
//!   substitution `x - tau = u^{1/(l-alpha)}` removing the endpoint
//!   singularity before applying the trapezoid rule.
//!
//! Agreement of the two routes is what certifies the frozen benchmark
//! fixture; neither shares code with the estimator's kernel path.

use crate::error::{Error, Result};
use crate::kernel::DiffOrder;
use crate::specfun::{gamma_unchecked, recip_gamma};
use std::fmt::Write as _;
use std::path::Path;

/// `d^alpha/dx^alpha x^n = Gamma(n+1) / Gamma(n+1-alpha) x^{n-alpha}` for
/// `x > 0`; zero when integer `alpha > n` annihilates the monomial.
pub fn rl_monomial(n: usize, order: DiffOrder, x: f64) -> Result<f64> {
    rl_power(n as f64, order, x)
}

/// The monomial rule extended to real exponents `p > -1`.
///
/// The Gamma-ratio formula extends verbatim; the extension is used for
/// internal consistency checks (composing half-derivatives).
pub fn rl_power(p: f64, order: DiffOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParam(format!(
            "Riemann-Liouville oracle needs x > 0, got {x}"
        )));
    }
    if !(p > -1.0) {
        return Err(Error::InvalidParam(format!(
            "exponent must exceed -1 for an integrable power, got {p}"
        )));
    }
    let rg = recip_gamma(p + 1.0 - order.alpha());
    if rg == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma_unchecked(p + 1.0) * rg * x.powf(p - order.alpha()))
}

/// Termwise derivative of `sum_k coeffs[k] x^k`.
pub fn rl_polynomial(coeffs: &[f64], order: DiffOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParam(format!(
            "Riemann-Liouville oracle needs x > 0, got {x}"
        )));
    }
    let mut s = 0.0;
    for (k, &c) in coeffs.iter().enumerate() {
        if c != 0.0 {
            s += c * rl_monomial(k, order, x)?;
        }
    }
    Ok(s)
}

/// Termwise fractional derivative of the Maclaurin series of `sin(omega x)`:
///
/// ```text
/// sum_{k=0}^{terms} (-1)^k omega^{2k+1} d^alpha[x^{2k+1}] / (2k+1)!
/// ```
///
/// Since `Gamma(2k+2) / (2k+1)! = 1`, each term reduces to
/// `(-1)^k (omega x)^{2k+1} x^{-alpha} / Gamma(2k+2-alpha)`, which is how the
/// sum is accumulated (this also avoids overflowing Gamma at large k).
///
/// `terms` must satisfy the tail bound: the first omitted series term must be
/// below `1e-16` of the largest retained one. Accuracy is cancellation
/// limited, about `1e-7` absolute at `omega x = 20`.
pub fn rl_series_sin(omega: f64, order: DiffOrder, x: f64, terms: usize) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParam(format!(
            "Riemann-Liouville oracle needs x > 0, got {x}"
        )));
    }
    let z = omega * x;
    // Tail bound on the plain sine series |z|^{2k+1} / (2k+1)!.
    let z2 = z * z;
    let mut mag = z.abs();
    let mut max_mag = mag;
    for k in 0..terms {
        mag *= z2 / ((2 * k + 2) as f64 * (2 * k + 3) as f64);
        max_mag = max_mag.max(mag);
    }
    let omitted = mag * z2 / ((2 * terms + 2) as f64 * (2 * terms + 3) as f64);
    if !(omitted < 1e-16 * max_mag) {
        return Err(Error::InsufficientTerms(format!(
            "{terms} terms leave a tail of {:.3e} x max term for omega*x = {z}",
            omitted / max_mag
        )));
    }
    let alpha = order.alpha();
    let mut s = 0.0;
    let mut zpow = z; // z^{2k+1}
    let mut sign = 1.0;
    for k in 0..=terms {
        let rg = recip_gamma(2.0 * k as f64 + 2.0 - alpha);
        s += sign * zpow * rg;
        zpow *= z2;
        sign = -sign;
    }
    Ok(s * x.powf(-alpha))
}

/// Riemann-Liouville derivative through the Caputo rearrangement:
///
/// ```text
/// sum_{k=0}^{l-1} f^{(k)}(0) / Gamma(k+1-alpha) x^{k-alpha}
///   + 1/Gamma(l-alpha) int_0^x (x-tau)^{l-alpha-1} f^{(l)}(tau) dtau
/// ```
///
/// The integral is computed after substituting `x - tau = u^{1/(l-alpha)}`,
/// which renders the integrand bounded, then applying the trapezoid rule
/// over `panels` panels. `derivs_at_0` must hold `f^{(k)}(0)` for
/// `k = 0 .. l-1`.
pub fn rl_caputo_quad(
    f_deriv_l: impl Fn(f64) -> f64,
    derivs_at_0: &[f64],
    order: DiffOrder,
    x: f64,
    panels: usize,
) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParam(format!(
            "Riemann-Liouville oracle needs x > 0, got {x}"
        )));
    }
    if panels < 16 {
        return Err(Error::InvalidParam(format!(
            "at least 16 quadrature panels required, got {panels}"
        )));
    }
    let l = order.l() as usize;
    if derivs_at_0.len() != l {
        return Err(Error::InvalidParam(format!(
            "derivs_at_0 must hold f^(k)(0) for k = 0..{} (l = {l}), got {} entries",
            l - 1,
            derivs_at_0.len()
        )));
    }
    let alpha = order.alpha();
    let mut s = 0.0;
    for (k, &d) in derivs_at_0.iter().enumerate() {
        let rg = recip_gamma(k as f64 + 1.0 - alpha);
        if rg != 0.0 && d != 0.0 {
            s += d * rg * x.powf(k as f64 - alpha);
        }
    }
    let p = l as f64 - alpha; // in (0, 1]
    let upper = x.powf(p);
    let h = upper / panels as f64;
    let inv_p = 1.0 / p;
    let mut acc = 0.5 * (f_deriv_l(x) + f_deriv_l(0.0));
    for j in 1..panels {
        let u = j as f64 * h;
        let tau = (x - u.powf(inv_p)).max(0.0);
        acc += f_deriv_l(tau);
    }
    let integral = acc * h / p;
    Ok(s + integral * recip_gamma(l as f64 - alpha))
}

/// One row of the ground-truth fixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureRow {
    /// Evaluation abscissa.
    pub x: f64,
    /// Derivative order.
    pub alpha: f64,
    /// Oracle value of `d^alpha sin(omega x)`.
    pub truth: f64,
}

/// Dual-oracle fixture for `d^alpha sin(omega x)` on the grid
/// `x_i = (b/m) i`, `i = 1..=m` (the terminal sits at `x = 0`, so the
/// interval must start there; `x = 0` itself is excluded).
///
/// Truth values come from the series route; every `check_stride`-th point is
/// re-derived through [`rl_caputo_quad`] and the call aborts if the two
/// routes disagree by more than `tol`.
#[allow(clippy::too_many_arguments)]
pub fn sin_fixture(
    omega: f64,
    alphas: &[f64],
    a: f64,
    b: f64,
    m: usize,
    check_stride: usize,
    panels: usize,
    tol: f64,
) -> Result<Vec<FixtureRow>> {
    if a != 0.0 {
        return Err(Error::InvalidParam(format!(
            "the fixture's Riemann-Liouville terminal is 0, so the interval must start at 0 \
             (got a = {a})"
        )));
    }
    if !(b > 0.0) || m == 0 {
        return Err(Error::InvalidParam(format!(
            "need b > 0 and m >= 1, got b = {b}, m = {m}"
        )));
    }
    let stride = check_stride.max(1);
    let terms = (omega.abs() * b * 1.5) as usize + 60;
    let ts = b / m as f64;
    let mut rows = Vec::with_capacity(alphas.len() * m);
    for &alpha in alphas {
        let order = DiffOrder::new(alpha)?;
        let l = order.l() as usize;
        // f^(l)(tau) = omega^l sin(omega tau + l pi/2) and the Maclaurin
        // derivatives at 0.
        let phase = l as f64 * std::f64::consts::FRAC_PI_2;
        let omega_l = omega.powi(l as i32);
        let f_l = move |tau: f64| omega_l * (omega * tau + phase).sin();
        let derivs: Vec<f64> = (0..l)
            .map(|k| omega.powi(k as i32) * (k as f64 * std::f64::consts::FRAC_PI_2).sin())
            .collect();
        for i in 1..=m {
            let x = ts * i as f64;
            let truth = rl_series_sin(omega, order, x, terms)?;
            if i % stride == 0 {
                let quad = rl_caputo_quad(f_l, &derivs, order, x, panels)?;
                if (truth - quad).abs() > tol {
                    return Err(Error::OracleDisagreement {
                        x,
                        alpha,
                        series: truth,
                        quad,
                        tol,
                    });
                }
            }
            rows.push(FixtureRow { x, alpha, truth });
        }
    }
    Ok(rows)
}

/// Writes fixture rows as `x,alpha,truth` CSV.
pub fn write_fixture_csv(rows: &[FixtureRow], path: &Path) -> Result<()> {
    let mut out = String::from("x,alpha,truth\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.x, r.alpha, r.truth).expect("string write");
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a fixture CSV written by [`write_fixture_csv`].
pub fn read_fixture_csv(path: &Path) -> Result<Vec<FixtureRow>> {
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if idx == 0 {
            if trimmed != "x,alpha,truth" {
                return Err(Error::DataFormat {
                    path: name.clone(),
                    line: lineno,
                    msg: format!("expected header 'x,alpha,truth', got '{trimmed}'"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::DataFormat {
                path: name.clone(),
                line: lineno,
                msg: format!("expected 3 comma-separated values, got {}", fields.len()),
            });
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| Error::DataFormat {
                path: name.clone(),
                line: lineno,
                msg: format!("cannot parse {what} '{s}' as a number"),
            })
        };
        rows.push(FixtureRow {
            x: parse(fields[0], "x")?,
            alpha: parse(fields[1], "alpha")?,
            truth: parse(fields[2], "truth")?,
        });
    }
    if rows.is_empty() {
        return Err(Error::DataFormat {
            path: name,
            line: 1,
            msg: "fixture holds no rows".into(),
        });
    }
    Ok(rows)
}
