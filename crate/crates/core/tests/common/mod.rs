//! Shared test oracles, independent of the library's own evaluation paths.

use fracjac::JacobiParams;

/// Nodes and weights of a tanh-sinh rule on (0, 1), accurate far beyond the
/// tolerances used anywhere in the suite and comfortable with endpoint
/// singularities like t^{-1/2}.
pub fn tanh_sinh_nodes(level: u32) -> Vec<(f64, f64)> {
    let h = 0.5f64.powi(level as i32);
    let kmax = (4.0 / h) as i64;
    let mut nodes = Vec::new();
    for k in -kmax..=kmax {
        let u = k as f64 * h;
        let s = u.sinh();
        let c = (0.5 * std::f64::consts::PI * s).cosh();
        let w = 0.5 * std::f64::consts::PI * u.cosh() / (c * c) * h * 0.5;
        let x = 0.5 * (1.0 + (0.5 * std::f64::consts::PI * s).tanh());
        if x > 0.0 && x < 1.0 && w.is_finite() && w > 1e-300 {
            nodes.push((x, w));
        }
    }
    nodes
}

/// Jacobi polynomial evaluator with the binomial products hoisted, so the
/// orthogonality sweep stays fast. Follows the same explicit sum as the
/// library but shares no code with it beyond `gen_binom`.
pub struct PolyTable {
    coeff: Vec<Vec<f64>>,
}

impl PolyTable {
    pub fn new(params: JacobiParams, max_degree: usize) -> Self {
        let coeff = (0..=max_degree)
            .map(|n| {
                (0..=n)
                    .map(|j| {
                        fracjac::gen_binom(n as f64 + params.mu(), j)
                            * fracjac::gen_binom(n as f64 + params.kappa(), n - j)
                    })
                    .collect()
            })
            .collect();
        Self { coeff }
    }

    pub fn eval(&self, n: usize, t: f64) -> f64 {
        let mut s = 0.0;
        let mut pow_tm1 = 1.0;
        // Accumulate from j = n down so (t-1)^{n-j} grows incrementally.
        for j in (0..=n).rev() {
            s += self.coeff[n][j] * pow_tm1 * t.powi(j as i32);
            pow_tm1 *= t - 1.0;
        }
        s
    }
}

/// Weighted inner product of two basis polynomials by tanh-sinh quadrature.
pub fn weighted_inner(
    params: JacobiParams,
    table: &PolyTable,
    m: usize,
    n: usize,
    nodes: &[(f64, f64)],
) -> f64 {
    nodes
        .iter()
        .map(|&(x, w)| w * params.weight(x) * table.eval(m, x) * table.eval(n, x))
        .sum()
}

/// Path of the committed ground-truth fixture.
pub fn fixture_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/rl_sin5_truth.csv")
}
