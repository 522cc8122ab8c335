//! Test-signal sampling, seeded Gaussian noise, SNR measurement/calibration,
//! and the signal CSV format (`x,value[,noise]`).

use crate::error::{Error, Result};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::fmt::Write as _;
use std::path::Path;

/// Uniformly sampled (possibly noisy) signal: `x_i = a + T_s i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    start: f64,
    period: f64,
    values: Vec<f64>,
    noise: Option<Vec<f64>>,
}

impl SampledSignal {
    /// Validates the fields: positive period, non-empty finite values, and a
    /// matching noise record when present.
    pub fn new(
        start: f64,
        period: f64,
        values: Vec<f64>,
        noise: Option<Vec<f64>>,
    ) -> Result<Self> {
        if !start.is_finite() || !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidParam(format!(
                "signal needs finite start and period > 0, got start = {start}, period = {period}"
            )));
        }
        if values.is_empty() {
            return Err(Error::InvalidParam("signal has no samples".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParam("signal contains non-finite samples".into()));
        }
        if let Some(n) = &noise {
            if n.len() != values.len() {
                return Err(Error::InvalidParam(format!(
                    "noise record length {} does not match {} samples",
                    n.len(),
                    values.len()
                )));
            }
        }
        Ok(Self {
            start,
            period,
            values,
            noise,
        })
    }

    /// Samples `f` at `x_i = a + (b-a)/m * i` for `i = 0..=m`.
    pub fn sample(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> Result<Self> {
        if !(b > a) {
            return Err(Error::InvalidParam(format!(
                "need b > a, got interval [{a}, {b}]"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidParam("need at least one sample interval".into()));
        }
        let period = (b - a) / m as f64;
        let values = (0..=m).map(|i| f(a + period * i as f64)).collect();
        Self::new(a, period, values, None)
    }

    /// Abscissa of sample `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.start + self.period * i as f64
    }

    /// Window start `a`.
    pub fn start(&self) -> f64 {
        self.start
    }

    /// Sample period `T_s`.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Number of samples (`M + 1`).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when the signal is empty (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The sampled (noisy, if noise was injected) values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The injected noise `c w(x_i)`, when this signal is synthetic.
    pub fn noise(&self) -> Option<&[f64]> {
        self.noise.as_deref()
    }

    /// Returns a copy with `c w_i` added, where `w_i` are standard normal
    /// draws from a ChaCha12 stream keyed by `seed` (SplitMix64-expanded)
    /// and turned Gaussian by the Box-Muller transform through `libm`, so
    /// the same seed gives bit-identical output on every platform. The noise
    /// record accumulates across calls.
    pub fn add_noise(&self, c: f64, seed: u64) -> SampledSignal {
        let draws = standard_normal(self.values.len(), seed);
        let mut out = self.clone();
        let mut noise = out.noise.unwrap_or_else(|| vec![0.0; out.values.len()]);
        for ((v, n), d) in out.values.iter_mut().zip(noise.iter_mut()).zip(&draws) {
            let w = c * d;
            *v += w;
            *n += w;
        }
        out.noise = Some(noise);
        out
    }

    /// Signal-to-noise ratio in dB with the noisy signal in the numerator:
    /// `10 log10( sum |y^d(x_i)|^2 / sum |c w(x_i)|^2 )`.
    pub fn snr_db(&self) -> Result<f64> {
        let noise = self.noise.as_ref().ok_or(Error::MissingNoise)?;
        let noise_energy: f64 = noise.iter().map(|w| w * w).sum();
        if noise_energy == 0.0 {
            return Err(Error::MissingNoise);
        }
        let signal_energy: f64 = self.values.iter().map(|v| v * v).sum();
        Ok(10.0 * (signal_energy / noise_energy).log10())
    }
}

const U53: f64 = 1.0 / 9007199254740992.0; // 2^-53

/// Deterministic standard normal draws: ChaCha12 keyed from `seed`, pairs of
/// uniforms mapped by Box-Muller. Transcendentals go through `libm` to keep
/// the stream identical across platforms.
fn standard_normal(n: usize, seed: u64) -> Vec<f64> {
    // SplitMix64 expansion of the seed into the 32-byte ChaCha key.
    let mut key = [0u8; 32];
    let mut state = seed;
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    let mut rng = ChaCha12Rng::from_seed(key);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = ((rng.next_u64() >> 11) + 1) as f64 * U53;
        let u2 = (rng.next_u64() >> 11) as f64 * U53;
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = std::f64::consts::TAU * u2;
        out.push(r * libm::cos(theta));
        if out.len() < n {
            out.push(r * libm::sin(theta));
        }
    }
    out
}

/// Solves for the amplitude `c` that puts `add_noise(clean, c, seed)` at the
/// requested SNR. With the draw fixed, the SNR is monotone in `c` over the
/// useful range and the solve is closed-form:
/// `c^2 W (R - 1) - 2 c X - Y = 0` with `Y = sum y^2`, `X = sum y w`,
/// `W = sum w^2`, `R = 10^{target/10}`.
pub fn calibrate_c(clean: &SampledSignal, target_snr_db: f64, seed: u64) -> Result<f64> {
    let w = standard_normal(clean.len(), seed);
    let y = clean.values();
    let yy: f64 = y.iter().map(|v| v * v).sum();
    let yw: f64 = y.iter().zip(&w).map(|(a, b)| a * b).sum();
    let ww: f64 = w.iter().map(|v| v * v).sum();
    if yy == 0.0 {
        return Err(Error::UnattainableTarget(
            "clean signal is identically zero".into(),
        ));
    }
    let ratio = 10f64.powf(target_snr_db / 10.0);
    let a = ww * (ratio - 1.0);
    let disc = yw * yw + a * yy;
    if disc < 0.0 || a == 0.0 {
        return Err(Error::UnattainableTarget(format!(
            "no noise amplitude reaches {target_snr_db} dB for this draw"
        )));
    }
    let mut candidates = [(yw + disc.sqrt()) / a, (yw - disc.sqrt()) / a];
    candidates.sort_by(f64::total_cmp);
    for c in candidates {
        if !(c > 0.0) || !c.is_finite() {
            continue;
        }
        // Round-trip guard: the solve must land within 0.1 dB.
        let achieved = clean.add_noise(c, seed).snr_db()?;
        if (achieved - target_snr_db).abs() <= 0.1 {
            return Ok(c);
        }
    }
    Err(Error::UnattainableTarget(format!(
        "no positive amplitude reaches {target_snr_db} dB for this draw"
    )))
}

/// Writes `x,value[,noise]` CSV (decimal point, LF endings; floats printed in
/// shortest round-trip form).
pub fn write_signal_csv(signal: &SampledSignal, path: &Path) -> Result<()> {
    let mut out = String::new();
    match signal.noise() {
        Some(noise) => {
            out.push_str("x,value,noise\n");
            for (i, (v, n)) in signal.values().iter().zip(noise).enumerate() {
                writeln!(out, "{},{v},{n}", signal.x(i)).expect("string write");
            }
        }
        None => {
            out.push_str("x,value\n");
            for i in 0..signal.len() {
                writeln!(out, "{},{}", signal.x(i), signal.values()[i]).expect("string write");
            }
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a signal CSV, deriving the start and period from the `x` column and
/// rejecting non-uniform grids.
pub fn read_signal_csv(path: &Path) -> Result<SampledSignal> {
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    let fail = |line: usize, msg: String| Error::DataFormat {
        path: name.clone(),
        line,
        msg,
    };
    let mut has_noise = false;
    let mut xs: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut noise: Vec<f64> = Vec::new();
    let mut saw_header = false;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !saw_header {
            has_noise = match trimmed {
                "x,value" => false,
                "x,value,noise" => true,
                other => {
                    return Err(fail(
                        lineno,
                        format!("expected header 'x,value' or 'x,value,noise', got '{other}'"),
                    ))
                }
            };
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        let expect = if has_noise { 3 } else { 2 };
        if fields.len() != expect {
            return Err(fail(
                lineno,
                format!("expected {expect} comma-separated values, got {}", fields.len()),
            ));
        }
        let mut parsed = [0.0f64; 3];
        for (k, f) in fields.iter().enumerate() {
            parsed[k] = f.trim().parse::<f64>().map_err(|_| {
                fail(lineno, format!("cannot parse '{}' as a number", f.trim()))
            })?;
        }
        xs.push(parsed[0]);
        values.push(parsed[1]);
        if has_noise {
            noise.push(parsed[2]);
        }
    }
    if xs.len() < 2 {
        return Err(fail(1, "signal needs at least two samples".into()));
    }
    let start = xs[0];
    let period = (xs[xs.len() - 1] - start) / (xs.len() - 1) as f64;
    if !(period > 0.0) {
        return Err(fail(1, "x column must be strictly increasing".into()));
    }
    for (i, &x) in xs.iter().enumerate() {
        let expected = start + period * i as f64;
        if (x - expected).abs() > 1e-9 * (1.0 + x.abs()) {
            return Err(fail(
                i + 2,
                format!("non-uniform sample spacing: x = {x}, expected {expected}"),
            ));
        }
    }
    SampledSignal::new(start, period, values, if has_noise { Some(noise) } else { None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sample_basic_cases() {
        let s = SampledSignal::sample(|_| 2.0, 0.0, 1.0, 2).unwrap();
        assert_eq!(s.values(), &[2.0, 2.0, 2.0]);
        assert_eq!(s.period(), 0.5);
        let s = SampledSignal::sample(|x| x, 1.0, 3.0, 2).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        assert!(SampledSignal::sample(|x| x, 1.0, 1.0, 2).is_err());
        assert!(SampledSignal::sample(|x| x, 2.0, 1.0, 2).is_err());
    }

    #[test]
    fn noise_is_deterministic_and_zero_safe() {
        let clean = SampledSignal::sample(|x| (5.0 * x).sin(), 0.0, 4.0, 200).unwrap();
        let a = clean.add_noise(0.25, 7);
        let b = clean.add_noise(0.25, 7);
        assert_eq!(a, b);
        let c = clean.add_noise(0.25, 8);
        assert_ne!(a, c);
        let z = clean.add_noise(0.0, 7);
        assert_eq!(z.values(), clean.values());
        assert!(z.noise().unwrap().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn noise_moments_are_sane() {
        let draws = standard_normal(1000, 42);
        let mean: f64 = draws.iter().sum::<f64>() / 1000.0;
        let var: f64 = draws.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / 1000.0;
        assert!(mean.abs() < 4.0 / (1000f64).sqrt(), "mean {mean}");
        assert!((0.8..1.2).contains(&var), "variance {var}");
    }

    #[test]
    fn snr_uses_noisy_signal_energy() {
        // y^d = 1.5 everywhere, noise = 0.5: 10 log10(9/1).
        let sig = SampledSignal::new(
            0.0,
            1.0,
            vec![1.5; 4],
            Some(vec![0.5; 4]),
        )
        .unwrap();
        assert_relative_eq!(sig.snr_db().unwrap(), 10.0 * 9f64.log10(), max_relative = 1e-13);
        // noise equal to the values: 0 dB.
        let sig = SampledSignal::new(0.0, 1.0, vec![1.5; 4], Some(vec![1.5; 4])).unwrap();
        assert_relative_eq!(sig.snr_db().unwrap(), 0.0, epsilon = 1e-13);
        // missing or zero noise is an error.
        let sig = SampledSignal::new(0.0, 1.0, vec![1.5; 4], None).unwrap();
        assert!(matches!(sig.snr_db(), Err(Error::MissingNoise)));
        let sig = SampledSignal::new(0.0, 1.0, vec![1.5; 4], Some(vec![0.0; 4])).unwrap();
        assert!(matches!(sig.snr_db(), Err(Error::MissingNoise)));
    }

    #[test]
    fn snr_decreases_in_c() {
        let clean = SampledSignal::sample(|x| (5.0 * x).sin(), 0.0, 4.0, 500).unwrap();
        let mut last = f64::INFINITY;
        for c in [0.05, 0.1, 0.25, 0.5, 1.0] {
            let snr = clean.add_noise(c, 3).snr_db().unwrap();
            assert!(snr < last, "c = {c}: {snr} !< {last}");
            last = snr;
        }
    }

    #[test]
    fn calibration_round_trip() {
        let clean = SampledSignal::sample(|x| (5.0 * x).sin(), 0.0, 4.0, 1000).unwrap();
        let measured = clean.add_noise(0.25, 11).snr_db().unwrap();
        let c = calibrate_c(&clean, measured, 11).unwrap();
        assert!((c - 0.25).abs() / 0.25 < 0.01, "recovered c = {c}");
        // A 10 dB target lands near c = 0.25 for this signal.
        let c10 = calibrate_c(&clean, 10.0, 11).unwrap();
        assert!((c10 - 0.25).abs() / 0.25 < 0.10, "c for 10 dB = {c10}");
        assert_relative_eq!(
            clean.add_noise(c10, 11).snr_db().unwrap(),
            10.0,
            epsilon = 1e-6
        );
        // Enormous target drives c toward 0.
        let tiny = calibrate_c(&clean, 140.0, 11).unwrap();
        assert!(tiny < 1e-6, "c = {tiny}");
        let zero = SampledSignal::new(0.0, 1.0, vec![0.0; 8], None).unwrap();
        assert!(calibrate_c(&zero, 10.0, 1).is_err());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let clean = SampledSignal::sample(|x| (5.0 * x).sin(), 0.0, 4.0, 99).unwrap();
        let noisy = clean.add_noise(0.25, 5);
        let path = dir.path().join("sig.csv");
        write_signal_csv(&noisy, &path).unwrap();
        let back = read_signal_csv(&path).unwrap();
        assert_eq!(noisy.len(), back.len());
        for i in 0..noisy.len() {
            assert_eq!(noisy.values()[i].to_bits(), back.values()[i].to_bits());
            assert_eq!(
                noisy.noise().unwrap()[i].to_bits(),
                back.noise().unwrap()[i].to_bits()
            );
        }
    }

    #[test]
    fn csv_reader_reports_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x,value\n0,1\n0.5,oops\n1,3\n").unwrap();
        match read_signal_csv(&path) {
            Err(Error::DataFormat { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected DataFormat error, got {other:?}"),
        }
        std::fs::write(&path, "x,value\n0,1\n0.7,2\n1,3\n").unwrap();
        assert!(matches!(
            read_signal_csv(&path),
            Err(Error::DataFormat { .. })
        ));
    }
}
