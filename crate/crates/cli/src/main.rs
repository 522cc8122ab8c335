//! Command-line front end: differentiate signal files, generate test
//! signals, emit oracle fixtures, dump kernels, and run the benchmark.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracjac::{
    build_fractional_kernel, calibrate_c, estimate_series, read_fixture_csv, read_signal_csv,
    rl_caputo_quad, rl_monomial, run_benchmark, sin_fixture, write_fixture_csv, write_report_csv,
    write_signal_csv, BenchmarkSpec, DiffOrder, EstimateSeries, FixtureRow, JacobiParams,
    KernelCache, Method, Mode, NoiseSpec, SampledSignal,
};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "fracjac",
    about = "Fractional-order differentiation of noisy sampled signals",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a fractional derivative of a signal CSV (header `x,value[,noise]`).
    Differentiate(DifferentiateArgs),
    /// Sample a test signal, optionally with seeded Gaussian noise.
    Generate(GenerateArgs),
    /// Write Riemann-Liouville ground truth (`x,alpha,truth`), dual-oracle checked.
    Oracle(OracleArgs),
    /// Dump a fractional kernel table as `tau,value`.
    Kernel(KernelArgs),
    /// Run the full comparison experiment and write reports.
    Benchmark(BenchmarkArgs),
}

#[derive(Args)]
struct DifferentiateArgs {
    /// Input signal CSV.
    #[arg(long)]
    input: PathBuf,
    /// Output CSV of `x,estimate` rows.
    #[arg(long)]
    output: PathBuf,
    /// Derivative order.
    #[arg(long)]
    alpha: f64,
    /// Jacobi weight exponent mu.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Jacobi weight exponent kappa.
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    /// Truncation order N.
    #[arg(long = "order-n", default_value_t = 14)]
    order_n: usize,
    /// Estimation sweep.
    #[arg(long, value_enum, default_value_t = CliMode::Global)]
    mode: CliMode,
    /// Window size in samples (causal mode only).
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Global,
    Causal,
}

#[derive(Args)]
struct GenerateArgs {
    /// Signal kind.
    #[arg(long, value_enum, default_value_t = SignalKind::Sin)]
    signal: SignalKind,
    /// Frequency for `sin(omega x)`.
    #[arg(long, default_value_t = 5.0)]
    omega: f64,
    /// Polynomial coefficients (ascending), for `--signal poly`.
    #[arg(long, value_delimiter = ',')]
    coeffs: Option<Vec<f64>>,
    /// Interval start.
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    /// Interval end.
    #[arg(long, default_value_t = 4.0)]
    to: f64,
    /// Number of sample intervals M (M + 1 samples).
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Fixed noise amplitude c.
    #[arg(long = "noise-c", conflicts_with = "snr")]
    noise_c: Option<f64>,
    /// Calibrate the noise amplitude to this SNR (dB).
    #[arg(long)]
    snr: Option<f64>,
    /// Noise seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output signal CSV.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignalKind {
    Sin,
    Poly,
}

#[derive(Args)]
struct OracleArgs {
    /// Signal kind the truth is computed for.
    #[arg(long, value_enum, default_value_t = OracleKind::Sin)]
    signal: OracleKind,
    /// Frequency for `sin(omega x)`.
    #[arg(long, default_value_t = 5.0)]
    omega: f64,
    /// Monomial degree, for `--signal monomial`.
    #[arg(long, default_value_t = 1)]
    degree: usize,
    /// Derivative orders (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.5])]
    alpha: Vec<f64>,
    /// Interval start (must be 0: the Riemann-Liouville terminal).
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    /// Interval end.
    #[arg(long, default_value_t = 4.0)]
    to: f64,
    /// Number of sample intervals M.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Quadrature panels for the cross-check oracle.
    #[arg(long, default_value_t = 1 << 16)]
    panels: usize,
    /// Cross-check every k-th grid point.
    #[arg(long = "check-stride", default_value_t = 25)]
    check_stride: usize,
    /// Output fixture CSV.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Sin,
    Monomial,
}

#[derive(Args)]
struct KernelArgs {
    /// Derivative order.
    #[arg(long)]
    alpha: f64,
    /// Jacobi weight exponent mu.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Jacobi weight exponent kappa.
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    /// Truncation order N.
    #[arg(long = "order-n", default_value_t = 14)]
    order_n: usize,
    /// Normalized evaluation abscissa t in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Number of grid intervals M.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Output CSV of `tau,value` rows.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Derivative orders (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.5])]
    alpha: Vec<f64>,
    /// Truncation / fit degree N.
    #[arg(long = "order-n", default_value_t = 14)]
    order_n: usize,
    /// DFOSGD subsampling stride.
    #[arg(long, default_value_t = 5)]
    theta: usize,
    /// Jacobi weight exponent mu.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Jacobi weight exponent kappa.
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    /// Number of sample intervals M.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Interval start (must be 0).
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    /// Interval end.
    #[arg(long, default_value_t = 4.0)]
    to: f64,
    /// Signal frequency.
    #[arg(long, default_value_t = 5.0)]
    omega: f64,
    /// SNR target in dB for the noisy runs.
    #[arg(long, default_value_t = 10.0, conflicts_with = "noise_c")]
    snr: f64,
    /// Fixed noise amplitude instead of SNR calibration.
    #[arg(long = "noise-c")]
    noise_c: Option<f64>,
    /// Noise seeds (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = (0..20).collect::<Vec<u64>>())]
    seeds: Vec<u64>,
    /// Fraction trimmed from each end before scoring.
    #[arg(long, default_value_t = 0.05)]
    trim: f64,
    /// Output directory.
    #[arg(long)]
    outdir: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Differentiate(args) => cmd_differentiate(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Kernel(args) => cmd_kernel(args),
        Command::Benchmark(args) => cmd_benchmark(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &fracjac::Error) -> i32 {
    use fracjac::Error::*;
    match e {
        InvalidParam(_) => 2,
        DataFormat { .. } | WindowOutOfRange(_) | SampleMismatch(_) | MissingNoise | Io(_) => 3,
        GammaPole { .. } | NonFiniteKernel | RankDeficient(_) | UnattainableTarget(_)
        | InsufficientTerms(_) | OracleDisagreement { .. } => 4,
    }
}

fn write_estimates_csv(series: &EstimateSeries, path: &Path) -> fracjac::Result<()> {
    let mut out = String::from("x,estimate\n");
    for (x, v) in series.abscissae().iter().zip(series.values()) {
        writeln!(out, "{x},{v}").expect("string write");
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn cmd_differentiate(args: DifferentiateArgs) -> fracjac::Result<()> {
    let signal = read_signal_csv(&args.input)?;
    let params = JacobiParams::new(args.mu, args.kappa)?;
    let order = DiffOrder::new(args.alpha)?;
    let mode = match args.mode {
        CliMode::Global => Mode::Global,
        CliMode::Causal => Mode::Causal {
            window_samples: args.window.ok_or_else(|| {
                fracjac::Error::InvalidParam("causal mode needs --window".into())
            })?,
        },
    };
    let cache = KernelCache::new();
    let series = estimate_series(&cache, &signal, params, order, args.order_n, mode)?;
    write_estimates_csv(&series, &args.output)?;
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> fracjac::Result<()> {
    let clean = match args.signal {
        SignalKind::Sin => {
            let omega = args.omega;
            SampledSignal::sample(|x| (omega * x).sin(), args.from, args.to, args.samples)?
        }
        SignalKind::Poly => {
            let coeffs = args.coeffs.ok_or_else(|| {
                fracjac::Error::InvalidParam("--signal poly needs --coeffs".into())
            })?;
            SampledSignal::sample(
                |x| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
                args.from,
                args.to,
                args.samples,
            )?
        }
    };
    let signal = if let Some(c) = args.noise_c {
        clean.add_noise(c, args.seed)
    } else if let Some(target) = args.snr {
        let c = calibrate_c(&clean, target, args.seed)?;
        clean.add_noise(c, args.seed)
    } else {
        clean
    };
    write_signal_csv(&signal, &args.output)?;
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> fracjac::Result<()> {
    let rows = match args.signal {
        OracleKind::Sin => sin_fixture(
            args.omega,
            &args.alpha,
            args.from,
            args.to,
            args.samples,
            args.check_stride,
            args.panels,
            1e-6,
        )?,
        OracleKind::Monomial => monomial_fixture(&args)?,
    };
    write_fixture_csv(&rows, &args.output)?;
    Ok(())
}

/// Closed-form monomial truth with the quadrature oracle as cross-check.
fn monomial_fixture(args: &OracleArgs) -> fracjac::Result<Vec<FixtureRow>> {
    if args.from != 0.0 {
        return Err(fracjac::Error::InvalidParam(
            "the Riemann-Liouville terminal is 0, so the interval must start at 0".into(),
        ));
    }
    let k = args.degree;
    let ts = args.to / args.samples as f64;
    let stride = args.check_stride.max(1);
    let mut rows = Vec::new();
    for &alpha in &args.alpha {
        let order = DiffOrder::new(alpha)?;
        let l = order.l() as usize;
        // l-th derivative of x^k and the lower Maclaurin derivatives.
        let fall: f64 = (0..l).map(|j| (k as f64) - j as f64).product();
        let f_l = move |tau: f64| {
            if l > k {
                0.0
            } else {
                fall * tau.powi((k - l) as i32)
            }
        };
        let derivs: Vec<f64> = (0..l)
            .map(|j| {
                if j == k {
                    (1..=k).map(|v| v as f64).product()
                } else {
                    0.0
                }
            })
            .collect();
        for i in 1..=args.samples {
            let x = ts * i as f64;
            let truth = rl_monomial(k, order, x)?;
            if i % stride == 0 {
                let quad = rl_caputo_quad(f_l, &derivs, order, x, args.panels)?;
                if (truth - quad).abs() > 1e-6 * truth.abs().max(1.0) {
                    return Err(fracjac::Error::OracleDisagreement {
                        x,
                        alpha,
                        series: truth,
                        quad,
                        tol: 1e-6,
                    });
                }
            }
            rows.push(FixtureRow { x, alpha, truth });
        }
    }
    Ok(rows)
}

fn cmd_kernel(args: KernelArgs) -> fracjac::Result<()> {
    let params = JacobiParams::new(args.mu, args.kappa)?;
    let order = DiffOrder::new(args.alpha)?;
    let table = build_fractional_kernel(params, order, args.order_n, args.t, args.samples)?;
    let mut out = String::from("tau,value\n");
    for (tau, v) in table.grid().iter().zip(table.values()) {
        writeln!(out, "{tau},{v}").expect("string write");
    }
    std::fs::write(&args.output, out)?;
    Ok(())
}

fn cmd_benchmark(args: BenchmarkArgs) -> fracjac::Result<()> {
    let spec = BenchmarkSpec {
        alphas: args.alpha.clone(),
        trunc: args.order_n,
        theta: args.theta,
        mu: args.mu,
        kappa: args.kappa,
        m: args.samples,
        interval: (args.from, args.to),
        omega: args.omega,
        noise: match args.noise_c {
            Some(c) => NoiseSpec::Amplitude(c),
            None => NoiseSpec::SnrDb(args.snr),
        },
        seeds: args.seeds.clone(),
        trim: args.trim,
    };
    std::fs::create_dir_all(&args.outdir)?;
    let fixture_path = args.outdir.join("oracle_truth.csv");
    let fixture = if fixture_path.exists() {
        Some(read_fixture_csv(&fixture_path)?)
    } else {
        None
    };
    let had_fixture = fixture.is_some();
    let report = run_benchmark(&spec, fixture)?;
    if !had_fixture {
        write_fixture_csv(&report.fixture, &fixture_path)?;
    }

    let reports_dir = args.outdir.join("reports");
    std::fs::create_dir_all(&reports_dir)?;
    let mut runs_csv = String::from("alpha,method,mode,seed,rmse,max_abs,snr_db,c\n");
    let mut seen_free: std::collections::HashSet<(u64, &'static str)> =
        std::collections::HashSet::new();
    for run in &report.runs {
        let (mode, seed_field) = match run.seed {
            Some(s) => ("noisy", s.to_string()),
            None => ("noise-free", String::new()),
        };
        writeln!(
            runs_csv,
            "{},{},{mode},{seed_field},{},{},{},{}",
            run.alpha,
            run.method.name(),
            run.report.rmse(),
            run.report.max_abs(),
            run.snr_db.map(|v| v.to_string()).unwrap_or_default(),
            run.noise_c.map(|v| v.to_string()).unwrap_or_default(),
        )
        .expect("string write");
        let file = match run.seed {
            Some(s) => format!("{}_alpha{}_seed{}.csv", run.method.name(), run.alpha, s),
            None => format!("{}_alpha{}_noisefree.csv", run.method.name(), run.alpha),
        };
        // Noise-free records repeat per seed; write their curve once.
        if run.seed.is_some() || seen_free.insert((run.alpha.to_bits(), run.method.name())) {
            write_report_csv(&run.report, &reports_dir.join(file))?;
        }
    }
    std::fs::write(args.outdir.join("runs.csv"), runs_csv)?;

    let mut summary_csv = String::from("method,alpha,mode,median_rmse\n");
    println!("method  alpha  mode        median RMSE");
    for cell in &report.cells {
        let mode = if cell.noisy { "noisy" } else { "noise-free" };
        writeln!(
            summary_csv,
            "{},{},{mode},{}",
            cell.method.name(),
            cell.alpha,
            cell.median_rmse
        )
        .expect("string write");
        println!(
            "{:<7} {:<6} {:<11} {:.6e}",
            cell.method.name(),
            cell.alpha,
            mode,
            cell.median_rmse
        );
    }
    std::fs::write(args.outdir.join("summary.csv"), summary_csv)?;

    // Headline comparison per (alpha, mode).
    for &alpha in &spec.alphas {
        for noisy in [false, true] {
            let j = report.cell(Method::FractionalJacobi, alpha, noisy);
            let d = report.cell(Method::Dfosgd, alpha, noisy);
            if let (Some(j), Some(d)) = (j, d) {
                let mode = if noisy { "noisy" } else { "noise-free" };
                let verdict = if j.median_rmse < d.median_rmse {
                    "jacobi wins"
                } else {
                    "dfosgd wins"
                };
                println!(
                    "alpha={alpha} {mode}: jacobi {:.4e} vs dfosgd {:.4e} ({verdict})",
                    j.median_rmse, d.median_rmse
                );
            }
        }
    }
    Ok(())
}
