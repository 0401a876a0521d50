//! `roundlat` binary: moment reports, characteristic-function tables, the
//! verification suite, and Sheppard-correction reports.
//!
//! Machine contract: exit 0 on success, 1 when a residual or check fails,
//! 2 on malformed input (CLI arguments or spec files), 3 when a spec file is
//! well-formed but violates a distribution invariant. Nothing is written to
//! standard error on success; tables and CSV go to standard output.

use clap::{Parser, Subcommand, ValueEnum};
use roundlat::{
    charfun_rounded, mean_rounded, moment_rounded, run_all, second_moment_rounded,
    sheppard_report, sweep, sweep_csv, CheckResult, LatticeDistribution, RoundingMode,
    SweepConfig, TrigPolynomial, VerifyConfig,
};
use roundlat_cli::{fmt_float, parse_spec, spec_to_distribution};
use std::path::{Path, PathBuf};

/// A failure to report on standard error, with its process exit code.
type Failure = (i32, String);

#[derive(Parser)]
#[command(
    name = "roundlat",
    version,
    about = "Moments and characteristic functions of rounded lattice-valued random variables",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form moments of the rounded variable, checked against the
    /// exact rational oracle (CSV on standard output)
    Moments {
        /// Distribution file (JSON: {"q": ..., "pmf": [{"k": ..., "p": "a/b"}, ...]})
        spec: PathBuf,
        /// Rounding mode applied to the variable
        #[arg(long, value_enum, default_value_t = ModeArg::Floor)]
        mode: ModeArg,
        /// Report moment orders r = 1..=max-r
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=8))]
        max_r: u32,
        /// Largest allowed |formula - oracle|, scaled by max(1, |oracle|)
        #[arg(long, default_value_t = 1e-8, value_parser = parse_positive_f64)]
        tolerance: f64,
    },
    /// Characteristic function of the rounded variable on an evenly spaced
    /// grid, with the direct-rounding oracle alongside (CSV on standard output)
    Charfun {
        /// Distribution file (JSON: {"q": ..., "pmf": [{"k": ..., "p": "a/b"}, ...]})
        spec: PathBuf,
        /// Rounding mode applied to the variable
        #[arg(long, value_enum, default_value_t = ModeArg::Floor)]
        mode: ModeArg,
        /// Number of grid points
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
        grid: u32,
        /// Evaluate on [-T, T]; defaults to T = pi*q, half the charfun period
        #[arg(long, value_parser = parse_positive_f64)]
        t_max: Option<f64>,
        /// Largest allowed |fold - oracle| per grid point
        #[arg(long, default_value_t = 1e-8, value_parser = parse_positive_f64)]
        tolerance: f64,
    },
    /// Run the self-verification suite (closed forms vs oracle, exact
    /// identities) and exit nonzero if any check fails
    Verify {
        /// Largest lattice denominator exercised by the per-q checks
        #[arg(long, default_value_t = 50)]
        q_max: u32,
        /// Seed for the random-distribution checks
        #[arg(long, default_value_t = 1729)]
        seed: u64,
        /// Number of random distributions per randomized check
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Sheppard-correction error report for a weighted sum of centered
    /// uniforms: one case as a table, or a sweep as CSV
    Sheppard {
        /// Lattice denominator q (must be odd); use together with --weights
        #[arg(long, requires = "weights", conflicts_with = "sweep")]
        q: Option<u32>,
        /// Comma-separated positive weights, e.g. 1,2,5
        #[arg(long, value_delimiter = ',', requires = "q", conflicts_with = "sweep")]
        weights: Option<Vec<u32>>,
        /// Sweep the whole parameter grid and emit CSV
        #[arg(long)]
        sweep: bool,
        /// Sweep: largest q (odd values only are used)
        #[arg(long, default_value_t = 31)]
        q_max: u32,
        /// Sweep: largest number of weights
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Sweep: largest single weight
        #[arg(long, default_value_t = 6)]
        s_max: u32,
        /// Sweep: draw this many grid cases at random instead of all of them
        #[arg(long)]
        subsample: Option<usize>,
        /// Sweep: seed for --subsample
        #[arg(long, default_value_t = 1729)]
        seed: u64,
    },
}

/// Rounding mode as a CLI value.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Floor,
    Ceil,
    NearestUp,
    NearestDown,
}

impl ModeArg {
    fn to_mode(self) -> RoundingMode {
        match self {
            ModeArg::Floor => RoundingMode::Floor,
            ModeArg::Ceil => RoundingMode::Ceil,
            ModeArg::NearestUp => RoundingMode::NearestUp,
            ModeArg::NearestDown => RoundingMode::NearestDown,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Floor => "floor",
            ModeArg::Ceil => "ceil",
            ModeArg::NearestUp => "nearest-up",
            ModeArg::NearestDown => "nearest-down",
        }
    }
}

fn parse_positive_f64(text: &str) -> Result<f64, String> {
    let value: f64 = text.parse().map_err(|e| format!("{e}"))?;
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err("must be a positive finite number".to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Moments { spec, mode, max_r, tolerance } => {
            cmd_moments(&spec, mode, max_r, tolerance)
        }
        Command::Charfun { spec, mode, grid, t_max, tolerance } => {
            cmd_charfun(&spec, mode, grid, t_max, tolerance)
        }
        Command::Verify { q_max, seed, samples, inject_fault } => {
            cmd_verify(q_max, seed, samples, inject_fault)
        }
        Command::Sheppard {
            q,
            weights,
            sweep: run_sweep,
            q_max,
            n_max,
            s_max,
            subsample,
            seed,
        } => cmd_sheppard(q, weights, run_sweep, q_max, n_max, s_max, subsample, seed),
    };
    if let Err((code, message)) = outcome {
        eprintln!("error: {message}");
        std::process::exit(code);
    }
}

/// Reads and validates a distribution file, mapping the two spec-error
/// classes to exit codes 2 (parse) and 3 (invariant).
fn load_distribution(path: &Path) -> Result<LatticeDistribution, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (2, format!("cannot read {}: {e}", path.display())))?;
    let spec = parse_spec(&text).map_err(|e| (e.exit_code(), e.to_string()))?;
    spec_to_distribution(&spec).map_err(|e| (e.exit_code(), e.to_string()))
}

fn cmd_moments(spec: &Path, mode: ModeArg, max_r: u32, tolerance: f64) -> Result<(), Failure> {
    let d = load_distribution(spec)?;
    print!("mode,r,formula,oracle,residual,within_tolerance\r\n");
    let mut breaches = 0u32;
    for r in 1..=max_r {
        // The dedicated closed forms cover r = 1, 2; higher orders come from
        // differentiating the folded characteristic function.
        let report = match r {
            1 => mean_rounded(&d, mode.to_mode()),
            2 => second_moment_rounded(&d, mode.to_mode()),
            _ => moment_rounded(&d, mode.to_mode(), r).expect("r is at least 1"),
        };
        let within = report.within(tolerance);
        breaches += u32::from(!within);
        print!(
            "{},{},{},{},{},{}\r\n",
            mode.name(),
            r,
            fmt_float(report.formula_value),
            report.oracle_value,
            fmt_float(report.residual),
            within
        );
    }
    if breaches > 0 {
        return Err((1, format!("{breaches} of {max_r} moment residuals exceeded tolerance")));
    }
    Ok(())
}

fn cmd_charfun(
    spec: &Path,
    mode: ModeArg,
    grid: u32,
    t_max: Option<f64>,
    tolerance: f64,
) -> Result<(), Failure> {
    let d = load_distribution(spec)?;
    let t_max = t_max.unwrap_or(std::f64::consts::PI * f64::from(d.q()));
    let oracle = TrigPolynomial::from_distribution(&d.round_distribution(mode.to_mode()));
    print!("t,re,im,oracle_re,oracle_im,residual\r\n");
    let mut breaches = 0u32;
    for i in 0..grid {
        let t = if grid == 1 {
            0.0
        } else {
            -t_max + f64::from(i) * (2.0 * t_max / f64::from(grid - 1))
        };
        let folded = charfun_rounded(&d, mode.to_mode(), t);
        let exact = oracle.evaluate(t);
        let residual = (folded - exact).norm();
        breaches += u32::from(residual > tolerance);
        print!(
            "{},{},{},{},{},{}\r\n",
            fmt_float(t),
            fmt_float(folded.re),
            fmt_float(folded.im),
            fmt_float(exact.re),
            fmt_float(exact.im),
            fmt_float(residual)
        );
    }
    if breaches > 0 {
        return Err((1, format!("{breaches} of {grid} grid residuals exceeded tolerance")));
    }
    Ok(())
}

fn cmd_verify(q_max: u32, seed: u64, samples: usize, inject_fault: bool) -> Result<(), Failure> {
    let config = VerifyConfig { q_max, samples, seed, ..VerifyConfig::default() };
    let mut results = run_all(&config);
    if inject_fault {
        results.push(CheckResult {
            name: "injected-fault".to_string(),
            passed: false,
            residual: f64::INFINITY,
            detail: "synthetic failure requested via --inject-fault".to_string(),
        });
    }
    for check in &results {
        let word = if check.passed { "pass" } else { "FAIL" };
        println!(
            "check {:<30} {word}  residual {:.3e}  {}",
            check.name, check.residual, check.detail
        );
    }
    let failed = results.iter().filter(|c| !c.passed).count();
    if failed == 0 {
        println!("all {} checks passed", results.len());
    } else {
        println!("{failed} of {} checks failed", results.len());
    }
    println!(
        "{}",
        serde_json::json!({
            "checks": results.len(),
            "passed": results.len() - failed,
            "failed": failed,
            "q_max": q_max,
            "samples": samples,
            "seed": seed,
        })
    );
    if failed > 0 {
        return Err((1, format!("{failed} of {} checks failed", results.len())));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sheppard(
    q: Option<u32>,
    weights: Option<Vec<u32>>,
    run_sweep: bool,
    q_max: u32,
    n_max: usize,
    s_max: u32,
    subsample: Option<usize>,
    seed: u64,
) -> Result<(), Failure> {
    if run_sweep {
        let config = SweepConfig {
            q_max,
            n_max,
            s_max,
            subsample: subsample.map(|count| (count, seed)),
        };
        let reports = sweep(&config);
        print!("{}", sweep_csv(&reports));
        let violations = reports
            .iter()
            .filter(|r| matches!(&r.bound, Some(b) if r.exact_error > *b))
            .count();
        if violations > 0 {
            return Err((1, format!("{violations} sweep cases violated the error bound")));
        }
        return Ok(());
    }

    let (Some(q), Some(weights)) = (q, weights) else {
        return Err((2, "either --sweep or both --q and --weights are required".to_string()));
    };
    if q % 2 == 0 {
        return Err((
            2,
            format!("q must be odd, got {q}: the centered uniform lattice model is only defined for odd denominators"),
        ));
    }
    if weights.contains(&0) {
        return Err((2, "weights must be positive integers".to_string()));
    }
    let report = sheppard_report(q, &weights).map_err(|e| (2, e.to_string()))?;

    let joined =
        |xs: &[u32]| xs.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    println!("q:                       {}", report.q);
    println!("weights:                 {}", joined(&report.s));
    println!("var(X):                  {}", report.var_x);
    println!("mean of rounded X:       {}", report.mean_rounded);
    println!("second moment (exact):   {}", report.second_moment_rounded);
    println!("second moment (formula): {}", fmt_float(report.formula_second_moment));
    println!("Sheppard approximation:  {}", fmt_float(report.sheppard_approx));
    println!("exact error:             {}", report.exact_error);
    match (&report.bound, &report.intermediate_bound) {
        (Some(bound), Some(intermediate)) => {
            println!("error bound:             {bound}");
            println!("intermediate bound:      {intermediate}");
        }
        _ => {
            println!("error bound:             n/a (needs at least two weights)");
            println!("intermediate bound:      n/a (needs at least two weights)");
        }
    }
    println!("lattice gcd d:           {}", report.d);
    println!("leave-one-out gcd d_k:   {}", joined(&report.d_k));
    match report.bound.as_ref().map(|b| report.exact_error <= *b) {
        Some(true) => println!("bound satisfied:         yes"),
        None => println!("bound satisfied:         n/a"),
        Some(false) => {
            println!("bound satisfied:         NO");
            return Err((1, "exact error exceeds the error bound".to_string()));
        }
    }
    Ok(())
}
