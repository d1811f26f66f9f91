//! Command-line front end: Wronskian scans, zero certification, bounded
//! eigenfunctions, growth fits, eigenvalue tables, and the verification
//! suite. Every JSON artifact embeds the run configuration that produced it.
//!
//! Exit codes: 0 success, 1 computation failure, 2 bad arguments or
//! configuration, 3 verification FAIL.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use wzeta::cache::{cache_key, WronskianCache, CACHE_DIR_ENV};
use wzeta::config::RunConfig;
use wzeta::report;
use wzeta::singular::{
    bounded_solution, derivative_sequence, nonanalyticity_certificate, pde_residual,
};
use wzeta::spectral::{default_grid, fit_growth, integrality_gap, lowest_eigenvalue};
use wzeta::verify::{growth_problem, growth_radii, run_suite, VerifyOptions};
use wzeta::wronskian::{eval_w, scan, ScanCell, ScanGrid, WronskianEval};
use wzeta::zerofinder::{find_zeros, CertifiedZero, SearchRegion};
use wzeta::problem::EvalPoint;
use wzeta::{Error, Problem, Result};

const EXIT_COMPUTE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "wzeta",
    about = "Wronskian zeros and bounded solutions of -d²/dx² + (ζ - m x^{m-1})²",
    version
)]
struct Cli {
    /// JSON run configuration; defaults apply when absent.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Degree m of the monomial (overrides the configuration).
    #[arg(long, global = true)]
    m: Option<u32>,

    /// Output directory for artifacts (overrides the configuration).
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate W on a rectangular grid; writes scan.json and scan.csv.
    Scan {
        /// Grid box as re_lo:re_hi:im_lo:im_hi.
        #[arg(long = "box", allow_hyphen_values = true, value_name = "B")]
        bounds: Option<String>,
        /// Grid resolution per axis.
        #[arg(long, value_name = "N")]
        n: Option<usize>,
    },
    /// Locate and certify Wronskian zeros; writes zeros.json and zeros.csv.
    Zeros {
        /// Search box as re_lo:re_hi:im_lo:im_hi (must avoid the real axis
        /// or be symmetric about it).
        #[arg(long = "box", allow_hyphen_values = true, value_name = "B")]
        bounds: Option<String>,
        /// Stop after this many zeros.
        #[arg(long, value_name = "N")]
        max: Option<usize>,
    },
    /// Sample the bounded solution at a certified zero; writes eigenfunction.csv.
    Eigenfunction {
        /// Which certified zero (index into the sorted zero list).
        #[arg(long, default_value_t = 0)]
        zero_index: usize,
        /// Number of sample abscissae.
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Derivative-growth certificate at a certified zero; writes singular.json.
    Singular {
        /// Which certified zero (index into the sorted zero list).
        #[arg(long, default_value_t = 0)]
        zero_index: usize,
        /// Highest derivative order k.
        #[arg(long, value_name = "K")]
        k_max: Option<usize>,
        /// Also probe the PDE residual at (0.1, 1, 0) with h = 1e-2 (slow).
        #[arg(long)]
        pde: bool,
    },
    /// Entire-function growth fit and order-integrality gap; writes growth.json.
    Growth {
        /// Circle radii (comma-separated); defaults are tuned per degree.
        #[arg(long, allow_hyphen_values = true, value_name = "R1,R2,...")]
        radii: Option<String>,
        /// Rays per circle.
        #[arg(long, default_value_t = 64)]
        rays: usize,
    },
    /// Ground-state eigenvalue table over an integer ζ range; writes eig.json.
    Eig {
        #[arg(long, default_value_t = -5, allow_hyphen_values = true)]
        zeta_min: i32,
        #[arg(long, default_value_t = 5, allow_hyphen_values = true)]
        zeta_max: i32,
    },
    /// Run the acceptance suite; exit 0 iff every criterion passes.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) => ExitCode::from(EXIT_USAGE),
                _ => ExitCode::from(EXIT_COMPUTE),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(m) = cli.m {
        if cli.config.is_none() {
            config = RunConfig::for_m(m);
        } else {
            config.m = m;
        }
    }
    if let Some(dir) = &cli.out_dir {
        config.out_dir = dir.clone();
    }

    match cli.command {
        Command::Scan { bounds, n } => cmd_scan(&config, bounds, n),
        Command::Zeros { bounds, max } => cmd_zeros(&config, bounds, max),
        Command::Eigenfunction {
            zero_index,
            samples,
        } => cmd_eigenfunction(&config, zero_index, samples),
        Command::Singular {
            zero_index,
            k_max,
            pde,
        } => cmd_singular(&config, zero_index, k_max, pde),
        Command::Growth { radii, rays } => cmd_growth(&config, radii, rays),
        Command::Eig { zeta_min, zeta_max } => cmd_eig(&config, zeta_min, zeta_max),
        Command::Verify => cmd_verify(&config, cli.m),
    }
}

fn parse_box(text: &str) -> Result<[f64; 4]> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 4 {
        return Err(Error::Config(format!(
            "--box expects re_lo:re_hi:im_lo:im_hi, got `{text}`"
        )));
    }
    let mut out = [0.0; 4];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| Error::Config(format!("--box component `{part}` is not a number")))?;
    }
    Ok(out)
}

/// Cache handle when one is configured (env var overrides the config).
fn open_cache(config: &RunConfig) -> Result<Option<WronskianCache>> {
    let dir = std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .or_else(|| config.cache_dir.clone());
    dir.map(|d| WronskianCache::open(&d)).transpose()
}

/// Grid scan that serves hits from the cache and records fresh evaluations.
fn scan_cached(
    problem: &Problem,
    grid: &ScanGrid,
    cache: &mut WronskianCache,
) -> Result<Vec<ScanCell>> {
    let points = grid.points();
    let mut cells: Vec<Option<ScanCell>> = points
        .iter()
        .map(|&zeta| {
            cache.get(&cache_key(problem, zeta)).map(|eval| ScanCell {
                zeta,
                eval: Some(eval.clone()),
                failure: None,
            })
        })
        .collect();
    let missing: Vec<(usize, Complex64)> = cells
        .iter()
        .enumerate()
        .filter(|(_, cell)| cell.is_none())
        .map(|(i, _)| (i, points[i]))
        .collect();
    let computed: Vec<(usize, Result<WronskianEval>)> = missing
        .par_iter()
        .map(|&(i, zeta)| (i, eval_w(problem, zeta)))
        .collect();
    let hits = points.len() - computed.len();
    for (i, outcome) in computed {
        let zeta = points[i];
        cells[i] = Some(match outcome {
            Ok(eval) => {
                cache.put(&cache_key(problem, zeta), &eval)?;
                ScanCell {
                    zeta,
                    eval: Some(eval),
                    failure: None,
                }
            }
            Err(err) => ScanCell {
                zeta,
                eval: None,
                failure: Some(err.to_string()),
            },
        });
    }
    if hits > 0 {
        println!("cache: {hits}/{} grid points served from {}", points.len(), cache.path().display());
    }
    Ok(cells.into_iter().map(|c| c.expect("every cell filled")).collect())
}

fn cmd_scan(config: &RunConfig, bounds: Option<String>, n: Option<usize>) -> Result<ExitCode> {
    let mut config = config.clone();
    if let Some(text) = bounds {
        let [re_lo, re_hi, im_lo, im_hi] = parse_box(&text)?;
        config.scan = ScanGrid {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
            n_re: config.scan.n_re,
            n_im: config.scan.n_im,
        };
    }
    if let Some(n) = n {
        config.scan.n_re = n;
        config.scan.n_im = n;
    }
    config.validate()?;
    let problem = config.problem()?;

    let cells = match open_cache(&config)? {
        Some(mut cache) => scan_cached(&problem, &config.scan, &mut cache)?,
        None => scan(&problem, &config.scan),
    };
    let failed = cells.iter().filter(|c| c.eval.is_none()).count();
    report::write_artifact(&config.out_dir.join("scan.json"), &config, &cells)?;
    report::write_table(&config.out_dir.join("scan.csv"), &report::scan_csv(&cells))?;
    println!(
        "scan: {} cells ({failed} failed) on [{}, {}]x[{}, {}] -> {}",
        cells.len(),
        config.scan.re_lo,
        config.scan.re_hi,
        config.scan.im_lo,
        config.scan.im_hi,
        config.out_dir.join("scan.{json,csv}").display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_zeros(config: &RunConfig, bounds: Option<String>, max: Option<usize>) -> Result<ExitCode> {
    let mut config = config.clone();
    if let Some(text) = bounds {
        let [re_lo, re_hi, im_lo, im_hi] = parse_box(&text)?;
        config.zero_region = SearchRegion::new(re_lo, re_hi, im_lo, im_hi)
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    if let Some(max) = max {
        config.max_zeros = max;
    }
    config.validate()?;
    let problem = config.problem()?;

    let zeros = find_zeros(&problem, &config.zero_region, config.max_zeros)?;
    report::write_artifact(&config.out_dir.join("zeros.json"), &config, &zeros)?;
    report::write_table(&config.out_dir.join("zeros.csv"), &report::zeros_csv(&zeros))?;
    println!("zeros: {} certified for m = {}", zeros.len(), config.m);
    for zero in &zeros {
        println!(
            "  {:+.12}{:+.12}i  winding {}  residual_log {:.2}  cert_radius {:.2e}",
            zero.zeta_star.re, zero.zeta_star.im, zero.winding, zero.residual_log, zero.cert_radius
        );
    }
    Ok(ExitCode::SUCCESS)
}

/// The certified zero the index points at, from a fresh search.
fn zero_at(config: &RunConfig, problem: &Problem, index: usize) -> Result<CertifiedZero> {
    let zeros = find_zeros(problem, &config.zero_region, config.max_zeros)?;
    zeros.get(index).cloned().ok_or_else(|| {
        Error::Config(format!(
            "--zero-index {index} out of range: {} zeros certified in the search region",
            zeros.len()
        ))
    })
}

fn cmd_eigenfunction(config: &RunConfig, zero_index: usize, samples: usize) -> Result<ExitCode> {
    if samples < 2 {
        return Err(Error::Config("--samples must be at least 2".into()));
    }
    config.validate()?;
    let problem = config.problem()?;
    let zero = zero_at(config, &problem, zero_index)?;
    let sol = bounded_solution(&problem, &zero)?;

    let lo = -sol.cutoff_minus();
    let hi = sol.cutoff_plus();
    let step = (hi - lo) / (samples - 1) as f64;
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = lo + step * i as f64;
        rows.push((x, sol.eval_log(x)?.to_complex()?));
    }
    report::write_table(
        &config.out_dir.join("eigenfunction.csv"),
        &report::eigenfunction_csv(&rows),
    )?;
    println!(
        "eigenfunction at zeta* = {:+.6}{:+.6}i: {} samples on [{:.2}, {:.2}], |f(0)| = {:.4e} -> {}",
        zero.zeta_star.re,
        zero.zeta_star.im,
        samples,
        lo,
        hi,
        sol.f0.norm(),
        config.out_dir.join("eigenfunction.csv").display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_singular(
    config: &RunConfig,
    zero_index: usize,
    k_max: Option<usize>,
    pde: bool,
) -> Result<ExitCode> {
    config.validate()?;
    let problem = config.problem()?;
    let zero = zero_at(config, &problem, zero_index)?;
    let sol = bounded_solution(&problem, &zero)?;
    let mut report_payload = derivative_sequence(&problem, &sol, k_max.unwrap_or(config.k_max))?;
    if pde {
        let point = EvalPoint::new(0.1, 1.0, 0.0)?;
        report_payload.pde_residual = Some(pde_residual(&problem, &sol, &point, 1e-2)?);
    }
    let verdict = nonanalyticity_certificate(&report_payload);

    report::write_artifact(
        &config.out_dir.join("singular.json"),
        config,
        &serde_json::json!({ "report": report_payload, "verdict": verdict }),
    )?;
    println!(
        "singular at zeta* = {:+.6}{:+.6}i: k_max = {}, {} (pass: {})",
        report_payload.zeta_star.re,
        report_payload.zeta_star.im,
        report_payload.k_max,
        verdict.note,
        verdict.pass
    );
    if let Some(residual) = report_payload.pde_residual {
        println!("  PDE residual at (0.1, 1, 0), h = 1e-2: {residual:.3e}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_growth(config: &RunConfig, radii: Option<String>, rays: usize) -> Result<ExitCode> {
    let problem = growth_problem(config.m)?;
    let radii: Vec<f64> = match radii {
        Some(text) => text
            .split(',')
            .map(|part| {
                part.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("radius `{part}` is not a number")))
            })
            .collect::<Result<_>>()?,
        None => growth_radii(config.m).to_vec(),
    };
    if radii.len() < 2 {
        return Err(Error::Config("need at least two radii".into()));
    }

    let fit = fit_growth(&problem, &radii, rays)?;
    let gap = integrality_gap(&problem, &fit);
    println!("growth (m = {}):", config.m);
    println!("  R        ln max |W|");
    for (r, log_max) in fit.radii.iter().zip(&fit.circle_max_log) {
        println!("  {r:<8} {log_max:.6}");
    }
    println!(
        "  rho_hat = {:.6} (order target m/(m-1) = {:.6}), circle residual {:.2e}",
        fit.exponent_est,
        f64::from(config.m) / f64::from(config.m - 1),
        fit.circle_residual
    );
    println!(
        "  delta_hat = {:.6e} (real-axis slope), axis residual {:.2e}",
        fit.slope_real_axis, fit.axis_residual
    );
    println!(
        "  integrality gap: |rho - {}| = {:.4}, applicable: {}, pass: {}",
        gap.nearest_integer, gap.gap, gap.applicable, gap.pass
    );
    report::write_artifact(
        &config.out_dir.join("growth.json"),
        config,
        &serde_json::json!({ "fit": fit, "gap": gap }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_eig(config: &RunConfig, zeta_min: i32, zeta_max: i32) -> Result<ExitCode> {
    if zeta_min > zeta_max {
        return Err(Error::Config(format!(
            "--zeta-min {zeta_min} exceeds --zeta-max {zeta_max}"
        )));
    }
    config.validate()?;
    let problem = config.problem()?;
    let mut estimates = Vec::new();
    println!("eig (m = {}):", config.m);
    println!("  zeta   lambda_min     defect      cutoff  points");
    for zeta_int in zeta_min..=zeta_max {
        let zeta = f64::from(zeta_int);
        let (xd, n) = default_grid(&problem, zeta);
        let est = lowest_eigenvalue(&problem, zeta, xd, n)?;
        println!(
            "  {zeta_int:<6} {:<14.8} {:<11.3e} {:<7.3} {}",
            est.lambda_min, est.refinement_defect, est.cutoff, est.points
        );
        estimates.push(est);
    }
    report::write_artifact(&config.out_dir.join("eig.json"), config, &estimates)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(config: &RunConfig, scope: Option<u32>) -> Result<ExitCode> {
    let options = VerifyOptions {
        m: scope,
        cache_dir: config.cache_dir.clone(),
    };
    let results = run_suite(&options);
    for result in &results {
        println!("{result}");
    }
    report::write_artifact(&config.out_dir.join("verify.json"), config, &results)?;
    let all_passed = results.iter().all(|r| r.passed);
    println!(
        "verify: {}/{} criteria passed",
        results.iter().filter(|r| r.passed).count(),
        results.len()
    );
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    })
}
