//! Command-line driver: group loading, cached spectrum enumeration, the
//! estimator tasks, zeta grids and pole location, the entropy sweep, and
//! CSV/JSON emission.
//!
//! Exit codes: 0 on success (a truncated sweep still succeeds, with a
//! warning on stderr), 1 on errors, 2 when a requested cutoff is beyond
//! certification and `--force` was not given, 3 when a zeta evaluation is
//! requested too close to the divergence abscissa.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use crate::schottky::{
    enumerate_spectrum, EnumerationError, LengthSpectrum, ResourceLimits, SchottkyError,
    SchottkyGroup, SpectrumError,
};
use crate::spectral::{
    entropy_sweep, extension_strip, generator_power_group, lambda0_bounds, metric_scaling,
    translation_group, FamilyPoint, SpectralBranch, SpectralError, StripFamily, SweepResult,
};
use crate::thermo::{
    critical_exponent, entropy, pressure, PotentialSpec, QuadratureSettings, ThermoError,
    WeightTable,
};
use crate::zeta::{
    gn_zeta, locate_pole, prime_orbit_check, selberg_zeta, weighted_orbit_check, weighted_zeta,
    PoleFamily, ZetaError, ZetaOptions, DEFAULT_MARGIN,
};

const SWEEP_JUMP_THRESHOLD: f64 = 3.0;
const TRIANGLE_TOL: f64 = 0.05;
/// Verdict bands for the counting ratio at the last certified length.
const COUNT_BAND: (f64, f64) = (0.7, 1.3);
const WEIGHTED_COUNT_BAND: (f64, f64) = (0.6, 1.4);

#[derive(Parser, Debug)]
#[command(
    name = "orbitzeta",
    version,
    about = "Certified length spectra, dynamical zeta functions, and entropy \
             estimates for Schottky groups",
    max_term_width = 100
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for the parallel library calls (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=4096))]
    workers: Option<u64>,
    /// Suppress progress notes on stderr; results and errors still print.
    #[arg(long, global = true)]
    quiet: bool,
    /// Emit machine-readable one-line JSON summaries instead of prose.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate the certified length spectrum of a group and save it.
    Spectrum(SpectrumArgs),
    /// Run one estimator task against a saved spectrum or a group.
    Analyze(AnalyzeArgs),
    /// Evaluate a zeta family on an s-grid, or bracket its divergence
    /// abscissa.
    Zeta(ZetaArgs),
    /// Estimate entropy across a one-parameter family of groups.
    Sweep(SweepArgs),
    /// Check a group file against the ping-pong certificate.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// Group file (JSON).
    #[arg(long)]
    group: PathBuf,
    /// Length cutoff T.
    #[arg(long, value_parser = parse_positive)]
    cutoff: f64,
    /// Output spectrum file.
    #[arg(long)]
    out: PathBuf,
    /// Keep an uncertified partial spectrum instead of exiting with code 2.
    #[arg(long)]
    force: bool,
    /// Hard cap on reduced word length.
    #[arg(long, default_value_t = ResourceLimits::default().max_word_length,
          value_parser = clap::value_parser!(u32).range(1..))]
    max_word_length: u32,
    /// Hard cap on reduced words visited.
    #[arg(long, default_value_t = ResourceLimits::default().max_words,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_words: u64,
    /// Skip the spectrum cache for both reading and writing.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Estimator to run.
    #[arg(long, value_enum)]
    task: Task,
    /// Saved spectrum file (most tasks).
    #[arg(long)]
    spectrum: Option<PathBuf>,
    /// Group file; required by critical-exponent and triangle, used to
    /// verify the spectrum digest and integrate expression potentials
    /// elsewhere.
    #[arg(long)]
    group: Option<PathBuf>,
    /// Potential, e.g. "const:-0.5", "sbr:-0.5", or "expr:sin(x)/(1+y^2)".
    #[arg(long, value_parser = parse_potential_arg)]
    potential: Option<PotentialSpec>,
    /// Accept an uncertified spectrum.
    #[arg(long)]
    force: bool,
    /// Optional CSV report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Orbit ball radius (critical-exponent and triangle tasks).
    #[arg(long, value_parser = parse_positive)]
    radius: Option<f64>,
    /// Growth rate for the bounds and strip tasks (default: the spectrum's
    /// entropy estimate).
    #[arg(long, allow_hyphen_values = true)]
    rate: Option<f64>,
    /// Boundary dimension n for the bounds task.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: Option<u32>,
    /// Lower curvature pinching bound a.
    #[arg(long, value_parser = parse_positive)]
    a: Option<f64>,
    /// Upper curvature pinching bound b.
    #[arg(long, value_parser = parse_positive)]
    b: Option<f64>,
    /// Zeta family for the strip task.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Hölder exponent of the weight for the strip task's weighted family.
    #[arg(long, value_parser = parse_positive)]
    alpha_w: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Task {
    /// Exponential growth rate of the geodesic counting function.
    Entropy,
    /// Topological pressure of a potential (requires --potential).
    Pressure,
    /// Orbit-counting ratios with a drift-toward-one verdict; weighted when
    /// --potential is given.
    PotCheck,
    /// Bounds on the bottom of the Laplacian spectrum from the growth rate
    /// and curvature pinching.
    Bounds,
    /// Critical exponent of the Poincaré series (requires --group and
    /// --radius).
    CriticalExponent,
    /// Meromorphic extension strip of a zeta family (requires --family and
    /// --rate).
    Strip,
    /// Cross-validate entropy, the critical exponent, and the selberg pole.
    Triangle,
}

impl Task {
    fn name(self) -> &'static str {
        match self {
            Task::Entropy => "entropy",
            Task::Pressure => "pressure",
            Task::PotCheck => "pot-check",
            Task::Bounds => "bounds",
            Task::CriticalExponent => "critical-exponent",
            Task::Strip => "strip",
            Task::Triangle => "triangle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Selberg,
    Weighted,
    Gn,
}

impl FamilyArg {
    fn name(self) -> &'static str {
        match self {
            FamilyArg::Selberg => "selberg",
            FamilyArg::Weighted => "weighted",
            FamilyArg::Gn => "gn",
        }
    }
}

#[derive(Args, Debug)]
struct ZetaArgs {
    /// Saved spectrum file.
    #[arg(long)]
    spectrum: PathBuf,
    /// Zeta family to evaluate.
    #[arg(long, value_enum, default_value_t = FamilyArg::Selberg)]
    family: FamilyArg,
    /// Real-part grid (inclusive endpoints).
    #[arg(long, value_name = "A:B:STEP", value_parser = parse_grid,
          allow_hyphen_values = true, required_unless_present = "locate_pole",
          conflicts_with = "locate_pole")]
    s_re: Option<GridSpec>,
    /// Imaginary-part grid (default: the real axis only).
    #[arg(long, value_name = "A:B:STEP", value_parser = parse_grid,
          allow_hyphen_values = true, conflicts_with = "locate_pole")]
    s_im: Option<GridSpec>,
    /// Bracket the divergence abscissa instead of evaluating a grid.
    #[arg(long)]
    locate_pole: bool,
    /// Lower end of the pole search interval.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    lo: f64,
    /// Upper end of the pole search interval.
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    hi: f64,
    /// Potential for the weighted family.
    #[arg(long, value_parser = parse_potential_arg)]
    potential: Option<PotentialSpec>,
    /// Group file (needed to integrate expression potentials).
    #[arg(long)]
    group: Option<PathBuf>,
    /// Required gap between re(s) and the estimated divergence abscissa.
    #[arg(long, default_value_t = DEFAULT_MARGIN, value_parser = parse_nonnegative)]
    margin: f64,
    /// Evaluate an uncertified spectrum; tail bounds then carry no
    /// completeness guarantee.
    #[arg(long)]
    force: bool,
    /// Output CSV path (default: CSV rows on stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Family file (JSON).
    #[arg(long)]
    family: PathBuf,
    /// Parameter grid (inclusive endpoints).
    #[arg(long, value_name = "A:B:STEP", value_parser = parse_grid,
          allow_hyphen_values = true)]
    alpha: GridSpec,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Override the family file's base enumeration cutoff.
    #[arg(long, value_parser = parse_positive)]
    t_base: Option<f64>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Group file (JSON).
    #[arg(long)]
    group: PathBuf,
}

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
enum CliError {
    #[error("group file {path}: {source}")]
    Group {
        path: PathBuf,
        #[source]
        source: SchottkyError,
    },
    #[error("spectrum file {path}: {source}")]
    Spectrum {
        path: PathBuf,
        #[source]
        source: SpectrumError,
    },
    #[error("family file {path}: {message}")]
    Family { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(
        "cutoff {requested} is beyond certification: achievable T_certified = {achievable:.6} \
         at word length {word_length}; pass --force to keep a partial spectrum"
    )]
    Uncertified { requested: f64, achievable: f64, word_length: u32 },
    #[error(
        "word budget exhausted after {visited} reduced words; raise --max-words or pass \
         --force to keep the partial, uncertified spectrum"
    )]
    Budget { visited: u64 },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Uncertified { .. } | CliError::Budget { .. } => 2,
            CliError::Thermo(ThermoError::NotCertified) => 2,
            CliError::Zeta(ZetaError::NotCertified) => 2,
            CliError::Spectral(SpectralError::NotCertified) => 2,
            CliError::Zeta(ZetaError::AbscissaTooClose { .. }) => 3,
            _ => 1,
        }
    }

    /// Extra stderr line for abscissa violations: where evaluation is safe.
    fn safe_region(&self) -> Option<String> {
        if let CliError::Zeta(ZetaError::AbscissaTooClose { abscissa, margin, .. }) = self {
            Some(format!("safe region: re(s) > {:.6}", abscissa + margin))
        } else {
            None
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

/// Parse the process arguments and run; returns the process exit code.
pub fn main_entry() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    run(cli)
}

/// Run a parsed invocation; returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    if let Some(workers) = cli.workers {
        // The pool can only be installed once per process; a second
        // installation (tests drive run() repeatedly) keeps the first size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers as usize).build_global();
    }
    let ctx = Ctx { quiet: cli.quiet, json: cli.json };
    let outcome = match cli.command {
        Command::Spectrum(args) => cmd_spectrum(&ctx, args),
        Command::Analyze(args) => cmd_analyze(&ctx, args),
        Command::Zeta(args) => cmd_zeta(&ctx, args),
        Command::Sweep(args) => cmd_sweep(&ctx, args),
        Command::Validate(args) => cmd_validate(&ctx, args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(region) = e.safe_region() {
                eprintln!("{region}");
            }
            e.exit_code()
        }
    }
}

struct Ctx {
    quiet: bool,
    json: bool,
}

impl Ctx {
    /// Progress note on stderr; silenced by --quiet and in JSON mode.
    fn note(&self, message: impl AsRef<str>) {
        if !self.quiet && !self.json {
            eprintln!("{}", message.as_ref());
        }
    }

    /// Result summary on stdout: prose normally, one JSON line with --json.
    fn emit(&self, prose: String, machine: serde_json::Value) {
        if self.json {
            println!("{machine}");
        } else {
            println!("{prose}");
        }
    }
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

fn cmd_spectrum(ctx: &Ctx, args: SpectrumArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let group = load_group(&args.group)?;
    let limits =
        ResourceLimits { max_word_length: args.max_word_length, max_words: args.max_words };

    // Certification is decidable from the certificate alone; refuse early
    // so a doomed run does not burn the word budget first.
    let cert = group
        .validate_ping_pong()
        .map_err(|e| CliError::Group { path: args.group.clone(), source: e })?;
    if cert.required_word_length(args.cutoff) > limits.max_word_length && !args.force {
        return Err(CliError::Uncertified {
            requested: args.cutoff,
            achievable: cert.t_certified(limits.max_word_length),
            word_length: limits.max_word_length,
        });
    }

    let cache_path = if args.no_cache { None } else { Some(cache_path_for(&group, args.cutoff)) };
    let mut cache_state = if args.no_cache { "off" } else { "miss" };
    let mut spectrum = None;
    if let Some(path) = cache_path.as_deref() {
        if path.exists() {
            match LengthSpectrum::load(path, Some(&group)) {
                Ok(s) if s.certified && s.cutoff == args.cutoff => {
                    ctx.note(format!("cache hit: {}", path.display()));
                    cache_state = "hit";
                    spectrum = Some(s);
                }
                // Digest mismatch, wrong cutoff, or corruption: recompute.
                _ => cache_state = "stale",
            }
        }
    }

    let spectrum = match spectrum {
        Some(s) => s,
        None => match enumerate_spectrum(&group, args.cutoff, &limits) {
            Ok(s) => s,
            Err(EnumerationError::ResourceExceeded { visited, partial }) => {
                if args.force {
                    ctx.note(format!(
                        "word budget exhausted after {visited} words; keeping the partial spectrum"
                    ));
                    *partial
                } else {
                    return Err(CliError::Budget { visited });
                }
            }
            Err(e) => return Err(e.into()),
        },
    };

    if !spectrum.certified && !args.force {
        return Err(CliError::Uncertified {
            requested: args.cutoff,
            achievable: spectrum.stats.t_certified,
            word_length: spectrum.stats.max_word_length,
        });
    }

    if spectrum.certified && cache_state != "hit" {
        if let Some(path) = cache_path.as_deref() {
            match write_cache(path, &spectrum) {
                Ok(()) => cache_state = "written",
                Err(e) => ctx.note(format!("cache write failed (continuing): {e}")),
            }
        }
    }

    spectrum
        .save(&args.out)
        .map_err(|e| CliError::Spectrum { path: args.out.clone(), source: e })?;
    let wall = started.elapsed().as_secs_f64();
    ctx.emit(
        format!(
            "spectrum: {} classes, certified = {}, T_certified = {:.6}, wall = {:.2}s",
            spectrum.len(),
            spectrum.certified,
            spectrum.stats.t_certified,
            wall
        ),
        json!({
            "classes": spectrum.len(),
            "certified": spectrum.certified,
            "t_certified": spectrum.stats.t_certified,
            "wall_seconds": wall,
            "out": args.out.display().to_string(),
            "cache": cache_state,
        }),
    );
    Ok(())
}

fn cache_dir() -> PathBuf {
    match std::env::var_os("ORBITZETA_CACHE_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => std::env::temp_dir().join("orbitzeta-cache"),
    }
}

/// Cache key: group digest plus the exact cutoff bits.
fn cache_path_for(group: &SchottkyGroup, cutoff: f64) -> PathBuf {
    cache_dir().join(format!("{}-{:016x}.spectrum", group.digest(), cutoff.to_bits()))
}

/// Atomic replace-on-write: save to a sibling temp file, then rename.
fn write_cache(path: &Path, spectrum: &LengthSpectrum) -> Result<(), String> {
    let dir = path.parent().ok_or_else(|| "cache path has no parent".to_string())?;
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    spectrum.save(&tmp).map_err(|e| e.to_string())?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        e.to_string()
    })
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn cmd_analyze(ctx: &Ctx, args: AnalyzeArgs) -> Result<(), CliError> {
    let group = match &args.group {
        Some(path) => Some(load_group(path)?),
        None => None,
    };
    let spectrum = match &args.spectrum {
        Some(path) => Some(load_spectrum(path, group.as_ref())?),
        None => None,
    };
    let need_spectrum = || {
        spectrum
            .as_ref()
            .ok_or_else(|| usage(format!("task {} requires --spectrum", args.task.name())))
    };

    match args.task {
        Task::Entropy => {
            let est = entropy(need_spectrum()?, args.force)?;
            write_report(
                &args.out,
                "h,uncertainty,points_used,window_lo,window_hi",
                &[vec![
                    Some(est.value),
                    Some(est.uncertainty),
                    Some(est.points_used as f64),
                    Some(est.window.0),
                    Some(est.window.1),
                ]],
            )?;
            ctx.emit(
                format!(
                    "entropy: h = {:.6} ± {:.6} ({} grid points on [{:.3}, {:.3}])",
                    est.value, est.uncertainty, est.points_used, est.window.0, est.window.1
                ),
                json!({
                    "task": "entropy",
                    "h": est.value,
                    "uncertainty": est.uncertainty,
                    "points_used": est.points_used,
                    "window": [est.window.0, est.window.1],
                }),
            );
        }
        Task::Pressure => {
            let spectrum = need_spectrum()?;
            let potential = args
                .potential
                .as_ref()
                .ok_or_else(|| usage("task pressure requires --potential"))?;
            let weights = weights_for(spectrum, group.as_ref(), potential)?;
            let est = pressure(spectrum, &weights, args.force)?;
            write_report(
                &args.out,
                "pressure,uncertainty,shells,negative_window",
                &[vec![
                    Some(est.value),
                    Some(est.uncertainty),
                    Some(est.shells as f64),
                    Some(if est.negative_window { 1.0 } else { 0.0 }),
                ]],
            )?;
            ctx.emit(
                format!(
                    "pressure: P[{}] = {:.6} ± {:.6} ({} shells{})",
                    potential,
                    est.value,
                    est.uncertainty,
                    est.shells,
                    if est.negative_window { ", decaying window" } else { "" }
                ),
                json!({
                    "task": "pressure",
                    "potential": potential.to_string(),
                    "pressure": est.value,
                    "uncertainty": est.uncertainty,
                    "shells": est.shells,
                    "negative_window": est.negative_window,
                }),
            );
        }
        Task::PotCheck => {
            let spectrum = need_spectrum()?;
            let (report, rate_label, rate, uncertainty, band) = match &args.potential {
                None => {
                    let h = entropy(spectrum, args.force)?;
                    // The ratio responds to the true growth rate, and the
                    // selberg divergence abscissa estimates it more directly
                    // than the finite-window counting fit; fall back to the
                    // fit when the pole search fails to bracket.
                    let (label, rate, uncertainty) = match locate_pole(
                        spectrum,
                        PoleFamily::Selberg,
                        0.25 * h.value,
                        h.value + 1.0,
                    ) {
                        Ok(pole) => ("selberg abscissa", pole.estimate, pole.uncertainty),
                        Err(_) => ("entropy h", h.value, h.uncertainty),
                    };
                    let report = prime_orbit_check(spectrum, rate)?;
                    (report, label, rate, uncertainty, COUNT_BAND)
                }
                Some(potential) => {
                    let weights = weights_for(spectrum, group.as_ref(), potential)?;
                    let p = pressure(spectrum, &weights, args.force)?;
                    let report = weighted_orbit_check(spectrum, &weights, p.value)?;
                    (report, "pressure P", p.value, p.uncertainty, WEIGHTED_COUNT_BAND)
                }
            };
            let rows: Vec<Vec<Option<f64>>> =
                report.rows.iter().map(|r| vec![Some(r.t), Some(r.ratio)]).collect();
            write_report(&args.out, "t,ratio", &rows)?;
            let in_band = report.final_ratio >= band.0 && report.final_ratio <= band.1;
            let pass = in_band && report.drifts_toward_one;
            ctx.emit(
                format!(
                    "pot-check: {rate_label} = {rate:.6} ± {uncertainty:.6}; final ratio = {:.6}; \
                     top-quarter deviation {:.4} vs {:.4} below\n\
                     verdict: {} (ratio in [{}, {}]: {}; deviations shrink toward the cutoff: {})",
                    report.final_ratio,
                    report.top_quarter_dev,
                    report.second_quarter_dev,
                    if pass { "pass" } else { "fail" },
                    band.0,
                    band.1,
                    yes_no(in_band),
                    yes_no(report.drifts_toward_one),
                ),
                json!({
                    "task": "pot-check",
                    "rate": rate,
                    "rate_uncertainty": uncertainty,
                    "final_ratio": report.final_ratio,
                    "top_quarter_dev": report.top_quarter_dev,
                    "second_quarter_dev": report.second_quarter_dev,
                    "band": [band.0, band.1],
                    "in_band": in_band,
                    "drifts_toward_one": report.drifts_toward_one,
                    "pass": pass,
                }),
            );
        }
        Task::Bounds => {
            let h = match args.rate {
                Some(rate) => rate,
                None => entropy(need_spectrum()?, args.force)?.value,
            };
            let n = args.n.unwrap_or(1);
            let a = args.a.unwrap_or(1.0);
            let b = args.b.unwrap_or(1.0);
            let bounds = lambda0_bounds(h, a, b, n)?;
            write_report(
                &args.out,
                "h,a,b,n,lower,upper,supercritical",
                &[vec![
                    Some(h),
                    Some(a),
                    Some(b),
                    Some(n as f64),
                    Some(bounds.lower),
                    Some(bounds.upper),
                    Some(if bounds.branch == SpectralBranch::Supercritical { 1.0 } else { 0.0 }),
                ]],
            )?;
            ctx.emit(
                format!(
                    "bounds: lambda0 ∈ [{:.12}, {:.12}] (h = {:.6}, n = {}, pinching [{}, {}], \
                     {} branch)",
                    bounds.lower,
                    bounds.upper,
                    h,
                    n,
                    a,
                    b,
                    branch_name(bounds.branch)
                ),
                json!({
                    "task": "bounds",
                    "h": h,
                    "n": n,
                    "a": a,
                    "b": b,
                    "lower": bounds.lower,
                    "upper": bounds.upper,
                    "branch": branch_name(bounds.branch),
                }),
            );
        }
        Task::CriticalExponent => {
            let group = group
                .as_ref()
                .ok_or_else(|| usage("task critical-exponent requires --group"))?;
            let radius =
                args.radius.ok_or_else(|| usage("task critical-exponent requires --radius"))?;
            let est = critical_exponent(group, radius, &ResourceLimits::default())?;
            let rows: Vec<Vec<Option<f64>>> =
                est.counts.iter().map(|&(r, c)| vec![Some(r), Some(c as f64)]).collect();
            write_report(&args.out, "radius,count", &rows)?;
            ctx.emit(
                format!(
                    "critical exponent: delta = {:.6} ± {:.6} (endpoint ratio {:.6}, \
                     {} orbit points within radius {})",
                    est.value,
                    est.uncertainty,
                    est.ratio_check,
                    est.counts.last().map(|&(_, c)| c).unwrap_or(0),
                    radius
                ),
                json!({
                    "task": "critical-exponent",
                    "delta": est.value,
                    "uncertainty": est.uncertainty,
                    "ratio_check": est.ratio_check,
                    "radius": radius,
                }),
            );
        }
        Task::Strip => {
            let family =
                args.family.ok_or_else(|| usage("task strip requires --family"))?;
            let rate = match args.rate {
                Some(rate) => rate,
                None => entropy(need_spectrum()?, args.force)?.value,
            };
            let a = args.a.unwrap_or(1.0);
            let b = args.b.unwrap_or(1.0);
            let strip_family = match family {
                FamilyArg::Selberg => StripFamily::Selberg,
                FamilyArg::Weighted => {
                    StripFamily::Weighted { alpha_w: args.alpha_w.unwrap_or(1.0) }
                }
                FamilyArg::Gn => StripFamily::Gn,
            };
            let strip = extension_strip(strip_family, rate, a, b)?;
            write_report(
                &args.out,
                "rate,a,b,alpha_eff,edge_lo,edge_hi",
                &[vec![
                    Some(rate),
                    Some(a),
                    Some(b),
                    Some(strip.alpha_eff),
                    Some(strip.edge.0),
                    Some(strip.edge.1),
                ]],
            )?;
            ctx.emit(
                format!(
                    "strip: {} family extends meromorphically to re(s) > {:.6} \
                     (edge interval [{:.6}, {:.6}] over pinching [{}, {}], alpha_eff = {:.3})",
                    family.name(),
                    strip.edge.1,
                    strip.edge.0,
                    strip.edge.1,
                    a,
                    b,
                    strip.alpha_eff
                ),
                json!({
                    "task": "strip",
                    "family": family.name(),
                    "rate": rate,
                    "a": a,
                    "b": b,
                    "alpha_eff": strip.alpha_eff,
                    "edge": [strip.edge.0, strip.edge.1],
                }),
            );
        }
        Task::Triangle => {
            let spectrum = need_spectrum()?;
            let group =
                group.as_ref().ok_or_else(|| usage("task triangle requires --group"))?;
            let radius =
                args.radius.ok_or_else(|| usage("task triangle requires --radius"))?;
            let h = entropy(spectrum, args.force)?;
            let delta = critical_exponent(group, radius, &ResourceLimits::default())?;
            let pole =
                locate_pole(spectrum, PoleFamily::Selberg, 0.25 * h.value, h.value + 1.0)?;
            let gap_delta = (h.value - delta.value).abs();
            let gap_pole = (h.value - pole.estimate).abs();
            let ok_delta = gap_delta <= TRIANGLE_TOL + h.uncertainty + delta.uncertainty;
            let ok_pole = gap_pole <= TRIANGLE_TOL + h.uncertainty + pole.uncertainty;
            let pass = ok_delta && ok_pole;
            write_report(
                &args.out,
                "h,h_uncertainty,delta,delta_uncertainty,pole,pole_uncertainty,max_gap",
                &[vec![
                    Some(h.value),
                    Some(h.uncertainty),
                    Some(delta.value),
                    Some(delta.uncertainty),
                    Some(pole.estimate),
                    Some(pole.uncertainty),
                    Some(gap_delta.max(gap_pole)),
                ]],
            )?;
            ctx.emit(
                format!(
                    "entropy h = {:.6} ± {:.6}\n\
                     critical exponent delta = {:.6} ± {:.6}\n\
                     selberg pole s* = {:.6} ± {:.6}\n\
                     verdict: {} (|h − delta| = {:.6}, |h − s*| = {:.6}, \
                     allowed {} + combined uncertainty)",
                    h.value,
                    h.uncertainty,
                    delta.value,
                    delta.uncertainty,
                    pole.estimate,
                    pole.uncertainty,
                    if pass { "consistent" } else { "inconsistent" },
                    gap_delta,
                    gap_pole,
                    TRIANGLE_TOL
                ),
                json!({
                    "task": "triangle",
                    "h": h.value,
                    "h_uncertainty": h.uncertainty,
                    "delta": delta.value,
                    "delta_uncertainty": delta.uncertainty,
                    "pole": pole.estimate,
                    "pole_uncertainty": pole.uncertainty,
                    "gap_delta": gap_delta,
                    "gap_pole": gap_pole,
                    "tolerance": TRIANGLE_TOL,
                    "consistent": pass,
                }),
            );
        }
    }
    Ok(())
}

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}

fn branch_name(branch: SpectralBranch) -> &'static str {
    match branch {
        SpectralBranch::Supercritical => "supercritical",
        SpectralBranch::Subcritical => "subcritical",
    }
}

/// Integrated potential per spectrum entry. Constant and length-proportional
/// potentials need no group; expression potentials are integrated along the
/// geodesic and require one.
fn weights_for(
    spectrum: &LengthSpectrum,
    group: Option<&SchottkyGroup>,
    potential: &PotentialSpec,
) -> Result<WeightTable, CliError> {
    match potential {
        PotentialSpec::Constant(c) => Ok(WeightTable::from_values(
            spectrum.entries().iter().map(|e| c * e.length).collect(),
        )),
        PotentialSpec::Sbr { coefficient } => {
            let n = spectrum.model_dim.boundary_dim() as f64;
            Ok(WeightTable::from_values(
                spectrum.entries().iter().map(|e| coefficient * n * e.length).collect(),
            ))
        }
        PotentialSpec::Expression(_) => {
            let group = group.ok_or_else(|| {
                usage("expression potentials require --group to integrate along geodesics")
            })?;
            Ok(WeightTable::compute(
                group,
                spectrum,
                potential,
                &QuadratureSettings::default(),
            )?)
        }
    }
}

// ---------------------------------------------------------------------------
// zeta
// ---------------------------------------------------------------------------

/// Header of the grid CSV written by the zeta subcommand.
pub const ZETA_HEADER: &str = "s_re,s_im,Z_re,Z_im,tail_bound";

fn cmd_zeta(ctx: &Ctx, args: ZetaArgs) -> Result<(), CliError> {
    let group = match &args.group {
        Some(path) => Some(load_group(path)?),
        None => None,
    };
    let spectrum = load_spectrum(&args.spectrum, group.as_ref())?;
    let opts = ZetaOptions { margin: args.margin, allow_uncertified: args.force };
    let weights = match args.family {
        FamilyArg::Weighted => {
            let potential = args
                .potential
                .as_ref()
                .ok_or_else(|| usage("--family weighted requires --potential"))?;
            Some(weights_for(&spectrum, group.as_ref(), potential)?)
        }
        _ => None,
    };

    if args.locate_pole {
        let family = match args.family {
            FamilyArg::Selberg => PoleFamily::Selberg,
            FamilyArg::Weighted => PoleFamily::Weighted(weights.as_ref().expect("checked above")),
            FamilyArg::Gn => PoleFamily::Gn,
        };
        let pole = locate_pole(&spectrum, family, args.lo, args.hi)?;
        ctx.emit(
            format!(
                "pole: {} family, bracket [{:.9}, {:.9}], estimate {:.6} ± {:.6}, \
                 cross-check {:.6}",
                args.family.name(),
                pole.bracket.0,
                pole.bracket.1,
                pole.estimate,
                pole.uncertainty,
                pole.cross_check
            ),
            json!({
                "family": args.family.name(),
                "bracket": [pole.bracket.0, pole.bracket.1],
                "estimate": pole.estimate,
                "uncertainty": pole.uncertainty,
                "cross_check": pole.cross_check,
            }),
        );
        return Ok(());
    }

    let re_values = args.s_re.expect("clap requires --s-re without --locate-pole").values();
    let im_values = args.s_im.map(|g| g.values()).unwrap_or_else(|| vec![0.0]);
    let mut rows = Vec::with_capacity(re_values.len() * im_values.len());
    let mut max_tail: f64 = 0.0;
    for &s_re in &re_values {
        for &s_im in &im_values {
            let s = Complex64::new(s_re, s_im);
            let eval = match args.family {
                FamilyArg::Selberg => selberg_zeta(&spectrum, s, &opts)?,
                FamilyArg::Weighted => {
                    weighted_zeta(&spectrum, weights.as_ref().expect("checked above"), s, &opts)?
                }
                FamilyArg::Gn => gn_zeta(&spectrum, s, &opts)?,
            };
            max_tail = max_tail.max(eval.tail_bound);
            rows.push(vec![
                Some(s_re),
                Some(s_im),
                Some(eval.value.re),
                Some(eval.value.im),
                Some(eval.tail_bound),
            ]);
        }
    }
    let text = render_csv(ZETA_HEADER, &rows);
    match &args.out {
        Some(path) => {
            write_text(path, &text)?;
            ctx.emit(
                format!(
                    "zeta: {} family, {} grid points, max tail bound {:.3e}, wrote {}",
                    args.family.name(),
                    rows.len(),
                    max_tail,
                    path.display()
                ),
                json!({
                    "family": args.family.name(),
                    "rows": rows.len(),
                    "max_tail_bound": max_tail,
                    "out": path.display().to_string(),
                }),
            );
        }
        None => {
            // Keep stdout parseable: rows only, summary as a note.
            print!("{text}");
            ctx.note(format!(
                "zeta: {} family, {} grid points, max tail bound {:.3e}",
                args.family.name(),
                rows.len(),
                max_tail
            ));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Header of the CSV written by the sweep subcommand.
pub const SWEEP_HEADER: &str = "alpha,h,uncertainty,dd1,dd2";

/// A one-parameter family of groups: a named template, the base group it
/// deforms, and the enumeration cutoff shared by every member.
#[derive(Deserialize)]
struct FamilyFile {
    family: String,
    base_group: serde_json::Value,
    t_base: f64,
    /// Generator the conjugate-translation family deforms (1-based).
    generator: Option<usize>,
}

fn cmd_sweep(ctx: &Ctx, args: SweepArgs) -> Result<(), CliError> {
    let family_error = |message: String| CliError::Family {
        path: args.family.clone(),
        message,
    };
    let text = fs::read_to_string(&args.family).map_err(|e| family_error(e.to_string()))?;
    let file: FamilyFile =
        serde_json::from_str(&text).map_err(|e| family_error(e.to_string()))?;
    let base = SchottkyGroup::from_json_str(&file.base_group.to_string())
        .map_err(|e| family_error(format!("base_group: {e}")))?;
    let t_base = args.t_base.unwrap_or(file.t_base);
    let grid = args.alpha.values();

    let result: SweepResult = match file.family.as_str() {
        "metric-scaling" => entropy_sweep(|a| metric_scaling(&base, a), &grid, t_base)?,
        "generator-power" => entropy_sweep(
            |a| generator_power_group(&base, a).map(FamilyPoint::from_group),
            &grid,
            t_base,
        )?,
        "conjugate-translation" => {
            let generator = file.generator.ok_or_else(|| {
                family_error("conjugate-translation requires a \"generator\" field".into())
            })?;
            if generator == 0 || generator > base.rank() {
                return Err(family_error(format!(
                    "generator {generator} out of range 1..={}",
                    base.rank()
                )));
            }
            entropy_sweep(
                |a| translation_group(&base, generator - 1, a).map(FamilyPoint::from_group),
                &grid,
                t_base,
            )?
        }
        "constant" => {
            entropy_sweep(|_| Ok(FamilyPoint::from_group(base.clone())), &grid, t_base)?
        }
        other => {
            return Err(family_error(format!(
                "unknown family {other:?}; expected metric-scaling, generator-power, \
                 conjugate-translation, or constant"
            )))
        }
    };

    write_text(&args.out, &render_csv(SWEEP_HEADER, &sweep_rows(&result)))?;
    if let Some(truncation) = &result.truncated {
        eprintln!(
            "warning: sweep truncated at alpha = {}: {}",
            truncation.alpha, truncation.reason
        );
    }
    let smooth = result.max_jump_ratio <= SWEEP_JUMP_THRESHOLD;
    ctx.emit(
        format!(
            "sweep: {} of {} points, smoothness: {} (max second-difference jump {:.2}× \
             uncertainty, threshold {}×), wrote {}",
            result.points.len(),
            grid.len(),
            if smooth { "ok" } else { "jump detected" },
            result.max_jump_ratio,
            SWEEP_JUMP_THRESHOLD,
            args.out.display()
        ),
        json!({
            "points": result.points.len(),
            "grid": grid.len(),
            "smooth": smooth,
            "max_jump_ratio": result.max_jump_ratio,
            "truncated": result.truncated.as_ref().map(|t| {
                json!({"alpha": t.alpha, "reason": t.reason})
            }),
            "out": args.out.display().to_string(),
        }),
    );
    Ok(())
}

/// CSV rows for a sweep: the forward differences sit on the row of their
/// left endpoint, so the last row has no dd1 and the last two no dd2.
fn sweep_rows(result: &SweepResult) -> Vec<Vec<Option<f64>>> {
    result
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            vec![
                Some(p.alpha),
                Some(p.h),
                Some(p.uncertainty),
                result.dd1.get(i).map(|d| d.0),
                result.dd2.get(i).map(|d| d.0),
            ]
        })
        .collect()
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

fn cmd_validate(ctx: &Ctx, args: ValidateArgs) -> Result<(), CliError> {
    let group = load_group(&args.group)?;
    let cert = group
        .validate_ping_pong()
        .map_err(|e| CliError::Group { path: args.group.clone(), source: e })?;
    let depth = ResourceLimits::default().max_word_length;
    ctx.emit(
        format!(
            "ping-pong: valid (rank {}, dim {})\n\
             certificate: kappa = {:.6}, additive constant = {:.6}, delta_min = {:.6}\n\
             T_certified = {:.3} at word length {}\n\
             digest: {}",
            group.rank(),
            group.dim().as_u8(),
            cert.kappa,
            cert.additive_constant,
            cert.delta_min,
            cert.t_certified(depth),
            depth,
            group.digest()
        ),
        json!({
            "valid": true,
            "rank": group.rank(),
            "model_dim": group.dim().as_u8(),
            "kappa": cert.kappa,
            "additive_constant": cert.additive_constant,
            "delta_min": cert.delta_min,
            "t_certified": cert.t_certified(depth),
            "word_length": depth,
            "digest": group.digest(),
        }),
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn load_group(path: &Path) -> Result<SchottkyGroup, CliError> {
    SchottkyGroup::from_path(path)
        .map_err(|e| CliError::Group { path: path.to_path_buf(), source: e })
}

fn load_spectrum(
    path: &Path,
    group: Option<&SchottkyGroup>,
) -> Result<LengthSpectrum, CliError> {
    LengthSpectrum::load(path, group)
        .map_err(|e| CliError::Spectrum { path: path.to_path_buf(), source: e })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::Write { path: path.to_path_buf(), source: e })
}

/// Write a CSV report when a path was given; otherwise do nothing (the
/// summary line already carries the scalar results).
fn write_report(
    out: &Option<PathBuf>,
    header: &str,
    rows: &[Vec<Option<f64>>],
) -> Result<(), CliError> {
    match out {
        Some(path) => write_text(path, &render_csv(header, rows)),
        None => Ok(()),
    }
}

/// Render numeric rows under a fixed header. Every value is written with 17
/// significant digits, so parsing the file recovers the exact bits; absent
/// cells stay empty.
pub fn render_csv(header: &str, rows: &[Vec<Option<f64>>]) -> String {
    let columns = header.split(',').count();
    let mut out = String::with_capacity(32 * columns * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), columns);
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            if let Some(value) = cell {
                let _ = write!(out, "{value:.16e}");
            }
        }
        out.push('\n');
    }
    out
}

/// Inverse of [`render_csv`]: checks the header and field counts, maps empty
/// fields to `None`.
pub fn parse_csv(text: &str, header: &str) -> Result<Vec<Vec<Option<f64>>>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(first) if first == header => {}
        other => {
            return Err(format!(
                "expected header {:?}, found {:?}",
                header,
                other.unwrap_or_default()
            ))
        }
    }
    let columns = header.split(',').count();
    let mut rows = Vec::new();
    for (index, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns {
            return Err(format!(
                "row {}: {} fields, expected {columns}",
                index + 2,
                fields.len()
            ));
        }
        let mut row = Vec::with_capacity(columns);
        for field in fields {
            if field.is_empty() {
                row.push(None);
            } else {
                let value = field
                    .parse::<f64>()
                    .map_err(|e| format!("row {}: {e}: {field:?}", index + 2))?;
                row.push(Some(value));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Argument parsers
// ---------------------------------------------------------------------------

/// An inclusive arithmetic grid `start:stop:step`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct GridSpec {
    start: f64,
    stop: f64,
    step: f64,
}

const GRID_SLACK: f64 = 1e-9;
const GRID_MAX_POINTS: f64 = 100_000.0;

impl GridSpec {
    fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + GRID_SLACK).floor() as usize;
        (0..=count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(format!("expected A:B:STEP, got {s:?}"));
        };
        let parse = |text: &str, what: &str| {
            text.parse::<f64>().map_err(|_| format!("grid {what} {text:?} is not a number"))
        };
        let start = parse(start, "start")?;
        let stop = parse(stop, "end")?;
        let step = parse(step, "step")?;
        if !start.is_finite() || !stop.is_finite() {
            return Err("grid endpoints must be finite".into());
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(format!("grid step must be positive and finite, got {step}"));
        }
        if stop < start {
            return Err(format!("grid end {stop} precedes its start {start}"));
        }
        if (stop - start) / step > GRID_MAX_POINTS {
            return Err(format!("grid would exceed {GRID_MAX_POINTS} points"));
        }
        Ok(GridSpec { start, stop, step })
    }
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    s.parse()
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let value = s.parse::<f64>().map_err(|e| e.to_string())?;
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(format!("must be positive and finite, got {value}"))
    }
}

fn parse_nonnegative(s: &str) -> Result<f64, String> {
    let value = s.parse::<f64>().map_err(|e| e.to_string())?;
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(format!("must be nonnegative and finite, got {value}"))
    }
}

fn parse_potential_arg(s: &str) -> Result<PotentialSpec, String> {
    s.parse::<PotentialSpec>().map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{SweepPoint, SweepTruncation};
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_internally_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn grid_spec_covers_both_endpoints() {
        let grid: GridSpec = "0:1:0.25".parse().unwrap();
        let values = grid.values();
        assert_eq!(values.len(), 5);
        assert_eq!(values[0], 0.0);
        assert_eq!(values[4], 1.0);

        // A span that is not an exact multiple of the step keeps the start
        // and stops short of the end.
        let ragged: GridSpec = "0:1:0.3".parse().unwrap();
        assert_eq!(ragged.values().len(), 4);

        let single: GridSpec = "2:2:1".parse().unwrap();
        assert_eq!(single.values(), vec![2.0]);

        let negative: GridSpec = "-1:0.5:0.5".parse().unwrap();
        assert_eq!(negative.values().len(), 4);
    }

    #[test]
    fn grid_spec_rejects_malformed_input() {
        for bad in [
            "1:0:0.5", // end precedes start
            "0:1:0",   // zero step
            "0:1:-1",  // negative step
            "0:1",     // missing step
            "0:1:2:3", // too many fields
            "x:1:1",   // not a number
            "0:inf:1", // infinite endpoint
            "nan:1:1", // NaN endpoint
            "0:1e9:1e-3", // too many points
        ] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn csv_round_trips_every_bit_including_empty_cells() {
        let rows = vec![
            vec![Some(0.1 + 0.2), Some(-0.0), Some(1.0 / 3.0)],
            vec![Some(f64::MIN_POSITIVE), None, Some(1.7976931348623157e308)],
            vec![Some(-42.5), Some(6.02214076e23), None],
        ];
        let text = render_csv("a,b,c", &rows);
        let parsed = parse_csv(&text, "a,b,c").unwrap();
        assert_eq!(parsed.len(), rows.len());
        for (row, back) in rows.iter().zip(&parsed) {
            for (cell, cell_back) in row.iter().zip(back) {
                match (cell, cell_back) {
                    (Some(x), Some(y)) => assert_eq!(x.to_bits(), y.to_bits()),
                    (None, None) => {}
                    other => panic!("cells diverged: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn csv_parser_rejects_wrong_shape() {
        assert!(parse_csv("x,y\n1.0\n", "x,y").is_err());
        assert!(parse_csv("x,z\n1.0,2.0\n", "x,y").is_err());
        assert!(parse_csv("x,y\n1.0,oops\n", "x,y").is_err());
        assert!(parse_csv("", "x,y").is_err());
    }

    #[test]
    fn sweep_rows_align_differences_with_their_left_endpoints() {
        let result = SweepResult {
            points: vec![
                SweepPoint { alpha: 0.0, h: 0.30, uncertainty: 0.01 },
                SweepPoint { alpha: 0.1, h: 0.27, uncertainty: 0.01 },
                SweepPoint { alpha: 0.2, h: 0.25, uncertainty: 0.01 },
            ],
            dd1: vec![(-0.3, 0.14), (-0.2, 0.14)],
            dd2: vec![(1.0, 2.0)],
            max_jump_ratio: 0.5,
            truncated: Some(SweepTruncation { alpha: 0.3, reason: "test".into() }),
        };
        let rows = sweep_rows(&result);
        let text = render_csv(SWEEP_HEADER, &rows);
        let parsed = parse_csv(&text, SWEEP_HEADER).unwrap();
        assert_eq!(parsed.len(), 3);
        assert_eq!(parsed[0][3], Some(-0.3));
        assert_eq!(parsed[0][4], Some(1.0));
        assert_eq!(parsed[1][4], None);
        assert_eq!(parsed[2][3], None);
        assert_eq!(parsed[2][4], None);
    }

    #[test]
    fn family_file_parses_and_validates() {
        let text = r#"{
            "family": "metric-scaling",
            "t_base": 22.0,
            "base_group": {"model_dim": 2, "generators": [], "disks": []}
        }"#;
        let file: FamilyFile = serde_json::from_str(text).unwrap();
        assert_eq!(file.family, "metric-scaling");
        assert_eq!(file.t_base, 22.0);
        assert!(file.generator.is_none());

        let with_generator = r#"{
            "family": "conjugate-translation",
            "t_base": 22.0,
            "generator": 2,
            "base_group": {}
        }"#;
        let file: FamilyFile = serde_json::from_str(with_generator).unwrap();
        assert_eq!(file.generator, Some(2));

        assert!(serde_json::from_str::<FamilyFile>("{\"family\": \"x\"}").is_err());
    }

    #[test]
    fn exit_codes_follow_the_contract() {
        let uncertified =
            CliError::Uncertified { requested: 10.0, achievable: 5.0, word_length: 8 };
        assert_eq!(uncertified.exit_code(), 2);
        assert_eq!(CliError::Budget { visited: 100 }.exit_code(), 2);
        assert_eq!(CliError::Thermo(ThermoError::NotCertified).exit_code(), 2);
        let close = CliError::Zeta(ZetaError::AbscissaTooClose {
            s_re: 0.3,
            abscissa: 0.31,
            margin: 0.1,
        });
        assert_eq!(close.exit_code(), 3);
        assert!(close.safe_region().unwrap().contains("0.41"));
        assert_eq!(usage("x").exit_code(), 1);
        let missing = CliError::Group {
            path: PathBuf::from("/nonexistent/g.json"),
            source: SchottkyError::Io(io::Error::from(io::ErrorKind::NotFound)),
        };
        assert_eq!(missing.exit_code(), 1);
        assert!(missing.to_string().contains("/nonexistent/g.json"));
    }

    #[test]
    fn conflicting_zeta_flags_are_rejected_at_parse_time() {
        let err = Cli::try_parse_from([
            "orbitzeta",
            "zeta",
            "--spectrum",
            "s.csv",
            "--locate-pole",
            "--s-re",
            "1:2:0.5",
        ]);
        assert!(err.is_err());

        // Grid mode without a grid is rejected too.
        let err = Cli::try_parse_from(["orbitzeta", "zeta", "--spectrum", "s.csv"]);
        assert!(err.is_err());

        // Nonpositive cutoffs never reach the run layer.
        let err = Cli::try_parse_from([
            "orbitzeta",
            "spectrum",
            "--group",
            "g.json",
            "--cutoff",
            "-3",
            "--out",
            "s.csv",
        ]);
        assert!(err.is_err());
    }

    #[test]
    fn cache_paths_separate_groups_and_cutoffs() {
        let group = crate::schottky::test_groups::reference_surface();
        let a = cache_path_for(&group, 10.0);
        let b = cache_path_for(&group, 12.0);
        assert_ne!(a, b);
        let name = a.file_name().unwrap().to_string_lossy().into_owned();
        assert!(name.starts_with(group.digest()));
    }
}
