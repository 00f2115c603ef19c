mod contour;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use relmetric::domains::{DomainSpec, SupremumStrategy};
use relmetric::extended_space::{chordal_distance, spherical_diameter};
use relmetric::harness::{self, SharpnessCase, SuiteConfig, SuiteId, SweepConfig, VerificationReport};
use relmetric::metrics::{self, MetricRequest};
use relmetric::{Exponent, ExtendedPoint, MetricId};

/// Relative metrics on domains of the Möbius space.
///
/// Exit codes: 0 on success, 1 when an asserted inequality is violated,
/// 2 on invalid input or usage.
#[derive(Parser, Debug)]
#[command(name = "relmetric", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one metric at a pair of points.
    Compute {
        #[arg(long)]
        metric: MetricId,
        /// JSON domain file.
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: ExtendedPoint,
        #[arg(long, allow_hyphen_values = true)]
        y: ExtendedPoint,
        /// Exponent for delta_p and j_p: a positive real or "inf".
        #[arg(long)]
        p: Option<Exponent>,
        /// Base point for j_pointed.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<ExtendedPoint>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
        /// Print the value record as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite and write its report.
    Verify {
        #[arg(long)]
        suite: SuiteId,
        /// Number of random cases (suite default if omitted).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Exponent p of each (p, q) pair; repeat together with --q.
        #[arg(long)]
        p: Vec<Exponent>,
        #[arg(long)]
        q: Vec<Exponent>,
        /// Report path; the report goes to stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace a metric ratio along an extremal sequence.
    Sharpness {
        #[arg(long = "case")]
        case: SharpnessCase,
        #[arg(long, default_value_t = 25)]
        resolution: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        p: Option<Exponent>,
        #[arg(long)]
        q: Option<Exponent>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the level curve of a metric ball in the plane as CSV.
    Ball {
        #[arg(long)]
        metric: MetricId,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        center: ExtendedPoint,
        #[arg(long = "radius-value")]
        radius_value: f64,
        #[arg(long, default_value_t = 360)]
        resolution: usize,
        #[arg(long)]
        p: Option<Exponent>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<ExtendedPoint>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare rho and delta at a pair of points with two chordal lower bounds.
    Probe {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: ExtendedPoint,
        #[arg(long, allow_hyphen_values = true)]
        y: ExtendedPoint,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Auto,
    Exhaustive,
    GridRefine,
}

impl StrategyArg {
    fn resolve(self, g: &DomainSpec) -> SupremumStrategy {
        match self {
            StrategyArg::Auto => SupremumStrategy::default_for(g),
            StrategyArg::Exhaustive => SupremumStrategy::exhaustive(),
            StrategyArg::GridRefine => SupremumStrategy::grid_refine(g.dim()),
        }
    }
}

fn read_domain(path: &Path) -> Result<DomainSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read domain file {}", path.display()))?;
    DomainSpec::from_json(&text).with_context(|| format!("invalid domain file {}", path.display()))
}

/// Fails early if `path` cannot be created.
fn check_output(path: &Path) -> Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if !parent.is_dir() {
        bail!("output directory {} does not exist", parent.display());
    }
    if path.is_dir() {
        bail!("output path {} is a directory", path.display());
    }
    Ok(())
}

fn request(metric: MetricId, p: Option<Exponent>, b: Option<ExtendedPoint>) -> Result<MetricRequest> {
    match metric {
        MetricId::DeltaP | MetricId::JP if p.is_none() => bail!("metric {metric} needs --p"),
        MetricId::JPointed if b.is_none() => bail!("metric j_pointed needs --b"),
        _ => {}
    }
    Ok(MetricRequest { metric, p, b })
}

fn emit_report(report: &VerificationReport, out: Option<&Path>) -> Result<()> {
    let json = report.to_json();
    match out {
        Some(path) => fs::write(path, json + "\n").with_context(|| format!("cannot write {}", path.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn summarize(report: &VerificationReport) {
    eprintln!(
        "{}: {} cases, {} violations, worst margin {}, {} ms",
        report.suite,
        report.n_cases,
        report.n_violations,
        report.worst_margin.map_or("n/a".to_string(), |m| format!("{m:.3e}")),
        report.runtime_ms
    );
    for c in report.checks.iter().chain(&report.probes) {
        let tag = if c.asserted { "" } else { " (probe)" };
        eprintln!("  {}{tag}: {} / {} violated", c.name, c.violations, c.evaluations);
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Compute { metric, domain, x, y, p, b, strategy, json } => {
            let g = read_domain(&domain)?;
            let req = request(metric, p, b)?;
            let v = metrics::compute(&g, &req, &x, &y, &strategy.resolve(&g))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                println!("metric: {}", v.metric);
                if let Some(e) = v.exponent {
                    println!("p: {e}");
                }
                println!("value: {:.12}", v.value);
                let exactness = serde_json::to_value(v.exactness)?;
                println!("exactness: {}", exactness.as_str().unwrap_or_default());
                let w: Vec<String> = v.witnesses.iter().map(ToString::to_string).collect();
                println!("witnesses: {}", w.join("; "));
            }
            Ok(0)
        }
        Command::Verify { suite, samples, seed, dim, p, q, out } => {
            if let Some(path) = &out {
                check_output(path)?;
            }
            if p.len() != q.len() {
                bail!("--p and --q must be given the same number of times");
            }
            let mut cfg = SuiteConfig::new(suite, dim, seed);
            if let Some(s) = samples {
                cfg = cfg.with_samples(s);
            }
            if !p.is_empty() {
                cfg = cfg.with_pairs(p.into_iter().zip(q).collect());
            }
            cfg.validate()?;
            let report = harness::run_suite(&cfg)?;
            emit_report(&report, out.as_deref())?;
            summarize(&report);
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Sharpness { case, resolution, dim, p, q, out } => {
            if let Some(path) = &out {
                check_output(path)?;
            }
            let mut cfg = SweepConfig::new(case);
            cfg.resolution = resolution;
            cfg.dimension = dim;
            if let Some(p) = p {
                cfg.p = p;
            }
            if let Some(q) = q {
                cfg.q = q;
            }
            let report = harness::sharpness_sweep(&cfg)?;
            emit_report(&report, out.as_deref())?;
            if let Some(s) = &report.sweep {
                eprintln!(
                    "{}: {} -> {:.12} (limit {:.12}, estimate {:.12})",
                    case, s.ratio, s.final_ratio, s.claimed_limit, s.limit_estimate
                );
            }
            summarize(&report);
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Ball { metric, domain, center, radius_value, resolution, p, b, out } => {
            check_output(&out)?;
            let g = read_domain(&domain)?;
            if g.dim() != 2 {
                bail!("ball contours need a planar domain, got dimension {}", g.dim());
            }
            if !(radius_value > 0.0 && radius_value.is_finite()) {
                bail!("--radius-value must be a positive real");
            }
            if resolution == 0 {
                bail!("--resolution must be positive");
            }
            if center.is_infinite() {
                bail!("center must be a finite point");
            }
            if !g.contains(&center) {
                bail!("center {center} is not in the domain");
            }
            let req = request(metric, p, b)?;
            let rows = contour::trace_contour(
                &g,
                &req,
                &center,
                radius_value,
                resolution,
                &SupremumStrategy::default_for(&g),
            )?;
            fs::write(&out, contour::to_csv(&rows)).with_context(|| format!("cannot write {}", out.display()))?;
            let unbounded = rows.iter().filter(|r| r.point.is_none()).count();
            eprintln!("wrote {} rows to {} ({unbounded} unbounded)", rows.len(), out.display());
            Ok(0)
        }
        Command::Probe { domain, x, y, json } => {
            let g = read_domain(&domain)?;
            let strategy = SupremumStrategy::default_for(&g);
            let rho = metrics::rho(&g, &x, &y, &strategy)?.value;
            let delta = metrics::delta(&g, &x, &y, &strategy)?.value;
            let q_boundary = match g.boundary_points() {
                Some(pts) => spherical_diameter(pts)?,
                None => g.boundary_diameter()?,
            };
            let q_xy = chordal_distance(&x, &y)?;
            let s = q_boundary * q_xy;
            let rho_bound = (s * s).cosh() - 1.0;
            let delta_bound = s.exp_m1();
            if json {
                let v = serde_json::json!({
                    "rho": rho,
                    "delta": delta,
                    "q_boundary": q_boundary,
                    "q_xy": q_xy,
                    "rho_bound": rho_bound,
                    "delta_bound": delta_bound,
                    "rho_bound_violated": rho < rho_bound,
                    "delta_bound_violated": delta < delta_bound,
                });
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                println!("q(boundary) = {q_boundary:.12}, q(x,y) = {q_xy:.12}");
                println!("rho   = {rho:.12}  bound cosh((q q)^2) - 1 = {rho_bound:.12}  violated: {}", rho < rho_bound);
                println!(
                    "delta = {delta:.12}  bound exp(q q) - 1 = {delta_bound:.12}  violated: {}",
                    delta < delta_bound
                );
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
