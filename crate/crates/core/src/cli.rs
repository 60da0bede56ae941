//! The `monobox` command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 a monochromatic
//! configuration was found or a certificate was refuted.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num::Zero;
use rand::Rng;
use serde_json::{json, Value};

use crate::boundary::{boundary_curves, to_csv, to_svg, Window};
use crate::config::ConfigFile;
use crate::error::{Error, Result};
use crate::geometry::ComplexPoint;
use crate::harness::{
    adversarial_search, run_search, with_threads, AdversarialSpec, Coloring, Mode, TrialSpec,
};
use crate::nd_coloring::CompositeColoring;
use crate::net::{build_net, EpsMode, NetSpec};
use crate::permanent::{complex_power_identity_check, identity_check, SquareMatrix};
use crate::plane::plane_color;
use crate::rng::trial_rng;
use crate::scalar::{parse_rational, rat};
use crate::separation::{separation_certificate, LatticeCellSet};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "MONOBOX_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FOUND: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "monobox",
    version,
    about = "Colorings without monochromatic unit boxes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ColoringName {
    Plane25,
    Nd,
    Skeleton,
    Quadrant4,
    CoarseSlab,
    NoRotationNet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Color of a point of the plane under the 25-class coloring.
    Color2 {
        #[arg(long, value_name = "X,Y")]
        point: String,
    },
    /// Composite color of a point of R^n: digest, first entries, margins.
    Colorn {
        #[arg(long)]
        n: usize,
        #[arg(long, value_name = "X1,...,XN", allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "paper")]
        eps: String,
        #[arg(long, default_value_t = 8)]
        entries: usize,
    },
    /// Colors the vertices of a configuration file and reports a witness.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        coloring: Option<ColoringName>,
        #[arg(long, default_value = "paper")]
        eps: String,
    },
    /// Random or adversarial search for monochromatic configurations.
    Search {
        #[arg(long)]
        mode: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum)]
        coloring: Option<ColoringName>,
        #[arg(long, default_value = "paper")]
        eps: String,
        /// Slab windows for the coarse-slab control.
        #[arg(long, default_value_t = 1)]
        subdivisions: u32,
        #[arg(long)]
        adversarial: bool,
        #[arg(long, default_value_t = 1000)]
        restarts: u64,
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        #[arg(long, default_value_t = 200)]
        patience: u64,
        #[arg(long, value_name = "LO,HI")]
        aspect: Option<String>,
        #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
        center: Option<String>,
        #[arg(long)]
        margin_floor: Option<f64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Size and coverage statistics of a rotation net.
    Net {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "paper")]
        eps: String,
        /// Haar samples for the coverage check.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Checks the subset-sum/permanent identity and the complex power identity.
    Identity {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact lattice-cell separation certificate.
    Separation {
        #[arg(long, value_name = "P/Q")]
        scale: String,
        #[arg(long, value_name = "P/Q")]
        half_width: String,
        #[arg(long, value_name = "P/Q")]
        radius_sq: String,
    },
    /// Boundary curves of the 25 plane color classes as SVG or CSV.
    PlotBoundaries {
        #[arg(long, value_name = "X0,Y0,X1,Y1", allow_hyphen_values = true)]
        window: String,
        #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
        range: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn floats(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let v: f64 = t
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in {what}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite)
            }
        })
        .collect()
}

fn pair(s: &str, what: &str) -> Result<(f64, f64)> {
    match floats(s, what)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Parse(format!(
            "{what} needs two comma-separated numbers"
        ))),
    }
}

fn eps_spec(n: usize, eps: &str) -> Result<NetSpec> {
    match eps.parse::<EpsMode>() {
        Ok(mode) => Ok(NetSpec::with_mode(n, mode)),
        Err(_) => {
            let v: f64 = eps.parse().map_err(|_| {
                Error::Parse(format!("eps must be paper, sharp or a number, got {eps:?}"))
            })?;
            Ok(NetSpec::custom(n, v))
        }
    }
}

fn coloring(name: ColoringName, n: usize, eps: &str, subdivisions: u32) -> Result<Coloring> {
    Ok(match name {
        ColoringName::Plane25 => Coloring::Plane25,
        ColoringName::Nd => {
            Coloring::Composite(CompositeColoring::new(build_net(eps_spec(n, eps)?)?))
        }
        ColoringName::Skeleton => Coloring::skeleton(n as u32)?,
        ColoringName::Quadrant4 => Coloring::Quadrant4,
        ColoringName::CoarseSlab => Coloring::coarse_slab(n, subdivisions)?,
        ColoringName::NoRotationNet => Coloring::NoRotationNet { n },
    })
}

fn default_coloring(mode: Mode) -> ColoringName {
    match mode {
        Mode::Rect2d | Mode::Parallelogram2d => ColoringName::Plane25,
        Mode::BoxNd => ColoringName::Nd,
        Mode::Skeleton => ColoringName::Skeleton,
    }
}

fn env_threads() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&k| k > 0)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn color2(point: &str) -> Result<(i32, String)> {
    let (x, y) = pair(point, "--point")?;
    let r = plane_color(ComplexPoint::new(x, y));
    Ok((
        EXIT_OK,
        pretty(&json!({
            "point": [x, y],
            "color": [r.color.j, r.color.k],
            "index": r.color.index(),
            "margin": r.margin,
        })),
    ))
}

fn colorn(n: usize, point: &str, eps: &str, entries: usize) -> Result<(i32, String)> {
    let x = floats(point, "--point")?;
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let net = build_net(eps_spec(n, eps)?)?;
    let c = CompositeColoring::new(net);
    let color = c.color(&x);
    let prefix = color.prefix(entries);
    Ok((
        EXIT_OK,
        pretty(&json!({
            "point": x,
            "n": n,
            "eps": c.net().eps(),
            "mode": c.net().spec().mode,
            "m": c.net().size(),
            "digest": color.digest_hex(),
            "entries": prefix.iter().map(|r| r.index).collect::<Vec<_>>(),
            "margins": prefix.iter().map(|r| r.margin).collect::<Vec<_>>(),
        })),
    ))
}

fn check(path: &PathBuf, name: Option<ColoringName>, eps: &str) -> Result<(i32, String)> {
    let text = std::fs::read_to_string(path)?;
    let file = ConfigFile::from_json(&text)?;
    let cfg = file.validate()?;
    let n = cfg.dim();
    let name = name.unwrap_or(match &cfg {
        crate::config::Configuration::Skeleton(_) => ColoringName::Skeleton,
        _ if n == 2 && !matches!(cfg, crate::config::Configuration::Box(_)) => {
            ColoringName::Plane25
        }
        _ => ColoringName::Nd,
    });
    let n_for_coloring = match &cfg {
        crate::config::Configuration::Skeleton(s) => s.dim(),
        _ => n,
    };
    let col = coloring(name, n_for_coloring, eps, 1)?;
    let j = col.judge(&cfg)?;
    let points = cfg.points();
    let colors: Vec<String> = points.iter().map(|p| col.label(p)).collect();
    let out = json!({
        "coloring": col.name(),
        "config": file,
        "measure": cfg.measure(),
        "monochromatic": j.monochromatic,
        "vertices": points,
        "colors": colors,
        "witness_index": j.witness_index,
        "fast_path": j.fast_path,
        "min_margin": j.min_margin,
    });
    Ok((
        if j.monochromatic { EXIT_FOUND } else { EXIT_OK },
        pretty(&out),
    ))
}

#[allow(clippy::too_many_arguments)]
fn search(
    mode: &str,
    trials: u64,
    seed: u64,
    n: Option<usize>,
    name: Option<ColoringName>,
    eps: &str,
    subdivisions: u32,
    adversarial: Option<AdversarialSpec>,
    aspect: Option<&str>,
    center: Option<&str>,
    margin_floor: Option<f64>,
    threads: Option<usize>,
    format: OutputFormat,
) -> Result<(i32, String)> {
    let mode: Mode = mode.parse()?;
    let n = n.unwrap_or(2);
    let mut spec = TrialSpec::new(mode, n, trials, seed);
    if let Some(a) = aspect {
        spec.ranges.aspect = pair(a, "--aspect")?;
    }
    if let Some(c) = center {
        spec.ranges.center = pair(c, "--center")?;
    }
    if let Some(f) = margin_floor {
        spec.margin_floor = f;
    }
    let col = coloring(name.unwrap_or(default_coloring(mode)), n, eps, subdivisions)?;
    let threads = threads.or_else(env_threads);
    let report = with_threads(threads, || match &adversarial {
        Some(adv) => adversarial_search(&spec, adv, &col),
        None => run_search(&spec, &col),
    })??;
    let text = match format {
        OutputFormat::Json => report.to_json()? + "\n",
        OutputFormat::Csv => format!("{}\n{}", report.summary_csv(), report.witnesses_csv()),
    };
    Ok((
        if report.is_failure() {
            EXIT_FOUND
        } else {
            EXIT_OK
        },
        text,
    ))
}

fn net_stats(n: usize, eps: &str, samples: u64, seed: u64) -> Result<(i32, String)> {
    let net = build_net(eps_spec(n, eps)?)?;
    let cells = match n {
        2 => net.size(),
        _ => net.resolution().pow(3),
    };
    let stride = (cells / 100_000).max(1);
    let report = crate::net::certify_coverage(&net, samples, seed, stride);
    let out = json!({
        "n": n,
        "eps": net.eps(),
        "mode": net.spec().mode,
        "certified": net.spec().is_certified(),
        "m": net.size(),
        "resolution": net.resolution(),
        "corner_stride": stride,
        "coverage": report,
    });
    let code = if report.failures > 0 {
        EXIT_FOUND
    } else {
        EXIT_OK
    };
    Ok((code, pretty(&out)))
}

fn identity(n: usize, trials: u64, exact: bool, seed: u64) -> Result<(i32, String)> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let mut max_abs = 0.0_f64;
    let mut max_rel = 0.0_f64;
    let mut inexact = 0u64;
    let mut power_rel = 0.0_f64;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        if exact {
            let mut r = || rat(rng.random_range(-100..=100), rng.random_range(1..=10));
            let p: Vec<_> = (0..n).map(|_| r()).collect();
            let rows: Vec<Vec<_>> = (0..n).map(|_| (0..n).map(|_| r()).collect()).collect();
            let c = identity_check(&p, &SquareMatrix::from_rows(rows)?)?;
            if !c.is_exact() {
                inexact += 1;
            }
            if !(c.lhs.clone() - c.rhs.clone()).is_zero() {
                max_abs = max_abs.max(c.abs_error);
                max_rel = max_rel.max(c.rel_error);
            }
        } else {
            let p: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..=10.0)).collect();
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(-10.0..=10.0)).collect())
                .collect();
            let c = identity_check(&p, &SquareMatrix::from_rows(rows)?)?;
            max_abs = max_abs.max(c.abs_error);
            max_rel = max_rel.max(c.rel_error);
        }
        let (z, u) = power_instance(&mut rng, n);
        power_rel = power_rel.max(complex_power_identity_check(z, &u)?.rel_error);
    }
    let mut out = json!({
        "n": n,
        "trials": trials,
        "exact": exact,
        "max_abs_error": max_abs,
        "max_rel_error": max_rel,
        "power_identity_max_rel_error": power_rel,
    });
    if exact {
        out["inexact_instances"] = json!(inexact);
    }
    let refuted = if exact { inexact > 0 } else { max_rel > 1e-9 } || power_rel > 1e-8;
    Ok((if refuted { EXIT_FOUND } else { EXIT_OK }, pretty(&out)))
}

/// `z` in the unit square and edge vectors with `Π|u_j| = 1`.
pub fn power_instance<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (ComplexPoint, Vec<ComplexPoint>) {
    let z = ComplexPoint::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
    let logs: Vec<f64> = (0..n).map(|_| rng.random_range(-0.7..0.7)).collect();
    let mean = logs.iter().sum::<f64>() / n as f64;
    let u = logs
        .iter()
        .map(|l| {
            ComplexPoint::from_polar(
                (l - mean).exp(),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    (z, u)
}

fn separation(scale: &str, half_width: &str, radius_sq: &str) -> Result<(i32, String)> {
    let cells = LatticeCellSet::new(parse_rational(scale)?, parse_rational(half_width)?)?;
    let cert = separation_certificate(&cells, &parse_rational(radius_sq)?)?;
    let code = if cert.pass { EXIT_OK } else { EXIT_FOUND };
    Ok((code, serde_json::to_string_pretty(&cert)? + "\n"))
}

fn plot(window: &str, range: &str, out: &PathBuf, samples: usize) -> Result<(i32, String)> {
    let w = match floats(window, "--window")?.as_slice() {
        [x0, y0, x1, y1] => Window::new(*x0, *y0, *x1, *y1)?,
        _ => return Err(Error::Parse("--window needs X0,Y0,X1,Y1".into())),
    };
    let bounds: Vec<i64> = range
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer {t:?} in --range")))
        })
        .collect::<Result<_>>()?;
    let [a, b] = bounds[..] else {
        return Err(Error::Parse("--range needs A,B".into()));
    };
    let curves = boundary_curves(&w, a..=b, a..=b, samples);
    let text = match out.extension().and_then(|e| e.to_str()) {
        Some("svg") => to_svg(&curves, &w),
        Some("csv") => to_csv(&curves),
        _ => return Err(Error::Parse("--out must end in .svg or .csv".into())),
    };
    std::fs::write(out, text)?;
    Ok((
        EXIT_OK,
        pretty(&json!({ "out": out, "curves": curves.len() })),
    ))
}

pub fn execute(cli: Cli) -> Result<(i32, String)> {
    match cli.command {
        Command::Color2 { point } => color2(&point),
        Command::Colorn {
            n,
            point,
            eps,
            entries,
        } => colorn(n, &point, &eps, entries),
        Command::Check {
            config,
            coloring,
            eps,
        } => check(&config, coloring, &eps),
        Command::Search {
            mode,
            trials,
            seed,
            n,
            coloring,
            eps,
            subdivisions,
            adversarial,
            restarts,
            steps,
            patience,
            aspect,
            center,
            margin_floor,
            threads,
            format,
        } => search(
            &mode,
            trials,
            seed,
            n,
            coloring,
            &eps,
            subdivisions,
            adversarial.then_some(AdversarialSpec {
                restarts,
                steps,
                patience,
            }),
            aspect.as_deref(),
            center.as_deref(),
            margin_floor,
            threads,
            format,
        ),
        Command::Net {
            n,
            eps,
            samples,
            seed,
        } => net_stats(n, &eps, samples, seed),
        Command::Identity {
            n,
            trials,
            exact,
            seed,
        } => identity(n, trials, exact, seed),
        Command::Separation {
            scale,
            half_width,
            radius_sq,
        } => separation(&scale, &half_width, &radius_sq),
        Command::PlotBoundaries {
            window,
            range,
            out,
            samples,
        } => plot(&window, &range, &out, samples),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            Invocation {
                code,
                stdout,
                stderr,
            }
        }
        Ok(cli) => match execute(cli) {
            Ok((code, stdout)) => Invocation {
                code,
                stdout,
                stderr: String::new(),
            },
            Err(e) => Invocation {
                code: EXIT_ERROR,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            },
        },
    }
}
