use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{debug, info};
use serde::Serialize;

use rfgap_core::analysis::{analyze_bytes, KindFilter};
use rfgap_core::bochner::{
    grid_dump, polygon_extrema, q_min_bound_branch, region_bruteforce, remark_max_extrema,
    remark_q_max_bound, threshold_constants, GridExtrema, PolygonExtrema, Region,
};
use rfgap_core::curvature::sample_weyl;
use rfgap_core::io::{write_tensor_file, TensorFile};
use rfgap_core::kahler::{kahler_thresholds, sample_einstein_kahler};
use rfgap_core::rng::SampleStream;
use rfgap_core::verify::{run, Status, Suite, VerifyConfig};
use rfgap_core::{Error, ErrorClass, Tolerances, TOL_ENV};

const EXIT_VERIFY_FAILED: u8 = 1;

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Parse => 2,
        ErrorClass::Invariant => 3,
        ErrorClass::FrameTolerance => 4,
        ErrorClass::DegenerateRegion => 5,
        ErrorClass::FlatTensor => 6,
        ErrorClass::Io => 7,
        ErrorClass::NonConvergence => 8,
    }
}

#[derive(Parser)]
#[command(name = "rfgap", version, about = "Pointwise curvature gap certificates for Ricci-flat 4-manifolds and Kähler surfaces")]
struct Cli {
    /// Invariant tolerance for symmetry, Einstein and Ricci-flat checks.
    #[arg(long, global = true, env = TOL_ENV)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the pinching constants and their defining relations.
    Thresholds,
    /// Run the full certificate pipeline on a tensor file.
    Analyze {
        path: PathBuf,
        #[arg(long, default_value = "auto")]
        kind: KindFilter,
        /// Include per-stage wall-clock milliseconds (output is then not byte-stable).
        #[arg(long)]
        timings: bool,
        /// Largest accepted `|R_ijik|` in a Berger frame.
        #[arg(long)]
        berger_tol: Option<f64>,
        /// Largest accepted three-equal-index residual at a Kähler critical direction.
        #[arg(long)]
        critical_tol: Option<f64>,
    },
    /// Extrema of the quadratic q over the region at a given delta.
    Polygon {
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        /// Use the maximum-point region in (y, z).
        #[arg(long)]
        remark: bool,
        /// Include every grid point inside the region as [a, b, q].
        #[arg(long)]
        dump_grid: bool,
    },
    /// Write seeded random Ricci-flat tensors and a digest manifest.
    Sample {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SampleKind::Weyl)]
        kind: SampleKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a seeded property suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (0 = one per core). Never changes the output.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleKind {
    Weyl,
    Kahler,
}

enum Failure {
    Core(Error),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut tol = Tolerances::default();
    match positive("--tol", cli.tol) {
        Ok(Some(t)) => tol.invariant = t,
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(e.class()));
        }
    }
    match dispatch(cli.command, &tol) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            if let Error::BergerToleranceExceeded { report, .. } = &e {
                if let Ok(json) = serde_json::to_string_pretty(report) {
                    eprintln!("{json}");
                }
            }
            ExitCode::from(exit_code(e.class()))
        }
    }
}

fn positive(flag: &str, v: Option<f64>) -> Result<Option<f64>, Error> {
    match v {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(Error::Schema(format!("{flag} must be a positive number, got {t}"))),
        _ => Ok(v),
    }
}

fn dispatch(command: Command, tol: &Tolerances) -> Result<(), Failure> {
    match command {
        Command::Thresholds => emit(&thresholds()),
        Command::Analyze {
            path,
            kind,
            timings,
            berger_tol,
            critical_tol,
        } => {
            let tol = &Tolerances {
                berger: positive("--berger-tol", berger_tol)?.unwrap_or(tol.berger),
                critical: positive("--critical-tol", critical_tol)?.unwrap_or(tol.critical),
                ..*tol
            };
            let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
            info!("analyzing {} ({} bytes)", path.display(), bytes.len());
            let report = analyze_bytes(&bytes, kind, tol, timings)?;
            emit(&report)
        }
        Command::Polygon {
            delta,
            grid,
            remark,
            dump_grid,
        } => emit(&polygon(delta, grid, remark, dump_grid)?),
        Command::Sample { count, seed, kind, out } => emit(&sample(count, seed, kind, &out)?),
        Command::Verify {
            suite,
            samples,
            seed,
            jobs,
        } => {
            let cfg = VerifyConfig {
                jobs,
                tol: *tol,
                ..VerifyConfig::new(suite, samples, seed)
            };
            let result = run(&cfg)?;
            info!("{} failures", result.failures.len());
            emit(&result)?;
            match result.status {
                Status::Pass => Ok(()),
                Status::Fail => Err(Failure::Verify),
            }
        }
    }
}

fn emit<T: Serialize>(value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Invariant(format!("report serialization failed: {e}")))?;
    text.push('\n');
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| Error::io(Path::new("<stdout>"), e))?;
    Ok(())
}

#[derive(Serialize)]
struct Constant {
    name: &'static str,
    expression: &'static str,
    value: String,
    exact: f64,
    /// Polynomial with this constant as its positive root.
    relation: &'static str,
    relation_residual: f64,
}

#[derive(Serialize)]
struct Reciprocal {
    pair: [&'static str; 2],
    product: String,
    exact: bool,
}

#[derive(Serialize)]
struct ThresholdTable {
    constants: Vec<Constant>,
    reciprocals: Vec<Reciprocal>,
}

fn constant(name: &'static str, expression: &'static str, v: f64, relation: &'static str, poly: [f64; 3]) -> Constant {
    Constant {
        name,
        expression,
        value: format!("{v:.12}"),
        exact: v,
        relation,
        relation_residual: poly[0] * v * v + poly[1] * v + poly[2],
    }
}

fn thresholds() -> ThresholdTable {
    let t = threshold_constants();
    let k = kahler_thresholds();
    let constants = vec![
        constant("delta_min_point", "2(√6 - 2)", t.delta_star_min, "δ² + 8δ - 8 = 0", [1.0, 8.0, -8.0]),
        constant("c_riemannian", "(√6 + 2)/4", t.c_star_min, "8c² - 8c - 1 = 0", [8.0, -8.0, -1.0]),
        constant("delta_max_point", "√6 - 1", t.delta_star_max, "δ² + 2δ - 5 = 0", [1.0, 2.0, -5.0]),
        constant("c_riemannian_max_point", "(√6 + 1)/5", t.c_star_max, "5c² - 2c - 1 = 0", [5.0, -2.0, -1.0]),
        constant("c_kahler", "(1 + √3)/2", k.c_min_case, "2c² - 2c - 1 = 0", [2.0, -2.0, -1.0]),
        constant("c_kahler_max_point", "√3 - 1", k.c_max_case, "c² + 2c - 2 = 0", [1.0, 2.0, -2.0]),
    ];
    let pair = |a: &Constant, b: &Constant| {
        let p = a.exact * b.exact;
        Reciprocal {
            pair: [a.name, b.name],
            product: format!("{p:.12}"),
            exact: (p - 1.0).abs() <= 4.0 * f64::EPSILON,
        }
    };
    let reciprocals = vec![
        pair(&constants[0], &constants[1]),
        pair(&constants[2], &constants[3]),
        pair(&constants[4], &constants[5]),
    ];
    ThresholdTable { constants, reciprocals }
}

#[derive(Serialize)]
struct PolygonReport {
    #[serde(flatten)]
    exact: PolygonExtrema,
    grid: GridExtrema,
    /// Closed-form bound: lower bound on `q` for the minimum-point region,
    /// upper bound for the maximum-point region.
    bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    active_branch: Option<&'static str>,
    /// Largest difference between exact and grid extrema.
    agreement_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_points: Option<Vec<[f64; 3]>>,
}

fn polygon(delta: f64, n: usize, remark: bool, dump: bool) -> Result<PolygonReport, Error> {
    let region = if remark { Region::MaxPoint } else { Region::MinPoint };
    let exact = if remark {
        remark_max_extrema(delta)?
    } else {
        polygon_extrema(delta)?
    };
    debug!("{} candidates", exact.candidates.len());
    let grid = region_bruteforce(region, delta, n)?;
    let (bound, active_branch) = if remark {
        (remark_q_max_bound(delta), None)
    } else {
        let (b, branch) = q_min_bound_branch(delta);
        (b, Some(branch.formula()))
    };
    let agreement_gap = (grid.q_min - exact.q_min)
        .abs()
        .max((grid.q_max - exact.q_max).abs());
    let grid_points = if dump {
        Some(grid_dump(region, delta, n)?)
    } else {
        None
    };
    Ok(PolygonReport {
        exact,
        grid,
        bound,
        active_branch,
        agreement_gap,
        grid_points,
    })
}

#[derive(Serialize)]
struct ManifestEntry {
    file: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    kind: &'static str,
    seed: u64,
    count: usize,
    files: Vec<ManifestEntry>,
}

fn sample(count: usize, seed: u64, kind: SampleKind, out: &Path) -> Result<Manifest, Error> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut files = Vec::with_capacity(count);
    for i in 0..count {
        let tensor = match kind {
            SampleKind::Weyl => TensorFile::Weyl(sample_weyl(&mut SampleStream::new(seed, i as u64), 1.0)),
            SampleKind::Kahler => TensorFile::Kahler(sample_einstein_kahler(seed, i as u64, 1.0, 0.0)),
        };
        let file = format!("sample_{i:04}.json");
        let sha256 = write_tensor_file(&out.join(&file), &tensor)?;
        files.push(ManifestEntry { file, sha256 });
    }
    let manifest = Manifest {
        kind: match kind {
            SampleKind::Weyl => "weyl",
            SampleKind::Kahler => "kahler",
        },
        seed,
        count,
        files,
    };
    let path = out.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Invariant(format!("manifest serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}
