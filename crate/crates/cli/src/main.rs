//! Command-line interface for the cavity-mode computations.
//!
//! Every subcommand writes exactly one JSON document (with a top-level
//! `schema_version`) to stdout; diagnostics go to stderr. Exit codes form a
//! stable contract: 0 pass, 1 verification/numeric failure, 2 usage error.
//!
//! Flags override an optional plain-text `key=value` config file
//! (`--config PATH`); file values override built-in defaults. Worker count
//! is controlled by `--threads N`; numeric output is independent of it.

use clap::{Args, Parser, Subcommand};
use emknot::cavity::{check_boundary, check_symmetries, ModeSpec};
use emknot::clebsch::{lemma_integrals, mode_starred_partners, verify_duality, ClebschPair};
use emknot::field::{ScalarField, SpaceTimePoint, Vec3, DEFAULT_FD_STEP};
use emknot::quadrature::{dump_grid_csv, GridSpec};
use emknot::quantize::{
    amplitude_for_photons, energy_analytic, energy_numeric, helicity, quantization_report,
    ReportTolerances,
};
use emknot::topology::{
    canonical_hopf_link, check_orbifold_symmetry, coplanar_unlinked, degree_d, degree_d_fullperiod,
    gauss_linking, t4_degree, TopologyError,
};
use emknot::{Curve3, DEFAULT_SPACE_POINTS, DEFAULT_TIME_POINTS};
use serde_json::{json, Value};
use std::collections::HashMap;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const SCHEMA_VERSION: u64 = 1;

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "emknot",
    version,
    about = "Cavity normal modes, Clebsch variables, helicity, linking and degree-based energy quantization",
    after_help = "All commands print one JSON document to stdout. \
                  Exit codes: 0 pass, 1 verification/numeric failure, 2 usage error."
)]
struct Cli {
    /// Plain key=value config file; flags take precedence over file values
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads for integration (default: all cores). Output does not
    /// depend on this value.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mode metadata: frequency, period and polarization triad
    Mode(ModeCmd),
    /// Run the verification suite (symmetry, boundary, Maxwell, lemma,
    /// duality, degree); exit 0 iff every check passes
    Verify(VerifyCmd),
    /// Quantization report tying the cell degree d to the energy E = (d/4)ω
    Quantize(QuantizeCmd),
    /// Gauss linking number of two closed curves (CSV files or built-in demos)
    Linking(LinkingCmd),
    /// Sample a field on a grid and write CSV (x,y,z,t,value)
    Dump(DumpCmd),
    /// Cavity energy: closed form vs quadrature
    Energy(EnergyCmd),
    /// Electromagnetic helicity ½∫(A·B + C·E)
    Helicity(HelicityCmd),
    /// Fundamental-cell degree d, photon number d/4, full-period variants
    Degree(DegreeCmd),
}

#[derive(Args, Clone)]
struct ModeOpts {
    /// Wave triple, e.g. 1,1,1 (every component >= 1)
    #[arg(long, value_name = "K1,K2,K3")]
    k: Option<String>,
    /// Mode amplitude in natural units (>= 0)
    #[arg(long)]
    amplitude: Option<f64>,
    /// Polarization seed: x, y, z, or a comma triple
    #[arg(long, value_name = "SEED")]
    pol: Option<String>,
}

#[derive(Args, Clone)]
struct GridOpts {
    /// Spatial quadrature points per axis
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Time quadrature points
    #[arg(long = "time-grid", value_name = "M")]
    time_grid: Option<usize>,
    /// Relative tolerance for numeric identities
    #[arg(long = "tol-rel", value_name = "X")]
    tol_rel: Option<f64>,
}

#[derive(Args)]
struct ModeCmd {
    #[command(flatten)]
    mode: ModeOpts,
}

#[derive(Args)]
struct VerifyCmd {
    #[command(flatten)]
    mode: ModeOpts,
    #[command(flatten)]
    grid: GridOpts,
}

#[derive(Args)]
struct QuantizeCmd {
    #[command(flatten)]
    mode: ModeOpts,
    #[command(flatten)]
    grid: GridOpts,
    /// Target photon number; the amplitude is derived from it
    /// (mutually exclusive with --amplitude)
    #[arg(long)]
    photons: Option<f64>,
}

#[derive(Args)]
struct LinkingCmd {
    /// First curve as CSV (x,y,z rows, `# closed=true` header)
    #[arg(long, value_name = "FILE")]
    curve1: Option<PathBuf>,
    /// Second curve as CSV
    #[arg(long, value_name = "FILE")]
    curve2: Option<PathBuf>,
    /// Built-in pair: hopf-link | unlinked
    #[arg(long, value_name = "NAME", conflicts_with_all = ["curve1", "curve2"])]
    demo: Option<String>,
    /// Vertices per demo curve
    #[arg(long, default_value_t = 512)]
    demo_points: usize,
}

#[derive(Args)]
struct DumpCmd {
    #[command(flatten)]
    mode: ModeOpts,
    #[command(flatten)]
    grid: GridOpts,
    /// Field to sample: E | B | Estar | Bstar | energy-density.
    /// Vector fields dump their magnitude.
    #[arg(long, value_name = "FIELD")]
    field: String,
    /// Evaluation time
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct EnergyCmd {
    #[command(flatten)]
    mode: ModeOpts,
    #[command(flatten)]
    grid: GridOpts,
    /// Evaluation time
    #[arg(long, default_value_t = 0.0)]
    t: f64,
}

#[derive(Args)]
struct HelicityCmd {
    #[command(flatten)]
    mode: ModeOpts,
    #[command(flatten)]
    grid: GridOpts,
    /// Evaluation time
    #[arg(long, default_value_t = 0.0)]
    t: f64,
}

#[derive(Args)]
struct DegreeCmd {
    #[command(flatten)]
    mode: ModeOpts,
    #[command(flatten)]
    grid: GridOpts,
    /// Skip the (slower) full-period signed/absolute integrals
    #[arg(long)]
    skip_full_period: bool,
}

/// A usage problem: message to stderr, exit code 2.
struct UsageError(String);

impl<T: std::fmt::Display> From<T> for UsageError {
    fn from(e: T) -> Self {
        UsageError(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// key=value file with # comments; later entries win.
fn load_config(path: Option<&Path>) -> Result<HashMap<String, String>, UsageError> {
    let mut map = HashMap::new();
    let Some(path) = path else {
        return Ok(map);
    };
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(usage(format!(
                "config {} line {}: expected key=value",
                path.display(),
                i + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Resolved settings: flag > config file > default.
struct Settings {
    cfg: HashMap<String, String>,
}

impl Settings {
    fn lookup<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>, UsageError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key {key}={raw}: {e}"))),
        }
    }

    fn mode(&self, opts: &ModeOpts) -> Result<ModeSpec, UsageError> {
        let k_raw = self
            .lookup(opts.k.clone(), "k")?
            .ok_or_else(|| usage("missing --k (or `k` in the config file)"))?;
        let k = parse_triple_i64(&k_raw)?;
        let amplitude = self.lookup(opts.amplitude, "amplitude")?.unwrap_or(1.0);
        let pol = self.lookup(opts.pol.clone(), "pol")?;
        let mode = match pol.as_deref() {
            None => ModeSpec::new(k, amplitude),
            Some(seed) => ModeSpec::with_polarization(k, amplitude, parse_pol(seed)?),
        };
        mode.map_err(|e| usage(e.to_string()))
    }

    fn grids(&self, opts: &GridOpts, default_tol: f64) -> Result<(usize, usize, f64), UsageError> {
        let grid = self
            .lookup(opts.grid, "grid")?
            .unwrap_or(DEFAULT_SPACE_POINTS);
        let time_grid = self
            .lookup(opts.time_grid, "time-grid")?
            .unwrap_or(DEFAULT_TIME_POINTS);
        let tol_rel = self.lookup(opts.tol_rel, "tol-rel")?.unwrap_or(default_tol);
        Ok((grid, time_grid, tol_rel))
    }
}

fn parse_triple_i64(raw: &str) -> Result<[i64; 3], UsageError> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 3 {
        return Err(usage(format!(
            "expected three comma-separated integers, got {raw:?}"
        )));
    }
    let mut k = [0i64; 3];
    for (i, p) in parts.iter().enumerate() {
        k[i] = p
            .trim()
            .parse()
            .map_err(|e| usage(format!("bad wave component {p:?}: {e}")))?;
    }
    Ok(k)
}

fn parse_pol(raw: &str) -> Result<Vec3, UsageError> {
    match raw {
        "x" => Ok(Vec3::x()),
        "y" => Ok(Vec3::y()),
        "z" => Ok(Vec3::z()),
        triple => {
            let parts: Vec<&str> = triple.split(',').collect();
            if parts.len() != 3 {
                return Err(usage(format!(
                    "polarization seed must be x, y, z or a comma triple, got {raw:?}"
                )));
            }
            let mut v = [0.0f64; 3];
            for (i, p) in parts.iter().enumerate() {
                v[i] = p
                    .trim()
                    .parse()
                    .map_err(|e| usage(format!("bad seed component {p:?}: {e}")))?;
            }
            Ok(Vec3::new(v[0], v[1], v[2]))
        }
    }
}

fn print_json(doc: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(doc).expect("serializable")
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    };
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<u8, UsageError> {
    let settings = Settings {
        cfg: load_config(cli.config.as_deref())?,
    };
    let threads = settings.lookup(cli.threads, "threads")?;
    match threads {
        None => dispatch(&cli.command, &settings),
        Some(0) => Err(usage("--threads must be >= 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| usage(format!("cannot build thread pool: {e}")))?;
            pool.install(|| dispatch(&cli.command, &settings))
        }
    }
}

fn dispatch(command: &Command, settings: &Settings) -> Result<u8, UsageError> {
    match command {
        Command::Mode(args) => cmd_mode(args, settings),
        Command::Verify(args) => cmd_verify(args, settings),
        Command::Quantize(args) => cmd_quantize(args, settings),
        Command::Linking(args) => cmd_linking(args),
        Command::Dump(args) => cmd_dump(args, settings),
        Command::Energy(args) => cmd_energy(args, settings),
        Command::Helicity(args) => cmd_helicity(args, settings),
        Command::Degree(args) => cmd_degree(args, settings),
    }
}

fn cmd_mode(args: &ModeCmd, settings: &Settings) -> Result<u8, UsageError> {
    let mode = settings.mode(&args.mode)?;
    print_json(&json!({
        "schema_version": SCHEMA_VERSION,
        "k": mode.k,
        "amplitude": mode.amplitude,
        "omega": mode.omega,
        "tau": mode.tau,
        "e1": mode.e1,
        "e2": mode.e2,
    }));
    Ok(EXIT_PASS)
}

fn cmd_energy(args: &EnergyCmd, settings: &Settings) -> Result<u8, UsageError> {
    let mode = settings.mode(&args.mode)?;
    let (grid, _, tol_rel) = settings.grids(&args.grid, 1e-9)?;
    let analytic = energy_analytic(&mode);
    let numeric = energy_numeric(&mode, args.t, grid).map_err(|e| usage(e.to_string()))?;
    let rel_diff = if analytic > 0.0 {
        (numeric.value - analytic).abs() / analytic
    } else {
        numeric.value.abs()
    };
    let pass = rel_diff < tol_rel;
    print_json(&json!({
        "schema_version": SCHEMA_VERSION,
        "k": mode.k,
        "amplitude": mode.amplitude,
        "omega": mode.omega,
        "t": args.t,
        "energy_analytic": analytic,
        "energy_numeric": numeric.value,
        "err_estimate": numeric.err_estimate,
        "rel_diff": rel_diff,
        "tol_rel": tol_rel,
        "grid": grid,
        "pass": pass,
    }));
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_helicity(args: &HelicityCmd, settings: &Settings) -> Result<u8, UsageError> {
    let mode = settings.mode(&args.mode)?;
    let (grid, _, _) = settings.grids(&args.grid, 1e-9)?;
    let h = helicity(&mode, args.t, grid).map_err(|e| usage(e.to_string()))?;
    let threshold = 1e-10;
    let pass = h.value.abs() < threshold;
    print_json(&json!({
        "schema_version": SCHEMA_VERSION,
        "k": mode.k,
        "amplitude": mode.amplitude,
        "t": args.t,
        "helicity": h.value,
        "err_estimate": h.err_estimate,
        "threshold": threshold,
        "grid": grid,
        "pass": pass,
    }));
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_degree(args: &DegreeCmd, settings: &Settings) -> Result<u8, UsageError> {
    let mode = settings.mode(&args.mode)?;
    let (grid, time_grid, tol) = settings.grids(&args.grid, 1e-6)?;
    let result = degree_d(&mode, grid, time_grid).map_err(|e| usage(e.to_string()))?;
    let estimate = emknot::topology::DegreeEstimate::from_raw(result.d);
    let residual = (result.d - 4.0 * energy_analytic(&mode) / mode.omega).abs();
    let pass = residual < tol;

    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "k": mode.k,
        "amplitude": mode.amplitude,
        "omega": mode.omega,
        "d_raw": result.d,
        "d_near_integer": estimate.near_integer,
        "photon_n": result.photon_n,
        "err_estimate": result.err_estimate,
        "residual": residual,
        "tolerance": tol,
        "grid": grid,
        "time_grid": time_grid,
        "pass": pass,
    });
    if estimate.near_integer {
        doc["d_rounded"] = json!(estimate.rounded);
        doc["d_mod4"] = json!(estimate.rounded.rem_euclid(4));
    }
    if !args.skip_full_period {
        let signed =
            degree_d_fullperiod(&mode, grid, time_grid, false).map_err(|e| usage(e.to_string()))?;
        let absolute =
            degree_d_fullperiod(&mode, grid, time_grid, true).map_err(|e| usage(e.to_string()))?;
        doc["full_period_signed"] = json!(signed);
        doc["full_period_absolute"] = json!(absolute);
    }
    print_json(&doc);
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_quantize(args: &QuantizeCmd, settings: &Settings) -> Result<u8, UsageError> {
    // --amplitude and --photons are mutually exclusive; config values are
    // consulted only when neither flag is given
    let (amp_flag, photons_flag) = (args.mode.amplitude, args.photons);
    if amp_flag.is_some() && photons_flag.is_some() {
        return Err(usage("--amplitude and --photons are mutually exclusive"));
    }
    let (amplitude, photons) = if amp_flag.is_none() && photons_flag.is_none() {
        (
            settings.lookup(None, "amplitude")?,
            settings.lookup(None, "photons")?,
        )
    } else {
        (amp_flag, photons_flag)
    };
    if amplitude.is_some() && photons.is_some() {
        return Err(usage("config file sets both amplitude and photons"));
    }
    if amplitude.is_none() && photons.is_none() {
        return Err(usage("one of --amplitude or --photons is required"));
    }

    let k_raw = settings
        .lookup(args.mode.k.clone(), "k")?
        .ok_or_else(|| usage("missing --k (or `k` in the config file)"))?;
    let k = parse_triple_i64(&k_raw)?;
    let amplitude = match photons {
        Some(n) => amplitude_for_photons(n, k).map_err(|e| usage(e.to_string()))?,
        None => amplitude.unwrap(),
    };
    let mode = ModeSpec::new(k, amplitude).map_err(|e| usage(e.to_string()))?;
    let (grid, time_grid, tol_rel) = settings.grids(&args.grid, 1e-6)?;

    let tolerances = ReportTolerances {
        residual: tol_rel,
        ..ReportTolerances::default()
    };
    let report = quantization_report(&mode, grid, time_grid, tolerances)
        .map_err(|e| usage(e.to_string()))?;
    let pass = report.pass;
    let mut doc = serde_json::to_value(&report).expect("serializable");
    doc["schema_version"] = json!(SCHEMA_VERSION);
    print_json(&doc);
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

fn load_curve(path: &Path) -> Result<Curve3, UsageError> {
    let file = fs::File::open(path)
        .map_err(|e| usage(format!("cannot open curve {}: {e}", path.display())))?;
    Curve3::from_csv(BufReader::new(file))
        .map_err(|e| usage(format!("curve {}: {e}", path.display())))
}

fn cmd_linking(args: &LinkingCmd) -> Result<u8, UsageError> {
    let (c1, c2, source) = match &args.demo {
        Some(name) => match name.as_str() {
            "hopf-link" => {
                let (a, b) = canonical_hopf_link(args.demo_points);
                (a, b, json!({ "demo": "hopf-link" }))
            }
            "unlinked" => {
                let (a, b) = coplanar_unlinked(args.demo_points);
                (a, b, json!({ "demo": "unlinked" }))
            }
            other => {
                return Err(usage(format!(
                    "unknown demo {other:?} (hopf-link | unlinked)"
                )))
            }
        },
        None => {
            let (Some(p1), Some(p2)) = (&args.curve1, &args.curve2) else {
                return Err(usage("provide --curve1 and --curve2, or --demo"));
            };
            let c1 = load_curve(p1)?;
            let c2 = load_curve(p2)?;
            (
                c1,
                c2,
                json!({ "curve1": p1.display().to_string(), "curve2": p2.display().to_string() }),
            )
        }
    };
    if !c1.closed {
        return Err(usage(format!(
            "first curve is open (closure gap {:.3e})",
            c1.closure_gap
        )));
    }
    if !c2.closed {
        return Err(usage(format!(
            "second curve is open (closure gap {:.3e})",
            c2.closure_gap
        )));
    }
    match gauss_linking(&c1, &c2) {
        Ok(l) => {
            print_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "source": source,
                "raw": l.raw,
                "rounded": l.rounded,
                "near_integer": l.near_integer,
            }));
            Ok(EXIT_PASS)
        }
        Err(TopologyError::CurvesIntersect { min_distance }) => {
            print_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "source": source,
                "error": "CurvesIntersect",
                "min_distance": min_distance,
            }));
            Ok(EXIT_FAIL)
        }
        Err(e) => Err(usage(e.to_string())),
    }
}

fn cmd_dump(args: &DumpCmd, settings: &Settings) -> Result<u8, UsageError> {
    let mode = settings.mode(&args.mode)?;
    let (grid_points, _, _) = settings.grids(&args.grid, 1e-9)?;
    let grid = GridSpec::cavity(grid_points);
    // starred partners use a fixed, amplitude-scaled gradient shift so the
    // output is fully determined by the flags
    let star_shift = 0.5 * mode.omega * mode.amplitude;
    let scalar: Box<dyn Fn(&SpaceTimePoint) -> f64> = match args.field.to_lowercase().as_str() {
        "e" => Box::new(move |p| mode.e_at(p).norm()),
        "b" => Box::new(move |p| mode.b_at(p).norm()),
        "estar" => {
            let (e_star, _) = mode_starred_partners(&mode, star_shift, star_shift);
            Box::new(move |p| e_star.eval(p).norm())
        }
        "bstar" => {
            let (_, b_star) = mode_starred_partners(&mode, star_shift, star_shift);
            Box::new(move |p| b_star.eval(p).norm())
        }
        "energy-density" => {
            Box::new(move |p| (mode.e_at(p).norm_squared() + mode.b_at(p).norm_squared()) / 2.0)
        }
        other => {
            return Err(usage(format!(
                "unknown field {other:?} (E | B | Estar | Bstar | energy-density)"
            )))
        }
    };

    fs::create_dir_all(&args.out)
        .map_err(|e| usage(format!("cannot create {}: {e}", args.out.display())))?;
    let file_name = format!(
        "{}_k{}-{}-{}.csv",
        args.field.to_lowercase(),
        mode.k[0],
        mode.k[1],
        mode.k[2]
    );
    let path = args.out.join(&file_name);
    let file = fs::File::create(&path)
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    let mut writer = std::io::BufWriter::new(file);
    let rows = dump_grid_csv(&|p| scalar(p), &grid, args.t, &mut writer)
        .map_err(|e| usage(format!("write {}: {e}", path.display())))?;
    writer
        .flush()
        .map_err(|e| usage(format!("flush {}: {e}", path.display())))?;

    print_json(&json!({
        "schema_version": SCHEMA_VERSION,
        "k": mode.k,
        "amplitude": mode.amplitude,
        "field": args.field,
        "t": args.t,
        "file": path.display().to_string(),
        "rows": rows,
        "grid": grid_points,
    }));
    Ok(EXIT_PASS)
}

/// Deterministic low-discrepancy interior sample points for the
/// finite-difference checks (no shared state with the seeded samplers in
/// the library).
fn lattice_points(n: usize, tau: f64) -> Vec<SpaceTimePoint> {
    let frac = |x: f64| x - x.floor();
    (0..n)
        .map(|i| {
            let u = i as f64;
            SpaceTimePoint::new(
                0.2 + 2.7 * frac(0.618_033_988_7 * u + 0.13),
                0.2 + 2.7 * frac(0.414_213_562_4 * u + 0.41),
                0.2 + 2.7 * frac(0.732_050_807_6 * u + 0.77),
                tau * frac(0.267_949_192_4 * u + 0.05),
            )
        })
        .collect()
}

struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.value < self.threshold
    }
    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "max_violation": self.value,
            "threshold": self.threshold,
            "pass": self.pass(),
        })
    }
}

fn cmd_verify(args: &VerifyCmd, settings: &Settings) -> Result<u8, UsageError> {
    let mode = settings.mode(&args.mode)?;
    let (grid, time_grid, tol_rel) = settings.grids(&args.grid, 1e-9)?;
    let quad = |e: emknot::quadrature::QuadError| usage(e.to_string());
    let mut checks: Vec<Check> = Vec::new();

    let sym = check_symmetries(&mode, 1000);
    checks.push(Check {
        name: "symmetry_relations",
        value: sym.max_violation,
        threshold: 1e-12,
    });

    let boundary = check_boundary(&mode, 1000);
    checks.push(Check {
        name: "boundary_conditions",
        value: boundary.max_tangential_e.max(boundary.max_normal_b),
        threshold: 1e-12,
    });

    let e = mode.e_field();
    let b = mode.b_field();
    let a = mode.a_field();
    let c = mode.c_field();
    let h = DEFAULT_FD_STEP;
    let mut maxwell = 0.0f64;
    let mut potentials = 0.0f64;
    let mut radiation = 0.0f64;
    for pt in lattice_points(20, mode.tau) {
        maxwell = maxwell
            .max((e.curl_fd(&pt, h) + b.dt_fd(&pt, h)).norm())
            .max((b.curl_fd(&pt, h) - e.dt_fd(&pt, h)).norm())
            .max(e.divergence_fd(&pt, h).abs())
            .max(b.divergence_fd(&pt, h).abs());
        potentials = potentials
            .max((a.curl_fd(&pt, h) - b.eval(&pt)).norm())
            .max((a.dt_fd(&pt, h) + e.eval(&pt)).norm())
            .max((c.curl_fd(&pt, h) - e.eval(&pt)).norm());
        radiation = radiation.max(e.eval(&pt).dot(&b.eval(&pt)).abs());
    }
    checks.push(Check {
        name: "maxwell_equations",
        value: maxwell,
        threshold: 1e-6 * (1.0 + mode.amplitude * mode.omega * mode.omega),
    });
    checks.push(Check {
        name: "potential_consistency",
        value: potentials,
        threshold: 1e-6 * (1.0 + mode.amplitude * mode.omega),
    });
    checks.push(Check {
        name: "radiation_condition",
        value: radiation,
        threshold: 1e-13 * (1.0 + (mode.amplitude * mode.omega).powi(2)),
    });

    let analytic = energy_analytic(&mode);
    let scale = if analytic > 0.0 { analytic } else { 1.0 };
    let mut conservation = 0.0f64;
    for i in 0..4 {
        let t = i as f64 * mode.tau / 7.0;
        let numeric = energy_numeric(&mode, t, grid).map_err(quad)?.value;
        conservation = conservation.max((numeric - analytic).abs() / scale);
    }
    checks.push(Check {
        name: "energy_identity_and_conservation",
        value: conservation,
        threshold: tol_rel,
    });

    let hel = helicity(&mode, mode.tau / 8.0, grid).map_err(quad)?.value;
    checks.push(Check {
        name: "helicity_zero",
        value: hel.abs(),
        threshold: 1e-10 * (1.0 + (mode.amplitude * mode.omega).powi(2)),
    });

    let star_shift = 0.5 * mode.omega * mode.amplitude;
    let (e_star, b_star) = mode_starred_partners(&mode, star_shift, star_shift);
    let cavity_grid = GridSpec::cavity(grid);
    let li =
        lemma_integrals(&b, &b_star, &e, &e_star, mode.tau / 8.0, &cavity_grid).map_err(quad)?;
    checks.push(Check {
        name: "lemma_integrals",
        value: li.b_rel_diff().max(li.e_rel_diff()),
        threshold: 1e-8,
    });

    // duality self-test of the Clebsch machinery on a plane-wave pair
    let mag = ClebschPair::new(
        ScalarField::new(|pt| (pt.r.z - pt.t).sin()),
        ScalarField::spatial(|r| r.x),
        false,
    );
    let el = ClebschPair::new(
        ScalarField::new(|pt| (pt.r.z - pt.t).sin()),
        ScalarField::spatial(|r| r.y),
        false,
    );
    let dual = verify_duality(&mag, &el, None, &lattice_points(40, 2.0));
    checks.push(Check {
        name: "duality_plane_wave",
        value: dual.max_b_violation.max(dual.max_e_violation),
        threshold: 1e-6,
    });

    let degree = degree_d(&mode, grid, time_grid).map_err(quad)?;
    checks.push(Check {
        name: "degree_identity",
        value: (degree.d - 4.0 * analytic / mode.omega).abs(),
        threshold: 1e-6 * scale.max(1.0),
    });

    let t4 = t4_degree(&e, &b, mode.tau, grid, time_grid).map_err(quad)?;
    checks.push(Check {
        name: "t4_signed_integral",
        value: t4.value.abs(),
        threshold: 1e-9 * scale.max(1.0),
    });

    let signed = degree_d_fullperiod(&mode, grid, time_grid, false).map_err(quad)?;
    checks.push(Check {
        name: "full_period_signed",
        value: signed.abs(),
        threshold: 1e-9 * scale.max(1.0),
    });
    let absolute = degree_d_fullperiod(&mode, grid, time_grid, true).map_err(quad)?;
    checks.push(Check {
        name: "full_period_absolute_vs_degree",
        value: (absolute - degree.d).abs() / degree.d.abs().max(1.0),
        threshold: 1e-6,
    });

    let orb = check_orbifold_symmetry(&mode, 200, 0x0f_b1f0);
    checks.push(Check {
        name: "orbifold_equivariance",
        value: orb.max_violation(),
        threshold: 1e-12,
    });

    let all_pass = checks.iter().all(Check::pass);
    print_json(&json!({
        "schema_version": SCHEMA_VERSION,
        "k": mode.k,
        "amplitude": mode.amplitude,
        "omega": mode.omega,
        "grid": grid,
        "time_grid": time_grid,
        "tol_rel": tol_rel,
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        "pass": all_pass,
    }));
    Ok(if all_pass { EXIT_PASS } else { EXIT_FAIL })
}
