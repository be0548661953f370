// SPDX-License-Identifier: AGPL-3.0-only

//! Command-line surface for the `gauge-strips` toolkit: seeded verification
//! suites (round trip, variable counts, gauge orbit, Bianchi identity,
//! action equivalence, twisted-boundary audit) and band-spectrum /
//! butterfly data emission as CSV.
//!
//! Every command prints exactly one machine-readable JSON report to stdout
//! and a human summary (with timing) to stderr, so identical configurations
//! produce byte-identical stdout and files across runs. Parameters come
//! from flags or from a JSON config file (`--config`); an explicit flag
//! wins over the file. Randomized suites require a `seed`, which is echoed
//! in the report. Exit codes: `0` check passed, `1` check failed, `2`
//! invalid input.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use gauge_strips::{
    action_from_links, action_from_strips, apply_gauge_transformation, bianchi_residual,
    butterfly, dof_count, eigh, extract_giv, field_strength, real_space_hamiltonian,
    reconstruct_links, spectra_coincide, spectrum, uniform_field_giv, verify_twisted_bc,
    ActionParams, BoundaryCondition, Construction, GaugeInvariantRep, HofstadterParams,
    LatticeGeometry, LinkField, StripTriple2p1, VertexScalarField, MAX_DIM,
    MAX_HAMILTONIAN_ORDER,
};

/// Default pass threshold for identities that hold to rounding error.
const EXACT_TOLERANCE: f64 = 1e-12;
/// Default pass threshold for the relative link/strip action deviation.
const ACTION_TOLERANCE: f64 = 1e-10;
/// Default pass threshold for energy-multiset comparisons.
const SPECTRUM_TOLERANCE: f64 = 1e-8;
/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "GAUGE_STRIPS_OUT_DIR";
/// Decorrelates the gauge-function stream from the link stream.
const GAUGE_SEED_SALT: u64 = 0x9e37_79b9;

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            serde_json::from_str::<FileConfig>(&text)
                .with_context(|| format!("parsing config file {}", path.display()))?
        }
        None => FileConfig::default(),
    };
    if let Some(expected) = &file.command {
        let invoked = cli.command.name();
        if expected != invoked {
            bail!("config file names command `{expected}` but `{invoked}` was invoked");
        }
    }
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| file.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let report = match &cli.command {
        Command::Roundtrip {
            geometry,
            construction,
            suite,
        } => cmd_roundtrip(geometry, *construction, suite, &file)?,
        Command::Dof { geometry, seed } => cmd_dof(geometry, *seed, &file)?,
        Command::GaugeOrbit { geometry, suite } => cmd_gauge_orbit(geometry, suite, &file)?,
        Command::Bianchi {
            geometry,
            construction,
            suite,
        } => cmd_bianchi(geometry, *construction, suite, &file)?,
        Command::ActionCheck { size, beta, suite } => {
            cmd_action_check(*size, *beta, suite, &file)?
        }
        Command::TwistCheck { rep, tolerance } => cmd_twist_check(rep, *tolerance, &file)?,
        Command::Spectrum(args) => cmd_spectrum(args, &file, &out_dir)?,
        Command::Butterfly { n_max } => cmd_butterfly(*n_max, &file, &out_dir)?,
    };

    println!("{}", serde_json::to_string(&report)?);
    eprintln!(
        "{}: {} (max violation {:.3e}, tolerance {:.3e}, {:.3}s)",
        report.check,
        if report.pass { "PASS" } else { "FAIL" },
        report.max_violation,
        report.tolerance,
        report.elapsed.as_secs_f64()
    );
    Ok(report.pass)
}

/// Verification suites and data emitters sharing one flag/config scheme.
#[derive(Debug, Parser)]
#[command(name = "gauge-strips", version, about)]
struct Cli {
    /// JSON file with default parameters; explicit flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for emitted files (default: $GAUGE_STRIPS_OUT_DIR, then
    /// the working directory).
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract and reconstruct seeded random link fields; reports the
    /// worst round-trip deviation.
    Roundtrip {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Strip family to extract.
        #[arg(long, value_enum)]
        construction: Option<ConstructionArg>,
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Cross-check the closed-form variable counts against slot
    /// enumeration and the stored-link total (counts are
    /// construction-independent).
    Dof {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Seed for the enumerated random representation.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify that random gauge transformations move only the vertex
    /// field, and move it by exactly the corner-normalized gauge function.
    GaugeOrbit {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Verify the six-term Bianchi identity on links reconstructed from
    /// seeded random representations (needs at least 3 directions).
    Bianchi {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Strip family of the random representations.
        #[arg(long, value_enum)]
        construction: Option<ConstructionArg>,
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Compare the plaquette action with the quadratic strip action on
    /// seeded random configurations (three directions, open boundaries).
    ActionCheck {
        /// Sites per direction, at least 2.
        #[arg(long)]
        size: Option<usize>,
        /// Coupling in front of both actions.
        #[arg(long)]
        beta: Option<f64>,
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Audit the twisted-boundary data of a stored periodic
    /// representation: cocycle condition plus reconstruct-then-re-extract
    /// deviations.
    TwistCheck {
        /// Path to a representation JSON document.
        #[arg(long, value_name = "FILE")]
        rep: Option<PathBuf>,
        /// Pass threshold for the four audited violations.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Sweep the reduced zone, write the band spectrum as CSV, and
    /// cross-check against real-space diagonalization when the lattice
    /// fits the order cap.
    Spectrum(SpectrumArgs),
    /// Tabulate band energies over every reduced flux `m/n` with `n` up to
    /// a maximum denominator and write them as CSV.
    Butterfly {
        /// Largest flux denominator to include (at most 40).
        #[arg(long)]
        n_max: Option<u64>,
    },
}

impl Command {
    /// Subcommand name as written on the command line, for config-file
    /// cross-validation.
    fn name(&self) -> &'static str {
        match self {
            Self::Roundtrip { .. } => "roundtrip",
            Self::Dof { .. } => "dof",
            Self::GaugeOrbit { .. } => "gauge-orbit",
            Self::Bianchi { .. } => "bianchi",
            Self::ActionCheck { .. } => "action-check",
            Self::TwistCheck { .. } => "twist-check",
            Self::Spectrum { .. } => "spectrum",
            Self::Butterfly { .. } => "butterfly",
        }
    }
}

#[derive(Debug, Args)]
struct GeometryArgs {
    /// Total number of lattice directions, 2 to 4.
    #[arg(long)]
    dim: Option<usize>,
    /// Sites per direction, at least 2.
    #[arg(long)]
    size: Option<usize>,
    /// Boundary condition.
    #[arg(long, value_enum)]
    bc: Option<BcArg>,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// Base seed of the deterministic random stream (required).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeded configurations to run.
    #[arg(long)]
    trials: Option<u64>,
    /// Pass threshold for the reported max violation.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    /// Number of momentum components: 2 or 3.
    #[arg(long)]
    dim: Option<usize>,
    /// Flux numerator.
    #[arg(long)]
    m: Option<u64>,
    /// Flux denominator (coprime with the numerator).
    #[arg(long)]
    n: Option<u64>,
    /// Lattice extent multiplier: the extent is `kappa` magnetic cells.
    #[arg(long)]
    kappa: Option<u64>,
    /// Hopping amplitude.
    #[arg(long)]
    t: Option<f64>,
    /// Band construction to sweep.
    #[arg(long, value_enum)]
    construction: Option<ConstructionArg>,
    /// Pass threshold for the real-space cross-check.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BcArg {
    /// Links past the last site are stored but pinned to zero.
    Open,
    /// Directions wrap, with explicit boundary transition data.
    Periodic,
}

impl From<BcArg> for BoundaryCondition {
    fn from(value: BcArg) -> Self {
        match value {
            BcArg::Open => Self::Open,
            BcArg::Periodic => Self::Periodic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConstructionArg {
    /// One strip per direction pair, on a pinned sub-lattice.
    #[value(alias = "asym")]
    Asymmetric,
    /// Both orientations of every pair, on the full grid.
    #[value(alias = "sym")]
    Symmetric,
}

impl From<ConstructionArg> for Construction {
    fn from(value: ConstructionArg) -> Self {
        match value {
            ConstructionArg::Asymmetric => Self::Asymmetric,
            ConstructionArg::Symmetric => Self::Symmetric,
        }
    }
}

/// Flat parameter pool read from `--config`; every field is optional and
/// any flag with the same meaning overrides it.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<String>,
    dim: Option<usize>,
    size: Option<usize>,
    bc: Option<String>,
    construction: Option<String>,
    m: Option<u64>,
    n: Option<u64>,
    kappa: Option<u64>,
    t: Option<f64>,
    beta: Option<f64>,
    seed: Option<u64>,
    trials: Option<u64>,
    tolerance: Option<f64>,
    n_max: Option<u64>,
    rep: Option<PathBuf>,
    out_dir: Option<PathBuf>,
}

/// One check outcome; `pass` holds iff `max_violation <= tolerance`. The
/// elapsed time is reported on stderr only, keeping stdout byte-identical
/// across identical runs.
#[derive(Debug, Serialize)]
struct CheckReport {
    check: &'static str,
    pass: bool,
    max_violation: f64,
    tolerance: f64,
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    details: Option<serde_json::Value>,
    #[serde(skip)]
    elapsed: Duration,
}

impl CheckReport {
    fn new(
        check: &'static str,
        max_violation: f64,
        tolerance: f64,
        seed: Option<u64>,
        started: Instant,
    ) -> Self {
        Self {
            check,
            pass: max_violation <= tolerance,
            max_violation,
            tolerance,
            seed,
            details: None,
            elapsed: started.elapsed(),
        }
    }

    fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = Some(details);
        self
    }
}

fn require<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| {
        anyhow!("missing required parameter `{name}`: pass --{name} or set it in the config file")
    })
}

fn parse_enum<T: ValueEnum>(text: &str, name: &str) -> Result<T> {
    T::from_str(text, true).map_err(|_| anyhow!("invalid `{name}` value `{text}` in config file"))
}

fn resolve_geometry(args: &GeometryArgs, file: &FileConfig) -> Result<LatticeGeometry> {
    let dim = require(args.dim.or(file.dim), "dim")?;
    let size = require(args.size.or(file.size), "size")?;
    let bc = match args.bc {
        Some(bc) => bc,
        None => match &file.bc {
            Some(text) => parse_enum::<BcArg>(text, "bc")?,
            None => return Err(anyhow!("missing required parameter `bc`")),
        },
    };
    Ok(LatticeGeometry::new(dim, size, bc.into())?)
}

fn resolve_construction(
    flag: Option<ConstructionArg>,
    file: &FileConfig,
) -> Result<Construction> {
    let arg = match flag {
        Some(c) => c,
        None => match &file.construction {
            Some(text) => parse_enum::<ConstructionArg>(text, "construction")?,
            None => ConstructionArg::Asymmetric,
        },
    };
    Ok(arg.into())
}

fn cmd_roundtrip(
    geometry: &GeometryArgs,
    construction: Option<ConstructionArg>,
    suite: &SuiteArgs,
    file: &FileConfig,
) -> Result<CheckReport> {
    let geom = resolve_geometry(geometry, file)?;
    let construction = resolve_construction(construction, file)?;
    let seed = require(suite.seed.or(file.seed), "seed")?;
    let trials = suite.trials.or(file.trials).unwrap_or(1000);
    let tolerance = suite.tolerance.or(file.tolerance).unwrap_or(EXACT_TOLERANCE);
    let started = Instant::now();
    let mut worst = 0.0f64;
    for offset in 0..trials {
        let links = LinkField::random(geom, seed.wrapping_add(offset));
        let rep = extract_giv(&links, construction, None)?;
        let back = reconstruct_links(&rep)?;
        worst = worst.max(links.max_abs_diff(&back)?);
    }
    Ok(CheckReport::new("roundtrip", worst, tolerance, Some(seed), started)
        .with_details(json!({ "trials": trials })))
}

fn cmd_dof(geometry: &GeometryArgs, seed: Option<u64>, file: &FileConfig) -> Result<CheckReport> {
    let geom = resolve_geometry(geometry, file)?;
    let seed = seed.or(file.seed).unwrap_or(0);
    let started = Instant::now();
    let count = dof_count(geom, Construction::Asymmetric);
    let rep = GaugeInvariantRep::random(geom, Construction::Asymmetric, seed)?;
    let enumerated = rep.enumerate_free_variables();
    let violation = count
        .total()
        .abs_diff(count.links)
        .max(enumerated.abs_diff(count.total())) as f64;
    Ok(CheckReport::new("dof", violation, 0.0, Some(seed), started).with_details(json!({
        "links": count.links,
        "phi": count.phi,
        "strips": count.strips,
        "loops": count.loops,
        "enumerated": enumerated,
    })))
}

fn cmd_gauge_orbit(
    geometry: &GeometryArgs,
    suite: &SuiteArgs,
    file: &FileConfig,
) -> Result<CheckReport> {
    let geom = resolve_geometry(geometry, file)?;
    let seed = require(suite.seed.or(file.seed), "seed")?;
    let trials = suite.trials.or(file.trials).unwrap_or(1000);
    let tolerance = suite.tolerance.or(file.tolerance).unwrap_or(EXACT_TOLERANCE);
    let started = Instant::now();
    let dim = geom.dim();
    let mut worst = 0.0f64;
    for offset in 0..trials {
        let s = seed.wrapping_add(offset);
        let links = LinkField::random(geom, s);
        let lambda = VertexScalarField::random(geom, s ^ GAUGE_SEED_SALT);
        let moved = apply_gauge_transformation(&links, &lambda)?;
        let before = extract_giv(&links, Construction::Asymmetric, None)?;
        let after = extract_giv(&moved, Construction::Asymmetric, None)?;
        for (a, b) in before.strips().iter().zip(after.strips()) {
            worst = worst.max(a.max_abs_diff(b)?);
        }
        for (a, b) in before.loops().iter().zip(after.loops()) {
            worst = worst.max(a.max_abs_diff(b)?);
        }
        let corner = lambda.corner();
        for site in geom.sites() {
            let shift = after.phi().get(&site[..dim]) - before.phi().get(&site[..dim]);
            let expected = lambda.get(&site[..dim]) - corner;
            worst = worst.max((shift - expected).abs());
        }
    }
    Ok(CheckReport::new("gauge-orbit", worst, tolerance, Some(seed), started)
        .with_details(json!({ "trials": trials })))
}

fn cmd_bianchi(
    geometry: &GeometryArgs,
    construction: Option<ConstructionArg>,
    suite: &SuiteArgs,
    file: &FileConfig,
) -> Result<CheckReport> {
    let geom = resolve_geometry(geometry, file)?;
    let construction = resolve_construction(construction, file)?;
    let seed = require(suite.seed.or(file.seed), "seed")?;
    let trials = suite.trials.or(file.trials).unwrap_or(1000);
    let tolerance = suite.tolerance.or(file.tolerance).unwrap_or(EXACT_TOLERANCE);
    let started = Instant::now();
    let mut worst = 0.0f64;
    for offset in 0..trials {
        let rep = GaugeInvariantRep::random(geom, construction, seed.wrapping_add(offset))?;
        let links = reconstruct_links(&rep)?;
        worst = worst.max(bianchi_residual(&field_strength(&links))?);
    }
    Ok(CheckReport::new("bianchi", worst, tolerance, Some(seed), started)
        .with_details(json!({ "trials": trials })))
}

fn cmd_action_check(
    size: Option<usize>,
    beta: Option<f64>,
    suite: &SuiteArgs,
    file: &FileConfig,
) -> Result<CheckReport> {
    let size = require(size.or(file.size), "size")?;
    let beta = beta.or(file.beta).unwrap_or(1.0);
    let seed = require(suite.seed.or(file.seed), "seed")?;
    let trials = suite.trials.or(file.trials).unwrap_or(100);
    let tolerance = suite.tolerance.or(file.tolerance).unwrap_or(ACTION_TOLERANCE);
    let geom = LatticeGeometry::new(3, size, BoundaryCondition::Open)?;
    let params = ActionParams::new(beta)?;
    let started = Instant::now();
    let mut worst = 0.0f64;
    let mut at_worst = (0.0f64, 0.0f64);
    for offset in 0..trials {
        let links = LinkField::random(geom, seed.wrapping_add(offset));
        let rep = extract_giv(&links, Construction::Asymmetric, None)?;
        let triple = StripTriple2p1::from_rep(&rep)?;
        let from_links = action_from_links(&links, &params);
        let from_strips = action_from_strips(&triple, &params);
        let relative = (from_links - from_strips).abs() / from_links.abs().max(1.0);
        if relative >= worst {
            worst = relative;
            at_worst = (from_links, from_strips);
        }
    }
    Ok(
        CheckReport::new("action-check", worst, tolerance, Some(seed), started).with_details(
            json!({
                "beta": beta,
                "s_links": at_worst.0,
                "s_strips": at_worst.1,
                "rel_err": worst,
            }),
        ),
    )
}

fn cmd_twist_check(
    rep: &Option<PathBuf>,
    tolerance: Option<f64>,
    file: &FileConfig,
) -> Result<CheckReport> {
    let path = require(rep.clone().or_else(|| file.rep.clone()), "rep")?;
    let tolerance = tolerance.or(file.tolerance).unwrap_or(EXACT_TOLERANCE);
    let text = fs::read_to_string(&path)
        .with_context(|| format!("reading representation file {}", path.display()))?;
    let rep = GaugeInvariantRep::from_json(&text)
        .with_context(|| format!("parsing representation file {}", path.display()))?;
    let started = Instant::now();
    let report = verify_twisted_bc(&rep)?;
    Ok(
        CheckReport::new("twist-check", report.max_violation(), tolerance, None, started)
            .with_details(serde_json::to_value(report)?),
    )
}

fn cmd_spectrum(args: &SpectrumArgs, file: &FileConfig, out_dir: &Path) -> Result<CheckReport> {
    let dim = require(args.dim.or(file.dim), "dim")?;
    let m = require(args.m.or(file.m), "m")?;
    let n = require(args.n.or(file.n), "n")?;
    let kappa = args.kappa.or(file.kappa).unwrap_or(1);
    let t = args.t.or(file.t).unwrap_or(1.0);
    let construction = resolve_construction(args.construction, file)?;
    let tolerance = args.tolerance.or(file.tolerance).unwrap_or(SPECTRUM_TOLERANCE);
    let params = HofstadterParams::new(m, n, kappa, t)?;
    let started = Instant::now();

    let bands = spectrum(&params, construction, dim)?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let stem = format!("spectrum_{dim}d_{}_m{m}_n{n}_kappa{kappa}", construction.name());
    let csv_path = out_dir.join(format!("{stem}.csv"));
    fs::write(&csv_path, bands.to_csv())
        .with_context(|| format!("writing {}", csv_path.display()))?;
    eprintln!("wrote {}", csv_path.display());

    let geom = params.geometry(construction, dim)?;
    let volume = geom.num_sites();
    if volume > MAX_HAMILTONIAN_ORDER {
        eprintln!(
            "real-space cross-check skipped: {volume} sites exceed the order cap {MAX_HAMILTONIAN_ORDER}"
        );
        return Ok(
            CheckReport::new("spectrum", 0.0, tolerance, None, started)
                .with_details(json!({ "rows": bands.rows.len(), "volume": volume })),
        );
    }

    // The reduced-zone grid quantizes `exp(i k N) = (-1)^N`, so odd extents
    // sample the sector with boundary holonomy pi per direction; give the
    // real-space reference the matching holonomies.
    let mut theta = [0.0; MAX_DIM];
    if geom.size() % 2 == 1 {
        for slot in theta.iter_mut().take(dim) {
            *slot = PI;
        }
    }
    let reference_params = HofstadterParams::new(m, n, kappa, t)?.with_theta(theta)?;
    let rep = uniform_field_giv(&reference_params, construction, dim)?;
    let links = reconstruct_links(&rep)?;
    let h = real_space_hamiltonian(&links, t)?;
    let exact: Vec<f64> = eigh(h.matrix(), false)?
        .eigenvalues
        .iter()
        .map(|e| e / t)
        .collect();
    let coincide = spectra_coincide(&bands.energies_sorted(), &exact, tolerance)?;
    let report_path = out_dir.join(format!("{stem}_coincide.json"));
    fs::write(&report_path, serde_json::to_string(&coincide)?)
        .with_context(|| format!("writing {}", report_path.display()))?;
    eprintln!("wrote {}", report_path.display());

    Ok(
        CheckReport::new("spectrum", coincide.max_abs_diff, tolerance, None, started)
            .with_details(json!({ "rows": bands.rows.len(), "volume": volume })),
    )
}

fn cmd_butterfly(n_max: Option<u64>, file: &FileConfig, out_dir: &Path) -> Result<CheckReport> {
    let n_max = require(n_max.or(file.n_max), "n-max")?;
    let started = Instant::now();
    let data = butterfly(n_max)?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let path = out_dir.join(format!("butterfly_nmax{n_max}.csv"));
    fs::write(&path, data.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(CheckReport::new("butterfly", 0.0, 0.0, None, started)
        .with_details(json!({ "rows": data.rows.len() })))
}
