use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hardy_cert::blockdiag::{build_global_model, isometry_extract, mixture_behavior, verify_rigidity};
use hardy_cert::envelope::{
    analyze, build_cover, sweep_union, GridSpec, NuObjective, Objective, Surface, DEFAULT_DELTA,
    DEFAULT_ETA,
};
use hardy_cert::hardy::{
    angles_from_point, chsh_values, hardy_behavior, hardy_state, is_local, Behavior, HardyPoint,
};
use hardy_cert::io::{
    self, mask_to_csv, read_behavior, read_model, write_behavior, write_json, CoverFile,
    ExtractionFile, MaskFile,
};
use hardy_cert::qcore::behavior_from_model;
use hardy_cert::selftest::{certify_with, CertifyOptions, DEFAULT_BOUNDARY_MARGIN, DEFAULT_TOL};
use hardy_cert::Error;

const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Hardy-test behaviors, rigidity analysis and self-testing certificates.
#[derive(Parser)]
#[command(name = "hardy-cert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the closed-form behavior of (r, s) and print p_Hardy.
    GenBehavior(GenArgs),
    /// Certify a behavior file; exit 0 certified, 1 rejected, 3 boundary.
    Certify(CertifyArgs),
    /// Simulate the Bell experiment by the Born rule on a state or block model.
    Simulate(SimulateArgs),
    /// Build the concave cover of an objective and write its facets.
    Cover(SurfaceArgs),
    /// Write equality, concavity and certified region masks of an objective.
    Regions(RegionArgs),
    /// Union of certified regions over nu = k/N.
    Sweep(SweepArgs),
    /// Check a block model's mixture against the rigidity statement.
    Blocks(BlocksArgs),
    /// Extract the Hardy state from a common-point block model.
    Extract(ExtractArgs),
    /// CHSH values and the locality verdict; exit 0 nonlocal, 1 local.
    Chsh(ChshArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, allow_negative_numbers = true)]
    r: f64,
    #[arg(long, allow_negative_numbers = true)]
    s: f64,
    /// Output path; `.csv` selects CSV, anything else JSON. Stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_BOUNDARY_MARGIN)]
    margin: f64,
    /// Certificate path; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true, requires = "s", conflicts_with = "model")]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "r")]
    s: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    xi: f64,
    /// Block model JSON; simulates the block-diagonal global model instead.
    #[arg(long, required_unless_present = "r")]
    model: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SurfaceArgs {
    /// Use the family member Omega_nu; Omega* when absent.
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, default_value_t = 201)]
    grid: usize,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, default_value_t = 201)]
    grid: usize,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Equality tolerance; scaled default when absent.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long, default_value_t = 201)]
    grid: usize,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BlocksArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Write the mixture behavior here.
    #[arg(long)]
    behavior: Option<PathBuf>,
    /// Report path; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ChshArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> hardy_cert::Result<()> {
    match out {
        Some(p) => write_json(p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn emit_behavior(b: &Behavior, out: Option<&Path>) -> hardy_cert::Result<()> {
    match out {
        Some(p) => write_behavior(p, b),
        None => {
            println!("{}", io::behavior_to_json(b)?);
            Ok(())
        }
    }
}

fn open_interval(name: &str, v: f64) -> hardy_cert::Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Error::OutOfDomain(format!("{name} out of range: {v} (must lie in (0, 1))")))
    }
}

fn interior_point(r: f64, s: f64) -> hardy_cert::Result<HardyPoint> {
    HardyPoint::new(open_interval("r", r)?, open_interval("s", s)?)
}

fn grid_for(n: usize, delta: f64) -> hardy_cert::Result<GridSpec> {
    if n < 11 {
        return Err(Error::InvalidGrid(format!("grid must have at least 11 points per axis, got {n}")));
    }
    GridSpec::new(n, delta)
}

fn surface(nu: Option<f64>) -> hardy_cert::Result<Box<dyn Surface>> {
    Ok(match nu {
        Some(v) => Box::new(NuObjective::new(v)?),
        None => Box::new(Objective::omega_star()),
    })
}

fn write_mask(dir: &Path, stem: &str, m: &hardy_cert::envelope::RegionMask) -> hardy_cert::Result<()> {
    fs::write(dir.join(format!("{stem}.csv")), mask_to_csv(m))?;
    write_json(&dir.join(format!("{stem}.json")), &MaskFile::from(m))
}

fn gen_behavior(a: GenArgs) -> hardy_cert::Result<u8> {
    let pt = interior_point(a.r, a.s)?;
    let b = hardy_behavior(pt)?;
    emit_behavior(&b, a.out.as_deref())?;
    let line = format!("p_Hardy = {}", b.as_array()[0]);
    if a.out.is_some() { println!("{line}") } else { eprintln!("{line}") }
    Ok(0)
}

fn certify_cmd(a: CertifyArgs) -> hardy_cert::Result<u8> {
    let b = read_behavior(&a.input)?;
    let c = certify_with(&b, CertifyOptions { tol: a.tol, boundary_margin: a.margin });
    emit(&c, a.out.as_deref())?;
    eprintln!(
        "verdict: {:?}; residual: {}",
        c.verdict,
        c.residual.map_or("n/a".to_string(), |r| format!("{r:e}"))
    );
    for n in &c.notes {
        eprintln!("note: {n}");
    }
    Ok(c.exit_code() as u8)
}

fn simulate(a: SimulateArgs) -> hardy_cert::Result<u8> {
    let b = match (a.model, a.r, a.s) {
        (Some(path), _, _) => build_global_model(&read_model(&path)?)?.behavior()?,
        (None, Some(r), Some(s)) => {
            let pt = interior_point(r, s)?;
            let psi = hardy_state(pt, a.phi, a.xi)?;
            let (alice, bob) = angles_from_point(pt, a.phi, a.xi)?.observables()?;
            let born = behavior_from_model(&psi.projector(), &alice, &bob)?;
            eprintln!("max |Born - closed form| = {:e}", born.max_abs_diff(&hardy_behavior(pt)?));
            born
        }
        _ => return Err(Error::Schema("give either --model or both --r and --s".into())),
    };
    emit_behavior(&b, a.out.as_deref())?;
    Ok(0)
}

fn cover_cmd(a: SurfaceArgs) -> hardy_cert::Result<u8> {
    let grid = grid_for(a.grid, a.delta)?;
    let f = surface(a.nu)?;
    let c = build_cover(f.as_ref(), grid)?;
    write_json(&a.out, &CoverFile::from(&c))?;
    println!("facets={}", c.facets().len());
    Ok(0)
}

fn regions(a: RegionArgs) -> hardy_cert::Result<u8> {
    let grid = grid_for(a.grid, a.delta)?;
    let f = surface(a.nu)?;
    let eps = a.eps.unwrap_or_else(|| grid.default_eps());
    let r = analyze(f.as_ref(), grid, eps, a.eta)?;
    fs::create_dir_all(&a.out)?;
    write_mask(&a.out, "equality", &r.equality)?;
    write_mask(&a.out, "concavity", &r.concavity)?;
    write_mask(&a.out, "region", &r.region)?;
    write_mask(&a.out, "flagged", &r.flagged)?;
    write_json(&a.out.join("cover.json"), &CoverFile::from(&r.cover))?;
    println!(
        "equality={} concavity={} region={} flagged={}",
        r.equality.count(),
        r.concavity.count(),
        r.region.count(),
        r.flagged.count()
    );
    Ok(0)
}

fn sweep(a: SweepArgs) -> hardy_cert::Result<u8> {
    let grid = grid_for(a.grid, a.delta)?;
    let eps = a.eps.unwrap_or_else(|| grid.default_eps());
    let res = sweep_union(a.n, grid, eps, a.eta)?;
    fs::create_dir_all(&a.out)?;
    for (k, m) in res.members.iter().enumerate() {
        write_mask(&a.out, &format!("nu_{:04}", k + 1), &m.mask)?;
    }
    write_mask(&a.out, "union", &res.union)?;
    let summary = res.summary();
    fs::write(a.out.join("summary.txt"), format!("{summary}\n"))?;
    println!("{summary}");
    Ok(0)
}

fn blocks(a: BlocksArgs) -> hardy_cert::Result<u8> {
    let m = read_model(&a.model)?;
    if let Some(p) = &a.behavior {
        write_behavior(p, &mixture_behavior(&m)?)?;
    }
    let rep = verify_rigidity(&m, a.tol)?;
    emit(&rep, a.out.as_deref())?;
    eprintln!("status: {:?}; residual: {:e}", rep.status, rep.form.residual);
    Ok(if rep.holds() { 0 } else { EXIT_NEGATIVE })
}

fn extract(a: ExtractArgs) -> hardy_cert::Result<u8> {
    let m = read_model(&a.model)?;
    let e = match isometry_extract(&m) {
        Ok(e) => e,
        Err(Error::InvalidModel(msg)) => {
            eprintln!("{msg}");
            return Ok(EXIT_NEGATIVE);
        }
        Err(e) => return Err(e),
    };
    emit(&ExtractionFile::from(&e), a.out.as_deref())?;
    eprintln!("fidelity = {}", e.fidelity);
    Ok(0)
}

fn chsh(a: ChshArgs) -> hardy_cert::Result<u8> {
    let b = read_behavior(&a.input)?;
    b.validate()?;
    let rep = is_local(&b)?;
    let vals: Vec<String> = chsh_values(&b).iter().map(|v| v.to_string()).collect();
    println!("chsh=[{}]", vals.join(","));
    println!("chsh_max={} local={}", rep.chsh_max, rep.local);
    Ok(if rep.local { EXIT_NEGATIVE } else { 0 })
}

fn configure_threads() -> hardy_cert::Result<()> {
    let Ok(v) = std::env::var("HARDY_CERT_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Schema(format!("HARDY_CERT_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Schema(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> hardy_cert::Result<u8> {
    configure_threads()?;
    match cli.command {
        Command::GenBehavior(a) => gen_behavior(a),
        Command::Certify(a) => certify_cmd(a),
        Command::Simulate(a) => simulate(a),
        Command::Cover(a) => cover_cmd(a),
        Command::Regions(a) => regions(a),
        Command::Sweep(a) => sweep(a),
        Command::Blocks(a) => blocks(a),
        Command::Extract(a) => extract(a),
        Command::Chsh(a) => chsh(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
