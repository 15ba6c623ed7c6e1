use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nilforge::coboundary::{decide_coboundary, CubeSource, Target};
use nilforge::cocycle::{coboundary_of, trilinear_cocycle, CocycleHandle};
use nilforge::cube::FilteredGroup;
use nilforge::experiments::{estimate_tv, measurability_probe};
use nilforge::gowers::{correlation, gowers_norm_naive, gowers_norm_recursive};
use nilforge::potential::potential_finder;
use nilforge::rho::{non_coboundary_certificate, verify_cocycle, verify_strong_homogeneity, Rho};
use nilforge::x5::{lift, sample_ncube_seeded, PseudoQuintic, QuadPair};
use nilforge::{FuncTable, PolyRep};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "nilforge", version, about = "Exact non-classical polynomials, nilspace cocycles and the X_{5,r} experiments")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "NILFORGE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify that rho is a strongly 2-homogeneous 5-cocycle and not a coboundary.
    VerifyRho(VerifyRho),
    /// Decide whether a cocycle is a coboundary.
    Coboundary(CoboundaryArgs),
    /// Recover F from d^{k+1} F.
    Potential(PotentialArgs),
    /// Write the explicit lift S_0 of a quadratic pair.
    Lift(LiftArgs),
    /// Sample an n-cube (Q, S) of X_{5,r} and write S.
    Sample(SampleArgs),
    /// Gowers U^{k+1} norm of e(f).
    Gowers(GowersArgs),
    /// |E e(S - P)| for a pseudo-quintic S with quintic part P.
    Correlate(CorrelateArgs),
    /// Total variation of sampled restricted cubes to uniform on Sigma.
    Equid(EquidArgs),
    /// Conditional-expectation measurability probe.
    Probe(ProbeArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    /// JSON report path (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyRho {
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Highest r for the Z/2^r decisions.
    #[arg(long, default_value_t = 8)]
    levels: u8,
    #[command(flatten)]
    common: Common,
    #[arg(long, hide = true)]
    drop_partition: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CocycleKind {
    Rho,
    Trilinear,
    /// d^{k+1} F for F read from --f.
    Poly,
}

#[derive(Args)]
struct CoboundaryArgs {
    #[arg(long, value_enum)]
    cocycle: CocycleKind,
    #[arg(long)]
    f: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// `torus` or a level r for (1/2^r)Z/Z potentials.
    #[arg(long, default_value = "torus")]
    target: String,
    /// Sampled cubes; 0 enumerates every cube.
    #[arg(long, default_value_t = 0)]
    samples: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PotentialArgs {
    #[arg(long)]
    f: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Write the recovered potential as a CSV table.
    #[arg(long)]
    table_out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct LiftArgs {
    /// `q1.poly,q2.poly`
    #[arg(long, value_delimiter = ',', required = true)]
    q: Vec<PathBuf>,
    #[arg(long, default_value_t = 5)]
    r: u8,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    r: u8,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Naive,
    Recursive,
}

#[derive(Args)]
struct GowersArgs {
    #[arg(long)]
    f: PathBuf,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Engine::Recursive)]
    engine: Engine,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CorrelateArgs {
    /// Pseudo-quintic file; otherwise a cube is sampled.
    #[arg(long, conflicts_with = "n")]
    f: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 5)]
    r: u8,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EquidArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "M", default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "M", default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 5)]
    r: u8,
    #[command(flatten)]
    common: Common,
}

struct Report {
    command: &'static str,
    params: Value,
    seed: Option<u64>,
    results: Value,
    passed: bool,
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random();
        eprintln!("seed: {s}");
        s
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn parse<T>(path: &Path, f: impl Fn(&str) -> nilforge::Result<T>) -> Result<T> {
    f(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// A POLY file, a PSEUDOQUINTIC file or a CSV table, by first line.
fn read_function(path: &Path) -> Result<FuncTable> {
    let text = read(path)?;
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
    let res = if first.starts_with("PSEUDOQUINTIC") {
        PseudoQuintic::from_text(&text).map(|s| s.table())
    } else if first.starts_with("POLY") {
        PolyRep::from_text(&text).map(|p| p.to_table())
    } else {
        FuncTable::from_csv(&text)
    };
    res.with_context(|| format!("parsing {}", path.display()))
}

fn verify_rho(a: VerifyRho) -> Result<Report> {
    let seed = resolve_seed(a.common.seed);
    let rho = match a.drop_partition {
        Some(i) => Rho::without_partition(i),
        None => Rho::standard(),
    };
    let cocycle = verify_cocycle(&rho, a.samples, seed);
    let strong = verify_strong_homogeneity(&rho, a.samples, seed, a.samples > 0)?;
    let levels: Vec<u8> = (1..=a.levels).collect();
    let cert = non_coboundary_certificate(&rho, a.samples, seed, &levels)?;
    let passed = cocycle.passed() && strong.passed() && cert.passed();
    let partitions: Vec<String> = rho
        .table()
        .iter()
        .map(|[p, q, r]| {
            let pair = |i: &u8| {
                let (a, b) = nilforge::rho::PAIRS[*i as usize];
                format!("{a}{b}")
            };
            format!("{}|{}|{}", pair(p), pair(q), pair(r))
        })
        .collect();
    Ok(Report {
        command: "verify-rho",
        params: json!({"samples": a.samples, "levels": a.levels}),
        seed: Some(seed),
        results: json!({
            "passed": passed,
            "exhaustive": a.samples > 0,
            "partitions": partitions,
            "cocycle": cocycle,
            "strong_homogeneity": strong,
            "kernel_vector": cert.certificate.terms,
            "pairing": cert.certificate.pairing.to_string(),
            "non_coboundary": cert,
        }),
        passed,
    })
}

fn coboundary(a: CoboundaryArgs) -> Result<Report> {
    let seed = resolve_seed(a.common.seed);
    let target = match a.target.as_str() {
        "torus" => Target::Torus,
        r => Target::Level(r.parse().with_context(|| format!("bad --target {r:?}"))?),
    };
    let source = if a.samples == 0 {
        CubeSource::Exhaustive
    } else {
        CubeSource::Sampled { count: a.samples, seed }
    };
    let rho_std = Rho::standard();
    let table;
    let handle: CocycleHandle = match a.cocycle {
        CocycleKind::Rho => rho_std.handle(),
        CocycleKind::Trilinear => trilinear_cocycle(),
        CocycleKind::Poly => {
            let path = a.f.as_ref().context("--cocycle poly needs --f")?;
            table = read_function(path)?;
            coboundary_of(FilteredGroup::f2(table.n(), 1), a.k, &table)
        }
    };
    let verdict = decide_coboundary(&handle, target, source)?;
    Ok(Report {
        command: "coboundary",
        params: json!({"k": handle.k, "target": a.target, "samples": a.samples}),
        seed: Some(seed),
        results: serde_json::to_value(&verdict)?,
        passed: true,
    })
}

fn potential(a: PotentialArgs) -> Result<Report> {
    let seed = resolve_seed(a.common.seed);
    let f = read_function(&a.f)?;
    let handle = coboundary_of(FilteredGroup::f2(f.n(), 1), a.k, &f);
    let p = potential_finder(&handle, a.samples, seed)?;
    if let Some(path) = &a.table_out {
        write(path, &p.table.to_csv())?;
    }
    Ok(Report {
        command: "potential",
        params: json!({"n": f.n(), "k": a.k, "samples": a.samples}),
        seed: Some(seed),
        results: serde_json::to_value(&p)?,
        passed: true,
    })
}

fn lift_cmd(a: LiftArgs) -> Result<Report> {
    if a.q.len() != 2 {
        clap::Error::raw(clap::error::ErrorKind::WrongNumberOfValues, "--q takes exactly two files: q1.poly,q2.poly\n").exit();
    }
    let q1 = parse(&a.q[0], PolyRep::from_text)?;
    let q2 = parse(&a.q[1], PolyRep::from_text)?;
    let s = lift(&QuadPair::new(q1, q2)?, a.r)?;
    write(&a.out, &s.to_text())?;
    Ok(Report {
        command: "lift",
        params: json!({"n": s.n(), "r": a.r}),
        seed: None,
        results: json!({"out": a.out}),
        passed: true,
    })
}

fn sample(a: SampleArgs) -> Result<Report> {
    let seed = resolve_seed(a.seed);
    let (_, s) = sample_ncube_seeded(a.n, a.r, seed)?;
    write(&a.out, &s.to_text())?;
    Ok(Report {
        command: "sample",
        params: json!({"n": a.n, "r": a.r}),
        seed: Some(seed),
        results: json!({"out": a.out}),
        passed: true,
    })
}

fn gowers(a: GowersArgs) -> Result<Report> {
    let f = read_function(&a.f)?;
    let (norm, engine) = match a.engine {
        Engine::Naive => (gowers_norm_naive(&f, a.k)?, "naive"),
        Engine::Recursive => (gowers_norm_recursive(&f, a.k)?, "recursive"),
    };
    Ok(Report {
        command: "gowers",
        params: json!({"n": f.n(), "k": a.k, "engine": engine}),
        seed: None,
        results: json!({"norm": norm, "engine": engine, "n": f.n(), "k": a.k}),
        passed: true,
    })
}

fn correlate(a: CorrelateArgs) -> Result<Report> {
    let (s, seed) = match (&a.f, a.n) {
        (Some(path), _) => (parse(path, PseudoQuintic::from_text)?, None),
        (None, Some(n)) => {
            let seed = resolve_seed(a.common.seed);
            (sample_ncube_seeded(n, a.r, seed)?.1, Some(seed))
        }
        (None, None) => bail!("correlate needs --f or --n"),
    };
    let s = s.with_cache();
    let c = correlation(&s, &s.p)?;
    Ok(Report {
        command: "correlate",
        params: json!({"n": s.n(), "r": s.r}),
        seed,
        results: serde_json::to_value(&c)?,
        passed: true,
    })
}

fn equid(a: EquidArgs) -> Result<Report> {
    let seed = resolve_seed(a.common.seed);
    let r = estimate_tv(a.n, a.m, a.d, a.samples, seed)?;
    Ok(Report {
        command: "equid",
        params: json!({"n": a.n, "M": a.m, "d": a.d, "samples": a.samples}),
        seed: Some(seed),
        passed: r.outside_sigma == 0,
        results: serde_json::to_value(&r)?,
    })
}

fn probe(a: ProbeArgs) -> Result<Report> {
    let seed = resolve_seed(a.common.seed);
    let r = measurability_probe(a.n, a.m, a.r, seed)?;
    Ok(Report {
        command: "probe",
        params: json!({"n": a.n, "M": a.m, "r": a.r}),
        seed: Some(seed),
        passed: true,
        results: serde_json::to_value(&r)?,
    })
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let start = Instant::now();
    let (report, out) = match cli.command {
        Command::VerifyRho(a) => {
            let out = a.common.out.clone();
            (verify_rho(a)?, out)
        }
        Command::Coboundary(a) => {
            let out = a.common.out.clone();
            (coboundary(a)?, out)
        }
        Command::Potential(a) => {
            let out = a.common.out.clone();
            (potential(a)?, out)
        }
        Command::Lift(a) => (lift_cmd(a)?, None),
        Command::Sample(a) => (sample(a)?, None),
        Command::Gowers(a) => {
            let out = a.common.out.clone();
            (gowers(a)?, out)
        }
        Command::Correlate(a) => {
            let out = a.common.out.clone();
            (correlate(a)?, out)
        }
        Command::Equid(a) => {
            let out = a.common.out.clone();
            (equid(a)?, out)
        }
        Command::Probe(a) => {
            let out = a.common.out.clone();
            (probe(a)?, out)
        }
    };
    let doc = json!({
        "command": report.command,
        "version": VERSION,
        "params": report.params,
        "seed": report.seed,
        "results": report.results,
        "elapsed_ms": start.elapsed().as_millis() as u64,
    });
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    match out {
        Some(path) => write(&path, &text)?,
        None => print!("{text}"),
    }
    if !report.passed {
        eprintln!("{}: check failed", report.command);
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
