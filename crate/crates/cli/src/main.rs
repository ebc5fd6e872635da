//! `l2limits` command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use l2limits::canon::{bs_distance, canonical_form};
use l2limits::estimators::{convergence_experiment, ExperimentConfig};
use l2limits::generators::{fixture, linial_meshulam, random_flag, torus_tower, FIXTURE_NAMES};
use l2limits::measures::{degree_truncate, measure_distance, run_battery, uniform_rooting, RandomRootedComplex};
use l2limits::scx::{to_scx, ScxDocument};
use l2limits::spectral::{betti, laplacian_norm_a_priori, spectral_measure};
use l2limits::{Error, SimplicialComplex, Vertex};
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Parser)]
#[command(name = "l2limits", version, about = "Spectral measures and l2-Betti numbers of rooted simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a .scx file lists each maximal simplex once and report
    /// its f-vector and components.
    Validate { file: PathBuf },
    /// Betti numbers b_p and b_p/|V| from exact integer rank.
    Betti {
        file: PathBuf,
        #[arg(long)]
        p: Option<usize>,
        /// Skip the floating-point cross-check against the Laplacian kernel.
        #[arg(long)]
        exact: bool,
        /// Also write `p,b_p,normalized` rows to this CSV file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Atoms of the spectral measure of the p-Laplacian.
    Spectrum {
        file: PathBuf,
        #[arg(long)]
        p: usize,
        /// Write `eigenvalue,weight` rows here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical code of a rooted complex and its minimal representative.
    Canon {
        file: PathBuf,
        /// Root vertex; defaults to the file's `root` directive.
        #[arg(long)]
        root: Option<Vertex>,
    },
    /// Benjamini–Schramm distance between two rooted complexes given as
    /// `file.scx:root` (the root may come from the file instead).
    BsDistance {
        a: String,
        b: String,
        #[arg(long)]
        rmax: Option<usize>,
    },
    /// Uniform rooting of a finite complex as a measure JSON document.
    Measure { file: PathBuf },
    /// Weighted total-variation distance Σ 2^-r TV_r between two measures.
    MeasureDistance {
        m1: PathBuf,
        m2: PathBuf,
        #[arg(long)]
        rmax: usize,
    },
    /// Mass-transport identity for a battery of test functions.
    MassTransport {
        measure: PathBuf,
        #[arg(long, value_enum, default_value_t = Battery::Standard)]
        battery: Battery,
    },
    /// Remove edges until every vertex degree is at most D.
    Truncate {
        file: PathBuf,
        #[arg(long)]
        degree: usize,
    },
    /// Write a generated complex as .scx.
    Generate {
        #[command(subcommand)]
        family: Family,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Statistics along a sequence of complexes; writes experiment.csv.
    Converge {
        #[arg(long, value_enum)]
        family: SequenceFamily,
        /// Comma-separated level sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Highest moment order.
        #[arg(long, default_value_t = 4)]
        moments: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01")]
        eps: Vec<f64>,
        /// Radius cap of the distance to the last level.
        #[arg(long, default_value_t = 2)]
        rmax: usize,
        /// Edge or face probability c/n for random families.
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Truncate every level to this vertex degree first.
        #[arg(long)]
        truncate: Option<usize>,
        /// Dimension cap for flag complexes.
        #[arg(long, default_value_t = 2)]
        maxdim: usize,
        #[arg(long, default_value = "experiment.csv")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Battery {
    Standard,
}

#[derive(Subcommand)]
enum Family {
    /// Cycle of length n.
    Torus1d {
        #[arg(long)]
        n: usize,
    },
    /// n×n torus.
    Torus2d {
        #[arg(long)]
        n: usize,
    },
    /// Linial–Meshulam complex with full (d−1)-skeleton.
    Lm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        prob: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Clique complex of G(n, prob).
    Flag {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        prob: f64,
        #[arg(long, default_value_t = 2)]
        maxdim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A named test complex.
    Fixture { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum SequenceFamily {
    Torus1d,
    Torus2d,
    Lm,
    Flag,
}

/// A failed command and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::TooLarge(_) => 1,
            Error::Malformed(_) | Error::Parse { .. } | Error::Json(_) | Error::Io(_) => 2,
            Error::UnknownVertex(_) | Error::Disconnected | Error::Empty | Error::DegreeBound { .. } => 3,
            Error::Hypothesis(_) => 4,
            Error::Numerical(_) => 5,
        };
        Failure { code, message: e.to_string() }
    }
}

fn validation(message: impl Into<String>) -> Failure {
    Failure { code: 3, message: message.into() }
}

fn read_scx(path: &Path) -> Result<ScxDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })?;
    ScxDocument::parse(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn read_complex(path: &Path) -> Result<SimplicialComplex, Failure> {
    Ok(read_scx(path)?.complex()?)
}

fn read_measure(path: &Path) -> Result<RandomRootedComplex, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })?;
    Ok(RandomRootedComplex::from_json(&text)?)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure {
        code: 1,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn validate(file: &Path) -> Result<(), Failure> {
    let doc = read_scx(file)?;
    let report = doc.validate()?;
    println!("vertices: {}", report.n_vertices);
    let f: Vec<String> = report.f_vector.iter().map(ToString::to_string).collect();
    println!("f-vector: ({})", f.join(", "));
    println!("components: {}", report.components);
    for i in &report.duplicate_lines {
        println!("duplicate simplex: entry {}", i + 1);
    }
    for i in &report.non_maximal_lines {
        println!("non-maximal simplex: entry {}", i + 1);
    }
    if report.root_missing {
        println!("root vertex is not in the complex");
    }
    if report.is_valid() {
        println!("valid");
        Ok(())
    } else {
        Err(validation(format!("{} is not a valid .scx file", file.display())))
    }
}

fn betti_cmd(file: &Path, only: Option<usize>, exact: bool, out: Option<&Path>) -> Result<(), Failure> {
    let k = read_complex(file)?;
    if k.is_empty() {
        return Err(Error::Empty.into());
    }
    let n = k.n_vertices();
    let dims: Vec<usize> = match only {
        Some(p) => vec![p],
        None => (0..=k.dim().unwrap_or(0)).collect(),
    };
    let mut csv = String::from("p,b_p,normalized\n");
    let mut lines = Vec::new();
    for p in dims {
        let b = betti(&k, p);
        if !exact && k.count(p) > 0 {
            let nu = spectral_measure(&k, p)?;
            if nu.zero_multiplicity() != b {
                return Err(Error::Numerical(format!(
                    "p={p}: Laplacian kernel has dimension {} but exact rank gives {b}",
                    nu.zero_multiplicity()
                ))
                .into());
            }
        }
        lines.push(format!("p={p} b={b} norm={}", ratio(b, n)));
        writeln!(csv, "{p},{b},{}", ratio(b, n)).unwrap();
    }
    println!("{}", lines.join("; "));
    if let Some(path) = out {
        write_file(path, &csv)?;
    }
    Ok(())
}

fn spectrum(file: &Path, p: usize, out: Option<&Path>) -> Result<(), Failure> {
    let k = read_complex(file)?;
    let nu = spectral_measure(&k, p)?;
    emit(out, &nu.to_csv())?;
    let d = k.max_degree();
    println!("# nu({{0}}) = {}", nu.mass_at_zero());
    println!("# nu(R) = {}", nu.total_mass());
    println!("# spectral radius = {}", nu.spectral_radius());
    println!("# a priori bound 2*sqrt((p+2)D) = {} (D = {d})", 2.0 * (((p + 2) * d) as f64).sqrt());
    println!("# Schur-test bound = {}", laplacian_norm_a_priori(d, p));
    Ok(())
}

fn canon(file: &Path, root: Option<Vertex>) -> Result<(), Failure> {
    let rc = read_scx(file)?.rooted(root)?;
    let form = canonical_form(&rc)?;
    let bits: Vec<String> = form.code.bit_indices().iter().map(ToString::to_string).collect();
    println!("code: {}", bits.join(" "));
    let labels: Vec<String> = form.labeling.iter().map(ToString::to_string).collect();
    println!("# labeling (label -> vertex): {}", labels.join(" "));
    print!("{}", to_scx(&form.code.to_complex(), Some(0)));
    Ok(())
}

fn rooted_arg(arg: &str) -> Result<l2limits::RootedComplex, Failure> {
    let (path, root) = match arg.rsplit_once(':') {
        Some((path, root)) if !root.is_empty() && root.chars().all(|c| c.is_ascii_digit()) => {
            let root = root.parse::<Vertex>().map_err(|e| Failure {
                code: 1,
                message: format!("bad root in {arg:?}: {e}"),
            })?;
            (path, Some(root))
        }
        _ => (arg, None),
    };
    Ok(read_scx(Path::new(path))?.rooted(root)?)
}

fn generate(family: &Family) -> Result<SimplicialComplex, Failure> {
    Ok(match *family {
        Family::Torus1d { n } => torus_tower(1, n)?,
        Family::Torus2d { n } => torus_tower(2, n)?,
        Family::Lm { n, prob, dim, seed } => linial_meshulam(dim, n, prob, seed)?,
        Family::Flag { n, prob, maxdim, seed } => random_flag(n, prob, maxdim, seed)?,
        Family::Fixture { ref name } => fixture(name).map_err(|_| Failure {
            code: 1,
            message: format!("unknown fixture {name:?}; known: {}", FIXTURE_NAMES.join(", ")),
        })?,
    })
}

#[allow(clippy::too_many_arguments)]
fn converge(
    family: SequenceFamily,
    levels: &[usize],
    config: ExperimentConfig,
    c: f64,
    seed: u64,
    truncate: Option<usize>,
    maxdim: usize,
    out: &Path,
) -> Result<(), Failure> {
    use rayon::prelude::*;
    let complexes = levels
        .par_iter()
        .map(|&n| {
            let prob = (c / n as f64).min(1.0);
            let k = match family {
                SequenceFamily::Torus1d => torus_tower(1, n)?,
                SequenceFamily::Torus2d => torus_tower(2, n)?,
                SequenceFamily::Lm => linial_meshulam(2, n, prob, seed)?,
                SequenceFamily::Flag => random_flag(n, prob, maxdim, seed)?,
            };
            let k = match truncate {
                Some(d) => degree_truncate(&k, d),
                None => k,
            };
            Ok((n.to_string(), k))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let report = convergence_experiment(&complexes, &config)?;
    write_file(out, &report.to_csv())?;
    println!("degree bound D = {}, a priori norm bound = {}", report.degree_bound, report.norm_bound);
    for row in &report.rows {
        println!(
            "n={} |V|={} b_{}={} normalized={} dist_to_last={}",
            row.label, row.n_vertices, config.p, row.betti, row.betti_normalized, row.distance_to_last
        );
    }
    for (eps, bound) in config.eps.iter().zip(&report.kernel_bounds) {
        println!("kernel mass bound at eps={eps}: {bound}");
    }
    for (column, trend) in report.trends() {
        println!("trend {column}: {trend:?}");
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Betti { file, p, exact, out } => betti_cmd(&file, p, exact, out.as_deref()),
        Command::Spectrum { file, p, out } => spectrum(&file, p, out.as_deref()),
        Command::Canon { file, root } => canon(&file, root),
        Command::BsDistance { a, b, rmax } => {
            let d = bs_distance(&rooted_arg(&a)?, &rooted_arg(&b)?, rmax)?;
            println!("{d}");
            Ok(())
        }
        Command::Measure { file } => {
            let mu = uniform_rooting(&read_complex(&file)?)?;
            println!("{}", mu.to_json());
            Ok(())
        }
        Command::MeasureDistance { m1, m2, rmax } => {
            let d = measure_distance(&read_measure(&m1)?, &read_measure(&m2)?, rmax)?;
            println!("{d}");
            Ok(())
        }
        Command::MassTransport { measure, battery: Battery::Standard } => {
            let results = run_battery(&read_measure(&measure)?)?;
            println!("function,lhs,rhs,pass");
            for t in &results {
                println!("{},{},{},{}", t.name, t.lhs, t.rhs, t.holds());
            }
            let failing = results.iter().filter(|t| !t.holds()).count();
            println!("# {} of {} identities hold", results.len() - failing, results.len());
            Ok(())
        }
        Command::Truncate { file, degree } => {
            let doc = read_scx(&file)?;
            let t = degree_truncate(&doc.complex()?, degree);
            print!("{}", to_scx(&t, doc.root));
            Ok(())
        }
        Command::Generate { family, out } => emit(out.as_deref(), &to_scx(&generate(&family)?, None)),
        Command::Converge {
            family,
            levels,
            p,
            moments,
            eps,
            rmax,
            c,
            seed,
            truncate,
            maxdim,
            out,
        } => {
            let config = ExperimentConfig {
                p,
                max_order: moments,
                eps,
                r_max: rmax,
                degree_bound: truncate,
            };
            converge(family, &levels, config, c, seed, truncate, maxdim, &out)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("L2LIMITS_THREADS") else {
        return Ok(());
    };
    let n: usize = value.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Failure {
        code: 1,
        message: format!("L2LIMITS_THREADS must be a positive integer, got {value:?}"),
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure { code: 1, message: e.to_string() })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
