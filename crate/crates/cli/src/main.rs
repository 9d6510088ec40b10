//! `larkit`: arrangements, validation and generators from the command line.
//!
//! Exit status is 0 on success, 1 when a computation or validation fails
//! and 2 on usage errors (bad flags, unreadable or malformed input).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use larkit::arrange2d::{planar_arrangement, SegmentSoup, DEFAULT_EPS};
use larkit::arrange3d::{merge, MergeOptions};
use larkit::generators::{centered, cuboidal_grid, random_segments, transform, GridSpec};
use larkit::io::{self, LarDocument};
use larkit::lar::{validate_chain_complex, ChainComplexResult, Complex};
use larkit::LarError;

#[derive(Parser)]
#[command(name = "larkit", version, about = "Cellular complexes as sparse arrays: 2D and 3D arrangements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Tolerance {
    /// Vertex identification tolerance (model units)
    #[arg(long, env = "LARKIT_EPS", default_value_t = DEFAULT_EPS)]
    eps: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Arrange the segments (cells "1") of a 2D document
    Arrange2 {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        tol: Tolerance,
        #[arg(long)]
        output: PathBuf,
        /// Directory for d1.mtx and d2.mtx
        #[arg(long)]
        operators: Option<PathBuf>,
    },
    /// Merge 3D complexes (faces "2", optional edges "1") into one arrangement
    Arrange3 {
        #[arg(long, num_args = 1.., required = true)]
        input: Vec<PathBuf>,
        #[command(flatten)]
        tol: Tolerance,
        #[arg(long)]
        output: PathBuf,
        /// Directory for d1.mtx, d2.mtx and d3.mtx
        #[arg(long)]
        operators: Option<PathBuf>,
        /// Worker threads for face fragmentation
        #[arg(long)]
        parallel: Option<usize>,
        /// Also write the cells as an OBJ mesh
        #[arg(long)]
        obj: Option<PathBuf>,
    },
    /// Check cell tables and, with --operators, the chain complex
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        operators: Option<PathBuf>,
    },
    /// Print cell counts and Euler characteristics
    Euler {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write a cuboidal grid
    Grid {
        /// Cells per axis, e.g. 3,3,3
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 1, 1])]
        shape: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        size: f64,
        /// Move the vertex centroid to the origin first
        #[arg(long)]
        center: bool,
        /// Rotation angles about x, y, z in radians (applied x first)
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        rotate: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        translate: Option<Vec<f64>>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Write random segments as a 2D document
    Segments {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// xmin,ymin,xmax,ymax
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [0.0, 0.0, 1.0, 1.0])]
        bbox: Vec<f64>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Export the cells of an arranged complex as an exploded OBJ mesh
    Explode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        operators: PathBuf,
        #[arg(long, default_value_t = 1.2)]
        scale: f64,
        #[arg(long)]
        output: PathBuf,
    },
}

/// Error carrying its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let error = e.into();
        let code = match error.downcast_ref::<LarError>() {
            Some(LarError::Io { .. } | LarError::Json(_) | LarError::Parse(_) | LarError::Unsupported(_)) => 2,
            _ => 1,
        };
        Failure { code, error }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, error: anyhow::anyhow!(msg.into()) }
}

fn semantic(msg: impl Into<String>) -> Failure {
    Failure { code: 1, error: anyhow::anyhow!(msg.into()) }
}

fn load(path: &Path) -> Result<Complex, Failure> {
    io::load_lar(path).map_err(|e| Failure { code: 2, error: anyhow::Error::new(e) })
}

fn report(result: &ChainComplexResult) {
    let counts = result.counts();
    let names: Vec<String> = counts.iter().enumerate().map(|(p, n)| format!("{p}-cells {n}")).collect();
    println!("{}", names.join(", "));
    if result.exterior.is_some() {
        let mut with = counts.clone();
        *with.last_mut().unwrap() += 1;
        println!("with exterior: top cells {}", with.last().unwrap());
    }
    println!("euler: interior {}, with exterior {}", result.euler_interior(), result.euler_with_exterior());
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Arrange2 { input, tol, output, operators } => {
            let c = load(&input)?;
            if c.geometry.dim() != 2 {
                return Err(usage(format!("{} is {}D, arrange2 needs 2D", input.display(), c.geometry.dim())));
            }
            let edges = c.table(1).ok_or_else(|| usage("input has no cells \"1\""))?.clone();
            let soup = SegmentSoup::new(c.geometry, edges)?;
            let arr = planar_arrangement(&soup, tol.eps)?;
            let result = ChainComplexResult {
                geometry: arr.geometry,
                tables: vec![arr.edges, arr.faces],
                boundaries: vec![arr.d1, arr.d2],
                exterior: arr.exterior,
            };
            io::save_result(&result, &output, operators.as_deref())?;
            report(&result);
        }
        Command::Arrange3 { input, tol, output, operators, parallel, obj } => {
            let inputs = input.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
            if let Some((p, c)) = input.iter().zip(&inputs).find(|(_, c)| c.geometry.dim() != 3) {
                return Err(usage(format!("{} is {}D, arrange3 needs 3D", p.display(), c.geometry.dim())));
            }
            let opts = MergeOptions { eps: tol.eps, threads: parallel };
            let result = merge(&inputs, &opts).context("merge failed")?;
            io::save_result(&result, &output, operators.as_deref())?;
            if let Some(path) = obj {
                io::export_obj(&result, path)?;
            }
            report(&result);
        }
        Command::Validate { input, operators } => {
            let doc = io::load_document(&input)?;
            let complex = doc.to_complex().map_err(|e| Failure { code: 1, error: e.into() })?;
            println!("PASS tables: {} vertices, tables {:?}", complex.geometry.len(), complex.tables.keys().collect::<Vec<_>>());
            if let Some(dir) = operators {
                let result = io::load_result(&input, &dir)?;
                let report = validate_chain_complex(&result);
                print!("{report}");
                if !report.passed() {
                    let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
                    return Err(semantic(format!("validation failed: {}", names.join(", "))));
                }
            }
        }
        Command::Euler { input } => {
            let doc = io::load_document(&input)?;
            let complex = doc.to_complex()?;
            let mut counts = vec![complex.geometry.len()];
            for p in 1..=doc.dim {
                counts.push(complex.count(p).unwrap_or(0));
            }
            let chi = |c: &[usize]| c.iter().enumerate().map(|(p, &n)| if p % 2 == 0 { n as i64 } else { -(n as i64) }).sum::<i64>();
            let names: Vec<String> = counts.iter().enumerate().map(|(p, n)| format!("{p}-cells {n}")).collect();
            println!("{}", names.join(", "));
            let has_exterior = doc.metadata.as_ref().and_then(|m| m.get("exterior_column")).is_some_and(|v| v.is_u64());
            let mut with = counts.clone();
            if has_exterior {
                *with.last_mut().unwrap() += 1;
            }
            println!("euler: interior {}, with exterior {}", chi(&counts), chi(&with));
        }
        Command::Grid { shape, size, center, rotate, translate, output } => {
            let triple = |name: &str, v: &[f64]| match v {
                [a, b, c] => Ok([*a, *b, *c]),
                _ => Err(usage(format!("--{name} takes three comma-separated values"))),
            };
            if shape.len() != 3 {
                return Err(usage("--shape takes three comma-separated counts"));
            }
            let r = rotate.as_deref().map(|v| triple("rotate", v)).transpose()?;
            let t = translate.as_deref().map(|v| triple("translate", v)).transpose()?;
            let spec = GridSpec { shape: [shape[0], shape[1], shape[2]], size };
            let mut c = cuboidal_grid(&spec)?;
            if center {
                c.geometry = centered(&c.geometry);
            }
            if r.is_some() || t.is_some() {
                c.geometry = transform(&c.geometry, r.unwrap_or([0.0; 3]), t.unwrap_or([0.0; 3]));
            }
            io::save_lar(&c, &output)?;
            println!("grid {:?}: {} vertices, {} cells", spec.shape, c.geometry.len(), c.count(3).unwrap_or(0));
        }
        Command::Segments { count, seed, bbox, output } => {
            if bbox.len() != 4 {
                return Err(usage("--bbox takes xmin,ymin,xmax,ymax"));
            }
            if count == 0 {
                return Err(usage("--count must be at least 1"));
            }
            let soup = random_segments(count, [bbox[0], bbox[1], bbox[2], bbox[3]], seed)?;
            let c = Complex::new(soup.geometry).with_table(soup.edges);
            io::save_document(&LarDocument::from_complex(&c, None), &output)?;
            println!("{count} segments written");
        }
        Command::Explode { input, operators, scale, output } => {
            if scale < 1.0 {
                return Err(usage("--scale must be at least 1"));
            }
            let result = io::load_result(&input, &operators)?;
            let cells = io::explode(&result, scale);
            io::export_exploded_obj(&result, &cells, &output)?;
            println!("{} cells exploded", cells.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let mut msg = f.error.to_string();
            for cause in f.error.chain().skip(1) {
                let c = cause.to_string();
                if !msg.contains(&c) {
                    msg = format!("{msg}: {c}");
                }
            }
            eprintln!("error: {msg}");
            ExitCode::from(f.code)
        }
    }
}
