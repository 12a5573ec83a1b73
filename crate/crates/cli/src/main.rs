//! Command-line surface: invariant computation, the linking-number and Burau
//! oracles, pillowcase figures, and the corpus verification harness.
//!
//! Exit codes: 1 for parse and I/O errors, 2 when the closure does not have
//! two components, 3 when the signed count is indeterminate.

use braidrep_core::braid::{linking_number, BraidError, BraidWord};
use braidrep_core::fox_burau::{burau, burau_mod2, d_block_certificate};
use braidrep_core::pillowcase::{graph_line, render_svg, signed_intersections};
use braidrep_core::solver::{compute_h, SolverConfig, SolverError};
use braidrep_core::verify::{run_verification, CorpusSpec};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

const EXIT_PARSE: i32 = 1;
const EXIT_NOT_TWO_COMPONENTS: i32 = 2;
const EXIT_INDETERMINATE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "braidrep",
    about = "Signed fixed-point count invariant of two-component braid closures",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BraidArg {
    /// Braid word as whitespace-separated signed generator indices,
    /// e.g. "1 1" for sigma_1^2 and "-2" for sigma_2^{-1}.
    braid: String,
    /// Strand count override (defaults to largest index + 1).
    #[arg(long)]
    strands: Option<usize>,
}

#[derive(Args)]
struct SolverArgs {
    /// Seed for the multistart sampler; falls back to BRAIDREP_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of refinement starts (default 400 per strand).
    #[arg(long)]
    starts: Option<usize>,
    /// Residual tolerance for accepting a fixed point.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the signed fixed-point count h and emit the result as JSON.
    H {
        #[command(flatten)]
        braid: BraidArg,
        #[command(flatten)]
        solver: SolverArgs,
        /// Also write the JSON document to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Linking number of the two components of the closure.
    Lk {
        #[command(flatten)]
        braid: BraidArg,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Burau matrix of the braid word: symbolic by default, evaluated
    /// with --t, reduced mod 2 with --mod2.
    Burau {
        #[command(flatten)]
        braid: BraidArg,
        /// Evaluate the matrix at this parameter value.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        /// Print the mod-2 reduction of the t = -1 evaluation.
        #[arg(long)]
        mod2: bool,
        /// Print the 1 - D invertibility certificate instead of the matrix.
        #[arg(long)]
        certificate: bool,
    },
    /// Exact pillowcase data for the torus braid sigma_1^{2k}.
    Pillowcase {
        /// Half the number of crossings.
        #[arg(long)]
        k: u32,
        /// Write an SVG figure to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the seeded verification corpus and report h against lk.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        /// Number of corpus cases.
        #[arg(long)]
        cases: Option<usize>,
        /// Multistart budget per strand for each case.
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn env_seed() -> Option<u64> {
    std::env::var("BRAIDREP_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
}

fn braid_exit_code(e: &BraidError) -> i32 {
    match e {
        BraidError::NotTwoComponents { .. } => EXIT_NOT_TWO_COMPONENTS,
        _ => EXIT_PARSE,
    }
}

fn solver_exit_code(e: &SolverError) -> i32 {
    match e {
        SolverError::Braid(inner) => braid_exit_code(inner),
        _ => EXIT_PARSE,
    }
}

fn emit(doc: &str, copy: &Option<PathBuf>) -> Result<(), i32> {
    println!("{}", doc);
    if let Some(path) = copy {
        std::fs::write(path, format!("{}\n", doc)).map_err(|e| {
            eprintln!("error: cannot write {}: {}", path.display(), e);
            EXIT_PARSE
        })?;
    }
    Ok(())
}

fn parse_braid(arg: &BraidArg) -> Result<BraidWord, i32> {
    BraidWord::parse(&arg.braid, arg.strands).map_err(|e| {
        eprintln!("error: {}", e);
        braid_exit_code(&e)
    })
}

fn run() -> Result<(), i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::H {
            braid,
            solver,
            json,
        } => {
            let b = parse_braid(&braid)?;
            let defaults = SolverConfig::default();
            let cfg = SolverConfig {
                seed: solver.seed.or_else(env_seed).unwrap_or(0),
                starts: solver.starts,
                residual_tol: solver.tol.unwrap_or(defaults.residual_tol),
                ..defaults
            };
            let result = compute_h(&b, None, &cfg).map_err(|e| {
                eprintln!("error: {}", e);
                solver_exit_code(&e)
            })?;
            let doc = serde_json::to_string(&result).expect("serializable result");
            emit(&doc, &json)?;
            if result.h.is_none() {
                eprintln!("error: signed count is indeterminate (degenerate class)");
                return Err(EXIT_INDETERMINATE);
            }
            Ok(())
        }
        Command::Lk { braid, json } => {
            let b = parse_braid(&braid)?;
            let lk = linking_number(&b).map_err(|e| {
                eprintln!("error: {}", e);
                braid_exit_code(&e)
            })?;
            let doc = serde_json::json!({
                "braid": b.to_string(),
                "n": b.strand_count(),
                "lk": lk,
            });
            emit(&serde_json::to_string(&doc).unwrap(), &json)?;
            Ok(())
        }
        Command::Burau {
            braid,
            t,
            mod2,
            certificate,
        } => {
            let b = parse_braid(&braid)?;
            if certificate {
                let cert = d_block_certificate(&b).map_err(|e| {
                    eprintln!("error: {}", e);
                    match e {
                        braidrep_core::fox_burau::FoxError::Braid(ref inner) => {
                            braid_exit_code(inner)
                        }
                        _ => EXIT_PARSE,
                    }
                })?;
                let doc = serde_json::json!({
                    "braid": b.to_string(),
                    "is_invertible": cert.is_invertible,
                    "det_mod2": cert.det_mod2,
                    "det": cert.det,
                    "conjugator": cert.conjugator.to_string(),
                    "normal_form": cert.normal_form.to_string(),
                });
                println!("{}", serde_json::to_string(&doc).unwrap());
                return Ok(());
            }
            if mod2 {
                let m = burau_mod2(&b);
                let rows: Vec<Vec<u8>> = (0..m.rows())
                    .map(|i| (0..m.cols()).map(|j| m.get(i, j) as u8).collect())
                    .collect();
                println!("{}", serde_json::to_string(&rows).unwrap());
                return Ok(());
            }
            let matrix = burau(&b);
            match t {
                // t = -1 is the value the theory cares about; keep it exact
                Some(t) if t == -1.0 => {
                    println!("{}", serde_json::to_string(&matrix.eval_neg1()).unwrap());
                }
                Some(t) => {
                    let m = matrix.eval(t);
                    let rows: Vec<Vec<f64>> = (0..m.rows)
                        .map(|i| (0..m.cols).map(|j| m[(i, j)]).collect())
                        .collect();
                    println!("{}", serde_json::to_string(&rows).unwrap());
                }
                None => {
                    let rows: Vec<Vec<String>> = (0..matrix.size())
                        .map(|i| {
                            (0..matrix.size())
                                .map(|j| matrix.entry(i, j).to_string())
                                .collect()
                        })
                        .collect();
                    println!("{}", serde_json::to_string(&rows).unwrap());
                }
            }
            Ok(())
        }
        Command::Pillowcase { k, svg, json } => {
            if k == 0 {
                eprintln!("error: k must be positive");
                return Err(EXIT_PARSE);
            }
            let line = graph_line(k);
            let data = signed_intersections(&line).map_err(|e| {
                eprintln!("error: {}", e);
                EXIT_PARSE
            })?;
            if let Some(path) = &svg {
                render_svg(&[line], &data.points, path).map_err(|e| {
                    eprintln!("error: {}", e);
                    EXIT_PARSE
                })?;
            }
            let doc = serde_json::json!({
                "k": k,
                "line": line,
                "count": data.count,
                "thetas_over_pi": data.thetas_over_pi,
                "points": data.points,
                "common_sign": data.common_sign,
            });
            emit(&serde_json::to_string(&doc).unwrap(), &json)?;
            Ok(())
        }
        Command::Verify {
            seed,
            cases,
            starts,
            json,
        } => {
            let mut spec = CorpusSpec::default();
            if let Some(seed) = seed.or_else(env_seed) {
                spec.seed = seed;
            }
            if let Some(cases) = cases {
                spec.cases = cases;
            }
            if let Some(starts) = starts {
                spec.starts_per_strand = starts;
            }
            let report = run_verification(&spec);
            for c in &report.cases {
                eprintln!(
                    "case {:>3} [{}] n={} h={} lk={} status={:?} ({} ms)",
                    c.id,
                    c.braid,
                    c.n,
                    c.h.map_or("indeterminate".to_string(), |h| h.to_string()),
                    c.lk,
                    c.status,
                    c.elapsed_ms
                );
            }
            eprintln!(
                "{} cases, {} mismatches, indeterminate rate {:.1}%, global sign {:?}, {} ms",
                report.cases.len(),
                report.mismatches,
                100.0 * report.indeterminate_rate,
                report.global_sign,
                report.total_ms
            );
            let doc = serde_json::to_string(&report).expect("serializable report");
            emit(&doc, &json)?;
            if report.mismatches > 0 {
                return Err(EXIT_PARSE);
            }
            Ok(())
        }
    }
}

fn main() {
    if let Err(code) = run() {
        std::process::exit(code);
    }
}
