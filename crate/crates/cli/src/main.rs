//! `surplus-lab`: generate graphs, compute cuts by named algorithm, verify
//! module invariants, and run CSV sweep experiments.
//!
//! Exit codes: 0 success, 2 usage or parse errors, 3 inapplicable
//! algorithm or violated precondition, 4 numeric or internal invariant
//! failure. `SURPLUS_LAB_THREADS` caps worker threads.

mod algorithms;
mod sweep;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use surplus_lab::error::Error;
use surplus_lab::gen::GeneratorSpec;
use surplus_lab::graph::Graph;
use surplus_lab::rng::derive_seed;
use surplus_lab::structure::{good_path_profile, GoodPathParams};
use surplus_lab::oracle;

#[derive(Parser)]
#[command(
    name = "surplus-lab",
    version,
    about = "Cut-surplus laboratory: generators, cut algorithms, oracles, invariant suites and sweeps",
    after_help = "CSV columns of `sweep`: graph,n,m,avg_degree,triangles,triangle_surplus,\
algorithm,crossing,surplus,edwards,shearer_raw,eigenvalue_ub,target_form,wall_ms \
(wall_ms stays empty unless --timings is passed, keeping reruns byte-identical)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SeedArg {
    /// Master seed; component streams are derived by hashing.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list (stdout or --output).
    Generate {
        /// Generator tokens, e.g. `paley 13` or `gnp 100 0.1`.
        #[arg(required = true)]
        family: Vec<String>,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a named cut algorithm on an edge-list file.
    Cut {
        graph: PathBuf,
        /// One of the named algorithms; see --help for the list.
        #[arg(value_parser = algorithms::ALGORITHMS.to_vec())]
        algorithm: String,
        #[command(flatten)]
        seed: SeedArg,
        /// Best-of budget for randomized algorithms.
        #[arg(long, default_value_t = surplus_lab::sampling::DEFAULT_TRIALS)]
        trials: u32,
        /// Vector scale for the hyperplane families.
        #[arg(long)]
        gamma: Option<f64>,
        /// Slack parameter for the sampling routines.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Forbidden clique or odd-cycle size.
        #[arg(long)]
        r: Option<usize>,
        /// Print the vector assignment used by a hyperplane family.
        #[arg(long)]
        dump_vectors: bool,
    },
    /// Exact maximum cut of a small graph (n <= 30).
    Oracle { graph: PathBuf },
    /// Dyadic good-path profile of a graph, as JSON.
    Profile {
        graph: PathBuf,
        /// Odd forbidden-cycle length (>= 5).
        #[arg(long, default_value_t = 5)]
        r: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Run an invariant suite over the bundled corpus.
    Verify {
        /// core | rounding | vectors | structure | sampling | spectral | all
        suite: String,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Run a sweep experiment described by a TOML spec file.
    Sweep {
        spec: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Fill the wall_ms column (breaks byte-identical reruns).
        #[arg(long)]
        timings: bool,
    },
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (e.g. `surplus-lab generate ... | head`)
    // instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    init_thread_pool();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } => ExitCode::from(2),
                Error::Unsupported(_) => ExitCode::from(3),
                Error::Numeric(_) | Error::Invariant(_) => ExitCode::from(4),
            }
        }
    }
}

/// `SURPLUS_LAB_THREADS` caps rayon's worker count.
fn init_thread_pool() {
    if let Ok(value) = std::env::var("SURPLUS_LAB_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        } else {
            eprintln!("warning: ignoring non-numeric SURPLUS_LAB_THREADS=`{value}`");
        }
    }
}

fn read_graph(path: &PathBuf) -> Result<Graph, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("{}: {e}", path.display()),
    })?;
    Graph::parse_edge_list(&text)
}

fn write_or_print(output: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("{}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Generate {
            family,
            seed,
            output,
        } => {
            let mut tokens = family.join(" ");
            let spec = GeneratorSpec::parse(&tokens)?;
            // Random families without an explicit seed token pick up the
            // --seed flag so the header records the full recipe.
            let spec = reseed(spec, seed.seed);
            tokens = spec.to_token_string();
            let g = spec.build()?;
            let header = vec![
                format!("surplus-lab generate {tokens}"),
                format!("n = {}, m = {}", g.n(), g.m()),
            ];
            write_or_print(output.as_ref(), &g.to_edge_list(&header))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Cut {
            graph,
            algorithm,
            seed,
            trials,
            gamma,
            epsilon,
            r,
            dump_vectors,
        } => {
            let g = read_graph(&graph)?;
            let opts = algorithms::AlgoOptions {
                gamma,
                epsilon,
                r,
                dump_vectors,
            };
            let report = algorithms::run(
                &algorithm,
                &g,
                derive_seed(seed.seed, &algorithm, 0),
                trials,
                &opts,
            )?;
            println!("graph: n = {}, m = {}", g.n(), g.m());
            println!("algorithm: {algorithm}");
            println!("crossing: {}", report.cut.crossing());
            println!("surplus: {:.1}", report.cut.surplus());
            for (key, value) in &report.details {
                println!("{key}: {value}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { graph } => {
            let g = read_graph(&graph)?;
            let r = oracle::max_cut_exact(&g)?;
            println!("mc: {}", r.mc);
            println!("surplus: {:.1}", r.witness.surplus());
            println!("witness: {}", r.witness.side_string());
            Ok(ExitCode::SUCCESS)
        }
        Command::Profile { graph, r, seed } => {
            let g = read_graph(&graph)?;
            let mut params = GoodPathParams::new(r, seed.seed);
            params.sample_above_cap = true;
            let prof = good_path_profile(&g, &params)?;
            println!("{}", prof.to_debug_json());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, seed } => {
            let Some(checks) = verify::run_suite(&suite, seed.seed) else {
                eprintln!(
                    "error: unknown suite `{suite}` (expected one of {})",
                    verify::SUITES.join(", ")
                );
                return Ok(ExitCode::from(2));
            };
            let mut failures = 0usize;
            for check in &checks {
                match &check.failure {
                    None => println!("ok   {}", check.name),
                    Some(detail) => {
                        failures += 1;
                        println!("FAIL {}\n{detail}", check.name);
                    }
                }
            }
            println!("{} checks, {failures} failures", checks.len());
            if failures == 0 {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(4))
            }
        }
        Command::Sweep {
            spec,
            output,
            timings,
        } => {
            let text = std::fs::read_to_string(&spec).map_err(|e| Error::Parse {
                line: 0,
                msg: format!("{}: {e}", spec.display()),
            })?;
            let spec = sweep::parse_spec(&text)?;
            let csv = sweep::run_sweep(&spec, timings)?;
            write_or_print(output.as_ref(), &csv)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Injects the CLI seed into seedless random-family specs.
fn reseed(spec: GeneratorSpec, seed: u64) -> GeneratorSpec {
    match spec {
        GeneratorSpec::Gnp { n, p, seed: 0 } => GeneratorSpec::Gnp { n, p, seed },
        GeneratorSpec::TriangleFreeGnp { n, p, seed: 0 } => {
            GeneratorSpec::TriangleFreeGnp { n, p, seed }
        }
        GeneratorSpec::BipartiteRandom { a, b, p, seed: 0 } => {
            GeneratorSpec::BipartiteRandom { a, b, p, seed }
        }
        GeneratorSpec::Blowup { base, s } => GeneratorSpec::Blowup {
            base: Box::new(reseed(*base, seed)),
            s,
        },
        other => other,
    }
}
