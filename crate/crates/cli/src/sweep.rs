//! Sweep experiments: a TOML spec names generators and algorithms, the
//! runner produces one CSV row per (graph, algorithm) pair in spec order.
//! Rows are computed in parallel but written in order, all randomness is
//! derived from the single spec seed, and the output is byte-identical
//! across reruns. Inapplicable pairs are skipped with a note on stderr.

use rayon::prelude::*;
use serde::Deserialize;

use surplus_lab::error::{Error, Result};
use surplus_lab::gen::GeneratorSpec;
use surplus_lab::graph::{regular_surplus_target, Graph};
use surplus_lab::rng::derive_seed;
use surplus_lab::spectral;

use crate::algorithms::{self, AlgoOptions};

/// The sweep specification file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Master seed; every row derives its own stream from it.
    #[serde(default)]
    pub seed: u64,
    /// Best-of budget per randomized algorithm.
    #[serde(default = "default_trials")]
    pub trials: u32,
    /// Generator token strings, e.g. `"paley 13"`.
    pub graphs: Vec<String>,
    /// Algorithm names; see `surplus-lab cut --help` for the list.
    pub algorithms: Vec<String>,
    /// Forbidden clique/cycle size for the parametrized algorithms.
    pub r: Option<usize>,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
}

fn default_trials() -> u32 {
    surplus_lab::sampling::DEFAULT_TRIALS
}

pub const CSV_HEADER: &str = "graph,n,m,avg_degree,triangles,triangle_surplus,algorithm,\
crossing,surplus,edwards,shearer_raw,eigenvalue_ub,target_form,wall_ms";

pub fn parse_spec(text: &str) -> Result<SweepSpec> {
    toml::from_str(text).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("sweep spec: {e}"),
    })
}

/// One graph's precomputed columns.
struct GraphColumns {
    spec: String,
    graph: Graph,
    n: usize,
    m: u64,
    avg_degree: f64,
    triangles: u64,
    triangle_surplus: f64,
    edwards: f64,
    shearer_raw: f64,
    eigenvalue_ub: Option<f64>,
    target_form: Option<f64>,
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt6).unwrap_or_default()
}

/// Runs the sweep and returns the full CSV text. `timings` adds wall-time
/// values; without it the column stays empty so reruns are byte-identical.
pub fn run_sweep(spec: &SweepSpec, timings: bool) -> Result<String> {
    let mut graphs = Vec::new();
    for text in &spec.graphs {
        let gspec = GeneratorSpec::parse(text)?;
        let g = gspec.build()?;
        let report = g.bound_report();
        let eigenvalue_ub = spectral::lambda_min(&g).ok().map(|r| r.upper_bound);
        let target_form = g.regular_degree().map(|d| {
            regular_surplus_target(g.n() as f64, d as f64, report.triangle_surplus)
        });
        graphs.push(GraphColumns {
            spec: gspec.to_token_string(),
            n: g.n(),
            m: g.m(),
            avg_degree: g.average_degree(),
            triangles: report.triangle_count,
            triangle_surplus: report.triangle_surplus,
            edwards: report.edwards,
            shearer_raw: report.shearer_raw,
            eigenvalue_ub,
            target_form,
            graph: g,
        });
    }
    let opts = AlgoOptions {
        gamma: spec.gamma,
        epsilon: spec.epsilon,
        r: spec.r,
        dump_vectors: false,
    };
    let pairs: Vec<(usize, &str)> = graphs
        .iter()
        .enumerate()
        .flat_map(|(gi, _)| spec.algorithms.iter().map(move |a| (gi, a.as_str())))
        .collect();
    let rows: Vec<Result<Option<String>>> = pairs
        .par_iter()
        .map(|&(gi, algo)| {
            let cols = &graphs[gi];
            if let Err(reason) = algorithms::applicability(algo, &cols.graph, &opts) {
                eprintln!("skip: {} / {algo}: {reason}", cols.spec);
                return Ok(None);
            }
            let row_seed = derive_seed(spec.seed, &format!("{}|{algo}", cols.spec), 0);
            let start = std::time::Instant::now();
            let report = algorithms::run(algo, &cols.graph, row_seed, spec.trials, &opts)?;
            let wall = if timings {
                format!("{}", start.elapsed().as_millis())
            } else {
                String::new()
            };
            let surplus = report.cut.surplus_twice() as f64 / 2.0;
            Ok(Some(format!(
                "{},{},{},{},{},{},{algo},{},{:.1},{},{},{},{},{wall}",
                cols.spec,
                cols.n,
                cols.m,
                fmt6(cols.avg_degree),
                cols.triangles,
                fmt6(cols.triangle_surplus),
                report.cut.crossing(),
                surplus,
                fmt6(cols.edwards),
                fmt6(cols.shearer_raw),
                fmt_opt(cols.eigenvalue_ub),
                fmt_opt(cols.target_form),
            )))
        })
        .collect();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        if let Some(line) = row? {
            out.push_str(&line);
            out.push('\n');
        }
    }
    Ok(out)
}
