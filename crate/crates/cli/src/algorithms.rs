//! The named cut algorithms exposed by `cut` and `sweep`: applicability
//! checks (so heterogeneous sweeps degrade to skips instead of crashes)
//! and runners that report each algorithm's self-declared guarantee
//! statistics alongside the cut.

use surplus_lab::error::{Error, Result};
use surplus_lab::graph::Graph;
use surplus_lab::rng::derive_seed;
use surplus_lab::rounding::{analytic_expected_cut, augment_with_identity, hyperplane_round};
use surplus_lab::sampling::{
    bucket_neighborhood_cut, codegree_trimming_cut, composite_kr_cut, kr_recursive_cut,
    sparse_set_cut, triangle_sampling_cut, SamplingCutResult,
};
use surplus_lab::structure::{dyadic_codegree_bucket, good_path_profile, st_sets, GoodPathParams};
use surplus_lab::vectors::{
    c5_bucket_vectors, odd_cycle_st_vectors, regime_gamma, regular_vectors, signed_vectors,
    srg_gamma, BucketSets, RegularVectorParams, SrgParams, DEFAULT_GAMMA_SCALE,
};
use surplus_lab::{oracle, Cut};

pub const ALGORITHMS: &[&str] = &[
    "hyperplane-regular",
    "hyperplane-srg",
    "hyperplane-signed",
    "c5-bucket",
    "odd-cycle-st",
    "triangle-sampling",
    "bucket-sampling",
    "codegree-trim",
    "kr-recursive",
    "composite-kr",
    "local-search",
    "oracle",
];

/// Tunable knobs shared by all algorithms; unset fields fall back to each
/// algorithm's documented default.
#[derive(Clone, Copy, Debug, Default)]
pub struct AlgoOptions {
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub r: Option<usize>,
    /// Attach the vector assignment's debug text to rounding reports.
    pub dump_vectors: bool,
}

/// A finished run: the cut plus the guarantee statistics the algorithm
/// reports about itself.
pub struct AlgoReport {
    pub cut: Cut,
    pub details: Vec<(String, String)>,
}

/// Checks whether `name` applies to `g`; `Err` carries the violated
/// precondition, worded for the skip row / exit-3 message.
pub fn applicability(name: &str, g: &Graph, opts: &AlgoOptions) -> Result<()> {
    let need_regular = || -> Result<u32> {
        g.regular_degree()
            .ok_or_else(|| Error::Unsupported("requires a regular graph".into()))
    };
    match name {
        "oracle" => {
            if g.n() > oracle::EXACT_CAP {
                return Err(Error::Unsupported(format!(
                    "exact oracle capped at n <= {}, got {}",
                    oracle::EXACT_CAP,
                    g.n()
                )));
            }
        }
        "local-search" | "composite-kr" => {}
        "kr-recursive" => {
            if opts.r.unwrap_or(3) < 3 {
                return Err(Error::Unsupported("requires r >= 3".into()));
            }
        }
        "triangle-sampling" => {
            if g.m() == 0 {
                return Err(Error::Unsupported("requires at least one edge".into()));
            }
        }
        "bucket-sampling" => {
            dyadic_codegree_bucket(g, 0.1)?;
        }
        "hyperplane-regular" => {
            RegularVectorParams::for_graph(g, 0.5)?;
        }
        "hyperplane-srg" => {
            SrgParams::from_graph(g)?;
        }
        "hyperplane-signed" => {
            let d = need_regular()?;
            if d == 0 || 2 * d as u64 > g.n() as u64 {
                return Err(Error::Unsupported("requires a regular graph with d <= n/2".into()));
            }
        }
        "c5-bucket" => {
            need_regular()?;
            dyadic_codegree_bucket(g, 0.1)?;
        }
        "odd-cycle-st" => {
            let r = opts.r.unwrap_or(5);
            if r < 5 || r.is_multiple_of(2) {
                return Err(Error::Unsupported("requires an odd r >= 5".into()));
            }
        }
        "codegree-trim" => {
            let d = need_regular()?;
            if d == 0 || 2 * d as u64 > g.n() as u64 {
                return Err(Error::Unsupported("requires a regular graph with d <= n/2".into()));
            }
        }
        other => {
            return Err(Error::Unsupported(format!("unknown algorithm `{other}`")));
        }
    }
    Ok(())
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.6}")
}

fn rounding_details(
    g: &Graph,
    label: &str,
    va: surplus_lab::rounding::VectorAssignment,
    seed: u64,
    trials: u32,
    dump_vectors: bool,
    extra: Vec<(String, String)>,
) -> Result<AlgoReport> {
    let aug = augment_with_identity(g, &va)?;
    let expect = analytic_expected_cut(g, &aug)?;
    let out = hyperplane_round(g, &aug, seed, trials)?;
    let mut details = vec![
        ("family".into(), label.to_string()),
        ("analytic_expectation".into(), fmt_f64(expect)),
        (
            "analytic_surplus".into(),
            fmt_f64(expect - g.m() as f64 / 2.0),
        ),
        ("mean_crossing".into(), fmt_f64(out.mean_crossing)),
        ("trials".into(), trials.to_string()),
    ];
    details.extend(extra);
    if dump_vectors {
        details.push(("vectors".into(), format!("\n{}", va.to_debug_text())));
    }
    Ok(AlgoReport {
        cut: out.cut,
        details,
    })
}

fn sampling_details(result: SamplingCutResult, extra: Vec<(String, String)>) -> AlgoReport {
    let (x, y, z) = result.xyz;
    let mut details = vec![
        ("x_cross".into(), x.to_string()),
        ("y_internal_a".into(), y.to_string()),
        ("z_internal_b".into(), z.to_string()),
        (
            "chain_floor_surplus".into(),
            fmt_f64((x as f64 - y as f64 - z as f64) / 2.0),
        ),
        ("parts".into(), result.parts.len().to_string()),
        ("trials".into(), result.trials.to_string()),
    ];
    details.extend(extra);
    AlgoReport {
        cut: result.cut,
        details,
    }
}

/// Runs a named algorithm. `seed` is already component-derived by the
/// caller; `trials` is the best-of budget for randomized routines.
pub fn run(
    name: &str,
    g: &Graph,
    seed: u64,
    trials: u32,
    opts: &AlgoOptions,
) -> Result<AlgoReport> {
    applicability(name, g, opts)?;
    let epsilon = opts.epsilon.unwrap_or(0.1);
    match name {
        "oracle" => {
            let r = oracle::max_cut_exact(g)?;
            Ok(AlgoReport {
                details: vec![
                    ("method".into(), format!("{:?}", r.method)),
                    ("exact".into(), "true".into()),
                    ("witness".into(), r.witness.side_string()),
                ],
                cut: r.witness,
            })
        }
        "local-search" => {
            let r = oracle::local_search(g, seed, trials);
            Ok(AlgoReport {
                details: vec![
                    ("restarts".into(), trials.to_string()),
                    ("exact".into(), "false".into()),
                ],
                cut: r.witness,
            })
        }
        "hyperplane-regular" => {
            let d = g.regular_degree().expect("applicability checked");
            let mut choice = regime_gamma(g.n(), d, g.triangle_surplus(), DEFAULT_GAMMA_SCALE);
            if let Some(gamma) = opts.gamma {
                choice.gamma = gamma;
                choice.edge_ip_bound = f64::NAN;
            }
            let params = RegularVectorParams::for_graph(g, choice.gamma)?;
            let va = regular_vectors(g, &params)?;
            rounding_details(
                g,
                "regular",
                va,
                seed,
                trials,
                opts.dump_vectors,
                vec![
                    ("gamma".into(), format!("{:e}", choice.gamma)),
                    ("regime".into(), format!("{:?}", choice.regime)),
                ],
            )
        }
        "hyperplane-srg" => {
            let p = SrgParams::from_graph(g)?;
            let mut choice = srg_gamma(&p);
            if let Some(gamma) = opts.gamma {
                choice.gamma = gamma;
                choice.edge_ip_bound = f64::NAN;
            }
            let params = RegularVectorParams::for_graph(g, choice.gamma)?;
            let va = regular_vectors(g, &params)?;
            rounding_details(
                g,
                "strongly-regular",
                va,
                seed,
                trials,
                opts.dump_vectors,
                vec![
                    ("gamma".into(), format!("{:e}", choice.gamma)),
                    ("regime".into(), format!("{:?}", choice.regime)),
                    ("edge_ip_bound".into(), format!("{:e}", choice.edge_ip_bound)),
                    ("eta".into(), p.eta.to_string()),
                    ("mu".into(), p.mu.to_string()),
                    ("triangle_surplus".into(), fmt_f64(p.s)),
                ],
            )
        }
        "hyperplane-signed" => {
            let gamma = opts.gamma.unwrap_or(0.1);
            let params = RegularVectorParams::for_graph(g, gamma)?;
            let va = signed_vectors(g, &params, derive_seed(seed, "signs", 0))?;
            rounding_details(
                g,
                "sign-randomized",
                va,
                seed,
                trials,
                opts.dump_vectors,
                vec![("gamma".into(), format!("{gamma:e}"))],
            )
        }
        "c5-bucket" => {
            let bucket = dyadic_codegree_bucket(g, 0.1)?;
            let sets = BucketSets::codegree_window(g, bucket.base, bucket.nu(g))?;
            let va = c5_bucket_vectors(g, &sets)?;
            rounding_details(
                g,
                "codegree-window",
                va,
                seed,
                trials,
                opts.dump_vectors,
                vec![
                    ("bucket_base".into(), bucket.base.to_string()),
                    ("bucket_paths".into(), bucket.bucket_paths.to_string()),
                ],
            )
        }
        "odd-cycle-st" => {
            let r = opts.r.unwrap_or(5);
            let mut params = GoodPathParams::new(r, derive_seed(seed, "profile", 0));
            params.sample_above_cap = true;
            let prof = good_path_profile(g, &params)?;
            let sets = st_sets(g, &prof, prof.ell)?;
            let va = odd_cycle_st_vectors(g, &sets)?;
            rounding_details(
                g,
                "good-path",
                va,
                seed,
                trials,
                opts.dump_vectors,
                vec![
                    ("r".into(), r.to_string()),
                    ("level".into(), prof.ell.to_string()),
                    ("nu".into(), fmt_f64(prof.nu)),
                    ("window_base".into(), sets.base.to_string()),
                ],
            )
        }
        "triangle-sampling" => {
            let result = triangle_sampling_cut(g, epsilon, None, seed, trials)?;
            Ok(sampling_details(
                result,
                vec![("epsilon".into(), fmt_f64(epsilon))],
            ))
        }
        "bucket-sampling" => {
            let bucket = dyadic_codegree_bucket(g, 0.1)?;
            let sets = BucketSets::codegree_window(g, bucket.base, bucket.nu(g))?;
            let result = bucket_neighborhood_cut(g, &sets, seed, trials)?;
            Ok(sampling_details(
                result,
                vec![("bucket_base".into(), bucket.base.to_string())],
            ))
        }
        "codegree-trim" => {
            let out = codegree_trimming_cut(g, seed)?;
            let mut details = Vec::new();
            match &out.fallback {
                Some(reason) => details.push(("fallback".into(), format!("{reason:?}"))),
                None => {
                    details.push(("level".into(), out.level.unwrap_or(0).to_string()));
                    details.push(("sparsity_bound".into(), fmt_f64(out.sparsity_bound)));
                    details.push((
                        "sparsity_satisfied".into(),
                        out.sparsity_satisfied.to_string(),
                    ));
                    if let Some(s) = &out.subset {
                        details.push(("subset_size".into(), s.len().to_string()));
                    }
                }
            }
            Ok(AlgoReport {
                cut: out.cut,
                details,
            })
        }
        "kr-recursive" => {
            let r = opts.r.unwrap_or(3);
            let out = kr_recursive_cut(g, r, epsilon, seed, trials)?;
            Ok(AlgoReport {
                cut: out.cut,
                details: vec![
                    ("r".into(), r.to_string()),
                    ("depth".into(), out.depth.to_string()),
                    ("epsilon".into(), fmt_f64(epsilon)),
                ],
            })
        }
        "composite-kr" => {
            let r = opts.r.unwrap_or(3);
            let out = composite_kr_cut(g, r, epsilon, seed, trials)?;
            Ok(AlgoReport {
                cut: out.cut,
                details: vec![
                    ("r".into(), r.to_string()),
                    ("branch".into(), format!("{:?}", out.branch)),
                    ("degree_threshold".into(), fmt_f64(out.threshold)),
                ],
            })
        }
        other => Err(Error::Unsupported(format!("unknown algorithm `{other}`"))),
    }
}

/// Convenience wrapper used by tests: run `sparse_set_cut` through the
/// same reporting surface.
#[allow(dead_code)]
pub fn run_sparse_set(g: &Graph, subset: &[u32], seed: u64, trials: u32) -> Result<AlgoReport> {
    let out = sparse_set_cut(g, subset, seed, trials)?;
    Ok(AlgoReport {
        cut: out.cut,
        details: vec![
            ("target".into(), fmt_f64(out.target)),
            ("achieved".into(), fmt_f64(out.achieved)),
        ],
    })
}
