//! The `verify` suites: executable invariant checks over the bundled
//! corpus, one pass/fail line per check, with the smallest failing
//! instance's edge list attached to any failure.

use surplus_lab::graph::{Cut, Graph};
use surplus_lab::rng::derive_seed;
use surplus_lab::rounding::{
    analytic_expected_cut, augment_with_identity, hyperplane_round, VectorAssignment,
    VertexVector,
};
use surplus_lab::sampling::{bucket_neighborhood_cut, sparse_set_cut, triangle_sampling_cut};
use surplus_lab::structure::{
    combine_cuts, dyadic_codegree_bucket, good_partition, regularize, CombineMode, PartCut,
    RegularizationParams,
};
use surplus_lab::vectors::{
    c5_bucket_vectors, regular_vectors, signed_vectors, srg_gamma, window_edge_terms, BucketSets,
    RegularVectorParams, SrgParams,
};
use surplus_lab::{corpus, gen, oracle, spectral};

pub struct Check {
    pub name: String,
    pub failure: Option<String>,
}

impl Check {
    fn pass(name: impl Into<String>) -> Check {
        Check { name: name.into(), failure: None }
    }

    fn fail(name: impl Into<String>, detail: String) -> Check {
        Check { name: name.into(), failure: Some(detail) }
    }
}

/// Runs one named suite; `all` concatenates every suite.
pub fn run_suite(suite: &str, seed: u64) -> Option<Vec<Check>> {
    match suite {
        "core" => Some(suite_core()),
        "rounding" => Some(suite_rounding(seed)),
        "vectors" => Some(suite_vectors(seed)),
        "structure" => Some(suite_structure(seed)),
        "sampling" => Some(suite_sampling(seed)),
        "spectral" => Some(suite_spectral()),
        "all" => {
            let mut checks = suite_core();
            checks.extend(suite_rounding(seed));
            checks.extend(suite_vectors(seed));
            checks.extend(suite_structure(seed));
            checks.extend(suite_sampling(seed));
            checks.extend(suite_spectral());
            Some(checks)
        }
        _ => None,
    }
}

pub const SUITES: &[&str] = &[
    "core",
    "rounding",
    "vectors",
    "structure",
    "sampling",
    "spectral",
    "all",
];

/// Attach the offending instance's edge list to a failure message.
fn instance_detail(name: &str, g: &Graph, what: String) -> String {
    format!("{what}\n  failing instance `{name}`:\n{}", indent(&g.to_edge_list(&[])))
}

fn indent(text: &str) -> String {
    text.lines()
        .map(|l| format!("    {l}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Scans instances smallest-first so the reported failure is minimal.
fn check_over_corpus(
    name: &str,
    mut corpus: Vec<(String, Graph)>,
    test: impl Fn(&str, &Graph) -> std::result::Result<(), String>,
) -> Check {
    corpus.sort_by_key(|(_, g)| (g.n(), g.m()));
    for (id, g) in &corpus {
        if let Err(why) = test(id, g) {
            return Check::fail(name, instance_detail(id, g, why));
        }
    }
    Check::pass(name)
}

fn suite_core() -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push(check_over_corpus(
        "core: degree sum equals 2m",
        corpus::named_small(),
        |_, g| {
            let total: u64 = g.vertices().map(|v| g.degree(v) as u64).sum();
            if total == 2 * g.m() {
                Ok(())
            } else {
                Err(format!("sum of degrees {total} != 2m = {}", 2 * g.m()))
            }
        },
    ));
    checks.push(check_over_corpus(
        "core: triangles equal trace(A^3)/6",
        corpus::named_small(),
        |_, g| {
            let trace: u64 = g
                .vertices()
                .map(|v| g.walk_count(v, v, 3).unwrap())
                .sum();
            if trace == 6 * g.triangle_count() {
                Ok(())
            } else {
                Err(format!("trace {trace} != 6t = {}", 6 * g.triangle_count()))
            }
        },
    ));
    checks.push(check_over_corpus(
        "core: edge codegrees sum to 3t",
        corpus::named_small(),
        |_, g| {
            let sum: u64 = g.edges().map(|(u, v)| g.codegree(u, v).unwrap()).sum();
            if sum == 3 * g.triangle_count() {
                Ok(())
            } else {
                Err(format!("codegree sum {sum} != 3t"))
            }
        },
    ));
    checks.push(check_over_corpus(
        "core: 2-cliques are edges",
        corpus::named_small(),
        |_, g| {
            if g.n() < 2 || g.clique_count(2).unwrap() == g.m() {
                Ok(())
            } else {
                Err("clique_count(2) != m".into())
            }
        },
    ));
    checks.push(check_over_corpus(
        "core: degeneracy order is a witness",
        corpus::named_small(),
        |_, g| {
            let (d, order) = g.degeneracy_order();
            let mut pos = vec![0usize; g.n()];
            for (i, &v) in order.iter().enumerate() {
                pos[v as usize] = i;
            }
            for &v in &order {
                let later = g
                    .neighbors(v)
                    .filter(|&w| pos[w as usize] > pos[v as usize])
                    .count() as u32;
                if later > d {
                    return Err(format!("vertex {v} keeps {later} later neighbours > {d}"));
                }
            }
            Ok(())
        },
    ));
    checks.push(check_over_corpus(
        "core: edge-list round trip",
        corpus::named_small(),
        |_, g| {
            let text = g.to_edge_list(&["round trip".into()]);
            match Graph::parse_edge_list(&text) {
                Ok(back) if back.m() == g.m() => Ok(()),
                Ok(back) => Err(format!("round trip changed m: {} -> {}", g.m(), back.m())),
                Err(e) => Err(format!("reparse failed: {e}")),
            }
        },
    ));
    checks
}

fn suite_rounding(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    // Invariance of the analytic expectation under rotation, scaling and
    // negation, checked numerically on a fixed assignment over K5.
    checks.push({
        let g = gen::complete(5);
        let base: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                (0..3)
                    .map(|j| ((i * 3 + j) as f64 * 0.7).sin())
                    .collect()
            })
            .collect();
        let assignment = |vectors: &[Vec<f64>]| {
            VectorAssignment::new(
                3,
                vectors.iter().map(|v| VertexVector::dense(v)).collect(),
                "probe",
            )
        };
        let e0 = analytic_expected_cut(&g, &assignment(&base)).unwrap();
        let (c, s) = (1.1f64.cos(), 1.1f64.sin());
        let rotated: Vec<Vec<f64>> = base
            .iter()
            .map(|v| vec![c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]])
            .collect();
        let scaled: Vec<Vec<f64>> = base
            .iter()
            .enumerate()
            .map(|(i, v)| v.iter().map(|x| x * (0.5 + i as f64)).collect())
            .collect();
        let negated: Vec<Vec<f64>> = base
            .iter()
            .map(|v| v.iter().map(|x| -x).collect())
            .collect();
        let worst = [rotated, scaled, negated]
            .iter()
            .map(|vs| (analytic_expected_cut(&g, &assignment(vs)).unwrap() - e0).abs())
            .fold(0.0f64, f64::max);
        if worst <= 1e-10 * e0.abs().max(1.0) {
            Check::pass("rounding: expectation invariances")
        } else {
            Check::fail(
                "rounding: expectation invariances",
                format!("worst deviation {worst:e}"),
            )
        }
    });
    // Monte Carlo consistency at modest trial counts (5 standard errors).
    checks.push(check_over_corpus(
        "rounding: Monte Carlo matches the arcsin formula",
        vec![
            ("paley 13".into(), gen::paley(13).unwrap()),
            ("petersen".into(), gen::petersen()),
        ],
        |id, g| {
            let p = RegularVectorParams::for_graph(g, 0.2).map_err(|e| e.to_string())?;
            let va = regular_vectors(g, &p).map_err(|e| e.to_string())?;
            let aug = augment_with_identity(g, &va).map_err(|e| e.to_string())?;
            let trials = 4000u32;
            let out = hyperplane_round(g, &aug, derive_seed(seed, id, 1), trials)
                .map_err(|e| e.to_string())?;
            let stderr = out.std_crossing / (trials as f64).sqrt();
            let dev = (out.mean_crossing - out.analytic_expectation).abs();
            if dev <= 5.0 * stderr.max(1e-9) {
                Ok(())
            } else {
                Err(format!(
                    "mean {} vs analytic {} is {dev:.4} > 5 stderr {:.4}",
                    out.mean_crossing, out.analytic_expectation, 5.0 * stderr
                ))
            }
        },
    ));
    checks.push(check_over_corpus(
        "rounding: fixed seeds reproduce cuts",
        vec![("paley 13".into(), gen::paley(13).unwrap())],
        |id, g| {
            let p = RegularVectorParams::for_graph(g, 1e-6).map_err(|e| e.to_string())?;
            let va = regular_vectors(g, &p).map_err(|e| e.to_string())?;
            let aug = augment_with_identity(g, &va).map_err(|e| e.to_string())?;
            let a = hyperplane_round(g, &aug, derive_seed(seed, id, 2), 5)
                .map_err(|e| e.to_string())?;
            let b = hyperplane_round(g, &aug, derive_seed(seed, id, 2), 5)
                .map_err(|e| e.to_string())?;
            if a.cut == b.cut {
                Ok(())
            } else {
                Err("same seed produced different cuts".into())
            }
        },
    ));
    checks
}

fn suite_vectors(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push(check_over_corpus(
        "vectors: closed-form edge products match dot products",
        corpus::regular_corpus(),
        |_, g| {
            for gamma in [1.0, 0.25, 1e-3] {
                let p = RegularVectorParams::for_graph(g, gamma).map_err(|e| e.to_string())?;
                let va = regular_vectors(g, &p).map_err(|e| e.to_string())?;
                for (u, v) in g.edges() {
                    let delta = p.delta(g.codegree(u, v).unwrap());
                    let closed = p.edge_inner_product(delta);
                    let direct = va.inner_product(u, v);
                    let scale = closed.abs().max(direct.abs()).max(2.0 * gamma);
                    if (closed - direct).abs() > 1e-12 * scale {
                        return Err(format!(
                            "edge ({u},{v}) gamma {gamma}: closed {closed} vs direct {direct}"
                        ));
                    }
                }
            }
            Ok(())
        },
    ));
    checks.push(check_over_corpus(
        "vectors: strongly regular edge products stay under the regime bound",
        vec![
            ("paley 5".into(), gen::paley(5).unwrap()),
            ("paley 13".into(), gen::paley(13).unwrap()),
            ("paley 17".into(), gen::paley(17).unwrap()),
            ("petersen".into(), gen::petersen()),
        ],
        |_, g| {
            let p = SrgParams::from_graph(g).map_err(|e| e.to_string())?;
            let choice = srg_gamma(&p);
            let params =
                RegularVectorParams::for_graph(g, choice.gamma).map_err(|e| e.to_string())?;
            let va = regular_vectors(g, &params).map_err(|e| e.to_string())?;
            for (u, v) in g.edges() {
                let ip = va.inner_product(u, v);
                if ip >= 0.0 || ip > choice.edge_ip_bound + 1e-15 {
                    return Err(format!(
                        "edge ({u},{v}): product {ip} vs bound {}",
                        choice.edge_ip_bound
                    ));
                }
            }
            Ok(())
        },
    ));
    checks.push(check_over_corpus(
        "vectors: sign randomization preserves norms",
        vec![("paley 13".into(), gen::paley(13).unwrap()), ("petersen".into(), gen::petersen())],
        |id, g| {
            let p = RegularVectorParams::for_graph(g, 0.1).map_err(|e| e.to_string())?;
            let plain = regular_vectors(g, &p).map_err(|e| e.to_string())?;
            let signed =
                signed_vectors(g, &p, derive_seed(seed, id, 3)).map_err(|e| e.to_string())?;
            for v in g.vertices() {
                if (plain.norm_sq(v) - signed.norm_sq(v)).abs() > 1e-12 {
                    return Err(format!("norm of vertex {v} moved"));
                }
            }
            Ok(())
        },
    ));
    checks.push(check_over_corpus(
        "vectors: codegree-window norms and decomposition",
        vec![("petersen".into(), gen::petersen()), ("paley 13".into(), gen::paley(13).unwrap())],
        |_, g| {
            let bucket = dyadic_codegree_bucket(g, 0.1).map_err(|e| e.to_string())?;
            let sets = BucketSets::codegree_window(g, bucket.base, bucket.nu(g))
                .map_err(|e| e.to_string())?;
            sets.validate(g).map_err(|e| e.to_string())?;
            let va = c5_bucket_vectors(g, &sets).map_err(|e| e.to_string())?;
            let d = g.regular_degree().unwrap() as f64;
            for v in g.vertices() {
                if va.norm_sq(v) > 2.0 + 1e-12 {
                    return Err(format!("vertex {v}: norm^2 {} > 2", va.norm_sq(v)));
                }
            }
            for (u, v) in g.edges() {
                let terms = window_edge_terms(g, &sets, u, v);
                let formula = terms.inner_product(d, sets.base);
                let direct = va.inner_product(u, v);
                if (formula - direct).abs() > 1e-12 {
                    return Err(format!("edge ({u},{v}): {formula} vs {direct}"));
                }
            }
            Ok(())
        },
    ));
    checks
}

fn suite_structure(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push({
        let mut failure = None;
        'outer: for i in 0..200u64 {
            let n = 12 + (i % 6) as usize * 6;
            let p = 0.1 + (i % 5) as f64 * 0.15;
            let g = gen::gnp(n, p, derive_seed(seed, "verify-partition", i)).unwrap();
            for threshold in [1.0, 2.5, g.average_degree()] {
                if let Err(e) = good_partition(&g, threshold) {
                    failure = Some(instance_detail(
                        &format!("gnp {n} {p} #{i}"),
                        &g,
                        format!("threshold {threshold}: {e}"),
                    ));
                    break 'outer;
                }
            }
        }
        match failure {
            None => Check::pass("structure: good partition postconditions on 200 instances"),
            Some(d) => Check::fail("structure: good partition postconditions on 200 instances", d),
        }
    });
    checks.push({
        let mut failure = None;
        for i in 0..100u64 {
            let n = 20 + (i % 4) as usize * 12;
            let p = 0.1 + (i % 6) as f64 * 0.12;
            let g = gen::gnp(n, p, derive_seed(seed, "verify-regularize", i)).unwrap();
            let params = RegularizationParams::new(0.0, 2.0, 0.5).unwrap();
            if let Err(e) = regularize(&g, &params, derive_seed(seed, "verify-reg-run", i)) {
                failure = Some(instance_detail(
                    &format!("gnp {n} {p} #{i}"),
                    &g,
                    e.to_string(),
                ));
                break;
            }
        }
        match failure {
            None => Check::pass("structure: regularization postconditions on 100 instances"),
            Some(d) => Check::fail("structure: regularization postconditions on 100 instances", d),
        }
    });
    checks.push(check_over_corpus(
        "structure: combiner dominates part surpluses",
        corpus::named_small(),
        |id, g| {
            // Two arbitrary parts: low third vs middle third, each side
            // split by parity.
            let third = g.n() / 3;
            let parts: Vec<PartCut> = [(0, third), (third, 2 * third)]
                .iter()
                .filter(|(a, b)| a < b)
                .map(|&(a, b)| {
                    let vertices: Vec<u32> = (a as u32..b as u32).collect();
                    let side: Vec<bool> = vertices.iter().map(|v| v % 2 == 0).collect();
                    PartCut::new(vertices, side)
                })
                .collect();
            let total: i64 = parts.iter().map(|p| p.surplus_twice(g)).sum();
            let cut = combine_cuts(g, &parts, CombineMode::Greedy)
                .map_err(|e| format!("{id}: {e}"))?;
            if cut.surplus_twice() >= total {
                Ok(())
            } else {
                Err(format!(
                    "combined surplus {} below part total {total}",
                    cut.surplus_twice()
                ))
            }
        },
    ));
    checks.push(check_over_corpus(
        "structure: dyadic buckets partition the 2-paths",
        corpus::named_small(),
        |_, g| {
            let two_paths: u64 = g
                .vertices()
                .map(|v| {
                    let d = g.degree(v) as u64;
                    d * d.saturating_sub(1) / 2
                })
                .sum();
            match dyadic_codegree_bucket(g, 0.1) {
                Ok(b) if b.total_paths == two_paths => Ok(()),
                Ok(b) => Err(format!("bucket total {} != {two_paths}", b.total_paths)),
                Err(_) if two_paths == 0 => Ok(()),
                Err(e) => Err(e.to_string()),
            }
        },
    ));
    checks
}

fn suite_sampling(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push(check_over_corpus(
        "sampling: triangle-sampling chain holds per trial",
        vec![
            ("petersen".into(), gen::petersen()),
            ("blowup 4 complete 2".into(), gen::blowup(&gen::complete(2), 4).unwrap()),
            ("paley 13".into(), gen::paley(13).unwrap()),
        ],
        |id, g| {
            // The chain inequality is hard-asserted inside every trial;
            // reaching Ok means no trial violated it.
            triangle_sampling_cut(g, 0.1, None, derive_seed(seed, id, 4), 200)
                .map(|_| ())
                .map_err(|e| e.to_string())
        },
    ));
    checks.push(check_over_corpus(
        "sampling: bucket-sampling chain holds per trial",
        vec![
            ("petersen".into(), gen::petersen()),
            ("blowup 4 cycle 5".into(), gen::blowup(&gen::cycle(5), 4).unwrap()),
        ],
        |id, g| {
            let bucket = dyadic_codegree_bucket(g, 0.1).map_err(|e| e.to_string())?;
            let sets = BucketSets::codegree_window(g, bucket.base, bucket.nu(g))
                .map_err(|e| e.to_string())?;
            bucket_neighborhood_cut(g, &sets, derive_seed(seed, id, 5), 200)
                .map(|_| ())
                .map_err(|e| e.to_string())
        },
    ));
    checks.push({
        let g = gen::cycle(4);
        match sparse_set_cut(&g, &[0, 2], derive_seed(seed, "sparse", 0), 100) {
            Ok(r) if r.cut.surplus() >= 0.5 => {
                Check::pass("sampling: sparse-set cut reaches its target on C4")
            }
            Ok(r) => Check::fail(
                "sampling: sparse-set cut reaches its target on C4",
                format!("surplus {} below target 0.5", r.cut.surplus()),
            ),
            Err(e) => Check::fail(
                "sampling: sparse-set cut reaches its target on C4",
                e.to_string(),
            ),
        }
    });
    checks.push({
        let g = gen::petersen();
        match surplus_lab::sampling::codegree_trimming_cut(&g, seed) {
            Ok(r) if r.fallback.is_some() && r.cut.surplus_twice() >= 0 => {
                Check::pass("sampling: trimming tags the triangle-free fallback")
            }
            Ok(_) => Check::fail(
                "sampling: trimming tags the triangle-free fallback",
                "expected the no-mass fallback on a triangle-free graph".into(),
            ),
            Err(e) => Check::fail(
                "sampling: trimming tags the triangle-free fallback",
                e.to_string(),
            ),
        }
    });
    checks
}

fn suite_spectral() -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push(check_over_corpus(
        "spectral: oracle never beats the eigenvalue bound",
        corpus::audit_corpus(16),
        |_, g| {
            let mc = oracle::max_cut_exact(g).map_err(|e| e.to_string())?.mc;
            let ub = spectral::eigenvalue_upper_bound(g).map_err(|e| e.to_string())?;
            if mc as f64 <= ub + 1e-6 {
                Ok(())
            } else {
                Err(format!("mc {mc} exceeds bound {ub}"))
            }
        },
    ));
    checks.push(check_over_corpus(
        "spectral: strongly regular closed form matches the numeric solve",
        vec![
            ("paley 5".into(), gen::paley(5).unwrap()),
            ("paley 13".into(), gen::paley(13).unwrap()),
            ("paley 17".into(), gen::paley(17).unwrap()),
            ("paley 29".into(), gen::paley(29).unwrap()),
            ("paley 37".into(), gen::paley(37).unwrap()),
            ("petersen".into(), gen::petersen()),
        ],
        |_, g| {
            let numeric = spectral::lambda_min(g).map_err(|e| e.to_string())?;
            let p = SrgParams::from_graph(g).map_err(|e| e.to_string())?;
            let closed = spectral::srg_lambda_min(&p);
            let dev = (numeric.lambda_min - closed.lambda_min).abs();
            if dev <= 1e-8 {
                Ok(())
            } else {
                Err(format!(
                    "numeric {} vs closed form {} (dev {dev:e})",
                    numeric.lambda_min, closed.lambda_min
                ))
            }
        },
    ));
    checks.push({
        // Flip-optimality of exact witnesses, checked on a few instances.
        let name = "spectral: exact witnesses are flip-optimal";
        let mut failure = None;
        for (id, g) in [
            ("petersen".to_string(), gen::petersen()),
            ("paley 13".to_string(), gen::paley(13).unwrap()),
        ] {
            let r = oracle::max_cut_exact(&g).unwrap();
            for v in g.vertices() {
                let mut side: Vec<bool> =
                    (0..g.n()).map(|u| r.witness.side(u as u32)).collect();
                side[v as usize] = !side[v as usize];
                if Cut::new(&g, side).crossing() > r.mc {
                    failure = Some(instance_detail(
                        &id,
                        &g,
                        format!("flipping vertex {v} beat the oracle"),
                    ));
                }
            }
        }
        match failure {
            None => Check::pass(name),
            Some(d) => Check::fail(name, d),
        }
    });
    checks
}
