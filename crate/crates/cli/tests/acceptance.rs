//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `-- --nocapture` to see them). Every tolerance
//! is pinned here, in code.

use std::process::Command;

use surplus_lab::gen;
use surplus_lab::graph::{edwards_bound, Cut, Graph};
use surplus_lab::oracle;
use surplus_lab::rng::{derive_seed, SplitMix64};
use surplus_lab::rounding::{analytic_expected_cut, augment_with_identity, hyperplane_round};
use surplus_lab::sampling::{bucket_neighborhood_cut, composite_kr_cut, triangle_sampling_cut};
use surplus_lab::spectral;
use surplus_lab::structure::{
    dyadic_codegree_bucket, good_partition, good_path_profile, regularize, st_sets,
    GoodPathParams, RegularizationParams,
};
use surplus_lab::vectors::{
    c5_bucket_vectors, odd_cycle_st_vectors, regular_vectors, srg_gamma, BucketSets,
    RegularVectorParams, SrgParams,
};

fn pass(criterion: u32, detail: &str) {
    println!("criterion {criterion:>2} PASS: {detail}");
}

/// Criterion 1: the guaranteed-surplus formula is exactly attained by odd
/// complete graphs; the oracle surplus of K5 and K7 equals it exactly.
#[test]
fn criterion_01_edwards_tightness() {
    let k5 = gen::complete(5);
    let r5 = oracle::max_cut_exact(&k5).unwrap();
    assert_eq!(r5.mc, 6);
    assert_eq!(r5.witness.surplus_twice(), 2); // surplus exactly 1
    assert_eq!(edwards_bound(k5.m()), 1.0); // sqrt(81) exact

    let k7 = gen::complete(7);
    let r7 = oracle::max_cut_exact(&k7).unwrap();
    assert_eq!(r7.mc, 12);
    assert_eq!(r7.witness.surplus_twice(), 3); // surplus exactly 3/2
    assert_eq!(edwards_bound(k7.m()), 1.5); // sqrt(169) exact
    pass(1, "K5 and K7 oracle surpluses equal the guarantee exactly (1 and 1.5)");
}

/// Criterion 2: over 200+ bundled and seeded graphs with n <= 20, the
/// exact maximum cut never exceeds m/2 + |lambda_min| n / 4 + 1e-6.
#[test]
fn criterion_02_eigenvalue_bound_audit() {
    let corpus = surplus_lab::corpus::audit_corpus(20);
    assert!(corpus.len() >= 200, "corpus too small: {}", corpus.len());
    for (name, g) in &corpus {
        let mc = oracle::max_cut_exact(g).unwrap().mc;
        let ub = spectral::eigenvalue_upper_bound(g).unwrap();
        assert!(
            mc as f64 <= ub + 1e-6,
            "{name}: mc {mc} exceeds eigenvalue bound {ub}"
        );
    }
    pass(2, &format!("{} graphs, zero eigenvalue-bound violations", corpus.len()));
}

/// Criterion 3: the closed-form strongly regular eigenvalue matches the
/// numeric eigensolve to 1e-8 on the Paley family and the Petersen graph.
#[test]
fn criterion_03_srg_eigenvalue_formula() {
    let mut instances: Vec<(String, Graph)> = [5u64, 13, 17, 29, 37]
        .iter()
        .map(|&q| (format!("paley {q}"), gen::paley(q).unwrap()))
        .collect();
    instances.push(("petersen".into(), gen::petersen()));
    for (name, g) in &instances {
        let numeric = spectral::lambda_min(g).unwrap().lambda_min;
        let p = SrgParams::from_graph(g).unwrap();
        let closed = spectral::srg_lambda_min(&p).lambda_min;
        assert!(
            (numeric - closed).abs() <= 1e-8,
            "{name}: numeric {numeric} vs closed {closed}"
        );
    }
    pass(3, "closed-form eigenvalue within 1e-8 of the numeric solve on 6 graphs");
}

/// Seeded random regular graph: a circulant start randomized by double
/// edge swaps (degree-preserving, always succeeds).
fn random_regular(n: usize, d: usize, seed: u64) -> Graph {
    assert!((n * d).is_multiple_of(2) && d < n);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut present = std::collections::HashSet::new();
    let add = |edges: &mut Vec<(u32, u32)>,
                   present: &mut std::collections::HashSet<(u32, u32)>,
                   u: u32,
                   v: u32| {
        let key = (u.min(v), u.max(v));
        if present.insert(key) {
            edges.push(key);
        }
    };
    for k in 1..=d / 2 {
        for v in 0..n as u32 {
            add(&mut edges, &mut present, v, (v + k as u32) % n as u32);
        }
    }
    if d % 2 == 1 {
        for v in 0..n as u32 / 2 {
            add(&mut edges, &mut present, v, v + n as u32 / 2);
        }
    }
    let mut rng = SplitMix64::new(seed);
    let mut performed = 0usize;
    while performed < 20 * edges.len() {
        let i = rng.next_below(edges.len() as u64) as usize;
        let j = rng.next_below(edges.len() as u64) as usize;
        let (a, b) = edges[i];
        let (c, e) = edges[j];
        let (x, y) = if rng.coin(0.5) { (c, e) } else { (e, c) };
        performed += 1;
        if a == x || a == y || b == x || b == y {
            continue;
        }
        let new1 = (a.min(x), a.max(x));
        let new2 = (b.min(y), b.max(y));
        if present.contains(&new1) || present.contains(&new2) {
            continue;
        }
        present.remove(&edges[i]);
        present.remove(&edges[j]);
        present.insert(new1);
        present.insert(new2);
        edges[i] = new1;
        edges[j] = new2;
    }
    let g = Graph::from_edges(n, edges).unwrap();
    assert_eq!(g.regular_degree(), Some(d as u32));
    g
}

/// Criterion 4: the closed-form edge inner product of the regular vector
/// family equals the direct dot product to 1e-12 relative on every edge of
/// 50 random regular graphs.
#[test]
fn criterion_04_inner_product_identity() {
    let combos = [(12usize, 3usize), (16, 4), (20, 6), (24, 8), (30, 5)];
    let mut graphs = 0usize;
    let mut edges_checked = 0usize;
    for (i, &(n, d)) in combos.iter().cycle().take(50).enumerate() {
        let g = random_regular(n, d, derive_seed(0xACCE97, "regular-instance", i as u64));
        graphs += 1;
        for gamma in [1.0, 0.01] {
            let p = RegularVectorParams::for_graph(&g, gamma).unwrap();
            let va = regular_vectors(&g, &p).unwrap();
            for (u, v) in g.edges() {
                let delta = p.delta(g.codegree(u, v).unwrap());
                let closed = p.edge_inner_product(delta);
                let direct = va.inner_product(u, v);
                // Scale of the identity's two terms; guards the relative
                // comparison when they cancel.
                let a = p.background_weight();
                let scale = (2.0 * gamma / (d as f64).sqrt())
                    + gamma * gamma * (1.0 / d as f64 + 2.0 * a / (d as f64).sqrt() + a * a)
                        * delta.abs();
                assert!(
                    (closed - direct).abs() <= 1e-12 * scale.max(closed.abs()).max(1e-30),
                    "n={n} d={d} gamma={gamma} edge ({u},{v}): {closed} vs {direct}"
                );
                edges_checked += 1;
            }
        }
    }
    pass(4, &format!("identity held on {edges_checked} edge checks over {graphs} graphs"));
}

/// Criterion 5: Monte Carlo mean crossing over 10^4 trials within 4
/// standard errors of the arcsin formula, for each bundled vector family
/// on graphs with n <= 30. One reseeded rerun is allowed per family;
/// a repeated miss fails.
#[test]
fn criterion_05_rounding_consistency() {
    let trials = 10_000u32;
    let mut families: Vec<(String, Graph, surplus_lab::rounding::VectorAssignment)> = Vec::new();
    {
        let g = gen::paley(13).unwrap();
        let p = RegularVectorParams::for_graph(&g, 0.2).unwrap();
        let va = regular_vectors(&g, &p).unwrap();
        families.push(("regular on paley 13".into(), g, va));
    }
    {
        let g = gen::paley(17).unwrap();
        let p = SrgParams::from_graph(&g).unwrap();
        let choice = srg_gamma(&p);
        let params = RegularVectorParams::for_graph(&g, choice.gamma).unwrap();
        let va = regular_vectors(&g, &params).unwrap();
        families.push(("strongly-regular on paley 17".into(), g, va));
    }
    {
        let g = gen::petersen();
        let bucket = dyadic_codegree_bucket(&g, 0.1).unwrap();
        let sets = BucketSets::codegree_window(&g, bucket.base, bucket.nu(&g)).unwrap();
        let va = c5_bucket_vectors(&g, &sets).unwrap();
        families.push(("codegree-window on petersen".into(), g, va));
    }
    {
        let g = gen::blowup(&gen::cycle(7), 2).unwrap();
        let prof = good_path_profile(&g, &GoodPathParams::new(7, 5)).unwrap();
        let sets = st_sets(&g, &prof, prof.ell).unwrap();
        let va = odd_cycle_st_vectors(&g, &sets).unwrap();
        families.push(("good-path on blowup 2 cycle 7".into(), g, va));
    }
    for (name, g, va) in &families {
        assert!(g.n() <= 30);
        let aug = augment_with_identity(g, va).unwrap();
        let mut attempts = 0u32;
        loop {
            let seed = derive_seed(0xC0_05, name, attempts as u64);
            let out = hyperplane_round(g, &aug, seed, trials).unwrap();
            let stderr = out.std_crossing / (trials as f64).sqrt();
            let dev = (out.mean_crossing - out.analytic_expectation).abs();
            if dev <= 4.0 * stderr.max(1e-12) {
                break;
            }
            attempts += 1;
            // Flaky-test budget: a 4-sigma miss happens with probability
            // ~6e-5 per family; one reseeded rerun is allowed, twice in a
            // row is a real failure.
            assert!(
                attempts < 2,
                "{name}: mean {} vs analytic {} repeatedly off ({dev} > {})",
                out.mean_crossing,
                out.analytic_expectation,
                4.0 * stderr
            );
        }
    }
    pass(5, &format!("{} families within 4 standard errors at 10^4 trials", families.len()));
}

/// Criterion 6: on the balanced-regime Paley graphs, best-of-1000 rounding
/// of the strongly-regular vectors yields strictly positive surplus, and
/// the analytic surplus clears the frozen regime floor
/// `0.5 * m * (gamma/sqrt(d)) / (pi * max|y|^2)` with `gamma = 1e-6`.
#[test]
fn criterion_06_srg_lower_bound_realized() {
    // Frozen from the regime chain before the build; the test recomputes
    // the formula and cross-checks the frozen value to 1e-9 relative.
    const FROZEN: [(u64, f64); 4] = [
        (13, 1.2670068586435036e-6),
        (17, 1.913171570580225e-6),
        (29, 4.317397619392627e-6),
        (37, 6.245943048634257e-6),
    ];
    for (q, frozen_floor) in FROZEN {
        let g = gen::paley(q).unwrap();
        let p = SrgParams::from_graph(&g).unwrap();
        let choice = srg_gamma(&p);
        assert_eq!(choice.gamma, 1e-6, "paley {q} must sit in the balanced regime");
        let params = RegularVectorParams::for_graph(&g, choice.gamma).unwrap();
        let va = regular_vectors(&g, &params).unwrap();
        let aug = augment_with_identity(&g, &va).unwrap();
        let max_norm_sq = aug.max_norm_sq();
        let d = p.d as f64;
        let floor = 0.5 * g.m() as f64 * (choice.gamma / d.sqrt())
            / (std::f64::consts::PI * max_norm_sq);
        assert!(
            (floor - frozen_floor).abs() <= 1e-9 * frozen_floor,
            "paley {q}: frozen floor {frozen_floor} drifted to {floor}"
        );
        let analytic = analytic_expected_cut(&g, &aug).unwrap();
        let gain = analytic - g.m() as f64 / 2.0;
        assert!(
            gain >= frozen_floor,
            "paley {q}: analytic surplus {gain} below floor {frozen_floor}"
        );
        let out = hyperplane_round(&g, &aug, derive_seed(6, "srg-round", q), 1000).unwrap();
        let surplus_twice = 2 * out.best_crossing as i64 - g.m() as i64;
        assert!(surplus_twice > 0, "paley {q}: best-of-1000 surplus not positive");
    }
    pass(6, "balanced-regime floors held and best-of-1000 surplus positive on 4 Paley graphs");
}

/// Criterion 7: across 10^4 aggregate sampling trials the exact chain
/// `2 * surplus >= X - Y - Z` held on every single trial (it is
/// hard-asserted inside each trial; any violation errors out).
#[test]
fn criterion_07_sampling_chain() {
    let mut total_trials = 0u32;
    let triangle_instances = [
        ("petersen", gen::petersen(), 2500u32),
        ("k44", gen::blowup(&gen::complete(2), 4).unwrap(), 1500),
        ("paley 13", gen::paley(13).unwrap(), 1000),
    ];
    for (name, g, trials) in &triangle_instances {
        triangle_sampling_cut(g, 0.1, None, derive_seed(7, name, 0), *trials)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        total_trials += trials;
    }
    let bucket_instances = [
        ("petersen", gen::petersen(), 2500u32),
        ("blowup 4 cycle 5", gen::blowup(&gen::cycle(5), 4).unwrap(), 2500),
    ];
    for (name, g, trials) in &bucket_instances {
        let bucket = dyadic_codegree_bucket(g, 0.1).unwrap();
        let sets = BucketSets::codegree_window(g, bucket.base, bucket.nu(g)).unwrap();
        bucket_neighborhood_cut(g, &sets, derive_seed(7, name, 1), *trials)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        total_trials += trials;
    }
    assert!(total_trials >= 10_000);
    pass(7, &format!("chain inequality held on all {total_trials} sampling trials"));
}

/// Criterion 8: the partition clauses and the regularization
/// postconditions hold on 500 seeded instances with zero violations (all
/// are hard-asserted inside the routines; any violation errors out).
#[test]
fn criterion_08_structure_postconditions() {
    let params = [
        RegularizationParams::new(0.0, 2.0, 0.5).unwrap(),
        RegularizationParams::new(0.5, 1.5, 0.25).unwrap(),
        RegularizationParams::new(-1.0, 2.0, 0.4).unwrap(),
    ];
    for i in 0..500u64 {
        let n = 16 + (i % 8) as usize * 6;
        let p = 0.08 + (i % 7) as f64 * 0.11;
        let g = gen::gnp(n, p.min(0.85), derive_seed(8, "structure-audit", i)).unwrap();
        let threshold = match i % 3 {
            0 => 1.5,
            1 => g.average_degree(),
            _ => g.average_degree() * 1.7,
        };
        good_partition(&g, threshold).unwrap_or_else(|e| panic!("instance {i}: {e}"));
        regularize(&g, &params[(i % 3) as usize], derive_seed(8, "structure-reg", i))
            .unwrap_or_else(|e| panic!("instance {i}: {e}"));
    }
    pass(8, "partition and regularization postconditions held on 500 instances");
}

/// Criterion 9: the good-path machinery on the 4-blowup of C7 at r = 7:
/// every stored tuple re-verifies against its windows via independent
/// walk counts, at least half the tuples are covered by the threshold
/// sets, and the realized density stays above d^{-1/10}.
#[test]
fn criterion_09_good_path_machinery() {
    let g = gen::blowup(&gen::cycle(7), 4).unwrap();
    let prof = good_path_profile(&g, &GoodPathParams::new(7, 9)).unwrap();
    assert_eq!(prof.ell, 3);
    let d = g.average_degree();
    assert!(
        prof.nu >= d.powf(-0.1),
        "nu {} below d^(-1/10) = {}",
        prof.nu,
        d.powf(-0.1)
    );
    let mut tuples_checked = 0usize;
    for level in &prof.levels {
        let q = level.level;
        for tuple in &level.full_tuples {
            for i in 0..q {
                for j in i + 1..=q {
                    let h = g.walk_count(tuple[i], tuple[j], j - i).unwrap();
                    let s = prof.window(i, j);
                    assert!(
                        s <= h && h < 2 * s,
                        "tuple {tuple:?} window ({i},{j}): {h} outside [{s}, {})",
                        2 * s
                    );
                }
            }
            tuples_checked += 1;
        }
        let sets = st_sets(&g, &prof, q).unwrap();
        let covered = level
            .full_tuples
            .iter()
            .filter(|t| {
                sets.near_sets[t[q - 1] as usize].contains(&t[0])
                    && sets.far_sets[t[q] as usize].contains(&t[0])
            })
            .count();
        assert!(
            2 * covered >= level.full_tuples.len(),
            "level {q}: coverage {covered}/{}",
            level.full_tuples.len()
        );
    }
    assert!(tuples_checked > 0);
    pass(9, &format!("{tuples_checked} stored tuples re-verified; coverage and density floors held"));
}

/// Criterion 10: the composite dispatcher at r = 3 on 20 seeded
/// triangle-free instances (n about 200) returns strictly positive surplus
/// of at least a quarter of the guaranteed-surplus value.
#[test]
fn criterion_10_end_to_end_positivity() {
    for i in 0..20u64 {
        let g = gen::triangle_free_gnp(200, 0.06, derive_seed(10, "endtoend", i)).unwrap();
        assert_eq!(g.triangle_count(), 0);
        let out = composite_kr_cut(&g, 3, 0.1, derive_seed(10, "composite", i), 64).unwrap();
        let floor = 0.25 * edwards_bound(g.m());
        let surplus = out.cut.surplus();
        assert!(surplus > 0.0, "instance {i}: surplus not positive");
        assert!(
            surplus >= floor,
            "instance {i}: surplus {surplus} below 0.25 * edwards = {floor}"
        );
        out.cut.validate(&g).unwrap();
    }
    pass(10, "composite surplus cleared 0.25x the guaranteed value on all 20 instances");
}

/// Criterion 11: rerunning `sweep` with an identical spec produces a
/// byte-identical CSV.
#[test]
fn criterion_11_sweep_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("sweep.toml");
    std::fs::write(
        &spec_path,
        "seed = 42\ntrials = 50\n\
         graphs = [\"paley 5\", \"paley 13\", \"gnp 24 0.3 7\", \"blowup 3 cycle 5\"]\n\
         algorithms = [\"local-search\", \"hyperplane-srg\", \"triangle-sampling\", \"oracle\"]\n",
    )
    .unwrap();
    let run = |out: &std::path::Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_surplus-lab"))
            .args(["sweep"])
            .arg(&spec_path)
            .arg("--output")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let first = run(&dir.path().join("a.csv"));
    let second = run(&dir.path().join("b.csv"));
    assert!(!first.is_empty());
    assert_eq!(first, second, "sweep reruns differ");
    // Skips drop rows instead of crashing: hyperplane-srg on the gnp
    // instance is inapplicable, so the row count is below the full grid.
    let rows = first.iter().filter(|&&b| b == b'\n').count() - 1;
    assert!(rows < 16, "expected skip rows to be dropped, got {rows}");
    assert!(rows >= 12);
    pass(11, &format!("byte-identical CSV across reruns ({rows} data rows)"));
}

/// The cut surplus printed everywhere is `crossing - m/2` with exact
/// halves; spot-check the reporting path end to end.
#[test]
fn exact_half_surplus_reporting() {
    let g = gen::cycle(5);
    let cut = Cut::new(&g, vec![false, true, false, true, false]);
    assert_eq!(cut.surplus_twice(), 3);
    assert_eq!(format!("{:.1}", cut.surplus()), "1.5");
}
