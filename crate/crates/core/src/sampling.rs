//! Label/neighbourhood sampling cut constructions: the few-triangles
//! routine, the bucket-neighbourhood routine, the sparse-set cut, the
//! codegree-trimming pipeline over the directed-edge auxiliary graph, and
//! the clique recursion with its composite dispatcher.
//!
//! Every expectation argument is run as best-of-trials, and the realized
//! chain `cut surplus >= (X - Y - Z) / 2` is asserted on every single
//! trial: the combiner's additivity makes it hold by construction, so a
//! violation is an internal error, never a statistical fluke.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{CodegreeProfile, Cut, Graph};
use crate::rng::{derive_seed, SplitMix64};
use crate::structure::{
    combine_cuts, good_partition, regularize, CombineMode, GoodPartition, PartCut,
    RegularizationParams, RegularizeResult, SamplingPlan,
};
use crate::vectors::BucketSets;

/// Default trial count for best-of-trials sampling.
pub const DEFAULT_TRIALS: u32 = 64;

/// Result of one label-sampling construction: the best cut, the part
/// family that realized it, and its `(X, Y, Z)` statistics.
#[derive(Clone, Debug)]
pub struct SamplingCutResult {
    pub cut: Cut,
    /// The `A_j` / `B_j` family of the winning trial (two-sided pieces).
    pub parts: Vec<PartCut>,
    /// Cross edges, `A`-internal edges, `B`-internal edges of that trial.
    pub xyz: (u64, u64, u64),
    pub trials: u32,
}

/// Draws one label in `{0, 1, .., k, k+1}` where 0 has probability 1/3,
/// each of `1..=k` has probability `p`, and `k+1` absorbs the rest.
fn draw_label(rng: &mut SplitMix64, k: usize, p: f64) -> usize {
    let x = rng.next_f64();
    if x < 1.0 / 3.0 {
        return 0;
    }
    let idx = ((x - 1.0 / 3.0) / p).floor() as usize;
    if idx < k {
        idx + 1
    } else {
        k + 1
    }
}

/// One finished trial: the combined cut, its part family, and `(X, Y, Z)`.
type Trial = (Cut, Vec<PartCut>, (u64, u64, u64));

/// Shared trial body: given the exclusive sets `A_j` and label sets `B_j`,
/// build the combined cut and verify the surplus chain exactly.
fn finish_trial(g: &Graph, a_sets: Vec<Vec<u32>>, b_sets: Vec<Vec<u32>>) -> Result<Trial> {
    let (mut x, mut y, mut z) = (0u64, 0u64, 0u64);
    let mut parts = Vec::with_capacity(a_sets.len());
    for (a, b) in a_sets.into_iter().zip(b_sets) {
        x += g.edges_between(&a, &b);
        y += g.edges_within(&a);
        z += g.edges_within(&b);
        if a.is_empty() && b.is_empty() {
            continue;
        }
        let mut vertices = a.clone();
        let mut side = vec![false; a.len()];
        vertices.extend_from_slice(&b);
        side.extend(std::iter::repeat_n(true, b.len()));
        parts.push(PartCut::new(vertices, side));
    }
    let cut = combine_cuts(g, &parts, CombineMode::Greedy)?;
    let floor = x as i64 - y as i64 - z as i64;
    if cut.surplus_twice() < floor {
        return Err(Error::invariant(format!(
            "sampling chain broke: 2*surplus {} < X - Y - Z = {floor}",
            cut.surplus_twice()
        )));
    }
    Ok((cut, parts, (x, y, z)))
}

fn best_of_trials(
    trials: u32,
    run: impl Fn(u32) -> Result<Trial> + Sync,
) -> Result<SamplingCutResult> {
    if trials == 0 {
        return Err(Error::unsupported("trials must be >= 1"));
    }
    let outcome = (0..trials)
        .into_par_iter()
        .map(|t| run(t).map(|r| (r, t)))
        .try_reduce_with(|a, b| {
            // Max crossing; ties to the earlier trial index.
            let pick_b = (b.0 .0.crossing(), std::cmp::Reverse(b.1))
                > (a.0 .0.crossing(), std::cmp::Reverse(a.1));
            Ok(if pick_b { b } else { a })
        })
        .expect("trials >= 1")?;
    let ((cut, parts, xyz), _) = outcome;
    Ok(SamplingCutResult {
        cut,
        parts,
        xyz,
        trials,
    })
}

/// The few-triangles construction: label vertices, sample `k` centers,
/// take exclusive label-0 neighbourhoods `A_j` against label sets `B_j`.
///
/// `k = ceil(mu n / d)` with `mu = epsilon / (4 C)`, label probability
/// `d / (3n)`; `C` defaults to the graph's max/average degree ratio.
pub fn triangle_sampling_cut(
    g: &Graph,
    epsilon: f64,
    degree_ratio: Option<f64>,
    seed: u64,
    trials: u32,
) -> Result<SamplingCutResult> {
    let n = g.n();
    let d = g.average_degree();
    if n == 0 || d <= 0.0 {
        return Err(Error::unsupported("triangle sampling needs edges"));
    }
    if !(0.0 < epsilon && epsilon <= 1.0) {
        return Err(Error::unsupported(format!("epsilon {epsilon} not in (0, 1]")));
    }
    let ratio = g.max_degree() as f64 / d;
    let big_c = match degree_ratio {
        Some(c) if c < ratio => {
            return Err(Error::unsupported(format!(
                "max degree {} exceeds C * average degree = {c} * {d}",
                g.max_degree()
            )));
        }
        Some(c) => c,
        None => ratio,
    };
    let mu = epsilon / (4.0 * big_c);
    let k = ((mu * n as f64 / d).ceil() as usize).max(1);
    // Feasible under the precondition: k * d/(3n) <= mu/3 + d/(3n) <= 2/3.
    let plan = SamplingPlan::new(k, d / (3.0 * n as f64), seed)
        .map_err(|e| Error::invariant(format!("label budget violated: {e}")))?;
    best_of_trials(trials, |t| {
        let mut rng = SplitMix64::new(derive_seed(plan.seed, "triangle-sampling", t as u64));
        let (k, p) = (plan.centers, plan.label_prob);
        let labels: Vec<usize> = (0..n).map(|_| draw_label(&mut rng, k, p)).collect();
        let centers: Vec<u32> = (0..k)
            .map(|_| rng.next_below(n as u64) as u32)
            .collect();
        // How many centers cover each vertex; exclusive = exactly one.
        let mut cover = vec![0u8; n];
        for &c in &centers {
            for w in g.neighbors(c) {
                cover[w as usize] = cover[w as usize].saturating_add(1);
            }
        }
        let mut a_sets = vec![Vec::new(); k];
        for (j, &c) in centers.iter().enumerate() {
            for w in g.neighbors(c) {
                if labels[w as usize] == 0 && cover[w as usize] == 1 {
                    a_sets[j].push(w);
                }
            }
            a_sets[j].sort_unstable();
            a_sets[j].dedup();
        }
        let mut b_sets = vec![Vec::new(); k];
        for (v, &label) in labels.iter().enumerate() {
            if (1..=k).contains(&label) {
                b_sets[label - 1].push(v as u32);
            }
        }
        finish_trial(g, a_sets, b_sets)
    })
}

/// The bucket-neighbourhood construction: `A_j` collects the label-0
/// vertices whose witness set contains center `v_j` exclusively.
///
/// Plan: `k = ceil(s n / (2 Delta^level))`, label probability
/// `p = nu d^level / (10 s n)`.
pub fn bucket_neighborhood_cut(
    g: &Graph,
    sets: &BucketSets,
    seed: u64,
    trials: u32,
) -> Result<SamplingCutResult> {
    let n = g.n();
    if sets.far_sets.iter().all(|s| s.is_empty()) {
        return Err(Error::unsupported("all witness sets are empty"));
    }
    // Preimage lists: which vertices u list w in their witness set. The
    // codegree window is symmetric so preimage = image there; good-path
    // sets are genuinely one-sided.
    let mut preimage: Vec<Vec<u32>> = vec![Vec::new(); n];
    for u in g.vertices() {
        for &w in &sets.far_sets[u as usize] {
            preimage[w as usize].push(u);
        }
    }
    let d = g.average_degree();
    let delta = g.max_degree() as f64;
    let q = sets.level as i32;
    let s = sets.base as f64;
    let k = ((s * n as f64 / (2.0 * delta.powi(q))).ceil() as usize).clamp(1, n);
    let plan = SamplingPlan::new(k, sets.nu * d.powi(q) / (10.0 * s * n as f64), seed)?;
    best_of_trials(trials, |t| {
        let mut rng = SplitMix64::new(derive_seed(plan.seed, "bucket-sampling", t as u64));
        let (k, p) = (plan.centers, plan.label_prob);
        let labels: Vec<usize> = (0..n).map(|_| draw_label(&mut rng, k, p)).collect();
        let centers: Vec<u32> = (0..k)
            .map(|_| rng.next_below(n as u64) as u32)
            .collect();
        let mut cover = vec![0u8; n];
        for &c in &centers {
            for &u in &preimage[c as usize] {
                cover[u as usize] = cover[u as usize].saturating_add(1);
            }
        }
        let mut a_sets = vec![Vec::new(); k];
        for (j, &c) in centers.iter().enumerate() {
            for &u in &preimage[c as usize] {
                if labels[u as usize] == 0 && cover[u as usize] == 1 {
                    a_sets[j].push(u);
                }
            }
            a_sets[j].sort_unstable();
            a_sets[j].dedup();
        }
        let mut b_sets = vec![Vec::new(); k];
        for (v, &label) in labels.iter().enumerate() {
            if (1..=k).contains(&label) {
                b_sets[label - 1].push(v as u32);
            }
        }
        finish_trial(g, a_sets, b_sets)
    })
}

/// Sparse-set cut with its guaranteed target.
#[derive(Clone, Debug)]
pub struct SparseSetCut {
    pub cut: Cut,
    /// `((|S|^2 d / (2n)) - e(S)) / 2`: the surplus the random-complement
    /// argument guarantees in expectation.
    pub target: f64,
    /// Best realized `(pairs(S,T) - e(S) - e(T)) / 2` over the trials.
    pub achieved: f64,
}

/// Cuts a sparse subset `S` of a regular graph against a random vertex set
/// sampled at rate `|S|/n`, de-overlapping vertex by vertex (each stays on
/// the side where it has fewer neighbours, which never lowers the score).
pub fn sparse_set_cut(
    g: &Graph,
    subset: &[u32],
    seed: u64,
    trials: u32,
) -> Result<SparseSetCut> {
    let Some(d) = g.regular_degree() else {
        return Err(Error::unsupported("sparse-set cut needs a regular graph"));
    };
    if subset.is_empty() {
        return Err(Error::unsupported("sparse-set cut needs a non-empty subset"));
    }
    if trials == 0 {
        return Err(Error::unsupported("trials must be >= 1"));
    }
    let n = g.n();
    let mut s_sorted: Vec<u32> = subset.to_vec();
    s_sorted.sort_unstable();
    s_sorted.dedup();
    let e_s = g.edges_within(&s_sorted) as i64;
    let size = s_sorted.len() as f64;
    let target = 0.5 * (size * size * d as f64 / (2.0 * n as f64) - e_s as f64);
    let rate = size / n as f64;
    let in_s = {
        let mut flags = vec![false; n];
        for &v in &s_sorted {
            flags[v as usize] = true;
        }
        flags
    };
    let mut best: Option<(i64, Vec<u32>, Vec<u32>)> = None;
    for t in 0..trials {
        let mut rng = SplitMix64::new(derive_seed(seed, "sparse-set", t as u64));
        let sample: Vec<u32> = (0..n as u32).filter(|_| rng.coin(rate)).collect();
        // Score with overlap: ordered pairs (u in S, v in T) minus
        // internals; overlapping vertices contribute to both sides.
        let score = |s_cur: &[u32], t_cur: &[u32]| -> i64 {
            let t_mask = g.mask_of(t_cur);
            let pairs: u64 = s_cur
                .iter()
                .map(|&v| crate::graph::intersection_size(g.row(v), &t_mask))
                .sum();
            pairs as i64 - g.edges_within(s_cur) as i64 - g.edges_within(t_cur) as i64
        };
        let mut s_cur = s_sorted.clone();
        let mut t_cur = sample;
        let mut value = score(&s_cur, &t_cur);
        // De-overlap, asserting monotonicity of the score step by step.
        let overlaps: Vec<u32> = t_cur
            .iter()
            .copied()
            .filter(|&v| in_s[v as usize])
            .collect();
        for v in overlaps {
            let nbrs_s = s_cur.iter().filter(|&&w| g.has_edge(v, w)).count();
            let nbrs_t = t_cur
                .iter()
                .filter(|&&w| w != v && g.has_edge(v, w))
                .count();
            if nbrs_s >= nbrs_t {
                s_cur.retain(|&w| w != v); // stays in T, cuts its S-neighbours
            } else {
                t_cur.retain(|&w| w != v);
            }
            let next = score(&s_cur, &t_cur);
            if next < value {
                return Err(Error::invariant(format!(
                    "de-overlap lowered the score from {value} to {next}"
                )));
            }
            value = next;
        }
        if best.as_ref().is_none_or(|(b, _, _)| value > *b) {
            best = Some((value, s_cur, t_cur));
        }
    }
    let (value, s_final, t_final) = best.expect("at least one trial");
    let mut vertices = s_final.clone();
    let mut side = vec![false; s_final.len()];
    vertices.extend_from_slice(&t_final);
    side.extend(std::iter::repeat_n(true, t_final.len()));
    let cut = combine_cuts(g, &[PartCut::new(vertices, side)], CombineMode::Greedy)?;
    Ok(SparseSetCut {
        cut,
        target,
        achieved: value as f64 / 2.0,
    })
}

/// Why the codegree-trimming pipeline fell back to the greedy cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrimmingFallback {
    /// No directed-edge vertex has positive trimmed excess.
    NoExcessMass,
}

/// Parameters of the directed-edge auxiliary graph: `aux_n = n d`
/// vertices, target degree `target = d^2/n`, the absolute constant of the
/// level-mass argument, and the selected dyadic level with its sampling
/// rate `2^-level`.
#[derive(Clone, Copy, Debug)]
pub struct AuxGraphParams {
    pub aux_n: u64,
    pub target: f64,
    pub constant: f64,
    pub level: u32,
    pub rate: f64,
}

/// Outcome of the codegree-trimming pipeline.
#[derive(Clone, Debug)]
pub struct TrimmingOutcome {
    pub cut: Cut,
    pub fallback: Option<TrimmingFallback>,
    /// Auxiliary-graph parameters of the selected level, when one fired.
    pub aux: Option<AuxGraphParams>,
    /// Selected dyadic level `i` (sampling rate `2^-i`).
    pub level: Option<u32>,
    /// The trimmed neighbourhood subset fed to the sparse-set cut.
    pub subset: Option<Vec<u32>>,
    /// `e(S) <= |S|^2 d/(2n) - bound` as reported by the level selection;
    /// `satisfied` records whether the emitted subset met it.
    pub sparsity_bound: f64,
    pub sparsity_satisfied: bool,
}

/// The codegree-trimming pipeline on a `d`-regular graph with `d <= n/2`:
/// work in the auxiliary graph on directed edges (adjacency: share the
/// tail, heads adjacent; its degrees are codegrees), pick the dyadic
/// excess level maximizing `mass * 2^i`, drop a `2^-i` sample of that
/// level, slice the survivors by tail vertex, and feed the sparsest slice
/// to the sparse-set cut.
pub fn codegree_trimming_cut(g: &Graph, seed: u64) -> Result<TrimmingOutcome> {
    let Some(d) = g.regular_degree() else {
        return Err(Error::unsupported("codegree trimming needs a regular graph"));
    };
    let n = g.n();
    if 2 * d as u64 > n as u64 {
        return Err(Error::unsupported("codegree trimming needs d <= n/2"));
    }
    if d == 0 {
        return Err(Error::unsupported("codegree trimming needs edges"));
    }
    let profile = CodegreeProfile::build(g);
    // e(H) = sum over edges of the codegree = 3 t(G), exactly.
    let e_h: u64 = g
        .edges()
        .map(|(u, v)| profile.codegree(u, v))
        .sum();
    if e_h != 3 * g.triangle_count() {
        return Err(Error::invariant(format!(
            "auxiliary edge count {e_h} != 3 * t(G)"
        )));
    }
    let big_d = (d as f64) * (d as f64) / n as f64;
    let aux_constant = 1.0 / (12.0 * 40.0 * 40.0);
    // Dyadic levels over 0 < excess <= 20 D, restricted to codegree <= 20 D.
    // Level i collects excess in (20 D / 2^i, 20 D / 2^{i-1}].
    let mut level_mass: std::collections::HashMap<u32, f64> = Default::default();
    let mut level_edges: std::collections::HashMap<u32, Vec<(u32, u32)>> = Default::default();
    let mut q_mass = 0.0f64;
    for (u, v) in g.edges() {
        let codeg = profile.codegree(u, v) as f64;
        if codeg > 20.0 * big_d {
            continue;
        }
        let excess = codeg - big_d;
        if excess <= 0.0 {
            continue;
        }
        let mut i = 1u32;
        while excess <= 20.0 * big_d / 2f64.powi(i as i32) {
            i += 1;
        }
        // Both orientations of the edge sit at this level.
        *level_mass.entry(i).or_insert(0.0) += 2.0 * excess.powi(3);
        level_edges.entry(i).or_default().push((u, v));
        q_mass += 2.0 * excess.powi(3);
    }
    if level_mass.is_empty() {
        let cut = combine_cuts(g, &[], CombineMode::Greedy)?;
        return Ok(TrimmingOutcome {
            cut,
            fallback: Some(TrimmingFallback::NoExcessMass),
            aux: None,
            level: None,
            subset: None,
            sparsity_bound: 0.0,
            sparsity_satisfied: false,
        });
    }
    // Pigeonhole direction: some level has mass >= q / 2^i; take the
    // argmax of mass * 2^i, ties to the smaller level.
    let mut keys: Vec<u32> = level_mass.keys().copied().collect();
    keys.sort_unstable();
    let level = keys
        .iter()
        .copied()
        .max_by(|&a, &b| {
            let score_a = level_mass[&a] * 2f64.powi(a as i32);
            let score_b = level_mass[&b] * 2f64.powi(b as i32);
            score_a.partial_cmp(&score_b).unwrap().then(b.cmp(&a))
        })
        .expect("non-empty levels");
    let rate = 2f64.powi(-(level as i32));
    let aux = AuxGraphParams {
        aux_n: g.n() as u64 * d as u64,
        target: big_d,
        constant: aux_constant,
        level,
        rate,
    };
    let sparsity_bound = aux_constant / (n as f64 * big_d * big_d) * q_mass;
    // Survivor slices by tail vertex: S_w = N(w) minus dropped heads.
    // Score a draw by the total trimmed-edge criterion and keep the best
    // of 50 draws.
    let edges_at_level = &level_edges[&level];
    let mut best: Option<(f64, Vec<Vec<u32>>)> = None;
    for draw in 0..50u64 {
        let mut rng = SplitMix64::new(derive_seed(seed, "trimming-sample", draw));
        // Dropped directed edges at the chosen level.
        let mut dropped: std::collections::HashSet<(u32, u32)> = Default::default();
        for &(u, v) in edges_at_level {
            if rng.coin(rate) {
                dropped.insert((u, v));
            }
            if rng.coin(rate) {
                dropped.insert((v, u));
            }
        }
        let slices: Vec<Vec<u32>> = g
            .vertices()
            .map(|w| {
                g.neighbors(w)
                    .filter(|&x| !dropped.contains(&(w, x)))
                    .collect()
            })
            .collect();
        let total: f64 = slices
            .iter()
            .map(|s| {
                let sz = s.len() as f64;
                g.edges_within(s) as f64 - sz * sz * d as f64 / (2.0 * n as f64)
            })
            .sum();
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, slices));
        }
    }
    let (_, slices) = best.expect("at least one draw");
    // The sparsest slice relative to its size.
    let subset = slices
        .iter()
        .min_by(|a, b| {
            let margin = |s: &[u32]| {
                let sz = s.len() as f64;
                g.edges_within(s) as f64 - sz * sz * d as f64 / (2.0 * n as f64)
            };
            margin(a).partial_cmp(&margin(b)).unwrap()
        })
        .cloned()
        .expect("n >= 1");
    if subset.is_empty() {
        let cut = combine_cuts(g, &[], CombineMode::Greedy)?;
        return Ok(TrimmingOutcome {
            cut,
            fallback: Some(TrimmingFallback::NoExcessMass),
            aux: Some(aux),
            level: Some(level),
            subset: None,
            sparsity_bound,
            sparsity_satisfied: false,
        });
    }
    let e_subset = g.edges_within(&subset) as f64;
    let sz = subset.len() as f64;
    let sparsity_satisfied = e_subset <= sz * sz * d as f64 / (2.0 * n as f64) - sparsity_bound;
    let sparse = sparse_set_cut(g, &subset, derive_seed(seed, "trimming-cut", 0), 100)?;
    Ok(TrimmingOutcome {
        cut: sparse.cut,
        fallback: None,
        aux: Some(aux),
        level: Some(level),
        subset: Some(subset),
        sparsity_bound,
        sparsity_satisfied,
    })
}

/// Report of one clique-recursion run.
#[derive(Clone, Debug)]
pub struct RecursionOutcome {
    pub cut: Cut,
    /// Levels of regularize-and-sample above the triangle base case.
    pub depth: u32,
}

/// The clique recursion: at `r = 3` delegate to triangle sampling; above,
/// regularize, sample `k = ceil(eps n / (8 C r^2 d))` centers, recurse
/// with `r - 1` on each exclusive neighbourhood, and combine.
pub fn kr_recursive_cut(
    g: &Graph,
    r: usize,
    epsilon: f64,
    seed: u64,
    trials: u32,
) -> Result<RecursionOutcome> {
    if r < 3 {
        return Err(Error::unsupported(format!("clique recursion needs r >= 3, got {r}")));
    }
    if g.m() == 0 {
        return Ok(RecursionOutcome {
            cut: combine_cuts(g, &[], CombineMode::Greedy)?,
            depth: 0,
        });
    }
    if r == 3 {
        let result = triangle_sampling_cut(g, epsilon, None, seed, trials)?;
        return Ok(RecursionOutcome {
            cut: result.cut,
            depth: 0,
        });
    }
    let params = RegularizationParams::new(-((r - 3) as f64), (r - 1) as f64, epsilon / r as f64)?;
    let outcome = regularize(g, &params, derive_seed(seed, "kr-regularize", r as u64))?;
    let working: Vec<u32> = match outcome.result {
        RegularizeResult::Cut { cut, .. } => {
            // The regularization already found a cut with the guaranteed
            // surplus at this scale.
            return Ok(RecursionOutcome { cut, depth: 1 });
        }
        RegularizeResult::Subgraph { vertices } => vertices,
    };
    let (sub, back) = g.induced(&working);
    if sub.m() == 0 {
        return Ok(RecursionOutcome {
            cut: combine_cuts(g, &[], CombineMode::Greedy)?,
            depth: 1,
        });
    }
    let d = sub.average_degree();
    let big_c = params.big_c();
    let k = ((epsilon / (8.0 * big_c * (r * r) as f64) * sub.n() as f64 / d).ceil() as usize)
        .max(1);
    let mut best: Option<(Cut, u32, u32)> = None;
    for t in 0..trials.max(1) {
        let mut rng = SplitMix64::new(derive_seed(seed, "kr-centers", (r as u64) << 32 | t as u64));
        let centers: Vec<u32> = (0..k)
            .map(|_| rng.next_below(sub.n() as u64) as u32)
            .collect();
        let mut cover = vec![0u8; sub.n()];
        for &c in &centers {
            for w in sub.neighbors(c) {
                cover[w as usize] = cover[w as usize].saturating_add(1);
            }
        }
        let mut parts: Vec<PartCut> = Vec::new();
        let mut max_depth = 0u32;
        for &c in &centers {
            let hood: Vec<u32> = sub
                .neighbors(c)
                .filter(|&w| cover[w as usize] == 1)
                .collect();
            if hood.len() < 2 {
                continue; // empty or single-vertex piece adds nothing
            }
            let (piece, piece_back) = sub.induced(&hood);
            if piece.m() == 0 {
                continue;
            }
            let inner = kr_recursive_cut(
                &piece,
                r - 1,
                epsilon,
                derive_seed(seed, "kr-recurse", (r as u64) << 48 | (t as u64) << 16 | c as u64),
                trials,
            )?;
            max_depth = max_depth.max(inner.depth);
            // Translate the piece's cut into a host-graph part.
            let vertices: Vec<u32> = piece
                .vertices()
                .map(|v| back[piece_back[v as usize] as usize])
                .collect();
            let side: Vec<bool> = piece.vertices().map(|v| inner.cut.side(v)).collect();
            parts.push(PartCut::new(vertices, side));
        }
        let cut = combine_cuts(g, &parts, CombineMode::Greedy)?;
        let depth = max_depth + 1;
        let replace = match &best {
            None => true,
            Some((b, _, bt)) => {
                (cut.crossing(), std::cmp::Reverse(t)) > (b.crossing(), std::cmp::Reverse(*bt))
            }
        };
        if replace {
            best = Some((cut, depth, t));
        }
    }
    let (cut, depth, _) = best.expect("at least one trial");
    Ok(RecursionOutcome { cut, depth })
}

/// Which branch of the composite dispatch produced the returned cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompositeBranch {
    /// Trivial empty-graph cut.
    Empty,
    /// `e(S, T) >= 2m/3`: the partition itself is the cut.
    CrossRich,
    /// The degenerate side held at least `m/6` edges.
    DegenerateSide,
    /// The min-degree core held at least `m/6` edges.
    CoreSide,
}

#[derive(Clone, Debug)]
pub struct CompositeOutcome {
    pub cut: Cut,
    pub branch: CompositeBranch,
    /// Degree threshold `m^{(r-1)/(2r-1)}` used for the partition.
    pub threshold: f64,
}

/// The composite dispatcher: split at `d = m^{(r-1)/(2r-1)}` into a
/// degenerate part and a min-degree core, then cut whichever side carries
/// the edges; all applicable branches are tried and the best cut wins.
pub fn composite_kr_cut(
    g: &Graph,
    r: usize,
    epsilon: f64,
    seed: u64,
    trials: u32,
) -> Result<CompositeOutcome> {
    if r < 3 {
        return Err(Error::unsupported(format!("composite cut needs r >= 3, got {r}")));
    }
    let m = g.m();
    if m == 0 {
        return Ok(CompositeOutcome {
            cut: combine_cuts(g, &[], CombineMode::Greedy)?,
            branch: CompositeBranch::Empty,
            threshold: 0.0,
        });
    }
    let threshold = (m as f64).powf((r as f64 - 1.0) / (2.0 * r as f64 - 1.0));
    let GoodPartition { degenerate, core } = good_partition(g, threshold)?;
    let e_cross = g.edges_between(&degenerate, &core);
    let e_degen = g.edges_within(&degenerate);
    let e_core = g.edges_within(&core);
    debug_assert_eq!(e_cross + e_degen + e_core, m);
    let mut candidates: Vec<(Cut, CompositeBranch)> = Vec::new();
    if 3 * e_cross >= 2 * m {
        let mut vertices = degenerate.clone();
        let mut side = vec![false; degenerate.len()];
        vertices.extend_from_slice(&core);
        side.extend(std::iter::repeat_n(true, core.len()));
        let cut = combine_cuts(g, &[PartCut::new(vertices, side)], CombineMode::Greedy)?;
        candidates.push((cut, CompositeBranch::CrossRich));
    }
    let side_cut = |verts: &[u32], branch: CompositeBranch, salt: u64| -> Result<Option<(Cut, CompositeBranch)>> {
        let (sub, back) = g.induced(verts);
        if sub.m() == 0 {
            return Ok(None);
        }
        let inner = kr_recursive_cut(&sub, r, epsilon, derive_seed(seed, "composite", salt), trials)?;
        let vertices: Vec<u32> = sub.vertices().map(|v| back[v as usize]).collect();
        let side: Vec<bool> = sub.vertices().map(|v| inner.cut.side(v)).collect();
        let cut = combine_cuts(g, &[PartCut::new(vertices, side)], CombineMode::Greedy)?;
        Ok(Some((cut, branch)))
    };
    if 6 * e_degen >= m {
        if let Some(c) = side_cut(&degenerate, CompositeBranch::DegenerateSide, 1)? {
            candidates.push(c);
        }
    }
    if 6 * e_core >= m {
        if let Some(c) = side_cut(&core, CompositeBranch::CoreSide, 2)? {
            candidates.push(c);
        }
    }
    if candidates.is_empty() {
        // At least one branch condition always holds; if the winning side
        // was empty of edges the partition cut still applies.
        let mut vertices = degenerate.clone();
        let mut side = vec![false; degenerate.len()];
        vertices.extend_from_slice(&core);
        side.extend(std::iter::repeat_n(true, core.len()));
        let cut = combine_cuts(g, &[PartCut::new(vertices, side)], CombineMode::Greedy)?;
        candidates.push((cut, CompositeBranch::CrossRich));
    }
    let (cut, branch) = candidates
        .into_iter()
        .max_by_key(|(c, _)| c.crossing())
        .expect("non-empty candidates");
    Ok(CompositeOutcome {
        cut,
        branch,
        threshold,
    })
}
