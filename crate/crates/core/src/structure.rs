//! Combinatorial preprocessing and combination machinery: the
//! surplus-additive cut combiner, the three-case regularization loop, the
//! degenerate/min-degree partition, dyadic codegree bucketing, and the
//! good-path apparatus (dyadic path signatures, random layer partitions,
//! threshold witness sets).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{CodegreeProfile, Cut, Graph};
use crate::rng::{derive_seed, SplitMix64};
use crate::vectors::BucketSets;

// ---------------------------------------------------------------------------
// Cut combination
// ---------------------------------------------------------------------------

/// A two-sided cut of an induced piece of the host graph: `vertices[i]`
/// sits on side `side[i]` of the piece's internal cut.
#[derive(Clone, Debug)]
pub struct PartCut {
    pub vertices: Vec<u32>,
    pub side: Vec<bool>,
}

impl PartCut {
    pub fn new(vertices: Vec<u32>, side: Vec<bool>) -> PartCut {
        assert_eq!(vertices.len(), side.len());
        PartCut { vertices, side }
    }

    /// All vertices on one side.
    pub fn side_vertices(&self, which: bool) -> Vec<u32> {
        self.vertices
            .iter()
            .zip(&self.side)
            .filter(|&(_, &s)| s == which)
            .map(|(&v, _)| v)
            .collect()
    }

    /// Twice the surplus of this cut within the induced subgraph:
    /// `2 * crossing - edges(piece)`.
    pub fn surplus_twice(&self, g: &Graph) -> i64 {
        let zero = self.side_vertices(false);
        let one = self.side_vertices(true);
        let crossing = g.edges_between(&zero, &one);
        let internal = g.edges_within(&zero) + g.edges_within(&one) + crossing;
        2 * crossing as i64 - internal as i64
    }
}

/// How the combiner places each piece and the leftover singletons.
#[derive(Clone, Copy, Debug)]
pub enum CombineMode {
    /// Conditional-expectation placement: each piece keeps or flips its
    /// orientation to maximize edges crossing to already-placed vertices,
    /// then every uncovered vertex joins the side with fewer placed
    /// neighbours. Guarantees global surplus >= sum of piece surpluses.
    Greedy,
    /// Random orientations and singleton sides (the plain probabilistic
    /// argument); matches the greedy guarantee only in expectation.
    Random(u64),
}

/// Merges disjoint per-piece cuts into a global cut.
///
/// In greedy mode the result is checked against the additivity guarantee
/// `surplus(cut) >= sum of piece surpluses` (exactly, in half-integers) and
/// an internal error is raised if it ever failed.
pub fn combine_cuts(g: &Graph, parts: &[PartCut], mode: CombineMode) -> Result<Cut> {
    let n = g.n();
    let mut covered = vec![false; n];
    for part in parts {
        for &v in &part.vertices {
            if covered[v as usize] {
                return Err(Error::unsupported(format!(
                    "parts overlap at vertex {v}"
                )));
            }
            covered[v as usize] = true;
        }
    }
    let mut rng = match mode {
        CombineMode::Random(seed) => Some(SplitMix64::new(derive_seed(seed, "combine", 0))),
        CombineMode::Greedy => None,
    };
    let mut side = vec![false; n];
    let mut placed = vec![false; n];
    for part in parts {
        let flip = match rng.as_mut() {
            Some(r) => r.coin(0.5),
            None => {
                // Cross edges to already-placed vertices under both
                // orientations; keep the better, ties to "as given".
                let mut keep = 0i64;
                let mut flipped = 0i64;
                for (&v, &s) in part.vertices.iter().zip(&part.side) {
                    for w in g.neighbors(v) {
                        if placed[w as usize] {
                            let opposite = side[w as usize] != s;
                            keep += opposite as i64;
                            flipped += !opposite as i64;
                        }
                    }
                }
                flipped > keep
            }
        };
        for (&v, &s) in part.vertices.iter().zip(&part.side) {
            side[v as usize] = s != flip;
            placed[v as usize] = true;
        }
    }
    for v in 0..n {
        if covered[v] {
            continue;
        }
        side[v] = match rng.as_mut() {
            Some(r) => r.coin(0.5),
            None => {
                let mut balance = 0i64; // placed neighbours on side true minus false
                for w in g.neighbors(v as u32) {
                    if placed[w as usize] {
                        balance += if side[w as usize] { 1 } else { -1 };
                    }
                }
                // Join the minority side; ties go to side false.
                balance < 0
            }
        };
        placed[v] = true;
    }
    let cut = Cut::new(g, side);
    if matches!(mode, CombineMode::Greedy) {
        let total: i64 = parts.iter().map(|p| p.surplus_twice(g)).sum();
        if cut.surplus_twice() < total {
            return Err(Error::invariant(format!(
                "combined surplus {} fell below the additive floor {}",
                cut.surplus_twice(),
                total
            )));
        }
    }
    Ok(cut)
}

// ---------------------------------------------------------------------------
// Regularization
// ---------------------------------------------------------------------------

/// Exponent/slack parameters of the regularization loop together with the
/// constants they fix: `theta` from `(1-theta)^beta = 1-eps`,
/// `C0` from `(theta^2/20)^beta C0^{beta-alpha} = 1`, `C = C0/(1-theta)`,
/// and the surplus constant `c = theta^2/320`.
#[derive(Clone, Copy, Debug)]
pub struct RegularizationParams {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
}

impl RegularizationParams {
    pub fn new(alpha: f64, beta: f64, epsilon: f64) -> Result<RegularizationParams> {
        if !(beta > 0.0 && alpha < beta && alpha + beta <= 2.0) {
            return Err(Error::unsupported(format!(
                "regularization needs beta > 0, alpha < beta, alpha + beta <= 2; got ({alpha}, {beta})"
            )));
        }
        if !(0.0 < epsilon && epsilon < 1.0) {
            return Err(Error::unsupported(format!("epsilon {epsilon} not in (0, 1)")));
        }
        Ok(RegularizationParams { alpha, beta, epsilon })
    }

    pub fn theta(&self) -> f64 {
        1.0 - (1.0 - self.epsilon).powf(1.0 / self.beta)
    }

    /// Degree threshold multiplier separating `S` from `T`.
    pub fn c0(&self) -> f64 {
        let theta = self.theta();
        (20.0 / (theta * theta)).powf(self.beta / (self.beta - self.alpha))
    }

    /// Max-degree ratio guaranteed for an emitted subgraph.
    pub fn big_c(&self) -> f64 {
        self.c0() / (1.0 - self.theta())
    }

    /// Surplus constant: emitted cuts carry at least
    /// `(theta^2/320) n^alpha d^beta`.
    pub fn surplus_constant(&self) -> f64 {
        let theta = self.theta();
        theta * theta / 320.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularizeCase {
    /// Recursed into the high-degree side `G[T]`.
    RecurseHighDegree,
    /// Emitted a cut from the cross-edge-rich split.
    CutFromCrossEdges,
    /// Emitted the bounded-degree subgraph `G[S]`.
    BoundedDegreeSubgraph,
}

/// What the loop produced.
#[derive(Clone, Debug)]
pub enum RegularizeResult {
    /// A global cut with surplus at least `guarantee`.
    Cut { cut: Cut, guarantee: f64 },
    /// Vertices of an induced subgraph with `max_degree <= C * avg_degree`
    /// and `n'^alpha d'^beta >= (1 - eps) n^alpha d^beta`.
    Subgraph { vertices: Vec<u32> },
}

#[derive(Clone, Debug)]
pub struct RegularizeOutcome {
    pub result: RegularizeResult,
    /// Which case fired at each iteration, in order.
    pub trace: Vec<RegularizeCase>,
}

/// Iterates the three-case claim: recurse into the heavy high-degree side
/// while it keeps the weighted size `n^alpha d^beta`; emit a cut when the
/// cross edges between low- and high-degree vertices dominate; otherwise
/// emit the bounded-degree induced subgraph. Postconditions of the returned
/// object are asserted before returning.
pub fn regularize(
    g: &Graph,
    params: &RegularizationParams,
    seed: u64,
) -> Result<RegularizeOutcome> {
    let theta = params.theta();
    let c0 = params.c0();
    let weighted = |nn: f64, dd: f64| nn.powf(params.alpha) * dd.powf(params.beta);
    let original_weight = weighted(g.n().max(1) as f64, g.average_degree());
    let mut current: Vec<u32> = g.vertices().collect();
    let mut trace = Vec::new();
    for _ in 0..=g.n() {
        let (sub, back) = g.induced(&current);
        let m_cur = sub.m();
        let d_cur = sub.average_degree();
        if m_cur == 0 {
            trace.push(RegularizeCase::BoundedDegreeSubgraph);
            return Ok(RegularizeOutcome {
                result: RegularizeResult::Subgraph { vertices: current },
                trace,
            });
        }
        let low: Vec<u32> = sub
            .vertices()
            .filter(|&v| (sub.degree(v) as f64) <= c0 * d_cur)
            .collect();
        let high: Vec<u32> = sub
            .vertices()
            .filter(|&v| (sub.degree(v) as f64) > c0 * d_cur)
            .collect();
        let e_high = sub.edges_within(&high);
        let e_cross = sub.edges_between(&low, &high);
        if e_high as f64 >= theta * theta / 20.0 * m_cur as f64 {
            trace.push(RegularizeCase::RecurseHighDegree);
            if high.len() >= current.len() {
                return Err(Error::invariant(
                    "high-degree side failed to shrink",
                ));
            }
            // The heavy side keeps the weighted size n^alpha d^beta.
            let (next, _) = sub.induced(&high);
            let w_next = weighted(next.n().max(1) as f64, next.average_degree());
            let w_here = weighted(sub.n().max(1) as f64, d_cur);
            if w_next < w_here - 1e-9 * w_here.abs() {
                return Err(Error::invariant(format!(
                    "weighted size dropped from {w_here} to {w_next} in the high-degree step"
                )));
            }
            current = high.iter().map(|&v| back[v as usize]).collect();
            continue;
        }
        if e_cross as f64 >= theta / 2.0 * m_cur as f64 {
            trace.push(RegularizeCase::CutFromCrossEdges);
            let cut = cross_edge_cut(g, &sub, &back, &low, &high, theta, m_cur, seed)?;
            let guarantee = params.surplus_constant() * original_weight;
            if (cut.surplus_twice() as f64) < 2.0 * guarantee - 1e-9 {
                return Err(Error::invariant(format!(
                    "cross-edge cut surplus {} below guarantee {guarantee}",
                    cut.surplus()
                )));
            }
            return Ok(RegularizeOutcome {
                result: RegularizeResult::Cut { cut, guarantee },
                trace,
            });
        }
        // Low side holds at least (1 - theta) of the edges.
        trace.push(RegularizeCase::BoundedDegreeSubgraph);
        let (tilde, _) = sub.induced(&low);
        let d_tilde = tilde.average_degree();
        if (tilde.max_degree() as f64) > params.big_c() * d_tilde + 1e-9 {
            return Err(Error::invariant(format!(
                "emitted subgraph has max degree {} > C * {d_tilde}",
                tilde.max_degree()
            )));
        }
        let w_tilde = weighted(tilde.n().max(1) as f64, d_tilde);
        if w_tilde < (1.0 - params.epsilon) * original_weight - 1e-9 {
            return Err(Error::invariant(format!(
                "emitted subgraph weight {w_tilde} below (1-eps) * {original_weight}"
            )));
        }
        let vertices = low.iter().map(|&v| back[v as usize]).collect();
        return Ok(RegularizeOutcome {
            result: RegularizeResult::Subgraph { vertices },
            trace,
        });
    }
    Err(Error::invariant(
        "regularization exceeded its iteration budget",
    ))
}

/// The cross-edge-rich case: sample a low-degree subset at rate `theta/4`,
/// cut it against the high-degree side, best of trials until the claim's
/// target `(theta^2/80) m` for `crossing - internal` is met.
#[allow(clippy::too_many_arguments)]
fn cross_edge_cut(
    g: &Graph,
    sub: &Graph,
    back: &[u32],
    low: &[u32],
    high: &[u32],
    theta: f64,
    m_cur: u64,
    seed: u64,
) -> Result<Cut> {
    let target = theta * theta / 80.0 * m_cur as f64;
    let e_high = sub.edges_within(high) as i64;
    let mut best: Option<(i64, Vec<u32>)> = None;
    for trial in 0..8192u64 {
        let mut rng = SplitMix64::new(derive_seed(seed, "regularize-subset", trial));
        let sample: Vec<u32> = low
            .iter()
            .copied()
            .filter(|_| rng.coin(theta / 4.0))
            .collect();
        let value = sub.edges_between(&sample, high) as i64
            - sub.edges_within(&sample) as i64
            - e_high;
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, sample));
        }
        if best.as_ref().unwrap().0 as f64 >= target {
            break;
        }
    }
    let (value, sample) = best.expect("at least one trial ran");
    if (value as f64) < target {
        return Err(Error::invariant(format!(
            "cross-edge sampling reached {value}, target {target}"
        )));
    }
    // Piece: sampled low vertices on one side, all high vertices on the
    // other, translated back to host indices; the rest placed greedily.
    let mut vertices: Vec<u32> = Vec::with_capacity(sample.len() + high.len());
    let mut side = Vec::with_capacity(sample.len() + high.len());
    for &v in &sample {
        vertices.push(back[v as usize]);
        side.push(false);
    }
    for &v in high {
        vertices.push(back[v as usize]);
        side.push(true);
    }
    combine_cuts(g, &[PartCut::new(vertices, side)], CombineMode::Greedy)
}

// ---------------------------------------------------------------------------
// Degenerate / min-degree partition
// ---------------------------------------------------------------------------

/// Bipartition `(S, T)` with `G[S]` `d`-degenerate (witnessed by the peel
/// order) and `G[T]` of minimum degree at least `d`.
#[derive(Clone, Debug)]
pub struct GoodPartition {
    /// Peeled vertices in peel order; each had fewer than `d` neighbours
    /// among the vertices remaining at its peel time.
    pub degenerate: Vec<u32>,
    /// The untouched core, ascending.
    pub core: Vec<u32>,
}

/// Peels any vertex with fewer than `threshold` remaining neighbours until
/// none is left. Both postconditions are re-checked before returning.
pub fn good_partition(g: &Graph, threshold: f64) -> Result<GoodPartition> {
    let n = g.n();
    let mut in_core = vec![true; n];
    let mut deg: Vec<f64> = g.vertices().map(|v| g.degree(v) as f64).collect();
    let mut queue: std::collections::BTreeSet<u32> = g
        .vertices()
        .filter(|&v| deg[v as usize] < threshold)
        .collect();
    let mut peeled = Vec::new();
    while let Some(&v) = queue.iter().next() {
        queue.remove(&v);
        if !in_core[v as usize] {
            continue;
        }
        in_core[v as usize] = false;
        peeled.push(v);
        for w in g.neighbors(v) {
            if in_core[w as usize] {
                deg[w as usize] -= 1.0;
                if deg[w as usize] < threshold {
                    queue.insert(w);
                }
            }
        }
    }
    let core: Vec<u32> = g.vertices().filter(|&v| in_core[v as usize]).collect();
    // Postcondition: min degree of the core.
    let core_mask = g.mask_of(&core);
    for &v in &core {
        let within = crate::graph::intersection_size(g.row(v), &core_mask) as f64;
        if within < threshold {
            return Err(Error::invariant(format!(
                "core vertex {v} has degree {within} < {threshold}"
            )));
        }
    }
    // Postcondition: the peel order witnesses the degeneracy bound. When
    // vertex v is checked, `remaining` holds everything not yet peeled at
    // v's peel time, so v's count there must be below the threshold.
    let mut remaining = vec![true; n];
    for &v in &peeled {
        let later = g
            .neighbors(v)
            .filter(|&w| remaining[w as usize])
            .count() as f64;
        if later >= threshold {
            return Err(Error::invariant(format!(
                "peeled vertex {v} kept {later} >= {threshold} later neighbours"
            )));
        }
        remaining[v as usize] = false;
    }
    Ok(GoodPartition {
        degenerate: peeled,
        core,
    })
}

// ---------------------------------------------------------------------------
// Dyadic codegree bucketing
// ---------------------------------------------------------------------------

/// Winner of the dyadic pigeonhole over 2-path endpoint codegrees.
#[derive(Clone, Copy, Debug)]
pub struct DyadicBucket {
    /// Selected dyadic base `s = 2^b`.
    pub base: u64,
    /// Unordered 2-paths whose endpoint codegree lies in `[s, 2s)`.
    pub bucket_paths: u64,
    /// All unordered 2-paths.
    pub total_paths: u64,
}

impl DyadicBucket {
    /// Density parameter for sampling plans: ordered window 2-paths over
    /// `n * d^2`.
    pub fn nu(&self, g: &Graph) -> f64 {
        let d = g.average_degree();
        if d == 0.0 {
            return 0.0;
        }
        2.0 * self.bucket_paths as f64 / (g.n() as f64 * d * d)
    }
}

/// Buckets every unordered 2-path `u-v-w` by `floor(log2 d(u, w))` and
/// returns the base maximizing `count * s^exponent` (ties to the smaller
/// base). Errors when the graph has no 2-path.
pub fn dyadic_codegree_bucket(g: &Graph, exponent: f64) -> Result<DyadicBucket> {
    let profile = CodegreeProfile::build(g);
    let mut buckets: HashMap<u32, u64> = HashMap::new();
    let mut total = 0u64;
    for (_, codeg) in profile.pairs() {
        // A pair at distance <= 2 with codegree c carries c midpoints.
        let b = 63 - codeg.leading_zeros();
        *buckets.entry(b).or_insert(0) += codeg;
        total += codeg;
    }
    if total == 0 {
        return Err(Error::unsupported("graph has no 2-paths"));
    }
    let mut best: Option<(f64, u32, u64)> = None;
    let mut keys: Vec<u32> = buckets.keys().copied().collect();
    keys.sort_unstable();
    for b in keys {
        let count = buckets[&b];
        let score = count as f64 * 2f64.powf(b as f64 * exponent);
        let better = match best {
            None => true,
            Some((s, _, _)) => score > s,
        };
        if better {
            best = Some((score, b, count));
        }
    }
    let (_, b, count) = best.expect("non-empty buckets");
    Ok(DyadicBucket {
        base: 1u64 << b,
        bucket_paths: count,
        total_paths: total,
    })
}

// ---------------------------------------------------------------------------
// Sampling plans
// ---------------------------------------------------------------------------

/// The label layout shared by the sampling cut routines: label 0 with
/// probability 1/3, each of `1..=centers` with probability `label_prob`,
/// and the remainder on the throwaway label `centers + 1`.
#[derive(Clone, Copy, Debug)]
pub struct SamplingPlan {
    pub centers: usize,
    pub label_prob: f64,
    pub seed: u64,
}

impl SamplingPlan {
    /// Validates feasibility: probabilities must sum to one with the
    /// center band capped at 2/3.
    pub fn new(centers: usize, label_prob: f64, seed: u64) -> Result<SamplingPlan> {
        if !(label_prob > 0.0 && label_prob.is_finite()) {
            return Err(Error::unsupported(format!(
                "label probability {label_prob} must be positive"
            )));
        }
        if centers == 0 {
            return Err(Error::unsupported("sampling plan needs at least one center"));
        }
        let band = centers as f64 * label_prob;
        if band > 2.0 / 3.0 {
            return Err(Error::unsupported(format!(
                "sampling plan infeasible: k * p = {band} > 2/3"
            )));
        }
        Ok(SamplingPlan {
            centers,
            label_prob,
            seed,
        })
    }

    /// The full distribution over labels `0..=centers+1`; sums to one.
    pub fn label_distribution(&self) -> Vec<f64> {
        let mut dist = vec![1.0 / 3.0];
        dist.extend(std::iter::repeat_n(self.label_prob, self.centers));
        dist.push(1.0 - 1.0 / 3.0 - self.centers as f64 * self.label_prob);
        dist
    }
}

// ---------------------------------------------------------------------------
// Good-path profiles
// ---------------------------------------------------------------------------

/// Parameters of the good-path search.
#[derive(Clone, Copy, Debug)]
pub struct GoodPathParams {
    /// Forbidden odd cycle length; must be odd and at least 5.
    pub r: usize,
    /// Pigeonhole exponent; `None` picks
    /// `1 / (40 ell^2 log2(max_degree + 2))`, small enough that the
    /// realized density stays above `d^{-1/10}`.
    pub epsilon: Option<f64>,
    /// Enumeration budget for paths of length `ell`.
    pub cap: u64,
    /// Switch to weighted path sampling when the cap is hit; enumeration
    /// failure otherwise.
    pub sample_above_cap: bool,
    pub seed: u64,
}

impl GoodPathParams {
    pub fn new(r: usize, seed: u64) -> GoodPathParams {
        GoodPathParams {
            r,
            epsilon: None,
            cap: 10_000_000,
            sample_above_cap: false,
            seed,
        }
    }
}

/// Layer partition plus the good-tuple stores at one level `q`.
#[derive(Clone, Debug)]
pub struct ProfileLevel {
    pub level: usize,
    /// Layer index of each vertex, in `0..=level`.
    pub layer: Vec<u8>,
    /// Good `level`-paths whose i-th vertex lies in layer i.
    pub full_tuples: Vec<Vec<u32>>,
    /// Good `(level-1)`-paths layered the same way.
    pub prefix_tuples: Vec<Vec<u32>>,
    /// Expectation estimate `good_count / (level+1)^{level+1}` for the
    /// layered tuple count.
    pub expected_estimate: f64,
    pub draws_used: u32,
    /// Whether a draw within factor 2 of the estimate was found.
    pub converged: bool,
}

/// The dyadic walk-count data of one graph: the window matrix `[i][j]`
/// in force between path positions i < j, the selected signature's density
/// `nu`, and the layered tuple stores for every level `2..=ell`.
#[derive(Clone, Debug)]
pub struct GoodPathProfile {
    pub r: usize,
    pub ell: usize,
    pub epsilon: f64,
    /// `windows[i][j] = s_{i,j}` for i < j <= ell; `windows[i][i+1] = 1`.
    pub windows: Vec<Vec<u64>>,
    /// `(product of windows)^{-epsilon}`.
    pub nu: f64,
    /// Paths of length ell matching the selected signature.
    pub good_path_count: u64,
    pub total_path_count: u64,
    /// Realized `good_path_count / (nu * n * d^ell)`; diagnostic only.
    pub realized_ratio: f64,
    pub levels: Vec<ProfileLevel>,
    pub max_degree: u32,
    /// True when path statistics were estimated by sampling instead of
    /// exhaustive enumeration.
    pub sampled: bool,
}

impl GoodPathProfile {
    pub fn level(&self, q: usize) -> Result<&ProfileLevel> {
        self.levels
            .iter()
            .find(|l| l.level == q)
            .ok_or_else(|| Error::unsupported(format!("no profile level {q}")))
    }

    /// Window base `s_{0,q}`.
    pub fn window(&self, i: usize, j: usize) -> u64 {
        self.windows[i][j]
    }

    /// Simple JSON rendering of the profile summary (stable key order).
    #[allow(clippy::needless_range_loop)] // square matrix, indexed on purpose
    pub fn to_debug_json(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{{\"r\":{},\"ell\":{},\"epsilon\":{:.6e},\"nu\":{:.6},\"good_paths\":{},\"total_paths\":{},\"realized_ratio\":{:.6},\"sampled\":{},",
            self.r, self.ell, self.epsilon, self.nu, self.good_path_count,
            self.total_path_count, self.realized_ratio, self.sampled
        ));
        out.push_str("\"windows\":[");
        for i in 0..=self.ell {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            for j in 0..=self.ell {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&self.windows[i][j].to_string());
            }
            out.push(']');
        }
        out.push_str("],\"levels\":[");
        for (k, level) in self.levels.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let mut sizes = vec![0usize; level.level + 1];
            for &l in &level.layer {
                sizes[l as usize] += 1;
            }
            out.push_str(&format!(
                "{{\"q\":{},\"layer_sizes\":{:?},\"tuples\":{},\"prefix_tuples\":{},\"converged\":{}}}",
                level.level,
                sizes,
                level.full_tuples.len(),
                level.prefix_tuples.len(),
                level.converged
            ));
        }
        out.push_str("]}");
        out
    }
}

/// Walk-count table `h_k(u, -)` for `k <= max_len`, cached per start.
struct WalkTable<'a> {
    g: &'a Graph,
    max_len: usize,
    cache: Vec<Option<Vec<Vec<u64>>>>,
}

impl<'a> WalkTable<'a> {
    fn new(g: &'a Graph, max_len: usize) -> WalkTable<'a> {
        WalkTable {
            g,
            max_len,
            cache: vec![None; g.n()],
        }
    }

    fn counts(&mut self, u: u32) -> Result<&Vec<Vec<u64>>> {
        if self.cache[u as usize].is_none() {
            self.cache[u as usize] = Some(self.g.walk_counts_from(u, self.max_len)?);
        }
        Ok(self.cache[u as usize].as_ref().unwrap())
    }

    fn count(&mut self, u: u32, v: u32, len: usize) -> Result<u64> {
        Ok(self.counts(u)?[len][v as usize])
    }
}

/// Enumerates simple paths of length `len` (ordered; a path and its
/// reverse are both visited), calling `f` on each. Neighbour extensions
/// ascend, so the order is deterministic. Stops with `false` when the
/// budget runs out.
fn for_each_path(g: &Graph, len: usize, cap: u64, f: &mut impl FnMut(&[u32])) -> bool {
    let mut stack: Vec<u32> = Vec::with_capacity(len + 1);
    let mut used = vec![false; g.n()];
    let mut seen = 0u64;
    fn extend(
        g: &Graph,
        len: usize,
        cap: u64,
        stack: &mut Vec<u32>,
        used: &mut Vec<bool>,
        seen: &mut u64,
        f: &mut impl FnMut(&[u32]),
    ) -> bool {
        if stack.len() == len + 1 {
            *seen += 1;
            f(stack);
            return *seen < cap;
        }
        let last = *stack.last().unwrap();
        for w in g.neighbors(last) {
            if !used[w as usize] {
                used[w as usize] = true;
                stack.push(w);
                let ok = extend(g, len, cap, stack, used, seen, f);
                stack.pop();
                used[w as usize] = false;
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    for start in g.vertices() {
        used[start as usize] = true;
        stack.push(start);
        let ok = extend(g, len, cap, &mut stack, &mut used, &mut seen, f);
        stack.pop();
        used[start as usize] = false;
        if !ok {
            return false;
        }
    }
    true
}

/// Signature of a path: `floor(log2 h_{j-i}(u_i, u_j))` for all i < j,
/// row-major.
fn path_signature(path: &[u32], walks: &mut WalkTable) -> Result<Vec<u8>> {
    let mut sig = Vec::with_capacity(path.len() * (path.len() - 1) / 2);
    for i in 0..path.len() - 1 {
        for j in i + 1..path.len() {
            let h = walks.count(path[i], path[j], j - i)?;
            debug_assert!(h >= 1, "walk count along a path is positive");
            sig.push((63 - h.leading_zeros()) as u8);
        }
    }
    Ok(sig)
}

/// Whether all pair walk counts of `path[0..=upto]` hit their windows.
fn is_good_path(
    path: &[u32],
    windows: &[Vec<u64>],
    walks: &mut WalkTable,
    upto: usize,
) -> Result<bool> {
    for i in 0..upto {
        for j in i + 1..=upto {
            let h = walks.count(path[i], path[j], j - i)?;
            let s = windows[i][j];
            if h < s || h >= 2 * s {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Builds the dyadic good-path profile: signature selection by weighted
/// count, then a layered tuple store for every level `2..=ell`.
pub fn good_path_profile(g: &Graph, params: &GoodPathParams) -> Result<GoodPathProfile> {
    if params.r < 5 || params.r.is_multiple_of(2) {
        return Err(Error::unsupported(format!(
            "good paths need an odd cycle length r >= 5, got {}",
            params.r
        )));
    }
    let ell = (params.r - 1) / 2;
    let max_degree = g.max_degree();
    let epsilon = params.epsilon.unwrap_or_else(|| {
        1.0 / (40.0 * (ell * ell) as f64 * ((max_degree + 2) as f64).log2())
    });
    let mut walks = WalkTable::new(g, ell);

    // Tally signatures; the budget runs to cap + 1 so hitting it means the
    // cap was genuinely exceeded.
    let mut tallies: HashMap<Vec<u8>, f64> = HashMap::new();
    let mut total_paths = 0u64;
    let mut sig_err: Option<Error> = None;
    let complete = for_each_path(g, ell, params.cap + 1, &mut |path| {
        total_paths += 1;
        if sig_err.is_some() {
            return;
        }
        match path_signature(path, &mut walks) {
            Ok(sig) => *tallies.entry(sig).or_insert(0.0) += 1.0,
            Err(e) => sig_err = Some(e),
        }
    });
    if let Some(e) = sig_err {
        return Err(e);
    }
    let mut sampled = false;
    if !complete {
        if !params.sample_above_cap {
            return Err(Error::unsupported(format!(
                "more than {} paths of length {ell}; enable sampling",
                params.cap
            )));
        }
        // Weighted sampling: grow a random simple path one uniform
        // neighbour at a time; the weight n * prod(choice counts) makes the
        // per-signature tallies unbiased estimates of the true path counts.
        sampled = true;
        tallies.clear();
        total_paths = 0;
        let mut rng = SplitMix64::new(derive_seed(params.seed, "path-sampler", 0));
        let samples = 200_000u64;
        let n = g.n() as u64;
        for _ in 0..samples {
            let mut path = vec![rng.next_below(n) as u32];
            let mut weight = n as f64;
            let mut dead = false;
            for _ in 0..ell {
                let last = *path.last().unwrap();
                let options: Vec<u32> = g
                    .neighbors(last)
                    .filter(|w| !path.contains(w))
                    .collect();
                if options.is_empty() {
                    dead = true;
                    break;
                }
                let pick = options[rng.next_below(options.len() as u64) as usize];
                weight *= options.len() as f64;
                path.push(pick);
            }
            if dead {
                continue;
            }
            total_paths += 1;
            let sig = path_signature(&path, &mut walks)?;
            *tallies.entry(sig).or_insert(0.0) += weight / samples as f64;
        }
    }
    if tallies.is_empty() {
        return Err(Error::unsupported(format!(
            "graph has no paths of length {ell}"
        )));
    }

    // Heaviest signature under the dyadic weighting: maximize
    // count * (prod 2^b)^epsilon; ties toward the smaller product, then
    // lexicographically.
    let mut entries: Vec<(&Vec<u8>, f64)> = tallies.iter().map(|(k, &v)| (k, v)).collect();
    entries.sort_by(|a, b| {
        let sum_a: u32 = a.0.iter().map(|&x| x as u32).sum();
        let sum_b: u32 = b.0.iter().map(|&x| x as u32).sum();
        let score_a = a.1 * 2f64.powf(sum_a as f64 * epsilon);
        let score_b = b.1 * 2f64.powf(sum_b as f64 * epsilon);
        score_b
            .partial_cmp(&score_a)
            .unwrap()
            .then(sum_a.cmp(&sum_b))
            .then(a.0.cmp(b.0))
    });
    let (best_sig, best_count) = (entries[0].0.clone(), entries[0].1);

    let mut windows = vec![vec![0u64; ell + 1]; ell + 1];
    {
        let mut sig_values = best_sig.iter();
        for (i, row) in windows.iter_mut().enumerate().take(ell) {
            for w in row.iter_mut().skip(i + 1) {
                *w = 1u64 << sig_values.next().expect("signature covers all pairs");
            }
        }
    }
    let log_product: f64 = best_sig.iter().map(|&b| b as f64).sum::<f64>() * 2f64.ln();
    let nu = (-epsilon * log_product).exp();
    let d_avg = g.average_degree();
    let realized_ratio = if d_avg > 0.0 {
        best_count / (nu * g.n() as f64 * d_avg.powi(ell as i32))
    } else {
        0.0
    };

    // Layered tuple stores per level. Layer partitions are re-drawn (up to
    // 20 times) until the stored tuple count lands within a factor 2 of
    // its expectation estimate; otherwise the largest store is kept and
    // the level is flagged unconverged.
    let mut levels = Vec::new();
    for q in 2..=ell {
        let mut good_q = 0u64;
        let mut err: Option<Error> = None;
        let done = for_each_path(g, q, params.cap + 1, &mut |path| {
            if err.is_some() {
                return;
            }
            match is_good_path(path, &windows, &mut walks, q) {
                Ok(true) => good_q += 1,
                Ok(false) => {}
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if !done {
            return Err(Error::unsupported(format!(
                "more than {} paths of length {q}; tuple stores need exhaustive enumeration",
                params.cap
            )));
        }
        let expected = good_q as f64 / ((q + 1) as f64).powi(q as i32 + 1);
        // (layer labels, stored tuples, draws used, hit the target band)
        type Draw = (Vec<u8>, Vec<Vec<u32>>, u32, bool);
        let mut chosen: Option<Draw> = None;
        for draw in 0..20u32 {
            let mut rng = SplitMix64::new(derive_seed(
                params.seed,
                "layer-partition",
                (q as u64) << 32 | draw as u64,
            ));
            let layer: Vec<u8> = (0..g.n())
                .map(|_| rng.next_below(q as u64 + 1) as u8)
                .collect();
            let mut tuples = Vec::new();
            let mut err2: Option<Error> = None;
            for_each_path(g, q, params.cap + 1, &mut |path| {
                if err2.is_some() {
                    return;
                }
                let layered = path
                    .iter()
                    .enumerate()
                    .all(|(i, &v)| layer[v as usize] as usize == i);
                if !layered {
                    return;
                }
                match is_good_path(path, &windows, &mut walks, q) {
                    Ok(true) => tuples.push(path.to_vec()),
                    Ok(false) => {}
                    Err(e) => err2 = Some(e),
                }
            });
            if let Some(e) = err2 {
                return Err(e);
            }
            let count = tuples.len() as f64;
            let hit =
                expected == 0.0 || (count >= expected / 2.0 && count <= expected * 2.0);
            let better = match &chosen {
                None => true,
                Some((_, old, _, old_hit)) => !*old_hit && tuples.len() > old.len(),
            };
            if better {
                chosen = Some((layer, tuples, draw + 1, hit));
            }
            if hit {
                break;
            }
        }
        let (layer, full_tuples, draws_used, converged) = chosen.expect("at least one draw");
        // Prefix tuples under the same partition.
        let mut prefix_tuples = Vec::new();
        let mut err3: Option<Error> = None;
        for_each_path(g, q - 1, params.cap + 1, &mut |path| {
            if err3.is_some() {
                return;
            }
            let layered = path
                .iter()
                .enumerate()
                .all(|(i, &v)| layer[v as usize] as usize == i);
            if !layered {
                return;
            }
            match is_good_path(path, &windows, &mut walks, q - 1) {
                Ok(true) => prefix_tuples.push(path.to_vec()),
                Ok(false) => {}
                Err(e) => err3 = Some(e),
            }
        });
        if let Some(e) = err3 {
            return Err(e);
        }
        levels.push(ProfileLevel {
            level: q,
            layer,
            full_tuples,
            prefix_tuples,
            expected_estimate: expected,
            draws_used,
            converged,
        });
    }

    Ok(GoodPathProfile {
        r: params.r,
        ell,
        epsilon,
        windows,
        nu,
        good_path_count: best_count.round() as u64,
        total_path_count: total_paths,
        realized_ratio,
        levels,
        max_degree,
        sampled,
    })
}

/// Threshold witness sets at level `q`: for a top-layer vertex `u`, the far
/// set collects the layer-0 endpoints reached by at least
/// `|A| s / (4 n Delta^q)` full tuples ending at `u`; the near set does the
/// same one level down with `s'` in place of `s`.
pub fn st_sets(g: &Graph, prof: &GoodPathProfile, q: usize) -> Result<BucketSets> {
    if q < 2 || q > prof.ell {
        return Err(Error::unsupported(format!(
            "level q = {q} out of range 2..={}",
            prof.ell
        )));
    }
    let level = prof.level(q)?;
    let s = prof.window(0, q);
    let s_prev = prof.window(0, q - 1);
    if level.full_tuples.is_empty() {
        // No stored tuples: every threshold set is empty by definition.
        return Ok(BucketSets {
            level: q,
            base: s,
            prev_base: Some(s_prev),
            nu: prof.nu,
            far_sets: vec![Vec::new(); g.n()],
            near_sets: vec![Vec::new(); g.n()],
        });
    }
    let a_total = level.full_tuples.len() as u128;
    let n = g.n() as u128;
    // Threshold comparisons in exact integers:
    // count >= |A| s / (4 n Delta^q)  <=>  count * 4 n Delta^q >= |A| s.
    let delta_pow = (prof.max_degree as u128).checked_pow(q as u32);
    let mut full_by_ends: HashMap<(u32, u32), u64> = HashMap::new();
    for t in &level.full_tuples {
        *full_by_ends
            .entry((t[q], t[0]))
            .or_insert(0) += 1;
    }
    let mut prefix_by_ends: HashMap<(u32, u32), u64> = HashMap::new();
    for t in &level.prefix_tuples {
        *prefix_by_ends
            .entry((t[q - 1], t[0]))
            .or_insert(0) += 1;
    }
    let passes = |count: u64, base: u64| -> bool {
        match delta_pow {
            Some(dp) => (count as u128) * 4 * n * dp >= a_total * base as u128,
            None => {
                let thr = a_total as f64 * base as f64
                    / (4.0 * n as f64 * (prof.max_degree as f64).powi(q as i32));
                count as f64 >= thr
            }
        }
    };
    let mut far_sets = vec![Vec::new(); g.n()];
    let mut near_sets = vec![Vec::new(); g.n()];
    for (&(u, u0), &count) in &full_by_ends {
        if passes(count, s) {
            far_sets[u as usize].push(u0);
        }
    }
    for (&(u, u0), &count) in &prefix_by_ends {
        if passes(count, s_prev) {
            near_sets[u as usize].push(u0);
        }
    }
    for set in far_sets.iter_mut().chain(near_sets.iter_mut()) {
        set.sort_unstable();
    }
    let sets = BucketSets {
        level: q,
        base: s,
        prev_base: Some(s_prev),
        nu: prof.nu,
        far_sets,
        near_sets,
    };
    sets.validate(g)?;
    Ok(sets)
}

/// The two loss sums of the witness sets: over all edges,
/// `|S(u) & S(v)|` and `|T(u) & T(v)|`. Reported for diagnostics; on
/// r-cycle-free inputs these stay near `n d^q / (nu s)` scaled by an
/// unspecified constant, which is logged rather than asserted.
pub fn intersection_sums(g: &Graph, sets: &BucketSets) -> (u64, u64) {
    let mut far = 0u64;
    let mut near = 0u64;
    for (u, v) in g.edges() {
        far += sorted_intersection(&sets.far_sets[u as usize], &sets.far_sets[v as usize]);
        near += sorted_intersection(&sets.near_sets[u as usize], &sets.near_sets[v as usize]);
    }
    (far, near)
}

fn sorted_intersection(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut count) = (0usize, 0usize, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}
