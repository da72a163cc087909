//! Random-hyperplane rounding of per-vertex vectors, the closed-form
//! expected cut size, identity augmentation, and the explicit surplus lower
//! bound for assignments whose edge inner products split as `-a + b`.
//!
//! The expected crossing of the hyperplane cut is
//! `m/2 - (1/pi) * sum over edges of arcsin(cos-similarity)`; rounding draws
//! a direction with i.i.d. standard normal coordinates (the induced sign
//! pattern matches a uniform unit vector) and keeps the best cut over
//! trials.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Cut, Graph};
use crate::rng::{derive_seed, SplitMix64};

/// One vertex vector, stored as a background value for every head
/// coordinate plus sorted per-coordinate overrides. The families built here
/// either have a constant background (regular vectors) or background zero
/// with small support (bucket vectors), so this stays compact.
#[derive(Clone, Debug)]
pub struct VertexVector {
    background: f64,
    /// Sorted by coordinate; stores the full value at that coordinate.
    entries: Vec<(u32, f64)>,
}

impl VertexVector {
    pub fn new(background: f64, mut entries: Vec<(u32, f64)>) -> VertexVector {
        entries.sort_unstable_by_key(|&(i, _)| i);
        VertexVector { background, entries }
    }

    pub fn dense(values: &[f64]) -> VertexVector {
        VertexVector {
            background: 0.0,
            entries: values
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v != 0.0)
                .map(|(i, &v)| (i as u32, v))
                .collect(),
        }
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn value_at(&self, coord: u32) -> f64 {
        match self.entries.binary_search_by_key(&coord, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => self.background,
        }
    }

    fn head_norm_sq(&self, head_dim: usize) -> f64 {
        let b = self.background;
        let mut acc = b * b * head_dim as f64;
        for &(_, v) in &self.entries {
            acc += v * v - b * b;
        }
        acc
    }

    /// Head part of `<self, other>`:
    /// `bx*by*D + bx*sum(dy) + by*sum(dx) + sum over shared coords of dx*dy`
    /// where `dx`, `dy` are deviations from the backgrounds.
    fn head_dot(&self, other: &VertexVector, head_dim: usize) -> f64 {
        let (bx, by) = (self.background, other.background);
        let mut acc = bx * by * head_dim as f64;
        for &(_, v) in &self.entries {
            acc += (v - bx) * by;
        }
        for &(_, v) in &other.entries {
            acc += (v - by) * bx;
        }
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.entries.len() && j < other.entries.len() {
            match self.entries[i].0.cmp(&other.entries[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += (self.entries[i].1 - bx) * (other.entries[j].1 - by);
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    fn dot_dense(&self, z: &[f64], z_sum: f64) -> f64 {
        let b = self.background;
        let mut acc = b * z_sum;
        for &(i, v) in &self.entries {
            acc += (v - b) * z[i as usize];
        }
        acc
    }

    fn is_finite(&self) -> bool {
        self.background.is_finite() && self.entries.iter().all(|&(_, v)| v.is_finite())
    }
}

/// Per-vertex vectors feeding the rounding engine.
///
/// Identity augmentation is tracked structurally: `tails` counts appended
/// blocks of `n` fresh coordinates in which vertex `v` holds a single 1 at
/// its own slot. Each block adds 1 to every squared norm and leaves all
/// distinct-vertex inner products unchanged.
#[derive(Clone, Debug)]
pub struct VectorAssignment {
    head_dim: usize,
    tails: u32,
    vectors: Vec<VertexVector>,
    label: String,
}

impl VectorAssignment {
    pub fn new(head_dim: usize, vectors: Vec<VertexVector>, label: impl Into<String>) -> Self {
        VectorAssignment {
            head_dim,
            tails: 0,
            vectors,
            label: label.into(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Ambient dimension including augmentation blocks.
    pub fn dim(&self) -> usize {
        self.head_dim + self.tails as usize * self.vectors.len()
    }

    pub fn tails(&self) -> u32 {
        self.tails
    }

    pub fn vector(&self, v: u32) -> &VertexVector {
        &self.vectors[v as usize]
    }

    pub fn norm_sq(&self, v: u32) -> f64 {
        self.vectors[v as usize].head_norm_sq(self.head_dim) + self.tails as f64
    }

    pub fn max_norm_sq(&self) -> f64 {
        (0..self.vectors.len() as u32)
            .map(|v| self.norm_sq(v))
            .fold(0.0, f64::max)
    }

    pub fn inner_product(&self, u: u32, v: u32) -> f64 {
        let head = self.vectors[u as usize].head_dot(&self.vectors[v as usize], self.head_dim);
        if u == v {
            head + self.tails as f64
        } else {
            head
        }
    }

    /// Debug text form: one line per vertex, `v: idx:value idx:value ...`,
    /// listing the explicit coordinates (plus the background and tail
    /// count when present).
    pub fn to_debug_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} dim={} tails={}",
            self.label, self.head_dim, self.tails
        );
        for (v, vector) in self.vectors.iter().enumerate() {
            let _ = write!(out, "{v}:");
            if vector.background != 0.0 {
                let _ = write!(out, " *:{:.6e}", vector.background);
            }
            for &(i, value) in &vector.entries {
                let _ = write!(out, " {i}:{value:.6e}");
            }
            out.push('\n');
        }
        out
    }

    /// Checks that the assignment covers all of `g`, every entry is finite,
    /// and every vector is non-zero.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.vectors.len() != g.n() {
            return Err(Error::unsupported(format!(
                "assignment covers {} vertices, graph has {}",
                self.vectors.len(),
                g.n()
            )));
        }
        for v in g.vertices() {
            if !self.vectors[v as usize].is_finite() {
                return Err(Error::unsupported(format!(
                    "vector of vertex {v} has non-finite entries"
                )));
            }
            if self.norm_sq(v) <= 0.0 {
                return Err(Error::unsupported(format!(
                    "vector of vertex {v} is zero"
                )));
            }
        }
        Ok(())
    }
}

/// Adds one block of fresh coordinates, one per vertex: vertex `v` gets an
/// extra coordinate set to 1, all other new coordinates 0. Pairwise inner
/// products are preserved and every squared norm grows by exactly 1.
pub fn augment_with_identity(g: &Graph, va: &VectorAssignment) -> Result<VectorAssignment> {
    if va.vectors.len() != g.n() {
        return Err(Error::unsupported(
            "assignment does not cover the graph's vertex set",
        ));
    }
    let mut out = va.clone();
    out.tails += 1;
    out.label = format!("{}+e", va.label);
    Ok(out)
}

/// Cosine similarity of two vertex vectors, checked against `[-1, 1]` with
/// a `1e-9` tolerance: beyond the tolerance is an error (a malformed
/// family), within it the value is clamped.
fn checked_similarity(va: &VectorAssignment, u: u32, v: u32) -> Result<f64> {
    let denom = (va.norm_sq(u) * va.norm_sq(v)).sqrt();
    if denom <= 0.0 {
        return Err(Error::unsupported(format!(
            "zero vector on edge ({u}, {v})"
        )));
    }
    let sim = va.inner_product(u, v) / denom;
    if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&sim) {
        return Err(Error::Numeric(format!(
            "cosine similarity {sim} outside [-1, 1] on edge ({u}, {v})"
        )));
    }
    Ok(sim.clamp(-1.0, 1.0))
}

/// Closed-form expected crossing of the random-hyperplane cut:
/// `m/2 - (1/pi) * sum over edges of arcsin(similarity)`.
pub fn analytic_expected_cut(g: &Graph, va: &VectorAssignment) -> Result<f64> {
    va.validate(g)?;
    let mut arcsin_sum = 0.0;
    for (u, v) in g.edges() {
        arcsin_sum += checked_similarity(va, u, v)?.asin();
    }
    Ok(g.m() as f64 / 2.0 - arcsin_sum / std::f64::consts::PI)
}

/// Outcome of best-of-trials hyperplane rounding.
#[derive(Clone, Debug)]
pub struct RoundingOutcome {
    pub cut: Cut,
    pub trials: u32,
    pub best_crossing: u64,
    pub mean_crossing: f64,
    /// Sample standard deviation of the per-trial crossing.
    pub std_crossing: f64,
    pub analytic_expectation: f64,
}

/// Rounds the assignment `trials` times and keeps the best cut.
///
/// Each trial draws a direction with i.i.d. standard normal coordinates
/// (head coordinates first, then augmentation blocks in vertex order) from
/// a stream derived from `(seed, trial)`; vertex `v` goes to side 1 when
/// its projection is strictly positive, so exact zeros land on side 0.
/// Trials run in parallel; the reported best cut is the lowest-index trial
/// attaining the maximum crossing, independent of thread count.
pub fn hyperplane_round(
    g: &Graph,
    va: &VectorAssignment,
    seed: u64,
    trials: u32,
) -> Result<RoundingOutcome> {
    if trials == 0 {
        return Err(Error::unsupported("hyperplane_round requires trials >= 1"));
    }
    let analytic = analytic_expected_cut(g, va)?;
    let n = g.n();
    let run_trial = |t: u32| -> (u64, u32, Vec<bool>) {
        let mut rng = SplitMix64::new(derive_seed(seed, "hyperplane-trial", t as u64));
        let mut z = vec![0.0f64; va.head_dim];
        for slot in z.iter_mut() {
            *slot = rng.next_normal();
        }
        let z_sum: f64 = z.iter().sum();
        // One normal per (augmentation block, vertex), drawn in that order.
        let mut tail_shift = vec![0.0f64; n];
        for _ in 0..va.tails {
            for slot in tail_shift.iter_mut() {
                *slot += rng.next_normal();
            }
        }
        let side: Vec<bool> = (0..n)
            .map(|v| {
                let proj = va.vectors[v].dot_dense(&z, z_sum) + tail_shift[v];
                proj > 0.0
            })
            .collect();
        let crossing = g
            .edges()
            .filter(|&(u, v)| side[u as usize] != side[v as usize])
            .count() as u64;
        (crossing, t, side)
    };
    let (best, sum, sum_sq) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (crossing, t, side) = run_trial(t);
            (Some((crossing, t, side)), crossing as f64, (crossing * crossing) as f64)
        })
        .reduce(
            || (None, 0.0, 0.0),
            |a, b| {
                let best = match (a.0, b.0) {
                    (None, x) | (x, None) => x,
                    (Some(x), Some(y)) => {
                        // Max crossing; ties to the earlier trial.
                        if (y.0, std::cmp::Reverse(y.1)) > (x.0, std::cmp::Reverse(x.1)) {
                            Some(y)
                        } else {
                            Some(x)
                        }
                    }
                };
                (best, a.1 + b.1, a.2 + b.2)
            },
        );
    let (best_crossing, _, side) = best.expect("trials >= 1");
    let mean = sum / trials as f64;
    let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
    let std = if trials > 1 {
        (var * trials as f64 / (trials as f64 - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(RoundingOutcome {
        cut: Cut::new(g, side),
        trials,
        best_crossing,
        mean_crossing: mean,
        std_crossing: std,
        analytic_expectation: analytic,
    })
}

/// Concrete surplus lower bound for an identity-augmented assignment whose
/// edge inner products satisfy `<y^u, y^v> <= -a_uv + b_uv` with
/// `a_uv, b_uv >= 0` and `1 <= |y^v|^2 <= max_norm_sq`.
///
/// Chain: for `x` in `[-1, 1]` with `x <= b - a` (`a, b >= 0`) one has
/// `arcsin(x) <= (pi/2) b - a` (negative `x`: `arcsin(x) <= x`; positive:
/// `arcsin(x) <= (pi/2) x`). Applying this to
/// `x = <y^u, y^v> / (|y^u| |y^v|)` with `a = a_uv / (|y^u||y^v|)`,
/// `b = b_uv / (|y^u||y^v|)`, then bounding `|y^u||y^v|` above by
/// `max_norm_sq` in the gain term and below by 1 in the loss term:
///
/// `surplus >= sum(a_uv) / (pi * max_norm_sq) - sum(b_uv) / 2`.
pub fn surplus_lower_bound_from_products(
    edge_products: &[(f64, f64)],
    max_norm_sq: f64,
) -> Result<f64> {
    if edge_products.is_empty() {
        return Ok(0.0);
    }
    if max_norm_sq < 1.0 {
        return Err(Error::unsupported(
            "max_norm_sq below 1: not an identity-augmented assignment",
        ));
    }
    let (mut a_sum, mut b_sum) = (0.0f64, 0.0f64);
    for &(a, b) in edge_products {
        if a < 0.0 || b < 0.0 {
            return Err(Error::unsupported(format!(
                "negative product term (a, b) = ({a}, {b})"
            )));
        }
        a_sum += a;
        b_sum += b;
    }
    Ok(a_sum / (std::f64::consts::PI * max_norm_sq) - b_sum / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::Graph;

    fn single_edge() -> Graph {
        Graph::from_edges(2, [(0, 1)]).unwrap()
    }

    fn two_vectors(a: &[f64], b: &[f64]) -> VectorAssignment {
        VectorAssignment::new(
            a.len(),
            vec![VertexVector::dense(a), VertexVector::dense(b)],
            "test",
        )
    }

    #[test]
    fn analytic_single_edge_cases() {
        let g = single_edge();
        // Antipodal: cut with probability 1.
        let va = two_vectors(&[1.0, 0.0], &[-1.0, 0.0]);
        assert!((analytic_expected_cut(&g, &va).unwrap() - 1.0).abs() < 1e-12);
        // Orthogonal: 1/2.
        let va = two_vectors(&[1.0, 0.0], &[0.0, 1.0]);
        assert!((analytic_expected_cut(&g, &va).unwrap() - 0.5).abs() < 1e-12);
        // Angle 2*pi/3: arccos(-1/2)/pi = 2/3.
        let va = two_vectors(&[1.0, 0.0], &[-0.5, 3f64.sqrt() / 2.0]);
        assert!((analytic_expected_cut(&g, &va).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_rejects_bad_input() {
        let g = single_edge();
        let va = two_vectors(&[1.0, 0.0], &[0.0, 0.0]);
        assert!(analytic_expected_cut(&g, &va).is_err());
        let va = two_vectors(&[f64::NAN, 0.0], &[1.0, 0.0]);
        assert!(analytic_expected_cut(&g, &va).is_err());
    }

    #[test]
    fn antipodal_rounding_always_cuts() {
        let g = single_edge();
        let va = two_vectors(&[2.0], &[-3.0]);
        let out = hyperplane_round(&g, &va, 5, 32).unwrap();
        assert_eq!(out.best_crossing, 1);
        assert_eq!(out.mean_crossing, 1.0);
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let g = gen::petersen();
        let va = VectorAssignment::new(
            g.n(),
            g.vertices()
                .map(|v| {
                    let entries = g.neighbors(v).map(|w| (w, -1.0)).collect();
                    VertexVector::new(0.0, entries)
                })
                .collect(),
            "nbhd",
        );
        let va = augment_with_identity(&g, &va).unwrap();
        let a = hyperplane_round(&g, &va, 123, 1).unwrap();
        let b = hyperplane_round(&g, &va, 123, 1).unwrap();
        assert_eq!(a.cut, b.cut);
        // Trial count must not change the trial-0 stream.
        let c = hyperplane_round(&g, &va, 123, 8).unwrap();
        assert!(c.best_crossing >= a.best_crossing);
    }

    #[test]
    fn augmentation_preserves_products() {
        let g = gen::cycle(5);
        let va = VectorAssignment::new(
            g.n(),
            g.vertices()
                .map(|v| {
                    let entries = g.neighbors(v).map(|w| (w, -0.5)).collect();
                    VertexVector::new(0.1, entries)
                })
                .collect(),
            "c5",
        );
        let aug = augment_with_identity(&g, &va).unwrap();
        for u in g.vertices() {
            for v in g.vertices() {
                if u == v {
                    assert!((aug.norm_sq(u) - va.norm_sq(u) - 1.0).abs() < 1e-12);
                } else {
                    assert!(
                        (aug.inner_product(u, v) - va.inner_product(u, v)).abs() < 1e-12
                    );
                }
            }
        }
        // All edge products negative => augmented expectation >= m/2.
        let neg_edges = g
            .edges()
            .all(|(u, v)| va.inner_product(u, v) < 0.0);
        assert!(neg_edges);
        let expect = analytic_expected_cut(&g, &aug).unwrap();
        assert!(expect >= g.m() as f64 / 2.0);
    }

    #[test]
    fn analytic_invariances() {
        // Rotation, per-vertex positive scaling and global negation must not
        // move the expectation.
        let g = gen::complete(4);
        let dim = 3;
        let vecs = [vec![1.0, 0.2, -0.3],
            vec![-0.5, 1.0, 0.0],
            vec![0.3, -0.8, 0.7],
            vec![-0.2, -0.1, -1.0]];
        let base = VectorAssignment::new(
            dim,
            vecs.iter().map(|v| VertexVector::dense(v)).collect(),
            "base",
        );
        let e0 = analytic_expected_cut(&g, &base).unwrap();

        // Rotation in the (0, 1) plane by 0.7 radians.
        let (c, s) = (0.7f64.cos(), 0.7f64.sin());
        let rot: Vec<Vec<f64>> = vecs
            .iter()
            .map(|v| vec![c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]])
            .collect();
        let e1 = analytic_expected_cut(
            &g,
            &VectorAssignment::new(dim, rot.iter().map(|v| VertexVector::dense(v)).collect(), "rot"),
        )
        .unwrap();

        let scaled: Vec<Vec<f64>> = vecs
            .iter()
            .enumerate()
            .map(|(i, v)| v.iter().map(|x| x * (1.0 + i as f64)).collect())
            .collect();
        let e2 = analytic_expected_cut(
            &g,
            &VectorAssignment::new(
                dim,
                scaled.iter().map(|v| VertexVector::dense(v)).collect(),
                "scaled",
            ),
        )
        .unwrap();

        let negated: Vec<Vec<f64>> = vecs
            .iter()
            .map(|v| v.iter().map(|x| -x).collect())
            .collect();
        let e3 = analytic_expected_cut(
            &g,
            &VectorAssignment::new(
                dim,
                negated.iter().map(|v| VertexVector::dense(v)).collect(),
                "neg",
            ),
        )
        .unwrap();

        for e in [e1, e2, e3] {
            assert!((e - e0).abs() <= 1e-10 * e0.abs().max(1.0), "{e} vs {e0}");
        }
    }

    #[test]
    fn best_of_trials_attains_the_expectation_on_small_graphs() {
        // An integer random variable lands at or above its mean with
        // positive probability, so enough trials push the best crossing
        // past the analytic expectation on small instances.
        for (g, gamma) in [(gen::petersen(), 0.1), (gen::cycle(9), 0.5)] {
            let p = crate::vectors::RegularVectorParams::for_graph(&g, gamma).unwrap();
            let va = crate::vectors::regular_vectors(&g, &p).unwrap();
            let aug = augment_with_identity(&g, &va).unwrap();
            let out = hyperplane_round(&g, &aug, 11, 1000).unwrap();
            assert!(
                out.best_crossing as f64 >= out.analytic_expectation,
                "best {} below expectation {}",
                out.best_crossing,
                out.analytic_expectation
            );
        }
    }

    #[test]
    fn product_bound_cases() {
        // All b = 0.
        let products = vec![(0.3, 0.0), (0.2, 0.0)];
        let bound = surplus_lower_bound_from_products(&products, 2.0).unwrap();
        assert!((bound - 0.5 / (std::f64::consts::PI * 2.0)).abs() < 1e-12);
        // Empty list.
        assert_eq!(surplus_lower_bound_from_products(&[], 2.0).unwrap(), 0.0);
        // a = 0, b > 0 is non-positive.
        let bound = surplus_lower_bound_from_products(&[(0.0, 0.4)], 2.0).unwrap();
        assert!(bound <= 0.0);
        // Negative terms rejected.
        assert!(surplus_lower_bound_from_products(&[(-0.1, 0.0)], 2.0).is_err());
    }

    #[test]
    fn product_bound_is_sound_against_analytic() {
        // The explicit bound must never exceed the true expected surplus.
        // Self weight 1, neighbour weight -0.4: adjacent pairs see
        // -0.8 + 0.16 * codegree = -0.8 on the triangle-free Petersen.
        let g = gen::petersen();
        let va = VectorAssignment::new(
            g.n(),
            g.vertices()
                .map(|v| {
                    let mut entries: Vec<(u32, f64)> = vec![(v, 1.0)];
                    entries.extend(g.neighbors(v).map(|w| (w, -0.4)));
                    VertexVector::new(0.0, entries)
                })
                .collect(),
            "nbhd",
        );
        let aug = augment_with_identity(&g, &va).unwrap();
        let products: Vec<(f64, f64)> = g
            .edges()
            .map(|(u, v)| {
                let ip = aug.inner_product(u, v);
                if ip <= 0.0 {
                    (-ip, 0.0)
                } else {
                    (0.0, ip)
                }
            })
            .collect();
        let bound =
            surplus_lower_bound_from_products(&products, aug.max_norm_sq()).unwrap();
        let expect = analytic_expected_cut(&g, &aug).unwrap() - g.m() as f64 / 2.0;
        assert!(bound <= expect + 1e-12, "bound {bound} expect {expect}");
        assert!(bound > 0.0);
    }
}
