//! Immutable simple graphs with bitset adjacency rows, plus the counting
//! primitives (degrees, codegrees, walks, triangles, cliques) the cut
//! constructions consume.
//!
//! Vertices are dense `0..n` indices. The adjacency matrix is stored as one
//! `u64` bitrow per vertex, so neighbourhood intersections are word-parallel
//! popcounts. Graphs are immutable after construction and safe to share
//! across threads; every counting operation is a pure function.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Undirected simple graph. No self-loops, no multi-edges.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    m: u64,
    words: usize,
    /// Row-major adjacency bits: vertex `v` owns `bits[v*words..(v+1)*words]`.
    bits: Vec<u64>,
    degrees: Vec<u32>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("m", &self.m)
            .finish()
    }
}

impl Graph {
    /// Builds a graph on `n` vertices from an edge iterator. Duplicate and
    /// reversed edges collapse to one edge; self-loops and out-of-range
    /// endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let words = n.div_ceil(64).max(1);
        let mut g = Graph {
            n,
            m: 0,
            words,
            bits: vec![0u64; n.max(1) * words],
            degrees: vec![0u32; n],
        };
        for (u, v) in edges {
            if u == v {
                return Err(Error::unsupported(format!("self-loop at vertex {u}")));
            }
            let (u, v) = (u as usize, v as usize);
            if u >= n || v >= n {
                return Err(Error::unsupported(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if !g.test_bit(u, v) {
                g.set_bit(u, v);
                g.set_bit(v, u);
                g.degrees[u] += 1;
                g.degrees[v] += 1;
                g.m += 1;
            }
        }
        Ok(g)
    }

    pub fn empty(n: usize) -> Graph {
        Graph::from_edges(n, std::iter::empty()).expect("no edges")
    }

    /// Parses the plain edge-list format: one `u v` pair per line,
    /// whitespace-separated, `#` starts a comment, blank lines ignored.
    /// Duplicate and reversed edges are deduplicated. Self-loops and
    /// non-numeric tokens are parse errors naming the line.
    ///
    /// Vertex labels are arbitrary non-negative integers; they are mapped to
    /// dense indices in sorted label order.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut raw_edges: Vec<(u64, u64, usize)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let body = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            };
            let mut tokens = body.split_whitespace();
            let (Some(a), b) = (tokens.next(), tokens.next()) else {
                continue; // blank or comment-only line
            };
            let Some(b) = b else {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected two vertex labels".into(),
                });
            };
            if tokens.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected exactly two vertex labels".into(),
                });
            }
            let parse = |t: &str| -> Result<u64> {
                t.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("invalid vertex label `{t}`"),
                })
            };
            let (a, b) = (parse(a)?, parse(b)?);
            if a == b {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("self-loop `{a} {a}`"),
                });
            }
            raw_edges.push((a, b, line_no));
        }
        let mut labels: BTreeMap<u64, u32> = BTreeMap::new();
        for &(a, b, _) in &raw_edges {
            labels.entry(a).or_insert(0);
            labels.entry(b).or_insert(0);
        }
        for (idx, (_, slot)) in labels.iter_mut().enumerate() {
            *slot = idx as u32;
        }
        Graph::from_edges(
            labels.len(),
            raw_edges.iter().map(|&(a, b, _)| (labels[&a], labels[&b])),
        )
    }

    /// Serializes to the edge-list format, optionally with `# `-prefixed
    /// header lines. Edges are written in ascending `(u, v)` order so the
    /// output is canonical.
    pub fn to_edge_list(&self, header: &[String]) -> String {
        let mut out = String::new();
        for line in header {
            let _ = writeln!(out, "# {line}");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    #[inline]
    fn set_bit(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] |= 1u64 << (v % 64);
    }

    #[inline]
    fn test_bit(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> u64 {
        self.m
    }

    #[inline]
    pub fn degree(&self, v: u32) -> u32 {
        self.degrees[v as usize]
    }

    #[inline]
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        u != v && self.test_bit(u as usize, v as usize)
    }

    /// The adjacency bitrow of `v`.
    #[inline]
    pub fn row(&self, v: u32) -> &[u64] {
        let v = v as usize;
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        BitIter::new(self.row(v))
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> {
        0..self.n as u32
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Average degree `2m/n` as a double. Zero for the empty vertex set.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.m as f64 / self.n as f64
        }
    }

    /// `Some(d)` iff every vertex has degree exactly `d`.
    pub fn regular_degree(&self) -> Option<u32> {
        let d = *self.degrees.first()?;
        self.degrees.iter().all(|&x| x == d).then_some(d)
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> u32 {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    /// Minimum, maximum and average degree; the average is reported as the
    /// exact fraction `2m / n` in lowest terms alongside the double.
    pub fn degree_stats(&self) -> DegreeStats {
        let (num, den) = reduce(2 * self.m, self.n as u64);
        DegreeStats {
            min: self.min_degree(),
            max: self.max_degree(),
            average_num: num,
            average_den: den,
            average: self.average_degree(),
        }
    }

    /// Number of common neighbours of two distinct vertices.
    pub fn codegree(&self, u: u32, v: u32) -> Result<u64> {
        if u == v {
            return Err(Error::unsupported(format!(
                "codegree of identical vertices ({u}, {u})"
            )));
        }
        Ok(intersection_size(self.row(u), self.row(v)))
    }

    /// Number of walks of length `len` from `u` to `v`, computed by sparse
    /// matrix-vector products over `u64` with overflow checks.
    pub fn walk_count(&self, u: u32, v: u32, len: usize) -> Result<u64> {
        let mut vec = vec![0u64; self.n];
        vec[u as usize] = 1;
        for _ in 0..len {
            vec = self.walk_step(&vec)?;
        }
        Ok(vec[v as usize])
    }

    /// One adjacency-matrix multiplication of a count vector.
    pub(crate) fn walk_step(&self, counts: &[u64]) -> Result<Vec<u64>> {
        let mut next = vec![0u64; self.n];
        for (w, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for x in BitIter::new(&self.bits[w * self.words..(w + 1) * self.words]) {
                let slot = &mut next[x as usize];
                *slot = slot
                    .checked_add(c)
                    .ok_or_else(|| Error::unsupported("walk count exceeds u64"))?;
            }
        }
        Ok(next)
    }

    /// All walk counts `h_len(u, -)` for `len = 0..=max_len`; entry `[k][v]`.
    pub fn walk_counts_from(&self, u: u32, max_len: usize) -> Result<Vec<Vec<u64>>> {
        let mut out = Vec::with_capacity(max_len + 1);
        let mut vec = vec![0u64; self.n];
        vec[u as usize] = 1;
        out.push(vec.clone());
        for _ in 0..max_len {
            vec = self.walk_step(&vec)?;
            out.push(vec.clone());
        }
        Ok(out)
    }

    /// Exact triangle count via codegrees summed over edges.
    pub fn triangle_count(&self) -> u64 {
        let sum: u64 = self
            .edges()
            .map(|(u, v)| intersection_size(self.row(u), self.row(v)))
            .sum();
        debug_assert_eq!(sum % 3, 0);
        sum / 3
    }

    /// `t(G) - d^3/6` where `d` is the average degree: the deviation of the
    /// triangle count from the random-graph benchmark at the same density.
    pub fn triangle_surplus(&self) -> f64 {
        let d = self.average_degree();
        self.triangle_count() as f64 - d * d * d / 6.0
    }

    /// Number of `r`-cliques, counted by ordered extension over ascending
    /// candidate sets (each clique is produced exactly once).
    pub fn clique_count(&self, r: usize) -> Result<u64> {
        if r < 2 || r > self.n {
            return Err(Error::unsupported(format!(
                "clique size {r} out of range 2..={}",
                self.n
            )));
        }
        if r == 2 {
            return Ok(self.m);
        }
        let mut total = 0u64;
        let mut scratch = vec![0u64; self.words];
        for (u, v) in self.edges() {
            intersect_above(self.row(u), self.row(v), v, &mut scratch);
            total += self.count_clique_extensions(&scratch.clone(), r - 2);
        }
        Ok(total)
    }

    /// Counts `need`-cliques inside the candidate bitset, all of whose
    /// vertices exceed the bits already fixed (the candidate set is already
    /// restricted that way).
    fn count_clique_extensions(&self, candidates: &[u64], need: usize) -> u64 {
        if need == 0 {
            return 1;
        }
        if need == 1 {
            return candidates.iter().map(|w| w.count_ones() as u64).sum();
        }
        let mut total = 0u64;
        let mut next = vec![0u64; self.words];
        for w in BitIter::new(candidates) {
            intersect_above(candidates, self.row(w), w, &mut next);
            total += self.count_clique_extensions(&next.clone(), need - 1);
        }
        total
    }

    /// Number of homomorphisms from the 5-cycle, i.e. the trace of the fifth
    /// adjacency power, summed from per-vertex walk counts.
    pub fn hom_count_c5(&self) -> Result<u64> {
        let mut total = 0u64;
        for u in self.vertices() {
            total = total
                .checked_add(self.walk_count(u, u, 5)?)
                .ok_or_else(|| Error::unsupported("C5 homomorphism count exceeds u64"))?;
        }
        Ok(total)
    }

    /// Repeated minimum-degree peeling. Returns the degeneracy (the largest
    /// degree seen at removal time) and the elimination order; every vertex
    /// has at most `degeneracy` neighbours later in the order.
    pub fn degeneracy_order(&self) -> (u32, Vec<u32>) {
        let mut deg: Vec<u32> = self.degrees.clone();
        let mut removed = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        let mut degeneracy = 0u32;
        // Bucket queue over current degrees; smallest index wins ties.
        let maxd = self.max_degree() as usize;
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); maxd + 1];
        for v in self.vertices() {
            buckets[deg[v as usize] as usize].push(v);
        }
        let mut floor = 0usize;
        for _ in 0..self.n {
            let v = loop {
                while floor <= maxd && buckets[floor].is_empty() {
                    floor += 1;
                }
                let cand = buckets[floor].remove(0);
                // Entries can be stale after degree decrements.
                if !removed[cand as usize] && deg[cand as usize] as usize == floor {
                    break cand;
                }
            };
            removed[v as usize] = true;
            degeneracy = degeneracy.max(deg[v as usize]);
            order.push(v);
            for w in self.neighbors(v) {
                if !removed[w as usize] {
                    deg[w as usize] -= 1;
                    buckets[deg[w as usize] as usize].push(w);
                    floor = floor.min(deg[w as usize] as usize);
                }
            }
        }
        (degeneracy, order)
    }

    /// Induced subgraph on `verts` (deduplicated, ascending). Returns the
    /// subgraph together with the map from new indices back to `verts`.
    pub fn induced(&self, verts: &[u32]) -> (Graph, Vec<u32>) {
        let mut sorted: Vec<u32> = verts.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut rank = vec![u32::MAX; self.n];
        for (i, &v) in sorted.iter().enumerate() {
            rank[v as usize] = i as u32;
        }
        let mut edges = Vec::new();
        for &v in &sorted {
            for w in self.neighbors(v) {
                if w > v && rank[w as usize] != u32::MAX {
                    edges.push((rank[v as usize], rank[w as usize]));
                }
            }
        }
        let g = Graph::from_edges(sorted.len(), edges).expect("induced edges are valid");
        (g, sorted)
    }

    /// Edge count within a vertex subset (given as a sorted slice).
    pub fn edges_within(&self, set: &[u32]) -> u64 {
        let mask = self.mask_of(set);
        set.iter()
            .map(|&v| intersection_size(self.row(v), &mask))
            .sum::<u64>()
            / 2
    }

    /// Edge count between two disjoint vertex subsets.
    pub fn edges_between(&self, a: &[u32], b: &[u32]) -> u64 {
        let mask = self.mask_of(b);
        a.iter()
            .map(|&v| intersection_size(self.row(v), &mask))
            .sum()
    }

    pub(crate) fn mask_of(&self, set: &[u32]) -> Vec<u64> {
        let mut mask = vec![0u64; self.words];
        for &v in set {
            mask[v as usize / 64] |= 1u64 << (v % 64);
        }
        mask
    }

    /// The analytic bound values for this graph. The eigenvalue upper bound
    /// is filled in by the spectral module when requested there; this
    /// function reports the purely combinatorial quantities.
    pub fn bound_report(&self) -> BoundReport {
        let d = self.average_degree();
        let t = self.triangle_count();
        let s = t as f64 - d * d * d / 6.0;
        BoundReport {
            edwards: edwards_bound(self.m),
            shearer_raw: self
                .degrees
                .iter()
                .map(|&x| (x as f64).sqrt())
                .sum::<f64>(),
            eigenvalue_upper: None,
            triangle_count: t,
            triangle_surplus: s,
            regular_surplus_target: self.regular_degree().map(|d| {
                regular_surplus_target(self.n as f64, d as f64, s)
            }),
        }
    }
}

/// `(sqrt(8m+1) - 1) / 8`: the guaranteed surplus of any `m`-edge graph,
/// attained exactly by odd complete graphs.
pub fn edwards_bound(m: u64) -> f64 {
    (((8 * m + 1) as f64).sqrt() - 1.0) / 8.0
}

/// Constant-free surplus target for a regular graph in terms of its order,
/// degree and triangle surplus: `|s|/d`, `n*sqrt(d)` or `n^2 d^2 / s`
/// depending on how `s` compares with `n * d^{3/2}`.
pub fn regular_surplus_target(n: f64, d: f64, s: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    let pivot = n * d.powf(1.5);
    if s < -pivot {
        -s / d
    } else if s <= pivot {
        n * d.sqrt()
    } else {
        n * n * d * d / s
    }
}

/// Sparse per-pair codegrees, materialized only for pairs at distance <= 2
/// (every other pair has codegree zero).
pub struct CodegreeProfile {
    counts: HashMap<(u32, u32), u64>,
}

impl CodegreeProfile {
    pub fn build(g: &Graph) -> CodegreeProfile {
        let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
        for mid in g.vertices() {
            let nbrs: Vec<u32> = g.neighbors(mid).collect();
            for (i, &u) in nbrs.iter().enumerate() {
                for &w in &nbrs[i + 1..] {
                    *counts.entry((u, w)).or_insert(0) += 1;
                }
            }
        }
        CodegreeProfile { counts }
    }

    pub fn codegree(&self, u: u32, v: u32) -> u64 {
        let key = if u < v { (u, v) } else { (v, u) };
        self.counts.get(&key).copied().unwrap_or(0)
    }

    /// `d(u,v) - d^2/n` with `d` the average degree.
    pub fn delta(&self, g: &Graph, u: u32, v: u32) -> f64 {
        let d = g.average_degree();
        self.codegree(u, v) as f64 - d * d / g.n() as f64
    }

    /// `max(delta, 0)`.
    pub fn delta_plus(&self, g: &Graph, u: u32, v: u32) -> f64 {
        self.delta(g, u, v).max(0.0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((u32, u32), u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }
}

/// min/max/average degree; the average also as an exact reduced fraction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeStats {
    pub min: u32,
    pub max: u32,
    pub average_num: u64,
    pub average_den: u64,
    pub average: f64,
}

/// Named analytic bounds for one graph.
#[derive(Clone, Debug)]
pub struct BoundReport {
    /// `(sqrt(8m+1)-1)/8`.
    pub edwards: f64,
    /// `sum_v sqrt(d(v))`, reported raw with no leading constant.
    pub shearer_raw: f64,
    /// `m/2 + |lambda_min| n / 4`, when the spectral module filled it in.
    pub eigenvalue_upper: Option<f64>,
    pub triangle_count: u64,
    /// `t(G) - d^3/6` with `d` the average degree.
    pub triangle_surplus: f64,
    /// Regime-dependent constant-free target for regular graphs.
    pub regular_surplus_target: Option<f64>,
}

fn reduce(num: u64, den: u64) -> (u64, u64) {
    match gcd(num, den) {
        0 => (num, den),
        g => (num / g, den / g),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[inline]
pub(crate) fn intersection_size(a: &[u64], b: &[u64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as u64)
        .sum()
}

/// `out = a & b`, restricted to indices strictly greater than `above`.
fn intersect_above(a: &[u64], b: &[u64], above: u32, out: &mut [u64]) {
    for ((x, y), o) in a.iter().zip(b).zip(out.iter_mut()) {
        *o = x & y;
    }
    let word = above as usize / 64;
    for o in out.iter_mut().take(word) {
        *o = 0;
    }
    let keep_from = above as usize % 64 + 1;
    if keep_from == 64 {
        out[word] = 0;
    } else {
        out[word] &= !0u64 << keep_from;
    }
}

/// Iterator over set bits of a bitrow.
pub(crate) struct BitIter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl<'a> BitIter<'a> {
    pub(crate) fn new(words: &'a [u64]) -> Self {
        BitIter {
            words,
            word_idx: 0,
            current: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for BitIter<'_> {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        while self.current == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
        let bit = self.current.trailing_zeros();
        self.current &= self.current - 1;
        Some(self.word_idx as u32 * 64 + bit)
    }
}

/// A two-sided vertex partition with its cached crossing count.
///
/// `surplus` is exact: it is stored as twice its value (an integer, since
/// `crossing - m/2` always has denominator 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    side: Vec<bool>,
    crossing: u64,
    m: u64,
}

impl Cut {
    /// Builds a cut from a side assignment, counting crossing edges.
    pub fn new(g: &Graph, side: Vec<bool>) -> Cut {
        assert_eq!(side.len(), g.n(), "side vector length mismatch");
        let crossing = g
            .edges()
            .filter(|&(u, v)| side[u as usize] != side[v as usize])
            .count() as u64;
        Cut {
            side,
            crossing,
            m: g.m(),
        }
    }

    #[inline]
    pub fn crossing(&self) -> u64 {
        self.crossing
    }

    #[inline]
    pub fn side(&self, v: u32) -> bool {
        self.side[v as usize]
    }

    pub fn sides(&self) -> &[bool] {
        &self.side
    }

    /// Twice the surplus, `2*crossing - m`, exactly.
    #[inline]
    pub fn surplus_twice(&self) -> i64 {
        2 * self.crossing as i64 - self.m as i64
    }

    pub fn surplus(&self) -> f64 {
        self.surplus_twice() as f64 / 2.0
    }

    /// Recomputes the crossing from the side vector and checks it matches.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let fresh = Cut::new(g, self.side.clone());
        if fresh.crossing != self.crossing || g.m() != self.m {
            return Err(Error::invariant(format!(
                "cut crossing {} does not match recount {}",
                self.crossing, fresh.crossing
            )));
        }
        Ok(())
    }

    /// The side assignment as a 0/1 string, vertex 0 first.
    pub fn side_string(&self) -> String {
        self.side.iter().map(|&s| if s { '1' } else { '0' }).collect()
    }
}
