//! Graph generators: seeded random families and deterministic classical
//! constructions used as harness inputs.
//!
//! Every generator is reproducible: the same [`GeneratorSpec`] (seed
//! included) always yields an identical edge set, bit for bit. Randomness
//! comes from the documented splitmix64 stream in [`crate::rng`].

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::SplitMix64;

/// A parsed generator invocation: family, parameters and seed.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    Gnp { n: usize, p: f64, seed: u64 },
    TriangleFreeGnp { n: usize, p: f64, seed: u64 },
    BipartiteRandom { a: usize, b: usize, p: f64, seed: u64 },
    Paley { q: u64 },
    Polarity { q: u64 },
    Complete { n: usize },
    Cycle { n: usize },
    Star { leaves: usize },
    Path { edges: usize },
    Petersen,
    Blowup { base: Box<GeneratorSpec>, s: usize },
}

impl GeneratorSpec {
    /// Parses the whitespace token syntax used by the CLI and sweep specs,
    /// e.g. `gnp 100 0.1 7`, `paley 13`, `blowup 3 cycle 5`. Random families
    /// take a trailing seed token (default 0).
    pub fn parse(text: &str) -> Result<GeneratorSpec> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let mut pos = 0usize;
        let spec = Self::parse_tokens(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::unsupported(format!(
                "trailing tokens after generator spec: `{}`",
                tokens[pos..].join(" ")
            )));
        }
        Ok(spec)
    }

    fn parse_tokens(tokens: &[&str], pos: &mut usize) -> Result<GeneratorSpec> {
        fn take<'a>(tokens: &[&'a str], pos: &mut usize, what: &str) -> Result<&'a str> {
            let t = tokens
                .get(*pos)
                .ok_or_else(|| Error::unsupported(format!("missing {what}")))?;
            *pos += 1;
            Ok(t)
        }
        fn num<T: std::str::FromStr>(t: &str, what: &str) -> Result<T> {
            t.parse()
                .map_err(|_| Error::unsupported(format!("invalid {what} `{t}`")))
        }
        let family = take(tokens, pos, "generator family")?;
        let spec = match family {
            "gnp" | "triangle-free-gnp" => {
                let n: usize = num(take(tokens, pos, "n")?, "n")?;
                let p: f64 = num(take(tokens, pos, "p")?, "p")?;
                let seed: u64 = match tokens.get(*pos) {
                    Some(t) => {
                        *pos += 1;
                        num(t, "seed")?
                    }
                    None => 0,
                };
                if family == "gnp" {
                    GeneratorSpec::Gnp { n, p, seed }
                } else {
                    GeneratorSpec::TriangleFreeGnp { n, p, seed }
                }
            }
            "bipartite-random" => {
                let a: usize = num(take(tokens, pos, "a")?, "a")?;
                let b: usize = num(take(tokens, pos, "b")?, "b")?;
                let p: f64 = num(take(tokens, pos, "p")?, "p")?;
                let seed: u64 = match tokens.get(*pos) {
                    Some(t) => {
                        *pos += 1;
                        num(t, "seed")?
                    }
                    None => 0,
                };
                GeneratorSpec::BipartiteRandom { a, b, p, seed }
            }
            "paley" => GeneratorSpec::Paley {
                q: num(take(tokens, pos, "q")?, "q")?,
            },
            "polarity" => GeneratorSpec::Polarity {
                q: num(take(tokens, pos, "q")?, "q")?,
            },
            "complete" => GeneratorSpec::Complete {
                n: num(take(tokens, pos, "n")?, "n")?,
            },
            "cycle" => GeneratorSpec::Cycle {
                n: num(take(tokens, pos, "n")?, "n")?,
            },
            "star" => GeneratorSpec::Star {
                leaves: num(take(tokens, pos, "leaves")?, "leaves")?,
            },
            "path" => GeneratorSpec::Path {
                edges: num(take(tokens, pos, "edges")?, "edges")?,
            },
            "petersen" => GeneratorSpec::Petersen,
            "blowup" => {
                let s: usize = num(take(tokens, pos, "blowup size")?, "blowup size")?;
                let base = Self::parse_tokens(tokens, pos)?;
                GeneratorSpec::Blowup { base: Box::new(base), s }
            }
            other => {
                return Err(Error::unsupported(format!(
                    "unknown generator family `{other}`"
                )))
            }
        };
        Ok(spec)
    }

    /// Canonical token form; `parse(spec.to_string())` round-trips.
    pub fn to_token_string(&self) -> String {
        match self {
            GeneratorSpec::Gnp { n, p, seed } => format!("gnp {n} {p} {seed}"),
            GeneratorSpec::TriangleFreeGnp { n, p, seed } => {
                format!("triangle-free-gnp {n} {p} {seed}")
            }
            GeneratorSpec::BipartiteRandom { a, b, p, seed } => {
                format!("bipartite-random {a} {b} {p} {seed}")
            }
            GeneratorSpec::Paley { q } => format!("paley {q}"),
            GeneratorSpec::Polarity { q } => format!("polarity {q}"),
            GeneratorSpec::Complete { n } => format!("complete {n}"),
            GeneratorSpec::Cycle { n } => format!("cycle {n}"),
            GeneratorSpec::Star { leaves } => format!("star {leaves}"),
            GeneratorSpec::Path { edges } => format!("path {edges}"),
            GeneratorSpec::Petersen => "petersen".into(),
            GeneratorSpec::Blowup { base, s } => {
                format!("blowup {s} {}", base.to_token_string())
            }
        }
    }

    pub fn build(&self) -> Result<Graph> {
        match self {
            GeneratorSpec::Gnp { n, p, seed } => gnp(*n, *p, *seed),
            GeneratorSpec::TriangleFreeGnp { n, p, seed } => triangle_free_gnp(*n, *p, *seed),
            GeneratorSpec::BipartiteRandom { a, b, p, seed } => {
                bipartite_random(*a, *b, *p, *seed)
            }
            GeneratorSpec::Paley { q } => paley(*q),
            GeneratorSpec::Polarity { q } => polarity(*q),
            GeneratorSpec::Complete { n } => Ok(complete(*n)),
            GeneratorSpec::Cycle { n } => {
                if *n < 3 {
                    return Err(Error::unsupported("cycle needs at least 3 vertices"));
                }
                Ok(cycle(*n))
            }
            GeneratorSpec::Star { leaves } => Ok(star(*leaves)),
            GeneratorSpec::Path { edges } => Ok(path(*edges)),
            GeneratorSpec::Petersen => Ok(petersen()),
            GeneratorSpec::Blowup { base, s } => blowup(&base.build()?, *s),
        }
    }
}

impl std::fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_token_string())
    }
}

/// Erdos-Renyi graph: each pair is an edge independently with probability
/// `p`. Pairs are visited in ascending `(u, v)` order, one uniform draw per
/// pair, so the edge set is a pure function of `(n, p, seed)`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::unsupported("gnp requires n >= 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::unsupported(format!("edge probability {p} not in [0, 1]")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.coin(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// `gnp` followed by greedy triangle deletion: triangles of the sample are
/// visited in ascending vertex order and any still-intact triangle loses its
/// lowest-index edge. Deletion never creates triangles, so one pass leaves a
/// triangle-free graph. Deterministic; no uniformity claim.
pub fn triangle_free_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    let g = gnp(n, p, seed)?;
    let mut triangles = Vec::new();
    for (u, v) in g.edges() {
        for w in g.neighbors(u) {
            if w > v && g.has_edge(v, w) {
                triangles.push((u, v, w));
            }
        }
    }
    triangles.sort_unstable();
    let mut keep: std::collections::BTreeSet<(u32, u32)> = g.edges().collect();
    for (u, v, w) in triangles {
        if keep.contains(&(u, v)) && keep.contains(&(u, w)) && keep.contains(&(v, w)) {
            keep.remove(&(u, v));
        }
    }
    let out = Graph::from_edges(n, keep)?;
    debug_assert_eq!(out.triangle_count(), 0);
    Ok(out)
}

/// Random bipartite graph on sides of size `a` and `b`.
pub fn bipartite_random(a: usize, b: usize, p: f64, seed: u64) -> Result<Graph> {
    if a == 0 || b == 0 {
        return Err(Error::unsupported("bipartite-random requires non-empty sides"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::unsupported(format!("edge probability {p} not in [0, 1]")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for u in 0..a as u32 {
        for v in 0..b as u32 {
            if rng.coin(p) {
                edges.push((u, a as u32 + v));
            }
        }
    }
    Graph::from_edges(a + b, edges)
}

/// Paley graph on a prime `q = 1 (mod 4)`: vertices `0..q`, edge `uv` iff
/// `u - v` is a nonzero quadratic residue mod `q`. The congruence condition
/// makes `-1` a residue, so adjacency is symmetric.
pub fn paley(q: u64) -> Result<Graph> {
    if q > 10_000 {
        return Err(Error::unsupported("paley supports q <= 10000"));
    }
    if !is_prime(q) || q % 4 != 1 {
        return Err(Error::unsupported(format!(
            "paley requires a prime q = 1 (mod 4), got {q}"
        )));
    }
    let mut residue = vec![false; q as usize];
    for x in 1..q {
        residue[((x * x) % q) as usize] = true;
    }
    let mut edges = Vec::new();
    for u in 0..q {
        for v in u + 1..q {
            if residue[(v - u) as usize] {
                edges.push((u as u32, v as u32));
            }
        }
    }
    Graph::from_edges(q as usize, edges)
}

/// Polarity graph of the projective plane PG(2, q) for prime `q`: vertices
/// are the `q^2 + q + 1` points, normalized so the first nonzero coordinate
/// is 1; distinct points are adjacent iff their dot product vanishes mod
/// `q`. Absolute points (self-orthogonal) simply get degree `q` instead of
/// `q + 1`; no self-loop is emitted.
pub fn polarity(q: u64) -> Result<Graph> {
    if q > 101 {
        return Err(Error::unsupported("polarity supports q <= 101"));
    }
    if !is_prime(q) {
        return Err(Error::unsupported(format!("polarity requires a prime q, got {q}")));
    }
    let mut points: Vec<[u64; 3]> = Vec::new();
    // Canonical representatives: (1, y, z), (0, 1, z), (0, 0, 1).
    for y in 0..q {
        for z in 0..q {
            points.push([1, y, z]);
        }
    }
    for z in 0..q {
        points.push([0, 1, z]);
    }
    points.push([0, 0, 1]);
    let n = points.len();
    debug_assert_eq!(n as u64, q * q + q + 1);
    let dot = |x: &[u64; 3], y: &[u64; 3]| -> u64 {
        (x[0] * y[0] + x[1] * y[1] + x[2] * y[2]) % q
    };
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if dot(&points[u], &points[v]) == 0 {
                edges.push((u as u32, v as u32));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// `s`-blowup: each vertex becomes an independent `s`-set, each edge a
/// complete bipartite join. Vertex `v` maps to indices `v*s..(v+1)*s`.
pub fn blowup(base: &Graph, s: usize) -> Result<Graph> {
    if s == 0 {
        return Err(Error::unsupported("blowup size must be >= 1"));
    }
    let mut edges = Vec::new();
    for (u, v) in base.edges() {
        for i in 0..s as u32 {
            for j in 0..s as u32 {
                edges.push((u * s as u32 + i, v * s as u32 + j));
            }
        }
    }
    Graph::from_edges(base.n() * s, edges)
}

pub fn complete(n: usize) -> Graph {
    let edges = (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)));
    Graph::from_edges(n, edges).expect("complete graph edges are valid")
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let edges = (0..n as u32).map(|u| (u, (u + 1) % n as u32));
    Graph::from_edges(n, edges).expect("cycle edges are valid")
}

/// Star with the given number of leaves; the hub is vertex 0.
pub fn star(leaves: usize) -> Graph {
    let edges = (1..=leaves as u32).map(|v| (0, v));
    Graph::from_edges(leaves + 1, edges).expect("star edges are valid")
}

/// Path with the given number of edges.
pub fn path(edges: usize) -> Graph {
    let list = (0..edges as u32).map(|u| (u, u + 1));
    Graph::from_edges(edges + 1, list).expect("path edges are valid")
}

/// The Petersen graph: outer 5-cycle 0..5, inner pentagram 5..10, spokes.
pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5u32 {
        edges.push((i, (i + 1) % 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
        edges.push((i, 5 + i));
    }
    Graph::from_edges(10, edges).expect("petersen edges are valid")
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= q {
        if q.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_extremes() {
        let empty = gnp(8, 0.0, 1).unwrap();
        assert_eq!(empty.m(), 0);
        let full = gnp(8, 1.0, 1).unwrap();
        assert_eq!(full.m(), 28);
        assert!(gnp(0, 0.5, 1).is_err());
    }

    #[test]
    fn gnp_edge_count_concentrates() {
        // N = 499500 pairs, mean Np, sigma = sqrt(N p (1-p)).
        for seed in [1u64, 2, 3] {
            let g = gnp(1000, 0.1, seed).unwrap();
            let mean = 499_500.0 * 0.1;
            let sigma = (499_500.0f64 * 0.1 * 0.9).sqrt();
            let dev = (g.m() as f64 - mean).abs();
            assert!(dev <= 5.0 * sigma, "seed {seed}: m = {} off by {dev}", g.m());
        }
    }

    #[test]
    fn gnp_is_reproducible() {
        let a = gnp(50, 0.3, 77).unwrap();
        let b = gnp(50, 0.3, 77).unwrap();
        assert_eq!(a.to_edge_list(&[]), b.to_edge_list(&[]));
        let c = gnp(50, 0.3, 78).unwrap();
        assert_ne!(a.to_edge_list(&[]), c.to_edge_list(&[]));
    }

    #[test]
    fn paley_small_cases() {
        let p5 = paley(5).unwrap();
        assert_eq!((p5.n(), p5.m()), (5, 5));
        assert_eq!(p5.regular_degree(), Some(2));
        // Connected 2-regular on 5 vertices is C5.
        assert_eq!(p5.degeneracy_order().0, 2);

        let p13 = paley(13).unwrap();
        assert_eq!(p13.regular_degree(), Some(6));
        for u in p13.vertices() {
            for v in p13.vertices() {
                if v <= u {
                    continue;
                }
                let cod = p13.codegree(u, v).unwrap();
                let expect = if p13.has_edge(u, v) { 2 } else { 3 };
                assert_eq!(cod, expect, "pair ({u},{v})");
            }
        }

        assert_eq!(paley(17).unwrap().regular_degree(), Some(8));
        assert!(paley(7).is_err()); // 7 = 3 mod 4
        assert!(paley(9).is_err()); // not prime
    }

    #[test]
    fn paley_degree_is_half() {
        for q in [5u64, 13, 17, 29, 37] {
            let g = paley(q).unwrap();
            assert_eq!(g.regular_degree(), Some(((q - 1) / 2) as u32));
        }
    }

    #[test]
    fn blowup_examples() {
        let k222 = blowup(&complete(3), 2).unwrap();
        assert_eq!((k222.n(), k222.m()), (6, 12));
        let c5 = cycle(5);
        let same = blowup(&c5, 1).unwrap();
        assert_eq!(same.to_edge_list(&[]), c5.to_edge_list(&[]));
        let big = blowup(&c5, 3).unwrap();
        assert_eq!(big.m(), 45);
        assert_eq!(big.triangle_count(), 0);
    }

    #[test]
    fn blowup_preserves_forbidden_subgraphs() {
        // Clique and odd-cycle freeness survive blowing up.
        let pet = petersen();
        let b = blowup(&pet, 2).unwrap();
        assert_eq!(b.triangle_count(), 0);
        let c7 = cycle(7);
        let b7 = blowup(&c7, 3).unwrap();
        assert_eq!(b7.triangle_count(), 0);
        assert_eq!(b7.clique_count(3).unwrap(), 0);
        // No C5: odd closed walks of length 5 need an odd closed walk in C7.
        assert_eq!(b7.hom_count_c5().unwrap(), 0);
    }

    #[test]
    fn polarity_small_cases() {
        let g = polarity(2).unwrap();
        assert_eq!(g.n(), 7);
        // C4-free iff every pair has codegree <= 1.
        for u in g.vertices() {
            for v in g.vertices().filter(|&v| v > u) {
                assert!(g.codegree(u, v).unwrap() <= 1);
            }
        }
        for q in [2u64, 3, 5, 7] {
            let g = polarity(q).unwrap();
            assert_eq!(g.n() as u64, q * q + q + 1);
            let stats = g.degree_stats();
            assert_eq!(stats.min as u64, q);
            assert_eq!(stats.max as u64, q + 1);
            let absolute = g.vertices().filter(|&v| g.degree(v) as u64 == q).count();
            assert_eq!(absolute as u64, q + 1, "absolute point count at q = {q}");
        }
    }

    #[test]
    fn triangle_free_gnp_is_triangle_free() {
        for seed in 0..5u64 {
            let g = triangle_free_gnp(60, 0.15, seed).unwrap();
            assert_eq!(g.triangle_count(), 0, "seed {seed}");
            assert!(g.m() > 0);
        }
    }

    #[test]
    fn spec_parse_roundtrip() {
        for text in [
            "gnp 100 0.1 7",
            "paley 13",
            "blowup 3 cycle 5",
            "petersen",
            "triangle-free-gnp 200 0.05 3",
            "bipartite-random 4 6 0.5 0",
        ] {
            let spec = GeneratorSpec::parse(text).unwrap();
            assert_eq!(GeneratorSpec::parse(&spec.to_token_string()).unwrap(), spec);
            spec.build().unwrap();
        }
        assert!(GeneratorSpec::parse("gnp").is_err());
        assert!(GeneratorSpec::parse("nosuch 3").is_err());
        assert!(GeneratorSpec::parse("paley 13 extra").is_err());
    }
}
