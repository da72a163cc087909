//! Ground-truth maximum cuts for small graphs and a flip local search for
//! medium ones.
//!
//! The exact solver fixes vertex 0 on side 0 (cut symmetry) and either
//! enumerates the remaining `2^{n-1}` assignments in Gray-code order with
//! incremental crossing updates (n <= 24) or runs depth-first
//! branch-and-bound with the remaining-edges bound (25 <= n <= 30). Ties
//! among optimal cuts break toward the lexicographically smallest side
//! vector, so witnesses are stable snapshot values.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Cut, Graph};
use crate::rng::{derive_seed, SplitMix64};

/// Hard cap for the exact solver.
pub const EXACT_CAP: usize = 30;
const GRAY_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMethod {
    Exhaustive,
    BranchBound,
    LocalSearchLowerBound,
}

/// A maximum-cut value with its witness. `exact` distinguishes ground
/// truth from heuristic lower bounds; the witness always attains `mc`.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub mc: u64,
    pub witness: Cut,
    pub method: OracleMethod,
    pub exact: bool,
}

/// Exact maximum cut for `n <= 30`.
pub fn max_cut_exact(g: &Graph) -> Result<OracleResult> {
    let n = g.n();
    if n > EXACT_CAP {
        return Err(Error::unsupported(format!(
            "exact oracle capped at n <= {EXACT_CAP}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(OracleResult {
            mc: 0,
            witness: Cut::new(g, Vec::new()),
            method: OracleMethod::Exhaustive,
            exact: true,
        });
    }
    let (crossing, side, method) = if n <= GRAY_LIMIT {
        let (c, s) = gray_enumerate(g);
        (c, s, OracleMethod::Exhaustive)
    } else {
        let (c, s) = branch_and_bound(g);
        (c, s, OracleMethod::BranchBound)
    };
    let witness = Cut::new(g, side);
    debug_assert_eq!(witness.crossing(), crossing);
    Ok(OracleResult {
        mc: crossing,
        witness,
        method,
        exact: true,
    })
}

/// (crossing, side) ordering for merging candidates: larger crossing wins,
/// ties go to the lexicographically smaller side vector.
fn better(crossing: u64, side: &[bool], best_crossing: u64, best_side: &[bool]) -> bool {
    match crossing.cmp(&best_crossing) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => side < best_side,
    }
}

/// Gray-code sweep over all assignments of vertices `1..n` (vertex 0 stays
/// on side 0). Work splits over the top assignment bits; partial winners
/// merge by the same deterministic order, so the result is independent of
/// thread count.
fn gray_enumerate(g: &Graph) -> (u64, Vec<bool>) {
    let n = g.n();
    let free = n - 1; // vertices 1..n
    let low = free.min(16);
    let high = free - low;
    let prefixes: Vec<u64> = (0..(1u64 << high)).collect();
    prefixes
        .par_iter()
        .map(|&prefix| {
            let mut side = vec![false; n];
            for b in 0..high {
                side[1 + low + b] = prefix >> b & 1 == 1;
            }
            let mut crossing = g
                .edges()
                .filter(|&(u, v)| side[u as usize] != side[v as usize])
                .count() as u64;
            let mut best_crossing = crossing;
            let mut best_side = side.clone();
            for step in 1u64..(1u64 << low) {
                let v = 1 + step.trailing_zeros() as usize;
                // Flipping v: same-side neighbours become crossing and
                // vice versa.
                let mut same = 0i64;
                let mut cross = 0i64;
                for w in g.neighbors(v as u32) {
                    if side[w as usize] == side[v] {
                        same += 1;
                    } else {
                        cross += 1;
                    }
                }
                side[v] = !side[v];
                crossing = (crossing as i64 + same - cross) as u64;
                if better(crossing, &side, best_crossing, &best_side) {
                    best_crossing = crossing;
                    best_side.copy_from_slice(&side);
                }
            }
            (best_crossing, best_side)
        })
        .reduce(
            || (0, vec![true; n]),
            |a, b| {
                if better(b.0, &b.1, a.0, &a.1) {
                    b
                } else {
                    a
                }
            },
        )
}

/// Depth-first search in side order (0 before 1) with the admissible bound
/// `current crossing + edges not yet fully assigned`. Pruning keeps
/// subtrees that can only tie, so the first optimum found in depth-first
/// order is the lexicographically smallest one.
fn branch_and_bound(g: &Graph) -> (u64, Vec<bool>) {
    let n = g.n();
    // Edges whose later endpoint is v: when v is assigned, these resolve.
    let mut resolved_at: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (u, v) in g.edges() {
        resolved_at[v as usize].push(u);
    }
    let mut remaining_after = vec![0u64; n + 1];
    for v in (0..n).rev() {
        remaining_after[v] = remaining_after[v + 1] + resolved_at[v].len() as u64;
    }
    struct State<'a> {
        g: &'a Graph,
        resolved_at: Vec<Vec<u32>>,
        remaining_after: Vec<u64>,
        side: Vec<bool>,
        best_crossing: i64,
        best_side: Vec<bool>,
    }
    fn dfs(st: &mut State, v: usize, crossing: u64) {
        let n = st.g.n();
        if v == n {
            if crossing as i64 > st.best_crossing {
                st.best_crossing = crossing as i64;
                st.best_side.copy_from_slice(&st.side);
            }
            return;
        }
        if (crossing + st.remaining_after[v]) as i64 <= st.best_crossing {
            return;
        }
        for s in [false, true] {
            if v == 0 && s {
                break; // vertex 0 pinned to side 0
            }
            st.side[v] = s;
            let gained = st.resolved_at[v]
                .iter()
                .filter(|&&u| st.side[u as usize] != s)
                .count() as u64;
            dfs(st, v + 1, crossing + gained);
        }
    }
    let mut st = State {
        g,
        resolved_at: resolved_at.clone(),
        remaining_after,
        side: vec![false; n],
        best_crossing: -1,
        best_side: vec![false; n],
    };
    dfs(&mut st, 0, 0);
    (st.best_crossing as u64, st.best_side)
}

/// Best cut over `restarts` runs of random start plus single-vertex flip
/// hill climbing. Every returned cut is flip-optimal, so each vertex has
/// at least half its edges crossing and the crossing is at least `m/2`.
pub fn local_search(g: &Graph, seed: u64, restarts: u32) -> OracleResult {
    let n = g.n();
    let runs = restarts.max(1);
    let (best_crossing, best_side) = (0..runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = SplitMix64::new(derive_seed(seed, "local-search", run as u64));
            let mut side: Vec<bool> = (0..n).map(|_| rng.coin(0.5)).collect();
            if n > 0 {
                side[0] = false; // cut symmetry; keeps witnesses canonical
            }
            // Opposite-side neighbour counts, maintained incrementally.
            let mut cross_deg: Vec<i64> = (0..n)
                .map(|v| {
                    g.neighbors(v as u32)
                        .filter(|&w| side[w as usize] != side[v])
                        .count() as i64
                })
                .collect();
            let mut crossing: u64 = g
                .edges()
                .filter(|&(u, v)| side[u as usize] != side[v as usize])
                .count() as u64;
            loop {
                let mut improved = false;
                for v in 0..n {
                    let gain = g.degree(v as u32) as i64 - 2 * cross_deg[v];
                    if gain > 0 {
                        improved = true;
                        side[v] = !side[v];
                        crossing = (crossing as i64 + gain) as u64;
                        cross_deg[v] = g.degree(v as u32) as i64 - cross_deg[v];
                        for w in g.neighbors(v as u32) {
                            if side[w as usize] != side[v] {
                                cross_deg[w as usize] += 1;
                            } else {
                                cross_deg[w as usize] -= 1;
                            }
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
            (crossing, side)
        })
        .reduce(
            || (0, vec![true; n]),
            |a, b| {
                if better(b.0, &b.1, a.0, &a.1) {
                    b
                } else {
                    a
                }
            },
        );
    OracleResult {
        mc: best_crossing,
        witness: Cut::new(g, best_side),
        method: OracleMethod::LocalSearchLowerBound,
        exact: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::edwards_bound;

    #[test]
    fn exact_small_examples() {
        let k5 = gen::complete(5);
        let r = max_cut_exact(&k5).unwrap();
        assert_eq!(r.mc, 6);
        assert_eq!(r.witness.surplus_twice(), 2); // surplus 1 = Edwards value
        assert_eq!(edwards_bound(k5.m()), 1.0);

        let c5 = gen::cycle(5);
        assert_eq!(max_cut_exact(&c5).unwrap().mc, 4);

        let pet = gen::petersen();
        assert_eq!(max_cut_exact(&pet).unwrap().mc, 12);
    }

    #[test]
    fn exact_rejects_oversized() {
        let g = gen::gnp(31, 0.2, 1).unwrap();
        assert!(max_cut_exact(&g).is_err());
    }

    #[test]
    fn witness_is_flip_optimal() {
        let g = gen::gnp(14, 0.4, 11).unwrap();
        let r = max_cut_exact(&g).unwrap();
        for v in g.vertices() {
            let mut side: Vec<bool> = (0..g.n()).map(|u| r.witness.side(u as u32)).collect();
            side[v as usize] = !side[v as usize];
            let flipped = Cut::new(&g, side);
            assert!(flipped.crossing() <= r.mc, "flipping {v} improved the cut");
        }
    }

    #[test]
    fn branch_and_bound_matches_enumeration() {
        // Same graph solved by both engines (pad with isolated vertices to
        // push it over the Gray-code limit).
        let base = gen::gnp(22, 0.3, 5).unwrap();
        let r1 = max_cut_exact(&base).unwrap();
        let padded = Graph::from_edges(26, base.edges()).unwrap();
        let r2 = max_cut_exact(&padded).unwrap();
        assert_eq!(r1.method, OracleMethod::Exhaustive);
        assert_eq!(r2.method, OracleMethod::BranchBound);
        assert_eq!(r1.mc, r2.mc);
        for v in base.vertices() {
            assert_eq!(r1.witness.side(v), r2.witness.side(v), "vertex {v}");
        }
    }

    #[test]
    fn local_search_meets_guarantees() {
        let g = gen::gnp(40, 0.2, 7).unwrap();
        let r = local_search(&g, 3, 10);
        assert!(!r.exact);
        assert!(r.witness.surplus_twice() >= 0);
        let k5 = gen::complete(5);
        assert_eq!(local_search(&k5, 1, 5).mc, 6);
    }

    #[test]
    fn local_search_paley29_regression() {
        // Pinned once from a reference run; guards the documented stream.
        let g = gen::paley(29).unwrap();
        let r = local_search(&g, 2026, 200);
        assert!(r.mc > g.m() / 2);
        assert_eq!(r.mc, PALEY29_LOCAL_SEARCH_200, "regression value moved");
    }

    // Frozen from the first run of this exact configuration (seed 2026,
    // 200 restarts); m/2 = 101.5, so this is a surplus of 20.5.
    const PALEY29_LOCAL_SEARCH_200: u64 = 122;

    #[test]
    fn exact_beats_or_ties_local_search() {
        for seed in 0..5u64 {
            let g = gen::gnp(16, 0.35, seed).unwrap();
            let exact = max_cut_exact(&g).unwrap();
            let ls = local_search(&g, seed, 20);
            assert!(exact.mc >= ls.mc);
        }
    }
}
