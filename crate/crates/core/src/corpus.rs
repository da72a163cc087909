//! The bundled verification corpus: named small graphs plus seeded random
//! instances, used by the invariant suites and the acceptance audits.

use crate::gen;
use crate::graph::Graph;

/// Named classical graphs, all small enough for the exact oracle.
pub fn named_small() -> Vec<(String, Graph)> {
    let mut out: Vec<(String, Graph)> = Vec::new();
    for n in 3..=8 {
        out.push((format!("complete {n}"), gen::complete(n)));
    }
    for n in 3..=9 {
        out.push((format!("cycle {n}"), gen::cycle(n)));
    }
    out.push(("petersen".into(), gen::petersen()));
    out.push(("star 5".into(), gen::star(5)));
    out.push(("path 6".into(), gen::path(6)));
    out.push(("paley 5".into(), gen::paley(5).unwrap()));
    out.push(("paley 13".into(), gen::paley(13).unwrap()));
    out.push(("paley 17".into(), gen::paley(17).unwrap()));
    out.push(("polarity 2".into(), gen::polarity(2).unwrap()));
    out.push(("polarity 3".into(), gen::polarity(3).unwrap()));
    out.push((
        "blowup 2 complete 3".into(),
        gen::blowup(&gen::complete(3), 2).unwrap(),
    ));
    out.push((
        "blowup 3 cycle 5".into(),
        gen::blowup(&gen::cycle(5), 3).unwrap(),
    ));
    out.push((
        "blowup 4 complete 2".into(),
        gen::blowup(&gen::complete(2), 4).unwrap(),
    ));
    out
}

/// Audit corpus for the eigenvalue-bound check: every named graph with at
/// most `max_n` vertices plus seeded `gnp` instances, at least 200 graphs
/// total and all with at least one edge.
pub fn audit_corpus(max_n: usize) -> Vec<(String, Graph)> {
    let mut out: Vec<(String, Graph)> = named_small()
        .into_iter()
        .filter(|(_, g)| g.n() <= max_n && g.m() > 0)
        .collect();
    let mut seed = 0u64;
    for n in [8usize, 10, 12, 14, 16, 18, 20] {
        for p in [0.2, 0.35, 0.5, 0.7] {
            for _ in 0..7 {
                seed += 1;
                let g = gen::gnp(n.min(max_n), p, seed).expect("valid gnp");
                if g.m() > 0 {
                    out.push((format!("gnp {} {p} {seed}", n.min(max_n)), g));
                }
            }
        }
    }
    out
}

/// Regular instances for the rounding and vector suites.
pub fn regular_corpus() -> Vec<(String, Graph)> {
    vec![
        ("paley 13".into(), gen::paley(13).unwrap()),
        ("paley 17".into(), gen::paley(17).unwrap()),
        ("petersen".into(), gen::petersen()),
        ("cycle 9".into(), gen::cycle(9)),
        (
            "blowup 3 cycle 5".into(),
            gen::blowup(&gen::cycle(5), 3).unwrap(),
        ),
        (
            "blowup 2 complete 4".into(),
            gen::blowup(&gen::complete(4), 2).unwrap(),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audit_corpus_is_big_enough() {
        let corpus = audit_corpus(20);
        assert!(corpus.len() >= 200, "only {} graphs", corpus.len());
        assert!(corpus.iter().all(|(_, g)| g.m() > 0 && g.n() <= 20));
    }
}
