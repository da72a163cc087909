//! A laboratory for cut surpluses: how much more than half its edges a
//! graph's best bipartition can cross.
//!
//! The crate bundles, as executable randomized algorithms, a family of
//! constructive cut-building procedures driven by vertex vectors, random
//! labels and neighbourhood sampling, together with the exact oracles,
//! graph generators and spectral bound calculators needed to check each
//! procedure's surplus claims on desk-scale instances.
//!
//! ```
//! use surplus_lab::{gen, oracle, spectral};
//!
//! let g = gen::paley(13).unwrap();
//! let exact = oracle::max_cut_exact(&g).unwrap();
//! let upper = spectral::eigenvalue_upper_bound(&g).unwrap();
//! assert!(exact.mc as f64 <= upper + 1e-6);
//! assert!(exact.witness.surplus() > 0.0);
//! ```
//!
//! The narrative guide lives in `book/`; its code blocks compile and run
//! as part of `cargo test` through the doctest shims at the bottom of this
//! file.

pub mod corpus;
pub mod error;
pub mod gen;
pub mod graph;
pub mod oracle;
pub mod rng;
pub mod rounding;
pub mod sampling;
pub mod spectral;
pub mod structure;
pub mod vectors;

pub use error::{Error, Result};
pub use graph::{Cut, Graph};


// Doctest shims: every fenced Rust block in the book runs under
// `cargo test` with this crate linked, keeping the guide honest.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(graphs, "../../../book/src/graphs.md");
    chapter!(generators, "../../../book/src/generators.md");
    chapter!(oracles, "../../../book/src/oracles.md");
    chapter!(rounding, "../../../book/src/rounding.md");
    chapter!(vector_families, "../../../book/src/vector-families.md");
    chapter!(structure, "../../../book/src/structure.md");
    chapter!(sampling, "../../../book/src/sampling.md");
    chapter!(spectral, "../../../book/src/spectral.md");
    chapter!(cli, "../../../book/src/cli.md");
}
