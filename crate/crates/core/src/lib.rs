//! Exact combinatorics and torus-equivariant geometry of the cyclic-quiver
//! Grassmannian `X(k, n)`.
//!
//! The cells and torus fixed points of `X(k, n)` are indexed by `(k, n)` Grassmann
//! necklaces. This crate provides the dictionaries between necklaces, juggling
//! patterns, bounded affine permutations and successor-closed subquivers; the
//! moment graph with its edge characters; a GKM checker over `Q[ε_1, ..., ε_n, δ]`;
//! dimension bookkeeping for the desingularizations of the irreducible
//! components; and a brute-force point counter over prime fields that validates
//! the cell dimensions independently.
//!
//! The guide in `book/` walks through each of these with runnable snippets.

pub mod affperm;
pub mod desing;
pub mod error;
pub mod fforacle;
pub mod gkm;
pub mod linalg;
pub mod momentgraph;
pub mod necklace;
pub mod poset;
pub mod quiver;

pub use error::{Error, Result};
pub use necklace::{KSubset, Necklace};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/necklaces.md")]
    mod necklaces {}
    #[doc = include_str!("../../../book/src/permutations.md")]
    mod permutations {}
    #[doc = include_str!("../../../book/src/quiver.md")]
    mod quiver {}
    #[doc = include_str!("../../../book/src/moment-graph.md")]
    mod moment_graph {}
    #[doc = include_str!("../../../book/src/gkm.md")]
    mod gkm {}
    #[doc = include_str!("../../../book/src/desingularization.md")]
    mod desingularization {}
    #[doc = include_str!("../../../book/src/point-counts.md")]
    mod point_counts {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
