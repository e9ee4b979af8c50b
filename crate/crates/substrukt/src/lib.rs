//! Substructural logics over the full Lambek calculus: sequent calculi with
//! optional exchange, weakening and contraction, proof search and checking,
//! finite algebraic models, ideal completions, and Hilbert-style presentations.
#![warn(missing_docs)]
pub mod algebra;
pub mod bridge;
pub mod calculus;
pub mod completion;
pub mod gen;
pub mod hilbert;
pub mod search;
pub mod sequents;
pub mod syntax;

/// The guide's chapters, compiled so that their snippets run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/formulas-and-sequents.md")]
    mod formulas_and_sequents {}
    #[doc = include_str!("../../../book/src/proof-search.md")]
    mod proof_search {}
    #[doc = include_str!("../../../book/src/algebras.md")]
    mod algebras {}
    #[doc = include_str!("../../../book/src/completions.md")]
    mod completions {}
    #[doc = include_str!("../../../book/src/bridge.md")]
    mod bridge {}
    #[doc = include_str!("../../../book/src/hilbert.md")]
    mod hilbert {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
