//! Safety verification of finite-state shared-memory concurrent programs.
//!
//! Traces of the interleaving product are proved one at a time with weakest
//! preconditions; each proof is generalized into an alternating automaton
//! whose language is subtracted from the traces still left to check.

pub mod automata;
pub mod formula;
pub mod oracle;
pub mod program;
pub mod proof_afa;
pub mod testgen;
pub mod verifier;
mod syntax;

pub use syntax::ParseError;
