//! Alternating and nondeterministic finite automata.

mod afa;
mod nfa;
mod posbool;

use thiserror::Error;

pub use afa::Afa;
pub use nfa::Nfa;
pub use posbool::{minimize, Model, PosBool};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("operation requires an automaton without epsilon transitions")]
    EpsilonPresent,
    #[error("automata are over different alphabets")]
    AlphabetMismatch,
    #[error("subset construction exceeds {cap} macrostates")]
    CapExceeded { cap: usize },
}
