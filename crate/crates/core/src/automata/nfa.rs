use std::collections::BTreeSet;

use serde::Serialize;

use super::{Afa, PosBool};

/// Nondeterministic automaton; `transitions[s]` lists `(letter, target)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Nfa {
    pub alphabet: Vec<String>,
    pub transitions: Vec<Vec<(usize, usize)>>,
    pub initial: Vec<usize>,
    pub accepting: Vec<bool>,
}

impl Nfa {
    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut cur: BTreeSet<usize> = self.initial.iter().copied().collect();
        for &a in word {
            cur = cur
                .iter()
                .flat_map(|&s| self.transitions[s].iter().filter(move |t| t.0 == a).map(|t| t.1))
                .collect();
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|&s| self.accepting[s])
    }

    /// The same language as an alternating automaton with disjunctive moves only.
    pub fn to_afa(&self) -> Afa {
        let mut afa = Afa::with_states(self.alphabet.clone(), self.num_states());
        for (s, out) in self.transitions.iter().enumerate() {
            for a in 0..self.alphabet.len() {
                afa.delta[s][a] =
                    PosBool::any_of(out.iter().filter(|t| t.0 == a).map(|t| t.1));
            }
        }
        afa.initial = PosBool::any_of(self.initial.iter().copied());
        afa.accepting = self.accepting.clone();
        afa
    }

    /// Restricts to states reachable from the initial set that can still reach
    /// an accepting state.
    pub fn trim(&self) -> Nfa {
        let n = self.num_states();
        let mut fwd = vec![false; n];
        let mut stack = self.initial.clone();
        while let Some(s) = stack.pop() {
            if !std::mem::replace(&mut fwd[s], true) {
                stack.extend(self.transitions[s].iter().map(|t| t.1));
            }
        }
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, out) in self.transitions.iter().enumerate() {
            for &(_, t) in out {
                rev[t].push(s);
            }
        }
        let mut bwd = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&s| self.accepting[s]).collect();
        while let Some(s) = stack.pop() {
            if !std::mem::replace(&mut bwd[s], true) {
                stack.extend(rev[s].iter().copied());
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&s| fwd[s] && bwd[s]).collect();
        let mut id = vec![usize::MAX; n];
        for (i, &s) in keep.iter().enumerate() {
            id[s] = i;
        }
        Nfa {
            alphabet: self.alphabet.clone(),
            transitions: keep
                .iter()
                .map(|&s| {
                    self.transitions[s]
                        .iter()
                        .filter(|t| id[t.1] != usize::MAX)
                        .map(|&(a, t)| (a, id[t]))
                        .collect()
                })
                .collect(),
            initial: self.initial.iter().filter(|&&s| id[s] != usize::MAX).map(|&s| id[s]).collect(),
            accepting: keep.iter().map(|&s| self.accepting[s]).collect(),
        }
    }
}
