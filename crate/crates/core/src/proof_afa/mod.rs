//! Alternating automata annotated with the weakest-precondition proof of a trace.
//!
//! Every state carries the formula it must establish (`amap`), the prefix of
//! the trace still to be consumed (`rmap_len`) and, once computed, the
//! formula its accepted words jointly imply (`hmap`). Reading the trace
//! backwards, existential states follow one non-stable operation at a time,
//! and universal states split a compound formula into its parts.

mod dot;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::automata::{Afa, PosBool};
use crate::formula::{assume_to_assert, wp, Formula, Instr};
use crate::oracle::{Oracle, OracleError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("state s{0} has no successor to derive its hmap from")]
    MissingSuccessor(usize),
    #[error("trace letter {0} is outside the alphabet")]
    UnknownLetter(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Connective {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// Created by the trace construction.
    Built,
    /// Created when splitting a universal state along an unsat core.
    Core,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofState {
    pub amap: Formula,
    /// Length of the trace prefix still to be read from this state.
    pub rmap_len: usize,
    pub hmap: Option<Formula>,
    pub universal: bool,
    pub accepting: bool,
    /// How a universal state's children combine.
    pub connective: Option<Connective>,
    /// Letter moves; several targets are alternatives.
    pub letters: BTreeMap<usize, BTreeSet<usize>>,
    /// ε-moves: all required for universal states, alternatives otherwise.
    pub eps: BTreeSet<usize>,
    /// The letter and target of the move that consumes the next non-stable operation.
    pub lit_assn: Option<(usize, usize)>,
    pub origin: Origin,
}

/// Per-state record of the cores used when splitting a universal state.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoreReport {
    pub state: usize,
    /// Each core as a list of child states.
    pub cores: Vec<Vec<usize>>,
    pub truncated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProofAfa {
    pub alphabet: Vec<String>,
    /// The instruction behind each letter.
    #[serde(skip)]
    pub ops: Vec<Instr>,
    pub trace: Vec<usize>,
    pub post: Formula,
    pub states: Vec<ProofState>,
    /// States turned existential by core splitting, with their cores.
    pub splits: Vec<CoreReport>,
}

struct Builder<'a> {
    ops: Vec<Instr>,
    oracle: &'a Oracle,
    stable: HashMap<Formula, Vec<bool>>,
}

impl Builder<'_> {
    /// Stability of `f` under each letter.
    fn stable_letters(&mut self, f: &Formula) -> Result<Vec<bool>, OracleError> {
        if let Some(v) = self.stable.get(f) {
            return Ok(v.clone());
        }
        let mut v = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let pre = wp(op, f);
            v.push(pre == *f || self.oracle.equivalent(&pre, f)?);
        }
        self.stable.insert(f.clone(), v.clone());
        Ok(v)
    }
}

impl ProofAfa {
    /// Builds the annotated automaton for `trace` (letter indices into `ops`)
    /// and postcondition `post`.
    pub fn build(
        alphabet: Vec<String>,
        ops: &[Instr],
        trace: &[usize],
        post: &Formula,
        oracle: &Oracle,
    ) -> Result<ProofAfa, ProofError> {
        if let Some(&bad) = trace.iter().find(|&&a| a >= ops.len()) {
            return Err(ProofError::UnknownLetter(bad));
        }
        let mut b = Builder {
            ops: ops.iter().map(assume_to_assert).collect(),
            oracle,
            stable: HashMap::new(),
        };
        let mut states: Vec<ProofState> = Vec::new();
        let mut index: HashMap<(Formula, usize), usize> = HashMap::new();
        let mut queue = VecDeque::new();

        let mut intern = |amap: Formula,
                          rmap_len: usize,
                          states: &mut Vec<ProofState>,
                          queue: &mut VecDeque<usize>|
         -> usize {
            if let Some(&i) = index.get(&(amap.clone(), rmap_len)) {
                return i;
            }
            let universal = amap.is_compound();
            let connective = universal.then(|| {
                if amap.clauses().len() > 1 {
                    Connective::And
                } else {
                    Connective::Or
                }
            });
            states.push(ProofState {
                amap: amap.clone(),
                rmap_len,
                hmap: None,
                universal,
                accepting: false,
                connective,
                letters: BTreeMap::new(),
                eps: BTreeSet::new(),
                lit_assn: None,
                origin: Origin::Built,
            });
            index.insert((amap, rmap_len), states.len() - 1);
            queue.push_back(states.len() - 1);
            states.len() - 1
        };

        intern(post.clone(), trace.len(), &mut states, &mut queue);
        while let Some(s) = queue.pop_front() {
            let amap = states[s].amap.clone();
            let rlen = states[s].rmap_len;
            let stable = b.stable_letters(&amap)?;
            let pivot = (0..rlen).rev().find(|&i| !stable[trace[i]]);
            states[s].accepting = pivot.is_none();
            if states[s].universal {
                let parts = match states[s].connective {
                    Some(Connective::And) => amap.conjuncts(),
                    _ => amap.disjuncts(),
                };
                let kids: BTreeSet<usize> = parts
                    .into_iter()
                    .map(|f| intern(f, rlen, &mut states, &mut queue))
                    .collect();
                states[s].eps = kids;
                continue;
            }
            for (a, st) in stable.iter().enumerate() {
                if *st {
                    states[s].letters.entry(a).or_default().insert(s);
                }
            }
            if let Some(i) = pivot {
                let a = trace[i];
                let next = wp(&b.ops[a], &amap);
                let t = intern(next, i, &mut states, &mut queue);
                states[s].letters.entry(a).or_default().insert(t);
                states[s].lit_assn = Some((a, t));
            }
        }
        Ok(ProofAfa {
            alphabet,
            ops: ops.to_vec(),
            trace: trace.to_vec(),
            post: post.clone(),
            states,
            splits: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn hmap(&self, s: usize) -> Option<&Formula> {
        self.states[s].hmap.as_ref()
    }

    /// Remaining trace prefix of a state, as letters.
    pub fn rmap(&self, s: usize) -> &[usize] {
        &self.trace[..self.states[s].rmap_len]
    }

    /// Assigns every state's hmap, smallest (remaining length, formula size) first.
    pub fn compute_hmap(&mut self) -> Result<(), ProofError> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&s| (self.states[s].rmap_len, self.states[s].amap.size(), s));
        for s in order {
            let st = &self.states[s];
            let h = if st.accepting {
                st.amap.clone()
            } else if st.universal {
                let kids: Vec<Formula> = st
                    .eps
                    .iter()
                    .map(|&k| self.states[k].hmap.clone().ok_or(ProofError::MissingSuccessor(s)))
                    .collect::<Result<_, _>>()?;
                match st.connective {
                    Some(Connective::And) => Formula::conjoin(kids),
                    _ => Formula::disjoin(kids),
                }
            } else {
                let (_, t) = st.lit_assn.ok_or(ProofError::MissingSuccessor(s))?;
                self.states[t]
                    .hmap
                    .clone()
                    .ok_or(ProofError::MissingSuccessor(s))?
            };
            self.states[s].hmap = Some(h);
        }
        Ok(())
    }

    /// Splits every conjunctive universal state whose hmap is unsatisfiable
    /// along the minimal unsat cores of its children's hmaps. The state becomes
    /// existential, choosing between one universal state per core.
    pub fn generalize_universal(&mut self, oracle: &Oracle) -> Result<(), ProofError> {
        let candidates: Vec<usize> = (0..self.len())
            .filter(|&s| {
                let st = &self.states[s];
                st.universal && st.origin == Origin::Built && st.connective == Some(Connective::And)
            })
            .collect();
        for s in candidates {
            let h = self.states[s].hmap.clone().ok_or(ProofError::MissingSuccessor(s))?;
            if oracle.is_sat(&h)? {
                continue;
            }
            let kids: Vec<usize> = self.states[s].eps.iter().copied().collect();
            let hmaps: Vec<Formula> = kids
                .iter()
                .map(|&k| self.states[k].hmap.clone().ok_or(ProofError::MissingSuccessor(k)))
                .collect::<Result<_, _>>()?;
            let found = oracle.minimal_unsat_cores(&hmaps)?;
            let mut targets = BTreeSet::new();
            let mut report = CoreReport {
                state: s,
                cores: Vec::new(),
                truncated: found.truncated,
            };
            for core in &found.cores {
                let members: Vec<usize> = core.iter().map(|&i| kids[i]).collect();
                report.cores.push(members.clone());
                if let [only] = members[..] {
                    // a one-state conjunction is that state
                    targets.insert(only);
                    continue;
                }
                let amap = Formula::conjoin(members.iter().map(|&k| self.states[k].amap.clone()));
                let hmap = Formula::conjoin(members.iter().map(|&k| self.states[k].hmap.clone().unwrap()));
                self.states.push(ProofState {
                    amap,
                    rmap_len: self.states[s].rmap_len,
                    hmap: Some(hmap),
                    universal: true,
                    accepting: false,
                    connective: Some(Connective::And),
                    letters: BTreeMap::new(),
                    eps: members.into_iter().collect(),
                    lit_assn: None,
                    origin: Origin::Core,
                });
                targets.insert(self.states.len() - 1);
            }
            let st = &mut self.states[s];
            st.universal = false;
            st.connective = None;
            st.eps = targets;
            self.splits.push(report);
        }
        Ok(())
    }

    /// Adds moves between existential literal states whose proofs agree:
    /// both unsatisfiable with the source's precondition implying the target,
    /// or both valid with the target implying the source's precondition.
    pub fn add_edges(&mut self, oracle: &Oracle) -> Result<usize, ProofError> {
        let ops: Vec<Instr> = self.ops.iter().map(assume_to_assert).collect();
        #[derive(Clone, Copy, PartialEq)]
        enum Class {
            Unsat,
            Valid,
        }
        let mut classes: Vec<(usize, Class)> = Vec::new();
        for (s, st) in self.states.iter().enumerate() {
            if st.universal || st.amap.is_compound() {
                continue;
            }
            let h = st.hmap.as_ref().ok_or(ProofError::MissingSuccessor(s))?;
            if !oracle.is_sat(h)? {
                classes.push((s, Class::Unsat));
            } else if oracle.is_valid(h)? {
                classes.push((s, Class::Valid));
            }
        }
        let mut added = 0;
        for &(s, cs) in &classes {
            let amap = self.states[s].amap.clone();
            // None stands for ε
            let moves: Vec<(Option<usize>, Formula)> = std::iter::once((None, amap.clone()))
                .chain(ops.iter().enumerate().map(|(a, op)| (Some(a), wp(op, &amap))))
                .collect();
            for &(t, ct) in &classes {
                if cs != ct {
                    continue;
                }
                let target = self.states[t].amap.clone();
                for (letter, pre) in &moves {
                    if letter.is_none() && s == t {
                        continue;
                    }
                    let present = match letter {
                        None => self.states[s].eps.contains(&t),
                        Some(a) => self.states[s].letters.get(a).is_some_and(|ts| ts.contains(&t)),
                    };
                    if present {
                        continue;
                    }
                    let ok = match cs {
                        Class::Unsat => oracle.implies(pre, &target)?,
                        Class::Valid => oracle.implies(&target, pre)?,
                    };
                    if ok {
                        match letter {
                            None => {
                                self.states[s].eps.insert(t);
                            }
                            Some(a) => {
                                self.states[s].letters.entry(*a).or_default().insert(t);
                            }
                        }
                        added += 1;
                    }
                }
            }
        }
        Ok(added)
    }

    /// The underlying alternating automaton with state 0 as the initial state.
    pub fn to_afa(&self) -> Afa {
        let mut afa = Afa::with_states(self.alphabet.clone(), self.len());
        for (s, st) in self.states.iter().enumerate() {
            for (&a, ts) in &st.letters {
                afa.delta[s][a] = PosBool::any_of(ts.iter().copied());
            }
            afa.eps[s] = if st.universal {
                PosBool::all_of(st.eps.iter().copied())
            } else {
                PosBool::any_of(st.eps.iter().copied())
            };
            afa.accepting[s] = st.accepting;
        }
        afa.initial = if self.is_empty() {
            PosBool::False
        } else {
            PosBool::State(0)
        };
        afa
    }

    /// State with the given annotations, if present.
    pub fn find(&self, amap: &Formula, rmap_len: usize) -> Option<usize> {
        self.states
            .iter()
            .position(|st| &st.amap == amap && st.rmap_len == rmap_len)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("proof automaton serializes")
    }
}

/// Pipeline stages, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Built,
    Annotated,
    Split,
    Edged,
}

/// Runs the full pipeline and returns the generalized proof automaton.
pub fn prove(
    alphabet: Vec<String>,
    ops: &[Instr],
    trace: &[usize],
    post: &Formula,
    oracle: &Oracle,
) -> Result<ProofAfa, ProofError> {
    prove_staged(alphabet, ops, trace, post, oracle, |_, _| {})
}

/// As [`prove`], calling `observe` after every stage.
pub fn prove_staged(
    alphabet: Vec<String>,
    ops: &[Instr],
    trace: &[usize],
    post: &Formula,
    oracle: &Oracle,
    mut observe: impl FnMut(Stage, &ProofAfa),
) -> Result<ProofAfa, ProofError> {
    let mut p = ProofAfa::build(alphabet, ops, trace, post, oracle)?;
    observe(Stage::Built, &p);
    p.compute_hmap()?;
    observe(Stage::Annotated, &p);
    p.generalize_universal(oracle)?;
    observe(Stage::Split, &p);
    p.add_edges(oracle)?;
    observe(Stage::Edged, &p);
    Ok(p)
}

#[cfg(test)]
mod tests;
