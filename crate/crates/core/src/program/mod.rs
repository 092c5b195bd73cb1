//! Concurrent programs, their interleaving product, and concrete execution.

mod parse;

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::automata::Nfa;
use crate::formula::{CmpOp, Formula, Instr, IntExpr, Valuation, Var};
use crate::oracle::DomainMap;
use crate::syntax::ParseError;

pub use parse::parse_program;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
    #[error("product automaton exceeds {cap} states")]
    StateCapExceeded { cap: usize },
    #[error("unknown operation label `{0}`")]
    UnknownLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VarDecl {
    pub name: Var,
    pub domain: Vec<i64>,
    pub init: i64,
    /// Owning process for locals.
    pub owner: Option<usize>,
}

/// A labeled instruction; labels are the alphabet of every automaton built
/// from the program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Operation {
    pub label: String,
    pub instr: Instr,
    pub owner: usize,
}

/// A deterministic sequential process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    pub name: String,
    pub states: Vec<String>,
    pub initial: usize,
    /// `(from, operation index, to)`
    pub transitions: Vec<(usize, usize, usize)>,
    pub assertions: BTreeMap<usize, Formula>,
}

impl Process {
    pub fn successor(&self, state: usize, op: usize) -> Option<usize> {
        self.transitions
            .iter()
            .find(|(f, o, _)| *f == state && *o == op)
            .map(|t| t.2)
    }
}

/// An operation sequence, as indices into [`Program::ops`].
pub type Trace = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub vars: Vec<VarDecl>,
    pub processes: Vec<Process>,
    /// Operations in alphabet order.
    pub ops: Vec<Operation>,
}

impl Program {
    pub fn alphabet(&self) -> Vec<String> {
        self.ops.iter().map(|o| o.label.clone()).collect()
    }

    pub fn op_index(&self, label: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.label == label)
    }

    pub fn domains(&self) -> DomainMap {
        self.vars
            .iter()
            .map(|v| (v.name.clone(), v.domain.clone()))
            .collect()
    }

    pub fn initial_valuation(&self) -> Valuation {
        self.vars.iter().map(|v| (v.name.clone(), v.init)).collect()
    }

    /// Conjunction of `v = init(v)` over all variables.
    pub fn initial_formula(&self) -> Formula {
        Formula::conjoin(self.vars.iter().map(|v| {
            Formula::compare(&IntExpr::Var(v.name.clone()), CmpOp::Eq, &IntExpr::Const(v.init))
        }))
    }

    /// Reorders the alphabet. `order` must be a permutation of the labels.
    pub fn with_label_order(&self, order: &[String]) -> Result<Program, ProgramError> {
        let mut perm = Vec::with_capacity(self.ops.len());
        for l in order {
            let i = self
                .op_index(l)
                .ok_or_else(|| ProgramError::UnknownLabel(l.clone()))?;
            if perm.contains(&i) {
                return Err(ProgramError::Semantic {
                    line: 0,
                    message: format!("label `{l}` repeated in label order"),
                });
            }
            perm.push(i);
        }
        if perm.len() != self.ops.len() {
            let missing: Vec<&str> = self
                .ops
                .iter()
                .enumerate()
                .filter(|(i, _)| !perm.contains(i))
                .map(|(_, o)| o.label.as_str())
                .collect();
            return Err(ProgramError::Semantic {
                line: 0,
                message: format!("label order misses {}", missing.join(", ")),
            });
        }
        let mut new_index = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            new_index[old] = new;
        }
        let mut out = self.clone();
        out.ops = perm.iter().map(|&i| self.ops[i].clone()).collect();
        for p in &mut out.processes {
            for t in &mut p.transitions {
                t.1 = new_index[t.1];
            }
        }
        Ok(out)
    }

    /// Parses a trace written as labels. Comma/space-separated tokens are
    /// labels; a token that is not a label is split into single-character labels.
    pub fn parse_trace(&self, text: &str) -> Result<Trace, ProgramError> {
        let mut out = Vec::new();
        for tok in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            if let Some(i) = self.op_index(tok) {
                out.push(i);
                continue;
            }
            for ch in tok.chars() {
                let l = ch.to_string();
                out.push(self.op_index(&l).ok_or(ProgramError::UnknownLabel(l))?);
            }
        }
        Ok(out)
    }

    pub fn trace_labels(&self, trace: &[usize]) -> Vec<String> {
        trace.iter().map(|&i| self.ops[i].label.clone()).collect()
    }

    pub fn instrs<'a>(&'a self, trace: &'a [usize]) -> impl DoubleEndedIterator<Item = &'a Instr> + 'a {
        trace.iter().map(move |&i| &self.ops[i].instr)
    }

    pub fn process_index(&self, name: &str) -> Option<usize> {
        self.processes.iter().position(|p| p.name == name)
    }

    pub fn compose(&self, cap: usize) -> Result<ProductNfa, ProgramError> {
        ProductNfa::build(self, cap)
    }

    /// Runs `trace` from the initial valuation, ignoring control flow.
    pub fn execute_trace(&self, trace: &[usize]) -> ExecutionOutcome {
        let mut val = self.initial_valuation();
        for (pos, &op) in trace.iter().enumerate() {
            if !self.ops[op].instr.execute(&mut val) {
                return ExecutionOutcome::Blocked(pos);
            }
        }
        ExecutionOutcome::Terminated(val)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ExecutionOutcome {
    /// Index of the first operation whose guard failed.
    Blocked(usize),
    Terminated(Valuation),
}

/// Interleaving product of all processes. Deterministic, since every label
/// belongs to exactly one deterministic process.
#[derive(Debug, Clone)]
pub struct ProductNfa {
    pub alphabet: Vec<String>,
    pub states: Vec<Vec<usize>>,
    /// Per state, `(operation, target)` sorted by operation.
    pub transitions: Vec<Vec<(usize, usize)>>,
    /// Accepting states with the conjunction of their assertions.
    pub accepting: BTreeMap<usize, Formula>,
    /// Per accepting state, the individual `(process, assertion)` obligations.
    pub obligations: BTreeMap<usize, Vec<(usize, Formula)>>,
}

impl ProductNfa {
    fn build(p: &Program, cap: usize) -> Result<Self, ProgramError> {
        let init: Vec<usize> = p.processes.iter().map(|pr| pr.initial).collect();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut states = vec![init.clone()];
        index.insert(init, 0);
        let mut transitions: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            let tuple = states[s].clone();
            let mut out = Vec::new();
            for (j, proc) in p.processes.iter().enumerate() {
                for &(from, op, to) in &proc.transitions {
                    if from != tuple[j] {
                        continue;
                    }
                    let mut next = tuple.clone();
                    next[j] = to;
                    let t = match index.get(&next) {
                        Some(&t) => t,
                        None => {
                            if states.len() >= cap {
                                return Err(ProgramError::StateCapExceeded { cap });
                            }
                            states.push(next.clone());
                            transitions.push(Vec::new());
                            index.insert(next, states.len() - 1);
                            queue.push_back(states.len() - 1);
                            states.len() - 1
                        }
                    };
                    out.push((op, t));
                }
            }
            out.sort_unstable();
            transitions[s] = out;
        }
        let mut accepting = BTreeMap::new();
        let mut obligations = BTreeMap::new();
        for (s, tuple) in states.iter().enumerate() {
            let obl: Vec<(usize, Formula)> = tuple
                .iter()
                .enumerate()
                .filter_map(|(j, q)| p.processes[j].assertions.get(q).map(|f| (j, f.clone())))
                .collect();
            if !obl.is_empty() {
                accepting.insert(s, Formula::conjoin(obl.iter().map(|o| o.1.clone())));
                obligations.insert(s, obl);
            }
        }
        Ok(ProductNfa {
            alphabet: p.alphabet(),
            states,
            transitions,
            accepting,
            obligations,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn step(&self, s: usize, op: usize) -> Option<usize> {
        self.transitions[s]
            .iter()
            .find(|(o, _)| *o == op)
            .map(|t| t.1)
    }

    /// State reached by `word`, if it can be read.
    pub fn run(&self, word: &[usize]) -> Option<usize> {
        word.iter().try_fold(0, |s, &op| self.step(s, op))
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        self.run(word).is_some_and(|s| self.accepting.contains_key(&s))
    }

    /// One reversed-language NFA per distinct assertion. A tuple carrying
    /// several assertions belongs to each of their groups.
    pub fn reversed_remaining_languages(&self) -> Vec<(Formula, Nfa)> {
        let mut groups: Vec<(Formula, (usize, usize), Vec<usize>)> = Vec::new();
        for (&s, obl) in &self.obligations {
            for (j, f) in obl {
                match groups.iter_mut().find(|g| &g.0 == f) {
                    Some(g) => {
                        g.1 = g.1.min((*j, s));
                        g.2.push(s);
                    }
                    None => groups.push((f.clone(), (*j, s), vec![s])),
                }
            }
        }
        // processes in declaration order, then first occurrence
        groups.sort_by_key(|g| g.1);
        let mut reversed: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.len()];
        for (s, out) in self.transitions.iter().enumerate() {
            for &(op, t) in out {
                reversed[t].push((op, s));
            }
        }
        for r in &mut reversed {
            r.sort_unstable();
        }
        let mut accepting = vec![false; self.len()];
        accepting[0] = true;
        groups
            .into_iter()
            .map(|(f, _, initial)| {
                (
                    f,
                    Nfa {
                        alphabet: self.alphabet.clone(),
                        transitions: reversed.clone(),
                        initial,
                        accepting: accepting.clone(),
                    },
                )
            })
            .collect()
    }
}
