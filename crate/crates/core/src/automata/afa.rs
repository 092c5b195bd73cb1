use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use super::posbool::{conjoin_models, minimize, Model};
use super::{AutomataError, Nfa, PosBool};

/// Alternating automaton over finite words with positive-boolean transitions
/// and ε-moves. Missing transitions are `FALSE`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Afa {
    pub alphabet: Vec<String>,
    /// `delta[state][letter]`
    pub delta: Vec<Vec<PosBool>>,
    pub eps: Vec<PosBool>,
    pub initial: PosBool,
    pub accepting: Vec<bool>,
}

impl Afa {
    /// An automaton with no states whose initial condition is `initial`
    /// (`TRUE` accepts everything, `FALSE` nothing).
    pub fn constant(alphabet: Vec<String>, accept_all: bool) -> Self {
        Afa {
            alphabet,
            delta: Vec::new(),
            eps: Vec::new(),
            initial: if accept_all { PosBool::True } else { PosBool::False },
            accepting: Vec::new(),
        }
    }

    pub fn with_states(alphabet: Vec<String>, n: usize) -> Self {
        let k = alphabet.len();
        Afa {
            alphabet,
            delta: vec![vec![PosBool::False; k]; n],
            eps: vec![PosBool::False; n],
            initial: PosBool::False,
            accepting: vec![false; n],
        }
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        self.delta.push(vec![PosBool::False; self.alphabet.len()]);
        self.eps.push(PosBool::False);
        self.accepting.push(accepting);
        self.delta.len() - 1
    }

    pub fn letter_index(&self, label: &str) -> Option<usize> {
        self.alphabet.iter().position(|l| l == label)
    }

    pub fn has_epsilon(&self) -> bool {
        self.eps.iter().any(|e| !e.is_false())
    }

    /// Number of transition formulas that are not `FALSE`.
    pub fn num_transitions(&self) -> usize {
        self.delta
            .iter()
            .flat_map(|row| row.iter())
            .chain(self.eps.iter())
            .filter(|p| !p.is_false())
            .count()
    }

    /// Acceptance of `word` (letter indices).
    pub fn accepts(&self, word: &[usize]) -> bool {
        let acc = self.accepting_sets(word);
        self.initial.eval(&|s| acc[s])
    }

    /// Acceptance of `word` starting from a single state.
    pub fn accepts_from(&self, state: usize, word: &[usize]) -> bool {
        self.accepting_sets(word)[state]
    }

    // States accepting the whole of `word`, via the suffix sets computed
    // right to left, each closed under ε by a least fixpoint.
    fn accepting_sets(&self, word: &[usize]) -> Vec<bool> {
        let n = self.num_states();
        let mut next: Vec<bool> = self.accepting.clone();
        next = self.eps_closure(next);
        for &a in word.iter().rev() {
            let base: Vec<bool> = (0..n)
                .map(|s| self.delta[s][a].eval(&|t| next[t]))
                .collect();
            next = self.eps_closure(base);
        }
        next
    }

    fn eps_closure(&self, mut set: Vec<bool>) -> Vec<bool> {
        if !self.has_epsilon() {
            return set;
        }
        loop {
            let mut changed = false;
            for s in 0..set.len() {
                if !set[s] && self.eps[s].eval(&|t| set[t]) {
                    set[s] = true;
                    changed = true;
                }
            }
            if !changed {
                return set;
            }
        }
    }

    /// Equivalent automaton without ε-moves.
    ///
    /// Each state's ε-closure is the least fixpoint of
    /// `C(s) = s ∨ eps(s)[t := C(t)]` in minimal-model form; letter moves and
    /// acceptance are then read through the closure.
    pub fn eliminate_epsilon(&self) -> Afa {
        if !self.has_epsilon() {
            return self.clone();
        }
        let n = self.num_states();
        let mut closure: Vec<Vec<Model>> = vec![Vec::new(); n];
        loop {
            let mut changed = false;
            for s in 0..n {
                let mut models = models_through(&self.eps[s], &closure);
                models.push(vec![s]);
                let models = minimize(models);
                if models != closure[s] {
                    closure[s] = models;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut out = Afa::with_states(self.alphabet.clone(), n);
        out.initial = self.initial.clone();
        for s in 0..n {
            let models = &closure[s];
            out.accepting[s] = models
                .iter()
                .any(|m| m.iter().all(|&t| self.accepting[t]));
            for a in 0..self.alphabet.len() {
                out.delta[s][a] = PosBool::or(
                    models
                        .iter()
                        .map(|m| PosBool::and(m.iter().map(|&t| self.delta[t][a].clone()))),
                );
            }
        }
        out
    }

    /// Automaton for the complementary language, by dualization.
    pub fn complement(&self) -> Result<Afa, AutomataError> {
        if self.has_epsilon() {
            return Err(AutomataError::EpsilonPresent);
        }
        Ok(Afa {
            alphabet: self.alphabet.clone(),
            delta: self
                .delta
                .iter()
                .map(|row| row.iter().map(|p| p.dual()).collect())
                .collect(),
            eps: self.eps.clone(),
            initial: self.initial.dual(),
            accepting: self.accepting.iter().map(|a| !a).collect(),
        })
    }

    /// Product by disjoint union with a conjunctive initial condition.
    pub fn intersect(&self, other: &Afa) -> Result<Afa, AutomataError> {
        if self.alphabet != other.alphabet {
            return Err(AutomataError::AlphabetMismatch);
        }
        let k = self.num_states();
        let mut out = self.clone();
        out.delta
            .extend(other.delta.iter().map(|row| row.iter().map(|p| p.shift(k)).collect()));
        out.eps.extend(other.eps.iter().map(|p| p.shift(k)));
        out.accepting.extend(other.accepting.iter().copied());
        out.initial = PosBool::and([self.initial.clone(), other.initial.shift(k)]);
        Ok(out)
    }

    /// Drops states unreachable from the initial condition, renumbering the rest.
    pub fn trim(&self) -> Afa {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<usize> = self.initial.leaves().into_iter().collect();
        while let Some(s) = stack.pop() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            for p in self.delta[s].iter().chain(std::iter::once(&self.eps[s])) {
                stack.extend(p.leaves().into_iter().filter(|t| !seen[*t]));
            }
        }
        let mut new_id = vec![usize::MAX; self.num_states()];
        let mut next = 0;
        for (s, keep) in seen.iter().enumerate() {
            if *keep {
                new_id[s] = next;
                next += 1;
            }
        }
        let map = |s: usize| new_id[s];
        let keep: Vec<usize> = (0..self.num_states()).filter(|&s| seen[s]).collect();
        Afa {
            alphabet: self.alphabet.clone(),
            delta: keep
                .iter()
                .map(|&s| self.delta[s].iter().map(|p| p.map_states(&map)).collect())
                .collect(),
            eps: keep.iter().map(|&s| self.eps[s].map_states(&map)).collect(),
            initial: self.initial.map_states(&map),
            accepting: keep.iter().map(|&s| self.accepting[s]).collect(),
        }
    }

    /// Subset construction over minimal models. NFA state `i` of the result
    /// corresponds to `macrostates[i]`.
    pub fn to_nfa(&self, cap: usize) -> Result<(Nfa, Vec<Model>), AutomataError> {
        let mut ex = Explorer::new(self)?;
        let init = self.initial.minimal_models();
        let mut index: HashMap<Model, usize> = HashMap::new();
        let mut macros: Vec<Model> = Vec::new();
        let mut queue = VecDeque::new();
        let mut intern = |m: Model, macros: &mut Vec<Model>, queue: &mut VecDeque<usize>| -> Result<usize, AutomataError> {
            if let Some(&i) = index.get(&m) {
                return Ok(i);
            }
            if macros.len() >= cap {
                return Err(AutomataError::CapExceeded { cap });
            }
            macros.push(m.clone());
            index.insert(m, macros.len() - 1);
            queue.push_back(macros.len() - 1);
            Ok(macros.len() - 1)
        };
        let mut initial = Vec::new();
        for m in init {
            initial.push(intern(m, &mut macros, &mut queue)?);
        }
        let mut transitions: Vec<Vec<(usize, usize)>> = Vec::new();
        while let Some(q) = queue.pop_front() {
            let mut out = Vec::new();
            for a in 0..self.alphabet.len() {
                let succ = ex.step(&macros[q].clone(), a);
                for m in succ {
                    out.push((a, intern(m, &mut macros, &mut queue)?));
                }
            }
            if transitions.len() <= q {
                transitions.resize(q + 1, Vec::new());
            }
            transitions[q] = out;
        }
        transitions.resize(macros.len(), Vec::new());
        let accepting = macros.iter().map(|m| ex.is_accepting(m)).collect();
        Ok((
            Nfa {
                alphabet: self.alphabet.clone(),
                transitions,
                initial,
                accepting,
            },
            macros,
        ))
    }

    /// A shortest accepted word, least in label order among those; `None` if
    /// the language is empty.
    pub fn shortest_word(&self, cap: usize) -> Result<Option<Vec<usize>>, AutomataError> {
        Ok(self.shortest_word_with_stats(cap)?.0)
    }

    /// As [`Afa::shortest_word`], also returning the number of macrostates explored.
    pub fn shortest_word_with_stats(&self, cap: usize) -> Result<(Option<Vec<usize>>, usize), AutomataError> {
        let mut ex = Explorer::new(self)?;
        let mut index: HashMap<Model, usize> = HashMap::new();
        let mut pred: Vec<Option<(usize, usize)>> = Vec::new();
        let mut macros: Vec<Model> = Vec::new();
        let mut queue = VecDeque::new();
        for m in self.initial.minimal_models() {
            if index.contains_key(&m) {
                continue;
            }
            index.insert(m.clone(), macros.len());
            macros.push(m);
            pred.push(None);
            queue.push_back(macros.len() - 1);
        }
        while let Some(q) = queue.pop_front() {
            if ex.is_accepting(&macros[q]) {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, a)) = pred[cur] {
                    word.push(a);
                    cur = p;
                }
                word.reverse();
                return Ok((Some(word), macros.len()));
            }
            for a in 0..self.alphabet.len() {
                let here = macros[q].clone();
                for m in ex.step(&here, a) {
                    if index.contains_key(&m) {
                        continue;
                    }
                    if macros.len() >= cap {
                        return Err(AutomataError::CapExceeded { cap });
                    }
                    index.insert(m.clone(), macros.len());
                    macros.push(m);
                    pred.push(Some((q, a)));
                    queue.push_back(macros.len() - 1);
                }
            }
        }
        Ok((None, macros.len()))
    }

    pub fn is_empty(&self, cap: usize) -> Result<bool, AutomataError> {
        Ok(self.shortest_word(cap)?.is_none())
    }

    /// Accepted words in length-then-label order, up to `max_len` letters.
    /// Stops after `limit` words or after visiting `budget` prefixes.
    pub fn accepted_words(&self, max_len: usize, limit: usize, budget: usize) -> Vec<Vec<usize>> {
        let ef = self.eliminate_epsilon();
        let mut ex = Explorer::new(&ef).expect("epsilon-free");
        let mut out = Vec::new();
        let start: BTreeSet<Model> = ef.initial.minimal_models().into_iter().collect();
        let mut level: Vec<(Vec<usize>, BTreeSet<Model>)> = vec![(Vec::new(), start)];
        let mut visited = 0usize;
        for len in 0..=max_len {
            let mut next_level = Vec::new();
            for (word, front) in &level {
                visited += 1;
                if visited > budget {
                    return out;
                }
                if front.iter().any(|m| ex.is_accepting(m)) {
                    out.push(word.clone());
                    if out.len() >= limit {
                        return out;
                    }
                }
                if len == max_len {
                    continue;
                }
                for a in 0..ef.alphabet.len() {
                    let succ: BTreeSet<Model> = front.iter().flat_map(|m| ex.step(m, a)).collect();
                    if !succ.is_empty() {
                        let mut w = word.clone();
                        w.push(a);
                        next_level.push((w, succ));
                    }
                }
            }
            level = next_level;
        }
        out
    }

    /// Graphviz rendering. Composite transitions go through small junction nodes.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n  rankdir=LR;\n  init [shape=point];\n");
        for q in 0..self.num_states() {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  s{q} [shape={shape}, label=\"s{q}\"];");
        }
        let mut junctions = 0usize;
        emit_edge(&mut s, "init", &self.initial, "", &mut junctions);
        for q in 0..self.num_states() {
            for (a, p) in self.delta[q].iter().enumerate() {
                emit_edge(&mut s, &format!("s{q}"), p, &self.alphabet[a], &mut junctions);
            }
            emit_edge(&mut s, &format!("s{q}"), &self.eps[q], "ε", &mut junctions);
        }
        s.push_str("}\n");
        s
    }
}

fn emit_edge(out: &mut String, from: &str, p: &PosBool, label: &str, junctions: &mut usize) {
    match p {
        PosBool::False => {}
        PosBool::State(t) => {
            let _ = writeln!(out, "  {from} -> s{t} [label=\"{label}\"];");
        }
        PosBool::Or(ps) if ps.iter().all(|x| matches!(x, PosBool::State(_))) => {
            for x in ps {
                emit_edge(out, from, x, label, junctions);
            }
        }
        _ => {
            let j = format!("j{}", *junctions);
            *junctions += 1;
            let (shape, text) = match p {
                PosBool::True => ("box", "⊤"),
                PosBool::And(_) => ("diamond", "∀"),
                _ => ("diamond", "∃"),
            };
            let _ = writeln!(out, "  {j} [shape={shape}, label=\"{text}\", width=0.2, height=0.2];");
            let _ = writeln!(out, "  {from} -> {j} [label=\"{label}\"];");
            if let PosBool::And(ps) | PosBool::Or(ps) = p {
                for x in ps {
                    emit_edge(out, &j, x, "", junctions);
                }
            }
        }
    }
}

/// Minimal models of `p` with each leaf `t` replaced by the models `subst[t]`.
fn models_through(p: &PosBool, subst: &[Vec<Model>]) -> Vec<Model> {
    match p {
        PosBool::True => vec![Vec::new()],
        PosBool::False => Vec::new(),
        PosBool::State(t) => subst[*t].clone(),
        PosBool::Or(ps) => minimize(ps.iter().flat_map(|x| models_through(x, subst)).collect()),
        PosBool::And(ps) => {
            let mut acc = vec![Vec::new()];
            for x in ps {
                acc = conjoin_models(&acc, &models_through(x, subst));
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
    }
}

/// Successor computation over macrostates with per-(state, letter) caching.
struct Explorer<'a> {
    afa: &'a Afa,
    cache: HashMap<(usize, usize), Vec<Model>>,
}

impl<'a> Explorer<'a> {
    fn new(afa: &'a Afa) -> Result<Self, AutomataError> {
        if afa.has_epsilon() {
            return Err(AutomataError::EpsilonPresent);
        }
        Ok(Explorer {
            afa,
            cache: HashMap::new(),
        })
    }

    fn is_accepting(&self, m: &[usize]) -> bool {
        m.iter().all(|&s| self.afa.accepting[s])
    }

    fn step(&mut self, m: &[usize], a: usize) -> Vec<Model> {
        let mut acc: Vec<Model> = vec![Vec::new()];
        for &s in m {
            let afa = self.afa;
            let models = self
                .cache
                .entry((s, a))
                .or_insert_with(|| afa.delta[s][a].minimal_models());
            acc = conjoin_models(&acc, models);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }
}
