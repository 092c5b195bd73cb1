#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::HashMap;
use std::path::PathBuf;

use weaver_core::automata::{Afa, PosBool};
use weaver_core::program::{parse_program, Program};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_program(name: &str) -> Program {
    let path = corpus_dir().join(format!("{name}.cprog"));
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_program(&src).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Every corpus file name without extension, sorted.
pub fn corpus_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "cprog").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}

/// Corpus entries that are expected to contain a bug.
pub fn is_broken(name: &str) -> bool {
    name.contains("broken") || name.contains("wrong")
}

/// All words over `letters` letters of length at most `max_len`, shortest first,
/// then in label order.
pub fn all_words(letters: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &level {
            for a in 0..letters {
                let mut v: Vec<usize> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

fn holds(p: &PosBool, leaf: &mut dyn FnMut(usize) -> bool) -> bool {
    match p {
        PosBool::True => true,
        PosBool::False => false,
        PosBool::State(s) => leaf(*s),
        PosBool::And(ps) => ps.iter().all(|q| holds(q, leaf)),
        PosBool::Or(ps) => ps.iter().any(|q| holds(q, leaf)),
    }
}

/// Reference acceptance by direct recursion on the run tree, allowing at most
/// `|states|` consecutive ε-steps at each position (enough to reach the least
/// fixpoint).
pub fn reference_accepts(a: &Afa, word: &[usize]) -> bool {
    let n = a.num_states();
    let memo: RefCell<HashMap<(usize, usize, usize), bool>> = RefCell::new(HashMap::new());
    fn go(
        a: &Afa,
        w: &[usize],
        s: usize,
        i: usize,
        k: usize,
        memo: &RefCell<HashMap<(usize, usize, usize), bool>>,
    ) -> bool {
        if let Some(&r) = memo.borrow().get(&(s, i, k)) {
            return r;
        }
        let n = a.num_states();
        let r = (i == w.len() && a.accepting[s])
            || (i < w.len() && holds(&a.delta[s][w[i]], &mut |t| go(a, w, t, i + 1, n, memo)))
            || (k > 0 && holds(&a.eps[s], &mut |t| go(a, w, t, i, k - 1, memo)));
        memo.borrow_mut().insert((s, i, k), r);
        r
    }
    holds(&a.initial, &mut |s| go(a, word, s, 0, n, &memo))
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}
