//! Seeded random programs, traces and assertions for differential testing.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::automata::{Afa, PosBool};
use crate::formula::{parse_formula, Formula};
use crate::program::{parse_program, Program, Trace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bounds for [`random_program_source`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub processes: usize,
    pub max_states: usize,
    pub max_shared: usize,
    /// Largest value of every variable; domains are `{0..max_value}`.
    pub max_value: i64,
    pub max_edges: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            processes: 2,
            max_states: 4,
            max_shared: 2,
            max_value: 1,
            max_edges: 5,
        }
    }
}

const VAR_NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn atom(rng: &mut impl Rng, vars: &[&str], max: i64) -> String {
    let v = vars.choose(rng).unwrap();
    match rng.gen_range(0..4) {
        0 => format!("{v} = {}", rng.gen_range(0..=max)),
        1 => format!("{v} != {}", rng.gen_range(0..=max)),
        2 => {
            let u = vars.choose(rng).unwrap();
            format!("{v} = {u}")
        }
        _ => {
            let u = vars.choose(rng).unwrap();
            format!("{v} <= {u}")
        }
    }
}

/// A random boolean formula of at most `depth` nested connectives.
pub fn random_formula_text(rng: &mut impl Rng, vars: &[&str], max: i64, depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.4) {
        return atom(rng, vars, max);
    }
    let op = if rng.gen_bool(0.5) { "&&" } else { "||" };
    let l = random_formula_text(rng, vars, max, depth - 1);
    let r = random_formula_text(rng, vars, max, depth - 1);
    format!("({l}) {op} ({r})")
}

fn instr(rng: &mut impl Rng, vars: &[&str], max: i64) -> String {
    let v = vars.choose(rng).unwrap();
    let u = vars.choose(rng).unwrap();
    match rng.gen_range(0..8) {
        0 | 1 => format!("{v} := {}", rng.gen_range(0..=max)),
        2 => format!("{v} := {u}"),
        3 => format!("{v} := {max} - {u}"),
        4 | 5 => format!("assume({})", atom(rng, vars, max)),
        6 => format!("lock({v})"),
        _ => "skip".to_string(),
    }
}

/// Source text of a random program within `shape`. Variables range over
/// `{0..max_value}`, so every generated assignment stays in its domain.
pub fn random_program_source(rng: &mut impl Rng, shape: &Shape) -> String {
    let n_vars = rng.gen_range(1..=shape.max_shared.clamp(1, VAR_NAMES.len()));
    let vars = &VAR_NAMES[..n_vars];
    let max = shape.max_value.max(1);
    let mut src = String::new();
    for v in vars {
        src.push_str(&format!("shared {v} : {{0..{max}}} = {};\n", rng.gen_range(0..=max)));
    }
    let mut label = 0usize;
    for p in 0..shape.processes {
        let n_states = rng.gen_range(1..=shape.max_states.max(1));
        src.push_str(&format!("process P{p} {{\n  init q0;\n"));
        let n_edges = rng.gen_range(0..=shape.max_edges);
        for _ in 0..n_edges {
            let from = rng.gen_range(0..n_states);
            let to = rng.gen_range(0..n_states);
            src.push_str(&format!(
                "  q{from} -> q{to} : o{label} : {};\n",
                instr(rng, vars, max)
            ));
            label += 1;
        }
        if rng.gen_bool(0.8) {
            let at = rng.gen_range(0..n_states);
            src.push_str(&format!(
                "  assert q{at} : {};\n",
                random_formula_text(rng, vars, max, 1)
            ));
        }
        src.push_str("}\n");
    }
    src
}

pub fn random_program(rng: &mut impl Rng, shape: &Shape) -> Program {
    let src = random_program_source(rng, shape);
    parse_program(&src).unwrap_or_else(|e| panic!("generated program failed to parse: {e}\n{src}"))
}

/// A program, an arbitrary word over its operations and a postcondition,
/// for exercising proof construction on traces that need not be feasible.
#[derive(Debug, Clone)]
pub struct Triple {
    pub program: Program,
    pub trace: Trace,
    pub post: Formula,
}

pub fn random_triple(rng: &mut impl Rng) -> Triple {
    random_triple_with_len(rng, 0..=7)
}

pub fn random_triple_with_len(rng: &mut impl Rng, len: RangeInclusive<usize>) -> Triple {
    let shape = Shape {
        processes: 2,
        max_states: 3,
        max_shared: 3,
        max_value: 2,
        max_edges: 4,
    };
    let program = loop {
        let p = random_program(rng, &shape);
        if !p.ops.is_empty() {
            break p;
        }
    };
    let len = rng.gen_range(len);
    let trace: Trace = (0..len).map(|_| rng.gen_range(0..program.ops.len())).collect();
    let names: Vec<String> = program.vars.iter().map(|v| v.name.to_string()).collect();
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let post = parse_formula(&random_formula_text(rng, &vars, 2, 2)).expect("generated formula parses");
    Triple { program, trace, post }
}

fn random_posbool(rng: &mut impl Rng, states: usize, depth: usize) -> PosBool {
    let roll = rng.gen_range(0..10);
    if depth == 0 || roll < 4 {
        return match roll {
            0 => PosBool::False,
            1 if rng.gen_bool(0.3) => PosBool::True,
            _ => PosBool::state(rng.gen_range(0..states)),
        };
    }
    let parts: Vec<PosBool> = (0..rng.gen_range(2..=3))
        .map(|_| random_posbool(rng, states, depth - 1))
        .collect();
    if roll < 7 {
        PosBool::and(parts)
    } else {
        PosBool::or(parts)
    }
}

/// A random alternating automaton with `states` states over `letters`
/// letters; each state gets an ε-move with probability `eps`.
pub fn random_afa(rng: &mut impl Rng, states: usize, letters: usize, eps: f64) -> Afa {
    let alphabet: Vec<String> = (0..letters).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let mut a = Afa::with_states(alphabet, states);
    for s in 0..states {
        for l in 0..letters {
            a.delta[s][l] = random_posbool(rng, states, 2);
        }
        if rng.gen_bool(eps) {
            a.eps[s] = random_posbool(rng, states, 1);
        }
        a.accepting[s] = rng.gen_bool(0.4);
    }
    a.initial = random_posbool(rng, states, 1);
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_programs_respect_the_shape() {
        let mut r = rng(7);
        let shape = Shape::default();
        for _ in 0..200 {
            let p = random_program(&mut r, &shape);
            assert_eq!(p.processes.len(), 2);
            assert!(p.vars.len() <= 2);
            for pr in &p.processes {
                assert!(pr.states.len() <= 4);
                assert!(pr.assertions.len() <= 1);
            }
        }
    }

    #[test]
    fn same_seed_same_program() {
        let a = random_program_source(&mut rng(3), &Shape::default());
        let b = random_program_source(&mut rng(3), &Shape::default());
        assert_eq!(a, b);
    }
}
