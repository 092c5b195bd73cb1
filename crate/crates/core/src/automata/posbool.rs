use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

/// Positive boolean combination of automaton states.
///
/// Built through [`PosBool::and`] / [`PosBool::or`], which flatten nesting,
/// absorb constants, and sort and dedup operands.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PosBool {
    True,
    False,
    State(usize),
    And(Vec<PosBool>),
    Or(Vec<PosBool>),
}

/// A set of states, kept sorted.
pub type Model = Vec<usize>;

impl PosBool {
    pub fn state(s: usize) -> Self {
        PosBool::State(s)
    }

    pub fn and<I: IntoIterator<Item = PosBool>>(parts: I) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                PosBool::True => {}
                PosBool::False => return PosBool::False,
                PosBool::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => PosBool::True,
            1 => out.pop().unwrap(),
            _ => PosBool::And(out),
        }
    }

    pub fn or<I: IntoIterator<Item = PosBool>>(parts: I) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                PosBool::False => {}
                PosBool::True => return PosBool::True,
                PosBool::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        out.sort();
        out.dedup();
        match out.len() {
            0 => PosBool::False,
            1 => out.pop().unwrap(),
            _ => PosBool::Or(out),
        }
    }

    pub fn any_of<I: IntoIterator<Item = usize>>(states: I) -> Self {
        Self::or(states.into_iter().map(PosBool::State))
    }

    pub fn all_of<I: IntoIterator<Item = usize>>(states: I) -> Self {
        Self::and(states.into_iter().map(PosBool::State))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, PosBool::False)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, PosBool::True)
    }

    /// Swaps conjunction with disjunction and the two constants.
    pub fn dual(&self) -> PosBool {
        match self {
            PosBool::True => PosBool::False,
            PosBool::False => PosBool::True,
            PosBool::State(s) => PosBool::State(*s),
            PosBool::And(ps) => PosBool::or(ps.iter().map(|p| p.dual())),
            PosBool::Or(ps) => PosBool::and(ps.iter().map(|p| p.dual())),
        }
    }

    pub fn eval(&self, holds: &dyn Fn(usize) -> bool) -> bool {
        match self {
            PosBool::True => true,
            PosBool::False => false,
            PosBool::State(s) => holds(*s),
            PosBool::And(ps) => ps.iter().all(|p| p.eval(holds)),
            PosBool::Or(ps) => ps.iter().any(|p| p.eval(holds)),
        }
    }

    /// Replaces every state leaf by a formula.
    pub fn substitute(&self, f: &dyn Fn(usize) -> PosBool) -> PosBool {
        match self {
            PosBool::True | PosBool::False => self.clone(),
            PosBool::State(s) => f(*s),
            PosBool::And(ps) => PosBool::and(ps.iter().map(|p| p.substitute(f))),
            PosBool::Or(ps) => PosBool::or(ps.iter().map(|p| p.substitute(f))),
        }
    }

    pub fn map_states(&self, f: &dyn Fn(usize) -> usize) -> PosBool {
        self.substitute(&|s| PosBool::State(f(s)))
    }

    pub fn shift(&self, k: usize) -> PosBool {
        self.map_states(&|s| s + k)
    }

    pub fn leaves(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut BTreeSet<usize>) {
        match self {
            PosBool::State(s) => {
                out.insert(*s);
            }
            PosBool::And(ps) | PosBool::Or(ps) => ps.iter().for_each(|p| p.collect_leaves(out)),
            _ => {}
        }
    }

    /// Minimal sets of states whose truth satisfies the formula (its DNF as
    /// an antichain). `TRUE` has the single empty model, `FALSE` none.
    pub fn minimal_models(&self) -> Vec<Model> {
        match self {
            PosBool::True => vec![Vec::new()],
            PosBool::False => Vec::new(),
            PosBool::State(s) => vec![vec![*s]],
            PosBool::Or(ps) => minimize(ps.iter().flat_map(|p| p.minimal_models()).collect()),
            PosBool::And(ps) => {
                let mut acc = vec![Vec::new()];
                for p in ps {
                    acc = conjoin_models(&acc, &p.minimal_models());
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        }
    }

    /// Formula equivalent to a disjunction of model conjunctions.
    pub fn from_models(models: &[Model]) -> PosBool {
        PosBool::or(models.iter().map(|m| PosBool::all_of(m.iter().copied())))
    }

    pub fn size(&self) -> usize {
        match self {
            PosBool::And(ps) | PosBool::Or(ps) => 1 + ps.iter().map(|p| p.size()).sum::<usize>(),
            _ => 1,
        }
    }
}

/// Pairwise unions of two model sets, minimized.
pub fn conjoin_models(a: &[Model], b: &[Model]) -> Vec<Model> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(union_sorted(x, y));
        }
    }
    minimize(out)
}

fn union_sorted(a: &[usize], b: &[usize]) -> Model {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub(crate) fn is_subset(a: &[usize], b: &[usize]) -> bool {
    let mut j = 0;
    for x in a {
        while j < b.len() && b[j] < *x {
            j += 1;
        }
        if j == b.len() || b[j] != *x {
            return false;
        }
        j += 1;
    }
    true
}

/// Drops every model that strictly contains another; sorts the result.
pub fn minimize(mut models: Vec<Model>) -> Vec<Model> {
    models.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    models.dedup();
    let mut out: Vec<Model> = Vec::with_capacity(models.len());
    for m in models {
        if !out.iter().any(|k| is_subset(k, &m)) {
            out.push(m);
        }
    }
    out.sort();
    out
}

impl fmt::Display for PosBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, ps: &[PosBool], sep: &str| {
            write!(f, "(")?;
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    write!(f, " {sep} ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")
        };
        match self {
            PosBool::True => write!(f, "true"),
            PosBool::False => write!(f, "false"),
            PosBool::State(s) => write!(f, "s{s}"),
            PosBool::And(ps) => join(f, ps, "&"),
            PosBool::Or(ps) => join(f, ps, "|"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(i: usize) -> PosBool {
        PosBool::State(i)
    }

    #[test]
    fn constructors_flatten_and_absorb() {
        assert_eq!(PosBool::and([s(1), PosBool::True]), s(1));
        assert_eq!(PosBool::and([s(1), PosBool::False]), PosBool::False);
        assert_eq!(PosBool::or(Vec::new()), PosBool::False);
        assert_eq!(
            PosBool::and([s(2), PosBool::and([s(1), s(2)])]),
            PosBool::And(vec![s(1), s(2)])
        );
    }

    #[test]
    fn minimal_models_are_an_antichain() {
        let f = PosBool::or([PosBool::and([s(1), s(2)]), s(1), PosBool::and([s(3), s(4)])]);
        assert_eq!(f.minimal_models(), vec![vec![1], vec![3, 4]]);
        let g = PosBool::and([PosBool::or([s(1), s(2)]), PosBool::or([s(1), s(3)])]);
        assert_eq!(g.minimal_models(), vec![vec![1], vec![2, 3]]);
        assert_eq!(PosBool::True.minimal_models(), vec![Vec::<usize>::new()]);
        assert!(PosBool::False.minimal_models().is_empty());
    }

    #[test]
    fn dual_swaps_connectives() {
        let f = PosBool::and([s(0), PosBool::or([s(1), PosBool::False])]);
        assert_eq!(f.dual(), PosBool::or([s(0), s(1)]));
        let all = |_: usize| true;
        let none = |_: usize| false;
        assert!(f.eval(&all));
        assert!(!f.eval(&none));
    }
}
