use proptest::prelude::*;
use weaver_core::formula::{parse_formula, parse_int_expr, wp, Formula, Instr, Valuation};

const VARS: [&str; 3] = ["x", "y", "z"];

#[derive(Debug, Clone)]
enum Term {
    Var(usize),
    Const(i64),
    Sum(Box<Term>, Box<Term>),
    Diff(Box<Term>, Box<Term>),
    Scaled(i64, Box<Term>),
}

#[derive(Debug, Clone)]
enum Prop {
    Cmp(Term, &'static str, Term),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
}

impl Term {
    fn text(&self) -> String {
        match self {
            Term::Var(i) => VARS[*i].to_string(),
            Term::Const(c) => format!("({c})"),
            Term::Sum(a, b) => format!("({} + {})", a.text(), b.text()),
            Term::Diff(a, b) => format!("({} - {})", a.text(), b.text()),
            Term::Scaled(k, a) => format!("({k} * {})", a.text()),
        }
    }

    fn value(&self, v: &[i64; 3]) -> i64 {
        match self {
            Term::Var(i) => v[*i],
            Term::Const(c) => *c,
            Term::Sum(a, b) => a.value(v) + b.value(v),
            Term::Diff(a, b) => a.value(v) - b.value(v),
            Term::Scaled(k, a) => k * a.value(v),
        }
    }
}

impl Prop {
    fn text(&self) -> String {
        match self {
            Prop::Cmp(a, op, b) => format!("{} {op} {}", a.text(), b.text()),
            Prop::Not(p) => format!("!({})", p.text()),
            Prop::And(p, q) => format!("({}) && ({})", p.text(), q.text()),
            Prop::Or(p, q) => format!("({}) || ({})", p.text(), q.text()),
        }
    }

    fn holds(&self, v: &[i64; 3]) -> bool {
        match self {
            Prop::Cmp(a, op, b) => {
                let (x, y) = (a.value(v), b.value(v));
                match *op {
                    "=" => x == y,
                    "!=" => x != y,
                    "<" => x < y,
                    "<=" => x <= y,
                    ">" => x > y,
                    _ => x >= y,
                }
            }
            Prop::Not(p) => !p.holds(v),
            Prop::And(p, q) => p.holds(v) && q.holds(v),
            Prop::Or(p, q) => p.holds(v) || q.holds(v),
        }
    }
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![(0..3usize).prop_map(Term::Var), (-3..=3i64).prop_map(Term::Const)];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Sum(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Diff(Box::new(a), Box::new(b))),
            (-2..=3i64, inner).prop_map(|(k, a)| Term::Scaled(k, Box::new(a))),
        ]
    })
}

fn prop() -> impl Strategy<Value = Prop> {
    let op = prop_oneof![Just("="), Just("!="), Just("<"), Just("<="), Just(">"), Just(">=")];
    let leaf = (term(), op, term()).prop_map(|(a, o, b)| Prop::Cmp(a, o, b));
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|p| Prop::Not(Box::new(p))),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Prop::And(Box::new(p), Box::new(q))),
            (inner.clone(), inner).prop_map(|(p, q)| Prop::Or(Box::new(p), Box::new(q))),
        ]
    })
}

fn grid() -> impl Iterator<Item = [i64; 3]> {
    (-2..=2).flat_map(|a| (-2..=2).flat_map(move |b| (-2..=2).map(move |c| [a, b, c])))
}

fn val(v: &[i64; 3]) -> Valuation {
    weaver_core::formula::valuation(VARS.iter().copied().zip(v.iter().copied()))
}

fn eval(f: &Formula, v: &[i64; 3]) -> bool {
    f.eval(&val(v)).expect("all variables bound")
}

proptest! {
    #[test]
    fn normal_form_keeps_meaning(p in prop()) {
        let f = parse_formula(&p.text()).unwrap();
        for v in grid() {
            prop_assert_eq!(eval(&f, &v), p.holds(&v), "{} at {:?}", f, v);
        }
    }

    #[test]
    fn display_reparses_to_the_same_formula(p in prop()) {
        let f = parse_formula(&p.text()).unwrap();
        let g = parse_formula(&f.to_string()).unwrap();
        for v in grid() {
            prop_assert_eq!(eval(&f, &v), eval(&g, &v));
        }
    }

    #[test]
    fn connectives_are_pointwise(p in prop(), q in prop()) {
        let f = parse_formula(&p.text()).unwrap();
        let g = parse_formula(&q.text()).unwrap();
        let (and, or, not) = (f.and(&g), f.or(&g), f.negate());
        for v in grid() {
            prop_assert_eq!(eval(&and, &v), p.holds(&v) && q.holds(&v));
            prop_assert_eq!(eval(&or, &v), p.holds(&v) || q.holds(&v));
            prop_assert_eq!(eval(&not, &v), !p.holds(&v));
        }
    }

    #[test]
    fn assignment_precondition_is_substitution(p in prop(), target in 0..3usize, e in term()) {
        let f = parse_formula(&p.text()).unwrap();
        let op = Instr::Assign { var: VARS[target].into(), expr: parse_int_expr(&e.text()).unwrap() };
        let pre = wp(&op, &f);
        for v in grid() {
            let mut after = v;
            after[target] = e.value(&v);
            prop_assert_eq!(eval(&pre, &v), p.holds(&after));
        }
    }

    #[test]
    fn guard_preconditions(p in prop(), g in prop()) {
        let f = parse_formula(&p.text()).unwrap();
        let guard = parse_formula(&g.text()).unwrap();
        let assert = wp(&Instr::Assert(guard.clone()), &f);
        let assume = wp(&Instr::Assume(guard), &f);
        for v in grid() {
            prop_assert_eq!(eval(&assert, &v), g.holds(&v) && p.holds(&v));
            prop_assert_eq!(eval(&assume, &v), !g.holds(&v) || p.holds(&v));
        }
    }
}
