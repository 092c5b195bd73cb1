use std::fmt;

use serde::Serialize;

use super::{Formula, IntExpr, Poly, Valuation, Var};
use crate::oracle::{Oracle, OracleError};

/// A program instruction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Instr {
    Skip,
    Assign { var: Var, expr: IntExpr },
    Assume(Formula),
    Assert(Formula),
    /// Test-and-set: blocks unless the variable is 0, then sets it to 1.
    Lock(Var),
    Seq(Vec<Instr>),
}

impl Instr {
    pub fn assign(var: &str, expr: IntExpr) -> Self {
        Instr::Assign {
            var: Var::from(var),
            expr,
        }
    }

    /// Runs the instruction in place. Returns `false` if it blocks; a failing
    /// `assert` also counts as blocking here.
    ///
    /// Panics if a variable read has no value.
    pub fn execute(&self, val: &mut Valuation) -> bool {
        match self {
            Instr::Skip => true,
            Instr::Assign { var, expr } => {
                let v = expr.eval(val).expect("valuation covers expression");
                val.insert(var.clone(), v);
                true
            }
            Instr::Assume(f) | Instr::Assert(f) => f.eval(val).expect("valuation covers guard"),
            Instr::Lock(x) => {
                let cur = *val.get(x).expect("valuation covers lock variable");
                if cur != 0 {
                    return false;
                }
                val.insert(x.clone(), 1);
                true
            }
            Instr::Seq(is) => is.iter().all(|i| i.execute(val)),
        }
    }

    /// Variables written by the instruction.
    pub fn writes(&self) -> Vec<&Var> {
        match self {
            Instr::Assign { var, .. } | Instr::Lock(var) => vec![var],
            Instr::Seq(is) => is.iter().flat_map(|i| i.writes()).collect(),
            _ => Vec::new(),
        }
    }

    pub fn reads(&self) -> Vec<Var> {
        match self {
            Instr::Skip => Vec::new(),
            Instr::Assign { expr, .. } => expr.vars().into_iter().collect(),
            Instr::Assume(f) | Instr::Assert(f) => f.vars().into_iter().collect(),
            Instr::Lock(x) => vec![x.clone()],
            Instr::Seq(is) => is.iter().flat_map(|i| i.reads()).collect(),
        }
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Skip => write!(f, "skip"),
            Instr::Assign { var, expr } => write!(f, "{var} := {expr}"),
            Instr::Assume(g) => write!(f, "assume({g})"),
            Instr::Assert(g) => write!(f, "assert({g})"),
            Instr::Lock(x) => write!(f, "lock({x})"),
            Instr::Seq(is) => {
                for (k, i) in is.iter().enumerate() {
                    if k > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{i}")?;
                }
                Ok(())
            }
        }
    }
}

pub fn substitute(f: &Formula, x: &Var, e: &IntExpr) -> Formula {
    f.substitute(x, &e.to_poly())
}

/// Weakest precondition of `post` through `op`.
pub fn wp(op: &Instr, post: &Formula) -> Formula {
    match op {
        Instr::Skip => post.clone(),
        Instr::Assign { var, expr } => post.substitute(var, &expr.to_poly()),
        Instr::Assert(g) => post.and(g),
        Instr::Assume(g) => g.negate().or(post),
        Instr::Lock(x) => {
            let after = post.substitute(x, &Poly::constant(1));
            let free = Formula::compare(&IntExpr::Var(x.clone()), super::CmpOp::Eq, &IntExpr::Const(0));
            free.negate().or(&after)
        }
        Instr::Seq(is) => is.iter().rev().fold(post.clone(), |acc, i| wp(i, &acc)),
    }
}

/// Replaces blocking guards by assertions; `lock(x)` becomes `assert(x = 0); x := 1`.
pub fn assume_to_assert(op: &Instr) -> Instr {
    match op {
        Instr::Assume(g) => Instr::Assert(g.clone()),
        Instr::Lock(x) => Instr::Seq(vec![
            Instr::Assert(Formula::compare(
                &IntExpr::Var(x.clone()),
                super::CmpOp::Eq,
                &IntExpr::Const(0),
            )),
            Instr::Assign {
                var: x.clone(),
                expr: IntExpr::Const(1),
            },
        ]),
        Instr::Seq(is) => Instr::Seq(is.iter().map(assume_to_assert).collect()),
        other => other.clone(),
    }
}

/// `wp` through a whole trace with guards read as assertions.
pub fn wp_trace<'a, I>(trace: I, post: &Formula) -> Formula
where
    I: IntoIterator<Item = &'a Instr>,
    I::IntoIter: DoubleEndedIterator,
{
    trace
        .into_iter()
        .rev()
        .fold(post.clone(), |acc, op| wp(&assume_to_assert(op), &acc))
}

/// Whether `f` is unchanged (up to equivalence) by `op` with guards read as assertions.
pub fn is_stable(op: &Instr, f: &Formula, oracle: &Oracle) -> Result<bool, OracleError> {
    let pre = wp(&assume_to_assert(op), f);
    if &pre == f {
        return Ok(true);
    }
    oracle.equivalent(&pre, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, parse_int_expr};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn assign(x: &str, e: &str) -> Instr {
        Instr::assign(x, parse_int_expr(e).unwrap())
    }

    #[test]
    fn assignment_folds_constants() {
        assert_eq!(wp(&assign("res", "1"), &f("res != 2")), Formula::tt());
        assert_eq!(wp(&assign("S", "t + 1"), &f("S < t")), Formula::ff());
        assert_eq!(wp(&assign("l2", "res"), &f("l2 != 2")), f("res != 2"));
    }

    #[test]
    fn assert_conjoins_and_assume_implies() {
        let g = f("flag1 = 0 || turn = 2");
        assert_eq!(wp(&Instr::Assert(g.clone()), &Formula::tt()), g);
        assert_eq!(wp(&Instr::Assume(g.clone()), &Formula::tt()), Formula::tt());
        assert_eq!(
            wp(&Instr::Assume(f("x = 0")), &f("y = 1")),
            f("x != 0 || y = 1")
        );
    }

    #[test]
    fn lock_reads_as_guarded_set() {
        let m = Var::from("m");
        assert_eq!(wp(&Instr::Lock(m.clone()), &f("m = 1")), Formula::tt());
        let strict = wp(&assume_to_assert(&Instr::Lock(m)), &f("m = 1"));
        assert_eq!(strict, f("m = 0"));
    }

    #[test]
    fn trace_folds_right_to_left() {
        let t = vec![assign("x", "1"), assign("y", "x + 1")];
        assert_eq!(wp_trace(&t, &f("y = 2")), Formula::tt());
        assert_eq!(wp_trace(&t[..0], &f("y = 2")), f("y = 2"));
    }

    #[test]
    fn execution_blocks_on_failed_guard() {
        let mut v = Valuation::new();
        v.insert(Var::from("m"), 0);
        let lock = Instr::Lock(Var::from("m"));
        assert!(lock.execute(&mut v));
        assert!(!lock.execute(&mut v));
    }
}
