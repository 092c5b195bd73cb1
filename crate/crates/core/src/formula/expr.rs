use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{Poly, Valuation, Var};

/// Integer-valued program expression as written in the source.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum IntExpr {
    Const(i64),
    Var(Var),
    Add(Box<IntExpr>, Box<IntExpr>),
    Sub(Box<IntExpr>, Box<IntExpr>),
    Mul(Box<IntExpr>, Box<IntExpr>),
    Neg(Box<IntExpr>),
}

impl IntExpr {
    pub fn var(name: &str) -> Self {
        IntExpr::Var(Var::from(name))
    }

    pub fn to_poly(&self) -> Poly {
        match self {
            IntExpr::Const(c) => Poly::constant(*c),
            IntExpr::Var(v) => Poly::var(v.clone()),
            IntExpr::Add(a, b) => a.to_poly().add(&b.to_poly()),
            IntExpr::Sub(a, b) => a.to_poly().sub(&b.to_poly()),
            IntExpr::Mul(a, b) => a.to_poly().mul(&b.to_poly()),
            IntExpr::Neg(a) => a.to_poly().neg(),
        }
    }

    /// `None` if a variable is missing from the valuation.
    pub fn eval(&self, val: &Valuation) -> Option<i64> {
        Some(match self {
            IntExpr::Const(c) => *c,
            IntExpr::Var(v) => *val.get(v)?,
            IntExpr::Add(a, b) => a.eval(val)? + b.eval(val)?,
            IntExpr::Sub(a, b) => a.eval(val)? - b.eval(val)?,
            IntExpr::Mul(a, b) => a.eval(val)? * b.eval(val)?,
            IntExpr::Neg(a) => -a.eval(val)?,
        })
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            IntExpr::Const(_) => {}
            IntExpr::Var(v) => {
                out.insert(v.clone());
            }
            IntExpr::Add(a, b) | IntExpr::Sub(a, b) | IntExpr::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            IntExpr::Neg(a) => a.collect_vars(out),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            IntExpr::Add(..) | IntExpr::Sub(..) => 1,
            IntExpr::Mul(..) => 2,
            IntExpr::Neg(_) => 3,
            IntExpr::Const(c) if *c < 0 => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &IntExpr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            IntExpr::Const(c) => write!(f, "{c}"),
            IntExpr::Var(v) => write!(f, "{v}"),
            IntExpr::Add(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " + ")?;
                wrap(f, b, 2)
            }
            IntExpr::Sub(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " - ")?;
                wrap(f, b, 2)
            }
            IntExpr::Mul(a, b) => {
                wrap(f, a, 2)?;
                write!(f, " * ")?;
                wrap(f, b, 3)
            }
            IntExpr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 4)
            }
        }
    }
}

/// Comparison operators accepted in source formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds(self, l: i64, r: i64) -> bool {
        match self {
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Gt => l > r,
            CmpOp::Ge => l >= r,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// Boolean expression as parsed, before CNF conversion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolExpr {
    Const(bool),
    Cmp(IntExpr, CmpOp, IntExpr),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

impl BoolExpr {
    pub fn eval(&self, val: &Valuation) -> Option<bool> {
        Some(match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Cmp(l, op, r) => op.holds(l.eval(val)?, r.eval(val)?),
            BoolExpr::Not(e) => !e.eval(val)?,
            BoolExpr::And(es) => {
                for e in es {
                    if !e.eval(val)? {
                        return Some(false);
                    }
                }
                true
            }
            BoolExpr::Or(es) => {
                for e in es {
                    if e.eval(val)? {
                        return Some(true);
                    }
                }
                false
            }
        })
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Cmp(l, _, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            BoolExpr::Not(e) => e.collect_vars(out),
            BoolExpr::And(es) | BoolExpr::Or(es) => es.iter().for_each(|e| e.collect_vars(out)),
        }
    }
}
