//! Quantifier-free integer formulas in CNF and the weakest-precondition calculus.

mod cnf;
mod expr;
mod poly;
mod wp;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use cnf::{Atom, Clause, Folded, Formula, Literal, Rel};
pub use expr::{BoolExpr, CmpOp, IntExpr};
pub use poly::{Monomial, Poly};
pub use wp::{assume_to_assert, is_stable, substitute, wp, wp_trace, Instr};

use crate::syntax::{ParseError, Parser};

/// Program variable name.
pub type Var = Arc<str>;

/// Assignment of integer values to variables.
pub type Valuation = BTreeMap<Var, i64>;

/// Parses a formula written in program syntax, e.g. `flag1 = 0 || turn = 2`.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.bool_expr()?;
    if !p.at_end() {
        return p.unexpected("end of formula");
    }
    Ok(Formula::from_bool_expr(&e))
}

pub fn parse_int_expr(src: &str) -> Result<IntExpr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.int_expr()?;
    if !p.at_end() {
        return p.unexpected("end of expression");
    }
    Ok(e)
}

/// Builds a valuation from `(name, value)` pairs.
pub fn valuation<'a>(pairs: impl IntoIterator<Item = (&'a str, i64)>) -> Valuation {
    pairs.into_iter().map(|(k, v)| (Var::from(k), v)).collect()
}
