//! Canonical CNF formulas over integer literals.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use super::poly::write_terms;
use super::{BoolExpr, CmpOp, IntExpr, Poly, Valuation, Var};

/// Relation of a normalized atom against zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    /// `p = 0`
    Eq,
    /// `p <= 0`
    Le,
}

/// `poly rel 0` with normalized coefficients.
///
/// Equalities are divided by the coefficient gcd and sign-normalized so the
/// first variable term is positive. Inequalities are divided by the gcd of the
/// variable coefficients with the constant rounded up, which is exact over
/// the integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    poly: Poly,
    rel: Rel,
}

/// Result of normalizing a comparison: either it folds to a constant or it is a literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Folded {
    Const(bool),
    Lit(Literal),
}

// variable part first so literals over the same variables sit together
impl Ord for Atom {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.poly
            .var_terms()
            .cmp(other.poly.var_terms())
            .then_with(|| self.poly.constant_term().cmp(&other.poly.constant_term()))
            .then_with(|| self.rel.cmp(&other.rel))
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Atom {
    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn rel(&self) -> Rel {
        self.rel
    }

    fn normalize(poly: Poly, rel: Rel) -> Result<Atom, bool> {
        if let Some(c) = poly.as_constant() {
            return Err(match rel {
                Rel::Eq => c == 0,
                Rel::Le => c <= 0,
            });
        }
        let g = poly.var_gcd();
        let c = poly.constant_term();
        let poly = match rel {
            Rel::Eq => {
                if c % g != 0 {
                    return Err(false);
                }
                let p = poly.div_exact(g);
                let lead = p.var_terms().next().map(|(_, k)| k).unwrap_or(1);
                if lead < 0 {
                    p.neg()
                } else {
                    p
                }
            }
            Rel::Le => {
                let scaled = poly.with_constant(0).div_exact(g);
                scaled.with_constant(div_ceil(c, g))
            }
        };
        Ok(Atom { poly, rel })
    }

    fn eval(&self, val: &Valuation) -> Option<bool> {
        let v = self.poly.eval(val)?;
        Some(match self.rel {
            Rel::Eq => v == 0,
            Rel::Le => v <= 0,
        })
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    let q = a.div_euclid(b);
    if a.rem_euclid(b) == 0 {
        q
    } else {
        q + 1
    }
}

/// An atom or the negation of an equality atom.
///
/// Negated inequalities are folded into the atom (`!(p <= 0)` is `-p + 1 <= 0`),
/// so `negated` is only ever set on equalities. Double negation is never stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    atom: Atom,
    negated: bool,
}

impl Literal {
    pub fn atom(&self) -> &Atom {
        &self.atom
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    /// Normalizes `lhs op rhs`.
    pub fn compare(lhs: &Poly, op: CmpOp, rhs: &Poly) -> Folded {
        let diff = lhs.sub(rhs);
        match op {
            CmpOp::Eq => Self::from_poly(diff, Rel::Eq, false),
            CmpOp::Ne => Self::from_poly(diff, Rel::Eq, true),
            CmpOp::Le => Self::from_poly(diff, Rel::Le, false),
            CmpOp::Lt => Self::from_poly(diff.add(&Poly::constant(1)), Rel::Le, false),
            CmpOp::Ge => Self::from_poly(diff.neg(), Rel::Le, false),
            CmpOp::Gt => Self::from_poly(diff.neg().add(&Poly::constant(1)), Rel::Le, false),
        }
    }

    fn from_poly(poly: Poly, rel: Rel, negated: bool) -> Folded {
        match Atom::normalize(poly, rel) {
            Ok(atom) => Folded::Lit(Literal { atom, negated }),
            Err(b) => Folded::Const(b != negated),
        }
    }

    pub fn negate(&self) -> Literal {
        match self.atom.rel {
            Rel::Eq => Literal {
                atom: self.atom.clone(),
                negated: !self.negated,
            },
            Rel::Le => {
                let p = self.atom.poly.neg().add(&Poly::constant(1));
                match Self::from_poly(p, Rel::Le, false) {
                    Folded::Lit(l) => l,
                    Folded::Const(_) => unreachable!("negating a non-ground atom stays non-ground"),
                }
            }
        }
    }

    pub fn substitute(&self, x: &Var, e: &Poly) -> Folded {
        if !self.atom.poly.mentions(x) {
            return Folded::Lit(self.clone());
        }
        Self::from_poly(self.atom.poly.substitute(x, e), self.atom.rel, self.negated)
    }

    pub fn eval(&self, val: &Valuation) -> Option<bool> {
        Some(self.atom.eval(val)? != self.negated)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.atom.poly.vars()
    }

    pub fn to_smtlib(&self) -> String {
        let op = match self.atom.rel {
            Rel::Eq => "=",
            Rel::Le => "<=",
        };
        let a = format!("({op} {} 0)", self.atom.poly.to_smtlib());
        if self.negated {
            format!("(not {a})")
        } else {
            a
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `lhs rel rhs` with positive terms on the left and the rest on the right
        let poly = &self.atom.poly;
        let lhs: Vec<(&Vec<Var>, i64)> = poly.var_terms().filter(|(_, c)| *c > 0).collect();
        let mut rhs: Vec<(&Vec<Var>, i64)> = poly
            .var_terms()
            .filter(|(_, c)| *c < 0)
            .map(|(m, c)| (m, -c))
            .collect();
        let mut k = -poly.constant_term();
        let op = match (self.atom.rel, self.negated) {
            (Rel::Eq, false) => "=",
            (Rel::Eq, true) => "!=",
            (Rel::Le, _) if lhs.is_empty() => {
                // 0 <= rhs + k  reads better as  rhs >= -k
                write_terms(f, rhs)?;
                return write!(f, " >= {}", -k);
            }
            (Rel::Le, _) if k < 0 => {
                k += 1;
                "<"
            }
            (Rel::Le, _) => "<=",
        };
        let unit = Vec::new();
        if k != 0 || rhs.is_empty() {
            rhs.push((&unit, k));
        }
        write_terms(f, lhs)?;
        write!(f, " {op} ")?;
        write_terms(f, rhs)
    }
}

pub type Clause = Vec<Literal>;

/// Quantifier-free formula in canonical conjunctive normal form.
///
/// Clauses are sorted, duplicate-free, and free of tautologies; `TRUE` is the
/// empty clause list and `FALSE` is exactly one empty clause.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Formula {
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn tt() -> Self {
        Formula { clauses: Vec::new() }
    }

    pub fn ff() -> Self {
        Formula {
            clauses: vec![Vec::new()],
        }
    }

    pub fn constant(b: bool) -> Self {
        if b {
            Self::tt()
        } else {
            Self::ff()
        }
    }

    pub fn literal(l: Literal) -> Self {
        Formula {
            clauses: vec![vec![l]],
        }
    }

    pub fn from_folded(f: Folded) -> Self {
        match f {
            Folded::Const(b) => Self::constant(b),
            Folded::Lit(l) => Self::literal(l),
        }
    }

    /// `lhs op rhs` as a formula.
    pub fn compare(lhs: &IntExpr, op: CmpOp, rhs: &IntExpr) -> Self {
        Self::from_folded(Literal::compare(&lhs.to_poly(), op, &rhs.to_poly()))
    }

    /// Builds a canonical formula from clauses whose literals may fold to constants.
    pub fn from_folded_clauses<I, C>(clauses: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = Folded>,
    {
        let mut out: Vec<Clause> = Vec::new();
        'clauses: for c in clauses {
            let mut lits = Vec::new();
            for f in c {
                match f {
                    Folded::Const(true) => continue 'clauses,
                    Folded::Const(false) => {}
                    Folded::Lit(l) => lits.push(l),
                }
            }
            match canonical_clause(lits) {
                Some(c) if c.is_empty() => return Self::ff(),
                Some(c) => out.push(c),
                None => {}
            }
        }
        out.sort();
        out.dedup();
        Formula { clauses: out }
    }

    pub fn from_clauses<I, C>(clauses: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = Literal>,
    {
        Self::from_folded_clauses(
            clauses
                .into_iter()
                .map(|c| c.into_iter().map(Folded::Lit)),
        )
    }

    pub fn from_bool_expr(e: &BoolExpr) -> Self {
        match e {
            BoolExpr::Const(b) => Self::constant(*b),
            BoolExpr::Cmp(l, op, r) => Self::compare(l, *op, r),
            BoolExpr::Not(inner) => Self::from_bool_expr(inner).negate(),
            BoolExpr::And(es) => Self::conjoin(es.iter().map(Self::from_bool_expr)),
            BoolExpr::Or(es) => es
                .iter()
                .map(Self::from_bool_expr)
                .fold(Self::ff(), |acc, f| acc.or(&f)),
        }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn is_true(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_false(&self) -> bool {
        self.clauses.len() == 1 && self.clauses[0].is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.is_true() || self.is_false()
    }

    /// TRUE, FALSE or a single literal: the formulas annotating existential states.
    pub fn is_literal_shaped(&self) -> bool {
        self.is_constant() || (self.clauses.len() == 1 && self.clauses[0].len() == 1)
    }

    pub fn is_compound(&self) -> bool {
        !self.is_literal_shaped()
    }

    /// Number of literal occurrences.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(|c| c.len()).sum()
    }

    pub fn and(&self, other: &Formula) -> Formula {
        if self.is_false() || other.is_false() {
            return Self::ff();
        }
        let mut clauses = self.clauses.clone();
        clauses.extend(other.clauses.iter().cloned());
        clauses.sort();
        clauses.dedup();
        Formula { clauses }
    }

    pub fn conjoin<I: IntoIterator<Item = Formula>>(fs: I) -> Formula {
        let mut clauses = Vec::new();
        for f in fs {
            if f.is_false() {
                return Self::ff();
            }
            clauses.extend(f.clauses);
        }
        clauses.sort();
        clauses.dedup();
        Formula { clauses }
    }

    pub fn disjoin<I: IntoIterator<Item = Formula>>(fs: I) -> Formula {
        fs.into_iter().fold(Self::ff(), |acc, f| acc.or(&f))
    }

    /// Disjunction, distributed back into CNF.
    pub fn or(&self, other: &Formula) -> Formula {
        if self.is_true() || other.is_true() {
            return Self::tt();
        }
        if self.is_false() {
            return other.clone();
        }
        if other.is_false() {
            return self.clone();
        }
        let mut clauses = Vec::with_capacity(self.clauses.len() * other.clauses.len());
        for a in &self.clauses {
            for b in &other.clauses {
                let mut c = a.clone();
                c.extend(b.iter().cloned());
                clauses.push(c);
            }
        }
        Self::from_clauses(clauses)
    }

    pub fn negate(&self) -> Formula {
        // not (C1 & ... & Cn) = (not C1) | ... | (not Cn), each not Ci a conjunction of units
        self.clauses
            .iter()
            .map(|c| Formula::from_clauses(c.iter().map(|l| vec![l.negate()])))
            .fold(Self::ff(), |acc, f| acc.or(&f))
    }

    /// `self => other` as `!self | other`.
    pub fn implies(&self, other: &Formula) -> Formula {
        self.negate().or(other)
    }

    pub fn substitute(&self, x: &Var, e: &Poly) -> Formula {
        if !self.mentions(x) {
            return self.clone();
        }
        Self::from_folded_clauses(
            self.clauses
                .iter()
                .map(|c| c.iter().map(|l| l.substitute(x, e)).collect::<Vec<_>>()),
        )
    }

    pub fn mentions(&self, x: &Var) -> bool {
        self.clauses
            .iter()
            .any(|c| c.iter().any(|l| l.atom.poly.mentions(x)))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.clauses
            .iter()
            .flat_map(|c| c.iter().flat_map(|l| l.vars().cloned()))
            .collect()
    }

    pub fn is_linear(&self) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().all(|l| l.atom.poly.is_linear()))
    }

    /// `None` if some variable has no value.
    pub fn eval(&self, val: &Valuation) -> Option<bool> {
        for c in &self.clauses {
            let mut sat = false;
            for l in c {
                if l.eval(val)? {
                    sat = true;
                    break;
                }
            }
            if !sat {
                return Some(false);
            }
        }
        Some(true)
    }

    /// Top-level conjuncts, each clause as its own formula.
    pub fn conjuncts(&self) -> Vec<Formula> {
        self.clauses
            .iter()
            .map(|c| Formula {
                clauses: vec![c.clone()],
            })
            .collect()
    }

    /// Literals of a single-clause formula, each as its own formula.
    pub fn disjuncts(&self) -> Vec<Formula> {
        match self.clauses.as_slice() {
            [c] => c.iter().cloned().map(Formula::literal).collect(),
            _ => vec![self.clone()],
        }
    }

    pub fn to_smtlib(&self) -> String {
        if self.is_true() {
            return "true".into();
        }
        if self.is_false() {
            return "false".into();
        }
        let clause = |c: &Clause| match c.len() {
            1 => c[0].to_smtlib(),
            _ => format!(
                "(or {})",
                c.iter().map(|l| l.to_smtlib()).collect::<Vec<_>>().join(" ")
            ),
        };
        match self.clauses.len() {
            1 => clause(&self.clauses[0]),
            _ => format!(
                "(and {})",
                self.clauses.iter().map(clause).collect::<Vec<_>>().join(" ")
            ),
        }
    }
}

fn canonical_clause(mut lits: Vec<Literal>) -> Option<Clause> {
    lits.sort();
    lits.dedup();
    for l in &lits {
        if lits.binary_search(&l.negate()).is_ok() {
            return None;
        }
    }
    Some(lits)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_true() {
            return write!(f, "true");
        }
        if self.is_false() {
            return write!(f, "false");
        }
        let many = self.clauses.len() > 1;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " && ")?;
            }
            let paren = many && c.len() > 1;
            if paren {
                write!(f, "(")?;
            }
            for (j, l) in c.iter().enumerate() {
                if j > 0 {
                    write!(f, " || ")?;
                }
                write!(f, "{l}")?;
            }
            if paren {
                write!(f, ")")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
