//! Integer polynomials in a canonical sparse form.
//!
//! Every program expression is normalized into a [`Poly`] before it reaches a
//! formula, so syntactically different but arithmetically identical terms
//! (`t + 1 - t`, `1`) collapse to the same representation.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use super::{Valuation, Var};

/// A product of variables, kept sorted. The empty monomial is the constant term.
pub type Monomial = Vec<Var>;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    // never stores a zero coefficient
    terms: BTreeMap<Monomial, i64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(v: Var) -> Self {
        let mut p = Poly::zero();
        p.add_term(vec![v], 1);
        p
    }

    fn add_term(&mut self, mono: Monomial, coeff: i64) {
        if coeff == 0 {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Poly {
        if k == 0 {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m: Monomial = m1.iter().chain(m2.iter()).cloned().collect();
                m.sort();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    /// Constant term.
    pub fn constant_term(&self) -> i64 {
        self.terms.get(&Vec::new()).copied().unwrap_or(0)
    }

    /// `Some(c)` when the polynomial has no variables.
    pub fn as_constant(&self) -> Option<i64> {
        if self.terms.keys().all(|m| m.is_empty()) {
            Some(self.constant_term())
        } else {
            None
        }
    }

    /// Non-constant terms in canonical order.
    pub fn var_terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms
            .iter()
            .filter(|(m, _)| !m.is_empty())
            .map(|(m, c)| (m, *c))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn is_linear(&self) -> bool {
        self.terms.keys().all(|m| m.len() <= 1)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.terms.keys().flat_map(|m| m.iter())
    }

    pub fn mentions(&self, x: &Var) -> bool {
        self.terms.keys().any(|m| m.contains(x))
    }

    /// Replace every occurrence of `x` by `e`, expanding powers.
    pub fn substitute(&self, x: &Var, e: &Poly) -> Poly {
        if !self.mentions(x) {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let rest: Monomial = m.iter().filter(|v| *v != x).cloned().collect();
            let power = m.len() - rest.len();
            let mut term = Poly::zero();
            term.add_term(rest, *c);
            for _ in 0..power {
                term = term.mul(e);
            }
            out = out.add(&term);
        }
        out
    }

    /// Divide every coefficient exactly. Caller guarantees divisibility.
    pub(crate) fn div_exact(&self, k: i64) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    debug_assert_eq!(c % k, 0);
                    (m.clone(), c / k)
                })
                .collect(),
        }
    }

    /// Positive gcd of the non-constant coefficients, 0 when there are none.
    pub(crate) fn var_gcd(&self) -> i64 {
        self.var_terms().fold(0, |g, (_, c)| gcd(g, c.abs()))
    }

    pub(crate) fn with_constant(&self, c: i64) -> Poly {
        let mut out = Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.is_empty())
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        };
        out.add_term(Vec::new(), c);
        out
    }

    pub fn eval(&self, val: &Valuation) -> Option<i64> {
        let mut acc = 0i64;
        for (m, c) in &self.terms {
            let mut t = *c;
            for v in m {
                t *= *val.get(v)?;
            }
            acc += t;
        }
        Some(acc)
    }

    /// SMT-LIB2 term syntax.
    pub fn to_smtlib(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let coeff = smt_int(*c);
                if m.is_empty() {
                    coeff
                } else if *c == 1 && m.len() == 1 {
                    m[0].to_string()
                } else {
                    let mut factors = Vec::with_capacity(m.len() + 1);
                    if *c != 1 {
                        factors.push(coeff);
                    }
                    factors.extend(m.iter().map(|v| v.to_string()));
                    if factors.len() == 1 {
                        factors.pop().unwrap()
                    } else {
                        format!("(* {})", factors.join(" "))
                    }
                }
            })
            .collect();
        match parts.len() {
            0 => "0".to_string(),
            1 => parts.into_iter().next().unwrap(),
            _ => format!("(+ {})", parts.join(" ")),
        }
    }

    /// Number of term entries; used as a size measure.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

fn smt_int(c: i64) -> String {
    if c < 0 {
        format!("(- {})", c.unsigned_abs())
    } else {
        c.to_string()
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    for (i, v) in m.iter().enumerate() {
        if i > 0 {
            write!(f, "*")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// Writes `sum` of the given signed terms in infix form (`x - 2*y + 3`).
pub(crate) fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl IntoIterator<Item = (&'a Monomial, i64)>,
) -> fmt::Result {
    let mut first = true;
    for (m, c) in terms {
        let mag = c.unsigned_abs();
        if first {
            if c < 0 {
                write!(f, "-")?;
            }
        } else if c < 0 {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        if m.is_empty() {
            write!(f, "{mag}")?;
        } else {
            if mag != 1 {
                write!(f, "{mag}*")?;
            }
            write_monomial(f, m)?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms())
    }
}
