//! Exhaustive satisfiability over finite variable domains.

use std::collections::BTreeMap;

use super::{DomainMap, OracleError};
use crate::formula::{Formula, Rel, Valuation, Var};

struct CompiledLit {
    // (variable indices of the monomial, coefficient)
    terms: Vec<(Vec<usize>, i64)>,
    rel: Rel,
    negated: bool,
}

impl CompiledLit {
    fn holds(&self, vals: &[i64]) -> bool {
        let v: i64 = self
            .terms
            .iter()
            .map(|(m, c)| m.iter().fold(*c, |acc, &i| acc * vals[i]))
            .sum();
        let atom = match self.rel {
            Rel::Eq => v == 0,
            Rel::Le => v <= 0,
        };
        atom != self.negated
    }
}

/// A formula lowered to index-addressed clauses, ready for enumeration.
pub(crate) struct Compiled {
    vars: Vec<Var>,
    domains: Vec<Vec<i64>>,
    // clauses bucketed by the largest variable index they mention
    buckets: Vec<Vec<Vec<CompiledLit>>>,
}

impl Compiled {
    pub fn new(f: &Formula, domains: &DomainMap, cap: u64) -> Result<Self, OracleError> {
        let vars: Vec<Var> = f.vars().into_iter().collect();
        let index: BTreeMap<&Var, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut doms = Vec::with_capacity(vars.len());
        let mut product: u64 = 1;
        for v in &vars {
            let d = domains
                .get(v)
                .ok_or_else(|| OracleError::UnknownVariable(v.to_string()))?;
            product = product.saturating_mul(d.len() as u64);
            doms.push(d.clone());
        }
        if product > cap {
            return Err(OracleError::CapExceeded {
                needed: product,
                cap,
            });
        }
        let mut buckets: Vec<Vec<Vec<CompiledLit>>> = (0..vars.len().max(1)).map(|_| Vec::new()).collect();
        for clause in f.clauses() {
            let mut top = 0;
            let lits = clause
                .iter()
                .map(|l| {
                    let terms = l
                        .atom()
                        .poly()
                        .terms()
                        .map(|(m, c)| {
                            let idx: Vec<usize> = m.iter().map(|v| index[v]).collect();
                            if let Some(&mx) = idx.iter().max() {
                                top = top.max(mx);
                            }
                            (idx, c)
                        })
                        .collect();
                    CompiledLit {
                        terms,
                        rel: l.atom().rel(),
                        negated: l.is_negated(),
                    }
                })
                .collect();
            buckets[top].push(lits);
        }
        Ok(Compiled {
            vars,
            domains: doms,
            buckets,
        })
    }

    /// First satisfying assignment in domain order, if any.
    pub fn solve(&self) -> Option<Valuation> {
        if self.vars.is_empty() {
            // only ground clauses remain, which canonical form reduces to FALSE
            let ok = self.buckets[0].iter().all(|c| c.iter().any(|l| l.holds(&[])));
            return ok.then(Valuation::new);
        }
        let mut vals = vec![0i64; self.vars.len()];
        if self.search(0, &mut vals) {
            Some(self.vars.iter().cloned().zip(vals).collect())
        } else {
            None
        }
    }

    fn search(&self, i: usize, vals: &mut Vec<i64>) -> bool {
        if i == self.vars.len() {
            return true;
        }
        for &d in &self.domains[i] {
            vals[i] = d;
            let ok = self.buckets[i]
                .iter()
                .all(|c| c.iter().any(|l| l.holds(vals)));
            if ok && self.search(i + 1, vals) {
                return true;
            }
        }
        false
    }
}
