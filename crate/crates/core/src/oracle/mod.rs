//! Satisfiability, validity, implication and unsat-core queries.

mod finite;
pub mod smt;

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{Formula, Valuation, Var};

/// Finite ordered domain of every variable.
pub type DomainMap = BTreeMap<Var, Vec<i64>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("domain product of {needed} assignments exceeds the cap of {cap}")]
    CapExceeded { needed: u64, cap: u64 },
    #[error("variable `{0}` has no declared domain")]
    UnknownVariable(String),
    #[error("solver failure: {0}")]
    SolverFailure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    FiniteDomain,
    ExternalSmt,
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub mode: OracleMode,
    /// Largest domain product enumerated in finite-domain mode.
    pub enum_cap: u64,
    pub smt_cmd: String,
    pub timeout: Duration,
    /// Subset checks allowed per core enumeration.
    pub core_subset_cap: usize,
    /// Cores kept per enumeration.
    pub max_cores: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            mode: OracleMode::FiniteDomain,
            enum_cap: 1_000_000,
            smt_cmd: "z3 -in".to_string(),
            timeout: Duration::from_millis(10_000),
            core_subset_cap: 4096,
            max_cores: 32,
        }
    }
}

/// Minimal unsatisfiable index subsets of a formula list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UnsatCoreSet {
    pub cores: Vec<Vec<usize>>,
    /// Set when the search stopped before exhausting all subsets.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OracleStats {
    pub sat_queries: u64,
    pub cache_hits: u64,
    pub enumerations: u64,
    pub solver_calls: u64,
}

/// Memoizing decision procedure over a fixed domain map.
pub struct Oracle {
    domains: DomainMap,
    cfg: OracleConfig,
    cache: Mutex<HashMap<Formula, bool>>,
    sat_queries: AtomicU64,
    cache_hits: AtomicU64,
    enumerations: AtomicU64,
    solver_calls: AtomicU64,
}

impl Oracle {
    pub fn new(domains: DomainMap, cfg: OracleConfig) -> Self {
        Oracle {
            domains,
            cfg,
            cache: Mutex::new(HashMap::new()),
            sat_queries: AtomicU64::new(0),
            cache_hits: AtomicU64::new(0),
            enumerations: AtomicU64::new(0),
            solver_calls: AtomicU64::new(0),
        }
    }

    pub fn with_domains(domains: DomainMap) -> Self {
        Self::new(domains, OracleConfig::default())
    }

    pub fn domains(&self) -> &DomainMap {
        &self.domains
    }

    pub fn config(&self) -> &OracleConfig {
        &self.cfg
    }

    pub fn stats(&self) -> OracleStats {
        OracleStats {
            sat_queries: self.sat_queries.load(Ordering::Relaxed),
            cache_hits: self.cache_hits.load(Ordering::Relaxed),
            enumerations: self.enumerations.load(Ordering::Relaxed),
            solver_calls: self.solver_calls.load(Ordering::Relaxed),
        }
    }

    pub fn clear_cache(&self) {
        self.cache.lock().unwrap().clear();
    }

    pub fn is_sat(&self, f: &Formula) -> Result<bool, OracleError> {
        self.sat_queries.fetch_add(1, Ordering::Relaxed);
        if f.is_true() {
            return Ok(true);
        }
        if f.is_false() {
            return Ok(false);
        }
        if let Some(&v) = self.cache.lock().unwrap().get(f) {
            self.cache_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v);
        }
        let verdict = match self.cfg.mode {
            OracleMode::FiniteDomain => {
                self.enumerations.fetch_add(1, Ordering::Relaxed);
                finite::Compiled::new(f, &self.domains, self.cfg.enum_cap)?
                    .solve()
                    .is_some()
            }
            OracleMode::ExternalSmt => {
                self.solver_calls.fetch_add(1, Ordering::Relaxed);
                smt::check_sat(&self.cfg.smt_cmd, f, self.cfg.timeout)?
            }
        };
        self.cache.lock().unwrap().insert(f.clone(), verdict);
        Ok(verdict)
    }

    /// A satisfying assignment over the declared domains (finite-domain search
    /// regardless of mode).
    pub fn model(&self, f: &Formula) -> Result<Option<Valuation>, OracleError> {
        Ok(finite::Compiled::new(f, &self.domains, self.cfg.enum_cap)?.solve())
    }

    pub fn is_unsat(&self, f: &Formula) -> Result<bool, OracleError> {
        Ok(!self.is_sat(f)?)
    }

    pub fn is_valid(&self, f: &Formula) -> Result<bool, OracleError> {
        for c in f.clauses() {
            let neg = Formula::from_clauses(c.iter().map(|l| vec![l.negate()]));
            if self.is_sat(&neg)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `f1 => f2`, decided one clause of `f2` at a time.
    pub fn implies(&self, f1: &Formula, f2: &Formula) -> Result<bool, OracleError> {
        if f1.is_false() || f2.is_true() || f1 == f2 {
            return Ok(true);
        }
        for c in f2.clauses() {
            if f1.clauses().contains(c) {
                continue;
            }
            let neg = Formula::from_clauses(c.iter().map(|l| vec![l.negate()]));
            if self.is_sat(&f1.and(&neg))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equivalent(&self, f1: &Formula, f2: &Formula) -> Result<bool, OracleError> {
        Ok(f1 == f2 || (self.implies(f1, f2)? && self.implies(f2, f1)?))
    }

    /// Minimal index subsets of `fs` whose conjunction is unsatisfiable.
    ///
    /// Subsets are tried in increasing size, skipping supersets of cores
    /// already found, so every hit is minimal. If the subset budget runs out
    /// before any core is found, one core is extracted by deletion.
    pub fn minimal_unsat_cores(&self, fs: &[Formula]) -> Result<UnsatCoreSet, OracleError> {
        let mut out = UnsatCoreSet::default();
        if self.is_sat(&Formula::conjoin(fs.iter().cloned()))? {
            return Ok(out);
        }
        let n = fs.len();
        let mut checks = 0usize;
        'sizes: for k in 1..=n {
            let mut combo: Vec<usize> = (0..k).collect();
            loop {
                let covered = out
                    .cores
                    .iter()
                    .any(|core| core.iter().all(|i| combo.contains(i)));
                if !covered {
                    if checks >= self.cfg.core_subset_cap {
                        out.truncated = true;
                        break 'sizes;
                    }
                    checks += 1;
                    let conj = Formula::conjoin(combo.iter().map(|&i| fs[i].clone()));
                    if !self.is_sat(&conj)? {
                        out.cores.push(combo.clone());
                        if out.cores.len() >= self.cfg.max_cores {
                            out.truncated = true;
                            break 'sizes;
                        }
                    }
                }
                if !next_combination(&mut combo, n) {
                    break;
                }
            }
        }
        if out.cores.is_empty() {
            out.cores.push(self.shrink_core(fs)?);
        }
        Ok(out)
    }

    fn shrink_core(&self, fs: &[Formula]) -> Result<Vec<usize>, OracleError> {
        let mut keep: Vec<usize> = (0..fs.len()).collect();
        let mut i = 0;
        while i < keep.len() {
            let trial: Vec<usize> = keep.iter().copied().filter(|&j| j != keep[i]).collect();
            let conj = Formula::conjoin(trial.iter().map(|&j| fs[j].clone()));
            if self.is_sat(&conj)? {
                i += 1;
            } else {
                keep = trial;
            }
        }
        Ok(keep)
    }
}

/// Advances `c` to the next k-combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
