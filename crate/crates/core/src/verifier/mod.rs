//! The refinement loop: repeatedly take the shortest unproven trace, prove it
//! or refute it, and subtract the generalized proof from what remains.

mod brute;

use std::time::Instant;

use serde::Serialize;

use crate::automata::{Afa, AutomataError, Nfa};
use crate::formula::{Formula, Instr, IntExpr, Valuation};
use crate::oracle::{Oracle, OracleConfig, OracleStats};
use crate::program::{ExecutionOutcome, Program, Trace};
use crate::proof_afa::{prove_staged, ProofAfa, Stage};

pub use brute::brute_force_check;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub oracle: OracleConfig,
    /// Largest interleaving product built.
    pub product_cap: usize,
    /// Largest number of macrostates explored when searching a remaining language.
    pub subset_cap: usize,
    pub max_iterations: usize,
    /// Largest explicit state space explored by [`brute_force_check`].
    pub explicit_cap: usize,
    /// Prefix every trace with an operation establishing the initial
    /// valuation, so that every proof precondition is ground.
    pub anchor_initial: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            oracle: OracleConfig::default(),
            product_cap: 100_000,
            subset_cap: 200_000,
            max_iterations: 10_000,
            explicit_cap: 5_000_000,
            anchor_initial: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupStats {
    pub assertion: Formula,
    pub iterations: usize,
    /// States of every proof automaton built for this group, summed.
    pub proof_states: usize,
    /// States of the remaining-language automaton at the end.
    pub remaining_states: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifyStats {
    pub iterations: usize,
    pub product_states: usize,
    pub groups: Vec<GroupStats>,
    pub oracle: OracleStats,
    /// Largest macrostate count seen while searching for a shortest word.
    pub subset_peak: usize,
    pub wall_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Safe {
        stats: VerifyStats,
    },
    Unsafe {
        trace: Vec<String>,
        assertion: Formula,
        valuation: Valuation,
        stats: VerifyStats,
    },
    Unknown {
        reason: String,
        stats: VerifyStats,
    },
}

impl Verdict {
    pub fn is_safe(&self) -> bool {
        matches!(self, Verdict::Safe { .. })
    }

    pub fn is_unsafe(&self) -> bool {
        matches!(self, Verdict::Unsafe { .. })
    }

    pub fn stats(&self) -> &VerifyStats {
        match self {
            Verdict::Safe { stats } | Verdict::Unsafe { stats, .. } | Verdict::Unknown { stats, .. } => stats,
        }
    }

    /// 0 for safe, 1 for unsafe, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Safe { .. } => 0,
            Verdict::Unsafe { .. } => 1,
            Verdict::Unknown { .. } => 2,
        }
    }
}

/// What happened in one iteration of the loop.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub group: usize,
    /// The chosen trace in execution order.
    pub trace: Vec<String>,
    pub proof_states: usize,
    /// Whether the trace was refuted (`I ∧ hmap(s0)` satisfiable).
    pub refuted: bool,
    /// Whether the updated remaining language rejects the chosen word.
    pub progress: bool,
}

/// Observer hooks for [`verify_observed`].
pub trait Observer {
    fn stage(&mut self, _iteration: usize, _stage: Stage, _proof: &ProofAfa) {}
    fn iteration(&mut self, _record: &IterationRecord) {}
}

impl Observer for () {}

/// True iff `trace` runs to completion and ends in a state violating `assertion`.
pub fn validate_counterexample(p: &Program, trace: &[usize], assertion: &Formula) -> bool {
    match p.execute_trace(trace) {
        ExecutionOutcome::Terminated(v) => assertion.eval(&v) == Some(false),
        ExecutionOutcome::Blocked(_) => false,
    }
}

pub fn verify(p: &Program, cfg: &VerifyConfig) -> Verdict {
    verify_observed(p, cfg, &mut ())
}

struct Group {
    assertion: Formula,
    negated: Formula,
    remaining: Afa,
    /// Cached shortest word of `remaining`; refreshed after each subtraction.
    shortest: Option<Vec<usize>>,
    stats: GroupStats,
}

pub fn verify_observed(p: &Program, cfg: &VerifyConfig, obs: &mut dyn Observer) -> Verdict {
    let start = Instant::now();
    let mut stats = VerifyStats::default();
    let oracle = Oracle::new(p.domains(), cfg.oracle.clone());
    let finish = |mut stats: VerifyStats, groups: &[Group]| {
        stats.groups = groups.iter().map(|g| g.stats.clone()).collect();
        stats.oracle = oracle.stats();
        stats.wall_ms = start.elapsed().as_millis();
        stats
    };
    let unknown = |reason: String, stats: VerifyStats, groups: &[Group]| Verdict::Unknown {
        reason,
        stats: finish(stats, groups),
    };

    let product = match p.compose(cfg.product_cap) {
        Ok(n) => n,
        Err(e) => return unknown(e.to_string(), stats, &[]),
    };
    stats.product_states = product.len();
    let mut alphabet = p.alphabet();
    let mut ops: Vec<Instr> = p.ops.iter().map(|o| o.instr.clone()).collect();
    let init = p.initial_formula();
    let anchor = cfg.anchor_initial.then(|| {
        alphabet.push(INIT_LABEL.to_string());
        ops.push(initializer(p));
        ops.len() - 1
    });
    // trace positions before this one belong to the anchor
    let skip = usize::from(anchor.is_some());

    let mut groups: Vec<Group> = Vec::new();
    for (assertion, nfa) in product.reversed_remaining_languages() {
        let negated = assertion.negate();
        groups.push(Group {
            stats: GroupStats {
                assertion: assertion.clone(),
                iterations: 0,
                proof_states: 0,
                remaining_states: nfa.num_states(),
            },
            assertion,
            negated,
            remaining: match anchor {
                Some(letter) => anchored(&nfa, letter, &alphabet),
                None => nfa,
            }
            .trim()
            .to_afa(),
            shortest: None,
        });
    }
    for i in 0..groups.len() {
        if let Err(e) = refresh(&mut groups[i], cfg, &mut stats) {
            return unknown(e.to_string(), stats, &groups);
        }
    }

    loop {
        let pick = groups
            .iter()
            .enumerate()
            .filter_map(|(i, g)| g.shortest.as_ref().map(|w| (w.len(), w.clone(), i)))
            .min();
        let Some((_, word, gi)) = pick else {
            return Verdict::Safe {
                stats: finish(stats, &groups),
            };
        };
        if stats.iterations >= cfg.max_iterations {
            return unknown(
                format!("iteration cap of {} reached", cfg.max_iterations),
                stats,
                &groups,
            );
        }
        stats.iterations += 1;
        let iteration = stats.iterations;
        let trace: Trace = word.iter().rev().copied().collect();
        let program_trace = &trace[skip..];
        let group = &mut groups[gi];
        group.stats.iterations += 1;

        let proof = prove_staged(alphabet.clone(), &ops, &trace, &group.negated, &oracle, |stage, a| {
            obs.stage(iteration, stage, a)
        });
        let proof = match proof {
            Ok(a) => a,
            Err(e) => return unknown(e.to_string(), stats, &groups),
        };
        group.stats.proof_states += proof.len();
        let head = proof.hmap(0).cloned().unwrap_or_else(Formula::tt);
        let refuted = match oracle.is_sat(&init.and(&head)) {
            Ok(b) => b,
            Err(e) => return unknown(e.to_string(), stats, &groups),
        };
        let mut record = IterationRecord {
            iteration,
            group: gi,
            trace: p.trace_labels(program_trace),
            proof_states: proof.len(),
            refuted,
            progress: false,
        };

        if refuted {
            obs.iteration(&record);
            let assertion = group.assertion.clone();
            return match p.execute_trace(program_trace) {
                ExecutionOutcome::Terminated(valuation) if assertion.eval(&valuation) == Some(false) => {
                    Verdict::Unsafe {
                        trace: p.trace_labels(program_trace),
                        assertion,
                        valuation,
                        stats: finish(stats, &groups),
                    }
                }
                other => unknown(
                    format!(
                        "trace {} has a satisfiable precondition but does not violate `{assertion}` when executed ({other:?})",
                        p.trace_labels(program_trace).join(" ")
                    ),
                    stats,
                    &groups,
                ),
            };
        }

        let subtract = proof.to_afa().trim().eliminate_epsilon().trim().complement();
        let updated = match subtract.and_then(|c| group.remaining.intersect(&c)) {
            Ok(a) => a,
            Err(e) => return unknown(e.to_string(), stats, &groups),
        };
        record.progress = !updated.accepts(&word);
        obs.iteration(&record);
        if !record.progress {
            return unknown(
                format!(
                    "no progress: the proof of {} does not remove it",
                    record.trace.join(" ")
                ),
                stats,
                &groups,
            );
        }
        group.remaining = updated;
        group.stats.remaining_states = group.remaining.num_states();
        if let Err(e) = refresh(group, cfg, &mut stats) {
            return unknown(e.to_string(), stats, &groups);
        }
    }
}

/// Alphabet entry of the initializing operation; not a valid identifier.
pub const INIT_LABEL: &str = "<init>";

fn initializer(p: &Program) -> Instr {
    Instr::Seq(
        p.vars
            .iter()
            .map(|v| Instr::Assign {
                var: v.name.clone(),
                expr: IntExpr::Const(v.init),
            })
            .collect(),
    )
}

/// Requires every reversed trace to end with the initializing letter.
fn anchored(nfa: &Nfa, letter: usize, alphabet: &[String]) -> Nfa {
    let mut out = nfa.clone();
    out.alphabet = alphabet.to_vec();
    let end = out.transitions.len();
    out.transitions.push(Vec::new());
    out.accepting = vec![false; end + 1];
    out.accepting[end] = true;
    for (s, acc) in nfa.accepting.iter().enumerate() {
        if *acc {
            out.transitions[s].push((letter, end));
        }
    }
    out
}

fn refresh(g: &mut Group, cfg: &VerifyConfig, stats: &mut VerifyStats) -> Result<(), AutomataError> {
    let (w, explored) = g.remaining.shortest_word_with_stats(cfg.subset_cap)?;
    stats.subset_peak = stats.subset_peak.max(explored);
    g.shortest = w;
    Ok(())
}

#[cfg(test)]
mod tests;
