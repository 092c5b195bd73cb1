use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use super::{Verdict, VerifyConfig, VerifyStats};
use crate::formula::Valuation;
use crate::program::Program;

type Config = (Vec<usize>, Valuation);

/// Explicit-state reachability over control locations and valuations.
///
/// Returns a shortest violating trace when one exists. Explores at most
/// `cfg.explicit_cap` configurations.
pub fn brute_force_check(p: &Program, cfg: &VerifyConfig) -> Verdict {
    let start = Instant::now();
    let init: Config = (
        p.processes.iter().map(|pr| pr.initial).collect(),
        p.initial_valuation(),
    );
    let mut seen: HashMap<Config, usize> = HashMap::new();
    let mut configs: Vec<Config> = vec![init.clone()];
    let mut pred: Vec<Option<(usize, usize)>> = vec![None];
    seen.insert(init, 0);
    let mut queue = VecDeque::from([0usize]);
    let stats = |n: usize| VerifyStats {
        product_states: n,
        wall_ms: start.elapsed().as_millis(),
        ..VerifyStats::default()
    };

    while let Some(c) = queue.pop_front() {
        let (locs, val) = configs[c].clone();
        for (j, pr) in p.processes.iter().enumerate() {
            let Some(assertion) = pr.assertions.get(&locs[j]) else {
                continue;
            };
            if assertion.eval(&val) == Some(false) {
                let mut trace = Vec::new();
                let mut cur = c;
                while let Some((prev, op)) = pred[cur] {
                    trace.push(op);
                    cur = prev;
                }
                trace.reverse();
                return Verdict::Unsafe {
                    trace: p.trace_labels(&trace),
                    assertion: assertion.clone(),
                    valuation: val,
                    stats: stats(configs.len()),
                };
            }
        }
        for (j, pr) in p.processes.iter().enumerate() {
            for &(from, op, to) in &pr.transitions {
                if from != locs[j] {
                    continue;
                }
                let mut next_val = val.clone();
                if !p.ops[op].instr.execute(&mut next_val) {
                    continue;
                }
                let mut next_locs = locs.clone();
                next_locs[j] = to;
                let next = (next_locs, next_val);
                if seen.contains_key(&next) {
                    continue;
                }
                if configs.len() >= cfg.explicit_cap {
                    return Verdict::Unknown {
                        reason: format!("explicit state cap of {} reached", cfg.explicit_cap),
                        stats: stats(configs.len()),
                    };
                }
                seen.insert(next.clone(), configs.len());
                configs.push(next);
                pred.push(Some((c, op)));
                queue.push_back(configs.len() - 1);
            }
        }
    }
    Verdict::Safe {
        stats: stats(configs.len()),
    }
}
