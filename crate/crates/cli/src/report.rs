use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use weaver_core::program::Program;
use weaver_core::testgen::{random_program_source, rng, Shape};
use weaver_core::verifier::{brute_force_check, validate_counterexample, verify, Verdict, VerifyConfig};

pub fn verdict_text(p: &Program, v: &Verdict) -> String {
    let mut out = String::new();
    let s = v.stats();
    match v {
        Verdict::Safe { .. } => {
            writeln!(out, "SAFE").unwrap();
            writeln!(
                out,
                "all assertions hold ({} iterations, {} ms)",
                s.iterations, s.wall_ms
            )
            .unwrap();
        }
        Verdict::Unsafe {
            trace,
            assertion,
            valuation,
            ..
        } => {
            writeln!(out, "UNSAFE").unwrap();
            writeln!(out, "violated assertion: {assertion}").unwrap();
            writeln!(out, "counterexample ({} steps):", trace.len()).unwrap();
            for (i, label) in trace.iter().enumerate() {
                let op = &p.ops[p.op_index(label).expect("trace uses program labels")];
                writeln!(
                    out,
                    "  {:>3}  {:<8} {:<6} {}",
                    i + 1,
                    p.processes[op.owner].name,
                    label,
                    op.instr
                )
                .unwrap();
            }
            let vals: Vec<String> = valuation.iter().map(|(k, x)| format!("{k}={x}")).collect();
            writeln!(out, "final valuation: {}", vals.join(", ")).unwrap();
        }
        Verdict::Unknown { reason, .. } => {
            writeln!(out, "UNKNOWN").unwrap();
            writeln!(out, "reason: {reason}").unwrap();
        }
    }
    out
}

pub struct BenchRow {
    pub name: String,
    pub verdict: Verdict,
    pub explicit: Verdict,
    pub seconds: f64,
}

impl BenchRow {
    pub fn agrees(&self) -> bool {
        self.verdict.is_safe() == self.explicit.is_safe() && self.verdict.is_unsafe() == self.explicit.is_unsafe()
    }
}

pub fn bench(programs: &[(PathBuf, Program)], cfg: &VerifyConfig) -> Vec<BenchRow> {
    programs
        .iter()
        .map(|(path, p)| {
            let start = Instant::now();
            let verdict = verify(p, cfg);
            let seconds = start.elapsed().as_secs_f64();
            BenchRow {
                name: path.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
                verdict,
                explicit: brute_force_check(p, cfg),
                seconds,
            }
        })
        .collect()
}

fn tag(v: &Verdict) -> &'static str {
    match v {
        Verdict::Safe { .. } => "safe",
        Verdict::Unsafe { .. } => "unsafe",
        Verdict::Unknown { .. } => "unknown",
    }
}

pub fn bench_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let width = rows.iter().map(|r| r.name.len() + 7).max().unwrap_or(0).max(8);
    writeln!(
        out,
        "{:<width$}  {:>8}  {:>5}  {:>7}  {:>10}  {:>8}  {:>8}",
        "Program", "Time(s)", "Iter", "Product", "Proof st.", "Queries", "Explicit"
    )
    .unwrap();
    writeln!(out, "{}", "-".repeat(width + 60)).unwrap();
    for r in rows {
        let s = r.verdict.stats();
        let proof: usize = s.groups.iter().map(|g| g.proof_states).sum();
        writeln!(
            out,
            "{:<width$}  {:>8.3}  {:>5}  {:>7}  {:>10}  {:>8}  {:>8}",
            format!("{}.{}", r.name, tag(&r.verdict)),
            r.seconds,
            s.iterations,
            s.product_states,
            proof,
            s.oracle.sat_queries,
            if r.agrees() { "agrees" } else { tag(&r.explicit) },
        )
        .unwrap();
    }
    out
}

/// Returns the exit code: 0 when every instance agrees.
pub fn selftest(count: usize, seed: u64, cfg: &VerifyConfig) -> u8 {
    let mut r = rng(seed);
    let shape = Shape::default();
    let (mut safe, mut unsafe_, mut bad) = (0usize, 0usize, 0usize);
    let mut times = Vec::with_capacity(count);
    for i in 0..count {
        let src = random_program_source(&mut r, &shape);
        let p = weaver_core::program::parse_program(&src).expect("generated programs parse");
        let start = Instant::now();
        let v = verify(&p, cfg);
        times.push(start.elapsed().as_secs_f64());
        let b = brute_force_check(&p, cfg);
        let valid = match &v {
            Verdict::Unsafe { trace, assertion, .. } => p
                .parse_trace(&trace.join(" "))
                .is_ok_and(|t| validate_counterexample(&p, &t, assertion)),
            _ => true,
        };
        let agree = valid && !matches!(v, Verdict::Unknown { .. }) && v.is_safe() == b.is_safe();
        if !agree {
            bad += 1;
            println!("instance {i}: verifier {} / explicit {}\n{src}", tag(&v), tag(&b));
        } else if v.is_safe() {
            safe += 1;
        } else {
            unsafe_ += 1;
        }
    }
    times.sort_by(f64::total_cmp);
    let median = times.get(times.len() / 2).copied().unwrap_or(0.0);
    println!(
        "{count} programs: {safe} safe, {unsafe_} unsafe, {bad} disagreements; median {:.1} ms",
        median * 1e3
    );
    u8::from(bad > 0)
}
