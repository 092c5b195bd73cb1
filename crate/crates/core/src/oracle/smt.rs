//! SMT-LIB2 solver driven as a child process.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::OracleError;
use crate::formula::Formula;

/// The script for a single satisfiability query.
pub fn script(f: &Formula) -> String {
    let logic = if f.is_linear() { "QF_LIA" } else { "QF_NIA" };
    let mut s = format!("(set-logic {logic})\n");
    for v in f.vars() {
        s.push_str(&format!("(declare-const {v} Int)\n"));
    }
    s.push_str(&format!("(assert {})\n(check-sat)\n(exit)\n", f.to_smtlib()));
    s
}

pub fn check_sat(cmd: &str, f: &Formula, timeout: Duration) -> Result<bool, OracleError> {
    let mut parts = cmd.split_whitespace();
    let program = parts
        .next()
        .ok_or_else(|| OracleError::SolverFailure("empty solver command".into()))?;
    let mut child = Command::new(program)
        .args(parts)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| OracleError::SolverFailure(format!("cannot start `{program}`: {e}")))?;

    let input = script(f);
    {
        let mut stdin = child.stdin.take().expect("piped stdin");
        // a solver that exits early closes the pipe; its output decides the verdict
        let _ = stdin.write_all(input.as_bytes());
    }

    let deadline = Instant::now() + timeout;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(OracleError::SolverFailure(format!(
                    "solver timed out after {} ms",
                    timeout.as_millis()
                )));
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(2)),
            Err(e) => return Err(OracleError::SolverFailure(e.to_string())),
        }
    }

    let mut out = String::new();
    child
        .stdout
        .take()
        .expect("piped stdout")
        .read_to_string(&mut out)
        .map_err(|e| OracleError::SolverFailure(e.to_string()))?;
    match out.split_whitespace().next() {
        Some("sat") => Ok(true),
        Some("unsat") => Ok(false),
        Some(other) => Err(OracleError::SolverFailure(format!(
            "unexpected solver answer `{other}`"
        ))),
        None => Err(OracleError::SolverFailure("solver produced no output".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    #[test]
    fn script_declares_every_variable() {
        let s = script(&parse_formula("x + y <= 3 && x != y").unwrap());
        assert!(s.starts_with("(set-logic QF_LIA)"));
        assert!(s.contains("(declare-const x Int)"));
        assert!(s.contains("(declare-const y Int)"));
        assert!(s.contains("(check-sat)"));
    }

    #[test]
    fn nonlinear_switches_logic() {
        let s = script(&parse_formula("x * y = 2").unwrap());
        assert!(s.starts_with("(set-logic QF_NIA)"));
    }

    #[test]
    fn missing_binary_is_a_solver_failure() {
        let f = parse_formula("x = 1").unwrap();
        let r = check_sat("/nonexistent/solver-binary", &f, Duration::from_millis(100));
        assert!(matches!(r, Err(OracleError::SolverFailure(_))));
    }
}
