use super::*;
use crate::formula::parse_formula;
use crate::program::parse_program;

const PETERSON: &str = include_str!("../../../../corpus/peterson.cprog");

fn broken_peterson() -> Program {
    let src = PETERSON.replace("qa -> qb : a : flag1 := 1;", "qa -> qb : a : skip;");
    assert_ne!(src, PETERSON);
    parse_program(&src).unwrap()
}

#[test]
fn single_assignment_is_safe_in_one_iteration() {
    let p = parse_program("shared x : {0,1} = 0; process P { init a; a -> b : w : x := 1; assert b : x = 1; }")
        .unwrap();
    let v = verify(&p, &VerifyConfig::default());
    assert!(v.is_safe(), "{v:?}");
    assert_eq!(v.stats().iterations, 1);
}

#[test]
fn peterson_is_safe() {
    let p = parse_program(PETERSON).unwrap();
    let v = verify(&p, &VerifyConfig::default());
    assert!(v.is_safe(), "{v:?}");
    assert!(brute_force_check(&p, &VerifyConfig::default()).is_safe());
}

#[test]
fn broken_peterson_has_a_valid_counterexample() {
    let p = broken_peterson();
    let v = verify(&p, &VerifyConfig::default());
    let Verdict::Unsafe { trace, assertion, .. } = &v else {
        panic!("expected unsafe, got {v:?}");
    };
    let t = p.parse_trace(&trace.join(" ")).unwrap();
    assert!(validate_counterexample(&p, &t, assertion));
    assert!(brute_force_check(&p, &VerifyConfig::default()).is_unsafe());
}

#[test]
fn blocked_trace_is_not_a_counterexample() {
    let p = parse_program(
        "shared x : {0,1} = 0; process P { init a; a -> b : g : assume(x = 1); assert b : false; }",
    )
    .unwrap();
    let g = p.op_index("g").unwrap();
    assert!(!validate_counterexample(&p, &[g], &parse_formula("false").unwrap()));
    assert!(verify(&p, &VerifyConfig::default()).is_safe());
    assert!(brute_force_check(&p, &VerifyConfig::default()).is_safe());
}

#[test]
fn trivially_true_assertion_is_safe() {
    let p = parse_program("shared x : {0,1} = 0; process P { init a; a -> a : w : x := 1 - x; assert a : true; }")
        .unwrap();
    assert!(brute_force_check(&p, &VerifyConfig::default()).is_safe());
    assert!(verify(&p, &VerifyConfig::default()).is_safe());
}

#[test]
fn iteration_cap_gives_unknown() {
    let p = parse_program(PETERSON).unwrap();
    let cfg = VerifyConfig {
        max_iterations: 1,
        ..VerifyConfig::default()
    };
    assert!(matches!(verify(&p, &cfg), Verdict::Unknown { .. }));
}

#[test]
fn runs_are_deterministic() {
    let p = broken_peterson();
    let a = verify(&p, &VerifyConfig::default());
    let b = verify(&p, &VerifyConfig::default());
    assert_eq!(a.stats().iterations, b.stats().iterations);
    let strip = |v: Verdict| match v {
        Verdict::Unsafe { trace, .. } => trace,
        _ => Vec::new(),
    };
    assert_eq!(strip(a), strip(b));
}
