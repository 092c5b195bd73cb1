mod common;

use common::{corpus_names, corpus_program, is_broken};
use weaver_core::verifier::{brute_force_check, verify, Verdict, VerifyConfig};

#[test]
fn corpus_verdicts_match_explicit_search() {
    let cfg = VerifyConfig::default();
    for name in corpus_names() {
        let p = corpus_program(&name);
        let v = verify(&p, &cfg);
        let b = brute_force_check(&p, &cfg);
        assert_eq!(v.is_unsafe(), is_broken(&name), "{name}: {v:?}");
        assert_eq!(b.is_unsafe(), is_broken(&name), "{name}: {b:?}");
        assert!(!matches!(v, Verdict::Unknown { .. }), "{name}");
    }
}

#[test]
fn label_order_changes_only_the_tie_break() {
    let p = corpus_program("peterson_broken");
    let mut order = p.alphabet();
    order.reverse();
    let q = p.with_label_order(&order).unwrap();
    let v = verify(&q, &VerifyConfig::default());
    let Verdict::Unsafe { trace, .. } = v else { panic!("{v:?}") };
    let t = q.parse_trace(&trace.join(" ")).unwrap();
    assert!(matches!(q.execute_trace(&t), weaver_core::program::ExecutionOutcome::Terminated(_)));
}

#[test]
fn stats_serialize() {
    let v = verify(&corpus_program("peterson"), &VerifyConfig::default());
    let json = serde_json::to_value(&v).unwrap();
    assert_eq!(json["verdict"], "safe");
    assert_eq!(json["stats"]["groups"].as_array().unwrap().len(), 2);
    assert!(json["stats"]["iterations"].as_u64().unwrap() >= 1);
}
