use proptest::prelude::*;
use weaver_core::formula::{parse_formula, Formula, Valuation};
use weaver_core::oracle::{DomainMap, Oracle};

const VARS: [&str; 3] = ["a", "b", "c"];

fn domains() -> DomainMap {
    VARS.iter().map(|v| ((*v).into(), vec![0, 1, 2])).collect()
}

fn atom() -> impl Strategy<Value = String> {
    let var = prop::sample::select(VARS.to_vec());
    let op = prop::sample::select(vec!["=", "!=", "<", "<=", "+ 1 ="]);
    (var.clone(), op, prop_oneof![(0..3i64).prop_map(|c| c.to_string()), var.prop_map(str::to_string)])
        .prop_map(|(v, o, r)| format!("{v} {o} {r}"))
}

fn formula() -> impl Strategy<Value = Formula> {
    prop::collection::vec(prop::collection::vec(atom(), 1..3), 1..4).prop_map(|cnf| {
        let text: Vec<String> = cnf.iter().map(|c| format!("({})", c.join(" || "))).collect();
        parse_formula(&text.join(" && ")).unwrap()
    })
}

fn all_valuations() -> Vec<Valuation> {
    let mut out = Vec::new();
    for x in 0..3 {
        for y in 0..3 {
            for z in 0..3 {
                out.push(weaver_core::formula::valuation([("a", x), ("b", y), ("c", z)]));
            }
        }
    }
    out
}

fn brute_sat(f: &Formula) -> bool {
    all_valuations().iter().any(|v| f.eval(v) == Some(true))
}

proptest! {
    #[test]
    fn satisfiability_matches_enumeration(f in formula()) {
        let o = Oracle::with_domains(domains());
        prop_assert_eq!(o.is_sat(&f).unwrap(), brute_sat(&f));
        if let Some(m) = o.model(&f).unwrap() {
            prop_assert_eq!(f.eval(&m), Some(true));
        }
    }

    #[test]
    fn implication_matches_enumeration(f in formula(), g in formula()) {
        let o = Oracle::with_domains(domains());
        let expected = all_valuations().iter().all(|v| f.eval(v) != Some(true) || g.eval(v) == Some(true));
        prop_assert_eq!(o.implies(&f, &g).unwrap(), expected);
    }

    #[test]
    fn cores_are_minimal_and_unsat(fs in prop::collection::vec(formula(), 1..6)) {
        let o = Oracle::with_domains(domains());
        let found = o.minimal_unsat_cores(&fs).unwrap();
        let conj = |idx: &[usize]| Formula::conjoin(idx.iter().map(|&i| fs[i].clone()));
        let all: Vec<usize> = (0..fs.len()).collect();
        prop_assert_eq!(found.cores.is_empty(), brute_sat(&conj(&all)));
        for core in &found.cores {
            prop_assert!(!brute_sat(&conj(core)));
            for skip in 0..core.len() {
                let mut smaller = core.clone();
                smaller.remove(skip);
                prop_assert!(brute_sat(&conj(&smaller)));
            }
        }
    }
}
