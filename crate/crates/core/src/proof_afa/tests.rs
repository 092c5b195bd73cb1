use super::*;
use crate::formula::{parse_formula, wp_trace};
use crate::program::{parse_program, Program};

const PETERSON: &str = include_str!("../../../../corpus/peterson.cprog");

pub(crate) const STRAIGHT: &str = "
shared x : {0..2} = 0;
shared t : {0..2} = 0;
shared Y : {0..3} = 0;
shared W : {0..2} = 0;
shared z : {0..3} = 0;
shared S : {0..3} = 0;
process P {
  init p0;
  p0 -> p1 : a : Y := x + 1;
  p1 -> p2 : b : W := t;
  p2 -> p3 : c : z := W;
  p3 -> p4 : d : S := t + 1;
  p4 -> p5 : e : z := Y;
}";

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn setup(src: &str, trace: &str, post: &str) -> (Program, Oracle, ProofAfa) {
    let p = parse_program(src).unwrap();
    let o = Oracle::with_domains(p.domains());
    let ops: Vec<Instr> = p.ops.iter().map(|op| op.instr.clone()).collect();
    let t = p.parse_trace(trace).unwrap();
    let a = ProofAfa::build(p.alphabet(), &ops, &t, &f(post), &o).unwrap();
    (p, o, a)
}

fn rev(p: &Program, labels: &str) -> Vec<usize> {
    let mut w = p.parse_trace(labels).unwrap();
    w.reverse();
    w
}

fn state(a: &ProofAfa, amap: &str, rmap: usize) -> usize {
    a.find(&f(amap), rmap)
        .unwrap_or_else(|| panic!("no state ({amap}, {rmap})"))
}

#[test]
fn walkthrough_annotations() {
    let (_, o, mut a) = setup(PETERSON, "abApqPrcs", "l2 != 2");
    assert_eq!(a.len(), 14);
    let expect = [
        ("l2 != 2", 9),
        ("res != 2", 8),
        ("true", 7),
        ("flag1 = 0 || turn = 2", 5),
        ("flag1 = 0", 5),
        ("turn = 2", 5),
        ("false", 4),
        ("flag1 = 0 && (flag2 = 0 || turn = 1)", 2),
        ("flag1 = 0", 2),
        ("flag2 = 0 || turn = 1", 2),
        ("flag2 = 0", 2),
        ("turn = 1", 2),
        ("false", 0),
        ("false", 1),
    ];
    for (amap, r) in expect {
        state(&a, amap, r);
    }
    let s3 = state(&a, "flag1 = 0 || turn = 2", 5);
    assert!(a.states[s3].universal);
    let s10 = state(&a, "flag2 = 0", 2);
    assert!(a.states[s10].accepting);
    assert!(a.states[state(&a, "false", 1)].accepting);
    assert!(!a.states[0].accepting);

    a.compute_hmap().unwrap();
    let s9 = state(&a, "flag2 = 0 || turn = 1", 2);
    assert_eq!(a.hmap(s9), Some(&f("flag2 = 0")));
    assert!(o.equivalent(a.hmap(0).unwrap(), &Formula::ff()).unwrap());
}

#[test]
fn walkthrough_generalization() {
    let (p, o, mut a) = setup(PETERSON, "abApqPrcs", "l2 != 2");
    let before = a.to_afa();
    assert!(before.accepts(&rev(&p, "abApqPrcs")));
    assert!(!before.accepts(&rev(&p, "abpqPArcs")));

    a.compute_hmap().unwrap();
    a.generalize_universal(&o).unwrap();
    let s7 = state(&a, "flag1 = 0 && (flag2 = 0 || turn = 1)", 2);
    let s8 = state(&a, "flag1 = 0", 2);
    assert!(!a.states[s7].universal);
    assert_eq!(a.states[s7].eps, BTreeSet::from([s8]));

    a.add_edges(&o).unwrap();
    let s4 = state(&a, "flag1 = 0", 5);
    let s2 = state(&a, "true", 7);
    let letter = |l: &str| p.op_index(l).unwrap();
    assert!(a.states[s4].eps.contains(&s8));
    assert!(a.states[s8].letters[&letter("P")].contains(&s8));
    assert!(a.states[s2].letters[&letter("A")].contains(&s2));
    assert!(a.to_afa().accepts(&rev(&p, "abpqPArcs")));
}

#[test]
fn straight_line_cores() {
    let (p, o, mut a) = setup(STRAIGHT, "abcde", "S < t && z < x");
    assert_eq!(a.len(), 6);
    assert!(a.states[0].universal);
    let s1 = state(&a, "S < t", 5);
    let s2 = state(&a, "z < x", 5);
    assert_eq!(a.states[0].eps, BTreeSet::from([s1, s2]));
    let s3 = state(&a, "false", 3);
    let s4 = state(&a, "Y < x", 4);
    let d = p.op_index("d").unwrap();
    assert_eq!(a.states[s1].lit_assn, Some((d, s3)));
    assert_eq!(a.states[s2].lit_assn, Some((p.op_index("e").unwrap(), s4)));
    state(&a, "false", 0);

    a.compute_hmap().unwrap();
    assert!(!a.to_afa().accepts(&rev(&p, "abcd")));
    a.generalize_universal(&o).unwrap();
    assert_eq!(a.splits.len(), 1);
    let mut cores = a.splits[0].cores.clone();
    cores.sort();
    assert_eq!(cores, vec![vec![s1], vec![s2]]);
    let afa = a.to_afa();
    assert!(afa.accepts(&rev(&p, "adcbe")));
    // only one conjunct needs a proof now
    assert!(afa.accepts(&rev(&p, "abcd")));
}

#[test]
fn empty_trace_is_a_single_accepting_state() {
    let (_, _, mut a) = setup(STRAIGHT, "", "x = 0");
    assert_eq!(a.len(), 1);
    assert!(a.states[0].accepting);
    a.compute_hmap().unwrap();
    assert_eq!(a.hmap(0), Some(&f("x = 0")));
}

#[test]
fn hmap_matches_trace_precondition() {
    let (p, o, mut a) = setup(PETERSON, "abApqPrcs", "l2 != 2");
    a.compute_hmap().unwrap();
    let t = p.parse_trace("abApqPrcs").unwrap();
    let reference = wp_trace(p.instrs(&t), &f("l2 != 2"));
    assert!(o.equivalent(a.hmap(0).unwrap(), &reference).unwrap());
}

#[test]
fn dot_output_mentions_every_state() {
    let (_, o, mut a) = setup(PETERSON, "abApqPrcs", "l2 != 2");
    a.compute_hmap().unwrap();
    a.generalize_universal(&o).unwrap();
    let dot = a.to_dot("walkthrough");
    for s in 0..a.len() {
        assert!(dot.contains(&format!("  s{s} [")));
    }
    assert!(dot.contains("∀ flag1 = 0 || turn = 2"));
}
