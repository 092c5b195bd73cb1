use std::collections::{BTreeMap, BTreeSet};

use super::{Operation, Process, Program, ProgramError, VarDecl};
use crate::formula::{Formula, Instr, IntExpr, Var};
use crate::syntax::{ParseError, Parser};

struct RawTransition {
    from: String,
    to: String,
    label: String,
    instr: Instr,
    line: usize,
}

struct RawProcess {
    name: String,
    init: Option<String>,
    transitions: Vec<RawTransition>,
    asserts: Vec<(String, Formula, usize)>,
}

pub fn parse_program(src: &str) -> Result<Program, ProgramError> {
    let mut p = Parser::new(src)?;
    let mut vars: Vec<(VarDecl, Option<String>, usize)> = Vec::new();
    let mut procs: Vec<RawProcess> = Vec::new();

    while !p.at_end() {
        if p.is_keyword("shared") || p.is_keyword("local") {
            let line = p.line();
            let local = p.is_keyword("local");
            p.ident()?;
            let owner = if local { Some(p.ident()?) } else { None };
            let name = p.ident()?;
            p.expect_sym(":")?;
            let domain = parse_domain(&mut p)?;
            p.expect_sym("=")?;
            let init = p.int()?;
            p.expect_sym(";")?;
            vars.push((
                VarDecl {
                    name: Var::from(name.as_str()),
                    domain,
                    init,
                    owner: None,
                },
                owner,
                line,
            ));
        } else if p.is_keyword("process") {
            p.ident()?;
            procs.push(parse_process(&mut p)?);
        } else {
            return p
                .unexpected("`shared`, `local` or `process`")
                .map_err(ProgramError::from);
        }
    }
    resolve(vars, procs)
}

fn parse_domain(p: &mut Parser) -> Result<Vec<i64>, ParseError> {
    p.expect_sym("{")?;
    let first = p.int()?;
    let mut dom = vec![first];
    if p.eat_sym("..") {
        let last = p.int()?;
        if last < first {
            return p.error(format!("empty range {first}..{last}"));
        }
        if last - first > 1_000_000 {
            return p.error("domain range too large");
        }
        dom = (first..=last).collect();
    } else {
        while p.eat_sym(",") {
            dom.push(p.int()?);
        }
    }
    p.expect_sym("}")?;
    dom.sort_unstable();
    dom.dedup();
    Ok(dom)
}

fn parse_process(p: &mut Parser) -> Result<RawProcess, ParseError> {
    let name = p.ident()?;
    p.expect_sym("{")?;
    let mut raw = RawProcess {
        name,
        init: None,
        transitions: Vec::new(),
        asserts: Vec::new(),
    };
    while !p.eat_sym("}") {
        let line = p.line();
        if p.is_keyword("init") && !p.ident_then("->") {
            p.ident()?;
            if raw.init.is_some() {
                return p.error("duplicate `init`");
            }
            raw.init = Some(p.ident()?);
            p.expect_sym(";")?;
        } else if p.is_keyword("assert") && !p.ident_then("->") {
            p.ident()?;
            let state = p.ident()?;
            p.expect_sym(":")?;
            let f = Formula::from_bool_expr(&p.bool_expr()?);
            p.expect_sym(";")?;
            raw.asserts.push((state, f, line));
        } else if p.ident_then("->") {
            let from = p.ident()?;
            p.expect_sym("->")?;
            let to = p.ident()?;
            p.expect_sym(":")?;
            let label = p.ident()?;
            p.expect_sym(":")?;
            let instr = parse_instr(p)?;
            p.expect_sym(";")?;
            raw.transitions.push(RawTransition {
                from,
                to,
                label,
                instr,
                line,
            });
        } else if p.at_end() {
            return p.unexpected("`}`");
        } else {
            return p.unexpected("`init`, `assert`, a transition or `}`");
        }
    }
    Ok(raw)
}

fn parse_instr(p: &mut Parser) -> Result<Instr, ParseError> {
    for kw in ["assume", "lock", "unlock"] {
        if p.is_keyword(kw) {
            p.ident()?;
            p.expect_sym("(")?;
            let out = match kw {
                "assume" => Instr::Assume(Formula::from_bool_expr(&p.bool_expr()?)),
                "lock" => Instr::Lock(Var::from(p.ident()?.as_str())),
                _ => Instr::Assign {
                    var: Var::from(p.ident()?.as_str()),
                    expr: IntExpr::Const(0),
                },
            };
            p.expect_sym(")")?;
            return Ok(out);
        }
    }
    if p.is_keyword("skip") {
        p.ident()?;
        return Ok(Instr::Skip);
    }
    let var = p.ident()?;
    p.expect_sym(":=")?;
    let expr = p.int_expr()?;
    Ok(Instr::Assign {
        var: Var::from(var.as_str()),
        expr,
    })
}

fn semantic(line: usize, msg: impl Into<String>) -> ProgramError {
    ProgramError::Semantic {
        line,
        message: msg.into(),
    }
}

fn resolve(
    raw_vars: Vec<(VarDecl, Option<String>, usize)>,
    raw_procs: Vec<RawProcess>,
) -> Result<Program, ProgramError> {
    if raw_procs.is_empty() {
        return Err(semantic(0, "program declares no process"));
    }
    let mut proc_index = BTreeMap::new();
    for (i, rp) in raw_procs.iter().enumerate() {
        if proc_index.insert(rp.name.clone(), i).is_some() {
            return Err(semantic(0, format!("duplicate process `{}`", rp.name)));
        }
    }

    let mut vars = Vec::new();
    let mut by_name: BTreeMap<Var, usize> = BTreeMap::new();
    for (mut decl, owner, line) in raw_vars {
        if let Some(o) = owner {
            let idx = *proc_index
                .get(&o)
                .ok_or_else(|| semantic(line, format!("unknown process `{o}`")))?;
            decl.owner = Some(idx);
        }
        if !decl.domain.contains(&decl.init) {
            return Err(semantic(
                line,
                format!("initial value {} of `{}` is outside its domain", decl.init, decl.name),
            ));
        }
        if by_name.insert(decl.name.clone(), vars.len()).is_some() {
            return Err(semantic(line, format!("duplicate variable `{}`", decl.name)));
        }
        vars.push(decl);
    }

    let visible = |v: &Var, proc: usize| -> Result<(), String> {
        match by_name.get(v) {
            None => Err(format!("undeclared variable `{v}`")),
            Some(&i) => match vars[i].owner {
                Some(o) if o != proc => Err(format!(
                    "variable `{v}` is local to process `{}`",
                    raw_procs[o].name
                )),
                _ => Ok(()),
            },
        }
    };

    let mut ops: Vec<Operation> = Vec::new();
    let mut op_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut processes = Vec::new();

    for (pi, rp) in raw_procs.iter().enumerate() {
        let mut states: Vec<String> = Vec::new();
        let state_of = |s: &str, states: &mut Vec<String>| -> usize {
            match states.iter().position(|x| x == s) {
                Some(i) => i,
                None => {
                    states.push(s.to_string());
                    states.len() - 1
                }
            }
        };
        let init_name = rp
            .init
            .clone()
            .ok_or_else(|| semantic(0, format!("process `{}` has no `init`", rp.name)))?;
        let initial = state_of(&init_name, &mut states);
        let mut transitions = Vec::new();
        let mut seen_edges = BTreeSet::new();
        for t in &rp.transitions {
            for v in t.instr.reads().iter().chain(t.instr.writes()) {
                visible(v, pi).map_err(|m| semantic(t.line, m))?;
            }
            let op = match op_index.get(&t.label) {
                Some(&i) => {
                    let existing = &ops[i];
                    if existing.owner != pi || existing.instr != t.instr {
                        return Err(semantic(
                            t.line,
                            format!("label `{}` is reused for a different operation", t.label),
                        ));
                    }
                    i
                }
                None => {
                    check_domain_closed(&t.instr, &vars, &by_name).map_err(|m| semantic(t.line, m))?;
                    ops.push(Operation {
                        label: t.label.clone(),
                        instr: t.instr.clone(),
                        owner: pi,
                    });
                    op_index.insert(t.label.clone(), ops.len() - 1);
                    ops.len() - 1
                }
            };
            let from = state_of(&t.from, &mut states);
            let to = state_of(&t.to, &mut states);
            if !seen_edges.insert((from, op)) {
                return Err(semantic(
                    t.line,
                    format!(
                        "process `{}` is nondeterministic: two `{}` transitions leave `{}`",
                        rp.name, t.label, t.from
                    ),
                ));
            }
            transitions.push((from, op, to));
        }
        let mut assertions: BTreeMap<usize, Formula> = BTreeMap::new();
        for (s, f, line) in &rp.asserts {
            for v in f.vars() {
                visible(&v, pi).map_err(|m| semantic(*line, m))?;
            }
            let st = state_of(s, &mut states);
            let entry = assertions.entry(st).or_insert_with(Formula::tt);
            *entry = entry.and(f);
        }
        processes.push(Process {
            name: rp.name.clone(),
            states,
            initial,
            transitions,
            assertions,
        });
    }

    Ok(Program {
        vars,
        processes,
        ops,
    })
}

/// Assignments must map in-domain inputs to in-domain outputs.
fn check_domain_closed(instr: &Instr, vars: &[VarDecl], by_name: &BTreeMap<Var, usize>) -> Result<(), String> {
    match instr {
        Instr::Assign { var, expr } => {
            let target = &vars[by_name[var]].domain;
            let inputs: Vec<Var> = expr.vars().into_iter().collect();
            let mut val = crate::formula::Valuation::new();
            let mut budget = 1_000_000u64;
            check_assign(expr, var, target, &inputs, 0, &mut val, vars, by_name, &mut budget)
        }
        Instr::Lock(x) => {
            let d = &vars[by_name[x]].domain;
            if d.contains(&0) && d.contains(&1) {
                Ok(())
            } else {
                Err(format!("lock variable `{x}` needs 0 and 1 in its domain"))
            }
        }
        Instr::Seq(is) => is.iter().try_for_each(|i| check_domain_closed(i, vars, by_name)),
        _ => Ok(()),
    }
}

#[allow(clippy::too_many_arguments)]
fn check_assign(
    expr: &IntExpr,
    target: &Var,
    dom: &[i64],
    inputs: &[Var],
    i: usize,
    val: &mut crate::formula::Valuation,
    vars: &[VarDecl],
    by_name: &BTreeMap<Var, usize>,
    budget: &mut u64,
) -> Result<(), String> {
    if i == inputs.len() {
        if *budget == 0 {
            return Ok(());
        }
        *budget -= 1;
        let v = expr.eval(val).expect("all inputs bound");
        if !dom.contains(&v) {
            let at: Vec<String> = val.iter().map(|(k, x)| format!("{k}={x}")).collect();
            return Err(format!(
                "`{target} := {expr}` leaves the domain of `{target}` (value {v} when {})",
                if at.is_empty() { "always".to_string() } else { at.join(", ") }
            ));
        }
        return Ok(());
    }
    for &d in &vars[by_name[&inputs[i]]].domain {
        val.insert(inputs[i].clone(), d);
        check_assign(expr, target, dom, inputs, i + 1, val, vars, by_name, budget)?;
    }
    Ok(())
}
