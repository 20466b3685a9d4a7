use std::fmt::Write;

use super::Unit;
use crate::model::{BuchiSpec, Label, LinSys, Ranking, SymbolicSystem};

/// Canonical text of a unit; parsing it yields the same abstract unit.
pub fn print(unit: &Unit) -> String {
    let mut out = String::new();
    if let Some(sys) = &unit.system {
        print_system(&mut out, sys);
        out.push('\n');
    }
    print_automaton(&mut out, &unit.spec);
    out.push('\n');
    print_ranking(&mut out, &unit.spec, &unit.ranking);
    out
}

/// The public part of a unit: automaton and ranking only.
pub fn print_certificate(spec: &BuchiSpec, ranking: &Ranking) -> String {
    let mut out = String::new();
    print_automaton(&mut out, spec);
    out.push('\n');
    print_ranking(&mut out, spec, ranking);
    out
}

fn var_name(names: &[String], col: usize) -> String {
    let n = names.len();
    if col < n {
        names[col].clone()
    } else {
        format!("{}'", names[col - n])
    }
}

fn affine(names: &[String], coeffs: &[i64], constant: Option<i64>) -> String {
    let mut s = String::new();
    for (col, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let name = var_name(names, col);
        let mag = c.unsigned_abs();
        let body = if mag == 1 { name } else { format!("{mag}*{name}") };
        if s.is_empty() {
            if c < 0 {
                s.push('-');
            }
        } else {
            s.push_str(if c < 0 { " - " } else { " + " });
        }
        s.push_str(&body);
    }
    match constant {
        Some(k) if k != 0 || s.is_empty() => {
            if s.is_empty() {
                s = k.to_string();
            } else {
                let _ = write!(s, " {} {}", if k < 0 { '-' } else { '+' }, k.unsigned_abs());
            }
        }
        _ => {
            if s.is_empty() {
                s.push('0');
            }
        }
    }
    s
}

/// Rows as comma-separated constraints, folding opposing row pairs into `=`.
fn constraints(names: &[String], sys: &LinSys, range: std::ops::Range<usize>) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = range.start;
    while i < range.end {
        let (row, b) = (&sys.rows[i], sys.rhs[i]);
        let paired = i + 1 < range.end
            && sys.rhs[i + 1] == -b
            && sys.rows[i + 1].iter().zip(row).all(|(x, y)| *x == -*y);
        let op = if paired { "=" } else { "<=" };
        out.push(format!("{} {op} {b}", affine(names, row, None)));
        i += if paired { 2 } else { 1 };
    }
    out
}

fn linsys(names: &[String], sys: &LinSys) -> String {
    if sys.is_empty() {
        "true".into()
    } else {
        constraints(names, sys, 0..sys.len()).join(", ")
    }
}

fn print_system(out: &mut String, sys: &SymbolicSystem) {
    let names = sys.var_names();
    let n = names.len();
    out.push_str("system {\n");
    for v in &sys.vars {
        let _ = writeln!(out, "  var {} in [{}, {}];", v.name, v.lo, v.hi);
    }
    let _ = writeln!(out, "  init: {};", linsys(&names, &sys.init));
    for cmd in &sys.commands {
        let rel = &cmd.relation;
        let guard_len = rel.rows.iter().take_while(|r| r[n..].iter().all(|&v| v == 0)).count();
        let guard = if guard_len == 0 {
            "true".to_string()
        } else {
            constraints(&names, rel, 0..guard_len).join(", ")
        };
        let mut items = constraints(&names, rel, guard_len..rel.len());
        for k in 0..n {
            if rel.rows.iter().all(|r| r[n + k] == 0) {
                items.push(format!("havoc {}", names[k]));
            }
        }
        let update = if items.is_empty() { "skip".to_string() } else { items.join(", ") };
        let _ = writeln!(out, "  command {}: guard {} update {};", cmd.name, guard, update);
    }
    out.push_str("}\n");
}

fn print_automaton(out: &mut String, spec: &BuchiSpec) {
    out.push_str("automaton {\n");
    if !spec.vars.is_empty() {
        let _ = writeln!(out, "  vars: {};", spec.vars.join(", "));
    }
    let _ = writeln!(out, "  states: {};", spec.states.join(", "));
    let init: Vec<&str> = spec.init.iter().map(|&q| spec.states[q].as_str()).collect();
    let _ = writeln!(out, "  init: {};", init.join(", "));
    let props: Vec<String> = spec
        .props
        .iter()
        .map(|p| match &p.predicate {
            Some((row, b)) => format!("{} := {} <= {}", p.name, affine(&spec.vars, row, None), b),
            None => p.name.clone(),
        })
        .collect();
    let _ = writeln!(out, "  aps: {};", props.join(", "));
    out.push_str("  trans:\n");
    for e in &spec.edges {
        let label = match e.label {
            Label::True => "true".to_string(),
            Label::Exactly(l) => {
                let names: Vec<&str> = l.indices().map(|i| spec.props[i].name.as_str()).collect();
                format!("{{{}}}", names.join(", "))
            }
        };
        let fair = if e.fair { " fair" } else { "" };
        let _ = writeln!(out, "    {} -- {} --> {}{};", spec.states[e.from], label, spec.states[e.to], fair);
    }
    out.push_str("}\n");
}

fn print_ranking(out: &mut String, spec: &BuchiSpec, ranking: &Ranking) {
    out.push_str("ranking {\n");
    match ranking {
        Ranking::Piecewise(rk) => {
            for (q, at) in rk.cases.iter().enumerate() {
                let _ = writeln!(out, "  at {}:", spec.states[q]);
                for c in &at.finite {
                    let value = affine(&spec.vars, &c.weights, Some(c.offset));
                    let _ = writeln!(out, "    case {} => {};", linsys(&spec.vars, &c.guard), value);
                }
                for r in &at.infinite {
                    let _ = writeln!(out, "    inf {};", linsys(&spec.vars, r));
                }
            }
        }
        Ranking::Table(t) => {
            for q in 0..spec.num_states() {
                let values: Vec<String> = t.table.iter().map(|row| row[q].to_string()).collect();
                let _ = writeln!(out, "  at {}:", spec.states[q]);
                let _ = writeln!(out, "    table [{}];", values.join(", "));
            }
        }
    }
    out.push_str("}\n");
}
