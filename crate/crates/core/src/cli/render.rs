//! Text and JSON renderings of results. Text renderings of objects are
//! workspace declarations, so command output can be fed back as input.

use serde_json::{json, Value};

use super::workspace::{function_block, join, relation_block, scheme_block};
use crate::galois::ConstraintSet;
use crate::minors::MinorScheme;
use crate::model::{Constraint, FiniteDomain, FiniteFunction, Relation};
use crate::substitution::FunctionClass;

pub fn domain_json(d: &FiniteDomain) -> Value {
    json!({ "name": d.name(), "size": d.size() })
}

pub fn relation_json(r: &Relation) -> Value {
    json!({
        "arity": r.arity(),
        "domain": domain_json(r.domain()),
        "tuples": r.tuples().collect::<Vec<_>>(),
    })
}

pub fn function_json(f: &FiniteFunction) -> Value {
    json!({
        "arity": f.arity(),
        "input": domain_json(f.input()),
        "output": domain_json(f.output()),
        "table": f.table(),
    })
}

pub fn constraint_json(c: &Constraint) -> Value {
    json!({
        "arity": c.arity(),
        "antecedent": relation_json(c.antecedent()),
        "consequent": relation_json(c.consequent()),
    })
}

pub fn scheme_json(h: &MinorScheme) -> Value {
    let maps: Vec<Vec<String>> = h
        .maps()
        .iter()
        .map(|m| m.iter().map(ToString::to_string).collect())
        .collect();
    json!({ "target": h.target(), "indeterminates": h.indeterminates(), "maps": maps })
}

pub fn class_json(k: &FunctionClass) -> Value {
    json!({
        "input": domain_json(k.input()),
        "output": domain_json(k.output()),
        "arity_bound": k.arity_bound(),
        "members": k.members().map(function_json).collect::<Vec<_>>(),
    })
}

pub fn constraint_set_json(t: &ConstraintSet) -> Value {
    json!({
        "source": domain_json(t.source()),
        "target": domain_json(t.target()),
        "arity_bound": t.arity_bound(),
        "members": t.members().map(constraint_json).collect::<Vec<_>>(),
    })
}

pub fn relation_text(role: &str, r: &Relation) -> String {
    relation_block(role, r)
}

pub fn function_text(role: &str, f: &FiniteFunction) -> String {
    function_block(role, f)
}

pub fn scheme_text(role: &str, h: &MinorScheme) -> String {
    scheme_block(role, h)
}

/// Two relation blocks and the `constraint` line binding them.
pub fn constraint_text(role: &str, c: &Constraint) -> String {
    format!(
        "{}\n{}\nconstraint {role} {role}.antecedent {role}.consequent\n",
        relation_block(&format!("{role}.antecedent"), c.antecedent()),
        relation_block(&format!("{role}.consequent"), c.consequent()),
    )
}

/// Member function blocks `role.0, role.1, ...` and the `class` line.
pub fn class_text(role: &str, k: &FunctionClass) -> String {
    let mut out = String::new();
    let mut names = Vec::new();
    for (i, f) in k.members().enumerate() {
        let name = format!("{role}.{i}");
        out.push_str(&function_block(&name, f));
        names.push(name);
    }
    out.push_str(&format!(
        "class {role} {} {} {}",
        k.input().name(),
        k.output().name(),
        k.arity_bound()
    ));
    for n in names {
        out.push(' ');
        out.push_str(&n);
    }
    out.push('\n');
    out
}

/// `{(0,1),(1,0)}`.
pub fn compact_relation(r: &Relation) -> String {
    let tuples: Vec<String> = r
        .tuples()
        .map(|t| format!("({})", t.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("{{{}}}", tuples.join(","))
}

pub fn compact_constraint(c: &Constraint) -> String {
    format!(
        "({}, {})",
        compact_relation(c.antecedent()),
        compact_relation(c.consequent())
    )
}

/// `arity:table`, e.g. `2:0 1 1 1`.
pub fn compact_function(f: &FiniteFunction) -> String {
    format!("{}:{}", f.arity(), join(f.table()))
}
