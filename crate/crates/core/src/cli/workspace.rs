//! Line-oriented workspace files.
//!
//! ```text
//! domain A 2
//! relation Ne 2 A
//! 0 1
//! 1 0
//!
//! function And 2 A A
//! 0 0 0 1
//! constraint NeNe Ne Ne
//! scheme comp target 2 indet v
//! map t0 v
//! map v t1
//! labels L p q
//! class K A A 2 And
//! ```
//!
//! A relation block ends at a blank line, at the end of input, or at the next
//! line that does not start with an integer. Function tables may span lines.
//! `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::clones::LabelSet;
use crate::error::{Error, Result};
use crate::minors::{is_target_token, MinorScheme, SchemeEntry};
use crate::model::{is_identifier, Constraint, FiniteDomain, FiniteFunction, Relation};
use crate::substitution::FunctionClass;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintBinding {
    pub antecedent: String,
    pub consequent: String,
    pub constraint: Constraint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassBinding {
    pub members: Vec<String>,
    pub class: FunctionClass,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Workspace {
    pub domains: BTreeMap<String, FiniteDomain>,
    pub relations: BTreeMap<String, Relation>,
    pub functions: BTreeMap<String, FiniteFunction>,
    pub constraints: BTreeMap<String, ConstraintBinding>,
    pub schemes: BTreeMap<String, MinorScheme>,
    pub labels: BTreeMap<String, LabelSet>,
    pub classes: BTreeMap<String, ClassBinding>,
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn int(&self) -> Result<usize> {
        self.text
            .parse()
            .map_err(|_| self.error(format!("expected a non-negative integer, found `{}`", self.text)))
    }

    fn name(&self) -> Result<&str> {
        if is_identifier(self.text) {
            Ok(self.text)
        } else {
            Err(self.error(format!("`{}` is not a valid name", self.text)))
        }
    }

    /// Attaches this token's position to a semantic error.
    fn locate(&self, e: Error) -> Error {
        match e {
            Error::Parse { .. } => e,
            other => self.error(other.to_string()),
        }
    }
}

struct Line<'a> {
    tokens: Vec<Token<'a>>,
    number: usize,
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("");
            let mut tokens = Vec::new();
            let mut start = None;
            for (pos, ch) in content.char_indices().chain([(content.len(), ' ')]) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(pos),
                    (true, Some(s)) => {
                        tokens.push(Token {
                            text: &content[s..pos],
                            line: i + 1,
                            column: content[..s].chars().count() + 1,
                        });
                        start = None;
                    }
                    _ => {}
                }
            }
            Line { tokens, number: i + 1 }
        })
        .collect()
}

fn is_integer(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn expect_len(line: &Line<'_>, min: usize, usage: &str) -> Result<()> {
    if line.tokens.len() < min {
        let last = line.tokens.last().unwrap();
        return Err(Error::Parse {
            line: line.number,
            column: last.column + last.text.len(),
            message: format!("expected `{usage}`"),
        });
    }
    Ok(())
}

fn expect_exact(line: &Line<'_>, n: usize, usage: &str) -> Result<()> {
    expect_len(line, n, usage)?;
    if let Some(extra) = line.tokens.get(n) {
        return Err(extra.error(format!("unexpected `{}`; expected `{usage}`", extra.text)));
    }
    Ok(())
}

impl Workspace {
    pub fn new() -> Self {
        Workspace::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut w = Workspace::new();
        w.extend_from_text(text)?;
        Ok(w)
    }

    /// Adds the declarations of `text`; names may refer to earlier bindings.
    pub fn extend_from_text(&mut self, text: &str) -> Result<()> {
        let lines = tokenize(text);
        let mut i = 0;
        while i < lines.len() {
            let line = &lines[i];
            i += 1;
            let Some(head) = line.tokens.first() else { continue };
            match head.text {
                "domain" => self.parse_domain(line)?,
                "relation" => i = self.parse_relation(&lines, i - 1)?,
                "function" => i = self.parse_function(&lines, i - 1)?,
                "constraint" => self.parse_constraint(line)?,
                "scheme" => i = self.parse_scheme(&lines, i - 1)?,
                "labels" => self.parse_labels(line)?,
                "class" => self.parse_class(line)?,
                other => return Err(head.error(format!("unknown declaration `{other}`"))),
            }
        }
        Ok(())
    }

    fn fresh<T>(map: &BTreeMap<String, T>, kind: &'static str, tok: &Token<'_>) -> Result<String> {
        let name = tok.name()?;
        if map.contains_key(name) {
            return Err(tok.locate(Error::Duplicate {
                kind,
                name: name.to_string(),
            }));
        }
        Ok(name.to_string())
    }

    fn domain_ref(&self, tok: &Token<'_>) -> Result<FiniteDomain> {
        self.domains.get(tok.text).cloned().ok_or_else(|| {
            tok.locate(Error::Unknown {
                kind: "domain",
                name: tok.text.to_string(),
            })
        })
    }

    fn relation_ref(&self, tok: &Token<'_>) -> Result<Relation> {
        self.relations.get(tok.text).cloned().ok_or_else(|| {
            tok.locate(Error::Unknown {
                kind: "relation",
                name: tok.text.to_string(),
            })
        })
    }

    fn parse_domain(&mut self, line: &Line<'_>) -> Result<()> {
        expect_exact(line, 3, "domain <name> <size>")?;
        let t = &line.tokens;
        let name = Self::fresh(&self.domains, "domain", &t[1])?;
        let size = t[2].int()?;
        let d = FiniteDomain::new(name.clone(), size).map_err(|e| t[2].locate(e))?;
        self.domains.insert(name, d);
        Ok(())
    }

    fn parse_relation(&mut self, lines: &[Line<'_>], at: usize) -> Result<usize> {
        let line = &lines[at];
        expect_exact(line, 4, "relation <name> <arity> <domain>")?;
        let t = &line.tokens;
        let name = Self::fresh(&self.relations, "relation", &t[1])?;
        let arity = t[2].int()?;
        let d = self.domain_ref(&t[3])?;
        let mut r = Relation::empty(&d, arity).map_err(|e| t[2].locate(e))?;
        let mut i = at + 1;
        while let Some(row) = lines.get(i) {
            let Some(first) = row.tokens.first() else { break };
            if !is_integer(first.text) {
                break;
            }
            if row.tokens.len() != arity {
                return Err(first.locate(Error::arity(
                    format!("tuple of relation `{name}`"),
                    arity,
                    row.tokens.len(),
                )));
            }
            let tuple = row.tokens.iter().map(Token::int).collect::<Result<Vec<_>>>()?;
            for (tok, &e) in row.tokens.iter().zip(&tuple) {
                d.check_element(e).map_err(|err| tok.locate(err))?;
            }
            r = r
                .union(&Relation::from_tuples(&d, arity, [tuple]).map_err(|e| first.locate(e))?)
                .map_err(|e| first.locate(e))?;
            i += 1;
        }
        self.relations.insert(name, r);
        Ok(i)
    }

    fn parse_function(&mut self, lines: &[Line<'_>], at: usize) -> Result<usize> {
        let line = &lines[at];
        expect_exact(line, 5, "function <name> <arity> <input> <output>")?;
        let t = &line.tokens;
        let name = Self::fresh(&self.functions, "function", &t[1])?;
        let arity = t[2].int()?;
        let (a, b) = (self.domain_ref(&t[3])?, self.domain_ref(&t[4])?);
        let positions = a.power(arity).map_err(|e| t[2].locate(e))?;
        let mut table = Vec::with_capacity(positions);
        let mut i = at + 1;
        while table.len() < positions {
            let Some(row) = lines.get(i) else {
                return Err(t[1].error(format!(
                    "function `{name}` needs {positions} table values, found {}",
                    table.len()
                )));
            };
            if let Some(first) = row.tokens.first() {
                if !is_integer(first.text) {
                    return Err(first.error(format!(
                        "function `{name}` needs {positions} table values, found {}",
                        table.len()
                    )));
                }
            }
            for tok in &row.tokens {
                if table.len() == positions {
                    return Err(tok.error(format!("function `{name}` has more than {positions} table values")));
                }
                let v = tok.int()?;
                b.check_element(v).map_err(|e| tok.locate(e))?;
                table.push(v);
            }
            i += 1;
        }
        let f = FiniteFunction::new(arity, &a, &b, table).map_err(|e| t[1].locate(e))?;
        self.functions.insert(name, f);
        Ok(i)
    }

    fn parse_constraint(&mut self, line: &Line<'_>) -> Result<()> {
        expect_exact(line, 4, "constraint <name> <antecedent> <consequent>")?;
        let t = &line.tokens;
        let name = Self::fresh(&self.constraints, "constraint", &t[1])?;
        let r = self.relation_ref(&t[2])?;
        let s = self.relation_ref(&t[3])?;
        let constraint = Constraint::new(r, s).map_err(|e| t[3].locate(e))?;
        self.constraints.insert(
            name,
            ConstraintBinding {
                antecedent: t[2].text.to_string(),
                consequent: t[3].text.to_string(),
                constraint,
            },
        );
        Ok(())
    }

    fn parse_scheme(&mut self, lines: &[Line<'_>], at: usize) -> Result<usize> {
        let line = &lines[at];
        let usage = "scheme <name> target <m> [indet <v>...]";
        expect_len(line, 4, usage)?;
        let t = &line.tokens;
        let name = Self::fresh(&self.schemes, "scheme", &t[1])?;
        if t[2].text != "target" {
            return Err(t[2].error(format!("expected `target`, found `{}`", t[2].text)));
        }
        let target = t[3].int()?;
        let mut indeterminates = Vec::new();
        if let Some(kw) = t.get(4) {
            if kw.text != "indet" {
                return Err(kw.error(format!("expected `indet`, found `{}`", kw.text)));
            }
            indeterminates = t[5..].iter().map(|tok| tok.text.to_string()).collect();
        }
        let mut maps = Vec::new();
        let mut i = at + 1;
        while let Some(row) = lines.get(i) {
            match row.tokens.first() {
                Some(first) if first.text == "map" => {
                    expect_len(row, 2, "map <entry>...")?;
                    let entries = row.tokens[1..]
                        .iter()
                        .map(|tok| {
                            if is_target_token(tok.text) {
                                tok.text[1..]
                                    .parse()
                                    .map(SchemeEntry::Target)
                                    .map_err(|_| tok.error("bad target index"))
                            } else {
                                Ok(SchemeEntry::Indeterminate(tok.text.to_string()))
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    maps.push(entries);
                    i += 1;
                }
                _ => break,
            }
        }
        let h = MinorScheme::new(target, indeterminates, maps).map_err(|e| t[1].locate(e))?;
        self.schemes.insert(name, h);
        Ok(i)
    }

    fn parse_labels(&mut self, line: &Line<'_>) -> Result<()> {
        expect_len(line, 3, "labels <name> <label>...")?;
        let t = &line.tokens;
        let name = Self::fresh(&self.labels, "label set", &t[1])?;
        let set = LabelSet::new(t[2..].iter().map(|tok| tok.text)).map_err(|e| t[1].locate(e))?;
        self.labels.insert(name, set);
        Ok(())
    }

    fn parse_class(&mut self, line: &Line<'_>) -> Result<()> {
        expect_len(line, 5, "class <name> <input> <output> <bound> <function>...")?;
        let t = &line.tokens;
        let name = Self::fresh(&self.classes, "class", &t[1])?;
        let (a, b) = (self.domain_ref(&t[2])?, self.domain_ref(&t[3])?);
        let bound = t[4].int()?;
        let mut members = Vec::new();
        let mut fs = Vec::new();
        for tok in &t[5..] {
            let f = self.functions.get(tok.text).ok_or_else(|| {
                tok.locate(Error::Unknown {
                    kind: "function",
                    name: tok.text.to_string(),
                })
            })?;
            members.push(tok.text.to_string());
            fs.push(f.clone());
        }
        let class = FunctionClass::new(&a, &b, bound, fs).map_err(|e| t[1].locate(e))?;
        self.classes.insert(name, ClassBinding { members, class });
        Ok(())
    }

    /// Canonical text: kinds in a fixed order, names sorted within each kind.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for d in self.domains.values() {
            let _ = writeln!(out, "domain {} {}", d.name(), d.size());
        }
        for (name, r) in &self.relations {
            out.push_str(&relation_block(name, r));
            out.push('\n');
        }
        for (name, f) in &self.functions {
            out.push_str(&function_block(name, f));
        }
        for (name, c) in &self.constraints {
            let _ = writeln!(out, "constraint {name} {} {}", c.antecedent, c.consequent);
        }
        for (name, h) in &self.schemes {
            out.push_str(&scheme_block(name, h));
        }
        for (name, l) in &self.labels {
            let _ = writeln!(out, "labels {name} {}", l.labels().join(" "));
        }
        for (name, k) in &self.classes {
            let _ = write!(
                out,
                "class {name} {} {} {}",
                k.class.input().name(),
                k.class.output().name(),
                k.class.arity_bound()
            );
            for m in &k.members {
                let _ = write!(out, " {m}");
            }
            out.push('\n');
        }
        out
    }

    /// Moves every binding of `other` into `self`, rejecting clashing names.
    pub fn merge(&mut self, other: Workspace) -> Result<()> {
        fn move_all<T>(into: &mut BTreeMap<String, T>, from: BTreeMap<String, T>, kind: &'static str) -> Result<()> {
            for (k, v) in from {
                if into.contains_key(&k) {
                    return Err(Error::Duplicate { kind, name: k });
                }
                into.insert(k, v);
            }
            Ok(())
        }
        move_all(&mut self.domains, other.domains, "domain")?;
        move_all(&mut self.relations, other.relations, "relation")?;
        move_all(&mut self.functions, other.functions, "function")?;
        move_all(&mut self.constraints, other.constraints, "constraint")?;
        move_all(&mut self.schemes, other.schemes, "scheme")?;
        move_all(&mut self.labels, other.labels, "label set")?;
        move_all(&mut self.classes, other.classes, "class")
    }
}

/// `relation <name> <arity> <domain>` followed by one tuple per line.
pub fn relation_block(name: &str, r: &Relation) -> String {
    let mut out = format!("relation {name} {} {}\n", r.arity(), r.domain().name());
    for t in r.tuples() {
        out.push_str(&join(&t));
        out.push('\n');
    }
    out
}

pub fn function_block(name: &str, f: &FiniteFunction) -> String {
    format!(
        "function {name} {} {} {}\n{}\n",
        f.arity(),
        f.input().name(),
        f.output().name(),
        join(f.table())
    )
}

pub fn scheme_block(name: &str, h: &MinorScheme) -> String {
    let mut out = format!("scheme {name} target {}", h.target());
    if !h.indeterminates().is_empty() {
        let _ = write!(out, " indet {}", h.indeterminates().join(" "));
    }
    out.push('\n');
    for map in h.maps() {
        let entries: Vec<String> = map.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "map {}", entries.join(" "));
    }
    out
}

pub(crate) fn join(values: &[usize]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}
