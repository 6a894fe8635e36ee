//! Minor formation schemes and conjunctive minors.
//!
//! A scheme with target `m` and indeterminates `V` is a non-empty family of
//! maps `h_j : n_j -> m ⊎ V`. A target tuple `a` together with a Skolem map
//! `σ : V -> A` yields the `n_j`-tuple `(a + σ) h_j`; the tight conjunctive
//! minor of a relation family `(R_j)` collects exactly the `a` for which one
//! `σ` puts every `(a + σ) h_j` into `R_j`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{check_arity, is_identifier, unrank, Constraint, Element, FiniteDomain, Relation, Tuple};

/// One position of a scheme map: a target coordinate or an indeterminate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeEntry {
    Target(usize),
    Indeterminate(String),
}

impl SchemeEntry {
    pub fn var(name: impl Into<String>) -> Self {
        SchemeEntry::Indeterminate(name.into())
    }
}

impl fmt::Display for SchemeEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeEntry::Target(i) => write!(f, "t{i}"),
            SchemeEntry::Indeterminate(v) => f.write_str(v),
        }
    }
}

/// Indeterminate names use identifier characters, may start with a digit
/// (composite names look like `0.w`), and are neither integers nor `t<i>`.
pub fn is_indeterminate_name(s: &str) -> bool {
    let renamed = s
        .split_once('.')
        .is_some_and(|(j, w)| !j.is_empty() && j.bytes().all(|b| b.is_ascii_digit()) && is_indeterminate_name(w));
    (renamed || is_identifier(s)) && !is_target_token(s)
}

pub(crate) fn is_target_token(s: &str) -> bool {
    s.len() > 1 && s.starts_with('t') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

/// A minor formation scheme `H = (h_j)_{j ∈ J}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MinorScheme {
    target: usize,
    indeterminates: Vec<String>,
    maps: Vec<Vec<SchemeEntry>>,
}

impl MinorScheme {
    pub fn new(target: usize, indeterminates: Vec<String>, maps: Vec<Vec<SchemeEntry>>) -> Result<Self> {
        check_arity(target, "scheme target")?;
        if maps.is_empty() {
            return Err(Error::Invalid("a scheme needs a non-empty family of maps".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &indeterminates {
            if !is_indeterminate_name(v) {
                return Err(Error::Invalid(format!("`{v}` is not a valid indeterminate name")));
            }
            if !seen.insert(v.as_str()) {
                return Err(Error::Duplicate {
                    kind: "indeterminate",
                    name: v.clone(),
                });
            }
        }
        for h in &maps {
            check_arity(h.len(), "scheme map source")?;
            for e in h {
                match e {
                    SchemeEntry::Target(i) if *i >= target => {
                        return Err(Error::Invalid(format!(
                            "target index t{i} is not below the scheme target {target}"
                        )))
                    }
                    SchemeEntry::Indeterminate(v) if !seen.contains(v.as_str()) => {
                        return Err(Error::Unknown {
                            kind: "indeterminate",
                            name: v.clone(),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(MinorScheme {
            target,
            indeterminates,
            maps,
        })
    }

    /// The scheme with the single map `(t0, .., t_{m-1})`.
    pub fn identity(m: usize) -> Result<Self> {
        MinorScheme::new(m, vec![], vec![(0..m).map(SchemeEntry::Target).collect()])
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn indeterminates(&self) -> &[String] {
        &self.indeterminates
    }

    pub fn maps(&self) -> &[Vec<SchemeEntry>] {
        &self.maps
    }

    /// The source arities `(n_j)`.
    pub fn sources(&self) -> Vec<usize> {
        self.maps.iter().map(Vec::len).collect()
    }

    /// Indeterminates occurring in some map, in the order of `V`.
    pub fn used_indeterminates(&self) -> Vec<&str> {
        let used: BTreeSet<&str> = self
            .maps
            .iter()
            .flatten()
            .filter_map(|e| match e {
                SchemeEntry::Indeterminate(v) => Some(v.as_str()),
                SchemeEntry::Target(_) => None,
            })
            .collect();
        self.indeterminates
            .iter()
            .map(String::as_str)
            .filter(|v| used.contains(v))
            .collect()
    }
}

/// An assignment `σ : V -> A`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SkolemMap {
    assignment: BTreeMap<String, Element>,
}

impl SkolemMap {
    pub fn new<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Element)>,
        S: Into<String>,
    {
        SkolemMap {
            assignment: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    pub fn get(&self, v: &str) -> Option<Element> {
        self.assignment.get(v).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<String, Element> {
        &self.assignment
    }
}

/// `(a + σ) h`.
pub fn scheme_apply(a: &[Element], sigma: &SkolemMap, h: &[SchemeEntry]) -> Result<Tuple> {
    h.iter()
        .map(|e| match e {
            SchemeEntry::Target(i) => a
                .get(*i)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("target index t{i} outside a {}-tuple", a.len()))),
            SchemeEntry::Indeterminate(v) => sigma.get(v).ok_or_else(|| Error::Unknown {
                kind: "Skolem assignment for indeterminate",
                name: v.clone(),
            }),
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Slot {
    Target(usize),
    Var(usize),
}

/// A scheme bound to a relation family, with indeterminates renumbered to the
/// ones actually used and each map scheduled at the search depth where its
/// last indeterminate gets a value.
struct Compiled<'a> {
    rels: &'a [Relation],
    maps: Vec<Vec<Slot>>,
    vars: Vec<String>,
    ready: Vec<Vec<usize>>,
    base: usize,
}

impl<'a> Compiled<'a> {
    fn new(h: &MinorScheme, rels: &'a [Relation]) -> Result<(Self, FiniteDomain)> {
        if rels.len() != h.maps.len() {
            return Err(Error::arity("relation family size", h.maps.len(), rels.len()));
        }
        let domain = rels[0].domain().clone();
        for (j, (map, r)) in h.maps.iter().zip(rels).enumerate() {
            domain.expect_same(r.domain(), "relation family")?;
            if r.arity() != map.len() {
                return Err(Error::arity(
                    format!("relation {j} of the family"),
                    map.len(),
                    r.arity(),
                ));
            }
        }
        let vars: Vec<String> = h.used_indeterminates().into_iter().map(str::to_owned).collect();
        let index: BTreeMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut ready = vec![Vec::new(); vars.len() + 1];
        let maps = h
            .maps
            .iter()
            .enumerate()
            .map(|(j, map)| {
                let slots: Vec<Slot> = map
                    .iter()
                    .map(|e| match e {
                        SchemeEntry::Target(i) => Slot::Target(*i),
                        SchemeEntry::Indeterminate(v) => Slot::Var(index[v.as_str()]),
                    })
                    .collect();
                let level = slots
                    .iter()
                    .filter_map(|s| match s {
                        Slot::Var(k) => Some(k + 1),
                        Slot::Target(_) => None,
                    })
                    .max()
                    .unwrap_or(0);
                ready[level].push(j);
                slots
            })
            .collect();
        Ok((
            Compiled {
                rels,
                maps,
                vars,
                ready,
                base: domain.size(),
            },
            domain,
        ))
    }

    fn point(&self, j: usize, a: &[Element], sigma: &[Element]) -> usize {
        self.maps[j].iter().fold(0, |acc, s| {
            acc * self.base
                + match *s {
                    Slot::Target(i) => a[i],
                    Slot::Var(k) => sigma[k],
                }
        })
    }

    /// Lexicographically least witness over the used indeterminates.
    fn witness(&self, a: &[Element]) -> Option<Vec<Element>> {
        let mut sigma = vec![0; self.vars.len()];
        self.extend(a, &mut sigma, 0).then_some(sigma)
    }

    fn extend(&self, a: &[Element], sigma: &mut [Element], level: usize) -> bool {
        for &j in &self.ready[level] {
            if !self.rels[j].contains_point(self.point(j, a, sigma)) {
                return false;
            }
        }
        if level == self.vars.len() {
            return true;
        }
        for v in 0..self.base {
            sigma[level] = v;
            if self.extend(a, sigma, level + 1) {
                return true;
            }
        }
        false
    }
}

/// The unique tight conjunctive minor of `rels` via `h`.
///
/// Only indeterminates that occur in some map are searched; the others can
/// take any value because domains are non-empty.
pub fn tight_minor_relations(h: &MinorScheme, rels: &[Relation]) -> Result<Relation> {
    let (compiled, domain) = Compiled::new(h, rels)?;
    let m = h.target;
    let space = domain.power(m)?;
    let size = domain.size();
    let points: Vec<usize> = (0..space)
        .into_par_iter()
        .filter(|&p| compiled.witness(&unrank(p, m, size)).is_some())
        .collect();
    Relation::from_points(&domain, m, points)
}

/// The least Skolem map witnessing `a` in the tight minor, if any. Unused
/// indeterminates are mapped to 0.
pub fn find_skolem_map(h: &MinorScheme, rels: &[Relation], a: &[Element]) -> Result<Option<SkolemMap>> {
    let (compiled, domain) = Compiled::new(h, rels)?;
    if a.len() != h.target {
        return Err(Error::arity("target tuple", h.target, a.len()));
    }
    domain.check_tuple(a)?;
    Ok(compiled.witness(a).map(|sigma| {
        let used: BTreeMap<&str, Element> = compiled.vars.iter().map(String::as_str).zip(sigma).collect();
        SkolemMap::new(
            h.indeterminates
                .iter()
                .map(|v| (v.clone(), used.get(v.as_str()).copied().unwrap_or(0))),
        )
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MinorKind {
    Tight,
    Restrictive,
    Extensive,
    Neither,
}

impl MinorKind {
    pub fn is_restrictive(self) -> bool {
        matches!(self, MinorKind::Tight | MinorKind::Restrictive)
    }

    pub fn is_extensive(self) -> bool {
        matches!(self, MinorKind::Tight | MinorKind::Extensive)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MinorKind::Tight => "tight",
            MinorKind::Restrictive => "restrictive",
            MinorKind::Extensive => "extensive",
            MinorKind::Neither => "neither",
        }
    }
}

/// Compares `r` with the tight minor `T` of `rels` via `h`.
pub fn minor_classification(r: &Relation, h: &MinorScheme, rels: &[Relation]) -> Result<MinorKind> {
    if r.arity() != h.target {
        return Err(Error::arity("classified relation", h.target, r.arity()));
    }
    let t = tight_minor_relations(h, rels)?;
    r.expect_same_shape(&t, "minor classification")?;
    Ok(match (r.is_subset(&t), t.is_subset(r)) {
        (true, true) => MinorKind::Tight,
        (true, false) => MinorKind::Restrictive,
        (false, true) => MinorKind::Extensive,
        (false, false) => MinorKind::Neither,
    })
}

fn split_family(cs: &[Constraint]) -> (Vec<Relation>, Vec<Relation>) {
    cs.iter()
        .map(|c| (c.antecedent().clone(), c.consequent().clone()))
        .unzip()
}

/// The tight conjunctive minor of a constraint family.
pub fn tight_minor_constraint(h: &MinorScheme, cs: &[Constraint]) -> Result<Constraint> {
    if cs.is_empty() {
        return Err(Error::arity("constraint family size", h.maps.len(), 0));
    }
    let (ants, cons) = split_family(cs);
    Constraint::new(tight_minor_relations(h, &ants)?, tight_minor_relations(h, &cons)?)
}

/// `c` is a conjunctive minor of `cs` via `h`: restrictive antecedent and
/// extensive consequent.
pub fn is_conjunctive_minor(c: &Constraint, h: &MinorScheme, cs: &[Constraint]) -> Result<bool> {
    let tight = tight_minor_constraint(h, cs)?;
    c.antecedent()
        .expect_same_shape(tight.antecedent(), "conjunctive minor antecedent")?;
    c.consequent()
        .expect_same_shape(tight.consequent(), "conjunctive minor consequent")?;
    Ok(c.antecedent().is_subset(tight.antecedent()) && c.consequent().is_superset(tight.consequent()))
}

/// The composite scheme `H(H_j : j ∈ J)`.
///
/// Inner indeterminate `w` of `inner[j]` is renamed `j.w` (primed until fresh),
/// and the composite family lists the maps `k_j^i = (h_j + ι) h_j^i` in the
/// order `j` ascending, then `i` ascending.
pub fn compose_schemes(h: &MinorScheme, inner: &[MinorScheme]) -> Result<MinorScheme> {
    if inner.len() != h.maps.len() {
        return Err(Error::arity("inner scheme family", h.maps.len(), inner.len()));
    }
    let mut taken: BTreeSet<String> = h.indeterminates.iter().cloned().collect();
    let mut indeterminates = h.indeterminates.clone();
    let mut maps = Vec::new();
    for (j, (outer, scheme)) in h.maps.iter().zip(inner).enumerate() {
        if scheme.target != outer.len() {
            return Err(Error::arity(
                format!("target of inner scheme {j}"),
                outer.len(),
                scheme.target,
            ));
        }
        let mut rename = BTreeMap::new();
        for w in &scheme.indeterminates {
            let mut fresh = format!("{j}.{w}");
            while taken.contains(&fresh) {
                fresh.push('\'');
            }
            taken.insert(fresh.clone());
            indeterminates.push(fresh.clone());
            rename.insert(w.as_str(), fresh);
        }
        for map in &scheme.maps {
            maps.push(
                map.iter()
                    .map(|e| match e {
                        SchemeEntry::Target(p) => outer[*p].clone(),
                        SchemeEntry::Indeterminate(w) => SchemeEntry::Indeterminate(rename[w.as_str()].clone()),
                    })
                    .collect(),
            );
        }
    }
    // Names like `0.w` are identifiers, so validation only re-checks structure.
    MinorScheme::new(h.target, indeterminates, maps)
}

/// `(R, S)` is a relaxation of `c` when `R ⊆ c.R` and `S ⊇ c.S`.
pub fn is_relaxation(candidate: &Constraint, c: &Constraint) -> bool {
    candidate.antecedent().is_subset(c.antecedent()) && candidate.consequent().is_superset(c.consequent())
}

/// Restricts the antecedent and/or extends the consequent of `c`.
pub fn relax(c: &Constraint, antecedent: Relation, consequent: Relation) -> Result<Constraint> {
    antecedent.expect_same_shape(c.antecedent(), "relaxed antecedent")?;
    consequent.expect_same_shape(c.consequent(), "relaxed consequent")?;
    if !antecedent.is_subset(c.antecedent()) {
        return Err(Error::Precondition(
            "a relaxation may only restrict the antecedent".into(),
        ));
    }
    if !consequent.is_superset(c.consequent()) {
        return Err(Error::Precondition(
            "a relaxation may only extend the consequent".into(),
        ));
    }
    Constraint::new(antecedent, consequent)
}

/// `(R, ∩_j S_j)` from a non-empty family sharing the antecedent `R`.
pub fn intersect_consequents(cs: &[Constraint]) -> Result<Constraint> {
    let (first, rest) = cs
        .split_first()
        .ok_or_else(|| Error::Invalid("intersecting consequents needs a non-empty family".into()))?;
    let mut consequent = first.consequent().clone();
    for c in rest {
        if c.antecedent() != first.antecedent() {
            return Err(Error::Precondition(
                "intersecting consequents needs identical antecedents".into(),
            ));
        }
        consequent = consequent.intersection(c.consequent())?;
    }
    Constraint::new(first.antecedent().clone(), consequent)
}

/// The equality, empty and trivial constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalConstraints {
    pub equality: Constraint,
    pub empty: Constraint,
    pub trivial: Constraint,
}

pub fn equality_constraint(a: &FiniteDomain, b: &FiniteDomain) -> Result<Constraint> {
    Constraint::new(Relation::equality(a)?, Relation::equality(b)?)
}

pub fn empty_constraint(a: &FiniteDomain, b: &FiniteDomain, m: usize) -> Result<Constraint> {
    Constraint::new(Relation::empty(a, m)?, Relation::empty(b, m)?)
}

pub fn trivial_constraint(a: &FiniteDomain, b: &FiniteDomain, m: usize) -> Result<Constraint> {
    Constraint::new(Relation::full(a, m)?, Relation::full(b, m)?)
}

/// Equality is binary regardless of `m`; empty and trivial are `m`-ary.
pub fn canonical_constraints(a: &FiniteDomain, b: &FiniteDomain, m: usize) -> Result<CanonicalConstraints> {
    Ok(CanonicalConstraints {
        equality: equality_constraint(a, b)?,
        empty: empty_constraint(a, b, m)?,
        trivial: trivial_constraint(a, b, m)?,
    })
}

/// The tight minor of a single constraint via the singleton scheme `{h}`.
/// Covers permutation, identification, projection and dummy arguments.
pub fn simple_minor(c0: &Constraint, h: &[SchemeEntry], m: usize, indeterminates: &[String]) -> Result<Constraint> {
    let scheme = MinorScheme::new(m, indeterminates.to_vec(), vec![h.to_vec()])?;
    tight_minor_constraint(&scheme, std::slice::from_ref(c0))
}
