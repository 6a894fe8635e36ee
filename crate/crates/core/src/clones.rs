//! Operations on a single set: composition, clones, `Pol` / `Inv`, general
//! superposition and its decomposition into a tight minor and an equality
//! pattern.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limits::{saturating_pow, Limits};
use crate::minors::{is_target_token, tight_minor_relations, MinorScheme, SchemeEntry};
use crate::model::{is_identifier, rank, unrank, Constraint, Element, FiniteDomain, FiniteFunction, Relation};
use crate::satisfaction::{image_of_relation, preserves};
use crate::search::TableSearch;
use crate::substitution::FunctionClass;

/// `f(g_1, ..., g_n)`.
pub fn compose_functions(f: &FiniteFunction, gs: &[FiniteFunction]) -> Result<FiniteFunction> {
    if gs.len() != f.arity() {
        return Err(Error::arity("composition inner functions", f.arity(), gs.len()));
    }
    let m = gs[0].arity();
    for (i, g) in gs.iter().enumerate() {
        if g.arity() != m {
            return Err(Error::arity(format!("inner function {i}"), m, g.arity()));
        }
        gs[0].input().expect_same(g.input(), "composition inner input")?;
        f.input().expect_same(g.output(), "composition inner output")?;
    }
    let base = f.input().size();
    let positions = gs[0].input().power(m)?;
    let mut inner = vec![0; f.arity()];
    let table = (0..positions)
        .map(|p| {
            for (slot, g) in inner.iter_mut().zip(gs) {
                *slot = g.eval_point(p);
            }
            f.eval_point(rank(&inner, base))
        })
        .collect();
    Ok(FiniteFunction::from_table_unchecked(
        m,
        gs[0].input(),
        f.output(),
        table,
    ))
}

fn expect_operations(f: &FunctionClass) -> Result<()> {
    if f.input() != f.output() {
        return Err(Error::DomainMismatch(format!(
            "expected operations, got maps from `{}` to `{}`",
            f.input(),
            f.output()
        )));
    }
    Ok(())
}

pub(crate) fn projections(domain: &FiniteDomain, arity_bound: usize) -> Result<Vec<FiniteFunction>> {
    let mut out = Vec::new();
    for n in 1..=arity_bound {
        for i in 0..n {
            out.push(FiniteFunction::projection(domain, n, i)?);
        }
    }
    Ok(out)
}

/// The least class of arity at most `arity_bound` containing `F` and all
/// projections and closed under composition. Every round recomputes all
/// compositions of members with members until nothing new appears.
pub fn clone_generate(f: &FunctionClass, arity_bound: usize, limits: &Limits) -> Result<FunctionClass> {
    expect_operations(f)?;
    let a = f.input();
    for m in 1..=arity_bound {
        limits.check_table(a.power(m)?, a.size(), "clone generation")?;
    }
    let bound = arity_bound.max(f.arity_bound());
    let mut clone = FunctionClass::new(a, a, bound, f.members().cloned())?;
    for p in projections(a, arity_bound)? {
        clone.insert(p)?;
    }
    loop {
        let by_arity: Vec<Vec<FiniteFunction>> = (0..=arity_bound)
            .map(|m| clone.of_arity(m).cloned().collect())
            .collect();
        let outer: Vec<FiniteFunction> = clone.members().cloned().collect();
        let work: u128 = outer
            .iter()
            .flat_map(|g| by_arity[1..].iter().map(move |c| saturating_pow(c.len(), g.arity())))
            .fold(0u128, |acc, x| acc.saturating_add(x));
        limits.check_candidates(work, "clone generation round")?;
        let fresh: Vec<FiniteFunction> = outer
            .par_iter()
            .map(|g| -> Result<Vec<FiniteFunction>> {
                let mut found = Vec::new();
                for inner in &by_arity[1..] {
                    let count = saturating_pow(inner.len(), g.arity()) as usize;
                    for choice in 0..count {
                        let gs: Vec<FiniteFunction> = unrank(choice, g.arity(), inner.len())
                            .into_iter()
                            .map(|i| inner[i].clone())
                            .collect();
                        let h = compose_functions(g, &gs)?;
                        if !clone.contains(&h) {
                            found.push(h);
                        }
                    }
                }
                Ok(found)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let mut grew = false;
        for h in fresh {
            grew |= clone.insert(h)?;
        }
        if !grew {
            return Ok(clone);
        }
    }
}

/// Every operation of arity `1..=arity_bound` on `domain` preserving all of `rels`.
pub fn pol(rels: &[Relation], domain: &FiniteDomain, arity_bound: usize, limits: &Limits) -> Result<FunctionClass> {
    for r in rels {
        domain.expect_same(r.domain(), "pol relation")?;
    }
    let mut out = FunctionClass::empty(domain, domain, arity_bound);
    for n in 1..=arity_bound {
        let mut search = TableSearch::new(n, domain, domain, limits)?;
        for r in rels {
            search.require(&Constraint::new(r.clone(), r.clone())?)?;
        }
        for table in search.all() {
            out.insert(FiniteFunction::from_table_unchecked(n, domain, domain, table))?;
        }
    }
    Ok(out)
}

/// Every relation of arity `1..=arity_bound` preserved by all of `F`, in
/// canonical order.
pub fn inv(f: &FunctionClass, arity_bound: usize, limits: &Limits) -> Result<Vec<Relation>> {
    expect_operations(f)?;
    let a = f.input();
    let mut out = Vec::new();
    for m in 1..=arity_bound {
        let space = a.power(m)?;
        limits.check_candidates_log2(space as f64, "relation enumeration")?;
        if space >= 64 {
            return Err(Error::Budget(format!(
                "relation enumeration: {space} points do not fit a subset mask"
            )));
        }
        let kept: Vec<Option<Relation>> = (0..1u64 << space)
            .into_par_iter()
            .map(|mask| -> Result<Option<Relation>> {
                let r = Relation::from_points(a, m, (0..space).filter(|p| mask >> p & 1 == 1))?;
                for g in f.members() {
                    if !preserves(g, &r)? {
                        return Ok(None);
                    }
                }
                Ok(Some(r))
            })
            .collect::<Result<_>>()?;
        out.extend(kept.into_iter().flatten());
    }
    out.sort();
    Ok(out)
}

/// An ordered set of symbolic labels. Labels are identifiers that are neither
/// integers nor of the form `t<i>`, so they never clash with index positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelSet {
    labels: Vec<String>,
}

impl LabelSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::Invalid("a label set must be non-empty".into()));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !is_identifier(l) || is_target_token(l) {
                return Err(Error::Invalid(format!("`{l}` is not a valid label")));
            }
            if !seen.insert(l.as_str()) {
                return Err(Error::Duplicate {
                    kind: "label",
                    name: l.clone(),
                });
            }
        }
        Ok(LabelSet { labels })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn resolve(&self, tuple: &[String], what: &str) -> Result<Vec<usize>> {
        if tuple.is_empty() {
            return Err(Error::Invalid(format!("{what} must be non-empty")));
        }
        tuple
            .iter()
            .map(|l| {
                self.position(l).ok_or_else(|| Error::Unknown {
                    kind: "label",
                    name: l.clone(),
                })
            })
            .collect()
    }
}

struct Superposition {
    domain: FiniteDomain,
    b: Vec<usize>,
    bs: Vec<Vec<usize>>,
    /// family members checkable once label `i` is assigned
    ready: Vec<Vec<usize>>,
    labels: usize,
}

impl Superposition {
    fn new(rels: &[Relation], b: &[String], bs: &[Vec<String>], l: &LabelSet) -> Result<Self> {
        if rels.len() != bs.len() {
            return Err(Error::arity("superposition label family", rels.len(), bs.len()));
        }
        let b = l.resolve(b, "the target label tuple")?;
        let mut resolved = Vec::with_capacity(bs.len());
        let mut ready = vec![Vec::new(); l.len()];
        for (j, (tuple, r)) in bs.iter().zip(rels).enumerate() {
            let t = l.resolve(tuple, "a family label tuple")?;
            if t.len() != r.arity() {
                return Err(Error::arity(format!("relation {j} of the family"), t.len(), r.arity()));
            }
            ready[*t.iter().max().unwrap()].push(j);
            resolved.push(t);
        }
        let domain = match rels.first() {
            Some(r) => r.domain().clone(),
            None => return Err(Error::Invalid("superposition needs a non-empty relation family".into())),
        };
        for r in rels {
            domain.expect_same(r.domain(), "superposition family")?;
        }
        Ok(Superposition {
            domain,
            b,
            bs: resolved,
            ready,
            labels: l.len(),
        })
    }

    fn point(&self, f: &[Element], t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &i| acc * self.domain.size() + f[i])
    }

    fn extend(&self, rels: &[Relation], f: &mut Vec<Element>, out: &mut BTreeSet<usize>) {
        let level = f.len();
        if level == self.labels {
            out.insert(self.point(f, &self.b));
            return;
        }
        for v in self.domain.elements() {
            f.push(v);
            if self.ready[level]
                .iter()
                .all(|&j| rels[j].contains_point(self.point(f, &self.bs[j])))
            {
                self.extend(rels, f, out);
            }
            f.pop();
        }
    }
}

/// `{ f∘b : f ∈ A^L, f∘b_j ∈ R_j for all j }`.
pub fn general_superposition(
    rels: &[Relation],
    b: &[String],
    bs: &[Vec<String>],
    l: &LabelSet,
    limits: &Limits,
) -> Result<Relation> {
    let sp = Superposition::new(rels, b, bs, l)?;
    limits.check_candidates(saturating_pow(sp.domain.size(), l.len()), "superposition label maps")?;
    let found: Vec<BTreeSet<usize>> = sp
        .domain
        .elements()
        .into_par_iter()
        .map(|v| {
            let mut out = BTreeSet::new();
            let mut f = vec![v];
            if sp.ready[0]
                .iter()
                .all(|&j| rels[j].contains_point(sp.point(&f, &sp.bs[j])))
            {
                sp.extend(rels, &mut f, &mut out);
            }
            out
        })
        .collect();
    Relation::from_points(&sp.domain, sp.b.len(), found.into_iter().flatten())
}

/// Tuples that agree on every pair of positions carrying the same label.
pub fn equality_pattern_relation(b: &[String], domain: &FiniteDomain) -> Result<Relation> {
    let m = b.len();
    let space = domain.power(m)?;
    let firsts: Vec<usize> = (0..m).map(|i| b.iter().position(|x| x == &b[i]).unwrap()).collect();
    Relation::from_points(
        domain,
        m,
        (0..space).filter(|&p| {
            let t = unrank(p, m, domain.size());
            (0..m).all(|i| t[i] == t[firsts[i]])
        }),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub scheme: MinorScheme,
    pub tight_minor: Relation,
    pub pattern: Relation,
    pub superposition: Relation,
    pub holds: bool,
}

/// Splits a general superposition into the tight minor via the scheme whose
/// indeterminates are the labels outside `b` and the equality pattern of `b`.
/// A label occurring in `b` is sent to its least position in `b`.
pub fn superposition_decomposition(
    b: &[String],
    bs: &[Vec<String>],
    l: &LabelSet,
    rels: &[Relation],
    limits: &Limits,
) -> Result<Decomposition> {
    let superposition = general_superposition(rels, b, bs, l, limits)?;
    let first: BTreeMap<&str, usize> = b.iter().enumerate().rev().map(|(i, x)| (x.as_str(), i)).collect();
    let indeterminates: Vec<String> = l
        .labels()
        .iter()
        .filter(|x| !first.contains_key(x.as_str()))
        .cloned()
        .collect();
    let maps = bs
        .iter()
        .map(|t| {
            t.iter()
                .map(|x| match first.get(x.as_str()) {
                    Some(&i) => SchemeEntry::Target(i),
                    None => SchemeEntry::Indeterminate(x.clone()),
                })
                .collect()
        })
        .collect();
    let scheme = MinorScheme::new(b.len(), indeterminates, maps)?;
    let domain = superposition.domain().clone();
    let tight_minor = tight_minor_relations(&scheme, rels)?;
    let pattern = equality_pattern_relation(b, &domain)?;
    let holds = tight_minor.intersection(&pattern)? == superposition;
    Ok(Decomposition {
        scheme,
        tight_minor,
        pattern,
        superposition,
        holds,
    })
}

/// `∪_{f ∈ C} fR`.
pub fn image_union(c: &FunctionClass, r: &Relation) -> Result<Relation> {
    let mut out = Relation::empty(c.output(), r.arity())?;
    for f in c.members() {
        out = out.union(&image_of_relation(f, r)?)?;
    }
    Ok(out)
}

/// For every subset `F ⊆ R` some member `R'` of `rels` has `F ⊆ R' ⊆ S`.
/// Subsets are enumerated literally.
pub fn interpolates(rels: &[Relation], r: &Relation, s: &Relation, limits: &Limits) -> Result<bool> {
    r.expect_same_shape(s, "interpolation")?;
    limits.check_candidates_log2(r.len() as f64, "interpolation subsets")?;
    if r.len() >= 64 {
        return Err(Error::Budget(
            "interpolation: antecedent too large for subset masks".into(),
        ));
    }
    let points: Vec<usize> = r.points().collect();
    let between: Vec<&Relation> = rels.iter().filter(|x| x.same_shape(r) && x.is_subset(s)).collect();
    Ok((0..1u64 << points.len()).all(|mask| {
        between.iter().any(|x| {
            points
                .iter()
                .enumerate()
                .all(|(i, &p)| mask >> i & 1 == 0 || x.contains_point(p))
        })
    }))
}

/// Some member `R'` of `rels` has `R ⊆ R' ⊆ S`.
pub fn interpolates_directly(rels: &[Relation], r: &Relation, s: &Relation) -> bool {
    rels.iter().any(|x| r.is_subset(x) && x.is_subset(s))
}
