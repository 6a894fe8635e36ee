//! Naive reference implementations: every quantifier is expanded in full,
//! with no pruning, deduplication or early exit. Used to cross-check the
//! optimized paths.

use std::collections::BTreeSet;

use crate::clones::{projections, LabelSet};
use crate::error::{Error, Result};
use crate::galois::ConstraintSet;
use crate::limits::{saturating_pow, Limits};
use crate::minors::{scheme_apply, MinorScheme, SkolemMap};
use crate::model::{unrank, Constraint, FiniteDomain, FiniteFunction, Matrix, Relation, Tuple};
use crate::satisfaction::apply_to_matrix;
use crate::substitution::{all_tables, FunctionClass};

fn every_matrix(r: &Relation, n: usize) -> Result<Vec<Matrix>> {
    let columns: Vec<Tuple> = r.tuples().collect();
    let count = saturating_pow(columns.len(), n);
    if count > u32::MAX as u128 {
        return Err(Error::Budget(format!("oracle: {count} matrices")));
    }
    (0..count as usize)
        .map(|k| {
            let choice = unrank(k, n, columns.len());
            Matrix::new(r.domain(), choice.into_iter().map(|i| columns[i].clone()).collect())
        })
        .collect()
}

/// `fR` from the list of all `|R|^n` matrices.
pub fn image(f: &FiniteFunction, r: &Relation) -> Result<Relation> {
    f.input().expect_same(r.domain(), "oracle image")?;
    let tuples: Vec<Tuple> = every_matrix(r, f.arity())?
        .iter()
        .map(|m| apply_to_matrix(f, m))
        .collect::<Result<_>>()?;
    Relation::from_tuples(f.output(), r.arity(), tuples)
}

/// `fR ⊆ S` via [`image`].
pub fn satisfies(f: &FiniteFunction, c: &Constraint) -> Result<bool> {
    f.output().expect_same(c.target(), "oracle satisfies")?;
    Ok(image(f, c.antecedent())?.is_subset(c.consequent()))
}

/// All target tuples and all Skolem maps over every indeterminate.
pub fn tight_minor(h: &MinorScheme, rels: &[Relation]) -> Result<Relation> {
    if rels.len() != h.maps().len() {
        return Err(Error::arity("oracle relation family", h.maps().len(), rels.len()));
    }
    let d = rels[0].domain();
    for (map, r) in h.maps().iter().zip(rels) {
        d.expect_same(r.domain(), "oracle relation family")?;
        if map.len() != r.arity() {
            return Err(Error::arity("oracle relation arity", map.len(), r.arity()));
        }
    }
    let m = h.target();
    let vars = h.indeterminates();
    let mut out = Vec::new();
    for p in 0..d.power(m)? {
        let a = unrank(p, m, d.size());
        let mut witnessed = false;
        for q in 0..saturating_pow(d.size(), vars.len()) as usize {
            let values = unrank(q, vars.len(), d.size());
            let sigma = SkolemMap::new(vars.iter().cloned().zip(values));
            let mut all = true;
            for (map, r) in h.maps().iter().zip(rels) {
                all &= r.contains(&scheme_apply(&a, &sigma, map)?);
            }
            witnessed |= all;
        }
        if witnessed {
            out.push(a);
        }
    }
    Relation::from_tuples(d, m, out)
}

/// All `|A|^|L|` label maps.
pub fn superposition(rels: &[Relation], b: &[String], bs: &[Vec<String>], l: &LabelSet) -> Result<Relation> {
    if rels.len() != bs.len() || rels.is_empty() {
        return Err(Error::arity("oracle superposition family", bs.len(), rels.len()));
    }
    let d = rels[0].domain();
    let index = |x: &String| {
        l.position(x).ok_or_else(|| Error::Unknown {
            kind: "label",
            name: x.clone(),
        })
    };
    let b: Vec<usize> = b.iter().map(index).collect::<Result<_>>()?;
    let bs: Vec<Vec<usize>> = bs
        .iter()
        .map(|t| t.iter().map(index).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for q in 0..d.power(l.len())? {
        let f = unrank(q, l.len(), d.size());
        let mut all = true;
        for (t, r) in bs.iter().zip(rels) {
            let image: Tuple = t.iter().map(|&i| f[i]).collect();
            all &= r.contains(&image);
        }
        if all {
            out.push(b.iter().map(|&i| f[i]).collect::<Tuple>());
        }
    }
    Relation::from_tuples(d, b.len(), out)
}

/// For each arity `m`, the smallest set of `m`-ary operations containing the
/// projections and closed under applying members of `F` pointwise.
pub fn clone(f: &FunctionClass, arity_bound: usize) -> Result<FunctionClass> {
    let a = f.input();
    let mut out = FunctionClass::new(a, a, arity_bound.max(f.arity_bound()), f.members().cloned())?;
    for m in 1..=arity_bound {
        let mut level: BTreeSet<Vec<usize>> = projections(a, m)?
            .into_iter()
            .filter(|p| p.arity() == m)
            .map(|p| p.table().to_vec())
            .collect();
        loop {
            let current: Vec<Vec<usize>> = level.iter().cloned().collect();
            let mut next = level.clone();
            for g in f.members() {
                let n = g.arity();
                for k in 0..saturating_pow(current.len(), n) as usize {
                    let pick = unrank(k, n, current.len());
                    let table: Vec<usize> = (0..current[0].len())
                        .map(|p| g.eval(&pick.iter().map(|&i| current[i][p]).collect::<Vec<_>>()))
                        .collect();
                    next.insert(table);
                }
            }
            if next.len() == level.len() {
                break;
            }
            level = next;
        }
        for table in level {
            out.insert(FiniteFunction::new(m, a, a, table)?)?;
        }
    }
    Ok(out)
}

/// Filters every table through [`satisfies`].
pub fn functions_satisfying(t: &ConstraintSet, arity_bound: usize, limits: &Limits) -> Result<FunctionClass> {
    let mut out = FunctionClass::empty(t.source(), t.target(), arity_bound);
    for n in 1..=arity_bound {
        for g in all_tables(n, t.source(), t.target(), limits)? {
            let mut ok = true;
            for c in t.members() {
                ok &= satisfies(&g, c)?;
            }
            if ok {
                out.insert(g)?;
            }
        }
    }
    Ok(out)
}

fn all_relations(d: &FiniteDomain, m: usize) -> Result<Vec<Relation>> {
    let space = d.power(m)?;
    if space >= 32 {
        return Err(Error::Budget("oracle: relation space too large".into()));
    }
    (0..1u64 << space)
        .map(|mask| Relation::from_points(d, m, (0..space).filter(|p| mask >> p & 1 == 1)))
        .collect()
}

/// Filters every pair `(R, S)` through [`satisfies`].
pub fn constraints_satisfied_by(k: &FunctionClass, arity_bound: usize) -> Result<ConstraintSet> {
    let mut out = ConstraintSet::empty(k.input(), k.output(), arity_bound);
    for m in 1..=arity_bound {
        for r in all_relations(k.input(), m)? {
            for s in all_relations(k.output(), m)? {
                let c = Constraint::new(r.clone(), s)?;
                let mut ok = true;
                for f in k.members() {
                    ok &= satisfies(f, &c)?;
                }
                if ok {
                    out.insert(c)?;
                }
            }
        }
    }
    Ok(out)
}

/// Operations preserving every relation, by filtering.
pub fn pol(rels: &[Relation], d: &FiniteDomain, arity_bound: usize, limits: &Limits) -> Result<FunctionClass> {
    let mut out = FunctionClass::empty(d, d, arity_bound);
    for n in 1..=arity_bound {
        for g in all_tables(n, d, d, limits)? {
            let mut ok = true;
            for r in rels {
                ok &= image(&g, r)?.is_subset(r);
            }
            if ok {
                out.insert(g)?;
            }
        }
    }
    Ok(out)
}

/// Relations preserved by every operation, by filtering.
pub fn inv(f: &FunctionClass, arity_bound: usize) -> Result<Vec<Relation>> {
    let mut out = Vec::new();
    for m in 1..=arity_bound {
        for r in all_relations(f.input(), m)? {
            let mut ok = true;
            for g in f.members() {
                ok &= image(g, &r)?.is_subset(&r);
            }
            if ok {
                out.push(r);
            }
        }
    }
    out.sort();
    Ok(out)
}
