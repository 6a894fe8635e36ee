//! The two Galois operators between function classes and constraint sets at
//! bounded arity, and constructive separating witnesses in both directions.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::model::{rank, unrank, Constraint, FiniteDomain, FiniteFunction, Matrix, Relation, Tuple};
use crate::satisfaction::{apply_to_matrix, image_of_relation, satisfies};
use crate::search::TableSearch;
use crate::substitution::{all_tables, is_svs_closed, FunctionClass};

/// A set of `A`-to-`B` constraints of arities up to `arity_bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstraintSet {
    source: FiniteDomain,
    target: FiniteDomain,
    arity_bound: usize,
    members: BTreeSet<Constraint>,
}

impl ConstraintSet {
    pub fn new<I>(source: &FiniteDomain, target: &FiniteDomain, arity_bound: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = Constraint>,
    {
        let mut set = ConstraintSet::empty(source, target, arity_bound);
        for c in members {
            set.insert(c)?;
        }
        Ok(set)
    }

    pub fn empty(source: &FiniteDomain, target: &FiniteDomain, arity_bound: usize) -> Self {
        ConstraintSet {
            source: source.clone(),
            target: target.clone(),
            arity_bound,
            members: BTreeSet::new(),
        }
    }

    fn check_member(&self, c: &Constraint) -> Result<()> {
        self.source.expect_same(c.source(), "constraint set antecedent")?;
        self.target.expect_same(c.target(), "constraint set consequent")?;
        if c.arity() > self.arity_bound {
            return Err(Error::Invalid(format!(
                "constraint of arity {} exceeds the set bound {}",
                c.arity(),
                self.arity_bound
            )));
        }
        Ok(())
    }

    pub fn insert(&mut self, c: Constraint) -> Result<bool> {
        self.check_member(&c)?;
        Ok(self.members.insert(c))
    }

    pub fn source(&self) -> &FiniteDomain {
        &self.source
    }

    pub fn target(&self) -> &FiniteDomain {
        &self.target
    }

    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, c: &Constraint) -> bool {
        self.members.contains(c)
    }

    pub fn members(&self) -> impl Iterator<Item = &Constraint> + '_ {
        self.members.iter()
    }

    pub fn of_arity(&self, m: usize) -> impl Iterator<Item = &Constraint> + '_ {
        self.members.iter().filter(move |c| c.arity() == m)
    }
}

/// Replaces constraints sharing an antecedent by one with the intersected
/// consequent; a function satisfies the result iff it satisfies the input.
pub(crate) fn merge_by_antecedent<'a>(cs: impl IntoIterator<Item = &'a Constraint>) -> Result<Vec<Constraint>> {
    let mut merged: BTreeMap<Relation, Relation> = BTreeMap::new();
    for c in cs {
        match merged.get_mut(c.antecedent()) {
            Some(s) => *s = s.intersection(c.consequent())?,
            None => {
                merged.insert(c.antecedent().clone(), c.consequent().clone());
            }
        }
    }
    merged.into_iter().map(|(r, s)| Constraint::new(r, s)).collect()
}

/// Every function of arity `1..=arity_bound` satisfying all of `t`.
pub fn functions_satisfying(t: &ConstraintSet, arity_bound: usize, limits: &Limits) -> Result<FunctionClass> {
    let merged = merge_by_antecedent(t.members())?;
    let mut class = FunctionClass::empty(&t.source, &t.target, arity_bound);
    for n in 1..=arity_bound {
        let mut search = TableSearch::new(n, &t.source, &t.target, limits)?;
        for c in &merged {
            search.require(c)?;
        }
        for table in search.all() {
            class.insert(FiniteFunction::from_table_unchecked(n, &t.source, &t.target, table))?;
        }
    }
    Ok(class)
}

fn check_mask_width(bits: usize, what: &str) -> Result<()> {
    if bits >= 64 {
        return Err(Error::Budget(format!("{what}: {bits} points do not fit a subset mask")));
    }
    Ok(())
}

fn subset_relation(d: &FiniteDomain, m: usize, mask: u64) -> Result<Relation> {
    Relation::from_points(d, m, (0..64).filter(|p| mask >> p & 1 == 1))
}

/// Every constraint of arity `1..=arity_bound` satisfied by all members of `k`.
///
/// For each antecedent `R` the least admissible consequent is `∪_{f ∈ K} fR`;
/// the admissible consequents are exactly its supersets.
pub fn constraints_satisfied_by(k: &FunctionClass, arity_bound: usize, limits: &Limits) -> Result<ConstraintSet> {
    let (a, b) = (k.input(), k.output());
    let mut set = ConstraintSet::empty(a, b, arity_bound);
    for m in 1..=arity_bound {
        let (pa, pb) = (a.power(m)?, b.power(m)?);
        limits.check_candidates_log2((pa + pb) as f64, "constraint enumeration")?;
        check_mask_width(pa + pb, "constraint enumeration")?;
        let per_antecedent: Vec<Vec<Constraint>> = (0..1u64 << pa)
            .into_par_iter()
            .map(|mask| -> Result<Vec<Constraint>> {
                let r = subset_relation(a, m, mask)?;
                let mut least = Relation::empty(b, m)?;
                for f in k.members() {
                    least = least.union(&image_of_relation(f, &r)?)?;
                }
                let free: Vec<usize> = (0..pb).filter(|&p| !least.contains_point(p)).collect();
                (0..1u64 << free.len())
                    .map(|extra| {
                        let mut s = least.clone();
                        for (i, &p) in free.iter().enumerate() {
                            if extra >> i & 1 == 1 {
                                s.insert_point(p);
                            }
                        }
                        Constraint::new(r.clone(), s)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for c in per_antecedent.into_iter().flatten() {
            set.members.insert(c);
        }
    }
    Ok(set)
}

/// Subsets of `0..n` of size `k` as sorted index vectors, lexicographically.
fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let cur = current.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// The `|F| × n` matrix whose rows are the tuples of `F`, with `R` its set of
/// columns and `S = { fM : f ∈ K, f n-ary }`.
fn constraint_from_points(k: &FunctionClass, n: usize, points: &[usize]) -> Result<Constraint> {
    let a = k.input();
    let rows: Vec<Tuple> = points.iter().map(|&p| unrank(p, n, a.size())).collect();
    let m = Matrix::from_rows(a, &rows)?;
    let r = Relation::from_tuples(a, rows.len(), m.columns().iter())?;
    let s = Relation::from_tuples(
        k.output(),
        rows.len(),
        k.of_arity(n)
            .map(|f| apply_to_matrix(f, &m))
            .collect::<Result<Vec<_>>>()?,
    )?;
    Constraint::new(r, s)
}

fn check_candidate(k: &FunctionClass, g: &FiniteFunction) -> Result<()> {
    k.input().expect_same(g.input(), "separated function input")?;
    k.output().expect_same(g.output(), "separated function output")?;
    if g.arity() > k.arity_bound() {
        return Err(Error::Invalid(format!(
            "function of arity {} exceeds the class bound {}",
            g.arity(),
            k.arity_bound()
        )));
    }
    Ok(())
}

fn separate_unchecked(k: &FunctionClass, g: &FiniteFunction, limits: &Limits) -> Result<Option<Constraint>> {
    if k.contains(g) {
        return Ok(None);
    }
    let n = g.arity();
    let positions = g.input().power(n)?;
    limits.check_candidates_log2(positions as f64, "separating subset search")?;
    let members: Vec<&FiniteFunction> = k.of_arity(n).collect();
    for size in 1..=positions {
        let found = combinations(positions, size).find(|points| {
            members
                .iter()
                .all(|f| points.iter().any(|&p| f.eval_point(p) != g.eval_point(p)))
        });
        if let Some(points) = found {
            let c = constraint_from_points(k, n, &points)?;
            verify_separation(k, g, &c)?;
            return Ok(Some(c));
        }
    }
    Err(Error::Internal(
        "a function outside the class agrees with a member everywhere".into(),
    ))
}

fn verify_separation(k: &FunctionClass, g: &FiniteFunction, c: &Constraint) -> Result<()> {
    for f in k.members() {
        if !satisfies(f, c)? {
            return Err(Error::Internal(format!(
                "separating constraint is violated by member {f:?}"
            )));
        }
    }
    if satisfies(g, c)? {
        return Err(Error::Internal(
            "separating constraint is satisfied by the separated function".into(),
        ));
    }
    Ok(())
}

/// A constraint satisfied by every member of `k` and violated by `g`, or
/// `None` when `g ∈ k`.
///
/// The smallest point set `F ⊆ A^n` (then lexicographically least) on which
/// `g` differs from every `n`-ary member is found first; `R` is the set of
/// columns of the matrix with rows `F`, and `S` collects `fM` over the `n`-ary
/// members. The class must be closed under simple variable substitutions.
pub fn separating_constraint(k: &FunctionClass, g: &FiniteFunction, limits: &Limits) -> Result<Option<Constraint>> {
    check_candidate(k, g)?;
    if !is_svs_closed(k)? {
        return Err(Error::Precondition(
            "the class must be closed under simple variable substitutions".into(),
        ));
    }
    separate_unchecked(k, g, limits)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionSeparation {
    Found(FiniteFunction),
    /// The constraint is already in the set.
    InSet,
    /// `(∅, S)` is satisfied by every function.
    EmptyAntecedent,
    /// No table of the searched arity works.
    Exhausted,
}

/// Rows of the separation matrix: the `m` rows of the matrix whose columns
/// are the antecedent tuples, followed by the remaining `n`-tuples of `A^n`
/// in lexicographic order.
pub fn separation_matrix(c: &Constraint) -> Result<Matrix> {
    let r = c.antecedent();
    let a = r.domain();
    let n = r.len();
    if n == 0 {
        return Err(Error::Invalid("separation needs a non-empty antecedent".into()));
    }
    let core = Matrix::new(a, r.tuples().collect())?;
    let mut rows: Vec<Tuple> = core.row_tuples().collect();
    let present: BTreeSet<usize> = rows.iter().map(|t| rank(t, a.size())).collect();
    let positions = a.power(n)?;
    rows.extend(
        (0..positions)
            .filter(|p| !present.contains(p))
            .map(|p| unrank(p, n, a.size())),
    );
    Matrix::from_rows(a, &rows)
}

/// An `|R|`-ary function satisfying every member of `t` but not `c`,
/// violating `c` through the matrix whose columns are the tuples of `R`. The
/// lexicographically least table is returned.
pub fn separating_function(t: &ConstraintSet, c: &Constraint, limits: &Limits) -> Result<FunctionSeparation> {
    t.source.expect_same(c.source(), "separated constraint antecedent")?;
    t.target.expect_same(c.target(), "separated constraint consequent")?;
    if t.contains(c) {
        return Ok(FunctionSeparation::InSet);
    }
    if c.antecedent().is_empty() {
        return Ok(FunctionSeparation::EmptyAntecedent);
    }
    let a = c.source();
    let n = c.antecedent().len();
    let mut search = TableSearch::new(n, a, c.target(), limits)?;
    for member in merge_by_antecedent(t.members())? {
        search.require(&member)?;
    }
    let columns = Matrix::new(a, c.antecedent().tuples().collect())?;
    let violating_rows: Vec<usize> = columns.row_tuples().map(|row| rank(&row, a.size())).collect();
    search.forbid(violating_rows, c.consequent())?;
    let Some(table) = search.first() else {
        return Ok(FunctionSeparation::Exhausted);
    };
    let g = FiniteFunction::from_table_unchecked(n, a, c.target(), table);
    for member in t.members() {
        if !satisfies(&g, member)? {
            return Err(Error::Internal(format!(
                "separating function violates a member of the set: {member:?}"
            )));
        }
    }
    if satisfies(&g, c)? {
        return Err(Error::Internal(
            "separating function satisfies the separated constraint".into(),
        ));
    }
    Ok(FunctionSeparation::Found(g))
}

/// Adds every constraint of arity `1..=bound` all of whose relaxations lie in
/// `t`. Every constraint is a relaxation of itself, so nothing new can enter
/// on finite domains; the check is still carried out literally.
pub fn local_closure_constraints(t: &ConstraintSet, limits: &Limits) -> Result<ConstraintSet> {
    let (a, b) = (&t.source, &t.target);
    let mut out = t.clone();
    for m in 1..=t.arity_bound {
        let (pa, pb) = (a.power(m)?, b.power(m)?);
        let log2 = (pa + pb) as f64 * 3f64.log2();
        limits.check_candidates_log2(log2, "local closure relaxations")?;
        check_mask_width(pa + pb, "local closure relaxations")?;
        let added: Vec<Constraint> = (0..1u64 << pa)
            .into_par_iter()
            .map(|rm| -> Result<Vec<Constraint>> {
                let r = subset_relation(a, m, rm)?;
                let mut keep = Vec::new();
                for sm in 0..1u64 << pb {
                    let s = subset_relation(b, m, sm)?;
                    if every_relaxation_in(t, &r, rm, &s, sm, pb)? {
                        keep.push(Constraint::new(r.clone(), s)?);
                    }
                }
                Ok(keep)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        out.members.extend(added);
    }
    Ok(out)
}

fn every_relaxation_in(t: &ConstraintSet, r: &Relation, rm: u64, s: &Relation, sm: u64, pb: usize) -> Result<bool> {
    let (a, b, m) = (r.domain(), s.domain(), r.arity());
    let full_b = (1u64 << pb) - 1;
    // sub-masks of rm, super-masks of sm
    let mut sub = rm;
    loop {
        let r2 = subset_relation(a, m, sub)?;
        let free = full_b & !sm;
        let mut add = free;
        loop {
            let s2 = subset_relation(b, m, sm | add)?;
            if !t.contains(&Constraint::new(r2.clone(), s2)?) {
                return Ok(false);
            }
            if add == 0 {
                break;
            }
            add = (add - 1) & free;
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rm;
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoundtripOutcome {
    Separated { constraint: Constraint, verified: bool },
    NotSeparated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundtripEntry {
    pub function: FiniteFunction,
    pub outcome: RoundtripOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundtripReport {
    pub members: usize,
    pub entries: Vec<RoundtripEntry>,
    pub note: Option<String>,
}

impl RoundtripReport {
    pub fn separated(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e.outcome, RoundtripOutcome::Separated { verified: true, .. }))
            .count()
    }

    pub fn succeeded(&self) -> bool {
        self.separated() == self.entries.len()
    }
}

/// Separates every non-member of arity at most the class bound and re-checks
/// each witness with independent satisfaction calls.
pub fn galois_roundtrip_report(k: &FunctionClass, limits: &Limits) -> Result<RoundtripReport> {
    if !is_svs_closed(k)? {
        return Err(Error::Precondition(
            "the class must be closed under simple variable substitutions".into(),
        ));
    }
    let mut candidates = Vec::new();
    for n in 1..=k.arity_bound() {
        candidates.extend(all_tables(n, k.input(), k.output(), limits)?.filter(|g| !k.contains(g)));
    }
    let entries = candidates
        .into_par_iter()
        .map(|g| -> Result<RoundtripEntry> {
            let outcome = match separate_unchecked(k, &g, limits) {
                Ok(Some(constraint)) => {
                    let mut verified = !satisfies(&g, &constraint)?;
                    for f in k.members() {
                        verified &= satisfies(f, &constraint)?;
                    }
                    RoundtripOutcome::Separated { constraint, verified }
                }
                Ok(None) => RoundtripOutcome::NotSeparated,
                Err(e) if e.is_budget() => RoundtripOutcome::NotSeparated,
                Err(e) => return Err(e),
            };
            Ok(RoundtripEntry { function: g, outcome })
        })
        .collect::<Result<Vec<_>>>()?;
    let note = k
        .is_empty()
        .then(|| "empty class: each function is separated by a constraint with empty consequent".to_string());
    Ok(RoundtripReport {
        members: k.len(),
        entries,
        note,
    })
}
