//! `fM`, `fR`, constraint satisfaction, preservation, and satisfaction by
//! partial functions.

use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::model::{rank, unrank, Constraint, Element, FiniteDomain, FiniteFunction, Matrix, Relation, Tuple};

/// Visits every matrix with `n` columns drawn from `columns` (repetition
/// allowed), in lexicographic order of the column choice. The visitor gets
/// the row-major rank of every row (each row read as an `n`-tuple over
/// `base`) and the column choice.
pub(crate) fn walk_matrices<T>(
    columns: &[Tuple],
    rows: usize,
    n: usize,
    base: usize,
    mut visit: impl FnMut(&[usize], &[usize]) -> ControlFlow<T>,
) -> Option<T> {
    if columns.is_empty() || n == 0 {
        return None;
    }
    let mut choice = vec![0usize; n];
    // partial[k * rows + i]: rank of the first k entries of row i
    let mut partial = vec![0usize; (n + 1) * rows];
    let mut from = 0;
    loop {
        for k in from..n {
            let col = &columns[choice[k]];
            for i in 0..rows {
                partial[(k + 1) * rows + i] = partial[k * rows + i] * base + col[i];
            }
        }
        if let ControlFlow::Break(b) = visit(&partial[n * rows..], &choice) {
            return Some(b);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < columns.len() {
                break;
            }
            choice[k] = 0;
        }
        from = k;
    }
}

fn check_input(f: &FiniteFunction, domain: &FiniteDomain, context: &str) -> Result<()> {
    f.input().expect_same(domain, context)
}

/// `fM`: the tuple obtained by applying `f` to every row of `M`.
pub fn apply_to_matrix(f: &FiniteFunction, m: &Matrix) -> Result<Tuple> {
    check_input(f, m.domain(), "apply_to_matrix")?;
    if m.cols() != f.arity() {
        return Err(Error::arity("apply_to_matrix columns", f.arity(), m.cols()));
    }
    Ok(m.row_tuples().map(|row| f.eval(&row)).collect())
}

/// `fR = { fM : M ≺ R }`.
///
/// Columns are added one at a time and the partially built rows are
/// deduplicated between steps, so the work is bounded by the number of
/// distinct partial row vectors rather than `|R|^n`.
pub fn image_of_relation(f: &FiniteFunction, r: &Relation) -> Result<Relation> {
    check_input(f, r.domain(), "image_of_relation")?;
    let m = r.arity();
    let mut image = Relation::empty(f.output(), m)?;
    if r.is_empty() {
        return Ok(image);
    }
    let base = r.domain().size();
    let columns: Vec<Tuple> = r.tuples().collect();
    let mut states: HashSet<Vec<usize>> = HashSet::from([vec![0; m]]);
    for _ in 0..f.arity() {
        let mut next = HashSet::with_capacity(states.len() * columns.len());
        for s in &states {
            for c in &columns {
                next.insert(s.iter().zip(c).map(|(&acc, &x)| acc * base + x).collect());
            }
        }
        states = next;
    }
    let out = f.output().size();
    for s in states {
        let values: Vec<Element> = s.iter().map(|&p| f.eval_point(p)).collect();
        image.insert_point(rank(&values, out));
    }
    Ok(image)
}

fn check_constraint(f: &FiniteFunction, c: &Constraint, context: &str) -> Result<()> {
    check_input(f, c.source(), context)?;
    f.output().expect_same(c.target(), context)
}

/// The first matrix `M ≺ R` (lexicographic column order) with `fM ∉ S`.
pub fn find_violation(f: &FiniteFunction, c: &Constraint) -> Result<Option<Matrix>> {
    check_constraint(f, c, "satisfies")?;
    let (r, s) = (c.antecedent(), c.consequent());
    let columns: Vec<Tuple> = r.tuples().collect();
    let out = f.output().size();
    let hit = walk_matrices(&columns, r.arity(), f.arity(), r.domain().size(), |rows, choice| {
        let p = rows.iter().fold(0, |acc, &row| acc * out + f.eval_point(row));
        if s.contains_point(p) {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(choice.to_vec())
        }
    });
    hit.map(|choice| Matrix::new(r.domain(), choice.into_iter().map(|k| columns[k].clone()).collect()))
        .transpose()
}

/// `f` satisfies `(R, S)` iff `fR ⊆ S`.
pub fn satisfies(f: &FiniteFunction, c: &Constraint) -> Result<bool> {
    Ok(find_violation(f, c)?.is_none())
}

/// `f` preserves `R` iff it satisfies `(R, R)`.
pub fn preserves(f: &FiniteFunction, r: &Relation) -> Result<bool> {
    if !f.is_operation() {
        return Err(Error::DomainMismatch(format!(
            "preserves needs an operation, got a map from `{}` to `{}`",
            f.input(),
            f.output()
        )));
    }
    satisfies(f, &Constraint::new(r.clone(), r.clone())?)
}

/// A partial map `D -> B` with `D ⊆ A^n`, keyed by point rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialFunction {
    arity: usize,
    input: FiniteDomain,
    output: FiniteDomain,
    graph: BTreeMap<usize, Element>,
}

impl PartialFunction {
    pub fn new<I>(arity: usize, input: &FiniteDomain, output: &FiniteDomain, graph: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Tuple, Element)>,
    {
        input.power(arity)?;
        let mut points = BTreeMap::new();
        for (t, v) in graph {
            if t.len() != arity {
                return Err(Error::arity("partial function argument", arity, t.len()));
            }
            input.check_tuple(&t)?;
            output.check_element(v)?;
            if let Some(old) = points.insert(rank(&t, input.size()), v) {
                if old != v {
                    return Err(Error::Invalid(format!("partial function assigns two values to {t:?}")));
                }
            }
        }
        Ok(PartialFunction {
            arity,
            input: input.clone(),
            output: output.clone(),
            graph: points,
        })
    }

    pub fn from_points(
        arity: usize,
        input: &FiniteDomain,
        output: &FiniteDomain,
        graph: BTreeMap<usize, Element>,
    ) -> Result<Self> {
        let space = input.power(arity)?;
        for (&p, &v) in &graph {
            if p >= space {
                return Err(Error::Invalid(format!("point {p} outside `{input}`^{arity}")));
            }
            output.check_element(v)?;
        }
        Ok(PartialFunction {
            arity,
            input: input.clone(),
            output: output.clone(),
            graph,
        })
    }

    /// The total function seen as a partial function on all of `A^n`.
    pub fn from_total(f: &FiniteFunction) -> Self {
        PartialFunction {
            arity: f.arity(),
            input: f.input().clone(),
            output: f.output().clone(),
            graph: f.table().iter().copied().enumerate().collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn input(&self) -> &FiniteDomain {
        &self.input
    }

    pub fn output(&self) -> &FiniteDomain {
        &self.output
    }

    pub fn graph(&self) -> &BTreeMap<usize, Element> {
        &self.graph
    }

    /// Number of points in the domain of definition.
    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn get(&self, t: &[Element]) -> Option<Element> {
        if t.len() != self.arity || !t.iter().all(|&e| e < self.input.size()) {
            return None;
        }
        self.get_point(rank(t, self.input.size()))
    }

    #[inline]
    pub fn get_point(&self, p: usize) -> Option<Element> {
        self.graph.get(&p).copied()
    }

    pub fn domain_tuples(&self) -> impl Iterator<Item = Tuple> + '_ {
        self.graph.keys().map(|&p| unrank(p, self.arity, self.input.size()))
    }

    /// `self` extended by `point ↦ value`; `point` must lie outside the domain.
    pub fn extend(&self, point: usize, value: Element) -> Result<PartialFunction> {
        if self.graph.contains_key(&point) {
            return Err(Error::Precondition(format!("point {point} already lies in the domain")));
        }
        self.output.check_element(value)?;
        let mut graph = self.graph.clone();
        graph.insert(point, value);
        PartialFunction::from_points(self.arity, &self.input, &self.output, graph)
    }

    /// `self` agrees with `other` wherever `other` is defined.
    pub fn extends(&self, other: &PartialFunction) -> bool {
        self.arity == other.arity
            && self.input == other.input
            && self.output == other.output
            && other.graph.iter().all(|(p, v)| self.graph.get(p) == Some(v))
    }

    pub fn is_total(&self) -> bool {
        self.input
            .power(self.arity)
            .map(|space| space == self.graph.len())
            .unwrap_or(false)
    }
}

fn check_partial(p: &PartialFunction, c: &Constraint, context: &str) -> Result<()> {
    p.input().expect_same(c.source(), context)?;
    p.output().expect_same(c.target(), context)
}

/// All tuples `pM` for matrices `M ≺ R` whose rows lie in the domain of `p`.
pub fn partial_image(p: &PartialFunction, r: &Relation) -> Result<Relation> {
    p.input().expect_same(r.domain(), "partial_image")?;
    let mut image = Relation::empty(p.output(), r.arity())?;
    let columns: Vec<Tuple> = r.tuples().collect();
    let out = p.output().size();
    walk_matrices::<()>(&columns, r.arity(), p.arity(), r.domain().size(), |rows, _| {
        let mut acc = 0;
        for &row in rows {
            match p.get_point(row) {
                Some(v) => acc = acc * out + v,
                None => return ControlFlow::Continue(()),
            }
        }
        image.insert_point(acc);
        ControlFlow::Continue(())
    });
    Ok(image)
}

/// `p` satisfies `(R, S)` when every applicable matrix `M ≺ R` is mapped into `S`.
pub fn partial_satisfies(p: &PartialFunction, c: &Constraint) -> Result<bool> {
    check_partial(p, c, "partial_satisfies")?;
    let (r, s) = (c.antecedent(), c.consequent());
    let columns: Vec<Tuple> = r.tuples().collect();
    let out = p.output().size();
    let violated = walk_matrices(&columns, r.arity(), p.arity(), r.domain().size(), |rows, _| {
        let mut acc = 0;
        for &row in rows {
            match p.get_point(row) {
                Some(v) => acc = acc * out + v,
                None => return ControlFlow::Continue(()),
            }
        }
        if s.contains_point(acc) {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(())
        }
    });
    Ok(violated.is_none())
}
