//! The finite data model: domains, tuples, relations, functions, matrices,
//! index maps and constraints.
//!
//! Elements of a domain of size `k` are the integers `0..k`. An `m`-tuple over
//! a domain is identified with its row-major rank in `A^m`, so that the
//! natural order on ranks is the lexicographic order on tuples. Relations are
//! bitsets over ranks, which makes their storage canonical by construction.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Range;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// An element of a finite domain.
pub type Element = usize;

/// A tuple of elements; the domain is carried by whatever owns the tuple.
pub type Tuple = Vec<Element>;

/// Largest `|A|^m` that may be materialized as a relation or a function table.
pub const MAX_POINTS: usize = 1 << 24;

/// Names of domains, relations, functions, schemes and labels.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '\'' | '-'))
}

pub(crate) fn check_arity(arity: usize, what: &str) -> Result<()> {
    if arity == 0 {
        return Err(Error::Invalid(format!("{what}: arity must be a positive integer")));
    }
    Ok(())
}

/// Row-major rank of `t` in `base^len`.
#[inline]
pub(crate) fn rank(t: &[Element], base: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * base + x)
}

#[inline]
pub(crate) fn unrank(mut index: usize, arity: usize, base: usize) -> Tuple {
    let mut t = vec![0; arity];
    for slot in t.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    t
}

/// A named finite carrier set `{0, .., size - 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteDomain {
    name: String,
    size: usize,
}

impl FiniteDomain {
    pub fn new(name: impl Into<String>, size: usize) -> Result<Self> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(Error::Invalid(format!("`{name}` is not a valid domain name")));
        }
        if size == 0 {
            return Err(Error::Invalid(format!("domain `{name}` must be non-empty")));
        }
        Ok(FiniteDomain { name, size })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> Range<Element> {
        0..self.size
    }

    pub fn contains(&self, e: Element) -> bool {
        e < self.size
    }

    /// `|A|^arity`, refusing arity 0 and spaces larger than [`MAX_POINTS`].
    pub fn power(&self, arity: usize) -> Result<usize> {
        check_arity(arity, "power")?;
        let mut n: usize = 1;
        for _ in 0..arity {
            n = n
                .checked_mul(self.size)
                .filter(|&n| n <= MAX_POINTS)
                .ok_or_else(|| Error::Budget(format!("`{}`^{arity} exceeds {MAX_POINTS} points", self.name)))?;
        }
        Ok(n)
    }

    pub fn check_element(&self, e: Element) -> Result<()> {
        if e < self.size {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                element: e,
                domain: self.name.clone(),
                size: self.size,
            })
        }
    }

    pub fn check_tuple(&self, t: &[Element]) -> Result<()> {
        t.iter().try_for_each(|&e| self.check_element(e))
    }

    pub(crate) fn expect_same(&self, other: &FiniteDomain, context: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!(
                "{context}: `{}` (size {}) vs `{}` (size {})",
                self.name, self.size, other.name, other.size
            )))
        }
    }
}

impl fmt::Display for FiniteDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Rank of `t` within `d^|t|`.
pub fn encode_point(t: &[Element], d: &FiniteDomain) -> Result<usize> {
    d.power(t.len())?;
    d.check_tuple(t)?;
    Ok(rank(t, d.size))
}

/// Inverse of [`encode_point`].
pub fn decode_point(index: usize, arity: usize, d: &FiniteDomain) -> Result<Tuple> {
    let space = d.power(arity)?;
    if index >= space {
        return Err(Error::Invalid(format!(
            "point {index} is outside `{d}`^{arity} ({space} points)"
        )));
    }
    Ok(unrank(index, arity, d.size))
}

/// An `m`-ary relation on a finite domain.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    domain: FiniteDomain,
    arity: usize,
    points: FixedBitSet,
}

impl Relation {
    pub fn empty(domain: &FiniteDomain, arity: usize) -> Result<Self> {
        let space = domain.power(arity)?;
        Ok(Relation {
            domain: domain.clone(),
            arity,
            points: FixedBitSet::with_capacity(space),
        })
    }

    pub fn full(domain: &FiniteDomain, arity: usize) -> Result<Self> {
        let mut r = Relation::empty(domain, arity)?;
        r.points.insert_range(..);
        Ok(r)
    }

    pub fn from_tuples<I, T>(domain: &FiniteDomain, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[Element]>,
    {
        let mut r = Relation::empty(domain, arity)?;
        for t in tuples {
            let t = t.as_ref();
            if t.len() != arity {
                return Err(Error::arity("relation tuple", arity, t.len()));
            }
            domain.check_tuple(t)?;
            r.points.insert(rank(t, domain.size));
        }
        Ok(r)
    }

    /// Builds a relation from tuple ranks.
    pub fn from_points<I>(domain: &FiniteDomain, arity: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut r = Relation::empty(domain, arity)?;
        let space = r.space();
        for p in points {
            if p >= space {
                return Err(Error::Invalid(format!("point {p} is outside `{domain}`^{arity}")));
            }
            r.points.insert(p);
        }
        Ok(r)
    }

    pub(crate) fn from_bits(domain: &FiniteDomain, arity: usize, points: FixedBitSet) -> Self {
        debug_assert_eq!(points.len(), domain.power(arity).unwrap_or(0));
        Relation {
            domain: domain.clone(),
            arity,
            points,
        }
    }

    /// The binary equality relation `=_A`.
    pub fn equality(domain: &FiniteDomain) -> Result<Self> {
        Relation::from_tuples(domain, 2, domain.elements().map(|a| [a, a]))
    }

    /// The binary disequality relation.
    pub fn disequality(domain: &FiniteDomain) -> Result<Self> {
        Ok(Relation::equality(domain)?.complement())
    }

    pub fn domain(&self) -> &FiniteDomain {
        &self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of tuples.
    pub fn len(&self) -> usize {
        self.points.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.points.is_full()
    }

    /// `|A|^m`, the number of candidate tuples.
    pub fn space(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, t: &[Element]) -> bool {
        t.len() == self.arity
            && t.iter().all(|&e| e < self.domain.size)
            && self.points.contains(rank(t, self.domain.size))
    }

    #[inline]
    pub fn contains_point(&self, p: usize) -> bool {
        self.points.contains(p)
    }

    /// Tuple ranks in increasing (lexicographic) order.
    pub fn points(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.ones()
    }

    /// Tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Tuple> + '_ {
        let (arity, base) = (self.arity, self.domain.size);
        self.points.ones().map(move |p| unrank(p, arity, base))
    }

    pub fn same_shape(&self, other: &Relation) -> bool {
        self.arity == other.arity && self.domain == other.domain
    }

    pub(crate) fn expect_same_shape(&self, other: &Relation, context: &str) -> Result<()> {
        self.domain.expect_same(&other.domain, context)?;
        if self.arity != other.arity {
            return Err(Error::arity(context, self.arity, other.arity));
        }
        Ok(())
    }

    /// Relations of different shapes are never subsets of each other.
    pub fn is_subset(&self, other: &Relation) -> bool {
        self.same_shape(other) && self.points.is_subset(&other.points)
    }

    pub fn is_superset(&self, other: &Relation) -> bool {
        other.is_subset(self)
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.expect_same_shape(other, "intersection")?;
        let mut points = self.points.clone();
        points.intersect_with(&other.points);
        Ok(Relation::from_bits(&self.domain, self.arity, points))
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.expect_same_shape(other, "union")?;
        let mut points = self.points.clone();
        points.union_with(&other.points);
        Ok(Relation::from_bits(&self.domain, self.arity, points))
    }

    pub fn complement(&self) -> Relation {
        let mut points = self.points.clone();
        points.toggle_range(..);
        Relation::from_bits(&self.domain, self.arity, points)
    }

    pub(crate) fn insert_point(&mut self, p: usize) {
        self.points.insert(p);
    }
}

impl PartialOrd for Relation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by arity, then domain, then the sorted tuple lists lexicographically.
impl Ord for Relation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.arity
            .cmp(&other.arity)
            .then_with(|| self.domain.cmp(&other.domain))
            .then_with(|| self.points.ones().cmp(other.points.ones()))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation({}^{} ", self.domain.name, self.arity)?;
        f.debug_set().entries(self.tuples()).finish()?;
        f.write_str(")")
    }
}

/// A total map `A^n -> B` stored as a row-major value table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteFunction {
    arity: usize,
    input: FiniteDomain,
    output: FiniteDomain,
    table: Vec<Element>,
}

impl FiniteFunction {
    pub fn new(arity: usize, input: &FiniteDomain, output: &FiniteDomain, table: Vec<Element>) -> Result<Self> {
        let positions = input.power(arity)?;
        if table.len() != positions {
            return Err(Error::arity("function table length", positions, table.len()));
        }
        output.check_tuple(&table)?;
        Ok(FiniteFunction {
            arity,
            input: input.clone(),
            output: output.clone(),
            table,
        })
    }

    pub fn from_fn(
        arity: usize,
        input: &FiniteDomain,
        output: &FiniteDomain,
        f: impl Fn(&[Element]) -> Element,
    ) -> Result<Self> {
        let positions = input.power(arity)?;
        let table = (0..positions).map(|p| f(&unrank(p, arity, input.size))).collect();
        FiniteFunction::new(arity, input, output, table)
    }

    /// The `index`-th `arity`-ary projection on `domain`.
    pub fn projection(domain: &FiniteDomain, arity: usize, index: usize) -> Result<Self> {
        if index >= arity {
            return Err(Error::Invalid(format!(
                "projection index {index} out of range for arity {arity}"
            )));
        }
        FiniteFunction::from_fn(arity, domain, domain, |t| t[index])
    }

    pub fn constant(arity: usize, input: &FiniteDomain, output: &FiniteDomain, value: Element) -> Result<Self> {
        output.check_element(value)?;
        FiniteFunction::from_fn(arity, input, output, |_| value)
    }

    pub(crate) fn from_table_unchecked(
        arity: usize,
        input: &FiniteDomain,
        output: &FiniteDomain,
        table: Vec<Element>,
    ) -> Self {
        FiniteFunction {
            arity,
            input: input.clone(),
            output: output.clone(),
            table,
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

    pub fn table(&self) -> &[Element] {
        &self.table
    }

    /// `f(t)`; `t` must be an in-range `n`-tuple.
    pub fn eval(&self, t: &[Element]) -> Element {
        debug_assert_eq!(t.len(), self.arity);
        self.table[rank(t, self.input.size)]
    }

    #[inline]
    pub fn eval_point(&self, p: usize) -> Element {
        self.table[p]
    }

    /// Input and output domains coincide.
    pub fn is_operation(&self) -> bool {
        self.input == self.output
    }

    pub fn is_projection(&self) -> bool {
        self.is_operation()
            && (0..self.arity)
                .any(|i| (0..self.table.len()).all(|p| self.table[p] == unrank(p, self.arity, self.input.size)[i]))
    }
}

impl fmt::Debug for FiniteFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Function({}^{} -> {} {:?})",
            self.input.name, self.arity, self.output.name, self.table
        )
    }
}

/// An `m x n` matrix, stored as its `n` columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    domain: FiniteDomain,
    rows: usize,
    columns: Vec<Tuple>,
}

impl Matrix {
    pub fn new(domain: &FiniteDomain, columns: Vec<Tuple>) -> Result<Self> {
        let rows = columns
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Invalid("a matrix needs at least one column".into()))?;
        check_arity(rows, "matrix rows")?;
        for c in &columns {
            if c.len() != rows {
                return Err(Error::arity("matrix column", rows, c.len()));
            }
            domain.check_tuple(c)?;
        }
        Ok(Matrix {
            domain: domain.clone(),
            rows,
            columns,
        })
    }

    /// Builds the matrix whose rows are `rows` (all of equal length).
    pub fn from_rows(domain: &FiniteDomain, rows: &[Tuple]) -> Result<Self> {
        let n = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Invalid("a matrix needs at least one row".into()))?;
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::arity("matrix row", n, bad.len()));
        }
        let columns = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Matrix::new(domain, columns)
    }

    pub fn domain(&self) -> &FiniteDomain {
        &self.domain
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Tuple] {
        &self.columns
    }

    pub fn row(&self, i: usize) -> Tuple {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn row_tuples(&self) -> impl Iterator<Item = Tuple> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }
}

/// The test `M ≺ R`: every column of `M` belongs to `R`.
pub fn columns_in_relation(m: &Matrix, r: &Relation) -> Result<bool> {
    m.domain.expect_same(r.domain(), "columns_in_relation")?;
    if m.rows != r.arity() {
        return Err(Error::arity("columns_in_relation", r.arity(), m.rows));
    }
    Ok(m.columns.iter().all(|c| r.contains(c)))
}

/// A map `l : n -> m` between index sets, written as its image sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexMap {
    target_arity: usize,
    images: Vec<usize>,
}

impl IndexMap {
    pub fn new(images: Vec<usize>, target_arity: usize) -> Result<Self> {
        check_arity(images.len(), "index map source")?;
        check_arity(target_arity, "index map target")?;
        if let Some(&bad) = images.iter().find(|&&i| i >= target_arity) {
            return Err(Error::Invalid(format!(
                "index map image {bad} is not below target arity {target_arity}"
            )));
        }
        Ok(IndexMap { target_arity, images })
    }

    pub fn source_arity(&self) -> usize {
        self.images.len()
    }

    pub fn target_arity(&self) -> usize {
        self.target_arity
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// All maps `source -> target` in lexicographic order of their image sequences.
    pub fn all(source: usize, target: usize) -> impl Iterator<Item = IndexMap> {
        let count = if source == 0 || target == 0 {
            0
        } else {
            target.checked_pow(source as u32).unwrap_or(usize::MAX)
        };
        (0..count).map(move |p| IndexMap {
            target_arity: target,
            images: unrank(p, source, target),
        })
    }
}

/// An `A`-to-`B` constraint `(R, S)` with `R ⊆ A^m`, `S ⊆ B^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    antecedent: Relation,
    consequent: Relation,
}

impl Constraint {
    pub fn new(antecedent: Relation, consequent: Relation) -> Result<Self> {
        if antecedent.arity() != consequent.arity() {
            return Err(Error::arity(
                "constraint consequent",
                antecedent.arity(),
                consequent.arity(),
            ));
        }
        Ok(Constraint { antecedent, consequent })
    }

    pub fn antecedent(&self) -> &Relation {
        &self.antecedent
    }

    pub fn consequent(&self) -> &Relation {
        &self.consequent
    }

    pub fn arity(&self) -> usize {
        self.antecedent.arity()
    }

    pub fn source(&self) -> &FiniteDomain {
        self.antecedent.domain()
    }

    pub fn target(&self) -> &FiniteDomain {
        self.consequent.domain()
    }

    pub fn into_parts(self) -> (Relation, Relation) {
        (self.antecedent, self.consequent)
    }
}
