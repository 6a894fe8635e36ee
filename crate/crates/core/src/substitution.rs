//! Simple variable substitution, substitution closure, and the literal
//! local-closure operator on function classes.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::limits::{saturating_pow, Limits};
use crate::model::{rank, unrank, FiniteDomain, FiniteFunction, IndexMap};

/// A set of `B`-valued functions on `A` of arities up to `arity_bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunctionClass {
    input: FiniteDomain,
    output: FiniteDomain,
    arity_bound: usize,
    members: BTreeSet<FiniteFunction>,
}

impl FunctionClass {
    pub fn new<I>(input: &FiniteDomain, output: &FiniteDomain, arity_bound: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = FiniteFunction>,
    {
        let mut class = FunctionClass::empty(input, output, arity_bound);
        for f in members {
            class.check_member(&f)?;
            class.members.insert(f);
        }
        Ok(class)
    }

    pub fn empty(input: &FiniteDomain, output: &FiniteDomain, arity_bound: usize) -> Self {
        FunctionClass {
            input: input.clone(),
            output: output.clone(),
            arity_bound,
            members: BTreeSet::new(),
        }
    }

    /// Every function of arity `1..=arity_bound`.
    pub fn all_functions(
        input: &FiniteDomain,
        output: &FiniteDomain,
        arity_bound: usize,
        limits: &Limits,
    ) -> Result<Self> {
        let mut class = FunctionClass::empty(input, output, arity_bound);
        for n in 1..=arity_bound {
            for f in all_tables(n, input, output, limits)? {
                class.members.insert(f);
            }
        }
        Ok(class)
    }

    fn check_member(&self, f: &FiniteFunction) -> Result<()> {
        self.input.expect_same(f.input(), "function class input")?;
        self.output.expect_same(f.output(), "function class output")?;
        if f.arity() > self.arity_bound {
            return Err(Error::Invalid(format!(
                "member of arity {} exceeds the class bound {}",
                f.arity(),
                self.arity_bound
            )));
        }
        Ok(())
    }

    pub fn input(&self) -> &FiniteDomain {
        &self.input
    }

    pub fn output(&self) -> &FiniteDomain {
        &self.output
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

    pub fn contains(&self, f: &FiniteFunction) -> bool {
        self.members.contains(f)
    }

    /// Members in canonical order (arity, then table).
    pub fn members(&self) -> impl Iterator<Item = &FiniteFunction> + '_ {
        self.members.iter()
    }

    pub fn of_arity(&self, n: usize) -> impl Iterator<Item = &FiniteFunction> + '_ {
        self.members.iter().filter(move |f| f.arity() == n)
    }

    pub fn insert(&mut self, f: FiniteFunction) -> Result<bool> {
        self.check_member(&f)?;
        Ok(self.members.insert(f))
    }

    pub fn is_subset(&self, other: &FunctionClass) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn with_bound(mut self, arity_bound: usize) -> Result<Self> {
        if let Some(f) = self.members.iter().find(|f| f.arity() > arity_bound) {
            return Err(Error::Invalid(format!(
                "member of arity {} exceeds the new bound {arity_bound}",
                f.arity()
            )));
        }
        self.arity_bound = arity_bound;
        Ok(self)
    }
}

/// All `n`-ary tables `A^n -> B` in lexicographic order.
pub(crate) fn all_tables(
    n: usize,
    input: &FiniteDomain,
    output: &FiniteDomain,
    limits: &Limits,
) -> Result<impl Iterator<Item = FiniteFunction>> {
    let positions = input.power(n)?;
    limits.check_table(positions, output.size(), "function enumeration")?;
    let count = saturating_pow(output.size(), positions);
    limits.check_candidates(count, "function enumeration")?;
    let (input, output) = (input.clone(), output.clone());
    Ok((0..count as usize)
        .map(move |k| FiniteFunction::from_table_unchecked(n, &input, &output, unrank(k, positions, output.size()))))
}

/// `g(a) = f(a ∘ l)` for every `a ∈ A^m`.
pub fn substitute(f: &FiniteFunction, l: &IndexMap) -> Result<FiniteFunction> {
    if l.source_arity() != f.arity() {
        return Err(Error::arity("substitution source", f.arity(), l.source_arity()));
    }
    let m = l.target_arity();
    let size = f.input().size();
    let positions = f.input().power(m)?;
    let images = l.images();
    let mut inner = vec![0; f.arity()];
    let table = (0..positions)
        .map(|p| {
            let a = unrank(p, m, size);
            for (slot, &i) in inner.iter_mut().zip(images) {
                *slot = a[i];
            }
            f.eval_point(rank(&inner, size))
        })
        .collect();
    Ok(FiniteFunction::from_table_unchecked(m, f.input(), f.output(), table))
}

/// Least superset of `k` closed under substitutions with target arity at most
/// `arity_bound`, computed as a fixpoint (arities ascending, index maps in
/// lexicographic order).
pub fn svs_closure(k: &FunctionClass, arity_bound: usize) -> Result<FunctionClass> {
    let bound = arity_bound.max(k.arity_bound);
    let mut closed = FunctionClass::empty(&k.input, &k.output, bound);
    let mut frontier: Vec<FiniteFunction> = k.members.iter().cloned().collect();
    closed.members.extend(frontier.iter().cloned());
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for m in 1..=arity_bound {
                for l in IndexMap::all(f.arity(), m) {
                    let g = substitute(f, &l)?;
                    if !closed.members.contains(&g) {
                        closed.members.insert(g.clone());
                        next.push(g);
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(closed)
}

/// Whether `k` equals its substitution closure at its own bound.
pub fn is_svs_closed(k: &FunctionClass) -> Result<bool> {
    Ok(svs_closure(k, k.arity_bound)?.members == k.members)
}

/// Every `f` of arity at most the class bound whose restriction to each subset
/// `F ⊆ A^n` agrees with the restriction of some member. The subsets are
/// enumerated literally; on finite domains the result is `k` itself.
pub fn local_closure_functions(k: &FunctionClass, limits: &Limits) -> Result<FunctionClass> {
    let mut out = FunctionClass::empty(&k.input, &k.output, k.arity_bound);
    for n in 1..=k.arity_bound {
        let positions = k.input.power(n)?;
        limits.check_candidates_log2(positions as f64, "local closure subsets")?;
        let members: Vec<&FiniteFunction> = k.of_arity(n).collect();
        for f in all_tables(n, &k.input, &k.output, limits)? {
            let every_restriction_matches = (0u64..1 << positions).all(|subset| {
                members.iter().any(|g| {
                    (0..positions)
                        .filter(|&p| subset >> p & 1 == 1)
                        .all(|p| g.eval_point(p) == f.eval_point(p))
                })
            });
            if every_restriction_matches {
                out.members.insert(f);
            }
        }
    }
    Ok(out)
}
