//! Families of partial functions, extensibility, and a randomized check that
//! the constraints satisfied by an extensible family are closed under the
//! basic constraint-forming operations.

use std::collections::{BTreeMap, BTreeSet};

use rand::RngExt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limits::{saturating_pow, Limits};
use crate::minors::{equality_constraint, intersect_consequents, relax, simple_minor};
use crate::model::{unrank, Constraint, Element, FiniteDomain, Relation, Tuple};
use crate::sample;
use crate::satisfaction::{partial_image, partial_satisfies, PartialFunction};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialFamily {
    input: FiniteDomain,
    output: FiniteDomain,
    members: BTreeSet<PartialFunction>,
}

impl PartialFamily {
    pub fn new<I>(input: &FiniteDomain, output: &FiniteDomain, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = PartialFunction>,
    {
        let mut family = PartialFamily::empty(input, output);
        for p in members {
            family.insert(p)?;
        }
        Ok(family)
    }

    pub fn empty(input: &FiniteDomain, output: &FiniteDomain) -> Self {
        PartialFamily {
            input: input.clone(),
            output: output.clone(),
            members: BTreeSet::new(),
        }
    }

    pub fn insert(&mut self, p: PartialFunction) -> Result<bool> {
        self.input.expect_same(p.input(), "partial family input")?;
        self.output.expect_same(p.output(), "partial family output")?;
        Ok(self.members.insert(p))
    }

    pub fn input(&self) -> &FiniteDomain {
        &self.input
    }

    pub fn output(&self) -> &FiniteDomain {
        &self.output
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &PartialFunction) -> bool {
        self.members.contains(p)
    }

    pub fn members(&self) -> impl Iterator<Item = &PartialFunction> + '_ {
        self.members.iter()
    }
}

fn partial_functions(
    arities: &[usize],
    input: &FiniteDomain,
    output: &FiniteDomain,
    limits: &Limits,
    keep: impl Fn(&BTreeMap<usize, Element>) -> bool,
) -> Result<PartialFamily> {
    let mut family = PartialFamily::empty(input, output);
    for &n in arities {
        let space = input.power(n)?;
        let count = saturating_pow(output.size() + 1, space);
        limits.check_candidates(count, "partial function enumeration")?;
        // digit 0 leaves the point undefined, digit v + 1 maps it to v
        for code in 0..count as usize {
            let graph: BTreeMap<usize, Element> = unrank(code, space, output.size() + 1)
                .into_iter()
                .enumerate()
                .filter(|&(_, d)| d > 0)
                .map(|(p, d)| (p, d - 1))
                .collect();
            if keep(&graph) {
                family
                    .members
                    .insert(PartialFunction::from_points(n, input, output, graph)?);
            }
        }
    }
    Ok(family)
}

/// Every partial function of the given arities, including the empty one.
pub fn all_partial_functions(
    arities: &[usize],
    input: &FiniteDomain,
    output: &FiniteDomain,
    limits: &Limits,
) -> Result<PartialFamily> {
    partial_functions(arities, input, output, limits, |_| true)
}

/// Every injective partial function of the given arities.
pub fn injective_partial_functions(
    arities: &[usize],
    input: &FiniteDomain,
    output: &FiniteDomain,
    limits: &Limits,
) -> Result<PartialFamily> {
    partial_functions(arities, input, output, limits, |g| {
        let values: BTreeSet<Element> = g.values().copied().collect();
        values.len() == g.len()
    })
}

/// A member `p` and a point `y` outside its domain such that no member
/// extends `p` to the domain plus `y`; the least such pair, or `None` when the
/// family is extensible.
pub fn extension_gap(family: &PartialFamily) -> Result<Option<(PartialFunction, Tuple)>> {
    let members: Vec<&PartialFunction> = family.members().collect();
    let gap = members
        .par_iter()
        .map(|p| -> Result<Option<(PartialFunction, Tuple)>> {
            let space = p.input().power(p.arity())?;
            for y in (0..space).filter(|y| p.get_point(*y).is_none()) {
                let mut extended = false;
                for b in family.output.elements() {
                    if family.contains(&p.extend(y, b)?) {
                        extended = true;
                        break;
                    }
                }
                if !extended {
                    return Ok(Some(((*p).clone(), unrank(y, p.arity(), p.input().size()))));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(gap.into_iter().flatten().next())
}

pub fn is_extensible_family(family: &PartialFamily) -> Result<bool> {
    Ok(extension_gap(family)?.is_none())
}

/// The constraints of arity at most a bound satisfied by every member of a
/// family, stored as the least consequent for each antecedent: `(R, S)` is in
/// the set iff `S` contains the stored consequent for `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatisfiedConstraints {
    least: BTreeMap<Relation, Relation>,
    arity_bound: usize,
}

impl SatisfiedConstraints {
    pub fn compute(family: &PartialFamily, arity_bound: usize, limits: &Limits) -> Result<Self> {
        let (a, b) = (&family.input, &family.output);
        let mut least = BTreeMap::new();
        for m in 1..=arity_bound {
            let space = a.power(m)?;
            limits.check_candidates_log2(space as f64, "antecedent enumeration")?;
            if space >= 64 {
                return Err(Error::Budget("antecedent enumeration: too many points".into()));
            }
            let rows: Vec<(Relation, Relation)> = (0..1u64 << space)
                .into_par_iter()
                .map(|mask| -> Result<(Relation, Relation)> {
                    let r = Relation::from_points(a, m, (0..space).filter(|p| mask >> p & 1 == 1))?;
                    let mut s = Relation::empty(b, m)?;
                    for p in family.members() {
                        s = s.union(&partial_image(p, &r)?)?;
                    }
                    Ok((r, s))
                })
                .collect::<Result<_>>()?;
            least.extend(rows);
        }
        Ok(SatisfiedConstraints { least, arity_bound })
    }

    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    pub fn contains(&self, c: &Constraint) -> bool {
        self.least
            .get(c.antecedent())
            .is_some_and(|s| s.is_subset(c.consequent()))
    }

    pub fn least_consequent(&self, r: &Relation) -> Option<&Relation> {
        self.least.get(r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialKind {
    Intersection,
    SimpleMinor,
    Relaxation,
}

impl TrialKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TrialKind::Intersection => "intersection",
            TrialKind::SimpleMinor => "simple-minor",
            TrialKind::Relaxation => "relaxation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trial {
    pub index: usize,
    pub kind: TrialKind,
    pub derived: Constraint,
    /// Every member of the family satisfies the derived constraint.
    pub satisfied: bool,
    /// The derived constraint is in the computed set.
    pub member: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarnessReport {
    pub family_size: usize,
    pub equality: bool,
    pub empty: bool,
    pub trials: Vec<Trial>,
}

impl HarnessReport {
    pub fn violations(&self) -> usize {
        self.trials.iter().filter(|t| !t.satisfied || !t.member).count()
            + usize::from(!self.equality)
            + usize::from(!self.empty)
    }
}

fn family_satisfies(family: &PartialFamily, c: &Constraint) -> Result<bool> {
    for p in family.members() {
        if !partial_satisfies(p, c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn sample_member(rng: &mut sample::Rng, t: &SatisfiedConstraints, a: &FiniteDomain, m: usize) -> Result<Constraint> {
    let density = rng.random_range(0.1..0.6);
    let r = sample::relation(rng, a, m, density)?;
    let least = t
        .least_consequent(&r)
        .ok_or_else(|| Error::Internal("antecedent missing from the satisfied set".into()))?;
    let extra = rng.random_range(0.0..0.5);
    Constraint::new(r, sample::superset(rng, least, extra)?)
}

fn run_trial(index: usize, family: &PartialFamily, t: &SatisfiedConstraints, seed: u64) -> Result<Trial> {
    let mut rng = sample::rng_for(seed, index as u64);
    let a = &family.input;
    let bound = t.arity_bound;
    let kind = match index % 3 {
        0 => TrialKind::SimpleMinor,
        1 => TrialKind::Intersection,
        _ => TrialKind::Relaxation,
    };
    let derived = match kind {
        TrialKind::Intersection => {
            let m = rng.random_range(1..=bound);
            let first = sample_member(&mut rng, t, a, m)?;
            let least = t.least_consequent(first.antecedent()).unwrap().clone();
            let mut family_cs = vec![first.clone()];
            for _ in 0..rng.random_range(1..=2) {
                let extra = rng.random_range(0.0..0.5);
                family_cs.push(Constraint::new(
                    first.antecedent().clone(),
                    sample::superset(&mut rng, &least, extra)?,
                )?);
            }
            intersect_consequents(&family_cs)?
        }
        TrialKind::SimpleMinor => {
            let n0 = rng.random_range(1..=bound);
            let c0 = sample_member(&mut rng, t, a, n0)?;
            let m = rng.random_range(1..=bound);
            let vars = sample::indeterminate_names(rng.random_range(0..=2));
            let h = sample::scheme_map(&mut rng, n0, m, &vars);
            simple_minor(&c0, &h, m, &vars)?
        }
        TrialKind::Relaxation => {
            let m = rng.random_range(1..=bound);
            let c0 = sample_member(&mut rng, t, a, m)?;
            let keep = rng.random_range(0.3..1.0);
            let r = sample::subset(&mut rng, c0.antecedent(), keep)?;
            let extra = rng.random_range(0.0..0.5);
            let s = sample::superset(&mut rng, c0.consequent(), extra)?;
            relax(&c0, r, s)?
        }
    };
    Ok(Trial {
        index,
        kind,
        satisfied: family_satisfies(family, &derived)?,
        member: t.contains(&derived),
        derived,
    })
}

/// Computes the constraints of arity at most `arity_bound` satisfied by the
/// family, checks that the equality and empty constraints are among them,
/// and derives `trials` random constraints from members by intersecting
/// consequents, taking simple minors and relaxing. Each derived constraint
/// is re-checked against every member of the family. The family must be
/// extensible.
pub fn family_closure_harness(
    family: &PartialFamily,
    trials: usize,
    arity_bound: usize,
    seed: u64,
    limits: &Limits,
) -> Result<HarnessReport> {
    if arity_bound == 0 {
        return Err(Error::Invalid("the arity bound must be positive".into()));
    }
    if let Some((p, y)) = extension_gap(family)? {
        return Err(Error::Precondition(format!(
            "the family is not extensible: {:?} cannot be extended to {y:?}",
            p.graph()
        )));
    }
    let t = SatisfiedConstraints::compute(family, arity_bound, limits)?;
    let (a, b) = (&family.input, &family.output);
    let equality = arity_bound < 2 || {
        let eq = equality_constraint(a, b)?;
        t.contains(&eq) && family_satisfies(family, &eq)?
    };
    let mut empty = true;
    for m in 1..=arity_bound {
        let c = Constraint::new(Relation::empty(a, m)?, Relation::empty(b, m)?)?;
        empty &= t.contains(&c) && family_satisfies(family, &c)?;
    }
    let trials = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(i, family, &t, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(HarnessReport {
        family_size: family.len(),
        equality,
        empty,
        trials,
    })
}
