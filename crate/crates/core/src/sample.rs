//! Seeded random instances for sweeps and property checks.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::minors::{MinorScheme, SchemeEntry};
use crate::model::{Constraint, FiniteDomain, FiniteFunction, IndexMap, Relation};

pub type Rng = ChaCha8Rng;

/// An independent generator for item `index` of a run seeded with `seed`.
pub fn rng_for(seed: u64, index: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Each tuple of `d^m` is included with probability `density`.
pub fn relation(rng: &mut Rng, d: &FiniteDomain, m: usize, density: f64) -> Result<Relation> {
    let space = d.power(m)?;
    let points: Vec<usize> = (0..space).filter(|_| rng.random_bool(density)).collect();
    Relation::from_points(d, m, points)
}

/// `r` plus each missing tuple with probability `density`.
pub fn superset(rng: &mut Rng, r: &Relation, density: f64) -> Result<Relation> {
    let extra = relation(rng, r.domain(), r.arity(), density)?;
    r.union(&extra)
}

/// Each tuple of `r` kept with probability `keep`.
pub fn subset(rng: &mut Rng, r: &Relation, keep: f64) -> Result<Relation> {
    let points: Vec<usize> = r.points().filter(|_| rng.random_bool(keep)).collect();
    Relation::from_points(r.domain(), r.arity(), points)
}

pub fn function(rng: &mut Rng, n: usize, a: &FiniteDomain, b: &FiniteDomain) -> Result<FiniteFunction> {
    let positions = a.power(n)?;
    let table = (0..positions).map(|_| rng.random_range(0..b.size())).collect();
    FiniteFunction::new(n, a, b, table)
}

pub fn constraint(rng: &mut Rng, a: &FiniteDomain, b: &FiniteDomain, m: usize) -> Result<Constraint> {
    let ra = rng.random_range(0.1..0.7);
    let rb = rng.random_range(0.2..0.9);
    Constraint::new(relation(rng, a, m, ra)?, relation(rng, b, m, rb)?)
}

pub fn index_map(rng: &mut Rng, source: usize, target: usize) -> Result<IndexMap> {
    IndexMap::new((0..source).map(|_| rng.random_range(0..target)).collect(), target)
}

/// Names `v0, v1, ...`.
pub fn indeterminate_names(count: usize) -> Vec<String> {
    (0..count).map(|i| format!("v{i}")).collect()
}

/// A uniformly filled map of length `source` over `t0..t{target-1}` and `vars`.
pub fn scheme_map(rng: &mut Rng, source: usize, target: usize, vars: &[String]) -> Vec<SchemeEntry> {
    (0..source)
        .map(|_| {
            let k = rng.random_range(0..target + vars.len());
            if k < target {
                SchemeEntry::Target(k)
            } else {
                SchemeEntry::Indeterminate(vars[k - target].clone())
            }
        })
        .collect()
}

/// A scheme with the given target and map lengths and `vars` indeterminates.
pub fn scheme(rng: &mut Rng, target: usize, sources: &[usize], vars: usize) -> Result<MinorScheme> {
    let names = indeterminate_names(vars);
    let maps = sources.iter().map(|&n| scheme_map(rng, n, target, &names)).collect();
    MinorScheme::new(target, names, maps)
}
