//! Depth-first search over function tables `A^n -> B` under constraint checks.
//!
//! Positions (encoded input tuples) are assigned in increasing order with
//! values tried in increasing order, so solutions come out in lexicographic
//! table order. Each check reads a fixed vector of positions and is tested as
//! soon as its largest position is assigned.

use std::collections::HashSet;
use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::error::Result;
use crate::limits::Limits;
use crate::model::{Constraint, Element, FiniteDomain, Relation, Tuple};
use crate::satisfaction::walk_matrices;

struct Check {
    rows: Vec<usize>,
    rel: usize,
    member: bool,
}

pub(crate) struct TableSearch {
    arity: usize,
    input: FiniteDomain,
    output: FiniteDomain,
    positions: usize,
    rels: Vec<Relation>,
    buckets: Vec<Vec<Check>>,
    seen: HashSet<(Vec<usize>, usize, bool)>,
}

const PREFIX_BRANCHES: usize = 64;

impl TableSearch {
    pub(crate) fn new(arity: usize, input: &FiniteDomain, output: &FiniteDomain, limits: &Limits) -> Result<Self> {
        let positions = input.power(arity)?;
        limits.check_table(positions, output.size(), "function table search")?;
        Ok(TableSearch {
            arity,
            input: input.clone(),
            output: output.clone(),
            positions,
            rels: Vec::new(),
            buckets: (0..positions).map(|_| Vec::new()).collect(),
            seen: HashSet::new(),
        })
    }

    fn add_check(&mut self, rows: Vec<usize>, rel: usize, member: bool) {
        if let Some(&last) = rows.iter().max() {
            if self.seen.insert((rows.clone(), rel, member)) {
                self.buckets[last].push(Check { rows, rel, member });
            }
        }
    }

    fn push_relation(&mut self, r: Relation) -> usize {
        self.rels.push(r);
        self.rels.len() - 1
    }

    /// Requires `gM ∈ S` for every `M ≺ R`.
    pub(crate) fn require(&mut self, c: &Constraint) -> Result<()> {
        self.input.expect_same(c.source(), "table search antecedent")?;
        self.output.expect_same(c.target(), "table search consequent")?;
        if c.antecedent().is_empty() || c.consequent().is_full() {
            return Ok(());
        }
        let columns: Vec<Tuple> = c.antecedent().tuples().collect();
        let mut row_sets = HashSet::new();
        walk_matrices(&columns, c.arity(), self.arity, self.input.size(), |rows, _| {
            row_sets.insert(rows.to_vec());
            ControlFlow::<()>::Continue(())
        });
        let rel = self.push_relation(c.consequent().clone());
        let mut row_sets: Vec<Vec<usize>> = row_sets.into_iter().collect();
        row_sets.sort_unstable();
        for rows in row_sets {
            self.add_check(rows, rel, true);
        }
        Ok(())
    }

    /// Requires the tuple read off `rows` to lie outside `s`.
    pub(crate) fn forbid(&mut self, rows: Vec<usize>, s: &Relation) -> Result<()> {
        self.output.expect_same(s.domain(), "table search exclusion")?;
        let rel = self.push_relation(s.clone());
        self.add_check(rows, rel, false);
        Ok(())
    }

    fn consistent(&self, table: &[Element], pos: usize) -> bool {
        let base = self.output.size();
        self.buckets[pos].iter().all(|c| {
            let p = c.rows.iter().fold(0, |acc, &r| acc * base + table[r]);
            self.rels[c.rel].contains_point(p) == c.member
        })
    }

    /// Visits every consistent completion of `table[..lo]` over positions
    /// `lo..hi`, in lexicographic order.
    fn dfs<T>(
        &self,
        table: &mut [Element],
        lo: usize,
        hi: usize,
        mut visit: impl FnMut(&[Element]) -> ControlFlow<T>,
    ) -> Option<T> {
        if lo == hi {
            return visit(&table[..hi]).break_value();
        }
        let values = self.output.size();
        let mut next = vec![0usize; hi + 1];
        let mut pos = lo;
        loop {
            if pos == hi {
                if let ControlFlow::Break(b) = visit(&table[..hi]) {
                    return Some(b);
                }
                pos -= 1;
                continue;
            }
            if next[pos] == values {
                if pos == lo {
                    return None;
                }
                pos -= 1;
                continue;
            }
            table[pos] = next[pos];
            next[pos] += 1;
            if self.consistent(table, pos) {
                pos += 1;
                next[pos] = 0;
            }
        }
    }

    fn prefixes(&self) -> (usize, Vec<Vec<Element>>) {
        let mut depth = 0;
        let mut branches = 1usize;
        while depth < self.positions && branches < PREFIX_BRANCHES {
            branches = branches.saturating_mul(self.output.size());
            depth += 1;
        }
        let mut table = vec![0; self.positions];
        let mut out = Vec::new();
        self.dfs(&mut table, 0, depth, |t| {
            out.push(t.to_vec());
            ControlFlow::<()>::Continue(())
        });
        (depth, out)
    }

    /// The lexicographically least table passing every check.
    pub(crate) fn first(&self) -> Option<Vec<Element>> {
        let (depth, prefixes) = self.prefixes();
        prefixes.into_par_iter().find_map_first(|prefix| {
            let mut table = prefix;
            table.resize(self.positions, 0);
            self.dfs(&mut table, depth, self.positions, |t| ControlFlow::Break(t.to_vec()))
        })
    }

    /// Every table passing every check, in lexicographic order.
    pub(crate) fn all(&self) -> Vec<Vec<Element>> {
        let (depth, prefixes) = self.prefixes();
        let chunks: Vec<Vec<Vec<Element>>> = prefixes
            .into_par_iter()
            .map(|prefix| {
                let mut table = prefix;
                table.resize(self.positions, 0);
                let mut found = Vec::new();
                self.dfs(&mut table, depth, self.positions, |t| {
                    found.push(t.to_vec());
                    ControlFlow::<()>::Continue(())
                });
                found
            })
            .collect();
        chunks.into_iter().flatten().collect()
    }
}
