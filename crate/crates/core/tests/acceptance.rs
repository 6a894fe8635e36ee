//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Each criterion returns its serialized output so the determinism check can
//! rerun it under different thread counts and compare the bytes.

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::RngExt;
use rayon::prelude::*;

use relcon::cli::render::{compact_constraint, compact_function, relation_text};
use relcon::cli::{self, Workspace};
use relcon::clones::{clone_generate, general_superposition, inv, pol, superposition_decomposition, LabelSet};
use relcon::galois::{
    constraints_satisfied_by, functions_satisfying, galois_roundtrip_report, local_closure_constraints,
    separating_function, ConstraintSet, FunctionSeparation, RoundtripOutcome,
};
use relcon::minors::{
    canonical_constraints, compose_schemes, intersect_consequents, is_conjunctive_minor, relax, tight_minor_constraint,
    tight_minor_relations, MinorScheme,
};
use relcon::partials::{family_closure_harness, injective_partial_functions, is_extensible_family};
use relcon::sample::{self, rng_for, Rng};
use relcon::satisfaction::{image_of_relation, satisfies};
use relcon::substitution::{local_closure_functions, svs_closure, FunctionClass};
use relcon::{oracle, Constraint, FiniteDomain, FiniteFunction, Limits, Relation};

/// Outcome of one criterion run.
#[derive(Default)]
struct Run {
    failures: Vec<String>,
    output: String,
    oracle_checks: usize,
    oracle_mismatches: Vec<String>,
    summary: String,
}

impl Run {
    fn fail(&mut self, msg: impl Into<String>) {
        if self.failures.len() < 5 {
            self.failures.push(msg.into());
        } else if self.failures.len() == 5 {
            self.failures.push("...".into());
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.fail(msg());
        }
    }

    fn oracle_relation(&mut self, what: &str, fast: &Relation, naive: &Relation) {
        self.oracle_checks += 1;
        let (a, b) = (relation_text("r", fast), relation_text("r", naive));
        if a != b && self.oracle_mismatches.len() < 5 {
            self.oracle_mismatches
                .push(format!("{what}: optimized\n{a}oracle\n{b}"));
        }
    }

    fn oracle_image(&mut self, f: &FiniteFunction, r: &Relation) -> Relation {
        let fast = image_of_relation(f, r).unwrap();
        let naive = oracle::image(f, r).unwrap();
        self.oracle_relation("image", &fast, &naive);
        fast
    }

    fn oracle_minor(&mut self, h: &MinorScheme, rels: &[Relation]) -> Relation {
        let fast = tight_minor_relations(h, rels).unwrap();
        let naive = oracle::tight_minor(h, rels).unwrap();
        self.oracle_relation("tight minor", &fast, &naive);
        fast
    }

    /// Merges per-instance runs in index order.
    fn merge(parts: Vec<Run>) -> Run {
        let mut out = Run::default();
        for p in parts {
            for f in p.failures {
                out.fail(f);
            }
            out.output.push_str(&p.output);
            out.oracle_checks += p.oracle_checks;
            for m in p.oracle_mismatches {
                if out.oracle_mismatches.len() < 5 {
                    out.oracle_mismatches.push(m);
                }
            }
        }
        out
    }
}

fn domain(name: &str, size: usize) -> FiniteDomain {
    FiniteDomain::new(name, size).unwrap()
}

fn bool_fn(arity: usize, table: &[usize]) -> FiniteFunction {
    let a = domain("A", 2);
    FiniteFunction::new(arity, &a, &a, table.to_vec()).unwrap()
}

fn projections_upto(a: &FiniteDomain, bound: usize) -> Vec<FiniteFunction> {
    (1..=bound)
        .flat_map(|n| (0..n).map(move |i| (n, i)))
        .map(|(n, i)| FiniteFunction::projection(a, n, i).unwrap())
        .collect()
}

/// Constraint arity, family size and source arities for one random instance.
fn random_family(rng: &mut Rng, a: &FiniteDomain, b: &FiniteDomain) -> (Vec<usize>, Vec<Relation>) {
    let j = rng.random_range(1..=3);
    let sources: Vec<usize> = (0..j).map(|_| rng.random_range(1..=3)).collect();
    let rels = sources
        .iter()
        .map(|&n| {
            let d = rng.random_range(0.1..0.6);
            sample::relation(rng, a, n, d).unwrap()
        })
        .collect();
    let _ = b;
    (sources, rels)
}

fn criterion1(seed: u64) -> Run {
    const N: usize = 1000;
    let parts: Vec<Run> = (0..N)
        .into_par_iter()
        .map(|i| {
            let mut run = Run::default();
            let mut rng = rng_for(seed, i as u64);
            let a = domain("A", rng.random_range(1..=3));
            let b = domain("B", rng.random_range(1..=3));
            let n = rng.random_range(1..=3);
            let f = sample::function(&mut rng, n, &a, &b).unwrap();
            let (sources, antecedents) = random_family(&mut rng, &a, &b);
            let target = rng.random_range(1..=3);
            let vars = rng.random_range(0..=2);
            let h = sample::scheme(&mut rng, target, &sources, vars).unwrap();
            let mut family = Vec::new();
            for r in &antecedents {
                let image = run.oracle_image(&f, r);
                let extra = rng.random_range(0.0..0.4);
                let s = sample::superset(&mut rng, &image, extra).unwrap();
                family.push(Constraint::new(r.clone(), s).unwrap());
            }
            for c in &family {
                run.check(satisfies(&f, c).unwrap() && oracle::satisfies(&f, c).unwrap(), || {
                    format!("instance {i}: family member not satisfied")
                });
            }
            let tight = tight_minor_constraint(&h, &family).unwrap();
            let rs: Vec<Relation> = family.iter().map(|c| c.antecedent().clone()).collect();
            let ss: Vec<Relation> = family.iter().map(|c| c.consequent().clone()).collect();
            let r = run.oracle_minor(&h, &rs);
            let s = run.oracle_minor(&h, &ss);
            run.check(tight.antecedent() == &r && tight.consequent() == &s, || {
                format!("instance {i}: tight minor constraint disagrees with componentwise minors")
            });
            run.oracle_image(&f, tight.antecedent());
            let keep = rng.random_range(0.3..1.0);
            let extra = rng.random_range(0.0..0.5);
            let relaxed = Constraint::new(
                sample::subset(&mut rng, tight.antecedent(), keep).unwrap(),
                sample::superset(&mut rng, tight.consequent(), extra).unwrap(),
            )
            .unwrap();
            run.check(is_conjunctive_minor(&relaxed, &h, &family).unwrap(), || {
                format!("instance {i}: relaxation not recognised as a conjunctive minor")
            });
            let ok_tight = satisfies(&f, &tight).unwrap();
            let ok_relaxed = satisfies(&f, &relaxed).unwrap();
            run.check(ok_tight == oracle::satisfies(&f, &tight).unwrap(), || {
                format!("instance {i}: satisfies disagrees with the oracle")
            });
            run.check(ok_tight && ok_relaxed, || {
                format!(
                    "instance {i}: f={} violates minor {} of family",
                    compact_function(&f),
                    compact_constraint(&tight)
                )
            });
            run.output = format!("{i} {} {ok_tight} {ok_relaxed}\n", compact_constraint(&tight));
            run
        })
        .collect();
    let mut run = Run::merge(parts);
    let nonempty = run.output.lines().filter(|l| !l.contains(" ({},")).count();
    run.summary = format!("{N} instances, {nonempty} with non-empty minor antecedent");
    run
}

fn criterion2(seed: u64) -> Run {
    const N: usize = 500;
    let parts: Vec<Run> = (0..N)
        .into_par_iter()
        .map(|i| {
            let mut run = Run::default();
            let mut rng = rng_for(seed, i as u64);
            let a = domain("A", rng.random_range(1..=3));
            let target = rng.random_range(1..=3);
            let j = rng.random_range(1..=3);
            let sources: Vec<usize> = (0..j).map(|_| rng.random_range(1..=3)).collect();
            let vars = rng.random_range(0..=2);
            let h = sample::scheme(&mut rng, target, &sources, vars).unwrap();
            let mut inner = Vec::new();
            let mut leaves = Vec::new();
            let mut nested = Vec::new();
            for &n in &sources {
                let k = rng.random_range(1..=2);
                let leaf_arities: Vec<usize> = (0..k).map(|_| rng.random_range(1..=3)).collect();
                let hv = rng.random_range(0..=2);
                let hj = sample::scheme(&mut rng, n, &leaf_arities, hv).unwrap();
                let rels: Vec<Relation> = leaf_arities
                    .iter()
                    .map(|&m| {
                        let d = rng.random_range(0.2..0.8);
                        sample::relation(&mut rng, &a, m, d).unwrap()
                    })
                    .collect();
                nested.push(run.oracle_minor(&hj, &rels));
                leaves.extend(rels);
                inner.push(hj);
            }
            let composite = compose_schemes(&h, &inner).unwrap();
            let direct = run.oracle_minor(&composite, &leaves);
            let stepwise = run.oracle_minor(&h, &nested);
            run.check(direct == stepwise, || {
                format!("instance {i}: composite scheme minor differs from nested minors")
            });
            run.output = format!("{i} {}\n", direct.len());
            run
        })
        .collect();
    let mut run = Run::merge(parts);
    run.summary = format!("{N} instances");
    run
}

fn criterion3() -> Run {
    let a = domain("A", 2);
    let limits = Limits::default();
    let mut run = Run::default();
    let classes = [
        ("AND", vec![bool_fn(2, &[0, 0, 0, 1])]),
        ("projections", projections_upto(&a, 2)),
        ("NAND", vec![bool_fn(2, &[1, 1, 1, 0])]),
    ];
    let mut total = 0;
    for (name, gens) in classes {
        let k = svs_closure(&FunctionClass::new(&a, &a, 2, gens).unwrap(), 2).unwrap();
        let report = galois_roundtrip_report(&k, &limits).unwrap();
        let expected = 4 + 16 - k.len();
        run.check(report.entries.len() == expected, || {
            format!(
                "{name}: {} non-members reported, {expected} expected",
                report.entries.len()
            )
        });
        writeln!(run.output, "class {name} members {}", k.len()).unwrap();
        for e in &report.entries {
            match &e.outcome {
                RoundtripOutcome::Separated { constraint, .. } => {
                    let g = &e.function;
                    let by_members = k.members().all(|f| satisfies(f, constraint).unwrap());
                    let by_members_naive = k.members().all(|f| oracle::satisfies(f, constraint).unwrap());
                    let rejects = !satisfies(g, constraint).unwrap() && !oracle::satisfies(g, constraint).unwrap();
                    run.oracle_image(g, constraint.antecedent());
                    run.check(by_members && by_members_naive && rejects, || {
                        format!("{name}: witness for {} fails re-verification", compact_function(g))
                    });
                    writeln!(run.output, "{} {}", compact_function(g), compact_constraint(constraint)).unwrap();
                    total += 1;
                }
                RoundtripOutcome::NotSeparated => {
                    run.fail(format!("{name}: {} not separated", compact_function(&e.function)));
                }
            }
        }
    }
    run.summary = format!("{total} non-members separated");
    run
}

fn within_bound_minor(rng: &mut Rng, t: &ConstraintSet, bound: usize) -> Option<(MinorScheme, Vec<Constraint>)> {
    let members: Vec<&Constraint> = t.members().collect();
    let j = rng.random_range(1..=3);
    let family: Vec<Constraint> = (0..j)
        .map(|_| members[rng.random_range(0..members.len())].clone())
        .collect();
    let sources: Vec<usize> = family.iter().map(Constraint::arity).collect();
    let target = rng.random_range(1..=bound);
    let vars = rng.random_range(0..=2);
    let h = sample::scheme(rng, target, &sources, vars).ok()?;
    Some((h, family))
}

fn criterion4(seed: u64) -> Run {
    let a = domain("A", 2);
    let limits = Limits::default();
    let mut run = Run::default();
    let classes = [
        ("id", 1, vec![bool_fn(1, &[0, 1])]),
        ("id,neg", 1, vec![bool_fn(1, &[0, 1]), bool_fn(1, &[1, 0])]),
        ("AND,projections", 2, {
            let mut v = projections_upto(&a, 2);
            v.push(bool_fn(2, &[0, 0, 0, 1]));
            v
        }),
    ];
    let mut separated = 0;
    for (ci, (name, class_bound, gens)) in classes.into_iter().enumerate() {
        let k = FunctionClass::new(&a, &a, class_bound, gens).unwrap();
        let t = constraints_satisfied_by(&k, 2, &limits).unwrap();
        let in_t = |c: &Constraint| k.members().all(|f| oracle::satisfies(f, c).unwrap());
        writeln!(run.output, "class {name} constraints {}", t.len()).unwrap();

        let defined = functions_satisfying(&t, class_bound, &limits).unwrap();
        run.check(k.is_subset(&defined), || {
            format!("{name}: K not inside the functions defined by T")
        });

        for m in 1..=2 {
            let cc = canonical_constraints(&a, &a, m).unwrap();
            for (what, c) in [
                ("equality", &cc.equality),
                ("empty", &cc.empty),
                ("trivial", &cc.trivial),
            ] {
                run.check(t.contains(c), || {
                    format!("{name}: missing {what} constraint of arity {m}")
                });
            }
        }

        let members: Vec<Constraint> = t.members().cloned().collect();
        let mut rng = rng_for(seed, ci as u64);
        for trial in 0..200 {
            let c = &members[rng.random_range(0..members.len())];
            let keep = rng.random_range(0.0..1.0);
            let extra = rng.random_range(0.0..1.0);
            let r = sample::subset(&mut rng, c.antecedent(), keep).unwrap();
            let s = sample::superset(&mut rng, c.consequent(), extra).unwrap();
            let relaxed = relax(c, r, s).unwrap();
            run.check(t.contains(&relaxed) && in_t(&relaxed), || {
                format!("{name}: relaxation {trial} escapes T")
            });

            let same: Vec<&Constraint> = members.iter().filter(|d| d.antecedent() == c.antecedent()).collect();
            let other = same[rng.random_range(0..same.len())];
            let meet = intersect_consequents(&[c.clone(), other.clone()]).unwrap();
            run.check(t.contains(&meet) && in_t(&meet), || {
                format!("{name}: intersection {trial} escapes T")
            });

            let (h, family) = within_bound_minor(&mut rng, &t, 2).unwrap();
            let minor = tight_minor_constraint(&h, &family).unwrap();
            let rs: Vec<Relation> = family.iter().map(|c| c.antecedent().clone()).collect();
            let ss: Vec<Relation> = family.iter().map(|c| c.consequent().clone()).collect();
            let r = run.oracle_minor(&h, &rs);
            let s = run.oracle_minor(&h, &ss);
            run.check(minor.antecedent() == &r && minor.consequent() == &s, || {
                format!("{name}: minor {trial} disagrees with componentwise minors")
            });
            run.check(t.contains(&minor) && in_t(&minor), || {
                format!(
                    "{name}: conjunctive minor {trial} {} escapes T",
                    compact_constraint(&minor)
                )
            });
        }

        let mut sampled = 0;
        while sampled < 20 {
            let m = rng.random_range(1..=2);
            let c = sample::constraint(&mut rng, &a, &a, m).unwrap();
            if t.contains(&c) {
                continue;
            }
            sampled += 1;
            match separating_function(&t, &c, &limits).unwrap() {
                FunctionSeparation::Found(g) => {
                    let keeps_t = t.members().all(|d| oracle::satisfies(&g, d).unwrap());
                    let breaks_c = !oracle::satisfies(&g, &c).unwrap();
                    run.oracle_image(&g, c.antecedent());
                    run.check(keeps_t && breaks_c, || {
                        format!(
                            "{name}: witness {} for {} fails verification",
                            compact_function(&g),
                            compact_constraint(&c)
                        )
                    });
                    writeln!(run.output, "{} {}", compact_constraint(&c), compact_function(&g)).unwrap();
                    separated += 1;
                }
                other => run.fail(format!("{name}: no witness for {}: {other:?}", compact_constraint(&c))),
            }
        }
    }
    run.summary = format!("600 closure trials per class, {separated} outside constraints separated");
    run
}

fn criterion5(seed: u64) -> Run {
    const N: usize = 500;
    let limits = Limits::default();
    let parts: Vec<Run> = (0..N)
        .into_par_iter()
        .map(|i| {
            let mut run = Run::default();
            let mut rng = rng_for(seed, i as u64);
            let a = domain("A", rng.random_range(1..=3));
            let names: Vec<String> = (0..rng.random_range(1..=4)).map(|k| format!("l{k}")).collect();
            let labels = LabelSet::new(names.clone()).unwrap();
            let mut pick = |len: usize| -> Vec<String> {
                (0..len)
                    .map(|_| names[rng.random_range(0..names.len())].clone())
                    .collect()
            };
            let m = 1 + (i % 3);
            let b = pick(m);
            let j = 1 + (i / 3) % 3;
            let mut bs = Vec::new();
            for _ in 0..j {
                let len = 1 + (i / 9 + bs.len()) % 3;
                bs.push(pick(len));
            }
            let rels: Vec<Relation> = bs
                .iter()
                .map(|t| {
                    let d = rng.random_range(0.2..0.9);
                    sample::relation(&mut rng, &a, t.len(), d).unwrap()
                })
                .collect();
            let sup = general_superposition(&rels, &b, &bs, &labels, &limits).unwrap();
            let naive = oracle::superposition(&rels, &b, &bs, &labels).unwrap();
            run.oracle_relation("superposition", &sup, &naive);
            let d = superposition_decomposition(&b, &bs, &labels, &rels, &limits).unwrap();
            let minor = run.oracle_minor(&d.scheme, &rels);
            let meet = minor.intersection(&d.pattern).unwrap();
            run.check(
                d.holds && meet == sup && d.superposition == sup && d.tight_minor == minor,
                || format!("instance {i}: superposition differs from tight minor ∩ equality pattern"),
            );
            run.output = format!("{i} {}\n", relation_text("s", &sup).replace('\n', ";"));
            run
        })
        .collect();
    let mut run = Run::merge(parts);
    run.summary = format!("{N} instances");
    run
}

fn criterion6() -> Run {
    let a = domain("A", 2);
    let limits = Limits::default();
    let mut run = Run::default();
    let leq = Relation::from_tuples(&a, 2, [[0, 0], [0, 1], [1, 1]]).unwrap();
    let neg = FunctionClass::new(&a, &a, 1, [bool_fn(1, &[1, 0])]).unwrap();
    let nand = FunctionClass::new(&a, &a, 2, [bool_fn(2, &[1, 1, 1, 0])]).unwrap();

    let p = pol(std::slice::from_ref(&leq), &a, 2, &limits).unwrap();
    let p_naive = oracle::pol(std::slice::from_ref(&leq), &a, 2, &limits).unwrap();
    let i = inv(&neg, 2, &limits).unwrap();
    let i_naive = oracle::inv(&neg, 2).unwrap();
    let c = clone_generate(&nand, 2, &limits).unwrap();
    let c_naive = oracle::clone(&nand, 2).unwrap();
    for f in p.members() {
        run.oracle_image(f, &leq);
    }

    for (what, got, naive, golden) in [
        ("pol", p.len(), p_naive.len(), 9),
        ("inv", i.len(), i_naive.len(), 6),
        ("clone", c.len(), c_naive.len(), 20),
    ] {
        run.check(naive == golden, || {
            format!("{what}: oracle count {naive}, golden {golden}")
        });
        run.check(got == golden, || format!("{what}: count {got}, golden {golden}"));
        writeln!(run.output, "{what} {got}").unwrap();
    }
    run.check(p == p_naive && i == i_naive && c == c_naive, || {
        "member sets differ from the oracle".into()
    });
    run.summary = format!("pol {} inv {} clone {}", p.len(), i.len(), c.len());
    run
}

fn criterion7(seed: u64) -> Run {
    const N: u64 = 50;
    let a = domain("A", 2);
    let limits = Limits::default();
    let mut run = Run::default();
    for i in 0..N {
        let mut rng = rng_for(seed, i);
        if i % 2 == 0 {
            let all = FunctionClass::all_functions(&a, &a, 2, &limits).unwrap();
            let keep = rng.random_range(0.05..0.6);
            let members: Vec<FiniteFunction> = all.members().filter(|_| rng.random_bool(keep)).cloned().collect();
            let k = FunctionClass::new(&a, &a, 2, members).unwrap();
            let closed = local_closure_functions(&k, &limits).unwrap();
            run.check(closed == k, || {
                format!("input {i}: function class changed by local closure")
            });
        } else {
            let bound = rng.random_range(1..=2);
            let count = rng.random_range(0..=12);
            let members: Vec<Constraint> = (0..count)
                .map(|_| {
                    let m = rng.random_range(1..=bound);
                    sample::constraint(&mut rng, &a, &a, m).unwrap()
                })
                .collect();
            let t = ConstraintSet::new(&a, &a, bound, members).unwrap();
            let closed = local_closure_constraints(&t, &limits).unwrap();
            run.check(closed == t, || {
                format!("input {i}: constraint set changed by local closure")
            });
        }
    }
    run.summary = format!("{N} inputs");
    run
}

fn criterion8(seed: u64) -> Run {
    let a = domain("A", 3);
    let limits = Limits::default();
    let mut run = Run::default();
    let family = injective_partial_functions(&[1], &a, &a, &limits).unwrap();
    run.check(is_extensible_family(&family).unwrap(), || {
        "family is not extensible".into()
    });
    let report = family_closure_harness(&family, 200, 2, seed, &limits).unwrap();
    run.check(report.equality && report.empty, || {
        "equality or empty constraint missing".into()
    });
    run.check(report.trials.len() == 200, || {
        format!("{} trials ran", report.trials.len())
    });
    let totals: Vec<FiniteFunction> = family
        .members()
        .filter(|p| p.is_total())
        .map(|p| FiniteFunction::from_fn(1, &a, &a, |x| p.get(x).unwrap()).unwrap())
        .collect();
    for t in &report.trials {
        run.check(t.satisfied && t.member, || {
            format!(
                "trial {} ({}): {} escapes",
                t.index,
                t.kind.as_str(),
                compact_constraint(&t.derived)
            )
        });
        for f in &totals {
            run.oracle_image(f, t.derived.antecedent());
        }
    }
    run.output = report
        .trials
        .iter()
        .map(|t| format!("{} {} {}\n", t.index, t.kind.as_str(), compact_constraint(&t.derived)))
        .collect();
    run.summary = format!(
        "{} partial functions, {} violations",
        report.family_size,
        report.violations()
    );
    run
}

/// The same image and minor inputs as criterion 1, through the command line.
fn cli_oracle_agreement(seed: u64, count: usize) -> Run {
    let mut run = Run::default();
    let dir = tempfile::tempdir().unwrap();
    for i in 0..count {
        let mut rng = rng_for(seed, i as u64);
        let a = domain("A", rng.random_range(1..=3));
        let b = domain("B", rng.random_range(1..=3));
        let n = rng.random_range(1..=3);
        let f = sample::function(&mut rng, n, &a, &b).unwrap();
        let (sources, antecedents) = random_family(&mut rng, &a, &b);
        let target = rng.random_range(1..=3);
        let vars = rng.random_range(0..=2);
        let h = sample::scheme(&mut rng, target, &sources, vars).unwrap();

        let mut ws = Workspace::new();
        ws.domains.insert("A".into(), a.clone());
        ws.domains.insert("B".into(), b.clone());
        ws.functions.insert("f".into(), f);
        ws.schemes.insert("h".into(), h);
        let names: Vec<String> = (0..antecedents.len()).map(|j| format!("R{j}")).collect();
        for (name, r) in names.iter().zip(antecedents) {
            ws.relations.insert(name.clone(), r);
        }
        let path = dir.path().join(format!("ws{i}.txt"));
        std::fs::write(&path, ws.serialize()).unwrap();
        let path = path.to_str().unwrap().to_string();

        let mut commands: Vec<Vec<String>> = vec![["minor", "--scheme", "h", "--relations"]
            .iter()
            .map(|s| s.to_string())
            .chain(names.iter().cloned())
            .collect()];
        for name in &names {
            commands.push(
                ["image", "--fn", "f", "--relation", name]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            );
        }
        for args in commands {
            let base = ["relcon", "-w", &path];
            let fast = cli::run(base.iter().map(|s| s.to_string()).chain(args.iter().cloned()));
            let naive = cli::run(
                base.iter()
                    .map(|s| s.to_string())
                    .chain(std::iter::once("oracle".to_string()))
                    .chain(args.iter().cloned()),
            );
            run.oracle_checks += 1;
            if fast != naive || fast.code != 0 {
                run.oracle_mismatches
                    .push(format!("instance {i} `{}`: {:?} vs {:?}", args.join(" "), fast, naive));
            }
        }
    }
    run
}

struct Report {
    passed: usize,
    failed: usize,
}

impl Report {
    fn line(&mut self, id: usize, name: &str, ok: bool, elapsed: Duration, limit: Option<Duration>, detail: &str) {
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let ok = ok && in_time;
        let limit = limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
        println!(
            "{} criterion {id:>2} {name}: {detail} [{:.2}s{limit}]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }
}

fn timed<T>(body: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = body();
    (out, start.elapsed())
}

fn in_pool<T: Send>(threads: usize, body: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(body)
}

type Criterion = (usize, &'static str, Option<Duration>, Box<dyn Fn() -> Run + Sync>);

fn main() -> ExitCode {
    const SEED: u64 = 0x5eed_2024;
    let mut report = Report { passed: 0, failed: 0 };
    let secs = |s| Some(Duration::from_secs(s));

    let criteria: Vec<Criterion> = vec![
        (1, "minor satisfaction sweep", secs(60), Box::new(|| criterion1(SEED))),
        (2, "scheme composition", secs(60), Box::new(|| criterion2(SEED + 2))),
        (3, "constraint separation round trip", secs(120), Box::new(criterion3)),
        (
            4,
            "satisfied-constraint closure and function separation",
            secs(300),
            Box::new(|| criterion4(SEED + 4)),
        ),
        (
            5,
            "superposition decomposition",
            secs(120),
            Box::new(|| criterion5(SEED + 5)),
        ),
        (6, "pol/inv/clone counts", None, Box::new(criterion6)),
        (7, "finite local closure", None, Box::new(|| criterion7(SEED + 7))),
        (
            8,
            "partial-function family harness",
            None,
            Box::new(|| criterion8(SEED + 8)),
        ),
    ];

    let mut oracle_checks = 0;
    let mut oracle_mismatches = Vec::new();
    let mut outputs = Vec::new();
    for (id, name, limit, body) in &criteria {
        let (run, elapsed) = timed(body);
        let detail = if run.failures.is_empty() {
            run.summary.clone()
        } else {
            format!("{}; {}", run.summary, run.failures.join("; "))
        };
        report.line(*id, name, run.failures.is_empty(), elapsed, *limit, &detail);
        oracle_checks += run.oracle_checks;
        oracle_mismatches.extend(run.oracle_mismatches.iter().map(|m| format!("criterion {id}: {m}")));
        outputs.push(run.output);
    }

    let (cli_run, elapsed) = timed(|| cli_oracle_agreement(SEED, 50));
    oracle_checks += cli_run.oracle_checks;
    oracle_mismatches.extend(cli_run.oracle_mismatches);
    let detail = format!(
        "{oracle_checks} comparisons, {} mismatches{}",
        oracle_mismatches.len(),
        oracle_mismatches
            .first()
            .map(|m| format!("; first: {m}"))
            .unwrap_or_default()
    );
    report.line(
        9,
        "oracle agreement",
        oracle_mismatches.is_empty() && oracle_checks > 0,
        elapsed,
        None,
        &detail,
    );

    let start = Instant::now();
    let mut differing = Vec::new();
    for (idx, id) in [(0, 1), (2, 3), (4, 5)] {
        for threads in [1, 2, 8] {
            let run = in_pool(threads, || (criteria[idx].3)());
            if run.output != outputs[idx] || run.output.is_empty() {
                differing.push(format!("criterion {id} with {threads} threads"));
            }
        }
    }
    let detail = if differing.is_empty() {
        "criteria 1, 3, 5 identical under 1, 2, 8 threads".to_string()
    } else {
        format!("outputs differ: {}", differing.join(", "))
    };
    report.line(
        10,
        "determinism under parallelism",
        differing.is_empty(),
        start.elapsed(),
        None,
        &detail,
    );

    println!("{} passed, {} failed", report.passed, report.failed);
    if report.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
