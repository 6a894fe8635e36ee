use proptest::prelude::*;
use rand::RngExt;

use relcon::clones::{
    clone_generate, compose_functions, equality_pattern_relation, general_superposition, image_union, inv, pol,
    superposition_decomposition, LabelSet,
};
use relcon::galois::{
    constraints_satisfied_by, functions_satisfying, local_closure_constraints, separating_constraint,
    separating_function, ConstraintSet, FunctionSeparation,
};
use relcon::minors::{
    intersect_consequents, is_conjunctive_minor, simple_minor, tight_minor_constraint, tight_minor_relations,
    MinorScheme, SchemeEntry,
};
use relcon::model::{columns_in_relation, decode_point, encode_point};
use relcon::sample::{self, rng_for, Rng};
use relcon::satisfaction::{image_of_relation, partial_satisfies, preserves, satisfies, PartialFunction};
use relcon::substitution::{local_closure_functions, substitute, svs_closure, FunctionClass};
use relcon::{oracle, Constraint, FiniteDomain, FiniteFunction, IndexMap, Limits, Matrix, Relation};

fn dom(name: &str, size: usize) -> FiniteDomain {
    FiniteDomain::new(name, size).unwrap()
}

fn small_domains(rng: &mut Rng) -> (FiniteDomain, FiniteDomain) {
    (dom("A", rng.random_range(1..=3)), dom("B", rng.random_range(1..=3)))
}

fn random_class(rng: &mut Rng, a: &FiniteDomain, bound: usize, count: usize) -> FunctionClass {
    let fs: Vec<FiniteFunction> = (0..count)
        .map(|_| {
            let n = rng.random_range(1..=bound);
            sample::function(rng, n, a, a).unwrap()
        })
        .collect();
    FunctionClass::new(a, a, bound, fs).unwrap()
}

#[test]
fn point_encoding_round_trips_exhaustively() {
    for k in 1..=4 {
        let d = dom("D", k);
        for m in 1..=4 {
            for p in 0..d.power(m).unwrap() {
                let t = decode_point(p, m, &d).unwrap();
                assert_eq!(encode_point(&t, &d).unwrap(), p);
                assert_eq!(decode_point(encode_point(&t, &d).unwrap(), m, &d).unwrap(), t);
            }
        }
    }
}

#[test]
fn total_functions_as_partial_agree_exhaustively() {
    let a = dom("A", 2);
    let all = FunctionClass::all_functions(&a, &a, 2, &Limits::default()).unwrap();
    for m in 1..=2 {
        let space = a.power(m).unwrap();
        for ra in 0..1u32 << space {
            for sa in 0..1u32 << space {
                let r = Relation::from_points(&a, m, (0..space).filter(|p| ra >> p & 1 == 1)).unwrap();
                let s = Relation::from_points(&a, m, (0..space).filter(|p| sa >> p & 1 == 1)).unwrap();
                let c = Constraint::new(r, s).unwrap();
                for f in all.members() {
                    let p = PartialFunction::from_total(f);
                    assert_eq!(partial_satisfies(&p, &c).unwrap(), satisfies(f, &c).unwrap());
                }
            }
        }
    }
}

#[test]
fn preserves_is_self_constraint_exhaustively() {
    let a = dom("A", 2);
    let all = FunctionClass::all_functions(&a, &a, 2, &Limits::default()).unwrap();
    for m in 1..=2 {
        let space = a.power(m).unwrap();
        for mask in 0..1u32 << space {
            let r = Relation::from_points(&a, m, (0..space).filter(|p| mask >> p & 1 == 1)).unwrap();
            let c = Constraint::new(r.clone(), r.clone()).unwrap();
            for f in all.members() {
                assert_eq!(preserves(f, &r).unwrap(), satisfies(f, &c).unwrap());
            }
        }
    }
}

#[test]
fn local_closure_of_functions_is_identity_exhaustive_small() {
    let a = dom("A", 2);
    let limits = Limits::default();
    let unary = FunctionClass::all_functions(&a, &a, 1, &limits).unwrap();
    let members: Vec<FiniteFunction> = unary.members().cloned().collect();
    for mask in 0..1u32 << members.len() {
        let k = FunctionClass::new(
            &a,
            &a,
            1,
            members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, f)| f.clone()),
        )
        .unwrap();
        assert_eq!(local_closure_functions(&k, &limits).unwrap(), k);
    }
}

#[test]
fn constant_tuples_and_equality_from_full_unary_relation() {
    let a = dom("A", 3);
    let full = Relation::full(&a, 1).unwrap();
    let l = LabelSet::new(["p"]).unwrap();
    let limits = Limits::default();
    let b = vec!["p".to_string(), "p".to_string()];
    let eq = general_superposition(std::slice::from_ref(&full), &b, &[vec!["p".into()]], &l, &limits).unwrap();
    assert_eq!(eq, Relation::equality(&a).unwrap());
    let b3 = vec!["p".to_string(); 3];
    let constant = general_superposition(&[full], &b3, &[vec!["p".into()]], &l, &limits).unwrap();
    assert!(constant.tuples().all(|t| t.iter().all(|&x| x == t[0])));
    assert_eq!(constant.len(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn relation_storage_ignores_tuple_order(
        k in 1usize..=3,
        m in 1usize..=3,
        picks in prop::collection::vec(0usize..27, 0..20),
        shuffle in any::<u64>(),
    ) {
        let d = dom("D", k);
        let space = d.power(m).unwrap();
        let tuples: Vec<Vec<usize>> = picks.iter().map(|&p| decode_point(p % space, m, &d).unwrap()).collect();
        let mut shuffled = tuples.clone();
        let mut rng = rng_for(shuffle, 0);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        shuffled.extend(tuples.iter().take(3).cloned());
        let r1 = Relation::from_tuples(&d, m, &tuples).unwrap();
        let r2 = Relation::from_tuples(&d, m, &shuffled).unwrap();
        prop_assert_eq!(&r1, &r2);
        let text = |r: &Relation| relcon::cli::render::relation_text("r", r);
        prop_assert_eq!(text(&r1), text(&r2));
    }

    #[test]
    fn columns_in_relation_is_monotone(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 1);
        let a = dom("A", rng.random_range(1..=3));
        let m = rng.random_range(1..=3);
        let r = sample::relation(&mut rng, &a, m, 0.5).unwrap();
        let bigger = sample::superset(&mut rng, &r, 0.3).unwrap();
        let cols: Vec<Vec<usize>> = r.tuples().take(3).collect();
        if !cols.is_empty() {
            let mat = Matrix::new(&a, cols).unwrap();
            prop_assert!(columns_in_relation(&mat, &r).unwrap());
            prop_assert!(columns_in_relation(&mat, &bigger).unwrap());
        }
    }

    #[test]
    fn relaxation_preserves_satisfaction(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 2);
        let (a, b) = small_domains(&mut rng);
        let n = rng.random_range(1..=2);
        let m = rng.random_range(1..=3);
        let f = sample::function(&mut rng, n, &a, &b).unwrap();
        let r = sample::relation(&mut rng, &a, m, 0.4).unwrap();
        let s = sample::superset(&mut rng, &image_of_relation(&f, &r).unwrap(), 0.2).unwrap();
        let c = Constraint::new(r, s).unwrap();
        prop_assert!(satisfies(&f, &c).unwrap());
        let keep = rng.random_range(0.0..1.0);
        let r2 = sample::subset(&mut rng, c.antecedent(), keep).unwrap();
        let s2 = sample::superset(&mut rng, c.consequent(), 0.3).unwrap();
        prop_assert!(satisfies(&f, &Constraint::new(r2, s2).unwrap()).unwrap());
    }

    #[test]
    fn image_is_monotone_and_matches_oracle(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 3);
        let (a, b) = small_domains(&mut rng);
        let n = rng.random_range(1..=3);
        let m = rng.random_range(1..=3);
        let f = sample::function(&mut rng, n, &a, &b).unwrap();
        let r = sample::relation(&mut rng, &a, m, 0.3).unwrap();
        let bigger = sample::superset(&mut rng, &r, 0.2).unwrap();
        let img = image_of_relation(&f, &r).unwrap();
        prop_assert_eq!(&img, &oracle::image(&f, &r).unwrap());
        prop_assert!(img.is_subset(&image_of_relation(&f, &bigger).unwrap()));
    }

    #[test]
    fn svs_closure_is_a_closure_operator(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 4);
        let a = dom("A", 2);
        let count = rng.random_range(0..=3);
        let k = random_class(&mut rng, &a, 2, count);
        let extra = random_class(&mut rng, &a, 2, 2);
        let mut bigger = k.clone();
        for f in extra.members() {
            bigger.insert(f.clone()).unwrap();
        }
        let ck = svs_closure(&k, 2).unwrap();
        prop_assert!(k.is_subset(&ck));
        prop_assert_eq!(&svs_closure(&ck, 2).unwrap(), &ck);
        prop_assert!(ck.is_subset(&svs_closure(&bigger, 2).unwrap()));
    }

    #[test]
    fn satisfaction_transfers_under_substitution(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 5);
        let (a, b) = small_domains(&mut rng);
        let n = rng.random_range(1..=3);
        let f = sample::function(&mut rng, n, &a, &b).unwrap();
        let m = rng.random_range(1..=2);
        let r = sample::relation(&mut rng, &a, m, 0.4).unwrap();
        let c = Constraint::new(r.clone(), image_of_relation(&f, &r).unwrap()).unwrap();
        let target = rng.random_range(1..=3);
        let l = sample::index_map(&mut rng, n, target).unwrap();
        prop_assert!(satisfies(&substitute(&f, &l).unwrap(), &c).unwrap());
    }

    #[test]
    fn conjunctive_minors_of_satisfied_constraints_are_satisfied(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 6);
        let (a, b) = small_domains(&mut rng);
        let n = rng.random_range(1..=2);
        let f = sample::function(&mut rng, n, &a, &b).unwrap();
        let j = rng.random_range(1..=3);
        let sources: Vec<usize> = (0..j).map(|_| rng.random_range(1..=3)).collect();
        let family: Vec<Constraint> = sources
            .iter()
            .map(|&m| {
                let r = sample::relation(&mut rng, &a, m, 0.4).unwrap();
                let s = image_of_relation(&f, &r).unwrap();
                Constraint::new(r, s).unwrap()
            })
            .collect();
        let target = rng.random_range(1..=3);
        let vars = rng.random_range(0..=2);
        let h = sample::scheme(&mut rng, target, &sources, vars).unwrap();
        prop_assert!(satisfies(&f, &tight_minor_constraint(&h, &family).unwrap()).unwrap());
    }

    #[test]
    fn tight_minor_ignores_family_order(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 7);
        let a = dom("A", rng.random_range(1..=3));
        let j = rng.random_range(2..=3);
        let sources: Vec<usize> = (0..j).map(|_| rng.random_range(1..=3)).collect();
        let rels: Vec<Relation> = sources.iter().map(|&m| sample::relation(&mut rng, &a, m, 0.5).unwrap()).collect();
        let target = rng.random_range(1..=3);
        let h = sample::scheme(&mut rng, target, &sources, 2).unwrap();
        let perm: Vec<usize> = (0..j).rev().collect();
        let h2 = MinorScheme::new(
            h.target(),
            h.indeterminates().to_vec(),
            perm.iter().map(|&i| h.maps()[i].clone()).collect(),
        )
        .unwrap();
        let rels2: Vec<Relation> = perm.iter().map(|&i| rels[i].clone()).collect();
        prop_assert_eq!(tight_minor_relations(&h, &rels).unwrap(), tight_minor_relations(&h2, &rels2).unwrap());
    }

    #[test]
    fn relaxation_and_intersection_are_conjunctive_minors(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 8);
        let (a, b) = small_domains(&mut rng);
        let m = rng.random_range(1..=3);
        let c = sample::constraint(&mut rng, &a, &b, m).unwrap();
        let relaxed = Constraint::new(
            sample::subset(&mut rng, c.antecedent(), 0.6).unwrap(),
            sample::superset(&mut rng, c.consequent(), 0.3).unwrap(),
        )
        .unwrap();
        let id = MinorScheme::identity(m).unwrap();
        prop_assert!(is_conjunctive_minor(&relaxed, &id, std::slice::from_ref(&c)).unwrap());

        let k = rng.random_range(2..=3);
        let family: Vec<Constraint> = (0..k)
            .map(|_| Constraint::new(c.antecedent().clone(), sample::relation(&mut rng, &b, m, 0.6).unwrap()).unwrap())
            .collect();
        let diagonal: Vec<SchemeEntry> = (0..m).map(SchemeEntry::Target).collect();
        let dup = MinorScheme::new(m, vec![], vec![diagonal; k]).unwrap();
        prop_assert_eq!(intersect_consequents(&family).unwrap(), tight_minor_constraint(&dup, &family).unwrap());
    }

    #[test]
    fn permutation_minors_invert(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 9);
        let (a, b) = small_domains(&mut rng);
        let m = rng.random_range(1..=3);
        let c = sample::constraint(&mut rng, &a, &b, m).unwrap();
        let mut perm: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let mut inverse = vec![0; m];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let h: Vec<SchemeEntry> = perm.iter().map(|&p| SchemeEntry::Target(p)).collect();
        let hi: Vec<SchemeEntry> = inverse.iter().map(|&p| SchemeEntry::Target(p)).collect();
        let there = simple_minor(&c, &h, m, &[]).unwrap();
        prop_assert_eq!(simple_minor(&there, &hi, m, &[]).unwrap(), c);
    }

    #[test]
    fn galois_maps_are_sound(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 10);
        let a = dom("A", 2);
        let limits = Limits::default();
        let count = rng.random_range(1..=3);
        let k = random_class(&mut rng, &a, 2, count);
        let t = constraints_satisfied_by(&k, 2, &limits).unwrap();
        prop_assert!(k.is_subset(&functions_satisfying(&t, 2, &limits).unwrap()));
        prop_assert_eq!(&local_closure_constraints(&t, &limits).unwrap(), &t);
    }

    #[test]
    fn separating_constraints_are_witnesses(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 11);
        let a = dom("A", 2);
        let limits = Limits::default();
        let count = rng.random_range(0..=2);
        let k = svs_closure(&random_class(&mut rng, &a, 2, count), 2).unwrap();
        let n = rng.random_range(1..=2);
        let g = sample::function(&mut rng, n, &a, &a).unwrap();
        match separating_constraint(&k, &g, &limits).unwrap() {
            Some(c) => {
                prop_assert!(!k.contains(&g));
                prop_assert!(!oracle::satisfies(&g, &c).unwrap());
                for f in k.members() {
                    prop_assert!(oracle::satisfies(f, &c).unwrap());
                }
            }
            None => prop_assert!(k.contains(&g)),
        }
    }

    #[test]
    fn separating_functions_are_witnesses(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 12);
        let a = dom("A", 2);
        let limits = Limits::default();
        let count = rng.random_range(0..=4);
        let members: Vec<Constraint> = (0..count)
            .map(|_| {
                let m = rng.random_range(1..=2);
                sample::constraint(&mut rng, &a, &a, m).unwrap()
            })
            .collect();
        let t = ConstraintSet::new(&a, &a, 2, members).unwrap();
        let m = rng.random_range(1..=2);
        let c = sample::constraint(&mut rng, &a, &a, m).unwrap();
        if let FunctionSeparation::Found(g) = separating_function(&t, &c, &limits).unwrap() {
            prop_assert!(!oracle::satisfies(&g, &c).unwrap());
            for d in t.members() {
                prop_assert!(oracle::satisfies(&g, d).unwrap());
            }
        }
    }

    #[test]
    fn superposition_is_tight_minor_within_equality_pattern(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 13);
        let a = dom("A", rng.random_range(1..=3));
        let names: Vec<String> = (0..rng.random_range(1..=4)).map(|i| format!("x{i}")).collect();
        let l = LabelSet::new(names.clone()).unwrap();
        let mut word = |len: usize| -> Vec<String> {
            (0..len).map(|_| names[rng.random_range(0..names.len())].clone()).collect()
        };
        let b = word(3);
        let bs = vec![word(2), word(1)];
        let rels: Vec<Relation> = bs.iter().map(|t| sample::relation(&mut rng, &a, t.len(), 0.5).unwrap()).collect();
        let limits = Limits::default();
        let sup = general_superposition(&rels, &b, &bs, &l, &limits).unwrap();
        let d = superposition_decomposition(&b, &bs, &l, &rels, &limits).unwrap();
        let pattern = equality_pattern_relation(&b, &a).unwrap();
        prop_assert_eq!(sup, d.tight_minor.intersection(&pattern).unwrap());
    }

    #[test]
    fn clones_contain_projections_and_compose(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 14);
        let a = dom("A", 2);
        let limits = Limits::default();
        let count = rng.random_range(1..=2);
        let f = random_class(&mut rng, &a, 2, count);
        let c = clone_generate(&f, 2, &limits).unwrap();
        for n in 1..=2 {
            for i in 0..n {
                prop_assert!(c.contains(&FiniteFunction::projection(&a, n, i).unwrap()));
            }
        }
        let members: Vec<&FiniteFunction> = c.members().collect();
        let outer = members[rng.random_range(0..members.len())];
        let inner_arity = rng.random_range(1..=2);
        let pool: Vec<FiniteFunction> = c.of_arity(inner_arity).cloned().collect();
        let gs: Vec<FiniteFunction> = (0..outer.arity()).map(|_| pool[rng.random_range(0..pool.len())].clone()).collect();
        prop_assert!(c.contains(&compose_functions(outer, &gs).unwrap()));
        let back = pol(&inv(&f, 2, &limits).unwrap(), &a, 2, &limits).unwrap();
        prop_assert!(c.is_subset(&back));
    }

    #[test]
    fn image_union_stays_in_shared_consequents(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 15);
        let a = dom("A", 2);
        let c = random_class(&mut rng, &a, 2, 3);
        let m = rng.random_range(1..=2);
        let r = sample::relation(&mut rng, &a, m, 0.5).unwrap();
        let union = image_union(&c, &r).unwrap();
        let s = sample::superset(&mut rng, &union, 0.3).unwrap();
        let con = Constraint::new(r, s.clone()).unwrap();
        prop_assert!(c.members().all(|f| satisfies(f, &con).unwrap()));
        prop_assert!(union.is_subset(&s));
    }

    #[test]
    fn substitution_images_stay_in_range(n in 1usize..=3, target in 1usize..=3, seed in any::<u64>()) {
        let mut rng = rng_for(seed, 16);
        let images: Vec<usize> = (0..n).map(|_| rng.random_range(0..target)).collect();
        prop_assert!(IndexMap::new(images, target).is_ok());
        prop_assert!(IndexMap::new(vec![target; n], target).is_err());
    }
}
