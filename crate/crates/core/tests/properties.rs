//! Property tests for the signature, family, partition, and generator
//! invariants.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use regreg_core::families::{
    check_jump_free_pair, check_reflexive, make_fn, restricted_domain, FamilySpec, JumpFreeOutcome,
};
use regreg_core::instances::{
    build_structured, check_tlog_bounded, gen_rho_tlog, tlog_cap, StructuredInstance,
};
use regreg_core::ordertype::{class_count_by_formula, enumerate_classes, signature, KTuple};
use regreg_core::regularity::{
    check_regressively_regular, find_regressively_regular, partition_blocks, regressive_values,
};

use common::{min_feasible_e0, random_domain, random_grid, synth_regular_fn};

/// Def-level order equivalence: equal `<` and `=` index sets, computed
/// without going through the rank vector.
fn order_equivalent(x: &[u64], y: &[u64]) -> bool {
    let n = x.len();
    if y.len() != n {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            if (x[i] < x[j]) != (y[i] < y[j]) || (x[i] == x[j]) != (y[i] == y[j]) {
                return false;
            }
        }
    }
    true
}

fn tuple_pair() -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    (2usize..=4).prop_flat_map(|k| {
        (
            prop::collection::vec(0u64..10, k),
            prop::collection::vec(0u64..10, k),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Signature equality must coincide with the index-set definition.
    #[test]
    fn signature_equality_matches_index_sets((xs, ys) in tuple_pair()) {
        let x = KTuple::new(xs.clone()).unwrap();
        let y = KTuple::new(ys.clone()).unwrap();
        let by_signature = signature(&x) == signature(&y);
        let by_definition = order_equivalent(&xs, &ys);
        prop_assert_eq!(by_signature, by_definition);
    }
}

proptest! {
    /// Every realized signature shows up in the exhaustive class enumeration.
    #[test]
    fn random_signatures_are_enumerated(k in 2usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: Vec<u64> = (0..k).map(|_| rng.random_range(0..100)).collect();
        let sig = signature(&KTuple::new(coords).unwrap());
        let classes = enumerate_classes(k).unwrap();
        prop_assert!(classes.contains(&sig));
    }

    /// Growing the domain can only grow the below-max region.
    #[test]
    fn restricted_domain_is_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_domain(&mut rng, 2, 8, 8);
        let mut b = a.clone();
        b.extend(random_domain(&mut rng, 2, 4, 8));
        for x in &a {
            let ax = restricted_domain(&a, x);
            let bx = restricted_domain(&b, x);
            prop_assert!(ax.is_subset(&bx));
        }
    }
}

#[test]
fn signature_equality_is_an_equivalence_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let sample: Vec<KTuple> = (0..60)
        .map(|_| {
            let k = rng.random_range(2..=4);
            let coords: Vec<u64> = (0..k).map(|_| rng.random_range(0..6)).collect();
            KTuple::new(coords).unwrap()
        })
        .collect();
    for x in &sample {
        assert_eq!(signature(x), signature(x));
        for y in &sample {
            assert_eq!(signature(x) == signature(y), signature(y) == signature(x));
            for z in &sample {
                if signature(x) == signature(y) && signature(y) == signature(z) {
                    assert_eq!(signature(x), signature(z));
                }
            }
        }
    }
}

#[test]
fn class_counts_stay_below_k_to_the_k() {
    for k in 2..=5 {
        let classes = enumerate_classes(k).unwrap();
        let bound = (k as u128).pow(k as u32);
        assert!((classes.len() as u128) < bound, "k={k}");
        assert_eq!(classes.len() as u128, class_count_by_formula(k), "k={k}");
    }
}

#[test]
fn min_and_min_field_are_jump_free_on_sampled_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for round in 0..200 {
        let k = if round % 2 == 0 { 2 } else { 3 };
        let a = random_domain(&mut rng, k, 8, 8);
        let mut b = a.clone();
        if rng.random_bool(0.5) {
            // Nested: strictly grow A.
            b.extend(random_domain(&mut rng, k, 4, 8));
        } else {
            // Overlapping: shared core plus separate extras.
            b = random_domain(&mut rng, k, 8, 8);
            b.extend(a.iter().take(a.len() / 2).cloned());
        }
        for spec in [FamilySpec::Min, FamilySpec::MinField] {
            let fa = make_fn(&spec, &a).unwrap();
            let fb = make_fn(&spec, &b).unwrap();
            assert!(
                check_jump_free_pair(&fa, &fb).is_pass(),
                "round {round} family {spec} a->b"
            );
            assert!(
                check_jump_free_pair(&fb, &fa).is_pass(),
                "round {round} family {spec} b->a"
            );
            assert!(check_reflexive(&fa) && check_reflexive(&fb));
        }
    }
}

#[test]
fn max_min_violations_reverify_their_premises() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut seen_violation = false;
    for _ in 0..200 {
        let a = random_domain(&mut rng, 2, 8, 8);
        let mut b = a.clone();
        b.extend(random_domain(&mut rng, 2, 5, 8));
        let fa = make_fn(&FamilySpec::MaxMin, &a).unwrap();
        let fb = make_fn(&FamilySpec::MaxMin, &b).unwrap();
        if let JumpFreeOutcome::Violation(v) = check_jump_free_pair(&fa, &fb) {
            seen_violation = true;
            // All three premises must hold at the witness, plus the strict
            // inequality, re-derived from scratch.
            let x = &v.witness;
            assert!(a.contains(x) && b.contains(x));
            let ax = restricted_domain(&a, x);
            let bx = restricted_domain(&b, x);
            assert!(ax.is_subset(&bx));
            for y in &ax {
                assert_eq!(fa.value(y), fb.value(y));
            }
            assert_eq!(fa.value(x), Some(v.value_a));
            assert_eq!(fb.value(x), Some(v.value_b));
            assert!(v.value_a < v.value_b);
        }
    }
    assert!(seen_violation, "no violation in 200 sampled pairs");
}

#[test]
fn partition_laws_hold_for_sampled_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..100 {
        let k = if round % 3 == 0 { 3 } else { 2 };
        let p = rng.random_range(2..=4);
        let grid = random_grid(&mut rng, k, p, 1);
        let f = match round % 3 {
            0 => make_fn(&FamilySpec::Min, &grid.tuple_set()).unwrap(),
            1 => make_fn(&FamilySpec::MinField, &grid.tuple_set()).unwrap(),
            _ => synth_regular_fn(&grid, &mut rng),
        };
        let part = partition_blocks(&f, &grid).unwrap();

        let tuples = grid.tuple_set();
        let mut union = BTreeSet::new();
        union.extend(part.low.iter().cloned());
        union.extend(part.mid.iter().cloned());
        union.extend(part.high.iter().cloned());
        assert_eq!(union, tuples, "round {round}: union is the grid");
        assert_eq!(
            part.low.len() + part.mid.len() + part.high.len(),
            tuples.len(),
            "round {round}: blocks are disjoint"
        );

        let e0 = grid.e0() as i64;
        for x in &tuples {
            let v = f.value(x).unwrap();
            let min_x = x.min_coord() as i64;
            let expected = if v < e0 {
                &part.low
            } else if v < min_x {
                &part.mid
            } else {
                &part.high
            };
            assert!(expected.contains(x), "round {round}: membership at {x}");
        }
    }
}

#[test]
fn regular_functions_have_empty_mid_and_bounded_regressive_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for round in 0..100 {
        let k = if round % 4 == 0 { 3 } else { 2 };
        let p = rng.random_range(2..=4);
        let grid = random_grid(&mut rng, k, p, 2);
        let f = synth_regular_fn(&grid, &mut rng);
        let report = check_regressively_regular(&f, &grid).unwrap();
        assert!(report.is_regular, "round {round}");

        let part = partition_blocks(&f, &grid).unwrap();
        assert!(part.mid.is_empty(), "round {round}: mid must be empty");

        let classes = enumerate_classes(k).unwrap().len();
        let regressive = regressive_values(&f, &grid.tuple_set()).unwrap();
        assert!(regressive.len() <= classes, "round {round}");
        assert!((classes as u128) < (k as u128).pow(k as u32));
        assert_eq!(report.regressive_value_count, regressive.len());
    }
}

#[test]
fn search_results_repass_the_checker() {
    let ground: BTreeSet<u64> = (1..=8).collect();
    for p in 2..=3 {
        for spec in [FamilySpec::Min, FamilySpec::MinField] {
            if let Some((f, grid)) = find_regressively_regular(&spec, 2, p, &ground, 50) {
                let report = check_regressively_regular(&f, &grid).unwrap();
                assert!(report.is_regular, "family {spec} p={p}");
            }
        }
    }
}

#[test]
fn generated_rho_is_in_bounds_and_tlog_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for round in 0..100 {
        let k = if round % 3 == 0 { 3 } else { 2 };
        let p = rng.random_range(2..=4);
        let t = rng.random_range(1..=3);
        let grid = random_grid(&mut rng, k, p, min_feasible_e0(k, p, t));
        let seed = rng.random();
        let rho = gen_rho_tlog(&grid, t, seed).unwrap();
        for x in grid.tuples() {
            assert!(rho.value(&x).unwrap() >= x.min_coord(), "round {round}");
        }
        assert!(check_tlog_bounded(&rho, &grid, t).unwrap(), "round {round}");
    }
}

#[test]
fn built_instances_respect_every_range_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let mut built = 0;
    for round in 0..1000 {
        let k = if round % 5 == 0 { 3 } else { 2 };
        let p = rng.random_range(2..=5);
        let t = rng.random_range(1..=3);
        let grid = random_grid(&mut rng, k, p, min_feasible_e0(k, p, t).max(2));
        let f = synth_regular_fn(&grid, &mut rng);
        let rho = gen_rho_tlog(&grid, t, rng.random()).unwrap();
        let inst = build_structured(&f, &grid, &rho, t, false).unwrap();
        inst.validate().unwrap();
        built += 1;

        // Spot-check the range windows directly.
        let window = inst.window() as i64;
        assert!(inst
            .negatives
            .iter()
            .all(|&v| -(inst.e0 as i64) < v && v < 0));
        assert!(inst.small_positives.iter().all(|&v| 0 < v && v < window));
        assert!(inst.large_positives.iter().all(|&v| v >= window));
        assert!(inst.small_positives.len() as u64 <= tlog_cap(inst.p, inst.k, inst.t));
        assert!((inst.negatives.len() as u128) < (k as u128).pow(k as u32));
    }
    assert_eq!(built, 1000);
}

#[test]
fn instance_generation_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let p = rng.random_range(2..=5);
        let t = rng.random_range(1..=2);
        let grid = random_grid(&mut rng, 2, p, min_feasible_e0(2, p, t));
        let seed = rng.random();
        let build = |grid: &regreg_core::regularity::GridE| {
            let f = make_fn(&FamilySpec::Min, &grid.tuple_set()).unwrap();
            let rho = gen_rho_tlog(grid, t, seed).unwrap();
            build_structured(&f, grid, &rho, t, false)
                .unwrap()
                .to_json_string()
        };
        let a = build(&grid);
        let b = build(&grid);
        assert_eq!(a, b, "byte-identical serialization for equal inputs");
        let parsed = StructuredInstance::from_json_str(&a).unwrap();
        assert_eq!(parsed.to_json_string(), a);
    }
}
