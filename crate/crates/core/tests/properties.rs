mod common;

use orbitmat::exact_oracle::{dense_mul, DenseIntMatrix};
use orbitmat::function_model::{
    cycle_threshold, localize, parse_spec, FunctionSpec, LocalFunction,
};
use orbitmat::matrix_engine::build_m;
use orbitmat::orbit_engine::{decompose, detect_cycle, heights, j_nk, orbit};
use orbitmat::report::{run_analyze, AnalysisReport, AnalyzeOptions};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rcwa_spec() -> impl Strategy<Value = String> {
    any::<u64>().prop_map(|seed| common::random_rcwa(&mut ChaCha8Rng::seed_from_u64(seed)))
}

fn any_spec() -> impl Strategy<Value = String> {
    prop_oneof![
        rcwa_spec(),
        (2u64..40, any::<u64>())
            .prop_map(|(r, seed)| common::random_table(&mut ChaCha8Rng::seed_from_u64(seed), r)),
        (2u64..40, any::<u64>()).prop_map(|(r, seed)| {
            common::random_forest_table(&mut ChaCha8Rng::seed_from_u64(seed), r)
        }),
        (-20i64..20)
            .prop_filter("nonzero", |t| *t != 0)
            .prop_map(|t| format!("shift:t={t}")),
        Just("nextprime".to_string()),
        Just("collatz".to_string()),
        Just("chapman".to_string()),
    ]
}

/// An arbitrary fixed-point-free table on `{1..=n}` with values in `0..=n`.
fn local_function() -> impl Strategy<Value = LocalFunction> {
    (1usize..40).prop_flat_map(|n| {
        prop::collection::vec(0..=n, n).prop_map(|mut images| {
            for (i, y) in images.iter_mut().enumerate() {
                if *y == i + 1 {
                    *y = 0;
                }
            }
            LocalFunction::from_images(&images).unwrap()
        })
    })
}

/// Same, but every image is larger than its input, so no cycle exists.
fn acyclic_local_function() -> impl Strategy<Value = LocalFunction> {
    (1usize..40).prop_flat_map(|n| {
        prop::collection::vec(any::<prop::sample::Index>(), n).prop_map(move |picks| {
            let images: Vec<usize> = picks
                .iter()
                .enumerate()
                .map(|(i, pick)| {
                    let x = i + 1;
                    // Choose from {0} plus {x+1..=n}.
                    let k = pick.index(n - x + 1);
                    if k == 0 {
                        0
                    } else {
                        x + k
                    }
                })
                .collect();
            LocalFunction::from_images(&images).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parsed_specs_have_no_fixed_points(spec in any_spec()) {
        let spec = parse_spec(&spec).unwrap();
        for x in 1..=10_000u64 {
            prop_assert_ne!(spec.eval(x).unwrap(), x);
        }
    }

    #[test]
    fn localize_filters_eval(spec in any_spec(), n in 1usize..300) {
        let parsed = parse_spec(&spec).unwrap();
        let lf = localize(&parsed, n).unwrap();
        for x in 1..=n {
            let y = parsed.eval(x as u64).unwrap();
            let expected = if (1..=n as u64).contains(&y) { y as usize } else { 0 };
            prop_assert_eq!(lf.image(x), expected);
        }
    }

    #[test]
    fn localization_is_monotone(spec in any_spec(), n in 1usize..200, extra in 0usize..200) {
        let parsed = parse_spec(&spec).unwrap();
        let small = localize(&parsed, n).unwrap();
        let large = localize(&parsed, n + extra).unwrap();
        for x in 1..=n {
            if small.image(x) != 0 {
                prop_assert_eq!(large.image(x), small.image(x));
            }
        }
        prop_assert_eq!(large.restrict(n).unwrap(), small);
    }

    #[test]
    fn cycle_reports_are_consistent(lf in local_function()) {
        let report = detect_cycle(&lf);
        if report.found {
            let m = report.length();
            prop_assert!(m >= 2);
            for i in 0..m {
                prop_assert_eq!(lf.image(report.elements[i]), report.elements[(i + 1) % m]);
            }
            prop_assert!(heights(&lf).is_err());
            // No cycle holds a smaller element than the reported one.
            let min = *report.elements.iter().min().unwrap();
            for x in 1..min {
                let mut y = lf.image(x);
                let mut returns = false;
                for _ in 0..lf.n() {
                    returns |= y == x;
                    y = lf.image(y);
                }
                prop_assert!(!returns, "{} is on a cycle", x);
            }
        } else {
            prop_assert!(heights(&lf).is_ok());
        }
    }

    #[test]
    fn heights_and_partition(lf in acyclic_local_function()) {
        let n = lf.n();
        let hp = heights(&lf).unwrap();
        for x in 1..=n {
            let path = orbit(&lf, x).unwrap();
            prop_assert_eq!(path.len(), hp.height(x));
            prop_assert!((1..=n).contains(&hp.height(x)));
            let mut sorted = path.clone();
            sorted.sort_unstable();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), path.len());
        }
        prop_assert_eq!(hp.partition_pi.iter().sum::<usize>(), n);
        prop_assert!(hp.partition_pi.iter().all(|&p| p >= 1));
        prop_assert!(hp.height_sum() <= hp.height_sum_bound());
        prop_assert_eq!(build_m(&lf).nilpotency_degree(), Some(hp.degree_m));

        let d = decompose(&lf).unwrap();
        prop_assert_eq!(d.level_counts(), hp.partition_pi.clone());
        let mut covered: Vec<usize> = d.classes.values().flatten().copied().collect();
        covered.sort_unstable();
        prop_assert_eq!(covered, (1..=n).collect::<Vec<_>>());
        for (&root, members) in &d.classes {
            prop_assert_eq!(hp.height(root), 1);
            prop_assert_eq!(members.iter().filter(|&&y| hp.height(y) == 1).count(), 1);
            let tree = d.tree(root).unwrap();
            for (parent, kids) in &tree.children {
                prop_assert!(kids.windows(2).all(|w| w[0] < w[1]));
                for &kid in kids {
                    prop_assert_eq!(hp.height(kid), hp.height(*parent) + 1);
                }
            }
        }
        prop_assert_eq!(j_nk(&lf, 1).unwrap(), n - d.class_count());
    }

    #[test]
    fn j_nk_counts_match_definition_and_powers(lf in acyclic_local_function()) {
        let n = lf.n();
        let hp = heights(&lf).unwrap();
        let m = build_m(&lf);
        let tails = hp.tail_counts();
        for k in 1..=n {
            // Direct count of x whose k-th iterate stays in {1..n}.
            let direct = (1..=n)
                .filter(|&x| {
                    let mut y = x;
                    for _ in 0..k {
                        y = lf.image(y);
                    }
                    y != 0
                })
                .count();
            prop_assert_eq!(j_nk(&lf, k).unwrap(), direct);
            prop_assert_eq!(m.power(k as u64).nnz(), direct);
            prop_assert!(direct <= n - k);
            if k <= hp.degree_m {
                prop_assert_eq!(tails[k - 1], direct);
            }
        }
    }

    #[test]
    fn power_matches_dense_and_composition(lf in local_function(), k in 0u64..80) {
        let m = build_m(&lf);
        let dense_m = DenseIntMatrix::from(&m);
        let mut dense = DenseIntMatrix::identity(lf.n());
        for _ in 0..k {
            dense = dense_mul(&dense_m, &dense).unwrap();
        }
        prop_assert_eq!(DenseIntMatrix::from(&m.power(k)), dense);
        // Column j of M^k is the k-fold iterate of j.
        for j in 1..=lf.n() {
            let mut y = j;
            for _ in 0..k {
                y = lf.image(y);
            }
            prop_assert_eq!(m.power(k).rows()[j - 1], y);
        }
    }

    #[test]
    fn reports_round_trip(spec in any_spec(), n in 1usize..120, count_only in any::<bool>()) {
        let opts = AnalyzeOptions { materialize_inverse: !count_only, ..Default::default() };
        let report = run_analyze(&spec, n, &opts).unwrap().report;
        let json = report.to_json();
        prop_assert_eq!(AnalysisReport::from_json(&json).unwrap(), report.clone());
        prop_assert!(report.check_identities().is_ok());
        prop_assert_eq!(report.partition_pi.is_none(), report.has_cycle);
    }
}

#[test]
fn threshold_property_for_known_cycles() {
    // (spec, members of one cycle); the 3x-1 map also has a cycle through 17.
    let cases: [(&str, &[u64]); 4] = [
        ("rcwa:mod=2;0:1,0;1:3,-1;cut=2", &[5, 7, 10]),
        ("table:2>4,4>2", &[2, 4]),
        ("table:1>2,2>1", &[1, 2]),
        ("table:3>9,9>5,5>3,1>3", &[3, 9, 5]),
    ];
    for (spec, cycle) in cases {
        let threshold = cycle_threshold(cycle).unwrap() as usize;
        let parsed = parse_spec(spec).unwrap();
        for n in 1..=3 * threshold {
            let found = detect_cycle(&localize(&parsed, n).unwrap()).found;
            assert_eq!(found, n >= threshold, "{spec} at n = {n}");
        }
    }
}

#[test]
fn chapman_relation_sample() {
    let c = parse_spec("rcwa:mod=2;0:1,0;1:3,1").unwrap();
    let psi = FunctionSpec::chapman();
    for x in 2..=1000u64 {
        assert_eq!(c.eval(x).unwrap(), psi.eval(x - 1).unwrap() + 1);
    }
}
