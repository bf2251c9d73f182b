use floerkit::fixtures::{fixture_by_name, FixtureOptions, FIXTURE_NAMES};
use floerkit::labels::{LabelClass, LabelGroup};
use floerkit::novikov::qi;
use proptest::prelude::*;

fn labels(which: usize) -> LabelGroup {
    (*fixture_by_name(FIXTURE_NAMES[which], &FixtureOptions::default())
        .unwrap()
        .m
        .labels)
        .clone()
}

fn class(labels: &LabelGroup, pick: usize) -> LabelClass {
    let all = labels.effective_classes(&qi(3)).unwrap();
    all[pick % all.len()].clone()
}

/// Every ordered tuple of effective classes, filtered by its sum.
fn brute_decompositions(labels: &LabelGroup, beta: &LabelClass, parts: usize) -> usize {
    let all = labels.effective_classes(&labels.energy_of(beta)).unwrap();
    let mut tuples: Vec<LabelClass> = vec![labels.zero()];
    for _ in 0..parts {
        tuples = tuples
            .iter()
            .flat_map(|t| all.iter().map(move |c| t.add(c)))
            .collect();
    }
    tuples.iter().filter(|t| *t == beta).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_maslov_boundary_are_additive(which in 0usize..5, a in 0usize..100, b in 0usize..100) {
        let l = labels(which);
        let (x, y) = (class(&l, a), class(&l, b));
        let s = x.add(&y);
        prop_assert_eq!(l.energy_of(&s), l.energy_of(&x) + l.energy_of(&y));
        prop_assert_eq!(l.maslov_of(&s), l.maslov_of(&x) + l.maslov_of(&y));
        let sum: Vec<i64> = l.boundary_of(&x).iter().zip(l.boundary_of(&y)).map(|(p, q)| p + q).collect();
        prop_assert_eq!(l.boundary_of(&s), sum);
    }

    #[test]
    fn decompositions_match_brute_force(which in 0usize..5, pick in 0usize..100, parts in 1usize..=3) {
        let l = labels(which);
        let beta = class(&l, pick);
        let d = l.decompositions(&beta, parts);
        prop_assert_eq!(d.len(), brute_decompositions(&l, &beta, parts));
        for parts in &d {
            let total = parts.iter().fold(l.zero(), |acc, c| acc.add(c));
            prop_assert_eq!(&total, &beta);
        }
    }
}
