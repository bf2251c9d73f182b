use std::collections::BTreeMap;

use floerkit::algebra::OperatorSystem;
use floerkit::fixtures::*;
use floerkit::group_series::GroupSeries;
use floerkit::novikov::NovikovElement;
use floerkit::obstruction::{compute_potential, is_properly_unobstructed};
use proptest::prelude::*;

/// Sums `T^{E(β)} Y^{∂β}` times each output of `m_{0,β}` by hand.
fn oracle(
    m: &OperatorSystem,
    precision: &floerkit::novikov::Extended,
) -> BTreeMap<usize, GroupSeries> {
    let rank = m.labels.lattice_rank();
    let mut out: BTreeMap<usize, GroupSeries> = BTreeMap::new();
    for ((k, beta), cell) in m.cells() {
        if *k != 0 || beta.is_zero() {
            continue;
        }
        for (idx, c) in cell.get(&[][..]).into_iter().flatten() {
            let term = GroupSeries::monomial(
                rank,
                NovikovElement::monomial(c.as_constant().unwrap(), m.labels.energy_of(beta)),
                m.labels.boundary_of(beta),
                precision.clone(),
            );
            let slot = out
                .entry(*idx)
                .or_insert_with(|| GroupSeries::zero(rank, precision.clone()));
            *slot = slot.add(&term);
        }
    }
    out.retain(|_, s| !s.is_zero());
    out
}

fn assert_recombines(m: &OperatorSystem) -> Result<(), TestCaseError> {
    let pot = compute_potential(m).unwrap();
    let want = oracle(m, pot.precision());
    let got = pot.recombine();
    prop_assert_eq!(
        want.keys().collect::<Vec<_>>(),
        got.keys().collect::<Vec<_>>()
    );
    for (i, s) in &want {
        prop_assert!(s.eq_up_to_precision(&got[i]), "component {}", i);
    }
    Ok(())
}

#[test]
fn fixtures_recombine() {
    for name in FIXTURE_NAMES {
        let fix = fixture_by_name(name, &FixtureOptions::default()).unwrap();
        assert_recombines(&fix.m).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transported_algebras_recombine(which in 0usize..5, seed in any::<u64>()) {
        let fix = fixture_by_name(FIXTURE_NAMES[which], &FixtureOptions::default()).unwrap();
        assert_recombines(&transported_pair(&fix, seed).m_prime)?;
    }

    #[test]
    fn unobstructedness_is_gauge_invariant(which in 0usize..5, seed in any::<u64>()) {
        let fix = fixture_by_name(FIXTURE_NAMES[which], &FixtureOptions::default()).unwrap();
        let p = transported_pair(&fix, seed);
        let before = is_properly_unobstructed(&p.m).unwrap();
        let after = is_properly_unobstructed(&p.m_prime).unwrap();
        prop_assert_eq!(before.unobstructed, after.unobstructed);
        for (i, rep) in &after.witnesses {
            prop_assert!(rep.witness.is_some(), "Q_{} has no witness", i + 1);
        }
    }
}
