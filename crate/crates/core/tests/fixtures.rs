use floerkit::algebra::{ainfty_defect, check_ud_axioms, hom_defect};
use floerkit::fixtures::*;

#[test]
fn named_fixtures_are_ud_ainfty_algebras() {
    let opts = FixtureOptions::default();
    for name in FIXTURE_NAMES {
        let f = fixture_by_name(name, &opts).unwrap();
        assert!(ainfty_defect(&f.m).unwrap().is_zero(), "{name}");
        let r = check_ud_axioms(&f.m);
        assert!(r.all_passed(), "{name}: {r}");
    }
}

#[test]
fn transported_pairs_are_ud() {
    let opts = FixtureOptions::default();
    for name in FIXTURE_NAMES {
        let f = fixture_by_name(name, &opts).unwrap();
        for seed in 0..2 {
            let p = transported_pair(&f, seed);
            assert!(ainfty_defect(&p.m_prime).unwrap().is_zero(), "{name}");
            assert!(
                hom_defect(&p.u, &p.m_prime, &p.m).unwrap().is_zero(),
                "{name}"
            );
            let r = check_ud_axioms(&p.m_prime);
            assert!(r.all_passed(), "{name} m': {r}");
            let r = check_ud_axioms(&p.u);
            assert!(r.all_passed(), "{name} u: {r}");
        }
    }
}

#[test]
fn gauges_change_the_structure() {
    let opts = FixtureOptions::default();
    let f = maslov2_pair(&opts);
    let p = transported_pair(&f, 7);
    assert!(p.u.num_entries() > f.m.source.dim());
    assert!(p.m_prime != p.m);
}
