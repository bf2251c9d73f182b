mod common;

use common::brute_force_count;
use floerkit::algebra::{ainfty_defect, hom_defect, OperatorSystem};
use floerkit::fixtures::*;
use floerkit::hpt::*;
use floerkit::isotopy::{check_pseudo_isotopy, restrict, PseudoIsotopy};
use floerkit::labels::LabelGroup;
use floerkit::novikov::{q, qi};
use floerkit::poly::Poly;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn unlabeled_tree_counts_are_schroeder_numbers() {
    let labels = LabelGroup::trivial(0);
    let zero = labels.zero();
    let expect = [0, 0, 1, 3, 11, 45, 197];
    for (k, e) in expect.iter().enumerate() {
        assert_eq!(
            enumerate_trees(k, &zero, &labels, 100_000).unwrap().len(),
            *e,
            "k={k}"
        );
    }
}

#[test]
fn tree_counts_match_brute_force() {
    let opts = FixtureOptions::default();
    for fix in [maslov0_obstructed(&opts), maslov2_pair(&opts)] {
        let labels = fix.m.labels.clone();
        let e_max = if fix.name == "maslov2-pair" {
            qi(2)
        } else {
            qi(3)
        };
        for beta in labels.effective_classes(&e_max).unwrap() {
            for k in 0..=4 {
                if k + beta.size() as usize > 5 {
                    continue;
                }
                let trees = enumerate_trees(k, &beta, &labels, 1_000_000).unwrap();
                assert_eq!(
                    trees.len(),
                    brute_force_count(k, &beta, &labels),
                    "{} k={k} beta={beta}",
                    fix.name
                );
                for t in &trees {
                    assert_eq!(t.leaves(), k);
                    assert_eq!(t.total_class(labels.num_generators()), beta);
                }
            }
        }
    }
}

#[test]
fn tree_enumeration_respects_the_limit() {
    let labels = LabelGroup::trivial(0);
    let zero = labels.zero();
    assert!(matches!(
        enumerate_trees(6, &zero, &labels, 100),
        Err(HptError::CutoffExplosion(100))
    ));
}

#[test]
fn minimal_models_are_ainfty_with_homomorphic_inclusions() {
    for cm in chain_models(&FixtureOptions::default()) {
        assert!(
            ainfty_defect(&cm.m).unwrap().is_zero(),
            "{}: input",
            cm.name
        );
        let (m, inc) = minimal_model(&cm.m, &cm.contraction).unwrap();
        assert!(ainfty_defect(&m).unwrap().is_zero(), "{}", cm.name);
        assert!(
            hom_defect(&inc, &m, &cm.m).unwrap().is_zero(),
            "{}",
            cm.name
        );
        let (mr, ir) = minimal_model_recursive(&cm.m, &cm.contraction).unwrap();
        assert_eq!(m, mr, "{}", cm.name);
        assert_eq!(inc, ir, "{}", cm.name);
    }
}

#[test]
fn identity_contraction_returns_the_algebra() {
    let fix = maslov2_pair(&FixtureOptions::default());
    let cm = identity_model(&fix);
    let (m, inc) = minimal_model(&cm.m, &cm.contraction).unwrap();
    assert_eq!(m, fix.m);
    assert_eq!(
        inc,
        OperatorSystem::identity(
            fix.m.source.clone(),
            fix.m.labels.clone(),
            fix.m.trunc.clone()
        )
    );
}

#[test]
fn heisenberg_has_a_massey_product() {
    let cm = heisenberg(&FixtureOptions::default());
    let (m, _) = minimal_model(&cm.m, &cm.contraction).unwrap();
    let zero = m.labels.zero();
    let m3 = m.cell(3, &zero).expect("m_3 is nonzero");
    // m_2(x, y) = xy is exact, so m_3(x, x, y) = ±x·G(xy) = ∓xz.
    let (x, y, xz) = (1, 2, 3);
    let v = &m3[&vec![x, x, y]];
    assert_eq!(v.len(), 1);
    assert!(v.contains_key(&xz));
    assert!(m.entry(2, &zero, &[x, y]).is_none());
}

#[test]
fn transported_extension_uses_the_homotopy() {
    let cm = transported_extension(&maslov0_obstructed(&FixtureOptions::default()));
    let (m, _) = minimal_model(&cm.m, &cm.contraction).unwrap();
    let naive =
        cm.m.precompose(&cm.contraction.i, cm.contraction.h.clone())
            .postcompose(&cm.contraction.pi, cm.contraction.h.clone());
    assert_ne!(m, naive);
}

#[test]
fn invalid_contractions_are_rejected() {
    let mut cm = heisenberg(&FixtureOptions::default());
    let d = cm.m.linear_part();
    cm.contraction.g = cm.contraction.g.scale(&Poly::constant(qi(-1)));
    assert!(matches!(
        cm.contraction.validate(&d),
        Err(HptError::ContractionInvalid(_))
    ));
    let mut cm = heisenberg(&FixtureOptions::default());
    cm.contraction.pi.cols[1].clear();
    assert!(matches!(
        minimal_model(&cm.m, &cm.contraction),
        Err(HptError::ContractionInvalid(_))
    ));
}

fn check_family(iso: &PseudoIsotopy, fam: &FamilyContraction) {
    let fm = family_minimal_model(iso, fam).unwrap();
    let rep = check_pseudo_isotopy(&fm.m).unwrap();
    assert!(rep.passed(), "{rep}");
    for s0 in [qi(0), q(1, 3), qi(1)] {
        let (m, inc) = minimal_model(&restrict(iso, &s0), &fam.at(&s0)).unwrap();
        assert_eq!(restrict(&fm.m, &s0), m);
        assert_eq!(fm.inclusion_plain.eval_at(&s0), inc);
    }
}

#[test]
fn family_model_of_a_deformed_contraction() {
    let cm = heisenberg(&FixtureOptions::default());
    let d = cm.m.linear_part();
    let fam = FamilyContraction::linear_deformation(
        &cm.contraction,
        &d,
        cm.deformation.as_ref().unwrap(),
    )
    .unwrap();
    fam.validate(&d).unwrap();
    let iso = PseudoIsotopy::trivial(&cm.m);
    let fm = family_minimal_model(&iso, &fam).unwrap();
    assert!(!fm.m.c.is_zero());
    check_family(&iso, &fam);
}

#[test]
fn family_model_of_a_transported_family() {
    let opts = FixtureOptions::default();
    let fix = maslov0_pair(&opts);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = random_gauge_family(&fix, &mut rng);
    let iso = PseudoIsotopy::from_transport(&fix.m, &u).unwrap();
    let fam = FamilyContraction::constant(&identity_model(&fix).contraction);
    let fm = family_minimal_model(&iso, &fam).unwrap();
    assert_eq!(fm.m.m, iso.m);
    assert_eq!(fm.m.c, iso.c);

    let ext = acyclic_extension(&maslov0_obstructed(&opts));
    let u = extension_gauge(
        &ext,
        Poly::new(vec![qi(0), q(1, 2)]),
        Poly::new(vec![qi(0), qi(0), qi(3)]),
    );
    let iso = PseudoIsotopy::from_transport(&ext.m, &u).unwrap();
    check_family(&iso, &FamilyContraction::constant(&ext.contraction));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gauged_extensions_transfer(a in -3i64..=3, b in -3i64..=3, which in 0usize..3) {
        let opts = FixtureOptions::default();
        let fix = [maslov0_obstructed(&opts), maslov0_pair(&opts), torus_exterior(&opts)][which].clone();
        let base = acyclic_extension(&fix);
        let u = extension_gauge(&base, Poly::constant(qi(a)), Poly::constant(qi(b)));
        let m = floerkit::algebra::transport_structure(&base.m, &u).unwrap();
        let (mm, inc) = minimal_model(&m, &base.contraction).unwrap();
        prop_assert!(ainfty_defect(&mm).unwrap().is_zero());
        prop_assert!(hom_defect(&inc, &mm, &m).unwrap().is_zero());
    }
}

#[test]
fn low_energy_output_ignores_high_energy_input() {
    for cm in chain_models(&FixtureOptions::default()) {
        let labels = cm.m.labels.clone();
        let (base, _) = minimal_model(&cm.m, &cm.contraction).unwrap();
        let energies: Vec<_> =
            cm.m.cells()
                .map(|((_, b), _)| labels.energy_of(b))
                .filter(|e| e > &qi(0))
                .collect();
        for cut in energies {
            let mut perturbed = cm.m.clone();
            let keys: Vec<_> =
                cm.m.cells()
                    .map(|(k, _)| k.clone())
                    .filter(|(_, b)| labels.energy_of(b) >= cut)
                    .collect();
            for (k, b) in keys {
                let doubled =
                    cm.m.cell(k, &b)
                        .unwrap()
                        .iter()
                        .map(|(t, v)| (t.clone(), v.iter().map(|(o, c)| (*o, c + c)).collect()))
                        .collect();
                perturbed.set_cell(k, &b, doubled);
            }
            let (m, _) = minimal_model(&perturbed, &cm.contraction).unwrap();
            for ((k, b), cell) in base.cells().filter(|((_, b), _)| labels.energy_of(b) < cut) {
                assert_eq!(m.cell(*k, b), Some(cell), "{} k={k} beta={b}", cm.name);
            }
            for ((k, b), cell) in m.cells().filter(|((_, b), _)| labels.energy_of(b) < cut) {
                assert_eq!(base.cell(*k, b), Some(cell), "{} k={k} beta={b}", cm.name);
            }
        }
    }
}
