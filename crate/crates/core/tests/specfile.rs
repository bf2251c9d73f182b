use floerkit::algebra::OpKind;
use floerkit::fixtures::*;
use floerkit::fukaya::{IsotopyShift, PathPlan};
use floerkit::isotopy::PseudoIsotopy;
use floerkit::novikov::{q, qi};
use floerkit::specfile::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn roundtrip(doc: &SpecDocument) {
    let text = doc.render();
    let back = SpecDocument::parse(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert_eq!(&back, doc, "{text}");
}

fn fixture_doc(fix: &Fixture) -> SpecDocument {
    let mut doc = SpecDocument::with_labels(&fix.m.labels, &fix.m.trunc);
    doc.add_operator("m", &fix.m, "H", "H");
    doc
}

#[test]
fn fixtures_round_trip_and_rebuild() {
    for name in FIXTURE_NAMES {
        let fix = fixture_by_name(name, &FixtureOptions::default()).unwrap();
        let doc = fixture_doc(&fix);
        roundtrip(&doc);
        let back = SpecDocument::parse(&doc.render()).unwrap();
        assert_eq!(back.operator("m").unwrap(), fix.m, "{name}");
    }
}

#[test]
fn chain_models_and_plans_round_trip() {
    for cm in chain_models(&FixtureOptions::default()) {
        let mut doc = SpecDocument::with_labels(&cm.m.labels, &cm.m.trunc);
        doc.add_operator("mc", &cm.m, "C", "C");
        doc.add_contraction(&cm.contraction, "H", "C", cm.deformation.as_ref());
        doc.plan = Some(PathPlan {
            delta: floerkit::group_series::Polyhedron::cube(2, &q(1, 2)),
            steps: vec![IsotopyShift::new(
                vec![q(1, 4), qi(0)],
                qi(1),
                vec![qi(1); cm.m.labels.num_generators()],
            )],
        });
        roundtrip(&doc);
        let (g, k) = doc.contraction().unwrap();
        assert_eq!(g.i, cm.contraction.i, "{}", cm.name);
        assert_eq!(g.g, cm.contraction.g, "{}", cm.name);
        assert_eq!(k, cm.deformation, "{}", cm.name);
    }
}

#[test]
fn isotopies_round_trip() {
    let fix = maslov0_pair(&FixtureOptions::default());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = random_gauge_family(&fix, &mut rng);
    let iso = PseudoIsotopy::from_transport(&fix.m, &u).unwrap();
    let mut doc = SpecDocument::with_labels(&fix.m.labels, &fix.m.trunc);
    doc.context.seed = Some(5);
    doc.add_operator("ms", &iso.m, "H", "H");
    doc.add_operator("cs", &iso.c, "H", "H");
    doc.isotopies.push(IsotopyTable {
        name: "M".into(),
        algebra: "ms".into(),
        part: "cs".into(),
    });
    roundtrip(&doc);
    assert_eq!(doc.isotopy("M").unwrap(), iso);
    assert_eq!(
        doc.names_of_kind(OpKind::IsotopyPart),
        vec!["cs".to_string()]
    );
}

#[test]
fn handwritten_document() {
    let text = "
# maslov two disk on a circle
[context]
cutoff = 2
weight_cap = 3

[label_group]
lattice_rank = 1
rank = 1
energy = 1
maslov = 2
boundary = 1
generators = 1

[graded_space H]
names = 1 t
degrees = 0 1
unit = 0
h1 = 1
pairing = 1

[operators m algebra H H]
k=2 beta=0 in=0,0 out=0 coef=1
k=2 beta=0 in=0,1 out=1 coef=1
k=2 beta=0 in=1,0 out=1 coef=-1
k=0 beta=1 in= out=0 coef=1
k=1 beta=1 in=1 out=0 coef=1
k=2 beta=1 in=1,1 out=0 coef=1/2
";
    let doc = SpecDocument::parse(text).unwrap();
    let m = doc.operator("m").unwrap();
    assert_eq!(m.num_entries(), 6);
    assert!(floerkit::algebra::is_ainfty(&m).unwrap());
    roundtrip(&doc);
}

#[test]
fn errors_carry_locations() {
    let bad = "[context]\ncutoff = x\n";
    assert!(matches!(
        SpecDocument::parse(bad),
        Err(SpecError::Parse { line: 2, .. })
    ));
    let bad = "[nonsense]\n";
    assert!(matches!(
        SpecDocument::parse(bad),
        Err(SpecError::Parse { line: 1, .. })
    ));
    let bad = "[graded_space H]\nnames = a\ndegrees = 0\n[operators m algebra H H]\nk=1 beta= in=0,0 out=0 coef=1\n";
    assert!(matches!(
        SpecDocument::parse(bad),
        Err(SpecError::Parse { line: 5, .. })
    ));
}

#[test]
fn schema_and_degree_violations() {
    let fix = maslov2_pair(&FixtureOptions::default());
    let mut doc = fixture_doc(&fix);
    doc.operators[0].entries[0].out = 17;
    assert!(matches!(doc.operator("m"), Err(SpecError::Schema(_))));
    let mut doc = fixture_doc(&fix);
    let e = doc.operators[0]
        .entries
        .iter_mut()
        .find(|e| e.k == 2 && e.beta.is_zero() && e.input == vec![1, 2])
        .unwrap();
    e.out = 1;
    assert!(matches!(
        doc.operator("m"),
        Err(SpecError::Algebra(
            floerkit::algebra::AlgebraError::DegreeViolation(_)
        ))
    ));
    assert!(matches!(doc.operator("nope"), Err(SpecError::Schema(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transported_pairs_round_trip(seed in 0u64..10_000, which in 0usize..5) {
        let fix = fixture_by_name(FIXTURE_NAMES[which], &FixtureOptions::default()).unwrap();
        let pair = transported_pair(&fix, seed);
        let mut doc = SpecDocument::with_labels(&fix.m.labels, &fix.m.trunc);
        doc.context.seed = Some(seed);
        doc.add_operator("m", &pair.m, "H", "H");
        doc.add_operator("m_prime", &pair.m_prime, "H", "H");
        doc.add_operator("u", &pair.u, "H", "H");
        let back = SpecDocument::parse(&doc.render()).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.operator("u").unwrap(), pair.u);
    }
}
