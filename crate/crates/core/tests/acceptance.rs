//! The ten acceptance criteria. Runs without the test harness so that the
//! PASS/FAIL line of every criterion is always printed.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use floerkit::algebra::{
    ainfty_defect, check_ud_axioms, diamond, hom_defect, transport_structure, OperatorSystem,
};
use floerkit::fixtures::*;
use floerkit::fukaya::*;
use floerkit::group_series::{evaluate, vanishing_analysis, GroupSeries, TorusPoint};
use floerkit::hpt::{enumerate_trees, minimal_model};
use floerkit::isotopy::*;
use floerkit::labels::LabelClass;
use floerkit::novikov::{q, qi, Extended, NovikovElement, Q};
use floerkit::obstruction::{compute_potential, is_properly_unobstructed};
use floerkit::poly::Poly;
use floerkit::transitions::{canceling_check, compose_phase_check, wall_crossing_check};
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn opts() -> FixtureOptions {
    FixtureOptions::default()
}

fn identity(m: &OperatorSystem) -> OperatorSystem {
    OperatorSystem::identity(m.source.clone(), m.labels.clone(), m.trunc.clone())
}

fn is_identity(c: &OperatorSystem) -> bool {
    c.sub(&identity(c)).unwrap().is_zero()
}

fn generator(m: &OperatorSystem, j: usize) -> LabelClass {
    LabelClass::generator(m.labels.num_generators(), j)
}

// 1. Novikov laws

fn random_q(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Q {
    q(rng.gen_range(lo..=hi), rng.gen_range(1..=4))
}

fn random_exact(rng: &mut ChaCha8Rng) -> Vec<(Q, Q)> {
    let n = rng.gen_range(1..=4);
    let mut terms = BTreeMap::new();
    for _ in 0..n {
        let mut c = q(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        if c.is_zero() {
            c = qi(1);
        }
        terms.insert(random_q(rng, -4, 12), c);
    }
    terms.into_iter().collect()
}

/// Exact product by schoolbook convolution.
fn convolve(a: &[(Q, Q)], b: &[(Q, Q)]) -> BTreeMap<Q, Q> {
    let mut out: BTreeMap<Q, Q> = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            *out.entry(ea + eb).or_insert_with(Q::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn sum(a: &[(Q, Q)], b: &[(Q, Q)]) -> BTreeMap<Q, Q> {
    let mut out: BTreeMap<Q, Q> = a.iter().cloned().collect();
    for (e, c) in b {
        *out.entry(e.clone()).or_insert_with(Q::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn min_exponent(t: &[(Q, Q)]) -> Extended {
    t.first()
        .map_or(Extended::Infinity, |(e, _)| Extended::Finite(e.clone()))
}

/// Every term below the declared precision agrees with the exact value, and
/// nothing is stored at or above it.
fn sound(x: &NovikovElement, exact: &BTreeMap<Q, Q>) -> bool {
    let p = x.precision().clone();
    let below = |e: &Q| p.above(e);
    x.terms().iter().all(|(e, _)| below(e))
        && exact
            .iter()
            .filter(|(e, _)| below(e))
            .all(|(e, c)| &x.coefficient(e) == c)
        && x.terms().iter().all(|(e, c)| exact.get(e) == Some(c))
}

fn novikov_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..1000 {
        let ts: Vec<Vec<(Q, Q)>> = (0..3).map(|_| random_exact(&mut rng)).collect();
        let exact: Vec<NovikovElement> = ts
            .iter()
            .map(|t| NovikovElement::new(t.clone(), Extended::Infinity))
            .collect();
        let (x, y, z) = (&exact[0], &exact[1], &exact[2]);
        for (a, b) in [(x, y), (y, z), (x, z)] {
            let s = a.add_ref(b);
            let (va, vb) = (a.valuation(), b.valuation());
            ensure!(
                s.valuation() >= va.clone().min(vb.clone()),
                "triple {i}: ultrametric fails"
            );
            if va != vb {
                ensure!(
                    s.valuation() == va.min(vb),
                    "triple {i}: ultrametric equality fails"
                );
            }
            ensure!(
                a.mul_ref(b).valuation() == a.valuation().plus(&b.valuation()),
                "triple {i}: valuation not multiplicative"
            );
        }
        let xyz = x.mul_ref(y).mul_ref(z);
        ensure!(
            xyz.valuation() == x.valuation().plus(&y.valuation()).plus(&z.valuation()),
            "triple {i}: triple product valuation"
        );

        // Truncate each to a random precision above its valuation.
        let trunc: Vec<NovikovElement> = ts
            .iter()
            .map(|t| {
                let v = t[0].0.clone();
                NovikovElement::new(t.clone(), Extended::Finite(v + random_q(&mut rng, 1, 10)))
            })
            .collect();
        let (xt, yt, zt) = (&trunc[0], &trunc[1], &trunc[2]);
        for (a, b, ta, tb) in [
            (xt, yt, &ts[0], &ts[1]),
            (yt, zt, &ts[1], &ts[2]),
            (xt, zt, &ts[0], &ts[2]),
        ] {
            let p = a.mul_ref(b);
            let rule = a
                .precision()
                .plus(&min_exponent(tb))
                .min(b.precision().plus(&min_exponent(ta)));
            ensure!(
                p.precision() == &rule,
                "triple {i}: product precision {} differs from the rule {rule}",
                p.precision()
            );
            ensure!(
                sound(&p, &convolve(ta, tb)),
                "triple {i}: truncated product disagrees with the exact one"
            );
            let s = a.add_ref(b);
            ensure!(
                s.precision() == &a.precision().clone().min(b.precision().clone()),
                "triple {i}: sum precision"
            );
            ensure!(
                sound(&s, &sum(ta, tb)),
                "triple {i}: truncated sum disagrees with the exact one"
            );
        }
        let p3 = xt.mul_ref(yt).mul_ref(zt);
        ensure!(
            sound(
                &p3,
                &convolve(
                    &convolve(&ts[0], &ts[1]).into_iter().collect::<Vec<_>>(),
                    &ts[2]
                )
            ),
            "triple {i}: triple product"
        );
    }
    Ok("1000 triples".into())
}

// 2. A∞ and UD axioms

fn violation(
    m: &OperatorSystem,
    want_k: usize,
    want_beta: &LabelClass,
    axiom: Option<&str>,
) -> Result<(), String> {
    match axiom {
        None => {
            let d = ainfty_defect(m).unwrap();
            let ((k, b), _, _) = d
                .lowest_nonzero()
                .ok_or("violated variant has no A∞ defect")?;
            ensure!(
                k == want_k && &b == want_beta,
                "A∞ defect first at k={k} beta={b}, predicted k={want_k} beta={want_beta}"
            );
        }
        Some(name) => {
            let rep = check_ud_axioms(m);
            let c = rep
                .checks
                .iter()
                .find(|c| !c.passed)
                .ok_or("violated variant passes every axiom")?;
            let l = c.location.as_ref().ok_or("failure without a location")?;
            ensure!(
                c.axiom.name() == name,
                "first failing axiom is {}, predicted {name}",
                c.axiom.name()
            );
            ensure!(
                l.k == want_k && &l.beta == want_beta,
                "{name} fails at {l}, predicted k={want_k} beta={want_beta}"
            );
        }
    }
    Ok(())
}

fn ainfty_ud_suite() -> Outcome {
    let (a, b, c) = (
        torus_exterior(&opts()),
        maslov2_pair(&opts()),
        maslov0_obstructed(&opts()),
    );
    for fix in [&a, &b, &c] {
        ensure!(
            ainfty_defect(&fix.m).unwrap().is_zero(),
            "{}: brace(m,m) ≠ 0",
            fix.name
        );
        let rep = check_ud_axioms(&fix.m);
        ensure!(rep.all_passed(), "{}: {rep}", fix.name);
    }
    let zero = a.m.labels.zero();
    let unit = a.m.source.unit.unwrap();
    let theta = a.m.source.h1_basis[0];

    // m_{2,0}(1, θ) doubled: associativity first fails on three inputs.
    let mut v = a.m.clone();
    v.add_entry(2, &zero, vec![unit, theta], theta, &Poly::one());
    violation(&v, 3, &zero, None)?;
    violation(&v, 2, &zero, Some("unitality-ii"))?;

    // m_{1,β}(1) ≠ 0 on C.
    let e1 = generator(&c.m, 0);
    let mut v = c.m.clone();
    v.add_entry(
        1,
        &e1,
        vec![c.m.source.unit.unwrap()],
        c.m.source.h1_basis[0],
        &Poly::one(),
    );
    violation(&v, 1, &e1, Some("unitality-iii"))?;
    // It is not a derivation either: D(1·1) ≠ D(1)·1 ± 1·D(1).
    violation(&v, 2, &e1, None)?;

    // Dropping m_{1,β} on B leaves m_{0,β} without its divisor partner.
    let e1 = generator(&b.m, 0);
    let mut v = b.m.clone();
    v.set_cell(1, &e1, BTreeMap::new());
    violation(&v, 0, &e1, Some("divisor"))?;
    Ok("fixtures A, B, C and 4 violations".into())
}

// 3. Homological perturbation

fn hpt_suite() -> Outcome {
    let models = chain_models(&opts());
    ensure!(models.len() >= 5, "only {} models", models.len());
    let mut massey = false;
    for cm in &models {
        let (m, inc) =
            minimal_model(&cm.m, &cm.contraction).map_err(|e| format!("{}: {e}", cm.name))?;
        ensure!(
            ainfty_defect(&m).unwrap().is_zero(),
            "{}: minimal model is not A∞",
            cm.name
        );
        ensure!(
            hom_defect(&inc, &m, &cm.m).unwrap().is_zero(),
            "{}: inclusion is not a homomorphism",
            cm.name
        );
        if !cm.contraction.g.is_zero() && m.cell(3, &m.labels.zero()).is_some() {
            massey = true;
        }
    }
    ensure!(massey, "no model with G ≠ 0 has m_(3,0) ≠ 0");
    let mut cells = 0;
    for fix in [
        torus_exterior(&opts()),
        maslov0_obstructed(&opts()),
        maslov2_pair(&opts()),
    ] {
        let labels = fix.m.labels.clone();
        for beta in labels.effective_classes(&qi(3)).unwrap() {
            for k in 0..=4 {
                let trees =
                    enumerate_trees(k, &beta, &labels, 10_000_000).map_err(|e| e.to_string())?;
                let brute = common::brute_force_count(k, &beta, &labels);
                ensure!(
                    trees.len() == brute,
                    "{} k={k} beta={beta}: {} trees, brute force {brute}",
                    fix.name,
                    trees.len()
                );
                cells += 1;
            }
        }
    }
    Ok(format!("{} models, {cells} tree cells", models.len()))
}

// 4. Operator integral

fn integral_suite() -> Outcome {
    let mut n = 0;
    for (i, name) in FIXTURE_NAMES.iter().enumerate() {
        let fix = fixture_by_name(name, &opts()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(40 + i as u64);
        let u = random_gauge_family(&fix, &mut rng);
        let iso = PseudoIsotopy::from_transport(&fix.m, &u).unwrap();
        let rep = check_pseudo_isotopy(&iso).unwrap();
        ensure!(rep.passed(), "{name}: not a pseudo-isotopy: {rep}");
        for (a, b) in [(qi(0), qi(1)), (q(1, 4), q(2, 3))] {
            let c = integrate(&iso, &a, &b).unwrap();
            let (ma, mb) = (restrict(&iso, &a), restrict(&iso, &b));
            ensure!(
                hom_defect(&c, &ma, &mb).unwrap().is_zero(),
                "{name}: hom_defect ≠ 0 on [{a},{b}]"
            );
            let ud = check_integral_ud(&c, &ma);
            ensure!(ud.all_passed(), "{name}: {ud}");
        }
        for a in [qi(0), q(1, 2), qi(1)] {
            ensure!(
                is_identity(&integrate(&iso, &a, &a).unwrap()),
                "{name}: C[{a},{a}] ≠ id"
            );
        }
        for (a, b, c) in [
            (qi(0), q(1, 3), qi(1)),
            (q(1, 4), q(1, 2), q(3, 4)),
            (q(1, 5), q(2, 3), q(5, 6)),
        ] {
            let ac = integrate(&iso, &a, &c).unwrap();
            let composed = diamond(
                &integrate(&iso, &b, &c).unwrap(),
                &integrate(&iso, &a, &b).unwrap(),
            )
            .unwrap();
            ensure!(
                ac.sub(&composed).unwrap().is_zero(),
                "{name}: flow fails at {a} < {b} < {c}"
            );
        }
        n += 1;
    }
    Ok(format!("{n} pseudo-isotopies"))
}

// 5. Wall-crossing

fn wall_crossing_suite() -> Outcome {
    let (mut n, mut obstructed, mut identities) = (0, 0, 0);
    for name in FIXTURE_NAMES {
        let fix = fixture_by_name(name, &opts()).unwrap();
        for seed in 0..2 {
            let p = transported_pair(&fix, seed);
            let (src, tgt) = (
                compute_potential(&p.m_prime).unwrap(),
                compute_potential(&p.m).unwrap(),
            );
            let rep = wall_crossing_check(&p.u, &src, &tgt).unwrap();
            ensure!(
                rep.potential,
                "{name} seed {seed}: potential identity fails"
            );
            ensure!(
                rep.obstruction.iter().all(|b| *b),
                "{name} seed {seed}: obstruction identity fails"
            );
            match rep.unobstructed_source_identity {
                Some(ok) => {
                    ensure!(ok, "{name} seed {seed}: φ(W′) ≠ W with Q = 0");
                    identities += 1;
                }
                None => obstructed += 1,
            }
            n += 1;
        }
    }
    ensure!(obstructed > 0 && identities > 0, "pairs are not mixed");
    Ok(format!("{n} pairs, {obstructed} obstructed"))
}

// 6. Composition

fn composition_suite() -> Outcome {
    let mut n = 0;
    for (i, name) in FIXTURE_NAMES.iter().enumerate() {
        let fix = fixture_by_name(name, &opts()).unwrap();
        for j in 0..2 {
            let mut rng = ChaCha8Rng::seed_from_u64(600 + 10 * i as u64 + j);
            let f = random_gauge(&fix, &mut rng);
            let m1 = transport_structure(&fix.m, &f).unwrap();
            let g = random_gauge(
                &Fixture {
                    m: m1,
                    ..fix.clone()
                },
                &mut rng,
            );
            let rep = compose_phase_check(&f, &g).unwrap();
            ensure!(rep.lemma, "{name}/{j}: P_(f⋄g) identity fails");
            ensure!(
                rep.corollary == Some(true),
                "{name}/{j}: φ_(f⋄g) = φ_g ∘ φ_f fails ({:?})",
                rep.corollary
            );
            n += 1;
        }
    }
    Ok(format!("{n} composable pairs"))
}

// 7. Canceling trick

fn canceling_suite() -> Outcome {
    let mut n = 0;
    for (i, name) in FIXTURE_NAMES.iter().enumerate() {
        let fix = fixture_by_name(name, &opts()).unwrap();
        let pot = compute_potential(&fix.m).unwrap();
        let id = identity(&fix.m);
        let mut rng = ChaCha8Rng::seed_from_u64(700 + i as u64);
        let h = random_homotopy(&fix, &mut rng);
        let hh = UdHomotopy::from_flow(&id, &h, &fix.m, &fix.m).unwrap();
        let rep = verify_ud_homotopy(&hh, &fix.m, &fix.m).unwrap();
        ensure!(rep.passed(), "{name}: not a ud-homotopy: {rep}");
        let rep = canceling_check(&hh, &pot).unwrap();
        ensure!(rep.identity, "{name}: P_(f1) − P_(f0) ≠ Σ Q_j ∫R^j");
        ensure!(rep.passed(), "{name}: corollary fails");
        if pot.q.iter().all(|q| q.is_zero()) {
            ensure!(
                rep.difference.values().all(|s| s.is_zero()),
                "{name}: endpoint phases differ over an unobstructed algebra"
            );
        }
        n += 1;
    }
    Ok(format!("{n} ud-homotopies"))
}

// 8. Fukaya trick

fn shift(fix: &Fixture, xi: Vec<Q>) -> IsotopyShift {
    IsotopyShift::new(xi, fix.isoperimetric.clone(), fix.lengths.clone())
}

fn fukaya_suite() -> Outcome {
    let b = maslov2_pair(&opts());
    let rep = check_fukaya_trick(&b.m, &[q(1, 4), qi(0)]).unwrap();
    ensure!(rep.passed(), "B: {rep}");
    let want = GroupSeries::from_terms(
        2,
        vec![
            (vec![1, 0], NovikovElement::monomial(qi(1), q(5, 4))),
            (vec![-1, 0], NovikovElement::monomial(qi(1), q(3, 4))),
        ],
        Extended::Infinity,
    );
    ensure!(
        rep.pushed.w.eq_up_to_precision(&want) && rep.pushed.w.num_terms() == 2,
        "B: W^F = {}",
        rep.pushed.w
    );
    let c = maslov0_obstructed(&opts());
    let rep = check_fukaya_trick(&c.m, &[q(1, 4), qi(0)]).unwrap();
    ensure!(rep.passed(), "C: {rep}");
    let want = GroupSeries::monomial(
        2,
        NovikovElement::monomial(qi(1), q(5, 4)),
        vec![1, 0],
        Extended::Infinity,
    );
    ensure!(
        rep.pushed.q[0].eq_up_to_precision(&want) && rep.pushed.q[0].num_terms() == 1,
        "C: Q^F_1 = {}",
        rep.pushed.q[0]
    );
    ensure!(
        !rep.unobstructed && !rep.unobstructed_pushed,
        "C: verdict changed"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut random = 0;
    for _ in 0..200 {
        if random == 5 {
            break;
        }
        let fix = fixture_by_name(
            FIXTURE_NAMES[rng.gen_range(0..FIXTURE_NAMES.len())],
            &opts(),
        )
        .unwrap();
        let m = transported_pair(&fix, rng.gen()).m_prime;
        let xi: Vec<Q> = (0..2).map(|_| q(rng.gen_range(-4..=4), 8)).collect();
        if xi.iter().all(|x| x.is_zero()) || !shift(&fix, xi.clone()).is_admissible(&m) {
            continue;
        }
        let rep = check_fukaya_trick(&m, &xi).unwrap();
        ensure!(rep.passed(), "{} shifted by {xi:?}: {rep}", fix.name);
        random += 1;
    }
    ensure!(random == 5, "only {random} admissible shifts found");

    let mut steps = 0;
    for (fix, want) in [(b.clone(), true), (c.clone(), false)] {
        let plan = PathPlan {
            delta: fix.delta.clone(),
            steps: vec![
                shift(&fix, vec![q(1, 4), qi(0)]),
                shift(&fix, vec![q(-1, 8), q(1, 4)]),
                shift(&fix, vec![q(1, 8), q(-1, 8)]),
            ],
        };
        let rep = continuation_march(&fix.m, &plan).map_err(|e| format!("{}: {e}", fix.name))?;
        ensure!(rep.passed(), "{}: {rep}", fix.name);
        ensure!(
            rep.verdicts().iter().all(|v| *v == want),
            "{}: verdicts {:?}",
            fix.name,
            rep.verdicts()
        );
        steps = steps.max(rep.steps.len());
    }
    Ok(format!(
        "B, C, {random} random shifts, {steps}-step marches"
    ))
}

// 9. Vanishing

fn random_series(rng: &mut ChaCha8Rng) -> GroupSeries {
    let rank = rng.gen_range(1..=3);
    let terms = (0..rng.gen_range(1..=5))
        .map(|_| {
            let alpha: Vec<i64> = (0..rank).map(|_| rng.gen_range(-2..=2)).collect();
            let c = NovikovElement::monomial(
                q(
                    rng.gen_range(1..=6) * if rng.gen() { 1 } else { -1 },
                    rng.gen_range(1..=3),
                ),
                random_q(rng, 0, 8),
            );
            (alpha, c)
        })
        .collect();
    GroupSeries::from_terms(rank, terms, Extended::Finite(qi(5)))
}

fn vanishing_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut n = 0;
    while n < 100 {
        let f = random_series(&mut rng);
        if f.is_zero() {
            continue;
        }
        let min = f.terms().map(|(_, c)| c.valuation()).min().unwrap();
        let rep = vanishing_analysis(&f);
        ensure!(!rep.is_zero, "series {n} reported zero: {f}");
        let w = rep
            .witness
            .clone()
            .ok_or_else(|| format!("series {n} has no witness: {f}"))?;
        ensure!(
            w.iter().all(|y| !y.is_zero()),
            "series {n}: witness off the unit torus"
        );
        let value = evaluate(&f, &TorusPoint::residues(&w).unwrap()).unwrap();
        ensure!(
            value.valuation() == min,
            "series {n}: f(y) has valuation {}, want {min}",
            value.valuation()
        );
        ensure!(
            rep.witness_valuation == Some(min.clone()) && rep.min_valuation == min,
            "series {n}: reported valuations"
        );
        n += 1;
    }
    for rank in 1..=3 {
        let rep = vanishing_analysis(&GroupSeries::zero(rank, Extended::Finite(qi(5))));
        ensure!(
            rep.is_zero && rep.witness.is_none(),
            "zero series of rank {rank} not certified"
        );
    }
    Ok("100 series and the zero series".into())
}

// 10. Gauge robustness

fn gauge_robustness_suite() -> Outcome {
    let mut n = 0;
    for name in FIXTURE_NAMES {
        let fix = fixture_by_name(name, &opts()).unwrap();
        for seed in 10..12 {
            let p = transported_pair(&fix, seed);
            let a = is_properly_unobstructed(&p.m).unwrap().unobstructed;
            let b = is_properly_unobstructed(&p.m_prime).unwrap().unobstructed;
            ensure!(a == b, "{name} seed {seed}: verdicts {a} and {b}");
            n += 1;
        }
    }
    Ok(format!("{n} pairs"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("Novikov laws", novikov_laws),
        ("A∞ and UD axioms", ainfty_ud_suite),
        ("homological perturbation", hpt_suite),
        ("operator integral", integral_suite),
        ("wall-crossing", wall_crossing_suite),
        ("composition laws", composition_suite),
        ("canceling trick", canceling_suite),
        ("Fukaya trick", fukaya_suite),
        ("vanishing", vanishing_suite),
        ("gauge robustness", gauge_robustness_suite),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let results: Vec<(Outcome, u128)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
                        let msg = e
                            .downcast_ref::<String>()
                            .cloned()
                            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                        Err(format!("panicked: {}", msg.unwrap_or_default()))
                    });
                    (r, t.elapsed().as_millis())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (r, ms))) in criteria.iter().zip(&results).enumerate() {
        match r {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}; {ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why} ({ms} ms)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
