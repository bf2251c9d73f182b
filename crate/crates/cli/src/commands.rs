use std::fmt;

use floerkit::algebra::{
    ainfty_defect, check_ud_axioms, hom_defect, OpKind, OperatorSystem, UdReport,
};
use floerkit::fixtures::{self, Fixture, FixtureOptions, FIXTURE_NAMES};
use floerkit::fukaya::{continuation_march, FukayaError, IsotopyShift, PathPlan};
use floerkit::hpt::{family_minimal_model, minimal_model_limited, FamilyContraction};
use floerkit::isotopy::{check_pseudo_isotopy, PseudoIsotopy};
use floerkit::novikov::{fmt_q, q, Q};
use floerkit::obstruction::{is_properly_unobstructed, PotentialData};
use floerkit::specfile::{IsotopyTable, SpecDocument, SpecError};
use floerkit::transitions::wall_crossing_check;

use crate::report::ResultsDocument;

/// Input problems: exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<SpecError> for InputError {
    fn from(e: SpecError) -> Self {
        InputError(e.to_string())
    }
}

fn input<E: fmt::Display>(e: E) -> InputError {
    InputError(e.to_string())
}

fn ud_checks(out: &mut ResultsDocument, prefix: &str, rep: &UdReport) {
    for c in &rep.checks {
        let detail = match &c.location {
            Some(l) => format!("at {l} {}", c.detail),
            None => c.detail.clone(),
        };
        out.check(
            format!("{prefix}.{}", c.axiom.name()),
            c.passed,
            detail.trim().to_string(),
        );
    }
}

fn first_defect(t: &OperatorSystem) -> String {
    match t.lowest_nonzero() {
        None => String::new(),
        Some(((k, b), tuple, _)) => format!("first nonzero at k={k} beta={b} in={tuple:?}"),
    }
}

fn failure_detail(passed: bool, rep: &impl fmt::Display) -> String {
    if passed {
        String::new()
    } else {
        rep.to_string()
    }
}

fn pick(
    doc: &SpecDocument,
    requested: Option<&str>,
    kind: OpKind,
    nth: usize,
) -> Result<String, InputError> {
    if let Some(name) = requested {
        return Ok(name.to_string());
    }
    let names = doc.names_of_kind(kind);
    names
        .get(nth)
        .or(names.last())
        .cloned()
        .ok_or_else(|| InputError(format!("the spec has no {} table", kind.name())))
}

pub fn check(doc: &SpecDocument, out: &mut ResultsDocument) -> Result<(), InputError> {
    for t in &doc.operators {
        let op = doc.operator(&t.name)?;
        match t.kind {
            OpKind::Algebra => {
                let d = ainfty_defect(&op).map_err(input)?;
                out.check(format!("{}.ainfty", t.name), d.is_zero(), first_defect(&d));
                ud_checks(out, &t.name, &check_ud_axioms(&op));
            }
            OpKind::Homomorphism => ud_checks(out, &t.name, &check_ud_axioms(&op)),
            _ => {}
        }
    }
    for iso in &doc.isotopies {
        let p = doc.isotopy(&iso.name)?;
        let rep = check_pseudo_isotopy(&p).map_err(input)?;
        out.check(
            format!("{}.pseudo-isotopy", iso.name),
            rep.passed(),
            failure_detail(rep.passed(), &rep),
        );
    }
    if out.checks.is_empty() {
        return Err(InputError("nothing to check".into()));
    }
    Ok(())
}

pub fn minimize(
    doc: &SpecDocument,
    algebra: Option<&str>,
    isotopy: Option<&str>,
    out: &mut ResultsDocument,
) -> Result<(), InputError> {
    let (g, k) = doc.contraction()?;
    let table = doc.contraction.as_ref().expect("contraction parsed");
    let name = match algebra {
        Some(n) => n.to_string(),
        None => doc
            .operators
            .iter()
            .find(|t| t.kind == OpKind::Algebra && t.source == table.c)
            .map(|t| t.name.clone())
            .ok_or_else(|| InputError(format!("no algebra table on `{}`", table.c)))?,
    };
    let m = doc.operator(&name)?;
    let (mm, inc) = minimal_model_limited(&m, &g, doc.context.limit).map_err(input)?;
    let d = ainfty_defect(&mm).map_err(input)?;
    out.check("minimal.ainfty", d.is_zero(), first_defect(&d));
    let h = hom_defect(&inc, &mm, &m).map_err(input)?;
    out.check("inclusion.homomorphism", h.is_zero(), first_defect(&h));
    out.fact("minimal.entries", mm.num_entries());
    let mut emitted = SpecDocument::with_labels(&mm.labels, &mm.trunc);
    emitted.add_operator("m", &mm, &table.h, &table.h);
    emitted.add_operator("i", &inc, &table.h, &table.c);
    if let Some(iso_name) = isotopy {
        let iso = doc.isotopy(iso_name)?;
        let fam = match &k {
            Some(k) => {
                FamilyContraction::linear_deformation(&g, &m.linear_part(), k).map_err(input)?
            }
            None => FamilyContraction::constant(&g),
        };
        let fm = family_minimal_model(&iso, &fam).map_err(input)?;
        let rep = check_pseudo_isotopy(&fm.m).map_err(input)?;
        out.check(
            "family.pseudo-isotopy",
            rep.passed(),
            failure_detail(rep.passed(), &rep),
        );
        emitted.add_operator("ms", &fm.m.m, &table.h, &table.h);
        emitted.add_operator("cs", &fm.m.c, &table.h, &table.h);
        emitted.isotopies.push(IsotopyTable {
            name: "M".into(),
            algebra: "ms".into(),
            part: "cs".into(),
        });
    }
    out.render("minimal model", emitted.render());
    Ok(())
}

fn render_potential(out: &mut ResultsDocument, prefix: &str, p: &PotentialData) {
    out.render(format!("{prefix}W"), &p.w);
    for (i, q) in p.q.iter().enumerate() {
        out.render(format!("{prefix}Q_{}", i + 1), q);
    }
}

pub fn potential(
    doc: &SpecDocument,
    algebra: Option<&str>,
    out: &mut ResultsDocument,
) -> Result<(), InputError> {
    let name = pick(doc, algebra, OpKind::Algebra, 0)?;
    let m = doc.operator(&name)?;
    let d = ainfty_defect(&m).map_err(input)?;
    out.check("ainfty", d.is_zero(), first_defect(&d));
    let rep = is_properly_unobstructed(&m).map_err(input)?;
    render_potential(out, "", &rep.potential);
    out.fact("precision", rep.potential.precision());
    out.fact("properly-unobstructed", rep.unobstructed);
    for (i, v) in &rep.witnesses {
        if let Some(w) = &v.witness {
            let y: Vec<String> = w.iter().map(fmt_q).collect();
            let val = v
                .witness_valuation
                .as_ref()
                .map_or("?".into(), |x| x.to_string());
            out.witnesses.push(format!(
                "Q_{} at y=({}) has valuation {val}",
                i + 1,
                y.join(",")
            ));
        }
    }
    Ok(())
}

pub fn wallcross(
    doc: &SpecDocument,
    map: Option<&str>,
    source: Option<&str>,
    target: Option<&str>,
    out: &mut ResultsDocument,
) -> Result<(), InputError> {
    let f = doc.operator(&pick(doc, map, OpKind::Homomorphism, 0)?)?;
    let mut m = doc.operator(&pick(doc, source, OpKind::Algebra, 0)?)?;
    let mut mp = doc.operator(&pick(doc, target, OpKind::Algebra, 1)?)?;
    let mut h = hom_defect(&f, &m, &mp).map_err(input)?;
    // With neither end named, take whichever order the map respects.
    if source.is_none() && target.is_none() && !h.is_zero() {
        let swapped = hom_defect(&f, &mp, &m).map_err(input)?;
        if swapped.is_zero() {
            std::mem::swap(&mut m, &mut mp);
            h = swapped;
        }
    }
    out.check("homomorphism", h.is_zero(), first_defect(&h));
    let pot = floerkit::obstruction::compute_potential(&m).map_err(input)?;
    let pot_p = floerkit::obstruction::compute_potential(&mp).map_err(input)?;
    let rep = wall_crossing_check(&f, &pot, &pot_p).map_err(input)?;
    out.check("wall-crossing.potential", rep.potential, "");
    for (j, ok) in rep.obstruction.iter().enumerate() {
        out.check(format!("wall-crossing.obstruction.{}", j + 1), *ok, "");
    }
    if let Some(ok) = rep.unobstructed_source_identity {
        out.check("wall-crossing.unobstructed-identity", ok, "");
    }
    render_potential(out, "source ", &pot);
    render_potential(out, "target ", &pot_p);
    Ok(())
}

pub fn continue_plan(
    doc: &SpecDocument,
    algebra: Option<&str>,
    out: &mut ResultsDocument,
) -> Result<(), InputError> {
    let Some(plan) = &doc.plan else {
        return Err(InputError("the spec has no [plan]".into()));
    };
    let m = doc.operator(&pick(doc, algebra, OpKind::Algebra, 0)?)?;
    match continuation_march(&m, plan) {
        Ok(rep) => {
            out.fact("start.unobstructed", rep.initial_unobstructed);
            out.fact("start.margin", &rep.initial_margin);
            for s in &rep.steps {
                let p = format!("step{}", s.step);
                out.check(format!("{p}.ainfty"), s.ainfty, "");
                out.check(format!("{p}.ud"), s.ud, "");
                out.check(format!("{p}.fukaya-trick"), s.fukaya.passed(), "");
                out.check(
                    format!("{p}.verdict-invariant"),
                    s.fukaya.unobstructed == s.fukaya.unobstructed_pushed,
                    "",
                );
                out.check(
                    format!("{p}.margin"),
                    s.margin_before == s.margin_after,
                    format!("{}", s.margin_after),
                );
                out.fact(format!("{p}.cutoff"), fmt_q(&s.cutoff));
                out.fact(format!("{p}.unobstructed"), s.fukaya.unobstructed_pushed);
                if let Some(sl) = &s.slack {
                    out.fact(format!("{p}.slack"), fmt_q(sl));
                }
            }
            render_potential(
                out,
                "final ",
                &floerkit::obstruction::compute_potential(&rep.final_algebra).map_err(input)?,
            );
        }
        Err(e @ FukayaError::StepInadmissible { .. }) => {
            out.check("admissibility", false, e.to_string())
        }
        Err(e) => return Err(input(e)),
    }
    Ok(())
}

/// Names accepted by the `fixtures` command.
pub fn fixture_names() -> Vec<&'static str> {
    let mut v: Vec<&str> = FIXTURE_NAMES.to_vec();
    v.extend(["heisenberg", "acyclic-extension"]);
    v
}

fn default_plan(fix: &Fixture) -> PathPlan {
    let step =
        |a: Q, b: Q| IsotopyShift::new(vec![a, b], fix.isoperimetric.clone(), fix.lengths.clone());
    PathPlan {
        delta: fix.delta.clone(),
        steps: vec![
            step(q(1, 8), q(0, 1)),
            step(q(0, 1), q(1, 8)),
            step(q(-1, 8), q(-1, 8)),
        ],
    }
}

/// A spec for a built-in model. With `pair`, also a gauge `u: m′ → m` drawn
/// from `seed` and the transported structure `m′`.
pub fn fixture_doc(
    name: &str,
    opts: &FixtureOptions,
    pair: bool,
    seed: u64,
) -> Result<SpecDocument, InputError> {
    let chain = match name {
        "heisenberg" => Some(fixtures::heisenberg(opts)),
        "acyclic-extension" => Some(fixtures::acyclic_extension(&fixtures::maslov0_obstructed(
            opts,
        ))),
        _ => None,
    };
    if let Some(cm) = chain {
        let mut doc = SpecDocument::with_labels(&cm.m.labels, &cm.m.trunc);
        doc.add_operator("mc", &cm.m, "C", "C");
        doc.add_contraction(&cm.contraction, "H", "C", cm.deformation.as_ref());
        let iso = PseudoIsotopy::trivial(&cm.m);
        doc.add_operator("cs", &iso.c, "C", "C");
        doc.isotopies.push(IsotopyTable {
            name: "M".into(),
            algebra: "mc".into(),
            part: "cs".into(),
        });
        return Ok(doc);
    }
    let fix = fixtures::fixture_by_name(name, opts).ok_or_else(|| {
        InputError(format!(
            "unknown fixture `{name}`; known: {}",
            fixture_names().join(", ")
        ))
    })?;
    let mut doc = SpecDocument::with_labels(&fix.m.labels, &fix.m.trunc);
    doc.add_operator("m", &fix.m, "H", "H");
    if pair {
        let tp = fixtures::transported_pair(&fix, seed);
        doc.context.seed = Some(seed);
        doc.add_operator("m_prime", &tp.m_prime, "H", "H");
        doc.add_operator("u", &tp.u, "H", "H");
    }
    doc.plan = Some(default_plan(&fix));
    Ok(doc)
}
