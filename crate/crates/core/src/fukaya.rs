//! Fukaya's trick: pushing an algebra forward along a small isotopy, parallel
//! translation of series, and marching along a path of such isotopies.

use std::fmt;
use std::sync::Arc;

use num::{Signed, Zero};
use thiserror::Error;

use crate::algebra::{ainfty_defect, check_ud_axioms, AlgebraError, OperatorSystem, Truncation};
use crate::group_series::{convergence_margin, pair, GroupSeries, Polyhedron};
use crate::labels::{LabelClass, LabelError, LabelGroup};
use crate::novikov::{fmt_q, Extended, Q};
use crate::obstruction::{compute_potential, ObstructionError, PotentialData};

#[derive(Debug, Error)]
pub enum FukayaError {
    #[error("shift drives the energy of {0} to {1}, which is not positive")]
    NegativeEnergy(String, String),
    #[error("step {step} is inadmissible for class {beta}")]
    StepInadmissible { step: usize, beta: String },
    #[error("shift has {0} components but the boundary lattice has rank {1}")]
    RankMismatch(usize, usize),
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Label(#[from] LabelError),
}

/// The cohomology class `[ξ]` of a small isotopy with the declared reverse
/// isoperimetric constant and boundary lengths of the label generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotopyShift {
    pub xi: Vec<Q>,
    pub c: Q,
    /// `ℓ(∂g)` per label generator, extended additively to classes.
    pub lengths: Vec<Q>,
}

impl IsotopyShift {
    pub fn new(xi: Vec<Q>, c: Q, lengths: Vec<Q>) -> Self {
        IsotopyShift { xi, c, lengths }
    }

    pub fn length_of(&self, beta: &LabelClass) -> Q {
        beta.0
            .iter()
            .zip(&self.lengths)
            .map(|(n, l)| l * Q::from_integer((*n as i64).into()))
            .sum()
    }

    /// `(c/2)·ℓ(∂β) − |⟨∂β, ξ⟩|`.
    pub fn slack(&self, labels: &LabelGroup, beta: &LabelClass) -> Q {
        let shift = pair(&labels.boundary_of(beta), &self.xi);
        &self.c / Q::from_integer(2.into()) * self.length_of(beta) - shift.abs()
    }

    /// The smallest slack over the nonzero classes `m` uses, with the class
    /// attaining it.
    pub fn admissibility(&self, m: &OperatorSystem) -> Option<(Q, LabelClass)> {
        m.support_labels()
            .into_iter()
            .filter(|b| !b.is_zero())
            .map(|b| (self.slack(&m.labels, &b), b))
            .min_by(|a, b| a.0.cmp(&b.0))
    }

    pub fn is_admissible(&self, m: &OperatorSystem) -> bool {
        self.admissibility(m).is_none_or(|(s, _)| !s.is_negative())
    }
}

/// Starting domain and the ordered steps of a continuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathPlan {
    pub delta: Polyhedron,
    pub steps: Vec<IsotopyShift>,
}

/// `Σ c_α Y^α ↦ Σ c_α T^{⟨α, ξ⟩} Y^α`, with the domain `Δ ↦ Δ − ξ`.
pub fn parallel_translate(
    f: &GroupSeries,
    xi: &[Q],
    delta: &Polyhedron,
) -> Result<(GroupSeries, Polyhedron), FukayaError> {
    if xi.len() != f.rank() {
        return Err(FukayaError::RankMismatch(xi.len(), f.rank()));
    }
    let out = f.translate(xi);
    for (a, c) in out.terms() {
        if let Extended::Finite(v) = c.valuation() {
            if v.is_negative() {
                return Err(FukayaError::NegativeEnergy(format!("Y^{a:?}"), fmt_q(&v)));
            }
        }
    }
    Ok((out, delta.translate(xi)))
}

/// Energies after the shift, checked positive on every generator.
fn shifted_labels(labels: &LabelGroup, xi: &[Q]) -> Result<LabelGroup, FukayaError> {
    if xi.len() != labels.lattice_rank() {
        return Err(FukayaError::RankMismatch(xi.len(), labels.lattice_rank()));
    }
    let shifted = labels.shifted_energy(xi);
    for (j, e) in shifted.energy.iter().enumerate() {
        if !e.is_positive() {
            return Err(FukayaError::NegativeEnergy(
                LabelClass::generator(labels.num_generators(), j).to_string(),
                fmt_q(e),
            ));
        }
    }
    Ok(shifted)
}

/// The largest cutoff `E′` for which every class of shifted energy `≤ E′` had
/// energy `≤ E_max` before the shift.
pub fn shifted_cutoff(
    labels: &LabelGroup,
    shifted: &LabelGroup,
    e_max: &Q,
) -> Result<Q, FukayaError> {
    let known = labels.effective_classes(e_max)?;
    let n = labels.num_generators();
    let mut first_unknown: Option<Q> = None;
    for b in &known {
        for j in 0..n {
            let next = b.add(&LabelClass::generator(n, j));
            if &labels.energy_of(&next) > e_max {
                let e = shifted.energy_of(&next);
                if first_unknown.as_ref().is_none_or(|x| &e < x) {
                    first_unknown = Some(e);
                }
            }
        }
    }
    let energies = known.iter().map(|b| shifted.energy_of(b));
    let best = match &first_unknown {
        Some(h) => energies.filter(|e| e < h).max(),
        None => energies.max(),
    };
    Ok(best.unwrap_or_else(Q::zero))
}

/// `m^F`: the same entries with energies `E(β) + ⟨∂β, ξ⟩`, re-truncated at
/// [`shifted_cutoff`].
pub fn pushforward_algebra(m: &OperatorSystem, xi: &[Q]) -> Result<OperatorSystem, FukayaError> {
    let shifted = shifted_labels(&m.labels, xi)?;
    let cutoff = shifted_cutoff(&m.labels, &shifted, m.trunc.cutoff())?;
    let trunc = Truncation::new(cutoff, m.trunc.weight_cap);
    let shifted = Arc::new(shifted);
    let mut out = OperatorSystem::new(
        m.kind,
        m.source.clone(),
        m.target.clone(),
        shifted.clone(),
        trunc.clone(),
    );
    for ((k, b), cell) in m.cells() {
        if trunc.admits(&shifted, *k, b) {
            out.set_cell(*k, b, cell.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct FukayaReport {
    pub potential: PotentialData,
    pub pushed: PotentialData,
    /// `W^F = pt(W)` at the common precision.
    pub w_matches: bool,
    /// `Q^F_i = pt(Q_i)`, one flag per `i`.
    pub q_matches: Vec<bool>,
    pub unobstructed: bool,
    pub unobstructed_pushed: bool,
}

impl FukayaReport {
    pub fn passed(&self) -> bool {
        self.w_matches
            && self.q_matches.iter().all(|b| *b)
            && self.unobstructed == self.unobstructed_pushed
    }
}

impl fmt::Display for FukayaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "W   = {}", self.potential.w)?;
        writeln!(f, "W^F = {}", self.pushed.w)?;
        for (i, (a, b)) in self.potential.q.iter().zip(&self.pushed.q).enumerate() {
            writeln!(f, "Q_{0}   = {1}\nQ^F_{0} = {2}", i + 1, a, b)?;
        }
        write!(
            f,
            "unobstructed: {} -> {}",
            self.unobstructed, self.unobstructed_pushed
        )
    }
}

pub fn check_fukaya_trick(m: &OperatorSystem, xi: &[Q]) -> Result<FukayaReport, FukayaError> {
    let potential = compute_potential(m)?;
    let mf = pushforward_algebra(m, xi)?;
    let pushed = compute_potential(&mf)?;
    let point = Polyhedron::point(vec![Q::zero(); xi.len()]);
    let (w, _) = parallel_translate(&potential.w, xi, &point)?;
    let w_matches = w.eq_up_to_precision(&pushed.w);
    let mut q_matches = vec![];
    for (q, qf) in potential.q.iter().zip(&pushed.q) {
        let (t, _) = parallel_translate(q, xi, &point)?;
        q_matches.push(t.eq_up_to_precision(qf));
    }
    let unobstructed = potential.q.iter().all(|q| q.is_zero());
    let unobstructed_pushed = pushed.q.iter().all(|q| q.is_zero());
    Ok(FukayaReport {
        potential,
        pushed,
        w_matches,
        q_matches,
        unobstructed,
        unobstructed_pushed,
    })
}

/// Smallest convergence margin of `W` and the `Q_i` over `Δ`.
pub fn potential_margin(p: &PotentialData, delta: &Polyhedron) -> Extended {
    p.q.iter().fold(convergence_margin(&p.w, delta), |acc, q| {
        acc.min(convergence_margin(q, delta))
    })
}

#[derive(Clone, Debug)]
pub struct StepReport {
    pub step: usize,
    pub xi: Vec<Q>,
    /// Least admissibility slack over the supported classes.
    pub slack: Option<Q>,
    pub cutoff: Q,
    pub ainfty: bool,
    pub ud: bool,
    pub fukaya: FukayaReport,
    pub margin_before: Extended,
    pub margin_after: Extended,
    pub delta: Polyhedron,
}

impl StepReport {
    pub fn passed(&self) -> bool {
        self.ainfty && self.ud && self.fukaya.passed() && self.margin_before == self.margin_after
    }
}

#[derive(Clone, Debug)]
pub struct MarchReport {
    pub initial_unobstructed: bool,
    pub initial_margin: Extended,
    pub steps: Vec<StepReport>,
    pub final_algebra: OperatorSystem,
}

impl MarchReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.passed())
    }

    /// The verdict after every step, starting with the initial one.
    pub fn verdicts(&self) -> Vec<bool> {
        std::iter::once(self.initial_unobstructed)
            .chain(self.steps.iter().map(|s| s.fukaya.unobstructed_pushed))
            .collect()
    }
}

impl fmt::Display for MarchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "start: unobstructed={} margin={}",
            self.initial_unobstructed, self.initial_margin
        )?;
        for s in &self.steps {
            let xi: Vec<String> = s.xi.iter().map(fmt_q).collect();
            writeln!(
                f,
                "step {}: xi=({}) slack={} cutoff={} ainfty={} ud={} trick={} unobstructed={} margin={}",
                s.step,
                xi.join(","),
                s.slack.as_ref().map_or("-".into(), fmt_q),
                fmt_q(&s.cutoff),
                s.ainfty,
                s.ud,
                s.fukaya.passed(),
                s.fukaya.unobstructed_pushed,
                s.margin_after
            )?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

pub fn continuation_march(
    m0: &OperatorSystem,
    plan: &PathPlan,
) -> Result<MarchReport, FukayaError> {
    let start = compute_potential(m0)?;
    let initial_margin = potential_margin(&start, &plan.delta);
    let initial_unobstructed = start.q.iter().all(|q| q.is_zero());
    let mut m = m0.clone();
    let mut delta = plan.delta.clone();
    let mut steps = vec![];
    for (i, shift) in plan.steps.iter().enumerate() {
        let adm = shift.admissibility(&m);
        if let Some((s, b)) = &adm {
            if s.is_negative() {
                return Err(FukayaError::StepInadmissible {
                    step: i,
                    beta: b.to_string(),
                });
            }
        }
        let fukaya = check_fukaya_trick(&m, &shift.xi)?;
        let margin_before = potential_margin(&fukaya.potential, &delta);
        let next = pushforward_algebra(&m, &shift.xi)?;
        let next_delta = delta.translate(&shift.xi);
        let mut translated = fukaya.potential.clone();
        translated.w = translated.w.translate(&shift.xi);
        translated.q = translated
            .q
            .iter()
            .map(|q| q.translate(&shift.xi))
            .collect();
        let margin_after = potential_margin(&translated, &next_delta);
        let ainfty = ainfty_defect(&next)?.is_zero();
        let ud = check_ud_axioms(&next).all_passed();
        steps.push(StepReport {
            step: i,
            xi: shift.xi.clone(),
            slack: adm.map(|(s, _)| s),
            cutoff: next.trunc.cutoff().clone(),
            ainfty,
            ud,
            fukaya,
            margin_before,
            margin_after,
            delta: next_delta.clone(),
        });
        m = next;
        delta = next_delta;
    }
    Ok(MarchReport {
        initial_unobstructed,
        initial_margin,
        steps,
        final_algebra: m,
    })
}
