//! Superpotential, obstruction series and Maurer–Cartan point checks.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraError, OperatorSystem};
use crate::group_series::{
    evaluate, vanishing_analysis, GroupSeries, SeriesError, TorusPoint, VanishingReport,
};
use crate::labels::LabelError;
use crate::novikov::{Extended, NovikovElement, Q};
use crate::poly::Poly;

#[derive(Debug, Error)]
pub enum ObstructionError {
    #[error("degree violation: {0}")]
    DegreeViolation(String),
    #[error("the algebra is not minimal: m_(1,0) is nonzero")]
    NotMinimal,
    #[error("coefficients depend on the family parameter")]
    NonConstant,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `Σ_β T^{E(β)} Y^{∂β} t_{k,β}(x)` split by output basis index, for a fixed
/// input tuple `x` of length `k`. Classes with `β = 0` are skipped unless
/// `include_zero`; `coef` turns a polynomial coefficient into a rational.
pub fn label_series(
    t: &OperatorSystem,
    input: &[usize],
    include_zero: bool,
    precision: &Extended,
    coef: impl Fn(&Poly) -> Option<Q>,
) -> Result<BTreeMap<usize, GroupSeries>, ObstructionError> {
    let rank = t.labels.lattice_rank();
    let k = input.len();
    let mut out: BTreeMap<usize, GroupSeries> = BTreeMap::new();
    for ((ck, beta), cell) in t.cells() {
        if *ck != k || (beta.is_zero() && !include_zero) {
            continue;
        }
        let Some(v) = cell.get(input) else { continue };
        let energy = t.labels.energy_of(beta);
        let alpha = t.labels.boundary_of(beta);
        for (idx, c) in v {
            let c = coef(c).ok_or(ObstructionError::NonConstant)?;
            let term = NovikovElement::monomial(c, energy.clone());
            out.entry(*idx)
                .or_insert_with(|| GroupSeries::zero(rank, precision.clone()))
                .add_term(alpha.clone(), &term);
        }
    }
    out.retain(|_, s| !s.is_zero());
    Ok(out)
}

/// `W` and the obstruction series `Q_1, …, Q_ℓ` of a minimal algebra.
#[derive(Clone, Debug)]
pub struct PotentialData {
    pub w: GroupSeries,
    pub q: Vec<GroupSeries>,
    /// `m_{1,0} = 0` was checked when the data was assembled.
    pub minimal: bool,
    pub unit: usize,
    pub h2_basis: Vec<usize>,
}

impl PotentialData {
    pub fn precision(&self) -> &Extended {
        self.w.precision()
    }

    pub fn ideal(&self) -> ObstructionIdeal {
        ObstructionIdeal {
            generators: self.q.clone(),
        }
    }

    /// `W·𝟙 + Σ Q_i·Θ_i` as a vector of series indexed by basis element.
    pub fn recombine(&self) -> BTreeMap<usize, GroupSeries> {
        let mut out = BTreeMap::new();
        if !self.w.is_zero() {
            out.insert(self.unit, self.w.clone());
        }
        for (qi, &idx) in self.q.iter().zip(&self.h2_basis) {
            if !qi.is_zero() {
                out.insert(idx, qi.clone());
            }
        }
        out
    }
}

impl fmt::Display for PotentialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "W = {}", self.w)?;
        for (i, q) in self.q.iter().enumerate() {
            writeln!(f, "Q_{} = {}", i + 1, q)?;
        }
        Ok(())
    }
}

/// The ideal generated by the obstruction series.
#[derive(Clone, Debug)]
pub struct ObstructionIdeal {
    pub generators: Vec<GroupSeries>,
}

impl ObstructionIdeal {
    pub fn is_vanishing(&self) -> bool {
        self.generators.iter().all(|g| g.is_zero())
    }
}

/// A candidate weak bounding cochain: a torus point and the expected value of `W`.
#[derive(Clone, Debug)]
pub struct MCWitness {
    pub y: TorusPoint,
    pub w: NovikovElement,
}

pub fn compute_potential(m: &OperatorSystem) -> Result<PotentialData, ObstructionError> {
    if m.cell(1, &m.labels.zero()).is_some() {
        return Err(ObstructionError::NotMinimal);
    }
    let space = &m.source;
    let unit = space
        .unit
        .ok_or_else(|| ObstructionError::DegreeViolation("the space has no unit".into()))?;
    let precision = m.trunc.series_precision(&m.labels, 0)?;
    let mut comps = label_series(m, &[], false, &precision, |p| p.as_constant())?;
    let rank = m.labels.lattice_rank();
    let w = comps
        .remove(&unit)
        .unwrap_or_else(|| GroupSeries::zero(rank, precision.clone()));
    let q: Vec<GroupSeries> = space
        .h2_basis
        .iter()
        .map(|i| {
            comps
                .remove(i)
                .unwrap_or_else(|| GroupSeries::zero(rank, precision.clone()))
        })
        .collect();
    if let Some((idx, _)) = comps.into_iter().next() {
        return Err(ObstructionError::DegreeViolation(format!(
            "m_(0,β) has a component along {} outside H^0 ⊕ H^2",
            space.names[idx]
        )));
    }
    Ok(PotentialData {
        w,
        q,
        minimal: true,
        unit,
        h2_basis: space.h2_basis.clone(),
    })
}

#[derive(Clone, Debug)]
pub struct UnobstructednessReport {
    pub unobstructed: bool,
    pub potential: PotentialData,
    /// Vanishing analysis of each nonzero `Q_i`.
    pub witnesses: Vec<(usize, VanishingReport)>,
}

pub fn is_properly_unobstructed(
    m: &OperatorSystem,
) -> Result<UnobstructednessReport, ObstructionError> {
    let potential = compute_potential(m)?;
    let witnesses: Vec<(usize, VanishingReport)> = potential
        .q
        .iter()
        .enumerate()
        .filter(|(_, q)| !q.is_zero())
        .map(|(i, q)| (i, vanishing_analysis(q)))
        .collect();
    Ok(UnobstructednessReport {
        unobstructed: witnesses.is_empty(),
        potential,
        witnesses,
    })
}

#[derive(Clone, Debug)]
pub struct McReport {
    pub q_values: Vec<NovikovElement>,
    pub w_value: NovikovElement,
    pub q_vanish: Vec<bool>,
    pub w_matches: bool,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.w_matches && self.q_vanish.iter().all(|b| *b)
    }
}

pub fn verify_mc_point(m: &OperatorSystem, p: &MCWitness) -> Result<McReport, ObstructionError> {
    let pot = compute_potential(m)?;
    let q_values = pot
        .q
        .iter()
        .map(|q| evaluate(q, &p.y))
        .collect::<Result<Vec<_>, _>>()?;
    let w_value = evaluate(&pot.w, &p.y)?;
    let q_vanish = q_values.iter().map(|v| v.is_zero()).collect();
    let w_matches = w_value.eq_up_to_precision(&p.w);
    Ok(McReport {
        q_values,
        w_value,
        q_vanish,
        w_matches,
    })
}
