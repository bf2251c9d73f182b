//! Transitioning phases, the induced substitutions, wall-crossing and the
//! canceling trick.

use std::collections::BTreeMap;

use crate::algebra::{diamond, GradedSpace, LinMap, OperatorSystem};
use crate::group_series::{gs_exp, GroupSeries};
use crate::isotopy::UdHomotopy;
use crate::novikov::{Extended, NovikovElement, Q};
use crate::obstruction::{label_series, ObstructionError, PotentialData};
use crate::poly::Poly;

/// A vector of series indexed by basis element.
pub type SeriesVec = BTreeMap<usize, GroupSeries>;

/// `P_f` and the substitution `φ_f`.
#[derive(Clone, Debug)]
pub struct TransitionData {
    /// `⟨e_j, P_f⟩` for each lattice basis vector.
    pub p: Vec<GroupSeries>,
    /// `P_f` itself, a series in `H^1` of the target.
    pub p_vec: SeriesVec,
    /// `φ_f(Y^{e_j})` and `φ_f(Y^{−e_j})`.
    pub phi_pos: Vec<GroupSeries>,
    pub phi_neg: Vec<GroupSeries>,
    pub precision: Extended,
}

impl TransitionData {
    /// `φ_f` applied to a series.
    pub fn phi(&self, s: &GroupSeries) -> GroupSeries {
        s.substitute(&self.phi_pos, &self.phi_neg)
    }

    pub fn phi_vec(&self, v: &SeriesVec) -> SeriesVec {
        v.iter().map(|(i, s)| (*i, self.phi(s))).collect()
    }

    /// `φ_f(Y^α) = Y^α · exp⟨α, P_f⟩`, evaluated directly.
    pub fn phi_monomial(&self, alpha: &[i64]) -> Result<GroupSeries, ObstructionError> {
        let rank = alpha.len();
        let mut pairing = GroupSeries::zero(rank, self.precision.clone());
        for (j, &a) in alpha.iter().enumerate() {
            pairing = pairing.add(&self.p[j].scale_q(&Q::from_integer(a.into())));
        }
        let e = gs_exp(&pairing).map_err(crate::group_series::SeriesError::from)?;
        Ok(GroupSeries::y(alpha.to_vec()).mul(&e))
    }
}

/// Pairings `⟨e_j, v⟩` of an `H^1`-valued series with the lattice basis.
pub fn pairings(
    space: &GradedSpace,
    v: &SeriesVec,
    rank: usize,
    precision: &Extended,
) -> Vec<GroupSeries> {
    (0..rank)
        .map(|j| {
            let mut acc = GroupSeries::zero(rank, precision.clone());
            for (c, idx) in space.h1_basis.iter().enumerate() {
                if let Some(s) = v.get(idx) {
                    let w = &space.pairing[j][c];
                    if !num::Zero::is_zero(w) {
                        acc = acc.add(&s.scale_q(w));
                    }
                }
            }
            acc
        })
        .collect()
}

fn ensure_h1(space: &GradedSpace, v: &SeriesVec, what: &str) -> Result<(), ObstructionError> {
    for idx in v.keys() {
        if !space.h1_basis.contains(idx) {
            return Err(ObstructionError::DegreeViolation(format!(
                "{what} has a component along {} outside H^1",
                space.names[*idx]
            )));
        }
    }
    Ok(())
}

pub fn transitioning_phase(f: &OperatorSystem) -> Result<TransitionData, ObstructionError> {
    let precision = f.trunc.series_precision(&f.labels, 0)?;
    let p_vec = label_series(f, &[], false, &precision, |p| p.as_constant())?;
    ensure_h1(&f.target, &p_vec, "f_(0,β)")?;
    let rank = f.labels.lattice_rank();
    let p = pairings(&f.target, &p_vec, rank, &precision);
    let mut phi_pos = Vec::with_capacity(rank);
    let mut phi_neg = Vec::with_capacity(rank);
    for (j, pj) in p.iter().enumerate() {
        let mut e = vec![0i64; rank];
        e[j] = 1;
        let ep = gs_exp(pj).map_err(crate::group_series::SeriesError::from)?;
        let en = gs_exp(&pj.neg()).map_err(crate::group_series::SeriesError::from)?;
        phi_pos.push(GroupSeries::y(e.clone()).mul(&ep));
        e[j] = -1;
        phi_neg.push(GroupSeries::y(e).mul(&en));
    }
    Ok(TransitionData {
        p,
        p_vec,
        phi_pos,
        phi_neg,
        precision,
    })
}

fn vec_eq(a: &SeriesVec, b: &SeriesVec) -> bool {
    let keys: std::collections::BTreeSet<&usize> = a.keys().chain(b.keys()).collect();
    keys.into_iter().all(|k| match (a.get(k), b.get(k)) {
        (Some(x), Some(y)) => x.eq_up_to_precision(y),
        (Some(x), None) | (None, Some(x)) => x.is_zero(),
        (None, None) => true,
    })
}

fn vec_add(a: &SeriesVec, b: &SeriesVec) -> SeriesVec {
    let mut out = a.clone();
    for (k, s) in b {
        let v = match out.remove(k) {
            Some(x) => x.add(s),
            None => s.clone(),
        };
        out.insert(*k, v);
    }
    out
}

/// A constant linear map applied to a vector of series.
fn apply_linear(l: &LinMap, v: &SeriesVec) -> SeriesVec {
    let mut out = SeriesVec::new();
    for (c, s) in v {
        for (r, p) in &l.cols[*c] {
            let coef = p.as_constant().expect("constant linear part");
            let term = s.scale_q(&coef);
            let v = match out.remove(r) {
                Some(x) => x.add(&term),
                None => term,
            };
            out.insert(*r, v);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct ComposeReport {
    /// `P_{f⋄g} = f_{1,0}(P_g) + φ_g(P_f)`.
    pub lemma: bool,
    /// `φ_{f⋄g} = φ_g ∘ φ_f` on lattice monomials; `None` unless `f_{1,0} = id`.
    pub corollary: Option<bool>,
}

impl ComposeReport {
    pub fn passed(&self) -> bool {
        self.lemma && self.corollary != Some(false)
    }
}

/// Checks the composition laws for `g: m″ → m` and `f: m → m′`.
pub fn compose_phase_check(
    f: &OperatorSystem,
    g: &OperatorSystem,
) -> Result<ComposeReport, ObstructionError> {
    let fg = diamond(f, g)?;
    let tf = transitioning_phase(f)?;
    let tg = transitioning_phase(g)?;
    let tfg = transitioning_phase(&fg)?;
    let rhs = vec_add(
        &apply_linear(&f.linear_part(), &tg.p_vec),
        &tg.phi_vec(&tf.p_vec),
    );
    let lemma = vec_eq(&tfg.p_vec, &rhs);
    let lin = f.linear_part();
    let is_id = lin.rows == lin.ncols() && lin.sub(&LinMap::identity(lin.rows)).is_zero();
    let corollary = is_id.then(|| {
        tfg.phi_pos
            .iter()
            .zip(&tf.phi_pos)
            .all(|(a, b)| a.eq_up_to_precision(&tg.phi(b)))
            && tfg
                .phi_neg
                .iter()
                .zip(&tf.phi_neg)
                .all(|(a, b)| a.eq_up_to_precision(&tg.phi(b)))
    });
    Ok(ComposeReport { lemma, corollary })
}

/// `R^k = Σ_β T^{E(β)} Y^{∂β} f_{1,β}(Θ_k)` split into its `H^0` and `H^2` parts.
#[derive(Clone, Debug)]
pub struct RSeries {
    pub r_bar: Vec<GroupSeries>,
    /// `r[k][j] = R^k_j`.
    pub r: Vec<Vec<GroupSeries>>,
}

pub fn r_series(f: &OperatorSystem) -> Result<RSeries, ObstructionError> {
    let precision = f.trunc.series_precision(&f.labels, 1)?;
    r_series_with(f, &precision, |p| p.as_constant())
}

fn r_series_with(
    f: &OperatorSystem,
    precision: &Extended,
    coef: impl Fn(&Poly) -> Option<Q> + Copy,
) -> Result<RSeries, ObstructionError> {
    let rank = f.labels.lattice_rank();
    let zero = || GroupSeries::zero(rank, precision.clone());
    let unit = f
        .target
        .unit
        .ok_or_else(|| ObstructionError::DegreeViolation("target has no unit".into()))?;
    let mut r_bar = vec![];
    let mut r = vec![];
    for &theta in &f.source.h2_basis {
        let mut comps = label_series(f, &[theta], true, precision, coef)?;
        r_bar.push(comps.remove(&unit).unwrap_or_else(zero));
        r.push(
            f.target
                .h2_basis
                .iter()
                .map(|j| comps.remove(j).unwrap_or_else(zero))
                .collect(),
        );
        if let Some(idx) = comps.keys().next() {
            return Err(ObstructionError::DegreeViolation(format!(
                "f_(1,β)(Θ) has a component along {} outside H^0 ⊕ H^2",
                f.target.names[*idx]
            )));
        }
    }
    Ok(RSeries { r_bar, r })
}

#[derive(Clone, Debug)]
pub struct WallCrossingReport {
    /// `φ(W′) = W + Σ_k Q_k R̲^k`.
    pub potential: bool,
    /// `φ(Q′_j) = Σ_k Q_k R^k_j`, one flag per `j`.
    pub obstruction: Vec<bool>,
    /// `φ(W′) − W` written over the `Q_k` with cofactors `R̲^k`.
    pub cofactors: RSeries,
    /// When the source is properly unobstructed, `φ(W′) = W` exactly.
    pub unobstructed_source_identity: Option<bool>,
}

impl WallCrossingReport {
    pub fn passed(&self) -> bool {
        self.potential
            && self.obstruction.iter().all(|b| *b)
            && self.unobstructed_source_identity != Some(false)
    }
}

/// Wall-crossing for `f: m → m′` with `pot = pot(m)` and `pot_prime = pot(m′)`.
pub fn wall_crossing_check(
    f: &OperatorSystem,
    pot: &PotentialData,
    pot_prime: &PotentialData,
) -> Result<WallCrossingReport, ObstructionError> {
    let t = transitioning_phase(f)?;
    let rs = r_series(f)?;
    let phi_w = t.phi(&pot_prime.w);
    let mut rhs = pot.w.clone();
    for (qk, rb) in pot.q.iter().zip(&rs.r_bar) {
        rhs = rhs.add(&qk.mul(rb));
    }
    let potential = phi_w.eq_up_to_precision(&rhs);
    let mut obstruction = vec![];
    for (j, qj) in pot_prime.q.iter().enumerate() {
        let lhs = t.phi(qj);
        let mut rhs = GroupSeries::zero(qj.rank(), lhs.precision().clone());
        for (qk, rk) in pot.q.iter().zip(&rs.r) {
            rhs = rhs.add(&qk.mul(&rk[j]));
        }
        obstruction.push(lhs.eq_up_to_precision(&rhs));
    }
    let unobstructed_source_identity = pot
        .q
        .iter()
        .all(|q| q.is_zero())
        .then(|| phi_w.eq_up_to_precision(&pot.w));
    Ok(WallCrossingReport {
        potential,
        obstruction,
        cofactors: rs,
        unobstructed_source_identity,
    })
}

#[derive(Clone, Debug)]
pub struct CancelingReport {
    /// `P_{f_1} − P_{f_0} = Σ_j Q_j ∫_0^1 R^j_{h_s} ds`.
    pub identity: bool,
    /// `φ_{f_0}(Y^α) − φ_{f_1}(Y^α) = Σ_j Q_j · cofactor_j` for each tested `α`.
    pub corollary: Vec<(Vec<i64>, bool)>,
    pub difference: SeriesVec,
    pub cofactors: Vec<Vec<GroupSeries>>,
}

impl CancelingReport {
    pub fn passed(&self) -> bool {
        self.identity && self.corollary.iter().all(|(_, b)| *b)
    }
}

/// The canceling trick for a ud-homotopy `f_0 ∼ f_1` out of the algebra whose
/// potential is `pot`. The corollary is tested on `±e_j` and `e_1 + ⋯ + e_m`.
pub fn canceling_check(
    hh: &UdHomotopy,
    pot: &PotentialData,
) -> Result<CancelingReport, ObstructionError> {
    let zero_q = Q::from_integer(0.into());
    let one_q = Q::from_integer(1.into());
    let f0 = hh.f.eval_at(&zero_q);
    let f1 = hh.f.eval_at(&one_q);
    let t0 = transitioning_phase(&f0)?;
    let t1 = transitioning_phase(&f1)?;
    let rank = hh.f.labels.lattice_rank();
    let mut difference = t1.p_vec.clone();
    for (k, s) in &t0.p_vec {
        let v = match difference.remove(k) {
            Some(x) => x.sub(s),
            None => s.neg(),
        };
        difference.insert(*k, v);
    }
    let prec = hh.h.trunc.series_precision(&hh.h.labels, 1)?;
    let mut integrated: Vec<SeriesVec> = vec![];
    for &theta in &hh.h.source.h2_basis {
        let comps = label_series(&hh.h, &[theta], true, &prec, |p| {
            Some(p.definite_integral(&zero_q, &one_q))
        })?;
        ensure_h1(&hh.h.target, &comps, "h_(1,β)(Θ)")?;
        integrated.push(comps);
    }
    let mut rhs = SeriesVec::new();
    for (qj, rj) in pot.q.iter().zip(&integrated) {
        let term: SeriesVec = rj.iter().map(|(i, s)| (*i, qj.mul(s))).collect();
        rhs = vec_add(&rhs, &term);
    }
    let identity = vec_eq(&difference, &rhs);

    // 1 − exp(D) = −D · Σ_{n≥1} D^{n−1}/n! with D = Σ_j Q_j c_j.
    let mut tests: Vec<Vec<i64>> = vec![];
    for j in 0..rank {
        let mut e = vec![0; rank];
        e[j] = 1;
        tests.push(e.clone());
        e[j] = -1;
        tests.push(e);
    }
    if rank > 1 {
        tests.push(vec![1; rank]);
    }
    let target = &hh.f.target;
    let int_pairs: Vec<Vec<GroupSeries>> = integrated
        .iter()
        .map(|v| pairings(target, v, rank, &prec))
        .collect();
    let mut corollary = vec![];
    let mut cofactors = vec![];
    for alpha in tests {
        let lhs = t0.phi_monomial(&alpha)?.sub(&t1.phi_monomial(&alpha)?);
        let c: Vec<GroupSeries> = int_pairs
            .iter()
            .map(|ps| {
                let mut acc = GroupSeries::zero(rank, prec.clone());
                for (a, p) in alpha.iter().zip(ps) {
                    acc = acc.add(&p.scale_q(&Q::from_integer((*a).into())));
                }
                acc
            })
            .collect();
        let mut d = GroupSeries::zero(rank, prec.clone().min(pot.precision().clone()));
        for (qj, cj) in pot.q.iter().zip(&c) {
            d = d.add(&qj.mul(cj));
        }
        let e = exp_quotient(&d);
        let base = t0.phi_monomial(&alpha)?.mul(&e).neg();
        let cof: Vec<GroupSeries> = c.iter().map(|cj| base.mul(cj)).collect();
        let mut rhs = GroupSeries::zero(rank, lhs.precision().clone());
        for (qj, cf) in pot.q.iter().zip(&cof) {
            rhs = rhs.add(&qj.mul(cf));
        }
        corollary.push((alpha, lhs.eq_up_to_precision(&rhs)));
        cofactors.push(cof);
    }
    Ok(CancelingReport {
        identity,
        corollary,
        difference,
        cofactors,
    })
}

/// `Σ_{n≥1} D^{n−1}/n!` for `D` of positive valuation.
fn exp_quotient(d: &GroupSeries) -> GroupSeries {
    let rank = d.rank();
    let mut acc = GroupSeries::one(rank, d.precision().clone());
    let mut term = GroupSeries::one(rank, Extended::Infinity);
    for n in 2..10_000i64 {
        term = term
            .mul(d)
            .scale(&NovikovElement::constant(Q::new(1.into(), n.into())))
            .with_precision(d.precision().clone());
        if term.is_zero() {
            return acc;
        }
        acc = acc.add(&term);
    }
    acc
}
