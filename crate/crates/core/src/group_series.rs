//! Truncated series in the group algebra `Λ[[H_1(L)]]`, convergence margins
//! over polyhedra, evaluation at torus points and the vanishing test.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::novikov::{fmt_q, q, qi, Extended, NovikovElement, NovikovError, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series diverges at the requested point (margin {0})")]
    DivergenceError(String),
    #[error("lattice ranks differ: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("invalid torus point: {0}")]
    InvalidPoint(String),
    #[error(transparent)]
    Novikov(#[from] NovikovError),
}

pub type Exponent = Vec<i64>;

/// `Σ c_α Y^α` with Novikov coefficients, known modulo `T^precision`.
#[derive(Clone, Debug)]
pub struct GroupSeries {
    rank: usize,
    terms: BTreeMap<Exponent, NovikovElement>,
    precision: Extended,
}

fn cap(c: &NovikovElement, p: &Extended) -> NovikovElement {
    c.with_precision(p.clone())
}

impl GroupSeries {
    pub fn zero(rank: usize, precision: Extended) -> Self {
        GroupSeries {
            rank,
            terms: BTreeMap::new(),
            precision,
        }
    }

    /// The exact zero.
    pub fn exact_zero(rank: usize) -> Self {
        Self::zero(rank, Extended::Infinity)
    }

    pub fn one(rank: usize, precision: Extended) -> Self {
        Self::monomial(rank, NovikovElement::one(), vec![0; rank], precision)
    }

    pub fn monomial(rank: usize, c: NovikovElement, alpha: Exponent, precision: Extended) -> Self {
        let mut s = Self::zero(rank, precision);
        s.add_term(alpha, &c);
        s
    }

    /// `Y^α` known exactly.
    pub fn y(alpha: Exponent) -> Self {
        Self::monomial(
            alpha.len(),
            NovikovElement::one(),
            alpha,
            Extended::Infinity,
        )
    }

    pub fn from_terms(
        rank: usize,
        terms: Vec<(Exponent, NovikovElement)>,
        precision: Extended,
    ) -> Self {
        let mut s = Self::zero(rank, precision);
        for (a, c) in terms {
            s.add_term(a, &c);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn precision(&self) -> &Extended {
        &self.precision
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &NovikovElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, alpha: &[i64]) -> NovikovElement {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| NovikovElement::zero().with_precision(self.precision.clone()))
    }

    /// Adds `c Y^α` in place, respecting the global precision.
    pub fn add_term(&mut self, alpha: Exponent, c: &NovikovElement) {
        assert_eq!(alpha.len(), self.rank, "exponent rank");
        let c = cap(c, &self.precision);
        let merged = match self.terms.remove(&alpha) {
            Some(old) => old.add_ref(&c),
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(alpha, merged);
        }
    }

    pub fn with_precision(&self, p: Extended) -> Self {
        let p = self.precision.clone().min(p);
        let mut out = Self::zero(self.rank, p);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c);
        }
        out
    }

    /// `true` when every stored coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest coefficient valuation, `+∞` for zero.
    pub fn valuation(&self) -> Extended {
        self.terms
            .values()
            .map(|c| c.valuation())
            .min()
            .unwrap_or(Extended::Infinity)
    }

    /// Lower bound on the valuation of the true series.
    fn valuation_bound(&self) -> Extended {
        self.valuation().min(self.precision.clone())
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.rank, self.precision.clone());
        for (a, c) in &self.terms {
            out.add_term(a.clone(), &c.neg_ref());
        }
        out
    }

    pub fn scale(&self, c: &NovikovElement) -> Self {
        let p = self
            .precision
            .plus(&c.valuation().min(c.precision().clone()))
            .min(c.precision().plus(&self.valuation_bound()));
        let mut out = Self::zero(self.rank, p);
        for (a, x) in &self.terms {
            out.add_term(a.clone(), &x.mul_ref(c));
        }
        out
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        self.scale(&NovikovElement::constant(c.clone()))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.rank, other.rank, "lattice ranks");
        let p = self.precision.clone().min(other.precision.clone());
        let mut out = Self::zero(self.rank, p);
        for (a, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(a.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.rank, other.rank, "lattice ranks");
        let p = self
            .precision
            .plus(&other.valuation_bound())
            .min(other.precision.plus(&self.valuation_bound()));
        let mut out = Self::zero(self.rank, p);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                let e: Exponent = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, &c.mul_ref(d));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.rank, Extended::Infinity);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Equality of both series modulo the smaller precision.
    pub fn eq_up_to_precision(&self, other: &Self) -> bool {
        self.rank == other.rank && self.sub(other).is_zero()
    }

    /// Exact equality of stored data including precision.
    pub fn structurally_eq(&self, other: &Self) -> bool {
        self.precision == other.precision
            && self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((a, c), (b, d))| a == b && c.structurally_eq(d))
    }

    /// Multiplies each term `c Y^α` by `T^{⟨α, ξ⟩}`.
    pub fn translate(&self, xi: &[Q]) -> Self {
        let shifts: Vec<Q> = self.terms.keys().map(|a| pair(a, xi)).collect();
        let min_shift = shifts
            .iter()
            .cloned()
            .min()
            .unwrap_or_else(Q::zero)
            .min(Q::zero());
        let mut out = Self::zero(self.rank, self.precision.plus_q(&min_shift));
        for ((a, c), s) in self.terms.iter().zip(shifts) {
            out.add_term(a.clone(), &c.shift(&s));
        }
        out
    }

    /// Substitution `Y^{e_j} ↦ images[j]` (and `Y^{−e_j} ↦ inverse_images[j]`),
    /// extended multiplicatively.
    pub fn substitute(&self, images: &[GroupSeries], inverse_images: &[GroupSeries]) -> Self {
        let mut out = Self::zero(self.rank, self.precision.clone());
        for (a, c) in &self.terms {
            let mut term =
                Self::monomial(self.rank, c.clone(), vec![0; self.rank], Extended::Infinity);
            for (j, &n) in a.iter().enumerate() {
                let base = if n >= 0 {
                    &images[j]
                } else {
                    &inverse_images[j]
                };
                term = term.mul(&base.pow(n.unsigned_abs() as u32));
            }
            out = out.add(&term);
        }
        out
    }
}

impl PartialEq for GroupSeries {
    fn eq(&self, other: &Self) -> bool {
        self.eq_up_to_precision(other)
    }
}

impl fmt::Display for GroupSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, c)| {
                let e: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                let coef = c.with_precision(Extended::Infinity);
                let coef = NovikovElement::new(coef.terms().to_vec(), Extended::Infinity);
                format!("({coef}) * Y^({})", e.join(","))
            })
            .collect();
        if let Extended::Finite(p) = &self.precision {
            parts.push(format!("O(T^({}))", fmt_q(p)));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn pair(alpha: &[i64], gamma: &[Q]) -> Q {
    alpha.iter().zip(gamma).map(|(a, g)| g * qi(*a)).sum()
}

/// `Y^α ↦ Y^α · exp(f)` needs `exp`; this is the termwise exponential series.
pub fn gs_exp(f: &GroupSeries) -> Result<GroupSeries, NovikovError> {
    for c in f.terms.values() {
        if let Extended::Finite(v) = c.valuation() {
            if !v.is_positive() {
                return Err(NovikovError::DomainError(format!(
                    "exp needs positive valuation on every coefficient, got {}",
                    fmt_q(&v)
                )));
            }
        }
    }
    let one = GroupSeries::one(f.rank, f.precision.clone());
    if f.is_zero() {
        return Ok(one);
    }
    let v = f.valuation().finite().cloned().expect("nonzero");
    let Extended::Finite(p) = f.precision.clone() else {
        return Err(NovikovError::UnboundedSeries);
    };
    let mut acc = one;
    let mut power = GroupSeries::one(f.rank, Extended::Infinity);
    let mut n = 0i64;
    loop {
        n += 1;
        if qi(n) * &v >= p {
            break;
        }
        power = power.mul(f).scale_q(&q(1, n));
        acc = acc.add(&power);
    }
    Ok(acc.with_precision(f.precision.clone()))
}

/// Convex hull of finitely many rational points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron {
    pub vertices: Vec<Vec<Q>>,
}

impl Polyhedron {
    pub fn new(vertices: Vec<Vec<Q>>) -> Result<Self, SeriesError> {
        if vertices.is_empty() {
            return Err(SeriesError::InvalidPoint(
                "polyhedron needs a vertex".into(),
            ));
        }
        let d = vertices[0].len();
        if vertices.iter().any(|v| v.len() != d) {
            return Err(SeriesError::InvalidPoint(
                "vertices of mixed dimension".into(),
            ));
        }
        Ok(Polyhedron { vertices })
    }

    pub fn point(gamma: Vec<Q>) -> Self {
        Polyhedron {
            vertices: vec![gamma],
        }
    }

    /// The cube `[−r, r]^m`.
    pub fn cube(m: usize, r: &Q) -> Self {
        let mut vertices = Vec::new();
        for mask in 0..(1u32 << m) {
            vertices.push(
                (0..m)
                    .map(|j| {
                        if mask >> j & 1 == 1 {
                            r.clone()
                        } else {
                            -r.clone()
                        }
                    })
                    .collect(),
            );
        }
        Polyhedron { vertices }
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    /// `Δ − ξ`.
    pub fn translate(&self, xi: &[Q]) -> Self {
        Polyhedron {
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().zip(xi).map(|(a, b)| a - b).collect())
                .collect(),
        }
    }

    /// Exact membership test by a small feasibility linear program.
    pub fn contains(&self, x: &[Q]) -> bool {
        hull_contains(&self.vertices, x)
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(&vec![Q::zero(); self.dim()])
    }
}

/// Phase-one simplex for `λ ≥ 0, Σλ = 1, Σ λ_i v_i = x`.
fn hull_contains(vertices: &[Vec<Q>], x: &[Q]) -> bool {
    let n = vertices.len();
    let m = x.len() + 1;
    // Rows: coordinates then the sum constraint; columns: λ then artificials.
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(m);
    let mut rhs: Vec<Q> = Vec::with_capacity(m);
    for d in 0..x.len() {
        rows.push(vertices.iter().map(|v| v[d].clone()).collect());
        rhs.push(x[d].clone());
    }
    rows.push(vec![Q::one(); n]);
    rhs.push(Q::one());
    for i in 0..m {
        if rhs[i].is_negative() {
            rhs[i] = -rhs[i].clone();
            for c in rows[i].iter_mut() {
                *c = -c.clone();
            }
        }
        for j in 0..m {
            rows[i].push(if i == j { Q::one() } else { Q::zero() });
        }
    }
    let total = n + m;
    let mut basis: Vec<usize> = (n..total).collect();
    // Minimize the sum of artificials; Bland's rule prevents cycling.
    loop {
        let mut cost = vec![Q::zero(); total];
        for c in cost.iter_mut().skip(n) {
            *c = Q::one();
        }
        let mut reduced = cost.clone();
        for (i, &b) in basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (j, r) in reduced.iter_mut().enumerate() {
                *r -= &cb * &rows[i][j];
            }
        }
        let Some(enter) = (0..total).find(|&j| reduced[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if rows[i][enter].is_positive() {
                let ratio = &rhs[i] / &rows[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { break };
        let piv = rows[r][enter].clone();
        for c in rows[r].iter_mut() {
            *c = &*c / &piv;
        }
        rhs[r] = &rhs[r] / &piv;
        for i in 0..m {
            if i != r && !rows[i][enter].is_zero() {
                let f = rows[i][enter].clone();
                let pr = rows[r].clone();
                for (c, p) in rows[i].iter_mut().zip(pr) {
                    *c -= &f * p;
                }
                let rr = rhs[r].clone();
                rhs[i] -= &f * rr;
            }
        }
        basis[r] = enter;
    }
    basis.iter().zip(&rhs).all(|(&b, v)| b < n || v.is_zero())
}

/// `min_{α, γ ∈ vert Δ} 𝗏(c_α) + ⟨α, γ⟩`, `+∞` for the zero series.
pub fn convergence_margin(f: &GroupSeries, delta: &Polyhedron) -> Extended {
    margin_over(f.terms.iter(), delta)
}

fn margin_over<'a>(
    terms: impl Iterator<Item = (&'a Exponent, &'a NovikovElement)>,
    delta: &Polyhedron,
) -> Extended {
    let mut best = Extended::Infinity;
    for (a, c) in terms {
        let Extended::Finite(v) = c.valuation() else {
            continue;
        };
        for g in &delta.vertices {
            best = best.min(Extended::Finite(&v + pair(a, g)));
        }
    }
    best
}

/// Margin restricted to terms with `𝗏(c_α) ≥ E`, at each distinct stored valuation `E`.
pub fn margin_profile(f: &GroupSeries, delta: &Polyhedron) -> Vec<(Q, Extended)> {
    let mut levels: Vec<Q> = f
        .terms
        .values()
        .filter_map(|c| c.valuation().finite().cloned())
        .collect();
    levels.sort();
    levels.dedup();
    levels
        .into_iter()
        .map(|e| {
            let m = margin_over(
                f.terms
                    .iter()
                    .filter(|(_, c)| c.valuation() >= Extended::Finite(e.clone())),
                delta,
            );
            (e, m)
        })
        .collect()
}

/// A point of `(U_Λ)^m`, optionally shifted by `γ ∈ Δ`.
#[derive(Clone, Debug)]
pub struct TorusPoint {
    pub coords: Vec<NovikovElement>,
    pub gamma: Option<Vec<Q>>,
}

impl TorusPoint {
    pub fn new(coords: Vec<NovikovElement>, gamma: Option<Vec<Q>>) -> Result<Self, SeriesError> {
        for (j, y) in coords.iter().enumerate() {
            if y.valuation() != Extended::Finite(Q::zero()) {
                return Err(SeriesError::InvalidPoint(format!(
                    "coordinate {j} must have valuation 0"
                )));
            }
        }
        if let Some(g) = &gamma {
            if g.len() != coords.len() {
                return Err(SeriesError::InvalidPoint(
                    "shift has the wrong length".into(),
                ));
            }
        }
        Ok(TorusPoint { coords, gamma })
    }

    /// Constant residue coordinates.
    pub fn residues(ys: &[Q]) -> Result<Self, SeriesError> {
        Self::new(
            ys.iter()
                .map(|y| NovikovElement::constant(y.clone()))
                .collect(),
            None,
        )
    }
}

/// `f(y, γ) = Σ c_α T^{⟨γ,α⟩} y^α`.
pub fn evaluate(f: &GroupSeries, p: &TorusPoint) -> Result<NovikovElement, SeriesError> {
    if p.coords.len() != f.rank {
        return Err(SeriesError::RankMismatch(f.rank, p.coords.len()));
    }
    let gamma = p.gamma.clone().unwrap_or_else(|| vec![Q::zero(); f.rank]);
    let margin = convergence_margin(f, &Polyhedron::point(gamma.clone()));
    if let Extended::Finite(m) = &margin {
        if m.is_negative() {
            return Err(SeriesError::DivergenceError(fmt_q(m)));
        }
    }
    let shift_floor = f
        .terms
        .keys()
        .map(|a| pair(a, &gamma))
        .min()
        .unwrap_or_else(Q::zero)
        .min(Q::zero());
    let prec = f.precision.plus_q(&shift_floor);
    let mut inverses: Vec<Option<NovikovElement>> = vec![None; f.rank];
    for a in f.terms.keys() {
        for (j, &n) in a.iter().enumerate() {
            if n < 0 && inverses[j].is_none() {
                inverses[j] = Some(p.coords[j].invert_to(&prec)?);
            }
        }
    }
    let mut acc = NovikovElement::zero().with_precision(prec.clone());
    for (a, c) in &f.terms {
        let mut term = c.shift(&pair(a, &gamma));
        for (j, &n) in a.iter().enumerate() {
            let base = if n >= 0 {
                &p.coords[j]
            } else {
                inverses[j].as_ref().expect("inverted above")
            };
            term = term
                .mul_ref(&base.pow(n.unsigned_abs() as u32))
                .with_precision(prec.clone());
        }
        acc = acc.add_ref(&term);
    }
    Ok(acc.with_precision(prec))
}

#[derive(Clone, Debug)]
pub struct VanishingReport {
    pub is_zero: bool,
    pub min_valuation: Extended,
    /// `f̄`: residues of `f / c_{ν_0}`, a Laurent polynomial over `Q`.
    pub normalized: BTreeMap<Exponent, Q>,
    pub witness: Option<Vec<Q>>,
    pub witness_valuation: Option<Extended>,
}

/// Small-height nonzero rationals: `1, −1, 2, −2, 1/2, −1/2, 3, …`.
fn candidate_residues(count: usize) -> Vec<Q> {
    let mut out: Vec<Q> = Vec::new();
    let mut h = 1i64;
    while out.len() < count {
        let mut level: Vec<(i64, i64)> = (1..=h).map(|d| (h, d)).collect();
        level.extend((1..h).map(|n| (n, h)));
        for (n, d) in level {
            if num::integer::gcd(n, d) == 1 {
                out.push(q(n, d));
                out.push(q(-n, d));
            }
        }
        h += 1;
    }
    out.truncate(count);
    out
}

fn eval_laurent(f: &BTreeMap<Exponent, Q>, y: &[Q]) -> Q {
    let mut acc = Q::zero();
    for (a, c) in f {
        let mut t = c.clone();
        for (j, &n) in a.iter().enumerate() {
            let base = if n >= 0 { y[j].clone() } else { y[j].recip() };
            for _ in 0..n.unsigned_abs() {
                t *= &base;
            }
        }
        acc += t;
    }
    acc
}

/// Index tuples in `0..=shell` whose maximum is `shell`.
fn shell_tuples(m: usize, shell: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; m];
    loop {
        if (m == 0 && shell == 0) || (m > 0 && cur.contains(&shell)) {
            out.push(cur.clone());
        }
        let mut pos = 0;
        loop {
            if pos == m {
                return out;
            }
            cur[pos] += 1;
            if cur[pos] <= shell {
                break;
            }
            cur[pos] = 0;
            pos += 1;
        }
    }
}

/// The non-archimedean vanishing test: either `f` is zero, or a residue point
/// where `f` has valuation exactly `min_α 𝗏(c_α)`.
pub fn vanishing_analysis(f: &GroupSeries) -> VanishingReport {
    let min_valuation = f.valuation();
    let mut report = VanishingReport {
        is_zero: f.is_zero(),
        min_valuation: min_valuation.clone(),
        normalized: BTreeMap::new(),
        witness: None,
        witness_valuation: None,
    };
    let Extended::Finite(v0) = min_valuation else {
        return report;
    };
    let lead = |c: &NovikovElement| {
        c.leading_term()
            .map(|(_, x)| x.clone())
            .unwrap_or_else(Q::zero)
    };
    let (_, c0) = f
        .terms
        .iter()
        .find(|(_, c)| c.valuation() == Extended::Finite(v0.clone()))
        .expect("minimum");
    let l0 = lead(c0);
    for (a, c) in &f.terms {
        if c.valuation() == Extended::Finite(v0.clone()) {
            report.normalized.insert(a.clone(), lead(c) / &l0);
        }
    }
    let cands = candidate_residues(16);
    // Shells of increasing maximal index keep the search order deterministic.
    'search: for shell in 0..cands.len() {
        for idx in shell_tuples(f.rank, shell) {
            let y: Vec<Q> = idx.iter().map(|&i| cands[i].clone()).collect();
            if !eval_laurent(&report.normalized, &y).is_zero() {
                report.witness = Some(y);
                break 'search;
            }
        }
    }
    if let Some(y) = &report.witness {
        if let Ok(p) = TorusPoint::residues(y) {
            report.witness_valuation = evaluate(f, &p).ok().map(|e| e.valuation());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(e: i64) -> NovikovElement {
        NovikovElement::monomial(Q::one(), qi(e))
    }

    #[test]
    fn group_law_and_products() {
        let a = GroupSeries::y(vec![1, 0]);
        let b = GroupSeries::y(vec![-1, 0]);
        assert_eq!(a.mul(&b), GroupSeries::one(2, Extended::Infinity));
        let f = GroupSeries::one(1, Extended::Infinity).add(&GroupSeries::monomial(
            1,
            t(1),
            vec![1],
            Extended::Infinity,
        ));
        let g = GroupSeries::one(1, Extended::Infinity).sub(&GroupSeries::monomial(
            1,
            t(1),
            vec![1],
            Extended::Infinity,
        ));
        let want = GroupSeries::one(1, Extended::Infinity).sub(&GroupSeries::monomial(
            1,
            t(2),
            vec![2],
            Extended::Infinity,
        ));
        assert_eq!(f.mul(&g), want);
    }

    #[test]
    fn exp_examples() {
        let z = GroupSeries::exact_zero(1);
        assert_eq!(gs_exp(&z).unwrap(), GroupSeries::one(1, Extended::Infinity));
        let f = GroupSeries::monomial(1, t(1), vec![1], Extended::Finite(q(5, 2)));
        let e = gs_exp(&f).unwrap();
        let want = GroupSeries::from_terms(
            1,
            vec![
                (vec![0], NovikovElement::one()),
                (vec![1], t(1)),
                (vec![2], t(2).scalar_mul(&q(1, 2))),
            ],
            Extended::Finite(q(5, 2)),
        );
        assert!(e.structurally_eq(&want), "{e}");
        let inv = gs_exp(&f.neg()).unwrap();
        assert_eq!(e.mul(&inv), GroupSeries::one(1, Extended::Finite(q(5, 2))));
        let bad = GroupSeries::monomial(1, NovikovElement::one(), vec![1], Extended::Finite(qi(2)));
        assert!(gs_exp(&bad).is_err());
    }

    #[test]
    fn margins() {
        let f = GroupSeries::monomial(2, t(1), vec![1, 0], Extended::Infinity);
        assert_eq!(
            convergence_margin(&f, &Polyhedron::point(vec![qi(0), qi(0)])),
            Extended::Finite(qi(1))
        );
        let d = Polyhedron::new(vec![vec![qi(-2), qi(0)], vec![qi(0), qi(0)]]).unwrap();
        assert_eq!(convergence_margin(&f, &d), Extended::Finite(qi(-1)));
    }

    #[test]
    fn hull_membership() {
        let sq = Polyhedron::cube(2, &q(1, 2));
        assert!(sq.contains_origin());
        assert!(sq.contains(&[q(1, 2), q(-1, 2)]));
        assert!(!sq.contains(&[q(1, 2), q(3, 4)]));
        let seg = Polyhedron::new(vec![vec![qi(1), qi(1)], vec![qi(2), qi(2)]]).unwrap();
        assert!(!seg.contains_origin());
    }

    #[test]
    fn evaluation_examples() {
        let f = GroupSeries::y(vec![1]);
        let y = NovikovElement::one().add_ref(&t(1));
        let p = TorusPoint::new(vec![y.clone()], None).unwrap();
        assert_eq!(evaluate(&f, &p).unwrap(), y);
        let w = GroupSeries::from_terms(
            1,
            vec![(vec![1], t(1)), (vec![-1], t(1))],
            Extended::Infinity,
        );
        let p = TorusPoint::residues(&[qi(-1)]).unwrap();
        assert_eq!(evaluate(&w, &p).unwrap(), t(1).scalar_mul(&qi(-2)));
    }

    #[test]
    fn vanishing_examples() {
        let z = GroupSeries::exact_zero(1);
        let r = vanishing_analysis(&z);
        assert!(r.is_zero && r.witness.is_none());
        let c = GroupSeries::monomial(1, t(1), vec![1], Extended::Infinity);
        assert!(vanishing_analysis(&c.sub(&c)).is_zero);
        let f = GroupSeries::from_terms(
            1,
            vec![(vec![1], t(1)), (vec![-1], t(1))],
            Extended::Infinity,
        );
        let r = vanishing_analysis(&f);
        assert_eq!(r.witness, Some(vec![qi(1)]));
        assert_eq!(r.witness_valuation, Some(Extended::Finite(qi(1))));
        // y - y^{-1} vanishes at ±1 and needs 2.
        let g = GroupSeries::from_terms(
            1,
            vec![(vec![1], t(1)), (vec![-1], t(1).scalar_mul(&qi(-1)))],
            Extended::Infinity,
        );
        assert_eq!(vanishing_analysis(&g).witness, Some(vec![qi(2)]));
    }
}
