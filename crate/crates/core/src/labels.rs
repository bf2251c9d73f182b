//! Label groups: energy, Maslov index and boundary on `H_2(X, L)`, plus
//! enumeration of energy-bounded effective classes and their decompositions.

use std::collections::BTreeMap;
use std::fmt;

use num::{Signed, Zero};
use thiserror::Error;

use crate::novikov::{fmt_q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("enumeration exceeded the hard limit of {0} classes")]
    CutoffExplosion(usize),
    #[error("invalid label group: {0}")]
    Invalid(String),
}

/// An effective class `β = Σ n_j g_j`, stored by its generator multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelClass(pub Vec<u32>);

impl LabelClass {
    pub fn zero(ngen: usize) -> Self {
        LabelClass(vec![0; ngen])
    }

    pub fn generator(ngen: usize, j: usize) -> Self {
        let mut v = vec![0; ngen];
        v[j] = 1;
        LabelClass(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&n| n == 0)
    }

    /// Total multiplicity `|β|`.
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &LabelClass) -> LabelClass {
        LabelClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when it stays effective.
    pub fn checked_sub(&self, other: &LabelClass) -> Option<LabelClass> {
        let mut v = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            v.push(a.checked_sub(*b)?);
        }
        Some(LabelClass(v))
    }

    pub fn le(&self, other: &LabelClass) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for LabelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The label group with its three homomorphisms and effective generators.
///
/// Classes live in `Z^rank`; `generators` lists effective classes in that
/// lattice and `LabelClass` records multiplicities over this list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelGroup {
    pub rank: usize,
    pub energy: Vec<Q>,
    pub maslov: Vec<i64>,
    /// Row-major `m × rank` matrix of `∂: Z^rank → Z^m`.
    pub boundary: Vec<Vec<i64>>,
    pub generators: Vec<Vec<i64>>,
    /// Hard cap on the size of any enumeration.
    pub limit: usize,
}

pub const DEFAULT_LIMIT: usize = 100_000;

impl LabelGroup {
    pub fn new(
        rank: usize,
        energy: Vec<Q>,
        maslov: Vec<i64>,
        boundary: Vec<Vec<i64>>,
        generators: Vec<Vec<i64>>,
    ) -> Result<Self, LabelError> {
        let g = LabelGroup {
            rank,
            energy,
            maslov,
            boundary,
            generators,
            limit: DEFAULT_LIMIT,
        };
        g.validate()?;
        Ok(g)
    }

    /// A label group with no effective classes besides zero.
    pub fn trivial(lattice_rank: usize) -> Self {
        LabelGroup {
            rank: 0,
            energy: vec![],
            maslov: vec![],
            boundary: vec![vec![]; lattice_rank],
            generators: vec![],
            limit: DEFAULT_LIMIT,
        }
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn validate(&self) -> Result<(), LabelError> {
        let bad = |m: String| Err(LabelError::Invalid(m));
        if self.energy.len() != self.rank || self.maslov.len() != self.rank {
            return bad("energy and maslov vectors must have length rank".into());
        }
        if self.maslov.iter().any(|m| m % 2 != 0) {
            return bad("maslov entries must be even".into());
        }
        if self.boundary.iter().any(|row| row.len() != self.rank) {
            return bad("boundary rows must have length rank".into());
        }
        for (j, g) in self.generators.iter().enumerate() {
            if g.len() != self.rank {
                return bad(format!("generator {j} has wrong length"));
            }
            if !self.lattice_energy(g).is_positive() {
                return bad(format!("generator {j} must have positive energy"));
            }
        }
        Ok(())
    }

    /// Rank `m` of the lattice `H_1(L)`.
    pub fn lattice_rank(&self) -> usize {
        self.boundary.len()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn zero(&self) -> LabelClass {
        LabelClass::zero(self.num_generators())
    }

    /// The lattice vector `Σ n_j g_j ∈ Z^rank`.
    pub fn lattice_class(&self, b: &LabelClass) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for (n, g) in b.0.iter().zip(&self.generators) {
            for (vi, gi) in v.iter_mut().zip(g) {
                *vi += *n as i64 * gi;
            }
        }
        v
    }

    fn lattice_energy(&self, v: &[i64]) -> Q {
        v.iter()
            .zip(&self.energy)
            .map(|(n, e)| e * Q::from_integer((*n).into()))
            .sum()
    }

    pub fn energy_of(&self, b: &LabelClass) -> Q {
        self.lattice_energy(&self.lattice_class(b))
    }

    pub fn maslov_of(&self, b: &LabelClass) -> i64 {
        self.lattice_class(b)
            .iter()
            .zip(&self.maslov)
            .map(|(n, m)| n * m)
            .sum()
    }

    /// `∂β ∈ Z^m`.
    pub fn boundary_of(&self, b: &LabelClass) -> Vec<i64> {
        let v = self.lattice_class(b);
        self.boundary
            .iter()
            .map(|row| row.iter().zip(&v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn generator_energies(&self) -> Vec<Q> {
        self.generators
            .iter()
            .map(|g| self.lattice_energy(g))
            .collect()
    }

    /// All effective classes with `E ≤ e_max`, sorted by energy then
    /// lexicographically.
    pub fn effective_classes(&self, e_max: &Q) -> Result<Vec<LabelClass>, LabelError> {
        let gen_e = self.generator_energies();
        let mut out = Vec::new();
        let mut cur = vec![0u32; gen_e.len()];
        self.walk(0, &gen_e, &mut cur, Q::zero(), e_max, &mut out)?;
        out.sort_by(|a, b| {
            self.energy_of(a)
                .cmp(&self.energy_of(b))
                .then_with(|| a.cmp(b))
        });
        Ok(out)
    }

    fn walk(
        &self,
        j: usize,
        gen_e: &[Q],
        cur: &mut Vec<u32>,
        e: Q,
        e_max: &Q,
        out: &mut Vec<LabelClass>,
    ) -> Result<(), LabelError> {
        if j == gen_e.len() {
            if out.len() >= self.limit {
                return Err(LabelError::CutoffExplosion(self.limit));
            }
            out.push(LabelClass(cur.clone()));
            return Ok(());
        }
        let mut e = e;
        loop {
            self.walk(j + 1, gen_e, cur, e.clone(), e_max, out)?;
            e += &gen_e[j];
            if &e > e_max {
                break;
            }
            cur[j] += 1;
        }
        cur[j] = 0;
        Ok(())
    }

    /// Ordered `parts`-tuples of effective classes summing to `b`.
    pub fn decompositions(&self, b: &LabelClass, parts: usize) -> Vec<Vec<LabelClass>> {
        let mut out = Vec::new();
        let mut acc = Vec::with_capacity(parts);
        decompose_into(b, parts, &mut acc, &mut out);
        out
    }

    /// Every class `γ ≤ β` componentwise.
    pub fn sub_classes(&self, b: &LabelClass) -> Vec<LabelClass> {
        let mut out = vec![LabelClass(vec![])];
        for &n in &b.0 {
            let mut next = Vec::with_capacity(out.len() * (n as usize + 1));
            for prefix in &out {
                for k in 0..=n {
                    let mut p = prefix.0.clone();
                    p.push(k);
                    next.push(LabelClass(p));
                }
            }
            out = next;
        }
        out
    }

    /// The smallest energy of an effective class strictly above `e_max`;
    /// `None` when the group has no generators.
    pub fn horizon(&self, e_max: &Q) -> Result<Option<Q>, LabelError> {
        let gen_e = self.generator_energies();
        if gen_e.is_empty() {
            return Ok(None);
        }
        let mut best: Option<Q> = None;
        for b in self.effective_classes(e_max)? {
            let e = self.energy_of(&b);
            for ge in &gen_e {
                let cand = &e + ge;
                if &cand > e_max && best.as_ref().is_none_or(|x| &cand < x) {
                    best = Some(cand);
                }
            }
        }
        Ok(best)
    }

    /// A copy with energies replaced by `E + ∂ᵀξ`.
    pub fn shifted_energy(&self, xi: &[Q]) -> LabelGroup {
        let mut g = self.clone();
        for (r, e) in g.energy.iter_mut().enumerate() {
            let s: Q = self
                .boundary
                .iter()
                .zip(xi)
                .map(|(row, x)| x * Q::from_integer(row[r].into()))
                .sum();
            *e += s;
        }
        g
    }

    pub fn describe_energy(&self) -> String {
        self.energy.iter().map(fmt_q).collect::<Vec<_>>().join(" ")
    }
}

fn decompose_into(
    b: &LabelClass,
    parts: usize,
    acc: &mut Vec<LabelClass>,
    out: &mut Vec<Vec<LabelClass>>,
) {
    if parts == 0 {
        if b.is_zero() {
            out.push(acc.clone());
        }
        return;
    }
    if parts == 1 {
        acc.push(b.clone());
        out.push(acc.clone());
        acc.pop();
        return;
    }
    for first in sub_classes_of(b) {
        let rest = b.checked_sub(&first).expect("sub-class");
        acc.push(first);
        decompose_into(&rest, parts - 1, acc, out);
        acc.pop();
    }
}

fn sub_classes_of(b: &LabelClass) -> Vec<LabelClass> {
    let mut out = vec![Vec::new()];
    for &n in &b.0 {
        let mut next = Vec::new();
        for prefix in &out {
            for k in 0..=n {
                let mut p: Vec<u32> = prefix.clone();
                p.push(k);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(LabelClass).collect()
}

/// Multiplicity lookup table used by caches keyed on classes.
pub type ClassMap<V> = BTreeMap<LabelClass, V>;

/// `Σ_i a_i b_i` for an integer lattice vector against rationals.
pub fn pair_lattice(alpha: &[i64], xi: &[Q]) -> Q {
    alpha
        .iter()
        .zip(xi)
        .map(|(a, x)| x * Q::from_integer((*a).into()))
        .fold(Q::zero(), |acc, t| acc + t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novikov::{q, qi};

    fn one_gen() -> LabelGroup {
        LabelGroup::new(1, vec![qi(1)], vec![2], vec![vec![1]], vec![vec![1]]).unwrap()
    }

    fn two_gen() -> LabelGroup {
        LabelGroup::new(
            2,
            vec![qi(1), qi(1)],
            vec![2, 0],
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![1, 0], vec![0, 1]],
        )
        .unwrap()
    }

    #[test]
    fn effective_examples() {
        let g = one_gen();
        let cls = g.effective_classes(&q(7, 2)).unwrap();
        let expect: Vec<LabelClass> = (0..4).map(|n| LabelClass(vec![n])).collect();
        assert_eq!(cls, expect);
        assert_eq!(
            g.effective_classes(&qi(0)).unwrap(),
            vec![LabelClass(vec![0])]
        );
        let h = two_gen();
        let cls = h.effective_classes(&qi(2)).unwrap();
        let expect = [[0, 0], [0, 1], [1, 0], [0, 2], [1, 1], [2, 0]]
            .iter()
            .map(|v| LabelClass(v.to_vec()))
            .collect::<Vec<_>>();
        assert_eq!(cls, expect);
    }

    #[test]
    fn explosion_is_reported() {
        let h = two_gen().with_limit(5);
        assert_eq!(
            h.effective_classes(&qi(2)),
            Err(LabelError::CutoffExplosion(5))
        );
    }

    #[test]
    fn decomposition_examples() {
        let g = one_gen();
        let z = LabelClass(vec![0]);
        assert_eq!(g.decompositions(&z, 2), vec![vec![z.clone(), z.clone()]]);
        let one = LabelClass(vec![1]);
        assert_eq!(g.decompositions(&one, 2).len(), 2);
        assert_eq!(g.decompositions(&LabelClass(vec![2]), 3).len(), 6);
    }

    #[test]
    fn horizon_and_shift() {
        let h = two_gen();
        assert_eq!(h.horizon(&qi(3)).unwrap(), Some(qi(4)));
        let s = h.shifted_energy(&[q(1, 4), qi(0)]);
        assert_eq!(s.energy, vec![q(5, 4), qi(1)]);
        assert_eq!(LabelGroup::trivial(2).horizon(&qi(3)).unwrap(), None);
    }

    #[test]
    fn rejects_odd_maslov() {
        assert!(LabelGroup::new(1, vec![qi(1)], vec![1], vec![vec![1]], vec![vec![1]]).is_err());
    }
}
