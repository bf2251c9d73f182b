//! Graded spaces, sparse vectors with polynomial coefficients, and linear maps.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};

use crate::novikov::Q;
use crate::poly::Poly;

use super::AlgebraError;

/// Finite-dimensional graded space with a distinguished unit and the data
/// needed to pair degree-one elements against `H_1(L) ≅ Z^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    pub names: Vec<String>,
    pub degrees: Vec<i64>,
    pub unit: Option<usize>,
    pub h2_basis: Vec<usize>,
    pub h1_basis: Vec<usize>,
    /// `m × h1_basis.len()` matrix; row `j` gives `⟨e_j, ·⟩` on `h1_basis`.
    pub pairing: Vec<Vec<Q>>,
}

impl GradedSpace {
    pub fn new(names: Vec<String>, degrees: Vec<i64>) -> Self {
        GradedSpace {
            names,
            degrees,
            unit: None,
            h2_basis: vec![],
            h1_basis: vec![],
            pairing: vec![],
        }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    /// Parity of the shifted degree `deg x − 1`.
    pub fn shifted_parity(&self, i: usize) -> u8 {
        (self.degrees[i] - 1).rem_euclid(2) as u8
    }

    pub fn basis_of_degree(&self, d: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    pub fn lattice_rank(&self) -> usize {
        self.pairing.len()
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        let bad = |m: String| Err(AlgebraError::Schema(m));
        if self.names.len() != self.degrees.len() {
            return bad("names and degrees differ in length".into());
        }
        if self.degrees.iter().any(|&d| d < 0) {
            return bad("negative degree".into());
        }
        if let Some(u) = self.unit {
            if u >= self.dim() || self.degrees[u] != 0 {
                return bad("unit must be a degree-zero basis element".into());
            }
        }
        for &i in &self.h2_basis {
            if i >= self.dim() || self.degrees[i] != 2 {
                return bad(format!("h2 basis index {i} is not of degree 2"));
            }
        }
        for &i in &self.h1_basis {
            if i >= self.dim() || self.degrees[i] != 1 {
                return bad(format!("h1 basis index {i} is not of degree 1"));
            }
        }
        if self
            .pairing
            .iter()
            .any(|row| row.len() != self.h1_basis.len())
        {
            return bad("pairing rows must match the h1 basis".into());
        }
        Ok(())
    }

    /// `⟨α, b⟩` for a lattice vector `α` and a vector `b` (constant coefficients
    /// are required for the result to be a number; the `s`-constant term is used
    /// otherwise).
    pub fn pair(&self, alpha: &[i64], b: &SVec) -> Poly {
        let mut acc = Poly::zero();
        for (j, row) in self.pairing.iter().enumerate() {
            let a = alpha.get(j).copied().unwrap_or(0);
            if a == 0 {
                continue;
            }
            for (c, &idx) in self.h1_basis.iter().enumerate() {
                if let Some(v) = b.get(&idx) {
                    acc += &v.scale(&(&row[c] * Q::from_integer(a.into())));
                }
            }
        }
        acc
    }

    /// Functional `⟨α, ·⟩` on basis elements.
    pub fn pairing_functional(&self, alpha: &[i64]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (j, row) in self.pairing.iter().enumerate() {
            let a = Q::from_integer(alpha.get(j).copied().unwrap_or(0).into());
            for (c, &idx) in self.h1_basis.iter().enumerate() {
                out[idx] += &row[c] * &a;
            }
        }
        out
    }
}

pub fn same_space(a: &Arc<GradedSpace>, b: &Arc<GradedSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Sparse vector over a basis, coefficients polynomial in `s`.
pub type SVec = BTreeMap<usize, Poly>;

pub fn svec_unit(i: usize) -> SVec {
    let mut v = SVec::new();
    v.insert(i, Poly::one());
    v
}

pub fn svec_add_scaled(acc: &mut SVec, v: &SVec, c: &Poly) {
    if c.is_zero() {
        return;
    }
    for (i, x) in v {
        let term = x * c;
        add_entry(acc, *i, &term);
    }
}

pub fn add_entry(acc: &mut SVec, i: usize, x: &Poly) {
    if x.is_zero() {
        return;
    }
    let e = acc.entry(i).or_insert_with(Poly::zero);
    *e += x;
    if e.is_zero() {
        acc.remove(&i);
    }
}

pub fn svec_scale(v: &SVec, c: &Poly) -> SVec {
    let mut out = SVec::new();
    svec_add_scaled(&mut out, v, c);
    out
}

pub fn svec_neg(v: &SVec) -> SVec {
    v.iter().map(|(i, x)| (*i, -x)).collect()
}

pub fn svec_sub(a: &SVec, b: &SVec) -> SVec {
    let mut out = a.clone();
    svec_add_scaled(&mut out, b, &Poly::constant(-Q::one()));
    out
}

pub fn svec_map_coeffs(v: &SVec, f: impl Fn(&Poly) -> Poly) -> SVec {
    let mut out = SVec::new();
    for (i, x) in v {
        add_entry(&mut out, *i, &f(x));
    }
    out
}

/// Linear map given by the images of basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinMap {
    pub rows: usize,
    pub cols: Vec<SVec>,
}

impl LinMap {
    pub fn zero(rows: usize, cols: usize) -> Self {
        LinMap {
            rows,
            cols: vec![SVec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        LinMap {
            rows: n,
            cols: (0..n).map(svec_unit).collect(),
        }
    }

    /// From a dense matrix `m[r][c]`.
    pub fn from_dense(m: &[Vec<Poly>], rows: usize, cols: usize) -> Self {
        let mut out = LinMap::zero(rows, cols);
        for (r, row) in m.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                add_entry(&mut out.cols[c], r, x);
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<Poly>> {
        let mut m = vec![vec![Poly::zero(); self.ncols()]; self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, x) in col {
                m[*r][c] = x.clone();
            }
        }
        m
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn apply(&self, v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (i, x) in v {
            svec_add_scaled(&mut out, &self.cols[*i], x);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinMap) -> LinMap {
        LinMap {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn add(&self, other: &LinMap) -> LinMap {
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut v = a.clone();
                svec_add_scaled(&mut v, b, &Poly::one());
                v
            })
            .collect();
        LinMap {
            rows: self.rows,
            cols,
        }
    }

    pub fn scale(&self, c: &Poly) -> LinMap {
        LinMap {
            rows: self.rows,
            cols: self.cols.iter().map(|v| svec_scale(v, c)).collect(),
        }
    }

    pub fn sub(&self, other: &LinMap) -> LinMap {
        self.add(&other.scale(&Poly::constant(-Q::one())))
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> LinMap {
        LinMap {
            rows: self.rows,
            cols: self.cols.iter().map(|c| svec_map_coeffs(c, &f)).collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.cols
            .iter()
            .all(|c| c.values().all(|x| x.is_constant()))
    }

    /// Two-sided inverse. Constant maps use Gaussian elimination; polynomial
    /// maps must be a constant invertible map plus a nilpotent correction.
    pub fn inverse(&self) -> Option<LinMap> {
        let n = self.ncols();
        if n != self.rows {
            return None;
        }
        let at0 = self.map_coeffs(|p| Poly::constant(p.constant_term()));
        let inv0 = invert_constant(&at0)?;
        if self.is_constant() {
            return Some(inv0);
        }
        // A = A0 (I + N), N = A0^{-1}(A - A0); invert by a terminating Neumann series.
        let nmat = inv0.compose(&self.sub(&at0));
        let mut term = LinMap::identity(n);
        let mut acc = LinMap::identity(n);
        for _ in 0..=n {
            term = term.compose(&nmat).scale(&Poly::constant(-Q::one()));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        let cand = acc.compose(&inv0);
        (self.compose(&cand) == LinMap::identity(n) && cand.compose(self) == LinMap::identity(n))
            .then_some(cand)
    }
}

fn invert_constant(m: &LinMap) -> Option<LinMap> {
    let n = m.ncols();
    let mut a: Vec<Vec<Q>> = vec![vec![Q::zero(); 2 * n]; n];
    for (c, col) in m.cols.iter().enumerate() {
        for (r, x) in col {
            a[*r][c] = x.constant_term();
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[n + i] = Q::one();
    }
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    let dense: Vec<Vec<Poly>> = a
        .iter()
        .map(|row| row[n..].iter().map(|x| Poly::constant(x.clone())).collect())
        .collect();
    Some(LinMap::from_dense(&dense, n, n))
}

/// Basis of the kernel of a constant linear map, as sparse vectors.
pub fn kernel(m: &LinMap, restrict_to: &[usize]) -> Vec<SVec> {
    let cols: Vec<usize> = restrict_to.to_vec();
    let rows = m.rows;
    let mut a: Vec<Vec<Q>> = vec![vec![Q::zero(); cols.len()]; rows];
    for (c, &idx) in cols.iter().enumerate() {
        for (r, x) in &m.cols[idx] {
            a[*r][c] = x.constant_term();
        }
    }
    // Reduced row echelon form.
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols.len() {
        let Some(p) = (row..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let pv = a[row][c].clone();
        for x in a[row].iter_mut() {
            *x = &*x / &pv;
        }
        for r in 0..rows {
            if r != row && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pr = a[row].clone();
                for (x, y) in a[r].iter_mut().zip(pr) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        row += 1;
        if row == rows {
            break;
        }
    }
    let mut out = Vec::new();
    for free in 0..cols.len() {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = SVec::new();
        add_entry(&mut v, cols[free], &Poly::one());
        for (r, &pc) in pivots.iter().enumerate() {
            let x = -a[r][free].clone();
            add_entry(&mut v, cols[pc], &Poly::constant(x));
        }
        out.push(v);
    }
    out
}
