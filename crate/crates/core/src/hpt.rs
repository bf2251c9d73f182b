//! Homological perturbation: contractions, decorated ribbon trees and the
//! minimal model, pointwise and over `[0,1]`.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::space::{svec_add_scaled, svec_unit};
use crate::algebra::system::apply_cell;
use crate::algebra::system::cell_add_scaled;
use crate::algebra::{
    diamond_cell, AlgebraError, Cell, GradedSpace, LinMap, OpKind, OperatorSystem, SVec,
};
use crate::isotopy::PseudoIsotopy;
use crate::labels::{LabelClass, LabelError, LabelGroup};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HptError {
    #[error("invalid contraction: {0}")]
    ContractionInvalid(String),
    #[error("tree enumeration exceeded the limit of {0}")]
    CutoffExplosion(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Label(#[from] LabelError),
}

/// `(i, π, G)` between `H` and `C` with `iπ − id = dG + Gd`.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub h: Arc<GradedSpace>,
    pub c: Arc<GradedSpace>,
    pub i: LinMap,
    pub pi: LinMap,
    pub g: LinMap,
    /// Whether `πi = id`, `G² = 0`, `Gi = 0` and `πG = 0` are required.
    pub strong: bool,
}

fn map_degree_ok(l: &LinMap, src: &GradedSpace, tgt: &GradedSpace, shift: i64) -> bool {
    l.cols
        .iter()
        .enumerate()
        .all(|(c, col)| col.keys().all(|r| tgt.degree(*r) == src.degree(c) + shift))
}

impl Contraction {
    /// The identity contraction of `C` onto itself.
    pub fn identity(c: Arc<GradedSpace>) -> Self {
        let n = c.dim();
        Contraction {
            h: c.clone(),
            c,
            i: LinMap::identity(n),
            pi: LinMap::identity(n),
            g: LinMap::zero(n, n),
            strong: true,
        }
    }

    /// Checks the contraction against the differential `d` of `C` and returns
    /// the induced differential `δ = π d i` of `H`.
    pub fn validate(&self, d: &LinMap) -> Result<LinMap, HptError> {
        let bad = |m: &str| Err(HptError::ContractionInvalid(m.into()));
        let (nh, nc) = (self.h.dim(), self.c.dim());
        if self.i.rows != nc || self.i.ncols() != nh || self.pi.rows != nh || self.pi.ncols() != nc
        {
            return bad("i and π have the wrong shape");
        }
        if self.g.rows != nc || self.g.ncols() != nc {
            return bad("G has the wrong shape");
        }
        if !map_degree_ok(&self.i, &self.h, &self.c, 0)
            || !map_degree_ok(&self.pi, &self.c, &self.h, 0)
        {
            return bad("i and π must preserve degree");
        }
        if !map_degree_ok(&self.g, &self.c, &self.c, -1) {
            return bad("G must have degree −1");
        }
        let delta = self.pi.compose(d).compose(&self.i);
        if d.compose(&self.i) != self.i.compose(&delta) {
            return bad("i is not a chain map");
        }
        if self.pi.compose(d) != delta.compose(&self.pi) {
            return bad("π is not a chain map");
        }
        let lhs = self.i.compose(&self.pi).sub(&LinMap::identity(nc));
        let rhs = d.compose(&self.g).add(&self.g.compose(d));
        if lhs != rhs {
            return bad("iπ − id ≠ dG + Gd");
        }
        if self.strong {
            if self.pi.compose(&self.i) != LinMap::identity(nh) {
                return bad("πi ≠ id");
            }
            if !self.g.compose(&self.g).is_zero()
                || !self.g.compose(&self.i).is_zero()
                || !self.pi.compose(&self.g).is_zero()
            {
                return bad("side conditions G² = Gi = πG = 0 fail");
            }
        }
        Ok(delta)
    }
}

/// A stable ribbon tree with interior vertices decorated by classes.
#[derive(Debug, PartialEq, Eq)]
pub enum DecoratedTree {
    Leaf,
    Vertex {
        beta: LabelClass,
        children: Vec<Rc<DecoratedTree>>,
    },
}

impl DecoratedTree {
    pub fn leaves(&self) -> usize {
        match self {
            DecoratedTree::Leaf => 1,
            DecoratedTree::Vertex { children, .. } => children.iter().map(|c| c.leaves()).sum(),
        }
    }

    pub fn total_class(&self, ngen: usize) -> LabelClass {
        match self {
            DecoratedTree::Leaf => LabelClass::zero(ngen),
            DecoratedTree::Vertex { beta, children } => children
                .iter()
                .fold(beta.clone(), |acc, c| acc.add(&c.total_class(ngen))),
        }
    }

    pub fn vertices(&self) -> usize {
        match self {
            DecoratedTree::Leaf => 0,
            DecoratedTree::Vertex { children, .. } => {
                1 + children.iter().map(|c| c.vertices()).sum::<usize>()
            }
        }
    }
}

/// Memoized enumeration of trees by `(leaves, total class)`.
pub struct TreeEnumerator<'a> {
    labels: &'a LabelGroup,
    limit: usize,
    produced: usize,
    leaf: Rc<DecoratedTree>,
    memo: HashMap<(usize, LabelClass), Rc<Vec<Rc<DecoratedTree>>>>,
}

impl<'a> TreeEnumerator<'a> {
    pub fn new(labels: &'a LabelGroup, limit: usize) -> Self {
        TreeEnumerator {
            labels,
            limit,
            produced: 0,
            leaf: Rc::new(DecoratedTree::Leaf),
            memo: HashMap::new(),
        }
    }

    /// Trees with a root vertex, `k` leaves and total class `β`.
    pub fn trees(
        &mut self,
        k: usize,
        beta: &LabelClass,
    ) -> Result<Rc<Vec<Rc<DecoratedTree>>>, HptError> {
        if let Some(v) = self.memo.get(&(k, beta.clone())) {
            return Ok(v.clone());
        }
        let mut out: Vec<Rc<DecoratedTree>> = vec![];
        for b0 in self.labels.sub_classes(beta) {
            let rest = beta.checked_sub(&b0).expect("sub class");
            let min_children = if b0.is_zero() { 2 } else { 0 };
            let max_children = k + rest.size() as usize;
            for l in min_children..=max_children {
                for parts in self.parts(k, &rest, l) {
                    let mut options = Vec::with_capacity(l);
                    for (ki, bi) in &parts {
                        options.push(self.subtrees(*ki, bi)?);
                    }
                    if options.iter().any(|o| o.is_empty()) {
                        continue;
                    }
                    let mut idx = vec![0usize; l];
                    loop {
                        let children = idx
                            .iter()
                            .zip(&options)
                            .map(|(&j, o)| o[j].clone())
                            .collect();
                        out.push(Rc::new(DecoratedTree::Vertex {
                            beta: b0.clone(),
                            children,
                        }));
                        self.produced += 1;
                        if self.produced > self.limit {
                            return Err(HptError::CutoffExplosion(self.limit));
                        }
                        if !advance(&mut idx, &options) {
                            break;
                        }
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert((k, beta.clone()), out.clone());
        Ok(out)
    }

    /// Trees or the bare leaf.
    fn subtrees(
        &mut self,
        k: usize,
        beta: &LabelClass,
    ) -> Result<Vec<Rc<DecoratedTree>>, HptError> {
        if k == 1 && beta.is_zero() {
            return Ok(vec![self.leaf.clone()]);
        }
        Ok(self.trees(k, beta)?.as_ref().clone())
    }

    /// Ordered `l`-tuples of nonzero `(k_i, β_i)` summing to `(k, β)`.
    fn parts(&self, k: usize, beta: &LabelClass, l: usize) -> Vec<Vec<(usize, LabelClass)>> {
        let mut out = vec![];
        let mut acc = vec![];
        self.parts_rec(k, beta, l, &mut acc, &mut out);
        out
    }

    fn parts_rec(
        &self,
        k: usize,
        beta: &LabelClass,
        l: usize,
        acc: &mut Vec<(usize, LabelClass)>,
        out: &mut Vec<Vec<(usize, LabelClass)>>,
    ) {
        if l == 0 {
            if k == 0 && beta.is_zero() {
                out.push(acc.clone());
            }
            return;
        }
        if k + (beta.size() as usize) < l {
            return;
        }
        for ki in 0..=k {
            for bi in self.labels.sub_classes(beta) {
                if ki == 0 && bi.is_zero() {
                    continue;
                }
                acc.push((ki, bi.clone()));
                self.parts_rec(
                    k - ki,
                    &beta.checked_sub(&bi).expect("sub class"),
                    l - 1,
                    acc,
                    out,
                );
                acc.pop();
            }
        }
    }
}

/// Odometer step over `Π options[p]`; false once every combination is seen.
fn advance<T>(idx: &mut [usize], options: &[Vec<T>]) -> bool {
    for p in (0..idx.len()).rev() {
        idx[p] += 1;
        if idx[p] < options[p].len() {
            return true;
        }
        idx[p] = 0;
    }
    false
}

/// All stable decorated trees with `k` leaves and total class `β`.
pub fn enumerate_trees(
    k: usize,
    beta: &LabelClass,
    labels: &LabelGroup,
    limit: usize,
) -> Result<Vec<Rc<DecoratedTree>>, HptError> {
    if k == 1 && beta.is_zero() {
        return Ok(vec![]);
    }
    let mut e = TreeEnumerator::new(labels, limit);
    Ok(e.trees(k, beta)?.as_ref().clone())
}

/// The maps used to transfer a structure along a contraction.
struct Transfer<'a> {
    m: &'a OperatorSystem,
    g: &'a LinMap,
    /// `m_{ℓ,β}(𝔦_{T_1}, …, 𝔦_{T_ℓ})` for each evaluated tree.
    inner: HashMap<usize, Cell>,
    leaf: Cell,
}

fn map_cell(cell: &Cell, l: &LinMap) -> Cell {
    let mut out = Cell::new();
    for (t, v) in cell {
        let w = l.apply(v);
        if !w.is_empty() {
            out.insert(t.clone(), w);
        }
    }
    out
}

/// `Σ m(v_1, …, v_ℓ)` over all combinations of slot entries, with the
/// input tuples concatenated.
fn compose_slots(mcell: &Cell, slots: &[&Cell]) -> Cell {
    let mut out = Cell::new();
    let mut tuple = vec![];
    let mut vecs: Vec<SVec> = vec![];
    fn rec(
        mcell: &Cell,
        slots: &[&Cell],
        pos: usize,
        tuple: &mut Vec<usize>,
        vecs: &mut Vec<SVec>,
        out: &mut Cell,
    ) {
        if pos == slots.len() {
            let v = apply_cell(mcell, vecs);
            if !v.is_empty() {
                cell_add_scaled(out, tuple.clone(), &v, &Poly::one());
            }
            return;
        }
        for (t, v) in slots[pos] {
            let len = tuple.len();
            tuple.extend_from_slice(t);
            vecs.push(v.clone());
            rec(mcell, slots, pos + 1, tuple, vecs, out);
            vecs.pop();
            tuple.truncate(len);
        }
    }
    rec(mcell, slots, 0, &mut tuple, &mut vecs, &mut out);
    out
}

impl<'a> Transfer<'a> {
    fn new(m: &'a OperatorSystem, i: &LinMap, g: &'a LinMap, h_dim: usize) -> Self {
        let mut leaf = Cell::new();
        for j in 0..h_dim {
            let v = i.apply(&svec_unit(j));
            if !v.is_empty() {
                leaf.insert(vec![j], v);
            }
        }
        Transfer {
            m,
            g,
            inner: HashMap::new(),
            leaf,
        }
    }

    /// `𝔦_T` for a subtree: `i` at a leaf and `G ∘ m_v(…)` otherwise.
    fn incl(&mut self, t: &Rc<DecoratedTree>) -> Cell {
        match t.as_ref() {
            DecoratedTree::Leaf => self.leaf.clone(),
            DecoratedTree::Vertex { .. } => map_cell(&self.inner_of(t), self.g),
        }
    }

    fn inner_of(&mut self, t: &Rc<DecoratedTree>) -> Cell {
        let key = Rc::as_ptr(t) as usize;
        if let Some(c) = self.inner.get(&key) {
            return c.clone();
        }
        let DecoratedTree::Vertex { beta, children } = t.as_ref() else {
            unreachable!("leaves have no inner part")
        };
        let cell = match self.m.cell(children.len(), beta) {
            None => Cell::new(),
            Some(mcell) => {
                let mcell = mcell.clone();
                let slots: Vec<Cell> = children.iter().map(|c| self.incl(c)).collect();
                if slots.iter().any(|s| s.is_empty()) {
                    Cell::new()
                } else {
                    let refs: Vec<&Cell> = slots.iter().collect();
                    compose_slots(&mcell, &refs)
                }
            }
        };
        self.inner.insert(key, cell.clone());
        cell
    }
}

/// Sums over trees: returns the transferred structure and the inclusion,
/// both as plain cell maps keyed by `(k, β)`.
fn transfer_by_trees(
    m: &OperatorSystem,
    i: &LinMap,
    pi: &LinMap,
    g: &LinMap,
    h_dim: usize,
    limit: usize,
) -> Result<
    (
        BTreeMap<(usize, LabelClass), Cell>,
        BTreeMap<(usize, LabelClass), Cell>,
    ),
    HptError,
> {
    let mut tr = Transfer::new(m, i, g, h_dim);
    let mut en = TreeEnumerator::new(&m.labels, limit);
    let mut mm = BTreeMap::new();
    let mut ii = BTreeMap::new();
    for (k, b) in m.trunc.cells(&m.labels)? {
        if k == 1 && b.is_zero() {
            continue;
        }
        let mut x = Cell::new();
        for t in en.trees(k, &b)?.iter() {
            for (tu, v) in tr.inner_of(t) {
                cell_add_scaled(&mut x, tu, &v, &Poly::one());
            }
        }
        mm.insert((k, b.clone()), map_cell(&x, pi));
        ii.insert((k, b), map_cell(&x, g));
    }
    Ok((mm, ii))
}

/// The minimal model `(m, 𝔦)` on `H` of `m̌` on `C` by summing over trees.
pub fn minimal_model(
    m: &OperatorSystem,
    g: &Contraction,
) -> Result<(OperatorSystem, OperatorSystem), HptError> {
    minimal_model_limited(m, g, m.labels.limit)
}

pub fn minimal_model_limited(
    m: &OperatorSystem,
    g: &Contraction,
    limit: usize,
) -> Result<(OperatorSystem, OperatorSystem), HptError> {
    let delta = g.validate(&m.linear_part())?;
    let (mm, ii) = transfer_by_trees(m, &g.i, &g.pi, &g.g, g.h.dim(), limit)?;
    Ok(assemble(m, g, &delta, mm, ii))
}

fn assemble(
    m: &OperatorSystem,
    g: &Contraction,
    delta: &LinMap,
    mm: BTreeMap<(usize, LabelClass), Cell>,
    ii: BTreeMap<(usize, LabelClass), Cell>,
) -> (OperatorSystem, OperatorSystem) {
    let mut out = OperatorSystem::from_linear(
        OpKind::Algebra,
        delta,
        g.h.clone(),
        g.h.clone(),
        m.labels.clone(),
        m.trunc.clone(),
    );
    let mut inc = OperatorSystem::from_linear(
        OpKind::Homomorphism,
        &g.i,
        g.h.clone(),
        g.c.clone(),
        m.labels.clone(),
        m.trunc.clone(),
    );
    for ((k, b), c) in mm {
        out.add_cell(k, &b, &c);
    }
    for ((k, b), c) in ii {
        inc.add_cell(k, &b, &c);
    }
    (out, inc)
}

/// The same minimal model from the recursion `𝔦 = i + G(m̌′ ⋄ 𝔦)`,
/// `m = δ + π(m̌′ ⋄ 𝔦)`, where `m̌′` omits `m̌_{1,0}`.
pub fn minimal_model_recursive(
    m: &OperatorSystem,
    g: &Contraction,
) -> Result<(OperatorSystem, OperatorSystem), HptError> {
    let delta = g.validate(&m.linear_part())?;
    let zero = m.labels.zero();
    let mut mprime = m.clone();
    mprime.remove_cell(1, &zero);
    let mut inc = OperatorSystem::from_linear(
        OpKind::Homomorphism,
        &g.i,
        g.h.clone(),
        g.c.clone(),
        m.labels.clone(),
        m.trunc.clone(),
    );
    let mut mm = BTreeMap::new();
    for (k, b) in m.trunc.cells(&m.labels)? {
        if k == 1 && b.is_zero() {
            continue;
        }
        let x = diamond_cell(&mprime, &inc, k, &b);
        inc.add_cell(k, &b, &map_cell(&x, &g.g));
        mm.insert((k, b), map_cell(&x, &g.pi));
    }
    let mut out = OperatorSystem::from_linear(
        OpKind::Algebra,
        &delta,
        g.h.clone(),
        g.h.clone(),
        m.labels.clone(),
        m.trunc.clone(),
    );
    for ((k, b), c) in mm {
        out.add_cell(k, &b, &c);
    }
    Ok((out, inc))
}

/// `V ⊕ ds·V` with `ds·x` of degree `deg x + 1`, stored at index `dim V + x`.
pub fn doubled_space(v: &GradedSpace) -> GradedSpace {
    let n = v.dim();
    let mut names = v.names.clone();
    names.extend(v.names.iter().map(|x| format!("ds*{x}")));
    let mut degrees = v.degrees.clone();
    degrees.extend(v.degrees.iter().map(|d| d + 1));
    let mut out = GradedSpace::new(names, degrees);
    out.unit = v.unit;
    out.h1_basis = v.h1_basis.clone();
    out.h2_basis = v.h2_basis.clone();
    out.pairing = v.pairing.clone();
    debug_assert_eq!(out.dim(), 2 * n);
    out
}

/// `A_P = 1⊗a + ds⊗a′` on doubled spaces, with `A_P(ds·x) = (−1)^e ds·a(x)`.
pub fn lift_map(a: &LinMap, a_ds: &LinMap, degree: i64) -> LinMap {
    let (rows, cols) = (a.rows, a.ncols());
    let sign = if degree.rem_euclid(2) == 0 {
        Poly::one()
    } else {
        -&Poly::one()
    };
    let mut out = LinMap::zero(2 * rows, 2 * cols);
    for c in 0..cols {
        let mut col = a.cols[c].clone();
        for (r, x) in &a_ds.cols[c] {
            svec_add_scaled(&mut col, &svec_unit(rows + r), x);
        }
        out.cols[c] = col;
        let mut dcol = SVec::new();
        for (r, x) in &a.cols[c] {
            svec_add_scaled(&mut dcol, &svec_unit(rows + r), &(&sign * x));
        }
        out.cols[cols + c] = dcol;
    }
    out
}

/// `d_P = 1⊗d + ds⊗∂_s` applied to a vector with polynomial coefficients.
pub fn apply_dp(d: &LinMap, v: &SVec) -> SVec {
    let n = d.ncols();
    let mut out = SVec::new();
    for (i, x) in v {
        if *i < n {
            svec_add_scaled(&mut out, &d.cols[*i], x);
            let dx = x.derivative();
            if !dx.is_zero() {
                svec_add_scaled(&mut out, &svec_unit(n + i), &dx);
            }
        } else {
            for (r, y) in &d.cols[i - n] {
                svec_add_scaled(&mut out, &svec_unit(n + r), &-&(y * x));
            }
        }
    }
    out
}

/// A contraction depending polynomially on `s`, with the `ds`-parts of the
/// lifted maps: `i_P = 1⊗i_s + ds⊗h_s`, `π_P = 1⊗π_s + ds⊗k_s`,
/// `G_P = 1⊗G_s + ds⊗σ_s`.
#[derive(Clone, Debug)]
pub struct FamilyContraction {
    pub h: Arc<GradedSpace>,
    pub c: Arc<GradedSpace>,
    pub i: LinMap,
    pub pi: LinMap,
    pub g: LinMap,
    pub h_ds: LinMap,
    pub k_ds: LinMap,
    pub sigma: LinMap,
}

impl FamilyContraction {
    /// The constant family.
    pub fn constant(g: &Contraction) -> Self {
        let (nh, nc) = (g.h.dim(), g.c.dim());
        FamilyContraction {
            h: g.h.clone(),
            c: g.c.clone(),
            i: g.i.clone(),
            pi: g.pi.clone(),
            g: g.g.clone(),
            h_ds: LinMap::zero(nc, nh),
            k_ds: LinMap::zero(nh, nc),
            sigma: LinMap::zero(nc, nc),
        }
    }

    /// Conjugation of a strong contraction by `φ_s = id + sN` with
    /// `N = dK + Kd`, `N² = 0`.
    pub fn linear_deformation(g: &Contraction, d: &LinMap, k: &LinMap) -> Result<Self, HptError> {
        let nc = g.c.dim();
        let nmat = d.compose(k).add(&k.compose(d));
        if !nmat.compose(&nmat).is_zero() {
            return Err(HptError::ContractionInvalid(
                "N = dK + Kd must square to zero".into(),
            ));
        }
        let s = Poly::s();
        let id = LinMap::identity(nc);
        let phi = id.add(&nmat.scale(&s));
        let phi_inv = id.sub(&nmat.scale(&s));
        let i = phi.compose(&g.i);
        let pi = g.pi.compose(&phi_inv);
        let gs = phi.compose(&g.g).compose(&phi_inv);
        let h_ds = k.compose(&i);
        let k_ds = pi.compose(k).scale(&-&Poly::one());
        let sigma = k.compose(&gs).add(&gs.compose(k));
        Ok(FamilyContraction {
            h: g.h.clone(),
            c: g.c.clone(),
            i,
            pi,
            g: gs,
            h_ds,
            k_ds,
            sigma,
        })
    }

    pub fn at(&self, s0: &crate::novikov::Q) -> Contraction {
        let ev = |l: &LinMap| l.map_coeffs(|p| Poly::constant(p.eval(s0)));
        Contraction {
            h: self.h.clone(),
            c: self.c.clone(),
            i: ev(&self.i),
            pi: ev(&self.pi),
            g: ev(&self.g),
            strong: true,
        }
    }

    pub fn lifted(&self) -> (LinMap, LinMap, LinMap) {
        (
            lift_map(&self.i, &self.h_ds, 0),
            lift_map(&self.pi, &self.k_ds, 0),
            lift_map(&self.g, &self.sigma, -1),
        )
    }

    /// Checks the contraction identities on `C_P` against `d_P`, pointwise
    /// strongness, and that `π_P d_P i_P` is the natural differential of `H_P`.
    /// Returns `δ_s = π_s d i_s`.
    pub fn validate(&self, d: &LinMap) -> Result<LinMap, HptError> {
        let bad = |m: &str| Err(HptError::ContractionInvalid(m.into()));
        let (nh, nc) = (self.h.dim(), self.c.dim());
        let (ip, pp, gp) = self.lifted();
        let delta = self.pi.compose(d).compose(&self.i);
        if !delta.is_constant() {
            return bad("δ_s depends on s");
        }
        if self.pi.compose(&self.i) != LinMap::identity(nh)
            || !self.g.compose(&self.g).is_zero()
            || !self.g.compose(&self.i).is_zero()
            || !self.pi.compose(&self.g).is_zero()
        {
            return bad("side conditions fail for some s");
        }
        for e in 0..2 * nh {
            let ie = ip.apply(&svec_unit(e));
            let dpi = apply_dp(d, &ie);
            let de = pp.apply(&dpi);
            if de != apply_dp(&delta, &svec_unit(e)) {
                return bad("π_P d_P i_P is not the natural differential");
            }
            if dpi != ip.apply(&de) {
                return bad("i_P is not a chain map");
            }
        }
        for e in 0..2 * nc {
            let v = svec_unit(e);
            let lhs = pp.apply(&apply_dp(d, &v));
            let rhs = apply_dp(&delta, &pp.apply(&v));
            if lhs != rhs {
                return bad("π_P is not a chain map");
            }
            let mut left = ip.apply(&pp.apply(&v));
            svec_add_scaled(&mut left, &v, &-&Poly::one());
            let mut right = apply_dp(d, &gp.apply(&v));
            svec_add_scaled(&mut right, &gp.apply(&apply_dp(d, &v)), &Poly::one());
            if left != right {
                return bad("i_P π_P − id ≠ d_P G_P + G_P d_P");
            }
        }
        Ok(delta)
    }
}

/// `M̌` written as one system on `C_P`, without `M̌_{1,0}`.
pub fn lift_isotopy(m: &PseudoIsotopy, cp: Arc<GradedSpace>) -> OperatorSystem {
    let c = &m.m.source;
    let n = c.dim();
    let mut out = OperatorSystem::new(
        OpKind::Algebra,
        cp.clone(),
        cp,
        m.m.labels.clone(),
        m.m.trunc.clone(),
    );
    for ((k, b), cell) in m.m.cells() {
        if *k == 1 && b.is_zero() {
            continue;
        }
        for (t, v) in cell {
            out.add_vec(*k, b, t.clone(), v);
            let mut prefix = 0i64;
            for pos in 0..t.len() {
                let sign = if (1 + prefix).rem_euclid(2) == 0 {
                    Poly::one()
                } else {
                    -&Poly::one()
                };
                let mut tt = t.clone();
                tt[pos] += n;
                let mut w = SVec::new();
                for (r, x) in v {
                    svec_add_scaled(&mut w, &svec_unit(n + r), &(&sign * x));
                }
                out.add_vec(*k, b, tt, &w);
                prefix += c.degree(t[pos]) - 1;
            }
        }
    }
    for ((k, b), cell) in m.c.cells() {
        for (t, v) in cell {
            let mut w = SVec::new();
            for (r, x) in v {
                svec_add_scaled(&mut w, &svec_unit(n + r), x);
            }
            out.add_vec(*k, b, t.clone(), &w);
        }
    }
    out
}

/// The family minimal model: a pseudo-isotopy `M` on `H` with the
/// inclusion `𝕀: H_P → C_P` and its plain part `𝔦_s: H → C`.
#[derive(Clone, Debug)]
pub struct FamilyMinimalModel {
    pub m: PseudoIsotopy,
    pub inclusion: OperatorSystem,
    pub inclusion_plain: OperatorSystem,
}

pub fn family_minimal_model(
    m: &PseudoIsotopy,
    g: &FamilyContraction,
) -> Result<FamilyMinimalModel, HptError> {
    let d = m.m.linear_part();
    let delta = g.validate(&d)?;
    let (nh, nc) = (g.h.dim(), g.c.dim());
    let hp = Arc::new(doubled_space(&g.h));
    let cp = Arc::new(doubled_space(&g.c));
    let lifted = lift_isotopy(m, cp.clone());
    let (ip, pp, gp) = g.lifted();
    let (mm, ii) = transfer_by_trees(&lifted, &ip, &pp, &gp, 2 * nh, m.m.labels.limit)?;
    let labels = m.m.labels.clone();
    let trunc = m.m.trunc.clone();
    let mut ms = OperatorSystem::from_linear(
        OpKind::Algebra,
        &delta,
        g.h.clone(),
        g.h.clone(),
        labels.clone(),
        trunc.clone(),
    );
    let mut cs = OperatorSystem::new(
        OpKind::IsotopyPart,
        g.h.clone(),
        g.h.clone(),
        labels.clone(),
        trunc.clone(),
    );
    let mut inclusion = OperatorSystem::from_linear(
        OpKind::Homomorphism,
        &ip,
        hp.clone(),
        cp.clone(),
        labels.clone(),
        trunc.clone(),
    );
    let mut plain = OperatorSystem::from_linear(
        OpKind::Homomorphism,
        &g.i,
        g.h.clone(),
        g.c.clone(),
        labels.clone(),
        trunc.clone(),
    );
    // The ds-part of π_P d_P i_P beyond ∂_s.
    let zero = labels.zero();
    for e in 0..nh {
        let v = pp.apply(&apply_dp(&d, &ip.apply(&svec_unit(e))));
        for (r, x) in v {
            if r >= nh {
                cs.add_entry(1, &zero, vec![e], r - nh, &x);
            }
        }
    }
    for ((k, b), cell) in mm {
        for (t, v) in cell {
            if t.iter().any(|&x| x >= nh) {
                continue;
            }
            for (r, x) in v {
                if r < nh {
                    ms.add_entry(k, &b, t.clone(), r, &x);
                } else {
                    cs.add_entry(k, &b, t.clone(), r - nh, &x);
                }
            }
        }
    }
    for ((k, b), cell) in ii {
        inclusion.add_cell(k, &b, &cell);
        for (t, v) in cell {
            if t.iter().all(|&x| x < nh) {
                for (r, x) in v {
                    if r < nc {
                        plain.add_entry(k, &b, t.clone(), r, &x);
                    }
                }
            }
        }
    }
    Ok(FamilyMinimalModel {
        m: PseudoIsotopy { m: ms, c: cs },
        inclusion,
        inclusion_plain: plain,
    })
}
