//! Labeled multilinear operator systems.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::labels::{LabelClass, LabelError, LabelGroup};
use crate::novikov::{Extended, NovikovContext, Q};
use crate::poly::Poly;

use super::space::{
    add_entry, same_space, svec_add_scaled, svec_map_coeffs, GradedSpace, LinMap, SVec,
};
use super::AlgebraError;

pub type Tuple = Vec<usize>;
pub type Key = (usize, LabelClass);
/// Entries of one `(k, β)` component: input tuple to output vector.
pub type Cell = BTreeMap<Tuple, SVec>;

/// Kind of a system, recorded through its degree offset: `deg t_{k,β} = offset − k − μ(β)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpKind {
    Algebra,
    Homomorphism,
    Homotopy,
    /// The reduced `ds`-part of a pseudo-isotopy, of degree `1 − k − μ(β)`.
    IsotopyPart,
    Other(i64),
}

impl OpKind {
    pub fn offset(self) -> i64 {
        match self {
            OpKind::Algebra => 2,
            OpKind::Homomorphism => 1,
            OpKind::Homotopy => 0,
            OpKind::IsotopyPart => 1,
            OpKind::Other(o) => o,
        }
    }

    pub fn from_offset(o: i64) -> Self {
        match o {
            2 => OpKind::Algebra,
            1 => OpKind::Homomorphism,
            0 => OpKind::Homotopy,
            o => OpKind::Other(o),
        }
    }

    /// Parity of the shifted degree of the operator.
    pub fn parity(self) -> u8 {
        (self.offset() - 1).rem_euclid(2) as u8
    }

    pub fn name(self) -> String {
        match self {
            OpKind::Algebra => "algebra".into(),
            OpKind::Homomorphism => "homomorphism".into(),
            OpKind::Homotopy => "homotopy".into(),
            OpKind::IsotopyPart => "isotopy".into(),
            OpKind::Other(o) => format!("offset{o}"),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "algebra" => Some(OpKind::Algebra),
            "homomorphism" => Some(OpKind::Homomorphism),
            "homotopy" => Some(OpKind::Homotopy),
            "isotopy" => Some(OpKind::IsotopyPart),
            other => other
                .strip_prefix("offset")?
                .parse()
                .ok()
                .map(OpKind::from_offset),
        }
    }
}

/// Which `(k, β)` components a system keeps: `E(β) ≤ E_max` and `k + |β| ≤ weight_cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub context: NovikovContext,
    pub weight_cap: u32,
}

impl Truncation {
    pub fn new(cutoff: Q, weight_cap: u32) -> Self {
        Truncation {
            context: NovikovContext::new(cutoff),
            weight_cap,
        }
    }

    pub fn cutoff(&self) -> &Q {
        &self.context.energy_cutoff
    }

    pub fn admits(&self, labels: &LabelGroup, k: usize, b: &LabelClass) -> bool {
        k as u64 + b.size() as u64 <= self.weight_cap as u64
            && self.context.admits(&labels.energy_of(b))
    }

    /// Energy below which a series assembled from the arity-`k` components is
    /// complete: the first effective energy above the cutoff, or the first
    /// energy of a class too large for the weight cap.
    pub fn series_precision(&self, labels: &LabelGroup, k: usize) -> Result<Extended, LabelError> {
        let mut p = match labels.horizon(self.cutoff())? {
            Some(h) => Extended::Finite(h),
            None => Extended::Infinity,
        };
        if let Some(e_min) = labels.generator_energies().into_iter().min() {
            let room = (self.weight_cap as i64 - k as i64 + 1).max(0);
            p = p.min(Extended::Finite(e_min * Q::from_integer(room.into())));
        }
        Ok(p)
    }

    /// Every admitted `(k, β)` except `(0, 0)`, ordered by `(E(β), β, k)`.
    pub fn cells(&self, labels: &LabelGroup) -> Result<Vec<Key>, LabelError> {
        let mut out = Vec::new();
        for b in labels.effective_classes(self.cutoff())? {
            let size = b.size();
            if size > self.weight_cap {
                continue;
            }
            let start = usize::from(b.is_zero());
            for k in start..=(self.weight_cap - size) as usize {
                out.push((k, b.clone()));
            }
        }
        Ok(out)
    }
}

/// One component `t_{k,β}` viewed on its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearOp {
    pub arity: usize,
    pub label: LabelClass,
    pub entries: Cell,
}

impl MultilinearOp {
    /// Multilinear evaluation on arbitrary vectors.
    pub fn apply(&self, inputs: &[SVec]) -> SVec {
        apply_cell(&self.entries, inputs)
    }
}

pub fn apply_cell(cell: &Cell, inputs: &[SVec]) -> SVec {
    let mut out = SVec::new();
    for (tuple, v) in cell {
        let mut c = Poly::one();
        for (slot, &i) in tuple.iter().enumerate() {
            match inputs[slot].get(&i) {
                Some(x) => c = &c * x,
                None => {
                    c = Poly::zero();
                    break;
                }
            }
        }
        svec_add_scaled(&mut out, v, &c);
    }
    out
}

#[derive(Clone, Debug)]
pub struct OperatorSystem {
    pub kind: OpKind,
    pub source: Arc<GradedSpace>,
    pub target: Arc<GradedSpace>,
    pub labels: Arc<LabelGroup>,
    pub trunc: Truncation,
    ops: BTreeMap<Key, Cell>,
}

impl PartialEq for OperatorSystem {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && same_space(&self.source, &other.source)
            && same_space(&self.target, &other.target)
            && self.ops == other.ops
    }
}

impl OperatorSystem {
    pub fn new(
        kind: OpKind,
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
        labels: Arc<LabelGroup>,
        trunc: Truncation,
    ) -> Self {
        OperatorSystem {
            kind,
            source,
            target,
            labels,
            trunc,
            ops: BTreeMap::new(),
        }
    }

    /// Empty system with the same spaces, labels and truncation.
    pub fn empty_like(&self, kind: OpKind) -> Self {
        OperatorSystem::new(
            kind,
            self.source.clone(),
            self.target.clone(),
            self.labels.clone(),
            self.trunc.clone(),
        )
    }

    pub fn identity(space: Arc<GradedSpace>, labels: Arc<LabelGroup>, trunc: Truncation) -> Self {
        let mut s = OperatorSystem::new(
            OpKind::Homomorphism,
            space.clone(),
            space.clone(),
            labels,
            trunc,
        );
        let zero = s.labels.zero();
        for i in 0..space.dim() {
            s.add_entry(1, &zero, vec![i], i, &Poly::one());
        }
        s
    }

    /// The system whose only component is the linear map `L` at `(1, 0)`.
    pub fn from_linear(
        kind: OpKind,
        l: &LinMap,
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
        labels: Arc<LabelGroup>,
        trunc: Truncation,
    ) -> Self {
        let mut s = OperatorSystem::new(kind, source, target, labels, trunc);
        let zero = s.labels.zero();
        for (c, col) in l.cols.iter().enumerate() {
            s.add_vec(1, &zero, vec![c], col);
        }
        s
    }

    pub fn parity(&self) -> u8 {
        self.kind.parity()
    }

    pub fn admits(&self, k: usize, b: &LabelClass) -> bool {
        self.trunc.admits(&self.labels, k, b)
    }

    /// Adds `coef · e_out` to `t_{k,β}(tuple)`; silently drops components
    /// outside the truncation.
    pub fn add_entry(&mut self, k: usize, b: &LabelClass, tuple: Tuple, out: usize, coef: &Poly) {
        let mut v = SVec::new();
        add_entry(&mut v, out, coef);
        self.add_vec(k, b, tuple, &v);
    }

    pub fn add_vec(&mut self, k: usize, b: &LabelClass, tuple: Tuple, v: &SVec) {
        debug_assert_eq!(tuple.len(), k);
        if v.is_empty() || !self.admits(k, b) {
            return;
        }
        let key = (k, b.clone());
        let cell = self.ops.entry(key.clone()).or_default();
        let slot = cell.entry(tuple.clone()).or_default();
        svec_add_scaled(slot, v, &Poly::one());
        if slot.is_empty() {
            cell.remove(&tuple);
        }
        if cell.is_empty() {
            self.ops.remove(&key);
        }
    }

    pub fn add_cell(&mut self, k: usize, b: &LabelClass, cell: &Cell) {
        for (t, v) in cell {
            self.add_vec(k, b, t.clone(), v);
        }
    }

    pub fn set_cell(&mut self, k: usize, b: &LabelClass, cell: Cell) {
        let key = (k, b.clone());
        self.ops.remove(&key);
        self.add_cell(k, b, &cell);
    }

    pub fn remove_cell(&mut self, k: usize, b: &LabelClass) -> Option<Cell> {
        self.ops.remove(&(k, b.clone()))
    }

    pub fn cell(&self, k: usize, b: &LabelClass) -> Option<&Cell> {
        self.ops.get(&(k, b.clone()))
    }

    pub fn op(&self, k: usize, b: &LabelClass) -> MultilinearOp {
        MultilinearOp {
            arity: k,
            label: b.clone(),
            entries: self.cell(k, b).cloned().unwrap_or_default(),
        }
    }

    pub fn entry(&self, k: usize, b: &LabelClass, tuple: &[usize]) -> Option<&SVec> {
        self.cell(k, b)?.get(tuple)
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Key, &Cell)> {
        self.ops.iter()
    }

    pub fn num_entries(&self) -> usize {
        self.ops.values().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.ops.is_empty()
    }

    /// First nonzero entry in `(k, β, tuple)` order.
    pub fn first_nonzero(&self) -> Option<(Key, Tuple, SVec)> {
        let (key, cell) = self.ops.iter().next()?;
        let (t, v) = cell.iter().next()?;
        Some((key.clone(), t.clone(), v.clone()))
    }

    /// Nonzero entry minimal by `(E(β), k)`.
    pub fn lowest_nonzero(&self) -> Option<(Key, Tuple, SVec)> {
        let (key, cell) = self.ops.iter().min_by(|a, b| {
            let ea = self.labels.energy_of(&a.0 .1);
            let eb = self.labels.energy_of(&b.0 .1);
            ea.cmp(&eb)
                .then(a.0 .0.cmp(&b.0 .0))
                .then(a.0 .1.cmp(&b.0 .1))
        })?;
        let (t, v) = cell.iter().next()?;
        Some((key.clone(), t.clone(), v.clone()))
    }

    pub fn check_compatible(&self, other: &OperatorSystem) -> Result<(), AlgebraError> {
        if *self.labels != *other.labels || self.trunc != other.trunc {
            return Err(AlgebraError::ShapeMismatch(
                "label groups or truncations differ".into(),
            ));
        }
        Ok(())
    }

    fn combine(&self, other: &OperatorSystem, c: &Poly) -> Result<OperatorSystem, AlgebraError> {
        self.check_compatible(other)?;
        if !same_space(&self.source, &other.source) || !same_space(&self.target, &other.target) {
            return Err(AlgebraError::ShapeMismatch("spaces differ".into()));
        }
        let mut out = self.clone();
        for ((k, b), cell) in &other.ops {
            for (t, v) in cell {
                let scaled = super::space::svec_scale(v, c);
                out.add_vec(*k, b, t.clone(), &scaled);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &OperatorSystem) -> Result<OperatorSystem, AlgebraError> {
        self.combine(other, &Poly::one())
    }

    pub fn sub(&self, other: &OperatorSystem) -> Result<OperatorSystem, AlgebraError> {
        self.combine(other, &Poly::constant(-Q::from_integer(1.into())))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> OperatorSystem {
        let mut out = self.empty_like(self.kind);
        for ((k, b), cell) in &self.ops {
            for (t, v) in cell {
                out.add_vec(*k, b, t.clone(), &svec_map_coeffs(v, &f));
            }
        }
        out
    }

    pub fn scale(&self, c: &Poly) -> OperatorSystem {
        self.map_coeffs(|x| x * c)
    }

    pub fn neg(&self) -> OperatorSystem {
        self.map_coeffs(|x| -x)
    }

    pub fn with_kind(mut self, kind: OpKind) -> OperatorSystem {
        self.kind = kind;
        self
    }

    /// Evaluation of every coefficient at `s = s0`.
    pub fn eval_at(&self, s0: &Q) -> OperatorSystem {
        self.map_coeffs(|p| Poly::constant(p.eval(s0)))
    }

    pub fn derivative(&self) -> OperatorSystem {
        self.map_coeffs(|p| p.derivative())
    }

    pub fn is_constant(&self) -> bool {
        self.ops
            .values()
            .all(|c| c.values().all(|v| v.values().all(|p| p.is_constant())))
    }

    /// Re-truncates to a new truncation, dropping components it excludes.
    pub fn with_truncation(&self, trunc: Truncation) -> OperatorSystem {
        let mut out = self.clone();
        out.trunc = trunc;
        let labels = out.labels.clone();
        out.ops.retain(|(k, b), _| out.trunc.admits(&labels, *k, b));
        out
    }

    /// Same entries over a different label group (with the same generators).
    pub fn with_labels(&self, labels: Arc<LabelGroup>) -> OperatorSystem {
        let mut out = self.clone();
        out.labels = labels;
        let l = out.labels.clone();
        out.ops.retain(|(k, b), _| out.trunc.admits(&l, *k, b));
        out
    }

    pub fn with_spaces(
        &self,
        source: Arc<GradedSpace>,
        target: Arc<GradedSpace>,
    ) -> OperatorSystem {
        let mut out = self.clone();
        out.source = source;
        out.target = target;
        out
    }

    /// The `(1, 0)` component as a linear map.
    pub fn linear_part(&self) -> LinMap {
        let mut l = LinMap::zero(self.target.dim(), self.source.dim());
        if let Some(cell) = self.cell(1, &self.labels.zero()) {
            for (t, v) in cell {
                l.cols[t[0]] = v.clone();
            }
        }
        l
    }

    /// `L ∘ t` for a linear map `L` from the target to `new_target`.
    pub fn postcompose(&self, l: &LinMap, new_target: Arc<GradedSpace>) -> OperatorSystem {
        let mut out = self.clone();
        out.target = new_target;
        out.ops.clear();
        for ((k, b), cell) in &self.ops {
            for (t, v) in cell {
                out.add_vec(*k, b, t.clone(), &l.apply(v));
            }
        }
        out
    }

    /// `t ∘ (L ⊗ ⋯ ⊗ L)` for an even linear map `L: new_source → source`.
    pub fn precompose(&self, l: &LinMap, new_source: Arc<GradedSpace>) -> OperatorSystem {
        let mut out = self.clone();
        out.source = new_source;
        out.ops.clear();
        let rows = row_index(l);
        for ((k, b), cell) in &self.ops {
            let pre = precompose_cell(cell, &rows);
            out.add_cell(*k, b, &pre);
        }
        out
    }

    /// Checks `deg t_{k,β}(x) = offset − k − μ(β) + Σ deg x_i` on every entry.
    pub fn validate_degrees(&self) -> Result<(), AlgebraError> {
        for ((k, b), cell) in &self.ops {
            let base = self.kind.offset() - *k as i64 - self.labels.maslov_of(b);
            for (t, v) in cell {
                let expect = base + t.iter().map(|&i| self.source.degree(i)).sum::<i64>();
                for &o in v.keys() {
                    if self.target.degree(o) != expect {
                        return Err(AlgebraError::DegreeViolation(format!(
                            "entry k={k} beta={b} in={t:?} out={o} has degree {} but {expect} is required",
                            self.target.degree(o)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Gappedness: nothing at `(0, 0)`; everything else holds by construction.
    pub fn is_gapped(&self) -> bool {
        self.cell(0, &self.labels.zero()).is_none()
    }

    /// Labels carrying at least one entry.
    pub fn support_labels(&self) -> Vec<LabelClass> {
        let mut v: Vec<LabelClass> = self.ops.keys().map(|(_, b)| b.clone()).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// For each source index of `L`'s codomain, the list of `(column, coef)` with `L[row][col] ≠ 0`.
pub fn row_index(l: &LinMap) -> Vec<Vec<(usize, Poly)>> {
    let mut rows = vec![Vec::new(); l.rows];
    for (c, col) in l.cols.iter().enumerate() {
        for (r, x) in col {
            rows[*r].push((c, x.clone()));
        }
    }
    rows
}

/// `cell ∘ (L ⊗ ⋯ ⊗ L)` given the row index of `L`.
pub fn precompose_cell(cell: &Cell, rows: &[Vec<(usize, Poly)>]) -> Cell {
    let mut out = Cell::new();
    for (t, v) in cell {
        let mut partial: Vec<(Tuple, Poly)> = vec![(Vec::with_capacity(t.len()), Poly::one())];
        for &i in t {
            let mut next = Vec::new();
            for (pre, c) in &partial {
                for (col, x) in &rows[i] {
                    let mut p = pre.clone();
                    p.push(*col);
                    next.push((p, c * x));
                }
            }
            partial = next;
        }
        for (tuple, c) in partial {
            let slot = out.entry(tuple.clone()).or_default();
            svec_add_scaled(slot, v, &c);
            if slot.is_empty() {
                out.remove(&tuple);
            }
        }
    }
    out
}

pub fn cell_add_scaled(acc: &mut Cell, tuple: Tuple, v: &SVec, c: &Poly) {
    if c.is_zero() || v.is_empty() {
        return;
    }
    let slot = acc.entry(tuple.clone()).or_default();
    svec_add_scaled(slot, v, c);
    if slot.is_empty() {
        acc.remove(&tuple);
    }
}

pub fn cell_sub(a: &Cell, b: &Cell) -> Cell {
    let mut out = a.clone();
    let m1 = Poly::constant(-Q::from_integer(1.into()));
    for (t, v) in b {
        cell_add_scaled(&mut out, t.clone(), v, &m1);
    }
    out
}

pub fn cell_postcompose(cell: &Cell, l: &LinMap) -> Cell {
    let mut out = Cell::new();
    for (t, v) in cell {
        let w = l.apply(v);
        cell_add_scaled(&mut out, t.clone(), &w, &Poly::one());
    }
    out
}

impl fmt::Display for OperatorSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((k, b), cell) in &self.ops {
            for (t, v) in cell {
                for (o, c) in v {
                    let beta: Vec<String> = b.0.iter().map(|x| x.to_string()).collect();
                    let ins: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                    writeln!(
                        f,
                        "k={k} beta={} in={} out={o} coef={c}",
                        beta.join(","),
                        ins.join(",")
                    )?;
                }
            }
        }
        Ok(())
    }
}
