//! The brace and diamond operations, their single-cell variants, and defects.

use std::collections::BTreeMap;

use crate::labels::LabelClass;
use crate::poly::Poly;

use super::space::{same_space, svec_scale};
use super::system::{cell_add_scaled, Cell, Key, OpKind, OperatorSystem, Tuple};
use super::AlgebraError;

type OutputIndex<'a> = BTreeMap<usize, Vec<(usize, &'a LabelClass, &'a Tuple, &'a Poly)>>;

/// Entries of a system grouped by output basis index.
fn index_by_output(s: &OperatorSystem) -> OutputIndex<'_> {
    let mut idx: OutputIndex = BTreeMap::new();
    for ((k, b), cell) in s.cells() {
        for (t, v) in cell {
            for (o, c) in v {
                idx.entry(*o).or_default().push((*k, b, t, c));
            }
        }
    }
    idx
}

/// `g{h}`: the sum of single insertions of `h` into `g`, with the sign
/// `(−1)^{deg′h · Σ_{i<λ} deg′x_i}` for insertion at slot `λ`.
pub fn brace(g: &OperatorSystem, h: &OperatorSystem) -> Result<OperatorSystem, AlgebraError> {
    check_brace(g, h)?;
    let mut out = result_shell(
        g,
        h.source.clone(),
        OpKind::from_offset(g.kind.offset() + h.kind.offset() - 1),
    );
    let mut acc: BTreeMap<Key, Cell> = BTreeMap::new();
    brace_impl(g, h, None, &mut acc);
    for ((k, b), cell) in acc {
        out.add_cell(k, &b, &cell);
    }
    Ok(out)
}

/// The `(k, β)` component of `g{h}`.
pub fn brace_cell(g: &OperatorSystem, h: &OperatorSystem, k: usize, b: &LabelClass) -> Cell {
    let mut acc = BTreeMap::new();
    let key = (k, b.clone());
    brace_impl(g, h, Some(&key), &mut acc);
    acc.remove(&key).unwrap_or_default()
}

fn check_brace(g: &OperatorSystem, h: &OperatorSystem) -> Result<(), AlgebraError> {
    g.check_compatible(h)?;
    if !same_space(&h.source, &h.target) || !same_space(&h.target, &g.source) {
        return Err(AlgebraError::ShapeMismatch(
            "brace needs h: C → C and g defined on C".into(),
        ));
    }
    Ok(())
}

fn result_shell(
    g: &OperatorSystem,
    source: std::sync::Arc<super::space::GradedSpace>,
    kind: OpKind,
) -> OperatorSystem {
    OperatorSystem::new(
        kind,
        source,
        g.target.clone(),
        g.labels.clone(),
        g.trunc.clone(),
    )
}

fn brace_impl(
    g: &OperatorSystem,
    h: &OperatorSystem,
    target: Option<&Key>,
    acc: &mut BTreeMap<Key, Cell>,
) {
    let hpar = h.parity();
    let space = &g.source;
    // h entries by (cell, output index).
    let mut hidx: BTreeMap<&Key, BTreeMap<usize, Vec<(&Tuple, &Poly)>>> = BTreeMap::new();
    for (key, cell) in h.cells() {
        let m = hidx.entry(key).or_default();
        for (t, v) in cell {
            for (o, c) in v {
                m.entry(*o).or_default().push((t, c));
            }
        }
    }
    for ((a, b1), gcell) in g.cells() {
        if *a == 0 {
            continue;
        }
        for (hkey, hmap) in &hidx {
            let (nu, b2) = (hkey.0, &hkey.1);
            let k = a - 1 + nu;
            let b = b1.add(b2);
            if let Some((tk, tb)) = target {
                if *tk != k || *tb != b {
                    continue;
                }
            } else if !g.admits(k, &b) {
                continue;
            }
            let out = acc.entry((k, b)).or_default();
            for (u, outg) in gcell {
                let mut prefix = 0u8;
                for p in 0..*a {
                    if let Some(list) = hmap.get(&u[p]) {
                        let neg = hpar == 1 && prefix == 1;
                        for (w, c) in list {
                            let mut tuple = Vec::with_capacity(k);
                            tuple.extend_from_slice(&u[..p]);
                            tuple.extend_from_slice(w);
                            tuple.extend_from_slice(&u[p + 1..]);
                            let coef = if neg { -*c } else { (*c).clone() };
                            cell_add_scaled(out, tuple, outg, &coef);
                        }
                    }
                    prefix ^= space.shifted_parity(u[p]);
                }
            }
        }
    }
    acc.retain(|_, c| !c.is_empty());
}

/// `g ⋄ f = Σ g_{ℓ,β_0} ∘ (f_{k_1,β_1} ⊗ ⋯ ⊗ f_{k_ℓ,β_ℓ})` with the Koszul sign
/// `(−1)^{deg′f · Σ(earlier inputs)}` on each slot.
pub fn diamond(g: &OperatorSystem, f: &OperatorSystem) -> Result<OperatorSystem, AlgebraError> {
    check_diamond(g, f)?;
    let kind = if f.kind == OpKind::Homomorphism {
        g.kind
    } else {
        OpKind::Other(g.kind.offset())
    };
    let mut out = result_shell(g, f.source.clone(), kind);
    let mut acc = BTreeMap::new();
    Composer::new(g, f, None).run(None, &mut acc);
    for ((k, b), cell) in acc {
        out.add_cell(k, &b, &cell);
    }
    Ok(out)
}

pub fn diamond_cell(g: &OperatorSystem, f: &OperatorSystem, k: usize, b: &LabelClass) -> Cell {
    let mut acc = BTreeMap::new();
    let key = (k, b.clone());
    Composer::new(g, f, None).run(Some(&key), &mut acc);
    acc.remove(&key).unwrap_or_default()
}

/// `Σ g ∘ (f ⊗ ⋯ ⊗ f ⊗ h ⊗ f ⊗ ⋯ ⊗ f)` with exactly one slot filled by `h`.
pub fn diamond_insert(
    g: &OperatorSystem,
    f: &OperatorSystem,
    h: &OperatorSystem,
) -> Result<OperatorSystem, AlgebraError> {
    check_diamond(g, f)?;
    f.check_compatible(h)?;
    if !same_space(&f.source, &h.source) || !same_space(&f.target, &h.target) {
        return Err(AlgebraError::ShapeMismatch(
            "inserted system must have the shape of f".into(),
        ));
    }
    let kind = OpKind::from_offset(g.kind.offset() + h.kind.offset() - 1);
    let mut out = result_shell(g, f.source.clone(), kind);
    let mut acc = BTreeMap::new();
    Composer::new(g, f, Some(h)).run(None, &mut acc);
    for ((k, b), cell) in acc {
        out.add_cell(k, &b, &cell);
    }
    Ok(out)
}

pub fn diamond_insert_cell(
    g: &OperatorSystem,
    f: &OperatorSystem,
    h: &OperatorSystem,
    k: usize,
    b: &LabelClass,
) -> Cell {
    let mut acc = BTreeMap::new();
    let key = (k, b.clone());
    Composer::new(g, f, Some(h)).run(Some(&key), &mut acc);
    acc.remove(&key).unwrap_or_default()
}

fn check_diamond(g: &OperatorSystem, f: &OperatorSystem) -> Result<(), AlgebraError> {
    g.check_compatible(f)?;
    if !same_space(&f.target, &g.source) {
        return Err(AlgebraError::ShapeMismatch(
            "diamond needs target(f) = source(g)".into(),
        ));
    }
    Ok(())
}

struct Composer<'a> {
    g: &'a OperatorSystem,
    fidx: OutputIndex<'a>,
    hidx: Option<OutputIndex<'a>>,
    fpar: u8,
    hpar: u8,
    src: &'a super::space::GradedSpace,
}

struct Goal<'a> {
    k: usize,
    b: &'a LabelClass,
}

impl<'a> Composer<'a> {
    fn new(g: &'a OperatorSystem, f: &'a OperatorSystem, h: Option<&'a OperatorSystem>) -> Self {
        Composer {
            g,
            fidx: index_by_output(f),
            hidx: h.map(index_by_output),
            fpar: f.parity(),
            hpar: h.map_or(0, |h| h.parity()),
            src: &f.source,
        }
    }

    fn run(&self, target: Option<&Key>, acc: &mut BTreeMap<Key, Cell>) {
        let labels = &self.g.labels;
        for ((l, b0), gcell) in self.g.cells() {
            let goal = match target {
                Some((tk, tb)) => {
                    let Some(rest) = tb.checked_sub(b0) else {
                        continue;
                    };
                    // Every slot carries weight at least one.
                    if *l > tk + rest.size() as usize {
                        continue;
                    }
                    Some((Goal { k: *tk, b: tb }, rest))
                }
                None => None,
            };
            for (u, outg) in gcell {
                let mut st = State {
                    tuple: Vec::new(),
                    coef: Poly::one(),
                    k: 0,
                    beta: labels.zero(),
                    parity: 0,
                    used_h: false,
                };
                let goal_ref = goal.as_ref().map(|(g, r)| (g, r));
                self.fill(u, outg, b0, 0, &mut st, goal_ref, acc);
            }
        }
        acc.retain(|_, c| !c.is_empty());
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        &self,
        u: &Tuple,
        outg: &super::space::SVec,
        b0: &LabelClass,
        slot: usize,
        st: &mut State,
        goal: Option<(&Goal, &LabelClass)>,
        acc: &mut BTreeMap<Key, Cell>,
    ) {
        let l = u.len();
        if slot == l {
            if self.hidx.is_some() && !st.used_h {
                return;
            }
            let b = b0.add(&st.beta);
            match goal {
                Some((g, _)) => {
                    if st.k != g.k || &b != g.b {
                        return;
                    }
                }
                None => {
                    if !self.g.admits(st.k, &b) {
                        return;
                    }
                }
            }
            let out = acc.entry((st.k, b)).or_default();
            cell_add_scaled(out, st.tuple.clone(), outg, &st.coef);
            return;
        }
        let remaining = l - slot - 1;
        let t = u[slot];
        let mut try_list = |list: &Vec<(usize, &LabelClass, &Tuple, &Poly)>,
                            par: u8,
                            is_h: bool,
                            st: &mut State| {
            for (ki, bi, w, c) in list {
                let nb = st.beta.add(bi);
                let nk = st.k + ki;
                match goal {
                    Some((g, rest)) => {
                        if !nb.le(rest)
                            || nk > g.k
                            || nk + remaining > g.k + (rest.size() - nb.size()) as usize
                        {
                            continue;
                        }
                    }
                    None => {
                        let total = b0.add(&nb);
                        let w_total = nk + total.size() as usize + remaining;
                        if w_total > self.g.trunc.weight_cap as usize
                            || !self
                                .g
                                .trunc
                                .context
                                .admits(&self.g.labels.energy_of(&total))
                        {
                            continue;
                        }
                    }
                }
                let neg = par == 1 && st.parity == 1;
                let saved = (
                    st.tuple.len(),
                    st.coef.clone(),
                    st.k,
                    st.beta.clone(),
                    st.parity,
                    st.used_h,
                );
                st.tuple.extend_from_slice(w);
                st.coef = &st.coef * c;
                if neg {
                    st.coef = -&st.coef;
                }
                st.k = nk;
                st.beta = nb;
                for &x in w.iter() {
                    st.parity ^= self.src.shifted_parity(x);
                }
                st.used_h |= is_h;
                self.fill(u, outg, b0, slot + 1, st, goal, acc);
                st.tuple.truncate(saved.0);
                st.coef = saved.1;
                st.k = saved.2;
                st.beta = saved.3;
                st.parity = saved.4;
                st.used_h = saved.5;
            }
        };
        if let Some(list) = self.fidx.get(&t) {
            try_list(list, self.fpar, false, st);
        }
        if let Some(hidx) = &self.hidx {
            if !st.used_h {
                if let Some(list) = hidx.get(&t) {
                    try_list(list, self.hpar, true, st);
                }
            }
        }
    }
}

struct State {
    tuple: Tuple,
    coef: Poly,
    k: usize,
    beta: LabelClass,
    parity: u8,
    used_h: bool,
}

/// `m{m}`; zero up to the truncation exactly when `m` is A∞.
pub fn ainfty_defect(m: &OperatorSystem) -> Result<OperatorSystem, AlgebraError> {
    brace(m, m)
}

pub fn is_ainfty(m: &OperatorSystem) -> Result<bool, AlgebraError> {
    Ok(ainfty_defect(m)?.is_zero())
}

/// `m_tgt ⋄ f − f{m_src}`.
pub fn hom_defect(
    f: &OperatorSystem,
    m_src: &OperatorSystem,
    m_tgt: &OperatorSystem,
) -> Result<OperatorSystem, AlgebraError> {
    if !same_space(&m_src.source, &f.source) || !same_space(&m_tgt.source, &f.target) {
        return Err(AlgebraError::ShapeMismatch(
            "homomorphism does not connect the given algebras".into(),
        ));
    }
    let left = diamond(m_tgt, f)?;
    let right = brace(f, m_src)?;
    left.with_kind(OpKind::Other(2))
        .sub(&right.with_kind(OpKind::Other(2)))
}

/// The single-cell value of `m_tgt ⋄ f − f{m_src}`.
pub fn hom_defect_cell(
    f: &OperatorSystem,
    m_src: &OperatorSystem,
    m_tgt: &OperatorSystem,
    k: usize,
    b: &LabelClass,
) -> Cell {
    let left = diamond_cell(m_tgt, f, k, b);
    let right = brace_cell(f, m_src, k, b);
    super::system::cell_sub(&left, &right)
}

pub fn scale_cell(cell: &Cell, c: &Poly) -> Cell {
    cell.iter()
        .map(|(t, v)| (t.clone(), svec_scale(v, c)))
        .filter(|(_, v)| !v.is_empty())
        .collect()
}
