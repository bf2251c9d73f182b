//! Order-by-order solvers: transport of structure along a homomorphism and
//! strict inversion of homomorphisms with invertible linear part.

use super::calculus::{brace_cell, diamond_cell};
use super::space::{svec_unit, LinMap};
use super::system::{
    cell_postcompose, cell_sub, precompose_cell, row_index, Cell, OpKind, OperatorSystem,
};
use super::AlgebraError;

/// Given an A∞ structure `m` on the target of `u`, returns the unique `m′` on
/// the source with `m ⋄ u = u{m′}`.
pub fn transport_structure(
    m: &OperatorSystem,
    u: &OperatorSystem,
) -> Result<OperatorSystem, AlgebraError> {
    m.check_compatible(u)?;
    if !super::space::same_space(&u.target, &m.source) {
        return Err(AlgebraError::ShapeMismatch(
            "u must land in the space of m".into(),
        ));
    }
    let zero = u.labels.zero();
    if u.cell(0, &zero).is_some() {
        return Err(AlgebraError::ShapeMismatch("u_{0,0} must vanish".into()));
    }
    let inv = u
        .linear_part()
        .inverse()
        .ok_or(AlgebraError::NonInvertibleLinearPart)?;
    let mut mp = OperatorSystem::new(
        OpKind::Algebra,
        u.source.clone(),
        u.source.clone(),
        u.labels.clone(),
        u.trunc.clone(),
    );
    for (k, b) in u.trunc.cells(&u.labels)? {
        let lhs = diamond_cell(m, u, k, &b);
        let known = brace_cell(u, &mp, k, &b);
        let rhs = cell_sub(&lhs, &known);
        let cell = cell_postcompose(&rhs, &inv);
        mp.set_cell(k, &b, cell);
    }
    Ok(mp)
}

/// The strict inverse `g` of a homomorphism `f` with invertible `f_{1,0}`:
/// `g ⋄ f = id` and, consequently, `f ⋄ g = id`.
pub fn invert_homomorphism(f: &OperatorSystem) -> Result<OperatorSystem, AlgebraError> {
    let lin = f.linear_part();
    let inv = lin.inverse().ok_or(AlgebraError::NonInvertibleLinearPart)?;
    let rows = row_index(&inv);
    let mut g = OperatorSystem::new(
        OpKind::Homomorphism,
        f.target.clone(),
        f.source.clone(),
        f.labels.clone(),
        f.trunc.clone(),
    );
    for (k, b) in f.trunc.cells(&f.labels)? {
        let others = diamond_cell(&g, f, k, &b);
        let mut want = Cell::new();
        if k == 1 && b.is_zero() {
            for i in 0..f.source.dim() {
                want.insert(vec![i], svec_unit(i));
            }
        }
        let rhs = cell_sub(&want, &others);
        // g_{k,β}(f_{1,0}x_1, …, f_{1,0}x_k) = rhs(x)  ⇒  g_{k,β} = rhs ∘ (f_{1,0}^{-1})^{⊗k}.
        let cell = precompose_cell(&rhs, &rows);
        g.set_cell(k, &b, cell);
    }
    Ok(g)
}

/// Conjugation of a structure by a linear isomorphism `A: H → C`:
/// `A^{-1} ∘ m ∘ (A ⊗ ⋯ ⊗ A)`.
pub fn conjugate(
    m: &OperatorSystem,
    a: &LinMap,
    new_space: std::sync::Arc<super::space::GradedSpace>,
) -> Result<OperatorSystem, AlgebraError> {
    let inv = a.inverse().ok_or(AlgebraError::NonInvertibleLinearPart)?;
    Ok(m.precompose(a, new_space.clone())
        .postcompose(&inv, new_space))
}
