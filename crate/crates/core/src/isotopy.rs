//! Pseudo-isotopies on `[0,1]`, the operator integral and ud-homotopies.

use std::fmt;

use num::Zero;
use thiserror::Error;

use crate::algebra::space::svec_unit;
use crate::algebra::system::cell_add_scaled;
use crate::algebra::{
    ainfty_defect, brace, brace_cell, check_ud_axioms, check_ud_axioms_with, diamond,
    diamond_insert_cell, hom_defect, AlgebraError, Cell, Key, OpKind, OperatorSystem, Tuple,
    UdReport,
};
use crate::labels::LabelError;
use crate::novikov::{fmt_q, Q};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsotopyError {
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(String, String),
    #[error("the reduced isotopy part has a linear (1,0) component")]
    LinearIsotopyPart,
    #[error("the homotopy has components with β = 0")]
    ZeroEnergyHomotopy,
    #[error("f is not a homomorphism between the given algebras")]
    NotAHomomorphism,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Label(#[from] LabelError),
}

/// `M = 1 ⊗ m^s + ds ⊗ c^s` in reduced form: `c` stores `c̃^s`, the part of
/// `c^s` other than `c^s_{1,0} = d/ds`.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoIsotopy {
    pub m: OperatorSystem,
    pub c: OperatorSystem,
}

impl PseudoIsotopy {
    pub fn new(m: OperatorSystem, c: OperatorSystem) -> Result<Self, IsotopyError> {
        m.check_compatible(&c)?;
        Ok(PseudoIsotopy {
            m: m.with_kind(OpKind::Algebra),
            c: c.with_kind(OpKind::IsotopyPart),
        })
    }

    /// The constant isotopy of `m`.
    pub fn trivial(m: &OperatorSystem) -> Self {
        PseudoIsotopy {
            m: m.clone(),
            c: m.empty_like(OpKind::IsotopyPart),
        }
    }

    /// The family `m^s` transported from `m` along a polynomial family of
    /// homomorphisms `u_s: m^s → m`, with `c̃^s = −(d/ds u_s^{-1}) ⋄ u_s`.
    pub fn from_transport(m: &OperatorSystem, u: &OperatorSystem) -> Result<Self, IsotopyError> {
        let ms = crate::algebra::transport_structure(m, u)?;
        let inv = crate::algebra::invert_homomorphism(u)?;
        let x = diamond(&inv.derivative(), u)?;
        Ok(PseudoIsotopy {
            m: ms,
            c: x.neg().with_kind(OpKind::IsotopyPart),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsotopyCondition {
    LinearPartConstant,
    AInfinity,
    Flow,
}

#[derive(Clone, Debug)]
pub struct IsotopyReport {
    /// First failing condition with its location.
    pub failure: Option<(IsotopyCondition, Key, Tuple)>,
}

impl IsotopyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for IsotopyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "pseudo-isotopy: PASS"),
            Some((c, (k, b), t)) => {
                write!(f, "pseudo-isotopy: FAIL {c:?} at k={k} beta={b} in={t:?}")
            }
        }
    }
}

/// The defect `d/ds m^s + c̃^s{m^s} − m^s{c̃^s}`.
pub fn flow_defect(m: &PseudoIsotopy) -> Result<OperatorSystem, IsotopyError> {
    let a = brace(&m.c, &m.m)?;
    let b = brace(&m.m, &m.c)?;
    Ok(m.m
        .derivative()
        .add(&a)?
        .sub(&b)?
        .with_kind(OpKind::Other(2)))
}

pub fn check_pseudo_isotopy(m: &PseudoIsotopy) -> Result<IsotopyReport, IsotopyError> {
    let zero = m.m.labels.zero();
    if let Some(cell) = m.m.cell(1, &zero) {
        for (t, v) in cell {
            if v.values().any(|p| !p.is_constant()) {
                return Ok(IsotopyReport {
                    failure: Some((IsotopyCondition::LinearPartConstant, (1, zero), t.clone())),
                });
            }
        }
    }
    if let Some((key, t, _)) = ainfty_defect(&m.m)?.lowest_nonzero() {
        return Ok(IsotopyReport {
            failure: Some((IsotopyCondition::AInfinity, key, t)),
        });
    }
    if let Some((key, t, _)) = flow_defect(m)?.lowest_nonzero() {
        return Ok(IsotopyReport {
            failure: Some((IsotopyCondition::Flow, key, t)),
        });
    }
    Ok(IsotopyReport { failure: None })
}

/// The algebra `m^{s0}`.
pub fn restrict(m: &PseudoIsotopy, s0: &Q) -> OperatorSystem {
    m.m.eval_at(s0)
}

/// `C^{[a,u]}` as a system with coefficients polynomial in `u`, solving
/// `d/du C = −c̃^u ⋄ C` with `C^{[a,a]} = id` order by order in `(E(β), k)`.
pub fn integrate_family(m: &PseudoIsotopy, a: &Q) -> Result<OperatorSystem, IsotopyError> {
    let zero = m.m.labels.zero();
    if m.c.cell(1, &zero).is_some() {
        return Err(IsotopyError::LinearIsotopyPart);
    }
    let space = m.m.source.clone();
    let mut c = OperatorSystem::new(
        OpKind::Homomorphism,
        space.clone(),
        space.clone(),
        m.m.labels.clone(),
        m.m.trunc.clone(),
    );
    for (k, b) in m.m.trunc.cells(&m.m.labels)? {
        if k == 1 && b.is_zero() {
            let mut cell = Cell::new();
            for i in 0..space.dim() {
                cell.insert(vec![i], svec_unit(i));
            }
            c.set_cell(1, &b, cell);
            continue;
        }
        let integrand = crate::algebra::diamond_cell(&m.c, &c, k, &b);
        let mut cell = Cell::new();
        for (t, v) in &integrand {
            let iv = v.iter().map(|(i, p)| (*i, -&p.integral_from(a))).collect();
            cell_add_scaled(&mut cell, t.clone(), &iv, &Poly::one());
        }
        c.set_cell(k, &b, cell);
    }
    Ok(c)
}

/// The homomorphism `C^{[a,b]}: m^a → m^b`.
pub fn integrate(m: &PseudoIsotopy, a: &Q, b: &Q) -> Result<OperatorSystem, IsotopyError> {
    if a > b || a < &Q::zero() || b > &Q::from_integer(1.into()) {
        return Err(IsotopyError::InvalidInterval(fmt_q(a), fmt_q(b)));
    }
    Ok(integrate_family(m, a)?.eval_at(b))
}

/// A family `f_s` of homomorphisms with a homotopy `h_s` between them.
#[derive(Clone, Debug)]
pub struct UdHomotopy {
    pub f: OperatorSystem,
    pub h: OperatorSystem,
}

impl UdHomotopy {
    /// The constant family at `f`.
    pub fn constant(f: &OperatorSystem) -> Self {
        UdHomotopy {
            f: f.clone(),
            h: f.empty_like(OpKind::Homotopy),
        }
    }

    /// Integrates `d/ds f_s = h_s{m_src} + Σ m_tgt(f_s, …, h_s, …, f_s)`
    /// from `f_0`. Every component of `h` must carry positive energy.
    pub fn from_flow(
        f0: &OperatorSystem,
        h: &OperatorSystem,
        m_src: &OperatorSystem,
        m_tgt: &OperatorSystem,
    ) -> Result<Self, IsotopyError> {
        if h.cells().any(|((_, b), _)| b.is_zero()) {
            return Err(IsotopyError::ZeroEnergyHomotopy);
        }
        let h = h.clone().with_kind(OpKind::Homotopy);
        let mut f = f0.clone().with_kind(OpKind::Homomorphism);
        let zero_poly = Q::zero();
        for (k, b) in f0.trunc.cells(&f0.labels)? {
            let mut rhs = brace_cell(&h, m_src, k, &b);
            for (t, v) in diamond_insert_cell(m_tgt, &f, &h, k, &b) {
                cell_add_scaled(&mut rhs, t, &v, &Poly::one());
            }
            if rhs.is_empty() {
                continue;
            }
            let mut cell = f.cell(k, &b).cloned().unwrap_or_default();
            for (t, v) in &rhs {
                let iv = v
                    .iter()
                    .map(|(i, p)| (*i, p.integral_from(&zero_poly)))
                    .collect();
                cell_add_scaled(&mut cell, t.clone(), &iv, &Poly::one());
            }
            f.set_cell(k, &b, cell);
        }
        Ok(UdHomotopy { f, h })
    }

    pub fn endpoint(&self, s: &Q) -> OperatorSystem {
        self.f.eval_at(s)
    }
}

#[derive(Clone, Debug)]
pub struct UdHomotopyReport {
    /// (a): the axioms of `f_s` and its homomorphism defect.
    pub f_axioms: UdReport,
    pub f_defect: Option<Key>,
    /// (b): first failure of the derivative equation.
    pub derivative: Option<Key>,
    /// (c) and (d): the axioms of `h_s`.
    pub h_axioms: UdReport,
}

impl UdHomotopyReport {
    pub fn passed(&self) -> bool {
        self.f_axioms.all_passed()
            && self.f_defect.is_none()
            && self.derivative.is_none()
            && self.h_axioms.all_passed()
    }
}

impl fmt::Display for UdHomotopyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let key = |k: &Option<Key>| match k {
            None => "PASS".to_string(),
            Some((k, b)) => format!("FAIL at k={k} beta={b}"),
        };
        writeln!(f, "(a) homomorphism: {}", key(&self.f_defect))?;
        write!(f, "{}", self.f_axioms)?;
        writeln!(f, "(b) derivative: {}", key(&self.derivative))?;
        write!(f, "{}", self.h_axioms)
    }
}

pub fn verify_ud_homotopy(
    hh: &UdHomotopy,
    m_src: &OperatorSystem,
    m_tgt: &OperatorSystem,
) -> Result<UdHomotopyReport, IsotopyError> {
    let d_src = m_src.linear_part();
    let f_axioms = check_ud_axioms_with(&hh.f, Some(&d_src));
    let f_defect = hom_defect(&hh.f, m_src, m_tgt)?
        .lowest_nonzero()
        .map(|x| x.0);
    let mut lhs = hh.f.derivative().with_kind(OpKind::Other(1));
    let rhs = brace(&hh.h, m_src)?;
    lhs = lhs.sub(&rhs)?;
    let mut ins = OperatorSystem::new(
        OpKind::Other(1),
        hh.f.source.clone(),
        hh.f.target.clone(),
        hh.f.labels.clone(),
        hh.f.trunc.clone(),
    );
    for (k, b) in hh.f.trunc.cells(&hh.f.labels)? {
        let cell = diamond_insert_cell(m_tgt, &hh.f, &hh.h, k, &b);
        ins.add_cell(k, &b, &cell);
    }
    let derivative = lhs.sub(&ins)?.lowest_nonzero().map(|x| x.0);
    let h_axioms = check_ud_axioms_with(&hh.h, Some(&d_src));
    Ok(UdHomotopyReport {
        f_axioms,
        f_defect,
        derivative,
        h_axioms,
    })
}

/// Strict inverse of a homomorphism `f: m_src → m_tgt` with invertible linear part.
pub fn invert_homomorphism(
    f: &OperatorSystem,
    m_src: &OperatorSystem,
    m_tgt: &OperatorSystem,
) -> Result<OperatorSystem, IsotopyError> {
    if !hom_defect(f, m_src, m_tgt)?.is_zero() {
        return Err(IsotopyError::NotAHomomorphism);
    }
    Ok(crate::algebra::invert_homomorphism(f)?)
}

/// Axiom report for a homomorphism produced by [`integrate`].
pub fn check_integral_ud(c: &OperatorSystem, m_a: &OperatorSystem) -> UdReport {
    check_ud_axioms_with(c, Some(&m_a.linear_part()))
}

/// Axiom report for `m^s` at a rational point.
pub fn check_restriction_ud(m: &PseudoIsotopy, s0: &Q) -> UdReport {
    check_ud_axioms(&restrict(m, s0))
}
