//! Unitality, cyclic unitality, divisor axiom, semipositivity and the
//! boundary-pairing condition for operator systems.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::labels::LabelClass;
use crate::poly::Poly;

use super::space::{add_entry, kernel, svec_add_scaled, svec_unit, LinMap, SVec};
use super::system::{Cell, OpKind, OperatorSystem, Tuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Degree,
    Gapped,
    UnitalityI,
    UnitalityII,
    UnitalityIII,
    CyclicUnitality,
    Divisor,
    Semipositivity,
    BoundaryPairing,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Degree => "degree",
            Axiom::Gapped => "gapped",
            Axiom::UnitalityI => "unitality-i",
            Axiom::UnitalityII => "unitality-ii",
            Axiom::UnitalityIII => "unitality-iii",
            Axiom::CyclicUnitality => "cyclic-unitality",
            Axiom::Divisor => "divisor",
            Axiom::Semipositivity => "semipositivity",
            Axiom::BoundaryPairing => "boundary-pairing",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub k: usize,
    pub beta: LabelClass,
    pub tuple: Tuple,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} beta={} in={:?}", self.k, self.beta, self.tuple)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    pub location: Option<Location>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UdReport {
    pub checks: Vec<AxiomCheck>,
}

impl UdReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    pub fn passed(&self, axiom: Axiom) -> bool {
        self.get(axiom).is_none_or(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn push(&mut self, axiom: Axiom, failure: Option<(Location, String)>) {
        let (passed, location, detail) = match failure {
            None => (true, None, String::new()),
            Some((l, d)) => (false, Some(l), d),
        };
        self.checks.push(AxiomCheck {
            axiom,
            passed,
            location,
            detail,
        });
    }
}

impl fmt::Display for UdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.location {
                None if c.passed => writeln!(f, "{}: pass", c.axiom.name())?,
                None => writeln!(f, "{}: FAIL {}", c.axiom.name(), c.detail)?,
                Some(l) => writeln!(f, "{}: FAIL at {l} {}", c.axiom.name(), c.detail)?,
            }
        }
        Ok(())
    }
}

/// Runs every applicable check. Degree-one cycles of the source are taken
/// from `t` itself for algebras and the whole of `C^1` otherwise.
pub fn check_ud_axioms(t: &OperatorSystem) -> UdReport {
    let d = if t.kind == OpKind::Algebra {
        Some(t.linear_part())
    } else {
        None
    };
    check_ud_axioms_with(t, d.as_ref())
}

/// As [`check_ud_axioms`], with the source differential given explicitly.
pub fn check_ud_axioms_with(t: &OperatorSystem, source_differential: Option<&LinMap>) -> UdReport {
    let mut r = UdReport::default();
    r.push(
        Axiom::Degree,
        t.validate_degrees().err().map(|e| {
            (
                Location {
                    k: 0,
                    beta: t.labels.zero(),
                    tuple: vec![],
                },
                e.to_string(),
            )
        }),
    );
    r.push(
        Axiom::Gapped,
        (!t.is_gapped()).then(|| {
            (
                Location {
                    k: 0,
                    beta: t.labels.zero(),
                    tuple: vec![],
                },
                "t_{0,0} ≠ 0".into(),
            )
        }),
    );
    check_unitality(t, &mut r);
    r.push(Axiom::CyclicUnitality, cyclic_unitality_failure(t));
    let cycles = degree_one_cycles(t, source_differential);
    r.push(Axiom::Divisor, divisor_failure(t, &cycles));
    r.push(Axiom::Semipositivity, semipositivity_failure(t));
    if t.kind == OpKind::Homomorphism {
        r.push(Axiom::BoundaryPairing, boundary_pairing_failure(t, &cycles));
    }
    r
}

fn loc(k: usize, beta: &LabelClass, tuple: &[usize]) -> Location {
    Location {
        k,
        beta: beta.clone(),
        tuple: tuple.to_vec(),
    }
}

fn check_unitality(t: &OperatorSystem, r: &mut UdReport) {
    let zero = t.labels.zero();
    let (Some(u), tgt_unit) = (t.source.unit, t.target.unit) else {
        let l = loc(0, &zero, &[]);
        r.push(Axiom::UnitalityI, Some((l, "no unit declared".into())));
        return;
    };
    match t.kind {
        OpKind::Algebra => {
            // (i) m_{1,0}(1) = 0
            let fail = t
                .entry(1, &zero, &[u])
                .map(|_| (loc(1, &zero, &[u]), "m_{1,0}(1) ≠ 0".into()));
            r.push(Axiom::UnitalityI, fail);
            // (ii) m_{2,0}(1,x) = x and m_{2,0}(x,1) = (−1)^{deg x} x
            let mut fail = None;
            if t.admits(2, &zero) {
                for x in 0..t.source.dim() {
                    let left = t.entry(2, &zero, &[u, x]).cloned().unwrap_or_default();
                    if left != svec_unit(x) {
                        fail = Some((loc(2, &zero, &[u, x]), "m_{2,0}(1,x) ≠ x".into()));
                        break;
                    }
                    let sign = if t.source.degree(x) % 2 == 0 {
                        Poly::one()
                    } else {
                        -&Poly::one()
                    };
                    let mut want = SVec::new();
                    add_entry(&mut want, x, &sign);
                    let right = t.entry(2, &zero, &[x, u]).cloned().unwrap_or_default();
                    if right != want {
                        fail = Some((
                            loc(2, &zero, &[x, u]),
                            "m_{2,0}(x,1) ≠ (−1)^{deg x} x".into(),
                        ));
                        break;
                    }
                }
            }
            r.push(Axiom::UnitalityII, fail);
            r.push(
                Axiom::UnitalityIII,
                unit_input_failure(t, u, |k, b| k == 2 && b.is_zero() || k == 1 && b.is_zero()),
            );
        }
        OpKind::Homomorphism => {
            let fail = match tgt_unit {
                None => Some((loc(1, &zero, &[u]), "target has no unit".into())),
                Some(v) => {
                    let got = t.entry(1, &zero, &[u]).cloned().unwrap_or_default();
                    (got != svec_unit(v)).then(|| (loc(1, &zero, &[u]), "f_{1,0}(1) ≠ 1".into()))
                }
            };
            r.push(Axiom::UnitalityI, fail);
            r.push(
                Axiom::UnitalityIII,
                unit_input_failure(t, u, |k, b| k == 1 && b.is_zero()),
            );
        }
        _ => {
            r.push(Axiom::UnitalityIII, unit_input_failure(t, u, |_, _| false));
        }
    }
}

/// First entry with the unit among its inputs, outside the exempt cells.
fn unit_input_failure(
    t: &OperatorSystem,
    u: usize,
    exempt: impl Fn(usize, &LabelClass) -> bool,
) -> Option<(Location, String)> {
    for ((k, b), cell) in t.cells() {
        if exempt(*k, b) {
            continue;
        }
        for tuple in cell.keys() {
            if tuple.contains(&u) {
                return Some((
                    loc(*k, b, tuple),
                    "nonzero value with the unit as an input".into(),
                ));
            }
        }
    }
    None
}

fn cyclic_unitality_failure(t: &OperatorSystem) -> Option<(Location, String)> {
    let src = &t.source;
    for e in src.basis_of_degree(0) {
        for ((k1, b), cell) in t.cells() {
            if *k1 == 0 || (*k1 == 1 && b.is_zero()) {
                continue;
            }
            let mut acc: Cell = BTreeMap::new();
            for (uvec, out) in cell {
                let mut prefix = 0u8;
                for (i, &x) in uvec.iter().enumerate() {
                    if x == e {
                        let mut rest = uvec.clone();
                        rest.remove(i);
                        let c = if prefix == 1 {
                            -&Poly::one()
                        } else {
                            Poly::one()
                        };
                        let slot = acc.entry(rest).or_default();
                        svec_add_scaled(slot, out, &c);
                    }
                    prefix ^= src.shifted_parity(x);
                }
            }
            if let Some((rest, _)) = acc.iter().find(|(_, v)| !v.is_empty()) {
                return Some((
                    loc(k1 - 1, b, rest),
                    format!("cyclic sum with e={e} is nonzero"),
                ));
            }
        }
    }
    None
}

/// Basis of `Z^1` of the source.
fn degree_one_cycles(t: &OperatorSystem, d: Option<&LinMap>) -> Vec<SVec> {
    let deg1 = t.source.basis_of_degree(1);
    match d {
        Some(d) => kernel(d, &deg1),
        None => deg1.into_iter().map(svec_unit).collect(),
    }
}

fn divisor_failure(t: &OperatorSystem, cycles: &[SVec]) -> Option<(Location, String)> {
    let src = &t.source;
    // Every (k, β) where either side of the identity can be nonzero, in order.
    let mut keys: BTreeSet<(usize, LabelClass)> = BTreeSet::new();
    for ((k, beta), _) in t.cells() {
        keys.insert((*k, beta.clone()));
        if *k > 0 {
            keys.insert((k - 1, beta.clone()));
        }
    }
    for b in cycles {
        for (k, beta) in &keys {
            if *k == 0 && beta.is_zero() {
                continue;
            }
            let upper = t.cell(k + 1, beta);
            if upper.is_none() && !t.admits(k + 1, beta) {
                continue;
            }
            let mut lhs: Cell = BTreeMap::new();
            for (uvec, out) in upper.into_iter().flatten() {
                for (i, x) in uvec.iter().enumerate() {
                    if let Some(c) = b.get(x) {
                        let mut rest = uvec.clone();
                        rest.remove(i);
                        let slot = lhs.entry(rest).or_default();
                        svec_add_scaled(slot, out, c);
                    }
                }
            }
            let scalar = src.pair(&t.labels.boundary_of(beta), b);
            if let Some(lower) = t.cell(*k, beta) {
                let neg = -&scalar;
                for (x, v) in lower {
                    let slot = lhs.entry(x.clone()).or_default();
                    svec_add_scaled(slot, v, &neg);
                }
            }
            if let Some((x, _)) = lhs.iter().find(|(_, v)| !v.is_empty()) {
                return Some((loc(*k, beta, x), "divisor identity fails".into()));
            }
        }
    }
    None
}

fn semipositivity_failure(t: &OperatorSystem) -> Option<(Location, String)> {
    for ((k, b), cell) in t.cells() {
        if t.labels.maslov_of(b) < 0 {
            let tuple = cell.keys().next().cloned().unwrap_or_default();
            return Some((
                loc(*k, b, &tuple),
                "negative Maslov index on support".into(),
            ));
        }
    }
    None
}

fn boundary_pairing_failure(t: &OperatorSystem, cycles: &[SVec]) -> Option<(Location, String)> {
    let lin = t.linear_part();
    let zero = t.labels.zero();
    for j in 0..t.labels.num_generators() {
        let g = LabelClass::generator(t.labels.num_generators(), j);
        let alpha = t.labels.boundary_of(&g);
        for b in cycles {
            let lhs = t.target.pair(&alpha, &lin.apply(b));
            let rhs = t.source.pair(&alpha, b);
            if lhs != rhs {
                let idx: Vec<usize> = b.keys().copied().collect();
                return Some((
                    loc(1, &zero, &idx),
                    format!("⟨∂g{j}, f_{{1,0}}(b)⟩ ≠ ⟨∂g{j}, b⟩"),
                ));
            }
        }
    }
    None
}
