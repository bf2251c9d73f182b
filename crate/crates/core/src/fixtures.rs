//! Built-in model algebras on the cohomology of tori and their perturbations.

use std::sync::Arc;

use num::{One, Zero};

use crate::algebra::space::{add_entry, svec_add_scaled, svec_unit, GradedSpace, SVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{transport_structure, LinMap, OpKind, OperatorSystem, Truncation};
use crate::group_series::Polyhedron;
use crate::hpt::Contraction;
use crate::labels::{LabelClass, LabelGroup};
use crate::novikov::{q, qi, Q};
use crate::poly::Poly;

/// Exterior algebra `Λ(θ_1, …, θ_n)` with its monomial basis.
#[derive(Clone, Debug)]
pub struct Exterior {
    pub n: usize,
    /// Basis index to bitmask, ordered by degree then mask.
    pub masks: Vec<u32>,
    index: Vec<usize>,
}

impl Exterior {
    pub fn new(n: usize) -> Self {
        let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        let mut index = vec![0; 1 << n];
        for (i, m) in masks.iter().enumerate() {
            index[*m as usize] = i;
        }
        Exterior { n, masks, index }
    }

    pub fn dim(&self) -> usize {
        self.masks.len()
    }

    pub fn index_of(&self, mask: u32) -> usize {
        self.index[mask as usize]
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.masks[i].count_ones() as i64
    }

    pub fn top(&self) -> usize {
        self.index_of((1u32 << self.n) - 1)
    }

    /// `θ_a ∧ θ_b` on monomials.
    pub fn wedge_basis(&self, a: usize, b: usize) -> Option<(i64, usize)> {
        let (ma, mb) = (self.masks[a], self.masks[b]);
        if ma & mb != 0 {
            return None;
        }
        // Each generator of b passes the generators of a with larger index.
        let mut swaps = 0;
        for j in 0..self.n {
            if mb >> j & 1 == 1 {
                swaps += (ma >> (j + 1)).count_ones();
            }
        }
        let sign = if swaps % 2 == 0 { 1 } else { -1 };
        Some((sign, self.index_of(ma | mb)))
    }

    pub fn wedge(&self, x: &SVec, y: &SVec) -> SVec {
        let mut out = SVec::new();
        for (a, ca) in x {
            for (b, cb) in y {
                if let Some((s, i)) = self.wedge_basis(*a, *b) {
                    let c = &(ca * cb) * &Poly::constant(qi(s));
                    add_entry(&mut out, i, &c);
                }
            }
        }
        out
    }

    /// Interior product with `v`, a derivation of degree `−1`.
    pub fn contract(&self, v: &[Q], x: &SVec) -> SVec {
        let mut out = SVec::new();
        for (a, c) in x {
            let m = self.masks[*a];
            let mut pos = 0;
            for j in 0..self.n {
                if m >> j & 1 == 1 {
                    if !v[j].is_zero() {
                        let sign = if pos % 2 == 0 {
                            v[j].clone()
                        } else {
                            -v[j].clone()
                        };
                        add_entry(&mut out, self.index_of(m & !(1 << j)), &c.scale(&sign));
                    }
                    pos += 1;
                }
            }
        }
        out
    }

    pub fn graded_space(&self) -> GradedSpace {
        let names = self
            .masks
            .iter()
            .map(|m| {
                if *m == 0 {
                    "1".to_string()
                } else {
                    (0..self.n)
                        .filter(|j| m >> j & 1 == 1)
                        .map(|j| format!("t{}", j + 1))
                        .collect()
                }
            })
            .collect();
        let degrees = (0..self.dim()).map(|i| self.degree(i)).collect();
        let mut s = GradedSpace::new(names, degrees);
        s.unit = Some(0);
        s.h1_basis = (0..self.n).map(|j| self.index_of(1 << j)).collect();
        s.h2_basis = s.basis_of_degree(2);
        s.pairing = (0..self.n)
            .map(|r| {
                (0..self.n)
                    .map(|c| if r == c { Q::one() } else { Q::zero() })
                    .collect()
            })
            .collect();
        s
    }
}

/// `m_{2,0}(x, y) = (−1)^{deg x} x ∧ y` on an exterior algebra.
pub fn wedge_structure(
    ext: &Exterior,
    space: Arc<GradedSpace>,
    labels: Arc<LabelGroup>,
    trunc: Truncation,
) -> OperatorSystem {
    let mut m = OperatorSystem::new(OpKind::Algebra, space.clone(), space, labels, trunc);
    let zero = m.labels.zero();
    for a in 0..ext.dim() {
        for b in 0..ext.dim() {
            if let Some((s, i)) = ext.wedge_basis(a, b) {
                let sign = if ext.degree(a) % 2 == 0 { s } else { -s };
                m.add_entry(2, &zero, vec![a, b], i, &Poly::constant(qi(sign)));
            }
        }
    }
    m
}

/// Adds `c · E_β[ω]` where `E_β[ω](x_1, …, x_k) = 1/k! · ι_v x_1 ∧ ⋯ ∧ ι_v x_k ∧ ω`
/// with `v = ∂β`, for every arity the truncation admits.
pub fn add_exponential_divisor(
    m: &mut OperatorSystem,
    ext: &Exterior,
    beta: &LabelClass,
    omega: &SVec,
    c: &Poly,
) {
    let v: Vec<Q> = m.labels.boundary_of(beta).iter().map(|x| qi(*x)).collect();
    let inputs: Vec<usize> = (0..ext.dim()).filter(|&i| ext.degree(i) >= 1).collect();
    let contracted: Vec<SVec> = (0..ext.dim())
        .map(|i| ext.contract(&v, &svec_unit(i)))
        .collect();
    let mut k = 0usize;
    let mut fact = Q::one();
    while m.admits(k, beta) {
        if k > 0 {
            fact *= qi(k as i64);
        }
        let mut tuple = vec![0usize; k];
        let scale = c.scale(&(Q::one() / &fact));
        enumerate_tuples(&inputs, k, &mut tuple, 0, &mut |t| {
            let mut acc = omega.clone();
            for &x in t.iter().rev() {
                acc = ext.wedge(&contracted[x], &acc);
                if acc.is_empty() {
                    return;
                }
            }
            let mut out = SVec::new();
            svec_add_scaled(&mut out, &acc, &scale);
            m.add_vec(k, beta, t.to_vec(), &out);
        });
        k += 1;
    }
}

fn enumerate_tuples(
    alphabet: &[usize],
    k: usize,
    buf: &mut Vec<usize>,
    pos: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if pos == k {
        f(buf);
        return;
    }
    for &a in alphabet {
        buf[pos] = a;
        enumerate_tuples(alphabet, k, buf, pos + 1, f);
    }
}

/// Size of a built-in model.
#[derive(Clone, Debug)]
pub struct FixtureOptions {
    pub cutoff: Q,
    pub weight_cap: u32,
}

impl Default for FixtureOptions {
    fn default() -> Self {
        FixtureOptions {
            cutoff: qi(3),
            weight_cap: 4,
        }
    }
}

/// A minimal model on `H^*(T^n)` together with the geometric side data used by
/// the convergence and continuation checks.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub ext: Exterior,
    pub m: OperatorSystem,
    /// Classes the algebra itself uses; the remaining generators are spare
    /// `μ = 0` directions for gauges.
    pub active: Vec<usize>,
    pub delta: Polyhedron,
    pub isoperimetric: Q,
    /// Boundary length of each generator.
    pub lengths: Vec<Q>,
}

/// One generator of a fixture label group.
struct Gen {
    boundary: Vec<i64>,
    maslov: i64,
    energy: Q,
    /// Whether `m_{·,β}` carries an exponential divisor family on it.
    active: bool,
}

pub const FIXTURE_NAMES: [&str; 5] = [
    "torus-exterior",
    "maslov2-pair",
    "maslov0-obstructed",
    "maslov2-triple",
    "maslov0-pair",
];

fn build(name: &str, n: usize, gens: Vec<Gen>, opts: &FixtureOptions) -> Fixture {
    let ext = Exterior::new(n);
    let space = Arc::new(ext.graded_space());
    let r = gens.len();
    let boundary: Vec<Vec<i64>> = (0..n)
        .map(|row| gens.iter().map(|g| g.boundary[row]).collect())
        .collect();
    let lattice: Vec<Vec<i64>> = (0..r)
        .map(|j| (0..r).map(|i| (i == j) as i64).collect())
        .collect();
    let labels = LabelGroup::new(
        r,
        gens.iter().map(|g| g.energy.clone()).collect(),
        gens.iter().map(|g| g.maslov).collect(),
        boundary,
        lattice,
    )
    .expect("fixture label group");
    let trunc = Truncation::new(opts.cutoff.clone(), opts.weight_cap);
    let mut m = wedge_structure(&ext, space, Arc::new(labels), trunc);
    let top = ext.top();
    let mut active = vec![];
    for (j, g) in gens.iter().enumerate() {
        if !g.active {
            continue;
        }
        active.push(j);
        let omega = if g.maslov == 2 {
            svec_unit(0)
        } else {
            svec_unit(top)
        };
        add_exponential_divisor(
            &mut m,
            &ext,
            &LabelClass::generator(r, j),
            &omega,
            &Poly::one(),
        );
    }
    Fixture {
        name: name.to_string(),
        ext,
        m,
        active,
        delta: Polyhedron::cube(n, &q(1, 2)),
        isoperimetric: qi(1),
        lengths: vec![qi(1); r],
    }
}

fn gen(boundary: Vec<i64>, maslov: i64, energy: Q, active: bool) -> Gen {
    Gen {
        boundary,
        maslov,
        energy,
        active,
    }
}

/// `H^*(T^2)` with the wedge product and no disk corrections.
pub fn torus_exterior(opts: &FixtureOptions) -> Fixture {
    build(
        "torus-exterior",
        2,
        vec![
            gen(vec![1, 0], 0, qi(1), false),
            gen(vec![0, 1], 0, q(3, 2), false),
        ],
        opts,
    )
}

/// Two Maslov-2 disks with boundaries `±e_1`: `W = T(Y^{e_1} + Y^{-e_1})`.
pub fn maslov2_pair(opts: &FixtureOptions) -> Fixture {
    build(
        "maslov2-pair",
        2,
        vec![
            gen(vec![1, 0], 2, qi(1), true),
            gen(vec![-1, 0], 2, qi(1), true),
            gen(vec![0, 1], 0, qi(1), false),
        ],
        opts,
    )
}

/// One Maslov-0 disk with boundary `e_1` hitting `Θ`: `Q_1 = T·Y^{e_1}`.
pub fn maslov0_obstructed(opts: &FixtureOptions) -> Fixture {
    build(
        "maslov0-obstructed",
        2,
        vec![
            gen(vec![1, 0], 0, qi(1), true),
            gen(vec![0, 1], 0, q(3, 2), false),
        ],
        opts,
    )
}

/// Maslov-2 disks with boundaries `e_1`, `−e_1`, `2e_1`.
pub fn maslov2_triple(opts: &FixtureOptions) -> Fixture {
    build(
        "maslov2-triple",
        2,
        vec![
            gen(vec![1, 0], 2, qi(1), true),
            gen(vec![-1, 0], 2, q(3, 2), true),
            gen(vec![2, 0], 2, qi(2), true),
            gen(vec![0, 1], 0, qi(1), false),
        ],
        opts,
    )
}

/// Maslov-0 disks with boundaries `e_1` and `e_2`.
pub fn maslov0_pair(opts: &FixtureOptions) -> Fixture {
    build(
        "maslov0-pair",
        2,
        vec![
            gen(vec![1, 0], 0, qi(1), true),
            gen(vec![0, 1], 0, q(3, 2), true),
        ],
        opts,
    )
}

pub fn fixture_by_name(name: &str, opts: &FixtureOptions) -> Option<Fixture> {
    match name {
        "torus-exterior" => Some(torus_exterior(opts)),
        "maslov2-pair" => Some(maslov2_pair(opts)),
        "maslov0-obstructed" => Some(maslov0_obstructed(opts)),
        "maslov2-triple" => Some(maslov2_triple(opts)),
        "maslov0-pair" => Some(maslov0_pair(opts)),
        _ => None,
    }
}

fn small_rational(rng: &mut impl Rng) -> Q {
    let num = rng.gen_range(-3i64..=3);
    let den = rng.gen_range(1i64..=2);
    if num == 0 {
        q(1, den)
    } else {
        q(num, den)
    }
}

/// A random homomorphism `u = id + Σ c_β E_β[ω_β]` over the Maslov-0
/// generators, with `ω_β` of degree one. Such `u` lies in the unital
/// divisor category, and `u_{0,β}` is supported in degree one.
pub fn random_gauge(fix: &Fixture, rng: &mut impl Rng) -> OperatorSystem {
    random_gauge_with(fix, rng, |_| Poly::one())
}

/// As [`random_gauge`] with coefficients `s·a + s²·b`, a polynomial family
/// starting at the identity.
pub fn random_gauge_family(fix: &Fixture, rng: &mut impl Rng) -> OperatorSystem {
    random_gauge_with(fix, rng, |r| {
        Poly::new(vec![Q::zero(), small_rational(r), small_rational(r)])
    })
}

fn random_gauge_with<R: Rng>(
    fix: &Fixture,
    rng: &mut R,
    mut coef: impl FnMut(&mut R) -> Poly,
) -> OperatorSystem {
    let m = &fix.m;
    let mut u = OperatorSystem::identity(m.source.clone(), m.labels.clone(), m.trunc.clone());
    let deg1: Vec<usize> = m.source.basis_of_degree(1);
    let r = m.labels.num_generators();
    let mut any = false;
    for j in 0..r {
        if m.labels.maslov_of(&LabelClass::generator(r, j)) != 0 {
            continue;
        }
        if any && rng.gen_bool(0.3) {
            continue;
        }
        any = true;
        let mut omega = SVec::new();
        for &b in &deg1 {
            if rng.gen_bool(0.7) {
                omega.insert(b, Poly::constant(small_rational(rng)));
            }
        }
        if omega.is_empty() {
            omega.insert(deg1[0], Poly::one());
        }
        let c = coef(rng);
        add_exponential_divisor(&mut u, &fix.ext, &LabelClass::generator(r, j), &omega, &c);
    }
    u
}

/// A homotopy `h_s = Σ p_β(s) E_β[𝟙]` over the Maslov-0 generators.
pub fn random_homotopy(fix: &Fixture, rng: &mut impl Rng) -> OperatorSystem {
    let m = &fix.m;
    let mut h = m.empty_like(OpKind::Homotopy);
    let r = m.labels.num_generators();
    let unit = svec_unit(m.source.unit.expect("fixtures are unital"));
    for j in 0..r {
        if m.labels.maslov_of(&LabelClass::generator(r, j)) != 0 {
            continue;
        }
        let p = Poly::new(vec![small_rational(rng), small_rational(rng)]);
        add_exponential_divisor(&mut h, &fix.ext, &LabelClass::generator(r, j), &unit, &p);
    }
    h
}

/// A transported pair: `u: m′ → m` with `m′` the transported structure.
pub struct TransportedPair {
    pub m: OperatorSystem,
    pub m_prime: OperatorSystem,
    pub u: OperatorSystem,
    pub seed: u64,
}

pub fn transported_pair(fix: &Fixture, seed: u64) -> TransportedPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_gauge(fix, &mut rng);
    let m_prime = transport_structure(&fix.m, &u).expect("gauge has identity linear part");
    TransportedPair {
        m: fix.m.clone(),
        m_prime,
        u,
        seed,
    }
}

/// A cochain-level algebra with a contraction onto a smaller space, and
/// optionally a degree `−1` map `K` deforming the contraction.
#[derive(Clone, Debug)]
pub struct ChainModel {
    pub name: String,
    pub m: OperatorSystem,
    pub contraction: Contraction,
    pub deformation: Option<LinMap>,
}

/// `m` with the identity contraction.
pub fn identity_model(fix: &Fixture) -> ChainModel {
    ChainModel {
        name: format!("{}/identity", fix.name),
        m: fix.m.clone(),
        contraction: Contraction::identity(fix.m.source.clone()),
        deformation: None,
    }
}

/// `H ⊕ span(p, q)` with `dp = q`, the unit acting on `p, q` and `m` on `H`.
pub fn acyclic_extension(fix: &Fixture) -> ChainModel {
    let h = fix.m.source.clone();
    let n = h.dim();
    let (p, qq) = (n, n + 1);
    let mut names = h.names.clone();
    names.extend(["p".to_string(), "q".to_string()]);
    let mut degrees = h.degrees.clone();
    degrees.extend([1, 2]);
    let mut c = GradedSpace::new(names, degrees);
    c.unit = h.unit;
    c.h1_basis = h.h1_basis.clone();
    c.h2_basis = h.h2_basis.clone();
    c.pairing = h.pairing.clone();
    let c = Arc::new(c);
    let mut m = fix.m.with_spaces(c.clone(), c.clone());
    let zero = m.labels.zero();
    let unit = h.unit.expect("fixtures are unital");
    let one = Poly::one();
    m.add_entry(1, &zero, vec![p], qq, &one);
    m.add_entry(2, &zero, vec![unit, p], p, &one);
    m.add_entry(2, &zero, vec![p, unit], p, &-&one);
    m.add_entry(2, &zero, vec![unit, qq], qq, &one);
    m.add_entry(2, &zero, vec![qq, unit], qq, &one);
    let mut i = LinMap::zero(n + 2, n);
    let mut pi = LinMap::zero(n, n + 2);
    for j in 0..n {
        i.cols[j] = svec_unit(j);
        pi.cols[j] = svec_unit(j);
    }
    let mut g = LinMap::zero(n + 2, n + 2);
    g.cols[qq].insert(p, -&one);
    ChainModel {
        name: format!("{}/acyclic", fix.name),
        m,
        contraction: Contraction {
            h,
            c,
            i,
            pi,
            g,
            strong: true,
        },
        deformation: None,
    }
}

/// The gauge on an acyclic extension mixing `H` into `span(p, q)`:
/// `u = id + a·(t1, t2 ↦ p) + b·T^{β}(t1 t2 ↦ q, p ↦ t2)` for the first
/// generator `β`.
pub fn extension_gauge(model: &ChainModel, a: Poly, b: Poly) -> OperatorSystem {
    let c = model.m.source.clone();
    let n = c.dim() - 2;
    let mut u = OperatorSystem::identity(c.clone(), model.m.labels.clone(), model.m.trunc.clone());
    let zero = u.labels.zero();
    let deg1 = model.contraction.h.basis_of_degree(1);
    let deg2 = model.contraction.h.basis_of_degree(2);
    u.add_entry(2, &zero, vec![deg1[0], deg1[1]], n, &a);
    if u.labels.num_generators() > 0 {
        let beta = LabelClass::generator(u.labels.num_generators(), 0);
        if u.admits(1, &beta) {
            u.add_entry(1, &beta, vec![deg2[0]], n + 1, &b);
            u.add_entry(1, &beta, vec![n], deg1[1], &b);
        }
    }
    u
}

/// An acyclic extension transported along [`extension_gauge`], so that the
/// transferred structure sees `G`.
pub fn transported_extension(fix: &Fixture) -> ChainModel {
    let base = acyclic_extension(fix);
    let u = extension_gauge(&base, Poly::constant(q(1, 2)), Poly::constant(qi(2)));
    let m = transport_structure(&base.m, &u).expect("gauge has identity linear part");
    ChainModel {
        name: format!("{}/transported", fix.name),
        m,
        ..base
    }
}

/// The Heisenberg nilmanifold: `Λ(x, y, z)` with `dz = xy`, contracted onto
/// `span(1, x, y, xz, yz, xyz)`. Massey products give a nonzero `m_3`.
pub fn heisenberg(opts: &FixtureOptions) -> ChainModel {
    let ext = Exterior::new(3);
    let mut cs = ext.graded_space();
    cs.names = ext
        .masks
        .iter()
        .map(|m| {
            if *m == 0 {
                "1".to_string()
            } else {
                (0..3)
                    .filter(|j| m >> j & 1 == 1)
                    .map(|j| ["x", "y", "z"][j])
                    .collect()
            }
        })
        .collect();
    cs.h1_basis = vec![ext.index_of(1), ext.index_of(2)];
    cs.h2_basis = vec![ext.index_of(5), ext.index_of(6)];
    cs.pairing = vec![vec![Q::one(), Q::zero()], vec![Q::zero(), Q::one()]];
    let c = Arc::new(cs);
    let labels = Arc::new(LabelGroup::trivial(2));
    let trunc = Truncation::new(opts.cutoff.clone(), opts.weight_cap);
    let mut m = wedge_structure(&ext, c.clone(), labels, trunc);
    let zero = m.labels.zero();
    let xy = ext.index_of(3);
    for a in 0..ext.dim() {
        let mask = ext.masks[a];
        if mask & 4 == 0 {
            continue;
        }
        let pidx = ext.index_of(mask & !4);
        if let Some((s, out)) = ext.wedge_basis(pidx, xy) {
            let sign = if ext.degree(pidx) % 2 == 0 { s } else { -s };
            m.add_entry(1, &zero, vec![a], out, &Poly::constant(qi(sign)));
        }
    }
    let hmasks = [0u32, 1, 2, 5, 6, 7];
    let hidx: Vec<usize> = hmasks.iter().map(|mk| ext.index_of(*mk)).collect();
    let mut h = GradedSpace::new(
        vec!["1", "x", "y", "xz", "yz", "xyz"]
            .into_iter()
            .map(String::from)
            .collect(),
        hidx.iter().map(|&i| ext.degree(i)).collect(),
    );
    h.unit = Some(0);
    h.h1_basis = vec![1, 2];
    h.h2_basis = vec![3, 4];
    h.pairing = c.pairing.clone();
    let h = Arc::new(h);
    let nc = ext.dim();
    let mut i = LinMap::zero(nc, 6);
    let mut pi = LinMap::zero(6, nc);
    for (j, &ci) in hidx.iter().enumerate() {
        i.cols[j] = svec_unit(ci);
        pi.cols[ci] = svec_unit(j);
    }
    let z = ext.index_of(4);
    let mut g = LinMap::zero(nc, nc);
    g.cols[xy].insert(z, Poly::constant(qi(-1)));
    let mut k = LinMap::zero(nc, nc);
    k.cols[xy].insert(ext.index_of(1), Poly::one());
    ChainModel {
        name: "heisenberg".into(),
        m,
        contraction: Contraction {
            h,
            c,
            i,
            pi,
            g,
            strong: true,
        },
        deformation: Some(k),
    }
}

/// The chain-level models used to exercise homological perturbation.
pub fn chain_models(opts: &FixtureOptions) -> Vec<ChainModel> {
    vec![
        identity_model(&torus_exterior(opts)),
        identity_model(&maslov2_pair(opts)),
        acyclic_extension(&maslov0_obstructed(opts)),
        transported_extension(&maslov0_obstructed(opts)),
        transported_extension(&maslov0_pair(opts)),
        heisenberg(opts),
    ]
}
