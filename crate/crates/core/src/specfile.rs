//! Line-oriented text format for algebras, isotopies, contractions and
//! continuation plans.
//!
//! ```text
//! [context]
//! cutoff = 3
//! weight_cap = 4
//!
//! [label_group]
//! lattice_rank = 2
//! rank = 1
//! energy = 1
//! maslov = 2
//! boundary = 1 | 0
//! generators = 1
//!
//! [graded_space H]
//! names = 1 t1 t2 t1t2
//! degrees = 0 1 1 2
//! unit = 0
//! h1 = 1 2
//! h2 = 3
//! pairing = 1 0 | 0 1
//!
//! [operators m algebra H H]
//! k=2 beta=0 in=1,2 out=3 coef=-1
//! k=0 beta=1 in= out=0 coef=1
//! ```
//!
//! Matrix rows are separated by `|`. Coefficients are rationals `p/q` or
//! polynomials in `s` written `[c0,c1,...]`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraError, GradedSpace, LinMap, OpKind, OperatorSystem, Truncation};
use crate::fukaya::{IsotopyShift, PathPlan};
use crate::group_series::Polyhedron;
use crate::hpt::Contraction;
use crate::isotopy::PseudoIsotopy;
use crate::labels::{LabelClass, LabelError, LabelGroup, DEFAULT_LIMIT};
use crate::novikov::{fmt_q, parse_q, qi, Q};
use crate::poly::Poly;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Label(#[from] LabelError),
}

fn schema<T>(msg: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError::Schema(msg.into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    pub cutoff: Q,
    pub weight_cap: u32,
    pub limit: usize,
    pub seed: Option<u64>,
}

impl Default for Context {
    fn default() -> Self {
        Context {
            cutoff: qi(3),
            weight_cap: 4,
            limit: DEFAULT_LIMIT,
            seed: None,
        }
    }
}

/// One nonzero coefficient of `t_{k,β}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub k: usize,
    pub beta: LabelClass,
    pub input: Vec<usize>,
    pub out: usize,
    pub coef: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorTable {
    pub name: String,
    pub kind: OpKind,
    pub source: String,
    pub target: String,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotopyTable {
    pub name: String,
    pub algebra: String,
    pub part: String,
}

/// Sparse `(map, input, output, coefficient)` entries of `i`, `pi`, `g` and an
/// optional deformation `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionTable {
    pub h: String,
    pub c: String,
    pub strong: bool,
    pub entries: Vec<(String, usize, usize, Poly)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SpecDocument {
    pub context: Context,
    pub labels: Option<LabelGroup>,
    pub spaces: Vec<(String, GradedSpace)>,
    pub operators: Vec<OperatorTable>,
    pub isotopies: Vec<IsotopyTable>,
    pub contraction: Option<ContractionTable>,
    pub plan: Option<PathPlan>,
}

fn join<T>(v: &[T], sep: &str, f: impl Fn(&T) -> String) -> String {
    v.iter().map(f).collect::<Vec<_>>().join(sep)
}

fn rows<T>(m: &[Vec<T>], f: impl Fn(&T) -> String + Copy) -> String {
    join(m, " | ", |r| join(r, " ", f))
}

impl fmt::Display for SpecDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.context;
        writeln!(
            f,
            "[context]\ncutoff = {}\nweight_cap = {}\nlimit = {}",
            fmt_q(&c.cutoff),
            c.weight_cap,
            c.limit
        )?;
        if let Some(seed) = c.seed {
            writeln!(f, "seed = {seed}")?;
        }
        if let Some(l) = &self.labels {
            writeln!(
                f,
                "\n[label_group]\nlattice_rank = {}\nrank = {}",
                l.lattice_rank(),
                l.rank
            )?;
            writeln!(f, "energy = {}", join(&l.energy, " ", fmt_q))?;
            writeln!(f, "maslov = {}", join(&l.maslov, " ", |x| x.to_string()))?;
            writeln!(f, "boundary = {}", rows(&l.boundary, |x| x.to_string()))?;
            writeln!(f, "generators = {}", rows(&l.generators, |x| x.to_string()))?;
        }
        for (name, s) in &self.spaces {
            writeln!(f, "\n[graded_space {name}]")?;
            writeln!(f, "names = {}", s.names.join(" "))?;
            writeln!(f, "degrees = {}", join(&s.degrees, " ", |x| x.to_string()))?;
            if let Some(u) = s.unit {
                writeln!(f, "unit = {u}")?;
            }
            writeln!(f, "h1 = {}", join(&s.h1_basis, " ", |x| x.to_string()))?;
            writeln!(f, "h2 = {}", join(&s.h2_basis, " ", |x| x.to_string()))?;
            writeln!(f, "pairing = {}", rows(&s.pairing, fmt_q))?;
        }
        for t in &self.operators {
            writeln!(
                f,
                "\n[operators {} {} {} {}]",
                t.name,
                t.kind.name(),
                t.source,
                t.target
            )?;
            for e in &t.entries {
                writeln!(
                    f,
                    "k={} beta={} in={} out={} coef={}",
                    e.k,
                    join(&e.beta.0, ",", |x| x.to_string()),
                    join(&e.input, ",", |x| x.to_string()),
                    e.out,
                    e.coef
                )?;
            }
        }
        for t in &self.isotopies {
            writeln!(
                f,
                "\n[isotopy {}]\nalgebra = {}\npart = {}",
                t.name, t.algebra, t.part
            )?;
        }
        if let Some(t) = &self.contraction {
            writeln!(
                f,
                "\n[contraction]\nh = {}\nc = {}\nstrong = {}",
                t.h, t.c, t.strong
            )?;
            for (map, i, o, coef) in &t.entries {
                writeln!(f, "{map} in={i} out={o} coef={coef}")?;
            }
        }
        if let Some(p) = &self.plan {
            writeln!(f, "\n[plan]\ndelta = {}", rows(&p.delta.vertices, fmt_q))?;
            for s in &p.steps {
                writeln!(
                    f,
                    "step xi={} c={} lengths={}",
                    join(&s.xi, ",", fmt_q),
                    fmt_q(&s.c),
                    join(&s.lengths, ",", fmt_q)
                )?;
            }
        }
        Ok(())
    }
}

struct Cursor {
    line: usize,
}

impl Cursor {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SpecError> {
        Err(SpecError::Parse {
            line: self.line,
            msg: msg.into(),
        })
    }

    fn list<T>(
        &self,
        s: &str,
        sep: char,
        f: impl Fn(&str) -> Option<T>,
    ) -> Result<Vec<T>, SpecError> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(vec![]);
        }
        s.split(sep)
            .map(|x| match f(x.trim()) {
                Some(v) => Ok(v),
                None => self.err(format!("bad value `{}`", x.trim())),
            })
            .collect()
    }

    fn words<T>(&self, s: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, SpecError> {
        s.split_whitespace()
            .map(|x| f(x).map_or_else(|| self.err(format!("bad value `{x}`")), Ok))
            .collect()
    }

    fn matrix<T>(
        &self,
        s: &str,
        f: impl Fn(&str) -> Option<T> + Copy,
    ) -> Result<Vec<Vec<T>>, SpecError> {
        if s.trim().is_empty() {
            return Ok(vec![]);
        }
        s.split('|').map(|r| self.words(r, f)).collect()
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T, SpecError> {
        s.trim()
            .parse()
            .or_else(|_| self.err(format!("bad number `{}`", s.trim())))
    }

    fn rational(&self, s: &str) -> Result<Q, SpecError> {
        parse_q(s).or_else(|e| self.err(e.to_string()))
    }

    fn poly(&self, s: &str) -> Result<Poly, SpecError> {
        Poly::parse(s).or_else(|e| self.err(e.to_string()))
    }

    /// `key=value` tokens after an optional leading word.
    fn fields<'a>(&self, s: &'a str) -> Result<BTreeMap<&'a str, &'a str>, SpecError> {
        let mut out = BTreeMap::new();
        for tok in s.split_whitespace() {
            let Some((k, v)) = tok.split_once('=') else {
                return self.err(format!("expected key=value, got `{tok}`"));
            };
            if out.insert(k, v).is_some() {
                return self.err(format!("duplicate field `{k}`"));
            }
        }
        Ok(out)
    }

    fn field<'a>(&self, m: &BTreeMap<&'a str, &'a str>, k: &str) -> Result<&'a str, SpecError> {
        m.get(k)
            .copied()
            .map_or_else(|| self.err(format!("missing field `{k}`")), Ok)
    }
}

fn usize_of(s: &str) -> Option<usize> {
    s.parse().ok()
}

fn q_of(s: &str) -> Option<Q> {
    parse_q(s).ok()
}

enum Section {
    None,
    Context,
    Labels(BTreeMap<String, (usize, String)>),
    Space(String, BTreeMap<String, (usize, String)>),
    Operators(OperatorTable),
    Isotopy(String, BTreeMap<String, (usize, String)>),
    Contraction(
        BTreeMap<String, (usize, String)>,
        Vec<(String, usize, usize, Poly)>,
    ),
    Plan(Option<Polyhedron>, Vec<IsotopyShift>),
}

impl SpecDocument {
    pub fn parse(text: &str) -> Result<SpecDocument, SpecError> {
        let mut doc = SpecDocument::default();
        let mut cur = Cursor { line: 0 };
        let mut section = Section::None;
        for (n, raw) in text.lines().enumerate() {
            cur.line = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                let prev = std::mem::replace(&mut section, Section::None);
                doc.finish(prev, &cur)?;
                let words: Vec<&str> = header.split_whitespace().collect();
                section = match words.as_slice() {
                    ["context"] => Section::Context,
                    ["label_group"] => Section::Labels(BTreeMap::new()),
                    ["graded_space", name] => Section::Space(name.to_string(), BTreeMap::new()),
                    ["operators", name, kind, source, target] => {
                        let Some(kind) = OpKind::parse(kind) else {
                            return cur.err(format!("unknown kind `{kind}`"));
                        };
                        Section::Operators(OperatorTable {
                            name: name.to_string(),
                            kind,
                            source: source.to_string(),
                            target: target.to_string(),
                            entries: vec![],
                        })
                    }
                    ["isotopy", name] => Section::Isotopy(name.to_string(), BTreeMap::new()),
                    ["contraction"] => Section::Contraction(BTreeMap::new(), vec![]),
                    ["plan"] => Section::Plan(None, vec![]),
                    _ => return cur.err(format!("unknown section `[{header}]`")),
                };
                continue;
            }
            let kv = line.split_once('=').map(|(k, v)| (k.trim(), v.trim()));
            match &mut section {
                Section::None => return cur.err("content before the first section"),
                Section::Context => {
                    let Some((k, v)) = kv else {
                        return cur.err("expected key = value");
                    };
                    match k {
                        "cutoff" => doc.context.cutoff = cur.rational(v)?,
                        "weight_cap" => doc.context.weight_cap = cur.num(v)?,
                        "limit" => doc.context.limit = cur.num(v)?,
                        "seed" => doc.context.seed = Some(cur.num(v)?),
                        _ => return cur.err(format!("unknown context key `{k}`")),
                    }
                }
                Section::Labels(m) | Section::Space(_, m) | Section::Isotopy(_, m) => {
                    let Some((k, v)) = kv else {
                        return cur.err("expected key = value");
                    };
                    if m.insert(k.to_string(), (cur.line, v.to_string())).is_some() {
                        return cur.err(format!("duplicate key `{k}`"));
                    }
                }
                Section::Operators(t) => {
                    let fs = cur.fields(line)?;
                    let e = Entry {
                        k: cur.num(cur.field(&fs, "k")?)?,
                        beta: LabelClass(
                            cur.list(cur.field(&fs, "beta")?, ',', |x| x.parse().ok())?,
                        ),
                        input: cur.list(cur.field(&fs, "in")?, ',', usize_of)?,
                        out: cur.num(cur.field(&fs, "out")?)?,
                        coef: cur.poly(cur.field(&fs, "coef")?)?,
                    };
                    if fs.len() != 5 {
                        return cur.err("entries take exactly k, beta, in, out and coef");
                    }
                    if e.input.len() != e.k {
                        return cur.err(format!("k={} but {} inputs", e.k, e.input.len()));
                    }
                    t.entries.push(e);
                }
                Section::Contraction(m, entries) => {
                    let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
                    if matches!(head, "i" | "pi" | "g" | "k") && !head.contains('=') {
                        let fs = cur.fields(rest)?;
                        entries.push((
                            head.to_string(),
                            cur.num(cur.field(&fs, "in")?)?,
                            cur.num(cur.field(&fs, "out")?)?,
                            cur.poly(cur.field(&fs, "coef")?)?,
                        ));
                    } else {
                        let Some((k, v)) = kv else {
                            return cur.err("expected key = value or a map entry");
                        };
                        if m.insert(k.to_string(), (cur.line, v.to_string())).is_some() {
                            return cur.err(format!("duplicate key `{k}`"));
                        }
                    }
                }
                Section::Plan(delta, steps) => {
                    if let Some(rest) = line.strip_prefix("step ") {
                        let fs = cur.fields(rest)?;
                        steps.push(IsotopyShift::new(
                            cur.list(cur.field(&fs, "xi")?, ',', q_of)?,
                            cur.rational(cur.field(&fs, "c")?)?,
                            cur.list(cur.field(&fs, "lengths")?, ',', q_of)?,
                        ));
                    } else if let Some(("delta", v)) = kv {
                        let verts = cur.matrix(v, q_of)?;
                        *delta = Some(Polyhedron::new(verts).or_else(|e| cur.err(e.to_string()))?);
                    } else {
                        return cur.err("expected `delta = ...` or `step ...`");
                    }
                }
            }
        }
        doc.finish(section, &cur)?;
        Ok(doc)
    }

    fn finish(&mut self, s: Section, cur: &Cursor) -> Result<(), SpecError> {
        let get = |m: &BTreeMap<String, (usize, String)>,
                   k: &str|
         -> Result<(Cursor, String), SpecError> {
            match m.get(k) {
                Some((line, v)) => Ok((Cursor { line: *line }, v.clone())),
                None => cur.err(format!("missing key `{k}`")),
            }
        };
        match s {
            Section::None | Section::Context => {}
            Section::Labels(m) => {
                let (c, v) = get(&m, "lattice_rank")?;
                let lattice: usize = c.num(&v)?;
                let (c, v) = get(&m, "rank")?;
                let rank: usize = c.num(&v)?;
                let (c, v) = get(&m, "energy")?;
                let energy = c.words(&v, q_of)?;
                let (c, v) = get(&m, "maslov")?;
                let maslov = c.words(&v, |x| x.parse().ok())?;
                let (c, v) = get(&m, "boundary")?;
                let mut boundary: Vec<Vec<i64>> = c.matrix(&v, |x| x.parse().ok())?;
                if rank == 0 {
                    boundary = vec![vec![]; lattice];
                }
                let (c, v) = get(&m, "generators")?;
                let generators = c.matrix(&v, |x| x.parse().ok())?;
                if boundary.len() != lattice {
                    return schema(format!(
                        "boundary has {} rows, lattice_rank is {lattice}",
                        boundary.len()
                    ));
                }
                let g = LabelGroup {
                    rank,
                    energy,
                    maslov,
                    boundary,
                    generators,
                    limit: self.context.limit,
                };
                g.validate()?;
                self.labels = Some(g);
            }
            Section::Space(name, m) => {
                if self.spaces.iter().any(|(n, _)| n == &name) {
                    return schema(format!("graded space `{name}` declared twice"));
                }
                let (_, v) = get(&m, "names")?;
                let names: Vec<String> = v.split_whitespace().map(String::from).collect();
                let (c, v) = get(&m, "degrees")?;
                let degrees = c.words(&v, |x| x.parse().ok())?;
                let mut s = GradedSpace::new(names, degrees);
                if let Some((line, v)) = m.get("unit") {
                    s.unit = Some(Cursor { line: *line }.num(v)?);
                }
                if let Some((line, v)) = m.get("h1") {
                    s.h1_basis = Cursor { line: *line }.words(v, usize_of)?;
                }
                if let Some((line, v)) = m.get("h2") {
                    s.h2_basis = Cursor { line: *line }.words(v, usize_of)?;
                }
                if let Some((line, v)) = m.get("pairing") {
                    s.pairing = Cursor { line: *line }.matrix(v, q_of)?;
                }
                s.validate()?;
                self.spaces.push((name, s));
            }
            Section::Operators(t) => {
                if self.operators.iter().any(|o| o.name == t.name) {
                    return schema(format!("operator table `{}` declared twice", t.name));
                }
                self.operators.push(t);
            }
            Section::Isotopy(name, m) => {
                let (_, algebra) = get(&m, "algebra")?;
                let (_, part) = get(&m, "part")?;
                self.isotopies.push(IsotopyTable {
                    name,
                    algebra,
                    part,
                });
            }
            Section::Contraction(m, entries) => {
                let (_, h) = get(&m, "h")?;
                let (_, c) = get(&m, "c")?;
                let strong = match m.get("strong") {
                    None => true,
                    Some((line, v)) => match v.as_str() {
                        "true" => true,
                        "false" => false,
                        _ => return Cursor { line: *line }.err("strong must be true or false"),
                    },
                };
                self.contraction = Some(ContractionTable {
                    h,
                    c,
                    strong,
                    entries,
                });
            }
            Section::Plan(delta, steps) => {
                let Some(delta) = delta else {
                    return cur.err("plan needs `delta`");
                };
                self.plan = Some(PathPlan { delta, steps });
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> Result<Arc<LabelGroup>, SpecError> {
        match &self.labels {
            Some(l) => Ok(Arc::new(l.clone().with_limit(self.context.limit))),
            None => schema("missing [label_group]"),
        }
    }

    pub fn truncation(&self) -> Truncation {
        Truncation::new(self.context.cutoff.clone(), self.context.weight_cap)
    }

    pub fn space(&self, name: &str) -> Result<Arc<GradedSpace>, SpecError> {
        match self.spaces.iter().find(|(n, _)| n == name) {
            Some((_, s)) => Ok(Arc::new(s.clone())),
            None => schema(format!("unknown graded space `{name}`")),
        }
    }

    pub fn table(&self, name: &str) -> Result<&OperatorTable, SpecError> {
        match self.operators.iter().find(|t| t.name == name) {
            Some(t) => Ok(t),
            None => schema(format!("unknown operator table `{name}`")),
        }
    }

    /// Names of the operator tables of a given kind, in file order.
    pub fn names_of_kind(&self, kind: OpKind) -> Vec<String> {
        self.operators
            .iter()
            .filter(|t| t.kind == kind)
            .map(|t| t.name.clone())
            .collect()
    }

    /// Builds an operator table, checking indices, truncation and degrees.
    pub fn operator(&self, name: &str) -> Result<OperatorSystem, SpecError> {
        let t = self.table(name)?;
        let labels = self.labels()?;
        let (src, tgt) = (self.space(&t.source)?, self.space(&t.target)?);
        let rank = src.lattice_rank();
        if rank != labels.lattice_rank() || tgt.lattice_rank() != labels.lattice_rank() {
            return schema(format!(
                "`{name}`: pairing rows do not match the lattice rank {}",
                labels.lattice_rank()
            ));
        }
        let trunc = self.truncation();
        let mut op = OperatorSystem::new(
            t.kind,
            src.clone(),
            tgt.clone(),
            labels.clone(),
            trunc.clone(),
        );
        for e in &t.entries {
            if e.beta.0.len() != labels.num_generators() {
                return schema(format!("`{name}`: beta {} has the wrong length", e.beta));
            }
            if let Some(i) = e.input.iter().find(|&&i| i >= src.dim()) {
                return schema(format!("`{name}`: input index {i} out of range"));
            }
            if e.out >= tgt.dim() {
                return schema(format!("`{name}`: output index {} out of range", e.out));
            }
            if !trunc.admits(&labels, e.k, &e.beta) {
                return schema(format!(
                    "`{name}`: k={} beta={} lies beyond the truncation",
                    e.k, e.beta
                ));
            }
            op.add_entry(e.k, &e.beta, e.input.clone(), e.out, &e.coef);
        }
        op.validate_degrees()?;
        Ok(op)
    }

    pub fn isotopy(&self, name: &str) -> Result<PseudoIsotopy, SpecError> {
        let Some(t) = self.isotopies.iter().find(|t| t.name == name) else {
            return schema(format!("unknown isotopy `{name}`"));
        };
        let m = self.operator(&t.algebra)?;
        let c = self.operator(&t.part)?;
        PseudoIsotopy::new(m, c).or_else(|e| schema(e.to_string()))
    }

    /// The contraction and its optional deformation `K`.
    pub fn contraction(&self) -> Result<(Contraction, Option<LinMap>), SpecError> {
        let Some(t) = &self.contraction else {
            return schema("missing [contraction]");
        };
        let (h, c) = (self.space(&t.h)?, self.space(&t.c)?);
        let (nh, nc) = (h.dim(), c.dim());
        let mut i = LinMap::zero(nc, nh);
        let mut pi = LinMap::zero(nh, nc);
        let mut g = LinMap::zero(nc, nc);
        let mut k: Option<LinMap> = None;
        for (map, a, b, coef) in &t.entries {
            let (target, rows, cols) = match map.as_str() {
                "i" => (&mut i, nc, nh),
                "pi" => (&mut pi, nh, nc),
                "g" => (&mut g, nc, nc),
                _ => (k.get_or_insert_with(|| LinMap::zero(nc, nc)), nc, nc),
            };
            if *a >= cols || *b >= rows {
                return schema(format!(
                    "contraction entry {map} in={a} out={b} out of range"
                ));
            }
            crate::algebra::space::add_entry(&mut target.cols[*a], *b, coef);
        }
        Ok((
            Contraction {
                h,
                c,
                i,
                pi,
                g,
                strong: t.strong,
            },
            k,
        ))
    }

    pub fn with_labels(labels: &LabelGroup, trunc: &Truncation) -> SpecDocument {
        SpecDocument {
            context: Context {
                cutoff: trunc.cutoff().clone(),
                weight_cap: trunc.weight_cap,
                limit: labels.limit,
                seed: None,
            },
            labels: Some(labels.clone()),
            ..Default::default()
        }
    }

    pub fn add_space(&mut self, name: &str, s: &GradedSpace) {
        if !self.spaces.iter().any(|(n, _)| n == name) {
            self.spaces.push((name.to_string(), s.clone()));
        }
    }

    pub fn add_operator(&mut self, name: &str, op: &OperatorSystem, source: &str, target: &str) {
        self.add_space(source, &op.source);
        self.add_space(target, &op.target);
        let mut entries = vec![];
        for ((k, b), cell) in op.cells() {
            for (t, v) in cell {
                for (o, c) in v {
                    entries.push(Entry {
                        k: *k,
                        beta: b.clone(),
                        input: t.clone(),
                        out: *o,
                        coef: c.clone(),
                    });
                }
            }
        }
        self.operators.push(OperatorTable {
            name: name.to_string(),
            kind: op.kind,
            source: source.to_string(),
            target: target.to_string(),
            entries,
        });
    }

    pub fn add_contraction(&mut self, g: &Contraction, h: &str, c: &str, k: Option<&LinMap>) {
        self.add_space(h, &g.h);
        self.add_space(c, &g.c);
        let mut entries = vec![];
        let maps: Vec<(&str, &LinMap)> = [("i", &g.i), ("pi", &g.pi), ("g", &g.g)]
            .into_iter()
            .chain(k.map(|k| ("k", k)))
            .collect();
        for (name, l) in maps {
            for (col, v) in l.cols.iter().enumerate() {
                for (row, coef) in v {
                    entries.push((name.to_string(), col, *row, coef.clone()));
                }
            }
        }
        self.contraction = Some(ContractionTable {
            h: h.to_string(),
            c: c.to_string(),
            strong: g.strong,
            entries,
        });
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{self}");
        s
    }
}
