//! Separation: from isomorphic results of injective atomic k-experiments back
//! to an isomorphism of the linear proof-structures, following the induction
//! on the measure and the classification of structures.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::SeparationError;
use crate::experiment::{canonical_injective_atomic, eval_k_experiment, reduce_exp, strip_layer_exp, KExperiment};
use crate::iso::{
    result_iso, tuple_multiset_iso, validate_exp_iso, validate_ps_iso, validate_struct_iso, ExpIso, StructIso,
};
use crate::ps::{recover_boxes, ProofStructure};
use crate::structure::{CellType, Class, Id, Indexed, Level, Structure, WhyKind};
use crate::value::{atoms_of, atoms_of_tuple, Atom, Multiset, PartialInjection, Value};

/// The classes of `a` under `alpha ~ beta` iff `(r, alpha)` and `(r, beta)`
/// are isomorphic, with the multiplicities of `a`.
pub fn q_split(r: &[Value], a: &Multiset) -> Vec<Multiset> {
    let mut classes: Vec<(Value, Multiset)> = Vec::new();
    let with = |x: &Value| {
        let mut t = r.to_vec();
        t.push(x.clone());
        t
    };
    for (x, n) in a.entries() {
        let tx = with(x);
        match classes.iter_mut().find(|(rep, _)| result_iso(&with(rep), &tx).is_some()) {
            Some((_, class)) => class.insert(x.clone(), n),
            None => {
                let mut m = Multiset::new();
                m.insert(x.clone(), n);
                classes.push((x.clone(), m));
            }
        }
    }
    classes.into_iter().map(|(_, m)| m).collect()
}

/// Connected components of `d0` for the relation "shares an atom".
pub fn bridges(d0: &BTreeSet<Value>) -> Result<Vec<BTreeSet<Value>>, SeparationError> {
    let items: Vec<&Value> = d0.iter().collect();
    if let Some(v) = items.iter().find(|v| !v.has_atoms()) {
        return Err(SeparationError::Precondition(format!("{v} has no atom")));
    }
    let mut parent: Vec<usize> = (0..items.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut owner: BTreeMap<Atom, usize> = BTreeMap::new();
    for (i, v) in items.iter().enumerate() {
        for a in atoms_of(v) {
            match owner.get(&a) {
                Some(&j) => {
                    let (x, y) = (find(&mut parent, i), find(&mut parent, j));
                    parent[x] = y;
                }
                None => {
                    owner.insert(a, i);
                }
            }
        }
    }
    let mut comps: BTreeMap<usize, BTreeSet<Value>> = BTreeMap::new();
    for (i, v) in items.iter().enumerate() {
        let root = find(&mut parent, i);
        comps.entry(root).or_default().insert((*v).clone());
    }
    let mut out: Vec<BTreeSet<Value>> = comps.into_values().collect();
    out.sort();
    Ok(out)
}

/// Splits a tuple of multisets along the bridges of the union of their
/// supports.
pub fn bridge_split(a: &[Multiset]) -> Result<BTreeSet<Vec<Multiset>>, SeparationError> {
    let d0: BTreeSet<Value> = a.iter().flat_map(|m| m.support().cloned()).collect();
    let comps = bridges(&d0)?;
    Ok(comps.iter().map(|c| a.iter().map(|m| m.filter(|v| c.contains(v))).collect()).collect())
}

/// Classes of a set of tuples of multisets under isomorphism.
pub fn r_quotient(set: &BTreeSet<Vec<Multiset>>) -> Vec<BTreeSet<Vec<Multiset>>> {
    let mut classes: Vec<BTreeSet<Vec<Multiset>>> = Vec::new();
    for t in set {
        match classes.iter_mut().find(|c| tuple_multiset_iso(c.first().expect("nonempty"), t).is_some()) {
            Some(c) => {
                c.insert(t.clone());
            }
            None => classes.push(BTreeSet::from([t.clone()])),
        }
    }
    classes
}

/// Where and why the matching of two experiments stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub case: String,
    pub level: usize,
    pub detail: String,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at level {}: {}", self.case, self.level, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    SameLps(ExpIso),
    DifferentLps(Trace),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub k: u32,
    pub outcome: Outcome,
}

impl Verdict {
    pub fn is_same(&self) -> bool {
        matches!(self.outcome, Outcome::SameLps(_))
    }
}

type Step = Result<StructIso, Trace>;

struct Matcher {
    k: u32,
}

fn fail(case: &str, level: usize, detail: impl Into<String>) -> Trace {
    Trace { case: case.into(), level, detail: detail.into() }
}

fn bind(map: &mut BTreeMap<Id, Id>, a: &Id, b: &Id) -> bool {
    match map.get(a) {
        Some(x) => x == b,
        None => {
            map.insert(a.clone(), b.clone());
            true
        }
    }
}

/// The conclusion standing for an auxiliary port after its cell is gone:
/// the port itself, or the principal port it was wired to.
fn exposed(before: &Structure, after: &Structure, p: &Id) -> Id {
    if after.ports().contains(p) {
        p.clone()
    } else {
        before.partner(p).expect("auxiliary ports are wired").clone()
    }
}

fn restrict_labels(s: &Structure, e: &KExperiment) -> BTreeMap<Id, Value> {
    let keep: BTreeSet<Id> = s.axioms().into_iter().flat_map(|(p, q)| [p, q]).collect();
    e.axiom_labels().iter().filter(|(p, _)| keep.contains(*p)).map(|(p, v)| (p.clone(), v.clone())).collect()
}

impl Matcher {
    fn eval(&self, s: &Indexed<Structure>, e: &KExperiment) -> Result<KExperiment, SeparationError> {
        Ok(eval_k_experiment(s, &restrict_labels(s.structure(), e), self.k)?)
    }

    fn go(
        &self,
        a: &Indexed<Structure>,
        e: &KExperiment,
        b: &Indexed<Structure>,
        f: &KExperiment,
        level: usize,
    ) -> Result<Step, SeparationError> {
        if result_iso(e.result(), f.result()).is_none() {
            return Ok(Err(fail("result", level, "results are not isomorphic")));
        }
        let (sa, sb) = (a.structure(), b.structure());
        let class = sa.classify()?;
        let class_b = sb.classify()?;
        if class != class_b {
            return Ok(Err(fail(class.name(), level, format!("the other structure is in class {class_b}"))));
        }
        let step = match class {
            Class::Empty => self.empty(a, b, level),
            Class::Ax => self.ax(a, e, b, f, level)?,
            Class::Mult | Class::Unit | Class::Weak | Class::Der => self.peel(a, e, b, f, class, level)?,
            Class::Contr => self.contr(a, e, b, f, level)?,
            Class::ContrUnit | Class::BangUnit => self.reduce(a, e, b, f, class, level)?,
            Class::CBox => self.cbox(a, e, b, f, level)?,
        };
        Ok(step.and_then(|iso| match validate_struct_iso(a, b, &iso) {
            Ok(()) => Ok(iso),
            Err(msg) => Err(fail(class.name(), level, msg)),
        }))
    }

    fn counterpart<'s>(&self, a: &Indexed<Structure>, b: &'s Indexed<Structure>, l: &Id) -> Option<&'s Id> {
        let i = a.index_of(&a.structure().cells()[l].principal)?;
        b.structure().owner(b.at(i)?)
    }

    fn empty(&self, a: &Indexed<Structure>, b: &Indexed<Structure>, level: usize) -> Step {
        let mut iso = StructIso::default();
        for i in 1..=a.len() {
            let (p, q) = (a.at(i).expect("index"), b.at(i).ok_or_else(|| fail("empty", level, "index missing"))?);
            iso.ports.insert(p.clone(), q.clone());
            match (a.structure().owner(p), b.structure().owner(q)) {
                (Some(l), Some(m)) => {
                    iso.cells.insert(l.clone(), m.clone());
                }
                (None, None) => {}
                _ => return Err(fail("empty", level, format!("conclusion {i} is attached on one side only"))),
            }
        }
        Ok(iso)
    }

    fn ax(
        &self,
        a: &Indexed<Structure>,
        e: &KExperiment,
        b: &Indexed<Structure>,
        f: &KExperiment,
        level: usize,
    ) -> Result<Step, SeparationError> {
        let (p, q) = a.structure().isolated_axioms().into_iter().next().expect("class ax");
        let (i, j) = (a.index_of(&p).expect("conclusion"), a.index_of(&q).expect("conclusion"));
        let (Some(p2), Some(q2)) = (b.at(i).cloned(), b.at(j).cloned()) else {
            return Ok(Err(fail("ax", level, "indices missing")));
        };
        if b.structure().partner(&p2) != Some(&q2)
            || !b.structure().isolated_axioms().iter().any(|(x, y)| (x == &p2 && y == &q2) || (x == &q2 && y == &p2))
        {
            return Ok(Err(fail("ax", level, format!("conclusions {i} and {j} are not an isolated axiom"))));
        }
        let a2 = drop_axiom(a, &p, &q)?;
        let b2 = drop_axiom(b, &p2, &q2)?;
        let (e2, f2) = (self.eval(&a2, e)?, self.eval(&b2, f)?);
        let step = self.go(&a2, &e2, &b2, &f2, level + 1)?;
        Ok(step.map(|mut iso| {
            iso.ports.insert(p.clone(), p2.clone());
            iso.ports.insert(q.clone(), q2.clone());
            iso
        }))
    }

    fn peel(
        &self,
        a: &Indexed<Structure>,
        e: &KExperiment,
        b: &Indexed<Structure>,
        f: &KExperiment,
        class: Class,
        level: usize,
    ) -> Result<Step, SeparationError> {
        let name = class.name();
        let l = a.structure().class_witnesses(class).into_iter().next().expect("witness");
        let Some(m) = self.counterpart(a, b, &l).cloned() else {
            return Ok(Err(fail(name, level, format!("no cell under the conclusion of {l}"))));
        };
        let (c, d) = (&a.structure().cells()[&l], &b.structure().cells()[&m]);
        if c.ty != d.ty || c.arity() != d.arity() || a.structure().why_kind(&l) != b.structure().why_kind(&m) {
            return Ok(Err(fail(name, level, format!("cells {l} and {m} differ"))));
        }
        if !b.structure().is_terminal(&m) {
            return Ok(Err(fail(name, level, format!("{m} is not terminal"))));
        }
        let (a2, b2) = (peel_cell(a, &l)?, peel_cell(b, &m)?);
        let (e2, f2) = (self.eval(&a2, e)?, self.eval(&b2, f)?);
        let step = self.go(&a2, &e2, &b2, &f2, level + 1)?;
        Ok(step.and_then(|mut iso| {
            let ok = bind(&mut iso.cells, &l, &m)
                && bind(&mut iso.ports, &c.principal, &d.principal)
                && c.aux.iter().zip(&d.aux).all(|(x, y)| bind(&mut iso.ports, x, y));
            if ok {
                Ok(iso)
            } else {
                Err(fail(name, level, "lifting is inconsistent"))
            }
        }))
    }

    fn contr(
        &self,
        a: &Indexed<Structure>,
        e: &KExperiment,
        b: &Indexed<Structure>,
        f: &KExperiment,
        level: usize,
    ) -> Result<Step, SeparationError> {
        let (sa, sb) = (a.structure(), b.structure());
        let l = sa.class_witnesses(Class::Contr).into_iter().next().expect("witness");
        let Some(m) = self.counterpart(a, b, &l).cloned() else {
            return Ok(Err(fail("contr", level, format!("no cell under the conclusion of {l}"))));
        };
        if sb.why_kind(&m) != Some(WhyKind::Contraction) || sb.cells()[&m].arity() != sa.cells()[&l].arity() {
            return Ok(Err(fail("contr", level, format!("{m} is not a matching contraction"))));
        }
        let p = sa.cells()[&l].aux.iter().find(|p| sa.door_count(p) == Some(0)).expect("contraction").clone();
        let a2 = detach_port(a, &l, &p)?;
        let e2 = self.eval(&a2, e)?;
        let candidates: Vec<Id> = sb.cells()[&m].aux.iter().filter(|q| sb.door_count(q) == Some(0)).cloned().collect();
        let mut last = fail("contr", level, "no auxiliary port matches");
        for q in candidates {
            let b2 = detach_port(b, &m, &q)?;
            let f2 = self.eval(&b2, f)?;
            if result_iso(e2.result(), f2.result()).is_none() {
                continue;
            }
            match self.go(&a2, &e2, &b2, &f2, level + 1)? {
                Ok(mut iso) => {
                    if bind(&mut iso.ports, &p, &q) && validate_struct_iso(a, b, &iso).is_ok() {
                        return Ok(Ok(iso));
                    }
                }
                Err(t) => last = t,
            }
        }
        Ok(Err(last))
    }

    fn reduce(
        &self,
        a: &Indexed<Structure>,
        e: &KExperiment,
        b: &Indexed<Structure>,
        f: &KExperiment,
        class: Class,
        level: usize,
    ) -> Result<Step, SeparationError> {
        let name = class.name();
        let l = a.structure().class_witnesses(class).into_iter().next().expect("witness");
        let Some(m) = self.counterpart(a, b, &l).cloned() else {
            return Ok(Err(fail(name, level, format!("no cell under the conclusion of {l}"))));
        };
        if !b.structure().class_witnesses(class).contains(&m) {
            return Ok(Err(fail(name, level, format!("{m} does not witness {name}"))));
        }
        let (a2, e2) = reduce_exp(a, e, &l)?;
        let (b2, f2) = reduce_exp(b, f, &m)?;
        let step = self.go(&a2, &e2, &b2, &f2, level + 1)?;
        if class == Class::ContrUnit {
            return Ok(step);
        }
        let (c, d) = (&a.structure().cells()[&l], &b.structure().cells()[&m]);
        Ok(step.and_then(|mut iso| {
            let ok = bind(&mut iso.cells, &l, &m)
                && bind(&mut iso.ports, &c.principal, &d.principal)
                && bind(&mut iso.ports, &c.aux[0], &d.aux[0]);
            if ok {
                Ok(iso)
            } else {
                Err(fail(name, level, "lifting is inconsistent"))
            }
        }))
    }

    fn cbox(
        &self,
        a: &Indexed<Structure>,
        e: &KExperiment,
        b: &Indexed<Structure>,
        f: &KExperiment,
        level: usize,
    ) -> Result<Step, SeparationError> {
        let (a2, e2) = strip_layer_exp(a, e)?;
        let (b2, f2) = strip_layer_exp(b, f)?;
        let step = self.go(&a2, &e2, &b2, &f2, level + 1)?;
        let bangs: Vec<Id> = a
            .structure()
            .terminal_cells()
            .into_iter()
            .filter(|l| a.structure().cells()[l].ty == CellType::Bang)
            .collect();
        Ok(step.and_then(|mut iso| {
            for l in &bangs {
                let m = self.counterpart(a, b, l).ok_or_else(|| fail("cbox", level, "bang without counterpart"))?;
                let (c, d) = (&a.structure().cells()[l], &b.structure().cells()[m]);
                if d.ty != CellType::Bang {
                    return Err(fail("cbox", level, format!("{m} is not a bang")));
                }
                let ok = bind(&mut iso.cells, l, m)
                    && bind(&mut iso.ports, &c.principal, &d.principal)
                    && bind(&mut iso.ports, &c.aux[0], &d.aux[0]);
                if !ok {
                    return Err(fail("cbox", level, "lifting is inconsistent"));
                }
            }
            Ok(iso)
        }))
    }
}

/// Removes an isolated axiom; the remaining conclusions keep their order.
fn drop_axiom(s: &Indexed<Structure>, p: &Id, q: &Id) -> Result<Indexed<Structure>, SeparationError> {
    let st = s.structure();
    let gone = [s.index_of(p).expect("conclusion"), s.index_of(q).expect("conclusion")];
    let ports = st.ports().iter().filter(|x| *x != p && *x != q).cloned().collect();
    let wires: Vec<_> = st.wires().iter().filter(|(x, _)| x != p && x != q).cloned().collect();
    let next = Structure::new(st.cells().clone(), ports, st.doors().clone(), wires)?;
    let ind = s
        .ind()
        .iter()
        .filter(|(x, _)| *x != p && *x != q)
        .map(|(x, &i)| (x.clone(), i - gone.iter().filter(|&&g| g < i).count()))
        .collect();
    Ok(Indexed::new(next, ind)?)
}

/// Removes a terminal cell; the conclusions above it are numbered after the
/// others, from left to right.
fn peel_cell(s: &Indexed<Structure>, l: &Id) -> Result<Indexed<Structure>, SeparationError> {
    let st = s.structure();
    let c = &st.cells()[l];
    let i0 = s.index_of(&c.principal).expect("terminal");
    let next = st.remove_terminal(core::slice::from_ref(l))?;
    let mut ind: BTreeMap<Id, usize> = s
        .ind()
        .iter()
        .filter(|(x, _)| **x != c.principal)
        .map(|(x, &i)| (x.clone(), if i > i0 { i - 1 } else { i }))
        .collect();
    let n = ind.len();
    for (j, p) in c.aux.iter().enumerate() {
        ind.insert(exposed(st, &next, p), n + j + 1);
    }
    Ok(Indexed::new(next, ind)?)
}

/// Detaches an auxiliary port of a why cell; it becomes the last conclusion.
fn detach_port(s: &Indexed<Structure>, l: &Id, p: &Id) -> Result<Indexed<Structure>, SeparationError> {
    let st = s.structure();
    let next = st.detach(l, p)?;
    let mut ind = s.ind().clone();
    ind.insert(exposed(st, &next, p), ind.len() + 1);
    Ok(Indexed::new(next, ind)?)
}

fn lift_rho(e: &KExperiment, f: &KExperiment, a: &Structure, iso: &StructIso) -> Option<PartialInjection> {
    let mut sigma: BTreeMap<Atom, Atom> = BTreeMap::new();
    for (p, _) in a.axioms() {
        match (e.axiom_labels().get(&p)?, f.axiom_labels().get(iso.ports.get(&p)?)?) {
            (Value::Atom(x), Value::Atom(y)) => {
                sigma.insert(x.clone(), y.clone());
            }
            _ => return None,
        }
    }
    let atoms: BTreeSet<Atom> = e.labels().values().flat_map(atoms_of).collect();
    let mut rho = PartialInjection::new();
    for at in atoms {
        let base = Atom::plain(&at.name);
        let img = sigma.get(&base)?;
        if !rho.bind(&at, &img.with_suffix(&at.loc)) {
            return None;
        }
    }
    Some(rho)
}

/// Matches two injective atomic k-experiments with isomorphic results,
/// rebuilding an isomorphism of the structures with renamings of atoms.
pub fn key_match(
    a: &Indexed<Structure>,
    e: &KExperiment,
    b: &Indexed<Structure>,
    f: &KExperiment,
) -> Result<Result<ExpIso, Trace>, SeparationError> {
    let k = e.k();
    if f.k() != k {
        return Err(SeparationError::Precondition("experiments use different k".into()));
    }
    for (s, x) in [(a, e), (b, f)] {
        s.structure().require(Level::Lps)?;
        if !x.is_atomic() || !x.is_injective() {
            return Err(SeparationError::Precondition("experiments must be atomic and injective".into()));
        }
        if k as usize <= s.structure().measure().cosize {
            return Err(SeparationError::Precondition(format!("k = {k} does not exceed the cosize")));
        }
    }
    let matcher = Matcher { k };
    let iso = match matcher.go(a, e, b, f, 0)? {
        Ok(iso) => iso,
        Err(t) => return Ok(Err(t)),
    };
    let Some(rho) = lift_rho(e, f, a.structure(), &iso) else {
        return Ok(Err(fail("witness", 0, "axiom labels do not give a renaming")));
    };
    let rho_prime = PartialInjection::identity(f.labels().values().flat_map(atoms_of).collect::<BTreeSet<_>>().iter());
    let witness = ExpIso { phi: iso, rho, rho_prime };
    match validate_exp_iso(a, e, b, f, &witness) {
        Ok(()) => Ok(Ok(witness)),
        Err(msg) => Ok(Err(fail("witness", 0, msg))),
    }
}

/// The number of copies used by [`separate`].
pub fn choose_k(a: &Structure, b: &Structure) -> u32 {
    (a.measure().cosize.max(b.measure().cosize).max(1) + 1) as u32
}

fn as_lps<S: AsRef<Structure>>(s: &Indexed<S>) -> Indexed<Structure> {
    Indexed::new(s.structure().clone(), s.ind().clone()).expect("same conclusions")
}

/// Decides whether the linear proof-structures of `a` and `b` are isomorphic
/// by comparing the results of their canonical injective atomic
/// k-experiments, and rebuilds a witness when they are.
pub fn separate<S: AsRef<Structure>, T: AsRef<Structure>>(
    a: &Indexed<S>,
    b: &Indexed<T>,
) -> Result<Verdict, SeparationError> {
    let (a, b) = (as_lps(a), as_lps(b));
    for s in [&a, &b] {
        s.structure().require(Level::Lps)?;
    }
    let k = choose_k(a.structure(), b.structure());
    let e = canonical_injective_atomic(&a, k)?;
    let f = canonical_injective_atomic(&b, k)?;
    if a.len() != b.len() || result_iso(e.result(), f.result()).is_none() {
        let trace = fail("result", 0, "results of the canonical experiments are not isomorphic");
        return Ok(Verdict { k, outcome: Outcome::DifferentLps(trace) });
    }
    let outcome = match key_match(&a, &e, &b, &f)? {
        Ok(w) => Outcome::SameLps(w),
        Err(t) => Outcome::DifferentLps(t),
    };
    Ok(Verdict { k, outcome })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsVerdict {
    Iso(StructIso),
    NotIso(String),
    LpsOnly(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectedVerdict {
    pub lps: Verdict,
    pub ps: PsVerdict,
}

/// For connected structures the box function is determined by the linear
/// proof-structure, so the LPS witness is checked against the boxes.
pub fn separate_connected(
    a: &Indexed<ProofStructure>,
    b: &Indexed<ProofStructure>,
) -> Result<ConnectedVerdict, SeparationError> {
    let lps = separate(a, b)?;
    let ps = match &lps.outcome {
        Outcome::DifferentLps(t) => PsVerdict::NotIso(t.to_string()),
        Outcome::SameLps(w) => {
            if !a.structure().is_connected() || !b.structure().is_connected() {
                PsVerdict::LpsOnly("structures are not connected; boxes are not determined".into())
            } else {
                let (ra, rb) = (recover_boxes(a.structure())?, recover_boxes(b.structure())?);
                if ra.b() != a.base().b() || rb.b() != b.base().b() {
                    PsVerdict::NotIso("box function differs from the one determined by the structure".into())
                } else {
                    match validate_ps_iso(a, b, &w.phi) {
                        Ok(()) => PsVerdict::Iso(w.phi.clone()),
                        Err(msg) => PsVerdict::NotIso(msg),
                    }
                }
            }
        }
    };
    Ok(ConnectedVerdict { lps, ps })
}

/// The atoms of a tuple, for reports.
pub fn atoms_in(r: &[Value]) -> BTreeSet<Atom> {
    atoms_of_tuple(r)
}
