//! Experiments of proof-structures: labels are multisets, each bang at depth
//! zero picks a multiset of experiments of its box. Also the projection of
//! k-experiments onto proof-structure experiments and a bounded enumeration
//! of the interpretation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::ExperimentError;
use crate::experiment::KExperiment;
use crate::ps::ProofStructure;
use crate::structure::{CellType, Id, Indexed, Structure};
use crate::value::{dig_step, orthogonal, Atom, Multiset, PartialInjection, Pol, Value};

/// What an experiment of a proof-structure is made of: labels for the
/// axioms at depth zero, and for each bang at depth zero the experiments of
/// its box, one per copy. The outer list of `boxes` has length one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpDesc {
    pub axiom_labels: BTreeMap<Id, Value>,
    pub boxes: BTreeMap<Id, Vec<Vec<ExpDesc>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsExperiment {
    pub labels: BTreeMap<Id, Multiset>,
    pub copies: BTreeMap<Id, Vec<PsExperiment>>,
}

/// The bangs at depth zero, with the ports of their boxes.
fn outer_boxes(r: &ProofStructure) -> BTreeMap<Id, BTreeSet<Id>> {
    let all: BTreeMap<&Id, BTreeSet<Id>> = r.lps().bangs().map(|(v, _)| (v, r.closure(v))).collect();
    all.iter()
        .filter(|(v, _)| {
            let pri = &r.lps().cells()[**v].principal;
            !all.values().any(|b| b.contains(pri))
        })
        .map(|(v, b)| ((*v).clone(), b.clone()))
        .collect()
}

/// The conclusion of the box of `v` standing for its auxiliary port.
fn box_premise(r: &ProofStructure, v: &Id) -> Id {
    let aux = &r.lps().cells()[v].aux[0];
    let inner = &r.boxes()[v];
    if inner.lps().ports().contains(aux) {
        aux.clone()
    } else {
        r.lps().partner(aux).expect("auxiliary ports are wired").clone()
    }
}

fn singleton(m: &Multiset, p: &Id) -> Result<Value, ExperimentError> {
    let mut it = m.elements();
    match (it.next(), it.next()) {
        (Some(v), None) => Ok(v.clone()),
        _ => Err(ExperimentError::Shape(format!("port {p} at depth zero needs exactly one label"))),
    }
}

/// Labels of the ports at depth zero, given the labels of the box ports and
/// of the principal ports of the outer bangs.
fn level_labels(
    r: &ProofStructure,
    outer: &BTreeMap<Id, BTreeSet<Id>>,
    axiom_labels: &BTreeMap<Id, Value>,
    mut labels: BTreeMap<Id, Multiset>,
) -> Result<BTreeMap<Id, Multiset>, ExperimentError> {
    let s = r.lps();
    let inside: BTreeSet<&Id> = outer.values().flatten().collect();
    let axioms: Vec<(Id, Id)> =
        s.axioms().into_iter().filter(|(p, q)| !inside.contains(p) && !inside.contains(q)).collect();
    let depth0: BTreeSet<&Id> = axioms.iter().flat_map(|(p, q)| [p, q]).collect();
    if let Some(p) = axiom_labels.keys().find(|p| !depth0.contains(p)) {
        return Err(ExperimentError::Shape(format!("{p} is not an axiom port at depth zero")));
    }
    for (p, q) in &axioms {
        let (a, b) = match (axiom_labels.get(p), axiom_labels.get(q)) {
            (Some(a), Some(b)) if orthogonal(a) == *b => (a.clone(), b.clone()),
            (Some(_), Some(_)) => return Err(ExperimentError::NotOrthogonal(p.clone(), q.clone())),
            (Some(a), None) => (a.clone(), orthogonal(a)),
            (None, Some(b)) => (orthogonal(b), b.clone()),
            (None, None) => return Err(ExperimentError::MissingLabel(p.clone())),
        };
        if !a.is_plain() {
            return Err(ExperimentError::NotInD(p.clone()));
        }
        labels.insert(p.clone(), Multiset::singleton(a));
        labels.insert(q.clone(), Multiset::singleton(b));
    }
    let ports: Vec<Id> = s.ports().iter().filter(|p| !inside.contains(p)).cloned().collect();
    for p in &ports {
        fill(s, p, &mut labels)?;
    }
    Ok(labels)
}

fn fill(s: &Structure, p: &Id, labels: &mut BTreeMap<Id, Multiset>) -> Result<Multiset, ExperimentError> {
    if let Some(m) = labels.get(p) {
        return Ok(m.clone());
    }
    let m = match s.owner_cell(p) {
        Some(c) if c.principal == *p => {
            let aux: Vec<Multiset> = c.aux.iter().map(|q| fill(s, q, labels)).collect::<Result<_, _>>()?;
            let one = |i: usize| singleton(&aux[i], &c.aux[i]);
            Multiset::singleton(match c.ty {
                CellType::Tensor => Value::pair(Pol::Pos, one(0)?, one(1)?),
                CellType::Par => Value::pair(Pol::Neg, one(0)?, one(1)?),
                CellType::One => Value::Unit(Pol::Pos),
                CellType::Bot => Value::Unit(Pol::Neg),
                CellType::Why => Value::Bag(Pol::Neg, Multiset::sum(&aux)),
                CellType::Bang => return Err(ExperimentError::Shape(format!("bang {p} has no box experiment"))),
            })
        }
        _ => match s.partner(p) {
            Some(q) if s.is_principal(q) => fill(s, &q.clone(), labels)?,
            _ => return Err(ExperimentError::MissingLabel(p.clone())),
        },
    };
    labels.insert(p.clone(), m.clone());
    Ok(m)
}

/// Adds the labels a bang at depth zero gets from the chosen copies of its
/// box: sums on the box ports, and the bag of the premises on its principal.
fn add_box_labels(
    r: &ProofStructure,
    v: &Id,
    closure: &BTreeSet<Id>,
    copies: &[&BTreeMap<Id, Multiset>],
    labels: &mut BTreeMap<Id, Multiset>,
) -> Result<(), ExperimentError> {
    let star = box_premise(r, v);
    for p in closure {
        if copies.iter().all(|c| c.contains_key(p)) {
            labels.insert(p.clone(), Multiset::sum(copies.iter().map(|c| &c[p])));
        }
    }
    let premises = Multiset::sum(copies.iter().map(|c| &c[&star]));
    let cell = &r.lps().cells()[v];
    labels.insert(cell.aux[0].clone(), premises.clone());
    labels.insert(cell.principal.clone(), Multiset::singleton(Value::Bag(Pol::Pos, premises)));
    Ok(())
}

fn eval_inner(r: &ProofStructure, desc: &ExpDesc) -> Result<PsExperiment, ExperimentError> {
    let outer = outer_boxes(r);
    if let Some(v) = desc.boxes.keys().find(|v| !outer.contains_key(*v)) {
        return Err(ExperimentError::Shape(format!("{v} is not a bang at depth zero")));
    }
    let mut labels = BTreeMap::new();
    let mut all_copies = BTreeMap::new();
    for (v, closure) in &outer {
        let copies = match desc.boxes.get(v).map(Vec::as_slice) {
            Some([copies]) => copies.as_slice(),
            Some(_) => {
                return Err(ExperimentError::Shape(format!("bang {v} at depth zero takes one multiset of copies")))
            }
            None => &[],
        };
        let inner = &r.boxes()[v];
        let exps: Vec<PsExperiment> = copies.iter().map(|d| eval_inner(inner, d)).collect::<Result<_, _>>()?;
        let maps: Vec<&BTreeMap<Id, Multiset>> = exps.iter().map(|e| &e.labels).collect();
        add_box_labels(r, v, closure, &maps, &mut labels)?;
        all_copies.insert(v.clone(), exps);
    }
    let labels = level_labels(r, &outer, &desc.axiom_labels, labels)?;
    Ok(PsExperiment { labels, copies: all_copies })
}

fn result_of(r: &Indexed<ProofStructure>, labels: &BTreeMap<Id, Multiset>) -> Result<Vec<Value>, ExperimentError> {
    r.ordered().iter().map(|c| singleton(&labels[c], c)).collect()
}

/// Evaluates the experiment described by `desc`, returning it with its result.
pub fn eval_ps_experiment(
    r: &Indexed<ProofStructure>,
    desc: &ExpDesc,
) -> Result<(PsExperiment, Vec<Value>), ExperimentError> {
    let e = eval_inner(r.base(), desc)?;
    let result = result_of(r, &e.labels)?;
    Ok((e, result))
}

/// Checks every equation of an experiment of `r`, recursively in the boxes.
pub fn check_ps_experiment(r: &ProofStructure, e: &PsExperiment) -> Result<(), ExperimentError> {
    let s = r.lps();
    let bad = |msg: String| Err(ExperimentError::Shape(msg));
    let outer = outer_boxes(r);
    let get = |p: &Id| e.labels.get(p).ok_or_else(|| ExperimentError::MissingLabel(p.clone()));
    if e.copies.keys().collect::<BTreeSet<_>>() != outer.keys().collect::<BTreeSet<_>>() {
        return bad("copies are not given exactly for the bangs at depth zero".into());
    }
    for (v, closure) in &outer {
        let inner = &r.boxes()[v];
        let copies = &e.copies[v];
        for c in copies {
            check_ps_experiment(inner, c)?;
        }
        for p in closure.iter().filter(|p| inner.lps().ports().contains(*p)) {
            if *get(p)? != Multiset::sum(copies.iter().map(|c| &c.labels[p])) {
                return bad(format!("box port {p} is not the sum over the copies"));
            }
        }
        let star = box_premise(r, v);
        let premises = Multiset::sum(copies.iter().map(|c| &c.labels[&star]));
        let cell = &s.cells()[v];
        if *get(&cell.aux[0])? != premises {
            return bad(format!("premise of bang {v} is not the sum over the copies"));
        }
        if *get(&cell.principal)? != Multiset::singleton(Value::Bag(Pol::Pos, premises)) {
            return bad(format!("equation of bang {v} fails"));
        }
    }
    let inside: BTreeSet<&Id> = outer.values().flatten().collect();
    for p in s.ports().iter().filter(|p| !inside.contains(p)) {
        singleton(get(p)?, p)?;
    }
    for c in s.cells().values() {
        if inside.contains(&c.principal) || c.ty == CellType::Bang {
            continue;
        }
        let aux: Vec<&Multiset> = c.aux.iter().map(get).collect::<Result<_, _>>()?;
        let one = |i: usize| singleton(aux[i], &c.aux[i]);
        let expected = match c.ty {
            CellType::Tensor => Value::pair(Pol::Pos, one(0)?, one(1)?),
            CellType::Par => Value::pair(Pol::Neg, one(0)?, one(1)?),
            CellType::One => Value::Unit(Pol::Pos),
            CellType::Bot => Value::Unit(Pol::Neg),
            CellType::Why => Value::Bag(Pol::Neg, Multiset::sum(aux.iter().copied())),
            CellType::Bang => unreachable!(),
        };
        if *get(&c.principal)? != Multiset::singleton(expected) {
            return bad(format!("equation of the cell with principal port {} fails", c.principal));
        }
    }
    for (p, q) in s.wires().iter().filter(|(p, q)| !inside.contains(p) && !inside.contains(q)) {
        let (a, b) = (get(p)?, get(q)?);
        if s.is_principal(p) || s.is_principal(q) {
            if a != b {
                return bad(format!("wire {{{p},{q}}} carries two labels"));
            }
        } else {
            let (x, y) = (singleton(a, p)?, singleton(b, q)?);
            if !x.is_plain() {
                return Err(ExperimentError::NotInD(p.clone()));
            }
            if orthogonal(&x) != y {
                return Err(ExperimentError::NotOrthogonal(p.clone(), q.clone()));
            }
        }
    }
    Ok(())
}

fn projection_desc(
    r: &ProofStructure,
    ke: &KExperiment,
    rho: &PartialInjection,
    suffix: &[u32],
) -> Result<ExpDesc, ExperimentError> {
    let outer = outer_boxes(r);
    let inside: BTreeSet<&Id> = outer.values().flatten().collect();
    let mut axiom_labels = BTreeMap::new();
    for (p, _) in r.lps().axioms() {
        if inside.contains(&p) {
            continue;
        }
        let v = ke.axiom_labels().get(&p).ok_or_else(|| ExperimentError::MissingLabel(p.clone()))?;
        axiom_labels.insert(p, rho.apply(&dig_step(suffix, v))?);
    }
    let mut boxes = BTreeMap::new();
    for v in outer.keys() {
        let inner = &r.boxes()[v];
        let mut copies = Vec::new();
        for i in 1..=ke.k() {
            let mut s = alloc::vec![i];
            s.extend_from_slice(suffix);
            copies.push(projection_desc(inner, ke, rho, &s)?);
        }
        boxes.insert(v.clone(), alloc::vec![copies]);
    }
    Ok(ExpDesc { axiom_labels, boxes })
}

/// The experiment of `r` with `k` copies of every box, whose axioms carry the
/// indexed atoms of `ke` renamed by `rho`.
pub fn project_to_ps(
    ke: &KExperiment,
    rho: &PartialInjection,
    r: &Indexed<ProofStructure>,
) -> Result<(PsExperiment, Vec<Value>), ExperimentError> {
    if let Some((a, b)) = rho.iter().find(|(_, b)| !b.is_plain()) {
        return Err(ExperimentError::Precondition(format!("{a} is sent to the indexed atom {b}")));
    }
    let expected = rho.apply_tuple(ke.result())?;
    let desc = projection_desc(r.base(), ke, rho, &[])?;
    let (e, result) = eval_ps_experiment(r, &desc)?;
    if result != expected {
        return Err(ExperimentError::Precondition("projected result differs from the renamed k-point".into()));
    }
    Ok((e, result))
}

/// A bang at depth zero, its box ports, the results of its box and the
/// multisets of copies to try.
type BoxChoices = (Id, BTreeSet<Id>, Vec<BTreeMap<Id, Multiset>>, Vec<Vec<usize>>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub results: BTreeSet<Vec<Value>>,
    pub truncated: bool,
}

/// Nondecreasing index sequences of length `0..=max_len` over `0..n`.
fn multisets(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = alloc::vec![Vec::new()];
    let mut frontier = alloc::vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            let from = s.last().copied().unwrap_or(0);
            for i in from..n {
                let mut t: Vec<usize> = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

struct Sampler<'a> {
    pool: &'a [Atom],
    max_copies: usize,
    budget: usize,
    truncated: bool,
}

impl Sampler<'_> {
    /// All restrictions to `wanted` of the labellings of experiments of `r`.
    fn run(
        &mut self,
        r: &ProofStructure,
        wanted: &BTreeSet<Id>,
    ) -> Result<BTreeSet<BTreeMap<Id, Multiset>>, ExperimentError> {
        let s = r.lps();
        let outer = outer_boxes(r);
        let inside: BTreeSet<&Id> = outer.values().flatten().collect();
        let axioms: Vec<Id> = s
            .axioms()
            .into_iter()
            .filter(|(p, q)| !inside.contains(p) && !inside.contains(q))
            .map(|(p, _)| p)
            .collect();
        let mut needed: BTreeSet<Id> = wanted.clone();
        for c in s.cells().values().filter(|c| c.ty == CellType::Why && !inside.contains(&c.principal)) {
            needed.extend(c.aux.iter().filter(|p| inside.contains(p)).cloned());
        }
        let mut options: Vec<BoxChoices> = Vec::new();
        for (v, closure) in &outer {
            let mut box_wanted: BTreeSet<Id> = needed.intersection(closure).cloned().collect();
            box_wanted.insert(box_premise(r, v));
            let inner = &r.boxes()[v];
            box_wanted.retain(|p| inner.lps().ports().contains(p));
            let results: Vec<_> = self.run(inner, &box_wanted)?.into_iter().collect();
            let choices = multisets(results.len(), self.max_copies);
            options.push((v.clone(), closure.clone(), results, choices));
        }
        let mut out = BTreeSet::new();
        let label_choices = self.pool.len().pow(axioms.len() as u32);
        let mut radix: Vec<usize> = alloc::vec![label_choices];
        radix.extend(options.iter().map(|o| o.3.len()));
        if radix.contains(&0) {
            return Ok(out);
        }
        let mut digits = alloc::vec![0usize; radix.len()];
        loop {
            if self.budget == 0 {
                self.truncated = true;
                break;
            }
            self.budget -= 1;
            let mut code = digits[0];
            let mut labels_at = BTreeMap::new();
            for p in &axioms {
                labels_at.insert(p.clone(), Value::Atom(self.pool[code % self.pool.len()].clone()));
                code /= self.pool.len();
            }
            let mut labels = BTreeMap::new();
            for (i, (v, closure, results, choices)) in options.iter().enumerate() {
                let copies: Vec<&BTreeMap<Id, Multiset>> =
                    choices[digits[i + 1]].iter().map(|&j| &results[j]).collect();
                add_box_labels(r, v, closure, &copies, &mut labels)?;
            }
            let labels = level_labels(r, &outer, &labels_at, labels)?;
            out.insert(wanted.iter().map(|p| (p.clone(), labels[p].clone())).collect());
            let mut i = 0;
            loop {
                if i == digits.len() {
                    return Ok(out);
                }
                digits[i] += 1;
                if digits[i] < radix[i] {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
        Ok(out)
    }
}

/// Results of all experiments whose axioms carry atoms of `pool` and whose
/// boxes take at most `max_copies` copies, stopping after `cap` labellings.
pub fn sample_interpretation(
    r: &Indexed<ProofStructure>,
    pool: &[Atom],
    max_copies: usize,
    cap: usize,
) -> Result<Sample, ExperimentError> {
    if pool.is_empty() && !r.structure().axioms().is_empty() {
        return Ok(Sample { results: BTreeSet::new(), truncated: false });
    }
    let mut sampler = Sampler { pool, max_copies, budget: cap, truncated: false };
    let wanted: BTreeSet<Id> = r.ordered().iter().cloned().collect();
    let maps = sampler.run(r.base(), &wanted)?;
    let mut results = BTreeSet::new();
    for m in maps {
        results.insert(result_of(r, &m)?);
    }
    Ok(Sample { results, truncated: sampler.truncated })
}
