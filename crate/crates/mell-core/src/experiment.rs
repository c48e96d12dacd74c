//! k-experiments of linear proof-structures: labels are propagated from the
//! axioms downwards, every bang taking `k` indexed copies of its premise.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::ExperimentError;
use crate::structure::{CellType, Class, Id, Indexed, Level, Structure};
use crate::value::{atoms_of, dig_multi, orthogonal, undig, Atom, Multiset, Pol, Value};

/// A total labelling of the ports of a structure by a k-experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KExperiment {
    k: u32,
    axiom_labels: BTreeMap<Id, Value>,
    labels: BTreeMap<Id, Value>,
    result: Vec<Value>,
    atomic: bool,
    injective: bool,
}

impl KExperiment {
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Labels of both ends of every axiom.
    pub fn axiom_labels(&self) -> &BTreeMap<Id, Value> {
        &self.axiom_labels
    }

    pub fn labels(&self) -> &BTreeMap<Id, Value> {
        &self.labels
    }

    pub fn label(&self, p: &str) -> Option<&Value> {
        self.labels.get(p)
    }

    pub fn result(&self) -> &[Value] {
        &self.result
    }

    /// Every axiom is labelled by a plain atom.
    pub fn is_atomic(&self) -> bool {
        self.atomic
    }

    /// Distinct axioms share no atom.
    pub fn is_injective(&self) -> bool {
        self.injective
    }
}

fn bang_label(k: u32, premise: &Value) -> Value {
    Value::Bag(Pol::Pos, dig_multi(k, 1, &Multiset::singleton(premise.clone())))
}

fn why_label(k: u32, branches: impl Iterator<Item = (Value, u32)>) -> Value {
    let mut sum = Multiset::new();
    for (v, d) in branches {
        sum.add(&dig_multi(k, d, &Multiset::singleton(v)));
    }
    Value::Bag(Pol::Neg, sum)
}

/// Fills in both ends of every axiom from labels given on at least one end.
fn complete_axiom_labels(s: &Structure, given: &BTreeMap<Id, Value>) -> Result<BTreeMap<Id, Value>, ExperimentError> {
    let axioms = s.axioms();
    let axiom_ports: BTreeSet<&Id> = axioms.iter().flat_map(|(p, q)| [p, q]).collect();
    if let Some(p) = given.keys().find(|p| !axiom_ports.contains(p)) {
        return Err(ExperimentError::Shape(format!("{p} is not an axiom port")));
    }
    let mut out = BTreeMap::new();
    for (p, q) in &axioms {
        let (a, b) = match (given.get(p), given.get(q)) {
            (Some(a), Some(b)) => {
                if orthogonal(a) != *b {
                    return Err(ExperimentError::NotOrthogonal(p.clone(), q.clone()));
                }
                (a.clone(), b.clone())
            }
            (Some(a), None) => (a.clone(), orthogonal(a)),
            (None, Some(b)) => (orthogonal(b), b.clone()),
            (None, None) => return Err(ExperimentError::MissingLabel(p.clone())),
        };
        for (x, v) in [(p, &a), (q, &b)] {
            if !v.is_plain() {
                return Err(ExperimentError::NotInD(x.clone()));
            }
        }
        out.insert(p.clone(), a);
        out.insert(q.clone(), b);
    }
    Ok(out)
}

struct Propagation<'a> {
    s: &'a Structure,
    k: u32,
    labels: BTreeMap<Id, Value>,
}

impl Propagation<'_> {
    fn label(&mut self, p: &Id) -> Result<Value, ExperimentError> {
        if let Some(v) = self.labels.get(p) {
            return Ok(v.clone());
        }
        // walk up to a port whose premises are all labelled, then come back
        let mut stack = alloc::vec![p.clone()];
        let mut guard = 0usize;
        while let Some(top) = stack.last().cloned() {
            guard += 1;
            if guard > 4 * self.s.ports().len() + 4 {
                return Err(ExperimentError::Cycle(top));
            }
            let missing: Vec<Id> =
                self.s.succ(&top).into_iter().filter(|q| !self.labels.contains_key(*q)).cloned().collect();
            if !missing.is_empty() {
                stack.extend(missing);
                continue;
            }
            stack.pop();
            if self.labels.contains_key(&top) {
                continue;
            }
            let v = self.local(&top)?;
            self.labels.insert(top, v);
        }
        Ok(self.labels[p].clone())
    }

    fn local(&self, p: &Id) -> Result<Value, ExperimentError> {
        let s = self.s;
        match s.owner_cell(p) {
            Some(c) if c.principal == *p => {
                let l = |i: usize| self.labels[&c.aux[i]].clone();
                Ok(match c.ty {
                    CellType::Tensor => Value::pair(Pol::Pos, l(0), l(1)),
                    CellType::Par => Value::pair(Pol::Neg, l(0), l(1)),
                    CellType::One => Value::Unit(Pol::Pos),
                    CellType::Bot => Value::Unit(Pol::Neg),
                    CellType::Bang => bang_label(self.k, &l(0)),
                    CellType::Why => {
                        why_label(self.k, c.aux.iter().map(|q| (self.labels[q].clone(), s.door_count(q).unwrap_or(0))))
                    }
                })
            }
            _ => match s.partner(p) {
                Some(q) if s.is_principal(q) => Ok(self.labels[q].clone()),
                _ => Err(ExperimentError::MissingLabel(p.clone())),
            },
        }
    }
}

/// Propagates the axiom labels to every port. Labels may be given on either
/// end of an axiom; the other end gets the orthogonal.
pub fn eval_k_experiment<S: AsRef<Structure>>(
    s: &Indexed<S>,
    axiom_labels: &BTreeMap<Id, Value>,
    k: u32,
) -> Result<KExperiment, ExperimentError> {
    if k == 0 {
        return Err(ExperimentError::ZeroK);
    }
    let st = s.structure();
    st.require(Level::Plps)?;
    let axiom_labels = complete_axiom_labels(st, axiom_labels)?;
    let mut prop = Propagation { s: st, k, labels: axiom_labels.clone() };
    for p in st.ports() {
        prop.label(p)?;
    }
    let labels = prop.labels;
    let result = s.ordered().iter().map(|c| labels[c].clone()).collect();
    let axioms = st.axioms();
    let atomic = axioms.iter().all(|(p, _)| matches!(&axiom_labels[p], Value::Atom(a) if a.is_plain()));
    let mut seen: BTreeSet<Atom> = BTreeSet::new();
    let mut injective = true;
    for (p, _) in &axioms {
        let at = atoms_of(&axiom_labels[p]);
        injective &= seen.is_disjoint(&at);
        seen.extend(at);
    }
    Ok(KExperiment { k, axiom_labels, labels, result, atomic, injective })
}

/// The plain atom naming an axiom in canonical experiments.
pub fn axiom_atom(p: &str, q: &str) -> Atom {
    let (a, b) = if p <= q { (p, q) } else { (q, p) };
    Atom::plain(&format!("{a}|{b}"))
}

/// Labels every axiom by its own fresh plain atom.
pub fn canonical_labels(s: &Structure) -> BTreeMap<Id, Value> {
    s.axioms().into_iter().map(|(p, q)| (p.clone(), Value::Atom(axiom_atom(&p, &q)))).collect()
}

/// The injective atomic k-experiment with one fresh atom per axiom.
pub fn canonical_injective_atomic<S: AsRef<Structure>>(s: &Indexed<S>, k: u32) -> Result<KExperiment, ExperimentError> {
    s.structure().require(Level::Lps)?;
    eval_k_experiment(s, &canonical_labels(s.structure()), k)
}

/// Re-checks every local equation of a k-experiment.
pub fn check_k_experiment(s: &Structure, labels: &BTreeMap<Id, Value>, k: u32) -> Result<(), ExperimentError> {
    let get = |p: &Id| labels.get(p).ok_or_else(|| ExperimentError::MissingLabel(p.clone()));
    if let Some(p) = labels.keys().find(|p| !s.ports().contains(*p)) {
        return Err(ExperimentError::Shape(format!("label for unknown port {p}")));
    }
    for c in s.cells().values() {
        let pri = get(&c.principal)?;
        let aux: Vec<&Value> = c.aux.iter().map(get).collect::<Result<_, _>>()?;
        let expected = match c.ty {
            CellType::Tensor => Value::pair(Pol::Pos, aux[0].clone(), aux[1].clone()),
            CellType::Par => Value::pair(Pol::Neg, aux[0].clone(), aux[1].clone()),
            CellType::One => Value::Unit(Pol::Pos),
            CellType::Bot => Value::Unit(Pol::Neg),
            CellType::Bang => bang_label(k, aux[0]),
            CellType::Why => {
                why_label(k, c.aux.iter().zip(&aux).map(|(q, v)| ((*v).clone(), s.door_count(q).unwrap_or(0))))
            }
        };
        if *pri != expected {
            return Err(ExperimentError::Shape(format!("equation of cell with principal {} fails", c.principal)));
        }
    }
    for (p, q) in s.wires() {
        let (a, b) = (get(p)?, get(q)?);
        if s.is_principal(p) || s.is_principal(q) {
            if a != b {
                return Err(ExperimentError::Shape(format!("wire {{{p},{q}}} carries two labels")));
            }
        } else {
            if !a.is_plain() {
                return Err(ExperimentError::NotInD(p.clone()));
            }
            if orthogonal(a) != *b {
                return Err(ExperimentError::NotOrthogonal(p.clone(), q.clone()));
            }
        }
    }
    Ok(())
}

/// The experiment of the structure with one layer of boxes stripped, which
/// has the same axiom labels. The conclusions of both experiments are
/// checked to be related by one layer of digging.
pub fn strip_layer_exp(
    s: &Indexed<Structure>,
    e: &KExperiment,
) -> Result<(Indexed<Structure>, KExperiment), ExperimentError> {
    let st = s.structure();
    if st.classify()? != Class::CBox {
        return Err(ExperimentError::Structure(crate::error::StructError::NotCbox));
    }
    let stripped = s.carry(st.strip_layer()?)?;
    let e2 = eval_k_experiment(&stripped, &e.axiom_labels, e.k)?;
    for c in stripped.ordered() {
        let below = st.conclusion_under(c)?;
        let ok = match (&e.labels[&below], &e2.labels[c]) {
            (Value::Bag(Pol::Neg, a), Value::Bag(Pol::Neg, b)) if below == *c => undig(e.k, a)? == *b,
            (Value::Bag(Pol::Pos, a), after) if below != *c => undig(e.k, a)? == Multiset::singleton(after.clone()),
            _ => false,
        };
        if !ok {
            return Err(ExperimentError::Precondition(format!("label of {c} is not one layer below {below}")));
        }
    }
    Ok((stripped, e2))
}

/// The experiment of `reduce_isolated(l0)`, with the same axiom labels.
pub fn reduce_exp(
    s: &Indexed<Structure>,
    e: &KExperiment,
    l0: &str,
) -> Result<(Indexed<Structure>, KExperiment), ExperimentError> {
    let st = s.structure();
    let c = st.cell(l0).ok_or_else(|| crate::error::StructError::UnknownCell(l0.to_string()))?;
    if !st.is_terminal(l0) {
        return Err(crate::error::StructError::NotTerminal(l0.to_string()).into());
    }
    match c.ty {
        CellType::Bang => {
            if st.has_axiom_above(&c.principal) {
                return Err(ExperimentError::Precondition(format!("an axiom lies above bang {l0}")));
            }
        }
        CellType::Why => {
            if !st.class_witnesses(Class::Contr).is_empty() {
                return Err(ExperimentError::Precondition("the structure has a terminal contraction".into()));
            }
            if !c.aux.iter().any(|p| st.door_count(p).unwrap_or(0) >= 1 && !st.has_axiom_above(p)) {
                return Err(ExperimentError::Precondition(format!("no atom-free door on why cell {l0}")));
            }
        }
        _ => return Err(ExperimentError::Precondition(format!("{l0} is neither a bang nor a why cell"))),
    }
    let reduced = s.carry(st.reduce_isolated(l0)?)?;
    let e2 = eval_k_experiment(&reduced, &e.axiom_labels, e.k)?;
    let before = &e.labels[&c.principal];
    let ok = match c.ty {
        CellType::Bang => {
            let top = reduced.structure().conclusions().into_iter().find(|q| !st.is_conclusion(q));
            match (before, top) {
                (Value::Bag(_, a), Some(q)) => *a == Multiset::singleton(e2.labels[&q].clone()).scale(e.k as usize),
                _ => false,
            }
        }
        _ => match (before, &e2.labels[&c.principal]) {
            (Value::Bag(_, a), Value::Bag(_, b)) => a.atomic_part() == b.atomic_part(),
            _ => false,
        },
    };
    if !ok {
        return Err(ExperimentError::Precondition(format!("reduced label at {l0} is inconsistent")));
    }
    Ok((reduced, e2))
}
