//! Isomorphisms of indexed structures, proof-structures and experiments, and
//! isomorphisms of values up to renaming of atoms.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;

use crate::experiment::KExperiment;
use crate::ps::ProofStructure;
use crate::structure::{CellType, Id, Indexed, Level, Structure};
use crate::value::{atoms_of, atoms_of_tuple, Atom, Multiset, PartialInjection, Pol, Value};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructIso {
    pub cells: BTreeMap<Id, Id>,
    pub ports: BTreeMap<Id, Id>,
}

impl StructIso {
    pub fn port(&self, p: &str) -> Option<&Id> {
        self.ports.get(p)
    }

    pub fn cell(&self, l: &str) -> Option<&Id> {
        self.cells.get(l)
    }

    pub fn inverse(&self) -> StructIso {
        StructIso {
            cells: self.cells.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
            ports: self.ports.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpIso {
    pub phi: StructIso,
    pub rho: PartialInjection,
    pub rho_prime: PartialInjection,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct LocalSig {
    attached: bool,
    principal: bool,
    ty: Option<CellType>,
    arity: usize,
    position: usize,
    doors: Option<u32>,
    wired: bool,
    index: Option<usize>,
    depth: Option<usize>,
}

/// Interned canonical shapes of the trees of ports above each port, shared
/// between the two sides so that equal ids mean equal shapes.
#[derive(Default)]
struct Shapes {
    table: BTreeMap<(LocalSig, Vec<u32>, Option<LocalSig>), u32>,
}

struct Side<'a> {
    s: &'a Structure,
    ind: &'a BTreeMap<Id, usize>,
    sig: BTreeMap<&'a Id, u32>,
}

fn local_sig(s: &Structure, ind: &BTreeMap<Id, usize>, p: &Id, with_depth: bool) -> LocalSig {
    let cell = s.owner_cell(p);
    LocalSig {
        attached: cell.is_some(),
        principal: s.is_principal(p),
        ty: cell.map(|c| c.ty),
        arity: cell.map_or(0, |c| c.arity()),
        position: match cell {
            Some(c) if c.ty.is_mult() => c.aux.iter().position(|q| q == p).map_or(0, |i| i + 1),
            _ => 0,
        },
        doors: s.door_count(p),
        wired: s.partner(p).is_some(),
        index: ind.get(p).copied(),
        depth: if with_depth { s.depth(p).ok() } else { None },
    }
}

impl<'a> Side<'a> {
    fn new(s: &'a Structure, ind: &'a BTreeMap<Id, usize>, shapes: &mut Shapes) -> Side<'a> {
        let tree = s.level() >= Level::Plps;
        let mut sig = BTreeMap::new();
        if tree {
            // ports sorted so that every port comes after the ports above it
            let mut order: Vec<&Id> = s.ports().iter().collect();
            let height = |p: &Id| s.above(p).len();
            order.sort_by_key(|p| height(p));
            for p in order {
                let local = local_sig(s, ind, p, true);
                let mut children: Vec<u32> = s.succ(p).iter().map(|q| sig[*q]).collect();
                if s.owner_cell(p).is_some_and(|c| c.ty == CellType::Why) {
                    children.sort();
                }
                let axiom_end =
                    if s.is_axiom_port(p) { s.partner(p).map(|q| local_sig(s, ind, q, true)) } else { None };
                let n = shapes.table.len() as u32;
                let id = *shapes.table.entry((local, children, axiom_end)).or_insert(n);
                sig.insert(p, id);
            }
        } else {
            for p in s.ports() {
                let n = shapes.table.len() as u32;
                let id = *shapes.table.entry((local_sig(s, ind, p, false), Vec::new(), None)).or_insert(n);
                sig.insert(p, id);
            }
        }
        Side { s, ind, sig }
    }
}

#[derive(Clone, Default)]
struct State {
    fwd: BTreeMap<Id, Id>,
    bwd: BTreeMap<Id, Id>,
    cells: BTreeMap<Id, Id>,
    cells_bwd: BTreeMap<Id, Id>,
    choices: BTreeSet<(Id, Id)>,
}

struct Search<'a, 'b> {
    a: Side<'a>,
    b: Side<'a>,
    follow_wires: bool,
    port_ok: &'b dyn Fn(&Id, &Id) -> bool,
    accept: &'b mut dyn FnMut(&StructIso) -> bool,
}

impl Search<'_, '_> {
    fn bind_cell(&self, st: &mut State, l: &Id, m: &Id, agenda: &mut Vec<(Id, Id)>) -> bool {
        match (st.cells.get(l), st.cells_bwd.get(m)) {
            (Some(x), _) if x != m => return false,
            (_, Some(y)) if y != l => return false,
            (Some(_), Some(_)) => return true,
            _ => {}
        }
        let (c, d) = (&self.a.s.cells()[l], &self.b.s.cells()[m]);
        if c.ty != d.ty || c.arity() != d.arity() {
            return false;
        }
        st.cells.insert(l.clone(), m.clone());
        st.cells_bwd.insert(m.clone(), l.clone());
        agenda.push((c.principal.clone(), d.principal.clone()));
        if c.ty == CellType::Why && c.arity() > 1 {
            st.choices.insert((l.clone(), m.clone()));
        } else {
            agenda.extend(c.aux.iter().cloned().zip(d.aux.iter().cloned()));
        }
        true
    }

    fn propagate(&self, st: &mut State, mut agenda: Vec<(Id, Id)>) -> bool {
        while let Some((p, q)) = agenda.pop() {
            match (st.fwd.get(&p), st.bwd.get(&q)) {
                (Some(x), _) if *x != q => return false,
                (_, Some(y)) if *y != p => return false,
                (Some(_), Some(_)) => continue,
                _ => {}
            }
            if self.a.sig[&p] != self.b.sig[&q] || !(self.port_ok)(&p, &q) {
                return false;
            }
            st.fwd.insert(p.clone(), q.clone());
            st.bwd.insert(q.clone(), p.clone());
            if self.follow_wires {
                match (self.a.s.partner(&p), self.b.s.partner(&q)) {
                    (None, None) => {}
                    (Some(x), Some(y)) => agenda.push((x.clone(), y.clone())),
                    _ => return false,
                }
            }
            match (self.a.s.owner(&p), self.b.s.owner(&q)) {
                (None, None) => {}
                (Some(l), Some(m)) => {
                    let (l, m) = (l.clone(), m.clone());
                    if !self.bind_cell(st, &l, &m, &mut agenda) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        true
    }

    fn run(&mut self, mut st: State, agenda: Vec<(Id, Id)>) -> Option<StructIso> {
        if !self.propagate(&mut st, agenda) {
            return None;
        }
        // a why cell whose auxiliary ports are not all matched yet
        let mut open: Option<(Id, Vec<Id>)> = None;
        let mut done = Vec::new();
        for (l, m) in &st.choices {
            let (c, d) = (&self.a.s.cells()[l], &self.b.s.cells()[m]);
            let Some(x) = c.aux.iter().find(|p| !st.fwd.contains_key(*p)) else {
                done.push((l.clone(), m.clone()));
                continue;
            };
            let cands: Vec<Id> =
                d.aux.iter().filter(|q| !st.bwd.contains_key(*q) && self.a.sig[x] == self.b.sig[*q]).cloned().collect();
            if cands.is_empty() {
                return None;
            }
            if open.as_ref().is_none_or(|(_, c)| cands.len() < c.len()) {
                open = Some((x.clone(), cands));
            }
        }
        for d in done {
            st.choices.remove(&d);
        }
        if open.is_none() {
            if let Some(p) = self.a.s.ports().iter().find(|p| !st.fwd.contains_key(*p)) {
                let cands = self
                    .b
                    .s
                    .ports()
                    .iter()
                    .filter(|q| !st.bwd.contains_key(*q) && self.a.sig[p] == self.b.sig[*q])
                    .cloned()
                    .collect();
                open = Some((p.clone(), cands));
            }
        }
        match open {
            Some((x, cands)) => {
                for y in cands {
                    if let Some(iso) = self.run(st.clone(), alloc::vec![(x.clone(), y)]) {
                        return Some(iso);
                    }
                }
                None
            }
            None => {
                let iso = StructIso { cells: st.cells, ports: st.fwd };
                let ok = st.cells_bwd.len() == self.b.s.cells().len()
                    && st.bwd.len() == self.b.s.ports().len()
                    && validate_struct_iso_raw(self.a.s, self.a.ind, self.b.s, self.b.ind, &iso).is_ok()
                    && (self.accept)(&iso);
                ok.then_some(iso)
            }
        }
    }
}

fn same_counts(a: &Structure, b: &Structure) -> bool {
    let types = |s: &Structure| {
        let mut v: Vec<CellType> = s.cells().values().map(|c| c.ty).collect();
        v.sort();
        v
    };
    let doors = |s: &Structure| {
        let mut v: Vec<u32> = s.doors().values().copied().collect();
        v.sort();
        v
    };
    a.ports().len() == b.ports().len()
        && a.wires().len() == b.wires().len()
        && a.level() == b.level()
        && types(a) == types(b)
        && doors(a) == doors(b)
}

/// Searches an isomorphism of indexed structures; `port_ok` filters matched
/// ports and `accept` may reject a complete isomorphism to continue the search.
pub fn find_iso(
    a: &Structure,
    ind_a: &BTreeMap<Id, usize>,
    b: &Structure,
    ind_b: &BTreeMap<Id, usize>,
    port_ok: &dyn Fn(&Id, &Id) -> bool,
    accept: &mut dyn FnMut(&StructIso) -> bool,
) -> Option<StructIso> {
    if !same_counts(a, b) || ind_a.len() != ind_b.len() {
        return None;
    }
    let mut shapes = Shapes::default();
    let sa = Side::new(a, ind_a, &mut shapes);
    let sb = Side::new(b, ind_b, &mut shapes);
    let mut by_index: BTreeMap<usize, &Id> = BTreeMap::new();
    for (p, i) in ind_b {
        by_index.insert(*i, p);
    }
    let mut agenda = Vec::new();
    for (p, i) in ind_a {
        agenda.push((p.clone(), (*by_index.get(i)?).clone()));
    }
    let disjoint =
        |s: &Structure| !s.validate().violations.iter().any(|v| matches!(v, crate::Violation::SharedPort(_)));
    let follow_wires = disjoint(a) && disjoint(b);
    let mut search = Search { a: sa, b: sb, follow_wires, port_ok, accept };
    search.run(State::default(), agenda)
}

/// An isomorphism of indexed structures preserving the numbering of the
/// conclusions, or `None`.
pub fn iso_structure<S: AsRef<Structure>, T: AsRef<Structure>>(a: &Indexed<S>, b: &Indexed<T>) -> Option<StructIso> {
    find_iso(a.structure(), a.ind(), b.structure(), b.ind(), &|_, _| true, &mut |_| true)
}

/// An isomorphism of indexed proof-structures, which must also carry the box
/// function of one onto the other.
pub fn iso_ps(a: &Indexed<ProofStructure>, b: &Indexed<ProofStructure>) -> Option<StructIso> {
    let (ra, rb) = (a.base(), b.base());
    find_iso(a.structure(), a.ind(), b.structure(), b.ind(), &|_, _| true, &mut |iso| b_square(ra, rb, iso).is_ok())
}

fn b_square(a: &ProofStructure, b: &ProofStructure, iso: &StructIso) -> Result<(), String> {
    for (v, doors) in a.b() {
        let w = iso.cells.get(v).ok_or_else(|| format!("bang {v} is not mapped"))?;
        let image: BTreeSet<Id> = doors.iter().filter_map(|p| iso.ports.get(p).cloned()).collect();
        if b.b().get(w) != Some(&image) {
            return Err(format!("box of {v} is not sent to the box of {w}"));
        }
    }
    Ok(())
}

fn validate_struct_iso_raw(
    a: &Structure,
    ind_a: &BTreeMap<Id, usize>,
    b: &Structure,
    ind_b: &BTreeMap<Id, usize>,
    iso: &StructIso,
) -> Result<(), String> {
    let bij = |m: &BTreeMap<Id, Id>, dom: &BTreeSet<&Id>, cod: &BTreeSet<&Id>, what: &str| {
        let image: BTreeSet<&Id> = m.values().collect();
        if m.keys().collect::<BTreeSet<_>>() != *dom || image != *cod || image.len() != m.len() {
            return Err(format!("{what} map is not a bijection"));
        }
        Ok(())
    };
    bij(&iso.ports, &a.ports().iter().collect(), &b.ports().iter().collect(), "port")?;
    bij(&iso.cells, &a.cells().keys().collect(), &b.cells().keys().collect(), "cell")?;
    let fp = |p: &Id| &iso.ports[p];
    for (l, c) in a.cells() {
        let d = &b.cells()[&iso.cells[l]];
        if c.ty != d.ty || c.arity() != d.arity() {
            return Err(format!("cell {l} changes type or arity"));
        }
        if *fp(&c.principal) != d.principal {
            return Err(format!("principal port of {l} is not preserved"));
        }
        let aux: Vec<&Id> = c.aux.iter().map(fp).collect();
        let same = if c.ty == CellType::Why {
            aux.iter().copied().collect::<BTreeSet<_>>() == d.aux.iter().collect::<BTreeSet<_>>()
        } else {
            aux.iter().copied().eq(d.aux.iter())
        };
        if !same {
            return Err(format!("auxiliary ports of {l} are not preserved"));
        }
    }
    for p in a.ports() {
        if a.door_count(p) != b.door_count(fp(p)) {
            return Err(format!("door count of {p} is not preserved"));
        }
    }
    let wires: BTreeSet<(Id, Id)> = a
        .wires()
        .iter()
        .map(|(p, q)| {
            let (x, y) = (fp(p).clone(), fp(q).clone());
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect();
    if wires != *b.wires() {
        return Err("wires are not preserved".into());
    }
    for (p, i) in ind_a {
        if ind_b.get(fp(p)) != Some(i) {
            return Err(format!("index of conclusion {p} is not preserved"));
        }
    }
    Ok(())
}

/// Checks every commuting square of an isomorphism of indexed structures.
pub fn validate_struct_iso<S: AsRef<Structure>, T: AsRef<Structure>>(
    a: &Indexed<S>,
    b: &Indexed<T>,
    iso: &StructIso,
) -> Result<(), String> {
    validate_struct_iso_raw(a.structure(), a.ind(), b.structure(), b.ind(), iso)
}

/// Same as [`validate_struct_iso`], with the box square.
pub fn validate_ps_iso(
    a: &Indexed<ProofStructure>,
    b: &Indexed<ProofStructure>,
    iso: &StructIso,
) -> Result<(), String> {
    validate_struct_iso(a, b, iso)?;
    b_square(a.base(), b.base(), iso)
}

// ---- values -------------------------------------------------------------

struct Entry<'a> {
    value: &'a Value,
    mult: usize,
    shape: usize,
    atoms: BTreeSet<Atom>,
}

type Goal<'a> = (&'a Value, &'a Value);

/// Interned atom-free shapes of values.
#[derive(Default)]
struct ShapeIds {
    ids: BTreeMap<Value, usize>,
}

impl ShapeIds {
    fn id(&mut self, v: &Value) -> usize {
        let n = self.ids.len();
        *self.ids.entry(v.erased()).or_insert(n)
    }

    fn entries<'a>(&mut self, m: &'a Multiset) -> Vec<Rc<Entry<'a>>> {
        m.entries()
            .filter(|(v, _)| v.has_atoms())
            .map(|(v, n)| Rc::new(Entry { value: v, mult: n, shape: self.id(v), atoms: atoms_of(v) }))
            .collect()
    }
}

fn profile(es: &[Rc<Entry<'_>>]) -> Vec<(usize, usize)> {
    let mut p: Vec<(usize, usize)> = es.iter().map(|e| (e.mult, e.shape)).collect();
    p.sort_unstable();
    p
}

fn compatible(x: &Entry<'_>, y: &Entry<'_>, rho: &PartialInjection) -> bool {
    x.mult == y.mult
        && x.shape == y.shape
        && x.atoms.iter().all(|a| rho.get(a).is_none_or(|b| y.atoms.contains(b)))
        && y.atoms.iter().all(|b| rho.preimage(b).is_none_or(|a| x.atoms.contains(a)))
}

type Bags<'a> = Vec<(Vec<Rc<Entry<'a>>>, Vec<Rc<Entry<'a>>>)>;

/// Applies the equality goals, collecting the bag goals they open and the
/// atoms they rename for the first time.
fn propagate<'a>(
    mut goals: Vec<Goal<'a>>,
    bags: &mut Bags<'a>,
    rho: &mut PartialInjection,
    hot: &mut Vec<Atom>,
    shapes: &mut ShapeIds,
) -> bool {
    while let Some((x, y)) = goals.pop() {
        match (x, y) {
            (Value::Atom(a), Value::Atom(b)) => {
                let fresh = rho.get(a).is_none();
                if !rho.bind(a, b) {
                    return false;
                }
                if fresh {
                    hot.push(a.clone());
                }
            }
            (Value::Unit(p), Value::Unit(q)) => {
                if p != q {
                    return false;
                }
            }
            (Value::Pair(p, a1, b1), Value::Pair(q, a2, b2)) => {
                if p != q {
                    return false;
                }
                goals.push((a1, a2));
                goals.push((b1, b2));
            }
            (Value::Bag(p, m), Value::Bag(q, n)) => {
                if p != q || m.card() != n.card() || m.distinct() != n.distinct() || m.star_part() != n.star_part() {
                    return false;
                }
                let (ea, eb) = (shapes.entries(m), shapes.entries(n));
                if profile(&ea) != profile(&eb) {
                    return false;
                }
                if !ea.is_empty() {
                    bags.push((ea, eb));
                }
            }
            _ => return false,
        }
    }
    bags.retain(|(a, _)| !a.is_empty());
    true
}

fn candidates(x: &Entry<'_>, b: &[Rc<Entry<'_>>], rho: &PartialInjection, img: Option<&Atom>) -> Vec<usize> {
    b.iter()
        .enumerate()
        .filter(|(_, y)| img.is_none_or(|i| y.atoms.contains(i)) && compatible(x, y, rho))
        .map(|(i, _)| i)
        .collect()
}

/// The next bag entry to match with its possible partners, or `None` at a
/// dead end. An open entry holding a renamed atom is preferred; otherwise
/// an entry of the rarest shape in the smallest open bag.
fn select(bags: &Bags<'_>, rho: &PartialInjection, hot: &mut Vec<Atom>) -> Option<(usize, usize, Vec<usize>)> {
    while let Some(t) = hot.last() {
        let found = bags
            .iter()
            .enumerate()
            .find_map(|(bi, (a, _))| a.iter().position(|x| x.atoms.contains(t)).map(|xi| (bi, xi)));
        let Some((bi, xi)) = found else {
            hot.pop();
            continue;
        };
        let (a, b) = &bags[bi];
        let cands = candidates(&a[xi], b, rho, rho.get(t));
        return (!cands.is_empty()).then_some((bi, xi, cands));
    }
    let (bi, (a, b)) = bags.iter().enumerate().min_by_key(|(_, (a, _))| a.len())?;
    let mut class: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for x in a {
        *class.entry((x.mult, x.shape)).or_default() += 1;
    }
    let xi = (0..a.len()).min_by_key(|&i| class[&(a[i].mult, a[i].shape)])?;
    let cands = candidates(&a[xi], b, rho, None);
    (!cands.is_empty()).then_some((bi, xi, cands))
}

struct Frame<'a> {
    bags: Bags<'a>,
    rho: PartialInjection,
    hot: Vec<Atom>,
    bi: usize,
    xi: usize,
    cands: Vec<usize>,
    next: usize,
}

fn solve<'a>(goals: Vec<Goal<'a>>, rho: PartialInjection) -> Option<PartialInjection> {
    let mut stack: Vec<Frame<'a>> = Vec::new();
    let mut shapes = ShapeIds::default();
    let mut pending = Some((goals, Vec::new(), rho, Vec::new()));
    loop {
        if let Some((goals, mut bags, mut rho, mut hot)) = pending.take() {
            if propagate(goals, &mut bags, &mut rho, &mut hot, &mut shapes) {
                if bags.is_empty() {
                    return Some(rho);
                }
                if let Some((bi, xi, cands)) = select(&bags, &rho, &mut hot) {
                    stack.push(Frame { bags, rho, hot, bi, xi, cands, next: 0 });
                }
            }
        }
        let top = stack.last_mut()?;
        let (bi, xi, yi) = (top.bi, top.xi, top.cands[top.next]);
        top.next += 1;
        let (mut bags, rho, hot) = if top.next == top.cands.len() {
            let f = stack.pop().expect("top frame");
            (f.bags, f.rho, f.hot)
        } else {
            (top.bags.clone(), top.rho.clone(), top.hot.clone())
        };
        let x = bags[bi].0.remove(xi);
        let y = bags[bi].1.remove(yi);
        pending = Some((alloc::vec![(x.value, y.value)], bags, rho, hot));
    }
}

/// A renaming `rho` of the atoms of `a` with `rho · a = b`, seeded by `start`.
pub fn values_iso_from(a: &[Value], b: &[Value], start: PartialInjection) -> Option<PartialInjection> {
    if a.len() != b.len() {
        return None;
    }
    if atoms_of_tuple(a).len() != atoms_of_tuple(b).len() {
        return None;
    }
    let goals = a.iter().zip(b).rev().collect();
    solve(goals, start)
}

/// Isomorphism of tuples of values.
pub fn result_iso(r: &[Value], r2: &[Value]) -> Option<PartialInjection> {
    values_iso_from(r, r2, PartialInjection::new())
}

pub fn multiset_iso(a: &Multiset, b: &Multiset) -> Option<PartialInjection> {
    result_iso(&[Value::Bag(Pol::Pos, a.clone())], &[Value::Bag(Pol::Pos, b.clone())])
}

pub fn tuple_value(r: &[Multiset]) -> Vec<Value> {
    r.iter().map(|m| Value::Bag(Pol::Pos, m.clone())).collect()
}

pub fn tuple_multiset_iso(r: &[Multiset], r2: &[Multiset]) -> Option<PartialInjection> {
    result_iso(&tuple_value(r), &tuple_value(r2))
}

fn chain(r: &[Multiset]) -> Value {
    let mut v = Value::Unit(Pol::Pos);
    for m in r.iter().rev() {
        v = Value::pair(Pol::Pos, Value::Bag(Pol::Pos, m.clone()), v);
    }
    v
}

fn set_value(set: &BTreeSet<Vec<Multiset>>) -> Value {
    Value::bag(Pol::Pos, set.iter().map(|r| chain(r)))
}

/// Isomorphism of sets of tuples of multisets.
pub fn ps_multiset_iso(a: &BTreeSet<Vec<Multiset>>, b: &BTreeSet<Vec<Multiset>>) -> Option<PartialInjection> {
    result_iso(&[set_value(a)], &[set_value(b)])
}

/// Isomorphism of sets of sets of tuples of multisets.
pub fn pps_multiset_iso(
    a: &BTreeSet<BTreeSet<Vec<Multiset>>>,
    b: &BTreeSet<BTreeSet<Vec<Multiset>>>,
) -> Option<PartialInjection> {
    let enc = |x: &BTreeSet<BTreeSet<Vec<Multiset>>>| Value::bag(Pol::Pos, x.iter().map(set_value));
    result_iso(&[enc(a)], &[enc(b)])
}

// ---- experiments ---------------------------------------------------------

/// An isomorphism of indexed structures carrying the labels of `e` exactly
/// onto those of `e2`.
pub fn kexp_iso<S: AsRef<Structure>, T: AsRef<Structure>>(
    a: &Indexed<S>,
    e: &KExperiment,
    b: &Indexed<T>,
    e2: &KExperiment,
) -> Option<StructIso> {
    if e.k() != e2.k() {
        return None;
    }
    let ok = |p: &Id, q: &Id| e.label(p) == e2.label(q);
    find_iso(a.structure(), a.ind(), b.structure(), b.ind(), &ok, &mut |_| true)
}

fn label_tuple(e: &KExperiment, ports: &[&Id]) -> Vec<Value> {
    ports.iter().map(|p| e.label(p).cloned().expect("total labelling")).collect()
}

/// An isomorphism of indexed structures together with renamings of atoms
/// under which the labels agree.
pub fn kexp_iso_at<S: AsRef<Structure>, T: AsRef<Structure>>(
    a: &Indexed<S>,
    e: &KExperiment,
    b: &Indexed<T>,
    e2: &KExperiment,
) -> Option<ExpIso> {
    if e.k() != e2.k() {
        return None;
    }
    let ok = |p: &Id, q: &Id| match (e.label(p), e2.label(q)) {
        (Some(x), Some(y)) => x.erased() == y.erased(),
        _ => false,
    };
    let ports: Vec<&Id> = a.structure().ports().iter().collect();
    let mut rho = None;
    let phi = find_iso(a.structure(), a.ind(), b.structure(), b.ind(), &ok, &mut |iso| {
        let image: Vec<&Id> = ports.iter().map(|p| &iso.ports[*p]).collect();
        rho = result_iso(&label_tuple(e, &ports), &label_tuple(e2, &image));
        rho.is_some()
    })?;
    let rho = rho?;
    let rho_prime = PartialInjection::identity(
        atoms_of_tuple(&label_tuple(e2, &b.structure().ports().iter().collect::<Vec<_>>())).iter(),
    );
    Some(ExpIso { phi, rho, rho_prime })
}

/// Checks that `iso` is an isomorphism of indexed structures with
/// `rho · e(p) = rho' · e2(phi(p))` for every port `p`.
pub fn validate_exp_iso<S: AsRef<Structure>, T: AsRef<Structure>>(
    a: &Indexed<S>,
    e: &KExperiment,
    b: &Indexed<T>,
    e2: &KExperiment,
    iso: &ExpIso,
) -> Result<(), String> {
    validate_struct_iso(a, b, &iso.phi)?;
    for p in a.structure().ports() {
        let q = &iso.phi.ports[p];
        let (x, y) = (e.label(p).ok_or("missing label")?, e2.label(q).ok_or("missing label")?);
        let lhs = iso.rho.apply(x).map_err(|err| format!("{err}"))?;
        let rhs = iso.rho_prime.apply(y).map_err(|err| format!("{err}"))?;
        if lhs != rhs {
            return Err(format!("labels of {p} and {q} disagree"));
        }
    }
    Ok(())
}
