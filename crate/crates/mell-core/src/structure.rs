//! Cells, ports and wires; validity levels; the order on ports, depth,
//! classification and the structural transformations used by the induction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::StructError;

pub type Id = String;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellType {
    Tensor,
    Par,
    One,
    Bot,
    Bang,
    Why,
}

impl CellType {
    pub const ALL: [CellType; 6] =
        [CellType::Tensor, CellType::Par, CellType::One, CellType::Bot, CellType::Bang, CellType::Why];

    /// The arity imposed by the type; `None` for `Why`.
    pub fn forced_arity(self) -> Option<usize> {
        match self {
            CellType::Tensor | CellType::Par => Some(2),
            CellType::One | CellType::Bot => Some(0),
            CellType::Bang => Some(1),
            CellType::Why => None,
        }
    }

    pub fn is_mult(self) -> bool {
        matches!(self, CellType::Tensor | CellType::Par)
    }

    pub fn name(self) -> &'static str {
        match self {
            CellType::Tensor => "tensor",
            CellType::Par => "par",
            CellType::One => "one",
            CellType::Bot => "bot",
            CellType::Bang => "bang",
            CellType::Why => "why",
        }
    }

    pub fn from_name(s: &str) -> Option<CellType> {
        CellType::ALL.into_iter().find(|t| t.name() == s)
    }
}

impl fmt::Display for CellType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A cell with its principal port and its auxiliary ports. For `Tensor` and
/// `Par` the auxiliary ports are `[left, right]`; for `Why` they are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub ty: CellType,
    pub principal: Id,
    pub aux: Vec<Id>,
}

impl Cell {
    pub fn new(ty: CellType, principal: impl Into<Id>, aux: Vec<Id>) -> Cell {
        let mut aux = aux;
        if ty == CellType::Why {
            aux.sort();
        }
        Cell { ty, principal: principal.into(), aux }
    }

    pub fn arity(&self) -> usize {
        self.aux.len()
    }

    pub fn left(&self) -> Option<&Id> {
        self.ty.is_mult().then(|| &self.aux[0])
    }

    pub fn right(&self) -> Option<&Id> {
        self.ty.is_mult().then(|| &self.aux[1])
    }

    pub fn ports(&self) -> impl Iterator<Item = &Id> {
        core::iter::once(&self.principal).chain(self.aux.iter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Raw,
    OmegaPplps,
    Pplps,
    Plps,
    Lps,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Two wires share the port.
    SharedPort(Id),
    /// An auxiliary port or a free port is not wired.
    Unwired(Id),
    /// A free port is not wired to a non-principal port.
    FreePortOnPrincipal(Id),
    /// Both ends of the wire are principal ports.
    PrincipalWire(Id, Id),
    /// The order on ports has a cycle through this port.
    Cycle(Id),
    /// The two ends of an axiom have different depths.
    AxiomDepth(Id, Id),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SharedPort(p) => write!(f, "condition 1: port {p} lies on two wires"),
            Violation::Unwired(p) => write!(f, "condition 2: non-principal port {p} is not wired"),
            Violation::FreePortOnPrincipal(p) => {
                write!(f, "condition 3: free port {p} is not wired to a non-principal port")
            }
            Violation::PrincipalWire(p, q) => write!(f, "condition 4: wire {{{p},{q}}} joins two principal ports"),
            Violation::Cycle(p) => write!(f, "antisymmetry: the order has a cycle through {p}"),
            Violation::AxiomDepth(p, q) => write!(f, "axiom {{{p},{q}}} joins ports of different depths"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub level: Level,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    Empty,
    Ax,
    Mult,
    Unit,
    Weak,
    Der,
    Contr,
    ContrUnit,
    BangUnit,
    CBox,
}

impl Class {
    pub fn name(self) -> &'static str {
        match self {
            Class::Empty => "empty",
            Class::Ax => "ax",
            Class::Mult => "mult",
            Class::Unit => "unit",
            Class::Weak => "weak",
            Class::Der => "der",
            Class::Contr => "contr",
            Class::ContrUnit => "contrunit",
            Class::BangUnit => "bangunit",
            Class::CBox => "cbox",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The four kinds of `Why` cells, read off the arity and the door counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhyKind {
    Weakening,
    Dereliction,
    Contraction,
    ContractionPax,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Measure {
    pub cosize: usize,
    pub mes: (usize, usize),
}

fn wire(p: &Id, q: &Id) -> (Id, Id) {
    if p <= q {
        (p.clone(), q.clone())
    } else {
        (q.clone(), p.clone())
    }
}

/// A ported structure together with a wire set. Immutable once built; the
/// validity level is computed at construction.
#[derive(Clone, Debug)]
pub struct Structure {
    cells: BTreeMap<Id, Cell>,
    ports: BTreeSet<Id>,
    doors: BTreeMap<Id, u32>,
    wires: BTreeSet<(Id, Id)>,
    owner: BTreeMap<Id, Id>,
    partner: BTreeMap<Id, Id>,
    validation: Validation,
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells && self.ports == other.ports && self.doors == other.doors && self.wires == other.wires
    }
}

impl Eq for Structure {}

impl AsRef<Structure> for Structure {
    fn as_ref(&self) -> &Structure {
        self
    }
}

impl Structure {
    /// Builds a structure, checking the invariants of ported structures.
    /// Wires are only checked for well-formedness; the wire conditions are
    /// reported by [`Structure::validate`].
    pub fn new(
        cells: BTreeMap<Id, Cell>,
        ports: BTreeSet<Id>,
        doors: BTreeMap<Id, u32>,
        wires: impl IntoIterator<Item = (Id, Id)>,
    ) -> Result<Structure, StructError> {
        let mut owner = BTreeMap::new();
        for (id, c) in &cells {
            if let Some(a) = c.ty.forced_arity() {
                if c.arity() != a {
                    return Err(StructError::Malformed(format!(
                        "cell {id} of type {} has arity {} instead of {a}",
                        c.ty,
                        c.arity()
                    )));
                }
            }
            if c.ty == CellType::Why && c.aux.windows(2).any(|w| w[0] >= w[1]) {
                return Err(StructError::Malformed(format!("auxiliary ports of {id} are not distinct or not sorted")));
            }
            for p in c.ports() {
                if !ports.contains(p) {
                    return Err(StructError::Malformed(format!("cell {id} uses undeclared port {p}")));
                }
                if let Some(o) = owner.insert(p.clone(), id.clone()) {
                    return Err(StructError::Malformed(format!("port {p} belongs to both {o} and {id}")));
                }
            }
        }
        let why_aux: BTreeSet<&Id> =
            cells.values().filter(|c| c.ty == CellType::Why).flat_map(|c| c.aux.iter()).collect();
        for p in doors.keys() {
            if !why_aux.contains(p) {
                return Err(StructError::Malformed(format!(
                    "door count given for {p}, which is not an auxiliary port of a why cell"
                )));
            }
        }
        if let Some(p) = why_aux.iter().find(|p| !doors.contains_key(**p)) {
            return Err(StructError::Malformed(format!("auxiliary port {p} of a why cell has no door count")));
        }
        let mut wset = BTreeSet::new();
        let mut partner = BTreeMap::new();
        let mut shared = Vec::new();
        for (p, q) in wires {
            if p == q {
                return Err(StructError::Malformed(format!("wire from {p} to itself")));
            }
            for x in [&p, &q] {
                if !ports.contains(x) {
                    return Err(StructError::Malformed(format!("wire uses undeclared port {x}")));
                }
            }
            if !wset.insert(wire(&p, &q)) {
                continue;
            }
            for (a, b) in [(&p, &q), (&q, &p)] {
                if partner.insert(a.clone(), b.clone()).is_some() {
                    shared.push(a.clone());
                }
            }
        }
        let mut s = Structure {
            cells,
            ports,
            doors,
            wires: wset,
            owner,
            partner,
            validation: Validation { level: Level::Raw, violations: Vec::new() },
        };
        s.validation = s.compute_validation(shared);
        Ok(s)
    }

    pub fn empty() -> Structure {
        Structure::new(BTreeMap::new(), BTreeSet::new(), BTreeMap::new(), Vec::new()).expect("empty structure")
    }

    pub fn cells(&self) -> &BTreeMap<Id, Cell> {
        &self.cells
    }

    pub fn cell(&self, id: &str) -> Option<&Cell> {
        self.cells.get(id)
    }

    pub fn ports(&self) -> &BTreeSet<Id> {
        &self.ports
    }

    pub fn doors(&self) -> &BTreeMap<Id, u32> {
        &self.doors
    }

    pub fn wires(&self) -> &BTreeSet<(Id, Id)> {
        &self.wires
    }

    pub fn door_count(&self, p: &str) -> Option<u32> {
        self.doors.get(p).copied()
    }

    pub fn owner(&self, p: &str) -> Option<&Id> {
        self.owner.get(p)
    }

    pub fn owner_cell(&self, p: &str) -> Option<&Cell> {
        self.owner.get(p).map(|c| &self.cells[c])
    }

    pub fn partner(&self, p: &str) -> Option<&Id> {
        self.partner.get(p)
    }

    pub fn is_principal(&self, p: &str) -> bool {
        self.owner_cell(p).is_some_and(|c| c.principal == p)
    }

    pub fn is_aux(&self, p: &str) -> bool {
        self.owner_cell(p).is_some_and(|c| c.principal != p)
    }

    pub fn is_attached(&self, p: &str) -> bool {
        self.owner.contains_key(p)
    }

    pub fn is_door(&self, p: &str) -> bool {
        self.door_count(p).is_some_and(|n| n > 0)
    }

    pub fn bangs(&self) -> impl Iterator<Item = (&Id, &Cell)> {
        self.cells.iter().filter(|(_, c)| c.ty == CellType::Bang)
    }

    pub fn level(&self) -> Level {
        self.validation.level
    }

    pub fn validate(&self) -> &Validation {
        &self.validation
    }

    pub fn require(&self, need: Level) -> Result<(), StructError> {
        if self.level() >= need {
            Ok(())
        } else {
            Err(StructError::Level { need, have: self.level() })
        }
    }

    fn compute_validation(&self, shared: Vec<Id>) -> Validation {
        let mut violations: Vec<Violation> = shared.into_iter().map(Violation::SharedPort).collect();
        for p in &self.ports {
            if !self.is_principal(p) && !self.partner.contains_key(p) {
                violations.push(Violation::Unwired(p.clone()));
            }
        }
        for (p, q) in &self.wires {
            if self.is_principal(p) && self.is_principal(q) {
                violations.push(Violation::PrincipalWire(p.clone(), q.clone()));
            }
        }
        if !violations.is_empty() {
            return Validation { level: Level::Raw, violations };
        }
        for p in &self.ports {
            if !self.is_attached(p) && self.partner.get(p).is_some_and(|q| self.is_principal(q)) {
                violations.push(Violation::FreePortOnPrincipal(p.clone()));
            }
        }
        if !violations.is_empty() {
            return Validation { level: Level::OmegaPplps, violations };
        }
        if let Some(p) = self.find_cycle() {
            return Validation { level: Level::Pplps, violations: alloc::vec![Violation::Cycle(p)] };
        }
        for (p, q) in self.axioms() {
            if self.depth_unchecked(&p) != self.depth_unchecked(&q) {
                violations.push(Violation::AxiomDepth(p, q));
            }
        }
        let level = if violations.is_empty() { Level::Lps } else { Level::Plps };
        Validation { level, violations }
    }

    /// The port immediately below `p`, if any.
    pub fn pred(&self, p: &str) -> Option<&Id> {
        let c = self.owner_cell(p)?;
        if c.principal != p {
            return Some(&c.principal);
        }
        let q = self.partner.get(p)?;
        self.is_aux(q).then_some(q)
    }

    /// The ports immediately above `p`.
    pub fn succ(&self, p: &str) -> Vec<&Id> {
        match self.owner_cell(p) {
            Some(c) if c.principal == p => c.aux.iter().collect(),
            Some(_) => match self.partner.get(p) {
                Some(q) if self.is_principal(q) => alloc::vec![q],
                _ => Vec::new(),
            },
            None => Vec::new(),
        }
    }

    fn find_cycle(&self) -> Option<Id> {
        // every port has at most one predecessor, so a cycle shows up as a
        // predecessor chain that comes back to a port of the current walk
        let mut done: BTreeSet<&Id> = BTreeSet::new();
        for start in &self.ports {
            if done.contains(start) {
                continue;
            }
            let mut walk: Vec<&Id> = Vec::new();
            let mut on_walk: BTreeSet<&Id> = BTreeSet::new();
            let mut cur = Some(start);
            while let Some(p) = cur {
                if done.contains(p) {
                    break;
                }
                if !on_walk.insert(p) {
                    return Some(p.clone());
                }
                walk.push(p);
                cur = self.pred(p);
            }
            done.extend(walk);
        }
        None
    }

    /// The chain of ports from `p` down to its conclusion, `p` first.
    fn chain(&self, p: &str) -> Vec<&Id> {
        let mut out = Vec::new();
        let Some(mut cur) = self.ports.get(p) else { return out };
        loop {
            out.push(cur);
            match self.pred(cur) {
                Some(q) if out.len() <= self.ports.len() => cur = q,
                _ => break,
            }
        }
        out
    }

    pub fn conclusions(&self) -> BTreeSet<Id> {
        self.ports.iter().filter(|p| !(self.is_attached(p) && self.partner.contains_key(*p))).cloned().collect()
    }

    pub fn is_conclusion(&self, p: &str) -> bool {
        self.ports.contains(p) && !(self.is_attached(p) && self.partner.contains_key(p))
    }

    pub fn terminal_cells(&self) -> BTreeSet<Id> {
        self.cells.iter().filter(|(_, c)| self.is_conclusion(&c.principal)).map(|(id, _)| id.clone()).collect()
    }

    pub fn is_terminal(&self, l: &str) -> bool {
        self.cells.get(l).is_some_and(|c| self.is_conclusion(&c.principal))
    }

    pub fn axioms(&self) -> BTreeSet<(Id, Id)> {
        self.wires.iter().filter(|(p, q)| !self.is_principal(p) && !self.is_principal(q)).cloned().collect()
    }

    pub fn is_axiom_port(&self, p: &str) -> bool {
        !self.is_principal(p) && self.partner.get(p).is_some_and(|q| !self.is_principal(q))
    }

    pub fn terminal_axioms(&self) -> BTreeSet<(Id, Id)> {
        self.axioms().into_iter().filter(|(p, q)| self.is_conclusion(p) || self.is_conclusion(q)).collect()
    }

    pub fn isolated_axioms(&self) -> BTreeSet<(Id, Id)> {
        self.axioms().into_iter().filter(|(p, q)| self.is_conclusion(p) && self.is_conclusion(q)).collect()
    }

    fn known(&self, p: &str) -> Result<(), StructError> {
        if self.ports.contains(p) {
            Ok(())
        } else {
            Err(StructError::UnknownPort(p.to_string()))
        }
    }

    /// The unique conclusion below `p`.
    pub fn conclusion_under(&self, p: &str) -> Result<Id, StructError> {
        self.require(Level::Plps)?;
        self.known(p)?;
        Ok(self.chain(p).last().expect("chain holds p").to_string())
    }

    fn depth_unchecked(&self, p: &str) -> usize {
        let chain = self.chain(p);
        let mut d = 0;
        for (i, q) in chain.iter().enumerate() {
            // a door counts for the ports above it and for itself
            d += self.door_count(q).unwrap_or(0) as usize;
            if i > 0 && self.owner_cell(q).is_some_and(|c| c.ty == CellType::Bang && c.principal == **q) {
                d += 1;
            }
        }
        d
    }

    /// Number of bangs strictly below `p` plus the door counts of the doors
    /// on the path from `p` down to its conclusion, `p` included.
    pub fn depth(&self, p: &str) -> Result<usize, StructError> {
        self.require(Level::Plps)?;
        self.known(p)?;
        Ok(self.depth_unchecked(p))
    }

    pub fn max_depth(&self) -> usize {
        self.ports.iter().map(|p| self.depth_unchecked(p)).max().unwrap_or(0)
    }

    /// All ports `q` with `p <= q`.
    pub fn above(&self, p: &str) -> BTreeSet<Id> {
        let mut seen = BTreeSet::new();
        let Some(start) = self.ports.get(p) else { return seen };
        let mut stack = alloc::vec![start];
        while let Some(q) = stack.pop() {
            if seen.insert(q.clone()) {
                stack.extend(self.succ(q));
            }
        }
        seen
    }

    pub fn has_axiom_above(&self, p: &str) -> bool {
        self.above(p).iter().any(|q| self.is_axiom_port(q))
    }

    pub fn why_kind(&self, l: &str) -> Option<WhyKind> {
        let c = self.cells.get(l)?;
        if c.ty != CellType::Why {
            return None;
        }
        let zero = c.aux.iter().filter(|p| self.door_count(p) == Some(0)).count();
        Some(match c.arity() {
            0 => WhyKind::Weakening,
            1 if zero == 1 => WhyKind::Dereliction,
            _ if zero == 0 => WhyKind::ContractionPax,
            _ => WhyKind::Contraction,
        })
    }

    /// Terminal cells witnessing membership in `class`, in id order.
    pub fn class_witnesses(&self, class: Class) -> Vec<Id> {
        let terminal = self.terminal_cells();
        let ty = |l: &Id| self.cells[l].ty;
        let kind = |l: &Id| self.why_kind(l);
        let pick = |f: &dyn Fn(&Id) -> bool| terminal.iter().filter(|l| f(l)).cloned().collect::<Vec<_>>();
        match class {
            Class::Empty | Class::Ax | Class::CBox => Vec::new(),
            Class::Mult => pick(&|l| ty(l).is_mult()),
            Class::Unit => pick(&|l| matches!(ty(l), CellType::One | CellType::Bot)),
            Class::Weak => pick(&|l| kind(l) == Some(WhyKind::Weakening)),
            Class::Der => pick(&|l| kind(l) == Some(WhyKind::Dereliction)),
            Class::Contr => pick(&|l| kind(l) == Some(WhyKind::Contraction)),
            Class::ContrUnit => pick(&|l| {
                ty(l) == CellType::Why
                    && self.cells[l]
                        .aux
                        .iter()
                        .any(|p| self.door_count(p).unwrap_or(0) >= 1 && !self.has_axiom_above(p))
            }),
            Class::BangUnit => pick(&|l| ty(l) == CellType::Bang && !self.has_axiom_above(&self.cells[l].aux[0])),
        }
    }

    /// The first class of the fixed precedence list that applies.
    pub fn classify(&self) -> Result<Class, StructError> {
        self.require(Level::Lps)?;
        if self.wires.is_empty() {
            return Ok(Class::Empty);
        }
        if !self.isolated_axioms().is_empty() {
            return Ok(Class::Ax);
        }
        for class in
            [Class::Mult, Class::Unit, Class::Weak, Class::Der, Class::Contr, Class::ContrUnit, Class::BangUnit]
        {
            if !self.class_witnesses(class).is_empty() {
                return Ok(class);
            }
        }
        Ok(Class::CBox)
    }

    pub fn measure(&self) -> Measure {
        let whys = self.cells.values().filter(|c| c.ty == CellType::Why);
        let cosize = whys.clone().map(Cell::arity).max().unwrap_or(0);
        let arities: usize = whys.map(Cell::arity).sum();
        let doors: usize = self.doors.values().map(|&n| n as usize).sum();
        Measure { cosize, mes: (arities, self.ports.len() + doors) }
    }

    /// Removes the conclusions wired to principal ports, with their wires.
    pub fn omega(&self) -> Structure {
        let dropped: BTreeSet<&Id> = self
            .ports
            .iter()
            .filter(|p| !self.is_attached(p) && self.partner.get(*p).is_some_and(|q| self.is_principal(q)))
            .collect();
        if dropped.is_empty() {
            return self.clone();
        }
        let ports = self.ports.iter().filter(|p| !dropped.contains(p)).cloned().collect();
        let wires: Vec<_> =
            self.wires.iter().filter(|(p, q)| !dropped.contains(p) && !dropped.contains(q)).cloned().collect();
        Structure::new(self.cells.clone(), ports, self.doors.clone(), wires).expect("omega keeps ports well formed")
    }

    /// Deletes cells and their principal ports, then applies `omega`.
    fn delete_cells(&self, cs: &BTreeSet<Id>) -> Structure {
        let removed_ports: BTreeSet<&Id> = cs.iter().map(|l| &self.cells[l].principal).collect();
        let cells: BTreeMap<Id, Cell> =
            self.cells.iter().filter(|(id, _)| !cs.contains(*id)).map(|(i, c)| (i.clone(), c.clone())).collect();
        let ports = self.ports.iter().filter(|p| !removed_ports.contains(p)).cloned().collect();
        let doors = restrict_doors(&cells, &self.doors);
        let wires: Vec<_> = self
            .wires
            .iter()
            .filter(|(p, q)| !removed_ports.contains(p) && !removed_ports.contains(q))
            .cloned()
            .collect();
        Structure::new(cells, ports, doors, wires).expect("deleting cells keeps ports well formed").omega()
    }

    /// Eliminates terminal cells: either one cell that is multiplicative, a
    /// dereliction, or has no auxiliary port, or any set of bangs.
    pub fn remove_terminal(&self, cs: &[Id]) -> Result<Structure, StructError> {
        self.require(Level::Plps)?;
        let set: BTreeSet<Id> = cs.iter().cloned().collect();
        for l in &set {
            let c = self.cells.get(l).ok_or_else(|| StructError::UnknownCell(l.clone()))?;
            if !self.is_terminal(l) {
                return Err(StructError::NotTerminal(l.clone()));
            }
            let single_ok = c.ty.is_mult() || c.arity() == 0 || self.why_kind(l) == Some(WhyKind::Dereliction);
            if c.ty != CellType::Bang && !(single_ok && set.len() == 1) {
                return Err(StructError::BadCell(
                    l.clone(),
                    "only a single multiplicative, unit, weakening or dereliction cell, or a set of bangs, can be removed"
                        .into(),
                ));
            }
        }
        Ok(self.delete_cells(&set))
    }

    /// Turns the auxiliary port `p` of the why cell `l` into a free port,
    /// then applies `omega`.
    pub fn detach(&self, l: &str, p: &str) -> Result<Structure, StructError> {
        let c = self.cells.get(l).ok_or_else(|| StructError::UnknownCell(l.to_string()))?;
        if c.ty != CellType::Why || !c.aux.iter().any(|q| q == p) {
            return Err(StructError::BadCell(l.to_string(), format!("{p} is not an auxiliary port of this why cell")));
        }
        let mut cells = self.cells.clone();
        cells.get_mut(l).expect("cell exists").aux.retain(|q| q != p);
        let mut doors = self.doors.clone();
        doors.remove(p);
        Ok(Structure::new(cells, self.ports.clone(), doors, self.wires.iter().cloned())?.omega())
    }

    /// Drops an atom-free bang, or lowers the door count of the atom-free
    /// doors of a why cell.
    pub fn reduce_isolated(&self, l: &str) -> Result<Structure, StructError> {
        self.require(Level::Plps)?;
        let c = self.cells.get(l).ok_or_else(|| StructError::UnknownCell(l.to_string()))?;
        if !self.is_terminal(l) {
            return Err(StructError::NotTerminal(l.to_string()));
        }
        match c.ty {
            CellType::Bang => {
                if self.has_axiom_above(&c.principal) {
                    Ok(self.clone())
                } else {
                    Ok(self.delete_cells(&BTreeSet::from([l.to_string()])))
                }
            }
            CellType::Why => {
                let mut doors = self.doors.clone();
                for q in &c.aux {
                    let n = self.doors[q];
                    if n >= 1 && !self.has_axiom_above(q) {
                        doors.insert(q.clone(), n - 1);
                    }
                }
                Structure::new(self.cells.clone(), self.ports.clone(), doors, self.wires.iter().cloned())
            }
            _ => Err(StructError::BadCell(l.to_string(), "expected a bang or a why cell".into())),
        }
    }

    /// Lowers the depth by one: decrements the doors of the terminal why cells
    /// and eliminates the terminal bangs.
    pub fn strip_layer(&self) -> Result<Structure, StructError> {
        if self.classify()? != Class::CBox {
            return Err(StructError::NotCbox);
        }
        let terminal = self.terminal_cells();
        let mut doors = self.doors.clone();
        let mut bangs = BTreeSet::new();
        for l in &terminal {
            let c = &self.cells[l];
            match c.ty {
                CellType::Why => {
                    for q in &c.aux {
                        *doors.get_mut(q).expect("why aux has a door count") -= 1;
                    }
                }
                CellType::Bang => {
                    bangs.insert(l.clone());
                }
                _ => unreachable!("cbox structures only have bang and why terminal cells"),
            }
        }
        let lowered = Structure::new(self.cells.clone(), self.ports.clone(), doors, self.wires.iter().cloned())?;
        Ok(lowered.delete_cells(&bangs))
    }

    /// Connectivity of the graph whose edges are the wires and, for each
    /// cell, the edges from its principal port to its auxiliary ports.
    pub fn is_connected(&self) -> bool {
        let Some(start) = self.ports.iter().next() else { return true };
        self.component(start, |_| true).len() == self.ports.len()
    }

    /// Neighbours of `p` in the connectivity graph.
    pub fn neighbours(&self, p: &str) -> Vec<&Id> {
        let mut out = Vec::new();
        if let Some(q) = self.partner.get(p) {
            out.push(q);
        }
        if let Some(c) = self.owner_cell(p) {
            if c.principal == p {
                out.extend(c.aux.iter());
            } else {
                out.push(&c.principal);
            }
        }
        out
    }

    /// Ports reachable from `start` through ports accepted by `through`
    /// (endpoints are included but not crossed unless accepted).
    pub fn component(&self, start: &str, through: impl Fn(&Id) -> bool) -> BTreeSet<Id> {
        let mut seen = BTreeSet::new();
        let Some(s) = self.ports.get(start) else { return seen };
        seen.insert(s.clone());
        let mut stack = alloc::vec![s];
        while let Some(p) = stack.pop() {
            for q in self.neighbours(p) {
                if seen.insert(q.clone()) && through(q) {
                    stack.push(q);
                }
            }
        }
        seen
    }
}

pub(crate) fn restrict_doors(cells: &BTreeMap<Id, Cell>, doors: &BTreeMap<Id, u32>) -> BTreeMap<Id, u32> {
    cells
        .values()
        .filter(|c| c.ty == CellType::Why)
        .flat_map(|c| c.aux.iter())
        .map(|p| (p.clone(), doors.get(p).copied().unwrap_or(0)))
        .collect()
}

/// Convenience builder; door counts of why ports default to 0.
#[derive(Clone, Debug, Default)]
pub struct Builder {
    cells: BTreeMap<Id, Cell>,
    ports: BTreeSet<Id>,
    doors: BTreeMap<Id, u32>,
    wires: Vec<(Id, Id)>,
}

impl Builder {
    pub fn new() -> Builder {
        Builder::default()
    }

    pub fn cell(mut self, id: &str, ty: CellType, principal: &str, aux: &[&str]) -> Builder {
        let aux: Vec<Id> = aux.iter().map(|s| s.to_string()).collect();
        self.ports.insert(principal.to_string());
        self.ports.extend(aux.iter().cloned());
        if ty == CellType::Why {
            for p in &aux {
                self.doors.entry(p.clone()).or_insert(0);
            }
        }
        self.cells.insert(id.to_string(), Cell::new(ty, principal, aux));
        self
    }

    pub fn port(mut self, p: &str) -> Builder {
        self.ports.insert(p.to_string());
        self
    }

    pub fn door(mut self, p: &str, n: u32) -> Builder {
        self.doors.insert(p.to_string(), n);
        self
    }

    pub fn wire(mut self, p: &str, q: &str) -> Builder {
        self.ports.insert(p.to_string());
        self.ports.insert(q.to_string());
        self.wires.push((p.to_string(), q.to_string()));
        self
    }

    pub fn build(self) -> Result<Structure, StructError> {
        Structure::new(self.cells, self.ports, self.doors, self.wires)
    }
}

/// A structure together with a numbering of its conclusions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Indexed<S> {
    base: S,
    ind: BTreeMap<Id, usize>,
    by_index: Vec<Id>,
}

impl<S: AsRef<Structure>> Indexed<S> {
    /// `ind` must be a bijection from the conclusions onto `1..=n`.
    pub fn new(base: S, ind: BTreeMap<Id, usize>) -> Result<Indexed<S>, StructError> {
        let concl = base.as_ref().conclusions();
        let n = concl.len();
        if ind.len() != n || ind.keys().any(|p| !concl.contains(p)) {
            return Err(StructError::BadIndex("the indexed ports are not exactly the conclusions".into()));
        }
        let mut by_index: Vec<Option<Id>> = alloc::vec![None; n];
        for (p, &i) in &ind {
            if i == 0 || i > n || by_index[i - 1].is_some() {
                return Err(StructError::BadIndex(format!("index {i} of {p} is out of range or repeated")));
            }
            by_index[i - 1] = Some(p.clone());
        }
        let by_index = by_index.into_iter().map(|p| p.expect("bijection")).collect();
        Ok(Indexed { base, ind, by_index })
    }

    /// Numbers the conclusions in id order.
    pub fn sorted(base: S) -> Indexed<S> {
        let ind = base.as_ref().conclusions().into_iter().enumerate().map(|(i, p)| (p, i + 1)).collect();
        Indexed::new(base, ind).expect("sorted numbering is a bijection")
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn structure(&self) -> &Structure {
        self.base.as_ref()
    }

    pub fn ind(&self) -> &BTreeMap<Id, usize> {
        &self.ind
    }

    pub fn index_of(&self, p: &str) -> Option<usize> {
        self.ind.get(p).copied()
    }

    /// The conclusion with index `i` (1-based).
    pub fn at(&self, i: usize) -> Option<&Id> {
        i.checked_sub(1).and_then(|j| self.by_index.get(j))
    }

    pub fn len(&self) -> usize {
        self.by_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_index.is_empty()
    }

    /// Conclusions in index order.
    pub fn ordered(&self) -> &[Id] {
        &self.by_index
    }

    pub fn into_parts(self) -> (S, BTreeMap<Id, usize>) {
        (self.base, self.ind)
    }

    pub fn map_base<T: AsRef<Structure>>(self, f: impl FnOnce(S) -> T) -> Result<Indexed<T>, StructError> {
        Indexed::new(f(self.base), self.ind)
    }
}

impl Indexed<Structure> {
    /// Numbers the conclusions of `next` through the conclusion below them
    /// in the current structure.
    pub fn carry(&self, next: Structure) -> Result<Indexed<Structure>, StructError> {
        let mut ind = BTreeMap::new();
        for c in next.conclusions() {
            let under = self.structure().conclusion_under(&c)?;
            let i = self.index_of(&under).ok_or_else(|| StructError::BadIndex(format!("no index below {c}")))?;
            ind.insert(c, i);
        }
        Indexed::new(next, ind)
    }
}
