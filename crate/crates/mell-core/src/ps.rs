//! Proof-structures: a linear proof-structure together with the box function
//! `b`, with box extraction and, for connected structures, box recovery.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::StructError;
use crate::structure::{Cell, CellType, Id, Level, Structure};

pub type BoxMap = BTreeMap<Id, BTreeSet<Id>>;

#[derive(Clone, Debug)]
pub struct ProofStructure {
    lps: Structure,
    b: BoxMap,
    boxes: BTreeMap<Id, ProofStructure>,
}

impl PartialEq for ProofStructure {
    fn eq(&self, other: &Self) -> bool {
        self.lps == other.lps && self.b == other.b
    }
}

impl Eq for ProofStructure {}

impl AsRef<Structure> for ProofStructure {
    fn as_ref(&self) -> &Structure {
        &self.lps
    }
}

fn invalid(msg: String) -> StructError {
    StructError::InvalidPs(msg)
}

fn fresh(base: &str, taken: &mut BTreeSet<Id>) -> Id {
    let mut id = format!("{base}^");
    while taken.contains(&id) {
        id.push('^');
    }
    taken.insert(id.clone());
    id
}

impl ProofStructure {
    /// Checks every condition of a proof-structure and extracts all boxes.
    /// Bangs missing from `b` get an empty box function.
    pub fn new(lps: Structure, b: BoxMap) -> Result<ProofStructure, StructError> {
        if lps.level() < Level::Lps {
            return Err(invalid(format!("underlying structure is only {:?}", lps.level())));
        }
        let mut full: BoxMap = lps.bangs().map(|(v, _)| (v.clone(), BTreeSet::new())).collect();
        for (v, ps) in b {
            match full.get_mut(&v) {
                Some(slot) => *slot = ps,
                None => return Err(invalid(format!("{v} is not a bang cell"))),
            }
        }
        let mut count: BTreeMap<&Id, u32> = BTreeMap::new();
        for (v, ps) in &full {
            for p in ps {
                if !lps.is_door(p) {
                    return Err(invalid(format!("{p} in the box of {v} is not an auxiliary door")));
                }
                *count.entry(p).or_insert(0) += 1;
            }
        }
        for (p, &n) in lps.doors() {
            let m = count.get(p).copied().unwrap_or(0);
            if n != m {
                return Err(invalid(format!("door {p} has count {n} but lies in {m} boxes")));
            }
        }
        let closures: BTreeMap<&Id, BTreeSet<Id>> =
            full.iter().map(|(v, ps)| (v, closure(&lps, &lps.cells()[v], ps))).collect();
        let names: Vec<&&Id> = closures.keys().collect();
        for (i, v) in names.iter().enumerate() {
            for w in &names[i + 1..] {
                let (bv, bw) = (&closures[**v], &closures[**w]);
                if !bv.is_disjoint(bw) && !bv.is_subset(bw) && !bw.is_subset(bv) {
                    return Err(invalid(format!("boxes of {v} and {w} overlap without nesting")));
                }
            }
        }
        let mut boxes = BTreeMap::new();
        for (v, bv) in &closures {
            let inner = extract(&lps, &full, v, bv).map_err(|e| invalid(format!("box of {v}: {e}")))?;
            boxes.insert((*v).clone(), inner);
        }
        Ok(ProofStructure { lps, b: full, boxes })
    }

    pub fn lps(&self) -> &Structure {
        &self.lps
    }

    pub fn b(&self) -> &BoxMap {
        &self.b
    }

    pub fn boxes(&self) -> &BTreeMap<Id, ProofStructure> {
        &self.boxes
    }

    /// The box of the bang `v`.
    pub fn box_of(&self, v: &str) -> Result<&ProofStructure, StructError> {
        match self.lps.cell(v) {
            None => Err(StructError::UnknownCell(v.to_string())),
            Some(c) if c.ty != CellType::Bang => Err(StructError::BadCell(v.to_string(), "not a bang cell".into())),
            Some(_) => Ok(&self.boxes[v]),
        }
    }

    /// The ports of the box of `v`: everything above its auxiliary port or
    /// one of its doors.
    pub fn closure(&self, v: &str) -> BTreeSet<Id> {
        match (self.lps.cell(v), self.b.get(v)) {
            (Some(c), Some(ps)) => closure(&self.lps, c, ps),
            _ => BTreeSet::new(),
        }
    }
}

fn closure(lps: &Structure, v: &Cell, doors: &BTreeSet<Id>) -> BTreeSet<Id> {
    let mut out = BTreeSet::new();
    for p in v.aux.iter().chain(doors.iter()) {
        out.extend(lps.above(p));
    }
    out
}

/// Builds the box of `v`: the ports above it, a fresh unary why cell under
/// each door, with `v` itself eliminated.
fn extract(lps: &Structure, b: &BoxMap, v: &Id, bv: &BTreeSet<Id>) -> Result<ProofStructure, StructError> {
    let doors = &b[v];
    let door_cells: BTreeSet<&Id> = doors.iter().filter_map(|p| lps.owner(p)).collect();
    let inner_cells: BTreeSet<Id> =
        bv.iter().filter_map(|p| lps.owner(p)).filter(|c| !door_cells.contains(c)).cloned().collect();

    let mut port_taken = lps.ports().clone();
    let mut cell_taken: BTreeSet<Id> = lps.cells().keys().cloned().collect();
    let mut cells: BTreeMap<Id, Cell> = BTreeMap::new();
    let mut ports: BTreeSet<Id> = bv.clone();
    for l in &inner_cells {
        let c = lps.cells()[l].clone();
        ports.extend(c.ports().cloned());
        cells.insert(l.clone(), c);
    }
    for p in doors {
        let cell_id = fresh(p, &mut cell_taken);
        let port_id = fresh(p, &mut port_taken);
        ports.insert(port_id.clone());
        cells.insert(cell_id, Cell::new(CellType::Why, port_id, alloc::vec![p.clone()]));
    }
    let inner_bangs: BTreeSet<&Id> = inner_cells.iter().filter(|l| *l != v && b.contains_key(*l)).collect();
    let mut door_counts = BTreeMap::new();
    for c in cells.values().filter(|c| c.ty == CellType::Why) {
        for p in &c.aux {
            let n = inner_bangs.iter().filter(|w| b[**w].contains(p)).count();
            door_counts.insert(p.clone(), n as u32);
        }
    }
    let wires: Vec<(Id, Id)> =
        lps.wires().iter().filter(|(p, q)| ports.contains(p) && ports.contains(q)).cloned().collect();
    let psi = Structure::new(cells, ports, door_counts, wires)?;
    let phi = psi.remove_terminal(core::slice::from_ref(v))?;
    let inner_b: BoxMap = inner_bangs.iter().map(|w| ((*w).clone(), b[*w].clone())).collect();
    ProofStructure::new(phi, inner_b)
}

/// The box of `v` in `r`.
pub fn box_extract(r: &ProofStructure, v: &str) -> Result<ProofStructure, StructError> {
    r.box_of(v).cloned()
}

/// Rebuilds the box function of a connected linear proof-structure: a door
/// `p` belongs to the box of `v` when it can be reached from the auxiliary
/// port of `v` through ports deeper than the principal port of `v`, and its
/// why cell is not deeper than that.
pub fn recover_boxes(lps: &Structure) -> Result<ProofStructure, StructError> {
    lps.require(Level::Lps)?;
    let has_doors = lps.doors().values().any(|&n| n > 0);
    if lps.bangs().next().is_none() || !has_doors {
        return ProofStructure::new(lps.clone(), BoxMap::new());
    }
    if !lps.is_connected() {
        return Err(StructError::AmbiguousBoxes);
    }
    let depth: BTreeMap<&Id, usize> = lps.ports().iter().map(|p| (p, lps.depth(p).expect("lps level"))).collect();
    let mut b = BoxMap::new();
    for (v, c) in lps.bangs() {
        let dv = depth[&c.principal];
        let reached = lps.component(&c.aux[0], |q| depth[q] > dv);
        let ps = reached
            .into_iter()
            .filter(|p| lps.is_door(p))
            .filter(|p| {
                let w = lps.owner_cell(p).expect("doors are attached");
                depth[&w.principal] <= dv
            })
            .collect();
        b.insert(v.clone(), ps);
    }
    ProofStructure::new(lps.clone(), b)
}
