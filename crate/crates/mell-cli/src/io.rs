//! JSON files for structures and experiment descriptions.
//!
//! Serialization is canonical: map keys are sorted, cells and ports are listed
//! by id, each wire is written with its smaller end first and the wires are
//! sorted.

use std::collections::{BTreeMap, BTreeSet};

use mell_core::ps::{BoxMap, ProofStructure};
use mell_core::psexp::ExpDesc;
use mell_core::value::parse_value;
use mell_core::{Cell, CellType, Id, Indexed, Structure};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellEntry {
    arity: usize,
    id: Id,
    #[serde(rename = "type")]
    ty: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureFile {
    #[serde(default)]
    attach: BTreeMap<Id, Vec<Id>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boxes: Option<BTreeMap<Id, Vec<Id>>>,
    #[serde(default)]
    cells: Vec<CellEntry>,
    #[serde(default)]
    doors: BTreeMap<Id, u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ind: Option<BTreeMap<Id, usize>>,
    #[serde(default)]
    left: BTreeMap<Id, Id>,
    #[serde(default)]
    ports: Vec<Id>,
    #[serde(default)]
    principal: BTreeMap<Id, Id>,
    #[serde(default)]
    wires: Vec<[Id; 2]>,
}

/// A structure read from a file: the numbered linear structure and the box
/// function when the file has one.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub lps: Indexed<Structure>,
    pub boxes: Option<BoxMap>,
}

impl Loaded {
    /// The proof-structure; a file without boxes gives every bang an empty box.
    pub fn ps(&self) -> Result<Indexed<ProofStructure>, CliError> {
        let b = self.boxes.clone().unwrap_or_default();
        let ps = ProofStructure::new(self.lps.structure().clone(), b)?;
        Ok(Indexed::new(ps, self.lps.ind().clone())?)
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn to_structure(f: &StructureFile) -> Result<Structure, CliError> {
    let mut cells = BTreeMap::new();
    for entry in &f.cells {
        let ty = CellType::from_name(&entry.ty).ok_or_else(|| invalid(format!("unknown cell type {:?}", entry.ty)))?;
        let principal =
            f.principal.get(&entry.id).ok_or_else(|| invalid(format!("cell {} has no principal port", entry.id)))?;
        let mut aux = f.attach.get(&entry.id).cloned().unwrap_or_default();
        if aux.len() != entry.arity {
            return Err(invalid(format!(
                "cell {} declares arity {} but has {} ports",
                entry.id,
                entry.arity,
                aux.len()
            )));
        }
        match (ty.is_mult(), f.left.get(&entry.id)) {
            (true, Some(l)) => {
                let i = aux
                    .iter()
                    .position(|p| p == l)
                    .ok_or_else(|| invalid(format!("left port {l} of {} is not one of its ports", entry.id)))?;
                aux.swap(0, i);
            }
            (true, None) => return Err(invalid(format!("cell {} has no left port", entry.id))),
            (false, Some(_)) => return Err(invalid(format!("cell {} of type {ty} has a left port", entry.id))),
            (false, None) => aux.sort(),
        }
        if cells.insert(entry.id.clone(), Cell::new(ty, principal.clone(), aux)).is_some() {
            return Err(invalid(format!("cell {} is declared twice", entry.id)));
        }
    }
    for c in f.principal.keys().chain(f.attach.keys()).chain(f.left.keys()) {
        if !cells.contains_key(c) {
            return Err(invalid(format!("unknown cell {c}")));
        }
    }
    let ports: BTreeSet<Id> = f.ports.iter().cloned().collect();
    if ports.len() != f.ports.len() {
        return Err(invalid("a port is listed twice"));
    }
    let mut doors = f.doors.clone();
    for c in cells.values().filter(|c| c.ty == CellType::Why) {
        for p in &c.aux {
            doors.entry(p.clone()).or_insert(0);
        }
    }
    let wires = f.wires.iter().map(|[p, q]| (p.clone(), q.clone()));
    Ok(Structure::new(cells, ports, doors, wires)?)
}

/// Reads a structure file.
pub fn parse_structure(text: &str) -> Result<Loaded, CliError> {
    let f: StructureFile = serde_json::from_str(text)?;
    let s = to_structure(&f)?;
    let lps = match &f.ind {
        Some(ind) => Indexed::new(s, ind.clone())?,
        None => Indexed::sorted(s),
    };
    let boxes = f.boxes.as_ref().map(|b| b.iter().map(|(v, ps)| (v.clone(), ps.iter().cloned().collect())).collect());
    Ok(Loaded { lps, boxes })
}

fn file_of(s: &Structure, ind: &BTreeMap<Id, usize>, boxes: Option<&BoxMap>) -> StructureFile {
    let mut wires: Vec<[Id; 2]> =
        s.wires().iter().map(|(p, q)| if p <= q { [p.clone(), q.clone()] } else { [q.clone(), p.clone()] }).collect();
    wires.sort();
    wires.dedup();
    let mut attach = BTreeMap::new();
    let mut left = BTreeMap::new();
    for (id, c) in s.cells() {
        let mut aux = c.aux.clone();
        aux.sort();
        if !aux.is_empty() {
            attach.insert(id.clone(), aux);
        }
        if let Some(l) = c.left() {
            left.insert(id.clone(), l.clone());
        }
    }
    StructureFile {
        attach,
        boxes: boxes.map(|b| b.iter().map(|(v, ps)| (v.clone(), ps.iter().cloned().collect())).collect()),
        cells: s
            .cells()
            .iter()
            .map(|(id, c)| CellEntry { arity: c.arity(), id: id.clone(), ty: c.ty.name().to_string() })
            .collect(),
        doors: s.doors().clone(),
        ind: Some(ind.clone()),
        left,
        ports: s.ports().iter().cloned().collect(),
        principal: s.cells().iter().map(|(id, c)| (id.clone(), c.principal.clone())).collect(),
        wires,
    }
}

fn render(f: &StructureFile) -> String {
    let mut out = serde_json::to_string_pretty(f).expect("maps with string keys");
    out.push('\n');
    out
}

/// Canonical text of a numbered linear structure; no `boxes` key.
pub fn serialize_lps(s: &Indexed<Structure>) -> String {
    render(&file_of(s.structure(), s.ind(), None))
}

/// Canonical text of a numbered proof-structure.
pub fn serialize_ps(r: &Indexed<ProofStructure>) -> String {
    render(&file_of(r.structure(), r.ind(), Some(r.base().b())))
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DescFile {
    #[serde(default)]
    axiom_labels: BTreeMap<Id, String>,
    #[serde(default)]
    boxes: BTreeMap<Id, Vec<Vec<DescFile>>>,
}

fn to_desc(f: &DescFile) -> Result<ExpDesc, CliError> {
    let axiom_labels =
        f.axiom_labels.iter().map(|(p, v)| Ok((p.clone(), parse_value(v)?))).collect::<Result<_, CliError>>()?;
    let boxes = f
        .boxes
        .iter()
        .map(|(v, outer)| {
            let outer = outer.iter().map(|inner| inner.iter().map(to_desc).collect()).collect::<Result<_, _>>()?;
            Ok((v.clone(), outer))
        })
        .collect::<Result<_, CliError>>()?;
    Ok(ExpDesc { axiom_labels, boxes })
}

fn from_desc(d: &ExpDesc) -> DescFile {
    DescFile {
        axiom_labels: d.axiom_labels.iter().map(|(p, v)| (p.clone(), v.to_string())).collect(),
        boxes: d
            .boxes
            .iter()
            .map(|(v, outer)| (v.clone(), outer.iter().map(|inner| inner.iter().map(from_desc).collect()).collect()))
            .collect(),
    }
}

/// Reads an experiment description: axiom labels in value syntax and, for
/// every bang, one list of copy descriptions per outer copy.
pub fn parse_desc(text: &str) -> Result<ExpDesc, CliError> {
    let f: DescFile = serde_json::from_str(text)?;
    to_desc(&f)
}

pub fn serialize_desc(d: &ExpDesc) -> String {
    let mut out = serde_json::to_string_pretty(&from_desc(d)).expect("maps with string keys");
    out.push('\n');
    out
}

pub fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })
}
