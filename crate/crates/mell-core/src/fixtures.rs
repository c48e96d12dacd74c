//! Small hand-built proof-structures used by the tests and the CLI.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;

use crate::ps::{BoxMap, ProofStructure};
use crate::structure::{Builder, CellType, Indexed, Structure};

fn boxes(entries: &[(&str, &[&str])]) -> BoxMap {
    entries.iter().map(|(v, ps)| (v.to_string(), ps.iter().map(|p| p.to_string()).collect::<BTreeSet<_>>())).collect()
}

fn indexed(ps: ProofStructure, ind: &[(&str, usize)]) -> Indexed<ProofStructure> {
    let ind: BTreeMap<_, _> = ind.iter().map(|(p, i)| (p.to_string(), *i)).collect();
    Indexed::new(ps, ind).expect("fixture numbering")
}

/// A why cell `W` over two par cells whose premises form axioms; the second
/// branch enters the box of the bang `v`, which holds a one cell.
pub fn fig1_lps() -> Structure {
    Builder::new()
        .cell("W", CellType::Why, "c1", &["p1", "p2"])
        .door("p2", 1)
        .cell("P1", CellType::Par, "p1'", &["l1", "r1"])
        .cell("P2", CellType::Par, "p2'", &["l2", "r2"])
        .cell("v", CellType::Bang, "c2", &["q"])
        .cell("O", CellType::One, "q'", &[])
        .wire("p1", "p1'")
        .wire("l1", "r1")
        .wire("p2", "p2'")
        .wire("l2", "r2")
        .wire("q", "q'")
        .build()
        .expect("fixture")
}

pub fn fig1() -> Indexed<ProofStructure> {
    let ps = ProofStructure::new(fig1_lps(), boxes(&[("v", &["p2"])])).expect("fixture");
    indexed(ps, &[("c1", 1), ("c2", 2)])
}

/// A why cell with two doors `p1`, `p2` at door count 1, and a bang over a
/// tensor whose left premise is linked to `p2` and right premise to `p1`.
pub fn psi2_lps() -> Structure {
    Builder::new()
        .cell("W", CellType::Why, "c1", &["p1", "p2"])
        .door("p1", 1)
        .door("p2", 1)
        .cell("v", CellType::Bang, "c2", &["a"])
        .cell("T", CellType::Tensor, "t", &["tl", "tr"])
        .wire("a", "t")
        .wire("p2", "tl")
        .wire("p1", "tr")
        .build()
        .expect("fixture")
}

pub fn psi2() -> Indexed<ProofStructure> {
    let ps = ProofStructure::new(psi2_lps(), boxes(&[("v", &["p1", "p2"])])).expect("fixture");
    indexed(ps, &[("c1", 1), ("c2", 2)])
}

pub fn one() -> Indexed<ProofStructure> {
    let lps = Builder::new().cell("O", CellType::One, "c", &[]).build().expect("fixture");
    indexed(ProofStructure::new(lps, BoxMap::new()).expect("fixture"), &[("c", 1)])
}

pub fn axpair() -> Indexed<ProofStructure> {
    let lps = Builder::new().wire("p", "q").build().expect("fixture");
    indexed(ProofStructure::new(lps, BoxMap::new()).expect("fixture"), &[("p", 1), ("q", 2)])
}

/// Two bangs over one cells and a why cell with a single door over a third
/// one cell. The door can be put in either box.
pub fn two_boxes_lps() -> Structure {
    Builder::new()
        .cell("v1", CellType::Bang, "c1", &["a1"])
        .cell("O1", CellType::One, "o1", &[])
        .cell("v2", CellType::Bang, "c2", &["a2"])
        .cell("O2", CellType::One, "o2", &[])
        .cell("W", CellType::Why, "c3", &["p"])
        .door("p", 1)
        .cell("O3", CellType::One, "o3", &[])
        .wire("a1", "o1")
        .wire("a2", "o2")
        .wire("p", "o3")
        .build()
        .expect("fixture")
}

pub fn two_boxes() -> (Indexed<ProofStructure>, Indexed<ProofStructure>) {
    let ind = [("c1", 1), ("c2", 2), ("c3", 3)];
    let r1 = ProofStructure::new(two_boxes_lps(), boxes(&[("v1", &["p"])])).expect("fixture");
    let r2 = ProofStructure::new(two_boxes_lps(), boxes(&[("v2", &["p"])])).expect("fixture");
    (indexed(r1, &ind), indexed(r2, &ind))
}
