//! Graphviz export.

use std::fmt::Write;

use mell_core::{CellType, Indexed, Structure};

fn symbol(ty: CellType) -> &'static str {
    match ty {
        CellType::Tensor => "⊗",
        CellType::Par => "⅋",
        CellType::One => "1",
        CellType::Bot => "⊥",
        CellType::Bang => "!",
        CellType::Why => "?",
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One node per cell and one per free port; an edge per wire. Conclusions
/// are marked by their index on the node owning them, and door counts label
/// the edge ends at auxiliary ports of why cells.
pub fn render_dot<S: AsRef<Structure>>(r: &Indexed<S>) -> String {
    let s = r.structure();
    let node = |p: &str| match s.owner(p) {
        Some(l) => format!("cell_{l}"),
        None => format!("port_{p}"),
    };
    let port_label = |p: &str| match s.door_count(p) {
        Some(n) if n > 0 => format!("{p} #{n}"),
        _ => p.to_string(),
    };
    let concl = |ps: Vec<&str>| {
        let marks: Vec<String> = ps.iter().filter_map(|p| r.index_of(p).map(|i| format!("{p}:{i}"))).collect();
        if marks.is_empty() {
            String::new()
        } else {
            format!(", xlabel={}", quote(&marks.join(" ")))
        }
    };
    let mut out = String::from("graph structure {\n  node [fontname=\"monospace\"];\n");
    for (id, c) in s.cells() {
        let label = format!("{} {id}", symbol(c.ty));
        let x = concl(c.ports().map(String::as_str).collect());
        writeln!(out, "  {} [label={}, shape=box{x}];", quote(&format!("cell_{id}")), quote(&label)).unwrap();
    }
    for p in s.ports().iter().filter(|p| s.owner(p).is_none()) {
        let x = concl(vec![p.as_str()]);
        writeln!(out, "  {} [label={}, shape=circle{x}];", quote(&format!("port_{p}")), quote(p)).unwrap();
    }
    for (p, q) in s.wires() {
        let label = format!("{} / {}", port_label(p), port_label(q));
        writeln!(out, "  {} -- {} [label={}];", quote(&node(p)), quote(&node(q)), quote(&label)).unwrap();
    }
    out.push_str("}\n");
    out
}
