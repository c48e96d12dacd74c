//! Machine-readable and plain-text reports.

use std::fmt::Write;

use mell_core::iso::{ExpIso, StructIso};
use mell_core::separation::{ConnectedVerdict, Outcome, PsVerdict, Trace, Verdict};
use mell_core::PartialInjection;
use serde_json::{json, Map, Value as Json};

pub fn iso_json(iso: &StructIso) -> Json {
    json!({ "cells": iso.cells, "ports": iso.ports })
}

pub fn pinj_json(rho: &PartialInjection) -> Json {
    let map: Map<String, Json> = rho.iter().map(|(a, b)| (a.to_string(), Json::String(b.to_string()))).collect();
    Json::Object(map)
}

fn witness_json(w: &ExpIso) -> Json {
    json!({
        "cells": w.phi.cells,
        "ports": w.phi.ports,
        "rho": pinj_json(&w.rho),
        "rho_prime": pinj_json(&w.rho_prime),
    })
}

fn trace_json(t: &Trace) -> Json {
    json!({ "case": t.case, "level": t.level, "detail": t.detail })
}

pub fn verdict_json(v: &Verdict) -> Json {
    match &v.outcome {
        Outcome::SameLps(w) => json!({ "outcome": "same_lps", "k": v.k, "witness": witness_json(w) }),
        Outcome::DifferentLps(t) => json!({ "outcome": "different_lps", "k": v.k, "trace": trace_json(t) }),
    }
}

pub fn connected_json(v: &ConnectedVerdict) -> Json {
    let ps = match &v.ps {
        PsVerdict::Iso(iso) => json!({ "outcome": "same_ps", "witness": iso_json(iso) }),
        PsVerdict::NotIso(note) => json!({ "outcome": "different_ps", "note": note }),
        PsVerdict::LpsOnly(note) => json!({ "outcome": "lps_only", "note": note }),
    };
    json!({ "lps": verdict_json(&v.lps), "ps": ps })
}

fn table(out: &mut String, title: &str, rows: impl Iterator<Item = (String, String)>) {
    writeln!(out, "{title}:").unwrap();
    for (a, b) in rows {
        writeln!(out, "  {a} -> {b}").unwrap();
    }
}

pub fn iso_text(iso: &StructIso) -> String {
    let mut out = String::new();
    table(&mut out, "cells", iso.cells.iter().map(|(a, b)| (a.clone(), b.clone())));
    table(&mut out, "ports", iso.ports.iter().map(|(a, b)| (a.clone(), b.clone())));
    out
}

pub fn verdict_text(v: &Verdict) -> String {
    match &v.outcome {
        Outcome::SameLps(w) => {
            let mut out = format!("same_lps (k = {})\n", v.k);
            out.push_str(&iso_text(&w.phi));
            table(&mut out, "atoms", w.rho.iter().map(|(a, b)| (a.to_string(), b.to_string())));
            out
        }
        Outcome::DifferentLps(t) => format!("different_lps (k = {})\n{t}\n", v.k),
    }
}

pub fn connected_text(v: &ConnectedVerdict) -> String {
    let mut out = verdict_text(&v.lps);
    match &v.ps {
        PsVerdict::Iso(_) => out.push_str("same_ps\n"),
        PsVerdict::NotIso(note) => writeln!(out, "different_ps: {note}").unwrap(),
        PsVerdict::LpsOnly(note) => writeln!(out, "lps_only: {note}").unwrap(),
    }
    out
}
