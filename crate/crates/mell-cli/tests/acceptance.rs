//! Acceptance run: one PASS or FAIL line per criterion, non-zero exit status
//! when any criterion fails.

#[path = "../../mell-core/tests/support/mod.rs"]
mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mell_cli::generate::{generate_ps, mutate, rename, GeneratorConfig};
use mell_core::experiment::{canonical_injective_atomic, canonical_labels, eval_k_experiment, KExperiment};
use mell_core::iso::{iso_structure, result_iso, tuple_multiset_iso, StructIso};
use mell_core::ps::{recover_boxes, ProofStructure};
use mell_core::psexp::{eval_ps_experiment, project_to_ps, sample_interpretation, ExpDesc};
use mell_core::separation::{bridge_split, choose_k, q_split, separate, Outcome};
use mell_core::value::{
    apply_pinj, atoms_of_tuple, dig_multi, dig_step, format_tuple, is_injective_point, is_k_point, orthogonal, undig,
};
use mell_core::{fixtures, Atom, CellType, Id, Indexed, Multiset, PartialInjection, Pol, Structure, Value};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome_ = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome_);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn g(j: u32, i: u32) -> Value {
    Value::indexed(&format!("g{j}"), &[i])
}

fn g_plain(j: u32, i: u32) -> Value {
    Value::atom(&format!("g{j}{i}"))
}

fn printed_a1() -> Multiset {
    (1..=2).flat_map(|j| (1..=3).map(move |i| g(j, i))).collect()
}

fn printed_a2() -> Multiset {
    (1..=3).map(|i| Value::pair(Pol::Pos, g(1, i), g(2, i))).collect()
}

fn psi2_e2() -> KExperiment {
    let labels = BTreeMap::from([("p1".to_string(), Value::atom("g2")), ("p2".to_string(), Value::atom("g1"))]);
    eval_k_experiment(&fixtures::psi2(), &labels, 3).expect("experiment of PSI2")
}

fn criterion_1() -> Outcome_ {
    let e = psi2_e2();
    let r2 = vec![Value::Bag(Pol::Neg, printed_a1()), Value::Bag(Pol::Pos, printed_a2())];
    ensure(e.result() == r2, || format!("got {}", format_tuple(e.result())))?;
    Ok(format_tuple(e.result()))
}

fn criterion_2() -> Outcome_ {
    let e = psi2_e2();
    let pairs = (1..=2)
        .flat_map(|j| (1..=3).map(move |i| (Atom::indexed(&format!("g{j}"), &[i]), Atom::plain(&format!("g{j}{i}")))));
    let rho = PartialInjection::from_pairs(pairs).map_err(|e| e.to_string())?;
    let (_, r0) = project_to_ps(&e, &rho, &fixtures::psi2()).map_err(|e| e.to_string())?;
    let a: Multiset = (1..=2).flat_map(|j| (1..=3).map(move |i| g_plain(j, i))).collect();
    let b: Multiset = (1..=3).map(|i| Value::pair(Pol::Pos, g_plain(1, i), g_plain(2, i))).collect();
    let expected = vec![Value::Bag(Pol::Neg, a), Value::Bag(Pol::Pos, b)];
    ensure(r0 == expected, || format!("got {}", format_tuple(&r0)))?;
    Ok(format_tuple(&r0))
}

fn criterion_3() -> Outcome_ {
    let got = bridge_split(&[printed_a1(), printed_a2()]).map_err(|e| e.to_string())?;
    let expected: BTreeSet<Vec<Multiset>> = (1..=3)
        .map(|z| {
            vec![[g(1, z), g(2, z)].into_iter().collect(), Multiset::singleton(Value::pair(Pol::Pos, g(1, z), g(2, z)))]
        })
        .collect();
    ensure(got == expected, || format!("got {got:?}"))?;
    Ok(format!("{} bridges", got.len()))
}

fn copy(j: u32) -> ExpDesc {
    ExpDesc { axiom_labels: BTreeMap::from([("l2".to_string(), Value::atom(&format!("g{j}")))]), ..ExpDesc::default() }
}

fn intro_experiment(first: u32, box_copies: [u32; 3]) -> ExpDesc {
    ExpDesc {
        axiom_labels: BTreeMap::from([("l1".to_string(), Value::atom(&format!("g{first}")))]),
        boxes: BTreeMap::from([("v".to_string(), vec![box_copies.iter().map(|&j| copy(j)).collect()])]),
    }
}

fn criterion_4() -> Outcome_ {
    let r = fixtures::fig1();
    let (e1, r1) = eval_ps_experiment(&r, &intro_experiment(1, [2, 3, 4])).map_err(|e| e.to_string())?;
    let (e2, r2) = eval_ps_experiment(&r, &intro_experiment(2, [1, 3, 4])).map_err(|e| e.to_string())?;
    let zeta = |j: u32| Value::pair(Pol::Neg, Value::atom(&format!("g{j}")), Value::atom(&format!("g{j}")));
    let bag = |xs: &[u32]| Multiset::from_iter(xs.iter().map(|&j| zeta(j)));
    ensure(e1.labels["p1"] == bag(&[1]) && e1.labels["p2"] == bag(&[2, 3, 4]), || "labels of e1".into())?;
    ensure(e2.labels["p1"] == bag(&[2]) && e2.labels["p2"] == bag(&[1, 3, 4]), || "labels of e2".into())?;
    ensure(e1 != e2, || "the experiments coincide".into())?;
    ensure(r1 == r2, || format!("{} differs from {}", format_tuple(&r1), format_tuple(&r2)))?;
    ensure(is_injective_point(&r1) && is_k_point(&r1, 3), || "not an injective 3-point".into())?;
    Ok(format_tuple(&r1))
}

// ---- independent checks of witnesses --------------------------------------

fn wire_set(s: &Structure, f: impl Fn(&Id) -> Id) -> BTreeSet<(Id, Id)> {
    s.wires().iter().map(|(p, q)| (f(p), f(q))).map(|(p, q)| if p <= q { (p, q) } else { (q, p) }).collect()
}

fn bijective(map: &BTreeMap<Id, Id>, from: BTreeSet<&Id>, to: BTreeSet<&Id>) -> bool {
    map.keys().collect::<BTreeSet<_>>() == from && map.values().collect::<BTreeSet<_>>() == to && map.len() == to.len()
}

fn check_struct_iso<S: AsRef<Structure>, T: AsRef<Structure>>(
    a: &Indexed<S>,
    b: &Indexed<T>,
    phi: &StructIso,
) -> Result<(), String> {
    let (sa, sb) = (a.structure(), b.structure());
    ensure(bijective(&phi.cells, sa.cells().keys().collect(), sb.cells().keys().collect()), || "cells".into())?;
    ensure(bijective(&phi.ports, sa.ports().iter().collect(), sb.ports().iter().collect()), || "ports".into())?;
    let port = |p: &Id| phi.ports[p].clone();
    for (l, c) in sa.cells() {
        let d = &sb.cells()[&phi.cells[l]];
        ensure(c.ty == d.ty, || format!("type of {l}"))?;
        ensure(port(&c.principal) == d.principal, || format!("principal port of {l}"))?;
        let mut aux: Vec<Id> = c.aux.iter().map(port).collect();
        let mut aux2 = d.aux.clone();
        if !c.ty.is_mult() {
            aux.sort();
            aux2.sort();
        }
        ensure(aux == aux2, || format!("auxiliary ports of {l}"))?;
    }
    for p in sa.ports() {
        ensure(sa.door_count(p) == sb.door_count(&port(p)), || format!("door count of {p}"))?;
    }
    ensure(wire_set(sa, port) == wire_set(sb, Id::clone), || "wires".into())?;
    ensure(a.len() == b.len(), || "number of conclusions".into())?;
    for (c, i) in a.ind() {
        ensure(b.index_of(&port(c)) == Some(*i), || format!("index of {c}"))?;
    }
    Ok(())
}

fn table(rho: &PartialInjection) -> BTreeMap<Atom, Atom> {
    rho.iter().map(|(a, b)| (a.clone(), b.clone())).collect()
}

fn check_labels(
    e: &KExperiment,
    f: &KExperiment,
    phi: &StructIso,
    rho: &PartialInjection,
    rho2: &PartialInjection,
) -> Result<(), String> {
    let (t, t2) = (table(rho), table(rho2));
    for (p, q) in &phi.ports {
        let lhs = support::rename(&t, e.label(p).ok_or("label")?);
        let rhs = support::rename(&t2, f.label(q).ok_or("label")?);
        ensure(lhs == rhs, || format!("labels of {p} and {q}"))?;
    }
    Ok(())
}

fn as_lps(r: &Indexed<ProofStructure>) -> Indexed<Structure> {
    Indexed::new(r.structure().clone(), r.ind().clone()).expect("same conclusions")
}

fn shape(r: &Indexed<ProofStructure>) -> (Vec<CellType>, usize, usize) {
    let mut tys: Vec<CellType> = r.structure().cells().values().map(|c| c.ty).collect();
    tys.sort();
    (tys, r.structure().ports().len(), r.len())
}

fn swap_two_indices(r: &Indexed<ProofStructure>, seed: u64) -> Option<Indexed<ProofStructure>> {
    let n = r.len();
    if n < 2 {
        return None;
    }
    let (i, j) = (1 + seed as usize % n, 1 + (seed as usize / n) % (n - 1));
    let j = if j >= i { j + 1 } else { j };
    let ind = r
        .ind()
        .iter()
        .map(|(p, &x)| {
            (
                p.clone(),
                if x == i {
                    j
                } else if x == j {
                    i
                } else {
                    x
                },
            )
        })
        .collect();
    Indexed::new(r.base().clone(), ind).ok()
}

fn pair_for(seed: u64) -> (Indexed<ProofStructure>, Indexed<ProofStructure>, &'static str) {
    let cfg = GeneratorConfig { seed, max_cells: 12, max_depth: 3, ..GeneratorConfig::default() };
    let a = generate_ps(&cfg);
    let renamed = || rename(&a, seed.wrapping_mul(31).wrapping_add(7));
    match seed % 5 {
        0 | 1 => {
            let b = renamed();
            (a, b, "renamed")
        }
        2 => match mutate(&a, seed) {
            Some(m) => {
                let b = rename(&m, seed);
                (a, b, "mutated")
            }
            None => {
                let b = renamed();
                (a, b, "renamed")
            }
        },
        3 => match swap_two_indices(&a, seed) {
            Some(b) => (a, b, "reindexed"),
            None => {
                let b = renamed();
                (a, b, "renamed")
            }
        },
        _ => {
            let want = shape(&a);
            let pick = (1..200)
                .map(|t| generate_ps(&GeneratorConfig { seed: seed * 1000 + t, ..cfg.clone() }))
                .find(|b| shape(b) == want)
                .unwrap_or_else(|| generate_ps(&GeneratorConfig { seed: seed + 1_000_000, ..cfg.clone() }));
            (a, pick, "independent")
        }
    }
}

fn criterion_5() -> Outcome_ {
    let (mut same, mut different) = (0, 0);
    let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
    for seed in 0..500u64 {
        let (a, b, kind) = pair_for(seed);
        *kinds.entry(kind).or_default() += 1;
        let v = separate(&a, &b).map_err(|e| format!("seed {seed}: {e}"))?;
        let truth = iso_structure(&as_lps(&a), &as_lps(&b));
        if let Some(phi) = &truth {
            check_struct_iso(&a, &b, phi).map_err(|m| format!("seed {seed}: iso_structure witness: {m}"))?;
        }
        ensure(v.is_same() == truth.is_some(), || {
            format!("seed {seed} ({kind}): separate and iso_structure disagree")
        })?;
        if let Outcome::SameLps(w) = &v.outcome {
            same += 1;
            let e = canonical_injective_atomic(&a, v.k).map_err(|e| e.to_string())?;
            let f = canonical_injective_atomic(&b, v.k).map_err(|e| e.to_string())?;
            check_struct_iso(&a, &b, &w.phi).map_err(|m| format!("seed {seed}: witness: {m}"))?;
            check_labels(&e, &f, &w.phi, &w.rho, &w.rho_prime).map_err(|m| format!("seed {seed}: witness: {m}"))?;
        } else {
            different += 1;
        }
    }
    ensure(same > 0 && different > 0, || "one of the verdicts never occurs".into())?;
    Ok(format!("500 pairs {kinds:?}, same_lps {same}, different_lps {different}, 0 mismatches"))
}

// ---- interpretation at desk scale ------------------------------------------

fn injective_maps(atoms: &[Atom], pool: &[Atom]) -> Vec<Vec<(Atom, Atom)>> {
    let mut out = vec![Vec::new()];
    for a in atoms {
        let mut next = Vec::new();
        for m in &out {
            for b in pool.iter().filter(|b| !m.iter().any(|(_, x)| x == *b)) {
                let mut m2 = m.clone();
                m2.push((a.clone(), b.clone()));
                next.push(m2);
            }
        }
        out = next;
    }
    out
}

fn criterion_6() -> Outcome_ {
    let pool: Vec<Atom> = ["a", "b", "c", "d"].iter().map(|n| Atom::plain(n)).collect();
    let (mut checked, mut boxed, mut points, mut projections, mut seed) = (0, 0, 0, 0, 0u64);
    while checked < 100 {
        seed += 1;
        ensure(seed < 20_000, || format!("only {checked} structures within bounds"))?;
        let cfg =
            GeneratorConfig { seed, max_cells: 2 + seed as usize % 6, max_depth: 2, ..GeneratorConfig::default() };
        let r = generate_ps(&cfg);
        let k = choose_k(r.structure(), r.structure());
        let ke = canonical_injective_atomic(&r, k).map_err(|e| e.to_string())?;
        let canon = ke.result().to_vec();
        let atoms: Vec<Atom> = atoms_of_tuple(&canon).into_iter().collect();
        if atoms.len() > pool.len() {
            continue;
        }
        let smp = sample_interpretation(&r, &pool, k as usize, 200_000).map_err(|e| e.to_string())?;
        if smp.truncated {
            continue;
        }
        checked += 1;
        if !r.base().b().is_empty() {
            boxed += 1;
        }
        for r0 in smp.results.iter().filter(|t| is_injective_point(t) && is_k_point(t, k as usize)) {
            points += 1;
            let rho =
                result_iso(&canon, r0).ok_or_else(|| format!("seed {seed}: {} is no renaming", format_tuple(r0)))?;
            let renamed: Vec<Value> = canon.iter().map(|v| support::rename(&table(&rho), v)).collect();
            ensure(&renamed == r0, || format!("seed {seed}: renaming witness fails"))?;
            let via_lib: Vec<Value> =
                canon.iter().map(|v| apply_pinj(&rho, v)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
            ensure(&via_lib == r0, || format!("seed {seed}: apply_pinj disagrees"))?;
        }
        for m in injective_maps(&atoms, &pool) {
            projections += 1;
            let rho = PartialInjection::from_pairs(m).map_err(|e| e.to_string())?;
            let (_, r0) = project_to_ps(&ke, &rho, &r).map_err(|e| format!("seed {seed}: {e}"))?;
            ensure(is_injective_point(&r0) && is_k_point(&r0, k as usize), || {
                format!("seed {seed}: projection is no injective k-point")
            })?;
            ensure(smp.results.contains(&r0), || {
                format!("seed {seed}: projection {} not enumerated", format_tuple(&r0))
            })?;
        }
    }
    Ok(format!(
        "{checked} structures ({boxed} with boxes), {points} enumerated injective k-points, {projections} projections"
    ))
}

fn criterion_7() -> Outcome_ {
    let mut boxes = 0;
    for seed in 0..200u64 {
        let cfg = GeneratorConfig { seed, connected: true, allow_weakening: false, ..GeneratorConfig::default() };
        let r = generate_ps(&cfg);
        ensure(r.structure().is_connected(), || format!("seed {seed}: not connected"))?;
        let rec = recover_boxes(r.structure()).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(rec.b() == r.base().b(), || format!("seed {seed}: boxes differ"))?;
        boxes += rec.b().len();
    }
    Ok(format!("200 structures, {boxes} boxes recovered"))
}

// ---- algebraic properties --------------------------------------------------

fn runner() -> TestRunner {
    TestRunner::new(Config { cases: 1000, failure_persistence: None, max_global_rejects: 200_000, ..Config::default() })
}

fn run<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner().run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn structure(seed: u64) -> Indexed<ProofStructure> {
    generate_ps(&GeneratorConfig { seed, max_cells: 10, max_depth: 3, ..GeneratorConfig::default() })
}

fn swap_at(d: usize, j1: u32, j2: u32, a: &Atom) -> Atom {
    let mut b = a.clone();
    if a.loc.len() > d {
        let i = a.loc.len() - 1 - d;
        if b.loc[i] == j1 {
            b.loc[i] = j2;
        } else if b.loc[i] == j2 {
            b.loc[i] = j1;
        }
    }
    b
}

fn criterion_8() -> Outcome_ {
    run("orthogonal involution", support::value(), |v| {
        prop_assert_eq!(orthogonal(&orthogonal(&v)), v);
        Ok(())
    })?;
    run("dig composition", (support::multiset(), 1u32..=3, 0u32..=2), |(a, k, d)| {
        prop_assert_eq!(dig_multi(k, d + 1, &a), dig_multi(k, 1, &dig_multi(k, d, &a)));
        Ok(())
    })?;
    run("undig after dig", (support::multiset(), 1u32..=3), |(b, k)| {
        prop_assert_eq!(undig(k, &dig_multi(k, 1, &b)).ok(), Some(b));
        Ok(())
    })?;
    run("dig after undig", (support::multiset(), 1u32..=3), |(a, k)| {
        if let Ok(b) = undig(k, &a) {
            prop_assert_eq!(dig_multi(k, 1, &b), a);
        }
        Ok(())
    })?;
    run(
        "result invariant by permutations",
        (any::<u64>(), 1u32..=3, 0usize..=2, any::<(u32, u32)>(), any::<bool>(), support::keys()),
        |(seed, k, d, (x, y), injective, keys)| {
            let r = structure(seed);
            let (j1, j2) = (1 + x % k, 1 + y % k);
            let mut labels = canonical_labels(r.structure());
            if !injective {
                for (i, v) in labels.values_mut().enumerate() {
                    *v = Value::atom(["a", "b", "c"][keys[i % keys.len()] as usize % 3]);
                }
            }
            let e = eval_k_experiment(&r, &labels, k).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let atoms = atoms_of_tuple(e.result());
            let rho: BTreeMap<Atom, Atom> = atoms.iter().map(|a| (a.clone(), swap_at(d, j1, j2, a))).collect();
            prop_assume!(rho.iter().any(|(a, b)| a != b));
            let moved: Vec<Value> = e.result().iter().map(|v| support::rename(&rho, v)).collect();
            prop_assert_eq!(moved.as_slice(), e.result());
            Ok(())
        },
    )?;
    run("arity and number of doors", (any::<u64>(), any::<u64>(), any::<u64>()), |(seed, pick, mask)| {
        let r = structure(seed);
        let s = r.structure();
        let whys: Vec<Id> = s.terminal_cells().into_iter().filter(|l| s.cells()[l].ty == CellType::Why).collect();
        prop_assume!(!whys.is_empty());
        let c = &s.cells()[&whys[pick as usize % whys.len()]];
        let p0: Vec<&Id> = c.aux.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p).collect();
        prop_assume!(!p0.is_empty());
        let k = choose_k(s, s);
        prop_assert!(k as usize > c.arity());
        let e = canonical_injective_atomic(&r, k).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let sum: Multiset = p0
            .iter()
            .flat_map(|p| {
                let n = s.door_count(p).unwrap_or(0);
                dig_multi(k, n, &Multiset::singleton(e.label(p).unwrap().clone()))
                    .elements()
                    .cloned()
                    .collect::<Vec<_>>()
            })
            .collect();
        let expected: usize = p0.iter().map(|p| (k as usize).pow(s.door_count(p).unwrap_or(0))).sum();
        prop_assert_eq!(sum.card(), expected);
        prop_assert_eq!(sum.card().is_multiple_of(k as usize), p0.iter().all(|p| s.door_count(p).unwrap_or(0) > 0));
        Ok(())
    })?;
    run("atom-free labels are those without axioms above", (any::<u64>(), 1u32..=3), |(seed, k)| {
        let r = structure(seed);
        let e = canonical_injective_atomic(&r, k).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for p in r.structure().ports() {
            prop_assert_eq!(e.label(p).unwrap().has_atoms(), r.structure().has_axiom_above(p), "port {}", p);
        }
        Ok(())
    })?;
    run("bridges of dug tuples", (support::atomic_tuple(), 1u32..=3), |(b, k)| {
        let dug: Vec<Multiset> = b.iter().map(|m| dig_multi(k, 1, m)).collect();
        let lhs = bridge_split(&dug).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let base = bridge_split(&b).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let rhs: BTreeSet<Vec<Multiset>> = (1..=k)
            .flat_map(|j| base.iter().map(move |f| f.iter().map(|m| m.map(|x| dig_step(&[j], x))).collect()))
            .collect();
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })?;
    run(
        "isomorphic dug tuples have isomorphic bases",
        (support::atomic_tuple(), support::atomic_tuple(), any::<bool>(), support::keys(), 1u32..=3),
        |(b, other, renamed, keys, k)| {
            let b2 = if renamed {
                let mut atoms = BTreeSet::new();
                b.iter().flat_map(|m| m.support()).for_each(|v| support::atoms(v, &mut atoms));
                let rho = support::fresh_renaming(&atoms, &keys);
                b.iter().map(|m| support::rename_multiset(&rho, m)).collect()
            } else {
                other
            };
            let dig = |t: &[Multiset]| t.iter().map(|m| dig_multi(k, 1, m)).collect::<Vec<_>>();
            if tuple_multiset_iso(&dig(&b), &dig(&b2)).is_some() {
                prop_assert!(tuple_multiset_iso(&b, &b2).is_some());
            } else {
                prop_assert!(!renamed);
            }
            Ok(())
        },
    )?;
    run(
        "q_split commutes with renaming",
        (prop::collection::vec(support::value(), 1..=3), support::multiset(), support::keys()),
        |(r, a, keys)| {
            let mut atoms = BTreeSet::new();
            r.iter().chain(a.support()).for_each(|v| support::atoms(v, &mut atoms));
            let rho = support::fresh_renaming(&atoms, &keys);
            let r2: Vec<Value> = r.iter().map(|v| support::rename(&rho, v)).collect();
            let mut lhs = q_split(&r2, &support::rename_multiset(&rho, &a));
            let mut rhs: Vec<Multiset> = q_split(&r, &a).iter().map(|m| support::rename_multiset(&rho, m)).collect();
            lhs.sort();
            rhs.sort();
            prop_assert_eq!(lhs, rhs);
            Ok(())
        },
    )?;
    Ok("9 properties, 1000 cases each".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("experiment of PSI2", 1, criterion_1),
        ("projection of PSI2 onto plain atoms", 1, criterion_2),
        ("bridges of PSI2", 1, criterion_3),
        ("two experiments of FIG1 with one result", 1, criterion_4),
        ("separate agrees with iso_structure", 300, criterion_5),
        ("injective k-points are renamed canonical results", 600, criterion_6),
        ("boxes of connected structures", 60, criterion_7),
        ("algebraic properties", 120, criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let out = out.and_then(|m| {
            if took > Duration::from_secs(*limit) {
                Err(format!("{m}; took {took:.2?}, limit {limit} s"))
            } else {
                Ok(m)
            }
        });
        match out {
            Ok(m) => println!("criterion {} PASS {name}: {m} [{took:.2?}]", i + 1),
            Err(m) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {m} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
