use std::collections::{BTreeMap, BTreeSet};

use mell_core::ps::{box_extract, recover_boxes, BoxMap, ProofStructure};
use mell_core::{fixtures, Builder, CellType, Class, Level, StructError, Structure, Violation};

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn bang_over_one() -> Structure {
    Builder::new()
        .cell("v", CellType::Bang, "c", &["a"])
        .cell("O", CellType::One, "o", &[])
        .wire("a", "o")
        .build()
        .unwrap()
}

fn why_over_one(doors: u32) -> Structure {
    Builder::new()
        .cell("W", CellType::Why, "c", &["p"])
        .door("p", doors)
        .cell("O", CellType::One, "o", &[])
        .wire("p", "o")
        .build()
        .unwrap()
}

#[test]
fn validation_levels() {
    assert_eq!(fixtures::one().structure().level(), Level::Lps);
    assert_eq!(fixtures::axpair().structure().level(), Level::Lps);
    assert_eq!(fixtures::psi2().structure().level(), Level::Lps);
    assert_eq!(fixtures::fig1().structure().level(), Level::Lps);

    let looped = Builder::new().cell("v", CellType::Bang, "c", &["a"]).wire("a", "c").build().unwrap();
    let v = looped.validate();
    assert!(v.level < Level::Plps);
    assert!(v.violations.iter().any(|x| matches!(x, Violation::Cycle(_))));
    assert!(looped.remove_terminal(&["v".into()]).is_err());

    let unwired = Builder::new().cell("T", CellType::Tensor, "t", &["a", "b"]).build().unwrap();
    assert_eq!(unwired.level(), Level::Raw);
    assert!(unwired.validate().violations.contains(&Violation::Unwired("a".into())));

    let principal_wire = Builder::new()
        .cell("O1", CellType::One, "o1", &[])
        .cell("O2", CellType::One, "o2", &[])
        .wire("o1", "o2")
        .build()
        .unwrap();
    assert!(principal_wire.validate().violations.contains(&Violation::PrincipalWire("o1".into(), "o2".into())));

    let uneven = Builder::new().cell("W", CellType::Why, "c", &["p"]).door("p", 1).wire("p", "q").build().unwrap();
    assert_eq!(uneven.level(), Level::Plps);
}

#[test]
fn malformed_structures_are_rejected() {
    let bad_door = Builder::new().cell("O", CellType::One, "o", &[]).door("o", 1).build();
    assert!(matches!(bad_door, Err(StructError::Malformed(_))));
    let bad_arity = Builder::new().cell("T", CellType::Tensor, "t", &["a"]).wire("a", "b").build();
    assert!(matches!(bad_arity, Err(StructError::Malformed(_))));
    let shared = Builder::new().cell("O", CellType::One, "p", &[]).cell("B", CellType::Bot, "p", &[]).build();
    assert!(matches!(shared, Err(StructError::Malformed(_))));
}

#[test]
fn conclusions_and_axioms() {
    let ax = fixtures::axpair();
    let s = ax.structure();
    assert_eq!(s.conclusions(), set(&["p", "q"]));
    assert_eq!(s.isolated_axioms(), BTreeSet::from([("p".to_string(), "q".to_string())]));
    assert_eq!(fixtures::psi2().structure().conclusions(), set(&["c1", "c2"]));
    assert_eq!(fixtures::fig1().structure().conclusions(), set(&["c1", "c2"]));
    assert_eq!(fixtures::psi2().structure().terminal_cells(), set(&["W", "v"]));
    assert!(fixtures::psi2().structure().terminal_axioms().is_empty());
    assert_eq!(fixtures::psi2().structure().axioms().len(), 2);
}

#[test]
fn depths() {
    let psi2 = fixtures::psi2_lps();
    for c in ["c1", "c2"] {
        assert_eq!(psi2.depth(c).unwrap(), 0);
    }
    assert_eq!(psi2.depth("tl").unwrap(), 1);
    assert_eq!(psi2.depth("t").unwrap(), 1);
    assert_eq!(psi2.conclusion_under("tl").unwrap(), "c2");
    assert_eq!(psi2.conclusion_under("p2").unwrap(), "c1");
    assert_eq!(psi2.conclusion_under("t").unwrap(), "c2");
    let fig1 = fixtures::fig1_lps();
    assert_eq!(fig1.depth("p2'").unwrap(), 1);
    assert_eq!(fig1.depth("p1'").unwrap(), 0);
    assert_eq!(fig1.depth("q'").unwrap(), 1);
    assert_eq!(fig1.max_depth(), 1);
    assert!(matches!(fig1.depth("nowhere"), Err(StructError::UnknownPort(_))));
}

#[test]
fn classes() {
    let class = |s: &Structure| s.classify().unwrap();
    assert_eq!(class(&Structure::empty()), Class::Empty);
    assert_eq!(class(fixtures::axpair().structure()), Class::Ax);
    assert_eq!(class(fixtures::one().structure()), Class::Empty);
    let unit = Builder::new()
        .cell("O0", CellType::One, "c0", &[])
        .cell("W", CellType::Why, "c", &["p"])
        .door("p", 0)
        .cell("O", CellType::One, "o", &[])
        .wire("p", "o")
        .build()
        .unwrap();
    assert_eq!(class(&unit), Class::Unit);
    assert_eq!(class(&fixtures::psi2_lps()), Class::CBox);
    assert_eq!(class(&fixtures::fig1_lps()), Class::Contr);
    assert_eq!(class(&bang_over_one()), Class::BangUnit);
    assert_eq!(class(&why_over_one(0)), Class::Der);
    assert_eq!(class(&why_over_one(1)), Class::ContrUnit);
    let bare_weak = Builder::new().cell("W", CellType::Why, "c", &[]).build().unwrap();
    assert_eq!(class(&bare_weak), Class::Empty);
    let weak = Builder::new()
        .cell("W0", CellType::Why, "c0", &[])
        .cell("v", CellType::Bang, "c", &["a"])
        .cell("O", CellType::One, "o", &[])
        .wire("a", "o")
        .build()
        .unwrap();
    assert_eq!(class(&weak), Class::Weak);
    let tensor = Builder::new()
        .cell("T", CellType::Tensor, "t", &["a", "b"])
        .cell("O1", CellType::One, "o1", &[])
        .cell("O2", CellType::One, "o2", &[])
        .wire("a", "o1")
        .wire("b", "o2")
        .build()
        .unwrap();
    assert_eq!(class(&tensor), Class::Mult);
}

#[test]
fn measures() {
    let empty = Structure::empty().measure();
    assert_eq!((empty.cosize, empty.mes), (0, (0, 0)));
    let psi2 = fixtures::psi2_lps();
    assert_eq!(psi2.measure().cosize, 2);
    assert_eq!(psi2.measure().mes, (2, 10));
    let stripped = psi2.strip_layer().unwrap();
    assert!(stripped.measure().mes < psi2.measure().mes);
}

#[test]
fn removing_terminal_cells() {
    let one = fixtures::one();
    let gone = one.structure().remove_terminal(&["O".into()]).unwrap();
    assert_eq!(gone, Structure::empty());

    let psi2 = fixtures::psi2_lps();
    assert!(matches!(psi2.remove_terminal(&["T".into()]), Err(StructError::NotTerminal(_))));
    assert!(matches!(psi2.remove_terminal(&["W".into()]), Err(StructError::BadCell(..))));
    let opened = psi2.remove_terminal(&["v".into()]).unwrap();
    assert_eq!(opened.conclusions(), set(&["c1", "t"]));
    assert!(opened.level() >= Level::Plps);
}

#[test]
fn reducing_isolated_cells() {
    let psi2 = fixtures::psi2_lps();
    assert_eq!(psi2.reduce_isolated("v").unwrap(), psi2);
    assert_eq!(bang_over_one().reduce_isolated("v").unwrap().cells().keys().collect::<Vec<_>>(), ["O"]);
    let w = why_over_one(2).reduce_isolated("W").unwrap();
    assert_eq!(w.door_count("p"), Some(1));
    assert_eq!(w.level(), Level::Lps);
    assert!(matches!(psi2.reduce_isolated("T"), Err(StructError::NotTerminal(_))));
}

#[test]
fn stripping_a_layer() {
    let psi2 = fixtures::psi2_lps();
    let s = psi2.strip_layer().unwrap();
    assert_eq!(s.door_count("p1"), Some(0));
    assert_eq!(s.door_count("p2"), Some(0));
    assert!(s.cell("v").is_none());
    assert_eq!(s.conclusions(), set(&["c1", "t"]));
    assert_eq!(s.level(), Level::Lps);
    for p in s.ports() {
        let before = psi2.depth(p).unwrap();
        assert_eq!(s.depth(p).unwrap(), before.saturating_sub(1), "{p}");
    }
    assert!(matches!(fixtures::fig1_lps().strip_layer(), Err(StructError::NotCbox)));
}

#[test]
fn extracting_boxes() {
    let fig1 = fixtures::fig1();
    let b = box_extract(fig1.base(), "v").unwrap();
    let s = b.lps();
    assert_eq!(s.level(), Level::Lps);
    let mut types: Vec<CellType> = s.cells().values().map(|c| c.ty).collect();
    types.sort();
    assert_eq!(types, [CellType::Par, CellType::One, CellType::Why]);
    let why = s.cells().values().find(|c| c.ty == CellType::Why).unwrap();
    assert_eq!(why.aux, ["p2"]);
    assert_eq!(s.door_count("p2"), Some(0));
    assert_eq!(s.partner("p2").map(String::as_str), Some("p2'"));
    assert_eq!(s.conclusions().len(), 2);
    assert!(s.conclusions().contains("q'"));

    let bare = ProofStructure::new(bang_over_one(), BoxMap::new()).unwrap();
    let inner = box_extract(&bare, "v").unwrap();
    assert_eq!(inner.lps().cells().keys().collect::<Vec<_>>(), ["O"]);
    assert_eq!(inner.lps().conclusions(), set(&["o"]));

    assert!(box_extract(fig1.base(), "W").is_err());
}

#[test]
fn box_functions_must_match_doors() {
    assert!(matches!(ProofStructure::new(fixtures::fig1_lps(), BoxMap::new()), Err(StructError::InvalidPs(_))));
    let twice = BoxMap::from([("v".to_string(), set(&["p1", "p2"]))]);
    assert!(ProofStructure::new(fixtures::fig1_lps(), twice).is_err());
}

#[test]
fn recovering_boxes() {
    let psi2 = recover_boxes(&fixtures::psi2_lps()).unwrap();
    assert_eq!(psi2.b(), &BTreeMap::from([("v".to_string(), set(&["p1", "p2"]))]));
    assert_eq!(psi2, *fixtures::psi2().base());
    let flat = recover_boxes(fixtures::one().structure()).unwrap();
    assert!(flat.b().is_empty());
    assert!(matches!(recover_boxes(&fixtures::two_boxes_lps()), Err(StructError::AmbiguousBoxes)));
    let (r1, r2) = fixtures::two_boxes();
    assert_ne!(r1.base().b(), r2.base().b());
    assert_eq!(r1.structure(), r2.structure());
}

#[test]
fn axioms_above() {
    let fig1 = fixtures::fig1_lps();
    assert!(fig1.has_axiom_above("l1"));
    assert!(fig1.has_axiom_above("p2"));
    assert!(!fig1.has_axiom_above("q"));
    assert!(!fig1.has_axiom_above("c2"));
    assert!(fig1.has_axiom_above("c1"));
}

#[test]
fn connectivity() {
    assert!(fixtures::psi2_lps().is_connected());
    assert!(!fixtures::fig1_lps().is_connected());
    assert!(!fixtures::two_boxes_lps().is_connected());
}
