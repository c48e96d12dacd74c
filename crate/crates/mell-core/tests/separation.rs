use std::collections::{BTreeMap, BTreeSet};

use mell_core::experiment::{canonical_injective_atomic, eval_k_experiment};
use mell_core::iso::validate_exp_iso;
use mell_core::separation::{
    bridge_split, bridges, choose_k, key_match, q_split, r_quotient, separate, separate_connected, Outcome, PsVerdict,
};
use mell_core::value::{parse_tuple, parse_value};
use mell_core::{fixtures, Builder, CellType, Indexed, Multiset, SeparationError, Structure, Value};

fn v(s: &str) -> Value {
    parse_value(s).unwrap()
}

fn m(items: &[&str]) -> Multiset {
    items.iter().map(|s| v(s)).collect()
}

fn r2() -> Vec<Value> {
    parse_tuple("(-[g1@[1],g1@[2],g1@[3],g2@[1],g2@[2],g2@[3]],+[+(g1@[1],g2@[1]),+(g1@[2],g2@[2]),+(g1@[3],g2@[3])])")
        .unwrap()
}

fn psi2() -> Indexed<Structure> {
    fixtures::psi2().map_base(|r| r.lps().clone()).unwrap()
}

fn psi2_with(ty: CellType) -> Indexed<Structure> {
    let s = Builder::new()
        .cell("W", CellType::Why, "c1", &["p1", "p2"])
        .door("p1", 1)
        .door("p2", 1)
        .cell("v", CellType::Bang, "c2", &["a"])
        .cell("T", ty, "t", &["tl", "tr"])
        .wire("a", "t")
        .wire("p2", "tl")
        .wire("p1", "tr")
        .build()
        .unwrap();
    Indexed::new(s, BTreeMap::from([("c1".into(), 1), ("c2".into(), 2)])).unwrap()
}

#[test]
fn splitting_by_automorphisms() {
    let a1 = m(&["g1@[1]", "g1@[2]", "g1@[3]", "g2@[1]", "g2@[2]", "g2@[3]"]);
    let mut classes = q_split(&r2(), &a1);
    classes.sort();
    assert_eq!(classes, [m(&["g1@[1]", "g1@[2]", "g1@[3]"]), m(&["g2@[1]", "g2@[2]", "g2@[3]"])]);

    let distinct = q_split(&[], &m(&["g", "+*", "+(g,h)", "-*"]));
    assert_eq!(distinct.len(), 4);
    assert!(distinct.iter().all(|c| c.card() == 1));
    let renamable = q_split(&[], &m(&["g", "h", "h"]));
    assert_eq!(renamable, [m(&["g", "h", "h"])]);
}

#[test]
fn bridges_and_quotients() {
    let d0: BTreeSet<Value> = [v("+(a,b)"), v("c"), v("b")].into();
    let comps = bridges(&d0).unwrap();
    assert_eq!(comps.len(), 2);
    assert!(comps.contains(&[v("+(a,b)"), v("b")].into()));
    assert!(matches!(bridges(&[v("+*")].into()), Err(SeparationError::Precondition(_))));

    let split = bridge_split(&[m(&["+(a,b)", "c"]), m(&["b"])]).unwrap();
    assert_eq!(split, BTreeSet::from([vec![m(&["+(a,b)"]), m(&["b"])], vec![m(&["c"]), Multiset::new()]]));
    let single = bridge_split(&[m(&["a", "a"])]).unwrap();
    assert_eq!(single, BTreeSet::from([vec![m(&["a", "a"])]]));

    let set = BTreeSet::from([
        vec![m(&["a@[1]"]), m(&["a@[2]"])],
        vec![m(&["b@[1]"]), m(&["b@[2]"])],
        vec![m(&["c"]), Multiset::new()],
    ]);
    let mut sizes: Vec<usize> = r_quotient(&set).iter().map(BTreeSet::len).collect();
    sizes.sort();
    assert_eq!(sizes, [1, 2]);
}

#[test]
fn matching_experiments() {
    let labels = BTreeMap::from([("p1".to_string(), v("g2")), ("p2".to_string(), v("g1"))]);
    let e = canonical_injective_atomic(&psi2(), 3).unwrap();
    let f = eval_k_experiment(&psi2(), &labels, 3).unwrap();
    let w = key_match(&psi2(), &e, &psi2(), &f).unwrap().unwrap();
    validate_exp_iso(&psi2(), &e, &psi2(), &f, &w).unwrap();
    assert_eq!(w.phi.cell("T").map(String::as_str), Some("T"));

    let other = psi2_with(CellType::Par);
    let g = canonical_injective_atomic(&other, 3).unwrap();
    assert!(key_match(&psi2(), &e, &other, &g).unwrap().is_err());

    let low = canonical_injective_atomic(&psi2(), 2).unwrap();
    assert!(matches!(key_match(&psi2(), &low, &psi2(), &low), Err(SeparationError::Precondition(_))));
    let shared = BTreeMap::from([("p1".to_string(), v("g")), ("p2".to_string(), v("g"))]);
    let s = eval_k_experiment(&psi2(), &shared, 3).unwrap();
    assert!(matches!(key_match(&psi2(), &s, &psi2(), &s), Err(SeparationError::Precondition(_))));
    assert!(matches!(key_match(&psi2(), &e, &psi2(), &low), Err(SeparationError::Precondition(_))));
}

#[test]
fn separating_linear_structures() {
    assert_eq!(choose_k(&fixtures::psi2_lps(), fixtures::one().structure()), 3);
    assert_eq!(choose_k(fixtures::one().structure(), fixtures::one().structure()), 2);

    let same = separate(&fixtures::psi2(), &fixtures::psi2()).unwrap();
    assert!(same.is_same());
    assert_eq!(same.k, 3);
    assert!(!separate(&fixtures::psi2(), &fixtures::one()).unwrap().is_same());
    assert!(!separate(&psi2(), &psi2_with(CellType::Par)).unwrap().is_same());
    assert!(separate(&psi2(), &psi2_with(CellType::Tensor)).unwrap().is_same());
    assert!(separate(&fixtures::fig1(), &fixtures::fig1()).unwrap().is_same());

    let (r1, r2) = fixtures::two_boxes();
    let v = separate(&r1, &r2).unwrap();
    let Outcome::SameLps(w) = &v.outcome else { panic!("expected a witness") };
    assert_eq!(w.phi.cell("v1").map(String::as_str), Some("v1"));
}

#[test]
fn separating_connected_structures() {
    let v = separate_connected(&fixtures::psi2(), &fixtures::psi2()).unwrap();
    assert!(matches!(v.ps, PsVerdict::Iso(_)));
    let (r1, r2) = fixtures::two_boxes();
    let v = separate_connected(&r1, &r2).unwrap();
    assert!(v.lps.is_same());
    assert!(matches!(v.ps, PsVerdict::LpsOnly(_)));
    let v = separate_connected(&fixtures::psi2(), &fixtures::one()).unwrap();
    assert!(matches!(v.ps, PsVerdict::NotIso(_)));
}
