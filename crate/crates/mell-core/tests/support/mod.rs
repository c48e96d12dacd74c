//! Strategies and small oracles shared by the property tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use mell_core::{Atom, Multiset, PartialInjection, Pol, Value};
use proptest::prelude::*;

pub fn pol() -> impl Strategy<Value = Pol> {
    prop_oneof![Just(Pol::Pos), Just(Pol::Neg)]
}

pub fn atom(names: &'static [&'static str], max_loc: usize) -> impl Strategy<Value = Atom> {
    (prop::sample::select(names), prop::collection::vec(1u32..=3, 0..=max_loc))
        .prop_map(|(n, loc)| Atom::indexed(n, &loc))
}

fn value_in(names: &'static [&'static str], max_loc: usize, depth: u32) -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![3 => atom(names, max_loc).prop_map(Value::Atom), 1 => pol().prop_map(Value::Unit)];
    leaf.prop_recursive(depth, 24, 3, |inner| {
        prop_oneof![
            (pol(), inner.clone(), inner.clone()).prop_map(|(p, a, b)| Value::pair(p, a, b)),
            (pol(), prop::collection::vec(inner, 0..=3)).prop_map(|(p, xs)| Value::bag(p, xs)),
        ]
    })
}

pub fn value() -> impl Strategy<Value = Value> {
    value_in(&["a", "b", "c", "d"], 2, 3)
}

pub fn atom_free_value() -> impl Strategy<Value = Value> {
    pol().prop_map(Value::Unit).prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (pol(), inner.clone(), inner.clone()).prop_map(|(p, a, b)| Value::pair(p, a, b)),
            (pol(), prop::collection::vec(inner, 0..=3)).prop_map(|(p, xs)| Value::bag(p, xs)),
        ]
    })
}

pub fn multiset() -> impl Strategy<Value = Multiset> {
    prop::collection::vec(value(), 0..=4).prop_map(|xs| xs.into_iter().collect())
}

/// Values with at least one atom.
pub fn atomic_value() -> impl Strategy<Value = Value> {
    value_in(&["a", "b", "c", "d", "e", "f"], 1, 2).prop_filter("has an atom", Value::has_atoms)
}

/// Tuples of multisets of values with atoms.
pub fn atomic_tuple() -> impl Strategy<Value = Vec<Multiset>> {
    prop::collection::vec(prop::collection::vec(atomic_value(), 0..=3).prop_map(|xs| xs.into_iter().collect()), 1..=3)
}

/// Renames atoms by table lookup, independently of the library.
pub fn rename(rho: &BTreeMap<Atom, Atom>, v: &Value) -> Value {
    match v {
        Value::Atom(a) => Value::Atom(rho.get(a).cloned().unwrap_or_else(|| panic!("{a} not renamed"))),
        Value::Unit(p) => Value::Unit(*p),
        Value::Pair(p, a, b) => Value::pair(*p, rename(rho, a), rename(rho, b)),
        Value::Bag(p, m) => Value::bag(*p, m.elements().map(|x| rename(rho, x))),
    }
}

pub fn rename_multiset(rho: &BTreeMap<Atom, Atom>, m: &Multiset) -> Multiset {
    m.elements().map(|x| rename(rho, x)).collect()
}

pub fn atoms(v: &Value, out: &mut BTreeSet<Atom>) {
    match v {
        Value::Atom(a) => {
            out.insert(a.clone());
        }
        Value::Unit(_) => {}
        Value::Pair(_, a, b) => {
            atoms(a, out);
            atoms(b, out);
        }
        Value::Bag(_, m) => m.support().for_each(|x| atoms(x, out)),
    }
}

pub fn keys() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(any::<u64>(), 64)
}

/// A bijection from `atoms` onto fresh plain atoms, in the order given by
/// sorting `keys`.
pub fn fresh_renaming(atoms: &BTreeSet<Atom>, keys: &[u64]) -> BTreeMap<Atom, Atom> {
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by_key(|&i| (keys[i % keys.len()], i));
    atoms.iter().zip(order).map(|(a, t)| (a.clone(), Atom::plain(&format!("z{t}")))).collect()
}

pub fn pinj(rho: &BTreeMap<Atom, Atom>) -> PartialInjection {
    PartialInjection::from_pairs(rho.iter().map(|(a, b)| (a.clone(), b.clone()))).expect("injective")
}
