//! Elements of the relational model with indexed atoms, and the operations
//! acting on them: orthogonality, digging, atom extraction, renamings.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::ValueError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    Pos,
    Neg,
}

impl Pol {
    pub fn dual(self) -> Pol {
        match self {
            Pol::Pos => Pol::Neg,
            Pol::Neg => Pol::Pos,
        }
    }

    fn sign(self) -> char {
        match self {
            Pol::Pos => '+',
            Pol::Neg => '-',
        }
    }
}

/// An atom with its index sequence. An empty `loc` is a plain atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub name: Arc<str>,
    pub loc: Vec<u32>,
}

impl Atom {
    pub fn plain(name: &str) -> Atom {
        Atom { name: Arc::from(name), loc: Vec::new() }
    }

    pub fn indexed(name: &str, loc: &[u32]) -> Atom {
        Atom { name: Arc::from(name), loc: loc.to_vec() }
    }

    pub fn is_plain(&self) -> bool {
        self.loc.is_empty()
    }

    pub fn with_suffix(&self, s: &[u32]) -> Atom {
        let mut loc = self.loc.clone();
        loc.extend_from_slice(s);
        Atom { name: self.name.clone(), loc }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Atom(Atom),
    Unit(Pol),
    Pair(Pol, Box<Value>, Box<Value>),
    Bag(Pol, Multiset),
}

/// Finite multiset in canonical form: every stored multiplicity is at least 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset(BTreeMap<Value, usize>);

impl Multiset {
    pub fn new() -> Multiset {
        Multiset(BTreeMap::new())
    }

    pub fn singleton(v: Value) -> Multiset {
        let mut m = Multiset::new();
        m.insert(v, 1);
        m
    }

    pub fn insert(&mut self, v: Value, n: usize) {
        if n > 0 {
            *self.0.entry(v).or_insert(0) += n;
        }
    }

    pub fn add(&mut self, other: &Multiset) {
        for (v, n) in &other.0 {
            self.insert(v.clone(), *n);
        }
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a Multiset>>(parts: I) -> Multiset {
        let mut m = Multiset::new();
        for p in parts {
            m.add(p);
        }
        m
    }

    /// Removes `n` copies of `v`; returns false if fewer are present.
    pub fn remove(&mut self, v: &Value, n: usize) -> bool {
        match self.0.get_mut(v) {
            Some(c) if *c >= n => {
                *c -= n;
                if *c == 0 {
                    self.0.remove(v);
                }
                true
            }
            _ => false,
        }
    }

    pub fn card(&self) -> usize {
        self.0.values().sum()
    }

    pub fn count(&self, v: &Value) -> usize {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn distinct(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Value, usize)> {
        self.0.iter().map(|(v, n)| (v, *n))
    }

    pub fn support(&self) -> impl Iterator<Item = &Value> {
        self.0.keys()
    }

    /// Every element with repetitions, in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = &Value> {
        self.0.iter().flat_map(|(v, n)| core::iter::repeat_n(v, *n))
    }

    pub fn scale(&self, k: usize) -> Multiset {
        Multiset(self.0.iter().filter(|_| k > 0).map(|(v, n)| (v.clone(), n * k)).collect())
    }

    pub fn map(&self, mut f: impl FnMut(&Value) -> Value) -> Multiset {
        let mut m = Multiset::new();
        for (v, n) in &self.0 {
            m.insert(f(v), *n);
        }
        m
    }

    pub fn try_map<E>(&self, mut f: impl FnMut(&Value) -> Result<Value, E>) -> Result<Multiset, E> {
        let mut m = Multiset::new();
        for (v, n) in &self.0 {
            m.insert(f(v)?, *n);
        }
        Ok(m)
    }

    pub fn filter(&self, mut keep: impl FnMut(&Value) -> bool) -> Multiset {
        Multiset(self.0.iter().filter(|(v, _)| keep(v)).map(|(v, n)| (v.clone(), *n)).collect())
    }

    /// `a^At`: the elements carrying at least one atom.
    pub fn atomic_part(&self) -> Multiset {
        self.filter(|v| v.has_atoms())
    }

    /// `a^*`: the atom-free elements.
    pub fn star_part(&self) -> Multiset {
        self.filter(|v| !v.has_atoms())
    }
}

impl FromIterator<Value> for Multiset {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for v in iter {
            m.insert(v, 1);
        }
        m
    }
}

impl Value {
    pub fn atom(name: &str) -> Value {
        Value::Atom(Atom::plain(name))
    }

    pub fn indexed(name: &str, loc: &[u32]) -> Value {
        Value::Atom(Atom::indexed(name, loc))
    }

    pub fn pair(pol: Pol, a: Value, b: Value) -> Value {
        Value::Pair(pol, Box::new(a), Box::new(b))
    }

    pub fn bag<I: IntoIterator<Item = Value>>(pol: Pol, items: I) -> Value {
        Value::Bag(pol, items.into_iter().collect())
    }

    pub fn polarity(&self) -> Option<Pol> {
        match self {
            Value::Atom(_) => None,
            Value::Unit(p) | Value::Pair(p, _, _) | Value::Bag(p, _) => Some(*p),
        }
    }

    pub fn has_atoms(&self) -> bool {
        match self {
            Value::Atom(_) => true,
            Value::Unit(_) => false,
            Value::Pair(_, a, b) => a.has_atoms() || b.has_atoms(),
            Value::Bag(_, m) => m.support().any(Value::has_atoms),
        }
    }

    /// True when every atom occurring in the value is plain (the value lies in D).
    pub fn is_plain(&self) -> bool {
        match self {
            Value::Atom(a) => a.is_plain(),
            Value::Unit(_) => true,
            Value::Pair(_, a, b) => a.is_plain() && b.is_plain(),
            Value::Bag(_, m) => m.support().all(Value::is_plain),
        }
    }

    /// Number of nodes; used to order matching work.
    pub fn size(&self) -> usize {
        match self {
            Value::Atom(_) | Value::Unit(_) => 1,
            Value::Pair(_, a, b) => 1 + a.size() + b.size(),
            Value::Bag(_, m) => 1 + m.entries().map(|(v, n)| n * v.size()).sum::<usize>(),
        }
    }

    /// The value with every atom replaced by one placeholder.
    pub fn erased(&self) -> Value {
        match self {
            Value::Atom(_) => Value::atom(""),
            Value::Unit(p) => Value::Unit(*p),
            Value::Pair(p, a, b) => Value::pair(*p, a.erased(), b.erased()),
            Value::Bag(p, m) => Value::Bag(*p, m.map(Value::erased)),
        }
    }
}

/// Flips every polarity; atoms are self-dual.
pub fn orthogonal(v: &Value) -> Value {
    match v {
        Value::Atom(a) => Value::Atom(a.clone()),
        Value::Unit(p) => Value::Unit(p.dual()),
        Value::Pair(p, a, b) => Value::pair(p.dual(), orthogonal(a), orthogonal(b)),
        Value::Bag(p, m) => Value::Bag(p.dual(), m.map(orthogonal)),
    }
}

/// Appends `s` to the index sequence of every atom.
pub fn dig_step(s: &[u32], v: &Value) -> Value {
    if s.is_empty() {
        return v.clone();
    }
    match v {
        Value::Atom(a) => Value::Atom(a.with_suffix(s)),
        Value::Unit(p) => Value::Unit(*p),
        Value::Pair(p, a, b) => Value::pair(*p, dig_step(s, a), dig_step(s, b)),
        Value::Bag(p, m) => Value::Bag(*p, m.map(|x| dig_step(s, x))),
    }
}

/// All index sequences of `[k]^d` in lexicographic order.
pub fn index_sequences(k: u32, d: u32) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = alloc::vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::with_capacity(out.len() * k as usize);
        for s in &out {
            for j in 1..=k {
                let mut t = s.clone();
                t.push(j);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// The multiset of the `k^d` indexed copies of `a`.
pub fn dig_multi(k: u32, d: u32, a: &Multiset) -> Multiset {
    if d == 0 {
        return a.clone();
    }
    let mut out = Multiset::new();
    for s in index_sequences(k, d) {
        for (v, n) in a.entries() {
            out.insert(dig_step(&s, v), n);
        }
    }
    out
}

fn strip_last(v: &Value, last: &mut Option<u32>) -> Result<Value, ValueError> {
    Ok(match v {
        Value::Atom(a) => {
            let Some((&j, rest)) = a.loc.split_last() else {
                return Err(ValueError::Undig("plain atom in a dug multiset".into()));
            };
            match last {
                Some(t) if *t != j => {
                    return Err(ValueError::Undig("atoms of one element disagree on their last index".into()))
                }
                _ => *last = Some(j),
            }
            Value::Atom(Atom { name: a.name.clone(), loc: rest.to_vec() })
        }
        Value::Unit(p) => Value::Unit(*p),
        Value::Pair(p, a, b) => Value::pair(*p, strip_last(a, last)?, strip_last(b, last)?),
        Value::Bag(p, m) => Value::Bag(*p, m.try_map(|x| strip_last(x, last))?),
    })
}

/// Inverse of `dig_multi(k, 1, ·)`.
pub fn undig(k: u32, a: &Multiset) -> Result<Multiset, ValueError> {
    if k == 0 {
        return Err(ValueError::Undig("k must be positive".into()));
    }
    let mut b = Multiset::new();
    for (v, n) in a.entries() {
        if v.has_atoms() {
            let mut last = None;
            let stripped = strip_last(v, &mut last)?;
            if last == Some(1) {
                b.insert(stripped, n);
            }
        } else if n % k as usize == 0 {
            b.insert(v.clone(), n / k as usize);
        } else {
            return Err(ValueError::Undig("atom-free multiplicity not divisible by k".into()));
        }
    }
    if dig_multi(k, 1, &b) != *a {
        return Err(ValueError::Undig("multiset is not a sum of k dug copies".into()));
    }
    Ok(b)
}

fn collect_atoms(v: &Value, out: &mut BTreeSet<Atom>) {
    match v {
        Value::Atom(a) => {
            out.insert(a.clone());
        }
        Value::Unit(_) => {}
        Value::Pair(_, a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
        Value::Bag(_, m) => m.support().for_each(|x| collect_atoms(x, out)),
    }
}

pub fn atoms_of(v: &Value) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    collect_atoms(v, &mut out);
    out
}

pub fn atoms_of_multiset(a: &Multiset) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    a.support().for_each(|x| collect_atoms(x, &mut out));
    out
}

pub fn atoms_of_tuple(r: &[Value]) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    r.iter().for_each(|x| collect_atoms(x, &mut out));
    out
}

/// A finite injective partial map on atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartialInjection {
    fwd: BTreeMap<Atom, Atom>,
    bwd: BTreeMap<Atom, Atom>,
}

impl PartialInjection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity<'a, I: IntoIterator<Item = &'a Atom>>(atoms: I) -> Self {
        let mut p = Self::new();
        for a in atoms {
            p.fwd.insert(a.clone(), a.clone());
            p.bwd.insert(a.clone(), a.clone());
        }
        p
    }

    pub fn from_pairs<I: IntoIterator<Item = (Atom, Atom)>>(pairs: I) -> Result<Self, ValueError> {
        let mut p = Self::new();
        for (a, b) in pairs {
            if !p.bind(&a, &b) {
                return Err(ValueError::NotInjective(alloc::format!("{a} -> {b}")));
            }
        }
        Ok(p)
    }

    /// Adds `a -> b`; false when this contradicts an existing binding.
    pub fn bind(&mut self, a: &Atom, b: &Atom) -> bool {
        match (self.fwd.get(a), self.bwd.get(b)) {
            (Some(x), _) if x != b => false,
            (_, Some(y)) if y != a => false,
            (Some(_), Some(_)) => true,
            _ => {
                self.fwd.insert(a.clone(), b.clone());
                self.bwd.insert(b.clone(), a.clone());
                true
            }
        }
    }

    pub fn get(&self, a: &Atom) -> Option<&Atom> {
        self.fwd.get(a)
    }

    pub fn preimage(&self, b: &Atom) -> Option<&Atom> {
        self.bwd.get(b)
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &Atom)> {
        self.fwd.iter()
    }

    pub fn inverse(&self) -> Self {
        Self { fwd: self.bwd.clone(), bwd: self.fwd.clone() }
    }

    /// `other ∘ self`, defined where both steps are.
    pub fn then(&self, other: &Self) -> Self {
        let mut p = Self::new();
        for (a, b) in &self.fwd {
            if let Some(c) = other.get(b) {
                p.bind(a, c);
            }
        }
        p
    }

    pub fn apply(&self, v: &Value) -> Result<Value, ValueError> {
        Ok(match v {
            Value::Atom(a) => {
                Value::Atom(self.fwd.get(a).cloned().ok_or_else(|| ValueError::Uncovered(alloc::format!("{a}")))?)
            }
            Value::Unit(p) => Value::Unit(*p),
            Value::Pair(p, a, b) => Value::pair(*p, self.apply(a)?, self.apply(b)?),
            Value::Bag(p, m) => Value::Bag(*p, self.apply_multiset(m)?),
        })
    }

    pub fn apply_multiset(&self, m: &Multiset) -> Result<Multiset, ValueError> {
        m.try_map(|x| self.apply(x))
    }

    pub fn apply_tuple(&self, r: &[Value]) -> Result<Vec<Value>, ValueError> {
        r.iter().map(|x| self.apply(x)).collect()
    }
}

pub fn apply_pinj(rho: &PartialInjection, v: &Value) -> Result<Value, ValueError> {
    rho.apply(v)
}

fn for_each_sub(v: &Value, mult: usize, f: &mut impl FnMut(&Value, usize)) {
    f(v, mult);
    match v {
        Value::Atom(_) | Value::Unit(_) => {}
        Value::Pair(_, a, b) => {
            for_each_sub(a, mult, f);
            for_each_sub(b, mult, f);
        }
        Value::Bag(_, m) => {
            for (x, n) in m.entries() {
                for_each_sub(x, mult * n, f);
            }
        }
    }
}

/// Every positive bag occurring in `r` has exactly `k` elements.
pub fn is_k_point(r: &[Value], k: usize) -> bool {
    let mut ok = true;
    for v in r {
        for_each_sub(v, 1, &mut |x, _| {
            if let Value::Bag(Pol::Pos, m) = x {
                ok &= m.card() == k;
            }
        });
    }
    ok
}

/// Occurrence counts of every atom in `r`, counted with multiplicity.
pub fn atom_occurrences(r: &[Value]) -> BTreeMap<Atom, usize> {
    let mut occ = BTreeMap::new();
    for v in r {
        for_each_sub(v, 1, &mut |x, n| {
            if let Value::Atom(a) = x {
                *occ.entry(a.clone()).or_insert(0) += n;
            }
        });
    }
    occ
}

/// Every atom occurs either not at all or exactly twice.
pub fn is_injective_point(r: &[Value]) -> bool {
    atom_occurrences(r).values().all(|&n| n == 2)
}

/// A substitution; atoms outside the table are left unchanged.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(pub BTreeMap<Atom, Value>);

impl Substitution {
    pub fn apply(&self, v: &Value) -> Value {
        match v {
            Value::Atom(a) => self.0.get(a).cloned().unwrap_or_else(|| v.clone()),
            Value::Unit(p) => Value::Unit(*p),
            Value::Pair(p, a, b) => Value::pair(*p, self.apply(a), self.apply(b)),
            Value::Bag(p, m) => Value::Bag(*p, m.map(|x| self.apply(x))),
        }
    }
}

pub fn substitute(sigma: &Substitution, v: &Value) -> Value {
    sigma.apply(v)
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.loc.is_empty() {
            f.write_str("@[")?;
            for (i, j) in self.loc.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{j}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(a) => write!(f, "{a}"),
            Value::Unit(p) => write!(f, "{}*", p.sign()),
            Value::Pair(p, a, b) => write!(f, "{}({a},{b})", p.sign()),
            Value::Bag(p, m) => write!(f, "{}{m}", p.sign()),
        }
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

pub fn format_tuple(r: &[Value]) -> String {
    let mut s = String::from("(");
    for (i, v) in r.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&alloc::format!("{v}"));
    }
    s.push(')');
    s
}

pub(crate) fn is_atom_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '\'' | '^' | '-' | '|')
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ValueError {
        ValueError::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, c: char) -> Result<(), ValueError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(&alloc::format!("expected '{c}'")))
        }
    }

    fn number(&mut self) -> Result<u32, ValueError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().map_err(|_| self.err("expected an index"))
    }

    fn value(&mut self) -> Result<Value, ValueError> {
        self.skip_ws();
        let Some(c) = self.peek() else { return Err(self.err("unexpected end of input")) };
        if c == '+' || c == '-' {
            let pol = if c == '+' { Pol::Pos } else { Pol::Neg };
            self.pos += 1;
            return match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    Ok(Value::Unit(pol))
                }
                Some('(') => {
                    self.pos += 1;
                    let a = self.value()?;
                    self.eat(',')?;
                    let b = self.value()?;
                    self.eat(')')?;
                    Ok(Value::pair(pol, a, b))
                }
                Some('[') => {
                    self.pos += 1;
                    let mut m = Multiset::new();
                    self.skip_ws();
                    if self.peek() == Some(']') {
                        self.pos += 1;
                        return Ok(Value::Bag(pol, m));
                    }
                    loop {
                        m.insert(self.value()?, 1);
                        self.skip_ws();
                        match self.peek() {
                            Some(',') => self.pos += 1,
                            Some(']') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return Err(self.err("expected ',' or ']'")),
                        }
                    }
                    Ok(Value::Bag(pol, m))
                }
                _ => Err(self.err("expected '*', '(' or '[' after a polarity")),
            };
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if is_atom_char(c)) {
            self.pos += self.peek().map_or(1, char::len_utf8);
        }
        if start == self.pos {
            return Err(self.err("expected a value"));
        }
        let name = &self.src[start..self.pos];
        let mut loc = Vec::new();
        if self.peek() == Some('@') {
            self.pos += 1;
            self.eat('[')?;
            self.skip_ws();
            if self.peek() != Some(']') {
                loop {
                    loc.push(self.number()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(']') => break,
                        _ => return Err(self.err("expected ',' or ']'")),
                    }
                }
            }
            self.eat(']')?;
        }
        Ok(Value::Atom(Atom { name: Arc::from(name), loc }))
    }
}

/// Parses the textual value syntax: `g3@[1,2]`, `+*`, `-(x,y)`, `+[x,y,y]`.
pub fn parse_value(src: &str) -> Result<Value, ValueError> {
    let mut p = Parser { src, pos: 0 };
    let v = p.value()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// Parses a parenthesised, comma separated tuple of values.
pub fn parse_tuple(src: &str) -> Result<Vec<Value>, ValueError> {
    let mut p = Parser { src, pos: 0 };
    p.eat('(')?;
    let mut out = Vec::new();
    p.skip_ws();
    if p.peek() == Some(')') {
        p.pos += 1;
    } else {
        loop {
            out.push(p.value()?);
            p.skip_ws();
            match p.peek() {
                Some(',') => p.pos += 1,
                Some(')') => {
                    p.pos += 1;
                    break;
                }
                _ => return Err(p.err("expected ',' or ')'")),
            }
        }
    }
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}
