//! Seeded random proof-structures.
//!
//! Structures are grown like cut-free sequent proofs: axioms and one cells
//! are combined by the rules of the calculus. A promotion closes a box over
//! one conclusion and turns every other conclusion into a pending door, which
//! must later become an auxiliary port of a why cell.

use std::collections::{BTreeMap, BTreeSet};

use mell_core::ps::{BoxMap, ProofStructure};
use mell_core::{Cell, CellType, Id, Indexed, Structure};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative frequency of the rules introducing each cell type.
#[derive(Clone, Debug, PartialEq)]
pub struct Weights {
    pub tensor: u32,
    pub par: u32,
    pub one: u32,
    pub bot: u32,
    pub bang: u32,
    pub why: u32,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { tensor: 3, par: 3, one: 2, bot: 1, bang: 3, why: 4 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub max_cells: usize,
    pub max_depth: usize,
    pub weights: Weights,
    /// Only connected structures: no mix, no weakening, no bottom.
    pub connected: bool,
    /// Whether weakenings and bottom cells may appear.
    pub allow_weakening: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            max_cells: 12,
            max_depth: 3,
            weights: Weights::default(),
            connected: false,
            allow_weakening: true,
        }
    }
}

#[derive(Clone, Debug)]
struct Concl {
    port: Id,
    /// Bangs whose boxes this conclusion leaves, innermost first.
    pending: Vec<Id>,
}

#[derive(Clone, Debug, Default)]
struct Frag {
    concl: Vec<Concl>,
    depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rule {
    Tensor,
    Par,
    Mix,
    Bot,
    Bang,
    Der,
    Weak,
    Contr,
    Close,
}

struct Gen<'a> {
    cfg: &'a GeneratorConfig,
    rng: ChaCha8Rng,
    cells: BTreeMap<Id, Cell>,
    ports: BTreeSet<Id>,
    doors: BTreeMap<Id, u32>,
    wires: Vec<(Id, Id)>,
    b: BoxMap,
    next: usize,
}

impl Gen<'_> {
    fn fresh(&mut self, prefix: &str) -> Id {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }

    fn port(&mut self) -> Id {
        let p = self.fresh("p");
        self.ports.insert(p.clone());
        p
    }

    fn add_cell(&mut self, ty: CellType, aux: Vec<Id>) -> Id {
        let id = self.fresh("l");
        let principal = self.port();
        self.cells.insert(id.clone(), Cell::new(ty, principal.clone(), aux));
        principal
    }

    /// The auxiliary port standing for conclusion `c`: a free port is used
    /// directly, a principal port gets a new port wired to it.
    fn attach(&mut self, c: &Concl) -> Id {
        if self.cells.values().any(|cell| cell.principal == c.port) {
            let p = self.port();
            self.wires.push((p.clone(), c.port.clone()));
            p
        } else {
            c.port.clone()
        }
    }

    fn base(&mut self) -> Frag {
        let w = &self.cfg.weights;
        if self.rng.random_ratio(w.one, (w.one + 2).max(1)) {
            let c = self.add_cell(CellType::One, vec![]);
            Frag { concl: vec![Concl { port: c, pending: vec![] }], depth: 0 }
        } else {
            let (p, q) = (self.port(), self.port());
            self.wires.push((p.clone(), q.clone()));
            Frag { concl: vec![Concl { port: p, pending: vec![] }, Concl { port: q, pending: vec![] }], depth: 0 }
        }
    }

    fn take(&mut self, f: &mut Frag, regular_only: bool) -> Option<Concl> {
        let idx: Vec<usize> = (0..f.concl.len()).filter(|&i| !regular_only || f.concl[i].pending.is_empty()).collect();
        let &i = idx.choose(&mut self.rng)?;
        Some(f.concl.remove(i))
    }

    fn why_owner(&self, c: &Concl) -> Option<Id> {
        self.cells
            .iter()
            .find(|(_, cell)| cell.principal == c.port && cell.ty == CellType::Why)
            .map(|(id, _)| id.clone())
    }

    fn applicable(&self, f: &Frag, rule: Rule) -> bool {
        let regular = f.concl.iter().filter(|c| c.pending.is_empty()).count();
        let free = !self.cfg.connected;
        match rule {
            Rule::Tensor | Rule::Der => regular >= 1,
            Rule::Par => regular >= 2,
            Rule::Mix => free,
            Rule::Bot | Rule::Weak => free && self.cfg.allow_weakening,
            Rule::Bang => regular >= 1 && f.depth < self.cfg.max_depth,
            Rule::Contr => f.concl.iter().filter(|c| c.pending.is_empty() && self.why_owner(c).is_some()).count() >= 2,
            Rule::Close => f.concl.iter().any(|c| !c.pending.is_empty()),
        }
    }

    fn pick_rule(&mut self, f: &Frag) -> Option<Rule> {
        let w = &self.cfg.weights;
        let table = [
            (Rule::Tensor, w.tensor),
            (Rule::Par, w.par),
            (Rule::Mix, w.one),
            (Rule::Bot, w.bot),
            (Rule::Bang, w.bang),
            (Rule::Der, w.why),
            (Rule::Weak, w.why / 2),
            (Rule::Contr, w.why),
            (Rule::Close, w.why),
        ];
        let options: Vec<(Rule, u32)> = table.into_iter().filter(|&(r, wt)| wt > 0 && self.applicable(f, r)).collect();
        options.choose_weighted(&mut self.rng, |o| o.1).ok().map(|o| o.0)
    }

    fn close(&mut self, f: &mut Frag, all: bool) {
        let mut chosen = Vec::new();
        let mut rest = Vec::new();
        for c in f.concl.drain(..) {
            let keep_out = !all && c.pending.is_empty() && !self.rng.random_ratio(1, 4);
            let skip_pending = !all && !c.pending.is_empty() && !chosen.is_empty() && self.rng.random_ratio(1, 3);
            if keep_out || skip_pending {
                rest.push(c);
            } else {
                chosen.push(c);
            }
        }
        let mut aux = Vec::new();
        for c in &chosen {
            let p = self.attach(c);
            self.doors.insert(p.clone(), c.pending.len() as u32);
            for v in &c.pending {
                self.b.entry(v.clone()).or_default().insert(p.clone());
            }
            aux.push(p);
        }
        let pri = self.add_cell(CellType::Why, aux);
        rest.push(Concl { port: pri, pending: vec![] });
        f.concl = rest;
    }

    fn apply(&mut self, f: &mut Frag, rule: Rule, budget: usize) {
        match rule {
            Rule::Tensor | Rule::Mix => {
                let mut g = self.grow(budget / 2);
                if rule == Rule::Tensor {
                    let x = self.take(f, true).expect("applicable");
                    let y = self.take(&mut g, true).expect("every fragment has a regular conclusion");
                    let (a, b) = (self.attach(&x), self.attach(&y));
                    let aux = if self.rng.random_bool(0.5) { vec![a, b] } else { vec![b, a] };
                    let pri = self.add_cell(CellType::Tensor, aux);
                    f.concl.push(Concl { port: pri, pending: vec![] });
                }
                f.concl.append(&mut g.concl);
                f.depth = f.depth.max(g.depth);
            }
            Rule::Par => {
                let x = self.take(f, true).expect("applicable");
                let y = self.take(f, true).expect("applicable");
                let aux = vec![self.attach(&x), self.attach(&y)];
                let pri = self.add_cell(CellType::Par, aux);
                f.concl.push(Concl { port: pri, pending: vec![] });
            }
            Rule::Bot => {
                let pri = self.add_cell(CellType::Bot, vec![]);
                f.concl.push(Concl { port: pri, pending: vec![] });
            }
            Rule::Weak => {
                let pri = self.add_cell(CellType::Why, vec![]);
                f.concl.push(Concl { port: pri, pending: vec![] });
            }
            Rule::Der => {
                let x = self.take(f, true).expect("applicable");
                let p = self.attach(&x);
                self.doors.insert(p.clone(), 0);
                let pri = self.add_cell(CellType::Why, vec![p]);
                f.concl.push(Concl { port: pri, pending: vec![] });
            }
            Rule::Contr => {
                let idx: Vec<usize> = (0..f.concl.len())
                    .filter(|&i| f.concl[i].pending.is_empty() && self.why_owner(&f.concl[i]).is_some())
                    .collect();
                let two: Vec<usize> = idx.choose_multiple(&mut self.rng, 2).copied().collect();
                let (i, j) = (two[0].min(two[1]), two[0].max(two[1]));
                let gone = f.concl.remove(j);
                let keep = self.why_owner(&f.concl[i]).expect("why");
                let drop = self.why_owner(&gone).expect("why");
                let cell = self.cells.remove(&drop).expect("why");
                self.ports.remove(&cell.principal);
                let k = self.cells.get_mut(&keep).expect("why");
                let mut aux = std::mem::take(&mut k.aux);
                aux.extend(cell.aux);
                *k = Cell::new(CellType::Why, k.principal.clone(), aux);
            }
            Rule::Bang => {
                let x = self.take(f, true).expect("applicable");
                let p = self.attach(&x);
                let pri = self.add_cell(CellType::Bang, vec![p]);
                let v = self.cells.iter().find(|(_, c)| c.principal == pri).map(|(id, _)| id.clone()).expect("bang");
                self.b.entry(v.clone()).or_default();
                for c in &mut f.concl {
                    c.pending.push(v.clone());
                }
                f.concl.push(Concl { port: pri, pending: vec![] });
                f.depth += 1;
            }
            Rule::Close => self.close(f, false),
        }
    }

    fn grow(&mut self, budget: usize) -> Frag {
        let mut f = self.base();
        let start = self.cells.len();
        if budget == 0 {
            return f;
        }
        let steps = self.rng.random_range(0..=budget);
        for _ in 0..steps {
            if self.cells.len() - start >= budget {
                break;
            }
            let Some(rule) = self.pick_rule(&f) else { break };
            self.apply(&mut f, rule, budget.saturating_sub(self.cells.len() - start));
        }
        f
    }

    fn finish(mut self, mut f: Frag) -> Indexed<ProofStructure> {
        if f.concl.iter().any(|c| !c.pending.is_empty()) {
            let (pending, regular): (Vec<Concl>, Vec<Concl>) = f.concl.drain(..).partition(|c| !c.pending.is_empty());
            f.concl = pending;
            self.close(&mut f, true);
            f.concl.extend(regular);
        }
        let lps = Structure::new(self.cells, self.ports, self.doors, self.wires).expect("generated structure");
        let ps = ProofStructure::new(lps, self.b).expect("generated proof-structure");
        let mut order: Vec<Id> = ps.lps().conclusions().into_iter().collect();
        order.shuffle(&mut self.rng);
        let ind = order.into_iter().enumerate().map(|(i, p)| (p, i + 1)).collect();
        Indexed::new(ps, ind).expect("conclusions")
    }
}

/// A random numbered proof-structure with at most `cfg.max_cells` cells and
/// boxes nested at most `cfg.max_depth` deep. Equal configurations give equal
/// structures.
pub fn generate_ps(cfg: &GeneratorConfig) -> Indexed<ProofStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    loop {
        let mut g = Gen {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(rng.random()),
            cells: BTreeMap::new(),
            ports: BTreeSet::new(),
            doors: BTreeMap::new(),
            wires: Vec::new(),
            b: BoxMap::new(),
            next: 0,
        };
        let budget = cfg.max_cells.saturating_sub(1);
        let f = g.grow(budget);
        let r = g.finish(f);
        if r.structure().cells().len() <= cfg.max_cells.max(1) {
            return r;
        }
    }
}

/// The same proof-structure with cells and ports renamed by a random
/// bijection and the conclusions kept at their indices.
pub fn rename(r: &Indexed<ProofStructure>, seed: u64) -> Indexed<ProofStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = r.structure();
    let mut port_names: Vec<usize> = (0..s.ports().len()).collect();
    let mut cell_names: Vec<usize> = (0..s.cells().len()).collect();
    port_names.shuffle(&mut rng);
    cell_names.shuffle(&mut rng);
    let pm: BTreeMap<&Id, Id> = s.ports().iter().zip(port_names).map(|(p, i)| (p, format!("q{i}"))).collect();
    let cm: BTreeMap<&Id, Id> = s.cells().keys().zip(cell_names).map(|(c, i)| (c, format!("m{i}"))).collect();
    let cells = s
        .cells()
        .iter()
        .map(|(id, c)| {
            (cm[id].clone(), Cell::new(c.ty, pm[&c.principal].clone(), c.aux.iter().map(|p| pm[p].clone()).collect()))
        })
        .collect();
    let ports = pm.values().cloned().collect();
    let doors = s.doors().iter().map(|(p, &n)| (pm[p].clone(), n)).collect();
    let wires: Vec<(Id, Id)> = s.wires().iter().map(|(p, q)| (pm[p].clone(), pm[q].clone())).collect();
    let b = r.base().b().iter().map(|(v, ps)| (cm[v].clone(), ps.iter().map(|p| pm[p].clone()).collect())).collect();
    let lps = Structure::new(cells, ports, doors, wires).expect("renamed structure");
    let ps = ProofStructure::new(lps, b).expect("renamed proof-structure");
    let ind = r.ind().iter().map(|(p, &i)| (pm[p].clone(), i)).collect();
    Indexed::new(ps, ind).expect("conclusions")
}

/// A small change that keeps a valid proof-structure: exchanging the
/// premises of a tensor or par cell, switching tensor and par, or switching
/// one and bot. `None` when the structure has no such cell.
pub fn mutate(r: &Indexed<ProofStructure>, seed: u64) -> Option<Indexed<ProofStructure>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = r.structure();
    let targets: Vec<&Id> = s
        .cells()
        .iter()
        .filter(|(_, c)| c.ty.is_mult() || c.arity() == 0 && c.ty != CellType::Why)
        .map(|(id, _)| id)
        .collect();
    let &l = targets.choose(&mut rng)?;
    let mut cells = s.cells().clone();
    let c = cells.get_mut(l).expect("cell");
    match c.ty {
        CellType::One => c.ty = CellType::Bot,
        CellType::Bot => c.ty = CellType::One,
        _ if rng.random_bool(0.5) => c.aux.swap(0, 1),
        CellType::Tensor => c.ty = CellType::Par,
        _ => c.ty = CellType::Tensor,
    }
    let lps = Structure::new(cells, s.ports().clone(), s.doors().clone(), s.wires().iter().cloned()).ok()?;
    let ps = ProofStructure::new(lps, r.base().b().clone()).ok()?;
    Indexed::new(ps, r.ind().clone()).ok()
}
