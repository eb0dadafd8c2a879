//! Classical and here-and-there satisfaction over finite atom bases, and
//! stable models of finite propositional theories.
//!
//! [`stable_models`] is the production search. [`stable_models_brute`] and
//! [`stable_models_reduct`] are exhaustive oracles used to cross-check it.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::ground::PropFormula;
use crate::syntax::GroundAtom;

pub use crate::syntax::AtomSet;

/// Default cap on the number of atoms an enumeration may branch on.
pub const DEFAULT_LIMIT: usize = 22;

/// An HT-interpretation: the "here" world is a subset of the "there" world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HtPair {
    here: AtomSet,
    there: AtomSet,
}

impl HtPair {
    /// Returns `None` unless `here ⊆ there`.
    pub fn new(here: AtomSet, there: AtomSet) -> Option<Self> {
        here.is_subset(&there).then_some(HtPair { here, there })
    }

    pub fn here(&self) -> &AtomSet {
        &self.here
    }

    pub fn there(&self) -> &AtomSet {
        &self.there
    }
}

/// Classical truth of `f` in the interpretation whose true atoms are `m`.
pub fn sat(m: &AtomSet, f: &PropFormula) -> bool {
    match f {
        PropFormula::Atom(a) => m.contains(a),
        PropFormula::Top => true,
        PropFormula::Bottom => false,
        PropFormula::And(fs) => fs.iter().all(|g| sat(m, g)),
        PropFormula::Or(fs) => fs.iter().any(|g| sat(m, g)),
        PropFormula::Implies(g, h) => !sat(m, g) || sat(m, h),
    }
}

pub fn sat_all(m: &AtomSet, fs: &[PropFormula]) -> bool {
    fs.iter().all(|f| sat(m, f))
}

fn ht_sat_sets(here: &AtomSet, there: &AtomSet, f: &PropFormula) -> bool {
    match f {
        PropFormula::Atom(a) => here.contains(a),
        PropFormula::Top => true,
        PropFormula::Bottom => false,
        PropFormula::And(fs) => fs.iter().all(|g| ht_sat_sets(here, there, g)),
        PropFormula::Or(fs) => fs.iter().any(|g| ht_sat_sets(here, there, g)),
        PropFormula::Implies(g, h) => {
            sat(there, f) && (!ht_sat_sets(here, there, g) || ht_sat_sets(here, there, h))
        }
    }
}

/// Truth of `f` in the HT-interpretation `pair`, evaluated at the "here" world.
pub fn ht_sat(pair: &HtPair, f: &PropFormula) -> bool {
    ht_sat_sets(&pair.here, &pair.there, f)
}

fn check_limit(what: &str, size: usize, limit: usize) -> Result<(), Error> {
    if size > limit {
        Err(Error::limit(what, size, limit))
    } else {
        Ok(())
    }
}

fn subsets(base: &[GroundAtom]) -> impl Iterator<Item = AtomSet> + '_ {
    (0u64..(1u64 << base.len())).map(move |mask| {
        base.iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a.clone())
            .collect()
    })
}

/// Stable models by the HT definition, checking every subset of `base`.
pub fn stable_models_brute(
    fs: &[PropFormula],
    base: &AtomSet,
    limit: usize,
) -> Result<Vec<AtomSet>, Error> {
    check_limit("atom base", base.len(), limit)?;
    let atoms: Vec<GroundAtom> = base.iter().cloned().collect();
    let mut out = Vec::new();
    for m in subsets(&atoms) {
        if !sat_all(&m, fs) {
            continue;
        }
        let inside: Vec<GroundAtom> = m.iter().cloned().collect();
        let stable = subsets(&inside)
            .filter(|h| h.len() < m.len())
            .all(|h| !fs.iter().all(|f| ht_sat_sets(&h, &m, f)));
        if stable {
            out.push(m);
        }
    }
    out.sort();
    Ok(out)
}

/// The reduct of `f` relative to `m`: every maximal subformula that `m`
/// does not satisfy is replaced by ⊥.
pub fn reduct(f: &PropFormula, m: &AtomSet) -> PropFormula {
    if !sat(m, f) {
        return PropFormula::Bottom;
    }
    match f {
        PropFormula::Atom(_) | PropFormula::Top | PropFormula::Bottom => f.clone(),
        PropFormula::And(fs) => PropFormula::And(fs.iter().map(|g| reduct(g, m)).collect()),
        PropFormula::Or(fs) => PropFormula::Or(fs.iter().map(|g| reduct(g, m)).collect()),
        PropFormula::Implies(g, h) => PropFormula::implies(reduct(g, m), reduct(h, m)),
    }
}

/// Stable models as the sets that are minimal models of their own reduct.
pub fn stable_models_reduct(
    fs: &[PropFormula],
    base: &AtomSet,
    limit: usize,
) -> Result<Vec<AtomSet>, Error> {
    check_limit("atom base", base.len(), limit)?;
    let atoms: Vec<GroundAtom> = base.iter().cloned().collect();
    let mut out = Vec::new();
    for m in subsets(&atoms) {
        if !sat_all(&m, fs) {
            continue;
        }
        let reduced: Vec<PropFormula> = fs.iter().map(|f| reduct(f, &m)).collect();
        let inside: Vec<GroundAtom> = m.iter().cloned().collect();
        let minimal = subsets(&inside)
            .filter(|h| h.len() < m.len())
            .all(|h| !sat_all(&h, &reduced));
        if minimal {
            out.push(m);
        }
    }
    out.sort();
    Ok(out)
}

/// Whether `m` is a model of `fs` from which no single atom can be removed
/// while keeping an HT-model.
pub fn is_pointwise_stable(m: &AtomSet, fs: &[PropFormula]) -> bool {
    sat_all(m, fs)
        && m.iter().all(|a| {
            let mut h = m.clone();
            h.remove(a);
            !fs.iter().all(|f| ht_sat_sets(&h, m, f))
        })
}

/// Splits `fs` into ground implications `F → G` after flattening top-level
/// conjunctions. An atom stands for `⊤ → atom`.
pub fn implications(fs: &[PropFormula]) -> Result<Vec<(PropFormula, PropFormula)>, Error> {
    fn walk(f: &PropFormula, out: &mut Vec<(PropFormula, PropFormula)>) -> Result<(), Error> {
        match f {
            PropFormula::And(gs) => gs.iter().try_for_each(|g| walk(g, out)),
            PropFormula::Top => Ok(()),
            PropFormula::Atom(_) => {
                out.push((PropFormula::Top, f.clone()));
                Ok(())
            }
            PropFormula::Implies(g, h) => {
                out.push(((**g).clone(), (**h).clone()));
                Ok(())
            }
            _ => Err(Error::NotCompletable(format!("`{f}` is not an implication"))),
        }
    }
    let mut out = Vec::new();
    for f in fs {
        walk(f, &mut out)?;
    }
    Ok(out)
}

/// Whether every atom of `m` in `intensional` is the consequent of an
/// implication whose antecedent `m` satisfies.
///
/// Every implication must have an atom or an atom-free formula over
/// `intensional` as its consequent.
pub fn is_supported(
    m: &AtomSet,
    fs: &[PropFormula],
    intensional: &AtomSet,
) -> Result<bool, Error> {
    let imps = implications(fs)?;
    let mut supported = AtomSet::new();
    for (body, head) in &imps {
        match head {
            PropFormula::Atom(a) => {
                if sat(m, body) {
                    supported.insert(a.clone());
                }
            }
            other => {
                if other.atoms().iter().any(|a| intensional.contains(a)) {
                    return Err(Error::NotCompletable(format!(
                        "consequent `{other}` is neither an atom nor free of intensional atoms"
                    )));
                }
            }
        }
    }
    Ok(m.iter()
        .filter(|a| intensional.contains(a))
        .all(|a| supported.contains(a)))
}

// ---------------------------------------------------------------------------
// Search engine

type NodeId = usize;

#[derive(Clone, Debug)]
enum Node {
    Const(bool),
    Var(usize),
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
    Implies(NodeId, NodeId),
}

/// Formulas over numbered variables, each root required to be true.
#[derive(Default)]
struct Circuit {
    nodes: Vec<Node>,
    roots: Vec<NodeId>,
    vars: usize,
}

impl Circuit {
    fn add(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn constant(&mut self, b: bool) -> NodeId {
        self.add(Node::Const(b))
    }

    fn not(&mut self, n: NodeId) -> NodeId {
        let bottom = self.constant(false);
        self.add(Node::Implies(n, bottom))
    }

    fn vars_of(&self, root: NodeId, out: &mut Vec<usize>) {
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            match &self.nodes[n] {
                Node::Const(_) => {}
                Node::Var(v) => out.push(*v),
                Node::And(cs) | Node::Or(cs) => stack.extend(cs.iter().copied()),
                Node::Implies(a, b) => {
                    stack.push(*a);
                    stack.push(*b);
                }
            }
        }
    }
}

struct Conflict;

struct Solver<'a> {
    circuit: &'a Circuit,
    value: Vec<Option<bool>>,
    trail: Vec<usize>,
    occurs: Vec<Vec<usize>>,
    queue: Vec<usize>,
    queued: Vec<bool>,
}

impl<'a> Solver<'a> {
    fn new(circuit: &'a Circuit) -> Self {
        let mut occurs = vec![Vec::new(); circuit.vars];
        for (i, &root) in circuit.roots.iter().enumerate() {
            let mut vs = Vec::new();
            circuit.vars_of(root, &mut vs);
            vs.sort_unstable();
            vs.dedup();
            for v in vs {
                occurs[v].push(i);
            }
        }
        Solver {
            circuit,
            value: vec![None; circuit.vars],
            trail: Vec::new(),
            occurs,
            queue: (0..circuit.roots.len()).collect(),
            queued: vec![true; circuit.roots.len()],
        }
    }

    fn eval(&self, n: NodeId) -> Option<bool> {
        match &self.circuit.nodes[n] {
            Node::Const(b) => Some(*b),
            Node::Var(v) => self.value[*v],
            Node::And(cs) => {
                let mut all = true;
                for &c in cs {
                    match self.eval(c) {
                        Some(false) => return Some(false),
                        None => all = false,
                        Some(true) => {}
                    }
                }
                all.then_some(true)
            }
            Node::Or(cs) => {
                let mut none = true;
                for &c in cs {
                    match self.eval(c) {
                        Some(true) => return Some(true),
                        None => none = false,
                        Some(false) => {}
                    }
                }
                none.then_some(false)
            }
            Node::Implies(a, b) => match (self.eval(*a), self.eval(*b)) {
                (Some(false), _) | (_, Some(true)) => Some(true),
                (Some(true), Some(false)) => Some(false),
                _ => None,
            },
        }
    }

    fn assign(&mut self, v: usize, b: bool) -> Result<(), Conflict> {
        match self.value[v] {
            Some(x) if x == b => Ok(()),
            Some(_) => Err(Conflict),
            None => {
                self.value[v] = Some(b);
                self.trail.push(v);
                for &r in &self.occurs[v] {
                    if !self.queued[r] {
                        self.queued[r] = true;
                        self.queue.push(r);
                    }
                }
                Ok(())
            }
        }
    }

    /// Derives assignments implied by node `n` having truth value `want`.
    fn force(&mut self, n: NodeId, want: bool) -> Result<(), Conflict> {
        match self.eval(n) {
            Some(b) if b == want => return Ok(()),
            Some(_) => return Err(Conflict),
            None => {}
        }
        match &self.circuit.nodes[n] {
            Node::Const(_) => unreachable!("constants always evaluate"),
            Node::Var(v) => self.assign(*v, want),
            Node::And(cs) | Node::Or(cs) => {
                // The "all children" case: a true And or a false Or.
                let is_and = matches!(self.circuit.nodes[n], Node::And(_));
                if is_and == want {
                    for &c in cs {
                        self.force(c, want)?;
                    }
                    return Ok(());
                }
                let mut open = None;
                for &c in cs {
                    if self.eval(c) != Some(!want) {
                        if open.is_some() {
                            return Ok(());
                        }
                        open = Some(c);
                    }
                }
                match open {
                    Some(c) => self.force(c, want),
                    None => Err(Conflict),
                }
            }
            &Node::Implies(a, b) => {
                if want {
                    if self.eval(a) == Some(true) {
                        self.force(b, true)
                    } else if self.eval(b) == Some(false) {
                        self.force(a, false)
                    } else {
                        Ok(())
                    }
                } else {
                    self.force(a, true)?;
                    self.force(b, false)
                }
            }
        }
    }

    fn propagate(&mut self) -> Result<(), Conflict> {
        while let Some(r) = self.queue.pop() {
            self.queued[r] = false;
            let root = self.circuit.roots[r];
            if let Err(c) = self.force(root, true) {
                for q in self.queue.drain(..) {
                    self.queued[q] = false;
                }
                return Err(c);
            }
        }
        Ok(())
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.value[v] = None;
        }
    }

    /// Visits every total assignment satisfying all roots, trying `false`
    /// before `true`. The visitor returns `false` to stop the search.
    fn search(&mut self, visit: &mut dyn FnMut(&[Option<bool>]) -> bool) -> bool {
        if self.propagate().is_err() {
            return true;
        }
        let Some(v) = self.value.iter().position(Option::is_none) else {
            return visit(&self.value);
        };
        for b in [false, true] {
            let mark = self.trail.len();
            let ok = self.assign(v, b).is_ok();
            let go_on = !ok || self.search(visit);
            self.undo(mark);
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Compiles `f` with atoms mapped to variables, constants, or HT "here" semantics.
struct Compiler<'a> {
    circuit: Circuit,
    index: &'a BTreeMap<GroundAtom, usize>,
}

impl Compiler<'_> {
    /// Classical compilation; atoms outside the index are fixed by `fixed`.
    fn classical(&mut self, f: &PropFormula, fixed: &dyn Fn(&GroundAtom) -> bool) -> NodeId {
        match f {
            PropFormula::Atom(a) => match self.index.get(a) {
                Some(&v) => self.circuit.add(Node::Var(v)),
                None => self.circuit.constant(fixed(a)),
            },
            PropFormula::Top => self.circuit.constant(true),
            PropFormula::Bottom => self.circuit.constant(false),
            PropFormula::And(fs) => {
                let cs = fs.iter().map(|g| self.classical(g, fixed)).collect();
                self.circuit.add(Node::And(cs))
            }
            PropFormula::Or(fs) => {
                let cs = fs.iter().map(|g| self.classical(g, fixed)).collect();
                self.circuit.add(Node::Or(cs))
            }
            PropFormula::Implies(g, h) => {
                let a = self.classical(g, fixed);
                let b = self.classical(h, fixed);
                self.circuit.add(Node::Implies(a, b))
            }
        }
    }

    /// HT truth at the "here" world with the "there" world fixed to `there`.
    fn here(&mut self, f: &PropFormula, there: &AtomSet) -> NodeId {
        match f {
            PropFormula::Atom(a) => match self.index.get(a) {
                Some(&v) if there.contains(a) => self.circuit.add(Node::Var(v)),
                _ => self.circuit.constant(false),
            },
            PropFormula::Top => self.circuit.constant(true),
            PropFormula::Bottom => self.circuit.constant(false),
            PropFormula::And(fs) => {
                let cs = fs.iter().map(|g| self.here(g, there)).collect();
                self.circuit.add(Node::And(cs))
            }
            PropFormula::Or(fs) => {
                let cs = fs.iter().map(|g| self.here(g, there)).collect();
                self.circuit.add(Node::Or(cs))
            }
            PropFormula::Implies(g, h) => {
                if !sat(there, f) {
                    return self.circuit.constant(false);
                }
                let a = self.here(g, there);
                let b = self.here(h, there);
                self.circuit.add(Node::Implies(a, b))
            }
        }
    }
}

/// Atoms that may be true in some stable model: the least set closed under
/// the heads reachable through antecedents that could hold.
fn possible_atoms(fs: &[PropFormula], base: &AtomSet) -> AtomSet {
    fn could_hold(f: &PropFormula, poss: &AtomSet) -> bool {
        match f {
            PropFormula::Atom(a) => poss.contains(a),
            PropFormula::Top => true,
            PropFormula::Bottom => false,
            PropFormula::And(fs) => fs.iter().all(|g| could_hold(g, poss)),
            PropFormula::Or(fs) => fs.iter().any(|g| could_hold(g, poss)),
            PropFormula::Implies(..) => true,
        }
    }
    fn produce(f: &PropFormula, poss: &AtomSet, base: &AtomSet, out: &mut AtomSet) {
        match f {
            PropFormula::Atom(a) => {
                if base.contains(a) {
                    out.insert(a.clone());
                }
            }
            PropFormula::Top | PropFormula::Bottom => {}
            PropFormula::And(fs) | PropFormula::Or(fs) => {
                for g in fs {
                    produce(g, poss, base, out);
                }
            }
            PropFormula::Implies(g, h) => {
                if could_hold(g, poss) {
                    produce(h, poss, base, out);
                }
            }
        }
    }
    let mut poss = AtomSet::new();
    loop {
        let mut next = poss.clone();
        for f in fs {
            produce(f, &poss, base, &mut next);
        }
        if next == poss {
            return poss;
        }
        poss = next;
    }
}

/// Atoms true in every classical model M with M ⊆ `poss`.
fn certain_atoms(fs: &[PropFormula], poss: &AtomSet) -> AtomSet {
    fn value(f: &PropFormula, known: &AtomSet, poss: &AtomSet) -> Option<bool> {
        match f {
            PropFormula::Atom(a) => {
                if known.contains(a) {
                    Some(true)
                } else if !poss.contains(a) {
                    Some(false)
                } else {
                    None
                }
            }
            PropFormula::Top => Some(true),
            PropFormula::Bottom => Some(false),
            PropFormula::And(fs) => {
                let mut all = true;
                for g in fs {
                    match value(g, known, poss) {
                        Some(false) => return Some(false),
                        None => all = false,
                        _ => {}
                    }
                }
                all.then_some(true)
            }
            PropFormula::Or(fs) => {
                let mut none = true;
                for g in fs {
                    match value(g, known, poss) {
                        Some(true) => return Some(true),
                        None => none = false,
                        _ => {}
                    }
                }
                none.then_some(false)
            }
            PropFormula::Implies(g, h) => {
                match (value(g, known, poss), value(h, known, poss)) {
                    (Some(false), _) | (_, Some(true)) => Some(true),
                    (Some(true), Some(false)) => Some(false),
                    _ => None,
                }
            }
        }
    }
    fn must(f: &PropFormula, known: &AtomSet, poss: &AtomSet, out: &mut AtomSet) {
        match f {
            PropFormula::Atom(a) => {
                out.insert(a.clone());
            }
            PropFormula::And(fs) => {
                for g in fs {
                    must(g, known, poss, out);
                }
            }
            PropFormula::Implies(g, h) => {
                if value(g, known, poss) == Some(true) {
                    must(h, known, poss, out);
                }
            }
            _ => {}
        }
    }
    let mut known = AtomSet::new();
    loop {
        let mut next = known.clone();
        for f in fs {
            must(f, &known, poss, &mut next);
        }
        if next == known {
            return known;
        }
        known = next;
    }
}

/// Some classical model of `fs` inside `base`, found by propagation and
/// branching. Atoms outside `base` are false.
pub fn find_model(fs: &[PropFormula], base: &AtomSet) -> Option<AtomSet> {
    let atoms: Vec<GroundAtom> = base.iter().cloned().collect();
    let index: BTreeMap<GroundAtom, usize> =
        atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let mut compiler = Compiler {
        circuit: Circuit {
            vars: index.len(),
            ..Circuit::default()
        },
        index: &index,
    };
    for f in fs {
        let root = compiler.classical(f, &|_| false);
        compiler.circuit.roots.push(root);
    }
    let circuit = compiler.circuit;
    let mut solver = Solver::new(&circuit);
    let mut found = None;
    solver.search(&mut |values| {
        found = Some(
            atoms
                .iter()
                .zip(values)
                .filter(|(_, v)| **v == Some(true))
                .map(|(a, _)| a.clone())
                .collect(),
        );
        false
    });
    found
}

/// Whether no proper subset of `m` is the "here" world of an HT-model of `fs`.
///
/// `m` must be a classical model of `fs`.
pub fn is_stable(fs: &[PropFormula], m: &AtomSet) -> bool {
    if m.is_empty() {
        return true;
    }
    let index: BTreeMap<GroundAtom, usize> =
        m.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let mut compiler = Compiler {
        circuit: Circuit {
            vars: index.len(),
            ..Circuit::default()
        },
        index: &index,
    };
    for f in fs {
        let root = compiler.here(f, m);
        compiler.circuit.roots.push(root);
    }
    // Some atom of m is missing from the here world.
    let missing: Vec<NodeId> = (0..index.len())
        .map(|v| {
            let var = compiler.circuit.add(Node::Var(v));
            compiler.circuit.not(var)
        })
        .collect();
    let proper = compiler.circuit.add(Node::Or(missing));
    compiler.circuit.roots.push(proper);
    let circuit = compiler.circuit;
    let mut solver = Solver::new(&circuit);
    let mut found = false;
    solver.search(&mut |_| {
        found = true;
        false
    });
    !found
}

/// All stable models of `fs` contained in `base`, in canonical order.
///
/// Atoms outside `base` are false. The search first bounds the candidates
/// from above and below; `limit` caps the number of atoms left undecided by
/// those bounds.
pub fn stable_models(
    fs: &[PropFormula],
    base: &AtomSet,
    limit: usize,
) -> Result<Vec<AtomSet>, Error> {
    let poss = possible_atoms(fs, base);
    let certain = certain_atoms(fs, &poss);
    if !certain.is_subset(&poss) {
        return Ok(Vec::new());
    }
    let open: Vec<GroundAtom> = poss.iter().filter(|a| !certain.contains(a)).cloned().collect();
    check_limit("undetermined part of the atom base", open.len(), limit)?;
    let index: BTreeMap<GroundAtom, usize> =
        open.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let mut compiler = Compiler {
        circuit: Circuit {
            vars: index.len(),
            ..Circuit::default()
        },
        index: &index,
    };
    let fixed = |a: &GroundAtom| certain.contains(a);
    for f in fs {
        let reduced = f.assign(&|a: &GroundAtom| {
            if index.contains_key(a) {
                None
            } else {
                Some(fixed(a))
            }
        });
        if reduced == PropFormula::Top {
            continue;
        }
        let root = compiler.classical(&reduced, &fixed);
        compiler.circuit.roots.push(root);
    }
    let circuit = compiler.circuit;
    let mut solver = Solver::new(&circuit);
    let mut out = Vec::new();
    solver.search(&mut |values| {
        let mut m = certain.clone();
        for (a, v) in open.iter().zip(values) {
            if *v == Some(true) {
                m.insert(a.clone());
            }
        }
        if is_stable(fs, &m) {
            out.push(m);
        }
        true
    });
    out.sort();
    Ok(out)
}

/// Whether `f` and `g` have the same HT-models with both worlds inside `base`.
///
/// Returns a distinguishing pair when they differ.
pub fn ht_difference(
    f: &PropFormula,
    g: &PropFormula,
    base: &AtomSet,
    limit: usize,
) -> Result<Option<HtPair>, Error> {
    check_limit("atom base", base.len(), limit)?;
    let atoms: Vec<GroundAtom> = base.iter().cloned().collect();
    let n = atoms.len();
    // Variables 0..n are the here world, n..2n the there world.
    let here_index: BTreeMap<GroundAtom, usize> =
        atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let there_index: BTreeMap<GroundAtom, usize> =
        atoms.iter().cloned().enumerate().map(|(i, a)| (a, i + n)).collect();
    let mut circuit = Circuit {
        vars: 2 * n,
        ..Circuit::default()
    };
    fn there(c: &mut Circuit, f: &PropFormula, idx: &BTreeMap<GroundAtom, usize>) -> NodeId {
        match f {
            PropFormula::Atom(a) => match idx.get(a) {
                Some(&v) => c.add(Node::Var(v)),
                None => c.constant(false),
            },
            PropFormula::Top => c.constant(true),
            PropFormula::Bottom => c.constant(false),
            PropFormula::And(fs) => {
                let cs = fs.iter().map(|g| there(c, g, idx)).collect();
                c.add(Node::And(cs))
            }
            PropFormula::Or(fs) => {
                let cs = fs.iter().map(|g| there(c, g, idx)).collect();
                c.add(Node::Or(cs))
            }
            PropFormula::Implies(g, h) => {
                let a = there(c, g, idx);
                let b = there(c, h, idx);
                c.add(Node::Implies(a, b))
            }
        }
    }
    fn here(
        c: &mut Circuit,
        f: &PropFormula,
        hidx: &BTreeMap<GroundAtom, usize>,
        tidx: &BTreeMap<GroundAtom, usize>,
    ) -> NodeId {
        match f {
            PropFormula::Atom(a) => match hidx.get(a) {
                Some(&v) => c.add(Node::Var(v)),
                None => c.constant(false),
            },
            PropFormula::Top => c.constant(true),
            PropFormula::Bottom => c.constant(false),
            PropFormula::And(fs) => {
                let cs = fs.iter().map(|g| here(c, g, hidx, tidx)).collect();
                c.add(Node::And(cs))
            }
            PropFormula::Or(fs) => {
                let cs = fs.iter().map(|g| here(c, g, hidx, tidx)).collect();
                c.add(Node::Or(cs))
            }
            PropFormula::Implies(g, h) => {
                let t = there(c, f, tidx);
                let a = here(c, g, hidx, tidx);
                let b = here(c, h, hidx, tidx);
                let i = c.add(Node::Implies(a, b));
                c.add(Node::And(vec![t, i]))
            }
        }
    }
    for i in 0..n {
        let h = circuit.add(Node::Var(i));
        let t = circuit.add(Node::Var(i + n));
        let root = circuit.add(Node::Implies(h, t));
        circuit.roots.push(root);
    }
    let hf = here(&mut circuit, f, &here_index, &there_index);
    let hg = here(&mut circuit, g, &here_index, &there_index);
    let not_g = circuit.not(hg);
    let not_f = circuit.not(hf);
    let left = circuit.add(Node::And(vec![hf, not_g]));
    let right = circuit.add(Node::And(vec![not_f, hg]));
    let differ = circuit.add(Node::Or(vec![left, right]));
    circuit.roots.push(differ);
    let mut solver = Solver::new(&circuit);
    let mut witness = None;
    solver.search(&mut |values| {
        let pick = |offset: usize| -> AtomSet {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| values[i + offset] == Some(true))
                .map(|(_, a)| a.clone())
                .collect()
        };
        witness = HtPair::new(pick(0), pick(n));
        false
    });
    Ok(witness)
}

/// Whether `f` and `g` are satisfied by the same HT-interpretations over `base`.
pub fn ht_equivalent(
    f: &PropFormula,
    g: &PropFormula,
    base: &AtomSet,
    limit: usize,
) -> Result<bool, Error> {
    Ok(ht_difference(f, g, base, limit)?.is_none())
}
