//! Positive dependency graphs: over predicate symbols, over precomputed
//! atoms for a given input, and the graph `G^sp` of a completable set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::Error;
use crate::fol::{fprop_in_env, CompletableSet, Consequent, Env, FoFormula, FpropOptions, Sort};
use crate::ground::{instances, PropFormula, Universe};
use crate::syntax::{
    ApplyValuation, AtomSet, BodyElement, GroundAtom, Input, IoProgram, Predicate, PrecomputedTerm,
    Program, Rule, Sign, Valuation,
};
use crate::values::{eval_tuple, holds_for_some};

/// A finite directed graph with deterministic iteration order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Digraph<V: Ord> {
    vertices: BTreeSet<V>,
    edges: BTreeMap<V, BTreeSet<V>>,
}

impl<V: Ord> Default for Digraph<V> {
    fn default() -> Self {
        Digraph {
            vertices: BTreeSet::new(),
            edges: BTreeMap::new(),
        }
    }
}

impl<V: Ord + Clone> Digraph<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: V) {
        self.vertices.insert(v);
    }

    pub fn add_edge(&mut self, from: V, to: V) -> bool {
        self.vertices.insert(from.clone());
        self.vertices.insert(to.clone());
        self.edges.entry(from).or_default().insert(to)
    }

    pub fn vertices(&self) -> &BTreeSet<V> {
        &self.vertices
    }

    pub fn successors(&self, v: &V) -> impl Iterator<Item = &V> {
        self.edges.get(v).into_iter().flatten()
    }

    pub fn has_edge(&self, from: &V, to: &V) -> bool {
        self.edges.get(from).is_some_and(|s| s.contains(to))
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (&V, &V)> {
        self.edges.iter().flat_map(|(a, bs)| bs.iter().map(move |b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(BTreeSet::len).sum()
    }

    /// Some cycle `v0 → v1 → … → vk → v0`, returned as `[v0, …, vk]`.
    pub fn find_cycle(&self) -> Option<Vec<V>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Fresh,
            Active,
            Done,
        }
        let order: Vec<&V> = self.vertices.iter().collect();
        let index: BTreeMap<&V, usize> = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let succ: Vec<Vec<usize>> = order
            .iter()
            .map(|v| self.successors(v).map(|w| index[w]).collect())
            .collect();
        let mut mark = vec![Mark::Fresh; order.len()];
        for root in 0..order.len() {
            if mark[root] != Mark::Fresh {
                continue;
            }
            // Stack of (vertex, next successor position).
            let mut stack = vec![(root, 0usize)];
            mark[root] = Mark::Active;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if let Some(&w) = succ[v].get(*next) {
                    *next += 1;
                    match mark[w] {
                        Mark::Fresh => {
                            mark[w] = Mark::Active;
                            stack.push((w, 0));
                        }
                        Mark::Active => {
                            let start = stack.iter().position(|&(u, _)| u == w).unwrap();
                            return Some(stack[start..].iter().map(|&(u, _)| order[u].clone()).collect());
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[v] = Mark::Done;
                    stack.pop();
                }
            }
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }
}

impl<V: Ord + Clone + fmt::Display> Digraph<V> {
    /// Graphviz source with vertices and edges in canonical order.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {name} {{\n");
        for v in &self.vertices {
            let _ = writeln!(out, "  \"{v}\";");
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  \"{a}\" -> \"{b}\";");
        }
        out.push_str("}\n");
        out
    }
}

pub type PredDepGraph = Digraph<Predicate>;

/// The positive predicate dependency graph: an edge `p → p'` for every rule
/// with `p` in its head and a positive literal over `p'` in its body.
pub fn pred_graph(prog: &Program) -> PredDepGraph {
    let mut g = Digraph::new();
    for p in prog.predicates() {
        g.add_vertex(p);
    }
    for rule in prog.rules() {
        let Some(head) = rule.head.atom() else { continue };
        for b in &rule.body {
            if let BodyElement::Literal(l) = b {
                if l.sign == Sign::Positive {
                    g.add_edge(head.symbol(), l.atom.symbol());
                }
            }
        }
    }
    g
}

pub fn is_tight(prog: &Program) -> bool {
    pred_graph(prog).is_acyclic()
}

/// The positive dependency graph of an io-program for an input, restricted
/// to atoms with arguments in the universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomDepGraph {
    pub graph: Digraph<GroundAtom>,
    /// The first rule instance, in canonical order, that produces each edge.
    pub provenance: BTreeMap<(GroundAtom, GroundAtom), Rule>,
}

fn input_condition(rule: &Rule, io: &IoProgram, input: &Input) -> bool {
    rule.body.iter().all(|b| match b {
        BodyElement::Literal(l) if io.is_input(&l.atom.symbol()) => {
            let wanted = l.sign != Sign::Negative;
            eval_tuple(&l.atom.args).into_iter().any(|args| {
                let atom = GroundAtom::new(&l.atom.predicate, args);
                input.atoms.contains(&atom) == wanted
            })
        }
        BodyElement::Literal(_) => true,
        BodyElement::Comparison(c) => holds_for_some(c.relation, &c.left, &c.right),
    })
}

/// Builds the graph from all instances over `u` of the rules of `v(Π)`.
pub fn atom_graph(io: &IoProgram, input: &Input, u: &Universe) -> AtomDepGraph {
    let program = io.program().apply_valuation(&input.valuation);
    let mut graph = Digraph::new();
    let mut provenance = BTreeMap::new();
    let is_vertex_symbol = |p: &Predicate| !io.is_input(p);
    let in_universe = |args: &[PrecomputedTerm]| args.iter().all(|t| u.contains(t) && !u.is_placeholder(t));
    let mut symbols: BTreeSet<Predicate> = program.predicates().into_iter().filter(is_vertex_symbol).collect();
    symbols.extend(io.outputs().iter().cloned());
    for p in &symbols {
        for args in u.tuples(p.arity) {
            if in_universe(&args) {
                graph.add_vertex(GroundAtom::new(&p.name, args));
            }
        }
    }
    for rule in program.rules() {
        if rule.head.atom().is_none() {
            continue;
        }
        let positive: Vec<_> = rule
            .body
            .iter()
            .filter_map(|b| match b {
                BodyElement::Literal(l) if l.sign == Sign::Positive && is_vertex_symbol(&l.atom.symbol()) => {
                    Some(&l.atom)
                }
                _ => None,
            })
            .collect();
        if positive.is_empty() {
            continue;
        }
        for instance in instances(rule, u) {
            if !input_condition(&instance, io, input) {
                continue;
            }
            let head = instance.head.atom().unwrap().clone();
            let heads: Vec<GroundAtom> = eval_tuple(&head.args)
                .into_iter()
                .filter(|args| in_universe(args))
                .map(|args| GroundAtom::new(&head.predicate, args))
                .collect();
            if heads.is_empty() {
                continue;
            }
            for b in &instance.body {
                let BodyElement::Literal(l) = b else { continue };
                if l.sign != Sign::Positive || !is_vertex_symbol(&l.atom.symbol()) {
                    continue;
                }
                let targets = eval_tuple(&l.atom.args);
                for args in targets.into_iter().filter(|a| in_universe(a)) {
                    let target = GroundAtom::new(&l.atom.predicate, args);
                    for source in &heads {
                        if graph.add_edge(source.clone(), target.clone()) {
                            provenance.insert((source.clone(), target.clone()), instance.clone());
                        }
                    }
                }
            }
        }
    }
    AtomDepGraph { graph, provenance }
}

/// The outcome of a local tightness check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TightnessVerdict {
    /// The bounded atom graph has no cycle.
    LocallyTight,
    /// A cycle `cycle[0] → cycle[1] → … → cycle[0]` with the rule instance behind each edge.
    CycleFound {
        cycle: Vec<GroundAtom>,
        instances: Vec<String>,
    },
    /// The program is tight, so it is locally tight on every input.
    TightShortcut,
}

impl TightnessVerdict {
    pub fn is_locally_tight(&self) -> bool {
        !matches!(self, TightnessVerdict::CycleFound { .. })
    }
}

impl fmt::Display for TightnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TightnessVerdict::LocallyTight => write!(f, "LOCALLY TIGHT"),
            TightnessVerdict::TightShortcut => write!(f, "LOCALLY TIGHT (program is tight)"),
            TightnessVerdict::CycleFound { cycle, .. } => {
                write!(f, "NOT LOCALLY TIGHT: cycle ")?;
                for a in cycle {
                    write!(f, "{a} -> ")?;
                }
                write!(f, "{}", cycle[0])
            }
        }
    }
}

/// Cycle check on the bounded atom graph, skipped when the program is tight.
pub fn is_locally_tight(io: &IoProgram, input: &Input, u: &Universe) -> TightnessVerdict {
    if is_tight(io.program()) {
        return TightnessVerdict::TightShortcut;
    }
    atom_graph_verdict(&atom_graph(io, input, u))
}

pub fn atom_graph_verdict(g: &AtomDepGraph) -> TightnessVerdict {
    match g.graph.find_cycle() {
        None => TightnessVerdict::LocallyTight,
        Some(cycle) => {
            let instances = (0..cycle.len())
                .map(|i| {
                    let key = (cycle[i].clone(), cycle[(i + 1) % cycle.len()].clone());
                    g.provenance[&key].to_string()
                })
                .collect();
            TightnessVerdict::CycleFound { cycle, instances }
        }
    }
}

/// Evaluation context for `Pos` and `G^sp`: the interpretation `J↑` (or
/// `J^v` with a valuation) bounded by a universe.
pub struct Structure<'a> {
    pub atoms: &'a AtomSet,
    pub universe: &'a Universe,
    pub valuation: Option<&'a Valuation>,
}

impl Structure<'_> {
    pub(crate) fn satisfies(&self, f: &FoFormula, env: &mut Env) -> Result<bool, Error> {
        let fixed = |a: &GroundAtom| Some(self.atoms.contains(a));
        let options = FpropOptions {
            fold: true,
            fixed: Some(&fixed),
            valuation: self.valuation,
        };
        Ok(fprop_in_env(f, self.universe, &options, env)?.formula == PropFormula::Top)
    }

    fn domain(&self, sort: Sort) -> Vec<PrecomputedTerm> {
        match sort {
            Sort::General => self.universe.elements(),
            Sort::Integer => self.universe.integers(),
        }
    }

    fn pos(&self, f: &FoFormula, intensional: &BTreeSet<Predicate>, env: &mut Env, out: &mut AtomSet) -> Result<(), Error> {
        if f.predicates().is_disjoint(intensional) || !self.satisfies(f, env)? {
            return Ok(());
        }
        match f {
            FoFormula::Atom(_) => {
                let fixed = |_: &GroundAtom| None;
                let options = FpropOptions {
                    fold: true,
                    fixed: Some(&fixed),
                    valuation: self.valuation,
                };
                if let PropFormula::Atom(g) = fprop_in_env(f, self.universe, &options, env)?.formula {
                    out.insert(g);
                }
            }
            FoFormula::Compare(..) | FoFormula::Falsity => {}
            FoFormula::And(fs) | FoFormula::Or(fs) => {
                for g in fs {
                    self.pos(g, intensional, env, out)?;
                }
            }
            FoFormula::Implies(_, g) => self.pos(g, intensional, env, out)?,
            FoFormula::Iff(g, h) => {
                self.pos(g, intensional, env, out)?;
                self.pos(h, intensional, env, out)?;
            }
            FoFormula::Forall(vs, body) | FoFormula::Exists(vs, body) => {
                self.pos_quantified(vs, body, intensional, env, out)?;
            }
        }
        Ok(())
    }

    fn pos_quantified(
        &self,
        vs: &[crate::fol::Variable],
        body: &FoFormula,
        intensional: &BTreeSet<Predicate>,
        env: &mut Env,
        out: &mut AtomSet,
    ) -> Result<(), Error> {
        let Some(first) = vs.first() else {
            return self.pos(body, intensional, env, out);
        };
        for d in self.domain(first.sort) {
            env.push((first.name.clone(), d));
            let r = self.pos_quantified(&vs[1..], body, intensional, env, out);
            env.pop();
            r?;
        }
        Ok(())
    }
}

/// `Pos_J(F)`: the strictly positive intensional atoms of `F` that are true in `J`.
pub fn pos_atoms(s: &Structure<'_>, f: &FoFormula, intensional: &BTreeSet<Predicate>) -> Result<AtomSet, Error> {
    let mut out = AtomSet::new();
    s.pos(f, intensional, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// The graph `G^sp_J(Γ)`: vertices are the intensional atoms of `J`, with an
/// edge `A → B` when some instance `F → G` of a member has `A ∈ Pos(G)` and
/// `B ∈ Pos(F)`.
pub fn gsp_graph(s: &Structure<'_>, gamma: &CompletableSet) -> Result<Digraph<GroundAtom>, Error> {
    let intensional = gamma.intensional();
    let mut g = Digraph::new();
    for a in s.atoms.iter() {
        if intensional.contains(&a.symbol()) {
            g.add_vertex(a.clone());
        }
    }
    for m in gamma.members() {
        // Formula consequents carry no intensional atoms, so their Pos is empty.
        let Consequent::Head { predicate, args } = &m.consequent else {
            continue;
        };
        let rest: Vec<_> = m
            .vars
            .iter()
            .filter(|v| !args.iter().any(|a| a.name == v.name))
            .cloned()
            .collect();
        for head in s.atoms.iter().filter(|a| &a.predicate == predicate && a.args.len() == args.len()) {
            if !head.args.iter().all(|t| s.universe.contains(t)) {
                continue;
            }
            let mut env: Env = args.iter().map(|v| v.name.clone()).zip(head.args.iter().cloned()).collect();
            let mut sources = Vec::new();
            for_each_assignment(s, &rest, &mut env, &mut |env| {
                let mut pos = AtomSet::new();
                s.pos(&m.antecedent, intensional, env, &mut pos)?;
                sources.extend(pos);
                Ok(())
            })?;
            for b in sources {
                g.add_edge(head.clone(), b);
            }
        }
    }
    Ok(g)
}

fn for_each_assignment(
    s: &Structure<'_>,
    vars: &[crate::fol::Variable],
    env: &mut Env,
    f: &mut dyn FnMut(&mut Env) -> Result<(), Error>,
) -> Result<(), Error> {
    let Some(first) = vars.first() else {
        return f(env);
    };
    for d in s.domain(first.sort) {
        env.push((first.name.clone(), d));
        let r = for_each_assignment(s, &vars[1..], env, f);
        env.pop();
        r?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{tau_star, tau_star_io, FoTerm, Variable};
    use crate::parser::{parse_input, parse_io_program, parse_program};
    use proptest::prelude::*;

    #[test]
    fn tpr_is_tight() {
        let g = pred_graph(&parse_program("p(a). p(b). q(X,Y) :- p(X), p(Y).").unwrap());
        let edges: Vec<String> = g.edges().map(|(a, b)| format!("{a}->{b}")).collect();
        assert_eq!(edges, vec!["q/2->p/1"]);
        assert!(g.is_acyclic());
        assert!(is_tight(&Program::default()));
    }

    #[test]
    fn self_loop_witness() {
        let io = parse_io_program("#output p/1.\np(X) :- p(X).").unwrap();
        let u = Universe::new(["a"], 0, 0);
        let g = atom_graph(&io, &Input::default(), &u);
        assert_eq!(g.graph.edge_count(), 2);
        match is_locally_tight(&io, &Input::default(), &u) {
            TightnessVerdict::CycleFound { cycle, instances } => {
                assert_eq!(cycle.len(), 1);
                assert_eq!(instances.len(), 1);
            }
            v => panic!("{v:?}"),
        }
        let c = parse_io_program("#output p/1.\n:- p(X).").unwrap();
        assert_eq!(atom_graph(&c, &Input::default(), &u).graph.edge_count(), 0);
    }

    #[test]
    fn input_conditions_block_edges() {
        let io = parse_io_program("#input q/1.\n#output p/1.\np(X) :- p(X), q(X), not r.\nr :- not q(1).").unwrap();
        let u = Universe::new(["a"], 1, 1);
        let input = parse_input("q(a).", &io).unwrap();
        let g = atom_graph(&io, &input, &u);
        let edges: Vec<String> = g.graph.edges().map(|(a, b)| format!("{a}->{b}")).collect();
        assert_eq!(edges, vec!["p(a)->p(a)"]);
    }

    #[test]
    fn cycles_are_real() {
        let mut g = Digraph::new();
        for (a, b) in [(1, 2), (2, 3), (3, 4), (4, 2), (5, 1)] {
            g.add_edge(a, b);
        }
        let c = g.find_cycle().unwrap();
        for i in 0..c.len() {
            assert!(g.has_edge(&c[i], &c[(i + 1) % c.len()]));
        }
        let mut h = Digraph::new();
        h.add_edge(1, 2);
        h.add_edge(1, 3);
        h.add_edge(2, 3);
        assert!(h.is_acyclic());
        assert!(h.to_dot("g").contains("\"1\" -> \"2\";"));
    }

    fn toy() -> (CompletableSet, Valuation) {
        let v = Variable::general("V");
        let vt = FoTerm::var(&v);
        let a = FoTerm::Const(PrecomputedTerm::sym("a"));
        let b = FoTerm::Const(PrecomputedTerm::sym("b"));
        let gamma = CompletableSet::from_sentences(
            &[
                FoFormula::forall(vec![v.clone()], FoFormula::implies(FoFormula::eq(vt.clone(), a), FoFormula::atom("p", vec![vt.clone()]))),
                FoFormula::forall(
                    vec![v.clone()],
                    FoFormula::implies(
                        FoFormula::And(vec![FoFormula::eq(vt.clone(), b), FoFormula::atom("p", vec![vt.clone()])]),
                        FoFormula::atom("p", vec![vt]),
                    ),
                ),
            ],
            [Predicate::new("p", 1)].into(),
        )
        .unwrap();
        let val = [("a".to_string(), PrecomputedTerm::int(0)), ("b".to_string(), PrecomputedTerm::int(1))].into();
        (gamma, val)
    }

    #[test]
    fn gsp_of_toy() {
        let (gamma, val) = toy();
        let u = Universe::new([], 0, 1);
        let i: AtomSet = [GroundAtom::new("p", vec![PrecomputedTerm::int(0)])].into_iter().collect();
        let s = Structure { atoms: &i, universe: &u, valuation: Some(&val) };
        let g = gsp_graph(&s, &gamma).unwrap();
        assert_eq!(g.vertices().len(), 1);
        assert_eq!(g.edge_count(), 0);
        let j: AtomSet = (0..2).map(|n| GroundAtom::new("p", vec![PrecomputedTerm::int(n)])).collect();
        let s = Structure { atoms: &j, universe: &u, valuation: Some(&val) };
        let g = gsp_graph(&s, &gamma).unwrap();
        let p1 = GroundAtom::new("p", vec![PrecomputedTerm::int(1)]);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(&p1, &p1)]);
        let empty = CompletableSet::new(vec![], BTreeSet::new()).unwrap();
        assert_eq!(gsp_graph(&s, &empty).unwrap().edge_count(), 0);
    }

    #[test]
    fn pos_examples() {
        let u = Universe::new(["a"], 0, 1);
        let p: BTreeSet<Predicate> = [Predicate::new("p", 1), Predicate::new("q", 0)].into();
        let j: AtomSet = (0..2).map(|n| GroundAtom::new("p", vec![PrecomputedTerm::int(n)])).collect();
        let val: Valuation = [("b".to_string(), PrecomputedTerm::int(1))].into();
        let s = Structure { atoms: &j, universe: &u, valuation: Some(&val) };
        let f = FoFormula::And(vec![
            FoFormula::eq(FoTerm::int(1), FoTerm::Const(PrecomputedTerm::sym("b"))),
            FoFormula::atom("p", vec![FoTerm::int(1)]),
        ]);
        let expected: AtomSet = [GroundAtom::new("p", vec![PrecomputedTerm::int(1)])].into_iter().collect();
        assert_eq!(pos_atoms(&s, &f, &p).unwrap(), expected);
        let false_f = FoFormula::atom("p", vec![FoTerm::Const(PrecomputedTerm::sym("a"))]);
        assert!(pos_atoms(&s, &false_f, &p).unwrap().is_empty());
        let mut k = j.clone();
        k.insert(GroundAtom::new("p", vec![PrecomputedTerm::sym("a")]));
        let s = Structure { atoms: &k, universe: &u, valuation: None };
        let imp = FoFormula::implies(FoFormula::atom("q", vec![]), false_f);
        let expected: AtomSet = [GroundAtom::new("p", vec![PrecomputedTerm::sym("a")])].into_iter().collect();
        assert_eq!(pos_atoms(&s, &imp, &p).unwrap(), expected);
    }

    #[test]
    fn rooms_has_self_loop() {
        let prog = parse_program(
            "in(P,R,0) :- in0(P,R).\nin(P,R,T+1) :- goto(P,R,T).\n{in(P,R,T+1)} :- in(P,R,T), T = 0..h-1.\n\
             :- in(P,R1,T), in(P,R2,T), R1 != R2.\nin_building(P,T) :- in(P,R,T).\n:- not in_building(P,T), person(P), T = 0..h.",
        )
        .unwrap();
        let g = pred_graph(&prog);
        assert!(g.has_edge(&Predicate::new("in", 3), &Predicate::new("in", 3)));
        assert!(!g.is_acyclic());
    }

    fn arb_program() -> impl Strategy<Value = String> {
        let atom = prop_oneof![Just("p(X)"), Just("q(X)"), Just("p(a)"), Just("q(1)"), Just("r")];
        let lit = (atom.clone(), 0..3usize).prop_map(|(a, s)| format!("{}{a}", ["", "not ", "not not "][s]));
        let head = prop_oneof![atom.clone().prop_map(|a| a.to_string()), atom.prop_map(|a| format!("{{{a}}}"))];
        let rule = (head, prop::collection::vec(lit, 0..3))
            .prop_map(|(h, b)| if b.is_empty() { format!("{h} :- s(X).") } else { format!("{h} :- s(X), {}.", b.join(", ")) });
        prop::collection::vec(rule, 1..4).prop_map(|rs| format!("#input s/1.\n#output p/1.\n{}", rs.join("\n")))
    }

    proptest! {
        #[test]
        fn atom_graph_contains_gsp(text in arb_program(), mask in 0u32..256) {
            let io = parse_io_program(&text).unwrap();
            let u = Universe::new(["a"], 1, 1);
            let input = parse_input("s(a). s(1).", &io).unwrap();
            let big = atom_graph(&io, &input, &u);
            let gamma = tau_star_io(&io);
            let base: Vec<GroundAtom> = big.graph.vertices().iter().cloned().collect();
            let mut j: AtomSet = base.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, a)| a.clone()).collect();
            j = j.union(&input.atoms);
            let s = Structure { atoms: &j, universe: &u, valuation: None };
            let small = gsp_graph(&s, &gamma).unwrap();
            for (a, b) in small.edges() {
                prop_assert!(big.graph.has_edge(a, b), "{a} -> {b} missing");
            }
        }

        #[test]
        fn pos_is_within_true_intensional_atoms(text in arb_program(), mask in 0u32..256) {
            let prog = parse_program(&text).unwrap();
            let gamma = tau_star(&prog);
            let u = Universe::new(["a"], 1, 1);
            let atoms: Vec<GroundAtom> = ["p", "q"].iter().flat_map(|p| u.elements().into_iter().map(move |d| GroundAtom::new(p, vec![d]))).collect();
            let j: AtomSet = atoms.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, a)| a.clone()).collect();
            let s = Structure { atoms: &j, universe: &u, valuation: None };
            for f in gamma.sentences() {
                let pos = pos_atoms(&s, &f, gamma.intensional()).unwrap();
                prop_assert!(pos.iter().all(|a| j.contains(a) && gamma.intensional().contains(&a.symbol())));
            }
        }

        #[test]
        fn tight_programs_are_locally_tight(text in arb_program()) {
            let io = parse_io_program(&text).unwrap();
            if is_tight(io.program()) {
                let u = Universe::new(["a"], 1, 1);
                let input = parse_input("s(a).", &io).unwrap();
                prop_assert!(atom_graph(&io, &input, &u).graph.is_acyclic());
            }
        }
    }
}
