//! Grounding universes, rule instances and the propositional translation τ.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::syntax::{
    ApplyValuation, AtomSet, BinOp, BodyElement, GroundAtom, Head, Input, IoProgram,
    PrecomputedTerm, Program, Rule, Sign, Term,
};
use crate::values::{eval_term, eval_tuple, holds_for_some};

/// The finite set of precomputed terms that variables range over.
///
/// General variables range over the integers `lo..=hi` together with the
/// symbolic part; integer variables range over `lo..=hi` only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    symbols: BTreeSet<PrecomputedTerm>,
    lo: BigInt,
    hi: BigInt,
    placeholders: BTreeSet<String>,
}

impl Universe {
    /// Panics if `lo > hi`.
    pub fn new<'a>(symbols: impl IntoIterator<Item = &'a str>, lo: i64, hi: i64) -> Self {
        Self::from_parts(
            symbols.into_iter().map(PrecomputedTerm::sym).collect(),
            BigInt::from(lo),
            BigInt::from(hi),
        )
    }

    pub fn from_parts(symbols: BTreeSet<PrecomputedTerm>, lo: BigInt, hi: BigInt) -> Self {
        assert!(lo <= hi, "empty integer range {lo}..{hi}");
        assert!(symbols.iter().all(|s| !s.is_numeral()));
        Universe {
            symbols,
            lo,
            hi,
            placeholders: BTreeSet::new(),
        }
    }

    /// Declares placeholder names; they are removed from the symbolic part.
    pub fn with_placeholders(mut self, placeholders: &BTreeSet<String>) -> Self {
        self.symbols
            .retain(|s| !placeholders.contains(s.as_symbol().unwrap_or_default()));
        self.placeholders = placeholders.clone();
        self
    }

    /// The same universe with placeholders counted as ordinary symbols.
    pub fn with_placeholder_elements(&self) -> Self {
        let mut u = self.clone();
        u.symbols.extend(u.placeholders.iter().map(|p| PrecomputedTerm::sym(p)));
        u.placeholders.clear();
        u
    }

    /// The smallest universe containing both.
    pub fn union(&self, other: &Universe) -> Self {
        let placeholders: BTreeSet<String> = self.placeholders.union(&other.placeholders).cloned().collect();
        Universe::from_parts(
            self.symbols.union(&other.symbols).cloned().collect(),
            self.lo.clone().min(other.lo.clone()),
            self.hi.clone().max(other.hi.clone()),
        )
        .with_placeholders(&placeholders)
    }

    pub fn symbols(&self) -> &BTreeSet<PrecomputedTerm> {
        &self.symbols
    }

    pub fn int_min(&self) -> &BigInt {
        &self.lo
    }

    pub fn int_max(&self) -> &BigInt {
        &self.hi
    }

    pub fn placeholders(&self) -> &BTreeSet<String> {
        &self.placeholders
    }

    pub fn is_placeholder(&self, t: &PrecomputedTerm) -> bool {
        t.as_symbol().is_some_and(|s| self.placeholders.contains(s))
    }

    pub fn integers(&self) -> Vec<PrecomputedTerm> {
        let mut out = Vec::new();
        let mut k = self.lo.clone();
        while k <= self.hi {
            out.push(PrecomputedTerm::Numeral(k.clone()));
            k += 1u32;
        }
        out
    }

    /// All elements in the global order: integers first, then symbols.
    pub fn elements(&self) -> Vec<PrecomputedTerm> {
        let mut out = self.integers();
        out.extend(self.symbols.iter().cloned());
        out
    }

    pub fn len(&self) -> usize {
        self.symbols.len() + self.integers().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: &PrecomputedTerm) -> bool {
        match t {
            PrecomputedTerm::Numeral(n) => &self.lo <= n && n <= &self.hi,
            PrecomputedTerm::Symbolic(_) => self.symbols.contains(t),
        }
    }

    /// All tuples of elements of the given length, in lexicographic order.
    pub fn tuples(&self, arity: usize) -> Vec<Vec<PrecomputedTerm>> {
        let elements = self.elements();
        let mut out = vec![Vec::new()];
        for _ in 0..arity {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    elements.iter().map(move |e| {
                        let mut t = prefix.clone();
                        t.push(e.clone());
                        t
                    })
                })
                .collect();
        }
        out
    }

    /// Descriptions of ground interval bounds in `prog` that lie outside the
    /// integer range. Such programs may have instances the universe misses.
    pub fn interval_warnings(&self, prog: &Program) -> Vec<String> {
        fn visit(t: &Term, u: &Universe, out: &mut BTreeSet<String>) {
            match t {
                Term::BinOp(op, l, r) => {
                    if *op == BinOp::Interval {
                        for side in [l, r] {
                            if side.is_ground() {
                                for v in eval_term(side) {
                                    if v.is_numeral() && !u.contains(&v) {
                                        out.insert(format!(
                                            "interval bound {v} of `{t}` lies outside the integer range {}..{}",
                                            u.lo, u.hi
                                        ));
                                    }
                                }
                            }
                        }
                    }
                    visit(l, u, out);
                    visit(r, u, out);
                }
                Term::Abs(inner) => visit(inner, u, out),
                _ => {}
            }
        }
        let mut out = BTreeSet::new();
        for r in prog.rules() {
            for t in r.terms() {
                visit(t, self, &mut out);
            }
        }
        out.into_iter().collect()
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for s in &self.symbols {
            write!(f, "{s}, ")?;
        }
        write!(f, "{}..{}}}", self.lo, self.hi)
    }
}

impl Serialize for Universe {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Universe", 3)?;
        let symbols: Vec<&str> = self.symbols.iter().filter_map(|t| t.as_symbol()).collect();
        s.serialize_field("symbols", &symbols)?;
        s.serialize_field("int_min", &self.lo.to_string())?;
        s.serialize_field("int_max", &self.hi.to_string())?;
        s.end()
    }
}

/// The universe built from the constants of an io-program and an input.
///
/// Symbols are all symbolic constants of the program, the input atoms and
/// the range of the valuation, without placeholders. The integer range
/// spans the occurring integers widened by `margin`, or is `0..1` when no
/// integer occurs.
pub fn default_universe(io: &IoProgram, input: &Input, margin: u32) -> Universe {
    let program = io.program().apply_valuation(&input.valuation);
    let mut constants = program.constants();
    for a in &input.atoms {
        constants.extend(a.args.iter().cloned());
    }
    constants.extend(input.valuation.values().cloned());
    let ints: Vec<&BigInt> = constants.iter().filter_map(PrecomputedTerm::as_numeral).collect();
    let (lo, hi) = match (ints.iter().min(), ints.iter().max()) {
        (Some(lo), Some(hi)) => (*lo - margin, *hi + margin),
        _ => (BigInt::from(0), BigInt::from(1)),
    };
    let symbols = constants.into_iter().filter(|c| !c.is_numeral()).collect();
    Universe::from_parts(symbols, lo, hi).with_placeholders(io.placeholders())
}

/// All instances of `rule` over `u`, in canonical order. A ground rule is its only instance.
pub fn instances(rule: &Rule, u: &Universe) -> Vec<Rule> {
    let vars = rule.variables();
    if vars.is_empty() {
        return vec![rule.clone()];
    }
    let out: BTreeSet<Rule> = u
        .tuples(vars.len())
        .into_iter()
        .map(|tuple| rule.substitute(&vars.iter().cloned().zip(tuple).collect()))
        .collect();
    out.into_iter().collect()
}

/// A propositional combination of precomputed atoms. `¬F` is `F → ⊥`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropFormula {
    Atom(GroundAtom),
    Top,
    Bottom,
    And(Vec<PropFormula>),
    Or(Vec<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
}

impl PropFormula {
    pub fn atom(a: GroundAtom) -> Self {
        PropFormula::Atom(a)
    }

    pub fn not(f: PropFormula) -> Self {
        PropFormula::Implies(Box::new(f), Box::new(PropFormula::Bottom))
    }

    pub fn implies(f: PropFormula, g: PropFormula) -> Self {
        PropFormula::Implies(Box::new(f), Box::new(g))
    }

    /// Conjunction; empty is ⊤ and a single conjunct stands alone.
    pub fn conjoin(mut fs: Vec<PropFormula>) -> Self {
        match fs.len() {
            0 => PropFormula::Top,
            1 => fs.pop().unwrap(),
            _ => PropFormula::And(fs),
        }
    }

    /// Disjunction; empty is ⊥ and a single disjunct stands alone.
    pub fn disjoin(mut fs: Vec<PropFormula>) -> Self {
        match fs.len() {
            0 => PropFormula::Bottom,
            1 => fs.pop().unwrap(),
            _ => PropFormula::Or(fs),
        }
    }

    pub fn as_negation(&self) -> Option<&PropFormula> {
        match self {
            PropFormula::Implies(f, g) if **g == PropFormula::Bottom => Some(f),
            _ => None,
        }
    }

    pub fn atoms(&self) -> AtomSet {
        let mut out = AtomSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub fn collect_atoms(&self, out: &mut AtomSet) {
        match self {
            PropFormula::Atom(a) => {
                out.insert(a.clone());
            }
            PropFormula::Top | PropFormula::Bottom => {}
            PropFormula::And(fs) | PropFormula::Or(fs) => {
                for f in fs {
                    f.collect_atoms(out);
                }
            }
            PropFormula::Implies(f, g) => {
                f.collect_atoms(out);
                g.collect_atoms(out);
            }
        }
    }

    /// Replaces atoms for which `value` answers with ⊤ or ⊥ and folds constants.
    pub fn assign(&self, value: &impl Fn(&GroundAtom) -> Option<bool>) -> PropFormula {
        match self {
            PropFormula::Atom(a) => match value(a) {
                Some(true) => PropFormula::Top,
                Some(false) => PropFormula::Bottom,
                None => self.clone(),
            },
            PropFormula::Top | PropFormula::Bottom => self.clone(),
            PropFormula::And(fs) => fold_and(fs.iter().map(|f| f.assign(value))),
            PropFormula::Or(fs) => fold_or(fs.iter().map(|f| f.assign(value))),
            PropFormula::Implies(f, g) => fold_implies(f.assign(value), g.assign(value)),
        }
    }

    /// Removes ⊤ and ⊥ by absorption.
    pub fn fold(&self) -> PropFormula {
        self.assign(&|_| None)
    }

    fn is_binary(&self) -> bool {
        match self {
            PropFormula::And(fs) | PropFormula::Or(fs) => fs.len() > 1,
            PropFormula::Implies(..) => self.as_negation().is_none(),
            _ => false,
        }
    }
}

pub(crate) fn fold_and(fs: impl Iterator<Item = PropFormula>) -> PropFormula {
    let mut out = Vec::new();
    for f in fs {
        match f {
            PropFormula::Bottom => return PropFormula::Bottom,
            PropFormula::Top => {}
            f => out.push(f),
        }
    }
    PropFormula::conjoin(out)
}

pub(crate) fn fold_or(fs: impl Iterator<Item = PropFormula>) -> PropFormula {
    let mut out = Vec::new();
    for f in fs {
        match f {
            PropFormula::Top => return PropFormula::Top,
            PropFormula::Bottom => {}
            f => out.push(f),
        }
    }
    PropFormula::disjoin(out)
}

pub(crate) fn fold_implies(f: PropFormula, g: PropFormula) -> PropFormula {
    match (f, g) {
        (PropFormula::Bottom, _) | (_, PropFormula::Top) => PropFormula::Top,
        (PropFormula::Top, g) => g,
        (f, g) => PropFormula::implies(f, g),
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(f: &mut fmt::Formatter<'_>, g: &PropFormula) -> fmt::Result {
            if g.is_binary() {
                write!(f, "({g})")
            } else {
                write!(f, "{g}")
            }
        }
        fn list(f: &mut fmt::Formatter<'_>, fs: &[PropFormula], sep: &str) -> fmt::Result {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {sep} ")?;
                }
                operand(f, g)?;
            }
            Ok(())
        }
        match self {
            PropFormula::Atom(a) => write!(f, "{a}"),
            PropFormula::Top => write!(f, "⊤"),
            PropFormula::Bottom => write!(f, "⊥"),
            PropFormula::And(fs) if fs.is_empty() => write!(f, "⊤"),
            PropFormula::Or(fs) if fs.is_empty() => write!(f, "⊥"),
            PropFormula::And(fs) => list(f, fs, "∧"),
            PropFormula::Or(fs) => list(f, fs, "∨"),
            PropFormula::Implies(g, h) => {
                if let Some(g) = self.as_negation() {
                    write!(f, "¬")?;
                    operand(f, g)
                } else {
                    operand(f, g)?;
                    write!(f, " → ")?;
                    operand(f, h)
                }
            }
        }
    }
}

impl Serialize for PropFormula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn tau_literal(sign: Sign, predicate: &str, args: &[Term]) -> PropFormula {
    PropFormula::disjoin(
        eval_tuple(args)
            .into_iter()
            .map(|tuple| {
                let atom = PropFormula::Atom(GroundAtom::new(predicate, tuple));
                match sign {
                    Sign::Positive => atom,
                    Sign::Negative => PropFormula::not(atom),
                    Sign::DoubleNegative => PropFormula::not(PropFormula::not(atom)),
                }
            })
            .collect(),
    )
}

/// The translation τ of a ground body element.
pub fn tau_body_element(b: &BodyElement) -> PropFormula {
    match b {
        BodyElement::Literal(l) => tau_literal(l.sign, &l.atom.predicate, &l.atom.args),
        BodyElement::Comparison(c) => {
            if holds_for_some(c.relation, &c.left, &c.right) {
                PropFormula::Top
            } else {
                PropFormula::Bottom
            }
        }
    }
}

/// The translation τ of a ground rule. A basic rule with empty body
/// translates to its head conjunction alone.
pub fn tau_rule(r: &Rule) -> PropFormula {
    let body = PropFormula::conjoin(r.body.iter().map(tau_body_element).collect());
    match &r.head {
        Head::Constraint => PropFormula::not(body),
        Head::Basic(a) => {
            let head = PropFormula::conjoin(
                eval_tuple(&a.args)
                    .into_iter()
                    .map(|tuple| PropFormula::Atom(GroundAtom::new(&a.predicate, tuple)))
                    .collect(),
            );
            if r.body.is_empty() {
                head
            } else {
                PropFormula::implies(body, head)
            }
        }
        Head::Choice(a) => {
            let head = PropFormula::conjoin(
                eval_tuple(&a.args)
                    .into_iter()
                    .map(|tuple| {
                        let atom = PropFormula::Atom(GroundAtom::new(&a.predicate, tuple));
                        PropFormula::Or(vec![atom.clone(), PropFormula::not(atom)])
                    })
                    .collect(),
            );
            PropFormula::implies(body, head)
        }
    }
}

/// τΠ: the formulas τR for all instances R of rules of `prog` over `u`,
/// sorted and without duplicates.
pub fn tau_program(prog: &Program, u: &Universe) -> Vec<PropFormula> {
    let mut out = BTreeSet::new();
    for rule in prog.rules() {
        for inst in instances(rule, u) {
            out.insert(tau_rule(&inst));
        }
    }
    out.into_iter().collect()
}

/// Atoms occurring in a set of formulas.
pub fn atom_base(fs: &[PropFormula]) -> AtomSet {
    let mut out = AtomSet::new();
    for f in fs {
        f.collect_atoms(&mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Atom, Comparison, Literal, Relation};

    fn fact(p: &str, args: Vec<Term>) -> Rule {
        Rule {
            head: Head::Basic(Atom::new(p, args)),
            body: vec![],
        }
    }

    #[test]
    fn instances_cover_all_assignments() {
        let u = Universe::new(["a"], 1, 1);
        let r = Rule {
            head: Head::Basic(Atom::new("q", vec![Term::var("X")])),
            body: vec![BodyElement::Literal(Literal::positive(Atom::new("p", vec![Term::var("X")])))],
        };
        let inst = instances(&r, &u);
        assert_eq!(inst.len(), 2);
        assert_eq!(inst[0].to_string(), "q(1) :- p(1).");
        assert_eq!(inst[1].to_string(), "q(a) :- p(a).");
        let f = fact("p", vec![Term::sym("a")]);
        assert_eq!(instances(&f, &u), vec![f.clone()]);
        let u3 = Universe::new(["a", "b"], 0, 0);
        let r2 = Rule {
            head: Head::Basic(Atom::new("q", vec![Term::var("X"), Term::var("Y")])),
            body: vec![],
        };
        assert_eq!(instances(&r2, &u3).len(), 9);
    }

    #[test]
    fn tau_of_displayed_rules() {
        let choice = Rule {
            head: Head::Choice(Atom::new("q", vec![Term::sym("t")])),
            body: vec![BodyElement::Literal(Literal::positive(Atom::new("p", vec![Term::sym("t")])))],
        };
        assert_eq!(tau_rule(&choice).to_string(), "p(t) → (q(t) ∨ ¬q(t))");
        let interval = Rule {
            head: Head::Basic(Atom::new(
                "q",
                vec![Term::binop(BinOp::Interval, Term::int(0), Term::int(2))],
            )),
            body: vec![BodyElement::Literal(Literal::negative(Atom::new("p", vec![])))],
        };
        assert_eq!(tau_rule(&interval).to_string(), "¬p → (q(0) ∧ q(1) ∧ q(2))");
        let constraint = Rule {
            head: Head::Constraint,
            body: vec![BodyElement::Comparison(Comparison {
                left: Term::int(1),
                relation: Relation::Lt,
                right: Term::int(0),
            })],
        };
        assert_eq!(tau_rule(&constraint).to_string(), "¬⊥");
    }

    #[test]
    fn fact_translates_to_atom() {
        let u = Universe::new([], 0, 1);
        let prog = Program::new(vec![fact("p", vec![])]);
        assert_eq!(tau_program(&prog, &u), vec![PropFormula::Atom(GroundAtom::new("p", vec![]))]);
        assert!(tau_program(&Program::default(), &u).is_empty());
    }

    #[test]
    fn default_universe_of_empty_program() {
        let io = IoProgram::plain(Program::default());
        let u = default_universe(&io, &Input::default(), 1);
        assert!(u.symbols().is_empty());
        assert_eq!(u.integers(), vec![PrecomputedTerm::int(0), PrecomputedTerm::int(1)]);
        let io = IoProgram::plain(Program::new(vec![fact("p", vec![Term::int(5)])]));
        let u = default_universe(&io, &Input::default(), 0);
        assert_eq!(u.integers(), vec![PrecomputedTerm::int(5)]);
    }

    #[test]
    fn larger_universe_keeps_instances() {
        let r = Rule {
            head: Head::Basic(Atom::new("q", vec![Term::var("X")])),
            body: vec![BodyElement::Literal(Literal::positive(Atom::new("p", vec![Term::var("X")])))],
        };
        let small: BTreeSet<Rule> = instances(&r, &Universe::new(["a"], 0, 1)).into_iter().collect();
        let large: BTreeSet<Rule> = instances(&r, &Universe::new(["a", "b"], -1, 2)).into_iter().collect();
        assert!(small.is_subset(&large));
    }
}
