//! Abstract syntax of mini-gringo programs, io-programs and their inputs.
//!
//! Everything here is an immutable value. Programs carry their rules as an
//! ordered list, but duplicate rules are removed on construction because
//! every semantic operation treats a program as a set of rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::Error;

/// A numeral or a symbolic constant.
///
/// The derived order is the global total order on precomputed terms:
/// numerals compare by value, every numeral precedes every symbolic
/// constant, and symbolic constants compare by the bytes of their names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrecomputedTerm {
    Numeral(BigInt),
    Symbolic(Arc<str>),
}

impl PrecomputedTerm {
    pub fn int(n: i64) -> Self {
        PrecomputedTerm::Numeral(BigInt::from(n))
    }

    pub fn sym(name: &str) -> Self {
        PrecomputedTerm::Symbolic(Arc::from(name))
    }

    pub fn as_numeral(&self) -> Option<&BigInt> {
        match self {
            PrecomputedTerm::Numeral(n) => Some(n),
            PrecomputedTerm::Symbolic(_) => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            PrecomputedTerm::Numeral(_) => None,
            PrecomputedTerm::Symbolic(s) => Some(s),
        }
    }

    pub fn is_numeral(&self) -> bool {
        matches!(self, PrecomputedTerm::Numeral(_))
    }
}

impl fmt::Display for PrecomputedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrecomputedTerm::Numeral(n) => write!(f, "{n}"),
            PrecomputedTerm::Symbolic(s) => write!(f, "{s}"),
        }
    }
}

impl Serialize for PrecomputedTerm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(1))?;
        match self {
            PrecomputedTerm::Numeral(n) => map.serialize_entry("numeral", &n.to_string())?,
            PrecomputedTerm::Symbolic(s) => map.serialize_entry("symbol", &**s)?,
        }
        map.end()
    }
}

/// The six binary operation names of mini-gringo.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Interval,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "\\",
            BinOp::Interval => "..",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Interval => 1,
            BinOp::Add | BinOp::Sub => 2,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Term {
    Precomputed(PrecomputedTerm),
    Variable(String),
    Abs(Box<Term>),
    BinOp(BinOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn int(n: i64) -> Self {
        Term::Precomputed(PrecomputedTerm::int(n))
    }

    pub fn sym(name: &str) -> Self {
        Term::Precomputed(PrecomputedTerm::sym(name))
    }

    pub fn var(name: &str) -> Self {
        Term::Variable(name.to_string())
    }

    pub fn binop(op: BinOp, left: Term, right: Term) -> Self {
        Term::BinOp(op, Box::new(left), Box::new(right))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Precomputed(_) => true,
            Term::Variable(_) => false,
            Term::Abs(t) => t.is_ground(),
            Term::BinOp(_, l, r) => l.is_ground() && r.is_ground(),
        }
    }

    pub fn as_precomputed(&self) -> Option<&PrecomputedTerm> {
        match self {
            Term::Precomputed(p) => Some(p),
            _ => None,
        }
    }

    /// Appends variables in order of first occurrence, skipping ones already in `out`.
    pub fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            Term::Precomputed(_) => {}
            Term::Variable(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Abs(t) => t.collect_variables(out),
            Term::BinOp(_, l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
        }
    }

    pub fn collect_constants(&self, out: &mut BTreeSet<PrecomputedTerm>) {
        match self {
            Term::Precomputed(p) => {
                out.insert(p.clone());
            }
            Term::Variable(_) => {}
            Term::Abs(t) => t.collect_constants(out),
            Term::BinOp(_, l, r) => {
                l.collect_constants(out);
                r.collect_constants(out);
            }
        }
    }

    /// Replaces variables according to `binding`; unbound variables are kept.
    pub fn substitute(&self, binding: &BTreeMap<String, PrecomputedTerm>) -> Term {
        match self {
            Term::Precomputed(_) => self.clone(),
            Term::Variable(v) => match binding.get(v) {
                Some(value) => Term::Precomputed(value.clone()),
                None => self.clone(),
            },
            Term::Abs(t) => Term::Abs(Box::new(t.substitute(binding))),
            Term::BinOp(op, l, r) => Term::binop(*op, l.substitute(binding), r.substitute(binding)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::BinOp(op, _, _) => op.precedence(),
            _ => 5,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn is_negative_numeral(t: &Term) -> bool {
    matches!(t, Term::Precomputed(PrecomputedTerm::Numeral(n)) if n.sign() == num_bigint::Sign::Minus)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Precomputed(p) => write!(f, "{p}"),
            Term::Variable(v) => write!(f, "{v}"),
            Term::Abs(t) => write!(f, "|{t}|"),
            Term::BinOp(op, l, r) => {
                let level = op.precedence();
                let left_parens = match op {
                    BinOp::Interval => l.precedence() <= level,
                    _ => l.precedence() < level,
                };
                let right_parens = r.precedence() <= level || is_negative_numeral(r);
                l.fmt_operand(f, left_parens)?;
                write!(f, "{}", op.symbol())?;
                r.fmt_operand(f, right_parens)
            }
        }
    }
}

/// A predicate symbol `p/n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: &str, arity: usize) -> Self {
        Predicate {
            name: name.to_string(),
            arity,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl Serialize for Predicate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.to_string(),
            args,
        }
    }

    pub fn symbol(&self) -> Predicate {
        Predicate::new(&self.predicate, self.args.len())
    }

    /// The precomputed atom this atom denotes, if all arguments are precomputed.
    pub fn as_ground(&self) -> Option<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|t| t.as_precomputed().cloned())
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom {
            predicate: self.predicate.clone(),
            args,
        })
    }

    fn substitute(&self, binding: &BTreeMap<String, PrecomputedTerm>) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|t| t.substitute(binding)).collect(),
        }
    }
}

fn fmt_args<T: fmt::Display>(f: &mut fmt::Formatter<'_>, name: &str, args: &[T]) -> fmt::Result {
    write!(f, "{name}")?;
    if !args.is_empty() {
        write!(f, "(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_args(f, &self.predicate, &self.args)
    }
}

/// How many occurrences of `not` precede the atom of a literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
    DoubleNegative,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Literal {
    pub sign: Sign,
    pub atom: Atom,
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Literal {
            sign: Sign::Positive,
            atom,
        }
    }

    pub fn negative(atom: Atom) -> Self {
        Literal {
            sign: Sign::Negative,
            atom,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Positive => write!(f, "{}", self.atom),
            Sign::Negative => write!(f, "not {}", self.atom),
            Sign::DoubleNegative => write!(f, "not not {}", self.atom),
        }
    }
}

/// `=` and the five comparison symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Eq,
        Relation::Ne,
        Relation::Lt,
        Relation::Gt,
        Relation::Le,
        Relation::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }

    pub fn math_symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "≠",
            Relation::Lt => "<",
            Relation::Gt => ">",
            Relation::Le => "≤",
            Relation::Ge => "≥",
        }
    }

    /// Evaluates the relation on two precomputed terms under the global order.
    pub fn holds(self, left: &PrecomputedTerm, right: &PrecomputedTerm) -> bool {
        let ord = left.cmp(right);
        match self {
            Relation::Eq => ord.is_eq(),
            Relation::Ne => ord.is_ne(),
            Relation::Lt => ord.is_lt(),
            Relation::Gt => ord.is_gt(),
            Relation::Le => ord.is_le(),
            Relation::Ge => ord.is_ge(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Comparison {
    pub left: Term,
    pub relation: Relation,
    pub right: Term,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.left, self.relation.symbol(), self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyElement {
    Literal(Literal),
    Comparison(Comparison),
}

impl fmt::Display for BodyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyElement::Literal(l) => write!(f, "{l}"),
            BodyElement::Comparison(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Head {
    Basic(Atom),
    Choice(Atom),
    Constraint,
}

impl Head {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Head::Basic(a) | Head::Choice(a) => Some(a),
            Head::Constraint => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<BodyElement>,
}

impl Rule {
    pub fn is_ground(&self) -> bool {
        self.head
            .atom()
            .is_none_or(|a| a.args.iter().all(Term::is_ground))
            && self.body.iter().all(|b| match b {
                BodyElement::Literal(l) => l.atom.args.iter().all(Term::is_ground),
                BodyElement::Comparison(c) => c.left.is_ground() && c.right.is_ground(),
            })
    }

    /// Variables of the rule in order of first occurrence, head first.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(a) = self.head.atom() {
            for t in &a.args {
                t.collect_variables(&mut out);
            }
        }
        for b in &self.body {
            match b {
                BodyElement::Literal(l) => {
                    for t in &l.atom.args {
                        t.collect_variables(&mut out);
                    }
                }
                BodyElement::Comparison(c) => {
                    c.left.collect_variables(&mut out);
                    c.right.collect_variables(&mut out);
                }
            }
        }
        out
    }

    pub fn predicates(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        if let Some(a) = self.head.atom() {
            out.insert(a.symbol());
        }
        for b in &self.body {
            if let BodyElement::Literal(l) = b {
                out.insert(l.atom.symbol());
            }
        }
        out
    }

    pub fn terms(&self) -> Vec<&Term> {
        let mut out: Vec<&Term> = Vec::new();
        if let Some(a) = self.head.atom() {
            out.extend(a.args.iter());
        }
        for b in &self.body {
            match b {
                BodyElement::Literal(l) => out.extend(l.atom.args.iter()),
                BodyElement::Comparison(c) => {
                    out.push(&c.left);
                    out.push(&c.right);
                }
            }
        }
        out
    }

    /// Substitutes precomputed terms for variables.
    pub fn substitute(&self, binding: &BTreeMap<String, PrecomputedTerm>) -> Rule {
        let head = match &self.head {
            Head::Basic(a) => Head::Basic(a.substitute(binding)),
            Head::Choice(a) => Head::Choice(a.substitute(binding)),
            Head::Constraint => Head::Constraint,
        };
        let body = self
            .body
            .iter()
            .map(|b| match b {
                BodyElement::Literal(l) => BodyElement::Literal(Literal {
                    sign: l.sign,
                    atom: l.atom.substitute(binding),
                }),
                BodyElement::Comparison(c) => BodyElement::Comparison(Comparison {
                    left: c.left.substitute(binding),
                    relation: c.relation,
                    right: c.right.substitute(binding),
                }),
            })
            .collect();
        Rule { head, body }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            Head::Basic(a) => write!(f, "{a}")?,
            Head::Choice(a) => write!(f, "{{{a}}}")?,
            Head::Constraint => {}
        }
        if !self.body.is_empty() {
            if matches!(self.head, Head::Constraint) {
                write!(f, ":- ")?;
            } else {
                write!(f, " :- ")?;
            }
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{b}")?;
            }
        } else if matches!(self.head, Head::Constraint) {
            write!(f, ":-")?;
        }
        write!(f, ".")
    }
}

/// A finite set of rules, kept in first-occurrence order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Program {
    rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        let mut seen = BTreeSet::new();
        let rules = rules.into_iter().filter(|r| seen.insert(r.clone())).collect();
        Program { rules }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn predicates(&self) -> BTreeSet<Predicate> {
        self.rules.iter().flat_map(Rule::predicates).collect()
    }

    pub fn head_predicates(&self) -> BTreeSet<Predicate> {
        self.rules
            .iter()
            .filter_map(|r| r.head.atom().map(Atom::symbol))
            .collect()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.rules.iter().flat_map(Rule::variables).collect()
    }

    pub fn constants(&self) -> BTreeSet<PrecomputedTerm> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            for t in r.terms() {
                t.collect_constants(&mut out);
            }
        }
        out
    }

    /// The same program with the rules of `other` appended.
    pub fn union(&self, other: &Program) -> Program {
        Program::new(self.rules.iter().chain(other.rules.iter()).cloned().collect())
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A precomputed atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<PrecomputedTerm>,
}

impl GroundAtom {
    pub fn new(predicate: &str, args: Vec<PrecomputedTerm>) -> Self {
        GroundAtom {
            predicate: predicate.to_string(),
            args,
        }
    }

    pub fn symbol(&self) -> Predicate {
        Predicate::new(&self.predicate, self.args.len())
    }

    pub fn to_atom(&self) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().cloned().map(Term::Precomputed).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_args(f, &self.predicate, &self.args)
    }
}

impl Serialize for GroundAtom {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A finite set of precomputed atoms with canonical iteration order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomSet(BTreeSet<GroundAtom>);

impl AtomSet {
    pub fn new() -> Self {
        AtomSet(BTreeSet::new())
    }

    pub fn insert(&mut self, atom: GroundAtom) -> bool {
        self.0.insert(atom)
    }

    pub fn remove(&mut self, atom: &GroundAtom) -> bool {
        self.0.remove(atom)
    }

    pub fn into_inner(self) -> BTreeSet<GroundAtom> {
        self.0
    }

    /// Atoms whose predicate symbol satisfies `keep`.
    pub fn filter_symbols(&self, keep: impl Fn(&Predicate) -> bool) -> AtomSet {
        AtomSet(self.0.iter().filter(|a| keep(&a.symbol())).cloned().collect())
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.union(&other.0).cloned().collect())
    }
}

impl Deref for AtomSet {
    type Target = BTreeSet<GroundAtom>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl FromIterator<GroundAtom> for AtomSet {
    fn from_iter<I: IntoIterator<Item = GroundAtom>>(iter: I) -> Self {
        AtomSet(iter.into_iter().collect())
    }
}

impl IntoIterator for AtomSet {
    type Item = GroundAtom;
    type IntoIter = std::collections::btree_set::IntoIter<GroundAtom>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a AtomSet {
    type Item = &'a GroundAtom;
    type IntoIter = std::collections::btree_set::Iter<'a, GroundAtom>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for AtomSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter())
    }
}

/// Maps placeholders to the precomputed terms they stand for.
pub type Valuation = BTreeMap<String, PrecomputedTerm>;

/// Objects in which constants from the domain of a valuation can be replaced.
pub trait ApplyValuation {
    fn apply_valuation(&self, valuation: &Valuation) -> Self;
}

impl ApplyValuation for PrecomputedTerm {
    fn apply_valuation(&self, valuation: &Valuation) -> Self {
        match self {
            PrecomputedTerm::Symbolic(s) => valuation.get(&**s).cloned().unwrap_or_else(|| self.clone()),
            PrecomputedTerm::Numeral(_) => self.clone(),
        }
    }
}

impl ApplyValuation for Term {
    fn apply_valuation(&self, valuation: &Valuation) -> Self {
        match self {
            Term::Precomputed(p) => Term::Precomputed(p.apply_valuation(valuation)),
            Term::Variable(_) => self.clone(),
            Term::Abs(t) => Term::Abs(Box::new(t.apply_valuation(valuation))),
            Term::BinOp(op, l, r) => {
                Term::binop(*op, l.apply_valuation(valuation), r.apply_valuation(valuation))
            }
        }
    }
}

impl ApplyValuation for Atom {
    fn apply_valuation(&self, valuation: &Valuation) -> Self {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|t| t.apply_valuation(valuation)).collect(),
        }
    }
}

impl ApplyValuation for Rule {
    fn apply_valuation(&self, valuation: &Valuation) -> Self {
        let head = match &self.head {
            Head::Basic(a) => Head::Basic(a.apply_valuation(valuation)),
            Head::Choice(a) => Head::Choice(a.apply_valuation(valuation)),
            Head::Constraint => Head::Constraint,
        };
        let body = self
            .body
            .iter()
            .map(|b| match b {
                BodyElement::Literal(l) => BodyElement::Literal(Literal {
                    sign: l.sign,
                    atom: l.atom.apply_valuation(valuation),
                }),
                BodyElement::Comparison(c) => BodyElement::Comparison(Comparison {
                    left: c.left.apply_valuation(valuation),
                    relation: c.relation,
                    right: c.right.apply_valuation(valuation),
                }),
            })
            .collect();
        Rule { head, body }
    }
}

impl ApplyValuation for Program {
    fn apply_valuation(&self, valuation: &Valuation) -> Self {
        Program::new(self.rules.iter().map(|r| r.apply_valuation(valuation)).collect())
    }
}

impl ApplyValuation for GroundAtom {
    fn apply_valuation(&self, valuation: &Valuation) -> Self {
        GroundAtom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|t| t.apply_valuation(valuation)).collect(),
        }
    }
}

/// The quadruple (program, placeholders, input symbols, output symbols).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IoProgram {
    program: Program,
    placeholders: BTreeSet<String>,
    inputs: BTreeSet<Predicate>,
    outputs: BTreeSet<Predicate>,
}

impl IoProgram {
    pub fn new(
        program: Program,
        placeholders: BTreeSet<String>,
        inputs: BTreeSet<Predicate>,
        outputs: BTreeSet<Predicate>,
    ) -> Result<Self, Error> {
        if let Some(p) = inputs.intersection(&outputs).next() {
            return Err(Error::InvalidIoProgram(format!(
                "{p} is declared both as input and as output"
            )));
        }
        for rule in program.rules() {
            if let Some(a) = rule.head.atom() {
                if inputs.contains(&a.symbol()) {
                    return Err(Error::InvalidIoProgram(format!(
                        "input symbol {} occurs in the head of rule `{rule}`",
                        a.symbol()
                    )));
                }
            }
        }
        for p in program.predicates() {
            if placeholders.contains(&p.name) {
                return Err(Error::InvalidIoProgram(format!(
                    "placeholder `{}` is used as a predicate name",
                    p.name
                )));
            }
        }
        Ok(IoProgram {
            program,
            placeholders,
            inputs,
            outputs,
        })
    }

    /// An io-program without placeholders, inputs or outputs.
    pub fn plain(program: Program) -> Self {
        IoProgram {
            program,
            placeholders: BTreeSet::new(),
            inputs: BTreeSet::new(),
            outputs: BTreeSet::new(),
        }
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn placeholders(&self) -> &BTreeSet<String> {
        &self.placeholders
    }

    pub fn inputs(&self) -> &BTreeSet<Predicate> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<Predicate> {
        &self.outputs
    }

    pub fn is_input(&self, p: &Predicate) -> bool {
        self.inputs.contains(p)
    }

    pub fn is_public(&self, p: &Predicate) -> bool {
        self.inputs.contains(p) || self.outputs.contains(p)
    }

    /// Predicate symbols occurring in the rules that are neither input nor output.
    pub fn private_symbols(&self) -> BTreeSet<Predicate> {
        self.program
            .predicates()
            .into_iter()
            .filter(|p| !self.is_public(p))
            .collect()
    }

    /// Whether the two io-programs share placeholders, inputs and outputs.
    pub fn is_comparable(&self, other: &IoProgram) -> bool {
        self.placeholders == other.placeholders
            && self.inputs == other.inputs
            && self.outputs == other.outputs
    }

    /// The same declarations with a different set of rules.
    pub fn with_program(&self, program: Program) -> Result<IoProgram, Error> {
        IoProgram::new(
            program,
            self.placeholders.clone(),
            self.inputs.clone(),
            self.outputs.clone(),
        )
    }
}

impl fmt::Display for IoProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
            items.map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
        }
        if !self.placeholders.is_empty() {
            writeln!(f, "#placeholder {}.", list(self.placeholders.iter()))?;
        }
        if !self.inputs.is_empty() {
            writeln!(f, "#input {}.", list(self.inputs.iter()))?;
        }
        if !self.outputs.is_empty() {
            writeln!(f, "#output {}.", list(self.outputs.iter()))?;
        }
        write!(f, "{}", self.program)
    }
}

impl Serialize for IoProgram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("IoProgram", 4)?;
        s.serialize_field("placeholders", &self.placeholders)?;
        s.serialize_field("inputs", &self.inputs)?;
        s.serialize_field("outputs", &self.outputs)?;
        s.serialize_field("rules", &self.program.rules)?;
        s.end()
    }
}

/// A valuation on the placeholders together with a set of input atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Input {
    pub valuation: Valuation,
    pub atoms: AtomSet,
}

impl Input {
    /// Checks the input against the io-program it is meant for.
    pub fn new(io: &IoProgram, valuation: Valuation, atoms: AtomSet) -> Result<Self, Error> {
        for (c, value) in &valuation {
            if !io.placeholders().contains(c) {
                return Err(Error::InvalidInput(format!("`{c}` is not a placeholder")));
            }
            if let Some(s) = value.as_symbol() {
                if io.placeholders().contains(s) {
                    return Err(Error::InvalidInput(format!(
                        "placeholder `{c}` is mapped to the placeholder `{s}`"
                    )));
                }
            }
        }
        for a in &atoms {
            if !io.is_input(&a.symbol()) {
                return Err(Error::InvalidInput(format!(
                    "{a}: {} is not an input symbol",
                    a.symbol()
                )));
            }
            if let Some(p) = a
                .args
                .iter()
                .filter_map(PrecomputedTerm::as_symbol)
                .find(|s| io.placeholders().contains(*s))
            {
                return Err(Error::InvalidInput(format!("{a} contains the placeholder `{p}`")));
            }
        }
        Ok(Input { valuation, atoms })
    }

    /// The input atoms as facts.
    pub fn facts(&self) -> Program {
        Program::new(
            self.atoms
                .iter()
                .map(|a| Rule {
                    head: Head::Basic(a.to_atom()),
                    body: vec![],
                })
                .collect(),
        )
    }
}

/// Public atoms of `atoms`: those over input or output symbols.
pub fn public_projection(atoms: &AtomSet, io: &IoProgram) -> AtomSet {
    atoms.filter_symbols(|p| io.is_public(p))
}

/// Input atoms of `atoms`.
pub fn input_projection(atoms: &AtomSet, io: &IoProgram) -> AtomSet {
    atoms.filter_symbols(|p| io.is_input(p))
}
