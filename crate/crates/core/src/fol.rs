//! Two-sorted first-order formulas, the translation τ*, completion, and the
//! bounded propositional image `F^prop`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_traits::Signed;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::Error;
use crate::ground::{fold_and, fold_implies, fold_or, PropFormula, Universe};
use crate::syntax::{
    ApplyValuation, BinOp, BodyElement, GroundAtom, Head, IoProgram, Predicate,
    PrecomputedTerm, Program, Relation, Rule, Sign, Term, Valuation,
};

pub use crate::stable::{ht_difference, ht_equivalent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    General,
    Integer,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub name: String,
    pub sort: Sort,
}

impl Variable {
    pub fn general(name: &str) -> Self {
        Variable {
            name: name.to_string(),
            sort: Sort::General,
        }
    }

    pub fn integer(name: &str) -> Self {
        Variable {
            name: name.to_string(),
            sort: Sort::Integer,
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FoOp {
    Add,
    Sub,
    Mul,
}

/// Terms over the two-sorted signature. Arithmetic takes integer arguments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FoTerm {
    Const(PrecomputedTerm),
    Var(Variable),
    Abs(Box<FoTerm>),
    BinOp(FoOp, Box<FoTerm>, Box<FoTerm>),
}

impl FoTerm {
    pub fn var(v: &Variable) -> Self {
        FoTerm::Var(v.clone())
    }

    pub fn int(n: i64) -> Self {
        FoTerm::Const(PrecomputedTerm::int(n))
    }

    pub fn binop(op: FoOp, l: FoTerm, r: FoTerm) -> Self {
        FoTerm::BinOp(op, Box::new(l), Box::new(r))
    }

    pub fn abs(t: FoTerm) -> Self {
        FoTerm::Abs(Box::new(t))
    }

    pub fn neg(t: FoTerm) -> Self {
        FoTerm::binop(FoOp::Sub, FoTerm::int(0), t)
    }

    /// Whether the term denotes an integer under every assignment.
    pub fn is_integer(&self) -> bool {
        match self {
            FoTerm::Const(c) => c.is_numeral(),
            FoTerm::Var(v) => v.sort == Sort::Integer,
            FoTerm::Abs(_) | FoTerm::BinOp(..) => true,
        }
    }

    /// Returns a description of the first ill-sorted arithmetic subterm.
    pub fn check_sorts(&self) -> Result<(), String> {
        match self {
            FoTerm::Const(_) | FoTerm::Var(_) => Ok(()),
            FoTerm::Abs(t) => {
                t.check_sorts()?;
                if t.is_integer() {
                    Ok(())
                } else {
                    Err(format!("`{t}` is not an integer term in `{self}`"))
                }
            }
            FoTerm::BinOp(_, l, r) => {
                for t in [l, r] {
                    t.check_sorts()?;
                    if !t.is_integer() {
                        return Err(format!("`{t}` is not an integer term in `{self}`"));
                    }
                }
                Ok(())
            }
        }
    }

    fn collect_variables(&self, out: &mut Vec<Variable>) {
        match self {
            FoTerm::Const(_) => {}
            FoTerm::Var(v) => {
                if !out.iter().any(|w| w.name == v.name) {
                    out.push(v.clone());
                }
            }
            FoTerm::Abs(t) => t.collect_variables(out),
            FoTerm::BinOp(_, l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
        }
    }

    fn collect_constants(&self, out: &mut BTreeSet<PrecomputedTerm>) {
        match self {
            FoTerm::Const(c) => {
                out.insert(c.clone());
            }
            FoTerm::Var(_) => {}
            FoTerm::Abs(t) => t.collect_constants(out),
            FoTerm::BinOp(_, l, r) => {
                l.collect_constants(out);
                r.collect_constants(out);
            }
        }
    }

    fn substitute(&self, binding: &BTreeMap<String, PrecomputedTerm>) -> FoTerm {
        match self {
            FoTerm::Const(_) => self.clone(),
            FoTerm::Var(v) => match binding.get(&v.name) {
                Some(c) => FoTerm::Const(c.clone()),
                None => self.clone(),
            },
            FoTerm::Abs(t) => FoTerm::abs(t.substitute(binding)),
            FoTerm::BinOp(op, l, r) => FoTerm::binop(*op, l.substitute(binding), r.substitute(binding)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            FoTerm::BinOp(FoOp::Add | FoOp::Sub, _, _) => 2,
            FoTerm::BinOp(FoOp::Mul, _, _) => 3,
            _ => 5,
        }
    }

    fn write(&self, out: &mut String, style: Style) {
        match self {
            FoTerm::Const(c) => {
                let _ = write!(out, "{c}");
            }
            FoTerm::Var(v) => out.push_str(&v.name),
            FoTerm::Abs(t) => {
                out.push('|');
                t.write(out, style);
                out.push('|');
            }
            FoTerm::BinOp(FoOp::Sub, l, r) if **l == FoTerm::int(0) => {
                out.push('-');
                let parens = r.precedence() < 5 || is_negative(r);
                wrap(out, parens, |o| r.write(o, style));
            }
            FoTerm::BinOp(op, l, r) => {
                let level = self.precedence();
                wrap(out, l.precedence() < level, |o| l.write(o, style));
                out.push_str(match (op, style) {
                    (FoOp::Add, _) => "+",
                    (FoOp::Sub, _) => "-",
                    (FoOp::Mul, Style::Math) => "×",
                    (FoOp::Mul, Style::Ascii) => "*",
                });
                wrap(out, r.precedence() <= level || is_negative(r), |o| r.write(o, style));
            }
        }
    }
}

fn is_negative(t: &FoTerm) -> bool {
    matches!(t, FoTerm::Const(PrecomputedTerm::Numeral(n)) if n.is_negative())
}

fn wrap(out: &mut String, parens: bool, body: impl FnOnce(&mut String)) {
    if parens {
        out.push('(');
    }
    body(out);
    if parens {
        out.push(')');
    }
}

impl fmt::Display for FoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, Style::Math);
        f.write_str(&s)
    }
}

/// A predicate constant, or a predicate variable bound by a second-order prefix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredicateRef {
    Symbol(String),
    Variable(String),
}

impl PredicateRef {
    pub fn name(&self) -> &str {
        match self {
            PredicateRef::Symbol(s) | PredicateRef::Variable(s) => s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FoAtom {
    pub predicate: PredicateRef,
    pub args: Vec<FoTerm>,
}

impl FoAtom {
    pub fn new(predicate: &str, args: Vec<FoTerm>) -> Self {
        FoAtom {
            predicate: PredicateRef::Symbol(predicate.to_string()),
            args,
        }
    }

    /// The predicate constant `p/n`, or `None` for predicate variables.
    pub fn symbol(&self) -> Option<Predicate> {
        match &self.predicate {
            PredicateRef::Symbol(s) => Some(Predicate::new(s, self.args.len())),
            PredicateRef::Variable(_) => None,
        }
    }
}

/// Formulas over the two-sorted signature. `⊤` is `⊥ → ⊥` and `¬F` is `F → ⊥`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FoFormula {
    Atom(FoAtom),
    Compare(FoTerm, Relation, FoTerm),
    Falsity,
    And(Vec<FoFormula>),
    Or(Vec<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Iff(Box<FoFormula>, Box<FoFormula>),
    Forall(Vec<Variable>, Box<FoFormula>),
    Exists(Vec<Variable>, Box<FoFormula>),
}

impl FoFormula {
    pub fn top() -> Self {
        FoFormula::implies(FoFormula::Falsity, FoFormula::Falsity)
    }

    pub fn not(f: FoFormula) -> Self {
        FoFormula::implies(f, FoFormula::Falsity)
    }

    pub fn implies(f: FoFormula, g: FoFormula) -> Self {
        FoFormula::Implies(Box::new(f), Box::new(g))
    }

    pub fn iff(f: FoFormula, g: FoFormula) -> Self {
        FoFormula::Iff(Box::new(f), Box::new(g))
    }

    pub fn atom(predicate: &str, args: Vec<FoTerm>) -> Self {
        FoFormula::Atom(FoAtom::new(predicate, args))
    }

    pub fn eq(l: FoTerm, r: FoTerm) -> Self {
        FoFormula::Compare(l, Relation::Eq, r)
    }

    /// Conjunction; empty is ⊤ and a single conjunct stands alone.
    pub fn conjoin(mut fs: Vec<FoFormula>) -> Self {
        match fs.len() {
            0 => FoFormula::top(),
            1 => fs.pop().unwrap(),
            _ => FoFormula::And(fs),
        }
    }

    /// Disjunction; empty is ⊥ and a single disjunct stands alone.
    pub fn disjoin(mut fs: Vec<FoFormula>) -> Self {
        match fs.len() {
            0 => FoFormula::Falsity,
            1 => fs.pop().unwrap(),
            _ => FoFormula::Or(fs),
        }
    }

    /// Universal quantification; an empty variable list is elided.
    pub fn forall(vars: Vec<Variable>, body: FoFormula) -> Self {
        if vars.is_empty() {
            body
        } else {
            FoFormula::Forall(vars, Box::new(body))
        }
    }

    /// Existential quantification; an empty variable list is elided.
    pub fn exists(vars: Vec<Variable>, body: FoFormula) -> Self {
        if vars.is_empty() {
            body
        } else {
            FoFormula::Exists(vars, Box::new(body))
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, FoFormula::Implies(f, g) if **f == FoFormula::Falsity && **g == FoFormula::Falsity)
    }

    pub fn as_negation(&self) -> Option<&FoFormula> {
        match self {
            FoFormula::Implies(f, g) if **g == FoFormula::Falsity && **f != FoFormula::Falsity => Some(f),
            _ => None,
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<Variable>) {
        let add_term = |t: &FoTerm, bound: &Vec<String>, out: &mut Vec<Variable>| {
            let mut vs = Vec::new();
            t.collect_variables(&mut vs);
            for v in vs {
                if !bound.contains(&v.name) && !out.iter().any(|w| w.name == v.name) {
                    out.push(v);
                }
            }
        };
        match self {
            FoFormula::Atom(a) => {
                for t in &a.args {
                    add_term(t, bound, out);
                }
            }
            FoFormula::Compare(l, _, r) => {
                add_term(l, bound, out);
                add_term(r, bound, out);
            }
            FoFormula::Falsity => {}
            FoFormula::And(fs) | FoFormula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out);
                }
            }
            FoFormula::Implies(f, g) | FoFormula::Iff(f, g) => {
                f.collect_free(bound, out);
                g.collect_free(bound, out);
            }
            FoFormula::Forall(vs, body) | FoFormula::Exists(vs, body) => {
                let mark = bound.len();
                bound.extend(vs.iter().map(|v| v.name.clone()));
                body.collect_free(bound, out);
                bound.truncate(mark);
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Names of all variables, bound or free.
    pub fn variable_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            let mut vs = Vec::new();
            match f {
                FoFormula::Atom(a) => a.args.iter().for_each(|t| t.collect_variables(&mut vs)),
                FoFormula::Compare(l, _, r) => {
                    l.collect_variables(&mut vs);
                    r.collect_variables(&mut vs);
                }
                FoFormula::Forall(bound, _) | FoFormula::Exists(bound, _) => vs.extend(bound.iter().cloned()),
                _ => {}
            }
            out.extend(vs.into_iter().map(|v| v.name));
        });
        out
    }

    fn visit(&self, f: &mut dyn FnMut(&FoFormula)) {
        f(self);
        match self {
            FoFormula::And(fs) | FoFormula::Or(fs) => fs.iter().for_each(|g| g.visit(f)),
            FoFormula::Implies(g, h) | FoFormula::Iff(g, h) => {
                g.visit(f);
                h.visit(f);
            }
            FoFormula::Forall(_, g) | FoFormula::Exists(_, g) => g.visit(f),
            _ => {}
        }
    }

    /// Predicate constants occurring in the formula.
    pub fn predicates(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let FoFormula::Atom(a) = f {
                out.extend(a.symbol());
            }
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<PrecomputedTerm> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            FoFormula::Atom(a) => a.args.iter().for_each(|t| t.collect_constants(&mut out)),
            FoFormula::Compare(l, _, r) => {
                l.collect_constants(&mut out);
                r.collect_constants(&mut out);
            }
            _ => {}
        });
        out
    }

    /// Replaces free occurrences of variables by precomputed terms.
    pub fn substitute(&self, binding: &BTreeMap<String, PrecomputedTerm>) -> FoFormula {
        if binding.is_empty() {
            return self.clone();
        }
        match self {
            FoFormula::Atom(a) => FoFormula::Atom(FoAtom {
                predicate: a.predicate.clone(),
                args: a.args.iter().map(|t| t.substitute(binding)).collect(),
            }),
            FoFormula::Compare(l, rel, r) => {
                FoFormula::Compare(l.substitute(binding), *rel, r.substitute(binding))
            }
            FoFormula::Falsity => FoFormula::Falsity,
            FoFormula::And(fs) => FoFormula::And(fs.iter().map(|f| f.substitute(binding)).collect()),
            FoFormula::Or(fs) => FoFormula::Or(fs.iter().map(|f| f.substitute(binding)).collect()),
            FoFormula::Implies(f, g) => FoFormula::implies(f.substitute(binding), g.substitute(binding)),
            FoFormula::Iff(f, g) => FoFormula::iff(f.substitute(binding), g.substitute(binding)),
            FoFormula::Forall(vs, body) | FoFormula::Exists(vs, body) => {
                let inner: BTreeMap<String, PrecomputedTerm> = binding
                    .iter()
                    .filter(|(k, _)| !vs.iter().any(|v| &v.name == *k))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                let body = Box::new(body.substitute(&inner));
                match self {
                    FoFormula::Forall(..) => FoFormula::Forall(vs.clone(), body),
                    _ => FoFormula::Exists(vs.clone(), body),
                }
            }
        }
    }

    /// Replaces atoms over the predicate constants in `map` by atoms over
    /// the corresponding predicate variables.
    pub fn rename_predicates(&self, map: &BTreeMap<Predicate, String>) -> FoFormula {
        match self {
            FoFormula::Atom(a) => match a.symbol().and_then(|p| map.get(&p)) {
                Some(var) => FoFormula::Atom(FoAtom {
                    predicate: PredicateRef::Variable(var.clone()),
                    args: a.args.clone(),
                }),
                None => self.clone(),
            },
            FoFormula::Compare(..) | FoFormula::Falsity => self.clone(),
            FoFormula::And(fs) => FoFormula::And(fs.iter().map(|f| f.rename_predicates(map)).collect()),
            FoFormula::Or(fs) => FoFormula::Or(fs.iter().map(|f| f.rename_predicates(map)).collect()),
            FoFormula::Implies(f, g) => FoFormula::implies(f.rename_predicates(map), g.rename_predicates(map)),
            FoFormula::Iff(f, g) => FoFormula::iff(f.rename_predicates(map), g.rename_predicates(map)),
            FoFormula::Forall(vs, body) => FoFormula::Forall(vs.clone(), Box::new(body.rename_predicates(map))),
            FoFormula::Exists(vs, body) => FoFormula::Exists(vs.clone(), Box::new(body.rename_predicates(map))),
        }
    }

    /// Checks that arithmetic is applied to integer terms only.
    pub fn check_sorts(&self) -> Result<(), Error> {
        let mut result = Ok(());
        self.visit(&mut |f| {
            let terms: Vec<&FoTerm> = match f {
                FoFormula::Atom(a) => a.args.iter().collect(),
                FoFormula::Compare(l, _, r) => vec![l, r],
                _ => vec![],
            };
            for t in terms {
                if let Err(e) = t.check_sorts() {
                    if result.is_ok() {
                        result = Err(Error::IllFormed(e));
                    }
                }
            }
        });
        result
    }

    fn is_binary(&self) -> bool {
        match self {
            FoFormula::And(fs) | FoFormula::Or(fs) => fs.len() > 1,
            FoFormula::Implies(..) => !self.is_top() && self.as_negation().is_none(),
            FoFormula::Iff(..) => true,
            _ => false,
        }
    }

    fn write(&self, out: &mut String, style: Style) {
        let sym = |math: &'static str, ascii: &'static str| match style {
            Style::Math => math,
            Style::Ascii => ascii,
        };
        let operand = |g: &FoFormula, out: &mut String| {
            wrap(out, g.is_binary(), |o| g.write(o, style));
        };
        let list = |fs: &[FoFormula], sep: &str, out: &mut String| {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                    out.push_str(sep);
                    out.push(' ');
                }
                operand(g, out);
            }
        };
        match self {
            FoFormula::Atom(a) => {
                out.push_str(a.predicate.name());
                if !a.args.is_empty() {
                    out.push('(');
                    for (i, t) in a.args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        t.write(out, style);
                    }
                    out.push(')');
                }
            }
            FoFormula::Compare(l, rel, r) => {
                l.write(out, style);
                out.push(' ');
                out.push_str(match style {
                    Style::Math => rel.math_symbol(),
                    Style::Ascii => rel.symbol(),
                });
                out.push(' ');
                r.write(out, style);
            }
            FoFormula::Falsity => out.push_str(sym("⊥", "#false")),
            FoFormula::And(fs) if fs.is_empty() => out.push_str(sym("⊤", "#top")),
            FoFormula::Or(fs) if fs.is_empty() => out.push_str(sym("⊥", "#false")),
            FoFormula::And(fs) => list(fs, sym("∧", "and"), out),
            FoFormula::Or(fs) => list(fs, sym("∨", "or"), out),
            FoFormula::Implies(f, g) => {
                if self.is_top() {
                    out.push_str(sym("⊤", "#top"));
                } else if let Some(f) = self.as_negation() {
                    out.push_str(sym("¬", "not "));
                    operand(f, out);
                } else {
                    operand(f, out);
                    out.push_str(sym(" → ", " -> "));
                    operand(g, out);
                }
            }
            FoFormula::Iff(f, g) => {
                operand(f, out);
                out.push_str(sym(" ↔ ", " <-> "));
                operand(g, out);
            }
            FoFormula::Forall(vs, body) | FoFormula::Exists(vs, body) => {
                out.push_str(match (self, style) {
                    (FoFormula::Forall(..), Style::Math) => "∀",
                    (FoFormula::Forall(..), Style::Ascii) => "forall ",
                    (_, Style::Math) => "∃",
                    (_, Style::Ascii) => "exists ",
                });
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    out.push_str(&v.name);
                }
                out.push(' ');
                let parens = body.is_binary() || matches!(**body, FoFormula::Compare(..));
                wrap(out, parens, |o| body.write(o, style));
            }
        }
    }

    /// Parseable ASCII text, with a `#int` declaration for integer variables.
    pub fn to_ascii(&self) -> String {
        let mut ints = BTreeSet::new();
        self.visit(&mut |f| {
            let mut vs = Vec::new();
            match f {
                FoFormula::Atom(a) => a.args.iter().for_each(|t| t.collect_variables(&mut vs)),
                FoFormula::Compare(l, _, r) => {
                    l.collect_variables(&mut vs);
                    r.collect_variables(&mut vs);
                }
                FoFormula::Forall(b, _) | FoFormula::Exists(b, _) => vs.extend(b.iter().cloned()),
                _ => {}
            }
            ints.extend(vs.into_iter().filter(|v| v.sort == Sort::Integer).map(|v| v.name));
        });
        let mut out = String::new();
        if !ints.is_empty() {
            out.push_str("#int ");
            out.push_str(&ints.into_iter().collect::<Vec<_>>().join(", "));
            out.push_str(".\n");
        }
        self.write(&mut out, Style::Ascii);
        out
    }

    /// The formula as a JSON s-expression.
    pub fn to_sexpr(&self) -> Value {
        match self {
            FoFormula::Atom(a) => {
                let args: Vec<Value> = a.args.iter().map(term_sexpr).collect();
                match &a.predicate {
                    PredicateRef::Symbol(p) => json!(["atom", p, args]),
                    PredicateRef::Variable(p) => json!(["predvar", p, args]),
                }
            }
            FoFormula::Compare(l, rel, r) => json!(["compare", rel.symbol(), term_sexpr(l), term_sexpr(r)]),
            FoFormula::Falsity => json!(["false"]),
            FoFormula::And(fs) => {
                let mut v = vec![json!("and")];
                v.extend(fs.iter().map(FoFormula::to_sexpr));
                Value::Array(v)
            }
            FoFormula::Or(fs) => {
                let mut v = vec![json!("or")];
                v.extend(fs.iter().map(FoFormula::to_sexpr));
                Value::Array(v)
            }
            FoFormula::Implies(f, g) => json!(["implies", f.to_sexpr(), g.to_sexpr()]),
            FoFormula::Iff(f, g) => json!(["iff", f.to_sexpr(), g.to_sexpr()]),
            FoFormula::Forall(vs, body) | FoFormula::Exists(vs, body) => {
                let tag = if matches!(self, FoFormula::Forall(..)) { "forall" } else { "exists" };
                let vars: Vec<Value> = vs.iter().map(|v| json!([v.name, v.sort])).collect();
                json!([tag, vars, body.to_sexpr()])
            }
        }
    }
}

fn term_sexpr(t: &FoTerm) -> Value {
    match t {
        FoTerm::Const(PrecomputedTerm::Numeral(n)) => json!(["num", n.to_string()]),
        FoTerm::Const(PrecomputedTerm::Symbolic(s)) => json!(["sym", &**s]),
        FoTerm::Var(v) => json!(["var", v.name, v.sort]),
        FoTerm::Abs(t) => json!(["abs", term_sexpr(t)]),
        FoTerm::BinOp(op, l, r) => {
            let tag = match op {
                FoOp::Add => "add",
                FoOp::Sub => "sub",
                FoOp::Mul => "mul",
            };
            json!([tag, term_sexpr(l), term_sexpr(r)])
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Style {
    Math,
    Ascii,
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, Style::Math);
        f.write_str(&s)
    }
}

impl Serialize for FoFormula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_sexpr().serialize(serializer)
    }
}

impl ApplyValuation for FoTerm {
    fn apply_valuation(&self, valuation: &Valuation) -> Self {
        match self {
            FoTerm::Const(c) => FoTerm::Const(c.apply_valuation(valuation)),
            FoTerm::Var(_) => self.clone(),
            FoTerm::Abs(t) => FoTerm::abs(t.apply_valuation(valuation)),
            FoTerm::BinOp(op, l, r) => {
                FoTerm::binop(*op, l.apply_valuation(valuation), r.apply_valuation(valuation))
            }
        }
    }
}

impl ApplyValuation for FoFormula {
    fn apply_valuation(&self, v: &Valuation) -> Self {
        match self {
            FoFormula::Atom(a) => FoFormula::Atom(FoAtom {
                predicate: a.predicate.clone(),
                args: a.args.iter().map(|t| t.apply_valuation(v)).collect(),
            }),
            FoFormula::Compare(l, rel, r) => FoFormula::Compare(l.apply_valuation(v), *rel, r.apply_valuation(v)),
            FoFormula::Falsity => FoFormula::Falsity,
            FoFormula::And(fs) => FoFormula::And(fs.iter().map(|f| f.apply_valuation(v)).collect()),
            FoFormula::Or(fs) => FoFormula::Or(fs.iter().map(|f| f.apply_valuation(v)).collect()),
            FoFormula::Implies(f, g) => FoFormula::implies(f.apply_valuation(v), g.apply_valuation(v)),
            FoFormula::Iff(f, g) => FoFormula::iff(f.apply_valuation(v), g.apply_valuation(v)),
            FoFormula::Forall(vs, b) => FoFormula::Forall(vs.clone(), Box::new(b.apply_valuation(v))),
            FoFormula::Exists(vs, b) => FoFormula::Exists(vs.clone(), Box::new(b.apply_valuation(v))),
        }
    }
}

// ---------------------------------------------------------------------------
// val, τ^B and τ*

fn fresh(taken: &BTreeSet<String>, base: &str) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|k| format!("{base}{k}"))
        .find(|n| !taken.contains(n))
        .unwrap()
}

/// The first `n` names `V1, V2, …` that are not taken.
fn fresh_tuple(taken: &BTreeSet<String>, n: usize) -> Vec<String> {
    (1..)
        .map(|k| format!("V{k}"))
        .filter(|name| !taken.contains(name))
        .take(n)
        .collect()
}

fn term_variables(t: &Term) -> BTreeSet<String> {
    let mut vs = Vec::new();
    t.collect_variables(&mut vs);
    vs.into_iter().collect()
}

fn program_term(t: &Term) -> FoTerm {
    match t {
        Term::Precomputed(p) => FoTerm::Const(p.clone()),
        Term::Variable(v) => FoTerm::Var(Variable::general(v)),
        _ => unreachable!("only precomputed terms and variables are copied verbatim"),
    }
}

fn val_in(t: &Term, target: &Variable, taken: &BTreeSet<String>) -> FoFormula {
    let mut taken = taken.clone();
    taken.insert(target.name.clone());
    taken.extend(term_variables(t));
    let target_term = FoTerm::var(target);
    let fresh_int = |base: &str, taken: &mut BTreeSet<String>| {
        let name = fresh(taken, base);
        taken.insert(name.clone());
        Variable::integer(&name)
    };
    match t {
        Term::Precomputed(_) | Term::Variable(_) => FoFormula::eq(target_term, program_term(t)),
        Term::Abs(t1) => {
            let i = fresh_int("I", &mut taken);
            FoFormula::exists(
                vec![i.clone()],
                FoFormula::And(vec![
                    val_in(t1, &i, &taken),
                    FoFormula::eq(target_term, FoTerm::abs(FoTerm::var(&i))),
                ]),
            )
        }
        Term::BinOp(op, t1, t2) => {
            let i = fresh_int("I", &mut taken);
            let j = fresh_int("J", &mut taken);
            let (vi, vj) = (FoTerm::var(&i), FoTerm::var(&j));
            let operands = [val_in(t1, &i, &taken), val_in(t2, &j, &taken)];
            match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul => {
                    let fo_op = match op {
                        BinOp::Add => FoOp::Add,
                        BinOp::Sub => FoOp::Sub,
                        _ => FoOp::Mul,
                    };
                    let [a, b] = operands;
                    FoFormula::exists(
                        vec![i, j],
                        FoFormula::And(vec![a, b, FoFormula::eq(target_term, FoTerm::binop(fo_op, vi, vj))]),
                    )
                }
                BinOp::Div | BinOp::Mod => {
                    let k = fresh_int("K", &mut taken);
                    let vk = FoTerm::var(&k);
                    let abs_i = FoTerm::abs(vi.clone());
                    let abs_j = FoTerm::abs(vj.clone());
                    let product = FoTerm::binop(FoOp::Mul, vi.clone(), vj.clone());
                    let (nonneg, neg) = if *op == BinOp::Div {
                        (vk.clone(), FoTerm::neg(vk.clone()))
                    } else {
                        let kj = FoTerm::binop(FoOp::Mul, vk.clone(), vj.clone());
                        (
                            FoTerm::binop(FoOp::Sub, vi.clone(), kj.clone()),
                            FoTerm::binop(FoOp::Add, vi.clone(), kj),
                        )
                    };
                    let [a, b] = operands;
                    FoFormula::exists(
                        vec![i, j, k],
                        FoFormula::And(vec![
                            a,
                            b,
                            FoFormula::Compare(
                                FoTerm::binop(FoOp::Mul, vk.clone(), abs_j.clone()),
                                Relation::Le,
                                abs_i.clone(),
                            ),
                            FoFormula::Compare(
                                abs_i,
                                Relation::Lt,
                                FoTerm::binop(
                                    FoOp::Mul,
                                    FoTerm::binop(FoOp::Add, vk, FoTerm::int(1)),
                                    abs_j,
                                ),
                            ),
                            FoFormula::Or(vec![
                                FoFormula::And(vec![
                                    FoFormula::Compare(product.clone(), Relation::Ge, FoTerm::int(0)),
                                    FoFormula::eq(target_term.clone(), nonneg),
                                ]),
                                FoFormula::And(vec![
                                    FoFormula::Compare(product, Relation::Lt, FoTerm::int(0)),
                                    FoFormula::eq(target_term, neg),
                                ]),
                            ]),
                        ]),
                    )
                }
                BinOp::Interval => {
                    let k = fresh_int("K", &mut taken);
                    let vk = FoTerm::var(&k);
                    let [a, b] = operands;
                    FoFormula::exists(
                        vec![i, j, k],
                        FoFormula::And(vec![
                            a,
                            b,
                            FoFormula::Compare(vi, Relation::Le, vk.clone()),
                            FoFormula::Compare(vk.clone(), Relation::Le, vj),
                            FoFormula::eq(target_term, vk),
                        ]),
                    )
                }
            }
        }
    }
}

/// The formula `val_t(V)`: `v` is one of the values of `t`.
pub fn val_formula(t: &Term, v: &Variable) -> FoFormula {
    val_in(t, v, &BTreeSet::new())
}

fn body_element_variables(b: &BodyElement) -> BTreeSet<String> {
    match b {
        BodyElement::Literal(l) => l.atom.args.iter().flat_map(term_variables).collect(),
        BodyElement::Comparison(c) => term_variables(&c.left)
            .into_iter()
            .chain(term_variables(&c.right))
            .collect(),
    }
}

fn signed(sign: Sign, f: FoFormula) -> FoFormula {
    match sign {
        Sign::Positive => f,
        Sign::Negative => FoFormula::not(f),
        Sign::DoubleNegative => FoFormula::not(FoFormula::not(f)),
    }
}

fn tau_b_in(b: &BodyElement, taken: &BTreeSet<String>) -> FoFormula {
    let mut taken = taken.clone();
    taken.extend(body_element_variables(b));
    match b {
        BodyElement::Literal(l) => {
            let n = l.atom.args.len();
            let names = if n == 1 && !taken.contains("V") {
                vec!["V".to_string()]
            } else {
                fresh_tuple(&taken, n)
            };
            taken.extend(names.iter().cloned());
            let vars: Vec<Variable> = names.iter().map(|n| Variable::general(n)).collect();
            let mut conjuncts: Vec<FoFormula> = l
                .atom
                .args
                .iter()
                .zip(&vars)
                .map(|(t, v)| val_in(t, v, &taken))
                .collect();
            let atom = FoFormula::atom(&l.atom.predicate, vars.iter().map(FoTerm::var).collect());
            conjuncts.push(signed(l.sign, atom));
            FoFormula::exists(vars, FoFormula::conjoin(conjuncts))
        }
        BodyElement::Comparison(c) => {
            let names = fresh_tuple(&taken, 2);
            taken.extend(names.iter().cloned());
            let v1 = Variable::general(&names[0]);
            let v2 = Variable::general(&names[1]);
            FoFormula::exists(
                vec![v1.clone(), v2.clone()],
                FoFormula::And(vec![
                    val_in(&c.left, &v1, &taken),
                    val_in(&c.right, &v2, &taken),
                    FoFormula::Compare(FoTerm::var(&v1), c.relation, FoTerm::var(&v2)),
                ]),
            )
        }
    }
}

/// The translation τ^B of a literal or comparison.
pub fn tau_b(b: &BodyElement) -> FoFormula {
    tau_b_in(b, &BTreeSet::new())
}

/// The consequent of a completable sentence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Consequent {
    /// `p(V)` for an intensional `p` and distinct variables `V`.
    Head { predicate: String, args: Vec<Variable> },
    /// A formula without intensional symbols.
    Formula(FoFormula),
}

impl Consequent {
    pub fn to_formula(&self) -> FoFormula {
        match self {
            Consequent::Head { predicate, args } => {
                FoFormula::atom(predicate, args.iter().map(FoTerm::var).collect())
            }
            Consequent::Formula(f) => f.clone(),
        }
    }

    pub fn head_symbol(&self) -> Option<Predicate> {
        match self {
            Consequent::Head { predicate, args } => Some(Predicate::new(predicate, args.len())),
            Consequent::Formula(_) => None,
        }
    }
}

/// A completable sentence `∀vars (antecedent → consequent)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompletableMember {
    pub vars: Vec<Variable>,
    pub antecedent: FoFormula,
    pub consequent: Consequent,
}

impl CompletableMember {
    pub fn sentence(&self) -> FoFormula {
        FoFormula::forall(
            self.vars.clone(),
            FoFormula::implies(self.antecedent.clone(), self.consequent.to_formula()),
        )
    }
}

/// A set of completable sentences with the intensional predicate symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletableSet {
    members: Vec<CompletableMember>,
    intensional: BTreeSet<Predicate>,
}

impl CompletableSet {
    /// Checks that every member is completable and that members defining the
    /// same predicate share their consequent.
    pub fn new(members: Vec<CompletableMember>, intensional: BTreeSet<Predicate>) -> Result<Self, Error> {
        let mut heads: BTreeMap<Predicate, &Consequent> = BTreeMap::new();
        for m in &members {
            let sentence = m.sentence();
            if !sentence.is_sentence() {
                return Err(Error::NotCompletable(format!("`{sentence}` has free variables")));
            }
            match &m.consequent {
                Consequent::Head { args, .. } => {
                    let p = m.consequent.head_symbol().unwrap();
                    if !intensional.contains(&p) {
                        return Err(Error::NotCompletable(format!(
                            "consequent of `{sentence}` uses the extensional symbol {p}"
                        )));
                    }
                    let names: BTreeSet<&str> = args.iter().map(|v| v.name.as_str()).collect();
                    if names.len() != args.len() {
                        return Err(Error::NotCompletable(format!(
                            "consequent of `{sentence}` repeats a variable"
                        )));
                    }
                    if args.iter().any(|v| v.sort != Sort::General) {
                        return Err(Error::NotCompletable(format!(
                            "consequent of `{sentence}` has an integer variable"
                        )));
                    }
                    if let Some(other) = heads.insert(p.clone(), &m.consequent) {
                        if other != &m.consequent {
                            return Err(Error::NotCompletable(format!(
                                "members defining {p} have different consequents"
                            )));
                        }
                    }
                }
                Consequent::Formula(g) => {
                    if let Some(p) = g.predicates().intersection(&intensional).next() {
                        return Err(Error::NotCompletable(format!(
                            "consequent `{g}` contains the intensional symbol {p}"
                        )));
                    }
                }
            }
        }
        Ok(CompletableSet { members, intensional })
    }

    /// Recognizes sentences of the form `∀̃(F → G)`.
    pub fn from_sentences(sentences: &[FoFormula], intensional: BTreeSet<Predicate>) -> Result<Self, Error> {
        let mut members = Vec::new();
        for s in sentences {
            let mut vars = Vec::new();
            let mut body = s;
            while let FoFormula::Forall(vs, inner) = body {
                vars.extend(vs.iter().cloned());
                body = inner;
            }
            let FoFormula::Implies(f, g) = body else {
                return Err(Error::NotCompletable(format!("`{s}` is not an implication")));
            };
            let head = match &**g {
                FoFormula::Atom(a) => a.symbol().filter(|p| intensional.contains(p)).and_then(|_| {
                    let args: Option<Vec<Variable>> = a
                        .args
                        .iter()
                        .map(|t| match t {
                            FoTerm::Var(v) if vars.iter().any(|w| w.name == v.name) => Some(v.clone()),
                            _ => None,
                        })
                        .collect();
                    args.map(|args| Consequent::Head {
                        predicate: a.predicate.name().to_string(),
                        args,
                    })
                }),
                _ => None,
            };
            let consequent = match head {
                Some(h) => h,
                None => {
                    if g.predicates().intersection(&intensional).next().is_some() {
                        return Err(Error::NotCompletable(format!(
                            "consequent of `{s}` is neither p(V) nor free of intensional symbols"
                        )));
                    }
                    Consequent::Formula((**g).clone())
                }
            };
            members.push(CompletableMember {
                vars,
                antecedent: (**f).clone(),
                consequent,
            });
        }
        CompletableSet::new(members, intensional)
    }

    pub fn members(&self) -> &[CompletableMember] {
        &self.members
    }

    pub fn intensional(&self) -> &BTreeSet<Predicate> {
        &self.intensional
    }

    pub fn sentences(&self) -> Vec<FoFormula> {
        self.members.iter().map(CompletableMember::sentence).collect()
    }

    pub fn apply_valuation(&self, v: &Valuation) -> CompletableSet {
        CompletableSet {
            members: self
                .members
                .iter()
                .map(|m| CompletableMember {
                    vars: m.vars.clone(),
                    antecedent: m.antecedent.apply_valuation(v),
                    consequent: match &m.consequent {
                        Consequent::Formula(f) => Consequent::Formula(f.apply_valuation(v)),
                        head => head.clone(),
                    },
                })
                .collect(),
            intensional: self.intensional.clone(),
        }
    }

    fn variable_names(&self) -> BTreeSet<String> {
        self.sentences().iter().flat_map(FoFormula::variable_names).collect()
    }
}

impl fmt::Display for CompletableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.sentences() {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

fn tau_star_rule(rule: &Rule, head_names: &[String], program_vars: &BTreeSet<String>) -> CompletableMember {
    let mut taken = program_vars.clone();
    taken.extend(head_names.iter().cloned());
    let bodies: Vec<FoFormula> = rule.body.iter().map(|b| tau_b_in(b, &taken)).collect();
    let mut vars: Vec<Variable> = rule.variables().iter().map(|v| Variable::general(v)).collect();
    match &rule.head {
        Head::Constraint => CompletableMember {
            vars,
            antecedent: FoFormula::conjoin(bodies),
            consequent: Consequent::Formula(FoFormula::Falsity),
        },
        Head::Basic(a) | Head::Choice(a) => {
            let head_vars: Vec<Variable> = head_names[..a.args.len()]
                .iter()
                .map(|n| Variable::general(n))
                .collect();
            let mut conjuncts: Vec<FoFormula> = a
                .args
                .iter()
                .zip(&head_vars)
                .map(|(t, v)| val_in(t, v, &taken))
                .collect();
            conjuncts.extend(bodies);
            if matches!(rule.head, Head::Choice(_)) {
                let atom = FoFormula::atom(&a.predicate, head_vars.iter().map(FoTerm::var).collect());
                conjuncts.push(FoFormula::not(FoFormula::not(atom)));
            }
            vars.extend(head_vars.iter().cloned());
            CompletableMember {
                vars,
                antecedent: FoFormula::conjoin(conjuncts),
                consequent: Consequent::Head {
                    predicate: a.predicate.clone(),
                    args: head_vars,
                },
            }
        }
    }
}

fn tau_star_members(prog: &Program) -> Vec<CompletableMember> {
    let program_vars = prog.variables();
    let arity = prog
        .rules()
        .iter()
        .filter_map(|r| r.head.atom().map(|a| a.args.len()))
        .max()
        .unwrap_or(0);
    let head_names = fresh_tuple(&program_vars, arity);
    prog.rules()
        .iter()
        .map(|r| tau_star_rule(r, &head_names, &program_vars))
        .collect()
}

/// τ*Π with every predicate symbol of the program intensional.
pub fn tau_star(prog: &Program) -> CompletableSet {
    CompletableSet::new(tau_star_members(prog), prog.predicates())
        .expect("τ* always produces a completable set")
}

/// τ*Π with the output and private symbols of an io-program intensional.
pub fn tau_star_io(io: &IoProgram) -> CompletableSet {
    let mut intensional = io.private_symbols();
    intensional.extend(io.outputs().iter().cloned());
    CompletableSet::new(tau_star_members(io.program()), intensional)
        .expect("τ* always produces a completable set")
}

/// The completed definition `∀V (p(V) ↔ ⋁ ∃U_i F_i)` of `p` in `gamma`.
pub fn completed_definition(p: &Predicate, gamma: &CompletableSet) -> FoFormula {
    let definers: Vec<&CompletableMember> = gamma
        .members
        .iter()
        .filter(|m| m.consequent.head_symbol().as_ref() == Some(p))
        .collect();
    let head_vars: Vec<Variable> = match definers.first() {
        Some(CompletableMember {
            consequent: Consequent::Head { args, .. },
            ..
        }) => args.clone(),
        _ => fresh_tuple(&gamma.variable_names(), p.arity)
            .iter()
            .map(|n| Variable::general(n))
            .collect(),
    };
    let disjuncts = definers
        .iter()
        .map(|m| {
            let free = m.antecedent.free_variables();
            let local: Vec<Variable> = m
                .vars
                .iter()
                .filter(|v| !head_vars.iter().any(|h| h.name == v.name))
                .filter(|v| free.iter().any(|w| w.name == v.name))
                .cloned()
                .collect();
            FoFormula::exists(local, m.antecedent.clone())
        })
        .collect();
    let atom = FoFormula::atom(&p.name, head_vars.iter().map(FoTerm::var).collect());
    FoFormula::forall(head_vars, FoFormula::iff(atom, FoFormula::disjoin(disjuncts)))
}

/// COMP[Γ]: the completed definitions of all intensional symbols, in symbol
/// order, followed by the members that are not definitions.
pub fn complete(gamma: &CompletableSet) -> FoFormula {
    let mut conjuncts: Vec<FoFormula> = gamma
        .intensional
        .iter()
        .map(|p| completed_definition(p, gamma))
        .collect();
    conjuncts.extend(
        gamma
            .members
            .iter()
            .filter(|m| matches!(m.consequent, Consequent::Formula(_)))
            .map(CompletableMember::sentence),
    );
    FoFormula::conjoin(conjuncts)
}

/// A predicate variable standing for a private symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PredicateVariable {
    pub name: String,
    pub replaces: Predicate,
}

impl PredicateVariable {
    pub fn arity(&self) -> usize {
        self.replaces.arity
    }
}

/// `∃P1 … Pl C` where the matrix refers to the `P_i` through predicate variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoSentence {
    pub prefix: Vec<PredicateVariable>,
    pub matrix: FoFormula,
}

impl SoSentence {
    pub fn apply_valuation(&self, v: &Valuation) -> SoSentence {
        SoSentence {
            prefix: self.prefix.clone(),
            matrix: self.matrix.apply_valuation(v),
        }
    }

    pub fn to_sexpr(&self) -> Value {
        let prefix: Vec<Value> = self
            .prefix
            .iter()
            .map(|p| json!([p.name, p.arity(), p.replaces.to_string()]))
            .collect();
        json!(["exists_predicates", prefix, self.matrix.to_sexpr()])
    }
}

impl fmt::Display for SoSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prefix.is_empty() {
            return write!(f, "{}", self.matrix);
        }
        write!(f, "∃")?;
        for (i, p) in self.prefix.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", p.name)?;
        }
        if self.matrix.is_binary() {
            write!(f, " ({})", self.matrix)
        } else {
            write!(f, " {}", self.matrix)
        }
    }
}

impl Serialize for SoSentence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_sexpr().serialize(serializer)
    }
}

/// COMP[Ω]: the completion of τ*Π with private symbols replaced by
/// existentially quantified predicate variables.
pub fn complete_io(io: &IoProgram) -> SoSentence {
    let gamma = tau_star_io(io);
    let matrix = complete(&gamma);
    let private: Vec<Predicate> = io.private_symbols().into_iter().collect();
    let program_vars = io.program().variables();
    let mut names = Vec::new();
    let mut taken = program_vars.clone();
    for _ in &private {
        let name = if private.len() == 1 && !taken.contains("P") {
            "P".to_string()
        } else {
            (1..).map(|k| format!("P{k}")).find(|n| !taken.contains(n)).unwrap()
        };
        taken.insert(name.clone());
        names.push(name);
    }
    let map: BTreeMap<Predicate, String> = private.iter().cloned().zip(names.iter().cloned()).collect();
    SoSentence {
        prefix: private
            .into_iter()
            .zip(names)
            .map(|(replaces, name)| PredicateVariable { name, replaces })
            .collect(),
        matrix: matrix.rename_predicates(&map),
    }
}

// ---------------------------------------------------------------------------
// Bounded evaluation

/// Bindings of variable names to domain elements; later entries shadow earlier ones.
pub(crate) type Env = Vec<(String, PrecomputedTerm)>;

fn lookup<'a>(env: &'a Env, name: &str) -> Option<&'a PrecomputedTerm> {
    env.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
}

/// Options for [`fprop_with`].
#[derive(Default)]
pub struct FpropOptions<'a> {
    /// Remove ⊤ and ⊥ by absorption while expanding.
    pub fold: bool,
    /// Truth values for atoms that are known in advance; implies folding.
    pub fixed: Option<&'a dyn Fn(&GroundAtom) -> Option<bool>>,
    /// Interpretation of placeholders; without it a placeholder is an error.
    pub valuation: Option<&'a Valuation>,
}

/// The result of a bounded expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub formula: PropFormula,
    /// Set when an equality guard pinned a quantified variable to a value
    /// outside the universe, so the bounded result may differ from the
    /// unbounded one.
    pub approximate: bool,
}

struct Expander<'a> {
    universe: &'a Universe,
    integers: Vec<PrecomputedTerm>,
    elements: Vec<PrecomputedTerm>,
    options: &'a FpropOptions<'a>,
    fold: bool,
    approximate: bool,
}

impl<'a> Expander<'a> {
    fn new(universe: &'a Universe, options: &'a FpropOptions<'a>) -> Self {
        Expander {
            universe,
            integers: universe.integers(),
            elements: universe.elements(),
            options,
            fold: options.fold || options.fixed.is_some(),
            approximate: false,
        }
    }

    fn constant(&self, c: &PrecomputedTerm) -> Result<PrecomputedTerm, Error> {
        if let Some(s) = c.as_symbol() {
            if let Some(v) = self.options.valuation.and_then(|val| val.get(s)) {
                return Ok(v.clone());
            }
            if self.universe.placeholders().contains(s) {
                return Err(Error::Placeholder(s.to_string()));
            }
        }
        Ok(c.clone())
    }

    fn term(&self, t: &FoTerm, env: &Env) -> Result<Option<PrecomputedTerm>, Error> {
        Ok(match t {
            FoTerm::Const(c) => Some(self.constant(c)?),
            FoTerm::Var(v) => Some(
                lookup(env, &v.name)
                    .cloned()
                    .ok_or_else(|| Error::IllFormed(format!("free variable {}", v.name)))?,
            ),
            FoTerm::Abs(inner) => self
                .term(inner, env)?
                .and_then(|x| x.as_numeral().map(|n| PrecomputedTerm::Numeral(n.abs()))),
            FoTerm::BinOp(op, l, r) => {
                let (Some(a), Some(b)) = (self.term(l, env)?, self.term(r, env)?) else {
                    return Ok(None);
                };
                let (Some(a), Some(b)) = (a.as_numeral(), b.as_numeral()) else {
                    return Ok(None);
                };
                Some(PrecomputedTerm::Numeral(match op {
                    FoOp::Add => a + b,
                    FoOp::Sub => a - b,
                    FoOp::Mul => a * b,
                }))
            }
        })
    }

    fn domain(&self, sort: Sort) -> &[PrecomputedTerm] {
        match sort {
            Sort::General => &self.elements,
            Sort::Integer => &self.integers,
        }
    }

    fn and(&self, parts: Vec<PropFormula>) -> PropFormula {
        if self.fold {
            fold_and(parts.into_iter())
        } else {
            PropFormula::conjoin(parts)
        }
    }

    fn expand(&mut self, f: &FoFormula, env: &mut Env) -> Result<PropFormula, Error> {
        match f {
            FoFormula::Atom(a) => {
                let mut args = Vec::with_capacity(a.args.len());
                for t in &a.args {
                    match self.term(t, env)? {
                        Some(v) => args.push(v),
                        None => return Ok(PropFormula::Bottom),
                    }
                }
                let atom = GroundAtom::new(a.predicate.name(), args);
                if let Some(fixed) = self.options.fixed {
                    match fixed(&atom) {
                        Some(true) => return Ok(PropFormula::Top),
                        Some(false) => return Ok(PropFormula::Bottom),
                        None => {}
                    }
                }
                Ok(PropFormula::Atom(atom))
            }
            FoFormula::Compare(l, rel, r) => {
                let holds = match (self.term(l, env)?, self.term(r, env)?) {
                    (Some(a), Some(b)) => rel.holds(&a, &b),
                    _ => false,
                };
                Ok(if holds { PropFormula::Top } else { PropFormula::Bottom })
            }
            FoFormula::Falsity => Ok(PropFormula::Bottom),
            FoFormula::And(fs) => {
                let mut parts = Vec::with_capacity(fs.len());
                for g in fs {
                    let p = self.expand(g, env)?;
                    if self.fold && p == PropFormula::Bottom {
                        return Ok(PropFormula::Bottom);
                    }
                    parts.push(p);
                }
                Ok(self.and(parts))
            }
            FoFormula::Or(fs) => {
                let mut parts = Vec::with_capacity(fs.len());
                for g in fs {
                    let p = self.expand(g, env)?;
                    if self.fold && p == PropFormula::Top {
                        return Ok(PropFormula::Top);
                    }
                    parts.push(p);
                }
                Ok(if self.fold {
                    fold_or(parts.into_iter())
                } else {
                    PropFormula::disjoin(parts)
                })
            }
            FoFormula::Implies(g, h) => {
                let a = self.expand(g, env)?;
                if self.fold && a == PropFormula::Bottom {
                    return Ok(PropFormula::Top);
                }
                let b = self.expand(h, env)?;
                Ok(if self.fold {
                    fold_implies(a, b)
                } else {
                    PropFormula::implies(a, b)
                })
            }
            FoFormula::Iff(g, h) => {
                let a = self.expand(g, env)?;
                let b = self.expand(h, env)?;
                Ok(if self.fold {
                    fold_and([fold_implies(a.clone(), b.clone()), fold_implies(b, a)].into_iter())
                } else {
                    PropFormula::And(vec![PropFormula::implies(a.clone(), b.clone()), PropFormula::implies(b, a)])
                })
            }
            FoFormula::Forall(vs, body) => self.quantify(true, vs, body, env),
            FoFormula::Exists(vs, body) => self.quantify(false, vs, body, env),
        }
    }

    /// Finds a top-level conjunct `X = t` of the guard part of `body` whose
    /// right side is already evaluable.
    fn find_guard<'f>(
        &self,
        universal: bool,
        remaining: &[Variable],
        body: &'f FoFormula,
        env: &Env,
    ) -> Option<(usize, &'f FoTerm)> {
        let guard = if universal {
            match body {
                FoFormula::Implies(a, g) if **g != FoFormula::Falsity || !a.is_top() => &**a,
                _ => return None,
            }
        } else {
            body
        };
        let conjuncts: &[FoFormula] = match guard {
            FoFormula::And(cs) => cs,
            other => std::slice::from_ref(other),
        };
        for c in conjuncts {
            let FoFormula::Compare(l, Relation::Eq, r) = c else {
                continue;
            };
            for (x, t) in [(l, r), (r, l)] {
                let FoTerm::Var(x) = x else { continue };
                let Some(i) = remaining.iter().position(|v| v.name == x.name) else {
                    continue;
                };
                let mut vs = Vec::new();
                t.collect_variables(&mut vs);
                let ready = vs
                    .iter()
                    .all(|v| !remaining.iter().any(|w| w.name == v.name) && lookup(env, &v.name).is_some());
                if ready {
                    return Some((i, t));
                }
            }
        }
        None
    }

    fn quantify(
        &mut self,
        universal: bool,
        vars: &[Variable],
        body: &FoFormula,
        env: &mut Env,
    ) -> Result<PropFormula, Error> {
        let Some(first) = vars.first() else {
            return self.expand(body, env);
        };
        if self.fold {
            if let Some((i, t)) = self.find_guard(universal, vars, body, env) {
                let x = vars[i].clone();
                let value = self.term(t, env)?;
                let in_domain = value.as_ref().is_some_and(|v| match x.sort {
                    Sort::Integer => v.is_numeral() && self.universe.contains(v),
                    Sort::General => self.universe.contains(v),
                });
                if !in_domain {
                    if let Some(v) = &value {
                        if x.sort == Sort::General || v.is_numeral() {
                            self.approximate = true;
                        }
                    }
                    return Ok(if universal { PropFormula::Top } else { PropFormula::Bottom });
                }
                let rest: Vec<Variable> = vars.iter().filter(|v| v.name != x.name).cloned().collect();
                env.push((x.name.clone(), value.unwrap()));
                let result = self.quantify(universal, &rest, body, env);
                env.pop();
                return result;
            }
        }
        let rest = &vars[1..];
        let domain: Vec<PrecomputedTerm> = self.domain(first.sort).to_vec();
        let mut parts = Vec::with_capacity(domain.len());
        for d in domain {
            env.push((first.name.clone(), d));
            let part = self.quantify(universal, rest, body, env);
            env.pop();
            let part = part?;
            if self.fold {
                match (&part, universal) {
                    (PropFormula::Bottom, true) => return Ok(PropFormula::Bottom),
                    (PropFormula::Top, false) => return Ok(PropFormula::Top),
                    (PropFormula::Top, true) | (PropFormula::Bottom, false) => continue,
                    _ => {}
                }
            }
            parts.push(part);
        }
        Ok(match (universal, self.fold) {
            (true, true) => fold_and(parts.into_iter()),
            (true, false) => PropFormula::conjoin(parts),
            (false, true) => fold_or(parts.into_iter()),
            (false, false) => PropFormula::disjoin(parts),
        })
    }
}

/// `F^prop` bounded by `u`: quantifiers become finite conjunctions and
/// disjunctions over the universe, comparisons become ⊤ or ⊥.
pub fn fprop(f: &FoFormula, u: &Universe) -> Result<PropFormula, Error> {
    Ok(fprop_with(f, u, &FpropOptions::default())?.formula)
}

/// [`fprop`] with folding, fixed atoms and placeholder interpretation.
pub fn fprop_with(f: &FoFormula, u: &Universe, options: &FpropOptions<'_>) -> Result<Expansion, Error> {
    let mut expander = Expander::new(u, options);
    let formula = expander.expand(f, &mut Vec::new())?;
    Ok(Expansion {
        formula,
        approximate: expander.approximate,
    })
}

/// Expands `f` under a partial assignment of its free variables.
pub(crate) fn fprop_in_env(
    f: &FoFormula,
    u: &Universe,
    options: &FpropOptions<'_>,
    env: &mut Env,
) -> Result<Expansion, Error> {
    let mut expander = Expander::new(u, options);
    let formula = expander.expand(f, env)?;
    Ok(Expansion {
        formula,
        approximate: expander.approximate,
    })
}
