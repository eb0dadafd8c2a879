//! Concrete syntax for programs (`.mg`), inputs (`.in`) and formulas (`.fo`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::Error;
use crate::fol::{FoFormula, FoOp, FoTerm, Sort, Variable};
use crate::syntax::{
    Atom, AtomSet, BinOp, BodyElement, Comparison, GroundAtom, Head, Input, IoProgram, Literal,
    Predicate, PrecomputedTerm, Program, Relation, Rule, Sign, Term, Valuation,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: Option<String>,
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{span}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: BTreeSet<String>,
}

fn expected_suffix(expected: &BTreeSet<String>) -> String {
    if expected.is_empty() {
        return String::new();
    }
    let items: Vec<String> = expected.iter().map(|e| format!("`{e}`")).collect();
    format!(", expected {}", items.join(" or "))
}

impl ParseError {
    /// Attaches a file name to the span.
    pub fn in_file(mut self, name: &str) -> Self {
        self.span.file = Some(name.to_string());
        self
    }
}

fn span_at(text: &str, start: usize, end: usize) -> SourceSpan {
    let before = &text[..start];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    SourceSpan {
        file: None,
        start,
        end,
        line,
        column,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    Num(BigInt),
    Directive(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Directive(d) => write!(f, "`#{d}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const PUNCT: [&str; 22] = [
    "<->", ":-", "..", "->", "!=", "<=", ">=", "(", ")", "{", "}", ",", ".", "|", "+", "-", "*",
    "/", "\\", "=", "<", ">",
];

struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let ident_end = |mut j: usize| {
        while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'%' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Num(text[start..i].parse().unwrap())
        } else if c.is_ascii_lowercase() {
            i = ident_end(i);
            Tok::Ident(text[start..i].to_string())
        } else if c.is_ascii_uppercase() {
            i = ident_end(i);
            Tok::Var(text[start..i].to_string())
        } else if c == b'#' && bytes.get(i + 1).is_some_and(u8::is_ascii_lowercase) {
            i = ident_end(i + 1);
            Tok::Directive(text[start + 1..i].to_string())
        } else if let Some(p) = PUNCT.iter().find(|p| text[i..].starts_with(**p)) {
            i += p.len();
            Tok::Punct(p)
        } else {
            let ch = text[i..].chars().next().unwrap();
            return Err(ParseError {
                span: span_at(text, i, i + ch.len_utf8()),
                message: format!("unexpected character `{ch}`"),
                expected: BTreeSet::new(),
            });
        };
        tokens.push(Token { tok, start, end: i });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        start: text.len(),
        end: text.len(),
    });
    Ok(tokens)
}

const KEYWORDS: [&str; 5] = ["not", "and", "or", "forall", "exists"];

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> PResult<Self> {
        Ok(Parser {
            text,
            tokens: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.tokens[(self.pos + k).min(self.tokens.len() - 1)].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn span_of(&self, index: usize) -> SourceSpan {
        let t = &self.tokens[index];
        span_at(self.text, t.start, t.end)
    }

    fn error_at(&self, index: usize, message: String) -> ParseError {
        ParseError {
            span: self.span_of(index),
            message,
            expected: BTreeSet::new(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let found = if *self.peek() == Tok::Eof {
            "unexpected end of input".to_string()
        } else {
            format!("unexpected {}", self.peek())
        };
        ParseError {
            span: self.span_of(self.pos),
            message: found,
            expected: expected.iter().map(|e| e.to_string()).collect(),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.unexpected(&[p]))
        }
    }

    fn name(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected(&[what])),
        }
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    // --- program terms

    fn term(&mut self) -> PResult<Term> {
        let left = self.additive()?;
        if self.eat("..") {
            let right = self.additive()?;
            if self.is_punct("..") {
                return Err(self.error_at(self.pos, "`..` is not associative; add parentheses".into()));
            }
            return Ok(Term::binop(BinOp::Interval, left, right));
        }
        Ok(left)
    }

    fn additive(&mut self) -> PResult<Term> {
        let mut left = self.multiplicative()?;
        loop {
            let op = if self.eat("+") {
                BinOp::Add
            } else if self.eat("-") {
                BinOp::Sub
            } else {
                return Ok(left);
            };
            let right = self.multiplicative()?;
            left = Term::binop(op, left, right);
        }
    }

    fn multiplicative(&mut self) -> PResult<Term> {
        let mut left = self.unary()?;
        loop {
            let op = if self.eat("*") {
                BinOp::Mul
            } else if self.eat("/") {
                BinOp::Div
            } else if self.eat("\\") {
                BinOp::Mod
            } else {
                return Ok(left);
            };
            let right = self.unary()?;
            left = Term::binop(op, left, right);
        }
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.eat("-") {
            let t = self.unary()?;
            return Ok(match t {
                Term::Precomputed(PrecomputedTerm::Numeral(n)) => Term::Precomputed(PrecomputedTerm::Numeral(-n)),
                t => Term::binop(BinOp::Sub, Term::int(0), t),
            });
        }
        self.primary_term()
    }

    fn primary_term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.advance();
                Ok(Term::Precomputed(PrecomputedTerm::Numeral(n)))
            }
            Tok::Var(v) => {
                self.advance();
                Ok(Term::Variable(v))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(Term::Precomputed(PrecomputedTerm::sym(&s)))
            }
            Tok::Punct("|") => {
                self.advance();
                let t = self.term()?;
                self.expect("|")?;
                Ok(Term::Abs(Box::new(t)))
            }
            Tok::Punct("(") => {
                self.advance();
                let t = self.term()?;
                self.expect(")")?;
                Ok(t)
            }
            _ => Err(self.unexpected(&["term"])),
        }
    }

    fn relation(&mut self) -> Option<Relation> {
        let rel = match self.peek() {
            Tok::Punct("=") => Relation::Eq,
            Tok::Punct("!=") => Relation::Ne,
            Tok::Punct("<") => Relation::Lt,
            Tok::Punct(">") => Relation::Gt,
            Tok::Punct("<=") => Relation::Le,
            Tok::Punct(">=") => Relation::Ge,
            _ => return None,
        };
        self.advance();
        Some(rel)
    }

    fn atom(&mut self) -> PResult<Atom> {
        let name = self.name("predicate name")?;
        let mut args = Vec::new();
        if self.eat("(") {
            loop {
                args.push(self.term()?);
                if self.eat(")") {
                    break;
                }
                if !self.eat(",") {
                    return Err(self.unexpected(&[",", ")"]));
                }
            }
        }
        Ok(Atom::new(&name, args))
    }

    fn body_element(&mut self) -> PResult<BodyElement> {
        if self.is_keyword("not") {
            self.advance();
            let sign = if self.is_keyword("not") {
                self.advance();
                Sign::DoubleNegative
            } else {
                Sign::Negative
            };
            return Ok(BodyElement::Literal(Literal {
                sign,
                atom: self.atom()?,
            }));
        }
        let is_atom = matches!(self.peek(), Tok::Ident(_))
            && matches!(self.peek_at(1), Tok::Punct("(" | "," | ".") | Tok::Eof);
        if is_atom {
            return Ok(BodyElement::Literal(Literal::positive(self.atom()?)));
        }
        let left = self.term()?;
        let Some(relation) = self.relation() else {
            return Err(self.unexpected(&["=", "!=", "<", ">", "<=", ">="]));
        };
        let right = self.term()?;
        Ok(BodyElement::Comparison(Comparison { left, relation, right }))
    }

    fn rule(&mut self) -> PResult<Rule> {
        let head = if self.is_punct(":-") {
            Head::Constraint
        } else if self.eat("{") {
            let a = self.atom()?;
            self.expect("}")?;
            Head::Choice(a)
        } else {
            Head::Basic(self.atom()?)
        };
        let mut body = Vec::new();
        if self.eat(":-") && !self.is_punct(".") {
            loop {
                body.push(self.body_element()?);
                if !self.eat(",") {
                    break;
                }
            }
        } else if head == Head::Constraint {
            return Err(self.unexpected(&[":-"]));
        }
        if !self.eat(".") {
            let mut expected = vec!["."];
            if body.is_empty() {
                expected.push(":-");
            } else {
                expected.push(",");
            }
            return Err(self.unexpected(&expected));
        }
        Ok(Rule { head, body })
    }

    fn predicate(&mut self) -> PResult<Predicate> {
        let name = self.name("predicate name")?;
        self.expect("/")?;
        match self.advance() {
            Tok::Num(n) => {
                let arity = usize::try_from(n).map_err(|_| self.error_at(self.pos - 1, "arity is too large".into()))?;
                Ok(Predicate::new(&name, arity))
            }
            _ => Err(ParseError {
                expected: BTreeSet::from(["arity".to_string()]),
                ..self.error_at(self.pos.saturating_sub(1), "expected an arity".into())
            }),
        }
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut items = vec![item(self)?];
        while self.eat(",") {
            items.push(item(self)?);
        }
        self.expect(".")?;
        Ok(items)
    }

    // --- formulas

    fn fo_term(&mut self, scope: &Scope) -> PResult<FoTerm> {
        let start = self.pos;
        let t = self.fo_additive(scope)?;
        if self.is_punct("..") || self.is_punct("/") || self.is_punct("\\") {
            return Err(self.error_at(self.pos, "only `+`, `-`, `*` and `|t|` are allowed in formulas".into()));
        }
        t.check_sorts().map_err(|m| self.error_at(start, format!("ill-sorted term: {m}")))?;
        Ok(t)
    }

    fn fo_additive(&mut self, scope: &Scope) -> PResult<FoTerm> {
        let mut left = self.fo_multiplicative(scope)?;
        loop {
            let op = if self.eat("+") {
                FoOp::Add
            } else if self.eat("-") {
                FoOp::Sub
            } else {
                return Ok(left);
            };
            let right = self.fo_multiplicative(scope)?;
            left = FoTerm::binop(op, left, right);
        }
    }

    fn fo_multiplicative(&mut self, scope: &Scope) -> PResult<FoTerm> {
        let mut left = self.fo_unary(scope)?;
        while self.eat("*") {
            let right = self.fo_unary(scope)?;
            left = FoTerm::binop(FoOp::Mul, left, right);
        }
        Ok(left)
    }

    fn fo_unary(&mut self, scope: &Scope) -> PResult<FoTerm> {
        if self.eat("-") {
            let t = self.fo_unary(scope)?;
            return Ok(match t {
                FoTerm::Const(PrecomputedTerm::Numeral(n)) => FoTerm::Const(PrecomputedTerm::Numeral(-n)),
                t => FoTerm::neg(t),
            });
        }
        match self.peek().clone() {
            Tok::Num(n) => {
                self.advance();
                Ok(FoTerm::Const(PrecomputedTerm::Numeral(n)))
            }
            Tok::Var(v) => {
                if !scope.bound.iter().any(|b| b == &v) {
                    return Err(self.error_at(self.pos, format!("variable `{v}` is not bound by a quantifier")));
                }
                self.advance();
                let sort = if scope.integers.contains(&v) {
                    Sort::Integer
                } else {
                    Sort::General
                };
                Ok(FoTerm::Var(Variable { name: v, sort }))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(FoTerm::Const(PrecomputedTerm::sym(&s)))
            }
            Tok::Punct("|") => {
                self.advance();
                let t = self.fo_additive(scope)?;
                self.expect("|")?;
                Ok(FoTerm::abs(t))
            }
            Tok::Punct("(") => {
                self.advance();
                let t = self.fo_additive(scope)?;
                self.expect(")")?;
                Ok(t)
            }
            _ => Err(self.unexpected(&["term"])),
        }
    }

    fn formula(&mut self, scope: &mut Scope) -> PResult<FoFormula> {
        let left = self.implication(scope)?;
        if self.eat("<->") {
            let right = self.implication(scope)?;
            if self.is_punct("<->") {
                return Err(self.error_at(self.pos, "`<->` is not associative; add parentheses".into()));
            }
            return Ok(FoFormula::iff(left, right));
        }
        Ok(left)
    }

    fn implication(&mut self, scope: &mut Scope) -> PResult<FoFormula> {
        let left = self.disjunction(scope)?;
        if self.eat("->") {
            let right = self.implication(scope)?;
            return Ok(FoFormula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self, scope: &mut Scope) -> PResult<FoFormula> {
        let mut parts = vec![self.conjunction(scope)?];
        while self.is_keyword("or") {
            self.advance();
            parts.push(self.conjunction(scope)?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            FoFormula::Or(parts)
        })
    }

    fn conjunction(&mut self, scope: &mut Scope) -> PResult<FoFormula> {
        let mut parts = vec![self.unary_formula(scope)?];
        while self.is_keyword("and") {
            self.advance();
            parts.push(self.unary_formula(scope)?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            FoFormula::And(parts)
        })
    }

    fn unary_formula(&mut self, scope: &mut Scope) -> PResult<FoFormula> {
        if self.is_keyword("not") {
            self.advance();
            return Ok(FoFormula::not(self.unary_formula(scope)?));
        }
        if self.is_keyword("forall") || self.is_keyword("exists") {
            let universal = self.is_keyword("forall");
            self.advance();
            let mut vars = Vec::new();
            while let Tok::Var(v) = self.peek().clone() {
                self.advance();
                let sort = if scope.integers.contains(&v) {
                    Sort::Integer
                } else {
                    Sort::General
                };
                vars.push(Variable { name: v, sort });
            }
            if vars.is_empty() {
                return Err(self.unexpected(&["variable"]));
            }
            let mark = scope.bound.len();
            scope.bound.extend(vars.iter().map(|v| v.name.clone()));
            let body = self.unary_formula(scope);
            scope.bound.truncate(mark);
            let body = Box::new(body?);
            return Ok(if universal {
                FoFormula::Forall(vars, body)
            } else {
                FoFormula::Exists(vars, body)
            });
        }
        match self.peek().clone() {
            Tok::Directive(d) if d == "top" || d == "true" => {
                self.advance();
                return Ok(FoFormula::top());
            }
            Tok::Directive(d) if d == "false" => {
                self.advance();
                return Ok(FoFormula::Falsity);
            }
            _ => {}
        }
        let is_atom = matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
            && (matches!(self.peek_at(1), Tok::Punct("("))
                || self.relation_at(1).is_none() && !self.term_operator_at(1));
        if is_atom {
            let name = self.name("predicate name")?;
            let mut args = Vec::new();
            if self.eat("(") {
                loop {
                    args.push(self.fo_term(scope)?);
                    if self.eat(")") {
                        break;
                    }
                    if !self.eat(",") {
                        return Err(self.unexpected(&[",", ")"]));
                    }
                }
            }
            return Ok(FoFormula::atom(&name, args));
        }
        if self.is_punct("(") {
            let start = self.pos;
            match self.comparison(scope) {
                Ok(c) => return Ok(c),
                Err(as_comparison) => {
                    self.pos = start;
                    self.advance();
                    match self.formula(scope).and_then(|f| self.expect(")").map(|_| f)) {
                        Ok(f) => return Ok(f),
                        Err(as_formula) => {
                            return Err(if as_formula.span.start >= as_comparison.span.start {
                                as_formula
                            } else {
                                as_comparison
                            })
                        }
                    }
                }
            }
        }
        self.comparison(scope)
    }

    fn relation_at(&self, k: usize) -> Option<()> {
        matches!(self.peek_at(k), Tok::Punct("=" | "!=" | "<" | ">" | "<=" | ">=")).then_some(())
    }

    fn term_operator_at(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Tok::Punct("+" | "-" | "*"))
    }

    fn comparison(&mut self, scope: &Scope) -> PResult<FoFormula> {
        let left = self.fo_term(scope)?;
        let Some(rel) = self.relation() else {
            return Err(self.unexpected(&["=", "!=", "<", ">", "<=", ">="]));
        };
        let right = self.fo_term(scope)?;
        Ok(FoFormula::Compare(left, rel, right))
    }
}

#[derive(Default)]
struct Scope {
    integers: BTreeSet<String>,
    bound: Vec<String>,
}

/// Parses rules without any declarations.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let io = parse_io_program(text)?;
    Ok(io.program().clone())
}

/// Parses rules together with `#placeholder`, `#input` and `#output` declarations.
pub fn parse_io_program(text: &str) -> Result<IoProgram, ParseError> {
    let mut p = Parser::new(text)?;
    let mut rules = Vec::new();
    let mut head_positions = Vec::new();
    let mut placeholders = BTreeSet::new();
    let mut inputs = BTreeSet::new();
    let mut outputs = BTreeSet::new();
    let mut input_decl = BTreeMap::new();
    while !p.at_eof() {
        match p.peek().clone() {
            Tok::Directive(d) => {
                let at = p.pos;
                p.advance();
                match d.as_str() {
                    "placeholder" => placeholders.extend(p.list(|p| p.name("constant"))?),
                    "input" => {
                        for pred in p.list(Parser::predicate)? {
                            input_decl.entry(pred.clone()).or_insert(at);
                            inputs.insert(pred);
                        }
                    }
                    "output" => outputs.extend(p.list(Parser::predicate)?),
                    _ => {
                        return Err(ParseError {
                            expected: ["#placeholder", "#input", "#output"].map(String::from).into(),
                            ..p.error_at(at, format!("unknown directive `#{d}`"))
                        })
                    }
                }
            }
            _ => {
                let at = p.pos;
                rules.push(p.rule()?);
                head_positions.push(at);
            }
        }
    }
    for (rule, &at) in rules.iter().zip(&head_positions) {
        if let Some(a) = rule.head.atom() {
            let offset = if matches!(rule.head, Head::Choice(_)) { 1 } else { 0 };
            if inputs.contains(&a.symbol()) {
                return Err(p.error_at(
                    at + offset,
                    format!("input symbol {} occurs in the head of `{rule}`", a.symbol()),
                ));
            }
        }
        for pred in rule.predicates() {
            if placeholders.contains(&pred.name) {
                return Err(p.error_at(at, format!("placeholder `{}` is used as a predicate name", pred.name)));
            }
        }
    }
    if let Some(pred) = inputs.intersection(&outputs).next() {
        return Err(p.error_at(input_decl[pred], format!("{pred} is declared both as input and as output")));
    }
    IoProgram::new(Program::new(rules), placeholders, inputs, outputs)
        .map_err(|e| p.error_at(0, e.to_string()))
}

/// Parses an input file: `#let c = t.` lines and precomputed facts.
pub fn parse_input(text: &str, io: &IoProgram) -> Result<Input, Error> {
    let mut p = Parser::new(text)?;
    let mut valuation = Valuation::new();
    let mut atoms = AtomSet::new();
    while !p.at_eof() {
        let at = p.pos;
        if let Tok::Directive(d) = p.peek().clone() {
            if d != "let" {
                return Err(p.error_at(at, format!("unknown directive `#{d}` in an input")).into());
            }
            p.advance();
            let name = p.name("placeholder")?;
            p.expect("=")?;
            let t_at = p.pos;
            let value = precomputed(&p.term()?).ok_or_else(|| p.error_at(t_at, "value must be a precomputed term".into()))?;
            p.expect(".")?;
            if valuation.insert(name.clone(), value).is_some() {
                return Err(p.error_at(at, format!("placeholder `{name}` is given two values")).into());
            }
            continue;
        }
        let rule = p.rule()?;
        let fact = match (&rule.head, rule.body.is_empty()) {
            (Head::Basic(a), true) => a.as_ground(),
            _ => None,
        };
        match fact {
            Some(a) => {
                atoms.insert(a);
            }
            None => return Err(p.error_at(at, format!("`{rule}` is not a precomputed fact")).into()),
        }
    }
    Input::new(io, valuation, atoms)
}

fn precomputed(t: &Term) -> Option<PrecomputedTerm> {
    t.as_precomputed().cloned()
}

/// Parses a single term.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    if !p.at_eof() {
        return Err(p.unexpected(&["end of input"]));
    }
    Ok(t)
}

/// Parses a precomputed atom such as `in(alice,hall,0)`, with an optional final period.
pub fn parse_ground_atom(text: &str) -> Result<GroundAtom, ParseError> {
    let mut p = Parser::new(text)?;
    let a = p.atom()?;
    p.eat(".");
    if !p.at_eof() {
        return Err(p.unexpected(&["end of input"]));
    }
    a.as_ground().ok_or_else(|| p.error_at(0, format!("`{a}` is not a precomputed atom")))
}

/// Parses a sequence of closed formulas separated by periods. `#int X, Y.`
/// declarations make the listed variable names integer-sorted throughout.
pub fn parse_formulas(text: &str) -> Result<Vec<FoFormula>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut scope = Scope::default();
    let mut out = Vec::new();
    while !p.at_eof() {
        if let Tok::Directive(d) = p.peek().clone() {
            if d == "int" {
                p.advance();
                let names = p.list(|p| match p.advance() {
                    Tok::Var(v) => Ok(v),
                    _ => {
                        p.pos -= 1;
                        Err(p.unexpected(&["variable"]))
                    }
                })?;
                scope.integers.extend(names);
                continue;
            }
        }
        out.push(p.formula(&mut scope)?);
        if !p.eat(".") && !p.at_eof() {
            return Err(p.unexpected(&[".", "end of input"]));
        }
    }
    Ok(out)
}

/// Parses exactly one closed formula.
pub fn parse_formula(text: &str) -> Result<FoFormula, ParseError> {
    let mut fs = parse_formulas(text)?;
    match fs.len() {
        1 => Ok(fs.pop().unwrap()),
        n => Err(ParseError {
            span: span_at(text, 0, text.len()),
            message: format!("expected one formula, found {n}"),
            expected: BTreeSet::new(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{complete, tau_star};

    #[test]
    fn choice_rule() {
        let prog = parse_program("{in(P,R,T+1)} :- in(P,R,T), T = 0..h-1.").unwrap();
        assert_eq!(prog.rules().len(), 1);
        let r = &prog.rules()[0];
        assert!(matches!(r.head, Head::Choice(_)));
        assert_eq!(r.to_string(), "{in(P,R,T+1)} :- in(P,R,T), T = 0..h-1.");
        let BodyElement::Comparison(c) = &r.body[1] else { panic!() };
        assert_eq!(
            c.right,
            Term::binop(
                BinOp::Interval,
                Term::int(0),
                Term::binop(BinOp::Sub, Term::sym("h"), Term::int(1))
            )
        );
    }

    #[test]
    fn constraint_and_literals() {
        let prog = parse_program(":- p.").unwrap();
        assert_eq!(prog.rules()[0].head, Head::Constraint);
        assert_eq!(
            prog.rules()[0].body,
            vec![BodyElement::Literal(Literal::positive(Atom::new("p", vec![])))]
        );
        let prog = parse_program("a :- not b, not not c. % comment\nd.").unwrap();
        assert_eq!(prog.to_string(), "a :- not b, not not c.\nd.\n");
    }

    #[test]
    fn error_at_end_of_input() {
        let text = "q(X) :- p(X";
        let e = parse_program(text).unwrap_err();
        assert_eq!(e.span.start, text.len());
        assert!(e.expected.contains(")"));
        assert_eq!(e.span.line, 1);
        assert_eq!(e.span.column, 12);
    }

    #[test]
    fn negative_numerals_fold() {
        assert_eq!(parse_term("-3").unwrap(), Term::int(-3));
        assert_eq!(parse_term("2*-3").unwrap().to_string(), "2*(-3)");
        assert_eq!(parse_term("-X").unwrap().to_string(), "0-X");
        assert!(parse_term("1..2..3").is_err());
        assert_eq!(parse_term("7/2/2").unwrap().to_string(), "7/2/2");
        assert_eq!(parse_term("7/(2/2)").unwrap().to_string(), "7/(2/2)");
    }

    #[test]
    fn input_symbols_in_heads_are_rejected() {
        let e = parse_io_program("#input p/1.\np(1).").unwrap_err();
        assert!(e.message.contains("p/1"));
        assert_eq!(e.span.line, 2);
    }

    #[test]
    fn inputs() {
        let io = parse_io_program("#placeholder h.\n#input person/1.\n#output q/1.\nq(X) :- person(X).").unwrap();
        let input = parse_input("#let h = 2.\nperson(alice).", &io).unwrap();
        assert_eq!(input.valuation["h"], PrecomputedTerm::int(2));
        assert_eq!(input.atoms.len(), 1);
        assert_eq!(parse_input("", &io).unwrap(), Input::default());
        assert!(parse_input("q(alice).", &io).is_err());
        assert!(parse_input("person(X).", &io).is_err());
        assert!(parse_input("person(h).", &io).is_err());
    }

    #[test]
    fn formulas() {
        let f = parse_formula("forall P R (in0(P,R) -> person(P))").unwrap();
        assert_eq!(f.to_string(), "∀P R (in0(P,R) → person(P))");
        assert_eq!(parse_formula("#top").unwrap(), FoFormula::top());
        assert!(parse_formula("p(X)").is_err());
        assert!(parse_formula("forall X (X + 1 = 2)").is_err());
        let g = parse_formula("#int N. exists N (N + 1 = 2 and q(N))").unwrap();
        assert_eq!(g.to_string(), "∃N (N+1 = 2 ∧ q(N))");
        let h = parse_formula("forall X ((X = a) -> p(X))").unwrap();
        assert_eq!(h.to_ascii(), "forall X (X = a -> p(X))");
        assert_eq!(parse_formulas("p. q.").unwrap().len(), 2);
    }

    #[test]
    fn completion_round_trips() {
        let prog = parse_program(
            "p(a). p(b). q(X,Y) :- p(X), p(Y).\nr(X/2, |X|) :- p(X), X = 1..3, not s(X+(-1)).\n{s(X\\2)} :- p(X).\n:- r(X,Y), X != Y.",
        )
        .unwrap();
        for f in tau_star(&prog).sentences().into_iter().chain([complete(&tau_star(&prog))]) {
            let text = f.to_ascii();
            let g = parse_formula(&text).unwrap();
            assert_eq!(g, f, "{text}");
        }
    }

    #[test]
    fn lexer_errors_have_spans() {
        let e = parse_program("p :- q ? r.").unwrap_err();
        assert_eq!(e.span.start, 7);
        assert_eq!(e.span.end, 8);
    }
}
