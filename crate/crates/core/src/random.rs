//! Seeded generators of small programs, rules and completable sets for
//! property checks.
//!
//! Arithmetic in generated programs stays inside the universe `{a, 0..2}`,
//! so bounded grounding and bounded evaluation of the translation agree.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fol::{CompletableMember, CompletableSet, Consequent, FoFormula, FoTerm, Variable};
use crate::ground::Universe;
use crate::syntax::{
    Atom, AtomSet, BinOp, BodyElement, Comparison, GroundAtom, Head, Input, IoProgram, Literal,
    PrecomputedTerm, Predicate, Program, Relation, Rule, Sign, Term, Valuation,
};

pub type Generator = ChaCha8Rng;

pub fn generator(seed: u64) -> Generator {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The universe that generated programs are closed under.
pub fn program_universe() -> Universe {
    Universe::new(["a"], 0, 2)
}

const VARS: [&str; 2] = ["X", "Y"];

fn constant(rng: &mut impl Rng) -> Term {
    match rng.gen_range(0..4) {
        3 => Term::sym("a"),
        n => Term::int(n),
    }
}

fn term(rng: &mut impl Rng, vars: &[&str]) -> Term {
    let v = || Term::var(vars[0]);
    match rng.gen_range(0..10) {
        0..=3 => Term::var(vars.choose(rng).unwrap()),
        4 | 5 => constant(rng),
        6 => Term::binop(BinOp::Div, Term::var(vars.choose(rng).unwrap()), Term::int(2)),
        7 => Term::binop(BinOp::Mod, v(), Term::int(2)),
        8 => Term::Abs(Box::new(v())),
        _ => {
            if rng.gen_bool(0.5) {
                Term::binop(BinOp::Interval, Term::int(0), Term::var(vars.choose(rng).unwrap()))
            } else {
                Term::binop(BinOp::Interval, Term::int(1), Term::int(2))
            }
        }
    }
}

fn atom(rng: &mut impl Rng, vars: &[&str]) -> Atom {
    match rng.gen_range(0..5) {
        0 => Atom::new("r", vec![]),
        1 | 2 => Atom::new("p", vec![term(rng, vars)]),
        _ => Atom::new("q", vec![term(rng, vars)]),
    }
}

fn body_element(rng: &mut impl Rng, vars: &[&str]) -> BodyElement {
    if rng.gen_range(0..5) == 0 {
        let relation = *[Relation::Eq, Relation::Ne, Relation::Lt, Relation::Le]
            .choose(rng)
            .unwrap();
        return BodyElement::Comparison(Comparison {
            left: term(rng, vars),
            relation,
            right: term(rng, vars),
        });
    }
    let sign = match rng.gen_range(0..6) {
        0..=2 => Sign::Positive,
        3 | 4 => Sign::Negative,
        _ => Sign::DoubleNegative,
    };
    BodyElement::Literal(Literal {
        sign,
        atom: atom(rng, vars),
    })
}

/// A rule with at most two variables and at most three body elements.
pub fn random_rule(rng: &mut impl Rng) -> Rule {
    let vars: &[&str] = if rng.gen_bool(0.5) { &VARS[..1] } else { &VARS };
    let head = match rng.gen_range(0..6) {
        0..=2 => Head::Basic(atom(rng, vars)),
        3 | 4 => Head::Choice(atom(rng, vars)),
        _ => Head::Constraint,
    };
    let body = (0..rng.gen_range(0..=3)).map(|_| body_element(rng, vars)).collect();
    Rule { head, body }
}

/// A program of one to three random rules.
pub fn random_program(rng: &mut impl Rng) -> Program {
    let n = rng.gen_range(1..=3);
    Program::new((0..n).map(|_| random_rule(rng)).collect())
}

fn ground(rng: &mut impl Rng, name: &str) -> FoFormula {
    FoFormula::atom(name, vec![FoTerm::int(rng.gen_range(0..3))])
}

fn ground_body(rng: &mut impl Rng, depth: u32) -> FoFormula {
    let leaf = |rng: &mut dyn rand::RngCore| -> FoFormula {
        let name = if rng.gen_bool(0.6) { "p" } else { "q" };
        let mut f = FoFormula::atom(name, vec![FoTerm::int(rng.gen_range(0..3))]);
        if rng.gen_bool(0.3) {
            f = FoFormula::not(f);
        }
        f
    };
    if depth == 0 || rng.gen_bool(0.4) {
        return leaf(rng);
    }
    let l = ground_body(rng, depth - 1);
    let r = ground_body(rng, depth - 1);
    match rng.gen_range(0..4) {
        0 | 1 => FoFormula::And(vec![l, r]),
        2 => FoFormula::Or(vec![l, r]),
        _ => FoFormula::implies(l, r),
    }
}

/// A completable set over the intensional `p/1` and extensional `q/1`,
/// with quantifiers ranging over `{0, 1, 2}`, so that at most six atoms occur.
pub fn random_completable_set(rng: &mut impl Rng) -> CompletableSet {
    let v = Variable::general("V");
    let n = rng.gen_range(1..=3);
    let mut members = Vec::new();
    for _ in 0..n {
        let mut antecedent = if rng.gen_bool(0.2) {
            FoFormula::top()
        } else {
            ground_body(rng, 2)
        };
        if rng.gen_bool(0.15) {
            members.push(CompletableMember {
                vars: vec![],
                antecedent,
                consequent: Consequent::Formula(if rng.gen_bool(0.5) {
                    FoFormula::Falsity
                } else {
                    ground(rng, "q")
                }),
            });
            continue;
        }
        let guard = if rng.gen_bool(0.8) {
            FoFormula::eq(FoTerm::var(&v), FoTerm::int(rng.gen_range(0..3)))
        } else {
            FoFormula::atom("q", vec![FoTerm::var(&v)])
        };
        if rng.gen_bool(0.3) {
            let own = FoFormula::atom("p", vec![FoTerm::var(&v)]);
            antecedent = FoFormula::And(vec![antecedent, own]);
        }
        members.push(CompletableMember {
            vars: vec![v.clone()],
            antecedent: FoFormula::And(vec![guard, antecedent]),
            consequent: Consequent::Head {
                predicate: "p".into(),
                args: vec![v.clone()],
            },
        });
    }
    let intensional: BTreeSet<Predicate> = [Predicate::new("p", 1)].into();
    CompletableSet::new(members, intensional).expect("generated members are completable")
}

/// The universe of [`random_completable_set`].
pub fn completable_universe() -> Universe {
    Universe::new([], 0, 2)
}

/// A random subset of the six atoms `p(0..2)`, `q(0..2)`.
pub fn random_interpretation(rng: &mut impl Rng) -> AtomSet {
    let mut out = AtomSet::new();
    for name in ["p", "q"] {
        for i in 0..3 {
            if rng.gen_bool(0.5) {
                out.insert(GroundAtom::new(name, vec![PrecomputedTerm::int(i)]));
            }
        }
    }
    out
}

/// A tight io-program with input `s/1` and output `p/1`, `t/1`, where `p`
/// depends only on `s`, `t` only on `s` and `p`, and the private `r/1` on `s`, `p` and `t`.
pub fn random_tight_program(rng: &mut impl Rng) -> IoProgram {
    let layers: [(&str, &[&str]); 3] = [("p", &["s"]), ("t", &["s", "p"]), ("r", &["s", "p", "t"])];
    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let (head, below) = layers.choose(rng).unwrap();
        let vars: &[&str] = &VARS[..1];
        let mut body = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            let name = below.choose(rng).unwrap();
            let a = Atom::new(name, vec![term(rng, vars)]);
            let literal = match rng.gen_range(0..4) {
                0 | 1 => Literal::positive(a),
                _ => Literal::negative(a),
            };
            body.push(BodyElement::Literal(literal));
        }
        for _ in 0..rng.gen_range(0..=1) {
            let own = layers.iter().map(|(n, _)| *n).collect::<Vec<_>>();
            body.push(BodyElement::Literal(Literal::negative(Atom::new(
                own.choose(rng).unwrap(),
                vec![term(rng, vars)],
            ))));
        }
        let head_atom = Atom::new(head, vec![term(rng, vars)]);
        let head = if rng.gen_bool(0.3) {
            Head::Choice(head_atom)
        } else {
            Head::Basic(head_atom)
        };
        rules.push(Rule { head, body });
    }
    IoProgram::new(
        Program::new(rules),
        BTreeSet::new(),
        [Predicate::new("s", 1)].into(),
        [Predicate::new("p", 1), Predicate::new("t", 1)].into(),
    )
    .expect("generated io-program is well formed")
}

/// A random input for [`random_tight_program`].
pub fn random_tight_input(rng: &mut impl Rng, io: &IoProgram) -> Input {
    let mut atoms = AtomSet::new();
    for c in [PrecomputedTerm::int(0), PrecomputedTerm::int(1), PrecomputedTerm::int(2), PrecomputedTerm::sym("a")] {
        if rng.gen_bool(0.5) {
            atoms.insert(GroundAtom::new("s", vec![c]));
        }
    }
    Input::new(io, Valuation::new(), atoms).expect("generated input is valid")
}
