//! Value sets of ground terms.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::syntax::{BinOp, PrecomputedTerm, Relation, Term};

/// The finite set `[t]` of precomputed terms a ground term denotes.
pub type ValueSet = BTreeSet<PrecomputedTerm>;

/// The quotient `n / d` truncated toward zero. `d` must be nonzero.
pub fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    // BigInt division already truncates toward zero.
    n / d
}

/// The remainder matching [`round_div`]: `n - d * round_div(n, d)`.
pub fn round_mod(n: &BigInt, d: &BigInt) -> BigInt {
    n - d * round_div(n, d)
}

fn numerals(values: &ValueSet) -> impl Iterator<Item = &BigInt> {
    values.iter().filter_map(PrecomputedTerm::as_numeral)
}

fn combine(
    left: &ValueSet,
    right: &ValueSet,
    op: impl Fn(&BigInt, &BigInt) -> Option<BigInt>,
) -> ValueSet {
    let mut out = ValueSet::new();
    for n1 in numerals(left) {
        for n2 in numerals(right) {
            if let Some(n) = op(n1, n2) {
                out.insert(PrecomputedTerm::Numeral(n));
            }
        }
    }
    out
}

/// Computes `[t]`. Variables have no value, so a non-ground term denotes
/// the empty set.
pub fn eval_term(t: &Term) -> ValueSet {
    match t {
        Term::Precomputed(p) => ValueSet::from([p.clone()]),
        Term::Variable(_) => ValueSet::new(),
        Term::Abs(inner) => numerals(&eval_term(inner))
            .map(|n| PrecomputedTerm::Numeral(n.abs()))
            .collect(),
        Term::BinOp(op, l, r) => {
            let left = eval_term(l);
            let right = eval_term(r);
            match op {
                BinOp::Add => combine(&left, &right, |a, b| Some(a + b)),
                BinOp::Sub => combine(&left, &right, |a, b| Some(a - b)),
                BinOp::Mul => combine(&left, &right, |a, b| Some(a * b)),
                BinOp::Div => {
                    combine(&left, &right, |a, b| (!b.is_zero()).then(|| round_div(a, b)))
                }
                BinOp::Mod => {
                    combine(&left, &right, |a, b| (!b.is_zero()).then(|| round_mod(a, b)))
                }
                BinOp::Interval => {
                    let mut out = ValueSet::new();
                    for lo in numerals(&left) {
                        for hi in numerals(&right) {
                            let mut k = lo.clone();
                            while &k <= hi {
                                out.insert(PrecomputedTerm::Numeral(k.clone()));
                                k += 1u32;
                            }
                        }
                    }
                    out
                }
            }
        }
    }
}

/// The set of tuples `[t1] × … × [tn]`, in lexicographic order.
pub fn eval_tuple(ts: &[Term]) -> BTreeSet<Vec<PrecomputedTerm>> {
    let mut tuples: BTreeSet<Vec<PrecomputedTerm>> = BTreeSet::from([Vec::new()]);
    for t in ts {
        let values = eval_term(t);
        if values.is_empty() {
            return BTreeSet::new();
        }
        tuples = tuples
            .iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut tuple = prefix.clone();
                    tuple.push(v.clone());
                    tuple
                })
            })
            .collect();
    }
    tuples
}

/// Whether `rel` holds between `left` and `right` in the total order on precomputed terms.
pub fn holds(rel: Relation, left: &PrecomputedTerm, right: &PrecomputedTerm) -> bool {
    rel.holds(left, right)
}

/// Whether `rel` holds between some value of `left` and some value of `right`.
pub fn holds_for_some(rel: Relation, left: &Term, right: &Term) -> bool {
    let lv = eval_term(left);
    let rv = eval_term(right);
    lv.iter().any(|a| rv.iter().any(|b| rel.holds(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(ns: &[i64]) -> ValueSet {
        ns.iter().map(|&n| PrecomputedTerm::int(n)).collect()
    }

    fn op(o: BinOp, l: Term, r: Term) -> Term {
        Term::binop(o, l, r)
    }

    #[test]
    fn displayed_values() {
        assert_eq!(eval_term(&op(BinOp::Div, Term::int(7), Term::int(2))), ints(&[3]));
        assert_eq!(eval_term(&op(BinOp::Interval, Term::int(0), Term::int(2))), ints(&[0, 1, 2]));
        assert!(eval_term(&op(BinOp::Div, Term::int(2), Term::int(0))).is_empty());
        assert!(eval_term(&op(BinOp::Interval, Term::int(2), Term::int(0))).is_empty());
        assert!(eval_term(&op(BinOp::Add, Term::int(2), Term::sym("c"))).is_empty());
        assert!(eval_term(&op(BinOp::Interval, Term::int(2), Term::sym("c"))).is_empty());
        assert_eq!(eval_term(&Term::sym("c")), ValueSet::from([PrecomputedTerm::sym("c")]));
    }

    #[test]
    fn division_truncates_toward_zero() {
        assert_eq!(eval_term(&op(BinOp::Div, Term::int(-7), Term::int(2))), ints(&[-3]));
        assert_eq!(eval_term(&op(BinOp::Mod, Term::int(-7), Term::int(2))), ints(&[-1]));
        assert_eq!(eval_term(&op(BinOp::Div, Term::int(0), Term::int(5))), ints(&[0]));
        assert_eq!(eval_term(&op(BinOp::Mod, Term::int(7), Term::int(-2))), ints(&[1]));
    }

    #[test]
    fn interval_operands_take_union_over_pairs() {
        let t = op(
            BinOp::Interval,
            op(BinOp::Interval, Term::int(0), Term::int(1)),
            op(BinOp::Interval, Term::int(1), Term::int(3)),
        );
        assert_eq!(eval_term(&t), ints(&[0, 1, 2, 3]));
        let abs = Term::Abs(Box::new(op(BinOp::Interval, Term::int(-2), Term::int(1))));
        assert_eq!(eval_term(&abs), ints(&[0, 1, 2]));
    }

    #[test]
    fn tuples() {
        let t = eval_tuple(&[op(BinOp::Interval, Term::int(0), Term::int(1)), Term::sym("a")]);
        let expected: BTreeSet<_> = [0, 1]
            .into_iter()
            .map(|n| vec![PrecomputedTerm::int(n), PrecomputedTerm::sym("a")])
            .collect();
        assert_eq!(t, expected);
        assert_eq!(eval_tuple(&[]), BTreeSet::from([vec![]]));
        assert!(eval_tuple(&[op(BinOp::Div, Term::int(2), Term::int(0)), Term::sym("a")]).is_empty());
    }

    #[test]
    fn comparisons_follow_global_order() {
        assert!(holds(Relation::Lt, &PrecomputedTerm::int(1), &PrecomputedTerm::int(2)));
        assert!(holds(Relation::Lt, &PrecomputedTerm::int(5), &PrecomputedTerm::sym("a")));
        assert!(!holds(Relation::Ne, &PrecomputedTerm::sym("a"), &PrecomputedTerm::sym("a")));
    }

    /// Quotient and remainder recovered by search rather than arithmetic.
    fn division_oracle(i: i64, j: i64) -> (i64, i64) {
        let q = (-30..=30)
            .find(|&q: &i64| {
                let prod = q * j.abs();
                prod <= i.abs() && i.abs() < prod + j.abs()
            })
            .unwrap();
        let q = if i * j >= 0 { q } else { -q };
        (q, i - j * q)
    }

    #[test]
    fn division_identity_exhaustive() {
        for i in -25i64..=25 {
            for j in -25i64..=25 {
                let div = eval_term(&op(BinOp::Div, Term::int(i), Term::int(j)));
                let rem = eval_term(&op(BinOp::Mod, Term::int(i), Term::int(j)));
                if j == 0 {
                    assert!(div.is_empty() && rem.is_empty());
                    continue;
                }
                let (q, r) = division_oracle(i, j);
                assert_eq!(div, ints(&[q]), "{i}/{j}");
                assert_eq!(rem, ints(&[r]), "{i}\\{j}");
                assert_eq!(i, j * q + r);
            }
        }
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            (-4i64..5).prop_map(Term::int),
            Just(Term::sym("a")),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| Term::Abs(Box::new(t))),
                (
                    prop_oneof![
                        Just(BinOp::Add),
                        Just(BinOp::Sub),
                        Just(BinOp::Mul),
                        Just(BinOp::Div),
                        Just(BinOp::Mod),
                        Just(BinOp::Interval)
                    ],
                    inner.clone(),
                    inner
                )
                    .prop_map(|(o, l, r)| Term::binop(o, l, r)),
            ]
        })
    }

    /// Replaces the leftmost numeral leaf of `t` by `with`.
    fn replace_first_numeral(t: &Term, with: &Term, done: &mut bool) -> Term {
        if *done {
            return t.clone();
        }
        match t {
            Term::Precomputed(PrecomputedTerm::Numeral(_)) => {
                *done = true;
                with.clone()
            }
            Term::Precomputed(_) | Term::Variable(_) => t.clone(),
            Term::Abs(inner) => Term::Abs(Box::new(replace_first_numeral(inner, with, done))),
            Term::BinOp(o, l, r) => {
                let l = replace_first_numeral(l, with, done);
                let r = replace_first_numeral(r, with, done);
                Term::binop(*o, l, r)
            }
        }
    }

    proptest! {
        #[test]
        fn interval_size(n1 in -20i64..20, n2 in -20i64..20) {
            let v = eval_term(&op(BinOp::Interval, Term::int(n1), Term::int(n2)));
            prop_assert_eq!(v.len() as i64, (n2 - n1 + 1).max(0));
        }

        #[test]
        fn value_sets_are_monotone(t in arb_term(), n in -3i64..4, spread in 0i64..3) {
            let small = Term::int(n);
            let large = op(BinOp::Interval, Term::int(n - spread), Term::int(n + spread));
            let a = replace_first_numeral(&t, &small, &mut false);
            let b = replace_first_numeral(&t, &large, &mut false);
            prop_assert!(eval_term(&a).is_subset(&eval_term(&b)));
        }
    }
}
