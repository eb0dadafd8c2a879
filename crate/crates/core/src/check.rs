//! Bounded model checking over standard interpretations, io-models, and
//! verifiers for the correspondence theorems.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::fol::{
    complete, complete_io, fprop, fprop_with, tau_star, CompletableSet, FoFormula, FpropOptions,
    SoSentence,
};
use crate::graphs::{gsp_graph, is_locally_tight, Structure};
use crate::ground::{atom_base, default_universe, tau_program, PropFormula, Universe};
use crate::stable::{find_model, is_stable, is_supported, sat_all, stable_models, DEFAULT_LIMIT};
use crate::syntax::{
    input_projection, public_projection, ApplyValuation, AtomSet, GroundAtom, Input, IoProgram,
    Predicate, Program, Valuation,
};

pub const REPORT_SCHEMA: &str = "mgtc.report/1";

/// Default cap on the private-atom base for enumerating predicate variables.
pub const SO_ENUMERATION_LIMIT: usize = 16;

/// Default cap on the number of inputs in an equivalence domain.
pub const DOMAIN_LIMIT: usize = 1 << 16;

/// The standard interpretation `J↑`, or `J^v` when the valuation is nonempty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StandardInterp {
    pub atoms: AtomSet,
    pub valuation: Valuation,
}

impl StandardInterp {
    /// `J↑`: precomputed terms name themselves and exactly the atoms of `J` hold.
    pub fn up(atoms: AtomSet) -> Self {
        StandardInterp {
            atoms,
            valuation: Valuation::new(),
        }
    }

    /// `J^v`: like `J↑`, with each placeholder denoting its value under `v`.
    pub fn with_valuation(atoms: AtomSet, valuation: Valuation) -> Self {
        StandardInterp { atoms, valuation }
    }

    /// The precomputed atoms true in the interpretation.
    pub fn down(&self) -> AtomSet {
        self.atoms.clone()
    }

    fn structure<'a>(&'a self, u: &'a Universe) -> Structure<'a> {
        Structure {
            atoms: &self.atoms,
            universe: u,
            valuation: (!self.valuation.is_empty()).then_some(&self.valuation),
        }
    }
}

/// A truth value from bounded evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub value: bool,
    /// Set when an equality guard pointed outside the universe.
    pub approximate: bool,
}

/// Truth value of a sentence with quantifiers bounded by `u`.
pub fn fo_eval(interp: &StandardInterp, f: &FoFormula, u: &Universe) -> Result<Evaluation, Error> {
    let fixed = |a: &GroundAtom| Some(interp.atoms.contains(a));
    let options = FpropOptions {
        fold: true,
        fixed: Some(&fixed),
        valuation: (!interp.valuation.is_empty()).then_some(&interp.valuation),
    };
    let e = fprop_with(f, u, &options)?;
    Ok(Evaluation {
        value: e.formula == PropFormula::Top,
        approximate: e.approximate,
    })
}

pub fn fo_sat(interp: &StandardInterp, f: &FoFormula, u: &Universe) -> Result<bool, Error> {
    Ok(fo_eval(interp, f, u)?.value)
}

/// How [`so_sat`] finds relations for the predicate variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SoMode {
    /// Try every extension over the universe; fails above `limit` atoms.
    Enumerate { limit: usize },
    /// Check the given extension, written with the original private symbols.
    Witness(AtomSet),
    /// Solve the matrix for the predicate variables with a propositional search.
    Search,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SoOutcome {
    pub satisfied: bool,
    /// Extension of the private symbols that makes the matrix true.
    pub witness: Option<AtomSet>,
    pub approximate: bool,
}

fn rename_witness(s: &SoSentence, witness: &AtomSet) -> AtomSet {
    witness
        .iter()
        .filter_map(|a| {
            s.prefix
                .iter()
                .find(|p| p.replaces == a.symbol())
                .map(|p| GroundAtom::new(&p.name, a.args.clone()))
        })
        .collect()
}

fn restore_witness(s: &SoSentence, renamed: &AtomSet) -> AtomSet {
    renamed
        .iter()
        .filter_map(|a| {
            s.prefix
                .iter()
                .find(|p| p.name == a.predicate && p.arity() == a.args.len())
                .map(|p| GroundAtom::new(&p.replaces.name, a.args.clone()))
        })
        .collect()
}

/// Whether `∃P1 … Pl C` holds: some relations over `u` for the predicate
/// variables make the matrix true.
pub fn so_sat(interp: &StandardInterp, s: &SoSentence, u: &Universe, mode: &SoMode) -> Result<SoOutcome, Error> {
    let valuation = (!interp.valuation.is_empty()).then_some(&interp.valuation);
    let is_var = |a: &GroundAtom| s.prefix.iter().any(|p| p.name == a.predicate && p.arity() == a.args.len());
    let check = |extension: &AtomSet| -> Result<Evaluation, Error> {
        let fixed = |a: &GroundAtom| {
            Some(if is_var(a) {
                extension.contains(a)
            } else {
                interp.atoms.contains(a)
            })
        };
        let options = FpropOptions {
            fold: true,
            fixed: Some(&fixed),
            valuation,
        };
        let e = fprop_with(&s.matrix, u, &options)?;
        Ok(Evaluation {
            value: e.formula == PropFormula::Top,
            approximate: e.approximate,
        })
    };
    let outcome = |e: Evaluation, extension: AtomSet| SoOutcome {
        satisfied: e.value,
        witness: e.value.then(|| restore_witness(s, &extension)),
        approximate: e.approximate,
    };
    let base: AtomSet = s
        .prefix
        .iter()
        .flat_map(|p| u.tuples(p.arity()).into_iter().map(|args| GroundAtom::new(&p.name, args)))
        .collect();
    match mode {
        SoMode::Witness(w) => {
            let extension = rename_witness(s, w);
            Ok(outcome(check(&extension)?, extension))
        }
        SoMode::Enumerate { limit } => {
            if base.len() > *limit {
                return Err(Error::LimitExceeded {
                    what: "private-atom base".into(),
                    size: base.len(),
                    limit: *limit,
                    hint: "; supply a witness extension or use search mode".into(),
                });
            }
            let atoms: Vec<&GroundAtom> = base.iter().collect();
            let mut approximate = false;
            for mask in 0u64..1 << atoms.len() {
                let extension: AtomSet = atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, a)| (*a).clone())
                    .collect();
                let e = check(&extension)?;
                approximate |= e.approximate;
                if e.value {
                    return Ok(outcome(e, extension));
                }
            }
            Ok(SoOutcome {
                satisfied: false,
                witness: None,
                approximate,
            })
        }
        SoMode::Search => {
            let fixed = |a: &GroundAtom| if is_var(a) { None } else { Some(interp.atoms.contains(a)) };
            let options = FpropOptions {
                fold: true,
                fixed: Some(&fixed),
                valuation,
            };
            let e = fprop_with(&s.matrix, u, &options)?;
            match find_model(&[e.formula], &base) {
                Some(extension) => {
                    let confirmed = check(&extension)?;
                    debug_assert!(confirmed.value);
                    Ok(outcome(
                        Evaluation {
                            value: confirmed.value,
                            approximate: e.approximate || confirmed.approximate,
                        },
                        extension,
                    ))
                }
                None => Ok(SoOutcome {
                    satisfied: false,
                    witness: None,
                    approximate: e.approximate,
                }),
            }
        }
    }
}

/// Stable models of `τ(v(Π) ∪ I)` over the atoms of its instances on `u`.
pub fn stable_models_for_input(io: &IoProgram, input: &Input, u: &Universe, limit: usize) -> Result<Vec<AtomSet>, Error> {
    let program = io.program().apply_valuation(&input.valuation).union(&input.facts());
    let fs = tau_program(&program, u);
    let base = atom_base(&fs);
    stable_models(&fs, &base, limit)
}

/// The public parts of the stable models for the input, without duplicates.
pub fn io_models(io: &IoProgram, input: &Input, u: &Universe) -> Result<Vec<AtomSet>, Error> {
    io_models_with_limit(io, input, u, DEFAULT_LIMIT)
}

pub fn io_models_with_limit(io: &IoProgram, input: &Input, u: &Universe, limit: usize) -> Result<Vec<AtomSet>, Error> {
    let models = stable_models_for_input(io, input, u, limit)?;
    let public: BTreeSet<AtomSet> = models.iter().map(|m| public_projection(m, io)).collect();
    Ok(public.into_iter().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The checked property holds on the bounded domain.
    Holds,
    /// A counterexample was found.
    Refuted,
    /// The hypothesis of the checked statement fails.
    Inapplicable,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::Refuted => 1,
            Verdict::Inapplicable => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Refuted => "refuted",
            Verdict::Inapplicable => "inapplicable",
        })
    }
}

/// The result of a verifier. A counterexample is present iff the verdict is `Refuted`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub check: String,
    pub verdict: Verdict,
    pub conditions: BTreeMap<String, Value>,
    pub witnesses: BTreeMap<String, Value>,
    pub counterexample: Option<Value>,
    pub universe: Universe,
    /// Set when some bounded evaluation may differ from the unbounded one.
    pub approximate: bool,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    fn new(check: &str, u: &Universe) -> Self {
        Report {
            schema: REPORT_SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            check: check.to_string(),
            verdict: Verdict::Holds,
            conditions: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            counterexample: None,
            universe: u.clone(),
            approximate: false,
            notes: vec![format!("quantifiers and instances are bounded by the universe {u}")],
            timings: None,
        }
    }

    fn condition(&mut self, name: &str, value: impl Serialize) {
        self.conditions.insert(name.to_string(), json!(value));
    }

    fn refute(&mut self, counterexample: Value) {
        self.verdict = Verdict::Refuted;
        self.counterexample = Some(counterexample);
    }

    pub fn condition_bool(&self, name: &str) -> Option<bool> {
        self.conditions.get(name).and_then(Value::as_bool)
    }
}

fn sets_json(sets: &[AtomSet]) -> Value {
    json!(sets.iter().map(|s| s.to_string()).collect::<Vec<_>>())
}

/// Compares stable models of `τΠ` with stable models of the propositional
/// images of the sentences of `τ*Π`, over one atom base.
pub fn verify_theorem1(prog: &Program, u: &Universe) -> Result<Report, Error> {
    let mut report = Report::new("theorem1", u);
    let direct = tau_program(prog, u);
    let mut via_fo = Vec::new();
    for s in tau_star(prog).sentences() {
        via_fo.push(fprop(&s, u)?);
    }
    let mut base = atom_base(&direct);
    base = base.union(&atom_base(&via_fo));
    let left = stable_models(&direct, &base, DEFAULT_LIMIT)?;
    let right = stable_models(&via_fo, &base, DEFAULT_LIMIT)?;
    report.condition("stable_models_of_tau", sets_json(&left));
    report.condition("stable_models_of_tau_star", sets_json(&right));
    report.condition("same_models", left == right);
    if left != right {
        report.refute(json!({
            "program": prog.to_string(),
            "only_tau": sets_json(&left.iter().filter(|m| !right.contains(m)).cloned().collect::<Vec<_>>()),
            "only_tau_star": sets_json(&right.iter().filter(|m| !left.contains(m)).cloned().collect::<Vec<_>>()),
        }));
    }
    Ok(report)
}

/// Evaluates conditions (a), (b) and (c) for a set `P` of public atoms.
pub fn verify_theorem2(io: &IoProgram, input: &Input, p: &AtomSet, u: &Universe, mode: &SoMode) -> Result<Report, Error> {
    let mut report = Report::new("theorem2", u);
    let tightness = is_locally_tight(io, input, u);
    report.condition("local_tightness", &tightness);
    if let Some(a) = p.iter().find(|a| a.args.iter().any(|t| u.is_placeholder(t))) {
        return Err(Error::InvalidInput(format!("{a} contains a placeholder")));
    }
    if let Some(a) = p.iter().find(|a| !io.is_public(&a.symbol())) {
        return Err(Error::InvalidInput(format!("{a} is not a public atom")));
    }
    let models = io_models(io, input, u)?;
    let a = models.contains(p);
    let input_matches = input_projection(p, io) == input.atoms;
    let comp = complete_io(io);

    let up = StandardInterp::up(p.clone());
    let b_universe = u.with_placeholder_elements();
    let b_outcome = so_sat(&up, &comp.apply_valuation(&input.valuation), &b_universe, mode)?;
    let b = b_outcome.satisfied && input_matches;

    let pv = StandardInterp::with_valuation(p.clone(), input.valuation.clone());
    let c_outcome = so_sat(&pv, &comp, u, mode)?;
    let c = c_outcome.satisfied && input_matches;

    report.condition("a_io_model", a);
    report.condition("input_part_matches", input_matches);
    report.condition("b_up_satisfies_valuated_completion", b);
    report.condition("c_valuated_satisfies_completion", c);
    report.witnesses.insert("io_models".into(), sets_json(&models));
    if let Some(w) = &b_outcome.witness {
        report.witnesses.insert("b_private_extension".into(), json!(w.to_string()));
    }
    if let Some(w) = &c_outcome.witness {
        report.witnesses.insert("c_private_extension".into(), json!(w.to_string()));
    }
    report.approximate = b_outcome.approximate || c_outcome.approximate;
    if !(a == b && b == c) {
        report.refute(json!({ "public_atoms": p.to_string(), "a": a, "b": b, "c": c }));
    } else if !tightness.is_locally_tight() {
        report.verdict = Verdict::Inapplicable;
        report.notes.push("the program is not locally tight for this input".into());
    }
    Ok(report)
}

/// The propositional image of `Γ` with extensional atoms fixed by `J`.
fn ground_theory(gamma: &CompletableSet, s: &Structure<'_>) -> Result<Vec<PropFormula>, Error> {
    let intensional = gamma.intensional();
    let fixed = |a: &GroundAtom| (!intensional.contains(&a.symbol())).then(|| s.atoms.contains(a));
    let options = FpropOptions {
        fold: true,
        fixed: Some(&fixed),
        valuation: s.valuation,
    };
    gamma
        .sentences()
        .iter()
        .map(|f| Ok(fprop_with(f, s.universe, &options)?.formula))
        .collect()
}

/// The four facts about `J` relating stability, support and the completion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaFacts {
    pub gsp_acyclic: bool,
    pub gsp_cycle: Option<Vec<GroundAtom>>,
    pub gsp_edges: Vec<(GroundAtom, GroundAtom)>,
    pub model: bool,
    pub stable: bool,
    pub supported: bool,
    pub satisfies_completion: bool,
}

pub fn lemma_facts(gamma: &CompletableSet, interp: &StandardInterp, u: &Universe) -> Result<LemmaFacts, Error> {
    let s = interp.structure(u);
    let g = gsp_graph(&s, gamma)?;
    let cycle = g.find_cycle();
    let theory = ground_theory(gamma, &s)?;
    let intensional = gamma.intensional();
    let lower: AtomSet = interp.atoms.filter_symbols(|p| intensional.contains(p));
    let model = sat_all(&lower, &theory);
    let stable = model && is_stable(&theory, &lower);
    let supported = model && is_supported(&lower, &theory, &lower)?;
    let satisfies_completion = fo_sat(interp, &complete(gamma), u)?;
    Ok(LemmaFacts {
        gsp_acyclic: cycle.is_none(),
        gsp_cycle: cycle,
        gsp_edges: g.edges().map(|(a, b)| (a.clone(), b.clone())).collect(),
        model,
        stable,
        supported,
        satisfies_completion,
    })
}

/// Checks that stability coincides with satisfying the completion when
/// `G^sp` is acyclic, and that support always coincides with it.
pub fn verify_main_lemma(gamma: &CompletableSet, interp: &StandardInterp, u: &Universe) -> Result<Report, Error> {
    let mut report = Report::new("main_lemma", u);
    let facts = lemma_facts(gamma, interp, u)?;
    report.condition("gsp_acyclic", facts.gsp_acyclic);
    report.condition("stable", facts.stable);
    report.condition("supported", facts.supported);
    report.condition("satisfies_completion", facts.satisfies_completion);
    report.witnesses.insert(
        "gsp_edges".into(),
        json!(facts.gsp_edges.iter().map(|(a, b)| format!("{a} -> {b}")).collect::<Vec<_>>()),
    );
    let counterexample = |what: &str| json!({ "interpretation": interp.atoms.to_string(), "violated": what });
    if facts.supported != facts.satisfies_completion {
        report.refute(counterexample("supported models are exactly the models of the completion"));
    } else if !facts.gsp_acyclic {
        report.verdict = Verdict::Inapplicable;
        let cycle: Vec<String> = facts.gsp_cycle.iter().flatten().map(|a| a.to_string()).collect();
        report.notes.push(format!("hypothesis violated: G^sp has the cycle {}", cycle.join(" -> ")));
    } else if facts.stable != facts.satisfies_completion {
        report.refute(counterexample("stable iff model of the completion"));
    } else if facts.stable != facts.supported {
        report.refute(counterexample("stable iff supported model"));
    }
    Ok(report)
}

/// A finite family of inputs: every valuation paired with every subset of `base`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Domain {
    pub valuations: Vec<Valuation>,
    pub base: AtomSet,
}

impl Domain {
    pub fn size(&self) -> usize {
        self.valuations.len().max(1).saturating_mul(1usize.checked_shl(self.base.len() as u32).unwrap_or(usize::MAX))
    }

    /// All inputs in a deterministic order, validated against `io`.
    pub fn inputs(&self, io: &IoProgram, limit: usize) -> Result<Vec<Input>, Error> {
        let size = self.size();
        if size > limit || self.base.len() >= usize::BITS as usize {
            return Err(Error::limit("input domain", size, limit));
        }
        let atoms: Vec<&GroundAtom> = self.base.iter().collect();
        let valuations = if self.valuations.is_empty() {
            vec![Valuation::new()]
        } else {
            self.valuations.clone()
        };
        let mut out = Vec::with_capacity(size);
        for v in &valuations {
            for mask in 0usize..1 << atoms.len() {
                let set: AtomSet = atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, a)| (*a).clone())
                    .collect();
                out.push(Input::new(io, v.clone(), set)?);
            }
        }
        Ok(out)
    }
}

fn input_json(input: &Input) -> Value {
    json!({
        "valuation": input.valuation.iter().map(|(k, v)| (k.clone(), v.to_string())).collect::<BTreeMap<_, _>>(),
        "atoms": input.atoms.to_string(),
    })
}

/// Universe for comparing two io-programs on one input.
pub fn shared_universe(io1: &IoProgram, io2: &IoProgram, input: &Input, margin: u32) -> Universe {
    default_universe(io1, input, margin).union(&default_universe(io2, input, margin))
}

/// Compares the io-models of two comparable io-programs on every input of
/// the domain that satisfies the assumption.
pub fn check_equivalence(
    io1: &IoProgram,
    io2: &IoProgram,
    assumption: Option<&FoFormula>,
    domain: &Domain,
    margin: u32,
) -> Result<Report, Error> {
    if !io1.is_comparable(io2) {
        return Err(Error::NotComparable(
            "placeholders, input symbols and output symbols must coincide".into(),
        ));
    }
    if let Some(a) = assumption {
        let stray: Vec<Predicate> = a.predicates().into_iter().filter(|p| !io1.is_input(p)).collect();
        if !stray.is_empty() {
            return Err(Error::IllFormed(format!(
                "the assumption uses non-input symbols: {}",
                stray.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
            )));
        }
    }
    let inputs = domain.inputs(io1, DOMAIN_LIMIT)?;
    let mut universe: Option<Universe> = None;
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut not_tight = Vec::new();
    let mut approximate = false;
    let mut counterexample = None;
    for input in &inputs {
        let u = shared_universe(io1, io2, input, margin);
        universe = Some(match universe {
            Some(w) => w.union(&u),
            None => u.clone(),
        });
        if let Some(a) = assumption {
            let interp = StandardInterp::with_valuation(input.atoms.clone(), input.valuation.clone());
            let e = fo_eval(&interp, a, &u)?;
            approximate |= e.approximate;
            if !e.value {
                skipped += 1;
                continue;
            }
        }
        checked += 1;
        for (name, io) in [("first", io1), ("second", io2)] {
            if !is_locally_tight(io, input, &u).is_locally_tight() {
                not_tight.push(json!({ "program": name, "input": input_json(input) }));
            }
        }
        let m1 = io_models(io1, input, &u)?;
        let m2 = io_models(io2, input, &u)?;
        if m1 != m2 {
            counterexample = Some(json!({
                "input": input_json(input),
                "io_models_first": sets_json(&m1),
                "io_models_second": sets_json(&m2),
            }));
            break;
        }
    }
    let universe = universe.unwrap_or_else(|| Universe::new([], 0, 1));
    let mut report = Report::new("equivalence", &universe);
    report.condition("inputs_in_domain", inputs.len());
    report.condition("inputs_checked", checked);
    report.condition("inputs_excluded_by_assumption", skipped);
    report.condition("not_locally_tight", &not_tight);
    report.approximate = approximate;
    report
        .notes
        .push("equivalence is established on the checked domain only, not for all inputs".into());
    if let Some(c) = counterexample {
        report.refute(c);
    } else if !not_tight.is_empty() {
        report.verdict = Verdict::Inapplicable;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{FoTerm, Variable};
    use crate::parser::{parse_formula, parse_ground_atom, parse_input, parse_io_program, parse_program};
    use crate::syntax::PrecomputedTerm;
    use proptest::prelude::*;

    fn atoms(text: &[&str]) -> AtomSet {
        text.iter().map(|t| parse_ground_atom(t).unwrap()).collect()
    }

    #[test]
    fn fo_sat_examples() {
        let u = Universe::new(["a", "b"], 0, 1);
        let j = StandardInterp::up(atoms(&["p(a)"]));
        assert!(fo_sat(&j, &parse_formula("exists V p(V)").unwrap(), &u).unwrap());
        let q = StandardInterp::up(atoms(&["q(a,a)", "q(a,b)", "q(b,a)", "q(b,b)", "p(a)", "p(b)"]));
        let f = parse_formula("forall V1 V2 (q(V1,V2) <-> (V1 = a or V1 = b) and (V2 = a or V2 = b))").unwrap();
        assert!(fo_sat(&q, &f, &u).unwrap());
        let h = parse_formula("exists T (T = h and p(T))").unwrap();
        let v: Valuation = [("h".to_string(), PrecomputedTerm::int(1))].into();
        let ph: BTreeSet<String> = ["h".to_string()].into();
        let uh = u.clone().with_placeholders(&ph);
        let jv = StandardInterp::with_valuation(atoms(&["p(1)"]), v);
        assert!(fo_sat(&jv, &h, &uh).unwrap());
        assert!(fo_sat(&StandardInterp::up(atoms(&["p(1)"])), &h, &uh).is_err());
    }

    fn tpr() -> IoProgram {
        parse_io_program("#output q/2.\np(a). p(b). q(X,Y) :- p(X), p(Y).").unwrap()
    }

    #[test]
    fn so_sat_finds_the_forced_witness() {
        let u = Universe::new(["a", "b"], 0, 0);
        let s = complete_io(&tpr());
        let j = StandardInterp::up(atoms(&["q(a,a)", "q(a,b)", "q(b,a)", "q(b,b)"]));
        for mode in [SoMode::Search, SoMode::Enumerate { limit: 16 }] {
            let out = so_sat(&j, &s, &u, &mode).unwrap();
            assert!(out.satisfied);
            assert_eq!(out.witness.unwrap(), atoms(&["p(a)", "p(b)"]));
        }
        let wrong = StandardInterp::up(atoms(&["q(a,a)"]));
        assert!(!so_sat(&wrong, &s, &u, &SoMode::Search).unwrap().satisfied);
        let big = Universe::new(["a", "b", "c", "d", "e", "f"], 0, 12);
        assert!(matches!(
            so_sat(&j, &s, &big, &SoMode::Enumerate { limit: 16 }),
            Err(Error::LimitExceeded { .. })
        ));
        let plain = SoSentence { prefix: vec![], matrix: parse_formula("exists V p(V)").unwrap() };
        assert!(so_sat(&StandardInterp::up(atoms(&["p(a)"])), &plain, &u, &SoMode::Search).unwrap().satisfied);
    }

    #[test]
    fn io_models_small_cases() {
        let empty = IoProgram::plain(Program::default());
        let u = Universe::new([], 0, 1);
        assert_eq!(io_models(&empty, &Input::default(), &u).unwrap(), vec![AtomSet::new()]);
    }

    #[test]
    fn theorem1_examples() {
        let u = Universe::new(["a", "b"], 0, 1);
        for text in ["p :- not q. q :- not p.", "", "p(a). p(b). q(X,Y) :- p(X), p(Y)."] {
            let report = verify_theorem1(&parse_program(text).unwrap(), &u).unwrap();
            assert_eq!(report.verdict, Verdict::Holds, "{text}");
        }
        let r = verify_theorem1(&parse_program("p :- not q. q :- not p.").unwrap(), &u).unwrap();
        assert_eq!(r.conditions["stable_models_of_tau"], json!(["{p}", "{q}"]));
    }

    #[test]
    fn non_locally_tight_is_inapplicable() {
        let io = parse_io_program("#output p/1.\np(X) :- p(X).").unwrap();
        let u = Universe::new(["a"], 0, 0);
        let p = atoms(&["p(a)"]);
        let r = verify_theorem2(&io, &Input::default(), &p, &u, &SoMode::Search).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        assert_eq!(r.condition_bool("a_io_model"), Some(false));
        assert_eq!(r.condition_bool("c_valuated_satisfies_completion"), Some(true));
        let r = verify_theorem2(&io, &Input::default(), &AtomSet::new(), &u, &SoMode::Search).unwrap();
        assert_eq!(r.verdict, Verdict::Inapplicable);
    }

    #[test]
    fn empty_theory_satisfies_the_lemma() {
        let gamma = CompletableSet::new(vec![], BTreeSet::new()).unwrap();
        let r = verify_main_lemma(&gamma, &StandardInterp::default(), &Universe::new([], 0, 0)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn equivalence_with_itself() {
        let io = tpr();
        let domain = Domain::default();
        let r = check_equivalence(&io, &io, None, &domain, 0).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.condition_bool("inputs_checked"), None);
        assert_eq!(r.conditions["inputs_checked"], json!(1));
    }

    #[test]
    fn assumption_must_use_inputs() {
        let io = parse_io_program("#input s/1.\n#output p/1.\np(X) :- s(X).").unwrap();
        let a = parse_formula("forall X (p(X) -> s(X))").unwrap();
        assert!(check_equivalence(&io, &io, Some(&a), &Domain::default(), 0).is_err());
        let input = parse_input("s(a).", &io).unwrap();
        let u = default_universe(&io, &input, 0);
        assert_eq!(io_models(&io, &input, &u).unwrap(), vec![atoms(&["s(a)", "p(a)"])]);
    }

    fn arb_sentence() -> impl Strategy<Value = FoFormula> {
        let x = Variable::general("X");
        let leaf = prop_oneof![
            Just(FoFormula::atom("p", vec![FoTerm::var(&x)])),
            Just(FoFormula::atom("p", vec![FoTerm::Const(PrecomputedTerm::sym("h"))])),
            Just(FoFormula::eq(FoTerm::var(&x), FoTerm::Const(PrecomputedTerm::sym("h")))),
            Just(FoFormula::eq(FoTerm::var(&x), FoTerm::Const(PrecomputedTerm::sym("a")))),
            Just(FoFormula::Falsity),
        ];
        let body = leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 2).prop_map(FoFormula::And),
                prop::collection::vec(inner.clone(), 2).prop_map(FoFormula::Or),
                (inner.clone(), inner).prop_map(|(f, g)| FoFormula::implies(f, g)),
            ]
        });
        (body, any::<bool>()).prop_map(move |(b, universal)| {
            let guard = FoFormula::atom("p", vec![FoTerm::var(&x)]);
            if universal {
                FoFormula::forall(vec![x.clone()], FoFormula::implies(guard, b))
            } else {
                FoFormula::exists(vec![x.clone()], FoFormula::And(vec![guard, b]))
            }
        })
    }

    proptest! {
        #[test]
        fn valuation_commutes_with_evaluation(f in arb_sentence(), mask in 0u8..8, value in 0usize..3) {
            let elems = [PrecomputedTerm::int(0), PrecomputedTerm::int(1), PrecomputedTerm::sym("a")];
            let ph: BTreeSet<String> = ["h".to_string()].into();
            let u = Universe::new(["a"], 0, 1).with_placeholders(&ph);
            let j: AtomSet = elems.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, d)| GroundAtom::new("p", vec![d.clone()])).collect();
            let v: Valuation = [("h".to_string(), elems[value].clone())].into();
            let up = fo_sat(&StandardInterp::up(j.clone()), &f.apply_valuation(&v), &u.with_placeholder_elements()).unwrap();
            let pv = fo_sat(&StandardInterp::with_valuation(j.clone(), v), &f, &u).unwrap();
            prop_assert_eq!(up, pv);
            prop_assert_eq!(StandardInterp::up(j.clone()).down(), j);
        }
    }
}
