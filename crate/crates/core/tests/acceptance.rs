//! Acceptance suite: one PASS/FAIL line per criterion, each with a pinned time limit.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mgtc_core::check::{
    check_equivalence, fo_sat, io_models, lemma_facts, so_sat, stable_models_for_input,
    verify_theorem1, verify_theorem2, Domain, SoMode, StandardInterp, Verdict,
};
use mgtc_core::fol::{complete_io, fprop, tau_star, CompletableSet, FoFormula};
use mgtc_core::graphs::{atom_graph, is_locally_tight, is_tight, pred_graph};
use mgtc_core::ground::{atom_base, default_universe, tau_program, PropFormula, Universe};
use mgtc_core::parser::{parse_formula, parse_formulas, parse_ground_atom, parse_input, parse_io_program, parse_term};
use mgtc_core::random;
use mgtc_core::stable::{ht_equivalent, DEFAULT_LIMIT};
use mgtc_core::syntax::{AtomSet, GroundAtom, Input, IoProgram, PrecomputedTerm, Predicate, Program, Valuation};
use mgtc_core::values::eval_term;

const ROOMS: &str = include_str!("../../../programs/rooms.mg");
const ROOMS2: &str = include_str!("../../../programs/rooms2.mg");
const ROOMS_NO_INERTIA: &str = include_str!("../../../programs/rooms_no_inertia.mg");
const EXINP: &str = include_str!("../../../programs/exinp.in");
const OUT: &str = include_str!("../../../programs/out.atoms");
const TPR: &str = include_str!("../../../programs/tpr.mg");
const TOY: &str = include_str!("../../../programs/toy.fo");
const ASSUMPTIONS: &str = include_str!("../../../programs/as.fo");

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn atoms(text: &str) -> AtomSet {
    text.split('.')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_ground_atom(s).unwrap())
        .collect()
}

fn ga(name: &str, args: &[&PrecomputedTerm]) -> GroundAtom {
    GroundAtom::new(name, args.iter().map(|t| (*t).clone()).collect())
}

fn rooms() -> (IoProgram, Input) {
    let io = parse_io_program(ROOMS).unwrap();
    let input = parse_input(EXINP, &io).unwrap();
    (io, input)
}

fn values(text: &str) -> BTreeSet<PrecomputedTerm> {
    eval_term(&parse_term(text).unwrap())
}

fn ints(ns: &[i64]) -> BTreeSet<PrecomputedTerm> {
    ns.iter().map(|n| PrecomputedTerm::int(*n)).collect()
}

fn term_semantics() -> Outcome {
    let displays = [("7/2", ints(&[3])), ("0..2", ints(&[0, 1, 2])), ("2/0", ints(&[])), ("2..0", ints(&[])), ("2+c", ints(&[]))];
    for (t, expected) in displays {
        let got = values(t);
        ensure(got == expected, || format!("[{t}] = {got:?}"))?;
    }
    let mut checked = 0;
    for i in -25i64..=25 {
        for j in -25i64..=25 {
            if j == 0 {
                continue;
            }
            let q = (i as f64 / j as f64).trunc() as i64;
            let r = i - j * q;
            let div = values(&format!("({i})/({j})"));
            let rem = values(&format!("({i})\\({j})"));
            ensure(div == ints(&[q]), || format!("[{i}/{j}] = {div:?}, expected {q}"))?;
            ensure(rem == ints(&[r]), || format!("[{i}\\{j}] = {rem:?}, expected {r}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} division/modulo pairs"))
}

fn running_example() -> Outcome {
    let (io, input) = rooms();
    let u = default_universe(&io, &input, 0);
    let expected = input.atoms.union(&atoms(OUT));
    let models = io_models(&io, &input, &u).map_err(|e| e.to_string())?;
    ensure(models == vec![expected.clone()], || format!("io-models: {models:?}"))?;
    let stable = stable_models_for_input(&io, &input, &u, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
    ensure(stable.len() == 1, || format!("{} stable models", stable.len()))?;
    let private: AtomSet = stable[0].filter_symbols(|p| p.name == "in_building");
    let mut building = AtomSet::new();
    for p in ["alice", "bob"] {
        for t in 0..3 {
            building.insert(ga("in_building", &[&PrecomputedTerm::sym(p), &PrecomputedTerm::int(t)]));
        }
    }
    ensure(private == building, || format!("private atoms: {private}"))?;
    ensure(stable[0] == expected.union(&building), || format!("stable model: {}", stable[0]))?;
    Ok(format!("io-model has {} output atoms; universe {u}", atoms(OUT).len()))
}

fn tightness() -> Outcome {
    let tpr = parse_io_program(TPR).unwrap();
    let g = pred_graph(tpr.program());
    let edges: Vec<(Predicate, Predicate)> = g.edges().map(|(a, b)| (a.clone(), b.clone())).collect();
    ensure(edges == vec![(Predicate::new("q", 2), Predicate::new("p", 1))], || format!("tpr edges {edges:?}"))?;
    ensure(is_tight(tpr.program()), || "tpr not tight".into())?;
    let (io, _) = rooms();
    let g = pred_graph(io.program());
    let inp = Predicate::new("in", 3);
    ensure(g.has_edge(&inp, &inp), || "no self-loop at in/3".into())?;
    ensure(!is_tight(io.program()), || "rooms reported tight".into())?;
    Ok("tpr: q/2 -> p/1; rooms: in/3 -> in/3".into())
}

fn local_tightness() -> Outcome {
    let (io, input) = rooms();
    let u = default_universe(&io, &input, 0);
    let g = atom_graph(&io, &input, &u);
    let elems = u.elements();
    let mut expected = BTreeSet::new();
    for p in &elems {
        for r in &elems {
            for t in &elems {
                expected.insert((ga("in_building", &[p, t]), ga("in", &[p, r, t])));
            }
            for i in 0..2 {
                let (now, next) = (PrecomputedTerm::int(i), PrecomputedTerm::int(i + 1));
                expected.insert((ga("in", &[p, r, &next]), ga("in", &[p, r, &now])));
            }
        }
    }
    let got: BTreeSet<(GroundAtom, GroundAtom)> = g.graph.edges().map(|(a, b)| (a.clone(), b.clone())).collect();
    ensure(got == expected, || {
        let extra: Vec<_> = got.difference(&expected).take(3).collect();
        let missing: Vec<_> = expected.difference(&got).take(3).collect();
        format!("edge sets differ; extra {extra:?}, missing {missing:?}")
    })?;
    let verdict = is_locally_tight(&io, &input, &u);
    ensure(verdict.is_locally_tight(), || verdict.to_string())?;
    Ok(format!("{} edges over {} elements; {verdict}", got.len(), elems.len()))
}

fn completion() -> Outcome {
    let tpr = parse_io_program(TPR).unwrap();
    let s = complete_io(&tpr);
    let displayed = parse_formula(
        "forall V1 (p(V1) <-> V1 = a or V1 = b) and \
         forall V1 V2 (q(V1,V2) <-> exists X Y (V1 = X and V2 = Y and exists V (V = X and p(V)) and exists V (V = Y and p(V))))",
    )
    .unwrap()
    .rename_predicates(&[(Predicate::new("p", 1), "P".to_string())].into());
    ensure(s.prefix.len() == 1 && s.prefix[0].name == "P" && s.prefix[0].replaces == Predicate::new("p", 1), || {
        format!("prefix {:?}", s.prefix)
    })?;
    ensure(s.matrix == displayed, || format!("matrix {}", s.matrix))?;
    let model = atoms("q(a,a). q(a,b). q(b,a). q(b,b)");
    let u = Universe::new(["a", "b"], 0, 1);
    let out = so_sat(&StandardInterp::up(model), &s, &u, &SoMode::Search).map_err(|e| e.to_string())?;
    let witness = out.witness.unwrap_or_default();
    ensure(out.satisfied && witness == atoms("p(a). p(b)"), || format!("witness {witness}"))?;
    Ok(format!("{s}; witness {witness}"))
}

fn toy_example() -> Outcome {
    let sentences = parse_formulas(TOY).unwrap();
    let gamma = CompletableSet::from_sentences(&sentences, [Predicate::new("p", 1)].into()).map_err(|e| e.to_string())?;
    let placeholders: BTreeSet<String> = ["a".to_string(), "b".to_string()].into();
    let u = Universe::new([], 0, 1).with_placeholders(&placeholders);
    let v: Valuation = [("a".to_string(), PrecomputedTerm::int(0)), ("b".to_string(), PrecomputedTerm::int(1))].into();
    let i = lemma_facts(&gamma, &StandardInterp::with_valuation(atoms("p(0)"), v.clone()), &u).map_err(|e| e.to_string())?;
    ensure(i.gsp_edges.is_empty(), || format!("I: edges {:?}", i.gsp_edges))?;
    ensure(i.stable && i.satisfies_completion, || format!("I: {i:?}"))?;
    let j = lemma_facts(&gamma, &StandardInterp::with_valuation(atoms("p(0). p(1)"), v), &u).map_err(|e| e.to_string())?;
    let p1 = parse_ground_atom("p(1)").unwrap();
    ensure(j.gsp_edges == vec![(p1.clone(), p1)], || format!("J: edges {:?}", j.gsp_edges))?;
    ensure(j.satisfies_completion && !j.stable, || format!("J: {j:?}"))?;
    Ok("I stable and a model of COMP; J a model of COMP, not stable".into())
}

fn theorem2() -> Outcome {
    let (io, input) = rooms();
    let u = default_universe(&io, &input, 0);
    let p = input.atoms.union(&atoms(OUT));
    let conditions = |p: &AtomSet| -> Result<[bool; 3], String> {
        let r = verify_theorem2(&io, &input, p, &u, &SoMode::Search).map_err(|e| e.to_string())?;
        Ok([
            r.condition_bool("a_io_model").unwrap(),
            r.condition_bool("b_up_satisfies_valuated_completion").unwrap(),
            r.condition_bool("c_valuated_satisfies_completion").unwrap(),
        ])
    };
    let base = conditions(&p)?;
    ensure(base == [true; 3], || format!("(a),(b),(c) = {base:?}"))?;
    let elems = u.elements();
    let mut flips = 0;
    for x in &elems {
        for y in &elems {
            for z in &elems {
                let a = ga("in", &[x, y, z]);
                let mut q = p.clone();
                if !q.remove(&a) {
                    q.insert(a.clone());
                }
                let got = conditions(&q)?;
                ensure(got == [false; 3], || format!("flipping {a}: (a),(b),(c) = {got:?}"))?;
                flips += 1;
            }
        }
    }
    Ok(format!("all true for I ∪ out; all false after each of {flips} single-atom flips"))
}

fn theorem1_suite() -> Outcome {
    let mut rng = random::generator(0x7431);
    let u = random::program_universe();
    for n in 0..200 {
        let prog = random::random_program(&mut rng);
        let r = verify_theorem1(&prog, &u).map_err(|e| format!("program {n}: {e}"))?;
        ensure(r.verdict == Verdict::Holds, || format!("mismatch on `{prog}`: {:?}", r.counterexample))?;
    }
    Ok(format!("200 programs, universe {u}"))
}

fn rule_suite() -> Outcome {
    let mut rng = random::generator(0x7432);
    let u = random::program_universe();
    for _ in 0..200 {
        let rule = random::random_rule(&mut rng);
        let prog = Program::new(vec![rule]);
        let via_fo: Vec<PropFormula> = tau_star(&prog).sentences().iter().map(|s| fprop(s, &u).unwrap()).collect();
        let direct = tau_program(&prog, &u);
        let base = atom_base(&via_fo).union(&atom_base(&direct));
        let same = ht_equivalent(&PropFormula::conjoin(via_fo), &PropFormula::conjoin(direct), &base, DEFAULT_LIMIT)
            .map_err(|e| e.to_string())?;
        ensure(same, || format!("not strongly equivalent: `{prog}`"))?;
    }
    Ok("200 rules".into())
}

fn main_lemma_suite() -> Outcome {
    let mut rng = random::generator(0x7433);
    let u = random::completable_universe();
    let mut acyclic = 0;
    for _ in 0..500 {
        let gamma = random::random_completable_set(&mut rng);
        let j = random::random_interpretation(&mut rng);
        let f = lemma_facts(&gamma, &StandardInterp::up(j.clone()), &u).map_err(|e| e.to_string())?;
        ensure(f.supported == f.satisfies_completion, || format!("support differs from COMP: {gamma} at {j}"))?;
        if f.gsp_acyclic {
            acyclic += 1;
            ensure(f.stable == f.satisfies_completion, || format!("stable differs from COMP: {gamma} at {j}"))?;
        }
    }
    Ok(format!("500 sets, {acyclic} with acyclic G^sp"))
}

fn proposition1_suite() -> Outcome {
    let mut rng = random::generator(0x7434);
    for _ in 0..100 {
        let io = random::random_tight_program(&mut rng);
        let input = random::random_tight_input(&mut rng, &io);
        let u = default_universe(&io, &input, 0);
        let v = is_locally_tight(&io, &input, &u);
        ensure(v.is_locally_tight(), || format!("`{}` on {}: {v}", io.program(), input.atoms))?;
    }
    Ok("100 tight programs".into())
}

fn exinp_domain() -> Domain {
    let (io, input) = rooms();
    let _ = io;
    Domain {
        valuations: (0..3).map(|h| [("h".to_string(), PrecomputedTerm::int(h))].into()).collect(),
        base: input.atoms,
    }
}

fn equivalence() -> Outcome {
    let (io1, _) = rooms();
    let io2 = parse_io_program(ROOMS2).unwrap();
    let weak = parse_io_program(ROOMS_NO_INERTIA).unwrap();
    let assumption = FoFormula::conjoin(parse_formulas(ASSUMPTIONS).unwrap());
    let domain = exinp_domain();
    let r = check_equivalence(&io1, &io2, Some(&assumption), &domain, 0).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Holds, || format!("first vs second: {} {:?}", r.verdict, r.counterexample))?;
    let checked = r.conditions["inputs_checked"].clone();
    let r = check_equivalence(&io1, &weak, Some(&assumption), &domain, 0).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Refuted, || format!("without inertia: {}", r.verdict))?;
    let input = parse_input("#let h = 1.\nperson(alice). in0(alice,hall).", &io1).unwrap();
    let u = default_universe(&io1, &input, 0);
    let with = io_models(&io1, &input, &u).map_err(|e| e.to_string())?;
    let without = io_models(&weak, &input, &u).map_err(|e| e.to_string())?;
    ensure(with.len() == 1 && without.is_empty(), || format!("h=1 example: {} vs {} io-models", with.len(), without.len()))?;
    let interp = StandardInterp::with_valuation(input.atoms.clone(), input.valuation.clone());
    ensure(fo_sat(&interp, &assumption, &u).unwrap(), || "h=1 example violates the assumption".into())?;
    Ok(format!("equivalent on {checked} inputs; counterexample {}", r.counterexample.unwrap()))
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: "1", name: "term semantics", limit: secs(1), run: term_semantics },
        Criterion { id: "2", name: "running example io-model", limit: secs(30), run: running_example },
        Criterion { id: "3", name: "tightness", limit: secs(1), run: tightness },
        Criterion { id: "4", name: "local tightness edge set", limit: secs(10), run: local_tightness },
        Criterion { id: "5", name: "completion of tpr", limit: secs(1), run: completion },
        Criterion { id: "6", name: "toy theory facts", limit: secs(1), run: toy_example },
        Criterion { id: "7", name: "theorem 2 end to end", limit: secs(120), run: theorem2 },
        Criterion { id: "8a", name: "theorem 1 on random programs", limit: secs(300), run: theorem1_suite },
        Criterion { id: "8b", name: "tau-star vs tau strong equivalence", limit: secs(120), run: rule_suite },
        Criterion { id: "8c", name: "main lemma on random sets", limit: secs(120), run: main_lemma_suite },
        Criterion { id: "8d", name: "proposition 1 on tight programs", limit: secs(60), run: proposition1_suite },
        Criterion { id: "9", name: "equivalence of rooms variants", limit: secs(600), run: equivalence },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == c.id) {
            continue;
        }
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= c.limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("over time limit; {d}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{status} [{}] {} ({:.2}s, limit {}s): {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
