use proptest::prelude::*;

use mgtc_core::check::{lemma_facts, verify_theorem1, StandardInterp, Verdict};
use mgtc_core::fol::{complete, fprop, tau_star};
use mgtc_core::graphs::{atom_graph, gsp_graph, is_locally_tight, Structure};
use mgtc_core::ground::{atom_base, default_universe, tau_program, PropFormula};
use mgtc_core::parser::{parse_io_program, parse_program};
use mgtc_core::random;
use mgtc_core::stable::{ht_equivalent, stable_models, DEFAULT_LIMIT};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn theorem1_on_random_programs(seed in any::<u64>()) {
        let prog = random::random_program(&mut random::generator(seed));
        let r = verify_theorem1(&prog, &random::program_universe()).unwrap();
        prop_assert_eq!(r.verdict, Verdict::Holds, "{}", prog);
    }

    #[test]
    fn translation_is_strongly_equivalent_to_grounding(seed in any::<u64>()) {
        let u = random::program_universe();
        let prog = mgtc_core::syntax::Program::new(vec![random::random_rule(&mut random::generator(seed))]);
        let via_fo: Vec<PropFormula> = tau_star(&prog).sentences().iter().map(|s| fprop(s, &u).unwrap()).collect();
        let direct = tau_program(&prog, &u);
        let base = atom_base(&via_fo).union(&atom_base(&direct));
        prop_assert!(ht_equivalent(&PropFormula::conjoin(via_fo), &PropFormula::conjoin(direct), &base, DEFAULT_LIMIT).unwrap());
    }

    #[test]
    fn support_matches_completion(seed in any::<u64>()) {
        let mut rng = random::generator(seed);
        let gamma = random::random_completable_set(&mut rng);
        let j = random::random_interpretation(&mut rng);
        let f = lemma_facts(&gamma, &StandardInterp::up(j), &random::completable_universe()).unwrap();
        prop_assert_eq!(f.supported, f.satisfies_completion);
        if f.gsp_acyclic {
            prop_assert_eq!(f.stable, f.satisfies_completion);
        }
        if f.stable {
            prop_assert!(f.supported);
        }
    }

    #[test]
    fn tight_programs_are_locally_tight(seed in any::<u64>()) {
        let mut rng = random::generator(seed);
        let io = random::random_tight_program(&mut rng);
        let input = random::random_tight_input(&mut rng, &io);
        let u = default_universe(&io, &input, 1);
        prop_assert!(is_locally_tight(&io, &input, &u).is_locally_tight());
        prop_assert!(atom_graph(&io, &input, &u).graph.is_acyclic());
    }

    #[test]
    fn gsp_edges_are_atom_graph_edges(seed in any::<u64>()) {
        let mut rng = random::generator(seed);
        let io = random::random_tight_program(&mut rng);
        let input = random::random_tight_input(&mut rng, &io);
        let u = default_universe(&io, &input, 0);
        let fs = tau_program(&io.program().union(&input.facts()), &u);
        let models = stable_models(&fs, &atom_base(&fs), DEFAULT_LIMIT);
        prop_assume!(models.is_ok());
        let g = atom_graph(&io, &input, &u);
        let gamma = mgtc_core::fol::tau_star_io(&io);
        for m in models.unwrap() {
            let s = Structure { atoms: &m, universe: &u, valuation: None };
            for (a, b) in gsp_graph(&s, &gamma).unwrap().edges() {
                prop_assert!(g.graph.has_edge(a, b), "{} -> {}", a, b);
            }
        }
    }
}

#[test]
fn completion_of_a_definite_program_has_one_model() {
    let prog = parse_program("p(1). p(X+1) :- p(X), X < 2.").unwrap();
    let comp = complete(&tau_star(&prog));
    let u = mgtc_core::ground::Universe::new([], 0, 3);
    let mut models = Vec::new();
    for mask in 0..16u32 {
        let j: mgtc_core::syntax::AtomSet = (0..4)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| mgtc_core::syntax::GroundAtom::new("p", vec![mgtc_core::syntax::PrecomputedTerm::int(i)]))
            .collect();
        if mgtc_core::check::fo_sat(&StandardInterp::up(j.clone()), &comp, &u).unwrap() {
            models.push(j.to_string());
        }
    }
    assert_eq!(models, vec!["{p(1), p(2)}"]);
}

#[test]
fn shipped_programs_parse() {
    for name in ["rooms.mg", "rooms2.mg", "rooms_no_inertia.mg", "tpr.mg"] {
        let path = format!("{}/../../programs/{name}", env!("CARGO_MANIFEST_DIR"));
        let text = std::fs::read_to_string(&path).unwrap();
        let io = parse_io_program(&text).unwrap();
        assert_eq!(parse_io_program(&io.to_string()).unwrap(), io, "{name}");
    }
}
