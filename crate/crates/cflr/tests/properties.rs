//! Cross-module invariants driven by seeded random instances.

use proptest::prelude::*;
use rand::Rng;

use cflr::generate::{
    random_cnf_grammar, random_general_grammar, random_labeled_dag, random_labeled_graph,
    random_pds, seeded_rng, random_word,
};
use cflr::grammar::{dyck_grammar, lift_epsilon, to_cnf, Grammar};
use cflr::graph::{check_acyclic, layered_dag};
use cflr::oracles::{chart_membership, derivation_search_cnf};
use cflr::pda::{cfg_to_pda, pda_accepts, pda_to_cfg};
use cflr::pds::{pds_reach, split_transitions};
use cflr::reductions::{led_to_weighted_cflr, LedInstance, Payload, Query};
use cflr::solvers::{
    all_pairs_reach, bounded_path_reach, dag_all_pairs_reach, matrix_all_pairs_reach,
    prepare_instance, weighted_st_reach,
};
use cflr::Symbol;

fn words_upto(alphabet: &[Symbol], max_len: usize) -> Vec<Vec<Symbol>> {
    let mut words: Vec<Vec<Symbol>> = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &a in alphabet {
                let mut w2 = w.clone();
                w2.push(a);
                next.push(w2);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    words
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Membership is preserved by CNF conversion: exhaustively up to length 5
    // and on random longer words up to length 8.
    #[test]
    fn cnf_conversion_preserves_membership(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let g = random_general_grammar(&mut rng, 4, 3, 10);
        let cnf = to_cnf(&g).unwrap();
        prop_assert!(cnf.is_strict_cnf());
        let alphabet: Vec<Symbol> = g.terminals().iter().copied().collect();
        let mut words = words_upto(&alphabet, 5);
        for _ in 0..60 {
            let len = rng.gen_range(6..=8);
            words.push((0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect());
        }
        for w in words {
            prop_assert_eq!(
                chart_membership(&g, &w),
                derivation_search_cnf(&cnf, &w),
                "word {:?}", w
            );
        }
    }

    // Lifted membership of u equals original membership of u with the
    // epsilon marker removed.
    #[test]
    fn epsilon_lift_is_sound(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let cnf = to_cnf(&random_general_grammar(&mut rng, 3, 2, 8)).unwrap();
        let lifted = lift_epsilon(&cnf).unwrap();
        let eps = cflr::grammar::eps_prime_of(&lifted).unwrap();
        let mut alphabet: Vec<Symbol> = cnf.terminals().iter().copied().collect();
        alphabet.push(eps);
        let mut words = words_upto(&alphabet, 4);
        for _ in 0..60 {
            let len = rng.gen_range(5..=8);
            words.push((0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect());
        }
        for u in words {
            let stripped: Vec<Symbol> = u.iter().copied().filter(|&s| s != eps).collect();
            prop_assert_eq!(
                derivation_search_cnf(&lifted, &u),
                derivation_search_cnf(&cnf, &stripped),
                "word {:?}", u
            );
        }
    }

    // CFG -> PDA -> CFG keeps membership on every short word.
    #[test]
    fn cfg_pda_round_trip(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let g = random_general_grammar(&mut rng, 3, 2, 7);
        let pda = cfg_to_pda(&g).unwrap();
        let back = pda_to_cfg(&pda).unwrap();
        let alphabet: Vec<Symbol> = g.terminals().iter().copied().collect();
        for w in words_upto(&alphabet, 6) {
            let direct = chart_membership(&g, &w);
            prop_assert_eq!(
                pda_accepts(&pda, &w, 2 * w.len() + 10, 400_000).unwrap(),
                direct,
                "pda on {:?}", w
            );
            prop_assert_eq!(chart_membership(&back, &w), direct, "round trip on {:?}", w);
        }
    }

    // Layer counts are exact and the layered graph is always acyclic.
    #[test]
    fn layered_dag_shape(seed in any::<u64>(), k in 1usize..=5) {
        let mut rng = seeded_rng(seed);
        let mut table = cflr::SymbolTable::new();
        let labels = [table.intern("a"), table.intern("b")];
        let n = rng.gen_range(1..=6);
        let d = random_labeled_graph(&mut rng, n, 0.4, &labels);
        let (h, _) = layered_dag(&d, k).unwrap();
        prop_assert_eq!(h.vertex_count(), k * n);
        prop_assert_eq!(h.edges().len(), (k - 1) * d.edges().len());
        prop_assert!(check_acyclic(&h).is_some());
    }

    // The three engines agree exactly; the DAG engine joins in on DAGs.
    #[test]
    fn solver_agreement(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let g = random_cnf_grammar(&mut rng, 4, 3, 8);
        let alphabet: Vec<Symbol> = g.terminals().iter().copied().collect();
        let n = rng.gen_range(1..=7);
        let acyclic = rng.gen_bool(0.5);
        let d = if acyclic {
            random_labeled_dag(&mut rng, n, 0.5, &alphabet)
        } else {
            random_labeled_graph(&mut rng, n, 0.35, &alphabet)
        };
        let worklist = all_pairs_reach(&g, &d).unwrap();
        let matrix = matrix_all_pairs_reach(&g, &d).unwrap();
        prop_assert_eq!(&worklist, &matrix);
        if check_acyclic(&d).is_some() {
            let dag = dag_all_pairs_reach(&g, &d).unwrap();
            prop_assert_eq!(&worklist, &dag);
        }
    }

    // Bounded reachability grows with k and stays under the full relation.
    #[test]
    fn bounded_reach_monotone(seed in any::<u64>(), k in 1usize..=4) {
        let mut rng = seeded_rng(seed);
        let g = random_cnf_grammar(&mut rng, 3, 2, 6);
        let alphabet: Vec<Symbol> = g.terminals().iter().copied().collect();
        let n = rng.gen_range(1..=5);
        let d = random_labeled_graph(&mut rng, n, 0.35, &alphabet);
        let small = bounded_path_reach(&g, &d, k).unwrap();
        let large = bounded_path_reach(&g, &d, k + 1).unwrap();
        prop_assert!(small.is_subset(&large));
        let full = all_pairs_reach(&g, &d).unwrap().start_pairs(g.start());
        prop_assert!(large.is_subset(&full));
    }

    // Splitting transitions preserves ordinary-to-ordinary reachability.
    #[test]
    fn split_preserves_reachability(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let states = rng.gen_range(2..=5);
        let transitions = rng.gen_range(2..=8);
        let p = random_pds(&mut rng, states, transitions, 2, 4);
        let split = split_transitions(&p);
        prop_assert!(split.is_normalized());
        for s in 0..states {
            for t in 0..states {
                prop_assert_eq!(
                    pds_reach(&p, s, t).unwrap(),
                    pds_reach(&split, s, t).unwrap(),
                    "pair ({}, {})", s, t
                );
            }
        }
    }

    // Enabling more edit operations never increases the gadget's answer.
    #[test]
    fn led_weight_monotone_in_operations(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let grammar = dyck_grammar(1).unwrap();
        let alphabet: Vec<Symbol> = grammar.terminals().iter().copied().collect();
        let word = random_word(&mut rng, &alphabet, 4);
        let solve = |ops: (bool, bool, bool)| -> Option<u64> {
            let inst = LedInstance::new(word.clone(), grammar.clone(), (1, 1, 1), ops).unwrap();
            let red = led_to_weighted_cflr(&inst).unwrap();
            let Payload::WeightedCfl { grammar, graph, labels } = &red.payload else {
                unreachable!()
            };
            let Query::WeightedSt { source, target } = red.query else {
                unreachable!()
            };
            let (cnf, base) = prepare_instance(grammar, &graph.base, labels).unwrap();
            let wg = cflr::graph::WeightedLabeledGraph::new(base, graph.weights.clone()).unwrap();
            weighted_st_reach(&cnf, &wg, source, target).unwrap()
        };
        let subsets = [
            ((false, false, false), (true, false, false)),
            ((true, false, false), (true, true, false)),
            ((true, true, false), (true, true, true)),
            ((false, true, false), (true, true, true)),
            ((false, false, true), (true, false, true)),
        ];
        for (less, more) in subsets {
            let a = solve(less);
            let b = solve(more);
            match (a, b) {
                (Some(x), Some(y)) => prop_assert!(y <= x),
                (None, _) => {}
                (Some(_), None) => prop_assert!(false, "superset lost the path"),
            }
        }
    }
}

// The CYK table agrees with s-t reachability on the word's path graph; this
// is the trivial recognition-to-reachability reduction.
#[test]
fn recognition_matches_path_graph_reachability() {
    let g = to_cnf(&dyck_grammar(2).unwrap()).unwrap();
    let alphabet: Vec<Symbol> = g.terminals().iter().copied().collect();
    let mut rng = seeded_rng(17);
    for _ in 0..40 {
        let w = random_word(&mut rng, &alphabet, 6);
        let (member, _) = cflr::recognizer::cyk_recognize(&g, &w).unwrap();
        let edges: Vec<(usize, Symbol, usize)> =
            w.iter().enumerate().map(|(i, &s)| (i, s, i + 1)).collect();
        let path = cflr::graph::LabeledGraph::new(w.len() + 1, edges).unwrap();
        let st = cflr::solvers::st_reach(&g, &path, 0, w.len()).unwrap();
        assert_eq!(member, st, "word {:?}", w);
    }
}

// Rendering then parsing preserves grammar structure: the same production
// count and language, and the text is a fixpoint once ids are normalized by
// one parse.
#[test]
fn grammar_text_round_trip_on_random_grammars() {
    let mut rng = seeded_rng(23);
    for _ in 0..30 {
        let g = random_general_grammar(&mut rng, 4, 3, 10);
        let back = Grammar::parse(&g.to_text()).unwrap();
        assert_eq!(back.productions().len(), g.productions().len());
        assert_eq!(back.nonterminals().len(), g.nonterminals().len());
        let again = Grammar::parse(&back.to_text()).unwrap();
        assert_eq!(again.to_text(), back.to_text());
        let alphabet: Vec<Symbol> = g.terminals().iter().copied().collect();
        for w in words_upto(&alphabet, 4) {
            // Map the word into the re-parsed grammar's symbols by name.
            let mapped: Vec<Symbol> = w
                .iter()
                .map(|&s| back.symbols().lookup(g.symbols().name(s)).unwrap())
                .collect();
            assert_eq!(chart_membership(&g, &w), chart_membership(&back, &mapped));
        }
    }
}
