//! Seeded random instance generators used by the verification harness, the
//! benchmark command and the test suites. All randomness flows from one
//! 64-bit seed; per-trial streams are derived so trials are independent of
//! execution order.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::grammar::{Grammar, Production};
use crate::graph::{LabeledGraph, SubdivisionGraph};
use crate::pds::{Pds, PdsTransition, StackSym};
use crate::reductions::{AeMonoInstance, OvInstance, TriangleInstance};
use crate::symbol::{Symbol, SymbolTable};

/// The root generator for a seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream for one trial: mixing follows splitmix64 so streams
/// do not correlate across trials.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut z = seed ^ trial.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Erdos-Renyi directed labeled multigraph: each ordered pair (including
/// loops) gets an edge with probability `density`, labeled uniformly.
pub fn random_labeled_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
    labels: &[Symbol],
) -> LabeledGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if rng.gen_bool(density) {
                edges.push((u, labels[rng.gen_range(0..labels.len())], v));
            }
        }
    }
    LabeledGraph::new(n, edges).expect("vertices in range by construction")
}

/// Like [`random_labeled_graph`] but acyclic: only forward edges u < v.
pub fn random_labeled_dag(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
    labels: &[Symbol],
) -> LabeledGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.push((u, labels[rng.gen_range(0..labels.len())], v));
            }
        }
    }
    LabeledGraph::new(n, edges).expect("vertices in range by construction")
}

/// A random grammar in strict CNF: terminal names `a, b, ...`, nonterminal
/// names `S, N1, N2, ...`, with `S -> eps` optionally present (and `S` then
/// kept off right-hand sides). Every nonterminal gets at least one
/// production.
pub fn random_cnf_grammar(
    rng: &mut ChaCha8Rng,
    max_nts: usize,
    max_terms: usize,
    max_prods: usize,
) -> Grammar {
    let mut symbols = SymbolTable::new();
    let nt_count = rng.gen_range(1..=max_nts.max(1));
    let term_count = rng.gen_range(1..=max_terms.max(1));
    let start = symbols.intern("S");
    let mut nts = vec![start];
    for i in 1..nt_count {
        nts.push(symbols.intern(&format!("N{i}")));
    }
    let terms: Vec<Symbol> = (0..term_count)
        .map(|i| symbols.intern(&((b'a' + i as u8) as char).to_string()))
        .collect();
    let start_eps = rng.gen_bool(0.3);
    // When S -> eps is in, S must stay off right-hand sides.
    let rhs_nts: Vec<Symbol> = if start_eps && nts.len() > 1 {
        nts[1..].to_vec()
    } else if start_eps {
        Vec::new()
    } else {
        nts.clone()
    };
    let mut productions = Vec::new();
    if start_eps {
        productions.push(Production::new(start, Vec::new()));
    }
    let budget = rng.gen_range(nt_count..=max_prods.max(nt_count));
    for i in 0..budget {
        // Cycle lhs through all nonterminals first so none is productionless.
        let lhs = if i < nt_count {
            nts[i]
        } else {
            nts[rng.gen_range(0..nts.len())]
        };
        let binary = !rhs_nts.is_empty() && rng.gen_bool(0.5);
        if binary {
            let b = rhs_nts[rng.gen_range(0..rhs_nts.len())];
            let c = rhs_nts[rng.gen_range(0..rhs_nts.len())];
            productions.push(Production::new(lhs, vec![b, c]));
        } else {
            let a = terms[rng.gen_range(0..terms.len())];
            productions.push(Production::new(lhs, vec![a]));
        }
    }
    let g = Grammar::new(
        symbols,
        nts.iter().copied().collect(),
        terms.iter().copied().collect(),
        productions,
        start,
    )
    .expect("construction is well-formed");
    debug_assert!(g.is_strict_cnf());
    g
}

/// A random general-form grammar with right-hand sides of length up to 3,
/// used to exercise the CNF conversion.
pub fn random_general_grammar(
    rng: &mut ChaCha8Rng,
    max_nts: usize,
    max_terms: usize,
    max_prods: usize,
) -> Grammar {
    let mut symbols = SymbolTable::new();
    let nt_count = rng.gen_range(1..=max_nts.max(1));
    let term_count = rng.gen_range(1..=max_terms.max(1));
    let start = symbols.intern("S");
    let mut nts = vec![start];
    for i in 1..nt_count {
        nts.push(symbols.intern(&format!("N{i}")));
    }
    let terms: Vec<Symbol> = (0..term_count)
        .map(|i| symbols.intern(&((b'a' + i as u8) as char).to_string()))
        .collect();
    let mut productions = Vec::new();
    let budget = rng.gen_range(nt_count..=max_prods.max(nt_count));
    for i in 0..budget {
        let lhs = if i < nt_count {
            nts[i]
        } else {
            nts[rng.gen_range(0..nts.len())]
        };
        let len = rng.gen_range(0..=3);
        let rhs = (0..len)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    nts[rng.gen_range(0..nts.len())]
                } else {
                    terms[rng.gen_range(0..terms.len())]
                }
            })
            .collect();
        productions.push(Production::new(lhs, rhs));
    }
    Grammar::new(
        symbols,
        nts.iter().copied().collect(),
        terms.iter().copied().collect(),
        productions,
        start,
    )
    .expect("construction is well-formed")
}

pub fn random_word(rng: &mut ChaCha8Rng, alphabet: &[Symbol], max_len: usize) -> Vec<Symbol> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
        .collect()
}

/// Erdos-Renyi simple undirected graph.
pub fn random_triangle_instance(rng: &mut ChaCha8Rng, n: usize, density: f64) -> TriangleInstance {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    TriangleInstance::new(n, edges).expect("simple by construction")
}

/// Uniform random bit vectors.
pub fn random_ov_instance(rng: &mut ChaCha8Rng, n: usize, d: usize) -> OvInstance {
    let vectors = |rng: &mut ChaCha8Rng| {
        (0..n)
            .map(|_| (0..d).map(|_| rng.gen_bool(0.5)).collect())
            .collect::<Vec<Vec<bool>>>()
    };
    let x = vectors(rng);
    let y = vectors(rng);
    OvInstance::new(x, y).expect("dimensions consistent by construction")
}

/// Erdos-Renyi undirected graph with uniform edge colors below `max_color`.
pub fn random_aemono_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
    max_color: u64,
) -> AeMonoInstance {
    let limit = ((n * n) as u64).min(max_color.max(1));
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.push(((u, v), rng.gen_range(0..limit)));
            }
        }
    }
    AeMonoInstance::new(n, edges).expect("colors in range by construction")
}

/// A random pushdown system over a binary stack alphabet with multi-symbol
/// pops and pushes, for transition-splitting tests.
pub fn random_pds(
    rng: &mut ChaCha8Rng,
    states: usize,
    transitions: usize,
    max_word: usize,
    depth_bound: usize,
) -> Pds {
    let word = |rng: &mut ChaCha8Rng| -> Vec<StackSym> {
        let len = rng.gen_range(0..=max_word);
        (0..len).map(|_| rng.gen_range(0..2) as StackSym).collect()
    };
    let transitions = (0..transitions)
        .map(|_| PdsTransition {
            from: rng.gen_range(0..states),
            pop: word(rng),
            push: word(rng),
            to: rng.gen_range(0..states),
        })
        .collect();
    Pds {
        states,
        ordinary: (0..states).collect(),
        stack_alphabet_size: 2,
        transitions,
        depth_bound: Some(depth_bound),
    }
}

/// A random k-subdivision instance: an Erdos-Renyi base digraph over
/// `n` ordinary vertices whose edges are expanded into line-edges spelling
/// random words of length 1..=k over the grammar's terminals.
pub fn random_subdivision_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
    k: usize,
    alphabet: &[Symbol],
) -> SubdivisionGraph {
    let mut lines = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if rng.gen_bool(density) {
                let len = rng.gen_range(1..=k.max(1));
                let word: Vec<Symbol> = (0..len)
                    .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                    .collect();
                lines.push((u, v, word));
            }
        }
    }
    let mut vertices = n;
    let mut edges = Vec::new();
    for (u, v, word) in &lines {
        let mut cur = *u;
        for (i, &sym) in word.iter().enumerate() {
            let next = if i == word.len() - 1 {
                *v
            } else {
                vertices += 1;
                vertices - 1
            };
            edges.push((cur, sym, next));
            cur = next;
        }
    }
    let base = LabeledGraph::new(vertices, edges).expect("in range by construction");
    let ordinary: BTreeSet<usize> = (0..n).collect();
    SubdivisionGraph::new(base, ordinary).expect("valid subdivision by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_streams_are_reproducible_and_distinct() {
        let a: u64 = trial_rng(7, 3).gen();
        let b: u64 = trial_rng(7, 3).gen();
        let c: u64 = trial_rng(7, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn generated_cnf_grammars_are_strict() {
        let mut rng = seeded_rng(11);
        for _ in 0..50 {
            let g = random_cnf_grammar(&mut rng, 4, 3, 8);
            assert!(g.is_strict_cnf());
            assert!(g.size() >= 2);
        }
    }

    #[test]
    fn generated_subdivisions_validate() {
        let mut rng = seeded_rng(3);
        let mut table = SymbolTable::new();
        let alphabet = [table.intern("a"), table.intern("b")];
        for _ in 0..20 {
            let sd = random_subdivision_graph(&mut rng, 4, 0.4, 3, &alphabet);
            assert!(sd.k <= 3);
            assert!(sd.line_edges().is_ok());
        }
    }
}
