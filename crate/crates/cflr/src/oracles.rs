//! Independent brute-force reference implementations. These are deliberately
//! naive and share no solver code paths with the engines they check.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::grammar::{to_cnf, Grammar};
use crate::graph::LabeledGraph;
use crate::recognizer::cyk_recognize;
use crate::reductions::{AeMonoInstance, LedInstance, OvInstance, TriangleInstance};
use crate::Symbol;

/// An oracle answer together with the number of elementary operations the
/// oracle performed (triple scans, dot products, candidate words tested).
#[derive(Debug, Clone)]
pub struct OracleRun<T> {
    pub answer: T,
    pub operations: u64,
}

/// Summary of one oracle invocation, as reported by the debug CLI.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub problem: String,
    pub digest: String,
    pub answer: OracleAnswer,
    pub operations: u64,
}

#[derive(Debug, Clone)]
pub enum OracleAnswer {
    Bool(bool),
    PerEdge(Vec<((usize, usize), bool)>),
    Distance(Option<u64>),
}

/// FNV-1a digest of an instance text; stable across runs and processes.
pub fn instance_digest(text: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// All-triples triangle scan, exact in O(n^3).
pub fn triangle_oracle(u: &TriangleInstance) -> OracleRun<bool> {
    let n = u.n;
    let mut ops = 0;
    for i in 0..n {
        for j in i + 1..n {
            if !u.adjacent(i, j) {
                continue;
            }
            for k in j + 1..n {
                ops += 1;
                if u.adjacent(i, k) && u.adjacent(j, k) {
                    return OracleRun {
                        answer: true,
                        operations: ops,
                    };
                }
            }
        }
    }
    OracleRun {
        answer: false,
        operations: ops,
    }
}

/// All-pairs dot products, exact in O(n^2 d).
pub fn ov_oracle(inst: &OvInstance) -> Result<OracleRun<bool>> {
    let d = inst.dimension();
    for v in inst.x.iter().chain(inst.y.iter()) {
        if v.len() != d {
            return Err(Error::Invalid(format!(
                "vector dimension {} does not match {}",
                v.len(),
                d
            )));
        }
    }
    let mut ops = 0;
    for x in &inst.x {
        for y in &inst.y {
            ops += 1;
            if x.iter().zip(y).all(|(&a, &b)| !(a && b)) {
                return Ok(OracleRun {
                    answer: true,
                    operations: ops,
                });
            }
        }
    }
    Ok(OracleRun {
        answer: false,
        operations: ops,
    })
}

/// Per-edge monochromatic-triangle answers by an all-triples scan.
pub fn aemono_oracle(inst: &AeMonoInstance) -> OracleRun<BTreeMap<(usize, usize), bool>> {
    let mut ops = 0;
    let mut out = BTreeMap::new();
    for (&(u, v), &c) in &inst.colors {
        let mut found = false;
        for w in 0..inst.n {
            if w == u || w == v {
                continue;
            }
            ops += 1;
            if inst.color(u, w) == Some(c) && inst.color(v, w) == Some(c) {
                found = true;
                break;
            }
        }
        out.insert((u, v), found);
    }
    OracleRun {
        answer: out,
        operations: ops,
    }
}

/// Second, independently structured coding of the same question: edges are
/// bucketed by color and each bucket contributes an adjacency bitmap.
pub fn aemono_oracle_bucketed(inst: &AeMonoInstance) -> BTreeMap<(usize, usize), bool> {
    let mut buckets: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    assert!(inst.n <= 64, "bucketed oracle uses one-word bitmaps");
    for (&(u, v), &c) in &inst.colors {
        let adj = buckets.entry(c).or_insert_with(|| vec![0u64; inst.n]);
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    inst.colors
        .iter()
        .map(|(&(u, v), &c)| {
            let adj = &buckets[&c];
            ((u, v), adj[u] & adj[v] != 0)
        })
        .collect()
}

/// Result of [`led_oracle`]: either the exact distance, or a marker that the
/// true distance exceeds the search radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LedOutcome {
    Exact(u64),
    ExceedsRadius,
}

/// Cheapest-first search over edit sequences of total cost at most `radius`
/// under the instance's enabled operations, testing each candidate word with
/// CYK. Visited words are deduplicated and words longer than
/// `|w| + radius` are pruned, which is exact for unit-class costs.
pub fn led_oracle(inst: &LedInstance, radius: u64) -> Result<OracleRun<LedOutcome>> {
    let cnf = to_cnf(&inst.grammar)?;
    let terminals: Vec<Symbol> = inst.grammar.terminals().iter().copied().collect();
    let max_len = inst.word.len() + usize::try_from(radius).unwrap_or(usize::MAX);
    let mut best: HashMap<Vec<Symbol>, u64> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(u64, Vec<Symbol>)>> = BinaryHeap::new();
    heap.push(Reverse((0, inst.word.clone())));
    best.insert(inst.word.clone(), 0);
    let mut ops = 0u64;
    while let Some(Reverse((cost, w))) = heap.pop() {
        if cost > radius {
            break;
        }
        if best.get(&w).is_some_and(|&b| b < cost) {
            continue;
        }
        ops += 1;
        if cyk_recognize(&cnf, &w)?.0 {
            return Ok(OracleRun {
                answer: LedOutcome::Exact(cost),
                operations: ops,
            });
        }
        let mut push = |word: Vec<Symbol>, c: u64, heap: &mut BinaryHeap<_>| {
            if word.len() > max_len {
                return;
            }
            match best.get(&word) {
                Some(&b) if b <= c => {}
                _ => {
                    best.insert(word.clone(), c);
                    heap.push(Reverse((c, word)));
                }
            }
        };
        if inst.allow_ins {
            for pos in 0..=w.len() {
                for &s in &terminals {
                    let mut w2 = w.clone();
                    w2.insert(pos, s);
                    push(w2, cost + inst.cost_ins, &mut heap);
                }
            }
        }
        if inst.allow_del {
            for pos in 0..w.len() {
                let mut w2 = w.clone();
                w2.remove(pos);
                push(w2, cost + inst.cost_del, &mut heap);
            }
        }
        if inst.allow_repl {
            for pos in 0..w.len() {
                for &s in &terminals {
                    if s == w[pos] {
                        continue;
                    }
                    let mut w2 = w.clone();
                    w2[pos] = s;
                    push(w2, cost + inst.cost_repl, &mut heap);
                }
            }
        }
    }
    Ok(OracleRun {
        answer: LedOutcome::ExceedsRadius,
        operations: ops,
    })
}

/// Enumerates every walk of length at most `max_len`, tests the label word
/// with CYK against the CNF grammar `g`, and returns the S-reachable pairs.
/// Exact for paths of length up to `max_len`.
pub fn walk_enum_reach_oracle(
    g: &Grammar,
    d: &LabeledGraph,
    max_len: usize,
) -> Result<OracleRun<BTreeSet<(usize, usize)>>> {
    for e in d.edges() {
        if !g.terminals().contains(&e.label) {
            return Err(Error::UnknownLabel(g.symbols().display_name(e.label)));
        }
    }
    let out = d.out_edges();
    let mut cache: HashMap<Vec<Symbol>, bool> = HashMap::new();
    let mut ops = 0u64;
    let mut reachable = BTreeSet::new();
    for start in 0..d.vertex_count() {
        let mut frontier: BTreeSet<(usize, Vec<Symbol>)> = BTreeSet::new();
        frontier.insert((start, Vec::new()));
        for _len in 0..=max_len {
            for (v, word) in &frontier {
                let member = match cache.get(word) {
                    Some(&m) => m,
                    None => {
                        ops += 1;
                        let m = cyk_recognize(g, word)?.0;
                        cache.insert(word.clone(), m);
                        m
                    }
                };
                if member {
                    reachable.insert((start, *v));
                }
            }
            let mut next = BTreeSet::new();
            for (v, word) in &frontier {
                for &ei in &out[*v] {
                    let e = &d.edges()[ei];
                    let mut w2 = word.clone();
                    w2.push(e.label);
                    next.insert((e.dst, w2));
                }
            }
            frontier = next;
        }
    }
    Ok(OracleRun {
        answer: reachable,
        operations: ops,
    })
}

/// Exhaustive leftmost-derivation search with step cap `2|w| + 2`; exact for
/// CNF grammars (including epsilon-lifted ones, whose derivations stay within
/// the cap). Used as the membership oracle in tests.
pub fn derivation_search_cnf(g: &Grammar, w: &[Symbol]) -> bool {
    let n = w.len();
    let cap = 2 * n + 2;
    let nullable = g.nullable_set();
    let nonterminals = g.nonterminals();
    // A state is the leftmost sentential form normalized against w:
    // (number of matched terminals, remaining suffix starting at a
    // nonterminal). `None` means the form died on a terminal mismatch.
    let normalize = |mut matched: usize, mut suffix: Vec<Symbol>| -> Option<(usize, Vec<Symbol>)> {
        loop {
            match suffix.first() {
                Some(&s) if !nonterminals.contains(&s) => {
                    if matched < n && w[matched] == s {
                        matched += 1;
                        suffix.remove(0);
                    } else {
                        return None;
                    }
                }
                _ => return Some((matched, suffix)),
            }
        }
    };
    let Some(start) = normalize(0, vec![g.start()]) else {
        return false;
    };
    let mut seen: HashSet<(usize, Vec<Symbol>)> = HashSet::new();
    let mut frontier = vec![start.clone()];
    seen.insert(start);
    for _step in 0..cap {
        if frontier.is_empty() {
            return false;
        }
        let mut next = Vec::new();
        for (matched, suffix) in frontier.drain(..) {
            if suffix.is_empty() {
                if matched == n {
                    return true;
                }
                continue;
            }
            let head = suffix[0];
            let non_nullable = suffix
                .iter()
                .filter(|s| !nullable.contains(s) || !nonterminals.contains(s))
                .count();
            if non_nullable > n - matched {
                continue;
            }
            if suffix.len() > 2 * n + 4 {
                continue;
            }
            for p in g.productions() {
                if p.lhs != head {
                    continue;
                }
                let mut form = p.rhs.clone();
                form.extend_from_slice(&suffix[1..]);
                if let Some(state) = normalize(matched, form) {
                    if state.1.is_empty() && state.0 == n {
                        return true;
                    }
                    if seen.insert(state.clone()) {
                        next.push(state);
                    }
                }
            }
        }
        frontier = next;
        assert!(
            seen.len() < 4_000_000,
            "derivation search exploded; shrink the test grammar"
        );
    }
    false
}

/// Bottom-up chart recognition for arbitrary context-free grammars (any rhs
/// length, epsilon rules, unit cycles). Exact; used to check the grammar
/// transformations rather than any particular parser.
pub fn chart_membership(g: &Grammar, w: &[Symbol]) -> bool {
    let n = w.len();
    let nts: Vec<Symbol> = g.nonterminals().iter().copied().collect();
    let id: HashMap<Symbol, usize> = nts.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let nullable = g.nullable_set();
    // derive[a][i][j] (i <= j): nonterminal a derives w[i..j].
    let mut derive = vec![vec![vec![false; n + 1]; n + 1]; nts.len()];
    for (ai, s) in nts.iter().enumerate() {
        if nullable.contains(s) {
            for i in 0..=n {
                derive[ai][i][i] = true;
            }
        }
    }
    loop {
        let mut changed = false;
        for p in g.productions() {
            let a = id[&p.lhs];
            for i in 0..=n {
                // Positions reachable after consuming a prefix of the rhs.
                let mut cur = vec![false; n + 1];
                cur[i] = true;
                for sym in &p.rhs {
                    let mut nxt = vec![false; n + 1];
                    for (ppos, &on) in cur.iter().enumerate() {
                        if !on {
                            continue;
                        }
                        if let Some(&b) = id.get(sym) {
                            for (q, slot) in nxt.iter_mut().enumerate().skip(ppos) {
                                if derive[b][ppos][q] {
                                    *slot = true;
                                }
                            }
                        } else if ppos < n && w[ppos] == *sym {
                            nxt[ppos + 1] = true;
                        }
                    }
                    cur = nxt;
                }
                for (j, &on) in cur.iter().enumerate().skip(i) {
                    if on && !derive[a][i][j] {
                        derive[a][i][j] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    derive[id[&g.start()]][0][n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::dyck_grammar;

    #[test]
    fn triangle_oracle_basics() {
        let k3 = TriangleInstance::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(triangle_oracle(&k3).answer);
        let c4 = TriangleInstance::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert!(!triangle_oracle(&c4).answer);
        let star = TriangleInstance::new(6, vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        assert!(!triangle_oracle(&star).answer);
    }

    #[test]
    fn ov_oracle_basics() {
        let yes = OvInstance::new(vec![vec![true, false]], vec![vec![false, true]]).unwrap();
        assert!(ov_oracle(&yes).unwrap().answer);
        let no = OvInstance::new(vec![vec![true, true]], vec![vec![true, true]]).unwrap();
        assert!(!ov_oracle(&no).unwrap().answer);
        let zero = OvInstance::new(
            vec![vec![false, false], vec![true, true]],
            vec![vec![true, true], vec![true, false]],
        )
        .unwrap();
        assert!(ov_oracle(&zero).unwrap().answer);
    }

    #[test]
    fn aemono_oracle_basics() {
        let mono =
            AeMonoInstance::new(3, vec![((0, 1), 0), ((1, 2), 0), ((0, 2), 0)]).unwrap();
        assert!(aemono_oracle(&mono).answer.values().all(|&b| b));
        let rainbow =
            AeMonoInstance::new(3, vec![((0, 1), 0), ((1, 2), 1), ((0, 2), 2)]).unwrap();
        assert!(aemono_oracle(&rainbow).answer.values().all(|&b| !b));
    }

    #[test]
    fn led_oracle_on_dyck() {
        let g = dyck_grammar(1).unwrap();
        let open = g.symbols().lookup("(").unwrap();
        let close = g.symbols().lookup(")").unwrap();
        let unit = |word: Vec<Symbol>| {
            LedInstance::new(word, g.clone(), (1, 1, 1), (true, true, true)).unwrap()
        };
        let r = led_oracle(&unit(vec![open, close]), 3).unwrap();
        assert_eq!(r.answer, LedOutcome::Exact(0));
        let r = led_oracle(&unit(vec![open]), 3).unwrap();
        assert_eq!(r.answer, LedOutcome::Exact(1));
        let r = led_oracle(&unit(vec![close, open]), 4).unwrap();
        assert_eq!(r.answer, LedOutcome::Exact(2));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(instance_digest("abc"), instance_digest("abc"));
        assert_ne!(instance_digest("abc"), instance_digest("abd"));
    }
}
