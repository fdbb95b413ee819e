//! CFL-reachability engines: the all-pairs worklist, an early-exit s-t
//! variant, a semi-naive matrix fixed point, the DAG interval solver, the
//! bounded-path-length solver and weighted (minimal-weight) reachability.
//!
//! All engines require a CNF grammar; graphs with `eps`-labeled edges must be
//! paired with an epsilon-lifted grammar and relabeled beforehand.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, VecDeque};

use crate::cnf::{CompiledCnf, NtSet};
use crate::error::{Error, Result};
use crate::grammar::{eps_prime_of, lift_epsilon, to_cnf, Grammar};
use crate::graph::{check_acyclic, layered_dag, LabeledGraph, WeightedLabeledGraph};
use crate::symbol::{SymbolTable, EPS_KEYWORD};
use crate::Symbol;

/// Prepares a (grammar, graph) pair for the CNF-only engines: converts the
/// grammar to CNF and, when the graph carries `eps`-labeled edges, lifts the
/// grammar and relabels those edges with the lifted terminal. Graph labels
/// are resolved by name against the grammar through `labels` (the table the
/// graph was built with), so any label that is neither `eps` nor a grammar
/// terminal is rejected here.
pub fn prepare_instance(
    g: &Grammar,
    d: &LabeledGraph,
    labels: &SymbolTable,
) -> Result<(Grammar, LabeledGraph)> {
    let mut has_eps = false;
    let mut normalized = Vec::with_capacity(d.edges().len());
    for e in d.edges() {
        if e.label.index() >= labels.len() {
            return Err(Error::UnknownLabel(format!("#{}", e.label.0)));
        }
        let name = labels.name(e.label);
        if name == EPS_KEYWORD {
            has_eps = true;
            normalized.push(None);
            continue;
        }
        let resolved = g
            .symbols()
            .lookup(name)
            .filter(|s| g.terminals().contains(s))
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))?;
        normalized.push(Some(resolved));
    }
    let cnf = to_cnf(g)?;
    let (grammar, eps) = if has_eps {
        let lifted = lift_epsilon(&cnf)?;
        let eps = eps_prime_of(&lifted).expect("lifting interns eps'");
        (lifted, Some(eps))
    } else {
        (cnf, None)
    };
    let edges: Vec<(usize, Symbol, usize)> = d
        .edges()
        .iter()
        .zip(&normalized)
        .map(|(e, label)| (e.src, label.or(eps).expect("eps edge implies lift"), e.dst))
        .collect();
    Ok((grammar, LabeledGraph::new(d.vertex_count(), edges)?))
}

/// The computed set of `(src, nonterminal, dst)` facts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reachability {
    n: usize,
    facts: BTreeSet<(usize, Symbol, usize)>,
}

impl Reachability {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn facts(&self) -> &BTreeSet<(usize, Symbol, usize)> {
        &self.facts
    }

    pub fn contains(&self, src: usize, nt: Symbol, dst: usize) -> bool {
        self.facts.contains(&(src, nt, dst))
    }

    /// Pairs related by the start symbol.
    pub fn start_pairs(&self, start: Symbol) -> BTreeSet<(usize, usize)> {
        self.facts
            .iter()
            .filter(|&&(_, a, _)| a == start)
            .map(|&(u, _, v)| (u, v))
            .collect()
    }
}

/// Worklist instrumentation. Every derived triple enters the worklist at
/// most once, so `pops` doubles as the number of distinct facts processed.
#[derive(Debug, Clone, Copy, Default)]
pub struct WorklistStats {
    pub pops: u64,
    pub inserted: u64,
}

/// Flat bitset over (src, nonterminal, dst) triples.
struct FactBits {
    n: usize,
    nts: usize,
    words: Vec<u64>,
}

impl FactBits {
    fn new(n: usize, nts: usize) -> Self {
        let bits = n * nts * n;
        FactBits {
            n,
            nts,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    fn index(&self, u: usize, a: usize, v: usize) -> usize {
        (u * self.nts + a) * self.n + v
    }

    fn insert(&mut self, u: usize, a: usize, v: usize) -> bool {
        let i = self.index(u, a, v);
        let (w, b) = (i / 64, i % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }
}

struct Worklist {
    compiled: CompiledCnf,
    n: usize,
    rel: FactBits,
    /// succ[v][B]: targets t with an indexed fact (v, B, t).
    succ: Vec<Vec<Vec<u32>>>,
    /// pred[v][B]: sources s with an indexed fact (s, B, v).
    pred: Vec<Vec<Vec<u32>>>,
    queue: VecDeque<(u32, u16, u32)>,
    stats: WorklistStats,
}

impl Worklist {
    fn new(g: &Grammar, d: &LabeledGraph) -> Result<Self> {
        let compiled = CompiledCnf::compile(g)?;
        let n = d.vertex_count();
        let nts = compiled.nt_count();
        let mut wl = Worklist {
            n,
            rel: FactBits::new(n, nts),
            succ: vec![vec![Vec::new(); nts]; n],
            pred: vec![vec![Vec::new(); nts]; n],
            queue: VecDeque::new(),
            stats: WorklistStats::default(),
            compiled,
        };
        // Empty paths: every nullable nonterminal relates each vertex to
        // itself.
        let nullable: Vec<usize> = wl.compiled.nullable.iter().collect();
        for v in 0..n {
            for &a in &nullable {
                wl.add(v as u32, a as u16, v as u32);
            }
        }
        for e in d.edges() {
            let t = wl
                .compiled
                .term_id(e.label)
                .ok_or_else(|| Error::UnknownLabel(g.symbols().display_name(e.label)))?;
            let lhs: Vec<usize> = wl.compiled.lhs_by_terminal[t as usize].iter().collect();
            for a in lhs {
                wl.add(e.src as u32, a as u16, e.dst as u32);
            }
        }
        Ok(wl)
    }

    fn add(&mut self, u: u32, a: u16, v: u32) -> bool {
        if self.rel.insert(u as usize, a as usize, v as usize) {
            self.queue.push_back((u, a, v));
            self.stats.inserted += 1;
            true
        } else {
            false
        }
    }

    /// Runs to fixpoint; with `target` set, stops early once that fact has
    /// been derived. Returns whether the target was seen.
    fn run(&mut self, target: Option<(u32, u16, u32)>) -> bool {
        if let Some(t) = target {
            if self.rel_contains(t) {
                return true;
            }
        }
        while let Some((u, a, v)) = self.queue.pop_front() {
            self.stats.pops += 1;
            // Index first so a fact can pair with itself (X -> A A on a
            // self-loop fact); every unordered pair still combines exactly
            // once, when its later member is popped.
            self.succ[u as usize][a as usize].push(v);
            self.pred[v as usize][a as usize].push(u);
            // X -> A C: combine with indexed facts leaving v.
            for bi in 0..self.compiled.by_left[a as usize].len() {
                let (x, c) = self.compiled.by_left[a as usize][bi];
                for ti in 0..self.succ[v as usize][c as usize].len() {
                    let t = self.succ[v as usize][c as usize][ti];
                    if self.add(u, x, t) && target == Some((u, x, t)) {
                        return true;
                    }
                }
            }
            // X -> B A: combine with indexed facts entering u.
            for bi in 0..self.compiled.by_right[a as usize].len() {
                let (x, b) = self.compiled.by_right[a as usize][bi];
                for si in 0..self.pred[u as usize][b as usize].len() {
                    let s = self.pred[u as usize][b as usize][si];
                    if self.add(s, x, v) && target == Some((s, x, v)) {
                        return true;
                    }
                }
            }
        }
        target.map(|t| self.rel_contains(t)).unwrap_or(false)
    }

    fn rel_contains(&self, (u, a, v): (u32, u16, u32)) -> bool {
        let i = self.rel.index(u as usize, a as usize, v as usize);
        self.rel.words[i / 64] & (1 << (i % 64)) != 0
    }

    fn check_pop_bound(&self, g: &Grammar) {
        let bound =
            (g.terminals().len() + g.nonterminals().len()) as u64 * (self.n as u64).pow(2);
        assert!(
            self.stats.pops <= bound,
            "worklist pops {} exceed (|Sigma|+|N|) n^2 = {}",
            self.stats.pops,
            bound
        );
    }

    fn into_reachability(self) -> Reachability {
        let mut facts = BTreeSet::new();
        for u in 0..self.n {
            for a in 0..self.compiled.nt_count() {
                for v in 0..self.n {
                    let i = self.rel.index(u, a, v);
                    if self.rel.words[i / 64] & (1 << (i % 64)) != 0 {
                        facts.insert((u, self.compiled.nt_symbol(a as u16), v));
                    }
                }
            }
        }
        Reachability { n: self.n, facts }
    }
}

/// All-pairs CFL reachability by the worklist algorithm.
pub fn all_pairs_reach(g: &Grammar, d: &LabeledGraph) -> Result<Reachability> {
    Ok(all_pairs_reach_with_stats(g, d)?.0)
}

/// Same as [`all_pairs_reach`] but exposing worklist instrumentation.
pub fn all_pairs_reach_with_stats(
    g: &Grammar,
    d: &LabeledGraph,
) -> Result<(Reachability, WorklistStats)> {
    let mut wl = Worklist::new(g, d)?;
    wl.run(None);
    wl.check_pop_bound(g);
    let stats = wl.stats;
    Ok((wl.into_reachability(), stats))
}

/// s-t CFL reachability: an early-exit worklist run.
pub fn st_reach(g: &Grammar, d: &LabeledGraph, s: usize, t: usize) -> Result<bool> {
    let n = d.vertex_count();
    for v in [s, t] {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
    }
    let mut wl = Worklist::new(g, d)?;
    let start = wl
        .compiled
        .nt_id(g.start())
        .expect("start symbol is always compiled");
    let hit = wl.run(Some((s as u32, start, t as u32)));
    wl.check_pop_bound(g);
    Ok(hit)
}

/// All-pairs CFL reachability as a semi-naive boolean-matrix fixed point.
/// An independent second route used to cross-validate the worklist.
pub fn matrix_all_pairs_reach(g: &Grammar, d: &LabeledGraph) -> Result<Reachability> {
    let compiled = CompiledCnf::compile(g)?;
    let n = d.vertex_count();
    let nts = compiled.nt_count();
    let empty = NtSet::new(nts);
    let mut m = vec![NtSet::new(nts); n * n];
    for v in 0..n {
        let cell = &mut m[v * n + v];
        for a in compiled.nullable.iter() {
            cell.insert(a);
        }
    }
    for e in d.edges() {
        let t = compiled
            .term_id(e.label)
            .ok_or_else(|| Error::UnknownLabel(g.symbols().display_name(e.label)))?;
        m[e.src * n + e.dst].union_with(&compiled.lhs_by_terminal[t as usize]);
    }
    let mut delta = m.clone();
    loop {
        let mut acc = vec![NtSet::new(nts); n * n];
        for u in 0..n {
            for x in 0..n {
                let full = &m[u * n + x];
                let recent = &delta[u * n + x];
                if full.is_empty() && recent.is_empty() {
                    continue;
                }
                for v in 0..n {
                    let out = &mut acc[u * n + v];
                    // New facts need a recent factor on at least one side.
                    compiled.apply_binary(full, &delta[x * n + v], out);
                    compiled.apply_binary(recent, &m[x * n + v], out);
                }
            }
        }
        let mut next_delta = vec![empty.clone(); n * n];
        let mut changed = false;
        for i in 0..n * n {
            for a in acc[i].iter() {
                if m[i].insert(a) {
                    next_delta[i].insert(a);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        delta = next_delta;
    }
    let mut facts = BTreeSet::new();
    for u in 0..n {
        for v in 0..n {
            for a in m[u * n + v].iter() {
                facts.insert((u, compiled.nt_symbol(a as u16), v));
            }
        }
    }
    Ok(Reachability { n, facts })
}

/// All-pairs CFL reachability on a DAG via an upper-triangular matrix of
/// nonterminal sets in topological order, filled with naive set products.
pub fn dag_all_pairs_reach(g: &Grammar, d: &LabeledGraph) -> Result<Reachability> {
    let order = check_acyclic(d).ok_or(Error::Cyclic)?;
    let compiled = CompiledCnf::compile(g)?;
    let n = d.vertex_count();
    let nts = compiled.nt_count();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // cells[pi * n + pj] for pi < pj, indexed by topological position.
    let mut cells = vec![NtSet::new(nts); n * n];
    for e in d.edges() {
        let t = compiled
            .term_id(e.label)
            .ok_or_else(|| Error::UnknownLabel(g.symbols().display_name(e.label)))?;
        debug_assert!(pos[e.src] < pos[e.dst]);
        cells[pos[e.src] * n + pos[e.dst]].union_with(&compiled.lhs_by_terminal[t as usize]);
    }
    for gap in 1..n {
        for pi in 0..n - gap {
            let pj = pi + gap;
            let mut acc = cells[pi * n + pj].clone();
            for pk in pi + 1..pj {
                let (left, right) = (&cells[pi * n + pk], &cells[pk * n + pj]);
                if left.is_empty() || right.is_empty() {
                    continue;
                }
                compiled.apply_binary(left, right, &mut acc);
            }
            // Close under rules with a nullable side; a cell cannot feed
            // itself through interior splits, only through these.
            loop {
                let snapshot = acc.clone();
                let mut changed = compiled.apply_binary(&compiled.nullable, &snapshot, &mut acc);
                changed |= compiled.apply_binary(&snapshot, &compiled.nullable, &mut acc);
                if !changed {
                    break;
                }
            }
            cells[pi * n + pj] = acc;
        }
    }
    let mut facts = BTreeSet::new();
    for v in 0..n {
        for a in compiled.nullable.iter() {
            facts.insert((v, compiled.nt_symbol(a as u16), v));
        }
    }
    for pi in 0..n {
        for pj in pi + 1..n {
            for a in cells[pi * n + pj].iter() {
                facts.insert((order[pi], compiled.nt_symbol(a as u16), order[pj]));
            }
        }
    }
    Ok(Reachability { n, facts })
}

/// Pairs `(src, dst)` connected by an S-path of at most `k` edges: solves
/// the layered DAG with `k + 1` layers and projects per the extraction rule
/// (`O(k)` lookups per pair).
pub fn bounded_path_reach(
    g: &Grammar,
    d: &LabeledGraph,
    k: usize,
) -> Result<BTreeSet<(usize, usize)>> {
    if k == 0 {
        return Err(Error::ZeroParameter("k"));
    }
    let (h, map) = layered_dag(d, k + 1)?;
    let reach = dag_all_pairs_reach(g, &h)?;
    let start = g.start();
    let n = d.vertex_count();
    let mut out = BTreeSet::new();
    for p in 0..n {
        for l in 0..n {
            for layer in 0..=k {
                if reach.contains(map.vertex(0, p), start, map.vertex(layer, l)) {
                    out.insert((p, l));
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// Minimal S-path weight between `s` and `t`, or `None` when no S-path
/// exists. Requires nonnegative edge weights; facts are finalized in
/// priority order `(weight, src, nonterminal, dst)`.
pub fn weighted_st_reach(
    g: &Grammar,
    d: &WeightedLabeledGraph,
    s: usize,
    t: usize,
) -> Result<Option<u64>> {
    let n = d.base.vertex_count();
    for v in [s, t] {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
    }
    let compiled = CompiledCnf::compile(g)?;
    let start = compiled.nt_id(g.start()).expect("start always compiled");
    let target = (s as u32, start, t as u32);
    let mut engine = WeightedEngine::new(g, d, &compiled)?;
    Ok(engine.run(&compiled, Some(target)))
}

/// Full weighted closure: the minimal weight of every derivable fact.
/// Primarily used by consistency checks against the unweighted solver.
pub fn weighted_all_pairs(
    g: &Grammar,
    d: &WeightedLabeledGraph,
) -> Result<BTreeMap<(usize, Symbol, usize), u64>> {
    let compiled = CompiledCnf::compile(g)?;
    let mut engine = WeightedEngine::new(g, d, &compiled)?;
    engine.run(&compiled, None);
    let mut out = BTreeMap::new();
    for ((u, a, v), w) in engine.finalized {
        out.insert((u as usize, compiled.nt_symbol(a), v as usize), w);
    }
    Ok(out)
}

struct WeightedEngine {
    heap: BinaryHeap<Reverse<(u64, u32, u16, u32)>>,
    finalized: HashMap<(u32, u16, u32), u64>,
    fin_out: Vec<Vec<Vec<(u32, u64)>>>,
    fin_in: Vec<Vec<Vec<(u32, u64)>>>,
}

impl WeightedEngine {
    fn new(g: &Grammar, d: &WeightedLabeledGraph, compiled: &CompiledCnf) -> Result<Self> {
        for (i, &w) in d.weights.iter().enumerate() {
            if w < 0 {
                return Err(Error::NegativeWeight { edge: i, weight: w });
            }
        }
        let n = d.base.vertex_count();
        let nts = compiled.nt_count();
        let mut engine = WeightedEngine {
            heap: BinaryHeap::new(),
            finalized: HashMap::new(),
            fin_out: vec![vec![Vec::new(); nts]; n],
            fin_in: vec![vec![Vec::new(); nts]; n],
        };
        for v in 0..n as u32 {
            for a in compiled.nullable.iter() {
                engine.heap.push(Reverse((0, v, a as u16, v)));
            }
        }
        for (i, e) in d.base.edges().iter().enumerate() {
            let t = compiled
                .term_id(e.label)
                .ok_or_else(|| Error::UnknownLabel(g.symbols().display_name(e.label)))?;
            for a in compiled.lhs_by_terminal[t as usize].iter() {
                engine.heap.push(Reverse((
                    d.weights[i] as u64,
                    e.src as u32,
                    a as u16,
                    e.dst as u32,
                )));
            }
        }
        Ok(engine)
    }

    fn run(&mut self, compiled: &CompiledCnf, target: Option<(u32, u16, u32)>) -> Option<u64> {
        while let Some(Reverse((w, u, a, v))) = self.heap.pop() {
            if self.finalized.contains_key(&(u, a, v)) {
                continue;
            }
            self.finalized.insert((u, a, v), w);
            if target == Some((u, a, v)) {
                return Some(w);
            }
            // Record before combining so the fact can pair with itself.
            self.fin_out[u as usize][a as usize].push((v, w));
            self.fin_in[v as usize][a as usize].push((u, w));
            for &(x, c) in &compiled.by_left[a as usize] {
                for &(t, wc) in &self.fin_out[v as usize][c as usize] {
                    if !self.finalized.contains_key(&(u, x, t)) {
                        self.heap.push(Reverse((w + wc, u, x, t)));
                    }
                }
            }
            for &(x, b) in &compiled.by_right[a as usize] {
                for &(s, wb) in &self.fin_in[u as usize][b as usize] {
                    if !self.finalized.contains_key(&(s, x, v)) {
                        self.heap.push(Reverse((wb + w, s, x, v)));
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{dyck_grammar, to_cnf, Grammar};
    use crate::oracles::walk_enum_reach_oracle;
    use crate::SymbolTable;

    fn dyck1_cnf() -> Grammar {
        to_cnf(&dyck_grammar(1).unwrap()).unwrap()
    }

    fn path_graph(g: &Grammar, word: &str) -> LabeledGraph {
        let edges: Vec<(usize, Symbol, usize)> = word
            .chars()
            .enumerate()
            .map(|(i, c)| (i, g.symbols().lookup(&c.to_string()).unwrap(), i + 1))
            .collect();
        LabeledGraph::new(word.len() + 1, edges).unwrap()
    }

    #[test]
    fn single_edge_single_rule() {
        let g = Grammar::parse("S -> a\n").unwrap();
        let a = g.symbols().lookup("a").unwrap();
        let d = LabeledGraph::new(2, vec![(0, a, 1)]).unwrap();
        let r = all_pairs_reach(&g, &d).unwrap();
        assert_eq!(
            r.facts().iter().copied().collect::<Vec<_>>(),
            vec![(0, g.start(), 1)]
        );
    }

    #[test]
    fn st_reach_on_path_graphs() {
        let g = dyck1_cnf();
        let d = path_graph(&g, "()");
        assert!(st_reach(&g, &d, 0, 2).unwrap());
        assert!(!st_reach(&g, &d, 0, 1).unwrap());
        assert!(st_reach(&g, &d, 0, 0).unwrap());
        assert!(st_reach(&g, &d, 2, 2).unwrap());
        assert!(matches!(
            st_reach(&g, &d, 0, 9),
            Err(Error::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn two_cycle_dyck_matches_walk_enumeration() {
        let g = dyck1_cnf();
        let open = g.symbols().lookup("(").unwrap();
        let close = g.symbols().lookup(")").unwrap();
        let d = LabeledGraph::new(2, vec![(0, open, 1), (1, close, 0)]).unwrap();
        let r = all_pairs_reach(&g, &d).unwrap();
        let s = g.start();
        assert!(r.contains(0, s, 0));
        assert!(r.contains(1, s, 1)); // empty path
        assert!(!r.contains(0, s, 1));
        assert!(!r.contains(1, s, 0));
        let oracle = walk_enum_reach_oracle(&g, &d, 8).unwrap().answer;
        assert_eq!(r.start_pairs(s), oracle);
    }

    #[test]
    fn solvers_agree_on_dag() {
        let g = dyck1_cnf();
        let d = path_graph(&g, "(())()");
        let a = all_pairs_reach(&g, &d).unwrap();
        let m = matrix_all_pairs_reach(&g, &d).unwrap();
        let dag = dag_all_pairs_reach(&g, &d).unwrap();
        assert_eq!(a, m);
        assert_eq!(a, dag);
        assert!(a.contains(0, g.start(), 6));
    }

    #[test]
    fn dag_solver_rejects_cycles() {
        let g = dyck1_cnf();
        let open = g.symbols().lookup("(").unwrap();
        let close = g.symbols().lookup(")").unwrap();
        let d = LabeledGraph::new(2, vec![(0, open, 1), (1, close, 0)]).unwrap();
        assert!(matches!(dag_all_pairs_reach(&g, &d), Err(Error::Cyclic)));
    }

    #[test]
    fn dag_solver_on_edgeless_graph() {
        let g = dyck1_cnf();
        let d = LabeledGraph::new(3, vec![]).unwrap();
        let r = dag_all_pairs_reach(&g, &d).unwrap();
        // S -> eps holds, so exactly the self pairs are S-related.
        let pairs = r.start_pairs(g.start());
        assert_eq!(pairs, (0..3).map(|v| (v, v)).collect());
    }

    #[test]
    fn bounded_reach_on_two_cycle() {
        let g = dyck1_cnf();
        let open = g.symbols().lookup("(").unwrap();
        let close = g.symbols().lookup(")").unwrap();
        let d = LabeledGraph::new(2, vec![(0, open, 1), (1, close, 0)]).unwrap();
        let b2 = bounded_path_reach(&g, &d, 2).unwrap();
        assert!(b2.contains(&(0, 0)));
        assert!(!b2.contains(&(0, 1)));
        // Monotone in k and below the full S-relation.
        let b3 = bounded_path_reach(&g, &d, 3).unwrap();
        assert!(b2.is_subset(&b3));
        let full = all_pairs_reach(&g, &d).unwrap().start_pairs(g.start());
        assert!(b3.is_subset(&full));
        assert!(bounded_path_reach(&g, &d, 0).is_err());
    }

    #[test]
    fn bounded_reach_k1_single_terminal() {
        let g = Grammar::parse("S -> a\n").unwrap();
        let mut t = g.symbols().clone();
        let a = t.intern("a");
        let b = t.intern("b");
        let d0 = LabeledGraph::new(3, vec![(0, a, 1), (1, b, 2), (2, a, 0)]).unwrap();
        // b is not a terminal of the grammar: expect an error.
        assert!(bounded_path_reach(&g, &d0, 1).is_err());
        let d = LabeledGraph::new(3, vec![(0, a, 1), (2, a, 0)]).unwrap();
        let r = bounded_path_reach(&g, &d, 1).unwrap();
        assert_eq!(r, [(0, 1), (2, 0)].into_iter().collect());
    }

    #[test]
    fn worklist_processes_each_fact_once() {
        let g = dyck1_cnf();
        let d = path_graph(&g, "(()())");
        let (r, stats) = all_pairs_reach_with_stats(&g, &d).unwrap();
        assert_eq!(stats.pops, stats.inserted);
        assert_eq!(stats.inserted as usize, r.facts().len());
    }

    #[test]
    fn weighted_rejects_negative_weights() {
        let g = dyck1_cnf();
        let base = path_graph(&g, "()");
        let d = WeightedLabeledGraph::new(base, vec![1, -2]).unwrap();
        assert!(matches!(
            weighted_st_reach(&g, &d, 0, 2),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn weighted_finds_minimal_path() {
        let g = dyck1_cnf();
        let open = g.symbols().lookup("(").unwrap();
        let close = g.symbols().lookup(")").unwrap();
        // Two parallel routes spelling "()": weights 5 and 2.
        let base = LabeledGraph::new(
            4,
            vec![
                (0, open, 1),
                (1, close, 3),
                (0, open, 2),
                (2, close, 3),
            ],
        )
        .unwrap();
        let d = WeightedLabeledGraph::new(base, vec![4, 1, 1, 1]).unwrap();
        assert_eq!(weighted_st_reach(&g, &d, 0, 3).unwrap(), Some(2));
        assert_eq!(weighted_st_reach(&g, &d, 1, 2).unwrap(), None);
        assert_eq!(weighted_st_reach(&g, &d, 0, 0).unwrap(), Some(0));
    }

    #[test]
    fn weighted_facts_match_unweighted_and_relax() {
        let g = dyck1_cnf();
        let base = path_graph(&g, "(())");
        let weights = vec![1, 2, 3, 4];
        let d = WeightedLabeledGraph::new(base.clone(), weights).unwrap();
        let weighted = weighted_all_pairs(&g, &d).unwrap();
        let unweighted = all_pairs_reach(&g, &base).unwrap();
        let keys: BTreeSet<_> = weighted.keys().copied().collect();
        assert_eq!(keys, unweighted.facts().iter().copied().collect());
        // Triangle-style relaxation optimality for every binary rule.
        for p in g.productions() {
            if p.rhs.len() != 2 {
                continue;
            }
            for (&(u, a, v), &w) in &weighted {
                if a != p.lhs {
                    continue;
                }
                for x in 0..base.vertex_count() {
                    if let (Some(w1), Some(w2)) = (
                        weighted.get(&(u, p.rhs[0], x)),
                        weighted.get(&(x, p.rhs[1], v)),
                    ) {
                        assert!(w <= w1 + w2);
                    }
                }
            }
        }
    }

    #[test]
    fn unknown_label_is_rejected() {
        let g = dyck1_cnf();
        let mut t = SymbolTable::new();
        let z = t.intern("z");
        let d = LabeledGraph::new(2, vec![(0, z, 1)]).unwrap();
        assert!(matches!(
            all_pairs_reach(&g, &d),
            Err(Error::UnknownLabel(_))
        ));
    }
}
