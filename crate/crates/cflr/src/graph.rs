//! Edge-labeled directed multigraphs, their weighted and subdivision
//! variants, the layered-DAG builder and acyclicity checking.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::symbol::SymbolTable;
use crate::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub label: Symbol,
    pub dst: usize,
}

/// A directed multigraph with terminal-labeled edges. Parallel edges and
/// self-loops are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl LabeledGraph {
    pub fn new(n: usize, edges: Vec<(usize, Symbol, usize)>) -> Result<Self> {
        for &(src, _, dst) in &edges {
            for v in [src, dst] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
        }
        Ok(LabeledGraph {
            n,
            edges: edges
                .into_iter()
                .map(|(src, label, dst)| Edge { src, label, dst })
                .collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Out-adjacency: for each vertex the indices of its outgoing edges.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.src].push(i);
        }
        out
    }

    /// In-adjacency: for each vertex the indices of its incoming edges.
    pub fn in_edges(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.dst].push(i);
        }
        inc
    }

    /// Replaces every edge labeled `from` with the same edge labeled `to`.
    pub fn relabel(&self, from: Symbol, to: Symbol) -> LabeledGraph {
        let mut g = self.clone();
        for e in &mut g.edges {
            if e.label == from {
                e.label = to;
            }
        }
        g
    }
}

/// A labeled graph with one integer weight per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedLabeledGraph {
    pub base: LabeledGraph,
    pub weights: Vec<i64>,
}

impl WeightedLabeledGraph {
    pub fn new(base: LabeledGraph, weights: Vec<i64>) -> Result<Self> {
        if weights.len() != base.edges().len() {
            return Err(Error::Invalid(format!(
                "weight list length {} does not match edge count {}",
                weights.len(),
                base.edges().len()
            )));
        }
        Ok(WeightedLabeledGraph { base, weights })
    }

    /// Bellman-Ford on the label-erased graph: true when some directed cycle
    /// has negative total weight.
    pub fn has_negative_cycle(&self) -> bool {
        let n = self.base.vertex_count();
        if n == 0 {
            return false;
        }
        //距 from a virtual source connected to every vertex with weight 0.
        let mut dist = vec![0i64; n];
        for round in 0..n {
            let mut changed = false;
            for (i, e) in self.base.edges().iter().enumerate() {
                let cand = dist[e.src].saturating_add(self.weights[i]);
                if cand < dist[e.dst] {
                    dist[e.dst] = cand;
                    changed = true;
                }
            }
            if !changed {
                return false;
            }
            if round == n - 1 {
                return true;
            }
        }
        false
    }
}

/// Maps vertices of a layered graph back to `(layer, original vertex)`.
#[derive(Debug, Clone, Copy)]
pub struct LayerMap {
    n: usize,
    layers: usize,
}

impl LayerMap {
    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn original(&self, idx: usize) -> (usize, usize) {
        (idx / self.n, idx % self.n)
    }

    pub fn vertex(&self, layer: usize, v: usize) -> usize {
        debug_assert!(layer < self.layers && v < self.n);
        layer * self.n + v
    }
}

/// Builds the layered graph with `k` copies of the vertex set and edges only
/// from layer `i` to layer `i + 1`, copying the input edges with labels. The
/// result has exactly `k * n` vertices and `(k - 1) * |E|` edges and is
/// acyclic by construction.
pub fn layered_dag(d: &LabeledGraph, k: usize) -> Result<(LabeledGraph, LayerMap)> {
    if k == 0 {
        return Err(Error::ZeroParameter("k"));
    }
    let n = d.vertex_count();
    let map = LayerMap { n, layers: k };
    let mut edges = Vec::with_capacity((k.saturating_sub(1)) * d.edges().len());
    for layer in 0..k.saturating_sub(1) {
        for e in d.edges() {
            edges.push((map.vertex(layer, e.src), e.label, map.vertex(layer + 1, e.dst)));
        }
    }
    let h = LabeledGraph::new(k * n, edges)?;
    Ok((h, map))
}

/// Returns a topological order when the graph is acyclic, `None` otherwise.
pub fn check_acyclic(d: &LabeledGraph) -> Option<Vec<usize>> {
    let n = d.vertex_count();
    let mut indegree = vec![0usize; n];
    for e in d.edges() {
        indegree[e.dst] += 1;
    }
    let out = d.out_edges();
    let mut queue: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop() {
        order.push(v);
        for &ei in &out[v] {
            let w = d.edges()[ei].dst;
            indegree[w] -= 1;
            if indegree[w] == 0 {
                queue.push(w);
            }
        }
    }
    if order.len() == n {
        Some(order)
    } else {
        None
    }
}

/// One subdivided edge of a subdivision graph: the chain of base edges from
/// one ordinary vertex to the next, spelling `word`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineEdge {
    pub src: usize,
    pub dst: usize,
    pub word: Vec<Symbol>,
    /// Edge indices of the chain inside the base graph.
    pub edge_indices: Vec<usize>,
}

/// A graph known to be a subdivision of a smaller graph: `ordinary` marks
/// the original vertices, every other ("additional") vertex has in- and
/// out-degree one and lies on a unique line-edge of length at most `k`.
#[derive(Debug, Clone)]
pub struct SubdivisionGraph {
    pub base: LabeledGraph,
    pub ordinary: BTreeSet<usize>,
    pub k: usize,
}

impl SubdivisionGraph {
    /// Validates the subdivision structure and computes `k` as the maximum
    /// line-edge length.
    pub fn new(base: LabeledGraph, ordinary: BTreeSet<usize>) -> Result<Self> {
        let lines = extract_line_edges(&base, &ordinary)?;
        let k = lines.iter().map(|l| l.word.len()).max().unwrap_or(1);
        Ok(SubdivisionGraph { base, ordinary, k })
    }

    pub fn line_edges(&self) -> Result<Vec<LineEdge>> {
        extract_line_edges(&self.base, &self.ordinary)
    }
}

fn extract_line_edges(base: &LabeledGraph, ordinary: &BTreeSet<usize>) -> Result<Vec<LineEdge>> {
    let n = base.vertex_count();
    for &v in ordinary {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
    }
    let out = base.out_edges();
    let inc = base.in_edges();
    for v in 0..n {
        if !ordinary.contains(&v) && (out[v].len() != 1 || inc[v].len() != 1) {
            return Err(Error::BadSubdivision(format!(
                "additional vertex {v} must have in-degree 1 and out-degree 1 \
                 (has {} in, {} out)",
                inc[v].len(),
                out[v].len()
            )));
        }
    }
    let mut used = vec![false; base.edges().len()];
    let mut lines = Vec::new();
    for &start in ordinary {
        for &first in &out[start] {
            let mut word = vec![base.edges()[first].label];
            let mut chain = vec![first];
            used[first] = true;
            let mut at = base.edges()[first].dst;
            while !ordinary.contains(&at) {
                let ei = out[at][0];
                if used[ei] {
                    return Err(Error::BadSubdivision(
                        "additional vertices form a cycle".into(),
                    ));
                }
                used[ei] = true;
                word.push(base.edges()[ei].label);
                chain.push(ei);
                at = base.edges()[ei].dst;
            }
            lines.push(LineEdge {
                src: start,
                dst: at,
                word,
                edge_indices: chain,
            });
        }
    }
    if let Some(i) = used.iter().position(|&u| !u) {
        return Err(Error::BadSubdivision(format!(
            "edge {i} is not on any line-edge between ordinary vertices"
        )));
    }
    Ok(lines)
}

/// Parsed form of the graph text format before labels are resolved against
/// a grammar's symbol table.
#[derive(Debug, Clone)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, String, usize)>,
    pub weights: Option<Vec<i64>>,
    pub ordinary: Option<Vec<usize>>,
}

impl GraphFile {
    /// Parses `n m [weighted]` followed by `src label dst [weight]` lines and
    /// an optional trailing `ordinary: v1 v2 ...` section.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| match l.find('#') {
                Some(p) => &l[..p],
                None => l,
            })
            .filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() < 2 || head.len() > 3 {
            return Err(Error::Parse("graph header must be `n m [weighted]`".into()));
        }
        let n: usize = head[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad vertex count `{}`", head[0])))?;
        let m: usize = head[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad edge count `{}`", head[1])))?;
        let weighted = match head.get(2) {
            None => false,
            Some(&"weighted") => true,
            Some(other) => {
                return Err(Error::Parse(format!("unexpected header token `{other}`")))
            }
        };
        let mut edges = Vec::with_capacity(m);
        let mut weights = if weighted { Some(Vec::with_capacity(m)) } else { None };
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("fewer edge lines than declared".into()))?;
            let tok: Vec<&str> = line.split_whitespace().collect();
            let expect = if weighted { 4 } else { 3 };
            if tok.len() != expect {
                return Err(Error::Parse(format!(
                    "edge line `{}` must have {} fields",
                    line.trim(),
                    expect
                )));
            }
            let src: usize = tok[0]
                .parse()
                .map_err(|_| Error::Parse(format!("bad vertex `{}`", tok[0])))?;
            let dst: usize = tok[2]
                .parse()
                .map_err(|_| Error::Parse(format!("bad vertex `{}`", tok[2])))?;
            if src >= n || dst >= n {
                return Err(Error::Parse(format!(
                    "edge `{}` references a vertex >= {}",
                    line.trim(),
                    n
                )));
            }
            edges.push((src, tok[1].to_string(), dst));
            if let Some(w) = weights.as_mut() {
                w.push(
                    tok[3]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad weight `{}`", tok[3])))?,
                );
            }
        }
        let mut ordinary = None;
        for line in lines {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("ordinary:") {
                let mut vs = Vec::new();
                for tok in rest.split_whitespace() {
                    let v: usize = tok
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad ordinary vertex `{tok}`")))?;
                    if v >= n {
                        return Err(Error::Parse(format!("ordinary vertex {v} out of range")));
                    }
                    vs.push(v);
                }
                ordinary = Some(vs);
            } else {
                return Err(Error::Parse(format!("unexpected trailing line `{line}`")));
            }
        }
        Ok(GraphFile {
            n,
            edges,
            weights,
            ordinary,
        })
    }

    /// Interns labels into `symbols` and builds the labeled graph.
    pub fn resolve(&self, symbols: &mut SymbolTable) -> Result<LabeledGraph> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for (src, label, dst) in &self.edges {
            if label == crate::symbol::EPS_PRIME {
                return Err(Error::ReservedSymbol(label.clone()));
            }
            edges.push((*src, symbols.intern(label), *dst));
        }
        LabeledGraph::new(self.n, edges)
    }
}

/// Renders a graph in the text format, with optional weights and subdivision
/// metadata.
pub fn graph_to_text(
    g: &LabeledGraph,
    symbols: &SymbolTable,
    weights: Option<&[i64]>,
    ordinary: Option<&BTreeSet<usize>>,
) -> String {
    let mut out = String::new();
    let tag = if weights.is_some() { " weighted" } else { "" };
    let _ = writeln!(out, "{} {}{}", g.vertex_count(), g.edges().len(), tag);
    for (i, e) in g.edges().iter().enumerate() {
        match weights {
            Some(w) => {
                let _ = writeln!(out, "{} {} {} {}", e.src, symbols.name(e.label), e.dst, w[i]);
            }
            None => {
                let _ = writeln!(out, "{} {} {}", e.src, symbols.name(e.label), e.dst);
            }
        }
    }
    if let Some(ord) = ordinary {
        let list: Vec<String> = ord.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "ordinary: {}", list.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syms() -> (SymbolTable, Symbol, Symbol) {
        let mut t = SymbolTable::new();
        let a = t.intern("a");
        let b = t.intern("b");
        (t, a, b)
    }

    #[test]
    fn layered_counts_are_exact() {
        let (_, a, b) = syms();
        let d = LabeledGraph::new(2, vec![(0, a, 1), (1, b, 0)]).unwrap();
        let (h, map) = layered_dag(&d, 3).unwrap();
        assert_eq!(h.vertex_count(), 6);
        assert_eq!(h.edges().len(), 2 * 2);
        assert!(check_acyclic(&h).is_some());
        assert_eq!(map.original(map.vertex(2, 1)), (2, 1));
        // k = 1 gives isolated vertices.
        let (h1, _) = layered_dag(&d, 1).unwrap();
        assert_eq!(h1.vertex_count(), 2);
        assert!(h1.edges().is_empty());
        assert!(layered_dag(&d, 0).is_err());
    }

    #[test]
    fn layered_cycle_becomes_path() {
        let (_, a, b) = syms();
        // v -> u -> v with labels a, b lifts to v1 -> u2 -> v3.
        let d = LabeledGraph::new(2, vec![(0, a, 1), (1, b, 0)]).unwrap();
        let (h, map) = layered_dag(&d, 3).unwrap();
        let v1 = map.vertex(0, 0);
        let u2 = map.vertex(1, 1);
        let v3 = map.vertex(2, 0);
        assert!(h
            .edges()
            .iter()
            .any(|e| e.src == v1 && e.dst == u2 && e.label == a));
        assert!(h
            .edges()
            .iter()
            .any(|e| e.src == u2 && e.dst == v3 && e.label == b));
    }

    #[test]
    fn acyclicity_detection() {
        let (_, a, b) = syms();
        let single = LabeledGraph::new(2, vec![(0, a, 1)]).unwrap();
        assert!(check_acyclic(&single).is_some());
        let cycle = LabeledGraph::new(2, vec![(0, a, 1), (1, b, 0)]).unwrap();
        assert!(check_acyclic(&cycle).is_none());
    }

    #[test]
    fn negative_cycle_detection() {
        let (_, a, b) = syms();
        let cycle = LabeledGraph::new(2, vec![(0, a, 1), (1, b, 0)]).unwrap();
        let w = WeightedLabeledGraph::new(cycle.clone(), vec![2, -3]).unwrap();
        assert!(w.has_negative_cycle());
        let w2 = WeightedLabeledGraph::new(cycle, vec![2, -1]).unwrap();
        assert!(!w2.has_negative_cycle());
    }

    #[test]
    fn parse_and_render_round_trip() {
        let text = "3 2 weighted\n0 a 1 4\n1 b 2 -1\n";
        let f = GraphFile::parse(text).unwrap();
        assert_eq!(f.n, 3);
        assert_eq!(f.weights.as_ref().unwrap(), &vec![4, -1]);
        let mut t = SymbolTable::new();
        let g = f.resolve(&mut t).unwrap();
        let rendered = graph_to_text(&g, &t, f.weights.as_deref(), None);
        assert_eq!(rendered, text);
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(GraphFile::parse("").is_err());
        assert!(GraphFile::parse("2 1\n0 a 5\n").is_err());
        assert!(GraphFile::parse("2 2\n0 a 1\n").is_err());
        assert!(GraphFile::parse("1 0 wat\n").is_err());
    }

    #[test]
    fn subdivision_validation() {
        let (mut t, a, b) = syms();
        let c = t.intern("c");
        // 0 -> 2 -> 1 with 2 additional, plus a direct 0 -> 1 edge.
        let base = LabeledGraph::new(3, vec![(0, a, 2), (2, b, 1), (0, c, 1)]).unwrap();
        let ordinary: BTreeSet<usize> = [0, 1].into_iter().collect();
        let sd = SubdivisionGraph::new(base, ordinary).unwrap();
        assert_eq!(sd.k, 2);
        let lines = sd.line_edges().unwrap();
        assert_eq!(lines.len(), 2);
        // An additional vertex with out-degree 2 is rejected.
        let bad = LabeledGraph::new(3, vec![(0, a, 2), (2, b, 1), (2, c, 0)]).unwrap();
        assert!(SubdivisionGraph::new(bad, [0, 1].into_iter().collect()).is_err());
    }
}
