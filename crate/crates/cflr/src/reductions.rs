//! Gadget constructions: triangle detection and orthogonal vectors into Dyck
//! reachability, triangle detection and all-edges monochromatic triangles
//! into bounded-depth pushdown systems (also as a subdivision-graph CFL
//! instance), language edit distance into weighted reachability, and the
//! subdivision-graph preprocessing pipeline.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grammar::{dyck_grammar, lift_epsilon, to_cnf, Grammar};
use crate::graph::{LabeledGraph, SubdivisionGraph, WeightedLabeledGraph};
use crate::pda::{cfg_to_pda, pda_to_cfg, tuple_pda};
use crate::pds::{split_transitions, Pds, PdsTransition, StackSym};
use crate::symbol::{Symbol, SymbolTable, EPS_KEYWORD};

// ---------------------------------------------------------------------------
// Source problem instances
// ---------------------------------------------------------------------------

/// A simple undirected graph for triangle detection.
#[derive(Debug, Clone)]
pub struct TriangleInstance {
    pub n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl TriangleInstance {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                return Err(Error::Invalid(format!("self-loop at vertex {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(TriangleInstance { n, edges: set })
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Format: `n m` header, then one `u v` line per undirected edge.
    pub fn parse(text: &str) -> Result<Self> {
        let (n, rows) = parse_header_rows(text, 2)?;
        TriangleInstance::new(n, rows.into_iter().map(|r| (r[0], r[1])).collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Two equal-size sets of boolean vectors for orthogonal-vectors queries.
#[derive(Debug, Clone)]
pub struct OvInstance {
    pub x: Vec<Vec<bool>>,
    pub y: Vec<Vec<bool>>,
}

impl OvInstance {
    pub fn new(x: Vec<Vec<bool>>, y: Vec<Vec<bool>>) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::Invalid(
                "OV instance needs two nonempty vector sets of equal size".into(),
            ));
        }
        let d = x[0].len();
        for v in x.iter().chain(y.iter()) {
            if v.len() != d {
                return Err(Error::Invalid("inconsistent vector dimensions".into()));
            }
        }
        Ok(OvInstance { x, y })
    }

    pub fn size(&self) -> usize {
        self.x.len()
    }

    pub fn dimension(&self) -> usize {
        self.x[0].len()
    }

    /// Format: `n d` header, then `n` bit rows for X and `n` rows for Y.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = non_comment_lines(text);
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty OV instance".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(Error::Parse("OV header must be `n d`".into()));
        }
        let n: usize = head[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad n `{}`", head[0])))?;
        let d: usize = head[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad d `{}`", head[1])))?;
        let mut rows = Vec::new();
        for _ in 0..2 * n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("missing vector rows".into()))?;
            let bits: Vec<bool> = line
                .trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::Parse(format!("bad bit `{c}`"))),
                })
                .collect::<Result<_>>()?;
            if bits.len() != d {
                return Err(Error::Parse("vector row has wrong dimension".into()));
            }
            rows.push(bits);
        }
        let y = rows.split_off(n);
        OvInstance::new(rows, y)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.size(), self.dimension());
        for v in self.x.iter().chain(self.y.iter()) {
            for &b in v {
                out.push(if b { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

/// An edge-colored undirected graph for all-edges monochromatic-triangle
/// queries. Colors must lie in `0 .. n^2`.
#[derive(Debug, Clone)]
pub struct AeMonoInstance {
    pub n: usize,
    pub colors: BTreeMap<(usize, usize), u64>,
}

impl AeMonoInstance {
    pub fn new(n: usize, edges: Vec<((usize, usize), u64)>) -> Result<Self> {
        let limit = (n as u64) * (n as u64);
        let mut colors = BTreeMap::new();
        for ((u, v), c) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                return Err(Error::Invalid(format!("self-loop at vertex {u}")));
            }
            if c >= limit {
                return Err(Error::ColorOutOfRange { color: c, limit });
            }
            colors.insert((u.min(v), u.max(v)), c);
        }
        Ok(AeMonoInstance { n, colors })
    }

    pub fn color(&self, u: usize, v: usize) -> Option<u64> {
        self.colors.get(&(u.min(v), u.max(v))).copied()
    }

    /// Format: `n m` header, then one `u v color` line per edge.
    pub fn parse(text: &str) -> Result<Self> {
        let (n, rows) = parse_header_rows(text, 3)?;
        AeMonoInstance::new(
            n,
            rows.into_iter()
                .map(|r| ((r[0], r[1]), r[2] as u64))
                .collect(),
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.colors.len());
        for (&(u, v), &c) in &self.colors {
            let _ = writeln!(out, "{u} {v} {c}");
        }
        out
    }
}

/// A language-edit-distance instance: the word, the grammar, per-operation
/// costs and per-operation enable flags.
#[derive(Debug, Clone)]
pub struct LedInstance {
    pub word: Vec<Symbol>,
    pub grammar: Grammar,
    pub cost_ins: u64,
    pub cost_del: u64,
    pub cost_repl: u64,
    pub allow_ins: bool,
    pub allow_del: bool,
    pub allow_repl: bool,
}

impl LedInstance {
    pub fn new(
        word: Vec<Symbol>,
        grammar: Grammar,
        costs: (u64, u64, u64),
        ops: (bool, bool, bool),
    ) -> Result<Self> {
        for &s in &word {
            if !grammar.terminals().contains(&s) {
                return Err(Error::UnknownTerminal(grammar.symbols().display_name(s)));
            }
        }
        Ok(LedInstance {
            word,
            grammar,
            cost_ins: costs.0,
            cost_del: costs.1,
            cost_repl: costs.2,
            allow_ins: ops.0,
            allow_del: ops.1,
            allow_repl: ops.2,
        })
    }

    /// Format: a `word ...` line (terminal tokens), a `costs ins del repl`
    /// line, an `ops ...` line naming the enabled operations, a `grammar:`
    /// marker and then the grammar text.
    pub fn parse(text: &str) -> Result<Self> {
        let marker = text
            .find("grammar:")
            .ok_or_else(|| Error::Parse("missing `grammar:` section".into()))?;
        let head = &text[..marker];
        let grammar = Grammar::parse(&text[marker + "grammar:".len()..])?;
        let mut word_tokens: Option<Vec<String>> = None;
        let mut costs = (1u64, 1u64, 1u64);
        let mut ops = (true, true, true);
        for line in non_comment_lines(head) {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "word" => word_tokens = Some(toks[1..].iter().map(|s| s.to_string()).collect()),
                "costs" => {
                    if toks.len() != 4 {
                        return Err(Error::Parse("costs line needs three integers".into()));
                    }
                    let parse = |s: &str| {
                        s.parse::<u64>()
                            .map_err(|_| Error::Parse(format!("bad cost `{s}`")))
                    };
                    costs = (parse(toks[1])?, parse(toks[2])?, parse(toks[3])?);
                }
                "ops" => {
                    ops = (
                        toks.contains(&"ins"),
                        toks.contains(&"del"),
                        toks.contains(&"repl"),
                    );
                }
                other => return Err(Error::Parse(format!("unexpected line `{other}...`"))),
            }
        }
        let tokens =
            word_tokens.ok_or_else(|| Error::Parse("missing `word` line".into()))?;
        let mut word = Vec::new();
        for t in &tokens {
            let s = grammar
                .symbols()
                .lookup(t)
                .filter(|s| grammar.terminals().contains(s))
                .ok_or_else(|| Error::UnknownTerminal(t.clone()))?;
            word.push(s);
        }
        LedInstance::new(word, grammar, costs, ops)
    }

    pub fn to_text(&self) -> String {
        let word: Vec<&str> = self
            .word
            .iter()
            .map(|&s| self.grammar.symbols().name(s))
            .collect();
        let mut ops = Vec::new();
        if self.allow_ins {
            ops.push("ins");
        }
        if self.allow_del {
            ops.push("del");
        }
        if self.allow_repl {
            ops.push("repl");
        }
        format!(
            "word {}\ncosts {} {} {}\nops {}\ngrammar:\n{}",
            word.join(" "),
            self.cost_ins,
            self.cost_del,
            self.cost_repl,
            ops.join(" "),
            self.grammar.to_text()
        )
    }
}

fn non_comment_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| match l.find('#') {
            Some(p) => &l[..p],
            None => l,
        })
        .map(str::trim)
        .filter(|l| !l.is_empty())
}

fn parse_header_rows(text: &str, fields: usize) -> Result<(usize, Vec<Vec<usize>>)> {
    let mut lines = non_comment_lines(text);
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty instance".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(Error::Parse("header must be `n m`".into()));
    }
    let n: usize = head[0]
        .parse()
        .map_err(|_| Error::Parse(format!("bad n `{}`", head[0])))?;
    let m: usize = head[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad m `{}`", head[1])))?;
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("fewer rows than declared".into()))?;
        let row: Vec<usize> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad field `{t}`")))
            })
            .collect::<Result<_>>()?;
        if row.len() != fields {
            return Err(Error::Parse(format!(
                "row `{line}` must have {fields} fields"
            )));
        }
        rows.push(row);
    }
    Ok((n, rows))
}

// ---------------------------------------------------------------------------
// Reduction outputs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    TriangleDyck1,
    OvDyck2,
    TrianglePds,
    AeMonoPds,
    AeMonoSubdivision,
    LedWeightedCflr,
}

impl ReductionKind {
    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::TriangleDyck1 => "triangle-dyck1",
            ReductionKind::OvDyck2 => "ov-dyck2",
            ReductionKind::TrianglePds => "triangle-pds",
            ReductionKind::AeMonoPds => "aemono-pds",
            ReductionKind::AeMonoSubdivision => "aemono-sub",
            ReductionKind::LedWeightedCflr => "led-wcflr",
        }
    }
}

/// One per-edge query of an all-pairs reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeQuery {
    pub edge: (usize, usize),
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub enum Query {
    St { source: usize, target: usize },
    WeightedSt { source: usize, target: usize },
    PerEdge(Vec<EdgeQuery>),
}

#[derive(Debug, Clone)]
pub enum Payload {
    Cfl {
        grammar: Grammar,
        graph: LabeledGraph,
        labels: SymbolTable,
    },
    WeightedCfl {
        grammar: Grammar,
        graph: WeightedLabeledGraph,
        labels: SymbolTable,
    },
    Pds(Pds),
    SubdivisionCfl {
        grammar: Grammar,
        graph: SubdivisionGraph,
        labels: SymbolTable,
    },
}

/// A generated gadget: the output problem instance, the designated query and
/// a map from generated vertices or states back to source-instance entities.
#[derive(Debug, Clone)]
pub struct ReductionInstance {
    pub kind: ReductionKind,
    pub payload: Payload,
    pub query: Query,
    pub provenance: BTreeMap<String, String>,
}

// ---------------------------------------------------------------------------
// Triangle detection -> Dyck-1 s-t reachability
// ---------------------------------------------------------------------------

/// Vertex set `{v_s} + a_i + b_i + c_i + d_i + {v_z, v_t}` with
/// `|V'| = 3 + 4n` and `|E'| = 3 + 2(n-1) + 6|E|`; the target is Dyck-1
/// reachable from the source exactly when the graph has a triangle.
pub fn triangle_to_dyck1(u: &TriangleInstance) -> Result<ReductionInstance> {
    let n = u.n;
    if n == 0 {
        return Err(Error::ZeroParameter("n"));
    }
    let grammar = dyck_grammar(1)?;
    let labels = grammar.symbols().clone();
    let open = labels.lookup("(").unwrap();
    let close = labels.lookup(")").unwrap();
    let v_s = 0;
    let a = |i: usize| 1 + i;
    let b = |i: usize| 1 + n + i;
    let c = |i: usize| 1 + 2 * n + i;
    let d = |i: usize| 1 + 3 * n + i;
    let v_z = 1 + 4 * n;
    let v_t = 2 + 4 * n;
    let mut edges = vec![(v_s, open, a(0))];
    for i in 0..n - 1 {
        edges.push((a(i), open, a(i + 1)));
    }
    for (i, j) in u.edges() {
        for (p, q) in [(i, j), (j, i)] {
            edges.push((a(p), open, b(q)));
            edges.push((b(p), close, c(q)));
            edges.push((c(p), open, d(q)));
        }
    }
    for i in (1..n).rev() {
        edges.push((d(i), close, d(i - 1)));
    }
    edges.push((d(0), close, v_z));
    edges.push((v_z, close, v_t));
    assert_eq!(edges.len(), 3 + 2 * (n - 1) + 6 * u.edge_count());
    let graph = LabeledGraph::new(3 + 4 * n, edges)?;
    let mut provenance = BTreeMap::new();
    provenance.insert(v_s.to_string(), "vs".into());
    provenance.insert(v_z.to_string(), "vz".into());
    provenance.insert(v_t.to_string(), "vt".into());
    for i in 0..n {
        provenance.insert(a(i).to_string(), format!("a({i})"));
        provenance.insert(b(i).to_string(), format!("b({i})"));
        provenance.insert(c(i).to_string(), format!("c({i})"));
        provenance.insert(d(i).to_string(), format!("d({i})"));
    }
    Ok(ReductionInstance {
        kind: ReductionKind::TriangleDyck1,
        payload: Payload::Cfl {
            grammar,
            graph,
            labels,
        },
        query: Query::St {
            source: v_s,
            target: v_t,
        },
        provenance,
    })
}

// ---------------------------------------------------------------------------
// Orthogonal vectors -> Dyck-2 s-t reachability
// ---------------------------------------------------------------------------

/// Encodes X-vectors as open-bracket chains and Y-vectors as close-bracket
/// chains with the extra `]` edges present exactly where the Y-bit is zero;
/// `|V| = 3 + 2(d-1)n` and the pair is Dyck-2 reachable exactly when an
/// orthogonal pair exists. Needs `d >= 2` (no interior chain vertices exist
/// otherwise).
pub fn ov_to_dyck2(inst: &OvInstance) -> Result<ReductionInstance> {
    let n = inst.size();
    let d = inst.dimension();
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let grammar = dyck_grammar(2)?;
    let labels = grammar.symbols().clone();
    let open1 = labels.lookup("(").unwrap();
    let close1 = labels.lookup(")").unwrap();
    let open2 = labels.lookup("[").unwrap();
    let close2 = labels.lookup("]").unwrap();
    let h_x = |bit: bool| if bit { open2 } else { open1 };
    let v_s = 0;
    let v_l = 1;
    let v_t = 2;
    // u(i, j) and w(i, j) for 1-based j in 1..=d-1.
    let u = |i: usize, j: usize| 3 + i * (d - 1) + (j - 1);
    let w = |i: usize, j: usize| 3 + n * (d - 1) + i * (d - 1) + (j - 1);
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((v_s, h_x(inst.x[i][0]), u(i, 1)));
        for j in 1..=d - 2 {
            edges.push((u(i, j), h_x(inst.x[i][j]), u(i, j + 1)));
        }
        edges.push((u(i, d - 1), h_x(inst.x[i][d - 1]), v_l));
    }
    for i in 0..n {
        edges.push((v_l, close1, w(i, 1)));
        if !inst.y[i][d - 1] {
            edges.push((v_l, close2, w(i, 1)));
        }
        for j in 1..=d - 2 {
            edges.push((w(i, j), close1, w(i, j + 1)));
            if !inst.y[i][d - 1 - j] {
                edges.push((w(i, j), close2, w(i, j + 1)));
            }
        }
        edges.push((w(i, d - 1), close1, v_t));
        if !inst.y[i][0] {
            edges.push((w(i, d - 1), close2, v_t));
        }
    }
    let graph = LabeledGraph::new(3 + 2 * (d - 1) * n, edges)?;
    assert_eq!(graph.vertex_count(), 3 + 2 * (d - 1) * n);
    let mut provenance = BTreeMap::new();
    provenance.insert(v_s.to_string(), "vs".into());
    provenance.insert(v_l.to_string(), "vl".into());
    provenance.insert(v_t.to_string(), "vt".into());
    for i in 0..n {
        for j in 1..d {
            provenance.insert(u(i, j).to_string(), format!("u({i},{j})"));
            provenance.insert(w(i, j).to_string(), format!("w({i},{j})"));
        }
    }
    Ok(ReductionInstance {
        kind: ReductionKind::OvDyck2,
        payload: Payload::Cfl {
            grammar,
            graph,
            labels,
        },
        query: Query::St {
            source: v_s,
            target: v_t,
        },
        provenance,
    })
}

// ---------------------------------------------------------------------------
// Triangle detection -> bounded-depth PDS reachability
// ---------------------------------------------------------------------------

/// Most-significant-bit-first binary encoding of a 0-based index, padded with
/// leading zeros to `width` symbols.
fn encode(idx: usize, width: usize) -> Vec<StackSym> {
    (0..width)
        .rev()
        .map(|b| ((idx >> b) & 1) as StackSym)
        .collect()
}

fn reversed(mut w: Vec<StackSym>) -> Vec<StackSym> {
    w.reverse();
    w
}

fn log2_ceil(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// The source state pushes the binary index of an `a`-state, three layers of
/// edge transitions keep the stack untouched, and the `d`-states pop the
/// reversed encoding, so the sink is reachable exactly when a triangle
/// exists. States and indices are 0-based, the stack depth bound is
/// `ceil(log2 n)`, and the emitted system is normalized and sparse.
pub fn triangle_to_pds(u: &TriangleInstance) -> Result<ReductionInstance> {
    let n = u.n;
    if n < 2 {
        return Err(Error::Invalid("triangle-to-PDS needs n >= 2".into()));
    }
    let width = log2_ceil(n);
    let q_s = 0;
    let a = |i: usize| 1 + i;
    let b = |i: usize| 1 + n + i;
    let c = |i: usize| 1 + 2 * n + i;
    let d = |i: usize| 1 + 3 * n + i;
    let q_t = 1 + 4 * n;
    let mut transitions = Vec::new();
    for i in 0..n {
        transitions.push(PdsTransition {
            from: q_s,
            pop: Vec::new(),
            push: encode(i, width),
            to: a(i),
        });
    }
    for (i, j) in u.edges() {
        for (p, q) in [(i, j), (j, i)] {
            for (layer_from, layer_to) in [(a(p), b(q)), (b(p), c(q)), (c(p), d(q))] {
                transitions.push(PdsTransition {
                    from: layer_from,
                    pop: Vec::new(),
                    push: Vec::new(),
                    to: layer_to,
                });
            }
        }
    }
    for i in 0..n {
        transitions.push(PdsTransition {
            from: d(i),
            pop: reversed(encode(i, width)),
            push: Vec::new(),
            to: q_t,
        });
    }
    let unsplit = Pds {
        states: 4 * n + 2,
        ordinary: (0..4 * n + 2).collect(),
        stack_alphabet_size: 2,
        transitions,
        depth_bound: Some(width),
    };
    let pds = split_transitions(&unsplit);
    let mut provenance = BTreeMap::new();
    provenance.insert(q_s.to_string(), "qs".into());
    provenance.insert(q_t.to_string(), "qt".into());
    for i in 0..n {
        provenance.insert(a(i).to_string(), format!("a({i})"));
        provenance.insert(b(i).to_string(), format!("b({i})"));
        provenance.insert(c(i).to_string(), format!("c({i})"));
        provenance.insert(d(i).to_string(), format!("d({i})"));
    }
    Ok(ReductionInstance {
        kind: ReductionKind::TrianglePds,
        payload: Payload::Pds(pds),
        query: Query::St {
            source: q_s,
            target: q_t,
        },
        provenance,
    })
}

// ---------------------------------------------------------------------------
// AE-Mono-triangle -> all-pairs bounded-depth PDS reachability
// ---------------------------------------------------------------------------

struct AeMonoStates {
    n: usize,
}

impl AeMonoStates {
    fn x(&self, i: usize) -> usize {
        i
    }
    fn y(&self, i: usize) -> usize {
        self.n + i
    }
    fn z(&self, i: usize) -> usize {
        2 * self.n + i
    }
    fn xp(&self, i: usize) -> usize {
        3 * self.n + i
    }
    fn yp(&self, i: usize) -> usize {
        4 * self.n + i
    }
}

fn aemono_transitions(inst: &AeMonoInstance, width: usize) -> Vec<PdsTransition> {
    let st = AeMonoStates { n: inst.n };
    let color_width = 2 * width;
    let mut transitions = Vec::new();
    for (&(u, v), &c) in &inst.colors {
        for (i, j) in [(u, v), (v, u)] {
            let color = c as usize;
            let mut push_word = encode(i, width);
            push_word.extend(encode(j, width));
            push_word.extend(encode(color, color_width));
            transitions.push(PdsTransition {
                from: st.x(i),
                pop: Vec::new(),
                push: push_word,
                to: st.y(j),
            });
            transitions.push(PdsTransition {
                from: st.y(i),
                pop: reversed(encode(color, color_width)),
                push: encode(color, color_width),
                to: st.z(j),
            });
            transitions.push(PdsTransition {
                from: st.z(i),
                pop: reversed(encode(color, color_width)),
                push: Vec::new(),
                to: st.xp(j),
            });
            let mut pop_word = reversed(encode(j, width));
            pop_word.extend(reversed(encode(i, width)));
            transitions.push(PdsTransition {
                from: st.xp(i),
                pop: pop_word,
                push: Vec::new(),
                to: st.yp(j),
            });
        }
    }
    transitions
}

fn aemono_queries(inst: &AeMonoInstance) -> Vec<EdgeQuery> {
    let st = AeMonoStates { n: inst.n };
    inst.colors
        .keys()
        .map(|&(u, v)| EdgeQuery {
            edge: (u, v),
            from: st.x(u),
            to: st.yp(v),
        })
        .collect()
}

fn aemono_provenance(n: usize) -> BTreeMap<String, String> {
    let st = AeMonoStates { n };
    let mut provenance = BTreeMap::new();
    for i in 0..n {
        provenance.insert(st.x(i).to_string(), format!("x({i})"));
        provenance.insert(st.y(i).to_string(), format!("y({i})"));
        provenance.insert(st.z(i).to_string(), format!("z({i})"));
        provenance.insert(st.xp(i).to_string(), format!("x'({i})"));
        provenance.insert(st.yp(i).to_string(), format!("y'({i})"));
    }
    provenance
}

/// Five families of `n` ordinary states; each edge pushes the indices of its
/// endpoints and its color, the middle layers check color equality, and the
/// final layer pops both indices back. The stack depth bound is
/// `4 ceil(log2 n)` and the query set pairs `x_i` with `y'_j` per edge.
pub fn aemono_to_pds(inst: &AeMonoInstance) -> Result<ReductionInstance> {
    let n = inst.n;
    if n < 2 {
        return Err(Error::Invalid("AE-Mono-to-PDS needs n >= 2".into()));
    }
    let width = log2_ceil(n);
    let unsplit = Pds {
        states: 5 * n,
        ordinary: (0..5 * n).collect(),
        stack_alphabet_size: 2,
        transitions: aemono_transitions(inst, width),
        depth_bound: Some(4 * width),
    };
    let pds = split_transitions(&unsplit);
    Ok(ReductionInstance {
        kind: ReductionKind::AeMonoPds,
        payload: Payload::Pds(pds),
        query: Query::PerEdge(aemono_queries(inst)),
        provenance: aemono_provenance(n),
    })
}

/// The same construction as [`aemono_to_pds`], phrased as all-pairs Dyck-2
/// reachability on a subdivision graph: each transition becomes a line-edge
/// whose word closes the popped symbols and opens the pushed ones (stack
/// symbol 0 as the round pair, 1 as the square pair). Line-edges have length
/// at most `4 ceil(log2 n)`.
pub fn aemono_to_subdivision_cflr(inst: &AeMonoInstance) -> Result<ReductionInstance> {
    let n = inst.n;
    if n < 2 {
        return Err(Error::Invalid("AE-Mono subdivision needs n >= 2".into()));
    }
    let width = log2_ceil(n);
    let grammar = dyck_grammar(2)?;
    let labels = grammar.symbols().clone();
    let open = [labels.lookup("(").unwrap(), labels.lookup("[").unwrap()];
    let close = [labels.lookup(")").unwrap(), labels.lookup("]").unwrap()];
    let transitions = aemono_transitions(inst, width);
    let ordinary_count = 5 * n;
    let mut vertices = ordinary_count;
    let mut edges = Vec::new();
    for t in &transitions {
        let mut word: Vec<Symbol> = Vec::new();
        for &p in &t.pop {
            word.push(close[p as usize]);
        }
        for &q in &t.push {
            word.push(open[q as usize]);
        }
        debug_assert!(!word.is_empty() && word.len() <= 4 * width);
        let mut cur = t.from;
        for (i, &sym) in word.iter().enumerate() {
            let next = if i == word.len() - 1 {
                t.to
            } else {
                vertices += 1;
                vertices - 1
            };
            edges.push((cur, sym, next));
            cur = next;
        }
    }
    let base = LabeledGraph::new(vertices, edges)?;
    let graph = SubdivisionGraph::new(base, (0..ordinary_count).collect())?;
    debug_assert!(graph.k <= 4 * width);
    Ok(ReductionInstance {
        kind: ReductionKind::AeMonoSubdivision,
        payload: Payload::SubdivisionCfl {
            grammar,
            graph,
            labels,
        },
        query: Query::PerEdge(aemono_queries(inst)),
        provenance: aemono_provenance(n),
    })
}

// ---------------------------------------------------------------------------
// LED -> weighted s-t CFL reachability
// ---------------------------------------------------------------------------

/// A chain of `|w| + 1` vertices: zero-weight match edges spell the word,
/// insertion loops, `eps`-labeled deletion edges and replacement edges carry
/// their operation's cost, and disabled operations simply omit their edge
/// class. The minimal S-path weight from the first to the last vertex equals
/// the edit distance.
pub fn led_to_weighted_cflr(inst: &LedInstance) -> Result<ReductionInstance> {
    let n = inst.word.len();
    let grammar = inst.grammar.clone();
    let mut labels = grammar.symbols().clone();
    let eps_label = labels.intern(EPS_KEYWORD);
    let terminals: Vec<Symbol> = grammar.terminals().iter().copied().collect();
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for (i, &s) in inst.word.iter().enumerate() {
        edges.push((i, s, i + 1));
        weights.push(0i64);
    }
    if inst.allow_ins {
        for i in 0..=n {
            for &s in &terminals {
                edges.push((i, s, i));
                weights.push(inst.cost_ins as i64);
            }
        }
    }
    if inst.allow_del {
        for i in 0..n {
            edges.push((i, eps_label, i + 1));
            weights.push(inst.cost_del as i64);
        }
    }
    if inst.allow_repl {
        for i in 0..n {
            for &s in &terminals {
                if s != inst.word[i] {
                    edges.push((i, s, i + 1));
                    weights.push(inst.cost_repl as i64);
                }
            }
        }
    }
    let base = LabeledGraph::new(n + 1, edges)?;
    let graph = WeightedLabeledGraph::new(base, weights)?;
    let mut provenance = BTreeMap::new();
    for i in 0..=n {
        provenance.insert(i.to_string(), format!("position {i} of the word"));
    }
    Ok(ReductionInstance {
        kind: ReductionKind::LedWeightedCflr,
        payload: Payload::WeightedCfl {
            grammar,
            graph,
            labels,
        },
        query: Query::WeightedSt {
            source: 0,
            target: n,
        },
        provenance,
    })
}

// ---------------------------------------------------------------------------
// Subdivision-graph preprocessing
// ---------------------------------------------------------------------------

/// Output of [`subdivision_preprocess`]: the collapsed graph over ordinary
/// vertices, the grammar over the tuple alphabet, and the vertex map.
#[derive(Debug, Clone)]
pub struct SubdivisionPreprocessed {
    pub graph: LabeledGraph,
    pub grammar: Grammar,
    pub labels: SymbolTable,
    /// `ordinary_map[new_id]` is the vertex id in the original graph.
    pub ordinary_map: Vec<usize>,
    /// Size `|G''| * |Sigma''|^k * k` of the intermediate construction, for
    /// grammar-growth bookkeeping.
    pub budget_unit: u64,
}

impl SubdivisionPreprocessed {
    pub fn new_id(&self, old: usize) -> Option<usize> {
        self.ordinary_map.iter().position(|&v| v == old)
    }
}

/// Collapses a k-subdivision-graph to its ordinary vertices: pads every
/// line-edge word to length `k` with the lifted epsilon terminal, labels each
/// collapsed edge with its `k`-tuple, converts the lifted grammar through a
/// PDA that tracks tuple positions in its control state, and converts back
/// to a grammar over the tuple alphabet. Ordinary-pair reachability is
/// preserved exactly.
///
/// Only tuples that actually occur on edges are minted; absent tuples label
/// no edge and cannot affect reachability. `k` beyond `max_k` is rejected
/// with a size estimate.
pub fn subdivision_preprocess(
    sd: &SubdivisionGraph,
    g: &Grammar,
    labels: &SymbolTable,
    max_k: usize,
) -> Result<SubdivisionPreprocessed> {
    let k = sd.k;
    if k > max_k {
        let alphabet = (g.terminals().len() + 1) as u64;
        return Err(Error::SubdivisionTooLong {
            k,
            cap: max_k,
            estimate: alphabet.saturating_pow(k.min(32) as u32),
        });
    }
    let lines = sd.line_edges()?;
    let cnf = to_cnf(g)?;
    let lifted = lift_epsilon(&cnf)?;
    let eps_prime = crate::grammar::eps_prime_of(&lifted).expect("lifting interns eps'");
    // Normalize line words against the grammar's symbols; literal `eps`
    // labels become the lifted epsilon terminal.
    let mut padded: Vec<Vec<Symbol>> = Vec::with_capacity(lines.len());
    for line in &lines {
        let mut word = Vec::with_capacity(k);
        for &s in &line.word {
            let name = labels.name(s);
            if name == EPS_KEYWORD {
                word.push(eps_prime);
                continue;
            }
            let resolved = g
                .symbols()
                .lookup(name)
                .filter(|t| g.terminals().contains(t))
                .ok_or_else(|| Error::UnknownLabel(name.to_string()))?;
            word.push(resolved);
        }
        word.resize(k, eps_prime);
        padded.push(word);
    }
    let mut tuples: Vec<Vec<Symbol>> = Vec::new();
    let mut tuple_of_line: Vec<usize> = Vec::with_capacity(padded.len());
    for word in &padded {
        match tuples.iter().position(|t| t == word) {
            Some(i) => tuple_of_line.push(i),
            None => {
                tuples.push(word.clone());
                tuple_of_line.push(tuples.len() - 1);
            }
        }
    }
    let pda = cfg_to_pda(&lifted)?;
    let (tuple_automaton, tuple_syms) = tuple_pda(&pda, &tuples, k)?;
    let grammar = pda_to_cfg(&tuple_automaton)?;
    let ordinary_map: Vec<usize> = sd.ordinary.iter().copied().collect();
    let new_id: BTreeMap<usize, usize> = ordinary_map
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    let edges: Vec<(usize, Symbol, usize)> = lines
        .iter()
        .zip(&tuple_of_line)
        .map(|(line, &t)| (new_id[&line.src], tuple_syms[t], new_id[&line.dst]))
        .collect();
    let graph = LabeledGraph::new(ordinary_map.len(), edges)?;
    let budget_unit = lifted.size() as u64
        * (lifted.terminals().len() as u64).saturating_pow(k as u32)
        * k as u64;
    Ok(SubdivisionPreprocessed {
        labels: grammar.symbols().clone(),
        graph,
        grammar,
        ordinary_map,
        budget_unit,
    })
}
