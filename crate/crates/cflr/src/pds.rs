//! Pushdown systems with a bounded stack depth: configuration-graph
//! semantics, transition splitting into single-symbol steps, and BFS
//! reachability between empty-stack configurations.
//!
//! A transition `(q, pop, push, q')` fires on a configuration whose stack
//! starts with `pop` (read top-first); the symbols of `push` are then pushed
//! one at a time in order, so the last symbol of `push` ends on top. A
//! transition popping nothing fires on any stack. Multi-symbol transitions
//! behave exactly like the chain of single-symbol steps produced by
//! [`split_transitions`].

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A stack symbol: an index into the system's stack alphabet.
pub type StackSym = u8;

/// A stack content, top first. Binary alphabets are packed into a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StackWord {
    /// Alphabet {0, 1}, top in the lowest bit, at most 63 symbols.
    Bits { bits: u64, len: u8 },
    /// General alphabets.
    Wide(Vec<StackSym>),
}

impl StackWord {
    pub fn empty(binary: bool) -> Self {
        if binary {
            StackWord::Bits { bits: 0, len: 0 }
        } else {
            StackWord::Wide(Vec::new())
        }
    }

    pub fn len(&self) -> usize {
        match self {
            StackWord::Bits { len, .. } => *len as usize,
            StackWord::Wide(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn top(&self) -> Option<StackSym> {
        match self {
            StackWord::Bits { bits, len } => {
                if *len == 0 {
                    None
                } else {
                    Some((bits & 1) as StackSym)
                }
            }
            StackWord::Wide(v) => v.first().copied(),
        }
    }

    pub fn pushed(&self, sym: StackSym) -> StackWord {
        match self {
            StackWord::Bits { bits, len } => {
                debug_assert!(sym <= 1 && *len < 63);
                StackWord::Bits {
                    bits: (bits << 1) | u64::from(sym),
                    len: len + 1,
                }
            }
            StackWord::Wide(v) => {
                let mut v2 = Vec::with_capacity(v.len() + 1);
                v2.push(sym);
                v2.extend_from_slice(v);
                StackWord::Wide(v2)
            }
        }
    }

    pub fn popped(&self) -> Option<StackWord> {
        match self {
            StackWord::Bits { bits, len } => {
                if *len == 0 {
                    None
                } else {
                    Some(StackWord::Bits {
                        bits: bits >> 1,
                        len: len - 1,
                    })
                }
            }
            StackWord::Wide(v) => {
                if v.is_empty() {
                    None
                } else {
                    Some(StackWord::Wide(v[1..].to_vec()))
                }
            }
        }
    }
}

/// A configuration of the system: control state plus stack word (top first).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: usize,
    pub stack: StackWord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdsTransition {
    pub from: usize,
    /// Symbols popped in order; the first must be the stack top.
    pub pop: Vec<StackSym>,
    /// Symbols pushed in order; the last ends on top.
    pub push: Vec<StackSym>,
    pub to: usize,
}

/// A pushdown system. States are partitioned into ordinary states and
/// auxiliary states introduced by transition splitting.
#[derive(Debug, Clone)]
pub struct Pds {
    pub states: usize,
    pub ordinary: BTreeSet<usize>,
    pub stack_alphabet_size: usize,
    pub transitions: Vec<PdsTransition>,
    pub depth_bound: Option<usize>,
}

impl Pds {
    pub fn validate(&self) -> Result<()> {
        for &q in &self.ordinary {
            if q >= self.states {
                return Err(Error::StateOutOfRange { state: q, n: self.states });
            }
        }
        for t in &self.transitions {
            for st in [t.from, t.to] {
                if st >= self.states {
                    return Err(Error::StateOutOfRange { state: st, n: self.states });
                }
            }
            for &s in t.pop.iter().chain(t.push.iter()) {
                if usize::from(s) >= self.stack_alphabet_size {
                    return Err(Error::UndeclaredSymbol(u32::from(s)));
                }
            }
        }
        Ok(())
    }

    /// Sparsity check: `|transitions| <= c * |states|`.
    pub fn is_sparse(&self, c: usize) -> bool {
        self.transitions.len() <= c * self.states
    }

    /// Normalized systems pop at most one and push at most one symbol per
    /// transition, never both.
    pub fn is_normalized(&self) -> bool {
        self.transitions
            .iter()
            .all(|t| t.pop.len() + t.push.len() <= 1)
    }

    fn binary(&self) -> bool {
        self.stack_alphabet_size <= 2 && self.depth_bound.unwrap_or(64) < 63
    }

    /// Parses the text format: `states n`, `ordinary: q...`, `bound b`, then
    /// one `from pop push to` line per transition with `-` for the empty
    /// word and stack words written as digit strings.
    pub fn parse(text: &str) -> Result<Self> {
        let mut states = None;
        let mut ordinary = BTreeSet::new();
        let mut bound = None;
        let mut transitions = Vec::new();
        let mut max_sym = 1u8;
        for line in text.lines() {
            let line = match line.find('#') {
                Some(p) => &line[..p],
                None => line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("states") {
                states = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad state count `{rest}`")))?,
                );
            } else if let Some(rest) = line.strip_prefix("ordinary:") {
                for tok in rest.split_whitespace() {
                    ordinary.insert(
                        tok.parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad ordinary state `{tok}`")))?,
                    );
                }
            } else if let Some(rest) = line.strip_prefix("bound") {
                bound = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad depth bound `{rest}`")))?,
                );
            } else {
                let tok: Vec<&str> = line.split_whitespace().collect();
                if tok.len() != 4 {
                    return Err(Error::Parse(format!(
                        "transition line `{line}` must be `from pop push to`"
                    )));
                }
                let parse_word = |s: &str| -> Result<Vec<StackSym>> {
                    if s == "-" {
                        return Ok(Vec::new());
                    }
                    s.chars()
                        .map(|c| {
                            c.to_digit(10)
                                .map(|d| d as StackSym)
                                .ok_or_else(|| Error::Parse(format!("bad stack word `{s}`")))
                        })
                        .collect()
                };
                let from = tok[0]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad state `{}`", tok[0])))?;
                let to = tok[3]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad state `{}`", tok[3])))?;
                let pop = parse_word(tok[1])?;
                let push = parse_word(tok[2])?;
                for &s in pop.iter().chain(push.iter()) {
                    max_sym = max_sym.max(s);
                }
                transitions.push(PdsTransition { from, pop, push, to });
            }
        }
        let states = states.ok_or_else(|| Error::Parse("missing `states n` line".into()))?;
        if ordinary.is_empty() {
            ordinary = (0..states).collect();
        }
        let pds = Pds {
            states,
            ordinary,
            stack_alphabet_size: usize::from(max_sym) + 1,
            transitions,
            depth_bound: bound,
        };
        pds.validate()?;
        Ok(pds)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "states {}", self.states);
        let ord: Vec<String> = self.ordinary.iter().map(|q| q.to_string()).collect();
        let _ = writeln!(out, "ordinary: {}", ord.join(" "));
        if let Some(b) = self.depth_bound {
            let _ = writeln!(out, "bound {b}");
        }
        let word = |w: &[StackSym]| {
            if w.is_empty() {
                "-".to_string()
            } else {
                w.iter().map(|s| s.to_string()).collect()
            }
        };
        for t in &self.transitions {
            let _ = writeln!(out, "{} {} {} {}", t.from, word(&t.pop), word(&t.push), t.to);
        }
        out
    }
}

/// Splits every transition touching several stack symbols into
/// single-symbol steps: a transition popping `k1` and pushing `k2` symbols
/// becomes `k1 + k2` transitions through `k1 + k2 - 1` fresh auxiliary
/// states. A transition touching nothing between two ordinary states is
/// split in two through one auxiliary state, which keeps per-state
/// out-degrees (and so the sparsity ratio) down. Ordinary-to-ordinary
/// reachability is unchanged and already normalized systems come back
/// identical.
pub fn split_transitions(p: &Pds) -> Pds {
    let mut states = p.states;
    let mut transitions = Vec::new();
    for t in &p.transitions {
        let (k1, k2) = (t.pop.len(), t.push.len());
        if k1 + k2 == 0 {
            if p.ordinary.contains(&t.from) && p.ordinary.contains(&t.to) {
                states += 1;
                let mid = states - 1;
                transitions.push(PdsTransition {
                    from: t.from,
                    pop: Vec::new(),
                    push: Vec::new(),
                    to: mid,
                });
                transitions.push(PdsTransition {
                    from: mid,
                    pop: Vec::new(),
                    push: Vec::new(),
                    to: t.to,
                });
            } else {
                transitions.push(t.clone());
            }
            continue;
        }
        if k1 + k2 == 1 {
            transitions.push(t.clone());
            continue;
        }
        // Single actions in firing order: pops first, then pushes.
        let mut actions: Vec<(bool, StackSym)> = Vec::new();
        for &s in &t.pop {
            actions.push((false, s));
        }
        for &s in &t.push {
            actions.push((true, s));
        }
        let last = actions.len() - 1;
        let mut cur = t.from;
        for (i, (is_push, sym)) in actions.into_iter().enumerate() {
            let next = if i == last {
                t.to
            } else {
                states += 1;
                states - 1
            };
            if is_push {
                transitions.push(PdsTransition {
                    from: cur,
                    pop: Vec::new(),
                    push: vec![sym],
                    to: next,
                });
            } else {
                transitions.push(PdsTransition {
                    from: cur,
                    pop: vec![sym],
                    push: Vec::new(),
                    to: next,
                });
            }
            cur = next;
        }
    }
    Pds {
        states,
        ordinary: p.ordinary.clone(),
        stack_alphabet_size: p.stack_alphabet_size.max(1),
        transitions,
        depth_bound: p.depth_bound,
    }
}

/// Instrumentation of one BFS run.
#[derive(Debug, Clone, Copy, Default)]
pub struct PdsSearchStats {
    pub visited: u64,
    pub max_depth: usize,
}

/// Applies one transition to a configuration, respecting the depth bound.
fn apply(
    t: &PdsTransition,
    stack: &StackWord,
    bound: usize,
) -> Option<StackWord> {
    let mut s = stack.clone();
    for &p in &t.pop {
        if s.top() != Some(p) {
            return None;
        }
        s = s.popped().expect("top checked");
    }
    if s.len() + t.push.len() > bound {
        return None;
    }
    for &q in &t.push {
        s = s.pushed(q);
    }
    Some(s)
}

fn reachable_empty_stack_states(p: &Pds, source: usize) -> Result<(HashSet<usize>, PdsSearchStats)> {
    p.validate()?;
    let bound = p.depth_bound.ok_or(Error::MissingDepthBound)?;
    if source >= p.states {
        return Err(Error::StateOutOfRange { state: source, n: p.states });
    }
    let binary = p.binary();
    let mut by_state: Vec<Vec<&PdsTransition>> = vec![Vec::new(); p.states];
    for t in &p.transitions {
        by_state[t.from].push(t);
    }
    let start = Configuration {
        state: source,
        stack: StackWord::empty(binary),
    };
    let mut seen: HashSet<Configuration> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    let mut stats = PdsSearchStats::default();
    let mut reached = HashSet::new();
    while let Some(c) = queue.pop_front() {
        stats.visited += 1;
        stats.max_depth = stats.max_depth.max(c.stack.len());
        if c.stack.is_empty() {
            reached.insert(c.state);
        }
        for t in &by_state[c.state] {
            if let Some(stack) = apply(t, &c.stack, bound) {
                let nc = Configuration { state: t.to, stack };
                if seen.insert(nc.clone()) {
                    queue.push_back(nc);
                }
            }
        }
    }
    Ok((reached, stats))
}

/// Decides whether `(target, eps)` is reachable from `(source, eps)` in the
/// configuration graph, with every intermediate stack within the depth
/// bound.
pub fn pds_reach(p: &Pds, source: usize, target: usize) -> Result<bool> {
    Ok(pds_reach_with_stats(p, source, target)?.0)
}

pub fn pds_reach_with_stats(
    p: &Pds,
    source: usize,
    target: usize,
) -> Result<(bool, PdsSearchStats)> {
    if target >= p.states {
        return Err(Error::StateOutOfRange { state: target, n: p.states });
    }
    let (reached, stats) = reachable_empty_stack_states(p, source)?;
    Ok((reached.contains(&target), stats))
}

/// All-pairs empty-stack reachability between the given source and target
/// states, one BFS per source.
pub fn pds_all_pairs(p: &Pds, sources: &[usize], targets: &[usize]) -> Result<Vec<Vec<bool>>> {
    let mut matrix = Vec::with_capacity(sources.len());
    for &s in sources {
        let (reached, _) = reachable_empty_stack_states(p, s)?;
        matrix.push(targets.iter().map(|t| reached.contains(t)).collect());
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(states: usize, transitions: Vec<PdsTransition>, bound: usize) -> Pds {
        Pds {
            states,
            ordinary: (0..states).collect(),
            stack_alphabet_size: 2,
            transitions,
            depth_bound: Some(bound),
        }
    }

    #[test]
    fn edge_relation_push_applies_on_any_stack() {
        // Case 1: a transition popping nothing pushes onto whatever is there.
        let t = PdsTransition { from: 0, pop: vec![], push: vec![1], to: 1 };
        let empty = StackWord::empty(true);
        let after = apply(&t, &empty, 4).unwrap();
        assert_eq!(after.top(), Some(1));
        assert_eq!(after.len(), 1);
        let deeper = apply(&t, &after, 4).unwrap();
        assert_eq!(deeper.len(), 2);
        assert_eq!(deeper.top(), Some(1));
        // Depth bound blocks the push.
        assert!(apply(&t, &after, 1).is_none());
    }

    #[test]
    fn edge_relation_pop_requires_matching_top() {
        // Case 2: popping gamma requires gamma on top and removes it.
        let t = PdsTransition { from: 0, pop: vec![1], push: vec![], to: 1 };
        let stack = StackWord::empty(true).pushed(0).pushed(1); // top = 1
        let after = apply(&t, &stack, 4).unwrap();
        assert_eq!(after.top(), Some(0));
        let t0 = PdsTransition { from: 0, pop: vec![0], push: vec![], to: 1 };
        assert!(apply(&t0, &stack, 4).is_none());
        assert!(apply(&t, &StackWord::empty(true), 4).is_none());
    }

    #[test]
    fn multi_symbol_transition_round_trip() {
        // Push "10" then pop its reverse: sequential semantics.
        let push = PdsTransition { from: 0, pop: vec![], push: vec![1, 0], to: 1 };
        let stack = apply(&push, &StackWord::empty(true), 4).unwrap();
        assert_eq!(stack.top(), Some(0)); // last pushed symbol on top
        let pop_rev = PdsTransition { from: 1, pop: vec![0, 1], push: vec![], to: 2 };
        let done = apply(&pop_rev, &stack, 4).unwrap();
        assert!(done.is_empty());
        let pop_wrong = PdsTransition { from: 1, pop: vec![1, 0], push: vec![], to: 2 };
        assert!(apply(&pop_wrong, &stack, 4).is_none());
    }

    #[test]
    fn trivial_reachability() {
        let p = plain(
            2,
            vec![PdsTransition { from: 0, pop: vec![], push: vec![], to: 1 }],
            2,
        );
        let split = split_transitions(&p);
        assert_eq!(split.states, 3);
        assert_eq!(split.transitions.len(), 2);
        assert!(pds_reach(&split, 0, 1).unwrap());
        assert!(pds_reach(&p, 0, 1).unwrap());
    }

    #[test]
    fn push_without_pop_never_empties() {
        let p = plain(
            2,
            vec![PdsTransition { from: 0, pop: vec![], push: vec![1], to: 1 }],
            3,
        );
        assert!(!pds_reach(&p, 0, 1).unwrap());
    }

    #[test]
    fn missing_bound_is_rejected() {
        let mut p = plain(2, vec![], 2);
        p.depth_bound = None;
        assert!(matches!(pds_reach(&p, 0, 1), Err(Error::MissingDepthBound)));
    }

    #[test]
    fn split_accounting_matches() {
        // pop "10", push nothing: 2 transitions, 1 auxiliary state.
        let p = plain(
            2,
            vec![PdsTransition { from: 0, pop: vec![1, 0], push: vec![], to: 1 }],
            4,
        );
        let s = split_transitions(&p);
        assert_eq!(s.transitions.len(), 2);
        assert_eq!(s.states - p.states, 1);
        assert!(s.is_normalized());
        // pop eps push eps: split in two with one auxiliary state.
        let p2 = plain(
            2,
            vec![PdsTransition { from: 0, pop: vec![], push: vec![], to: 1 }],
            4,
        );
        let s2 = split_transitions(&p2);
        assert_eq!(s2.transitions.len(), 2);
        assert_eq!(s2.states - p2.states, 1);
        // Idempotence on normalized systems.
        let s3 = split_transitions(&s2);
        assert_eq!(s3.transitions, s2.transitions);
        assert_eq!(s3.states, s2.states);
    }

    #[test]
    fn visited_count_respects_configuration_space() {
        let p = plain(
            2,
            vec![
                PdsTransition { from: 0, pop: vec![], push: vec![0], to: 0 },
                PdsTransition { from: 0, pop: vec![0], push: vec![], to: 1 },
                PdsTransition { from: 1, pop: vec![0], push: vec![], to: 0 },
            ],
            3,
        );
        let (_, stats) = pds_reach_with_stats(&p, 0, 1).unwrap();
        // |Q| * sum_{i<=b} |Gamma|^i with Gamma = {0} effectively, but bound
        // by the binary alphabet: 2 * (1 + 2 + 4 + 8) = 30.
        assert!(stats.visited <= 30);
        assert!(stats.max_depth <= 3);
    }

    #[test]
    fn text_round_trip() {
        let p = Pds {
            states: 3,
            ordinary: [0, 2].into_iter().collect(),
            stack_alphabet_size: 2,
            transitions: vec![
                PdsTransition { from: 0, pop: vec![], push: vec![1, 0], to: 1 },
                PdsTransition { from: 1, pop: vec![0, 1], push: vec![], to: 2 },
            ],
            depth_bound: Some(2),
        };
        let text = p.to_text();
        let q = Pds::parse(&text).unwrap();
        assert_eq!(q.states, 3);
        assert_eq!(q.ordinary, p.ordinary);
        assert_eq!(q.depth_bound, Some(2));
        assert_eq!(q.transitions, p.transitions);
        assert!(pds_reach(&q, 0, 2).unwrap());
        assert!(Pds::parse("ordinary: 0\n").is_err());
        assert!(Pds::parse("states 2\n0 - x 1\n").is_err());
    }
}
