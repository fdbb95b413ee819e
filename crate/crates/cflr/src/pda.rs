//! Pushdown automata: the standard CFG-to-PDA and PDA-to-CFG constructions,
//! a bounded membership simulator used by tests, and the tuple-tracking
//! state transformation used by the subdivision preprocessing pipeline.
//!
//! Push words are written onto the stack as-is: the first symbol of the push
//! word becomes the new stack top.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::grammar::{Grammar, Production};
use crate::symbol::{Symbol, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdaTransition {
    pub from: usize,
    /// Input symbol consumed, `None` for an epsilon move.
    pub input: Option<Symbol>,
    /// Stack symbol popped from the top, `None` to leave the stack alone.
    pub pop: Option<Symbol>,
    pub to: usize,
    /// Stack word pushed; `push[0]` ends up on top.
    pub push: Vec<Symbol>,
}

/// A pushdown automaton accepting by final state after the input is read.
#[derive(Debug, Clone)]
pub struct Pda {
    pub symbols: SymbolTable,
    pub states: usize,
    pub input_alphabet: BTreeSet<Symbol>,
    pub stack_alphabet: BTreeSet<Symbol>,
    pub transitions: Vec<PdaTransition>,
    pub start_state: usize,
    pub final_states: BTreeSet<usize>,
}

impl Pda {
    pub fn validate(&self) -> Result<()> {
        if self.start_state >= self.states {
            return Err(Error::StateOutOfRange {
                state: self.start_state,
                n: self.states,
            });
        }
        for &f in &self.final_states {
            if f >= self.states {
                return Err(Error::StateOutOfRange { state: f, n: self.states });
            }
        }
        for t in &self.transitions {
            for st in [t.from, t.to] {
                if st >= self.states {
                    return Err(Error::StateOutOfRange { state: st, n: self.states });
                }
            }
            if let Some(i) = t.input {
                if !self.input_alphabet.contains(&i) {
                    return Err(Error::UndeclaredSymbol(i.0));
                }
            }
            for s in t.pop.iter().chain(t.push.iter()) {
                if !self.stack_alphabet.contains(s) {
                    return Err(Error::UndeclaredSymbol(s.0));
                }
            }
        }
        Ok(())
    }
}

/// The standard grammar-to-PDA construction: three control states; the stack
/// simulates a leftmost derivation below a bottom marker.
pub fn cfg_to_pda(g: &Grammar) -> Result<Pda> {
    let mut symbols = g.symbols().clone();
    let bottom = symbols.fresh("_bot");
    let q_start = 0;
    let q_loop = 1;
    let q_accept = 2;
    let mut transitions = vec![PdaTransition {
        from: q_start,
        input: None,
        pop: None,
        to: q_loop,
        push: vec![g.start(), bottom],
    }];
    for p in g.productions() {
        transitions.push(PdaTransition {
            from: q_loop,
            input: None,
            pop: Some(p.lhs),
            to: q_loop,
            push: p.rhs.clone(),
        });
    }
    for &a in g.terminals() {
        transitions.push(PdaTransition {
            from: q_loop,
            input: Some(a),
            pop: Some(a),
            to: q_loop,
            push: Vec::new(),
        });
    }
    transitions.push(PdaTransition {
        from: q_loop,
        input: None,
        pop: Some(bottom),
        to: q_accept,
        push: Vec::new(),
    });
    let mut stack_alphabet: BTreeSet<Symbol> = g.nonterminals().clone();
    stack_alphabet.extend(g.terminals().iter().copied());
    stack_alphabet.insert(bottom);
    let pda = Pda {
        symbols,
        states: 3,
        input_alphabet: g.terminals().clone(),
        stack_alphabet,
        transitions,
        start_state: q_start,
        final_states: [q_accept].into_iter().collect(),
    };
    pda.validate()?;
    Ok(pda)
}

/// Bounded-search membership test: BFS over configurations with the stack
/// capped at `max_stack` symbols and at most `max_visited` distinct
/// configurations. Exact whenever some accepting run fits the caps, which
/// holds for the automata and word lengths exercised in tests; errors out
/// when the visited cap is hit without an answer.
pub fn pda_accepts(
    pda: &Pda,
    word: &[Symbol],
    max_stack: usize,
    max_visited: usize,
) -> Result<bool> {
    let mut by_state: Vec<Vec<&PdaTransition>> = vec![Vec::new(); pda.states];
    for t in &pda.transitions {
        by_state[t.from].push(t);
    }
    let mut seen: HashSet<(usize, usize, Vec<Symbol>)> = HashSet::new();
    let mut queue: VecDeque<(usize, usize, Vec<Symbol>)> = VecDeque::new();
    queue.push_back((pda.start_state, 0, Vec::new()));
    seen.insert((pda.start_state, 0, Vec::new()));
    while let Some((state, pos, stack)) = queue.pop_front() {
        if pos == word.len() && pda.final_states.contains(&state) {
            return Ok(true);
        }
        for t in &by_state[state] {
            let next_pos = match t.input {
                None => pos,
                Some(a) => {
                    if pos < word.len() && word[pos] == a {
                        pos + 1
                    } else {
                        continue;
                    }
                }
            };
            let mut next_stack = stack.clone();
            if let Some(g) = t.pop {
                if next_stack.first() != Some(&g) {
                    continue;
                }
                next_stack.remove(0);
            }
            for (i, &s) in t.push.iter().enumerate() {
                next_stack.insert(i, s);
            }
            if next_stack.len() > max_stack {
                continue;
            }
            let key = (t.to, next_pos, next_stack);
            if seen.contains(&key) {
                continue;
            }
            if seen.len() >= max_visited {
                return Err(Error::Invalid(
                    "PDA simulation exceeded its configuration budget".into(),
                ));
            }
            seen.insert(key.clone());
            queue.push_back((key.0, key.1, key.2));
        }
    }
    Ok(false)
}

/// Rebuilds a PDA over an alphabet of `k`-tuples: the new automaton consumes
/// one tuple symbol per `k` underlying input symbols and tracks its position
/// inside the current tuple in the control state. It accepts a tuple word
/// exactly when the original automaton accepts the concatenation of the
/// tuples (so only words of length divisible by `k` survive).
///
/// Only tuples from `tuples` are representable; words using other tuples are
/// simply absent from the language, which is all reachability on a fixed
/// graph needs. Returns the new PDA and the terminal symbol minted for each
/// tuple.
pub fn tuple_pda(a: &Pda, tuples: &[Vec<Symbol>], k: usize) -> Result<(Pda, Vec<Symbol>)> {
    if k == 0 {
        return Err(Error::ZeroParameter("k"));
    }
    for t in tuples {
        if t.len() != k {
            return Err(Error::Invalid(format!(
                "tuple length {} does not match k = {}",
                t.len(),
                k
            )));
        }
    }
    let mut symbols = a.symbols.clone();
    let tuple_syms: Vec<Symbol> = tuples
        .iter()
        .map(|t| {
            let name = format!(
                "({})",
                t.iter()
                    .map(|&s| a.symbols.name(s))
                    .collect::<Vec<_>>()
                    .join(",")
            );
            symbols.fresh(&name)
        })
        .collect();
    // Phase 0 is "no tuple loaded" (only before the first read); phase
    // 1 + t*k + (i-1) means i symbols of tuple t consumed.
    let phases = 1 + tuples.len() * k;
    let phase_of = |t: usize, i: usize| 1 + t * k + (i - 1);
    let state_of = |q: usize, phase: usize| q * phases + phase;
    let mut transitions = Vec::new();
    let boundary_phases: Vec<usize> = std::iter::once(0)
        .chain((0..tuples.len()).map(|t| phase_of(t, k)))
        .collect();
    for tr in &a.transitions {
        match tr.input {
            None => {
                for phase in 0..phases {
                    transitions.push(PdaTransition {
                        from: state_of(tr.from, phase),
                        input: None,
                        pop: tr.pop,
                        to: state_of(tr.to, phase),
                        push: tr.push.clone(),
                    });
                }
            }
            Some(s) => {
                // Advance inside a tuple without reading tuple input.
                for (t, tuple) in tuples.iter().enumerate() {
                    for i in 1..k {
                        if tuple[i] == s {
                            transitions.push(PdaTransition {
                                from: state_of(tr.from, phase_of(t, i)),
                                input: None,
                                pop: tr.pop,
                                to: state_of(tr.to, phase_of(t, i + 1)),
                                push: tr.push.clone(),
                            });
                        }
                    }
                }
                // Load the next tuple at a boundary.
                for &bp in &boundary_phases {
                    for (t2, tuple2) in tuples.iter().enumerate() {
                        if tuple2[0] == s {
                            transitions.push(PdaTransition {
                                from: state_of(tr.from, bp),
                                input: Some(tuple_syms[t2]),
                                pop: tr.pop,
                                to: state_of(tr.to, phase_of(t2, 1)),
                                push: tr.push.clone(),
                            });
                        }
                    }
                }
            }
        }
    }
    let mut final_states = BTreeSet::new();
    for &f in &a.final_states {
        for &bp in &boundary_phases {
            final_states.insert(state_of(f, bp));
        }
    }
    let pda = Pda {
        symbols,
        states: a.states * phases,
        input_alphabet: tuple_syms.iter().copied().collect(),
        stack_alphabet: a.stack_alphabet.clone(),
        transitions,
        start_state: state_of(a.start_state, 0),
        final_states,
    };
    pda.validate()?;
    Ok((pda, tuple_syms))
}

// Unit-action form used by the PDA-to-CFG construction: every step pushes
// exactly one symbol or pops exactly one symbol.
struct UnitPda {
    states: usize,
    /// (from, input, pushed-or-popped symbol id, to); `is_push` split below.
    pushes: Vec<(usize, Option<Symbol>, usize, usize)>,
    pops: Vec<(usize, Option<Symbol>, usize, usize)>,
    start: usize,
    accept: usize,
}

fn normalize_for_cfg(a: &Pda) -> UnitPda {
    let mut symbols = a.symbols.clone();
    let bottom = symbols.fresh("_nbot");
    let nop = symbols.fresh("_nop");
    let mut stack_syms: Vec<Symbol> = a.stack_alphabet.iter().copied().collect();
    stack_syms.push(bottom);
    stack_syms.push(nop);
    let sid: HashMap<Symbol, usize> = stack_syms
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i))
        .collect();
    let mut states = a.states;
    let mut fresh_state = || {
        states += 1;
        states - 1
    };
    let new_start = fresh_state();
    let drain = fresh_state();
    let accept = fresh_state();
    let mut pushes = Vec::new();
    let mut pops = Vec::new();
    // Wrap the run in a bottom marker so acceptance implies an empty stack.
    pushes.push((new_start, None, sid[&bottom], a.start_state));
    for &f in &a.final_states {
        // Entering the drain must itself be a unit action.
        let mid = fresh_state();
        pushes.push((f, None, sid[&nop], mid));
        pops.push((mid, None, sid[&nop], drain));
    }
    for &g in &a.stack_alphabet {
        pops.push((drain, None, sid[&g], drain));
    }
    pops.push((drain, None, sid[&bottom], accept));
    for t in &a.transitions {
        // Actions in execution order: optional pop, then pushes so that
        // push[0] ends on top.
        let mut actions: Vec<(bool, usize)> = Vec::new();
        if let Some(g) = t.pop {
            actions.push((false, sid[&g]));
        }
        for &s in t.push.iter().rev() {
            actions.push((true, sid[&s]));
        }
        if actions.is_empty() {
            actions.push((true, sid[&nop]));
            actions.push((false, sid[&nop]));
        }
        let mut cur = t.from;
        let last = actions.len() - 1;
        for (i, (is_push, sym)) in actions.into_iter().enumerate() {
            let next = if i == last { t.to } else { fresh_state() };
            let input = if i == 0 { t.input } else { None };
            if is_push {
                pushes.push((cur, input, sym, next));
            } else {
                pops.push((cur, input, sym, next));
            }
            cur = next;
        }
    }
    UnitPda {
        states,
        pushes,
        pops,
        start: new_start,
        accept,
    }
}

// Pairs (p, q) admitting a balanced run: same stack on entry and exit, never
// popping below it. Exactly the nonterminals of the standard construction
// with nonempty language.
struct BalancedPairs {
    rows: Vec<Vec<u64>>,
    cols: Vec<Vec<u64>>,
}

impl BalancedPairs {
    fn contains(&self, p: usize, q: usize) -> bool {
        self.rows[p][q / 64] & (1 << (q % 64)) != 0
    }
}

fn balanced_pairs(u: &UnitPda) -> BalancedPairs {
    let n = u.states;
    let words = n.div_ceil(64);
    let mut z = BalancedPairs {
        rows: vec![vec![0u64; words]; n],
        cols: vec![vec![0u64; words]; n],
    };
    let mut pushes_into: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(p, _, t, r) in &u.pushes {
        pushes_into[r].push((p, t));
    }
    let mut pops_from: Vec<HashMap<usize, Vec<usize>>> = vec![HashMap::new(); n];
    for &(s, _, t, q) in &u.pops {
        pops_from[s].entry(t).or_default().push(q);
    }
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    let add = |z: &mut BalancedPairs, queue: &mut VecDeque<(usize, usize)>, p: usize, q: usize| {
        if z.rows[p][q / 64] & (1 << (q % 64)) == 0 {
            z.rows[p][q / 64] |= 1 << (q % 64);
            z.cols[q][p / 64] |= 1 << (p % 64);
            queue.push_back((p, q));
        }
    };
    for p in 0..n {
        add(&mut z, &mut queue, p, p);
    }
    while let Some((r, s)) = queue.pop_front() {
        // Wrap: push (p -> r) and matching pop (s -> q).
        for &(p, t) in &pushes_into[r] {
            if let Some(qs) = pops_from[s].get(&t) {
                for &q in qs.clone().iter() {
                    add(&mut z, &mut queue, p, q);
                }
            }
        }
        // Transitivity with already known pairs on either side.
        for w in 0..z.cols[r].len() {
            let mut bits = z.cols[r][w];
            while bits != 0 {
                let x = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                add(&mut z, &mut queue, x, s);
            }
        }
        for w in 0..z.rows[s].len() {
            let mut bits = z.rows[s][w];
            while bits != 0 {
                let y = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                add(&mut z, &mut queue, r, y);
            }
        }
    }
    z
}

/// The standard PDA-to-CFG construction, restricted to the nonterminals that
/// both generate some word and are reachable from the start pair. The output
/// is a general-form grammar over the automaton's input alphabet with
/// `L(G) = L(A)`.
pub fn pda_to_cfg(a: &Pda) -> Result<Grammar> {
    a.validate()?;
    let unit = normalize_for_cfg(a);
    let z = balanced_pairs(&unit);
    let mut symbols = a.symbols.clone();
    let mut nt_of: BTreeMap<(usize, usize), Symbol> = BTreeMap::new();
    let intern_nt =
        |symbols: &mut SymbolTable, nt_of: &mut BTreeMap<(usize, usize), Symbol>, p: usize, q: usize| {
            *nt_of
                .entry((p, q))
                .or_insert_with(|| symbols.fresh(&format!("R{p}_{q}")))
        };
    let start_pair = (unit.start, unit.accept);
    let start_nt = intern_nt(&mut symbols, &mut nt_of, start_pair.0, start_pair.1);
    let mut productions: BTreeSet<Production> = BTreeSet::new();
    let mut queued: HashSet<(usize, usize)> = HashSet::new();
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    if z.contains(start_pair.0, start_pair.1) {
        queue.push_back(start_pair);
        queued.insert(start_pair);
    }
    let mut pushes_from: Vec<Vec<(Option<Symbol>, usize, usize)>> = vec![Vec::new(); unit.states];
    for &(p, i, t, r) in &unit.pushes {
        pushes_from[p].push((i, t, r));
    }
    let mut pops_into: Vec<Vec<(usize, Option<Symbol>, usize)>> = vec![Vec::new(); unit.states];
    for &(s, i, t, q) in &unit.pops {
        pops_into[q].push((s, i, t));
    }
    while let Some((p, q)) = queue.pop_front() {
        let lhs = intern_nt(&mut symbols, &mut nt_of, p, q);
        if p == q {
            productions.insert(Production::new(lhs, Vec::new()));
        }
        // A_pq -> a A_rs b for push (p -a-> r, t) and pop (s -b-> q, t).
        for &(ia, t, r) in &pushes_from[p] {
            for &(s, ib, t2) in &pops_into[q] {
                if t != t2 || !z.contains(r, s) {
                    continue;
                }
                let inner = intern_nt(&mut symbols, &mut nt_of, r, s);
                let mut rhs = Vec::new();
                if let Some(x) = ia {
                    rhs.push(x);
                }
                rhs.push(inner);
                if let Some(x) = ib {
                    rhs.push(x);
                }
                productions.insert(Production::new(lhs, rhs));
                if queued.insert((r, s)) {
                    queue.push_back((r, s));
                }
            }
        }
        // A_pq -> A_pr A_rq for every split point with nonempty halves.
        for r in 0..unit.states {
            if r == p || r == q {
                continue; // trivial splits add nothing beyond A_pp -> eps
            }
            if z.contains(p, r) && z.contains(r, q) {
                let left = intern_nt(&mut symbols, &mut nt_of, p, r);
                let right = intern_nt(&mut symbols, &mut nt_of, r, q);
                productions.insert(Production::new(lhs, vec![left, right]));
                for pair in [(p, r), (r, q)] {
                    if queued.insert(pair) {
                        queue.push_back(pair);
                    }
                }
            }
        }
    }
    let nonterminals: BTreeSet<Symbol> = nt_of.values().copied().collect();
    let terminals = a.input_alphabet.clone();
    Grammar::new(
        symbols,
        nonterminals,
        terminals,
        productions.into_iter().collect(),
        start_nt,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::dyck_grammar;
    use crate::oracles::chart_membership;

    fn all_words(alphabet: &[Symbol], max_len: usize) -> Vec<Vec<Symbol>> {
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

    #[test]
    fn pda_for_dyck1_accepts_the_right_words() {
        let g = dyck_grammar(1).unwrap();
        let pda = cfg_to_pda(&g).unwrap();
        let alpha: Vec<Symbol> = g.terminals().iter().copied().collect();
        for w in all_words(&alpha, 6) {
            let by_pda = pda_accepts(&pda, &w, 2 * w.len() + 8, 200_000).unwrap();
            let by_grammar = chart_membership(&g, &w);
            assert_eq!(by_pda, by_grammar, "word {:?}", w);
        }
    }

    #[test]
    fn pda_for_singleton_language() {
        let g = Grammar::parse("S -> a\n").unwrap();
        let pda = cfg_to_pda(&g).unwrap();
        let a = g.symbols().lookup("a").unwrap();
        for w in all_words(&[a], 3) {
            let expect = w.len() == 1;
            assert_eq!(pda_accepts(&pda, &w, 12, 100_000).unwrap(), expect);
        }
    }

    #[test]
    fn pda_for_empty_language() {
        let mut symbols = SymbolTable::new();
        let s = symbols.intern("S");
        let a = symbols.intern("a");
        let g = Grammar::new(
            symbols,
            [s].into_iter().collect(),
            [a].into_iter().collect(),
            Vec::new(),
            s,
        )
        .unwrap();
        let pda = cfg_to_pda(&g).unwrap();
        for w in all_words(&[a], 6) {
            assert!(!pda_accepts(&pda, &w, 20, 100_000).unwrap());
        }
    }

    #[test]
    fn round_trip_preserves_dyck1_membership() {
        let g = dyck_grammar(1).unwrap();
        let pda = cfg_to_pda(&g).unwrap();
        let back = pda_to_cfg(&pda).unwrap();
        let alpha: Vec<Symbol> = g.terminals().iter().copied().collect();
        for w in all_words(&alpha, 6) {
            assert_eq!(
                chart_membership(&back, &w),
                chart_membership(&g, &w),
                "word {:?}",
                w
            );
        }
    }

    #[test]
    fn cfg_from_pda_without_final_states_is_empty() {
        let g = dyck_grammar(1).unwrap();
        let mut pda = cfg_to_pda(&g).unwrap();
        pda.final_states.clear();
        let back = pda_to_cfg(&pda).unwrap();
        let alpha: Vec<Symbol> = g.terminals().iter().copied().collect();
        for w in all_words(&alpha, 6) {
            assert!(!chart_membership(&back, &w));
        }
    }

    #[test]
    fn cfg_from_single_transition_pda() {
        let mut symbols = SymbolTable::new();
        let a = symbols.intern("a");
        let pda = Pda {
            symbols,
            states: 2,
            input_alphabet: [a].into_iter().collect(),
            stack_alphabet: BTreeSet::new(),
            transitions: vec![PdaTransition {
                from: 0,
                input: Some(a),
                pop: None,
                to: 1,
                push: Vec::new(),
            }],
            start_state: 0,
            final_states: [1].into_iter().collect(),
        };
        let g = pda_to_cfg(&pda).unwrap();
        for w in all_words(&[a], 3) {
            assert_eq!(chart_membership(&g, &w), w.len() == 1, "word {:?}", w);
        }
    }

    #[test]
    fn tuple_pda_tracks_positions() {
        let g = dyck_grammar(1).unwrap();
        let open = g.symbols().lookup("(").unwrap();
        let close = g.symbols().lookup(")").unwrap();
        let pda = cfg_to_pda(&g).unwrap();
        let tuples = vec![vec![open, close], vec![open, open], vec![close, close]];
        let (tp, syms) = tuple_pda(&pda, &tuples, 2).unwrap();
        // (()) as tuples: "((" then "))".
        let accepted = pda_accepts(&tp, &[syms[1], syms[2]], 16, 400_000).unwrap();
        assert!(accepted);
        // ()(( is not balanced.
        assert!(!pda_accepts(&tp, &[syms[0], syms[1]], 16, 400_000).unwrap());
        // () is the first tuple alone.
        assert!(pda_accepts(&tp, &[syms[0]], 16, 400_000).unwrap());
        // The empty tuple word is accepted since eps is in the language.
        assert!(pda_accepts(&tp, &[], 16, 400_000).unwrap());
    }
}
