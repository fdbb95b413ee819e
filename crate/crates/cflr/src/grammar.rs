//! Context-free grammars: representation, text format, CNF conversion,
//! Dyck-k construction and epsilon lifting.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::symbol::{Symbol, SymbolTable, EPS_KEYWORD, EPS_PRIME};

/// Normalization state of a grammar.
///
/// `Cnf` means every production has the shape `A -> B C`, `A -> a`, or
/// `S -> eps` where `S` is the start symbol. [`to_cnf`] additionally
/// guarantees that the start symbol never occurs on a right-hand side;
/// [`lift_epsilon`] keeps the shape but may reintroduce the start symbol on
/// right-hand sides, which the relational solvers handle via the nullable
/// closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    General,
    Cnf,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Production {
    pub lhs: Symbol,
    pub rhs: Vec<Symbol>,
}

impl Production {
    pub fn new(lhs: Symbol, rhs: Vec<Symbol>) -> Self {
        Production { lhs, rhs }
    }
}

/// A context-free grammar over interned symbols.
///
/// Production order is canonical (sorted) and duplicates are removed, so
/// grammars compare structurally: two grammars are equal when their symbol
/// ids, productions, start symbol and form coincide, regardless of the
/// printable names attached to the ids.
#[derive(Debug, Clone)]
pub struct Grammar {
    symbols: SymbolTable,
    nonterminals: BTreeSet<Symbol>,
    terminals: BTreeSet<Symbol>,
    productions: Vec<Production>,
    start: Symbol,
    form: Form,
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.nonterminals == other.nonterminals
            && self.terminals == other.terminals
            && self.productions == other.productions
            && self.start == other.start
            && self.form == other.form
    }
}

impl Eq for Grammar {}

impl Grammar {
    /// Builds and validates a grammar. The form tag is computed from the
    /// production shapes.
    pub fn new(
        symbols: SymbolTable,
        nonterminals: BTreeSet<Symbol>,
        terminals: BTreeSet<Symbol>,
        mut productions: Vec<Production>,
        start: Symbol,
    ) -> Result<Self> {
        for &s in nonterminals.iter().chain(terminals.iter()) {
            if s.index() >= symbols.len() {
                return Err(Error::UndeclaredSymbol(s.0));
            }
        }
        if !nonterminals.contains(&start) {
            return Err(Error::Invalid(format!(
                "start symbol `{}` is not a declared nonterminal",
                symbols.name(start)
            )));
        }
        if let Some(&s) = nonterminals.intersection(&terminals).next() {
            return Err(Error::Invalid(format!(
                "symbol `{}` declared both terminal and nonterminal",
                symbols.name(s)
            )));
        }
        for p in &productions {
            if !nonterminals.contains(&p.lhs) {
                return Err(Error::Invalid(format!(
                    "production lhs `{}` is not a declared nonterminal",
                    symbols.name(p.lhs)
                )));
            }
            for &s in &p.rhs {
                if !nonterminals.contains(&s) && !terminals.contains(&s) {
                    return Err(Error::Invalid(format!(
                        "rhs symbol `{}` is not declared",
                        symbols.name(s)
                    )));
                }
            }
        }
        productions.sort();
        productions.dedup();
        let mut g = Grammar {
            symbols,
            nonterminals,
            terminals,
            productions,
            start,
            form: Form::General,
        };
        g.form = if g.is_cnf_shape() { Form::Cnf } else { Form::General };
        Ok(g)
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn nonterminals(&self) -> &BTreeSet<Symbol> {
        &self.nonterminals
    }

    pub fn terminals(&self) -> &BTreeSet<Symbol> {
        &self.terminals
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn start(&self) -> Symbol {
        self.start
    }

    pub fn form(&self) -> Form {
        self.form
    }

    /// `|G| = |N| + |Sigma| + |P|`.
    pub fn size(&self) -> usize {
        self.nonterminals.len() + self.terminals.len() + self.productions.len()
    }

    pub fn has_start_epsilon(&self) -> bool {
        self.productions
            .iter()
            .any(|p| p.lhs == self.start && p.rhs.is_empty())
    }

    fn is_cnf_shape(&self) -> bool {
        self.productions.iter().all(|p| match p.rhs.len() {
            0 => p.lhs == self.start,
            1 => self.terminals.contains(&p.rhs[0]),
            2 => self.nonterminals.contains(&p.rhs[0]) && self.nonterminals.contains(&p.rhs[1]),
            _ => false,
        })
    }

    /// Strict CNF additionally forbids the start symbol on right-hand sides
    /// whenever `S -> eps` is present. [`to_cnf`] output satisfies this.
    pub fn is_strict_cnf(&self) -> bool {
        self.form == Form::Cnf
            && (!self.has_start_epsilon()
                || self
                    .productions
                    .iter()
                    .all(|p| !p.rhs.contains(&self.start)))
    }

    /// Nonterminals deriving the empty string.
    pub fn nullable_set(&self) -> BTreeSet<Symbol> {
        let mut nullable: BTreeSet<Symbol> = BTreeSet::new();
        loop {
            let mut changed = false;
            for p in &self.productions {
                if !nullable.contains(&p.lhs) && p.rhs.iter().all(|s| nullable.contains(s)) {
                    nullable.insert(p.lhs);
                    changed = true;
                }
            }
            if !changed {
                return nullable;
            }
        }
    }

    /// Parses the text format: one lhs per line, `A -> B C | a | eps`,
    /// `#` starts a comment, the first line's lhs is the start symbol.
    /// Tokens never appearing as an lhs are terminals. A line `A ->` with no
    /// alternatives declares a production-less nonterminal.
    pub fn parse(text: &str) -> Result<Self> {
        let mut symbols = SymbolTable::new();
        let mut lhs_order: Vec<Symbol> = Vec::new();
        let mut raw: Vec<(Symbol, Vec<Vec<String>>)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = match line.find('#') {
                Some(p) => &line[..p],
                None => line,
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            if tokens.len() < 2 || tokens[1] != "->" {
                return Err(Error::Parse(format!(
                    "line {}: expected `A -> ...`",
                    lineno + 1
                )));
            }
            let lhs_name = tokens[0];
            if lhs_name == EPS_KEYWORD || lhs_name == EPS_PRIME {
                return Err(Error::ReservedSymbol(lhs_name.to_string()));
            }
            let lhs = symbols.intern(lhs_name);
            if !lhs_order.contains(&lhs) {
                lhs_order.push(lhs);
            }
            let mut alternatives: Vec<Vec<String>> = Vec::new();
            let mut current: Vec<String> = Vec::new();
            let mut saw_any = false;
            for &tok in &tokens[2..] {
                saw_any = true;
                if tok == "|" {
                    alternatives.push(std::mem::take(&mut current));
                } else {
                    current.push(tok.to_string());
                }
            }
            if saw_any {
                alternatives.push(current);
            }
            raw.push((lhs, alternatives));
        }
        let first = *lhs_order
            .first()
            .ok_or_else(|| Error::Parse("grammar file has no productions".into()))?;
        let nonterminals: BTreeSet<Symbol> = lhs_order.iter().copied().collect();
        let mut productions = Vec::new();
        let mut terminals: BTreeSet<Symbol> = BTreeSet::new();
        for (lhs, alternatives) in raw {
            for alt in alternatives {
                if alt.iter().any(|t| t == EPS_KEYWORD) {
                    if alt.len() != 1 {
                        return Err(Error::Parse(
                            "`eps` must be the only token of its alternative".into(),
                        ));
                    }
                    productions.push(Production::new(lhs, Vec::new()));
                    continue;
                }
                let mut rhs = Vec::new();
                for tok in &alt {
                    if tok == EPS_PRIME {
                        return Err(Error::ReservedSymbol(tok.clone()));
                    }
                    let s = symbols.intern(tok);
                    rhs.push(s);
                }
                if rhs.is_empty() {
                    return Err(Error::Parse("empty alternative; use `eps`".into()));
                }
                productions.push(Production::new(lhs, rhs));
            }
        }
        for p in &productions {
            for &s in &p.rhs {
                if !nonterminals.contains(&s) {
                    terminals.insert(s);
                }
            }
        }
        Grammar::new(symbols, nonterminals, terminals, productions, first)
    }

    /// Renders the grammar in the text format accepted by [`Grammar::parse`].
    /// The start symbol's line comes first.
    pub fn to_text(&self) -> String {
        let mut by_lhs: BTreeMap<Symbol, Vec<&Production>> = BTreeMap::new();
        for p in &self.productions {
            by_lhs.entry(p.lhs).or_default().push(p);
        }
        let mut order: Vec<Symbol> = vec![self.start];
        for &nt in &self.nonterminals {
            if nt != self.start {
                order.push(nt);
            }
        }
        let mut out = String::new();
        for nt in order {
            let prods = by_lhs.get(&nt);
            let referenced = self.productions.iter().any(|p| p.rhs.contains(&nt));
            match prods {
                None => {
                    // Production-less nonterminals still need a declaration
                    // line when referenced (or when they are the start).
                    if referenced || nt == self.start {
                        let _ = writeln!(out, "{} ->", self.symbols.name(nt));
                    }
                }
                Some(ps) => {
                    let alts: Vec<String> = ps
                        .iter()
                        .map(|p| {
                            if p.rhs.is_empty() {
                                EPS_KEYWORD.to_string()
                            } else {
                                p.rhs
                                    .iter()
                                    .map(|&s| self.symbols.name(s))
                                    .collect::<Vec<_>>()
                                    .join(" ")
                            }
                        })
                        .collect();
                    let _ = writeln!(out, "{} -> {}", self.symbols.name(nt), alts.join(" | "));
                }
            }
        }
        out
    }
}

/// The Dyck grammar on `k` kinds of parentheses: one nonterminal, `2k`
/// terminals and `k + 2` productions `S -> eps | S S | (_i S )_i`.
pub fn dyck_grammar(k: usize) -> Result<Grammar> {
    if k == 0 {
        return Err(Error::ZeroParameter("k"));
    }
    let mut symbols = SymbolTable::new();
    let start = symbols.intern("S");
    let mut terminals = BTreeSet::new();
    let mut productions = vec![
        Production::new(start, Vec::new()),
        Production::new(start, vec![start, start]),
    ];
    for i in 1..=k {
        let (open, close) = bracket_names(i);
        let o = symbols.intern(&open);
        let c = symbols.intern(&close);
        terminals.insert(o);
        terminals.insert(c);
        productions.push(Production::new(start, vec![o, start, c]));
    }
    let nonterminals: BTreeSet<Symbol> = [start].into_iter().collect();
    Grammar::new(symbols, nonterminals, terminals, productions, start)
}

/// Printable names for the i-th parenthesis kind (1-based).
pub fn bracket_names(i: usize) -> (String, String) {
    match i {
        1 => ("(".into(), ")".into()),
        2 => ("[".into(), "]".into()),
        3 => ("{".into(), "}".into()),
        _ => (format!("({i}"), format!("){i}")),
    }
}

/// Converts a grammar to Chomsky normal form.
///
/// Pipeline: START wrapper (only when the start symbol occurs on a rhs),
/// TERM, BIN, DEL, UNIT, then removal of non-generating and unreachable
/// nonterminals. The result generates the same language and satisfies
/// [`Grammar::is_strict_cnf`].
pub fn to_cnf(g: &Grammar) -> Result<Grammar> {
    let mut symbols = g.symbols.clone();
    let mut nonterminals = g.nonterminals.clone();
    let terminals = g.terminals.clone();
    let mut productions: Vec<Production> = g.productions.clone();
    let mut start = g.start;

    // START: fresh start symbol if the current one occurs on any rhs.
    if productions.iter().any(|p| p.rhs.contains(&start)) {
        let s0 = symbols.fresh(&format!("{}0", symbols_name_owned(&symbols, start)));
        nonterminals.insert(s0);
        productions.push(Production::new(s0, vec![start]));
        start = s0;
    }

    // TERM: terminals in long right-hand sides get wrapper nonterminals.
    let mut term_wrapper: HashMap<Symbol, Symbol> = HashMap::new();
    let mut extra = Vec::new();
    for p in productions.iter_mut() {
        if p.rhs.len() < 2 {
            continue;
        }
        for s in p.rhs.iter_mut() {
            if terminals.contains(s) {
                let w = *term_wrapper.entry(*s).or_insert_with(|| {
                    let name = format!("T_{}", symbols_name_owned(&symbols, *s));
                    let w = symbols.fresh(&name);
                    extra.push(Production::new(w, vec![*s]));
                    w
                });
                *s = w;
            }
        }
    }
    nonterminals.extend(term_wrapper.values().copied());
    productions.extend(extra);

    // BIN: split right-hand sides longer than two.
    let mut binned = Vec::new();
    let mut fresh_bin = 0usize;
    for p in productions {
        if p.rhs.len() <= 2 {
            binned.push(p);
            continue;
        }
        let mut head = p.lhs;
        let mut rest = p.rhs.as_slice();
        while rest.len() > 2 {
            let mid = symbols.fresh(&format!("B{fresh_bin}"));
            fresh_bin += 1;
            nonterminals.insert(mid);
            binned.push(Production::new(head, vec![rest[0], mid]));
            head = mid;
            rest = &rest[1..];
        }
        binned.push(Production::new(head, rest.to_vec()));
    }
    let productions = binned;

    // DEL: eliminate epsilon productions (keeping start -> eps if nullable).
    let nullable = nullable_fixpoint(&productions, |_| false);
    let mut deleted: BTreeSet<Production> = BTreeSet::new();
    for p in &productions {
        // Every subset of nullable rhs positions may be omitted.
        let positions: Vec<usize> = (0..p.rhs.len())
            .filter(|&i| nullable.contains(&p.rhs[i]))
            .collect();
        let subsets = 1usize << positions.len();
        for mask in 0..subsets {
            let mut rhs = Vec::new();
            for (i, &s) in p.rhs.iter().enumerate() {
                let pos = positions.iter().position(|&q| q == i);
                match pos {
                    Some(b) if mask & (1 << b) != 0 => {}
                    _ => rhs.push(s),
                }
            }
            if rhs.is_empty() {
                continue;
            }
            deleted.insert(Production::new(p.lhs, rhs));
        }
    }
    if nullable.contains(&start) {
        deleted.insert(Production::new(start, Vec::new()));
    }
    let productions: Vec<Production> = deleted.into_iter().collect();

    // UNIT: replace unit productions by the closure of their targets.
    let mut unit_edges: HashMap<Symbol, Vec<Symbol>> = HashMap::new();
    let mut non_unit_by_lhs: HashMap<Symbol, Vec<&Production>> = HashMap::new();
    for p in &productions {
        if p.rhs.len() == 1 && nonterminals.contains(&p.rhs[0]) {
            unit_edges.entry(p.lhs).or_default().push(p.rhs[0]);
        } else {
            non_unit_by_lhs.entry(p.lhs).or_default().push(p);
        }
    }
    let mut unit_free: BTreeSet<Production> = BTreeSet::new();
    for &a in &nonterminals {
        let mut seen: HashSet<Symbol> = [a].into_iter().collect();
        let mut stack = vec![a];
        while let Some(b) = stack.pop() {
            for p in non_unit_by_lhs.get(&b).into_iter().flatten() {
                if p.rhs.is_empty() && a != start {
                    continue;
                }
                unit_free.insert(Production::new(a, p.rhs.clone()));
            }
            for &c in unit_edges.get(&b).into_iter().flatten() {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
    }
    let productions: Vec<Production> = unit_free.into_iter().collect();

    // Drop non-generating then unreachable nonterminals.
    let generating = nullable_fixpoint(&productions, |s| terminals.contains(&s));
    let productions: Vec<Production> = productions
        .into_iter()
        .filter(|p| {
            generating.contains(&p.lhs)
                && p.rhs
                    .iter()
                    .all(|s| terminals.contains(s) || generating.contains(s))
        })
        .collect();
    let mut by_lhs: HashMap<Symbol, Vec<&Production>> = HashMap::new();
    for p in &productions {
        by_lhs.entry(p.lhs).or_default().push(p);
    }
    let mut reachable: BTreeSet<Symbol> = [start].into_iter().collect();
    let mut stack = vec![start];
    while let Some(a) = stack.pop() {
        for p in by_lhs.get(&a).into_iter().flatten() {
            for &s in &p.rhs {
                if !terminals.contains(&s) && reachable.insert(s) {
                    stack.push(s);
                }
            }
        }
    }
    let productions: Vec<Production> = productions
        .iter()
        .filter(|p| reachable.contains(&p.lhs))
        .cloned()
        .collect();

    let g = Grammar::new(symbols, reachable, terminals, productions, start)?;
    debug_assert!(g.is_strict_cnf(), "CNF conversion produced a non-CNF grammar");
    if g.form != Form::Cnf {
        return Err(Error::NotCnf("conversion failed to reach CNF".into()));
    }
    Ok(g)
}

fn symbols_name_owned(t: &SymbolTable, s: Symbol) -> String {
    t.name(s).to_string()
}

/// Worklist closure of "lhs is derivable once every rhs symbol is covered",
/// where `base` marks symbols covered from the start. With `base` accepting
/// nothing this is the nullable set; with `base` accepting terminals it is
/// the generating set. Linear in the total grammar size.
fn nullable_fixpoint(
    productions: &[Production],
    base: impl Fn(Symbol) -> bool,
) -> HashSet<Symbol> {
    let mut remaining: Vec<usize> = Vec::with_capacity(productions.len());
    let mut watchers: HashMap<Symbol, Vec<usize>> = HashMap::new();
    let mut covered: HashSet<Symbol> = HashSet::new();
    let mut queue: Vec<Symbol> = Vec::new();
    for (i, p) in productions.iter().enumerate() {
        let open: Vec<Symbol> = p.rhs.iter().copied().filter(|&s| !base(s)).collect();
        remaining.push(open.len());
        if open.is_empty() {
            if covered.insert(p.lhs) {
                queue.push(p.lhs);
            }
        }
        let mut unique = open;
        unique.sort();
        unique.dedup();
        for s in unique {
            watchers.entry(s).or_default().push(i);
        }
    }
    while let Some(s) = queue.pop() {
        for &i in watchers.get(&s).into_iter().flatten() {
            // A symbol occurring twice in one rhs is counted twice; decrement
            // per occurrence.
            let occurrences = productions[i].rhs.iter().filter(|&&x| x == s).count();
            remaining[i] = remaining[i].saturating_sub(occurrences);
            if remaining[i] == 0 {
                let lhs = productions[i].lhs;
                if covered.insert(lhs) {
                    queue.push(lhs);
                }
            }
        }
    }
    covered
}

/// Lifts a CNF grammar so that the distinguished terminal `eps'` behaves as
/// the empty string: adds a nonterminal `E`, the rule `E -> eps'` and
/// `A -> E A | A E` for every original nonterminal, i.e. `2|N| + 1` rules.
///
/// A word over the extended alphabet belongs to the lifted language exactly
/// when the word with all `eps'` removed belongs to the original language.
pub fn lift_epsilon(g: &Grammar) -> Result<Grammar> {
    if g.form != Form::Cnf {
        return Err(Error::NotCnf("epsilon lifting requires CNF input".into()));
    }
    if g.symbols.lookup(EPS_PRIME).is_some() {
        return Err(Error::ReservedSymbol(EPS_PRIME.into()));
    }
    let mut symbols = g.symbols.clone();
    let eps = symbols.intern(EPS_PRIME);
    let e_nt = symbols.fresh("E");
    let mut nonterminals = g.nonterminals.clone();
    let mut terminals = g.terminals.clone();
    let mut productions = g.productions.clone();
    terminals.insert(eps);
    productions.push(Production::new(e_nt, vec![eps]));
    for &a in &g.nonterminals {
        productions.push(Production::new(a, vec![e_nt, a]));
        productions.push(Production::new(a, vec![a, e_nt]));
    }
    nonterminals.insert(e_nt);
    let lifted = Grammar::new(symbols, nonterminals, terminals, productions, g.start)?;
    debug_assert_eq!(lifted.form, Form::Cnf);
    Ok(lifted)
}

/// The `eps'` terminal of a lifted grammar, when present.
pub fn eps_prime_of(g: &Grammar) -> Option<Symbol> {
    g.symbols
        .lookup(EPS_PRIME)
        .filter(|s| g.terminals.contains(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{chart_membership, derivation_search_cnf};

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

    #[test]
    fn dyck_grammar_counts() {
        let g1 = dyck_grammar(1).unwrap();
        assert_eq!(g1.nonterminals().len(), 1);
        assert_eq!(g1.terminals().len(), 2);
        assert_eq!(g1.productions().len(), 3);
        let names: Vec<&str> = g1
            .terminals()
            .iter()
            .map(|&t| g1.symbols().name(t))
            .collect();
        assert!(names.contains(&"(") && names.contains(&")"));
        let g2 = dyck_grammar(2).unwrap();
        assert_eq!(g2.terminals().len(), 4);
        assert_eq!(g2.productions().len(), 4);
        assert!(dyck_grammar(0).is_err());
    }

    #[test]
    fn dyck_membership_of_unit_pair() {
        let g = dyck_grammar(1).unwrap();
        let open = g.symbols().lookup("(").unwrap();
        let close = g.symbols().lookup(")").unwrap();
        assert!(chart_membership(&g, &[open, close]));
        assert!(!chart_membership(&g, &[close, open]));
    }

    #[test]
    fn cnf_of_dyck1_matches_on_short_words() {
        let g = dyck_grammar(1).unwrap();
        let c = to_cnf(&g).unwrap();
        assert_eq!(c.form(), Form::Cnf);
        assert!(c.is_strict_cnf());
        let open = g.symbols().lookup("(").unwrap();
        let close = g.symbols().lookup(")").unwrap();
        for w in words_upto(&[open, close], 8) {
            assert_eq!(
                chart_membership(&g, &w),
                derivation_search_cnf(&c, &w),
                "word {:?}",
                w
            );
        }
    }

    #[test]
    fn cnf_is_structurally_stable_on_cnf_input() {
        let text = "S -> A B\nA -> a\nB -> b\n";
        let g = Grammar::parse(text).unwrap();
        assert_eq!(g.form(), Form::Cnf);
        let c = to_cnf(&g).unwrap();
        assert_eq!(c.nonterminals().len(), g.nonterminals().len());
        assert_eq!(c.terminals().len(), g.terminals().len());
        assert_eq!(c.productions().len(), g.productions().len());
        assert_eq!(c, g);
    }

    #[test]
    fn cnf_of_single_terminal_grammar() {
        let g = Grammar::parse("S -> a\n").unwrap();
        let c = to_cnf(&g).unwrap();
        assert_eq!(c.form(), Form::Cnf);
        assert_eq!(c, g);
    }

    #[test]
    fn lift_adds_expected_rule_count() {
        let g = to_cnf(&dyck_grammar(1).unwrap()).unwrap();
        let lifted = lift_epsilon(&g).unwrap();
        assert_eq!(
            lifted.productions().len(),
            g.productions().len() + 2 * g.nonterminals().len() + 1
        );
        assert_eq!(lifted.form(), Form::Cnf);
    }

    #[test]
    fn lift_accepts_padded_word_and_rejects_unbalanced() {
        let g = to_cnf(&dyck_grammar(1).unwrap()).unwrap();
        let lifted = lift_epsilon(&g).unwrap();
        let open = lifted.symbols().lookup("(").unwrap();
        let close = lifted.symbols().lookup(")").unwrap();
        let eps = eps_prime_of(&lifted).unwrap();
        assert!(derivation_search_cnf(&lifted, &[open, eps, close]));
        assert!(!derivation_search_cnf(&lifted, &[open, eps]));
        assert!(derivation_search_cnf(&lifted, &[eps]));
        assert!(derivation_search_cnf(&lifted, &[eps, eps]));
    }

    #[test]
    fn lift_rejects_non_cnf() {
        let g = dyck_grammar(1).unwrap();
        assert!(matches!(lift_epsilon(&g), Err(Error::NotCnf(_))));
    }

    #[test]
    fn parse_rejects_reserved_and_bad_lines() {
        assert!(Grammar::parse("eps -> a\n").is_err());
        assert!(Grammar::parse("S -> a eps'\n").is_err());
        assert!(Grammar::parse("S a b\n").is_err());
        assert!(Grammar::parse("S -> a eps b\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = dyck_grammar(2).unwrap();
        let text = g.to_text();
        let back = Grammar::parse(&text).unwrap();
        assert_eq!(back.nonterminals().len(), 1);
        assert_eq!(back.terminals().len(), 4);
        assert_eq!(back.productions().len(), 4);
        // Start-only grammar with no productions survives the round trip.
        let empty = Grammar::parse("S ->\n").unwrap();
        assert_eq!(empty.productions().len(), 0);
        let again = Grammar::parse(&empty.to_text()).unwrap();
        assert_eq!(again.productions().len(), 0);
    }

    #[test]
    fn size_is_component_sum() {
        let g = dyck_grammar(2).unwrap();
        assert_eq!(g.size(), 1 + 4 + 4);
    }
}
