//! Dense tables for CNF grammars: nonterminal bitsets and rule indexes used
//! by the recognizer and all reachability engines.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::grammar::{Form, Grammar};
use crate::symbol::Symbol;

/// A fixed-width bitset over dense nonterminal ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NtSet {
    words: Vec<u64>,
}

impl NtSet {
    pub fn new(bits: usize) -> Self {
        NtSet {
            words: vec![0; bits.div_ceil(64)],
        }
    }

    /// Inserts a bit; returns true when it was not set before.
    pub fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Unions `other` in; returns true when any new bit appeared.
    pub fn union_with(&mut self, other: &NtSet) -> bool {
        let mut changed = false;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            let next = *a | *b;
            changed |= next != *a;
            *a = next;
        }
        changed
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// A CNF grammar compiled to dense ids and rule indexes.
#[derive(Debug, Clone)]
pub struct CompiledCnf {
    nts: Vec<Symbol>,
    nt_of: HashMap<Symbol, u16>,
    term_of: HashMap<Symbol, u16>,
    terms: Vec<Symbol>,
    /// Per dense terminal id: the set of `A` with `A -> a`.
    pub lhs_by_terminal: Vec<NtSet>,
    /// All binary rules `(A, B, C)` for `A -> B C`.
    pub binary: Vec<(u16, u16, u16)>,
    /// Indexed by `B`: rules `A -> B C` as `(A, C)`.
    pub by_left: Vec<Vec<(u16, u16)>>,
    /// Indexed by `C`: rules `A -> B C` as `(A, B)`.
    pub by_right: Vec<Vec<(u16, u16)>>,
    /// Nonterminals deriving the empty string.
    pub nullable: NtSet,
    /// Dense id of the start symbol.
    pub start: u16,
}

impl CompiledCnf {
    pub fn compile(g: &Grammar) -> Result<Self> {
        if g.form() != Form::Cnf {
            return Err(Error::NotCnf(
                "this engine requires a CNF grammar; run CNF conversion first".into(),
            ));
        }
        let nts: Vec<Symbol> = g.nonterminals().iter().copied().collect();
        let nt_of: HashMap<Symbol, u16> = nts
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i as u16))
            .collect();
        let terms: Vec<Symbol> = g.terminals().iter().copied().collect();
        let term_of: HashMap<Symbol, u16> = terms
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i as u16))
            .collect();
        let n = nts.len();
        let mut lhs_by_terminal = vec![NtSet::new(n); terms.len()];
        let mut binary = Vec::new();
        let mut has_eps = NtSet::new(n);
        for p in g.productions() {
            let a = nt_of[&p.lhs];
            match p.rhs.len() {
                0 => {
                    has_eps.insert(a as usize);
                }
                1 => {
                    lhs_by_terminal[term_of[&p.rhs[0]] as usize].insert(a as usize);
                }
                2 => binary.push((a, nt_of[&p.rhs[0]], nt_of[&p.rhs[1]])),
                _ => unreachable!("CNF shape checked above"),
            }
        }
        let mut by_left = vec![Vec::new(); n];
        let mut by_right = vec![Vec::new(); n];
        for &(a, b, c) in &binary {
            by_left[b as usize].push((a, c));
            by_right[c as usize].push((a, b));
        }
        // Nullable closure: eps rules plus binary rules over nullables.
        let mut nullable = has_eps;
        loop {
            let mut changed = false;
            for &(a, b, c) in &binary {
                if !nullable.contains(a as usize)
                    && nullable.contains(b as usize)
                    && nullable.contains(c as usize)
                {
                    nullable.insert(a as usize);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(CompiledCnf {
            start: nt_of[&g.start()],
            nts,
            nt_of,
            term_of,
            terms,
            lhs_by_terminal,
            binary,
            by_left,
            by_right,
            nullable,
        })
    }

    pub fn nt_count(&self) -> usize {
        self.nts.len()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn nt_symbol(&self, id: u16) -> Symbol {
        self.nts[id as usize]
    }

    pub fn nt_id(&self, s: Symbol) -> Option<u16> {
        self.nt_of.get(&s).copied()
    }

    pub fn term_id(&self, s: Symbol) -> Option<u16> {
        self.term_of.get(&s).copied()
    }

    /// Applies every binary rule to a pair of sets: all `A` with `A -> B C`,
    /// `B` in `left`, `C` in `right`.
    pub fn apply_binary(&self, left: &NtSet, right: &NtSet, out: &mut NtSet) -> bool {
        let mut changed = false;
        for &(a, b, c) in &self.binary {
            if left.contains(b as usize) && right.contains(c as usize) {
                changed |= out.insert(a as usize);
            }
        }
        changed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{dyck_grammar, lift_epsilon, to_cnf};

    #[test]
    fn ntset_basics() {
        let mut s = NtSet::new(130);
        assert!(s.insert(0));
        assert!(!s.insert(0));
        assert!(s.insert(129));
        assert!(s.contains(129));
        assert!(!s.contains(64));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 129]);
        let mut t = NtSet::new(130);
        t.insert(64);
        assert!(s.union_with(&t));
        assert!(!s.union_with(&t));
        assert_eq!(s.count(), 3);
    }

    #[test]
    fn compile_rejects_general_grammar() {
        let g = dyck_grammar(1).unwrap();
        assert!(CompiledCnf::compile(&g).is_err());
    }

    #[test]
    fn nullable_closure_on_lifted_grammar() {
        let g = lift_epsilon(&to_cnf(&dyck_grammar(1).unwrap()).unwrap()).unwrap();
        let c = CompiledCnf::compile(&g).unwrap();
        // The start derives eps; the lifting nonterminal E does not.
        assert!(c.nullable.contains(c.start as usize));
        let e = g.symbols().lookup("E").unwrap();
        assert!(!c.nullable.contains(c.nt_id(e).unwrap() as usize));
    }
}
