//! Interned symbols with a side table of printable names.
//!
//! Grammars, graphs and automata all refer to symbols by id; the table is
//! only consulted for parsing and printing, so structural comparisons stay
//! cheap inside the fixed-point solvers.

use std::collections::HashMap;

/// The keyword for an empty right-hand side in grammar files.
pub const EPS_KEYWORD: &str = "eps";
/// Name of the distinguished terminal standing in for the empty string
/// after epsilon lifting. User input may not use this name.
pub const EPS_PRIME: &str = "eps'";

/// An interned symbol id. Ids are dense and local to one [`SymbolTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Append-only intern table. Cloning a table and interning more names keeps
/// all previously issued ids valid, which is how derived grammars (CNF
/// conversion, epsilon lifting) stay compatible with graphs labeled against
/// the original grammar.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> Symbol {
        if let Some(&s) = self.index.get(name) {
            return s;
        }
        let s = Symbol(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), s);
        s
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s.index()]
    }

    /// Like [`SymbolTable::name`] but total: ids from a larger table print
    /// as `#id` instead of panicking. Meant for error messages.
    pub fn display_name(&self, s: Symbol) -> String {
        match self.names.get(s.index()) {
            Some(n) => n.clone(),
            None => format!("#{}", s.0),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Interns a name not yet present, derived from `base` by appending a
    /// numeric suffix when needed.
    pub fn fresh(&mut self, base: &str) -> Symbol {
        if self.index.get(base).is_none() {
            return self.intern(base);
        }
        for i in 1.. {
            let candidate = format!("{base}_{i}");
            if self.index.get(&candidate).is_none() {
                return self.intern(&candidate);
            }
        }
        unreachable!()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_idempotent() {
        let mut t = SymbolTable::new();
        let a = t.intern("a");
        let b = t.intern("b");
        assert_eq!(t.intern("a"), a);
        assert_ne!(a, b);
        assert_eq!(t.name(a), "a");
    }

    #[test]
    fn fresh_avoids_collisions() {
        let mut t = SymbolTable::new();
        let a = t.intern("X");
        let b = t.fresh("X");
        assert_ne!(a, b);
        assert_eq!(t.name(b), "X_1");
    }
}
