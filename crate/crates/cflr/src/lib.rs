//! CFL-reachability solvers and the gadget constructions around them.
//!
//! The crate bundles context-free grammar handling (CNF conversion, Dyck
//! grammars, PDA conversions), CYK recognition, several interchangeable
//! reachability engines (worklist, semi-naive matrix, DAG, bounded-path,
//! weighted), bounded-depth pushdown-system reachability, the gadget
//! reductions from triangle detection / orthogonal vectors / AE-Mono-triangle
//! / language edit distance into those reachability problems, and the naive
//! oracles used to verify every construction.

pub mod cnf;
pub mod error;
pub mod generate;
pub mod grammar;
pub mod graph;
pub mod oracles;
pub mod pda;
pub mod pds;
pub mod recognizer;
pub mod reductions;
pub mod solvers;
pub mod symbol;
pub mod verify;

pub use error::{Error, Result};
pub use symbol::{Symbol, SymbolTable};
