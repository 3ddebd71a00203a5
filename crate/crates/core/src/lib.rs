//! Incorrectness separation logic over symbolic heaps: syntax, a concrete
//! semantics over finite domains, canonicalization, weakest postconditions,
//! entailment, proof checking and triple checking.

pub mod canon;
pub mod entail;
pub mod par;
pub mod parse;
pub mod print;
pub mod proof;
pub mod semantics;
pub mod syntax;
pub mod triple;
pub mod unionfind;
pub mod wpo;

pub use parse::ParseError;
pub use syntax::*;
