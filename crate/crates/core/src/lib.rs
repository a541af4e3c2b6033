//! Operational and continuation-based denotational semantics for CCS with
//! joint inputs (`ccsn`) and joint prefixes (`ccsnplus`).
//!
//! Both semantics are computed up to a symbol budget; traces that run past
//! the budget end in a cut. The [`abstraction`] module relates the two.

pub mod abstraction;
pub mod bags;
pub mod denotational;
pub mod generate;
pub mod identifiers;
pub mod interaction;
pub mod laws;
pub mod operational;
pub mod syntax;
pub mod traces;

pub use denotational::{den_d, Continuation, DenTerm, Denotation, Denotational};
pub use identifiers::{Identifier, Name};
pub use operational::{den_o, Configuration, Operational, RRes, Resumption, SemanticsError};
pub use syntax::{
    parse_context, parse_program, Calculus, Program, ProgramError, Statement, SyntacticContext,
};
pub use traces::{End, Trace, TraceSet};
