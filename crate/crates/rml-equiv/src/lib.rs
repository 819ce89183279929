//! Observational equivalence for two fragments of finitary RML.
//!
//! Terms are parsed and type checked ([`rml_lang`]), flattened into a
//! let-normal form ([`canonical`]), and compiled into deterministic weak
//! nested data class memory automata ([`ndcma`]) whose languages are the
//! data-word encodings of their complete plays. Two terms are equivalent
//! exactly when their automata accept the same language, which [`equiv`]
//! decides with products, complements and backward coverability
//! ([`coverability`]).

pub mod rml_lang;
pub mod arena;
pub mod canonical;
pub mod ndcma;
pub mod coverability;
pub mod family;
pub(crate) mod construct;
pub mod compile_pstrict;
pub mod compile_rforml;
pub mod equiv;
