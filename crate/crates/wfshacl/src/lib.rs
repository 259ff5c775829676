//! Static analysis for recursive SHACL under the well-founded semantics.

pub mod analysis;
pub mod automata;
pub mod cli;
pub mod model;
pub mod mu;
pub mod supported;
pub mod translate;
pub mod wf;

pub use model::*;
