//! Single-round linear schemes: the table form of the rate-2/3 scheme, a
//! declarative descriptor that also covers the replicated baselines, and
//! the two-copy symmetrization.

mod descriptor;
pub mod gf2;
mod table;

pub use descriptor::SchemeDescriptor;
pub use table::{
    linear_retrieve, linear_retrieve_blocks, linear_store, replicated_store, LinearMessages,
    LinearRetrieval, PatternChoice, StoredLinear,
};
