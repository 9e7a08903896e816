//! Hypergraph min-cut functions realized as entropies of random stabilizer
//! tensor network states.
//!
//! The pipeline: a weighted hypergraph with terminals defines a GHZ tensor
//! network state Ω whose entropies reproduce the cut function exactly;
//! projecting every non-terminal vertex onto a uniformly random stabilizer
//! state yields a state Ψ whose entropy vector concentrates (for large
//! bond dimension `D = p^r`) on `log(D)` times the min-cut function. The
//! [`experiments`] module verifies the exact moment formulas and the
//! concentration trends by Monte Carlo, with a dense state-vector
//! [`oracle`] cross-checking the stabilizer engine on small instances.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod error;
pub mod experiments;
pub mod gfp;
pub mod hypergraph;
pub mod network;
pub mod oracle;
pub mod stabilizer;

pub use error::{Error, Result};
