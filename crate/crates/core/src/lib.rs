//! Distributed Santa Claus approximation on a simulated CONGEST network.
//!
//! - [`sim`]: round-synchronous simulator and communication primitives.
//! - [`fsum`]: exactly rounded float summation used by every global sum.
//! - [`lp`]: mixed packing-covering LPs and the multiplicative-weights solver.
//! - [`oracles`]: exact checkers for small instances.
//! - [`rounding`]: degree-preserving cycle rounding.
//! - [`santa`]: the end-to-end approximation pipeline.

pub mod fsum;
pub mod instances;
pub mod lp;
pub mod oracles;
pub mod rounding;
pub mod santa;
pub mod sim;
