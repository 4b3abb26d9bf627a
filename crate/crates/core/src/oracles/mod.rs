//! Independent exact checkers for desk-scale instances.

pub mod lp;
pub mod santa;
pub mod simplex;

use thiserror::Error;

pub use lp::{exact_gamma, lp_feasibility_oracle};
pub use santa::{brute_force_opt, naive_opt, BruteForceConfig, Opt};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("LP has {rows} rows and {cols} columns; the exact oracle accepts at most {cap} of each")]
    LpTooLarge { rows: usize, cols: usize, cap: usize },
    #[error("{contested} contested gifts and {children} children exceed the caps ({gift_cap} gifts or {child_cap} children); raise the cap or sample instead")]
    SantaTooLarge { contested: usize, children: usize, gift_cap: usize, child_cap: usize },
    #[error("naive enumeration accepts at most {cap} gifts, got {gifts}")]
    NaiveTooLarge { gifts: usize, cap: usize },
}
