//! Exact tools for t-weak sequencings of subsets of cyclic groups.
//!
//! * [`zn`]: residues, partial sums and the sequencing checks.
//! * [`search`]: greedy prefixes, backtracking, the direct construction for
//!   `t = 3`, low-collision orderings and exhaustive sweeps.
//! * [`poly`]: products of linear forms and exact coefficient extraction.
//! * [`certify`]: non-vanishing certificates and theorem coverage.
//! * [`probabilistic`]: seeded Monte Carlo estimates and exact enumeration.
//! * [`cli`]: the command line front end.

pub mod certify;
pub mod cli;
pub mod error;
pub mod poly;
pub mod probabilistic;
pub mod search;
pub mod zn;

pub use error::{Error, Result};
