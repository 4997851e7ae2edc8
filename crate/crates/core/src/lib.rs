//! Exact tools for approval-based committee elections: PAV committees, core
//! stability under the Hare and Droop quotas, and linear-programming proofs of
//! core existence backed by independently checkable Farkas certificates.

pub mod election;
pub mod error;
pub mod lp;
pub mod proof;
pub mod rules;
pub mod stability;

pub use error::{Error, Result};
