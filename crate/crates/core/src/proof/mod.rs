//! Computer-assisted existence proofs: the small-committee inequality scan and
//! the shape program, the `k = 8` structure programs, and the enumeration of
//! recursive PAV histories with Farkas certificates.

mod history;
mod structure;
mod search;
mod shapes;

pub use history::{
    ballot_variables, check_proposition1, check_witness, history_system, witness_profile, History,
    MAX_HISTORY_CANDIDATES,
};
pub use structure::{
    bound_system, lemma2_suite, optimality_margin, verify_lemma2_structure, CertifiedOptimum, Lemma2Report, Sense,
};
pub use search::{
    canonical_continuations, decide_history, enumerate_histories, equivalence_classes, Enumeration, HistoryVerdict,
    KeptHistory, Rejected, SearchOptions,
};
pub use shapes::{
    build_program3, delta_bound, delta_formula, farkas_from_theorem1, inequality_scan, DeviationShape, Violation,
};
