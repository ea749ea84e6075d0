//! Finite windows of points in minimal zero-entropy subshifts that carry an
//! arbitrary target sequence along a sparse set of coordinates.
//!
//! The construction is a block concatenation: level-`k` words of length
//! `m_k` are glued into level-`k + 1` words, at least a third of which are
//! copies of a pillar word and (in the faithful profile) which use every
//! level-`k` word. Starting from the target written on `S` and stars
//! elsewhere, blocks are completed level by level.
//!
//! ```no_run
//! use blockshift::{Alphabet, SparseSetSpec, Profile, TargetSequence, Interval};
//! let schedule = blockshift::build_schedule(
//!     &Alphabet::binary(),
//!     &SparseSetSpec::squares(),
//!     2,
//!     Interval::new(0, 0).unwrap(),
//!     Profile::Faithful,
//! ).unwrap();
//! let x = blockshift::realize(&TargetSequence::MuIndicator, &schedule, 2).unwrap();
//! assert!(x.is_complete());
//! ```

pub mod analysis;
pub mod arith;
pub mod error;
pub mod persist;
pub mod realize;
pub mod sam;
pub mod schedule;
pub mod sparse;
pub mod words;

pub use analysis::{
    complexity_profile, entropy_bound_series, minimality_witnesses, positive_density_bound,
    realization_forced_count, ComplexityReport, MinimalityReport,
};
pub use arith::{correlation_average, mobius_sieve, sarnak_demo, MobiusTable, WeightTable};
pub use error::{Error, Result};
pub use persist::{WindowFile, WindowHeader};
pub use realize::{fill_level, init_partial, realize, verify_realization, TargetSequence};

pub use schedule::{
    build_schedule, build_schedule_with, canonical_pillar, enumerate_level_words,
    is_admissible_block, level_count, Cardinality, Profile, Schedule, ScheduleConfig, Verdict,
};
pub use sparse::{density_estimate, max_window_count, sparsity_ok, SparseSetSpec};
pub use words::{
    block_interval, decompose_blocks, occurrences, Alphabet, Interval, PartialWindow, Word, STAR,
};
