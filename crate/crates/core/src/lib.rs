pub mod arith;
pub mod bounds;
pub mod error;
pub mod group;
pub mod polymethod;
pub mod propd;
pub mod reach;
pub mod real;
pub mod search;
pub mod sequence;
pub mod symmetry;

pub(crate) mod orderly;

pub use bounds::{best_bounds, BestBounds, BoundContext, BoundKind, BoundOptions, BoundResult};
pub use error::{Error, Result};
pub use group::{parse_group, AbelianGroup, GroupElement};
pub use propd::{check_property_d, is_kth_power_form, PropertyDReport, PropertyDStatus};
pub use reach::{find_zero_sum_subsequence, has_zero_sum_subsequence, SumReachTable};
pub use real::{Real, Verdict};
pub use search::{
    enumerate_extremal, exact_g, exact_s, max_zero_sum_free_length, ExactResult, SearchBudget,
    SearchStatus,
};
pub use sequence::ZSequence;
pub use symmetry::{canonical_form, Symmetries};
