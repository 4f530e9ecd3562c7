//! Loop classification, chaining, change of basis and closed forms.

mod chain;
mod closed_form;
mod partition;
mod twn;

pub use chain::{chain, detect_prs, PERIOD_CEILING};
pub use closed_form::{closed_form, closed_form_solvable, closed_form_twn, unroll_oracle, ClosedForm, DEGREE_CAP};
pub use partition::{is_twn, partition_blocks, twn_order, Block, SolvablePartition};
pub use twn::{to_twn, Automorphism};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("update is not solvable")]
    NotSolvable,
    #[error("a block has eigenvalues that are not integers")]
    NonIntegerSpectrum,
    #[error("update is not triangular weakly non-linear")]
    NotTwn,
    #[error("closed form exceeds degree {0}")]
    DegreeBlowup(u32),
}
