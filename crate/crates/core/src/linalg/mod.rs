//! Index sets, weights, sequence norms, algebra norms and dense kernels.

pub mod algebra;
pub mod dense;
pub mod index;
pub mod seqspace;

pub use algebra::{
    admissible_weight_check, decay_fit, jaffard_norm, schur_weighted_norm, Admissibility,
    AlgebraKind, DecayFit, MatrixAlgebraSpec,
};
pub use dense::{
    generalized_condition_number, hermitian_eigen, numerical_rank, probe_op_norm, pseudo_inverse,
    range_basis, singular_values, weighted_op_norm, OpNorm,
};
pub use index::{IndexSet, Metric};
pub use seqspace::{
    dual_pairing, seq_norm, seq_space_included, Exponent, InclusionCertificate,
    InclusionCriterion, SeqSpaceSpec, SpaceFamily, Weight, WeightFamily, TRUNCATION_SCHEDULE,
};
