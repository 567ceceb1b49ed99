//! Certified replay of the classification of `P_n + P_m + P_l = 2^a` over the
//! Pell numbers: interval reals, exact Pell arithmetic, the linear-form bound
//! chain, continued-fraction reduction, exhaustive search, and a certificate
//! that can be re-checked independently.

pub mod bigreal;
pub mod matveev;
pub mod pell;
pub mod pipeline;
pub mod reduction;
pub mod search;

pub use bigreal::{CertifiedReal, Constant, Dyadic, Expr, PrecisionPolicy, RealError};
pub use matveev::{BoundChain, BoundChainCoefficient, MatveevInstance};
pub use pell::{PellPair, TwoSumFactorization};
pub use pipeline::{
    emit_report, run_pipeline, verify_certificate, Certificate, OutputFormat, PipelineConfig,
    Verdict,
};
pub use reduction::{ContinuedFractionExpansion, ReductionInstance, ReductionOutcome};
pub use search::SolutionTuple;
