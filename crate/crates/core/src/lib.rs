//! Generalized Lancaster and Streitberg interaction measures, kernels that are
//! positive definite on measures with vanishing low-order marginals, and the
//! energy statistics built from them.

pub mod error;
pub mod interactions;
pub mod kernels;
pub mod measures;
pub mod partitions;
pub mod statistics;
pub mod symfun;
pub mod verify;

/// Library version, recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use interactions::{lancaster, lancaster_general, mu_kn, streitberg, witness_from_factors, InteractionOrder};
pub use kernels::{
    border_correct, eval_kernel, gram, truncated_exp_pair, Bernstein1D, CmFamily, CompiledKernel, CrossTerm, EtaAtom,
    KernelSpec, OrderKSpec, ProductBernstein, SumCmSpec,
};
pub use measures::{Atom, DiscreteMeasure, ProductPoint, SpaceShape};
pub use partitions::{bell, enumerate_partitions, partition_factor, streitberg_coefficient, Partition};
pub use statistics::{
    interaction_energy, interaction_statistic, permutation_pvalue, quadratic_energy, EnergyReport, Mode, Route, Sample,
};
pub use verify::{
    cnd_check, complete_monotone_check, frechet_check, gram_psd_check, inequality_suite, pdi_random_check, VerifyReport,
};
