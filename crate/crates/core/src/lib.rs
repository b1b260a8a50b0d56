//! Archive-based Gaussian estimation-of-distribution optimization for
//! multimodal continuous problems.
//!
//! The crate is organised bottom-up:
//!
//! * [`gaussian_model`] estimates, regularizes and samples multivariate
//!   Gaussian models, including the archive-pooled covariance estimate.
//! * [`eda2`] is the single-basin optimizer: truncation selection, a FIFO
//!   archive of past selections, elitist resampling.
//! * [`dsts`] clusters a set of solutions by fitness rank and distance to
//!   the nearest better solution.
//! * [`niching`] combines the two into a restart loop that evolves every
//!   detected cluster and collects one solution per cluster, plus the
//!   peak-ratio and error metrics.
//! * [`benchmarks`] provides the niching benchmark suite and the two
//!   shifted/rotated parameter-study functions.

pub mod benchmarks;
pub mod dsts;
pub mod eda2;
mod error;
pub mod gaussian_model;
mod individual;
pub mod niching;

pub use benchmarks::{EvalBudget, Objective, Problem};
pub use dsts::{cluster, ClusteringInput, ClusteringResult};
pub use eda2::{run_eda2, BoundHandling, Eda2Params, Eda2Result, TerminationPolicy};
pub use error::{Error, Result};
pub use gaussian_model::{Archive, GaussianModel, SelectedSet};
pub use individual::{Bounds, Individual, Sense};
pub use niching::{fev, peak_ratio, run_ceda2, Ceda2Config, PeakReport, SolutionArchive};

/// The random source used throughout: a portable, seedable stream so runs
/// reproduce bit-for-bit across platforms.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's random source from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
