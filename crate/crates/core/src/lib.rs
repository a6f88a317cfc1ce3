//! Residual-variance estimation in high-dimensional Gaussian linear
//! regression (p >= n), together with a seeded Monte Carlo harness.
//!
//! The library has four layers:
//!
//! * [`model`] — samplers for the random objects of the model
//!   `Y = X beta + eps`: standard-normal designs, row standardization,
//!   spherical coefficient priors and responses.
//! * [`estimator`] — the moment estimator of the noise variance built from
//!   `||Y||^2` and `||X^T Y||^2`, its large-sample variance formula and the
//!   conditional deviation bound.
//! * [`bayes`] — the two-point hypothesis test on the conditional means:
//!   closed-form posterior log-odds, the Bayes threshold and midpoint
//!   threshold rules.
//! * [`sim`] — scenario runners reproducing the error-rate table, the
//!   design-repetition histogram study and the variance / deviation-bound /
//!   moment-identity validation experiments.
//!
//! Everything random is a pure function of a [`seed::SeedSpec`], so results
//! are identical across runs and thread counts.

pub mod bayes;
pub mod error;
pub mod estimator;
pub mod model;
pub mod seed;
pub mod sim;

pub use bayes::{BayesThreshold, Decision, PosteriorReport, TwoPointHypothesis};
pub use error::Error;
pub use estimator::{BoundInputs, DickerEstimate};
pub use model::{ConditionalMeans, Dataset, DesignMatrix, GaussianLinearModel};
pub use seed::SeedSpec;
pub use sim::{RepetitionStudyResult, ScenarioConfig, ScenarioResult};

pub type Result<T> = std::result::Result<T, Error>;
