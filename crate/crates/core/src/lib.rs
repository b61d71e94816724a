//! Simulation and extreme-value inference for multivariate max-autoregressive
//! (ARMAX) processes
//!
//! ```text
//! X[n,j] = max(c[j] * X[n-1,j], Y[n,j]),   0 < c[j] < 1
//! ```
//!
//! where the innovation vectors `Y[n]` are i.i.d. with margins [`MarginSpec`]
//! coupled by a [`CopulaSpec`].
//!
//! Modules:
//! - [`margins`]: innovation margins (CDF, quantile, inverse-transform sampling,
//!   max-domain of attraction).
//! - [`copulas`]: extreme-value copulas, the ratio rule for derived copulas and
//!   extremal coefficients.
//! - [`armax`]: path simulation, stationarity check, stationary distributions.
//! - [`extremal`]: theoretical and empirical (multivariate) extremal indices.
//! - [`taildep`]: lag-r tail dependence and tail independence coefficients.
//! - [`estimation`]: estimators of the autoregressive parameter, their
//!   asymptotic variance, and the Hill tail index.
//! - [`montecarlo`]: seeded, parallel replicate harness for the estimators.
//! - [`io`]: CSV paths and metadata sidecars.

pub mod armax;
pub mod copulas;
pub mod error;
pub mod estimation;
pub mod extremal;
pub mod io;
pub mod margins;
pub mod montecarlo;
pub mod rng;
pub mod stats;
pub mod taildep;

pub use armax::{InitPolicy, ProcessConfig, SamplePath};
pub use copulas::{CopulaSpec, DerivedCopula, ExtremeValueCopula};
pub use error::{Error, Result};
pub use margins::{AttractionDomain, MarginSpec};
