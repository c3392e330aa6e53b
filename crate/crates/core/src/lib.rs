//! Exact level populations of a cascade (ladder) three-level atom driven by a
//! classical field and by a single quantized mode.
//!
//! - [`semiclassical`]: closed forms for the classically driven atom.
//! - [`jcm`]: manifold Hamiltonian, Euler-matrix dressed states and
//!   number-state populations of the cascade Jaynes-Cummings model.
//! - [`fieldstats`]: coherent-state averaging and collapse/revival analysis.
//! - [`oracle`]: independent numerical propagators for cross-checks.
//! - [`cli`]: the `cascade` command-line front end.
//!
//! Units: ħ = 1, all frequencies in rad per unit time.

pub mod cli;
pub mod error;
pub mod fieldstats;
pub mod jcm;
pub mod linalg;
pub mod oracle;
pub mod semiclassical;
pub mod state;

pub use error::{Error, Result};
pub use state::{
    bare_state, norm_squared, AtomicLevel, JcmParams, PopulationSeries, Populations, SemiclassicalParams,
    SpinOneOps, ThreeLevelAmplitudes, TimeGrid, DEFAULT_NORM_TOL,
};
