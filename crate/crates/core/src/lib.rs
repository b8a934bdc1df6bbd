//! Incomplete set functions: completions, divergence and query planning.

pub mod completions;
pub mod distributions;
pub mod divergence;
pub mod error;
pub mod harness;
pub mod lp;
pub mod oracles;
pub mod planners;
pub mod setfn;
pub mod sketch;

pub use completions::{bounds, Bounds};
pub use distributions::DistributionSpec;
pub use divergence::{divergence, Norm};
pub use error::{Error, Result};
pub use planners::{PlanConfig, PlanResult};
pub use setfn::{
    check_class, normalize, AffineMap, FunctionClass, GroundSet, IncompleteSetFunction, KnownMask,
    SetFunction, SubsetId,
};
