//! Reaction networks, rate laws, parameter transforms and priors.

mod binding;
pub mod catalog;
mod network;
mod params;

pub use binding::{ParamBinding, Target};
pub use network::{RateLaw, ReactionNetwork};
pub use params::{ParamSpec, ParameterSpace, Prior, Transform};
