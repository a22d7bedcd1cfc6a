//! Linear-noise approximation: moment propagation, the Gaussian filter
//! update, the resulting likelihood, and posterior-predictive bands.

mod bands;
mod dense;
mod filter;
mod moments;
mod posterior;

pub use bands::{infer_trajectory, BandRow};
pub use dense::euler_transition_loglik;
pub use filter::{bayes_update, filter, log_likelihood, FilterSetup, FilterStep};
pub use moments::{propagate, LnaMoments, Propagator, DEFAULT_SUBSTEPS};
pub use posterior::{LikelihoodKind, LnaPosterior};
