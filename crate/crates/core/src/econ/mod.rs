//! Economic formulas of the replication market.
//!
//! Every function here is pure: no clocks, no randomness, no shared state.
//! The auction, VO and simulation layers decide which inputs to feed in.

mod binomial;
mod bidding;
mod kernels;
mod params;
mod payoff;
mod penalty;
mod revenue;
mod zipf;

pub use self::bidding::{bid_amount, storage_cost, utility};
pub use self::binomial::{
    binomial_coefficient, binomial_request_prob, binomial_request_prob_exact, er_binomial,
    forecast_horizon, weighted_mean_step, ExactProb,
};
pub(crate) use self::binomial::steps_of;
pub use self::kernels::{distance_factor, similarity, Kernels, LatencyLookup};
pub use self::params::{EconConfig, EconParams, WalkParams, ZipfParams};
pub use self::payoff::payoff_max;
pub use self::penalty::penalty;
pub use self::revenue::{er_empirical, er_empirical_from_weights};
pub use self::zipf::{er_zipf, er_zipf_marginal, zipf_cum_prob};

use crate::{ContentId, LocationId, SimTime};

/// One end-user request: which content, from where, and when.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContentRequest {
    pub content: ContentId,
    pub location: LocationId,
    pub time: SimTime,
}

impl ContentRequest {
    pub fn new(content: ContentId, location: LocationId, time: SimTime) -> Self {
        ContentRequest { content, location, time }
    }
}

/// A past request in the buyer's log with the payment made for replicating
/// its content (zero if none was made).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRecord {
    pub request: ContentRequest,
    pub paid: f64,
}

/// Load a request imposed on a provider, and whether it was served within the
/// delay threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadRecord {
    pub request: ContentRequest,
    pub load: f64,
    pub served_within_threshold: bool,
}
