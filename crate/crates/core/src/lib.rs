//! Economy-based content replication across peering CDN providers.
//!
//! Providers that cannot serve their users within a delay threshold buy
//! storage on peers' surrogate servers through sealed-bid reverse Vickrey
//! auctions. Winners form a virtual organization (VO) with the buyer for the
//! lifetime of the replica. The crate is `no_std` (it needs `alloc`) and
//! has no IO: scenario parsing, files and the command line live in the
//! `cdnpeer` crate.
//!
//! - [`econ`]: penalty, payoff, bidding, utility and expected-revenue
//!   formulas as pure functions.
//! - [`auction`]: auction lifecycle, clearing and renegotiation triggers.
//! - [`vo`]: surrogates, registry, policy repository and VO lifecycle.
//! - [`sim`]: workloads, routing, the event loop, the event log and metrics.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod auction;
pub mod econ;
mod error;
mod money;
pub mod sim;
mod time;
pub mod vo;

pub use crate::error::{DomainError, Result};
pub use crate::money::Money;
pub use crate::time::SimTime;

/// Identifier in the content-ID space, `1..=C_total`.
///
/// Numeric closeness of two ids encodes similarity of the contents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContentId(pub u32);

/// Region index, `0..R_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocationId(pub u16);

/// Provider identifier. Ordering is lexicographic, which is what every
/// tie-break in the crate uses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProviderId(pub alloc::string::String);

impl ProviderId {
    pub fn new(id: impl Into<alloc::string::String>) -> Self {
        ProviderId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl core::fmt::Display for ProviderId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.0)
    }
}

impl core::fmt::Display for ContentId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl core::fmt::Display for LocationId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}
