//! Sealed-bid reverse Vickrey auctions.
//!
//! A buyer publishes an [`AuctionPolicy`] and a private reserve (its maximum
//! payable amount). Sellers each submit one sealed bid. On clearing, the `m`
//! lowest bids at or under the reserve win and every winner is paid the same
//! amount: the `(m+1)`-th lowest eligible bid, or the reserve when no such
//! bid exists.

use alloc::vec::Vec;
use core::cmp::Ordering;
use thiserror::Error;

use crate::vo::VoId;
use crate::{ContentId, LocationId, Money, ProviderId, SimTime};

/// What the buyer asks for.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionPolicy {
    pub content: ContentId,
    pub storage_mb: f64,
    pub upload_kbps: f64,
    pub download_kbps: f64,
    /// Hotspot regions the buyer favours. Affects discovery order and ties,
    /// never prices.
    pub preferred_regions: Vec<LocationId>,
    /// How long the replica must be held.
    pub duration: SimTime,
    pub retry_count: u32,
}

impl AuctionPolicy {
    pub fn is_valid(&self) -> bool {
        self.storage_mb >= 0.0
            && self.upload_kbps > 0.0
            && self.download_kbps > 0.0
            && self.duration > SimTime::ZERO
    }
}

/// Knobs of the auction layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuctionParams {
    /// Replicas (winners) requested per auction.
    pub winners_wanted: usize,
    pub max_retries: u32,
    /// Relative undercut a non-winner needs before it triggers renegotiation.
    pub entrant_margin: f64,
    /// Relative ask change that counts as a winner varying its demand.
    pub demand_change_threshold: f64,
    /// Relaxation never shortens a policy below this.
    pub min_duration: SimTime,
}

impl Default for AuctionParams {
    fn default() -> Self {
        AuctionParams {
            winners_wanted: 1,
            max_retries: 3,
            entrant_margin: 0.10,
            demand_change_threshold: 0.5,
            min_duration: SimTime::from_secs(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bid {
    pub seller: ProviderId,
    pub amount: Money,
    pub submitted_at: SimTime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Award {
    pub seller: ProviderId,
    pub bid: Money,
    pub payment: Money,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoWinnerReason {
    AllAboveReserve,
    NoBids,
}

impl NoWinnerReason {
    pub fn as_str(self) -> &'static str {
        match self {
            NoWinnerReason::AllAboveReserve => "all-above-reserve",
            NoWinnerReason::NoBids => "no-bids",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuctionOutcome {
    /// Winners sorted by bid ascending; all share one payment.
    Awarded { winners: Vec<Award> },
    NoWinner { reason: NoWinnerReason },
}

impl AuctionOutcome {
    pub fn is_awarded(&self) -> bool {
        matches!(self, AuctionOutcome::Awarded { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuctionError {
    #[error("reserve {0} leaves the buyer no budget")]
    NoBudget(Money),
    #[error("retry {0} exceeds the limit of {1}")]
    RetryLimit(u32, u32),
    #[error("invalid auction policy")]
    InvalidPolicy,
    #[error("seller {0} already bid")]
    DuplicateBid(ProviderId),
    #[error("the buyer cannot bid in its own auction")]
    SelfBid,
    #[error("auction is closed")]
    Closed,
}

/// One auction round, owned by the auctioneer.
#[derive(Debug, Clone)]
pub struct Auction {
    buyer: ProviderId,
    policy: AuctionPolicy,
    reserve: Money,
    bids: Vec<Bid>,
    cleared: bool,
}

/// Start an auction for `buyer` with private reserve `reserve`.
pub fn open_auction(
    policy: AuctionPolicy,
    reserve: Money,
    buyer: ProviderId,
    params: &AuctionParams,
) -> Result<Auction, AuctionError> {
    if !reserve.is_positive() {
        return Err(AuctionError::NoBudget(reserve));
    }
    if policy.retry_count > params.max_retries {
        return Err(AuctionError::RetryLimit(policy.retry_count, params.max_retries));
    }
    if !policy.is_valid() {
        return Err(AuctionError::InvalidPolicy);
    }
    Ok(Auction { buyer, policy, reserve, bids: Vec::new(), cleared: false })
}

impl Auction {
    pub fn policy(&self) -> &AuctionPolicy {
        &self.policy
    }

    pub fn buyer(&self) -> &ProviderId {
        &self.buyer
    }

    pub fn bid_count(&self) -> usize {
        self.bids.len()
    }

    pub fn is_open(&self) -> bool {
        !self.cleared
    }

    /// Sealed bids become visible only once the auction has cleared.
    pub fn revealed_bids(&self) -> Option<&[Bid]> {
        self.cleared.then_some(&self.bids[..])
    }

    /// The reserve, disclosed after clearing for the transcript.
    pub fn revealed_reserve(&self) -> Option<Money> {
        self.cleared.then_some(self.reserve)
    }

    pub fn submit_bid(&mut self, bid: Bid) -> Result<(), AuctionError> {
        if self.cleared {
            return Err(AuctionError::Closed);
        }
        if bid.seller == self.buyer {
            return Err(AuctionError::SelfBid);
        }
        if self.bids.iter().any(|b| b.seller == bid.seller) {
            return Err(AuctionError::DuplicateBid(bid.seller));
        }
        self.bids.push(bid);
        Ok(())
    }

    /// Close the auction and pick up to `winners_wanted` winners.
    pub fn clear(&mut self, winners_wanted: usize) -> Result<AuctionOutcome, AuctionError> {
        if self.cleared {
            return Err(AuctionError::Closed);
        }
        self.cleared = true;
        Ok(clear_bids(&self.bids, self.reserve, winners_wanted))
    }
}

/// Deterministic bid order: amount, then submission time, then seller id.
/// Sellers in preferred regions are asked first, so they win exact ties.
fn bid_order(a: &Bid, b: &Bid) -> Ordering {
    a.amount
        .cmp(&b.amount)
        .then(a.submitted_at.cmp(&b.submitted_at))
        .then_with(|| a.seller.cmp(&b.seller))
}

/// Clearing rule on a bare bid list.
pub fn clear_bids(bids: &[Bid], reserve: Money, winners_wanted: usize) -> AuctionOutcome {
    if bids.is_empty() {
        return AuctionOutcome::NoWinner { reason: NoWinnerReason::NoBids };
    }
    let mut eligible: Vec<&Bid> = bids.iter().filter(|b| b.amount <= reserve).collect();
    if eligible.is_empty() {
        return AuctionOutcome::NoWinner { reason: NoWinnerReason::AllAboveReserve };
    }
    eligible.sort_by(|a, b| bid_order(a, b));
    let m = winners_wanted.max(1).min(eligible.len());
    let payment = eligible.get(m).map_or(reserve, |b| b.amount);
    let winners = eligible[..m]
        .iter()
        .map(|b| Award { seller: b.seller.clone(), bid: b.amount, payment })
        .collect();
    AuctionOutcome::Awarded { winners }
}

/// What to do after an auction ended without a winner.
#[derive(Debug, Clone, PartialEq)]
pub enum Retry {
    Relaxed(AuctionPolicy),
    GiveUp,
}

/// Relax the policy for another round: halve the holding time (floored at
/// `min_duration`) and bump the retry counter. Gives up after
/// `max_retries` or once the duration is already at the floor.
pub fn retry_after_no_winner(policy: &AuctionPolicy, params: &AuctionParams) -> Retry {
    if policy.retry_count >= params.max_retries || policy.duration <= params.min_duration {
        return Retry::GiveUp;
    }
    let halved = SimTime(policy.duration.micros() / 2);
    let mut next = policy.clone();
    next.duration = if halved < params.min_duration { params.min_duration } else { halved };
    next.retry_count += 1;
    Retry::Relaxed(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RenegotiationKind {
    DemandChange,
    NoLongerBeneficial,
    CheaperEntrant,
}

impl RenegotiationKind {
    pub const ALL: [RenegotiationKind; 3] = [
        RenegotiationKind::DemandChange,
        RenegotiationKind::NoLongerBeneficial,
        RenegotiationKind::CheaperEntrant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RenegotiationKind::DemandChange => "demand-change",
            RenegotiationKind::NoLongerBeneficial => "no-longer-beneficial",
            RenegotiationKind::CheaperEntrant => "cheaper-entrant",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenegotiationEvent {
    pub kind: RenegotiationKind,
    pub content: ContentId,
    pub vo: VoId,
    /// Seller whose state raised the trigger.
    pub seller: ProviderId,
    pub detected_at: SimTime,
}

/// A winner's current view of the replica it holds.
#[derive(Debug, Clone, PartialEq)]
pub struct HeldPosition {
    pub seller: ProviderId,
    pub winning_bid: Money,
    pub payment: Money,
    /// What the seller would ask today; `None` if it would abstain.
    pub current_ask: Option<Money>,
    /// Utility of keeping the replica for its remaining lifetime.
    pub remaining_utility: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntrantAsk {
    pub seller: ProviderId,
    pub ask: Money,
}

/// Market snapshot for one live VO.
#[derive(Debug, Clone, PartialEq)]
pub struct VoMarketView {
    pub vo: VoId,
    pub content: ContentId,
    pub winners: Vec<HeldPosition>,
    pub entrants: Vec<EntrantAsk>,
}

/// Check the three renegotiation triggers. Emits at most one event per kind,
/// in the order no-longer-beneficial, demand-change, cheaper-entrant.
pub fn detect_renegotiation(
    view: &VoMarketView,
    params: &AuctionParams,
    now: SimTime,
) -> Vec<RenegotiationEvent> {
    let event = |kind, seller: &ProviderId| RenegotiationEvent {
        kind,
        content: view.content,
        vo: view.vo,
        seller: seller.clone(),
        detected_at: now,
    };
    let mut out = Vec::new();
    if let Some(w) = view
        .winners
        .iter()
        .find(|w| !(w.remaining_utility > 0.0) || w.current_ask.is_none())
    {
        out.push(event(RenegotiationKind::NoLongerBeneficial, &w.seller));
    }
    let changed = view.winners.iter().find(|w| match w.current_ask {
        Some(ask) => {
            let diff = (ask.cents() - w.winning_bid.cents()).unsigned_abs() as f64;
            ask != w.winning_bid && diff > params.demand_change_threshold * w.winning_bid.cents() as f64
        }
        None => false,
    });
    if let Some(w) = changed {
        out.push(event(RenegotiationKind::DemandChange, &w.seller));
    }
    if let Some(payment) = view.winners.iter().map(|w| w.payment).min() {
        let bar = (1.0 - params.entrant_margin) * payment.cents() as f64;
        let cheapest = view
            .entrants
            .iter()
            .filter(|e| (e.ask.cents() as f64) < bar)
            .min_by(|a, b| a.ask.cmp(&b.ask).then_with(|| a.seller.cmp(&b.seller)));
        if let Some(e) = cheapest {
            out.push(event(RenegotiationKind::CheaperEntrant, &e.seller));
        }
    }
    out
}
