//! Run metrics, computed from the event log alone.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::log::{LogEvent, LogRecord};
use crate::auction::RenegotiationKind;
use crate::vo::VoId;
use crate::{Money, ProviderId};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    pub total_requests: u64,
    pub served_within_d: u64,
    pub sla_violation_rate: f64,
    pub mean_latency_ms: f64,
    /// Sum of the penalties found on every detection tick, in load units.
    pub total_penalty_load: f64,
    /// The same, converted to currency.
    pub total_penalty_cost: f64,
    pub revenue: BTreeMap<ProviderId, Money>,
    pub expenditure: BTreeMap<ProviderId, Money>,
    pub total_payments: Money,
    pub auctions_opened: u64,
    pub auctions_awarded: u64,
    pub auctions_no_winner: u64,
    pub auctions_refused: u64,
    pub auction_retries: u64,
    pub sla_risk_events: u64,
    pub vos_formed: u64,
    pub vos_closed: u64,
    pub replicas_placed: u64,
    pub replicas_transferred: u64,
    pub replicas_evicted: u64,
    pub replicas_expired: u64,
    pub replicas_released: u64,
    pub winners_dropped: u64,
    pub policy_denials: u64,
    pub renegotiations: BTreeMap<RenegotiationKind, u64>,
}

impl Metrics {
    pub fn from_log(records: &[LogRecord]) -> Metrics {
        let mut m = Metrics::default();
        for k in RenegotiationKind::ALL {
            m.renegotiations.insert(k, 0);
        }
        let mut latency_sum: u64 = 0;
        let mut buyers: BTreeMap<VoId, ProviderId> = BTreeMap::new();
        let pay = |m: &mut Metrics, buyer: Option<&ProviderId>, seller: &ProviderId, amount: Money| {
            *m.revenue.entry(seller.clone()).or_default() += amount;
            if let Some(b) = buyer {
                *m.expenditure.entry(b.clone()).or_default() += amount;
            }
            m.total_payments += amount;
        };
        for r in records {
            match &r.event {
                LogEvent::Request { latency_ms, sigma, .. } => {
                    m.total_requests += 1;
                    m.served_within_d += *sigma as u64;
                    latency_sum += *latency_ms as u64;
                }
                LogEvent::Penalty { load, cost, .. } => {
                    m.total_penalty_load += load;
                    m.total_penalty_cost += cost;
                }
                LogEvent::AuctionOpened { .. } => m.auctions_opened += 1,
                LogEvent::AuctionCleared { outcome, .. } => {
                    if outcome == "awarded" {
                        m.auctions_awarded += 1;
                    } else {
                        m.auctions_no_winner += 1;
                    }
                }
                LogEvent::AuctionRefused { .. } => m.auctions_refused += 1,
                LogEvent::AuctionRetry { .. } => m.auction_retries += 1,
                LogEvent::SlaRisk { .. } => m.sla_risk_events += 1,
                LogEvent::VoFormed { vo, buyer, .. } => {
                    m.vos_formed += 1;
                    buyers.insert(*vo, buyer.clone());
                }
                LogEvent::VoClosed { .. } => m.vos_closed += 1,
                LogEvent::ReplicaPlaced { vo, provider, payment, .. } => {
                    m.replicas_placed += 1;
                    pay(&mut m, buyers.get(vo), provider, *payment);
                }
                LogEvent::ReplicaTransferred { vo, provider, payment, .. } => {
                    m.replicas_transferred += 1;
                    pay(&mut m, buyers.get(vo), provider, *payment);
                }
                LogEvent::ReplicaEvicted { .. } => m.replicas_evicted += 1,
                LogEvent::ReplicaExpired { .. } => m.replicas_expired += 1,
                LogEvent::ReplicaReleased { .. } => m.replicas_released += 1,
                LogEvent::WinnerDropped { .. } => m.winners_dropped += 1,
                LogEvent::PolicyDenied { .. } => m.policy_denials += 1,
                LogEvent::Renegotiation { kind, .. } => *m.renegotiations.entry(*kind).or_default() += 1,
                LogEvent::Predict { .. }
                | LogEvent::BidRevealed { .. }
                | LogEvent::FlashCrowd { .. }
                | LogEvent::ScheduledNotice { .. } => {}
            }
        }
        if m.total_requests > 0 {
            let total = m.total_requests as f64;
            m.sla_violation_rate = 1.0 - m.served_within_d as f64 / total;
            m.mean_latency_ms = latency_sum as f64 / total;
        }
        m
    }

    /// Flat `key = value` pairs in a fixed order.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| out.push((k.to_string(), v));
        put("total_requests", format!("{}", self.total_requests));
        put("served_within_d", format!("{}", self.served_within_d));
        put("sla_violation_rate", format!("{}", self.sla_violation_rate));
        put("mean_latency_ms", format!("{}", self.mean_latency_ms));
        put("total_penalty_load", format!("{}", self.total_penalty_load));
        put("total_penalty_cost", format!("{}", self.total_penalty_cost));
        put("total_payments", format!("{}", self.total_payments));
        put("auctions_opened", format!("{}", self.auctions_opened));
        put("auctions_awarded", format!("{}", self.auctions_awarded));
        put("auctions_no_winner", format!("{}", self.auctions_no_winner));
        put("auctions_refused", format!("{}", self.auctions_refused));
        put("auction_retries", format!("{}", self.auction_retries));
        put("sla_risk_events", format!("{}", self.sla_risk_events));
        put("vos_formed", format!("{}", self.vos_formed));
        put("vos_closed", format!("{}", self.vos_closed));
        put("replicas_placed", format!("{}", self.replicas_placed));
        put("replicas_transferred", format!("{}", self.replicas_transferred));
        put("replicas_evicted", format!("{}", self.replicas_evicted));
        put("replicas_expired", format!("{}", self.replicas_expired));
        put("replicas_released", format!("{}", self.replicas_released));
        put("winners_dropped", format!("{}", self.winners_dropped));
        put("policy_denials", format!("{}", self.policy_denials));
        for (k, n) in &self.renegotiations {
            out.push((format!("renegotiations.{}", k.as_str()), format!("{n}")));
        }
        for (p, v) in &self.revenue {
            out.push((format!("revenue.{p}"), format!("{v}")));
        }
        for (p, v) in &self.expenditure {
            out.push((format!("expenditure.{p}"), format!("{v}")));
        }
        out
    }
}
