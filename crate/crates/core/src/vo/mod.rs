//! Providers, discovery, policies and virtual organizations.
//!
//! A VO binds one buyer to the winners of one auction for one content. It
//! lives until its holding time runs out, is rearranged by a renegotiation
//! auction, or loses all its sellers.

mod policy;
mod registry;
mod surrogate;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use thiserror::Error;

pub use self::policy::{
    check_policies, CandidateVo, Effect, PolicyDecision, PolicyRepository, PolicyRule, Predicate,
    RuleSubject,
};
pub use self::registry::{RequirementAd, ServiceAd, ServiceRegistry};
pub use self::surrogate::{evict_for_replica, plan_eviction, EvictionPlan, Replica, SurrogateServer};

use crate::auction::{AuctionPolicy, Award};
use crate::{ContentId, Money, ProviderId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VoId(pub u64);

impl core::fmt::Display for VoId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VoKind {
    /// Formed on demand after a flash crowd was detected.
    ShortTerm,
    /// Formed ahead of a scheduled event.
    LongTerm,
}

impl VoKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VoKind::ShortTerm => "short-term",
            VoKind::LongTerm => "long-term",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "short-term" => Some(VoKind::ShortTerm),
            "long-term" => Some(VoKind::LongTerm),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloseReason {
    Expired,
    Rearranged(VoId),
    /// A seller left and nobody replaced it.
    Disbanded,
    /// Every seller evicted its replica.
    Emptied,
}

impl CloseReason {
    pub fn as_str(self) -> &'static str {
        match self {
            CloseReason::Expired => "expired",
            CloseReason::Rearranged(_) => "rearranged",
            CloseReason::Disbanded => "disbanded",
            CloseReason::Emptied => "emptied",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoStatus {
    Live,
    Closed(CloseReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VirtualOrganization {
    pub id: VoId,
    pub kind: VoKind,
    pub buyer: ProviderId,
    pub sellers: Vec<Award>,
    pub content: ContentId,
    pub storage_mb: f64,
    pub formed_at: SimTime,
    pub expires_at: SimTime,
    pub policy_set: Vec<PolicyRule>,
    /// The VO this one replaced, if it came out of a renegotiation.
    pub previous: Option<VoId>,
    pub status: VoStatus,
}

impl VirtualOrganization {
    pub fn is_live(&self) -> bool {
        self.status == VoStatus::Live
    }

    pub fn has_seller(&self, p: &ProviderId) -> bool {
        self.sellers.iter().any(|a| &a.seller == p)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VoError {
    #[error("unknown provider {0}")]
    UnknownProvider(ProviderId),
    #[error("unknown or closed VO {0}")]
    UnknownVo(VoId),
    #[error("provider {0} lacks space")]
    InsufficientSpace(ProviderId),
    #[error("provider {0} already holds content {1}")]
    AlreadyHeld(ProviderId, ContentId),
    #[error("requirement already published by {0} for content {1}")]
    DuplicateRequirement(ProviderId, ContentId),
    #[error("invalid requirement")]
    InvalidRequirement,
    #[error("auction outcome has no winners")]
    NotAwarded,
}

/// Everything a VO operation changed, for the event log.
#[derive(Debug, Clone, PartialEq)]
pub enum VoEvent {
    Formed { vo: VoId, kind: VoKind, buyer: ProviderId, content: ContentId, expires_at: SimTime },
    PolicyDenied { buyer: ProviderId, content: ContentId, violated: Vec<usize> },
    ReplicaPlaced { provider: ProviderId, content: ContentId, vo: VoId, size_mb: f64, payment: Money, used_mb: f64 },
    /// A staying seller's replica moved to the rearranged VO.
    ReplicaTransferred { provider: ProviderId, content: ContentId, vo: VoId, payment: Money },
    ReplicaEvicted { provider: ProviderId, content: ContentId, vo: VoId, used_mb: f64 },
    ReplicaExpired { provider: ProviderId, content: ContentId, vo: VoId, used_mb: f64 },
    ReplicaReleased { provider: ProviderId, content: ContentId, vo: VoId, used_mb: f64 },
    WinnerDropped { provider: ProviderId, content: ContentId },
    Closed { vo: VoId, reason: CloseReason },
}

/// Surrogates, registry, policy repository and VO table, owned by the event
/// loop.
#[derive(Debug, Clone, Default)]
pub struct Federation {
    pub surrogates: BTreeMap<ProviderId, SurrogateServer>,
    pub registry: ServiceRegistry,
    pub policies: PolicyRepository,
    vos: BTreeMap<VoId, VirtualOrganization>,
    next_vo: u64,
}

impl Federation {
    pub fn new(surrogates: Vec<SurrogateServer>, policies: PolicyRepository) -> Self {
        let mut f = Federation {
            surrogates: surrogates.into_iter().map(|s| (s.provider.clone(), s)).collect(),
            registry: ServiceRegistry::new(),
            policies,
            vos: BTreeMap::new(),
            next_vo: 1,
        };
        f.refresh_ads();
        f
    }

    pub fn vo(&self, id: VoId) -> Option<&VirtualOrganization> {
        self.vos.get(&id)
    }

    pub fn vos(&self) -> impl Iterator<Item = &VirtualOrganization> {
        self.vos.values()
    }

    pub fn live_vos(&self) -> impl Iterator<Item = &VirtualOrganization> {
        self.vos.values().filter(|v| v.is_live())
    }

    /// Providers currently holding a replica of `content`.
    pub fn holders(&self, content: ContentId) -> impl Iterator<Item = &SurrogateServer> {
        self.surrogates.values().filter(move |s| s.holds(content))
    }

    /// Republish every surrogate's service ad from its current state.
    pub fn refresh_ads(&mut self) {
        for s in self.surrogates.values() {
            self.registry.publish_service(ServiceAd {
                provider: s.provider.clone(),
                region: s.region,
                free_mb: s.free_mb(),
                reclaimable_mb: s.used_mb(),
                upload_kbps: s.upload_kbps,
                download_kbps: s.download_kbps,
                ask_hint: None,
            });
        }
    }

    fn candidate(&self, buyer: &ProviderId, winners: &[Award], policy: &AuctionPolicy) -> CandidateVo {
        CandidateVo {
            buyer: buyer.clone(),
            sellers: winners
                .iter()
                .filter_map(|w| self.surrogates.get(&w.seller).map(|s| (w.seller.clone(), s.region)))
                .collect(),
            content: policy.content,
            storage_mb: policy.storage_mb,
            duration: policy.duration,
        }
    }

    /// Form a VO from an awarded auction and place the replicas.
    ///
    /// The policy check runs first; on deny nothing is placed. Winners whose
    /// space cannot be freed by eviction, or whose payment is not positive,
    /// are dropped. `er_of` prices held replicas for eviction order.
    pub fn form_vo(
        &mut self,
        buyer: &ProviderId,
        winners: &[Award],
        policy: &AuctionPolicy,
        kind: VoKind,
        now: SimTime,
        er_of: &dyn Fn(&ProviderId, ContentId) -> f64,
    ) -> Result<(Option<VoId>, Vec<VoEvent>), VoError> {
        self.form_inner(buyer, winners, policy, kind, now, None, er_of)
    }

    #[allow(clippy::too_many_arguments)]
    fn form_inner(
        &mut self,
        buyer: &ProviderId,
        winners: &[Award],
        policy: &AuctionPolicy,
        kind: VoKind,
        now: SimTime,
        previous: Option<VoId>,
        er_of: &dyn Fn(&ProviderId, ContentId) -> f64,
    ) -> Result<(Option<VoId>, Vec<VoEvent>), VoError> {
        if winners.is_empty() {
            return Err(VoError::NotAwarded);
        }
        let mut events = Vec::new();
        let candidate = self.candidate(buyer, winners, policy);
        if let PolicyDecision::Deny(violated) = self.policies.check(&candidate) {
            events.push(VoEvent::PolicyDenied { buyer: buyer.clone(), content: policy.content, violated });
            return Ok((None, events));
        }
        let id = VoId(self.next_vo);
        let expires_at = now + policy.duration;
        let mut seated = Vec::new();
        for w in winners {
            let Some(s) = self.surrogates.get(&w.seller) else {
                return Err(VoError::UnknownProvider(w.seller.clone()));
            };
            if !w.payment.is_positive() {
                events.push(VoEvent::WinnerDropped { provider: w.seller.clone(), content: policy.content });
                continue;
            }
            if let Some(held) = s.replica(policy.content) {
                if Some(held.vo) == previous {
                    let s = self.surrogates.get_mut(&w.seller).expect("checked above");
                    let r = s.replica_mut(policy.content).expect("held");
                    r.vo = id;
                    r.payment = w.payment;
                    r.expires_at = expires_at;
                    events.push(VoEvent::ReplicaTransferred {
                        provider: w.seller.clone(),
                        content: policy.content,
                        vo: id,
                        payment: w.payment,
                    });
                    seated.push(w.clone());
                } else {
                    events.push(VoEvent::WinnerDropped { provider: w.seller.clone(), content: policy.content });
                }
                continue;
            }
            let plan = match plan_eviction(s, policy.storage_mb, |c| er_of(&w.seller, c)) {
                Ok(plan) => plan,
                Err(_) => {
                    events.push(VoEvent::WinnerDropped { provider: w.seller.clone(), content: policy.content });
                    continue;
                }
            };
            for c in plan.evicted {
                self.evict(&w.seller, c, &mut events);
            }
            let s = self.surrogates.get_mut(&w.seller).expect("checked above");
            s.place(
                policy.content,
                Replica {
                    size_mb: policy.storage_mb,
                    placed_at: now,
                    expires_at,
                    payment: w.payment,
                    vo: id,
                },
            )?;
            events.push(VoEvent::ReplicaPlaced {
                provider: w.seller.clone(),
                content: policy.content,
                vo: id,
                size_mb: policy.storage_mb,
                payment: w.payment,
                used_mb: s.used_mb(),
            });
            seated.push(w.clone());
        }
        if seated.is_empty() {
            return Ok((None, events));
        }
        self.next_vo += 1;
        events.insert(
            0,
            VoEvent::Formed { vo: id, kind, buyer: buyer.clone(), content: policy.content, expires_at },
        );
        let policy_set = self.policies.applicable(&candidate);
        self.vos.insert(
            id,
            VirtualOrganization {
                id,
                kind,
                buyer: buyer.clone(),
                sellers: seated,
                content: policy.content,
                storage_mb: policy.storage_mb,
                formed_at: now,
                expires_at,
                policy_set,
                previous,
                status: VoStatus::Live,
            },
        );
        self.refresh_ads();
        Ok((Some(id), events))
    }

    fn evict(&mut self, provider: &ProviderId, content: ContentId, events: &mut Vec<VoEvent>) {
        let Some(s) = self.surrogates.get_mut(provider) else { return };
        let Some(r) = s.remove(content) else { return };
        events.push(VoEvent::ReplicaEvicted { provider: provider.clone(), content, vo: r.vo, used_mb: s.used_mb() });
        self.drop_seller(r.vo, provider, CloseReason::Emptied, events);
    }

    fn drop_seller(&mut self, vo: VoId, provider: &ProviderId, reason: CloseReason, events: &mut Vec<VoEvent>) {
        if let Some(v) = self.vos.get_mut(&vo) {
            v.sellers.retain(|a| &a.seller != provider);
            if v.sellers.is_empty() && v.is_live() {
                v.status = VoStatus::Closed(reason);
                events.push(VoEvent::Closed { vo, reason });
            }
        }
    }

    fn release_all(&mut self, vo: VoId, kind: fn(ProviderId, ContentId, VoId, f64) -> VoEvent, events: &mut Vec<VoEvent>) {
        let Some(v) = self.vos.get(&vo) else { return };
        let content = v.content;
        let sellers: Vec<ProviderId> = v.sellers.iter().map(|a| a.seller.clone()).collect();
        for p in sellers {
            if let Some(s) = self.surrogates.get_mut(&p) {
                if s.replica(content).map(|r| r.vo) == Some(vo) {
                    s.remove(content);
                    events.push(kind(p.clone(), content, vo, s.used_mb()));
                }
            }
        }
    }

    /// Disband every live VO whose holding time has run out, in id order.
    pub fn expire_vos(&mut self, now: SimTime) -> (Vec<VoId>, Vec<VoEvent>) {
        let due: Vec<VoId> = self.live_vos().filter(|v| v.expires_at <= now).map(|v| v.id).collect();
        let mut events = Vec::new();
        for &id in &due {
            self.release_all(
                id,
                |provider, content, vo, used_mb| VoEvent::ReplicaExpired { provider, content, vo, used_mb },
                &mut events,
            );
            let v = self.vos.get_mut(&id).expect("live");
            v.status = VoStatus::Closed(CloseReason::Expired);
            events.push(VoEvent::Closed { vo: id, reason: CloseReason::Expired });
        }
        if !due.is_empty() {
            self.refresh_ads();
        }
        (due, events)
    }

    /// Apply the result of a renegotiation auction to a live VO.
    ///
    /// With new winners, departing sellers release their replicas and a new
    /// VO takes over for the remaining lifetime. Without winners the VO stays
    /// as it was, except that a seller who no longer benefits leaves (and the
    /// VO disbands if it was the last one).
    pub fn rearrange_vo(
        &mut self,
        vo: VoId,
        departing: Option<&ProviderId>,
        winners: Option<&[Award]>,
        now: SimTime,
        er_of: &dyn Fn(&ProviderId, ContentId) -> f64,
    ) -> Result<(Option<VoId>, Vec<VoEvent>), VoError> {
        let old = self.vos.get(&vo).filter(|v| v.is_live()).cloned().ok_or(VoError::UnknownVo(vo))?;
        let mut events = Vec::new();
        let Some(winners) = winners.filter(|w| !w.is_empty()) else {
            if let Some(p) = departing.filter(|p| old.has_seller(p)) {
                if let Some(s) = self.surrogates.get_mut(p) {
                    s.remove(old.content);
                    events.push(VoEvent::ReplicaReleased {
                        provider: p.clone(),
                        content: old.content,
                        vo,
                        used_mb: s.used_mb(),
                    });
                }
                self.drop_seller(vo, p, CloseReason::Disbanded, &mut events);
                self.refresh_ads();
            }
            return Ok((None, events));
        };
        let remaining = old.expires_at.saturating_sub(now);
        let policy = AuctionPolicy {
            content: old.content,
            storage_mb: old.storage_mb,
            upload_kbps: 1.0,
            download_kbps: 1.0,
            preferred_regions: Vec::new(),
            duration: remaining,
            retry_count: 0,
        };
        if remaining == SimTime::ZERO {
            return Ok((None, events));
        }
        let candidate = self.candidate(&old.buyer, winners, &policy);
        if let PolicyDecision::Deny(violated) = self.policies.check(&candidate) {
            events.push(VoEvent::PolicyDenied { buyer: old.buyer.clone(), content: old.content, violated });
            return Ok((None, events));
        }
        for a in &old.sellers {
            if !winners.iter().any(|w| w.seller == a.seller) {
                if let Some(s) = self.surrogates.get_mut(&a.seller) {
                    s.remove(old.content);
                    events.push(VoEvent::ReplicaReleased {
                        provider: a.seller.clone(),
                        content: old.content,
                        vo,
                        used_mb: s.used_mb(),
                    });
                }
            }
        }
        let (new_id, mut formed) = self.form_inner(&old.buyer, winners, &policy, old.kind, now, Some(vo), er_of)?;
        let reason = match new_id {
            Some(id) => CloseReason::Rearranged(id),
            None => CloseReason::Disbanded,
        };
        if let Some(v) = self.vos.get_mut(&vo) {
            v.status = VoStatus::Closed(reason);
        }
        // Staying sellers that could not be re-seated still hold the old replica.
        self.release_all(
            vo,
            |provider, content, vo, used_mb| VoEvent::ReplicaReleased { provider, content, vo, used_mb },
            &mut formed,
        );
        events.append(&mut formed);
        events.push(VoEvent::Closed { vo, reason });
        self.refresh_ads();
        Ok((new_id, events))
    }

    /// Storage conservation and no-free-riding over every surrogate.
    pub fn audit(&self) -> Vec<&'static str> {
        let mut problems = Vec::new();
        for s in self.surrogates.values() {
            if s.storage_drift() > 1e-6 {
                problems.push("storage-drift");
            }
            if s.used_mb() > s.capacity_mb + 1e-6 {
                problems.push("over-capacity");
            }
            for r in s.replicas().values() {
                if !r.payment.is_positive() {
                    problems.push("free-riding");
                }
                if !self.vos.get(&r.vo).is_some_and(|v| v.is_live() && v.has_seller(&s.provider)) {
                    problems.push("orphan-replica");
                }
            }
        }
        problems
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::LocationId;
    use alloc::vec;

    fn fed(rules: Vec<PolicyRule>) -> Federation {
        let mk = |id: &str, region: u16, cap: f64| {
            SurrogateServer::new(ProviderId::new(id), LocationId(region), cap, 0.01, 1000.0, 1000.0, 10.0, 0.0)
        };
        Federation::new(
            vec![mk("origin", 0, 1000.0), mk("s1", 1, 300.0), mk("s2", 2, 300.0), mk("s3", 2, 120.0)],
            PolicyRepository::new(rules),
        )
    }

    fn policy(content: u32, secs: u64) -> AuctionPolicy {
        AuctionPolicy {
            content: ContentId(content),
            storage_mb: 100.0,
            upload_kbps: 10.0,
            download_kbps: 10.0,
            preferred_regions: vec![],
            duration: SimTime::from_secs(secs),
            retry_count: 0,
        }
    }

    fn award(s: &str, pay: i64) -> Award {
        Award { seller: ProviderId::new(s), bid: Money(pay / 2), payment: Money(pay) }
    }

    fn no_er(_: &ProviderId, _: ContentId) -> f64 {
        0.0
    }

    fn buyer() -> ProviderId {
        ProviderId::new("origin")
    }

    #[test]
    fn single_winner_vo() {
        let mut f = fed(vec![]);
        let now = SimTime::from_secs(10);
        let (id, events) = f.form_vo(&buyer(), &[award("s1", 500)], &policy(3, 300), VoKind::ShortTerm, now, &no_er).unwrap();
        let v = f.vo(id.unwrap()).unwrap();
        assert_eq!(v.expires_at, SimTime::from_secs(310));
        assert_eq!(v.sellers.len(), 1);
        assert!(f.surrogates[&ProviderId::new("s1")].holds(ContentId(3)));
        assert!(matches!(events[0], VoEvent::Formed { .. }));
        assert!(f.audit().is_empty());
    }

    #[test]
    fn two_winners_share_expiry() {
        let mut f = fed(vec![]);
        let (id, _) = f
            .form_vo(&buyer(), &[award("s1", 500), award("s2", 500)], &policy(3, 60), VoKind::LongTerm, SimTime::ZERO, &no_er)
            .unwrap();
        let id = id.unwrap();
        for s in ["s1", "s2"] {
            assert_eq!(f.surrogates[&ProviderId::new(s)].replica(ContentId(3)).unwrap().expires_at, SimTime::from_secs(60));
        }
        assert_eq!(f.vo(id).unwrap().kind, VoKind::LongTerm);
    }

    #[test]
    fn policy_deny_places_nothing() {
        let rule = PolicyRule {
            subject: RuleSubject::AnyVo,
            predicate: Predicate::ForbiddenContentRange(ContentId(1), ContentId(5)),
            effect: Effect::Deny,
        };
        let mut f = fed(vec![rule]);
        let (id, events) = f.form_vo(&buyer(), &[award("s1", 500)], &policy(3, 60), VoKind::ShortTerm, SimTime::ZERO, &no_er).unwrap();
        assert!(id.is_none());
        assert!(matches!(events[..], [VoEvent::PolicyDenied { .. }]));
        assert_eq!(f.holders(ContentId(3)).count(), 0);
    }

    #[test]
    fn placement_evicts_and_empties_other_vo() {
        let mut f = fed(vec![]);
        let (first, _) = f.form_vo(&buyer(), &[award("s3", 200)], &policy(1, 600), VoKind::ShortTerm, SimTime::ZERO, &no_er).unwrap();
        let (second, events) = f.form_vo(&buyer(), &[award("s3", 300)], &policy(2, 600), VoKind::ShortTerm, SimTime::from_secs(1), &no_er).unwrap();
        assert!(second.is_some());
        assert!(events.iter().any(|e| matches!(e, VoEvent::ReplicaEvicted { .. })));
        assert_eq!(f.vo(first.unwrap()).unwrap().status, VoStatus::Closed(CloseReason::Emptied));
        assert!(f.audit().is_empty());
    }

    #[test]
    fn zero_payment_winner_dropped() {
        let mut f = fed(vec![]);
        let (id, events) = f.form_vo(&buyer(), &[award("s1", 0)], &policy(3, 60), VoKind::ShortTerm, SimTime::ZERO, &no_er).unwrap();
        assert!(id.is_none());
        assert!(matches!(events[..], [VoEvent::WinnerDropped { .. }]));
    }

    #[test]
    fn expiry_in_id_order() {
        let mut f = fed(vec![]);
        let t0 = SimTime::ZERO;
        let (a, _) = f.form_vo(&buyer(), &[award("s1", 100)], &policy(1, 60), VoKind::ShortTerm, t0, &no_er).unwrap();
        let (b, _) = f.form_vo(&buyer(), &[award("s2", 100)], &policy(2, 60), VoKind::ShortTerm, t0, &no_er).unwrap();
        let (c, _) = f.form_vo(&buyer(), &[award("s1", 100)], &policy(3, 600), VoKind::ShortTerm, t0, &no_er).unwrap();
        let (gone, _) = f.expire_vos(SimTime::from_secs(30));
        assert!(gone.is_empty());
        let (gone, _) = f.expire_vos(SimTime::from_secs(60));
        assert_eq!(gone, vec![a.unwrap(), b.unwrap()]);
        assert!(f.vo(c.unwrap()).unwrap().is_live());
        assert_eq!(f.surrogates[&ProviderId::new("s1")].used_mb(), 100.0);
        assert!(f.audit().is_empty());
    }

    #[test]
    fn rearrange_swaps_seller() {
        let mut f = fed(vec![]);
        let (old, _) = f.form_vo(&buyer(), &[award("s1", 700)], &policy(4, 300), VoKind::ShortTerm, SimTime::ZERO, &no_er).unwrap();
        let old = old.unwrap();
        let now = SimTime::from_secs(100);
        let (new, _) = f.rearrange_vo(old, None, Some(&[award("s2", 500)]), now, &no_er).unwrap();
        let new = new.unwrap();
        assert!(!f.surrogates[&ProviderId::new("s1")].holds(ContentId(4)));
        assert!(f.surrogates[&ProviderId::new("s2")].holds(ContentId(4)));
        assert_eq!(f.vo(new).unwrap().expires_at, SimTime::from_secs(300));
        assert_eq!(f.vo(new).unwrap().previous, Some(old));
        assert_eq!(f.vo(old).unwrap().status, VoStatus::Closed(CloseReason::Rearranged(new)));
        assert!(f.audit().is_empty());
    }

    #[test]
    fn rearrange_keeps_staying_seller() {
        let mut f = fed(vec![]);
        let (old, _) = f.form_vo(&buyer(), &[award("s1", 700)], &policy(4, 300), VoKind::ShortTerm, SimTime::ZERO, &no_er).unwrap();
        let (new, _) = f.rearrange_vo(old.unwrap(), None, Some(&[award("s1", 400)]), SimTime::from_secs(5), &no_er).unwrap();
        let s1 = &f.surrogates[&ProviderId::new("s1")];
        assert_eq!(s1.replica(ContentId(4)).unwrap().vo, new.unwrap());
        assert_eq!(s1.replica(ContentId(4)).unwrap().payment, Money(400));
        assert_eq!(s1.used_mb(), 100.0);
        assert!(f.audit().is_empty());
    }

    #[test]
    fn no_winner_keeps_status_quo_or_disbands() {
        let mut f = fed(vec![]);
        let (old, _) = f.form_vo(&buyer(), &[award("s1", 700)], &policy(4, 300), VoKind::ShortTerm, SimTime::ZERO, &no_er).unwrap();
        let old = old.unwrap();
        let (none, _) = f.rearrange_vo(old, None, None, SimTime::from_secs(5), &no_er).unwrap();
        assert!(none.is_none());
        assert!(f.vo(old).unwrap().is_live());
        let s1 = ProviderId::new("s1");
        f.rearrange_vo(old, Some(&s1), None, SimTime::from_secs(6), &no_er).unwrap();
        assert_eq!(f.vo(old).unwrap().status, VoStatus::Closed(CloseReason::Disbanded));
        assert_eq!(f.holders(ContentId(4)).count(), 0);
        assert!(f.audit().is_empty());
    }
}
