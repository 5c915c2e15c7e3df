use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::VoError;
use crate::auction::AuctionPolicy;
use crate::{ContentId, LocationId, Money, ProviderId, SimTime};

/// A seller's published resources.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceAd {
    pub provider: ProviderId,
    pub region: LocationId,
    /// `capacity - used` when the ad was published.
    pub free_mb: f64,
    /// Space the seller could free by evicting replicas it holds.
    pub reclaimable_mb: f64,
    pub upload_kbps: f64,
    pub download_kbps: f64,
    pub ask_hint: Option<Money>,
}

/// A buyer's published need.
#[derive(Debug, Clone, PartialEq)]
pub struct RequirementAd {
    pub buyer: ProviderId,
    pub policy: AuctionPolicy,
    pub published_at: SimTime,
}

impl RequirementAd {
    pub fn expires_at(&self) -> SimTime {
        self.published_at + self.policy.duration
    }
}

/// Discovery board shared by all providers.
#[derive(Debug, Clone, Default)]
pub struct ServiceRegistry {
    services: BTreeMap<ProviderId, ServiceAd>,
    requirements: Vec<RequirementAd>,
}

impl ServiceRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Replaces any earlier ad of the same provider.
    pub fn publish_service(&mut self, ad: ServiceAd) {
        self.services.insert(ad.provider.clone(), ad);
    }

    pub fn services(&self) -> impl Iterator<Item = &ServiceAd> {
        self.services.values()
    }

    pub fn publish_requirement(&mut self, ad: RequirementAd) -> Result<(), VoError> {
        if !ad.policy.is_valid() {
            return Err(VoError::InvalidRequirement);
        }
        let now = ad.published_at;
        self.expire_requirements(now);
        if self
            .requirements
            .iter()
            .any(|r| r.buyer == ad.buyer && r.policy.content == ad.policy.content)
        {
            return Err(VoError::DuplicateRequirement(ad.buyer, ad.policy.content));
        }
        self.requirements.push(ad);
        Ok(())
    }

    /// Remove a matched requirement.
    pub fn withdraw_requirement(&mut self, buyer: &ProviderId, content: ContentId) {
        self.requirements.retain(|r| !(&r.buyer == buyer && r.policy.content == content));
    }

    pub fn expire_requirements(&mut self, now: SimTime) {
        self.requirements.retain(|r| r.expires_at() > now);
    }

    pub fn requirements(&self) -> &[RequirementAd] {
        &self.requirements
    }

    /// Sellers able to host `policy`, excluding `buyer`. Sellers in a
    /// preferred region come first, then provider id order.
    pub fn discover_sellers(&self, policy: &AuctionPolicy, buyer: &ProviderId) -> Vec<ServiceAd> {
        let mut out: Vec<ServiceAd> = self
            .services
            .values()
            .filter(|ad| {
                &ad.provider != buyer
                    && ad.free_mb + ad.reclaimable_mb >= policy.storage_mb
                    && ad.upload_kbps >= policy.upload_kbps
                    && ad.download_kbps >= policy.download_kbps
            })
            .cloned()
            .collect();
        out.sort_by_key(|ad| !policy.preferred_regions.contains(&ad.region));
        out
    }
}
