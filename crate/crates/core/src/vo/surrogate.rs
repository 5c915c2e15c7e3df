use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{VoError, VoId};
use crate::{ContentId, LocationId, Money, ProviderId, SimTime};

/// A replica held on a surrogate on behalf of a VO.
#[derive(Debug, Clone, PartialEq)]
pub struct Replica {
    pub size_mb: f64,
    pub placed_at: SimTime,
    pub expires_at: SimTime,
    pub payment: Money,
    pub vo: VoId,
}

/// One provider's surrogate server.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateServer {
    pub provider: ProviderId,
    pub region: LocationId,
    pub capacity_mb: f64,
    used_mb: f64,
    /// Storage cost per MB.
    pub unit_storage_cost: f64,
    pub upload_kbps: f64,
    pub download_kbps: f64,
    pub capacity_threshold: f64,
    /// Signed bidding eagerness.
    pub eagerness: f64,
    replicas: BTreeMap<ContentId, Replica>,
}

impl SurrogateServer {
    pub fn new(
        provider: ProviderId,
        region: LocationId,
        capacity_mb: f64,
        unit_storage_cost: f64,
        upload_kbps: f64,
        download_kbps: f64,
        capacity_threshold: f64,
        eagerness: f64,
    ) -> Self {
        SurrogateServer {
            provider,
            region,
            capacity_mb,
            used_mb: 0.0,
            unit_storage_cost,
            upload_kbps,
            download_kbps,
            capacity_threshold,
            eagerness,
            replicas: BTreeMap::new(),
        }
    }

    pub fn used_mb(&self) -> f64 {
        self.used_mb
    }

    pub fn free_mb(&self) -> f64 {
        self.capacity_mb - self.used_mb
    }

    pub fn replicas(&self) -> &BTreeMap<ContentId, Replica> {
        &self.replicas
    }

    pub fn replica(&self, content: ContentId) -> Option<&Replica> {
        self.replicas.get(&content)
    }

    pub fn replica_mut(&mut self, content: ContentId) -> Option<&mut Replica> {
        self.replicas.get_mut(&content)
    }

    pub fn holds(&self, content: ContentId) -> bool {
        self.replicas.contains_key(&content)
    }

    pub(crate) fn place(&mut self, content: ContentId, replica: Replica) -> Result<(), VoError> {
        if self.holds(content) {
            return Err(VoError::AlreadyHeld(self.provider.clone(), content));
        }
        if replica.size_mb > self.free_mb() + 1e-9 {
            return Err(VoError::InsufficientSpace(self.provider.clone()));
        }
        self.used_mb += replica.size_mb;
        self.replicas.insert(content, replica);
        Ok(())
    }

    pub(crate) fn remove(&mut self, content: ContentId) -> Option<Replica> {
        let r = self.replicas.remove(&content)?;
        self.used_mb -= r.size_mb;
        if self.replicas.is_empty() {
            self.used_mb = 0.0;
        }
        Some(r)
    }

    /// Difference between `used_mb` and the summed replica sizes.
    pub fn storage_drift(&self) -> f64 {
        let held: f64 = self.replicas.values().map(|r| r.size_mb).sum();
        libm::fabs(self.used_mb - held)
    }
}

/// Replicas a seller would delete to fit an incoming one, and the expected
/// revenue it forgoes by doing so.
#[derive(Debug, Clone, PartialEq)]
pub struct EvictionPlan {
    pub evicted: Vec<ContentId>,
    pub er_old: f64,
}

/// Greedy plan: drop held replicas in ascending expected revenue (larger
/// first on equal revenue) until `incoming_mb` fits. Does not touch the
/// surrogate.
pub fn plan_eviction(
    surrogate: &SurrogateServer,
    incoming_mb: f64,
    er_of: impl Fn(ContentId) -> f64,
) -> Result<EvictionPlan, VoError> {
    let mut free = surrogate.free_mb();
    if free >= incoming_mb {
        return Ok(EvictionPlan { evicted: Vec::new(), er_old: 0.0 });
    }
    let mut candidates: Vec<(ContentId, f64, f64)> = surrogate
        .replicas
        .iter()
        .map(|(&c, r)| (c, er_of(c), r.size_mb))
        .collect();
    candidates.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap_or(Ordering::Equal)
            .then(b.2.partial_cmp(&a.2).unwrap_or(Ordering::Equal))
            .then(a.0.cmp(&b.0))
    });
    let mut plan = EvictionPlan { evicted: Vec::new(), er_old: 0.0 };
    for (c, er, size) in candidates {
        if free >= incoming_mb {
            break;
        }
        free += size;
        plan.er_old += er;
        plan.evicted.push(c);
    }
    if free < incoming_mb {
        return Err(VoError::InsufficientSpace(surrogate.provider.clone()));
    }
    Ok(plan)
}

/// Apply [`plan_eviction`] and return the removed replicas with the plan.
pub fn evict_for_replica(
    surrogate: &mut SurrogateServer,
    incoming_mb: f64,
    er_of: impl Fn(ContentId) -> f64,
) -> Result<(EvictionPlan, Vec<(ContentId, Replica)>), VoError> {
    let plan = plan_eviction(surrogate, incoming_mb, er_of)?;
    let removed = plan
        .evicted
        .iter()
        .filter_map(|&c| surrogate.remove(c).map(|r| (c, r)))
        .collect();
    Ok((plan, removed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn server(capacity: f64) -> SurrogateServer {
        SurrogateServer::new(ProviderId::new("s"), LocationId(0), capacity, 0.01, 1000.0, 1000.0, 10.0, 0.0)
    }

    fn replica(size: f64) -> Replica {
        Replica {
            size_mb: size,
            placed_at: SimTime::ZERO,
            expires_at: SimTime::from_secs(10),
            payment: Money(100),
            vo: VoId(1),
        }
    }

    #[test]
    fn greedy_by_revenue() {
        let mut s = server(160.0);
        s.place(ContentId(1), replica(30.0)).unwrap();
        s.place(ContentId(2), replica(50.0)).unwrap();
        assert_eq!(s.free_mb(), 80.0);
        let er = |c: ContentId| if c.0 == 1 { 0.2 } else { 0.9 };
        let plan = plan_eviction(&s, 100.0, er).unwrap();
        assert_eq!(plan.evicted, vec![ContentId(1)]);
        assert!((plan.er_old - 0.2).abs() < 1e-12);
        let (_, removed) = evict_for_replica(&mut s, 100.0, er).unwrap();
        assert_eq!(removed.len(), 1);
        assert_eq!(s.free_mb(), 110.0);
        assert_eq!(s.storage_drift(), 0.0);
    }

    #[test]
    fn nothing_evicted_when_it_fits() {
        let mut s = server(200.0);
        s.place(ContentId(1), replica(30.0)).unwrap();
        let plan = plan_eviction(&s, 100.0, |_| 5.0).unwrap();
        assert!(plan.evicted.is_empty());
        assert_eq!(plan.er_old, 0.0);
    }

    #[test]
    fn equal_revenue_evicts_larger_first() {
        let mut s = server(100.0);
        s.place(ContentId(1), replica(20.0)).unwrap();
        s.place(ContentId(2), replica(60.0)).unwrap();
        let plan = plan_eviction(&s, 50.0, |_| 1.0).unwrap();
        assert_eq!(plan.evicted, vec![ContentId(2)]);
    }

    #[test]
    fn impossible_eviction_is_an_error() {
        let mut s = server(100.0);
        s.place(ContentId(1), replica(20.0)).unwrap();
        assert!(plan_eviction(&s, 150.0, |_| 1.0).is_err());
    }

    #[test]
    fn place_guards_capacity_and_duplicates() {
        let mut s = server(50.0);
        assert!(s.place(ContentId(1), replica(60.0)).is_err());
        s.place(ContentId(1), replica(40.0)).unwrap();
        assert!(s.place(ContentId(1), replica(1.0)).is_err());
        assert_eq!(s.remove(ContentId(1)).map(|r| r.size_mb), Some(40.0));
        assert_eq!(s.used_mb(), 0.0);
    }
}
