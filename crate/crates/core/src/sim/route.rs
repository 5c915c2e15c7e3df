use crate::econ::ContentRequest;
use crate::sim::LatencyModel;
use crate::{LocationId, ProviderId};

/// Where a request went and how it fared.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteDecision {
    pub server: ProviderId,
    pub latency_ms: u32,
    /// Served strictly within the delay threshold.
    pub sigma: bool,
    pub load: f64,
}

/// Send `request` to the holder nearest to its region (ties by provider id).
/// `holders` must include the origin. Latency equal to the threshold counts
/// as a violation.
pub fn route_request<'a>(
    request: &ContentRequest,
    holders: impl IntoIterator<Item = (&'a ProviderId, LocationId)>,
    latency: &LatencyModel,
    delay_threshold_ms: f64,
    load: f64,
) -> Option<RouteDecision> {
    let (server, ms) = holders
        .into_iter()
        .filter_map(|(p, region)| latency.get(request.location, region).map(|ms| (p, ms)))
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)))?;
    Some(RouteDecision {
        server: server.clone(),
        latency_ms: ms,
        sigma: (ms as f64) < delay_threshold_ms,
        load,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ContentId, SimTime};
    use alloc::vec;

    fn model() -> LatencyModel {
        LatencyModel::new(&[vec![0, 30, 80, 120], vec![30, 0, 50, 90], vec![80, 50, 0, 40], vec![120, 90, 40, 0]])
            .unwrap()
    }

    fn req(region: u16) -> ContentRequest {
        ContentRequest::new(ContentId(1), LocationId(region), SimTime::ZERO)
    }

    #[test]
    fn nearest_holder_within_threshold() {
        let (a, b) = (ProviderId::new("a"), ProviderId::new("b"));
        let d = route_request(&req(0), [(&a, LocationId(1)), (&b, LocationId(2))], &model(), 50.0, 1.0).unwrap();
        assert_eq!(d.server, a);
        assert_eq!(d.latency_ms, 30);
        assert!(d.sigma);
    }

    #[test]
    fn only_far_origin() {
        let o = ProviderId::new("origin");
        let d = route_request(&req(0), [(&o, LocationId(3))], &model(), 50.0, 1.0).unwrap();
        assert_eq!(d.latency_ms, 120);
        assert!(!d.sigma);
    }

    #[test]
    fn threshold_is_strict() {
        let o = ProviderId::new("o");
        let d = route_request(&req(1), [(&o, LocationId(2))], &model(), 50.0, 1.0).unwrap();
        assert_eq!(d.latency_ms, 50);
        assert!(!d.sigma);
    }

    #[test]
    fn ties_by_provider_id() {
        let (a, b) = (ProviderId::new("a"), ProviderId::new("b"));
        let d = route_request(&req(2), [(&b, LocationId(1)), (&a, LocationId(1))], &model(), 60.0, 1.0).unwrap();
        assert_eq!(d.server, a);
    }
}
