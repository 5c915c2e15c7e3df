use super::{ContentRequest, Kernels, LatencyLookup};
use crate::Result;

/// Empirical expected revenue of `current.content`.
///
/// `rho` weighs the similarity mass of the forecast (next requests) against
/// that of the history (past requests).
pub fn er_empirical<L: LatencyLookup + ?Sized>(
    current: &ContentRequest,
    forecast: &[ContentRequest],
    history: &[ContentRequest],
    rho: f64,
    kernels: &Kernels<'_, L>,
) -> Result<f64> {
    let here = (current.content, current.location);
    let mut ahead = 0.0;
    for r in forecast {
        ahead += kernels.weight(here, (r.content, r.location))?;
    }
    let mut behind = 0.0;
    for r in history {
        behind += kernels.weight(here, (r.content, r.location))?;
    }
    Ok(rho * ahead + (1.0 - rho) * behind)
}

/// Same predictor over precomputed `delta * phi` products.
pub fn er_empirical_from_weights(forecast: &[f64], history: &[f64], rho: f64) -> f64 {
    rho * forecast.iter().sum::<f64>() + (1.0 - rho) * history.iter().sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ContentId, LocationId, SimTime};

    struct Zero;
    impl LatencyLookup for Zero {
        fn latency_ms(&self, _: LocationId, _: LocationId) -> Option<u32> {
            Some(0)
        }
    }

    #[test]
    fn weight_examples() {
        assert_eq!(er_empirical_from_weights(&[], &[], 0.6), 0.0);
        assert!((er_empirical_from_weights(&[0.8, 0.5], &[0.4], 0.6) - 0.94).abs() < 1e-9);
        assert!((er_empirical_from_weights(&[0.8, 0.5], &[0.4], 1.0) - 1.3).abs() < 1e-9);
    }

    #[test]
    fn kernel_path_matches_weights() {
        let k = Kernels { content_width: 5.0, location_width: 10.0, latency: &Zero };
        let at = |c| ContentRequest::new(ContentId(c), LocationId(0), SimTime::ZERO);
        let cur = at(10);
        let fwd = [at(10), at(15)];
        let back = [at(20)];
        let got = er_empirical(&cur, &fwd, &back, 0.25, &k).unwrap();
        let e = |g: f64| libm::exp(-g / 5.0);
        let want = er_empirical_from_weights(&[e(0.0), e(5.0)], &[e(10.0)], 0.25);
        assert!((got - want).abs() < 1e-12);
        assert_eq!(er_empirical(&cur, &[], &[], 0.5, &k), Ok(0.0));
    }
}
