use crate::{ContentId, DomainError, LocationId, Result};

/// Pairwise region latency source.
pub trait LatencyLookup {
    fn latency_ms(&self, a: LocationId, b: LocationId) -> Option<u32>;
}

/// Content similarity `exp(-|a - b| / width)`.
///
/// Symmetric, 1 on identical ids and strictly decreasing in the id gap.
pub fn similarity(a: ContentId, b: ContentId, width: f64) -> f64 {
    let gap = (a.0 as i64 - b.0 as i64).unsigned_abs() as f64;
    libm::exp(-gap / width)
}

/// Locality factor `exp(-latency(a, b) / width)`.
pub fn distance_factor<L: LatencyLookup + ?Sized>(
    a: LocationId,
    b: LocationId,
    latency: &L,
    width: f64,
) -> Result<f64> {
    let ms = latency.latency_ms(a, b).ok_or(DomainError::MissingLatency(a.0, b.0))?;
    Ok(libm::exp(-(ms as f64) / width))
}

/// The two kernels bundled with their latency source.
pub struct Kernels<'a, L: LatencyLookup + ?Sized> {
    pub content_width: f64,
    pub location_width: f64,
    pub latency: &'a L,
}

impl<L: LatencyLookup + ?Sized> Kernels<'_, L> {
    /// `delta(c_a, c_b) * phi(l_a, l_b)`.
    pub fn weight(
        &self,
        a: (ContentId, LocationId),
        b: (ContentId, LocationId),
    ) -> Result<f64> {
        Ok(similarity(a.0, b.0, self.content_width)
            * distance_factor(a.1, b.1, self.latency, self.location_width)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    struct Line;
    impl LatencyLookup for Line {
        fn latency_ms(&self, a: LocationId, b: LocationId) -> Option<u32> {
            if a.0 > 3 || b.0 > 3 {
                return None;
            }
            Some((a.0 as i32 - b.0 as i32).unsigned_abs() * 20)
        }
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(similarity(ContentId(7), ContentId(7), 3.0), 1.0);
        assert!((similarity(ContentId(0), ContentId(10), 10.0) - 0.367_879_441_171_442_3).abs() < 1e-12);
        assert!((similarity(ContentId(1), ContentId(31), 10.0) - 0.049_787_068_367_863_944).abs() < 1e-12);
    }

    #[test]
    fn distance_examples() {
        let l = Line;
        assert_eq!(distance_factor(LocationId(2), LocationId(2), &l, 20.0), Ok(1.0));
        let one = distance_factor(LocationId(0), LocationId(1), &l, 20.0).unwrap();
        assert!((one - (-1.0f64).exp()).abs() < 1e-12);
        let two = distance_factor(LocationId(0), LocationId(2), &l, 20.0).unwrap();
        assert!((two - 0.135_335_283_236_612_7).abs() < 1e-12);
        assert_eq!(
            distance_factor(LocationId(0), LocationId(9), &l, 20.0),
            Err(DomainError::MissingLatency(0, 9))
        );
    }

    proptest! {
        #[test]
        // Widths keep gap / width below the exp underflow point.
        fn similarity_symmetric_bounded(a in 1u32..10_000, b in 1u32..10_000, w in 20.0f64..1000.0) {
            let ab = similarity(ContentId(a), ContentId(b), w);
            let ba = similarity(ContentId(b), ContentId(a), w);
            prop_assert_eq!(ab, ba);
            prop_assert!(ab > 0.0 && ab <= 1.0);
            prop_assert_eq!(ab == 1.0, a == b);
        }

        #[test]
        fn distance_symmetric_bounded(a in 0u16..4, b in 0u16..4, w in 1.0f64..200.0) {
            let ab = distance_factor(LocationId(a), LocationId(b), &Line, w).unwrap();
            let ba = distance_factor(LocationId(b), LocationId(a), &Line, w).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!(ab > 0.0 && ab <= 1.0);
            prop_assert_eq!(ab == 1.0, a == b);
        }
    }
}
