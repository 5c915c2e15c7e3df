use super::LoadRecord;

/// Unserved load at one instant.
///
/// The first term is load served outside the delay threshold. The second is
/// served load exceeding `capacity_threshold`, and it only counts when
/// positive.
pub fn penalty(loads: &[LoadRecord], capacity_threshold: f64) -> f64 {
    let (late, on_time) = loads.iter().fold((0.0, 0.0), |(late, on_time), r| {
        if r.served_within_threshold {
            (late, on_time + r.load)
        } else {
            (late + r.load, on_time)
        }
    });
    let overflow = on_time - capacity_threshold;
    if overflow > 0.0 {
        late + overflow
    } else {
        late
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::ContentRequest;
    use crate::{ContentId, LocationId, SimTime};
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn rec(load: f64, sigma: bool) -> LoadRecord {
        LoadRecord {
            request: ContentRequest::new(ContentId(1), LocationId(0), SimTime::ZERO),
            load,
            served_within_threshold: sigma,
        }
    }

    #[test]
    fn capacity_term_cancelled_when_negative() {
        assert_eq!(penalty(&[rec(2.0, false), rec(3.0, true)], 5.0), 2.0);
    }

    #[test]
    fn capacity_overflow_counts() {
        assert_eq!(penalty(&[rec(2.0, false), rec(7.0, true)], 5.0), 4.0);
    }

    #[test]
    fn all_on_time_within_capacity_is_zero() {
        assert_eq!(penalty(&[rec(1.0, true), rec(4.0, true)], 5.0), 0.0);
        assert_eq!(penalty(&[], 5.0), 0.0);
    }

    fn records() -> impl Strategy<Value = Vec<(f64, bool)>> {
        proptest::collection::vec((0.0f64..20.0, any::<bool>()), 0..12)
    }

    proptest! {
        #[test]
        fn non_negative(rs in records(), k in 0.1f64..50.0) {
            let loads: Vec<_> = rs.iter().map(|&(l, s)| rec(l, s)).collect();
            prop_assert!(penalty(&loads, k) >= 0.0);
        }

        #[test]
        fn monotone_in_each_load(rs in records(), k in 0.1f64..50.0, bump in 0.0f64..5.0, pick in 0usize..12) {
            prop_assume!(!rs.is_empty());
            let i = pick % rs.len();
            let base: Vec<_> = rs.iter().map(|&(l, s)| rec(l, s)).collect();
            let mut bumped = base.clone();
            bumped[i].load += bump;
            prop_assert!(penalty(&bumped, k) + 1e-12 >= penalty(&base, k));
        }
    }
}
