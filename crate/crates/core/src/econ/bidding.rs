/// Cost of storing `requirement_mb` at `unit_cost` per MB.
pub fn storage_cost(requirement_mb: f64, unit_cost: f64) -> f64 {
    requirement_mb * unit_cost
}

/// Seller utility: expected revenue of the new content minus the revenue of
/// whatever has to be evicted for it. A rational seller abstains when this
/// is not strictly positive.
pub fn utility(er_new: f64, er_old: f64) -> f64 {
    er_new - er_old
}

/// Bid `storage_cost + utility ± psi`, with the eagerness term realized as
/// `eagerness * storage_cost`. `None` means the seller abstains.
pub fn bid_amount(storage_cost: f64, utility: f64, eagerness: f64) -> Option<f64> {
    if !(utility > 0.0) {
        return None;
    }
    let bid = storage_cost + utility + eagerness * storage_cost;
    Some(if bid > 0.0 { bid } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn storage_cost_examples() {
        assert!((storage_cost(100.0, 0.02) - 2.0).abs() < 1e-12);
        assert_eq!(storage_cost(0.0, 7.0), 0.0);
        assert!((storage_cost(250.0, 0.01) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn utility_examples() {
        assert_eq!(utility(5.0, 3.0), 2.0);
        assert_eq!(utility(3.0, 3.0), 0.0);
        assert_eq!(utility(2.0, 3.0), -1.0);
    }

    #[test]
    fn bid_examples() {
        assert!((bid_amount(2.0, 1.5, 0.1).unwrap() - 3.7).abs() < 1e-12);
        assert_eq!(bid_amount(2.0, 1.5, 0.0), Some(3.5));
        assert!((bid_amount(2.0, 1.5, -0.25).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn non_positive_utility_abstains() {
        assert_eq!(bid_amount(2.0, 0.0, 0.1), None);
        assert_eq!(bid_amount(2.0, -1.0, 0.1), None);
    }

    proptest! {
        #[test]
        fn bids_never_negative(s in 0.0f64..100.0, u in -10.0f64..100.0, e in -5.0f64..5.0) {
            if let Some(b) = bid_amount(s, u, e) {
                prop_assert!(b >= 0.0);
            }
        }

        #[test]
        fn zero_eagerness_is_exact_sum(s in 0.0f64..100.0, u in 0.001f64..100.0) {
            prop_assert_eq!(bid_amount(s, u, 0.0), Some(s + u));
        }
    }
}
