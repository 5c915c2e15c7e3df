use super::ZipfParams;
use crate::{ContentId, DomainError, Result};

/// Approximate cumulative popularity `(c / C)^(1 - mu)` of rank `c`.
pub fn zipf_cum_prob(c: ContentId, zipf: &ZipfParams) -> Result<f64> {
    zipf.validate()?;
    if c.0 < 1 || c.0 > zipf.total_content {
        return Err(DomainError::ContentOutOfRange(c.0, zipf.total_content));
    }
    Ok(libm::pow(c.0 as f64 / zipf.total_content as f64, 1.0 - zipf.mu))
}

/// `sum_{i=1..n}` of the cumulative probability. The approximate form does
/// not depend on the step index, so this is `n * zipf_cum_prob(c)`.
pub fn er_zipf(c: ContentId, n: u32, zipf: &ZipfParams) -> Result<f64> {
    Ok(n as f64 * zipf_cum_prob(c, zipf)?)
}

/// Expected hits on exactly rank `c` among `n` requests: the increment of
/// [`er_zipf`] between ranks `c - 1` and `c`.
pub fn er_zipf_marginal(c: ContentId, n: u32, zipf: &ZipfParams) -> Result<f64> {
    let upper = er_zipf(c, n, zipf)?;
    let lower = if c.0 > 1 { er_zipf(ContentId(c.0 - 1), n, zipf)? } else { 0.0 };
    Ok(upper - lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(mu: f64, c: u32) -> ZipfParams {
        ZipfParams { mu, total_content: c }
    }

    #[test]
    fn cum_prob_examples() {
        assert_eq!(zipf_cum_prob(ContentId(100), &z(0.5, 100)), Ok(1.0));
        assert!((zipf_cum_prob(ContentId(25), &z(0.5, 100)).unwrap() - 0.5).abs() < 1e-12);
        assert!((zipf_cum_prob(ContentId(1), &z(0.5, 100)).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn er_examples() {
        assert!((er_zipf(ContentId(25), 4, &z(0.5, 100)).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(er_zipf(ContentId(7), 0, &z(0.5, 100)), Ok(0.0));
        assert_eq!(er_zipf(ContentId(100), 3, &z(0.5, 100)), Ok(3.0));
    }

    #[test]
    fn domain_errors() {
        assert_eq!(zipf_cum_prob(ContentId(1), &z(1.0, 10)), Err(DomainError::ZipfExponent(1.0)));
        assert!(zipf_cum_prob(ContentId(0), &z(0.5, 10)).is_err());
        assert!(zipf_cum_prob(ContentId(11), &z(0.5, 10)).is_err());
    }

    #[test]
    fn marginal_telescopes() {
        let p = z(0.7, 50);
        let total: f64 = (1..=50).map(|c| er_zipf_marginal(ContentId(c), 10, &p).unwrap()).sum();
        assert!((total - 10.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn monotone_in_rank(mu in 0.01f64..0.99, total in 1u32..5000, a in 1u32..5000, b in 1u32..5000) {
            let p = z(mu, total);
            let (lo, hi) = (a.min(b).min(total), a.max(b).min(total));
            prop_assert!(zipf_cum_prob(ContentId(lo), &p).unwrap() <= zipf_cum_prob(ContentId(hi), &p).unwrap());
            prop_assert!((zipf_cum_prob(ContentId(total), &p).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
