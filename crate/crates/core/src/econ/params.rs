use alloc::vec::Vec;

use crate::{DomainError, Result};

const COEFFICIENT_TOLERANCE: f64 = 1e-9;

/// Raw economic coefficients, as they appear in a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconConfig {
    /// Penalty constant: currency per unit of unserved load.
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    /// Weight of the forecast against the history in the empirical predictor.
    pub rho: f64,
    pub delay_threshold_ms: f64,
    /// Width of the content similarity kernel, in content-ID units.
    pub content_kernel_width: f64,
    /// Width of the location kernel, in milliseconds.
    pub location_kernel_width: f64,
    /// Served load above this bound counts as capacity overflow.
    pub capacity_threshold: f64,
}

impl EconConfig {
    /// All violated invariants, in field order.
    pub fn violations(&self) -> Vec<DomainError> {
        let mut out = Vec::new();
        let sum = self.beta + self.gamma + self.lambda;
        if !(libm::fabs(sum - 1.0) <= COEFFICIENT_TOLERANCE) {
            out.push(DomainError::CoefficientSum(sum));
        }
        let non_negative = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("lambda", self.lambda),
        ];
        for (name, value) in non_negative {
            if !(value >= 0.0) {
                out.push(DomainError::OutOfRange { name, value });
            }
        }
        if !(0.0..=1.0).contains(&self.rho) {
            out.push(DomainError::OutOfRange { name: "rho", value: self.rho });
        }
        let positive = [
            ("delay_threshold_ms", self.delay_threshold_ms),
            ("content_kernel_width", self.content_kernel_width),
            ("location_kernel_width", self.location_kernel_width),
            ("capacity_threshold", self.capacity_threshold),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                out.push(DomainError::OutOfRange { name, value });
            }
        }
        out
    }
}

/// Validated economic coefficients. The only way to build one is through
/// [`EconParams::new`], so `beta + gamma + lambda = 1` always holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconParams(EconConfig);

impl EconParams {
    pub fn new(config: EconConfig) -> Result<Self> {
        match config.violations().into_iter().next() {
            Some(err) => Err(err),
            None => Ok(EconParams(config)),
        }
    }

    pub fn config(&self) -> &EconConfig {
        &self.0
    }

    pub fn alpha(&self) -> f64 {
        self.0.alpha
    }
    pub fn beta(&self) -> f64 {
        self.0.beta
    }
    pub fn gamma(&self) -> f64 {
        self.0.gamma
    }
    pub fn lambda(&self) -> f64 {
        self.0.lambda
    }
    pub fn rho(&self) -> f64 {
        self.0.rho
    }
    pub fn delay_threshold_ms(&self) -> f64 {
        self.0.delay_threshold_ms
    }
    pub fn content_kernel_width(&self) -> f64 {
        self.0.content_kernel_width
    }
    pub fn location_kernel_width(&self) -> f64 {
        self.0.location_kernel_width
    }
    pub fn capacity_threshold(&self) -> f64 {
        self.0.capacity_threshold
    }
}

/// Random-walk step model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    /// Steps range over `[-max_step, max_step]`.
    pub max_step: u32,
    /// Mean step; rounded to the nearest integer before PMF evaluation.
    pub mean_step: f64,
    /// Per-step weight decay used when averaging past steps.
    pub step_decay: f64,
}

impl WalkParams {
    pub fn violations(&self) -> Vec<DomainError> {
        let mut out = Vec::new();
        if !(self.step_decay > 0.0 && self.step_decay <= 1.0) {
            out.push(DomainError::OutOfRange { name: "step_decay", value: self.step_decay });
        }
        if !self.mean_step.is_finite() {
            out.push(DomainError::OutOfRange { name: "mean_step", value: self.mean_step });
        }
        out
    }
}

/// Zipf-like popularity: the k-th most popular content is requested with
/// probability proportional to `1 / k^mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfParams {
    pub mu: f64,
    pub total_content: u32,
}

impl ZipfParams {
    pub fn new(mu: f64, total_content: u32) -> Result<Self> {
        let p = ZipfParams { mu, total_content };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        // mu = 1 makes the normalizer vanish; it is rejected, not special-cased.
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(DomainError::ZipfExponent(self.mu));
        }
        if self.total_content < 1 {
            return Err(DomainError::OutOfRange {
                name: "total_content",
                value: self.total_content as f64,
            });
        }
        Ok(())
    }
}

impl DomainError {
    /// Stable kebab-case name, used by scenario validation reports.
    pub fn code(&self) -> &'static str {
        match self {
            DomainError::CoefficientSum(_) => "coefficient-sum",
            DomainError::OutOfRange { .. } => "out-of-range",
            DomainError::EmptyHistory => "empty-history",
            DomainError::EmptySteps => "empty-steps",
            DomainError::ZipfExponent(_) => "zipf-exponent",
            DomainError::ContentOutOfRange(..) => "content-out-of-range",
            DomainError::MissingLatency(..) => "missing-latency",
            DomainError::LatencyMatrix(_) => "latency-matrix",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn config() -> EconConfig {
        EconConfig {
            alpha: 1.0,
            beta: 0.5,
            gamma: 0.2,
            lambda: 0.3,
            rho: 0.6,
            delay_threshold_ms: 50.0,
            content_kernel_width: 10.0,
            location_kernel_width: 40.0,
            capacity_threshold: 5.0,
        }
    }

    #[test]
    fn valid_coefficients_accepted() {
        assert!(EconParams::new(config()).is_ok());
    }

    #[test]
    fn coefficient_sum_rejected() {
        let cfg = EconConfig { beta: 0.7, ..config() };
        let err = EconParams::new(cfg).unwrap_err();
        assert_eq!(err.code(), "coefficient-sum");
    }

    #[test]
    fn all_violations_reported() {
        let cfg = EconConfig { beta: 0.7, rho: 1.5, content_kernel_width: 0.0, ..config() };
        let v = cfg.violations();
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn zipf_mu_one_rejected() {
        assert_eq!(ZipfParams::new(1.0, 10), Err(DomainError::ZipfExponent(1.0)));
        assert!(ZipfParams::new(0.0, 10).is_err());
        assert!(ZipfParams::new(0.5, 10).is_ok());
    }
}
