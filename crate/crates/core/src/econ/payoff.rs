use super::{ContentRequest, EconParams, HistoryRecord, Kernels, LatencyLookup};
use crate::{DomainError, Result};

/// Maximum amount the buyer will pay to replicate `current.content` now.
///
/// Averages past payments (each shifted by `gamma`) over the history log,
/// weighted by content similarity, locality and an exponential time decay,
/// scales by `beta`, then subtracts the currency value of the current penalty
/// `alpha * current_penalty`. The result can be negative, in which case the
/// buyer has no budget.
pub fn payoff_max<L: LatencyLookup + ?Sized>(
    history: &[HistoryRecord],
    current: &ContentRequest,
    current_penalty: f64,
    params: &EconParams,
    latency: &L,
) -> Result<f64> {
    if history.is_empty() {
        return Err(DomainError::EmptyHistory);
    }
    let kernels = Kernels {
        content_width: params.content_kernel_width(),
        location_width: params.location_kernel_width(),
        latency,
    };
    let now = current.time;
    let mut sum = 0.0;
    for record in history {
        let past = record.request;
        if past.time > now {
            return Err(DomainError::OutOfRange {
                name: "history time",
                value: past.time.as_secs_f64(),
            });
        }
        let age = (now - past.time).as_secs_f64();
        let weight = kernels.weight((current.content, current.location), (past.content, past.location))?;
        sum += (record.paid + params.gamma()) * weight * libm::exp(-params.lambda() * age);
    }
    let predicted = params.beta() * sum / history.len() as f64;
    Ok(predicted - params.alpha() * current_penalty)
}
