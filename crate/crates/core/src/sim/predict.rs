//! Predictor accuracy: each auction's three forecasts against the requests
//! that actually arrived for the content during the holding time.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::log::{LogEvent, LogRecord};
use crate::{ContentId, SimTime};

#[derive(Debug, Clone, PartialEq)]
pub struct PredictorRow {
    pub auction: u64,
    pub time: SimTime,
    pub content: ContentId,
    pub duration: SimTime,
    pub horizon: u64,
    pub empirical: f64,
    pub binomial: f64,
    pub zipf: f64,
    /// Requests for the content in `(time, time + duration]`.
    pub realized: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictorReport {
    pub rows: Vec<PredictorRow>,
    pub mae_empirical: f64,
    pub mae_binomial: f64,
    pub mae_zipf: f64,
}

/// Score every `predict` record whose window closes by `horizon`; later
/// windows would be cut short by the end of the run.
pub fn compare_predictors(records: &[LogRecord], horizon: SimTime) -> PredictorReport {
    let mut arrivals: BTreeMap<ContentId, Vec<SimTime>> = BTreeMap::new();
    for r in records {
        if let LogEvent::Request { content, .. } = r.event {
            arrivals.entry(content).or_default().push(r.time);
        }
    }
    let count_in = |content: ContentId, from: SimTime, to: SimTime| -> u64 {
        let Some(times) = arrivals.get(&content) else { return 0 };
        let lo = times.partition_point(|&t| t <= from);
        let hi = times.partition_point(|&t| t <= to);
        (hi - lo) as u64
    };
    let mut rows = Vec::new();
    for r in records {
        if let LogEvent::Predict { auction, content, duration, horizon: n, empirical, binomial, zipf } = r.event {
            let end = r.time + duration;
            if end > horizon {
                continue;
            }
            rows.push(PredictorRow {
                auction,
                time: r.time,
                content,
                duration,
                horizon: n,
                empirical,
                binomial,
                zipf,
                realized: count_in(content, r.time, end),
            });
        }
    }
    let mae = |f: fn(&PredictorRow) -> f64| {
        if rows.is_empty() {
            return 0.0;
        }
        rows.iter().map(|row| libm::fabs(f(row) - row.realized as f64)).sum::<f64>() / rows.len() as f64
    };
    PredictorReport {
        mae_empirical: mae(|r| r.empirical),
        mae_binomial: mae(|r| r.binomial),
        mae_zipf: mae(|r| r.zipf),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::log::parse_log;

    #[test]
    fn realized_counts_use_half_open_window() {
        let log = "\
1.000000 request req=0 content=4 region=0 server=a latency_ms=1 sigma=1 load=1
2.000000 predict auction=1 content=4 duration=3.000000 horizon=2 empirical=1 binomial=2 zipf=0
2.000000 request req=1 content=4 region=0 server=a latency_ms=1 sigma=1 load=1
3.000000 request req=2 content=4 region=0 server=a latency_ms=1 sigma=1 load=1
5.000000 request req=3 content=4 region=0 server=a latency_ms=1 sigma=1 load=1
5.000001 request req=4 content=4 region=0 server=a latency_ms=1 sigma=1 load=1
9.000000 predict auction=2 content=4 duration=3.000000 horizon=0 empirical=0 binomial=0 zipf=0
";
        let report = compare_predictors(&parse_log(log).unwrap(), SimTime::from_secs(10));
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].realized, 2);
        assert_eq!(report.mae_empirical, 1.0);
        assert_eq!(report.mae_binomial, 0.0);
        assert_eq!(report.mae_zipf, 2.0);
    }

    #[test]
    fn empty_horizon_predicts_zero() {
        let log = "2.000000 predict auction=1 content=4 duration=1.000000 horizon=0 empirical=0 binomial=0 zipf=0\n";
        let report = compare_predictors(&parse_log(log).unwrap(), SimTime::from_secs(10));
        let row = &report.rows[0];
        assert_eq!((row.empirical, row.binomial, row.zipf, row.realized), (0.0, 0.0, 0.0, 0));
    }
}
