//! Seeded request streams: Zipf popularity, random walks, flash crowds.

use alloc::vec::Vec;
use rand::distr::weighted::WeightedIndex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Zipf};

use crate::econ::ContentRequest;
use crate::{ContentId, DomainError, LocationId, Result, SimTime};

#[derive(Debug, Clone, PartialEq)]
pub enum WorkloadKind {
    Zipf { mu: f64, total_content: u32 },
    RandomWalk { start: u32, max_step: u32, total_content: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    pub kind: WorkloadKind,
    /// Aggregate arrival rate in requests per second, split over regions by
    /// `region_weights`.
    pub arrival_rate: f64,
    pub region_weights: Vec<f64>,
    pub duration: SimTime,
}

impl WorkloadSpec {
    pub fn total_content(&self) -> u32 {
        match self.kind {
            WorkloadKind::Zipf { total_content, .. } | WorkloadKind::RandomWalk { total_content, .. } => {
                total_content
            }
        }
    }

    pub fn violations(&self) -> Vec<DomainError> {
        let mut out = Vec::new();
        if !(self.arrival_rate > 0.0 && self.arrival_rate.is_finite()) {
            out.push(DomainError::OutOfRange { name: "arrival_rate", value: self.arrival_rate });
        }
        let sum: f64 = self.region_weights.iter().sum();
        if self.region_weights.is_empty() || self.region_weights.iter().any(|w| !(*w >= 0.0)) || libm::fabs(sum - 1.0) > 1e-9 {
            out.push(DomainError::OutOfRange { name: "region_weights", value: sum });
        }
        match self.kind {
            WorkloadKind::Zipf { mu, total_content } => {
                if !(mu > 0.0 && mu.is_finite()) {
                    out.push(DomainError::OutOfRange { name: "workload mu", value: mu });
                }
                if total_content < 1 {
                    out.push(DomainError::OutOfRange { name: "total_content", value: 0.0 });
                }
            }
            WorkloadKind::RandomWalk { start, total_content, .. } => {
                if total_content < 1 {
                    out.push(DomainError::OutOfRange { name: "total_content", value: 0.0 });
                } else if start < 1 || start > total_content {
                    out.push(DomainError::ContentOutOfRange(start, total_content));
                }
            }
        }
        if self.duration == SimTime::ZERO {
            out.push(DomainError::OutOfRange { name: "duration", value: 0.0 });
        }
        out
    }
}

/// Regional hotspot: the region's arrival rate is multiplied by
/// `rate_multiplier` inside the window, the extra traffic asking for
/// content in `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlashCrowdEvent {
    pub start: SimTime,
    pub duration: SimTime,
    pub region: LocationId,
    pub content_range: (ContentId, ContentId),
    pub rate_multiplier: f64,
}

impl FlashCrowdEvent {
    pub fn end(&self) -> SimTime {
        self.start + self.duration
    }

    pub fn violations(&self, horizon: SimTime) -> Vec<DomainError> {
        let mut out = Vec::new();
        if !(self.rate_multiplier > 1.0 && self.rate_multiplier.is_finite()) {
            out.push(DomainError::OutOfRange { name: "rate_multiplier", value: self.rate_multiplier });
        }
        if self.duration == SimTime::ZERO {
            out.push(DomainError::OutOfRange { name: "flash crowd duration", value: 0.0 });
        }
        if self.end() > horizon {
            out.push(DomainError::OutOfRange { name: "flash crowd window", value: self.end().as_secs_f64() });
        }
        if self.content_range.0 > self.content_range.1 || self.content_range.0 .0 < 1 {
            out.push(DomainError::OutOfRange { name: "content_range", value: self.content_range.0 .0 as f64 });
        }
        out
    }
}

/// Event known in advance; providers form long-term VOs before it starts.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledEvent {
    pub start: SimTime,
    pub duration: SimTime,
    pub region: LocationId,
    pub content_range: (ContentId, ContentId),
    pub advance_notice: SimTime,
    /// Demand multiplier during the event; 1 leaves the stream unchanged.
    pub rate_multiplier: f64,
}

impl ScheduledEvent {
    pub fn notice_at(&self) -> SimTime {
        self.start.saturating_sub(self.advance_notice)
    }

    pub fn violations(&self, horizon: SimTime) -> Vec<DomainError> {
        let mut out = Vec::new();
        if self.advance_notice == SimTime::ZERO {
            out.push(DomainError::OutOfRange { name: "advance_notice", value: 0.0 });
        }
        if self.advance_notice > self.start {
            out.push(DomainError::OutOfRange { name: "advance_notice", value: self.advance_notice.as_secs_f64() });
        }
        if self.duration == SimTime::ZERO || self.start + self.duration > horizon {
            out.push(DomainError::OutOfRange { name: "scheduled event window", value: self.duration.as_secs_f64() });
        }
        if !(self.rate_multiplier >= 1.0 && self.rate_multiplier.is_finite()) {
            out.push(DomainError::OutOfRange { name: "rate_multiplier", value: self.rate_multiplier });
        }
        if self.content_range.0 > self.content_range.1 || self.content_range.0 .0 < 1 {
            out.push(DomainError::OutOfRange { name: "content_range", value: self.content_range.0 .0 as f64 });
        }
        out
    }
}

/// A generated request stream plus the popularity order used to draw it.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub requests: Vec<ContentRequest>,
    /// `popularity[r - 1]` is the content of rank `r`.
    pub popularity: Vec<ContentId>,
}

impl Workload {
    /// Popularity rank of `content` (1 = hottest).
    pub fn rank_of(&self, content: ContentId) -> Option<u32> {
        self.popularity.iter().position(|&c| c == content).map(|i| i as u32 + 1)
    }
}

/// Independent, reproducible RNG stream for one purpose.
pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

const STREAM_ARRIVALS: u64 = 1;
const STREAM_CONTENT: u64 = 2;
const STREAM_PERMUTATION: u64 = 3;
pub(crate) const STREAM_INJECT_BASE: u64 = 1000;

/// Poisson arrival times with regions drawn by weight.
fn arrivals(spec: &WorkloadSpec, seed: u64) -> Vec<(SimTime, LocationId)> {
    let mut r = rng(seed, STREAM_ARRIVALS);
    let gap = Exp::new(spec.arrival_rate).expect("rate validated");
    let regions = WeightedIndex::new(&spec.region_weights).expect("weights validated");
    let horizon = spec.duration.as_secs_f64();
    let mut t = 0.0;
    let mut out = Vec::new();
    loop {
        t += gap.sample(&mut r);
        if t >= horizon {
            break;
        }
        let region = LocationId(regions.sample(&mut r) as u16);
        out.push((SimTime::from_secs_f64(t), region));
    }
    out
}

fn identity_popularity(total: u32) -> Vec<ContentId> {
    (1..=total).map(ContentId).collect()
}

/// Zipf-like stream: rank `r` is drawn with probability proportional to
/// `1 / r^mu`, ranks map to contents through a seeded permutation.
pub fn generate_zipf_workload(spec: &WorkloadSpec, seed: u64) -> Result<Workload> {
    let WorkloadKind::Zipf { mu, total_content } = spec.kind else {
        return Err(DomainError::OutOfRange { name: "workload kind", value: 0.0 });
    };
    if let Some(e) = spec.violations().into_iter().next() {
        return Err(e);
    }
    let mut popularity = identity_popularity(total_content);
    popularity.shuffle(&mut rng(seed, STREAM_PERMUTATION));
    let zipf = Zipf::new(total_content as f64, mu).map_err(|_| DomainError::OutOfRange { name: "workload mu", value: mu })?;
    let mut draw = rng(seed, STREAM_CONTENT);
    let requests = arrivals(spec, seed)
        .into_iter()
        .map(|(time, location)| {
            let rank = (zipf.sample(&mut draw) as u32).clamp(1, total_content);
            ContentRequest::new(popularity[rank as usize - 1], location, time)
        })
        .collect();
    Ok(Workload { requests, popularity })
}

/// Random-walk stream: each request moves the content id by a step drawn
/// uniformly from `[-S, S]`, reflected at `1` and `C_total`.
pub fn generate_walk_workload(spec: &WorkloadSpec, seed: u64) -> Result<Workload> {
    let WorkloadKind::RandomWalk { start, max_step, total_content } = spec.kind else {
        return Err(DomainError::OutOfRange { name: "workload kind", value: 1.0 });
    };
    if let Some(e) = spec.violations().into_iter().next() {
        return Err(e);
    }
    let mut draw = rng(seed, STREAM_CONTENT);
    let mut at = start as i64;
    let s = max_step as i64;
    let requests = arrivals(spec, seed)
        .into_iter()
        .enumerate()
        .map(|(i, (time, location))| {
            if i > 0 && s > 0 {
                at = reflect(at + draw.random_range(-s..=s), total_content as i64);
            }
            ContentRequest::new(ContentId(at as u32), location, time)
        })
        .collect();
    Ok(Workload { requests, popularity: identity_popularity(total_content) })
}

fn reflect(mut c: i64, total: i64) -> i64 {
    if total == 1 {
        return 1;
    }
    loop {
        if c < 1 {
            c = 2 - c;
        } else if c > total {
            c = 2 * total - c;
        } else {
            return c;
        }
    }
}

pub fn generate_workload(spec: &WorkloadSpec, seed: u64) -> Result<Workload> {
    match spec.kind {
        WorkloadKind::Zipf { .. } => generate_zipf_workload(spec, seed),
        WorkloadKind::RandomWalk { .. } => generate_walk_workload(spec, seed),
    }
}

/// Extra traffic in `region` during `[start, end)` so that its rate becomes
/// `multiplier` times the base, drawn uniformly from `content_range`.
/// Requests outside the window are untouched.
#[allow(clippy::too_many_arguments)]
fn inject(
    requests: &mut Vec<ContentRequest>,
    spec: &WorkloadSpec,
    region: LocationId,
    start: SimTime,
    end: SimTime,
    range: (ContentId, ContentId),
    multiplier: f64,
    seed: u64,
    stream: u64,
) {
    let weight = spec.region_weights.get(region.0 as usize).copied().unwrap_or(0.0);
    let extra = (multiplier - 1.0) * spec.arrival_rate * weight;
    if !(extra > 0.0) {
        return;
    }
    let mut r = rng(seed, stream);
    let gap = Exp::new(extra).expect("positive");
    let (lo, hi) = (start.as_secs_f64(), end.as_secs_f64());
    let mut t = lo;
    loop {
        t += gap.sample(&mut r);
        let at = SimTime::from_secs_f64(t);
        if t >= hi || at >= end {
            break;
        }
        let c = r.random_range(range.0 .0..=range.1 .0);
        requests.push(ContentRequest::new(ContentId(c), region, at));
    }
    requests.sort_by_key(|q| q.time);
}

pub fn inject_flash_crowd(workload: &mut Workload, spec: &WorkloadSpec, event: &FlashCrowdEvent, seed: u64, stream: u64) {
    inject(
        &mut workload.requests,
        spec,
        event.region,
        event.start,
        event.end(),
        event.content_range,
        event.rate_multiplier,
        seed,
        STREAM_INJECT_BASE + stream,
    );
}

pub fn inject_scheduled_demand(workload: &mut Workload, spec: &WorkloadSpec, event: &ScheduledEvent, seed: u64, stream: u64) {
    inject(
        &mut workload.requests,
        spec,
        event.region,
        event.start,
        event.start + event.duration,
        event.content_range,
        event.rate_multiplier,
        seed,
        STREAM_INJECT_BASE + 500 + stream,
    );
}
