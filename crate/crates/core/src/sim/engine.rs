//! The event loop: routes requests, detects hotspots, runs replication and
//! renegotiation auctions, and expires VOs.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use core::cell::RefCell;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::log::{LogEvent, LogRecord};
use super::queue::EventQueue;
use super::route::route_request;
use super::workload::{
    generate_workload, inject_flash_crowd, inject_scheduled_demand, FlashCrowdEvent, ScheduledEvent, Workload,
    WorkloadSpec,
};
use super::LatencyModel;
use crate::auction::{
    detect_renegotiation, open_auction, retry_after_no_winner, AuctionError, AuctionOutcome, AuctionParams,
    AuctionPolicy, Award, Bid, EntrantAsk, HeldPosition, RenegotiationKind, Retry, VoMarketView,
};
use crate::econ::{
    bid_amount, er_binomial, er_empirical_from_weights, er_zipf_marginal, forecast_horizon, payoff_max, penalty,
    steps_of, storage_cost, utility, weighted_mean_step, ContentRequest, EconConfig, EconParams, HistoryRecord, Kernels,
    LoadRecord, WalkParams, ZipfParams,
};
use crate::vo::{
    plan_eviction, CloseReason, Federation, PolicyRepository, PolicyRule, Predicate, RuleSubject, SurrogateServer,
    VoEvent, VoId, VoKind,
};
use crate::{ContentId, DomainError, LocationId, Money, ProviderId, Result, SimTime};

/// Which expected-revenue model sellers price with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Predictor {
    Empirical,
    Binomial,
    Zipf,
}

impl Predictor {
    pub fn as_str(self) -> &'static str {
        match self {
            Predictor::Empirical => "empirical",
            Predictor::Binomial => "binomial",
            Predictor::Zipf => "zipf",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Predictor::Empirical, Predictor::Binomial, Predictor::Zipf].into_iter().find(|p| p.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProviderConfig {
    pub id: ProviderId,
    pub region: LocationId,
    pub capacity_mb: f64,
    pub unit_storage_cost: f64,
    pub upload_kbps: f64,
    pub download_kbps: f64,
    /// Overrides the economic capacity threshold for this provider.
    pub capacity_threshold: Option<f64>,
    pub eagerness: f64,
}

/// Contents `lo..=hi` originate at `provider`.
#[derive(Debug, Clone, PartialEq)]
pub struct OriginRange {
    pub lo: ContentId,
    pub hi: ContentId,
    pub provider: ProviderId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeRange {
    pub lo: ContentId,
    pub hi: ContentId,
    pub size_mb: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineParams {
    pub detect_interval: SimTime,
    pub renegotiation_interval: SimTime,
    /// Loads and request history are kept for this long.
    pub load_window: SimTime,
    pub request_load: f64,
    /// Holding time asked for by flash-crowd replication.
    pub replica_duration: SimTime,
    /// Budget used while the buyer has no payment history. `None` means
    /// `alpha * penalty`.
    pub cold_start_budget: Option<f64>,
    /// Currency earned per expected request; converts predictions to revenue.
    pub revenue_per_request: f64,
    pub predictor: Predictor,
    /// Most recent payments the buyer's payoff function looks at.
    pub history_len: usize,
    pub upload_kbps: f64,
    pub download_kbps: f64,
    pub eagerness_max: f64,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams {
            detect_interval: SimTime::from_secs(10),
            renegotiation_interval: SimTime::from_secs(30),
            load_window: SimTime::from_secs(60),
            request_load: 1.0,
            replica_duration: SimTime::from_secs(300),
            cold_start_budget: None,
            revenue_per_request: 0.01,
            predictor: Predictor::Empirical,
            history_len: 16,
            upload_kbps: 100.0,
            download_kbps: 100.0,
            eagerness_max: 0.25,
        }
    }
}

/// Everything a run needs. Nothing here is validated until
/// [`SimConfig::violations`] or [`World::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub providers: Vec<ProviderConfig>,
    pub origins: Vec<OriginRange>,
    pub content_size_mb: f64,
    pub sizes: Vec<SizeRange>,
    pub latency_ms: Vec<Vec<u32>>,
    pub econ: EconConfig,
    pub walk: WalkParams,
    pub zipf: ZipfParams,
    pub workload: WorkloadSpec,
    pub flash_crowds: Vec<FlashCrowdEvent>,
    pub scheduled: Vec<ScheduledEvent>,
    pub policies: Vec<PolicyRule>,
    pub auction: AuctionParams,
    pub engine: EngineParams,
    pub auctions_enabled: bool,
    pub seed: u64,
}

/// A named config problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub code: &'static str,
    pub detail: String,
}

impl Violation {
    fn new(code: &'static str, detail: impl Into<String>) -> Self {
        Violation { code, detail: detail.into() }
    }

    fn domain(e: DomainError, context: &str) -> Self {
        Violation { code: e.code(), detail: format!("{context}: {e}") }
    }
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

impl SimConfig {
    pub fn total_content(&self) -> u32 {
        self.workload.total_content()
    }

    /// Every violated invariant.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        out.extend(self.econ.violations().into_iter().map(|e| Violation::domain(e, "econ")));
        out.extend(self.walk.violations().into_iter().map(|e| Violation::domain(e, "walk")));
        if let Err(e) = self.zipf.validate() {
            out.push(Violation::domain(e, "zipf"));
        }
        let total = self.total_content();
        if self.zipf.total_content != total {
            out.push(Violation::new(
                "content-count",
                format!("zipf total_content {} differs from the workload's {total}", self.zipf.total_content),
            ));
        }
        out.extend(self.workload.violations().into_iter().map(|e| Violation::domain(e, "workload")));

        let regions = match LatencyModel::new(&self.latency_ms) {
            Ok(m) => m.regions(),
            Err(e) => {
                out.push(Violation::domain(e, "latency"));
                self.latency_ms.len()
            }
        };
        let region_ok = |r: LocationId| (r.0 as usize) < regions;
        if self.workload.region_weights.len() != regions {
            out.push(Violation::new(
                "region-weights",
                format!("{} weights for {regions} regions", self.workload.region_weights.len()),
            ));
        }

        let mut ids = BTreeSet::new();
        if self.providers.is_empty() {
            out.push(Violation::new("no-providers", "the roster is empty"));
        }
        for p in &self.providers {
            if !ids.insert(p.id.clone()) {
                out.push(Violation::new("duplicate-provider", format!("provider {} listed twice", p.id)));
            }
            if !region_ok(p.region) {
                out.push(Violation::new("unknown-region", format!("provider {} in region {}", p.id, p.region)));
            }
            if !(p.capacity_mb >= 0.0) || !(p.unit_storage_cost >= 0.0) {
                out.push(Violation::new("provider-resources", format!("provider {} has negative storage", p.id)));
            }
            if !(p.upload_kbps > 0.0) || !(p.download_kbps > 0.0) {
                out.push(Violation::new("provider-bandwidth", format!("provider {} needs positive rates", p.id)));
            }
            if p.capacity_threshold.is_some_and(|k| !(k > 0.0)) {
                out.push(Violation::new("capacity-threshold", format!("provider {}", p.id)));
            }
            if !(libm::fabs(p.eagerness) <= self.engine.eagerness_max) {
                out.push(Violation::new(
                    "eagerness-range",
                    format!("provider {} eagerness {} exceeds {}", p.id, p.eagerness, self.engine.eagerness_max),
                ));
            }
        }
        let range_ok = |lo: ContentId, hi: ContentId| lo.0 >= 1 && lo <= hi && hi.0 <= total;
        for o in &self.origins {
            if !ids.contains(&o.provider) {
                out.push(Violation::new("unknown-provider", format!("origin {}", o.provider)));
            }
            if !range_ok(o.lo, o.hi) {
                out.push(Violation::new("content-range", format!("origin range {}..={}", o.lo, o.hi)));
            }
        }
        if !(self.content_size_mb >= 0.0) {
            out.push(Violation::new("content-size", format!("{}", self.content_size_mb)));
        }
        for s in &self.sizes {
            if !range_ok(s.lo, s.hi) || !(s.size_mb >= 0.0) {
                out.push(Violation::new("content-range", format!("size range {}..={}", s.lo, s.hi)));
            }
        }
        let horizon = self.workload.duration;
        for (i, f) in self.flash_crowds.iter().enumerate() {
            let ctx = format!("flash crowd {i}");
            out.extend(f.violations(horizon).into_iter().map(|e| Violation::domain(e, &ctx)));
            if !region_ok(f.region) {
                out.push(Violation::new("unknown-region", format!("{ctx} region {}", f.region)));
            }
            if !range_ok(f.content_range.0, f.content_range.1) {
                out.push(Violation::new("content-range", ctx));
            }
        }
        for (i, s) in self.scheduled.iter().enumerate() {
            let ctx = format!("scheduled event {i}");
            out.extend(s.violations(horizon).into_iter().map(|e| Violation::domain(e, &ctx)));
            if !region_ok(s.region) {
                out.push(Violation::new("unknown-region", format!("{ctx} region {}", s.region)));
            }
            if !range_ok(s.content_range.0, s.content_range.1) {
                out.push(Violation::new("content-range", ctx));
            }
        }
        for (i, rule) in self.policies.iter().enumerate() {
            if let RuleSubject::Provider(p) = &rule.subject {
                if !ids.contains(p) {
                    out.push(Violation::new("unknown-provider", format!("policy rule {i} names {p}")));
                }
            }
            if let Predicate::AllowedRegions(rs) = &rule.predicate {
                for &r in rs {
                    if !region_ok(r) {
                        out.push(Violation::new("unknown-region", format!("policy rule {i} region {r}")));
                    }
                }
            }
        }
        let a = &self.auction;
        if a.winners_wanted < 1 {
            out.push(Violation::new("winners-wanted", "at least one winner per auction"));
        }
        if !(a.entrant_margin >= 0.0 && a.entrant_margin < 1.0) {
            out.push(Violation::new("entrant-margin", format!("{}", a.entrant_margin)));
        }
        if !(a.demand_change_threshold >= 0.0) {
            out.push(Violation::new("demand-change-threshold", format!("{}", a.demand_change_threshold)));
        }
        let e = &self.engine;
        for (name, t) in [
            ("detect_interval", e.detect_interval),
            ("renegotiation_interval", e.renegotiation_interval),
            ("load_window", e.load_window),
            ("replica_duration", e.replica_duration),
        ] {
            if t == SimTime::ZERO {
                out.push(Violation::new("engine-interval", format!("{name} must be positive")));
            }
        }
        if !(e.request_load >= 0.0) || !(e.revenue_per_request >= 0.0) || !(e.eagerness_max >= 0.0) {
            out.push(Violation::new("engine-params", "request_load, revenue_per_request and eagerness_max must be non-negative"));
        }
        if e.cold_start_budget.is_some_and(|b| !b.is_finite()) {
            out.push(Violation::new("engine-params", "cold_start_budget must be finite"));
        }
        if e.history_len == 0 {
            out.push(Violation::new("engine-params", "history_len must be positive"));
        }
        if !(e.upload_kbps > 0.0) || !(e.download_kbps > 0.0) {
            out.push(Violation::new("engine-params", "required rates must be positive"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    Request(usize),
    Detect,
    Renegotiate,
    Expire,
    FlashStart(usize),
    FlashEnd(usize),
    Notice(usize),
}

/// One routed request, kept for the load window.
#[derive(Debug, Clone)]
struct Served {
    request: ContentRequest,
    server: ProviderId,
    sigma: bool,
    load: f64,
}

/// The three predictions for one content over one holding time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Predictions {
    pub horizon: u64,
    pub empirical: f64,
    pub binomial: f64,
    pub zipf: f64,
}

pub struct World {
    cfg: SimConfig,
    econ: EconParams,
    latency: LatencyModel,
    fed: Federation,
    workload: Workload,
    ranks: Vec<u32>,
    queue: EventQueue<Event>,
    log: Vec<LogRecord>,
    window: VecDeque<Served>,
    /// Predictions depend only on the window, so they are memoized until it
    /// next changes.
    forecasts: RefCell<BTreeMap<(Predictor, ContentId, LocationId, u64), f64>>,
    history: BTreeMap<ProviderId, Vec<HistoryRecord>>,
    vo_region: BTreeMap<VoId, LocationId>,
    next_auction: u64,
    next_request: u64,
    now: SimTime,
}

/// Config rejected by [`World::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct InvalidConfig(pub Vec<Violation>);

impl World {
    pub fn new(cfg: SimConfig) -> core::result::Result<World, InvalidConfig> {
        let violations = cfg.violations();
        if !violations.is_empty() {
            return Err(InvalidConfig(violations));
        }
        let wrap = |e: DomainError| InvalidConfig(vec![Violation::domain(e, "config")]);
        let econ = EconParams::new(cfg.econ).map_err(wrap)?;
        let latency = LatencyModel::new(&cfg.latency_ms).map_err(wrap)?;
        let workload = build_workload(&cfg).map_err(wrap)?;
        let mut ranks = vec![0u32; cfg.total_content() as usize + 1];
        for (i, c) in workload.popularity.iter().enumerate() {
            ranks[c.0 as usize] = i as u32 + 1;
        }
        let surrogates = cfg
            .providers
            .iter()
            .map(|p| {
                SurrogateServer::new(
                    p.id.clone(),
                    p.region,
                    p.capacity_mb,
                    p.unit_storage_cost,
                    p.upload_kbps,
                    p.download_kbps,
                    p.capacity_threshold.unwrap_or(econ.capacity_threshold()),
                    p.eagerness,
                )
            })
            .collect();
        let fed = Federation::new(surrogates, PolicyRepository::new(cfg.policies.clone()));

        let mut queue = EventQueue::new();
        let horizon = cfg.workload.duration;
        for (i, f) in cfg.flash_crowds.iter().enumerate() {
            queue.push(f.start, Event::FlashStart(i));
            queue.push(f.end(), Event::FlashEnd(i));
        }
        for (i, s) in cfg.scheduled.iter().enumerate() {
            queue.push(s.notice_at(), Event::Notice(i));
        }
        for (i, r) in workload.requests.iter().enumerate() {
            queue.push(r.time, Event::Request(i));
        }
        if cfg.engine.detect_interval < horizon {
            queue.push(cfg.engine.detect_interval, Event::Detect);
        }
        if cfg.auctions_enabled && cfg.engine.renegotiation_interval < horizon {
            queue.push(cfg.engine.renegotiation_interval, Event::Renegotiate);
        }
        Ok(World {
            cfg,
            econ,
            latency,
            fed,
            workload,
            ranks,
            queue,
            log: Vec::new(),
            window: VecDeque::new(),
            forecasts: RefCell::new(BTreeMap::new()),
            history: BTreeMap::new(),
            vo_region: BTreeMap::new(),
            next_auction: 1,
            next_request: 0,
            now: SimTime::ZERO,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn federation(&self) -> &Federation {
        &self.fed
    }

    pub fn latency(&self) -> &LatencyModel {
        &self.latency
    }

    pub fn workload(&self) -> &Workload {
        &self.workload
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn log(&self) -> &[LogRecord] {
        &self.log
    }

    pub fn into_log(self) -> Vec<LogRecord> {
        self.log
    }

    /// Provider that originates `content`. Contents outside every origin
    /// range belong to the first provider.
    pub fn origin_of(&self, content: ContentId) -> &ProviderId {
        origin_of(&self.cfg, content)
    }

    pub fn content_size(&self, content: ContentId) -> f64 {
        self.cfg
            .sizes
            .iter()
            .find(|s| s.lo <= content && content <= s.hi)
            .map_or(self.cfg.content_size_mb, |s| s.size_mb)
    }

    /// Process one event. Returns `false` once the queue is empty.
    pub fn step(&mut self) -> bool {
        let Some((at, event)) = self.queue.pop() else {
            return false;
        };
        self.now = at;
        match event {
            Event::Request(i) => self.on_request(i),
            Event::Detect => self.on_detect(),
            Event::Renegotiate => self.on_renegotiate(),
            Event::Expire => self.on_expire(),
            Event::FlashStart(i) | Event::FlashEnd(i) => {
                let f = &self.cfg.flash_crowds[i];
                let phase = if matches!(event, Event::FlashStart(_)) { "start" } else { "end" };
                let e = LogEvent::FlashCrowd {
                    phase: phase.to_string(),
                    region: f.region,
                    lo: f.content_range.0,
                    hi: f.content_range.1,
                };
                self.emit(e);
            }
            Event::Notice(i) => self.on_notice(i),
        }
        true
    }

    pub fn run(mut self) -> Vec<LogRecord> {
        while self.step() {}
        self.log
    }

    fn emit(&mut self, event: LogEvent) {
        self.log.push(LogRecord { time: self.now, event });
    }

    fn on_request(&mut self, i: usize) {
        let request = self.workload.requests[i];
        let origin = origin_of(&self.cfg, request.content).clone();
        let origin_region = self.fed.surrogates[&origin].region;
        let holders: Vec<(&ProviderId, LocationId)> = core::iter::once((&origin, origin_region))
            .chain(
                self.fed
                    .holders(request.content)
                    .filter(|s| s.provider != origin)
                    .map(|s| (&s.provider, s.region)),
            )
            .collect();
        let decision = route_request(
            &request,
            holders,
            &self.latency,
            self.econ.delay_threshold_ms(),
            self.cfg.engine.request_load,
        )
        .expect("origin region is validated");
        let req = self.next_request;
        self.next_request += 1;
        self.forecasts.get_mut().clear();
        self.window.push_back(Served {
            request,
            server: decision.server.clone(),
            sigma: decision.sigma,
            load: decision.load,
        });
        self.emit(LogEvent::Request {
            req,
            content: request.content,
            region: request.location,
            server: decision.server,
            latency_ms: decision.latency_ms,
            sigma: decision.sigma,
            load: decision.load,
        });
    }

    fn prune_window(&mut self) {
        if self.now < self.cfg.engine.load_window {
            return;
        }
        let cutoff = self.now - self.cfg.engine.load_window;
        while self.window.front().is_some_and(|s| s.request.time <= cutoff) {
            self.forecasts.get_mut().clear();
            self.window.pop_front();
        }
    }

    /// Sum of loads routed to `provider` inside the window.
    pub fn provider_load(&self, provider: &ProviderId) -> f64 {
        self.window.iter().filter(|s| &s.server == provider).map(|s| s.load).sum()
    }

    fn on_detect(&mut self) {
        self.prune_window();
        let mut groups: BTreeMap<(ProviderId, ContentId, LocationId), Vec<LoadRecord>> = BTreeMap::new();
        for s in &self.window {
            if &s.server != origin_of(&self.cfg, s.request.content) {
                continue;
            }
            groups
                .entry((s.server.clone(), s.request.content, s.request.location))
                .or_default()
                .push(LoadRecord { request: s.request, load: s.load, served_within_threshold: s.sigma });
        }
        let mut pressure = Vec::new();
        for ((provider, content, region), records) in groups {
            let k = self.fed.surrogates[&provider].capacity_threshold;
            let p = penalty(&records, k);
            if p > 0.0 {
                let cost = self.econ.alpha() * p;
                self.emit(LogEvent::Penalty { provider: provider.clone(), content, region, load: p, cost });
                pressure.push((provider, content, region, p));
            }
        }
        if self.cfg.auctions_enabled {
            for (buyer, content, region, p) in pressure {
                if self.is_covered(content, region) {
                    continue;
                }
                let duration = self.cfg.engine.replica_duration;
                self.replication_cycle(&buyer, content, region, p, duration, VoKind::ShortTerm);
            }
        }
        let next = self.now + self.cfg.engine.detect_interval;
        if next < self.cfg.workload.duration {
            self.queue.push(next, Event::Detect);
        }
    }

    /// A live VO already serves `(content, region)`, or some replica is
    /// within the delay threshold of the region.
    fn is_covered(&self, content: ContentId, region: LocationId) -> bool {
        let d = self.econ.delay_threshold_ms();
        let near = self.fed.holders(content).any(|s| {
            self.latency.get(region, s.region).is_some_and(|ms| (ms as f64) < d)
        });
        near || self
            .fed
            .live_vos()
            .any(|v| v.content == content && self.vo_region.get(&v.id) == Some(&region))
    }

    fn horizon(&self, duration: SimTime) -> u64 {
        let past = if self.now < self.cfg.engine.load_window { self.now } else { self.cfg.engine.load_window };
        if past == SimTime::ZERO || self.window.is_empty() {
            return 0;
        }
        forecast_horizon(self.window.len() as u64, duration.as_secs_f64(), past.as_secs_f64()).unwrap_or(0)
    }

    fn kernels(&self) -> Kernels<'_, LatencyModel> {
        Kernels {
            content_width: self.econ.content_kernel_width(),
            location_width: self.econ.location_kernel_width(),
            latency: &self.latency,
        }
    }

    /// Empirical similarity mass: the windowed history, and the same
    /// history replayed cyclically as the forecast of the next `n` requests.
    fn predict_empirical(&self, content: ContentId, region: LocationId, n: u64) -> f64 {
        let h = self.window.len() as u64;
        if h == 0 {
            return 0.0;
        }
        let kernels = self.kernels();
        let weights: Vec<f64> = self
            .window
            .iter()
            .map(|s| kernels.weight((content, region), (s.request.content, s.request.location)).unwrap_or(0.0))
            .collect();
        let behind: f64 = weights.iter().sum();
        let partial: f64 = weights[..(n % h) as usize].iter().sum();
        let ahead = (n / h) as f64 * behind + partial;
        er_empirical_from_weights(&[ahead], &[behind], self.econ.rho())
    }

    fn predict_binomial(&self, content: ContentId, n: u64) -> f64 {
        let Some(last) = self.window.back() else { return 0.0 };
        let steps = steps_of(self.window.iter().map(|s| s.request.content.0));
        let walk = self.cfg.walk;
        let mean = weighted_mean_step(&steps, walk.step_decay).unwrap_or(walk.mean_step);
        let model = WalkParams { mean_step: mean, ..walk };
        let offset = content.0 as i64 - last.request.content.0 as i64;
        er_binomial(offset, n.min(u32::MAX as u64) as u32, &model).unwrap_or(0.0)
    }

    fn predict_zipf(&self, content: ContentId, n: u64) -> f64 {
        let rank = self.ranks.get(content.0 as usize).copied().unwrap_or(0);
        if rank == 0 {
            return 0.0;
        }
        er_zipf_marginal(ContentId(rank), n.min(u32::MAX as u64) as u32, &self.cfg.zipf).unwrap_or(0.0)
    }

    /// All three predictions of demand for `content` in `region` over the
    /// next `duration`.
    pub fn predictions(&self, content: ContentId, region: LocationId, duration: SimTime) -> Predictions {
        let n = self.horizon(duration);
        Predictions {
            horizon: n,
            empirical: self.predict(Predictor::Empirical, content, region, n),
            binomial: self.predict(Predictor::Binomial, content, region, n),
            zipf: self.predict(Predictor::Zipf, content, region, n),
        }
    }

    fn predict(&self, model: Predictor, content: ContentId, region: LocationId, n: u64) -> f64 {
        // Only the empirical model looks at the requesting region.
        let region = if model == Predictor::Empirical { region } else { LocationId(0) };
        let key = (model, content, region, n);
        if let Some(&v) = self.forecasts.borrow().get(&key) {
            return v;
        }
        let v = match model {
            Predictor::Empirical => self.predict_empirical(content, region, n),
            Predictor::Binomial => self.predict_binomial(content, n),
            Predictor::Zipf => self.predict_zipf(content, n),
        };
        self.forecasts.borrow_mut().insert(key, v);
        v
    }

    /// Expected revenue, in currency, of serving `content` for `region`
    /// over `duration` under the configured predictor.
    fn expected_revenue(&self, content: ContentId, region: LocationId, duration: SimTime) -> f64 {
        let n = self.horizon(duration);
        self.predict(self.cfg.engine.predictor, content, region, n) * self.cfg.engine.revenue_per_request
    }

    /// Expected revenue of a replica a seller already holds, over what is
    /// left of its holding time.
    fn held_revenue(&self, seller: &SurrogateServer, content: ContentId) -> f64 {
        let Some(r) = seller.replica(content) else { return 0.0 };
        let remaining = r.expires_at.saturating_sub(self.now);
        let region = self.vo_region.get(&r.vo).copied().unwrap_or(seller.region);
        self.expected_revenue(content, region, remaining)
    }

    fn eviction_prices(&self, sellers: impl IntoIterator<Item = ProviderId>) -> BTreeMap<(ProviderId, ContentId), f64> {
        let mut out = BTreeMap::new();
        for p in sellers {
            if let Some(s) = self.fed.surrogates.get(&p) {
                for &c in s.replicas().keys() {
                    out.insert((p.clone(), c), self.held_revenue(s, c));
                }
            }
        }
        out
    }

    /// The seller's sealed bid for hosting `content` for `duration`, or
    /// `None` if it would abstain or cannot make room.
    fn quote(&self, seller: &ProviderId, content: ContentId, region: LocationId, duration: SimTime) -> Option<Money> {
        let s = self.fed.surrogates.get(seller)?;
        let size = self.content_size(content);
        let er_new = self.expected_revenue(content, region, duration);
        let er_old = if s.holds(content) {
            0.0
        } else {
            plan_eviction(s, size, |c| self.held_revenue(s, c)).ok()?.er_old
        };
        let amount = bid_amount(storage_cost(size, s.unit_storage_cost), utility(er_new, er_old), s.eagerness)?;
        Some(Money::from_f64_round(amount))
    }

    fn budget(&self, buyer: &ProviderId, content: ContentId, region: LocationId, pressure: f64) -> f64 {
        let cold = self.cfg.engine.cold_start_budget.unwrap_or(self.econ.alpha() * pressure);
        let Some(history) = self.history.get(buyer).filter(|h| !h.is_empty()) else {
            return cold;
        };
        let recent = &history[history.len().saturating_sub(self.cfg.engine.history_len)..];
        let current = ContentRequest::new(content, region, self.now);
        payoff_max(recent, &current, pressure, &self.econ, &self.latency).unwrap_or(cold)
    }

    fn next_auction_id(&mut self) -> u64 {
        let id = self.next_auction;
        self.next_auction += 1;
        id
    }

    fn log_clearing(&mut self, auction: u64, reserve: Money, bids: &[Bid], outcome: &AuctionOutcome) {
        for b in bids {
            self.emit(LogEvent::BidRevealed {
                auction,
                seller: b.seller.clone(),
                amount: b.amount,
                at: b.submitted_at,
            });
        }
        let (name, winners, payment) = match outcome {
            AuctionOutcome::Awarded { winners } => ("awarded", winners.len() as u32, winners[0].payment),
            AuctionOutcome::NoWinner { reason } => (reason.as_str(), 0, Money::ZERO),
        };
        self.emit(LogEvent::AuctionCleared { auction, reserve, outcome: name.to_string(), winners, payment });
    }

    /// Buyer-side replication: budget, requirement ad, discovery, sealed
    /// bids, clearing, VO formation, and relaxed retries on no winner.
    fn replication_cycle(
        &mut self,
        buyer: &ProviderId,
        content: ContentId,
        region: LocationId,
        pressure: f64,
        duration: SimTime,
        kind: VoKind,
    ) {
        let budget = self.budget(buyer, content, region, pressure);
        let reserve = Money::from_f64_floor(budget);
        let mut policy = AuctionPolicy {
            content,
            storage_mb: self.content_size(content),
            upload_kbps: self.cfg.engine.upload_kbps,
            download_kbps: self.cfg.engine.download_kbps,
            preferred_regions: vec![region],
            duration,
            retry_count: 0,
        };
        loop {
            let id = self.next_auction_id();
            let mut auction = match open_auction(policy.clone(), reserve, buyer.clone(), &self.cfg.auction) {
                Ok(a) => a,
                Err(AuctionError::NoBudget(_)) => {
                    self.emit(LogEvent::AuctionRefused { buyer: buyer.clone(), content, region, budget });
                    return;
                }
                Err(_) => return,
            };
            let p = self.predictions(content, region, policy.duration);
            self.emit(LogEvent::Predict {
                auction: id,
                content,
                duration: policy.duration,
                horizon: p.horizon,
                empirical: p.empirical,
                binomial: p.binomial,
                zipf: p.zipf,
            });
            self.emit(LogEvent::AuctionOpened {
                auction: id,
                buyer: buyer.clone(),
                content,
                region,
                duration: policy.duration,
                retry: policy.retry_count,
                renegotiation: false,
            });
            let ad = crate::vo::RequirementAd { buyer: buyer.clone(), policy: policy.clone(), published_at: self.now };
            let _ = self.fed.registry.publish_requirement(ad);
            let sellers: Vec<ProviderId> = self
                .fed
                .registry
                .discover_sellers(&policy, buyer)
                .into_iter()
                .map(|ad| ad.provider)
                .filter(|p| !self.fed.surrogates[p].holds(content))
                .collect();
            for (i, seller) in sellers.iter().enumerate() {
                if let Some(amount) = self.quote(seller, content, region, policy.duration) {
                    let bid = Bid { seller: seller.clone(), amount, submitted_at: self.now + SimTime(i as u64 + 1) };
                    let _ = auction.submit_bid(bid);
                }
            }
            let outcome = auction.clear(self.cfg.auction.winners_wanted).expect("cleared once");
            self.fed.registry.withdraw_requirement(buyer, content);
            let bids = auction.revealed_bids().unwrap_or(&[]).to_vec();
            self.log_clearing(id, reserve, &bids, &outcome);
            match outcome {
                AuctionOutcome::Awarded { winners } => {
                    self.form(buyer, &winners, &policy, kind, region);
                    return;
                }
                AuctionOutcome::NoWinner { .. } => match retry_after_no_winner(&policy, &self.cfg.auction) {
                    Retry::Relaxed(next) => {
                        self.emit(LogEvent::AuctionRetry { auction: id, duration: next.duration, retry: next.retry_count });
                        policy = next;
                    }
                    Retry::GiveUp => {
                        self.emit(LogEvent::SlaRisk { buyer: buyer.clone(), content, region });
                        return;
                    }
                },
            }
        }
    }

    fn form(&mut self, buyer: &ProviderId, winners: &[Award], policy: &AuctionPolicy, kind: VoKind, region: LocationId) {
        let prices = self.eviction_prices(winners.iter().map(|w| w.seller.clone()));
        let er_of = |p: &ProviderId, c: ContentId| prices.get(&(p.clone(), c)).copied().unwrap_or(0.0);
        let Ok((formed, events)) = self.fed.form_vo(buyer, winners, policy, kind, self.now, &er_of) else {
            return;
        };
        self.record_vo_events(events);
        if let Some(vo) = formed {
            self.vo_formed(vo, buyer, policy.content, region, winners[0].payment);
        }
    }

    fn vo_formed(&mut self, vo: VoId, buyer: &ProviderId, content: ContentId, region: LocationId, payment: Money) {
        self.vo_region.insert(vo, region);
        self.history.entry(buyer.clone()).or_default().push(HistoryRecord {
            request: ContentRequest::new(content, region, self.now),
            paid: payment.to_f64(),
        });
        let expires = self.fed.vo(vo).expect("just formed").expires_at;
        self.queue.push(expires, Event::Expire);
    }

    fn record_vo_events(&mut self, events: Vec<VoEvent>) {
        for e in events {
            let event = match e {
                VoEvent::Formed { vo, kind, buyer, content, expires_at } => LogEvent::VoFormed {
                    vo,
                    kind,
                    buyer,
                    content,
                    expires: expires_at,
                    prev: self.fed.vo(vo).and_then(|v| v.previous),
                },
                VoEvent::PolicyDenied { buyer, content, violated } => LogEvent::PolicyDenied { buyer, content, rules: violated },
                VoEvent::ReplicaPlaced { provider, content, vo, size_mb, payment, used_mb } => {
                    LogEvent::ReplicaPlaced { vo, provider, content, size_mb, payment, used_mb }
                }
                VoEvent::ReplicaTransferred { provider, content, vo, payment } => {
                    LogEvent::ReplicaTransferred { vo, provider, content, payment }
                }
                VoEvent::ReplicaEvicted { provider, content, vo, used_mb } => {
                    LogEvent::ReplicaEvicted { vo, provider, content, used_mb }
                }
                VoEvent::ReplicaExpired { provider, content, vo, used_mb } => {
                    LogEvent::ReplicaExpired { vo, provider, content, used_mb }
                }
                VoEvent::ReplicaReleased { provider, content, vo, used_mb } => {
                    LogEvent::ReplicaReleased { vo, provider, content, used_mb }
                }
                VoEvent::WinnerDropped { provider, content } => LogEvent::WinnerDropped { provider, content },
                VoEvent::Closed { vo, reason } => LogEvent::VoClosed { vo, reason: close_reason(reason) },
            };
            self.emit(event);
        }
    }

    fn on_expire(&mut self) {
        let (_, events) = self.fed.expire_vos(self.now);
        self.record_vo_events(events);
    }

    fn on_notice(&mut self, i: usize) {
        let event = self.cfg.scheduled[i].clone();
        self.emit(LogEvent::ScheduledNotice {
            region: event.region,
            lo: event.content_range.0,
            hi: event.content_range.1,
            start: event.start,
        });
        if !self.cfg.auctions_enabled {
            return;
        }
        self.prune_window();
        let until = event.start + event.duration;
        for c in event.content_range.0 .0..=event.content_range.1 .0 {
            let content = ContentId(c);
            if self.is_covered(content, event.region) {
                continue;
            }
            let buyer = origin_of(&self.cfg, content).clone();
            let duration = until.saturating_sub(self.now);
            self.replication_cycle(&buyer, content, event.region, 0.0, duration, VoKind::LongTerm);
        }
    }

    fn on_renegotiate(&mut self) {
        self.prune_window();
        let live: Vec<VoId> = self.fed.live_vos().map(|v| v.id).collect();
        for id in live {
            self.renegotiate(id);
        }
        let next = self.now + self.cfg.engine.renegotiation_interval;
        if next < self.cfg.workload.duration {
            self.queue.push(next, Event::Renegotiate);
        }
    }

    fn market_view(&self, id: VoId) -> Option<(VoMarketView, AuctionPolicy, LocationId)> {
        let vo = self.fed.vo(id).filter(|v| v.is_live())?;
        let remaining = vo.expires_at.saturating_sub(self.now);
        if remaining == SimTime::ZERO {
            return None;
        }
        let region = self.vo_region.get(&id).copied().unwrap_or(self.fed.surrogates[&vo.buyer].region);
        let policy = AuctionPolicy {
            content: vo.content,
            storage_mb: vo.storage_mb,
            upload_kbps: self.cfg.engine.upload_kbps,
            download_kbps: self.cfg.engine.download_kbps,
            preferred_regions: vec![region],
            duration: remaining,
            retry_count: 0,
        };
        let winners = vo
            .sellers
            .iter()
            .map(|a| {
                let er = self.expected_revenue(vo.content, region, remaining);
                HeldPosition {
                    seller: a.seller.clone(),
                    winning_bid: a.bid,
                    payment: a.payment,
                    current_ask: self.quote(&a.seller, vo.content, region, remaining),
                    remaining_utility: er,
                }
            })
            .collect();
        let entrants = self
            .fed
            .registry
            .discover_sellers(&policy, &vo.buyer)
            .into_iter()
            .filter(|ad| !vo.has_seller(&ad.provider) && !self.fed.surrogates[&ad.provider].holds(vo.content))
            .filter_map(|ad| {
                let ask = self.quote(&ad.provider, vo.content, region, remaining)?;
                Some(EntrantAsk { seller: ad.provider, ask })
            })
            .collect();
        Some((VoMarketView { vo: id, content: vo.content, winners, entrants }, policy, region))
    }

    fn renegotiate(&mut self, id: VoId) {
        let Some((view, policy, region)) = self.market_view(id) else { return };
        let Some(trigger) = detect_renegotiation(&view, &self.cfg.auction, self.now).into_iter().next() else {
            return;
        };
        let vo = self.fed.vo(id).expect("live").clone();
        self.emit(LogEvent::Renegotiation { vo: id, kind: trigger.kind, seller: trigger.seller.clone(), content: vo.content });
        let departing = (trigger.kind == RenegotiationKind::NoLongerBeneficial).then(|| trigger.seller.clone());
        let reserve = vo.sellers[0].payment;
        let auction_id = self.next_auction_id();
        let Ok(mut auction) = open_auction(policy.clone(), reserve, vo.buyer.clone(), &self.cfg.auction) else {
            return;
        };
        self.emit(LogEvent::AuctionOpened {
            auction: auction_id,
            buyer: vo.buyer.clone(),
            content: vo.content,
            region,
            duration: policy.duration,
            retry: 0,
            renegotiation: true,
        });
        let mut sellers: Vec<ProviderId> = vo.sellers.iter().map(|a| a.seller.clone()).collect();
        sellers.extend(view.entrants.iter().map(|e| e.seller.clone()));
        for (i, seller) in sellers.iter().enumerate() {
            if departing.as_ref() == Some(seller) {
                continue;
            }
            if let Some(amount) = self.quote(seller, vo.content, region, policy.duration) {
                let bid = Bid { seller: seller.clone(), amount, submitted_at: self.now + SimTime(i as u64 + 1) };
                let _ = auction.submit_bid(bid);
            }
        }
        let outcome = auction.clear(self.cfg.auction.winners_wanted).expect("cleared once");
        let bids = auction.revealed_bids().unwrap_or(&[]).to_vec();
        self.log_clearing(auction_id, reserve, &bids, &outcome);
        let winners = match &outcome {
            AuctionOutcome::Awarded { winners } => Some(winners.clone()),
            AuctionOutcome::NoWinner { .. } => None,
        };
        let prices = self.eviction_prices(winners.iter().flatten().map(|w| w.seller.clone()));
        let er_of = |p: &ProviderId, c: ContentId| prices.get(&(p.clone(), c)).copied().unwrap_or(0.0);
        let Ok((formed, events)) = self.fed.rearrange_vo(id, departing.as_ref(), winners.as_deref(), self.now, &er_of)
        else {
            return;
        };
        self.record_vo_events(events);
        if let (Some(new_id), Some(w)) = (formed, winners) {
            self.vo_formed(new_id, &vo.buyer, vo.content, region, w[0].payment);
        }
    }

    /// Storage conservation and no-free-riding over the current state.
    pub fn audit(&self) -> Vec<&'static str> {
        self.fed.audit()
    }
}

fn origin_of(cfg: &SimConfig, content: ContentId) -> &ProviderId {
    cfg.origins
        .iter()
        .find(|o| o.lo <= content && content <= o.hi)
        .map_or(&cfg.providers[0].id, |o| &o.provider)
}

fn close_reason(reason: CloseReason) -> String {
    reason.as_str().to_string()
}

/// Run `cfg` to completion and return its event log.
pub fn run_simulation(cfg: SimConfig) -> core::result::Result<Vec<LogRecord>, InvalidConfig> {
    Ok(World::new(cfg)?.run())
}

/// The workload the run of `cfg` would see, flash crowds included.
pub fn build_workload(cfg: &SimConfig) -> Result<Workload> {
    let mut w = generate_workload(&cfg.workload, cfg.seed)?;
    for (i, f) in cfg.flash_crowds.iter().enumerate() {
        inject_flash_crowd(&mut w, &cfg.workload, f, cfg.seed, i as u64);
    }
    for (i, s) in cfg.scheduled.iter().enumerate() {
        inject_scheduled_demand(&mut w, &cfg.workload, s, cfg.seed, i as u64);
    }
    Ok(w)
}
