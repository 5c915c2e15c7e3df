//! Scenario files: the JSON schema and its conversion into a run config.

use std::path::Path;

use cdnpeer_core::auction::AuctionParams;
use cdnpeer_core::econ::{EconConfig, WalkParams, ZipfParams};
use cdnpeer_core::sim::{
    EngineParams, FlashCrowdEvent, OriginRange, Predictor, ProviderConfig, ScheduledEvent, SimConfig, SizeRange,
    Violation, WorkloadKind, WorkloadSpec,
};
use cdnpeer_core::vo::{Effect, PolicyRule, Predicate, RuleSubject};
use cdnpeer_core::{ContentId, LocationId, ProviderId, SimTime};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub seed: u64,
    pub latency_ms: Vec<Vec<u32>>,
    pub providers: Vec<ProviderSpec>,
    pub contents: ContentsSpec,
    pub econ: EconConfigSpec,
    #[serde(default)]
    pub predictors: PredictorsSpec,
    pub workload: WorkloadFile,
    #[serde(default)]
    pub flash_crowds: Vec<FlashCrowdSpec>,
    #[serde(default)]
    pub scheduled_events: Vec<ScheduledSpec>,
    #[serde(default)]
    pub policies: Vec<PolicySpec>,
    #[serde(default)]
    pub auction: AuctionSpec,
    #[serde(default)]
    pub engine: EngineSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderSpec {
    pub id: String,
    pub region: u16,
    pub capacity_mb: f64,
    pub unit_storage_cost: f64,
    pub upload_kbps: f64,
    pub download_kbps: f64,
    #[serde(default)]
    pub capacity_threshold: Option<f64>,
    #[serde(default)]
    pub eagerness: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContentsSpec {
    pub total: u32,
    pub size_mb: f64,
    #[serde(default)]
    pub sizes: Vec<SizeSpec>,
    #[serde(default)]
    pub origins: Vec<OriginSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeSpec {
    pub range: [u32; 2],
    pub size_mb: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OriginSpec {
    pub range: [u32; 2],
    pub provider: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconConfigSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub rho: f64,
    pub delay_threshold_ms: f64,
    pub content_kernel_width: f64,
    pub location_kernel_width: f64,
    pub capacity_threshold: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictorsSpec {
    #[serde(default)]
    pub walk: Option<WalkSpec>,
    /// Zipf exponent the predictor assumes; defaults to the workload's.
    #[serde(default)]
    pub zipf_mu: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkSpec {
    pub max_step: u32,
    #[serde(default)]
    pub mean_step: f64,
    pub step_decay: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorkloadFile {
    #[serde(flatten)]
    pub kind: WorkloadKindSpec,
    pub arrival_rate: f64,
    pub region_weights: Vec<f64>,
    pub duration_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WorkloadKindSpec {
    Zipf { mu: f64 },
    RandomWalk { start: u32, max_step: u32 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlashCrowdSpec {
    pub start_s: f64,
    pub duration_s: f64,
    pub region: u16,
    pub content_range: [u32; 2],
    pub rate_multiplier: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduledSpec {
    pub start_s: f64,
    pub duration_s: f64,
    pub region: u16,
    pub content_range: [u32; 2],
    pub advance_notice_s: f64,
    #[serde(default = "one")]
    pub rate_multiplier: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    /// A provider id, or `"*"` for every VO.
    pub subject: String,
    pub rule: RuleSpec,
    pub effect: EffectSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum RuleSpec {
    MaxShareableMb(f64),
    ForbiddenContentRange([u32; 2]),
    MinDurationS(f64),
    MaxDurationS(f64),
    AllowedRegions(Vec<u16>),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EffectSpec {
    Allow,
    Deny,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuctionSpec {
    pub winners_wanted: usize,
    pub max_retries: u32,
    pub entrant_margin: f64,
    pub demand_change_threshold: f64,
    pub min_duration_s: f64,
    pub renegotiation_interval_s: f64,
    pub eagerness_max: f64,
}

impl Default for AuctionSpec {
    fn default() -> Self {
        let a = AuctionParams::default();
        let e = EngineParams::default();
        AuctionSpec {
            winners_wanted: a.winners_wanted,
            max_retries: a.max_retries,
            entrant_margin: a.entrant_margin,
            demand_change_threshold: a.demand_change_threshold,
            min_duration_s: a.min_duration.as_secs_f64(),
            renegotiation_interval_s: e.renegotiation_interval.as_secs_f64(),
            eagerness_max: e.eagerness_max,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineSpec {
    pub detect_interval_s: f64,
    pub load_window_s: f64,
    pub request_load: f64,
    pub replica_duration_s: f64,
    pub cold_start_budget: Option<f64>,
    pub revenue_per_request: f64,
    pub predictor: String,
    pub history_len: usize,
    pub upload_kbps: f64,
    pub download_kbps: f64,
}

impl Default for EngineSpec {
    fn default() -> Self {
        let e = EngineParams::default();
        EngineSpec {
            detect_interval_s: e.detect_interval.as_secs_f64(),
            load_window_s: e.load_window.as_secs_f64(),
            request_load: e.request_load,
            replica_duration_s: e.replica_duration.as_secs_f64(),
            cold_start_budget: e.cold_start_budget,
            revenue_per_request: e.revenue_per_request,
            predictor: e.predictor.as_str().to_string(),
            history_len: e.history_len,
            upload_kbps: e.upload_kbps,
            download_kbps: e.download_kbps,
        }
    }
}

/// A scenario as read from disk, with the hash of its bytes.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub raw: serde_json::Value,
    pub hash: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn load(path: &Path) -> Result<LoadedScenario, CliError> {
    let bytes = std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::Usage(format!("no scenario at {}", path.display())),
        _ => CliError::Io(format!("cannot read {}: {e}", path.display())),
    })?;
    let raw: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let scenario = from_value(raw.clone()).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(LoadedScenario { scenario, raw, hash: sha256_hex(&bytes) })
}

pub fn from_value(raw: serde_json::Value) -> Result<Scenario, serde_json::Error> {
    serde_json::from_value(raw)
}

/// Seconds field, checked for sign and finiteness before conversion.
struct Seconds<'a> {
    out: &'a mut Vec<Violation>,
}

impl Seconds<'_> {
    fn get(&mut self, name: &str, secs: f64) -> SimTime {
        if !(secs >= 0.0 && secs.is_finite()) {
            self.out.push(Violation { code: "negative-time", detail: format!("{name} = {secs}") });
            return SimTime::ZERO;
        }
        SimTime::from_secs_f64(secs)
    }
}

fn range(r: [u32; 2]) -> (ContentId, ContentId) {
    (ContentId(r[0]), ContentId(r[1]))
}

impl Scenario {
    /// Build the run config. Problems the core validator cannot see (bad
    /// names, negative times) are returned alongside it; the config is
    /// only usable when the combined list is empty.
    pub fn to_config(&self) -> (SimConfig, Vec<Violation>) {
        let mut problems = Vec::new();
        let mut secs = Seconds { out: &mut problems };
        let total = self.contents.total;
        let kind = match self.workload.kind {
            WorkloadKindSpec::Zipf { mu } => WorkloadKind::Zipf { mu, total_content: total },
            WorkloadKindSpec::RandomWalk { start, max_step } => {
                WorkloadKind::RandomWalk { start, max_step, total_content: total }
            }
        };
        let workload = WorkloadSpec {
            kind,
            arrival_rate: self.workload.arrival_rate,
            region_weights: self.workload.region_weights.clone(),
            duration: secs.get("workload.duration_s", self.workload.duration_s),
        };
        let flash_crowds = self
            .flash_crowds
            .iter()
            .enumerate()
            .map(|(i, f)| FlashCrowdEvent {
                start: secs.get(&format!("flash_crowds.{i}.start_s"), f.start_s),
                duration: secs.get(&format!("flash_crowds.{i}.duration_s"), f.duration_s),
                region: LocationId(f.region),
                content_range: range(f.content_range),
                rate_multiplier: f.rate_multiplier,
            })
            .collect();
        let scheduled = self
            .scheduled_events
            .iter()
            .enumerate()
            .map(|(i, s)| ScheduledEvent {
                start: secs.get(&format!("scheduled_events.{i}.start_s"), s.start_s),
                duration: secs.get(&format!("scheduled_events.{i}.duration_s"), s.duration_s),
                region: LocationId(s.region),
                content_range: range(s.content_range),
                advance_notice: secs.get(&format!("scheduled_events.{i}.advance_notice_s"), s.advance_notice_s),
                rate_multiplier: s.rate_multiplier,
            })
            .collect();
        let mut policies = Vec::new();
        for p in &self.policies {
            let predicate = match &p.rule {
                RuleSpec::MaxShareableMb(mb) => Predicate::MaxShareableMb(*mb),
                RuleSpec::ForbiddenContentRange(r) => Predicate::ForbiddenContentRange(ContentId(r[0]), ContentId(r[1])),
                RuleSpec::MinDurationS(s) => Predicate::MinDuration(secs.get("policies.min-duration-s", *s)),
                RuleSpec::MaxDurationS(s) => Predicate::MaxDuration(secs.get("policies.max-duration-s", *s)),
                RuleSpec::AllowedRegions(rs) => Predicate::AllowedRegions(rs.iter().map(|&r| LocationId(r)).collect()),
            };
            let subject = match p.subject.as_str() {
                "*" => RuleSubject::AnyVo,
                id => RuleSubject::Provider(ProviderId::new(id)),
            };
            let effect = match p.effect {
                EffectSpec::Allow => Effect::Allow,
                EffectSpec::Deny => Effect::Deny,
            };
            policies.push(PolicyRule { subject, predicate, effect });
        }
        let a = &self.auction;
        let auction = AuctionParams {
            winners_wanted: a.winners_wanted,
            max_retries: a.max_retries,
            entrant_margin: a.entrant_margin,
            demand_change_threshold: a.demand_change_threshold,
            min_duration: secs.get("auction.min_duration_s", a.min_duration_s),
        };
        let e = &self.engine;
        let predictor = Predictor::parse(&e.predictor).unwrap_or_else(|| {
            secs.out.push(Violation { code: "unknown-predictor", detail: e.predictor.clone() });
            Predictor::Empirical
        });
        let engine = EngineParams {
            detect_interval: secs.get("engine.detect_interval_s", e.detect_interval_s),
            renegotiation_interval: secs.get("auction.renegotiation_interval_s", a.renegotiation_interval_s),
            load_window: secs.get("engine.load_window_s", e.load_window_s),
            request_load: e.request_load,
            replica_duration: secs.get("engine.replica_duration_s", e.replica_duration_s),
            cold_start_budget: e.cold_start_budget,
            revenue_per_request: e.revenue_per_request,
            predictor,
            history_len: e.history_len,
            upload_kbps: e.upload_kbps,
            download_kbps: e.download_kbps,
            eagerness_max: a.eagerness_max,
        };
        let walk = match (&self.predictors.walk, &self.workload.kind) {
            (Some(w), _) => WalkParams { max_step: w.max_step, mean_step: w.mean_step, step_decay: w.step_decay },
            (None, WorkloadKindSpec::RandomWalk { max_step, .. }) => {
                WalkParams { max_step: *max_step, mean_step: 0.0, step_decay: 0.9 }
            }
            (None, WorkloadKindSpec::Zipf { .. }) => WalkParams { max_step: 1, mean_step: 0.0, step_decay: 0.9 },
        };
        let zipf_mu = match (self.predictors.zipf_mu, &self.workload.kind) {
            (Some(mu), _) => mu,
            (None, WorkloadKindSpec::Zipf { mu }) => *mu,
            (None, WorkloadKindSpec::RandomWalk { .. }) => 0.5,
        };
        let c = &self.econ;
        let config = SimConfig {
            providers: self
                .providers
                .iter()
                .map(|p| ProviderConfig {
                    id: ProviderId::new(p.id.clone()),
                    region: LocationId(p.region),
                    capacity_mb: p.capacity_mb,
                    unit_storage_cost: p.unit_storage_cost,
                    upload_kbps: p.upload_kbps,
                    download_kbps: p.download_kbps,
                    capacity_threshold: p.capacity_threshold,
                    eagerness: p.eagerness,
                })
                .collect(),
            origins: self
                .contents
                .origins
                .iter()
                .map(|o| OriginRange {
                    lo: ContentId(o.range[0]),
                    hi: ContentId(o.range[1]),
                    provider: ProviderId::new(o.provider.clone()),
                })
                .collect(),
            content_size_mb: self.contents.size_mb,
            sizes: self
                .contents
                .sizes
                .iter()
                .map(|s| SizeRange { lo: ContentId(s.range[0]), hi: ContentId(s.range[1]), size_mb: s.size_mb })
                .collect(),
            latency_ms: self.latency_ms.clone(),
            econ: EconConfig {
                alpha: c.alpha,
                beta: c.beta,
                gamma: c.gamma,
                lambda: c.lambda,
                rho: c.rho,
                delay_threshold_ms: c.delay_threshold_ms,
                content_kernel_width: c.content_kernel_width,
                location_kernel_width: c.location_kernel_width,
                capacity_threshold: c.capacity_threshold,
            },
            walk,
            zipf: ZipfParams { mu: zipf_mu, total_content: total },
            workload,
            flash_crowds,
            scheduled,
            policies,
            auction,
            engine,
            auctions_enabled: true,
            seed: self.seed,
        };
        (config, problems)
    }

    /// Every violation, structural and semantic.
    pub fn validate(&self) -> Vec<Violation> {
        let (config, mut problems) = self.to_config();
        problems.extend(config.violations());
        problems
    }

    /// A config ready to run, or the full list of violations.
    pub fn checked_config(&self) -> Result<SimConfig, CliError> {
        let (config, mut problems) = self.to_config();
        problems.extend(config.violations());
        if problems.is_empty() {
            Ok(config)
        } else {
            Err(CliError::Invalid(problems))
        }
    }
}
