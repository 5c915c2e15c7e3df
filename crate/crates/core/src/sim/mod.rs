//! Discrete-event simulation of peering providers.

mod engine;
mod latency;
pub mod log;
mod metrics;
mod predict;
mod queue;
mod route;
mod workload;

pub use self::engine::{
    build_workload, run_simulation, EngineParams, InvalidConfig, OriginRange, Predictions, Predictor,
    ProviderConfig, SimConfig, SizeRange, Violation, World,
};
pub use self::latency::LatencyModel;
pub use self::log::{parse_log, render_log, LogEvent, LogRecord};
pub use self::metrics::Metrics;
pub use self::predict::{compare_predictors, PredictorReport, PredictorRow};
pub use self::queue::EventQueue;
pub use self::route::{route_request, RouteDecision};
pub use self::workload::{
    generate_walk_workload, generate_workload, generate_zipf_workload, inject_flash_crowd, inject_scheduled_demand,
    FlashCrowdEvent, ScheduledEvent, Workload, WorkloadKind, WorkloadSpec,
};
