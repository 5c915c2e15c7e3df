//! Metrics and CSV writers.

use std::fmt::Write as _;
use std::path::Path;

use cdnpeer_core::sim::{Metrics, PredictorReport};
use serde_json::{json, Map, Value};

use crate::CliError;

/// Provenance written at the top of every metrics file.
#[derive(Debug, Clone)]
pub struct RunHeader {
    pub scenario: String,
    pub scenario_hash: String,
    pub seed: u64,
    pub auctions: bool,
}

pub fn metrics_text(header: &RunHeader, metrics: &Metrics) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario={}", header.scenario);
    let _ = writeln!(out, "scenario_hash={}", header.scenario_hash);
    let _ = writeln!(out, "seed={}", header.seed);
    let _ = writeln!(out, "auctions={}", header.auctions);
    for (k, v) in metrics.to_key_values() {
        let _ = writeln!(out, "{k}={v}");
    }
    out
}

/// Same content as [`metrics_text`], as a two-column CSV.
pub fn metrics_csv(header: &RunHeader, metrics: &Metrics) -> String {
    let mut out = String::from("metric,value\n");
    for line in metrics_text(header, metrics).lines() {
        if let Some((k, v)) = line.split_once('=') {
            let _ = writeln!(out, "{k},{v}");
        }
    }
    out
}

fn money_map<'a>(entries: impl Iterator<Item = (&'a cdnpeer_core::ProviderId, &'a cdnpeer_core::Money)>) -> Value {
    let map: Map<String, Value> = entries.map(|(p, m)| (p.to_string(), json!(m.to_f64()))).collect();
    Value::Object(map)
}

pub fn metrics_json(header: &RunHeader, m: &Metrics) -> String {
    let renegotiations: Map<String, Value> =
        m.renegotiations.iter().map(|(k, n)| (k.as_str().to_string(), json!(n))).collect();
    let doc = json!({
        "scenario": header.scenario,
        "scenario_hash": header.scenario_hash,
        "seed": header.seed,
        "auctions": header.auctions,
        "total_requests": m.total_requests,
        "served_within_d": m.served_within_d,
        "sla_violation_rate": m.sla_violation_rate,
        "mean_latency_ms": m.mean_latency_ms,
        "total_penalty_load": m.total_penalty_load,
        "total_penalty_cost": m.total_penalty_cost,
        "total_payments": m.total_payments.to_f64(),
        "revenue": money_map(m.revenue.iter()),
        "expenditure": money_map(m.expenditure.iter()),
        "auctions_opened": m.auctions_opened,
        "auctions_awarded": m.auctions_awarded,
        "auctions_no_winner": m.auctions_no_winner,
        "auctions_refused": m.auctions_refused,
        "auction_retries": m.auction_retries,
        "sla_risk_events": m.sla_risk_events,
        "vos_formed": m.vos_formed,
        "vos_closed": m.vos_closed,
        "replicas_placed": m.replicas_placed,
        "replicas_transferred": m.replicas_transferred,
        "replicas_evicted": m.replicas_evicted,
        "replicas_expired": m.replicas_expired,
        "replicas_released": m.replicas_released,
        "winners_dropped": m.winners_dropped,
        "policy_denials": m.policy_denials,
        "renegotiations": renegotiations,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("plain values");
    s.push('\n');
    s
}

pub fn summary(header: &RunHeader, m: &Metrics) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario        {} (seed {}, auctions {})", header.scenario, header.seed, if header.auctions { "on" } else { "off" });
    let _ = writeln!(out, "requests        {} ({} within D)", m.total_requests, m.served_within_d);
    let _ = writeln!(out, "sla violations  {:.4}", m.sla_violation_rate);
    let _ = writeln!(out, "mean latency    {:.2} ms", m.mean_latency_ms);
    let _ = writeln!(out, "penalty         {:.1} load units, {:.2} currency", m.total_penalty_load, m.total_penalty_cost);
    let _ = writeln!(
        out,
        "auctions        {} opened, {} awarded, {} no winner, {} refused, {} sla-risk",
        m.auctions_opened, m.auctions_awarded, m.auctions_no_winner, m.auctions_refused, m.sla_risk_events
    );
    let _ = writeln!(
        out,
        "replicas        {} placed, {} evicted, {} expired, {} released",
        m.replicas_placed, m.replicas_evicted, m.replicas_expired, m.replicas_released
    );
    let _ = writeln!(out, "payments        {}", m.total_payments);
    let reneg: Vec<String> = m.renegotiations.iter().map(|(k, n)| format!("{} {n}", k.as_str())).collect();
    let _ = writeln!(out, "renegotiations  {}", reneg.join(", "));
    out
}

pub const SWEEP_HEADER: &str = "parameter,value,seed,sla_violation_rate,total_payments,replicas_placed,auctions_opened,auctions_awarded,total_penalty_load,mean_latency_ms";

pub fn sweep_row(parameter: &str, value: f64, seed: u64, m: &Metrics) -> String {
    format!(
        "{parameter},{value},{seed},{},{},{},{},{},{},{}",
        m.sla_violation_rate,
        m.total_payments,
        m.replicas_placed,
        m.auctions_opened,
        m.auctions_awarded,
        m.total_penalty_load,
        m.mean_latency_ms
    )
}

pub fn predictor_csv(report: &PredictorReport) -> String {
    let mut out = String::from("auction,time_s,content,duration_s,horizon,empirical,binomial,zipf,realized\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.auction, r.time, r.content, r.duration, r.horizon, r.empirical, r.binomial, r.zipf, r.realized
        );
    }
    out
}

pub fn mae_csv(report: &PredictorReport) -> String {
    let n = report.rows.len();
    format!(
        "predictor,mae,rows\nempirical,{},{n}\nbinomial,{},{n}\nzipf,{},{n}\n",
        report.mae_empirical, report.mae_binomial, report.mae_zipf
    )
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}
