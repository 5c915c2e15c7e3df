//! The four commands, independent of argument parsing.

use std::path::Path;

use cdnpeer_core::sim::{compare_predictors, render_log, LogRecord, Metrics, PredictorReport, SimConfig, World};
use serde_json::Value;

use crate::output::{self, RunHeader};
use crate::scenario::{self, LoadedScenario};
use crate::CliError;

/// Flags shared by every command.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub no_auction: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub header: RunHeader,
    pub records: Vec<LogRecord>,
    pub log: String,
    pub metrics: Metrics,
    pub config: SimConfig,
}

fn prepare(loaded: &LoadedScenario, overrides: Overrides) -> Result<(SimConfig, RunHeader), CliError> {
    let mut config = loaded.scenario.checked_config()?;
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    config.auctions_enabled = !overrides.no_auction;
    let header = RunHeader {
        scenario: loaded.scenario.name.clone(),
        scenario_hash: loaded.hash.clone(),
        seed: config.seed,
        auctions: config.auctions_enabled,
    };
    Ok((config, header))
}

/// Run a validated config. Metrics come from the rendered log read back,
/// so they match what a reader of `events.log` would compute.
pub fn execute(config: SimConfig, header: RunHeader) -> Result<RunOutput, CliError> {
    let world = World::new(config.clone()).map_err(|e| CliError::Invalid(e.0))?;
    let records = world.run();
    let log = render_log(&records);
    let reread = cdnpeer_core::sim::parse_log(&log).map_err(|e| CliError::Io(format!("event log: {e}")))?;
    let metrics = Metrics::from_log(&reread);
    Ok(RunOutput { header, records, log, metrics, config })
}

pub fn validate(path: &Path) -> Result<(), CliError> {
    let loaded = scenario::load(path)?;
    let problems = loaded.scenario.validate();
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invalid(problems))
    }
}

pub fn run(path: &Path, out: &Path, overrides: Overrides) -> Result<RunOutput, CliError> {
    let loaded = scenario::load(path)?;
    let (config, header) = prepare(&loaded, overrides)?;
    output::ensure_dir(out)?;
    let result = execute(config, header)?;
    output::write(out, "events.log", &result.log)?;
    output::write(out, "metrics.txt", &output::metrics_text(&result.header, &result.metrics))?;
    output::write(out, "metrics.csv", &output::metrics_csv(&result.header, &result.metrics))?;
    output::write(out, "metrics.json", &output::metrics_json(&result.header, &result.metrics))?;
    Ok(result)
}

/// Set the number at `path` (dot separated; array indices allowed).
pub fn set_parameter(doc: &mut Value, path: &str, value: f64) -> Result<(), CliError> {
    let mut at = doc;
    for part in path.split('.') {
        at = match at {
            Value::Object(map) => map.get_mut(part),
            Value::Array(items) => part.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| CliError::Usage(format!("parameter path {path} does not exist")))?;
    }
    let Value::Number(n) = at else {
        return Err(CliError::Usage(format!("parameter {path} is not numeric")));
    };
    *at = if (n.is_u64() || n.is_i64()) && value.fract() == 0.0 {
        Value::from(value as i64)
    } else {
        serde_json::Number::from_f64(value)
            .map(Value::Number)
            .ok_or_else(|| CliError::Usage(format!("value {value} is not a finite number")))?
    };
    Ok(())
}

pub fn parse_values(list: &str) -> Result<Vec<f64>, CliError> {
    let values: Vec<f64> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| CliError::Usage(format!("value {s} is not a number"))))
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(CliError::Usage("the values list is empty".to_string()));
    }
    Ok(values)
}

/// One run per value, each in its own thread and world. Rows come back in
/// value order.
pub fn sweep(
    path: &Path,
    parameter: &str,
    values: &[f64],
    out: &Path,
    overrides: Overrides,
) -> Result<Vec<(f64, Metrics)>, CliError> {
    if values.is_empty() {
        return Err(CliError::Usage("the values list is empty".to_string()));
    }
    let loaded = scenario::load(path)?;
    let mut jobs = Vec::new();
    for &v in values {
        let mut doc = loaded.raw.clone();
        set_parameter(&mut doc, parameter, v)?;
        let scenario = scenario::from_value(doc).map_err(|e| CliError::Parse(format!("{parameter}={v}: {e}")))?;
        let variant = LoadedScenario { scenario, raw: Value::Null, hash: loaded.hash.clone() };
        jobs.push((v, prepare(&variant, overrides)?));
    }
    output::ensure_dir(out)?;
    let results: Vec<Result<(f64, Metrics), CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .into_iter()
            .map(|(v, (config, header))| s.spawn(move || execute(config, header).map(|r| (v, r.metrics))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let rows: Vec<(f64, Metrics)> = results.into_iter().collect::<Result<_, _>>()?;
    let seed = overrides.seed.unwrap_or(loaded.scenario.seed);
    let mut csv = String::from(output::SWEEP_HEADER);
    csv.push('\n');
    for (v, m) in &rows {
        csv.push_str(&output::sweep_row(parameter, *v, seed, m));
        csv.push('\n');
    }
    output::write(out, "sweep.csv", &csv)?;
    Ok(rows)
}

pub fn compare(path: &Path, out: &Path, overrides: Overrides) -> Result<PredictorReport, CliError> {
    let loaded = scenario::load(path)?;
    let (config, header) = prepare(&loaded, overrides)?;
    output::ensure_dir(out)?;
    let horizon = config.workload.duration;
    let result = execute(config, header)?;
    let report = compare_predictors(&result.records, horizon);
    output::write(out, "predictors.csv", &output::predictor_csv(&report))?;
    output::write(out, "predictor_mae.csv", &output::mae_csv(&report))?;
    Ok(report)
}
