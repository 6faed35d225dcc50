use std::fmt::Write as _;
use std::time::Duration;

use serde_json::{json, Map, Value};

use super::config::ExperimentConfig;

/// Outcome of one command: a provenance header, one record per seed (or
/// per item), an aggregate, and optionally a primary artifact such as an
/// order window file.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub command: &'static str,
    pub header: Map<String, Value>,
    pub records: Vec<Value>,
    pub aggregate: Map<String, Value>,
    /// Number of unmet expectations (failed seeds, failed checks).
    pub failures: usize,
    pub artifact: Option<String>,
    /// Only shown in the human summary; never part of the record stream.
    pub wall_clock: Duration,
}

impl RunReport {
    pub fn new(command: &'static str, cfg: &ExperimentConfig) -> Self {
        let mut header = Map::new();
        header.insert("command".into(), json!(command));
        header.insert("group".into(), json!(cfg.get("group")));
        header.insert(
            "enumeration".into(),
            json!(cfg.groups.iter().map(|g| g.enumeration_name()).collect::<Vec<_>>().join(",")),
        );
        header.insert("sampler".into(), json!(cfg.family.name()));
        header.insert("sampler_seed".into(), json!(cfg.sampler_seed));
        header.insert("seeds".into(), json!(cfg.seeds.text()));
        header.insert("K".into(), json!(cfg.horizon));
        header.insert("N".into(), json!(cfg.depth));
        let echo: Map<String, Value> = super::config::KEYS
            .iter()
            .filter(|&&k| k != "output")
            .filter_map(|&k| cfg.get(k).map(|v| (k.to_string(), json!(v))))
            .collect();
        header.insert("config".into(), Value::Object(echo));
        RunReport {
            command,
            header,
            records: Vec::new(),
            aggregate: Map::new(),
            failures: 0,
            artifact: None,
            wall_clock: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// The record stream: header, items, aggregate; one JSON object per line.
    /// Identical configs give identical streams.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut line = |kind: &str, body: &Map<String, Value>| {
            let mut m = Map::new();
            m.insert("record".into(), json!(kind));
            m.extend(body.clone());
            out.push_str(&Value::Object(m).to_string());
            out.push('\n');
        };
        line("header", &self.header);
        for r in &self.records {
            match r {
                Value::Object(m) => line("item", m),
                other => line("item", &Map::from_iter([("value".to_string(), other.clone())])),
            }
        }
        let mut agg = self.aggregate.clone();
        agg.insert("failures".into(), json!(self.failures));
        agg.insert("expectations_met".into(), json!(self.passed()));
        line("aggregate", &agg);
        out
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let h = |k: &str| self.header.get(k).map(plain).unwrap_or_default();
        let _ = writeln!(
            s,
            "{}: group={} enumeration={} sampler={} seeds={} K={} N={}",
            self.command,
            h("group"),
            h("enumeration"),
            h("sampler"),
            h("seeds"),
            h("K"),
            h("N")
        );
        for (k, v) in &self.aggregate {
            let _ = writeln!(s, "  {k}: {}", plain(v));
        }
        let _ = writeln!(
            s,
            "  result: {} ({} unmet expectation{})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.failures,
            if self.failures == 1 { "" } else { "s" }
        );
        let _ = writeln!(s, "  wall-clock: {:.3}s", self.wall_clock.as_secs_f64());
        s
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
