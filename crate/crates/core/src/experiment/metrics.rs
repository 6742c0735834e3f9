use std::io::Write;
use std::path::Path;

use super::stats::{mean_std, MeanStd};
use super::{ScenarioConfig, Topology};
use crate::world::RunTotals;
use crate::{Error, Result};

/// Scalars of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub scenario: String,
    pub topology: String,
    pub traffic: String,
    pub speed: f64,
    pub cs: usize,
    pub cwl: bool,
    pub dil: bool,
    pub seed: u64,
    pub throughput_mbps: f64,
    pub mean_cwnd: f64,
    pub mean_rtt_ms: Option<f64>,
    pub data_broadcasts: u64,
    pub mean_hop_count: Option<f64>,
    pub cache_hits: u64,
    pub collisions: u64,
    pub queue_drops: u64,
    pub pit_aggregations: u64,
    pub duplicates: u64,
    pub interests_sent: u64,
    pub timeouts: u64,
    pub unique_data: u64,
}

pub const CSV_HEADER: [&str; 21] = [
    "scenario",
    "topology",
    "traffic",
    "speed",
    "cs",
    "cwl",
    "dil",
    "seed",
    "throughput_mbps",
    "mean_cwnd",
    "mean_rtt_ms",
    "data_broadcasts",
    "mean_hop_count",
    "cache_hits",
    "collisions",
    "queue_drops",
    "pit_aggregations",
    "duplicates",
    "interests_sent",
    "timeouts",
    "unique_data",
];

/// Mbps from unique application bytes over the run duration.
pub fn throughput_mbps(unique_bytes: u64, duration: f64) -> f64 {
    unique_bytes as f64 * 8.0 / duration / 1e6
}

pub fn fixed(x: f64) -> String {
    format!("{x:.6}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fixed).unwrap_or_default()
}

impl MetricsRecord {
    pub fn from_totals(cfg: &ScenarioConfig, seed: u64, t: &RunTotals) -> Self {
        let topology = match cfg.topology {
            Topology::Grid => "grid",
            Topology::LinearWireless => "linear-wireless",
            Topology::LinearWired => "linear-wired",
        };
        MetricsRecord {
            scenario: cfg.label(),
            topology: topology.to_owned(),
            traffic: cfg.traffic.short().to_owned(),
            speed: cfg.speed,
            cs: cfg.cs,
            cwl: cfg.cwl,
            dil: cfg.dil,
            seed,
            throughput_mbps: throughput_mbps(t.unique_bytes, t.duration),
            mean_cwnd: t.mean_cwnd,
            mean_rtt_ms: t.mean_rtt.map(|s| s * 1e3),
            data_broadcasts: t.forwarder.data_broadcasts,
            mean_hop_count: t.mean_hops,
            cache_hits: t.forwarder.cache_hits,
            collisions: t.mac.collisions,
            queue_drops: t.mac.queue_drops,
            pit_aggregations: t.forwarder.pit_aggregations,
            duplicates: t.duplicates,
            interests_sent: t.interests_sent,
            timeouts: t.timeouts,
            unique_data: t.unique_data,
        }
    }

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.scenario.clone(),
            self.topology.clone(),
            self.traffic.clone(),
            fixed(self.speed),
            self.cs.to_string(),
            self.cwl.to_string(),
            self.dil.to_string(),
            self.seed.to_string(),
            fixed(self.throughput_mbps),
            fixed(self.mean_cwnd),
            opt(self.mean_rtt_ms),
            self.data_broadcasts.to_string(),
            opt(self.mean_hop_count),
            self.cache_hits.to_string(),
            self.collisions.to_string(),
            self.queue_drops.to_string(),
            self.pit_aggregations.to_string(),
            self.duplicates.to_string(),
            self.interests_sent.to_string(),
            self.timeouts.to_string(),
            self.unique_data.to_string(),
        ]
    }

    /// Numeric metric columns, in CSV order.
    pub fn metrics(&self) -> Vec<(&'static str, Option<f64>)> {
        vec![
            ("throughput_mbps", Some(self.throughput_mbps)),
            ("mean_cwnd", Some(self.mean_cwnd)),
            ("mean_rtt_ms", self.mean_rtt_ms),
            ("data_broadcasts", Some(self.data_broadcasts as f64)),
            ("mean_hop_count", self.mean_hop_count),
            ("cache_hits", Some(self.cache_hits as f64)),
            ("collisions", Some(self.collisions as f64)),
            ("queue_drops", Some(self.queue_drops as f64)),
            ("pit_aggregations", Some(self.pit_aggregations as f64)),
            ("duplicates", Some(self.duplicates as f64)),
            ("interests_sent", Some(self.interests_sent as f64)),
            ("timeouts", Some(self.timeouts as f64)),
            ("unique_data", Some(self.unique_data as f64)),
        ]
    }
}

pub fn write_csv<W: Write>(records: &[MetricsRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[MetricsRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    write_csv(records, std::io::BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_owned(),
        source,
    })
}

/// Mean and sample standard deviation per metric column. Runs without a
/// value for a column (no RTT sample, say) are left out of that column.
pub fn summarize(records: &[MetricsRecord]) -> Result<Vec<(&'static str, MeanStd)>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let names: Vec<&'static str> = records[0].metrics().iter().map(|(k, _)| *k).collect();
    let mut out = Vec::new();
    for (i, name) in names.into_iter().enumerate() {
        let xs: Vec<f64> = records.iter().filter_map(|r| r.metrics()[i].1).collect();
        if let Ok(ms) = mean_std(&xs) {
            out.push((name, ms));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(seed: u64, tput: f64) -> MetricsRecord {
        MetricsRecord {
            scenario: "cwl/dil".into(),
            topology: "grid".into(),
            traffic: "1-1".into(),
            speed: 0.0,
            cs: 200,
            cwl: true,
            dil: true,
            seed,
            throughput_mbps: tput,
            mean_cwnd: 2.5,
            mean_rtt_ms: Some(40.0),
            data_broadcasts: 3,
            mean_hop_count: None,
            cache_hits: 1,
            collisions: 2,
            queue_drops: 0,
            pit_aggregations: 4,
            duplicates: 0,
            interests_sent: 10,
            timeouts: 1,
            unique_data: 9,
        }
    }

    #[test]
    fn throughput_formatting() {
        assert_eq!(fixed(throughput_mbps(640_000, 100.0)), "0.051200");
    }

    #[test]
    fn csv_has_header_plus_rows() {
        let recs: Vec<_> = (0..10).map(|s| record(s, 0.5)).collect();
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 11);
        assert!(text.starts_with("scenario,topology,traffic,speed,cs,cwl,dil,seed,throughput_mbps"));
        assert!(text.lines().nth(1).unwrap().contains(",3,,1,"), "{text}");
    }

    #[test]
    fn summary_mean_and_std() {
        let recs = [record(1, 0.4), record(2, 0.6)];
        let s = summarize(&recs).unwrap();
        let (name, t) = s[0];
        assert_eq!(name, "throughput_mbps");
        assert!((t.mean - 0.5).abs() < 1e-12);
        assert!(!s.iter().any(|(k, _)| *k == "mean_hop_count"));
        assert!(summarize(&[]).is_err());
    }
}
