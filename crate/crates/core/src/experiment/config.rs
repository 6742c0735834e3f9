use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    Grid,
    LinearWireless,
    LinearWired,
}

impl Topology {
    pub fn is_linear(self) -> bool {
        !matches!(self, Topology::Grid)
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(Topology::Grid),
            "linear-wireless" => Ok(Topology::LinearWireless),
            "linear-wired" => Ok(Topology::LinearWired),
            _ => Err(Error::Config(format!("unknown topology {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Traffic {
    #[serde(rename = "one-to-one", alias = "1-1")]
    OneToOne,
    #[serde(rename = "many-to-one", alias = "m-1")]
    ManyToOne,
    #[serde(rename = "many-to-many", alias = "m-m")]
    ManyToMany,
}

impl Traffic {
    pub fn short(self) -> &'static str {
        match self {
            Traffic::OneToOne => "1-1",
            Traffic::ManyToOne => "m-1",
            Traffic::ManyToMany => "m-m",
        }
    }
}

impl FromStr for Traffic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-to-one" | "1-1" => Ok(Traffic::OneToOne),
            "many-to-one" | "m-1" => Ok(Traffic::ManyToOne),
            "many-to-many" | "m-m" => Ok(Traffic::ManyToMany),
            _ => Err(Error::Config(format!("unknown traffic mode {s:?}"))),
        }
    }
}

impl fmt::Display for Traffic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

/// One experiment cell. Unset optional fields take topology- or
/// traffic-dependent defaults, see the `effective_*` accessors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Free-form label echoed into the CSV; derived from cwl/dil when empty.
    pub scenario: String,
    pub topology: Topology,
    pub nodes: usize,
    /// m/s
    pub speed: f64,
    /// seconds
    pub duration: f64,
    pub traffic: Traffic,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consumers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub producers: Option<usize>,
    pub cs: usize,
    pub cwl: bool,
    pub dil: bool,
    pub gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload: Option<u32>,
    pub bottleneck: bool,
    pub p_byte_error: f64,
    pub p_frame_error: f64,
    pub seed: u64,
    pub runs: usize,

    pub spacing: f64,
    /// Uniform offset of initial grid positions, metres per axis. 0 keeps the exact grid.
    pub jitter: f64,
    pub tx_radius: f64,
    pub arena_width: f64,
    pub arena_height: f64,
    /// Random-walk leg length, seconds.
    pub walk_leg: f64,
    pub bitrate: u64,
    pub queue: usize,
    pub backoff_slots: u32,
    pub slot_us: u64,
    pub retry_limit: u32,
    /// Interest lifetime when DIL is off, seconds.
    pub lifetime: f64,
    pub initial_rto: f64,
    pub min_rto: f64,
    pub max_rto: f64,
    pub suppression_ms: f64,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub consumer_nodes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub producer_nodes: Option<Vec<usize>>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: String::new(),
            topology: Topology::Grid,
            nodes: 50,
            speed: 0.0,
            duration: 100.0,
            traffic: Traffic::OneToOne,
            consumers: None,
            producers: None,
            cs: 200,
            cwl: false,
            dil: false,
            gamma: 2.0,
            payload: None,
            bottleneck: false,
            p_byte_error: 0.0,
            p_frame_error: 0.0,
            seed: 1,
            runs: 10,
            spacing: 100.0,
            jitter: 0.0,
            tx_radius: 125.0,
            arena_width: 1500.0,
            arena_height: 1000.0,
            walk_leg: 5.0,
            bitrate: 1_000_000,
            queue: 25,
            backoff_slots: 64,
            slot_us: 20,
            retry_limit: 3,
            lifetime: 2.0,
            initial_rto: 2.0,
            min_rto: 0.2,
            max_rto: 60.0,
            suppression_ms: 20.0,
            consumer_nodes: None,
            producer_nodes: None,
        }
    }
}

/// Pinned endpoint positions, loaded with `--placement-file`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementFile {
    pub consumers: Vec<usize>,
    pub producers: Vec<usize>,
}

impl PlacementFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        toml::from_str(&text).map_err(|source| Error::ConfigParse {
            path: path.to_owned(),
            source,
        })
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let cfg: ScenarioConfig = toml::from_str(&text).map_err(|source| Error::ConfigParse {
            path: path.to_owned(),
            source,
        })?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn label(&self) -> String {
        if !self.scenario.is_empty() {
            return self.scenario.clone();
        }
        match (self.cwl, self.dil) {
            (false, false) => "nocwl",
            (true, false) => "cwl",
            (true, true) => "cwl/dil",
            (false, true) => "dil",
        }
        .to_owned()
    }

    pub fn effective_consumers(&self) -> usize {
        self.consumers.unwrap_or(if self.topology.is_linear() { 1 } else { 10 })
    }

    pub fn effective_producers(&self) -> usize {
        self.producers.unwrap_or(match (self.topology.is_linear(), self.traffic) {
            (true, _) => 1,
            (false, Traffic::ManyToOne) => 2,
            (false, _) => 10,
        })
    }

    pub fn effective_payload(&self) -> u32 {
        self.payload.unwrap_or(match self.topology {
            Topology::LinearWired => 1460,
            _ => 512,
        })
    }

    pub fn grid_shape(&self) -> (usize, usize) {
        (self.nodes / 10, 10)
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.effective_consumers();
        let p = self.effective_producers();
        match self.topology {
            Topology::Grid => check(self.nodes >= 10 && self.nodes.is_multiple_of(10), || {
                format!("grid needs a multiple of 10 nodes, got {}", self.nodes)
            })?,
            Topology::LinearWireless => check((2..=100).contains(&self.nodes), || {
                format!("linear chain length must be 2..=100, got {}", self.nodes)
            })?,
            Topology::LinearWired => check((2..=10).contains(&self.nodes), || {
                format!("wired chain length must be 2..=10, got {}", self.nodes)
            })?,
        }
        check((0.0..=8.0).contains(&self.speed), || format!("speed {} outside 0..=8 m/s", self.speed))?;
        check(
            self.speed == 0.0 || self.topology == Topology::Grid,
            || "mobility is only supported on the grid topology".into(),
        )?;
        check(self.duration > 0.0 && self.duration <= 1e5, || {
            format!("duration {} outside (0, 1e5] s", self.duration)
        })?;
        check(self.gamma >= 1.0 && self.gamma <= 10.0, || format!("gamma {} outside [1, 10]", self.gamma))?;
        for (k, v) in [("p_byte_error", self.p_byte_error), ("p_frame_error", self.p_frame_error)] {
            check((0.0..=1.0).contains(&v), || format!("{k} {v} outside [0, 1]"))?;
        }
        check(self.cs <= 1_000_000, || format!("cs {} too large", self.cs))?;
        check(self.seed.checked_add(self.runs as u64).is_some_and(|s| s <= i64::MAX as u64), || {
            format!("seed {} too large", self.seed)
        })?;
        check(self.runs >= 1 && self.runs <= 10_000, || format!("runs {} outside 1..=10000", self.runs))?;
        check(self.effective_payload() >= 1 && self.effective_payload() <= 9000, || {
            format!("payload {} outside 1..=9000", self.effective_payload())
        })?;
        check(self.spacing > 0.0 && self.tx_radius > 0.0, || "spacing and tx_radius must be positive".into())?;
        check(self.arena_width > 0.0 && self.arena_height > 0.0, || "arena must be non-empty".into())?;
        if self.topology == Topology::Grid {
            let (rows, cols) = self.grid_shape();
            check(
                (cols - 1) as f64 * self.spacing <= self.arena_width && (rows - 1) as f64 * self.spacing <= self.arena_height,
                || "grid does not fit in the arena".into(),
            )?;
        }
        check(self.jitter >= 0.0 && self.jitter <= self.spacing / 2.0, || {
            format!("jitter {} outside 0..=spacing/2", self.jitter)
        })?;
        check(self.jitter == 0.0 || self.topology == Topology::Grid, || "jitter applies to the grid only".into())?;
        check(self.walk_leg > 0.0, || "walk_leg must be positive".into())?;
        check(self.bitrate > 0, || "bitrate must be positive".into())?;
        check(self.queue >= 1, || "queue must hold at least one frame".into())?;
        check(self.backoff_slots >= 1 && self.slot_us >= 1, || "backoff window must be non-empty".into())?;
        check(self.retry_limit <= 16, || format!("retry_limit {} above 16", self.retry_limit))?;
        check(self.lifetime > 0.0, || "lifetime must be positive".into())?;
        check(
            self.min_rto > 0.0 && self.min_rto <= self.max_rto && self.initial_rto > 0.0,
            || "RTO bounds must satisfy 0 < min_rto <= max_rto".into(),
        )?;
        check(self.suppression_ms >= 0.0, || "suppression_ms must be non-negative".into())?;

        check(c >= 1 && p >= 1, || "need at least one consumer and one producer".into())?;
        check(c + p <= self.nodes, || {
            format!("{c} consumers + {p} producers exceed {} nodes", self.nodes)
        })?;
        if self.topology.is_linear() {
            check(c == 1 && p == 1 && self.traffic == Traffic::OneToOne, || {
                "linear topologies carry a single one-to-one flow".into()
            })?;
        }
        match self.traffic {
            Traffic::OneToOne => check(c == p, || format!("one-to-one needs equal counts, got {c} and {p}"))?,
            Traffic::ManyToOne => check(p == 2 && c.is_multiple_of(2), || {
                format!("many-to-one needs 2 producers and an even consumer count, got {p} and {c}")
            })?,
            Traffic::ManyToMany => check(p.is_multiple_of(2) && c.is_multiple_of(2), || {
                format!("many-to-many needs even consumer and producer counts, got {c} and {p}")
            })?,
        }
        if let Some(nodes) = &self.consumer_nodes {
            check(nodes.len() == c, || format!("consumer_nodes lists {} nodes, need {c}", nodes.len()))?;
        }
        if let Some(nodes) = &self.producer_nodes {
            check(nodes.len() == p, || format!("producer_nodes lists {} nodes, need {p}", nodes.len()))?;
        }
        if self.consumer_nodes.is_some() || self.producer_nodes.is_some() {
            let mut all: Vec<usize> = self
                .consumer_nodes
                .iter()
                .chain(self.producer_nodes.iter())
                .flatten()
                .copied()
                .collect();
            check(all.iter().all(|&n| n < self.nodes), || "placement node out of range".into())?;
            all.sort_unstable();
            let len = all.len();
            all.dedup();
            check(all.len() == len, || "placement assigns two applications to one node".into())?;
        }
        Ok(())
    }
}
