use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use super::metrics::{fixed, MetricsRecord};
use super::traffic::build_traffic;
use super::{ScenarioConfig, Topology};
use crate::invariants::Violations;
use crate::mac::{WiredLink, WirelessConfig};
use crate::ndn::{default_cm_threshold, ForwarderConfig};
use crate::sim::{RandomStream, SimTime};
use crate::topology::{grid_topology, jitter_positions, linear_topology, Arena};
use crate::transport::{ConsumerConfig, RtoParams, TraceRecord};
use crate::world::{Layout, World, WorldOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub audit: bool,
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub consumer: usize,
    pub record: TraceRecord,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: MetricsRecord,
    pub violations: Violations,
    pub trace: Vec<TraceRow>,
}

impl ScenarioConfig {
    pub fn rto_params(&self) -> RtoParams {
        RtoParams {
            initial: self.initial_rto,
            min: self.min_rto,
            max: self.max_rto,
        }
    }

    pub fn world_options(&self, seed: u64, run: RunOptions) -> WorldOptions {
        let mac = WirelessConfig {
            bitrate: self.bitrate,
            slot: SimTime::from_micros(self.slot_us),
            backoff_slots: self.backoff_slots,
            queue_capacity: self.queue,
            retry_limit: self.retry_limit,
            p_frame_error: self.p_frame_error,
        };
        WorldOptions {
            seed,
            mac,
            forwarder: ForwarderConfig {
                suppression_interval: SimTime::from_secs_f64(self.suppression_ms / 1e3),
                cs_capacity: self.cs,
                fib_rto: self.rto_params(),
                ..ForwarderConfig::default()
            },
            cm_threshold: default_cm_threshold(self.queue),
            audit: run.audit,
            trace: run.trace,
            pit_log: false,
        }
    }

    /// Network layout for one run; `seed` only matters for jittered grids.
    pub fn layout(&self, seed: u64) -> Layout {
        match self.topology {
            Topology::Grid => {
                let (rows, cols) = self.grid_shape();
                let arena = Arena::new(self.arena_width, self.arena_height, self.tx_radius);
                let mut positions = grid_topology(rows, cols, self.spacing);
                let mut rng = RandomStream::derive(seed, "placement.jitter");
                jitter_positions(&mut positions, self.jitter, &arena, &mut rng);
                Layout::Radio {
                    positions,
                    arena,
                    speed: self.speed,
                    leg: SimTime::from_secs_f64(self.walk_leg),
                }
            }
            Topology::LinearWireless => {
                let length = (self.nodes - 1) as f64 * self.spacing;
                Layout::Radio {
                    positions: linear_topology(self.nodes, self.spacing),
                    arena: Arena::new(self.arena_width.max(length), self.arena_height, self.tx_radius),
                    speed: 0.0,
                    leg: SimTime::from_secs_f64(self.walk_leg),
                }
            }
            Topology::LinearWired => {
                let mid = (self.nodes - 2) / 2;
                Layout::Wired(
                    (0..self.nodes - 1)
                        .map(|i| {
                            let link = if self.bottleneck && i == mid {
                                WiredLink::bottleneck()
                            } else {
                                WiredLink::access()
                            };
                            (i, i + 1, link.with_byte_error(self.p_byte_error))
                        })
                        .collect(),
                )
            }
        }
    }

    pub fn consumer_config(&self, prefix: crate::ndn::Name) -> ConsumerConfig {
        ConsumerConfig {
            cwl_enabled: self.cwl,
            dil_enabled: self.dil,
            gamma: self.gamma,
            fixed_lifetime: self.lifetime,
            rto: self.rto_params(),
            ..ConsumerConfig::new(prefix)
        }
    }
}

pub fn build_world(cfg: &ScenarioConfig, seed: u64, run: RunOptions) -> Result<World> {
    let plan = build_traffic(cfg, seed)?;
    let mut world = World::new(cfg.layout(seed), cfg.world_options(seed, run));
    let payload = cfg.effective_payload();
    for p in &plan.producers {
        world.add_producer(p.node, p.prefix.clone(), payload);
    }
    for c in &plan.consumers {
        world.add_consumer(c.node, cfg.consumer_config(c.prefix.clone()), SimTime::ZERO);
    }
    Ok(world)
}

pub fn run_once(cfg: &ScenarioConfig, seed: u64, run: RunOptions) -> Result<RunOutput> {
    let mut world = build_world(cfg, seed, run)?;
    world.run(SimTime::from_secs_f64(cfg.duration));
    let record = MetricsRecord::from_totals(cfg, seed, &world.totals());
    let trace = world
        .traces()
        .into_iter()
        .map(|(consumer, r)| TraceRow {
            consumer,
            record: r.clone(),
        })
        .collect();
    Ok(RunOutput {
        record,
        violations: world.violations(),
        trace,
    })
}

/// `cfg.runs` independent runs with seeds `seed, seed + 1, ...`, in seed order.
pub fn run_experiment_with(cfg: &ScenarioConfig, run: RunOptions) -> Result<Vec<RunOutput>> {
    cfg.validate()?;
    (0..cfg.runs as u64)
        .into_par_iter()
        .map(|i| run_once(cfg, cfg.seed + i, run))
        .collect()
}

pub fn run_experiment(cfg: &ScenarioConfig) -> Result<Vec<MetricsRecord>> {
    Ok(run_experiment_with(cfg, RunOptions::default())?
        .into_iter()
        .map(|o| o.record)
        .collect())
}

pub fn write_trace<W: Write>(outputs: &[RunOutput], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["seed", "time", "consumer", "cwnd", "rtt", "event"])?;
    for o in outputs {
        for row in &o.trace {
            let r = &row.record;
            w.write_record([
                o.record.seed.to_string(),
                fixed(r.time.as_secs_f64()),
                row.consumer.to_string(),
                fixed(r.cwnd),
                r.srtt.map(fixed).unwrap_or_default(),
                r.event.as_str().to_owned(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_trace(outputs: &[RunOutput], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    write_trace(outputs, std::io::BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_owned(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ScenarioConfig {
        ScenarioConfig::parse(text).unwrap()
    }

    #[test]
    fn runs_yield_one_record_per_seed() {
        let c = cfg("duration = 2.0\nruns = 3\nseed = 40\nconsumers = 2\nproducers = 2");
        let recs = run_experiment(&c).unwrap();
        assert_eq!(recs.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![40, 41, 42]);
        assert_eq!(recs, run_experiment(&c).unwrap());
    }

    #[test]
    fn wired_pair_below_link_capacity() {
        let c = cfg("topology = \"linear-wired\"\nnodes = 2\nduration = 1.0\nruns = 1");
        let r = &run_experiment(&c).unwrap()[0];
        assert!(r.throughput_mbps > 0.0 && r.throughput_mbps <= 5.0, "{}", r.throughput_mbps);
    }

    #[test]
    fn bottleneck_limits_wired_chain() {
        let c = cfg("topology = \"linear-wired\"\nnodes = 4\nduration = 5.0\nruns = 1\nbottleneck = true");
        let r = &run_experiment(&c).unwrap()[0];
        assert!(r.throughput_mbps > 0.1 && r.throughput_mbps <= 1.0, "{}", r.throughput_mbps);
    }

    #[test]
    fn invalid_config_fails_before_running() {
        let c = cfg("speed = 20.0");
        assert!(matches!(run_experiment(&c), Err(Error::Config(_))));
    }
}
