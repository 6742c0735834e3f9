//! One simulation run: nodes with forwarders and applications attached to a
//! wireless or wired medium, driven by a single event queue.

use std::collections::VecDeque;

use crate::invariants::Violations;
use crate::mac::{Delivery, Frame, MacEvent, MacStats, Reachability, WiredLink, WiredNetwork, WirelessChannel, WirelessConfig};
use crate::ndn::{default_cm_threshold, mark_congestion, Action, Data, Face, Forwarder, ForwarderConfig, ForwarderStats, LinkDst, Name, Packet};
use crate::sim::{Engine, RandomStream, SimTime};
use crate::topology::{Arena, NodeKinematics, Position, RandomWalk};
use crate::transport::{Consumer, ConsumerConfig, Express, Producer, TraceRecord};
use crate::NodeId;

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Mac(MacEvent),
    PitExpire { node: NodeId, name: Name, at: SimTime },
    ConsumerStart { node: NodeId },
    ConsumerTimeout { node: NodeId, seq: u64, token: u64 },
    Mobility { node: NodeId },
    Jam { node: NodeId, duration: SimTime },
    AuditTick,
}

impl From<MacEvent> for Event {
    fn from(ev: MacEvent) -> Self {
        Event::Mac(ev)
    }
}

/// How nodes are connected.
#[derive(Debug, Clone)]
pub enum Layout {
    /// Unit-disk radio over positions, optionally moving by random walk.
    Radio {
        positions: Vec<Position>,
        arena: Arena,
        speed: f64,
        leg: SimTime,
    },
    /// Radio with a hand-written, static reachability relation.
    FixedRadio(Vec<Vec<NodeId>>),
    /// Point-to-point links.
    Wired(Vec<(NodeId, NodeId, WiredLink)>),
}

#[derive(Debug, Clone)]
pub struct WorldOptions {
    pub seed: u64,
    pub mac: WirelessConfig,
    pub forwarder: ForwarderConfig,
    pub cm_threshold: usize,
    pub audit: bool,
    pub trace: bool,
    pub pit_log: bool,
}

impl WorldOptions {
    pub fn new(seed: u64) -> Self {
        let mac = WirelessConfig::default();
        WorldOptions {
            seed,
            mac,
            forwarder: ForwarderConfig::default(),
            cm_threshold: default_cm_threshold(mac.queue_capacity),
            audit: false,
            trace: false,
            pit_log: false,
        }
    }
}

enum Geometry {
    Moving {
        arena: Arena,
        kin: Vec<NodeKinematics>,
        walk: Option<RandomWalk>,
    },
    Fixed(Vec<Vec<NodeId>>),
}

impl Reachability for Geometry {
    fn node_count(&self) -> usize {
        match self {
            Geometry::Moving { kin, .. } => kin.len(),
            Geometry::Fixed(adj) => adj.len(),
        }
    }

    fn neighbors(&self, node: NodeId, now: SimTime) -> Vec<NodeId> {
        match self {
            Geometry::Moving { arena, kin, .. } => {
                let me = kin[node].position_at(now, arena);
                let r2 = arena.tx_radius * arena.tx_radius;
                (0..kin.len())
                    .filter(|&j| j != node && kin[j].position_at(now, arena).distance_sq(&me) <= r2)
                    .collect()
            }
            Geometry::Fixed(adj) => adj[node].clone(),
        }
    }
}

enum Medium {
    Radio { channel: WirelessChannel, geometry: Geometry },
    Wired(WiredNetwork),
}

enum App {
    Consumer(Box<Consumer>),
    Producer(Producer),
}

/// Aggregate counters of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTotals {
    pub duration: f64,
    pub unique_bytes: u64,
    pub unique_data: u64,
    pub mean_cwnd: f64,
    pub mean_rtt: Option<f64>,
    pub mean_hops: Option<f64>,
    pub duplicates: u64,
    pub interests_sent: u64,
    pub timeouts: u64,
    pub retransmissions: u64,
    pub forwarder: ForwarderStats,
    pub mac: MacStats,
}

pub struct World {
    engine: Engine<Event>,
    medium: Medium,
    forwarders: Vec<Forwarder>,
    apps: Vec<Option<App>>,
    consumer_nodes: Vec<NodeId>,
    passive: Vec<bool>,
    mobility_rngs: Vec<RandomStream>,
    opts: WorldOptions,
    ended_at: SimTime,
}

impl World {
    pub fn new(layout: Layout, opts: WorldOptions) -> Self {
        let seed = opts.seed;
        let mut mobility_rngs = Vec::new();
        let medium = match layout {
            Layout::Radio {
                positions,
                arena,
                speed,
                leg,
            } => {
                let n = positions.len();
                mobility_rngs = (0..n)
                    .map(|i| RandomStream::derive(seed, &format!("mobility.node{i}")))
                    .collect();
                let walk = (speed > 0.0).then(|| RandomWalk::new(speed, leg, arena));
                let kin = positions
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| match &walk {
                        Some(w) => w.start(p, SimTime::ZERO, &mut mobility_rngs[i]),
                        None => NodeKinematics::stationary(p),
                    })
                    .collect();
                Medium::Radio {
                    channel: WirelessChannel::new(opts.mac, n, seed),
                    geometry: Geometry::Moving { arena, kin, walk },
                }
            }
            Layout::FixedRadio(adj) => Medium::Radio {
                channel: WirelessChannel::new(opts.mac, adj.len(), seed),
                geometry: Geometry::Fixed(adj),
            },
            Layout::Wired(links) => {
                let n = links.iter().map(|&(a, b, _)| a.max(b) + 1).max().unwrap_or(0);
                let mut net = WiredNetwork::new(n, opts.mac.queue_capacity, seed);
                for (a, b, l) in links {
                    net.connect(a, b, l);
                }
                Medium::Wired(net)
            }
        };
        let n = match &medium {
            Medium::Radio { geometry, .. } => geometry.node_count(),
            Medium::Wired(net) => net.node_count(),
        };
        let forwarders = (0..n)
            .map(|i| {
                let mut f = Forwarder::new(i, opts.forwarder);
                if opts.pit_log {
                    f.enable_log();
                }
                if opts.audit {
                    f.enable_audit();
                }
                f
            })
            .collect();
        let mut engine = Engine::new();
        if let Medium::Radio {
            geometry: Geometry::Moving { kin, walk: Some(w), .. },
            ..
        } = &medium
        {
            for (node, k) in kin.iter().enumerate() {
                let at = w.next_event(k);
                if at != SimTime::MAX {
                    engine.schedule(at, Event::Mobility { node });
                }
            }
        }
        if opts.audit {
            engine.schedule(SimTime::from_secs(1), Event::AuditTick);
        }
        World {
            engine,
            medium,
            forwarders,
            apps: (0..n).map(|_| None).collect(),
            consumer_nodes: Vec::new(),
            passive: vec![false; n],
            mobility_rngs,
            opts,
            ended_at: SimTime::ZERO,
        }
    }

    pub fn node_count(&self) -> usize {
        self.forwarders.len()
    }

    pub fn now(&self) -> SimTime {
        self.engine.now()
    }

    pub fn add_consumer(&mut self, node: NodeId, cfg: ConsumerConfig, start: SimTime) {
        assert!(self.apps[node].is_none(), "node {node} already hosts an application");
        let rng = RandomStream::derive(self.opts.seed, &format!("app.nonce.node{node}"));
        let mut c = Consumer::new(cfg, rng);
        if self.opts.trace {
            c.enable_trace();
        }
        if self.opts.audit {
            c.enable_audit();
        }
        self.apps[node] = Some(App::Consumer(Box::new(c)));
        self.consumer_nodes.push(node);
        self.engine.schedule(start, Event::ConsumerStart { node });
    }

    pub fn add_producer(&mut self, node: NodeId, prefix: Name, payload: u32) {
        assert!(self.apps[node].is_none(), "node {node} already hosts an application");
        self.forwarders[node].register_producer(prefix.clone());
        self.apps[node] = Some(App::Producer(Producer::new(prefix, payload)));
    }

    /// The node still transmits (e.g. as a jammer) but ignores everything it hears.
    pub fn set_passive(&mut self, node: NodeId) {
        self.passive[node] = true;
    }

    /// Radio noise from `node` over `[at, at + duration)`.
    pub fn schedule_jam(&mut self, node: NodeId, at: SimTime, duration: SimTime) {
        self.engine.schedule(at, Event::Jam { node, duration });
    }

    pub fn forwarder(&self, node: NodeId) -> &Forwarder {
        &self.forwarders[node]
    }

    pub fn forwarder_mut(&mut self, node: NodeId) -> &mut Forwarder {
        &mut self.forwarders[node]
    }

    pub fn consumer(&self, node: NodeId) -> Option<&Consumer> {
        match self.apps.get(node)? {
            Some(App::Consumer(c)) => Some(c),
            _ => None,
        }
    }

    pub fn consumer_nodes(&self) -> &[NodeId] {
        &self.consumer_nodes
    }

    pub fn mac_stats(&self) -> MacStats {
        match &self.medium {
            Medium::Radio { channel, .. } => channel.stats(),
            Medium::Wired(net) => net.stats(),
        }
    }

    pub fn position(&self, node: NodeId) -> Option<Position> {
        match &self.medium {
            Medium::Radio {
                geometry: Geometry::Moving { arena, kin, .. },
                ..
            } => Some(kin[node].position_at(self.engine.now(), arena)),
            _ => None,
        }
    }

    pub fn run(&mut self, until: SimTime) {
        while let Some((now, ev)) = self.engine.next_until(until) {
            self.dispatch(now, ev);
        }
        self.engine.advance_to(until);
        self.ended_at = until;
        if self.opts.audit {
            for f in &mut self.forwarders {
                f.audit_pit_lifetimes(until);
            }
        }
    }

    pub fn violations(&self) -> Violations {
        let mut v = Violations::default();
        for f in &self.forwarders {
            v += f.violations();
        }
        for &n in &self.consumer_nodes {
            if let Some(c) = self.consumer(n) {
                v += c.violations();
            }
        }
        v
    }

    /// Per-consumer trace rows, consumers numbered in the order they were added.
    pub fn traces(&self) -> Vec<(usize, &TraceRecord)> {
        let mut out = Vec::new();
        for (i, &n) in self.consumer_nodes.iter().enumerate() {
            if let Some(c) = self.consumer(n) {
                out.extend(c.trace().iter().map(|r| (i, r)));
            }
        }
        out
    }

    pub fn totals(&self) -> RunTotals {
        let end = self.ended_at;
        let mut t = RunTotals {
            duration: end.as_secs_f64(),
            mac: self.mac_stats(),
            ..RunTotals::default()
        };
        let (mut rtt_sum, mut rtt_n, mut hop_sum, mut cwnd_sum) = (0.0, 0u64, 0u64, 0.0);
        let consumers: Vec<&Consumer> = self.consumer_nodes.iter().filter_map(|&n| self.consumer(n)).collect();
        for c in &consumers {
            let s = c.stats();
            t.unique_bytes += s.unique_bytes;
            t.unique_data += s.unique_data;
            t.duplicates += s.duplicates;
            t.interests_sent += s.interests_sent;
            t.timeouts += s.timeouts;
            t.retransmissions += s.retransmissions;
            rtt_sum += s.rtt_sum;
            rtt_n += s.rtt_samples;
            hop_sum += s.hop_sum;
            cwnd_sum += c.mean_cwnd(end);
        }
        if !consumers.is_empty() {
            t.mean_cwnd = cwnd_sum / consumers.len() as f64;
        }
        t.mean_rtt = (rtt_n > 0).then(|| rtt_sum / rtt_n as f64);
        t.mean_hops = (t.unique_data > 0).then(|| hop_sum as f64 / t.unique_data as f64);
        let f = &mut t.forwarder;
        for fw in &self.forwarders {
            let s = fw.stats();
            f.interests_received += s.interests_received;
            f.interests_forwarded += s.interests_forwarded;
            f.interests_unicast += s.interests_unicast;
            f.interests_broadcast += s.interests_broadcast;
            f.cache_hits += s.cache_hits;
            f.loops_dropped += s.loops_dropped;
            f.pit_aggregations += s.pit_aggregations;
            f.suppressed += s.suppressed;
            f.pit_expirations += s.pit_expirations;
            f.malformed += s.malformed;
            f.data_received += s.data_received;
            f.data_unicasts += s.data_unicasts;
            f.data_broadcasts += s.data_broadcasts;
            f.unsolicited_data += s.unsolicited_data;
        }
        t
    }

    fn dispatch(&mut self, now: SimTime, ev: Event) {
        match ev {
            Event::Mac(m) => {
                let deliveries = match &mut self.medium {
                    Medium::Radio { channel, geometry } => channel.handle(m, &mut self.engine, geometry),
                    Medium::Wired(net) => net.handle(m, &mut self.engine),
                };
                for d in deliveries {
                    self.on_delivery(now, d);
                }
            }
            Event::PitExpire { node, name, at } => self.forwarders[node].pit_expire(now, &name, at),
            Event::ConsumerStart { node } => {
                if let Some(App::Consumer(c)) = self.apps[node].as_mut() {
                    let exps = c.start(now);
                    self.express_all(now, node, exps);
                }
            }
            Event::ConsumerTimeout { node, seq, token } => {
                if let Some(App::Consumer(c)) = self.apps[node].as_mut() {
                    let exps = c.on_timeout(now, seq, token);
                    self.express_all(now, node, exps);
                }
            }
            Event::Mobility { node } => {
                if let Medium::Radio {
                    geometry: Geometry::Moving { kin, walk: Some(w), .. },
                    ..
                } = &mut self.medium
                {
                    kin[node] = w.step(kin[node], now, &mut self.mobility_rngs[node]);
                    let at = w.next_event(&kin[node]);
                    if at != SimTime::MAX {
                        self.engine.schedule(at.max(now + SimTime::from_micros(1)), Event::Mobility { node });
                    }
                }
            }
            Event::Jam { node, duration } => {
                if let Medium::Radio { channel, geometry } = &mut self.medium {
                    channel.jam(node, duration, &mut self.engine, geometry);
                }
            }
            Event::AuditTick => {
                for f in &mut self.forwarders {
                    f.audit_pit_lifetimes(now);
                }
                self.engine.schedule(now + SimTime::from_secs(1), Event::AuditTick);
            }
        }
    }

    fn on_delivery(&mut self, now: SimTime, d: Delivery) {
        if self.passive[d.to] {
            return;
        }
        let node = d.to;
        let from = Face::Neighbor(d.from);
        let actions = match d.packet {
            Packet::Interest(i) => self.forwarders[node].on_interest(now, from, i),
            Packet::Data(data) => {
                if let Some(App::Consumer(c)) = self.apps[node].as_mut() {
                    c.note_redundant(&data);
                }
                self.forwarders[node].on_data(now, from, data)
            }
        };
        self.apply(now, node, actions);
    }

    fn express_all(&mut self, now: SimTime, node: NodeId, exps: Vec<Express>) {
        let mut work = VecDeque::new();
        self.push_express(now, node, exps, &mut work);
        self.drain(now, work);
    }

    fn push_express(&mut self, now: SimTime, node: NodeId, exps: Vec<Express>, work: &mut VecDeque<(NodeId, Action)>) {
        for e in exps {
            self.engine.schedule(
                e.deadline,
                Event::ConsumerTimeout {
                    node,
                    seq: e.seq,
                    token: e.token,
                },
            );
            let acts = self.forwarders[node].on_interest(now, Face::App, e.interest);
            work.extend(acts.into_iter().map(|a| (node, a)));
        }
    }

    fn apply(&mut self, now: SimTime, node: NodeId, actions: Vec<Action>) {
        self.drain(now, actions.into_iter().map(|a| (node, a)).collect());
    }

    /// Carries out forwarder actions; local application reactions feed back
    /// into the same queue instead of recursing.
    fn drain(&mut self, now: SimTime, mut work: VecDeque<(NodeId, Action)>) {
        while let Some((node, action)) = work.pop_front() {
            match action {
                Action::SendInterest { dst, interest } => self.send(node, dst, Packet::Interest(interest)),
                Action::SendData { dst, data } => self.send_data(node, dst, data),
                Action::DeliverInterest(interest) => {
                    let reply = match self.apps[node].as_mut() {
                        Some(App::Producer(p)) => p.on_interest(&interest),
                        _ => None,
                    };
                    if let Some(data) = reply {
                        let acts = self.forwarders[node].on_data(now, Face::App, data);
                        work.extend(acts.into_iter().map(|a| (node, a)));
                    }
                }
                Action::DeliverData(data) => {
                    let exps = match self.apps[node].as_mut() {
                        Some(App::Consumer(c)) => c.on_data(now, &data),
                        _ => Vec::new(),
                    };
                    self.push_express(now, node, exps, &mut work);
                }
                Action::ScheduleExpiry { name, at } => {
                    self.engine.schedule(at.max(now), Event::PitExpire { node, name, at });
                }
            }
        }
    }

    fn send_data(&mut self, node: NodeId, dst: LinkDst, mut data: Data) {
        let qlen = match &self.medium {
            Medium::Radio { channel, .. } => channel.queue_len(node),
            Medium::Wired(net) => net.queue_len(node, dst),
        };
        mark_congestion(&mut data, qlen, self.opts.cm_threshold);
        self.send(node, dst, Packet::Data(data));
    }

    fn send(&mut self, node: NodeId, dst: LinkDst, packet: Packet) {
        let frame = Frame::new(packet, node, dst);
        match &mut self.medium {
            Medium::Radio { channel, geometry } => {
                channel.enqueue(node, frame, &mut self.engine, geometry);
            }
            Medium::Wired(net) => {
                net.enqueue(node, frame, &mut self.engine);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::linear_topology;

    fn chain_world(n: usize, seed: u64) -> World {
        let layout = Layout::Radio {
            positions: linear_topology(n, 100.0),
            arena: Arena::new(1500.0, 1000.0, 125.0),
            speed: 0.0,
            leg: SimTime::from_secs(5),
        };
        World::new(layout, WorldOptions::new(seed))
    }

    #[test]
    fn data_flows_over_wireless_chain() {
        let mut w = chain_world(4, 1);
        let p: Name = "/p0".parse().unwrap();
        w.add_producer(3, p.clone(), 512);
        w.add_consumer(0, ConsumerConfig::new(p), SimTime::ZERO);
        w.run(SimTime::from_secs(5));
        let t = w.totals();
        assert!(t.unique_data > 50, "only {} data", t.unique_data);
        assert_eq!(t.mean_hops, Some(3.0));
    }

    #[test]
    fn data_flows_over_wired_chain() {
        let links = (0..3).map(|i| (i, i + 1, WiredLink::access())).collect();
        let mut w = World::new(Layout::Wired(links), WorldOptions::new(1));
        let p: Name = "/w".parse().unwrap();
        w.add_producer(3, p.clone(), 1460);
        w.add_consumer(0, ConsumerConfig::new(p), SimTime::ZERO);
        w.run(SimTime::from_secs(2));
        let t = w.totals();
        let mbps = t.unique_bytes as f64 * 8.0 / 2.0 / 1e6;
        assert!(mbps > 1.0 && mbps <= 5.0, "{mbps}");
    }

    #[test]
    fn audited_chain_has_no_violations() {
        let mut opts = WorldOptions::new(3);
        opts.audit = true;
        let layout = Layout::Radio {
            positions: linear_topology(5, 100.0),
            arena: Arena::new(1500.0, 1000.0, 125.0),
            speed: 0.0,
            leg: SimTime::from_secs(5),
        };
        let mut w = World::new(layout, opts);
        let p: Name = "/p".parse().unwrap();
        w.add_producer(4, p.clone(), 512);
        let mut cfg = ConsumerConfig::new(p);
        cfg.cwl_enabled = true;
        cfg.dil_enabled = true;
        w.add_consumer(0, cfg, SimTime::ZERO);
        w.run(SimTime::from_secs(10));
        assert_eq!(w.violations().total(), 0, "{}", w.violations());
    }

    #[test]
    fn same_seed_same_totals() {
        let run = || {
            let mut w = chain_world(5, 9);
            let p: Name = "/p".parse().unwrap();
            w.add_producer(4, p.clone(), 512);
            w.add_consumer(0, ConsumerConfig::new(p), SimTime::ZERO);
            w.run(SimTime::from_secs(3));
            w.totals()
        };
        assert_eq!(run(), run());
    }
}
