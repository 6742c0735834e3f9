use std::collections::VecDeque;

use super::{Delivery, Frame, MacEvent, MacScheduler, MacStats, NicQueue};
use crate::ndn::LinkDst;
use crate::sim::{RandomStream, SimTime};
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WiredLink {
    pub bitrate: u64,
    pub prop_delay: SimTime,
    pub p_byte_error: f64,
}

impl WiredLink {
    pub fn access() -> Self {
        WiredLink {
            bitrate: 5_000_000,
            prop_delay: SimTime::from_millis(1),
            p_byte_error: 0.0,
        }
    }

    pub fn bottleneck() -> Self {
        WiredLink {
            bitrate: 1_000_000,
            prop_delay: SimTime::from_millis(10),
            p_byte_error: 0.0,
        }
    }

    pub fn with_byte_error(mut self, p: f64) -> Self {
        self.p_byte_error = p;
        self
    }

    /// Probability that a frame of `bytes` is corrupted in transit.
    pub fn drop_probability(&self, bytes: u32) -> f64 {
        1.0 - (1.0 - self.p_byte_error).powi(bytes as i32)
    }
}

struct Channel {
    from: NodeId,
    to: NodeId,
    link: WiredLink,
    queue: NicQueue,
    busy: bool,
    in_flight: VecDeque<(u64, Frame)>,
    next_slot: u64,
    rng: RandomStream,
}

/// Point-to-point links, one FIFO per direction, no collisions.
pub struct WiredNetwork {
    nodes: usize,
    queue_capacity: usize,
    seed: u64,
    channels: Vec<Channel>,
    out: Vec<Vec<usize>>,
    stats: MacStats,
}

impl WiredNetwork {
    pub fn new(nodes: usize, queue_capacity: usize, seed: u64) -> Self {
        WiredNetwork {
            nodes,
            queue_capacity,
            seed,
            channels: Vec::new(),
            out: vec![Vec::new(); nodes],
            stats: MacStats::default(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    /// Adds both directions of a link between `a` and `b`.
    pub fn connect(&mut self, a: NodeId, b: NodeId, link: WiredLink) {
        self.add_channel(a, b, link);
        self.add_channel(b, a, link);
    }

    fn add_channel(&mut self, from: NodeId, to: NodeId, link: WiredLink) {
        let id = self.channels.len();
        self.channels.push(Channel {
            from,
            to,
            link,
            queue: NicQueue::new(self.queue_capacity),
            busy: false,
            in_flight: VecDeque::new(),
            next_slot: 0,
            rng: RandomStream::derive(self.seed, &format!("wired.error.link{id}")),
        });
        self.out[from].push(id);
    }

    pub fn neighbors(&self, node: NodeId) -> Vec<NodeId> {
        self.out[node].iter().map(|&c| self.channels[c].to).collect()
    }

    pub fn stats(&self) -> MacStats {
        let mut s = self.stats;
        s.queue_drops = self.channels.iter().map(|c| c.queue.drops()).sum();
        s
    }

    /// Longest queue among the out-links a frame to `dst` would use.
    pub fn queue_len(&self, node: NodeId, dst: LinkDst) -> usize {
        self.targets(node, dst)
            .into_iter()
            .map(|c| self.channels[c].queue.len())
            .max()
            .unwrap_or(0)
    }

    fn targets(&self, node: NodeId, dst: LinkDst) -> Vec<usize> {
        match dst {
            LinkDst::Broadcast => self.out[node].clone(),
            LinkDst::Unicast(d) => self.out[node].iter().copied().filter(|&c| self.channels[c].to == d).collect(),
        }
    }

    /// Queues the frame on every matching out-link; false if any copy was dropped.
    pub fn enqueue<S: MacScheduler>(&mut self, node: NodeId, frame: Frame, sched: &mut S) -> bool {
        let mut accepted = true;
        let targets = self.targets(node, frame.dst);
        if targets.is_empty() {
            return false;
        }
        for c in targets {
            if !self.channels[c].queue.enqueue(frame.clone()) {
                accepted = false;
                continue;
            }
            if !self.channels[c].busy {
                self.start(c, sched);
            }
        }
        accepted
    }

    fn start<S: MacScheduler>(&mut self, c: usize, sched: &mut S) {
        let now = sched.now();
        let ch = &mut self.channels[c];
        let Some(frame) = ch.queue.front() else {
            ch.busy = false;
            return;
        };
        ch.busy = true;
        let tx = SimTime::transmission(frame.size_bits(), ch.link.bitrate);
        self.stats.frames_sent += 1;
        match frame.packet {
            crate::ndn::Packet::Interest(_) => self.stats.interest_frames += 1,
            crate::ndn::Packet::Data(_) => self.stats.data_frames += 1,
        }
        sched.schedule_mac(now + tx, MacEvent::WiredTxEnd { link: c });
    }

    pub fn handle<S: MacScheduler>(&mut self, ev: MacEvent, sched: &mut S) -> Vec<Delivery> {
        match ev {
            MacEvent::WiredTxEnd { link } => {
                let now = sched.now();
                let ch = &mut self.channels[link];
                let frame = ch.queue.dequeue().expect("wired tx without frame");
                let p = ch.link.drop_probability(frame.size_bytes());
                if ch.rng.bernoulli(p) {
                    self.stats.frame_errors += 1;
                } else {
                    let slot = ch.next_slot;
                    ch.next_slot += 1;
                    ch.in_flight.push_back((slot, frame));
                    sched.schedule_mac(now + ch.link.prop_delay, MacEvent::WiredArrival { link, slot });
                }
                self.channels[link].busy = false;
                self.start(link, sched);
                Vec::new()
            }
            MacEvent::WiredArrival { link, slot } => {
                let ch = &mut self.channels[link];
                let (s, frame) = ch.in_flight.pop_front().expect("wired arrival without frame");
                debug_assert_eq!(s, slot);
                self.stats.receptions += 1;
                self.stats.delivered += 1;
                vec![Delivery {
                    to: ch.to,
                    from: ch.from,
                    packet: frame.packet,
                }]
            }
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ndn::{Data, Packet};
    use crate::sim::Engine;

    fn frame(bytes_payload: u32, dst: LinkDst) -> Frame {
        Frame::new(Packet::Data(Data::new("/w/seq=1".parse().unwrap(), bytes_payload)), 0, dst)
    }

    #[test]
    fn drop_probability_values() {
        let l = WiredLink::access().with_byte_error(1e-5);
        assert!((l.drop_probability(1500) - 0.014888).abs() < 1e-5);
        assert!((l.drop_probability(40) - 0.0004).abs() < 1e-5);
        assert_eq!(WiredLink::access().drop_probability(1500), 0.0);
    }

    #[test]
    fn arrival_after_serialization_and_propagation() {
        let mut net = WiredNetwork::new(2, 25, 1);
        net.connect(0, 1, WiredLink::access());
        let mut eng: Engine<MacEvent> = Engine::new();
        let f = frame(1460, LinkDst::Unicast(1));
        let bits = f.size_bits();
        assert!(net.enqueue(0, f, &mut eng));
        let mut got = Vec::new();
        while let Some((t, ev)) = eng.next_until(SimTime::from_secs(1)) {
            for d in net.handle(ev, &mut eng) {
                got.push((t, d.to));
            }
        }
        let expect = SimTime::transmission(bits, 5_000_000) + SimTime::from_millis(1);
        assert_eq!(got, vec![(expect, 1)]);
    }

    #[test]
    fn goodput_bounded_by_bitrate() {
        let mut net = WiredNetwork::new(2, 25, 1);
        net.connect(0, 1, WiredLink::bottleneck());
        let mut eng: Engine<MacEvent> = Engine::new();
        for _ in 0..25 {
            net.enqueue(0, frame(1460, LinkDst::Unicast(1)), &mut eng);
        }
        assert!(!net.enqueue(0, frame(1460, LinkDst::Unicast(1)), &mut eng));
        let mut bits = 0u64;
        let horizon = SimTime::from_millis(200);
        while let Some((_, ev)) = eng.next_until(horizon) {
            for d in net.handle(ev, &mut eng) {
                bits += (d.packet.wire_size() as u64 + 34) * 8;
            }
        }
        assert!(bits as f64 / horizon.as_secs_f64() <= 1_000_000.0);
        assert_eq!(net.stats().queue_drops, 1);
    }

    #[test]
    fn broadcast_copies_to_every_link() {
        let mut net = WiredNetwork::new(3, 25, 1);
        net.connect(1, 0, WiredLink::access());
        net.connect(1, 2, WiredLink::access());
        let mut eng: Engine<MacEvent> = Engine::new();
        net.enqueue(1, frame(10, LinkDst::Broadcast), &mut eng);
        let mut to = Vec::new();
        while let Some((_, ev)) = eng.next_until(SimTime::from_secs(1)) {
            to.extend(net.handle(ev, &mut eng).into_iter().map(|d| d.to));
        }
        assert_eq!(to, vec![0, 2]);
    }
}
