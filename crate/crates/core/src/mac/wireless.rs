//! Slotted-backoff CSMA over a unit-disk channel.
//!
//! Carrier sense and reception share the transmission radius. Any temporal
//! overlap at a receiver destroys every overlapping frame there (no capture),
//! and a transmitting radio hears nothing. A node whose backoff expires within
//! one slot of the channel turning busy still transmits, since it cannot have
//! sensed the other carrier yet.

use std::collections::BTreeMap;

use super::{Delivery, Frame, MacEvent, MacScheduler, MacStats, NicQueue, Reachability};
use crate::ndn::{LinkDst, Packet};
use crate::sim::{RandomStream, SimTime};
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirelessConfig {
    pub bitrate: u64,
    pub slot: SimTime,
    pub backoff_slots: u32,
    pub queue_capacity: usize,
    pub retry_limit: u32,
    pub p_frame_error: f64,
}

impl Default for WirelessConfig {
    fn default() -> Self {
        WirelessConfig {
            bitrate: 1_000_000,
            slot: SimTime::from_micros(20),
            backoff_slots: 64,
            queue_capacity: 25,
            retry_limit: 3,
            p_frame_error: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RadioState {
    Idle,
    /// Head-of-line frame waits for the channel to clear.
    Deferring,
    Backoff { token: u64, epoch: u64 },
    Transmitting,
}

struct Radio {
    queue: NicQueue,
    state: RadioState,
    /// Neighbour transmissions currently sensed.
    busy: u32,
    /// Bumped on every idle -> busy transition.
    busy_epoch: u64,
    busy_since: SimTime,
    receiving: Vec<u64>,
    next_token: u64,
    backoff_rng: RandomStream,
    error_rng: RandomStream,
}

struct Transmission {
    src: NodeId,
    /// `None` for a jamming burst.
    frame: Option<Frame>,
    /// (receiver, destroyed)
    rx: Vec<(NodeId, bool)>,
}

pub struct WirelessChannel {
    cfg: WirelessConfig,
    radios: Vec<Radio>,
    active: BTreeMap<u64, Transmission>,
    next_tx: u64,
    stats: MacStats,
}

impl WirelessChannel {
    pub fn new(cfg: WirelessConfig, nodes: usize, seed: u64) -> Self {
        let radios = (0..nodes)
            .map(|i| Radio {
                queue: NicQueue::new(cfg.queue_capacity),
                state: RadioState::Idle,
                busy: 0,
                busy_epoch: 0,
                busy_since: SimTime::ZERO,
                receiving: Vec::new(),
                next_token: 0,
                backoff_rng: RandomStream::derive(seed, &format!("mac.backoff.node{i}")),
                error_rng: RandomStream::derive(seed, &format!("phy.error.node{i}")),
            })
            .collect();
        WirelessChannel {
            cfg,
            radios,
            active: BTreeMap::new(),
            next_tx: 0,
            stats: MacStats::default(),
        }
    }

    pub fn config(&self) -> &WirelessConfig {
        &self.cfg
    }

    pub fn stats(&self) -> MacStats {
        let mut s = self.stats;
        s.queue_drops = self.radios.iter().map(|r| r.queue.drops()).sum();
        s
    }

    pub fn queue_len(&self, node: NodeId) -> usize {
        self.radios[node].queue.len()
    }

    pub fn queue_capacity(&self) -> usize {
        self.cfg.queue_capacity
    }

    pub fn is_transmitting(&self, node: NodeId) -> bool {
        self.radios[node].state == RadioState::Transmitting
    }

    /// Queue a frame; false if the NIC queue was full.
    pub fn enqueue<S: MacScheduler, R: Reachability>(
        &mut self,
        node: NodeId,
        frame: Frame,
        sched: &mut S,
        _reach: &R,
    ) -> bool {
        if !self.radios[node].queue.enqueue(frame) {
            return false;
        }
        if self.radios[node].state == RadioState::Idle {
            self.contend(node, sched);
        }
        true
    }

    /// Emit an undecodable burst from `node` for `duration`, ignoring carrier sense.
    pub fn jam<S: MacScheduler, R: Reachability>(&mut self, node: NodeId, duration: SimTime, sched: &mut S, reach: &R) {
        let now = sched.now();
        let tx = self.next_tx;
        self.next_tx += 1;
        let rx = self.start_reception(tx, node, reach.neighbors(node, now), now);
        self.active.insert(tx, Transmission { src: node, frame: None, rx });
        sched.schedule_mac(now + duration, MacEvent::TxEnd { tx });
    }

    pub fn handle<S: MacScheduler, R: Reachability>(&mut self, ev: MacEvent, sched: &mut S, reach: &R) -> Vec<Delivery> {
        match ev {
            MacEvent::BackoffEnd { node, token } => {
                self.on_backoff_end(node, token, sched, reach);
                Vec::new()
            }
            MacEvent::TxEnd { tx } => self.on_tx_end(tx, sched, reach.node_count()),
            MacEvent::WiredTxEnd { .. } | MacEvent::WiredArrival { .. } => Vec::new(),
        }
    }

    fn contend<S: MacScheduler>(&mut self, node: NodeId, sched: &mut S) {
        let now = sched.now();
        let slot = self.cfg.slot;
        let slots = self.cfg.backoff_slots.max(1) as u64;
        let r = &mut self.radios[node];
        if r.busy > 0 {
            r.state = RadioState::Deferring;
            return;
        }
        let k = r.backoff_rng.below(slots);
        let token = r.next_token;
        r.next_token += 1;
        r.state = RadioState::Backoff {
            token,
            epoch: r.busy_epoch,
        };
        let at = SimTime::from_micros(now.as_micros() + k * slot.as_micros());
        sched.schedule_mac(at, MacEvent::BackoffEnd { node, token });
    }

    fn on_backoff_end<S: MacScheduler, R: Reachability>(&mut self, node: NodeId, token: u64, sched: &mut S, reach: &R) {
        let now = sched.now();
        let slot = self.cfg.slot;
        let r = &self.radios[node];
        let RadioState::Backoff { token: t, epoch } = r.state else {
            return;
        };
        if t != token {
            return;
        }
        let clear = r.busy == 0 && r.busy_epoch == epoch;
        let unsensed = r.busy > 0 && r.busy_epoch == epoch + 1 && now.saturating_sub(r.busy_since) < slot;
        if clear || unsensed {
            self.transmit(node, sched, reach);
        } else {
            self.contend(node, sched);
        }
    }

    fn transmit<S: MacScheduler, R: Reachability>(&mut self, node: NodeId, sched: &mut S, reach: &R) {
        let now = sched.now();
        let frame = {
            let head = self.radios[node].queue.front_mut().expect("transmit with empty queue");
            head.attempts += 1;
            head.clone()
        };
        if frame.attempts > 1 {
            self.stats.retries += 1;
        }
        self.stats.frames_sent += 1;
        match frame.packet {
            Packet::Interest(_) => self.stats.interest_frames += 1,
            Packet::Data(_) => self.stats.data_frames += 1,
        }
        if frame.dst == LinkDst::Broadcast {
            self.stats.broadcast_frames += 1;
        }
        let airtime = SimTime::transmission(frame.size_bits(), self.cfg.bitrate);

        // half duplex: anything we were receiving is lost
        let mine = std::mem::take(&mut self.radios[node].receiving);
        for tx in &mine {
            self.mark_destroyed(*tx, node);
        }
        self.radios[node].receiving = mine;
        self.radios[node].state = RadioState::Transmitting;

        let tx = self.next_tx;
        self.next_tx += 1;
        let receivers = reach.neighbors(node, now);
        self.stats.out_of_range += (reach.node_count() - 1 - receivers.len()) as u64;
        let rx = self.start_reception(tx, node, receivers, now);
        self.active.insert(
            tx,
            Transmission {
                src: node,
                frame: Some(frame),
                rx,
            },
        );
        sched.schedule_mac(now + airtime, MacEvent::TxEnd { tx });
    }

    fn start_reception(&mut self, tx: u64, src: NodeId, receivers: Vec<NodeId>, now: SimTime) -> Vec<(NodeId, bool)> {
        let mut rx = Vec::with_capacity(receivers.len());
        for r in receivers {
            debug_assert_ne!(r, src);
            let radio = &mut self.radios[r];
            if radio.busy == 0 {
                radio.busy_epoch += 1;
                radio.busy_since = now;
            }
            radio.busy += 1;
            let destroyed = radio.state == RadioState::Transmitting || !radio.receiving.is_empty();
            let overlapping = if radio.receiving.is_empty() {
                Vec::new()
            } else {
                radio.receiving.clone()
            };
            radio.receiving.push(tx);
            for other in overlapping {
                self.mark_destroyed(other, r);
            }
            rx.push((r, destroyed));
        }
        rx
    }

    fn mark_destroyed(&mut self, tx: u64, at: NodeId) {
        if let Some(t) = self.active.get_mut(&tx) {
            for (r, d) in t.rx.iter_mut() {
                if *r == at {
                    *d = true;
                }
            }
        }
    }

    fn on_tx_end<S: MacScheduler>(&mut self, tx: u64, sched: &mut S, node_count: usize) -> Vec<Delivery> {
        let _ = node_count;
        let Some(t) = self.active.remove(&tx) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut freed = Vec::new();
        let mut dst_ok = false;
        for &(r, destroyed) in &t.rx {
            let radio = &mut self.radios[r];
            radio.busy -= 1;
            radio.receiving.retain(|&x| x != tx);
            if radio.busy == 0 {
                freed.push(r);
            }
            let Some(frame) = t.frame.as_ref() else {
                continue;
            };
            if destroyed {
                self.stats.collisions += 1;
                continue;
            }
            if radio.error_rng.bernoulli(self.cfg.p_frame_error) {
                self.stats.frame_errors += 1;
                continue;
            }
            self.stats.receptions += 1;
            let addressed = match frame.dst {
                LinkDst::Broadcast => true,
                LinkDst::Unicast(d) => d == r,
            };
            if addressed {
                dst_ok = true;
                self.stats.delivered += 1;
                out.push(Delivery {
                    to: r,
                    from: t.src,
                    packet: frame.packet.clone(),
                });
            } else {
                self.stats.overheard += 1;
            }
        }

        if let Some(frame) = t.frame.as_ref() {
            let src = t.src;
            let done = match frame.dst {
                LinkDst::Broadcast => true,
                LinkDst::Unicast(_) => dst_ok || frame.attempts > self.cfg.retry_limit,
            };
            if done {
                if matches!(frame.dst, LinkDst::Unicast(_)) && !dst_ok {
                    self.stats.abandoned += 1;
                }
                self.radios[src].queue.dequeue();
            }
            self.radios[src].state = RadioState::Idle;
            if !self.radios[src].queue.is_empty() {
                self.contend(src, sched);
            }
        }

        for r in freed {
            match self.radios[r].state {
                RadioState::Deferring => self.contend(r, sched),
                RadioState::Backoff { epoch, .. } if epoch != self.radios[r].busy_epoch => self.contend(r, sched),
                _ => {}
            }
        }
        out
    }
}
