//! Per-node forwarding plane: CS -> PIT -> FIB for Interests, FIB learn ->
//! CS insert -> PIT fan-out for Data.
//!
//! The forwarder never touches the link layer directly. Every call returns a
//! list of [`Action`]s that the owning simulation carries out.

use std::collections::HashSet;

use super::tables::{DeadNonceList, Face, Fib, Pit, PitEntry};
use super::{ContentStore, Data, Interest, Name};
use crate::invariants::Violations;
use crate::sim::SimTime;
use crate::transport::RtoParams;
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkDst {
    Unicast(NodeId),
    Broadcast,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    SendInterest { dst: LinkDst, interest: Interest },
    SendData { dst: LinkDst, data: Data },
    /// Hand an Interest to the local producer application.
    DeliverInterest(Interest),
    /// Hand a Data to the local consumer application.
    DeliverData(Data),
    /// A PIT entry for `name` now expires at `at`.
    ScheduleExpiry { name: Name, at: SimTime },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwarderConfig {
    pub suppression_interval: SimTime,
    pub cs_capacity: usize,
    pub dead_nonce_lifetime: SimTime,
    pub fib_rto: RtoParams,
}

impl Default for ForwarderConfig {
    fn default() -> Self {
        ForwarderConfig {
            suppression_interval: SimTime::from_millis(20),
            cs_capacity: 200,
            dead_nonce_lifetime: SimTime::from_secs(6),
            fib_rto: RtoParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ForwarderStats {
    pub interests_received: u64,
    pub interests_forwarded: u64,
    pub interests_unicast: u64,
    pub interests_broadcast: u64,
    pub cache_hits: u64,
    pub loops_dropped: u64,
    pub pit_aggregations: u64,
    pub suppressed: u64,
    pub pit_expirations: u64,
    pub malformed: u64,
    pub data_received: u64,
    pub data_unicasts: u64,
    pub data_broadcasts: u64,
    pub unsolicited_data: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PitEventKind {
    Created,
    Aggregated,
    Satisfied,
    Expired,
}

/// One PIT transition, recorded when logging is on.
#[derive(Debug, Clone, PartialEq)]
pub struct PitEvent {
    pub time: SimTime,
    pub name: Name,
    pub kind: PitEventKind,
    /// Distinct downstream faces after the transition.
    pub faces: usize,
    pub pit_count: u32,
}

struct Audit {
    forwarded: HashSet<(Name, u32)>,
    violations: Violations,
}

pub struct Forwarder {
    node: NodeId,
    cfg: ForwarderConfig,
    cs: ContentStore,
    pit: Pit,
    fib: Fib,
    dead_nonces: DeadNonceList,
    producer_prefix: Option<Name>,
    stats: ForwarderStats,
    log: Option<Vec<PitEvent>>,
    audit: Option<Audit>,
}

impl Forwarder {
    pub fn new(node: NodeId, cfg: ForwarderConfig) -> Self {
        Forwarder {
            node,
            cfg,
            cs: ContentStore::new(cfg.cs_capacity),
            pit: Pit::default(),
            fib: Fib::new(cfg.fib_rto),
            dead_nonces: DeadNonceList::new(cfg.dead_nonce_lifetime),
            producer_prefix: None,
            stats: ForwarderStats::default(),
            log: None,
            audit: None,
        }
    }

    pub fn node(&self) -> NodeId {
        self.node
    }

    /// Interests under `prefix` that miss the CS go to the local application.
    pub fn register_producer(&mut self, prefix: Name) {
        self.producer_prefix = Some(prefix);
    }

    pub fn enable_log(&mut self) {
        self.log = Some(Vec::new());
    }

    pub fn enable_audit(&mut self) {
        self.audit = Some(Audit {
            forwarded: HashSet::new(),
            violations: Violations::default(),
        });
    }

    pub fn log(&self) -> &[PitEvent] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn violations(&self) -> Violations {
        self.audit.as_ref().map(|a| a.violations).unwrap_or_default()
    }

    pub fn stats(&self) -> &ForwarderStats {
        &self.stats
    }

    pub fn cs(&self) -> &ContentStore {
        &self.cs
    }

    pub fn cs_mut(&mut self) -> &mut ContentStore {
        &mut self.cs
    }

    pub fn pit(&self) -> &Pit {
        &self.pit
    }

    pub fn fib(&self) -> &Fib {
        &self.fib
    }

    pub fn fib_lookup(&self, now: SimTime, name: &Name) -> Option<NodeId> {
        self.fib.lookup(now, name).map(|e| e.nexthop)
    }

    pub fn on_interest(&mut self, now: SimTime, from: Face, interest: Interest) -> Vec<Action> {
        let mut out = Vec::new();
        self.stats.interests_received += 1;
        if interest.lifetime == SimTime::ZERO {
            self.stats.malformed += 1;
            return out;
        }
        let name = interest.name.clone();
        self.expire_if_stale(now, &name);

        if self.dead_nonces.contains(now, &name, interest.nonce) {
            self.stats.loops_dropped += 1;
            return out;
        }

        // (1) Content Store
        if let Some(cached) = self.cs.lookup(&name) {
            let mut data = cached.clone();
            data.hop_count = 0;
            self.stats.cache_hits += 1;
            self.dead_nonces.add(now, &name, interest.nonce);
            match from {
                Face::App => out.push(Action::DeliverData(data)),
                Face::Neighbor(n) => {
                    data.hop_count += 1;
                    self.stats.data_unicasts += 1;
                    out.push(Action::SendData {
                        dst: LinkDst::Unicast(n),
                        data,
                    });
                }
            }
            return out;
        }

        // (2) PIT
        if let Some(entry) = self.pit.get_mut(&name) {
            if entry.has_nonce(interest.nonce) {
                self.stats.loops_dropped += 1;
                return out;
            }
            if entry.aggregate(from, interest.nonce, now, interest.lifetime) {
                out.push(Action::ScheduleExpiry {
                    name: name.clone(),
                    at: entry.expiry,
                });
            }
            self.stats.pit_aggregations += 1;
            let suppress = now.saturating_sub(entry.forwarded_at) < self.cfg.suppression_interval;
            if !suppress {
                entry.forwarded_at = now;
            }
            let (faces, count) = (entry.faces().len(), entry.pit_count);
            self.record(now, &name, PitEventKind::Aggregated, faces, count);
            self.audit_pit(&name, now);
            if suppress {
                self.stats.suppressed += 1;
            } else {
                self.route_interest(now, from, interest, &mut out);
            }
            return out;
        }

        // (3) new entry, then producer or FIB
        let entry = PitEntry::new(name.clone(), from, interest.nonce, now, interest.lifetime);
        out.push(Action::ScheduleExpiry {
            name: name.clone(),
            at: entry.expiry,
        });
        self.pit.insert(entry);
        self.record(now, &name, PitEventKind::Created, 1, 1);

        let local = self
            .producer_prefix
            .as_ref()
            .is_some_and(|p| p.is_prefix_of(&name));
        if local {
            out.push(Action::DeliverInterest(interest));
        } else {
            self.route_interest(now, from, interest, &mut out);
        }
        out
    }

    fn route_interest(&mut self, now: SimTime, from: Face, mut interest: Interest, out: &mut Vec<Action>) {
        let nexthop = self
            .fib
            .lookup(now, &interest.name)
            .map(|e| e.nexthop)
            .filter(|&nh| from != Face::Neighbor(nh));
        let dst = match nexthop {
            Some(nh) => {
                self.stats.interests_unicast += 1;
                LinkDst::Unicast(nh)
            }
            None => {
                self.stats.interests_broadcast += 1;
                LinkDst::Broadcast
            }
        };
        self.stats.interests_forwarded += 1;
        if let Some(audit) = self.audit.as_mut() {
            if !audit.forwarded.insert((interest.name.clone(), interest.nonce)) {
                audit.violations.loop_freedom += 1;
            }
            if let LinkDst::Unicast(nh) = dst {
                let fresh = self
                    .fib
                    .lookup(now, &interest.name)
                    .is_some_and(|e| e.nexthop == nh && e.is_valid(now));
                if !fresh {
                    audit.violations.fib_validity += 1;
                }
            }
        }
        interest.hop_count += 1;
        out.push(Action::SendInterest { dst, interest });
    }

    pub fn on_data(&mut self, now: SimTime, from: Face, mut data: Data) -> Vec<Action> {
        let mut out = Vec::new();
        self.stats.data_received += 1;
        let name = data.name.clone();
        self.expire_if_stale(now, &name);

        // (1) FIB learn from the neighbour that delivered it
        if let Face::Neighbor(n) = from {
            if let Some(prefix) = name.parent() {
                let sample = self
                    .pit
                    .get(&name)
                    .map(|e| (now.saturating_sub(e.forwarded_at)).as_secs_f64());
                self.fib.learn(now, prefix, n, sample);
            }
        }

        // (2) opportunistic caching
        self.cs.insert(data.clone());
        if let Some(audit) = self.audit.as_mut() {
            if self.cs.len() > self.cs.capacity() {
                audit.violations.cs_capacity += 1;
            }
        }

        // (3) PIT fan-out
        let Some(entry) = self.pit.remove(&name) else {
            self.stats.unsolicited_data += 1;
            return out;
        };
        for &(_, nonce) in &entry.downstreams {
            self.dead_nonces.add(now, &name, nonce);
        }
        let faces = entry.faces();
        self.record(now, &name, PitEventKind::Satisfied, faces.len(), entry.pit_count);

        if faces.contains(&Face::App) {
            out.push(Action::DeliverData(data.clone()));
        }
        // one record per aggregated Interest, so a retransmission from the
        // same neighbour still counts as a second downstream
        let neighbors: Vec<NodeId> = entry
            .downstreams
            .iter()
            .filter_map(|&(f, _)| match f {
                Face::Neighbor(n) if from != f => Some(n),
                _ => None,
            })
            .collect();
        data.hop_count += 1;
        match neighbors.as_slice() {
            [] => {}
            [n] => {
                self.stats.data_unicasts += 1;
                out.push(Action::SendData {
                    dst: LinkDst::Unicast(*n),
                    data,
                });
            }
            _ => {
                self.stats.data_broadcasts += 1;
                out.push(Action::SendData {
                    dst: LinkDst::Broadcast,
                    data,
                });
            }
        }
        out
    }

    /// Remove the entry for `name` if its expiry is exactly `at` and has passed.
    pub fn pit_expire(&mut self, now: SimTime, name: &Name, at: SimTime) {
        let due = self
            .pit
            .get(name)
            .is_some_and(|e| e.expiry == at && e.expiry <= now);
        if due {
            self.drop_entry(now, name);
        }
    }

    fn expire_if_stale(&mut self, now: SimTime, name: &Name) {
        if self.pit.get(name).is_some_and(|e| e.expiry <= now) {
            self.drop_entry(now, name);
        }
    }

    fn drop_entry(&mut self, now: SimTime, name: &Name) {
        if let Some(entry) = self.pit.remove(name) {
            self.stats.pit_expirations += 1;
            for &(_, nonce) in &entry.downstreams {
                self.dead_nonces.add(now, name, nonce);
            }
            self.record(now, name, PitEventKind::Expired, entry.faces().len(), entry.pit_count);
        }
    }

    fn record(&mut self, time: SimTime, name: &Name, kind: PitEventKind, faces: usize, pit_count: u32) {
        if let Some(log) = self.log.as_mut() {
            log.push(PitEvent {
                time,
                name: name.clone(),
                kind,
                faces,
                pit_count,
            });
        }
    }

    fn audit_pit(&mut self, name: &Name, now: SimTime) {
        let Some(audit) = self.audit.as_mut() else {
            return;
        };
        if let Some(e) = self.pit.get(name) {
            let mut distinct = e.seen_nonces.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if e.pit_count as usize != distinct.len() || e.expiry <= now {
                audit.violations.pit_accounting += 1;
            }
        }
    }

    /// Audit hook: every live entry must still be within its lifetime.
    pub fn audit_pit_lifetimes(&mut self, now: SimTime) {
        let Some(audit) = self.audit.as_mut() else {
            return;
        };
        let stale = self.pit.iter().filter(|e| e.expiry < now).count() as u64;
        audit.violations.pit_accounting += stale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        s.parse().unwrap()
    }

    fn interest(name: &str, nonce: u32) -> Interest {
        Interest::new(n(name), nonce, SimTime::from_secs(2))
    }

    fn fwd() -> Forwarder {
        let mut f = Forwarder::new(0, ForwarderConfig::default());
        f.enable_log();
        f.enable_audit();
        f
    }

    fn sends(actions: &[Action]) -> Vec<&Action> {
        actions
            .iter()
            .filter(|a| matches!(a, Action::SendInterest { .. } | Action::SendData { .. }))
            .collect()
    }

    #[test]
    fn cache_hit_returns_data_without_pit() {
        let mut f = fwd();
        f.cs_mut().insert(Data::new(n("/a/img.png"), 512));
        let acts = f.on_interest(SimTime::ZERO, Face::Neighbor(3), interest("/a/img.png", 1));
        assert_eq!(
            acts,
            vec![Action::SendData {
                dst: LinkDst::Unicast(3),
                data: Data {
                    hop_count: 1,
                    ..Data::new(n("/a/img.png"), 512)
                }
            }]
        );
        assert!(f.pit().is_empty());
        assert_eq!(f.stats().cache_hits, 1);
    }

    #[test]
    fn same_nonce_is_a_loop() {
        let mut f = fwd();
        let first = f.on_interest(SimTime::ZERO, Face::Neighbor(1), interest("/a/img.png", 7));
        assert_eq!(sends(&first).len(), 1);
        let again = f.on_interest(SimTime::from_millis(3), Face::Neighbor(2), interest("/a/img.png", 7));
        assert!(again.is_empty());
        assert_eq!(f.stats().loops_dropped, 1);
        assert_eq!(f.pit().get(&n("/a/img.png")).unwrap().pit_count, 1);
    }

    #[test]
    fn new_nonce_after_suppression_window_aggregates_and_forwards() {
        let mut f = fwd();
        f.on_interest(SimTime::ZERO, Face::Neighbor(1), interest("/a/img.png", 7));
        let acts = f.on_interest(SimTime::from_secs(1), Face::Neighbor(2), interest("/a/img.png", 8));
        assert_eq!(sends(&acts).len(), 1);
        assert!(acts.contains(&Action::ScheduleExpiry {
            name: n("/a/img.png"),
            at: SimTime::from_secs(3)
        }));
        let e = f.pit().get(&n("/a/img.png")).unwrap();
        assert_eq!(e.pit_count, 2);
        assert_eq!(e.faces().len(), 2);
        assert_eq!(e.forwarded_at, SimTime::from_secs(1));
    }

    #[test]
    fn new_nonce_inside_suppression_window_is_suppressed() {
        let mut f = fwd();
        f.on_interest(SimTime::ZERO, Face::Neighbor(1), interest("/a/img.png", 7));
        let acts = f.on_interest(SimTime::from_millis(5), Face::Neighbor(2), interest("/a/img.png", 8));
        assert!(sends(&acts).is_empty());
        assert_eq!(f.stats().suppressed, 1);
        assert_eq!(f.pit().get(&n("/a/img.png")).unwrap().pit_count, 2);
    }

    #[test]
    fn interest_uses_fresh_fib_entry_else_broadcasts() {
        let mut f = fwd();
        let acts = f.on_interest(SimTime::ZERO, Face::App, interest("/a/seq=1", 1));
        assert!(matches!(
            acts.last(),
            Some(Action::SendInterest { dst: LinkDst::Broadcast, interest }) if interest.hop_count == 1
        ));
        f.on_data(SimTime::from_millis(100), Face::Neighbor(5), Data::new(n("/a/seq=1"), 512));
        let acts = f.on_interest(SimTime::from_millis(150), Face::App, interest("/a/seq=2", 2));
        assert!(matches!(acts.last(), Some(Action::SendInterest { dst: LinkDst::Unicast(5), .. })));
        // long after the RTO the entry is stale again
        let acts = f.on_interest(SimTime::from_secs(30), Face::App, interest("/a/seq=3", 3));
        assert!(matches!(acts.last(), Some(Action::SendInterest { dst: LinkDst::Broadcast, .. })));
        assert_eq!(f.violations().total(), 0);
    }

    #[test]
    fn data_fanout_unicast_broadcast_drop() {
        let mut f = fwd();
        let t = SimTime::ZERO;
        f.on_interest(t, Face::Neighbor(1), interest("/a/seq=1", 1));
        f.on_interest(SimTime::from_secs(1), Face::Neighbor(2), interest("/a/seq=1", 2));
        let acts = f.on_data(SimTime::from_millis(1100), Face::Neighbor(9), Data::new(n("/a/seq=1"), 512));
        assert!(matches!(
            sends(&acts)[..],
            [Action::SendData { dst: LinkDst::Broadcast, data }] if data.hop_count == 1
        ));
        assert_eq!(f.stats().data_broadcasts, 1);

        f.on_interest(SimTime::from_secs(2), Face::Neighbor(1), interest("/a/seq=2", 3));
        let acts = f.on_data(SimTime::from_millis(2100), Face::Neighbor(9), Data::new(n("/a/seq=2"), 512));
        assert!(matches!(sends(&acts)[..], [Action::SendData { dst: LinkDst::Unicast(1), .. }]));
        assert_eq!(f.stats().data_broadcasts, 1);

        // same neighbour twice with different nonces: two downstream records
        f.on_interest(SimTime::from_secs(3), Face::Neighbor(1), interest("/a/seq=3", 4));
        f.on_interest(SimTime::from_secs(4), Face::Neighbor(1), interest("/a/seq=3", 5));
        let acts = f.on_data(SimTime::from_millis(4100), Face::Neighbor(9), Data::new(n("/a/seq=3"), 512));
        assert!(matches!(sends(&acts)[..], [Action::SendData { dst: LinkDst::Broadcast, .. }]));
        assert_eq!(f.stats().data_broadcasts, 2);

        let acts = f.on_data(SimTime::from_secs(3), Face::Neighbor(9), Data::new(n("/a/seq=7"), 512));
        assert!(acts.is_empty());
        assert_eq!(f.stats().unsolicited_data, 1);
    }

    #[test]
    fn data_learns_fib_with_rtt_sample() {
        let mut f = fwd();
        f.on_interest(SimTime::ZERO, Face::App, interest("/a/seq=1", 1));
        let acts = f.on_data(SimTime::from_millis(400), Face::Neighbor(6), Data::new(n("/a/seq=1"), 512));
        assert!(matches!(acts[..], [Action::DeliverData(_)]));
        let e = f.fib().get(&n("/a")).unwrap();
        assert_eq!(e.nexthop, 6);
        assert_eq!(e.rtt.srtt(), Some(0.4));
        assert!(f.cs().contains(&n("/a/seq=1")));
    }

    #[test]
    fn expiry_removes_entry_and_fresh_interest_recreates() {
        let mut f = fwd();
        f.on_interest(SimTime::ZERO, Face::Neighbor(1), interest("/a/img.png", 1));
        f.pit_expire(SimTime::from_secs(2), &n("/a/img.png"), SimTime::from_secs(2));
        assert!(f.pit().is_empty());
        f.on_interest(SimTime::from_millis(2500), Face::Neighbor(2), interest("/a/img.png", 2));
        let e = f.pit().get(&n("/a/img.png")).unwrap();
        assert_eq!(e.faces(), vec![Face::Neighbor(2)]);
        let kinds: Vec<_> = f.log().iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![PitEventKind::Created, PitEventKind::Expired, PitEventKind::Created]);
    }

    #[test]
    fn stale_expiry_event_is_ignored_after_extension() {
        let mut f = fwd();
        f.on_interest(SimTime::ZERO, Face::Neighbor(1), interest("/a/img.png", 1));
        f.on_interest(SimTime::from_secs(1), Face::Neighbor(2), interest("/a/img.png", 2));
        f.pit_expire(SimTime::from_secs(2), &n("/a/img.png"), SimTime::from_secs(2));
        assert_eq!(f.pit().len(), 1);
        f.pit_expire(SimTime::from_secs(3), &n("/a/img.png"), SimTime::from_secs(3));
        assert!(f.pit().is_empty());
    }

    #[test]
    fn satisfied_entry_has_no_expiry() {
        let mut f = fwd();
        f.on_interest(SimTime::ZERO, Face::Neighbor(1), interest("/a/img.png", 1));
        f.on_data(SimTime::from_millis(500), Face::Neighbor(2), Data::new(n("/a/img.png"), 512));
        f.pit_expire(SimTime::from_secs(2), &n("/a/img.png"), SimTime::from_secs(2));
        assert_eq!(f.stats().pit_expirations, 0);
    }

    #[test]
    fn producer_gets_local_interest_and_late_copy_is_loop() {
        let mut f = fwd();
        f.register_producer(n("/A"));
        let acts = f.on_interest(SimTime::ZERO, Face::Neighbor(1), interest("/A/seq=9", 4));
        assert!(matches!(acts.last(), Some(Action::DeliverInterest(_))));
        let acts = f.on_data(SimTime::ZERO, Face::App, Data::new(n("/A/seq=9"), 512));
        assert!(matches!(sends(&acts)[..], [Action::SendData { dst: LinkDst::Unicast(1), .. }]));
        // same nonce via another neighbour after satisfaction
        let acts = f.on_interest(SimTime::from_millis(5), Face::Neighbor(2), interest("/A/seq=9", 4));
        assert!(acts.is_empty());
    }

    #[test]
    fn zero_lifetime_is_malformed() {
        let mut f = fwd();
        let i = Interest::new(n("/a"), 1, SimTime::ZERO);
        assert!(f.on_interest(SimTime::ZERO, Face::App, i).is_empty());
        assert_eq!(f.stats().malformed, 1);
    }
}
