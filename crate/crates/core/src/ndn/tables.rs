//! PIT, FIB and dead-nonce bookkeeping.

use std::collections::{HashMap, VecDeque};

use super::Name;
use crate::sim::SimTime;
use crate::transport::{RtoParams, RttEstimator};
use crate::NodeId;

/// Where a packet came from or must go back to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    App,
    Neighbor(NodeId),
}

#[derive(Debug, Clone)]
pub struct PitEntry {
    pub name: Name,
    pub downstreams: Vec<(Face, u32)>,
    pub seen_nonces: Vec<u32>,
    pub expiry: SimTime,
    pub pit_count: u32,
    pub forwarded_at: SimTime,
    pub created_at: SimTime,
}

impl PitEntry {
    pub fn new(name: Name, from: Face, nonce: u32, now: SimTime, lifetime: SimTime) -> Self {
        PitEntry {
            name,
            downstreams: vec![(from, nonce)],
            seen_nonces: vec![nonce],
            expiry: now + lifetime,
            pit_count: 1,
            forwarded_at: now,
            created_at: now,
        }
    }

    pub fn has_nonce(&self, nonce: u32) -> bool {
        self.seen_nonces.contains(&nonce)
    }

    /// Record another Interest with a new nonce. Returns true if the expiry moved.
    pub fn aggregate(&mut self, from: Face, nonce: u32, now: SimTime, lifetime: SimTime) -> bool {
        debug_assert!(!self.has_nonce(nonce));
        self.downstreams.push((from, nonce));
        self.seen_nonces.push(nonce);
        self.pit_count += 1;
        let expiry = now + lifetime;
        if expiry > self.expiry {
            self.expiry = expiry;
            true
        } else {
            false
        }
    }

    /// Distinct downstream faces, in first-seen order.
    pub fn faces(&self) -> Vec<Face> {
        let mut out: Vec<Face> = Vec::with_capacity(self.downstreams.len());
        for (f, _) in &self.downstreams {
            if !out.contains(f) {
                out.push(*f);
            }
        }
        out
    }
}

#[derive(Debug, Default)]
pub struct Pit {
    entries: HashMap<Name, PitEntry>,
}

impl Pit {
    pub fn get(&self, name: &Name) -> Option<&PitEntry> {
        self.entries.get(name)
    }

    pub fn get_mut(&mut self, name: &Name) -> Option<&mut PitEntry> {
        self.entries.get_mut(name)
    }

    pub fn insert(&mut self, entry: PitEntry) {
        self.entries.insert(entry.name.clone(), entry);
    }

    pub fn remove(&mut self, name: &Name) -> Option<PitEntry> {
        self.entries.remove(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PitEntry> {
        self.entries.values()
    }
}

#[derive(Debug, Clone)]
pub struct FibEntry {
    pub prefix: Name,
    pub nexthop: NodeId,
    pub rtt: RttEstimator,
    pub last_confirmed: SimTime,
}

impl FibEntry {
    /// Fresh while less than one RTO has passed since the last confirming Data.
    pub fn is_valid(&self, now: SimTime) -> bool {
        now.saturating_sub(self.last_confirmed) < self.rtt.rto_time()
    }
}

#[derive(Debug)]
pub struct Fib {
    entries: HashMap<Name, FibEntry>,
    params: RtoParams,
}

impl Fib {
    pub fn new(params: RtoParams) -> Self {
        Fib {
            entries: HashMap::new(),
            params,
        }
    }

    /// Longest-prefix match over valid entries.
    pub fn lookup(&self, now: SimTime, name: &Name) -> Option<&FibEntry> {
        let comps = name.components();
        (1..=comps.len())
            .rev()
            .filter_map(|k| self.entries.get(&comps[..k]))
            .find(|e| e.is_valid(now))
    }

    pub fn get(&self, prefix: &Name) -> Option<&FibEntry> {
        self.entries.get(prefix)
    }

    /// Point `prefix` at `nexthop`. A change of next hop restarts the RTT average.
    pub fn learn(&mut self, now: SimTime, prefix: Name, nexthop: NodeId, rtt_sample: Option<f64>) {
        let params = self.params;
        let entry = self.entries.entry(prefix.clone()).or_insert_with(|| FibEntry {
            prefix,
            nexthop,
            rtt: RttEstimator::new(params),
            last_confirmed: now,
        });
        if entry.nexthop != nexthop {
            entry.nexthop = nexthop;
            entry.rtt = RttEstimator::new(params);
        }
        if let Some(s) = rtt_sample.filter(|s| *s > 0.0) {
            entry.rtt.on_sample(s).expect("positive sample");
        }
        entry.last_confirmed = now;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Recently consumed `(name, nonce)` pairs, kept after their PIT entry is gone
/// so late copies of the same Interest are still recognised as loops.
#[derive(Debug)]
pub struct DeadNonceList {
    lifetime: SimTime,
    live: HashMap<(Name, u32), SimTime>,
    order: VecDeque<(SimTime, Name, u32)>,
}

impl DeadNonceList {
    pub fn new(lifetime: SimTime) -> Self {
        DeadNonceList {
            lifetime,
            live: HashMap::new(),
            order: VecDeque::new(),
        }
    }

    pub fn add(&mut self, now: SimTime, name: &Name, nonce: u32) {
        let until = now + self.lifetime;
        self.live.insert((name.clone(), nonce), until);
        self.order.push_back((until, name.clone(), nonce));
    }

    pub fn contains(&mut self, now: SimTime, name: &Name, nonce: u32) -> bool {
        self.purge(now);
        self.live.contains_key(&(name.clone(), nonce))
    }

    fn purge(&mut self, now: SimTime) {
        while let Some((until, _, _)) = self.order.front() {
            if *until > now {
                break;
            }
            let (until, name, nonce) = self.order.pop_front().expect("front exists");
            let key = (name, nonce);
            if self.live.get(&key) == Some(&until) {
                self.live.remove(&key);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }
}
