//! Hand-built micro-topologies that replay the retransmission-multicast and
//! cache-redundancy walkthroughs step by step.

use std::fmt;

use crate::ndn::{Data, ForwarderConfig, Name, PitEventKind};
use crate::sim::SimTime;
use crate::transport::{ConsumerConfig, RtoParams};
use crate::world::{Layout, World, WorldOptions};
use crate::NodeId;

/// Builds a symmetric adjacency list from undirected edges.
fn adjacency(n: usize, edges: &[(NodeId, NodeId)]) -> Vec<Vec<NodeId>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    adj
}

pub const RETX_SEED: u64 = 7;
pub const CACHE_SEED: u64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct RetxOutcome {
    pub dil: bool,
    /// Downstream faces of z's entry right after the retransmission reached it.
    pub z_faces_at_retransmission: Option<usize>,
    /// Faces z fanned the Data out to.
    pub z_faces_at_satisfy: Option<usize>,
    pub data_broadcasts: u64,
    pub retransmissions: u64,
    pub satisfied: bool,
}

impl fmt::Display for RetxOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        write!(
            f,
            "retx-multicast {:<5} z_faces_at_retx={} z_faces_at_satisfy={} data_broadcasts={} retransmissions={} satisfied={}",
            if self.dil { "dil" } else { "fixed" },
            show(self.z_faces_at_retransmission),
            show(self.z_faces_at_satisfy),
            self.data_broadcasts,
            self.retransmissions,
            self.satisfied
        )
    }
}

/// Consumer c asks d for `/a/img.png` through x or y and then z.
///
/// The first wave dies at d because a jammer next to d is active; the
/// application retransmits at t = 1 s while a second jammer keeps x deaf, so
/// this time z hears the Interest only through y. With a fixed 2 s lifetime
/// z still holds the first entry (downstream x) and adds y; under DIL the
/// lifetime equals the 0.5 s RTO, the entry is gone, and y is the only
/// downstream.
pub fn retx_multicast(dil: bool) -> RetxOutcome {
    const C: NodeId = 0;
    const X: NodeId = 1;
    const Y: NodeId = 2;
    const Z: NodeId = 3;
    const D: NodeId = 4;
    const JAM_D: NodeId = 5;
    const JAM_X: NodeId = 6;
    let adj = adjacency(
        7,
        &[(C, X), (C, Y), (X, Y), (X, Z), (Y, Z), (Z, D), (JAM_D, D), (JAM_X, X)],
    );
    let mut opts = WorldOptions::new(RETX_SEED);
    opts.pit_log = true;
    let mut w = World::new(Layout::FixedRadio(adj), opts);
    w.set_passive(JAM_D);
    w.set_passive(JAM_X);
    w.schedule_jam(JAM_D, SimTime::ZERO, SimTime::from_millis(300));
    w.schedule_jam(JAM_X, SimTime::from_secs(1), SimTime::from_millis(5));

    let prefix: Name = "/a/img.png".parse().expect("static name");
    w.add_producer(D, prefix.clone(), 512);
    // both variants time out at t = 1 s: plain RTO of 1 s, or 2 x 0.5 s under DIL
    let initial = if dil { 0.5 } else { 1.0 };
    let cfg = ConsumerConfig {
        dil_enabled: dil,
        gamma: 2.0,
        fixed_lifetime: 2.0,
        rto: RtoParams {
            initial,
            ..RtoParams::default()
        },
        max_seq: Some(1),
        ..ConsumerConfig::new(prefix.clone())
    };
    w.add_consumer(C, cfg, SimTime::ZERO);
    w.run(SimTime::from_secs(3));

    let name = prefix.with_seq(1);
    let retx_at = SimTime::from_secs(1);
    let z_log: Vec<_> = w.forwarder(Z).log().iter().filter(|e| e.name == name).collect();
    let z_faces_at_retransmission = z_log
        .iter()
        .find(|e| e.time >= retx_at && matches!(e.kind, PitEventKind::Created | PitEventKind::Aggregated))
        .map(|e| e.faces);
    let z_faces_at_satisfy = z_log
        .iter()
        .find(|e| e.kind == PitEventKind::Satisfied)
        .map(|e| e.faces);
    let totals = w.totals();
    let consumer = w.consumer(C).expect("consumer");
    RetxOutcome {
        dil,
        z_faces_at_retransmission,
        z_faces_at_satisfy,
        data_broadcasts: totals.forwarder.data_broadcasts,
        retransmissions: totals.retransmissions,
        satisfied: consumer.is_satisfied(1),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheOutcome {
    pub cs: usize,
    pub duplicates: u64,
    pub cache_hits: u64,
    pub unique_data: u64,
}

impl fmt::Display for CacheOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cache-redundancy cs={:<3} duplicates={} cache_hits={} unique_data={}",
            self.cs, self.duplicates, self.cache_hits, self.unique_data
        )
    }
}

/// Consumer c reaches producer d1 through a and a second data holder d2
/// through b and e; a and b cannot hear each other. d2 already caches the
/// first 200 segments when the content store is enabled, so discovery
/// broadcasts pull the same Data back over both paths. The extra hop on the
/// second path staggers the two copies; with equal path lengths the hidden
/// terminals a and b collide at c on every attempt.
pub fn cache_redundancy(cs: usize) -> CacheOutcome {
    const C: NodeId = 0;
    const A: NodeId = 1;
    const D1: NodeId = 2;
    const B: NodeId = 3;
    const E: NodeId = 4;
    const D2: NodeId = 5;
    let adj = adjacency(6, &[(C, A), (A, D1), (C, B), (B, E), (E, D2)]);
    let mut opts = WorldOptions::new(CACHE_SEED);
    opts.forwarder = ForwarderConfig {
        cs_capacity: cs,
        ..ForwarderConfig::default()
    };
    let mut w = World::new(Layout::FixedRadio(adj), opts);
    let prefix: Name = "/v".parse().expect("static name");
    w.add_producer(D1, prefix.clone(), 512);
    for seq in 1..=200 {
        w.forwarder_mut(D2).cs_mut().insert(Data::new(prefix.with_seq(seq), 512));
    }
    w.add_consumer(C, ConsumerConfig::new(prefix), SimTime::ZERO);
    w.run(SimTime::from_secs(5));
    let t = w.totals();
    CacheOutcome {
        cs,
        duplicates: t.duplicates,
        cache_hits: t.forwarder.cache_hits,
        unique_data: t.unique_data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_is_symmetric() {
        let adj = adjacency(3, &[(0, 1), (2, 1)]);
        assert_eq!(adj, vec![vec![1], vec![0, 2], vec![1]]);
    }

    #[test]
    fn fixed_lifetime_multicasts() {
        let o = retx_multicast(false);
        assert_eq!(o.z_faces_at_retransmission, Some(2), "{o}");
        assert!(o.data_broadcasts >= 1, "{o}");
        assert!(o.satisfied, "{o}");
    }

    #[test]
    fn dil_single_downstream() {
        let o = retx_multicast(true);
        assert_eq!(o.z_faces_at_retransmission, Some(1), "{o}");
        assert_eq!(o.data_broadcasts, 0, "{o}");
        assert!(o.satisfied, "{o}");
    }

    #[test]
    fn cache_redundancy_duplicates() {
        let on = cache_redundancy(200);
        assert!(on.duplicates >= 1, "{on}");
        let off = cache_redundancy(0);
        assert_eq!(off.cache_hits, 0, "{off}");
    }
}
