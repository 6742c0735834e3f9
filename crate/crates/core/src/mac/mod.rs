//! Link layer: drop-tail NIC queues, a CSMA broadcast channel over the unit
//! disk, and point-to-point wired links with per-byte corruption.

mod queue;
mod wired;
mod wireless;

pub use queue::NicQueue;
pub use wired::{WiredLink, WiredNetwork};
pub use wireless::{WirelessChannel, WirelessConfig};

use crate::ndn::{LinkDst, Packet};
use crate::sim::{Engine, SimTime};
use crate::NodeId;

/// Per-frame link-layer header bytes.
pub const LINK_OVERHEAD: u32 = 34;

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub packet: Packet,
    pub src: NodeId,
    pub dst: LinkDst,
    pub attempts: u32,
}

impl Frame {
    pub fn new(packet: Packet, src: NodeId, dst: LinkDst) -> Self {
        Frame {
            packet,
            src,
            dst,
            attempts: 0,
        }
    }

    pub fn size_bytes(&self) -> u32 {
        self.packet.wire_size() + LINK_OVERHEAD
    }

    pub fn size_bits(&self) -> u64 {
        self.size_bytes() as u64 * 8
    }
}

/// A frame handed up to the forwarder of `to`.
#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    pub to: NodeId,
    pub from: NodeId,
    pub packet: Packet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacEvent {
    BackoffEnd { node: NodeId, token: u64 },
    TxEnd { tx: u64 },
    WiredTxEnd { link: usize },
    WiredArrival { link: usize, slot: u64 },
}

/// Lets the link layer arm timers on whatever engine the simulation runs.
pub trait MacScheduler {
    fn now(&self) -> SimTime;
    fn schedule_mac(&mut self, at: SimTime, ev: MacEvent);
}

impl<E: From<MacEvent>> MacScheduler for Engine<E> {
    fn now(&self) -> SimTime {
        Engine::now(self)
    }

    fn schedule_mac(&mut self, at: SimTime, ev: MacEvent) {
        self.schedule(at, E::from(ev));
    }
}

/// Who hears `node` right now.
pub trait Reachability {
    fn node_count(&self) -> usize;
    fn neighbors(&self, node: NodeId, now: SimTime) -> Vec<NodeId>;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MacStats {
    pub frames_sent: u64,
    pub interest_frames: u64,
    pub data_frames: u64,
    pub broadcast_frames: u64,
    pub retries: u64,
    pub abandoned: u64,
    pub queue_drops: u64,
    /// Receptions that survived collision and frame error, addressed or not.
    pub receptions: u64,
    pub delivered: u64,
    pub overheard: u64,
    pub collisions: u64,
    pub frame_errors: u64,
    pub out_of_range: u64,
}
