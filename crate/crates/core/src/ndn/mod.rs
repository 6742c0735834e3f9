//! Named-data forwarding: names, packets, the three forwarding tables and
//! the DAF pipeline.

mod cs;
mod forwarder;
mod name;
mod packet;
mod tables;

pub use cs::ContentStore;
pub use forwarder::{Action, Forwarder, ForwarderConfig, ForwarderStats, LinkDst, PitEvent, PitEventKind};
pub use name::Name;
pub use packet::{default_cm_threshold, mark_congestion, Data, Interest, Packet, DATA_OVERHEAD, INTEREST_OVERHEAD};
pub use tables::{DeadNonceList, Face, Fib, FibEntry, Pit, PitEntry};
