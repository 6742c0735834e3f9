//! Discrete-event simulator for adaptive-rate named-data transport over
//! wireless ad-hoc and wired chain networks.

pub mod error;
pub mod experiment;
pub mod invariants;
pub mod mac;
pub mod ndn;
pub mod sim;
pub mod topology;
pub mod transport;
pub mod world;

pub use error::{Error, Result};

pub type NodeId = usize;
