//! Deterministic discrete-event core: fixed-point clock, event queue and
//! seeded random streams.

mod engine;
mod rng;
mod time;

pub use engine::{Engine, EventHandle};
pub use rng::{RandomStream, RandomStreams};
pub use time::SimTime;
