//! Consumer and producer applications.

mod consumer;
mod producer;
mod rtt;
mod window;

pub use consumer::{
    interest_lifetime, timeout_deadline, Consumer, ConsumerConfig, ConsumerStats, Express, OutstandingInterest,
    TraceEvent, TraceRecord,
};
pub use producer::Producer;
pub use rtt::{RtoParams, RttEstimator};
pub use window::{cwl_from_hops, CongestionState};
