//! Runtime invariant counters. Checks run only when auditing is switched on
//! for a simulation; each violated property bumps its counter.

use std::fmt;
use std::ops::AddAssign;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Violations {
    /// A node forwarded the same (name, nonce) twice.
    pub loop_freedom: u64,
    /// pit_count disagrees with the distinct nonces, or an entry outlived its expiry.
    pub pit_accounting: u64,
    pub cs_capacity: u64,
    /// Unicast sent through a FIB entry older than its RTO.
    pub fib_validity: u64,
    /// sent - satisfied - outstanding != 0 for a consumer.
    pub outstanding_conservation: u64,
    pub cwnd_floor: u64,
    /// cwnd above the hop-count limit right after a Data was processed.
    pub cwl_clamp: u64,
    /// More than one multiplicative decrease inside one recovery window.
    pub cwa_single_decrease: u64,
}

impl Violations {
    pub fn total(&self) -> u64 {
        self.rows().iter().map(|(_, v)| v).sum()
    }

    pub fn rows(&self) -> [(&'static str, u64); 8] {
        [
            ("loop_freedom", self.loop_freedom),
            ("pit_accounting", self.pit_accounting),
            ("cs_capacity", self.cs_capacity),
            ("fib_validity", self.fib_validity),
            ("outstanding_conservation", self.outstanding_conservation),
            ("cwnd_floor", self.cwnd_floor),
            ("cwl_clamp", self.cwl_clamp),
            ("cwa_single_decrease", self.cwa_single_decrease),
        ]
    }
}

impl AddAssign for Violations {
    fn add_assign(&mut self, o: Violations) {
        self.loop_freedom += o.loop_freedom;
        self.pit_accounting += o.pit_accounting;
        self.cs_capacity += o.cs_capacity;
        self.fib_validity += o.fib_validity;
        self.outstanding_conservation += o.outstanding_conservation;
        self.cwnd_floor += o.cwnd_floor;
        self.cwl_clamp += o.cwl_clamp;
        self.cwa_single_decrease += o.cwa_single_decrease;
    }
}

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows().iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(" "))
    }
}
