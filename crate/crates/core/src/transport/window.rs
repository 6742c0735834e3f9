//! AIMD window control with conservative window adaptation and the
//! hop-count window limit.

/// Consumer-side congestion state, in Interests.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionState {
    pub cwnd: f64,
    pub ssthresh: f64,
    pub beta: f64,
    /// Highest sequence outstanding at the last admitted decrease.
    pub recovery_seq: u64,
}

impl Default for CongestionState {
    fn default() -> Self {
        CongestionState {
            cwnd: 1.0,
            ssthresh: f64::INFINITY,
            beta: 0.5,
            recovery_seq: 0,
        }
    }
}

impl CongestionState {
    /// Slow start below ssthresh, otherwise congestion avoidance.
    pub fn window_increase(&mut self) {
        if self.cwnd < self.ssthresh {
            self.cwnd += 1.0;
        } else {
            self.cwnd += 1.0 / self.cwnd;
        }
    }

    pub fn window_decrease(&mut self) {
        self.ssthresh = self.cwnd * self.beta;
        self.cwnd = self.ssthresh.max(1.0);
    }

    /// At most one decrease per window: a loss or mark on `seq` counts only if
    /// `seq` was sent after the previous decrease.
    pub fn cwa_admit(&mut self, seq: u64, highest_sent: u64) -> bool {
        if seq > self.recovery_seq {
            self.recovery_seq = highest_sent;
            true
        } else {
            false
        }
    }

    pub fn apply_cwl(&mut self, hop_count: u32) {
        self.cwnd = self.cwnd.min(cwl_from_hops(hop_count) as f64);
    }
}

/// Window limit from the Data's hop count (half the round-trip hop count).
/// Past 15 hops the limit grows as `ceil(hops / 3)`.
pub fn cwl_from_hops(hop_count: u32) -> u32 {
    match hop_count.max(1) {
        0..=2 => 2,
        3..=4 => 1,
        5..=6 => 2,
        7..=10 => 3,
        11..=13 => 4,
        14..=15 => 5,
        h => h.div_ceil(3),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(cwnd: f64, ssthresh: f64) -> CongestionState {
        CongestionState {
            cwnd,
            ssthresh,
            ..CongestionState::default()
        }
    }

    #[test]
    fn increase_branches() {
        let mut s = CongestionState::default();
        s.window_increase();
        assert_eq!(s.cwnd, 2.0);

        let mut s = state(4.0, 2.0);
        s.window_increase();
        assert_eq!(s.cwnd, 4.25);

        let mut s = state(2.0, 2.0);
        s.window_increase();
        assert_eq!(s.cwnd, 2.5);
    }

    #[test]
    fn decrease_floors_at_one() {
        for (before, ss, after) in [(10.0, 5.0, 5.0), (1.0, 0.5, 1.0), (3.0, 1.5, 1.5)] {
            let mut s = state(before, f64::INFINITY);
            s.window_decrease();
            assert_eq!((s.ssthresh, s.cwnd), (ss, after));
        }
    }

    #[test]
    fn cwa_gate() {
        let mut s = CongestionState::default();
        assert!(s.cwa_admit(5, 12));
        assert_eq!(s.recovery_seq, 12);
        assert!(!s.cwa_admit(9, 14));
        assert_eq!(s.recovery_seq, 12);
        assert!(s.cwa_admit(13, 20));
        assert_eq!(s.recovery_seq, 20);
    }

    #[test]
    fn cwl_table() {
        let expected = [2, 2, 1, 1, 2, 2, 3, 3, 3, 3, 4, 4, 4, 5, 5];
        for (h, want) in (1..=15).zip(expected) {
            assert_eq!(cwl_from_hops(h), want, "hop_count {h}");
        }
        assert_eq!(cwl_from_hops(0), 2);
        assert_eq!(cwl_from_hops(16), 6);
        assert_eq!(cwl_from_hops(18), 6);
        assert_eq!(cwl_from_hops(19), 7);
    }

    #[test]
    fn cwl_clamp() {
        let mut s = state(4.25, 2.0);
        s.apply_cwl(3);
        assert_eq!(s.cwnd, 1.0);
        let mut s = state(2.0, 2.0);
        s.apply_cwl(12);
        assert_eq!(s.cwnd, 2.0);
    }
}
