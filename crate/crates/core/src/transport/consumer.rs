//! Adaptive-rate consumer: pipelined Interests, out-of-order acceptance,
//! RTO-driven retransmission and the DIL lifetime rule.

use std::collections::BTreeMap;

use super::rtt::{RtoParams, RttEstimator};
use super::window::{cwl_from_hops, CongestionState};
use crate::invariants::Violations;
use crate::ndn::{Data, Interest, Name};
use crate::sim::{RandomStream, SimTime};

#[derive(Debug, Clone, PartialEq)]
pub struct ConsumerConfig {
    pub prefix: Name,
    pub cwl_enabled: bool,
    pub dil_enabled: bool,
    pub gamma: f64,
    /// Interest lifetime in seconds when DIL is off.
    pub fixed_lifetime: f64,
    pub rto: RtoParams,
    /// Stop after this many sequences; `None` requests forever.
    pub max_seq: Option<u64>,
}

impl ConsumerConfig {
    pub fn new(prefix: Name) -> Self {
        ConsumerConfig {
            prefix,
            cwl_enabled: false,
            dil_enabled: false,
            gamma: 2.0,
            fixed_lifetime: 2.0,
            rto: RtoParams::default(),
            max_seq: None,
        }
    }
}

/// Lifetime for the next Interest: the current RTO under DIL, else the fixed value.
pub fn interest_lifetime(cfg: &ConsumerConfig, est: &RttEstimator) -> f64 {
    if cfg.dil_enabled {
        est.rto()
    } else {
        cfg.fixed_lifetime
    }
}

/// Application timeout for an Interest sent at `sent_at` (seconds).
pub fn timeout_deadline(cfg: &ConsumerConfig, est: &RttEstimator, sent_at: f64) -> f64 {
    if cfg.dil_enabled {
        sent_at + est.rto() * cfg.gamma
    } else {
        sent_at + est.rto()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutstandingInterest {
    pub seq: u64,
    pub sent_at: SimTime,
    pub nonce: u32,
    pub is_retransmission: bool,
    pub deadline: SimTime,
    pub token: u64,
    pub retries: u32,
}

/// An Interest to hand to the local forwarder plus the timer to arm for it.
#[derive(Debug, Clone, PartialEq)]
pub struct Express {
    pub interest: Interest,
    pub seq: u64,
    pub token: u64,
    pub deadline: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    Data,
    Timeout,
    Mark,
}

impl TraceEvent {
    pub fn as_str(self) -> &'static str {
        match self {
            TraceEvent::Data => "data",
            TraceEvent::Timeout => "timeout",
            TraceEvent::Mark => "cm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub time: SimTime,
    pub cwnd: f64,
    pub srtt: Option<f64>,
    pub rto: f64,
    pub event: TraceEvent,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConsumerStats {
    pub interests_sent: u64,
    pub retransmissions: u64,
    pub timeouts: u64,
    pub unique_data: u64,
    pub unique_bytes: u64,
    pub duplicates: u64,
    pub cm_marks: u64,
    pub decreases: u64,
    pub rtt_sum: f64,
    pub rtt_samples: u64,
    pub hop_sum: u64,
    cwnd_integral: f64,
    cwnd_since: SimTime,
}

impl ConsumerStats {
    pub fn mean_rtt(&self) -> Option<f64> {
        (self.rtt_samples > 0).then(|| self.rtt_sum / self.rtt_samples as f64)
    }

    pub fn mean_hops(&self) -> Option<f64> {
        (self.unique_data > 0).then(|| self.hop_sum as f64 / self.unique_data as f64)
    }
}

pub struct Consumer {
    cfg: ConsumerConfig,
    cong: CongestionState,
    rtt: RttEstimator,
    next_seq: u64,
    outstanding: BTreeMap<u64, OutstandingInterest>,
    satisfied: Vec<bool>,
    satisfied_count: u64,
    next_token: u64,
    nonces: RandomStream,
    stats: ConsumerStats,
    started_at: SimTime,
    trace: Option<Vec<TraceRecord>>,
    audit: Option<Violations>,
}

impl Consumer {
    pub fn new(cfg: ConsumerConfig, nonces: RandomStream) -> Self {
        let rtt = RttEstimator::new(cfg.rto);
        Consumer {
            cfg,
            cong: CongestionState::default(),
            rtt,
            next_seq: 1,
            outstanding: BTreeMap::new(),
            satisfied: Vec::new(),
            satisfied_count: 0,
            next_token: 0,
            nonces,
            stats: ConsumerStats::default(),
            started_at: SimTime::ZERO,
            trace: None,
            audit: None,
        }
    }

    pub fn enable_trace(&mut self) {
        self.trace = Some(Vec::new());
    }

    pub fn enable_audit(&mut self) {
        self.audit = Some(Violations::default());
    }

    pub fn config(&self) -> &ConsumerConfig {
        &self.cfg
    }

    pub fn prefix(&self) -> &Name {
        &self.cfg.prefix
    }

    pub fn congestion(&self) -> &CongestionState {
        &self.cong
    }

    pub fn rtt(&self) -> &RttEstimator {
        &self.rtt
    }

    pub fn stats(&self) -> &ConsumerStats {
        &self.stats
    }

    pub fn trace(&self) -> &[TraceRecord] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn violations(&self) -> Violations {
        self.audit.unwrap_or_default()
    }

    pub fn outstanding(&self) -> &BTreeMap<u64, OutstandingInterest> {
        &self.outstanding
    }

    /// Highest sequence sent so far (0 before the first send).
    pub fn highest_sent(&self) -> u64 {
        self.next_seq - 1
    }

    pub fn is_satisfied(&self, seq: u64) -> bool {
        self.satisfied.get(seq as usize).copied().unwrap_or(false)
    }

    /// Time-weighted mean of cwnd from start up to `now`.
    pub fn mean_cwnd(&self, now: SimTime) -> f64 {
        let elapsed = now.saturating_sub(self.started_at).as_secs_f64();
        if elapsed <= 0.0 {
            return self.cong.cwnd;
        }
        let tail = now.saturating_sub(self.stats.cwnd_since).as_secs_f64() * self.cong.cwnd;
        (self.stats.cwnd_integral + tail) / elapsed
    }

    pub fn start(&mut self, now: SimTime) -> Vec<Express> {
        self.started_at = now;
        self.stats.cwnd_since = now;
        let mut out = Vec::new();
        self.fill_window(now, &mut out);
        out
    }

    /// Seen at the consumer's node for an already-satisfied sequence.
    pub fn note_redundant(&mut self, data: &Data) -> bool {
        match data.name.seq() {
            Some(seq) if self.cfg.prefix.is_prefix_of(&data.name) && self.is_satisfied(seq) => {
                self.stats.duplicates += 1;
                true
            }
            _ => false,
        }
    }

    pub fn on_data(&mut self, now: SimTime, data: &Data) -> Vec<Express> {
        let mut out = Vec::new();
        let Some(seq) = data.name.seq().filter(|_| self.cfg.prefix.is_prefix_of(&data.name)) else {
            return out;
        };
        if self.is_satisfied(seq) {
            self.stats.duplicates += 1;
            return out;
        }
        let Some(rec) = self.outstanding.remove(&seq) else {
            return out;
        };
        self.mark_satisfied(seq);
        self.stats.unique_data += 1;
        self.stats.unique_bytes += data.payload_size as u64;
        self.stats.hop_sum += data.hop_count as u64;
        if !rec.is_retransmission {
            let sample = (now - rec.sent_at).as_secs_f64();
            if self.rtt.on_sample(sample).is_ok() {
                self.stats.rtt_sum += sample;
                self.stats.rtt_samples += 1;
            }
        }

        self.set_cwnd_at(now, |c| c.window_increase());
        if self.cfg.cwl_enabled {
            self.set_cwnd_at(now, |c| c.apply_cwl(data.hop_count));
        }
        if data.cm_flag {
            self.stats.cm_marks += 1;
            self.congestion_event(now, seq);
        }
        self.record(now, if data.cm_flag { TraceEvent::Mark } else { TraceEvent::Data });
        self.fill_window(now, &mut out);

        if let Some(v) = self.audit.as_mut() {
            if self.cfg.cwl_enabled && self.cong.cwnd > cwl_from_hops(data.hop_count) as f64 {
                v.cwl_clamp += 1;
            }
        }
        self.audit_common();
        out
    }

    pub fn on_timeout(&mut self, now: SimTime, seq: u64, token: u64) -> Vec<Express> {
        let mut out = Vec::new();
        match self.outstanding.get(&seq) {
            Some(rec) if rec.token == token => {}
            _ => return out,
        }
        self.stats.timeouts += 1;
        self.congestion_event(now, seq);
        self.rtt.backoff();
        self.record(now, TraceEvent::Timeout);

        let retries = self.outstanding[&seq].retries + 1;
        let exp = self.express(now, seq, true, retries);
        self.stats.retransmissions += 1;
        out.push(exp);
        self.fill_window(now, &mut out);
        self.audit_common();
        out
    }

    fn congestion_event(&mut self, now: SimTime, seq: u64) {
        let before = self.cong.recovery_seq;
        if self.cong.cwa_admit(seq, self.highest_sent()) {
            if let Some(v) = self.audit.as_mut() {
                if seq <= before {
                    v.cwa_single_decrease += 1;
                }
            }
            self.stats.decreases += 1;
            self.set_cwnd_at(now, |c| c.window_decrease());
        }
    }

    fn fill_window(&mut self, now: SimTime, out: &mut Vec<Express>) {
        while (self.outstanding.len() as f64) < self.cong.cwnd.floor() {
            if self.cfg.max_seq.is_some_and(|m| self.next_seq > m) {
                break;
            }
            let seq = self.next_seq;
            self.next_seq += 1;
            out.push(self.express(now, seq, false, 0));
        }
    }

    fn express(&mut self, now: SimTime, seq: u64, is_retransmission: bool, retries: u32) -> Express {
        let nonce = self.nonces.next_u32();
        let lifetime = SimTime::from_secs_f64(interest_lifetime(&self.cfg, &self.rtt));
        let deadline_s = timeout_deadline(&self.cfg, &self.rtt, now.as_secs_f64());
        let deadline = SimTime::from_secs_f64(deadline_s).max(now + SimTime::from_micros(1));
        let token = self.next_token;
        self.next_token += 1;
        self.outstanding.insert(
            seq,
            OutstandingInterest {
                seq,
                sent_at: now,
                nonce,
                is_retransmission,
                deadline,
                token,
                retries,
            },
        );
        self.stats.interests_sent += 1;
        Express {
            interest: Interest::new(self.cfg.prefix.with_seq(seq), nonce, lifetime),
            seq,
            token,
            deadline,
        }
    }

    fn mark_satisfied(&mut self, seq: u64) {
        let idx = seq as usize;
        if self.satisfied.len() <= idx {
            self.satisfied.resize(idx + 1, false);
        }
        self.satisfied[idx] = true;
        self.satisfied_count += 1;
    }

    fn set_cwnd_at(&mut self, now: SimTime, f: impl FnOnce(&mut CongestionState)) {
        let dt = now.saturating_sub(self.stats.cwnd_since).as_secs_f64();
        self.stats.cwnd_integral += dt * self.cong.cwnd;
        self.stats.cwnd_since = now;
        f(&mut self.cong);
    }

    fn record(&mut self, time: SimTime, event: TraceEvent) {
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceRecord {
                time,
                cwnd: self.cong.cwnd,
                srtt: self.rtt.srtt(),
                rto: self.rtt.rto(),
                event,
            });
        }
    }

    fn audit_common(&mut self) {
        let Some(v) = self.audit.as_mut() else {
            return;
        };
        if self.cong.cwnd < 1.0 {
            v.cwnd_floor += 1;
        }
        let sent = self.next_seq - 1;
        if sent != self.satisfied_count + self.outstanding.len() as u64 {
            v.outstanding_conservation += 1;
        }
    }
}
