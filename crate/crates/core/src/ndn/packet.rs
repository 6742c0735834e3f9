use super::Name;
use crate::sim::SimTime;

/// Fixed Interest header bytes on top of the name.
pub const INTEREST_OVERHEAD: u32 = 20;
/// Fixed Data header bytes on top of name and payload.
pub const DATA_OVERHEAD: u32 = 28;

#[derive(Debug, Clone, PartialEq)]
pub struct Interest {
    pub name: Name,
    pub nonce: u32,
    pub lifetime: SimTime,
    pub hop_count: u32,
}

impl Interest {
    pub fn new(name: Name, nonce: u32, lifetime: SimTime) -> Self {
        Interest {
            name,
            nonce,
            lifetime,
            hop_count: 0,
        }
    }

    pub fn wire_size(&self) -> u32 {
        self.name.wire_len() + INTEREST_OVERHEAD
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Data {
    pub name: Name,
    pub payload_size: u32,
    pub hop_count: u32,
    pub cm_flag: bool,
}

impl Data {
    pub fn new(name: Name, payload_size: u32) -> Self {
        Data {
            name,
            payload_size,
            hop_count: 0,
            cm_flag: false,
        }
    }

    pub fn wire_size(&self) -> u32 {
        self.name.wire_len() + self.payload_size + DATA_OVERHEAD
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Packet {
    Interest(Interest),
    Data(Data),
}

impl Packet {
    pub fn name(&self) -> &Name {
        match self {
            Packet::Interest(i) => &i.name,
            Packet::Data(d) => &d.name,
        }
    }

    pub fn wire_size(&self) -> u32 {
        match self {
            Packet::Interest(i) => i.wire_size(),
            Packet::Data(d) => d.wire_size(),
        }
    }

    pub fn is_data(&self) -> bool {
        matches!(self, Packet::Data(_))
    }
}

/// Set the congestion mark when the outgoing queue holds at least
/// `threshold` frames at enqueue time. Marks are never cleared downstream.
pub fn mark_congestion(data: &mut Data, queue_len: usize, threshold: usize) {
    if queue_len >= threshold {
        data.cm_flag = true;
    }
}

/// Default marking threshold: half the queue, rounded up.
pub fn default_cm_threshold(capacity: usize) -> usize {
    capacity.div_ceil(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let name: Name = "/a/img.png".parse().unwrap();
        assert_eq!(Interest::new(name.clone(), 1, SimTime::from_secs(2)).wire_size(), 30);
        assert_eq!(Data::new(name, 512).wire_size(), 550);
    }

    #[test]
    fn marking_threshold() {
        assert_eq!(default_cm_threshold(25), 13);
        let mut d = Data::new("/A/seq=1".parse().unwrap(), 512);
        mark_congestion(&mut d, 0, 13);
        assert!(!d.cm_flag);
        mark_congestion(&mut d, 12, 13);
        assert!(!d.cm_flag);
        mark_congestion(&mut d, 13, 13);
        assert!(d.cm_flag);
        // persists through later uncongested hops
        mark_congestion(&mut d, 0, 13);
        assert!(d.cm_flag);
    }
}
