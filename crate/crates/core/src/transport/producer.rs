use crate::ndn::{Data, Interest, Name};

/// Answers every Interest under its prefix with a fixed-size Data.
#[derive(Debug, Clone)]
pub struct Producer {
    prefix: Name,
    payload_size: u32,
    served: u64,
}

impl Producer {
    pub fn new(prefix: Name, payload_size: u32) -> Self {
        Producer {
            prefix,
            payload_size,
            served: 0,
        }
    }

    pub fn prefix(&self) -> &Name {
        &self.prefix
    }

    pub fn served(&self) -> u64 {
        self.served
    }

    pub fn on_interest(&mut self, interest: &Interest) -> Option<Data> {
        if !self.prefix.is_prefix_of(&interest.name) {
            return None;
        }
        self.served += 1;
        Some(Data::new(interest.name.clone(), self.payload_size))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::SimTime;

    fn interest(name: &str) -> Interest {
        Interest::new(name.parse().unwrap(), 1, SimTime::from_secs(2))
    }

    #[test]
    fn serves_own_prefix_only() {
        let mut p = Producer::new("/A".parse().unwrap(), 512);
        let d = p.on_interest(&interest("/A/seq=9")).unwrap();
        assert_eq!(d.name.to_string(), "/A/seq=9");
        assert_eq!((d.payload_size, d.hop_count, d.cm_flag), (512, 0, false));
        assert!(p.on_interest(&interest("/B/seq=1")).is_none());
        assert_eq!(p.on_interest(&interest("/A/seq=9")), Some(d));
    }
}
