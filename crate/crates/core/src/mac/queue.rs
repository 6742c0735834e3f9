use std::collections::VecDeque;

use super::Frame;

/// Drop-tail FIFO.
#[derive(Debug, Clone)]
pub struct NicQueue {
    frames: VecDeque<Frame>,
    capacity: usize,
    drops: u64,
}

impl NicQueue {
    pub fn new(capacity: usize) -> Self {
        NicQueue {
            frames: VecDeque::with_capacity(capacity),
            capacity,
            drops: 0,
        }
    }

    /// Appends unless full; a full queue drops the frame and counts it.
    pub fn enqueue(&mut self, frame: Frame) -> bool {
        if self.frames.len() >= self.capacity {
            self.drops += 1;
            false
        } else {
            self.frames.push_back(frame);
            true
        }
    }

    pub fn front(&self) -> Option<&Frame> {
        self.frames.front()
    }

    pub fn front_mut(&mut self) -> Option<&mut Frame> {
        self.frames.front_mut()
    }

    pub fn dequeue(&mut self) -> Option<Frame> {
        self.frames.pop_front()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn drops(&self) -> u64 {
        self.drops
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ndn::{Data, LinkDst, Packet};

    fn frame(seq: u64) -> Frame {
        let name = "/A".parse::<crate::ndn::Name>().unwrap().with_seq(seq);
        Frame::new(Packet::Data(Data::new(name, 512)), 0, LinkDst::Broadcast)
    }

    #[test]
    fn drop_tail_at_capacity() {
        let mut q = NicQueue::new(25);
        assert!(q.enqueue(frame(0)));
        for s in 1..25 {
            assert!(q.enqueue(frame(s)));
        }
        assert!(!q.enqueue(frame(25)));
        assert_eq!((q.len(), q.drops()), (25, 1));
    }

    #[test]
    fn fifo_order() {
        let mut q = NicQueue::new(5);
        for s in 0..5 {
            q.enqueue(frame(s));
        }
        let order: Vec<_> = std::iter::from_fn(|| q.dequeue())
            .map(|f| f.packet.name().seq().unwrap())
            .collect();
        assert_eq!(order, vec![0, 1, 2, 3, 4]);
    }
}
