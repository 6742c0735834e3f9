use std::num::NonZeroUsize;

use lru::LruCache;

use super::{Data, Name};

/// LRU packet cache keyed by exact name. Capacity 0 disables it.
pub struct ContentStore {
    cache: Option<LruCache<Name, Data>>,
    capacity: usize,
}

impl ContentStore {
    pub fn new(capacity: usize) -> Self {
        ContentStore {
            cache: NonZeroUsize::new(capacity).map(LruCache::new),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.cache.as_ref().map_or(0, LruCache::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Exact-name lookup; a hit refreshes recency.
    pub fn lookup(&mut self, name: &Name) -> Option<&Data> {
        self.cache.as_mut()?.get(name)
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.cache.as_ref().is_some_and(|c| c.contains(name))
    }

    pub fn insert(&mut self, data: Data) {
        if let Some(cache) = self.cache.as_mut() {
            cache.put(data.name.clone(), data);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(seq: u64) -> Data {
        let prefix: Name = "/A".parse().unwrap();
        Data::new(prefix.with_seq(seq), 512)
    }

    #[test]
    fn zero_capacity_never_hits() {
        let mut cs = ContentStore::new(0);
        cs.insert(data(1));
        assert_eq!(cs.len(), 0);
        assert!(cs.lookup(&data(1).name).is_none());
    }

    #[test]
    fn evicts_least_recently_used() {
        let mut cs = ContentStore::new(2);
        cs.insert(data(1));
        cs.insert(data(2));
        assert!(cs.lookup(&data(1).name).is_some());
        cs.insert(data(3));
        assert_eq!(cs.len(), 2);
        assert!(cs.contains(&data(1).name));
        assert!(!cs.contains(&data(2).name));
        assert!(cs.contains(&data(3).name));
    }
}
