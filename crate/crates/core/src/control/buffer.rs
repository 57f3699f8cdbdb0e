use std::collections::VecDeque;

/// FIFO buffer of the last `capacity` BER reports.
#[derive(Debug, Clone, PartialEq)]
pub struct BerBuffer {
    entries: VecDeque<f64>,
    capacity: usize,
}

impl BerBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "buffer capacity must be at least 1");
        BerBuffer {
            entries: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    /// A buffer holding the single value 0, the controller's start state.
    pub fn with_initial_zero(capacity: usize) -> Self {
        let mut b = BerBuffer::new(capacity);
        b.push(0.0);
        b
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().copied()
    }

    pub fn values(&self) -> Vec<f64> {
        self.iter().collect()
    }

    /// Appends a value. Panics when full; callers evict first.
    pub fn push(&mut self, value: f64) {
        assert!(!self.is_full(), "push into a full BER buffer");
        self.entries.push_back(value);
    }

    pub fn evict_oldest(&mut self) -> Option<f64> {
        self.entries.pop_front()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}
