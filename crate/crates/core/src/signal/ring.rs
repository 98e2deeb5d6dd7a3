/// Fixed-capacity circular store addressed by absolute sample index.
/// Once full, each push overwrites the oldest element.
#[derive(Debug, Clone)]
pub struct RingBuffer<T> {
    buf: Vec<T>,
    capacity: usize,
    write_index: usize,
    total: u64,
}

impl<T: Clone> RingBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "ring buffer capacity must be positive");
        Self {
            buf: Vec::with_capacity(capacity),
            capacity,
            write_index: 0,
            total: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    /// Number of elements ever pushed; also the absolute index of the next push.
    pub fn total_pushed(&self) -> u64 {
        self.total
    }

    /// Absolute index of the oldest retained element.
    pub fn oldest_index(&self) -> u64 {
        self.total - self.buf.len() as u64
    }

    pub fn push(&mut self, item: T) {
        if self.buf.len() < self.capacity {
            self.buf.push(item);
        } else {
            self.buf[self.write_index] = item;
        }
        self.write_index = (self.write_index + 1) % self.capacity;
        self.total += 1;
    }

    /// Element at absolute index `abs`, if still retained.
    pub fn get(&self, abs: u64) -> Option<&T> {
        if abs >= self.total || abs < self.oldest_index() {
            return None;
        }
        let back = (self.total - abs) as usize;
        let pos = (self.write_index + self.capacity - back) % self.capacity;
        self.buf.get(pos)
    }

    /// Copies absolute indices `[from, to]` in order, or `None` if any of
    /// them has been evicted or not yet written.
    pub fn range(&self, from: u64, to: u64) -> Option<Vec<T>> {
        if from > to || from < self.oldest_index() || to >= self.total {
            return None;
        }
        Some((from..=to).map(|i| self.get(i).cloned().unwrap()).collect())
    }

    /// Retained contents, oldest first.
    pub fn to_vec(&self) -> Vec<T> {
        if self.total == 0 {
            return Vec::new();
        }
        self.range(self.oldest_index(), self.total - 1).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evicts_oldest_first() {
        let mut r = RingBuffer::new(3);
        for i in 0..5 {
            r.push(i);
        }
        assert_eq!(r.len(), 3);
        assert_eq!(r.to_vec(), vec![2, 3, 4]);
        assert_eq!(r.oldest_index(), 2);
        assert_eq!(r.get(1), None);
        assert_eq!(r.get(4), Some(&4));
        assert_eq!(r.get(5), None);
        assert_eq!(r.range(2, 3), Some(vec![2, 3]));
        assert_eq!(r.range(1, 3), None);
    }

    #[test]
    fn partial_fill() {
        let mut r = RingBuffer::new(8);
        r.push('a');
        r.push('b');
        assert_eq!(r.to_vec(), vec!['a', 'b']);
        assert_eq!(r.oldest_index(), 0);
        assert_eq!(r.total_pushed(), 2);
    }
}
