//! Addressable binary min-heap over dense vertex ids.
//!
//! Ties between equal keys are broken by id, which makes the pop order a
//! pure function of the pushed (key, id) pairs.

use crate::weight::Weight;

const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct IndexedHeap<W> {
    heap: Vec<(W, u32)>,
    pos: Vec<u32>,
}

impl<W: Weight> IndexedHeap<W> {
    pub fn new(capacity: usize) -> Self {
        IndexedHeap {
            heap: Vec::new(),
            pos: vec![ABSENT; capacity],
        }
    }

    pub fn capacity(&self) -> usize {
        self.pos.len()
    }

    /// Grows the id space; existing entries are kept.
    pub fn reserve_ids(&mut self, n: usize) {
        if self.pos.len() < n {
            self.pos.resize(n, ABSENT);
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.heap.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    #[inline]
    pub fn contains(&self, id: usize) -> bool {
        self.pos[id] != ABSENT
    }

    #[inline]
    pub fn key(&self, id: usize) -> Option<W> {
        let p = self.pos[id];
        (p != ABSENT).then(|| self.heap[p as usize].0)
    }

    #[inline]
    pub fn peek(&self) -> Option<(usize, W)> {
        self.heap.first().map(|&(k, v)| (v as usize, k))
    }

    #[inline]
    pub fn min_key(&self) -> Option<W> {
        self.heap.first().map(|e| e.0)
    }

    /// Inserts `id` or lowers its key. Returns false if the stored key was
    /// already at most `key`.
    #[inline]
    pub fn push_or_decrease(&mut self, id: usize, key: W) -> bool {
        let p = self.pos[id];
        if p == ABSENT {
            let i = self.heap.len();
            self.heap.push((key, id as u32));
            self.pos[id] = i as u32;
            self.sift_up(i);
            true
        } else if key < self.heap[p as usize].0 {
            self.heap[p as usize].0 = key;
            self.sift_up(p as usize);
            true
        } else {
            false
        }
    }

    #[inline]
    pub fn pop(&mut self) -> Option<(usize, W)> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top.1 as usize] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last.1 as usize] = 0;
            self.sift_down(0);
        }
        Some((top.1 as usize, top.0))
    }

    /// Remaining entries in heap-array order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, W)> + '_ {
        self.heap.iter().map(|&(k, v)| (v as usize, k))
    }

    /// Empties the heap in time proportional to its size.
    pub fn clear(&mut self) {
        for &(_, v) in &self.heap {
            self.pos[v as usize] = ABSENT;
        }
        self.heap.clear();
    }

    #[inline]
    fn sift_up(&mut self, mut i: usize) {
        let item = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.heap[parent] <= item {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i].1 as usize] = i as u32;
            i = parent;
        }
        self.heap[i] = item;
        self.pos[item.1 as usize] = i as u32;
    }

    #[inline]
    fn sift_down(&mut self, mut i: usize) {
        let item = self.heap[i];
        let n = self.heap.len();
        loop {
            let mut child = 2 * i + 1;
            if child >= n {
                break;
            }
            if child + 1 < n && self.heap[child + 1] < self.heap[child] {
                child += 1;
            }
            if item <= self.heap[child] {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i].1 as usize] = i as u32;
            i = child;
        }
        self.heap[i] = item;
        self.pos[item.1 as usize] = i as u32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decrease_key_and_ties() {
        let mut h = IndexedHeap::<u32>::new(5);
        h.push_or_decrease(3, 7);
        h.push_or_decrease(1, 7);
        h.push_or_decrease(4, 9);
        assert!(!h.push_or_decrease(4, 10));
        assert!(h.push_or_decrease(4, 2));
        assert_eq!(h.pop(), Some((4, 2)));
        assert_eq!(h.pop(), Some((1, 7)));
        assert_eq!(h.pop(), Some((3, 7)));
        assert_eq!(h.pop(), None);
    }

    proptest! {
        #[test]
        fn pops_sorted(ops in prop::collection::vec((0usize..40, 0u32..100), 0..200)) {
            let mut h = IndexedHeap::<u32>::new(40);
            let mut best = std::collections::BTreeMap::new();
            for (id, k) in ops {
                h.push_or_decrease(id, k);
                let e = best.entry(id).or_insert(k);
                *e = (*e).min(k);
            }
            let mut expect: Vec<(u32, usize)> = best.into_iter().map(|(id, k)| (k, id)).collect();
            expect.sort();
            let mut got = Vec::new();
            while let Some((id, k)) = h.pop() {
                got.push((k, id));
            }
            prop_assert_eq!(got, expect);
        }
    }
}
