//! Per-query working memory: timestamped labels, marks, scratch pools and
//! cached thread pools.

use std::collections::HashMap;
use std::marker::PhantomData;
use std::sync::{Arc, Mutex, OnceLock};

use crate::weight::Weight;

/// Distance labels that reset in O(1) by bumping a generation counter.
#[derive(Clone, Debug)]
pub struct Labels<W> {
    val: Vec<W>,
    stamp: Vec<u32>,
    cur: u32,
}

impl<W: Weight> Labels<W> {
    pub fn new(n: usize) -> Self {
        Labels {
            val: vec![W::INF; n],
            stamp: vec![0; n],
            cur: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.val.len()
    }

    pub fn is_empty(&self) -> bool {
        self.val.is_empty()
    }

    /// Sets every label back to `INF`.
    pub fn reset(&mut self) {
        self.cur = self.cur.wrapping_add(1);
        if self.cur == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.cur = 1;
        }
    }

    #[inline(always)]
    pub fn get(&self, v: usize) -> W {
        if self.stamp[v] == self.cur {
            self.val[v]
        } else {
            W::INF
        }
    }

    #[inline(always)]
    pub fn set(&mut self, v: usize, d: W) {
        self.val[v] = d;
        self.stamp[v] = self.cur;
    }

    /// Lowers the label; returns true on improvement.
    #[inline(always)]
    pub fn relax(&mut self, v: usize, d: W) -> bool {
        if d < self.get(v) {
            self.set(v, d);
            true
        } else {
            false
        }
    }

    pub fn to_vec(&self) -> Vec<W> {
        (0..self.len()).map(|v| self.get(v)).collect()
    }

    /// Unsynchronized view for writers that touch disjoint vertex sets.
    pub fn shared(&mut self) -> SharedLabels<'_, W> {
        SharedLabels {
            val: self.val.as_mut_ptr(),
            stamp: self.stamp.as_mut_ptr(),
            len: self.val.len(),
            cur: self.cur,
            _life: PhantomData,
        }
    }
}

/// Raw view into [`Labels`] shared between worker threads.
///
/// Callers guarantee that no vertex is written by one thread while another
/// thread reads or writes it.
#[derive(Clone, Copy)]
pub struct SharedLabels<'a, W> {
    val: *mut W,
    stamp: *mut u32,
    len: usize,
    cur: u32,
    _life: PhantomData<&'a mut [W]>,
}

unsafe impl<W: Send> Send for SharedLabels<'_, W> {}
unsafe impl<W: Send> Sync for SharedLabels<'_, W> {}

impl<W: Weight> SharedLabels<'_, W> {
    /// # Safety
    /// No concurrent write to `v`.
    #[inline(always)]
    pub unsafe fn get(&self, v: usize) -> W {
        assert!(v < self.len);
        if *self.stamp.add(v) == self.cur {
            *self.val.add(v)
        } else {
            W::INF
        }
    }

    /// # Safety
    /// No concurrent access to `v`.
    #[inline(always)]
    pub unsafe fn set(&self, v: usize, d: W) {
        assert!(v < self.len);
        *self.val.add(v) = d;
        *self.stamp.add(v) = self.cur;
    }
}

/// Boolean marks with O(1) reset.
#[derive(Clone, Debug)]
pub struct Marks {
    stamp: Vec<u32>,
    cur: u32,
}

impl Marks {
    pub fn new(n: usize) -> Self {
        Marks {
            stamp: vec![0; n],
            cur: 1,
        }
    }

    pub fn reset(&mut self) {
        self.cur = self.cur.wrapping_add(1);
        if self.cur == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.cur = 1;
        }
    }

    #[inline(always)]
    pub fn get(&self, v: usize) -> bool {
        self.stamp[v] == self.cur
    }

    #[inline(always)]
    pub fn set(&mut self, v: usize) {
        self.stamp[v] = self.cur;
    }

    #[inline(always)]
    pub fn unset(&mut self, v: usize) {
        self.stamp[v] = 0;
    }
}

/// Pool of reusable scratch objects so concurrent queries never share state.
pub struct Pool<T> {
    items: Mutex<Vec<T>>,
}

impl<T> Default for Pool<T> {
    fn default() -> Self {
        Pool {
            items: Mutex::new(Vec::new()),
        }
    }
}

impl<T> Pool<T> {
    pub fn with<R>(&self, make: impl FnOnce() -> T, f: impl FnOnce(&mut T) -> R) -> R {
        let item = self.items.lock().expect("pool poisoned").pop();
        let mut item = item.unwrap_or_else(make);
        let r = f(&mut item);
        self.items.lock().expect("pool poisoned").push(item);
        r
    }
}

/// Shared rayon pool with exactly `threads` workers.
pub fn thread_pool(threads: usize) -> Arc<rayon::ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let threads = threads.max(1);
    let mut pools = POOLS.get_or_init(Default::default).lock().expect("pool map poisoned");
    pools
        .entry(threads)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .thread_name(|i| format!("iso-worker-{i}"))
                    .build()
                    .expect("thread pool"),
            )
        })
        .clone()
}

/// Splits `items` into at most `parts` contiguous blocks of similar size.
pub fn blocks<T>(items: &[T], parts: usize) -> Vec<&[T]> {
    if items.is_empty() {
        return Vec::new();
    }
    let parts = parts.clamp(1, items.len());
    let chunk = items.len().div_ceil(parts);
    items.chunks(chunk).collect()
}
