use crate::error::{Error, Result};

/// Bijection over `[0, n)` stored together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    new_of: Vec<u32>,
    old_of: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        let ids: Vec<u32> = (0..n as u32).collect();
        Permutation {
            new_of: ids.clone(),
            old_of: ids,
        }
    }

    /// From the new id of every old vertex.
    pub fn from_new_of(new_of: Vec<u32>) -> Result<Self> {
        let n = new_of.len();
        let mut old_of = vec![u32::MAX; n];
        for (old, &new) in new_of.iter().enumerate() {
            let slot = old_of
                .get_mut(new as usize)
                .ok_or_else(|| Error::validation(format!("permutation target {new} out of range")))?;
            if *slot != u32::MAX {
                return Err(Error::validation(format!("permutation maps twice onto {new}")));
            }
            *slot = old as u32;
        }
        Ok(Permutation { new_of, old_of })
    }

    /// From an ordering: `order[i]` is the old vertex placed at position `i`.
    pub fn from_order(order: Vec<u32>) -> Result<Self> {
        Ok(Self::from_new_of(order)?.inverse())
    }

    pub fn len(&self) -> usize {
        self.new_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.new_of.is_empty()
    }

    #[inline]
    pub fn new_id(&self, old: usize) -> usize {
        self.new_of[old] as usize
    }

    #[inline]
    pub fn old_id(&self, new: usize) -> usize {
        self.old_of[new] as usize
    }

    pub fn new_of(&self) -> &[u32] {
        &self.new_of
    }

    pub fn old_of(&self) -> &[u32] {
        &self.old_of
    }

    pub fn inverse(&self) -> Self {
        Permutation {
            new_of: self.old_of.clone(),
            old_of: self.new_of.clone(),
        }
    }

    /// Applies `self` first, then `then`.
    pub fn then(&self, then: &Permutation) -> Self {
        let new_of = self.new_of.iter().map(|&v| then.new_of[v as usize]).collect();
        Self::from_new_of(new_of).expect("composition of bijections")
    }

    pub fn is_identity(&self) -> bool {
        self.new_of.iter().enumerate().all(|(i, &v)| v as usize == i)
    }

    /// Reorders per-vertex data from old ids to new ids.
    pub fn permute_data<T: Clone>(&self, data: &[T]) -> Vec<T> {
        self.old_of.iter().map(|&o| data[o as usize].clone()).collect()
    }
}
