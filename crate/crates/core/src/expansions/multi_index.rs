use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// A finitely supported sequence of non-negative integers `alpha_l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex {
    entries: BTreeMap<usize, u32>,
}

impl MultiIndex {
    pub fn from_entries<I: IntoIterator<Item = (usize, u32)>>(iter: I) -> Self {
        let mut entries = BTreeMap::new();
        for (l, a) in iter {
            if a > 0 {
                *entries.entry(l).or_insert(0) += a;
            }
        }
        Self { entries }
    }

    /// Nonzero entries `(l, alpha_l)` in increasing `l`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().map(|(&l, &a)| (l, a))
    }

    pub fn get(&self, l: usize) -> u32 {
        self.entries.get(&l).copied().unwrap_or(0)
    }

    /// `|alpha| = sum alpha_l`.
    pub fn order(&self) -> u32 {
        self.entries.values().sum()
    }

    /// `||alpha|| = sum l alpha_l`.
    pub fn weight(&self) -> usize {
        self.entries.iter().map(|(&l, &a)| l * a as usize).sum()
    }

    /// `alpha! = prod alpha_l!`.
    pub fn factorial(&self) -> f64 {
        self.entries.values().map(|&a| (1..=a).map(f64::from).product::<f64>()).product()
    }
}

/// All multi-indices with entries at `l >= 1`, `|alpha| = order` and
/// `||alpha|| = weight`, in lexicographic order.
pub fn enumerate_multi_indices(order: usize, weight: usize) -> Vec<MultiIndex> {
    enumerate_multi_indices_from(1, order, weight)
}

/// Like [`enumerate_multi_indices`] but indices start at `start` (0 or 1).
/// With `start = 0` the entry `alpha_0` absorbs the parts of weight zero.
pub fn enumerate_multi_indices_from(start: usize, order: usize, weight: usize) -> Vec<MultiIndex> {
    assert!(start <= 1, "multi-indices start at 0 or 1");
    let mut out = Vec::new();
    let positive_parts = if start == 0 { 0..=order } else { order..=order };
    for parts in positive_parts {
        let mut stack = Vec::with_capacity(parts);
        partitions(weight, parts, weight, &mut stack, &mut |p| {
            let zeros = order - parts;
            out.push(MultiIndex::from_entries(
                p.iter().map(|&l| (l, 1)).chain(std::iter::once((0, zeros as u32))),
            ));
        });
    }
    out.sort();
    out
}

/// Partitions of `sum` into exactly `parts` positive parts, each `<= max_part`,
/// in non-increasing order.
fn partitions(sum: usize, parts: usize, max_part: usize, stack: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if parts == 0 {
        if sum == 0 {
            emit(stack);
        }
        return;
    }
    if sum < parts || sum > parts * max_part {
        return;
    }
    let hi = max_part.min(sum - (parts - 1));
    for first in (1..=hi).rev() {
        stack.push(first);
        partitions(sum - first, parts - 1, first, stack, emit);
        stack.pop();
    }
}

/// Memoized enumeration keyed by `(start, order, weight)`.
#[derive(Debug, Default, Clone)]
pub struct MultiIndexCache {
    cache: HashMap<(usize, usize, usize), Arc<Vec<MultiIndex>>>,
}

impl MultiIndexCache {
    pub fn get(&mut self, start: usize, order: usize, weight: usize) -> Arc<Vec<MultiIndex>> {
        self.cache
            .entry((start, order, weight))
            .or_insert_with(|| Arc::new(enumerate_multi_indices_from(start, order, weight)))
            .clone()
    }
}
