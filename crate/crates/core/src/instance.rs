//! Instance and pattern data model for the cutting-stock view of bin packing.
//!
//! Items are always stored with pairwise distinct weights sorted in
//! decreasing order. Every other module indexes items in that order.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while building an [`Instance`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("capacity must be positive")]
    ZeroCapacity,
    #[error("instance has no items")]
    Empty,
    #[error("item {}: weight {weight} outside (0, {capacity}]", .index + 1)]
    WeightOutOfRange {
        index: usize,
        weight: u64,
        capacity: u64,
    },
    #[error("item {}: demand must be positive", .index + 1)]
    ZeroDemand { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub weight: u64,
    pub demand: u32,
}

/// A cutting-stock instance: bin capacity plus distinct item weights with demands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    capacity: u64,
    items: Vec<Item>,
}

#[derive(Deserialize)]
struct RawInstance {
    capacity: u64,
    items: Vec<Item>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = InstanceError;

    fn try_from(raw: RawInstance) -> Result<Self, Self::Error> {
        Instance::from_items(raw.capacity, raw.items)
    }
}

impl Instance {
    /// Builds a canonical instance from `(weight, demand)` pairs. Equal
    /// weights are merged and items are sorted by decreasing weight.
    pub fn from_items<I>(capacity: u64, items: I) -> Result<Self, InstanceError>
    where
        I: IntoIterator<Item = Item>,
    {
        if capacity == 0 {
            return Err(InstanceError::ZeroCapacity);
        }
        let mut merged: BTreeMap<u64, u32> = BTreeMap::new();
        for (index, item) in items.into_iter().enumerate() {
            if item.weight == 0 || item.weight > capacity {
                return Err(InstanceError::WeightOutOfRange {
                    index,
                    weight: item.weight,
                    capacity,
                });
            }
            if item.demand == 0 {
                return Err(InstanceError::ZeroDemand { index });
            }
            *merged.entry(item.weight).or_default() += item.demand;
        }
        if merged.is_empty() {
            return Err(InstanceError::Empty);
        }
        let items = merged
            .into_iter()
            .rev()
            .map(|(weight, demand)| Item { weight, demand })
            .collect();
        Ok(Instance { capacity, items })
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    /// Number of distinct items.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn weights(&self) -> Vec<u64> {
        self.items.iter().map(|it| it.weight).collect()
    }

    pub fn demands(&self) -> Vec<u32> {
        self.items.iter().map(|it| it.demand).collect()
    }

    /// Total number of item units, i.e. the BPP item count.
    pub fn total_units(&self) -> u64 {
        self.items.iter().map(|it| u64::from(it.demand)).sum()
    }

    /// Sum of `w_i * d_i`.
    pub fn total_weight(&self) -> u64 {
        self.items
            .iter()
            .map(|it| it.weight * u64::from(it.demand))
            .sum()
    }

    /// Expands the instance into one weight per item unit, largest first.
    pub fn expanded_weights(&self) -> Vec<u64> {
        self.items
            .iter()
            .flat_map(|it| std::iter::repeat_n(it.weight, it.demand as usize))
            .collect()
    }

    /// Instance restricted to positive entries of `residual`, keeping the
    /// original index of every retained item.
    pub fn residual(&self, residual: &[u32]) -> Option<(Instance, Vec<usize>)> {
        let mut index = Vec::new();
        let mut items = Vec::new();
        for (i, (&d, item)) in residual.iter().zip(&self.items).enumerate() {
            if d > 0 {
                index.push(i);
                items.push(Item {
                    weight: item.weight,
                    demand: d,
                });
            }
        }
        if items.is_empty() {
            return None;
        }
        Some((
            Instance {
                capacity: self.capacity,
                items,
            },
            index,
        ))
    }
}

/// Merges raw per-unit weights into a canonical instance.
///
/// Errors carry the zero-based position of the offending weight.
pub fn canonicalize(capacity: u64, raw_weights: &[u64]) -> Result<Instance, InstanceError> {
    Instance::from_items(
        capacity,
        raw_weights.iter().map(|&weight| Item { weight, demand: 1 }),
    )
}

/// One bin: the number of copies of each item it holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pattern(Vec<u32>);

impl Pattern {
    pub fn new(counts: Vec<u32>) -> Self {
        Pattern(counts)
    }

    pub fn zeros(n: usize) -> Self {
        Pattern(vec![0; n])
    }

    /// Pattern holding `count` copies of item `item` and nothing else.
    pub fn singleton(n: usize, item: usize, count: u32) -> Self {
        let mut counts = vec![0; n];
        counts[item] = count;
        Pattern(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn total_weight(&self, weights: &[u64]) -> u64 {
        self.0
            .iter()
            .zip(weights)
            .map(|(&x, &w)| u64::from(x) * w)
            .sum()
    }

    pub fn fits(&self, weights: &[u64], capacity: u64) -> bool {
        self.total_weight(weights) <= capacity
    }

    /// True when every count is within the matching bound.
    pub fn within(&self, bounds: &[u32]) -> bool {
        self.0.iter().zip(bounds).all(|(&x, &b)| x <= b)
    }

    pub fn units(&self) -> u64 {
        self.0.iter().map(|&x| u64::from(x)).sum()
    }

    /// The bin's weight multiset, one entry per item unit.
    pub fn weight_multiset(&self, weights: &[u64]) -> Vec<f64> {
        self.0
            .iter()
            .zip(weights)
            .flat_map(|(&x, &w)| std::iter::repeat_n(w as f64, x as usize))
            .collect()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackedBin {
    pub counts: Pattern,
    pub load: u32,
}

/// A packing: bins with their loads.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub bins: Vec<PackedBin>,
}

impl Solution {
    pub fn new() -> Self {
        Solution::default()
    }

    /// Adds `load` copies of `pattern`, merging with an identical bin.
    pub fn push(&mut self, pattern: Pattern, load: u32) {
        if load == 0 {
            return;
        }
        if let Some(bin) = self.bins.iter_mut().find(|b| b.counts == pattern) {
            bin.load += load;
        } else {
            self.bins.push(PackedBin {
                counts: pattern,
                load,
            });
        }
    }

    pub fn extend(&mut self, other: &Solution) {
        for bin in &other.bins {
            self.push(bin.counts.clone(), bin.load);
        }
    }

    /// Total bin count.
    pub fn objective(&self) -> u64 {
        self.bins.iter().map(|b| u64::from(b.load)).sum()
    }

    /// Sorts bins into a canonical order (largest count vector first).
    pub fn normalize(&mut self) {
        self.bins.sort_by(|a, b| b.counts.cmp(&a.counts));
    }
}

/// Outcome of [`verify_solution`]; empty `reasons` means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Verdict {
    pub reasons: Vec<String>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.reasons.is_empty()
    }
}

/// Checks that every bin fits, every load is positive and every demand is
/// met exactly.
pub fn verify_solution(inst: &Instance, sol: &Solution) -> Verdict {
    let n = inst.len();
    let weights = inst.weights();
    let mut reasons = Vec::new();
    let mut covered = vec![0u64; n];
    for (k, bin) in sol.bins.iter().enumerate() {
        if bin.counts.len() != n {
            reasons.push(format!(
                "bin {k}: has {} counts, expected {n}",
                bin.counts.len()
            ));
            continue;
        }
        let fill = bin.counts.total_weight(&weights);
        if fill > inst.capacity() {
            reasons.push(format!(
                "bin {k}: weight {fill} exceeds capacity {}",
                inst.capacity()
            ));
        }
        if bin.counts.is_zero() {
            reasons.push(format!("bin {k}: empty pattern"));
        }
        if bin.load == 0 {
            reasons.push(format!("bin {k}: zero load"));
        }
        for (c, &x) in covered.iter_mut().zip(bin.counts.counts()) {
            *c += u64::from(x) * u64::from(bin.load);
        }
    }
    for (i, (item, &got)) in inst.items().iter().zip(&covered).enumerate() {
        let want = u64::from(item.demand);
        if got < want {
            reasons.push(format!("item {i} (w={}): shortfall {got} < {want}", item.weight));
        } else if got > want {
            reasons.push(format!("item {i} (w={}): excess {got} > {want}", item.weight));
        }
    }
    Verdict { reasons }
}

/// JSON document bundling an instance with an optional solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub capacity: u64,
    pub items: Vec<Item>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bins: Vec<PackedBin>,
}

impl InstanceDocument {
    pub fn new(inst: &Instance, sol: Option<&Solution>) -> Self {
        InstanceDocument {
            capacity: inst.capacity(),
            items: inst.items().to_vec(),
            bins: sol.map(|s| s.bins.clone()).unwrap_or_default(),
        }
    }

    pub fn into_parts(self) -> Result<(Instance, Solution), InstanceError> {
        let inst = Instance::from_items(self.capacity, self.items)?;
        Ok((inst, Solution { bins: self.bins }))
    }
}
