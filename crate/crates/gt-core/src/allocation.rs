//! The common-resource allocation game: typed item pools, private integer
//! valuations normalized to a shared total, and exhaustive enumeration as
//! the ground-truth method for envy-freeness and Pareto optimality.
//!
//! Items of one type are interchangeable, so bundles and valuations are
//! per-type vectors and the normalization is the weighted sum
//! `sum(count[t] * value[t]) = total`.

use crate::side::Side;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AllocationError {
    #[error("expected {expected} item types, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bundle {bundle:?} exceeds the available counts {counts:?}")]
    BundleExceedsCounts { bundle: Vec<u32>, counts: Vec<u32> },
    #[error("valuation {values:?} sums to {got} against the counts, expected {expected}")]
    NotNormalized {
        values: Vec<u64>,
        got: u64,
        expected: u64,
    },
    #[error("an item pool needs at least one item")]
    NoItems,
    #[error("the two valuations use different totals: {0} vs {1}")]
    TotalMismatch(u64, u64),
}

/// The shared item pool: how many items of each type exist.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemCounts(Vec<u32>);

impl ItemCounts {
    pub fn new(counts: Vec<u32>) -> Result<Self, AllocationError> {
        if counts.iter().all(|&c| c == 0) {
            return Err(AllocationError::NoItems);
        }
        Ok(ItemCounts(counts))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn types(&self) -> usize {
        self.0.len()
    }

    fn check_bundle(&self, bundle: &[u32]) -> Result<(), AllocationError> {
        if bundle.len() != self.0.len() {
            return Err(AllocationError::LengthMismatch {
                expected: self.0.len(),
                got: bundle.len(),
            });
        }
        if bundle.iter().zip(&self.0).any(|(&b, &c)| b > c) {
            return Err(AllocationError::BundleExceedsCounts {
                bundle: bundle.to_vec(),
                counts: self.0.clone(),
            });
        }
        Ok(())
    }
}

/// One agent's private per-type valuation, normalized so that the whole
/// pool is worth `total`. Entries for zero-count types are canonicalized
/// to 0 so the valuation space is finite and equality is well defined.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValuationVector {
    values: Vec<u64>,
    total: u64,
}

impl ValuationVector {
    pub fn normalized(
        values: Vec<u64>,
        counts: &ItemCounts,
        total: u64,
    ) -> Result<Self, AllocationError> {
        if values.len() != counts.types() {
            return Err(AllocationError::LengthMismatch {
                expected: counts.types(),
                got: values.len(),
            });
        }
        let weighted: u64 = values
            .iter()
            .zip(counts.as_slice())
            .map(|(&v, &c)| v * c as u64)
            .sum();
        if weighted != total {
            return Err(AllocationError::NotNormalized {
                values,
                got: weighted,
                expected: total,
            });
        }
        let values = values
            .iter()
            .zip(counts.as_slice())
            .map(|(&v, &c)| if c == 0 { 0 } else { v })
            .collect();
        Ok(ValuationVector { values, total })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Value of a bundle under this valuation, without bounds checking.
    pub fn dot(&self, bundle: &[u32]) -> u64 {
        self.values
            .iter()
            .zip(bundle)
            .map(|(&v, &b)| v * b as u64)
            .sum()
    }
}

/// A complete instance: the pool plus both agents' private valuations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllocationInstance {
    counts: ItemCounts,
    valuation_row: ValuationVector,
    valuation_col: ValuationVector,
}

impl AllocationInstance {
    pub fn new(
        counts: ItemCounts,
        valuation_row: ValuationVector,
        valuation_col: ValuationVector,
    ) -> Result<Self, AllocationError> {
        if valuation_row.total != valuation_col.total {
            return Err(AllocationError::TotalMismatch(
                valuation_row.total,
                valuation_col.total,
            ));
        }
        // Re-validate both valuations against these counts.
        let valuation_row =
            ValuationVector::normalized(valuation_row.values, &counts, valuation_row.total)?;
        let valuation_col =
            ValuationVector::normalized(valuation_col.values, &counts, valuation_col.total)?;
        Ok(AllocationInstance {
            counts,
            valuation_row,
            valuation_col,
        })
    }

    pub fn counts(&self) -> &ItemCounts {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.valuation_row.total
    }

    pub fn valuation(&self, side: Side) -> &ValuationVector {
        match side {
            Side::Row => &self.valuation_row,
            Side::Col => &self.valuation_col,
        }
    }
}

/// A partition of the pool between the two agents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Allocation {
    to_row: Vec<u32>,
    to_col: Vec<u32>,
}

impl Allocation {
    /// Builds the partition that gives `to_row` to the row agent and the
    /// remainder to the column agent.
    pub fn from_row_bundle(counts: &ItemCounts, to_row: Vec<u32>) -> Result<Self, AllocationError> {
        counts.check_bundle(&to_row)?;
        let to_col = counts
            .as_slice()
            .iter()
            .zip(&to_row)
            .map(|(&c, &r)| c - r)
            .collect();
        Ok(Allocation { to_row, to_col })
    }

    /// Builds a partition from both sides, checking that they exactly
    /// exhaust the pool.
    pub fn from_parts(
        counts: &ItemCounts,
        to_row: Vec<u32>,
        to_col: Vec<u32>,
    ) -> Result<Self, AllocationError> {
        counts.check_bundle(&to_row)?;
        counts.check_bundle(&to_col)?;
        let exact = counts
            .as_slice()
            .iter()
            .zip(to_row.iter().zip(&to_col))
            .all(|(&c, (&r, &k))| r + k == c);
        if !exact {
            return Err(AllocationError::BundleExceedsCounts {
                bundle: to_col,
                counts: counts.as_slice().to_vec(),
            });
        }
        Ok(Allocation { to_row, to_col })
    }

    pub fn bundle(&self, side: Side) -> &[u32] {
        match side {
            Side::Row => &self.to_row,
            Side::Col => &self.to_col,
        }
    }

    pub fn utilities(&self, instance: &AllocationInstance) -> (u64, u64) {
        (
            instance.valuation_row.dot(&self.to_row),
            instance.valuation_col.dot(&self.to_col),
        )
    }
}

/// Value of `bundle` under `valuation`, after checking the bundle fits
/// within `counts`.
pub fn utility(
    valuation: &ValuationVector,
    bundle: &[u32],
    counts: &ItemCounts,
) -> Result<u64, AllocationError> {
    counts.check_bundle(bundle)?;
    Ok(valuation.dot(bundle))
}

/// All `prod(count[t] + 1)` distinct per-type splits of the pool, in
/// lexicographic order of the row bundle.
pub fn enumerate_allocations(counts: &ItemCounts) -> Vec<Allocation> {
    let mut out = Vec::new();
    let mut bundle = vec![0u32; counts.types()];
    loop {
        out.push(
            Allocation::from_row_bundle(counts, bundle.clone()).expect("bundle within counts"),
        );
        // Mixed-radix increment with the last type least significant.
        let mut t = counts.types();
        loop {
            if t == 0 {
                return out;
            }
            t -= 1;
            if bundle[t] < counts.as_slice()[t] {
                bundle[t] += 1;
                break;
            }
            bundle[t] = 0;
        }
    }
}

/// True iff neither agent prefers the other's bundle under its own
/// valuation.
pub fn is_envy_free(instance: &AllocationInstance, allocation: &Allocation) -> bool {
    let row = &instance.valuation_row;
    let col = &instance.valuation_col;
    row.dot(&allocation.to_row) >= row.dot(&allocation.to_col)
        && col.dot(&allocation.to_col) >= col.dot(&allocation.to_row)
}

/// True iff no other allocation weakly improves both utilities and
/// strictly improves one, checked by full enumeration.
pub fn is_pareto_optimal_allocation(
    instance: &AllocationInstance,
    allocation: &Allocation,
) -> bool {
    let (u_row, u_col) = allocation.utilities(instance);
    !enumerate_allocations(&instance.counts).iter().any(|other| {
        let (o_row, o_col) = other.utilities(instance);
        o_row >= u_row && o_col >= u_col && (o_row > u_row || o_col > u_col)
    })
}

/// Among the envy-free allocations, all that attain the maximal total
/// utility. Empty when no envy-free allocation exists.
pub fn optimal_allocations(instance: &AllocationInstance) -> Vec<Allocation> {
    let envy_free: Vec<Allocation> = enumerate_allocations(&instance.counts)
        .into_iter()
        .filter(|a| is_envy_free(instance, a))
        .collect();
    let best = envy_free
        .iter()
        .map(|a| {
            let (u, v) = a.utilities(instance);
            u + v
        })
        .max();
    match best {
        Some(best) => envy_free
            .into_iter()
            .filter(|a| {
                let (u, v) = a.utilities(instance);
                u + v == best
            })
            .collect(),
        None => Vec::new(),
    }
}

/// Negated l1 distance between the two valuations. 0 (identical
/// valuations) is the hardest instance; more negative is easier.
pub fn difficulty(instance: &AllocationInstance) -> i64 {
    -instance
        .valuation_row
        .values
        .iter()
        .zip(&instance.valuation_col.values)
        .map(|(&a, &b)| (a as i64 - b as i64).abs())
        .sum::<i64>()
}

/// The feasible opponent-valuation space: all non-negative integer vectors
/// with `sum(count[t] * value[t]) = total`, in lexicographic order.
/// Zero-count types are pinned to 0.
pub fn enumerate_valuations(counts: &ItemCounts, total: u64) -> Vec<ValuationVector> {
    let mut out = Vec::new();
    let mut values = vec![0u64; counts.types()];
    descend(counts, total, 0, &mut values, &mut out);
    out
}

fn descend(
    counts: &ItemCounts,
    remaining: u64,
    t: usize,
    values: &mut Vec<u64>,
    out: &mut Vec<ValuationVector>,
) {
    if t == counts.types() {
        if remaining == 0 {
            out.push(ValuationVector {
                values: values.clone(),
                total: values
                    .iter()
                    .zip(counts.as_slice())
                    .map(|(&v, &c)| v * c as u64)
                    .sum(),
            });
        }
        return;
    }
    let count = counts.as_slice()[t] as u64;
    if count == 0 {
        values[t] = 0;
        descend(counts, remaining, t + 1, values, out);
        return;
    }
    for v in 0..=remaining / count {
        values[t] = v;
        descend(counts, remaining - v * count, t + 1, values, out);
    }
    values[t] = 0;
}

/// All feasible opponent valuations whose optimal-allocation set (fixing
/// the caller's own valuation) is contained in that of the true opponent
/// valuation. Always contains the true valuation itself.
pub fn indistinguishable_set(
    own: &ValuationVector,
    true_opponent: &ValuationVector,
    counts: &ItemCounts,
) -> Result<Vec<ValuationVector>, AllocationError> {
    let optimal_against = |opponent: &ValuationVector| -> Result<Vec<Allocation>, AllocationError> {
        let instance = AllocationInstance::new(counts.clone(), own.clone(), opponent.clone())?;
        Ok(optimal_allocations(&instance))
    };
    let reference = optimal_against(true_opponent)?;
    let mut members = Vec::new();
    for candidate in enumerate_valuations(counts, true_opponent.total) {
        let optimal = optimal_against(&candidate)?;
        if optimal.iter().all(|a| reference.contains(a)) {
            members.push(candidate);
        }
    }
    Ok(members)
}
