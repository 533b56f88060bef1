//! Exhaustive checks of the allocation predicates against independently
//! written filters over small pools.

use gt_core::allocation::{
    enumerate_allocations, enumerate_valuations, is_envy_free, is_pareto_optimal_allocation,
    optimal_allocations, Allocation, AllocationInstance, ItemCounts,
};
use gt_core::Side;

fn instances_for(counts: &[u32]) -> Vec<AllocationInstance> {
    let counts = match ItemCounts::new(counts.to_vec()) {
        Ok(c) => c,
        Err(_) => return Vec::new(),
    };
    let space = enumerate_valuations(&counts, 10);
    let mut out = Vec::new();
    for row in &space {
        for col in &space {
            out.push(AllocationInstance::new(counts.clone(), row.clone(), col.clone()).unwrap());
        }
    }
    out
}

/// Oracle: filter envy-free allocations by the raw inequalities and keep
/// the total-utility maximizers.
fn oracle_optimal(instance: &AllocationInstance) -> Vec<Allocation> {
    let row = instance.valuation(Side::Row);
    let col = instance.valuation(Side::Col);
    let envy_free: Vec<Allocation> = enumerate_allocations(instance.counts())
        .into_iter()
        .filter(|a| {
            row.dot(a.bundle(Side::Row)) >= row.dot(a.bundle(Side::Col))
                && col.dot(a.bundle(Side::Col)) >= col.dot(a.bundle(Side::Row))
        })
        .collect();
    let best = envy_free
        .iter()
        .map(|a| row.dot(a.bundle(Side::Row)) + col.dot(a.bundle(Side::Col)))
        .max();
    match best {
        None => Vec::new(),
        Some(best) => envy_free
            .into_iter()
            .filter(|a| row.dot(a.bundle(Side::Row)) + col.dot(a.bundle(Side::Col)) == best)
            .collect(),
    }
}

#[test]
fn optimal_allocations_match_the_oracle_on_small_pools() {
    for counts in [
        [1, 1, 1],
        [1, 1, 2],
        [2, 1, 1],
        [1, 2, 2],
        [2, 2, 2],
        [1, 1, 3],
        [1, 0, 2],
        [2, 0, 0],
    ] {
        for instance in instances_for(&counts) {
            assert_eq!(optimal_allocations(&instance), oracle_optimal(&instance));
        }
    }
}

#[test]
fn optimal_members_are_envy_free_total_maximal_and_pareto_among_envy_free() {
    for instance in instances_for(&[1, 1, 3]) {
        let optimal = optimal_allocations(&instance);
        let ef_totals: Vec<u64> = enumerate_allocations(instance.counts())
            .into_iter()
            .filter(|a| is_envy_free(&instance, a))
            .map(|a| {
                let (u, v) = a.utilities(&instance);
                u + v
            })
            .collect();
        match ef_totals.iter().max() {
            None => assert!(optimal.is_empty()),
            Some(&best) => {
                assert!(!optimal.is_empty());
                for member in &optimal {
                    assert!(is_envy_free(&instance, member));
                    let (u, v) = member.utilities(&instance);
                    assert_eq!(u + v, best);
                }
            }
        }
    }
}

#[test]
fn pareto_predicate_agrees_with_a_dominance_scan() {
    for instance in instances_for(&[1, 1, 2]) {
        let all = enumerate_allocations(instance.counts());
        for allocation in &all {
            let (u, v) = allocation.utilities(&instance);
            let dominated = all.iter().any(|other| {
                let (a, b) = other.utilities(&instance);
                a >= u && b >= v && (a > u || b > v)
            });
            assert_eq!(
                is_pareto_optimal_allocation(&instance, allocation),
                !dominated
            );
        }
    }
}

#[test]
fn own_valuation_mass_is_conserved_across_every_partition() {
    for instance in instances_for(&[2, 1, 2]).into_iter().take(200) {
        let row = instance.valuation(Side::Row);
        for allocation in enumerate_allocations(instance.counts()) {
            assert_eq!(
                row.dot(allocation.bundle(Side::Row)) + row.dot(allocation.bundle(Side::Col)),
                10
            );
        }
    }
}
