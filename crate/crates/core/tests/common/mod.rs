//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand_core::RngCore;

/// Levenshtein distance by the textbook table.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut row = vec![i + 1; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            row[j + 1] = sub.min(prev[j + 1] + 1).min(row[j] + 1);
        }
        prev = row;
    }
    prev[b.len()]
}

/// Each ordered pair (self-loops included) is an edge with probability 1/4.
pub fn random_digraph(rng: &mut impl RngCore, n: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rng.next_u64().is_multiple_of(4) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Bottom-up closure: iterate one-step extension until nothing changes.
pub fn transitive_closure(n: usize, edges: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
    let mut closure: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    loop {
        let mut next = closure.clone();
        for &(a, b) in &closure {
            for &(c, d) in edges {
                if b == c {
                    next.insert((a, d));
                }
            }
        }
        if next.len() == closure.len() {
            debug_assert!(closure.iter().all(|&(a, b)| a < n && b < n));
            return closure;
        }
        closure = next;
    }
}
