//! Breadth-first closure of a set of total maps under composition.

use std::collections::{HashSet, VecDeque};

/// A total map on `0..n`, stored as its image table.
pub type Transformation = Vec<u32>;

pub fn identity(n: usize) -> Transformation {
    (0..n as u32).collect()
}

/// `g ∘ f`: apply `f` first.
pub fn then(f: &[u32], g: &[u32]) -> Transformation {
    f.iter().map(|&s| g[s as usize]).collect()
}

#[derive(Debug, Clone)]
pub struct ClosureResult {
    /// Distinct maps in discovery order; the identity comes first.
    pub maps: Vec<Transformation>,
    /// The cap was reached before the closure was exhausted.
    pub truncated: bool,
}

impl ClosureResult {
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn as_set(&self) -> HashSet<Transformation> {
        self.maps.iter().cloned().collect()
    }
}

/// Outcome of a bounded search over the generated monoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Transformation),
    Exhausted,
    Truncated,
}

/// Visits the monoid generated by `generators` on `n` states in BFS order,
/// stopping when `visit` returns true, when the monoid is exhausted, or when
/// `cap` distinct maps have been seen and another new one turns up.
pub fn search<F>(n: usize, generators: &[Transformation], cap: usize, mut visit: F) -> SearchOutcome
where
    F: FnMut(&[u32]) -> bool,
{
    let id = identity(n);
    if visit(&id) {
        return SearchOutcome::Found(id);
    }
    let mut seen: HashSet<Transformation> = HashSet::new();
    seen.insert(id.clone());
    let mut frontier = VecDeque::from([id]);
    while let Some(map) = frontier.pop_front() {
        for g in generators {
            let next = then(&map, g);
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= cap {
                return SearchOutcome::Truncated;
            }
            if visit(&next) {
                return SearchOutcome::Found(next);
            }
            seen.insert(next.clone());
            frontier.push_back(next);
        }
    }
    SearchOutcome::Exhausted
}

/// Every distinct map reachable from the identity, up to `cap` of them.
pub fn close(n: usize, generators: &[Transformation], cap: usize) -> ClosureResult {
    let mut maps = Vec::new();
    let outcome = search(n, generators, cap, |m| {
        maps.push(m.to_vec());
        false
    });
    ClosureResult { maps, truncated: outcome == SearchOutcome::Truncated }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: all permutations of `0..n`.
    fn symmetric_group(n: usize) -> HashSet<Transformation> {
        use itertools::Itertools;
        (0..n as u32).permutations(n).collect()
    }

    #[test]
    fn not_closes_to_two_maps() {
        let c = close(2, &[vec![1, 0]], 100);
        assert_eq!(c.len(), 2);
        assert_eq!(c.maps[0], vec![0, 1]);
        assert!(!c.truncated);
    }

    #[test]
    fn transposition_and_four_cycle_generate_s4() {
        let gens = vec![vec![1, 0, 2, 3], vec![1, 2, 3, 0]];
        let c = close(4, &gens, 100_000);
        assert!(!c.truncated);
        assert_eq!(c.as_set(), symmetric_group(4));
        assert_eq!(c.len(), 24);
    }

    #[test]
    fn cap_truncates() {
        let gens = vec![vec![1, 0, 2, 3], vec![1, 2, 3, 0]];
        let c = close(4, &gens, 3);
        assert!(c.truncated);
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn generator_order_does_not_matter() {
        let a = vec![vec![1, 0, 2, 3], vec![1, 2, 3, 0], vec![0, 0, 2, 3]];
        let mut b = a.clone();
        b.reverse();
        assert_eq!(close(4, &a, 10_000).as_set(), close(4, &b, 10_000).as_set());
    }

    #[test]
    fn search_stops_at_witness() {
        let gens = vec![vec![1, 2, 3, 0]];
        let out = search(4, &gens, 100, |m| m[0] == 2);
        assert_eq!(out, SearchOutcome::Found(vec![2, 3, 0, 1]));
        assert_eq!(search(4, &gens, 100, |m| m[0] == m[1]), SearchOutcome::Exhausted);
    }
}
