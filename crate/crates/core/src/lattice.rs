//! Subgroup lattices by cyclic seeding and iterated joins.
//!
//! Every subgroup is generated by elements of prime-power order, so the
//! lattice is the closure of the prime-power cyclic subgroups under joining
//! with one more of them. Rounds run until no new subgroup appears.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{closure, greedy_generators, prime_power, Element, FiniteGroup, Subgroup};

/// Default ceiling on the group order accepted by [`enumerate`].
pub const DEFAULT_MAX_ORDER: usize = 10_000;

/// Default ceiling on the number of subgroups.
pub const DEFAULT_BUDGET: usize = 20_000;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("group order {order} exceeds the lattice limit {limit}")]
    TooLarge { order: usize, limit: usize },
    #[error("subgroup budget {budget} exhausted after {} subgroups", found.len())]
    Budget { budget: usize, found: Vec<Subgroup> },
}

#[derive(Debug, Clone)]
pub struct SubgroupLattice {
    subgroups: Vec<Subgroup>,
    index: HashMap<Vec<Element>, usize>,
    /// `(i, j)` with subgroup `i` maximal in subgroup `j`.
    covers: Vec<(usize, usize)>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    /// Longest chain from the trivial subgroup to each subgroup.
    depth: Vec<u32>,
}

/// Enumerates all subgroups of `g`, refusing groups above `max_order` and
/// stopping once more than `budget` subgroups are found.
pub fn enumerate(g: &FiniteGroup, max_order: usize, budget: usize) -> Result<SubgroupLattice, LatticeError> {
    if g.order() > max_order {
        return Err(LatticeError::TooLarge { order: g.order(), limit: max_order });
    }
    let mut seen: HashMap<Vec<Element>, usize> = HashMap::new();
    let mut all: Vec<Subgroup> = Vec::new();

    let mut prime_power_cyclic = Vec::new();
    for x in g.elements() {
        let h = closure(g, &[x], false);
        if is_prime_power(g.element_order(x)) && !seen.contains_key(h.members()) {
            prime_power_cyclic.push(h.clone());
        }
        add(&mut seen, &mut all, h);
        if all.len() > budget {
            return Err(LatticeError::Budget { budget, found: all });
        }
    }

    let mut frontier: Vec<usize> = (0..all.len()).collect();
    while !frontier.is_empty() {
        let candidates: Vec<Subgroup> = frontier
            .par_iter()
            .flat_map_iter(|&i| {
                let h = &all[i];
                prime_power_cyclic
                    .iter()
                    .filter(|c| !c.is_subgroup_of(h))
                    .map(|c| h.join(g, &c.generators()[..1]))
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut next = Vec::new();
        for h in candidates {
            let at = all.len();
            if add(&mut seen, &mut all, h) {
                next.push(at);
                if all.len() > budget {
                    return Err(LatticeError::Budget { budget, found: all });
                }
            }
        }
        frontier = next;
    }
    Ok(SubgroupLattice::assemble(g, all))
}

fn add(seen: &mut HashMap<Vec<Element>, usize>, all: &mut Vec<Subgroup>, h: Subgroup) -> bool {
    if seen.contains_key(h.members()) {
        return false;
    }
    seen.insert(h.members().to_vec(), all.len());
    all.push(h);
    true
}

fn is_prime_power(n: u32) -> bool {
    n == 1 || prime_power(n as u64).is_some()
}

impl SubgroupLattice {
    fn assemble(g: &FiniteGroup, mut subgroups: Vec<Subgroup>) -> Self {
        subgroups.sort_by(|a, b| (a.order(), a.members()).cmp(&(b.order(), b.members())));
        let index: HashMap<Vec<Element>, usize> =
            subgroups.iter().enumerate().map(|(i, h)| (h.members().to_vec(), i)).collect();
        let n = subgroups.len();

        let covers_per: Vec<Vec<usize>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let sj = &subgroups[j];
                let mut below: Vec<usize> = (0..j)
                    .filter(|&i| {
                        let si = &subgroups[i];
                        si.order() < sj.order() && sj.order() % si.order() == 0 && si.is_subgroup_of(sj)
                    })
                    .collect();
                below.sort_by_key(|&i| std::cmp::Reverse(subgroups[i].order()));
                let mut covers: Vec<usize> = Vec::new();
                for i in below {
                    if !covers.iter().any(|&k| subgroups[i].is_subgroup_of(&subgroups[k])) {
                        covers.push(i);
                    }
                }
                covers.sort_unstable();
                covers
            })
            .collect();
        let mut covers = Vec::new();
        let mut depth = vec![0u32; n];
        for j in 0..n {
            for &i in &covers_per[j] {
                covers.push((i, j));
                depth[j] = depth[j].max(depth[i] + 1);
            }
        }

        let gens = greedy_generators(g);
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for start in 0..n {
            if class_of[start] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members = vec![start];
            class_of[start] = c;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for &x in &gens {
                    let conj = subgroups[i].conjugate_by(g, x);
                    let k = index[conj.members()];
                    if class_of[k] == usize::MAX {
                        class_of[k] = c;
                        members.push(k);
                        queue.push_back(k);
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }

        Self { subgroups, index, covers, classes, class_of, depth }
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    /// Subgroups sorted by `(order, members)`: index 0 is trivial, the last
    /// is the whole group.
    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn get(&self, i: usize) -> &Subgroup {
        &self.subgroups[i]
    }

    pub fn full_index(&self) -> usize {
        self.subgroups.len() - 1
    }

    pub fn index_of(&self, h: &Subgroup) -> Option<usize> {
        self.index.get(h.members()).copied()
    }

    pub fn index_of_members(&self, members: &[Element]) -> Option<usize> {
        self.index.get(members).copied()
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn conjugacy_classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    /// One subgroup per conjugacy class (the smallest index).
    pub fn class_representatives(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    pub fn is_normal(&self, i: usize) -> bool {
        self.classes[self.class_of[i]].len() == 1
    }

    pub fn normal_subgroups(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_normal(i)).collect()
    }

    /// Length of the longest chain of subgroups ending in subgroup `i`.
    pub fn depth(&self, i: usize) -> u32 {
        self.depth[i]
    }

    /// `cl(G)`: the longest strictly increasing chain of subgroups.
    pub fn chain_length(&self) -> u32 {
        self.depth[self.full_index()]
    }

    /// A longest chain from the trivial subgroup to the whole group.
    pub fn longest_chain(&self) -> Vec<usize> {
        let mut chain = vec![self.full_index()];
        let mut j = self.full_index();
        while j != 0 {
            let i = self
                .covers
                .iter()
                .filter(|&&(i, jj)| jj == j && self.depth[i] + 1 == self.depth[j])
                .map(|&(i, _)| i)
                .min()
                .expect("every non-trivial subgroup covers something");
            chain.push(i);
            j = i;
        }
        chain.reverse();
        chain
    }

    pub fn export(&self) -> LatticeExport {
        LatticeExport {
            subgroups: self
                .subgroups
                .iter()
                .enumerate()
                .map(|(i, h)| SubgroupEntry {
                    index: i,
                    order: h.order(),
                    normal: self.is_normal(i),
                    members: h.members().to_vec(),
                })
                .collect(),
            covers: self.covers.iter().map(|&(i, j)| [i, j]).collect(),
            conjugacy_classes: self.classes.clone(),
            chain_length: self.chain_length(),
        }
    }
}

/// JSON layout of a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeExport {
    pub subgroups: Vec<SubgroupEntry>,
    pub covers: Vec<[usize; 2]>,
    pub conjugacy_classes: Vec<Vec<usize>>,
    pub chain_length: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupEntry {
    pub index: usize,
    pub order: usize,
    pub normal: bool,
    pub members: Vec<Element>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(s: &str) -> SubgroupLattice {
        enumerate(&FiniteGroup::parse(s).unwrap(), DEFAULT_MAX_ORDER, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn small_counts_and_chain_lengths() {
        let s3 = lattice("sym:3");
        assert_eq!(s3.len(), 6);
        assert_eq!(s3.chain_length(), 2);
        assert_eq!(s3.conjugacy_classes().len(), 4);
        let z6 = lattice("cyc:6");
        assert_eq!(z6.len(), 4);
        assert_eq!(z6.chain_length(), 2);
        let s4 = lattice("sym:4");
        assert_eq!(s4.len(), 30);
        assert_eq!(s4.chain_length(), 4);
        assert_eq!(s4.conjugacy_classes().len(), 11);
    }

    #[test]
    fn trivial_group_lattice() {
        let l = lattice("cyc:1");
        assert_eq!(l.len(), 1);
        assert_eq!(l.chain_length(), 0);
    }

    #[test]
    fn longest_chain_is_a_chain_of_covers() {
        let l = lattice("sym:4");
        let chain = l.longest_chain();
        assert_eq!(chain.len() as u32, l.chain_length() + 1);
        for w in chain.windows(2) {
            assert!(l.covers().contains(&(w[0], w[1])));
        }
    }

    #[test]
    fn budget_error_carries_partial_result() {
        let g = FiniteGroup::parse("sym:4").unwrap();
        match enumerate(&g, DEFAULT_MAX_ORDER, 10) {
            Err(LatticeError::Budget { found, .. }) => assert!(found.len() > 10),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(enumerate(&g, 10, 100), Err(LatticeError::TooLarge { .. })));
    }
}
