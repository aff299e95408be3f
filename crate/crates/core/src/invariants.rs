//! Rank and incompressibility invariants.
//!
//! * `d(G)`: the smallest size of a generating set;
//! * `d̃(G)`: the largest `d(H)` over subgroups `H`;
//! * `ic(G)`: the largest incompressible generating set;
//! * `ĩc(G)`: the largest incompressible set;
//! * `cl(G)`: the longest strictly increasing chain of subgroups.
//!
//! A set is incompressible when no element lies in the subgroup generated
//! by the others. Replacing an element by another generator of the same
//! cyclic subgroup changes neither the generated subgroup nor
//! incompressibility, so every search runs over cyclic subgroups, one
//! representative (the smallest generating id) each.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{closure, Element, FiniteGroup, Subgroup};
use crate::lattice::SubgroupLattice;

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error("search budget of {budget} nodes exhausted; best lower bound so far is {lower_bound}")]
    Budget { budget: u64, lower_bound: u32 },
}

/// Number of ones in the binary expansion of `n`.
pub fn binary_ones(n: u64) -> u32 {
    n.count_ones()
}

/// `⌊log₂ n⌋` for `n ≥ 1`.
pub fn floor_log2(n: usize) -> u32 {
    usize::BITS - 1 - n.leading_zeros()
}

/// Whether no element of `s` lies in the subgroup generated by the others.
pub fn is_incompressible(g: &FiniteGroup, s: &[Element]) -> bool {
    if s.is_empty() {
        return true;
    }
    (0..s.len()).all(|i| {
        let rest: Vec<Element> = s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
        !closure(g, &rest, false).contains(s[i])
    })
}

/// Whether `s` generates `g`.
pub fn generates(g: &FiniteGroup, s: &[Element]) -> bool {
    closure(g, s, false).order() == g.order()
}

/// One representative per non-trivial cyclic subgroup (the smallest
/// generating id), sorted by id, with the subgroup itself.
fn cyclic_reps(g: &FiniteGroup) -> Vec<(Element, Subgroup)> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for x in g.elements().skip(1) {
        let c = closure(g, &[x], false);
        if seen.insert(c.members().to_vec()) {
            out.push((x, c));
        }
    }
    out
}

/// `d(G)` with the lexicographically smallest generating set of that size
/// among cyclic-subgroup representatives.
pub fn rank(g: &FiniteGroup) -> (u32, Vec<Element>) {
    if g.order() == 1 {
        return (0, Vec::new());
    }
    let reps: Vec<Element> = cyclic_reps(g).into_iter().map(|(x, _)| x).collect();
    for k in 1..=floor_log2(g.order()) as usize {
        let found = (0..reps.len()).into_par_iter().find_map_first(|first| {
            let start = Subgroup::trivial(g).join(g, &[reps[first]]);
            let mut chosen = vec![reps[first]];
            rank_dfs(g, &reps, first + 1, k, &start, &mut chosen)
        });
        if let Some(w) = found {
            return (k as u32, w);
        }
    }
    unreachable!("every finite group has a generating set of size at most log2 |G|")
}

fn rank_dfs(
    g: &FiniteGroup,
    reps: &[Element],
    from: usize,
    k: usize,
    h: &Subgroup,
    chosen: &mut Vec<Element>,
) -> Option<Vec<Element>> {
    if h.order() == g.order() {
        return Some(chosen.clone());
    }
    if chosen.len() == k {
        return None;
    }
    for i in from..reps.len() {
        if h.contains(reps[i]) {
            continue;
        }
        let next = h.join(g, &[reps[i]]);
        chosen.push(reps[i]);
        let r = rank_dfs(g, reps, i + 1, k, &next, chosen);
        chosen.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

/// `d(H)` for a subgroup, with a witness in `g`'s ids.
pub fn subgroup_rank(g: &FiniteGroup, h: &Subgroup) -> (u32, Vec<Element>) {
    let local = g.subgroup_as_group(h);
    let (d, w) = rank(&local);
    (d, w.into_iter().map(|x| h.members()[x as usize]).collect())
}

/// `d̃(G)`: the maximum rank over conjugacy-class representatives of
/// subgroups, with the realizing subgroup's generating set.
pub fn d_tilde(g: &FiniteGroup, lattice: &SubgroupLattice) -> (u32, Vec<Element>) {
    lattice
        .class_representatives()
        .into_par_iter()
        .map(|i| subgroup_rank(g, lattice.get(i)))
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0, Vec::new()), |best, cur| {
            if cur.0 > best.0 || (cur.0 == best.0 && cur.1 < best.1) {
                cur
            } else {
                best
            }
        })
}

/// Which maximum an incompressibility search looks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcKind {
    /// `ic(G)`: incompressible sets that generate `G`.
    Generating,
    /// `ĩc(G)`: all incompressible sets.
    Any,
}

struct IcSearch<'a> {
    g: &'a FiniteGroup,
    lattice: &'a SubgroupLattice,
    reps: &'a [(Element, Subgroup)],
    kind: IcKind,
    cl: u32,
    upper: u32,
    nodes: &'a AtomicU64,
    budget: u64,
}

struct Node {
    chosen: Vec<usize>,
    /// `⟨S⟩`.
    span: Subgroup,
    /// `⟨S ∖ {s_i}⟩` for each chosen `s_i`.
    without: Vec<Subgroup>,
}

impl IcSearch<'_> {
    fn depth(&self, h: &Subgroup) -> u32 {
        self.lattice.index_of(h).map_or(0, |i| self.lattice.depth(i))
    }

    /// Explores extensions of `node` by candidates with index `≥ from`
    /// other than `skip`; updates `best` with strictly larger finds.
    fn dfs(&self, node: &Node, from: usize, skip: usize, best: &mut (u32, Vec<usize>)) -> Result<(), ()> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(());
        }
        let k = node.chosen.len() as u32;
        let counts = match self.kind {
            IcKind::Any => true,
            IcKind::Generating => node.span.order() == self.g.order(),
        };
        if counts && k > best.0 {
            *best = (k, node.chosen.clone());
        }
        if best.0 >= self.upper || node.span.order() == self.g.order() {
            return Ok(());
        }
        // a chain through ⟨S⟩ bounds how many more elements can be added
        let room = self.cl.saturating_sub(self.depth(&node.span));
        if k + room <= best.0 {
            return Ok(());
        }
        for c in from..self.reps.len() {
            if c == skip {
                continue;
            }
            let (x, cyc) = &self.reps[c];
            if cyc.is_subgroup_of(&node.span) {
                continue;
            }
            let compresses = node
                .chosen
                .iter()
                .zip(&node.without)
                .any(|(&s, w)| w.join_reaches(self.g, &[*x], self.reps[s].0));
            if compresses {
                continue;
            }
            let mut chosen = node.chosen.clone();
            chosen.push(c);
            let mut without: Vec<Subgroup> = node.without.iter().map(|w| w.join(self.g, &[*x])).collect();
            without.push(node.span.clone());
            let child = Node { chosen, span: node.span.join(self.g, &[*x]), without };
            self.dfs(&child, c + 1, skip, best)?;
            if best.0 >= self.upper {
                break;
            }
        }
        Ok(())
    }
}

/// Result of an `ic`/`ĩc` search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IcValue {
    pub value: u32,
    pub witness: Vec<Element>,
}

/// Exact `ic(G)` or `ĩc(G)`, searched over incompressible sets of cyclic
/// subgroups. The first chosen subgroup ranges over conjugacy-class
/// representatives only, since conjugation preserves both properties.
/// `upper` is a known upper bound (`cl(G)` or `ĩc(G)`) at which the search
/// stops early.
pub fn ic_search(
    g: &FiniteGroup,
    lattice: &SubgroupLattice,
    kind: IcKind,
    upper: u32,
    budget: u64,
) -> Result<IcValue, InvariantError> {
    if g.order() == 1 {
        return Ok(IcValue { value: 0, witness: Vec::new() });
    }
    let reps = cyclic_reps(g);
    let mut anchors: Vec<usize> = Vec::new();
    let mut seen_class = std::collections::HashSet::new();
    for (i, (_, c)) in reps.iter().enumerate() {
        let class = lattice.class_of(lattice.index_of(c).expect("cyclic subgroup is in the lattice"));
        if seen_class.insert(class) {
            anchors.push(i);
        }
    }
    let nodes = AtomicU64::new(0);
    let search = IcSearch {
        g,
        lattice,
        reps: &reps,
        kind,
        cl: lattice.chain_length(),
        upper,
        nodes: &nodes,
        budget,
    };
    let results: Vec<Result<(u32, Vec<usize>), u32>> = anchors
        .par_iter()
        .map(|&a| {
            let (x, cyc) = &reps[a];
            let root = Node {
                chosen: vec![a],
                span: Subgroup::trivial(g).join(g, &[*x]),
                without: vec![Subgroup::trivial(g)],
            };
            debug_assert_eq!(&root.span, cyc);
            let mut best = (0, Vec::new());
            match search.dfs(&root, 0, a, &mut best) {
                Ok(()) => Ok(best),
                Err(()) => Err(best.0),
            }
        })
        .collect();
    let mut best: Option<(u32, Vec<Element>)> = None;
    let mut lower = 0;
    let mut exhausted = false;
    for r in results {
        match r {
            Ok((k, set)) => {
                lower = lower.max(k);
                let mut w: Vec<Element> = set.iter().map(|&i| reps[i].0).collect();
                w.sort_unstable();
                let better = match &best {
                    None => true,
                    Some((bk, bw)) => k > *bk || (k == *bk && w < *bw),
                };
                if better {
                    best = Some((k, w));
                }
            }
            Err(k) => {
                lower = lower.max(k);
                exhausted = true;
            }
        }
    }
    if exhausted {
        return Err(InvariantError::Budget { budget, lower_bound: lower });
    }
    let (value, witness) = best.expect("at least one anchor");
    Ok(IcValue { value, witness })
}

/// Normal abelian subgroup of rank at most `r_max` and index at most
/// `j_max`, if one exists; the one of smallest index (then smallest lattice
/// position) is returned.
pub fn jordan_size_check(
    g: &FiniteGroup,
    lattice: &SubgroupLattice,
    j_max: u64,
    r_max: u32,
) -> Option<usize> {
    let mut normal = lattice.normal_subgroups();
    normal.sort_by_key(|&i| (std::cmp::Reverse(lattice.get(i).order()), i));
    normal.into_iter().find(|&i| {
        let h = lattice.get(i);
        let index = (g.order() / h.order()) as u64;
        index <= j_max && is_abelian_subgroup(g, h) && subgroup_rank(g, h).0 <= r_max
    })
}

pub fn is_abelian_subgroup(g: &FiniteGroup, h: &Subgroup) -> bool {
    let gens: Vec<Element> = if h.generators().is_empty() {
        h.members().to_vec()
    } else {
        h.generators().to_vec()
    };
    gens.iter().all(|&a| gens.iter().all(|&b| g.mul(a, b) == g.mul(b, a)))
}

/// Everything computed by [`report`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub group: String,
    pub order: usize,
    pub d: u32,
    pub d_tilde: u32,
    pub ic: u32,
    pub ic_tilde: Option<u32>,
    pub cl: u32,
    pub floor_log2_order: u32,
    pub witnesses: InvariantWitnesses,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantWitnesses {
    pub d: Vec<Element>,
    pub d_tilde: Vec<Element>,
    pub ic: Vec<Element>,
    pub ic_tilde: Option<Vec<Element>>,
    /// Orders of the subgroups along a longest chain.
    pub cl_chain: Vec<usize>,
}

/// Default node budget for the `ic` searches.
pub const DEFAULT_SEARCH_BUDGET: u64 = 200_000_000;

/// All invariants of `g`. With `skip_ic_tilde`, `ĩc` is not computed and
/// `ic` is bounded by `cl` instead.
pub fn report(
    g: &FiniteGroup,
    lattice: &SubgroupLattice,
    skip_ic_tilde: bool,
    budget: u64,
) -> Result<InvariantReport, InvariantError> {
    let (d, dw) = rank(g);
    let (dt, dtw) = d_tilde(g, lattice);
    let cl = lattice.chain_length();
    let ict = if skip_ic_tilde { None } else { Some(ic_search(g, lattice, IcKind::Any, cl, budget)?) };
    let ic = ic_search(g, lattice, IcKind::Generating, ict.as_ref().map_or(cl, |v| v.value), budget)?;
    let cl_chain = lattice.longest_chain().into_iter().map(|i| lattice.get(i).order()).collect();
    Ok(InvariantReport {
        group: g.spec().to_string(),
        order: g.order(),
        d,
        d_tilde: dt,
        ic: ic.value,
        ic_tilde: ict.as_ref().map(|v| v.value),
        cl,
        floor_log2_order: floor_log2(g.order()),
        witnesses: InvariantWitnesses {
            d: dw,
            d_tilde: dtw,
            ic: ic.witness,
            ic_tilde: ict.map(|v| v.witness),
            cl_chain,
        },
    })
}
