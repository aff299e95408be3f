//! Orbit classification of all of `G^n`.
//!
//! Swaps and inversions generate the hyperoctahedral group `W` acting on
//! positions and signs, and every orbit is a union of `W`-orbits. Each
//! `W`-orbit has a canonical form: replace each entry by the smaller of
//! `x, x⁻¹` and sort. The search runs on canonical forms, where the
//! remaining moves become `g_i ↦ g_i g_j^{±1}` and `g_i ↦ g_j^{±1} g_i`
//! (left multiplication is right multiplication conjugated by an
//! inversion). A canonical form stands for
//! `n! / ∏ m_x! · ∏_{x ≠ x⁻¹} 2^{m_x}` tuples.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{NielsenError, Tuple, TupleCodec};
use crate::group::{closure, Element, FiniteGroup};
use crate::lattice::SubgroupLattice;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub representative: Tuple,
    pub size: u128,
    /// Lattice index of the image subgroup.
    pub image_subgroup: usize,
    pub image_order: usize,
    /// Whether this orbit is all of `Epi(F_n; image)`.
    pub is_epi_of_image: bool,
    /// Finer invariant separating orbits with the same image, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub group: String,
    pub order: usize,
    pub n: usize,
    pub total_tuples: u128,
    pub canonical_states: u64,
    pub orbits: Vec<OrbitEntry>,
    /// `true` iff the orbits are exactly the sets `Epi(F_n; H)`.
    pub matched_classification: bool,
    /// Lattice indices of image subgroups split into several orbits.
    pub split_images: Vec<usize>,
}

/// `|Epi(F_n; H)|` for every subgroup `H` in the lattice, by inclusion
/// and exclusion: `|H|^n = Σ_{K ≤ H} |Epi(F_n; K)|`.
pub fn epi_counts(lattice: &SubgroupLattice, n: usize) -> Vec<u128> {
    let subs = lattice.subgroups();
    let mut epi = vec![0u128; subs.len()];
    for j in 0..subs.len() {
        let hom = (subs[j].order() as u128).pow(n as u32);
        let below: u128 = (0..j)
            .filter(|&i| subs[j].order() % subs[i].order() == 0 && subs[i].is_subgroup_of(&subs[j]))
            .map(|i| epi[i])
            .sum();
        epi[j] = hom - below;
    }
    epi
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

struct Canon<'a> {
    g: &'a FiniteGroup,
    codec: TupleCodec,
    /// `min(x, x⁻¹)` for each element.
    rep: Vec<Element>,
}

impl Canon<'_> {
    fn canonicalize(&self, t: &mut [Element]) {
        for x in t.iter_mut() {
            *x = self.rep[*x as usize];
        }
        t.sort_unstable();
    }

    fn weight(&self, t: &[Element]) -> u128 {
        let n = t.len() as u128;
        let mut size: u128 = (1..=n).product();
        let mut i = 0;
        while i < t.len() {
            let mut j = i;
            while j < t.len() && t[j] == t[i] {
                j += 1;
            }
            let m = (j - i) as u128;
            size /= (1..=m).product::<u128>();
            if self.g.inv(t[i]) != t[i] {
                size <<= m;
            }
            i = j;
        }
        size
    }

    fn neighbors(&self, t: &[Element], out: &mut Vec<u128>) {
        let n = t.len();
        let mut buf = t.to_vec();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (a, b) = (t[i], t[j]);
                let bi = self.g.inv(b);
                for y in [self.g.mul(a, b), self.g.mul(a, bi), self.g.mul(b, a), self.g.mul(bi, a)] {
                    buf.copy_from_slice(t);
                    buf[i] = y;
                    self.canonicalize(&mut buf);
                    out.push(self.codec.encode(&buf));
                }
            }
        }
    }
}

/// Partitions `G^n` into Nielsen orbits and compares them with the sets
/// `Epi(F_n; H)`. `budget` bounds the number of canonical states.
pub fn classify(
    g: &FiniteGroup,
    n: usize,
    lattice: &SubgroupLattice,
    budget: u64,
) -> Result<OrbitReport, NielsenError> {
    if n == 0 {
        return Err(NielsenError::EmptyTuple);
    }
    let codec = TupleCodec::new(g.order(), n)?;
    let rep: Vec<Element> = g.elements().map(|x| x.min(g.inv(x))).collect();
    let reps: Vec<Element> = g.elements().filter(|&x| rep[x as usize] == x).collect();
    let states = binomial(reps.len() as u128 + n as u128 - 1, n as u128);
    if states > budget as u128 {
        return Err(NielsenError::Budget { states: states.to_string(), budget });
    }
    let canon = Canon { g, codec, rep };
    let epi = epi_counts(lattice, n);

    let mut visited: HashSet<u128> = HashSet::with_capacity(states as usize);
    let mut orbits = Vec::new();
    let mut idx = vec![0usize; n];
    let mut t = vec![0 as Element; n];
    let mut nbrs = Vec::new();
    loop {
        for (x, &i) in t.iter_mut().zip(&idx) {
            *x = reps[i];
        }
        let code = codec.encode(&t);
        if visited.insert(code) {
            let mut size = 0u128;
            let mut queue = VecDeque::from([code]);
            let mut cur = vec![0; n];
            while let Some(c) = queue.pop_front() {
                codec.decode_into(c, &mut cur);
                size += canon.weight(&cur);
                nbrs.clear();
                canon.neighbors(&cur, &mut nbrs);
                for &y in &nbrs {
                    if visited.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
            let image = closure(g, &t, false);
            let image_subgroup = lattice
                .index_of_members(image.members())
                .expect("image subgroup is in the lattice");
            orbits.push(OrbitEntry {
                representative: Tuple(t.clone()),
                size,
                image_subgroup,
                image_order: image.order(),
                is_epi_of_image: size == epi[image_subgroup],
                label: None,
            });
        }
        // next non-decreasing index sequence
        let Some(pos) = (0..n).rev().find(|&p| idx[p] + 1 < reps.len()) else { break };
        let v = idx[pos] + 1;
        for x in &mut idx[pos..] {
            *x = v;
        }
    }

    let mut per_image: HashMap<usize, usize> = HashMap::new();
    for o in &orbits {
        *per_image.entry(o.image_subgroup).or_default() += 1;
    }
    let mut split_images: Vec<usize> = per_image.iter().filter(|&(_, &c)| c > 1).map(|(&h, _)| h).collect();
    split_images.sort_unstable();
    let matched = split_images.is_empty() && orbits.iter().all(|o| o.is_epi_of_image);
    if !matched {
        for o in orbits.iter_mut().filter(|o| split_images.contains(&o.image_subgroup)) {
            if let Ok(class) = g.tuple_determinant_class(&o.representative.0) {
                let parts: Vec<String> = class.iter().map(u32::to_string).collect();
                o.label = Some(format!("det in {{{}}}", parts.join(",")));
            }
        }
    }
    Ok(OrbitReport {
        group: g.spec().to_string(),
        order: g.order(),
        n,
        total_tuples: codec.total(),
        canonical_states: visited.len() as u64,
        orbits,
        matched_classification: matched,
        split_images,
    })
}
