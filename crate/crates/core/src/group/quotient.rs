use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{is_normal, Element, FiniteGroup, GroupError, Subgroup};

/// Largest quotient order materialized as a Cayley table.
const QUOTIENT_LIMIT: usize = 1 << 11;

/// The canonical map `G → G/N`. Cosets are numbered in order of their
/// smallest element, so the identity coset is 0 and `reps[i]` is the
/// smallest member of coset `i`.
#[derive(Debug, Clone)]
pub struct Projection {
    map: Vec<Element>,
    reps: Vec<Element>,
}

impl Projection {
    pub fn apply(&self, e: Element) -> Element {
        self.map[e as usize]
    }

    /// Smallest element of the coset `q`.
    pub fn lift(&self, q: Element) -> Element {
        self.reps[q as usize]
    }

    pub fn kernel(&self) -> Vec<Element> {
        (0..self.map.len() as Element).filter(|&e| self.map[e as usize] == 0).collect()
    }

    /// Checks the homomorphism property on all pairs when `|G| ≤ 1024`,
    /// otherwise on `10^4` seeded random pairs.
    pub fn verify(&self, g: &FiniteGroup, q: &FiniteGroup) -> bool {
        let hom = |a: Element, b: Element| self.apply(g.mul(a, b)) == q.mul(self.apply(a), self.apply(b));
        if g.order() <= 1024 {
            g.elements().all(|a| g.elements().all(|b| hom(a, b)))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x9e37);
            let n = g.order() as Element;
            (0..10_000).all(|_| hom(rng.gen_range(0..n), rng.gen_range(0..n)))
        }
    }
}

/// `G/N` as a Cayley-table group, with the verified projection.
pub fn quotient(g: &FiniteGroup, n: &Subgroup) -> Result<(FiniteGroup, Projection), GroupError> {
    if !is_normal(g, n) {
        return Err(GroupError::NotNormal);
    }
    let k = g.order() / n.order();
    if k > QUOTIENT_LIMIT {
        return Err(GroupError::TooLarge { order: k as u128, limit: QUOTIENT_LIMIT });
    }
    let mut map = vec![Element::MAX; g.order()];
    let mut reps = Vec::with_capacity(k);
    for e in g.elements() {
        if map[e as usize] != Element::MAX {
            continue;
        }
        let id = reps.len() as Element;
        reps.push(e);
        for &x in n.members() {
            map[g.mul(e, x) as usize] = id;
        }
    }
    let mut flat = Vec::with_capacity(k * k);
    for &a in &reps {
        for &b in &reps {
            flat.push(map[g.mul(a, b) as usize]);
        }
    }
    let mut q = FiniteGroup::from_flat_table(format!("{}/N{}", g.spec(), n.order()), flat, k)?;
    q.names = Some(reps.iter().map(|&r| format!("[{}]", g.name(r))).collect());
    let proj = Projection { map, reps };
    if !proj.verify(g, &q) {
        return Err(GroupError::Unsupported("coset projection failed the homomorphism check".into()));
    }
    Ok((q, proj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::closure;

    #[test]
    fn s3_mod_a3_has_order_two() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let c = g.parse_element("(1 2 3)").unwrap();
        let a3 = closure(&g, &[c], false);
        let (q, p) = quotient(&g, &a3).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(p.kernel(), a3.members());
    }

    #[test]
    fn z6_mod_three() {
        let g = FiniteGroup::parse("cyc:6").unwrap();
        let (q, _) = quotient(&g, &closure(&g, &[3], false)).unwrap();
        assert_eq!(q.order(), 3);
        assert!(q.is_abelian());
    }

    #[test]
    fn lamplighter_mod_lamps_is_cyclic_of_order_three() {
        let g = FiniteGroup::parse("lamp:3,2").unwrap();
        let lamps = g.lamp_subgroup().unwrap();
        let (q, p) = quotient(&g, &lamps).unwrap();
        assert_eq!(q.order(), 3);
        assert!(q.elements().any(|e| q.element_order(e) == 3));
        assert_eq!(p.kernel(), lamps.members());
    }

    #[test]
    fn non_normal_subgroup_is_rejected() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let t = g.parse_element("(1 2)").unwrap();
        assert!(matches!(quotient(&g, &closure(&g, &[t], false)), Err(GroupError::NotNormal)));
    }
}
