//! Redundancy: reaching, inside the orbit, a tuple whose first `n − k`
//! entries already generate the image.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{generator_moves, MoveSeq, NielsenError, NielsenMove, Tuple};
use crate::group::{closure, Element, FiniteGroup, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Redundancy {
    Redundant { witness: MoveSeq, endpoint: Tuple },
    /// The whole orbit was searched.
    NotRedundant { explored: u64 },
    /// The state cap was hit first.
    Indeterminate { explored: u64 },
}

impl Redundancy {
    pub fn is_redundant(&self) -> bool {
        matches!(self, Redundancy::Redundant { .. })
    }
}

/// Largest number of keep-sets tried exhaustively before falling back to
/// greedy dropping.
const SUBSET_LIMIT: u128 = 4096;

/// Positions of `n − k` entries of `t` that generate `image`, if found
/// without moving anything.
fn generating_positions(g: &FiniteGroup, t: &[Element], k: usize, image: &Subgroup) -> Option<Vec<usize>> {
    let n = t.len();
    let keep = n - k;
    let generates = |pos: &[usize]| {
        let xs: Vec<Element> = pos.iter().map(|&i| t[i]).collect();
        closure(g, &xs, false).order() == image.order()
    };
    if choose(n as u128, k as u128) <= SUBSET_LIMIT {
        let mut pos: Vec<usize> = (0..keep).collect();
        loop {
            if generates(&pos) {
                return Some(pos);
            }
            let Some(p) = (0..keep).rev().find(|&p| pos[p] < n - keep + p) else { return None };
            pos[p] += 1;
            for q in p + 1..keep {
                pos[q] = pos[q - 1] + 1;
            }
        }
    }
    // greedy: repeatedly drop the last entry lying in the span of the rest
    let mut alive: Vec<usize> = (0..n).collect();
    while alive.len() > keep {
        let drop = (0..alive.len()).rev().find(|&a| {
            let rest: Vec<usize> = alive.iter().enumerate().filter(|&(b, _)| b != a).map(|(_, &i)| i).collect();
            generates(&rest)
        })?;
        alive.remove(drop);
    }
    Some(alive)
}

fn choose(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Swaps bringing the entries at `positions` (in order) to the front.
pub(crate) fn bring_to_front(n: usize, positions: &[usize]) -> MoveSeq {
    let mut at: Vec<usize> = (0..n).collect(); // at[slot] = original index
    let mut seq = MoveSeq::new();
    for (dest, &orig) in positions.iter().enumerate() {
        let cur = at.iter().position(|&o| o == orig).expect("position tracked");
        if cur != dest {
            seq.push(NielsenMove::Swap(dest, cur));
            at.swap(dest, cur);
        }
    }
    seq
}

/// Decides whether `t` is `k`-redundant, searching its orbit breadth-first
/// (at most `cap` states) and checking every visited tuple for `n − k`
/// entries that generate the image.
pub fn is_redundant(g: &FiniteGroup, t: &Tuple, k: usize, cap: u64) -> Result<Redundancy, NielsenError> {
    let n = t.len();
    if k == 0 || k >= n {
        return Err(NielsenError::InvalidArgument {
            field: "k".into(),
            reason: format!("need 1 <= k < n = {n}, got {k}"),
        });
    }
    for &e in &t.0 {
        g.check(e)?;
    }
    let image = t.image(g);
    let finish = |path: MoveSeq, pos: Vec<usize>| -> Result<Redundancy, NielsenError> {
        let mut witness = path;
        witness.extend(&bring_to_front(n, &pos));
        let endpoint = witness.replay(g, t)?;
        Ok(Redundancy::Redundant { witness, endpoint })
    };
    if let Some(pos) = generating_positions(g, &t.0, k, &image) {
        return finish(MoveSeq::new(), pos);
    }
    let moves = generator_moves(n);
    let mut parent: HashMap<Vec<Element>, (Vec<Element>, NielsenMove)> = HashMap::new();
    let mut seen: std::collections::HashSet<Vec<Element>> = std::collections::HashSet::new();
    seen.insert(t.0.clone());
    let mut queue = VecDeque::from([t.0.clone()]);
    while let Some(cur) = queue.pop_front() {
        for &m in &moves {
            let mut next = cur.clone();
            m.apply_in_place(g, &mut next);
            if seen.contains(&next) {
                continue;
            }
            if seen.len() as u64 >= cap {
                return Ok(Redundancy::Indeterminate { explored: seen.len() as u64 });
            }
            seen.insert(next.clone());
            parent.insert(next.clone(), (cur.clone(), m));
            if let Some(pos) = generating_positions(g, &next, k, &image) {
                let mut path = Vec::new();
                let mut x = next.clone();
                while let Some((p, mv)) = parent.get(&x) {
                    path.push(*mv);
                    x = p.clone();
                }
                path.reverse();
                return finish(MoveSeq(path), pos);
            }
            queue.push_back(next);
        }
    }
    Ok(Redundancy::NotRedundant { explored: seen.len() as u64 })
}

/// Lifts a redundancy witness for the first `prefix_len` entries to the
/// whole tuple.
///
/// `prefix_witness` may only touch the first `prefix_len` positions and
/// must end with the last prefix entry inside the span of the other prefix
/// entries. That entry is then swapped to the last position, where the
/// remaining entries regenerate it.
pub fn partial_redundancy_lift(
    g: &FiniteGroup,
    t: &Tuple,
    prefix_len: usize,
    prefix_witness: &MoveSeq,
) -> Result<MoveSeq, NielsenError> {
    let n = t.len();
    if prefix_len == 0 || prefix_len > n {
        return Err(NielsenError::InvalidArgument {
            field: "prefix_len".into(),
            reason: format!("need 1 <= prefix_len <= {n}"),
        });
    }
    for &m in prefix_witness.moves() {
        m.check(prefix_len)
            .map_err(|_| NielsenError::BadWitness(format!("move {m} leaves the prefix of length {prefix_len}")))?;
    }
    let prefix = Tuple(t.0[..prefix_len].to_vec());
    let end = prefix_witness.replay(g, &prefix)?;
    let last = end.0[prefix_len - 1];
    if !closure(g, &end.0[..prefix_len - 1], false).contains(last) {
        return Err(NielsenError::BadWitness(
            "prefix witness does not end with a redundant last entry".into(),
        ));
    }
    let mut lifted = prefix_witness.clone();
    if prefix_len < n {
        lifted.push(NielsenMove::Swap(prefix_len - 1, n - 1));
    }
    let out = lifted.replay(g, t)?;
    if closure(g, &out.0[..n - 1], false) != t.image(g) {
        return Err(NielsenError::BadWitness("lifted witness does not preserve the image".into()));
    }
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_witness(g: &FiniteGroup, t: &Tuple, k: usize, r: &Redundancy) {
        let Redundancy::Redundant { witness, endpoint } = r else { panic!("expected redundant, got {r:?}") };
        let replayed = witness.replay_checked(g, t).unwrap();
        assert_eq!(&replayed, endpoint);
        let n = t.len();
        assert_eq!(closure(g, &endpoint.0[..n - k], false), t.image(g));
    }

    #[test]
    fn z6_two_three_is_redundant() {
        let g = FiniteGroup::parse("cyc:6").unwrap();
        let t = Tuple(vec![2, 3]);
        let r = is_redundant(&g, &t, 1, 1000).unwrap();
        check_witness(&g, &t, 1, &r);
        if let Redundancy::Redundant { witness, .. } = &r {
            assert!(!witness.is_empty());
        }
    }

    #[test]
    fn identity_tuple_is_maximally_redundant() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let t = Tuple::identity(4);
        let r = is_redundant(&g, &t, 3, 10).unwrap();
        check_witness(&g, &t, 3, &r);
    }

    #[test]
    fn s3_transpositions() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let t = Tuple::parse(&g, "(1 2),(1 3),(2 3)").unwrap();
        let r = is_redundant(&g, &t, 1, 1000).unwrap();
        check_witness(&g, &t, 1, &r);
    }

    #[test]
    fn generating_pair_of_s3_is_not_redundant() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let t = Tuple::parse(&g, "(1 2),(1 2 3)").unwrap();
        assert_eq!(is_redundant(&g, &t, 1, 1000).unwrap(), Redundancy::NotRedundant { explored: 18 });
        assert!(matches!(is_redundant(&g, &t, 1, 3).unwrap(), Redundancy::Indeterminate { .. }));
    }

    #[test]
    fn lift_of_z6_prefix() {
        let g = FiniteGroup::parse("cyc:6").unwrap();
        let t = Tuple(vec![2, 3, 0]);
        let prefix = Tuple(vec![2, 3]);
        let Redundancy::Redundant { witness, .. } = is_redundant(&g, &prefix, 1, 100).unwrap() else {
            panic!()
        };
        let lifted = partial_redundancy_lift(&g, &t, 2, &witness).unwrap();
        let end = lifted.replay_checked(&g, &t).unwrap();
        assert_eq!(closure(&g, &end.0[..2], false).order(), 6);
    }

    #[test]
    fn lift_passes_identity_prefix_through() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let t = Tuple::parse(&g, "(1 2),0,(1 2 3)").unwrap();
        let lifted = partial_redundancy_lift(&g, &t, 2, &MoveSeq::new()).unwrap();
        assert_eq!(lifted, MoveSeq(vec![NielsenMove::Swap(1, 2)]));
    }

    #[test]
    fn lift_rejects_bad_witness() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let t = Tuple::parse(&g, "(1 2),(1 2 3),(1 3)").unwrap();
        assert!(partial_redundancy_lift(&g, &t, 2, &MoveSeq::new()).is_err());
        let escaping = MoveSeq(vec![NielsenMove::Swap(0, 2)]);
        assert!(partial_redundancy_lift(&g, &t, 2, &escaping).is_err());
    }
}
