//! Breadth-first orbit enumeration on packed tuples.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use super::{generator_moves, NielsenError, Tuple};
use crate::group::{Element, FiniteGroup};

/// Packs `n`-tuples over a group of order `k` into base-`k` integers, first
/// entry least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TupleCodec {
    order: u128,
    n: usize,
    total: u128,
}

impl TupleCodec {
    pub fn new(order: usize, n: usize) -> Result<Self, NielsenError> {
        let total = (order as u128).checked_pow(n as u32).ok_or_else(|| NielsenError::InvalidArgument {
            field: "n".into(),
            reason: format!("{order}^{n} tuples do not fit in 128 bits"),
        })?;
        Ok(Self { order: order as u128, n, total })
    }

    /// `|G|^n`.
    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn encode(&self, t: &[Element]) -> u128 {
        t.iter().rev().fold(0, |acc, &x| acc * self.order + x as u128)
    }

    #[inline]
    pub fn decode_into(&self, mut code: u128, out: &mut [Element]) {
        for x in out.iter_mut() {
            *x = (code % self.order) as Element;
            code /= self.order;
        }
    }

    pub fn decode(&self, code: u128) -> Tuple {
        let mut v = vec![0; self.n];
        self.decode_into(code, &mut v);
        Tuple(v)
    }
}

/// Visited set supporting concurrent insert-if-absent: an atomic bitset
/// when the whole space is small enough, sharded hash sets otherwise.
enum Visited {
    Dense(Vec<AtomicU64>),
    Sharded(Vec<Mutex<HashSet<u128>>>),
}

const DENSE_LIMIT: u128 = 1 << 31;
const SHARDS: usize = 64;

impl Visited {
    fn new(total: u128) -> Self {
        if total <= DENSE_LIMIT {
            Visited::Dense((0..total.div_ceil(64)).map(|_| AtomicU64::new(0)).collect())
        } else {
            Visited::Sharded((0..SHARDS).map(|_| Mutex::new(HashSet::new())).collect())
        }
    }

    /// Returns `true` if `code` was absent.
    fn insert(&self, code: u128) -> bool {
        match self {
            Visited::Dense(bits) => {
                let bit = 1u64 << (code & 63);
                bits[(code >> 6) as usize].fetch_or(bit, Ordering::Relaxed) & bit == 0
            }
            Visited::Sharded(shards) => {
                let h = (code ^ (code >> 64)).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 58;
                shards[h as usize % SHARDS].lock().expect("visited shard").insert(code)
            }
        }
    }
}

/// An enumerated orbit; `codes` is sorted.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub codec: TupleCodec,
    pub codes: Vec<u128>,
    /// `false` when the state cap stopped the search.
    pub complete: bool,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        t.len() == self.codec.arity() && self.codes.binary_search(&self.codec.encode(&t.0)).is_ok()
    }

    pub fn tuples(&self) -> impl Iterator<Item = Tuple> + '_ {
        self.codes.iter().map(|&c| self.codec.decode(c))
    }
}

/// The orbit of `t` under all Nielsen moves, explored level by level in
/// parallel. At most `cap` states are kept.
pub fn orbit(g: &FiniteGroup, t: &Tuple, cap: u64) -> Result<Orbit, NielsenError> {
    let codec = TupleCodec::new(g.order(), t.len())?;
    let moves = generator_moves(t.len());
    let visited = Visited::new(codec.total());
    let start = codec.encode(&t.0);
    visited.insert(start);
    let mut all = vec![start];
    let mut frontier = vec![start];
    let mut complete = true;
    while !frontier.is_empty() {
        let mut next: Vec<u128> = frontier
            .par_chunks(1024)
            .flat_map_iter(|chunk| {
                let mut buf = vec![0; codec.arity()];
                let mut out = Vec::new();
                for &c in chunk {
                    for &m in &moves {
                        codec.decode_into(c, &mut buf);
                        m.apply_in_place(g, &mut buf);
                        let code = codec.encode(&buf);
                        if visited.insert(code) {
                            out.push(code);
                        }
                    }
                }
                out
            })
            .collect();
        next.sort_unstable();
        if (all.len() + next.len()) as u64 > cap {
            let room = cap.saturating_sub(all.len() as u64) as usize;
            all.extend_from_slice(&next[..room.min(next.len())]);
            complete = false;
            break;
        }
        all.extend_from_slice(&next);
        frontier = next;
    }
    all.sort_unstable();
    Ok(Orbit { codec, codes: all, complete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::closure;

    fn generating_pairs(g: &FiniteGroup) -> usize {
        let mut count = 0;
        for a in g.elements() {
            for b in g.elements() {
                if closure(g, &[a, b], false).order() == g.order() {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn z2_pair_orbit() {
        let g = FiniteGroup::parse("cyc:2").unwrap();
        let o = orbit(&g, &Tuple(vec![1, 0]), 1000).unwrap();
        assert!(o.complete);
        assert_eq!(o.len(), 3);
        assert!(!o.contains(&Tuple(vec![0, 0])));
    }

    #[test]
    fn generating_pairs_form_one_orbit() {
        let z6 = FiniteGroup::parse("cyc:6").unwrap();
        assert_eq!(generating_pairs(&z6), 24);
        assert_eq!(orbit(&z6, &Tuple(vec![2, 3]), 1000).unwrap().len(), 24);
        let s3 = FiniteGroup::parse("sym:3").unwrap();
        assert_eq!(generating_pairs(&s3), 18);
        let t = Tuple::parse(&s3, "(1 2),(1 2 3)").unwrap();
        assert_eq!(orbit(&s3, &t, 1000).unwrap().len(), 18);
    }

    #[test]
    fn cap_marks_orbit_incomplete() {
        let s3 = FiniteGroup::parse("sym:3").unwrap();
        let t = Tuple::parse(&s3, "(1 2),(1 2 3)").unwrap();
        let o = orbit(&s3, &t, 5).unwrap();
        assert!(!o.complete);
        assert_eq!(o.len(), 5);
    }

    #[test]
    fn codec_round_trips() {
        let c = TupleCodec::new(48, 5).unwrap();
        let t = Tuple(vec![47, 0, 13, 2, 31]);
        assert_eq!(c.decode(c.encode(&t.0)), t);
    }
}
