//! The `Aut(F_n)` action on `G^n` by Nielsen moves.
//!
//! A tuple `(g_1, …, g_n)` is the homomorphism `F_n → G` sending the `i`-th
//! free generator to `g_i`. Moves are 0-based internally and 1-based in
//! JSON.

mod classify;
mod orbit;
mod redundancy;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::group::{closure, Element, FiniteGroup, GroupError, Subgroup};

pub use classify::{classify, epi_counts, OrbitEntry, OrbitReport};
pub use orbit::{orbit, Orbit, TupleCodec};
pub use redundancy::{is_redundant, partial_redundancy_lift, Redundancy};
pub(crate) use redundancy::bring_to_front;

#[derive(Debug, Error)]
pub enum NielsenError {
    #[error("move {mv} does not fit a tuple of length {n}")]
    IndexOutOfRange { mv: NielsenMove, n: usize },
    #[error("tuple must have at least one entry")]
    EmptyTuple,
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: String, reason: String },
    #[error("state space of {states} tuples exceeds the budget {budget}")]
    Budget { states: String, budget: u64 },
    #[error("witness rejected: {0}")]
    BadWitness(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// An ordered tuple of elements of one group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tuple(pub Vec<Element>);

impl Tuple {
    /// Checks that every entry belongs to `g` and the tuple is non-empty.
    pub fn new(g: &FiniteGroup, entries: Vec<Element>) -> Result<Self, NielsenError> {
        if entries.is_empty() {
            return Err(NielsenError::EmptyTuple);
        }
        for &e in &entries {
            g.check(e)?;
        }
        Ok(Tuple(entries))
    }

    pub fn identity(n: usize) -> Self {
        Tuple(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Element] {
        &self.0
    }

    /// The subgroup generated by the entries.
    pub fn image(&self, g: &FiniteGroup) -> Subgroup {
        closure(g, &self.0, false)
    }

    /// Parses comma-separated element ids or names.
    pub fn parse(g: &FiniteGroup, s: &str) -> Result<Self, NielsenError> {
        let entries = split_tuple(s)
            .into_iter()
            .map(|tok| g.parse_element(tok))
            .collect::<Result<Vec<_>, _>>()?;
        Tuple::new(g, entries)
    }
}

/// Splits on commas that are not inside parentheses, so cycle names like
/// `(1 2)` stay whole.
fn split_tuple(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '<' => depth += 1,
            ')' | ']' | '>' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// One elementary transformation, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NielsenMove {
    Swap(usize, usize),
    Invert(usize),
    /// `g_i ↦ g_i · g_j`.
    RightMul(usize, usize),
    /// `g_i ↦ g_i · g_j⁻¹`.
    RightMulInv(usize, usize),
}

impl NielsenMove {
    pub fn inverse(self) -> Self {
        match self {
            NielsenMove::RightMul(i, j) => NielsenMove::RightMulInv(i, j),
            NielsenMove::RightMulInv(i, j) => NielsenMove::RightMul(i, j),
            m => m,
        }
    }

    pub fn check(self, n: usize) -> Result<(), NielsenError> {
        let ok = match self {
            NielsenMove::Swap(i, j) => i < n && j < n,
            NielsenMove::Invert(i) => i < n,
            NielsenMove::RightMul(i, j) | NielsenMove::RightMulInv(i, j) => i < n && j < n && i != j,
        };
        if ok {
            Ok(())
        } else {
            Err(NielsenError::IndexOutOfRange { mv: self, n })
        }
    }

    /// Applies the move in place; indices must already be valid.
    #[inline]
    pub fn apply_in_place(self, g: &FiniteGroup, t: &mut [Element]) {
        match self {
            NielsenMove::Swap(i, j) => t.swap(i, j),
            NielsenMove::Invert(i) => t[i] = g.inv(t[i]),
            NielsenMove::RightMul(i, j) => t[i] = g.mul(t[i], t[j]),
            NielsenMove::RightMulInv(i, j) => t[i] = g.mul(t[i], g.inv(t[j])),
        }
    }
}

impl fmt::Display for NielsenMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NielsenMove::Swap(i, j) => write!(f, "swap({},{})", i + 1, j + 1),
            NielsenMove::Invert(i) => write!(f, "invert({})", i + 1),
            NielsenMove::RightMul(i, j) => write!(f, "rmul({},{})", i + 1, j + 1),
            NielsenMove::RightMulInv(i, j) => write!(f, "rmul_inv({},{})", i + 1, j + 1),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
enum MoveJson {
    Swap { i: usize, j: usize },
    Invert { i: usize },
    Rmul { i: usize, j: usize, inv: bool },
}

impl Serialize for NielsenMove {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let j = match *self {
            NielsenMove::Swap(i, j) => MoveJson::Swap { i: i + 1, j: j + 1 },
            NielsenMove::Invert(i) => MoveJson::Invert { i: i + 1 },
            NielsenMove::RightMul(i, j) => MoveJson::Rmul { i: i + 1, j: j + 1, inv: false },
            NielsenMove::RightMulInv(i, j) => MoveJson::Rmul { i: i + 1, j: j + 1, inv: true },
        };
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NielsenMove {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let zero = || serde::de::Error::custom("move indices are 1-based");
        Ok(match MoveJson::deserialize(d)? {
            MoveJson::Swap { i, j } => NielsenMove::Swap(i.checked_sub(1).ok_or_else(zero)?, j.checked_sub(1).ok_or_else(zero)?),
            MoveJson::Invert { i } => NielsenMove::Invert(i.checked_sub(1).ok_or_else(zero)?),
            MoveJson::Rmul { i, j, inv } => {
                let (i, j) = (i.checked_sub(1).ok_or_else(zero)?, j.checked_sub(1).ok_or_else(zero)?);
                if inv {
                    NielsenMove::RightMulInv(i, j)
                } else {
                    NielsenMove::RightMul(i, j)
                }
            }
        })
    }
}

/// Applies a single move, checking indices.
pub fn apply(g: &FiniteGroup, mv: NielsenMove, t: &Tuple) -> Result<Tuple, NielsenError> {
    mv.check(t.len())?;
    let mut out = t.clone();
    mv.apply_in_place(g, &mut out.0);
    Ok(out)
}

/// A replayable sequence of moves, applied first to last.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MoveSeq(pub Vec<NielsenMove>);

impl MoveSeq {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn push(&mut self, m: NielsenMove) {
        self.0.push(m);
    }

    pub fn extend(&mut self, other: &MoveSeq) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn moves(&self) -> &[NielsenMove] {
        &self.0
    }

    pub fn inverse(&self) -> MoveSeq {
        MoveSeq(self.0.iter().rev().map(|m| m.inverse()).collect())
    }

    /// Applies every move to `t`.
    pub fn replay(&self, g: &FiniteGroup, t: &Tuple) -> Result<Tuple, NielsenError> {
        let mut out = t.clone();
        for &m in &self.0 {
            m.check(out.len())?;
            m.apply_in_place(g, &mut out.0);
        }
        Ok(out)
    }

    /// Replays while checking that the image subgroup never changes.
    pub fn replay_checked(&self, g: &FiniteGroup, t: &Tuple) -> Result<Tuple, NielsenError> {
        let image = t.image(g);
        let mut out = t.clone();
        for (step, &m) in self.0.iter().enumerate() {
            m.check(out.len())?;
            m.apply_in_place(g, &mut out.0);
            if out.image(g) != image {
                return Err(NielsenError::BadWitness(format!("image changed at step {} ({m})", step + 1)));
            }
        }
        Ok(out)
    }
}

/// The BFS move set for arity `n`: adjacent swaps, inversions, and both
/// right multiplications over all ordered pairs. It is closed under
/// inverses.
pub fn generator_moves(n: usize) -> Vec<NielsenMove> {
    let mut moves = Vec::new();
    for i in 0..n.saturating_sub(1) {
        moves.push(NielsenMove::Swap(i, i + 1));
    }
    for i in 0..n {
        moves.push(NielsenMove::Invert(i));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                moves.push(NielsenMove::RightMul(i, j));
                moves.push(NielsenMove::RightMulInv(i, j));
            }
        }
    }
    moves
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_style_moves() {
        let z6 = FiniteGroup::parse("cyc:6").unwrap();
        let t = Tuple(vec![2, 3]);
        assert_eq!(apply(&z6, NielsenMove::RightMulInv(1, 0), &t).unwrap(), Tuple(vec![2, 1]));
        assert_eq!(apply(&z6, NielsenMove::Swap(1, 1), &t).unwrap(), t);

        let s3 = FiniteGroup::parse("sym:3").unwrap();
        let a = s3.parse_element("(1 2)").unwrap();
        let b = s3.parse_element("(1 3)").unwrap();
        let out = apply(&s3, NielsenMove::RightMul(0, 1), &Tuple(vec![a, b])).unwrap();
        assert_eq!(s3.name(out.0[0]), "(1 3 2)");
        assert_eq!(out.0[1], b);
    }

    #[test]
    fn moves_are_inverted_by_their_inverse() {
        let g = FiniteGroup::parse("sym:4").unwrap();
        let t = Tuple(vec![5, 17, 9]);
        for m in generator_moves(3) {
            let there = apply(&g, m, &t).unwrap();
            assert_eq!(apply(&g, m.inverse(), &there).unwrap(), t, "{m}");
        }
    }

    #[test]
    fn out_of_range_moves_are_rejected() {
        let g = FiniteGroup::parse("cyc:6").unwrap();
        let t = Tuple(vec![1, 2]);
        assert!(apply(&g, NielsenMove::Invert(2), &t).is_err());
        assert!(apply(&g, NielsenMove::RightMul(1, 1), &t).is_err());
    }

    #[test]
    fn witness_json_layout() {
        let seq = MoveSeq(vec![
            NielsenMove::Swap(0, 1),
            NielsenMove::Invert(2),
            NielsenMove::RightMul(0, 1),
            NielsenMove::RightMulInv(1, 0),
        ]);
        let json = serde_json::to_string(&seq).unwrap();
        assert_eq!(
            json,
            r#"[{"op":"swap","i":1,"j":2},{"op":"invert","i":3},{"op":"rmul","i":1,"j":2,"inv":false},{"op":"rmul","i":2,"j":1,"inv":true}]"#
        );
        assert_eq!(serde_json::from_str::<MoveSeq>(&json).unwrap(), seq);
        assert!(serde_json::from_str::<MoveSeq>(r#"[{"op":"invert","i":0}]"#).is_err());
    }

    #[test]
    fn tuple_parsing_accepts_names() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let t = Tuple::parse(&g, "(1 2),(1 2 3),0").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.0[2], 0);
        assert!(Tuple::parse(&g, "7").is_err());
    }
}
