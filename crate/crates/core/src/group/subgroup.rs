use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Element, ElementSet, FiniteGroup, GroupError};

/// One generator occurrence in a word: `gens[index]` or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub index: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(index: usize, inverse: bool) -> Self {
        Self { index, inverse }
    }

    pub fn inverted(self) -> Self {
        Self { index: self.index, inverse: !self.inverse }
    }

    fn eval(self, g: &FiniteGroup, gens: &[Element]) -> Element {
        let x = gens[self.index];
        if self.inverse {
            g.inv(x)
        } else {
            x
        }
    }
}

/// A word in a generating list, read left to right.
///
/// Serialized as signed 1-based generator indices (`-2` is the inverse of
/// the second generator).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Appends `l`, cancelling it against a trailing inverse letter.
    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inverted()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &l in &other.0 {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverted()).collect())
    }

    pub fn eval(&self, g: &FiniteGroup, gens: &[Element]) -> Element {
        self.0.iter().fold(g.identity(), |acc, &l| g.mul(acc, l.eval(g, gens)))
    }

    /// Rewrites generator indices through `f`.
    pub fn reindex(&self, f: impl Fn(usize) -> usize) -> Word {
        Word(self.0.iter().map(|l| Letter::new(f(l.index), l.inverse)).collect())
    }

    pub fn to_signed(&self) -> Vec<i64> {
        self.0
            .iter()
            .map(|l| {
                let i = l.index as i64 + 1;
                if l.inverse {
                    -i
                } else {
                    i
                }
            })
            .collect()
    }

    pub fn from_signed(xs: &[i64]) -> Option<Word> {
        let mut w = Word::empty();
        for &x in xs {
            if x == 0 {
                return None;
            }
            w.push(Letter::new(x.unsigned_abs() as usize - 1, x < 0));
        }
        Some(w)
    }

    /// Renders the word with generator names, e.g. `3·2⁻¹`.
    pub fn render(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| {
                let n = &names[l.index];
                if l.inverse {
                    format!("{n}⁻¹")
                } else {
                    n.clone()
                }
            })
            .collect();
        parts.join("·")
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        let mut w = Word::empty();
        for l in v {
            w.push(l);
        }
        w
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.to_signed().iter().map(i64::to_string).collect();
        write!(f, "[{}]", s.join(","))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_signed().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let xs = Vec::<i64>::deserialize(d)?;
        Word::from_signed(&xs).ok_or_else(|| serde::de::Error::custom("generator index 0 in word"))
    }
}

/// A subgroup of some [`FiniteGroup`], stored as a sorted member list plus a
/// bitset.
#[derive(Debug, Clone)]
pub struct Subgroup {
    members: Vec<Element>,
    set: ElementSet,
    generators: Vec<Element>,
    /// BFS tree: member ↦ (parent, letter) with `member = parent · letter`.
    tree: Option<HashMap<Element, (Element, Letter)>>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    pub fn trivial(g: &FiniteGroup) -> Self {
        let mut set = ElementSet::new(g.order());
        set.insert(0);
        Self { members: vec![0], set, generators: Vec::new(), tree: None }
    }

    pub fn full(g: &FiniteGroup) -> Self {
        let members: Vec<Element> = g.elements().collect();
        let mut set = ElementSet::new(g.order());
        for &e in &members {
            set.insert(e);
        }
        Self { members, set, generators: Vec::new(), tree: None }
    }

    /// Wraps a member list after checking it is a subgroup.
    pub fn from_members(g: &FiniteGroup, mut members: Vec<Element>) -> Result<Self, GroupError> {
        members.sort_unstable();
        members.dedup();
        let mut set = ElementSet::new(g.order());
        for &e in &members {
            g.check(e)?;
            set.insert(e);
        }
        if !set.contains(0) {
            return Err(GroupError::Unsupported("member set lacks the identity".into()));
        }
        for &a in &members {
            if !set.contains(g.inv(a)) || members.iter().any(|&b| !set.contains(g.mul(a, b))) {
                return Err(GroupError::Unsupported("member set is not closed".into()));
            }
        }
        Ok(Self { members, set, generators: Vec::new(), tree: None })
    }

    pub(crate) fn from_set_unchecked(set: ElementSet, generators: Vec<Element>) -> Self {
        let members = set.iter().collect();
        Self { members, set, generators, tree: None }
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[Element] {
        &self.members
    }

    pub fn set(&self) -> &ElementSet {
        &self.set
    }

    pub fn contains(&self, e: Element) -> bool {
        self.set.contains(e)
    }

    /// Generators this subgroup was built from (may be empty for subgroups
    /// given by members).
    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.set.is_subset(&other.set)
    }

    pub fn has_witnesses(&self) -> bool {
        self.tree.is_some()
    }

    /// A word in [`Self::generators`] evaluating to `e`, if witnesses were
    /// recorded and `e` is a member.
    pub fn witness(&self, e: Element) -> Option<Word> {
        let tree = self.tree.as_ref()?;
        if !self.set.contains(e) {
            return None;
        }
        let mut letters = Vec::new();
        let mut x = e;
        while x != 0 {
            let (parent, l) = tree[&x];
            letters.push(l);
            x = parent;
        }
        letters.reverse();
        Some(Word::from(letters))
    }

    /// `⟨self ∪ extra⟩`, by adding right cosets `H·y` of the current
    /// subgroup.
    pub fn join(&self, g: &FiniteGroup, extra: &[Element]) -> Subgroup {
        if extra.iter().all(|&x| self.set.contains(x)) {
            return Subgroup { tree: None, ..self.clone() };
        }
        let mut gens = self.generators.clone();
        if gens.is_empty() && self.order() > 1 {
            gens = self.members.clone();
        }
        gens.extend_from_slice(extra);
        let mut set = self.set.clone();
        let mut reps = vec![0];
        let mut i = 0;
        while i < reps.len() {
            let r = reps[i];
            i += 1;
            for &s in &gens {
                let y = g.mul(r, s);
                if set.contains(y) {
                    continue;
                }
                for &h in &self.members {
                    set.insert(g.mul(h, y));
                }
                reps.push(y);
            }
        }
        let mut generators = self.generators.clone();
        generators.extend(extra.iter().copied().filter(|&x| x != 0));
        Subgroup::from_set_unchecked(set, generators)
    }

    /// Whether `⟨self ∪ extra⟩` contains `target`, stopping as soon as it
    /// appears.
    pub fn join_reaches(&self, g: &FiniteGroup, extra: &[Element], target: Element) -> bool {
        if self.set.contains(target) {
            return true;
        }
        let mut gens = self.generators.clone();
        if gens.is_empty() && self.order() > 1 {
            gens = self.members.clone();
        }
        gens.extend_from_slice(extra);
        let mut set = self.set.clone();
        let mut reps = vec![0];
        let mut i = 0;
        while i < reps.len() {
            let r = reps[i];
            i += 1;
            for &s in &gens {
                let y = g.mul(r, s);
                if set.contains(y) {
                    continue;
                }
                for &h in &self.members {
                    let z = g.mul(h, y);
                    if z == target {
                        return true;
                    }
                    set.insert(z);
                }
                reps.push(y);
            }
        }
        false
    }

    /// `x H x⁻¹`.
    pub fn conjugate_by(&self, g: &FiniteGroup, x: Element) -> Subgroup {
        let mut set = ElementSet::new(g.order());
        for &h in &self.members {
            set.insert(g.conjugate(h, x));
        }
        let generators = self.generators.iter().map(|&h| g.conjugate(h, x)).collect();
        Subgroup::from_set_unchecked(set, generators)
    }
}

/// The subgroup generated by `gens`.
///
/// With `with_witnesses`, the closure is a breadth-first search from the
/// identity by right multiplication with the generators and then their
/// inverses, and every member records a word in `gens`.
pub fn closure(g: &FiniteGroup, gens: &[Element], with_witnesses: bool) -> Subgroup {
    if !with_witnesses {
        let mut h = Subgroup::trivial(g);
        for &x in gens {
            h = h.join(g, &[x]);
        }
        h.generators = gens.to_vec();
        return h;
    }
    let letters: Vec<Letter> = (0..gens.len())
        .map(|i| Letter::new(i, false))
        .chain((0..gens.len()).map(|i| Letter::new(i, true)))
        .collect();
    let mut set = ElementSet::new(g.order());
    set.insert(0);
    let mut tree = HashMap::new();
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for &l in &letters {
            let y = g.mul(x, l.eval(g, gens));
            if set.insert(y) {
                tree.insert(y, (x, l));
                queue.push_back(y);
            }
        }
    }
    let mut h = Subgroup::from_set_unchecked(set, gens.to_vec());
    h.tree = Some(tree);
    h
}

/// A generating set of `g` chosen greedily in id order: each element not
/// yet generated is added.
pub fn greedy_generators(g: &FiniteGroup) -> Vec<Element> {
    let mut h = Subgroup::trivial(g);
    let mut gens = Vec::new();
    for x in g.elements() {
        if h.order() == g.order() {
            break;
        }
        if !h.contains(x) {
            h = h.join(g, &[x]);
            gens.push(x);
        }
    }
    gens
}

/// Whether `h` is normal in `g`.
pub fn is_normal(g: &FiniteGroup, h: &Subgroup) -> bool {
    let test: &[Element] = if h.generators().is_empty() { h.members() } else { h.generators() };
    g.elements().all(|x| test.iter().all(|&y| h.contains(g.conjugate(y, x))))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closure by repeated multiplication of the whole set with itself.
    fn naive_closure(g: &FiniteGroup, gens: &[Element]) -> Vec<Element> {
        let mut s: Vec<Element> = vec![0];
        s.extend_from_slice(gens);
        s.sort_unstable();
        s.dedup();
        loop {
            let mut next = s.clone();
            for &a in &s {
                for &b in &s {
                    next.push(g.mul(a, b));
                }
            }
            next.sort_unstable();
            next.dedup();
            if next == s {
                return s;
            }
            s = next;
        }
    }

    #[test]
    fn s3_generated_by_transposition_and_three_cycle() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let t = g.parse_element("(1 2)").unwrap();
        let c = g.parse_element("(1 2 3)").unwrap();
        let h = closure(&g, &[t, c], true);
        assert_eq!(h.order(), 6);
        for &e in h.members() {
            assert_eq!(h.witness(e).unwrap().eval(&g, &[t, c]), e);
        }
    }

    #[test]
    fn empty_generators_give_trivial_subgroup() {
        let g = FiniteGroup::parse("sym:4").unwrap();
        assert_eq!(closure(&g, &[], false).members(), &[0]);
        assert_eq!(closure(&g, &[], true).members(), &[0]);
    }

    #[test]
    fn cyclic_six_witness_for_one() {
        let g = FiniteGroup::parse("cyc:6").unwrap();
        let h = closure(&g, &[2, 3], true);
        assert_eq!(h.order(), 6);
        let w = h.witness(1).unwrap();
        assert_eq!(w.render(&["2".into(), "3".into()]), "3·2⁻¹");
    }

    #[test]
    fn closure_matches_naive_and_is_idempotent() {
        for spec in ["sym:4", "gl:2,3", "lamp:3,2", "ab:2,2,3"] {
            let g = FiniteGroup::parse(spec).unwrap();
            for a in (0..g.order() as Element).step_by(5) {
                for b in (0..g.order() as Element).step_by(7) {
                    let h = closure(&g, &[a, b], false);
                    assert_eq!(h.members(), naive_closure(&g, &[a, b]).as_slice(), "{spec} {a} {b}");
                    let again = closure(&g, h.members(), false);
                    assert_eq!(again.members(), h.members());
                }
            }
        }
    }

    #[test]
    fn join_reaches_agrees_with_join() {
        let g = FiniteGroup::parse("sym:4").unwrap();
        let h = closure(&g, &[3], false);
        for x in g.elements() {
            let j = h.join(&g, &[x]);
            for t in g.elements() {
                assert_eq!(h.join_reaches(&g, &[x], t), j.contains(t));
            }
        }
    }

    #[test]
    fn words_cancel_and_round_trip() {
        let mut w = Word::empty();
        w.push(Letter::new(0, false));
        w.push(Letter::new(1, true));
        w.push(Letter::new(1, false));
        assert_eq!(w.to_signed(), vec![1]);
        let w = Word::from_signed(&[2, -1, 3]).unwrap();
        assert_eq!(w.inverse().to_signed(), vec![-3, 1, -2]);
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(json, "[2,-1,3]");
        assert_eq!(serde_json::from_str::<Word>(&json).unwrap(), w);
    }
}
