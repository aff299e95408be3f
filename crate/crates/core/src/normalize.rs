//! Constructive normal forms with replayable move sequences.
//!
//! Every construction here is a sequence of Nielsen moves built from one
//! primitive: if `h` lies in the span of the entries other than `g_i`, a
//! word for `h` in those entries turns `g_i` into `g_i h^{±1}` (or
//! `h^{±1} g_i`). Words come from breadth-first closures, possibly taken
//! modulo a normal subgroup.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{closure, is_normal, quotient, Element, FiniteGroup, GroupError, Letter, Projection, Subgroup, Word};
use crate::invariants::{d_tilde, ic_search, is_abelian_subgroup, subgroup_rank, IcKind, InvariantError, DEFAULT_SEARCH_BUDGET};
use crate::lattice::{enumerate, LatticeError, SubgroupLattice, DEFAULT_BUDGET, DEFAULT_MAX_ORDER};
use crate::nielsen::{bring_to_front, MoveSeq, NielsenError, NielsenMove, Tuple};

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("bound {bound} violated: need n >= {needed}, got n = {n}")]
    Bound { bound: String, needed: usize, n: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Nielsen(#[from] NielsenError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Invariants(#[from] InvariantError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Which side a word multiplies an entry on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

/// A source tuple, the normal form it was moved to, and the moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub source: Tuple,
    pub target: Tuple,
    pub witness: MoveSeq,
}

impl CanonicalForm {
    /// Replays the witness with image checks and compares the endpoint.
    pub fn verify(&self, g: &FiniteGroup) -> Result<(), NielsenError> {
        let end = self.witness.replay_checked(g, &self.source)?;
        if end != self.target {
            return Err(NielsenError::BadWitness(format!("witness ends at {end}, not at {}", self.target)));
        }
        Ok(())
    }
}

/// A working tuple that records every move applied to it.
struct Work<'a> {
    g: &'a FiniteGroup,
    t: Vec<Element>,
    seq: MoveSeq,
}

impl<'a> Work<'a> {
    fn new(g: &'a FiniteGroup, t: &Tuple) -> Self {
        Self { g, t: t.0.clone(), seq: MoveSeq::new() }
    }

    fn apply(&mut self, m: NielsenMove) {
        m.apply_in_place(self.g, &mut self.t);
        self.seq.push(m);
    }

    /// `t_i ↦ t_i · w`, letters indexing positions.
    fn right_mul(&mut self, i: usize, w: &Word) {
        for l in w.letters() {
            let m = if l.inverse { NielsenMove::RightMulInv(i, l.index) } else { NielsenMove::RightMul(i, l.index) };
            self.apply(m);
        }
    }

    fn mul_word(&mut self, i: usize, w: &Word, side: Side, inverse: bool) {
        let w = if inverse { w.inverse() } else { w.clone() };
        match side {
            Side::Right => self.right_mul(i, &w),
            Side::Left => {
                // h·t = (t⁻¹·h⁻¹)⁻¹
                self.apply(NielsenMove::Invert(i));
                self.right_mul(i, &w.inverse());
                self.apply(NielsenMove::Invert(i));
            }
        }
    }

    fn values(&self, pos: &[usize]) -> Vec<Element> {
        pos.iter().map(|&p| self.t[p]).collect()
    }

    /// A word in the entries at `pos` whose value has the same key as `x`.
    fn word_for(&self, pos: &[usize], x: Element, key: &dyn Fn(Element) -> Element) -> Option<Word> {
        coset_word(self.g, &self.values(pos), x, key).map(|w| w.reindex(|k| pos[k]))
    }

    /// Sets `t_i` to the identity; `t_i` must lie in the span of `pos`.
    fn clear(&mut self, i: usize, pos: &[usize]) {
        let w = self.word_for(pos, self.g.inv(self.t[i]), &|x| x).expect("entry lies in the span");
        self.right_mul(i, &w);
    }

    fn arrange(&mut self, front: &[usize]) {
        for &m in bring_to_front(self.t.len(), front).moves() {
            self.apply(m);
        }
    }

    fn tuple(&self) -> Tuple {
        Tuple(self.t.clone())
    }
}

/// Breadth-first search for a word in `gens` (letters ordered as in
/// [`closure`]) whose value `v` satisfies `key(v) == key(target)`. `key`
/// must be a homomorphism onto its image, e.g. a quotient projection.
fn coset_word(g: &FiniteGroup, gens: &[Element], target: Element, key: &dyn Fn(Element) -> Element) -> Option<Word> {
    let goal = key(target);
    let start = key(0);
    if goal == start {
        return Some(Word::empty());
    }
    let letters: Vec<(Letter, Element)> = (0..gens.len())
        .map(|i| (Letter::new(i, false), gens[i]))
        .chain((0..gens.len()).map(|i| (Letter::new(i, true), g.inv(gens[i]))))
        .collect();
    let mut parent: HashMap<Element, (Element, Letter)> = HashMap::new();
    parent.insert(start, (start, Letter::new(0, false)));
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        let kx = key(x);
        for &(l, v) in &letters {
            let y = g.mul(x, v);
            let ky = key(y);
            if parent.contains_key(&ky) {
                continue;
            }
            parent.insert(ky, (kx, l));
            if ky == goal {
                let mut out = Vec::new();
                let mut k = ky;
                while k != start {
                    let (p, l) = parent[&k];
                    out.push(l);
                    k = p;
                }
                out.reverse();
                return Some(Word::from(out));
            }
            queue.push_back(y);
        }
    }
    None
}

fn check_entries(g: &FiniteGroup, t: &[Element]) -> Result<(), NormalizeError> {
    for &e in t {
        g.check(e)?;
    }
    Ok(())
}

/// Multiplies entry `i` by the value `h` of `word` (letters index the other
/// entries): `t_i ↦ t_i h^{±1}` on the right or `h^{±1} t_i` on the left.
pub fn compress_step(
    g: &FiniteGroup,
    t: &Tuple,
    i: usize,
    word: &Word,
    side: Side,
    inverse: bool,
) -> Result<(Tuple, MoveSeq), NormalizeError> {
    let n = t.len();
    check_entries(g, &t.0)?;
    if i >= n {
        return Err(NormalizeError::Precondition(format!("entry {} out of range for n = {n}", i + 1)));
    }
    for l in word.letters() {
        if l.index == i {
            return Err(NormalizeError::Precondition(format!("word references the target entry {}", i + 1)));
        }
        if l.index >= n {
            return Err(NormalizeError::Precondition(format!("word references entry {} of {n}", l.index + 1)));
        }
    }
    let mut w = Work::new(g, t);
    w.mul_word(i, word, side, inverse);
    Ok((w.tuple(), w.seq))
}

/// Moves a generating tuple of `G` to `(targets, 1, …, 1)`.
///
/// Redundant entries are cleared lowest index first until the nonidentity
/// entries are incompressible (at most `ic(G)` of them). The targets are
/// then written into free slots, the old prefix is erased, and the targets
/// are swapped to the front. Needs `n` at least the prefix size plus
/// `targets.len()`, which `n ≥ ic(G) + d(G)` guarantees for a rank-sized
/// target list.
pub fn canonicalize_epi(g: &FiniteGroup, t: &Tuple, targets: &[Element]) -> Result<CanonicalForm, NormalizeError> {
    let n = t.len();
    check_entries(g, &t.0)?;
    check_entries(g, targets)?;
    if closure(g, &t.0, false).order() != g.order() {
        return Err(NormalizeError::Precondition("tuple does not generate the group".into()));
    }
    if closure(g, targets, false).order() != g.order() {
        return Err(NormalizeError::Precondition("targets do not generate the group".into()));
    }
    let d = targets.len();
    let mut target = targets.to_vec();
    target.resize(n.max(d), 0);
    if n >= d && t.0 == target {
        return Ok(CanonicalForm { source: t.clone(), target: t.clone(), witness: MoveSeq::new() });
    }

    let mut w = Work::new(g, t);
    let mut active: Vec<usize> = (0..n).filter(|&i| w.t[i] != 0).collect();
    while let Some(a) = (0..active.len()).find(|&a| {
        let others: Vec<Element> = active.iter().filter(|&&j| j != active[a]).map(|&j| w.t[j]).collect();
        closure(g, &others, false).contains(w.t[active[a]])
    }) {
        let i = active.remove(a);
        w.clear(i, &active);
    }
    let m = active.len();
    if n < m + d {
        return Err(NormalizeError::Bound {
            bound: format!("ic(G) + d: incompressible prefix of size {m} plus {d} targets"),
            needed: m + d,
            n,
        });
    }
    w.arrange(&active);
    let prefix: Vec<usize> = (0..m).collect();
    let slots: Vec<usize> = (m..m + d).collect();
    for (k, &x) in targets.iter().enumerate() {
        let word = w.word_for(&prefix, x, &|y| y).expect("prefix generates the group");
        w.right_mul(m + k, &word);
    }
    for p in 0..m {
        w.clear(p, &slots);
    }
    w.arrange(&slots);
    debug_assert_eq!(w.t, target);
    Ok(CanonicalForm { source: t.clone(), target: w.tuple(), witness: w.seq })
}

fn smallest_prime_factor(n: usize) -> usize {
    (2..).find(|p| n % p == 0 || p * p > n).map_or(n, |p| if n % p == 0 { p } else { n })
}

/// A composition series `1 = G_0 < G_1 < … < G_ℓ = A` of an abelian
/// subgroup with prime indices, returned as `(G_k, x_k)` where
/// `G_{k+1} = ⟨G_k, x_k⟩`. Each `x_k` is the smallest element outside `G_k`
/// whose `p`-th power falls in `G_k`, `p` the smallest prime dividing
/// `[A : G_k]`. For `k = 0` this picks the first prime-order subgroup in
/// lattice order.
fn prime_chain(g: &FiniteGroup, a: &Subgroup) -> Vec<(Subgroup, Element)> {
    let mut levels = Vec::new();
    let mut gk = Subgroup::trivial(g);
    while gk.order() < a.order() {
        let p = smallest_prime_factor(a.order() / gk.order());
        let x = a
            .members()
            .iter()
            .copied()
            .find(|&x| !gk.contains(x) && gk.contains(g.pow(x, p as i64)))
            .expect("abelian quotient has an element of each prime order");
        let next = gk.join(g, &[x]);
        levels.push((gk, x));
        gk = next;
    }
    levels
}

/// Dunwoody's induction on the entries at `slots`, which must span an
/// abelian group also spanned by `targets`, with `slots.len() > targets.len()`.
fn dunwoody_block(w: &mut Work<'_>, slots: &[usize], targets: &[Element]) {
    let g = w.g;
    let a = closure(g, &w.values(slots), false);
    for (gk, x) in prime_chain(g, &a).iter().rev() {
        let key = |y: Element| gk.members().iter().map(|&z| g.mul(y, z)).min().expect("nonempty");
        dunwoody_level(w, slots, targets, &key, *x);
    }
    debug_assert!(slots.iter().enumerate().all(|(k, &s)| w.t[s] == targets.get(k).copied().unwrap_or(0)));
}

/// One step of the induction, modulo `G_k` (cosets named by `key`). On
/// entry the slots agree with `(targets, 1, …, 1)` modulo `G_{k+1}`; on
/// exit they agree modulo `G_k`. `x` generates `G_{k+1}` over `G_k`.
fn dunwoody_level(w: &mut Work<'_>, slots: &[usize], targets: &[Element], key: &dyn Fn(Element) -> Element, x: Element) {
    let g = w.g;
    let d = targets.len();
    let (head, tail) = slots.split_at(d);
    let one = key(0);
    let settled = slots
        .iter()
        .enumerate()
        .all(|(k, &s)| key(w.t[s]) == key(targets.get(k).copied().unwrap_or(0)));
    if settled {
        return;
    }
    let j = match tail.iter().copied().find(|&s| key(w.t[s]) != one) {
        Some(j) => j,
        None => {
            // the head generates modulo G_k: plant a nontrivial element of G_{k+1}
            let j = tail[0];
            let word = w.word_for(head, x, key).expect("head generates modulo the level");
            w.right_mul(j, &word);
            j
        }
    };
    let mut powers = vec![one];
    let mut y = w.t[j];
    while key(y) != one {
        powers.push(key(y));
        y = g.mul(y, w.t[j]);
    }
    for (k, &s) in slots.iter().enumerate() {
        if s == j {
            continue;
        }
        let discrepancy = if k < d { g.mul(w.t[s], g.inv(targets[k])) } else { w.t[s] };
        let e = powers
            .iter()
            .position(|&p| p == key(discrepancy))
            .expect("discrepancy lies in the level subgroup");
        // t_s · t_j^{-e}, or t_s · t_j^{p-e} when shorter
        if 2 * e <= powers.len() {
            (0..e).for_each(|_| w.apply(NielsenMove::RightMulInv(s, j)));
        } else {
            (e..powers.len()).for_each(|_| w.apply(NielsenMove::RightMul(s, j)));
        }
    }
    let word = w.word_for(head, g.inv(w.t[j]), key).expect("head generates modulo the level");
    w.right_mul(j, &word);
}

/// Moves a tuple spanning an abelian subgroup `A` to `(targets, 1, …, 1)`
/// by Dunwoody's induction along a prime-index chain of `A`. Needs
/// `n > targets.len()`; for `n = d(A)` transitivity can fail.
pub fn dunwoody_abelian(g: &FiniteGroup, t: &Tuple, targets: &[Element]) -> Result<CanonicalForm, NormalizeError> {
    let n = t.len();
    check_entries(g, &t.0)?;
    check_entries(g, targets)?;
    let a = closure(g, &t.0, false);
    if !is_abelian_subgroup(g, &a) {
        return Err(NormalizeError::Precondition("tuple spans a nonabelian subgroup".into()));
    }
    if closure(g, targets, false) != a {
        return Err(NormalizeError::Precondition("targets do not span the same subgroup as the tuple".into()));
    }
    let d = targets.len();
    if n <= d {
        return Err(NormalizeError::Bound { bound: "d(A) + 1".into(), needed: d + 1, n });
    }
    let mut w = Work::new(g, t);
    let slots: Vec<usize> = (0..n).collect();
    dunwoody_block(&mut w, &slots, targets);
    Ok(CanonicalForm { source: t.clone(), target: w.tuple(), witness: w.seq })
}

/// An extension `A → G → Q` with `A` normal and abelian, together with the
/// invariants the bounds need.
#[derive(Debug, Clone)]
pub struct ExactSequenceData {
    pub kernel: Subgroup,
    pub quotient: FiniteGroup,
    pub projection: Projection,
    pub d_a: u32,
    pub ic_tilde_q: u32,
    pub d_tilde_q: u32,
}

/// Serializable summary of [`ExactSequenceData`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactSequenceSummary {
    pub kernel: Vec<Element>,
    pub kernel_order: usize,
    pub quotient_order: usize,
    pub d_a: u32,
    pub ic_tilde_q: u32,
    pub d_tilde_q: u32,
    pub redundancy_bound: usize,
    pub jordan_bound: usize,
}

impl ExactSequenceData {
    pub fn new(g: &FiniteGroup, a: Subgroup) -> Result<Self, NormalizeError> {
        if !is_normal(g, &a) {
            return Err(NormalizeError::Precondition("kernel is not normal".into()));
        }
        if !is_abelian_subgroup(g, &a) {
            return Err(NormalizeError::Precondition("kernel is not abelian".into()));
        }
        let (q, projection) = quotient(g, &a)?;
        if !projection.verify(g, &q) || projection.kernel() != a.members() {
            return Err(NormalizeError::Precondition("projection is not a homomorphism with kernel A".into()));
        }
        let d_a = subgroup_rank(g, &a).0;
        let lq = enumerate(&q, DEFAULT_MAX_ORDER, DEFAULT_BUDGET)?;
        let d_tilde_q = d_tilde(&q, &lq).0;
        let ic_tilde_q = ic_search(&q, &lq, IcKind::Any, lq.chain_length(), DEFAULT_SEARCH_BUDGET)?.value;
        Ok(Self { kernel: a, quotient: q, projection, d_a, ic_tilde_q, d_tilde_q })
    }

    /// Uses the largest normal abelian subgroup (first in lattice order
    /// among equal orders) as the kernel.
    pub fn largest_abelian_kernel(g: &FiniteGroup, lattice: &SubgroupLattice) -> Result<Self, NormalizeError> {
        let best = lattice
            .normal_subgroups()
            .into_iter()
            .filter(|&i| is_abelian_subgroup(g, lattice.get(i)))
            .max_by_key(|&i| (lattice.get(i).order(), std::cmp::Reverse(i)))
            .expect("the trivial subgroup is normal and abelian");
        Self::new(g, lattice.get(best).clone())
    }

    /// `d(A) + ĩc(Q) + 1`.
    pub fn redundancy_bound(&self) -> usize {
        (self.d_a + self.ic_tilde_q + 1) as usize
    }

    /// `1 + d(A) + d̃(Q) + ĩc(Q)`.
    pub fn jordan_bound(&self) -> usize {
        (1 + self.d_a + self.d_tilde_q + self.ic_tilde_q) as usize
    }

    pub fn summary(&self) -> ExactSequenceSummary {
        ExactSequenceSummary {
            kernel: self.kernel.members().to_vec(),
            kernel_order: self.kernel.order(),
            quotient_order: self.quotient.order(),
            d_a: self.d_a,
            ic_tilde_q: self.ic_tilde_q,
            d_tilde_q: self.d_tilde_q,
            redundancy_bound: self.redundancy_bound(),
            jordan_bound: self.jordan_bound(),
        }
    }
}

/// Moves entries into `A` until the rest project to an incompressible
/// generating set of the image in `Q`, then swaps those to the front.
/// Returns how many there are.
fn push_into_kernel(w: &mut Work<'_>, data: &ExactSequenceData) -> usize {
    let g = w.g;
    let q = &data.quotient;
    let proj = |x: Element| data.projection.apply(x);
    let mut active: Vec<usize> = (0..w.t.len()).filter(|&i| proj(w.t[i]) != 0).collect();
    while let Some(a) = (0..active.len()).find(|&a| {
        let others: Vec<Element> = active.iter().filter(|&&j| j != active[a]).map(|&j| proj(w.t[j])).collect();
        closure(q, &others, false).contains(proj(w.t[active[a]]))
    }) {
        let i = active.remove(a);
        let word = w.word_for(&active, g.inv(w.t[i]), &proj).expect("projection lies in the span");
        w.right_mul(i, &word);
    }
    w.arrange(&active);
    active.len()
}

/// A witness that `t` is redundant: its last entry ends at the identity
/// and the image is unchanged. The first entries are moved to project onto
/// an incompressible generating set of the image in `Q`, the others into
/// `A`, and the `A`-block is reduced by [`dunwoody_abelian`]'s induction.
pub fn exseq_redundancy(g: &FiniteGroup, t: &Tuple, data: &ExactSequenceData) -> Result<MoveSeq, NormalizeError> {
    let n = t.len();
    check_entries(g, &t.0)?;
    if n < data.redundancy_bound() {
        return Err(NormalizeError::Bound { bound: "d(A) + ĩc(Q) + 1".into(), needed: data.redundancy_bound(), n });
    }
    let mut w = Work::new(g, t);
    let i = push_into_kernel(&mut w, data);
    let slots: Vec<usize> = (i..n).collect();
    let b = closure(g, &w.values(&slots), false);
    let (_, gens) = subgroup_rank(g, &b);
    dunwoody_block(&mut w, &slots, &gens);
    debug_assert_eq!(w.t[n - 1], 0);
    Ok(w.seq)
}

/// The normal form `(u_1, …, u_e, q_1, …, q_d, 1, …, 1)` of length `n` for
/// image `h`: a minimum generating set of `A ∩ H`, then the smallest lifts
/// in `H` of a minimum generating set of the image of `H` in `Q`.
pub fn jordan_form(g: &FiniteGroup, h: &Subgroup, data: &ExactSequenceData, n: usize) -> Tuple {
    let proj = |x: Element| data.projection.apply(x);
    let a_h: Vec<Element> = h.members().iter().copied().filter(|&x| proj(x) == 0).collect();
    let a_h = Subgroup::from_members(g, a_h).expect("A ∩ H is a subgroup");
    let (_, mut out) = subgroup_rank(g, &a_h);
    let mut q_members: Vec<Element> = h.members().iter().map(|&x| proj(x)).collect();
    q_members.sort_unstable();
    q_members.dedup();
    let q_h = Subgroup::from_members(&data.quotient, q_members).expect("image of H is a subgroup");
    let (_, qs) = subgroup_rank(&data.quotient, &q_h);
    for qbar in qs {
        out.push(h.members().iter().copied().find(|&x| proj(x) == qbar).expect("H maps onto its image"));
    }
    out.resize(n.max(out.len()), 0);
    Tuple(out)
}

/// Moves `t` to [`jordan_form`] of its image, for
/// `n ≥ 1 + d(A) + d̃(Q) + ĩc(Q)`. Two tuples with the same image reach the
/// same endpoint, so the orbits are exactly the sets `Epi(F_n; H)`.
pub fn jordan_canonical(g: &FiniteGroup, t: &Tuple, data: &ExactSequenceData) -> Result<CanonicalForm, NormalizeError> {
    let n = t.len();
    check_entries(g, &t.0)?;
    if n < data.jordan_bound() {
        return Err(NormalizeError::Bound {
            bound: "1 + d(A) + d̃(Q) + ĩc(Q)".into(),
            needed: data.jordan_bound(),
            n,
        });
    }
    let proj = |x: Element| data.projection.apply(x);
    let h = closure(g, &t.0, false);
    let target = jordan_form(g, &h, data, n);
    let a_h: Vec<Element> = h.members().iter().copied().filter(|&x| proj(x) == 0).collect();
    let a_h = Subgroup::from_members(g, a_h).expect("A ∩ H is a subgroup");
    let e = (0..n).take_while(|&k| target.0[k] != 0 && proj(target.0[k]) == 0).count();
    let qs: Vec<Element> = target.0[e..].iter().copied().take_while(|&x| x != 0).collect();
    let d = qs.len();

    let mut w = Work::new(g, t);
    // prefix projecting onto an incompressible generating set, the rest in A
    let i = push_into_kernel(&mut w, data);
    let slots: Vec<usize> = (i..n).collect();
    let b = closure(g, &w.values(&slots), false);
    let (_, b_gens) = subgroup_rank(g, &b);
    dunwoody_block(&mut w, &slots, &b_gens);
    // lifts of generators of the image in Q, into free slots
    let q_start = i + b_gens.len();
    if q_start + d > n {
        return Err(NormalizeError::Bound { bound: "1 + d(A) + d̃(Q) + ĩc(Q)".into(), needed: q_start + d, n });
    }
    let spanning: Vec<usize> = (0..q_start).collect();
    for (k, &x) in qs.iter().enumerate() {
        let word = w.word_for(&spanning, x, &|y| y).expect("prefix spans the image");
        w.right_mul(q_start + k, &word);
    }
    // push the old prefix into A using the lifts
    let q_pos: Vec<usize> = (q_start..q_start + d).collect();
    for p in 0..i {
        let word = w.word_for(&q_pos, g.inv(w.t[p]), &proj).expect("lifts span the image in Q");
        w.right_mul(p, &word);
    }
    // grow the span of the A-block to A ∩ H through a free slot, then reduce
    let a_block: Vec<usize> = (0..n).filter(|p| !q_pos.contains(p)).collect();
    loop {
        let c = closure(g, &w.values(&a_block), false);
        if c == a_h {
            break;
        }
        let (_, c_gens) = subgroup_rank(g, &c);
        dunwoody_block(&mut w, &a_block, &c_gens);
        let free = a_block[c_gens.len()];
        let missing = a_h.members().iter().copied().find(|&x| !c.contains(x)).expect("A-block spans less");
        let others: Vec<usize> = (0..n).filter(|&p| p != free).collect();
        let word = w.word_for(&others, missing, &|y| y).expect("the tuple spans H");
        w.right_mul(free, &word);
    }
    dunwoody_block(&mut w, &a_block, &target.0[..e]);
    let mut front = a_block[..e].to_vec();
    front.extend_from_slice(&q_pos);
    w.arrange(&front);
    debug_assert_eq!(w.t, target.0);
    Ok(CanonicalForm { source: t.clone(), target: w.tuple(), witness: w.seq })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(letters: &[(usize, bool)]) -> Word {
        Word::from(letters.iter().map(|&(i, inv)| Letter::new(i, inv)).collect::<Vec<_>>())
    }

    #[test]
    fn compress_step_in_z6() {
        let g = FiniteGroup::parse("cyc:6").unwrap();
        let t = Tuple(vec![2, 3]);
        let (out, seq) = compress_step(&g, &t, 1, &word(&[(0, false)]), Side::Right, true).unwrap();
        assert_eq!(out, Tuple(vec![2, 1]));
        assert_eq!(seq.replay_checked(&g, &t).unwrap(), out);
        let (out, seq) = compress_step(&g, &t, 1, &Word::empty(), Side::Right, false).unwrap();
        assert_eq!((out, seq.len()), (t, 0));
    }

    #[test]
    fn compress_step_on_the_left() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let t = Tuple::parse(&g, "(1 2),(1 2 3),(1 3)").unwrap();
        let h = g.mul(t.0[0], t.0[1]);
        let (out, seq) = compress_step(&g, &t, 2, &word(&[(0, false), (1, false)]), Side::Left, false).unwrap();
        assert_eq!(out.0[2], g.mul(h, t.0[2]));
        assert_eq!(seq.replay(&g, &t).unwrap(), out);
        let (out, _) = compress_step(&g, &t, 2, &word(&[(0, false), (1, false)]), Side::Left, true).unwrap();
        assert_eq!(out.0[2], g.mul(g.inv(h), t.0[2]));
    }

    #[test]
    fn compress_step_rejects_self_reference() {
        let g = FiniteGroup::parse("cyc:6").unwrap();
        let r = compress_step(&g, &Tuple(vec![2, 3]), 1, &word(&[(1, false)]), Side::Right, false);
        assert!(matches!(r, Err(NormalizeError::Precondition(_))));
    }

    #[test]
    fn clearing_an_entry_in_its_span() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let t = Tuple::parse(&g, "(1 2),(1 2 3),(1 3)").unwrap();
        let h = closure(&g, &t.0[..2], true);
        let w = h.witness(g.inv(t.0[2])).unwrap();
        let (out, seq) = compress_step(&g, &t, 2, &w, Side::Right, false).unwrap();
        assert_eq!(out.0[2], 0);
        assert_eq!(seq.replay_checked(&g, &t).unwrap(), out);
    }

    #[test]
    fn canonicalize_small_cases() {
        let g = FiniteGroup::parse("cyc:6").unwrap();
        let cf = canonicalize_epi(&g, &Tuple(vec![2, 3, 0]), &[1]).unwrap();
        assert_eq!(cf.target, Tuple(vec![1, 0, 0]));
        cf.verify(&g).unwrap();
        let cf = canonicalize_epi(&g, &Tuple(vec![1, 0, 0]), &[1]).unwrap();
        assert!(cf.witness.is_empty());
        assert!(matches!(canonicalize_epi(&g, &Tuple(vec![2, 3]), &[1]), Err(NormalizeError::Bound { .. })));
        assert!(canonicalize_epi(&g, &Tuple(vec![2, 2, 0]), &[1]).is_err());
    }

    #[test]
    fn dunwoody_examples() {
        let g = FiniteGroup::parse("ab:3,3").unwrap();
        let e1 = g.abelian_element(&[1, 0]).unwrap();
        let e2 = g.abelian_element(&[0, 1]).unwrap();
        let t = Tuple(vec![e1, e2, g.abelian_element(&[1, 1]).unwrap()]);
        let cf = dunwoody_abelian(&g, &t, &[e1, e2]).unwrap();
        assert_eq!(cf.target, Tuple(vec![e1, e2, 0]));
        cf.verify(&g).unwrap();

        let z6 = FiniteGroup::parse("cyc:6").unwrap();
        let cf = dunwoody_abelian(&z6, &Tuple(vec![2, 3]), &[1]).unwrap();
        assert_eq!(cf.target, Tuple(vec![1, 0]));
        cf.verify(&z6).unwrap();
        let cf = dunwoody_abelian(&z6, &Tuple(vec![1, 0]), &[1]).unwrap();
        assert!(cf.witness.is_empty());

        assert!(matches!(dunwoody_abelian(&g, &Tuple(vec![e1, e2]), &[e1, e2]), Err(NormalizeError::Bound { .. })));
    }

    #[test]
    fn prime_chain_starts_at_first_prime_order_subgroup() {
        let g = FiniteGroup::parse("cyc:12").unwrap();
        let chain = prime_chain(&g, &Subgroup::full(&g));
        assert_eq!(chain.len(), 3);
        assert_eq!(chain[0].1, 6);
        let orders: Vec<usize> = chain.iter().map(|(h, _)| h.order()).collect();
        assert_eq!(orders, vec![1, 2, 4]);
    }

    #[test]
    fn exact_sequence_of_s3() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let l = enumerate(&g, DEFAULT_MAX_ORDER, DEFAULT_BUDGET).unwrap();
        let data = ExactSequenceData::largest_abelian_kernel(&g, &l).unwrap();
        assert_eq!((data.kernel.order(), data.d_a, data.ic_tilde_q, data.d_tilde_q), (3, 1, 1, 1));
        assert_eq!((data.redundancy_bound(), data.jordan_bound()), (3, 4));
        let not_normal = closure(&g, &[g.parse_element("(1 2)").unwrap()], false);
        assert!(ExactSequenceData::new(&g, not_normal).is_err());
    }

    #[test]
    fn trivial_tuple_has_trivial_witnesses() {
        let g = FiniteGroup::parse("sym:3").unwrap();
        let l = enumerate(&g, DEFAULT_MAX_ORDER, DEFAULT_BUDGET).unwrap();
        let data = ExactSequenceData::largest_abelian_kernel(&g, &l).unwrap();
        assert!(exseq_redundancy(&g, &Tuple::identity(3), &data).unwrap().is_empty());
        let cf = jordan_canonical(&g, &Tuple::identity(5), &data).unwrap();
        assert_eq!(cf.target, Tuple::identity(5));
        assert!(cf.witness.is_empty());
    }
}
