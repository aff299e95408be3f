//! Finite groups with dense element ids.
//!
//! Every group enumerates its elements as `0..order` with `0` the identity.
//! Groups of order at most [`TABLE_LIMIT`] carry a full Cayley table; larger
//! ones multiply through their structured representation.

mod field;
mod quotient;
mod set;
mod spec;
mod subgroup;

pub mod catalog;

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use field::{prime_power, FiniteField};
pub use quotient::{quotient, Projection};
pub use set::ElementSet;
pub use spec::{CayleySource, CayleyTable, GroupSpec};
pub use subgroup::{closure, greedy_generators, is_normal, Letter, Subgroup, Word};

/// Element identifier, valid only within its owning [`FiniteGroup`].
pub type Element = u32;

/// Largest order for which a full Cayley table is precomputed.
pub const TABLE_LIMIT: usize = 4096;

/// Hard ceiling on constructed group orders.
pub const MAX_ORDER: usize = 1 << 22;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("cannot parse group spec `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },
    #[error("malformed Cayley table: {0}")]
    MalformedTable(String),
    #[error("group order {order} exceeds the limit {limit}")]
    TooLarge { order: u128, limit: usize },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("element {element} is not in a group of order {order}")]
    NotAnElement { element: u64, order: usize },
    #[error("cannot read Cayley table: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse Cayley table: {0}")]
    Json(#[from] serde_json::Error),
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> GroupError {
    GroupError::InvalidParameter { field: field.into(), reason: reason.into() }
}

#[derive(Debug, Clone)]
struct MatrixFamily {
    r: usize,
    field: FiniteField,
    special: bool,
    /// Row-major entries of every element, `r*r` per element.
    entries: Vec<u32>,
    index: HashMap<u64, Element>,
}

impl MatrixFamily {
    fn entries(&self, e: Element) -> &[u32] {
        let rr = self.r * self.r;
        &self.entries[e as usize * rr..(e as usize + 1) * rr]
    }

    fn key(&self, m: &[u32]) -> u64 {
        let q = self.field.order() as u64;
        m.iter().rev().fold(0, |acc, &x| acc * q + x as u64)
    }

    fn lookup(&self, m: &[u32]) -> Option<Element> {
        self.index.get(&self.key(m)).copied()
    }
}

#[derive(Debug, Clone)]
enum Family {
    Symmetric { n: usize },
    /// Covers `cyc:N` (one modulus) and `ab:...`.
    Abelian { moduli: Vec<u32> },
    Matrix(Box<MatrixFamily>),
    Lamplighter { r: u32, q: u32 },
    Product { factors: Vec<FiniteGroup> },
    Table,
}

/// An enumerable finite group. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    spec: GroupSpec,
    order: usize,
    table: Option<Vec<Element>>,
    inverses: Vec<Element>,
    orders: Vec<u32>,
    names: Option<Vec<String>>,
    family: Family,
}

impl FiniteGroup {
    /// Builds the group described by `spec`.
    pub fn build(spec: &GroupSpec) -> Result<Self, GroupError> {
        let family = match spec {
            GroupSpec::Symmetric { n } => {
                check_positive("n", *n)?;
                if *n > 10 {
                    return Err(GroupError::TooLarge { order: factorial(*n as u128), limit: MAX_ORDER });
                }
                Family::Symmetric { n: *n as usize }
            }
            GroupSpec::Cyclic { n } => {
                check_positive("N", *n)?;
                Family::Abelian { moduli: vec![*n] }
            }
            GroupSpec::Abelian { moduli } => {
                if moduli.is_empty() {
                    return Err(invalid("d", "at least one cyclic factor is required"));
                }
                for (i, &d) in moduli.iter().enumerate() {
                    check_positive(&format!("d{}", i + 1), d)?;
                }
                Family::Abelian { moduli: moduli.clone() }
            }
            GroupSpec::GeneralLinear { r, q } => matrix_family(*r, *q, false)?,
            GroupSpec::SpecialLinear { r, q } => matrix_family(*r, *q, true)?,
            GroupSpec::Lamplighter { r, q } => {
                check_positive("r", *r)?;
                check_positive("q", *q)?;
                Family::Lamplighter { r: *r, q: *q }
            }
            GroupSpec::DirectProduct(parts) => {
                let factors = parts.iter().map(FiniteGroup::build).collect::<Result<Vec<_>, _>>()?;
                Family::Product { factors }
            }
            GroupSpec::Cayley(source) => {
                let table = match source {
                    CayleySource::Path(path) => {
                        let text = std::fs::read_to_string(path)?;
                        serde_json::from_str::<CayleyTable>(&text)?
                    }
                    CayleySource::Inline { table, .. } => table.clone(),
                };
                return Self::from_cayley(spec.clone(), &table);
            }
        };
        let order = family_order(&family)?;
        Self::finish(spec.clone(), order, family, None, None)
    }

    /// Parses a DSL string and builds the group. Catalog names (`D4`,
    /// `Q8`, `D<n>`) are accepted too.
    pub fn parse(dsl: &str) -> Result<Self, GroupError> {
        if !dsl.contains(':') {
            if let Some(g) = catalog::by_name(dsl.trim()) {
                return Ok(g);
            }
        }
        Self::build(&dsl.parse()?)
    }

    fn from_cayley(spec: GroupSpec, t: &CayleyTable) -> Result<Self, GroupError> {
        let k = t.order;
        if k == 0 {
            return Err(GroupError::MalformedTable("order must be at least 1".into()));
        }
        if k > MAX_ORDER || (k as u128) * (k as u128) > 1 << 28 {
            return Err(GroupError::TooLarge { order: k as u128, limit: 1 << 14 });
        }
        if t.table.len() != k || t.table.iter().any(|row| row.len() != k) {
            return Err(GroupError::MalformedTable(format!("table must be {k}x{k}")));
        }
        if let Some(names) = &t.names {
            if names.len() != k {
                return Err(GroupError::MalformedTable(format!("expected {k} names, got {}", names.len())));
            }
        }
        let mut flat = Vec::with_capacity(k * k);
        for row in &t.table {
            for &x in row {
                if x as usize >= k {
                    return Err(GroupError::MalformedTable(format!("entry {x} out of range")));
                }
                flat.push(x);
            }
        }
        validate_table(&flat, k)?;
        Self::finish(spec, k, Family::Table, Some(flat), t.names.clone())
    }

    /// Group given directly by a flat row-major Cayley table (validated).
    pub(crate) fn from_flat_table(label: String, flat: Vec<Element>, order: usize) -> Result<Self, GroupError> {
        validate_table(&flat, order)?;
        let rows = flat.chunks(order).map(<[u32]>::to_vec).collect();
        let spec = GroupSpec::Cayley(CayleySource::Inline {
            label,
            table: CayleyTable { order, table: rows, names: None },
        });
        Self::finish(spec, order, Family::Table, Some(flat), None)
    }

    fn finish(
        spec: GroupSpec,
        order: usize,
        family: Family,
        table: Option<Vec<Element>>,
        names: Option<Vec<String>>,
    ) -> Result<Self, GroupError> {
        let mut g = FiniteGroup { spec, order, table, inverses: Vec::new(), orders: Vec::new(), names, family };
        if g.table.is_none() && order <= TABLE_LIMIT {
            let mut t = Vec::with_capacity(order * order);
            for a in 0..order as Element {
                for b in 0..order as Element {
                    t.push(g.structured_mul(a, b));
                }
            }
            g.table = Some(t);
        }
        g.inverses = (0..order as Element).map(|a| g.compute_inv(a)).collect();
        g.orders = (0..order as Element)
            .map(|a| {
                let mut k = 1;
                let mut x = a;
                while x != 0 {
                    x = g.mul(x, a);
                    k += 1;
                }
                k
            })
            .collect();
        Ok(g)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Element {
        0
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.order as Element
    }

    pub fn contains(&self, e: Element) -> bool {
        (e as usize) < self.order
    }

    pub fn check(&self, e: Element) -> Result<Element, GroupError> {
        if self.contains(e) {
            Ok(e)
        } else {
            Err(GroupError::NotAnElement { element: e as u64, order: self.order })
        }
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        match &self.table {
            Some(t) => t[a as usize * self.order + b as usize],
            None => self.structured_mul(a, b),
        }
    }

    #[inline]
    pub fn inv(&self, a: Element) -> Element {
        self.inverses[a as usize]
    }

    /// `a^k` for any integer `k`.
    pub fn pow(&self, a: Element, k: i64) -> Element {
        let ord = self.orders[a as usize] as i64;
        let mut k = k.rem_euclid(ord);
        let mut base = a;
        let mut acc = 0;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: Element) -> u32 {
        self.orders[a as usize]
    }

    /// `x ↦ g x g⁻¹`.
    pub fn conjugate(&self, x: Element, g: Element) -> Element {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn is_abelian(&self) -> bool {
        match &self.family {
            Family::Abelian { .. } => true,
            _ => self
                .elements()
                .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a))),
        }
    }

    /// Human-readable element name.
    pub fn name(&self, e: Element) -> String {
        if let Some(names) = &self.names {
            return names[e as usize].clone();
        }
        match &self.family {
            Family::Symmetric { n } => cycle_notation(&unrank_perm(e as u64, *n)),
            Family::Abelian { moduli } => {
                let c = mixed_radix_decode(e as u64, moduli);
                if c.len() == 1 {
                    c[0].to_string()
                } else {
                    format!("({})", join(&c))
                }
            }
            Family::Matrix(m) => {
                let rows: Vec<String> =
                    m.entries(e).chunks(m.r).map(|row| format!("[{}]", join(row))).collect();
                format!("[{}]", rows.join(","))
            }
            Family::Lamplighter { r, q } => {
                let (f, s) = lamp_decode(e, *r, *q);
                format!("({};{s})", join(&f))
            }
            Family::Product { factors } => {
                let parts: Vec<String> = product_decode(e, factors)
                    .into_iter()
                    .zip(factors)
                    .map(|(c, f)| f.name(c))
                    .collect();
                format!("<{}>", parts.join(" | "))
            }
            Family::Table => e.to_string(),
        }
    }

    /// Looks up an element by id or by its display name.
    pub fn parse_element(&self, token: &str) -> Result<Element, GroupError> {
        let token = token.trim();
        if let Ok(id) = token.parse::<u64>() {
            if (id as usize) < self.order {
                return Ok(id as Element);
            }
            return Err(GroupError::NotAnElement { element: id, order: self.order });
        }
        self.elements()
            .find(|&e| self.name(e) == token)
            .ok_or_else(|| invalid("element", format!("no element named `{token}`")))
    }

    /// Row-major matrix entries for elements of `gl`/`sl` groups.
    pub fn matrix_entries(&self, e: Element) -> Option<&[u32]> {
        match &self.family {
            Family::Matrix(m) => Some(m.entries(e)),
            _ => None,
        }
    }

    /// Inverse of [`Self::matrix_entries`].
    pub fn matrix_element(&self, entries: &[u32]) -> Option<Element> {
        match &self.family {
            Family::Matrix(m) if entries.len() == m.r * m.r => m.lookup(entries),
            _ => None,
        }
    }

    /// `(dimension, field)` for matrix groups.
    pub fn matrix_field(&self) -> Option<(usize, &FiniteField)> {
        match &self.family {
            Family::Matrix(m) => Some((m.r, &m.field)),
            _ => None,
        }
    }

    pub fn is_general_linear(&self) -> bool {
        matches!(&self.family, Family::Matrix(m) if !m.special)
    }

    /// Coordinates in `Z/d_1 ⊕ … ⊕ Z/d_k` for `cyc`/`ab` groups.
    pub fn abelian_coords(&self, e: Element) -> Option<Vec<u32>> {
        match &self.family {
            Family::Abelian { moduli } => Some(mixed_radix_decode(e as u64, moduli)),
            _ => None,
        }
    }

    pub fn abelian_moduli(&self) -> Option<&[u32]> {
        match &self.family {
            Family::Abelian { moduli } => Some(moduli),
            _ => None,
        }
    }

    /// Inverse of [`Self::abelian_coords`].
    pub fn abelian_element(&self, coords: &[u32]) -> Option<Element> {
        match &self.family {
            Family::Abelian { moduli } if coords.len() == moduli.len() => {
                Some(mixed_radix_encode(coords, moduli) as Element)
            }
            _ => None,
        }
    }

    /// The base group `F = (Z/q)^r` of a lamplighter group (shift 0).
    pub fn lamp_subgroup(&self) -> Option<Subgroup> {
        match &self.family {
            Family::Lamplighter { r, .. } => {
                let members: Vec<Element> = self.elements().filter(|e| e % r == 0).collect();
                Some(Subgroup::from_members(self, members).expect("lamp group is a subgroup"))
            }
            _ => None,
        }
    }

    /// The subgroup `h` as a standalone group; local id `i` corresponds to
    /// `h.members()[i]`.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> FiniteGroup {
        let members = h.members();
        let k = members.len();
        let local: HashMap<Element, Element> =
            members.iter().enumerate().map(|(i, &e)| (e, i as Element)).collect();
        let mut flat = Vec::with_capacity(k * k);
        for &a in members {
            for &b in members {
                flat.push(local[&self.mul(a, b)]);
            }
        }
        let mut g = FiniteGroup::from_flat_table(format!("sub({},{k})", self.spec), flat, k)
            .expect("subgroup table is a group table");
        g.names = Some(members.iter().map(|&e| self.name(e)).collect());
        g
    }

    fn compute_inv(&self, a: Element) -> Element {
        match &self.family {
            Family::Symmetric { n } => {
                let p = unrank_perm(a as u64, *n);
                let mut q = vec![0u8; *n];
                for (i, &x) in p.iter().enumerate() {
                    q[x as usize] = i as u8;
                }
                rank_perm(&q) as Element
            }
            Family::Abelian { moduli } => {
                let c = mixed_radix_decode(a as u64, moduli);
                let neg: Vec<u32> = c.iter().zip(moduli).map(|(&x, &d)| (d - x) % d).collect();
                mixed_radix_encode(&neg, moduli) as Element
            }
            Family::Matrix(m) => {
                let inv = m.field.matinv(m.entries(a), m.r).expect("invertible");
                m.lookup(&inv).expect("closed under inverse")
            }
            Family::Lamplighter { r, q } => {
                let (f, s) = lamp_decode(a, *r, *q);
                let ns = (r - s) % r;
                let shifted = lamp_shift(&f, ns);
                let neg: Vec<u32> = shifted.iter().map(|&x| (q - x) % q).collect();
                lamp_encode(&neg, ns, *r, *q)
            }
            Family::Product { factors } => {
                let c: Vec<Element> = product_decode(a, factors)
                    .into_iter()
                    .zip(factors)
                    .map(|(x, f)| f.inv(x))
                    .collect();
                product_encode(&c, factors)
            }
            Family::Table => {
                let t = self.table.as_ref().expect("table family has a table");
                let row = &t[a as usize * self.order..(a as usize + 1) * self.order];
                row.iter().position(|&x| x == 0).expect("Latin square") as Element
            }
        }
    }

    fn structured_mul(&self, a: Element, b: Element) -> Element {
        match &self.family {
            Family::Symmetric { n } => {
                let p = unrank_perm(a as u64, *n);
                let q = unrank_perm(b as u64, *n);
                let pq: Vec<u8> = q.iter().map(|&x| p[x as usize]).collect();
                rank_perm(&pq) as Element
            }
            Family::Abelian { moduli } => {
                let x = mixed_radix_decode(a as u64, moduli);
                let y = mixed_radix_decode(b as u64, moduli);
                let s: Vec<u32> = x.iter().zip(&y).zip(moduli).map(|((u, v), d)| (u + v) % d).collect();
                mixed_radix_encode(&s, moduli) as Element
            }
            Family::Matrix(m) => {
                let prod = m.field.matmul(m.entries(a), m.entries(b), m.r);
                m.lookup(&prod).expect("closed under multiplication")
            }
            Family::Lamplighter { r, q } => {
                let (f1, s1) = lamp_decode(a, *r, *q);
                let (f2, s2) = lamp_decode(b, *r, *q);
                let moved = lamp_shift(&f2, s1);
                let f: Vec<u32> = f1.iter().zip(&moved).map(|(x, y)| (x + y) % q).collect();
                lamp_encode(&f, (s1 + s2) % r, *r, *q)
            }
            Family::Product { factors } => {
                let x = product_decode(a, factors);
                let y = product_decode(b, factors);
                let c: Vec<Element> =
                    x.iter().zip(&y).zip(factors).map(|((u, v), f)| f.mul(*u, *v)).collect();
                product_encode(&c, factors)
            }
            Family::Table => unreachable!("table groups always carry a table"),
        }
    }

    /// Determinant of a `gl`/`sl` element.
    pub fn determinant(&self, e: Element) -> Result<u32, GroupError> {
        match &self.family {
            Family::Matrix(m) => Ok(m.field.det(m.entries(e), m.r)),
            _ => Err(GroupError::Unsupported(format!("{} is not a matrix group", self.spec))),
        }
    }

    /// `{det e, −det e}` as a sorted list of field elements; labels the
    /// class of `det e` in `F_q^× / {±1}`.
    pub fn determinant_class(&self, e: Element) -> Result<Vec<u32>, GroupError> {
        let d = self.determinant(e)?;
        let (_, field) = self.matrix_field().expect("matrix group");
        Ok(sign_class(d, field))
    }

    /// Determinant class of an `r`-tuple in `(Z/p)^r` (`ab:p,...,p`), read
    /// as the matrix whose columns are the tuple entries.
    pub fn tuple_determinant_class(&self, tuple: &[Element]) -> Result<Vec<u32>, GroupError> {
        let moduli = self
            .abelian_moduli()
            .ok_or_else(|| GroupError::Unsupported(format!("{} is not elementary abelian", self.spec)))?;
        let p = moduli[0];
        let prime = prime_power(p as u64).is_some_and(|(_, k)| k == 1);
        if !prime || moduli.iter().any(|&d| d != p) {
            return Err(GroupError::Unsupported(format!("{} is not (Z/p)^r", self.spec)));
        }
        let r = moduli.len();
        if tuple.len() != r {
            return Err(invalid("tuple", format!("expected {r} entries, got {}", tuple.len())));
        }
        let field = FiniteField::new(p).expect("prime field");
        let mut m = vec![0; r * r];
        for (col, &e) in tuple.iter().enumerate() {
            for (row, c) in mixed_radix_decode(e as u64, moduli).into_iter().enumerate() {
                m[row * r + col] = c;
            }
        }
        Ok(sign_class(field.det(&m, r), &field))
    }

    /// Exhaustive (order ≤ `exhaustive_limit`) or sampled associativity,
    /// identity and inverse checks.
    pub fn verify_axioms(&self, exhaustive_limit: usize, samples: usize, seed: u64) -> bool {
        let id_ok = self.elements().all(|e| self.mul(e, 0) == e && self.mul(0, e) == e);
        let inv_ok = self.elements().all(|e| self.mul(e, self.inv(e)) == 0 && self.mul(self.inv(e), e) == 0);
        let assoc = |a, b, c| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        let assoc_ok = if self.order <= exhaustive_limit {
            self.elements()
                .all(|a| self.elements().all(|b| self.elements().all(|c| assoc(a, b, c))))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = self.order as Element;
            (0..samples).all(|_| assoc(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)))
        };
        id_ok && inv_ok && assoc_ok
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.spec, self.order)
    }
}

fn sign_class(d: u32, field: &FiniteField) -> Vec<u32> {
    let mut c = vec![d, field.neg(d)];
    c.sort_unstable();
    c.dedup();
    c
}

fn check_positive(field: &str, v: u32) -> Result<(), GroupError> {
    if v == 0 {
        Err(invalid(field, "must be at least 1"))
    } else {
        Ok(())
    }
}

fn factorial(n: u128) -> u128 {
    (1..=n).product()
}

fn family_order(f: &Family) -> Result<usize, GroupError> {
    let order: u128 = match f {
        Family::Symmetric { n } => factorial(*n as u128),
        Family::Abelian { moduli } => moduli.iter().map(|&d| d as u128).product(),
        Family::Matrix(m) => (m.entries.len() / (m.r * m.r)) as u128,
        Family::Lamplighter { r, q } => (*r as u128) * (*q as u128).checked_pow(*r).unwrap_or(u128::MAX),
        Family::Product { factors } => factors.iter().map(|g| g.order as u128).product(),
        Family::Table => unreachable!(),
    };
    if order > MAX_ORDER as u128 {
        return Err(GroupError::TooLarge { order, limit: MAX_ORDER });
    }
    Ok(order as usize)
}

fn matrix_family(r: u32, q: u32, special: bool) -> Result<Family, GroupError> {
    check_positive("r", r)?;
    check_positive("q", q)?;
    let field = FiniteField::new(q).ok_or_else(|| invalid("q", format!("{q} is not a prime power")))?;
    let r = r as usize;
    let cells = (q as u128).checked_pow((r * r) as u32).unwrap_or(u128::MAX);
    if cells > 1 << 26 {
        return Err(GroupError::TooLarge { order: cells, limit: 1 << 26 });
    }
    let mut entries = Vec::new();
    let mut count = 0usize;
    let identity: Vec<u32> = (0..r * r).map(|i| u32::from(i % (r + 1) == 0)).collect();
    entries.extend_from_slice(&identity);
    count += 1;
    let mut m = vec![0u32; r * r];
    for code in 0..cells as u64 {
        let mut c = code;
        for x in m.iter_mut() {
            *x = (c % q as u64) as u32;
            c /= q as u64;
        }
        if m == identity {
            continue;
        }
        let det = field.det(&m, r);
        if det != 0 && (!special || det == 1) {
            entries.extend_from_slice(&m);
            count += 1;
        }
    }
    if count > MAX_ORDER {
        return Err(GroupError::TooLarge { order: count as u128, limit: MAX_ORDER });
    }
    let mut fam = MatrixFamily { r, field, special, entries, index: HashMap::with_capacity(count) };
    for e in 0..count {
        let key = fam.key(fam.entries(e as Element));
        fam.index.insert(key, e as Element);
    }
    Ok(Family::Matrix(Box::new(fam)))
}

fn validate_table(flat: &[Element], k: usize) -> Result<(), GroupError> {
    for i in 0..k {
        if flat[i] as usize != i || flat[i * k] as usize != i {
            return Err(GroupError::MalformedTable("id 0 must be the identity".into()));
        }
    }
    let mut seen = vec![0usize; k];
    for i in 0..k {
        for j in 0..k {
            let x = flat[i * k + j] as usize;
            if x >= k {
                return Err(GroupError::MalformedTable(format!("entry {x} out of range")));
            }
            if seen[x] == 2 * i + 1 {
                return Err(GroupError::MalformedTable(format!("row {i} repeats {x}")));
            }
            seen[x] = 2 * i + 1;
        }
    }
    seen.iter_mut().for_each(|s| *s = 0);
    for j in 0..k {
        for i in 0..k {
            let x = flat[i * k + j] as usize;
            if seen[x] == j + 1 {
                return Err(GroupError::MalformedTable(format!("column {j} repeats {x}")));
            }
            seen[x] = j + 1;
        }
    }
    let m = |a: usize, b: usize| flat[a * k + b] as usize;
    let assoc = |a, b, c| m(m(a, b), c) == m(a, m(b, c));
    let ok = if k <= 200 {
        (0..k).all(|a| (0..k).all(|b| (0..k).all(|c| assoc(a, b, c))))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..100_000).all(|_| assoc(rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..k)))
    };
    if !ok {
        return Err(GroupError::MalformedTable("operation is not associative".into()));
    }
    Ok(())
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn mixed_radix_decode(mut x: u64, radices: &[u32]) -> Vec<u32> {
    radices
        .iter()
        .map(|&d| {
            let c = (x % d as u64) as u32;
            x /= d as u64;
            c
        })
        .collect()
}

fn mixed_radix_encode(c: &[u32], radices: &[u32]) -> u64 {
    c.iter().zip(radices).rev().fold(0, |acc, (&x, &d)| acc * d as u64 + x as u64)
}

fn product_decode(mut x: Element, factors: &[FiniteGroup]) -> Vec<Element> {
    factors
        .iter()
        .map(|f| {
            let k = f.order as Element;
            let c = x % k;
            x /= k;
            c
        })
        .collect()
}

fn product_encode(c: &[Element], factors: &[FiniteGroup]) -> Element {
    c.iter().zip(factors).rev().fold(0, |acc, (&x, f)| acc * f.order as Element + x)
}

/// Lamplighter ids pack `(f, s)` as `s + r * Σ f(x) q^x`; the product is
/// `(f1, s1)(f2, s2) = (f1 + f2(· − s1), s1 + s2)`.
fn lamp_decode(e: Element, r: u32, q: u32) -> (Vec<u32>, u32) {
    let s = e % r;
    let mut rest = e / r;
    let f = (0..r)
        .map(|_| {
            let c = rest % q;
            rest /= q;
            c
        })
        .collect();
    (f, s)
}

fn lamp_encode(f: &[u32], s: u32, r: u32, q: u32) -> Element {
    let lamps = f.iter().rev().fold(0, |acc, &x| acc * q + x);
    s + r * lamps
}

/// `f(· − s)`.
fn lamp_shift(f: &[u32], s: u32) -> Vec<u32> {
    let r = f.len() as u32;
    (0..r).map(|x| f[((x + r - s % r) % r) as usize]).collect()
}

/// Lexicographic rank of a permutation of `0..n`.
fn rank_perm(p: &[u8]) -> u64 {
    let n = p.len();
    let mut rank = 0u64;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count() as u64;
        rank = rank * (n - i) as u64 + smaller;
    }
    rank
}

fn unrank_perm(mut rank: u64, n: usize) -> Vec<u8> {
    let mut digits = vec![0usize; n];
    for i in (0..n).rev() {
        let base = (n - i) as u64;
        digits[i] = (rank % base) as usize;
        rank /= base;
    }
    let mut avail: Vec<u8> = (0..n as u8).collect();
    digits.into_iter().map(|d| avail.remove(d)).collect()
}

fn cycle_notation(p: &[u8]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] as usize == start {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cyc.push((x + 1).to_string());
            x = p[x] as usize;
        }
        out.push_str(&format!("({})", cyc.join(" ")));
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(s: &str) -> FiniteGroup {
        FiniteGroup::parse(s).unwrap()
    }

    #[test]
    fn orders_match_family_formulas() {
        assert_eq!(build("sym:3").order(), 6);
        assert_eq!(build("sym:5").order(), 120);
        assert_eq!(build("cyc:6").order(), 6);
        assert_eq!(build("ab:2,4").order(), 8);
        assert_eq!(build("gl:2,3").order(), 48);
        assert_eq!(build("gl:2,4").order(), 180);
        assert_eq!(build("sl:2,3").order(), 24);
        assert_eq!(build("sl:2,5").order(), 120);
        assert_eq!(build("lamp:3,2").order(), 24);
        assert_eq!(build("prod(cyc:2;sym:3)").order(), 12);
    }

    #[test]
    fn gl_order_agrees_with_brute_force_count() {
        // independent count of invertible 2x2 matrices over F_3: ad - bc != 0
        let mut count = 0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        if (a * d + 9 - b * c) % 3 != 0 {
                            count += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(count, 48);
        assert_eq!(build("gl:2,3").order(), count);
        // product formula for a true prime power
        let q: usize = 4;
        assert_eq!(build("gl:2,4").order(), (q * q - 1) * (q * q - q));
    }

    #[test]
    fn axioms_hold_for_small_groups() {
        for s in [
            "sym:3", "sym:4", "cyc:6", "ab:2,2", "ab:3,3", "ab:2,2,3", "gl:2,3", "sl:2,3", "lamp:3,2",
            "lamp:2,3", "prod(cyc:2;sym:3)", "gl:2,4",
        ] {
            let g = build(s);
            assert!(g.verify_axioms(200, 10_000, 1), "{s}");
        }
    }

    #[test]
    fn structured_groups_above_table_limit_are_consistent() {
        let g = build("gl:3,3");
        assert_eq!(g.order(), 11232);
        assert!(g.table.is_none());
        assert!(g.verify_axioms(200, 10_000, 7));
        let s7 = build("sym:7");
        assert_eq!(s7.order(), 5040);
        assert!(s7.verify_axioms(200, 10_000, 3));
    }

    #[test]
    fn permutation_product_composes_right_to_left() {
        let g = build("sym:3");
        let t12 = g.parse_element("(1 2)").unwrap();
        let t13 = g.parse_element("(1 3)").unwrap();
        assert_eq!(g.name(g.mul(t12, t13)), "(1 3 2)");
        assert_eq!(g.name(0), "()");
    }

    #[test]
    fn lamplighter_matches_semidirect_law() {
        let g = build("lamp:3,2");
        // shift generator t = (0;1), lamp δ0 = (1,0,0;0)
        let t = lamp_encode(&[0, 0, 0], 1, 3, 2);
        let delta = lamp_encode(&[1, 0, 0], 0, 3, 2);
        // t δ0 t⁻¹ lights lamp 1
        let conj = g.conjugate(delta, t);
        assert_eq!(lamp_decode(conj, 3, 2), (vec![0, 1, 0], 0));
        assert_eq!(g.element_order(t), 3);
        assert_eq!(g.lamp_subgroup().unwrap().order(), 8);
        assert!(!g.is_abelian());
    }

    #[test]
    fn invalid_parameters_name_the_field() {
        match FiniteGroup::parse("gl:2,6") {
            Err(GroupError::InvalidParameter { field, .. }) => assert_eq!(field, "q"),
            other => panic!("unexpected {other:?}"),
        }
        match FiniteGroup::parse("sym:0") {
            Err(GroupError::InvalidParameter { field, .. }) => assert_eq!(field, "n"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_cayley_tables_are_rejected() {
        let not_latin = CayleyTable { order: 2, table: vec![vec![0, 1], vec![1, 1]], names: None };
        let spec = GroupSpec::Cayley(CayleySource::Inline { label: "bad".into(), table: not_latin });
        assert!(matches!(FiniteGroup::build(&spec), Err(GroupError::MalformedTable(_))));
        let bad_identity = CayleyTable { order: 2, table: vec![vec![1, 0], vec![0, 1]], names: None };
        let spec = GroupSpec::Cayley(CayleySource::Inline { label: "bad".into(), table: bad_identity });
        assert!(matches!(FiniteGroup::build(&spec), Err(GroupError::MalformedTable(_))));
    }

    #[test]
    fn determinant_classes_identify_sign() {
        let g = build("gl:2,5");
        assert_eq!(g.determinant_class(0).unwrap(), vec![1, 4]);
        let d21 = g.matrix_element(&[2, 0, 0, 1]).unwrap();
        assert_eq!(g.determinant_class(d21).unwrap(), vec![2, 3]);
        let d22 = g.matrix_element(&[2, 0, 0, 2]).unwrap();
        assert_eq!(g.determinant_class(d22).unwrap(), vec![1, 4]);
        assert!(matches!(build("sym:3").determinant_class(1), Err(GroupError::Unsupported(_))));
        let a = build("ab:5,5");
        let e1 = a.abelian_element(&[1, 0]).unwrap();
        let e2 = a.abelian_element(&[0, 2]).unwrap();
        assert_eq!(a.tuple_determinant_class(&[e1, e2]).unwrap(), vec![2, 3]);
    }

    #[test]
    fn perm_rank_round_trips() {
        for r in 0..120 {
            assert_eq!(rank_perm(&unrank_perm(r, 5)), r);
        }
    }
}
