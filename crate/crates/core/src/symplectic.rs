//! Integer reduction of primitive vectors under `SL_g(Z)` and `Sp_2g(Z)`,
//! and stabilization of vectors in `A^{2g}` for finite abelian `A`.
//!
//! Coordinates of `Z^{2g}` are interleaved hyperbolic pairs
//! `(u_1, v_1, …, u_g, v_g)` and the form is
//! `J = diag([[0,1],[-1,0]], …)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymplecticError {
    #[error("the zero vector cannot be reduced")]
    ZeroVector,
    #[error("vector is not primitive: gcd = {gcd}")]
    NotPrimitive { gcd: BigInt },
    #[error("genus {g} is too small for {r} cyclic factors: need g >= r + 1")]
    GenusTooSmall { g: usize, r: usize },
    #[error("invalid {field}: {reason}")]
    InvalidArgument { field: String, reason: String },
    #[error("matrix is not symplectic")]
    NotSymplectic,
}

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(BigInt::zero(), |acc, l| acc + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(BigInt::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

pub fn transpose(a: &IntMatrix) -> IntMatrix {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Determinant by fraction-free elimination.
pub fn determinant(a: &IntMatrix) -> BigInt {
    let n = a.len();
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else { return BigInt::zero() };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * prev
}

/// The standard form on `Z^{2g}`.
pub fn form(g: usize) -> IntMatrix {
    let mut j = vec![vec![BigInt::zero(); 2 * g]; 2 * g];
    for i in 0..g {
        j[2 * i][2 * i + 1] = BigInt::one();
        j[2 * i + 1][2 * i] = -BigInt::one();
    }
    j
}

/// Permutation taking interleaved coordinates `(u_1, v_1, …)` to the
/// block order `(u_1, …, u_g, v_1, …, v_g)`: entry `k` of the result is
/// the interleaved index of block coordinate `k`.
pub fn block_order(g: usize) -> Vec<usize> {
    (0..g).map(|i| 2 * i).chain((0..g).map(|i| 2 * i + 1)).collect()
}

/// Rewrites a matrix written in block order into interleaved order.
pub fn from_block_basis(m: &IntMatrix) -> IntMatrix {
    let p = block_order(m.len() / 2);
    let mut out = vec![vec![BigInt::zero(); m.len()]; m.len()];
    for (a, &pa) in p.iter().enumerate() {
        for (b, &pb) in p.iter().enumerate() {
            out[pa][pb] = m[a][b].clone();
        }
    }
    out
}

/// Rewrites an interleaved matrix into block order.
pub fn to_block_basis(m: &IntMatrix) -> IntMatrix {
    let p = block_order(m.len() / 2);
    p.iter().map(|&pa| p.iter().map(|&pb| m[pa][pb].clone()).collect()).collect()
}

pub fn is_symplectic(m: &IntMatrix) -> bool {
    let n = m.len();
    n % 2 == 0 && m.iter().all(|r| r.len() == n) && mat_mul(&mat_mul(&transpose(m), &form(n / 2)), m) == form(n / 2)
}

/// A `2g × 2g` integer matrix with `MᵀJM = J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpMatrix {
    rows: IntMatrix,
}

impl SpMatrix {
    pub fn new(rows: IntMatrix) -> Result<Self, SymplecticError> {
        if is_symplectic(&rows) {
            Ok(Self { rows })
        } else {
            Err(SymplecticError::NotSymplectic)
        }
    }

    pub fn identity(g: usize) -> Self {
        Self { rows: identity(2 * g) }
    }

    pub fn genus(&self) -> usize {
        self.rows.len() / 2
    }

    pub fn rows(&self) -> &IntMatrix {
        &self.rows
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        mat_vec(&self.rows, v)
    }

    /// `self · other`.
    pub fn compose(&self, other: &SpMatrix) -> SpMatrix {
        SpMatrix { rows: mat_mul(&self.rows, &other.rows) }
    }

    pub fn to_json(&self) -> serde_json::Value {
        matrix_json(&self.rows)
    }
}

/// Row-major JSON; entries are numbers when they fit in `i64`, decimal
/// strings otherwise.
pub fn matrix_json(m: &IntMatrix) -> serde_json::Value {
    serde_json::Value::Array(m.iter().map(|row| vector_json(row)).collect())
}

pub fn vector_json(v: &[BigInt]) -> serde_json::Value {
    serde_json::Value::Array(
        v.iter()
            .map(|x| match x.to_i64() {
                Some(i) => serde_json::Value::from(i),
                None => serde_json::Value::from(x.to_string()),
            })
            .collect(),
    )
}

fn gcd_all(w: &[BigInt]) -> BigInt {
    w.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// `R ∈ SL_2(Z)` with `R·(a, b) = (gcd(a, b), 0)`, and `R⁻¹`.
fn rotation(a: &BigInt, b: &BigInt) -> ([[BigInt; 2]; 2], [[BigInt; 2]; 2]) {
    let e = a.extended_gcd(b);
    let (c, x, y) = (e.gcd, e.x, e.y);
    let (ac, bc) = (a / &c, b / &c);
    let r = [[x.clone(), y.clone()], [-bc.clone(), ac.clone()]];
    let inv = [[ac, -y], [bc, x]];
    (r, inv)
}

/// Left-multiplies `m` by the rotation acting on rows `i, j`.
fn rotate_rows(m: &mut IntMatrix, i: usize, j: usize, r: &[[BigInt; 2]; 2]) {
    for col in 0..m[i].len() {
        let (a, b) = (m[i][col].clone(), m[j][col].clone());
        m[i][col] = &r[0][0] * &a + &r[0][1] * &b;
        m[j][col] = &r[1][0] * &a + &r[1][1] * &b;
    }
}

/// Right-multiplies `m` by the rotation acting on columns `i, j`.
fn rotate_cols(m: &mut IntMatrix, i: usize, j: usize, r: &[[BigInt; 2]; 2]) {
    for row in m.iter_mut() {
        let (a, b) = (row[i].clone(), row[j].clone());
        row[i] = &a * &r[0][0] + &b * &r[1][0];
        row[j] = &a * &r[0][1] + &b * &r[1][1];
    }
}

/// `M ∈ SL_g(Z)` and `M⁻¹` with `M·w = (gcd(w), 0, …, 0)`, built from
/// extended-Euclid rotations of the pairs `(1, k)`.
fn sl_reduce_with_inverse(w: &[BigInt]) -> Result<(IntMatrix, IntMatrix), SymplecticError> {
    let g = w.len();
    if w.iter().all(Zero::is_zero) {
        return Err(SymplecticError::ZeroVector);
    }
    let mut m = identity(g);
    let mut inv = identity(g);
    let mut cur = w.to_vec();
    for k in 1..g {
        if cur[k].is_zero() {
            continue;
        }
        let (r, ri) = rotation(&cur[0], &cur[k]);
        rotate_rows(&mut m, 0, k, &r);
        rotate_cols(&mut inv, 0, k, &ri);
        cur[0] = cur[0].gcd(&cur[k]);
        cur[k] = BigInt::zero();
    }
    if cur[0].is_negative() {
        if g == 1 {
            return Err(SymplecticError::InvalidArgument {
                field: "w".into(),
                reason: "SL_1(Z) is trivial, so a negative entry cannot be made positive".into(),
            });
        }
        let r = [[-BigInt::one(), BigInt::zero()], [BigInt::zero(), -BigInt::one()]];
        rotate_rows(&mut m, 0, 1, &r);
        rotate_cols(&mut inv, 0, 1, &r);
    }
    Ok((m, inv))
}

/// `M ∈ SL_g(Z)` with `M·w = (gcd(w), 0, …, 0)`.
pub fn sl_reduce(w: &[BigInt]) -> Result<IntMatrix, SymplecticError> {
    sl_reduce_with_inverse(w).map(|(m, _)| m)
}

/// `M ∈ Sp_2g(Z)` with `M·w = u_1` for primitive `w`.
///
/// Each plane `(u_i, v_i)` is first rotated so that its `v`-coordinate
/// vanishes; the `u`-coordinates are then reduced by `N = sl_reduce`,
/// embedded as `N` on the `u`'s and `Nᵀ⁻¹` on the `v`'s.
pub fn sp_reduce(w: &[BigInt]) -> Result<SpMatrix, SymplecticError> {
    if w.is_empty() || w.len() % 2 != 0 {
        return Err(SymplecticError::InvalidArgument { field: "w".into(), reason: "length must be 2g with g >= 1".into() });
    }
    let gcd = gcd_all(w);
    if gcd.is_zero() {
        return Err(SymplecticError::ZeroVector);
    }
    if !gcd.is_one() {
        return Err(SymplecticError::NotPrimitive { gcd });
    }
    let g = w.len() / 2;
    let mut plane = identity(2 * g);
    let mut cur = w.to_vec();
    for i in 0..g {
        let (a, b) = (cur[2 * i].clone(), cur[2 * i + 1].clone());
        if b.is_zero() && !a.is_negative() {
            continue;
        }
        let (r, _) = rotation(&a, &b);
        rotate_rows(&mut plane, 2 * i, 2 * i + 1, &r);
        cur[2 * i] = a.gcd(&b);
        cur[2 * i + 1] = BigInt::zero();
    }
    let us: Vec<BigInt> = (0..g).map(|i| cur[2 * i].clone()).collect();
    let (n, n_inv) = sl_reduce_with_inverse(&us)?;
    let mut embed = vec![vec![BigInt::zero(); 2 * g]; 2 * g];
    for i in 0..g {
        for j in 0..g {
            embed[i][j] = n[i][j].clone();
            embed[g + i][g + j] = n_inv[j][i].clone();
        }
    }
    let m = SpMatrix { rows: mat_mul(&from_block_basis(&embed), &plane) };
    debug_assert!(is_symplectic(m.rows()));
    Ok(m)
}

/// `v ∈ A^{2g}` for `A = Z/d_1 ⊕ … ⊕ Z/d_r`: row `k` holds the
/// coordinates of `v_k`, column `i` is taken mod `d_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianVector {
    pub moduli: Vec<u64>,
    pub entries: Vec<Vec<u64>>,
}

impl AbelianVector {
    pub fn new(moduli: Vec<u64>, entries: Vec<Vec<u64>>) -> Result<Self, SymplecticError> {
        if moduli.iter().any(|&d| d < 2) {
            return Err(SymplecticError::InvalidArgument { field: "moduli".into(), reason: "each modulus must be >= 2".into() });
        }
        if entries.is_empty() || entries.len() % 2 != 0 {
            return Err(SymplecticError::InvalidArgument { field: "v".into(), reason: "need 2g rows with g >= 1".into() });
        }
        for row in &entries {
            if row.len() != moduli.len() {
                return Err(SymplecticError::InvalidArgument {
                    field: "v".into(),
                    reason: format!("each row needs {} residues", moduli.len()),
                });
            }
            if row.iter().zip(&moduli).any(|(&x, &d)| x >= d) {
                return Err(SymplecticError::InvalidArgument { field: "v".into(), reason: "residue out of range".into() });
            }
        }
        Ok(Self { moduli, entries })
    }

    pub fn genus(&self) -> usize {
        self.entries.len() / 2
    }

    /// Column `i` as integers in `[0, d_i)`.
    pub fn column(&self, i: usize) -> Vec<BigInt> {
        self.entries.iter().map(|row| BigInt::from(row[i])).collect()
    }

    /// `M·v`, reduced column by column.
    pub fn transform(&self, m: &IntMatrix) -> AbelianVector {
        let mut entries = vec![vec![0; self.moduli.len()]; self.entries.len()];
        for (i, &d) in self.moduli.iter().enumerate() {
            let col = mat_vec(m, &self.column(i));
            for (k, x) in col.iter().enumerate() {
                entries[k][i] = x.mod_floor(&BigInt::from(d)).to_u64().expect("residue");
            }
        }
        AbelianVector { moduli: self.moduli.clone(), entries }
    }

    pub fn last_pair_is_zero(&self) -> bool {
        let n = self.entries.len();
        self.entries[n - 2..].iter().all(|row| row.iter().all(|&x| x == 0))
    }
}

/// `M ∈ Sp_2g(Z)` with the last hyperbolic pair of `M·v` zero, for
/// `g ≥ r + 1`. Column by column, the lift of the residues on the pairs
/// not yet used is divided by its gcd `c` and sent to `c·u` of the first
/// unused pair by [`sp_reduce`], padded by the identity on used pairs.
pub fn stabilize(v: &AbelianVector) -> Result<(SpMatrix, AbelianVector), SymplecticError> {
    let g = v.genus();
    let r = v.moduli.len();
    if g < r + 1 {
        return Err(SymplecticError::GenusTooSmall { g, r });
    }
    let mut acc = identity(2 * g);
    let mut cur = v.clone();
    let mut used = 0;
    for i in 0..r {
        let lift: Vec<BigInt> = cur.column(i)[2 * used..].to_vec();
        let c = gcd_all(&lift);
        if c.is_zero() {
            continue;
        }
        let primitive: Vec<BigInt> = lift.iter().map(|x| x / &c).collect();
        let block = sp_reduce(&primitive)?;
        let mut step = identity(2 * g);
        for (a, row) in block.rows().iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                step[2 * used + a][2 * used + b] = x.clone();
            }
        }
        acc = mat_mul(&step, &acc);
        cur = cur.transform(&step);
        used += 1;
    }
    let m = SpMatrix { rows: acc };
    debug_assert!(is_symplectic(m.rows()));
    debug_assert_eq!(v.transform(m.rows()), cur);
    Ok((m, cur))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn sl_reduce_bezout_example() {
        let m = sl_reduce(&ints(&[2, 3])).unwrap();
        assert_eq!(m, vec![ints(&[-1, 1]), ints(&[-3, 2])]);
        assert_eq!(mat_vec(&m, &ints(&[2, 3])), ints(&[1, 0]));
        assert_eq!(determinant(&m), BigInt::one());
        assert_eq!(sl_reduce(&ints(&[1, 0, 0])).unwrap(), identity(3));
        assert_eq!(sl_reduce(&ints(&[0, 0])), Err(SymplecticError::ZeroVector));
    }

    #[test]
    fn sl_reduce_handles_signs() {
        for w in [[-4, 6, 0], [0, 0, -5], [-3, 0, 0], [6, 10, 15]] {
            let w = ints(&w);
            let m = sl_reduce(&w).unwrap();
            let out = mat_vec(&m, &w);
            assert_eq!(out[0], gcd_all(&w));
            assert!(out[1..].iter().all(Zero::is_zero));
            assert_eq!(determinant(&m), BigInt::one());
        }
        assert!(sl_reduce(&ints(&[-3])).is_err());
    }

    #[test]
    fn sp_reduce_small_cases() {
        let m = sp_reduce(&ints(&[1, 0, 0, 0])).unwrap();
        assert_eq!(m, SpMatrix::identity(2));
        let w = ints(&[2, 3]);
        let m = sp_reduce(&w).unwrap();
        assert_eq!(m.apply(&w), ints(&[1, 0]));
        assert!(is_symplectic(m.rows()));
        let w = ints(&[0, -1, 4, 6, 3, 0]);
        let m = sp_reduce(&w).unwrap();
        assert_eq!(m.apply(&w), ints(&[1, 0, 0, 0, 0, 0]));
        assert!(is_symplectic(m.rows()));
        assert_eq!(sp_reduce(&ints(&[2, 4])), Err(SymplecticError::NotPrimitive { gcd: BigInt::from(2) }));
    }

    #[test]
    fn stabilize_checks_genus() {
        let v = AbelianVector::new(vec![2, 3], vec![vec![1, 1], vec![0, 2], vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(stabilize(&v).unwrap_err(), SymplecticError::GenusTooSmall { g: 2, r: 2 });
        let zero = AbelianVector::new(vec![2], vec![vec![0]; 4]).unwrap();
        let (m, out) = stabilize(&zero).unwrap();
        assert_eq!(m, SpMatrix::identity(2));
        assert_eq!(out, zero);
    }

    #[test]
    fn block_basis_round_trip() {
        let m: IntMatrix = (0..6).map(|i| (0..6).map(|j| BigInt::from(10 * i + j)).collect()).collect();
        assert_eq!(to_block_basis(&from_block_basis(&m)), m);
        assert_eq!(to_block_basis(&form(3))[0][3], BigInt::one());
    }

    #[test]
    fn determinant_by_elimination() {
        let m = vec![ints(&[0, 2, 1]), ints(&[1, 0, 0]), ints(&[3, 1, 1])];
        assert_eq!(determinant(&m), BigInt::from(-1));
        assert_eq!(determinant(&vec![ints(&[2, 4]), ints(&[1, 2])]), BigInt::zero());
    }
}
