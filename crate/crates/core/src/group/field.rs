//! Small finite fields `F_q` realized as lookup tables.
//!
//! Elements are integers `0..q`. For prime `q` they are residues; for a true
//! prime power `q = p^k` an element's base-`p` digits are the coefficients of
//! a polynomial reduced modulo a fixed monic irreducible of degree `k`.

/// Returns `Some((p, k))` when `q = p^k` for a prime `p` and `k >= 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    let mut rest = q;
    while p * p <= rest {
        if rest % p == 0 {
            break;
        }
        p += 1;
    }
    if p * p > rest {
        p = rest;
    }
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

#[derive(Debug, Clone)]
pub struct FiniteField {
    q: u32,
    p: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl FiniteField {
    /// Builds `F_q`; `None` if `q` is not a prime power.
    pub fn new(q: u32) -> Option<Self> {
        let (p, k) = prime_power(q as u64)?;
        let p = p as u32;
        let modulus = if k == 1 { vec![0, 1] } else { irreducible(p, k as usize) };
        let qs = q as usize;
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        for a in 0..q {
            let da = digits(a, p, k as usize);
            for b in 0..q {
                let db = digits(b, p, k as usize);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = undigits(&s, p);
                let prod = poly_mulmod(&da, &db, &modulus, p);
                mul[a as usize * qs + b as usize] = undigits(&prod, p);
            }
        }
        let mut neg = vec![0; qs];
        let mut inv = vec![0; qs];
        for a in 0..q {
            for b in 0..q {
                if add[a as usize * qs + b as usize] == 0 {
                    neg[a as usize] = b;
                }
                if mul[a as usize * qs + b as usize] == 1 {
                    inv[a as usize] = b;
                }
            }
        }
        Some(Self { q, p, add, mul, neg, inv })
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `inv(0)` is defined as 0.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// Determinant of a row-major `r x r` matrix by Gaussian elimination.
    pub fn det(&self, entries: &[u32], r: usize) -> u32 {
        let mut m = entries.to_vec();
        let mut det = 1;
        for col in 0..r {
            let Some(pivot) = (col..r).find(|&row| m[row * r + col] != 0) else {
                return 0;
            };
            if pivot != col {
                for c in 0..r {
                    m.swap(pivot * r + c, col * r + c);
                }
                det = self.neg(det);
            }
            let pv = m[col * r + col];
            det = self.mul(det, pv);
            let pinv = self.inv(pv);
            for row in col + 1..r {
                let factor = self.mul(m[row * r + col], pinv);
                if factor == 0 {
                    continue;
                }
                for c in col..r {
                    let v = self.mul(factor, m[col * r + c]);
                    m[row * r + c] = self.sub(m[row * r + c], v);
                }
            }
        }
        det
    }

    /// Product of row-major `r x r` matrices.
    pub fn matmul(&self, a: &[u32], b: &[u32], r: usize) -> Vec<u32> {
        let mut out = vec![0; r * r];
        for i in 0..r {
            for j in 0..r {
                let mut acc = 0;
                for k in 0..r {
                    acc = self.add(acc, self.mul(a[i * r + k], b[k * r + j]));
                }
                out[i * r + j] = acc;
            }
        }
        out
    }

    /// Inverse of an invertible `r x r` matrix by Gauss-Jordan elimination.
    pub fn matinv(&self, a: &[u32], r: usize) -> Option<Vec<u32>> {
        let mut m = a.to_vec();
        let mut out = vec![0; r * r];
        for i in 0..r {
            out[i * r + i] = 1;
        }
        for col in 0..r {
            let pivot = (col..r).find(|&row| m[row * r + col] != 0)?;
            for c in 0..r {
                m.swap(pivot * r + c, col * r + c);
                out.swap(pivot * r + c, col * r + c);
            }
            let pinv = self.inv(m[col * r + col]);
            for c in 0..r {
                m[col * r + c] = self.mul(m[col * r + c], pinv);
                out[col * r + c] = self.mul(out[col * r + c], pinv);
            }
            for row in 0..r {
                if row == col {
                    continue;
                }
                let factor = m[row * r + col];
                if factor == 0 {
                    continue;
                }
                for c in 0..r {
                    let v = self.mul(factor, m[col * r + c]);
                    m[row * r + c] = self.sub(m[row * r + c], v);
                    let w = self.mul(factor, out[col * r + c]);
                    out[row * r + c] = self.sub(out[row * r + c], w);
                }
            }
        }
        Some(out)
    }
}

fn digits(mut a: u32, p: u32, k: usize) -> Vec<u32> {
    let mut out = vec![0; k];
    for d in out.iter_mut() {
        *d = a % p;
        a /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Product of two polynomials (coefficients low-first, length k) modulo a
/// monic polynomial of degree k.
fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let k = a.len();
    let mut prod = vec![0u32; 2 * k.max(1)];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let deg = modulus.len() - 1;
    for top in (deg..prod.len()).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        for (i, &m) in modulus.iter().enumerate() {
            let idx = top - deg + i;
            prod[idx] = (prod[idx] + p - (c * m) % p) % p;
        }
    }
    prod.truncate(k);
    prod
}

/// Remainder of `a` modulo monic `b` over `F_p`; coefficients low-first.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - (c * bi) % p) % p;
        }
        r.pop();
    }
    r
}

/// First monic irreducible polynomial of degree `k` over `F_p` in
/// lexicographic order of its lower coefficients.
fn irreducible(p: u32, k: usize) -> Vec<u32> {
    let total = (p as u64).pow(k as u32);
    'cand: for low in 0..total {
        let mut f = digits(low as u32, p, k);
        f.push(1);
        if f[0] == 0 {
            continue;
        }
        for d in 1..=k / 2 {
            for lowd in 0..(p as u64).pow(d as u32) {
                let mut g = digits(lowd as u32, p, d);
                g.push(1);
                if poly_rem(&f, &g, p).iter().all(|&c| c == 0) {
                    continue 'cand;
                }
            }
        }
        return f;
    }
    unreachable!("irreducible polynomials exist in every degree")
}
