//! Explicit rank and redundancy constants as exact values.
//!
//! The constants mix rationals with `log₂ J(m)`, where `J(m)` is the Jordan
//! constant of `GL_m(C)`. A [`LogValue`] keeps such a value as
//! `a + c·log₂(x)` with `a, c` rational and `x` a natural number, and
//! compares it with integers exactly: a float estimate decides unless it
//! is within rounding distance, in which case the comparison is settled by
//! comparing powers of two with powers of `x`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstantsError {
    #[error("invalid {field}: {reason}")]
    InvalidArgument { field: String, reason: String },
    #[error("Jordan table entry for m = {m}: {reason}")]
    Jordan { m: u32, reason: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// `rational + log_coeff · log₂(log_arg)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogValue {
    pub rational: BigRational,
    pub log_coeff: BigRational,
    pub log_arg: BigUint,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational in f64 range")
}

/// `log₂ x` in floating point, valid for very large `x`.
fn log2_approx(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("small").log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 bits");
    (top as f64).log2() + shift as f64
}

fn exponent(x: &BigInt) -> u32 {
    x.to_u32().expect("exponent of an exact comparison fits in u32")
}

/// Sign of `r + c·log₂ x`.
fn sign(r: &BigRational, c: &BigRational, x: &BigUint) -> Ordering {
    if c.is_zero() || x.is_one() {
        return r.cmp(&BigRational::zero());
    }
    let l = log2_approx(x);
    let (rf, cf) = (to_f64(r), to_f64(c));
    let f = rf + cf * l;
    if f.abs() > 1e-9 * (rf.abs() + (cf * l).abs() + 1.0) {
        return if f > 0.0 { Ordering::Greater } else { Ordering::Less };
    }
    exact_sign(r, c, x)
}

/// Sign of `r + c·log₂ x` for `c ≠ 0`, `x ≥ 2`, by integer powers.
fn exact_sign(r: &BigRational, c: &BigRational, x: &BigUint) -> Ordering {
    let zero = BigRational::zero();
    match (r.cmp(&zero), c.cmp(&zero)) {
        (Ordering::Greater | Ordering::Equal, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less | Ordering::Equal, Ordering::Less) => Ordering::Less,
        (Ordering::Greater, _) => {
            // r vs |c|·log₂ x, i.e. 2^p vs x^q with p/q = r/|c|
            let t = r / c.abs();
            let lhs = BigUint::one() << exponent(t.numer()) as usize;
            let rhs = x.pow(exponent(t.denom()));
            lhs.cmp(&rhs)
        }
        _ => {
            // c·log₂ x vs |r|, i.e. x^q vs 2^p with p/q = |r|/c
            let t = r.abs() / c;
            let lhs = x.pow(exponent(t.denom()));
            let rhs = BigUint::one() << exponent(t.numer()) as usize;
            lhs.cmp(&rhs)
        }
    }
}

impl LogValue {
    pub fn rational(r: BigRational) -> Self {
        Self { rational: r, log_coeff: BigRational::zero(), log_arg: BigUint::one() }
    }

    pub fn new(rational: BigRational, log_coeff: BigRational, log_arg: BigUint) -> Self {
        assert!(!log_arg.is_zero(), "log of zero");
        Self { rational, log_coeff, log_arg }
    }

    pub fn approx(&self) -> f64 {
        to_f64(&self.rational) + to_f64(&self.log_coeff) * log2_approx(&self.log_arg)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self { rational: &self.rational * k, log_coeff: &self.log_coeff * k, log_arg: self.log_arg.clone() }
    }

    pub fn add_rational(&self, k: &BigRational) -> Self {
        Self { rational: &self.rational + k, ..self.clone() }
    }

    /// Sum of two values sharing the logarithm argument (or with a zero
    /// coefficient).
    pub fn add(&self, other: &Self) -> Self {
        let arg = if self.log_coeff.is_zero() {
            other.log_arg.clone()
        } else {
            assert!(other.log_coeff.is_zero() || self.log_arg == other.log_arg, "mixed logarithm arguments");
            self.log_arg.clone()
        };
        Self {
            rational: &self.rational + &other.rational,
            log_coeff: &self.log_coeff + &other.log_coeff,
            log_arg: arg,
        }
    }

    /// Exact comparison; both values must share the logarithm argument
    /// unless one coefficient is zero.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        let diff = self.add(&other.scale(&int(-1)));
        sign(&diff.rational, &diff.log_coeff, &diff.log_arg)
    }

    /// Whether `n ≥ self`, exactly.
    pub fn meets(&self, n: &BigInt) -> bool {
        let r = int(n.clone()) - &self.rational;
        sign(&r, &-self.log_coeff.clone(), &self.log_arg) != Ordering::Less
    }

    /// The smallest integer `n` with `n ≥ self`.
    pub fn ceil(&self) -> BigInt {
        let mut n = BigInt::from(self.approx().floor() as i64 - 2);
        while !self.meets(&n) {
            n += 1;
        }
        while self.meets(&(&n - 1)) {
            n -= 1;
        }
        n
    }

    pub fn to_json(&self) -> LogValueJson {
        LogValueJson {
            rational: self.rational.to_string(),
            log2_coeff: self.log_coeff.to_string(),
            log2_of: self.log_arg.to_string(),
            approx: self.approx(),
            ceil: self.ceil().to_string(),
        }
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log_coeff.is_zero() || self.log_arg.is_one() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{} + {}·log2({})", self.rational, self.log_coeff, self.log_arg)
        }
    }
}

/// JSON form of a [`LogValue`]; exact parts are decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogValueJson {
    pub rational: String,
    pub log2_coeff: String,
    pub log2_of: String,
    pub approx: f64,
    pub ceil: String,
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Where `J(m)` comes from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum JordanPolicy {
    /// `J(m) = (m+1)!`, exact for `m ≥ 71` and a lower bound for
    /// `2 ≤ m ≤ 70`. `J(1) = 1`: finite subgroups of `GL_1` are abelian.
    #[default]
    CollinsLargeM,
    /// Explicit values; `m` missing from the table falls back to
    /// [`JordanPolicy::CollinsLargeM`] when `m ≥ 71` or `m = 1`.
    UserSupplied(BTreeMap<u32, BigUint>),
}

/// `J(m)` and whether it is known to be the exact constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanValue {
    pub value: BigUint,
    pub exact: bool,
}

/// Below this, `(m+1)!` is only a lower bound for `J(m)`.
pub const COLLINS_EXACT_FROM: u32 = 71;

impl JordanPolicy {
    /// Parses `{"m": J, ...}` with `J` a number or decimal string.
    pub fn from_table_json(s: &str) -> Result<Self, ConstantsError> {
        let raw: BTreeMap<String, serde_json::Value> = serde_json::from_str(s)?;
        let mut table = BTreeMap::new();
        for (k, v) in raw {
            let m: u32 = k.trim().parse().map_err(|_| ConstantsError::InvalidArgument {
                field: "jordan table key".into(),
                reason: format!("{k:?} is not a positive integer"),
            })?;
            let bad = |reason: String| ConstantsError::Jordan { m, reason };
            let j: BigUint = match &v {
                serde_json::Value::Number(n) => n.as_u64().map(BigUint::from).ok_or_else(|| bad(format!("{n} is not a natural number")))?,
                serde_json::Value::String(s) => s.trim().parse().map_err(|_| bad(format!("{s:?} is not a natural number")))?,
                other => return Err(bad(format!("expected a number, got {other}"))),
            };
            table.insert(m, j);
        }
        let policy = JordanPolicy::UserSupplied(table);
        if let JordanPolicy::UserSupplied(t) = &policy {
            for &m in t.keys() {
                policy.jordan(m)?;
            }
        }
        Ok(policy)
    }

    pub fn jordan(&self, m: u32) -> Result<JordanValue, ConstantsError> {
        if m == 0 {
            return Err(ConstantsError::InvalidArgument { field: "m".into(), reason: "must be at least 1".into() });
        }
        let collins = || {
            if m == 1 {
                JordanValue { value: BigUint::one(), exact: true }
            } else {
                JordanValue { value: factorial(m + 1), exact: m >= COLLINS_EXACT_FROM }
            }
        };
        match self {
            JordanPolicy::CollinsLargeM => Ok(collins()),
            JordanPolicy::UserSupplied(table) => match table.get(&m) {
                Some(j) => {
                    let floor = collins().value;
                    if *j < floor {
                        return Err(ConstantsError::Jordan { m, reason: format!("{j} is below the lower bound {floor}") });
                    }
                    Ok(JordanValue { value: j.clone(), exact: true })
                }
                None if m == 1 || m >= COLLINS_EXACT_FROM => Ok(collins()),
                None => Err(ConstantsError::Jordan { m, reason: "missing from the table".into() }),
            },
        }
    }
}

/// `N_#(m) = 1 + 5m/2 + log₂ J(m)`.
pub fn n_sharp(m: u32, policy: &JordanPolicy) -> Result<LogValue, ConstantsError> {
    let j = policy.jordan(m)?;
    Ok(LogValue::new(int(1) + ratio(5 * m as i64, 2), int(1), j.value))
}

/// `N(m, D)` by its recursion `N(m, D+1) = N(m, 0) + max_{j ≤ D} N(m, j)`.
pub fn n_recursive(m: u32, d: u32, policy: &JordanPolicy) -> Result<LogValue, ConstantsError> {
    let base = n_sharp(m, policy)?;
    let mut values = vec![base.clone()];
    for _ in 0..d {
        let max = values
            .iter()
            .max_by(|a, b| a.cmp_value(b))
            .expect("nonempty")
            .clone();
        values.push(base.add(&max));
    }
    Ok(values.pop().expect("nonempty"))
}

/// `N(m, D) = (D+1)·N_#(m)`.
pub fn n_closed(m: u32, d: u32, policy: &JordanPolicy) -> Result<LogValue, ConstantsError> {
    Ok(n_sharp(m, policy)?.scale(&int(d + 1)))
}

/// `2m²·log₂ m + 3m² + b`, exact.
pub fn intro_bound_value(m: u32, b: u64) -> LogValue {
    let m2 = (m as u64) * (m as u64);
    LogValue::new(int(3 * m2 + b), int(2 * m2), BigUint::from(m))
}

/// Everything [`report`] computes for one `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub m: u32,
    pub jordan: String,
    /// `false` when `jordan` is only a lower bound for `J(m)`.
    pub jordan_exact: bool,
    pub n_sharp: LogValueJson,
    /// `N(m) = 2m·N_#(m) = N(m, 2m−1)`.
    pub n: LogValueJson,
    /// `Z(m) = N(m, m(m+3)/2)`.
    pub z: LogValueJson,
    /// `m(m+5)/2 · N_#(m)`, the closed form printed alongside `Z(m)`; it
    /// agrees with `N(m, m(m+3)/2)` only at `m = 1`.
    pub z_printed_closed_form: LogValueJson,
    /// `2m(1 + m + J(m))`.
    pub t: String,
    /// `ℓ(U_m) = 2m − 1`.
    pub ell_um: u64,
    /// `ℓ_a(GL_m) = m(m+3)/2`.
    pub ell_a_glm: u64,
    /// `2 + ⌊3m/2⌋`.
    pub generation_threshold: u64,
    /// `⌈N(m)⌉ + 2 + ⌊3m/2⌋`.
    pub sufficient_n_thm_a: String,
    pub b: u64,
    /// `⌈2m²·log₂ m + 3m² + b⌉`.
    pub intro_bound: String,
}

pub fn ell_um(m: u32) -> u64 {
    2 * m as u64 - 1
}

pub fn ell_a_glm(m: u32) -> u64 {
    let m = m as u64;
    m * (m + 3) / 2
}

pub fn generation_threshold(m: u32) -> u64 {
    2 + (3 * m as u64) / 2
}

/// `⌈N(m)⌉ + 2 + ⌊3m/2⌋`.
pub fn sufficient_n(m: u32, policy: &JordanPolicy) -> Result<BigInt, ConstantsError> {
    Ok(n_closed(m, 2 * m - 1, policy)?.ceil() + BigInt::from(generation_threshold(m)))
}

pub fn intro_bound(m: u32, b: u64) -> BigInt {
    intro_bound_value(m, b).ceil()
}

pub fn report(m: u32, policy: &JordanPolicy, b: u64) -> Result<ConstantReport, ConstantsError> {
    if m == 0 {
        return Err(ConstantsError::InvalidArgument { field: "m".into(), reason: "must be at least 1".into() });
    }
    let j = policy.jordan(m)?;
    let ns = n_sharp(m, policy)?;
    let n = ns.scale(&int(2 * m));
    let z = n_closed(m, (ell_a_glm(m)) as u32, policy)?;
    let z_printed = ns.scale(&ratio(m as i64 * (m as i64 + 5), 2));
    let t = BigUint::from(2 * m) * (BigUint::from(1 + m) + &j.value);
    Ok(ConstantReport {
        m,
        jordan: j.value.to_string(),
        jordan_exact: j.exact,
        n_sharp: ns.to_json(),
        n: n.to_json(),
        z: z.to_json(),
        z_printed_closed_form: z_printed.to_json(),
        t: t.to_string(),
        ell_um: ell_um(m),
        ell_a_glm: ell_a_glm(m),
        generation_threshold: generation_threshold(m),
        sufficient_n_thm_a: (n.ceil() + BigInt::from(generation_threshold(m))).to_string(),
        b,
        intro_bound: intro_bound(m, b).to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_sharp_small_m() {
        let p = JordanPolicy::CollinsLargeM;
        let v = n_sharp(1, &p).unwrap();
        assert_eq!(v.cmp_value(&LogValue::rational(ratio(7, 2))), Ordering::Equal);
        assert_eq!(v.ceil(), BigInt::from(4));
        let v = n_sharp(2, &p).unwrap();
        assert_eq!(v.ceil(), BigInt::from(9));
        assert!((v.approx() - (6.0 + 6f64.log2())).abs() < 1e-12);
        assert!(!p.jordan(2).unwrap().exact);
        assert!(p.jordan(71).unwrap().exact);
    }

    #[test]
    fn exact_ties_are_resolved() {
        // 3 + log2(8) = 6 exactly
        let v = LogValue::new(int(3), int(1), BigUint::from(8u32));
        assert!(v.meets(&BigInt::from(6)));
        assert!(!v.meets(&BigInt::from(5)));
        assert_eq!(v.ceil(), BigInt::from(6));
        let a = LogValue::new(int(0), ratio(1, 2), BigUint::from(9u32));
        let b = LogValue::new(int(0), int(1), BigUint::from(9u32)).scale(&ratio(1, 2));
        assert_eq!(a.cmp_value(&b), Ordering::Equal);
        assert_eq!(exact_sign(&int(2), &int(-1), &BigUint::from(4u32)), Ordering::Equal);
        assert_eq!(exact_sign(&int(-2), &int(1), &BigUint::from(5u32)), Ordering::Greater);
    }

    #[test]
    fn report_for_m_1() {
        let r = report(1, &JordanPolicy::CollinsLargeM, 1000).unwrap();
        assert_eq!(r.n.ceil, "7");
        assert_eq!(r.z.rational, "21/2");
        assert_eq!(r.z.ceil, "11");
        assert_eq!(r.z_printed_closed_form.rational, "21/2");
        assert_eq!(r.t, "6");
        assert_eq!((r.ell_um, r.ell_a_glm, r.generation_threshold), (1, 2, 3));
        assert_eq!(r.sufficient_n_thm_a, "10");
    }

    #[test]
    fn jordan_tables() {
        let p = JordanPolicy::from_table_json(r#"{"2": 360, "3": "25920"}"#).unwrap();
        assert_eq!(p.jordan(3).unwrap().value, BigUint::from(25920u32));
        assert!(p.jordan(4).is_err());
        assert_eq!(p.jordan(80).unwrap().value, factorial(81));
        assert!(matches!(JordanPolicy::from_table_json(r#"{"3": 5}"#), Err(ConstantsError::Jordan { m: 3, .. })));
        assert!(JordanPolicy::from_table_json(r#"{"x": 5}"#).is_err());
    }
}
