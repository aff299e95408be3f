//! The lazy product-replacement walk on tuples and its distance to the
//! uniform distribution on the orbit.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::FiniteGroup;
use crate::invariants::rank;
use crate::nielsen::{orbit, NielsenError, NielsenMove, Tuple, TupleCodec};

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("invalid {field}: {reason}")]
    InvalidConfig { field: String, reason: String },
    #[error(transparent)]
    Nielsen(#[from] NielsenError),
}

fn invalid(field: &str, reason: impl Into<String>) -> SamplingError {
    SamplingError::InvalidConfig { field: field.into(), reason: reason.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub start: Tuple,
    /// Total steps per report, burn-in included.
    pub steps: u64,
    pub burn_in: u64,
    pub seed: u64,
    /// Probability of staying put at each step.
    pub laziness: f64,
    /// Independent chains, each on its own stream of the seed; the
    /// recorded steps are split between them.
    pub chains: u32,
}

impl WalkConfig {
    pub fn new(start: Tuple, steps: u64, seed: u64) -> Self {
        Self { start, steps, burn_in: steps / 10, seed, laziness: 0.5, chains: 1 }
    }

    pub fn n(&self) -> usize {
        self.start.len()
    }

    fn validate(&self) -> Result<(), SamplingError> {
        if self.start.is_empty() {
            return Err(invalid("start", "tuple must be non-empty"));
        }
        if self.steps <= self.burn_in {
            return Err(invalid("steps", "must exceed burn-in"));
        }
        if !(0.0..1.0).contains(&self.laziness) {
            return Err(invalid("laziness", "must lie in [0, 1)"));
        }
        if self.chains == 0 {
            return Err(invalid("chains", "need at least one chain"));
        }
        Ok(())
    }
}

/// A generating tuple of length `n` built from a minimal generating set
/// padded with the identity.
pub fn default_start(g: &FiniteGroup, n: usize) -> Result<Tuple, SamplingError> {
    let (d, gens) = rank(g);
    if n < d as usize || n == 0 {
        return Err(invalid("n", format!("the group needs {d} generators")));
    }
    let mut t = gens;
    t.resize(n, 0);
    Ok(Tuple(t))
}

/// Every legal `(kind, i, j)`: unordered swaps, inversions and both right
/// multiplications with `i ≠ j`. Each move's inverse is in the list, so
/// the uniform distribution on an orbit is stationary.
pub fn walk_moves(n: usize) -> Vec<NielsenMove> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(NielsenMove::Swap(i, j));
        }
    }
    out.extend((0..n).map(NielsenMove::Invert));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.push(NielsenMove::RightMul(i, j));
                out.push(NielsenMove::RightMulInv(i, j));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleCount {
    pub tuple: Tuple,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixReport {
    pub n: usize,
    pub start: Tuple,
    pub steps: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub laziness: f64,
    pub chains: u32,
    /// Sorted by tuple; sums to `steps - burn_in`.
    pub counts: Vec<TupleCount>,
    /// Size of the reference support: the orbit, or the visited set when
    /// `approximate`.
    pub orbit_size: u64,
    pub visited: u64,
    pub tv: f64,
    pub chi_square: f64,
    pub degrees_of_freedom: u64,
    pub coverage: f64,
    /// The orbit cap stopped enumeration; statistics are against the
    /// uniform distribution on visited tuples.
    pub approximate: bool,
}

fn run_chain(g: &FiniteGroup, cfg: &WalkConfig, stream: u64, burn_in: u64, recorded: u64) -> HashMap<u128, u64> {
    let codec = TupleCodec::new(g.order(), cfg.n()).expect("validated arity");
    let moves = walk_moves(cfg.n());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut cur = cfg.start.0.clone();
    let mut counts = HashMap::new();
    for step in 0..burn_in + recorded {
        if !rng.gen_bool(cfg.laziness) {
            moves[rng.gen_range(0..moves.len())].apply_in_place(g, &mut cur);
        }
        if step >= burn_in {
            *counts.entry(codec.encode(&cur)).or_insert(0) += 1;
        }
    }
    counts
}

/// Runs the lazy walk and compares its empirical distribution with the
/// uniform one on the orbit of the start tuple, enumerated up to `cap`
/// states.
pub fn walk(g: &FiniteGroup, cfg: &WalkConfig, cap: u64) -> Result<MixReport, SamplingError> {
    cfg.validate()?;
    let start = Tuple::new(g, cfg.start.0.clone())?;
    let codec = TupleCodec::new(g.order(), cfg.n())?;
    let recorded = cfg.steps - cfg.burn_in;
    let chains = cfg.chains as u64;
    let merged = (0..chains)
        .into_par_iter()
        .map(|k| {
            let share = recorded / chains + u64::from(k < recorded % chains);
            run_chain(g, cfg, k, cfg.burn_in, share)
        })
        .reduce(HashMap::new, |mut a, b| {
            for (c, x) in b {
                *a.entry(c).or_insert(0) += x;
            }
            a
        });
    let orb = orbit(g, &start, cap)?;
    let approximate = !orb.complete;
    let support: Vec<u128> = if approximate {
        let mut v: Vec<u128> = merged.keys().copied().collect();
        v.sort_unstable();
        v
    } else {
        orb.codes.clone()
    };
    let size = support.len() as f64;
    let total = recorded as f64;
    let expected = total / size;
    let (mut tv, mut chi) = (0.0, 0.0);
    for c in &support {
        let x = merged.get(c).copied().unwrap_or(0) as f64;
        tv += (x / total - 1.0 / size).abs();
        chi += (x - expected).powi(2) / expected;
    }
    let mut counts: Vec<TupleCount> =
        merged.iter().map(|(&c, &count)| TupleCount { tuple: codec.decode(c), count }).collect();
    counts.sort_by(|a, b| a.tuple.cmp(&b.tuple));
    Ok(MixReport {
        n: cfg.n(),
        start,
        steps: cfg.steps,
        burn_in: cfg.burn_in,
        seed: cfg.seed,
        laziness: cfg.laziness,
        chains: cfg.chains,
        orbit_size: support.len() as u64,
        visited: merged.len() as u64,
        tv: (tv / 2.0).min(1.0),
        chi_square: chi,
        degrees_of_freedom: support.len() as u64 - 1,
        coverage: merged.len() as f64 / size,
        approximate,
        counts,
    })
}

/// The largest total-variation distance between `dist` and its
/// pushforward under a single legal move. Weights are normalized first.
pub fn invariance_check(g: &FiniteGroup, n: usize, dist: &[(Tuple, f64)]) -> f64 {
    let total: f64 = dist.iter().map(|(_, w)| w).sum();
    if n == 0 || total <= 0.0 {
        return 0.0;
    }
    let codec = TupleCodec::new(g.order(), n).expect("arity fits");
    let mut p: HashMap<u128, f64> = HashMap::new();
    for (t, w) in dist {
        *p.entry(codec.encode(&t.0)).or_insert(0.0) += w / total;
    }
    let mut buf = vec![0; n];
    walk_moves(n)
        .into_iter()
        .map(|mv| {
            let mut q: HashMap<u128, f64> = HashMap::with_capacity(p.len());
            for (&c, &w) in &p {
                codec.decode_into(c, &mut buf);
                mv.apply_in_place(g, &mut buf);
                *q.entry(codec.encode(&buf)).or_insert(0.0) += w;
            }
            let mut d: f64 = p.iter().map(|(c, w)| (w - q.get(c).copied().unwrap_or(0.0)).abs()).sum();
            d += q.iter().filter(|(c, _)| !p.contains_key(c)).map(|(_, w)| w).sum::<f64>();
            d / 2.0
        })
        .fold(0.0, f64::max)
}
