use std::fs;

use nielsen_lab::constants::{report as constants_report, ConstantsError, JordanPolicy};
use nielsen_lab::group::{closure, FiniteGroup, GroupError};
use nielsen_lab::invariants::{self, rank, subgroup_rank, InvariantError};
use nielsen_lab::lattice::{enumerate, LatticeError, SubgroupLattice, DEFAULT_BUDGET};
use nielsen_lab::nielsen::{classify, is_redundant, MoveSeq, NielsenError, Redundancy, Tuple};
use nielsen_lab::normalize::{
    canonicalize_epi, dunwoody_abelian, exseq_redundancy, jordan_canonical, jordan_form, CanonicalForm,
    ExactSequenceData, NormalizeError,
};
use nielsen_lab::sampling::{default_start, walk, SamplingError, WalkConfig};
use nielsen_lab::symplectic::{is_symplectic, sp_reduce, stabilize, vector_json, AbelianVector, SymplecticError};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::output::{to_value, CliError, Output, EXIT_INVALID};
use crate::{Cli, Command, Mode};

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        CliError::invalid(e)
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match &e {
            LatticeError::TooLarge { .. } => CliError::budget(&e, None),
            LatticeError::Budget { found, .. } => {
                let members: Vec<&[u32]> = found.iter().map(|h| h.members()).collect();
                CliError::budget(&e, Some(json!({"partial": true, "subgroups_found": members})))
            }
        }
    }
}

impl From<NielsenError> for CliError {
    fn from(e: NielsenError) -> Self {
        match e {
            NielsenError::Budget { .. } => CliError::budget(e, None),
            other => CliError::invalid(other),
        }
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        let InvariantError::Budget { lower_bound, .. } = &e;
        let partial = json!({"partial": true, "lower_bound": lower_bound});
        CliError::budget(&e, Some(partial))
    }
}

impl From<NormalizeError> for CliError {
    fn from(e: NormalizeError) -> Self {
        match e {
            NormalizeError::Nielsen(n) => n.into(),
            NormalizeError::Lattice(l) => l.into(),
            NormalizeError::Invariants(i) => i.into(),
            other => CliError::invalid(other),
        }
    }
}

impl From<SamplingError> for CliError {
    fn from(e: SamplingError) -> Self {
        match e {
            SamplingError::Nielsen(n) => n.into(),
            other => CliError::invalid(other),
        }
    }
}

impl From<ConstantsError> for CliError {
    fn from(e: ConstantsError) -> Self {
        CliError::invalid(e)
    }
}

impl From<SymplecticError> for CliError {
    fn from(e: SymplecticError) -> Self {
        CliError::invalid(e)
    }
}

fn lattice(g: &FiniteGroup, cli: &Cli, budget: usize) -> Result<SubgroupLattice, CliError> {
    Ok(enumerate(g, cli.global.max_order, budget)?)
}

fn parse_list<T: std::str::FromStr>(field: &str, s: &str) -> Result<Vec<T>, CliError> {
    s.split([',', ';'])
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| CliError::invalid(format!("--{field}: cannot parse `{x}`"))))
        .collect()
}

fn parse_steps(s: &str) -> Result<u64, CliError> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 1.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(x as u64),
        _ => Err(CliError::invalid(format!("--steps: `{s}` is not a positive integer"))),
    }
}

fn canonical_json(cf: &CanonicalForm) -> Result<Value, CliError> {
    let mut v = to_value(cf)?;
    v["witness_length"] = json!(cf.witness.len());
    Ok(v)
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Invariants { group, skip, budget } => {
            let g = FiniteGroup::parse(group)?;
            let l = lattice(&g, cli, DEFAULT_BUDGET)?;
            let r = invariants::report(&g, &l, skip.is_some(), *budget)?;
            Ok(Output::ok(to_value(&r)?))
        }
        Command::Lattice { group, budget } => {
            let g = FiniteGroup::parse(group)?;
            let l = lattice(&g, cli, *budget)?;
            let mut v = to_value(&l.export())?;
            v["group"] = json!(g.to_string());
            v["order"] = json!(g.order());
            Ok(Output::ok(v))
        }
        Command::Orbits { group, n } => {
            let g = FiniteGroup::parse(group)?;
            let l = lattice(&g, cli, DEFAULT_BUDGET)?;
            let r = classify(&g, *n, &l, cli.global.cap)?;
            let mut v = to_value(&r)?;
            v["orbit_count"] = json!(r.orbits.len());
            Ok(Output::ok(v))
        }
        Command::Redundant { group, tuple, k } => {
            let g = FiniteGroup::parse(group)?;
            let t = Tuple::parse(&g, tuple)?;
            let r = is_redundant(&g, &t, *k, cli.global.cap)?;
            let mut v = to_value(&r)?;
            v["source"] = to_value(&t)?;
            v["k"] = json!(k);
            let code = if matches!(r, Redundancy::Indeterminate { .. }) { crate::output::EXIT_BUDGET } else { 0 };
            Ok(Output { report: v, code })
        }
        Command::Normalize { group, tuple, mode } => normalize(cli, group, tuple, *mode),
        Command::VerifyWitness { group, tuple, witness } => verify_witness(group, tuple.as_deref(), witness),
        Command::Constants { m, jordan, b } => {
            let policy = match jordan {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| CliError::invalid(format!("--jordan {}: {e}", path.display())))?;
                    JordanPolicy::from_table_json(&text)?
                }
                None => JordanPolicy::default(),
            };
            Ok(Output::ok(to_value(&constants_report(*m, &policy, *b)?)?))
        }
        Command::SpReduce { g, w } => {
            let w: Vec<BigInt> = parse_list("w", w)?;
            if w.len() != 2 * g {
                return Err(CliError::invalid(format!("--w needs 2g = {} entries, got {}", 2 * g, w.len())));
            }
            let m = sp_reduce(&w)?;
            let image = m.apply(&w);
            let maps = image.iter().enumerate().all(|(i, x)| *x == BigInt::from((i == 0) as u8));
            Ok(Output::ok(json!({
                "g": g,
                "w": vector_json(&w),
                "matrix": m.to_json(),
                "image": vector_json(&image),
                "check": {"symplectic": is_symplectic(m.rows()), "maps_to_u1": maps},
            })))
        }
        Command::Stabilize { g, moduli, v } => {
            let moduli: Vec<u64> = parse_list("moduli", moduli)?;
            let flat: Vec<u64> = parse_list("v", v)?;
            let r = moduli.len();
            if r == 0 || flat.len() != 2 * g * r {
                return Err(CliError::invalid(format!("--v needs 2g·r = {} residues, got {}", 2 * g * r, flat.len())));
            }
            let entries = flat.chunks(r).map(<[u64]>::to_vec).collect();
            let v = AbelianVector::new(moduli, entries)?;
            let (m, out) = stabilize(&v)?;
            let recomputed = v.transform(m.rows());
            Ok(Output::ok(json!({
                "g": g,
                "moduli": v.moduli,
                "v": v.entries,
                "matrix": m.to_json(),
                "stabilized": out.entries,
                "check": {
                    "symplectic": is_symplectic(m.rows()),
                    "last_pair_zero": out.last_pair_is_zero(),
                    "recomputed_matches": recomputed == out,
                },
            })))
        }
        Command::Walk { group, n, steps, burn_in, laziness, chains, start, no_counts } => {
            let g = FiniteGroup::parse(group)?;
            let start = match start {
                Some(s) => Tuple::parse(&g, s)?,
                None => default_start(&g, *n)?,
            };
            if start.len() != *n {
                return Err(CliError::invalid(format!("--start has {} entries but --n is {n}", start.len())));
            }
            let mut cfg = WalkConfig::new(start, parse_steps(steps)?, cli.global.seed);
            if let Some(b) = burn_in {
                cfg.burn_in = *b;
            }
            cfg.laziness = *laziness;
            cfg.chains = *chains;
            let mut r = walk(&g, &cfg, cli.global.cap)?;
            if *no_counts {
                r.counts.clear();
            }
            Ok(Output::ok(to_value(&r)?))
        }
    }
}

fn normalize(cli: &Cli, group: &str, tuple: &str, mode: Mode) -> Result<Output, CliError> {
    let g = FiniteGroup::parse(group)?;
    let t = Tuple::parse(&g, tuple)?;
    let v = match mode {
        Mode::Epi => {
            if closure(&g, &t.0, false).order() != g.order() {
                return Err(CliError::invalid("--mode epi needs a tuple generating the whole group"));
            }
            let (_, targets) = rank(&g);
            canonical_json(&canonicalize_epi(&g, &t, &targets)?)?
        }
        Mode::Abelian => {
            let h = t.image(&g);
            if !invariants::is_abelian_subgroup(&g, &h) {
                return Err(CliError::invalid("--mode abelian needs a tuple with abelian image"));
            }
            let (_, targets) = subgroup_rank(&g, &h);
            canonical_json(&dunwoody_abelian(&g, &t, &targets)?)?
        }
        Mode::Exseq => {
            let l = lattice(&g, cli, DEFAULT_BUDGET)?;
            let data = ExactSequenceData::largest_abelian_kernel(&g, &l)?;
            let witness = exseq_redundancy(&g, &t, &data)?;
            let target = witness.replay(&g, &t)?;
            let mut v = canonical_json(&CanonicalForm { source: t.clone(), target, witness })?;
            v["exact_sequence"] = to_value(&data.summary())?;
            v
        }
        Mode::Jordan => {
            let l = lattice(&g, cli, DEFAULT_BUDGET)?;
            let data = ExactSequenceData::largest_abelian_kernel(&g, &l)?;
            let cf = jordan_canonical(&g, &t, &data)?;
            debug_assert_eq!(cf.target, jordan_form(&g, &t.image(&g), &data, t.len()));
            let mut v = canonical_json(&cf)?;
            v["exact_sequence"] = to_value(&data.summary())?;
            v
        }
    };
    Ok(Output::ok(v))
}

/// Looks for `key` at the top level, then inside a `report` envelope.
fn lookup<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    v.get(key).or_else(|| v.get("report").and_then(|r| r.get(key)))
}

fn verify_witness(group: &str, tuple: Option<&str>, path: &std::path::Path) -> Result<Output, CliError> {
    let g = FiniteGroup::parse(group)?;
    let text = fs::read_to_string(path).map_err(|e| CliError::invalid(format!("--witness {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("--witness: {e}")))?;
    let moves_json = if doc.is_array() { Some(&doc) } else { lookup(&doc, "witness") };
    let moves: MoveSeq = match moves_json {
        Some(m) => serde_json::from_value(m.clone()).map_err(|e| CliError::invalid(format!("--witness: {e}")))?,
        None => return Err(CliError::invalid("--witness: no move list found")),
    };
    let source = match tuple {
        Some(s) => Tuple::parse(&g, s)?,
        None => match lookup(&doc, "source") {
            Some(s) => {
                let t: Tuple = serde_json::from_value(s.clone()).map_err(|e| CliError::invalid(format!("source: {e}")))?;
                Tuple::new(&g, t.0)?
            }
            None => return Err(CliError::invalid("no --tuple given and the witness file records no source")),
        },
    };
    let declared: Option<Tuple> = lookup(&doc, "target")
        .or_else(|| lookup(&doc, "endpoint"))
        .map(|v| serde_json::from_value(v.clone()))
        .transpose()
        .map_err(|e| CliError::invalid(format!("declared endpoint: {e}")))?;
    let replay = moves.replay_checked(&g, &source);
    let (endpoint, reason) = match &replay {
        Ok(end) => (Some(end.clone()), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let matches = match (&endpoint, &declared) {
        (Some(e), Some(d)) => Some(e == d),
        _ => None,
    };
    let valid = endpoint.is_some() && matches != Some(false);
    let report = json!({
        "valid": valid,
        "source": source,
        "moves": moves.len(),
        "endpoint": endpoint,
        "declared_endpoint": declared,
        "matches_declared_endpoint": matches,
        "image_order": source.image(&g).order(),
        "reason": reason.or_else(|| (matches == Some(false)).then(|| "endpoint differs from the declared one".into())),
    });
    Ok(Output { report, code: if valid { 0 } else { EXIT_INVALID } })
}
