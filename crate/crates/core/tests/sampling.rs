use nielsen_lab::group::{closure, Element, FiniteGroup};
use nielsen_lab::nielsen::{orbit, Tuple};
use nielsen_lab::sampling::{default_start, invariance_check, walk, WalkConfig};

fn all_tuples(order: usize, n: usize) -> Vec<Tuple> {
    (0..order.pow(n as u32))
        .map(|mut c| {
            Tuple(
                (0..n)
                    .map(|_| {
                        let x = (c % order) as Element;
                        c /= order;
                        x
                    })
                    .collect(),
            )
        })
        .collect()
}

fn s3_walk(seed: u64, steps: u64) -> f64 {
    let g = FiniteGroup::parse("sym:3").unwrap();
    let mut cfg = WalkConfig::new(default_start(&g, 3).unwrap(), steps, seed);
    cfg.burn_in = 1_000;
    walk(&g, &cfg, 1 << 20).unwrap().tv
}

#[test]
fn z2_pairs_mix_over_three_tuples() {
    let g = FiniteGroup::parse("cyc:2").unwrap();
    let r = walk(&g, &WalkConfig::new(Tuple(vec![1, 0]), 100_000, 1), 1 << 20).unwrap();
    assert_eq!(r.orbit_size, 3);
    assert_eq!(r.degrees_of_freedom, 2);
    assert!(r.tv < 0.05, "{}", r.tv);
    assert_eq!(r.coverage, 1.0);
    assert!(!r.approximate);
}

#[test]
fn s3_triples_mix_over_all_generating_triples() {
    let g = FiniteGroup::parse("sym:3").unwrap();
    let generating = all_tuples(6, 3).into_iter().filter(|t| closure(&g, &t.0, false).order() == 6).count();
    assert_eq!(generating, 168);
    let mut cfg = WalkConfig::new(default_start(&g, 3).unwrap(), 1_000_000, 42);
    cfg.chains = 4;
    let r = walk(&g, &cfg, 1 << 20).unwrap();
    assert_eq!(r.orbit_size, 168);
    assert!(r.tv < 0.05, "{}", r.tv);
    assert_eq!(r.counts.iter().map(|c| c.count).sum::<u64>(), cfg.steps - cfg.burn_in);
    // consecutive samples are correlated, which inflates the statistic by
    // roughly the autocorrelation time of the chain
    assert!(r.chi_square / (r.degrees_of_freedom as f64) < 20.0, "{}", r.chi_square);
}

#[test]
fn the_walk_never_leaves_the_orbit() {
    let g = FiniteGroup::parse("lamp:3,2").unwrap();
    let start = default_start(&g, 2).unwrap();
    let o = orbit(&g, &start, 1 << 20).unwrap();
    let r = walk(&g, &WalkConfig::new(start, 50_000, 3), 1 << 20).unwrap();
    assert!(r.counts.iter().all(|c| o.contains(&c.tuple)));
    assert_eq!(r.orbit_size, o.len() as u64);
}

#[test]
fn identity_start_stays_put() {
    let g = FiniteGroup::parse("sym:4").unwrap();
    let r = walk(&g, &WalkConfig::new(Tuple::identity(3), 10_000, 0), 1 << 20).unwrap();
    assert_eq!(r.orbit_size, 1);
    assert_eq!(r.tv, 0.0);
    assert_eq!(r.counts.len(), 1);
}

#[test]
fn capped_orbits_are_flagged() {
    let g = FiniteGroup::parse("sym:4").unwrap();
    let r = walk(&g, &WalkConfig::new(default_start(&g, 3).unwrap(), 5_000, 0), 50).unwrap();
    assert!(r.approximate);
    assert_eq!(r.orbit_size, r.visited);
}

#[test]
fn longer_walks_are_closer_to_uniform() {
    let closer = (0..20).filter(|&s| s3_walk(s, 1_000_000) < s3_walk(s, 10_000)).count();
    assert!(closer >= 18, "{closer}");
}

#[test]
fn uniform_measures_on_orbits_are_invariant() {
    for s in ["sym:3", "sym:4", "cyc:6", "ab:2,2", "ab:3,3", "D4", "Q8", "lamp:3,2", "gl:2,3"] {
        let g = FiniteGroup::parse(s).unwrap();
        let start = default_start(&g, 2.max(nielsen_lab::invariants::rank(&g).0 as usize)).unwrap();
        let o = orbit(&g, &start, 1 << 22).unwrap();
        assert!(o.complete);
        let w = 1.0 / o.len() as f64;
        let dist: Vec<(Tuple, f64)> = o.tuples().map(|t| (t, w)).collect();
        assert_eq!(invariance_check(&g, start.len(), &dist), 0.0, "{s}");
    }
    let z6 = FiniteGroup::parse("cyc:6").unwrap();
    let hom: Vec<(Tuple, f64)> = all_tuples(6, 2).into_iter().map(|t| (t, 1.0)).collect();
    assert_eq!(invariance_check(&z6, 2, &hom), 0.0);
    let z2 = FiniteGroup::parse("cyc:2").unwrap();
    let epi: Vec<(Tuple, f64)> = [[1, 0], [0, 1], [1, 1]].iter().map(|t| (Tuple(t.to_vec()), 1.0)).collect();
    assert_eq!(invariance_check(&z2, 2, &epi), 0.0);
}
