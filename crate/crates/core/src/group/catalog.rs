//! Small named groups that the group DSL has no family for.
//!
//! Both are built as inline Cayley tables; matching JSON files live under
//! `data/` for use with `cayley:`.

use super::{CayleySource, CayleyTable, FiniteGroup, GroupSpec};

/// Dihedral group of order `2n`: id `a + n·b` is `r^a s^b`.
pub fn dihedral(n: u32) -> FiniteGroup {
    assert!(n >= 1, "dihedral group needs n >= 1");
    let k = 2 * n as usize;
    let n = n as usize;
    let mut table = vec![vec![0u32; k]; k];
    for (x, row) in table.iter_mut().enumerate() {
        let (a, b) = (x % n, x / n);
        for (y, cell) in row.iter_mut().enumerate() {
            let (c, d) = (y % n, y / n);
            // s r^c = r^{-c} s
            let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
            *cell = (rot + n * ((b + d) % 2)) as u32;
        }
    }
    let names = (0..k)
        .map(|x| {
            let (a, b) = (x % n, x / n);
            match (a, b) {
                (0, 0) => "1".to_string(),
                (a, 0) => format!("r{a}"),
                (0, _) => "s".to_string(),
                (a, _) => format!("r{a}s"),
            }
        })
        .collect();
    from_table(&format!("D{n}"), CayleyTable { order: k, table, names: Some(names) })
}

/// Quaternion group `Q_8`, ids `1, -1, i, -i, j, -j, k, -k`.
pub fn quaternion() -> FiniteGroup {
    // unit index 0..4 = 1,i,j,k; product of units as (sign, unit)
    const UNIT: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let mut table = vec![vec![0u32; 8]; 8];
    for (x, row) in table.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            let (neg, u) = UNIT[x / 2][y / 2];
            let sign = (x % 2 == 1) ^ (y % 2 == 1) ^ neg;
            *cell = (2 * u + usize::from(sign)) as u32;
        }
    }
    let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"].map(String::from).to_vec();
    from_table("Q8", CayleyTable { order: 8, table, names: Some(names) })
}

/// Looks up a catalog group by name (`D4`, `Q8`, `D<n>`).
pub fn by_name(name: &str) -> Option<FiniteGroup> {
    match name {
        "Q8" => Some(quaternion()),
        _ => name.strip_prefix('D')?.parse().ok().filter(|&n| n >= 1).map(dihedral),
    }
}

/// Cayley-table JSON layout of any group small enough to tabulate.
pub fn cayley_table(g: &FiniteGroup) -> CayleyTable {
    let table = g.elements().map(|a| g.elements().map(|b| g.mul(a, b)).collect()).collect();
    let names = Some(g.elements().map(|e| g.name(e)).collect());
    CayleyTable { order: g.order(), table, names }
}

fn from_table(label: &str, table: CayleyTable) -> FiniteGroup {
    let spec = GroupSpec::Cayley(CayleySource::Inline { label: label.into(), table });
    FiniteGroup::build(&spec).expect("catalog tables are valid groups")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d4_has_five_involutions_and_q8_one() {
        let d4 = dihedral(4);
        assert_eq!(d4.order(), 8);
        assert_eq!(d4.elements().filter(|&e| d4.element_order(e) == 2).count(), 5);
        let q8 = quaternion();
        assert_eq!(q8.elements().filter(|&e| q8.element_order(e) == 2).count(), 1);
        assert_eq!(q8.elements().filter(|&e| q8.element_order(e) == 4).count(), 6);
        assert!(!d4.is_abelian() && !q8.is_abelian());
    }

    #[test]
    fn shipped_json_matches_builders() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
        for (file, g) in [("d4.json", dihedral(4)), ("q8.json", quaternion())] {
            let spec: GroupSpec = format!("cayley:{dir}/{file}").parse().unwrap();
            let loaded = FiniteGroup::build(&spec).unwrap();
            assert_eq!(cayley_table(&loaded), cayley_table(&g), "{file}");
        }
    }
}
