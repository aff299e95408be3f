//! The group-spec DSL.
//!
//! ```text
//! sym:n | cyc:N | ab:d1,d2,... | gl:r,q | sl:r,q | lamp:r,q
//!       | prod(spec;spec;...) | cayley:path.json
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GroupError;

/// Cayley table in the on-disk JSON layout: `table[i][j] = i·j`, id 0 is the
/// identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyTable {
    pub order: usize,
    pub table: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CayleySource {
    Path(PathBuf),
    /// Built in code; `label` is used for display only.
    Inline { label: String, table: CayleyTable },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Symmetric { n: u32 },
    Cyclic { n: u32 },
    Abelian { moduli: Vec<u32> },
    GeneralLinear { r: u32, q: u32 },
    SpecialLinear { r: u32, q: u32 },
    Lamplighter { r: u32, q: u32 },
    DirectProduct(Vec<GroupSpec>),
    Cayley(CayleySource),
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Symmetric { n } => write!(f, "sym:{n}"),
            GroupSpec::Cyclic { n } => write!(f, "cyc:{n}"),
            GroupSpec::Abelian { moduli } => {
                let parts: Vec<String> = moduli.iter().map(u32::to_string).collect();
                write!(f, "ab:{}", parts.join(","))
            }
            GroupSpec::GeneralLinear { r, q } => write!(f, "gl:{r},{q}"),
            GroupSpec::SpecialLinear { r, q } => write!(f, "sl:{r},{q}"),
            GroupSpec::Lamplighter { r, q } => write!(f, "lamp:{r},{q}"),
            GroupSpec::DirectProduct(parts) => {
                let parts: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "prod({})", parts.join(";"))
            }
            GroupSpec::Cayley(CayleySource::Path(p)) => write!(f, "cayley:{}", p.display()),
            GroupSpec::Cayley(CayleySource::Inline { label, .. }) => write!(f, "{label}"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s.trim()).map_err(|reason| GroupError::Parse { input: s.to_string(), reason })
    }
}

fn parse(s: &str) -> Result<GroupSpec, String> {
    if let Some(inner) = s.strip_prefix("prod(") {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| "unterminated prod(...)".to_string())?;
        let parts = split_top_level(inner)?;
        if parts.is_empty() {
            return Err("prod(...) needs at least one factor".into());
        }
        let factors = parts.into_iter().map(|p| parse(p.trim())).collect::<Result<_, _>>()?;
        return Ok(GroupSpec::DirectProduct(factors));
    }
    let (head, rest) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `family:params`, got `{s}`"))?;
    if head == "cayley" {
        if rest.is_empty() {
            return Err("cayley: needs a path".into());
        }
        return Ok(GroupSpec::Cayley(CayleySource::Path(PathBuf::from(rest))));
    }
    let nums: Vec<u32> = rest
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| format!("`{t}` is not a non-negative integer")))
        .collect::<Result<_, _>>()?;
    let want = |k: usize| -> Result<(), String> {
        if nums.len() == k {
            Ok(())
        } else {
            Err(format!("`{head}` takes {k} parameter(s), got {}", nums.len()))
        }
    };
    Ok(match head {
        "sym" => {
            want(1)?;
            GroupSpec::Symmetric { n: nums[0] }
        }
        "cyc" => {
            want(1)?;
            GroupSpec::Cyclic { n: nums[0] }
        }
        "ab" => GroupSpec::Abelian { moduli: nums },
        "gl" => {
            want(2)?;
            GroupSpec::GeneralLinear { r: nums[0], q: nums[1] }
        }
        "sl" => {
            want(2)?;
            GroupSpec::SpecialLinear { r: nums[0], q: nums[1] }
        }
        "lamp" => {
            want(2)?;
            GroupSpec::Lamplighter { r: nums[0], q: nums[1] }
        }
        other => return Err(format!("unknown group family `{other}`")),
    })
}

fn split_top_level(s: &str) -> Result<Vec<&str>, String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced parentheses".into());
                }
            }
            ';' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced parentheses".into());
    }
    parts.push(&s[start..]);
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_family() {
        assert_eq!("sym:4".parse::<GroupSpec>().unwrap(), GroupSpec::Symmetric { n: 4 });
        assert_eq!("cyc:6".parse::<GroupSpec>().unwrap(), GroupSpec::Cyclic { n: 6 });
        assert_eq!(
            "ab:2,2,3".parse::<GroupSpec>().unwrap(),
            GroupSpec::Abelian { moduli: vec![2, 2, 3] }
        );
        assert_eq!("gl:2,3".parse::<GroupSpec>().unwrap(), GroupSpec::GeneralLinear { r: 2, q: 3 });
        assert_eq!("sl:2,5".parse::<GroupSpec>().unwrap(), GroupSpec::SpecialLinear { r: 2, q: 5 });
        assert_eq!("lamp:3,2".parse::<GroupSpec>().unwrap(), GroupSpec::Lamplighter { r: 3, q: 2 });
        assert_eq!(
            "cayley:data/q8.json".parse::<GroupSpec>().unwrap(),
            GroupSpec::Cayley(CayleySource::Path("data/q8.json".into()))
        );
    }

    #[test]
    fn nested_products_round_trip_through_display() {
        let s = "prod(cyc:2;prod(sym:3;ab:2,2))";
        let spec: GroupSpec = s.parse().unwrap();
        match &spec {
            GroupSpec::DirectProduct(f) => assert_eq!(f.len(), 2),
            _ => panic!("expected product"),
        }
        assert_eq!(spec.to_string(), s);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["sym", "sym:", "sym:3,4", "foo:3", "prod(cyc:2", "gl:2", "cyc:x", "prod()"] {
            assert!(bad.parse::<GroupSpec>().is_err(), "{bad} should fail");
        }
    }
}
