//! Line-oriented presentation configs and the built-in presets.
//!
//! ```text
//! generators: a b c d
//! involutions: a:A b:B      # optional explicit inverse names
//! self: a                   # order-2 generators (single self-inverse letter)
//! orders: b=3
//! relators: abABcdCD
//! letter_order: a A b B c C d D
//! delta: 2                  # optional hyperbolicity override
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::alphabet::Alphabet;
use super::oracle::{Family, GroupOracle};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Everything needed to rebuild an oracle; stored in serialized balls.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationSpec {
    pub generators: String,
    pub alphabet: Alphabet,
    pub family: Family,
}

impl PresentationSpec {
    pub fn of(oracle: &GroupOracle) -> Self {
        let a = oracle.alphabet();
        PresentationSpec {
            generators: oracle
                .generators()
                .iter()
                .map(|&(p, _)| a.symbol(p))
                .collect(),
            alphabet: a.clone(),
            family: oracle.family().clone(),
        }
    }

    pub fn build(&self) -> Result<GroupOracle> {
        let gens: Vec<char> = self.generators.chars().collect();
        GroupOracle::new(self.alphabet.clone(), &gens, self.family.clone())
    }
}

/// A parsed presentation config.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub oracle: GroupOracle,
    pub delta_override: Option<Rational>,
}

impl Presentation {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg = |m: String| Error::Config(m);
        let mut fields: HashMap<String, String> = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| cfg(format!("line {}: expected `key: value`", n + 1)))?;
            let k = k.trim().to_string();
            if !matches!(
                k.as_str(),
                "generators"
                    | "involutions"
                    | "self"
                    | "orders"
                    | "relators"
                    | "letter_order"
                    | "delta"
            ) {
                return Err(cfg(format!("line {}: unknown key {k:?}", n + 1)));
            }
            if fields.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(cfg(format!("duplicate key {k:?}")));
            }
        }
        let words = |k: &str| -> Vec<String> {
            fields
                .get(k)
                .map(|v| v.split_whitespace().map(str::to_string).collect())
                .unwrap_or_default()
        };
        let single = |s: &str| -> Result<char> {
            let mut it = s.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(Error::Config(format!(
                    "expected a single letter, got {s:?}"
                ))),
            }
        };

        let gens: Vec<char> = words("generators")
            .iter()
            .map(|s| single(s))
            .collect::<Result<_>>()?;
        if gens.is_empty() {
            return Err(cfg("missing `generators`".into()));
        }
        let selfs: Vec<char> = words("self")
            .iter()
            .map(|s| single(s))
            .collect::<Result<_>>()?;
        let mut inverse_of: HashMap<char, char> = HashMap::new();
        for pair in words("involutions") {
            let (g, i) = pair
                .split_once(':')
                .ok_or_else(|| cfg(format!("bad involution {pair:?}")))?;
            inverse_of.insert(single(g)?, single(i)?);
        }
        let mut orders: HashMap<char, u32> = HashMap::new();
        for o in words("orders") {
            let (g, m) = o
                .split_once('=')
                .ok_or_else(|| cfg(format!("bad order {o:?}")))?;
            let m: u32 = m.parse().map_err(|_| cfg(format!("bad order {o:?}")))?;
            orders.insert(single(g)?, m);
        }
        for &s in &selfs {
            match orders.get(&s) {
                Some(&m) if m != 2 => {
                    return Err(cfg(format!("self-inverse {s:?} must have order 2")))
                }
                _ => {
                    orders.insert(s, 2);
                }
            }
        }
        for (&g, &m) in &orders {
            if !gens.contains(&g) {
                return Err(cfg(format!("order given for unknown generator {g:?}")));
            }
            if m == 2 && !selfs.contains(&g) && !inverse_of.contains_key(&g) {
                // order 2 implies a single self-inverse letter
            }
        }

        let mut pairs = Vec::new();
        for &g in &gens {
            if orders.get(&g) == Some(&2) {
                pairs.push((g, g));
            } else {
                let inv = match inverse_of.get(&g) {
                    Some(&i) => i,
                    None => {
                        let mut up = g.to_uppercase();
                        match (up.next(), up.next()) {
                            (Some(u), None) if u != g => u,
                            _ => return Err(cfg(format!("no inverse name for {g:?}"))),
                        }
                    }
                };
                pairs.push((g, inv));
                pairs.push((inv, g));
            }
        }
        let mut alphabet = Alphabet::new(pairs)?;
        let order = words("letter_order");
        if !order.is_empty() {
            let order: Vec<char> = order.iter().map(|s| single(s)).collect::<Result<_>>()?;
            alphabet = alphabet.reordered(&order)?;
        }

        let relators = words("relators");
        let family = if !relators.is_empty() {
            if !orders.is_empty() {
                return Err(cfg("relators cannot be combined with orders".into()));
            }
            Family::SmallCancellation { relators }
        } else if !orders.is_empty() {
            Family::FreeProductOfCyclics {
                orders: gens
                    .iter()
                    .map(|g| orders.get(g).copied().unwrap_or(0))
                    .collect(),
            }
        } else {
            Family::FreeGroup { rank: gens.len() }
        };
        let oracle = GroupOracle::new(alphabet, &gens, family)?;
        let delta_override = fields.get("delta").map(|d| d.parse()).transpose()?;
        Ok(Presentation {
            oracle,
            delta_override,
        })
    }
}

/// Built-in groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    F2,
    F3,
    Z2Z3,
    Genus2,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::F2, Preset::F3, Preset::Z2Z3, Preset::Genus2];

    pub fn oracle(self) -> GroupOracle {
        match self {
            Preset::F2 => GroupOracle::free_group(2),
            Preset::F3 => GroupOracle::free_group(3),
            Preset::Z2Z3 => GroupOracle::free_product(&[2, 3]),
            Preset::Genus2 => GroupOracle::small_cancellation(&['a', 'b', 'c', 'd'], &["abABcdCD"]),
        }
        .expect("built-in presets are valid")
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::F2 => "f2",
            Preset::F3 => "f3",
            Preset::Z2Z3 => "z2z3",
            Preset::Genus2 => "genus2",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown preset {s:?} (expected f2, f3, z2z3, genus2)"
                ))
            })
    }
}
