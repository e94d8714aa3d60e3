//! Engineered player features: group sizes, per-match normalisation and
//! per-walk-distance rates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{ColumnData, Table, MATCH_TYPE};

/// Names of the ten engineered columns, in the order they are appended.
pub const ENGINEERED: [&str; 10] = [
    "playersJoined",
    "killsNorm",
    "damageDealtNorm",
    "healsAndBoosts",
    "totalDistance",
    "boostsPerWalkDistance",
    "healsPerWalkDistance",
    "killsPerWalkDistance",
    "healsAndBoostsPerWalkDistance",
    "team",
];

const SOURCES: [&str; 7] = [
    "kills",
    "damageDealt",
    "heals",
    "boosts",
    "walkDistance",
    "rideDistance",
    "swimDistance",
];

/// What a per-walk-distance ratio becomes when the walk distance is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ZeroDivision {
    #[default]
    EmitZero,
    /// Ratios are clamped to the cap; a positive numerator over zero walk
    /// distance yields the cap itself.
    CapAt(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct FeatureRecipe {
    pub zero_division: ZeroDivision,
    pub one_hot_match_type: bool,
}

impl FeatureRecipe {
    pub fn validate(&self) -> Result<()> {
        if let ZeroDivision::CapAt(c) = self.zero_division {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::domain(format!("ratio cap must be finite and positive, got {c}")));
            }
        }
        Ok(())
    }

    fn ratio(&self, num: f64, walk: f64) -> f64 {
        match self.zero_division {
            ZeroDivision::EmitZero => {
                if walk == 0.0 {
                    0.0
                } else {
                    num / walk
                }
            }
            ZeroDivision::CapAt(cap) => {
                if walk == 0.0 {
                    if num > 0.0 {
                        cap
                    } else {
                        0.0
                    }
                } else {
                    (num / walk).min(cap)
                }
            }
        }
    }
}

/// Scales a per-match count so that a match with fewer players is worth more:
/// `value * ((100 - players) / 100 + 1)`.
pub fn norm_by_players(value: f64, players_joined: usize) -> Result<f64> {
    if players_joined == 0 {
        return Err(Error::domain("players_joined must be at least 1"));
    }
    Ok(value * ((100.0 - players_joined as f64) / 100.0 + 1.0))
}

fn group_sizes(table: &Table, column: &str) -> Result<Vec<f64>> {
    let ids = table.categorical(column).map_err(|_| {
        Error::Ordering(format!(
            "column `{column}` is required; engineer features before dropping identifiers"
        ))
    })?;
    let mut counts = vec![0usize; ids.dictionary().len()];
    for &k in ids.codes() {
        counts[k as usize] += 1;
    }
    Ok(ids.codes().iter().map(|&k| counts[k as usize] as f64).collect())
}

/// Appends the ten engineered columns. Original columns are left untouched;
/// running it twice is rejected because the names already exist.
pub fn engineer(table: &Table, recipe: &FeatureRecipe) -> Result<Table> {
    recipe.validate()?;
    if let Some(dup) = ENGINEERED.iter().find(|n| table.has_column(n)) {
        return Err(Error::schema(format!("column `{dup}` already exists; features were already engineered")));
    }
    let players = group_sizes(table, "matchId")?;
    let team = group_sizes(table, "groupId")?;
    let src = SOURCES
        .iter()
        .map(|n| table.numeric(n))
        .collect::<Result<Vec<_>>>()?;
    let [kills, damage, heals, boosts, walk, ride, swim] = src[..] else { unreachable!() };

    let n = table.n_rows();
    let multiplier: Vec<f64> = players
        .iter()
        .map(|&p| norm_by_players(1.0, p as usize))
        .collect::<Result<_>>()?;
    let per_walk = |num: &dyn Fn(usize) -> f64| -> Vec<f64> {
        (0..n).map(|i| recipe.ratio(num(i), walk[i])).collect()
    };

    let columns = vec![
        players.clone(),
        (0..n).map(|i| kills[i] * multiplier[i]).collect(),
        (0..n).map(|i| damage[i] * multiplier[i]).collect(),
        (0..n).map(|i| heals[i] + boosts[i]).collect(),
        (0..n).map(|i| walk[i] + ride[i] + swim[i]).collect(),
        per_walk(&|i| boosts[i]),
        per_walk(&|i| heals[i]),
        per_walk(&|i| kills[i]),
        per_walk(&|i| heals[i] + boosts[i]),
        team,
    ];
    table.with_numeric_columns(ENGINEERED.iter().map(|s| s.to_string()).zip(columns).collect())
}

/// Replaces the categorical `matchType` column by one indicator column per
/// mode, named `matchType=<mode>`, in dictionary order.
pub fn one_hot_match_type(table: &Table) -> Result<Table> {
    let ColumnData::Categorical(c) = table.column(MATCH_TYPE)? else {
        return Err(Error::schema("`matchType` is not categorical"));
    };
    let indicators = c
        .dictionary()
        .iter()
        .enumerate()
        .map(|(k, mode)| {
            let col = c.codes().iter().map(|&code| f64::from(u8::from(code as usize == k))).collect();
            (format!("{MATCH_TYPE}={mode}"), col)
        })
        .collect();
    table.replace_with_numeric(MATCH_TYPE, indicators)
}
