use serde::{Deserialize, Serialize};

use super::{ColumnKind, Table};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleanRules {
    pub drop_identifiers: bool,
    pub drop_afk: bool,
}

impl Default for CleanRules {
    fn default() -> Self {
        Self { drop_identifiers: true, drop_afk: true }
    }
}

/// A row is AFK when the player travelled nowhere and killed nobody.
pub(crate) const AFK_COLUMNS: [&str; 4] = ["walkDistance", "rideDistance", "swimDistance", "kills"];

pub fn clean(table: &Table, rules: CleanRules) -> Result<Table> {
    let mut out = table.clone();
    if rules.drop_afk {
        let walk = table.numeric(AFK_COLUMNS[0])?;
        let ride = table.numeric(AFK_COLUMNS[1])?;
        let swim = table.numeric(AFK_COLUMNS[2])?;
        let kills = table.numeric(AFK_COLUMNS[3])?;
        let keep: Vec<bool> = (0..table.n_rows())
            .map(|i| !(walk[i] + ride[i] + swim[i] == 0.0 && kills[i] == 0.0))
            .collect();
        out = out.filter_rows(&keep);
    }
    if rules.drop_identifiers {
        out = out.retain_columns(|s| s.kind != ColumnKind::Identifier)?;
    }
    Ok(out)
}
