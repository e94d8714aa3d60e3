use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The 29 columns of the public PUBG finish-placement training file, in file order.
pub const PUBG_COLUMNS: [&str; 29] = [
    "Id",
    "groupId",
    "matchId",
    "assists",
    "boosts",
    "damageDealt",
    "DBNOs",
    "headshotKills",
    "heals",
    "killPlace",
    "killPoints",
    "kills",
    "killStreaks",
    "longestKill",
    "matchDuration",
    "matchType",
    "maxPlace",
    "numGroups",
    "rankPoints",
    "revives",
    "rideDistance",
    "roadKills",
    "swimDistance",
    "teamKills",
    "vehicleDestroys",
    "walkDistance",
    "weaponsAcquired",
    "winPoints",
    "winPlacePerc",
];

pub const TARGET: &str = "winPlacePerc";
pub const IDENTIFIERS: [&str; 3] = ["Id", "groupId", "matchId"];
pub const MATCH_TYPE: &str = "matchType";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Identifier,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        Self { name: name.into(), kind }
    }
}

/// Ordered column list plus the name of the label column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema")]
pub struct Schema {
    columns: Vec<ColumnSpec>,
    target: String,
}

#[derive(Deserialize)]
struct RawSchema {
    columns: Vec<ColumnSpec>,
    target: String,
}

impl TryFrom<RawSchema> for Schema {
    type Error = Error;

    fn try_from(raw: RawSchema) -> Result<Self> {
        Schema::new(raw.columns, raw.target)
    }
}

impl Schema {
    pub fn new(columns: Vec<ColumnSpec>, target: impl Into<String>) -> Result<Self> {
        let target = target.into();
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::schema(format!("duplicate column `{}`", c.name)));
            }
        }
        match columns.iter().find(|c| c.name == target) {
            None => return Err(Error::schema(format!("target `{target}` is not a column"))),
            Some(c) if c.kind != ColumnKind::Numeric => {
                return Err(Error::schema(format!("target `{target}` must be numeric")))
            }
            Some(_) => {}
        }
        if !columns
            .iter()
            .any(|c| c.kind != ColumnKind::Identifier && c.name != target)
        {
            return Err(Error::schema("schema has no predictor columns"));
        }
        Ok(Self { columns, target })
    }

    /// The Kaggle PUBG layout: three identifiers, categorical `matchType`,
    /// everything else numeric, target `winPlacePerc`.
    pub fn pubg_default() -> Self {
        Self::infer(PUBG_COLUMNS.iter().copied(), TARGET).expect("default schema is valid")
    }

    /// Assigns kinds by name using the PUBG conventions: `Id`/`groupId`/`matchId`
    /// are identifiers, `matchType` is categorical, the rest numeric.
    pub fn infer<'a>(names: impl IntoIterator<Item = &'a str>, target: &str) -> Result<Self> {
        let columns = names
            .into_iter()
            .map(|name| {
                let kind = if IDENTIFIERS.contains(&name) {
                    ColumnKind::Identifier
                } else if name == MATCH_TYPE {
                    ColumnKind::Categorical
                } else {
                    ColumnKind::Numeric
                };
                ColumnSpec::new(name, kind)
            })
            .collect();
        Self::new(columns, target)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn kind(&self, name: &str) -> Option<ColumnKind> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.kind)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    /// Non-identifier, non-target columns in schema order.
    pub fn feature_names(&self) -> Vec<String> {
        self.columns
            .iter()
            .filter(|c| c.kind != ColumnKind::Identifier && c.name != self.target)
            .map(|c| c.name.clone())
            .collect()
    }
}
