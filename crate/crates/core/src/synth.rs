//! Seeded synthetic matches with a known placement function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{Categorical, ColumnData, Schema, Table, PUBG_COLUMNS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_matches: usize,
    pub min_players: usize,
    pub max_players: usize,
    /// Standard deviation of the per-feature noise added to latent skill.
    pub noise_sd: f64,
    pub seed: u64,
    pub afk_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { n_matches: 500, min_players: 2, max_players: 100, noise_sd: 0.1, seed: 42, afk_fraction: 0.02 }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_matches == 0 {
            return Err(Error::domain("n_matches must be at least 1"));
        }
        if !(2 <= self.min_players && self.min_players <= self.max_players && self.max_players <= 100) {
            return Err(Error::domain(format!(
                "players per match must satisfy 2 <= min <= max <= 100, got [{}, {}]",
                self.min_players, self.max_players
            )));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::domain(format!("noise_sd must be non-negative, got {}", self.noise_sd)));
        }
        if !(0.0..1.0).contains(&self.afk_fraction) {
            return Err(Error::domain(format!("afk_fraction must lie in [0, 1), got {}", self.afk_fraction)));
        }
        Ok(())
    }
}

/// Description of the generating process, written next to the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub config: SynthConfig,
    pub n_rows: usize,
    pub n_afk: usize,
    pub label: String,
    pub latent: String,
    pub features: Vec<(String, String)>,
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

const MODES: [(&str, usize); 6] = [
    ("solo", 1),
    ("solo-fpp", 1),
    ("duo", 2),
    ("duo-fpp", 2),
    ("squad", 4),
    ("squad-fpp", 4),
];

fn formulas() -> Vec<(String, String)> {
    [
        ("walkDistance", "50 + 4000 * sigmoid(1.7 u)^1.5"),
        ("rideDistance", "6000 * max(0, sigmoid(1.5 u) - 0.5)^1.2"),
        ("swimDistance", "150 * max(0, sigmoid(u) - 0.7)"),
        ("kills", "floor(6 * sigmoid(1.8 u)^2)"),
        ("damageDealt", "100 * kills + 150 * sigmoid(1.5 u)"),
        ("heals", "floor(8 * sigmoid(1.5 u)^2)"),
        ("boosts", "floor(6 * sigmoid(1.6 u)^1.5)"),
        ("weaponsAcquired", "1 + floor(8 * sigmoid(1.2 u))"),
        ("headshotKills", "floor(0.4 * kills * sigmoid(u))"),
        ("DBNOs", "floor(0.8 * kills) in team modes, else 0"),
        ("killStreaks", "min(kills, 1 + floor(kills / 3)) when kills > 0"),
        ("longestKill", "300 * sigmoid(u)^2 when kills > 0"),
        ("assists", "floor(2 * sigmoid(u)^3)"),
        ("revives", "floor(2 * sigmoid(u)^2) in team modes, else 0"),
        ("killPlace", "within-match rank of (kills, damageDealt), 1 = most"),
        ("killPoints, rankPoints, winPoints", "independent of skill"),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect()
}

struct Player {
    skill: f64,
    afk: bool,
    group: usize,
    values: [f64; 21],
}

// offsets into Player::values, in numeric schema order without the label
const ASSISTS: usize = 0;
const BOOSTS: usize = 1;
const DAMAGE: usize = 2;
const DBNOS: usize = 3;
const HEADSHOTS: usize = 4;
const HEALS: usize = 5;
const KILL_PLACE: usize = 6;
const KILL_POINTS: usize = 7;
const KILLS: usize = 8;
const KILL_STREAKS: usize = 9;
const LONGEST_KILL: usize = 10;
const MATCH_DURATION: usize = 11;
const MAX_PLACE: usize = 12;
const NUM_GROUPS: usize = 13;
const RANK_POINTS: usize = 14;
const REVIVES: usize = 15;
const RIDE: usize = 16;
const SWIM: usize = 17;
const WALK: usize = 18;
const WEAPONS: usize = 19;
const WIN_POINTS: usize = 20;

const NUMERIC: [&str; 21] = [
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
    "maxPlace",
    "numGroups",
    "rankPoints",
    "revives",
    "rideDistance",
    "swimDistance",
    "walkDistance",
    "weaponsAcquired",
    "winPoints",
];

fn player(rng: &mut ChaCha8Rng, cfg: &SynthConfig, team: bool, group: usize) -> Player {
    let skill: f64 = rng.sample(StandardNormal);
    let afk = rng.random::<f64>() < cfg.afk_fraction;
    let mut u = || skill + cfg.noise_sd * rng.sample::<f64, _>(StandardNormal);
    let mut v = [0.0; 21];
    v[WALK] = 50.0 + 4000.0 * sigmoid(1.7 * u()).powf(1.5);
    v[RIDE] = 6000.0 * (sigmoid(1.5 * u()) - 0.5).max(0.0).powf(1.2);
    v[SWIM] = 150.0 * (sigmoid(u()) - 0.7).max(0.0);
    v[KILLS] = (6.0 * sigmoid(1.8 * u()).powi(2)).floor();
    v[DAMAGE] = 100.0 * v[KILLS] + 150.0 * sigmoid(1.5 * u());
    v[HEALS] = (8.0 * sigmoid(1.5 * u()).powi(2)).floor();
    v[BOOSTS] = (6.0 * sigmoid(1.6 * u()).powf(1.5)).floor();
    v[WEAPONS] = 1.0 + (8.0 * sigmoid(1.2 * u())).floor();
    v[HEADSHOTS] = (0.4 * v[KILLS] * sigmoid(u())).floor();
    v[DBNOS] = if team { (0.8 * v[KILLS]).floor() } else { 0.0 };
    v[KILL_STREAKS] = if v[KILLS] > 0.0 { v[KILLS].min(1.0 + (v[KILLS] / 3.0).floor()) } else { 0.0 };
    let lk = 300.0 * sigmoid(u()).powi(2);
    v[LONGEST_KILL] = if v[KILLS] > 0.0 { lk } else { 0.0 };
    v[ASSISTS] = (2.0 * sigmoid(u()).powi(3)).floor();
    let rv = (2.0 * sigmoid(u()).powi(2)).floor();
    v[REVIVES] = if team { rv } else { 0.0 };
    v[KILL_POINTS] = rng.random_range(0..2000) as f64;
    v[RANK_POINTS] = rng.random_range(1000..2000) as f64;
    v[WIN_POINTS] = rng.random_range(0..1600) as f64;
    if afk {
        for k in [WALK, RIDE, SWIM, KILLS, DAMAGE, HEADSHOTS, DBNOS, KILL_STREAKS, LONGEST_KILL, HEALS, BOOSTS] {
            v[k] = 0.0;
        }
    }
    Player { skill, afk, group, values: v }
}

/// Generates a table in the default PUBG layout plus its ground truth.
pub fn generate(cfg: &SynthConfig) -> Result<(Table, GroundTruth)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ids = Vec::new();
    let mut groups = Vec::new();
    let mut matches = Vec::new();
    let mut modes = Vec::new();
    let mut numeric: Vec<Vec<f64>> = vec![Vec::new(); NUMERIC.len()];
    let mut label = Vec::new();
    let mut n_afk = 0;
    let mut next_group = 0usize;

    for m in 0..cfg.n_matches {
        let p = rng.random_range(cfg.min_players..=cfg.max_players);
        let (mode, team_size) = MODES[rng.random_range(0..MODES.len())];
        let duration = rng.random_range(1300..=2200) as f64;
        let mut players: Vec<Player> =
            (0..p).map(|i| player(&mut rng, cfg, team_size > 1, next_group + i / team_size)).collect();
        let n_groups = p.div_ceil(team_size);
        next_group += n_groups;

        // placement: AFK players last, then by latent skill
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&players[a], &players[b]);
            y.afk.cmp(&x.afk).then(x.skill.total_cmp(&y.skill)).then(a.cmp(&b))
        });
        let mut place = vec![0.0; p];
        for (r, &i) in order.iter().enumerate() {
            place[i] = r as f64 / (p - 1) as f64;
        }
        // killPlace: 1 for the most kills, damage breaking ties
        let mut by_kills: Vec<usize> = (0..p).collect();
        by_kills.sort_by(|&a, &b| {
            let (x, y) = (&players[a].values, &players[b].values);
            y[KILLS].total_cmp(&x[KILLS]).then(y[DAMAGE].total_cmp(&x[DAMAGE])).then(a.cmp(&b))
        });
        for (r, &i) in by_kills.iter().enumerate() {
            players[i].values[KILL_PLACE] = (r + 1) as f64;
        }

        for (i, pl) in players.iter_mut().enumerate() {
            pl.values[MATCH_DURATION] = duration;
            pl.values[MAX_PLACE] = n_groups as f64;
            pl.values[NUM_GROUPS] = n_groups as f64;
            n_afk += usize::from(pl.afk);
            ids.push(format!("p{:08}", ids.len()));
            groups.push(format!("g{:08}", pl.group));
            matches.push(format!("m{m:06}"));
            modes.push(mode);
            for (col, &v) in numeric.iter_mut().zip(&pl.values) {
                col.push(v);
            }
            label.push(place[i]);
        }
    }

    let schema = Schema::pubg_default();
    let mut numeric = NUMERIC.iter().zip(numeric);
    let mut columns = Vec::with_capacity(PUBG_COLUMNS.len());
    for name in PUBG_COLUMNS {
        columns.push(match name {
            "Id" => ColumnData::Categorical(Categorical::from_values(&ids)),
            "groupId" => ColumnData::Categorical(Categorical::from_values(&groups)),
            "matchId" => ColumnData::Categorical(Categorical::from_values(&matches)),
            "matchType" => ColumnData::Categorical(Categorical::from_values(&modes)),
            "winPlacePerc" => ColumnData::Numeric(std::mem::take(&mut label)),
            "roadKills" | "teamKills" | "vehicleDestroys" => ColumnData::Numeric(vec![0.0; ids.len()]),
            other => {
                let (expected, col) = numeric.next().expect("numeric column");
                debug_assert_eq!(*expected, other);
                ColumnData::Numeric(col)
            }
        });
    }
    let table = Table::new(schema, columns)?;
    let truth = GroundTruth {
        config: cfg.clone(),
        n_rows: table.n_rows(),
        n_afk,
        label: "winPlacePerc = (within-match rank of skill, AFK players lowest) / (players - 1)".into(),
        latent: "skill ~ N(0, 1) per player; every feature draws its own u = skill + noise_sd * N(0, 1)".into(),
        features: formulas(),
    };
    Ok((table, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featsel::rank_by_correlation;
    use crate::table::{clean, CleanRules, TARGET};

    fn small(seed: u64) -> SynthConfig {
        SynthConfig { n_matches: 30, seed, ..Default::default() }
    }

    #[test]
    fn schema_and_labels() {
        let (t, truth) = generate(&small(1)).unwrap();
        assert_eq!(t.column_names(), PUBG_COLUMNS.to_vec());
        assert_eq!(truth.n_rows, t.n_rows());
        let y = t.target();
        let m = t.categorical("matchId").unwrap();
        for code in 0..m.dictionary().len() as u32 {
            let mut v: Vec<f64> =
                m.codes().iter().zip(y).filter(|(c, _)| **c == code).map(|(_, y)| *y).collect();
            v.sort_by(f64::total_cmp);
            let p = v.len();
            assert!(p >= 2);
            for (r, val) in v.iter().enumerate() {
                assert_eq!(*val, r as f64 / (p - 1) as f64);
            }
            assert_eq!(v.iter().filter(|&&x| x == 1.0).count(), 1);
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate(&small(5)).unwrap().0, generate(&small(5)).unwrap().0);
        assert_ne!(generate(&small(5)).unwrap().0, generate(&small(6)).unwrap().0);
    }

    #[test]
    fn noiseless_walk_distance_dominates() {
        let cfg = SynthConfig { noise_sd: 0.0, afk_fraction: 0.0, n_matches: 60, ..Default::default() };
        let (t, _) = generate(&cfg).unwrap();
        let r = rank_by_correlation(&t, TARGET).unwrap();
        assert!(r.scores[0].score >= 0.95, "{:?}", &r.scores[..3]);
    }

    #[test]
    fn afk_rows_are_cleaned() {
        let cfg = SynthConfig { afk_fraction: 0.1, n_matches: 40, min_players: 25, max_players: 25, seed: 3, ..Default::default() };
        let (t, truth) = generate(&cfg).unwrap();
        assert_eq!(t.n_rows(), 1000);
        let cleaned = clean(&t, CleanRules::default()).unwrap();
        let removed = t.n_rows() - cleaned.n_rows();
        assert_eq!(removed, truth.n_afk);
        // binomial(1000, 0.1): sd is about 9.5
        assert!(removed.abs_diff(100) <= 30, "{removed}");
    }

    #[test]
    fn invalid_configs() {
        for cfg in [
            SynthConfig { noise_sd: -1.0, ..Default::default() },
            SynthConfig { afk_fraction: 1.0, ..Default::default() },
            SynthConfig { min_players: 1, ..Default::default() },
            SynthConfig { max_players: 101, ..Default::default() },
        ] {
            assert!(matches!(generate(&cfg), Err(Error::Domain(_))));
        }
    }
}
