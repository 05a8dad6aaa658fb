use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::ledger::OFFER_SYMBOLS;
use crate::pir::PirParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Backend {
    #[default]
    #[serde(rename = "bls12-381")]
    Bls12_381,
    #[serde(rename = "toy")]
    Toy,
}

/// Node ids (1-based) misbehaving in a retrieval round.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FaultPlan {
    pub byzantine: Vec<u16>,
    pub unresponsive: Vec<u16>,
    pub colluding: Vec<u16>,
}

impl FaultPlan {
    pub fn is_byzantine(&self, node: u16) -> bool {
        self.byzantine.contains(&node)
    }

    pub fn is_unresponsive(&self, node: u16) -> bool {
        self.unresponsive.contains(&node)
    }

    pub fn is_colluding(&self, node: u16) -> bool {
        self.colluding.contains(&node)
    }

    /// Ids in range, no repeats, and the Byzantine and unresponsive sets
    /// disjoint.
    pub fn check_ids(&self, n: usize, field: &str) -> Result<(), HarnessError> {
        for (name, ids) in [("byzantine", &self.byzantine), ("unresponsive", &self.unresponsive), ("colluding", &self.colluding)] {
            let field = format!("{field}.{name}");
            if let Some(bad) = ids.iter().find(|&&id| id == 0 || usize::from(id) > n) {
                return Err(HarnessError::config(field, format!("node {bad} outside 1..={n}")));
            }
            if ids.iter().collect::<BTreeSet<_>>().len() != ids.len() {
                return Err(HarnessError::config(field, "repeated node id"));
            }
        }
        if self.byzantine.iter().any(|id| self.unresponsive.contains(id)) {
            return Err(HarnessError::config(format!("{field}.byzantine"), "node is also unresponsive"));
        }
        Ok(())
    }

    pub fn check_budget(&self, t: usize, b: usize, r: usize, field: &str) -> Result<(), HarnessError> {
        for (name, len, cap) in [
            ("byzantine", self.byzantine.len(), b),
            ("unresponsive", self.unresponsive.len(), r),
            ("colluding", self.colluding.len(), t),
        ] {
            if len > cap {
                return Err(HarnessError::config(format!("{field}.{name}"), format!("{len} nodes exceed the budget of {cap}")));
            }
        }
        Ok(())
    }
}

fn default_offers_per_po() -> usize {
    2
}

fn default_max_slots() -> u16 {
    1
}

fn default_rate() -> u64 {
    10_000_000
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    pub t: usize,
    pub b: usize,
    pub r: usize,
    pub cells: usize,
    pub cell_capacity: usize,
    pub num_pos: usize,
    pub num_drivers: usize,
    #[serde(default = "default_offers_per_po")]
    pub offers_per_po: usize,
    /// Offers advertise between 1 and this many free spaces.
    #[serde(default = "default_max_slots")]
    pub max_slots: u16,
    pub rng_seed: u64,
    #[serde(default = "default_rate")]
    pub channel_rate_bps: u64,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub faults: FaultPlan,
    /// Per-round overrides, cycled through by retrieval round when present.
    #[serde(default)]
    pub round_faults: Vec<FaultPlan>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| HarnessError::config("config", e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::config("config", format!("cannot read {}: {e}", path.display())))?;
        ScenarioConfig::from_toml(&text)
    }

    pub fn pir_params(&self) -> Result<PirParams, HarnessError> {
        PirParams::new(self.n, self.t, self.b, self.r, self.cells, OFFER_SYMBOLS)
            .map_err(|e| HarnessError::config("n", e.to_string()))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n <= self.t + 2 * self.b + self.r {
            return Err(HarnessError::config("n", format!("n = {} must exceed t + 2b + r = {}", self.n, self.t + 2 * self.b + self.r)));
        }
        if self.cells == 0 || self.cells > usize::from(u16::MAX) {
            return Err(HarnessError::config("cells", "must be in 1..=65535"));
        }
        if self.cell_capacity == 0 || self.cell_capacity > usize::from(u16::MAX) {
            return Err(HarnessError::config("cell_capacity", "must be in 1..=65535"));
        }
        self.pir_params()?;
        for (field, v) in [("num_pos", self.num_pos), ("num_drivers", self.num_drivers), ("offers_per_po", self.offers_per_po)] {
            if v == 0 {
                return Err(HarnessError::config(field, "must be positive"));
            }
        }
        if self.num_pos * self.offers_per_po > self.cells * self.cell_capacity {
            return Err(HarnessError::config("offers_per_po", "initial offers exceed total ledger capacity"));
        }
        if self.max_slots == 0 {
            return Err(HarnessError::config("max_slots", "must be positive"));
        }
        if self.channel_rate_bps == 0 {
            return Err(HarnessError::config("channel_rate_bps", "must be positive"));
        }
        self.faults.check_ids(self.n, "faults")?;
        self.faults.check_budget(self.t, self.b, self.r, "faults")?;
        for (i, plan) in self.round_faults.iter().enumerate() {
            let field = format!("round_faults[{i}]");
            plan.check_ids(self.n, &field)?;
            plan.check_budget(self.t, self.b, self.r, &field)?;
        }
        Ok(())
    }

    pub fn faults_for_round(&self, round: usize) -> &FaultPlan {
        if self.round_faults.is_empty() {
            &self.faults
        } else {
            &self.round_faults[round % self.round_faults.len()]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
        n = 9
        t = 1
        b = 1
        r = 1
        cells = 3
        cell_capacity = 8
        num_pos = 3
        num_drivers = 2
        rng_seed = 42
        backend = "toy"

        [faults]
        byzantine = [4]
        unresponsive = [7]
        colluding = [2]
    "#;

    #[test]
    fn parses_with_defaults() {
        let c = ScenarioConfig::from_toml(EXAMPLE).unwrap();
        assert_eq!(c.channel_rate_bps, 10_000_000);
        assert_eq!(c.offers_per_po, 2);
        assert_eq!(c.backend, Backend::Toy);
        assert_eq!(c.faults_for_round(5).byzantine, vec![4]);
    }

    #[test]
    fn rejects_with_field_names() {
        let bad_n = EXAMPLE.replace("n = 9", "n = 4");
        let err = ScenarioConfig::from_toml(&bad_n).unwrap_err();
        assert!(matches!(&err, HarnessError::Config { field, .. } if field == "n"), "{err}");

        let over = EXAMPLE.replace("byzantine = [4]", "byzantine = [4, 5]");
        let err = ScenarioConfig::from_toml(&over).unwrap_err();
        assert!(matches!(&err, HarnessError::Config { field, .. } if field == "faults.byzantine"), "{err}");

        let out_of_range = EXAMPLE.replace("colluding = [2]", "colluding = [10]");
        assert!(ScenarioConfig::from_toml(&out_of_range).is_err());

        let unknown = format!("{EXAMPLE}\n[extra]\nx = 1\n");
        assert!(ScenarioConfig::from_toml(&unknown).is_err());
    }
}
