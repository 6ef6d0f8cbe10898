//! Versioned table of frozen slack constants (`name = integer bits`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algstats::LogSlack;
use crate::entropy::ChainConstants;
use crate::error::{Error, Result};
use crate::machine::MACHINE_VERSION;
use crate::protocol::GapConstants;

const FROZEN: &str = include_str!("../slack.toml");

/// Names every table must define.
pub const REQUIRED: [&str; 15] = [
    "c_machine",
    "c1",
    "c2",
    "c3",
    "c4",
    "c5",
    "c6",
    "c_dominance",
    "exotic_info",
    "selection_c_log",
    "selection_c_add",
    "border_c_log",
    "border_c_add",
    "total_prefix_c_log",
    "total_prefix_c_add",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackTable {
    pub version: String,
    pub constants: BTreeMap<String, i64>,
}

impl SlackTable {
    /// The table shipped with the crate.
    pub fn frozen() -> Self {
        Self::parse(FROZEN).expect("shipped slack table is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: SlackTable = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if table.version != MACHINE_VERSION {
            return Err(Error::Config(format!(
                "slack table is for machine {}, running {MACHINE_VERSION}",
                table.version
            )));
        }
        if let Some(missing) = REQUIRED.iter().find(|k| !table.constants.contains_key(**k)) {
            return Err(Error::Config(format!("slack table lacks {missing}")));
        }
        Ok(table)
    }

    pub fn to_toml(&self) -> String {
        let body = toml::to_string(self).expect("table serializes");
        format!("# Frozen machine constants in bits. Regenerate with `qnc calibrate`.\n{body}")
    }

    pub fn get(&self, name: &str) -> i64 {
        self.constants[name]
    }

    pub fn set(&mut self, name: &str, value: i64) {
        self.constants.insert(name.to_string(), value);
    }

    fn log_coefficient(&self, name: &str) -> u32 {
        u32::try_from(self.get(name)).unwrap_or(0)
    }

    pub fn chain(&self) -> ChainConstants {
        ChainConstants {
            c1: self.get("c1"),
            c2: self.get("c2"),
            c3: self.log_coefficient("c3"),
            c4: self.get("c4"),
        }
    }

    pub fn gap(&self) -> GapConstants {
        GapConstants {
            c5: self.log_coefficient("c5"),
            c6: self.get("c6"),
            exotic_info: self.get("exotic_info"),
        }
    }

    fn log_slack(&self, prefix: &str) -> LogSlack {
        LogSlack {
            c_log: self.log_coefficient(&format!("{prefix}_c_log")),
            c_add: self.get(&format!("{prefix}_c_add")),
        }
    }

    pub fn selection(&self) -> LogSlack {
        self.log_slack("selection")
    }

    pub fn border(&self) -> LogSlack {
        self.log_slack("border")
    }

    pub fn total_prefix(&self) -> LogSlack {
        self.log_slack("total_prefix")
    }
}
