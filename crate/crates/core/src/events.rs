//! Event logs shared by the pruning chain and the Λ-coalescent chain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::treecore::TreeCode;

/// One coalescence event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoalescenceEvent {
    /// Absolute time; the step index in untimed runs.
    #[serde(rename = "t")]
    pub time: f64,
    /// Number of blocks merged, at least 2.
    #[serde(rename = "k")]
    pub merged: u32,
    /// How many of the merged blocks were singletons.
    pub singletons: u32,
    /// Tree after the event, when recorded.
    #[serde(rename = "tree", default, skip_serializing_if = "Option::is_none")]
    pub tree_code: Option<TreeCode>,
}

/// A complete trajectory from `n` singletons down to one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub n: u32,
    pub seed: u64,
    pub events: Vec<CoalescenceEvent>,
}

impl EventLog {
    /// X'_n: the number of coalescence events.
    pub fn collision_count(&self) -> usize {
        self.events.len()
    }

    /// (B, E): blocks and singletons involved in the final event.
    pub fn last_event_stats(&self) -> Result<(u32, u32)> {
        self.events
            .last()
            .map(|e| (e.merged, e.singletons))
            .ok_or_else(|| Error::domain("last_event_stats", "log has no events"))
    }

    /// Merger sizes in order.
    pub fn merger_sizes(&self) -> Vec<u32> {
        self.events.iter().map(|e| e.merged).collect()
    }

    /// Check the log is complete and internally consistent.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invariant(m));
        let mut blocks = self.n as i64;
        let mut prev = f64::NEG_INFINITY;
        for (i, e) in self.events.iter().enumerate() {
            if e.merged < 2 || e.singletons > e.merged {
                return bad(format!("event {i}: k={} singletons={}", e.merged, e.singletons));
            }
            if !(e.time > prev) {
                return bad(format!("event {i}: time {} not after {prev}", e.time));
            }
            prev = e.time;
            blocks -= e.merged as i64 - 1;
            if blocks < 1 {
                return bad(format!("event {i}: block count drops below one"));
            }
        }
        if blocks != 1 {
            return bad(format!("log ends with {blocks} blocks"));
        }
        Ok(())
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("event logs serialize")
    }
}
