use std::io;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundStats {
    pub rounds_elapsed: u64,
    pub max_bits_on_any_edge_per_round: u64,
    pub total_messages: u64,
    pub budget_violations: u64,
}

impl RoundStats {
    /// Sequential composition: `other` ran after `self`.
    pub fn absorb(&mut self, other: &RoundStats) {
        self.rounds_elapsed += other.rounds_elapsed;
        self.max_bits_on_any_edge_per_round =
            self.max_bits_on_any_edge_per_round.max(other.max_bits_on_any_edge_per_round);
        self.total_messages += other.total_messages;
        self.budget_violations += other.budget_violations;
    }

    pub fn rounds(rounds: u64) -> Self {
        RoundStats { rounds_elapsed: rounds, ..Self::default() }
    }
}

/// One line of the per-phase statistics table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsRow {
    pub run_id: String,
    pub phase: String,
    pub rounds: u64,
    pub max_edge_bits: u64,
    pub messages: u64,
    pub violations: u64,
}

/// Ordered collection of per-phase statistics.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsLog {
    pub rows: Vec<StatsRow>,
}

impl StatsLog {
    pub fn push(&mut self, run_id: &str, phase: &str, s: &RoundStats) {
        self.rows.push(StatsRow {
            run_id: run_id.to_string(),
            phase: phase.to_string(),
            rounds: s.rounds_elapsed,
            max_edge_bits: s.max_bits_on_any_edge_per_round,
            messages: s.total_messages,
            violations: s.budget_violations,
        });
    }

    pub fn extend(&mut self, other: StatsLog) {
        self.rows.extend(other.rows);
    }

    pub fn total(&self) -> RoundStats {
        let mut t = RoundStats::default();
        for r in &self.rows {
            t.absorb(&RoundStats {
                rounds_elapsed: r.rounds,
                max_bits_on_any_edge_per_round: r.max_edge_bits,
                total_messages: r.messages,
                budget_violations: r.violations,
            });
        }
        t
    }

    /// Writes the table with header `run_id,phase,rounds,max_edge_bits,messages,violations`.
    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        if self.rows.is_empty() {
            out.write_record(["run_id", "phase", "rounds", "max_edge_bits", "messages", "violations"])?;
        }
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}
