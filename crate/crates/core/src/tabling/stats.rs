//! Snapshot of engine counters.

use std::fmt;
use std::time::Duration;

use super::tables::SubgoalTable;
use crate::arena::Category;
use crate::copier::{Copier, CopyCounters};
use crate::hashcons::TermsStats;
use crate::terms::Store;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Statistics {
    pub subgoals: usize,
    pub answers: usize,
    pub used_cells: usize,
    pub term_cells: usize,
    pub record_cells: usize,
    pub index_cells: usize,
    pub chain_node_cells: usize,
    pub terms: TermsStats,
    /// Entries visited in subgoal and answer indexes.
    pub table_comparisons: u64,
    pub copy: CopyCounters,
    pub tabled_resolutions: u64,
    pub elapsed: Duration,
}

impl Statistics {
    pub(crate) fn collect(
        store: &Store,
        copier: &Copier,
        subgoals: &SubgoalTable,
        tabled_resolutions: u64,
        elapsed: Duration,
    ) -> Statistics {
        let arena = &store.arena;
        Statistics {
            subgoals: subgoals.len(),
            answers: subgoals.answer_count(),
            used_cells: arena.used_cells(),
            term_cells: arena.used_by(Category::Term),
            record_cells: arena.used_by(Category::Record),
            index_cells: arena.used_by(Category::Index),
            chain_node_cells: arena.chain_node_cells(),
            terms: copier.terms.stats(),
            table_comparisons: subgoals.comparisons(),
            copy: copier.counters,
            tabled_resolutions,
            elapsed,
        }
    }

    /// Terms-table chain comparisons plus subgoal and answer index
    /// comparisons.
    pub fn comparisons(&self) -> u64 {
        self.terms.comparisons + self.table_comparisons
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: [(&str, String); 17] = [
            ("subgoals", self.subgoals.to_string()),
            ("answers", self.answers.to_string()),
            ("used_cells", self.used_cells.to_string()),
            ("term_cells", self.term_cells.to_string()),
            ("record_cells", self.record_cells.to_string()),
            ("index_cells", self.index_cells.to_string()),
            ("chain_node_cells", self.chain_node_cells.to_string()),
            ("terms_hits", self.terms.hits.to_string()),
            ("terms_misses", self.terms.misses.to_string()),
            ("terms_expansions", self.terms.expansions.to_string()),
            ("comparisons", self.comparisons().to_string()),
            ("cells_copied", self.copy.cells_copied.to_string()),
            ("traversal_steps", self.copy.traversal_steps.to_string()),
            ("hash_combines", self.copy.hash_combines.to_string()),
            ("tabled_resolutions", self.tabled_resolutions.to_string()),
            ("structural_compares", self.terms.structural.to_string()),
            ("seconds", format!("{:.6}", self.elapsed.as_secs_f64())),
        ];
        for (k, v) in rows {
            writeln!(f, "% {k} = {v}")?;
        }
        Ok(())
    }
}
