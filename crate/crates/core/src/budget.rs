//! Resource limits for the exhaustive searches.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum BudgetError {
    #[error("search budget exhausted after {nodes} nodes")]
    Exhausted { nodes: u64 },
}

/// Node and wall-clock limits. The default is unlimited.
#[derive(Debug, Clone, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        Budget { max_nodes: Some(max_nodes), max_time: None }
    }

    pub fn seconds(secs: f64) -> Self {
        Budget { max_nodes: None, max_time: Some(Duration::from_secs_f64(secs)) }
    }

    pub fn start(&self) -> BudgetMeter<'_> {
        BudgetMeter { budget: self, nodes: AtomicU64::new(0), started: Instant::now() }
    }
}

/// Shared running counter against a [`Budget`]; safe to tick from parallel
/// workers.
pub struct BudgetMeter<'a> {
    budget: &'a Budget,
    nodes: AtomicU64,
    started: Instant,
}

impl BudgetMeter<'_> {
    /// Counts `amount` nodes and checks the limits. Time is only checked at
    /// tick granularity.
    pub fn tick(&self, amount: u64) -> Result<(), BudgetError> {
        let nodes = self.nodes.fetch_add(amount, Ordering::Relaxed) + amount;
        if let Some(max) = self.budget.max_nodes {
            if nodes > max {
                return Err(BudgetError::Exhausted { nodes });
            }
        }
        if let Some(max) = self.budget.max_time {
            if self.started.elapsed() > max {
                return Err(BudgetError::Exhausted { nodes });
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }
}
