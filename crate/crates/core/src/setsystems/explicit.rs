use std::collections::HashSet;

use super::{check_weights, Capabilities, DbrOracle, OracleAnswer, StrategySet};
use crate::error::{Error, Result};
use crate::game::PureStrategy;

/// A set system given as a list of its members.
#[derive(Debug, Clone)]
pub struct Explicit {
    n: usize,
    strategies: Vec<PureStrategy>,
    subpure_closed: bool,
}

impl Explicit {
    pub fn new(strategies: Vec<PureStrategy>) -> Result<Self> {
        let n = strategies.first().ok_or(Error::EmptySystem)?.len();
        let mut seen = HashSet::new();
        for e in &strategies {
            if e.len() != n {
                return Err(Error::dims(n, e.len()));
            }
            if !seen.insert(e.bits().to_vec()) {
                return Err(Error::Invalid(format!("duplicate strategy {}", e.bit_string())));
            }
        }
        // closed under dropping one covered target <=> downward closed
        let subpure_closed = strategies.iter().all(|e| {
            e.covered().all(|i| {
                let mut bits = e.bits().to_vec();
                bits[i] = false;
                seen.contains(&bits)
            })
        });
        Ok(Explicit { n, strategies, subpure_closed })
    }

    pub fn strategies(&self) -> &[PureStrategy] {
        &self.strategies
    }
}

impl DbrOracle for Explicit {
    fn dim(&self) -> usize {
        self.n
    }

    fn best_response(&self, w: &[f64]) -> Result<OracleAnswer> {
        check_weights(self.n, w)?;
        super::brute_force_best(&self.strategies, w).ok_or(Error::EmptySystem)
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { enumerable: true, subpure_closed: self.subpure_closed }
    }

    fn enumerate(&self, limit: usize) -> Result<Vec<PureStrategy>> {
        let mut set = StrategySet::new(limit);
        for e in &self.strategies {
            set.insert(e.clone())?;
        }
        Ok(set.into_vec())
    }

    fn admits_empty(&self) -> bool {
        self.strategies.iter().any(|e| e.cardinality() == 0)
    }

    fn kind(&self) -> &'static str {
        "explicit"
    }
}
