use super::{by_weight_desc, check_weights, subsets_up_to, Capabilities, DbrOracle, OracleAnswer};
use crate::error::{Error, Result};
use crate::game::PureStrategy;

/// Any set of at most `k` targets.
#[derive(Debug, Clone)]
pub struct UniformMatroid {
    n: usize,
    k: usize,
}

impl UniformMatroid {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::Invalid(format!("matroid rank {k} exceeds n = {n}")));
        }
        Ok(UniformMatroid { n, k })
    }

    pub fn rank(&self) -> usize {
        self.k
    }
}

impl DbrOracle for UniformMatroid {
    fn dim(&self) -> usize {
        self.n
    }

    fn best_response(&self, w: &[f64]) -> Result<OracleAnswer> {
        check_weights(self.n, w)?;
        let chosen = by_weight_desc(w).into_iter().take(self.k).take_while(|&i| w[i] > 0.0);
        Ok(OracleAnswer::new(PureStrategy::from_indices(self.n, chosen), w))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { enumerable: true, subpure_closed: true }
    }

    fn enumerate(&self, limit: usize) -> Result<Vec<PureStrategy>> {
        subsets_up_to(self.n, self.k, limit)
    }

    fn admits_empty(&self) -> bool {
        true
    }

    fn kind(&self) -> &'static str {
        "uniform_matroid"
    }
}
