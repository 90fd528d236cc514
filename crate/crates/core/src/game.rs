//! Payoff model and utility evaluation for bilinear security games.
//!
//! A game pairs four per-target payoff vectors with a set system of
//! defender pure strategies. The set system is only reachable through its
//! best-response oracle, so every type here is small and immutable.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result, Strictness};
use crate::setsystems::DbrOracle;

/// Probability mass tolerance for distributions.
pub const PROB_TOL: f64 = 1e-9;

/// A binary coverage vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PureStrategy {
    bits: Vec<bool>,
    subpure: bool,
}

impl PureStrategy {
    pub fn new(bits: Vec<bool>) -> Self {
        PureStrategy { bits, subpure: false }
    }

    pub fn empty(n: usize) -> Self {
        PureStrategy::new(vec![false; n])
    }

    /// Builds from a 0/1 slice; any other entry is rejected.
    pub fn from_01(values: &[u8]) -> Result<Self> {
        let bits = values
            .iter()
            .map(|&v| match v {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::Invalid(format!("coverage entry {other} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PureStrategy::new(bits))
    }

    pub fn from_indices(n: usize, covered: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = vec![false; n];
        for i in covered {
            bits[i] = true;
        }
        PureStrategy::new(bits)
    }

    pub(crate) fn with_subpure(mut self, subpure: bool) -> Self {
        self.subpure = subpure;
        self
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn covers(&self, i: usize) -> bool {
        self.bits[i]
    }

    /// True when this vector is a strict sub-vector of some member of E
    /// rather than a member itself.
    pub fn is_subpure(&self) -> bool {
        self.subpure
    }

    pub fn covered(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn cardinality(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// `w . e`, summed in index order. The empty sum is `+0`.
    pub fn dot(&self, w: &[f64]) -> f64 {
        self.covered().map(|i| w[i]).fold(0.0, |acc, v| acc + v)
    }

    /// Coordinate-wise `self <= other`.
    pub fn is_dominated_by(&self, other: &PureStrategy) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    /// Bit string such as `"101"`.
    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn parse_bits(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Invalid(format!("'{other}' is not a coverage bit"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PureStrategy::new(bits))
    }
}

impl fmt::Debug for PureStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PureStrategy({}", self.bit_string())?;
        if self.subpure {
            write!(f, ", subpure")?;
        }
        write!(f, ")")
    }
}

/// A finite-support distribution over pure strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    support: Vec<(PureStrategy, f64)>,
}

impl MixedStrategy {
    pub fn new(support: Vec<(PureStrategy, f64)>) -> Result<Self> {
        let Some(n) = support.first().map(|(e, _)| e.len()) else {
            return Err(Error::Invalid("mixed strategy has empty support".into()));
        };
        let mut seen = HashSet::new();
        let mut total = 0.0;
        for (e, p) in &support {
            if e.len() != n {
                return Err(Error::dims(n, e.len()));
            }
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::Invalid(format!("probability {p} is negative")));
            }
            if !seen.insert(e.bits()) {
                return Err(Error::Invalid(format!("duplicate support strategy {}", e.bit_string())));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::Invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(MixedStrategy { support })
    }

    pub fn pure(e: PureStrategy) -> Self {
        MixedStrategy { support: vec![(e, 1.0)] }
    }

    pub fn support(&self) -> &[(PureStrategy, f64)] {
        &self.support
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn dim(&self) -> usize {
        self.support[0].0.len()
    }
}

/// Per-target coverage probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal(Vec<f64>);

impl Marginal {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        for (i, &v) in x.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Invalid(format!("coverage x[{i}] = {v} outside [0, 1]")));
            }
        }
        Ok(Marginal(x))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Attacker mixed strategy over targets.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackerMixed(Vec<f64>);

impl AttackerMixed {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Invalid("attacker strategy is empty".into()));
        }
        if let Some(v) = y.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Invalid(format!("attack probability {v} is negative")));
        }
        let total: f64 = y.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::Invalid(format!("attack probabilities sum to {total}, not 1")));
        }
        Ok(AttackerMixed(y))
    }

    pub fn pure(n: usize, target: usize) -> Self {
        let mut y = vec![0.0; n];
        y[target] = 1.0;
        AttackerMixed(y)
    }

    /// Clamps tiny negatives and renormalises.
    pub(crate) fn from_solver(y: Vec<f64>) -> Result<Self> {
        if let Some(v) = y.iter().find(|v| **v < -1e-7) {
            return Err(Error::NumericalBreakdown(format!("solver attack probability {v} is negative")));
        }
        let clamped: Vec<f64> = y.into_iter().map(|v| v.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        if !(total > 0.5) {
            return Err(Error::NumericalBreakdown(format!("attack probabilities sum to {total}")));
        }
        Ok(AttackerMixed(clamped.into_iter().map(|v| v / total).collect()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The four payoff vectors of a security game.
#[derive(Debug, Clone, PartialEq)]
pub struct Payoffs {
    /// Defender utility when the attacked target is covered.
    pub reward: Vec<f64>,
    /// Defender utility when the attacked target is uncovered.
    pub cost: Vec<f64>,
    /// Attacker utility when the attacked target is uncovered.
    pub att_reward: Vec<f64>,
    /// Attacker utility when the attacked target is covered.
    pub att_cost: Vec<f64>,
}

impl Payoffs {
    pub fn new(reward: Vec<f64>, cost: Vec<f64>, att_reward: Vec<f64>, att_cost: Vec<f64>) -> Self {
        Payoffs { reward, cost, att_reward, att_cost }
    }

    pub fn len(&self) -> usize {
        self.reward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reward.is_empty()
    }
}

/// A validated security game over the strategies of a DBR oracle.
#[derive(Clone)]
pub struct SecurityGame {
    payoffs: Payoffs,
    oracle: Arc<dyn DbrOracle>,
}

impl fmt::Debug for SecurityGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SecurityGame").field("payoffs", &self.payoffs).field("oracle", &self.oracle).finish()
    }
}

impl SecurityGame {
    /// Checks dimensions and the strict orderings `reward > cost`,
    /// `att_reward > att_cost` (exact comparison).
    pub fn new(payoffs: Payoffs, oracle: Arc<dyn DbrOracle>) -> Result<Self> {
        let n = payoffs.reward.len();
        if n == 0 {
            return Err(Error::Invalid("a game needs at least one target".into()));
        }
        for len in [payoffs.cost.len(), payoffs.att_reward.len(), payoffs.att_cost.len(), oracle.dim()] {
            if len != n {
                return Err(Error::dims(n, len));
            }
        }
        for i in 0..n {
            let values = [payoffs.reward[i], payoffs.cost[i], payoffs.att_reward[i], payoffs.att_cost[i]];
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Invalid(format!("non-finite payoff at target {}", i + 1)));
            }
            if !(payoffs.reward[i] > payoffs.cost[i]) {
                return Err(Error::StrictnessViolated { target: i, kind: Strictness::Defender });
            }
            if !(payoffs.att_reward[i] > payoffs.att_cost[i]) {
                return Err(Error::StrictnessViolated { target: i, kind: Strictness::Attacker });
            }
        }
        Ok(SecurityGame { payoffs, oracle })
    }

    pub fn n(&self) -> usize {
        self.payoffs.reward.len()
    }

    pub fn payoffs(&self) -> &Payoffs {
        &self.payoffs
    }

    pub fn oracle(&self) -> &dyn DbrOracle {
        self.oracle.as_ref()
    }

    pub fn oracle_handle(&self) -> Arc<dyn DbrOracle> {
        Arc::clone(&self.oracle)
    }

    pub fn reward(&self) -> &[f64] {
        &self.payoffs.reward
    }

    pub fn cost(&self) -> &[f64] {
        &self.payoffs.cost
    }

    pub fn att_reward(&self) -> &[f64] {
        &self.payoffs.att_reward
    }

    pub fn att_cost(&self) -> &[f64] {
        &self.payoffs.att_cost
    }

    /// `r_i + zeta_i = 0` and `c_i + rho_i = 0` for every target, exactly.
    pub fn is_zero_sum(&self) -> bool {
        let p = &self.payoffs;
        (0..self.n()).all(|i| p.reward[i] + p.att_cost[i] == 0.0 && p.cost[i] + p.att_reward[i] == 0.0)
    }

    /// Defender payoff on target `i` at coverage `x_i`.
    pub fn defender_payoff_at(&self, i: usize, x_i: f64) -> f64 {
        self.payoffs.reward[i] * x_i + self.payoffs.cost[i] * (1.0 - x_i)
    }

    /// Attacker payoff on target `i` at coverage `x_i`.
    pub fn attacker_payoff_at(&self, i: usize, x_i: f64) -> f64 {
        self.payoffs.att_reward[i] * (1.0 - x_i) + self.payoffs.att_cost[i] * x_i
    }

    pub fn defender_utility(&self, x: &Marginal, y: &AttackerMixed) -> Result<f64> {
        self.check_dims(x, y)?;
        Ok(y.as_slice()
            .iter()
            .zip(x.as_slice())
            .enumerate()
            .map(|(i, (&yi, &xi))| yi * self.defender_payoff_at(i, xi))
            .sum())
    }

    pub fn attacker_utility(&self, x: &Marginal, y: &AttackerMixed) -> Result<f64> {
        self.check_dims(x, y)?;
        Ok(y.as_slice()
            .iter()
            .zip(x.as_slice())
            .enumerate()
            .map(|(i, (&yi, &xi))| yi * self.attacker_payoff_at(i, xi))
            .sum())
    }

    fn check_dims(&self, x: &Marginal, y: &AttackerMixed) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::dims(self.n(), x.len()));
        }
        if y.len() != self.n() {
            return Err(Error::dims(self.n(), y.len()));
        }
        Ok(())
    }

    /// The zero-sum game whose defender payoffs are `(-att_cost, -att_reward)`.
    pub fn zero_sum_companion(&self) -> SecurityGame {
        let p = &self.payoffs;
        let payoffs = Payoffs {
            reward: p.att_cost.iter().map(|v| -v).collect(),
            cost: p.att_reward.iter().map(|v| -v).collect(),
            att_reward: p.att_reward.clone(),
            att_cost: p.att_cost.clone(),
        };
        SecurityGame { payoffs, oracle: Arc::clone(&self.oracle) }
    }

    /// Same payoffs over a different set system.
    pub fn with_oracle(&self, oracle: Arc<dyn DbrOracle>) -> Result<SecurityGame> {
        SecurityGame::new(self.payoffs.clone(), oracle)
    }

    /// `(r_i - c_i) / (rho_i - zeta_i)`.
    pub fn transform_ratio(&self, i: usize) -> f64 {
        let p = &self.payoffs;
        (p.reward[i] - p.cost[i]) / (p.att_reward[i] - p.att_cost[i])
    }
}

/// `x_i = sum_e p_e e_i`.
pub fn marginal_of(p: &MixedStrategy) -> Marginal {
    let mut x = vec![0.0; p.dim()];
    for (e, prob) in p.support() {
        for i in e.covered() {
            x[i] += prob;
        }
    }
    Marginal(x.into_iter().map(|v| v.min(1.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setsystems::{Explicit, UniformMatroid};

    fn oracle(n: usize) -> Arc<dyn DbrOracle> {
        Arc::new(UniformMatroid::new(n, 1).unwrap())
    }

    fn game(r: &[f64], c: &[f64], rho: &[f64], zeta: &[f64]) -> Result<SecurityGame> {
        SecurityGame::new(Payoffs::new(r.to_vec(), c.to_vec(), rho.to_vec(), zeta.to_vec()), oracle(r.len()))
    }

    #[test]
    fn validates_strictness_and_dimensions() {
        assert!(game(&[1., 1.], &[0., 0.], &[0., 0.], &[-1., -1.]).is_ok());
        match game(&[1., 1.], &[1., 0.], &[1., 2.], &[0., 0.]) {
            Err(Error::StrictnessViolated { target: 0, kind: Strictness::Defender }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let payoffs = Payoffs::new(vec![1.; 3], vec![0.; 3], vec![1.; 3], vec![0.; 3]);
        assert!(matches!(SecurityGame::new(payoffs, oracle(2)), Err(Error::DimensionMismatch { .. })));
        let ragged = Payoffs::new(vec![1.; 2], vec![0.; 3], vec![1.; 2], vec![0.; 2]);
        assert!(matches!(SecurityGame::new(ragged, oracle(2)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn zero_sum_detection() {
        assert!(game(&[1., 1.], &[0., 0.], &[0., 0.], &[-1., -1.]).unwrap().is_zero_sum());
        assert!(!game(&[1., 1.], &[0., 0.], &[1., 2.], &[0., 0.]).unwrap().is_zero_sum());
        assert!(game(&[5.], &[-2.], &[2.], &[-5.]).unwrap().is_zero_sum());
    }

    #[test]
    fn utilities() {
        let g = game(&[1., 1.], &[0., 0.], &[1., 2.], &[0., 0.]).unwrap();
        let u = |x: &[f64], y: &[f64]| {
            let (x, y) = (Marginal::new(x.to_vec()).unwrap(), AttackerMixed::new(y.to_vec()).unwrap());
            (g.defender_utility(&x, &y).unwrap(), g.attacker_utility(&x, &y).unwrap())
        };
        assert_eq!(u(&[1., 0.], &[1., 0.]), (1.0, 0.0));
        assert_eq!(u(&[0.5, 0.5], &[0.5, 0.5]).0, 0.5);
        let (d, a) = u(&[1. / 3., 2. / 3.], &[0.5, 0.5]);
        assert!((d - 0.5).abs() < 1e-15);
        assert!((a - 2. / 3.).abs() < 1e-15);
        assert!((u(&[1. / 3., 2. / 3.], &[0., 1.]).1 - 2. / 3.).abs() < 1e-15);

        let sym = game(&[1., 1.], &[0., 0.], &[1., 1.], &[0., 0.]).unwrap();
        let x = Marginal::new(vec![0.5, 0.5]).unwrap();
        let y = AttackerMixed::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(sym.attacker_utility(&x, &y).unwrap(), 0.5);

        let short = Marginal::new(vec![0.5]).unwrap();
        assert!(matches!(g.defender_utility(&short, &y), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn marginals() {
        let mk = |bits: &[u8]| PureStrategy::from_01(bits).unwrap();
        let p = MixedStrategy::new(vec![(mk(&[1, 0]), 0.5), (mk(&[0, 1]), 0.5)]).unwrap();
        assert_eq!(marginal_of(&p).as_slice(), &[0.5, 0.5]);
        let p = MixedStrategy::pure(mk(&[1, 1, 0]));
        assert_eq!(marginal_of(&p).as_slice(), &[1., 1., 0.]);
        let p = MixedStrategy::new(vec![(mk(&[1, 0]), 0.25), (mk(&[1, 1]), 0.75)]).unwrap();
        assert_eq!(marginal_of(&p).as_slice(), &[1., 0.75]);
    }

    #[test]
    fn mixed_strategy_invariants() {
        let mk = |bits: &[u8]| PureStrategy::from_01(bits).unwrap();
        assert!(MixedStrategy::new(vec![(mk(&[1, 0]), 0.5), (mk(&[1, 0]), 0.5)]).is_err());
        assert!(MixedStrategy::new(vec![(mk(&[1, 0]), 0.6), (mk(&[0, 1]), 0.6)]).is_err());
        assert!(MixedStrategy::new(vec![(mk(&[1, 0]), 1.5), (mk(&[0, 1]), -0.5)]).is_err());
        assert!(PureStrategy::from_01(&[0, 2]).is_err());
        assert!(AttackerMixed::new(vec![0.3, 0.3]).is_err());
        assert!(Marginal::new(vec![1.2]).is_err());
    }

    #[test]
    fn companion_game() {
        let g3 = game(&[1., 1.], &[0., 0.], &[1., 2.], &[0., 0.]).unwrap();
        let bar = g3.zero_sum_companion();
        assert!(bar.is_zero_sum());
        assert_eq!(bar.reward(), &[0., 0.]);
        assert_eq!(bar.cost(), &[-1., -2.]);
        assert_eq!(bar.zero_sum_companion().payoffs(), bar.payoffs());

        let zs = game(&[1., 1.], &[0., 0.], &[0., 0.], &[-1., -1.]).unwrap();
        assert_eq!(zs.zero_sum_companion().payoffs(), zs.payoffs());
    }

    #[test]
    fn companion_keeps_oracle() {
        let e = Arc::new(Explicit::new(vec![PureStrategy::from_01(&[1, 0]).unwrap()]).unwrap());
        let g = SecurityGame::new(Payoffs::new(vec![1., 1.], vec![0., 0.], vec![1., 2.], vec![0., 0.]), e).unwrap();
        assert_eq!(g.zero_sum_companion().oracle().dim(), 2);
    }
}
