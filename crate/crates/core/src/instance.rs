//! JSON instance files.
//!
//! Target indices are 1-based in files and 0-based in memory; the
//! conversion happens here and nowhere else. Payoffs may be numbers or
//! strings holding decimals or fractions such as `"2/3"`. Unknown fields
//! are rejected.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Strictness};
use crate::game::{Payoffs, PureStrategy, SecurityGame};
use crate::setsystems::{
    node_budget_from_env, Bipartite, Coverage, DbrOracle, Explicit, LayeredGraph, Move, Packing, UniformMatroid,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    pub fn value(&self) -> Result<f64> {
        match self {
            Scalar::Number(v) => Ok(*v),
            Scalar::Text(s) => parse_rational(s),
        }
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Number(v)
    }
}

/// Parses `"a/b"` or a plain decimal.
pub fn parse_rational(s: &str) -> Result<f64> {
    let bad = || Error::Invalid(format!("'{s}' is not a number or fraction"));
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(Error::Invalid(format!("'{s}' has a zero denominator")));
            }
            num / den
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffArrays {
    pub reward: Vec<Scalar>,
    pub cost: Vec<Scalar>,
    pub att_reward: Vec<Scalar>,
    pub att_cost: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageResource {
    pub schedules: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridTarget {
    pub position: String,
    /// 1-based time layer.
    pub time: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridMove {
    pub from: String,
    pub to: String,
    /// Departure layer (1-based); omitted means every layer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSystemSpec {
    UniformMatroid { k: usize },
    Bipartite { resources: Vec<Vec<usize>> },
    Coverage { resources: Vec<CoverageResource> },
    LayeredGraph { positions: Vec<String>, times: usize, target_index: Vec<GridTarget>, moves: Vec<GridMove>, k: usize },
    Packing { teams: Vec<Vec<String>>, capacities: BTreeMap<String, u64> },
    Explicit { strategies: Vec<Vec<u8>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub targets: usize,
    pub payoffs: PayoffArrays,
    pub set_system: SetSystemSpec,
}

/// A parsed and validated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub file: InstanceFile,
    pub game: SecurityGame,
}

impl Instance {
    pub fn name(&self) -> Option<&str> {
        self.file.name.as_deref()
    }
}

fn field(name: impl Into<String>, source: Error) -> Error {
    Error::Field { field: name.into(), source: Box::new(source) }
}

fn zero_based(n: usize, list: &[usize], path: &str) -> Result<Vec<usize>> {
    list.iter()
        .enumerate()
        .map(|(j, &t)| {
            if t == 0 || t > n {
                Err(field(format!("{path}[{j}]"), Error::Invalid(format!("target {t} outside [1, {n}]"))))
            } else {
                Ok(t - 1)
            }
        })
        .collect()
}

fn name_index(names: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::new();
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(Error::Invalid(format!("duplicate {what} '{name}'")));
        }
    }
    Ok(index)
}

fn lookup(index: &HashMap<String, usize>, name: &str, path: String) -> Result<usize> {
    index.get(name).copied().ok_or_else(|| field(path, Error::Invalid(format!("unknown name '{name}'"))))
}

impl SetSystemSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SetSystemSpec::UniformMatroid { .. } => "uniform_matroid",
            SetSystemSpec::Bipartite { .. } => "bipartite",
            SetSystemSpec::Coverage { .. } => "coverage",
            SetSystemSpec::LayeredGraph { .. } => "layered_graph",
            SetSystemSpec::Packing { .. } => "packing",
            SetSystemSpec::Explicit { .. } => "explicit",
        }
    }

    /// Builds the oracle over `n` targets.
    pub fn build(&self, n: usize) -> Result<Arc<dyn DbrOracle>> {
        let budget = node_budget_from_env();
        Ok(match self {
            SetSystemSpec::UniformMatroid { k } => Arc::new(UniformMatroid::new(n, *k)?),
            SetSystemSpec::Bipartite { resources } => {
                let allowed = resources
                    .iter()
                    .enumerate()
                    .map(|(r, list)| zero_based(n, list, &format!("resources[{r}]")))
                    .collect::<Result<_>>()?;
                Arc::new(Bipartite::new(n, allowed)?)
            }
            SetSystemSpec::Coverage { resources } => {
                let schedules = resources
                    .iter()
                    .enumerate()
                    .map(|(r, res)| {
                        res.schedules
                            .iter()
                            .enumerate()
                            .map(|(s, list)| zero_based(n, list, &format!("resources[{r}].schedules[{s}]")))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?;
                Arc::new(Coverage::new(n, schedules)?.with_node_budget(budget))
            }
            SetSystemSpec::LayeredGraph { positions, times, target_index, moves, k } => {
                let index = name_index(positions, "position")?;
                let mut targets = Vec::with_capacity(target_index.len());
                for (j, gt) in target_index.iter().enumerate() {
                    let p = lookup(&index, &gt.position, format!("target_index[{j}].position"))?;
                    if gt.time == 0 || gt.time > *times {
                        return Err(field(
                            format!("target_index[{j}].time"),
                            Error::Invalid(format!("time {} outside [1, {times}]", gt.time)),
                        ));
                    }
                    let t = zero_based(n, &[gt.target], &format!("target_index[{j}].target"))?[0];
                    targets.push((p, gt.time - 1, t));
                }
                let mut arcs = Vec::new();
                for (j, mv) in moves.iter().enumerate() {
                    let from = lookup(&index, &mv.from, format!("moves[{j}].from"))?;
                    let to = lookup(&index, &mv.to, format!("moves[{j}].to"))?;
                    match mv.time {
                        Some(t) if t == 0 || t >= *times => {
                            return Err(field(
                                format!("moves[{j}].time"),
                                Error::Invalid(format!("departure time {t} outside [1, {}]", times.saturating_sub(1))),
                            ))
                        }
                        Some(t) => arcs.push(Move { time: t - 1, from, to }),
                        None => arcs.extend((0..times.saturating_sub(1)).map(|time| Move { time, from, to })),
                    }
                }
                Arc::new(LayeredGraph::new(n, positions.len(), *times, &targets, &arcs, *k)?.with_node_budget(budget))
            }
            SetSystemSpec::Packing { teams, capacities } => {
                let names: Vec<String> = capacities.keys().cloned().collect();
                let index = name_index(&names, "tool")?;
                let teams = teams
                    .iter()
                    .enumerate()
                    .map(|(t, tools)| {
                        tools
                            .iter()
                            .enumerate()
                            .map(|(j, name)| lookup(&index, name, format!("teams[{t}][{j}]")))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?;
                Arc::new(Packing::new(n, teams, capacities.values().copied().collect())?.with_node_budget(budget))
            }
            SetSystemSpec::Explicit { strategies } => {
                let list = strategies
                    .iter()
                    .enumerate()
                    .map(|(j, row)| {
                        if row.len() != n {
                            return Err(field(format!("strategies[{j}]"), Error::dims(n, row.len())));
                        }
                        PureStrategy::from_01(row).map_err(|e| field(format!("strategies[{j}]"), e))
                    })
                    .collect::<Result<_>>()?;
                Arc::new(Explicit::new(list)?)
            }
        })
    }
}

impl InstanceFile {
    pub fn to_game(&self) -> Result<SecurityGame> {
        let n = self.targets;
        let read = |name: &str, values: &[Scalar]| -> Result<Vec<f64>> {
            if values.len() != n {
                return Err(field(format!("payoffs.{name}"), Error::dims(n, values.len())));
            }
            values
                .iter()
                .enumerate()
                .map(|(i, v)| v.value().map_err(|e| field(format!("payoffs.{name}[{i}]"), e)))
                .collect()
        };
        let p = &self.payoffs;
        let payoffs = Payoffs::new(
            read("reward", &p.reward)?,
            read("cost", &p.cost)?,
            read("att_reward", &p.att_reward)?,
            read("att_cost", &p.att_cost)?,
        );
        let oracle = self.set_system.build(n).map_err(|e| field("set_system", e))?;
        SecurityGame::new(payoffs, oracle).map_err(|e| match e {
            Error::StrictnessViolated { target, kind } => {
                let name = match kind {
                    Strictness::Defender => "reward",
                    Strictness::Attacker => "att_reward",
                };
                field(format!("payoffs.{name}[{target}]"), e)
            }
            other => other,
        })
    }
}

/// Parses instance text; syntax errors carry the JSON path and position.
pub fn parse_instance_str(text: &str) -> Result<Instance> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: InstanceFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse { path, message: format!("line {} column {}: {inner}", inner.line(), inner.column()) }
    })?;
    let game = file.to_game()?;
    Ok(Instance { file, game })
}

pub fn parse_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    parse_instance_str(&text)
}
