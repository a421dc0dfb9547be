//! Strict TOML scenario schema and its conversion into validated scenarios.
//!
//! Every table rejects unknown keys, so a misspelt parameter fails loudly
//! instead of silently falling back to a default.

use std::collections::BTreeSet;
use std::path::Path;

use respole::{DMatrix, DVector, EffectiveHamiltonian, EnergyGrid, LinearFamily, PoleSet};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Product {
    CrossSection,
    Coupling,
    Phase,
    Trapping,
    Crossing,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "scenario")]
    pub scenarios: Vec<ScenarioConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub outputs: Vec<Product>,
    #[serde(default)]
    pub poles: Vec<PoleConfig>,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub background_phase: f64,
    /// One-based pole labels for coupling and phase products; all poles when absent.
    pub coupling_states: Option<Vec<usize>>,
    pub hamiltonian: Option<HamiltonianConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleConfig {
    pub position: f64,
    pub width: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub h0: Vec<Vec<f64>>,
    pub couplings: Vec<Vec<f64>>,
    #[serde(default)]
    pub alpha: f64,
    pub h0_slope: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub alpha_slope: f64,
    pub crossing: Option<CrossingConfig>,
    pub trapping: Option<TrappingConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    /// One-based labels `[k, l]` of the tracked state and its partner.
    #[serde(default = "default_states")]
    pub states: [usize; 2],
}

fn default_states() -> [usize; 2] {
    [1, 2]
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrappingConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
    /// Prepends `alpha = 0` to a logarithmic grid.
    #[serde(default)]
    pub include_zero: bool,
}

/// A validated scenario. State indices are zero-based from here on.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub outputs: BTreeSet<Product>,
    pub poles: Option<PoleSet>,
    pub grid: Option<EnergyGrid>,
    pub background_phase: f64,
    pub coupling_states: Vec<usize>,
    pub hamiltonian: Option<HamiltonianSpec>,
}

#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    pub family: LinearFamily,
    pub crossing: Option<CrossingSpec>,
    pub trapping: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct CrossingSpec {
    pub grid: Vec<f64>,
    pub states: (usize, usize),
}

pub fn load_config(path: &Path) -> Result<Vec<Scenario>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

/// Parses and validates a configuration; `origin` labels error messages.
pub fn parse_config(text: &str, origin: &str) -> Result<Vec<Scenario>, CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config {
        path: origin.to_owned(),
        message: e.to_string(),
    })?;
    if file.scenarios.is_empty() {
        return Err(config_error(origin, "at least one [[scenario]] table is required"));
    }
    let mut names = BTreeSet::new();
    let mut scenarios = Vec::with_capacity(file.scenarios.len());
    for raw in file.scenarios {
        if !names.insert(raw.name.clone()) {
            return Err(config_error(origin, format!("duplicate scenario name `{}`", raw.name)));
        }
        scenarios.push(raw.into_scenario(origin)?);
    }
    Ok(scenarios)
}

fn config_error(origin: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        path: origin.to_owned(),
        message: message.into(),
    }
}

fn matrix(rows: &[Vec<f64>], what: &str, scenario: &str) -> Result<DMatrix<f64>, CliError> {
    let n = rows.len();
    if rows.iter().any(|row| row.len() != n) {
        return Err(CliError::invalid(scenario, format!("{what} must be a square matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !name.starts_with('.')
}

impl ScenarioConfig {
    fn into_scenario(self, origin: &str) -> Result<Scenario, CliError> {
        let name = self.name;
        if !valid_name(&name) {
            return Err(config_error(
                origin,
                format!("scenario name `{name}` may only contain letters, digits, `_`, `-` and `.`"),
            ));
        }
        let outputs: BTreeSet<Product> = self.outputs.into_iter().collect();
        if outputs.is_empty() {
            return Err(config_error(origin, format!("scenario `{name}` requests no outputs")));
        }
        let missing = |what: &str| config_error(origin, format!("scenario `{name}` needs {what}"));

        let needs_poles = outputs
            .iter()
            .any(|p| matches!(p, Product::CrossSection | Product::Coupling | Product::Phase));
        let (poles, grid) = if needs_poles {
            if self.poles.is_empty() {
                return Err(missing("at least one [[scenario.poles]] entry"));
            }
            let grid = self.grid.as_ref().ok_or_else(|| missing("a [scenario.grid] table"))?;
            let pairs: Vec<(f64, f64)> = self.poles.iter().map(|p| (p.position, p.width)).collect();
            (
                Some(PoleSet::from_pairs(&pairs)?),
                Some(EnergyGrid::new(grid.min, grid.max, grid.points)?),
            )
        } else {
            (None, None)
        };
        if !self.background_phase.is_finite() {
            return Err(CliError::invalid(&name, "background_phase must be finite"));
        }

        let pole_count = self.poles.len();
        let coupling_states = match self.coupling_states {
            None => (0..pole_count).collect(),
            Some(labels) => labels
                .into_iter()
                .map(|label| {
                    if label == 0 || label > pole_count {
                        Err(CliError::invalid(
                            &name,
                            format!("coupling state {label} outside 1..={pole_count}"),
                        ))
                    } else {
                        Ok(label - 1)
                    }
                })
                .collect::<Result<Vec<_>, _>>()?,
        };

        let needs_hamiltonian = outputs.contains(&Product::Trapping) || outputs.contains(&Product::Crossing);
        let hamiltonian = match (self.hamiltonian, needs_hamiltonian) {
            (Some(config), true) => Some(config.into_spec(&name, &outputs, origin)?),
            (None, true) => return Err(missing("a [scenario.hamiltonian] table")),
            (_, false) => None,
        };

        Ok(Scenario {
            name,
            outputs,
            poles,
            grid,
            background_phase: self.background_phase,
            coupling_states,
            hamiltonian,
        })
    }
}

impl HamiltonianConfig {
    fn into_spec(self, name: &str, outputs: &BTreeSet<Product>, origin: &str) -> Result<HamiltonianSpec, CliError> {
        let h0 = matrix(&self.h0, "h0", name)?;
        let n = h0.nrows();
        let couplings = self.couplings.iter().map(|v| DVector::from_column_slice(v)).collect();
        let base = EffectiveHamiltonian::new(h0, couplings, self.alpha)?;
        let slope = match &self.h0_slope {
            Some(rows) => matrix(rows, "h0_slope", name)?,
            None => DMatrix::zeros(n, n),
        };
        let family = LinearFamily::new(base, slope, self.alpha_slope)?;
        let missing = |what: &str| config_error(origin, format!("scenario `{name}` needs {what}"));

        let crossing = match self.crossing {
            Some(c) => {
                let [k, l] = c.states;
                if k == 0 || l == 0 || k > n || l > n || k == l {
                    return Err(CliError::invalid(
                        name,
                        format!("crossing states [{k}, {l}] must be distinct and in 1..={n}"),
                    ));
                }
                Some(CrossingSpec {
                    grid: EnergyGrid::new(c.min, c.max, c.points)?.to_vec(),
                    states: (k - 1, l - 1),
                })
            }
            None if outputs.contains(&Product::Crossing) => {
                return Err(missing("a [scenario.hamiltonian.crossing] table"))
            }
            None => None,
        };
        let trapping = match self.trapping {
            Some(t) => Some(t.alphas(name)?),
            None if outputs.contains(&Product::Trapping) => {
                return Err(missing("a [scenario.hamiltonian.trapping] table"))
            }
            None => None,
        };
        Ok(HamiltonianSpec {
            family,
            crossing,
            trapping,
        })
    }
}

impl TrappingConfig {
    fn alphas(&self, name: &str) -> Result<Vec<f64>, CliError> {
        match self.spacing {
            Spacing::Linear => {
                if self.alpha_min < 0.0 {
                    return Err(CliError::invalid(name, "alpha_min must be non-negative"));
                }
                let mut grid = EnergyGrid::new(self.alpha_min, self.alpha_max, self.points)?.to_vec();
                if self.include_zero && self.alpha_min > 0.0 {
                    grid.insert(0, 0.0);
                }
                Ok(grid)
            }
            Spacing::Log => {
                if self.alpha_min.is_nan() || self.alpha_min <= 0.0 {
                    return Err(CliError::invalid(name, "logarithmic spacing needs alpha_min > 0"));
                }
                let exponents = EnergyGrid::new(self.alpha_min.log10(), self.alpha_max.log10(), self.points)?;
                let mut grid: Vec<f64> = exponents.iter().map(|x| 10f64.powf(x)).collect();
                // Endpoints exactly as configured.
                grid[0] = self.alpha_min;
                *grid.last_mut().expect("at least two points") = self.alpha_max;
                if self.include_zero {
                    grid.insert(0, 0.0);
                }
                Ok(grid)
            }
        }
    }
}
