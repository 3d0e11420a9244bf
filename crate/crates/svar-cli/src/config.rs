//! The declarative run configuration: one document with a nested process
//! block plus flat keys for everything else. CLI flags override the
//! corresponding keys; the hash embedded in artifacts is taken over the
//! effective (post-override) configuration.

use serde::{Deserialize, Serialize};

use svar_core::checks::CheckTolerances;
use svar_core::process::{markov_to_finite_joint, stationary_distribution, Autocovariance};
use svar_core::ProcessModel;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProcessSpec {
    /// I.i.d. observations, described by raw moments, a normal sigma, or an
    /// explicit finite marginal (exactly one of the three).
    Iid {
        #[serde(skip_serializing_if = "Option::is_none")]
        raw_moments: Option<Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        normal_sigma: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        support: Option<Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        probs: Option<Vec<f64>>,
    },
    GaussianAr1 {
        phi: f64,
        innovation_sd: f64,
    },
    GaussianStationary {
        #[serde(default)]
        mean: f64,
        autocovariance: Vec<f64>,
    },
    Markov {
        states: Vec<f64>,
        transition: Vec<Vec<f64>>,
        /// Explicit distribution, or the string "stationary".
        initial: InitialDistribution,
    },
    Constant {
        value: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialDistribution {
    Named(String),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineChoice {
    Moment,
    Cumulant,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionChoice {
    pub kind: svar_core::ExpansionKind,
    pub order: u8,
}

/// The full configuration document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub process: ProcessSpec,
    pub n: usize,
    /// Highest cumulant order to compute (2..=4). Defaults to the largest
    /// order the sample size supports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_order: Option<u8>,
    /// Estimator table depth for the `moments` subcommand (1..=4).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_group: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<EngineChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion: Option<ExpansionChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Density/CDF grid columns; defaults to every supported series.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<CheckTolerances>,
    /// Explicit covariance matrix for `chisq-check`; built from the process
    /// when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covariance: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chisq_tol: Option<f64>,
}

impl RunConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 2 {
            return Err(CliError::Config(format!(
                "violated precondition: n >= 2 (got n = {})",
                self.n
            )));
        }
        let max_order = self.effective_max_order();
        if !(2..=4).contains(&max_order) {
            return Err(CliError::Config(format!(
                "violated precondition: max_order in 2..=4 (got {max_order})"
            )));
        }
        if self.n < 2 * max_order as usize {
            return Err(CliError::Config(format!(
                "violated precondition: kappa_{max_order} needs n >= {} (got n = {})",
                2 * max_order,
                self.n
            )));
        }
        if let Some(group) = self.max_group {
            if !(1..=4).contains(&group) {
                return Err(CliError::Config(format!(
                    "violated precondition: max_group in 1..=4 (got {group})"
                )));
            }
            if self.n < 2 * group as usize {
                return Err(CliError::Config(format!(
                    "violated precondition: group {group} needs n >= {} (got n = {})",
                    2 * group,
                    self.n
                )));
            }
        }
        if let Some(grid) = &self.grid {
            if grid.points < 2 {
                return Err(CliError::Config(
                    "violated precondition: grid points >= 2".into(),
                ));
            }
            if grid.max <= grid.min || grid.max.is_nan() || grid.min.is_nan() {
                return Err(CliError::Config(
                    "violated precondition: grid max > min".into(),
                ));
            }
        }
        if let Some(expansion) = &self.expansion {
            let ok = matches!(
                (expansion.kind, expansion.order),
                (svar_core::ExpansionKind::GramCharlier, 0 | 3 | 4 | 6)
                    | (svar_core::ExpansionKind::Edgeworth, 1 | 2)
            );
            if !ok {
                return Err(CliError::Config(format!(
                    "violated precondition: unsupported expansion {:?} order {}",
                    expansion.kind, expansion.order
                )));
            }
        }
        self.build_model().map(|_| ())
    }

    /// Largest cumulant order requested (explicit key, else what n allows).
    pub fn effective_max_order(&self) -> u8 {
        self.max_order
            .unwrap_or_else(|| (self.n / 2).clamp(2, 4) as u8)
    }

    /// Instantiate the process model.
    pub fn build_model(&self) -> Result<ProcessModel, CliError> {
        let model = match &self.process {
            ProcessSpec::Iid {
                raw_moments,
                normal_sigma,
                support,
                probs,
            } => {
                let given = [
                    raw_moments.is_some(),
                    normal_sigma.is_some(),
                    support.is_some() || probs.is_some(),
                ]
                .iter()
                .filter(|&&present| present)
                .count();
                if given != 1 {
                    return Err(CliError::Config(
                        "iid process needs exactly one of raw_moments, normal_sigma, \
                         support+probs"
                            .into(),
                    ));
                }
                if let Some(moments) = raw_moments {
                    ProcessModel::iid(moments.clone())?
                } else if let Some(sigma) = normal_sigma {
                    ProcessModel::iid_normal(*sigma)?
                } else {
                    let (Some(support), Some(probs)) = (support, probs) else {
                        return Err(CliError::Config(
                            "iid support requires both support and probs".into(),
                        ));
                    };
                    ProcessModel::iid(ProcessModel::raw_moments_of_support(support, probs, 8))?
                }
            }
            ProcessSpec::GaussianAr1 { phi, innovation_sd } => {
                ProcessModel::gaussian_ar1(*phi, *innovation_sd)?
            }
            ProcessSpec::GaussianStationary {
                mean,
                autocovariance,
            } => ProcessModel::gaussian_stationary(
                *mean,
                Autocovariance::Table(autocovariance.clone()),
            )?,
            ProcessSpec::Markov {
                states,
                transition,
                initial,
            } => {
                let initial = match initial {
                    InitialDistribution::Explicit(p) => p.clone(),
                    InitialDistribution::Named(name) if name == "stationary" => {
                        stationary_distribution(transition)?
                    }
                    InitialDistribution::Named(other) => {
                        return Err(CliError::Config(format!(
                            "unknown initial distribution {other:?} (expected \"stationary\" \
                             or an explicit vector)"
                        )))
                    }
                };
                markov_to_finite_joint(states, transition, &initial, self.n)?
            }
            ProcessSpec::Constant { value } => ProcessModel::constant(*value, self.n)?,
        };
        Ok(model)
    }

    /// The marginal sigma when the process is exactly i.i.d. normal (the
    /// only case where the Gamma reference column is mathematically exact).
    pub fn iid_normal_sigma(&self) -> Option<f64> {
        match &self.process {
            ProcessSpec::Iid {
                normal_sigma: Some(sigma),
                ..
            } => Some(*sigma),
            _ => None,
        }
    }

    /// The finite marginal when the process is i.i.d. with explicit support
    /// (lets `validate` run the exact-law oracle on i.i.d. configs too).
    pub fn iid_support(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.process {
            ProcessSpec::Iid {
                support: Some(support),
                probs: Some(probs),
                ..
            } => Some((support.clone(), probs.clone())),
            _ => None,
        }
    }

    /// Covariance matrix for the chi-squared exactness check: explicit if
    /// given, else the Toeplitz matrix of a Gaussian process, else the
    /// scaled identity of an i.i.d. normal process.
    pub fn chisq_covariance(&self) -> Result<Vec<Vec<f64>>, CliError> {
        if let Some(matrix) = &self.covariance {
            return Ok(matrix.clone());
        }
        let n = self.n;
        match &self.process {
            ProcessSpec::GaussianAr1 { phi, innovation_sd } => {
                let variance = innovation_sd * innovation_sd / (1.0 - phi * phi);
                Ok(toeplitz(n, |lag| variance * phi.powi(lag as i32)))
            }
            ProcessSpec::GaussianStationary { autocovariance, .. } => Ok(toeplitz(n, |lag| {
                autocovariance.get(lag).copied().unwrap_or(0.0)
            })),
            ProcessSpec::Iid {
                normal_sigma: Some(sigma),
                ..
            } => Ok(toeplitz(n, |lag| {
                if lag == 0 {
                    sigma * sigma
                } else {
                    0.0
                }
            })),
            _ => Err(CliError::Config(
                "chisq-check needs an explicit covariance or a Gaussian process".into(),
            )),
        }
    }
}

fn toeplitz(n: usize, gamma: impl Fn(usize) -> f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| gamma(i.abs_diff(j))).collect())
        .collect()
}
