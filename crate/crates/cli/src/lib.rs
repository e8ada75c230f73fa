//! Command dispatch and report serialization for the `divrisk` binary.

use std::fmt::{self, Write as _};
use std::path::PathBuf;

use divrisk::norms::norm_report;
use divrisk::portfolio::PortfolioOptions;
use divrisk::risk::RiskOptions;
use divrisk::{
    alpha_bar, dual_norm, evaluate_primal_with, minimize_portfolio_risk_with, solve_dual,
    DivergenceSpec,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Risk,
    Dual,
    Norm,
    Dualnorm,
    Avar,
    Portfolio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub divergence: String,
    /// Required by every command except `avar`.
    pub beta: Option<f64>,
    /// Required by `avar`.
    pub alpha: Option<f64>,
    pub input: PathBuf,
    pub output: OutputFormat,
    /// Overrides the primal search tolerance and the portfolio stopping tolerance.
    pub tol: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] divrisk::Error),
}

impl CliError {
    /// 2 for parse errors, 3 for exhausted bracket searches, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(divrisk::Error::Parse { .. }) => 2,
            CliError::Core(divrisk::Error::Bracket { .. }) => 3,
            _ => 1,
        }
    }

    /// Probed `(argument, value)` pairs of a failed bracket search.
    pub fn trace(&self) -> Option<&[(f64, f64)]> {
        match self {
            CliError::Core(divrisk::Error::Bracket { trace, .. }) => Some(trace),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub divergence: String,
    pub beta: f64,
    pub value: f64,
    pub t_star: Option<f64>,
    pub mu_star: Option<f64>,
    pub attained: bool,
    pub mean_residual: Option<f64>,
    pub divergence_residual: Option<f64>,
    pub alpha_bar: f64,
    /// `AVaR` at `alpha_bar`, a lower bound for `value`.
    pub avar_lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualReport {
    pub divergence: String,
    pub beta: f64,
    pub objective: f64,
    pub z: Vec<f64>,
    pub mean_slack: f64,
    pub divergence_slack: f64,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormsReport {
    pub divergence: String,
    pub beta: f64,
    pub phi_beta_norm: f64,
    pub young_beta_norm: f64,
    pub luxemburg: f64,
    pub orlicz: f64,
    pub orlicz_phi: f64,
    pub luxemburg_psi: f64,
    pub gap: f64,
    pub psi_at_one: f64,
    pub dual_norm: Option<f64>,
    pub c_lambda_trace: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualNormReport {
    pub divergence: String,
    pub beta: f64,
    pub value: f64,
    pub c_star: f64,
    pub witness: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvarReport {
    pub alpha: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioReport {
    pub divergence: String,
    pub beta: f64,
    pub assets: Vec<String>,
    pub weights: Vec<f64>,
    pub value: f64,
    pub t_star: Option<f64>,
    pub mu_star: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Report {
    Risk(RiskReport),
    Dual(DualReport),
    Norm(NormsReport),
    Dualnorm(DualNormReport),
    Avar(AvarReport),
    Portfolio(PortfolioReport),
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports hold only finite numbers and strings")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Text => self.to_string(),
        }
    }
}

/// `key: value` lines, one per field.
impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let value = serde_json::to_value(self).map_err(|_| fmt::Error)?;
        let mut out = String::new();
        if let serde_json::Value::Object(map) = value {
            for (k, v) in map {
                let shown = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Null => "-".to_string(),
                    other => other.to_string(),
                };
                writeln!(out, "{k}: {shown}")?;
            }
        }
        f.write_str(out.trim_end())
    }
}

fn need_beta(cfg: &RunConfig) -> Result<f64, CliError> {
    match cfg.beta {
        Some(b) if b.is_finite() && b > 0.0 => Ok(b),
        Some(b) => Err(CliError::Config(format!(
            "--beta must be positive, got {b}"
        ))),
        None => Err(CliError::Config(
            format!("--beta is required for {:?}", cfg.command).to_lowercase(),
        )),
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    if let Some(tol) = cfg.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Config(format!(
                "--tol must be positive, got {tol}"
            )));
        }
    }
    if cfg.command == Command::Avar {
        let alpha = cfg
            .alpha
            .ok_or_else(|| CliError::Config("--alpha is required for avar".into()))?;
        if !(0.0..1.0).contains(&alpha) {
            return Err(CliError::Config(format!(
                "--alpha must lie in [0, 1), got {alpha}"
            )));
        }
        let x = divrisk::io::read_samples(&cfg.input)?;
        return Ok(Report::Avar(AvarReport {
            alpha,
            value: x.avar(alpha)?,
        }));
    }

    let beta = need_beta(cfg)?;
    let spec: DivergenceSpec = cfg.divergence.parse()?;
    let divergence = spec.to_string();
    let risk_opts = RiskOptions {
        tol: cfg.tol.unwrap_or(RiskOptions::default().tol),
        ..RiskOptions::default()
    };

    if cfg.command == Command::Portfolio {
        let panel = divrisk::io::read_panel(&cfg.input)?;
        let opts = PortfolioOptions {
            tol: cfg.tol.unwrap_or(PortfolioOptions::default().tol),
            ..PortfolioOptions::default()
        };
        let sol = minimize_portfolio_risk_with(&panel, &spec, beta, &opts)?;
        return Ok(Report::Portfolio(PortfolioReport {
            divergence,
            beta,
            assets: panel.names().to_vec(),
            weights: sol.weights,
            value: sol.risk,
            t_star: sol.t_star,
            mu_star: sol.mu_star,
            iterations: sol.iterations,
            converged: sol.converged,
        }));
    }

    let x = divrisk::io::read_samples(&cfg.input)?;
    log::info!("{} atoms from {}", x.len(), cfg.input.display());
    Ok(match cfg.command {
        Command::Risk => {
            let eval = evaluate_primal_with(&x, &spec, beta, &risk_opts)?;
            let a = alpha_bar(&spec, beta)?;
            Report::Risk(RiskReport {
                divergence,
                beta,
                value: eval.value,
                t_star: eval.t_star,
                mu_star: eval.mu_star,
                attained: eval.attained,
                mean_residual: eval.residuals.map(|r| r.0),
                divergence_residual: eval.residuals.map(|r| r.1),
                alpha_bar: a,
                avar_lower_bound: x.avar(a)?,
            })
        }
        Command::Dual => {
            let sol = solve_dual(&x, &spec, beta)?;
            Report::Dual(DualReport {
                divergence,
                beta,
                objective: sol.objective,
                z: sol.z,
                mean_slack: sol.mean_slack,
                divergence_slack: sol.divergence_slack,
                source: sol.source.as_str().to_string(),
            })
        }
        Command::Norm => {
            let r = norm_report(&x, &spec, beta)?;
            Report::Norm(NormsReport {
                divergence,
                beta,
                phi_beta_norm: r.phi_beta_norm,
                young_beta_norm: r.young_beta_norm,
                luxemburg: r.luxemburg,
                orlicz: r.orlicz,
                orlicz_phi: r.orlicz_phi,
                luxemburg_psi: r.luxemburg_psi,
                gap: r.gap,
                psi_at_one: r.psi_at_one,
                dual_norm: r.dual_norm,
                c_lambda_trace: r.c_lambda_trace,
            })
        }
        Command::Dualnorm => {
            let dn = dual_norm(&x, &spec, beta)?;
            Report::Dualnorm(DualNormReport {
                divergence,
                beta,
                value: dn.value,
                c_star: dn.c_star,
                witness: dn.witness,
            })
        }
        Command::Avar | Command::Portfolio => unreachable!("handled above"),
    })
}
