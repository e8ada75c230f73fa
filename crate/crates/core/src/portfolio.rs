//! Long-only portfolios minimizing `ρ(Σ w_i X_i)` over the probability simplex.

use crate::divergence::Divergence;
use crate::empirical::EmpiricalDistribution;
use crate::error::{check_beta, Error, Result};
use crate::exec::Execution;
use crate::risk::evaluate_primal;

/// Scenario-by-asset loss matrix with scenario probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetPanel {
    names: Vec<String>,
    losses: Vec<f64>,
    probs: Vec<f64>,
}

impl AssetPanel {
    /// `rows[s][i]` is the loss of asset `i` in scenario `s`. Without `probs`
    /// the scenarios are equally likely.
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>, probs: Option<Vec<f64>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Panel("no assets".into()));
        }
        if rows.is_empty() {
            return Err(Error::Panel("no scenarios".into()));
        }
        let mut losses = Vec::with_capacity(rows.len() * n);
        for (s, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Panel(format!(
                    "scenario {s} has {} losses for {n} assets",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Panel(format!(
                    "scenario {s} has non-finite loss {v}"
                )));
            }
            losses.extend_from_slice(row);
        }
        let probs = match probs {
            Some(p) => {
                if p.len() != rows.len() {
                    return Err(Error::Panel(format!(
                        "{} probabilities for {} scenarios",
                        p.len(),
                        rows.len()
                    )));
                }
                // Validates positivity and total mass.
                EmpiricalDistribution::new(vec![0.0; p.len()], p.clone())
                    .map_err(|e| Error::Panel(format!("scenario probabilities: {e}")))?;
                p
            }
            None => vec![1.0 / rows.len() as f64; rows.len()],
        };
        Ok(Self {
            names,
            losses,
            probs,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_assets(&self) -> usize {
        self.names.len()
    }

    pub fn n_scenarios(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn loss(&self, scenario: usize, asset: usize) -> f64 {
        self.losses[scenario * self.n_assets() + asset]
    }

    /// The loss `X_w = Σ w_i X_i`.
    pub fn combine(&self, w: &[f64]) -> Result<EmpiricalDistribution> {
        if w.len() != self.n_assets() {
            return Err(Error::Dimension {
                expected: self.n_assets(),
                found: w.len(),
            });
        }
        let atoms = self
            .losses
            .chunks(self.n_assets())
            .map(|row| row.iter().zip(w).map(|(l, w)| l * w).sum())
            .collect();
        EmpiricalDistribution::new(atoms, self.probs.clone())
    }

    pub fn asset(&self, i: usize) -> Result<EmpiricalDistribution> {
        let mut w = vec![0.0; self.n_assets()];
        w[i] = 1.0;
        self.combine(&w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioSolution {
    pub weights: Vec<f64>,
    pub risk: f64,
    pub t_star: Option<f64>,
    pub mu_star: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Controls for [`minimize_portfolio_risk_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortfolioOptions {
    /// Initial step length; step `k` has length `step/k`.
    pub step: f64,
    /// Converged once the best risk improves by less than `tol` over `window` iterations.
    pub tol: f64,
    pub window: usize,
    pub min_iter: usize,
    pub max_iter: usize,
}

impl Default for PortfolioOptions {
    fn default() -> Self {
        Self {
            step: 0.5,
            tol: 1e-8,
            window: 20,
            min_iter: 50,
            max_iter: 2000,
        }
    }
}

pub fn minimize_portfolio_risk<D: Divergence + ?Sized>(
    panel: &AssetPanel,
    div: &D,
    beta: f64,
) -> Result<PortfolioSolution> {
    minimize_portfolio_risk_with(panel, div, beta, &PortfolioOptions::default())
}

/// Projected subgradient descent on the simplex.
///
/// The subgradient of `w ↦ ρ(X_w)` is `E[X_i Z]` with Z the maximizing density
/// at the current weights.
pub fn minimize_portfolio_risk_with<D: Divergence + ?Sized>(
    panel: &AssetPanel,
    div: &D,
    beta: f64,
    opts: &PortfolioOptions,
) -> Result<PortfolioSolution> {
    check_beta(beta)?;
    let n = panel.n_assets();
    let mut w = vec![1.0 / n as f64; n];
    let mut best_w = w.clone();
    let mut best = f64::INFINITY;
    // Vertices seed the incumbent: diminishing steps may stall short of a corner.
    for i in 0..n {
        let r = evaluate_primal(&panel.asset(i)?, div, beta)?.value;
        if r < best {
            best = r;
            best_w = vec![0.0; n];
            best_w[i] = 1.0;
        }
    }
    let mut history = Vec::new();
    let mut converged = n == 1;
    let mut iterations = 0;

    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let x = panel.combine(&w)?;
        let eval = evaluate_primal(&x, div, beta)?;
        if eval.value < best {
            best = eval.value;
            best_w.clone_from(&w);
        }
        history.push(best);
        let k = history.len();
        if k >= opts.min_iter.max(opts.window + 1) && history[k - 1 - opts.window] - best < opts.tol
        {
            converged = true;
            break;
        }

        let z = eval.density(&x, div);
        let g: Vec<f64> = (0..n)
            .map(|i| {
                (0..panel.n_scenarios())
                    .map(|s| panel.probs[s] * panel.loss(s, i) * z[s])
                    .sum()
            })
            .collect();
        let mean = g.iter().sum::<f64>() / n as f64;
        let d: Vec<f64> = g.iter().map(|g| g - mean).collect();
        let norm = d.iter().map(|d| d * d).sum::<f64>().sqrt();
        if norm == 0.0 {
            converged = true;
            break;
        }
        let eta = opts.step / iterations as f64;
        let v: Vec<f64> = w.iter().zip(&d).map(|(w, d)| w - eta * d / norm).collect();
        w = project_simplex(&v);
    }

    let x = panel.combine(&best_w)?;
    let eval = evaluate_primal(&x, div, beta)?;
    log::debug!("portfolio: {iterations} iterations, risk {}", eval.value);
    Ok(PortfolioSolution {
        weights: best_w,
        risk: eval.value,
        t_star: eval.t_star,
        mu_star: eval.mu_star,
        iterations,
        converged,
    })
}

/// Euclidean projection onto `{w ≥ 0, Σ w = 1}` by the sort-based method.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    let w: Vec<f64> = v.iter().map(|v| (v - theta).max(0.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|w| w / total).collect()
}

/// `min_k ρ(X_{w(k)})` over `w₁ = k/(resolution − 1)` for a two-asset panel.
pub fn grid_oracle_portfolio<D: Divergence + ?Sized>(
    panel: &AssetPanel,
    div: &D,
    beta: f64,
    resolution: usize,
) -> Result<f64> {
    grid_oracle_portfolio_with(panel, div, beta, resolution, Execution::default())
}

pub fn grid_oracle_portfolio_with<D: Divergence + ?Sized>(
    panel: &AssetPanel,
    div: &D,
    beta: f64,
    resolution: usize,
    exec: Execution,
) -> Result<f64> {
    check_beta(beta)?;
    if panel.n_assets() != 2 {
        return Err(Error::Panel(format!(
            "grid oracle needs exactly 2 assets, got {}",
            panel.n_assets()
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidParameter {
            name: "resolution",
            value: resolution as f64,
            reason: "need at least both corners",
        });
    }
    let risk = |k: usize| -> f64 {
        let w1 = k as f64 / (resolution - 1) as f64;
        panel
            .combine(&[w1, 1.0 - w1])
            .and_then(|x| evaluate_primal(&x, div, beta))
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };
    Ok(exec.min_over(resolution, risk))
}
