//! Divergence-based coherent risk measures on finitely supported random variables.
//!
//! The risk of a loss `X` is
//!
//! ```text
//! ρ_{φ,β}(X) = inf_{t > 0, μ} t·(β + μ + E ψ(X/t − μ))
//!            = sup { E[XZ] : Z ≥ 0, E Z = 1, E φ(Z) ≤ β }
//! ```
//!
//! where φ is a divergence function and ψ its convex conjugate. The crate
//! evaluates both sides, the norms induced by ρ and its dual, and minimizes ρ
//! over long-only portfolios. Brute-force grid oracles are provided for small
//! instances.

// `!(a <= b)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod divergence;
pub mod dual;
pub mod empirical;
pub mod error;
pub mod exec;
pub mod io;
pub mod norms;
pub mod portfolio;
pub mod risk;
mod search;

pub use divergence::{
    discrete_divergence, numeric_conjugate, Builtin, Delta2, Divergence, DivergenceSpec, YoungPair,
};
pub use dual::{
    brute_force_dual, brute_force_dual_with, divergence_ball_form, optimal_density, solve_dual,
    DualSolution, DualSource,
};
pub use empirical::{EmpiricalDistribution, StepSpectrum};
pub use error::{Error, Result};
pub use exec::Execution;
pub use norms::{
    amemiya_with, c_z, dual_norm, luxemburg_norm, luxemburg_with, norm_report, orlicz_norm,
    phi_beta_norm, DualNorm, NormReport,
};
pub use portfolio::{
    grid_oracle_portfolio, grid_oracle_portfolio_with, minimize_portfolio_risk,
    minimize_portfolio_risk_with, AssetPanel, PortfolioOptions, PortfolioSolution,
};
pub use risk::{
    alpha_bar, avar_lower_bound, evaluate_primal, evaluate_primal_with, is_attained,
    primal_objective, solve_characterizing_equations, Multipliers, RiskEvaluation, RiskOptions,
};
