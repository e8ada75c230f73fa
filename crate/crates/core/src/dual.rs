//! The dual side `sup { E[XZ] : Z ≥ 0, E Z = 1, E φ(Z) ≤ β }` on a finite atom set.

use crate::divergence::{divergence_unchecked, Divergence};
use crate::empirical::EmpiricalDistribution;
use crate::error::{check_beta, Error, Result};
use crate::exec::Execution;
use crate::risk::{
    characterizing_residuals, primal_objective, solve_characterizing_equations, top_density,
};
use crate::search::bisect;

/// Residual bound for multipliers handed to [`optimal_density`].
pub const MULTIPLIER_TOL: f64 = 1e-6;

/// Slack allowed on `E φ(Z) ≤ β` and `Σ q = 1` when judging feasibility.
pub const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualSource {
    CharacterizingEquations,
    /// All mass on the largest atoms; optimal whenever it is feasible.
    Boundary,
    ProjectedAscent,
    BruteForce,
}

impl DualSource {
    pub fn as_str(self) -> &'static str {
        match self {
            DualSource::CharacterizingEquations => "characterizing-equations",
            DualSource::Boundary => "boundary",
            DualSource::ProjectedAscent => "projected-ascent",
            DualSource::BruteForce => "brute-force",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub z: Vec<f64>,
    pub objective: f64,
    /// `|E Z − 1|`.
    pub mean_slack: f64,
    /// `β − E φ(Z)`.
    pub divergence_slack: f64,
    pub source: DualSource,
}

impl DualSolution {
    fn new<D: Divergence + ?Sized>(
        dist: &EmpiricalDistribution,
        div: &D,
        beta: f64,
        z: Vec<f64>,
        source: DualSource,
    ) -> Self {
        let p = dist.probs();
        let mean: f64 = z.iter().zip(p).map(|(z, p)| z * p).sum();
        Self {
            objective: dist.weighted_mean(&z),
            mean_slack: (mean - 1.0).abs(),
            divergence_slack: beta - mean_phi(&z, p, div),
            z,
            source,
        }
    }

    /// The measure `q_i = p_i z_i`.
    pub fn measure(&self, dist: &EmpiricalDistribution) -> Vec<f64> {
        weighted(&self.z, dist.probs())
    }
}

fn weighted(z: &[f64], p: &[f64]) -> Vec<f64> {
    z.iter().zip(p).map(|(z, p)| z * p).collect()
}

fn mean_phi<D: Divergence + ?Sized>(z: &[f64], p: &[f64], div: &D) -> f64 {
    z.iter().zip(p).map(|(&z, &p)| p * div.phi(z)).sum()
}

/// Maximizes `E[XZ]` over the divergence ball.
///
/// Tries, in order: the density built from the characterizing equations, the
/// boundary density `1_{X = esssup X}/P(X = esssup X)` when it is feasible, and
/// projected ascent with feasibility restored by mixing toward `Z ≡ 1`.
pub fn solve_dual<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
) -> Result<DualSolution> {
    check_beta(beta)?;
    if let Some(m) = solve_characterizing_equations(dist, div, beta)? {
        match optimal_density(dist, div, beta, m.t_star, m.mu_star) {
            Ok(sol) => return Ok(sol),
            Err(e) => log::debug!("solve_dual: equations route rejected: {e}"),
        }
    }
    let top = top_density(dist);
    if mean_phi(&top, dist.probs(), div) <= beta {
        return Ok(DualSolution::new(
            dist,
            div,
            beta,
            top,
            DualSource::Boundary,
        ));
    }
    log::debug!("solve_dual: falling back to projected ascent");
    Ok(projected_ascent(dist, div, beta, &AscentOptions::default()))
}

/// `Z* = ψ′(X/t* − μ*)` for multipliers solving the characterizing equations.
pub fn optimal_density<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
    t_star: f64,
    mu_star: f64,
) -> Result<DualSolution> {
    check_beta(beta)?;
    let (r1, r2) = characterizing_residuals(dist, div, beta, t_star, mu_star);
    if !(r1.abs() <= MULTIPLIER_TOL && r2.abs() <= MULTIPLIER_TOL) {
        return Err(Error::StaleMultipliers {
            mean_residual: r1,
            divergence_residual: r2,
        });
    }
    let z = dist
        .atoms()
        .iter()
        .map(|&x| div.psi_prime(x / t_star - mu_star))
        .collect();
    let sol = DualSolution::new(dist, div, beta, z, DualSource::CharacterizingEquations);
    let plug = primal_objective(dist, div, beta, t_star, mu_star);
    debug_assert!(
        (sol.objective - plug).abs() <= 1e-6 * (1.0 + plug.abs()),
        "E[XZ*] = {} but primal objective = {plug}",
        sol.objective
    );
    Ok(sol)
}

/// Controls for [`projected_ascent`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentOptions {
    /// Stop when the objective gains less than this over `window` iterations.
    pub tol: f64,
    pub window: usize,
    pub max_iter: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            window: 50,
            max_iter: 20_000,
        }
    }
}

/// Projected ascent on the concave dual program.
///
/// Each step moves along `X − E X`, projects onto `{Z ≥ 0, E Z = 1}` and then
/// pulls back toward `Z ≡ 1` until `E φ(Z) ≤ β`.
pub fn projected_ascent<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
    opts: &AscentOptions,
) -> DualSolution {
    let p = dist.probs();
    let x = dist.atoms();
    let mean = dist.mean();
    let dir: Vec<f64> = x.iter().map(|&x| x - mean).collect();
    let scale = dir.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if scale == 0.0 {
        return DualSolution::new(
            dist,
            div,
            beta,
            vec![1.0; x.len()],
            DualSource::ProjectedAscent,
        );
    }

    let mut z = restore(&top_density(dist), p, div, beta);
    let mut best = dist.weighted_mean(&z);
    let mut history = vec![best];
    let mut step = 1.0 / scale;
    for _ in 0..opts.max_iter {
        let mut improved = false;
        for _ in 0..60 {
            let v: Vec<f64> = z.iter().zip(&dir).map(|(z, d)| z + step * d).collect();
            let cand = restore(&project_mean_one(&v, p), p, div, beta);
            let val = dist.weighted_mean(&cand);
            if val > best {
                z = cand;
                best = val;
                improved = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        history.push(best);
        let k = history.len();
        if !improved
            || (k > opts.window && history[k - 1] - history[k - 1 - opts.window] < opts.tol)
        {
            break;
        }
    }
    DualSolution::new(dist, div, beta, z, DualSource::ProjectedAscent)
}

/// Euclidean projection in `L²(p)` onto `{z ≥ 0, Σ p z = 1}`: `z = (v − τ)₊`.
fn project_mean_one(v: &[f64], p: &[f64]) -> Vec<f64> {
    let mass = |tau: f64| -> f64 { v.iter().zip(p).map(|(v, p)| p * (v - tau).max(0.0)).sum() };
    let hi_v = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo_v = v.iter().cloned().fold(f64::INFINITY, f64::min);
    // mass(hi_v) = 0 < 1 and mass(lo_v − 1) ≥ 1.
    let (_, tau) = bisect(|tau| mass(tau) < 1.0, lo_v - 1.0, hi_v, 200);
    let tau = if mass(tau) >= 1.0 { tau } else { lo_v - 1.0 };
    let z: Vec<f64> = v.iter().map(|v| (v - tau).max(0.0)).collect();
    let total: f64 = z.iter().zip(p).map(|(z, p)| z * p).sum();
    z.iter().map(|z| z / total).collect()
}

/// Largest mixture `(1 − θ)·1 + θ·z` with `E φ ≤ β`.
fn restore<D: Divergence + ?Sized>(z: &[f64], p: &[f64], div: &D, beta: f64) -> Vec<f64> {
    let mix = |theta: f64| -> Vec<f64> { z.iter().map(|z| 1.0 - theta + theta * z).collect() };
    if mean_phi(z, p, div) <= beta {
        return z.to_vec();
    }
    let (theta, _) = bisect(|th| mean_phi(&mix(th), p, div) > beta, 0.0, 1.0, 200);
    mix(theta)
}

/// Grid oracle for `sup E[XZ]` on up to three atoms.
pub fn brute_force_dual<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
) -> Result<f64> {
    brute_force_dual_with(dist, div, beta, Execution::default())
}

/// Points of the one-dimensional grid used for two atoms.
pub const GRID_2: usize = 1_000_001;
/// Points per axis of the grid used for three atoms.
pub const GRID_3: usize = 3000;

pub fn brute_force_dual_with<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
    exec: Execution,
) -> Result<f64> {
    check_beta(beta)?;
    let (x, p) = (dist.atoms(), dist.probs());
    // Z ≡ 1 is always feasible; the grid may step over it.
    let mean = dist.mean();
    let best = match x.len() {
        1 => return Ok(x[0]),
        2 => {
            let hi = 1.0 / p[0];
            exec.max_over(GRID_2, |k| {
                let z1 = hi * k as f64 / (GRID_2 - 1) as f64;
                let z2 = ((1.0 - p[0] * z1) / p[1]).max(0.0);
                if p[0] * div.phi(z1) + p[1] * div.phi(z2) <= beta {
                    p[0] * x[0] * z1 + p[1] * x[1] * z2
                } else {
                    f64::NEG_INFINITY
                }
            })
        }
        3 => {
            let hi = 1.0 / p[0];
            exec.max_over(GRID_3, |i| {
                let z1 = hi * i as f64 / (GRID_3 - 1) as f64;
                let rest = (1.0 - p[0] * z1).max(0.0);
                let base = p[0] * div.phi(z1);
                if base > beta {
                    return f64::NEG_INFINITY;
                }
                let hi2 = rest / p[1];
                let mut row = f64::NEG_INFINITY;
                for j in 0..GRID_3 {
                    let z2 = hi2 * j as f64 / (GRID_3 - 1) as f64;
                    let z3 = ((rest - p[1] * z2) / p[2]).max(0.0);
                    if base + p[1] * div.phi(z2) + p[2] * div.phi(z3) <= beta {
                        row = row.max(p[0] * x[0] * z1 + p[1] * x[1] * z2 + p[2] * x[2] * z3);
                    }
                }
                row
            })
        }
        n => return Err(Error::OracleSize { max: 3, found: n }),
    };
    Ok(best.max(mean))
}

/// `(E_Q X, D_φ(Q‖P) ≤ β)` for a measure `q` on the atoms.
pub fn divergence_ball_form<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
    q: &[f64],
) -> Result<(f64, bool)> {
    check_beta(beta)?;
    let p = dist.probs();
    if q.len() != p.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            found: q.len(),
        });
    }
    if let Some(index) = q.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidValue {
            index,
            value: q[index],
        });
    }
    let total: f64 = q.iter().sum();
    if (total - 1.0).abs() > FEASIBILITY_TOL {
        return Err(Error::Domain {
            what: "total mass of q",
            value: total,
        });
    }
    let expectation = q.iter().zip(dist.atoms()).map(|(q, x)| q * x).sum();
    let feasible = divergence_unchecked(q, p, div) <= beta + FEASIBILITY_TOL;
    Ok((expectation, feasible))
}
