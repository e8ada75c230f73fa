//! Norms induced by the risk measure and by the Young pair of a divergence.
//!
//! For a Young function `F`:
//!
//! * Luxemburg norm `inf{λ > 0 : E F(|X|/λ) ≤ 1}`,
//! * Amemiya form of the Orlicz norm `inf_{t > 0} t·(1 + E F(|X|/t))`.
//!
//! The Amemiya form taken with `F = Ψ` is the Orlicz-type norm that is
//! equivalent to `‖X‖_{Φ,β} = ρ_{Φ,β}(|X|)` with constants `1/max(1, β)` and
//! `(Ψ(1) + 1)/min(1, β)`. Luxemburg and Amemiya norms of the same Young
//! function differ by at most a factor 2.

use crate::divergence::{Divergence, DivergenceSpec, YoungPair};
use crate::empirical::EmpiricalDistribution;
use crate::error::{check_beta, Error, Result};
use crate::risk::evaluate_primal;
use crate::search::{bisect, log_scan_golden};

/// `‖X‖_{φ,β} = ρ_{φ,β}(|X|)`.
pub fn phi_beta_norm<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
) -> Result<f64> {
    Ok(evaluate_primal(&dist.abs(), div, beta)?.value)
}

/// Luxemburg norm for the Young function Φ of `pair`.
pub fn luxemburg_norm(dist: &EmpiricalDistribution, pair: &YoungPair) -> f64 {
    luxemburg_with(dist, |x| pair.phi(x))
}

/// `inf_t t·(1 + E Ψ(|X|/t))` for the conjugate Ψ of `pair`.
pub fn orlicz_norm(dist: &EmpiricalDistribution, pair: &YoungPair) -> f64 {
    amemiya_with(dist, |y| pair.psi(y))
}

/// Luxemburg norm of an arbitrary Young function `young`.
pub fn luxemburg_with(dist: &EmpiricalDistribution, young: impl Fn(f64) -> f64) -> f64 {
    let top = dist.abs().esssup();
    if top == 0.0 {
        return 0.0;
    }
    let level = |lam: f64| dist.expectation(|x| young(x.abs() / lam));
    // E F(|X|/λ) ≤ 1 holds at λ = ∞ and fails as λ → 0 by superlinear growth.
    let mut hi = top;
    while level(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while level(lo) <= 1.0 {
        lo *= 0.5;
        if lo < top * 1e-300 {
            return 0.0;
        }
    }
    bisect(|lam| level(lam) <= 1.0, lo, hi, 200).1
}

/// Amemiya form `inf_t t·(1 + E F(|X|/t))` of an arbitrary Young function.
pub fn amemiya_with(dist: &EmpiricalDistribution, young: impl Fn(f64) -> f64) -> f64 {
    let top = dist.abs().esssup();
    if top == 0.0 {
        return 0.0;
    }
    let f = |t: f64| t * (1.0 + dist.expectation(|x| young(x.abs() / t)));
    let (mut lo, mut hi) = (top * 1e-6, top * 1e6);
    let mut best = (top, f(top));
    for _ in 0..6 {
        best = log_scan_golden(f, lo, hi, 80, 1e-12);
        if best.0 <= lo * 1.001 {
            lo *= 1e-6;
        } else if best.0 >= hi / 1.001 {
            hi *= 1e6;
        } else {
            break;
        }
    }
    best.1
}

/// Outcome of [`dual_norm`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualNorm {
    pub value: f64,
    /// `c_Z(λ*)`.
    pub c_star: f64,
    /// `Z* = max(c_Z(λ*), |Z|/λ*)`: `E Z* = 1` and, in the non-trivial case, `E φ(Z*) = β`.
    pub witness: Vec<f64>,
}

/// The `c` solving `E max(c, |Z|/λ) = 1` for `λ ≥ E|Z|`.
///
/// At `λ = E|Z|` any `c ≤ essinf |Z|/λ` works and the boundary value
/// `essinf |Z|/E|Z|` is returned.
pub fn c_z(z: &EmpiricalDistribution, lambda: f64) -> Result<f64> {
    let m = z.expectation(f64::abs);
    if !(lambda.is_finite() && lambda >= m && lambda > 0.0) {
        return Err(Error::Domain {
            what: "λ below E|Z|",
            value: lambda,
        });
    }
    let floor = z.abs().essinf() / lambda;
    let level = |c: f64| z.expectation(|v| c.max(v.abs() / lambda));
    if level(floor) >= 1.0 {
        return Ok(floor);
    }
    let (lo, hi) = bisect(|c| level(c) >= 1.0, floor, 1.0, 200);
    Ok(if (level(lo) - 1.0).abs() < (level(hi) - 1.0).abs() {
        lo
    } else {
        hi
    })
}

/// `E max(c_Z(λ), |Z|/λ)`, identically 1 on `λ ≥ E|Z|`.
pub fn c_z_identity(z: &EmpiricalDistribution, lambda: f64) -> Result<f64> {
    let c = c_z(z, lambda)?;
    Ok(z.expectation(|v| c.max(v.abs() / lambda)))
}

/// Dual norm `‖Z‖* = inf{λ ≥ E|Z| : E φ(max(c_Z(λ), |Z|/λ)) ≤ β}`.
///
/// Requires a divergence with the Δ₂ property.
pub fn dual_norm(z: &EmpiricalDistribution, spec: &DivergenceSpec, beta: f64) -> Result<DualNorm> {
    check_beta(beta)?;
    if !spec.satisfies_delta2() {
        return Err(Error::UnsupportedDivergence(format!(
            "{}: dual norm needs the Δ₂ property",
            spec.name()
        )));
    }
    let m = z.expectation(f64::abs);
    if m == 0.0 {
        return Ok(DualNorm {
            value: 0.0,
            c_star: 1.0,
            witness: vec![1.0; z.len()],
        });
    }
    let witness =
        |lam: f64, c: f64| -> Vec<f64> { z.atoms().iter().map(|v| c.max(v.abs() / lam)).collect() };
    let excess = |lam: f64| -> Result<f64> {
        let c = c_z(z, lam)?;
        let w = witness(lam, c);
        Ok(w.iter()
            .zip(z.probs())
            .map(|(&w, &p)| p * spec.phi(w))
            .sum::<f64>()
            - beta)
    };

    if z.expectation(|v| spec.phi(v.abs() / m)) <= beta {
        let c = z.abs().essinf() / m;
        return Ok(DualNorm {
            value: m,
            c_star: c,
            witness: witness(m, c),
        });
    }
    let mut hi = 2.0 * m;
    while excess(hi)? > 0.0 {
        hi *= 2.0;
    }
    let (_, lam) = bisect(|l| excess(l).map(|e| e <= 0.0).unwrap_or(true), m, hi, 200);
    let c = c_z(z, lam)?;
    Ok(DualNorm {
        value: lam,
        c_star: c,
        witness: witness(lam, c),
    })
}

/// Every norm the crate computes for one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub phi_beta_norm: f64,
    /// `‖X‖_{Φ,β}`, the risk norm built on the Young pair.
    pub young_beta_norm: f64,
    /// Luxemburg norm of Φ.
    pub luxemburg: f64,
    /// `inf_t t(1 + E Ψ(|X|/t))`.
    pub orlicz: f64,
    /// `inf_t t(1 + E Φ(|X|/t))`, the Orlicz norm paired with `luxemburg`.
    pub orlicz_phi: f64,
    /// Luxemburg norm of Ψ, paired with `orlicz`.
    pub luxemburg_psi: f64,
    /// `d = sup |φ − Φ|`.
    pub gap: f64,
    /// Ψ(1), entering the equivalence constant.
    pub psi_at_one: f64,
    pub dual_norm: Option<f64>,
    pub c_lambda_trace: Option<Vec<(f64, f64)>>,
}

pub fn norm_report(
    dist: &EmpiricalDistribution,
    spec: &DivergenceSpec,
    beta: f64,
) -> Result<NormReport> {
    check_beta(beta)?;
    let pair = YoungPair::new(spec);
    let (dual, trace) = if spec.satisfies_delta2() {
        let dn = dual_norm(dist, spec, beta)?;
        let m = dist.expectation(f64::abs);
        let trace = if m > 0.0 {
            let top = 2.0 * dn.value.max(m);
            (0..20)
                .map(|k| {
                    let lam = m + (top - m) * k as f64 / 19.0;
                    c_z(dist, lam).map(|c| (lam, c))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        (Some(dn.value), Some(trace))
    } else {
        (None, None)
    };
    Ok(NormReport {
        phi_beta_norm: phi_beta_norm(dist, spec, beta)?,
        young_beta_norm: phi_beta_norm(dist, &pair, beta)?,
        luxemburg: luxemburg_norm(dist, &pair),
        orlicz: orlicz_norm(dist, &pair),
        orlicz_phi: amemiya_with(dist, |x| pair.phi(x)),
        luxemburg_psi: luxemburg_with(dist, |y| pair.psi(y)),
        gap: pair.gap(),
        psi_at_one: pair.psi(1.0),
        dual_norm: dual,
        c_lambda_trace: trace,
    })
}
