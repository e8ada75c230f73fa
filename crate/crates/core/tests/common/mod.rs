#![allow(dead_code)]

use divrisk::{Divergence, DivergenceSpec, EmpiricalDistribution};

pub fn specs() -> Vec<DivergenceSpec> {
    ["kl", "chi2", "power:1.5", "power:3"]
        .iter()
        .map(|n| DivergenceSpec::builtin(n).unwrap())
        .collect()
}

pub fn weighted(atoms: Vec<f64>, weights: Vec<f64>) -> EmpiricalDistribution {
    EmpiricalDistribution::from_weighted(atoms, weights).unwrap()
}

/// `min_t t·β + t·ln E e^{X/t}` on a log grid over [1e-12, 1e3], refined by
/// golden section; the t → 0 limit esssup X is included.
pub fn evar_oracle(dist: &EmpiricalDistribution, beta: f64) -> f64 {
    let m = dist.esssup();
    let f = |t: f64| t * beta + m + t * dist.expectation(|x| ((x - m) / t).exp()).ln();
    let mut best = (1e-12, f64::INFINITY);
    for k in 0..=6000 {
        let t = 1e-12 * 10f64.powf(15.0 * k as f64 / 6000.0);
        let v = f(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    let (mut a, mut b) = (best.0 / 1.01, best.0 * 1.01);
    let g = 0.618_033_988_749_894_8;
    for _ in 0..300 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) <= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b)).min(best.1).min(m)
}

/// Smallest λ on a grid of `lambda_points` over `[E|Z|, esssup|Z|]` for which
/// some `c` on a grid of step `dc` over `[0, 1]` gives `|E max(c, |Z|/λ) − 1| ≤ dc`
/// and `E φ(max(c, |Z|/λ)) ≤ β`. At `λ = esssup|Z|` the pair `c = 1` is feasible.
pub fn dual_norm_grid_oracle(
    z: &EmpiricalDistribution,
    div: &DivergenceSpec,
    beta: f64,
    lambda_points: usize,
    dc: f64,
) -> f64 {
    let (m, top) = (z.expectation(f64::abs), z.abs().esssup());
    let nc = (1.0 / dc).round() as usize;
    for i in 0..lambda_points {
        let lam = m + (top - m) * i as f64 / (lambda_points - 1) as f64;
        for j in 0..=nc {
            let c = j as f64 * dc;
            let mean = z.expectation(|v| c.max(v.abs() / lam));
            if mean > 1.0 + dc {
                break;
            }
            if (mean - 1.0).abs() <= dc && z.expectation(|v| div.phi(c.max(v.abs() / lam))) <= beta
            {
                return lam;
            }
        }
    }
    top
}
