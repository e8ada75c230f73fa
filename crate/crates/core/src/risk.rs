//! The divergence risk measure
//!
//! ```text
//! ρ(X) = inf_{t > 0, μ ∈ ℝ} t·(β + μ + E ψ(X/t − μ))
//! ```
//!
//! evaluated by nested one-dimensional searches.
//!
//! All searches run on the normalized variable `Y = (X − esssup X)/spread`,
//! which lies in `[−1, 0]` and has its maximum at 0. In these coordinates the
//! inner multiplier `ν = −μ` stays bounded as `t → 0`, so no argument of ψ
//! overflows. Results are mapped back through `ρ(X) = esssup X + spread·ρ(Y)`.

use crate::divergence::Divergence;
use crate::empirical::EmpiricalDistribution;
use crate::error::{check_beta, Error, Result};
use crate::search::{bisect, log_scan_golden};

/// Search controls for [`evaluate_primal_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskOptions {
    /// Golden-section tolerance on `ln t`.
    pub tol: f64,
    /// Smallest normalized `t` probed; reaching it means the infimum is not attained.
    pub t_floor: f64,
    /// Points of the coarse log-t scan.
    pub scan_points: usize,
}

impl Default for RiskOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            t_floor: 1e-12,
            scan_points: 60,
        }
    }
}

/// Residuals accepted by [`solve_characterizing_equations`].
pub const EQUATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RiskEvaluation {
    pub value: f64,
    pub t_star: Option<f64>,
    pub mu_star: Option<f64>,
    pub attained: bool,
    /// `(E ψ′(X/t − μ) − 1, E φ(ψ′(X/t − μ)) − β)` at the optimizers.
    pub residuals: Option<(f64, f64)>,
    inner: Option<Normalized>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Normalized {
    shift: f64,
    scale: f64,
    t: f64,
    nu: f64,
}

impl RiskEvaluation {
    /// The maximizing density of the dual problem implied by this evaluation.
    ///
    /// At an attained optimum this is `Z = ψ′(X/t* − μ*)`. Otherwise all mass
    /// sits on the atoms where `X = esssup X`.
    pub fn density<D: Divergence + ?Sized>(
        &self,
        dist: &EmpiricalDistribution,
        div: &D,
    ) -> Vec<f64> {
        match self.inner {
            Some(n) if self.attained => dist
                .atoms()
                .iter()
                .map(|&x| div.psi_prime((x - n.shift) / n.scale / n.t + n.nu))
                .collect(),
            _ => top_density(dist),
        }
    }
}

/// `1_{X = esssup X} / P(X = esssup X)`.
pub(crate) fn top_density(dist: &EmpiricalDistribution) -> Vec<f64> {
    let top = dist.esssup();
    let mass = dist.prob_of_max();
    dist.atoms()
        .iter()
        .map(|&x| if x == top { 1.0 / mass } else { 0.0 })
        .collect()
}

/// The primal objective `t·(β + μ + E ψ(X/t − μ))`.
pub fn primal_objective<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
    t: f64,
    mu: f64,
) -> f64 {
    t * (beta + mu + dist.expectation(|x| div.psi(x / t - mu)))
}

/// Left-hand-side gaps of `1 = E ψ′(X/t − μ)` and `β = E φ(ψ′(X/t − μ))`.
pub fn characterizing_residuals<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
    t: f64,
    mu: f64,
) -> (f64, f64) {
    let z: Vec<f64> = dist
        .atoms()
        .iter()
        .map(|&x| div.psi_prime(x / t - mu))
        .collect();
    let mean: f64 = z.iter().zip(dist.probs()).map(|(z, p)| p * z).sum();
    let div_mean: f64 = z
        .iter()
        .zip(dist.probs())
        .map(|(&z, p)| p * div.phi(z))
        .sum();
    (mean - 1.0, div_mean - beta)
}

/// The normalized problem in `(t, ν)` for `Y ∈ [−1, 0]`.
struct Problem<'a, D: ?Sized> {
    ys: Vec<f64>,
    ps: &'a [f64],
    div: &'a D,
    beta: f64,
    shift: f64,
    scale: f64,
    nu_lo: f64,
    nu_hi: f64,
}

impl<'a, D: Divergence + ?Sized> Problem<'a, D> {
    /// `None` for a constant variable.
    fn new(dist: &'a EmpiricalDistribution, div: &'a D, beta: f64) -> Option<Self> {
        let (shift, scale) = (dist.esssup(), dist.esssup() - dist.essinf());
        if !(scale > 0.0) {
            return None;
        }
        let ys = dist.atoms().iter().map(|&x| (x - shift) / scale).collect();
        let mut problem = Self {
            ys,
            ps: dist.probs(),
            div,
            beta,
            shift,
            scale,
            nu_lo: 0.0,
            nu_hi: 0.0,
        };
        // Σ p ψ′(y/t + ν) − 1 changes sign in ν between φ′(1) − 1 and φ′(1/P(Y = 0)) + 1
        // for every t: all arguments lie below ν and the top atoms sit at ν.
        let top = dist.prob_of_max();
        let mut lo = div.phi_prime(1.0) - 1.0;
        while problem.mean_density(1.0, lo) >= 1.0 {
            lo -= 2.0 * (1.0 + lo.abs());
        }
        let mut hi = div.phi_prime(1.0 / top) + 1.0;
        while top * div.psi_prime(hi) < 1.0 {
            hi += 2.0 * (1.0 + hi.abs());
        }
        problem.nu_lo = lo;
        problem.nu_hi = hi;
        Some(problem)
    }

    fn arg(&self, y: f64, t: f64, nu: f64) -> f64 {
        if y == 0.0 {
            nu
        } else {
            y / t + nu
        }
    }

    fn mean_density(&self, t: f64, nu: f64) -> f64 {
        self.ys
            .iter()
            .zip(self.ps)
            .map(|(&y, &p)| p * self.div.psi_prime(self.arg(y, t, nu)))
            .sum()
    }

    /// Minimizer of `ν ↦ −ν + E ψ(Y/t + ν)`.
    fn nu(&self, t: f64) -> f64 {
        let (mut lo, hi) = (self.nu_lo, self.nu_hi);
        // Small t pushes the lower arguments far left; the bracket stays valid but
        // a sharper lower end saves iterations.
        while self.mean_density(t, lo) >= 1.0 {
            lo -= 2.0 * (1.0 + lo.abs());
        }
        bisect(|nu| self.mean_density(t, nu) >= 1.0, lo, hi, 200).1
    }

    fn objective_at(&self, t: f64, nu: f64) -> f64 {
        let e: f64 = self
            .ys
            .iter()
            .zip(self.ps)
            .map(|(&y, &p)| p * self.div.psi(self.arg(y, t, nu)))
            .sum();
        t * (self.beta - nu + e)
    }

    fn objective(&self, t: f64) -> f64 {
        self.objective_at(t, self.nu(t))
    }

    /// `G(t) = E φ(ψ′(Y/t + ν(t))) − β = −h′(t)`, non-increasing in t.
    fn divergence_gap(&self, t: f64) -> (f64, f64) {
        let nu = self.nu(t);
        let g: f64 = self
            .ys
            .iter()
            .zip(self.ps)
            .map(|(&y, &p)| p * self.div.phi(self.div.psi_prime(self.arg(y, t, nu))))
            .sum();
        (g - self.beta, nu)
    }

    fn original(&self, t: f64, nu: f64) -> (f64, f64) {
        let t_x = self.scale * t;
        (t_x, self.shift / t_x - nu)
    }

    /// Root of G by bracketing and bisection; `None` when no sign change exists
    /// above `t_floor`.
    fn solve_equations(&self, t_floor: f64) -> Option<(f64, f64)> {
        let mut t_hi = 1.0 / self.beta;
        let mut steps = 0;
        while self.divergence_gap(t_hi).0 >= 0.0 {
            t_hi *= 2.0;
            steps += 1;
            if steps > 200 {
                return None;
            }
        }
        let mut t_lo = t_hi;
        while self.divergence_gap(t_lo).0 <= 0.0 {
            t_lo *= 0.5;
            if t_lo < t_floor {
                return None;
            }
        }
        let (_, t) = bisect(|t| self.divergence_gap(t).0 < 0.0, t_lo, t_hi, 200);
        Some((t, self.nu(t)))
    }
}

pub fn evaluate_primal<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
) -> Result<RiskEvaluation> {
    evaluate_primal_with(dist, div, beta, &RiskOptions::default())
}

pub fn evaluate_primal_with<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
    opts: &RiskOptions,
) -> Result<RiskEvaluation> {
    check_beta(beta)?;
    let Some(problem) = Problem::new(dist, div, beta) else {
        return Ok(RiskEvaluation {
            value: dist.esssup(),
            t_star: None,
            mu_star: None,
            attained: false,
            residuals: None,
            inner: None,
        });
    };

    let mut t_hi = 8.0 * (1.0 / beta).max(1.0);
    let mut trace = Vec::new();
    let (mut t, mut h) = (t_hi, f64::INFINITY);
    for _ in 0..8 {
        (t, h) = log_scan_golden(
            |t| problem.objective(t),
            opts.t_floor,
            t_hi,
            opts.scan_points,
            opts.tol,
        );
        trace.push((t, h));
        if t < t_hi / 1.001 {
            break;
        }
        t_hi *= 1e3;
    }
    if !(t < t_hi / 1.001 && h.is_finite()) {
        return Err(Error::Bracket {
            stage: "outer t search",
            trace,
        });
    }
    let attained = t > opts.t_floor * 1.001 && h < 0.0;
    let mut nu = problem.nu(t);

    if attained {
        // Polish t on the stationarity condition h′(t) = −G(t) = 0.
        let (a, b) = (t / 1.05, t * 1.05);
        if problem.divergence_gap(a).0 > 0.0 && problem.divergence_gap(b).0 < 0.0 {
            let (_, tp) = bisect(|s| problem.divergence_gap(s).0 < 0.0, a, b, 200);
            let np = problem.nu(tp);
            let hp = problem.objective_at(tp, np);
            if hp <= h {
                (t, nu, h) = (tp, np, hp);
            }
        }
    }

    let value = problem.shift + problem.scale * h.min(0.0);
    log::debug!(
        "evaluate_primal: normalized t = {t:.6e}, ν = {nu:.6e}, h = {h:.6e}, attained = {attained}"
    );
    let inner = Some(Normalized {
        shift: problem.shift,
        scale: problem.scale,
        t,
        nu,
    });
    if !attained {
        return Ok(RiskEvaluation {
            value,
            t_star: None,
            mu_star: None,
            attained,
            residuals: None,
            inner,
        });
    }
    let (t_x, mu_x) = problem.original(t, nu);
    Ok(RiskEvaluation {
        value,
        t_star: Some(t_x),
        mu_star: Some(mu_x),
        attained,
        residuals: Some(characterizing_residuals(dist, div, beta, t_x, mu_x)),
        inner,
    })
}

/// Solution of the characterizing equations in the original coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multipliers {
    pub t_star: f64,
    pub mu_star: f64,
    pub mean_residual: f64,
    pub divergence_residual: f64,
}

/// Solves `1 = E ψ′(X/t − μ)`, `β = E φ(ψ′(X/t − μ))`.
///
/// Returns `Ok(None)` when no solution with residuals below [`EQUATION_TOL`]
/// is found, which is expected for constant X or when the infimum is not attained.
pub fn solve_characterizing_equations<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
) -> Result<Option<Multipliers>> {
    check_beta(beta)?;
    let Some(problem) = Problem::new(dist, div, beta) else {
        return Ok(None);
    };
    let Some((t, nu)) = problem.solve_equations(RiskOptions::default().t_floor) else {
        return Ok(None);
    };
    let (t_star, mu_star) = problem.original(t, nu);
    let (r1, r2) = characterizing_residuals(dist, div, beta, t_star, mu_star);
    if r1.abs() > EQUATION_TOL || r2.abs() > EQUATION_TOL {
        log::debug!("characterizing equations: residuals {r1:.3e}, {r2:.3e} rejected");
        return Ok(None);
    }
    Ok(Some(Multipliers {
        t_star,
        mu_star,
        mean_residual: r1,
        divergence_residual: r2,
    }))
}

/// Largest α ∈ [0, 1) with `φ(0)·α + φ(1/(1 − α))·(1 − α) ≤ β`.
pub fn alpha_bar<D: Divergence + ?Sized>(div: &D, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let phi0 = div.phi(0.0);
    let f = |a: f64| {
        let head = if phi0 == 0.0 { 0.0 } else { phi0 * a };
        head + div.phi(1.0 / (1.0 - a)) * (1.0 - a)
    };
    let (lo, _) = bisect(|a| a >= 1.0 || !(f(a) <= beta), 0.0, 1.0, 200);
    Ok(lo)
}

/// Sufficient condition `P(X = esssup X) < 1 − α̅` for the infimum to be attained.
///
/// A margin of 1e-9 keeps boundary cases from flipping on rounding.
pub fn is_attained<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
) -> Result<bool> {
    let a = alpha_bar(div, beta)?;
    Ok(dist.prob_of_max() < (1.0 - a) - 1e-9)
}

/// `AVaR_{α̅}(X)`, a lower bound for ρ(X).
pub fn avar_lower_bound<D: Divergence + ?Sized>(
    dist: &EmpiricalDistribution,
    div: &D,
    beta: f64,
) -> Result<f64> {
    dist.avar(alpha_bar(div, beta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::DivergenceSpec;

    fn uniform(xs: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::from_samples(xs).unwrap()
    }

    /// min over a log-t grid of t·β + t·ln E e^{X/t}, refined by golden section.
    fn evar_oracle(dist: &EmpiricalDistribution, beta: f64) -> f64 {
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
        let (a, b) = (best.0 / 1.01, best.0 * 1.01);
        // The t → 0 limit of the objective is esssup X.
        crate::search::golden_section(f, a, b, 1e-14, 300)
            .1
            .min(best.1)
            .min(m)
    }

    #[test]
    fn constant_variable() {
        for name in ["kl", "chi2", "power:2.5"] {
            let d = DivergenceSpec::builtin(name).unwrap();
            let r = evaluate_primal(&uniform(&[3.0, 3.0, 3.0]), &d, 0.5).unwrap();
            assert_eq!(r.value, 3.0);
            assert!(!r.attained);
            assert!(r.t_star.is_none() && r.mu_star.is_none());
        }
    }

    #[test]
    fn rejects_bad_beta() {
        let d = DivergenceSpec::kl();
        for beta in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                evaluate_primal(&uniform(&[1.0, 2.0]), &d, beta),
                Err(Error::InvalidParameter { name: "beta", .. })
            ));
        }
    }

    #[test]
    fn kl_matches_evar_at_ln2() {
        let x = uniform(&[0.0, 1.0]);
        let r = evaluate_primal(&x, &DivergenceSpec::kl(), std::f64::consts::LN_2).unwrap();
        assert!((r.value - evar_oracle(&x, std::f64::consts::LN_2)).abs() < 1e-7);
        assert!((r.value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn kl_matches_evar_interior() {
        let x = uniform(&[0.3, -1.2, 2.5, 0.0]);
        for beta in [0.1, 0.5, 1.0, 2.0] {
            let r = evaluate_primal(&x, &DivergenceSpec::kl(), beta).unwrap();
            let o = evar_oracle(&x, beta);
            assert!(
                (r.value - o).abs() < 1e-7,
                "β={beta}: {} vs {o}, attained {}",
                r.value,
                r.attained
            );
        }
    }

    #[test]
    fn chi2_two_point() {
        let x = uniform(&[-1.0, 1.0]);
        let r = evaluate_primal(&x, &DivergenceSpec::chi2(), 0.25).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9);
        assert!(r.attained);
        let (a, b) = r.residuals.unwrap();
        assert!(a.abs() < 1e-8 && b.abs() < 1e-8);
        let z = r.density(&x, &DivergenceSpec::chi2());
        assert!((z[0] - 0.5).abs() < 1e-6 && (z[1] - 1.5).abs() < 1e-6);
    }

    #[test]
    fn characterizing_equations_examples() {
        let kl = DivergenceSpec::kl();
        assert!(
            solve_characterizing_equations(&uniform(&[2.0; 4]), &kl, 1.0)
                .unwrap()
                .is_none()
        );

        let x = uniform(&[0.0, 1.0]);
        let beta = 0.3;
        let m = solve_characterizing_equations(&x, &kl, beta)
            .unwrap()
            .unwrap();
        let plug = primal_objective(&x, &kl, beta, m.t_star, m.mu_star);
        let r = evaluate_primal(&x, &kl, beta).unwrap();
        assert!((plug - r.value).abs() < 1e-7);

        let chi2 = DivergenceSpec::chi2();
        let x = uniform(&[-1.0, 1.0]);
        let m = solve_characterizing_equations(&x, &chi2, 0.25)
            .unwrap()
            .unwrap();
        assert!((primal_objective(&x, &chi2, 0.25, m.t_star, m.mu_star) - 0.5).abs() < 1e-7);
    }

    #[test]
    fn equations_fail_on_boundary() {
        // β = ln 2 puts the optimum at t → 0 for the fair coin.
        let x = uniform(&[0.0, 1.0]);
        let kl = DivergenceSpec::kl();
        assert!(
            solve_characterizing_equations(&x, &kl, std::f64::consts::LN_2)
                .unwrap()
                .is_none()
        );
        assert!(solve_characterizing_equations(&x, &kl, 1.0)
            .unwrap()
            .is_none());
    }

    #[test]
    fn alpha_bar_examples() {
        let kl = DivergenceSpec::kl();
        for beta in [0.1, 1.0, 5.0] {
            let a = alpha_bar(&kl, beta).unwrap();
            assert!((a - (1.0 - (-beta).exp())).abs() < 1e-10, "β={beta}");
        }
        assert!((alpha_bar(&DivergenceSpec::chi2(), 1.0).unwrap() - 0.5).abs() < 1e-10);
        assert!(alpha_bar(&DivergenceSpec::chi2(), 1e-12).unwrap() < 1e-5);
    }

    #[test]
    fn attainability_examples() {
        let kl = DivergenceSpec::kl();
        assert!(!is_attained(&uniform(&[1.0; 3]), &kl, 1.0).unwrap());
        let x = uniform(&[0.0, 1.0]);
        assert!(!is_attained(&x, &kl, std::f64::consts::LN_2).unwrap());
        assert!(is_attained(&x, &kl, 0.1).unwrap());
    }

    #[test]
    fn large_offsets_are_harmless() {
        let kl = DivergenceSpec::kl();
        let x = uniform(&[0.3, -1.2, 2.5, 0.0]);
        let y = uniform(&[1e6 + 0.3, 1e6 - 1.2, 1e6 + 2.5, 1e6]);
        let (a, b) = (
            evaluate_primal(&x, &kl, 0.7).unwrap().value,
            evaluate_primal(&y, &kl, 0.7).unwrap().value,
        );
        assert!((b - 1e6 - a).abs() < 1e-8);
    }
}
