use super::{conjugate_by_bisection, Divergence, DivergenceSpec};
use crate::search::golden_section;

/// The Young function `Φ = 1_{x>1}·max(0, φ)` built from a divergence, with its
/// conjugate `Ψ` and the uniform gap `d = ‖φ − Φ‖_∞`.
///
/// Through the [`Divergence`] impl, `phi` is Φ and `psi` is Ψ, so the pair plugs
/// into every routine that accepts a divergence.
#[derive(Debug, Clone)]
pub struct YoungPair {
    base: DivergenceSpec,
    name: String,
    gap: f64,
    // φ′(1) ≥ 0 means φ ≥ 0 on [1, ∞) and Ψ reduces to ψ beyond φ′(1).
    reduces_to_base: bool,
}

impl YoungPair {
    pub fn new(spec: &DivergenceSpec) -> Self {
        let reduces_to_base = spec.phi_prime(1.0) >= 0.0;
        let mut pair = Self {
            base: spec.clone(),
            name: format!("young({})", spec.name()),
            gap: 0.0,
            reduces_to_base,
        };
        pair.gap = pair.compute_gap();
        pair
    }

    pub fn base(&self) -> &DivergenceSpec {
        &self.base
    }

    /// `d = sup_x |φ(x) − Φ(x)|`.
    pub fn gap(&self) -> f64 {
        self.gap
    }

    fn compute_gap(&self) -> f64 {
        let phi = |x: f64| self.base.phi(x);
        let mut d = phi(0.0).abs();
        let (_, min_on_unit) = golden_section(phi, 0.0, 1.0, 1e-12, 200);
        d = d.max(min_on_unit.abs());
        let (lo, hi) = (1e-8f64.ln(), 1e3f64.ln());
        for k in 0..10_000 {
            let x = (lo + (hi - lo) * k as f64 / 9_999.0).exp();
            d = d.max((phi(x) - self.phi(x)).abs());
        }
        d
    }

    /// Ψ and its argmax by direct numeric conjugation of Φ.
    pub(crate) fn numeric_psi(&self, y: f64) -> (f64, f64) {
        conjugate_by_bisection(|x| self.phi(x), |x| self.phi_prime(x), y)
    }
}

impl Divergence for YoungPair {
    fn name(&self) -> &str {
        &self.name
    }

    fn phi(&self, x: f64) -> f64 {
        if x < 0.0 {
            f64::INFINITY
        } else if x <= 1.0 {
            0.0
        } else {
            self.base.phi(x).max(0.0)
        }
    }

    fn phi_prime(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        if x < 1.0 {
            return 0.0;
        }
        let (v, slope) = (self.base.phi(x), self.base.phi_prime(x));
        if v > 0.0 || (v == 0.0 && slope > 0.0) {
            slope
        } else {
            0.0
        }
    }

    fn psi(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        if !self.reduces_to_base {
            return self.numeric_psi(y).0;
        }
        if y >= self.base.phi_prime(1.0) {
            self.base.psi(y)
        } else {
            y
        }
    }

    fn psi_prime(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        if !self.reduces_to_base {
            return self.numeric_psi(y).1;
        }
        if y >= self.base.phi_prime(1.0) {
            self.base.psi_prime(y).max(1.0)
        } else {
            1.0
        }
    }
}
