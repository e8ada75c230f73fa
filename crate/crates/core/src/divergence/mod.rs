//! Divergence functions φ, their convex conjugates ψ and subderivatives.
//!
//! A divergence function is convex and lower semicontinuous on `[0, ∞)`, has
//! `φ(1) = 0` and grows superlinearly. Its conjugate
//!
//! ```text
//! ψ(y) = sup_{x ≥ 0} x·y − φ(x)
//! ```
//!
//! is finite, non-decreasing and satisfies `ψ(y) ≥ y`. The pair obeys the
//! Fenchel–Young inequality `x·y ≤ φ(x) + ψ(y)` with equality at `x = ψ′(y)`.
//!
//! | name       | φ(x)                                   | ψ(y)                                  |
//! |------------|----------------------------------------|---------------------------------------|
//! | `kl`       | x·ln x                                 | e^{y−1}                               |
//! | `chi2`     | (x − 1)²                               | y + y²/4 for y ≥ −2, −1 otherwise      |
//! | `power:p`  | (x^p − p·x + p − 1)/(p(p − 1)), p > 1   | ((1 + (p−1)y)₊^{p/(p−1)} − 1)/p        |
//!
//! Subderivatives are the right-continuous selections: `φ′` is the right
//! derivative and `ψ′(y) = sup{x ≥ 0 : φ′(x) ≤ y}`.

mod young;

pub use young::YoungPair;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::search::bisect;

/// Tolerance on the total mass of probability vectors.
const MASS_TOL: f64 = 1e-12;

/// The four functions every divergence-based computation needs.
///
/// Implementors must provide a convex `phi` with `phi(1) = 0` on `[0, ∞)`
/// (returning `+∞` for negative arguments), its conjugate `psi`, and the
/// right-continuous subderivatives of both.
pub trait Divergence: Send + Sync {
    fn name(&self) -> &str;

    /// φ(x); `+∞` for `x < 0`.
    fn phi(&self, x: f64) -> f64;

    /// Right subderivative of φ for `x ≥ 0`; may be `−∞` at 0.
    fn phi_prime(&self, x: f64) -> f64;

    /// Convex conjugate ψ(y).
    fn psi(&self, y: f64) -> f64;

    /// Subderivative of ψ, i.e. the largest maximizer of `x·y − φ(x)`.
    fn psi_prime(&self, y: f64) -> f64;
}

/// The family a [`DivergenceSpec`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    Kl,
    Chi2,
    /// Power divergence with exponent `p > 1`.
    Power(f64),
}

/// Declared constants `(T, k)` of the Δ₂ condition `φ(2x) ≤ k·φ(x)` for `x > T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delta2 {
    pub threshold: f64,
    pub factor: f64,
}

/// A builtin divergence function together with its conjugate pair.
#[derive(Debug, Clone)]
pub struct DivergenceSpec {
    name: String,
    kind: Builtin,
    delta2: Option<Delta2>,
    closed_conjugate: bool,
}

impl DivergenceSpec {
    /// Builds a divergence from its identifier: `kl`, `chi2` or `power:<p>`.
    pub fn builtin(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "kl" => Ok(Self::kl()),
            "chi2" => Ok(Self::chi2()),
            _ => match name.strip_prefix("power:") {
                Some(p) => {
                    let p: f64 = p
                        .trim()
                        .parse()
                        .map_err(|_| Error::UnsupportedDivergence(name.to_string()))?;
                    Self::power(p)
                }
                None => Err(Error::UnsupportedDivergence(name.to_string())),
            },
        }
    }

    pub fn kl() -> Self {
        Self {
            name: "kl".into(),
            kind: Builtin::Kl,
            delta2: Some(Delta2 {
                threshold: 8.0,
                factor: 3.0,
            }),
            closed_conjugate: true,
        }
    }

    pub fn chi2() -> Self {
        Self {
            name: "chi2".into(),
            kind: Builtin::Chi2,
            delta2: Some(Delta2 {
                threshold: 4.0,
                factor: 6.0,
            }),
            closed_conjugate: true,
        }
    }

    /// Power divergence; `p ≤ 1` violates the superlinear growth condition.
    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "power divergence needs p > 1 for superlinear growth",
            });
        }
        Ok(Self {
            name: format!("power:{p}"),
            kind: Builtin::Power(p),
            delta2: Some(Delta2 {
                threshold: 16.0,
                factor: 2f64.powf(p) + 2.0,
            }),
            closed_conjugate: true,
        })
    }

    /// Same φ, but ψ and ψ′ are evaluated by [`numeric_conjugate`] instead of
    /// the closed forms.
    pub fn with_numeric_conjugate(mut self) -> Self {
        self.closed_conjugate = false;
        self
    }

    pub fn kind(&self) -> Builtin {
        self.kind
    }

    pub fn phi_at_zero(&self) -> f64 {
        self.phi(0.0)
    }

    pub fn delta2(&self) -> Option<Delta2> {
        self.delta2
    }

    pub fn satisfies_delta2(&self) -> bool {
        self.delta2.is_some()
    }

    pub fn has_closed_conjugate(&self) -> bool {
        self.closed_conjugate
    }

    /// Probes the declared Δ₂ constants on a log grid over `[T, 1e6]`.
    pub fn verify_delta2(&self) -> bool {
        let Some(Delta2 { threshold, factor }) = self.delta2 else {
            return false;
        };
        let (lo, hi) = (threshold.ln(), 1e6f64.ln());
        (0..=2000).all(|k| {
            let x = (lo + (hi - lo) * k as f64 / 2000.0).exp();
            self.phi(2.0 * x) <= factor * self.phi(x)
        })
    }

    fn closed_psi(&self, y: f64) -> f64 {
        match self.kind {
            Builtin::Kl => (y - 1.0).exp(),
            Builtin::Chi2 => {
                if y >= -2.0 {
                    y + 0.25 * y * y
                } else {
                    -1.0
                }
            }
            Builtin::Power(p) => {
                let s = 1.0 + (p - 1.0) * y;
                if s <= 0.0 {
                    -1.0 / p
                } else {
                    (s.powf(p / (p - 1.0)) - 1.0) / p
                }
            }
        }
    }

    fn closed_psi_prime(&self, y: f64) -> f64 {
        match self.kind {
            Builtin::Kl => (y - 1.0).exp(),
            Builtin::Chi2 => (1.0 + 0.5 * y).max(0.0),
            Builtin::Power(p) => {
                let s = 1.0 + (p - 1.0) * y;
                if s <= 0.0 {
                    0.0
                } else {
                    s.powf(1.0 / (p - 1.0))
                }
            }
        }
    }
}

impl Divergence for DivergenceSpec {
    fn name(&self) -> &str {
        &self.name
    }

    fn phi(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::INFINITY;
        }
        match self.kind {
            Builtin::Kl => {
                if x == 0.0 {
                    0.0
                } else {
                    x * x.ln()
                }
            }
            Builtin::Chi2 => (x - 1.0) * (x - 1.0),
            Builtin::Power(p) => (x.powf(p) - p * x + p - 1.0) / (p * (p - 1.0)),
        }
    }

    fn phi_prime(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        match self.kind {
            Builtin::Kl => x.ln() + 1.0,
            Builtin::Chi2 => 2.0 * (x - 1.0),
            Builtin::Power(p) => (x.powf(p - 1.0) - 1.0) / (p - 1.0),
        }
    }

    fn psi(&self, y: f64) -> f64 {
        if self.closed_conjugate {
            self.closed_psi(y)
        } else {
            numeric_conjugate(self, y)
        }
    }

    fn psi_prime(&self, y: f64) -> f64 {
        if self.closed_conjugate {
            self.closed_psi_prime(y)
        } else {
            conjugate_by_bisection(|x| self.phi(x), |x| self.phi_prime(x), y).1
        }
    }
}

impl FromStr for DivergenceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::builtin(s)
    }
}

impl fmt::Display for DivergenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// `sup_{x ≥ 0} x·y − φ(x)` computed from φ and φ′ alone.
///
/// The maximizer is located by bisection on the monotone map `x ↦ y − φ′(x)`
/// after growing the bracket geometrically.
pub fn numeric_conjugate<D: Divergence + ?Sized>(div: &D, y: f64) -> f64 {
    conjugate_by_bisection(|x| div.phi(x), |x| div.phi_prime(x), y).0
}

/// Returns `(ψ(y), ψ′(y))` where `ψ′(y) = sup{x ≥ 0 : φ′(x) ≤ y}`.
pub(crate) fn conjugate_by_bisection<F, G>(phi: F, phi_prime: G, y: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !(phi_prime(0.0) <= y) {
        return (-phi(0.0), 0.0);
    }
    let mut hi = 1.0;
    while phi_prime(hi) <= y {
        hi *= 4.0;
        if hi > 1e300 {
            return (f64::INFINITY, f64::INFINITY);
        }
    }
    let (lo, hi) = bisect(|x| phi_prime(x) > y, 0.0, hi, 200);
    let (v_lo, v_hi) = (lo * y - phi(lo), hi * y - phi(hi));
    (v_lo.max(v_hi), lo)
}

/// φ-divergence `D_φ(Q‖P) = Σ p_i φ(q_i / p_i)` of two probability vectors.
pub fn discrete_divergence<D: Divergence + ?Sized>(q: &[f64], p: &[f64], div: &D) -> Result<f64> {
    if q.len() != p.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            found: q.len(),
        });
    }
    for (index, &value) in q.iter().chain(p).enumerate() {
        if !value.is_finite() {
            return Err(Error::InvalidValue {
                index: index % p.len(),
                value,
            });
        }
    }
    if let Some(index) = p.iter().position(|&pi| pi <= 0.0) {
        return Err(Error::Support { index });
    }
    for (what, v) in [("sum of q", q), ("sum of p", p)] {
        let total: f64 = v.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Domain { what, value: total });
        }
    }
    Ok(divergence_unchecked(q, p, div))
}

pub(crate) fn divergence_unchecked<D: Divergence + ?Sized>(q: &[f64], p: &[f64], div: &D) -> f64 {
    q.iter()
        .zip(p)
        .map(|(&qi, &pi)| pi * div.phi(qi / pi))
        .sum()
}
