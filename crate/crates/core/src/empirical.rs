//! Finitely supported random variables and their quantile-based functionals.

use crate::error::{Error, Result};

const MASS_TOL: f64 = 1e-12;
const SPECTRUM_TOL: f64 = 1e-10;

/// A random variable taking value `atoms[i]` with probability `probs[i] > 0`.
///
/// Duplicate atoms are kept as separate entries.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    atoms: Vec<f64>,
    probs: Vec<f64>,
    order: Vec<usize>,
}

impl EmpiricalDistribution {
    /// Uniform weights `1/n` on the given values.
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyData);
        }
        let p = 1.0 / values.len() as f64;
        Self::new(values.to_vec(), vec![p; values.len()])
    }

    /// Explicit probabilities; they must be positive and sum to one.
    pub fn new(atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        Self::validate(&atoms, &probs)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Domain {
                what: "total probability",
                value: total,
            });
        }
        Ok(Self::build(atoms, probs))
    }

    /// Positive weights, rescaled to sum to one.
    pub fn from_weighted(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::validate(&atoms, &weights)?;
        let total: f64 = weights.iter().sum();
        let probs = weights.iter().map(|w| w / total).collect();
        Ok(Self::build(atoms, probs))
    }

    fn validate(atoms: &[f64], probs: &[f64]) -> Result<()> {
        if atoms.is_empty() {
            return Err(Error::EmptyData);
        }
        if atoms.len() != probs.len() {
            return Err(Error::Dimension {
                expected: atoms.len(),
                found: probs.len(),
            });
        }
        if let Some(index) = atoms.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidValue {
                index,
                value: atoms[index],
            });
        }
        if let Some(index) = probs.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidValue {
                index,
                value: probs[index],
            });
        }
        Ok(())
    }

    fn build(atoms: Vec<f64>, probs: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..atoms.len()).collect();
        order.sort_by(|&a, &b| atoms[a].total_cmp(&atoms[b]));
        Self {
            atoms,
            probs,
            order,
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Atom indices in non-decreasing order of value.
    pub fn sorted_index(&self) -> &[usize] {
        &self.order
    }

    /// Same probabilities, atoms transformed by `f`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let atoms: Vec<f64> = self.atoms.iter().map(|&x| f(x)).collect();
        Self::validate(&atoms, &self.probs)?;
        Ok(Self::build(atoms, self.probs.clone()))
    }

    pub fn abs(&self) -> Self {
        Self::build(
            self.atoms.iter().map(|x| x.abs()).collect(),
            self.probs.clone(),
        )
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms
            .iter()
            .zip(&self.probs)
            .map(|(&x, &p)| p * f(x))
            .sum()
    }

    /// `E[X·Z]` for a density given atom by atom.
    pub fn weighted_mean(&self, z: &[f64]) -> f64 {
        self.atoms
            .iter()
            .zip(&self.probs)
            .zip(z)
            .map(|((&x, &p), &zi)| p * x * zi)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expectation(|x| (x - m) * (x - m))
    }

    pub fn esssup(&self) -> f64 {
        self.atoms[*self.order.last().unwrap()]
    }

    pub fn essinf(&self) -> f64 {
        self.atoms[self.order[0]]
    }

    /// `P(X = esssup X)`.
    pub fn prob_of_max(&self) -> f64 {
        let top = self.esssup();
        self.atoms
            .iter()
            .zip(&self.probs)
            .filter(|(&x, _)| x == top)
            .map(|(_, &p)| p)
            .sum()
    }

    pub fn is_constant(&self) -> bool {
        self.esssup() == self.essinf()
    }

    /// Step CDF `F(x) = P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .zip(&self.probs)
            .filter(|(&a, _)| a <= x)
            .map(|(_, &p)| p)
            .sum::<f64>()
            .min(1.0)
    }

    /// Generalized inverse `F⁻¹(u) = inf{x : F(x) > u}` for `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::Domain {
                what: "quantile level",
                value: u,
            });
        }
        let mut cum = 0.0;
        for &i in &self.order {
            cum += self.probs[i];
            if cum > u {
                return Ok(self.atoms[i]);
            }
        }
        Ok(self.esssup())
    }

    /// Quantile steps as `(lower, upper, value)` with the last step closed at 1.
    fn quantile_steps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.order.len();
        let mut cum = 0.0;
        self.order.iter().enumerate().map(move |(k, &i)| {
            let lo = cum;
            cum += self.probs[i];
            let hi = if k + 1 == n { 1.0 } else { cum.min(1.0) };
            (lo, hi, self.atoms[i])
        })
    }

    /// Average value-at-risk `(1/(1−α)) ∫_α^1 F⁻¹(u) du`.
    pub fn avar(&self, alpha: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Domain {
                what: "avar level",
                value: alpha,
            });
        }
        let tail: f64 = self
            .quantile_steps()
            .map(|(lo, hi, x)| x * (hi - lo.max(alpha)).max(0.0))
            .sum();
        Ok(tail / (1.0 - alpha))
    }

    /// `∫₀¹ σ(u) F⁻¹(u) du` for a step spectrum σ.
    pub fn spectral_risk(&self, sigma: &StepSpectrum) -> f64 {
        self.quantile_steps()
            .map(|(lo, hi, x)| x * (sigma.cumulative(hi) - sigma.cumulative(lo)))
            .sum()
    }
}

/// A non-decreasing, nonnegative step density on `[0, 1]` with unit integral.
///
/// `values[j]` holds on `[breaks[j], breaks[j + 1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSpectrum {
    breaks: Vec<f64>,
    values: Vec<f64>,
    cum: Vec<f64>,
}

impl StepSpectrum {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || breaks.len() != values.len() + 1 {
            return Err(Error::InvalidSpectrum(format!(
                "{} breakpoints for {} steps",
                breaks.len(),
                values.len()
            )));
        }
        if breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
            return Err(Error::InvalidSpectrum(
                "breakpoints must run from 0 to 1".into(),
            ));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSpectrum(
                "breakpoints must increase strictly".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidSpectrum(
                "values must be finite and nonnegative".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidSpectrum("spectrum decreases".into()));
        }
        let mut cum = Vec::with_capacity(breaks.len());
        cum.push(0.0);
        for (j, v) in values.iter().enumerate() {
            cum.push(cum[j] + v * (breaks[j + 1] - breaks[j]));
        }
        let total = *cum.last().unwrap();
        if (total - 1.0).abs() > SPECTRUM_TOL {
            return Err(Error::InvalidSpectrum(format!(
                "integrates to {total}, not 1"
            )));
        }
        Ok(Self {
            breaks,
            values,
            cum,
        })
    }

    /// σ ≡ 1.
    pub fn uniform() -> Self {
        Self::new(vec![0.0, 1.0], vec![1.0]).unwrap()
    }

    /// `σ_α = 1_{[α,1]}/(1 − α)`, whose spectral risk is the AVaR at level α.
    pub fn avar(alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Domain {
                what: "avar level",
                value: alpha,
            });
        }
        if alpha == 0.0 {
            return Ok(Self::uniform());
        }
        Self::new(vec![0.0, alpha, 1.0], vec![0.0, 1.0 / (1.0 - alpha)])
    }

    /// `m` equal steps taking `f` at the midpoints, rescaled to unit integral.
    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidSpectrum("no steps".into()));
        }
        let breaks: Vec<f64> = (0..=m).map(|j| j as f64 / m as f64).collect();
        let raw: Vec<f64> = (0..m).map(|j| f((j as f64 + 0.5) / m as f64)).collect();
        let total: f64 = raw.iter().sum::<f64>() / m as f64;
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidSpectrum(format!("integrates to {total}")));
        }
        Self::new(breaks, raw.iter().map(|v| v / total).collect())
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `∫₀^u σ`.
    pub fn cumulative(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let j = self.breaks.partition_point(|&b| b <= u).saturating_sub(1);
        if j >= self.values.len() {
            return *self.cum.last().unwrap();
        }
        self.cum[j] + self.values[j] * (u - self.breaks[j])
    }
}
