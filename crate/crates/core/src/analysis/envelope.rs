use serde::{Deserialize, Serialize};

use crate::constants::{singular_amplitude, ModelParams};
use crate::error::{domain, Result};

/// Lower envelope of `sup u` built from the singular profile and a weighted
/// linear decay bound:
///
/// `F(r,t) = s r^{−γ} − b t^{(σ−ℓ)/α} r^{−σ}` for `r ≤ t^{1/α}`,
/// `F(r,t) = s r^{−γ} − b t^{−ℓ/α}` for `r > t^{1/α}`,
///
/// with `γ = α/(p−1)`. With `ℓ = σ` and `b = ε` this is the t-free function `G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub amplitude: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub b: f64,
    pub ell: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeMax {
    pub argmax: f64,
    pub max: f64,
    /// Whether the maximum sits at the interior critical point rather than at
    /// `r = t^{1/α}`.
    pub interior: bool,
}

impl Envelope {
    pub fn new(amplitude: f64, gamma: f64, sigma: f64, alpha: f64, b: f64, ell: f64) -> Result<Self> {
        if !(sigma > gamma) {
            return Err(domain!("envelope needs sigma(p-1) > alpha, i.e. sigma > {gamma}, got {sigma}"));
        }
        if !(ell >= sigma) {
            return Err(domain!("envelope needs ell >= sigma"));
        }
        if !(amplitude > 0.0) || !(b > 0.0) || !(alpha > 0.0) {
            return Err(domain!("envelope needs positive amplitude, b and alpha"));
        }
        Ok(Self { amplitude, gamma, sigma, alpha, b, ell })
    }

    /// Envelope with the singular amplitude `s(α,d,p)` and `γ = α/(p−1)`.
    pub fn for_params(params: &ModelParams, b: f64, ell: f64, sigma: f64) -> Result<Self> {
        Self::new(singular_amplitude(params)?, params.steady_exponent(), sigma, params.alpha, b, ell)
    }

    pub fn value(&self, r: f64, t: f64) -> f64 {
        let head = self.amplitude * libm::pow(r, -self.gamma);
        let edge = libm::pow(t, 1.0 / self.alpha);
        if r <= edge {
            head - self.inner_coeff(t) * libm::pow(r, -self.sigma)
        } else {
            head - self.b * libm::pow(t, -self.ell / self.alpha)
        }
    }

    fn inner_coeff(&self, t: f64) -> f64 {
        self.b * libm::pow(t, (self.sigma - self.ell) / self.alpha)
    }

    /// Closed-form maximizer over `r > 0`: the critical point
    /// `r* = (σB/(γs))^{1/(σ−γ)}` with value `s r*^{−γ}(1 − γ/σ)`, or the branch
    /// point `t^{1/α}` when `r*` lies beyond it.
    pub fn max(&self, t: f64) -> Result<EnvelopeMax> {
        if !(t > 0.0) {
            return Err(domain!("envelope needs t > 0"));
        }
        let (s, g, sg) = (self.amplitude, self.gamma, self.sigma);
        let r_star = libm::pow(sg * self.inner_coeff(t) / (g * s), 1.0 / (sg - g));
        let edge = libm::pow(t, 1.0 / self.alpha);
        if r_star <= edge {
            Ok(EnvelopeMax { argmax: r_star, max: s * libm::pow(r_star, -g) * (1.0 - g / sg), interior: true })
        } else {
            Ok(EnvelopeMax { argmax: edge, max: self.value(edge, t), interior: false })
        }
    }

    /// Growth exponent `(ℓ − σ)/(σ(p−1) − α) = (ℓ − σ)/(α(σ/γ − 1))` of the maximum.
    pub fn growth_exponent(&self) -> f64 {
        (self.ell - self.sigma) * self.gamma / (self.alpha * (self.sigma - self.gamma))
    }

    /// Exponent `(σ − ℓ)/(α(σ − γ))` of the argmax.
    pub fn argmax_exponent(&self) -> f64 {
        (self.sigma - self.ell) / (self.alpha * (self.sigma - self.gamma))
    }
}
