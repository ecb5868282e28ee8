use serde::{Deserialize, Serialize};

use super::{check_time, SpectralDensity};
use crate::error::{Error, Result};
use crate::numerics::{gamma, integrate_semi_infinite_with, QuadratureSpec, SemiInfiniteOptions};

/// Equilibrium bosonic bath at temperature `k_B T / ħΩ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalEnv {
    pub(crate) spectral: SpectralDensity,
    pub(crate) temperature: f64,
}

impl ThermalEnv {
    pub fn new(spectral: SpectralDensity, temperature: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::Domain {
                name: "temperature",
                value: temperature,
                rule: "temperature must be finite and non-negative",
            });
        }
        Ok(Self {
            spectral,
            temperature,
        })
    }

    pub fn zero_temperature(spectral: SpectralDensity) -> Self {
        Self {
            spectral,
            temperature: 0.0,
        }
    }

    pub fn spectral(&self) -> &SpectralDensity {
        &self.spectral
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }
}

// Distance from s = 0 or s = 1 below which the closed form is replaced by its
// first-order expansion about the pole.
const POLE_WINDOW: f64 = 1e-7;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn require_zero_temperature(env: &ThermalEnv, what: &str) -> Result<()> {
    if env.temperature == 0.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "{what} is only available at zero temperature (T = {})",
            env.temperature
        )))
    }
}

/// Zero-temperature decoherence factor
/// `F(t) = 4γ₀ Γ(s)/(s−1) [1 − (1+Λ²t²)^{−s/2} (cos sφ + Λt sin sφ)]`, `φ = arctan Λt`.
pub fn thermal_f_closed(env: &ThermalEnv, t: f64) -> Result<f64> {
    require_zero_temperature(env, "the closed-form decoherence factor")?;
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let SpectralDensity { gamma0, s, cutoff } = env.spectral;
    let x = cutoff * t;
    let phi = x.atan();
    let l = 0.5 * (x * x).ln_1p();
    let e = s - 1.0;
    if e.abs() < POLE_WINDOW {
        return Ok(4.0 * gamma0 * (l + e * (0.5 * (phi * phi - l * l) - EULER_GAMMA * l)));
    }
    if s.abs() < POLE_WINDOW {
        let a = l - x * phi;
        return Ok(4.0
            * gamma0
            * (-a + s * (0.5 * (l * l - phi * phi) - l * x * phi + (EULER_GAMMA - 1.0) * a)));
    }
    // Γ(s)/(s−1) = Γ(s−1) and the bracket equals 1 − (1+x²)^{(1−s)/2} cos((s−1)φ),
    // written here without cancellation for small x.
    let theta = (s - 1.0) * phi;
    let log_mod = (1.0 - s) * l;
    let half = (0.5 * theta).sin();
    let bracket = 2.0 * half * half - log_mod.exp_m1() * theta.cos();
    Ok(4.0 * gamma0 * gamma(s - 1.0)? * bracket)
}

/// `F(t) = 4 ∫₀^∞ I(ω) coth(ω/2T) (1 − cos ωt)/ω² dω` by adaptive quadrature.
///
/// At `T = 0` the segment `[0, ε]` is integrated term by term from the
/// small-ω expansion, which keeps `s` close to −1 tractable.
pub fn thermal_f_quadrature(env: &ThermalEnv, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_time(t)?;
    let SpectralDensity { gamma0, s, cutoff } = env.spectral;
    let temperature = env.temperature;
    if temperature > 0.0 && s <= 0.0 {
        return Err(Error::Domain {
            name: "s",
            value: s,
            rule: "finite-temperature decoherence requires s > 0 for integrability",
        });
    }
    if t == 0.0 || gamma0 == 0.0 {
        return Ok(0.0);
    }
    let prefactor = 4.0 * gamma0 * cutoff.powf(1.0 - s);
    let base = move |w: f64| {
        let half = (0.5 * w * t).sin();
        w.powf(s - 2.0) * (-w / cutoff).exp() * 2.0 * half * half
    };

    if temperature == 0.0 {
        let eps = (1e-3 * cutoff).min(0.5 / t);
        let head = origin_series(s, cutoff, t, eps);
        let opts = SemiInfiniteOptions {
            lower: eps,
            scale: cutoff,
            frequency: t,
            origin_exponent: None,
        };
        let tail = integrate_semi_infinite_with(base, spec, &opts)?;
        Ok(prefactor * (head + tail.value))
    } else {
        let opts = SemiInfiniteOptions {
            lower: 0.0,
            scale: cutoff,
            frequency: t,
            origin_exponent: Some(s - 1.0),
        };
        let q =
            integrate_semi_infinite_with(|w| base(w) * coth(0.5 * w / temperature), spec, &opts)?;
        Ok(prefactor * q.value)
    }
}

fn coth(x: f64) -> f64 {
    if x > 20.0 {
        1.0
    } else {
        1.0 / x.tanh()
    }
}

/// `∫₀^ε ω^{s−2} e^{−ω/Λ} (1 − cos ωt) dω` from the double power series of
/// the exponential and the cosine. Requires `εt ≤ 1/2` and `ε ≪ Λ`.
fn origin_series(s: f64, cutoff: f64, t: f64, eps: f64) -> f64 {
    let x2 = (eps * t) * (eps * t);
    let y = -eps / cutoff;
    let mut total = 0.0;
    // cos_term = (−1)^{k+1} (εt)^{2k}/(2k)!
    let mut cos_term = 0.5 * x2;
    for k in 1..=30 {
        let mut exp_term = 1.0;
        let mut row = 0.0;
        for m in 0..=30 {
            let p = s - 1.0 + m as f64 + 2.0 * k as f64;
            let term = exp_term / p;
            row += term;
            if term.abs() <= 1e-18 * row.abs() {
                break;
            }
            exp_term *= y / (m + 1) as f64;
        }
        let contribution = cos_term * row;
        total += contribution;
        if contribution.abs() <= 1e-18 * total.abs() {
            break;
        }
        let k2 = 2.0 * k as f64;
        cos_term *= -x2 / ((k2 + 1.0) * (k2 + 2.0));
    }
    eps.powf(s - 1.0) * total
}

/// Zero-temperature diffusion coefficient `D(t) = ½ dF/dt`
/// `= 2γ₀ Λ Γ(s) sin(s arctan Λt) / (1+Λ²t²)^{s/2}`.
pub fn thermal_d(env: &ThermalEnv, t: f64) -> Result<f64> {
    require_zero_temperature(env, "the closed-form diffusion coefficient")?;
    check_time(t)?;
    let SpectralDensity { gamma0, s, cutoff } = env.spectral;
    let x = cutoff * t;
    let phi = x.atan();
    // Γ(s) sin(sφ) = Γ(1+s) φ sinc(sφ), regular at s = 0.
    let z = s * phi;
    let sinc = if z == 0.0 { 1.0 } else { z.sin() / z };
    let decay = (-0.5 * s * (x * x).ln_1p()).exp();
    Ok(2.0 * gamma0 * cutoff * gamma(1.0 + s)? * phi * sinc * decay)
}

/// `D(t) = 2 ∫₀^∞ I(ω) coth(ω/2T) sin(ωt)/ω dω`, valid at any temperature.
pub fn thermal_d_quadrature(env: &ThermalEnv, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_time(t)?;
    let SpectralDensity { gamma0, s, cutoff } = env.spectral;
    let temperature = env.temperature;
    if temperature > 0.0 && s <= 0.0 {
        return Err(Error::Domain {
            name: "s",
            value: s,
            rule: "finite-temperature diffusion requires s > 0 for integrability",
        });
    }
    if t == 0.0 || gamma0 == 0.0 {
        return Ok(0.0);
    }
    let prefactor = 2.0 * gamma0 * cutoff.powf(1.0 - s);
    let origin_exponent = if temperature == 0.0 { s } else { s - 1.0 };
    let opts = SemiInfiniteOptions {
        lower: 0.0,
        scale: cutoff,
        frequency: t,
        origin_exponent: Some(origin_exponent),
    };
    let q = integrate_semi_infinite_with(
        |w| {
            let occupation = if temperature == 0.0 {
                1.0
            } else {
                coth(0.5 * w / temperature)
            };
            w.powf(s - 1.0) * (-w / cutoff).exp() * (w * t).sin() * occupation
        },
        spec,
        &opts,
    )?;
    Ok(prefactor * q.value)
}
