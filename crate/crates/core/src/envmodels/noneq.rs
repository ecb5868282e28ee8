use serde::{Deserialize, Serialize};

use super::{check_time, SpectralDensity};
use crate::error::{Error, Result};
use crate::numerics::gamma;

/// How the non-equilibrium decoherence factor is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NonEqMode {
    /// `F̃(t) − F̃(0)`, so the coherence is untouched at `t = 0`.
    #[default]
    Rebased,
    /// The printed expression, equal to 1 at `t = 0`.
    Raw,
}

impl std::str::FromStr for NonEqMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rebased" => Ok(NonEqMode::Rebased),
            "raw" => Ok(NonEqMode::Raw),
            other => Err(Error::Invalid(format!(
                "unknown non-equilibrium mode {other:?} (expected \"rebased\" or \"raw\")"
            ))),
        }
    }
}

/// Bath with non-stationary statistics, parameterised by a delay `λ` (units
/// of 1/Ω) and a rate `d` (units of Ω).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonEqEnv {
    pub(crate) spectral: SpectralDensity,
    pub(crate) lambda: f64,
    pub(crate) d: f64,
    pub(crate) mode: NonEqMode,
}

impl NonEqEnv {
    pub fn new(spectral: SpectralDensity, lambda: f64, d: f64, mode: NonEqMode) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::Domain {
                name: "lambda",
                value: lambda,
                rule: "lambda must be finite",
            });
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::Domain {
                name: "d",
                value: d,
                rule: "d must be positive",
            });
        }
        Ok(Self {
            spectral,
            lambda,
            d,
            mode,
        })
    }

    pub fn spectral(&self) -> &SpectralDensity {
        &self.spectral
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn mode(&self) -> NonEqMode {
        self.mode
    }

    pub fn with_mode(&self, mode: NonEqMode) -> Self {
        Self { mode, ..*self }
    }
}

// Bracketed exponent X(t) and its derivative, with
// F̃_raw = exp(−γ₀ X),
// X = e^{−4dt}(e^{2dt} − 1) [Γ(1+s) g + cosh 2dt + sinh 2dt],
// g = (1 + u²)^{−(1+s)/2} cos((1+s) arctan u),  u = 2Λ(t − λ).
fn exponent(env: &NonEqEnv, t: f64) -> Result<(f64, f64)> {
    let SpectralDensity { s, cutoff, .. } = env.spectral;
    let d = env.d;
    let e2 = (-2.0 * d * t).exp();
    let e4 = e2 * e2;
    // e^{−4dt}(e^{2dt} − 1), and its product with cosh + sinh = e^{2dt}
    let envelope = e2 * -(-2.0 * d * t).exp_m1();
    let saturating = -(-2.0 * d * t).exp_m1();
    let envelope_dot = -2.0 * d * e2 + 4.0 * d * e4;

    let u = 2.0 * cutoff * (t - env.lambda);
    let alpha = u.atan();
    let log_mod = (u * u).ln_1p();
    let g = (-0.5 * (1.0 + s) * log_mod).exp() * ((1.0 + s) * alpha).cos();
    let dg_du = -(1.0 + s) * (-0.5 * (2.0 + s) * log_mod).exp() * ((2.0 + s) * alpha).sin();
    let g_dot = 2.0 * cutoff * dg_du;

    let gamma1 = gamma(1.0 + s)?;
    let x = envelope * gamma1 * g + saturating;
    let x_dot = gamma1 * (envelope_dot * g + envelope * g_dot) + 2.0 * d * e2;
    Ok((x, x_dot))
}

/// The printed non-equilibrium decoherence factor, `exp(−γ₀ X(t))`.
pub fn noneq_f_raw(env: &NonEqEnv, t: f64) -> Result<f64> {
    check_time(t)?;
    let (x, _) = exponent(env, t)?;
    Ok((-env.spectral.gamma0 * x).exp())
}

/// Decoherence factor in the environment's [`NonEqMode`].
pub fn noneq_f(env: &NonEqEnv, t: f64) -> Result<f64> {
    let raw = noneq_f_raw(env, t)?;
    Ok(match env.mode {
        NonEqMode::Raw => raw,
        NonEqMode::Rebased => {
            let (x, _) = exponent(env, t)?;
            (-env.spectral.gamma0 * x).exp_m1()
        }
    })
}

/// `D(t) = ½ dF̃/dt`, identical in both modes.
pub fn noneq_d(env: &NonEqEnv, t: f64) -> Result<f64> {
    check_time(t)?;
    let gamma0 = env.spectral.gamma0;
    let (x, x_dot) = exponent(env, t)?;
    Ok(-0.5 * gamma0 * x_dot * (-gamma0 * x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::derivative;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn env(s: f64, mode: NonEqMode) -> NonEqEnv {
        let sd = SpectralDensity::new(0.1, s, 10.0).unwrap();
        NonEqEnv::new(sd, 0.3, 2.0, mode).unwrap()
    }

    #[test]
    fn initial_values() {
        for s in [0.5, 1.0, 3.0] {
            assert_eq!(noneq_f(&env(s, NonEqMode::Raw), 0.0).unwrap(), 1.0);
            assert_eq!(noneq_f(&env(s, NonEqMode::Rebased), 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn modes_differ_by_initial_value() {
        let raw = env(2.0, NonEqMode::Raw);
        let rebased = env(2.0, NonEqMode::Rebased);
        for i in 0..50 {
            let t = 0.07 * i as f64;
            let r = noneq_f(&raw, t).unwrap();
            let b = noneq_f(&rebased, t).unwrap();
            assert_abs_diff_eq!(r - b, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn diffusion_is_half_derivative() {
        for s in [-0.5, 1.0, 2.0, 3.0] {
            let e = env(s, NonEqMode::Raw);
            for t in [0.05, 0.2, 0.3, 0.45, 1.0, 2.5] {
                let numeric = 0.5 * derivative(|u| noneq_f_raw(&e, u).unwrap(), t, 1.0);
                let analytic = noneq_d(&e, t).unwrap();
                // F̃ is O(1) while D decays like e^{−2dt}; allow for difference roundoff.
                assert!((analytic - numeric).abs() <= 1e-6 * analytic.abs() + 1e-10);
            }
        }
    }

    #[test]
    fn large_time_limit() {
        // X → 1, so F̃_raw → e^{−γ₀}.
        let e = env(2.0, NonEqMode::Raw);
        assert_relative_eq!(
            noneq_f(&e, 50.0).unwrap(),
            (-0.1f64).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_invalid() {
        let sd = SpectralDensity::new(0.1, 1.0, 10.0).unwrap();
        assert!(NonEqEnv::new(sd, 0.3, 0.0, NonEqMode::Rebased).is_err());
        assert!(NonEqEnv::new(sd, f64::NAN, 1.0, NonEqMode::Rebased).is_err());
        assert!("weird".parse::<NonEqMode>().is_err());
        assert_eq!("raw".parse::<NonEqMode>().unwrap(), NonEqMode::Raw);
    }
}
