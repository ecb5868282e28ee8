//! Spectral densities, environment descriptors, decoherence factors and
//! diffusion coefficients.

mod markov;
mod noneq;
mod thermal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;

pub use markov::{markovianity_report, MarkovReport};
pub use noneq::{noneq_d, noneq_f, noneq_f_raw, NonEqEnv, NonEqMode};
pub use thermal::{
    thermal_d, thermal_d_quadrature, thermal_f_closed, thermal_f_quadrature, ThermalEnv,
};

/// `I(ω) = γ₀ ω^s Λ^{1−s} e^{−ω/Λ}`, frequencies in units of Ω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    gamma0: f64,
    s: f64,
    cutoff: f64,
}

impl SpectralDensity {
    pub fn new(gamma0: f64, s: f64, cutoff: f64) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 >= 0.0) {
            return Err(Error::Domain {
                name: "gamma0",
                value: gamma0,
                rule: "coupling must be finite and non-negative",
            });
        }
        if !(s.is_finite() && s > -1.0) {
            return Err(Error::Domain {
                name: "s",
                value: s,
                rule: "ohmicity must satisfy s > -1",
            });
        }
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::Domain {
                name: "cutoff",
                value: cutoff,
                rule: "cutoff must be positive",
            });
        }
        Ok(Self { gamma0, s, cutoff })
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn with_gamma0(&self, gamma0: f64) -> Result<Self> {
        Self::new(gamma0, self.s, self.cutoff)
    }

    pub fn with_s(&self, s: f64) -> Result<Self> {
        Self::new(self.gamma0, s, self.cutoff)
    }

    pub fn eval(&self, omega: f64) -> Result<f64> {
        spectral_density_eval(self, omega)
    }
}

pub fn spectral_density_eval(sd: &SpectralDensity, omega: f64) -> Result<f64> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::Domain {
            name: "omega",
            value: omega,
            rule: "frequency must be finite and non-negative",
        });
    }
    let SpectralDensity { gamma0, s, cutoff } = *sd;
    if omega == 0.0 {
        return if s > 0.0 {
            Ok(0.0)
        } else if s == 0.0 {
            Ok(gamma0 * cutoff)
        } else {
            Err(Error::Domain {
                name: "omega",
                value: omega,
                rule: "spectral density diverges at zero frequency for s < 0",
            })
        };
    }
    Ok(gamma0 * (omega / cutoff).powf(s) * cutoff * (-omega / cutoff).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvKind {
    Thermal,
    NonEquilibrium,
}

impl std::fmt::Display for EnvKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnvKind::Thermal => "thermal",
            EnvKind::NonEquilibrium => "noneq",
        })
    }
}

/// Either bath model, with a uniform interface for `F(t)` and `D(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Environment {
    Thermal(ThermalEnv),
    NonEq(NonEqEnv),
}

impl Environment {
    pub fn kind(&self) -> EnvKind {
        match self {
            Environment::Thermal(_) => EnvKind::Thermal,
            Environment::NonEq(_) => EnvKind::NonEquilibrium,
        }
    }

    pub fn spectral(&self) -> &SpectralDensity {
        match self {
            Environment::Thermal(e) => &e.spectral,
            Environment::NonEq(e) => &e.spectral,
        }
    }

    /// Decoherence factor `F(t)`; the closed form is used at zero temperature.
    pub fn decoherence(&self, t: f64, spec: &QuadratureSpec) -> Result<f64> {
        match self {
            Environment::Thermal(e) if e.temperature == 0.0 => thermal::thermal_f_closed(e, t),
            Environment::Thermal(e) => thermal_f_quadrature(e, t, spec),
            Environment::NonEq(e) => noneq_f(e, t),
        }
    }

    /// Diffusion coefficient `D(t) = ½ dF/dt`.
    pub fn diffusion(&self, t: f64, spec: &QuadratureSpec) -> Result<f64> {
        match self {
            Environment::Thermal(e) if e.temperature == 0.0 => thermal_d(e, t),
            Environment::Thermal(e) => thermal_d_quadrature(e, t, spec),
            Environment::NonEq(e) => noneq_d(e, t),
        }
    }
}

impl From<ThermalEnv> for Environment {
    fn from(e: ThermalEnv) -> Self {
        Environment::Thermal(e)
    }
}

impl From<NonEqEnv> for Environment {
    fn from(e: NonEqEnv) -> Self {
        Environment::NonEq(e)
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "t",
            value: t,
            rule: "time must be finite and non-negative",
        })
    }
}
