//! Mixed-state geometric phase of the dephasing qubit over one period.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::envmodels::{Environment, SpectralDensity};
use crate::error::{Error, Result};
use crate::numerics::{gamma, QuadratureSpec};
use crate::qubit::{eigensystem, inner, reduced_density, BlochInitial, EigenPair};

/// Largest phase change tolerated when the grid is doubled.
pub const GRID_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_GRID: usize = 4096;
pub const MIN_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpResult {
    pub phi_g: f64,
    pub phi_u: f64,
    /// `φ_G − φ_u`, wrapped into `(−π, π]`.
    pub delta_phi: f64,
    pub normalized_delta: f64,
    pub grid_points: usize,
    /// `|Δφ_G|` between the `grid` and `2·grid` evaluations.
    pub richardson_gap: f64,
}

/// One geometric-phase evaluation: initial state, environment, period and
/// the number of uniform time steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpRun {
    pub init: BlochInitial,
    pub env: Environment,
    pub period: f64,
    pub grid: usize,
    pub quadrature: QuadratureSpec,
}

impl GpRun {
    /// One free-precession period `τ = 2π/Ω` on the default grid.
    pub fn new(init: BlochInitial, env: Environment) -> Self {
        Self {
            init,
            env,
            period: TAU,
            grid: DEFAULT_GRID,
            quadrature: QuadratureSpec::default(),
        }
    }

    pub fn with_grid(mut self, grid: usize) -> Result<Self> {
        self.grid = grid;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid < MIN_GRID {
            return Err(Error::Domain {
                name: "grid",
                value: self.grid as f64,
                rule: "at least 64 time steps are required",
            });
        }
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::Domain {
                name: "period",
                value: self.period,
                rule: "period must be positive",
            });
        }
        self.quadrature.validate()
    }
}

/// Closed-system phase `π(1 − cos θ)`.
pub fn gp_unitary(init: &BlochInitial) -> f64 {
    PI * (1.0 - init.theta().cos())
}

fn wrap_signed(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Geometric phase from the kinematic mixed-state functional, evaluated as
/// a discrete Pancharatnam product along each eigen-branch.
///
/// The path is sampled on `2·grid` steps; the phase from every other node is
/// compared with the full one and the pair is Richardson-extrapolated.
pub fn gp_evaluate(run: &GpRun) -> Result<GpResult> {
    run.validate()?;
    let phi_u = gp_unitary(&run.init);
    let theta = run.init.theta();
    if theta == 0.0 || theta == PI {
        return Ok(GpResult {
            phi_g: phi_u,
            phi_u,
            delta_phi: 0.0,
            normalized_delta: 0.0,
            grid_points: run.grid,
            richardson_gap: 0.0,
        });
    }

    let steps = 2 * run.grid;
    let mut eigs = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let t = run.period * j as f64 / steps as f64;
        let f = run.env.decoherence(t, &run.quadrature)?;
        let rho = reduced_density(&run.init, f, t)?;
        eigs.push(eigensystem(&rho)?);
    }

    let coarse = transported_phase(&eigs, 2)?;
    let fine = transported_phase(&eigs, 1)?;
    let change = wrap_signed(fine - coarse);
    let gap = change.abs();
    if gap >= GRID_TOLERANCE {
        return Err(Error::GridConvergence {
            gap,
            grid: run.grid,
        });
    }
    let phi_g = (fine + change / 3.0).rem_euclid(TAU);
    let delta_phi = wrap_signed(phi_g - phi_u);
    Ok(GpResult {
        phi_g,
        phi_u,
        delta_phi,
        normalized_delta: if phi_u != 0.0 { delta_phi / phi_u } else { 0.0 },
        grid_points: run.grid,
        richardson_gap: gap,
    })
}

// arg Σ_k √(ε_k(0) ε_k(τ)) ⟨Ψ_k(0)|Ψ_k(τ)⟩ with each Ψ_k(τ) parallel
// transported node by node, i.e. with the dynamical overlaps removed.
fn transported_phase(eigs: &[(EigenPair, EigenPair)], stride: usize) -> Result<f64> {
    let (p0, m0) = eigs[0];
    let start = [p0.eigenvector, m0.eigenvector];
    let mut current = start;
    let mut values = [p0.eigenvalue, m0.eigenvalue];
    for &(p, m) in eigs.iter().step_by(stride).skip(1) {
        let mut next = [p.eigenvector, m.eigenvector];
        let mut next_values = [p.eigenvalue, m.eigenvalue];
        if inner(&current[0], &next[0]).norm() < inner(&current[0], &next[1]).norm() {
            next.swap(0, 1);
            next_values.swap(0, 1);
        }
        for k in 0..2 {
            let overlap = inner(&current[k], &next[k]);
            let size = overlap.norm();
            if size > 0.0 {
                let align = overlap.conj() / size;
                next[k] = [next[k][0] * align, next[k][1] * align];
            }
        }
        current = next;
        values = next_values;
    }
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..2 {
        let weight = ([p0.eigenvalue, m0.eigenvalue][k] * values[k])
            .max(0.0)
            .sqrt();
        total += inner(&start[k], &current[k]) * weight;
    }
    if total.norm() == 0.0 {
        return Err(Error::Invalid(
            "geometric phase undefined: vanishing interference sum".into(),
        ));
    }
    Ok(total.arg().rem_euclid(TAU))
}

// Removable poles of Γ(s−2) inside s > −1.
const THERMAL_POLES: [f64; 3] = [0.0, 1.0, 2.0];
const POLE_HALF_WIDTH: f64 = 1e-4;

/// First-order (in γ₀) thermal zero-temperature correction δφ, from
/// expanding the phase functional to linear order in `F` over one period:
///
/// `δφ = −2γ₀ sin²θ cos θ Γ(s−2) {2π(s−2) + (1+a²)^{−s/2} [4π cos(sA) + (4π²Λ − 1/Λ) sin(sA)]}`
///
/// with `a = 2πΛ`, `A = arctan a`. Within `10⁻⁴` of a removable pole the
/// value is interpolated linearly between `s₀ ± 10⁻⁴`.
pub fn correction_thermal_perturbative(sd: &SpectralDensity, init: &BlochInitial) -> Result<f64> {
    let s = sd.s();
    let cutoff = sd.cutoff();
    let coefficient = match THERMAL_POLES
        .iter()
        .find(|&&p| (s - p).abs() < POLE_HALF_WIDTH)
    {
        Some(&p) => {
            let left = thermal_bracket(p - POLE_HALF_WIDTH, cutoff)?;
            let right = thermal_bracket(p + POLE_HALF_WIDTH, cutoff)?;
            let w = (s - (p - POLE_HALF_WIDTH)) / (2.0 * POLE_HALF_WIDTH);
            left + w * (right - left)
        }
        None => thermal_bracket(s, cutoff)?,
    };
    if !coefficient.is_finite() {
        return Err(Error::Domain {
            name: "s",
            value: s,
            rule: "perturbative correction could not be resolved near a pole",
        });
    }
    let theta = init.theta();
    Ok(-2.0 * sd.gamma0() * theta.sin().powi(2) * theta.cos() * coefficient)
}

fn thermal_bracket(s: f64, cutoff: f64) -> Result<f64> {
    let a = TAU * cutoff;
    let angle = a.atan();
    let decay = (-0.5 * s * (a * a).ln_1p()).exp();
    let trig =
        4.0 * PI * (s * angle).cos() + (4.0 * PI * PI * cutoff - 1.0 / cutoff) * (s * angle).sin();
    Ok(gamma(s - 2.0)? * (TAU * (s - 2.0) + decay * trig))
}

/// Leading-order non-equilibrium correction `γ₀ Γ(s+1) sin²θ cos θ`.
pub fn correction_noneq_perturbative(sd: &SpectralDensity, init: &BlochInitial) -> f64 {
    let theta = init.theta();
    // s > −1 is guaranteed by SpectralDensity, so Γ(s+1) has no pole here.
    let g = gamma(sd.s() + 1.0).unwrap_or(f64::NAN);
    sd.gamma0() * g * theta.sin().powi(2) * theta.cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envmodels::{NonEqEnv, NonEqMode, ThermalEnv};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn thermal(gamma0: f64, s: f64) -> Environment {
        ThermalEnv::zero_temperature(SpectralDensity::new(gamma0, s, 10.0).unwrap()).into()
    }

    #[test]
    fn unitary_values() {
        assert_eq!(gp_unitary(&BlochInitial::new(0.0).unwrap()), 0.0);
        assert_relative_eq!(gp_unitary(&BlochInitial::new(PI / 2.0).unwrap()), PI);
        assert_relative_eq!(
            gp_unitary(&BlochInitial::new(PI / 3.0).unwrap()),
            PI / 2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn closed_system_recovery() {
        for theta in [PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
            let init = BlochInitial::new(theta).unwrap();
            let r = gp_evaluate(&GpRun::new(init, thermal(0.0, 1.0))).unwrap();
            assert_abs_diff_eq!(r.phi_g, gp_unitary(&init), epsilon = 1e-9);
            assert!(r.richardson_gap < GRID_TOLERANCE);
        }
    }

    #[test]
    fn poles_short_circuit() {
        for theta in [0.0, PI] {
            let init = BlochInitial::new(theta).unwrap();
            let r = gp_evaluate(&GpRun::new(init, thermal(0.1, 1.0))).unwrap();
            assert_eq!(r.delta_phi, 0.0);
        }
    }

    #[test]
    fn equator_is_unchanged_to_first_order() {
        let init = BlochInitial::new(PI / 2.0).unwrap();
        let r = gp_evaluate(&GpRun::new(init, thermal(1e-3, 3.0))).unwrap();
        assert!(r.delta_phi.abs() < 1e-5);
    }

    #[test]
    fn small_grid_rejected() {
        let init = BlochInitial::new(1.0).unwrap();
        assert!(GpRun::new(init, thermal(0.0, 1.0)).with_grid(32).is_err());
    }

    #[test]
    fn thermal_correction_pole_continuity() {
        let init = BlochInitial::new(PI / 3.0).unwrap();
        for s0 in [1.0, 2.0, 3.0] {
            let l = correction_thermal_perturbative(
                &SpectralDensity::new(0.01, s0 - 1e-4, 10.0).unwrap(),
                &init,
            )
            .unwrap();
            let r = correction_thermal_perturbative(
                &SpectralDensity::new(0.01, s0 + 1e-4, 10.0).unwrap(),
                &init,
            )
            .unwrap();
            assert_relative_eq!(l, r, max_relative = 1e-3);
        }
        let zero =
            correction_thermal_perturbative(&SpectralDensity::new(0.01, 0.0, 10.0).unwrap(), &init)
                .unwrap();
        assert!(zero.is_finite());
    }

    #[test]
    fn thermal_correction_vanishes_on_equator() {
        let init = BlochInitial::new(PI / 2.0).unwrap();
        for s in [0.5, 1.0, 2.5, 3.7] {
            let v = correction_thermal_perturbative(
                &SpectralDensity::new(0.01, s, 10.0).unwrap(),
                &init,
            )
            .unwrap();
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn noneq_correction_values() {
        let init = BlochInitial::new(PI / 3.0).unwrap();
        let sd = SpectralDensity::new(0.1, 2.0, 10.0).unwrap();
        assert_relative_eq!(
            correction_noneq_perturbative(&sd, &init),
            0.075,
            max_relative = 1e-14
        );
        let one = correction_noneq_perturbative(&sd.with_s(1.0).unwrap(), &init);
        let three = correction_noneq_perturbative(&sd.with_s(3.0).unwrap(), &init);
        assert_relative_eq!(one / three, 1.0 / 6.0, max_relative = 1e-14);
        for theta in [0.0, PI] {
            let v = correction_noneq_perturbative(&sd, &BlochInitial::new(theta).unwrap());
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-16);
        }
    }

    #[test]
    fn non_equilibrium_runs() {
        let sd = SpectralDensity::new(0.01, 2.0, 10.0).unwrap();
        let env = NonEqEnv::new(sd, 0.3, 2.0, NonEqMode::Rebased).unwrap();
        let init = BlochInitial::new(PI / 3.0).unwrap();
        let r = gp_evaluate(&GpRun::new(init, env.into())).unwrap();
        assert!(r.phi_g.is_finite() && r.delta_phi.abs() < 0.1);
    }
}
